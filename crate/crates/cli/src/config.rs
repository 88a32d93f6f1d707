//! Flat-key run configuration. The same keys are accepted as command-line
//! flags (`--a-xi 1`) and in TOML files (`a-xi = 1`); flags win.

use std::path::Path;

use clap::Args;
use serde::{Deserialize, Serialize};
use tvp_core::{default_prior_spec, McmcConfig, ModType, PriorSpec};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Overrides {
    /// Shrinkage prior: triple, double or ridge
    #[arg(long)]
    pub mod_type: Option<ModType>,
    /// Stochastic volatility for the observation errors
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub sv: Option<bool>,

    #[arg(long)]
    pub a_xi: Option<f64>,
    #[arg(long)]
    pub a_tau: Option<f64>,
    #[arg(long)]
    pub c_xi: Option<f64>,
    #[arg(long)]
    pub c_tau: Option<f64>,
    #[arg(long)]
    pub kappa2_b: Option<f64>,
    #[arg(long)]
    pub lambda2_b: Option<f64>,

    #[arg(long, value_name = "BOOL")]
    pub learn_a_xi: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub learn_a_tau: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub learn_c_xi: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub learn_c_tau: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub learn_kappa2_b: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub learn_lambda2_b: Option<bool>,

    /// Keep a_xi fixed at its given value
    #[arg(long)]
    #[serde(skip)]
    pub no_learn_a_xi: bool,
    #[arg(long)]
    #[serde(skip)]
    pub no_learn_a_tau: bool,
    #[arg(long)]
    #[serde(skip)]
    pub no_learn_c_xi: bool,
    #[arg(long)]
    #[serde(skip)]
    pub no_learn_c_tau: bool,
    #[arg(long)]
    #[serde(skip)]
    pub no_learn_kappa2_b: bool,
    #[arg(long)]
    #[serde(skip)]
    pub no_learn_lambda2_b: bool,

    #[arg(long)]
    pub alpha_a_xi: Option<f64>,
    #[arg(long)]
    pub beta_a_xi: Option<f64>,
    #[arg(long)]
    pub alpha_a_tau: Option<f64>,
    #[arg(long)]
    pub beta_a_tau: Option<f64>,
    #[arg(long)]
    pub alpha_c_xi: Option<f64>,
    #[arg(long)]
    pub beta_c_xi: Option<f64>,
    #[arg(long)]
    pub alpha_c_tau: Option<f64>,
    #[arg(long)]
    pub beta_c_tau: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    #[arg(long)]
    pub e1: Option<f64>,
    #[arg(long)]
    pub e2: Option<f64>,

    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub g0: Option<f64>,
    #[arg(long = "G0")]
    #[serde(rename = "G0")]
    pub big_g0: Option<f64>,

    #[arg(long)]
    pub b_mu: Option<f64>,
    #[arg(long = "B-mu")]
    #[serde(rename = "B-mu")]
    pub big_b_mu: Option<f64>,
    #[arg(long)]
    pub a_phi: Option<f64>,
    #[arg(long)]
    pub b_phi: Option<f64>,
    #[arg(long = "B-sigma")]
    #[serde(rename = "B-sigma")]
    pub big_b_sigma: Option<f64>,

    #[arg(long)]
    pub niter: Option<usize>,
    #[arg(long)]
    pub nburn: Option<usize>,
    #[arg(long)]
    pub nthin: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,

    /// Adapt the Metropolis-Hastings proposal scales
    #[arg(long, value_name = "BOOL")]
    pub adaptive: Option<bool>,
    #[arg(long)]
    pub mh_initial_sd: Option<f64>,
    #[arg(long)]
    pub mh_batch_size: Option<usize>,
    #[arg(long)]
    pub mh_max_adapt: Option<f64>,
    #[arg(long)]
    pub mh_target_rate: Option<f64>,
}

macro_rules! layered {
    ($base:expr, $top:expr; $($f:ident),* $(,)?) => {
        Overrides {
            $($f: $top.$f.or($base.$f),)*
            no_learn_a_xi: false,
            no_learn_a_tau: false,
            no_learn_c_xi: false,
            no_learn_c_tau: false,
            no_learn_kappa2_b: false,
            no_learn_lambda2_b: false,
        }
    };
}

impl Overrides {
    /// Folds `--no-learn-*` switches into the corresponding learn keys.
    pub fn normalized(mut self) -> Self {
        for (flag, key) in [
            (self.no_learn_a_xi, &mut self.learn_a_xi),
            (self.no_learn_a_tau, &mut self.learn_a_tau),
            (self.no_learn_c_xi, &mut self.learn_c_xi),
            (self.no_learn_c_tau, &mut self.learn_c_tau),
            (self.no_learn_kappa2_b, &mut self.learn_kappa2_b),
            (self.no_learn_lambda2_b, &mut self.learn_lambda2_b),
        ] {
            if flag {
                *key = Some(false);
            }
        }
        self.no_learn_a_xi = false;
        self.no_learn_a_tau = false;
        self.no_learn_c_xi = false;
        self.no_learn_c_tau = false;
        self.no_learn_kappa2_b = false;
        self.no_learn_lambda2_b = false;
        self
    }

    /// `top` over `self`, key by key.
    pub fn layered(&self, top: &Overrides) -> Overrides {
        let (base, top) = (self.clone().normalized(), top.clone().normalized());
        layered!(base, top;
            mod_type, sv, a_xi, a_tau, c_xi, c_tau, kappa2_b, lambda2_b,
            learn_a_xi, learn_a_tau, learn_c_xi, learn_c_tau, learn_kappa2_b, learn_lambda2_b,
            alpha_a_xi, beta_a_xi, alpha_a_tau, beta_a_tau, alpha_c_xi, beta_c_xi, alpha_c_tau, beta_c_tau,
            d1, d2, e1, e2, c0, g0, big_g0, b_mu, big_b_mu, a_phi, b_phi, big_b_sigma,
            niter, nburn, nthin, seed, adaptive, mh_initial_sd, mh_batch_size, mh_max_adapt, mh_target_rate,
        )
    }

    /// Resolved prior and sampler settings. Unset keys take the defaults of
    /// the chosen model type; `mcmc` supplies unset iteration counts and seed.
    pub fn resolve(&self, mcmc: &McmcConfig) -> (PriorSpec, McmcConfig) {
        let o = self.clone().normalized();
        let mut s = default_prior_spec(o.mod_type.unwrap_or(ModType::Double), o.sv.unwrap_or(false));
        macro_rules! set {
            ($($src:ident => $($dst:ident).+),* $(,)?) => {
                $(if let Some(v) = o.$src { s.$($dst).+ = v; })*
            };
        }
        set!(
            a_xi => a_xi, a_tau => a_tau, c_xi => c_xi, c_tau => c_tau,
            kappa2_b => kappa2_b, lambda2_b => lambda2_b,
            learn_a_xi => learn_a_xi, learn_a_tau => learn_a_tau,
            learn_c_xi => learn_c_xi, learn_c_tau => learn_c_tau,
            learn_kappa2_b => learn_kappa2_b, learn_lambda2_b => learn_lambda2_b,
            alpha_a_xi => hyper.alpha_a_xi, beta_a_xi => hyper.beta_a_xi,
            alpha_a_tau => hyper.alpha_a_tau, beta_a_tau => hyper.beta_a_tau,
            alpha_c_xi => hyper.alpha_c_xi, beta_c_xi => hyper.beta_c_xi,
            alpha_c_tau => hyper.alpha_c_tau, beta_c_tau => hyper.beta_c_tau,
            d1 => hyper.d1, d2 => hyper.d2, e1 => hyper.e1, e2 => hyper.e2,
            c0 => homosked_hyper.c0, g0 => homosked_hyper.g0, big_g0 => homosked_hyper.big_g0,
            b_mu => sv_hyper.b_mu, big_b_mu => sv_hyper.big_b_mu,
            a_phi => sv_hyper.a_phi, b_phi => sv_hyper.b_phi, big_b_sigma => sv_hyper.big_b_sigma,
        );
        // G0 follows c0 and g0 unless given explicitly
        if o.big_g0.is_none() && (o.c0.is_some() || o.g0.is_some()) {
            let h = &mut s.homosked_hyper;
            h.big_g0 = h.g0 / (h.c0 - 1.0);
        }

        let mut cfg = McmcConfig::new(
            o.niter.unwrap_or(mcmc.niter),
            o.nburn.unwrap_or(mcmc.nburn),
            o.nthin.unwrap_or(mcmc.nthin),
            o.seed.unwrap_or(mcmc.seed),
        );
        for mh in [&mut cfg.mh.a_xi, &mut cfg.mh.a_tau, &mut cfg.mh.c_xi, &mut cfg.mh.c_tau] {
            if let Some(v) = o.adaptive {
                mh.adaptive = v;
            }
            if let Some(v) = o.mh_initial_sd {
                mh.initial_sd = v;
            }
            if let Some(v) = o.mh_batch_size {
                mh.batch_size = v;
            }
            if let Some(v) = o.mh_max_adapt {
                mh.max_adapt = v;
            }
            if let Some(v) = o.mh_target_rate {
                mh.target_rate = v;
            }
        }
        (s, cfg)
    }
}

fn read_toml(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.parse::<toml::Table>().map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn overrides_from(table: toml::Table, path: &Path, what: &str) -> Result<Overrides> {
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config {
        path: path.to_path_buf(),
        msg: format!("{what}: {}", e.message()),
    })
}

/// A single flat-key configuration file.
pub fn load_overrides(path: &Path) -> Result<Overrides> {
    overrides_from(read_toml(path)?, path, "top level")
}

/// One named prior specification of a backtest.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSpec {
    pub name: String,
    pub overrides: Overrides,
}

/// A set of named specifications: top-level keys are shared, each
/// `[[spec]]` table has a `name` and its own keys.
///
/// ```toml
/// niter = 30000
///
/// [[spec]]
/// name = "ng"
/// mod-type = "double"
///
/// [[spec]]
/// name = "ridge"
/// mod-type = "ridge"
/// ```
pub fn load_config_set(path: &Path) -> Result<(Overrides, Vec<NamedSpec>)> {
    let bad = |msg: String| CliError::Config {
        path: path.to_path_buf(),
        msg,
    };
    let mut table = read_toml(path)?;
    let specs = match table.remove("spec") {
        Some(toml::Value::Array(a)) => a,
        Some(_) => return Err(bad("`spec` must be an array of tables ([[spec]])".into())),
        None => return Err(bad("no [[spec]] entries".into())),
    };
    let shared = overrides_from(table, path, "top level")?;
    let mut out: Vec<NamedSpec> = Vec::new();
    for (i, v) in specs.into_iter().enumerate() {
        let toml::Value::Table(mut t) = v else {
            return Err(bad(format!("spec #{} is not a table", i + 1)));
        };
        let name = match t.remove("name") {
            Some(toml::Value::String(s)) if !s.is_empty() => s,
            _ => return Err(bad(format!("spec #{} needs a non-empty string `name`", i + 1))),
        };
        if out.iter().any(|s| s.name == name) {
            return Err(bad(format!("duplicate spec name {name:?}")));
        }
        let overrides = overrides_from(t, path, &name)?;
        out.push(NamedSpec { name, overrides });
    }
    Ok((shared, out))
}

/// Resolved settings as written next to a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub mcmc: McmcConfig,
    pub prior: PriorSpec,
}

impl RunSpec {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Serialize(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e: toml::de::Error| CliError::Config {
            path: path.to_path_buf(),
            msg: e.message().to_string(),
        })
    }
}
