//! Data, prior and sampler configuration, chain state and the draw store.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Response vector and `T×d` covariate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesData {
    pub y: Vec<f64>,
    pub x: Matrix<f64>,
    pub column_names: Vec<String>,
    pub time_index: Option<Vec<String>>,
}

impl TimeSeriesData {
    pub fn new(y: Vec<f64>, x: Matrix<f64>, column_names: Vec<String>) -> Result<Self> {
        let data = Self {
            y,
            x,
            column_names,
            time_index: None,
        };
        data.check()?;
        Ok(data)
    }

    pub fn with_time_index(mut self, index: Vec<String>) -> Result<Self> {
        if index.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "time index has {} labels for {} observations",
                index.len(),
                self.len()
            )));
        }
        self.time_index = Some(index);
        Ok(self)
    }

    /// Number of observations `T`.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Number of covariates `d`.
    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn check(&self) -> Result<()> {
        if self.x.rows() != self.y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} responses but {} covariate rows",
                self.y.len(),
                self.x.rows()
            )));
        }
        if self.column_names.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} column names for {} covariates",
                self.column_names.len(),
                self.dim()
            )));
        }
        if self.dim() == 0 {
            return Err(Error::InvalidData("no covariates (d = 0)".into()));
        }
        if self.len() < 2 {
            return Err(Error::InvalidData(format!(
                "need at least 2 observations, got {}",
                self.len()
            )));
        }
        if self.y.iter().chain(self.x.as_slice()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite value in data".into()));
        }
        Ok(())
    }

    /// True when column 0 is identically one.
    pub fn has_intercept(&self) -> bool {
        (0..self.len()).all(|t| self.x[(t, 0)] == 1.0)
    }

    /// First `n` observations.
    pub fn head(&self, n: usize) -> Result<Self> {
        if n > self.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot take {n} of {} rows",
                self.len()
            )));
        }
        let x = Matrix::from_row_major(n, self.dim(), self.x.as_slice()[..n * self.dim()].to_vec())?;
        Ok(Self {
            y: self.y[..n].to_vec(),
            x,
            column_names: self.column_names.clone(),
            time_index: self.time_index.as_ref().map(|ix| ix[..n].to_vec()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModType {
    /// Normal-gamma-gamma (triple gamma).
    Triple,
    /// Normal-gamma (double gamma).
    Double,
    Ridge,
}

impl std::str::FromStr for ModType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triple" => Ok(Self::Triple),
            "double" => Ok(Self::Double),
            "ridge" => Ok(Self::Ridge),
            other => Err(Error::InvalidConfig(vec![format!(
                "unknown mod_type {other:?} (expected triple, double or ridge)"
            )])),
        }
    }
}

impl std::fmt::Display for ModType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Triple => "triple",
            Self::Double => "double",
            Self::Ridge => "ridge",
        })
    }
}

/// Hyperparameters of the pole, tail and global-shrinkage hyperpriors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkHyper {
    pub alpha_a_xi: f64,
    pub beta_a_xi: f64,
    pub alpha_a_tau: f64,
    pub beta_a_tau: f64,
    pub alpha_c_xi: f64,
    pub beta_c_xi: f64,
    pub alpha_c_tau: f64,
    pub beta_c_tau: f64,
    pub d1: f64,
    pub d2: f64,
    pub e1: f64,
    pub e2: f64,
}

/// σ² ~ InvGamma(c0, C0), C0 ~ Gamma(g0, G0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomoskedHyper {
    pub c0: f64,
    pub g0: f64,
    #[serde(rename = "G0")]
    pub big_g0: f64,
}

/// μ ~ N(b_μ, B_μ), (φ+1)/2 ~ Beta(a_φ, b_φ), σ²_η ~ Gamma(1/2, 1/(2B_σ)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvHyper {
    pub b_mu: f64,
    #[serde(rename = "B_mu")]
    pub big_b_mu: f64,
    pub a_phi: f64,
    pub b_phi: f64,
    #[serde(rename = "B_sigma")]
    pub big_b_sigma: f64,
}

/// Full prior configuration. Fixed values are used for any parameter whose
/// learn flag is off, and as starting values otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub mod_type: ModType,
    pub learn_a_xi: bool,
    pub learn_a_tau: bool,
    pub learn_c_xi: bool,
    pub learn_c_tau: bool,
    #[serde(rename = "learn_kappa2_B")]
    pub learn_kappa2_b: bool,
    #[serde(rename = "learn_lambda2_B")]
    pub learn_lambda2_b: bool,
    pub a_xi: f64,
    pub a_tau: f64,
    pub c_xi: f64,
    pub c_tau: f64,
    #[serde(rename = "kappa2_B")]
    pub kappa2_b: f64,
    #[serde(rename = "lambda2_B")]
    pub lambda2_b: f64,
    pub hyper: ShrinkHyper,
    pub sv: bool,
    pub homosked_hyper: HomoskedHyper,
    pub sv_hyper: SvHyper,
}

/// Default fixed value of pole and tail parameters.
pub const DEFAULT_POLE_TAIL: f64 = 0.1;
/// Default fixed value of the global shrinkage parameters.
pub const DEFAULT_GLOBAL: f64 = 20.0;

/// Default prior for the given model type, with every parameter that the
/// model type can learn switched to learned.
pub fn default_prior_spec(mod_type: ModType, sv: bool) -> PriorSpec {
    let learn_pole_global = mod_type != ModType::Ridge;
    let learn_tail = mod_type == ModType::Triple;
    let c0 = 2.5;
    let g0 = 5.0;
    PriorSpec {
        mod_type,
        learn_a_xi: learn_pole_global,
        learn_a_tau: learn_pole_global,
        learn_c_xi: learn_tail,
        learn_c_tau: learn_tail,
        learn_kappa2_b: learn_pole_global,
        learn_lambda2_b: learn_pole_global,
        a_xi: DEFAULT_POLE_TAIL,
        a_tau: DEFAULT_POLE_TAIL,
        c_xi: DEFAULT_POLE_TAIL,
        c_tau: DEFAULT_POLE_TAIL,
        kappa2_b: DEFAULT_GLOBAL,
        lambda2_b: DEFAULT_GLOBAL,
        hyper: ShrinkHyper {
            alpha_a_xi: 5.0,
            beta_a_xi: 10.0,
            alpha_a_tau: 5.0,
            beta_a_tau: 10.0,
            alpha_c_xi: 5.0,
            beta_c_xi: 2.0,
            alpha_c_tau: 5.0,
            beta_c_tau: 2.0,
            d1: 0.001,
            d2: 0.001,
            e1: 0.001,
            e2: 0.001,
        },
        sv,
        homosked_hyper: HomoskedHyper {
            c0,
            g0,
            big_g0: g0 / (c0 - 1.0),
        },
        sv_hyper: SvHyper {
            b_mu: 0.0,
            big_b_mu: 1.0,
            a_phi: 5.0,
            b_phi: 1.5,
            big_b_sigma: 1.0,
        },
    }
}

/// Tuning of one adaptive Metropolis-Hastings parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhSettings {
    pub adaptive: bool,
    pub initial_sd: f64,
    pub batch_size: usize,
    pub max_adapt: f64,
    pub target_rate: f64,
}

impl Default for MhSettings {
    fn default() -> Self {
        Self {
            adaptive: true,
            initial_sd: 1.0,
            batch_size: 50,
            max_adapt: 0.01,
            target_rate: 0.44,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MhTuning {
    pub a_xi: MhSettings,
    pub a_tau: MhSettings,
    pub c_xi: MhSettings,
    pub c_tau: MhSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub niter: usize,
    pub nburn: usize,
    pub nthin: usize,
    pub seed: u64,
    pub mh: MhTuning,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self::new(10_000, 5_000, 1, 1)
    }
}

impl McmcConfig {
    pub fn new(niter: usize, nburn: usize, nthin: usize, seed: u64) -> Self {
        Self {
            niter,
            nburn,
            nthin,
            seed,
            mh: MhTuning::default(),
        }
    }

    /// Number of stored draws, `floor((niter − nburn) / nthin)`.
    pub fn stored_draws(&self) -> usize {
        if self.nthin == 0 {
            return 0;
        }
        self.niter.saturating_sub(self.nburn) / self.nthin
    }
}

/// Which of the six shrinkage parameters are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Learned {
    pub a_xi: bool,
    pub a_tau: bool,
    pub c_xi: bool,
    pub c_tau: bool,
    pub kappa2_b: bool,
    pub lambda2_b: bool,
}

/// Output of [`validate`]: a normalized prior with the ignore rules applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub spec: PriorSpec,
    pub cfg: McmcConfig,
    pub learned: Learned,
    pub warnings: Vec<String>,
}

/// Checks a prior/sampler/data combination and normalizes the prior: ridge
/// switches every shrinkage learn flag off, double switches the tail flags off.
pub fn validate(spec: &PriorSpec, cfg: &McmcConfig, data: &TimeSeriesData) -> Result<Validated> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    if let Err(e) = data.check() {
        errors.push(e.to_string());
    }

    let mut spec = *spec;
    let mut force_off = |flag: &mut bool, name: &str, why: &str| {
        if *flag {
            warnings.push(format!("learn_{name} ignored under {why}"));
            *flag = false;
        }
    };
    match spec.mod_type {
        ModType::Ridge => {
            force_off(&mut spec.learn_a_xi, "a_xi", "ridge");
            force_off(&mut spec.learn_a_tau, "a_tau", "ridge");
            force_off(&mut spec.learn_c_xi, "c_xi", "ridge");
            force_off(&mut spec.learn_c_tau, "c_tau", "ridge");
            force_off(&mut spec.learn_kappa2_b, "kappa2_B", "ridge");
            force_off(&mut spec.learn_lambda2_b, "lambda2_B", "ridge");
        }
        ModType::Double => {
            force_off(&mut spec.learn_c_xi, "c_xi", "double (no tail parameter)");
            force_off(&mut spec.learn_c_tau, "c_tau", "double (no tail parameter)");
        }
        ModType::Triple => {}
    }

    let mut positive = |name: &str, v: f64| {
        if !(v > 0.0 && v.is_finite()) {
            errors.push(format!("{name} must be positive and finite, got {v}"));
        }
    };
    let h = spec.hyper;
    for (name, v) in [
        ("alpha_a_xi", h.alpha_a_xi),
        ("beta_a_xi", h.beta_a_xi),
        ("alpha_a_tau", h.alpha_a_tau),
        ("beta_a_tau", h.beta_a_tau),
        ("alpha_c_xi", h.alpha_c_xi),
        ("beta_c_xi", h.beta_c_xi),
        ("alpha_c_tau", h.alpha_c_tau),
        ("beta_c_tau", h.beta_c_tau),
        ("d1", h.d1),
        ("d2", h.d2),
        ("e1", h.e1),
        ("e2", h.e2),
        ("a_xi", spec.a_xi),
        ("a_tau", spec.a_tau),
        ("c_xi", spec.c_xi),
        ("c_tau", spec.c_tau),
        ("kappa2_B", spec.kappa2_b),
        ("lambda2_B", spec.lambda2_b),
        ("c0", spec.homosked_hyper.c0),
        ("g0", spec.homosked_hyper.g0),
        ("G0", spec.homosked_hyper.big_g0),
    ] {
        positive(name, v);
    }
    if spec.sv {
        let s = spec.sv_hyper;
        for (name, v) in [
            ("B_mu", s.big_b_mu),
            ("a_phi", s.a_phi),
            ("b_phi", s.b_phi),
            ("B_sigma", s.big_b_sigma),
        ] {
            positive(name, v);
        }
        if !s.b_mu.is_finite() {
            errors.push(format!("b_mu must be finite, got {}", s.b_mu));
        }
    }

    // learned NGG pole/tail parameters live in (0, 1/2) because 2a, 2c are Beta
    if spec.mod_type == ModType::Triple {
        for (name, learned, v) in [
            ("a_xi", spec.learn_a_xi, spec.a_xi),
            ("a_tau", spec.learn_a_tau, spec.a_tau),
            ("c_xi", spec.learn_c_xi, spec.c_xi),
            ("c_tau", spec.learn_c_tau, spec.c_tau),
        ] {
            if learned && !(v > 0.0 && v < 0.5) {
                errors.push(format!(
                    "starting value of learned {name} must lie in (0, 0.5), got {v}"
                ));
            }
        }
    }

    if cfg.niter == 0 {
        errors.push("niter must be positive".into());
    }
    if cfg.nthin == 0 {
        errors.push("nthin must be positive".into());
    }
    if cfg.nburn >= cfg.niter {
        errors.push(format!(
            "empty draw window: nburn ({}) must be smaller than niter ({})",
            cfg.nburn, cfg.niter
        ));
    } else if cfg.nthin > 0 && cfg.stored_draws() == 0 {
        errors.push("empty draw window: nthin exceeds the number of post-burn-in iterations".into());
    }
    for (name, mh) in [
        ("a_xi", cfg.mh.a_xi),
        ("a_tau", cfg.mh.a_tau),
        ("c_xi", cfg.mh.c_xi),
        ("c_tau", cfg.mh.c_tau),
    ] {
        if !(mh.initial_sd > 0.0 && mh.initial_sd.is_finite()) {
            errors.push(format!("{name}: MH initial_sd must be positive"));
        }
        if mh.batch_size == 0 {
            errors.push(format!("{name}: MH batch_size must be positive"));
        }
        if !(mh.max_adapt > 0.0) {
            errors.push(format!("{name}: MH max_adapt must be positive"));
        }
        if !(mh.target_rate > 0.0 && mh.target_rate < 1.0) {
            errors.push(format!("{name}: MH target_rate must lie in (0, 1)"));
        }
    }

    if !errors.is_empty() {
        return Err(Error::InvalidConfig(errors));
    }
    let learned = Learned {
        a_xi: spec.learn_a_xi,
        a_tau: spec.learn_a_tau,
        c_xi: spec.learn_c_xi,
        c_tau: spec.learn_c_tau,
        kappa2_b: spec.learn_kappa2_b,
        lambda2_b: spec.learn_lambda2_b,
    };
    Ok(Validated {
        spec,
        cfg: *cfg,
        learned,
        warnings,
    })
}

/// Latent variables and parameters of one MCMC iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    /// Non-centered states β̃_0..β̃_T, `(T+1)×d`.
    pub beta_tilde: Matrix<f64>,
    pub beta_mean: Vec<f64>,
    /// √θ_j, sign unrestricted.
    pub theta_sr: Vec<f64>,
    pub xi2: Vec<f64>,
    pub tau2: Vec<f64>,
    pub kappa2_j: Vec<f64>,
    pub lambda2_j: Vec<f64>,
    pub kappa2_b: f64,
    pub lambda2_b: f64,
    pub a_xi: f64,
    pub a_tau: f64,
    pub c_xi: f64,
    pub c_tau: f64,
    pub aux_d2_xi: f64,
    pub aux_d2_tau: f64,
    pub sigma2: f64,
    pub c0: f64,
    /// h_0..h_T (SV only, otherwise empty).
    pub h: Vec<f64>,
    pub sv_mu: f64,
    pub sv_phi: f64,
    pub sv_sigma2: f64,
    pub mixture_indicators: Vec<u8>,
}

impl ChainState {
    /// Starting point of a chain.
    pub fn initial(data: &TimeSeriesData, spec: &PriorSpec) -> Self {
        let (n, d) = (data.len(), data.dim());
        let mean_y = data.y.iter().sum::<f64>() / n as f64;
        let var_y = (data.y.iter().map(|v| (v - mean_y).powi(2)).sum::<f64>() / (n - 1) as f64)
            .max(1e-8);
        let (xi2, tau2) = match spec.mod_type {
            ModType::Ridge => (
                vec![2.0 / spec.kappa2_b; d],
                vec![2.0 / spec.lambda2_b; d],
            ),
            _ => (vec![1.0; d], vec![1.0; d]),
        };
        let (h, sv_mu) = if spec.sv {
            (vec![var_y.ln(); n + 1], var_y.ln())
        } else {
            (Vec::new(), 0.0)
        };
        Self {
            beta_tilde: Matrix::zeros(n + 1, d),
            beta_mean: vec![0.0; d],
            theta_sr: vec![0.1; d],
            xi2,
            tau2,
            kappa2_j: vec![1.0; d],
            lambda2_j: vec![1.0; d],
            kappa2_b: spec.kappa2_b,
            lambda2_b: spec.lambda2_b,
            a_xi: spec.a_xi,
            a_tau: spec.a_tau,
            c_xi: spec.c_xi,
            c_tau: spec.c_tau,
            aux_d2_xi: 1.0,
            aux_d2_tau: 1.0,
            sigma2: var_y,
            c0: spec.homosked_hyper.g0 / spec.homosked_hyper.big_g0,
            h,
            sv_mu,
            sv_phi: 0.5,
            sv_sigma2: 0.1,
            mixture_indicators: Vec::new(),
        }
    }

    /// Observation variances σ²_1..σ²_T.
    pub fn obs_variances(&self, n: usize, sv: bool) -> Vec<f64> {
        if sv {
            self.h[1..].iter().map(|h| h.exp()).collect()
        } else {
            vec![self.sigma2; n]
        }
    }

    /// Centered path β_jt = β_j + √θ_j β̃_jt, t = 0..T.
    pub fn centered_path(&self, j: usize) -> Vec<f64> {
        self.beta_tilde
            .column(j)
            .iter()
            .map(|bt| self.beta_mean[j] + self.theta_sr[j] * bt)
            .collect()
    }

    /// Observation residuals y_t − x_tβ − F_tβ̃_t, t = 1..T.
    pub fn residuals(&self, data: &TimeSeriesData) -> Vec<f64> {
        (0..data.len())
            .map(|t| {
                let bt = self.beta_tilde.row(t + 1);
                let fit: f64 = data
                    .x
                    .row(t)
                    .iter()
                    .enumerate()
                    .map(|(j, x)| x * (self.beta_mean[j] + self.theta_sr[j] * bt[j]))
                    .sum();
                data.y[t] - fit
            })
            .collect()
    }

    /// Gaussian log-likelihood of the observations given the current state.
    pub fn log_likelihood(&self, data: &TimeSeriesData, sv: bool) -> f64 {
        let s2 = self.obs_variances(data.len(), sv);
        self.residuals(data)
            .iter()
            .zip(&s2)
            .map(|(r, v)| crate::dists::log_normal_pdf(*r, 0.0, *v))
            .sum()
    }
}

/// Acceptance bookkeeping of one Metropolis-Hastings parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhDiag {
    pub name: String,
    pub batch_size: usize,
    pub accepts_per_batch: Vec<usize>,
    pub total_accepts: usize,
    pub total_proposals: usize,
    pub final_sd: f64,
}

impl MhDiag {
    pub fn acceptance_rate(&self) -> f64 {
        if self.total_proposals == 0 {
            0.0
        } else {
            self.total_accepts as f64 / self.total_proposals as f64
        }
    }
}

/// Stored draws of the stochastic-volatility block.
#[derive(Debug, Clone, PartialEq)]
pub struct SvDraws {
    /// `M×(T+1)` log-volatility paths.
    pub h: Matrix<f64>,
    pub mu: Vec<f64>,
    pub phi: Vec<f64>,
    pub sigma2: Vec<f64>,
}

/// Thinned post-burn-in draws. Every per-draw array has leading dimension `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawsStore {
    pub column_names: Vec<String>,
    /// Non-centered paths, one `M×(T+1)` matrix per covariate.
    pub beta_tilde: Vec<Matrix<f64>>,
    pub beta_mean: Matrix<f64>,
    pub theta_sr: Matrix<f64>,
    pub xi2: Matrix<f64>,
    pub tau2: Matrix<f64>,
    pub kappa2_j: Matrix<f64>,
    pub lambda2_j: Matrix<f64>,
    pub kappa2_b: Vec<f64>,
    pub lambda2_b: Vec<f64>,
    pub a_xi: Vec<f64>,
    pub a_tau: Vec<f64>,
    pub c_xi: Vec<f64>,
    pub c_tau: Vec<f64>,
    /// Homoskedastic error variance; empty for SV fits.
    pub sigma2: Vec<f64>,
    /// Empty for SV fits.
    pub c0: Vec<f64>,
    pub sv: Option<SvDraws>,
    pub mh_diag: Vec<MhDiag>,
    /// ASIS updates that kept the previous value because |√θ'| underflowed.
    pub asis_fallbacks: usize,
    pub priorvals: PriorSpec,
    pub learned: Learned,
    pub config: McmcConfig,
    /// Number of observations `T` the model was fitted on.
    pub n_obs: usize,
}

impl DrawsStore {
    pub fn n_draws(&self) -> usize {
        self.beta_mean.rows()
    }

    pub fn dim(&self) -> usize {
        self.beta_mean.cols()
    }

    /// Centered path β_j0..β_jT of draw `m`.
    pub fn centered_path(&self, j: usize, m: usize) -> Vec<f64> {
        let b = self.beta_mean[(m, j)];
        let s = self.theta_sr[(m, j)];
        self.beta_tilde[j].row(m).iter().map(|bt| b + s * bt).collect()
    }

    /// Draws of the observation variance σ²_t at `t ∈ 1..=T`.
    pub fn obs_variance_at(&self, m: usize, t: usize) -> f64 {
        match &self.sv {
            Some(sv) => sv.h[(m, t)].exp(),
            None => self.sigma2[m],
        }
    }
}
