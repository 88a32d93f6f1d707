//! The Gibbs sampler: one sweep updates states, (β, √θ), interweaving,
//! the shrinkage hierarchy and the error variance, in that order.

pub mod adapt;
pub mod hyper;
pub mod steps;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use adapt::AdaptiveMhState;
pub use hyper::{draw_global_and_pole_tail, MhSet};
pub use steps::{asis_step, draw_beta_theta, draw_local_scales, draw_sigma2_homoskedastic, AsisOutcome};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::model::{
    validate, ChainState, DrawsStore, McmcConfig, PriorSpec, SvDraws, TimeSeriesData, Validated,
};
use crate::states::{build_precision, sample_states};
use crate::sv::{update_sv, SvLearn, SvParams};

/// Sampler state that persists across sweeps: the validated configuration,
/// adaptive MH scales and fallback counter.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    pub validated: Validated,
    pub mh: MhSet,
    pub asis_fallbacks: usize,
    pub sv_learn: SvLearn,
}

impl GibbsSampler {
    pub fn new(validated: Validated) -> Self {
        let mh = MhSet::new(&validated.cfg);
        Self {
            validated,
            mh,
            asis_fallbacks: 0,
            sv_learn: SvLearn::default(),
        }
    }

    /// One full sweep over all blocks.
    pub fn sweep<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        data: &TimeSeriesData,
        state: &mut ChainState,
    ) -> Result<()> {
        let spec = &self.validated.spec;
        let n = data.len();

        let sigma2_t = state.obs_variances(n, spec.sv);
        let sys = build_precision(&data.y, &data.x, &state.beta_mean, &state.theta_sr, &sigma2_t)?;
        state.beta_tilde = sample_states(rng, &sys)?;

        let (beta, sr) = draw_beta_theta(rng, data, &state.beta_tilde, &state.xi2, &state.tau2, &sigma2_t)?;
        state.beta_mean = beta;
        state.theta_sr = sr;

        let asis = asis_step(
            rng,
            &state.beta_tilde,
            &state.beta_mean,
            &state.theta_sr,
            &state.xi2,
            &state.tau2,
        )?;
        self.asis_fallbacks += asis.fallbacks.len();
        state.beta_mean = asis.beta_mean;
        state.theta_sr = asis.theta_sr;
        state.beta_tilde = asis.beta_tilde;

        draw_local_scales(rng, spec.mod_type, state)?;
        draw_global_and_pole_tail(rng, state, spec, &self.validated.learned, &mut self.mh)?;

        let res = state.residuals(data);
        if spec.sv {
            let params = SvParams {
                mu: state.sv_mu,
                phi: state.sv_phi,
                sigma2_eta: state.sv_sigma2,
            };
            let up = update_sv(rng, &res, &state.h, params, &spec.sv_hyper, self.sv_learn)?;
            state.h = up.h;
            state.sv_mu = up.params.mu;
            state.sv_phi = up.params.phi;
            state.sv_sigma2 = up.params.sigma2_eta;
            state.mixture_indicators = up.indicators;
        } else {
            let hh = spec.homosked_hyper;
            let (s2, c0) = draw_sigma2_homoskedastic(rng, &res, hh.c0, state.c0, hh.g0, hh.big_g0)?;
            state.sigma2 = s2;
            state.c0 = c0;
        }
        Ok(())
    }
}

/// Collects thinned draws row by row.
struct DrawsBuilder {
    d: usize,
    n1: usize,
    m: usize,
    beta_tilde: Vec<Vec<f64>>,
    beta_mean: Vec<f64>,
    theta_sr: Vec<f64>,
    xi2: Vec<f64>,
    tau2: Vec<f64>,
    kappa2_j: Vec<f64>,
    lambda2_j: Vec<f64>,
    kappa2_b: Vec<f64>,
    lambda2_b: Vec<f64>,
    a_xi: Vec<f64>,
    a_tau: Vec<f64>,
    c_xi: Vec<f64>,
    c_tau: Vec<f64>,
    sigma2: Vec<f64>,
    c0: Vec<f64>,
    h: Vec<f64>,
    sv_mu: Vec<f64>,
    sv_phi: Vec<f64>,
    sv_sigma2: Vec<f64>,
}

impl DrawsBuilder {
    fn new(d: usize, n1: usize, capacity: usize) -> Self {
        Self {
            d,
            n1,
            m: 0,
            beta_tilde: (0..d).map(|_| Vec::with_capacity(capacity * n1)).collect(),
            beta_mean: Vec::with_capacity(capacity * d),
            theta_sr: Vec::with_capacity(capacity * d),
            xi2: Vec::with_capacity(capacity * d),
            tau2: Vec::with_capacity(capacity * d),
            kappa2_j: Vec::with_capacity(capacity * d),
            lambda2_j: Vec::with_capacity(capacity * d),
            kappa2_b: Vec::with_capacity(capacity),
            lambda2_b: Vec::with_capacity(capacity),
            a_xi: Vec::with_capacity(capacity),
            a_tau: Vec::with_capacity(capacity),
            c_xi: Vec::with_capacity(capacity),
            c_tau: Vec::with_capacity(capacity),
            sigma2: Vec::with_capacity(capacity),
            c0: Vec::with_capacity(capacity),
            h: Vec::new(),
            sv_mu: Vec::new(),
            sv_phi: Vec::new(),
            sv_sigma2: Vec::new(),
        }
    }

    fn push(&mut self, s: &ChainState, sv: bool) {
        self.m += 1;
        for j in 0..self.d {
            self.beta_tilde[j].extend(s.beta_tilde.column(j));
        }
        self.beta_mean.extend(&s.beta_mean);
        self.theta_sr.extend(&s.theta_sr);
        self.xi2.extend(&s.xi2);
        self.tau2.extend(&s.tau2);
        self.kappa2_j.extend(&s.kappa2_j);
        self.lambda2_j.extend(&s.lambda2_j);
        self.kappa2_b.push(s.kappa2_b);
        self.lambda2_b.push(s.lambda2_b);
        self.a_xi.push(s.a_xi);
        self.a_tau.push(s.a_tau);
        self.c_xi.push(s.c_xi);
        self.c_tau.push(s.c_tau);
        if sv {
            self.h.extend(&s.h);
            self.sv_mu.push(s.sv_mu);
            self.sv_phi.push(s.sv_phi);
            self.sv_sigma2.push(s.sv_sigma2);
        } else {
            self.sigma2.push(s.sigma2);
            self.c0.push(s.c0);
        }
    }

    fn finish(self, data: &TimeSeriesData, sampler: &GibbsSampler) -> Result<DrawsStore> {
        let (m, d, n1) = (self.m, self.d, self.n1);
        let mat = |v: Vec<f64>| Matrix::from_row_major(m, d, v);
        let v = &sampler.validated;
        let sv = if v.spec.sv {
            Some(SvDraws {
                h: Matrix::from_row_major(m, n1, self.h)?,
                mu: self.sv_mu,
                phi: self.sv_phi,
                sigma2: self.sv_sigma2,
            })
        } else {
            None
        };
        Ok(DrawsStore {
            column_names: data.column_names.clone(),
            beta_tilde: self
                .beta_tilde
                .into_iter()
                .map(|b| Matrix::from_row_major(m, n1, b))
                .collect::<Result<_>>()?,
            beta_mean: mat(self.beta_mean)?,
            theta_sr: mat(self.theta_sr)?,
            xi2: mat(self.xi2)?,
            tau2: mat(self.tau2)?,
            kappa2_j: mat(self.kappa2_j)?,
            lambda2_j: mat(self.lambda2_j)?,
            kappa2_b: self.kappa2_b,
            lambda2_b: self.lambda2_b,
            a_xi: self.a_xi,
            a_tau: self.a_tau,
            c_xi: self.c_xi,
            c_tau: self.c_tau,
            sigma2: self.sigma2,
            c0: self.c0,
            sv,
            mh_diag: sampler.mh.diags(&v.learned),
            asis_fallbacks: sampler.asis_fallbacks,
            priorvals: v.spec,
            learned: v.learned,
            config: v.cfg,
            n_obs: data.len(),
        })
    }
}

/// Runs a full chain and returns the thinned post-burn-in draws.
/// Identical inputs give bit-identical output.
pub fn run_chain(data: &TimeSeriesData, spec: &PriorSpec, cfg: &McmcConfig) -> Result<DrawsStore> {
    let validated = validate(spec, cfg, data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = ChainState::initial(data, &validated.spec);
    let mut sampler = GibbsSampler::new(validated);
    let mut out = DrawsBuilder::new(data.dim(), data.len() + 1, cfg.stored_draws());
    for it in 0..cfg.niter {
        sampler
            .sweep(&mut rng, data, &mut state)
            .map_err(|e| e.at_iteration(it))?;
        if it >= cfg.nburn && (it - cfg.nburn + 1).is_multiple_of(cfg.nthin) {
            out.push(&state, sampler.validated.spec.sv);
        }
    }
    out.finish(data, &sampler)
}
