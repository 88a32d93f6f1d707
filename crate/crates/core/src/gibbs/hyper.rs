//! Global shrinkage, pole and tail parameter updates.

use rand::Rng;

use super::adapt::AdaptiveMhState;
use super::steps::clamp_var;
use crate::dists::{log_f_pdf, log_gamma_pdf, sample_gamma, sample_gig, GigParams};
use crate::error::Result;
use crate::model::{ChainState, Learned, McmcConfig, MhDiag, ModType, PriorSpec};

/// One adaptive MH state per pole/tail parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct MhSet {
    pub a_xi: AdaptiveMhState,
    pub a_tau: AdaptiveMhState,
    pub c_xi: AdaptiveMhState,
    pub c_tau: AdaptiveMhState,
}

impl MhSet {
    pub fn new(cfg: &McmcConfig) -> Self {
        Self {
            a_xi: AdaptiveMhState::new("a_xi", &cfg.mh.a_xi),
            a_tau: AdaptiveMhState::new("a_tau", &cfg.mh.a_tau),
            c_xi: AdaptiveMhState::new("c_xi", &cfg.mh.c_xi),
            c_tau: AdaptiveMhState::new("c_tau", &cfg.mh.c_tau),
        }
    }

    /// Diagnostics of the parameters that were actually learned.
    pub fn diags(&self, learned: &Learned) -> Vec<MhDiag> {
        [
            (learned.a_xi, &self.a_xi),
            (learned.a_tau, &self.a_tau),
            (learned.c_xi, &self.c_xi),
            (learned.c_tau, &self.c_tau),
        ]
        .into_iter()
        .filter(|(l, _)| *l)
        .map(|(_, s)| s.diag())
        .collect()
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn inv_logit(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Scales, hyperparameters and learn flags of one side (ξ or τ) of the
/// hierarchy, borrowed from the chain state.
struct Side<'a> {
    local: &'a [f64],
    local_j: &'a mut [f64],
    global: &'a mut f64,
    pole: &'a mut f64,
    tail: &'a mut f64,
    aux: &'a mut f64,
    alpha_a: f64,
    beta_a: f64,
    alpha_c: f64,
    beta_c: f64,
    g1: f64,
    g2: f64,
    learn_pole: bool,
    learn_tail: bool,
    learn_global: bool,
}

fn update_ng<R: Rng + ?Sized>(rng: &mut R, s: Side<'_>, mh: &mut AdaptiveMhState) -> Result<()> {
    let d = s.local.len() as f64;
    if s.learn_pole {
        let local = s.local;
        let global = *s.global;
        let (alpha, beta) = (s.alpha_a, s.beta_a);
        // Gamma(α, αβ) prior on a, evaluated on z = ln a (Jacobian included)
        let target = |z: f64| {
            let a = z.exp();
            let rate = a * global / 2.0;
            alpha * z - alpha * beta * a
                + local.iter().map(|&x| log_gamma_pdf(x, a, rate)).sum::<f64>()
        };
        let z = mh.step(rng, s.pole.ln(), target);
        *s.pole = z.exp();
    }
    if s.learn_global {
        let sum: f64 = s.local.iter().sum();
        *s.global = clamp_var(sample_gamma(
            rng,
            s.g1 + d * *s.pole,
            s.g2 + *s.pole / 2.0 * sum,
        )?);
    }
    Ok(())
}

fn update_ngg<R: Rng + ?Sized>(
    rng: &mut R,
    s: Side<'_>,
    mh_a: &mut AdaptiveMhState,
    mh_c: &mut AdaptiveMhState,
) -> Result<()> {
    let d = s.local.len() as f64;
    // With κ²_B learned the F(2a, 2c) prior on κ²_B/2 enters both targets;
    // the auxiliary d² is integrated out here and redrawn below.
    let global_term = |a: f64, c: f64, g: f64| {
        if s.learn_global {
            log_f_pdf(g / 2.0, 2.0 * a, 2.0 * c)
        } else {
            0.0
        }
    };
    if s.learn_pole {
        let (local, local_j, c, g) = (s.local, &*s.local_j, *s.tail, *s.global);
        let (alpha, beta) = (s.alpha_a, s.beta_a);
        let target = |z: f64| {
            let u = inv_logit(z);
            let a = u / 2.0;
            // Beta prior on u plus the logit Jacobian u(1 − u)
            alpha * u.ln()
                + beta * (1.0 - u).ln()
                + local
                    .iter()
                    .zip(local_j)
                    .map(|(&x, &k)| log_gamma_pdf(x, a, a * k / 2.0))
                    .sum::<f64>()
                + global_term(a, c, g)
        };
        let z = mh_a.step(rng, logit(2.0 * *s.pole), target);
        *s.pole = inv_logit(z) / 2.0;
    }
    if s.learn_tail {
        let (local_j, a, g) = (&*s.local_j, *s.pole, *s.global);
        let (alpha, beta) = (s.alpha_c, s.beta_c);
        let target = |z: f64| {
            let u = inv_logit(z);
            let c = u / 2.0;
            alpha * u.ln()
                + beta * (1.0 - u).ln()
                + local_j.iter().map(|&k| log_gamma_pdf(k, c, c / g)).sum::<f64>()
                + global_term(a, c, g)
        };
        let z = mh_c.step(rng, logit(2.0 * *s.tail), target);
        *s.tail = inv_logit(z) / 2.0;
    }
    if s.learn_global {
        let (a, c) = (*s.pole, *s.tail);
        *s.aux = clamp_var(sample_gamma(rng, a + c, c + a * *s.global / 2.0)?);
        let sum_k: f64 = s.local_j.iter().sum();
        let gig = GigParams::new(a - d * c, 2.0 * c * sum_k, a * *s.aux)?;
        *s.global = clamp_var(sample_gig(rng, &gig)?);
    }
    Ok(())
}

/// Updates every learned pole, tail and global shrinkage parameter in place.
/// Fixed parameters are left untouched; ridge is a no-op.
pub fn draw_global_and_pole_tail<R: Rng + ?Sized>(
    rng: &mut R,
    state: &mut ChainState,
    spec: &PriorSpec,
    learned: &Learned,
    mh: &mut MhSet,
) -> Result<()> {
    let h = spec.hyper;
    let xi = Side {
        local: &state.xi2,
        local_j: &mut state.kappa2_j,
        global: &mut state.kappa2_b,
        pole: &mut state.a_xi,
        tail: &mut state.c_xi,
        aux: &mut state.aux_d2_xi,
        alpha_a: h.alpha_a_xi,
        beta_a: h.beta_a_xi,
        alpha_c: h.alpha_c_xi,
        beta_c: h.beta_c_xi,
        g1: h.d1,
        g2: h.d2,
        learn_pole: learned.a_xi,
        learn_tail: learned.c_xi,
        learn_global: learned.kappa2_b,
    };
    match spec.mod_type {
        ModType::Ridge => return Ok(()),
        ModType::Double => update_ng(rng, xi, &mut mh.a_xi)?,
        ModType::Triple => update_ngg(rng, xi, &mut mh.a_xi, &mut mh.c_xi)?,
    }
    let tau = Side {
        local: &state.tau2,
        local_j: &mut state.lambda2_j,
        global: &mut state.lambda2_b,
        pole: &mut state.a_tau,
        tail: &mut state.c_tau,
        aux: &mut state.aux_d2_tau,
        alpha_a: h.alpha_a_tau,
        beta_a: h.beta_a_tau,
        alpha_c: h.alpha_c_tau,
        beta_c: h.beta_c_tau,
        g1: h.e1,
        g2: h.e2,
        learn_pole: learned.a_tau,
        learn_tail: learned.c_tau,
        learn_global: learned.lambda2_b,
    };
    match spec.mod_type {
        ModType::Ridge => {}
        ModType::Double => update_ng(rng, tau, &mut mh.a_tau)?,
        ModType::Triple => update_ngg(rng, tau, &mut mh.a_tau, &mut mh.c_tau)?,
    }
    Ok(())
}
