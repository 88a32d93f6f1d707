//! Stochastic-volatility errors: auxiliary-mixture sampler for the
//! log-variance path h_0..h_T and its AR(1) parameters.

use rand::Rng;
use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::dists::{log_beta_pdf, log_normal_pdf, sample_gig, standard_normal, GigParams};
use crate::error::{Error, Result};
use crate::gibbs::steps::{clamp_var, TINY};
use crate::linalg::{backward_solve, cholesky, cholesky_solve, Matrix};
use crate::model::SvHyper;
use crate::states::{sample_states, PrecisionSystem};

/// Weights of the 10-component normal mixture approximating log χ²₁.
pub const MIX_PROB: [f64; 10] = [
    0.00609, 0.04775, 0.13057, 0.20674, 0.22715, 0.18842, 0.12047, 0.05591, 0.01575, 0.00115,
];
/// Component means.
pub const MIX_MEAN: [f64; 10] = [
    1.92677, 1.34744, 0.73504, 0.02266, -0.85173, -1.97278, -3.46788, -5.55246, -8.68384, -14.65,
];
/// Component variances.
pub const MIX_VAR: [f64; 10] = [
    0.11265, 0.17788, 0.26768, 0.40611, 0.62699, 0.98583, 1.57469, 2.54498, 4.16591, 7.33342,
];

/// Floor applied to squared residuals before taking logs.
pub const EPS2_FLOOR: f64 = 1e-300;

/// Log density of the mixture approximation at `z`.
pub fn mixture_log_density(z: f64) -> f64 {
    let terms: Vec<f64> = (0..10)
        .map(|r| MIX_PROB[r].ln() + log_normal_pdf(z, MIX_MEAN[r], MIX_VAR[r]))
        .collect();
    crate::dists::log_sum_exp(&terms)
}

/// Exact log density of log χ²₁.
pub fn log_chi2_1_log_density(z: f64) -> f64 {
    0.5 * z - 0.5 * z.exp() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvParams {
    pub mu: f64,
    pub phi: f64,
    pub sigma2_eta: f64,
}

/// Which SV parameters are updated; fixed ones keep their current value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvLearn {
    pub mu: bool,
    pub phi: bool,
    pub sigma2: bool,
}

impl Default for SvLearn {
    fn default() -> Self {
        Self {
            mu: true,
            phi: true,
            sigma2: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvUpdate {
    pub h: Vec<f64>,
    pub params: SvParams,
    pub indicators: Vec<u8>,
}

/// Transformed observations ln ε²_t.
pub fn log_squares(residuals: &[f64]) -> Vec<f64> {
    residuals.iter().map(|e| (e * e).max(EPS2_FLOOR).ln()).collect()
}

fn draw_indicators<R: Rng + ?Sized>(rng: &mut R, ystar: &[f64], h: &[f64]) -> Vec<u8> {
    let mut w = [0.0; 10];
    ystar
        .iter()
        .zip(&h[1..])
        .map(|(y, ht)| {
            let z = y - ht;
            let mut max = f64::NEG_INFINITY;
            for r in 0..10 {
                w[r] = MIX_PROB[r].ln() + log_normal_pdf(z, MIX_MEAN[r], MIX_VAR[r]);
                max = max.max(w[r]);
            }
            let mut total = 0.0;
            for v in w.iter_mut() {
                *v = (*v - max).exp();
                total += *v;
            }
            let u: f64 = Open01.sample(rng);
            let mut acc = 0.0;
            for (r, v) in w.iter().enumerate() {
                acc += v / total;
                if u < acc {
                    return r as u8;
                }
            }
            9
        })
        .collect()
}

/// Gaussian system of h_0..h_T given the mixture indicators: AR(1) prior
/// with stationary start plus one normal observation per t ≥ 1.
pub fn h_precision(ystar: &[f64], indicators: &[u8], p: &SvParams) -> Result<PrecisionSystem<f64>> {
    let n = ystar.len();
    if indicators.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} indicators for {n} observations",
            indicators.len()
        )));
    }
    let (mu, phi, s2) = (p.mu, p.phi, p.sigma2_eta);
    let mut diag = Vec::with_capacity(n + 1);
    let mut c = Vec::with_capacity(n + 1);
    for t in 0..=n {
        let (mut q, mut b) = if t == 0 || t == n {
            (1.0 / s2, mu * (1.0 - phi) / s2)
        } else {
            ((1.0 + phi * phi) / s2, mu * (1.0 - phi).powi(2) / s2)
        };
        if t >= 1 {
            let r = indicators[t - 1] as usize;
            q += 1.0 / MIX_VAR[r];
            b += (ystar[t - 1] - MIX_MEAN[r]) / MIX_VAR[r];
        }
        diag.push(Matrix::from_row_major(1, 1, vec![q])?);
        c.push(vec![b]);
    }
    let off = (0..n)
        .map(|_| Matrix::from_row_major(1, 1, vec![-phi / s2]))
        .collect::<Result<Vec<_>>>()?;
    PrecisionSystem::new(diag, off, c)
}

fn draw_phi<R: Rng + ?Sized>(rng: &mut R, h: &[f64], p: &SvParams, hyper: &SvHyper) -> f64 {
    let (mu, s2) = (p.mu, p.sigma2_eta);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for w in h.windows(2) {
        let (x, y) = (w[0] - mu, w[1] - mu);
        sxx += x * x;
        sxy += x * y;
    }
    if sxx <= 0.0 {
        return p.phi;
    }
    let proposal = sxy / sxx + (s2 / sxx).sqrt() * standard_normal(rng);
    if !(proposal > -1.0 && proposal < 1.0) {
        return p.phi;
    }
    // proposal equals the AR likelihood in φ, leaving prior × h_0 term
    let rest = |phi: f64| {
        log_beta_pdf((phi + 1.0) / 2.0, hyper.a_phi, hyper.b_phi)
            + log_normal_pdf(h[0], mu, s2 / (1.0 - phi * phi))
    };
    let u: f64 = Open01.sample(rng);
    if u.ln() < rest(proposal) - rest(p.phi) {
        proposal
    } else {
        p.phi
    }
}

fn draw_mu<R: Rng + ?Sized>(rng: &mut R, h: &[f64], p: &SvParams, hyper: &SvHyper) -> f64 {
    let (phi, s2) = (p.phi, p.sigma2_eta);
    let n = (h.len() - 1) as f64;
    let mut prec = 1.0 / hyper.big_b_mu + (1.0 - phi * phi) / s2 + n * (1.0 - phi).powi(2) / s2;
    let sum: f64 = h.windows(2).map(|w| w[1] - phi * w[0]).sum();
    let num = hyper.b_mu / hyper.big_b_mu + h[0] * (1.0 - phi * phi) / s2 + (1.0 - phi) / s2 * sum;
    prec = prec.max(TINY);
    num / prec + (1.0 / prec).sqrt() * standard_normal(rng)
}

fn draw_sigma2<R: Rng + ?Sized>(rng: &mut R, h: &[f64], p: &SvParams, hyper: &SvHyper) -> Result<f64> {
    let (mu, phi) = (p.mu, p.phi);
    let ss = (1.0 - phi * phi) * (h[0] - mu).powi(2)
        + h.windows(2)
            .map(|w| (w[1] - mu - phi * (w[0] - mu)).powi(2))
            .sum::<f64>();
    let gig = GigParams::new(0.5 - h.len() as f64 / 2.0, ss.max(TINY), 1.0 / hyper.big_b_sigma)?;
    Ok(clamp_var(sample_gig(rng, &gig)?))
}

/// Non-centered pass: with h̃ = (h − μ)/σ_η fixed, (μ, σ_η) enter the
/// mixture observations linearly and get a joint Gaussian draw.
fn interweave<R: Rng + ?Sized>(
    rng: &mut R,
    ystar: &[f64],
    indicators: &[u8],
    h: &mut [f64],
    p: &mut SvParams,
    hyper: &SvHyper,
    learn: SvLearn,
) -> Result<()> {
    if !learn.mu && !learn.sigma2 {
        return Ok(());
    }
    let sd = p.sigma2_eta.sqrt();
    let h_tilde: Vec<f64> = h.iter().map(|v| (v - p.mu) / sd).collect();
    // columns: 1 for μ, h̃ for σ_η; fixed ones move to the offset
    let mut cols = Vec::new();
    if learn.mu {
        cols.push(0);
    }
    if learn.sigma2 {
        cols.push(1);
    }
    let k = cols.len();
    let mut prec = Matrix::zeros(k, k);
    let mut rhs = vec![0.0; k];
    for (i, &col) in cols.iter().enumerate() {
        if col == 0 {
            prec[(i, i)] += 1.0 / hyper.big_b_mu;
            rhs[i] += hyper.b_mu / hyper.big_b_mu;
        } else {
            prec[(i, i)] += 1.0 / hyper.big_b_sigma;
        }
    }
    for t in 0..ystar.len() {
        let r = indicators[t] as usize;
        let w = 1.0 / MIX_VAR[r];
        let z = [1.0, h_tilde[t + 1]];
        let mut target = ystar[t] - MIX_MEAN[r];
        if !learn.mu {
            target -= p.mu;
        }
        if !learn.sigma2 {
            target -= sd * h_tilde[t + 1];
        }
        for (a, &ca) in cols.iter().enumerate() {
            rhs[a] += w * z[ca] * target;
            for (b, &cb) in cols.iter().enumerate() {
                prec[(a, b)] += w * z[ca] * z[cb];
            }
        }
    }
    let l = cholesky(&prec, 0)?;
    let mean = cholesky_solve(&l, &rhs);
    let eps: Vec<f64> = (0..k).map(|_| standard_normal(rng)).collect();
    let draw: Vec<f64> = mean
        .iter()
        .zip(backward_solve(&l, &eps))
        .map(|(m, e)| m + e)
        .collect();
    let mut new_mu = p.mu;
    let mut new_sd = sd;
    for (i, &col) in cols.iter().enumerate() {
        if col == 0 {
            new_mu = draw[i];
        } else {
            new_sd = draw[i];
        }
    }
    let new_s2 = new_sd * new_sd;
    if !(new_s2 > TINY && new_s2.is_finite() && new_mu.is_finite()) {
        return Ok(());
    }
    for (v, ht) in h.iter_mut().zip(&h_tilde) {
        *v = new_mu + new_sd * ht;
    }
    p.mu = new_mu;
    p.sigma2_eta = new_s2;
    Ok(())
}

/// One sweep of the SV block given the current observation errors ε_1..ε_T.
pub fn update_sv<R: Rng + ?Sized>(
    rng: &mut R,
    residuals: &[f64],
    h: &[f64],
    params: SvParams,
    hyper: &SvHyper,
    learn: SvLearn,
) -> Result<SvUpdate> {
    if h.len() != residuals.len() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "h has length {}, expected {}",
            h.len(),
            residuals.len() + 1
        )));
    }
    let ystar = log_squares(residuals);
    let indicators = draw_indicators(rng, &ystar, h);
    let sys = h_precision(&ystar, &indicators, &params)?;
    let path = sample_states(rng, &sys)?;
    let mut h_new: Vec<f64> = path.as_slice().to_vec();

    let mut p = params;
    if learn.phi {
        p.phi = draw_phi(rng, &h_new, &p, hyper);
    }
    if learn.mu {
        p.mu = draw_mu(rng, &h_new, &p, hyper);
    }
    if learn.sigma2 {
        p.sigma2_eta = draw_sigma2(rng, &h_new, &p, hyper)?;
    }
    interweave(rng, &ystar, &indicators, &mut h_new, &mut p, hyper, learn)?;
    Ok(SvUpdate {
        h: h_new,
        params: p,
        indicators,
    })
}
