//! Full-conditional draws of one Gibbs sweep (except the state path, which
//! lives in [`crate::states`], and the SV block in [`crate::sv`]).

use rand::Rng;

use crate::dists::{sample_gamma, sample_gig, sample_inv_gamma, standard_normal, GigParams};
use crate::error::{Error, Result};
use crate::linalg::{backward_solve, cholesky, cholesky_solve, Matrix};
use crate::model::{ChainState, ModType, TimeSeriesData};

/// Lower bound applied to GIG χ arguments and to drawn variances.
pub const TINY: f64 = 1e-300;
const HUGE: f64 = 1e300;
/// |√θ'| below this keeps the pre-ASIS values for that covariate.
pub const ASIS_SR_FLOOR: f64 = 1e-12;

pub(crate) fn clamp_var(v: f64) -> f64 {
    v.clamp(TINY, HUGE)
}

/// Joint draw of (β, √θ) from the Gaussian full conditional of the
/// regression y_t = x_tβ + Σ_j x_tj β̃_jt √θ_j + ε_t with prior
/// N(0, Diag(τ², ξ²)).
pub fn draw_beta_theta<R: Rng + ?Sized>(
    rng: &mut R,
    data: &TimeSeriesData,
    beta_tilde: &Matrix<f64>,
    xi2: &[f64],
    tau2: &[f64],
    sigma2_t: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, d) = (data.len(), data.dim());
    if beta_tilde.rows() != n + 1
        || beta_tilde.cols() != d
        || xi2.len() != d
        || tau2.len() != d
        || sigma2_t.len() != n
    {
        return Err(Error::DimensionMismatch("draw_beta_theta inputs".into()));
    }
    let k = 2 * d;
    let mut prec = Matrix::zeros(k, k);
    let mut rhs = vec![0.0; k];
    let mut z = vec![0.0; k];
    for t in 0..n {
        let xt = data.x.row(t);
        let bt = beta_tilde.row(t + 1);
        for j in 0..d {
            z[j] = xt[j];
            z[d + j] = xt[j] * bt[j];
        }
        let w = 1.0 / sigma2_t[t];
        for a in 0..k {
            let za = z[a] * w;
            if za == 0.0 {
                continue;
            }
            rhs[a] += za * data.y[t];
            for b in 0..=a {
                prec[(a, b)] += za * z[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            prec[(b, a)] = prec[(a, b)];
        }
    }
    for j in 0..d {
        prec[(j, j)] += 1.0 / tau2[j];
        prec[(d + j, d + j)] += 1.0 / xi2[j];
    }
    let l = cholesky(&prec, 0)?;
    let mean = cholesky_solve(&l, &rhs);
    let eps: Vec<f64> = (0..k).map(|_| standard_normal(rng)).collect();
    let noise = backward_solve(&l, &eps);
    let gamma: Vec<f64> = mean.iter().zip(noise).map(|(m, e)| m + e).collect();
    Ok((gamma[..d].to_vec(), gamma[d..].to_vec()))
}

/// Result of one interweaving step.
#[derive(Debug, Clone, PartialEq)]
pub struct AsisOutcome {
    pub beta_mean: Vec<f64>,
    pub theta_sr: Vec<f64>,
    pub beta_tilde: Matrix<f64>,
    /// Covariates that kept their previous values because |√θ'| < 1e−12.
    pub fallbacks: Vec<usize>,
}

/// Ancillarity-sufficiency interweaving: move to the centered path, redraw
/// θ_j (GIG) and β_j (normal) there, and map back to non-centered states.
pub fn asis_step<R: Rng + ?Sized>(
    rng: &mut R,
    beta_tilde: &Matrix<f64>,
    beta_mean: &[f64],
    theta_sr: &[f64],
    xi2: &[f64],
    tau2: &[f64],
) -> Result<AsisOutcome> {
    let (n1, d) = (beta_tilde.rows(), beta_tilde.cols());
    if beta_mean.len() != d || theta_sr.len() != d || xi2.len() != d || tau2.len() != d {
        return Err(Error::DimensionMismatch("asis_step inputs".into()));
    }
    let mut out = AsisOutcome {
        beta_mean: beta_mean.to_vec(),
        theta_sr: theta_sr.to_vec(),
        beta_tilde: beta_tilde.clone(),
        fallbacks: Vec::new(),
    };
    // λ = 1/2 − (T+1)/2 with T+1 = n1 Gaussian terms in the centered path
    let lambda = 0.5 - n1 as f64 / 2.0;
    for j in 0..d {
        let path: Vec<f64> = (0..n1)
            .map(|t| beta_mean[j] + theta_sr[j] * beta_tilde[(t, j)])
            .collect();
        let chi = path.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>()
            + (path[0] - beta_mean[j]).powi(2);
        let gig = GigParams::new(lambda, chi.max(TINY), 1.0 / xi2[j])?;
        let theta = sample_gig(rng, &gig)?;
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let sr = sign * theta.sqrt();

        let v = 1.0 / (1.0 / tau2[j] + 1.0 / theta);
        let mu = v * path[0] / theta;
        let b = mu + v.sqrt() * standard_normal(rng);

        if sr.abs() < ASIS_SR_FLOOR || !sr.is_finite() || !b.is_finite() {
            out.fallbacks.push(j);
            continue;
        }
        out.beta_mean[j] = b;
        out.theta_sr[j] = sr;
        for (t, p) in path.iter().enumerate() {
            out.beta_tilde[(t, j)] = (p - b) / sr;
        }
    }
    Ok(out)
}

/// GIG draw of a local variance given its normal "observation" `x²`,
/// order `lambda` and rate parameter `psi`.
fn draw_local_variance<R: Rng + ?Sized>(rng: &mut R, lambda: f64, x2: f64, psi: f64) -> Result<f64> {
    // χ = 0 is the exact gamma case when λ > 0; otherwise keep χ positive
    let chi = if x2 > 0.0 || lambda > 0.0 { x2 } else { TINY };
    Ok(clamp_var(sample_gig(rng, &GigParams::new(lambda, chi, psi)?)?))
}

/// Draws ξ², τ² (and under the triple gamma prior κ²_j, λ²_j) in place.
pub fn draw_local_scales<R: Rng + ?Sized>(
    rng: &mut R,
    mod_type: ModType,
    state: &mut ChainState,
) -> Result<()> {
    let d = state.theta_sr.len();
    match mod_type {
        ModType::Ridge => {
            state.xi2 = vec![2.0 / state.kappa2_b; d];
            state.tau2 = vec![2.0 / state.lambda2_b; d];
        }
        ModType::Double => {
            for j in 0..d {
                state.xi2[j] = draw_local_variance(
                    rng,
                    state.a_xi - 0.5,
                    state.theta_sr[j].powi(2),
                    state.a_xi * state.kappa2_b,
                )?;
                state.tau2[j] = draw_local_variance(
                    rng,
                    state.a_tau - 0.5,
                    state.beta_mean[j].powi(2),
                    state.a_tau * state.lambda2_b,
                )?;
            }
        }
        ModType::Triple => {
            for j in 0..d {
                state.xi2[j] = draw_local_variance(
                    rng,
                    state.a_xi - 0.5,
                    state.theta_sr[j].powi(2),
                    state.a_xi * state.kappa2_j[j],
                )?;
                state.tau2[j] = draw_local_variance(
                    rng,
                    state.a_tau - 0.5,
                    state.beta_mean[j].powi(2),
                    state.a_tau * state.lambda2_j[j],
                )?;
                state.kappa2_j[j] = clamp_var(sample_gamma(
                    rng,
                    state.a_xi + state.c_xi,
                    state.a_xi * state.xi2[j] / 2.0 + state.c_xi / state.kappa2_b,
                )?);
                state.lambda2_j[j] = clamp_var(sample_gamma(
                    rng,
                    state.a_tau + state.c_tau,
                    state.a_tau * state.tau2[j] / 2.0 + state.c_tau / state.lambda2_b,
                )?);
            }
        }
    }
    Ok(())
}

/// σ² ~ InvGamma(c0 + T/2, C0 + ½Σr²), then C0 ~ Gamma(g0 + c0, G0 + 1/σ²).
pub fn draw_sigma2_homoskedastic<R: Rng + ?Sized>(
    rng: &mut R,
    residuals: &[f64],
    c0: f64,
    big_c0: f64,
    g0: f64,
    big_g0: f64,
) -> Result<(f64, f64)> {
    let ss: f64 = residuals.iter().map(|r| r * r).sum();
    let sigma2 = clamp_var(sample_inv_gamma(
        rng,
        c0 + residuals.len() as f64 / 2.0,
        big_c0 + 0.5 * ss,
    )?);
    let new_c0 = clamp_var(sample_gamma(rng, g0 + c0, big_g0 + 1.0 / sigma2)?);
    Ok((sigma2, new_c0))
}
