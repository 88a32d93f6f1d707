//! One-step-ahead predictive density of a fitted model as a Gaussian
//! mixture over stored draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dists::{log_sum_exp, standard_normal};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::model::{DrawsStore, TimeSeriesData};
use crate::states::{build_precision, filter_moments};

/// Per-draw mean and variance of the one-step-ahead predictive.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveMoments {
    pub yhat: Vec<f64>,
    pub s2: Vec<f64>,
}

impl PredictiveMoments {
    pub fn len(&self) -> usize {
        self.yhat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.yhat.is_empty()
    }

    /// log[(1/M) Σ_m N(y; ŷ_m, S_m)].
    pub fn log_density(&self, y: f64) -> f64 {
        let terms: Vec<f64> = self
            .yhat
            .iter()
            .zip(&self.s2)
            .map(|(&m, &s)| crate::dists::log_normal_pdf(y, m, s))
            .collect();
        log_sum_exp(&terms) - (self.len() as f64).ln()
    }

    pub fn density(&self, y: f64) -> f64 {
        self.log_density(y).exp()
    }
}

/// Random stream used for the SV variance draw of the next period.
pub fn prediction_rng(fit: &DrawsStore) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(fit.config.seed);
    rng.set_stream(1);
    rng
}

fn check_inputs(fit: &DrawsStore, data: &TimeSeriesData, x_new: &[f64]) -> Result<()> {
    if x_new.len() != fit.dim() {
        return Err(Error::DimensionMismatch(format!(
            "new row has {} covariates, fit has {}",
            x_new.len(),
            fit.dim()
        )));
    }
    if data.len() != fit.n_obs || data.dim() != fit.dim() {
        return Err(Error::DimensionMismatch(format!(
            "data is {}x{}, fit was on {}x{}",
            data.len(),
            data.dim(),
            fit.n_obs,
            fit.dim()
        )));
    }
    if fit.n_draws() == 0 {
        return Err(Error::TooFewDraws { need: 1, got: 0 });
    }
    Ok(())
}

/// Mixture moments using an explicit random stream (only consumed by SV fits).
pub fn predictive_moments_with_rng<R: Rng + ?Sized>(
    rng: &mut R,
    fit: &DrawsStore,
    data: &TimeSeriesData,
    x_new: &[f64],
) -> Result<PredictiveMoments> {
    check_inputs(fit, data, x_new)?;
    let (n, d, m_draws) = (data.len(), fit.dim(), fit.n_draws());
    let mut yhat = Vec::with_capacity(m_draws);
    let mut s2 = Vec::with_capacity(m_draws);
    let mut sig_t = vec![0.0; n];
    let mut f = vec![0.0; d];
    for m in 0..m_draws {
        let beta = fit.beta_mean.row(m);
        let sr = fit.theta_sr.row(m);
        for (t, s) in sig_t.iter_mut().enumerate() {
            *s = fit.obs_variance_at(m, t + 1);
        }
        let sys = build_precision(&data.y, &data.x, beta, sr, &sig_t)?;
        let (mean, sigma) = filter_moments(&sys, n)?;
        for j in 0..d {
            f[j] = x_new[j] * sr[j];
        }
        // β̃_{T+1} = β̃_T + w with w ~ N(0, I): predictive covariance Σ_T + I
        let mut var = dot(&f, &f);
        for i in 0..d {
            for j in 0..d {
                var += f[i] * sigma[(i, j)] * f[j];
            }
        }
        let obs_var = match &fit.sv {
            Some(sv) => {
                let (mu, phi) = (sv.mu[m], sv.phi[m]);
                let h_next = mu + phi * (sv.h[(m, n)] - mu) + sv.sigma2[m].sqrt() * standard_normal(rng);
                h_next.exp()
            }
            None => fit.sigma2[m],
        };
        yhat.push(dot(x_new, beta) + dot(&f, &mean));
        s2.push(var + obs_var);
    }
    Ok(PredictiveMoments { yhat, s2 })
}

/// Mixture moments for the period after the last row of `data`.
pub fn predictive_moments(fit: &DrawsStore, data: &TimeSeriesData, x_new: &[f64]) -> Result<PredictiveMoments> {
    predictive_moments_with_rng(&mut prediction_rng(fit), fit, data, x_new)
}

/// Log predictive density score of `y_new`.
pub fn lpds(fit: &DrawsStore, data: &TimeSeriesData, x_new: &[f64], y_new: f64) -> Result<f64> {
    Ok(predictive_moments(fit, data, x_new)?.log_density(y_new))
}

/// Predictive density at each point.
pub fn eval_pred_dens(points: &[f64], fit: &DrawsStore, data: &TimeSeriesData, x_new: &[f64]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let pm = predictive_moments(fit, data, x_new)?;
    Ok(points.iter().map(|&p| pm.density(p)).collect())
}
