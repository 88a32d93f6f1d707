//! Posterior summaries: moments, HPD intervals, effective sample size and
//! pointwise quantiles of the centered state paths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{DrawsStore, ModType};
use crate::real::Real;

/// Minimum number of draws for [`hpd_interval`] and [`ess`].
pub const MIN_DRAWS: usize = 10;

/// Default quantile levels of the path summaries.
pub const PATH_QUANTILES: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

fn sorted<T: Real>(draws: &[T]) -> Vec<T> {
    let mut s = draws.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Shortest interval covering ⌈prob·M⌉ sorted draws; ties go to the lowest start.
pub fn hpd_interval<T: Real>(draws: &[T], prob: f64) -> Result<(T, T)> {
    if draws.len() < MIN_DRAWS {
        return Err(Error::TooFewDraws {
            need: MIN_DRAWS,
            got: draws.len(),
        });
    }
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidParameter(format!("HPD probability {prob} outside (0, 1)")));
    }
    Ok(hpd_sorted(&sorted(draws), prob))
}

fn hpd_sorted<T: Real>(s: &[T], prob: f64) -> (T, T) {
    let k = ((prob * s.len() as f64).ceil() as usize).clamp(1, s.len());
    let mut best = 0;
    let mut width = s[k - 1] - s[0];
    for i in 1..=s.len() - k {
        let w = s[i + k - 1] - s[i];
        if w < width {
            width = w;
            best = i;
        }
    }
    (s[best], s[best + k - 1])
}

/// Effective sample size with Geyer's initial monotone sequence estimator,
/// capped at M. Constant input returns M.
pub fn ess<T: Real>(draws: &[T]) -> Result<T> {
    let n = draws.len();
    if n < MIN_DRAWS {
        return Err(Error::TooFewDraws { need: MIN_DRAWS, got: n });
    }
    let mf = T::from_usize(n).unwrap();
    let mean = draws.iter().copied().sum::<T>() / mf;
    let centered: Vec<T> = draws.iter().map(|&x| x - mean).collect();
    let acov = |k: usize| centered[..n - k].iter().zip(&centered[k..]).map(|(&a, &b)| a * b).sum::<T>() / mf;
    let g0 = acov(0);
    if !(g0 > T::zero()) {
        return Ok(mf);
    }
    let mut total = -g0;
    let mut prev = T::infinity();
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = acov(2 * k) + acov(2 * k + 1);
        if pair <= T::zero() {
            break;
        }
        let pair = pair.min(prev);
        total += T::lit(2.0) * pair;
        prev = pair;
        k += 1;
    }
    let ess = mf * g0 / total;
    Ok(if ess.is_finite() { ess.min(mf) } else { mf })
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let h = (s.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub hpd_low: f64,
    pub hpd_high: f64,
    pub ess: f64,
}

impl SummaryRow {
    /// Summary of one parameter's draws. Fewer than [`MIN_DRAWS`] draws give
    /// the sample range as the interval and ESS = M.
    pub fn from_draws(name: impl Into<String>, draws: &[f64]) -> Self {
        let n = draws.len();
        let s = sorted(draws);
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let (hpd_low, hpd_high, ess_v) = if n >= MIN_DRAWS {
            let (l, h) = hpd_sorted(&s, 0.95);
            (l, h, ess(draws).unwrap_or(n as f64))
        } else {
            (s[0], s[n - 1], n as f64)
        };
        Self {
            name: name.into(),
            mean,
            sd,
            median: quantile_sorted(&s, 0.5),
            hpd_low,
            hpd_high,
            ess: ess_v,
        }
    }
}

/// Pointwise quantiles of one covariate's centered path, `(T+1) × levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantilePath {
    pub name: String,
    pub levels: Vec<f64>,
    pub values: Matrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub n_draws: usize,
    pub nburn: usize,
    pub nthin: usize,
    pub rows: Vec<SummaryRow>,
    pub paths: Vec<QuantilePath>,
}

/// Quantile paths of the centered states at the given levels.
pub fn quantile_paths(fit: &DrawsStore, levels: &[f64]) -> Vec<QuantilePath> {
    let m = fit.n_draws();
    (0..fit.dim())
        .map(|j| {
            let paths: Vec<Vec<f64>> = (0..m).map(|i| fit.centered_path(j, i)).collect();
            let n1 = paths.first().map_or(0, |p| p.len());
            let mut values = Matrix::zeros(n1, levels.len());
            let mut col = vec![0.0; m];
            for t in 0..n1 {
                for (i, p) in paths.iter().enumerate() {
                    col[i] = p[t];
                }
                col.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                for (q, &p) in levels.iter().enumerate() {
                    values[(t, q)] = quantile_sorted(&col, p);
                }
            }
            QuantilePath {
                name: fit.column_names[j].clone(),
                levels: levels.to_vec(),
                values,
            }
        })
        .collect()
}

/// Summary table of the non time-varying parameters plus path quantiles.
/// Fixed parameters get no row.
pub fn summarize(fit: &DrawsStore) -> Result<Summary> {
    if fit.n_draws() == 0 {
        return Err(Error::TooFewDraws { need: 1, got: 0 });
    }
    let names = &fit.column_names;
    let mut rows = Vec::new();
    let mut per_covariate = |prefix: &str, mat: &Matrix<f64>, f: fn(f64) -> f64, close: &str| {
        for (j, name) in names.iter().enumerate() {
            let col: Vec<f64> = mat.column(j).into_iter().map(f).collect();
            rows.push(SummaryRow::from_draws(format!("{prefix}{name}{close}"), &col));
        }
    };
    per_covariate("beta_mean_", &fit.beta_mean, |x| x, "");
    per_covariate("abs(theta_sr_", &fit.theta_sr, f64::abs, ")");
    let mod_type = fit.priorvals.mod_type;
    if mod_type != ModType::Ridge {
        per_covariate("tau2_", &fit.tau2, |x| x, "");
        per_covariate("xi2_", &fit.xi2, |x| x, "");
    }
    if mod_type == ModType::Triple {
        per_covariate("lambda2_", &fit.lambda2_j, |x| x, "");
        per_covariate("kappa2_", &fit.kappa2_j, |x| x, "");
    }
    let l = fit.learned;
    for (learned, name, draws) in [
        (l.a_xi, "a_xi", &fit.a_xi),
        (l.a_tau, "a_tau", &fit.a_tau),
        (l.c_xi, "c_xi", &fit.c_xi),
        (l.c_tau, "c_tau", &fit.c_tau),
        (l.kappa2_b, "kappa2_B", &fit.kappa2_b),
        (l.lambda2_b, "lambda2_B", &fit.lambda2_b),
    ] {
        if learned {
            rows.push(SummaryRow::from_draws(name, draws));
        }
    }
    match &fit.sv {
        Some(sv) => {
            rows.push(SummaryRow::from_draws("sv_mu", &sv.mu));
            rows.push(SummaryRow::from_draws("sv_phi", &sv.phi));
            rows.push(SummaryRow::from_draws("sv_sigma2", &sv.sigma2));
        }
        None => {
            rows.push(SummaryRow::from_draws("sigma2", &fit.sigma2));
            rows.push(SummaryRow::from_draws("C0", &fit.c0));
        }
    }
    Ok(Summary {
        n_draws: fit.n_draws(),
        nburn: fit.config.nburn,
        nthin: fit.config.nthin,
        rows,
        paths: quantile_paths(fit, &PATH_QUANTILES),
    })
}

impl Summary {
    /// Fixed-width text table, three decimals.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "Summary of {} MCMC draws after burn-in of {}.\nStatistics of posterior draws of parameters (thinning = {}):\n\n",
            self.n_draws, self.nburn, self.nthin
        );
        let w = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5) + 1;
        out.push_str(&format!(
            " {:<w$}{:>10} {:>10} {:>10} {:>10} {:>10} {:>8}\n",
            "param", "mean", "sd", "median", "HPD 2.5%", "HPD 97.5%", "ESS"
        ));
        let mut prev_group = "";
        for r in &self.rows {
            let group = r.name.split('_').next().unwrap_or("");
            if !prev_group.is_empty() && group != prev_group {
                out.push('\n');
            }
            prev_group = group;
            out.push_str(&format!(
                " {:<w$}{:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>8.0}\n",
                r.name, r.mean, r.sd, r.median, r.hpd_low, r.hpd_high, r.ess
            ));
        }
        out
    }
}
