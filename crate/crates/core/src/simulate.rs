//! Synthetic data from the TVP model with random-walk coefficients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dists::standard_normal;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::TimeSeriesData;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Noise {
    Homoskedastic { sigma2: f64 },
    Sv { mu: f64, phi: f64, sigma2: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CovariateLaw {
    StandardNormal,
    /// `T × d` matrix; its first column is overwritten with ones.
    Supplied(Matrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub theta: Vec<f64>,
    pub beta_mean: Vec<f64>,
    pub noise: Noise,
    pub seed: u64,
    pub covariates: CovariateLaw,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 200,
            theta: vec![0.2, 0.0, 0.0],
            beta_mean: vec![1.5, -0.3, 0.0],
            noise: Noise::Homoskedastic { sigma2: 1.0 },
            seed: 123,
            covariates: CovariateLaw::StandardNormal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub data: TimeSeriesData,
    /// Coefficient paths β_0..β_T, `(T+1) × d`.
    pub true_paths: Matrix<f64>,
    /// Observation errors ε_1..ε_T.
    pub eps: Vec<f64>,
    /// Log-variances h_0..h_T for SV noise.
    pub h: Option<Vec<f64>>,
}

/// Column labels used for simulated data: `Intercept, x1, …`.
pub fn sim_column_names(d: usize) -> Vec<String> {
    std::iter::once("Intercept".to_string())
        .chain((1..d).map(|j| format!("x{j}")))
        .collect()
}

pub fn sim_tvp(cfg: &SimConfig) -> Result<SimOutput> {
    let d = cfg.theta.len();
    if d == 0 || cfg.beta_mean.len() != d {
        return Err(Error::InvalidParameter(format!(
            "theta has {d} entries, beta_mean has {}",
            cfg.beta_mean.len()
        )));
    }
    if cfg.n < 2 {
        return Err(Error::InvalidParameter("need at least 2 observations".into()));
    }
    if cfg.theta.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter("theta must be nonnegative".into()));
    }
    match cfg.noise {
        Noise::Homoskedastic { sigma2 } if !(sigma2 > 0.0) => {
            return Err(Error::InvalidParameter("sigma2 must be positive".into()))
        }
        Noise::Sv { phi, sigma2, .. } if !(phi.abs() < 1.0 && sigma2 > 0.0) => {
            return Err(Error::InvalidParameter("SV needs |phi| < 1 and sigma2 > 0".into()))
        }
        _ => {}
    }
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut x = match &cfg.covariates {
        CovariateLaw::StandardNormal => {
            let mut x = Matrix::zeros(n, d);
            for t in 0..n {
                for j in 1..d {
                    x[(t, j)] = standard_normal(&mut rng);
                }
            }
            x
        }
        CovariateLaw::Supplied(m) => {
            if m.rows() != n || m.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "supplied covariates are {}x{}, expected {n}x{d}",
                    m.rows(),
                    m.cols()
                )));
            }
            m.clone()
        }
    };
    for t in 0..n {
        x[(t, 0)] = 1.0;
    }

    let mut paths = Matrix::zeros(n + 1, d);
    for j in 0..d {
        let sd = cfg.theta[j].sqrt();
        paths[(0, j)] = cfg.beta_mean[j] + sd * standard_normal(&mut rng);
        for t in 1..=n {
            paths[(t, j)] = paths[(t - 1, j)] + sd * standard_normal(&mut rng);
        }
    }

    let h = match cfg.noise {
        Noise::Homoskedastic { .. } => None,
        Noise::Sv { mu, phi, sigma2 } => {
            let mut h = Vec::with_capacity(n + 1);
            h.push(mu + (sigma2 / (1.0 - phi * phi)).sqrt() * standard_normal(&mut rng));
            for t in 1..=n {
                let prev = h[t - 1];
                h.push(mu + phi * (prev - mu) + sigma2.sqrt() * standard_normal(&mut rng));
            }
            Some(h)
        }
    };
    let eps: Vec<f64> = (1..=n)
        .map(|t| {
            let sd = match (&h, cfg.noise) {
                (Some(h), _) => (h[t] / 2.0).exp(),
                (None, Noise::Homoskedastic { sigma2 }) => sigma2.sqrt(),
                (None, Noise::Sv { .. }) => unreachable!(),
            };
            sd * standard_normal(&mut rng)
        })
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|t| {
            let fit: f64 = x.row(t).iter().zip(paths.row(t + 1)).map(|(a, b)| a * b).sum();
            fit + eps[t]
        })
        .collect();
    let data = TimeSeriesData::new(y, x, sim_column_names(d))?;
    Ok(SimOutput {
        data,
        true_paths: paths,
        eps,
        h,
    })
}
