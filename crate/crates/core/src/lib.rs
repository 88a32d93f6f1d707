//! Bayesian time-varying parameter regression with normal-gamma-gamma,
//! normal-gamma and ridge shrinkage priors.
//!
//! The sampler works in the non-centered parameterization
//! y_t = x_tβ + x_t Diag(√θ) β̃_t + ε_t with β̃_t a standard random walk, and
//! interweaves a centered update of (β, θ) each sweep. Errors are either
//! homoskedastic or follow a stochastic-volatility process.
//!
//! Linear algebra, the state sampler and the summary statistics are generic
//! over [`Real`] (`f32` or `f64`); the sampler itself runs in `f64`.

pub mod diagnostics;
pub mod dists;
pub mod error;
pub mod gibbs;
pub mod linalg;
pub mod model;
pub mod predict;
pub mod real;
pub mod simulate;
pub mod states;
pub mod sv;

pub use diagnostics::{ess, hpd_interval, summarize, Summary, SummaryRow};
pub use error::{Error, Result};
pub use gibbs::run_chain;
pub use linalg::Matrix;
pub use model::{
    default_prior_spec, validate, ChainState, DrawsStore, McmcConfig, MhSettings, ModType, PriorSpec,
    TimeSeriesData,
};
pub use predict::{eval_pred_dens, lpds, predictive_moments, PredictiveMoments};
pub use real::Real;
pub use simulate::{sim_tvp, SimConfig, SimOutput};
pub use states::{filter_moments, sample_states, PrecisionSystem};

pub type MatrixF64 = Matrix<f64>;
pub type MatrixF32 = Matrix<f32>;
pub type PrecisionSystemF64 = PrecisionSystem<f64>;
pub type PrecisionSystemF32 = PrecisionSystem<f32>;
