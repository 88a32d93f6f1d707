//! Joint-distribution check: a chain alternating one Gibbs sweep with a fresh
//! draw of y must have the prior as its stationary marginal. θ² is heavy
//! tailed and mixes slowly, so standard errors come from independent chains
//! started at exact prior draws rather than from batches of a single chain.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, StandardNormal};
use tvp_core::gibbs::GibbsSampler;
use tvp_core::model::{HomoskedHyper, Validated};
use tvp_core::*;

const T: usize = 20;
const A: f64 = 2.0;
const KAPPA2_B: f64 = 2.0;
const C0: f64 = 10.0;
const G0: f64 = 20.0;
const BIG_G0: f64 = 20.0 / 9.0;

fn spec() -> PriorSpec {
    let mut s = default_prior_spec(ModType::Double, false);
    s.learn_a_xi = false;
    s.learn_a_tau = false;
    s.learn_kappa2_b = false;
    s.learn_lambda2_b = false;
    s.a_xi = A;
    s.a_tau = A;
    s.kappa2_b = KAPPA2_B;
    s.lambda2_b = KAPPA2_B;
    s.homosked_hyper = HomoskedHyper {
        c0: C0,
        g0: G0,
        big_g0: BIG_G0,
    };
    s
}

/// (β, θ, ξ², σ²) plus the latent path, drawn from the prior.
struct Draw {
    beta: f64,
    sr: f64,
    xi2: f64,
    tau2: f64,
    sigma2: f64,
    c0: f64,
    path: Vec<f64>,
}

fn prior_draw(rng: &mut ChaCha8Rng) -> Draw {
    let scale = Gamma::new(A, 2.0 / (A * KAPPA2_B)).unwrap();
    let xi2: f64 = scale.sample(rng);
    let tau2: f64 = scale.sample(rng);
    let c0: f64 = Gamma::new(G0, 1.0 / BIG_G0).unwrap().sample(rng);
    let prec: f64 = Gamma::new(C0, 1.0 / c0).unwrap().sample(rng);
    let z = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };
    let mut path = vec![z(rng)];
    for t in 1..=T {
        path.push(path[t - 1] + z(rng));
    }
    Draw {
        beta: tau2.sqrt() * z(rng),
        sr: xi2.sqrt() * z(rng),
        xi2,
        tau2,
        sigma2: 1.0 / prec,
        c0,
        path,
    }
}

fn simulate_y(rng: &mut ChaCha8Rng, beta: f64, sr: f64, path: &[f64], sigma2: f64) -> Vec<f64> {
    let noise = Normal::new(0.0, sigma2.sqrt()).unwrap();
    (1..=T).map(|t| beta + sr * path[t] + noise.sample(rng)).collect()
}

fn data(y: Vec<f64>) -> TimeSeriesData {
    TimeSeriesData {
        y,
        x: Matrix::from_row_major(T, 1, vec![1.0; T]).unwrap(),
        column_names: vec!["Intercept".into()],
        time_index: None,
    }
}

fn stats(beta: f64, sr: f64, xi2: f64, sigma2: f64) -> [f64; 8] {
    let theta = sr * sr;
    [beta, beta * beta, theta, theta * theta, xi2, xi2 * xi2, sigma2, sigma2 * sigma2]
}

const NAMES: [&str; 8] = ["beta", "beta^2", "theta", "theta^2", "xi2", "xi2^2", "sigma2", "sigma2^2"];

/// Mean and standard error from equally sized, independent batches.
fn mean_and_se(batch_means: &[f64]) -> (f64, f64) {
    let b = batch_means.len() as f64;
    let mean = batch_means.iter().sum::<f64>() / b;
    let var = batch_means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (mean, (var / b).sqrt())
}

/// Per-batch means of the eight test functions: `chains` independent prior
/// batches and `chains` successive-conditional chains of `sweeps` sweeps,
/// each chain started from an exact prior draw so that it is stationary
/// from the first sweep.
fn geweke(seed: u64, chains: usize, sweeps: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = spec();
    let mut prior = vec![Vec::new(); 8];
    let mut chain = vec![Vec::new(); 8];
    for _ in 0..chains {
        let mut acc = [0.0; 8];
        for _ in 0..sweeps {
            let d = prior_draw(&mut rng);
            for (a, v) in acc.iter_mut().zip(stats(d.beta, d.sr, d.xi2, d.sigma2)) {
                *a += v;
            }
        }
        for k in 0..8 {
            prior[k].push(acc[k] / sweeps as f64);
        }

        let start = prior_draw(&mut rng);
        let mut y = data(simulate_y(&mut rng, start.beta, start.sr, &start.path, start.sigma2));
        let validated: Validated = validate(&spec, &McmcConfig::new(sweeps, 0, 1, 0), &y).unwrap();
        let mut sampler = GibbsSampler::new(validated);
        let mut state = ChainState::initial(&y, &spec);
        state.beta_tilde = Matrix::from_row_major(T + 1, 1, start.path.clone()).unwrap();
        state.beta_mean = vec![start.beta];
        state.theta_sr = vec![start.sr];
        state.xi2 = vec![start.xi2];
        state.tau2 = vec![start.tau2];
        state.sigma2 = start.sigma2;
        state.c0 = start.c0;
        let mut acc = [0.0; 8];
        for _ in 0..sweeps {
            sampler.sweep(&mut rng, &y, &mut state).unwrap();
            let path = state.beta_tilde.column(0);
            y.y = simulate_y(&mut rng, state.beta_mean[0], state.theta_sr[0], &path, state.sigma2);
            let st = stats(state.beta_mean[0], state.theta_sr[0], state.xi2[0], state.sigma2);
            for (a, v) in acc.iter_mut().zip(st) {
                *a += v;
            }
        }
        for k in 0..8 {
            chain[k].push(acc[k] / sweeps as f64);
        }
    }
    (prior, chain)
}

#[test]
fn successive_conditional_matches_prior() {
    // 100 chains × 1000 sweeps = 10⁵ successive-conditional sweeps
    let (prior, chain) = geweke(20, 100, 1000);
    let mut failures = Vec::new();
    for k in 0..8 {
        let (mp, sp) = mean_and_se(&prior[k]);
        let (mc, sc) = mean_and_se(&chain[k]);
        let z = (mc - mp) / (sp * sp + sc * sc).sqrt();
        println!("{:>9}: prior {mp:.4}  chain {mc:.4}  z {z:+.2}", NAMES[k]);
        if z.abs() >= 4.0 {
            failures.push(NAMES[k]);
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}
