use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvp_core::linalg::Matrix;
use tvp_core::states::{build_precision, filter_moments, posterior_mean, sample_states, BlockCholesky};

fn to_dense(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

struct Instance {
    y: Vec<f64>,
    x: Matrix<f64>,
    beta: Vec<f64>,
    sr: Vec<f64>,
    s2: Vec<f64>,
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Instance {
    let mut x = Matrix::zeros(n, d);
    for t in 0..n {
        for j in 0..d {
            x[(t, j)] = rng.random_range(-2.0..2.0);
        }
    }
    Instance {
        y: (0..n).map(|_| rng.random_range(-3.0..3.0)).collect(),
        x,
        beta: (0..d).map(|_| rng.random_range(-1.0..1.0)).collect(),
        sr: (0..d).map(|_| rng.random_range(-1.5..1.5)).collect(),
        s2: (0..n).map(|_| rng.random_range(0.2..3.0)).collect(),
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn analytic_mean_and_filter_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n = rng.random_range(1..=10);
        let d = rng.random_range(1..=3);
        let inst = random_instance(&mut rng, n, d);
        let sys = build_precision(&inst.y, &inst.x, &inst.beta, &inst.sr, &inst.s2).unwrap();
        let omega = to_dense(&sys.assemble());
        let c = DVector::from_vec(sys.assemble_rhs());
        let cov = omega.clone().try_inverse().unwrap();
        let mean = &cov * &c;

        assert!(omega.clone().symmetric_eigenvalues().min() > 0.0);
        let chol = BlockCholesky::factor(&sys).unwrap();
        let llt = to_dense(&chol.assemble());
        let recon = (&llt * llt.transpose() - &omega).abs().max();
        assert!(recon < 1e-10 * omega.abs().max());

        let pm = posterior_mean(&sys).unwrap();
        for t in 0..=n {
            for j in 0..d {
                assert!(rel_err(pm[t][j], mean[t * d + j]) < 1e-8);
            }
        }

        // filter moments at t₀: the marginal of block t₀ under the leading
        // (t₀+1)-block principal submatrix
        for t0 in 1..=n {
            let k = (t0 + 1) * d;
            let sub = omega.view((0, 0), (k, k)).into_owned();
            let sub_cov = sub.try_inverse().unwrap();
            let sub_mean = &sub_cov * c.rows(0, k);
            let (m, s) = filter_moments(&sys, t0).unwrap();
            for i in 0..d {
                assert!(rel_err(m[i], sub_mean[t0 * d + i]) < 1e-8);
                for j in 0..d {
                    assert!(rel_err(s[(i, j)], sub_cov[(t0 * d + i, t0 * d + j)]) < 1e-8);
                }
            }
        }
    }
}

#[test]
fn hand_system_draws() {
    let x = Matrix::from_rows(&[vec![1.0]]).unwrap();
    let sys = build_precision(&[3.0], &x, &[0.0], &[1.0], &[1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let (mut s0, mut s1, mut s00, mut s01, mut s11) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let draw = sample_states(&mut rng, &sys).unwrap();
        let (a, b) = (draw[(0, 0)], draw[(1, 0)]);
        s0 += a;
        s1 += b;
        s00 += a * a;
        s01 += a * b;
        s11 += b * b;
    }
    let nf = n as f64;
    let (m0, m1) = (s0 / nf, s1 / nf);
    let (c00, c01, c11) = (s00 / nf - m0 * m0, s01 / nf - m0 * m1, s11 / nf - m1 * m1);
    let se_mean = (2.0f64 / 3.0 / nf).sqrt();
    assert!((m0 - 1.0).abs() < 4.0 * se_mean);
    assert!((m1 - 2.0).abs() < 4.0 * se_mean);
    // se of a sample covariance of a bivariate normal: √((σ_ii σ_jj + σ_ij²)/n)
    let se_var = (2.0 * (2.0f64 / 3.0).powi(2) / nf).sqrt();
    let se_cov = (((2.0f64 / 3.0).powi(2) + (1.0f64 / 3.0).powi(2)) / nf).sqrt();
    assert!((c00 - 2.0 / 3.0).abs() < 4.0 * se_var);
    assert!((c11 - 2.0 / 3.0).abs() < 4.0 * se_var);
    assert!((c01 - 1.0 / 3.0).abs() < 4.0 * se_cov);
}

#[test]
fn zero_rhs_gives_zero_mean_draws() {
    let x = Matrix::from_rows(&[vec![1.0, 0.3], vec![1.0, -0.7], vec![1.0, 1.1]]).unwrap();
    let sys = build_precision(&[0.5, 0.2, -0.1], &x, &[0.5, 0.2], &[0.0, 0.0], &[1.0; 3]).unwrap();
    assert!(sys.c.iter().flatten().all(|&v| v == 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 20_000;
    let mut acc = vec![0.0; 8];
    for _ in 0..n {
        let draw = sample_states(&mut rng, &sys).unwrap();
        for (a, v) in acc.iter_mut().zip(draw.as_slice()) {
            *a += v;
        }
    }
    // the largest prior variance of this system is T+1 = 4
    for a in acc {
        assert!((a / n as f64).abs() < 4.0 * (4.0 / n as f64).sqrt());
    }
    for t0 in 1..=3 {
        assert!(filter_moments(&sys, t0).unwrap().0.iter().all(|&v| v == 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn precision_is_symmetric_and_mean_is_linear(
        seed in any::<u64>(),
        n in 1usize..=10,
        d in 1usize..=3,
        scale in 0.1f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, n, d);
        let sys = build_precision(&inst.y, &inst.x, &inst.beta, &inst.sr, &inst.s2).unwrap();
        prop_assert!(sys.assemble().is_symmetric(0.0));

        // scaling y* = y − xβ by s scales the analytic mean by s
        let zero = vec![0.0; d];
        let base = build_precision(&inst.y, &inst.x, &zero, &inst.sr, &inst.s2).unwrap();
        let ys: Vec<f64> = inst.y.iter().map(|v| v * scale).collect();
        let scaled = build_precision(&ys, &inst.x, &zero, &inst.sr, &inst.s2).unwrap();
        let m0 = posterior_mean(&base).unwrap();
        let m1 = posterior_mean(&scaled).unwrap();
        for (a, b) in m0.iter().flatten().zip(m1.iter().flatten()) {
            prop_assert!((a * scale - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn mc_covariance_matches_dense_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..5 {
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..=3);
        let inst = random_instance(&mut rng, n, d);
        let sys = build_precision(&inst.y, &inst.x, &inst.beta, &inst.sr, &inst.s2).unwrap();
        let cov = to_dense(&sys.assemble()).try_inverse().unwrap();
        let k = (n + 1) * d;
        let draws_n = 100_000;
        let mut sum = DVector::<f64>::zeros(k);
        let mut outer = DMatrix::<f64>::zeros(k, k);
        for _ in 0..draws_n {
            let dr = sample_states(&mut rng, &sys).unwrap();
            let v = DVector::from_column_slice(dr.as_slice());
            sum += &v;
            outer += &v * v.transpose();
        }
        let nf = draws_n as f64;
        let mean = sum / nf;
        let emp = outer / nf - &mean * mean.transpose();
        for i in 0..k {
            for j in 0..k {
                let se = ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / nf).sqrt();
                assert!((emp[(i, j)] - cov[(i, j)]).abs() < 4.0 * se, "({i},{j})");
            }
        }
    }
}
