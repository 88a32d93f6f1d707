use tvp_core::simulate::{sim_column_names, CovariateLaw, Noise};
use tvp_core::*;

#[test]
fn static_columns_have_constant_paths() {
    let s = sim_tvp(&SimConfig::default()).unwrap();
    assert_eq!(s.data.len(), 200);
    assert_eq!(s.data.column_names, sim_column_names(3));
    assert_eq!(s.true_paths.rows(), 201);
    assert!(s.true_paths.column(1).iter().all(|&v| v == -0.3));
    assert!(s.true_paths.column(2).iter().all(|&v| v == 0.0));
    assert!(s.data.x.column(0).iter().all(|&v| v == 1.0));
}

#[test]
fn increments_have_the_state_variance() {
    let s = sim_tvp(&SimConfig {
        n: 100_000,
        theta: vec![0.2],
        beta_mean: vec![1.5],
        seed: 7,
        ..SimConfig::default()
    })
    .unwrap();
    let path = s.true_paths.column(0);
    let inc: Vec<f64> = path.windows(2).map(|w| w[1] - w[0]).collect();
    let m = inc.iter().sum::<f64>() / inc.len() as f64;
    let v = inc.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (inc.len() - 1) as f64;
    assert!((v - 0.2).abs() < 0.02 * 0.2, "{v}");
}

#[test]
fn noiseless_static_regression() {
    let s = sim_tvp(&SimConfig {
        theta: vec![0.0; 3],
        noise: Noise::Homoskedastic { sigma2: 1e-12 },
        ..SimConfig::default()
    })
    .unwrap();
    let beta = [1.5, -0.3, 0.0];
    for t in 0..s.data.len() {
        let xb: f64 = s.data.x.row(t).iter().zip(beta).map(|(a, b)| a * b).sum();
        assert!((s.data.y[t] - xb).abs() < 1e-5);
    }
}

#[test]
fn residuals_reconstruct_exactly() {
    for noise in [
        Noise::Homoskedastic { sigma2: 0.7 },
        Noise::Sv {
            mu: -0.5,
            phi: 0.9,
            sigma2: 0.1,
        },
    ] {
        let s = sim_tvp(&SimConfig {
            noise,
            seed: 3,
            ..SimConfig::default()
        })
        .unwrap();
        assert_eq!(s.h.is_some(), matches!(noise, Noise::Sv { .. }));
        for t in 0..s.data.len() {
            let xb: f64 = s.data.x.row(t).iter().zip(s.true_paths.row(t + 1)).map(|(a, b)| a * b).sum();
            assert!((s.data.y[t] - xb - s.eps[t]).abs() < 1e-12);
        }
    }
}

#[test]
fn generator_is_deterministic_and_validates() {
    let cfg = SimConfig::default();
    assert_eq!(sim_tvp(&cfg).unwrap(), sim_tvp(&cfg).unwrap());
    assert_ne!(sim_tvp(&cfg).unwrap(), sim_tvp(&SimConfig { seed: 124, ..cfg.clone() }).unwrap());
    assert!(sim_tvp(&SimConfig { theta: vec![0.1], ..cfg.clone() }).is_err());
    assert!(sim_tvp(&SimConfig { theta: vec![-0.1, 0.0, 0.0], ..cfg.clone() }).is_err());

    let x = Matrix::from_row_major(200, 3, vec![2.0; 600]).unwrap();
    let s = sim_tvp(&SimConfig {
        covariates: CovariateLaw::Supplied(x),
        ..cfg
    })
    .unwrap();
    assert!(s.data.x.column(0).iter().all(|&v| v == 1.0));
    assert!(s.data.x.column(2).iter().all(|&v| v == 2.0));
}
