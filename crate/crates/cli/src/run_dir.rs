//! Files of a fitted run and reading them back for prediction.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use tvp_core::diagnostics::Summary;
use tvp_core::model::SvDraws;
use tvp_core::{validate, DrawsStore, Matrix, TimeSeriesData};

use crate::config::RunSpec;
use crate::error::{CliError, Result};
use crate::io::{design_selection, fmt, load_dataset, read_table, write_csv, write_dataset};

pub const DRAWS: &str = "draws.csv";
pub const SUMMARY: &str = "summary.txt";
pub const QUANTILES: &str = "quantiles.csv";
pub const DATA_USED: &str = "data_used.csv";
pub const SPEC: &str = "spec.toml";
pub const H_PATHS: &str = "h.csv";
pub const MANIFEST: &str = "manifest.json";

/// File-name-safe form of a column label.
pub fn file_label(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn state_path_file(name: &str) -> String {
    format!("beta_tilde_{}.csv", file_label(name))
}

/// Scalar draw columns in file order.
fn scalar_columns(fit: &DrawsStore) -> Vec<(String, Vec<f64>)> {
    let mut cols = Vec::new();
    let per = |cols: &mut Vec<(String, Vec<f64>)>, prefix: &str, m: &Matrix<f64>| {
        for (j, name) in fit.column_names.iter().enumerate() {
            cols.push((format!("{prefix}_{name}"), m.column(j)));
        }
    };
    per(&mut cols, "beta_mean", &fit.beta_mean);
    per(&mut cols, "theta_sr", &fit.theta_sr);
    per(&mut cols, "tau2", &fit.tau2);
    per(&mut cols, "xi2", &fit.xi2);
    per(&mut cols, "lambda2", &fit.lambda2_j);
    per(&mut cols, "kappa2", &fit.kappa2_j);
    for (name, v) in [
        ("a_xi", &fit.a_xi),
        ("a_tau", &fit.a_tau),
        ("c_xi", &fit.c_xi),
        ("c_tau", &fit.c_tau),
        ("kappa2_B", &fit.kappa2_b),
        ("lambda2_B", &fit.lambda2_b),
    ] {
        cols.push((name.to_string(), v.clone()));
    }
    match &fit.sv {
        Some(sv) => {
            cols.push(("sv_mu".into(), sv.mu.clone()));
            cols.push(("sv_phi".into(), sv.phi.clone()));
            cols.push(("sv_sigma2".into(), sv.sigma2.clone()));
        }
        None => {
            cols.push(("sigma2".into(), fit.sigma2.clone()));
            cols.push(("C0".into(), fit.c0.clone()));
        }
    }
    cols
}

fn write_matrix(path: &Path, m: &Matrix<f64>, prefix: &str) -> Result<()> {
    let header: Vec<String> = (0..m.cols()).map(|t| format!("{prefix}{t}")).collect();
    write_csv(path, &header, (0..m.rows()).map(|i| m.row(i).iter().map(|&v| fmt(v)).collect()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes every artifact of a fit except the manifest; returns the paths.
pub fn write_run(dir: &Path, data: &TimeSeriesData, fit: &DrawsStore, spec: &RunSpec, summary: &Summary) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();

    let cols = scalar_columns(fit);
    let header: Vec<String> = cols.iter().map(|(n, _)| n.clone()).collect();
    let p = dir.join(DRAWS);
    write_csv(&p, &header, (0..fit.n_draws()).map(|m| cols.iter().map(|(_, v)| fmt(v[m])).collect()))?;
    written.push(p);

    for (j, name) in fit.column_names.iter().enumerate() {
        let p = dir.join(state_path_file(name));
        write_matrix(&p, &fit.beta_tilde[j], "t")?;
        written.push(p);
    }
    if let Some(sv) = &fit.sv {
        let p = dir.join(H_PATHS);
        write_matrix(&p, &sv.h, "h_")?;
        written.push(p);
    }

    let p = dir.join(SUMMARY);
    write_text(&p, &summary.to_table())?;
    written.push(p);

    let p = dir.join(QUANTILES);
    let levels = summary.paths.first().map(|q| q.levels.clone()).unwrap_or_default();
    let mut header = vec!["covariate".to_string(), "t".to_string()];
    header.extend(levels.iter().map(|l| format!("q{l}")));
    let rows = summary.paths.iter().flat_map(|q| {
        (0..q.values.rows()).map(move |t| {
            let mut r = vec![q.name.clone(), t.to_string()];
            r.extend(q.values.row(t).iter().map(|&v| fmt(v)));
            r
        })
    });
    write_csv(&p, &header, rows)?;
    written.push(p);

    let p = dir.join(DATA_USED);
    write_dataset(&p, data)?;
    written.push(p);

    let p = dir.join(SPEC);
    write_text(&p, &spec.to_toml()?)?;
    written.push(p);
    Ok(written)
}

fn read_matrix(path: &Path) -> Result<Matrix<f64>> {
    let t = read_table(path)?;
    let mut data = Vec::with_capacity(t.rows.len() * t.headers.len());
    for (i, r) in t.rows.iter().enumerate() {
        for cell in r {
            data.push(cell.parse::<f64>().map_err(|_| CliError::BadData {
                path: path.to_path_buf(),
                msg: format!("row {}: {cell:?} is not a number", i + 2),
            })?);
        }
    }
    Ok(Matrix::from_row_major(t.rows.len(), t.headers.len(), data)?)
}

/// A fitted run read back from its directory.
pub struct LoadedRun {
    pub spec: RunSpec,
    pub data: TimeSeriesData,
    pub fit: DrawsStore,
}

pub fn load_run(dir: &Path) -> Result<LoadedRun> {
    let spec = RunSpec::load(&dir.join(SPEC))?;
    let data = load_dataset(&dir.join(DATA_USED), &design_selection())?;
    let draws_path = dir.join(DRAWS);
    let table = read_table(&draws_path)?;
    let mut cols: HashMap<String, Vec<f64>> = HashMap::new();
    for h in &table.headers {
        cols.insert(h.clone(), table.numeric_column(h, &draws_path)?);
    }
    let m = table.rows.len();
    let d = data.dim();
    let take = |name: &str| -> Result<Vec<f64>> {
        cols.get(name)
            .cloned()
            .ok_or_else(|| CliError::BadData {
                path: draws_path.clone(),
                msg: format!("missing column {name:?}"),
            })
    };
    let per = |prefix: &str| -> Result<Matrix<f64>> {
        let mut mat = Matrix::zeros(m, d);
        for (j, name) in data.column_names.iter().enumerate() {
            for (i, v) in take(&format!("{prefix}_{name}"))?.into_iter().enumerate() {
                mat[(i, j)] = v;
            }
        }
        Ok(mat)
    };
    let beta_tilde = data
        .column_names
        .iter()
        .map(|n| read_matrix(&dir.join(state_path_file(n))))
        .collect::<Result<Vec<_>>>()?;
    let sv = if spec.prior.sv {
        Some(SvDraws {
            h: read_matrix(&dir.join(H_PATHS))?,
            mu: take("sv_mu")?,
            phi: take("sv_phi")?,
            sigma2: take("sv_sigma2")?,
        })
    } else {
        None
    };
    let (sigma2, c0) = if spec.prior.sv {
        (Vec::new(), Vec::new())
    } else {
        (take("sigma2")?, take("C0")?)
    };
    let validated = validate(&spec.prior, &spec.mcmc, &data)?;
    let fit = DrawsStore {
        column_names: data.column_names.clone(),
        beta_tilde,
        beta_mean: per("beta_mean")?,
        theta_sr: per("theta_sr")?,
        xi2: per("xi2")?,
        tau2: per("tau2")?,
        kappa2_j: per("kappa2")?,
        lambda2_j: per("lambda2")?,
        kappa2_b: take("kappa2_B")?,
        lambda2_b: take("lambda2_B")?,
        a_xi: take("a_xi")?,
        a_tau: take("a_tau")?,
        c_xi: take("c_xi")?,
        c_tau: take("c_tau")?,
        sigma2,
        c0,
        sv,
        mh_diag: Vec::new(),
        asis_fallbacks: 0,
        priorvals: validated.spec,
        learned: validated.learned,
        config: validated.cfg,
        n_obs: data.len(),
    };
    Ok(LoadedRun { spec, data, fit })
}
