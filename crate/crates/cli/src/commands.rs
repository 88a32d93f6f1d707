use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use tvp_core::simulate::{sim_column_names, CovariateLaw, Noise};
use tvp_core::{
    lpds, predictive_moments, run_chain, sim_tvp, summarize, validate, DrawsStore, Matrix, McmcConfig, SimConfig,
    TimeSeriesData,
};

use crate::config::{load_config_set, load_overrides, Overrides, RunSpec};
use crate::error::{CliError, Result};
use crate::io::{fmt, load_dataset, read_table, test_rows, write_csv, DataSelection};
use crate::manifest::RunManifest;
use crate::run_dir::{load_run, write_run, MANIFEST};

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Input CSV with a header row
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub columns: ColumnArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ColumnArgs {
    /// Response column
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Comma-separated covariate columns [default: all but response and time]
    #[arg(long, value_delimiter = ',')]
    pub covariates: Option<Vec<String>>,
    /// Time-label column, skipped as a covariate
    #[arg(long, default_value = "t")]
    pub time_column: String,
    /// Do not prepend an intercept column
    #[arg(long)]
    pub no_intercept: bool,
}

impl ColumnArgs {
    pub fn selection(&self) -> DataSelection {
        DataSelection {
            response: self.response.clone(),
            covariates: self.covariates.clone(),
            time_column: self.time_column.clone(),
            intercept: !self.no_intercept,
        }
    }
}

fn merged_overrides(config: Option<&Path>, flags: &Overrides) -> Result<Overrides> {
    let file = match config {
        Some(p) => load_overrides(p)?,
        None => Overrides::default(),
    };
    Ok(file.layered(flags))
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Number of observations
    #[arg(long = "T", default_value_t = 200)]
    pub n: usize,
    /// State variances, one per coefficient (the first is the intercept)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.2,0,0")]
    pub theta: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1.5,-0.3,0")]
    pub beta_mean: Vec<f64>,
    /// Error variance of homoskedastic noise
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Stochastic-volatility noise instead: mu,phi,sigma2_eta
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sv: Option<Vec<f64>>,
    /// CSV whose columns, in order, supply x1..x(d-1)
    #[arg(long)]
    pub covariates_file: Option<PathBuf>,
    #[arg(long, default_value_t = 123)]
    pub seed: u64,
    #[arg(long, default_value = "data.csv")]
    pub out: PathBuf,
    /// True coefficient paths [default: <out stem>_truth.csv]
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub data: PathBuf,
    pub truth: PathBuf,
    pub rows: usize,
}

fn supplied_covariates(path: &Path, n: usize, d: usize) -> Result<Matrix<f64>> {
    let table = read_table(path)?;
    if table.rows.len() != n || table.headers.len() + 1 != d {
        return Err(CliError::BadData {
            path: path.to_path_buf(),
            msg: format!(
                "expected {n} rows and {} columns, found {} and {}",
                d - 1,
                table.rows.len(),
                table.headers.len()
            ),
        });
    }
    let mut x = Matrix::zeros(n, d);
    for (k, h) in table.headers.iter().enumerate() {
        for (t, v) in table.numeric_column(h, path)?.into_iter().enumerate() {
            x[(t, k + 1)] = v;
        }
    }
    Ok(x)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateReport> {
    let d = args.theta.len();
    let noise = match &args.sv {
        Some(p) if p.len() == 3 => Noise::Sv {
            mu: p[0],
            phi: p[1],
            sigma2: p[2],
        },
        Some(p) => {
            return Err(CliError::InvalidArgument(format!(
                "--sv takes mu,phi,sigma2_eta, got {} values",
                p.len()
            )))
        }
        None => Noise::Homoskedastic { sigma2: args.sigma2 },
    };
    let covariates = match &args.covariates_file {
        Some(p) => CovariateLaw::Supplied(supplied_covariates(p, args.n, d)?),
        None => CovariateLaw::StandardNormal,
    };
    let out = sim_tvp(&SimConfig {
        n: args.n,
        theta: args.theta.clone(),
        beta_mean: args.beta_mean.clone(),
        noise,
        seed: args.seed,
        covariates,
    })?;

    let names = sim_column_names(d);
    let mut header = vec!["t".to_string(), "y".to_string()];
    header.extend(names[1..].iter().cloned());
    let data = &out.data;
    write_csv(
        &args.out,
        &header,
        (0..data.len()).map(|t| {
            let mut r = vec![(t + 1).to_string(), fmt(data.y[t])];
            r.extend(data.x.row(t)[1..].iter().map(|&v| fmt(v)));
            r
        }),
    )?;

    let truth = args.truth.clone().unwrap_or_else(|| {
        let stem = args.out.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
        args.out.with_file_name(format!("{stem}_truth.csv"))
    });
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().map(|n| format!("beta_{n}")));
    header.push("eps".into());
    if out.h.is_some() {
        header.push("h".into());
    }
    write_csv(
        &truth,
        &header,
        (0..=data.len()).map(|t| {
            let mut r = vec![t.to_string()];
            r.extend(out.true_paths.row(t).iter().map(|&v| fmt(v)));
            r.push(if t == 0 { String::new() } else { fmt(out.eps[t - 1]) });
            if let Some(h) = &out.h {
                r.push(fmt(h[t]));
            }
            r
        }),
    )?;
    Ok(SimulateReport {
        data: args.out.clone(),
        truth,
        rows: data.len(),
    })
}

// --------------------------------------------------------------------- fit

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// TOML file of flat keys (same names as the flags); flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Output directory
    #[arg(long, default_value = "fit_out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub out: PathBuf,
    pub summary: String,
    pub warnings: Vec<String>,
    pub fit: DrawsStore,
}

#[derive(Serialize)]
struct MhReport {
    name: String,
    acceptance_rate: f64,
    final_sd: f64,
}

pub fn cmd_fit(args: &FitArgs) -> Result<FitReport> {
    let start = Instant::now();
    let data = load_dataset(&args.data.data, &args.data.columns.selection())?;
    let overrides = merged_overrides(args.config.as_deref(), &args.overrides)?;
    let (prior, mcmc) = overrides.resolve(&McmcConfig::default());
    let warnings = validate(&prior, &mcmc, &data)?.warnings;
    let fit = run_chain(&data, &prior, &mcmc)?;
    let summary = summarize(&fit)?;
    let spec = RunSpec { mcmc, prior };
    let written = write_run(&args.out, &data, &fit, &spec, &summary)?;

    let mut manifest = RunManifest::new("fit", mcmc.seed, &spec)?;
    manifest.add_input(&args.data.data)?;
    if let Some(c) = &args.config {
        manifest.add_input(c)?;
    }
    manifest.outputs = written.iter().map(|p| p.display().to_string()).collect();
    manifest.detail("warnings", &warnings);
    manifest.detail("asis_fallbacks", fit.asis_fallbacks);
    manifest.detail(
        "metropolis_hastings",
        fit.mh_diag
            .iter()
            .map(|m| MhReport {
                name: m.name.clone(),
                acceptance_rate: m.acceptance_rate(),
                final_sd: m.final_sd,
            })
            .collect::<Vec<_>>(),
    );
    manifest.set_timing(start.elapsed().as_secs_f64(), mcmc.niter, fit.n_draws());
    manifest.write(&args.out.join(MANIFEST))?;

    Ok(FitReport {
        out: args.out.clone(),
        summary: summary.to_table(),
        warnings,
        fit,
    })
}

// -------------------------------------------------------------------- lpds

#[derive(Debug, Clone, Args)]
pub struct LpdsArgs {
    /// Directory written by `fit`
    #[arg(long, conflicts_with = "data")]
    pub run: Option<PathBuf>,
    /// Test rows scored as one-step-ahead outcomes of the run
    #[arg(long, requires = "run")]
    pub test: Option<PathBuf>,
    /// Refit instead: fit on rows 1..origin of this CSV and score row origin+1
    #[arg(long, required_unless_present = "run")]
    pub data: Option<PathBuf>,
    /// Training length for --data [default: all rows but the last]
    #[arg(long, requires = "data")]
    pub origin: Option<usize>,
    #[command(flatten)]
    pub columns: ColumnArgs,
    #[arg(long, requires = "data")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Comma-separated points at which to evaluate the predictive density
    #[arg(long, allow_hyphen_values = true)]
    pub eval_points: Option<String>,
    /// Density table over lo:hi:n
    #[arg(long, allow_hyphen_values = true)]
    pub density_grid: Option<String>,
    /// Write the density table here instead of standard output
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredRow {
    pub row: usize,
    pub y: f64,
    pub lpds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpdsReport {
    pub scores: Vec<ScoredRow>,
    /// (point, density) for --eval-points
    pub eval: Vec<(f64, f64)>,
    pub grid: Vec<(f64, f64)>,
}

pub fn parse_points(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::InvalidArgument(format!("evaluation point {p:?} is not a number")))
        })
        .collect()
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::InvalidArgument(format!("density grid {s:?} is not lo:hi:n with lo < hi and n >= 2"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 {
        return Err(bad());
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Fit on the first `origin` rows and return the fit with the scored row.
fn refit(data: &TimeSeriesData, origin: usize, overrides: &Overrides, mcmc: &McmcConfig) -> Result<(DrawsStore, TimeSeriesData)> {
    if origin < 2 || origin >= data.len() {
        return Err(CliError::InvalidArgument(format!(
            "origin {origin} must lie in [2, {}]",
            data.len().saturating_sub(1)
        )));
    }
    let train = data.head(origin)?;
    let (prior, cfg) = overrides.resolve(mcmc);
    Ok((run_chain(&train, &prior, &cfg)?, train))
}

pub fn cmd_lpds(args: &LpdsArgs) -> Result<LpdsReport> {
    let (fit, train, rows) = match (&args.run, &args.data) {
        (Some(dir), _) => {
            let run = load_run(dir)?;
            let rows = match &args.test {
                Some(p) => test_rows(&read_table(p)?, &run.data.column_names, &args.columns.response, p)?,
                None => Vec::new(),
            };
            (run.fit, run.data, rows)
        }
        (None, Some(path)) => {
            let data = load_dataset(path, &args.columns.selection())?;
            let overrides = merged_overrides(args.config.as_deref(), &args.overrides)?;
            let origin = args.origin.unwrap_or(data.len().saturating_sub(1));
            let (fit, train) = refit(&data, origin, &overrides, &McmcConfig::default())?;
            let row = (data.x.row(origin).to_vec(), data.y[origin]);
            (fit, train, vec![row])
        }
        (None, None) => return Err(CliError::InvalidArgument("give --run or --data".into())),
    };

    let mut report = LpdsReport {
        scores: Vec::new(),
        eval: Vec::new(),
        grid: Vec::new(),
    };
    for (i, (x, y)) in rows.iter().enumerate() {
        report.scores.push(ScoredRow {
            row: i + 1,
            y: *y,
            lpds: lpds(&fit, &train, x, *y)?,
        });
    }
    let points = args.eval_points.as_deref().map(parse_points).transpose()?.unwrap_or_default();
    let grid = args.density_grid.as_deref().map(parse_grid).transpose()?.unwrap_or_default();
    if !points.is_empty() || !grid.is_empty() {
        // densities refer to the first test row's covariates (or, without
        // test rows, to the last training row's)
        let x = match rows.first() {
            Some((x, _)) => x.clone(),
            None => train.x.row(train.len() - 1).to_vec(),
        };
        let pm = predictive_moments(&fit, &train, &x)?;
        report.eval = points.iter().map(|&p| (p, pm.density(p))).collect();
        report.grid = grid.iter().map(|&p| (p, pm.density(p))).collect();
    }
    if let Some(path) = &args.grid_out {
        write_csv(
            path,
            &["y".to_string(), "density".to_string()],
            report.grid.iter().map(|(p, d)| vec![fmt(*p), fmt(*d)]),
        )?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- backtest

/// Iteration counts used for every backtest fit unless overridden.
pub const BACKTEST_MCMC: (usize, usize, usize) = (30_000, 15_000, 5);

#[derive(Debug, Clone, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// TOML file with shared keys and one [[spec]] table per named prior
    #[arg(long)]
    pub config_set: PathBuf,
    /// First origin (training length)
    #[arg(long, default_value_t = 30)]
    pub t0: usize,
    /// Last origin [default: T - 1]
    #[arg(long)]
    pub tmax: Option<usize>,
    /// Smallest admissible first origin
    #[arg(long, default_value_t = 30)]
    pub min_train: usize,
    /// Worker threads [default: available parallelism]
    #[arg(long, env = "TVP_JOBS")]
    pub jobs: Option<usize>,
    /// Each fit at origin t uses seed seed_base + t
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Keys applied on top of every spec
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, default_value = "backtest_out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobResult {
    pub origin: usize,
    pub spec: String,
    pub seed: u64,
    pub lpds: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BacktestReport {
    pub out: PathBuf,
    pub results: Vec<JobResult>,
    pub failures: usize,
}

pub const LONG_CSV: &str = "lpds_long.csv";
pub const CUMULATIVE_CSV: &str = "lpds_cumulative.csv";
pub const ERRORS_JSON: &str = "errors.json";

fn score_origin(data: &TimeSeriesData, origin: usize, overrides: &Overrides, mcmc: &McmcConfig) -> Result<f64> {
    let (fit, train) = refit(data, origin, overrides, mcmc)?;
    Ok(lpds(&fit, &train, data.x.row(origin), data.y[origin])?)
}

pub fn cmd_backtest(args: &BacktestArgs) -> Result<BacktestReport> {
    let start = Instant::now();
    let data = load_dataset(&args.data.data, &args.data.columns.selection())?;
    let (shared, specs) = load_config_set(&args.config_set)?;
    let n = data.len();
    let tmax = args.tmax.unwrap_or(n.saturating_sub(1));
    if args.t0 < args.min_train.max(2) || args.t0 > tmax || tmax >= n {
        return Err(CliError::InvalidArgument(format!(
            "need {} <= t0 <= tmax < T = {n}, got t0 = {}, tmax = {tmax}",
            args.min_train.max(2),
            args.t0
        )));
    }
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
        .max(1);

    let (niter, nburn, nthin) = BACKTEST_MCMC;
    let base = McmcConfig::new(niter, nburn, nthin, 0);
    let layered: Vec<(String, Overrides)> = specs
        .iter()
        .map(|s| (s.name.clone(), shared.layered(&s.overrides).layered(&args.overrides)))
        .collect();
    let tasks: Vec<(usize, usize)> = (args.t0..=tmax)
        .flat_map(|t| (0..layered.len()).map(move |k| (t, k)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<JobResult> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(t, k)| {
                let seed = args.seed_base + t as u64;
                let mut ov = layered[k].1.clone();
                ov.seed = Some(seed);
                let outcome = score_origin(&data, t, &ov, &base);
                JobResult {
                    origin: t,
                    spec: layered[k].0.clone(),
                    seed,
                    lpds: outcome.as_ref().ok().copied(),
                    error: outcome.err().map(|e| e.to_string()),
                }
            })
            .collect()
    });

    let target = |t: usize| match &data.time_index {
        Some(ix) => ix[t].clone(),
        None => (t + 1).to_string(),
    };
    let long = args.out.join(LONG_CSV);
    write_csv(
        &long,
        &["origin", "target_time", "spec", "seed", "lpds", "error"].map(String::from),
        results.iter().map(|r| {
            vec![
                r.origin.to_string(),
                target(r.origin),
                r.spec.clone(),
                r.seed.to_string(),
                r.lpds.map(fmt).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )?;

    // cumulative sums; a failed origin leaves that spec's series empty from then on
    let cumulative = args.out.join(CUMULATIVE_CSV);
    let mut header = vec!["origin".to_string(), "target_time".to_string()];
    header.extend(layered.iter().map(|(n, _)| n.clone()));
    let mut running: Vec<Option<f64>> = vec![Some(0.0); layered.len()];
    let mut rows = Vec::new();
    for chunk in results.chunks(layered.len()) {
        let origin = chunk[0].origin;
        let mut row = vec![origin.to_string(), target(origin)];
        for (k, r) in chunk.iter().enumerate() {
            running[k] = match (running[k], r.lpds) {
                (Some(acc), Some(v)) => Some(acc + v),
                _ => None,
            };
            row.push(running[k].map(fmt).unwrap_or_default());
        }
        rows.push(row);
    }
    write_csv(&cumulative, &header, rows)?;

    let failed: Vec<&JobResult> = results.iter().filter(|r| r.error.is_some()).collect();
    let mut outputs = vec![long.display().to_string(), cumulative.display().to_string()];
    if !failed.is_empty() {
        let p = args.out.join(ERRORS_JSON);
        let text = serde_json::to_string_pretty(&failed).map_err(|e| CliError::Serialize(e.to_string()))?;
        std::fs::write(&p, text + "\n").map_err(|e| CliError::io(&p, e))?;
        outputs.push(p.display().to_string());
    }

    #[derive(Serialize)]
    struct Snapshot<'a> {
        t0: usize,
        tmax: usize,
        seed_base: u64,
        jobs: usize,
        specs: Vec<(&'a str, RunSpec)>,
    }
    let specs_resolved = layered
        .iter()
        .map(|(name, ov)| {
            let (prior, mcmc) = ov.resolve(&base);
            (name.as_str(), RunSpec { mcmc, prior })
        })
        .collect();
    let mut manifest = RunManifest::new(
        "backtest",
        args.seed_base,
        Snapshot {
            t0: args.t0,
            tmax,
            seed_base: args.seed_base,
            jobs,
            specs: specs_resolved,
        },
    )?;
    manifest.add_input(&args.data.data)?;
    manifest.add_input(&args.config_set)?;
    manifest.outputs = outputs;
    manifest.detail("jobs_total", results.len());
    manifest.detail("jobs_failed", failed.len());
    let iterations: usize = layered
        .iter()
        .map(|(_, ov)| ov.resolve(&base).1)
        .map(|c| c.niter * (tmax - args.t0 + 1))
        .sum();
    let draws: usize = layered
        .iter()
        .map(|(_, ov)| ov.resolve(&base).1.stored_draws() * (tmax - args.t0 + 1))
        .sum();
    manifest.set_timing(start.elapsed().as_secs_f64(), iterations, draws);
    manifest.write(&args.out.join(MANIFEST))?;

    let failures = failed.len();
    Ok(BacktestReport {
        out: args.out.clone(),
        results,
        failures,
    })
}
