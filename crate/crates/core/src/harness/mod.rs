//! Scenario runner: propagates the selected mechanizations against the
//! analytic truth, writes per-algorithm error CSVs and summarizes them.

mod config;
mod record;
mod selftest;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{Algorithm, RunConfig, RunSection};
pub use record::{
    principal_angle_error, read_error_csv, read_imu, read_imu_file, state_error, write_error_csv,
    write_imu, write_truth, ErrorRecord, CSV_HEADER, IMU_HEADER,
};
pub use selftest::{selftest, Check};

use crate::baseline::run_two_sample;
use crate::error::{Error, Result};
use crate::kinematics::{rk4_propagate, traditional_rhs, NavState};
use crate::tqfilter::{solve_trajectory, split_windows, ImuMode, ImuSample};
use crate::trajectory::{imu_rates, synthesize_imu, truth_to_eframe};

/// Error series of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub records: Vec<ErrorRecord>,
    /// Windows whose Picard loop hit the iteration limit (tq only).
    pub unconverged: usize,
}

/// Increments driving the run: the configured file or the synthesized
/// scenario record.
pub fn load_samples(cfg: &RunConfig) -> Result<Vec<ImuSample>> {
    match &cfg.run.imu {
        Some(path) => {
            if cfg.solver.mode != ImuMode::Increments {
                return Err(Error::InvalidConfig(
                    "IMU files hold increments; set solver.mode = \"increments\"".into(),
                ));
            }
            read_imu_file(path)
        }
        None => synthesize_imu(&cfg.scenario, &cfg.earth, cfg.solver.mode),
    }
}

/// Window-boundary times shared by all algorithms: the start time and the
/// end stamp of every complete window.
fn report_grid(samples: &[ImuSample], n: usize) -> Vec<f64> {
    let windows = samples.len() / n;
    if windows == 0 {
        return Vec::new();
    }
    std::iter::once(0.0)
        .chain((1..=windows).map(|k| samples[k * n - 1].t))
        .collect()
}

fn propagate(
    algo: Algorithm,
    cfg: &RunConfig,
    samples: &[ImuSample],
    increments: &[ImuSample],
    grid: &[f64],
) -> Result<Vec<(NavState, bool)>> {
    let model = &cfg.earth;
    let n = cfg.solver.window_samples;
    let s0 = truth_to_eframe(0.0, &cfg.scenario, model);
    let used = (grid.len() - 1) * n;
    match algo {
        Algorithm::Tq => {
            let windows = split_windows(&samples[..used], n, 0.0, cfg.solver.mode)?;
            let sol = solve_trajectory(&windows, &s0, 0.0, model, &cfg.solver)?;
            Ok(std::iter::once((s0, true))
                .chain(
                    sol.states[1..]
                        .iter()
                        .zip(&sol.windows)
                        .map(|((_, s), w)| (*s, w.converged)),
                )
                .collect())
        }
        Algorithm::TwoSample => {
            let states = run_two_sample(&increments[..used], &s0, 0.0, model)?;
            Ok(states
                .iter()
                .step_by(n / 2)
                .map(|(_, s)| (*s, true))
                .collect())
        }
        Algorithm::Rk4 => {
            let p = &cfg.scenario;
            let mut out = Vec::with_capacity(grid.len());
            let mut s = s0;
            out.push((s, true));
            for pair in grid.windows(2) {
                s = rk4_propagate(
                    |t, x: &NavState| {
                        let (w, f) = imu_rates(t, p, model)?;
                        traditional_rhs(x, &w, &f, model)
                    },
                    s,
                    pair[0],
                    pair[1],
                    cfg.run.rk4_step,
                )?;
                out.push((s, true));
            }
            Ok(out)
        }
    }
}

/// Runs every selected algorithm on its own thread and returns the error
/// series at window boundaries, decimated per the configuration.
pub fn compute_errors(cfg: &RunConfig) -> Result<Vec<AlgorithmRun>> {
    cfg.validate()?;
    let samples = load_samples(cfg)?;
    let increments = if cfg.solver.mode == ImuMode::Increments {
        samples.clone()
    } else {
        synthesize_imu(&cfg.scenario, &cfg.earth, ImuMode::Increments)?
    };
    let grid = report_grid(&samples, cfg.solver.window_samples);
    let truth: Vec<NavState> = grid
        .iter()
        .map(|&t| truth_to_eframe(t, &cfg.scenario, &cfg.earth))
        .collect();

    let results: Vec<Result<AlgorithmRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .run
            .algos
            .iter()
            .map(|&algo| {
                let (samples, increments, grid, truth) = (&samples, &increments, &grid, &truth);
                scope.spawn(move || -> Result<AlgorithmRun> {
                    if grid.is_empty() {
                        return Ok(AlgorithmRun {
                            algorithm: algo,
                            records: Vec::new(),
                            unconverged: 0,
                        });
                    }
                    let states = propagate(algo, cfg, samples, increments, grid)?;
                    let unconverged = states.iter().filter(|(_, c)| !c).count();
                    let records = grid
                        .iter()
                        .zip(truth)
                        .zip(&states)
                        .step_by(cfg.run.decimate)
                        .map(|((&t, tr), (est, c))| state_error(t, tr, est, &cfg.earth, *c))
                        .collect::<Result<_>>()?;
                    Ok(AlgorithmRun {
                        algorithm: algo,
                        records,
                        unconverged,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("algorithm thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

pub fn csv_path(dir: &Path, algo: Algorithm) -> PathBuf {
    dir.join(format!("{}.csv", algo.name()))
}

/// [`compute_errors`] followed by one CSV per algorithm in `run.out`.
pub fn run_scenario(cfg: &RunConfig) -> Result<Vec<(AlgorithmRun, PathBuf)>> {
    let runs = compute_errors(cfg)?;
    std::fs::create_dir_all(&cfg.run.out)?;
    runs.into_iter()
        .map(|run| {
            let path = csv_path(&cfg.run.out, run.algorithm);
            let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_error_csv(file, &run.records)?;
            Ok((run, path))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelStats {
    pub max: f64,
    pub rms: f64,
}

impl ChannelStats {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count();
        if n == 0 {
            return Self { max: 0.0, rms: 0.0 };
        }
        Self {
            max: values.clone().fold(0.0, f64::max),
            rms: (values.map(|x| x * x).sum::<f64>() / n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub name: String,
    pub records: usize,
    pub unconverged: usize,
    pub attitude: ChannelStats,
    pub velocity: ChannelStats,
    pub position: ChannelStats,
}

/// `log₁₀(other max / reference max)` per channel; `None` when only the
/// reference error is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub reference: String,
    pub other: String,
    pub attitude_orders: Option<f64>,
    pub velocity_orders: Option<f64>,
    pub position_orders: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub algorithms: Vec<AlgorithmSummary>,
    pub ratios: Vec<RatioRow>,
}

fn orders(reference: f64, other: f64) -> Option<f64> {
    match (reference == 0.0, other == 0.0) {
        (true, true) => Some(0.0),
        (true, false) => None,
        _ => Some((other / reference).log10()),
    }
}

/// Summarizes named error series. The first series is the reference for
/// the ratio rows; all series must share one time grid.
pub fn summarize_records(series: &[(String, Vec<ErrorRecord>)]) -> Result<Summary> {
    if let Some((first_name, first)) = series.first() {
        for (name, s) in &series[1..] {
            let same = s.len() == first.len() && s.iter().zip(first).all(|(a, b)| a.t == b.t);
            if !same {
                return Err(Error::GridMismatch(format!(
                    "{name} ({} records) and {first_name} ({} records) use different time stamps",
                    s.len(),
                    first.len()
                )));
            }
        }
    }
    let algorithms: Vec<AlgorithmSummary> = series
        .iter()
        .map(|(name, s)| AlgorithmSummary {
            name: name.clone(),
            records: s.len(),
            unconverged: s.iter().filter(|r| !r.converged).count(),
            attitude: ChannelStats::of(s.iter().map(|r| r.att_err)),
            velocity: ChannelStats::of(s.iter().map(|r| r.vel_err_nue.norm())),
            position: ChannelStats::of(s.iter().map(|r| r.pos_err_nue.norm())),
        })
        .collect();
    let ratios = algorithms
        .iter()
        .skip(1)
        .map(|o| {
            let r = &algorithms[0];
            RatioRow {
                reference: r.name.clone(),
                other: o.name.clone(),
                attitude_orders: orders(r.attitude.max, o.attitude.max),
                velocity_orders: orders(r.velocity.max, o.velocity.max),
                position_orders: orders(r.position.max, o.position.max),
            }
        })
        .collect();
    Ok(Summary { algorithms, ratios })
}

/// Reads error CSVs and summarizes them; series are named by file stem.
pub fn summarize(paths: &[PathBuf]) -> Result<Summary> {
    let series = paths
        .iter()
        .map(|p| {
            let name = p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            );
            Ok((name, read_error_csv(std::fs::File::open(p)?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    summarize_records(&series)
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>7} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}",
            "algorithm",
            "records",
            "att max",
            "att rms",
            "vel max",
            "vel rms",
            "pos max",
            "pos rms"
        )?;
        for a in &self.algorithms {
            writeln!(
                f,
                "{:<12} {:>7} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}",
                a.name,
                a.records,
                a.attitude.max,
                a.attitude.rms,
                a.velocity.max,
                a.velocity.rms,
                a.position.max,
                a.position.rms
            )?;
        }
        let show = |x: Option<f64>| x.map_or_else(|| "inf".to_string(), |v| format!("{v:.2}"));
        for r in &self.ratios {
            writeln!(
                f,
                "{} vs {}: attitude {} orders, velocity {} orders, position {} orders",
                r.other,
                r.reference,
                show(r.attitude_orders),
                show(r.velocity_orders),
                show(r.position_orders)
            )?;
        }
        Ok(())
    }
}
