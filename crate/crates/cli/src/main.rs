use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use trinav::harness::{
    run_scenario, selftest, summarize, write_imu, write_truth, Algorithm, RunConfig,
};
use trinav::tqfilter::ImuMode;
use trinav::trajectory::{synthesize_imu, truth_to_eframe};

#[derive(Parser)]
#[command(
    name = "trinav",
    version,
    about = "Trident-quaternion strapdown navigation harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the scenario's IMU increments and truth states.
    Simulate(ConfigArgs),
    /// Propagate the selected algorithms and write error CSVs.
    Run(RunArgs),
    /// Summarize error CSVs; the first file is the ratio reference.
    Compare {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Also write the summary as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the built-in consistency checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    base: ConfigArgs,
    /// Comma-separated subset of tq,twosample,rk4.
    #[arg(long)]
    algos: Option<String>,
    /// Keep every K-th error record.
    #[arg(long)]
    decimate: Option<usize>,
    /// Increment file to use instead of the synthesized record.
    #[arg(long)]
    imu: Option<PathBuf>,
    /// Fail when any window did not converge.
    #[arg(long)]
    strict: bool,
}

fn load(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => {
            RunConfig::load(path).with_context(|| format!("reading {}", path.display()))?
        }
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::reference(),
    };
    if let Some(out) = &args.out {
        cfg.run.out = out.clone();
    }
    Ok(cfg)
}

fn simulate(args: &ConfigArgs) -> Result<()> {
    let cfg = load(args)?;
    cfg.validate()?;
    let p = &cfg.scenario;
    let imu = synthesize_imu(p, &cfg.earth, ImuMode::Increments)?;
    let truth: Vec<_> = std::iter::once(0.0)
        .chain(imu.iter().map(|s| s.t))
        .map(|t| (t, truth_to_eframe(t, p, &cfg.earth)))
        .collect();
    std::fs::create_dir_all(&cfg.run.out)?;
    let imu_path = cfg.run.out.join("imu.csv");
    let truth_path = cfg.run.out.join("truth.csv");
    write_imu(
        std::io::BufWriter::new(std::fs::File::create(&imu_path)?),
        &imu,
    )?;
    write_truth(
        std::io::BufWriter::new(std::fs::File::create(&truth_path)?),
        &truth,
    )?;
    println!("wrote {} samples to {}", imu.len(), imu_path.display());
    println!(
        "wrote {} truth states to {}",
        truth.len(),
        truth_path.display()
    );
    Ok(())
}

fn run(args: &RunArgs) -> Result<bool> {
    let mut cfg = load(&args.base)?;
    if let Some(a) = &args.algos {
        cfg.run.algos = Algorithm::parse_list(a)?;
    }
    if let Some(k) = args.decimate {
        cfg.run.decimate = k;
    }
    if let Some(imu) = &args.imu {
        cfg.run.imu = Some(imu.clone());
    }
    let runs = run_scenario(&cfg)?;
    let mut ok = true;
    for (run, path) in &runs {
        println!(
            "{}: {} records -> {}",
            run.algorithm.name(),
            run.records.len(),
            path.display()
        );
        if run.unconverged > 0 {
            eprintln!(
                "{}: {} windows did not converge",
                run.algorithm.name(),
                run.unconverged
            );
            ok = false;
        }
    }
    let paths: Vec<PathBuf> = runs.into_iter().map(|(_, p)| p).collect();
    print!("{}", summarize(&paths)?);
    Ok(ok || !args.strict)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args).map(|_| true),
        Command::Run(args) => run(args),
        Command::Compare { csv, json } => (|| {
            let summary = summarize(csv)?;
            print!("{summary}");
            if let Some(path) = json {
                std::fs::write(path, summary.to_json())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(true)
        })(),
        Command::Selftest { seed } => {
            let checks = selftest(*seed);
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
