//! Command-line surface: `windows`, `synth`, `estimate`, `mc`, `validate`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-contract
//! violation, 1 anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::harmonics::gram_max_error;
use crate::io::{
    partition_csv, profiles_csv, read_map_for, results_csv, summary_csv, windows_csv, write_map, write_text,
};
use crate::mc::{run_experiment, run_experiment_with_threads, Experiment, ResultRow, ScaleRun};
use crate::model::{SeededRng, StreamRole};
use crate::needlet::NeedletScale;
use crate::Pixelization;

#[derive(Debug, Parser)]
#[command(name = "nse", version, about = "Needlet spectral estimation on the sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Window tables, needlet profiles and the partition of unity.
    Windows(CommonArgs),
    /// Masked field, noise level, noise and observation maps for replicate 0.
    Synth(CommonArgs),
    /// Estimates from `y_j{j}.map` files.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        /// Directory holding the maps (default: `io.maps`, then the output directory).
        #[arg(long)]
        maps: Option<PathBuf>,
    },
    /// The Monte Carlo experiment.
    Mc(CommonArgs),
    /// Structural checks only.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Run the structural checks before the command.
    #[arg(long)]
    pub validate: bool,
}

impl CommonArgs {
    fn load(&self) -> Result<Config> {
        Config::from_file(&self.config)
    }

    fn out_dir(&self, cfg: &Config) -> PathBuf {
        self.out.clone().unwrap_or_else(|| cfg.out_dir())
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Contract(_) | Error::ConventionViolation { .. } => 3,
        _ => 1,
    }
}

/// Parses the arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let common = match &cli.command {
        Command::Windows(c) | Command::Synth(c) | Command::Mc(c) | Command::Validate(c) => c,
        Command::Estimate { common, .. } => common,
    };
    let cfg = common.load()?;
    let threads = common.threads;
    if threads == Some(0) {
        return Err(Error::Config("--threads must be positive".into()));
    }
    let work = || -> Result<()> {
        if common.validate || matches!(cli.command, Command::Validate(_)) {
            let report = validate(&cfg)?;
            print!("{report}");
        }
        let out = common.out_dir(&cfg);
        match &cli.command {
            Command::Windows(_) => cmd_windows(&cfg, &out),
            Command::Synth(_) => cmd_synth(&cfg.experiment(common.seed)?, &out),
            Command::Estimate { maps, .. } => {
                let dir = maps
                    .clone()
                    .or_else(|| cfg.file.io.maps.as_ref().map(|m| cfg.resolve(m)))
                    .unwrap_or_else(|| out.clone());
                cmd_estimate(&cfg.experiment(common.seed)?, &dir, &out)
            }
            Command::Mc(_) => cmd_mc(&cfg.experiment(common.seed)?, &out, threads),
            Command::Validate(_) => Ok(()),
        }
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Writes `windows.csv`, `profiles.csv` and `partition.csv`.
pub fn cmd_windows(cfg: &Config, out: &Path) -> Result<()> {
    let family = cfg.family()?;
    let scales: Vec<i32> = cfg.scales();
    write_text(&out.join("windows.csv"), &windows_csv(&family, &scales))?;
    write_text(
        &out.join("profiles.csv"),
        &profiles_csv(&family, &scales, cfg.file.io.profile_samples),
    )?;
    write_text(
        &out.join("partition.csv"),
        &partition_csv(&family, cfg.file.io.partition_lmax),
    )
}

/// Writes `wx_j{j}.map`, `wsigma_j{j}.map`, `wz_j{j}.map` and `y_j{j}.map`
/// for replicate 0 of the experiment.
pub fn cmd_synth(exp: &Experiment, out: &Path) -> Result<()> {
    exp.validate()?;
    let field = exp.replicate_field(0)?;
    let seeds = SeededRng::new(exp.seed);
    for &j in &exp.scales {
        let run = ScaleRun::new(exp, j)?;
        let mut noise = seeds.stream(0, StreamRole::Noise, j as u32);
        let obs = run.observe(&field, &mut noise)?;
        let pix = run.scale.pixelization();
        write_map(&out.join(format!("wx_j{j}.map")), pix, &obs.masked_field)?;
        write_map(&out.join(format!("wsigma_j{j}.map")), pix, &obs.masked_sigma)?;
        write_map(&out.join(format!("wz_j{j}.map")), pix, &obs.masked_noise)?;
        write_map(&out.join(format!("y_j{j}.map")), pix, &obs.y)?;
    }
    Ok(())
}

/// Reads `y_j{j}.map` from `maps` for every scale and writes `estimates.csv`.
pub fn cmd_estimate(exp: &Experiment, maps: &Path, out: &Path) -> Result<()> {
    exp.validate()?;
    let mut rows = Vec::with_capacity(exp.scales.len());
    for &j in &exp.scales {
        let run = ScaleRun::new(exp, j)?;
        let path = maps.join(format!("y_j{j}.map"));
        if !path.exists() {
            return Err(Error::Config(format!("missing map for scale j = {j}: {}", path.display())));
        }
        let y = read_map_for(&path, run.scale.pixelization())?;
        rows.push(ResultRow {
            j,
            replicate: 0,
            c_target: run.target,
            outcome: run.estimate(&y, &exp.estimator).map_err(|e| e.to_string()),
        });
    }
    write_text(&out.join("estimates.csv"), &results_csv(&rows))
}

/// Writes `results.csv` and `summary.csv`.
pub fn cmd_mc(exp: &Experiment, out: &Path, threads: Option<usize>) -> Result<()> {
    let output = match threads {
        Some(n) => run_experiment_with_threads(exp, n)?,
        None => run_experiment(exp)?,
    };
    let failed = output.failures().count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} estimates failed", output.rows.len());
    }
    write_text(&out.join("results.csv"), &results_csv(&output.rows))?;
    write_text(&out.join("summary.csv"), &summary_csv(&output.summary))
}

const PARTITION_TOL: f64 = 1e-12;
const GRAM_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-9;

/// Partition of unity, cubature Gram matrices and the needlet norm identity.
/// Returns a report, or a contract error listing the failed checks.
pub fn validate(cfg: &Config) -> Result<String> {
    let family = cfg.family()?;
    let mut report = String::new();
    let mut failures = Vec::new();

    let lmax = cfg.file.io.partition_lmax;
    // Only degrees whose whole band lies inside the configured scales.
    let lo = (family.band_ratio().powi(*family.j_range().start())).ceil() as usize;
    let hi = (family.band_ratio().powi(*family.j_range().end())).floor() as usize;
    let partition = (lo.max(1)..=hi.min(lmax))
        .map(|l| {
            let sum = match family.mode() {
                crate::WindowMode::Tight => family.partition_sum(l),
                crate::WindowMode::Literal => family.j_range().map(|j| family.eval(j, l)).sum(),
            };
            (sum - 1.0).abs()
        })
        .fold(0.0, f64::max);
    check(&mut report, &mut failures, "partition", partition, PARTITION_TOL);

    for order in [4, 8, 16, 32] {
        let err = gram_max_error(&Pixelization::new(order), order);
        check(&mut report, &mut failures, &format!("gram L={order}"), err, GRAM_TOL);
    }

    for &j in &cfg.scales() {
        let scale = NeedletScale::new(&family, j)?;
        let step = (scale.len() / 64).max(1);
        let mut worst: f64 = 0.0;
        for k in (0..scale.len()).step_by(step) {
            let (lhs, rhs) = scale.norm_identity_check(k)?;
            if rhs > 0.0 {
                worst = worst.max((lhs - rhs).abs() / rhs);
            }
        }
        check(&mut report, &mut failures, &format!("norm identity j={j}"), worst, NORM_TOL);
    }

    if failures.is_empty() {
        Ok(report)
    } else {
        Err(Error::Contract(format!("{report}failed: {}", failures.join(", "))))
    }
}

fn check(report: &mut String, failures: &mut Vec<String>, name: &str, value: f64, tol: f64) {
    let ok = value < tol;
    let _ = writeln!(
        report,
        "{} {name}: {value:.3e} (tol {tol:.0e})",
        if ok { "ok  " } else { "FAIL" }
    );
    if !ok {
        failures.push(name.to_string());
    }
}
