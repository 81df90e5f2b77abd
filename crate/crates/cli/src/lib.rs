//! Command-line front end for the `ultraslow` solvers.
//!
//! Every run writes `manifest.txt` into the output directory (inputs hash,
//! versions, exit status, one line per output with its SHA-256) and
//! `timing.txt` with the wall time. Exit statuses: 0 success, 1 a property
//! check failed, 2 usage or configuration error, 3 numerical failure.

pub mod error;
pub mod output;
pub mod plotdata;
pub mod scenario;
pub mod tasks;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use error::{CliError, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use output::{manifest_text, sha256_hex, Outputs, RunInputs, MANIFEST, TIMING};
use plotdata::{Input, PlotKind};
use scenario::Scenario;
use tasks::{Context, TaskOutcome};

#[derive(Debug, Parser)]
#[command(name = "ultraslow", version, about = "Distributed-order diffusion: forward runs, checks and weight recovery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output directory; defaults to `[output].dir` or `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report recovery errors even when data and inversion share a discretization.
    #[arg(long, global = true)]
    pub inverse_crime_ok: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the forward problem and record the observation.
    Forward,
    /// Recover the weight from an observation record.
    Invert,
    /// Run the property-check suite.
    Check,
    /// Export the eigensystem and relaxation tables.
    Spectra,
    /// Compare the data of two weights.
    Probe,
    /// Reshape result files into long-format CSV.
    Plotdata {
        #[arg(value_enum)]
        kind: PlotKind,
        /// Input file, optionally `label=path`; repeatable.
        #[arg(long = "input", required = true)]
        inputs: Vec<String>,
        /// Field-slice times (nearest grid times are used).
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Forward => "forward",
            Command::Invert => "invert",
            Command::Check => "check",
            Command::Spectra => "spectra",
            Command::Probe => "probe",
            Command::Plotdata { .. } => "plotdata",
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return EXIT_OK;
            }
            let dir = out_from_raw(&args).unwrap_or_else(|| PathBuf::from("out"));
            let inputs = RunInputs { command: "unknown".into(), ..Default::default() };
            finish(&dir, &inputs, &Outputs::new(&dir), EXIT_USAGE, "invalid command line", 0.0);
            EXIT_USAGE
        }
    }
}

fn out_from_raw(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        if a == "--out" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--out=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

pub fn run(cli: &Cli) -> i32 {
    let start = Instant::now();
    let mut inputs = RunInputs {
        command: cli.command.name().into(),
        jobs: cli.jobs,
        inverse_crime_ok: cli.inverse_crime_ok,
        ..Default::default()
    };
    let loaded = cli.scenario.as_deref().map(|p| (p, Scenario::load(p)));
    let dir = cli
        .out
        .clone()
        .or_else(|| match &loaded {
            Some((_, Ok((s, _)))) => s.output.dir.as_ref().map(|d| s.resolve(d)),
            _ => None,
        })
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut outputs = Outputs::new(&dir);

    let result = (|| -> Result<TaskOutcome, CliError> {
        let pool = match cli.jobs {
            Some(0) => return Err(CliError::usage("--jobs must be at least 1")),
            Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
            None => rayon::ThreadPoolBuilder::new().build(),
        }
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;

        if let Command::Plotdata { kind, inputs: raw, times } = &cli.command {
            let items: Vec<Input> = raw.iter().map(|a| Input::parse(a, *kind)).collect();
            for item in &items {
                let bytes = std::fs::read(&item.path)
                    .map_err(|e| CliError::usage(format!("plot input {}: {e}", item.path.display())))?;
                inputs.extra_inputs.push((item.path.display().to_string(), sha256_hex(&bytes)));
            }
            let table = plotdata::emit(*kind, &items, times.as_deref())?;
            outputs.write(&format!("plot_{}.csv", kind.name()), table)?;
            return Ok(TaskOutcome { status: EXIT_OK, message: format!("{} rows", table_rows(&outputs)) });
        }

        let (path, loaded) = loaded.ok_or_else(|| CliError::usage("this command needs --scenario PATH"))?;
        let (mut scenario, bytes) = loaded?;
        inputs.scenario_name = path.file_name().map(|n| n.to_string_lossy().into_owned());
        inputs.scenario_sha256 = Some(sha256_hex(&bytes));
        if let Some(seed) = cli.seed {
            scenario.seed = seed;
        }
        inputs.seed = Some(scenario.seed);
        if let Some(r) = &scenario.invert.record {
            if matches!(cli.command, Command::Invert) {
                let r = scenario.resolve(r);
                for p in [r.clone(), scenario::sidecar_path(&r)] {
                    let b = std::fs::read(&p).map_err(|e| CliError::io(&p, e))?;
                    inputs.extra_inputs.push((p.display().to_string(), sha256_hex(&b)));
                }
            }
        }
        let config = scenario.experiment()?;
        let ctx = Context { scenario: &scenario, config, inverse_crime_ok: cli.inverse_crime_ok };
        pool.install(|| match cli.command {
            Command::Forward => tasks::forward(&ctx, &mut outputs),
            Command::Invert => tasks::invert(&ctx, &mut outputs),
            Command::Check => tasks::check(&ctx, &mut outputs),
            Command::Spectra => tasks::spectra(&ctx, &mut outputs),
            Command::Probe => tasks::probe(&ctx, &mut outputs),
            Command::Plotdata { .. } => unreachable!(),
        })
    })();

    let (status, message) = match result {
        Ok(o) => (o.status, o.message),
        Err(e) => {
            eprintln!("error: {e}");
            (e.code, e.message)
        }
    };
    finish(&dir, &inputs, &outputs, status, &message, start.elapsed().as_secs_f64());
    status
}

fn table_rows(outputs: &Outputs) -> usize {
    outputs
        .written
        .last()
        .and_then(|(name, _, _)| std::fs::read_to_string(outputs.dir.join(name)).ok())
        .map_or(0, |t| t.lines().count().saturating_sub(1))
}

/// Writes manifest and timing; a manifest that cannot be written is reported
/// on stderr only.
fn finish(dir: &Path, inputs: &RunInputs, outputs: &Outputs, status: i32, message: &str, seconds: f64) {
    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(MANIFEST), manifest_text(inputs, outputs, status, message))?;
        std::fs::write(dir.join(TIMING), format!("wall_seconds={seconds:.3}\n"))
    };
    if let Err(e) = write() {
        eprintln!("cannot write manifest in {}: {e}", dir.display());
    }
    if status == EXIT_NUMERICAL {
        eprintln!("numerical failure: {message}");
    }
}
