//! `po`: command-line front end for the porous-ot laboratory.
//!
//! Every subcommand turns its flags into an [`config::ExperimentConfig`], checks
//! it against the bundled JSON schema, runs, and writes its artifact once,
//! atomically. Exit codes: 0 ok, 1 acceptance failure, 2 input error,
//! 3 numeric error.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Alpha, AlphaKind, CommandId, ExperimentConfig, Grid, Inputs};

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numeric(String),
    /// The suite ran and some criterion failed; the report is still written.
    Acceptance { artifact: Vec<u8>, failed: String },
}

impl Failure {
    fn located(path: &str, e: porous_ot::Error) -> Self {
        match Failure::from(e) {
            Failure::Input(m) => Failure::Input(format!("{path}: {m}")),
            other => other,
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Acceptance { .. } => 1,
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl From<porous_ot::Error> for Failure {
    fn from(e: porous_ot::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "po", version, about = "Shift-superposition rates, Cantor measures and porosity profiles")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// W_p(μ, μ_h)/h over an h grid for a measure spec
    RateScan(RateScanArgs),
    /// Rate quotients of a Cantor measure along its critical scales
    Cantor(CantorArgs),
    /// Porosity profile and class-A verdict of an interval set or Cantor generation
    Porosity(PorosityArgs),
    /// Run the acceptance suite and emit a JSON report
    Verify(VerifyArgs),
    /// Execute a stored experiment config
    Run {
        config: PathBuf,
    },
    /// Print the experiment config JSON schema
    Schema,
}

#[derive(Args)]
struct Common {
    /// Output file (written atomically); stdout when absent
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PList {
    /// Cost exponents, comma separated
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
}

impl PList {
    fn get(&self) -> Option<Vec<f64>> {
        (!self.p.is_empty()).then(|| self.p.clone())
    }
}

#[derive(Args)]
struct HGrid {
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    h_min: Option<f64>,
    #[arg(long)]
    h_count: Option<usize>,
}

impl HGrid {
    /// Any flag switches from the default halving grid to a geometric one.
    fn get(&self) -> Option<Grid> {
        if self.h_max.is_none() && self.h_min.is_none() && self.h_count.is_none() {
            return None;
        }
        Some(Grid {
            max: self.h_max.unwrap_or(1e-1),
            min: self.h_min.unwrap_or(1e-6),
            count: self.h_count.unwrap_or(17),
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Constant,
    Harmonic,
}

#[derive(Args)]
struct CantorSource {
    /// Cantor spec JSON file
    #[arg(long)]
    cantor: Option<String>,
    /// `constant`: α_n = c; `harmonic`: α_n = 1/(n + c)
    #[arg(long, value_enum)]
    alpha_kind: Option<KindArg>,
    #[arg(long)]
    alpha_c: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
}

impl CantorSource {
    fn alpha(&self) -> Option<Alpha> {
        let kind = match (self.alpha_kind, self.alpha_c) {
            (None, None) => return None,
            (Some(KindArg::Harmonic), _) => AlphaKind::Harmonic,
            _ => AlphaKind::Constant,
        };
        let c = self.alpha_c.unwrap_or(match kind {
            AlphaKind::Constant => 1.0 / 3.0,
            AlphaKind::Harmonic => 2.0,
        });
        Some(Alpha { kind, c })
    }
}

#[derive(Args)]
struct RateScanArgs {
    /// Measure spec JSON file
    #[arg(long)]
    measure: String,
    #[command(flatten)]
    p: PList,
    #[command(flatten)]
    grid: HGrid,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProbeArg {
    Fail,
    Band,
}

#[derive(Args)]
struct CantorArgs {
    #[command(flatten)]
    source: CantorSource,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Probe families, comma separated
    #[arg(long, value_enum, value_delimiter = ',')]
    probes: Vec<ProbeArg>,
    #[command(flatten)]
    p: PList,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PorosityArgs {
    /// Interval set JSON file
    #[arg(long)]
    intervals: Option<String>,
    #[command(flatten)]
    source: CantorSource,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    s_min: Option<f64>,
    #[arg(long)]
    s_count: Option<usize>,
    /// τ level separating "small" from "large" porosity in the verdict
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    W1,
}

#[derive(Args)]
struct VerifyArgs {
    /// Criterion ids, comma separated
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    /// Deliberately corrupt a routine to show the suite can fail
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
    #[command(flatten)]
    common: Common,
}

fn blank(command: CommandId, common: &Common) -> ExperimentConfig {
    ExperimentConfig {
        command,
        inputs: None,
        p: None,
        h_grid: None,
        scales: None,
        depth: None,
        alpha: None,
        n_range: None,
        probes: None,
        threshold: None,
        only: None,
        inject_fault: None,
        seed: common.seed,
        out: common.out.clone(),
    }
}

fn some_inputs(i: Inputs) -> Option<Inputs> {
    (i != Inputs::default()).then_some(i)
}

fn to_config(cmd: Cmd) -> Result<ExperimentConfig, Failure> {
    Ok(match cmd {
        Cmd::RateScan(a) => ExperimentConfig {
            inputs: Some(Inputs { measure: Some(a.measure), ..Inputs::default() }),
            p: a.p.get(),
            h_grid: a.grid.get(),
            ..blank(CommandId::RateScan, &a.common)
        },
        Cmd::Cantor(a) => {
            let n_range = match (a.n_min, a.n_max) {
                (None, None) => None,
                (lo, hi) => Some([lo.unwrap_or(2), hi.unwrap_or(8)]),
            };
            let probes = (!a.probes.is_empty()).then(|| {
                a.probes.iter().map(|p| if *p == ProbeArg::Fail { "fail" } else { "band" }.to_string()).collect()
            });
            ExperimentConfig {
                inputs: some_inputs(Inputs { cantor: a.source.cantor.clone(), ..Inputs::default() }),
                alpha: a.source.alpha(),
                depth: a.source.depth,
                n_range,
                probes,
                p: a.p.get(),
                ..blank(CommandId::Cantor, &a.common)
            }
        }
        Cmd::Porosity(a) => {
            let scales = match (a.s_max, a.s_min, a.s_count) {
                (None, None, None) => None,
                (max, min, count) => {
                    Some(Grid { max: max.unwrap_or(0.5), min: min.unwrap_or(1e-4), count: count.unwrap_or(14) })
                }
            };
            ExperimentConfig {
                inputs: some_inputs(Inputs {
                    cantor: a.source.cantor.clone(),
                    intervals: a.intervals,
                    ..Inputs::default()
                }),
                alpha: a.source.alpha(),
                depth: a.source.depth,
                scales,
                threshold: a.threshold,
                ..blank(CommandId::Porosity, &a.common)
            }
        }
        Cmd::Verify(a) => ExperimentConfig {
            only: (!a.only.is_empty()).then_some(a.only),
            inject_fault: a.inject_fault.map(|_| "w1".to_string()),
            ..blank(CommandId::Verify, &a.common)
        },
        Cmd::Run { config } => ExperimentConfig::load(&config)?,
        Cmd::Schema => unreachable!("handled before config construction"),
    })
}

/// Temp file in the destination directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| Failure::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(cfg: &ExperimentConfig, artifact: &[u8], summary: Option<serde_json::Value>) -> Result<(), Failure> {
    match &cfg.out {
        Some(out) => {
            write_atomic(Path::new(out), artifact)?;
            if let Some(s) = summary {
                println!("{s}");
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(artifact).and_then(|_| stdout.flush()).map_err(|e| Failure::Input(e.to_string()))?;
        }
    }
    Ok(())
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("PO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("PO_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Cmd::Schema = cli.command {
        print!("{}", config::SCHEMA);
        return Ok(());
    }
    init_threads()?;
    let cfg = to_config(cli.command)?;
    match commands::execute(&cfg) {
        Ok(out) => emit(&cfg, &out.artifact, out.summary),
        Err(Failure::Acceptance { artifact, failed }) => {
            emit(&cfg, &artifact, None)?;
            Err(Failure::Acceptance { artifact: Vec::new(), failed })
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Failure::Acceptance { failed, .. } => eprintln!("po: acceptance failed: {failed}"),
                Failure::Input(m) => eprintln!("po: input error: {m}"),
                Failure::Numeric(m) => eprintln!("po: numeric error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
