use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tumor_bim::driver::linstab::{linear_ode, linstab_table, ode_rows, to_csv};
use tumor_bim::driver::{
    convergence_study, Checkpoint, DriverError, Refinement, RunStatus, Simulation,
    SimulationConfig, StudyError,
};

const EXIT_CONFIG: u8 = 4;
const EXIT_OTHER: u8 = 1;

#[derive(Parser)]
#[command(
    name = "tumor-bim",
    version,
    about = "Boundary integral simulation of 2D tumor growth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the tumor interface to t_final.
    Run(RunArgs),
    /// Linear stability table and linear ODE prediction.
    Linstab(LinstabArgs),
    /// Time-step or marker-count resolution study.
    Converge(ConvergeArgs),
    /// Re-emit boundary traces from a checkpoint.
    Traces(TracesArgs),
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override any key, e.g. `--set params.beta=2.0`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    set: Vec<(String, String)>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Continue from this checkpoint instead of the initial shape.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct LinstabArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    mode: Option<u32>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Directory for `stability.csv` and `linear_ode.csv`; the stability
    /// table goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Time steps, coarsest first; the last is the reference.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "ns",
        required_unless_present = "ns"
    )]
    dts: Option<Vec<f64>>,
    /// Marker counts, coarsest first; the last is the reference.
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    /// Output CSV; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TracesArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Output CSV; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Other(String),
}

impl From<DriverError> for CliError {
    fn from(e: DriverError) -> Self {
        match e {
            DriverError::Config(_) | DriverError::Checkpoint(_) => Self::Config(e.to_string()),
            _ => Self::Other(e.to_string()),
        }
    }
}

fn load(cfg: &ConfigArgs, extra: Vec<(String, String)>) -> Result<SimulationConfig, CliError> {
    let mut overrides = cfg.set.clone();
    overrides.extend(extra);
    SimulationConfig::load_with(&cfg.config, &overrides)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn opt<T: ToString>(key: &str, v: Option<T>) -> Option<(String, String)> {
    v.map(|v| (key.to_string(), v.to_string()))
}

fn toml_string(p: &Path) -> String {
    toml::Value::String(p.display().to_string()).to_string()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Other(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<RunStatus, CliError> {
    let extra = [
        opt("numerics.dt", a.dt),
        opt("numerics.N", a.n),
        opt("numerics.t_final", a.t_final),
        a.out
            .as_deref()
            .map(|p| ("output.dir".to_string(), toml_string(p))),
    ];
    let config = load(&a.cfg, extra.into_iter().flatten().collect())?;
    let mut sim = match &a.resume {
        Some(path) => {
            Simulation::resume(config, Checkpoint::read(path).map_err(DriverError::from)?)?
        }
        None => Simulation::new(config)?,
    };
    let outcome = sim.run()?;
    println!(
        "{}",
        serde_json::to_string_pretty(&outcome.summary).expect("summary serializes")
    );
    Ok(outcome.status)
}

fn cmd_linstab(a: LinstabArgs) -> Result<(), CliError> {
    let extra = [
        opt("linstab.r_min", a.r_min),
        opt("linstab.r_max", a.r_max),
        opt("linstab.points", a.points),
        opt("diagnostics.mode", a.mode),
    ];
    let config = load(&a.cfg, extra.into_iter().flatten().collect())?;
    let l = config.diagnostics.mode;
    let math = |e: tumor_bim::linear::LinearError| CliError::Other(e.to_string());
    let table = to_csv(&linstab_table(&config, l).map_err(math)?)
        .map_err(|e| CliError::Other(e.to_string()))?;
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Other(format!("{}: {e}", dir.display())))?;
            emit(Some(&dir.join("stability.csv")), &table)?;
            let rows = ode_rows(&linear_ode(&config, l).map_err(math)?);
            let ode = to_csv(&rows).map_err(|e| CliError::Other(e.to_string()))?;
            emit(Some(&dir.join("linear_ode.csv")), &ode)
        }
        None => emit(None, &table),
    }
}

fn cmd_converge(a: ConvergeArgs) -> Result<(), CliError> {
    let config = load(&a.cfg, Vec::new())?;
    let refine = match (a.dts, a.ns) {
        (Some(d), _) => Refinement::Dt(d),
        (None, Some(n)) => Refinement::N(n),
        (None, None) => unreachable!("clap requires one of --dts, --ns"),
    };
    let table = convergence_study(&config, &refine).map_err(|e| match e {
        StudyError::Run { source, .. } => CliError::from(source),
        StudyError::TooFew | StudyError::Order | StudyError::Cadence { .. } => {
            CliError::Config(e.to_string())
        }
        StudyError::Mismatch => CliError::Other(e.to_string()),
    })?;
    emit(a.out.as_deref(), &table.to_csv())
}

fn cmd_traces(a: TracesArgs) -> Result<(), CliError> {
    let ck = Checkpoint::read(&a.checkpoint).map_err(DriverError::from)?;
    let sim = Simulation::from_checkpoint(ck)?;
    let traces = sim.traces()?;
    let text = traces
        .to_csv()
        .map_err(|e| CliError::Other(e.to_string()))?;
    emit(a.out.as_deref(), &text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a).map(|s| s.exit_code() as u8),
        Command::Linstab(a) => cmd_linstab(a).map(|_| 0),
        Command::Converge(a) => cmd_converge(a).map(|_| 0),
        Command::Traces(a) => cmd_traces(a).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_OTHER)
        }
    }
}
