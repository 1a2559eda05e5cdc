use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sgkink::experiments::{self as ex, MapKind, Report, Settings};
use sgkink::field::{Grid, ParityTag, PerturbationPair};
use sgkink::par::{self, Exec};
use sgkink::Error;

use crate::config::{ConfigError, ExperimentConfig, StabilityPart};
use crate::{exit, output};

#[derive(Debug, Parser)]
#[command(name = "sgkink", version, about = "Sine-Gordon and phi^4 kink laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for summary.json, CSV tables and SVG plots.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for concurrent cells.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Tighten every tolerance tenfold.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// PDE residuals and refinement orders of the closed-form solutions.
    VerifyExact,
    /// Nonlinear and linearized transformation identities.
    VerifyBt,
    /// Discrete spectra of the linearized operators.
    Spectrum,
    /// Map vacuum-side data to the kink side.
    Lift(MapArgs),
    /// Map kink-side data back to the vacuum side.
    Descend(MapArgs),
    /// Evolve one solution and record the probe series.
    Evolve,
    /// Manifold data, modulation and decay experiments.
    Stability,
    /// Parameter sweeps.
    Sweep,
    /// Run the command named by `experiment` in the config file.
    Run,
    /// Print the default configuration.
    DefaultConfig,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MapArgs {
    /// CSV with header `x,first,second`; seeded random data if absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// zero-kink, breather-wobbler or manifold.
    #[arg(long, value_parser = parse_map)]
    pub map: Option<MapKind>,
}

fn parse_map(s: &str) -> Result<MapKind, String> {
    match s {
        "zero-kink" => Ok(MapKind::ZeroKink),
        "breather-wobbler" => Ok(MapKind::BreatherWobbler),
        "manifold" => Ok(MapKind::Manifold),
        _ => Err(format!("unknown map `{s}`")),
    }
}

impl Command {
    pub fn from_name(name: &str) -> Option<Command> {
        Some(match name {
            "verify-exact" => Command::VerifyExact,
            "verify-bt" => Command::VerifyBt,
            "spectrum" => Command::Spectrum,
            "lift" => Command::Lift(MapArgs::default()),
            "descend" => Command::Descend(MapArgs::default()),
            "evolve" => Command::Evolve,
            "stability" => Command::Stability,
            "sweep" => Command::Sweep,
            _ => return None,
        })
    }
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    /// Text for standard output.
    pub stdout: String,
    /// Text for standard error.
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, msg: String) -> Self {
        Outcome { code, stdout: String::new(), stderr: msg }
    }
}

enum Failure {
    Config(String),
    Solver(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_)
            | Error::InvalidGrid(_)
            | Error::Cfl { .. }
            | Error::AsymmetricGrid
            | Error::LengthMismatch { .. }
            | Error::Parity { .. } => Failure::Config(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

/// Parses `x,first,second` data onto the grid spanned by its `x` column.
pub fn read_pair(path: &Path) -> Result<PerturbationPair, ConfigError> {
    let bad = |m: String| ConfigError::Input(format!("{}: {m}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["x", "first", "second"] {
        return Err(bad("expected header `x,first,second`".into()));
    }
    let (mut x, mut a, mut b) = (vec![], vec![], vec![]);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| rec[i].trim().parse::<f64>().map_err(|e| bad(format!("line {:?}: {e}", rec.position().map(|p| p.line()))));
        x.push(num(0)?);
        a.push(num(1)?);
        b.push(num(2)?);
    }
    if x.len() < 3 {
        return Err(bad("need at least three rows".into()));
    }
    let g = Grid::new(x[0], x[x.len() - 1], x.len()).map_err(|e| bad(e.to_string()))?;
    if x.iter().enumerate().any(|(i, &xi)| (xi - g.x(i)).abs() > 1e-9 * xi.abs().max(1.0)) {
        return Err(bad("x column is not uniformly spaced".into()));
    }
    PerturbationPair::new(g, a, b, ParityTag::None, 0.0).map_err(|e| bad(e.to_string()))
}

fn execute(cmd: &Command, cfg: &ExperimentConfig, s: &Settings) -> Result<Report, Failure> {
    Ok(match cmd {
        Command::VerifyExact => {
            let mut rep = ex::verify_exact(&cfg.exact, s)?;
            rep.tables.extend(ex::figure_tables()?);
            rep
        }
        Command::VerifyBt => ex::verify_bt(&cfg.bt, s)?,
        Command::Spectrum => ex::spectrum(&cfg.spectrum, s)?,
        Command::Lift(a) | Command::Descend(a) => {
            let mut o = cfg.lift.clone();
            if let Some(m) = a.map {
                o.map = m;
            }
            let input = a.input.as_deref().map(read_pair).transpose()?;
            if matches!(cmd, Command::Lift(_)) {
                ex::lift(&o, input, s)?
            } else {
                ex::descend(&o, input, s)?
            }
        }
        Command::Evolve => ex::evolve_solution(&cfg.evolve, s)?,
        Command::Stability => {
            let st = &cfg.stability;
            let mut rep = Report::new("stability experiments");
            for part in &st.parts {
                rep.merge(match part {
                    StabilityPart::Manifold => ex::manifold(&st.manifold, s)?,
                    StabilityPart::RoundTrips => ex::round_trips(&st.round_trips, s)?,
                    StabilityPart::Conservation => ex::conservation(&st.conservation, s)?,
                    StabilityPart::Wobbler => ex::wobbler_stability(&st.wobbler, s)?,
                    StabilityPart::Rates => ex::stability(&st.rates, s)?,
                    StabilityPart::Vacuum => ex::vacuum_decay(&st.vacuum, s)?,
                });
            }
            rep
        }
        Command::Sweep => ex::sweep(&cfg.sweep, s)?,
        Command::Run | Command::DefaultConfig => unreachable!("resolved before execution"),
    })
}

/// Runs one invocation end to end and returns the exit code with its output.
pub fn run(cli: &Cli) -> Outcome {
    let mut cfg = match &cli.config {
        Some(p) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => return Outcome::fail(exit::CONFIG, format!("error: {e}\n")),
        },
        None => ExperimentConfig::default(),
    };
    let cmd = match &cli.command {
        Command::DefaultConfig => {
            return Outcome { code: exit::PASS, stdout: ExperimentConfig::default().to_toml(), stderr: String::new() }
        }
        Command::Run => match cfg.experiment.as_deref().and_then(Command::from_name) {
            Some(c) => c,
            None => {
                return Outcome::fail(exit::CONFIG, format!("error: config names no runnable experiment ({:?})\n", cfg.experiment))
            }
        },
        c => c.clone(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    cfg.strict |= cli.strict;
    let out = cli.out.clone().or_else(|| cfg.out.clone());
    let exec = if cfg.workers == Some(1) { Exec::Sequential } else { Exec::Parallel };
    let settings = Settings { strict: cfg.strict, seed: cfg.seed, exec };

    let result = par::with_workers(cfg.workers, || execute(&cmd, &cfg, &settings));
    let rep = match result {
        Ok(r) => r,
        Err(Failure::Config(m)) => return Outcome::fail(exit::CONFIG, format!("configuration error: {m}\n")),
        Err(Failure::Solver(m)) => return Outcome::fail(exit::SOLVER, format!("solver failure: {m}\n")),
    };
    let mut stdout = output::render(&rep);
    if let Some(dir) = out {
        match output::write_bundle(&dir, &rep, cfg.seed, cfg.strict) {
            Ok(files) => stdout.push_str(&format!("  wrote {} files to {}\n", files.len(), dir.display())),
            Err(e) => return Outcome::fail(exit::SOLVER, format!("cannot write output to {}: {e}\n", dir.display())),
        }
    }
    let code = if rep.passed() { exit::PASS } else { exit::CHECK_FAILED };
    Outcome { code, stdout, stderr: String::new() }
}
