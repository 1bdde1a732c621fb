use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinbath::harness::fit::fit_from_csv;
use spinbath::harness::max_oracle_deviation;
use spinbath::harness::sampling::OmegaDist;
use spinbath::harness::sweep::{
    run_sweep, run_sweep_to_file, InitialState, Observable, Scenario, SweepConfig, TimeGrid,
};
use spinbath::{make_bell_state, Error};

/// Largest analytic-vs-brute-force deviation `oracle-check` accepts.
const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "spinbath", version, about = "Entangled spin pair dephasing in spin baths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a time sweep and write CSV (plus a `.meta.toml` sidecar).
    Sweep(SweepArgs),
    /// Compare analytic reduced states with the brute-force partial trace.
    OracleCheck(OracleArgs),
    /// Fit a Gaussian envelope to a factor column of a sweep CSV.
    Fit(FitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    TwoBath,
    Common,
    OneCoupled,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::TwoBath => Scenario::TwoBath,
            ScenarioArg::Common => Scenario::CommonBath,
            ScenarioArg::OneCoupled => Scenario::OneCoupled,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long)]
    bell: Option<u8>,
    #[arg(long)]
    n_spins: Option<usize>,
    /// `uniform:LO,HI`, `gaussian:MEAN,SD` or `constant:VALUE`.
    #[arg(long)]
    omega_dist: Option<String>,
    /// As `--omega-dist`, or `equal` for ω₂ₖ = ω₁ₖ (common bath only).
    #[arg(long)]
    omega2_dist: Option<String>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of factors,concurrence,entropy,chsh,gaussian-fit.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    /// Output CSV path; stdout when omitted (no sidecar is written then).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "two-bath")]
    scenario: ScenarioArg,
    /// Spins per bath.
    #[arg(long, default_value_t = 4)]
    n_spins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check a single Bell state instead of all four.
    #[arg(long)]
    bell: Option<u8>,
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
}

#[derive(Args)]
struct FitArgs {
    /// Sweep CSV to read.
    #[arg(long)]
    input: PathBuf,
    /// Factor column stem: r1, r2, r12p or r12m.
    #[arg(long, default_value = "r1")]
    factor: String,
    /// Trial label to fit (a trial number or `mean`).
    #[arg(long, default_value = "0")]
    trial: String,
}

fn parse_output(s: &str) -> Result<Observable, Error> {
    Ok(match s.trim() {
        "factors" => Observable::Factors,
        "concurrence" => Observable::Concurrence,
        "entropy" => Observable::Entropy,
        "chsh" => Observable::Chsh,
        "gaussian-fit" => Observable::GaussianFit,
        other => return Err(Error::InvalidArgument(format!("unknown output {other:?}"))),
    })
}

fn sweep_config(args: &SweepArgs) -> anyhow::Result<SweepConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?
        }
        None => SweepConfig::default(),
    };
    if let Some(s) = args.scenario {
        cfg.scenario = s.into();
    }
    if let Some(b) = args.bell {
        cfg.initial_state = InitialState::Bell(b);
    }
    if let Some(n) = args.n_spins {
        cfg.bath.n_spins = n;
    }
    if let Some(d) = &args.omega_dist {
        cfg.bath.omega_dist = d.parse::<OmegaDist>()?;
    }
    if let Some(d) = &args.omega2_dist {
        cfg.bath.omega2_dist = d.parse::<OmegaDist>()?;
    }
    if let Some(t) = args.t_max {
        cfg.time_grid.stop = t;
    }
    if let Some(n) = args.steps {
        cfg.time_grid.steps = n;
    }
    if let Some(n) = args.trials {
        cfg.n_trials = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(outs) = &args.outputs {
        cfg.outputs = outs.iter().map(|s| parse_output(s)).collect::<Result<_, _>>()?;
    }
    Ok(cfg)
}

fn sweep(args: SweepArgs) -> anyhow::Result<()> {
    let cfg = sweep_config(&args)?;
    match &args.out {
        Some(path) => {
            let table = run_sweep_to_file(&cfg, path)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => run_sweep(&cfg)?.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn oracle_check(args: OracleArgs) -> anyhow::Result<()> {
    let cfg = SweepConfig {
        scenario: args.scenario.into(),
        time_grid: TimeGrid {
            start: 0.0,
            stop: args.t_max,
            steps: args.steps,
        },
        seed: args.seed,
        ..SweepConfig::default()
    };
    let mut cfg = cfg;
    cfg.bath.n_spins = args.n_spins;
    cfg.validate()?;
    let env = cfg.environment(0)?;
    let times = cfg.time_grid.points();
    let states: Vec<u8> = match args.bell {
        Some(b) => vec![b],
        None => vec![1, 2, 3, 4],
    };
    let mut worst: f64 = 0.0;
    for b in states {
        let dev = max_oracle_deviation(&make_bell_state(b)?, &env, &times)?;
        println!("bell {b}: max entrywise deviation {dev:e}");
        worst = worst.max(dev);
    }
    println!("max entrywise deviation {worst:e}");
    if worst > ORACLE_TOLERANCE {
        return Err(Error::InternalConsistency(format!(
            "analytic and brute-force states differ by {worst:e} (> {ORACLE_TOLERANCE:e})"
        ))
        .into());
    }
    Ok(())
}

fn fit(args: FitArgs) -> anyhow::Result<()> {
    let file = std::fs::File::open(&args.input)?;
    let fit = fit_from_csv(file, &args.factor, &args.trial)?;
    println!("a_hat = {}", fit.a_hat);
    println!("max_residual = {}", fit.max_residual);
    println!("points = {}", fit.points);
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidArgument(_)) | Some(Error::ResourceLimit(_)) => 2,
        Some(Error::InternalConsistency(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::OracleCheck(a) => oracle_check(a),
        Command::Fit(a) => fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
