use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gwsim::cli::{self, Command, Format, ModelKind, Overrides};
use gwsim::models::Mode;
use gwsim::spacetime::FrameName;

/// Wigner's-friend GHZ scenario simulator.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Sub,

    /// TOML scenario file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "R")]
    side: Option<f64>,
    #[arg(long, global = true, value_name = "R")]
    tau: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,
    /// Master seed (falls back to GWSIM_SEED).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// round_born or sequential_collapse.
    #[arg(long, global = true, value_parser = parse::<Mode>)]
    mode: Option<Mode>,
    /// sigma, sigma_p, sigma_pp or sigma_ppp.
    #[arg(long, global = true, value_name = "NAME", value_parser = parse::<FrameName>)]
    preferred: Option<FrameName>,
    /// ideal or random:SEED.
    #[arg(long, global = true, value_parser = parse::<ModelKind>)]
    model: Option<ModelKind>,
    /// json or text.
    #[arg(long, global = true, value_parser = parse::<Format>)]
    format: Option<Format>,
    /// Leave out constraint K (1-4) in ghz-nogo.
    #[arg(long, global = true, value_name = "K")]
    drop_constraint: Option<usize>,
    /// Skip the J measurement in erasure.
    #[arg(long, global = true)]
    skip_j: bool,
    /// Number of random measurement models in sweep.
    #[arg(long, global = true, value_name = "N")]
    models: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Support tables and hidden-variable enumeration for the bare GHZ state.
    GhzNogo,
    /// Door versus J statistics on the unitary and collapsed lab states.
    Distinguish,
    /// Geometry checks, boost velocities and per-frame event orderings.
    Frames,
    /// Frame-ordered constraints plus a Monte Carlo interpretation run.
    Run,
    /// J measurement followed by opening the door.
    Erasure,
    /// Repeat the derivation with Haar-random measurement unitaries.
    Sweep,
}

fn parse<T: std::str::FromStr<Err = gwsim::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: gwsim::Error| e.to_string())
}

fn run(args: Args) -> gwsim::Result<bool> {
    let file = args.config.as_deref().map(cli::load_config).transpose()?;
    let overrides = Overrides {
        side: args.side,
        tau: args.tau,
        trials: args.trials,
        seed: args.seed,
        mode: args.mode,
        preferred: args.preferred,
        model: args.model,
        format: args.format,
        drop_constraint: args.drop_constraint,
        skip_j: args.skip_j,
        models: args.models,
    };
    let env_seed = std::env::var(cli::SEED_ENV).ok();
    let config = cli::resolve_config(file, &overrides, env_seed.as_deref())?;
    let command = match args.command {
        Sub::GhzNogo => Command::GhzNogo,
        Sub::Distinguish => Command::Distinguish,
        Sub::Frames => Command::Frames,
        Sub::Run => Command::Run,
        Sub::Erasure => Command::Erasure,
        Sub::Sweep => Command::Sweep,
    };
    let report = cli::execute(command, &config)?;
    let text = cli::render(&report, config.output.format)?;
    match &config.output.path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    for name in report.failed_checks() {
        eprintln!("check failed: {name}");
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
