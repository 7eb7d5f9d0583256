use clap::{Parser, Subcommand};
use persuade_lab_cli::commands::{COUNTEREXAMPLE_SCENARIO, EXIT_INVALID};
use persuade_lab_cli::{
    parse_scenario, parse_scenario_str, run_command, Command, Format, Scenario,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Persuasion thresholds, dictatorship equilibria and mechanism audits for
/// committees facing a lobbyist.
#[derive(Parser)]
#[command(name = "persuade-lab", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Persuasion thresholds and indifference belief of every member.
    Thresholds { scenario: PathBuf },
    /// Equilibrium of one member's dictatorship.
    Dictatorship {
        scenario: PathBuf,
        /// Member number, starting at 1.
        #[arg(long)]
        member: usize,
        /// Write (r, zeta, zeta_hat) rows as CSV to this file.
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Compare the most-demanding member's dictatorship with every mechanism.
    Audit {
        scenario: PathBuf,
        /// Interim beliefs checked above the benchmark threshold.
        #[arg(long, default_value_t = 1001)]
        r_grid: usize,
        /// Random deviations per interim belief.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Informativeness order between two menu entries.
    Blackwell {
        scenario: PathBuf,
        /// Menu entry number, starting at 1.
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    /// Best menu entry for the lobbyist under each dictatorship.
    Constrained { scenario: PathBuf },
    /// Check the restricted-menu example against its known values.
    /// Uses the bundled scenario when none is given.
    Counterexample { scenario: Option<PathBuf> },
    /// Audit over a range of one parameter: prior, uN or alphaN.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 201)]
        r_grid: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("PERSUADE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("PERSUADE_LAB_THREADS={raw} is not a thread count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn split(cmd: Cmd) -> (Option<PathBuf>, Command) {
    match cmd {
        Cmd::Thresholds { scenario } => (Some(scenario), Command::Thresholds),
        Cmd::Dictatorship {
            scenario,
            member,
            emit_plot,
        } => (Some(scenario), Command::Dictatorship { member, emit_plot }),
        Cmd::Audit {
            scenario,
            r_grid,
            samples,
        } => (Some(scenario), Command::Audit { r_grid, samples }),
        Cmd::Blackwell { scenario, a, b } => (Some(scenario), Command::Blackwell { a, b }),
        Cmd::Constrained { scenario } => (Some(scenario), Command::Constrained),
        Cmd::Counterexample { scenario } => (scenario, Command::Counterexample),
        Cmd::Sweep {
            scenario,
            param,
            from,
            to,
            steps,
            r_grid,
            samples,
        } => (
            Some(scenario),
            Command::Sweep {
                param,
                from,
                to,
                steps,
                r_grid,
                samples,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    let (path, command) = split(cli.command);
    let scenario: Result<Scenario, _> = match &path {
        Some(p) => parse_scenario(p),
        None => parse_scenario_str(COUNTEREXAMPLE_SCENARIO, "counterexample"),
    };
    let result = scenario
        .map_err(Into::into)
        .and_then(|s| run_command(&command, &s, cli.format));
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
