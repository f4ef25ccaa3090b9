use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eulerdiag::criteria::SyntheticOptions;
use eulerdiag::io::{
    cmd_diagnose, cmd_particles, cmd_simulate_file, cmd_synthetic, to_json, DiagnoseArgs,
    SyntheticArgs, EXIT_ERROR, EXIT_OK, EXIT_VIOLATION,
};
use eulerdiag::Result;

/// Periodic-box Euler solver and pressure-Hessian blow-up diagnostics.
#[derive(Parser)]
#[command(name = "eulerdiag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver described by a key = value config file.
    Simulate { config: PathBuf },
    /// Evaluate the criteria on a norm series CSV and print the report.
    Diagnose {
        series: PathBuf,
        /// Restrict to ball column set `i` instead of the global norms.
        #[arg(long)]
        ball: Option<usize>,
        /// Integration window `a,b`.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(f64, f64)>,
        /// Reference time for the type-one rate.
        #[arg(long = "t-ref")]
        t_ref: Option<f64>,
    },
    /// Quadrature of the model profile `(T - t)^(-eta)` under cut refinement.
    Synthetic {
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long = "T", allow_hyphen_values = true)]
        t_end: f64,
        /// Number of cut halvings.
        #[arg(long, default_value_t = 20)]
        cuts: usize,
        /// Largest cut; defaults to 1% of the window.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        nodes_per_efold: usize,
        /// Also write a log-log chart of the functional against the cut.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Replay a finished run from its checkpoints and write residual tables.
    Particles { run_dir: PathBuf },
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate { config } => {
            let out = cmd_simulate_file(&config)?;
            println!("{}", to_json(&out.summary)?);
            if let Some(reason) = &out.manifest.abort_reason {
                eprintln!("run aborted: {reason}");
                return Ok(EXIT_ERROR);
            }
            let violated = out
                .summary
                .particles
                .as_ref()
                .is_some_and(|p| p.gronwall.violations > 0);
            Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
        }
        Command::Diagnose {
            series,
            ball,
            window,
            t_ref,
        } => {
            let out = cmd_diagnose(&series, &DiagnoseArgs { ball, window, t_ref })?;
            println!("{}", to_json(&out.report)?);
            for v in &out.report.violations {
                eprintln!("violation: {v}");
            }
            Ok(out.exit_code)
        }
        Command::Synthetic {
            eta,
            t0,
            t_end,
            cuts,
            eps,
            nodes_per_efold,
            svg,
        } => {
            let args = SyntheticArgs {
                eta,
                t0,
                t_end,
                eps_cut: eps,
                options: SyntheticOptions {
                    halvings: cuts,
                    nodes_per_efold,
                },
            };
            let report = cmd_synthetic(&args, svg.as_deref())?;
            println!("{}", to_json(&report)?);
            Ok(EXIT_OK)
        }
        Command::Particles { run_dir } => {
            let out = cmd_particles(&run_dir)?;
            println!("{}", to_json(&out.summary)?);
            Ok(if out.summary.gronwall.violations > 0 {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            })
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
