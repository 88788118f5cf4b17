use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crossdiff::config::{self, load_config, parse_config, SimulationConfig, Solver};
use crossdiff::driver::{run_config, sweep_delta, validate_barenblatt, write_outputs, RunSummary};
use crossdiff::output::Num;
use crossdiff::Error;

/// Segregated two-species cross-diffusion: Eulerian solver, Lagrangian
/// front tracker and closed-form checks.
#[derive(Parser)]
#[command(name = "crossdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file end to end.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output.dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two bumps, equal diffusivities a1 = a2 = 1.
    Exp1 {
        #[arg(long, default_value = "out/exp1")]
        out: PathBuf,
    },
    /// Two bumps, diffusivities a1 = 1, a2 = 3.
    Exp2 {
        #[arg(long, default_value = "out/exp2")]
        out: PathBuf,
    },
    /// Single-species porous-medium run against the Barenblatt profile.
    ValidateBarenblatt {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1e-5)]
        tau: f64,
        #[arg(long, default_value_t = 0.5)]
        t_final: f64,
    },
    /// Lagrangian tracker run; writes the interface trajectory.
    Front {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a run for each δ and tabulate the interface diagnostics.
    SweepDelta {
        /// Comma-separated δ values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        config: PathBuf,
    },
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |v| format!("{v:.6e}"))
}

fn report(summary: &RunSummary, files: &[PathBuf]) {
    println!("{:>10}  {:>13}  {:>13}  {:>13}  {:>13}", "t", "mass1", "mass2", "contact", "grad jump");
    for s in &summary.snapshots {
        println!(
            "{:>10.6}  {:>13.6e}  {:>13.6e}  {:>13}  {:>13}",
            s.t,
            s.mass1,
            s.mass2,
            fmt_opt(s.contact_point),
            fmt_opt(s.gradient_jump)
        );
    }
    if let Some(k) = summary.max_iterations {
        println!("max fixed-point iterations per step: {k}");
    }
    if let Some(last) = summary.trajectory.as_ref().and_then(|t| t.last()) {
        println!("final interface: t = {}, eta = {}", last.0, last.1);
    }
    println!("wrote {} files", files.len());
}

fn execute(config: &SimulationConfig, out: &Path) -> crossdiff::Result<()> {
    let summary = run_config(config)?;
    let files = write_outputs(&summary, out)?;
    report(&summary, &files);
    Ok(())
}

fn dispatch(command: Command) -> crossdiff::Result<()> {
    match command {
        Command::Run { config, out } => {
            let c = load_config(&config)?;
            let out = out.unwrap_or_else(|| c.output.dir.clone());
            execute(&c, &out)
        }
        Command::Exp1 { out } => execute(&parse_config(config::EXP1)?, &out),
        Command::Exp2 { out } => execute(&parse_config(config::EXP2)?, &out),
        Command::ValidateBarenblatt { n, tau, t_final } => {
            let err = validate_barenblatt(n, tau, t_final)?;
            println!("n = {n}, tau = {tau:e}, t = {t_final}: Linf error = {err:.6e}");
            Ok(())
        }
        Command::Front { config, out } => {
            let mut c = load_config(&config)?;
            c.solver = Solver::FrontTrack;
            let out = out.unwrap_or_else(|| c.output.dir.clone());
            execute(&c, &out)
        }
        Command::SweepDelta { values, config } => {
            if let Some(d) = values.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
                return Err(Error::Validation {
                    key: "values".into(),
                    message: format!("δ must be finite and ≥ 0, got {d}"),
                });
            }
            let c = load_config(&config)?;
            let rows = sweep_delta(&c, &values)?;
            println!("delta,t,contact_point,gradient_jump,segregation_defect");
            for r in rows {
                println!(
                    "{},{},{},{},{}",
                    Num(r.delta),
                    Num(r.t),
                    r.contact_point.map_or("none".into(), |v| Num(v).to_string()),
                    r.gradient_jump.map_or("none".into(), |v| Num(v).to_string()),
                    Num(r.segregation_defect)
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
