use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rcotto::sweep::{
    self, parse_config, parse_sweep_config, parse_variants, SweepParam, SweepSpec, Variant,
    CSV_HEADER, EXIT_CONFIG, EXIT_OK, EXIT_UNCONVERGED,
};
use rcotto::Error;

#[derive(Parser)]
#[command(name = "rcotto", version, about = "Quantum Otto cycle of a two-level system at arbitrary reservoir coupling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one cycle and print a CSV row.
    Cycle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        allow_unconverged: bool,
    },
    /// Sweep one parameter over a uniform grid and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// epsilon_h, delta_h, alpha or beta_c
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Comma-separated coupling:stroke:decoupling triples; defaults to the config's modes.
        #[arg(long)]
        variants: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        allow_unconverged: bool,
    },
    /// Tabulate the cycle against the Fock truncation n = 5, 10, ..., n_max.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n_max: usize,
        /// Write CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_unconverged: bool,
    },
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("rcotto: {err}");
    ExitCode::from(sweep::exit_code(err))
}

fn unconverged(allowed: bool, what: &str) -> ExitCode {
    if allowed {
        ExitCode::from(EXIT_OK)
    } else {
        eprintln!("rcotto: {what} (pass --allow-unconverged to accept)");
        ExitCode::from(EXIT_UNCONVERGED)
    }
}

fn cycle(config: PathBuf, allow_unconverged: bool) -> Result<ExitCode, Error> {
    let cfg = parse_config(&config)?;
    let (_, row) = sweep::run_cycle(&cfg)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{CSV_HEADER}\n{}", row.to_csv())?;
    Ok(if row.converged {
        ExitCode::from(EXIT_OK)
    } else {
        unconverged(allow_unconverged, "Fock truncation not converged")
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_cmd(
    config: PathBuf,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
    variants: Option<String>,
    out: PathBuf,
    threads: Option<usize>,
    allow_unconverged: bool,
) -> Result<ExitCode, Error> {
    let param: SweepParam = param.parse()?;
    let base = parse_sweep_config(&config, param, from)?;
    let variants: Vec<Variant> = match variants {
        Some(list) => parse_variants(&list)?,
        None => vec![Variant::of(&base)],
    };
    let spec = SweepSpec {
        param,
        from,
        to,
        steps,
        base,
        variants,
    };
    let summary = sweep::run_sweep(&spec, &out, threads)?;
    Ok(if summary.unconverged == 0 {
        ExitCode::from(EXIT_OK)
    } else {
        unconverged(
            allow_unconverged,
            &format!("{} of {} rows not converged", summary.unconverged, summary.rows),
        )
    })
}

fn converge(config: PathBuf, n_max: usize, out: Option<PathBuf>, allow_unconverged: bool) -> Result<ExitCode, Error> {
    let cfg = parse_config(&config)?;
    let rows = sweep::run_converge(&cfg, n_max)?;
    let csv = sweep::render_converge_csv(&rows);
    match out {
        Some(path) => std::fs::write(&path, csv)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(match rows.last() {
        Some(last) if last.converged() => ExitCode::from(EXIT_OK),
        _ => unconverged(allow_unconverged, &format!("not converged by n = {n_max}")),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::from(EXIT_OK)
            };
        }
    };
    let result = match cli.command {
        Command::Cycle {
            config,
            allow_unconverged,
        } => cycle(config, allow_unconverged),
        Command::Sweep {
            config,
            param,
            from,
            to,
            steps,
            variants,
            out,
            threads,
            allow_unconverged,
        } => sweep_cmd(config, &param, from, to, steps, variants, out, threads, allow_unconverged),
        Command::Converge {
            config,
            n_max,
            out,
            allow_unconverged,
        } => converge(config, n_max, out, allow_unconverged),
    };
    result.unwrap_or_else(|e| fail(&e))
}
