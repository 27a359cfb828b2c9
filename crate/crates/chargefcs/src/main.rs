use std::path::PathBuf;
use std::process::ExitCode;

use chargefcs::acceptance::{run_criterion, EXPECTED_RED};
use chargefcs::config::load_spec;
use chargefcs::engines::quantities;
use chargefcs::figures::{figure_dataset, FIGURES};
use chargefcs::table::{COLUMNS, SCHEMA_VERSION};
use chargefcs::{run_spec, CliError, CliResult, EngineKind, Pool};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chargefcs", version, about = "Charge-transfer counting statistics in U(1) random circuits")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Overrides the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs an experiment spec (or re-runs a manifest).
    Run { spec: PathBuf },
    /// Writes the tidy CSV bundle of one figure panel.
    Figure {
        /// fig1b, fig2a, fig2b, fig2c, figS1, figS2, or `all`.
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Runs the acceptance suite (optionally only the listed checks).
    Verify { ids: Vec<u8> },
    /// Describes the CSV columns and the quantities an engine emits.
    Schema { engine: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Run { spec } => {
            let mut s = load_spec(&spec)?;
            if let Some(seed) = cli.seed {
                s.params.seed = seed;
            }
            let pool = Pool::new(cli.threads)?;
            let report = run_spec(s, Some(&spec), &pool)?;
            println!("wrote {}", report.csv_path.display());
            println!("wrote {}", report.manifest_path.display());
            Ok(0)
        }
        Command::Figure { name, out } => {
            let pool = Pool::new(cli.threads)?;
            let names: Vec<&str> = if name == "all" { FIGURES.to_vec() } else { vec![name.as_str()] };
            for n in names {
                let (csv, _) = figure_dataset(n, &out, cli.seed.unwrap_or(0), &pool)?;
                println!("wrote {}", csv.display());
            }
            Ok(0)
        }
        Command::Verify { ids } => {
            let pool = Pool::new(cli.threads)?;
            let ids = if ids.is_empty() { (1..=9).collect() } else { ids };
            if let Some(bad) = ids.iter().find(|&&i| !(1..=9).contains(&i)) {
                return Err(CliError::config(format!("no acceptance check {bad}")));
            }
            let mut unexpected = false;
            for id in ids {
                let o = run_criterion(id, &pool);
                println!("{}", o.line());
                unexpected |= !o.passed && !EXPECTED_RED.contains(&id);
            }
            Ok(u8::from(unexpected))
        }
        Command::Schema { engine } => {
            let e = EngineKind::parse(&engine)?;
            println!("schema version {SCHEMA_VERSION}");
            println!("columns: {}", COLUMNS.join(","));
            println!("quantities emitted by {e}:");
            for (q, what) in quantities(e) {
                println!("  {q:<28} {what}");
            }
            Ok(0)
        }
    }
}
