use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polgrad::scan::{parse_scenario, run_scan, run_scan_with_threads, Units};

#[derive(Parser)]
#[command(name = "polgrad", version, about = "Polarization-gradient force scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the force on a grid of positions and velocities.
    Scan {
        scenario: PathBuf,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_enum, default_value_t = UnitsArg::Natural)]
        units: UnitsArg,
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        threads: Option<u16>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitsArg {
    Natural,
    Si,
}

fn main() -> ExitCode {
    let Command::Scan {
        scenario,
        out,
        format: Format::Csv,
        units,
        threads,
    } = match Cli::try_parse() {
        Ok(cli) => cli.command,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let units = match units {
        UnitsArg::Natural => Units::Natural,
        UnitsArg::Si => Units::Si,
    };

    let text = match fs::read_to_string(&scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", scenario.display());
            return ExitCode::from(1);
        }
    };
    let parsed = match parse_scenario(&text) {
        Ok(s) => s,
        Err(errors) => {
            for e in &errors.0 {
                eprintln!("error: {e}");
            }
            return ExitCode::from(1);
        }
    };
    let table = match threads {
        Some(n) => match run_scan_with_threads(&parsed, units, n.into()) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => run_scan(&parsed, units),
    };

    let written = match &out {
        Some(path) => fs::File::create(path)
            .and_then(|f| table.write_csv(io::BufWriter::new(f))),
        None => {
            let stdout = io::stdout().lock();
            let mut w = io::BufWriter::new(stdout);
            table.write_csv(&mut w).and_then(|_| w.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }

    let failed = table.failed_rows();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed; see the error column", table.rows.len());
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
