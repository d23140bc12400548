//! Runs a scenario file and prints the CSV table.
//!
//!     cargo run --example scan -- scenarios/sigma_plus_minus.toml

use std::io;

use polgrad::scan::{parse_scenario, run_scan, Units};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/lin_perp_lin.toml").into());
    let scenario = parse_scenario(&std::fs::read_to_string(&path)?)?;
    let table = run_scan(&scenario, Units::Natural);
    eprintln!(
        "{}: {} rows, {} failed",
        scenario.configuration.name(),
        table.rows.len(),
        table.failed_rows()
    );
    table.write_csv(io::stdout().lock())?;
    Ok(())
}
