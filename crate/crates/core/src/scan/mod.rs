//! Force scans over atom position and velocity, written as CSV.
//!
//! Grids are dimensionless: positions are `k x` and velocities `k v tau_p`.
//! In [`Units::Natural`] every scenario value is taken as is with
//! `hbar = c = 1`. In [`Units::Si`] the scenario is read in SI (`k` in rad/m,
//! `tau_p` in s, `|B|^2` in photons/s, `dzeta0/dk` in m) and the table reports
//! metres, metres per second and newtons.

mod scenario;

use std::io::{self, Write};

use rayon::prelude::*;

pub use scenario::{
    parse_scenario, Configuration, Grid, Polarization, Scenario, ValidationErrors, SCHEMA_VERSION,
};

use crate::atom::GroundDensityMatrix;
use crate::beams::CounterPropagatingBeams;
use crate::bloch::PumpingParameters;
use crate::error::Result;
use crate::force::{moving_atom_force, profile_force, ForceResult};
use crate::jones::{JonesVector, C64};
use crate::optics::{Element, System, SystemProfile};

/// `hbar` in J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light in m/s.
pub const C_SI: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Natural,
    Si,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Natural => "natural",
            Units::Si => "si",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowValues {
    pub force: ForceResult,
    pub populations: Vec<f64>,
    /// `<last|rho|first>`, e.g. `<+1|rho|-1>` for `J = 1`.
    pub coherence: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub kx: f64,
    pub kv_tau: f64,
    /// Position in output units.
    pub x: f64,
    /// Velocity in output units.
    pub v: f64,
    pub result: std::result::Result<RowValues, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub source_hash: String,
    pub units: Units,
    /// Ground sublevel labels, lowest `m` first.
    pub sublevels: Vec<String>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.result.is_err()).count()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["kx", "kv_tau", "x", "v", "total", "position_term", "friction_term"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend(self.sublevels.iter().map(|m| format!("pop_m={m}")));
        h.extend(["coherence_re", "coherence_im", "error"].map(String::from));
        h
    }

    /// Comment line, header, then one line per row. Numbers carry 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# polgrad scan; scenario sha256={}; units={}",
            self.source_hash,
            self.units.name()
        )?;
        writeln!(out, "{}", self.header().join(","))?;
        let n_pop = self.sublevels.len();
        for row in &self.rows {
            let mut fields = vec![num(row.kx), num(row.kv_tau), num(row.x), num(row.v)];
            match &row.result {
                Ok(v) => {
                    fields.extend([v.force.total, v.force.position_term, v.force.friction_term].map(num));
                    fields.extend(v.populations.iter().map(|p| num(*p)));
                    fields.extend([num(v.coherence.re), num(v.coherence.im), String::new()]);
                }
                Err(e) => {
                    fields.extend(std::iter::repeat_n(String::new(), 5 + n_pop));
                    fields.push(quote(e));
                }
            }
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Evaluates every `(x, v)` grid point, x-major. Rows run in parallel on the
/// current rayon pool; the output order never depends on scheduling.
pub fn run_scan(s: &Scenario, units: Units) -> ScanTable {
    let points: Vec<(f64, f64)> = s
        .x_grid
        .values
        .iter()
        .flat_map(|&kx| s.v_grid.values.iter().map(move |&g| (kx, g)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(kx, g)| evaluate_row(s, units, kx, g))
        .collect();
    ScanTable {
        source_hash: s.source_hash.clone(),
        units,
        sublevels: (0..s.scheme.n_ground())
            .map(|i| s.scheme.ground_m(i).to_string())
            .collect(),
        rows,
    }
}

/// Same as [`run_scan`] on a dedicated pool of `threads` workers.
pub fn run_scan_with_threads(s: &Scenario, units: Units, threads: usize) -> Result<ScanTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::error::Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(|| run_scan(s, units)))
}

fn evaluate_row(s: &Scenario, units: Units, kx: f64, g: f64) -> ScanRow {
    let x = kx / s.k;
    let v_out = g / (s.k * s.tau_p);
    let (v, tau, force_scale) = match units {
        Units::Natural => (v_out, s.tau_p, 1.0),
        Units::Si => (v_out / C_SI, s.tau_p * C_SI, HBAR_SI),
    };
    let result = row_values(s, x, v, tau)
        .map(|(f, rho)| RowValues {
            force: ForceResult::new(f.position_term * force_scale, f.friction_term * force_scale),
            populations: rho.populations(),
            coherence: rho.coherence(rho.dim() - 1, 0),
        })
        .map_err(|e| e.to_string());
    ScanRow {
        kx,
        kv_tau: g,
        x,
        v: v_out,
        result,
    }
}

fn row_values(s: &Scenario, x: f64, v: f64, tau: f64) -> Result<(ForceResult, GroundDensityMatrix)> {
    let params = PumpingParameters::new(tau, v)?;
    match &s.configuration {
        Configuration::LinPerpLin => {
            let beams = CounterPropagatingBeams::lin_perp_lin(s.amplitude, s.k)?;
            moving_atom_force(&s.scheme, &beams, &params, x)
        }
        Configuration::SigmaPlusMinus => {
            let beams = CounterPropagatingBeams::sigma_plus_minus(s.amplitude, s.k)?;
            moving_atom_force(&s.scheme, &beams, &params, x)
        }
        Configuration::Custom {
            elements,
            left,
            right,
            solver,
        } => {
            let mut all = elements.clone();
            all.insert(
                all.partition_point(|e| e.position < x),
                Element::atom(x),
            );
            let system = System::new(all)?;
            let beam = |p: Polarization| {
                let (ex, ey) = p.lab_components();
                JonesVector::linear(ex * s.amplitude, ey * s.amplitude, s.k).to_circular()
            };
            let profile = SystemProfile {
                system,
                b_in: beam(*left),
                c_in: beam(*right),
                scheme: s.scheme.clone(),
                options: solver.clone(),
            };
            profile_force(&s.scheme, &profile, &params, x, |x| profile.local_beams(x))
        }
    }
}
