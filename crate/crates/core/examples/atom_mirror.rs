//! An atom between a single incoming beam and a mirror, solved
//! self-consistently. A quarter-wave plate in front of the mirror turns the
//! returning light into the orthogonal polarization.

use std::f64::consts::PI;

use polgrad::atom::LevelScheme;
use polgrad::force::force_from_modes;
use polgrad::jones::{JonesVector, C64};
use polgrad::optics::{solve_system, Element, SolveOptions};

fn main() -> polgrad::error::Result<()> {
    let k = 1.0;
    let scheme = LevelScheme::half_to_three_halves(C64::new(0.01, 0.0), C64::new(0.0, 0.0));
    let b = JonesVector::linear(C64::new(1.0, 0.0), C64::new(0.0, 0.0), k);
    let c = JonesVector::zero(k);

    println!("{:>8} {:>8} {:>8} {:>13} {:>6}", "kx", "Pi_-", "Pi_+", "F", "iter");
    for i in 0..8 {
        let x = PI / 8.0 * i as f64 / k;
        let elements = [
            Element::atom(x),
            Element::waveplate(PI / 2.0, PI / 4.0, 8.0 / k),
            Element::perfect_mirror(9.0 / k),
        ];
        let s = solve_system(&elements, &b, &c, &scheme, &SolveOptions::default())?;
        println!(
            "{:>8.4} {:>8.4} {:>8.4} {:>13.5e} {:>6}",
            k * x,
            s.rho.population(0),
            s.rho.population(1),
            force_from_modes(&s.atom_modes)?,
            s.iterations
        );
    }
    Ok(())
}
