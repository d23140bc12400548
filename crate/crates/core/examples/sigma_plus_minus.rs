//! J = 1 -> 2 atom in sigma+ sigma- beams: ground state and force.

use std::f64::consts::PI;

use polgrad::atom::{HalfInt, LevelScheme};
use polgrad::beams::CounterPropagatingBeams;
use polgrad::bloch::{populations_along, steady_state, FieldProfile};
use polgrad::force::sigma_force;
use polgrad::jones::C64;

fn main() -> polgrad::error::Result<()> {
    let k = 1.0;
    let scheme = LevelScheme::one_to_two(C64::new(1e-4, 0.0), C64::new(0.0, 0.5));
    let beams = CounterPropagatingBeams::sigma_plus_minus(1.0, k)?;

    println!("{:>6} {:>22} {:>22} {:>10}", "kx", "Pi(-1, 0, +1) circular", "along polarization", "|C|");
    for i in 0..4 {
        let x = PI / 8.0 * i as f64;
        let rho = steady_state(&scheme, &beams.field_at(x)?)?;
        let local = populations_along(&rho, HalfInt::ONE, PI / 2.0, PI / 2.0 - k * x);
        let p = rho.populations();
        println!(
            "{:>6.3} {:>6.4} {:>6.4} {:>6.4}   {:>6.4} {:>6.4} {:>6.4} {:>10.5}",
            k * x,
            p[0],
            p[1],
            p[2],
            local[0],
            local[1],
            local[2],
            rho.coherence(2, 0).norm()
        );
    }
    println!("(9/17 = {:.4}, 4/17 = {:.4}, 13/34 = {:.4})", 9.0 / 17.0, 4.0 / 17.0, 13.0 / 34.0);

    let rho = steady_state(&scheme, &beams.field_at(0.0)?)?;
    for v in [0.0, 0.01, -0.01] {
        let f = sigma_force(0.0, v, &scheme, &rho, 1.0, k)?;
        println!("v = {v:>5}: F = {:.5e} (friction {:.5e})", f.total, f.friction_term);
    }
    Ok(())
}
