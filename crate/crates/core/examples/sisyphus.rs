//! Sisyphus force on a J = 1/2 -> 3/2 atom in lin-perp-lin beams: full
//! pipeline against the closed form.

use std::f64::consts::PI;

use polgrad::atom::LevelScheme;
use polgrad::beams::CounterPropagatingBeams;
use polgrad::bloch::PumpingParameters;
use polgrad::force::{moving_atom_force, sisyphus_force};
use polgrad::jones::C64;

fn main() -> polgrad::error::Result<()> {
    let (k, tau_p, zeta0) = (1.0, 1.0, 1e-4);
    let scheme = LevelScheme::half_to_three_halves(C64::new(zeta0, 0.0), C64::new(0.0, 0.0));
    let beams = CounterPropagatingBeams::lin_perp_lin(1.0, k)?;

    for kv_tau in [0.0, 0.05] {
        let v = kv_tau / (k * tau_p);
        let params = PumpingParameters::new(tau_p, v)?;
        println!("k v tau_p = {kv_tau}");
        println!("{:>8} {:>13} {:>13} {:>8}", "kx", "F", "closed form", "Pi_-");
        for i in 0..=8 {
            let x = PI / 8.0 * i as f64 / k;
            let (f, rho) = moving_atom_force(&scheme, &beams, &params, x)?;
            let closed = sisyphus_force(x, v, zeta0, 1.0, k, tau_p);
            println!(
                "{:>8.4} {:>13.5e} {:>13.5e} {:>8.4}",
                k * x,
                f.total,
                closed.total,
                rho.population(0)
            );
        }
        println!();
    }

    // friction averaged over a wavelength: -(4/3) k^2 zeta0 v tau_p
    let v = 0.01;
    let params = PumpingParameters::new(tau_p, v)?;
    let n = 256;
    let mut mean = 0.0;
    for i in 0..n {
        let x = PI * i as f64 / (n as f64 * k);
        mean += moving_atom_force(&scheme, &beams, &params, x)?.0.total / n as f64;
    }
    println!("mean force at v = {v}: {mean:.6e} (expected {:.6e})", -4.0 / 3.0 * zeta0 * v * tau_p);
    Ok(())
}
