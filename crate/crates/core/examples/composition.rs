//! Chaining elements: two atoms separated by a gap, and a waveplate pair.

use std::f64::consts::PI;

use polgrad::jones::{compose_all, scatter, transfer_tensor, Jones2, JonesVector, C64};
use polgrad::optics::{element_tensor, Element};

fn main() -> polgrad::error::Result<()> {
    let k = 1.0;
    let zeta0 = 0.1;
    let atom = transfer_tensor(&(Jones2::identity() * C64::new(zeta0, 0.0)))?;
    let b = JonesVector::circular(C64::new(1.0, 0.0), C64::new(0.0, 0.0), k);

    println!("{:>8} {:>10} {:>10}", "k d", "|r|^2", "|t|^2");
    for i in 0..=8 {
        let d = PI / 8.0 * i as f64 / k;
        let gap = element_tensor(&Element::gap(d, 0.0), k)?;
        let q = scatter(&compose_all([&atom, &gap, &atom]), &b, &JonesVector::zero(k))?;
        println!("{:>8.4} {:>10.6} {:>10.6}", k * d, q.a_out.norm_sqr(), q.d_out.norm_sqr());
    }

    // two quarter-wave plates at 45 degrees act as a half-wave plate
    let qwp = element_tensor(&Element::waveplate(PI / 2.0, PI / 4.0, 0.0), k)?;
    let x = JonesVector::linear(C64::new(1.0, 0.0), C64::new(0.0, 0.0), k);
    let out = scatter(&compose_all([&qwp, &qwp]), &x, &JonesVector::zero(k))?.d_out.to_linear();
    println!("x through two QWPs: ({:.3}, {:.3})", out.mu, out.nu);
    Ok(())
}
