//! A weak polarization-dependent scatterer hit from both sides.

use polgrad::jones::{scatter, transfer_tensor, Jones2, JonesVector, C64};

fn main() -> polgrad::error::Result<()> {
    let k = 1.0;
    // birefringent, slightly absorbing
    let zeta = Jones2::new(
        C64::new(0.02, 0.001),
        C64::new(0.005, 0.0),
        C64::new(0.005, 0.0),
        C64::new(-0.01, 0.001),
    );
    let t = transfer_tensor(&zeta)?;

    let b = JonesVector::linear(C64::new(1.0, 0.0), C64::new(0.0, 0.0), k);
    let c = JonesVector::circular(C64::new(0.0, 0.0), C64::new(0.7, 0.0), k);
    let q = scatter(&t, &b, &c)?;

    println!("reflected  A = ({:.5}, {:.5})", q.a_out.mu, q.a_out.nu);
    println!("transmitted D = ({:.5}, {:.5})", q.d_out.mu, q.d_out.nu);
    let lin = q.d_out.to_linear();
    println!("D in (x, y): ({:.5}, {:.5})", lin.mu, lin.nu);
    println!(
        "flux in {:.6}, out {:.6}, absorbed {:.3e}",
        q.incoming_flux(),
        q.outgoing_flux(),
        q.incoming_flux() - q.outgoing_flux()
    );
    Ok(())
}
