//! Squared Clebsch-Gordan coefficients for J -> J+1 transitions.

use polgrad::atom::{clebsch_gordan_exact, HalfInt};

fn table(j_g: HalfInt, j_e: HalfInt) {
    println!("J = {j_g} -> J' = {j_e}");
    println!("{:>6} {:>8} {:>8} {:>8}", "m", "sigma-", "pi", "sigma+");
    let mut m = -j_g;
    while m.twice() <= j_g.twice() {
        let cells: Vec<String> = [-1, 0, 1]
            .iter()
            .map(|&q| {
                let c = clebsch_gordan_exact(j_g, m, q, j_e).expect("valid");
                if c.is_zero() {
                    "-".to_string()
                } else {
                    format!("{}{}", if c.negative { "-" } else { "" }, c.square)
                }
            })
            .collect();
        println!("{:>6} {:>8} {:>8} {:>8}", m.to_string(), cells[0], cells[1], cells[2]);
        m = m + HalfInt::ONE;
    }
    println!();
}

fn main() {
    table(HalfInt::HALF, HalfInt::from_twice(3));
    table(HalfInt::ONE, HalfInt::from_twice(4));
    table(HalfInt::from_twice(3), HalfInt::from_twice(5));
}
