//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

use nalgebra::{DMatrix, Matrix2};
use num_rational::BigRational;
use polgrad::atom::{clebsch_gordan_exact, HalfInt, LevelScheme};
use polgrad::beams::CounterPropagatingBeams;
use polgrad::bloch::{populations_along, steady_state, PumpingParameters};
use polgrad::force::{force_expansion, force_from_modes, moving_atom_force, sigma_force, sisyphus_force};
use polgrad::jones::{compose_all, scatter, transfer_tensor, Jones2, JonesVector, TransferTensor, C64};
use polgrad::scan::{parse_scenario, run_scan_with_threads, Units};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn kx_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| PI * i as f64 / n as f64).collect()
}

/// Largest |exact - first order| and |pipeline - closed form| over the grid,
/// both divided by the largest |closed form|.
fn sisyphus_residuals(zeta0: f64) -> (f64, f64) {
    let k = 1.0;
    let tau = 1.0;
    let scheme = LevelScheme::half_to_three_halves(re(zeta0), re(0.0));
    let beams = CounterPropagatingBeams::lin_perp_lin(1.0, k).unwrap();
    let (mut worst_pipeline, mut worst_exact, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for kx in kx_grid(64) {
        for g in [-0.1, -0.05, 0.0, 0.05, 0.1] {
            let (x, v) = (kx / k, g / (k * tau));
            let params = PumpingParameters::new(tau, v).unwrap();
            let (f, rho) = moving_atom_force(&scheme, &beams, &params, x).unwrap();
            let closed = sisyphus_force(x, v, zeta0, 1.0, k, tau);
            scale = scale.max(closed.total.abs());
            worst_pipeline = worst_pipeline.max((f.total - closed.total).abs());

            let (b, c) = beams.beams_at(x);
            let t = transfer_tensor(&scheme.polarizability(&rho).unwrap().zeta).unwrap();
            let exact = force_from_modes(&scatter(&t, &b, &c).unwrap()).unwrap();
            worst_exact = worst_exact.max((exact - closed.total).abs());
        }
    }
    (worst_pipeline / scale, worst_exact / scale)
}

fn criterion_sisyphus() -> Outcome {
    let start = Instant::now();
    let (pipe4, exact4) = sisyphus_residuals(1e-4);
    let elapsed = start.elapsed().as_secs_f64();
    let (pipe5, exact5) = sisyphus_residuals(1e-5);
    let ratio = exact4 / exact5;
    // relative residual falls at least in proportion to zeta0 (one decade,
    // less 0.1 decade)
    let shrinks = ratio.log10() >= 0.9;
    let pass = pipe4 < 1e-3 && exact4 < 1e-3 && pipe5 < 1e-3 && exact5 < 1e-3 && shrinks && elapsed < 5.0;
    Outcome {
        pass,
        detail: format!(
            "first-order rel {pipe4:.2e}; exact scattering rel {exact4:.2e} at 1e-4, {exact5:.2e} at 1e-5 (ratio {ratio:.2}); {elapsed:.2} s"
        ),
    }
}

/// Optical pumping rate equations for `J = 1 -> 2` driven by pi light, with
/// squared Clebsch-Gordan coefficients written out. Returns populations of
/// `m = -1, 0, +1` along the polarization axis.
fn pi_pumping_populations() -> [f64; 3] {
    // absorption strength of g = m with pi light (excites e = m)
    let absorb = [0.5, 2.0 / 3.0, 0.5];
    // branching of e = m (row) into g = -1, 0, +1 (column)
    let branch = [[0.5, 0.5, 0.0], [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], [0.0, 0.5, 0.5]];
    let mut w = nalgebra::Matrix3::<f64>::zeros();
    for m in 0..3 {
        w[(m, m)] -= absorb[m];
        for g in 0..3 {
            w[(g, m)] += absorb[m] * branch[m][g];
        }
    }
    // replace one balance equation by normalization
    w.set_row(2, &nalgebra::RowVector3::new(1.0, 1.0, 1.0));
    let p = w.lu().solve(&nalgebra::Vector3::new(0.0, 0.0, 1.0)).unwrap();
    [p[0], p[1], p[2]]
}

/// `d^1(beta)`, rows and columns ordered `m = -1, 0, +1`.
fn small_d1(beta: f64) -> [[f64; 3]; 3] {
    let (s, c) = (beta.sin(), beta.cos());
    let r = FRAC_1_SQRT_2;
    [
        [(1.0 + c) / 2.0, s * r, (1.0 - c) / 2.0],
        [-s * r, c, s * r],
        [(1.0 - c) / 2.0, -s * r, (1.0 + c) / 2.0],
    ]
}

/// Ground state in the lab basis for sigma+ sigma- beams: rate-equation
/// populations along the local linear polarization, rotated by
/// `D(phi, pi/2, 0)`.
fn sigma_oracle_rho(kx: f64) -> DMatrix<C64> {
    // local field (circular) is B (e^{ikx}, e^{-ikx}); in Cartesian
    // components that is i sqrt2 B (sin kx, cos kx)
    let (ex, ey) = (kx.sin(), kx.cos());
    let phi = ey.atan2(ex);
    let d = small_d1(PI / 2.0);
    let p = pi_pumping_populations();
    let m = [-1.0, 0.0, 1.0];
    let big_d = DMatrix::from_fn(3, 3, |i, j| C64::from_polar(1.0, -m[i] * phi) * d[i][j]);
    let local = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, p.iter().map(|&x| re(x))));
    &big_d * local * big_d.adjoint()
}

fn criterion_sigma() -> Outcome {
    let p = pi_pumping_populations();
    let oracle_ok = (p[1] - 9.0 / 17.0).abs() < 1e-14 && (p[0] - 4.0 / 17.0).abs() < 1e-14 && (p[2] - 4.0 / 17.0).abs() < 1e-14;

    let k = 1.0;
    let zeta0 = 1e-2;
    let dzeta = 0.5;
    let scheme = LevelScheme::one_to_two(re(zeta0), C64::new(0.0, dzeta));
    let beams = CounterPropagatingBeams::sigma_plus_minus(1.0, k).unwrap();
    let (mut pop_err, mut rest_force, mut friction_err, mut rho_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for kx in kx_grid(64) {
        let x = kx / k;
        let rho = steady_state(&scheme, &beams.field_at_x(x)).unwrap();
        let oracle = sigma_oracle_rho(kx);
        rho_err = rho_err.max((rho.entries() - &oracle).map(|z| z.norm()).max());

        let phi = PI / 2.0 - kx;
        let along = populations_along(&rho, HalfInt::ONE, PI / 2.0, phi);
        for (got, want) in along.iter().zip([4.0 / 17.0, 9.0 / 17.0, 4.0 / 17.0]) {
            pop_err = pop_err.max((got - want).abs());
        }

        let at_rest = sigma_force(x, 0.0, &scheme, &rho, 1.0, k).unwrap();
        rest_force = rest_force.max(at_rest.total.abs());

        let v = 0.01;
        let f = sigma_force(x, v, &scheme, &rho, 1.0, k).unwrap();
        // friction closed form on the oracle state
        let (pm, p0, pp) = (oracle[(0, 0)].re, oracle[(1, 1)].re, oracle[(2, 2)].re);
        let z = oracle[(2, 0)] * C64::from_polar(1.0, -2.0 * kx);
        let expected = -2.0 * v * k * k * dzeta * ((7.0 / 6.0) * (pp + pm) + p0 + z.re / 3.0);
        friction_err = friction_err.max((f.friction_term - expected).abs());
    }
    let pass = oracle_ok && pop_err < 1e-10 && rho_err < 1e-10 && rest_force < 1e-12 && friction_err < 1e-10;
    Outcome {
        pass,
        detail: format!(
            "populations along polarization off by {pop_err:.1e}; rho vs oracle {rho_err:.1e}; |F(v=0)| <= {rest_force:.1e}; friction off by {friction_err:.1e}"
        ),
    }
}

trait FieldAt {
    fn field_at_x(&self, x: f64) -> polgrad::bloch::LocalField;
}

impl FieldAt for CounterPropagatingBeams {
    fn field_at_x(&self, x: f64) -> polgrad::bloch::LocalField {
        use polgrad::bloch::FieldProfile;
        self.field_at(x).unwrap()
    }
}

fn criterion_cg() -> Outcome {
    let rat = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let half = |t: i32| HalfInt::from_twice(t);
    // (j_g, j_e, m_g, q, square)
    type Entry = (HalfInt, HalfInt, HalfInt, i32, BigRational);
    let table: Vec<Entry> = vec![
        (half(1), half(3), half(-1), -1, rat(1, 1)),
        (half(1), half(3), half(-1), 0, rat(2, 3)),
        (half(1), half(3), half(-1), 1, rat(1, 3)),
        (half(1), half(3), half(1), -1, rat(1, 3)),
        (half(1), half(3), half(1), 0, rat(2, 3)),
        (half(1), half(3), half(1), 1, rat(1, 1)),
        (half(2), half(4), half(-2), -1, rat(1, 1)),
        (half(2), half(4), half(-2), 0, rat(1, 2)),
        (half(2), half(4), half(-2), 1, rat(1, 6)),
        (half(2), half(4), half(0), -1, rat(1, 2)),
        (half(2), half(4), half(0), 0, rat(2, 3)),
        (half(2), half(4), half(0), 1, rat(1, 2)),
        (half(2), half(4), half(2), -1, rat(1, 6)),
        (half(2), half(4), half(2), 0, rat(1, 2)),
        (half(2), half(4), half(2), 1, rat(1, 1)),
    ];
    let mut bad = Vec::new();
    for (jg, je, mg, q, want) in &table {
        let got = clebsch_gordan_exact(*jg, *mg, *q, *je).unwrap();
        if got.square != *want || got.negative {
            bad.push(format!("{jg}->{je} m={mg} q={q}: {}", got.square));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} entries exact", table.len())
        } else {
            bad.join("; ")
        },
    }
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn criterion_flux() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = Jones2::from_fn(|_, _| random_c(&mut rng));
        let h = (g + g.adjoint()) * re(0.5);
        let zeta = h * re(rng.gen_range(0.0..1.0) / h.norm());
        let k = rng.gen_range(0.1..10.0);
        let b = JonesVector::circular(random_c(&mut rng), random_c(&mut rng), k);
        let c = JonesVector::circular(random_c(&mut rng), random_c(&mut rng), k);
        let q = scatter(&transfer_tensor(&zeta).unwrap(), &b, &c).unwrap();
        worst = worst.max((q.outgoing_flux() - q.incoming_flux()).abs());
    }
    Outcome {
        pass: worst < 1e-12,
        detail: format!("1000 cases, worst mismatch {worst:.1e}"),
    }
}

fn criterion_composition() -> Outcome {
    let k = 1.0;
    let d = 0.37;
    let mut worst = 0.0f64;
    for zeta0 in [0.01, 0.1, 0.5] {
        let z = re(zeta0);
        let i = C64::new(0.0, 1.0);
        let r = i * z / (1.0 - i * z);
        let t = 1.0 / (1.0 - i * z);
        let phase = C64::from_polar(1.0, k * d);
        // geometric series of round trips between the atoms
        let mut trans = C64::default();
        let mut refl = r;
        let mut bounce = re(1.0);
        for _ in 0..400 {
            trans += t * phase * t * bounce;
            refl += t * phase * r * phase * t * bounce;
            bounce *= r * phase * r * phase;
        }
        let closed_t = t * t * phase / (1.0 - r * r * phase * phase);
        assert!((closed_t - trans).norm() < 1e-14);

        let atom = transfer_tensor(&(Jones2::identity() * z)).unwrap();
        let gap = TransferTensor {
            m11: Matrix2::identity() * phase.conj(),
            m12: Matrix2::zeros(),
            m21: Matrix2::zeros(),
            m22: Matrix2::identity() * phase,
        };
        let total = compose_all([&atom, &gap, &atom]);
        let b = JonesVector::circular(C64::new(0.6, 0.2), C64::new(-0.3, 0.7), k);
        let q = scatter(&total, &b, &JonesVector::zero(k)).unwrap();
        let rel = |got: C64, want: C64| (got - want).norm() / want.norm();
        for (got, want) in [(q.d_out.mu, trans * b.mu), (q.d_out.nu, trans * b.nu), (q.a_out.mu, refl * b.mu), (q.a_out.nu, refl * b.nu)] {
            worst = worst.max(rel(got, want));
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("worst relative error {worst:.1e}"),
    }
}

/// Largest |force_from_modes - position term| over one period for each
/// zeta0, with the rightward beam scaled by `imbalance`.
fn scattering_residuals(zetas: &[f64], imbalance: f64) -> Vec<f64> {
    let k = 1.0;
    let base = CounterPropagatingBeams::lin_perp_lin(1.0, k).unwrap();
    let beams = CounterPropagatingBeams::new(base.b.scale(re(imbalance)), base.c).unwrap();
    zetas
        .iter()
        .map(|&zeta0| {
            let scheme = LevelScheme::half_to_three_halves(re(zeta0), re(0.0));
            let mut worst = 0.0f64;
            for kx in kx_grid(64) {
                let x = kx / k;
                let rho = steady_state(&scheme, &beams.field_at_x(x)).unwrap();
                let zeta = scheme.polarizability(&rho).unwrap();
                let (b, c) = beams.beams_at(x);
                let modes = scatter(&zeta.transfer_tensor().unwrap(), &b, &c).unwrap();
                let exact = force_from_modes(&modes).unwrap();
                let first = force_expansion(&zeta, &b, &c, 0.0).unwrap().approximate.position_term;
                worst = worst.max((exact - first).abs());
            }
            worst
        })
        .collect()
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
}

fn criterion_pipeline_vs_formula() -> Outcome {
    let zetas = [1e-3, 1e-4, 1e-5];
    let residuals = scattering_residuals(&zetas, 2.0f64.sqrt());
    let slope = log_slope(&zetas, &residuals);
    // Balanced beams: the second-order term cancels, leaving third order.
    let balanced = scattering_residuals(&zetas[..2], 1.0);
    let balanced_slope = log_slope(&zetas[..2], &balanced);
    Outcome {
        pass: (slope - 2.0).abs() <= 0.1,
        detail: format!(
            "intensities 2:1, residuals {:.2e}, {:.2e}, {:.2e}, log-log slope {slope:.3}; balanced beams slope {balanced_slope:.2}",
            residuals[0], residuals[1], residuals[2]
        ),
    }
}

const DETERMINISM_SCENARIOS: [&str; 3] = [
    "schema_version = 1\n",
    r#"
schema_version = 1
[atom]
j_ground = 1
j_excited = 2
dzeta0_dk_imag = 0.5
[beams]
configuration = "sigma_plus_minus"
"#,
    r#"
schema_version = 1
[atom]
zeta0 = 0.01
[beams]
configuration = "custom"
left = "x"
[[elements]]
type = "waveplate"
position = 4.0
retardance = 1.5707963267948966
axis = 0.7853981633974483
[[elements]]
type = "mirror"
position = 5.0
reflectivity = -1
[grid.x]
points = 16
[grid.v]
values = [-0.05, 0.0, 0.05]
"#,
];

fn criterion_determinism() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (i, doc) in DETERMINISM_SCENARIOS.iter().enumerate() {
        let outputs: Vec<String> = [1, 4, 4, 8]
            .iter()
            .map(|&n| {
                let s = parse_scenario(doc).unwrap();
                run_scan_with_threads(&s, Units::Natural, n).unwrap().to_csv_string()
            })
            .collect();
        let same = outputs.iter().all(|o| o.as_bytes() == outputs[0].as_bytes());
        pass &= same;
        detail.push(format!("scenario {}: {} lines {}", i + 1, outputs[0].lines().count(), if same { "identical" } else { "DIFFER" }));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 7] = [
        ("Sisyphus force, lin-perp-lin J=1/2->3/2", criterion_sisyphus),
        ("sigma+ sigma- steady state and force, J=1->2", criterion_sigma),
        ("Clebsch-Gordan tables", criterion_cg),
        ("flux conservation, 1000 Hermitian polarizabilities", criterion_flux),
        ("two atoms and a gap vs multiple reflections", criterion_composition),
        ("scattered-mode force vs first-order position term", criterion_pipeline_vs_formula),
        ("scan determinism across thread counts", criterion_determinism),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            n + 1,
            outcome.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
