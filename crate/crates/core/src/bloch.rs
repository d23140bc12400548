//! Low-saturation steady states of the ground manifold.
//!
//! With the excited state adiabatically eliminated, the ground density matrix
//! evolves under
//!
//! ```text
//! d rho / dt ~ -1/2 {A, rho} + sum_q R_q^+ (L rho L^+) R_q - i s [A, rho]
//! ```
//!
//! where `L = e+ R_{+1} + e- R_{-1}` is the absorption operator for the
//! normalized local field, `A = L^+ L`, `R_q` are the Clebsch-Gordan
//! absorption matrices for helicity `q`, and `s` is the ratio of light shift
//! to optical pumping rate. The overall rate is dropped because only the
//! null space matters, which is why the populations do not depend on the
//! field amplitude.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::atom::{GroundDensityMatrix, HalfInt, LevelScheme};
use crate::error::{invalid, Error, Result};
use crate::jones::{c, JonesVector, C64, I};

/// Relative singular-value threshold for null-space membership.
const NULL_TOL: f64 = 1e-10;

/// The circular field components seen by the atom at position `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalField {
    pub e_plus: C64,
    pub e_minus: C64,
    pub k: f64,
    pub x: f64,
}

impl LocalField {
    pub fn new(e_plus: C64, e_minus: C64, k: f64, x: f64) -> Self {
        Self {
            e_plus,
            e_minus,
            k,
            x,
        }
    }

    /// Superposition of two counter-propagating local amplitudes.
    pub fn from_modes(rightward: &JonesVector, leftward: &JonesVector, x: f64) -> Result<Self> {
        let sum = rightward.to_circular().checked_add(&leftward.to_circular())?;
        Ok(Self::new(sum.mu, sum.nu, sum.k, x))
    }

    pub fn intensity(&self) -> f64 {
        self.e_plus.norm_sqr() + self.e_minus.norm_sqr()
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.e_plus, self.e_minus]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return invalid("local field has non-finite components");
        }
        if self.intensity() == 0.0 {
            return invalid("local field is zero; the steady state is undefined");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpingParameters {
    /// Residence time of the ground sublevels.
    pub tau_p: f64,
    pub v: f64,
}

impl PumpingParameters {
    pub fn new(tau_p: f64, v: f64) -> Result<Self> {
        if !(tau_p > 0.0) || !tau_p.is_finite() {
            return invalid(format!("tau_p must be positive (got {tau_p})"));
        }
        if !v.is_finite() {
            return invalid("velocity must be finite");
        }
        Ok(Self { tau_p, v })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeneratorOptions {
    /// Light shift per unit optical pumping rate. Zero keeps only the
    /// dissipative part.
    pub light_shift_ratio: f64,
}

/// Absorption operator `L` for the normalized field (`n_excited x n_ground`).
fn absorption(scheme: &LevelScheme, field: &LocalField) -> DMatrix<C64> {
    let norm = field.intensity().sqrt();
    let ep = field.e_plus / norm;
    let em = field.e_minus / norm;
    scheme.raising(1).map(c) * ep + scheme.raising(-1).map(c) * em
}

struct Generator {
    lambda: DMatrix<C64>,
    pump: DMatrix<C64>,
    jumps: [DMatrix<C64>; 3],
    shift: f64,
}

impl Generator {
    fn new(scheme: &LevelScheme, field: &LocalField, options: &GeneratorOptions) -> Result<Self> {
        field.validate()?;
        let lambda = absorption(scheme, field);
        let pump = lambda.adjoint() * &lambda;
        let jumps = [-1, 0, 1].map(|q| scheme.raising(q).map(c));
        Ok(Self {
            lambda,
            pump,
            jumps,
            shift: options.light_shift_ratio,
        })
    }

    fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let excited = &self.lambda * rho * self.lambda.adjoint();
        let mut out = (&self.pump * rho + rho * &self.pump) * c(-0.5);
        for r in &self.jumps {
            out += r.transpose() * &excited * r;
        }
        if self.shift != 0.0 {
            out -= (&self.pump * rho - rho * &self.pump) * (I * self.shift);
        }
        out
    }

    /// Superoperator on column-major `vec(rho)`.
    fn matrix(&self, n: usize) -> DMatrix<C64> {
        let mut sup = DMatrix::zeros(n * n, n * n);
        for col in 0..n {
            for row in 0..n {
                let mut basis = DMatrix::zeros(n, n);
                basis[(row, col)] = c(1.0);
                let image = self.apply(&basis);
                sup.column_mut(row + col * n)
                    .copy_from(&DVector::from_column_slice(image.as_slice()));
            }
        }
        sup
    }

    fn dark_states(&self) -> Vec<DVector<C64>> {
        let eig = SymmetricEigen::new(self.pump.clone());
        let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() < NULL_TOL.sqrt() * scale)
            .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
            .collect()
    }
}

/// `d rho / dt` for the given state, in units of the optical pumping rate.
pub fn generator_action(
    scheme: &LevelScheme,
    field: &LocalField,
    options: &GeneratorOptions,
    rho: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    if rho.nrows() != scheme.n_ground() || !rho.is_square() {
        return invalid("density matrix does not match the level scheme");
    }
    Ok(Generator::new(scheme, field, options)?.apply(rho))
}

pub fn steady_state(scheme: &LevelScheme, field: &LocalField) -> Result<GroundDensityMatrix> {
    steady_state_with(scheme, field, &GeneratorOptions::default())
}

/// Unique stationary state of the ground-manifold generator.
pub fn steady_state_with(
    scheme: &LevelScheme,
    field: &LocalField,
    options: &GeneratorOptions,
) -> Result<GroundDensityMatrix> {
    let n = scheme.n_ground();
    let generator = Generator::new(scheme, field, options)?;
    let sup = generator.matrix(n);
    let svd = sup.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let null: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= NULL_TOL * smax.max(1.0))
        .map(|(i, _)| i)
        .collect();
    if null.len() != 1 {
        if null.is_empty() {
            return Err(Error::Singular {
                element: "steady-state generator has no stationary state".into(),
            });
        }
        return Err(Error::DarkStateMultiplicity {
            dimension: null.len(),
            dark_states: generator.dark_states(),
        });
    }
    let vec = v_t.row(null[0]).adjoint();
    let raw = DMatrix::from_column_slice(n, n, vec.as_slice());
    let tr = raw.trace();
    if tr.norm() < 1e-300 {
        return Err(Error::Singular {
            element: "traceless null vector of the steady-state generator".into(),
        });
    }
    let scaled = raw / tr;
    let herm = (&scaled + scaled.adjoint()) * c(0.5);
    GroundDensityMatrix::new(herm)
}

/// Field seen by an atom as a function of position.
pub trait FieldProfile: Sync {
    fn wavenumber(&self) -> f64;

    fn field_at(&self, x: f64) -> Result<LocalField>;

    /// Closed-form `d rho / dx` of the adiabatic steady state, where known.
    fn steady_state_derivative(&self, _scheme: &LevelScheme, _x: f64) -> Option<DMatrix<C64>> {
        None
    }

    /// Adiabatic steady state at `x`. Profiles whose steady state is not a
    /// function of the local field alone override this.
    fn steady_state_at(&self, scheme: &LevelScheme, x: f64) -> Result<GroundDensityMatrix> {
        steady_state(scheme, &self.field_at(x)?)
    }
}

/// `d rho / dx` by central difference with step `1e-6 / k`.
pub fn steady_state_derivative_numeric(
    scheme: &LevelScheme,
    profile: &dyn FieldProfile,
    x: f64,
) -> Result<DMatrix<C64>> {
    let h = 1e-6 / profile.wavenumber();
    let plus = profile.steady_state_at(scheme, x + h)?;
    let minus = profile.steady_state_at(scheme, x - h)?;
    Ok((plus.entries() - minus.entries()) / c(2.0 * h))
}

/// Steady state lagging the local one by the distance travelled in one
/// residence time: `rho0(x) - v tau_p d rho0 / dx`.
pub fn nonadiabatic_populations(
    scheme: &LevelScheme,
    profile: &dyn FieldProfile,
    params: &PumpingParameters,
    x: f64,
) -> Result<GroundDensityMatrix> {
    PumpingParameters::new(params.tau_p, params.v)?;
    let rho0 = profile.steady_state_at(scheme, x)?;
    if params.v == 0.0 {
        return Ok(rho0);
    }
    let derivative = match profile.steady_state_derivative(scheme, x) {
        Some(d) => d,
        None => steady_state_derivative_numeric(scheme, profile, x)?,
    };
    let lagged = rho0.entries() - derivative * c(params.v * params.tau_p);
    // The derivative of a Hermitian unit-trace family is Hermitian and
    // traceless up to rounding.
    let lagged = (&lagged + lagged.adjoint()) * c(0.5);
    let tr = lagged.trace();
    GroundDensityMatrix::from_hermitian_unit_trace(lagged / tr)
}

/// Populations in the basis quantized along the unit vector with polar angle
/// `theta` and azimuth `phi`.
pub fn populations_along(rho: &GroundDensityMatrix, j: HalfInt, theta: f64, phi: f64) -> Vec<f64> {
    let d = wigner_d(j, phi, theta);
    let rotated = d.adjoint() * rho.entries() * &d;
    (0..rotated.nrows()).map(|i| rotated[(i, i)].re).collect()
}

/// Rotation matrix `D^j_{m'm}(phi, theta, 0)` with rows and columns in
/// ascending `m`.
pub fn wigner_d(j: HalfInt, phi: f64, theta: f64) -> DMatrix<C64> {
    let n = (j.twice() + 1) as usize;
    let small = wigner_small_d(j, theta);
    DMatrix::from_fn(n, n, |r, col| {
        let m_prime = f64::from(2 * r as i32 - j.twice()) / 2.0;
        C64::from_polar(1.0, -m_prime * phi) * small[(r, col)]
    })
}

/// `d^j_{m'm}(beta)`, rows `m'` and columns `m` in ascending order.
pub fn wigner_small_d(j: HalfInt, beta: f64) -> DMatrix<f64> {
    let tj = j.twice();
    let n = (tj + 1) as usize;
    let fact = |k: i32| -> f64 { (1..=k).map(f64::from).product() };
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    DMatrix::from_fn(n, n, |r, col| {
        // integer combinations j +- m are (tj +- 2m)/2
        let tmp = 2 * r as i32 - tj;
        let tm = 2 * col as i32 - tj;
        let jpmp = (tj + tmp) / 2;
        let jmmp = (tj - tmp) / 2;
        let jpm = (tj + tm) / 2;
        let jmm = (tj - tm) / 2;
        let dm = (tmp - tm) / 2;
        let norm = (fact(jpmp) * fact(jmmp) * fact(jpm) * fact(jmm)).sqrt();
        let smin = 0.max(-dm);
        let smax = jpm.min(jmmp);
        let mut sum = 0.0;
        for s in smin..=smax {
            let sign = if (dm + s) % 2 == 0 { 1.0 } else { -1.0 };
            let denom = fact(jpm - s) * fact(s) * fact(dm + s) * fact(jmmp - s);
            // cos^(2j + m - m' - 2s) sin^(m' - m + 2s)
            sum += sign / denom * cb.powi(tj + (tm - tmp) / 2 - 2 * s) * sb.powi(dm + 2 * s);
        }
        norm * sum
    })
}
