//! Radiation force on the atom, in natural units (`hbar = c = 1`).
//!
//! The exact force follows from momentum-flux balance across the scatterer.
//! To first order in the polarizability and in `v/c`,
//!
//! ```text
//! F = 2k Im{[zeta (B+C)] . (B-C)*}                      position term
//!   + 4(v/c) k Im{(zeta B) . C* + (zeta C) . B*}        cross term
//!   - 2(v/c) k^2 Im{[dzeta/dk (B+C)] . (B+C)*}          Doppler friction
//! ```
//!
//! The cross term is dropped when `|k dzeta/dk| >> |zeta|`; both forms are
//! available through [`ForceExpansion`].

use crate::atom::{GroundDensityMatrix, HalfInt, LevelScheme, PolarizabilityTensor};
use crate::beams::CounterPropagatingBeams;
use crate::bloch::{nonadiabatic_populations, FieldProfile, PumpingParameters};
use crate::error::{invalid, Result};
use crate::jones::{JonesVector, ModeQuartet, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    pub total: f64,
    pub position_term: f64,
    /// The part proportional to velocity.
    pub friction_term: f64,
}

impl ForceResult {
    pub fn new(position_term: f64, friction_term: f64) -> Self {
        Self {
            total: position_term + friction_term,
            position_term,
            friction_term,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// First-order force expansion. `approximate` omits the cross term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceExpansion {
    pub approximate: ForceResult,
    pub cross_term: f64,
}

impl ForceExpansion {
    pub fn exact_total(&self) -> f64 {
        self.approximate.total + self.cross_term
    }
}

/// `k (|A|^2 + |B|^2 - |C|^2 - |D|^2)`.
pub fn force_from_modes(q: &ModeQuartet) -> Result<f64> {
    q.a_out.ensure_compatible(&q.b_in)?;
    q.a_out.ensure_compatible(&q.c_in)?;
    q.a_out.ensure_compatible(&q.d_out)?;
    Ok(q.k()
        * (q.a_out.norm_sqr() + q.b_in.norm_sqr() - q.c_in.norm_sqr() - q.d_out.norm_sqr()))
}

/// Force on a weak scatterer illuminated by the local amplitudes `b_in`
/// (rightward) and `c_in` (leftward), moving at `v` (units of `c`).
pub fn force_expansion(
    zeta: &PolarizabilityTensor,
    b_in: &JonesVector,
    c_in: &JonesVector,
    v: f64,
) -> Result<ForceExpansion> {
    let b = b_in.to_circular();
    let cc = c_in.to_circular();
    b.ensure_compatible(&cc)?;
    let k = b.k;
    let sum = b.checked_add(&cc)?;
    let diff = b.checked_sub(&cc)?;

    let position = 2.0 * k * sum.transform(&zeta.zeta).dot_conj(&diff)?.im;
    let cross = 4.0
        * v
        * k
        * (b.transform(&zeta.zeta).dot_conj(&cc)? + cc.transform(&zeta.zeta).dot_conj(&b)?).im;
    let friction = -2.0 * v * k * k * sum.transform(&zeta.dzeta_dk).dot_conj(&sum)?.im;

    Ok(ForceExpansion {
        approximate: ForceResult::new(position, friction),
        cross_term: cross,
    })
}

/// Closed-form polarization-gradient force for `J = 1/2 -> 3/2` in lin-perp-lin
/// beams of amplitude `B`:
/// `-(2/3) k |B|^2 zeta0 sin(4kx) - (8/3) k^2 |B|^2 zeta0 v tau_p sin^2(2kx)`.
pub fn sisyphus_force(x: f64, v: f64, zeta0: f64, amplitude: f64, k: f64, tau_p: f64) -> ForceResult {
    let intensity = amplitude * amplitude;
    let position = -(2.0 / 3.0) * k * intensity * zeta0 * (4.0 * k * x).sin();
    let friction = -(8.0 / 3.0) * k * k * intensity * zeta0 * v * tau_p * (2.0 * k * x).sin().powi(2);
    ForceResult::new(position, friction)
}

/// Closed-form force for `J = 1 -> 2` in `sigma+ sigma-` beams of amplitude
/// `B`, given the ground populations and the coherence `C = <+1|rho|-1>`.
///
/// With `z = C e^{-2ikx}`:
///
/// ```text
/// F = 2k|B|^2 Im{ (5/6) zeta0 (P+ - P-) + (1/3) i zeta0 Im z }
///   - 2 v k^2 |B|^2 Im{dzeta0/dk} [ (7/6)(P+ + P-) + P0 + (1/3) Re z ]
/// ```
pub fn sigma_force(
    x: f64,
    v: f64,
    scheme: &LevelScheme,
    rho: &GroundDensityMatrix,
    amplitude: f64,
    k: f64,
) -> Result<ForceResult> {
    if scheme.j_ground() != HalfInt::ONE || scheme.j_excited() != HalfInt::from_twice(4) {
        return invalid(format!(
            "sigma+ sigma- closed form needs J = 1 -> 2 (got {} -> {})",
            scheme.j_ground(),
            scheme.j_excited()
        ));
    }
    if rho.dim() != 3 {
        return invalid("density matrix must be 3x3 for J = 1");
    }
    let intensity = amplitude * amplitude;
    let (pm, p0, pp) = (rho.population(0), rho.population(1), rho.population(2));
    let z = rho.coherence(2, 0) * C64::from_polar(1.0, -2.0 * k * x);
    let i = C64::new(0.0, 1.0);
    let inner = scheme.zeta0 * (5.0 / 6.0) * (pp - pm) + i * scheme.zeta0 * (z.im / 3.0);
    let position = 2.0 * k * intensity * inner.im;
    let bracket = (7.0 / 6.0) * (pp + pm) + p0 + z.re / 3.0;
    let friction = -2.0 * v * k * k * intensity * scheme.dzeta0_dk.im * bracket;
    Ok(ForceResult::new(position, friction))
}

/// Force on an atom moving through counter-propagating beams, with the
/// ground state lagging its local steady state by one residence time.
///
/// `position_term` is the force on an atom at rest at `x`; `friction_term`
/// collects everything proportional to `v`, from both the lag and the
/// Doppler term.
pub fn moving_atom_force(
    scheme: &LevelScheme,
    beams: &CounterPropagatingBeams,
    params: &PumpingParameters,
    x: f64,
) -> Result<(ForceResult, GroundDensityMatrix)> {
    profile_force(scheme, beams, params, x, |x| Ok(beams.beams_at(x)))
}

/// Same as [`moving_atom_force`] for an arbitrary field profile; `local_beams`
/// gives the rightward and leftward amplitudes incident on the atom at `x`.
pub fn profile_force<F>(
    scheme: &LevelScheme,
    profile: &dyn FieldProfile,
    params: &PumpingParameters,
    x: f64,
    local_beams: F,
) -> Result<(ForceResult, GroundDensityMatrix)>
where
    F: Fn(f64) -> Result<(JonesVector, JonesVector)>,
{
    let (b, c) = local_beams(x)?;
    let rest = PumpingParameters::new(params.tau_p, 0.0)?;
    let rho0 = nonadiabatic_populations(scheme, profile, &rest, x)?;
    let at_rest = force_expansion(&scheme.polarizability(&rho0)?, &b, &c, 0.0)?;
    if params.v == 0.0 {
        return Ok((ForceResult::new(at_rest.approximate.total, 0.0), rho0));
    }
    let rho = nonadiabatic_populations(scheme, profile, params, x)?;
    let moving = force_expansion(&scheme.polarizability(&rho)?, &b, &c, params.v)?;
    let position = at_rest.approximate.total;
    Ok((
        ForceResult::new(position, moving.approximate.total - position),
        rho,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::{c, scatter, transfer_tensor, Jones2};
    use std::f64::consts::PI;

    #[test]
    fn balanced_modes_give_no_force() {
        let v = JonesVector::circular(C64::new(0.3, 0.4), C64::new(0.1, 0.0), 1.0);
        let q = ModeQuartet::new(v, v, v, v).unwrap();
        assert_eq!(force_from_modes(&q).unwrap(), 0.0);
        let b = JonesVector::circular(c(1.0), c(0.0), 1.0);
        let q = scatter(
            &transfer_tensor(&Jones2::zeros()).unwrap(),
            &b,
            &JonesVector::zero(1.0),
        )
        .unwrap();
        assert_eq!(force_from_modes(&q).unwrap(), 0.0);
    }

    #[test]
    fn absorber_is_pushed_along_the_beam() {
        let zeta = Jones2::identity() * C64::new(0.0, 0.01);
        let b = JonesVector::circular(c(1.0), c(0.0), 1.0);
        let q = scatter(&transfer_tensor(&zeta).unwrap(), &b, &JonesVector::zero(1.0)).unwrap();
        let f = force_from_modes(&q).unwrap();
        // t = 1/1.01, r = -0.01/1.01
        let expected = 1.0 + (0.01f64 / 1.01).powi(2) - (1.0f64 / 1.01).powi(2);
        assert!(f > 0.0);
        assert!((f - expected).abs() < 1e-15);
    }

    #[test]
    fn mismatched_k_rejected() {
        let a = JonesVector::zero(1.0);
        let q = ModeQuartet {
            a_out: a,
            b_in: a,
            c_in: JonesVector::zero(2.0),
            d_out: a,
        };
        assert!(force_from_modes(&q).is_err());
    }

    #[test]
    fn friction_vanishes_at_rest() {
        let p = PolarizabilityTensor::new(Jones2::identity() * c(0.01), Jones2::identity() * C64::new(0.0, 2.0))
            .unwrap();
        let b = JonesVector::circular(c(1.0), c(0.0), 1.0);
        let cc = JonesVector::circular(c(0.0), c(1.0), 1.0);
        let f = force_expansion(&p, &b, &cc, 0.0).unwrap();
        assert_eq!(f.approximate.friction_term, 0.0);
        assert_eq!(f.cross_term, 0.0);
    }

    #[test]
    fn sisyphus_closed_form_values() {
        assert_eq!(sisyphus_force(0.0, 0.0, 1e-4, 1.0, 1.0, 1.0).total, 0.0);
        let f = sisyphus_force(PI / 8.0, 0.0, 1e-4, 1.0, 1.0, 1.0);
        assert!((f.total + 2.0 / 3.0 * 1e-4).abs() < 1e-18);
        let f = sisyphus_force(0.3, 0.02, 1e-4, 2.0, 1.5, 3.0);
        assert!((f.total - f.position_term - f.friction_term).abs() < 1e-14 * f.total.abs());
    }

    #[test]
    fn sigma_force_rejects_other_schemes() {
        let s = LevelScheme::half_to_three_halves(c(1e-3), c(0.0));
        let rho = GroundDensityMatrix::from_populations(&[0.5, 0.5]).unwrap();
        assert!(sigma_force(0.0, 0.0, &s, &rho, 1.0, 1.0).is_err());
    }

    #[test]
    fn sigma_force_zero_for_symmetric_populations() {
        let s = LevelScheme::one_to_two(c(1e-3), c(0.0));
        let rho = GroundDensityMatrix::from_populations(&[0.3, 0.4, 0.3]).unwrap();
        let f = sigma_force(0.7, 0.0, &s, &rho, 1.0, 1.0).unwrap();
        assert_eq!(f.total, 0.0);
    }
}
