//! Pairs of counter-propagating beams illuminating a bare atom.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::DMatrix;

use crate::atom::{HalfInt, LevelScheme};
use crate::bloch::{FieldProfile, LocalField};
use crate::error::{invalid, Result};
use crate::jones::{c, JonesVector, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamConfiguration {
    /// Orthogonal linear polarizations, equal intensity.
    LinPerpLin,
    /// `sigma+` from the left, `sigma-` from the right, equal intensity.
    SigmaPlusMinus,
    Other,
}

/// Rightward beam `b` and leftward beam `c`, stored as plane-wave amplitudes
/// referenced to `x = 0`. The local amplitudes at `x` are `b e^{ikx}` and
/// `c e^{-ikx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterPropagatingBeams {
    pub b: JonesVector,
    pub c: JonesVector,
    pub configuration: BeamConfiguration,
}

impl CounterPropagatingBeams {
    pub fn new(b: JonesVector, c: JonesVector) -> Result<Self> {
        let (b, c) = (b.to_circular(), c.to_circular());
        b.ensure_compatible(&c)?;
        if !(b.k > 0.0) || !b.is_finite() || !c.is_finite() {
            return invalid("beams need a positive wavenumber and finite amplitudes");
        }
        Ok(Self {
            b,
            c,
            configuration: BeamConfiguration::Other,
        })
    }

    /// `B = B/sqrt2 (1, 1) e^{i(kx - pi/4)}`, `C = iB/sqrt2 (1, -1) e^{-i(kx - pi/4)}`.
    pub fn lin_perp_lin(amplitude: f64, k: f64) -> Result<Self> {
        let a = amplitude * FRAC_1_SQRT_2;
        let pb = C64::from_polar(a, -FRAC_PI_4);
        let pc = I * C64::from_polar(a, FRAC_PI_4);
        let mut beams = Self::new(
            JonesVector::circular(pb, pb, k),
            JonesVector::circular(pc, -pc, k),
        )?;
        beams.configuration = BeamConfiguration::LinPerpLin;
        Ok(beams)
    }

    /// `B = B (1, 0) e^{ikx}`, `C = B (0, 1) e^{-ikx}`.
    pub fn sigma_plus_minus(amplitude: f64, k: f64) -> Result<Self> {
        let mut beams = Self::new(
            JonesVector::circular(c(amplitude), c(0.0), k),
            JonesVector::circular(c(0.0), c(amplitude), k),
        )?;
        beams.configuration = BeamConfiguration::SigmaPlusMinus;
        Ok(beams)
    }

    pub fn k(&self) -> f64 {
        self.b.k
    }

    /// Local amplitudes of the two beams at `x`.
    pub fn beams_at(&self, x: f64) -> (JonesVector, JonesVector) {
        let phase = C64::from_polar(1.0, self.k() * x);
        (self.b.scale(phase), self.c.scale(phase.conj()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            b: self.b.scale(c(factor)),
            c: self.c.scale(c(factor)),
            ..*self
        }
    }
}

impl FieldProfile for CounterPropagatingBeams {
    fn wavenumber(&self) -> f64 {
        self.k()
    }

    fn field_at(&self, x: f64) -> Result<LocalField> {
        let (b, c) = self.beams_at(x);
        LocalField::from_modes(&b, &c, x)
    }

    fn steady_state_derivative(&self, scheme: &LevelScheme, x: f64) -> Option<DMatrix<C64>> {
        let is_half = scheme.j_ground() == HalfInt::HALF && scheme.j_excited() == HalfInt::from_twice(3);
        let equal = (self.b.norm_sqr() - self.c.norm_sqr()).abs() <= 1e-15 * self.b.norm_sqr();
        if self.configuration == BeamConfiguration::LinPerpLin && is_half && equal {
            // Pi_- = cos^2(kx), Pi_+ = sin^2(kx)
            let k = self.k();
            let d = k * (2.0 * k * x).sin();
            Some(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(-d),
                c(d),
            ])))
        } else {
            None
        }
    }
}
