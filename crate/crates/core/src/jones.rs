//! Polarization-resolved field modes and the transfer tensors that relate them.
//!
//! A scatterer sits between a left and a right side. On each side there is a
//! rightward- and a leftward-propagating mode, each carrying a Jones vector:
//!
//! ```text
//!        A  <----  |        |  <----  C
//!        B  ---->  |  atom  |  ---->  D
//! ```
//!
//! `B` and `C` are the incoming modes, `A` and `D` the outgoing ones. A
//! [`TransferTensor`] maps the right-side pair onto the left-side pair with
//! the rightward mode first on each side:
//!
//! ```text
//! (B, A) = M (D, C),    M = [[m11, m12], [m21, m22]]
//! ```
//!
//! Each block is a 2x2 complex matrix acting on Jones vectors. For a thin
//! scatterer of polarizability `zeta` this ordering gives reflection
//! `i zeta (1 - i zeta)^-1` and transmission `(1 - i zeta)^-1`, so a positive
//! imaginary part of `zeta` is absorptive.
//!
//! Jones vectors are stored in the circular basis `(sigma+, sigma-)` relative
//! to the fixed propagation axis. Linear `(x, y)` inputs are rotated on
//! ingestion by
//!
//! ```text
//! sigma+ = (x - i y) / sqrt(2)
//! sigma- = -(x + i y) / sqrt(2)
//! ```

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use nalgebra::{Complex, Matrix2, Matrix4, Vector2, Vector4};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex<f64>;
pub type Jones2 = Matrix2<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub(crate) fn is_finite_matrix(m: &Jones2) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Polarization basis a Jones vector is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `(sigma+, sigma-)`, the internal basis.
    Circular,
    /// `(x, y)`.
    Linear,
}

/// Two complex field amplitudes at wavenumber `k`.
///
/// Amplitudes are in square-root photon-flux units so that
/// [`norm_sqr`](Self::norm_sqr) is a photon flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesVector {
    pub mu: C64,
    pub nu: C64,
    pub k: f64,
    pub basis: Basis,
}

impl JonesVector {
    pub fn circular(sigma_plus: C64, sigma_minus: C64, k: f64) -> Self {
        Self {
            mu: sigma_plus,
            nu: sigma_minus,
            k,
            basis: Basis::Circular,
        }
    }

    pub fn linear(x: C64, y: C64, k: f64) -> Self {
        Self {
            mu: x,
            nu: y,
            k,
            basis: Basis::Linear,
        }
    }

    pub fn zero(k: f64) -> Self {
        Self::circular(C64::default(), C64::default(), k)
    }

    pub fn from_vector(v: Vector2<C64>, k: f64) -> Self {
        Self::circular(v[0], v[1], k)
    }

    pub fn as_vector(&self) -> Vector2<C64> {
        Vector2::new(self.mu, self.nu)
    }

    /// Returns the same field in the circular basis.
    pub fn to_circular(self) -> Self {
        match self.basis {
            Basis::Circular => self,
            Basis::Linear => {
                let (x, y) = (self.mu, self.nu);
                Self::circular(
                    (x - I * y) * FRAC_1_SQRT_2,
                    -(x + I * y) * FRAC_1_SQRT_2,
                    self.k,
                )
            }
        }
    }

    /// Returns the same field in the linear basis.
    pub fn to_linear(self) -> Self {
        match self.basis {
            Basis::Linear => self,
            Basis::Circular => {
                let (p, m) = (self.mu, self.nu);
                Self::linear((p - m) * FRAC_1_SQRT_2, (p + m) * I * FRAC_1_SQRT_2, self.k)
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.mu.norm_sqr() + self.nu.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        [self.mu, self.nu]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
            && self.k.is_finite()
    }

    pub fn scale(self, factor: C64) -> Self {
        Self {
            mu: self.mu * factor,
            nu: self.nu * factor,
            ..self
        }
    }

    /// Fails unless both vectors share wavenumber and basis.
    pub fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return invalid(format!(
                "basis mismatch: {:?} vs {:?}",
                self.basis, other.basis
            ));
        }
        if self.k != other.k {
            return invalid(format!("wavenumber mismatch: {} vs {}", self.k, other.k));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(Self {
            mu: self.mu + other.mu,
            nu: self.nu + other.nu,
            ..*self
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(Self {
            mu: self.mu - other.mu,
            nu: self.nu - other.nu,
            ..*self
        })
    }

    /// `sum_p self_p * conj(other_p)`.
    pub fn dot_conj(&self, other: &Self) -> Result<C64> {
        self.ensure_compatible(other)?;
        Ok(self.mu * other.mu.conj() + self.nu * other.nu.conj())
    }

    /// Applies a 2x2 polarization matrix. The result keeps `k` and basis.
    pub fn transform(&self, m: &Jones2) -> Self {
        let v = m * self.as_vector();
        Self {
            mu: v[0],
            nu: v[1],
            ..*self
        }
    }
}

/// Block transfer tensor, see the module docs for the mode ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferTensor {
    pub m11: Jones2,
    pub m12: Jones2,
    pub m21: Jones2,
    pub m22: Jones2,
}

impl TransferTensor {
    pub fn identity() -> Self {
        Self {
            m11: Jones2::identity(),
            m12: Jones2::zeros(),
            m21: Jones2::zeros(),
            m22: Jones2::identity(),
        }
    }

    /// Tensor of a non-reflecting element with the given forward
    /// (rightward) and backward (leftward) transmission matrices.
    pub fn non_reflecting(forward: &Jones2, backward: &Jones2) -> Result<Self> {
        let inv = forward.try_inverse().ok_or_else(|| Error::Singular {
            element: "forward transmission matrix".into(),
        })?;
        Ok(Self {
            m11: inv,
            m12: Jones2::zeros(),
            m21: Jones2::zeros(),
            m22: *backward,
        })
    }

    pub fn to_matrix(&self) -> Matrix4<C64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.m11);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.m12);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.m21);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.m22);
        m
    }

    pub fn from_matrix(m: &Matrix4<C64>) -> Self {
        Self {
            m11: m.fixed_view::<2, 2>(0, 0).into_owned(),
            m12: m.fixed_view::<2, 2>(0, 2).into_owned(),
            m21: m.fixed_view::<2, 2>(2, 0).into_owned(),
            m22: m.fixed_view::<2, 2>(2, 2).into_owned(),
        }
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.to_matrix() - other.to_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Re-expresses a tensor given in amplitudes local to the plane at
    /// `position` in terms of plane-wave amplitudes referenced to `x = 0`.
    pub fn at_position(&self, k: f64, position: f64) -> Self {
        let fwd = C64::from_polar(1.0, k * position);
        let bwd = fwd.conj();
        // M_env = P^-1 M P with P = diag(e^{ikp}, e^{-ikp}).
        Self {
            m11: self.m11,
            m12: self.m12 * (bwd * bwd),
            m21: self.m21 * (fwd * fwd),
            m22: self.m22,
        }
    }

    /// Converts to the equivalent two-port scattering description.
    pub fn to_two_port(&self) -> Result<TwoPort> {
        let inv = self.m11.try_inverse().ok_or_else(|| Error::Singular {
            element: "transfer tensor block m11".into(),
        })?;
        Ok(TwoPort {
            r_left: self.m21 * inv,
            t_forward: inv,
            t_backward: self.m22 - self.m21 * inv * self.m12,
            r_right: -inv * self.m12,
        })
    }
}

impl Mul for TransferTensor {
    type Output = TransferTensor;

    fn mul(self, rhs: TransferTensor) -> TransferTensor {
        compose(&self, &rhs)
    }
}

/// Four modes around a scatterer, all at one wavenumber and basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuartet {
    pub a_out: JonesVector,
    pub b_in: JonesVector,
    pub c_in: JonesVector,
    pub d_out: JonesVector,
}

impl ModeQuartet {
    pub fn new(
        a_out: JonesVector,
        b_in: JonesVector,
        c_in: JonesVector,
        d_out: JonesVector,
    ) -> Result<Self> {
        a_out.ensure_compatible(&b_in)?;
        a_out.ensure_compatible(&c_in)?;
        a_out.ensure_compatible(&d_out)?;
        Ok(Self {
            a_out,
            b_in,
            c_in,
            d_out,
        })
    }

    pub fn k(&self) -> f64 {
        self.b_in.k
    }

    pub fn incoming_flux(&self) -> f64 {
        self.b_in.norm_sqr() + self.c_in.norm_sqr()
    }

    pub fn outgoing_flux(&self) -> f64 {
        self.a_out.norm_sqr() + self.d_out.norm_sqr()
    }
}

/// Tensor of a thin scatterer with polarizability `zeta`:
/// `[[1 - i zeta, -i zeta], [i zeta, 1 + i zeta]]`.
pub fn transfer_tensor(zeta: &Jones2) -> Result<TransferTensor> {
    if !is_finite_matrix(zeta) {
        return invalid("polarizability has non-finite entries");
    }
    let one = Jones2::identity();
    let iz = zeta * I;
    Ok(TransferTensor {
        m11: one - iz,
        m12: -iz,
        m21: iz,
        m22: one + iz,
    })
}

/// Block product `left * right`. The result maps the right-side modes of
/// `right` onto the left-side modes of `left`.
pub fn compose(left: &TransferTensor, right: &TransferTensor) -> TransferTensor {
    TransferTensor {
        m11: left.m11 * right.m11 + left.m12 * right.m21,
        m12: left.m11 * right.m12 + left.m12 * right.m22,
        m21: left.m21 * right.m11 + left.m22 * right.m21,
        m22: left.m21 * right.m12 + left.m22 * right.m22,
    }
}

/// Composes a left-to-right sequence of tensors.
pub fn compose_all<'a>(tensors: impl IntoIterator<Item = &'a TransferTensor>) -> TransferTensor {
    tensors
        .into_iter()
        .fold(TransferTensor::identity(), |acc, t| compose(&acc, t))
}

/// Solves for the outgoing modes given the incoming `b_in` (rightward, left
/// side) and `c_in` (leftward, right side). Linear inputs are rotated to the
/// circular basis first.
pub fn scatter(t: &TransferTensor, b_in: &JonesVector, c_in: &JonesVector) -> Result<ModeQuartet> {
    let b = b_in.to_circular();
    let cc = c_in.to_circular();
    b.ensure_compatible(&cc)?;
    if !b.is_finite() || !cc.is_finite() {
        return invalid("non-finite input amplitudes");
    }
    // B = m11 D + m12 C,  A = m21 D + m22 C
    let lu = t.m11.lu();
    let rhs = b.as_vector() - t.m12 * cc.as_vector();
    let d = lu.solve(&rhs).ok_or_else(|| Error::Singular {
        element: "transfer tensor block m11".into(),
    })?;
    let a = t.m21 * d + t.m22 * cc.as_vector();
    Ok(ModeQuartet {
        a_out: JonesVector::from_vector(a, b.k),
        b_in: b,
        c_in: cc,
        d_out: JonesVector::from_vector(d, b.k),
    })
}

/// Two-port scattering description of an element: reflection seen from the
/// left, rightward transmission, leftward transmission, reflection seen from
/// the right. Unlike [`TransferTensor`] it also covers perfect reflectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPort {
    pub r_left: Jones2,
    pub t_forward: Jones2,
    pub t_backward: Jones2,
    pub r_right: Jones2,
}

impl TwoPort {
    pub fn identity() -> Self {
        Self {
            r_left: Jones2::zeros(),
            t_forward: Jones2::identity(),
            t_backward: Jones2::identity(),
            r_right: Jones2::zeros(),
        }
    }

    pub fn to_transfer(&self) -> Result<TransferTensor> {
        let inv = self.t_forward.try_inverse().ok_or_else(|| Error::Singular {
            element: "forward transmission (element is opaque)".into(),
        })?;
        Ok(TransferTensor {
            m11: inv,
            m12: -inv * self.r_right,
            m21: self.r_left * inv,
            m22: self.t_backward - self.r_left * inv * self.r_right,
        })
    }

    /// Shifts an element's local description to `x = 0` referenced
    /// plane-wave amplitudes.
    pub fn at_position(&self, k: f64, position: f64) -> Self {
        let round_trip = C64::from_polar(1.0, 2.0 * k * position);
        Self {
            r_left: self.r_left * round_trip,
            r_right: self.r_right * round_trip.conj(),
            ..*self
        }
    }

    /// Redheffer star product: `self` on the left, `right` on the right.
    pub fn star(&self, right: &TwoPort) -> Result<TwoPort> {
        let one = Jones2::identity();
        let inner_fwd = (one - self.r_right * right.r_left)
            .try_inverse()
            .ok_or_else(|| Error::Singular {
                element: "resonant cavity between adjacent elements".into(),
            })?;
        let inner_bwd = (one - right.r_left * self.r_right)
            .try_inverse()
            .ok_or_else(|| Error::Singular {
                element: "resonant cavity between adjacent elements".into(),
            })?;
        Ok(TwoPort {
            r_left: self.r_left + self.t_backward * right.r_left * inner_fwd * self.t_forward,
            t_forward: right.t_forward * inner_fwd * self.t_forward,
            t_backward: self.t_backward * inner_bwd * right.t_backward,
            r_right: right.r_right + right.t_forward * self.r_right * inner_bwd * right.t_backward,
        })
    }

    pub fn apply(&self, b_in: &JonesVector, c_in: &JonesVector) -> Result<ModeQuartet> {
        let b = b_in.to_circular();
        let cc = c_in.to_circular();
        b.ensure_compatible(&cc)?;
        let a = self.r_left * b.as_vector() + self.t_backward * cc.as_vector();
        let d = self.t_forward * b.as_vector() + self.r_right * cc.as_vector();
        Ok(ModeQuartet {
            a_out: JonesVector::from_vector(a, b.k),
            b_in: b,
            c_in: cc,
            d_out: JonesVector::from_vector(d, b.k),
        })
    }
}

/// Solves the 4x4 system for the two waves incident on a central element
/// embedded between a left and a right section. Returns `(u, w)`, the
/// rightward wave arriving from the left and the leftward wave arriving from
/// the right, as `x = 0` referenced amplitudes.
pub(crate) fn embedded_incident(
    left: &TwoPort,
    centre: &TwoPort,
    right: &TwoPort,
    b: &Vector2<C64>,
    c_in: &Vector2<C64>,
) -> Result<(Vector2<C64>, Vector2<C64>)> {
    let one = Jones2::identity();
    let mut m = Matrix4::<C64>::zeros();
    m.fixed_view_mut::<2, 2>(0, 0)
        .copy_from(&(one - left.r_right * centre.r_left));
    m.fixed_view_mut::<2, 2>(0, 2)
        .copy_from(&(-left.r_right * centre.t_backward));
    m.fixed_view_mut::<2, 2>(2, 0)
        .copy_from(&(-right.r_left * centre.t_forward));
    m.fixed_view_mut::<2, 2>(2, 2)
        .copy_from(&(one - right.r_left * centre.r_right));
    let lb = left.t_forward * b;
    let rc = right.t_backward * c_in;
    let rhs = Vector4::new(lb[0], lb[1], rc[0], rc[1]);
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::Singular {
        element: "field inside the optical system (resonant configuration)".into(),
    })?;
    Ok((
        Vector2::new(sol[0], sol[1]),
        Vector2::new(sol[2], sol[3]),
    ))
}
