//! Level schemes, dipole couplings, and the polarizability of an atom in a
//! given ground-state density matrix.
//!
//! Ground sublevels are indexed in ascending order of `m`, so index 0 is
//! `m = -j_g`. The polarizability operator couples only the two helicities
//! carried by a Jones vector; its `(i, j)` element is the 2x2 block
//!
//! ```text
//! chi(i, j) = zeta0 * sum_e [ d+(i,e) d+(j,e)   d+(i,e) d-(j,e) ]
//!                           [ d-(i,e) d+(j,e)   d-(i,e) d-(j,e) ]
//! ```
//!
//! where `d+-(i, e)` is the Clebsch-Gordan coefficient for absorbing a
//! `sigma+-` photon from ground sublevel `i` into excited sublevel `e`, and
//! the polarizability tensor is `zeta = sum_ij rho(j, i) chi(i, j)`.

mod cg;

pub use cg::{clebsch_gordan, clebsch_gordan_exact, clebsch_gordan_general, HalfInt, SignedSqrt};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};
use crate::jones::{c, is_finite_matrix, transfer_tensor, Jones2, TransferTensor, C64};

const DENSITY_TOL: f64 = 1e-12;

/// Ground and excited angular momenta plus the characteristic polarizability.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme {
    j_ground: HalfInt,
    j_excited: HalfInt,
    pub zeta0: C64,
    /// Wavenumber derivative of `zeta0`, in length units.
    pub dzeta0_dk: C64,
    /// Absorption matrices indexed by helicity `q + 1`; each is
    /// `n_excited x n_ground`.
    raising: [DMatrix<f64>; 3],
}

impl LevelScheme {
    pub fn new(j_ground: HalfInt, j_excited: HalfInt, zeta0: C64, dzeta0_dk: C64) -> Result<Self> {
        if j_ground.twice() < 0 || j_excited.twice() < 0 {
            return invalid(format!(
                "angular momenta must be non-negative (got {j_ground} -> {j_excited})"
            ));
        }
        let gap = (j_ground.twice() - j_excited.twice()).abs();
        if gap != 0 && gap != 2 {
            return invalid(format!(
                "|j_ground - j_excited| must be 0 or 1 (got {j_ground} -> {j_excited})"
            ));
        }
        if j_ground.twice() == 0 && j_excited.twice() == 0 {
            return invalid("0 -> 0 is not a dipole transition");
        }
        for z in [zeta0, dzeta0_dk] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return invalid("zeta0 and its derivative must be finite");
            }
        }
        let n_g = (j_ground.twice() + 1) as usize;
        let n_e = (j_excited.twice() + 1) as usize;
        let mut raising = [
            DMatrix::zeros(n_e, n_g),
            DMatrix::zeros(n_e, n_g),
            DMatrix::zeros(n_e, n_g),
        ];
        for (slot, q) in raising.iter_mut().zip(-1..=1) {
            for i in 0..n_g {
                let m_g = HalfInt::from_twice(2 * i as i32 - j_ground.twice());
                let m_e = m_g + HalfInt::from_twice(2 * q);
                if m_e.twice().abs() > j_excited.twice() {
                    continue;
                }
                let e = ((m_e.twice() + j_excited.twice()) / 2) as usize;
                slot[(e, i)] = clebsch_gordan(j_ground, m_g, q, j_excited)?;
            }
        }
        Ok(Self {
            j_ground,
            j_excited,
            zeta0,
            dzeta0_dk,
            raising,
        })
    }

    /// `J = 1/2 -> J' = 3/2`.
    pub fn half_to_three_halves(zeta0: C64, dzeta0_dk: C64) -> Self {
        Self::new(HalfInt::HALF, HalfInt::from_twice(3), zeta0, dzeta0_dk)
            .expect("valid scheme")
    }

    /// `J = 1 -> J' = 2`.
    pub fn one_to_two(zeta0: C64, dzeta0_dk: C64) -> Self {
        Self::new(HalfInt::ONE, HalfInt::from_twice(4), zeta0, dzeta0_dk).expect("valid scheme")
    }

    pub fn j_ground(&self) -> HalfInt {
        self.j_ground
    }

    pub fn j_excited(&self) -> HalfInt {
        self.j_excited
    }

    pub fn n_ground(&self) -> usize {
        (self.j_ground.twice() + 1) as usize
    }

    pub fn n_excited(&self) -> usize {
        (self.j_excited.twice() + 1) as usize
    }

    /// Magnetic quantum number of ground index `i`.
    pub fn ground_m(&self, i: usize) -> HalfInt {
        HalfInt::from_twice(2 * i as i32 - self.j_ground.twice())
    }

    pub fn ground_index(&self, m: HalfInt) -> Result<usize> {
        let shifted = m.twice() + self.j_ground.twice();
        if shifted < 0 || shifted % 2 != 0 || m.twice() > self.j_ground.twice() {
            return invalid(format!("m = {m} is not a sublevel of j = {}", self.j_ground));
        }
        Ok((shifted / 2) as usize)
    }

    /// Absorption matrix for helicity `q` (`n_excited x n_ground`), entries
    /// `<e| d_q |g>` given by Clebsch-Gordan coefficients.
    pub fn raising(&self, q: i32) -> &DMatrix<f64> {
        &self.raising[(q + 1) as usize]
    }

    /// `chi(i, j) / zeta0`.
    pub fn chi_unit(&self, i: usize, j: usize) -> Result<Jones2> {
        let n = self.n_ground();
        if i >= n || j >= n {
            return invalid(format!("ground index out of range (n = {n}, got {i}, {j})"));
        }
        let dp = self.raising(1);
        let dm = self.raising(-1);
        let mut block = [[0.0; 2]; 2];
        for e in 0..self.n_excited() {
            let left = [dp[(e, i)], dm[(e, i)]];
            let right = [dp[(e, j)], dm[(e, j)]];
            for (a, row) in block.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    *entry += left[a] * right[b];
                }
            }
        }
        Ok(Jones2::new(
            c(block[0][0]),
            c(block[0][1]),
            c(block[1][0]),
            c(block[1][1]),
        ))
    }

    /// Element `<i| chi |j>` of the polarizability operator.
    pub fn chi_element(&self, i: usize, j: usize) -> Result<Jones2> {
        Ok(self.chi_unit(i, j)? * self.zeta0)
    }

    /// `zeta = Tr(rho chi)`, together with its wavenumber derivative.
    pub fn polarizability(&self, rho: &GroundDensityMatrix) -> Result<PolarizabilityTensor> {
        let n = self.n_ground();
        if rho.dim() != n {
            return invalid(format!(
                "density matrix is {0}x{0} but the scheme has {n} ground sublevels",
                rho.dim()
            ));
        }
        let mut unit = Jones2::zeros();
        for i in 0..n {
            for j in 0..n {
                let weight = rho.entries[(j, i)];
                if weight != C64::default() {
                    unit += self.chi_unit(i, j)? * weight;
                }
            }
        }
        Ok(PolarizabilityTensor {
            zeta: unit * self.zeta0,
            dzeta_dk: unit * self.dzeta0_dk,
        })
    }
}

/// Ground-manifold density matrix, indexed by ascending `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundDensityMatrix {
    entries: DMatrix<C64>,
}

impl GroundDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to `1e-12`.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_hermitian_unit_trace(entries)?;
        let min = rho.min_eigenvalue();
        if min < -DENSITY_TOL {
            return invalid(format!("density matrix has negative eigenvalue {min:e}"));
        }
        Ok(rho)
    }

    /// Like [`new`](Self::new) but without the positivity check. First-order
    /// velocity corrections can leave the positive cone where a population
    /// is close to zero.
    pub fn from_hermitian_unit_trace(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return invalid("density matrix must be square and non-empty");
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("density matrix has non-finite entries");
        }
        let herm = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > DENSITY_TOL {
            return invalid(format!("density matrix is not Hermitian (deviation {herm:e})"));
        }
        let tr = entries.trace();
        if (tr - c(1.0)).norm() > DENSITY_TOL {
            return invalid(format!("density matrix trace is {tr}, expected 1"));
        }
        Ok(Self { entries })
    }

    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        let diag: Vec<C64> = populations.iter().map(|&p| c(p)).collect();
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    /// Pure state `|i><i|`.
    pub fn pure(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return invalid(format!("sublevel index {i} out of range for {n} sublevels"));
        }
        let mut m = DMatrix::zeros(n, n);
        m[(i, i)] = c(1.0);
        Ok(Self { entries: m })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    /// Population of ground index `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.entries[(i, i)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.population(i)).collect()
    }

    /// `<i| rho |j>`.
    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.min_eigenvalue() >= -DENSITY_TOL
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `U rho U^dagger`.
    pub fn transformed(&self, unitary: &DMatrix<C64>) -> Result<Self> {
        Self::from_hermitian_unit_trace(unitary * &self.entries * unitary.adjoint())
    }
}

/// Polarizability tensor and its wavenumber derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityTensor {
    pub zeta: Jones2,
    pub dzeta_dk: Jones2,
}

impl PolarizabilityTensor {
    pub fn new(zeta: Jones2, dzeta_dk: Jones2) -> Result<Self> {
        if !is_finite_matrix(&zeta) || !is_finite_matrix(&dzeta_dk) {
            return invalid("polarizability has non-finite entries");
        }
        Ok(Self { zeta, dzeta_dk })
    }

    /// A scatterer without dispersion.
    pub fn constant(zeta: Jones2) -> Self {
        Self {
            zeta,
            dzeta_dk: Jones2::zeros(),
        }
    }

    pub fn transfer_tensor(&self) -> Result<TransferTensor> {
        transfer_tensor(&self.zeta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: f64, b: f64) -> Jones2 {
        Jones2::new(c(a), c(0.0), c(0.0), c(b))
    }

    fn close(a: &Jones2, b: &Jones2, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn chi_blocks_half_to_three_halves() {
        let s = LevelScheme::half_to_three_halves(c(1.0), c(0.0));
        assert!(close(&s.chi_element(0, 0).unwrap(), &diag(1.0 / 3.0, 1.0), 1e-15));
        assert!(close(&s.chi_element(1, 1).unwrap(), &diag(1.0, 1.0 / 3.0), 1e-15));
        assert!(close(&s.chi_element(0, 1).unwrap(), &Jones2::zeros(), 0.0));
        assert!(close(&s.chi_element(1, 0).unwrap(), &Jones2::zeros(), 0.0));
    }

    #[test]
    fn chi_blocks_one_to_two() {
        let s = LevelScheme::one_to_two(c(1.0), c(0.0));
        let sixth = 1.0 / 6.0;
        assert!(close(&s.chi_element(0, 0).unwrap(), &diag(sixth, 1.0), 1e-15));
        assert!(close(&s.chi_element(1, 1).unwrap(), &diag(0.5, 0.5), 1e-15));
        assert!(close(&s.chi_element(2, 2).unwrap(), &diag(1.0, sixth), 1e-15));
        // <-1| chi |+1> carries the sigma+ / sigma- cross coupling above the
        // diagonal, <+1| chi |-1> below it.
        let upper = Jones2::new(c(0.0), c(sixth), c(0.0), c(0.0));
        assert!(close(&s.chi_element(0, 2).unwrap(), &upper, 1e-15));
        assert!(close(&s.chi_element(2, 0).unwrap(), &upper.transpose(), 1e-15));
        assert!(close(&s.chi_element(0, 1).unwrap(), &Jones2::zeros(), 0.0));
    }

    #[test]
    fn chi_scales_with_zeta0() {
        let z0 = C64::new(0.02, -0.01);
        let s = LevelScheme::one_to_two(z0, c(0.0));
        let unit = LevelScheme::one_to_two(c(1.0), c(0.0));
        for i in 0..3 {
            for j in 0..3 {
                let a = s.chi_element(i, j).unwrap();
                let b = unit.chi_element(i, j).unwrap() * z0;
                assert!(close(&a, &b, 1e-16));
            }
        }
    }

    #[test]
    fn polarizability_of_population_mixtures() {
        let s = LevelScheme::half_to_three_halves(c(1.0), c(0.0));
        let theta = std::f64::consts::FRAC_PI_4;
        let (cs, sn) = (theta.cos().powi(2), theta.sin().powi(2));
        let rho = GroundDensityMatrix::from_populations(&[cs, sn]).unwrap();
        let z = s.polarizability(&rho).unwrap().zeta;
        assert!(close(&z, &diag(2.0 / 3.0, 2.0 / 3.0), 1e-15));

        let s = LevelScheme::one_to_two(c(1.0), c(0.0));
        let rho = GroundDensityMatrix::from_populations(&[0.0, 1.0, 0.0]).unwrap();
        assert!(close(&s.polarizability(&rho).unwrap().zeta, &diag(0.5, 0.5), 1e-15));
    }

    #[test]
    fn polarizability_dimension_mismatch() {
        let s = LevelScheme::one_to_two(c(1.0), c(0.0));
        let rho = GroundDensityMatrix::from_populations(&[0.5, 0.5]).unwrap();
        assert!(s.polarizability(&rho).is_err());
    }

    #[test]
    fn derivative_tracks_dzeta0() {
        let s = LevelScheme::one_to_two(c(0.01), C64::new(0.0, 3.0));
        let rho = GroundDensityMatrix::from_populations(&[0.25, 0.5, 0.25]).unwrap();
        let p = s.polarizability(&rho).unwrap();
        assert!(close(&(p.zeta * C64::new(0.0, 300.0)), &p.dzeta_dk, 1e-13));
    }

    #[test]
    fn scheme_validation() {
        let h = HalfInt::from_twice;
        assert!(LevelScheme::new(h(1), h(5), c(0.1), c(0.0)).is_err());
        assert!(LevelScheme::new(h(0), h(0), c(0.1), c(0.0)).is_err());
        assert!(LevelScheme::new(h(1), h(2), c(0.1), c(0.0)).is_err());
        assert!(LevelScheme::new(h(2), h(2), c(0.1), c(0.0)).is_ok());
        assert!(LevelScheme::new(h(2), h(0), c(f64::NAN), c(0.0)).is_err());
        let s = LevelScheme::new(h(3), h(5), c(0.1), c(0.0)).unwrap();
        assert_eq!(s.n_ground(), 4);
        assert_eq!(s.n_excited(), 6);
        assert_eq!(s.ground_index(h(-3)).unwrap(), 0);
        assert!(s.ground_index(h(2)).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = DMatrix::from_diagonal_element(2, 2, c(0.6));
        assert!(GroundDensityMatrix::new(bad_trace).is_err());
        let mut not_herm = DMatrix::from_diagonal_element(2, 2, c(0.5));
        not_herm[(0, 1)] = C64::new(0.1, 0.1);
        assert!(GroundDensityMatrix::new(not_herm).is_err());
        assert!(GroundDensityMatrix::from_populations(&[1.5, -0.5]).is_err());
        assert!(GroundDensityMatrix::from_hermitian_unit_trace(DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![c(1.5), c(-0.5)])
        ))
        .is_ok());
    }
}
