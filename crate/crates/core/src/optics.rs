//! Immobile linear optical elements and the self-consistent solution of a
//! system containing one atom.
//!
//! Element tensors from [`element_tensor`] are local: they relate amplitudes
//! just left and right of the element plane. Inside a [`System`] every
//! element is placed at its `position`, and free propagation between
//! elements is implied by referencing all amplitudes to `x = 0`. A `Gap`
//! element adds extra optical path on top of that, like a thin delay plate.
//!
//! Polarization matrices for waveplates and rotators are given in the lab
//! `(x, y)` frame and converted to the circular basis. Backward propagation
//! uses the transposed lab-frame matrix (reciprocity).

use std::f64::consts::FRAC_1_SQRT_2;

use crate::atom::{GroundDensityMatrix, LevelScheme};
use crate::bloch::{steady_state_with, FieldProfile, GeneratorOptions, LocalField};
use crate::error::{invalid, Error, Result};
use crate::jones::{
    c, embedded_incident, transfer_tensor, Jones2, JonesVector, ModeQuartet, TransferTensor,
    TwoPort, C64, I,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    /// The single multilevel atom of a system; its tensor depends on its
    /// internal state.
    Atom,
    /// Thin two-port with per-helicity reflection and transmission.
    Mirror {
        reflectivity: [C64; 2],
        transmissivity: [C64; 2],
    },
    /// Linear retarder: `retardance` between fast and slow axes, fast axis
    /// at `axis` radians from x.
    Waveplate { retardance: f64, axis: f64 },
    /// Extra optical path.
    Gap { length: f64 },
    /// Reciprocal polarization rotator.
    Rotator { angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub position: f64,
}

impl Element {
    pub fn atom(position: f64) -> Self {
        Self {
            kind: ElementKind::Atom,
            position,
        }
    }

    pub fn mirror(reflectivity: [C64; 2], transmissivity: [C64; 2], position: f64) -> Self {
        Self {
            kind: ElementKind::Mirror {
                reflectivity,
                transmissivity,
            },
            position,
        }
    }

    /// Polarization-independent lossless mirror with real amplitude
    /// reflectivity `r`; transmission is `i sqrt(1 - r^2)`.
    pub fn lossless_mirror(r: f64, position: f64) -> Self {
        let t = I * (1.0 - r * r).max(0.0).sqrt();
        Self::mirror([c(r); 2], [t; 2], position)
    }

    pub fn perfect_mirror(position: f64) -> Self {
        Self::mirror([c(-1.0); 2], [c(0.0); 2], position)
    }

    pub fn waveplate(retardance: f64, axis: f64, position: f64) -> Self {
        Self {
            kind: ElementKind::Waveplate { retardance, axis },
            position,
        }
    }

    pub fn gap(length: f64, position: f64) -> Self {
        Self {
            kind: ElementKind::Gap { length },
            position,
        }
    }

    pub fn rotator(angle: f64, position: f64) -> Self {
        Self {
            kind: ElementKind::Rotator { angle },
            position,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ElementKind::Atom => "atom",
            ElementKind::Mirror { .. } => "mirror",
            ElementKind::Waveplate { .. } => "waveplate",
            ElementKind::Gap { .. } => "gap",
            ElementKind::Rotator { .. } => "rotator",
        }
    }
}

/// Lab-frame `(x, y)` matrix to the circular basis.
fn to_circular(linear: &Jones2) -> Jones2 {
    let u = Jones2::new(c(1.0), -I, c(-1.0), -I) * c(FRAC_1_SQRT_2);
    u * linear * u.adjoint()
}

fn rotation(angle: f64) -> Jones2 {
    let (s, cs) = angle.sin_cos();
    Jones2::new(c(cs), c(-s), c(s), c(cs))
}

/// Local two-port of a linear element.
pub fn element_two_port(e: &Element, k: f64) -> Result<TwoPort> {
    match e.kind {
        ElementKind::Atom => Err(Error::Unsupported(
            "the atom's tensor depends on its state; use transfer_tensor with its polarizability"
                .into(),
        )),
        ElementKind::Mirror {
            reflectivity,
            transmissivity,
        } => {
            for (r, t) in reflectivity.iter().zip(&transmissivity) {
                let finite = [r, t].iter().all(|z| z.re.is_finite() && z.im.is_finite());
                if !finite {
                    return invalid("mirror coefficients must be finite");
                }
                if r.norm() > 1.0 + 1e-12 {
                    return invalid(format!("mirror reflectivity |r| = {} exceeds 1", r.norm()));
                }
                if r.norm_sqr() + t.norm_sqr() > 1.0 + 1e-12 {
                    return invalid("mirror has gain: |r|^2 + |t|^2 > 1");
                }
            }
            let r = Jones2::new(reflectivity[0], c(0.0), c(0.0), reflectivity[1]);
            let t = Jones2::new(transmissivity[0], c(0.0), c(0.0), transmissivity[1]);
            Ok(TwoPort {
                r_left: r,
                t_forward: t,
                t_backward: t,
                r_right: r,
            })
        }
        ElementKind::Waveplate { retardance, axis } => {
            if !retardance.is_finite() || !axis.is_finite() {
                return invalid("waveplate parameters must be finite");
            }
            let retarder = Jones2::new(c(1.0), c(0.0), c(0.0), C64::from_polar(1.0, retardance));
            let lab = rotation(axis) * retarder * rotation(-axis);
            Ok(non_reflecting(&lab))
        }
        ElementKind::Gap { length } => {
            if !(length >= 0.0) || !length.is_finite() {
                return invalid(format!("gap length must be non-negative (got {length})"));
            }
            let phase = Jones2::identity() * C64::from_polar(1.0, k * length);
            Ok(TwoPort {
                r_left: Jones2::zeros(),
                t_forward: phase,
                t_backward: phase,
                r_right: Jones2::zeros(),
            })
        }
        ElementKind::Rotator { angle } => {
            if !angle.is_finite() {
                return invalid("rotator angle must be finite");
            }
            Ok(non_reflecting(&rotation(angle)))
        }
    }
}

fn non_reflecting(lab: &Jones2) -> TwoPort {
    TwoPort {
        r_left: Jones2::zeros(),
        t_forward: to_circular(lab),
        t_backward: to_circular(&lab.transpose()),
        r_right: Jones2::zeros(),
    }
}

/// Local transfer tensor of a linear element. Fails for opaque elements
/// (a perfect mirror has no transfer tensor) and for the atom.
pub fn element_tensor(e: &Element, k: f64) -> Result<TransferTensor> {
    element_two_port(e, k)?.to_transfer().map_err(|_| Error::Singular {
        element: format!("{} at {} (zero transmission)", e.name(), e.position),
    })
}

/// Left-to-right arrangement of elements at strictly increasing positions.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    elements: Vec<Element>,
}

impl System {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        for e in &elements {
            if !e.position.is_finite() {
                return invalid(format!("{} has a non-finite position", e.name()));
            }
        }
        for pair in elements.windows(2) {
            if !(pair[1].position > pair[0].position) {
                return invalid(format!(
                    "elements must be at strictly increasing positions ({} at {} follows {} at {})",
                    pair[1].name(),
                    pair[1].position,
                    pair[0].name(),
                    pair[0].position
                ));
            }
        }
        let atoms = elements
            .iter()
            .filter(|e| e.kind == ElementKind::Atom)
            .count();
        if atoms > 1 {
            return Err(Error::Unsupported(format!(
                "{atoms} atoms in one system; only a single atom is supported"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn atom_index(&self) -> Option<usize> {
        self.elements.iter().position(|e| e.kind == ElementKind::Atom)
    }

    /// Moves the atom to `position`, re-sorting it among the other
    /// elements.
    pub fn with_atom_at(&self, position: f64) -> Result<Self> {
        let idx = self
            .atom_index()
            .ok_or_else(|| Error::Unsupported("system has no atom".into()))?;
        let mut elements = self.elements.clone();
        let mut atom = elements.remove(idx);
        atom.position = position;
        let at = elements.partition_point(|e| e.position < position);
        elements.insert(at, atom);
        Self::new(elements)
    }

    fn placed_two_port(e: &Element, k: f64, atom_zeta: Option<&Jones2>) -> Result<TwoPort> {
        let local = match (e.kind, atom_zeta) {
            (ElementKind::Atom, Some(zeta)) => transfer_tensor(zeta)?.to_two_port()?,
            (ElementKind::Atom, None) => TwoPort::identity(),
            _ => element_two_port(e, k)?,
        };
        Ok(local.at_position(k, e.position))
    }

    fn star_range(&self, range: &[Element], k: f64, atom_zeta: Option<&Jones2>) -> Result<TwoPort> {
        range.iter().try_fold(TwoPort::identity(), |acc, e| {
            acc.star(&Self::placed_two_port(e, k, atom_zeta)?)
        })
    }

    /// Whole-system two-port with the atom (if any) at polarizability
    /// `atom_zeta`; `None` makes the atom transparent.
    pub fn two_port(&self, k: f64, atom_zeta: Option<&Jones2>) -> Result<TwoPort> {
        self.star_range(&self.elements, k, atom_zeta)
    }

    /// Product of the placed element tensors.
    pub fn transfer_tensor(&self, k: f64, atom_zeta: Option<&Jones2>) -> Result<TransferTensor> {
        let mut total = TransferTensor::identity();
        for e in &self.elements {
            let local = match (e.kind, atom_zeta) {
                (ElementKind::Atom, Some(zeta)) => transfer_tensor(zeta)?,
                (ElementKind::Atom, None) => TransferTensor::identity(),
                _ => element_tensor(e, k)?,
            };
            total = total * local.at_position(k, e.position);
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the largest change of a density-matrix entry.
    pub tolerance: f64,
    /// Fraction of the new state mixed in per iteration; 1 is plain
    /// substitution.
    pub damping: f64,
    pub seed: Option<GroundDensityMatrix>,
    pub generator: GeneratorOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-12,
            damping: 1.0,
            seed: None,
            generator: GeneratorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    /// Field driving the atom: sum of the two incident waves at its position.
    pub local_field: LocalField,
    /// Local amplitudes around the atom: incident `b_in`/`c_in` and the
    /// waves leaving it.
    pub atom_modes: ModeQuartet,
    /// Amplitudes at the system boundary, referenced to `x = 0`.
    pub boundary: ModeQuartet,
    pub rho: GroundDensityMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// Self-consistent state of the single atom in `elements`, illuminated by
/// `b_in` from the left and `c_in` from the right (plane-wave amplitudes
/// referenced to `x = 0`).
pub fn solve_system(
    elements: &[Element],
    b_in: &JonesVector,
    c_in: &JonesVector,
    scheme: &LevelScheme,
    options: &SolveOptions,
) -> Result<SystemSolution> {
    let system = System::new(elements.to_vec())?;
    let idx = system
        .atom_index()
        .ok_or_else(|| Error::Unsupported("system has no atom".into()))?;
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return invalid("damping must lie in (0, 1]");
    }
    let b = b_in.to_circular();
    let cc = c_in.to_circular();
    b.ensure_compatible(&cc)?;
    let k = b.k;
    let x_atom = system.elements[idx].position;

    let left = system.star_range(&system.elements[..idx], k, None)?;
    let right = system.star_range(&system.elements[idx + 1..], k, None)?;
    let (bv, cv) = (b.as_vector(), cc.as_vector());
    let forward = C64::from_polar(1.0, k * x_atom);

    let local_field_for = |atom: &TwoPort| -> Result<(LocalField, JonesVector, JonesVector)> {
        let (u, w) = embedded_incident(&left, atom, &right, &bv, &cv)?;
        let u_local = JonesVector::from_vector(u * forward, k);
        let w_local = JonesVector::from_vector(w * forward.conj(), k);
        Ok((LocalField::from_modes(&u_local, &w_local, x_atom)?, u_local, w_local))
    };
    let atom_port = |rho: &GroundDensityMatrix| -> Result<(Jones2, TwoPort)> {
        let zeta = scheme.polarizability(rho)?.zeta;
        let port = transfer_tensor(&zeta)?
            .to_two_port()?
            .at_position(k, x_atom);
        Ok((zeta, port))
    };

    let mut rho = match &options.seed {
        Some(seed) => seed.clone(),
        None => {
            let (field, _, _) = local_field_for(&TwoPort::identity())?;
            steady_state_with(scheme, &field, &options.generator)?
        }
    };

    let mut residual = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        let (_, port) = atom_port(&rho)?;
        let (field, _, _) = local_field_for(&port)?;
        let next = steady_state_with(scheme, &field, &options.generator)?;
        residual = next.max_abs_diff(&rho);
        if residual < options.tolerance {
            return finish(
                &system, idx, k, &b, &cc, next, iteration, residual, &atom_port, &local_field_for,
            );
        }
        rho = if options.damping == 1.0 {
            next
        } else {
            let mixed = rho.entries() * c(1.0 - options.damping) + next.entries() * c(options.damping);
            GroundDensityMatrix::new(mixed)?
        };
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        residual,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish<P, L>(
    system: &System,
    idx: usize,
    k: f64,
    b: &JonesVector,
    cc: &JonesVector,
    rho: GroundDensityMatrix,
    iterations: usize,
    residual: f64,
    atom_port: &P,
    local_field_for: &L,
) -> Result<SystemSolution>
where
    P: Fn(&GroundDensityMatrix) -> Result<(Jones2, TwoPort)>,
    L: Fn(&TwoPort) -> Result<(LocalField, JonesVector, JonesVector)>,
{
    let (zeta, port) = atom_port(&rho)?;
    let (local_field, u, w) = local_field_for(&port)?;
    let local_port = transfer_tensor(&zeta)?.to_two_port()?;
    let atom_modes = local_port.apply(&u, &w)?;
    let boundary = system.two_port(k, Some(&zeta))?.apply(b, cc)?;
    debug_assert_eq!(system.elements[idx].kind, ElementKind::Atom);
    Ok(SystemSolution {
        local_field,
        atom_modes,
        boundary,
        rho,
        iterations,
        residual,
    })
}

/// The atom's self-consistent environment as a function of its position,
/// all other elements held fixed.
#[derive(Debug, Clone)]
pub struct SystemProfile {
    pub system: System,
    pub b_in: JonesVector,
    pub c_in: JonesVector,
    pub scheme: LevelScheme,
    pub options: SolveOptions,
}

impl SystemProfile {
    pub fn solve_at(&self, x: f64) -> Result<SystemSolution> {
        let moved = self.system.with_atom_at(x)?;
        solve_system(moved.elements(), &self.b_in, &self.c_in, &self.scheme, &self.options)
    }

    /// Local rightward and leftward amplitudes incident on the atom at `x`.
    pub fn local_beams(&self, x: f64) -> Result<(JonesVector, JonesVector)> {
        let s = self.solve_at(x)?;
        Ok((s.atom_modes.b_in, s.atom_modes.c_in))
    }
}

impl FieldProfile for SystemProfile {
    fn wavenumber(&self) -> f64 {
        self.b_in.k
    }

    fn field_at(&self, x: f64) -> Result<LocalField> {
        Ok(self.solve_at(x)?.local_field)
    }

    fn steady_state_at(&self, _scheme: &LevelScheme, x: f64) -> Result<GroundDensityMatrix> {
        Ok(self.solve_at(x)?.rho)
    }
}
