//! Operators on the truncated Fock space of the cavity mode, on the two-level
//! atom, and on the composite atom ⊗ field space.
//!
//! Basis conventions used everywhere in the crate:
//!
//! - the atom basis is ordered (g, e), so index 0 is the ground state;
//! - the field basis is |0⟩, …, |N−1⟩ for a Fock cutoff N;
//! - in the composite space the atom index is the slow (outer) index and the
//!   photon number the fast (inner) one, so |α⟩⊗|n⟩ sits at `α·N + n`.
//!
//! Rates and frequencies are dimensionless (ħ = 1, everything in units of the
//! cavity damping rate κ).

use std::fmt;
use std::str::FromStr;

use faer::{Mat, Side};
use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dimension of the atomic Hilbert space.
pub const ATOM_DIM: usize = 2;

/// Extra Fock levels used when exponentiating the displacement generator.
pub const DEFAULT_PAD: usize = 20;

/// Dimensions of the composite atom ⊗ field space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceDims {
    fock_cutoff: usize,
}

impl SpaceDims {
    pub fn new(fock_cutoff: usize) -> Result<Self> {
        check_cutoff(fock_cutoff)?;
        Ok(SpaceDims { fock_cutoff })
    }

    pub fn atom_dim(&self) -> usize {
        ATOM_DIM
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn total_dim(&self) -> usize {
        ATOM_DIM * self.fock_cutoff
    }

    /// Flat index of |level⟩⊗|n⟩.
    pub fn index(&self, level: Level, n: usize) -> usize {
        level.index() * self.fock_cutoff + n
    }
}

/// The space an [`Operator`] (or state) acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// The bare two-level atom.
    Atom,
    /// The cavity mode alone, truncated at the given cutoff.
    Field(usize),
    /// Atom ⊗ field.
    Composite(SpaceDims),
}

impl Space {
    /// Field-only space with a validated cutoff.
    pub fn field(fock_cutoff: usize) -> Result<Self> {
        check_cutoff(fock_cutoff)?;
        Ok(Space::Field(fock_cutoff))
    }

    /// Composite space with a validated cutoff.
    pub fn composite(fock_cutoff: usize) -> Result<Self> {
        Ok(Space::Composite(SpaceDims::new(fock_cutoff)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Atom => ATOM_DIM,
            Space::Field(n) => *n,
            Space::Composite(dims) => dims.total_dim(),
        }
    }

    pub fn fock_cutoff(&self) -> Option<usize> {
        match self {
            Space::Atom => None,
            Space::Field(n) => Some(*n),
            Space::Composite(dims) => Some(dims.fock_cutoff()),
        }
    }

    pub fn has_atom(&self) -> bool {
        !matches!(self, Space::Field(_))
    }

    /// The same kind of space with a different Fock cutoff.
    pub fn with_cutoff(&self, fock_cutoff: usize) -> Result<Self> {
        match self {
            Space::Atom => Err(Error::InvalidDimension(
                "the atomic space has no Fock cutoff".into(),
            )),
            Space::Field(_) => Space::field(fock_cutoff),
            Space::Composite(_) => Space::composite(fock_cutoff),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Atom => write!(f, "atom(2)"),
            Space::Field(n) => write!(f, "field({n})"),
            Space::Composite(d) => write!(f, "atom(2)⊗field({})", d.fock_cutoff()),
        }
    }
}

fn check_cutoff(fock_cutoff: usize) -> Result<()> {
    if fock_cutoff < 2 {
        return Err(Error::InvalidDimension(format!(
            "Fock cutoff must be at least 2, got {fock_cutoff}"
        )));
    }
    Ok(())
}

/// Atomic level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(Level::Ground),
            "e" => Ok(Level::Excited),
            other => Err(Error::InvalidLabel(other.to_string())),
        }
    }
}

/// Which factor of the composite space an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    Atom,
    Field,
}

/// Dense complex matrix tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(space: Space, matrix: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix does not act on {space} (dimension {d})",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Operator { space, matrix })
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Operator { space, matrix: Array2::zeros((d, d)) }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Operator { space, matrix: Array2::eye(d) }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Operator {
        Operator {
            space: self.space,
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    pub fn scaled(&self, factor: impl Into<C64>) -> Operator {
        let factor = factor.into();
        Operator { space: self.space, matrix: &self.matrix * factor }
    }

    fn same_space(&self, other: &Operator, what: &str) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch(format!(
                "cannot {what} operators on {} and {}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other, "multiply")?;
        Ok(Operator { space: self.space, matrix: self.matrix.dot(&other.matrix) })
    }

    pub fn plus(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other, "add")?;
        Ok(Operator { space: self.space, matrix: &self.matrix + &other.matrix })
    }

    pub fn minus(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other, "subtract")?;
        Ok(Operator { space: self.space, matrix: &self.matrix - &other.matrix })
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.compose(other)?.minus(&other.compose(self)?)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.same_space(other, "compare")?;
        Ok(max_abs_diff(&self.matrix, &other.matrix))
    }

    /// Largest entrywise modulus of `self − self†`.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    /// Lift onto the composite space; see [`lift`].
    pub fn lifted(&self, dims: SpaceDims) -> Result<Operator> {
        match self.space {
            Space::Atom => lift(self, Subsystem::Atom, dims),
            Space::Field(_) => lift(self, Subsystem::Field, dims),
            Space::Composite(d) if d == dims => Ok(self.clone()),
            Space::Composite(d) => Err(Error::DimensionMismatch(format!(
                "operator on cutoff {} cannot be used with cutoff {}",
                d.fock_cutoff(),
                dims.fock_cutoff()
            ))),
        }
    }

    /// Embed a field or atom operator into `space`; a no-op when it already acts there.
    pub fn embedded_in(&self, space: Space) -> Result<Operator> {
        match space {
            Space::Composite(dims) => self.lifted(dims),
            _ if space == self.space => Ok(self.clone()),
            _ => Err(Error::DimensionMismatch(format!(
                "cannot embed an operator on {} into {space}",
                self.space
            ))),
        }
    }
}

pub(crate) fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_error(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Kronecker product `a ⊗ b` (a is the slow index).
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &aij) in a.indexed_iter() {
        if aij == C64::new(0.0, 0.0) {
            continue;
        }
        out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
            .assign(&b.mapv(|x| aij * x));
    }
    out
}

/// Cavity annihilation operator a with ⟨n−1|a|n⟩ = √n.
pub fn annihilation(fock_cutoff: usize) -> Result<Operator> {
    let space = Space::field(fock_cutoff)?;
    let mut m = Array2::zeros((fock_cutoff, fock_cutoff));
    for n in 1..fock_cutoff {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::new(space, m)
}

/// Cavity creation operator a†.
pub fn creation(fock_cutoff: usize) -> Result<Operator> {
    Ok(annihilation(fock_cutoff)?.dagger())
}

/// Photon-number operator a†a, built directly as diag(0, 1, …, N−1).
pub fn number(fock_cutoff: usize) -> Result<Operator> {
    let space = Space::field(fock_cutoff)?;
    let m = Array2::from_diag(&ndarray::Array1::from_iter(
        (0..fock_cutoff).map(|n| C64::new(n as f64, 0.0)),
    ));
    Operator::new(space, m)
}

/// Atomic transition operator σ_ij = |i⟩⟨j|.
pub fn atom_sigma(i: Level, j: Level) -> Operator {
    let mut m = Array2::zeros((ATOM_DIM, ATOM_DIM));
    m[[i.index(), j.index()]] = C64::new(1.0, 0.0);
    Operator { space: Space::Atom, matrix: m }
}

/// Embed a single-subsystem operator into the composite space by tensoring
/// with the identity on the other factor.
pub fn lift(op: &Operator, subsystem: Subsystem, dims: SpaceDims) -> Result<Operator> {
    let n = dims.fock_cutoff();
    let matrix = match (subsystem, op.space) {
        (Subsystem::Atom, Space::Atom) => kron(&op.matrix, &Array2::eye(n)),
        (Subsystem::Field, Space::Field(m)) if m == n => kron(&Array2::eye(ATOM_DIM), &op.matrix),
        _ => {
            return Err(Error::InvalidDimension(format!(
                "cannot lift an operator on {} as the {subsystem:?} factor of {}",
                op.space,
                Space::Composite(dims)
            )))
        }
    };
    Operator::new(Space::Composite(dims), matrix)
}

/// Photon-number parity diag((−1)^n).
pub fn parity(fock_cutoff: usize) -> Result<Operator> {
    let space = Space::field(fock_cutoff)?;
    let m = Array2::from_diag(&ndarray::Array1::from_iter(
        (0..fock_cutoff).map(|n| C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)),
    ));
    Operator::new(space, m)
}

/// Bogoliubov mode b = cosh(r)·a − sinh(r)·a†.
pub fn bogoliubov_b(r: f64, fock_cutoff: usize) -> Result<Operator> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidParameter(format!("squeezing strength must be ≥ 0, got {r}")));
    }
    let a = annihilation(fock_cutoff)?;
    a.scaled(r.cosh()).minus(&a.dagger().scaled(r.sinh()))
}

/// Displacement operator D(α) = exp(α a† − α* a), exponentiated on a Fock
/// space padded by `pad` levels and truncated back to `fock_cutoff`.
pub fn displacement(alpha: C64, fock_cutoff: usize, pad: usize) -> Result<Operator> {
    Ok(Displacer::new(fock_cutoff, pad)?.operator(alpha))
}

/// Reusable displacement-operator generator.
///
/// With α = |α|e^{iθ} the generator is α a† − α* a = i|α| R X R† where
/// X = a + a† is real symmetric tridiagonal and R = diag(e^{iψn}),
/// ψ = θ − π/2. Diagonalising X once on the padded space gives every D(α)
/// as R V e^{i|α|Λ} Vᵀ R†.
#[derive(Clone, Debug)]
pub struct Displacer {
    fock_cutoff: usize,
    pad: usize,
    eigenvalues: Vec<f64>,
    /// Eigenvectors of X, restricted to the first `fock_cutoff` rows.
    vectors: Array2<f64>,
}

impl Displacer {
    pub fn new(fock_cutoff: usize, pad: usize) -> Result<Self> {
        check_cutoff(fock_cutoff)?;
        let padded = fock_cutoff + pad;
        let x = Mat::<f64>::from_fn(padded, padded, |i, j| {
            if j == i + 1 {
                (j as f64).sqrt()
            } else if i == j + 1 {
                (i as f64).sqrt()
            } else {
                0.0
            }
        });
        let evd = x.self_adjoint_eigen(Side::Lower).map_err(|e| {
            Error::InvalidDimension(format!("eigendecomposition of a + a† failed: {e:?}"))
        })?;
        let u = evd.U();
        let eigenvalues: Vec<f64> = evd.S().column_vector().iter().copied().collect();
        let vectors = Array2::from_shape_fn((fock_cutoff, padded), |(i, k)| u[(i, k)]);
        Ok(Displacer { fock_cutoff, pad, eigenvalues, vectors })
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    /// Truncated matrix of D(α).
    pub fn matrix(&self, alpha: C64) -> Array2<C64> {
        let n = self.fock_cutoff;
        let radius = alpha.norm();
        let psi = alpha.arg() - std::f64::consts::FRAC_PI_2;
        let phases: Vec<C64> =
            self.eigenvalues.iter().map(|&l| C64::from_polar(1.0, radius * l)).collect();

        // W = V · diag(phases), then D_mn = e^{iψ(m−n)} Σ_k W_mk V_nk.
        let weighted = Array2::from_shape_fn(self.vectors.dim(), |(i, k)| {
            phases[k] * self.vectors[[i, k]]
        });
        let vt = self.vectors.t().mapv(|v| C64::new(v, 0.0));
        let mut d = weighted.dot(&vt);
        let rot: Vec<C64> = (0..n).map(|m| C64::from_polar(1.0, psi * m as f64)).collect();
        for ((m, k), v) in d.indexed_iter_mut() {
            *v *= rot[m] * rot[k].conj();
        }
        d
    }

    pub fn operator(&self, alpha: C64) -> Operator {
        Operator { space: Space::Field(self.fock_cutoff), matrix: self.matrix(alpha) }
    }
}

/// ‖D†D − I‖_max over the first `fock_cutoff − guard` columns, a measure of
/// how much a truncated displacement departs from unitarity.
pub fn unitarity_defect(d: &Operator, guard: usize) -> f64 {
    let n = d.dim();
    let keep = n.saturating_sub(guard);
    let dd = d.dagger().matrix.dot(&d.matrix);
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..keep {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dd[[i, j]] - target).norm());
        }
    }
    worst
}
