//! Steady states and time evolution of Liouvillian generators, plus the
//! truncation bookkeeping that certifies a Fock cutoff.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::lindblad::{unvectorize, vectorize, Superoperator};
use crate::observables::photon_populations;
use crate::ops::{self, Space, C64};

/// Tolerated deviation of Tr ρ from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerated anti-Hermitian part of a raw solver output.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted before a state is declared corrupted.
pub const MIN_EIGENVALUE_TOL: f64 = -1e-8;
/// Largest accepted ‖L·vec(ρ)‖_∞ for a steady state.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Default bound on the population of the guard levels.
pub const DEFAULT_TRUNCATION_EPSILON: f64 = 1e-8;
/// Largest accepted |Tr ρ(t) − 1| during time evolution.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Explicit steps must satisfy dt·Λ ≤ this, Λ the generator's rate scale.
pub const STABILITY_FACTOR: f64 = 0.05;
const REFINEMENT_STEPS: usize = 2;

/// Default number of monitored top Fock levels: max(4, N/5), kept below N.
pub fn default_guard(fock_cutoff: usize) -> usize {
    (fock_cutoff / 5).max(4).min(fock_cutoff.saturating_sub(1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// |Tr ρ − 1| of the stored matrix.
    pub trace_error: f64,
    /// max |ρ − ρ†| of the matrix as produced, before hermitization.
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// Photon population of the default guard levels.
    pub tail_mass: f64,
}

/// Hermitian, unit-trace, positive-semidefinite state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: Space,
    matrix: Array2<C64>,
    diagnostics: Diagnostics,
}

impl DensityMatrix {
    /// Hermitize, normalize and validate a raw matrix.
    pub fn from_matrix(space: Space, mut matrix: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.dim() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix is not a state on {space}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::CorruptedState("non-finite matrix entries".into()));
        }
        let hermiticity_error = ops::hermiticity_error(&matrix);
        let adjoint = matrix.t().mapv(|z| z.conj());
        matrix = (&matrix + &adjoint) * C64::new(0.5, 0.0);
        let trace: f64 = matrix.diag().iter().map(|z| z.re).sum();
        if !trace.is_finite() || trace.abs() <= f64::EPSILON {
            return Err(Error::CorruptedState(format!("trace {trace} cannot be normalized")));
        }
        matrix.mapv_inplace(|z| z / trace);
        let trace_error = (matrix.diag().iter().map(|z| z.re).sum::<f64>() - 1.0).abs();

        let min_eigenvalue = hermitian_eigenvalues(&matrix)?.first().copied().unwrap_or(0.0);
        if min_eigenvalue < MIN_EIGENVALUE_TOL {
            return Err(Error::CorruptedState(format!(
                "eigenvalue {min_eigenvalue:.3e} below {MIN_EIGENVALUE_TOL:.0e}"
            )));
        }
        let tail_mass = match space.fock_cutoff() {
            Some(n) => {
                let pops = photon_populations(space, &matrix);
                pops[n - default_guard(n)..].iter().sum()
            }
            None => 0.0,
        };
        Ok(DensityMatrix {
            space,
            matrix,
            diagnostics: Diagnostics { trace_error, hermiticity_error, min_eigenvalue, tail_mass },
        })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) state vector.
    pub fn pure(space: Space, psi: &[C64]) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} is not a state on {space}",
                psi.len()
            )));
        }
        let m = Array2::from_shape_fn((psi.len(), psi.len()), |(i, j)| psi[i] * psi[j].conj());
        Self::from_matrix(space, m)
    }

    /// Basis projector |k⟩⟨k|.
    pub fn basis(space: Space, k: usize) -> Result<Self> {
        let d = space.dim();
        if k >= d {
            return Err(Error::InvalidDimension(format!("basis index {k} outside {space}")));
        }
        let mut m = Array2::zeros((d, d));
        m[[k, k]] = C64::new(1.0, 0.0);
        Self::from_matrix(space, m)
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

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Trace norm ‖self − other‖₁.
    pub fn trace_norm_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch(format!(
                "cannot compare states on {} and {}",
                self.space, other.space
            )));
        }
        let diff = &self.matrix - &other.matrix;
        Ok(hermitian_eigenvalues(&diff)?.iter().map(|l| l.abs()).sum())
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub(crate) fn hermitian_eigenvalues(m: &Array2<C64>) -> Result<Vec<f64>> {
    let mat = Mat::<C64>::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]]);
    mat.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::CorruptedState(format!("eigenvalue solver failed: {e:?}")))
}

/// Population of the guard levels of a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailReport {
    pub fock_cutoff: usize,
    pub guard: usize,
    pub tail_mass: f64,
    pub epsilon: f64,
    pub adequate: bool,
}

impl TailReport {
    /// Cutoff worth retrying with when this one is inadequate.
    pub fn suggested_cutoff(&self) -> usize {
        let grown = (self.fock_cutoff * 3).div_ceil(2).max(self.fock_cutoff + self.guard);
        grown + grown % 2
    }

    fn into_error(self) -> Error {
        Error::CutoffTooSmall {
            cutoff: self.fock_cutoff,
            tail_mass: self.tail_mass,
            epsilon: self.epsilon,
            suggested: self.suggested_cutoff(),
        }
    }
}

/// Sum the photon populations of the top `guard` Fock levels (atom traced out).
pub fn check_truncation(rho: &DensityMatrix, guard: usize, epsilon: f64) -> Result<TailReport> {
    let n = rho
        .space()
        .fock_cutoff()
        .ok_or_else(|| Error::DimensionMismatch("state has no cavity mode".into()))?;
    if guard >= n {
        return Err(Error::InvalidParameter(format!("guard {guard} must be below the cutoff {n}")));
    }
    let pops = photon_populations(rho.space(), rho.matrix());
    let tail_mass: f64 = pops[n - guard..].iter().sum();
    Ok(TailReport { fock_cutoff: n, guard, tail_mass, epsilon, adequate: tail_mass < epsilon })
}

/// How steady states are certified against the Fock cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    /// Number of guard levels; `None` selects [`default_guard`].
    pub guard: Option<usize>,
    pub epsilon: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { guard: None, epsilon: DEFAULT_TRUNCATION_EPSILON }
    }
}

impl TruncationPolicy {
    /// Never rejects a state on truncation grounds.
    pub fn unchecked() -> Self {
        TruncationPolicy { guard: None, epsilon: f64::INFINITY }
    }

    pub fn guard_for(&self, fock_cutoff: usize) -> usize {
        self.guard
            .unwrap_or_else(|| default_guard(fock_cutoff))
            .min(fock_cutoff.saturating_sub(1))
    }

    pub fn report(&self, rho: &DensityMatrix) -> Result<TailReport> {
        let n = rho.space().fock_cutoff().unwrap_or(0);
        check_truncation(rho, self.guard_for(n), self.epsilon)
    }
}

/// Unknowns connected (through the sparsity pattern) to the diagonal of ρ.
///
/// The trace row couples every diagonal entry, so the steady state is
/// supported on this component; the remaining unknowns form decoupled
/// homogeneous blocks and are set to zero.
fn trace_component(l: &Superoperator) -> Vec<bool> {
    let n = l.size();
    let d = l.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for (r, c, _) in l.entries() {
        if r != 0 {
            union(&mut parent, r, c);
        }
    }
    for k in 1..d {
        union(&mut parent, 0, k * (d + 1));
    }
    let root = find(&mut parent, 0);
    (0..n).map(|x| find(&mut parent, x) == root).collect()
}

/// Solve L·vec(ρ) = 0 with Tr ρ = 1 by direct sparse LU, the first equation
/// being replaced by the trace constraint.
pub fn steady_state(l: &Superoperator, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    let d = l.dim();
    let n = l.size();
    let scale = l.entries().map(|(_, _, v)| v.norm()).fold(1.0, f64::max);
    let trace_residual = l.trace_row_residual();
    if trace_residual > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "generator is not trace preserving (row residual {trace_residual:.3e})"
        )));
    }

    let active = trace_component(l);
    let mut position = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    for (k, _) in active.iter().enumerate().filter(|(_, a)| **a) {
        position[k] = unknowns.len();
        unknowns.push(k);
    }
    let m = unknowns.len();

    let mut triplets: Vec<Triplet<usize, usize, C64>> = Vec::with_capacity(l.nnz());
    for &c in &unknowns {
        for (r, v) in l.column(c) {
            if r != 0 {
                triplets.push(Triplet::new(position[r], position[c], v));
            }
        }
    }
    for k in 0..d {
        triplets.push(Triplet::new(0, position[k * (d + 1)], C64::new(1.0, 0.0)));
    }
    let system = SparseColMat::<usize, C64>::try_new_from_triplets(m, m, &triplets)
        .map_err(|e| Error::NonUniqueSteadyState(format!("sparse assembly failed: {e:?}")))?;
    let lu = system
        .sp_lu()
        .map_err(|e| Error::NonUniqueSteadyState(format!("LU factorization failed: {e:?}")))?;
    let mut sol = Mat::<C64>::zeros(m, 1);
    sol[(0, 0)] = C64::new(1.0, 0.0);
    lu.solve_in_place(&mut sol);

    // iterative refinement against the threshold-pivoted factorization
    let mut correction = Mat::<C64>::zeros(m, 1);
    for _ in 0..REFINEMENT_STEPS {
        correction.fill(C64::new(0.0, 0.0));
        correction[(0, 0)] = C64::new(1.0, 0.0);
        for t in &triplets {
            correction[(t.row, 0)] -= t.val * sol[(t.col, 0)];
        }
        lu.solve_in_place(&mut correction);
        for i in 0..m {
            sol[(i, 0)] += correction[(i, 0)];
        }
    }

    let mut x = vec![C64::new(0.0, 0.0); n];
    for (i, &k) in unknowns.iter().enumerate() {
        x[k] = sol[(i, 0)];
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonUniqueSteadyState("solve produced non-finite values".into()));
    }

    let rho = DensityMatrix::from_matrix(l.space(), unvectorize(&x, d))?;
    let residual = l
        .matvec(&vectorize(rho.matrix()))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual >= RESIDUAL_TOL {
        return Err(Error::NonUniqueSteadyState(format!(
            "residual ‖L·vec(ρ)‖∞ = {residual:.3e} exceeds {RESIDUAL_TOL:.0e}"
        )));
    }
    if rho.diagnostics().hermiticity_error > HERMITICITY_TOL {
        return Err(Error::NonUniqueSteadyState(format!(
            "solution is not Hermitian (error {:.3e})",
            rho.diagnostics().hermiticity_error
        )));
    }
    if l.space().fock_cutoff().is_some() {
        let report = policy.report(&rho)?;
        if !report.adequate {
            return Err(report.into_error());
        }
    }
    Ok(rho)
}

/// Steady state with the Fock cutoff grown on demand.
///
/// `build` assembles the generator for a given cutoff. Starting from
/// `initial`, the cutoff is raised to the suggested value after every
/// cutoff-too-small failure, never beyond `max`.
pub fn steady_state_adaptive<F>(
    build: F,
    initial: usize,
    max: usize,
    policy: &TruncationPolicy,
) -> Result<DensityMatrix>
where
    F: Fn(usize) -> Result<Superoperator>,
{
    let mut cutoff = initial;
    loop {
        let l = build(cutoff)?;
        match steady_state(&l, policy) {
            Err(Error::CutoffTooSmall { suggested, .. }) if cutoff < max => {
                cutoff = suggested.min(max);
            }
            other => return other,
        }
    }
}

/// Integrate dρ/dt = L ρ with classical fourth-order Runge–Kutta.
///
/// The state is reported at every time in `samples` (which must lie in
/// [0, t_end]) and at `t_end`. Steps are shortened to land on sample times.
pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    samples: &[f64],
) -> Result<Vec<(f64, DensityMatrix)>> {
    if rho0.space() != l.space() {
        return Err(Error::DimensionMismatch(format!(
            "initial state on {} but generator on {}",
            rho0.space(),
            l.space()
        )));
    }
    if !dt.is_finite() || dt <= 0.0 || !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_end ≥ 0, got dt = {dt}, t_end = {t_end}")));
    }
    if l.rate_scale() > 0.0 {
        let bound = STABILITY_FACTOR / l.rate_scale();
        if dt > bound {
            return Err(Error::StepTooLarge { dt, bound });
        }
    }
    let mut targets: Vec<f64> = samples.to_vec();
    if targets.iter().any(|&t| !(0.0..=t_end).contains(&t)) {
        return Err(Error::InvalidParameter(format!("sample times must lie in [0, {t_end}]")));
    }
    targets.push(t_end);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let d = l.dim();
    let size = l.size();
    let mut x = vectorize(rho0.matrix());
    let mut k = vec![C64::new(0.0, 0.0); size];
    let mut acc = vec![C64::new(0.0, 0.0); size];
    let mut stage = vec![C64::new(0.0, 0.0); size];
    let mut t = 0.0;
    let mut trajectory = Vec::with_capacity(targets.len());

    for target in targets {
        let mut steps_left = ((target - t) / dt).ceil().max(0.0) as usize;
        while steps_left > 0 {
            let h = if steps_left == 1 { target - t } else { dt };
            // k1
            l.matvec_into(&x, &mut k);
            for i in 0..size {
                acc[i] = k[i];
                stage[i] = x[i] + k[i] * (0.5 * h);
            }
            // k2
            l.matvec_into(&stage, &mut k);
            for i in 0..size {
                acc[i] += k[i] * 2.0;
                stage[i] = x[i] + k[i] * (0.5 * h);
            }
            // k3
            l.matvec_into(&stage, &mut k);
            for i in 0..size {
                acc[i] += k[i] * 2.0;
                stage[i] = x[i] + k[i] * h;
            }
            // k4
            l.matvec_into(&stage, &mut k);
            for i in 0..size {
                x[i] += (acc[i] + k[i]) * (h / 6.0);
            }
            t = if steps_left == 1 { target } else { t + h };
            steps_left -= 1;
        }
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Divergence(t));
        }
        let trace: C64 = (0..d).map(|i| x[i * (d + 1)]).sum();
        if (trace - 1.0).norm() > TRACE_DRIFT_TOL {
            return Err(Error::Divergence(t));
        }
        trajectory.push((t, DensityMatrix::from_matrix(l.space(), unvectorize(&x, d))?));
    }
    Ok(trajectory)
}
