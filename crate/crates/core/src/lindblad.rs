//! Hamiltonian, dissipators and Liouvillian superoperators of the driven
//! atom–cavity model.
//!
//! Superoperators act on column-stacked density matrices: `vec(ρ)[j·d + i] = ρ_ij`,
//! so the sandwich map ρ ↦ AρB is the matrix Bᵀ ⊗ A. They are stored sparse
//! (compressed columns); every builder goes through the same triplet assembly.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::ops::{self, atom_sigma, bogoliubov_b, Level, Operator, Space, SpaceDims, C64};

/// Coherent and incoherent parameters of the atom–cavity system, in units of κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Atomic detuning from the squeezing carrier, Δ_A = ω_A − ω_sq.
    pub delta_a: f64,
    /// Cavity detuning from the squeezing carrier, Δ_C = ω_cav − ω_sq.
    pub delta_c: f64,
    /// Atom–cavity coupling g₀.
    pub g0: f64,
    /// Atomic damping rate γ.
    pub gamma: f64,
    /// Cavity damping rate κ.
    pub kappa: f64,
    /// When false the atom is removed from the model altogether.
    pub atom_present: bool,
}

impl SystemParams {
    /// Resonant system (Δ_A = Δ_C = 0, κ = 1) with an atom.
    pub fn resonant(g0: f64, gamma: f64) -> Self {
        SystemParams { delta_a: 0.0, delta_c: 0.0, g0, gamma, kappa: 1.0, atom_present: true }
    }

    /// Resonant cavity without an atom.
    pub fn empty_cavity() -> Self {
        SystemParams { atom_present: false, ..Self::resonant(0.0, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta_a, self.delta_c, self.g0, self.gamma, self.kappa]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("system parameters must be finite".into()));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!("kappa must be > 0, got {}", self.kappa)));
        }
        if self.g0 < 0.0 || self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "g0 and gamma must be ≥ 0, got g0 = {}, gamma = {}",
                self.g0, self.gamma
            )));
        }
        Ok(())
    }

    /// Natural state space for these parameters: composite with an atom,
    /// field-only without.
    pub fn space(&self, fock_cutoff: usize) -> Result<Space> {
        if self.atom_present {
            Space::composite(fock_cutoff)
        } else {
            Space::field(fock_cutoff)
        }
    }
}

/// Broadband squeezed-vacuum reservoir.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezedBath {
    r: f64,
    phi: f64,
}

impl SqueezedBath {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter(format!("squeezing strength must be ≥ 0, got {r}")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing phase must be finite, got {phi}")));
        }
        Ok(SqueezedBath { r, phi })
    }

    pub fn vacuum() -> Self {
        SqueezedBath { r: 0.0, phi: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Mean photon number of the reservoir, N = sinh²r.
    pub fn n_th(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    /// Two-photon correlation M = cosh r sinh r e^{iφ}.
    pub fn m_corr(&self) -> C64 {
        C64::from_polar(self.r.cosh() * self.r.sinh(), self.phi)
    }
}

/// Sparse d²×d² generator acting on column-stacked density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    space: Space,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<C64>,
    /// Largest rate entering the generator; bounds stable explicit time steps.
    rate_scale: f64,
}

impl Superoperator {
    pub fn zeros(space: Space) -> Self {
        let n = space.dim() * space.dim();
        Superoperator {
            space,
            col_ptr: vec![0; n + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
            rate_scale: 0.0,
        }
    }

    /// Assemble from (row, col, value) entries; duplicates are summed in input order.
    pub fn from_triplets(space: Space, mut entries: Vec<(usize, usize, C64)>, rate_scale: f64) -> Self {
        let n = space.dim() * space.dim();
        entries.sort_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0; n + 1];
        let mut row_idx: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<C64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            assert!(r < n && c < n, "superoperator entry ({r}, {c}) out of range {n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
                last = Some((r, c));
            }
        }
        for c in 0..n {
            col_ptr[c + 1] += col_ptr[c];
        }
        Superoperator { space, col_ptr, row_idx, values, rate_scale }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Side length d² of the matrix.
    pub fn size(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn rate_scale(&self) -> f64 {
        self.rate_scale
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (lo, hi) = (self.col_ptr[col], self.col_ptr[col + 1]);
        match self.row_idx[lo..hi].binary_search(&row) {
            Ok(k) => self.values[lo + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Stored entries as (row, col, value), column by column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.size()).flat_map(move |c| {
            (self.col_ptr[c]..self.col_ptr[c + 1]).map(move |k| (self.row_idx[k], c, self.values[k]))
        })
    }

    /// Entries of column `col` as (row, value).
    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.col_ptr[col]..self.col_ptr[col + 1]).map(move |k| (self.row_idx[k], self.values[k]))
    }

    /// `out = L · x`.
    pub fn matvec_into(&self, x: &[C64], out: &mut [C64]) {
        assert_eq!(x.len(), self.size());
        assert_eq!(out.len(), self.size());
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (c, &xc) in x.iter().enumerate() {
            if xc == C64::new(0.0, 0.0) {
                continue;
            }
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                out[self.row_idx[k]] += self.values[k] * xc;
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.size()];
        self.matvec_into(x, &mut out);
        out
    }

    /// dρ/dt for a given ρ.
    pub fn apply(&self, rho: &Array2<C64>) -> Result<Array2<C64>> {
        let d = self.dim();
        if rho.dim() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix passed to a generator on {}",
                rho.nrows(),
                rho.ncols(),
                self.space
            )));
        }
        Ok(unvectorize(&self.matvec(&vectorize(rho)), d))
    }

    pub fn plus(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch(format!(
                "cannot add generators on {} and {}",
                self.space, other.space
            )));
        }
        let entries = self.entries().chain(other.entries()).collect();
        Ok(Superoperator::from_triplets(
            self.space,
            entries,
            self.rate_scale.max(other.rate_scale),
        ))
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut out = Array2::zeros((self.size(), self.size()));
        for (r, c, v) in self.entries() {
            out[[r, c]] = v;
        }
        out
    }

    /// max_j |(vec(I)ᵀ L)_j|; zero for trace-preserving generators.
    pub fn trace_row_residual(&self) -> f64 {
        let d = self.dim();
        (0..self.size())
            .map(|c| {
                self.column(c)
                    .filter(|(r, _)| r % (d + 1) == 0)
                    .map(|(_, v)| v)
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Column-stacking vectorization.
pub fn vectorize(rho: &Array2<C64>) -> Vec<C64> {
    rho.t().iter().copied().collect()
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[C64], d: usize) -> Array2<C64> {
    assert_eq!(v.len(), d * d);
    Array2::from_shape_fn((d, d), |(i, j)| v[j * d + i])
}

/// Triplet accumulator for sums of sandwich terms c·AρB.
struct Assembly {
    space: Space,
    entries: Vec<(usize, usize, C64)>,
}

impl Assembly {
    fn new(space: Space) -> Self {
        Assembly { space, entries: Vec::new() }
    }

    /// Adds `coef · A ρ B`, i.e. coef · (Bᵀ ⊗ A).
    fn sandwich(&mut self, coef: C64, a: &Array2<C64>, b: &Array2<C64>) {
        let d = self.space.dim();
        let zero = C64::new(0.0, 0.0);
        let a_nz: Vec<(usize, usize, C64)> =
            a.indexed_iter().filter(|(_, v)| **v != zero).map(|((i, k), v)| (i, k, *v)).collect();
        for ((l, j), &blj) in b.indexed_iter() {
            if blj == zero {
                continue;
            }
            let w = coef * blj;
            for &(i, k, aik) in &a_nz {
                self.entries.push((j * d + i, l * d + k, w * aik));
            }
        }
    }

    /// Adds `coef · (XYρ − 2YρX + ρXY)`, the shape shared by every
    /// dissipative term of the model.
    fn pair_term(&mut self, coef: C64, x: &Array2<C64>, y: &Array2<C64>) {
        let eye = Array2::eye(self.space.dim());
        let xy = x.dot(y);
        self.sandwich(coef, &xy, &eye);
        self.sandwich(-2.0 * coef, y, x);
        self.sandwich(coef, &eye, &xy);
    }

    /// Adds `−i[H, ρ]`.
    fn commutator(&mut self, h: &Array2<C64>) {
        let eye = Array2::eye(self.space.dim());
        self.sandwich(C64::new(0.0, -1.0), h, &eye);
        self.sandwich(C64::new(0.0, 1.0), &eye, h);
    }

    fn finish(self, rate_scale: f64) -> Superoperator {
        Superoperator::from_triplets(self.space, self.entries, rate_scale)
    }
}

/// The map ρ ↦ AρB.
pub fn sandwich(a: &Operator, b: &Operator) -> Result<Superoperator> {
    if a.space() != b.space() {
        return Err(Error::DimensionMismatch(format!(
            "sandwich of operators on {} and {}",
            a.space(),
            b.space()
        )));
    }
    let mut asm = Assembly::new(a.space());
    asm.sandwich(C64::new(1.0, 0.0), a.matrix(), b.matrix());
    Ok(asm.finish(0.0))
}

fn field_op(op: &Operator, space: Space) -> Result<Array2<C64>> {
    Ok(op.embedded_in(space)?.into_matrix())
}

fn atom_op(i: Level, j: Level, dims: SpaceDims) -> Result<Array2<C64>> {
    Ok(atom_sigma(i, j).lifted(dims)?.into_matrix())
}

fn composite_dims(space: Space, what: &str) -> Result<SpaceDims> {
    match space {
        Space::Composite(dims) => Ok(dims),
        other => Err(Error::DimensionMismatch(format!("{what} needs the atom ⊗ field space, got {other}"))),
    }
}

fn cutoff_of(space: Space) -> Result<usize> {
    space
        .fock_cutoff()
        .ok_or_else(|| Error::DimensionMismatch(format!("{space} has no cavity mode")))
}

/// Rotating-frame Hamiltonian Δ_A σ_ee + Δ_C a†a + g₀(σ_eg a + σ_ge a†).
///
/// Without an atom only Δ_C a†a remains, on whichever of the field or
/// composite spaces the caller passes.
pub fn build_hamiltonian(params: &SystemParams, space: Space) -> Result<Operator> {
    params.validate()?;
    let cutoff = cutoff_of(space)?;
    let a = ops::annihilation(cutoff)?;
    let num = ops::number(cutoff)?;
    let mut h = field_op(&num, space)? * C64::new(params.delta_c, 0.0);
    if params.atom_present {
        let dims = composite_dims(space, "a Hamiltonian with an atom")?;
        let see = atom_op(Level::Excited, Level::Excited, dims)?;
        let seg = atom_op(Level::Excited, Level::Ground, dims)?;
        let a_full = field_op(&a, space)?;
        let coupling = seg.dot(&a_full);
        let coupling_dag = coupling.t().mapv(|z| z.conj());
        h = h + see * C64::new(params.delta_a, 0.0) + (coupling + coupling_dag) * C64::new(params.g0, 0.0);
    }
    Operator::new(space, h)
}

/// −i[H, ·] as a superoperator.
pub fn hamiltonian_superoperator(h: &Operator) -> Superoperator {
    let mut asm = Assembly::new(h.space());
    asm.commutator(h.matrix());
    let scale = h.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    asm.finish(scale)
}

/// Atomic decay γ(2σ_ge ρ σ_eg − σ_ee ρ − ρ σ_ee).
pub fn atom_dissipator(gamma: f64, dims: SpaceDims) -> Result<Superoperator> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!("gamma must be ≥ 0, got {gamma}")));
    }
    let space = Space::Composite(dims);
    let mut asm = Assembly::new(space);
    if gamma > 0.0 {
        let seg = atom_op(Level::Excited, Level::Ground, dims)?;
        let sge = atom_op(Level::Ground, Level::Excited, dims)?;
        asm.pair_term(C64::new(-gamma, 0.0), &seg, &sge);
    }
    Ok(asm.finish(gamma))
}

/// Cavity damping into a broadband squeezed vacuum:
///
/// −κ(1+N)(a†aρ − 2aρa† + ρa†a) − κN(aa†ρ − 2a†ρa + ρaa†)
/// + κM(a†a†ρ − 2a†ρa† + ρa†a†) + κM*(aaρ − 2aρa + ρaa).
pub fn cavity_squeezed_dissipator(kappa: f64, bath: &SqueezedBath, space: Space) -> Result<Superoperator> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::InvalidParameter(format!("kappa must be > 0, got {kappa}")));
    }
    let cutoff = cutoff_of(space)?;
    let a_op = ops::annihilation(cutoff)?;
    let a = field_op(&a_op, space)?;
    let ad = field_op(&a_op.dagger(), space)?;
    let n = bath.n_th();
    let m = bath.m_corr();

    let mut asm = Assembly::new(space);
    asm.pair_term(C64::new(-kappa * (1.0 + n), 0.0), &ad, &a);
    if n != 0.0 {
        asm.pair_term(C64::new(-kappa * n, 0.0), &a, &ad);
    }
    if m != C64::new(0.0, 0.0) {
        asm.pair_term(kappa * m, &ad, &ad);
        asm.pair_term(kappa * m.conj(), &a, &a);
    }
    Ok(asm.finish(kappa * (1.0 + 2.0 * n + 2.0 * m.norm())))
}

/// Full generator −i[H, ρ] + L_A(ρ) + L_cav(ρ); the atomic term is dropped when
/// `params.atom_present` is false.
pub fn build_liouvillian(params: &SystemParams, bath: &SqueezedBath, space: Space) -> Result<Superoperator> {
    let h = build_hamiltonian(params, space)?;
    let mut l = hamiltonian_superoperator(&h);
    l.rate_scale = params.delta_a.abs().max(params.delta_c.abs());
    if params.atom_present {
        l.rate_scale = l.rate_scale.max(params.g0);
        let dims = composite_dims(space, "the atomic dissipator")?;
        l = l.plus(&atom_dissipator(params.gamma, dims)?)?;
    }
    l.plus(&cavity_squeezed_dissipator(params.kappa, bath, space)?)
}

/// Generator written with the Bogoliubov mode b = cosh r·a − sinh r·a†:
///
/// −κ(b†bρ − 2bρb† + ρb†b) − i[H_I, ρ] + L_A(ρ),
/// H_I = g₀ σ_eg (cosh r·b + sinh r·b†) + h.c.
///
/// Only defined at resonance and for squeezing phase zero.
pub fn build_bogoliubov_liouvillian(
    params: &SystemParams,
    bath: &SqueezedBath,
    space: Space,
) -> Result<Superoperator> {
    params.validate()?;
    if params.delta_a != 0.0 || params.delta_c != 0.0 {
        return Err(Error::UnsupportedFrame(format!(
            "delta_A = {}, delta_C = {}",
            params.delta_a, params.delta_c
        )));
    }
    if bath.phi() != 0.0 {
        return Err(Error::UnsupportedFrame(format!("phi = {}", bath.phi())));
    }
    let r = bath.r();
    let cutoff = cutoff_of(space)?;
    let b_op = bogoliubov_b(r, cutoff)?;
    let b = field_op(&b_op, space)?;
    let bd = field_op(&b_op.dagger(), space)?;

    let mut asm = Assembly::new(space);
    asm.pair_term(C64::new(-params.kappa, 0.0), &bd, &b);
    let mut rate = params.kappa * (1.0 + 2.0 * bath.n_th() + 2.0 * bath.m_corr().norm());
    if params.atom_present {
        let dims = composite_dims(space, "a Bogoliubov generator with an atom")?;
        let a_from_b = &b * C64::new(r.cosh(), 0.0) + &bd * C64::new(r.sinh(), 0.0);
        let seg = atom_op(Level::Excited, Level::Ground, dims)?;
        let coupling = seg.dot(&a_from_b) * C64::new(params.g0, 0.0);
        let h_int = &coupling + &coupling.t().mapv(|z| z.conj());
        asm.commutator(&h_int);
        if params.gamma > 0.0 {
            let sge = atom_op(Level::Ground, Level::Excited, dims)?;
            asm.pair_term(C64::new(-params.gamma, 0.0), &seg, &sge);
        }
        rate = rate.max(params.g0).max(params.gamma);
    }
    Ok(asm.finish(rate))
}
