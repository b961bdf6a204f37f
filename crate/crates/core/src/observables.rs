//! Observables of the cavity field and the atom extracted from a density matrix.

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ops::{self, atom_sigma, Level, Operator, Space, C64};
use crate::solvers::{self, DensityMatrix, TruncationPolicy};

/// Largest imaginary part tolerated (and discarded) in a real observable.
pub const IMAG_TOL: f64 = 1e-8;

/// Diagonal of the field-reduced state, P(n) = Σ_α ⟨α,n|ρ|α,n⟩.
pub(crate) fn photon_populations(space: Space, matrix: &Array2<C64>) -> Vec<f64> {
    match space {
        Space::Field(n) => (0..n).map(|k| matrix[[k, k]].re).collect(),
        Space::Composite(dims) => {
            let n = dims.fock_cutoff();
            (0..n).map(|k| matrix[[k, k]].re + matrix[[n + k, n + k]].re).collect()
        }
        Space::Atom => Vec::new(),
    }
}

/// Tr(ρ·op). Field or atom operators are lifted onto a composite state.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    let op = op.embedded_in(rho.space())?;
    let (r, o) = (rho.matrix(), op.matrix());
    Ok(r.indexed_iter().map(|((i, j), &v)| v * o[[j, i]]).sum())
}

fn real_part(value: C64, what: &str) -> Result<f64> {
    if value.im.abs() > IMAG_TOL {
        return Err(Error::CorruptedState(format!(
            "{what} has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

fn cutoff(rho: &DensityMatrix) -> Result<usize> {
    rho.space()
        .fock_cutoff()
        .ok_or_else(|| Error::DimensionMismatch("state has no cavity mode".into()))
}

/// ⟨a†a⟩.
pub fn mean_photon_number(rho: &DensityMatrix) -> Result<f64> {
    let num = ops::number(cutoff(rho)?)?;
    real_part(expectation(rho, &num)?, "⟨a†a⟩")
}

/// ⟨aa⟩.
pub fn pair_amplitude(rho: &DensityMatrix) -> Result<C64> {
    let a = ops::annihilation(cutoff(rho)?)?;
    expectation(rho, &a.compose(&a)?)
}

/// ρ_ee = ⟨σ_ee⟩.
pub fn atom_excited_population(rho: &DensityMatrix) -> Result<f64> {
    if !rho.space().has_atom() {
        return Err(Error::DimensionMismatch(format!("{} has no atom", rho.space())));
    }
    let see = atom_sigma(Level::Excited, Level::Excited);
    real_part(expectation(rho, &see)?, "ρ_ee")
}

/// Tr ρ².
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Photon-number distribution of the field.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonDistribution {
    /// P(n) for n = 0 … N−1.
    pub probabilities: Vec<f64>,
    /// Number of top levels treated as the truncation guard.
    pub guard: usize,
    /// Σ P(n) over the guard levels.
    pub tail_mass: f64,
}

impl PhotonDistribution {
    /// P(n) below the guard levels.
    pub fn reported(&self) -> &[f64] {
        &self.probabilities[..self.probabilities.len() - self.guard]
    }
}

/// P(n) with the default guard.
pub fn photon_distribution(rho: &DensityMatrix) -> Result<PhotonDistribution> {
    photon_distribution_with_guard(rho, TruncationPolicy::default().guard_for(cutoff(rho)?))
}

pub fn photon_distribution_with_guard(rho: &DensityMatrix, guard: usize) -> Result<PhotonDistribution> {
    let n = cutoff(rho)?;
    if guard >= n {
        return Err(Error::InvalidParameter(format!("guard {guard} must be below the cutoff {n}")));
    }
    let probabilities = photon_populations(rho.space(), rho.matrix());
    if let Some((k, p)) = probabilities.iter().enumerate().find(|(_, p)| **p < -1e-8) {
        return Err(Error::CorruptedState(format!("P({k}) = {p:.3e} is negative")));
    }
    let tail_mass = probabilities[n - guard..].iter().sum();
    Ok(PhotonDistribution { probabilities, guard, tail_mass })
}

/// Reduced state of the cavity field, Σ_α ⟨α|ρ|α⟩.
pub fn partial_trace_atom(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dims = match rho.space() {
        Space::Composite(dims) => dims,
        other => {
            return Err(Error::DimensionMismatch(format!("partial trace over the atom of a state on {other}")))
        }
    };
    let n = dims.fock_cutoff();
    let m = rho.matrix();
    let field = Array2::from_shape_fn((n, n), |(i, j)| m[[i, j]] + m[[n + i, n + j]]);
    DensityMatrix::from_matrix(Space::Field(n), field)
}

/// Wigner function sampled on a rectangular (q, p) grid, with α = (q + ip)/√2
/// and ∫∫ W dq dp = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub q_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// `values[[i, j]]` = W(q_i, p_j).
    pub values: Array2<f64>,
}

/// Second-order phase-space moments of a Wigner grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureMoments {
    pub norm: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub cov_qp: f64,
}

impl QuadratureMoments {
    /// Principal variances (major, minor) of the covariance matrix.
    pub fn principal_variances(&self) -> (f64, f64) {
        let mean = 0.5 * (self.var_q + self.var_p);
        let half_diff = 0.5 * (self.var_q - self.var_p);
        let radius = (half_diff * half_diff + self.cov_qp * self.cov_qp).sqrt();
        (mean + radius, mean - radius)
    }

    /// Ratio of major to minor principal variance (1 for a circular state).
    pub fn variance_ratio(&self) -> f64 {
        let (major, minor) = self.principal_variances();
        major / minor
    }

    /// ⟨a†a⟩ = (⟨q²⟩ + ⟨p²⟩ − 1)/2.
    pub fn mean_photon_number(&self) -> f64 {
        let q2 = self.var_q + self.mean_q * self.mean_q;
        let p2 = self.var_p + self.mean_p * self.mean_p;
        0.5 * (q2 + p2 - 1.0)
    }
}

/// `points` evenly spaced values covering [−extent, extent].
pub fn symmetric_axis(extent: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|k| -extent + 2.0 * extent * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn spacing(axis: &[f64]) -> f64 {
    if axis.len() < 2 {
        1.0
    } else {
        (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
    }
}

impl WignerGrid {
    /// Riemann-sum approximation of ∫∫ W dq dp.
    pub fn integral(&self) -> f64 {
        self.values.sum() * spacing(&self.q_axis) * spacing(&self.p_axis)
    }

    pub fn moments(&self) -> QuadratureMoments {
        let cell = spacing(&self.q_axis) * spacing(&self.p_axis);
        let mut sums = [0.0; 6];
        for ((i, j), &w) in self.values.indexed_iter() {
            let (q, p) = (self.q_axis[i], self.p_axis[j]);
            for (s, v) in sums.iter_mut().zip([1.0, q, p, q * q, p * p, q * p]) {
                *s += w * v * cell;
            }
        }
        let norm = sums[0];
        let mean_q = sums[1] / norm;
        let mean_p = sums[2] / norm;
        QuadratureMoments {
            norm,
            mean_q,
            mean_p,
            var_q: sums[3] / norm - mean_q * mean_q,
            var_p: sums[4] / norm - mean_p * mean_p,
            cov_qp: sums[5] / norm - mean_q * mean_p,
        }
    }
}

/// W(q, p) of a field state, with α = (q + ip)/√2 and vacuum W = e^{−q²−p²}/π.
///
/// W is expanded along the diagonals ρ_{j,j+L} of the density matrix in
/// normalized associated Laguerre functions of 4|α|². Each diagonal is summed
/// by Clenshaw recursion and the diagonals are combined by Horner's rule in
/// 2α. This is exact for the truncated ρ, stays accurate far from the origin
/// and costs O(N²) per point.
pub fn wigner(rho_field: &DensityMatrix, q_axis: &[f64], p_axis: &[f64]) -> Result<WignerGrid> {
    let n = match rho_field.space() {
        Space::Field(n) => n,
        other => {
            return Err(Error::DimensionMismatch(format!(
                "the Wigner function needs a field-only state, got {other}"
            )))
        }
    };
    if q_axis.iter().chain(p_axis).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("Wigner axes must be finite".into()));
    }
    let report = TruncationPolicy::default().report(rho_field)?;
    if !report.adequate {
        return Err(Error::CutoffTooSmall {
            cutoff: n,
            tail_mass: report.tail_mass,
            epsilon: report.epsilon,
            suggested: report.suggested_cutoff(),
        });
    }

    let rho = rho_field.matrix();
    let sqrt2 = std::f64::consts::SQRT_2;
    let tables = ClenshawTables::new(n);
    let rows: Vec<Vec<f64>> = q_axis
        .par_iter()
        .map(|&q| {
            p_axis
                .iter()
                .map(|&p| wigner_point(rho, &tables, C64::new(q / sqrt2, p / sqrt2)))
                .collect()
        })
        .collect();

    let mut values = Array2::zeros((q_axis.len(), p_axis.len()));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, w) in row.into_iter().enumerate() {
            values[[i, j]] = w;
        }
    }
    Ok(WignerGrid { q_axis: q_axis.to_vec(), p_axis: p_axis.to_vec(), values })
}

/// Recursion coefficients for the Laguerre series, indexed [L][k].
struct ClenshawTables {
    /// √((k−1)(L+k−1) / ((L+k) k))
    down: Vec<Vec<f64>>,
    /// 1 / √((L+k) k)
    scale: Vec<Vec<f64>>,
}

impl ClenshawTables {
    fn new(n: usize) -> Self {
        let table = |f: &dyn Fn(f64, f64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|l| (0..=n - l).map(|k| if k == 0 { 0.0 } else { f(l as f64, k as f64) }).collect())
                .collect()
        };
        ClenshawTables {
            down: table(&|l, k| ((k - 1.0) * (l + k - 1.0) / ((l + k) * k)).sqrt()),
            scale: table(&|l, k| 1.0 / ((l + k) * k).sqrt()),
        }
    }
}

/// Σ_j c_j (−1)^j √(L! j!/(L+j)!) L_j^{(L)}(x) with c_j = ρ_{j,j+L}, doubled off the main diagonal.
fn laguerre_series(rho: &Array2<C64>, tables: &ClenshawTables, l: usize, x: f64) -> C64 {
    let n = rho.nrows();
    let len = n - l;
    let weight = if l == 0 { 1.0 } else { 2.0 };
    let c = |j: usize| weight * rho[[j, j + l]];
    let (mut y0, mut y1) = match len {
        1 => (c(0), C64::new(0.0, 0.0)),
        _ => (c(len - 2), c(len - 1)),
    };
    let down = &tables.down[l];
    let scale = &tables.scale[l];
    let lf = l as f64;
    let mut k = len;
    for i in 3..=len {
        k -= 1;
        let kf = k as f64;
        let next0 = c(len - i) - y1 * down[k];
        y1 = y0 - y1 * ((lf + 2.0 * kf - 1.0 - x) * scale[k]);
        y0 = next0;
    }
    y0 - y1 * ((lf + 1.0 - x) / (lf + 1.0).sqrt())
}

fn wigner_point(rho: &Array2<C64>, tables: &ClenshawTables, alpha: C64) -> f64 {
    let n = rho.nrows();
    let a = 2.0 * alpha;
    let x = a.norm_sqr();
    let mut w = if n > 1 { 2.0 * rho[[0, n - 1]] } else { rho[[0, 0]] };
    for l in (0..n - 1).rev() {
        w = laguerre_series(rho, tables, l, x) + w * a / ((l + 1) as f64).sqrt();
    }
    w.re * (-0.5 * x).exp() / PI
}

/// Observables gathered for one steady state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean_n: f64,
    pub p0: f64,
    pub p1: f64,
    pub pair: C64,
    /// ρ_ee; zero without an atom.
    pub rho_ee: f64,
    pub purity: f64,
    pub tail_mass: f64,
}

pub fn moments(rho: &DensityMatrix, guard: usize) -> Result<Moments> {
    let dist = photon_distribution_with_guard(rho, guard)?;
    let rho_ee = if rho.space().has_atom() { atom_excited_population(rho)? } else { 0.0 };
    Ok(Moments {
        mean_n: mean_photon_number(rho)?,
        p0: dist.probabilities[0],
        p1: dist.probabilities[1],
        pair: pair_amplitude(rho)?,
        rho_ee,
        purity: purity(rho),
        tail_mass: dist.tail_mass,
    })
}

/// Checks a state against the declared validity thresholds.
pub fn state_is_valid(rho: &DensityMatrix) -> bool {
    let d = rho.diagnostics();
    d.trace_error <= solvers::TRACE_TOL
        && d.hermiticity_error < solvers::HERMITICITY_TOL
        && d.min_eigenvalue > solvers::MIN_EIGENVALUE_TOL
        && d.tail_mass < solvers::DEFAULT_TRUNCATION_EPSILON
}
