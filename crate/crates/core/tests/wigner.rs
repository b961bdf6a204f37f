use std::f64::consts::PI;

use ndarray::Array2;
use sqz_cavity::lindblad::build_liouvillian;
use sqz_cavity::observables::{self, partial_trace_atom, symmetric_axis, wigner};
use sqz_cavity::ops::Displacer;
use sqz_cavity::solvers::steady_state;
use sqz_cavity::{DensityMatrix, SqueezedBath, SystemParams, TruncationPolicy, C64};

fn field_steady_state(params: &SystemParams, r: f64, fock: usize) -> DensityMatrix {
    let bath = SqueezedBath::new(r, 0.0).unwrap();
    let l = build_liouvillian(params, &bath, params.space(fock).unwrap()).unwrap();
    let rho = steady_state(&l, &TruncationPolicy::default()).unwrap();
    if rho.space().has_atom() {
        partial_trace_atom(&rho).unwrap()
    } else {
        rho
    }
}

/// (1/π) Σ_k (−1)^k ⟨k|D†(α) ρ D(α)|k⟩ with ρ embedded in a space large
/// enough that the displaced state never reaches its edge.
fn displaced_parity(rho: &DensityMatrix, alpha: C64, extra: usize) -> f64 {
    let n = rho.dim();
    let m = n + extra;
    let d = Displacer::new(m, extra).unwrap().matrix(alpha);
    let mut big = Array2::<C64>::zeros((m, m));
    big.slice_mut(ndarray::s![..n, ..n]).assign(rho.matrix());
    let dd = d.t().mapv(|z| z.conj()).dot(&big).dot(&d);
    let w: C64 = (0..m).map(|k| if k % 2 == 0 { dd[[k, k]] } else { -dd[[k, k]] }).sum();
    assert!(w.im.abs() < 1e-10);
    w.re / PI
}

#[test]
fn agrees_with_displaced_parity() {
    let rho = field_steady_state(&SystemParams::resonant(15.0, 1.0), 0.5, 30);
    let points = [(0.0, 0.0), (0.3, -0.2), (-1.5, 0.8), (2.5, 2.0), (-3.0, -4.0), (5.0, -5.0)];
    let q: Vec<f64> = points.iter().map(|p| p.0).collect();
    let p: Vec<f64> = points.iter().map(|p| p.1).collect();
    let grid = wigner(&rho, &q, &p).unwrap();
    for (i, &(qi, pi)) in points.iter().enumerate() {
        let alpha = C64::new(qi, pi) / 2f64.sqrt();
        let reference = displaced_parity(&rho, alpha, 120);
        assert!((grid.values[[i, i]] - reference).abs() < 1e-10, "({qi}, {pi})");
    }
}

#[test]
fn vacuum_is_a_unit_gaussian() {
    let rho = DensityMatrix::basis(sqz_cavity::Space::field(20).unwrap(), 0).unwrap();
    let axis = symmetric_axis(5.0, 101);
    let grid = wigner(&rho, &axis, &axis).unwrap();
    assert!((grid.values[[50, 50]] - 1.0 / PI).abs() < 1e-6);
    for (i, q) in axis.iter().enumerate() {
        for (j, p) in axis.iter().enumerate() {
            assert!((grid.values[[i, j]] - (-q * q - p * p).exp() / PI).abs() < 1e-6);
        }
    }
}

#[test]
fn squeezed_empty_cavity_has_expected_moments() {
    let r = 0.5;
    let rho = field_steady_state(&SystemParams::empty_cavity(), r, 60);
    let axis = symmetric_axis(5.0, 101);
    let grid = wigner(&rho, &axis, &axis).unwrap();
    let m = grid.moments();
    assert!((grid.integral() - 1.0).abs() < 1e-3);
    // φ = 0 squeezes p and stretches q
    assert!((m.var_q - (2.0 * r).exp() / 2.0).abs() < 1e-3);
    assert!((m.var_p - (-2.0 * r).exp() / 2.0).abs() < 1e-3);
    assert!(m.cov_qp.abs() < 1e-3);
    let ratio = m.variance_ratio();
    assert!((ratio / (4.0 * r).exp() - 1.0).abs() < 0.02, "ratio {ratio}");
    let mean_n = observables::mean_photon_number(&rho).unwrap();
    assert!((m.mean_photon_number() - mean_n).abs() < 1e-3);
}

#[test]
fn atom_makes_the_distribution_rounder() {
    let axis = symmetric_axis(5.0, 101);
    let ratio = |params: &SystemParams| {
        let rho = field_steady_state(params, 0.5, 60);
        let grid = wigner(&rho, &axis, &axis).unwrap();
        assert!((grid.integral() - 1.0).abs() < 1e-3);
        grid.moments().variance_ratio()
    };
    let empty = ratio(&SystemParams::empty_cavity());
    let weak = ratio(&SystemParams::resonant(5.0, 1.0));
    let strong = ratio(&SystemParams::resonant(15.0, 1.0));
    assert!(1.0 <= strong && strong < weak && weak < empty, "{strong} {weak} {empty}");
}
