mod common;

use common::{dagger, max_abs, random_density, reference_rhs, Model};
use ndarray::Array2;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use sqz_cavity::lindblad::build_liouvillian;
use sqz_cavity::ops::{self, atom_sigma, lift, Subsystem};
use sqz_cavity::{Level, Operator, Space, SpaceDims, SqueezedBath, SystemParams, C64};

fn params_of(m: &Model) -> SystemParams {
    SystemParams {
        delta_a: m.delta_a,
        delta_c: m.delta_c,
        g0: m.g0,
        gamma: m.gamma,
        kappa: m.kappa,
        atom_present: m.atom,
    }
}

fn generator_residual(m: &Model, fock: usize, rho: &Array2<C64>) -> f64 {
    let params = params_of(m);
    let bath = SqueezedBath::new(m.r, m.phi).unwrap();
    let l = build_liouvillian(&params, &bath, params.space(fock).unwrap()).unwrap();
    let got = l.apply(rho).unwrap();
    max_abs(&(got - reference_rhs(m, fock, rho)))
}

#[test]
fn matches_term_by_term_at_small_cutoff() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let models = [
        Model::resonant(15.0, 1.0, 0.5),
        Model::resonant(5.0, 1.0, 1.0),
        Model { delta_a: 0.7, delta_c: -1.3, phi: 0.9, ..Model::resonant(2.0, 0.4, 0.8) },
        Model { atom: false, ..Model::resonant(0.0, 0.0, 1.2) },
    ];
    for m in &models {
        let d = if m.atom { 6 } else { 3 };
        for _ in 0..100 {
            let rho = random_density(&mut rng, d);
            assert!(generator_residual(m, 3, &rho) < 1e-12);
        }
    }
}

#[test]
fn matches_term_by_term_at_moderate_cutoff() {
    let mut rng = StdRng::seed_from_u64(7);
    let m = Model { phi: 2.1, ..Model::resonant(15.0, 1.0, 1.5) };
    let rho = random_density(&mut rng, 2 * 12);
    // entries of the generator reach κ·cosh r sinh r·N_max ≈ 55
    assert!(generator_residual(&m, 12, &rho) < 1e-11);
}

fn hermitian_from(entries: &[(f64, f64)], d: usize) -> Array2<C64> {
    let x = Array2::from_shape_fn((d, d), |(i, j)| {
        let (re, im) = entries[i * d + j];
        C64::new(re, im)
    });
    (&x + &dagger(&x)).mapv(|z| z * 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_preserves_hermiticity_and_trace(
        g0 in 0.0..20.0f64,
        gamma in 0.0..3.0f64,
        r in 0.0..1.5f64,
        phi in -3.2..3.2f64,
        delta_a in -2.0..2.0f64,
        delta_c in -2.0..2.0f64,
        entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64),
    ) {
        let params = SystemParams { delta_a, delta_c, g0, gamma, kappa: 1.0, atom_present: true };
        let bath = SqueezedBath::new(r, phi).unwrap();
        let l = build_liouvillian(&params, &bath, Space::composite(4).unwrap()).unwrap();
        let rho = hermitian_from(&entries, 8);
        let out = l.apply(&rho).unwrap();
        let scale = 1.0 + max_abs(&out);
        prop_assert!(max_abs(&(&out - &dagger(&out))) < 1e-12 * scale);
        let tr: C64 = out.diag().sum();
        prop_assert!(tr.norm() < 1e-12 * scale);
    }

    #[test]
    fn lifted_factors_commute(
        fock in 2usize..7,
        a_entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        f_entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 36),
    ) {
        let dims = SpaceDims::new(fock).unwrap();
        let atom_m = Array2::from_shape_fn((2, 2), |(i, j)| C64::new(a_entries[2 * i + j].0, a_entries[2 * i + j].1));
        let field_m = Array2::from_shape_fn((fock, fock), |(i, j)| C64::new(f_entries[6 * i + j].0, f_entries[6 * i + j].1));
        let atom_op = Operator::new(Space::Atom, atom_m).unwrap();
        let field_op = Operator::new(Space::field(fock).unwrap(), field_m).unwrap();
        let la = lift(&atom_op, Subsystem::Atom, dims).unwrap();
        let lf = lift(&field_op, Subsystem::Field, dims).unwrap();
        let comm = la.commutator(&lf).unwrap();
        prop_assert!(max_abs(comm.matrix()) < 1e-13);
        // the product of lifts is the Kronecker product with the atom slow
        let prod = la.compose(&lf).unwrap();
        let reference = common::kron(atom_op.matrix(), field_op.matrix());
        prop_assert!(max_abs(&(prod.matrix() - &reference)) < 1e-13);
    }

    #[test]
    fn generator_is_phase_covariant(
        phi in -3.2..3.2f64,
        r in 0.0..1.2f64,
        entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 100),
    ) {
        // U = exp(+iφ/2 (a†a + σ_ee)) maps the φ = 0 generator onto the φ one:
        // L_φ(UρU†) = U L_0(ρ) U†
        let fock = 5;
        let params = SystemParams::resonant(15.0, 1.0);
        let space = Space::composite(fock).unwrap();
        let l0 = build_liouvillian(&params, &SqueezedBath::new(r, 0.0).unwrap(), space).unwrap();
        let lphi = build_liouvillian(&params, &SqueezedBath::new(r, phi).unwrap(), space).unwrap();
        let u = Array2::from_shape_fn((10, 10), |(i, j)| {
            if i != j { return C64::new(0.0, 0.0); }
            let excitations = (i / fock + i % fock) as f64;
            C64::from_polar(1.0, 0.5 * phi * excitations)
        });
        let rho = hermitian_from(&entries, 10);
        let lhs = lphi.apply(&u.dot(&rho).dot(&dagger(&u))).unwrap();
        let rhs = u.dot(&l0.apply(&rho).unwrap()).dot(&dagger(&u));
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-11);
    }
}

#[test]
fn lift_places_atom_slow() {
    let dims = SpaceDims::new(3).unwrap();
    let see = lift(&atom_sigma(Level::Excited, Level::Excited), Subsystem::Atom, dims).unwrap();
    let diag: Vec<f64> = see.matrix().diag().iter().map(|z| z.re).collect();
    assert_eq!(diag, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    let n = lift(&ops::number(3).unwrap(), Subsystem::Field, dims).unwrap();
    let diag: Vec<f64> = n.matrix().diag().iter().map(|z| z.re).collect();
    assert_eq!(diag, vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0]);
}
