//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64 as C64;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Annihilation operator written out entry by entry.
pub fn ladder(n: usize) -> Array2<C64> {
    let mut a = Array2::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = c((k as f64).sqrt());
    }
    a
}

pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// A ⊗ B with the first factor slow.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

pub fn eye(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { c(1.0) } else { c(0.0) })
}

/// Model parameters for the reference generator.
#[derive(Clone, Copy)]
pub struct Model {
    pub delta_a: f64,
    pub delta_c: f64,
    pub g0: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub r: f64,
    pub phi: f64,
    pub atom: bool,
}

impl Model {
    pub fn resonant(g0: f64, gamma: f64, r: f64) -> Self {
        Model { delta_a: 0.0, delta_c: 0.0, g0, gamma, kappa: 1.0, r, phi: 0.0, atom: true }
    }
}

/// dρ/dt computed with plain matrix products, one physical term at a time:
/// −i[H, ρ] + κ(N+1)(2aρa† − a†aρ − ρa†a) + κN(2a†ρa − aa†ρ − ρaa†)
/// − κM(2a†ρa† − a†a†ρ − ρa†a†) − κM*(2aρa − aaρ − ρaa)
/// + γ(2σ₋ρσ₊ − σ₊σ₋ρ − ρσ₊σ₋).
pub fn reference_rhs(m: &Model, fock: usize, rho: &Array2<C64>) -> Array2<C64> {
    let n_th = m.r.sinh().powi(2);
    let big_m = C64::from_polar(m.r.cosh() * m.r.sinh(), m.phi);
    let (a, sm) = if m.atom {
        let mut lower = Array2::zeros((2, 2));
        lower[[0, 1]] = c(1.0); // |g⟩⟨e| with g = 0, e = 1
        (kron(&eye(2), &ladder(fock)), kron(&lower, &eye(fock)))
    } else {
        (ladder(fock), Array2::zeros((fock, fock)))
    };
    let ad = dagger(&a);
    let sp = dagger(&sm);
    let i = C64::new(0.0, 1.0);
    let h = ad.dot(&a).mapv(|z| z * m.delta_c)
        + sp.dot(&sm).mapv(|z| z * m.delta_a)
        + (sp.dot(&a) + ad.dot(&sm)).mapv(|z| z * m.g0);
    let comm = h.dot(rho) - rho.dot(&h);
    let d = |x: &Array2<C64>, y: &Array2<C64>| -> Array2<C64> {
        // 2xρy − yxρ − ρyx
        x.dot(rho).dot(y).mapv(|z| 2.0 * z) - y.dot(x).dot(rho) - rho.dot(&y.dot(x))
    };
    comm.mapv(|z| -i * z)
        + d(&a, &ad).mapv(|z| m.kappa * (n_th + 1.0) * z)
        + d(&ad, &a).mapv(|z| m.kappa * n_th * z)
        - d(&ad, &ad).mapv(|z| m.kappa * big_m * z)
        - d(&a, &a).mapv(|z| m.kappa * big_m.conj() * z)
        + d(&sm, &sp).mapv(|z| m.gamma * z)
}

/// P(2n) of squeezed vacuum: tanh^{2n} r / cosh r · (2n)! / ((n!)² 2^{2n}).
pub fn squeezed_even_population(r: f64, n: usize) -> f64 {
    let mut binom_ratio = 1.0; // (2n)! / ((n!)² 4^n), built up multiplicatively
    for k in 1..=n {
        binom_ratio *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    r.tanh().powi(2 * n as i32) / r.cosh() * binom_ratio
}

/// Amplitudes of S(r)|0⟩ with ⟨aa⟩ = +cosh r sinh r e^{iφ}.
pub fn squeezed_vacuum(r: f64, phi: f64, fock: usize) -> Vec<C64> {
    let mut psi = vec![c(0.0); fock];
    let mut amp = c(1.0 / r.cosh().sqrt());
    let t = C64::from_polar(r.tanh(), phi);
    for k in 0..fock.div_ceil(2) {
        psi[2 * k] = amp;
        amp *= t * (((2 * k + 1) * (2 * k + 2)) as f64).sqrt() / (2.0 * (k + 1) as f64);
    }
    psi
}

/// Random Hermitian, positive, unit-trace matrix.
pub fn random_density(rng: &mut impl rand::Rng, d: usize) -> Array2<C64> {
    let x = Array2::from_shape_fn((d, d), |_| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = x.dot(&dagger(&x));
    let tr: C64 = rho.diag().sum();
    rho.mapv(|z| z / tr)
}

pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
