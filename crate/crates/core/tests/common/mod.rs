//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// `H = -J S_x + (U/N) S_z²` assembled from truncated single-mode ladder
/// operators on the full two-mode space, then restricted to `N` particles.
/// Row/column `k` is `|k⟩_L |N-k⟩_R`.
pub fn dense_hamiltonian(n: usize, j: f64, u: f64) -> DMatrix<f64> {
    let d = n + 1;
    let mut create = DMatrix::<f64>::zeros(d, d);
    for k in 0..n {
        create[(k + 1, k)] = ((k + 1) as f64).sqrt();
    }
    let eye = DMatrix::<f64>::identity(d, d);
    let a_dag = create.kronecker(&eye);
    let b_dag = eye.kronecker(&create);
    let a = a_dag.transpose();
    let b = b_dag.transpose();
    let sx = (&a_dag * &b + &b_dag * &a) * 0.5;
    let sz = (&a_dag * &a - &b_dag * &b) * 0.5;
    let full = sx * (-j) + &sz * &sz * (u / n as f64);
    let index = |k: usize| k * d + (n - k);
    DMatrix::from_fn(d, d, |r, c| full[(index(r), index(c))])
}

/// `exp(-i H t)` by scaling and squaring a Taylor series.
pub fn expm(h: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
    let d = h.nrows();
    let a: DMatrix<Complex64> = h.map(|x| Complex64::new(0.0, -t * x));
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * d as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
    let mut term = DMatrix::<Complex64>::identity(d, d);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn fock(n: usize, k: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(n + 1, Complex64::new(0.0, 0.0));
    v[k] = Complex64::new(1.0, 0.0);
    v
}

pub fn q(k: usize, n: usize) -> f64 {
    if 2 * k >= n {
        1.0
    } else {
        -1.0
    }
}

/// Correlators by enumerating every `(n2, n3)` outcome pair of the
/// measurement record, using the dense propagator.
pub fn brute_force_correlators(n: usize, lambda: f64, init: usize, tau: f64) -> (f64, f64, f64) {
    let h = dense_hamiltonian(n, 1.0, lambda);
    let u = expm(&h, tau);
    let u2 = &u * &u;
    let d = n + 1;
    let q1 = q(init, n);
    let (mut c12, mut c23, mut c13) = (0.0, 0.0, 0.0);
    for n2 in 0..d {
        let p2 = u[(n2, init)].norm_sqr();
        c12 += q1 * q(n2, n) * p2;
        for n3 in 0..d {
            c23 += q(n2, n) * q(n3, n) * p2 * u[(n3, n2)].norm_sqr();
        }
    }
    for n3 in 0..d {
        c13 += q1 * q(n3, n) * u2[(n3, init)].norm_sqr();
    }
    (c12, c23, c13)
}

pub fn to_vector(state: &bjj_lgi::QuantumState64) -> DVector<Complex64> {
    DVector::from_iterator(state.dim(), state.amplitudes().iter().copied())
}
