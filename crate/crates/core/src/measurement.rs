//! The dichotomic observable `Q = sgn(S_z)` and projective,
//! number-resolving measurements of it.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::occupation_probabilities;
use crate::error::{Error, Result};
use crate::model::QuantumState;
use crate::scalar::Real;
use crate::spectral::Spectrum;

/// Outcome weights below this are skipped when averaging over collapsed
/// branches; the error this introduces is bounded by the skipped mass.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-20;

/// `Q(n_L) = +1` if `2 n_L ≥ N`, else `-1`. The balanced state of even `N`
/// counts as `+1`.
pub fn q_value(n_left: usize, n: usize) -> Result<i8> {
    if n_left > n {
        return Err(Error::OutOfRange { index: n_left, max: n });
    }
    Ok(if 2 * n_left >= n { 1 } else { -1 })
}

pub(crate) fn q_sign<T: Real>(n_left: usize, n: usize) -> T {
    if 2 * n_left >= n {
        T::one()
    } else {
        -T::one()
    }
}

/// `Q` evaluated on every Fock index.
pub fn q_vector<T: Real>(n: usize) -> Vec<T> {
    (0..=n).map(|k| q_sign(k, n)).collect()
}

/// `Σ_n Q(n) |ψ_n|²`.
pub fn mean_q<T: Real>(state: &QuantumState<T>) -> T {
    let n = state.n();
    state.amplitudes().iter().enumerate().map(|(k, c)| q_sign::<T>(k, n) * c.norm_sqr()).sum()
}

fn dot_q<T: Real>(probs: &[T], q: &[T]) -> T {
    probs.iter().zip(q).map(|(&p, &s)| p * s).sum()
}

/// `P(n3 | n2; τ) = |⟨n3| e^{-iHτ} |n2⟩|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMatrix<T> {
    n: usize,
    tau: T,
    /// Row-major, `entries[n3 * (N+1) + n2]`.
    entries: Vec<T>,
}

impl<T: Real> ConditionalMatrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn get(&self, n3: usize, n2: usize) -> T {
        self.entries[n3 * (self.n + 1) + n2]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<T> {
        let d = self.n + 1;
        (0..d).map(|r| self.entries[r * d..(r + 1) * d].iter().copied().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<T> {
        let d = self.n + 1;
        (0..d).map(|c| (0..d).map(|r| self.entries[r * d + c]).sum()).collect()
    }
}

fn check_tau<T: Real>(tau: T) -> Result<()> {
    if !tau.is_finite() || tau < T::zero() {
        return Err(Error::InvalidParameter(format!("tau must be finite and >= 0, got {tau}")));
    }
    Ok(())
}

/// Outcome distribution at time `τ` after collapsing onto each Fock state.
pub fn conditional_matrix<T: Real>(spectrum: &Spectrum<T>, tau: T) -> Result<ConditionalMatrix<T>> {
    check_tau(tau)?;
    let d = spectrum.dim();
    let cols: Vec<usize> = (0..d).collect();
    let columns = spectrum.transition_probabilities(tau, &cols)?;
    let mut entries = vec![T::zero(); d * d];
    for (n2, col) in columns.iter().enumerate() {
        for (n3, &p) in col.iter().enumerate() {
            entries[n3 * d + n2] = p;
        }
    }
    Ok(ConditionalMatrix { n: spectrum.n(), tau, entries })
}

/// `g(n2) = Σ_{n3} Q(n3) P(n3 | n2; τ)` for every `n2` whose weight exceeds
/// [`NEGLIGIBLE_WEIGHT`]; other entries are left at zero.
pub(crate) fn collapsed_means<T: Real>(spectrum: &Spectrum<T>, tau: T, weights: &[T], q: &[T]) -> Result<Vec<T>> {
    let cutoff = T::lit(NEGLIGIBLE_WEIGHT);
    let cols: Vec<usize> = weights.iter().enumerate().filter(|(_, &w)| w > cutoff).map(|(k, _)| k).collect();
    let columns = spectrum.transition_probabilities(tau, &cols)?;
    let mut g = vec![T::zero(); weights.len()];
    for (&c, col) in cols.iter().zip(&columns) {
        g[c] = dot_q(col, q);
    }
    Ok(g)
}

/// Effect of an intermediate measurement on `⟨Q⟩` at `2τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance<T> {
    /// `⟨Q(2τ)⟩` when the number is measured at `τ` and the outcome discarded.
    pub measured: T,
    /// `⟨Q(2τ)⟩` of the undisturbed evolution.
    pub unmeasured: T,
    /// `|measured - unmeasured|`.
    pub diff: T,
}

/// Compares `⟨Q(2τ)⟩` with and without a non-selective measurement at `τ`.
pub fn q3_disturbance<T: Real>(spectrum: &Spectrum<T>, psi0: &QuantumState<T>, tau: T) -> Result<Disturbance<T>> {
    check_tau(tau)?;
    let q = q_vector::<T>(spectrum.n());
    let psi1 = spectrum.evolve_projective(psi0, tau)?;
    let p1 = occupation_probabilities(&psi1);
    let g = collapsed_means(spectrum, tau, &p1, &q)?;
    let measured = dot_q(&p1, &g);
    let psi2 = spectrum.evolve_projective(&psi1, tau)?;
    let unmeasured = mean_q(&psi2);
    Ok(Disturbance { measured, unmeasured, diff: (measured - unmeasured).abs() })
}

/// `Q |ψ⟩`.
pub(crate) fn apply_q<T: Real>(state: &QuantumState<T>) -> Vec<Complex<T>> {
    let n = state.n();
    state.amplitudes().iter().enumerate().map(|(k, &c)| c * q_sign::<T>(k, n)).collect()
}
