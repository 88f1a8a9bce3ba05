//! Two-mode Bose-Josephson junction: parameters, Fock basis and Hamiltonian.
//!
//! Basis vectors are indexed by the left-well occupation `n_L = 0..=N`; index
//! `n_L` stands for the Fock state with `n_L` bosons on the left and
//! `N - n_L` on the right. In this basis the Hamiltonian
//! `H = -J S_x + (U/N) S_z^2` is real symmetric tridiagonal.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{norm_tolerance, Real};

/// Physical configuration of the junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    n: usize,
    hopping: T,
    interaction: T,
}

impl<T: Real> ModelParams<T> {
    /// Builds parameters from the hopping `J` and the interaction `U`.
    pub fn new(n: usize, hopping: T, interaction: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("particle number must be at least 1".into()));
        }
        if !(hopping > T::zero()) || !hopping.is_finite() {
            return Err(Error::InvalidParameter(format!("hopping must be positive, got {hopping}")));
        }
        if !interaction.is_finite() {
            return Err(Error::InvalidParameter(format!("interaction must be finite, got {interaction}")));
        }
        Ok(Self { n, hopping, interaction })
    }

    /// Builds parameters from `Λ = U/J` with `J = 1`.
    pub fn with_lambda(n: usize, lambda: T) -> Result<Self> {
        Self::new(n, T::one(), lambda)
    }

    /// Builds parameters from `J` and `Λ`, deriving `U = Λ J`.
    pub fn with_hopping_and_lambda(n: usize, hopping: T, lambda: T) -> Result<Self> {
        Self::new(n, hopping, lambda * hopping)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hopping(&self) -> T {
        self.hopping
    }

    pub fn interaction(&self) -> T {
        self.interaction
    }

    /// Dimensionless interaction `Λ = U/J`.
    pub fn lambda(&self) -> T {
        self.interaction / self.hopping
    }

    /// Dimension of the Fock space, `N + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Same configuration with the sign of the interaction flipped.
    pub fn mirrored_interaction(&self) -> Self {
        Self { interaction: -self.interaction, ..*self }
    }
}

/// Normalized state over the Fock basis `n_L = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> QuantumState<T> {
    /// Wraps amplitudes `c[n_L]`; their squared norm must be 1 within `1e-12`.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidParameter(
                "a state needs at least two amplitudes (N >= 1)".into(),
            ));
        }
        let norm: T = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !((norm - T::one()).abs() <= norm_tolerance::<T>()) {
            return Err(Error::NotNormalized(norm.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm: T = amplitudes.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm.to_f64().unwrap_or(f64::NAN)));
        }
        for c in &mut amplitudes {
            *c = *c / norm;
        }
        Self::new(amplitudes)
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex<T>>) -> Self {
        Self { amplitudes }
    }

    /// Particle number `N`.
    pub fn n(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }
}

/// Fock state with `n_left` bosons in the left well out of `n`.
pub fn fock_state<T: Real>(n_left: usize, n: usize) -> Result<QuantumState<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("particle number must be at least 1".into()));
    }
    if n_left > n {
        return Err(Error::OutOfRange { index: n_left, max: n });
    }
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); n + 1];
    amplitudes[n_left] = Complex::new(T::one(), T::zero());
    Ok(QuantumState { amplitudes })
}

/// Population imbalance `z = (2 n_L - N) / N` of a Fock index.
pub fn imbalance_of<T: Real>(n_left: usize, n: usize) -> T {
    (T::lit(2.0) * T::count(n_left) - T::count(n)) / T::count(n)
}

/// `⟨ẑ⟩ = Σ |c[n_L]|² (2 n_L - N)/N`.
pub fn expectation_imbalance<T: Real>(state: &QuantumState<T>) -> T {
    let n = state.n();
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm_sqr() * imbalance_of::<T>(k, n))
        .sum()
}

/// Symmetric tridiagonal Fock-basis matrix of the junction Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix<T> {
    diag: Vec<T>,
    offdiag: Vec<T>,
}

impl<T: Real> HamiltonianMatrix<T> {
    /// Wraps explicit tridiagonal entries; `offdiag` must be one shorter.
    pub fn from_parts(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if diag.len() < 2 {
            return Err(Error::InvalidParameter("matrix must be at least 2x2".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len() - 1, found: offdiag.len() });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    /// Entry `k` couples `n_L = k` and `n_L = k + 1`.
    pub fn offdiag(&self) -> &[T] {
        &self.offdiag
    }

    /// Entry `(row, col)` of the full matrix.
    pub fn get(&self, row: usize, col: usize) -> T {
        if row == col {
            self.diag[row]
        } else if row + 1 == col {
            self.offdiag[row]
        } else if col + 1 == row {
            self.offdiag[col]
        } else {
            T::zero()
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let d = self.dim();
        let mut out = vec![T::zero(); d * d];
        for r in 0..d {
            for c in r.saturating_sub(1)..(r + 2).min(d) {
                out[r * d + c] = self.get(r, c);
            }
        }
        out
    }

    /// `H · v` for a complex vector.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let d = self.dim();
        assert_eq!(v.len(), d, "vector length");
        (0..d)
            .map(|r| {
                let mut acc = v[r] * self.diag[r];
                if r > 0 {
                    acc = acc + v[r - 1] * self.offdiag[r - 1];
                }
                if r + 1 < d {
                    acc = acc + v[r + 1] * self.offdiag[r];
                }
                acc
            })
            .collect()
    }

    /// Real-valued `H · v`.
    pub fn apply_real(&self, v: &[T]) -> Vec<T> {
        let d = self.dim();
        assert_eq!(v.len(), d, "vector length");
        (0..d)
            .map(|r| {
                let mut acc = self.diag[r] * v[r];
                if r > 0 {
                    acc = acc + self.offdiag[r - 1] * v[r - 1];
                }
                if r + 1 < d {
                    acc = acc + self.offdiag[r] * v[r + 1];
                }
                acc
            })
            .collect()
    }

    /// `⟨ψ|H|ψ⟩` (real for a Hermitian matrix).
    pub fn energy(&self, state: &QuantumState<T>) -> T {
        let hv = self.apply(state.amplitudes());
        state.amplitudes().iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn trace(&self) -> T {
        self.diag.iter().copied().sum()
    }

    /// Whether the matrix commutes with the left-right swap `n_L ↔ N - n_L`.
    pub fn is_reflection_symmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|k| self.diag[k] == self.diag[d - 1 - k])
            && (0..d - 1).all(|k| self.offdiag[k] == self.offdiag[d - 2 - k])
    }
}

/// Fock-basis matrix of `-J S_x + (U/N) S_z^2`.
///
/// `diag[n_L] = (U/N)(n_L - N/2)^2` and
/// `offdiag[n_L] = -(J/2) sqrt((n_L + 1)(N - n_L))`.
pub fn build_hamiltonian<T: Real>(params: &ModelParams<T>) -> HamiltonianMatrix<T> {
    let n = params.n();
    let nf = T::count(n);
    let half = nf / T::lit(2.0);
    let u_per_n = params.interaction() / nf;
    let half_j = params.hopping() / T::lit(2.0);
    let diag = (0..=n)
        .map(|k| {
            let sz = T::count(k) - half;
            u_per_n * sz * sz
        })
        .collect();
    let offdiag = (0..n)
        .map(|k| -half_j * (T::count(k + 1) * T::count(n - k)).sqrt())
        .collect();
    HamiltonianMatrix { diag, offdiag }
}
