//! Occupation distributions and population-imbalance time series.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, expectation_imbalance, ModelParams, QuantumState};
use crate::scalar::Real;
use crate::spectral::{diagonalize, Spectrum};

/// `P(n_L) = |c_{n_L}|²`.
pub fn occupation_probabilities<T: Real>(state: &QuantumState<T>) -> Vec<T> {
    state.amplitudes().iter().map(|c| c.norm_sqr()).collect()
}

/// Maps rounding noise in `[-1e-14, 0)` to zero; anything else passes
/// through unchanged.
pub fn clamp_probability<T: Real>(p: T) -> T {
    if p < T::zero() && p >= T::lit(-1e-14) {
        T::zero()
    } else {
        p
    }
}

/// `P(n_L, t)` on a list of times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilitySeries<T> {
    pub times: Vec<T>,
    /// One distribution over `n_L = 0..=N` per time.
    pub distributions: Vec<Vec<T>>,
}

impl<T: Real> ProbabilitySeries<T> {
    /// Most probable `n_L` at each time (lowest index on ties).
    pub fn peaks(&self) -> Vec<usize> {
        self.distributions
            .iter()
            .map(|d| {
                d.iter().enumerate().fold((0, T::neg_infinity()), |best, (k, &p)| if p > best.1 { (k, p) } else { best }).0
            })
            .collect()
    }
}

pub(crate) fn check_times<T: Real>(times: &[T]) -> Result<()> {
    for (i, &t) in times.iter().enumerate() {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::InvalidParameter(format!("time {t} is negative or not finite")));
        }
        if i > 0 && t < times[i - 1] {
            return Err(Error::InvalidParameter("times must be ascending".into()));
        }
    }
    Ok(())
}

fn evolved<T: Real>(spectrum: &Spectrum<T>, psi0: &QuantumState<T>, times: &[T]) -> Result<Vec<QuantumState<T>>> {
    check_times(times)?;
    times.iter().map(|&t| spectrum.evolve_projective(psi0, t)).collect()
}

/// Distributions at `times` from an existing spectrum.
pub fn probability_series_with<T: Real>(
    spectrum: &Spectrum<T>,
    psi0: &QuantumState<T>,
    times: &[T],
) -> Result<ProbabilitySeries<T>> {
    let distributions = evolved(spectrum, psi0, times)?.iter().map(occupation_probabilities).collect();
    Ok(ProbabilitySeries { times: times.to_vec(), distributions })
}

pub fn probability_series<T: Real>(
    params: &ModelParams<T>,
    psi0: &QuantumState<T>,
    times: &[T],
) -> Result<ProbabilitySeries<T>> {
    check_times(times)?;
    let spectrum = diagonalize(&build_hamiltonian(params))?;
    probability_series_with(&spectrum, psi0, times)
}

pub fn imbalance_series_with<T: Real>(spectrum: &Spectrum<T>, psi0: &QuantumState<T>, times: &[T]) -> Result<Vec<T>> {
    Ok(evolved(spectrum, psi0, times)?.iter().map(expectation_imbalance).collect())
}

/// `⟨z⟩(t)` at each of `times`.
pub fn imbalance_series<T: Real>(params: &ModelParams<T>, psi0: &QuantumState<T>, times: &[T]) -> Result<Vec<T>> {
    check_times(times)?;
    let spectrum = diagonalize(&build_hamiltonian(params))?;
    imbalance_series_with(&spectrum, psi0, times)
}

/// Bare Josephson period `2π/J`.
pub fn josephson_period<T: Real>(hopping: T) -> T {
    T::lit(2.0) * T::PI() / hopping
}

/// Running maximum of `|values|` over the trailing window `(t - window, t]`.
pub fn envelope<T: Real>(times: &[T], values: &[T], window: T) -> Vec<T> {
    assert_eq!(times.len(), values.len(), "times and values differ in length");
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::with_capacity(values.len());
    for (i, &t) in times.iter().enumerate() {
        while queue.back().is_some_and(|&j| values[j].abs() <= values[i].abs()) {
            queue.pop_back();
        }
        queue.push_back(i);
        while queue.front().is_some_and(|&j| times[j] <= t - window) {
            queue.pop_front();
        }
        out.push(values[queue[0]].abs());
    }
    out
}

/// First time, at least one window in, at which the envelope of `values` is
/// below `level`.
pub fn envelope_decay_time<T: Real>(times: &[T], values: &[T], window: T, level: T) -> Option<T> {
    let env = envelope(times, values, window);
    let start = times.first().copied()?;
    times.iter().zip(&env).find(|(&t, &e)| t - start >= window && e < level).map(|(&t, _)| t)
}
