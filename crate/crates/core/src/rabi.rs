//! Strong-coupling regime: the edge doublet of the spectrum, its overlap
//! with the NOON states and the resulting two-state oscillation.

use serde::{Deserialize, Serialize};

use crate::dynamics::occupation_probabilities;
use crate::error::{Error, Result};
use crate::lgi::LgEvaluator;
use crate::model::{build_hamiltonian, fock_state, ModelParams};
use crate::scalar::Real;
use crate::spectral::{diagonalize, Spectrum};

/// Overlap with `(|N,0⟩ + |0,N⟩)/√2` above which the regime counts as
/// accessible.
pub const ACCESSIBLE_OVERLAP: f64 = 0.99;

/// A doublet gap below this many ulps of the spectral scale is treated as
/// numerically degenerate.
pub const RESOLUTION_ULPS: f64 = 16.0;

/// End of the spectrum hosting the NOON doublet: the bottom for attractive
/// interaction, the top for repulsive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Lowest,
    Highest,
}

impl Edge {
    pub fn for_lambda<T: Real>(lambda: T) -> Self {
        if lambda > T::zero() {
            Edge::Highest
        } else {
            Edge::Lowest
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoonOverlaps<T> {
    /// `|⟨N,0|E₀⟩|`.
    pub overlap0: T,
    /// `|⟨0,N|E₀⟩|`.
    pub overlap_n: T,
    /// `|⟨E₀|(|N,0⟩ + |0,N⟩)/√2⟩|`.
    pub bonding: T,
    /// `|E₁ - E₀|`.
    pub gap: T,
    /// Whether `gap` is above the rounding level of the spectrum. If not,
    /// `E₀` is reported as the combination of the doublet localized on
    /// `|N,0⟩`, which is what any finite-precision ground state looks like.
    pub resolved: bool,
}

fn doublet<T: Real>(spectrum: &Spectrum<T>, edge: Edge) -> (usize, usize) {
    let d = spectrum.dim();
    match edge {
        Edge::Lowest => (0, 1),
        Edge::Highest => (d - 1, d - 2),
    }
}

pub fn doublet_resolved<T: Real>(spectrum: &Spectrum<T>, gap: T) -> bool {
    gap > T::lit(RESOLUTION_ULPS) * T::epsilon() * spectrum.scale()
}

pub fn noon_overlaps<T: Real>(spectrum: &Spectrum<T>, edge: Edge) -> NoonOverlaps<T> {
    let n = spectrum.n();
    let (i0, i1) = doublet(spectrum, edge);
    let e = spectrum.eigenvalues();
    let gap = (e[i1] - e[i0]).abs();
    let resolved = doublet_resolved(spectrum, gap);
    let v0 = spectrum.eigenvector(i0);
    let (left, right) = if resolved {
        (v0[n], v0[0])
    } else {
        let v1 = spectrum.eigenvector(i1);
        let r = T::FRAC_1_SQRT_2();
        let plus = ((v0[n] + v1[n]) * r, (v0[0] + v1[0]) * r);
        let minus = ((v0[n] - v1[n]) * r, (v0[0] - v1[0]) * r);
        if plus.0.abs() >= minus.0.abs() {
            plus
        } else {
            minus
        }
    };
    let bonding = ((left + right) * T::FRAC_1_SQRT_2()).abs();
    NoonOverlaps { overlap0: left.abs(), overlap_n: right.abs(), bonding, gap, resolved }
}

/// `cos²(ω₁ t)`: population of `|N,0⟩` in the two-state approximation.
pub fn two_level_population<T: Real>(omega1: T, t: T) -> T {
    (omega1 * t).cos().powi(2)
}

/// Largest `|P_full(N,0; t) - cos²(ω₁ t)|` over `t = k T / steps`,
/// `k = 0..=steps`, starting from `|N,0⟩`.
pub fn two_level_deviation<T: Real>(spectrum: &Spectrum<T>, edge: Edge, steps: usize) -> Result<T> {
    let n = spectrum.n();
    let (i0, i1) = doublet(spectrum, edge);
    let e = spectrum.eigenvalues();
    let omega1 = (e[i1] - e[i0]).abs() * T::lit(0.5);
    if !(omega1 > T::zero()) || steps == 0 {
        return Err(Error::InvalidParameter("no finite Rabi period to sample".into()));
    }
    let period = T::PI() / omega1;
    let psi0 = fock_state(n, n)?;
    let mut worst = T::zero();
    for k in 0..=steps {
        let t = period * T::count(k) / T::count(steps);
        let full = occupation_probabilities(&spectrum.evolve_projective(&psi0, t)?)[n];
        worst = worst.max((full - two_level_population(omega1, t)).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiSummary<T> {
    /// `(E₁ - E₀)/2`, always `≥ 0`.
    pub omega1: T,
    /// `π/ω₁`; `None` if the doublet is not resolved.
    pub period: Option<T>,
    pub overlaps: NoonOverlaps<T>,
    pub accessible: bool,
    /// Largest collapsed `LG` for `|N,0⟩` over `τ ∈ (0, T]`.
    pub lg_max: Option<T>,
    pub tau_at_max: Option<T>,
}

/// Summary of the doublet for `|N,0⟩`, scanning `τ = k T / steps`,
/// `k = 1..=steps`, with the full dynamics.
pub fn rabi_summary<T: Real>(params: &ModelParams<T>, steps: usize) -> Result<RabiSummary<T>> {
    let spectrum = diagonalize(&build_hamiltonian(params))?;
    rabi_summary_with(&spectrum, Edge::for_lambda(params.lambda()), steps)
}

pub fn rabi_summary_with<T: Real>(spectrum: &Spectrum<T>, edge: Edge, steps: usize) -> Result<RabiSummary<T>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("tau grid needs at least one step".into()));
    }
    let overlaps = noon_overlaps(spectrum, edge);
    let omega1 = overlaps.gap * T::lit(0.5);
    let accessible = overlaps.resolved && overlaps.bonding > T::lit(ACCESSIBLE_OVERLAP);
    let mut summary = RabiSummary { omega1, period: None, overlaps, accessible, lg_max: None, tau_at_max: None };
    if !overlaps.resolved {
        return Ok(summary);
    }
    let period = T::PI() / omega1;
    summary.period = Some(period);
    let eval = LgEvaluator::new(spectrum, spectrum.n())?;
    let mut best = (T::neg_infinity(), T::zero());
    for k in 1..=steps {
        let tau = period * T::count(k) / T::count(steps);
        let p = eval.point(tau)?;
        if p.lg > best.0 {
            best = (p.lg, tau);
        }
    }
    summary.lg_max = Some(best.0);
    summary.tau_at_max = Some(best.1);
    Ok(summary)
}
