//! Two-time correlators of `Q`, the Leggett-Garg combination
//! `LG = C12 + C23 - C13`, and grid scans over `(τ, Λ)` and `(τ, n_L(0))`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::occupation_probabilities;
use crate::error::{Error, Result};
use crate::measurement::{apply_q, collapsed_means, mean_q, q_sign, q_vector, Disturbance};
use crate::model::{build_hamiltonian, fock_state, ModelParams, QuantumState};
use crate::scalar::Real;
use crate::spectral::{diagonalize, Spectrum};

/// `LG` must exceed `1` by more than this to count as a violation.
pub const VIOLATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgPoint<T> {
    pub tau: T,
    pub c12: T,
    pub c23: T,
    pub c13: T,
    pub lg: T,
}

impl<T: Real> LgPoint<T> {
    pub fn new(tau: T, c12: T, c23: T, c13: T) -> Self {
        Self { tau, c12, c23, c13, lg: c12 + c23 - c13 }
    }

    pub fn violates(&self) -> bool {
        self.lg > T::one() + T::lit(VIOLATION_THRESHOLD)
    }
}

/// Stand-in for `C23` when the state is not collapsed at the middle time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UncollapsedModel {
    /// `⟨Q⟩(τ) · ⟨Q⟩(2τ)` under uninterrupted evolution.
    #[default]
    Factorized,
    /// `Re ⟨ψ₀| Q(2τ) Q(τ) |ψ₀⟩` with Heisenberg-picture `Q(t)`.
    Symmetrized,
}

/// Correlator evaluation for one spectrum and one initial Fock state.
#[derive(Debug, Clone)]
pub struct LgEvaluator<'a, T> {
    spectrum: &'a Spectrum<T>,
    psi0: QuantumState<T>,
    q1: T,
    q: Vec<T>,
}

fn check_tau<T: Real>(tau: T) -> Result<()> {
    if !tau.is_finite() || tau < T::zero() {
        return Err(Error::InvalidParameter(format!("tau must be finite and >= 0, got {tau}")));
    }
    Ok(())
}

impl<'a, T: Real> LgEvaluator<'a, T> {
    /// `Q1` is fixed by preparing `|initial_left, N - initial_left⟩`.
    pub fn new(spectrum: &'a Spectrum<T>, initial_left: usize) -> Result<Self> {
        let n = spectrum.n();
        let psi0 = fock_state(initial_left, n)?;
        Ok(Self { spectrum, psi0, q1: q_sign(initial_left, n), q: q_vector(n) })
    }

    pub fn initial_state(&self) -> &QuantumState<T> {
        &self.psi0
    }

    /// Collapsed correlators: the middle measurement resolves `n_L`.
    pub fn point(&self, tau: T) -> Result<LgPoint<T>> {
        check_tau(tau)?;
        let psi1 = self.spectrum.evolve_projective(&self.psi0, tau)?;
        let psi2 = self.spectrum.evolve_projective(&psi1, tau)?;
        let p1 = occupation_probabilities(&psi1);
        let g = collapsed_means(self.spectrum, tau, &p1, &self.q)?;
        let c23 = p1.iter().zip(&g).zip(&self.q).map(|((&p, &g), &q)| q * p * g).sum();
        Ok(LgPoint::new(tau, self.q1 * mean_q(&psi1), c23, self.q1 * mean_q(&psi2)))
    }

    pub fn uncollapsed(&self, tau: T, model: UncollapsedModel) -> Result<LgPoint<T>> {
        check_tau(tau)?;
        let psi1 = self.spectrum.evolve_projective(&self.psi0, tau)?;
        let psi2 = self.spectrum.evolve_projective(&psi1, tau)?;
        let (m1, m2) = (mean_q(&psi1), mean_q(&psi2));
        let c23 = match model {
            UncollapsedModel::Factorized => m1 * m2,
            UncollapsedModel::Symmetrized => {
                let flipped = QuantumState::from_raw(apply_q(&psi1));
                let moved = self.spectrum.evolve_projective(&flipped, tau)?;
                let qmoved = apply_q(&moved);
                psi2.amplitudes()
                    .iter()
                    .zip(&qmoved)
                    .map(|(a, b)| a.conj() * b)
                    .fold(Complex::new(T::zero(), T::zero()), |s, x| s + x)
                    .re
            }
        };
        Ok(LgPoint::new(tau, self.q1 * m1, c23, self.q1 * m2))
    }

    /// `⟨Q(2τ)⟩` with and without the number measurement at `τ`.
    pub fn disturbance(&self, tau: T) -> Result<Disturbance<T>> {
        crate::measurement::q3_disturbance(self.spectrum, &self.psi0, tau)
    }
}

pub fn correlators<T: Real>(spectrum: &Spectrum<T>, initial_left: usize, tau: T) -> Result<LgPoint<T>> {
    LgEvaluator::new(spectrum, initial_left)?.point(tau)
}

pub fn correlators_uncollapsed<T: Real>(
    spectrum: &Spectrum<T>,
    initial_left: usize,
    tau: T,
    model: UncollapsedModel,
) -> Result<LgPoint<T>> {
    LgEvaluator::new(spectrum, initial_left)?.uncollapsed(tau, model)
}

/// Meaning of the second grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    Lambda,
    InitialLeft,
}

/// `LgPoint`s on a rectangular grid, one row per second-axis value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid<T> {
    pub n: usize,
    pub axis: ScanAxis,
    pub taus: Vec<T>,
    pub values: Vec<T>,
    /// Row-major: `cells[row * taus.len() + col]`.
    pub cells: Vec<LgPoint<T>>,
}

impl<T: Real> ScanGrid<T> {
    pub fn row(&self, row: usize) -> &[LgPoint<T>] {
        let w = self.taus.len();
        &self.cells[row * w..(row + 1) * w]
    }

    pub fn cell(&self, row: usize, col: usize) -> &LgPoint<T> {
        &self.cells[row * self.taus.len() + col]
    }

    pub fn max_lg(&self, row: usize) -> T {
        self.row(row).iter().fold(T::neg_infinity(), |m, p| m.max(p.lg))
    }

    /// Second-axis values whose row violates the inequality somewhere.
    pub fn violation_region(&self) -> Vec<T> {
        (0..self.values.len()).filter(|&r| self.row(r).iter().any(LgPoint::violates)).map(|r| self.values[r]).collect()
    }
}

/// First `τ` at which `LG` violates, and the first later `τ` at which it is
/// back at or below the threshold.
pub fn violation_window<T: Real>(points: &[LgPoint<T>]) -> Option<(T, Option<T>)> {
    let start = points.iter().position(LgPoint::violates)?;
    let end = points[start..].iter().find(|p| !p.violates()).map(|p| p.tau);
    Some((points[start].tau, end))
}

pub(crate) fn check_axis<T: Real>(name: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} grid has non-finite values")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("{name} grid must be strictly increasing")));
    }
    Ok(())
}

fn row_points<T: Real>(eval: &LgEvaluator<'_, T>, taus: &[T]) -> Result<Vec<LgPoint<T>>> {
    taus.iter().map(|&t| eval.point(t)).collect()
}

/// Collapsed `LG` over `taus` (units `1/J`, `J = 1`) for each `Λ`.
pub fn scan_tau_lambda<T: Real>(n: usize, initial_left: usize, taus: &[T], lambdas: &[T]) -> Result<ScanGrid<T>> {
    check_axis("tau", taus)?;
    check_axis("lambda", lambdas)?;
    if taus[0] < T::zero() {
        return Err(Error::InvalidParameter("tau grid must be >= 0".into()));
    }
    let mut cells = Vec::with_capacity(taus.len() * lambdas.len());
    for &lambda in lambdas {
        let spectrum = diagonalize(&build_hamiltonian(&ModelParams::with_lambda(n, lambda)?))?;
        cells.extend(row_points(&LgEvaluator::new(&spectrum, initial_left)?, taus)?);
    }
    Ok(ScanGrid { n, axis: ScanAxis::Lambda, taus: taus.to_vec(), values: lambdas.to_vec(), cells })
}

/// Collapsed `LG` over `taus` for each initial left occupation.
pub fn scan_tau_initial<T: Real>(n: usize, lambda: T, taus: &[T], initials: &[usize]) -> Result<ScanGrid<T>> {
    check_axis("tau", taus)?;
    let values: Vec<T> = initials.iter().map(|&k| T::count(k)).collect();
    check_axis("initial", &values)?;
    if taus[0] < T::zero() {
        return Err(Error::InvalidParameter("tau grid must be >= 0".into()));
    }
    let spectrum = diagonalize(&build_hamiltonian(&ModelParams::with_lambda(n, lambda)?))?;
    let mut cells = Vec::with_capacity(taus.len() * initials.len());
    for &l in initials {
        cells.extend(row_points(&LgEvaluator::new(&spectrum, l)?, taus)?);
    }
    Ok(ScanGrid { n, axis: ScanAxis::InitialLeft, taus: taus.to_vec(), values, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(n: usize, lambda: f64) -> Spectrum<f64> {
        diagonalize(&build_hamiltonian(&ModelParams::<f64>::with_lambda(n, lambda).unwrap())).unwrap()
    }

    #[test]
    fn zero_interval_gives_unit_correlators() {
        let spec = spectrum(12, 0.8);
        let p = correlators(&spec, 12, 0.0).unwrap();
        for c in [p.c12, p.c23, p.c13, p.lg] {
            assert!((c - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_boson_closed_form() {
        let spec = spectrum(1, 0.0);
        let tau = std::f64::consts::FRAC_PI_3;
        let p = correlators(&spec, 1, tau).unwrap();
        assert!((p.c12 - 0.5).abs() < 1e-14);
        assert!((p.c23 - 0.5).abs() < 1e-14);
        assert!((p.c13 + 0.5).abs() < 1e-14);
        assert!((p.lg - 1.5).abs() < 1e-14);

        let u = correlators_uncollapsed(&spec, 1, tau, UncollapsedModel::Factorized).unwrap();
        assert!((u.c23 - tau.cos() * (2.0 * tau).cos()).abs() < 1e-14);
    }

    #[test]
    fn symmetrized_mode_for_one_boson() {
        // Q(t) = cos(Jt) σ_z + sin(Jt) σ_y for H = -(J/2) σ_x, so
        // Re⟨Q(2τ) Q(τ)⟩ = cos(Jτ) for every state.
        let spec = spectrum(1, 0.0);
        for &tau in &[0.2, 0.9, 2.4] {
            let u = correlators_uncollapsed(&spec, 1, tau, UncollapsedModel::Symmetrized).unwrap();
            assert!((u.c23 - f64::cos(tau)).abs() < 1e-13, "tau={tau}");
        }
    }

    #[test]
    fn grids_validate_axes() {
        assert!(scan_tau_lambda::<f64>(4, 4, &[], &[0.0]).is_err());
        assert!(scan_tau_lambda(4, 4, &[0.1, 0.1], &[0.0]).is_err());
        assert!(scan_tau_lambda(4, 4, &[0.1], &[1.0, 0.0]).is_err());
        assert!(scan_tau_initial(4, 0.0, &[0.1], &[3, 2]).is_err());
        assert!(scan_tau_initial(4, 0.0, &[-0.1, 0.1], &[2, 3]).is_err());
    }

    #[test]
    fn scan_rows_match_pointwise_evaluation() {
        let taus = [0.0, 0.4, 0.8, 1.2];
        let grid = scan_tau_lambda(6, 6, &taus, &[-1.0, 0.0, 1.0]).unwrap();
        let spec = spectrum(6, 0.0);
        for (i, &t) in taus.iter().enumerate() {
            assert_eq!(*grid.cell(1, i), correlators(&spec, 6, t).unwrap());
        }
        let by_init = scan_tau_initial(6, 0.0, &taus, &[5, 6]).unwrap();
        assert_eq!(by_init.row(1), grid.row(1));
    }

    #[test]
    fn violation_window_finds_onset_and_return() {
        let pts: Vec<LgPoint<f64>> = [1.0, 1.0 + 1e-9, 1.2, 1.4, 0.9]
            .iter()
            .enumerate()
            .map(|(i, &lg)| LgPoint { tau: i as f64, c12: 0.0, c23: 0.0, c13: 0.0, lg })
            .collect();
        assert_eq!(violation_window(&pts), Some((2.0, Some(4.0))));
        assert_eq!(violation_window(&pts[..2]), None);
    }
}
