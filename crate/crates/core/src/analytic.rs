//! Closed-form results for non-interacting bosons (`U = 0`).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lgi::LgPoint;
use crate::scalar::Real;
use crate::special::ln_binomial;

/// Initial state `|N - l⟩_L |l⟩_R` observed at time `t` (units `1/J`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams<T> {
    pub n: usize,
    pub l: usize,
    pub t: T,
}

impl<T: Real> AnalyticParams<T> {
    pub fn new(n: usize, l: usize, t: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if l > n {
            return Err(Error::OutOfRange { index: l, max: n });
        }
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
        }
        Ok(Self { n, l, t })
    }
}

/// Probability of finding `n_R` bosons in the right well.
///
/// For `l = 0` this is the binomial `C(N, n_R) c^{N-n_R} s^{n_R}` with
/// `c = cos²(Jt/2)`, `s = sin²(Jt/2)`, evaluated in log space. Otherwise the
/// whole [`analytic_matrix`] is built, which costs `O(N³)`.
pub fn analytic_probability<T: Real>(p: &AnalyticParams<T>, n_right: usize) -> Result<T> {
    if n_right > p.n {
        return Err(Error::OutOfRange { index: n_right, max: p.n });
    }
    if p.l == 0 {
        return Ok(free_binomial(p.n, p.t, n_right));
    }
    Ok(analytic_matrix(p.n, p.t)?[n_right * (p.n + 1) + p.l])
}

fn free_binomial<T: Real>(n: usize, t: T, n_right: usize) -> T {
    let half = t * T::lit(0.5);
    let (c, s) = (half.cos().abs(), half.sin().abs());
    let k = n - n_right;
    // 0^0 = 1 has to survive the logarithms.
    let log_c = if k == 0 { T::zero() } else { T::lit(2.0) * T::count(k) * c.ln() };
    let log_s = if n_right == 0 { T::zero() } else { T::lit(2.0) * T::count(n_right) * s.ln() };
    (ln_binomial::<T>(n, n_right) + log_c + log_s).exp()
}

/// The distribution over `n_R = 0..=N` for initial `|N - l, l⟩`.
pub fn analytic_distribution<T: Real>(p: &AnalyticParams<T>) -> Result<Vec<T>> {
    if p.l == 0 {
        return Ok((0..=p.n).map(|k| free_binomial(p.n, p.t, k)).collect());
    }
    let d = p.n + 1;
    let m = analytic_matrix(p.n, p.t)?;
    Ok((0..d).map(|r| m[r * d + p.l]).collect())
}

/// `P(n_R | l; t)` for every pair, row-major `[n_R * (N+1) + l]`.
///
/// Each boson evolves independently with `a† → c a† - i s b†`,
/// `b† → -i s a† + c b†` (`c = cos(Jt/2)`, `s = sin(Jt/2)`); expanding the
/// two powers gives the double binomial sum over `μ + ν = n_R` with phase
/// `(-i)^{l+μ-ν}`. That sum alternates and cancels by tens of orders of
/// magnitude for balanced `l`, so instead the amplitudes are built up one
/// boson at a time,
/// `A_{N+1}(r, l) = Σ_{a,b} √(n_a n_b) u_{ba} A_N(r - [b=R], l - [a=R]) / (N+1)`,
/// with `n_a` counted in the input and `n_b` in the output. Every step is a
/// bounded average of four neighbours, so rounding errors stay at the level
/// of a few ulps per boson.
pub fn analytic_matrix<T: Real>(n: usize, t: T) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let half = t * T::lit(0.5);
    let zero = Complex::new(T::zero(), T::zero());
    let stay = Complex::new(half.cos(), T::zero());
    let hop = Complex::new(T::zero(), -half.sin());
    let roots: Vec<T> = (0..=n).map(|k| T::count(k).sqrt()).collect();

    let mut amps = vec![Complex::new(T::one(), T::zero())];
    for k in 1..=n {
        let w = k + 1;
        let inv = T::one() / T::count(k);
        let prev = &amps;
        let at = |r: usize, l: usize| prev[r * k + l];
        let mut next = vec![zero; w * w];
        for r in 0..w {
            for l in 0..w {
                let (in_l, in_r) = (roots[k - l], roots[l]);
                let (out_l, out_r) = (roots[k - r], roots[r]);
                let mut acc = zero;
                if r < k && l < k {
                    acc = acc + stay * at(r, l) * (in_l * out_l);
                }
                if r > 0 && l > 0 {
                    acc = acc + stay * at(r - 1, l - 1) * (in_r * out_r);
                }
                if r > 0 && l < k {
                    acc = acc + hop * at(r - 1, l) * (in_l * out_r);
                }
                if r < k && l > 0 {
                    acc = acc + hop * at(r, l - 1) * (in_r * out_l);
                }
                next[r * w + l] = acc * inv;
            }
        }
        amps = next;
    }
    Ok(amps.iter().map(|a| a.norm_sqr()).collect())
}

fn q_right<T: Real>(n_right: usize, n: usize) -> T {
    if n_right <= n / 2 {
        T::one()
    } else {
        -T::one()
    }
}

/// Collapsed correlators for `|N, 0⟩` at `U = 0`, `J = 1`.
pub fn analytic_correlators<T: Real>(n: usize, tau: T) -> Result<LgPoint<T>> {
    let first = analytic_distribution(&AnalyticParams::new(n, 0, tau)?)?;
    let second = analytic_distribution(&AnalyticParams::new(n, 0, T::lit(2.0) * tau)?)?;
    let cond = analytic_matrix(n, tau)?;
    let d = n + 1;
    let c12 = first.iter().enumerate().map(|(k, &p)| q_right::<T>(k, n) * p).sum();
    let c13 = second.iter().enumerate().map(|(k, &p)| q_right::<T>(k, n) * p).sum();
    let mut c23 = T::zero();
    for (k2, &p2) in first.iter().enumerate() {
        let inner: T = (0..d).map(|k3| q_right::<T>(k3, n) * cond[k3 * d + k2]).sum();
        c23 = c23 + q_right::<T>(k2, n) * p2 * inner;
    }
    Ok(LgPoint::new(tau, c12, c23, c13))
}

/// Characteristic time `τ₀ J = arcsin(N^{-1/(2(2⌊N/2⌋+1))})` before which
/// the `|N, 0⟩` correlators stay close to one.
pub fn tau0<T: Real>(n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let exponent = -T::one() / T::count(2 * (2 * (n / 2) + 1));
    Ok(T::count(n).powf(exponent).asin())
}
