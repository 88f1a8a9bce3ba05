//! Log-gamma and log-binomials.

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, `g = 7`).
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
        let pi = T::PI();
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::count(i));
    }
    let t = x + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() + (x + T::lit(0.5)) * t.ln() - t + acc.ln()
}

/// `ln n!`; exact summation below 32, log-gamma above.
pub fn ln_factorial<T: Real>(n: usize) -> T {
    if n < 32 {
        (2..=n).map(|k| T::count(k).ln()).fold(T::zero(), |a, b| a + b)
    } else {
        ln_gamma(T::count(n) + T::one())
    }
}

/// `ln C(n, k)`; `-∞` when `k > n`.
pub fn ln_binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::neg_infinity();
    }
    ln_factorial::<T>(n) - ln_factorial::<T>(k) - ln_factorial::<T>(n - k)
}
