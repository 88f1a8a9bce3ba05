//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar (`f32` or `f64`) the model is computed in.
///
/// Besides the usual float operations the trait carries a dense matrix
/// product, which is dispatched to the matching `matrixmultiply` kernel.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// `c ← a · b` for dense row-major operands of shape `m×k`, `k×n`, `m×n`.
    fn matmul(m: usize, k: usize, n: usize, a: &[Self], b: &[Self], c: &mut [Self]) {
        Self::matmul_strided(m, k, n, a, (k, 1), b, c);
    }

    /// `c ← a · b` where `a` is read through explicit (row, column) strides;
    /// `b` and `c` are dense row-major.
    fn matmul_strided(
        m: usize,
        k: usize,
        n: usize,
        a: &[Self],
        a_strides: (usize, usize),
        b: &[Self],
        c: &mut [Self],
    );

    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts a count or index into `Self`.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }
}

fn check_shapes<T>(m: usize, k: usize, n: usize, a: &[T], (rs, cs): (usize, usize), b: &[T], c: &[T]) {
    if m > 0 && k > 0 {
        assert!((m - 1) * rs + (k - 1) * cs < a.len(), "lhs shape");
    }
    assert_eq!(b.len(), k * n, "rhs shape");
    assert_eq!(c.len(), m * n, "output shape");
}

impl Real for f64 {
    fn matmul_strided(
        m: usize,
        k: usize,
        n: usize,
        a: &[f64],
        a_strides: (usize, usize),
        b: &[f64],
        c: &mut [f64],
    ) {
        check_shapes(m, k, n, a, a_strides, b, c);
        if m == 0 || n == 0 {
            return;
        }
        // SAFETY: every index reachable through the given shapes and strides
        // was bounds-checked above.
        unsafe {
            matrixmultiply::dgemm(
                m,
                k,
                n,
                1.0,
                a.as_ptr(),
                a_strides.0 as isize,
                a_strides.1 as isize,
                b.as_ptr(),
                n as isize,
                1,
                0.0,
                c.as_mut_ptr(),
                n as isize,
                1,
            );
        }
    }
}

impl Real for f32 {
    fn matmul_strided(
        m: usize,
        k: usize,
        n: usize,
        a: &[f32],
        a_strides: (usize, usize),
        b: &[f32],
        c: &mut [f32],
    ) {
        check_shapes(m, k, n, a, a_strides, b, c);
        if m == 0 || n == 0 {
            return;
        }
        // SAFETY: every index reachable through the given shapes and strides
        // was bounds-checked above.
        unsafe {
            matrixmultiply::sgemm(
                m,
                k,
                n,
                1.0,
                a.as_ptr(),
                a_strides.0 as isize,
                a_strides.1 as isize,
                b.as_ptr(),
                n as isize,
                1,
                0.0,
                c.as_mut_ptr(),
                n as isize,
                1,
            );
        }
    }
}

/// Normalization slack for a scalar type: `1e-12` in double precision.
pub(crate) fn norm_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}
