//! Exact diagonalization of the tridiagonal Hamiltonian and spectral
//! time evolution.
//!
//! The eigenproblem is not solved on `H` directly but on a canonical
//! representative `H_c = σ D H D`, where `σ = ±1` makes the trace
//! non-negative and the diagonal signature `D` makes every off-diagonal
//! entry non-positive. `H(Λ)` and `H(-Λ)` share the same representative, so
//! both are propagated through bitwise identical eigendata. When `H_c`
//! commutes with the left-right swap it is further split into its even and
//! odd parity blocks, which halves the size of every dense operation and
//! keeps near-degenerate parity doublets from mixing.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{HamiltonianMatrix, QuantumState};
use crate::scalar::Real;

/// Iteration cap per eigenvalue of the implicit QL sweep.
pub const MAX_QL_ITERATIONS: usize = 50;

/// Behaviour of the left-right swap on an eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Switches for [`diagonalize_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Solve the sign-canonical representative instead of `H` itself.
    pub canonicalize: bool,
    /// Split reflection-symmetric matrices into parity blocks.
    pub parity_blocks: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { canonicalize: true, parity_blocks: true }
    }
}

/// Eigendecomposition of one real symmetric tridiagonal block.
#[derive(Debug, Clone)]
struct Block<T> {
    energies: Vec<T>,
    /// Vector-major: `vectors[i * m + k]` is component `k` of eigenvector `i`.
    vectors: Vec<T>,
}

impl<T: Real> Block<T> {
    fn size(&self) -> usize {
        self.energies.len()
    }

    fn vector(&self, i: usize) -> &[T] {
        let m = self.size();
        &self.vectors[i * m..(i + 1) * m]
    }

    /// `Σ_i e^{-i σ (E_i - ref) t} w_i (w_iᵀ x)` for a complex block vector.
    fn propagate(&self, x: &[Complex<T>], t: T, sigma: T, reference: T) -> Vec<Complex<T>> {
        let m = self.size();
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; m];
        for (i, &energy) in self.energies.iter().enumerate() {
            let w = self.vector(i);
            let c = w.iter().zip(x).fold(zero, |acc, (&wk, &xk)| acc + xk * wk);
            let phase = sigma * (energy - reference) * t;
            let c = c * Complex::new(phase.cos(), -phase.sin());
            for (o, &wk) in out.iter_mut().zip(w) {
                *o = *o + c * wk;
            }
        }
        out
    }

    /// Columns `cols` of `exp(-i H_b t)` (up to a global phase), returned as
    /// row-major `m × |cols|` real and imaginary parts.
    fn propagator_columns(&self, cols: &[usize], t: T, reference: T) -> (Vec<T>, Vec<T>) {
        let m = self.size();
        let k = cols.len();
        let mut rhs = vec![T::zero(); m * 2 * k];
        for (i, &energy) in self.energies.iter().enumerate() {
            let phase = (energy - reference) * t;
            let (sin, cos) = phase.sin_cos();
            let w = self.vector(i);
            let row = &mut rhs[i * 2 * k..(i + 1) * 2 * k];
            for (j, &col) in cols.iter().enumerate() {
                row[j] = cos * w[col];
                row[k + j] = -sin * w[col];
            }
        }
        // out[r, j] = Σ_i w_i[r] rhs[i, j]; the left operand is Wᵀ read
        // through swapped strides.
        let mut out = vec![T::zero(); m * 2 * k];
        T::matmul_strided(m, m, 2 * k, &self.vectors, (1, m), &rhs, &mut out);
        let mut re = vec![T::zero(); m * k];
        let mut im = vec![T::zero(); m * k];
        for r in 0..m {
            re[r * k..(r + 1) * k].copy_from_slice(&out[r * 2 * k..r * 2 * k + k]);
            im[r * k..(r + 1) * k].copy_from_slice(&out[r * 2 * k + k..(r + 1) * 2 * k]);
        }
        (re, im)
    }
}

#[derive(Debug, Clone)]
enum Layout<T> {
    /// Even block in the basis `(|k⟩ + |N-k⟩)/√2` (plus `|N/2⟩` for even
    /// `N`), odd block in `(|k⟩ - |N-k⟩)/√2`, `k < N/2`.
    Parity { even: Block<T>, odd: Block<T> },
    Full(Block<T>),
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    n: usize,
    eigenvalues: Vec<T>,
    /// Vector-major, paired with `eigenvalues`.
    eigenvectors: Vec<T>,
    parities: Option<Vec<Parity>>,
    /// `σ`: the canonical matrix is `σ D H D`.
    sigma: T,
    /// Diagonal of `D`.
    signs: Vec<T>,
    layout: Layout<T>,
    /// Canonical energy subtracted from all phases when only probabilities
    /// are needed; keeps `(E_i - ref) t` small for the dominant states.
    reference: T,
}

/// Diagonalizes `h` with the default [`SolverOptions`].
pub fn diagonalize<T: Real>(h: &HamiltonianMatrix<T>) -> Result<Spectrum<T>> {
    diagonalize_with(h, SolverOptions::default())
}

pub fn diagonalize_with<T: Real>(h: &HamiltonianMatrix<T>, options: SolverOptions) -> Result<Spectrum<T>> {
    let n = h.n();
    let dim = h.dim();

    let (sigma, signs) = if options.canonicalize {
        let sigma = if h.trace() < T::zero() { -T::one() } else { T::one() };
        let mut signs = Vec::with_capacity(dim);
        signs.push(T::one());
        for (k, &e) in h.offdiag().iter().enumerate() {
            let s = signs[k];
            signs.push(if sigma * e > T::zero() { -s } else { s });
        }
        (sigma, signs)
    } else {
        (T::one(), vec![T::one(); dim])
    };
    let diag: Vec<T> = h.diag().iter().map(|&d| sigma * d).collect();
    let offdiag: Vec<T> = h
        .offdiag()
        .iter()
        .enumerate()
        .map(|(k, &e)| sigma * signs[k] * signs[k + 1] * e)
        .collect();
    let canonical = HamiltonianMatrix::from_parts(diag, offdiag)?;

    let layout = if options.parity_blocks && canonical.is_reflection_symmetric() {
        let (even_d, even_e, odd_d, odd_e) = parity_blocks(&canonical);
        let (ev, evec) = tridiagonal_eigen(&even_d, &even_e)?;
        let (ov, ovec) = tridiagonal_eigen(&odd_d, &odd_e).map_err(|err| match err {
            Error::NoConvergence { index, iterations } => {
                Error::NoConvergence { index: index + even_d.len(), iterations }
            }
            other => other,
        })?;
        Layout::Parity {
            even: Block { energies: ev, vectors: evec },
            odd: Block { energies: ov, vectors: ovec },
        }
    } else {
        let (v, vec) = tridiagonal_eigen(canonical.diag(), canonical.offdiag())?;
        Layout::Full(Block { energies: v, vectors: vec })
    };

    // Canonical eigenpairs mapped back to the Fock basis of `h`.
    let mut pairs: Vec<(T, Vec<T>, Option<Parity>)> = Vec::with_capacity(dim);
    match &layout {
        Layout::Parity { even, odd } => {
            for (block, parity) in [(even, Parity::Even), (odd, Parity::Odd)] {
                for i in 0..block.size() {
                    let fock = block_to_fock_real(n, parity, block.vector(i));
                    pairs.push((block.energies[i], fock, Some(parity)));
                }
            }
        }
        Layout::Full(block) => {
            for i in 0..block.size() {
                pairs.push((block.energies[i], block.vector(i).to_vec(), None));
            }
        }
    }
    let reference = pairs
        .iter()
        .map(|p| p.0)
        .fold(T::zero(), |best, e| if e.abs() > best.abs() { e } else { best });

    // Parity survives `D` only when it commutes with the swap up to a sign.
    let swap_sign = signs[0] * signs[n];
    let parity_kept = (0..dim).all(|k| signs[k] * signs[n - k] == swap_sign);

    let mut mapped: Vec<(T, Vec<T>, Option<Parity>)> = pairs
        .into_iter()
        .map(|(e, w, p)| {
            let mut v: Vec<T> = w.iter().zip(&signs).map(|(&x, &s)| x * s).collect();
            let parity = match p {
                Some(p) if parity_kept => Some(if swap_sign < T::zero() { flip(p) } else { p }),
                _ => None,
            };
            fix_sign(&mut v);
            (sigma * e, v, parity)
        })
        .collect();
    mapped.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));

    let parities = mapped.iter().map(|p| p.2).collect::<Option<Vec<_>>>();
    let eigenvalues = mapped.iter().map(|p| p.0).collect();
    let mut eigenvectors = Vec::with_capacity(dim * dim);
    for (_, v, _) in &mapped {
        eigenvectors.extend_from_slice(v);
    }

    Ok(Spectrum { n, eigenvalues, eigenvectors, parities, sigma, signs, layout, reference })
}

fn flip(p: Parity) -> Parity {
    match p {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
    }
}

/// Largest-magnitude component made positive (first index on ties).
fn fix_sign<T: Real>(v: &mut [T]) {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = k;
        }
    }
    if v[best] < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Number of mirror pairs `(k, N-k)` with `k < N - k`.
fn pair_count(n: usize) -> usize {
    n.div_ceil(2)
}

fn has_center(n: usize) -> bool {
    n.is_multiple_of(2)
}

/// Even and odd blocks of a reflection-symmetric tridiagonal matrix.
fn parity_blocks<T: Real>(h: &HamiltonianMatrix<T>) -> (Vec<T>, Vec<T>, Vec<T>, Vec<T>) {
    let n = h.n();
    let d = h.diag();
    let e = h.offdiag();
    let p = pair_count(n);
    let mut even_d: Vec<T> = d[..p].to_vec();
    let mut odd_d: Vec<T> = d[..p].to_vec();
    let mut even_e: Vec<T> = e[..p - 1].to_vec();
    let odd_e: Vec<T> = e[..p - 1].to_vec();
    if has_center(n) {
        even_d.push(d[p]);
        even_e.push(T::SQRT_2() * e[p - 1]);
    } else {
        // The innermost pair (p-1, p) is coupled directly.
        even_d[p - 1] = even_d[p - 1] + e[p - 1];
        odd_d[p - 1] = odd_d[p - 1] - e[p - 1];
    }
    (even_d, even_e, odd_d, odd_e)
}

fn block_to_fock_real<T: Real>(n: usize, parity: Parity, y: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); n + 1];
    let r = T::FRAC_1_SQRT_2();
    let sign = match parity {
        Parity::Even => T::one(),
        Parity::Odd => -T::one(),
    };
    for k in 0..pair_count(n) {
        out[k] = y[k] * r;
        out[n - k] = sign * y[k] * r;
    }
    if has_center(n) && parity == Parity::Even {
        out[n / 2] = y[pair_count(n)];
    }
    out
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// Returns ascending eigenvalues and vector-major eigenvectors.
pub(crate) fn tridiagonal_eigen<T: Real>(diag: &[T], offdiag: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = diag.len();
    assert!(n >= 1 && offdiag.len() + 1 == n, "tridiagonal shape");
    if diag.iter().chain(offdiag).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("matrix entries must be finite".into()));
    }
    let two = T::lit(2.0);
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(offdiag);
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }

    let eps = T::epsilon();
    let mut shift = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { index: l, iterations: MAX_QL_ITERATIONS });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                shift = shift + h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (T::one(), T::one(), T::one());
                let el1 = e[l + 1];
                let (mut s, mut s2) = (T::zero(), T::zero());
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zj = &mut hi[..n];
                    for (a, b) in zi.iter_mut().zip(zj.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] = d[l] + shift;
        e[l] = T::zero();
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        vectors.extend_from_slice(&z[i * n..(i + 1) * n]);
    }
    Ok((values, vectors))
}

impl<T: Real> Spectrum<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Eigenvector paired with `eigenvalues()[i]`, in the Fock basis.
    pub fn eigenvector(&self, i: usize) -> &[T] {
        let d = self.dim();
        &self.eigenvectors[i * d..(i + 1) * d]
    }

    /// Swap parity of each eigenvector, when the Hamiltonian has one.
    pub fn parities(&self) -> Option<&[Parity]> {
        self.parities.as_deref()
    }

    /// Largest eigenvalue magnitude.
    pub fn scale(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, e| m.max(e.abs()))
    }

    fn check_dim(&self, state: &QuantumState<T>) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: state.dim() });
        }
        Ok(())
    }

    /// `Σ_i e^{-i E_i t} ⟨E_i|ψ₀⟩ |E_i⟩`.
    pub fn evolve(&self, psi0: &QuantumState<T>, t: T) -> Result<QuantumState<T>> {
        self.check_dim(psi0)?;
        Ok(QuantumState::from_raw(self.propagate(psi0.amplitudes(), t, T::zero())))
    }

    /// Evolution with a global phase removed; every probability, overlap
    /// modulus and correlator is unchanged.
    pub(crate) fn evolve_projective(&self, psi0: &QuantumState<T>, t: T) -> Result<QuantumState<T>> {
        self.check_dim(psi0)?;
        Ok(QuantumState::from_raw(self.propagate(psi0.amplitudes(), t, self.reference)))
    }

    fn propagate(&self, psi: &[Complex<T>], t: T, reference: T) -> Vec<Complex<T>> {
        if t == T::zero() {
            return psi.to_vec();
        }
        let n = self.n;
        let signed: Vec<Complex<T>> = psi.iter().zip(&self.signs).map(|(&c, &s)| c * s).collect();
        let mut out = match &self.layout {
            Layout::Full(block) => block.propagate(&signed, t, self.sigma, reference),
            Layout::Parity { even, odd } => {
                let p = pair_count(n);
                let r = T::FRAC_1_SQRT_2();
                let mut xe = Vec::with_capacity(even.size());
                let mut xo = Vec::with_capacity(odd.size());
                for k in 0..p {
                    xe.push((signed[k] + signed[n - k]) * r);
                    xo.push((signed[k] - signed[n - k]) * r);
                }
                if has_center(n) {
                    xe.push(signed[n / 2]);
                }
                let ye = even.propagate(&xe, t, self.sigma, reference);
                let yo = odd.propagate(&xo, t, self.sigma, reference);
                let mut out = vec![Complex::new(T::zero(), T::zero()); n + 1];
                for k in 0..p {
                    out[k] = (ye[k] + yo[k]) * r;
                    out[n - k] = (ye[k] - yo[k]) * r;
                }
                if has_center(n) {
                    out[n / 2] = ye[p];
                }
                out
            }
        };
        for (c, &s) in out.iter_mut().zip(&self.signs) {
            *c = *c * s;
        }
        out
    }

    /// `|⟨m| e^{-iHt} |col⟩|²` for every `m`, one vector per requested
    /// column. Column `col` is the outcome distribution at time `t` after
    /// preparing (or collapsing onto) the Fock state `col`.
    pub fn transition_probabilities(&self, t: T, cols: &[usize]) -> Result<Vec<Vec<T>>> {
        if let Some(&bad) = cols.iter().find(|&&c| c > self.n) {
            return Err(Error::OutOfRange { index: bad, max: self.n });
        }
        if cols.is_empty() {
            return Ok(Vec::new());
        }
        if t == T::zero() {
            return Ok(cols.iter().map(|&c| (0..self.dim()).map(|r| if r == c { T::one() } else { T::zero() }).collect()).collect());
        }
        // `D` and `σ` only change signs and complex conjugation, so the
        // squared moduli come straight from the canonical blocks.
        Ok(match &self.layout {
            Layout::Full(block) => {
                let k = cols.len();
                let (re, im) = block.propagator_columns(cols, t, self.reference);
                (0..k)
                    .map(|j| {
                        (0..self.dim())
                            .map(|r| {
                                let (a, b) = (re[r * k + j], im[r * k + j]);
                                a * a + b * b
                            })
                            .collect()
                    })
                    .collect()
            }
            Layout::Parity { even, odd } => self.parity_transitions(even, odd, t, cols),
        })
    }

    fn parity_transitions(&self, even: &Block<T>, odd: &Block<T>, t: T, cols: &[usize]) -> Vec<Vec<T>> {
        let n = self.n;
        let p = pair_count(n);
        let center = has_center(n).then_some(n / 2);

        // Block coordinates needed: pair index min(c, N-c), or the center.
        let mut wanted: Vec<usize> = cols.iter().map(|&c| c.min(n - c)).collect();
        wanted.sort_unstable();
        wanted.dedup();
        let pairs: Vec<usize> = wanted.iter().copied().filter(|&k| Some(k) != center).collect();
        // In the even block the center sits at coordinate `p`.
        let even_cols: Vec<usize> =
            wanted.iter().map(|&k| if Some(k) == center { p } else { k }).collect();

        let (ere, eim) = even.propagator_columns(&even_cols, t, self.reference);
        let (ore, oim) = odd.propagator_columns(&pairs, t, self.reference);
        let ek = even_cols.len();
        let ok = pairs.len();
        let half = T::lit(0.5);
        let r = T::FRAC_1_SQRT_2();

        cols.iter()
            .map(|&c| {
                let k = c.min(n - c);
                let je = wanted.binary_search(&k).expect("requested coordinate");
                let mut out = vec![T::zero(); n + 1];
                if Some(k) == center {
                    for row in 0..p {
                        let a = Complex::new(ere[row * ek + je], eim[row * ek + je]) * r;
                        out[row] = a.norm_sqr();
                        out[n - row] = a.norm_sqr();
                    }
                    out[p] = Complex::new(ere[p * ek + je], eim[p * ek + je]).norm_sqr();
                    return out;
                }
                let jo = pairs.binary_search(&k).expect("requested pair");
                let mirrored = c != k;
                for row in 0..p {
                    let ye = Complex::new(ere[row * ek + je], eim[row * ek + je]);
                    let yo = Complex::new(ore[row * ok + jo], oim[row * ok + jo]);
                    let plus = ((ye + yo) * half).norm_sqr();
                    let minus = ((ye - yo) * half).norm_sqr();
                    let (near, far) = if mirrored { (minus, plus) } else { (plus, minus) };
                    out[row] = near;
                    out[n - row] = far;
                }
                if let Some(cidx) = center {
                    let ye = Complex::new(ere[p * ek + je], eim[p * ek + je]) * r;
                    out[cidx] = ye.norm_sqr();
                }
                out
            })
            .collect()
    }
}
