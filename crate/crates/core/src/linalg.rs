//! Dense complex linear algebra for the small square matrices this crate
//! works with (d up to a few dozen).
//!
//! Matrices are row-major and always hold finite entries. Hessenberg, LU and
//! QR factorisations are delegated to `nalgebra`; the SVD, the eigenvalue
//! iteration and everything else is written out here.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, UmebError};

pub type Complex = Complex64;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Relative residual below which a vector counts as linearly dependent on
/// the ones already accepted.
const RANK_TOL: f64 = 1e-8;

/// `e^{2πik/n}`.
///
/// This is the only place phases of roots of unity are produced, so every
/// construction sees bit-identical values. Quarter turns are returned
/// exactly (`1, i, -1, -i`).
pub fn root_of_unity(k: i64, n: u64) -> Complex {
    assert!(n > 0, "root_of_unity: n must be positive");
    let n_i = n as i64;
    let k = k.rem_euclid(n_i);
    if (4 * k) % n_i == 0 {
        return match (4 * k) / n_i {
            0 => ONE,
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        };
    }
    let angle = std::f64::consts::TAU * (k as f64) / (n as f64);
    Complex::new(angle.cos(), angle.sin())
}

/// Numerical thresholds used by the verification and spectral layers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub unitarity_tol: f64,
    pub gram_tol: f64,
    pub phase_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity_tol: 1e-10,
            gram_tol: 1e-10,
            phase_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(unitarity_tol: f64, gram_tol: f64, phase_tol: f64) -> Result<Self> {
        for (name, v) in [
            ("unitarity_tol", unitarity_tol),
            ("gram_tol", gram_tol),
            ("phase_tol", phase_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(UmebError::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            unitarity_tol,
            gram_tol,
            phase_tol,
        })
    }
}

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(UmebError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(UmebError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[Complex]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex::new(s, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// The `size`×`size` block at block coordinates (`bi`, `bj`).
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Self {
        Self::from_fn(size, size, |r, c| self[(bi * size + r, bj * size + c)])
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        &mut self.entries[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

fn ensure_same_square(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(UmebError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if !b.is_square() {
        return Err(UmebError::NotSquare {
            rows: b.rows,
            cols: b.cols,
        });
    }
    if a.rows != b.rows {
        return Err(UmebError::DimensionMismatch {
            expected: a.rows,
            found: b.rows,
        });
    }
    Ok(())
}

fn vec_inner(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex> {
    ensure_same_square(a, b)?;
    Ok(vec_inner(&a.entries, &b.entries))
}

/// Matrix of pairwise Hilbert–Schmidt inner products.
pub fn gram_matrix(set: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if let Some(first) = set.first() {
        for m in set {
            ensure_same_square(first, m)?;
        }
    }
    let n = set.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = vec_inner(&set[a].entries, &set[b].entries);
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    Ok(g)
}

/// Largest entry magnitude of `a† a − I`.
pub fn unitarity_residual(a: &ComplexMatrix) -> f64 {
    let ata = &a.adjoint() * a;
    ata.sub(&ComplexMatrix::identity(a.cols)).max_abs()
}

/// Thin SVD `a = U diag(s) V†` with `s` descending; `u` is rows×k and `v`
/// cols×k for k = min(rows, cols).
struct Svd {
    u: Vec<Vec<Complex>>,
    s: Vec<f64>,
    v: Vec<Vec<Complex>>,
}

/// One-sided (Hestenes) Jacobi SVD, working on columns.
///
/// nalgebra's complex SVD returns unitary factors that do not recompose
/// the input for some well-conditioned 3×3 matrices, so it is not used.
fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.rows < a.cols {
        let t = svd(&a.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (m, n) = (a.rows, a.cols);
    let mut cols: Vec<Vec<Complex>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<Complex>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();
    let dot = |x: &[Complex], y: &[Complex]| x.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<Complex>();
    let norm_sq = |x: &[Complex]| x.iter().map(|z| z.norm_sqr()).sum::<f64>();

    // Rounding keeps |γ| from reaching one ulp of √(αβ) for clustered
    // columns, hence the dimension factor.
    let threshold = f64::EPSILON * m as f64;
    let mut converged = false;
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sq(&cols[p]);
                let beta = norm_sq(&cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= threshold * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of γ, then a real rotation.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut cols, &mut v] {
                    let (lo, hi) = mat.split_at_mut(q);
                    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let yq = *y * phase;
                        let xp = *x;
                        *x = xp * c - yq * sn;
                        *y = xp * sn + yq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(UmebError::Numerical("Jacobi SVD did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| norm_sq(c).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v: Vec<Vec<Complex>> = order.iter().map(|&j| v[j].clone()).collect();

    // Left vectors; columns with negligible σ are completed to an
    // orthonormal set.
    let cutoff = s.first().copied().unwrap_or(0.0) * f64::EPSILON * m as f64;
    let mut u: Vec<Vec<Complex>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        if s[k] > cutoff && s[k] > 0.0 {
            u.push(cols[j].iter().map(|z| z / s[k]).collect());
        } else {
            u.push(vec![ZERO; m]);
            missing.push(k);
        }
    }
    for k in missing {
        // The standard basis vector with the largest residual; at least
        // one has residual norm √(1/m) or more.
        let mut best: Option<(f64, Vec<Complex>)> = None;
        for e in 0..m {
            let mut x: Vec<Complex> = (0..m).map(|i| if i == e { ONE } else { ZERO }).collect();
            for _ in 0..2 {
                for ul in u.iter().filter(|ul| ul.iter().any(|z| *z != ZERO)) {
                    let c = dot(ul, &x);
                    x.iter_mut().zip(ul).for_each(|(xi, ui)| *xi -= c * ui);
                }
            }
            let nx = norm_sq(&x).sqrt();
            if best.as_ref().is_none_or(|(b, _)| nx > *b) {
                best = Some((nx, x));
            }
        }
        let (nx, x) = best.expect("m >= 1");
        if nx.is_nan() || nx <= 0.1 / (m as f64).sqrt() {
            return Err(UmebError::Numerical("could not complete left singular vectors".into()));
        }
        u[k] = x.iter().map(|z| z / nx).collect();
    }
    Ok(Svd { u, s, v })
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

/// Minimum-norm least-squares solution of `a x = b`, dropping singular
/// values below `1e-12 σ_max`.
pub fn least_squares(a: &ComplexMatrix, b: &[Complex]) -> Result<Vec<Complex>> {
    if b.len() != a.rows {
        return Err(UmebError::DimensionMismatch {
            expected: a.rows,
            found: b.len(),
        });
    }
    let Svd { u, s, v } = svd(a)?;
    let cutoff = s.first().copied().unwrap_or(0.0) * 1e-12;
    let mut x = vec![ZERO; a.cols];
    for k in 0..s.len() {
        if s[k] <= cutoff || s[k] == 0.0 {
            continue;
        }
        let coeff = u[k].iter().zip(b).map(|(p, q)| p.conj() * q).sum::<Complex>() / s[k];
        x.iter_mut().zip(&v[k]).for_each(|(xi, vi)| *xi += coeff * vi);
    }
    Ok(x)
}

/// Unitary polar factor `U V†` of a square `a = U Σ V†`, together with the
/// nuclear norm `Σσ_i`.
pub fn polar_factor(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    if !a.is_square() {
        return Err(UmebError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let Svd { u, s, v } = svd(a)?;
    let n = a.rows;
    let w = ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| u[k][i] * v[k][j].conj()).sum());
    Ok((w, s.iter().sum()))
}

/// Eigenvalues by the shifted QR algorithm on the Hessenberg form.
///
/// Wilkinson shifts with an exceptional shift every tenth stalled sweep;
/// the exceptional shift is what lets exact permutation matrices (cyclic
/// shifts, Weyl operators) converge.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex>> {
    if !a.is_square() {
        return Err(UmebError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = ComplexMatrix::from_nalgebra(&a.to_nalgebra().hessenberg().h());
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let mut out = vec![ZERO; n];
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut total = 0usize;
    loop {
        // Start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let diag = if diag == 0.0 { scale } else { diag };
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h[(hi, hi)];
            stalled = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        total += 1;
        stalled += 1;
        if total > 100 * n {
            return Err(UmebError::Numerical("QR eigenvalue iteration did not converge".into()));
        }
        let shift = if stalled.is_multiple_of(10) {
            h[(hi, hi)] + Complex::from_polar(0.75 * h[(hi, hi - 1)].norm() + 1e-3 * scale, 0.3 * stalled as f64)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(out)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex, b: Complex, c: Complex, d: Complex) -> Complex {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step `H − μI = QR`, `H ← RQ + μI` restricted to
/// rows and columns `lo..=hi`, using Givens rotations.
fn qr_sweep(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (a, b) = (h[(k, k)], h[(k + 1, k)]);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if norm == 0.0 {
            (1.0, ZERO)
        } else if a.norm() == 0.0 {
            (0.0, ONE)
        } else {
            (a.norm() / norm, (a / a.norm()) * b.conj() / norm)
        };
        for j in k..=hi {
            let (x, y) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, (c, s)) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        for r in lo..=(k + 1).min(hi) {
            let (x, y) = (h[(r, k)], h[(r, k + 1)]);
            h[(r, k)] = x * c + y * s.conj();
            h[(r, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

pub fn determinant(a: &ComplexMatrix) -> Result<Complex> {
    if !a.is_square() {
        return Err(UmebError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    Ok(a.to_nalgebra().determinant())
}

/// Two-pass Gram–Schmidt of `v` against an orthonormal list; returns the
/// residual norm before normalisation.
fn orthogonalize_against(v: &mut [Complex], basis: &[Vec<Complex>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = vec_inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize_in_place(v: &mut [Complex], norm: f64) {
    let s = 1.0 / norm;
    for x in v.iter_mut() {
        *x *= s;
    }
}

fn ensure_common_square(set: &[ComplexMatrix]) -> Result<usize> {
    let first = set
        .first()
        .ok_or_else(|| UmebError::InvalidArgument("empty matrix set".into()))?;
    for m in set {
        ensure_same_square(first, m)?;
    }
    Ok(first.rows)
}

/// Orthonormal vectors (flattened matrices) spanning `set`, or
/// `RankDeficient`.
fn orthonormal_vectors(set: &[ComplexMatrix]) -> Result<Vec<Vec<Complex>>> {
    let mut basis: Vec<Vec<Complex>> = Vec::with_capacity(set.len());
    for m in set {
        let original = m.frobenius_norm_sq().sqrt();
        let mut v = m.entries.clone();
        let norm = orthogonalize_against(&mut v, &basis);
        if original == 0.0 || norm <= RANK_TOL * original {
            return Err(UmebError::RankDeficient {
                rank: span_rank(set),
                len: set.len(),
            });
        }
        normalize_in_place(&mut v, norm);
        basis.push(v);
    }
    Ok(basis)
}

/// Hilbert–Schmidt orthonormal basis of `span(set)`.
pub fn orthonormalize(set: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let dim = ensure_common_square(set)?;
    Ok(orthonormal_vectors(set)?
        .into_iter()
        .map(|entries| ComplexMatrix {
            rows: dim,
            cols: dim,
            entries,
        })
        .collect())
}

/// Dimension of `span(set)` under the same dependence threshold the
/// orthonormalisation uses.
pub fn span_rank(set: &[ComplexMatrix]) -> usize {
    let mut basis: Vec<Vec<Complex>> = Vec::new();
    for m in set {
        let original = m.frobenius_norm_sq().sqrt();
        let mut v = m.entries.clone();
        let norm = orthogonalize_against(&mut v, &basis);
        if original > 0.0 && norm > RANK_TOL * original {
            normalize_in_place(&mut v, norm);
            basis.push(v);
        }
    }
    basis.len()
}

/// Orthonormal basis of the Hilbert–Schmidt orthogonal complement of
/// `span(set)` inside all d×d matrices.
///
/// Each matrix unit `E_ij` is projected onto the complement and the
/// projections are orthonormalised with pivoting (largest residual first)
/// and re-orthogonalisation against everything accepted so far.
pub fn orthonormal_complement(set: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let dim = ensure_common_square(set)?;
    let n = dim * dim;
    let mut basis = orthonormal_vectors(set)?;
    let target = n - basis.len();

    // Column p of I − B B† is the projection of the p-th matrix unit.
    let mut residuals: Vec<Vec<Complex>> = (0..n)
        .map(|p| {
            let mut r = vec![ZERO; n];
            r[p] = ONE;
            for b in &basis {
                let c = b[p].conj();
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
            r
        })
        .collect();

    let mut complement = Vec::with_capacity(target);
    for _ in 0..target {
        let (pivot, _) = residuals
            .iter()
            .enumerate()
            .map(|(p, r)| (p, r.iter().map(|z| z.norm_sqr()).sum::<f64>()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let mut v = residuals.swap_remove(pivot);
        let norm = orthogonalize_against(&mut v, &basis);
        if norm < 1e-6 {
            return Err(UmebError::Numerical(format!(
                "complement construction stalled (residual {norm:.3e})"
            )));
        }
        normalize_in_place(&mut v, norm);
        for r in residuals.iter_mut() {
            let c = vec_inner(&v, r);
            for (x, y) in r.iter_mut().zip(&v) {
                *x -= c * y;
            }
        }
        basis.push(v.clone());
        complement.push(ComplexMatrix {
            rows: dim,
            cols: dim,
            entries: v,
        });
    }
    Ok(complement)
}

/// Deterministic complex Gaussian matrix.
///
/// A `ChaCha8Rng` seeded with `seed` draws, in row-major order, the real
/// then imaginary part of each entry from `N(0, 1/2)`, so `E|z|² = 1` and
/// `‖M‖_F ≈ dim`.
pub fn seeded_random_matrix(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex::new(re * s, im * s)
    })
}

/// Haar-distributed unitary from the QR decomposition of
/// [`seeded_random_matrix`], with the phases of `R`'s diagonal removed.
pub fn seeded_random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let qr = seeded_random_matrix(dim, seed).to_nalgebra().qr();
    let (q, r) = qr.unpack();
    let mut q = ComplexMatrix::from_nalgebra(&q);
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn quarter_roots_are_exact() {
        assert_eq!(root_of_unity(1, 4), c(0.0, 1.0));
        assert_eq!(root_of_unity(2, 4), c(-1.0, 0.0));
        assert_eq!(root_of_unity(-1, 4), c(0.0, -1.0));
        assert_eq!(root_of_unity(3, 6), c(-1.0, 0.0));
        assert_eq!(root_of_unity(7, 7), ONE);
        let w = root_of_unity(1, 3);
        assert!((w - c(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn kron_identities() {
        assert_eq!(
            kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)),
            ComplexMatrix::identity(6)
        );
        let z = ComplexMatrix::diag(&[ONE, -ONE]);
        let expected = ComplexMatrix::diag(&[ONE, ONE, -ONE, -ONE]);
        assert_eq!(kron(&z, &ComplexMatrix::identity(2)), expected);
    }

    #[test]
    fn hs_inner_of_identity_is_dim() {
        for d in 1..6 {
            let i = ComplexMatrix::identity(d);
            assert_eq!(hs_inner(&i, &i).unwrap(), c(d as f64, 0.0));
        }
    }

    #[test]
    fn hs_inner_rejects_mismatch() {
        let err = hs_inner(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)).unwrap_err();
        assert!(matches!(err, UmebError::DimensionMismatch { .. }));
        let err = hs_inner(&ComplexMatrix::zeros(2, 3), &ComplexMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, UmebError::NotSquare { .. }));
    }

    #[test]
    fn gram_of_single_identity() {
        let g = gram_matrix(&[ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(g, ComplexMatrix::diag(&[c(2.0, 0.0)]));
    }

    #[test]
    fn unitarity_residual_examples() {
        assert_eq!(unitarity_residual(&ComplexMatrix::identity(4)), 0.0);
        let m = ComplexMatrix::diag(&[ONE, c(2.0, 0.0)]);
        assert_eq!(unitarity_residual(&m), 3.0);
    }

    #[test]
    fn singular_values_examples() {
        let s = singular_values(&ComplexMatrix::identity(3)).unwrap();
        for v in s {
            assert!((v - 1.0).abs() < 1e-14);
        }
        // diag(3, 4) conjugated by a unitary keeps singular values (4, 3).
        let u = seeded_random_unitary(2, 11);
        let m = &(&u * &ComplexMatrix::diag(&[c(3.0, 0.0), c(4.0, 0.0)])) * &u.adjoint();
        let s = singular_values(&m).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-12 && (s[1] - 3.0).abs() < 1e-12);
        let delta_minus = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert_eq!(&delta_minus.adjoint() * &delta_minus, ComplexMatrix::identity(2));
        let s = singular_values(&delta_minus).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    fn recompose(t: &Svd, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            (0..t.s.len()).map(|k| t.u[k][i] * t.s[k] * t.v[k][j].conj()).sum()
        })
    }

    fn gram_err(vs: &[Vec<Complex>]) -> f64 {
        let mut e = 0.0f64;
        for (a, x) in vs.iter().enumerate() {
            for (b, y) in vs.iter().enumerate() {
                let ip: Complex = x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
                e = e.max((ip - if a == b { ONE } else { ZERO }).norm());
            }
        }
        e
    }

    #[test]
    fn svd_recomposes_random_matrices() {
        for seed in 0..200u64 {
            let n = 1 + (seed % 12) as usize;
            let a = seeded_random_matrix(n, seed);
            let t = svd(&a).unwrap();
            assert!(recompose(&t, n, n).max_abs_diff(&a) < 1e-12, "seed {seed}");
            assert!(gram_err(&t.u) < 1e-12 && gram_err(&t.v) < 1e-12);
            assert!(t.s.windows(2).all(|w| w[0] >= w[1]));
        }
        let wide = ComplexMatrix::from_fn(2, 4, |i, j| c(i as f64 + 1.0, j as f64 - 1.5));
        let t = svd(&wide).unwrap();
        assert_eq!(t.s.len(), 2);
        assert!(recompose(&t, 2, 4).max_abs_diff(&wide) < 1e-12);
    }

    // A near-unitary iterate on which a library SVD returned factors that
    // did not recompose it.
    #[test]
    fn svd_regression_matrix() {
        let e = [
            (-0.6011250536893549, -0.6251787143332026),
            (0.26440312037471586, -0.04450802324236598),
            (0.10491887061245686, -0.40784505400715343),
            (-0.26440312037471586, 0.04450802324236598),
            (-0.20594556567450123, -0.3816233257232795),
            (0.8230316748116436, 0.09617264306732583),
            (-0.10491887061245689, 0.4078450540071533),
            (0.4557960117179866, 0.6919891507607632),
            (0.4334682775903139, 0.012457571190765022),
        ];
        let a = ComplexMatrix::from_row_major(3, 3, e.iter().map(|&(r, i)| c(r, i)).collect()).unwrap();
        let t = svd(&a).unwrap();
        assert!(recompose(&t, 3, 3).max_abs_diff(&a) < 1e-14);
        let (_, nuclear) = polar_factor(&a).unwrap();
        assert!(nuclear <= 3.0);
        let sq: f64 = t.s.iter().map(|x| x * x).sum();
        assert!((sq - a.frobenius_norm_sq()).abs() < 1e-13);
    }

    #[test]
    fn least_squares_examples() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0], &[0.0, 0.0]]);
        let x = least_squares(&a, &[c(1.0, 1.0), c(4.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert!((x[0] - c(1.0, 1.0)).norm() < 1e-14 && (x[1] - c(2.0, 0.0)).norm() < 1e-14);
        // Underdetermined: the minimum-norm solution of x0 + x1 = 2 is (1, 1).
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0]]);
        let x = least_squares(&a, &[c(2.0, 0.0)]).unwrap();
        assert!((x[0] - ONE).norm() < 1e-14 && (x[1] - ONE).norm() < 1e-14);
        assert!(least_squares(&a, &[ONE, ONE]).is_err());
    }

    #[test]
    fn polar_factor_of_rank_deficient_matrices_is_unitary() {
        let anti = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let zero = ComplexMatrix::zeros(4, 4);
        let rank_one = kron(
            &ComplexMatrix::from_real_rows(&[&[1.0], &[2.0], &[0.0]]),
            &ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 1.0]]),
        );
        for m in [anti, zero, rank_one] {
            let (w, nuclear) = polar_factor(&m).unwrap();
            assert!(unitarity_residual(&w) < 1e-12);
            let s = singular_values(&m).unwrap();
            assert!((nuclear - s.iter().sum::<f64>()).abs() < 1e-14);
            // W maximises Re Tr(W† M), which equals the nuclear norm.
            assert!((hs_inner(&w, &m).unwrap() - c(nuclear, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_diag() {
        let mut ev = eigenvalues(&ComplexMatrix::diag(&[ONE, c(0.0, 1.0)])).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - ONE).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_match_trace_determinant_and_singularity() {
        for (dim, seed) in [(1, 0), (2, 1), (3, 2), (5, 3), (8, 4), (12, 5)] {
            let a = seeded_random_matrix(dim, seed);
            let ev = eigenvalues(&a).unwrap();
            let sum: Complex = ev.iter().sum();
            let prod: Complex = ev.iter().product();
            assert!((sum - a.trace()).norm() < 1e-10);
            assert!((prod - determinant(&a).unwrap()).norm() < 1e-9 * (1.0 + prod.norm()));
            for l in &ev {
                let shifted = a.sub(&ComplexMatrix::identity(dim).scale(*l));
                let smin = *singular_values(&shifted).unwrap().last().unwrap();
                assert!(smin < 1e-10, "eigenvalue {l} leaves smallest singular value {smin}");
            }
        }
    }

    #[test]
    fn eigenvalues_of_cyclic_permutations() {
        for q in 2..9 {
            let mut s = ComplexMatrix::zeros(q, q);
            for i in 0..q {
                s[(i, (i + 1) % q)] = ONE;
            }
            let ev = eigenvalues(&s).unwrap();
            for k in 0..q as i64 {
                let z = root_of_unity(k, q as u64);
                assert!(ev.iter().any(|e| (e - z).norm() < 1e-12), "q={q} missing {z}: {ev:?}");
            }
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let i = ComplexMatrix::identity(2);
        let err = orthonormal_complement(&[i.clone(), i.scale_real(2.0)]).unwrap_err();
        assert!(matches!(err, UmebError::RankDeficient { rank: 1, len: 2 }));
    }

    #[test]
    fn complement_of_identity() {
        let comp = orthonormal_complement(&[ComplexMatrix::identity(3)]).unwrap();
        assert_eq!(comp.len(), 8);
        for m in &comp {
            assert!(m.trace().norm() < 1e-12);
            assert!((m.frobenius_norm_sq() - 1.0).abs() < 1e-12);
        }
        let g = gram_matrix(&comp).unwrap();
        assert!(g.sub(&ComplexMatrix::identity(8)).max_abs() < 1e-12);
    }

    #[test]
    fn random_matrix_is_seeded() {
        assert_eq!(seeded_random_matrix(4, 3), seeded_random_matrix(4, 3));
        assert_ne!(seeded_random_matrix(4, 3), seeded_random_matrix(4, 4));
    }

    #[test]
    fn frobenius_norm_concentrates_near_dim() {
        let dim = 30;
        let mean: f64 = (0..100)
            .map(|s| seeded_random_matrix(dim, s).frobenius_norm_sq().sqrt())
            .sum::<f64>()
            / 100.0;
        // ‖M‖_F² is Gamma(dim², 1): relative spread 1/dim, so the mean over
        // 100 seeds sits within a fraction of a percent of dim.
        assert!((mean - dim as f64).abs() < 0.3, "mean Frobenius norm {mean}");
    }

    #[test]
    fn random_unitary_is_unitary() {
        for seed in 0..5 {
            assert!(unitarity_residual(&seeded_random_unitary(5, seed)) < 1e-13);
        }
    }

    #[test]
    fn from_row_major_rejects_nan() {
        let err = ComplexMatrix::from_row_major(1, 2, vec![ONE, c(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, UmebError::NonFinite { row: 0, col: 1 }));
    }
}
