//! Dense complex linear algebra sized for small Hilbert spaces (dimension
//! products up to 16, typically 9): Hermitian eigendecomposition, SVD, tensor
//! products, partial transpose, realignment, and Hilbert-Schmidt geometry.
//!
//! Everything is a value type in row-major `Vec<Complex64>` storage; there is
//! no sparse format and no external BLAS/LAPACK dependency. The eigensolver is
//! a cyclic Jacobi iteration for complex Hermitian matrices and the SVD is a
//! one-sided (Hestenes) Jacobi, both of which are unconditionally convergent
//! and fully accurate at these sizes, including for the rank-deficient
//! realigned matrices whose trailing singular values underflow toward 1e-15.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GewError, Result};

pub type C64 = Complex64;

/// Hermiticity tolerance used by operations that require Hermitian input.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalue floor for "positive semidefinite" state checks.
pub const POSITIVITY_TOL: f64 = -1e-10;
/// Trace-one tolerance for state validation.
pub const TRACE_TOL: f64 = 1e-12;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for CMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.at(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Builds from a row-major slice of (re, im) pairs.
    pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(GewError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(CMat { rows, cols, data: entries.to_vec() })
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = CMat::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, C64::new(x, 0.0));
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

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn scale(&self, k: C64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + aik * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply: length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    /// Frobenius (Hilbert-Schmidt) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// max_ij |A_ij - conj(A_ji)|.
    pub fn hermiticity_error(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_error() <= tol
    }

    /// (A + A†)/2; used to scrub round-off before eigensolves.
    pub fn hermitized(&self) -> CMat {
        assert!(self.is_square());
        CMat::from_fn(self.rows, self.cols, |i, j| {
            (self.at(i, j) + self.at(j, i).conj()) * 0.5
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("matrix serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<CMat> {
        let mj: MatrixJson =
            serde_json::from_str(s).map_err(|e| GewError::Parse(format!("matrix JSON: {e}")))?;
        mj.into_cmat()
    }
}

/// On-disk matrix format: `{"rows":n,"cols":m,"re":[...],"im":[...]}` row-major.
#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl MatrixJson {
    pub fn into_cmat(self) -> Result<CMat> {
        if self.re.len() != self.rows * self.cols || self.im.len() != self.re.len() {
            return Err(GewError::Parse(format!(
                "matrix JSON: {}x{} with {} re / {} im entries",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        let data: Vec<C64> =
            self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect();
        let m = CMat { rows: self.rows, cols: self.cols, data };
        if !m.all_finite() {
            return Err(GewError::Parse("matrix JSON: non-finite entry".into()));
        }
        Ok(m)
    }
}

/// Kronecker (tensor) product; (A⊗B)[(i·rB+k),(j·cB+l)] = A[i,j]·B[k,l].
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.at(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.set(i * b.rows + k, j * b.cols + l, aij * b.at(k, l));
                }
            }
        }
    }
    out
}

/// Tensor product of vectors, matching `kron` index order.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Hilbert-Schmidt inner product Tr A†B.
pub fn hs_inner(a: &CMat, b: &CMat) -> Result<C64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(GewError::DimensionMismatch(format!(
            "hs_inner: {}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Hilbert-Schmidt distance ||A - B||.
pub fn hs_distance(a: &CMat, b: &CMat) -> Result<f64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(GewError::DimensionMismatch(format!(
            "hs_distance: {}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.sub(b).hs_norm())
}

/// Full spectrum of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector of eigenvalues[k].
    pub eigenvectors: CMat,
}

impl EigResult {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi sweeps.
///
/// Runs until the off-diagonal Frobenius norm falls below 1e-13 times the
/// matrix norm. Errors if the input is not Hermitian within [`HERMITICITY_TOL`]
/// (relative to the largest entry).
pub fn herm_eig(a: &CMat) -> Result<EigResult> {
    if !a.is_square() {
        return Err(GewError::DimensionMismatch(format!(
            "herm_eig: {}x{} is not square",
            a.rows, a.cols
        )));
    }
    let scale = a.max_abs().max(1.0);
    if a.hermiticity_error() > HERMITICITY_TOL * scale {
        return Err(GewError::NotHermitian(format!(
            "herm_eig: asymmetry {:.3e} exceeds {:.3e}",
            a.hermiticity_error(),
            HERMITICITY_TOL * scale
        )));
    }
    let n = a.rows;
    let mut h = a.hermitized();
    let mut v = CMat::identity(n);
    if n <= 1 {
        let eigenvalues = if n == 1 { vec![h.at(0, 0).re] } else { vec![] };
        return Ok(EigResult { eigenvalues, eigenvectors: v });
    }

    let norm = h.hs_norm().max(f64::MIN_POSITIVE);
    let target = 1e-13 * norm;
    for _sweep in 0..60 {
        if off_diag_norm(&h) <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut h, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h.at(i, i).re.partial_cmp(&h.at(j, j).re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| h.at(i, i).re).collect();
    let eigenvectors = CMat::from_fn(n, n, |i, j| v.at(i, order[j]));
    Ok(EigResult { eigenvalues, eigenvectors })
}

fn off_diag_norm(a: &CMat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.at(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating H[p,q], accumulated into V.
fn jacobi_rotate(h: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = h.at(p, q);
    let abs_apq = apq.norm();
    if abs_apq == 0.0 {
        return;
    }
    let phase = apq / abs_apq;
    let tau = (h.at(q, q).re - h.at(p, p).re) / (2.0 * abs_apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Unitary R = I except R[p,p]=c, R[p,q]=s·phase, R[q,p]=-s·conj(phase), R[q,q]=c.
    let n = h.rows();
    // H <- H R
    for k in 0..n {
        let hp = h.at(k, p);
        let hq = h.at(k, q);
        h.set(k, p, hp * c - hq * s * phase.conj());
        h.set(k, q, hp * s * phase + hq * c);
    }
    // H <- R† H
    for k in 0..n {
        let hp = h.at(p, k);
        let hq = h.at(q, k);
        h.set(p, k, hp * c - hq * s * phase);
        h.set(q, k, hp * s * phase.conj() + hq * c);
    }
    // scrub round-off in the zeroed pair and keep the diagonal real
    h.set(p, q, C64::new(0.0, 0.0));
    h.set(q, p, C64::new(0.0, 0.0));
    let dp = h.at(p, p).re;
    let dq = h.at(q, q).re;
    h.set(p, p, C64::new(dp, 0.0));
    h.set(q, q, C64::new(dq, 0.0));
    // V <- V R
    for k in 0..n {
        let vp = v.at(k, p);
        let vq = v.at(k, q);
        v.set(k, p, vp * c - vq * s * phase.conj());
        v.set(k, q, vp * s * phase + vq * c);
    }
}

#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Descending, length min(rows, cols).
    pub singular_values: Vec<f64>,
    /// rows x rows unitary.
    pub u: CMat,
    /// cols x cols unitary; A = U diag(s) V†.
    pub v: CMat,
}

impl SvdResult {
    pub fn sum(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi.
///
/// Column pairs are rotated until mutually orthogonal; singular values are the
/// resulting column norms, which keeps tiny singular values fully accurate.
/// Zero columns of U are completed to a unitary by Gram-Schmidt over the
/// canonical basis.
pub fn svd(a: &CMat) -> SvdResult {
    let m = a.rows;
    let n = a.cols;
    let mut b = a.clone();
    let mut v = CMat::identity(n);

    let eps = 1e-14;
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                // Gram entries of the column pair
                let mut aii = 0.0f64;
                let mut ajj = 0.0f64;
                let mut aij = C64::new(0.0, 0.0);
                for k in 0..m {
                    let bi = b.at(k, i);
                    let bj = b.at(k, j);
                    aii += bi.norm_sqr();
                    ajj += bj.norm_sqr();
                    aij += bi.conj() * bj;
                }
                let gabs = aij.norm();
                if gabs <= eps * (aii * ajj).sqrt() || gabs == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = aij / gabs;
                let tau = (ajj - aii) / (2.0 * gabs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..m {
                    let bi = b.at(k, i);
                    let bj = b.at(k, j);
                    b.set(k, i, bi * c - bj * s * phase.conj());
                    b.set(k, j, bi * s * phase + bj * c);
                }
                for k in 0..n {
                    let vi = v.at(k, i);
                    let vj = v.at(k, j);
                    v.set(k, i, vi * c - vj * s * phase.conj());
                    v.set(k, j, vi * s * phase + vj * c);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Sort all n columns by norm, descending; stable so ties keep sweep order.
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| b.at(k, j).norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let b_sorted = CMat::from_fn(m, n, |i, j| b.at(i, order[j]));
    let v_sorted = CMat::from_fn(n, n, |i, j| v.at(i, order[j]));
    norms = order.iter().map(|&j| norms[j]).collect();

    let rank_dim = m.min(n);
    let singular_values: Vec<f64> = norms.iter().take(rank_dim).copied().collect();

    // U columns: normalized data columns where the singular value is nonzero,
    // Gram-Schmidt completion elsewhere.
    let tiny = norms.first().copied().unwrap_or(0.0) * 1e-290 + f64::MIN_POSITIVE;
    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(m);
    for (j, &nrm) in norms.iter().take(rank_dim).enumerate() {
        if nrm > tiny {
            ucols.push((0..m).map(|k| b_sorted.at(k, j) / nrm).collect());
        }
    }
    complete_orthonormal(&mut ucols, m);
    let u = CMat::from_fn(m, m, |i, j| ucols[j][i]);
    SvdResult { singular_values, u, v: v_sorted }
}

/// Extends a set of orthonormal columns to a full orthonormal basis of C^m
/// using the canonical basis, deterministically.
fn complete_orthonormal(cols: &mut Vec<Vec<C64>>, m: usize) {
    let mut e = 0;
    while cols.len() < m && e < m {
        let mut cand: Vec<C64> = vec![C64::new(0.0, 0.0); m];
        cand[e] = C64::new(1.0, 0.0);
        for c in cols.iter() {
            let overlap: C64 = c.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
            for k in 0..m {
                cand[k] -= overlap * c[k];
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for z in cand.iter_mut() {
                *z /= norm;
            }
            cols.push(cand);
        }
        e += 1;
    }
    assert_eq!(cols.len(), m, "orthonormal completion failed");
}

/// Partial transpose on the second subsystem: out[(i,j),(k,l)] = in[(i,l),(k,j)].
pub fn partial_transpose(m: &CMat, dim_a: usize, dim_b: usize) -> Result<CMat> {
    check_bipartite(m, dim_a, dim_b, "partial_transpose")?;
    let d = dim_a * dim_b;
    let mut out = CMat::zeros(d, d);
    for i in 0..dim_a {
        for j in 0..dim_b {
            for k in 0..dim_a {
                for l in 0..dim_b {
                    out.set(i * dim_b + j, k * dim_b + l, m.at(i * dim_b + l, k * dim_b + j));
                }
            }
        }
    }
    Ok(out)
}

/// Realignment: out[(i,j),(k,l)] = in[(i,k),(j,l)], a dA² x dB² matrix.
pub fn realign(m: &CMat, dim_a: usize, dim_b: usize) -> Result<CMat> {
    check_bipartite(m, dim_a, dim_b, "realign")?;
    let mut out = CMat::zeros(dim_a * dim_a, dim_b * dim_b);
    for i in 0..dim_a {
        for j in 0..dim_a {
            for k in 0..dim_b {
                for l in 0..dim_b {
                    out.set(i * dim_a + j, k * dim_b + l, m.at(i * dim_b + k, j * dim_b + l));
                }
            }
        }
    }
    Ok(out)
}

/// Trace over the second subsystem.
pub fn partial_trace_b(m: &CMat, dim_a: usize, dim_b: usize) -> Result<CMat> {
    check_bipartite(m, dim_a, dim_b, "partial_trace_b")?;
    Ok(CMat::from_fn(dim_a, dim_a, |i, k| {
        (0..dim_b).map(|j| m.at(i * dim_b + j, k * dim_b + j)).sum()
    }))
}

/// Trace over the first subsystem.
pub fn partial_trace_a(m: &CMat, dim_a: usize, dim_b: usize) -> Result<CMat> {
    check_bipartite(m, dim_a, dim_b, "partial_trace_a")?;
    Ok(CMat::from_fn(dim_b, dim_b, |j, l| {
        (0..dim_a).map(|i| m.at(i * dim_b + j, i * dim_b + l)).sum()
    }))
}

pub(crate) fn check_bipartite(m: &CMat, dim_a: usize, dim_b: usize, what: &str) -> Result<()> {
    if !m.is_square() || m.rows() != dim_a * dim_b || dim_a == 0 || dim_b == 0 {
        return Err(GewError::DimensionMismatch(format!(
            "{what}: {}x{} does not factor as {}x{} ⊗ {}x{}",
            m.rows(),
            m.cols(),
            dim_a,
            dim_a,
            dim_b,
            dim_b
        )));
    }
    Ok(())
}

/// A bipartite (or single-system when dim_b = 1) density matrix.
///
/// `new` enforces Hermiticity, unit trace, and positivity; `new_relaxed`
/// enforces only Hermiticity and unit trace, which admits the non-positive
/// points of parametrized state families so that callers can classify them
/// as invalid rather than being unable to construct them.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    mat: CMat,
}

impl DensityMatrix {
    pub fn new(mat: CMat, dim_a: usize, dim_b: usize) -> Result<Self> {
        let dm = Self::new_relaxed(mat, dim_a, dim_b)?;
        let min = dm.min_eigenvalue()?;
        if min < POSITIVITY_TOL {
            return Err(GewError::InvalidState(format!(
                "negative eigenvalue {min:.6e}"
            )));
        }
        Ok(dm)
    }

    pub fn new_relaxed(mat: CMat, dim_a: usize, dim_b: usize) -> Result<Self> {
        check_bipartite(&mat, dim_a, dim_b, "DensityMatrix")?;
        if !mat.all_finite() {
            return Err(GewError::InvalidState("non-finite entry".into()));
        }
        if mat.hermiticity_error() > 1e-12 * mat.max_abs().max(1.0) {
            return Err(GewError::InvalidState(format!(
                "not Hermitian: asymmetry {:.3e}",
                mat.hermiticity_error()
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(GewError::InvalidState(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        Ok(DensityMatrix { dim_a, dim_b, mat })
    }

    /// From a pure state vector; dims must multiply to the vector length.
    pub fn from_pure(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<Self> {
        if psi.len() != dim_a * dim_b {
            return Err(GewError::DimensionMismatch(format!(
                "from_pure: vector length {} vs dims {}x{}",
                psi.len(),
                dim_a,
                dim_b
            )));
        }
        let nrm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if nrm2 <= 0.0 || !nrm2.is_finite() {
            return Err(GewError::InvalidState("from_pure: zero or non-finite vector".into()));
        }
        let mat = CMat::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj() / nrm2);
        Ok(DensityMatrix { dim_a, dim_b, mat })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(herm_eig(&self.mat)?.min_eigenvalue())
    }

    pub fn is_positive(&self) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= POSITIVITY_TOL)
    }

    /// Partial transpose of the second subsystem.
    pub fn partial_transpose(&self) -> CMat {
        partial_transpose(&self.mat, self.dim_a, self.dim_b).expect("dims validated at construction")
    }

    /// Realigned matrix.
    pub fn realign(&self) -> CMat {
        realign(&self.mat, self.dim_a, self.dim_b).expect("dims validated at construction")
    }

    /// Sum of singular values of the realigned matrix.
    pub fn realignment_sum(&self) -> f64 {
        svd(&self.realign()).sum()
    }
}
