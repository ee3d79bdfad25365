//! Dense complex Hermitian kernels used by every solver in the crate.
//!
//! Everything here is desk scale (dimensions up to a few dozen) and backed by
//! `nalgebra`. Eigenvectors come out with a deterministic phase: the
//! largest-magnitude component is real and positive, ties going to the lowest
//! index.

use std::ops::{Add, Mul, Sub};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative eigenvalue cutoff (per unit dimension) used by [`pinv_default`].
pub const DEFAULT_PINV_RTOL: f64 = 1e-10;

/// Relative tolerance under which two eigenvalues count as tied.
const EIG_TIE_RTOL: f64 = 1e-12;

/// A square complex matrix that equals its conjugate transpose.
///
/// Construction symmetrizes the input as `(A + A^H) / 2`, so the stored value
/// is Hermitian to rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self { inner: sym })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: CMatrix::identity(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut inner = CMatrix::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            inner[(k, k)] = C64::new(d, 0.0);
        }
        Self { inner }
    }

    /// `v v^H`.
    pub fn outer(v: &CVector) -> Self {
        let mut out = Self::zeros(v.len());
        out.add_outer(v, 1.0);
        out
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.inner[(k, k)].re).sum()
    }

    /// `x^H A x` (real by construction).
    pub fn quad_form(&self, x: &CVector) -> f64 {
        x.dotc(&(&self.inner * x)).re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            inner: &self.inner * C64::new(s, 0.0),
        }
    }

    /// `A += s · v v^H`.
    pub fn add_outer(&mut self, v: &CVector, s: f64) {
        let n = self.dim();
        for c in 0..n {
            let vc = v[c].conj() * s;
            for r in 0..n {
                self.inner[(r, c)] += v[r] * vc;
            }
        }
    }

    /// `A += s · I`.
    pub fn add_identity(&mut self, s: f64) {
        for k in 0..self.dim() {
            self.inner[(k, k)].re += s;
        }
    }

    pub fn norm_fro(&self) -> f64 {
        self.inner.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        &self.inner * x
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scaled(rhs)
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
pub fn normalize_phase(v: &mut CVector) {
    let max = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

pub fn hermitian_eig(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(
            "eigendecomposition of a matrix with non-finite entries".into(),
        ));
    }
    let n = a.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let eig = a.inner.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        normalize_phase(&mut v);
        vectors.set_column(dst, &v);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Dominant eigenvalue and a unit eigenvector.
///
/// When the top eigenvalue is repeated, the returned vector is the
/// normalized projection of the first standard basis vector that has a
/// non-negligible component in the top eigenspace.
pub fn dominant_eigpair(g: &HermitianMatrix) -> Result<(f64, CVector)> {
    let n = g.dim();
    if n == 0 {
        return Err(Error::Dimension(
            "dominant eigenpair of an empty matrix".into(),
        ));
    }
    let eig = hermitian_eig(g)?;
    let top = eig.values[0];
    let tie = EIG_TIE_RTOL * eig.max_abs().max(f64::MIN_POSITIVE);
    let cluster = eig.values.iter().take_while(|&&v| top - v <= tie).count();
    if cluster == 1 {
        return Ok((top, eig.vector(0)));
    }
    let basis = eig.vectors.columns(0, cluster).into_owned();
    for k in 0..n {
        // Projection of e_k onto the eigenspace: Q (Q^H e_k).
        let coeffs: CVector = basis.row(k).adjoint();
        let mut p = &basis * coeffs;
        let norm = p.norm();
        if norm > 1e-6 {
            p /= C64::new(norm, 0.0);
            normalize_phase(&mut p);
            return Ok((top, p));
        }
    }
    Ok((top, eig.vector(0)))
}

/// Moore-Penrose pseudoinverse. Eigenvalues with magnitude at most
/// `tol · max|eig|` are treated as zero.
pub fn pinv(a: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(pinv_from_eig(&eig, tol))
}

/// [`pinv`] with the standard numerical-rank cutoff `1e-10 · n`.
pub fn pinv_default(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    pinv(a, DEFAULT_PINV_RTOL * a.dim() as f64)
}

pub(crate) fn pinv_from_eig(eig: &EigenDecomposition, tol: f64) -> HermitianMatrix {
    let n = eig.values.len();
    let thr = tol * eig.max_abs();
    let mut out = HermitianMatrix::zeros(n);
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam.abs() > thr && lam != 0.0 {
            out.add_outer(&eig.vector(k), 1.0 / lam);
        }
    }
    out
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.min_value())
}

/// True iff the smallest eigenvalue is at least `-tol`. Non-finite input is
/// never PSD.
pub fn is_psd(a: &HermitianMatrix, tol: f64) -> bool {
    match min_eigenvalue(a) {
        Ok(m) => m >= -tol,
        Err(_) => false,
    }
}

/// Largest eigenvalue magnitude of a real square matrix.
pub fn spectral_radius(b: &DMatrix<f64>) -> f64 {
    if b.nrows() == 0 {
        return 0.0;
    }
    b.complex_eigenvalues()
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Orthonormal basis (as columns) of the null space of a full-row-rank
/// `K × M` matrix with `K < M`.
pub fn null_space_basis(h: &CMatrix) -> Result<CMatrix> {
    let (k, m) = h.shape();
    if k >= m {
        return Err(Error::Dimension(format!(
            "null space needs fewer rows than columns, got {k}x{m}"
        )));
    }
    if k > 0 {
        let sv = h.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        if smax == 0.0 || smin <= 1e-12 * smax {
            return Err(Error::RankDeficient(format!(
                "channel matrix singular values span [{smin:e}, {smax:e}]"
            )));
        }
    }
    let mut basis: Vec<CVector> = if k > 0 {
        let q = h.adjoint().qr().q();
        q.column_iter().map(|c| c.into_owned()).collect()
    } else {
        Vec::new()
    };
    let mut null = Vec::with_capacity(m - k);
    for e in 0..m {
        if null.len() == m - k {
            break;
        }
        let mut v = CVector::zeros(m);
        v[e] = C64::new(1.0, 0.0);
        // Two Gram-Schmidt passes keep the residual at rounding level.
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        let norm = v.norm();
        if norm > 0.25 {
            v /= C64::new(norm, 0.0);
            normalize_phase(&mut v);
            basis.push(v.clone());
            null.push(v);
        }
    }
    Ok(CMatrix::from_columns(&null))
}

/// Tests `A ⪰ b b^H` for PSD `A` through the pseudoinverse quadratic form
/// `b^H A† b ≤ 1` together with the range condition `b ∈ range(A)`.
pub fn psd_dominance_check(a: &HermitianMatrix, b: &CVector, tol: f64) -> Result<bool> {
    if a.dim() != b.len() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but vector has length {}",
            a.dim(),
            a.dim(),
            b.len()
        )));
    }
    let eig = hermitian_eig(a)?;
    if eig.min_value() < -tol {
        return Err(Error::InvalidInput(format!(
            "dominance check needs a PSD matrix, min eigenvalue {:e}",
            eig.min_value()
        )));
    }
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(true);
    }
    let pa = pinv_from_eig(&eig, DEFAULT_PINV_RTOL * a.dim() as f64);
    let pb = pa.mul_vec(b);
    let quad = b.dotc(&pb).re;
    let residual = (b - a.mul_vec(&pb)).norm();
    Ok(quad <= 1.0 + tol && residual <= tol * bnorm)
}

/// `h w` for a row channel `h` stored as a vector (no conjugation).
pub fn row_dot(h: &CVector, w: &CVector) -> C64 {
    h.dot(w)
}
