//! Dense kernels shared by the engines: truncated SVD, QR, complex GEMM and
//! Krylov (Lanczos) application of exponentials of Hermitian operators.

use faer::{Mat, MatRef, Side};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};

/// Complex matrix, column-major.
pub type DenseMatrix = DMatrix<C64>;

/// Outcome of a truncated SVD.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationReport {
    pub kept: usize,
    /// Sum of the squared discarded singular values.
    pub discarded_weight: f64,
    /// Kept singular values in descending order.
    pub singular_values: Vec<f64>,
}

impl TruncationReport {
    pub fn exact(singular_values: Vec<f64>) -> Self {
        Self { kept: singular_values.len(), discarded_weight: 0.0, singular_values }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v_dag: DenseMatrix,
    pub report: TruncationReport,
}

pub fn ensure_finite(m: &DenseMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what}: matrix has non-finite entries")))
    }
}

/// SVD keeping singular values `>= s_max`, at most `chi_max` of them and never
/// fewer than one.
pub fn truncated_svd(m: &DenseMatrix, s_max: f64, chi_max: usize) -> Result<TruncatedSvd> {
    if !(s_max >= 0.0) {
        return Err(Error::InvalidInput(format!("s_max must be >= 0, got {s_max}")));
    }
    if chi_max == 0 {
        return Err(Error::InvalidInput("chi_max must be >= 1".into()));
    }
    ensure_finite(m, "truncated_svd")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InvalidInput("truncated_svd: empty matrix".into()));
    }

    let svd = to_faer(m).thin_svd().map_err(|e| Error::InvalidInput(format!("SVD did not converge: {e:?}")))?;
    let u = from_faer(svd.U());
    let v_dag = from_faer(svd.V()).adjoint();
    let all: Vec<f64> = (0..u.ncols()).map(|i| svd.S()[i].re).collect();

    let above = all.iter().take_while(|&&s| s >= s_max).count();
    let kept = above.clamp(1, chi_max.min(all.len()));
    let discarded_weight = all[kept..].iter().map(|s| s * s).sum();
    let s = all[..kept].to_vec();

    Ok(TruncatedSvd {
        u: u.columns(0, kept).into_owned(),
        v_dag: v_dag.rows(0, kept).into_owned(),
        report: TruncationReport { kept, discarded_weight, singular_values: s.clone() },
        s,
    })
}

/// Thin QR with the diagonal of `R` made real and non-negative.
pub fn qr_orthonormalize(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    ensure_finite(m, "qr_orthonormalize")?;
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows().min(r.ncols()) {
        let d = r[(i, i)];
        let mag = d.norm();
        if mag > 0.0 {
            let phase = d / mag;
            q.column_mut(i).scale_mut_complex(phase);
            r.row_mut(i).scale_mut_complex(phase.conj());
        }
    }
    Ok((q, r))
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, z: C64);
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, z: C64) {
        for x in self.iter_mut() {
            *x *= z;
        }
    }
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::U1, nalgebra::Dyn, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::U1, nalgebra::Dyn>,
{
    fn scale_mut_complex(&mut self, z: C64) {
        for x in self.iter_mut() {
            *x *= z;
        }
    }
}

/// `a * b` through the blocked complex GEMM kernel.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut c = DenseMatrix::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: Complex64 is repr(C) {re, im}, layout-identical to [f64; 2]; all
    // three buffers are contiguous column-major with the strides given.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> DenseMatrix {
    DenseMatrix::identity(n, n)
}

/// Frobenius norm of `UᴴU − I`.
pub fn unitarity_deviation(u: &DenseMatrix) -> f64 {
    (u.adjoint() * u - identity(u.ncols())).norm()
}

pub fn hermiticity_deviation(h: &DenseMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

fn to_faer(m: &DenseMatrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, C64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of the Hermitian
/// part of `h`.
pub fn hermitian_eigen(h: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    ensure_finite(h, "hermitian_eigen")?;
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = to_faer(&herm)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::InvalidInput(format!("eigendecomposition did not converge: {e:?}")))?;
    let values = (0..herm.nrows()).map(|i| eig.S()[i].re).collect();
    Ok((values, from_faer(eig.U())))
}

/// `exp(prefactor · h)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian(h: &DenseMatrix, prefactor: C64) -> DenseMatrix {
    let n = h.nrows();
    let (values, v) = hermitian_eigen(h).expect("finite Hermitian matrix");
    let mut scaled = v.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let f = (prefactor * lambda).exp();
        scaled.column_mut(j).scale_mut_complex(f);
    }
    let out = scaled * v.adjoint();
    debug_assert_eq!(out.nrows(), n);
    out
}

pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DenseMatrix {
    let a = random_complex_matrix(rng, n, n);
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DenseMatrix {
    let a = random_complex_matrix(rng, n, n);
    qr_orthonormalize(&a).expect("finite random matrix").0
}

// ---------------------------------------------------------------------------
// Krylov exponentials

/// A linear map on `C^dim` that the caller promises is Hermitian.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    pub krylov_max: usize,
    /// Bound on the residual estimate relative to `‖v‖`.
    pub tol: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { krylov_max: 25, tol: 1e-12 }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Approximates `exp(prefactor · H) v` in a Lanczos basis of at most
/// `krylov_max` vectors. If the first attempt does not reach `tol`, the
/// exponent is split into two halves and each half gets a fresh Krylov space.
pub fn lanczos_expm_apply<Op: LinearOperator + ?Sized>(op: &Op, v: &[C64], prefactor: C64, opts: &KrylovOptions) -> Result<Vec<C64>> {
    if opts.krylov_max < 1 {
        return Err(Error::InvalidInput("krylov_max must be >= 1".into()));
    }
    match krylov_expm(op, v, prefactor, opts) {
        Err(Error::Convergence { .. }) => {
            let half = prefactor * 0.5;
            let mid = krylov_expm(op, v, half, opts)?;
            krylov_expm(op, &mid, half, opts)
        }
        other => other,
    }
}

fn krylov_expm<Op: LinearOperator + ?Sized>(op: &Op, v: &[C64], prefactor: C64, opts: &KrylovOptions) -> Result<Vec<C64>> {
    let n = v.len();
    if op.dim() != n {
        return Err(Error::InvalidInput(format!("operator dimension {} does not match vector length {n}", op.dim())));
    }
    let beta0 = vec_norm(v);
    if beta0 == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); n]);
    }
    if !beta0.is_finite() {
        return Err(Error::InvalidInput("Krylov start vector is not finite".into()));
    }

    let m_max = opts.krylov_max.min(n);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
    basis.push(v.iter().map(|z| z / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = vec![C64::new(0.0, 0.0); n];

    for j in 0..m_max {
        op.apply(&basis[j], &mut w);
        let alpha = dot(&basis[j], &w).re;
        for (wi, bi) in w.iter_mut().zip(&basis[j]) {
            *wi -= bi * alpha;
        }
        if j > 0 {
            let beta_prev = betas[j - 1];
            for (wi, bi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= bi * beta_prev;
            }
        }
        // full reorthogonalisation, two passes
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= bi * c;
                }
            }
        }
        alphas.push(alpha);
        let beta = vec_norm(&w);

        let coeffs = tridiagonal_expm_e1(&alphas, &betas, prefactor);
        let residual = beta * coeffs[j].norm();
        let scale = alphas.iter().chain(&betas).fold(1.0_f64, |acc, x| acc.max(x.abs()));
        let invariant = beta <= 1e-14 * scale;

        if invariant || residual <= opts.tol || j + 1 == n {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (c, b) in coeffs.iter().zip(&basis) {
                let c = c * beta0;
                for (oi, bi) in out.iter_mut().zip(b) {
                    *oi += bi * c;
                }
            }
            return Ok(out);
        }
        if j + 1 == m_max {
            return Err(Error::Convergence { residual });
        }
        betas.push(beta);
        basis.push(w.iter().map(|z| z / beta).collect());
    }
    unreachable!("loop returns on its last iteration")
}

/// `exp(prefactor · T) e₁` for the real symmetric tridiagonal `T`.
fn tridiagonal_expm_e1(alphas: &[f64], betas: &[f64], prefactor: C64) -> Vec<C64> {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(m.saturating_sub(1)).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = Mat::<f64>::from_fn(m, m, |i, j| t[(i, j)]).self_adjoint_eigen(Side::Lower).expect("finite tridiagonal matrix");
    let q = eig.U();
    let lambdas: Vec<f64> = (0..m).map(|k| eig.S()[k]).collect();
    (0..m).map(|i| lambdas.iter().enumerate().map(|(k, &lambda)| (prefactor * lambda).exp() * (q[(i, k)] * q[(0, k)])).sum()).collect()
}
