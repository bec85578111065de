//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Everything in this artifact works with matrices of dimension at most a few
//! hundred, so all storage is dense and all decompositions are direct.

use nalgebra::{Complex, DMatrix, DVector};

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Hermiticity tolerance, relative to the largest entry magnitude.
pub const HERM_TOL: f64 = 1e-12;
/// Absolute eigenvalue clipping threshold for PSD checks and roots on
/// unit-trace-scale matrices.
pub const PSD_TOL: f64 = 1e-10;

pub fn cplx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn trace(m: &CMat) -> C64 {
    let mut t = C64::default();
    for i in 0..m.nrows() {
        t += m[(i, i)];
    }
    t
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Largest entrywise deviation from Hermiticity, relative to the largest
/// entry magnitude (0 for the zero matrix).
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let mut scale: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            scale = scale.max(m[(j, k)].norm());
            defect = defect.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        defect / scale
    }
}

/// A validated d×d Hermitian matrix. Entry `(j,k)` equals the conjugate of
/// entry `(k,j)` within [`HERM_TOL`] relative to the largest entry.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: CMat,
}

impl HermitianMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimMismatch {
                expected: mat.nrows().max(1),
                got: mat.ncols(),
            });
        }
        let defect = hermiticity_defect(&mat);
        if defect > HERM_TOL {
            return Err(Error::NotHermitian(defect));
        }
        // symmetrize so downstream code sees an exactly Hermitian matrix
        let sym = (&mat + mat.adjoint()).scale(0.5);
        Ok(Self { mat: sym })
    }

    /// Builds from real and imaginary parts given row-major.
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        assert_eq!(re.len(), dim * dim);
        assert_eq!(im.len(), dim * dim);
        let mat = CMat::from_fn(dim, dim, |r, c| cplx(re[r * dim + c], im[r * dim + c]));
        Self::new(mat)
    }

    pub fn from_real(dim: usize, re: &[f64]) -> Result<Self> {
        let zeros = vec![0.0; dim * dim];
        Self::from_parts(dim, re, &zeros)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMat::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.mat[(r, c)]
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = eig_hermitian(self);
        vals[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order with matching unitary eigenvector columns.
pub fn eig_hermitian(h: &HermitianMatrix) -> (DVector<f64>, CMat) {
    let eig = nalgebra::SymmetricEigen::new(h.mat.clone());
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let mut vecs = CMat::zeros(n, n);
    for (i, &src) in order.iter().enumerate() {
        vecs.set_column(i, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// `V diag(f(λ)) V†` for the eigendecomposition of `h`.
pub fn hermitian_function(h: &HermitianMatrix, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eig_hermitian(h);
    let d = DMatrix::from_diagonal(&vals.map(|x| cplx(f(x), 0.0)));
    &vecs * d * vecs.adjoint()
}

/// PSD square root with negative eigenvalues clipped to zero before the root.
pub fn psd_sqrt(h: &HermitianMatrix) -> HermitianMatrix {
    let m = hermitian_function(h, |x| if x > 0.0 { x.sqrt() } else { 0.0 });
    HermitianMatrix::new(m).expect("functional calculus preserves Hermiticity")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Frobenius,
    /// Sum of singular values (nuclear norm).
    Trace,
    /// Largest singular value.
    Spectral,
}

pub fn matrix_norm(m: &CMat, kind: NormKind) -> f64 {
    match kind {
        NormKind::Frobenius => m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        NormKind::Trace => singular_values(m).iter().sum(),
        NormKind::Spectral => singular_values(m)
            .iter()
            .fold(0.0_f64, |acc, &s| acc.max(s)),
    }
}

/// Singular values in unspecified order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().copied().collect()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn real_matrix_to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| cplx(x, 0.0))
}

/// Frobenius norm of a real matrix.
pub fn fnorm_real(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Symmetric inverse square root of a positive-definite real matrix.
pub fn real_sym_inv_sqrt(m: &DMatrix<f64>, label: &str) -> Result<DMatrix<f64>> {
    let h = HermitianMatrix::new(real_matrix_to_complex(m))?;
    let (vals, vecs) = eig_hermitian(&h);
    if vals[0] <= PSD_TOL {
        return Err(Error::Invalid(format!(
            "{label} is singular (smallest eigenvalue {:.3e})",
            vals[0]
        )));
    }
    let d = DMatrix::from_diagonal(&vals.map(|x| cplx(1.0 / x.sqrt(), 0.0)));
    let inv = &vecs * d * vecs.adjoint();
    Ok(inv.map(|z| z.re))
}
