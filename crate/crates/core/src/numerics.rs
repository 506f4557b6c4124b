//! Complex-Hermitian linear-algebra utilities shared by the optimization
//! modules: dominant eigenpairs, spectral-norm subgradients, and projection
//! onto the unit-modulus torus.
//!
//! Everything here is deterministic. The eigenvector tie-break (see
//! [`max_eigpair`]) makes downstream penalty linearizations reproducible
//! across reruns, which the regression tests rely on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for the Hermitian symmetry check in [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
}

/// A square complex matrix with `entries(i,j) = conj(entries(j,i))`.
///
/// The constructor validates the symmetry within [`HERMITIAN_TOL`] (absolute)
/// and then canonicalizes to an exactly Hermitian representative, so all
/// downstream code can assume real diagonals and exact conjugate symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(data: DMatrix<Complex64>) -> Result<Self, NumericsError> {
        if data.nrows() != data.ncols() {
            return Err(NumericsError::InvalidMatrix(format!(
                "expected square matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let n = data.nrows();
        for i in 0..n {
            for j in i..n {
                let dev = (data[(i, j)] - data[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(NumericsError::InvalidMatrix(format!(
                        "not Hermitian: |A[{i},{j}] - conj(A[{j},{i}])| = {dev:.3e}"
                    )));
                }
            }
        }
        Ok(Self::symmetrize(data))
    }

    /// Builds `(A + A^H)/2` without a symmetry check. Intended for matrices
    /// that are Hermitian by construction up to rounding.
    pub fn symmetrize(mut data: DMatrix<Complex64>) -> Self {
        assert_eq!(data.nrows(), data.ncols(), "symmetrize requires square");
        let n = data.nrows();
        for i in 0..n {
            data[(i, i)] = Complex64::new(data[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = 0.5 * (data[(i, j)] + data[(j, i)].conj());
                data[(i, j)] = avg;
                data[(j, i)] = avg.conj();
            }
        }
        Self { data }
    }

    /// Rank-one matrix `v v^H`.
    pub fn from_outer(v: &DVector<Complex64>) -> Self {
        Self::symmetrize(v * v.adjoint())
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    /// Real trace. The imaginary part is zero by construction.
    pub fn trace_re(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    /// `Re Tr(A B)` for Hermitian `A = self`, `B = other`. This is the
    /// real inner product under which the lifted problems are linear.
    pub fn re_inner(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "re_inner dimension mismatch");
        let mut acc = 0.0;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                let a = self.data[(i, j)];
                let b = other.data[(i, j)];
                acc += a.re * b.re + a.im * b.im;
            }
        }
        acc
    }

    /// Linear combination `sum_k coeff_k * M_k` of same-dimension matrices.
    pub fn lin_comb(terms: &[(f64, &HermitianMatrix)]) -> Self {
        let n = terms
            .first()
            .expect("lin_comb requires at least one term")
            .1
            .dim();
        let mut data = DMatrix::<Complex64>::zeros(n, n);
        for (c, m) in terms {
            assert_eq!(m.dim(), n, "lin_comb dimension mismatch");
            data += m.matrix() * Complex64::new(*c, 0.0);
        }
        Self::symmetrize(data)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            data: &self.data * Complex64::new(c, 0.0),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// All eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let se = nalgebra::linalg::SymmetricEigen::new(self.data.clone());
        let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        vals
    }
}

/// Largest eigenvalue of a Hermitian matrix with a deterministic unit
/// eigenvector.
///
/// The eigenvector of a simple eigenvalue is unique only up to a phase, and
/// a degenerate one only up to a basis of its eigenspace. Both ambiguities
/// are resolved the same way: project the first canonical basis vector with
/// a non-negligible component onto the top eigenspace and normalize. For a
/// simple eigenvalue this reduces to the usual convention that the first
/// nonzero component of the eigenvector is real and positive; for the
/// identity matrix it yields `e1`.
pub fn max_eigpair(a: &HermitianMatrix) -> Result<(f64, DVector<Complex64>), NumericsError> {
    let n = a.dim();
    if n == 0 {
        return Err(NumericsError::InvalidMatrix(
            "max_eigpair requires dim >= 1".into(),
        ));
    }
    let se = nalgebra::linalg::SymmetricEigen::new(a.matrix().clone());
    let lam_max = se.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * (1.0 + lam_max.abs() + a.norm());

    // Projector onto the (possibly degenerate) top eigenspace.
    let mut proj = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        if se.eigenvalues[k] >= lam_max - tol {
            let v = se.eigenvectors.column(k);
            proj += v * v.adjoint();
        }
    }
    for k in 0..n {
        let col = proj.column(k).clone_owned();
        let norm = col.norm();
        if norm > 1e-7 {
            return Ok((lam_max, col / Complex64::new(norm, 0.0)));
        }
    }
    // Unreachable for a well-formed projector of rank >= 1.
    Err(NumericsError::InvalidMatrix(
        "degenerate eigenspace projector".into(),
    ))
}

/// Subgradient `u u^H` of the spectral norm at a PSD matrix, with `u` the
/// tie-broken dominant eigenvector from [`max_eigpair`].
///
/// For PSD `A` the spectral norm equals the top eigenvalue, and any unit
/// vector in the top eigenspace yields a valid subgradient direction; the
/// deterministic tie-break fixes one. The result is rank-one, unit-trace,
/// and satisfies the tightness identity `<u u^H, A> = ||A||_2`.
pub fn spectral_norm_subgradient(a: &HermitianMatrix) -> Result<HermitianMatrix, NumericsError> {
    let (lam_max, u) = max_eigpair(a)?;
    // PSD precondition, checked loosely: solver iterates carry O(tol)
    // negative eigenvalues.
    let min_eig = a
        .eigenvalues()
        .last()
        .copied()
        .unwrap_or(0.0);
    if min_eig < -1e-7 * (1.0 + lam_max.abs()) {
        return Err(NumericsError::InvalidMatrix(format!(
            "spectral_norm_subgradient expects PSD input, min eigenvalue {min_eig:.3e}"
        )));
    }
    Ok(HermitianMatrix::from_outer(&u))
}

/// Projects each entry onto the complex unit circle: `v_k / |v_k|`, with the
/// convention that a zero entry maps to `1` (any phase is admissible there).
pub fn project_unit_modulus(v: &[Complex64]) -> Vec<Complex64> {
    v.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                z / r
            }
        })
        .collect()
}
