//! Dense complex linear algebra: spectral norms, Hermitian spectra, singular systems.
//!
//! Matrices are nalgebra types; the decompositions run in faer.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Above this dimension spectral norms switch from a dense eigensolver to power iteration.
pub const POWER_ITERATION_THRESHOLD: usize = 2000;

const POWER_MAX_ITERS: usize = 20_000;
const POWER_REL_TOL: f64 = 1e-15;

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    (0..n).all(|i| (i..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

fn to_faer(m: &CMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev = to_faer(m).self_adjoint_eigenvalues(Side::Lower).expect("Hermitian eigensolver failed to converge");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv = to_faer(m).singular_values().expect("SVD failed to converge");
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let n = m.nrows().max(m.ncols());
    if n > POWER_ITERATION_THRESHOLD {
        return power_norm(m);
    }
    if m.is_square() && is_hermitian(m, 0.0) {
        let ev = hermitian_eigenvalues(m);
        return ev.first().unwrap().abs().max(ev.last().unwrap().abs());
    }
    singular_values(m)[0]
}

/// Power iteration on M*M from a fixed, generic starting vector.
pub fn power_norm(m: &CMatrix) -> f64 {
    let n = m.ncols();
    let mut v = CVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), 0.0));
    v /= Complex64::new(v.norm(), 0.0);
    let mut sigma = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let w = m.adjoint() * (m * &v);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = nw.sqrt();
        v = w / Complex64::new(nw, 0.0);
        if (next - sigma).abs() <= POWER_REL_TOL * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// Thin SVD: singular values sorted descending with matching left/right
/// singular vectors as columns, so M v_i = σ_i u_i.
pub struct SingularSystem {
    pub values: Vec<f64>,
    pub left: CMatrix,
    pub right: CMatrix,
}

pub fn singular_system(m: &CMatrix) -> SingularSystem {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return SingularSystem {
            values: Vec::new(),
            left: CMatrix::zeros(m.nrows(), 0),
            right: CMatrix::zeros(m.ncols(), 0),
        };
    }
    let svd = to_faer(m).thin_svd().expect("SVD failed to converge");
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let values = order.iter().map(|&i| s[i].re).collect();
    let (u, v) = (svd.U(), svd.V());
    let left = CMatrix::from_fn(m.nrows(), k, |r, c| u[(r, order[c])]);
    let right = CMatrix::from_fn(m.ncols(), k, |r, c| v[(r, order[c])]);
    SingularSystem { values, left, right }
}

/// `⟨x, M y⟩` with the inner product conjugate-linear in the first slot.
pub fn quadratic_form(x: &CVector, m: &CMatrix, y: &CVector) -> Complex64 {
    x.dotc(&(m * y))
}
