//! Dense complex linear algebra used by the kernel and operator modules.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `(M + M*) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Real trace of a Hermitian matrix.
pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

/// Eigenvalues in ascending order together with the matching unit
/// eigenvectors (as columns).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.nrows();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Largest `λ` with `det(B − λA) = 0` for Hermitian `B` and Hermitian
/// positive definite `A`. `A` is regularized by `1e-12 · trace(A)` on the
/// diagonal when its Cholesky factorization fails.
pub fn max_generalized_eigenvalue(b: &CMatrix, a: &CMatrix) -> Result<f64> {
    let a = symmetrize(a);
    let chol = match positive_cholesky(a.clone()) {
        Some(c) => c,
        None => {
            let eps = 1e-12 * trace_re(&a).abs().max(f64::MIN_POSITIVE);
            let reg = &a + CMatrix::identity(a.nrows(), a.ncols()).scale(eps);
            positive_cholesky(reg).ok_or(Error::SingularPencil)?
        }
    };
    let l = chol.l();
    let linv_b = l
        .solve_lower_triangular(&symmetrize(b))
        .ok_or(Error::SingularPencil)?;
    // C = L⁻¹ B L⁻* = L⁻¹ (L⁻¹ B)*  since B is Hermitian.
    let c = l
        .solve_lower_triangular(&linv_b.adjoint())
        .ok_or(Error::SingularPencil)?;
    if c.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::SingularPencil);
    }
    let (values, _) = hermitian_eigen(&c);
    Ok(*values.last().unwrap_or(&0.0))
}

// nalgebra takes complex square roots of negative pivots, so an indefinite
// matrix can still "factor"; only accept real positive pivots.
fn positive_cholesky(a: CMatrix) -> Option<Cholesky<Complex64, nalgebra::Dyn>> {
    let chol = Cholesky::new(a)?;
    let l = chol.l_dirty();
    let ok = (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re.is_finite() && d.re > 0.0 && d.im.abs() <= 1e-12 * d.re
    });
    ok.then_some(chol)
}

/// Largest singular value via a dense SVD.
pub fn largest_singular_value(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

/// Largest singular value by power iteration on `M*M`, stopped when the
/// Rayleigh quotient changes by less than `rel_tol` relative.
pub fn largest_singular_value_power(m: &CMatrix, rel_tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // Deterministic start with every coordinate excited.
    let mut x = CVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618).fract(), 0.0));
    x.unscale_mut(x.norm());
    let mut sigma2 = 0.0f64;
    for _ in 0..max_iter {
        let y = m * &x;
        let z = m.adjoint() * &y;
        let nz = z.norm();
        if nz == 0.0 {
            return 0.0;
        }
        let next = y.norm_squared();
        x = z.unscale(nz);
        if (next - sigma2).abs() <= rel_tol * next {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    sigma2.sqrt()
}
