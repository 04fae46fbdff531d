//! Dense helpers shared by the reduction module.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub fn re(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn im(m: &CMatrix) -> RMatrix {
    m.map(|z| z.im)
}

pub fn complexify(re: &RMatrix, im: &RMatrix) -> CMatrix {
    re.zip_map(im, Complex64::new)
}

pub fn max_abs(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Symmetrized Cholesky factorization; fails if `m` is not positive definite.
pub fn cholesky(m: &RMatrix, name: &'static str) -> Result<Cholesky<f64, Dyn>> {
    let sym = (m + m.transpose()) * 0.5;
    Cholesky::new(sym).ok_or(Error::NotPositiveDefinite(name))
}

/// ln det of a symmetric positive definite matrix, 2 Σ ln L_ii.
pub fn logdet_spd(m: &RMatrix, name: &'static str) -> Result<f64> {
    Ok(logdet_factor(&cholesky(m, name)?))
}

pub fn logdet_factor(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

pub fn spd_inverse(m: &RMatrix, name: &'static str) -> Result<RMatrix> {
    Ok(cholesky(m, name)?.inverse())
}

/// Solves (real SPD) · X = B for complex B.
pub fn solve_complex(chol: &Cholesky<f64, Dyn>, b: &CMatrix) -> CMatrix {
    complexify(&chol.solve(&re(b)), &chol.solve(&im(b)))
}

/// ‖A‖₁‖A⁻¹‖₁ for a matrix and its computed inverse.
pub fn condition_estimate(a: &CMatrix, inv: &CMatrix) -> f64 {
    let one_norm = |m: &CMatrix| {
        m.column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    one_norm(a) * one_norm(inv)
}
