//! Least-squares and small dense helpers shared by the regression code.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative pivot size below which a design matrix is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Multi-response least squares fit `Y ~ X B`.
pub(crate) struct Ols {
    /// `cols(X) x cols(Y)` coefficients.
    pub coef: DMatrix<f64>,
    /// `rows(X) x cols(Y)` residuals.
    pub resid: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl Ols {
    pub fn fit(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<Self> {
        let (n, k) = x.shape();
        if n < k {
            return Err(Error::Singular(format!(
                "{n} observations for {k} regressors"
            )));
        }
        let qr = x.clone().qr();
        let r = qr.r();
        let scale = r.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        if scale == 0.0 || r.diagonal().iter().any(|d| d.abs() <= RANK_TOL * scale) {
            return Err(Error::Singular("rank-deficient regressor matrix".into()));
        }
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        let rhs = qty.rows(0, k).into_owned();
        let coef = r
            .solve_upper_triangular(&rhs)
            .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
        let resid = y - x * &coef;
        Ok(Ols { coef, resid, r })
    }

    /// Residual sum of squares for response column `j`.
    pub fn rss(&self, j: usize) -> f64 {
        self.resid.column(j).norm_squared()
    }

    /// Diagonal of `(X'X)^-1`.
    pub fn xtx_inv_diag(&self) -> DVector<f64> {
        let k = self.r.ncols();
        let rinv = self
            .r
            .solve_upper_triangular(&DMatrix::identity(k, k))
            .expect("checked non-singular at fit time");
        DVector::from_iterator(k, (0..k).map(|i| rinv.row(i).norm_squared()))
    }
}

/// Conditional variance `m[a,a] - m[a,c] m[c,c]^-1 m[c,a]` of index `a` given
/// the indices in `cond`.
pub(crate) fn conditional_variance(m: &DMatrix<f64>, a: usize, cond: &[usize]) -> Result<f64> {
    if cond.is_empty() {
        return Ok(m[(a, a)]);
    }
    let c = cond.len();
    let scc = DMatrix::from_fn(c, c, |i, j| m[(cond[i], cond[j])]);
    let sac = DVector::from_fn(c, |i, _| m[(a, cond[i])]);
    let chol = scc
        .cholesky()
        .ok_or_else(|| Error::Singular("conditioning block is not positive definite".into()))?;
    let solved = chol.solve(&sac);
    Ok(m[(a, a)] - sac.dot(&solved))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_has_zero_residuals() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DMatrix::from_column_slice(4, 1, &[1.0, 3.0, 5.0, 7.0]);
        let fit = Ols::fit(&x, &y).unwrap();
        assert!((fit.coef[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((fit.coef[(1, 0)] - 2.0).abs() < 1e-12);
        assert!(fit.rss(0) < 1e-20);
    }

    #[test]
    fn xtx_inverse_diagonal_matches_direct_inverse() {
        let x = DMatrix::from_row_slice(5, 2, &[1.0, 0.5, 1.0, 1.5, 1.0, 2.0, 1.0, 4.0, 1.0, 3.0]);
        let y = DMatrix::from_column_slice(5, 1, &[1.0, 2.0, 2.5, 5.0, 3.0]);
        let fit = Ols::fit(&x, &y).unwrap();
        let direct = (x.transpose() * &x).try_inverse().unwrap();
        let d = fit.xtx_inv_diag();
        for i in 0..2 {
            assert!((d[i] - direct[(i, i)]).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_columns_are_singular() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let y = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(matches!(Ols::fit(&x, &y), Err(Error::Singular(_))));
    }

    #[test]
    fn conditional_variance_of_bivariate_normal() {
        // var(a | c) = s_aa - s_ac^2 / s_cc
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.5]);
        let v = conditional_variance(&m, 0, &[1]).unwrap();
        assert!((v - (2.0 - 0.36 / 1.5)).abs() < 1e-15);
    }
}
