//! Vector autoregression and the Granger-causality family: pairwise F tests,
//! partial Granger causality with a bootstrap null, BIC lag selection and
//! Benjamini-Hochberg correction.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::linalg::Ols;
use crate::{Error, Result};

mod partial;
mod pipeline;
pub mod sim;

pub use partial::{
    partial_granger, partial_granger_stat, Direction, PgcConfig, PgcResult, DEFAULT_BOOTSTRAP,
};
pub use pipeline::{
    align, causality_pipeline, Arrow, BhFamily, CausalityReport, GroupInput, GroupReport,
    PipelineConfig, PipelineFile, Role, SeriesSpec, TestReport, DEFAULT_MIN_OVERLAP, DEFAULT_P_MAX,
};

/// Fitted VAR(p) with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    pub p: usize,
    pub k: usize,
    pub intercept: DVector<f64>,
    /// `coefs[i][(eq, var)]` is the weight of `var` at lag `i + 1` in
    /// equation `eq`.
    pub coefs: Vec<DMatrix<f64>>,
    /// `(rows) x k`, one row per fitted time step.
    pub residuals: DMatrix<f64>,
    /// `residuals^T residuals / rows`.
    pub sigma: DMatrix<f64>,
}

impl VarModel {
    pub fn nobs(&self) -> usize {
        self.residuals.nrows()
    }

    pub fn residual_column(&self, j: usize) -> Vec<f64> {
        self.residuals.column(j).iter().copied().collect()
    }
}

fn check_series(series: &[&[f64]]) -> Result<usize> {
    let Some(first) = series.first() else {
        return Err(Error::invalid("VAR needs at least one series"));
    };
    let n = first.len();
    if series.iter().any(|s| s.len() != n) {
        return Err(Error::invalid("VAR series must have equal length"));
    }
    if series.iter().flat_map(|s| s.iter()).any(|v| !v.is_finite()) {
        return Err(Error::invalid("VAR series must be finite"));
    }
    Ok(n)
}

/// Regressors `[1, y_{t-1}, ..., y_{t-p}]` for rows `start..n`.
pub(crate) fn lagged_design(series: &[&[f64]], p: usize, start: usize) -> DMatrix<f64> {
    let k = series.len();
    let n = series[0].len();
    DMatrix::from_fn(n - start, 1 + k * p, |r, c| {
        if c == 0 {
            1.0
        } else {
            let lag = (c - 1) / k + 1;
            let var = (c - 1) % k;
            series[var][start + r - lag]
        }
    })
}

pub(crate) fn responses(series: &[&[f64]], start: usize) -> DMatrix<f64> {
    let n = series[0].len();
    DMatrix::from_fn(n - start, series.len(), |r, j| series[j][start + r])
}

fn fit_var_from(series: &[&[f64]], p: usize, start: usize) -> Result<VarModel> {
    let k = series.len();
    let x = lagged_design(series, p, start);
    let y = responses(series, start);
    let ols = Ols::fit(&x, &y)?;
    let rows = y.nrows() as f64;
    let sigma = ols.resid.transpose() * &ols.resid / rows;
    let coefs = (0..p)
        .map(|i| DMatrix::from_fn(k, k, |eq, var| ols.coef[(1 + i * k + var, eq)]))
        .collect();
    Ok(VarModel {
        p,
        k,
        intercept: DVector::from_fn(k, |eq, _| ols.coef[(0, eq)]),
        coefs,
        residuals: ols.resid,
        sigma,
    })
}

/// Least-squares VAR(p) with intercept over all usable rows.
pub fn fit_var(series: &[&[f64]], p: usize) -> Result<VarModel> {
    let n = check_series(series)?;
    let k = series.len();
    if p == 0 {
        return Err(Error::invalid("VAR lag order must be >= 1"));
    }
    if n <= k * p + 1 + p {
        return Err(Error::invalid(format!(
            "{n} observations too few for VAR({p}) in {k} series"
        )));
    }
    fit_var_from(series, p, p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagSelection {
    pub p: usize,
    /// Criterion for `p = 1..=p_max`.
    pub bic: Vec<f64>,
}

/// BIC lag selection on the common sample of `n - p_max` rows:
/// `ln det(sigma_p) + ln(m)/m * (k^2 p + k)`. Ties go to the smaller lag.
pub fn select_lag_bic(series: &[&[f64]], p_max: usize) -> Result<LagSelection> {
    let n = check_series(series)?;
    let k = series.len();
    if p_max == 0 {
        return Err(Error::invalid("p_max must be >= 1"));
    }
    if n <= k * p_max + 1 + p_max {
        return Err(Error::invalid(format!(
            "{n} observations too few for lag search up to {p_max} in {k} series"
        )));
    }
    let m = (n - p_max) as f64;
    let mut bic = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let model = fit_var_from(series, p, p_max)?;
        let det = model.sigma.determinant();
        if !(det > 0.0) {
            return Err(Error::Singular(format!(
                "residual covariance at lag {p} is singular"
            )));
        }
        let params = (k * k * p + k) as f64;
        bic.push(det.ln() + m.ln() / m * params);
    }
    let mut best = 0;
    for (i, b) in bic.iter().enumerate() {
        if *b < bic[best] {
            best = i;
        }
    }
    Ok(LagSelection { p: best + 1, bic })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrangerF {
    pub f_stat: f64,
    pub p_value: f64,
    pub df_num: usize,
    pub df_den: usize,
}

/// F test of "`x` does not Granger-cause `y`" with `p` lags.
pub fn pairwise_granger(x: &[f64], y: &[f64], p: usize) -> Result<GrangerF> {
    let n = check_series(&[x, y])?;
    if p == 0 {
        return Err(Error::invalid("Granger lag must be >= 1"));
    }
    if n < 3 * p + 2 {
        return Err(Error::invalid(format!(
            "{n} observations too few for Granger lag {p}"
        )));
    }
    let yr = responses(&[y], p);
    let restricted = Ols::fit(&lagged_design(&[y], p, p), &yr)?;
    let unrestricted = Ols::fit(&lagged_design(&[y, x], p, p), &yr)?;
    let (rss_r, rss_u) = (restricted.rss(0), unrestricted.rss(0));
    let rows = yr.nrows();
    let df_den = rows - 2 * p - 1;
    if rss_u <= 0.0 {
        return Err(Error::Singular(
            "unrestricted Granger model fits exactly".into(),
        ));
    }
    let f_stat = ((rss_r - rss_u).max(0.0) / p as f64) / (rss_u / df_den as f64);
    let dist =
        FisherSnedecor::new(p as f64, df_den as f64).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(GrangerF {
        f_stat,
        p_value: dist.sf(f_stat),
        df_num: p,
        df_den,
    })
}

/// Benjamini-Hochberg step-up: rejects every hypothesis ranked at or below
/// the largest `i` with `p_(i) <= i/m * q`. Output follows input order.
pub fn bh_correct(pvals: &[f64], q: f64) -> Vec<bool> {
    let m = pvals.len();
    let mut reject = vec![false; m];
    if m == 0 || !(q > 0.0) {
        return reject;
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]).then(a.cmp(&b)));
    let cutoff = (1..=m)
        .rev()
        .find(|&i| bh_passes(pvals[order[i - 1]], i, m, q));
    if let Some(c) = cutoff {
        for &j in &order[..c] {
            reject[j] = true;
        }
    }
    reject
}

/// `p <= i/m * q`, compared as `p * m <= i * q` with a relative slack of
/// 1e-12 so exact boundary cases survive rounding.
pub fn bh_passes(p: f64, i: usize, m: usize, q: f64) -> bool {
    p * m as f64 <= q * i as f64 * (1.0 + 1e-12)
}
