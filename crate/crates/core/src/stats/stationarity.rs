//! Unit-root (ADF) and level-stationarity (KPSS) tests, and the differencing
//! search that combines them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{difference, TimeSeries};
use crate::linalg::Ols;
use crate::{Error, Result};

/// Minimum series length accepted by either test.
pub const MIN_TEST_LENGTH: usize = 20;

/// 5% critical value of the KPSS level-stationarity statistic.
pub const KPSS_CRITICAL_5PCT: f64 = 0.463;

/// Deterministic terms in the ADF regression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    #[default]
    Constant,
    ConstantTrend,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdfLag {
    /// BIC over `0..=floor(12 (n/100)^(1/4))`.
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdfResult {
    /// t statistic of the lagged level.
    pub stat: f64,
    pub critical_5pct: f64,
    pub lag: usize,
    /// Observations in the final regression.
    pub nobs: usize,
    /// Unit root rejected at 5%, i.e. the series looks stationary.
    pub stationary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KpssResult {
    pub stat: f64,
    pub critical_5pct: f64,
    pub bandwidth: usize,
    /// Level stationarity not rejected at 5%.
    pub stationary: bool,
}

/// MacKinnon (2010) response-surface 5% critical value for `nobs`
/// observations, single series.
pub fn adf_critical_5pct(det: Deterministic, nobs: usize) -> f64 {
    let (b0, b1, b2, b3) = match det {
        Deterministic::Constant => (-2.86154, -2.8903, -4.234, -40.040),
        Deterministic::ConstantTrend => (-3.41049, -4.3904, -9.036, -45.374),
    };
    let t = nobs as f64;
    b0 + b1 / t + b2 / (t * t) + b3 / (t * t * t)
}

fn check_length(ts: &TimeSeries, test: &str) -> Result<()> {
    if ts.len() < MIN_TEST_LENGTH {
        return Err(Error::invalid(format!(
            "{test} needs at least {MIN_TEST_LENGTH} observations, got {}",
            ts.len()
        )));
    }
    Ok(())
}

/// Design and response for lag `p` over differenced rows `start..dx.len()`.
fn adf_design(
    x: &[f64],
    dx: &[f64],
    p: usize,
    start: usize,
    det: Deterministic,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let rows = dx.len() - start;
    let trend = det == Deterministic::ConstantTrend;
    let k = 2 + p + usize::from(trend);
    let design = DMatrix::from_fn(rows, k, |r, c| {
        let t = start + r;
        match c {
            0 => 1.0,
            1 => x[t],
            c if c < 2 + p => dx[t - (c - 1)],
            _ => (t + 1) as f64,
        }
    });
    let y = DMatrix::from_fn(rows, 1, |r, _| dx[start + r]);
    (design, y)
}

/// Augmented Dickey-Fuller test of `dx_t = a + g x_{t-1} + sum phi_i dx_{t-i} + e`.
pub fn adf_test(ts: &TimeSeries, lag: AdfLag, det: Deterministic) -> Result<AdfResult> {
    check_length(ts, "ADF")?;
    let x = ts.values();
    let n = x.len();
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let ndet = 1 + usize::from(det == Deterministic::ConstantTrend);
    let p = match lag {
        AdfLag::Fixed(p) => p,
        AdfLag::Auto => {
            let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
            let max_lag = schwert.min((n / 2).saturating_sub(ndet + 1));
            let mut best = (f64::INFINITY, 0);
            for p in 0..=max_lag {
                let (design, y) = adf_design(x, &dx, p, max_lag, det);
                let fit = Ols::fit(&design, &y)?;
                let nobs = design.nrows() as f64;
                let bic = nobs * (fit.rss(0) / nobs).ln() + design.ncols() as f64 * nobs.ln();
                if bic < best.0 {
                    best = (bic, p);
                }
            }
            best.1
        }
    };
    if dx.len() <= p + 2 + ndet {
        return Err(Error::invalid(format!(
            "ADF lag {p} too large for {n} observations"
        )));
    }
    let (design, y) = adf_design(x, &dx, p, p, det);
    let fit = Ols::fit(&design, &y)?;
    let (nobs, k) = design.shape();
    let s2 = fit.rss(0) / (nobs - k) as f64;
    let se = (s2 * fit.xtx_inv_diag()[1]).sqrt();
    let stat = fit.coef[(1, 0)] / se;
    if !stat.is_finite() {
        return Err(Error::Singular("ADF statistic is not finite".into()));
    }
    let critical_5pct = adf_critical_5pct(det, nobs);
    Ok(AdfResult {
        stat,
        critical_5pct,
        lag: p,
        nobs,
        stationary: stat < critical_5pct,
    })
}

/// KPSS level-stationarity test with a Bartlett-weighted long-run variance.
/// `bandwidth = None` uses `floor(4 (n/100)^(1/4))`.
pub fn kpss_test(ts: &TimeSeries, bandwidth: Option<usize>) -> Result<KpssResult> {
    check_length(ts, "KPSS")?;
    let x = ts.values();
    let n = x.len();
    let nf = n as f64;
    let l = bandwidth.unwrap_or_else(|| (4.0 * (nf / 100.0).powf(0.25)).floor() as usize);
    if l >= n {
        return Err(Error::invalid(format!(
            "KPSS bandwidth {l} too large for {n} observations"
        )));
    }
    let mean = x.iter().sum::<f64>() / nf;
    let e: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let gamma = |j: usize| e[j..].iter().zip(&e).map(|(a, b)| a * b).sum::<f64>() / nf;
    let mut lrv = gamma(0);
    for j in 1..=l {
        lrv += 2.0 * (1.0 - j as f64 / (l as f64 + 1.0)) * gamma(j);
    }
    let stat = if lrv <= 0.0 {
        0.0
    } else {
        let mut s = 0.0;
        let mut num = 0.0;
        for v in &e {
            s += v;
            num += s * s;
        }
        num / (nf * nf * lrv)
    };
    Ok(KpssResult {
        stat,
        critical_5pct: KPSS_CRITICAL_5PCT,
        bandwidth: l,
        stationary: stat <= KPSS_CRITICAL_5PCT,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationarityConfig {
    pub max_diff: usize,
    pub adf_lag: AdfLag,
    pub adf_deterministic: Deterministic,
    /// `None` selects the automatic bandwidth.
    pub kpss_bandwidth: Option<usize>,
}

impl Default for StationarityConfig {
    fn default() -> Self {
        StationarityConfig {
            max_diff: 2,
            adf_lag: AdfLag::Auto,
            adf_deterministic: Deterministic::Constant,
            kpss_bandwidth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stationarized {
    pub series: TimeSeries,
    pub differences: usize,
    pub adf: AdfResult,
    pub kpss: KpssResult,
}

/// Outcome of both tests at difference order `d`; `None` when the ADF
/// regression is degenerate.
pub fn test_order(
    ts: &TimeSeries,
    d: usize,
    cfg: &StationarityConfig,
) -> Result<Option<Stationarized>> {
    let series = if d == 0 {
        ts.clone()
    } else {
        difference(ts, d)?
    };
    let adf = match adf_test(&series, cfg.adf_lag, cfg.adf_deterministic) {
        Ok(a) => a,
        Err(Error::Singular(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let kpss = kpss_test(&series, cfg.kpss_bandwidth)?;
    Ok(Some(Stationarized {
        series,
        differences: d,
        adf,
        kpss,
    }))
}

/// Smallest `d <= max_diff` whose `d`-th difference is judged stationary by
/// both tests (ADF rejects a unit root, KPSS does not reject stationarity).
pub fn stationarize(
    ts: &TimeSeries,
    cfg: &StationarityConfig,
    name: &str,
) -> Result<Stationarized> {
    if ts.len() < MIN_TEST_LENGTH + cfg.max_diff {
        return Err(Error::invalid(format!(
            "series {name:?} has {} observations, need {}",
            ts.len(),
            MIN_TEST_LENGTH + cfg.max_diff
        )));
    }
    for d in 0..=cfg.max_diff {
        if let Some(s) = test_order(ts, d, cfg)? {
            if s.adf.stationary && s.kpss.stationary {
                return Ok(s);
            }
        }
    }
    Err(Error::NotStationarizable {
        name: name.to_string(),
        max_diff: cfg.max_diff,
    })
}
