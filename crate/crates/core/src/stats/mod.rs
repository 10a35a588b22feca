//! Time series and the scalar statistical toolkit.

use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod popularity;
mod stationarity;

pub use popularity::{
    dcg, dcg_series, median_rank_series, mention_series, RankTable, DEFAULT_DCG_FLOOR,
    DEFAULT_RANK_WINDOW,
};
pub use stationarity::{
    adf_critical_5pct, adf_test, kpss_test, stationarize, AdfLag, AdfResult, Deterministic,
    KpssResult, StationarityConfig, Stationarized, KPSS_CRITICAL_5PCT,
};

/// Dated real values with strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TimeSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} dates for {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "dates not strictly increasing at {}",
                w[1]
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value {v}")));
        }
        Ok(TimeSeries { dates, values })
    }

    /// Consecutive daily dates starting at `start`.
    pub fn daily(start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let dates = start.iter_days().take(values.len()).collect();
        Self::new(dates, values)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    pub fn value_at(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.values[i])
    }

    /// Restricts to the given dates (which must be a subset, in order).
    pub fn select(&self, dates: &[NaiveDate]) -> Result<Self> {
        let values = dates
            .iter()
            .map(|d| {
                self.value_at(*d)
                    .ok_or_else(|| Error::invalid(format!("date {d} not in series")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dates.to_vec(), values)
    }

    /// Drops the first `k` observations.
    pub fn skip(&self, k: usize) -> Self {
        let k = k.min(self.len());
        TimeSeries {
            dates: self.dates[k..].to_vec(),
            values: self.values[k..].to_vec(),
        }
    }

    /// `series.csv`: `date,value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["date", "value"])?;
        for (d, v) in self.iter() {
            out.write_record([d.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            date: NaiveDate,
            value: f64,
        }
        let mut rows = Vec::new();
        for row in csv::Reader::from_reader(r).deserialize() {
            let row: Row = row?;
            rows.push((row.date, row.value));
        }
        rows.sort_by_key(|r| r.0);
        let (dates, values) = rows.into_iter().unzip();
        Self::new(dates, values)
    }
}

/// `order`-th difference; each pass drops the earliest date.
pub fn difference(ts: &TimeSeries, order: usize) -> Result<TimeSeries> {
    if order == 0 {
        return Err(Error::invalid("difference order must be at least 1"));
    }
    if ts.len() <= order {
        return Err(Error::invalid(format!(
            "series of length {} too short for difference order {order}",
            ts.len()
        )));
    }
    let mut values = ts.values.clone();
    for _ in 0..order {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(TimeSeries {
        dates: ts.dates[order..].to_vec(),
        values,
    })
}

/// Inverse of a first difference: cumulative sum anchored at `(date0, x0)`.
pub fn integrate(diffed: &TimeSeries, date0: NaiveDate, x0: f64) -> Result<TimeSeries> {
    let mut dates = Vec::with_capacity(diffed.len() + 1);
    let mut values = Vec::with_capacity(diffed.len() + 1);
    dates.push(date0);
    values.push(x0);
    let mut acc = x0;
    for (d, v) in diffed.iter() {
        acc += v;
        dates.push(d);
        values.push(acc);
    }
    TimeSeries::new(dates, values)
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid(
            "pearson needs two equal-length samples of size >= 2",
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedMetric(
            "pearson correlation with zero variance".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Durbin-Watson bounds outside which serial correlation is flagged.
pub const DW_LOWER: f64 = 1.5;
pub const DW_UPPER: f64 = 2.5;

/// `sum (e_t - e_{t-1})^2 / sum e_t^2`.
pub fn durbin_watson(resid: &[f64]) -> Result<f64> {
    if resid.len() < 2 {
        return Err(Error::invalid("durbin-watson needs at least 2 residuals"));
    }
    let den: f64 = resid.iter().map(|e| e * e).sum();
    if den == 0.0 {
        return Err(Error::UndefinedMetric(
            "durbin-watson of all-zero residuals".into(),
        ));
    }
    let num: f64 = resid.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(num / den)
}

pub fn serial_correlation_suspected(dw: f64) -> bool {
    !(DW_LOWER..=DW_UPPER).contains(&dw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn d0() -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap()
    }

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::daily(d0(), v.to_vec()).unwrap()
    }

    #[test]
    fn construction_checks() {
        let d = d0();
        assert!(TimeSeries::new(vec![d, d], vec![1.0, 2.0]).is_err());
        assert!(TimeSeries::new(vec![d], vec![f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![d], vec![]).is_err());
    }

    #[test]
    fn difference_examples() {
        let x = ts(&[1.0, 2.0, 4.0, 7.0]);
        let d1 = difference(&x, 1).unwrap();
        assert_eq!(d1.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(d1.dates()[0], d0().succ_opt().unwrap());
        assert_eq!(difference(&x, 2).unwrap().values(), &[1.0, 1.0]);
        assert!(difference(&ts(&[3.0; 5]), 1)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        assert!(difference(&x, 4).is_err());
        assert!(difference(&x, 0).is_err());
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 3.0).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-15);
        // sxy = 3, sxx = 2, syy = 14/3
        let expect = 3.0 / (2.0f64 * 14.0 / 3.0).sqrt();
        assert!((pearson(&x, &[1.0, 2.0, 4.0]).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.98198).abs() < 1e-5);
        assert!(pearson(&x, &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn durbin_watson_examples() {
        assert_eq!(durbin_watson(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(durbin_watson(&[1.0, -1.0, 1.0, -1.0]).unwrap(), 3.0);
        assert!(durbin_watson(&[0.0, 0.0]).is_err());
        assert!(serial_correlation_suspected(0.0) && !serial_correlation_suspected(2.0));
    }

    #[test]
    fn durbin_watson_white_noise() {
        let mut inside = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
            let dw = durbin_watson(&e).unwrap();
            if (1.8..=2.2).contains(&dw) {
                inside += 1;
            }
        }
        assert!(inside >= 19, "{inside}");
    }

    #[test]
    fn csv_round_trip() {
        let x = ts(&[1.5, -2.0, 3.25]);
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"date,value\n2020-01-01,1.5\n"));
        assert_eq!(TimeSeries::read_csv(&buf[..]).unwrap(), x);
    }

    proptest! {
        #[test]
        fn difference_integrate_round_trip(v in proptest::collection::vec(-1000i32..1000, 2..50)) {
            let x = ts(&v.iter().map(|&a| f64::from(a)).collect::<Vec<_>>());
            let back = integrate(&difference(&x, 1).unwrap(), x.dates()[0], x.values()[0]).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn pearson_affine(v in proptest::collection::vec(-100.0f64..100.0, 3..30),
                          w in proptest::collection::vec(-100.0f64..100.0, 3..30),
                          a in 0.1f64..10.0, b in -50.0f64..50.0) {
            let n = v.len().min(w.len());
            let (x, y) = (&v[..n], &w[..n]);
            if let Ok(r) = pearson(x, y) {
                let xt: Vec<f64> = x.iter().map(|t| a * t + b).collect();
                let neg: Vec<f64> = y.iter().map(|t| -t).collect();
                prop_assert!((pearson(&xt, y).unwrap() - r).abs() < 1e-9);
                prop_assert!((pearson(x, &neg).unwrap() + r).abs() < 1e-12);
            }
        }

        #[test]
        fn durbin_watson_scale_free(v in proptest::collection::vec(-10.0f64..10.0, 2..40), c in 0.01f64..100.0, neg: bool) {
            let c = if neg { -c } else { c };
            if let Ok(dw) = durbin_watson(&v) {
                let scaled: Vec<f64> = v.iter().map(|e| c * e).collect();
                let dw2 = durbin_watson(&scaled).unwrap();
                prop_assert!((dw - dw2).abs() < 1e-9 * dw.max(1.0));
                prop_assert!((0.0..=4.0 + 1e-12).contains(&dw));
            }
        }
    }
}
