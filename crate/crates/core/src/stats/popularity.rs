//! Popularity-rank series (median rank, DCG) and keyword mention counts.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::Deserialize;

use super::TimeSeries;
use crate::ingest::{canonical_host, DomainMode, HtmlPage, PageRecord};
use crate::{par, Error, Result};

/// Rank assumed for unranked group members in DCG.
pub const DEFAULT_DCG_FLOOR: u32 = 1_000_000;
pub const DEFAULT_RANK_WINDOW: usize = 30;

/// Daily popularity ranks, 1 = most popular.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankTable {
    by_date: BTreeMap<NaiveDate, BTreeMap<String, u32>>,
}

impl RankTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, date: NaiveDate, domain: &str, rank: u32) -> Result<()> {
        if rank == 0 {
            return Err(Error::invalid(format!(
                "rank of {domain} on {date} must be >= 1"
            )));
        }
        self.by_date
            .entry(date)
            .or_default()
            .insert(canonical_host(domain, DomainMode::MultiLabel), rank);
        Ok(())
    }

    pub fn get(&self, date: NaiveDate, domain: &str) -> Option<u32> {
        self.by_date.get(&date)?.get(domain).copied()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.by_date.keys().copied()
    }

    pub fn on(&self, date: NaiveDate) -> Option<&BTreeMap<String, u32>> {
        self.by_date.get(&date)
    }

    pub fn len(&self) -> usize {
        self.by_date.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_date.is_empty()
    }

    /// Keeps only dates in `[from, to]`.
    pub fn restrict(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> RankTable {
        RankTable {
            by_date: self
                .by_date
                .iter()
                .filter(|(d, _)| from.is_none_or(|f| **d >= f) && to.is_none_or(|t| **d <= t))
                .map(|(d, m)| (*d, m.clone()))
                .collect(),
        }
    }

    /// `ranks.csv`: `date,domain,rank`.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            date: NaiveDate,
            domain: String,
            rank: u32,
        }
        let mut t = RankTable::new();
        for (i, row) in csv::Reader::from_reader(r).deserialize().enumerate() {
            let row: Row =
                row.map_err(|e| Error::malformed(format!("ranks row {}", i + 2), e.to_string()))?;
            t.insert(row.date, &row.domain, row.rank)
                .map_err(|e| Error::malformed(format!("ranks row {}", i + 2), e.to_string()))?;
        }
        Ok(t)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["date", "domain", "rank"])?;
        for (d, m) in &self.by_date {
            for (dom, r) in m {
                out.write_record([d.to_string(), dom.clone(), r.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Trailing mean over `window` consecutive observations; the first
/// `window - 1` observations have no full window and are dropped.
pub fn trailing_mean(ts: &TimeSeries, window: usize) -> Result<TimeSeries> {
    if window == 0 {
        return Err(Error::invalid("moving-average window must be >= 1"));
    }
    let v = ts.values();
    if v.len() < window {
        return Ok(TimeSeries::default());
    }
    let values = v
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    TimeSeries::new(ts.dates()[window - 1..].to_vec(), values)
}

/// Per-date median rank over group members ranked that date, smoothed by a
/// trailing moving average. Dates where no member is ranked are skipped.
pub fn median_rank_series(
    ranks: &RankTable,
    group: &BTreeSet<String>,
    window: usize,
) -> Result<TimeSeries> {
    if window == 0 {
        return Err(Error::invalid("moving-average window must be >= 1"));
    }
    let mut dates = Vec::new();
    let mut values = Vec::new();
    for (d, m) in &ranks.by_date {
        let mut present: Vec<f64> = group
            .iter()
            .filter_map(|g| m.get(g))
            .map(|&r| f64::from(r))
            .collect();
        if !present.is_empty() {
            dates.push(*d);
            values.push(median(&mut present));
        }
    }
    trailing_mean(&TimeSeries::new(dates, values)?, window)
}

/// `sum over members of 1 / log2(rank + 1)`, with unranked members at `floor`.
pub fn dcg(
    ranks_on_date: Option<&BTreeMap<String, u32>>,
    group: &BTreeSet<String>,
    floor: u32,
) -> Result<f64> {
    if group.is_empty() {
        return Err(Error::invalid("DCG group must be non-empty"));
    }
    Ok(group
        .iter()
        .map(|g| {
            let r = ranks_on_date
                .and_then(|m| m.get(g))
                .copied()
                .unwrap_or(floor);
            1.0 / (f64::from(r) + 1.0).log2()
        })
        .sum())
}

/// DCG of the group on every date present in the table.
pub fn dcg_series(ranks: &RankTable, group: &BTreeSet<String>, floor: u32) -> Result<TimeSeries> {
    let mut dates = Vec::new();
    let mut values = Vec::new();
    for (d, m) in &ranks.by_date {
        dates.push(*d);
        values.push(dcg(Some(m), group, floor)?);
    }
    TimeSeries::new(dates, values)
}

/// Daily count over `[from, to]` of dated pages whose visible text contains
/// `keyword` (case-insensitive). Each page counts at most once.
pub fn mention_series(
    pages: &[PageRecord],
    keyword: &str,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<TimeSeries> {
    if keyword.trim().is_empty() {
        return Err(Error::invalid("mention keyword must be non-empty"));
    }
    if from > to {
        return Err(Error::invalid(format!("empty date range {from}..{to}")));
    }
    let needle = keyword.to_lowercase();
    let hits = par::map_slice(pages, |p| {
        let date = p.publication_date.filter(|d| *d >= from && *d <= to)?;
        let text = HtmlPage::parse(&p.body)?.visible_text().to_lowercase();
        text.contains(&needle).then_some(date)
    });
    let mut counts: BTreeMap<NaiveDate, u32> = from
        .iter_days()
        .take_while(|d| *d <= to)
        .map(|d| (d, 0))
        .collect();
    for d in hits.into_iter().flatten() {
        *counts.get_mut(&d).expect("date within range") += 1;
    }
    let (dates, values) = counts.into_iter().map(|(d, c)| (d, f64::from(c))).unzip();
    TimeSeries::new(dates, values)
}
