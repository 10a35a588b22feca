//! Per-period share of hyperlinks that point at a target set.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use super::conspiracy_oriented_set;
use crate::graph::{DomainGraph, Group};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Granularity {
    Year,
    Month,
    Day,
}

impl Granularity {
    pub fn period_start(self, d: NaiveDate) -> NaiveDate {
        match self {
            Granularity::Year => NaiveDate::from_ymd_opt(d.year(), 1, 1).expect("valid"),
            Granularity::Month => NaiveDate::from_ymd_opt(d.year(), d.month(), 1).expect("valid"),
            Granularity::Day => d,
        }
    }

    pub fn label(self, start: NaiveDate) -> String {
        match self {
            Granularity::Year => start.format("%Y").to_string(),
            Granularity::Month => start.format("%Y-%m").to_string(),
            Granularity::Day => start.format("%Y-%m-%d").to_string(),
        }
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "year" | "yearly" => Ok(Granularity::Year),
            "month" | "monthly" => Ok(Granularity::Month),
            "day" | "daily" => Ok(Granularity::Day),
            other => Err(Error::invalid(format!("unknown granularity {other:?}"))),
        }
    }
}

/// How per-source shares are combined within a period.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum TrendMode {
    /// Mean over sources of each source's own percentage.
    #[default]
    PerSource,
    /// Percentage over all the group's dated links pooled together.
    Pooled,
}

impl FromStr for TrendMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "persource" => Ok(TrendMode::PerSource),
            "pooled" => Ok(TrendMode::Pooled),
            other => Err(Error::invalid(format!("unknown trend mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendPoint {
    /// First day of the period.
    #[serde(skip)]
    pub start: NaiveDate,
    pub period: String,
    pub value: f64,
    /// Sources with at least one dated link in the period.
    pub n_sources: usize,
}

/// Percentage of dated link records from `sources` members that land in
/// `targets`, per period. Periods without any dated link are omitted.
pub fn targeted_pct_series(
    g: &DomainGraph,
    sources: &Group,
    targets: &BTreeSet<&str>,
    granularity: Granularity,
    mode: TrendMode,
) -> Vec<TrendPoint> {
    // period -> source -> (hits, total)
    let mut acc: BTreeMap<NaiveDate, BTreeMap<&str, (u64, u64)>> = BTreeMap::new();
    for s in g.members(sources) {
        for t in g.out_neighbors(s) {
            let Some(edge) = g.edge(s, t) else { continue };
            let hit = targets.contains(t);
            for (d, c) in &edge.daily_counts {
                let cell = acc
                    .entry(granularity.period_start(*d))
                    .or_default()
                    .entry(s)
                    .or_default();
                cell.1 += c;
                if hit {
                    cell.0 += c;
                }
            }
        }
    }
    acc.into_iter()
        .map(|(start, per_source)| {
            let n_sources = per_source.len();
            let value = match mode {
                TrendMode::PerSource => {
                    per_source
                        .values()
                        .map(|(h, t)| *h as f64 / *t as f64 * 100.0)
                        .sum::<f64>()
                        / n_sources as f64
                }
                TrendMode::Pooled => {
                    let (h, t) = per_source
                        .values()
                        .fold((0u64, 0u64), |(ah, at), (h, t)| (ah + h, at + t));
                    h as f64 / t as f64 * 100.0
                }
            };
            TrendPoint {
                start,
                period: granularity.label(start),
                value,
                n_sources,
            }
        })
        .collect()
}

/// Share of the group's dated links pointing at conspiracy-oriented domains.
/// Orientation is decided once on the whole graph.
pub fn conspiracy_oriented_pct_series(
    g: &DomainGraph,
    sources: &Group,
    granularity: Granularity,
    mode: TrendMode,
) -> Vec<TrendPoint> {
    let oriented = conspiracy_oriented_set(g);
    targeted_pct_series(g, sources, &oriented, granularity, mode)
}
