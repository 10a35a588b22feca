//! Ecosystem metrics over a [`DomainGraph`].
//!
//! "Connections" here always means distinct domains, never raw hyperlink
//! counts, except for [`top_linked`] (summed unique URL pairs) and the trend
//! series (dated link records).

mod ranktests;
mod trend;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use ranktests::{bonferroni, mann_whitney_u, mann_whitney_u_normal, MannWhitney, PValueMethod};
pub use trend::{
    conspiracy_oriented_pct_series, targeted_pct_series, Granularity, TrendMode, TrendPoint,
};

use crate::graph::{Category, DomainGraph, Group};
use crate::{par, Error, Result};

/// Default minimum number of distinct out-domains for similarity metrics.
pub const DEFAULT_MIN_CONNECTIONS: usize = 100;

pub fn out_domains<'g>(g: &'g DomainGraph, domain: &str) -> BTreeSet<&'g str> {
    g.out_neighbors(domain).collect()
}

/// Union of the out-domains of every member of `group`.
pub fn group_out_domains<'g>(g: &'g DomainGraph, group: &Group) -> BTreeSet<&'g str> {
    g.members(group).flat_map(|d| g.out_neighbors(d)).collect()
}

/// Distinct labeled source domains linking to `domain`, per category.
/// Every labeled category not in `exclude` is present, zero-filled.
pub fn in_sources_by_category(
    g: &DomainGraph,
    domain: &str,
    exclude: &[Category],
) -> BTreeMap<Category, usize> {
    let mut counts: BTreeMap<Category, usize> = Category::LABELED
        .iter()
        .filter(|c| !exclude.contains(c))
        .map(|c| (*c, 0))
        .collect();
    for src in g.in_neighbors(domain) {
        if let Some(n) = counts.get_mut(&g.label(src).category()) {
            *n += 1;
        }
    }
    counts
}

/// Percentage of `a`'s out-domains that `b` also links to. With
/// `exclude_members`, member domains of both groups are removed from both
/// out-sets first.
pub fn shared_outlink_pct(
    g: &DomainGraph,
    a: &Group,
    b: &Group,
    exclude_members: bool,
) -> Result<f64> {
    let mut out_a = group_out_domains(g, a);
    let mut out_b = group_out_domains(g, b);
    if exclude_members {
        let members: BTreeSet<&str> = g.members(a).chain(g.members(b)).collect();
        out_a.retain(|d| !members.contains(d));
        out_b.retain(|d| !members.contains(d));
    }
    if out_a.is_empty() {
        return Err(Error::UndefinedMetric(format!(
            "group {} has no out-domains",
            a.name()
        )));
    }
    let shared = out_a.intersection(&out_b).count();
    Ok(shared as f64 / out_a.len() as f64 * 100.0)
}

/// Outcome of an overlap-similarity query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Similarity {
    Value(f64),
    /// The domain has fewer distinct out-domains than required.
    BelowThreshold {
        connections: usize,
    },
}

impl Similarity {
    pub fn value(self) -> Option<f64> {
        match self {
            Similarity::Value(v) => Some(v),
            Similarity::BelowThreshold { .. } => None,
        }
    }
}

/// Fraction of `domain`'s out-domains that are also linked by any domain in
/// `reference`.
pub fn overlap_similarity<S: AsRef<str>>(
    g: &DomainGraph,
    domain: &str,
    reference: &[S],
    min_connections: usize,
) -> Similarity {
    let union: BTreeSet<&str> = reference
        .iter()
        .flat_map(|r| g.out_neighbors(r.as_ref()))
        .collect();
    overlap_with(g, domain, &union, min_connections)
}

fn overlap_with(
    g: &DomainGraph,
    domain: &str,
    union: &BTreeSet<&str>,
    min_connections: usize,
) -> Similarity {
    let connections = g.out_degree(domain);
    if connections < min_connections.max(1) {
        return Similarity::BelowThreshold { connections };
    }
    let shared = g
        .out_neighbors(domain)
        .filter(|d| union.contains(d))
        .count();
    Similarity::Value(shared as f64 / connections as f64)
}

/// Non-seed domains ranked by overlap similarity with the seed set
/// (descending, ties lexicographic). Domains below `min_connections` are
/// skipped. At most `k` entries are returned.
pub fn discover_candidates<S: AsRef<str>>(
    g: &DomainGraph,
    seeds: &[S],
    k: usize,
    min_connections: usize,
) -> Vec<(String, f64)> {
    if k == 0 {
        return Vec::new();
    }
    let seed_set: BTreeSet<&str> = seeds.iter().map(AsRef::as_ref).collect();
    let union: BTreeSet<&str> = seed_set.iter().flat_map(|s| g.out_neighbors(s)).collect();
    let candidates: Vec<&str> = g
        .nodes()
        .map(|(d, _)| d)
        .filter(|d| !seed_set.contains(d))
        .collect();
    let scored = par::map_slice(&candidates, |d| {
        overlap_with(g, d, &union, min_connections).value()
    });
    let mut ranked: Vec<(String, f64)> = candidates
        .iter()
        .zip(scored)
        .filter_map(|(d, s)| s.map(|v| (d.to_string(), v)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

/// A domain is conspiracy-oriented when strictly more distinct conspiracy
/// domains link to it than authentic-news domains, and also strictly more
/// than non-news domains. Misinformation sources are ignored.
pub fn conspiracy_oriented(g: &DomainGraph, domain: &str) -> bool {
    let c = in_sources_by_category(g, domain, &[Category::Misinformation]);
    let conspiracy = c[&Category::Conspiracy];
    conspiracy > c[&Category::Authentic] && conspiracy > c[&Category::NonNews]
}

/// All conspiracy-oriented nodes.
pub fn conspiracy_oriented_set(g: &DomainGraph) -> BTreeSet<&str> {
    let names: Vec<&str> = g.nodes().map(|(d, _)| d).collect();
    let flags = par::map_slice(&names, |d| conspiracy_oriented(g, d));
    names
        .into_iter()
        .zip(flags)
        .filter(|(_, f)| *f)
        .map(|(d, _)| d)
        .collect()
}

/// One row of `oriented.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationRow {
    pub domain: String,
    pub category: String,
    pub conspiracy_sources: usize,
    pub authentic_sources: usize,
    pub nonnews_sources: usize,
    pub oriented: bool,
    pub out_domains: usize,
    /// Percentage of distinct out-domains that are conspiracy-oriented.
    pub oriented_out_pct: f64,
}

pub fn orientation_table(g: &DomainGraph) -> Vec<OrientationRow> {
    let oriented = conspiracy_oriented_set(g);
    g.nodes()
        .map(|(d, l)| {
            let c = in_sources_by_category(g, d, &[Category::Misinformation]);
            let out = g.out_degree(d);
            let hits = g.out_neighbors(d).filter(|t| oriented.contains(t)).count();
            OrientationRow {
                domain: d.to_string(),
                category: l.category().to_string(),
                conspiracy_sources: c[&Category::Conspiracy],
                authentic_sources: c[&Category::Authentic],
                nonnews_sources: c[&Category::NonNews],
                oriented: oriented.contains(d),
                out_domains: out,
                oriented_out_pct: if out == 0 {
                    0.0
                } else {
                    hits as f64 / out as f64 * 100.0
                },
            }
        })
        .collect()
}

/// Domains of `to` ranked by unique URL pairs received from members of
/// `from` (descending, ties lexicographic). Zero rows are omitted.
pub fn top_linked(g: &DomainGraph, from: &Group, to: &Group, k: usize) -> Vec<(String, usize)> {
    let sources: BTreeSet<&str> = g.members(from).collect();
    let mut rows: Vec<(String, usize)> = g
        .members(to)
        .filter_map(|t| {
            let total: usize = g
                .in_neighbors(t)
                .filter(|s| sources.contains(s))
                .filter_map(|s| g.edge(s, t))
                .map(|e| e.unique_url_pairs)
                .sum();
            (total > 0).then(|| (t.to_string(), total))
        })
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(k);
    rows
}
