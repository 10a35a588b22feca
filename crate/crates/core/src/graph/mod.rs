//! The domain-level hyperlink graph.
//!
//! Each edge remembers its distinct `(source_url, target_url)` pairs together
//! with per-date record counts, so unique-URL weights, date histograms and
//! date-windowed subgraphs can all be derived exactly from one structure.

mod io;
mod labels;

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;

pub use io::{
    read_snapshot, write_edge_dates_csv, write_edges_csv, write_nodes_csv, write_snapshot,
};
pub use labels::{Category, CategoryLabel, Group, LabelTable, Subcategory};

use crate::ingest::LinkRecord;
use crate::{Error, Result};

/// Aggregates of one directed domain edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeStats {
    /// Distinct `(source_url, target_url)` pairs.
    pub unique_url_pairs: usize,
    /// Number of link records per publication date.
    pub daily_counts: BTreeMap<NaiveDate, u64>,
    /// Number of link records without a publication date.
    pub undated: u64,
}

impl EdgeStats {
    pub fn dated_records(&self) -> u64 {
        self.daily_counts.values().sum()
    }

    pub fn dated_records_in(&self, from: NaiveDate, to: NaiveDate) -> u64 {
        self.daily_counts.range(from..=to).map(|(_, c)| c).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct PairCounts {
    dated: BTreeMap<NaiveDate, u64>,
    undated: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Edge {
    pairs: BTreeMap<(String, String), PairCounts>,
    stats: EdgeStats,
}

impl Edge {
    fn add(&mut self, source_url: &str, target_url: &str, date: Option<NaiveDate>, count: u64) {
        let key = (source_url.to_string(), target_url.to_string());
        let pair = self.pairs.entry(key).or_default();
        match date {
            Some(d) => {
                *pair.dated.entry(d).or_default() += count;
                *self.stats.daily_counts.entry(d).or_default() += count;
            }
            None => {
                pair.undated += count;
                self.stats.undated += count;
            }
        }
        self.stats.unique_url_pairs = self.pairs.len();
    }
}

/// Weighted, dated, category-labeled directed graph of registered domains.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainGraph {
    nodes: BTreeMap<String, CategoryLabel>,
    edges: BTreeMap<(String, String), Edge>,
    out_adj: BTreeMap<String, BTreeSet<String>>,
    in_adj: BTreeMap<String, BTreeSet<String>>,
}

impl DomainGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from link records. Every labeled domain becomes a node
    /// even without edges; record domains missing from `labels` are
    /// [`Category::Unlabeled`]. The result does not depend on record order.
    pub fn build<'a>(
        records: impl IntoIterator<Item = &'a LinkRecord>,
        labels: &LabelTable,
    ) -> Self {
        let mut g = DomainGraph::new();
        for (d, l) in labels.iter() {
            g.nodes.insert(d.to_string(), l);
        }
        for r in records {
            g.add_record(r, labels);
        }
        g
    }

    fn ensure_node(&mut self, domain: &str, labels: &LabelTable) {
        if !self.nodes.contains_key(domain) {
            self.nodes.insert(domain.to_string(), labels.get(domain));
        }
    }

    /// Adds one record; self links are ignored and reported as `false`.
    pub fn add_record(&mut self, r: &LinkRecord, labels: &LabelTable) -> bool {
        if r.source_domain == r.target_domain {
            return false;
        }
        self.ensure_node(&r.source_domain, labels);
        self.ensure_node(&r.target_domain, labels);
        self.edge_entry(&r.source_domain, &r.target_domain).add(
            &r.source_url,
            &r.target_url,
            r.pub_date,
            1,
        );
        true
    }

    fn edge_entry(&mut self, s: &str, t: &str) -> &mut Edge {
        self.out_adj
            .entry(s.to_string())
            .or_default()
            .insert(t.to_string());
        self.in_adj
            .entry(t.to_string())
            .or_default()
            .insert(s.to_string());
        self.edges
            .entry((s.to_string(), t.to_string()))
            .or_default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, domain: &str) -> bool {
        self.nodes.contains_key(domain)
    }

    pub fn label(&self, domain: &str) -> CategoryLabel {
        self.nodes.get(domain).copied().unwrap_or_default()
    }

    /// Nodes in lexicographic order.
    pub fn nodes(&self) -> impl Iterator<Item = (&str, CategoryLabel)> {
        self.nodes.iter().map(|(d, l)| (d.as_str(), *l))
    }

    /// Edges ordered by `(source, target)`.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, &EdgeStats)> {
        self.edges
            .iter()
            .map(|((s, t), e)| (s.as_str(), t.as_str(), &e.stats))
    }

    pub fn edge(&self, source: &str, target: &str) -> Option<&EdgeStats> {
        self.edges
            .get(&(source.to_string(), target.to_string()))
            .map(|e| &e.stats)
    }

    /// Distinct target domains of `domain`, empty for unknown domains.
    pub fn out_neighbors(&self, domain: &str) -> impl Iterator<Item = &str> {
        self.out_adj
            .get(domain)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn out_degree(&self, domain: &str) -> usize {
        self.out_adj.get(domain).map_or(0, BTreeSet::len)
    }

    /// Distinct source domains linking to `domain`.
    pub fn in_neighbors(&self, domain: &str) -> impl Iterator<Item = &str> {
        self.in_adj
            .get(domain)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// Nodes belonging to `group`.
    pub fn members<'a>(&'a self, group: &'a Group) -> impl Iterator<Item = &'a str> + 'a {
        self.nodes()
            .filter(move |(d, l)| group.contains(d, *l))
            .map(|(d, _)| d)
    }

    /// Union of two graphs; pair counts add up.
    pub fn merge(&self, other: &DomainGraph) -> DomainGraph {
        let mut g = self.clone();
        for (d, l) in &other.nodes {
            g.nodes.entry(d.clone()).or_insert(*l);
        }
        for ((s, t), e) in &other.edges {
            let edge = g.edge_entry(s, t);
            for ((su, tu), pc) in &e.pairs {
                for (d, c) in &pc.dated {
                    edge.add(su, tu, Some(*d), *c);
                }
                if pc.undated > 0 {
                    edge.add(su, tu, None, pc.undated);
                }
            }
        }
        g
    }

    /// Subgraph of records dated within `[from, to]`. Undated records are
    /// dropped; the node set is unchanged.
    pub fn window(&self, from: NaiveDate, to: NaiveDate) -> Result<DomainGraph> {
        if from > to {
            return Err(Error::invalid(format!(
                "window start {from} is after end {to}"
            )));
        }
        let mut g = DomainGraph {
            nodes: self.nodes.clone(),
            ..Default::default()
        };
        for ((s, t), e) in &self.edges {
            let mut kept = Edge::default();
            for ((su, tu), pc) in &e.pairs {
                for (d, c) in pc.dated.range(from..=to) {
                    kept.add(su, tu, Some(*d), *c);
                }
            }
            if !kept.pairs.is_empty() {
                *g.edge_entry(s, t) = kept;
            }
        }
        Ok(g)
    }

    /// Dense index of the node set for array-based algorithms.
    pub fn index(&self) -> GraphIndex {
        let names: Vec<String> = self.nodes.keys().cloned().collect();
        let pos: BTreeMap<&str, u32> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        let mut out = vec![Vec::new(); names.len()];
        let mut inn = vec![Vec::new(); names.len()];
        for (s, t) in self.edges.keys() {
            let (si, ti) = (pos[s.as_str()], pos[t.as_str()]);
            out[si as usize].push(ti);
            inn[ti as usize].push(si);
        }
        GraphIndex { names, out, inn }
    }
}

/// Node names with integer adjacency lists, both in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphIndex {
    pub names: Vec<String>,
    pub out: Vec<Vec<u32>>,
    pub inn: Vec<Vec<u32>>,
}

impl GraphIndex {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut es: Vec<_> = edges.iter().copied().filter(|(s, t)| s != t).collect();
        es.sort_unstable();
        es.dedup();
        for (s, t) in es {
            out[s as usize].push(t);
            inn[t as usize].push(s);
        }
        GraphIndex {
            names: (0..n).map(|i| format!("n{i}")).collect(),
            out,
            inn,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(s: &str, t: &str, su: &str, tu: &str, d: Option<(i32, u32, u32)>) -> LinkRecord {
        LinkRecord {
            source_domain: s.into(),
            target_domain: t.into(),
            source_url: su.into(),
            target_url: tu.into(),
            pub_date: d.map(|(y, m, dd)| NaiveDate::from_ymd_opt(y, m, dd).unwrap()),
        }
    }

    fn day(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn duplicate_pairs_count_once() {
        let r = rec(
            "a.com",
            "b.com",
            "http://a.com/1",
            "http://b.com/",
            Some((2020, 1, 1)),
        );
        let g = DomainGraph::build([&r, &r], &LabelTable::default());
        let e = g.edge("a.com", "b.com").unwrap();
        assert_eq!(e.unique_url_pairs, 1);
        assert_eq!(e.daily_counts[&day(2020, 1, 1)], 2);
        assert_eq!(g.label("a.com"), CategoryLabel::UNLABELED);
    }

    #[test]
    fn empty_input() {
        let g = DomainGraph::build(&[], &LabelTable::default());
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn five_record_fixture() {
        let recs = [
            rec(
                "a.com",
                "b.com",
                "http://a.com/1",
                "http://b.com/x",
                Some((2020, 1, 1)),
            ),
            rec(
                "a.com",
                "b.com",
                "http://a.com/2",
                "http://b.com/x",
                Some((2020, 1, 1)),
            ),
            rec("a.com", "b.com", "http://a.com/1", "http://b.com/x", None),
            rec(
                "b.com",
                "c.com",
                "http://b.com/x",
                "http://c.com/",
                Some((2020, 2, 3)),
            ),
            rec("c.com", "c.com", "http://c.com/", "http://c.com/z", None),
        ];
        let g = DomainGraph::build(&recs, &LabelTable::default());
        // hand oracle: a->b has pairs {(a/1,b/x),(a/2,b/x)}, records 2 dated on 01-01 and 1 undated
        assert_eq!(g.edge_count(), 2);
        let ab = g.edge("a.com", "b.com").unwrap();
        assert_eq!(ab.unique_url_pairs, 2);
        assert_eq!(ab.daily_counts, BTreeMap::from([(day(2020, 1, 1), 2)]));
        assert_eq!(ab.undated, 1);
        let bc = g.edge("b.com", "c.com").unwrap();
        assert_eq!((bc.unique_url_pairs, bc.undated), (1, 0));
        assert!(g.edge("c.com", "c.com").is_none());
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn window_behaviour() {
        let recs = [
            rec("a.com", "b.com", "u1", "v1", Some((2020, 1, 15))),
            rec("a.com", "b.com", "u2", "v1", Some((2020, 2, 15))),
            rec("a.com", "c.com", "u1", "w", Some((2020, 2, 1))),
            rec("b.com", "c.com", "u3", "w", None),
        ];
        let g = DomainGraph::build(&recs, &LabelTable::default());
        assert!(g.window(day(2020, 2, 1), day(2020, 1, 1)).is_err());

        let before = g.window(day(2000, 1, 1), day(2019, 12, 31)).unwrap();
        assert_eq!(before.edge_count(), 0);
        assert_eq!(before.node_count(), g.node_count());

        let full = g.window(day(1995, 1, 1), day(2030, 1, 1)).unwrap();
        let dated: Vec<&LinkRecord> = recs.iter().filter(|r| r.pub_date.is_some()).collect();
        let mut expect = DomainGraph::build(dated, &LabelTable::default());
        expect.nodes = g.nodes.clone();
        assert_eq!(full, expect);

        // monthly windows, hand oracle: Jan -> {a->b}, Feb -> {a->b, a->c}
        let jan = g.window(day(2020, 1, 1), day(2020, 1, 31)).unwrap();
        let feb = g.window(day(2020, 2, 1), day(2020, 2, 29)).unwrap();
        assert_eq!((jan.edge_count(), feb.edge_count()), (1, 2));
        assert_eq!(feb.edge("a.com", "b.com").unwrap().unique_url_pairs, 1);
    }

    #[test]
    fn group_members() {
        let mut labels = LabelTable::default();
        labels.insert("q.com", CategoryLabel::conspiracy(Subcategory::QAnon));
        labels.insert("c.com", CategoryLabel::conspiracy(Subcategory::Covid));
        labels.insert("n.com", CategoryLabel::plain(Category::Authentic));
        let g = DomainGraph::build(&[], &labels);
        let all: Vec<_> = g.members(&Group::Category(Category::Conspiracy)).collect();
        assert_eq!(all, vec!["c.com", "q.com"]);
        let q: Vec<_> = g.members(&Group::Subcategory(Subcategory::QAnon)).collect();
        assert_eq!(q, vec!["q.com"]);
    }

    fn arb_records() -> impl Strategy<Value = Vec<LinkRecord>> {
        let dom = prop::sample::select(vec!["a.com", "b.com", "c.com", "d.com"]);
        let url = prop::sample::select(vec!["/1", "/2", "/3"]);
        prop::collection::vec(
            (
                dom.clone(),
                dom,
                url.clone(),
                url,
                proptest::option::of(0u32..60),
            ),
            0..40,
        )
        .prop_map(|v| {
            v.into_iter()
                .filter(|(s, t, ..)| s != t)
                .map(|(s, t, su, tu, d)| LinkRecord {
                    source_domain: s.into(),
                    target_domain: t.into(),
                    source_url: format!("http://{s}{su}"),
                    target_url: format!("http://{t}{tu}"),
                    pub_date: d.map(|o| day(2020, 1, 1) + chrono::Days::new(o as u64)),
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn build_is_order_independent(recs in arb_records(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = recs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let labels = LabelTable::default();
            prop_assert_eq!(DomainGraph::build(&recs, &labels), DomainGraph::build(&shuffled, &labels));
        }

        #[test]
        fn build_of_union_is_merge(recs in arb_records(), split in 0usize..40) {
            let labels = LabelTable::default();
            let split = split.min(recs.len());
            let (a, b) = recs.split_at(split);
            let whole = DomainGraph::build(&recs, &labels);
            let ga = DomainGraph::build(a, &labels);
            let gb = DomainGraph::build(b, &labels);
            prop_assert_eq!(&whole, &ga.merge(&gb));
            prop_assert_eq!(&whole, &gb.merge(&ga));
        }

        #[test]
        fn unique_pairs_match_brute_force(recs in arb_records()) {
            let g = DomainGraph::build(&recs, &LabelTable::default());
            for (s, t, stats) in g.edges() {
                let distinct: BTreeSet<(&str, &str)> = recs
                    .iter()
                    .filter(|r| r.source_domain == s && r.target_domain == t)
                    .map(|r| (r.source_url.as_str(), r.target_url.as_str()))
                    .collect();
                prop_assert_eq!(stats.unique_url_pairs, distinct.len());
                prop_assert!(stats.unique_url_pairs >= 1);
            }
        }

        #[test]
        fn window_counts_monotone(recs in arb_records(), a in 0u64..60, len in 0u64..30, grow in 0u64..30) {
            let g = DomainGraph::build(&recs, &LabelTable::default());
            let from = day(2020, 1, 1) + chrono::Days::new(a);
            let small = g.window(from, from + chrono::Days::new(len)).unwrap();
            let big = g.window(from - chrono::Days::new(grow), from + chrono::Days::new(len + grow)).unwrap();
            prop_assert!(small.edge_count() <= big.edge_count());
            for (s, t, st) in small.edges() {
                let bt = big.edge(s, t).unwrap();
                prop_assert!(st.unique_url_pairs <= bt.unique_url_pairs);
                prop_assert!(st.dated_records() <= bt.dated_records());
            }
        }
    }
}
