//! Harmonic centrality, PageRank and HITS over the unweighted domain graph,
//! plus z-score and percentile standardization.
//!
//! All algorithms run on a [`GraphIndex`]; an edge exists iff the domain
//! graph has at least one URL pair for it.

use std::collections::VecDeque;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::graph::{DomainGraph, GraphIndex};
use crate::{par, Error, Result};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_PAGERANK_TOL: f64 = 1e-10;
pub const DEFAULT_PAGERANK_MAX_ITER: usize = 10_000;
pub const DEFAULT_HITS_TOL: f64 = 1e-12;
pub const DEFAULT_HITS_MAX_ITER: usize = 1_000;

/// Which shortest paths count toward a node's harmonic score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Paths ending at the node: score accrues from nodes that reach it.
    #[default]
    Inbound,
    /// Paths starting at the node.
    Outbound,
}

impl FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "inbound" | "in" => Ok(Orientation::Inbound),
            "outbound" | "out" => Ok(Orientation::Outbound),
            _ => Err(Error::invalid(format!("unknown orientation {s:?}"))),
        }
    }
}

/// Harmonic centrality: `H(v) = sum over u != v of 1 / d(u -> v)` for
/// inbound orientation, unreachable pairs contributing 0.
pub fn harmonic(idx: &GraphIndex, orientation: Orientation) -> Vec<f64> {
    let adj = match orientation {
        Orientation::Inbound => &idx.inn,
        Orientation::Outbound => &idx.out,
    };
    let n = idx.len();
    par::map_range(n, |v| {
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        dist[v] = 0;
        queue.push_back(v as u32);
        let mut h = 0.0;
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            if du > 0 {
                h += 1.0 / f64::from(du);
            }
            for &w in &adj[u as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        h
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    pub scores: Vec<f64>,
    pub iterations: usize,
}

/// PageRank by power iteration with uniform teleport; dangling nodes spread
/// their mass uniformly. Converged when the L1 change drops below `tol`.
pub fn pagerank(idx: &GraphIndex, damping: f64, tol: f64, max_iter: usize) -> Result<PageRank> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::invalid(format!(
            "damping must be in (0,1), got {damping}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let n = idx.len();
    if n == 0 {
        return Ok(PageRank {
            scores: Vec::new(),
            iterations: 0,
        });
    }
    let nf = n as f64;
    let inv_out: Vec<f64> = idx
        .out
        .iter()
        .map(|o| {
            if o.is_empty() {
                0.0
            } else {
                1.0 / o.len() as f64
            }
        })
        .collect();
    let mut x = vec![1.0 / nf; n];
    for it in 1..=max_iter {
        let dangling: f64 = (0..n)
            .filter(|&u| idx.out[u].is_empty())
            .map(|u| x[u])
            .sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        let next = par::map_range(n, |v| {
            base + damping
                * idx.inn[v]
                    .iter()
                    .map(|&u| x[u as usize] * inv_out[u as usize])
                    .sum::<f64>()
        });
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < tol {
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
            return Ok(PageRank {
                scores: x,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        algorithm: "pagerank",
        iterations: max_iter,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hits {
    pub hub: Vec<f64>,
    pub authority: Vec<f64>,
    pub iterations: usize,
    /// No edges: both vectors are all zero.
    pub edgeless: bool,
}

/// HITS on the unweighted graph.
pub fn hits(idx: &GraphIndex, tol: f64, max_iter: usize) -> Result<Hits> {
    let edges: Vec<(u32, u32, f64)> = idx
        .out
        .iter()
        .enumerate()
        .flat_map(|(s, ts)| ts.iter().map(move |&t| (s as u32, t, 1.0)))
        .collect();
    hits_weighted(idx.len(), &edges, tol, max_iter)
}

/// HITS with non-negative edge weights `(source, target, weight)`.
/// Alternates `a = A^T h`, `h = A a` from uniform hubs, L2-normalizing after
/// each half-step, until both vectors move less than `tol` (max abs change).
pub fn hits_weighted(
    n: usize,
    edges: &[(u32, u32, f64)],
    tol: f64,
    max_iter: usize,
) -> Result<Hits> {
    if edges
        .iter()
        .any(|&(s, t, w)| s as usize >= n || t as usize >= n || !(w >= 0.0) || !w.is_finite())
    {
        return Err(Error::invalid(
            "HITS edges must reference nodes and carry finite non-negative weights",
        ));
    }
    let mut out: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    let mut inn: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for &(s, t, w) in edges {
        if w > 0.0 {
            out[s as usize].push((t, w));
            inn[t as usize].push((s, w));
        }
    }
    if out.iter().all(Vec::is_empty) {
        return Ok(Hits {
            hub: vec![0.0; n],
            authority: vec![0.0; n],
            iterations: 0,
            edgeless: true,
        });
    }
    let mut hub = vec![1.0 / (n as f64).sqrt(); n];
    let mut auth = vec![0.0; n];
    for it in 1..=max_iter {
        let mut a = par::map_range(n, |v| {
            inn[v]
                .iter()
                .map(|&(u, w)| w * hub[u as usize])
                .sum::<f64>()
        });
        normalize_l2(&mut a);
        let mut h = par::map_range(n, |u| {
            out[u].iter().map(|&(v, w)| w * a[v as usize]).sum::<f64>()
        });
        normalize_l2(&mut h);
        let da = max_abs_diff(&a, &auth);
        let dh = max_abs_diff(&h, &hub);
        auth = a;
        hub = h;
        if da < tol && dh < tol {
            return Ok(Hits {
                hub,
                authority: auth,
                iterations: it,
                edgeless: false,
            });
        }
    }
    Err(Error::NonConvergence {
        algorithm: "hits",
        iterations: max_iter,
    })
}

fn normalize_l2(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Population z-scores. Fails when the values have zero variance.
pub fn z_scores(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::UndefinedMetric(
            "z-score of an empty population".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(Error::UndefinedMetric("z-score with zero variance".into()));
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|x| (x - mean) / sd).collect())
}

/// Midpoint percentiles: `(count below + 0.5 * count equal) / n * 100`.
pub fn percentiles(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .map(|x| {
            let below = sorted.partition_point(|y| y < x);
            let upto = sorted.partition_point(|y| y <= x);
            (below as f64 + 0.5 * (upto - below) as f64) / n * 100.0
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    /// `None` when the population has zero variance.
    pub z: Option<Vec<f64>>,
    pub percentile: Vec<f64>,
}

pub fn standardize(values: &[f64]) -> Standardized {
    Standardized {
        z: z_scores(values).ok(),
        percentile: percentiles(values),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralityConfig {
    pub orientation: Orientation,
    pub damping: f64,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    pub hits_tol: f64,
    pub hits_max_iter: usize,
}

impl Default for CentralityConfig {
    fn default() -> Self {
        CentralityConfig {
            orientation: Orientation::Inbound,
            damping: DEFAULT_DAMPING,
            pagerank_tol: DEFAULT_PAGERANK_TOL,
            pagerank_max_iter: DEFAULT_PAGERANK_MAX_ITER,
            hits_tol: DEFAULT_HITS_TOL,
            hits_max_iter: DEFAULT_HITS_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityRow {
    pub domain: String,
    pub harmonic: f64,
    pub pagerank: f64,
    pub hub: f64,
    pub authority: f64,
    pub z_harmonic: Option<f64>,
    pub pct_harmonic: f64,
    pub z_pagerank: Option<f64>,
    pub pct_pagerank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityReport {
    /// Number of nodes the z-scores and percentiles are taken over.
    pub population: usize,
    pub config: CentralityConfig,
    pub pagerank_iterations: usize,
    pub hits_iterations: usize,
    pub hits_edgeless: bool,
    pub rows: Vec<CentralityRow>,
}

impl CentralityReport {
    /// All measures for every node of `g`, standardized over the whole graph.
    pub fn compute(g: &DomainGraph, config: &CentralityConfig) -> Result<Self> {
        Self::compute_index(&g.index(), config)
    }

    pub fn compute_index(idx: &GraphIndex, config: &CentralityConfig) -> Result<Self> {
        let h = harmonic(idx, config.orientation);
        let pr = pagerank(
            idx,
            config.damping,
            config.pagerank_tol,
            config.pagerank_max_iter,
        )?;
        let hi = hits(idx, config.hits_tol, config.hits_max_iter)?;
        let sh = standardize(&h);
        let sp = standardize(&pr.scores);
        let rows = (0..idx.len())
            .map(|i| CentralityRow {
                domain: idx.names[i].clone(),
                harmonic: h[i],
                pagerank: pr.scores[i],
                hub: hi.hub[i],
                authority: hi.authority[i],
                z_harmonic: sh.z.as_ref().map(|z| z[i]),
                pct_harmonic: sh.percentile[i],
                z_pagerank: sp.z.as_ref().map(|z| z[i]),
                pct_pagerank: sp.percentile[i],
            })
            .collect();
        Ok(CentralityReport {
            population: idx.len(),
            config: *config,
            pagerank_iterations: pr.iterations,
            hits_iterations: hi.iterations,
            hits_edgeless: hi.edgeless,
            rows,
        })
    }

    pub fn row(&self, domain: &str) -> Option<&CentralityRow> {
        self.rows.iter().find(|r| r.domain == domain)
    }

    /// `centrality.csv`; undefined z-scores are left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "domain",
            "harmonic",
            "pagerank",
            "hub",
            "authority",
            "z_harmonic",
            "pct_harmonic",
            "z_pagerank",
            "pct_pagerank",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.write_record([
                r.domain.clone(),
                r.harmonic.to_string(),
                r.pagerank.to_string(),
                r.hub.to_string(),
                r.authority.to_string(),
                opt(r.z_harmonic),
                r.pct_harmonic.to_string(),
                opt(r.z_pagerank),
                r.pct_pagerank.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector, SymmetricEigen};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(u32, u32)]) -> GraphIndex {
        GraphIndex::from_edges(n, edges)
    }

    fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> GraphIndex {
        let n = rng.random_range(1..=max_n);
        let p: f64 = rng.random_range(0.0..0.5);
        let mut edges = Vec::new();
        for s in 0..n as u32 {
            for t in 0..n as u32 {
                if s != t && rng.random_bool(p) {
                    edges.push((s, t));
                }
            }
        }
        graph(n, &edges)
    }

    fn floyd_warshall_harmonic(idx: &GraphIndex) -> Vec<f64> {
        let n = idx.len();
        let inf = f64::INFINITY;
        let mut d = vec![vec![inf; n]; n];
        for (u, row) in d.iter_mut().enumerate() {
            row[u] = 0.0;
            for &v in &idx.out[u] {
                row[v as usize] = 1.0;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&u| u != v && d[u][v].is_finite())
                    .map(|u| 1.0 / d[u][v])
                    .sum()
            })
            .collect()
    }

    fn dense_pagerank(idx: &GraphIndex, damping: f64) -> Vec<f64> {
        let n = idx.len();
        let nf = n as f64;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for u in 0..n {
            if idx.out[u].is_empty() {
                for v in 0..n {
                    m[(v, u)] = 1.0 / nf;
                }
            } else {
                for &v in &idx.out[u] {
                    m[(v as usize, u)] = 1.0 / idx.out[u].len() as f64;
                }
            }
        }
        let a = DMatrix::<f64>::identity(n, n) - m * damping;
        let b = DVector::from_element(n, (1.0 - damping) / nf);
        a.lu().solve(&b).unwrap().iter().copied().collect()
    }

    #[test]
    fn harmonic_path() {
        let idx = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(harmonic(&idx, Orientation::Inbound), vec![0.0, 1.0, 1.5]);
        assert_eq!(harmonic(&idx, Orientation::Outbound), vec![1.5, 1.0, 0.0]);
    }

    #[test]
    fn harmonic_isolated() {
        let idx = graph(3, &[(0, 1)]);
        assert_eq!(harmonic(&idx, Orientation::Inbound)[2], 0.0);
    }

    #[test]
    fn harmonic_six_nodes() {
        let idx = graph(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (5, 4), (4, 3)]);
        let h = harmonic(&idx, Orientation::Inbound);
        let oracle = floyd_warshall_harmonic(&idx);
        for (a, b) in h.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        // node 3: from 2 (1), 1 (1/2), 0 (1/3), 4 (1), 5 (1/2)
        assert!((h[3] - (1.0 + 0.5 + 1.0 / 3.0 + 1.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn harmonic_matches_floyd_warshall() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let idx = random_graph(&mut rng, 50);
            let h = harmonic(&idx, Orientation::Inbound);
            for (a, b) in h.iter().zip(floyd_warshall_harmonic(&idx)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn harmonic_sequential_matches_parallel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let idx = random_graph(&mut rng, 200);
        let p = harmonic(&idx, Orientation::Inbound);
        let s = par::sequential(|| harmonic(&idx, Orientation::Inbound));
        assert_eq!(p, s);
    }

    #[test]
    fn pagerank_trivial() {
        let pr = pagerank(&graph(1, &[]), 0.85, 1e-10, 100).unwrap();
        assert_eq!(pr.scores, vec![1.0]);
        let pr = pagerank(&graph(2, &[(0, 1), (1, 0)]), 0.85, 1e-10, 100).unwrap();
        assert!((pr.scores[0] - 0.5).abs() < 1e-12 && (pr.scores[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pagerank_five_node_oracle() {
        let idx = graph(5, &[(0, 1), (0, 2), (1, 2), (2, 0), (3, 2), (3, 4)]);
        let pr = pagerank(&idx, 0.85, 1e-10, 10_000).unwrap();
        let oracle = dense_pagerank(&idx, 0.85);
        let l1: f64 = pr
            .scores
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(l1 < 1e-8, "l1 {l1}");
        assert!((pr.scores.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pagerank_errors() {
        assert!(pagerank(&graph(2, &[]), 1.0, 1e-10, 10).is_err());
        assert!(pagerank(&graph(2, &[]), 0.0, 1e-10, 10).is_err());
        let idx = graph(5, &[(0, 1), (1, 2), (2, 0), (3, 4)]);
        match pagerank(&idx, 0.85, 1e-15, 2) {
            Err(Error::NonConvergence { iterations, .. }) => assert_eq!(iterations, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hits_star_into_c() {
        let h = hits(&graph(3, &[(0, 2), (1, 2)]), 1e-12, 1000).unwrap();
        assert!((h.authority[2] - 1.0).abs() < 1e-9);
        assert!((h.hub[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((h.hub[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert_eq!(h.hub[2], 0.0);
    }

    #[test]
    fn hits_single_edge_and_edgeless() {
        let h = hits(&graph(2, &[(0, 1)]), 1e-12, 1000).unwrap();
        assert_eq!((h.hub[0], h.authority[1]), (1.0, 1.0));
        let e = hits(&graph(3, &[]), 1e-12, 1000).unwrap();
        assert!(e.edgeless && e.hub.iter().chain(&e.authority).all(|&x| x == 0.0));
    }

    #[test]
    fn hits_matches_eigenvector() {
        let idx = graph(
            6,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 3),
                (3, 1),
                (4, 2),
                (4, 3),
                (5, 0),
                (5, 2),
            ],
        );
        let h = hits(&idx, 1e-12, 1000).unwrap();
        let mut a = DMatrix::<f64>::zeros(6, 6);
        for (u, ts) in idx.out.iter().enumerate() {
            for &v in ts {
                a[(u, v as usize)] = 1.0;
            }
        }
        let dominant = |m: DMatrix<f64>| {
            let e = SymmetricEigen::new(m);
            let k = e.eigenvalues.imax();
            let v: Vec<f64> = e.eigenvectors.column(k).iter().copied().collect();
            let sign = if v.iter().sum::<f64>() < 0.0 {
                -1.0
            } else {
                1.0
            };
            v.into_iter().map(|x| x * sign).collect::<Vec<_>>()
        };
        let auth = dominant(a.transpose() * &a);
        let hub = dominant(&a * a.transpose());
        for i in 0..6 {
            assert!((h.authority[i] - auth[i]).abs() < 1e-9);
            assert!((h.hub[i] - hub[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(z_scores(&[0.0, 10.0]).unwrap(), vec![-1.0, 1.0]);
        let p = percentiles(&[3.0, 1.0, 2.0, 5.0, 4.0]);
        assert_eq!(p[0], 50.0);
        assert!(z_scores(&[2.0, 2.0]).is_err());
        let s = standardize(&[2.0, 2.0]);
        assert!(s.z.is_none());
        assert_eq!(s.percentile, vec![50.0, 50.0]);
    }

    #[test]
    fn percentile_at_table_target() {
        // 9948 values below 1.23, one equal, 51 above: (9948 + 0.5) / 10000
        let mut values: Vec<f64> = (0..9948).map(|i| f64::from(i) / 9948.0).collect();
        values.push(1.23);
        values.extend((0..51).map(|i| 2.0 + f64::from(i)));
        let p = percentiles(&values);
        assert!((p[9948] - 99.49).abs() < 0.01, "{}", p[9948]);
    }

    #[test]
    fn report_csv() {
        let mut idx = graph(3, &[(0, 1), (1, 2)]);
        idx.names = vec!["a.com".into(), "b.com".into(), "c.com".into()];
        let r = CentralityReport::compute_index(&idx, &CentralityConfig::default()).unwrap();
        assert_eq!(r.population, 3);
        assert_eq!(r.row("c.com").unwrap().harmonic, 1.5);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "domain,harmonic,pagerank,hub,authority,z_harmonic,pct_harmonic,z_pagerank,pct_pagerank\n"
        ));
        assert_eq!(text.lines().count(), 4);
    }

    fn arb_graph() -> impl Strategy<Value = GraphIndex> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n as u32, 0..n as u32), 0..40)
                .prop_map(move |e| graph(n, &e))
        })
    }

    proptest! {
        #[test]
        fn pagerank_sum_and_floor(idx in arb_graph()) {
            let pr = pagerank(&idx, 0.85, 1e-10, 10_000).unwrap();
            let n = idx.len() as f64;
            prop_assert!((pr.scores.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(pr.scores.iter().all(|&x| x >= 0.15 / n - 1e-12));
        }

        #[test]
        fn hits_scale_invariant(idx in arb_graph(), scale in 0.01f64..100.0) {
            let edges: Vec<(u32, u32, f64)> = idx.out.iter().enumerate()
                .flat_map(|(s, ts)| ts.iter().map(move |&t| (s as u32, t, 1.0)))
                .collect();
            let scaled: Vec<_> = edges.iter().map(|&(s, t, w)| (s, t, w * scale)).collect();
            let a = hits_weighted(idx.len(), &edges, 1e-12, 1000);
            let b = hits_weighted(idx.len(), &scaled, 1e-12, 1000);
            if let (Ok(a), Ok(b)) = (a, b) {
                for (x, y) in a.hub.iter().zip(&b.hub).chain(a.authority.iter().zip(&b.authority)) {
                    prop_assert!((x - y).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn adding_inbound_edge_never_lowers_harmonic(idx in arb_graph(), s in 0u32..12, t in 0u32..12) {
            let n = idx.len() as u32;
            let (s, t) = (s % n, t % n);
            let mut edges: Vec<(u32, u32)> = idx.out.iter().enumerate()
                .flat_map(|(u, ts)| ts.iter().map(move |&v| (u as u32, v)))
                .collect();
            let before = harmonic(&idx, Orientation::Inbound)[t as usize];
            edges.push((s, t));
            let after = harmonic(&graph(idx.len(), &edges), Orientation::Inbound)[t as usize];
            prop_assert!(after >= before);
        }
    }
}
