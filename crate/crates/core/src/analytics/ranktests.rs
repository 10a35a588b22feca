//! Rank-based two-sample comparison and family-wise correction.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::{Error, Result};

/// Pooled sizes up to this use exact enumeration of rank assignments.
pub const EXACT_MAX_POOLED: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: PValueMethod,
    /// Null mean of U.
    pub mean: f64,
    /// Tie-corrected null variance of U.
    pub variance: f64,
}

/// Midranks (1-based) of the pooled sample, plus the tie term
/// `sum(t^3 - t)` over tie groups.
fn midranks(pooled: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("both samples must be non-empty"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    Ok(())
}

struct Prepared {
    ranks: Vec<f64>,
    na: usize,
    u: f64,
    mean: f64,
    variance: f64,
}

fn prepare(a: &[f64], b: &[f64]) -> Prepared {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let rank_sum: f64 = ranks[..a.len()].iter().sum();
    let u = rank_sum - na * (na + 1.0) / 2.0;
    let mean = na * nb / 2.0;
    let variance = if n > 1.0 {
        na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)))
    } else {
        0.0
    };
    Prepared {
        ranks,
        na: a.len(),
        u,
        mean,
        variance,
    }
}

/// Mann-Whitney U test. Exact two-sided p by enumerating every assignment of
/// pooled ranks when the pooled size is at most [`EXACT_MAX_POOLED`],
/// otherwise the tie-corrected normal approximation with continuity
/// correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check(a, b)?;
    if a.len() + b.len() <= EXACT_MAX_POOLED {
        let p = prepare(a, b);
        let p_value = exact_two_sided(&p.ranks, p.na, p.u, p.mean);
        return Ok(MannWhitney {
            u: p.u,
            p_value,
            method: PValueMethod::Exact,
            mean: p.mean,
            variance: p.variance,
        });
    }
    mann_whitney_u_normal(a, b)
}

/// Mann-Whitney U test using the normal approximation regardless of size.
pub fn mann_whitney_u_normal(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check(a, b)?;
    let p = prepare(a, b);
    let p_value = if p.variance <= 0.0 {
        1.0
    } else {
        let dev = ((p.u - p.mean).abs() - 0.5).max(0.0);
        let z = dev / p.variance.sqrt();
        // two-sided: 2 * (1 - Phi(z)) = erfc(z / sqrt 2)
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(MannWhitney {
        u: p.u,
        p_value,
        method: PValueMethod::Normal,
        mean: p.mean,
        variance: p.variance,
    })
}

fn exact_two_sided(ranks: &[f64], na: usize, u_obs: f64, mean: f64) -> f64 {
    let n = ranks.len();
    let offset = (na * (na + 1)) as f64 / 2.0;
    let observed = (u_obs - mean).abs() - 1e-9;
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let rank_sum: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        total += 1;
        if (rank_sum - offset - mean).abs() >= observed {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

/// `reject[i] = p[i] <= alpha / m`.
pub fn bonferroni(pvals: &[f64], alpha: f64) -> Vec<bool> {
    let m = pvals.len() as f64;
    pvals.iter().map(|p| *p <= alpha / m).collect()
}
