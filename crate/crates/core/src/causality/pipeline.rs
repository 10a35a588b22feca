//! End-to-end partial Granger workflow over groups of three series.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::partial::{partial_granger, Direction, PgcConfig, DEFAULT_BOOTSTRAP};
use super::{bh_correct, fit_var, select_lag_bic};
use crate::stats::{
    difference, durbin_watson, serial_correlation_suspected, stationarize, StationarityConfig,
    TimeSeries,
};
use crate::{Error, Result};

pub const DEFAULT_P_MAX: usize = 14;
pub const DEFAULT_MIN_OVERLAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    X,
    Y,
    Z,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::X, Role::Y, Role::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::X => "x",
            Role::Y => "y",
            Role::Z => "z",
        }
    }

    fn third(a: Role, b: Role) -> Role {
        Role::ALL
            .into_iter()
            .find(|r| *r != a && *r != b)
            .expect("three roles")
    }
}

/// Which tests share one Benjamini-Hochberg family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BhFamily {
    /// Every test of every group.
    #[default]
    Joint,
    PerGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub q: f64,
    pub bootstrap: usize,
    pub seed: u64,
    pub p_max: usize,
    pub min_overlap: usize,
    /// Unordered role pairs; each is tested in both directions conditioned
    /// on the remaining role.
    pub pairs: Vec<[Role; 2]>,
    pub bh_family: BhFamily,
    pub stationarity: StationarityConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            from: None,
            to: None,
            q: 0.05,
            bootstrap: DEFAULT_BOOTSTRAP,
            seed: 0,
            p_max: DEFAULT_P_MAX,
            min_overlap: DEFAULT_MIN_OVERLAP,
            pairs: vec![[Role::X, Role::Y], [Role::X, Role::Z], [Role::Y, Role::Z]],
            bh_family: BhFamily::Joint,
            stationarity: StationarityConfig::default(),
        }
    }
}

impl PipelineConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::invalid(format!(
                "q must be in [0,1], got {}",
                self.q
            )));
        }
        if self.bootstrap == 0 {
            return Err(Error::invalid("bootstrap must be >= 1"));
        }
        if self.p_max == 0 {
            return Err(Error::invalid("p_max must be >= 1"));
        }
        if self.pairs.iter().any(|[a, b]| a == b) {
            return Err(Error::invalid("a tested pair needs two different roles"));
        }
        let distinct: BTreeSet<_> = self
            .pairs
            .iter()
            .map(|[a, b]| (*a.min(b), *a.max(b)))
            .collect();
        if distinct.len() != self.pairs.len() {
            return Err(Error::invalid("duplicate tested pair"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub name: String,
    /// `date,value` CSV, relative to the config file.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub name: String,
    pub x: SeriesSpec,
    pub y: SeriesSpec,
    pub z: SeriesSpec,
}

/// JSON pipeline file: either a `groups` list or a single top-level
/// `x`/`y`/`z` triple, plus [`PipelineConfig`] fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineFile {
    #[serde(default)]
    pub groups: Vec<GroupSpec>,
    #[serde(default)]
    pub x: Option<SeriesSpec>,
    #[serde(default)]
    pub y: Option<SeriesSpec>,
    #[serde(default)]
    pub z: Option<SeriesSpec>,
    #[serde(flatten)]
    pub config: PipelineConfig,
}

impl PipelineFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn group_specs(&self) -> Result<Vec<GroupSpec>> {
        let mut groups = self.groups.clone();
        match (&self.x, &self.y, &self.z) {
            (Some(x), Some(y), Some(z)) => groups.push(GroupSpec {
                name: "default".into(),
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
            }),
            (None, None, None) => {}
            _ => return Err(Error::invalid("top-level series need all of x, y and z")),
        }
        if groups.is_empty() {
            return Err(Error::invalid("pipeline config names no series"));
        }
        let names: BTreeSet<&str> = groups.iter().map(|g| g.name.as_str()).collect();
        if names.len() != groups.len() {
            return Err(Error::invalid("duplicate group name"));
        }
        Ok(groups)
    }

    /// Reads every series, resolving relative paths against `base`.
    pub fn load(&self, base: &Path) -> Result<Vec<GroupInput>> {
        let read = |s: &SeriesSpec| -> Result<(String, TimeSeries)> {
            let path = base.join(&s.path);
            let file = std::fs::File::open(&path)?;
            let ts = TimeSeries::read_csv(file)
                .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
            Ok((s.name.clone(), ts))
        };
        self.group_specs()?
            .iter()
            .map(|g| {
                Ok(GroupInput {
                    name: g.name.clone(),
                    series: [read(&g.x)?, read(&g.y)?, read(&g.z)?],
                })
            })
            .collect()
    }

    /// Input files in group order, for digesting.
    pub fn paths(&self) -> Result<Vec<PathBuf>> {
        Ok(self
            .group_specs()?
            .into_iter()
            .flat_map(|g| [g.x.path, g.y.path, g.z.path])
            .collect())
    }
}

/// Named `x`, `y`, `z` series of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupInput {
    pub name: String,
    pub series: [(String, TimeSeries); 3],
}

/// Dates shared by every series within `[from, to]`.
pub fn align(
    series: &[&TimeSeries],
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    min_overlap: usize,
) -> Result<Vec<NaiveDate>> {
    let Some(first) = series.first() else {
        return Ok(Vec::new());
    };
    let common: Vec<NaiveDate> = first
        .dates()
        .iter()
        .copied()
        .filter(|d| from.is_none_or(|f| *d >= f) && to.is_none_or(|t| *d <= t))
        .filter(|d| series[1..].iter().all(|s| s.value_at(*d).is_some()))
        .collect();
    if common.len() < min_overlap {
        return Err(Error::Alignment {
            overlap: common.len(),
            required: min_overlap,
        });
    }
    Ok(common)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub group: String,
    pub cause: String,
    pub effect: String,
    pub condition: String,
    pub cause_role: Role,
    pub effect_role: Role,
    pub f1: f64,
    pub p_value: f64,
    pub bh_rejected: bool,
    pub sign: Direction,
    pub mean_cause_coef: f64,
    pub lag: usize,
    pub d: usize,
    pub bootstrap_reps: usize,
    pub dw_flags: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub name: String,
    /// Series names in `x, y, z` order.
    pub series: Vec<String>,
    pub aligned_obs: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    /// Differences each series needed on its own.
    pub differences: Vec<usize>,
    /// Differences applied to all three.
    pub d: usize,
    pub p_max_used: usize,
    pub lag: usize,
    pub bic: Vec<f64>,
    /// Durbin-Watson per equation of the full three-series VAR.
    pub durbin_watson: Vec<f64>,
    pub dw_flags: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arrow {
    pub group: String,
    pub cause: String,
    pub effect: String,
    pub sign: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalityReport {
    pub config: PipelineConfig,
    pub groups: Vec<GroupReport>,
    pub tests: Vec<TestReport>,
    pub arrows: Vec<Arrow>,
}

impl CausalityReport {
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "group",
            "cause",
            "effect",
            "condition",
            "f1",
            "p_value",
            "p_bh_rejected",
            "sign",
            "lag",
            "d",
            "dw_flags",
        ])?;
        for t in &self.tests {
            let flags: Vec<&str> = t
                .dw_flags
                .iter()
                .map(|f| if *f { "1" } else { "0" })
                .collect();
            out.write_record([
                t.group.clone(),
                t.cause.clone(),
                t.effect.clone(),
                t.condition.clone(),
                t.f1.to_string(),
                t.p_value.to_string(),
                t.bh_rejected.to_string(),
                t.sign.as_str().to_string(),
                t.lag.to_string(),
                t.d.to_string(),
                flags.join(";"),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn test_seed(seed: u64, group: usize, test: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((group as u64) << 32) | test as u64);
    rng.next_u64()
}

fn run_group(
    gi: usize,
    g: &GroupInput,
    cfg: &PipelineConfig,
) -> Result<(GroupReport, Vec<TestReport>)> {
    let refs: Vec<&TimeSeries> = g.series.iter().map(|(_, s)| s).collect();
    let dates = align(&refs, cfg.from, cfg.to, cfg.min_overlap)?;
    let aligned: Vec<TimeSeries> = refs
        .iter()
        .map(|s| s.select(&dates))
        .collect::<Result<_>>()?;
    let mut differences = Vec::with_capacity(3);
    for ((name, _), s) in g.series.iter().zip(&aligned) {
        let label = format!("{}/{}", g.name, name);
        differences.push(stationarize(s, &cfg.stationarity, &label)?.differences);
    }
    let d = differences.iter().copied().max().unwrap_or(0);
    let stationary: Vec<TimeSeries> = if d == 0 {
        aligned
    } else {
        aligned
            .iter()
            .map(|s| difference(s, d))
            .collect::<Result<_>>()?
    };
    let cols: Vec<&[f64]> = stationary.iter().map(TimeSeries::values).collect();
    let n = cols[0].len();
    let p_max_used = cfg.p_max.min(n.saturating_sub(2) / 4);
    if p_max_used == 0 {
        return Err(Error::Alignment {
            overlap: dates.len(),
            required: cfg.min_overlap.max(6 + d),
        });
    }
    let sel = select_lag_bic(&cols, p_max_used)?;
    let full = fit_var(&cols, sel.p)?;
    let dw: Vec<f64> = (0..3)
        .map(|j| durbin_watson(&full.residual_column(j)).unwrap_or(f64::NAN))
        .collect();
    let dw_flags = dw
        .iter()
        .map(|v| v.is_nan() || serial_correlation_suspected(*v))
        .collect();

    let names: Vec<String> = g.series.iter().map(|(n, _)| n.clone()).collect();
    let mut tests = Vec::new();
    for [a, b] in &cfg.pairs {
        for (cause, effect) in [(*a, *b), (*b, *a)] {
            let cond = Role::third(cause, effect);
            let pgc = partial_granger(
                cols[effect.index()],
                cols[cause.index()],
                &[cols[cond.index()]],
                &PgcConfig {
                    p: sel.p,
                    bootstrap: cfg.bootstrap,
                    seed: test_seed(cfg.seed, gi, tests.len()),
                },
            )?;
            tests.push(TestReport {
                group: g.name.clone(),
                cause: names[cause.index()].clone(),
                effect: names[effect.index()].clone(),
                condition: names[cond.index()].clone(),
                cause_role: cause,
                effect_role: effect,
                f1: pgc.f1,
                p_value: pgc.p_value,
                bh_rejected: false,
                sign: pgc.direction,
                mean_cause_coef: pgc.mean_cause_coef,
                lag: pgc.lag,
                d,
                bootstrap_reps: pgc.bootstrap_reps,
                dw_flags: pgc.dw_flags,
            });
        }
    }
    let report = GroupReport {
        name: g.name.clone(),
        series: names,
        aligned_obs: dates.len(),
        first_date: dates[0],
        last_date: dates[dates.len() - 1],
        differences,
        d,
        p_max_used,
        lag: sel.p,
        bic: sel.bic,
        durbin_watson: dw,
        dw_flags,
    };
    Ok((report, tests))
}

/// Align, stationarize with a shared difference order, pick the lag by BIC,
/// run partial Granger both ways for every configured pair, and keep the
/// arrows that survive Benjamini-Hochberg at `q`.
pub fn causality_pipeline(groups: &[GroupInput], cfg: &PipelineConfig) -> Result<CausalityReport> {
    cfg.validate()?;
    let mut reports = Vec::with_capacity(groups.len());
    let mut tests: Vec<TestReport> = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        let (r, mut t) = run_group(gi, g, cfg)?;
        if cfg.bh_family == BhFamily::PerGroup {
            let p: Vec<f64> = t.iter().map(|x| x.p_value).collect();
            for (x, rej) in t.iter_mut().zip(bh_correct(&p, cfg.q)) {
                x.bh_rejected = rej;
            }
        }
        reports.push(r);
        tests.append(&mut t);
    }
    if cfg.bh_family == BhFamily::Joint {
        let p: Vec<f64> = tests.iter().map(|x| x.p_value).collect();
        for (x, rej) in tests.iter_mut().zip(bh_correct(&p, cfg.q)) {
            x.bh_rejected = rej;
        }
    }
    let arrows = tests
        .iter()
        .filter(|t| t.bh_rejected)
        .map(|t| Arrow {
            group: t.group.clone(),
            cause: t.cause.clone(),
            effect: t.effect.clone(),
            sign: t.sign,
        })
        .collect();
    Ok(CausalityReport {
        config: cfg.clone(),
        groups: reports,
        tests,
        arrows,
    })
}
