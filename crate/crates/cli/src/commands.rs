use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use chrono::NaiveDate;
use fringeweb::analytics::{
    bonferroni, conspiracy_oriented_set, discover_candidates, mann_whitney_u, orientation_table,
    shared_outlink_pct, targeted_pct_series, top_linked, TrendMode, TrendPoint,
};
use fringeweb::causality::{causality_pipeline, PipelineFile};
use fringeweb::centrality::{CentralityConfig, CentralityReport};
use fringeweb::graph::{
    read_snapshot, write_edge_dates_csv, write_edges_csv, write_nodes_csv, write_snapshot,
    Category, DomainGraph, Group, LabelTable,
};
use fringeweb::ingest::{
    crawl, ingest_pages, read_links_csv, read_pages_jsonl, write_links_csv, write_pages_jsonl,
    ArchiveFetcher, CrawlFrontier, PageRecord, SystemClock,
};
use fringeweb::scoring::{
    evaluate, read_fringe_csv, split_train_test, train_fringe, write_fringe_csv, write_scores_csv,
    CalibrationMode, FringeLabel, FringeModel, FringeSample, TrainConfig,
};
use fringeweb::stats::{dcg_series, median_rank_series, mention_series, RankTable};
use serde::Serialize;

use crate::cli::*;
use crate::output::RunContext;
use crate::Usage;

fn json_to<T: Serialize + ?Sized>(w: &mut dyn Write, value: &T) -> fringeweb::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn load_graph(ctx: &mut RunContext, path: &Path) -> Result<DomainGraph> {
    let bytes = ctx.read(path)?;
    read_snapshot(&bytes[..]).with_context(|| format!("loading graph {}", path.display()))
}

fn load_labels(ctx: &mut RunContext, path: &Path) -> Result<LabelTable> {
    let bytes = ctx.read(path)?;
    LabelTable::from_csv(&bytes[..]).with_context(|| format!("loading labels {}", path.display()))
}

/// Non-empty lines that are not `#` comments.
fn load_lines(ctx: &mut RunContext, path: &Path) -> Result<Vec<String>> {
    let text = ctx.read_string(path)?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn load_pages(ctx: &mut RunContext, path: &Path) -> Result<Vec<fringeweb::Result<PageRecord>>> {
    let bytes = ctx.read(path)?;
    read_pages_jsonl(&bytes[..]).with_context(|| format!("reading pages {}", path.display()))
}

fn check_range(from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<()> {
    if let (Some(f), Some(t)) = (from, to) {
        if f > t {
            return Err(Usage(format!("--from {f} is after --to {t}")).into());
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn extract(a: &ExtractArgs, ctx: &mut RunContext) -> Result<String> {
    let pages = load_pages(ctx, &a.pages)?;
    let labels = a
        .labels
        .as_deref()
        .map(|p| load_labels(ctx, p))
        .transpose()?;
    let out = ingest_pages(pages, labels.as_ref(), a.domain_mode.into());
    ctx.write(&a.out, |w| write_links_csv(w, &out.records))?;
    if let Some(path) = &a.report {
        ctx.write(path, |w| json_to(w, &out.report))?;
    }
    ctx.detail("ingest", &out.report);
    Ok(format!(
        "extract: {} pages -> {} link records ({} corrupt pages skipped)",
        out.report.pages, out.report.links, out.report.corrupt_pages
    ))
}

pub fn crawl_cmd(a: &CrawlArgs, ctx: &mut RunContext) -> Result<String> {
    let seeds = load_lines(ctx, &a.seeds)?;
    if seeds.is_empty() {
        anyhow::bail!("{} lists no seed URLs", a.seeds.display());
    }
    let archive = load_pages(ctx, &a.archive)?;
    let total = archive.len();
    let archive: Vec<PageRecord> = archive.into_iter().filter_map(|p| p.ok()).collect();
    let mut fetcher = ArchiveFetcher::from_pages(&archive);
    let frontier = CrawlFrontier::new(&seeds, a.hop_limit)?.with_politeness_ms(a.politeness_ms);
    let (pages, report) = crawl(frontier, &mut fetcher, &mut SystemClock::default());
    ctx.write(&a.out, |w| {
        write_pages_jsonl(w, pages.iter().map(|p| &p.page))
    })?;
    ctx.detail("archive_pages", total);
    ctx.detail("archive_corrupt", total - archive.len());
    ctx.detail("fetched", report.fetched);
    ctx.detail("errors", &report.errors);
    ctx.detail("beyond_limit", report.beyond_limit);
    Ok(format!(
        "crawl: fetched {} pages, {} errors, {} urls beyond hop limit, waited {} ms",
        report.fetched,
        report.errors.len(),
        report.beyond_limit,
        report.waited_ms
    ))
}

pub fn graph(a: &GraphArgs, ctx: &mut RunContext) -> Result<String> {
    check_range(a.from, a.to)?;
    let bytes = ctx.read(&a.links)?;
    let records =
        read_links_csv(&bytes[..]).with_context(|| format!("reading {}", a.links.display()))?;
    let labels = load_labels(ctx, &a.labels)?;
    let mut g = DomainGraph::build(&records, &labels);
    if a.from.is_some() || a.to.is_some() {
        g = g.window(
            a.from.unwrap_or(NaiveDate::MIN),
            a.to.unwrap_or(NaiveDate::MAX),
        )?;
    }
    let dir = &a.out_dir;
    ctx.write(&dir.join("graph.bin"), |w| write_snapshot(w, &g))?;
    ctx.write(&dir.join("edges.csv"), |w| write_edges_csv(w, &g))?;
    ctx.write(&dir.join("edge_dates.csv"), |w| write_edge_dates_csv(w, &g))?;
    ctx.write(&dir.join("nodes.csv"), |w| write_nodes_csv(w, &g))?;
    ctx.detail("nodes", g.node_count());
    ctx.detail("edges", g.edge_count());
    Ok(format!(
        "graph: {} records -> {} nodes, {} edges",
        records.len(),
        g.node_count(),
        g.edge_count()
    ))
}

fn shared_rows(
    g: &DomainGraph,
    groups: &[Group],
    exclude_members: bool,
) -> Result<Vec<[String; 3]>> {
    let mut rows = Vec::new();
    for a in groups {
        for b in groups {
            let v = match shared_outlink_pct(g, a, b, exclude_members) {
                Ok(v) => Some(v),
                Err(fringeweb::Error::UndefinedMetric(_)) => None,
                Err(e) => return Err(e.into()),
            };
            rows.push([a.name(), b.name(), fmt_opt(v)]);
        }
    }
    Ok(rows)
}

fn write_rows<const N: usize>(
    w: &mut dyn Write,
    header: [&str; N],
    rows: &[[String; N]],
) -> fringeweb::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn similarity(a: &SimilarityArgs, ctx: &mut RunContext) -> Result<String> {
    let g = load_graph(ctx, &a.graph)?;
    let rows = shared_rows(&g, &a.groups, !a.include_members)?;
    let undefined = rows.iter().filter(|r| r[2].is_empty()).count();
    ctx.write(&a.out, |w| {
        write_rows(w, ["group_a", "group_b", "shared_pct"], &rows)
    })?;
    Ok(format!(
        "similarity: {} group pairs ({} undefined)",
        rows.len(),
        undefined
    ))
}

pub fn discover(a: &DiscoverArgs, ctx: &mut RunContext) -> Result<String> {
    let g = load_graph(ctx, &a.graph)?;
    let seeds: Vec<String> = match (&a.seed_domains, &a.group) {
        (Some(path), _) => load_lines(ctx, path)?,
        (None, Some(group)) => g.members(group).map(String::from).collect(),
        (None, None) => unreachable!("clap requires one seed source"),
    };
    let unknown: Vec<&String> = seeds.iter().filter(|s| !g.contains(s)).collect();
    ctx.detail("unknown_seeds", &unknown);
    let ranked = discover_candidates(&g, &seeds, a.k, a.min_connections);
    let rows: Vec<[String; 3]> = ranked
        .iter()
        .enumerate()
        .map(|(i, (d, s))| [(i + 1).to_string(), d.clone(), s.to_string()])
        .collect();
    ctx.write(&a.out, |w| {
        write_rows(w, ["rank", "domain", "similarity"], &rows)
    })?;
    Ok(format!(
        "discover: {} seeds ({} not in graph) -> {} candidates",
        seeds.len(),
        unknown.len(),
        rows.len()
    ))
}

pub fn oriented(a: &OrientedArgs, ctx: &mut RunContext) -> Result<String> {
    let g = load_graph(ctx, &a.graph)?;
    let table = orientation_table(&g);
    let n = table.iter().filter(|r| r.oriented).count();
    ctx.write(&a.out, |w| write_orientation(w, &table))?;
    ctx.detail("oriented", n);
    Ok(format!(
        "oriented: {n} of {} domains conspiracy-oriented",
        table.len()
    ))
}

fn write_orientation(
    w: &mut dyn Write,
    table: &[fringeweb::analytics::OrientationRow],
) -> fringeweb::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in table {
        out.serialize(r)?;
    }
    if table.is_empty() {
        out.write_record([
            "domain",
            "category",
            "conspiracy_sources",
            "authentic_sources",
            "nonnews_sources",
            "oriented",
            "out_domains",
            "oriented_out_pct",
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn target_set<'g>(g: &'g DomainGraph, target: Option<&'g Group>) -> BTreeSet<&'g str> {
    match target {
        Some(t) => g.members(t).collect(),
        None => conspiracy_oriented_set(g),
    }
}

fn trend_rows(points: &[TrendPoint]) -> Vec<[String; 3]> {
    points
        .iter()
        .map(|p| {
            [
                p.period.clone(),
                p.value.to_string(),
                p.n_sources.to_string(),
            ]
        })
        .collect()
}

pub fn trend(a: &TrendArgs, ctx: &mut RunContext) -> Result<String> {
    let g = load_graph(ctx, &a.graph)?;
    let targets = target_set(&g, a.target.as_ref());
    let points = targeted_pct_series(&g, &a.source, &targets, a.granularity, a.mode);
    let rows = trend_rows(&points);
    ctx.write(&a.out, |w| {
        write_rows(w, ["period", "value", "n_sources"], &rows)
    })?;
    Ok(format!(
        "trend: {} periods for {} -> {}",
        rows.len(),
        a.source.name(),
        a.target
            .as_ref()
            .map_or("conspiracy-oriented".into(), Group::name)
    ))
}

fn centrality_report(
    g: &DomainGraph,
    ctx: &mut RunContext,
    cfg: &CentralityConfig,
) -> Result<CentralityReport> {
    if !(cfg.damping > 0.0 && cfg.damping < 1.0) {
        return Err(Usage(format!("--damping must be in (0, 1), got {}", cfg.damping)).into());
    }
    let report = CentralityReport::compute(g, cfg)?;
    ctx.detail("population", report.population);
    ctx.detail("pagerank_iterations", report.pagerank_iterations);
    ctx.detail("hits_iterations", report.hits_iterations);
    ctx.detail("hits_edgeless", report.hits_edgeless);
    if report.hits_edgeless {
        eprintln!("warning: graph has no edges; hub and authority scores are all zero");
    }
    Ok(report)
}

pub fn centrality(a: &CentralityArgs, ctx: &mut RunContext) -> Result<String> {
    let g = load_graph(ctx, &a.graph)?;
    let cfg = CentralityConfig {
        orientation: a.orientation,
        damping: a.damping,
        ..Default::default()
    };
    let report = centrality_report(&g, ctx, &cfg)?;
    ctx.write(&a.out, |w| report.write_csv(w))?;
    Ok(format!(
        "centrality: {} domains, pagerank converged in {} iterations",
        report.population, report.pagerank_iterations
    ))
}

pub fn popularity(a: &PopularityArgs, ctx: &mut RunContext) -> Result<String> {
    check_range(a.from, a.to)?;
    if a.window == 0 {
        return Err(Usage("--window must be >= 1".into()).into());
    }
    let bytes = ctx.read(&a.ranks)?;
    let ranks = RankTable::read_csv(&bytes[..])
        .with_context(|| format!("reading {}", a.ranks.display()))?
        .restrict(a.from, a.to);
    let members: BTreeSet<String> = match (&a.domains, &a.group, &a.labels) {
        (Some(path), _, _) => load_lines(ctx, path)?.into_iter().collect(),
        (None, Some(group), Some(labels)) => {
            let labels = load_labels(ctx, labels)?;
            labels
                .iter()
                .filter(|(d, l)| group.contains(d, *l))
                .map(|(d, _)| d.to_string())
                .collect()
        }
        _ => unreachable!("clap requires --domains or --group with --labels"),
    };
    if members.is_empty() {
        anyhow::bail!("the selected group has no domains");
    }
    let ts = match a.metric {
        PopularityMetric::Median => median_rank_series(&ranks, &members, a.window)?,
        PopularityMetric::Dcg => dcg_series(&ranks, &members, a.floor)?,
    };
    ctx.write(&a.out, |w| ts.write_csv(w))?;
    Ok(format!(
        "popularity: {} days of {:?} for {} domains",
        ts.len(),
        a.metric,
        members.len()
    ))
}

pub fn mentions(a: &MentionsArgs, ctx: &mut RunContext) -> Result<String> {
    check_range(Some(a.from), Some(a.to))?;
    if a.keyword.trim().is_empty() {
        return Err(Usage("--keyword must not be empty".into()).into());
    }
    let pages = load_pages(ctx, &a.pages)?;
    let total = pages.len();
    let pages: Vec<PageRecord> = pages.into_iter().filter_map(|p| p.ok()).collect();
    let ts = mention_series(&pages, &a.keyword, a.from, a.to)?;
    let hits: f64 = ts.values().iter().sum();
    ctx.detail("corrupt_pages", total - pages.len());
    ctx.write(&a.out, |w| ts.write_csv(w))?;
    Ok(format!(
        "mentions: {hits} pages mention {:?} over {} days",
        a.keyword,
        ts.len()
    ))
}

/// Returns the summary and the seed actually used.
pub fn causality(
    a: &CausalityArgs,
    config: Option<&Path>,
    seed: Option<u64>,
    ctx: &mut RunContext,
) -> Result<(String, u64)> {
    let path = config.ok_or_else(|| Usage("causality needs --config <pipeline.json>".into()))?;
    let text = ctx.read_string(path)?;
    let file =
        PipelineFile::from_json(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let mut cfg = file.config.clone();
    if let Some(b) = a.bootstrap {
        cfg.bootstrap = b;
    }
    if let Some(q) = a.q {
        cfg.q = q;
    }
    if let Some(p) = a.p_max {
        cfg.p_max = p;
    }
    if let Some(m) = a.min_overlap {
        cfg.min_overlap = m;
    }
    if let Some(f) = a.bh_family {
        cfg.bh_family = f.into();
    }
    if a.from.is_some() {
        cfg.from = a.from;
    }
    if a.to.is_some() {
        cfg.to = a.to;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    check_range(cfg.from, cfg.to)?;
    if !(0.0..=1.0).contains(&cfg.q) || cfg.bootstrap == 0 || cfg.p_max == 0 {
        return Err(Usage("q must be in [0, 1]; bootstrap and p_max must be >= 1".into()).into());
    }
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let specs = file.paths().map_err(|e| Usage(e.to_string()))?;
    for p in &specs {
        let full = base.join(p);
        let bytes = std::fs::read(&full).with_context(|| format!("reading {}", full.display()))?;
        ctx.record_input(&full, &bytes);
    }
    let groups = file.load(&base)?;
    let report = causality_pipeline(&groups, &cfg)?;
    ctx.write(&a.out_dir.join("causality.json"), |w| report.write_json(w))?;
    ctx.write(&a.out_dir.join("causality.csv"), |w| report.write_csv(w))?;
    ctx.detail("tests", report.tests.len());
    ctx.detail("arrows", report.arrows.len());
    let summary = format!(
        "causality: {} groups, {} tests, {} significant arrows (q = {}, B = {})",
        report.groups.len(),
        report.tests.len(),
        report.arrows.len(),
        cfg.q,
        cfg.bootstrap
    );
    Ok((summary, cfg.seed))
}

fn fringe_samples_from_graph(
    g: &DomainGraph,
    partisanship: &BTreeMap<String, f64>,
    min_connections: usize,
) -> Result<Vec<FringeSample>> {
    let mut out = Vec::new();
    for row in orientation_table(g) {
        let label = match g.label(&row.domain).category() {
            Category::Misinformation => FringeLabel::Misinformation,
            Category::Authentic => FringeLabel::Authentic,
            _ => continue,
        };
        if row.out_domains < min_connections.max(1) {
            continue;
        }
        let Some(&p) = partisanship.get(&row.domain) else {
            continue;
        };
        out.push(FringeSample::new(
            row.domain,
            p,
            row.oriented_out_pct,
            label,
        )?);
    }
    Ok(out)
}

fn read_partisanship(bytes: &[u8]) -> Result<BTreeMap<String, f64>> {
    #[derive(serde::Deserialize)]
    struct Row {
        domain: String,
        partisanship: f64,
    }
    let mut out = BTreeMap::new();
    for row in csv::Reader::from_reader(bytes).deserialize() {
        let r: Row = row?;
        if out.insert(r.domain.clone(), r.partisanship).is_some() {
            anyhow::bail!("duplicate partisanship row for {}", r.domain);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct FringeMetrics<'a> {
    trained: bool,
    train_size: usize,
    test_size: usize,
    evaluation: &'a fringeweb::scoring::Evaluation,
}

pub fn fringe(a: &FringeArgs, seed: u64, ctx: &mut RunContext) -> Result<String> {
    if !(a.train_fraction > 0.0 && a.train_fraction < 1.0) {
        return Err(Usage(format!(
            "--train-fraction must be in (0, 1), got {}",
            a.train_fraction
        ))
        .into());
    }
    if a.c.is_nan() || a.c <= 0.0 || a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Usage("--c and --tol must be positive".into()).into());
    }
    let samples = match (&a.input, &a.graph, &a.partisanship) {
        (Some(input), _, _) => {
            let bytes = ctx.read(input)?;
            read_fringe_csv(&bytes[..]).with_context(|| format!("reading {}", input.display()))?
        }
        (None, Some(graph), Some(part)) => {
            let g = load_graph(ctx, graph)?;
            let bytes = ctx.read(part)?;
            let partisanship =
                read_partisanship(&bytes).with_context(|| format!("reading {}", part.display()))?;
            let s = fringe_samples_from_graph(&g, &partisanship, a.min_connections)?;
            ctx.write(&a.out_dir.join("fringe_input.csv"), |w| {
                write_fringe_csv(w, &s)
            })?;
            s
        }
        _ => unreachable!("clap requires --input or --graph with --partisanship"),
    };
    if samples.is_empty() {
        anyhow::bail!("no labeled samples to score");
    }

    let (model, metrics_set, train_size) = match &a.model {
        Some(path) => {
            let bytes = ctx.read(path)?;
            let model = FringeModel::read_json(&bytes[..])
                .with_context(|| format!("reading {}", path.display()))?;
            (model, samples.iter().collect::<Vec<_>>(), 0)
        }
        None => {
            let split = split_train_test(&samples, a.train_fraction, seed)?;
            let (train, test) = split.select(&samples);
            let mode = if a.simplified {
                CalibrationMode::Simplified
            } else {
                CalibrationMode::Platt
            };
            let cfg = TrainConfig {
                c: a.c,
                tol: a.tol,
                mode,
            };
            let model = train_fringe(&train, &cfg)?;
            ctx.write(&a.out_dir.join("model.json"), |w| model.write_json(w))?;
            (model, test, train.len())
        }
    };
    let eval = evaluate(&model, &metrics_set)?;
    let scores: Vec<(String, f64)> = samples
        .iter()
        .map(|s| {
            (
                s.domain.clone(),
                model.score_checked(s.partisanship, s.conspiracy_pct).0,
            )
        })
        .collect();
    ctx.write(&a.out_dir.join("scores.csv"), |w| {
        write_scores_csv(w, &scores)
    })?;
    let metrics = FringeMetrics {
        trained: a.model.is_none(),
        train_size,
        test_size: metrics_set.len(),
        evaluation: &eval,
    };
    ctx.write(&a.out_dir.join("metrics.json"), |w| json_to(w, &metrics))?;
    ctx.detail("accuracy", eval.accuracy);
    Ok(format!(
        "fringe: {} samples scored; accuracy {:.4} on {} evaluated",
        scores.len(),
        eval.accuracy,
        metrics_set.len()
    ))
}

const REPORT_SOURCES: [Category; 4] = Category::LABELED;

pub fn report(a: &ReportArgs, ctx: &mut RunContext) -> Result<String> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Usage(format!("--alpha must be in (0, 1), got {}", a.alpha)).into());
    }
    let g = load_graph(ctx, &a.graph)?;
    let dir = &a.out_dir;

    let mut groups: Vec<Group> = fringeweb::graph::Subcategory::ALL
        .into_iter()
        .map(Group::Subcategory)
        .collect();
    groups.extend(
        [
            Category::Misinformation,
            Category::Authentic,
            Category::NonNews,
        ]
        .map(Group::Category),
    );
    let shared = shared_rows(&g, &groups, true)?;
    ctx.write(&dir.join("shared_pct.csv"), |w| {
        write_rows(w, ["group_a", "group_b", "shared_pct"], &shared)
    })?;

    let table = orientation_table(&g);
    ctx.write(&dir.join("oriented.csv"), |w| write_orientation(w, &table))?;

    let pairs = [
        (Category::Misinformation, Category::Conspiracy),
        (Category::Authentic, Category::Conspiracy),
        (Category::NonNews, Category::Conspiracy),
        (Category::Conspiracy, Category::Misinformation),
    ];
    let mut top = Vec::new();
    for (from, to) in pairs {
        for (i, (d, n)) in top_linked(&g, &Group::Category(from), &Group::Category(to), a.top)
            .into_iter()
            .enumerate()
        {
            top.push([
                from.to_string(),
                to.to_string(),
                (i + 1).to_string(),
                d,
                n.to_string(),
            ]);
        }
    }
    ctx.write(&dir.join("toplinked.csv"), |w| {
        write_rows(w, ["from", "to", "rank", "domain", "unique_urls"], &top)
    })?;

    let targets = target_set(&g, None);
    let mut trend = Vec::new();
    for source in REPORT_SOURCES {
        let points = targeted_pct_series(
            &g,
            &Group::Category(source),
            &targets,
            a.granularity,
            TrendMode::PerSource,
        );
        for [p, v, n] in trend_rows(&points) {
            trend.push([source.to_string(), p, v, n]);
        }
    }
    ctx.write(&dir.join("trend.csv"), |w| {
        write_rows(w, ["source", "period", "value", "n_sources"], &trend)
    })?;

    let cent = centrality_report(&g, ctx, &CentralityConfig::default())?;
    ctx.write(&dir.join("centrality.csv"), |w| cent.write_csv(w))?;

    let tests = rank_tests(&g, &cent, a.alpha)?;
    ctx.write(&dir.join("centrality_tests.csv"), |w| {
        write_rows(
            w,
            [
                "metric",
                "group_a",
                "group_b",
                "n_a",
                "n_b",
                "u",
                "p_value",
                "method",
                "bonferroni_reject",
            ],
            &tests,
        )
    })?;

    let oriented = table.iter().filter(|r| r.oriented).count();
    ctx.detail("nodes", g.node_count());
    ctx.detail("edges", g.edge_count());
    ctx.detail("oriented", oriented);
    Ok(format!(
        "report: {} nodes, {} edges, {} conspiracy-oriented, {} rank tests",
        g.node_count(),
        g.edge_count(),
        oriented,
        tests.len()
    ))
}

/// Mann-Whitney tests of harmonic and PageRank scores between every pair of
/// labeled categories, Bonferroni-corrected over the whole table.
type Metric = fn(&fringeweb::centrality::CentralityRow) -> f64;

fn rank_tests(g: &DomainGraph, cent: &CentralityReport, alpha: f64) -> Result<Vec<[String; 9]>> {
    let by_cat = |c: Category, metric: Metric| -> Vec<f64> {
        cent.rows
            .iter()
            .filter(|r| g.label(&r.domain).category() == c)
            .map(metric)
            .collect()
    };
    let metrics: [(&str, Metric); 2] = [("harmonic", |r| r.harmonic), ("pagerank", |r| r.pagerank)];
    let mut rows = Vec::new();
    let mut pvals = Vec::new();
    for (name, metric) in metrics {
        for (i, &ca) in REPORT_SOURCES.iter().enumerate() {
            for &cb in &REPORT_SOURCES[i + 1..] {
                let (xa, xb) = (by_cat(ca, metric), by_cat(cb, metric));
                if xa.is_empty() || xb.is_empty() {
                    continue;
                }
                let mw = mann_whitney_u(&xa, &xb)?;
                pvals.push(mw.p_value);
                rows.push([
                    name.to_string(),
                    ca.to_string(),
                    cb.to_string(),
                    xa.len().to_string(),
                    xb.len().to_string(),
                    mw.u.to_string(),
                    mw.p_value.to_string(),
                    format!("{:?}", mw.method).to_lowercase(),
                    String::new(),
                ]);
            }
        }
    }
    for (row, reject) in rows.iter_mut().zip(bonferroni(&pvals, alpha)) {
        row[8] = reject.to_string();
    }
    Ok(rows)
}
