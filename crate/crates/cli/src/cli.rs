use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fringeweb::analytics::{Granularity, TrendMode, DEFAULT_MIN_CONNECTIONS};
use fringeweb::causality::BhFamily;
use fringeweb::centrality::{Orientation, DEFAULT_DAMPING};
use fringeweb::graph::Group;
use fringeweb::ingest::DomainMode;
use fringeweb::scoring::{DEFAULT_C, DEFAULT_TOL, DEFAULT_TRAIN_FRACTION};
use fringeweb::stats::{DEFAULT_DCG_FLOOR, DEFAULT_RANK_WINDOW};

#[derive(Debug, Parser)]
#[command(
    name = "fringeweb",
    version,
    about = "Hyperlink-graph measurement of conspiracy and misinformation news domains",
    args_override_self = true
)]
pub struct Cli {
    /// Seed for every random choice (train/test split, bootstrap).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads. Outputs do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// JSON config. For `causality` this is the pipeline file; for other
    /// commands its keys are flag names and explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Where to write run_manifest.json (default: beside the outputs).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract external link records from captured pages.
    Extract(ExtractArgs),
    /// Replay a breadth-first crawl against a page archive.
    Crawl(CrawlArgs),
    /// Build the domain graph from link records.
    Graph(GraphArgs),
    /// Shared out-link percentages between groups.
    Similarity(SimilarityArgs),
    /// Rank domains by out-link overlap with a seed set.
    Discover(DiscoverArgs),
    /// Conspiracy-orientation of every domain.
    Oriented(OrientedArgs),
    /// Per-period share of links into a target set.
    Trend(TrendArgs),
    /// Harmonic, PageRank and HITS scores.
    Centrality(CentralityArgs),
    /// Median-rank or DCG popularity series for a group.
    Popularity(PopularityArgs),
    /// Daily count of pages mentioning a keyword.
    Mentions(MentionsArgs),
    /// Stationarize, fit VARs and run partial Granger tests.
    Causality(CausalityArgs),
    /// Train or apply the fringe score model.
    Fringe(FringeArgs),
    /// Every graph table plus centrality rank tests in one directory.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Extract(_) => "extract",
            Command::Crawl(_) => "crawl",
            Command::Graph(_) => "graph",
            Command::Similarity(_) => "similarity",
            Command::Discover(_) => "discover",
            Command::Oriented(_) => "oriented",
            Command::Trend(_) => "trend",
            Command::Centrality(_) => "centrality",
            Command::Popularity(_) => "popularity",
            Command::Mentions(_) => "mentions",
            Command::Causality(_) => "causality",
            Command::Fringe(_) => "fringe",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum DomainModeArg {
    #[default]
    Registered,
    MultiLabel,
}

impl From<DomainModeArg> for DomainMode {
    fn from(m: DomainModeArg) -> Self {
        match m {
            DomainModeArg::Registered => DomainMode::Registered,
            DomainModeArg::MultiLabel => DomainMode::MultiLabel,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Captured pages, one JSON object per line.
    #[arg(long)]
    pub pages: PathBuf,
    /// Output links.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// labels.csv; pages from unlabeled sources are counted in the report.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub domain_mode: DomainModeArg,
    /// Also write the ingest counters as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrawlArgs {
    /// Seed URLs, one per line.
    #[arg(long)]
    pub seeds: PathBuf,
    /// Page archive (pages.jsonl) served in place of the network.
    #[arg(long)]
    pub archive: PathBuf,
    /// Output pages.jsonl.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub hop_limit: usize,
    #[arg(long, default_value_t = fringeweb::ingest::DEFAULT_POLITENESS_MS)]
    pub politeness_ms: u64,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub links: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Output directory for graph.bin, edges.csv, edge_dates.csv, nodes.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Keep only links dated on or after this day.
    #[arg(long)]
    pub from: Option<NaiveDate>,
    /// Keep only links dated on or before this day.
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct SimilarityArgs {
    /// graph.bin snapshot.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Groups to compare (category or subcategory names).
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "qanon,covid,ufo,nineeleven,flatearth"
    )]
    pub groups: Vec<Group>,
    /// Count members of the other group as shared out-links too.
    #[arg(long)]
    pub include_members: bool,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seed domains, one per line.
    #[arg(long, conflicts_with = "group", required_unless_present = "group")]
    pub seed_domains: Option<PathBuf>,
    /// Use every member of this group as the seed set.
    #[arg(long)]
    pub group: Option<Group>,
    #[arg(short, long, default_value_t = 50)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_CONNECTIONS)]
    pub min_connections: usize,
}

#[derive(Debug, Args)]
pub struct OrientedArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "misinformation")]
    pub source: Group,
    /// Target group; by default the conspiracy-oriented domains.
    #[arg(long)]
    pub target: Option<Group>,
    #[arg(long, default_value = "year")]
    pub granularity: Granularity,
    /// per-source or pooled.
    #[arg(long, default_value = "per-source")]
    pub mode: TrendMode,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// inbound or outbound harmonic centrality.
    #[arg(long, default_value = "inbound")]
    pub orientation: Orientation,
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    pub damping: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PopularityMetric {
    Median,
    Dcg,
}

#[derive(Debug, Args)]
pub struct PopularityArgs {
    /// ranks.csv: date,domain,rank.
    #[arg(long)]
    pub ranks: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// labels.csv used to resolve --group.
    #[arg(long, requires = "group")]
    pub labels: Option<PathBuf>,
    #[arg(long, requires = "labels", conflicts_with = "domains")]
    pub group: Option<Group>,
    /// Group domains, one per line.
    #[arg(long, required_unless_present = "group")]
    pub domains: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "median")]
    pub metric: PopularityMetric,
    /// Trailing moving-average window for the median rank.
    #[arg(long, default_value_t = DEFAULT_RANK_WINDOW)]
    pub window: usize,
    /// Rank assigned to unranked group members in the DCG.
    #[arg(long, default_value_t = DEFAULT_DCG_FLOOR)]
    pub floor: u32,
    #[arg(long)]
    pub from: Option<NaiveDate>,
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct MentionsArgs {
    #[arg(long)]
    pub pages: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub keyword: String,
    #[arg(long)]
    pub from: NaiveDate,
    #[arg(long)]
    pub to: NaiveDate,
}

#[derive(Debug, Args)]
pub struct CausalityArgs {
    /// Output directory for causality.json and causality.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub bootstrap: Option<usize>,
    /// Benjamini-Hochberg false discovery rate.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub min_overlap: Option<usize>,
    #[arg(long, value_enum)]
    pub bh_family: Option<BhFamilyArg>,
    #[arg(long)]
    pub from: Option<NaiveDate>,
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BhFamilyArg {
    Joint,
    PerGroup,
}

impl From<BhFamilyArg> for BhFamily {
    fn from(b: BhFamilyArg) -> Self {
        match b {
            BhFamilyArg::Joint => BhFamily::Joint,
            BhFamilyArg::PerGroup => BhFamily::PerGroup,
        }
    }
}

#[derive(Debug, Args)]
pub struct FringeArgs {
    /// fringe_input.csv: domain,partisanship,conspiracy_pct,label.
    #[arg(long, required_unless_present = "graph")]
    pub input: Option<PathBuf>,
    /// Build the input from a graph snapshot instead.
    #[arg(long, conflicts_with = "input", requires = "partisanship")]
    pub graph: Option<PathBuf>,
    /// domain,partisanship CSV used with --graph.
    #[arg(long)]
    pub partisanship: Option<PathBuf>,
    /// Skip domains with fewer out-domains when building from a graph.
    #[arg(long, default_value_t = 1)]
    pub min_connections: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Score with this model.json instead of training.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
    /// SVM regularization constant.
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Fixed logistic link (A = -1, B = 0) instead of a Platt fit.
    #[arg(long)]
    pub simplified: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "year")]
    pub granularity: Granularity,
    /// Rows per pair in toplinked.csv.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Family-wise level for the Bonferroni-corrected rank tests.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}
