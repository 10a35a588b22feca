//! Breadth-first site crawl over a pluggable fetcher.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use url::Url;

use super::domain::{domain_of, DomainMode};
use super::pages::PageRecord;
use crate::{Error, Result};

pub const DEFAULT_POLITENESS_MS: u64 = 1000;

/// A successfully fetched body.
#[derive(Debug, Clone)]
pub struct Fetched {
    pub body: Vec<u8>,
    pub fetch_time: DateTime<Utc>,
}

/// Source of page bodies. Each URL is requested at most once per crawl.
pub trait Fetcher {
    fn fetch(&mut self, url: &Url) -> std::result::Result<Fetched, String>;
}

/// Time source used for per-domain politeness.
pub trait Clock {
    fn now_ms(&self) -> u64;
    fn sleep_ms(&mut self, ms: u64);
}

pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        self.0.elapsed().as_millis() as u64
    }

    fn sleep_ms(&mut self, ms: u64) {
        std::thread::sleep(Duration::from_millis(ms));
    }
}

/// Serves pages from an in-memory archive keyed by URL, e.g. a previously
/// captured `pages.jsonl`.
#[derive(Debug, Default, Clone)]
pub struct ArchiveFetcher {
    pages: HashMap<String, Fetched>,
}

impl ArchiveFetcher {
    pub fn insert(&mut self, url: &str, fetched: Fetched) {
        self.pages.insert(normalize(url), fetched);
    }

    pub fn from_pages<'a>(pages: impl IntoIterator<Item = &'a PageRecord>) -> Self {
        let mut f = ArchiveFetcher::default();
        for p in pages {
            f.insert(
                p.url.as_str(),
                Fetched {
                    body: p.body.clone(),
                    fetch_time: p.fetch_time,
                },
            );
        }
        f
    }
}

impl Fetcher for ArchiveFetcher {
    fn fetch(&mut self, url: &Url) -> std::result::Result<Fetched, String> {
        self.pages
            .get(&normalize(url.as_str()))
            .cloned()
            .ok_or_else(|| format!("{url} not in archive"))
    }
}

fn normalize(url: &str) -> String {
    match Url::parse(url) {
        Ok(mut u) => {
            u.set_fragment(None);
            u.into()
        }
        Err(_) => url.to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct CrawlFrontier {
    pub hop_limit: usize,
    pub politeness_ms: u64,
    pub mode: DomainMode,
    queue: VecDeque<(Url, usize)>,
    seen: HashSet<String>,
}

impl CrawlFrontier {
    pub fn new<S: AsRef<str>>(seeds: &[S], hop_limit: usize) -> Result<Self> {
        let mut frontier = CrawlFrontier {
            hop_limit,
            politeness_ms: DEFAULT_POLITENESS_MS,
            mode: DomainMode::Registered,
            queue: VecDeque::new(),
            seen: HashSet::new(),
        };
        for s in seeds {
            let mut u = Url::parse(s.as_ref().trim()).map_err(|e| Error::UrlParse {
                url: s.as_ref().to_string(),
                reason: e.to_string(),
            })?;
            u.set_fragment(None);
            frontier.push(u, 0);
        }
        Ok(frontier)
    }

    pub fn with_politeness_ms(mut self, ms: u64) -> Self {
        self.politeness_ms = ms;
        self
    }

    fn push(&mut self, url: Url, hop: usize) -> bool {
        if self.seen.insert(url.to_string()) {
            self.queue.push_back((url, hop));
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrawledPage {
    pub page: PageRecord,
    pub hop: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrawlReport {
    pub fetched: usize,
    /// `(url, reason)` for every failed fetch; failures are never retried.
    pub errors: Vec<(String, String)>,
    /// Distinct same-site URLs discovered one hop past the limit.
    pub beyond_limit: usize,
    /// Milliseconds spent waiting on per-domain politeness.
    pub waited_ms: u64,
}

/// Crawls breadth first. Pages at hop `h < hop_limit` enqueue their same-site
/// links at `h + 1`; cross-site links stay as leaf entries in `out_links`.
pub fn crawl(
    mut frontier: CrawlFrontier,
    fetcher: &mut dyn Fetcher,
    clock: &mut dyn Clock,
) -> (Vec<CrawledPage>, CrawlReport) {
    let mut pages = Vec::new();
    let mut report = CrawlReport::default();
    let mut last_hit: BTreeMap<String, u64> = BTreeMap::new();
    let mut beyond: HashSet<String> = HashSet::new();

    while let Some((url, hop)) = frontier.queue.pop_front() {
        let domain = domain_of(&url, frontier.mode).unwrap_or_default();
        if let Some(&last) = last_hit.get(&domain) {
            let ready = last + frontier.politeness_ms;
            let now = clock.now_ms();
            if now < ready {
                clock.sleep_ms(ready - now);
                report.waited_ms += ready - now;
            }
        }
        last_hit.insert(domain.clone(), clock.now_ms());

        let fetched = match fetcher.fetch(&url) {
            Ok(f) => f,
            Err(reason) => {
                report.errors.push((url.to_string(), reason));
                continue;
            }
        };
        let page = match PageRecord::from_html(url.clone(), fetched.fetch_time, fetched.body) {
            Ok(p) => p,
            Err(e) => {
                report.errors.push((url.to_string(), e.to_string()));
                continue;
            }
        };
        report.fetched += 1;

        for link in &page.out_links {
            let Ok(target) = Url::parse(link) else {
                continue;
            };
            if domain_of(&target, frontier.mode).as_deref() != Some(domain.as_str()) {
                continue;
            }
            if hop < frontier.hop_limit {
                frontier.push(target, hop + 1);
            } else if !frontier.seen.contains(target.as_str()) {
                beyond.insert(target.to_string());
            }
        }
        pages.push(CrawledPage { page, hop });
    }
    report.beyond_limit = beyond.len();
    (pages, report)
}
