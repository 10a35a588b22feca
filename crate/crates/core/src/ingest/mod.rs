//! Raw pages to canonical, dated domain-to-domain link records.

pub mod crawl;
pub mod domain;
pub mod html;
pub mod pages;

pub use crawl::{
    crawl, ArchiveFetcher, Clock, CrawlFrontier, CrawlReport, CrawledPage, Fetched, Fetcher,
    SystemClock, DEFAULT_POLITENESS_MS,
};
pub use domain::{canonical_domain, canonical_domain_with, canonical_host, domain_of, DomainMode};
pub use html::{extract_links, extract_publication_date, ExtractedLinks, HtmlPage};
pub use pages::{
    ingest_pages, read_links_csv, read_pages_jsonl, write_links_csv, write_pages_jsonl,
    IngestOutput, IngestReport, LinkRecord, PageLine, PageRecord,
};
