//! Page records, the `pages.jsonl` corpus format and link-record ingest.

use std::io::{BufRead, Write};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use url::Url;

use super::domain::{domain_of, DomainMode};
use super::html::{HtmlPage, MIN_PUBLICATION_DATE};
use crate::graph::LabelTable;
use crate::{par, Error, Result};

/// One fetched page.
#[derive(Debug, Clone, PartialEq)]
pub struct PageRecord {
    pub url: Url,
    pub fetch_time: DateTime<Utc>,
    /// Raw HTML; empty for corpora that ship pre-extracted links.
    pub body: Vec<u8>,
    pub publication_date: Option<NaiveDate>,
    /// Absolute http(s) targets in order of appearance.
    pub out_links: Vec<String>,
    /// Hrefs that could not be resolved (or 1 for an unreadable body).
    pub link_diagnostics: usize,
}

impl PageRecord {
    /// Builds a record from raw HTML, extracting links and the publication date.
    pub fn from_html(url: Url, fetch_time: DateTime<Utc>, body: Vec<u8>) -> Result<Self> {
        check_http(&url)?;
        let (out_links, link_diagnostics, publication_date) = match HtmlPage::parse(&body) {
            Some(page) => {
                let links = page.links(&url);
                let date = page.publication_date(&url, fetch_time.date_naive());
                (links.links, links.diagnostics, date)
            }
            None => (Vec::new(), 1, None),
        };
        Ok(PageRecord {
            url,
            fetch_time,
            body,
            publication_date,
            out_links,
            link_diagnostics,
        })
    }

    /// Builds a record from an already extracted link list. Relative links
    /// are resolved against `url`; non-http targets are dropped.
    pub fn from_links(
        url: Url,
        fetch_time: DateTime<Utc>,
        links: &[String],
        publication_date: Option<NaiveDate>,
    ) -> Result<Self> {
        check_http(&url)?;
        let mut out_links = Vec::with_capacity(links.len());
        let mut link_diagnostics = 0;
        for l in links {
            match url.join(l.trim()) {
                Ok(mut u) if matches!(u.scheme(), "http" | "https") && u.host().is_some() => {
                    u.set_fragment(None);
                    out_links.push(u.into());
                }
                Ok(_) => {}
                Err(_) => link_diagnostics += 1,
            }
        }
        let publication_date = publication_date
            .filter(|d| *d >= MIN_PUBLICATION_DATE && *d <= fetch_time.date_naive());
        Ok(PageRecord {
            url,
            fetch_time,
            body: Vec::new(),
            publication_date,
            out_links,
            link_diagnostics,
        })
    }

    /// Parses one `pages.jsonl` entry.
    pub fn from_line(line: &PageLine) -> Result<Self> {
        let url = Url::parse(&line.url).map_err(|e| Error::UrlParse {
            url: line.url.clone(),
            reason: e.to_string(),
        })?;
        let fetch_time = DateTime::parse_from_rfc3339(&line.fetch_time)
            .map_err(|e| Error::malformed(&line.url, format!("fetch_time: {e}")))?
            .with_timezone(&Utc);
        match (&line.html_b64, &line.links) {
            (Some(b64), _) => {
                let body = B64
                    .decode(b64.trim())
                    .map_err(|e| Error::malformed(&line.url, format!("html_b64: {e}")))?;
                Self::from_html(url, fetch_time, body)
            }
            (None, Some(links)) => {
                let date = match line.pub_date.as_deref().map(str::trim) {
                    None | Some("") => None,
                    Some(s) => Some(
                        NaiveDate::parse_from_str(s, "%Y-%m-%d")
                            .map_err(|e| Error::malformed(&line.url, format!("pub_date: {e}")))?,
                    ),
                };
                Self::from_links(url, fetch_time, links, date)
            }
            (None, None) => Err(Error::malformed(
                &line.url,
                "neither html_b64 nor links present",
            )),
        }
    }

    /// The `pages.jsonl` form of this record. Pages with a body are stored as
    /// HTML, the rest as link lists.
    pub fn to_line(&self) -> PageLine {
        let fetch_time = self
            .fetch_time
            .to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true);
        if self.body.is_empty() {
            PageLine {
                url: self.url.to_string(),
                fetch_time,
                html_b64: None,
                links: Some(self.out_links.clone()),
                pub_date: self.publication_date.map(|d| d.to_string()),
            }
        } else {
            PageLine {
                url: self.url.to_string(),
                fetch_time,
                html_b64: Some(B64.encode(&self.body)),
                links: None,
                pub_date: None,
            }
        }
    }
}

fn check_http(url: &Url) -> Result<()> {
    if matches!(url.scheme(), "http" | "https") && url.host().is_some() {
        Ok(())
    } else {
        Err(Error::UrlParse {
            url: url.to_string(),
            reason: "page url must be absolute http(s)".into(),
        })
    }
}

/// One line of `pages.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageLine {
    pub url: String,
    pub fetch_time: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub html_b64: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub links: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pub_date: Option<String>,
}

/// Reads `pages.jsonl`, decoding and parsing pages in parallel. Each entry is
/// either a record or the error that made it unusable; blank lines are
/// skipped. Output order follows input order.
pub fn read_pages_jsonl(reader: impl BufRead) -> Result<Vec<Result<PageRecord>>> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push((i + 1, line));
        }
    }
    Ok(par::map_slice(&lines, |(no, line)| {
        serde_json::from_str::<PageLine>(line)
            .map_err(|e| Error::malformed(format!("line {no}"), e.to_string()))
            .and_then(|l| PageRecord::from_line(&l))
    }))
}

pub fn write_pages_jsonl<'a>(
    mut w: impl Write,
    pages: impl IntoIterator<Item = &'a PageRecord>,
) -> Result<()> {
    for p in pages {
        serde_json::to_writer(&mut w, &p.to_line())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// An external hyperlink between two registered domains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkRecord {
    pub source_domain: String,
    pub target_domain: String,
    pub source_url: String,
    pub target_url: String,
    pub pub_date: Option<NaiveDate>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub pages: usize,
    pub corrupt_pages: usize,
    pub links: usize,
    pub dateless_pages: usize,
    pub dropped_internal: usize,
    pub link_diagnostics: usize,
    /// Pages whose source domain has no entry in the label table.
    pub unlabeled_source_pages: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestOutput {
    pub records: Vec<LinkRecord>,
    pub report: IngestReport,
}

/// Turns pages into external link records. Same-domain links are dropped and
/// counted; corrupt entries are skipped and counted.
pub fn ingest_pages<I>(pages: I, labels: Option<&LabelTable>, mode: DomainMode) -> IngestOutput
where
    I: IntoIterator<Item = Result<PageRecord>>,
{
    let mut out = IngestOutput::default();
    for page in pages {
        let page = match page {
            Ok(p) => p,
            Err(_) => {
                out.report.corrupt_pages += 1;
                continue;
            }
        };
        let Some(source_domain) = domain_of(&page.url, mode) else {
            out.report.corrupt_pages += 1;
            continue;
        };
        out.report.pages += 1;
        out.report.link_diagnostics += page.link_diagnostics;
        if page.publication_date.is_none() {
            out.report.dateless_pages += 1;
        }
        if labels.is_some_and(|l| !l.contains(&source_domain)) {
            out.report.unlabeled_source_pages += 1;
        }
        let source_url = page.url.to_string();
        for target in &page.out_links {
            let Some(target_domain) = Url::parse(target).ok().and_then(|u| domain_of(&u, mode))
            else {
                out.report.link_diagnostics += 1;
                continue;
            };
            if target_domain == source_domain {
                out.report.dropped_internal += 1;
                continue;
            }
            out.report.links += 1;
            out.records.push(LinkRecord {
                source_domain: source_domain.clone(),
                target_domain,
                source_url: source_url.clone(),
                target_url: target.clone(),
                pub_date: page.publication_date,
            });
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct LinkRow {
    source_domain: String,
    target_domain: String,
    source_url: String,
    target_url: String,
    pub_date: String,
}

/// Writes `links.csv`: `source_domain,target_domain,source_url,target_url,pub_date`.
pub fn write_links_csv<'a>(
    w: impl Write,
    records: impl IntoIterator<Item = &'a LinkRecord>,
) -> Result<()> {
    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    csv.write_record([
        "source_domain",
        "target_domain",
        "source_url",
        "target_url",
        "pub_date",
    ])?;
    for r in records {
        csv.serialize(LinkRow {
            source_domain: r.source_domain.clone(),
            target_domain: r.target_domain.clone(),
            source_url: r.source_url.clone(),
            target_url: r.target_url.clone(),
            pub_date: r.pub_date.map(|d| d.to_string()).unwrap_or_default(),
        })?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_links_csv(r: impl std::io::Read) -> Result<Vec<LinkRecord>> {
    let mut csv = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (i, row) in csv.deserialize::<LinkRow>().enumerate() {
        let row = row?;
        let pub_date = match row.pub_date.trim() {
            "" => None,
            s => Some(NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| {
                Error::malformed(format!("links.csv row {}", i + 1), e.to_string())
            })?),
        };
        if row.source_domain == row.target_domain {
            return Err(Error::malformed(
                format!("links.csv row {}", i + 1),
                "self link between identical domains",
            ));
        }
        out.push(LinkRecord {
            source_domain: row.source_domain,
            target_domain: row.target_domain,
            source_url: row.source_url,
            target_url: row.target_url,
            pub_date,
        });
    }
    Ok(out)
}
