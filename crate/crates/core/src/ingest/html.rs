//! Tolerant HTML scraping: anchors, publication dates and visible text.

use std::borrow::Cow;

use chrono::NaiveDate;
use scraper::{Html, Node, Selector};
use url::Url;

/// Earliest publication date accepted from any source.
pub const MIN_PUBLICATION_DATE: NaiveDate = match NaiveDate::from_ymd_opt(1995, 1, 1) {
    Some(d) => d,
    None => panic!("valid constant"),
};

const DATE_META_KEYS: [&str; 4] = [
    "article:published_time",
    "og:published_time",
    "datepublished",
    "article:published",
];

/// Anchors found on a page plus a count of hrefs (or whole bodies) that
/// could not be used.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedLinks {
    pub links: Vec<String>,
    pub diagnostics: usize,
}

/// Decodes a body as UTF-8, refusing obviously binary payloads.
pub fn decode_body(body: &[u8]) -> Option<Cow<'_, str>> {
    if body.contains(&0) {
        return None;
    }
    let text = String::from_utf8_lossy(body);
    if let Cow::Owned(ref s) = text {
        let bad = s
            .chars()
            .filter(|&c| c == char::REPLACEMENT_CHARACTER)
            .count();
        if bad * 10 > s.chars().count() {
            return None;
        }
    }
    Some(text)
}

/// A parsed document that can answer all extraction queries.
pub struct HtmlPage {
    doc: Html,
}

impl HtmlPage {
    pub fn parse(body: &[u8]) -> Option<Self> {
        decode_body(body).map(|text| HtmlPage {
            doc: Html::parse_document(&text),
        })
    }

    /// Every `<a href>`, resolved against `<base href>` (if any) and then the
    /// page URL. Fragments are removed and only http(s) targets are kept.
    pub fn links(&self, page_url: &Url) -> ExtractedLinks {
        let base_sel = Selector::parse("base[href]").expect("static selector");
        let anchor_sel = Selector::parse("a[href]").expect("static selector");

        let base = self
            .doc
            .select(&base_sel)
            .next()
            .and_then(|b| b.value().attr("href"))
            .and_then(|h| page_url.join(h.trim()).ok())
            .unwrap_or_else(|| page_url.clone());

        let mut out = ExtractedLinks::default();
        for a in self.doc.select(&anchor_sel) {
            let href = a.value().attr("href").unwrap_or_default().trim();
            if href.is_empty() || href.starts_with('#') {
                continue;
            }
            match base.join(href) {
                Ok(mut u) if matches!(u.scheme(), "http" | "https") && u.host().is_some() => {
                    u.set_fragment(None);
                    out.links.push(u.into());
                }
                // javascript:, mailto:, data:, tel: ...
                Ok(_) => {}
                Err(_) => out.diagnostics += 1,
            }
        }
        out
    }

    /// Publication date by priority: metadata, then `<time datetime>`, then a
    /// dated URL path. Within one level the earliest valid date wins. Dates
    /// outside `[1995-01-01, not_after]` are ignored.
    pub fn publication_date(&self, url: &Url, not_after: NaiveDate) -> Option<NaiveDate> {
        let valid = |d: &NaiveDate| *d >= MIN_PUBLICATION_DATE && *d <= not_after;
        let earliest = |v: Vec<NaiveDate>| v.into_iter().filter(valid).min();

        earliest(self.metadata_dates())
            .or_else(|| earliest(self.time_element_dates()))
            .or_else(|| url_path_date(url).filter(valid))
    }

    fn metadata_dates(&self) -> Vec<NaiveDate> {
        let meta_sel = Selector::parse("meta[content]").expect("static selector");
        let ld_sel =
            Selector::parse(r#"script[type="application/ld+json"]"#).expect("static selector");

        let mut dates = Vec::new();
        for m in self.doc.select(&meta_sel) {
            let el = m.value();
            let key = ["property", "name", "itemprop"]
                .iter()
                .find_map(|k| el.attr(k))
                .unwrap_or_default()
                .to_ascii_lowercase();
            if DATE_META_KEYS.contains(&key.as_str()) {
                dates.extend(el.attr("content").and_then(parse_date_prefix));
            }
        }
        for script in self.doc.select(&ld_sel) {
            let text: String = script.text().collect();
            if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
                collect_json_dates(&v, &mut dates);
            }
        }
        dates
    }

    fn time_element_dates(&self) -> Vec<NaiveDate> {
        let sel = Selector::parse("time[datetime]").expect("static selector");
        self.doc
            .select(&sel)
            .filter_map(|t| t.value().attr("datetime").and_then(parse_date_prefix))
            .collect()
    }

    /// Text content outside `script`, `style`, `noscript` and `template`,
    /// whitespace-collapsed.
    pub fn visible_text(&self) -> String {
        let mut out = String::new();
        for node in self.doc.tree.nodes() {
            let Node::Text(t) = node.value() else {
                continue;
            };
            let hidden = node.ancestors().any(|a| {
                a.value().as_element().is_some_and(|e| {
                    matches!(
                        e.name(),
                        "script" | "style" | "noscript" | "template" | "head"
                    )
                })
            });
            if hidden {
                continue;
            }
            for word in t.split_whitespace() {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(word);
            }
        }
        out
    }
}

fn collect_json_dates(v: &serde_json::Value, out: &mut Vec<NaiveDate>) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map {
                if k == "datePublished" {
                    if let Some(d) = val.as_str().and_then(parse_date_prefix) {
                        out.push(d);
                    }
                } else {
                    collect_json_dates(val, out);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter().for_each(|i| collect_json_dates(i, out)),
        _ => {}
    }
}

/// Reads the calendar date at the start of an ISO-8601 style string
/// (`2020-03-14`, `2020-03-14T09:00:00Z`, `2020-03-14 09:00`).
pub fn parse_date_prefix(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    let head = s.get(..10)?;
    let rest = &s[10..];
    if !(rest.is_empty() || rest.starts_with(['T', 't', ' '])) {
        return None;
    }
    NaiveDate::parse_from_str(head, "%Y-%m-%d").ok()
}

/// A `/YYYY/MM/DD/` or `/YYYY-MM-DD/` segment of the URL path.
pub fn url_path_date(url: &Url) -> Option<NaiveDate> {
    let segs: Vec<&str> = url.path_segments()?.collect();
    let digits = |s: &str, n: usize| s.len() == n && s.bytes().all(|b| b.is_ascii_digit());
    for (i, seg) in segs.iter().enumerate() {
        if digits(seg, 4) && i + 2 < segs.len() && digits(segs[i + 1], 2) && digits(segs[i + 2], 2)
        {
            let ymd = format!("{}-{}-{}", seg, segs[i + 1], segs[i + 2]);
            if let Ok(d) = NaiveDate::parse_from_str(&ymd, "%Y-%m-%d") {
                return Some(d);
            }
        }
        if seg.len() == 10 && seg.as_bytes()[4] == b'-' && seg.as_bytes()[7] == b'-' {
            if let Ok(d) = NaiveDate::parse_from_str(seg, "%Y-%m-%d") {
                return Some(d);
            }
        }
    }
    None
}

/// Links of an HTML body. Unreadable bodies give an empty list and one
/// diagnostic.
pub fn extract_links(body: &[u8], base_url: &Url) -> ExtractedLinks {
    match HtmlPage::parse(body) {
        Some(page) => page.links(base_url),
        None => ExtractedLinks {
            links: Vec::new(),
            diagnostics: 1,
        },
    }
}

pub fn extract_publication_date(body: &[u8], url: &Url, not_after: NaiveDate) -> Option<NaiveDate> {
    match HtmlPage::parse(body) {
        Some(page) => page.publication_date(url, not_after),
        None => url_path_date(url).filter(|d| *d >= MIN_PUBLICATION_DATE && *d <= not_after),
    }
}
