//! Registered-domain canonicalization.
//!
//! Suffix rules come from the public-suffix snapshot compiled into the `psl`
//! crate, so results only change when that dependency is bumped.

use url::{Host, Url};

use crate::{Error, Result};

/// How much of a host name survives canonicalization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum DomainMode {
    /// Collapse to the registrable domain (`forum.tfes.org` -> `tfes.org`).
    #[default]
    Registered,
    /// Keep every label below the suffix except a leading `www.`.
    MultiLabel,
}

/// Registered domain of `url` in the default [`DomainMode::Registered`] mode.
pub fn canonical_domain(url: &str) -> Result<String> {
    canonical_domain_with(url, DomainMode::Registered)
}

pub fn canonical_domain_with(url: &str, mode: DomainMode) -> Result<String> {
    let parsed = Url::parse(url.trim()).map_err(|e| Error::UrlParse {
        url: url.to_string(),
        reason: e.to_string(),
    })?;
    domain_of(&parsed, mode).ok_or_else(|| Error::UrlParse {
        url: url.to_string(),
        reason: "url has no host".into(),
    })
}

/// Canonical domain of an already parsed URL; `None` when it has no host.
pub fn domain_of(url: &Url, mode: DomainMode) -> Option<String> {
    match url.host()? {
        Host::Ipv4(_) | Host::Ipv6(_) => url.host_str().map(str::to_string),
        Host::Domain(d) => Some(canonical_host(d, mode)),
    }
}

/// Canonicalizes a bare host name such as the entries of a label table.
pub fn canonical_host(host: &str, mode: DomainMode) -> String {
    let host = host.trim().trim_end_matches('.').to_ascii_lowercase();
    let host = host.strip_prefix("www.").unwrap_or(&host).to_string();
    match mode {
        DomainMode::MultiLabel => host,
        DomainMode::Registered => match psl::domain_str(&host) {
            Some(d) => d.to_string(),
            None => host,
        },
    }
}
