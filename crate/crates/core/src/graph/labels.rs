//! Category labels and `labels.csv`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::{canonical_host, DomainMode};
use crate::{Error, Result};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Conspiracy,
    Misinformation,
    Authentic,
    NonNews,
    #[default]
    Unlabeled,
}

impl Category {
    pub const LABELED: [Category; 4] = [
        Category::Conspiracy,
        Category::Misinformation,
        Category::Authentic,
        Category::NonNews,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Conspiracy => "conspiracy",
            Category::Misinformation => "misinformation",
            Category::Authentic => "authentic",
            Category::NonNews => "nonnews",
            Category::Unlabeled => "unlabeled",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', '_', ' '], "")
            .as_str()
        {
            "conspiracy" => Ok(Category::Conspiracy),
            "misinformation" | "misinfo" => Ok(Category::Misinformation),
            "authentic" => Ok(Category::Authentic),
            "nonnews" => Ok(Category::NonNews),
            "unlabeled" | "" => Ok(Category::Unlabeled),
            other => Err(Error::invalid(format!("unknown category {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subcategory {
    QAnon,
    Covid,
    Ufo,
    NineEleven,
    FlatEarth,
}

impl Subcategory {
    pub const ALL: [Subcategory; 5] = [
        Subcategory::QAnon,
        Subcategory::Covid,
        Subcategory::Ufo,
        Subcategory::NineEleven,
        Subcategory::FlatEarth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Subcategory::QAnon => "qanon",
            Subcategory::Covid => "covid",
            Subcategory::Ufo => "ufo",
            Subcategory::NineEleven => "nineeleven",
            Subcategory::FlatEarth => "flatearth",
        }
    }
}

impl fmt::Display for Subcategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Subcategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', '_', ' ', '/'], "")
            .as_str()
        {
            "qanon" => Ok(Subcategory::QAnon),
            "covid" => Ok(Subcategory::Covid),
            "ufo" | "ufoaliens" => Ok(Subcategory::Ufo),
            "nineeleven" | "911" => Ok(Subcategory::NineEleven),
            "flatearth" => Ok(Subcategory::FlatEarth),
            other => Err(Error::invalid(format!("unknown subcategory {other:?}"))),
        }
    }
}

/// A domain's category; the subcategory is present exactly for conspiracy
/// domains.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct CategoryLabel {
    category: Category,
    subcategory: Option<Subcategory>,
}

impl CategoryLabel {
    pub const UNLABELED: CategoryLabel = CategoryLabel {
        category: Category::Unlabeled,
        subcategory: None,
    };

    pub fn new(category: Category, subcategory: Option<Subcategory>) -> Result<Self> {
        if (category == Category::Conspiracy) != subcategory.is_some() {
            return Err(Error::invalid(format!(
                "subcategory must be set exactly for conspiracy domains (got {category} / {subcategory:?})"
            )));
        }
        Ok(CategoryLabel {
            category,
            subcategory,
        })
    }

    pub fn conspiracy(sub: Subcategory) -> Self {
        CategoryLabel {
            category: Category::Conspiracy,
            subcategory: Some(sub),
        }
    }

    pub fn plain(category: Category) -> Self {
        assert_ne!(
            category,
            Category::Conspiracy,
            "conspiracy labels need a subcategory"
        );
        CategoryLabel {
            category,
            subcategory: None,
        }
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn subcategory(&self) -> Option<Subcategory> {
        self.subcategory
    }
}

/// Domain -> label map loaded from `labels.csv` (`domain,category,subcategory`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelTable {
    labels: BTreeMap<String, CategoryLabel>,
}

impl LabelTable {
    pub fn insert(&mut self, domain: &str, label: CategoryLabel) {
        self.labels
            .insert(canonical_host(domain, DomainMode::MultiLabel), label);
    }

    pub fn get(&self, domain: &str) -> CategoryLabel {
        self.labels.get(domain).copied().unwrap_or_default()
    }

    pub fn contains(&self, domain: &str) -> bool {
        self.labels.contains_key(domain)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, CategoryLabel)> {
        self.labels.iter().map(|(d, l)| (d.as_str(), *l))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn from_csv(r: impl Read) -> Result<Self> {
        let mut table = LabelTable::default();
        let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(r);
        for (i, row) in csv.records().enumerate() {
            let row = row?;
            let loc = || format!("labels.csv row {}", i + 1);
            let field = |k: usize| row.get(k).unwrap_or("").trim();
            if field(0).is_empty() {
                return Err(Error::malformed(loc(), "missing domain"));
            }
            let category: Category = field(1)
                .parse()
                .map_err(|e: Error| Error::malformed(loc(), e.to_string()))?;
            let sub = match field(2) {
                "" => None,
                s => Some(
                    s.parse()
                        .map_err(|e: Error| Error::malformed(loc(), e.to_string()))?,
                ),
            };
            let label = CategoryLabel::new(category, sub)
                .map_err(|e| Error::malformed(loc(), e.to_string()))?;
            table.insert(field(0), label);
        }
        Ok(table)
    }
}

impl FromIterator<(String, CategoryLabel)> for LabelTable {
    fn from_iter<T: IntoIterator<Item = (String, CategoryLabel)>>(iter: T) -> Self {
        let mut t = LabelTable::default();
        for (d, l) in iter {
            t.insert(&d, l);
        }
        t
    }
}

/// A set of domains addressed by label or listed explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    Category(Category),
    Subcategory(Subcategory),
    Domains(BTreeSet<String>),
}

impl Group {
    pub fn contains(&self, domain: &str, label: CategoryLabel) -> bool {
        match self {
            Group::Category(c) => label.category() == *c,
            Group::Subcategory(s) => label.subcategory() == Some(*s),
            Group::Domains(set) => set.contains(domain),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Group::Category(c) => c.to_string(),
            Group::Subcategory(s) => s.to_string(),
            Group::Domains(set) => format!("{} domains", set.len()),
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    /// `conspiracy`, `authentic`, ... or a subcategory name such as `qanon`.
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(sub) = s.parse::<Subcategory>() {
            return Ok(Group::Subcategory(sub));
        }
        s.parse::<Category>().map(Group::Category)
    }
}
