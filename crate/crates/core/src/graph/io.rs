//! CSV exports and the binary snapshot.
//!
//! Snapshot layout (little endian): magic `FWG1`, node count, then per node
//! `name, category u8, subcategory u8 (0xff = none)`; edge count, then per
//! edge `source, target, pair count` and per pair `source_url, target_url,
//! undated u64, date count, (days-since-CE i32, count u64)*`. Strings are a
//! u32 byte length followed by UTF-8.

use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{Category, CategoryLabel, DomainGraph, Edge, Subcategory};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"FWG1";

/// `source,target,unique_pairs,undated`
pub fn write_edges_csv(w: impl Write, g: &DomainGraph) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["source", "target", "unique_pairs", "undated"])?;
    for (s, t, e) in g.edges() {
        csv.write_record([
            s,
            t,
            &e.unique_url_pairs.to_string(),
            &e.undated.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// `source,target,date,count`
pub fn write_edge_dates_csv(w: impl Write, g: &DomainGraph) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["source", "target", "date", "count"])?;
    for (s, t, e) in g.edges() {
        for (d, c) in &e.daily_counts {
            csv.write_record([s, t, &d.to_string(), &c.to_string()])?;
        }
    }
    csv.flush()?;
    Ok(())
}

/// `domain,category,subcategory`
pub fn write_nodes_csv(w: impl Write, g: &DomainGraph) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["domain", "category", "subcategory"])?;
    for (d, l) in g.nodes() {
        let sub = l.subcategory().map(|s| s.as_str()).unwrap_or("");
        csv.write_record([d, l.category().as_str(), sub])?;
    }
    csv.flush()?;
    Ok(())
}

fn put_str(w: &mut impl Write, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn category_code(c: Category) -> u8 {
    match c {
        Category::Conspiracy => 0,
        Category::Misinformation => 1,
        Category::Authentic => 2,
        Category::NonNews => 3,
        Category::Unlabeled => 4,
    }
}

pub fn write_snapshot(mut w: impl Write, g: &DomainGraph) -> Result<()> {
    w.write_all(MAGIC)?;
    put_u64(&mut w, g.nodes.len() as u64)?;
    for (d, l) in &g.nodes {
        put_str(&mut w, d)?;
        let sub = l
            .subcategory()
            .and_then(|s| Subcategory::ALL.iter().position(|x| *x == s))
            .map_or(0xff, |p| p as u8);
        w.write_all(&[category_code(l.category()), sub])?;
    }
    put_u64(&mut w, g.edges.len() as u64)?;
    for ((s, t), e) in &g.edges {
        put_str(&mut w, s)?;
        put_str(&mut w, t)?;
        put_u64(&mut w, e.pairs.len() as u64)?;
        for ((su, tu), pc) in &e.pairs {
            put_str(&mut w, su)?;
            put_str(&mut w, tu)?;
            put_u64(&mut w, pc.undated)?;
            put_u64(&mut w, pc.dated.len() as u64)?;
            for (d, c) in &pc.dated {
                w.write_all(&chrono::Datelike::num_days_from_ce(d).to_le_bytes())?;
                put_u64(&mut w, *c)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner
            .read_exact(&mut b)
            .map_err(|e| Error::malformed("snapshot", e.to_string()))?;
        Ok(b)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn string(&mut self) -> Result<String> {
        let len = u32::from_le_bytes(self.bytes()?) as usize;
        let mut buf = vec![0u8; len];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| Error::malformed("snapshot", e.to_string()))?;
        String::from_utf8(buf).map_err(|e| Error::malformed("snapshot", e.to_string()))
    }
}

pub fn read_snapshot(r: impl Read) -> Result<DomainGraph> {
    let mut r = Reader { inner: r };
    if &r.bytes::<4>()? != MAGIC {
        return Err(Error::malformed("snapshot", "bad magic"));
    }
    let mut g = DomainGraph::new();
    for _ in 0..r.u64()? {
        let name = r.string()?;
        let [cat, sub] = r.bytes::<2>()?;
        let category = match cat {
            0 => Category::Conspiracy,
            1 => Category::Misinformation,
            2 => Category::Authentic,
            3 => Category::NonNews,
            4 => Category::Unlabeled,
            x => return Err(Error::malformed("snapshot", format!("category code {x}"))),
        };
        let sub =
            match sub {
                0xff => None,
                i => Some(*Subcategory::ALL.get(i as usize).ok_or_else(|| {
                    Error::malformed("snapshot", format!("subcategory code {i}"))
                })?),
            };
        let label = CategoryLabel::new(category, sub)
            .map_err(|e| Error::malformed("snapshot", e.to_string()))?;
        g.nodes.insert(name, label);
    }
    for _ in 0..r.u64()? {
        let s = r.string()?;
        let t = r.string()?;
        let mut edge = Edge::default();
        for _ in 0..r.u64()? {
            let su = r.string()?;
            let tu = r.string()?;
            let undated = r.u64()?;
            if undated > 0 {
                edge.add(&su, &tu, None, undated);
            }
            for _ in 0..r.u64()? {
                let days = i32::from_le_bytes(r.bytes()?);
                let c = r.u64()?;
                let d = NaiveDate::from_num_days_from_ce_opt(days)
                    .ok_or_else(|| Error::malformed("snapshot", "date out of range"))?;
                edge.add(&su, &tu, Some(d), c);
            }
        }
        if s == t || edge.pairs.is_empty() || !g.nodes.contains_key(&s) || !g.nodes.contains_key(&t)
        {
            return Err(Error::malformed(
                "snapshot",
                format!("invalid edge {s} -> {t}"),
            ));
        }
        *g.edge_entry(&s, &t) = edge;
    }
    Ok(g)
}
