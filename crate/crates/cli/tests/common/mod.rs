#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use chrono::{Days, NaiveDate};
use fringeweb::causality::sim;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub const FETCH_TIME: &str = "2022-01-01T00:00:00Z";

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fringeweb"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs and panics with stderr unless the exit code is 0.
pub fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run_in(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn html_line(url: &str, html: &str) -> String {
    serde_json::json!({"url": url, "fetch_time": FETCH_TIME, "html_b64": B64.encode(html)})
        .to_string()
}

pub fn links_line(url: &str, links: &[String], pub_date: Option<NaiveDate>) -> String {
    let mut v = serde_json::json!({"url": url, "fetch_time": FETCH_TIME, "links": links});
    if let Some(d) = pub_date {
        v["pub_date"] = d.to_string().into();
    }
    v.to_string()
}

/// `(source_domain, target_domain, source_url, target_url, pub_date)`.
pub type Row = (String, String, String, String, String);

/// Three HTML pages and the link records they must produce, resolved by
/// hand: relative hrefs, a `<base>` element, duplicate anchors, an internal
/// link, a non-http scheme, a public-suffix host and a date conflict
/// between a meta tag and the URL path.
pub fn three_page_corpus() -> (String, Vec<Row>) {
    let pages = [
        html_line(
            "https://www.qpatriot.com/2020/12/31/drop.html",
            r#"<html><head><meta property="article:published_time" content="2021-01-05T08:00:00Z"></head>
               <body><a href="https://news.bbc.co.uk/world">bbc</a>
               <a href="/about">about</a>
               <a href="https://truthsocial.example.com/p?id=7#c">ts</a>
               <a href="https://truthsocial.example.com/p?id=7">ts again</a>
               <a href="mailto:x@qpatriot.com">mail</a></body></html>"#,
        ),
        html_line(
            "http://blog.vaxfacts.net/posts/2019-06-02/item",
            r#"<p>Posted <time datetime="2019-06-03">June 3</time></p>
               <a href="../../ref/paper.pdf">self</a>
               <a href="HTTPS://WWW.Who.INT/news">who</a>"#,
        ),
        html_line(
            "https://dailytruth.org/story",
            r#"<head><base href="https://mirror.dailytruth.co/"></head>
               <a href="page">mirror</a>
               <a href="//cdn.qpatriot.com/img.png">img</a>"#,
        ),
    ];
    let mut text = String::new();
    for p in &pages {
        writeln!(text, "{p}").unwrap();
    }
    let r = |s: &str, t: &str, su: &str, tu: &str, d: &str| -> Row {
        (s.into(), t.into(), su.into(), tu.into(), d.into())
    };
    let q = "https://www.qpatriot.com/2020/12/31/drop.html";
    let expected = vec![
        r(
            "qpatriot.com",
            "bbc.co.uk",
            q,
            "https://news.bbc.co.uk/world",
            "2021-01-05",
        ),
        r(
            "qpatriot.com",
            "example.com",
            q,
            "https://truthsocial.example.com/p?id=7",
            "2021-01-05",
        ),
        r(
            "qpatriot.com",
            "example.com",
            q,
            "https://truthsocial.example.com/p?id=7",
            "2021-01-05",
        ),
        r(
            "vaxfacts.net",
            "who.int",
            "http://blog.vaxfacts.net/posts/2019-06-02/item",
            "https://www.who.int/news",
            "2019-06-03",
        ),
        r(
            "dailytruth.org",
            "dailytruth.co",
            "https://dailytruth.org/story",
            "https://mirror.dailytruth.co/page",
            "",
        ),
        r(
            "dailytruth.org",
            "qpatriot.com",
            "https://dailytruth.org/story",
            "https://cdn.qpatriot.com/img.png",
            "",
        ),
    ];
    (text, expected)
}

pub fn read_rows(csv_text: &str) -> Vec<Row> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let mut rows: Vec<Row> = rdr.deserialize().map(|r| r.unwrap()).collect();
    rows.sort();
    rows
}

struct Site {
    domain: String,
    category: &'static str,
    sub: &'static str,
}

fn sites() -> Vec<Site> {
    let mut out = Vec::new();
    let mut add = |prefix: &str, n: usize, tld: &str, category: &'static str, sub: &'static str| {
        for i in 0..n {
            out.push(Site {
                domain: format!("{prefix}{i}.{tld}"),
                category,
                sub,
            });
        }
    };
    add("qdrop", 4, "com", "conspiracy", "qanon");
    add("plandemic", 3, "com", "conspiracy", "covid");
    add("saucer", 2, "net", "conspiracy", "ufo");
    add("truther", 2, "org", "conspiracy", "nineeleven");
    add("flatdisc", 2, "org", "conspiracy", "flatearth");
    add("fakenews", 6, "com", "misinformation", "");
    add("gazette", 6, "com", "authentic", "");
    add("shop", 4, "com", "nonnews", "");
    out
}

/// A small linked ecosystem spread over 2016-2021, as captured pages plus
/// labels, partisanship scores, popularity ranks and crawl seeds.
pub fn write_ecosystem(dir: &Path, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = sites();
    let fringe_targets: Vec<String> = (0..10).map(|i| format!("fringe-hub{i}.info")).collect();
    let main_targets: Vec<String> = (0..20).map(|i| format!("wire{i}.com")).collect();
    let by_cat = |c: &str| -> Vec<String> {
        sites
            .iter()
            .filter(|s| s.category == c)
            .map(|s| s.domain.clone())
            .collect()
    };
    let (consp, misinfo, auth) = (
        by_cat("conspiracy"),
        by_cat("misinformation"),
        by_cat("authentic"),
    );

    let mut pages = String::new();
    for s in &sites {
        for year in 2016..=2021 {
            for k in 0..3 {
                let date = NaiveDate::from_ymd_opt(
                    year,
                    rng.random_range(1..=12),
                    rng.random_range(1..=28),
                )
                .unwrap();
                let mut links = Vec::new();
                for _ in 0..rng.random_range(3..8) {
                    let u: f64 = rng.random();
                    let pool = match s.category {
                        "conspiracy" if u < 0.6 => &fringe_targets,
                        "conspiracy" => &consp,
                        "misinformation" if u < 0.3 + 0.05 * (year - 2016) as f64 => {
                            &fringe_targets
                        }
                        "misinformation" if u < 0.7 => &consp,
                        "misinformation" => &main_targets,
                        "authentic" if u < 0.8 => &main_targets,
                        "authentic" => &auth,
                        _ if u < 0.5 => &main_targets,
                        _ => &misinfo,
                    };
                    let t = &pool[rng.random_range(0..pool.len())];
                    links.push(format!("https://www.{t}/{}", rng.random_range(0..5)));
                }
                links.push(format!("https://{}/internal", s.domain));
                let url = format!("https://{}/{year}/{k}/story", s.domain);
                writeln!(pages, "{}", links_line(&url, &links, Some(date))).unwrap();
            }
        }
        if s.category == "conspiracy" || s.category == "misinformation" {
            let body = format!(
                "<html><head><meta property=\"article:published_time\" content=\"2021-02-{:02}\"></head><body><p>The QAnon drop explained.</p>\
                 <a href=\"https://www.{}/\">link</a><a href=\"/{}/more\">next</a></body></html>",
                rng.random_range(1..=28),
                fringe_targets[rng.random_range(0..fringe_targets.len())],
                s.domain
            );
            writeln!(
                pages,
                "{}",
                html_line(&format!("https://{}/drop", s.domain), &body)
            )
            .unwrap();
        }
    }
    std::fs::write(dir.join("pages.jsonl"), pages).unwrap();

    let mut labels = String::from("domain,category,subcategory\n");
    for s in &sites {
        writeln!(labels, "{},{},{}", s.domain, s.category, s.sub).unwrap();
    }
    std::fs::write(dir.join("labels.csv"), labels).unwrap();

    let mut part = String::from("domain,partisanship\n");
    for s in &sites {
        let p: f64 = match s.category {
            "misinformation" => rng.random_range(0.55..0.95),
            "authentic" => rng.random_range(-0.35..0.25),
            _ => continue,
        };
        writeln!(part, "{},{p:.3}", s.domain).unwrap();
    }
    std::fs::write(dir.join("partisanship.csv"), part).unwrap();

    let mut ranks = String::from("date,domain,rank\n");
    let start = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
    for day in 0..90u64 {
        let d = start + Days::new(day);
        for (i, s) in sites.iter().enumerate() {
            if rng.random::<f64>() < 0.8 {
                let base = 1000 * (i as u32 + 1);
                writeln!(
                    ranks,
                    "{d},{},{}",
                    s.domain,
                    base + rng.random_range(0..500)
                )
                .unwrap();
            }
        }
    }
    std::fs::write(dir.join("ranks.csv"), ranks).unwrap();
    std::fs::write(
        dir.join("qanon.txt"),
        "qdrop0.com\nqdrop1.com\nqdrop2.com\nqdrop3.com\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("seeds.txt"),
        "https://qdrop0.com/2016/0/story\nhttps://fakenews0.com/drop\n",
    )
    .unwrap();
}

fn cumsum(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn write_series(path: &Path, start: NaiveDate, values: &[f64]) {
    let mut s = String::from("date,value\n");
    for (i, v) in values.iter().enumerate() {
        writeln!(s, "{},{v}", start + Days::new(i as u64)).unwrap();
    }
    std::fs::write(path, s).unwrap();
}

/// Integrated VAR(1) where `misinfo_links` drives `popularity` at lag 1 and
/// `mentions` is independent, plus a pipeline file naming them.
pub fn write_causality_fixture(dir: &Path, bootstrap: usize) -> PathBuf {
    let a1 = DMatrix::from_row_slice(3, 3, &[0.3, 0.0, 0.0, 0.5, 0.2, 0.0, 0.0, 0.0, 0.3]);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s = sim::simulate_var(&[a1], &DVector::zeros(3), 1.0, 800, 100, &mut rng);
    let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
    let series = dir.join("series");
    std::fs::create_dir_all(&series).unwrap();
    for (name, v) in ["links", "popularity", "mentions"].iter().zip(&s) {
        write_series(&series.join(format!("{name}.csv")), start, &cumsum(v));
    }
    let cfg = serde_json::json!({
        "groups": [{
            "name": "qanon",
            "x": {"name": "misinfo_links", "path": "series/links.csv"},
            "y": {"name": "popularity", "path": "series/popularity.csv"},
            "z": {"name": "mentions", "path": "series/mentions.csv"}
        }],
        "bootstrap": bootstrap,
        "p_max": 6,
        "seed": 5
    });
    let path = dir.join("pipeline.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

/// Two well-separated clusters in (partisanship, conspiracy %).
pub fn write_fringe_clusters(path: &Path, per_class: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("domain,partisanship,conspiracy_pct,label\n");
    for i in 0..per_class {
        let (p, c) = (rng.random_range(0.6..0.95), rng.random_range(20.0..45.0));
        writeln!(s, "mis{i}.com,{p},{c},misinformation").unwrap();
        let (p, c) = (rng.random_range(-0.4..0.2), rng.random_range(0.0..6.0));
        writeln!(s, "auth{i}.com,{p},{c},authentic").unwrap();
    }
    std::fs::write(path, s).unwrap();
}

/// Relative path -> sha256 of every file under `root`.
pub fn digest_tree(root: &Path) -> BTreeMap<String, String> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, hex::encode(Sha256::digest(std::fs::read(&p).unwrap())));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Every subcommand over the ecosystem and causality fixtures, inside
/// `dir`, with relative paths only.
pub fn full_pipeline(dir: &Path, jobs: &str) {
    write_ecosystem(dir, 7);
    write_causality_fixture(dir, 50);
    let j = ["--jobs", jobs];
    let run = |args: &[&str]| {
        let mut all: Vec<&str> = args.to_vec();
        all.extend(j);
        ok(dir, &all)
    };
    run(&[
        "crawl",
        "--seeds",
        "seeds.txt",
        "--archive",
        "pages.jsonl",
        "--out",
        "crawl/pages.jsonl",
        "--politeness-ms",
        "0",
    ]);
    run(&[
        "extract",
        "--pages",
        "pages.jsonl",
        "--labels",
        "labels.csv",
        "--out",
        "out/links.csv",
        "--report",
        "out/ingest.json",
    ]);
    run(&[
        "graph",
        "--links",
        "out/links.csv",
        "--labels",
        "labels.csv",
        "--out-dir",
        "out/graph",
    ]);
    run(&[
        "similarity",
        "--graph",
        "out/graph/graph.bin",
        "--out",
        "out/sim/shared_pct.csv",
    ]);
    run(&[
        "discover",
        "--graph",
        "out/graph/graph.bin",
        "--seed-domains",
        "qanon.txt",
        "--min-connections",
        "2",
        "--out",
        "out/disc/candidates.csv",
    ]);
    run(&[
        "oriented",
        "--graph",
        "out/graph/graph.bin",
        "--out",
        "out/orient/oriented.csv",
    ]);
    run(&[
        "trend",
        "--graph",
        "out/graph/graph.bin",
        "--out",
        "out/trend/trend.csv",
    ]);
    run(&[
        "centrality",
        "--graph",
        "out/graph/graph.bin",
        "--out",
        "out/cent/centrality.csv",
    ]);
    run(&[
        "popularity",
        "--ranks",
        "ranks.csv",
        "--labels",
        "labels.csv",
        "--group",
        "qanon",
        "--metric",
        "dcg",
        "--out",
        "out/pop/dcg.csv",
    ]);
    run(&[
        "popularity",
        "--ranks",
        "ranks.csv",
        "--domains",
        "qanon.txt",
        "--out",
        "out/popm/median.csv",
    ]);
    run(&[
        "mentions",
        "--pages",
        "pages.jsonl",
        "--keyword",
        "qanon",
        "--from",
        "2021-02-01",
        "--to",
        "2021-02-28",
        "--out",
        "out/ment/mentions.csv",
    ]);
    run(&[
        "causality",
        "--config",
        "pipeline.json",
        "--out-dir",
        "out/causality",
    ]);
    run(&[
        "fringe",
        "--graph",
        "out/graph/graph.bin",
        "--partisanship",
        "partisanship.csv",
        "--out-dir",
        "out/fringe",
        "--seed",
        "3",
    ]);
    run(&[
        "report",
        "--graph",
        "out/graph/graph.bin",
        "--out-dir",
        "out/report",
    ]);
}
