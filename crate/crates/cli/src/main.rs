mod cli;
mod commands;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::Parser;

use cli::{Cli, Command};
use output::{Manifest, RunContext, MANIFEST_NAME};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

/// A mistake in how the tool was invoked, as opposed to bad input data.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

const SUBCOMMANDS: [&str; 13] = [
    "extract",
    "crawl",
    "graph",
    "similarity",
    "discover",
    "oriented",
    "trend",
    "centrality",
    "popularity",
    "mentions",
    "causality",
    "fringe",
    "report",
];

/// Global options that take a separate value argument.
const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--seed", "--jobs", "--config", "--manifest"];

/// Position of the subcommand token and the `--config` value, if any.
fn scan(argv: &[String]) -> (Option<usize>, Option<String>) {
    let mut sub = None;
    let mut config = None;
    let mut i = 1;
    while i < argv.len() {
        let a = argv[i].as_str();
        if a == "--" {
            break;
        }
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
        } else if GLOBAL_VALUE_FLAGS.contains(&a) {
            if a == "--config" {
                config = argv.get(i + 1).cloned();
            }
            i += 1;
        } else if sub.is_none() && SUBCOMMANDS.contains(&a) {
            sub = Some(i);
        }
        i += 1;
    }
    (sub, config)
}

/// Turns a JSON object of flag values into arguments. `snake_case` keys map
/// to `--kebab-case` flags; `true` emits a bare switch, arrays repeat.
fn config_args(text: &str) -> Result<Vec<String>, Usage> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Usage(format!("config is not valid JSON: {e}")))?;
    let serde_json::Value::Object(map) = value else {
        return Err(Usage("config must be a JSON object".into()));
    };
    let mut out = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            return Err(Usage("config files cannot nest --config".into()));
        }
        let scalar = |v: &serde_json::Value| -> Result<String, Usage> {
            match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                other => Err(Usage(format!(
                    "config key {key:?}: unsupported value {other}"
                ))),
            }
        };
        match &v {
            serde_json::Value::Null | serde_json::Value::Bool(false) => {}
            serde_json::Value::Bool(true) => out.push(flag),
            serde_json::Value::Array(items) => {
                for item in items {
                    out.push(flag.clone());
                    out.push(scalar(item)?);
                }
            }
            other => {
                out.push(flag);
                out.push(scalar(other)?);
            }
        }
    }
    Ok(out)
}

/// Applies the JSON config (except for `causality`, whose config is the
/// pipeline file) by inserting its flags right after the subcommand, so
/// anything given on the command line afterwards wins.
fn merge_config(argv: Vec<String>) -> Result<Vec<String>, Usage> {
    let (sub, config) = scan(&argv);
    let (Some(sub), Some(config)) = (sub, config) else {
        return Ok(argv);
    };
    if argv[sub] == "causality" {
        return Ok(argv);
    }
    let text = std::fs::read_to_string(&config)
        .map_err(|e| Usage(format!("reading config {config}: {e}")))?;
    let extra = config_args(&text)?;
    let mut merged = argv[..=sub].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[sub + 1..]);
    Ok(merged)
}

/// Arguments recorded in the manifest: everything but the worker count.
fn recorded_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in &argv[1..] {
        if skip {
            skip = false;
        } else if a == "--jobs" {
            skip = true;
        } else if !a.starts_with("--jobs=") {
            out.push(a.clone());
        }
    }
    out
}

fn default_manifest_dir(cmd: &Command) -> PathBuf {
    let beside = |p: &Path| p.parent().map(Path::to_path_buf).unwrap_or_default();
    match cmd {
        Command::Extract(a) => beside(&a.out),
        Command::Crawl(a) => beside(&a.out),
        Command::Graph(a) => a.out_dir.clone(),
        Command::Similarity(a) => beside(&a.out),
        Command::Discover(a) => beside(&a.out),
        Command::Oriented(a) => beside(&a.out),
        Command::Trend(a) => beside(&a.out),
        Command::Centrality(a) => beside(&a.out),
        Command::Popularity(a) => beside(&a.out),
        Command::Mentions(a) => beside(&a.out),
        Command::Causality(a) => a.out_dir.clone(),
        Command::Fringe(a) => a.out_dir.clone(),
        Command::Report(a) => a.out_dir.clone(),
    }
}

fn execute(cli: &Cli, argv: &[String]) -> Result<String> {
    let mut ctx = RunContext::default();
    if let (Some(path), false) = (&cli.config, matches!(cli.command, Command::Causality(_))) {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        ctx.record_input(path, &bytes);
    }
    let mut seed = cli.seed.unwrap_or(0);
    let summary = match &cli.command {
        Command::Extract(a) => commands::extract(a, &mut ctx)?,
        Command::Crawl(a) => commands::crawl_cmd(a, &mut ctx)?,
        Command::Graph(a) => commands::graph(a, &mut ctx)?,
        Command::Similarity(a) => commands::similarity(a, &mut ctx)?,
        Command::Discover(a) => commands::discover(a, &mut ctx)?,
        Command::Oriented(a) => commands::oriented(a, &mut ctx)?,
        Command::Trend(a) => commands::trend(a, &mut ctx)?,
        Command::Centrality(a) => commands::centrality(a, &mut ctx)?,
        Command::Popularity(a) => commands::popularity(a, &mut ctx)?,
        Command::Mentions(a) => commands::mentions(a, &mut ctx)?,
        Command::Causality(a) => {
            let (summary, used) =
                commands::causality(a, cli.config.as_deref(), cli.seed, &mut ctx)?;
            seed = used;
            summary
        }
        Command::Fringe(a) => commands::fringe(a, seed, &mut ctx)?,
        Command::Report(a) => commands::report(a, &mut ctx)?,
    };
    let manifest_path = cli
        .manifest
        .clone()
        .unwrap_or_else(|| default_manifest_dir(&cli.command).join(MANIFEST_NAME));
    let manifest = Manifest::new(cli.command.name(), seed, recorded_args(argv));
    ctx.commit(&manifest_path, manifest)?;
    Ok(summary)
}

#[cfg(feature = "parallel")]
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<T: Send>(_jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(f())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<Usage>()) {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

fn run(argv: Vec<OsString>) -> ExitCode {
    let argv: Vec<String> = argv
        .into_iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.jobs == Some(0) {
        eprintln!("error: --jobs must be >= 1");
        return ExitCode::from(EXIT_USAGE);
    }
    match with_jobs(cli.jobs, || execute(&cli, &argv)).and_then(|r| r) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn main() -> ExitCode {
    run(std::env::args_os().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn config_keys_become_flags() {
        let args = config_args(r#"{"min_connections": 5, "include_members": true, "quiet": false, "groups": ["qanon", "ufo"]}"#)
            .unwrap();
        assert_eq!(
            args,
            s(&[
                "--groups",
                "qanon",
                "--groups",
                "ufo",
                "--include-members",
                "--min-connections",
                "5"
            ])
        );
    }

    #[test]
    fn config_inserted_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, r#"{"k": 3}"#).unwrap();
        let cfg = cfg.to_string_lossy().into_owned();
        let argv = s(&[
            "fw", "--config", &cfg, "--seed", "4", "discover", "--k", "9",
        ]);
        let merged = merge_config(argv).unwrap();
        assert_eq!(merged[5..], s(&["discover", "--k", "3", "--k", "9"])[..]);
    }

    #[test]
    fn scan_skips_global_values() {
        let argv = s(&["fw", "--manifest", "report", "graph", "--out-dir", "x"]);
        assert_eq!(scan(&argv).0, Some(3));
    }

    #[test]
    fn jobs_not_recorded() {
        let argv = s(&["fw", "--jobs", "4", "report", "--jobs=2", "--graph", "g"]);
        assert_eq!(recorded_args(&argv), s(&["report", "--graph", "g"]));
    }

    #[test]
    fn non_object_config_is_usage() {
        assert!(config_args("[1, 2]").is_err());
        assert!(config_args("{\"a\": {\"b\": 1}}").is_err());
    }
}
