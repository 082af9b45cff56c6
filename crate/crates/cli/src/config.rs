//! `--config FILE`: `key = value` lines that preset long flags.

use std::collections::BTreeSet;

use anyhow::{bail, Context, Result};
use clap::Command;

/// Parses config text. Blank lines and `#` comments are skipped; `key value`
/// and `key = value` are both accepted.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .or_else(|| line.split_once(char::is_whitespace))
            .with_context(|| format!("config line {}: expected `key = value`", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn longs(cmd: &Command) -> BTreeSet<String> {
    cmd.get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect()
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Appends config entries to `argv` as flags unless the flag is already
/// given. Keys that belong to another subcommand are skipped; keys unknown
/// to every subcommand are an error.
pub fn merge(argv: &[String], cmd: &Command) -> Result<Vec<String>> {
    let Some(path) = config_path(argv) else {
        return Ok(argv.to_vec());
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let entries = parse(&text)?;
    let global = longs(cmd);
    let sub = argv
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a.as_str()))
        .map(longs)
        .unwrap_or_default();
    let known: BTreeSet<String> = cmd
        .get_subcommands()
        .flat_map(longs)
        .chain(global.iter().cloned())
        .collect();
    let mut out = argv.to_vec();
    for (k, v) in entries {
        if k == "config" {
            bail!("config files cannot include other config files");
        }
        if !known.contains(&k) {
            bail!("unknown config key `{k}` in {path}");
        }
        if !(global.contains(&k) || sub.contains(&k)) {
            continue;
        }
        let flag = format!("--{k}");
        let given = argv
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !given {
            out.push(flag);
            out.push(v);
        }
    }
    Ok(out)
}
