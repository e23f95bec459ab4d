//! Merging of run artifacts into tables, and comparison with the reference data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pi1scan_core::recognize::{GroupBase, GroupId};
use pi1scan_core::search::{Distribution, GroupSetResult, GROUPS_FILE};

use crate::reference::{reference, Others};

/// Name of the distribution file written by `classify` for a shard (1-based) of `count`.
pub fn distribution_file(shard: usize, count: usize) -> String {
    if count == 1 {
        "distribution.csv".to_string()
    } else {
        format!("distribution.shard-{shard}-of-{count}.csv")
    }
}

pub fn distribution_csv(d: &Distribution) -> String {
    let mut s = String::from("n,group,count\n");
    for (k, v) in &d.counts {
        writeln!(s, "{},{k},{v}", d.n).unwrap();
    }
    s
}

fn parse_csv(path: &Path) -> Result<Distribution> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some("n,group,count") {
        bail!("{}: missing header `n,group,count`", path.display());
    }
    let mut d = Distribution::default();
    for (i, line) in lines.enumerate() {
        let bad = || format!("{}:{}: expected `n,group,count`", path.display(), i + 2);
        let mut parts = line.rsplitn(2, ',');
        let count: u64 = parts.next().and_then(|c| c.parse().ok()).with_context(bad)?;
        let (n, label) = parts.next().and_then(|r| r.split_once(',')).with_context(bad)?;
        let n: usize = n.parse().ok().with_context(bad)?;
        if d.n != 0 && d.n != n {
            bail!("{}: mixes vertex counts {} and {n}", path.display(), d.n);
        }
        d.n = n;
        *d.counts.entry(label.to_string()).or_default() += count;
        d.total += count;
    }
    Ok(d)
}

/// Shard layout encoded in a distribution file name.
fn shard_of(name: &str) -> Option<(usize, usize)> {
    if name == "distribution.csv" {
        return Some((1, 1));
    }
    let rest = name.strip_prefix("distribution.shard-")?.strip_suffix(".csv")?;
    let (i, m) = rest.split_once("-of-")?;
    Some((i.parse().ok()?, m.parse().ok()?))
}

/// Column heading in the layout of the published table.
fn heading(label: &str) -> String {
    let Ok(g) = label.parse::<GroupId>() else { return label.to_string() };
    let free = |r: u32| match r {
        1 => "Z".to_string(),
        r => format!("F{r}"),
    };
    match (&g.base, g.free_rank) {
        (GroupBase::Trivial, 0) => "1".to_string(),
        (GroupBase::Trivial, r) => free(r),
        (GroupBase::Cyclic(m), 0) => format!("Z{m}"),
        (GroupBase::Cyclic(m), r) => format!("Z{m} * {}", free(r)),
        (GroupBase::ZxZ, 0) => "Z^2".to_string(),
        (GroupBase::ZxZ, r) => format!("Z^2 * {}", free(r)),
        _ => label.to_string(),
    }
}

/// Column order of the published table: trivial and free groups, then cyclic groups
/// with free factors, then everything else.
fn column_key(label: &str) -> (u8, u64, u32, String) {
    match label.parse::<GroupId>() {
        Ok(g) => match g.base {
            GroupBase::Trivial => (0, 0, g.free_rank, String::new()),
            GroupBase::Cyclic(m) => (1, m, g.free_rank, String::new()),
            _ => (2, 0, g.free_rank, label.to_string()),
        },
        Err(_) => (3, 0, 0, label.to_string()),
    }
}

pub struct Report {
    pub text: String,
    /// Differences from the reference data; empty when everything agrees.
    pub diff: Vec<String>,
}

pub fn report(dir: &Path, check: bool) -> Result<Report> {
    let mut files: Vec<(String, (usize, usize))> = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if let Some(s) = shard_of(&name) {
            files.push((name, s));
        }
    }
    files.sort();
    let groups_path = dir.join(GROUPS_FILE);
    if files.is_empty() && !groups_path.exists() {
        bail!("{}: no distribution*.csv or {GROUPS_FILE} found", dir.display());
    }

    let mut out = String::new();
    let mut diff = Vec::new();
    let mut partial = false;
    let reference = reference();

    if !files.is_empty() {
        let layouts: BTreeSet<usize> = files.iter().map(|(_, (_, m))| *m).collect();
        if layouts.len() > 1 {
            bail!("{}: distribution files from different shard layouts {layouts:?}", dir.display());
        }
        let m = *layouts.iter().next().unwrap();
        let present: BTreeSet<usize> = files.iter().map(|(_, (i, _))| *i).collect();
        let mut d = Distribution::default();
        for (name, _) in &files {
            let part = parse_csv(&dir.join(name))?;
            if d.n != 0 && part.n != 0 && d.n != part.n {
                bail!("{}: distribution files for different vertex counts", dir.display());
            }
            d.n = d.n.max(part.n);
            d.merge(&part);
        }
        if present.len() < m {
            partial = true;
            let list: Vec<String> = present.iter().map(|i| i.to_string()).collect();
            writeln!(out, "PARTIAL: shards {} of {m} present", list.join(", ")).unwrap();
            writeln!(out).unwrap();
        }
        render_distribution(&mut out, &d);
        if check && !partial {
            check_distribution(&d, &reference, &mut diff);
        }
    }

    if groups_path.exists() {
        let text = fs::read_to_string(&groups_path).with_context(|| format!("reading {}", groups_path.display()))?;
        let r: GroupSetResult =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", groups_path.display()))?;
        if !out.is_empty() {
            writeln!(out).unwrap();
        }
        let mode = r.mode.map_or("?".to_string(), |m| m.to_string());
        if !r.is_complete() {
            partial = true;
            writeln!(out, "PARTIAL: {} of {} complexes processed", r.processed, r.pure_size).unwrap();
            writeln!(out).unwrap();
        }
        writeln!(out, "# Groups on {} vertices ({mode})", r.n).unwrap();
        writeln!(out).unwrap();
        for (label, w) in &r.groups {
            writeln!(out, "- {label}: {} ({} facets)", w.group, w.facets.len()).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "pure set: {}", r.pure_size).unwrap();
        writeln!(out, "nodes: {}", r.stats.nodes).unwrap();
        writeln!(out, "cases: {}", r.stats.cases).unwrap();
        writeln!(out, "pruned: {}", r.stats.pruned).unwrap();
        writeln!(out, "split pruned: {}", r.stats.split_pruned).unwrap();
        writeln!(out, "unrecognized: {}", r.stats.unknowns).unwrap();
        if check && r.is_complete() {
            let key = format!("{}/{mode}", r.n);
            match reference.groups.get(&key) {
                Some(expected) => {
                    let got = r.group_names();
                    if &got != expected {
                        diff.push(format!("groups {key}: expected {expected:?}, got {got:?}"));
                    }
                }
                None => diff.push(format!("groups {key}: no reference data")),
            }
            let pure_key = format!("{}/{mode}", r.n - 1);
            if let Some(&expected) = reference.pure.get(&pure_key) {
                if expected != r.pure_size as u64 {
                    diff.push(format!("pure {pure_key}: expected {expected}, got {}", r.pure_size));
                }
            }
        }
    }

    if check {
        writeln!(out).unwrap();
        if partial {
            diff.push("partial artifacts cannot be checked".to_string());
        }
        if diff.is_empty() {
            writeln!(out, "check (reference v{}): diff empty", reference.version).unwrap();
        } else {
            writeln!(out, "check (reference v{}):", reference.version).unwrap();
            for line in &diff {
                writeln!(out, "- {line}").unwrap();
            }
        }
    }
    Ok(Report { text: out, diff })
}

fn render_distribution(out: &mut String, d: &Distribution) {
    let mut labels: Vec<&String> = d.counts.keys().collect();
    labels.sort_by_key(|l| column_key(l));
    writeln!(out, "# Fundamental groups of connected 2-pure complexes on {} vertices", d.n).unwrap();
    writeln!(out).unwrap();
    let heads: Vec<String> = labels.iter().map(|l| heading(l)).collect();
    writeln!(out, "| {} |", heads.join(" | ")).unwrap();
    writeln!(out, "|{}", "---|".repeat(heads.len())).unwrap();
    let cells: Vec<String> = labels.iter().map(|l| d.counts[*l].to_string()).collect();
    writeln!(out, "| {} |", cells.join(" | ")).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "total: {}", d.total).unwrap();
    writeln!(out, "nontrivial: {}", d.nontrivial()).unwrap();
    writeln!(out, "noncyclic: {}", d.noncyclic()).unwrap();
}

fn check_distribution(d: &Distribution, reference: &crate::reference::Reference, diff: &mut Vec<String>) {
    let Some(exp) = reference.distributions.get(&d.n) else {
        diff.push(format!("distribution n={}: no reference data", d.n));
        return;
    };
    let mut compare = |what: &str, expected: u64, got: u64| {
        if expected != got {
            diff.push(format!("{what}: expected {expected}, got {got}"));
        }
    };
    if let Some(t) = exp.total {
        compare("total", t, d.total);
    }
    if let Some(t) = exp.nontrivial {
        compare("nontrivial", t, d.nontrivial());
    }
    if let Some(t) = exp.noncyclic {
        compare("noncyclic", t, d.noncyclic());
    }
    for (label, &v) in &exp.cells {
        compare(label, v, d.count(label));
    }
    let extra: BTreeMap<&String, &u64> = d.counts.iter().filter(|(k, _)| !exp.cells.contains_key(*k)).collect();
    for (label, v) in extra {
        let allowed = exp.others == Others::Free && label.parse::<GroupId>().is_ok_and(|g| g.is_free());
        if !allowed {
            diff.push(format!("{label}: unexpected group with count {v}"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headings_follow_published_layout() {
        let labels = ["ZxZ", "Cyclic(2)*F2", "Free(2)", "Trivial", "Cyclic(2)", "Free(1)", "Cyclic(2)*F1"];
        let mut sorted = labels.to_vec();
        sorted.sort_by_key(|l| column_key(l));
        let heads: Vec<String> = sorted.iter().map(|l| heading(l)).collect();
        assert_eq!(heads, ["1", "Z", "F2", "Z2", "Z2 * Z", "Z2 * F2", "Z^2"]);
    }

    #[test]
    fn shard_names() {
        assert_eq!(shard_of(&distribution_file(3, 8)), Some((3, 8)));
        assert_eq!(shard_of(&distribution_file(1, 1)), Some((1, 1)));
        assert_eq!(shard_of("groups.json"), None);
    }
}
