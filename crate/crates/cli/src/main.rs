//! `pi1scan`: enumeration, classification and cone-extension runs from the command line.

mod reference;
mod report;

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use pi1scan_core::enumerate::{
    canonical_form, count_reference, for_each_2pure, kisielewicz_d, qian_h3, CountKind, Filter, Shard,
};
use pi1scan_core::recognize::{todd_coxeter, RecognizeConfig, RecognizeError, WorkCapExceeded};
use pi1scan_core::search::{
    self, load_or_build_pure, run_on_pure, GroupSetResult, Mode, RunOptions, SearchConfig, SearchError,
};
use pi1scan_core::{edge_path_presentation, parse_complex, render_facet_list, GroupId, Recognizer, TriangleComplex};
use serde::Serialize;

/// Exit status for a result that disagrees with the expected value.
const EXIT_MISMATCH: u8 = 2;
/// Exit status when a work, coset or simplification limit was hit.
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "pi1scan", version, about = "Fundamental groups of small simplicial complexes")]
struct Cli {
    /// Worker threads (overrides PI1SCAN_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Shard `i/m` with `1 <= i <= m`.
#[derive(Clone, Copy, Debug)]
struct ShardArg(Shard);

impl FromStr for ShardArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (i, m) = s.split_once('/').ok_or_else(|| format!("expected i/m, got `{s}`"))?;
        let i: usize = i.trim().parse().map_err(|_| format!("bad shard index `{i}`"))?;
        let m: usize = m.trim().parse().map_err(|_| format!("bad shard count `{m}`"))?;
        if i == 0 || i > m {
            return Err(format!("shard index must satisfy 1 <= i <= m, got {i}/{m}"));
        }
        Ok(ShardArg(Shard::new(i - 1, m).expect("checked range")))
    }
}

#[derive(clap::Args, Clone, Copy)]
struct Limits {
    /// Maximum number of Tietze moves per simplification.
    #[arg(long, default_value_t = RecognizeConfig::default().tietze_budget, value_parser = clap::value_parser!(usize))]
    tietze_budget: usize,
    /// Maximum number of cosets in coset enumeration.
    #[arg(long, default_value_t = RecognizeConfig::default().max_cosets)]
    max_cosets: usize,
    /// Maximum backtracking steps per homomorphism count.
    #[arg(long, default_value_t = RecognizeConfig::default().hom_work_cap)]
    hom_work_cap: u64,
}

impl Limits {
    fn config(self) -> Result<RecognizeConfig> {
        if self.tietze_budget == 0 || self.max_cosets == 0 || self.hom_work_cap == 0 {
            bail!("limits must be positive");
        }
        Ok(RecognizeConfig { tietze_budget: self.tietze_budget, max_cosets: self.max_cosets, hom_work_cap: self.hom_work_cap })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print a counting sequence value and where it comes from.
    Count {
        /// dedekind, reduced_dedekind or h3
        kind: String,
        n: usize,
    },
    /// Stream 2-pure complexes up to isomorphism as facet lists, one per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// all, connected or spanning-connected
        #[arg(long, default_value = "all")]
        filter: Filter,
        #[arg(long)]
        shard: Option<ShardArg>,
        /// Append progress records to this JSONL file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Only print the number of complexes.
        #[arg(long)]
        count: bool,
    },
    /// Build the complexes with nontrivial (or non-cyclic) group.
    Pure {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "nontrivial")]
        mode: Mode,
        /// Write the facet lists to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Cone-extension search over the pure set on n - 1 vertices.
    Run {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "nontrivial")]
        mode: Mode,
        /// Split the run into this many shards, each checkpointed separately.
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Run only this shard (i/m).
        #[arg(long, conflicts_with = "shards")]
        shard: Option<ShardArg>,
        /// Directory for checkpoints and results; an interrupted run resumes from it.
        #[arg(long, alias = "dir")]
        resume: Option<PathBuf>,
        /// Skip 8-vertex complexes that split into two halves of 4 vertices.
        #[arg(long)]
        split_prune: bool,
        /// Evaluate every branch instead of stopping below pruned groups.
        #[arg(long)]
        no_prune: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Distribution of groups over all connected spanning 2-pure complexes.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        shard: Option<ShardArg>,
        /// Directory for distribution.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Compute the group of a complex and compare with an expected label.
    Verify {
        #[arg(long)]
        file: PathBuf,
        /// Expected group, e.g. B3, ZxZ, Cyclic(2)*F1.
        #[arg(long)]
        expect: Option<GroupId>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Tables from classify and run artifacts in a directory.
    Report {
        dir: PathBuf,
        /// Compare with the embedded reference values.
        #[arg(long)]
        check: bool,
        /// Also write the report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_workers(cli.workers) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_resource_cap(&e) {
                ExitCode::from(EXIT_RESOURCE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn is_resource_cap(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<WorkCapExceeded>()
            || matches!(c.downcast_ref::<RecognizeError>(), Some(RecognizeError::WorkCap(_)))
            || matches!(c.downcast_ref::<SearchError>(), Some(SearchError::Recognize(RecognizeError::WorkCap(_))))
    })
}

fn init_workers(flag: Option<usize>) -> Result<()> {
    let workers = match flag {
        Some(w) => Some(w),
        None => match std::env::var("PI1SCAN_WORKERS") {
            Ok(v) => Some(v.trim().parse().with_context(|| format!("PI1SCAN_WORKERS=`{v}` is not a number"))?),
            Err(_) => None,
        },
    };
    if let Some(w) = workers {
        if w == 0 {
            bail!("worker count must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Count { kind, n } => cmd_count(&kind, n),
        Command::Enumerate { n, filter, shard, checkpoint, count } => cmd_enumerate(n, filter, shard, checkpoint, count),
        Command::Pure { n, mode, output, limits } => cmd_pure(n, mode, output, limits.config()?),
        Command::Run { n, mode, shards, shard, resume, split_prune, no_prune, limits } => {
            let config = SearchConfig { recognize: limits.config()?, prune: !no_prune, split_prune };
            cmd_run(n, mode, shards, shard, resume, config)
        }
        Command::Classify { n, shard, out, limits } => cmd_classify(n, shard, &out, limits.config()?),
        Command::Verify { file, expect, limits } => cmd_verify(&file, expect, limits.config()?),
        Command::Report { dir, check, output } => cmd_report(&dir, check, output),
    }
}

fn cmd_count(kind: &str, n: usize) -> Result<ExitCode> {
    let kind: CountKind = kind.parse()?;
    let (value, source) = match kind {
        CountKind::H3 => {
            let v = qian_h3(n);
            let source = match count_reference(kind, n) {
                Ok(r) if r == v => "Qian's formula (agrees with the reference table)",
                Ok(r) => bail!("Qian's formula gives {v} but the reference table has {r}"),
                Err(_) => "Qian's formula",
            };
            (v, source)
        }
        CountKind::Dedekind if n <= 4 => {
            let v = kisielewicz_d(n)?;
            let r = count_reference(kind, n)?;
            if r != v {
                bail!("Kisielewicz's formula gives {v} but the reference table has {r}");
            }
            (v, "Kisielewicz's formula (agrees with the reference table)")
        }
        _ => (count_reference(kind, n)?, "reference table"),
    };
    println!("{value}");
    println!("source: {source}");
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EnumerateCheckpoint {
    shard: usize,
    emitted: u64,
    last: String,
}

/// Records written to the checkpoint file every this many complexes.
const CHECKPOINT_EVERY: u64 = 100_000;

fn cmd_enumerate(n: usize, filter: Filter, shard: Option<ShardArg>, checkpoint: Option<PathBuf>, count: bool) -> Result<ExitCode> {
    if !(1..=8).contains(&n) {
        bail!("enumeration supports 1 <= n <= 8, got {n}");
    }
    let shard = shard.map_or(Shard::WHOLE, |s| s.0);
    let mut ck = match &checkpoint {
        Some(p) => Some(BufWriter::new(
            OpenOptions::new().create(true).append(true).open(p).with_context(|| format!("opening {}", p.display()))?,
        )),
        None => None,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut emitted = 0u64;
    let mut last: Option<TriangleComplex> = None;
    let mut error: Option<io::Error> = None;
    let write_ck = |ck: &mut Option<BufWriter<File>>, emitted: u64, last: &Option<TriangleComplex>| -> io::Result<()> {
        if let (Some(w), Some(k)) = (ck.as_mut(), last) {
            let rec = EnumerateCheckpoint { shard: shard.index + 1, emitted, last: k.mask().to_hex() };
            writeln!(w, "{}", serde_json::to_string(&rec).expect("serializable"))?;
            w.flush()?;
        }
        Ok(())
    };
    for_each_2pure(n, filter, shard, |k| {
        if error.is_some() {
            return;
        }
        emitted += 1;
        if !count {
            if let Err(e) = writeln!(out, "{}", render_facet_list(&k.to_complex())) {
                error = Some(e);
            }
        }
        last = Some(k);
        if emitted.is_multiple_of(CHECKPOINT_EVERY) {
            if let Err(e) = write_ck(&mut ck, emitted, &last) {
                error = Some(e);
            }
        }
    });
    if let Some(e) = error {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Ok(ExitCode::SUCCESS);
        }
        return Err(e.into());
    }
    write_ck(&mut ck, emitted, &last)?;
    if count {
        writeln!(out, "{emitted}")?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_pure(n: usize, mode: Mode, output: Option<PathBuf>, config: RecognizeConfig) -> Result<ExitCode> {
    if !(3..=7).contains(&n) {
        bail!("pure sets are supported for 3 <= n <= 7, got {n}");
    }
    let pure = search::build_pure_with(n, mode, config)?;
    if let Some(path) = output {
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        for k in &pure.complexes {
            writeln!(w, "{}", render_facet_list(&k.to_complex()))?;
        }
        w.flush()?;
    }
    println!("{}", pure.complexes.len());
    Ok(ExitCode::SUCCESS)
}

fn shard_dir(root: &Path, shard: Shard) -> PathBuf {
    root.join(format!("shard-{}-of-{}", shard.index + 1, shard.count))
}

fn cmd_run(
    n: usize,
    mode: Mode,
    shards: usize,
    shard: Option<ShardArg>,
    dir: Option<PathBuf>,
    config: SearchConfig,
) -> Result<ExitCode> {
    if !(4..=8).contains(&n) {
        bail!("runs are supported for 4 <= n <= 8, got {n}");
    }
    if shards == 0 {
        bail!("--shards must be positive");
    }
    if n == 8 && mode == Mode::Nontrivial && config.prune {
        eprintln!("note: the full 8-vertex run evaluates on the order of 10^10 cases");
    }
    if let Some(d) = &dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let pure = load_or_build_pure(n - 1, mode, dir.as_deref(), config.recognize)?;
    let layout: Vec<Shard> = match shard {
        Some(s) => vec![s.0],
        None => (0..shards).map(|i| Shard::new(i, shards).expect("in range")).collect(),
    };
    let mut merged: Option<GroupSetResult> = None;
    let mut unknowns = Vec::new();
    for s in &layout {
        let sdir = match (&dir, s.count) {
            (Some(d), c) if c > 1 => Some(shard_dir(d, *s)),
            (d, _) => d.clone(),
        };
        if let Some(d) = &sdir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        let opts = RunOptions { shard: *s, dir: sdir, config, subset: None };
        let (r, u) = run_on_pure(&pure, &opts)?;
        unknowns.extend(u);
        match merged.as_mut() {
            Some(m) => m.merge(r),
            None => merged = Some(r),
        }
    }
    let result = merged.ok_or_else(|| anyhow!("no shards to run"))?;
    if let (Some(d), true) = (&dir, layout.len() > 1 || layout[0].count > 1) {
        let mut top = result.clone();
        if layout.len() == 1 {
            top.shard = Some(layout[0]);
        }
        fs::write(d.join(search::GROUPS_FILE), serde_json::to_string_pretty(&top)? + "\n")?;
        let mut w = BufWriter::new(File::create(d.join(search::UNRECOGNIZED_FILE))?);
        for u in &unknowns {
            writeln!(w, "{}", serde_json::to_string(u)?)?;
        }
        w.flush()?;
    }
    println!("groups: {}", result.group_names().join(", "));
    println!("pure set: {}", result.pure_size);
    println!("processed: {}", result.processed);
    println!("nodes: {}", result.stats.nodes);
    println!("cases: {}", result.stats.cases);
    println!("pruned: {}", result.stats.pruned);
    if config.split_prune {
        println!("split pruned: {}", result.stats.split_pruned);
    }
    println!("unrecognized: {}", result.stats.unknowns);
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(n: usize, shard: Option<ShardArg>, out: &Path, config: RecognizeConfig) -> Result<ExitCode> {
    if !(3..=7).contains(&n) {
        bail!("classification is supported for 3 <= n <= 7, got {n}");
    }
    let shard = shard.map_or(Shard::WHOLE, |s| s.0);
    let d = search::classify_shard(n, shard, config)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let csv = report::distribution_csv(&d);
    let path = out.join(report::distribution_file(shard.index + 1, shard.count));
    fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;
    print!("{csv}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(file: &Path, expect: Option<GroupId>, config: RecognizeConfig) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let k = parse_complex(&text).with_context(|| format!("parsing {}", file.display()))?;
    let mut rec = Recognizer::new(config);
    let g = rec.identify_complex(&k)?;
    println!("group: {g}");
    if let Ok(t) = TriangleComplex::from_complex(&k) {
        if k.dim() == Some(2) && k.facets().len() == t.triangle_count() {
            println!("canonical form: {}", canonical_form(&t).mask.to_hex());
        }
    }
    if g.free_rank == 0 {
        let p = edge_path_presentation(&k)?;
        if let Some(order) = todd_coxeter(&pi1scan_core::tietze_simplify(&p, config.tietze_budget), config.max_cosets) {
            println!("order: {order}");
        }
    }
    match expect {
        Some(e) if e != g => {
            println!("mismatch: expected {e}");
            Ok(ExitCode::from(EXIT_MISMATCH))
        }
        Some(_) => {
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn cmd_report(dir: &Path, check: bool, output: Option<PathBuf>) -> Result<ExitCode> {
    let r = report::report(dir, check)?;
    print!("{}", r.text);
    if let Some(p) = output {
        fs::write(&p, &r.text).with_context(|| format!("writing {}", p.display()))?;
    }
    if check && !r.diff.is_empty() {
        return Ok(ExitCode::from(EXIT_MISMATCH));
    }
    Ok(ExitCode::SUCCESS)
}
