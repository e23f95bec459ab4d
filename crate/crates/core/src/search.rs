//! The cone-extension search: every connected 2-pure complex on `n` vertices with a
//! nontrivial (or non-cyclic) fundamental group arises, up to free factors, as `L ∪ CA`
//! for `L` on `n − 1` vertices and `A` a connected spanning edge set of `L` containing
//! its free edges.
//!
//! With the apex star as spanning tree, `π₁(L ∪ CA)` is presented by the edges of `L`
//! subject to the triangle relators of `L` and one relator per edge of `A`. The search
//! keeps a simplified presentation with the images of the edge generators and adds one
//! relator per included edge, so each branch costs one incremental simplification.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{
    edges_span_connected, ones_u128, pair_index, Complex, EdgeMask, TriMask, TriangleComplex, PAIRS,
};
use crate::enumerate::{for_each_2pure, Filter, Shard};
use crate::presentation::{edge_path_presentation_2pure, Letter, Presentation, Tietze};
use crate::recognize::{GroupBase, GroupId, RecognizeConfig, RecognizeError, Recognizer};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("corrupt checkpoint {path} line {line}: {message}")]
    Checkpoint { path: String, line: usize, message: String },
    #[error("{0}")]
    Unsupported(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SearchError + '_ {
    move |source| SearchError::Io { path: path.display().to_string(), source }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Keep groups other than the trivial group; stop at trivial groups.
    Nontrivial,
    /// Keep groups that are not cyclic; stop at cyclic groups.
    Noncyclic,
}

impl Mode {
    /// Whether the search stops below a complex with this group.
    pub fn prunes(self, g: &GroupId) -> bool {
        match self {
            Mode::Nontrivial => g.is_trivial(),
            Mode::Noncyclic => g.is_cyclic(),
        }
    }

    /// Whether the base of this group is collected in the result set.
    pub fn records(self, g: &GroupId) -> bool {
        match self {
            Mode::Nontrivial => !matches!(g.base, GroupBase::Trivial | GroupBase::Unknown(_)),
            Mode::Noncyclic => !matches!(g.base, GroupBase::Trivial | GroupBase::Cyclic(_) | GroupBase::Unknown(_)),
        }
    }

    /// Membership of a complex with this group in the pure set.
    pub fn keeps(self, g: &GroupId) -> bool {
        !self.prunes(g)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Nontrivial => "nontrivial",
            Mode::Noncyclic => "noncyclic",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nontrivial" => Ok(Mode::Nontrivial),
            "noncyclic" => Ok(Mode::Noncyclic),
            other => Err(format!("unknown mode `{other}` (expected nontrivial or noncyclic)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub recognize: RecognizeConfig,
    /// Stop below trivial (resp. cyclic) groups.
    pub prune: bool,
    /// On 8 vertices, skip complexes whose vertices split into two halves of 4 spanning at
    /// least 2 and 3 triangles: their groups are cyclic up to free factors.
    pub split_prune: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { recognize: RecognizeConfig::default(), prune: true, split_prune: false }
    }
}

// ---------------------------------------------------------------------------
// pipeline on single complexes

/// Fundamental group of a connected 2-pure complex.
pub fn group_of(k: &TriangleComplex, rec: &mut Recognizer) -> Result<GroupId, RecognizeError> {
    let p = edge_path_presentation_2pure(k)?;
    rec.identify(&p)
}

/// Runs the full pipeline on a complex and compares with the expected group.
pub fn verify_witness(k: &Complex, expected: &GroupId) -> Result<bool, RecognizeError> {
    let mut rec = Recognizer::default();
    Ok(rec.identify_complex(k)? == *expected)
}

// ---------------------------------------------------------------------------
// pure sets and classification

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureSet {
    pub n: usize,
    pub mode: Mode,
    pub complexes: Vec<TriangleComplex>,
}

/// Per-group counts over all spanning-connected 2-pure complexes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub n: usize,
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl Distribution {
    pub fn merge(&mut self, other: &Distribution) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_default() += v;
        }
        self.total += other.total;
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    /// Complexes with a nontrivial group.
    pub fn nontrivial(&self) -> u64 {
        self.total - self.count("Trivial")
    }

    /// Complexes whose group is not cyclic (neither trivial, `Z`, nor finite cyclic).
    pub fn noncyclic(&self) -> u64 {
        self.counts
            .iter()
            .filter(|(k, _)| k.parse::<GroupId>().map_or(true, |g| !g.is_cyclic()))
            .map(|(_, v)| v)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("group,count\n");
        for (k, v) in &self.counts {
            s.push_str(&format!("{k},{v}\n"));
        }
        s
    }
}

/// Classifies each shard member with `f`, in parallel over fixed-size batches.
fn classify_stream<T: Send>(
    n: usize,
    shard: Shard,
    config: RecognizeConfig,
    f: impl Fn(TriangleComplex, Result<GroupId, RecognizeError>) -> Option<T> + Sync,
) -> Vec<T> {
    const BATCH: usize = 1 << 16;
    let mut out = Vec::new();
    let mut batch = Vec::with_capacity(BATCH);
    let flush = |batch: &mut Vec<TriangleComplex>, out: &mut Vec<T>| {
        let results: Vec<Option<T>> = batch
            .par_iter()
            .map_init(|| Recognizer::new(config), |rec, k| f(*k, group_of(k, rec)))
            .collect();
        out.extend(results.into_iter().flatten());
        batch.clear();
    };
    for_each_2pure(n, Filter::SpanningConnected, shard, |k| {
        batch.push(k);
        if batch.len() == BATCH {
            flush(&mut batch, &mut out);
        }
    });
    flush(&mut batch, &mut out);
    out
}

/// Distribution of fundamental groups over the spanning-connected complexes of a shard.
pub fn classify_shard(n: usize, shard: Shard, config: RecognizeConfig) -> Result<Distribution, RecognizeError> {
    let labels = classify_stream(n, shard, config, |_, g| Some(g.map(|g| g.to_string())));
    let mut d = Distribution { n, ..Default::default() };
    for l in labels {
        *d.counts.entry(l?).or_default() += 1;
        d.total += 1;
    }
    Ok(d)
}

/// Distribution over all spanning-connected complexes together with the pure set for
/// `mode`, from a single pass.
pub fn classify_with_pure(n: usize, mode: Mode, config: RecognizeConfig) -> Result<(Distribution, PureSet), RecognizeError> {
    let rows = classify_stream(n, Shard::WHOLE, config, |k, g| Some(g.map(|g| (mode.keeps(&g).then_some(k), g.to_string()))));
    let mut d = Distribution { n, ..Default::default() };
    let mut complexes = Vec::new();
    for row in rows {
        let (kept, label) = row?;
        complexes.extend(kept);
        *d.counts.entry(label).or_default() += 1;
        d.total += 1;
    }
    Ok((d, PureSet { n, mode, complexes }))
}

pub fn classify_all(n: usize) -> Result<Distribution, RecognizeError> {
    classify_shard(n, Shard::WHOLE, RecognizeConfig::default())
}

/// Spanning-connected complexes on `n` vertices whose group is kept by `mode`, in
/// generation order.
pub fn build_pure(n: usize, mode: Mode) -> Result<PureSet, RecognizeError> {
    build_pure_with(n, mode, RecognizeConfig::default())
}

pub fn build_pure_with(n: usize, mode: Mode, config: RecognizeConfig) -> Result<PureSet, RecognizeError> {
    let kept = classify_stream(n, Shard::WHOLE, config, |k, g| match g {
        Ok(g) if !mode.keeps(&g) => None,
        Ok(_) => Some(Ok(k)),
        Err(e) => Some(Err(e)),
    });
    let complexes = kept.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(PureSet { n, mode, complexes })
}

// ---------------------------------------------------------------------------
// extension search

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendStats {
    /// Edge sets visited, including the starting set.
    pub nodes: u64,
    /// Groups computed (edge sets that are connected and spanning).
    pub cases: u64,
    /// Cases below which the search stopped.
    pub pruned: u64,
    /// Cases skipped by the 4+4 split criterion.
    pub split_pruned: u64,
    /// Cases whose group was not recognized.
    pub unknowns: u64,
}

impl ExtendStats {
    pub fn add(&mut self, o: &ExtendStats) {
        self.nodes += o.nodes;
        self.cases += o.cases;
        self.pruned += o.pruned;
        self.split_pruned += o.split_pruned;
        self.unknowns += o.unknowns;
    }
}

/// A complex `L ∪ CA` realizing a group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub group: GroupId,
    /// Facets of `L ∪ CA`; the apex is the last vertex.
    pub facets: Vec<Vec<usize>>,
    /// Index of `L` in the pure set.
    pub parent: usize,
    /// Edges of `A` as vertex pairs.
    pub cone_edges: Vec<[usize; 2]>,
}

impl Witness {
    fn new(group: GroupId, l: &TriangleComplex, parent: usize, a: EdgeMask) -> Self {
        Witness {
            group,
            facets: l.cone_extend_unchecked(a).to_complex().facet_lists(),
            parent,
            cone_edges: edge_pairs(a),
        }
    }

    pub fn complex(&self) -> Complex {
        let n = self.facets.iter().flatten().max().map_or(1, |&v| v + 1);
        Complex::new(n, self.facets.clone()).expect("witness facets are valid")
    }

    /// Order used to pick one witness deterministically.
    fn key(&self) -> (usize, Vec<[usize; 2]>) {
        (self.parent, self.cone_edges.clone())
    }
}

fn edge_pairs(a: EdgeMask) -> Vec<[usize; 2]> {
    ones_u128(a)
        .map(|e| {
            let (x, y) = PAIRS[e];
            [x as usize, y as usize]
        })
        .collect()
}

/// An unrecognized group together with where it was met.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownRecord {
    pub facets: Vec<Vec<usize>>,
    pub presentation: Presentation,
    pub fingerprint: Option<crate::recognize::Fingerprint>,
    pub parent: usize,
    pub cone_edges: Vec<[usize; 2]>,
    pub shard: Option<usize>,
}

/// Outcome of extending one complex `L`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendResult {
    pub groups: BTreeMap<String, Witness>,
    pub stats: ExtendStats,
    pub unknowns: Vec<UnknownRecord>,
}

impl ExtendResult {
    pub fn merge(&mut self, other: ExtendResult) {
        for (k, w) in other.groups {
            match self.groups.get(&k) {
                Some(old) if old.key() <= w.key() => {}
                _ => {
                    self.groups.insert(k, w);
                }
            }
        }
        self.stats.add(&other.stats);
        self.unknowns.extend(other.unknowns);
    }

    pub fn bases(&self) -> Vec<String> {
        self.groups.keys().cloned().collect()
    }
}

struct Extender<'a> {
    l: &'a TriangleComplex,
    parent: usize,
    mode: Mode,
    config: SearchConfig,
    /// Non-free edges in increasing colex order.
    order: Vec<usize>,
    /// Generator of each edge of `L`.
    gen_of: [Letter; 120],
    vertices: u16,
    rec: &'a mut Recognizer,
    out: ExtendResult,
}

impl Extender<'_> {
    /// Group of the current node; `None` when the branch stops here.
    fn evaluate(&mut self, a: EdgeMask, state: &Tietze) -> Result<bool, RecognizeError> {
        self.out.stats.cases += 1;
        if self.config.split_prune && self.l.n() == 7 {
            let k = self.l.cone_extend_unchecked(a);
            if k.split_prune_noncyclic().expect("8 vertices") {
                self.out.stats.split_pruned += 1;
                return Ok(false);
            }
        }
        let g = self.rec.recognize(&state.presentation())?;
        if g.base.is_unknown() {
            self.out.stats.unknowns += 1;
            let fingerprint = match &g.base {
                GroupBase::Unknown(fp) => Some((**fp).clone()),
                _ => None,
            };
            self.out.unknowns.push(UnknownRecord {
                facets: self.l.cone_extend_unchecked(a).to_complex().facet_lists(),
                presentation: state.presentation(),
                fingerprint,
                parent: self.parent,
                cone_edges: edge_pairs(a),
                shard: None,
            });
            return Ok(true);
        }
        if self.config.prune && self.mode.prunes(&g) {
            self.out.stats.pruned += 1;
            return Ok(false);
        }
        if self.mode.records(&g) {
            let label = g.base.to_string();
            let w = Witness::new(g, self.l, self.parent, a);
            match self.out.groups.get(&label) {
                Some(old) if old.key() <= w.key() => {}
                _ => {
                    self.out.groups.insert(label, w);
                }
            }
        }
        Ok(true)
    }

    fn extend(&mut self, from: usize, a: EdgeMask, state: &Tietze) -> Result<(), RecognizeError> {
        for j in from..self.order.len() {
            let e = self.order[j];
            let a2 = a | 1 << e;
            let mut child = state.clone();
            let r = child.image(self.gen_of[e]);
            child.add_relator(r);
            child.simplify(self.config.recognize.tietze_budget);
            self.out.stats.nodes += 1;
            if edges_span_connected(a2, self.vertices) && !self.evaluate(a2, &child)? {
                continue;
            }
            self.extend(j + 1, a2, &child)?;
        }
        Ok(())
    }
}

/// Presentation of `π₁(L ∪ C(V))` on the edge generators of `L`, in colex edge order.
fn edge_presentation(l: &TriangleComplex) -> (Presentation, [Letter; 120]) {
    let mut gen_of = [0 as Letter; 120];
    let mut next = 0;
    for e in ones_u128(l.edges()) {
        next += 1;
        gen_of[e] = next;
    }
    let relators = l
        .triangles()
        .map(|[a, b, c]| vec![gen_of[pair_index(a, b)], gen_of[pair_index(b, c)], -gen_of[pair_index(a, c)]])
        .collect();
    (Presentation { gens: next as usize, relators }, gen_of)
}

/// All groups `π₁(L ∪ CA)` over connected spanning edge sets `A ⊇ free edges of L`,
/// searched by including edges in increasing order and stopping below pruned groups.
pub fn extend_all(
    l: &TriangleComplex,
    parent: usize,
    mode: Mode,
    config: SearchConfig,
    rec: &mut Recognizer,
) -> Result<ExtendResult, RecognizeError> {
    let free = l.free_edges();
    let edges = l.edges();
    let order: Vec<usize> = ones_u128(edges & !free).collect();
    let (base, gen_of) = edge_presentation(l);
    let mut state = Tietze::tracked(&base);
    for e in ones_u128(free) {
        state.add_relator(vec![gen_of[e]]);
    }
    state.simplify(config.recognize.tietze_budget);
    let mut x = Extender {
        l,
        parent,
        mode,
        config,
        order,
        gen_of,
        vertices: l.vertex_set(),
        rec,
        out: ExtendResult::default(),
    };
    x.out.stats.nodes += 1;
    if edges_span_connected(free, x.vertices) && !x.evaluate(free, &state)? {
        return Ok(x.out);
    }
    x.extend(0, free, &state)?;
    Ok(x.out)
}

// ---------------------------------------------------------------------------
// runs over a pure set

/// Groups found by a complete (or partial, when sharded) run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSetResult {
    pub n: usize,
    pub mode: Option<Mode>,
    pub pure_size: usize,
    /// Members of the pure set processed by this result.
    pub processed: usize,
    pub shard: Option<Shard>,
    pub groups: BTreeMap<String, Witness>,
    pub stats: ExtendStats,
}

impl GroupSetResult {
    pub fn group_names(&self) -> Vec<String> {
        self.groups.keys().cloned().collect()
    }

    /// Combines the results of disjoint parts of one run.
    pub fn merge(&mut self, other: GroupSetResult) {
        let mut acc = ExtendResult { groups: std::mem::take(&mut self.groups), stats: self.stats, unknowns: Vec::new() };
        acc.merge(ExtendResult { groups: other.groups, stats: other.stats, unknowns: Vec::new() });
        self.groups = acc.groups;
        self.stats = acc.stats;
        self.processed += other.processed;
        self.n = self.n.max(other.n);
        self.mode = self.mode.or(other.mode);
        self.pure_size = self.pure_size.max(other.pure_size);
        self.shard = None;
    }

    /// Whether every member of the pure set was processed.
    pub fn is_complete(&self) -> bool {
        self.processed == self.pure_size
    }
}

/// One line of the checkpoint file: the outcome for one member of the pure set.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CheckpointLine {
    index: usize,
    groups: BTreeMap<String, Witness>,
    stats: ExtendStats,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub shard: Shard,
    /// Directory for checkpoints and outputs; a run in an existing directory resumes.
    pub dir: Option<std::path::PathBuf>,
    pub config: SearchConfig,
    /// Restrict to these indices of the pure set (for sampling).
    pub subset: Option<Vec<usize>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { shard: Shard::WHOLE, dir: None, config: SearchConfig::default(), subset: None }
    }
}

const PURE_FILE: &str = "pure.txt";
const CHECKPOINT_FILE: &str = "checkpoint.jsonl";
pub const GROUPS_FILE: &str = "groups.json";
pub const UNRECOGNIZED_FILE: &str = "unrecognized.jsonl";

/// Loads the pure set cached in `dir`, or builds and caches it.
pub fn load_or_build_pure(n: usize, mode: Mode, dir: Option<&Path>, config: RecognizeConfig) -> Result<PureSet, SearchError> {
    let Some(dir) = dir else {
        return Ok(build_pure_with(n, mode, config)?);
    };
    let path = dir.join(PURE_FILE);
    let header = format!("# pure n={n} mode={mode}");
    if let Ok(text) = fs::read_to_string(&path) {
        let mut lines = text.lines();
        if lines.next() == Some(header.as_str()) {
            let mut complexes = Vec::new();
            for (i, line) in lines.enumerate() {
                let bad = |message: &str| SearchError::Checkpoint {
                    path: path.display().to_string(),
                    line: i + 2,
                    message: message.to_string(),
                };
                let mask = TriMask::from_hex(line).ok_or_else(|| bad("bad mask"))?;
                complexes.push(TriangleComplex::from_mask(n, mask).map_err(|e| bad(&e.to_string()))?);
            }
            return Ok(PureSet { n, mode, complexes });
        }
    }
    let pure = build_pure_with(n, mode, config)?;
    let tmp = dir.join(format!("{PURE_FILE}.tmp"));
    let mut w = BufWriter::new(File::create(&tmp).map_err(io_err(&tmp))?);
    writeln!(w, "{header}").map_err(io_err(&tmp))?;
    for k in &pure.complexes {
        writeln!(w, "{}", k.mask().to_hex()).map_err(io_err(&tmp))?;
    }
    w.flush().map_err(io_err(&tmp))?;
    drop(w);
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok(pure)
}

fn read_checkpoint(path: &Path) -> Result<HashMap<usize, CheckpointLine>, SearchError> {
    let mut done = HashMap::new();
    let Ok(file) = File::open(path) else { return Ok(done) };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CheckpointLine>(&line) {
            Ok(c) => {
                done.insert(c.index, c);
            }
            // a torn last line from an interrupted write is redone
            Err(e) if e.is_eof() => {}
            Err(e) => {
                return Err(SearchError::Checkpoint {
                    path: path.display().to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(done)
}

/// Extends every member of a pure set on `n − 1` vertices and merges the groups found.
pub fn run_on_pure(pure: &PureSet, opts: &RunOptions) -> Result<(GroupSetResult, Vec<UnknownRecord>), SearchError> {
    let n = pure.n + 1;
    let mode = pure.mode;
    if opts.config.split_prune && n != 8 {
        return Err(SearchError::Unsupported("the split criterion applies to 8 vertices only".into()));
    }
    let mut indices: Vec<usize> = match &opts.subset {
        Some(s) => s.clone(),
        None => (0..pure.complexes.len()).collect(),
    };
    indices.retain(|&i| i % opts.shard.count == opts.shard.index);

    let checkpoint_path = opts.dir.as_ref().map(|d| d.join(CHECKPOINT_FILE));
    let done = match &checkpoint_path {
        Some(p) => read_checkpoint(p)?,
        None => HashMap::new(),
    };
    let writer = match &checkpoint_path {
        Some(p) => Some(Mutex::new(BufWriter::new(
            OpenOptions::new().create(true).append(true).open(p).map_err(io_err(p))?,
        ))),
        None => None,
    };

    let todo: Vec<usize> = indices.iter().copied().filter(|i| !done.contains_key(i)).collect();
    let config = opts.config;
    let results: Vec<Result<(usize, ExtendResult), SearchError>> = todo
        .par_iter()
        .map_init(
            || Recognizer::new(config.recognize),
            |rec, &i| {
                let mut r = extend_all(&pure.complexes[i], i, mode, config, rec)?;
                for u in r.unknowns.iter_mut() {
                    u.shard = Some(opts.shard.index);
                }
                if let (Some(w), Some(path)) = (&writer, &checkpoint_path) {
                    let line = CheckpointLine { index: i, groups: r.groups.clone(), stats: r.stats };
                    let text = serde_json::to_string(&line).expect("serializable");
                    let mut w = w.lock().expect("checkpoint writer");
                    writeln!(w, "{text}").and_then(|_| w.flush()).map_err(io_err(path))?;
                }
                Ok((i, r))
            },
        )
        .collect();

    let mut total = ExtendResult::default();
    for c in indices.iter().filter_map(|i| done.get(i)) {
        total.merge(ExtendResult { groups: c.groups.clone(), stats: c.stats, unknowns: Vec::new() });
    }
    for r in results {
        let (_, r) = r?;
        total.merge(r);
    }
    let result = GroupSetResult {
        n,
        mode: Some(mode),
        pure_size: pure.complexes.len(),
        processed: indices.len(),
        shard: (opts.shard.count > 1).then_some(opts.shard),
        groups: total.groups,
        stats: total.stats,
    };
    if let Some(dir) = &opts.dir {
        write_outputs(dir, &result, &total.unknowns)?;
    }
    Ok((result, total.unknowns))
}

fn write_outputs(dir: &Path, result: &GroupSetResult, unknowns: &[UnknownRecord]) -> Result<(), SearchError> {
    let path = dir.join(GROUPS_FILE);
    let text = serde_json::to_string_pretty(result).expect("serializable");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    let path = dir.join(UNRECOGNIZED_FILE);
    let mut w = BufWriter::new(
        OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?,
    );
    for u in unknowns {
        writeln!(w, "{}", serde_json::to_string(u).expect("serializable")).map_err(io_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(())
}

/// Groups of complexes on `n` vertices, up to free factors, from the pure set on `n − 1`.
pub fn run_algorithm1(n: usize, mode: Mode) -> Result<GroupSetResult, SearchError> {
    run_algorithm1_with(n, mode, &RunOptions::default()).map(|(r, _)| r)
}

pub fn run_algorithm1_with(n: usize, mode: Mode, opts: &RunOptions) -> Result<(GroupSetResult, Vec<UnknownRecord>), SearchError> {
    if !(4..=8).contains(&n) {
        return Err(SearchError::Unsupported(format!("runs need 4 <= n <= 8, got {n}")));
    }
    if let Some(dir) = &opts.dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let pure = load_or_build_pure(n - 1, mode, opts.dir.as_deref(), opts.config.recognize)?;
    run_on_pure(&pure, opts)
}

/// Set of group labels in a result, for comparisons.
pub fn label_set(r: &GroupSetResult) -> HashSet<String> {
    r.groups.keys().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::presentation::abelianization;

    fn tc(k: &Complex) -> TriangleComplex {
        TriangleComplex::from_complex(k).unwrap()
    }

    /// Connected spanning edge sets containing the free edges, counted directly.
    fn spanning_supersets(l: &TriangleComplex) -> u64 {
        let free = l.free_edges();
        let rest: Vec<usize> = ones_u128(l.edges() & !free).collect();
        (0u64..1 << rest.len())
            .filter(|&s| {
                let a = rest.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).fold(free, |m, (_, &e)| m | 1 << e);
                edges_span_connected(a, l.vertex_set())
            })
            .count() as u64
    }

    #[test]
    fn unpruned_case_count_matches_brute_force() {
        let mut rec = Recognizer::default();
        let cfg = SearchConfig { prune: false, ..Default::default() };
        for k in [
            TriangleComplex::new(4, &[[0, 1, 2], [1, 2, 3]]).unwrap(),
            tc(&fixtures::boundary_tetrahedron()),
            TriangleComplex::new(5, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 1, 4]]).unwrap(),
        ] {
            let r = extend_all(&k, 0, Mode::Nontrivial, cfg, &mut rec).unwrap();
            assert_eq!(r.stats.cases, spanning_supersets(&k));
            assert_eq!(r.stats.nodes, 1 << (k.edges() & !k.free_edges()).count_ones());
        }
    }

    #[test]
    fn cone_presentation_agrees_with_edge_path_presentation() {
        let l = tc(&fixtures::rp2());
        let (base, gen_of) = edge_presentation(&l);
        let tree: EdgeMask = (1..6).map(|v| 1u128 << pair_index(0, v)).sum();
        let mut p = base.clone();
        for e in ones_u128(tree) {
            p.relators.push(vec![gen_of[e]]);
        }
        let direct = edge_path_presentation_2pure(&l.cone_extend(tree).unwrap()).unwrap();
        assert_eq!(abelianization(&p), abelianization(&direct));
        let mut rec = Recognizer::default();
        assert_eq!(rec.identify(&p).unwrap(), rec.identify(&direct).unwrap());
        assert_eq!(rec.identify(&p).unwrap(), GroupId::new(GroupBase::Cyclic(2), 0));
    }

    #[test]
    fn rp2_extensions_are_cyclic() {
        let mut rec = Recognizer::default();
        let l = tc(&fixtures::rp2());
        let r = extend_all(&l, 0, Mode::Nontrivial, SearchConfig::default(), &mut rec).unwrap();
        assert_eq!(r.bases(), vec!["Cyclic(2)".to_string()]);
        assert_eq!(r.stats.unknowns, 0);
        for w in r.groups.values() {
            assert!(verify_witness(&w.complex(), &w.group).unwrap());
        }
    }

    #[test]
    fn torus_extensions_stay_in_the_eight_vertex_list() {
        let mut rec = Recognizer::default();
        let l = tc(&fixtures::csaszar_torus());
        let r = extend_all(&l, 0, Mode::Nontrivial, SearchConfig::default(), &mut rec).unwrap();
        let allowed = ["ZxZ", "Klein", "B3", "Cyclic(2)", "Cyclic(3)", "Cyclic(4)"];
        for b in r.bases() {
            assert!(allowed.contains(&b.as_str()), "{b}");
        }
        assert!(r.bases().contains(&"ZxZ".to_string()));
        for w in r.groups.values() {
            assert!(verify_witness(&w.complex(), &w.group).unwrap(), "{w:?}");
        }
    }

    #[test]
    fn small_runs() {
        let pure = build_pure(5, Mode::Nontrivial).unwrap();
        let mut rec = Recognizer::default();
        for k in &pure.complexes {
            assert!(group_of(k, &mut rec).unwrap().is_free());
        }
        let r = run_algorithm1(6, Mode::Nontrivial).unwrap();
        assert_eq!(r.group_names(), vec!["Cyclic(2)".to_string()]);
    }

    #[test]
    fn distribution_on_six_vertices() {
        let d = classify_all(6).unwrap();
        let (d2, pure) = classify_with_pure(6, Mode::Nontrivial, RecognizeConfig::default()).unwrap();
        assert_eq!(d, d2);
        assert_eq!(pure, build_pure(6, Mode::Nontrivial).unwrap());
        assert_eq!(pure.complexes.len() as u64, d.nontrivial());
        let all = crate::enumerate::enumerate_2pure(6, Filter::SpanningConnected);
        assert_eq!(d.total, all.len() as u64);
        assert_eq!(d.count("Cyclic(2)"), 1);
        for label in d.counts.keys() {
            let g: GroupId = label.parse().unwrap();
            assert!(g.is_free() || label == "Cyclic(2)", "{label}");
        }
    }
}
