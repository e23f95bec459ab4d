//! Recognition of finitely presented groups against a fixed catalog.
//!
//! A group is summarized by its fingerprint: the abelian invariants together with the
//! number of homomorphisms into each group of a fixed battery of small finite groups.
//! Free factors are split off first; groups with one generator, free products of
//! recognized pieces, and finite groups whose order equals that of their abelianization
//! are recognized exactly. Everything else is matched by fingerprint, which is a necessary
//! condition only.

pub mod coset;
pub mod finite;
pub mod homs;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::abelian::AbelianInvariants;
use crate::complex::Complex;
use crate::presentation::{abelianization, edge_path_presentation, Letter, Presentation, PresentationError, Tietze};

pub use coset::{todd_coxeter, DEFAULT_MAX_COSETS};
pub use finite::{battery, FiniteGroupTable};
pub use homs::{count_homs, WorkCapExceeded, DEFAULT_HOM_WORK_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    #[error(transparent)]
    WorkCap(#[from] WorkCapExceeded),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("catalog fingerprint collision: {0} and {1}")]
    Collision(String, String),
}

// ---------------------------------------------------------------------------
// group labels

/// Abelian invariants and homomorphism counts into the battery, in battery order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub abelian: AbelianInvariants,
    pub hom_counts: Vec<BigUint>,
}

impl Fingerprint {
    /// Fingerprint of the free product with `F_r`.
    pub fn with_free_rank(&self, r: u32, battery: &[FiniteGroupTable]) -> Fingerprint {
        Fingerprint {
            abelian: self.abelian.with_extra_rank(r),
            hom_counts: self
                .hom_counts
                .iter()
                .zip(battery)
                .map(|(h, t)| h * BigUint::from(t.order()).pow(r))
                .collect(),
        }
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let homs: Vec<String> = self.hom_counts.iter().map(|h| h.to_string()).collect();
        write!(f, "ab={}; homs=[{}]", self.abelian, homs.join(","))
    }
}

/// A group without free factors, up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupBase {
    Trivial,
    Cyclic(u64),
    ZxZ,
    Klein,
    B3,
    D6,
    Q8,
    DInfinity,
    Z2freeZ3,
    ZcrossZ2,
    ZcrossZ3,
    /// Baumslag–Solitar group `⟨a, b | b a^m b⁻¹ = a^n⟩`.
    BS(i32, i32),
    /// Closed surface: orientable of genus `g` or non-orientable of genus `g`.
    Surface { orientable: bool, genus: u32 },
    /// `⟨a, b | a⁴ = b²⟩`.
    X24,
    Unknown(Box<Fingerprint>),
}

impl GroupBase {
    /// Order when finite and known.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupBase::Trivial => Some(1),
            GroupBase::Cyclic(m) => Some(*m),
            GroupBase::D6 => Some(6),
            GroupBase::Q8 => Some(8),
            _ => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, GroupBase::Unknown(_))
    }
}

impl fmt::Display for GroupBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupBase::Trivial => write!(f, "Trivial"),
            GroupBase::Cyclic(m) => write!(f, "Cyclic({m})"),
            GroupBase::ZxZ => write!(f, "ZxZ"),
            GroupBase::Klein => write!(f, "Klein"),
            GroupBase::B3 => write!(f, "B3"),
            GroupBase::D6 => write!(f, "D6"),
            GroupBase::Q8 => write!(f, "Q8"),
            GroupBase::DInfinity => write!(f, "DInfinity"),
            GroupBase::Z2freeZ3 => write!(f, "Z2freeZ3"),
            GroupBase::ZcrossZ2 => write!(f, "ZxZ2"),
            GroupBase::ZcrossZ3 => write!(f, "ZxZ3"),
            GroupBase::BS(m, n) => write!(f, "BS({m},{n})"),
            GroupBase::Surface { orientable: true, genus } => write!(f, "M{genus}"),
            GroupBase::Surface { orientable: false, genus } => write!(f, "N{genus}"),
            GroupBase::X24 => write!(f, "X24"),
            GroupBase::Unknown(_) => write!(f, "Unknown"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unrecognized group label `{0}`")]
pub struct LabelError(pub String);

impl FromStr for GroupBase {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LabelError(s.to_string());
        let s = s.trim();
        let inner = |prefix: &str| -> Option<&str> { s.strip_prefix(prefix)?.strip_suffix(')') };
        Ok(match s {
            "Trivial" | "1" => GroupBase::Trivial,
            "ZxZ" | "Z^2" | "Z2xZ" => GroupBase::ZxZ,
            "Klein" => GroupBase::Klein,
            "B3" => GroupBase::B3,
            "D6" => GroupBase::D6,
            "Q8" => GroupBase::Q8,
            "DInfinity" => GroupBase::DInfinity,
            "Z2freeZ3" | "Z2*Z3" => GroupBase::Z2freeZ3,
            "ZxZ2" | "ZcrossZ2" => GroupBase::ZcrossZ2,
            "ZxZ3" | "ZcrossZ3" => GroupBase::ZcrossZ3,
            "X24" => GroupBase::X24,
            _ => {
                if let Some(m) = inner("Cyclic(") {
                    GroupBase::Cyclic(m.parse().map_err(|_| err())?)
                } else if let Some(args) = inner("BS(") {
                    let (m, n) = args.split_once(',').ok_or_else(err)?;
                    GroupBase::BS(m.trim().parse().map_err(|_| err())?, n.trim().parse().map_err(|_| err())?)
                } else if let Some(m) = s.strip_prefix('Z').and_then(|m| m.parse::<u64>().ok()) {
                    GroupBase::Cyclic(m)
                } else if let Some(g) = s.strip_prefix('M').and_then(|g| g.parse().ok()) {
                    GroupBase::Surface { orientable: true, genus: g }
                } else if let Some(g) = s.strip_prefix('N').and_then(|g| g.parse().ok()) {
                    GroupBase::Surface { orientable: false, genus: g }
                } else {
                    return Err(err());
                }
            }
        })
    }
}

/// `base ∗ F_free_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupId {
    pub base: GroupBase,
    pub free_rank: u32,
}

impl GroupId {
    pub fn new(base: GroupBase, free_rank: u32) -> Self {
        GroupId { base, free_rank }
    }

    pub fn trivial() -> Self {
        Self::new(GroupBase::Trivial, 0)
    }

    pub fn free(r: u32) -> Self {
        Self::new(GroupBase::Trivial, r)
    }

    /// Cyclic as an abstract group: trivial, `Z`, or finite cyclic.
    pub fn is_cyclic(&self) -> bool {
        match self.base {
            GroupBase::Trivial => self.free_rank <= 1,
            GroupBase::Cyclic(_) => self.free_rank == 0,
            _ => false,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.base == GroupBase::Trivial && self.free_rank == 0
    }

    /// Whether the group is free (including trivial).
    pub fn is_free(&self) -> bool {
        self.base == GroupBase::Trivial
    }

    pub fn with_extra_free_rank(&self, r: u32) -> Self {
        Self::new(self.base.clone(), self.free_rank + r)
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.base, self.free_rank) {
            (GroupBase::Trivial, 0) => write!(f, "Trivial"),
            (GroupBase::Trivial, r) => write!(f, "Free({r})"),
            (b, 0) => write!(f, "{b}"),
            (b, r) => write!(f, "{b}*F{r}"),
        }
    }
}

impl FromStr for GroupId {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(r) = s.strip_prefix("Free(").and_then(|r| r.strip_suffix(')')) {
            let r = r.parse().map_err(|_| LabelError(s.to_string()))?;
            return Ok(GroupId::free(r));
        }
        match s.rsplit_once("*F") {
            Some((b, r)) if r.parse::<u32>().is_ok() => Ok(GroupId::new(b.parse()?, r.parse().unwrap())),
            _ => Ok(GroupId::new(s.parse()?, 0)),
        }
    }
}

impl Serialize for GroupId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// catalog

pub struct CatalogEntry {
    pub base: GroupBase,
    pub presentation: Presentation,
    pub fingerprint: Fingerprint,
}

pub struct Catalog {
    pub battery: Vec<FiniteGroupTable>,
    pub entries: Vec<CatalogEntry>,
}

/// Largest free-rank difference checked for fingerprint collisions.
pub const COLLISION_RANK_RANGE: u32 = 3;

fn pres(gens: usize, rels: &[&[Letter]]) -> Presentation {
    Presentation::new(gens, rels.iter().map(|r| r.to_vec()).collect()).expect("catalog presentation")
}

fn power(g: Letter, k: i32) -> Vec<Letter> {
    vec![g.signum() * k.signum() * g.abs(); k.unsigned_abs() as usize]
}

/// Reference presentations of the catalog groups.
pub fn catalog_presentations() -> Vec<(GroupBase, Presentation)> {
    let mut out = vec![(GroupBase::Trivial, pres(0, &[]))];
    for m in 2..=9 {
        out.push((GroupBase::Cyclic(m), pres(1, &[&power(1, m as i32)])));
    }
    out.push((GroupBase::ZxZ, pres(2, &[&[1, 2, -1, -2]])));
    out.push((GroupBase::Klein, pres(2, &[&[1, 2, 1, -2]])));
    out.push((GroupBase::B3, pres(2, &[&[1, 2, 1, -2, -1, -2]])));
    out.push((GroupBase::D6, pres(2, &[&[1, 1, 1], &[2, 2], &[1, 2, 1, 2]])));
    out.push((GroupBase::Q8, pres(2, &[&[1, 1, 1, 1], &[1, 1, -2, -2], &[2, 1, -2, 1]])));
    out.push((GroupBase::DInfinity, pres(2, &[&[1, 1], &[2, 2]])));
    out.push((GroupBase::Z2freeZ3, pres(2, &[&[1, 1], &[2, 2, 2]])));
    out.push((GroupBase::ZcrossZ2, pres(2, &[&[2, 2], &[1, 2, -1, -2]])));
    out.push((GroupBase::ZcrossZ3, pres(2, &[&[2, 2, 2], &[1, 2, -1, -2]])));
    for (m, n) in [(2, 1), (2, 2), (2, -2), (3, 1), (3, -1)] {
        // b a^m b⁻¹ a^-n
        let mut r = vec![2];
        r.extend(power(1, m));
        r.push(-2);
        r.extend(power(1, -n));
        out.push((GroupBase::BS(m, n), pres(2, &[&r])));
    }
    out.push((GroupBase::Surface { orientable: true, genus: 2 }, pres(4, &[&[1, 2, -1, -2, 3, 4, -3, -4]])));
    for g in 3..=5u32 {
        let r: Vec<Letter> = (1..=g as Letter).flat_map(|a| [a, a]).collect();
        out.push((GroupBase::Surface { orientable: false, genus: g }, pres(g as usize, &[&r])));
    }
    out.push((GroupBase::X24, pres(2, &[&[1, 1, 1, 1, -2, -2]])));
    out
}

impl Catalog {
    /// Builds the catalog and rejects it if two entries can share a fingerprint up to
    /// free factors.
    pub fn new(battery: Vec<FiniteGroupTable>) -> Result<Self, RecognizeError> {
        let mut entries = Vec::new();
        for (base, p) in catalog_presentations() {
            let fingerprint = fingerprint(&p, &battery, DEFAULT_HOM_WORK_CAP)?;
            entries.push(CatalogEntry { base, presentation: p, fingerprint });
        }
        let cat = Catalog { battery, entries };
        cat.check_collisions()?;
        Ok(cat)
    }

    fn check_collisions(&self) -> Result<(), RecognizeError> {
        for a in &self.entries {
            for b in &self.entries {
                if a.base == b.base {
                    continue;
                }
                for r in 0..=COLLISION_RANK_RANGE {
                    if a.fingerprint.with_free_rank(r, &self.battery) == b.fingerprint {
                        let left = GroupId::new(a.base.clone(), r).to_string();
                        return Err(RecognizeError::Collision(left, b.base.to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Catalog entries whose fingerprint times a free factor equals `fp`.
    pub fn matches(&self, fp: &Fingerprint) -> Vec<GroupId> {
        self.entries
            .iter()
            .filter_map(|e| {
                let r = fp.abelian.rank.checked_sub(e.fingerprint.abelian.rank)?;
                (e.fingerprint.with_free_rank(r, &self.battery) == *fp).then(|| GroupId::new(e.base.clone(), r))
            })
            .collect()
    }

    pub fn fingerprints(&self) -> Vec<(GroupBase, Fingerprint)> {
        self.entries.iter().map(|e| (e.base.clone(), e.fingerprint.clone())).collect()
    }
}

/// The shared catalog over the standard battery. Panics if the catalog has a collision.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| match Catalog::new(battery()) {
        Ok(c) => c,
        Err(e) => panic!("group catalog is unusable: {e}"),
    })
}

/// Table of catalog bases and their fingerprints.
pub fn catalog_fingerprints() -> Vec<(GroupBase, Fingerprint)> {
    catalog().fingerprints()
}

pub fn fingerprint(p: &Presentation, battery: &[FiniteGroupTable], cap: u64) -> Result<Fingerprint, WorkCapExceeded> {
    let hom_counts = battery.iter().map(|t| count_homs(p, t, cap)).collect::<Result<_, _>>()?;
    Ok(Fingerprint { abelian: abelianization(p), hom_counts })
}

// ---------------------------------------------------------------------------
// recognizer

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecognizeConfig {
    pub tietze_budget: usize,
    pub max_cosets: usize,
    pub hom_work_cap: u64,
}

impl Default for RecognizeConfig {
    fn default() -> Self {
        RecognizeConfig {
            tietze_budget: crate::presentation::DEFAULT_TIETZE_BUDGET,
            max_cosets: DEFAULT_MAX_COSETS,
            hom_work_cap: DEFAULT_HOM_WORK_CAP,
        }
    }
}

/// Cache size at which a recognizer starts over.
const CACHE_LIMIT: usize = 1 << 20;

/// Recognizer with a private result cache; use one per worker.
pub struct Recognizer {
    pub config: RecognizeConfig,
    catalog: &'static Catalog,
    cache: HashMap<Presentation, GroupId>,
}

impl Default for Recognizer {
    fn default() -> Self {
        Self::new(RecognizeConfig::default())
    }
}

/// Splits off generators that occur in no relator, renumbering the rest.
pub fn split_free(p: &Presentation) -> (Presentation, u32) {
    let occ = p.occurrences();
    let mut map = vec![0 as Letter; p.gens + 1];
    let mut next = 0;
    for g in 1..=p.gens {
        if occ[g] > 0 {
            next += 1;
            map[g] = next;
        }
    }
    let relators = p
        .relators
        .iter()
        .map(|r| r.iter().map(|&x| x.signum() * map[x.unsigned_abs() as usize]).collect())
        .collect();
    (Presentation { gens: next as usize, relators }, (p.gens - next as usize) as u32)
}

/// Generator sets of the relator components, each as a sorted list.
fn components(p: &Presentation) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..=p.gens).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for r in &p.relators {
        let first = r[0].unsigned_abs() as usize;
        for &x in &r[1..] {
            let (a, b) = (find(&mut parent, first), find(&mut parent, x.unsigned_abs() as usize));
            parent[a] = b;
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for g in 1..=p.gens {
        let root = find(&mut parent, g);
        groups.entry(root).or_default().push(g);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

fn restrict(p: &Presentation, gens: &[usize]) -> Presentation {
    let mut map = vec![0 as Letter; p.gens + 1];
    for (i, &g) in gens.iter().enumerate() {
        map[g] = i as Letter + 1;
    }
    let relators = p
        .relators
        .iter()
        .filter(|r| map[r[0].unsigned_abs() as usize] != 0)
        .map(|r| r.iter().map(|&x| x.signum() * map[x.unsigned_abs() as usize]).collect())
        .collect();
    Presentation { gens: gens.len(), relators }
}

impl Recognizer {
    pub fn new(config: RecognizeConfig) -> Self {
        Recognizer { config, catalog: catalog(), cache: HashMap::new() }
    }

    pub fn catalog(&self) -> &'static Catalog {
        self.catalog
    }

    /// Simplifies and recognizes.
    pub fn identify(&mut self, p: &Presentation) -> Result<GroupId, RecognizeError> {
        let mut t = Tietze::new(p);
        t.simplify(self.config.tietze_budget);
        self.recognize(&t.presentation())
    }

    /// Group of a connected complex via its edge-path presentation.
    pub fn identify_complex(&mut self, k: &Complex) -> Result<GroupId, RecognizeError> {
        let p = edge_path_presentation(k)?;
        self.identify(&p)
    }

    /// Recognizes an already simplified presentation.
    pub fn recognize(&mut self, p: &Presentation) -> Result<GroupId, RecognizeError> {
        let (core, free) = split_free(p);
        if let Some(id) = exact_small(&core) {
            return Ok(id.with_extra_free_rank(free));
        }
        if let Some(id) = self.cache.get(&core) {
            return Ok(id.with_extra_free_rank(free));
        }
        let id = self.recognize_core(&core)?;
        if self.cache.len() >= CACHE_LIMIT {
            self.cache.clear();
        }
        self.cache.insert(core, id.clone());
        Ok(id.with_extra_free_rank(free))
    }

    /// Full fingerprint of a presentation over the standard battery.
    pub fn fingerprint(&self, p: &Presentation) -> Result<Fingerprint, WorkCapExceeded> {
        fingerprint(p, &self.catalog.battery, self.config.hom_work_cap)
    }

    fn unknown(&self, core: &Presentation) -> Result<GroupId, RecognizeError> {
        Ok(GroupId::new(GroupBase::Unknown(Box::new(self.fingerprint(core)?)), 0))
    }

    /// Core presentation: every generator occurs in a relator.
    fn recognize_core(&mut self, core: &Presentation) -> Result<GroupId, RecognizeError> {
        let parts = components(core);
        if parts.len() > 1 {
            let mut bases = Vec::new();
            let mut rank = 0;
            for gens in &parts {
                let mut t = Tietze::new(&restrict(core, gens));
                t.simplify(self.config.tietze_budget);
                let id = self.recognize(&t.presentation())?;
                if id.base.is_unknown() {
                    return self.unknown(core);
                }
                rank += id.free_rank;
                if id.base != GroupBase::Trivial {
                    bases.push(id.base);
                }
            }
            bases.sort_by_key(|b| b.to_string());
            let base = match bases.as_slice() {
                [] => Some(GroupBase::Trivial),
                [b] => Some(b.clone()),
                [GroupBase::Cyclic(2), GroupBase::Cyclic(2)] => Some(GroupBase::DInfinity),
                [GroupBase::Cyclic(2), GroupBase::Cyclic(3)] => Some(GroupBase::Z2freeZ3),
                _ => None,
            };
            return match base {
                Some(b) => Ok(GroupId::new(b, rank)),
                None => self.unknown(core),
            };
        }

        let ab = abelianization(core);
        let order = if ab.rank == 0 { todd_coxeter(core, self.config.max_cosets) } else { None };
        if let (Some(order), Some(ab_order)) = (order, ab.order()) {
            // |G| = |G^ab| forces G to be abelian
            if order as u128 == ab_order && ab.is_cyclic() {
                return Ok(GroupId::new(if order == 1 { GroupBase::Trivial } else { GroupBase::Cyclic(order) }, 0));
            }
        }

        let fp = self.fingerprint(core)?;
        let found = self.catalog.matches(&fp);
        match found.as_slice() {
            [id] => {
                let consistent = match (id.base.order(), ab.rank) {
                    (Some(expected), 0) => order == Some(expected),
                    (None, 0) => order.is_none(),
                    _ => true,
                };
                if consistent {
                    return Ok(id.clone());
                }
                Ok(GroupId::new(GroupBase::Unknown(Box::new(fp)), 0))
            }
            _ => Ok(GroupId::new(GroupBase::Unknown(Box::new(fp)), 0)),
        }
    }
}

/// Exact answers without any search: no generators, or one generator.
fn exact_small(core: &Presentation) -> Option<GroupId> {
    match core.gens {
        0 => Some(GroupId::trivial()),
        1 => {
            let d = core.relators.iter().fold(0u64, |acc, r| {
                let e: i64 = r.iter().map(|&x| x.signum() as i64).sum();
                num_integer::gcd(acc, e.unsigned_abs())
            });
            Some(match d {
                0 => GroupId::free(1),
                1 => GroupId::trivial(),
                m => GroupId::new(GroupBase::Cyclic(m), 0),
            })
        }
        _ => None,
    }
}
