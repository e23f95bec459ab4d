//! Simplicial complexes on at most 16 labeled vertices and the geometric reductions
//! applied before computing fundamental groups.
//!
//! A simplex is a vertex bitset (`u16`). Edges and triangles of a complex on `n` vertices
//! are indexed by the colex rank of their vertex pair / triple, so an edge set fits in a
//! `u128` and a triangle set in a [`TriMask`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{invariant_factors, AbelianInvariants};

pub const MAX_VERTICES: usize = 16;
pub const MAX_PAIRS: usize = 120;
pub const MAX_TRIANGLES: usize = 560;

/// A simplex as a set of vertex labels.
pub type Simplex = u16;
/// A set of edges indexed by [`pair_index`].
pub type EdgeMask = u128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("vertex count {0} outside 1..=16")]
    VertexCount(usize),
    #[error("facet {facet} uses label {label} but the complex has {n} vertices")]
    LabelOutOfRange { facet: usize, label: usize, n: usize },
    #[error("facet {0} is empty")]
    EmptyFacet(usize),
    #[error("facet {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("facet `{}` contained in `{}`", join(.inner), join(.outer))]
    NotAntichain { inner: Vec<usize>, outer: Vec<usize> },
    #[error("complex is not 2-pure")]
    NotTwoPure,
    #[error("complex is disconnected")]
    Disconnected,
    #[error("complex is empty")]
    Empty,
    #[error("operation needs at least {need} vertices, got {got}")]
    TooFewVertices { need: usize, got: usize },
    #[error("operation needs exactly {need} vertices, got {got}")]
    WrongVertexCount { need: usize, got: usize },
    #[error("triangle index {0} out of range")]
    TriangleOutOfRange(usize),
    #[error("invalid cone set: {0}")]
    InvalidConeSet(&'static str),
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------------------
// colex ranks

const fn build_pairs() -> [(u8, u8); MAX_PAIRS] {
    let mut out = [(0u8, 0u8); MAX_PAIRS];
    let mut k = 0;
    let mut b = 1;
    while b < MAX_VERTICES {
        let mut a = 0;
        while a < b {
            out[k] = (a as u8, b as u8);
            k += 1;
            a += 1;
        }
        b += 1;
    }
    out
}

const fn build_triangles() -> [(u8, u8, u8); MAX_TRIANGLES] {
    let mut out = [(0u8, 0u8, 0u8); MAX_TRIANGLES];
    let mut k = 0;
    let mut c = 2;
    while c < MAX_VERTICES {
        let mut b = 1;
        while b < c {
            let mut a = 0;
            while a < b {
                out[k] = (a as u8, b as u8, c as u8);
                k += 1;
                a += 1;
            }
            b += 1;
        }
        c += 1;
    }
    out
}

/// Vertex pairs in colex order.
pub const PAIRS: [(u8, u8); MAX_PAIRS] = build_pairs();
/// Vertex triples in colex order.
pub const TRIANGLES: [(u8, u8, u8); MAX_TRIANGLES] = build_triangles();

#[inline]
pub const fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
pub const fn binom3(n: usize) -> usize {
    n * n.saturating_sub(1) * n.saturating_sub(2) / 6
}

/// Colex rank of the pair `{a, b}`; argument order does not matter.
#[inline]
pub fn pair_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    debug_assert!(a < b);
    binom2(b) + a
}

/// Colex rank of the triple `{a, b, c}`; argument order does not matter.
#[inline]
pub fn triangle_index(a: usize, b: usize, c: usize) -> usize {
    let mut v = [a, b, c];
    v.sort_unstable();
    debug_assert!(v[0] < v[1] && v[1] < v[2]);
    binom3(v[2]) + binom2(v[1]) + v[0]
}

#[inline]
pub fn simplex_vertices(s: Simplex) -> impl Iterator<Item = usize> {
    (0..MAX_VERTICES).filter(move |&v| s >> v & 1 == 1)
}

pub fn simplex_from_vertices(vs: &[usize]) -> Simplex {
    vs.iter().fold(0, |acc, &v| acc | 1 << v)
}

// ---------------------------------------------------------------------------
// triangle bitmask

/// Bitset over the 560 possible triangles on 16 vertices, bit `i` = triangle of colex rank `i`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriMask([u64; 9]);

impl TriMask {
    pub const EMPTY: TriMask = TriMask([0; 9]);

    pub fn from_u64(bits: u64) -> Self {
        let mut m = Self::EMPTY;
        m.0[0] = bits;
        m
    }

    /// Low 64 bits; exact when every set bit is below 64 (`n ≤ 8`).
    pub fn low_u64(&self) -> u64 {
        self.0[0]
    }

    pub fn fits_u64(&self) -> bool {
        self.0[1..].iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }

    /// Highest set bit.
    pub fn max_bit(&self) -> Option<usize> {
        (0..9).rev().find(|&k| self.0[k] != 0).map(|k| k * 64 + 63 - self.0[k].leading_zeros() as usize)
    }

    /// Big-endian hexadecimal without leading zeros (`"0"` for the empty mask).
    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        for k in (0..9).rev() {
            if s.is_empty() {
                if self.0[k] != 0 {
                    s = format!("{:x}", self.0[k]);
                }
            } else {
                s.push_str(&format!("{:016x}", self.0[k]));
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let s = s.trim().trim_start_matches("0x");
        if s.is_empty() || s.len() > 9 * 16 {
            return None;
        }
        let mut m = Self::EMPTY;
        let bytes = s.as_bytes();
        for (k, chunk) in bytes.rchunks(16).enumerate() {
            let text = std::str::from_utf8(chunk).ok()?;
            m.0[k] = u64::from_str_radix(text, 16).ok()?;
        }
        Some(m)
    }

    /// Order in which the sorted list of set bits is compared lexicographically.
    /// For masks of equal popcount this is the reverse of comparing bit strings from bit 0.
    pub fn rank_list_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let mut a = self.ones();
        let mut b = other.ones();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }
}

impl fmt::Debug for TriMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriMask({})", self.to_hex())
    }
}

// ---------------------------------------------------------------------------
// general complexes

/// A simplicial complex on the label set `0..n`, stored by its facets.
///
/// Labels that occur in no facet are not vertices of the complex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Complex {
    n: u8,
    facets: Vec<Simplex>,
}

impl Complex {
    pub fn new<I, F>(n: usize, facets: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = F>,
        F: AsRef<[usize]>,
    {
        if n == 0 || n > MAX_VERTICES {
            return Err(ComplexError::VertexCount(n));
        }
        let mut masks = Vec::new();
        for (i, f) in facets.into_iter().enumerate() {
            let f = f.as_ref();
            if f.is_empty() {
                return Err(ComplexError::EmptyFacet(i));
            }
            let mut m: Simplex = 0;
            for &v in f {
                if v >= n {
                    return Err(ComplexError::LabelOutOfRange { facet: i, label: v, n });
                }
                if m >> v & 1 == 1 {
                    return Err(ComplexError::RepeatedVertex(i));
                }
                m |= 1 << v;
            }
            masks.push(m);
        }
        Self::from_masks(n, masks)
    }

    /// Builds a complex from facet bitsets, rejecting anything that is not an antichain.
    pub fn from_masks(n: usize, mut facets: Vec<Simplex>) -> Result<Self, ComplexError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(ComplexError::VertexCount(n));
        }
        for (i, &f) in facets.iter().enumerate() {
            if f == 0 {
                return Err(ComplexError::EmptyFacet(i));
            }
            if (f as u32) >> n != 0 {
                let label = simplex_vertices(f).find(|&v| v >= n).unwrap_or(n);
                return Err(ComplexError::LabelOutOfRange { facet: i, label, n });
            }
        }
        for (i, &a) in facets.iter().enumerate() {
            for (j, &b) in facets.iter().enumerate() {
                if i != j && a & b == a && (a != b || i < j) {
                    return Err(ComplexError::NotAntichain {
                        inner: simplex_vertices(a).collect(),
                        outer: simplex_vertices(b).collect(),
                    });
                }
            }
        }
        facets.sort_unstable();
        Ok(Self { n: n as u8, facets })
    }

    /// Facets not known to form an antichain: keeps only the maximal ones.
    pub(crate) fn from_masks_maximal(n: usize, mut masks: Vec<Simplex>) -> Self {
        masks.sort_unstable();
        masks.dedup();
        let facets: Vec<Simplex> = masks
            .iter()
            .copied()
            .filter(|&a| !masks.iter().any(|&b| b != a && a & b == a))
            .collect();
        Self { n: n as u8, facets }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Facets as vertex bitsets, in increasing (colex) order.
    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    /// Facets as sorted vertex lists, lexicographically ordered.
    pub fn facet_lists(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.facets.iter().map(|&f| simplex_vertices(f).collect()).collect();
        out.sort();
        out
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Maximal facet dimension; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.facets.iter().map(|f| f.count_ones() as usize - 1).max()
    }

    pub fn vertex_set(&self) -> Simplex {
        self.facets.iter().fold(0, |a, &f| a | f)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_set().count_ones() as usize
    }

    pub fn contains(&self, s: Simplex) -> bool {
        s != 0 && self.facets.iter().any(|&f| f & s == s)
    }

    /// Every nonempty simplex of the complex, in increasing (colex) order.
    pub fn simplices(&self) -> Vec<Simplex> {
        let mut seen = vec![false; 1 << self.n];
        for &f in &self.facets {
            let mut sub = f;
            while sub != 0 {
                seen[sub as usize] = true;
                sub = (sub - 1) & f;
            }
        }
        seen.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as Simplex).collect()
    }

    /// Edges of the 1-skeleton.
    pub fn edge_mask(&self) -> EdgeMask {
        let mut m = 0;
        for &f in &self.facets {
            let vs: Vec<usize> = simplex_vertices(f).collect();
            for j in 1..vs.len() {
                for i in 0..j {
                    m |= 1 << pair_index(vs[i], vs[j]);
                }
            }
        }
        m
    }

    /// Triangles of the 2-skeleton.
    pub fn triangle_mask(&self) -> TriMask {
        let mut m = TriMask::EMPTY;
        for &f in &self.facets {
            let vs: Vec<usize> = simplex_vertices(f).collect();
            for k in 2..vs.len() {
                for j in 1..k {
                    for i in 0..j {
                        m.set(triangle_index(vs[i], vs[j], vs[k]));
                    }
                }
            }
        }
        m
    }

    pub fn is_connected(&self) -> bool {
        if self.facets.is_empty() {
            return false;
        }
        let mut comp = self.facets[0];
        let mut rest: Vec<Simplex> = self.facets[1..].to_vec();
        loop {
            let before = rest.len();
            rest.retain(|&f| {
                if f & comp != 0 {
                    comp |= f;
                    false
                } else {
                    true
                }
            });
            if rest.is_empty() {
                return true;
            }
            if rest.len() == before {
                return false;
            }
        }
    }

    /// Simplices that are a proper face of exactly one simplex, in colex order.
    pub fn free_faces(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for &f in &self.facets {
            if f.count_ones() < 2 {
                continue;
            }
            for v in simplex_vertices(f) {
                let s = f & !(1 << v);
                if !self.facets.iter().any(|&g| g != f && g & s == s) {
                    out.push(s);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Removes the free face `s` together with its unique coface.
    fn elementary_collapse(&mut self, s: Simplex) {
        let pos = self
            .facets
            .iter()
            .position(|&f| f & s == s && f != s)
            .expect("free face has a coface");
        let f = self.facets.remove(pos);
        for w in simplex_vertices(s) {
            let face = f & !(1 << w);
            if !self.facets.iter().any(|&g| g & face == face) {
                self.facets.push(face);
            }
        }
        self.facets.sort_unstable();
    }

    /// Collapses free faces, always taking the colex-least one, until none is left.
    pub fn collapse_free_faces(&self) -> Complex {
        let mut k = self.clone();
        while let Some(&s) = k.free_faces().first() {
            k.elementary_collapse(s);
        }
        k
    }

    /// Facets of dimension ≤ `d` together with the `d`-faces of larger facets.
    pub fn skeleton(&self, d: usize) -> Complex {
        let mut masks = Vec::new();
        for &f in &self.facets {
            if f.count_ones() as usize <= d + 1 {
                masks.push(f);
            } else {
                let mut sub = f;
                while sub != 0 {
                    if sub.count_ones() as usize == d + 1 {
                        masks.push(sub);
                    }
                    sub = (sub - 1) & f;
                }
            }
        }
        Self::from_masks_maximal(self.n(), masks)
    }

    fn maximal_edges(&self) -> impl Iterator<Item = Simplex> + '_ {
        self.facets.iter().copied().filter(|f| f.count_ones() == 2)
    }

    /// Identifies vertex `b` with `a` and closes the label gap left by `b`.
    fn identify(&self, a: usize, b: usize) -> Complex {
        let relabel = |v: usize| -> usize {
            let v = if v == b { a } else { v };
            if v > b {
                v - 1
            } else {
                v
            }
        };
        let masks = self
            .facets
            .iter()
            .map(|&f| simplex_vertices(f).fold(0, |m, v| m | 1 << relabel(v)))
            .collect();
        Self::from_masks_maximal(self.n() - 1, masks)
    }

    /// Removes every maximal edge. An edge whose removal keeps the complex connected
    /// contributes a free generator; a disconnecting one is contracted.
    pub fn remove_maximal_edges(&self) -> ReductionReport<Complex> {
        let mut k = self.clone();
        let mut delta = 0;
        loop {
            let Some(e) = k.maximal_edges().next() else { break };
            let mut without = k.clone();
            without.facets.retain(|&f| f != e);
            // endpoints that lose every simplex come back as isolated vertices
            for v in simplex_vertices(e) {
                if !without.contains(1 << v) {
                    without.facets.push(1 << v);
                }
            }
            without.facets.sort_unstable();
            if without.is_connected() {
                k = without;
                delta += 1;
            } else {
                let mut vs = simplex_vertices(e);
                let a = vs.next().unwrap();
                let b = vs.next().unwrap();
                let mut cut = k.clone();
                cut.facets.retain(|&f| f != e);
                if !cut.contains(1 << a) {
                    cut.facets.push(1 << a);
                }
                if !cut.contains(1 << b) {
                    cut.facets.push(1 << b);
                }
                k = cut.identify(a, b);
            }
        }
        ReductionReport { reduced: k, free_rank_delta: delta }
    }

    /// Reduces a connected complex to a connected 2-pure complex with no free faces,
    /// or to a point when the fundamental group is free.
    pub fn reduce_to_2pure(&self) -> Result<ReductionReport<Reduced>, ComplexError> {
        if self.n() < 3 {
            return Err(ComplexError::TooFewVertices { need: 3, got: self.n() });
        }
        if !self.is_connected() {
            return Err(ComplexError::Disconnected);
        }
        let mut k = self.collapse_free_faces().skeleton(2);
        let mut delta = 0;
        loop {
            let collapsed = k.collapse_free_faces();
            let rep = collapsed.remove_maximal_edges();
            delta += rep.free_rank_delta;
            let changed = rep.reduced != k;
            k = rep.reduced;
            if !changed {
                break;
            }
        }
        if k.triangle_mask().is_empty() {
            return Ok(ReductionReport { reduced: Reduced::GraphLike, free_rank_delta: delta });
        }
        let compact = k.compact_labels();
        let tc = TriangleComplex::from_complex(&compact)?;
        Ok(ReductionReport { reduced: Reduced::TwoPure(tc), free_rank_delta: delta })
    }

    /// Relabels the vertices to `0..vertex_count` preserving their order.
    pub fn compact_labels(&self) -> Complex {
        let used = self.vertex_set();
        let mut map = [0usize; MAX_VERTICES];
        let mut next = 0;
        for v in simplex_vertices(used) {
            map[v] = next;
            next += 1;
        }
        let masks = self
            .facets
            .iter()
            .map(|&f| simplex_vertices(f).fold(0, |m, v| m | 1 << map[v]))
            .collect();
        Complex { n: next.max(1) as u8, facets: sorted(masks) }
    }

    /// `H_1(K; Z)` from the simplicial boundary maps.
    pub fn homology_h1(&self) -> AbelianInvariants {
        let vertices: Vec<usize> = simplex_vertices(self.vertex_set()).collect();
        let edges: Vec<usize> = ones_u128(self.edge_mask()).collect();
        let triangles: Vec<usize> = self.triangle_mask().ones().collect();
        let mut vpos = [usize::MAX; MAX_VERTICES];
        for (i, &v) in vertices.iter().enumerate() {
            vpos[v] = i;
        }
        let mut epos = vec![usize::MAX; MAX_PAIRS];
        for (i, &e) in edges.iter().enumerate() {
            epos[e] = i;
        }
        // rows of d1^T: one per edge, columns = vertices
        let d1: Vec<Vec<i64>> = edges
            .iter()
            .map(|&e| {
                let (a, b) = PAIRS[e];
                let mut row = vec![0i64; vertices.len()];
                row[vpos[a as usize]] -= 1;
                row[vpos[b as usize]] += 1;
                row
            })
            .collect();
        // rows of d2^T: one per triangle, columns = edges
        let d2: Vec<Vec<i64>> = triangles
            .iter()
            .map(|&t| {
                let (a, b, c) = TRIANGLES[t];
                let (a, b, c) = (a as usize, b as usize, c as usize);
                let mut row = vec![0i64; edges.len()];
                row[epos[pair_index(b, c)]] += 1;
                row[epos[pair_index(a, c)]] -= 1;
                row[epos[pair_index(a, b)]] += 1;
                row
            })
            .collect();
        let rank_d1 = invariant_factors(vertices.len(), &d1).len();
        let d2_factors = invariant_factors(edges.len(), &d2);
        let rank = edges.len() - rank_d1 - d2_factors.len();
        AbelianInvariants::new(rank as u32, d2_factors)
    }

    /// `K ∪ C(A)` for an edge set `A` of `K`, the apex getting label `n`.
    pub fn cone_over_edges(&self, a: EdgeMask) -> Result<Complex, ComplexError> {
        let edges = self.edge_mask();
        check_cone_set(self.vertex_set(), edges, self.free_edge_mask(), a)?;
        if self.n() >= MAX_VERTICES {
            return Err(ComplexError::VertexCount(self.n() + 1));
        }
        let apex = self.n();
        let mut masks = self.facets.clone();
        for e in ones_u128(a) {
            let (x, y) = PAIRS[e];
            masks.push(1 << x | 1 << y | 1 << apex);
        }
        Ok(Self::from_masks_maximal(self.n() + 1, masks))
    }

    /// Edges that are free faces (contained in exactly one triangle and in nothing larger).
    pub fn free_edge_mask(&self) -> EdgeMask {
        self.free_faces()
            .into_iter()
            .filter(|s| s.count_ones() == 2)
            .fold(0, |m, s| {
                let mut vs = simplex_vertices(s);
                let a = vs.next().unwrap();
                let b = vs.next().unwrap();
                m | 1 << pair_index(a, b)
            })
    }
}

fn sorted(mut v: Vec<Simplex>) -> Vec<Simplex> {
    v.sort_unstable();
    v
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex(n={}, {})", self.n, crate::io::render_facet_list(self))
    }
}

pub(crate) fn ones_u128(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Vertex set touched by an edge set.
pub fn edge_vertices(a: EdgeMask) -> Simplex {
    ones_u128(a).fold(0, |m, e| {
        let (x, y) = PAIRS[e];
        m | 1 << x | 1 << y
    })
}

/// True when the edges of `a` form a connected graph whose vertex set is exactly `vertices`.
pub fn edges_span_connected(a: EdgeMask, vertices: Simplex) -> bool {
    if vertices.count_ones() <= 1 {
        return a == 0;
    }
    if edge_vertices(a) != vertices {
        return false;
    }
    let mut reached: Simplex = 1 << vertices.trailing_zeros();
    loop {
        let mut grown = reached;
        for e in ones_u128(a) {
            let (x, y) = PAIRS[e];
            let m = 1 << x | 1 << y;
            if grown & m != 0 {
                grown |= m;
            }
        }
        if grown == reached {
            return reached == vertices;
        }
        reached = grown;
    }
}

fn check_cone_set(vertices: Simplex, edges: EdgeMask, free: EdgeMask, a: EdgeMask) -> Result<(), ComplexError> {
    if a & !edges != 0 {
        return Err(ComplexError::InvalidConeSet("edge set is not contained in the complex"));
    }
    if free & !a != 0 {
        return Err(ComplexError::InvalidConeSet("edge set misses a free edge"));
    }
    if !edges_span_connected(a, vertices) {
        return Err(ComplexError::InvalidConeSet("edge set is not a connected spanning subgraph"));
    }
    Ok(())
}

/// Result of a reduction together with the number of free generators split off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport<T> {
    pub reduced: T,
    pub free_rank_delta: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduced {
    TwoPure(TriangleComplex),
    /// Collapsed onto a graph: the fundamental group is free of rank `free_rank_delta`.
    GraphLike,
}

// ---------------------------------------------------------------------------
// 2-pure complexes

/// A 2-pure complex stored as its triangle set (a 3-uniform hypergraph on `0..n`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriangleComplex {
    n: u8,
    tris: TriMask,
}

impl TriangleComplex {
    pub fn from_mask(n: usize, tris: TriMask) -> Result<Self, ComplexError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(ComplexError::VertexCount(n));
        }
        if let Some(top) = tris.max_bit() {
            if top >= binom3(n) {
                return Err(ComplexError::TriangleOutOfRange(top));
            }
        }
        Ok(Self { n: n as u8, tris })
    }

    /// Fast constructor for `n ≤ 8`; the caller guarantees the range.
    #[inline]
    pub fn from_u64(n: usize, bits: u64) -> Self {
        debug_assert!(n <= 8 && (n == 8 || bits >> binom3(n) == 0));
        Self { n: n as u8, tris: TriMask::from_u64(bits) }
    }

    pub fn new(n: usize, triangles: &[[usize; 3]]) -> Result<Self, ComplexError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(ComplexError::VertexCount(n));
        }
        let mut m = TriMask::EMPTY;
        for (i, t) in triangles.iter().enumerate() {
            if let Some(&v) = t.iter().find(|&&v| v >= n) {
                return Err(ComplexError::LabelOutOfRange { facet: i, label: v, n });
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(ComplexError::RepeatedVertex(i));
            }
            m.set(triangle_index(t[0], t[1], t[2]));
        }
        Ok(Self { n: n as u8, tris: m })
    }

    pub fn from_complex(k: &Complex) -> Result<Self, ComplexError> {
        if k.facets.iter().any(|f| f.count_ones() != 3) {
            return Err(ComplexError::NotTwoPure);
        }
        Ok(Self { n: k.n, tris: k.triangle_mask() })
    }

    pub fn to_complex(&self) -> Complex {
        let facets = self
            .tris
            .ones()
            .map(|t| {
                let (a, b, c) = TRIANGLES[t];
                1 << a | 1 << b | 1 << c
            })
            .collect();
        Complex { n: self.n, facets: sorted(facets) }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> &TriMask {
        &self.tris
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.count()
    }

    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.tris.ones().map(|t| {
            let (a, b, c) = TRIANGLES[t];
            [a as usize, b as usize, c as usize]
        })
    }

    pub fn edges(&self) -> EdgeMask {
        let mut m = 0;
        for [a, b, c] in self.triangles() {
            m |= 1 << pair_index(a, b) | 1 << pair_index(a, c) | 1 << pair_index(b, c);
        }
        m
    }

    pub fn vertex_set(&self) -> Simplex {
        self.triangles().fold(0, |m, [a, b, c]| m | 1 << a | 1 << b | 1 << c)
    }

    /// Number of triangles containing each edge.
    pub fn edge_degrees(&self) -> [u8; MAX_PAIRS] {
        let mut deg = [0u8; MAX_PAIRS];
        for [a, b, c] in self.triangles() {
            deg[pair_index(a, b)] += 1;
            deg[pair_index(a, c)] += 1;
            deg[pair_index(b, c)] += 1;
        }
        deg
    }

    /// Edges lying in exactly one triangle.
    pub fn free_edges(&self) -> EdgeMask {
        self.edge_degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 1)
            .fold(0, |m, (e, _)| m | 1 << e)
    }

    pub fn is_connected(&self) -> bool {
        !self.tris.is_empty() && edges_span_connected(self.edges(), self.vertex_set())
    }

    /// Connected and every label `0..n` is a vertex.
    pub fn is_spanning_connected(&self) -> bool {
        self.vertex_set() as u32 == (1u32 << self.n) - 1 && self.is_connected()
    }

    /// `L ∪ C(A)`: adds an apex with label `n` and the triangles `{apex, a, b}` for `ab ∈ A`.
    pub fn cone_extend(&self, a: EdgeMask) -> Result<TriangleComplex, ComplexError> {
        check_cone_set(self.vertex_set(), self.edges(), self.free_edges(), a)?;
        Ok(self.cone_extend_unchecked(a))
    }

    pub(crate) fn cone_extend_unchecked(&self, a: EdgeMask) -> TriangleComplex {
        let apex = self.n as usize;
        let mut tris = self.tris;
        for e in ones_u128(a) {
            let (x, y) = PAIRS[e];
            tris.set(binom3(apex) + e);
            debug_assert_eq!(binom3(apex) + e, triangle_index(x as usize, y as usize, apex));
        }
        TriangleComplex { n: self.n + 1, tris }
    }

    /// Applies a vertex relabeling (`perm[old] = new`).
    pub fn relabel(&self, perm: &[usize]) -> TriangleComplex {
        let mut tris = TriMask::EMPTY;
        for [a, b, c] in self.triangles() {
            tris.set(triangle_index(perm[a], perm[b], perm[c]));
        }
        TriangleComplex { n: self.n, tris }
    }

    /// On 8 vertices: whether some split into two 4-vertex halves has one half spanning at
    /// least 2 triangles and the other at least 3. Such complexes have a fundamental group
    /// that is cyclic up to a free factor.
    pub fn split_prune_noncyclic(&self) -> Result<bool, ComplexError> {
        if self.n != 8 {
            return Err(ComplexError::WrongVertexCount { need: 8, got: self.n() });
        }
        let tris: Vec<Simplex> = self.triangles().map(|[a, b, c]| 1 << a | 1 << b | 1 << c).collect();
        let inside = |half: Simplex| tris.iter().filter(|&&t| t & half == t).count();
        for half in 0u16..256 {
            // each balanced split once: the half containing vertex 0
            if half.count_ones() != 4 || half & 1 == 0 {
                continue;
            }
            let x = inside(half);
            let y = inside(!half & 0xff);
            if (x >= 2 && y >= 3) || (x >= 3 && y >= 2) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl fmt::Debug for TriangleComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriangleComplex(n={}, {})", self.n, crate::io::render_facet_list(&self.to_complex()))
    }
}

/// JSON interchange form `{"n":8,"facets":[[0,1,4],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub n: usize,
    pub facets: Vec<Vec<usize>>,
}

impl From<&Complex> for ComplexJson {
    fn from(k: &Complex) -> Self {
        ComplexJson { n: k.n(), facets: k.facet_lists() }
    }
}

impl TryFrom<ComplexJson> for Complex {
    type Error = ComplexError;

    fn try_from(j: ComplexJson) -> Result<Self, Self::Error> {
        Complex::new(j.n, j.facets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn k(n: usize, facets: &[&[usize]]) -> Complex {
        Complex::new(n, facets.iter().map(|f| f.to_vec())).unwrap()
    }

    /// Free faces by counting, for each simplex, every simplex strictly containing it.
    fn free_faces_brute(c: &Complex) -> Vec<Simplex> {
        let all = c.simplices();
        let mut out: Vec<Simplex> = all
            .iter()
            .copied()
            .filter(|&s| all.iter().filter(|&&t| t != s && t & s == s).count() == 1)
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn colex_tables() {
        for (i, &(a, b)) in PAIRS.iter().enumerate() {
            assert_eq!(pair_index(a as usize, b as usize), i);
        }
        for (i, &(a, b, c)) in TRIANGLES.iter().enumerate() {
            assert_eq!(triangle_index(c as usize, a as usize, b as usize), i);
        }
        assert_eq!(binom3(8), 56);
    }

    #[test]
    fn trimask_hex_round_trip() {
        let mut m = TriMask::EMPTY;
        for i in [0, 5, 63, 64, 200, 559] {
            m.set(i);
        }
        assert_eq!(TriMask::from_hex(&m.to_hex()), Some(m));
        assert_eq!(TriMask::EMPTY.to_hex(), "0");
        assert_eq!(m.max_bit(), Some(559));
    }

    #[test]
    fn rejects_non_antichain_and_bad_labels() {
        let err = Complex::new(3, [vec![0, 1], vec![0, 1, 2]]).unwrap_err();
        assert_eq!(err.to_string(), "facet `0 1` contained in `0 1 2`");
        assert!(matches!(Complex::new(3, [vec![0, 3]]), Err(ComplexError::LabelOutOfRange { .. })));
        assert!(matches!(Complex::new(3, [vec![0, 0]]), Err(ComplexError::RepeatedVertex(0))));
        assert!(matches!(Complex::new(17, [vec![0]]), Err(ComplexError::VertexCount(17))));
    }

    #[test]
    fn connectivity() {
        assert!(k(3, &[&[0, 1, 2]]).is_connected());
        assert!(!k(6, &[&[0, 1, 2], &[3, 4, 5]]).is_connected());
        assert!(fixtures::rp2().is_connected());
    }

    #[test]
    fn free_faces_match_brute_force() {
        let tri = k(3, &[&[0, 1, 2]]);
        assert_eq!(tri.free_faces(), free_faces_brute(&tri));
        assert_eq!(tri.free_faces(), vec![0b011, 0b101, 0b110]);

        assert!(fixtures::boundary_tetrahedron().free_faces().is_empty());

        let two = k(4, &[&[0, 1, 2], &[1, 2, 3]]);
        let ff = two.free_faces();
        assert_eq!(ff, free_faces_brute(&two));
        for e in [[0, 1], [0, 2], [1, 3], [2, 3]] {
            assert!(ff.contains(&simplex_from_vertices(&e)));
        }
        assert!(!ff.contains(&simplex_from_vertices(&[1, 2])));

        let mixed = k(6, &[&[0, 1, 2, 3], &[3, 4], &[4, 5], &[2, 5]]);
        assert_eq!(mixed.free_faces(), free_faces_brute(&mixed));
    }

    #[test]
    fn collapse_examples() {
        let tri = k(3, &[&[0, 1, 2]]).collapse_free_faces();
        assert_eq!(tri.facets().len(), 1);
        assert_eq!(tri.facets()[0].count_ones(), 1);

        let sphere = fixtures::boundary_tetrahedron();
        assert_eq!(sphere.collapse_free_faces(), sphere);

        let two = k(4, &[&[0, 1, 2], &[1, 2, 3]]).collapse_free_faces();
        assert_eq!(two.vertex_count(), 1);
        assert_eq!(two.facets().len(), 1);
    }

    #[test]
    fn maximal_edges() {
        // pendant edge: contraction
        let r = k(4, &[&[0, 1, 2], &[2, 3]]).remove_maximal_edges();
        assert_eq!(r.free_rank_delta, 0);
        assert_eq!(r.reduced, k(3, &[&[0, 1, 2]]));

        // edges 03 and 13 close a loop: one removal, then a contraction
        let r = k(4, &[&[0, 1, 2], &[0, 3], &[1, 3]]).remove_maximal_edges();
        assert_eq!(r.free_rank_delta, 1);
        assert_eq!(r.reduced, k(3, &[&[0, 1, 2]]));

        let torus = fixtures::csaszar_torus();
        let r = torus.remove_maximal_edges();
        assert_eq!((r.reduced, r.free_rank_delta), (torus, 0));
    }

    #[test]
    fn reduce_examples() {
        let solid = k(4, &[&[0, 1, 2, 3]]);
        let r = solid.reduce_to_2pure().unwrap();
        assert_eq!((r.reduced, r.free_rank_delta), (Reduced::GraphLike, 0));

        let cycle = k(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let r = cycle.reduce_to_2pure().unwrap();
        assert_eq!((r.reduced, r.free_rank_delta), (Reduced::GraphLike, 1));

        let torus = fixtures::csaszar_torus();
        let r = torus.reduce_to_2pure().unwrap();
        assert_eq!(r.free_rank_delta, 0);
        assert_eq!(r.reduced, Reduced::TwoPure(TriangleComplex::from_complex(&torus).unwrap()));

        assert!(matches!(k(2, &[&[0, 1]]).reduce_to_2pure(), Err(ComplexError::TooFewVertices { .. })));
        assert!(matches!(
            k(6, &[&[0, 1, 2], &[3, 4, 5]]).reduce_to_2pure(),
            Err(ComplexError::Disconnected)
        ));
    }

    #[test]
    fn homology_examples() {
        assert_eq!(fixtures::rp2().homology_h1(), AbelianInvariants::new(0, vec![2]));
        assert_eq!(fixtures::csaszar_torus().homology_h1(), AbelianInvariants::free(2));
        // wedge of 3 circles: triangle boundary plus two loops through vertex 0
        let wedge = k(5, &[&[0, 1], &[1, 2], &[0, 2], &[0, 3], &[3, 4], &[0, 4], &[1, 4]]);
        assert_eq!(wedge.homology_h1(), AbelianInvariants::free(3));
        assert_eq!(fixtures::boundary_tetrahedron().homology_h1(), AbelianInvariants::trivial());
    }

    #[test]
    fn cone_extension() {
        let circle = k(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        let all = circle.edge_mask();
        let disk = circle.cone_over_edges(all).unwrap();
        assert_eq!(disk.facet_lists(), vec![vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]);
        assert_eq!(disk.homology_h1(), AbelianInvariants::trivial());

        let tree = 1 << pair_index(0, 1) | 1 << pair_index(1, 2);
        let coned = circle.cone_over_edges(tree).unwrap();
        assert_eq!(coned.homology_h1(), AbelianInvariants::free(1));

        let not_spanning = 1 << pair_index(0, 1);
        assert!(circle.cone_over_edges(not_spanning).is_err());

        let rp2 = TriangleComplex::from_complex(&fixtures::rp2()).unwrap();
        let tree: EdgeMask = [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]
            .iter()
            .map(|&(a, b)| 1u128 << pair_index(a, b))
            .sum();
        let ext = rp2.cone_extend(tree).unwrap();
        assert_eq!(ext.n(), 7);
        assert_eq!(ext.triangle_count(), 15);
        assert_eq!(ext.to_complex().homology_h1(), AbelianInvariants::new(0, vec![2]));

        // free edges of L must be coned
        let two = TriangleComplex::new(4, &[[0, 1, 2], [1, 2, 3]]).unwrap();
        let tree = 1 << pair_index(0, 1) | 1 << pair_index(1, 2) | 1 << pair_index(2, 3);
        assert!(two.cone_extend(tree).is_err());
        assert!(two.cone_extend(two.free_edges()).is_ok());
    }

    #[test]
    fn split_prune() {
        let mut tris = Vec::new();
        for base in [0, 4] {
            for skip in 0..4 {
                let t: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| base + i).collect();
                tris.push([t[0], t[1], t[2]]);
            }
        }
        let two_spheres = TriangleComplex::new(8, &tris).unwrap();
        assert!(two_spheres.split_prune_noncyclic().unwrap());

        // a triangle fan around vertex 0: any 4-set spans at most one triangle...
        let sparse = TriangleComplex::new(8, &[[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 7]]).unwrap();
        assert!(!sparse.split_prune_noncyclic().unwrap());

        let small = TriangleComplex::new(7, &[[0, 1, 2]]).unwrap();
        assert!(small.split_prune_noncyclic().is_err());
    }

    #[test]
    fn triangle_complex_round_trip() {
        let torus = fixtures::csaszar_torus();
        let tc = TriangleComplex::from_complex(&torus).unwrap();
        assert_eq!(tc.to_complex(), torus);
        assert!(tc.is_spanning_connected());
        assert_eq!(tc.free_edges(), 0);
        assert_eq!(tc.edges().count_ones(), 21);
    }
}
