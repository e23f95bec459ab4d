//! Isomorphism-free generation of 2-pure complexes (3-uniform hypergraphs).
//!
//! The canonical form of a triangle set is the image, over all vertex relabelings, whose
//! sorted list of colex triangle ranks is lexicographically least. For sets of equal size
//! this is the image whose bit string, read from rank 0 upwards, is lexicographically
//! greatest. Dropping the highest-ranked triangle of a canonical set leaves a canonical set,
//! so every class is reached exactly once by adding triangles in increasing rank order and
//! keeping only canonical children.

pub mod counting;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{binom3, TriMask, TriangleComplex, MAX_VERTICES, TRIANGLES};

pub use counting::{count_reference, kisielewicz_d, partitions, qian_h3, CountError, CountKind};

/// Lex-least representative of an isomorphism class of triangle sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: usize,
    #[serde(with = "hex_mask")]
    pub mask: TriMask,
}

impl CanonicalForm {
    pub fn complex(&self) -> TriangleComplex {
        TriangleComplex::from_mask(self.n, self.mask).expect("canonical mask is in range")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm(n={}, {})", self.n, self.mask.to_hex())
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalForm {
    /// Generation order: by vertex count, then by sorted rank list.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| self.mask.rank_list_cmp(&other.mask))
    }
}

pub(crate) mod hex_mask {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::complex::TriMask;

    pub fn serialize<S: Serializer>(m: &TriMask, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&m.to_hex())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<TriMask, D::Error> {
        let s = String::deserialize(d)?;
        TriMask::from_hex(&s).ok_or_else(|| D::Error::custom(format!("bad triangle mask `{s}`")))
    }
}

// ---------------------------------------------------------------------------
// link structure

/// `link[a][b]` = vertices `c` with `{a, b, c}` a triangle.
#[derive(Clone)]
struct Links {
    n: usize,
    link: [[u16; MAX_VERTICES]; MAX_VERTICES],
}

impl Links {
    fn empty(n: usize) -> Self {
        Links { n, link: [[0; MAX_VERTICES]; MAX_VERTICES] }
    }

    fn from_mask(n: usize, m: &TriMask) -> Self {
        let mut l = Self::empty(n);
        for t in m.ones() {
            l.toggle(t);
        }
        l
    }

    #[inline]
    fn toggle(&mut self, t: usize) {
        let (a, b, c) = TRIANGLES[t];
        let (a, b, c) = (a as usize, b as usize, c as usize);
        self.link[a][b] ^= 1 << c;
        self.link[b][a] ^= 1 << c;
        self.link[a][c] ^= 1 << b;
        self.link[c][a] ^= 1 << b;
        self.link[b][c] ^= 1 << a;
        self.link[c][b] ^= 1 << a;
    }

    #[inline]
    fn has(&self, a: usize, b: usize, c: usize) -> bool {
        self.link[a][b] >> c & 1 == 1
    }

    /// Segment of label `k` under the identity labeling.
    fn identity_segment(&self, k: usize) -> u128 {
        let mut s = 0u128;
        for b in 1..k {
            for a in 0..b {
                s = s << 1 | self.has(a, b, k) as u128;
            }
        }
        s
    }
}

/// Search state shared by the canonicity test and the canonical labeling.
struct Search<'a> {
    links: &'a Links,
    perm: [usize; MAX_VERTICES],
    used: u16,
}

impl<'a> Search<'a> {
    fn new(links: &'a Links) -> Self {
        Search { links, perm: [0; MAX_VERTICES], used: 0 }
    }

    /// Segments of every unassigned vertex after assigning `w` as label `k`.
    #[inline]
    fn extend(&self, segs: &[u128; MAX_VERTICES], k: usize, w: usize) -> [u128; MAX_VERTICES] {
        let n = self.links.n;
        let mut out = [0u128; MAX_VERTICES];
        for u in 0..n {
            if self.used >> u & 1 == 1 || u == w {
                continue;
            }
            let mut block = 0u128;
            for a in 0..k {
                block = block << 1 | (self.links.link[self.perm[a]][w] >> u & 1) as u128;
            }
            out[u] = segs[u] << k | block;
        }
        out
    }

    /// False as soon as some relabeling beats `reference` (identity segments).
    fn never_beaten(&mut self, k: usize, segs: &[u128; MAX_VERTICES], reference: &[u128; MAX_VERTICES]) -> bool {
        let n = self.links.n;
        if k == n {
            return true;
        }
        let r = reference[k];
        let mut ties = 0u16;
        for w in 0..n {
            if self.used >> w & 1 == 0 {
                if segs[w] > r {
                    return false;
                }
                if segs[w] == r {
                    ties |= 1 << w;
                }
            }
        }
        while ties != 0 {
            let w = ties.trailing_zeros() as usize;
            ties &= ties - 1;
            let next = self.extend(segs, k, w);
            self.perm[k] = w;
            self.used |= 1 << w;
            let ok = self.never_beaten(k + 1, &next, reference);
            self.used &= !(1 << w);
            if !ok {
                return false;
            }
        }
        true
    }

    /// Branch and bound for the greatest segment sequence.
    fn best(
        &mut self,
        k: usize,
        segs: &[u128; MAX_VERTICES],
        best: &mut [u128; MAX_VERTICES],
        valid: &mut usize,
        best_perm: &mut [usize; MAX_VERTICES],
    ) {
        let n = self.links.n;
        if k == n {
            if *valid <= n {
                *valid = n + 1;
                best_perm[..n].copy_from_slice(&self.perm[..n]);
            }
            return;
        }
        let mut order: Vec<(u128, usize)> = (0..n)
            .filter(|&w| self.used >> w & 1 == 0)
            .map(|w| (segs[w], w))
            .collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (s, w) in order {
            if *valid > k {
                if s < best[k] {
                    break;
                }
                if s > best[k] {
                    best[k] = s;
                    *valid = k + 1;
                }
            } else {
                best[k] = s;
                *valid = k + 1;
            }
            let next = self.extend(segs, k, w);
            self.perm[k] = w;
            self.used |= 1 << w;
            self.best(k + 1, &next, best, valid, best_perm);
            self.used &= !(1 << w);
            // a deeper improvement changed the prefix we are matching
            if *valid <= k {
                break;
            }
        }
    }
}

fn is_canonical_links(links: &Links) -> bool {
    let n = links.n;
    let mut reference = [0u128; MAX_VERTICES];
    for (k, r) in reference.iter_mut().enumerate().take(n) {
        *r = links.identity_segment(k);
    }
    Search::new(links).never_beaten(0, &[0; MAX_VERTICES], &reference)
}

/// Whether the triangle set is its own canonical form.
pub fn is_canonical(k: &TriangleComplex) -> bool {
    is_canonical_links(&Links::from_mask(k.n(), k.mask()))
}

/// A relabeling `perm[old] = new` taking `k` to its canonical form.
pub fn canonical_labeling(k: &TriangleComplex) -> Vec<usize> {
    let n = k.n();
    let links = Links::from_mask(n, k.mask());
    let mut search = Search::new(&links);
    let mut best = [0u128; MAX_VERTICES];
    let mut valid = 0;
    let mut best_perm = [0usize; MAX_VERTICES];
    search.best(0, &[0; MAX_VERTICES], &mut best, &mut valid, &mut best_perm);
    // best_perm[new] = old
    let mut perm = vec![0; n];
    for (new, &old) in best_perm[..n].iter().enumerate() {
        perm[old] = new;
    }
    perm
}

pub fn canonical_form(k: &TriangleComplex) -> CanonicalForm {
    let perm = canonical_labeling(k);
    CanonicalForm { n: k.n(), mask: *k.relabel(&perm).mask() }
}

// ---------------------------------------------------------------------------
// orderly generation

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    /// Every nonempty triangle set on `n` labels (unused labels allowed).
    All,
    /// Nonempty and connected; unused labels allowed.
    Connected,
    /// Connected and every label lies in a triangle.
    SpanningConnected,
}

impl Filter {
    pub fn accepts(self, k: &TriangleComplex) -> bool {
        match self {
            Filter::All => k.triangle_count() > 0,
            Filter::Connected => k.is_connected(),
            Filter::SpanningConnected => k.is_spanning_connected(),
        }
    }
}

impl std::str::FromStr for Filter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Filter::All),
            "connected" => Ok(Filter::Connected),
            "spanning-connected" | "spanning" => Ok(Filter::SpanningConnected),
            other => Err(format!("unknown filter `{other}`")),
        }
    }
}

/// Shard `index` of `count` (0-based index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shard {
    pub index: usize,
    pub count: usize,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 0, count: 1 };

    pub fn new(index: usize, count: usize) -> Option<Self> {
        (count > 0 && index < count).then_some(Shard { index, count })
    }
}

/// Depth of the generation tree at which work is split between shards.
pub const SHARD_DEPTH: usize = 3;

struct Generator<'f, F: FnMut(TriangleComplex)> {
    n: usize,
    filter: Filter,
    shard: Shard,
    links: Links,
    mask: TriMask,
    split_counter: usize,
    emit: &'f mut F,
}

impl<F: FnMut(TriangleComplex)> Generator<'_, F> {
    fn visit(&mut self, depth: usize, next: usize) {
        if depth == SHARD_DEPTH {
            let mine = self.split_counter % self.shard.count == self.shard.index;
            self.split_counter += 1;
            if !mine {
                return;
            }
        }
        if depth > 0 && (depth >= SHARD_DEPTH || self.shard.index == 0) {
            let k = TriangleComplex::from_mask(self.n, self.mask).expect("mask in range");
            if self.filter.accepts(&k) {
                (self.emit)(k);
            }
        }
        for t in next..binom3(self.n) {
            self.links.toggle(t);
            self.mask.set(t);
            if is_canonical_links(&self.links) {
                self.visit(depth + 1, t + 1);
            }
            self.mask.clear(t);
            self.links.toggle(t);
        }
    }
}

/// Streams one representative per isomorphism class, in increasing canonical order.
pub fn for_each_2pure<F: FnMut(TriangleComplex)>(n: usize, filter: Filter, shard: Shard, mut emit: F) {
    assert!((1..=MAX_VERTICES).contains(&n), "vertex count {n} out of range");
    let mut g = Generator {
        n,
        filter,
        shard,
        links: Links::empty(n),
        mask: TriMask::EMPTY,
        split_counter: 0,
        emit: &mut emit,
    };
    g.visit(0, 0);
}

pub fn enumerate_2pure(n: usize, filter: Filter) -> Vec<TriangleComplex> {
    let mut out = Vec::new();
    for_each_2pure(n, filter, Shard::WHOLE, |k| out.push(k));
    out
}

/// All shards generated in parallel and merged into the sequential order.
pub fn enumerate_2pure_parallel(n: usize, filter: Filter, shards: usize) -> Vec<TriangleComplex> {
    use rayon::prelude::*;
    let parts: Vec<Vec<TriangleComplex>> = (0..shards.max(1))
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for_each_2pure(n, filter, Shard { index: i, count: shards.max(1) }, |k| out.push(k));
            out
        })
        .collect();
    let mut all: Vec<TriangleComplex> = parts.into_iter().flatten().collect();
    all.sort_by(|a, b| a.mask().rank_list_cmp(b.mask()));
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::triangle_index;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == used.len() {
                out.push(cur.clone());
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    go(cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    /// Canonical mask by trying every relabeling.
    fn canonical_brute(k: &TriangleComplex) -> TriMask {
        permutations(k.n())
            .iter()
            .map(|p| *k.relabel(p).mask())
            .min_by(|a, b| a.rank_list_cmp(b))
            .unwrap()
    }

    fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> TriangleComplex {
        let mut m = TriMask::EMPTY;
        let p: f64 = rng.gen_range(0.1..0.7);
        for t in 0..binom3(n) {
            if rng.gen_bool(p) {
                m.set(t);
            }
        }
        TriangleComplex::from_mask(n, m).unwrap()
    }

    #[test]
    fn single_triangle() {
        let k = TriangleComplex::new(6, &[[1, 3, 5]]).unwrap();
        let c = canonical_form(&k);
        assert_eq!(c.mask, TriMask::from_u64(1));
        assert_eq!(c.mask.ones().next(), Some(triangle_index(0, 1, 2)));
    }

    #[test]
    fn matches_brute_force_exhaustively_on_four_vertices() {
        for bits in 1u64..(1 << 4) {
            let k = TriangleComplex::from_u64(4, bits);
            let c = canonical_form(&k);
            assert_eq!(c.mask, canonical_brute(&k), "bits {bits:b}");
            assert_eq!(is_canonical(&k), c.mask == *k.mask());
        }
    }

    #[test]
    fn matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(3..=6);
            let k = random_complex(&mut rng, n);
            let c = canonical_form(&k);
            assert_eq!(c.mask, canonical_brute(&k));
            assert_eq!(is_canonical(&k), c.mask == *k.mask());
        }
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(3..=8);
            let k = random_complex(&mut rng, n);
            let c = canonical_form(&k);
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            assert_eq!(canonical_form(&k.relabel(&p)), c);
            assert_eq!(canonical_form(&c.complex()), c);
        }
    }

    #[test]
    fn generation_counts_match_h3() {
        for n in 3..=6 {
            let all = enumerate_2pure(n, Filter::All);
            assert_eq!(num_bigint::BigUint::from(all.len() + 1), qian_h3(n), "n={n}");
        }
    }

    #[test]
    fn generation_is_isomorph_free_and_canonical() {
        let all = enumerate_2pure(5, Filter::All);
        let forms: HashSet<CanonicalForm> = all.iter().map(canonical_form).collect();
        assert_eq!(forms.len(), all.len());
        for k in &all {
            assert_eq!(canonical_form(k).mask, *k.mask());
        }
        assert!(all.windows(2).all(|w| w[0].mask().rank_list_cmp(w[1].mask()).is_lt()));
    }

    #[test]
    fn filters_and_shards() {
        let spanning = enumerate_2pure(5, Filter::SpanningConnected);
        let brute: HashSet<TriMask> = (1u64..1 << 10)
            .map(|b| TriangleComplex::from_u64(5, b))
            .filter(|k| k.is_spanning_connected())
            .map(|k| canonical_brute(&k))
            .collect();
        assert_eq!(spanning.len(), brute.len());

        let whole = enumerate_2pure(6, Filter::Connected);
        for m in [2, 5] {
            let mut merged = Vec::new();
            for i in 0..m {
                for_each_2pure(6, Filter::Connected, Shard::new(i, m).unwrap(), |k| merged.push(k));
            }
            merged.sort_by(|a, b| a.mask().rank_list_cmp(b.mask()));
            assert_eq!(merged, whole);
        }
        assert_eq!(enumerate_2pure_parallel(6, Filter::Connected, 3), whole);
    }
}
