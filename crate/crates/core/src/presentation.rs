//! Finite group presentations: words, the edge-path presentation of a complex, Tietze
//! simplification and abelianization.
//!
//! A word is a sequence of nonzero signed generator indices: `g` for generator `g` (1-based)
//! and `-g` for its inverse.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::AbelianInvariants;
use crate::complex::{pair_index, simplex_vertices, Complex, TriangleComplex, MAX_PAIRS, PAIRS};

pub type Letter = i32;
pub type Word = Vec<Letter>;

pub const DEFAULT_TIETZE_BUDGET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("complex is disconnected")]
    Disconnected,
    #[error("complex is empty")]
    Empty,
    #[error("relator {relator} uses letter {letter} but there are {gens} generators")]
    LetterOutOfRange { relator: usize, letter: Letter, gens: usize },
}

// ---------------------------------------------------------------------------
// words

pub fn inverse(w: &[Letter]) -> Word {
    w.iter().rev().map(|&x| -x).collect()
}

/// Cancels adjacent inverse pairs in place.
pub fn free_reduce(w: &mut Word) {
    let mut out = 0;
    for i in 0..w.len() {
        let x = w[i];
        if out > 0 && w[out - 1] == -x {
            out -= 1;
        } else {
            w[out] = x;
            out += 1;
        }
    }
    w.truncate(out);
}

/// Free reduction followed by cancellation between the two ends.
pub fn cyclic_reduce(w: &mut Word) {
    free_reduce(w);
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == -w[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    if lo > 0 {
        w.copy_within(lo..hi, 0);
        w.truncate(hi - lo);
    }
}

/// Least rotation of `w` or of its inverse; equal for words defining the same relator.
pub fn canonical_cyclic(w: &[Letter]) -> Word {
    let inv = inverse(w);
    let mut best: Option<Word> = None;
    for base in [w, &inv[..]] {
        for k in 0..base.len().max(1) {
            let rot: Word = base[k..].iter().chain(&base[..k]).copied().collect();
            if best.as_ref().is_none_or(|b| letter_order(&rot).lt(letter_order(b))) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Orders letters as `1 < -1 < 2 < -2 < ...`.
fn letter_order(w: &[Letter]) -> impl Iterator<Item = u32> + Clone + '_ {
    w.iter().map(|&x| 2 * x.unsigned_abs() + u32::from(x < 0))
}

fn exponent_sum(w: &[Letter], g: usize) -> i64 {
    w.iter()
        .map(|&x| match x.unsigned_abs() as usize == g {
            true => x.signum() as i64,
            false => 0,
        })
        .sum()
}

// ---------------------------------------------------------------------------
// presentations

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Presentation {
    pub gens: usize,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(gens: usize, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for (i, r) in relators.iter().enumerate() {
            if let Some(&letter) = r.iter().find(|&&x| x == 0 || x.unsigned_abs() as usize > gens) {
                return Err(PresentationError::LetterOutOfRange { relator: i, letter, gens });
            }
        }
        Ok(Self { gens, relators })
    }

    /// The free group of rank `r`.
    pub fn free(r: usize) -> Self {
        Self { gens: r, relators: Vec::new() }
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Vec::len).sum()
    }

    /// Free product with `F_r`: appends `r` generators without relators.
    pub fn free_product_with_free(&self, r: usize) -> Self {
        Self { gens: self.gens + r, relators: self.relators.clone() }
    }

    /// Exponent-sum matrix, one row per relator.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; self.gens];
                for &x in r {
                    row[x.unsigned_abs() as usize - 1] += x.signum() as i64;
                }
                row
            })
            .collect()
    }

    /// Number of occurrences of each generator across all relators (index 0 unused).
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.gens + 1];
        for r in &self.relators {
            for &x in r {
                occ[x.unsigned_abs() as usize] += 1;
            }
        }
        occ
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Invariants of the abelianized group.
pub fn abelianization(p: &Presentation) -> AbelianInvariants {
    AbelianInvariants::from_relations(p.gens, &p.exponent_matrix())
}

// ---------------------------------------------------------------------------
// edge-path presentation

/// Edge-path presentation: spanning tree by breadth-first search from the least vertex,
/// neighbors visited in increasing order; generators are the remaining edges in
/// lexicographic order; each triangle `u < v < w` gives the relator `g_uv g_vw g_uw⁻¹`.
pub fn edge_path_presentation(k: &Complex) -> Result<Presentation, PresentationError> {
    if k.is_empty() {
        return Err(PresentationError::Empty);
    }
    if !k.is_connected() {
        return Err(PresentationError::Disconnected);
    }
    let edges = k.edge_mask();
    let triangles: Vec<[usize; 3]> = k
        .triangle_mask()
        .ones()
        .map(|t| {
            let (a, b, c) = crate::complex::TRIANGLES[t];
            [a as usize, b as usize, c as usize]
        })
        .collect();
    Ok(edge_path_from_parts(k.vertex_set(), edges, &triangles))
}

/// Same presentation computed directly from the triangle set.
pub fn edge_path_presentation_2pure(k: &TriangleComplex) -> Result<Presentation, PresentationError> {
    if k.triangle_count() == 0 {
        return Err(PresentationError::Empty);
    }
    if !k.is_connected() {
        return Err(PresentationError::Disconnected);
    }
    let triangles: Vec<[usize; 3]> = k.triangles().collect();
    Ok(edge_path_from_parts(k.vertex_set(), k.edges(), &triangles))
}

/// Generator index (1-based, 0 for tree edges) of each edge, and the generator count.
pub fn edge_generators(vertices: u16, edges: u128) -> ([Letter; MAX_PAIRS], usize) {
    let n = 16 - vertices.leading_zeros() as usize;
    let mut adj = [0u16; 16];
    for e in crate::complex::ones_u128(edges) {
        let (a, b) = PAIRS[e];
        adj[a as usize] |= 1 << b;
        adj[b as usize] |= 1 << a;
    }
    let mut tree = 0u128;
    if vertices != 0 {
        let root = vertices.trailing_zeros() as usize;
        let mut seen: u16 = 1 << root;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in simplex_vertices(adj[u]) {
                if seen >> v & 1 == 0 {
                    seen |= 1 << v;
                    tree |= 1 << pair_index(u, v);
                    queue.push_back(v);
                }
            }
        }
    }
    let mut label = [0 as Letter; MAX_PAIRS];
    let mut next = 0;
    // lexicographic order of (u, v), u < v
    for u in 0..n {
        for v in u + 1..n {
            let e = pair_index(u, v);
            if edges >> e & 1 == 1 && tree >> e & 1 == 0 {
                next += 1;
                label[e] = next;
            }
        }
    }
    (label, next as usize)
}

fn edge_path_from_parts(vertices: u16, edges: u128, triangles: &[[usize; 3]]) -> Presentation {
    let (label, gens) = edge_generators(vertices, edges);
    let relators = triangles
        .iter()
        .map(|&[u, v, w]| {
            let mut r = Word::with_capacity(3);
            for (x, sign) in [(pair_index(u, v), 1), (pair_index(v, w), 1), (pair_index(u, w), -1)] {
                if label[x] != 0 {
                    r.push(sign * label[x]);
                }
            }
            r
        })
        .collect();
    Presentation { gens, relators }
}

// ---------------------------------------------------------------------------
// Tietze simplification

/// A presentation under simplification, optionally tracking the images of the generators
/// it started from as words in the current generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tietze {
    pub gens: usize,
    pub relators: Vec<Word>,
    pub images: Option<Vec<Word>>,
    /// Accepted steps so far.
    pub steps: usize,
}

impl Tietze {
    pub fn new(p: &Presentation) -> Self {
        Tietze { gens: p.gens, relators: p.relators.clone(), images: None, steps: 0 }
    }

    /// Tracks each original generator `g` starting from the word `[g]`.
    pub fn tracked(p: &Presentation) -> Self {
        let images = (1..=p.gens as Letter).map(|g| vec![g]).collect();
        Tietze { gens: p.gens, relators: p.relators.clone(), images: Some(images), steps: 0 }
    }

    pub fn presentation(&self) -> Presentation {
        Presentation { gens: self.gens, relators: self.relators.clone() }
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Vec::len).sum()
    }

    /// Image of an original generator, or of its inverse for a negative letter.
    pub fn image(&self, letter: Letter) -> Word {
        let images = self.images.as_ref().expect("images are tracked");
        let w = &images[letter.unsigned_abs() as usize - 1];
        if letter > 0 {
            w.clone()
        } else {
            inverse(w)
        }
    }

    /// Adds a relator written in the current generators.
    pub fn add_relator(&mut self, r: Word) {
        self.relators.push(r);
    }

    /// Cyclic reduction, removal of trivial and duplicate relators, and a fixed order.
    fn normalize(&mut self) {
        let mut seen = HashSet::with_capacity(self.relators.len());
        let mut out: Vec<Word> = Vec::with_capacity(self.relators.len());
        for r in self.relators.drain(..) {
            let mut r = r;
            cyclic_reduce(&mut r);
            if r.is_empty() {
                continue;
            }
            let c = canonical_cyclic(&r);
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| letter_order(a).cmp(letter_order(b))));
        self.relators = out;
    }

    /// On one generator every relator is a power; keep only the gcd of the exponents.
    fn collapse_powers(&mut self) -> bool {
        if self.gens != 1 || self.relators.len() <= 1 && self.relators.iter().all(|r| r.iter().all(|&x| x == r[0])) {
            return false;
        }
        let d = self.relators.iter().fold(0u64, |acc, r| gcd(acc, exponent_sum(r, 1).unsigned_abs()));
        self.relators = if d == 0 { Vec::new() } else { vec![vec![1; d as usize]] };
        true
    }

    /// Replaces every occurrence of generator `g` by `rep`, then renumbers the generators
    /// above `g` down by one.
    fn substitute(&mut self, g: usize, rep: &[Letter]) {
        let rep_inv = inverse(rep);
        let rewrite = |w: &Word| -> Word {
            let mut out = Word::with_capacity(w.len());
            for &x in w {
                let a = x.unsigned_abs() as usize;
                if a == g {
                    out.extend_from_slice(if x > 0 { rep } else { &rep_inv });
                } else {
                    out.push(x);
                }
            }
            for x in out.iter_mut() {
                if x.unsigned_abs() as usize > g {
                    *x -= x.signum();
                }
            }
            free_reduce(&mut out);
            out
        };
        self.relators = self.relators.iter().map(rewrite).collect();
        if let Some(images) = self.images.as_mut() {
            for w in images.iter_mut() {
                *w = rewrite(w);
            }
        }
        self.gens -= 1;
    }

    /// Eliminates a generator occurring once in some relator, if that does not lengthen
    /// the presentation. Shorter relators and lower generators are tried first.
    fn eliminate(&mut self) -> bool {
        let total = self.total_length();
        let mut occ = vec![0usize; self.gens + 1];
        for r in &self.relators {
            for &x in r {
                occ[x.unsigned_abs() as usize] += 1;
            }
        }
        for ri in 0..self.relators.len() {
            let r = &self.relators[ri];
            let mut local = vec![0usize; self.gens + 1];
            for &x in r {
                local[x.unsigned_abs() as usize] += 1;
            }
            for g in 1..=self.gens {
                if local[g] != 1 {
                    continue;
                }
                let len = r.len();
                let others = occ[g] - 1;
                let estimate = others as isize * (len as isize - 2) - len as isize;
                let pos = r.iter().position(|&x| x.unsigned_abs() as usize == g).unwrap();
                // r rotated to g^e · u, so g^e = u⁻¹
                let u: Word = r[pos + 1..].iter().chain(&r[..pos]).copied().collect();
                let rep = if r[pos] > 0 { inverse(&u) } else { u };
                if estimate > 0 {
                    let mut trial = self.clone();
                    trial.images = None;
                    trial.relators.remove(ri);
                    trial.substitute(g, &rep);
                    let new_total: usize = trial
                        .relators
                        .iter_mut()
                        .map(|w| {
                            cyclic_reduce(w);
                            w.len()
                        })
                        .sum();
                    if new_total > total {
                        continue;
                    }
                }
                self.relators.remove(ri);
                self.substitute(g, &rep);
                return true;
            }
        }
        false
    }

    /// Shortens a relator using a piece of another relator longer than half of it.
    fn replace_subword(&mut self) -> bool {
        let rels = &self.relators;
        for j in 0..rels.len() {
            let m = rels[j].len();
            let variants = [rels[j].clone(), inverse(&rels[j])];
            for i in 0..rels.len() {
                if i == j || rels[i].len() <= m / 2 {
                    continue;
                }
                let target = &rels[i];
                let t = target.len();
                let mut best: Option<(usize, usize, usize, usize)> = None; // (len, variant, start_in_j, start_in_i)
                for (vi, v) in variants.iter().enumerate() {
                    for s in 0..m {
                        for q in 0..t {
                            let mut l = 0;
                            while l < m && l < t && v[(s + l) % m] == target[(q + l) % t] {
                                l += 1;
                            }
                            if 2 * l > m && best.is_none_or(|b| l > b.0) {
                                best = Some((l, vi, s, q));
                            }
                        }
                    }
                }
                if let Some((l, vi, s, q)) = best {
                    let v = &variants[vi];
                    // v rotated to start at s is P·S with |P| = l; P = S⁻¹
                    let suffix: Word = (l..m).map(|k| v[(s + k) % m]).collect();
                    let mut new: Word = inverse(&suffix);
                    new.extend((l..t).map(|k| target[(q + k) % t]));
                    self.relators[i] = new;
                    return true;
                }
            }
        }
        false
    }

    /// Runs the moves, cheapest first, until none applies or `budget` steps were taken.
    pub fn simplify(&mut self, budget: usize) {
        self.normalize();
        while self.steps < budget {
            let moved = self.collapse_powers() || self.eliminate() || (self.gens >= 2 && self.replace_subword());
            if !moved {
                break;
            }
            self.steps += 1;
            self.normalize();
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Simplified presentation of the same group.
pub fn tietze_simplify(p: &Presentation, budget: usize) -> Presentation {
    let mut t = Tietze::new(p);
    t.simplify(budget);
    t.presentation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(gens: usize, rels: &[&[Letter]]) -> Presentation {
        Presentation::new(gens, rels.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn word_reductions() {
        let mut w = vec![1, 2, -2, -1, 3];
        free_reduce(&mut w);
        assert_eq!(w, vec![3]);
        let mut w = vec![-1, 2, 3, 1];
        cyclic_reduce(&mut w);
        assert_eq!(w, vec![2, 3]);
        assert_eq!(canonical_cyclic(&[2, 1]), canonical_cyclic(&[-1, -2]));
        assert_eq!(inverse(&[1, -2]), vec![2, -1]);
    }

    #[test]
    fn edge_path_examples() {
        let circle = Complex::new(3, [vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(edge_path_presentation(&circle).unwrap(), p(1, &[]));
        let disk = Complex::new(3, [vec![0, 1, 2]]).unwrap();
        assert_eq!(edge_path_presentation(&disk).unwrap(), p(1, &[&[1]]));
        let torus = edge_path_presentation(&fixtures::csaszar_torus()).unwrap();
        assert_eq!(abelianization(&torus), AbelianInvariants::free(2));
        assert_eq!(torus.gens, 21 - 6);
        assert_eq!(torus.relators.len(), 14);
        let two = Complex::new(6, [vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(edge_path_presentation(&two), Err(PresentationError::Disconnected));
    }

    #[test]
    fn tietze_examples() {
        assert_eq!(tietze_simplify(&p(2, &[&[2]]), DEFAULT_TIETZE_BUDGET), p(1, &[]));
        assert_eq!(tietze_simplify(&p(2, &[&[1, 2, -1, -2], &[2]]), DEFAULT_TIETZE_BUDGET), p(1, &[]));
        let rp2 = edge_path_presentation(&fixtures::rp2()).unwrap();
        let s = tietze_simplify(&rp2, DEFAULT_TIETZE_BUDGET);
        assert!(s.gens <= 2);
        assert_eq!(abelianization(&s), AbelianInvariants::new(0, vec![2]));
        assert_eq!(s, p(1, &[&[1, 1]]));
    }

    #[test]
    fn one_generator_collapses_to_gcd() {
        let s = tietze_simplify(&p(1, &[&[1, 1, 1, 1, 1, 1], &[1, 1, 1, 1]]), 100);
        assert_eq!(s, p(1, &[&[1, 1]]));
        let s = tietze_simplify(&p(1, &[&[1, 1, -1, -1]]), 100);
        assert_eq!(s, p(1, &[]));
    }

    #[test]
    fn abelianization_examples() {
        assert_eq!(abelianization(&p(2, &[&[1, 2, -1, -2]])), AbelianInvariants::free(2));
        assert_eq!(abelianization(&p(2, &[&[1, 2, 1, -2, -1, -2]])), AbelianInvariants::free(1));
        assert_eq!(abelianization(&p(1, &[&[1, 1, 1, 1]])), AbelianInvariants::new(0, vec![4]));
    }

    #[test]
    fn subword_replacement_shortens() {
        let mut t = Tietze::new(&p(3, &[&[1, 2, 3, 1, 2], &[1, 2, 3, -2]]));
        t.normalize();
        let before = t.total_length();
        assert!(t.replace_subword());
        t.normalize();
        assert!(t.total_length() < before);
        assert_eq!(abelianization(&t.presentation()), abelianization(&p(3, &[&[1, 2, 3, 1, 2], &[1, 2, 3, -2]])));
    }

    #[test]
    fn tracked_images_follow_eliminations() {
        // <a,b,c | c a⁻¹ b⁻¹> eliminates c = b a
        let mut t = Tietze::tracked(&p(3, &[&[3, -1, -2]]));
        t.simplify(100);
        assert_eq!(t.gens, 2);
        assert!(t.relators.is_empty());
        let mut w: Word = [3, -1, -2].iter().flat_map(|&x| t.image(x)).collect();
        free_reduce(&mut w);
        assert!(w.is_empty());
        assert!((1..=3).all(|g| !t.image(g).is_empty()));
    }

    fn random_presentation(rng: &mut ChaCha8Rng) -> Presentation {
        let gens = rng.gen_range(1..=4);
        let nrel = rng.gen_range(0..=4);
        let rels = (0..nrel)
            .map(|_| {
                let len = rng.gen_range(1..=8);
                (0..len)
                    .map(|_| {
                        let g = rng.gen_range(1..=gens) as Letter;
                        if rng.gen_bool(0.5) {
                            g
                        } else {
                            -g
                        }
                    })
                    .collect()
            })
            .collect();
        Presentation::new(gens, rels).unwrap()
    }

    #[test]
    fn simplification_preserves_abelianization_and_never_grows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let pres = random_presentation(&mut rng);
            let s = tietze_simplify(&pres, DEFAULT_TIETZE_BUDGET);
            assert_eq!(abelianization(&s), abelianization(&pres), "{pres:?} -> {s:?}");
            assert!(s.gens <= pres.gens);
        }
    }
}
