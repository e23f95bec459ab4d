//! Todd–Coxeter coset enumeration over the trivial subgroup (HLT strategy).

use crate::presentation::{Letter, Presentation};

pub const DEFAULT_MAX_COSETS: usize = 100_000;

struct Table {
    cols: usize,
    rows: Vec<u32>,
    /// Union-find parent; a coset is live when it is its own parent.
    parent: Vec<u32>,
    max: usize,
    queue: Vec<u32>,
}

const UNDEF: u32 = u32::MAX;

impl Table {
    #[inline]
    fn col(x: Letter) -> usize {
        let g = x.unsigned_abs() as usize - 1;
        2 * g + usize::from(x < 0)
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.rows[c as usize * self.cols + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, v: u32) {
        self.rows[c as usize * self.cols + col] = v;
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, col: usize) -> Option<u32> {
        if self.parent.len() >= self.max {
            return None;
        }
        let d = self.parent.len() as u32;
        self.parent.push(d);
        self.rows.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        Some(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.parent[hi as usize] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for col in 0..self.cols {
                let f = self.get(e, col);
                if f == UNDEF {
                    continue;
                }
                if self.get(f, col ^ 1) == e {
                    self.set(f, col ^ 1, UNDEF);
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                let ex = self.get(e1, col);
                if ex != UNDEF {
                    self.merge(f1, ex);
                } else {
                    let fx = self.get(f1, col ^ 1);
                    if fx != UNDEF {
                        self.merge(e1, fx);
                    } else {
                        self.set(e1, col, f1);
                        self.set(f1, col ^ 1, e1);
                    }
                }
            }
        }
    }

    /// Traces `w` from `c` in both directions, defining cosets to close the gap.
    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> Option<()> {
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len();
        loop {
            while i < j && self.get(f, w[i]) != UNDEF {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Some(());
            }
            while j > i && self.get(b, w[j - 1] ^ 1) != UNDEF {
                b = self.get(b, w[j - 1] ^ 1);
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Some(());
            }
            if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Some(());
            }
            self.define(f, w[i])?;
        }
    }
}

/// Order of the group when enumeration closes within `max_cosets` cosets.
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Option<u64> {
    if p.gens == 0 {
        return Some(1);
    }
    let cols = 2 * p.gens;
    let rels: Vec<Vec<usize>> = p
        .relators
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| r.iter().map(|&x| Table::col(x)).collect())
        .collect();
    let mut t = Table {
        cols,
        rows: vec![UNDEF; cols],
        parent: vec![0],
        max: max_cosets.max(1),
        queue: Vec::new(),
    };
    let mut c = 0u32;
    while (c as usize) < t.parent.len() {
        for r in &rels {
            if !t.live(c) {
                break;
            }
            t.scan_and_fill(c, r)?;
        }
        for col in 0..cols {
            if !t.live(c) {
                break;
            }
            if t.get(c, col) == UNDEF {
                t.define(c, col)?;
            }
        }
        c += 1;
    }
    Some((0..t.parent.len() as u32).filter(|&c| t.live(c)).count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(gens: usize, rels: &[&[Letter]]) -> Presentation {
        Presentation::new(gens, rels.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn finite_orders() {
        assert_eq!(todd_coxeter(&p(1, &[&[1, 1, 1, 1]]), 100), Some(4));
        assert_eq!(todd_coxeter(&p(2, &[&[1, 1, 1], &[2, 2], &[1, 2, 1, 2]]), 1000), Some(6));
        assert_eq!(
            todd_coxeter(&p(2, &[&[1, 1, 1, 1], &[1, 1, -2, -2], &[2, 1, -2, 1]]), 1000),
            Some(8)
        );
        // A5 = <a,b | a², b³, (ab)⁵>
        let ab5: Vec<Letter> = [1, 2].repeat(5);
        assert_eq!(todd_coxeter(&p(2, &[&[1, 1], &[2, 2, 2], &ab5]), 10_000), Some(60));
        assert_eq!(todd_coxeter(&p(0, &[]), 10), Some(1));
        // trivial group with a non-obvious presentation
        assert_eq!(todd_coxeter(&p(2, &[&[1, 2, -1, -2, -2], &[2, 1, -2, -1, -1]]), 10_000), Some(1));
    }

    #[test]
    fn infinite_is_inconclusive() {
        assert_eq!(todd_coxeter(&p(2, &[&[1, 2, 1, -2, -1, -2]]), 10_000), None);
        assert_eq!(todd_coxeter(&p(1, &[]), 1000), None);
    }
}
