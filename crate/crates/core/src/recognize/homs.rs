//! Counting homomorphisms from a finitely presented group into a finite group.

use num_bigint::BigUint;
use thiserror::Error;

use super::finite::FiniteGroupTable;
use crate::presentation::{Letter, Presentation};

pub const DEFAULT_HOM_WORK_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("homomorphism count into {group} exceeds the work cap of {cap} relator checks")]
pub struct WorkCapExceeded {
    pub group: String,
    pub cap: u64,
}

/// How the image of one generator is obtained during the search.
enum Step {
    /// Try every element.
    Branch,
    /// Solve `relator = 1` for this generator: `image = (v · u)⁻¹` when the relator,
    /// rotated to start with `g^sign`, reads `g^sign · v`.
    Forced { rest: Vec<Letter>, sign: i32 },
}

struct Plan {
    order: Vec<usize>,
    steps: Vec<Step>,
    /// Relators fully determined once the generator at this depth is assigned.
    checks: Vec<Vec<Vec<Letter>>>,
}

fn plan(p: &Presentation) -> Plan {
    let gens = p.gens;
    let mut assigned = vec![false; gens + 1];
    let mut order = Vec::with_capacity(gens);
    let mut steps = Vec::with_capacity(gens);
    let mut checks = Vec::with_capacity(gens);
    let mut done = vec![false; p.relators.len()];
    let letters = |r: &Vec<Letter>| -> Vec<usize> {
        let mut v: Vec<usize> = r.iter().map(|x| x.unsigned_abs() as usize).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let rel_gens: Vec<Vec<usize>> = p.relators.iter().map(letters).collect();
    while order.len() < gens {
        // prefer a generator that some relator then determines
        let mut choice: Option<(usize, Step, usize)> = None;
        for (ri, r) in p.relators.iter().enumerate() {
            if done[ri] {
                continue;
            }
            let missing: Vec<usize> = rel_gens[ri].iter().copied().filter(|&g| !assigned[g]).collect();
            if missing.len() == 1 {
                let g = missing[0];
                if r.iter().filter(|x| x.unsigned_abs() as usize == g).count() == 1 {
                    let pos = r.iter().position(|x| x.unsigned_abs() as usize == g).unwrap();
                    let rest: Vec<Letter> = r[pos + 1..].iter().chain(&r[..pos]).copied().collect();
                    choice = Some((g, Step::Forced { rest, sign: r[pos].signum() }, ri));
                    break;
                }
            }
        }
        let (g, step) = match choice {
            Some((g, step, ri)) => {
                done[ri] = true;
                (g, step)
            }
            None => {
                // the generator completing the most relators, then the most frequent
                let score = |g: usize| {
                    let completes = (0..p.relators.len())
                        .filter(|&ri| !done[ri] && rel_gens[ri].iter().all(|&h| h == g || assigned[h]))
                        .count();
                    let freq = rel_gens.iter().filter(|rg| rg.contains(&g)).count();
                    (completes, freq)
                };
                let g = (1..=gens).filter(|&g| !assigned[g]).max_by_key(|&g| (score(g), std::cmp::Reverse(g))).unwrap();
                (g, Step::Branch)
            }
        };
        assigned[g] = true;
        order.push(g);
        steps.push(step);
        let mut now = Vec::new();
        for (ri, r) in p.relators.iter().enumerate() {
            if !done[ri] && rel_gens[ri].iter().all(|&h| assigned[h]) {
                done[ri] = true;
                now.push(r.clone());
            }
        }
        checks.push(now);
    }
    Plan { order, steps, checks }
}

struct Counter<'a> {
    t: &'a FiniteGroupTable,
    plan: Plan,
    image: Vec<u8>,
    work: u64,
    cap: u64,
}

impl Counter<'_> {
    #[inline]
    fn eval(&self, w: &[Letter]) -> u8 {
        let mut x = 0u8;
        for &l in w {
            let y = self.image[l.unsigned_abs() as usize];
            x = self.t.mul(x, if l > 0 { y } else { self.t.inv(y) });
        }
        x
    }

    fn count(&mut self, depth: usize) -> Result<u64, ()> {
        if depth == self.plan.order.len() {
            return Ok(1);
        }
        let g = self.plan.order[depth];
        let candidates: Vec<u8> = match &self.plan.steps[depth] {
            Step::Branch => (0..self.t.order() as u8).collect(),
            Step::Forced { rest, sign } => {
                let v = self.eval(rest);
                // g^sign · v = 1
                let x = self.t.inv(v);
                vec![if *sign > 0 { x } else { self.t.inv(x) }]
            }
        };
        let mut total = 0u64;
        for x in candidates {
            self.image[g] = x;
            self.work += 1 + self.plan.checks[depth].len() as u64;
            if self.work > self.cap {
                return Err(());
            }
            if self.plan.checks[depth].iter().all(|r| self.eval(r) == 0) {
                total += self.count(depth + 1)?;
            }
        }
        Ok(total)
    }
}

/// Exact number of homomorphisms `P → T`.
pub fn count_homs(p: &Presentation, t: &FiniteGroupTable, cap: u64) -> Result<BigUint, WorkCapExceeded> {
    // generators missing from every relator contribute a factor |T| each
    let mut used = vec![false; p.gens + 1];
    for r in &p.relators {
        for &x in r {
            used[x.unsigned_abs() as usize] = true;
        }
    }
    let free = (1..=p.gens).filter(|&g| !used[g]).count();
    let core = compress(p, &used);
    let exceeded = || WorkCapExceeded { group: t.name().to_string(), cap };
    let mut work = 0u64;
    let mut total = BigUint::from(1u32);
    for part in split_components(&core) {
        let c = count_component(&part, t, cap, &mut work).map_err(|_| exceeded())?;
        total *= BigUint::from(c);
    }
    for _ in 0..free {
        total *= BigUint::from(t.order());
    }
    Ok(total)
}

fn count_component(p: &Presentation, t: &FiniteGroupTable, cap: u64, work: &mut u64) -> Result<u128, ()> {
    if p.relators.len() == 1 {
        if let Some(blocks) = best_blocks(&p.relators[0]) {
            return convolve_blocks(&blocks, t, cap, work);
        }
    }
    backtrack(p, t, cap, work)
}

fn backtrack(p: &Presentation, t: &FiniteGroupTable, cap: u64, work: &mut u64) -> Result<u128, ()> {
    let mut counter = Counter { t, plan: plan(p), image: vec![0; p.gens + 1], work: *work, cap };
    let c = counter.count(0);
    *work = counter.work;
    c.map(u128::from)
}

/// Splits into presentations on disjoint generator sets.
fn split_components(p: &Presentation) -> Vec<Presentation> {
    let mut parent: Vec<usize> = (0..=p.gens).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for r in p.relators.iter().filter(|r| !r.is_empty()) {
        let a = r[0].unsigned_abs() as usize;
        for &x in &r[1..] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, x.unsigned_abs() as usize));
            parent[ra] = rb;
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    for g in 1..=p.gens {
        let r = find(&mut parent, g);
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    roots
        .iter()
        .map(|&root| {
            let gens: Vec<usize> = (1..=p.gens).filter(|&g| find(&mut parent, g) == root).collect();
            let mut map = vec![0 as Letter; p.gens + 1];
            for (i, &g) in gens.iter().enumerate() {
                map[g] = i as Letter + 1;
            }
            let relators = p
                .relators
                .iter()
                .filter(|r| !r.is_empty() && map[r[0].unsigned_abs() as usize] != 0)
                .map(|r| r.iter().map(|&x| x.signum() * map[x.unsigned_abs() as usize]).collect())
                .collect();
            Presentation { gens: gens.len(), relators }
        })
        .collect()
}

/// Splits a cyclic word into the most consecutive blocks on pairwise disjoint generator
/// sets, over all rotations. `None` when no rotation gives two or more blocks.
fn best_blocks(r: &[Letter]) -> Option<Vec<Vec<Letter>>> {
    let n = r.len();
    let mut best: Option<Vec<Vec<Letter>>> = None;
    for s in 0..n {
        let w: Vec<Letter> = r[s..].iter().chain(&r[..s]).copied().collect();
        let mut last = std::collections::HashMap::new();
        for (i, &x) in w.iter().enumerate() {
            last.insert(x.unsigned_abs(), i);
        }
        let mut blocks = Vec::new();
        let mut start = 0;
        let mut end = 0;
        for (i, &x) in w.iter().enumerate() {
            end = end.max(last[&x.unsigned_abs()]);
            if i == end {
                blocks.push(w[start..=i].to_vec());
                start = i + 1;
            }
        }
        if blocks.len() >= 2 && best.as_ref().is_none_or(|b| blocks.len() > b.len()) {
            best = Some(blocks);
        }
    }
    best
}

/// Counts solutions of `B1 · B2 ⋯ Bk = 1` from the value distribution of each block.
fn convolve_blocks(blocks: &[Vec<Letter>], t: &FiniteGroupTable, cap: u64, work: &mut u64) -> Result<u128, ()> {
    let order = t.order();
    let mut acc: Vec<u128> = vec![0; order];
    acc[0] = 1;
    for block in blocks {
        let mut gens: Vec<u32> = block.iter().map(|x| x.unsigned_abs()).collect();
        gens.sort_unstable();
        gens.dedup();
        let local: Vec<Letter> = block
            .iter()
            .map(|&x| x.signum() * (gens.iter().position(|&g| g == x.unsigned_abs()).unwrap() as Letter + 1))
            .collect();
        let mut dist = vec![0u128; order];
        let mut image = vec![0u8; gens.len() + 1];
        let combos = (order as u64).checked_pow(gens.len() as u32).ok_or(())?;
        *work = work.saturating_add(combos);
        if *work > cap {
            return Err(());
        }
        for code in 0..combos {
            let mut c = code;
            for slot in image.iter_mut().skip(1) {
                *slot = (c % order as u64) as u8;
                c /= order as u64;
            }
            let v = local.iter().fold(0u8, |x, &l| {
                let y = image[l.unsigned_abs() as usize];
                t.mul(x, if l > 0 { y } else { t.inv(y) })
            });
            dist[v as usize] += 1;
        }
        let mut next = vec![0u128; order];
        *work = work.saturating_add((order * order) as u64);
        for a in 0..order {
            if acc[a] == 0 {
                continue;
            }
            for b in 0..order {
                if dist[b] != 0 {
                    next[t.mul(a as u8, b as u8) as usize] += acc[a] * dist[b];
                }
            }
        }
        acc = next;
    }
    Ok(acc[0])
}

/// Drops unused generators and renumbers the rest.
fn compress(p: &Presentation, used: &[bool]) -> Presentation {
    let mut map = vec![0 as Letter; p.gens + 1];
    let mut next = 0;
    for g in 1..=p.gens {
        if used[g] {
            next += 1;
            map[g] = next;
        }
    }
    let relators = p
        .relators
        .iter()
        .map(|r| r.iter().map(|&x| x.signum() * map[x.unsigned_abs() as usize]).collect())
        .collect();
    Presentation { gens: next as usize, relators }
}
