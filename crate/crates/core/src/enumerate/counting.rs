//! Closed-form counts used as oracles for the generator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("{kind} is tabulated for n in 0..={max}, got {n}")]
    OutOfRange { kind: CountKind, n: usize, max: usize },
    #[error("formula infeasible for n = {0}: the sum has 2^(2^n) terms (n <= 4 supported)")]
    FormulaInfeasible(usize),
    #[error("unknown count kind `{0}` (expected dedekind, reduced_dedekind or h3)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountKind {
    Dedekind,
    ReducedDedekind,
    H3,
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountKind::Dedekind => "dedekind",
            CountKind::ReducedDedekind => "reduced_dedekind",
            CountKind::H3 => "h3",
        })
    }
}

impl FromStr for CountKind {
    type Err = CountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dedekind" | "d" => Ok(CountKind::Dedekind),
            "reduced_dedekind" | "reduced-dedekind" | "r" => Ok(CountKind::ReducedDedekind),
            "h3" => Ok(CountKind::H3),
            other => Err(CountError::UnknownKind(other.to_string())),
        }
    }
}

const DEDEKIND: [&str; 10] = [
    "2",
    "3",
    "6",
    "20",
    "168",
    "7581",
    "7828354",
    "2414682040998",
    "56130437228687557907788",
    "286386577668298411128469151667598498812366",
];

const REDUCED_DEDEKIND: [&str; 10] = [
    "2",
    "3",
    "5",
    "10",
    "30",
    "210",
    "16353",
    "490013148",
    "1392195548889993358",
    "789204635842035040527740846300252680",
];

const H3: [&str; 10] = [
    "1",
    "1",
    "1",
    "2",
    "5",
    "34",
    "2136",
    "7013320",
    "1788782616656",
    "53304527811667897248",
];

/// Published value of a counting sequence; a test oracle, never a computation.
pub fn count_reference(kind: CountKind, n: usize) -> Result<BigUint, CountError> {
    let table = match kind {
        CountKind::Dedekind => &DEDEKIND,
        CountKind::ReducedDedekind => &REDUCED_DEDEKIND,
        CountKind::H3 => &H3,
    };
    table
        .get(n)
        .map(|s| s.parse().expect("table entries are decimal"))
        .ok_or(CountError::OutOfRange { kind, n, max: table.len() - 1 })
}

/// Integer partitions of `n` with parts in non-increasing order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            go(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

/// Number of orbits of a permutation of cycle type `parts` acting on 3-subsets.
fn tau3(parts: &[usize]) -> usize {
    let q = parts.len();
    let mut tau = 0;
    for &p in parts {
        tau += ((p - 1) * (p.saturating_sub(2))).div_ceil(6);
    }
    for i in 0..q {
        for j in i + 1..q {
            for h in j + 1..q {
                let (a, b, c) = (parts[i], parts[j], parts[h]);
                tau += a * b * c / lcm(lcm(a, b), c);
            }
        }
    }
    let mut twice = 0;
    for i in 0..q {
        for j in i + 1..q {
            let (a, b) = (parts[i], parts[j]);
            let l = lcm(a, b);
            // ½|(−1)^(l/a) − (−1)^(l/b)| is 1 exactly when the parities differ
            let parity = usize::from((l / a) % 2 != (l / b) % 2);
            twice += a.gcd(&b) * (a + b - 2 + parity);
        }
    }
    debug_assert!(twice % 2 == 0);
    tau + twice / 2
}

/// `n! / z_P` where `z_P = ∏ i^{α_i} α_i!` is the centralizer order of cycle type `P`.
fn class_size(n: usize, parts: &[usize]) -> BigUint {
    let mut z = BigUint::one();
    let mut i = 0;
    while i < parts.len() {
        let p = parts[i];
        let mult = parts[i..].iter().take_while(|&&x| x == p).count();
        for k in 1..=mult {
            z *= BigUint::from(p) * BigUint::from(k);
        }
        i += mult;
    }
    factorial(n) / z
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Number of isomorphism classes of 3-uniform hypergraphs on `n` vertices (Qian's formula).
pub fn qian_h3(n: usize) -> BigUint {
    let mut total = BigUint::zero();
    for parts in partitions(n) {
        total += class_size(n, &parts) << tau3(&parts);
    }
    let (q, r) = total.div_rem(&factorial(n));
    debug_assert!(r.is_zero());
    q
}

/// Dedekind number `d_n` by Kisielewicz's summation formula, `n ≤ 4`.
pub fn kisielewicz_d(n: usize) -> Result<BigUint, CountError> {
    if n > 4 {
        return Err(CountError::FormulaInfeasible(n));
    }
    let size = 1usize << n;
    let bit = |i: usize, k: u64| -> u64 { (k >> i) & 1 };
    let mut sum = 0u64;
    for k in 1..=(1u64 << size) {
        let mut term = 1u64;
        'outer: for j in 1..size {
            for i in 0..j {
                let mut inner = 1u64;
                if i > 0 {
                    let top = usize::BITS as usize - 1 - i.leading_zeros() as usize;
                    for m in 0..=top {
                        let (bi, bj) = (bit(m, i as u64), bit(m, j as u64));
                        inner *= 1 - bi + bi * bj;
                    }
                }
                term *= 1 - bit(i, k) * bit(j, k) * inner;
                if term == 0 {
                    break 'outer;
                }
            }
        }
        sum += term;
    }
    Ok(BigUint::from(sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h3_matches_reference() {
        for n in 0..10 {
            assert_eq!(qian_h3(n), count_reference(CountKind::H3, n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn kisielewicz_matches_reference() {
        for n in 0..=3 {
            assert_eq!(kisielewicz_d(n).unwrap(), count_reference(CountKind::Dedekind, n).unwrap());
        }
        assert_eq!(kisielewicz_d(5), Err(CountError::FormulaInfeasible(5)));
    }

    /// Antichains of the subset lattice of an `n`-set, counted directly.
    fn antichains_brute(n: usize) -> u64 {
        let size = 1usize << n;
        (0u64..1 << size)
            .filter(|&fam| {
                (0..size).all(|a| {
                    fam >> a & 1 == 0 || (0..size).all(|b| b == a || fam >> b & 1 == 0 || a & b != a)
                })
            })
            .count() as u64
    }

    #[test]
    fn kisielewicz_matches_antichain_count() {
        for n in 0..=3 {
            assert_eq!(kisielewicz_d(n).unwrap(), BigUint::from(antichains_brute(n)));
        }
    }

    #[test]
    fn partition_count() {
        let counts: Vec<usize> = (0..10).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30]);
        for n in 0..10 {
            for p in partitions(n) {
                assert_eq!(p.iter().sum::<usize>(), n);
                assert!(p.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn reference_range() {
        assert_eq!(
            count_reference(CountKind::ReducedDedekind, 7).unwrap(),
            BigUint::from(490013148u64)
        );
        assert_eq!(count_reference(CountKind::Dedekind, 7).unwrap(), BigUint::from(2414682040998u64));
        assert!(count_reference(CountKind::H3, 10).is_err());
        assert_eq!("h3".parse::<CountKind>().unwrap(), CountKind::H3);
    }
}
