//! Finitely generated abelian groups and the integer Smith normal form behind them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// `Z^rank ⊕ Z/d1 ⊕ ... ⊕ Z/dk` with `d1 | d2 | ... | dk` and every `di ≥ 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub rank: u32,
    pub torsion: Vec<u64>,
}

impl AbelianInvariants {
    pub fn new(rank: u32, mut torsion: Vec<u64>) -> Self {
        torsion.retain(|&d| d > 1);
        torsion.sort_unstable();
        Self { rank, torsion }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: u32) -> Self {
        Self { rank, torsion: Vec::new() }
    }

    /// Cokernel of the integer relation matrix `rows × gens` (one row per relation).
    pub fn from_relations(gens: usize, rows: &[Vec<i64>]) -> Self {
        let factors = invariant_factors(gens, rows);
        let rank = gens - factors.len();
        Self::new(rank as u32, factors)
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Minimal number of generators of the group.
    pub fn generator_count(&self) -> usize {
        self.rank as usize + self.torsion.len()
    }

    pub fn is_cyclic(&self) -> bool {
        self.generator_count() <= 1
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<u128> {
        if self.rank > 0 {
            return None;
        }
        self.torsion
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
    }

    /// Invariants of `self ⊕ Z^extra`.
    pub fn with_extra_rank(&self, extra: u32) -> Self {
        Self { rank: self.rank + extra, torsion: self.torsion.clone() }
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Nonzero invariant factors (absolute values, as a divisibility chain) of an integer matrix
/// given as rows of length `cols`.
pub fn invariant_factors(cols: usize, rows: &[Vec<i64>]) -> Vec<u64> {
    if let Some(diag) = smith_diagonal::<i64>(cols, rows.to_vec()) {
        return diag.into_iter().map(|d| d.unsigned_abs()).collect();
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    smith_diagonal::<BigInt>(cols, big)
        .expect("big-integer elimination cannot overflow")
        .into_iter()
        .map(|d| d.abs().to_u64().expect("invariant factor exceeds 64 bits"))
        .collect()
}

trait Ring:
    Clone + Zero + One + Signed + Integer + CheckedAdd + CheckedSub + CheckedMul
{
}

impl<T> Ring for T where
    T: Clone + Zero + One + Signed + Integer + CheckedAdd + CheckedSub + CheckedMul
{
}

fn axpy<T: Ring>(target: &mut [T], source: &[T], q: &T) -> Option<()> {
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t = t.checked_sub(&q.checked_mul(s)?)?;
        }
    }
    Some(())
}

fn col_axpy<T: Ring>(m: &mut [Vec<T>], target: usize, source: usize, q: &T) -> Option<()> {
    for row in m.iter_mut() {
        if !row[source].is_zero() {
            let v = row[target].checked_sub(&q.checked_mul(&row[source])?)?;
            row[target] = v;
        }
    }
    Some(())
}

/// Diagonal of the Smith normal form, `None` on overflow of `T`.
fn smith_diagonal<T: Ring>(cols: usize, mut m: Vec<Vec<T>>) -> Option<Vec<T>> {
    let rows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !m[i][t].is_zero() {
                    let q = m[i][t].div_floor(&m[t][t]);
                    let (head, tail) = m.split_at_mut(i);
                    axpy(&mut tail[0], &head[t], &q)?;
                    if !m[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !m[t][j].is_zero() {
                    let q = m[t][j].div_floor(&m[t][t]);
                    col_axpy(&mut m, j, t, &q)?;
                    if !m[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // bring the smallest remainder of row/column t onto the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !m[i][t].is_zero() && m[i][t].abs() < m[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !m[t][j].is_zero() && m[t][j].abs() < m[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    m.swap(t, best.0);
                }
                if best.1 != t {
                    for row in m.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
                continue;
            }
            // pivot must divide the whole trailing block
            let pivot = m[t][t].clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let (head, tail) = m.split_at_mut(i);
                    axpy(&mut head[t], &tail[0], &(-T::one()))?;
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    Some(diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_sorted_into_chain() {
        // diag(4, 6) ~ diag(2, 12)
        let f = invariant_factors(2, &[vec![4, 0], vec![0, 6]]);
        assert_eq!(f, vec![2, 12]);
    }

    #[test]
    fn relation_matrix_examples() {
        // <a,b | a b a^-1 b^-1> : zero row
        assert_eq!(AbelianInvariants::from_relations(2, &[vec![0, 0]]), AbelianInvariants::free(2));
        // <a,b | aba = bab> : exponent row (1,-1)
        assert_eq!(AbelianInvariants::from_relations(2, &[vec![1, -1]]), AbelianInvariants::free(1));
        assert_eq!(
            AbelianInvariants::from_relations(1, &[vec![4]]),
            AbelianInvariants::new(0, vec![4])
        );
        // D6 = <a,b | a^3, b^2, (ab)^2>
        assert_eq!(
            AbelianInvariants::from_relations(2, &[vec![3, 0], vec![0, 2], vec![2, 2]]),
            AbelianInvariants::new(0, vec![2])
        );
    }

    #[test]
    fn large_entries_fall_back_to_big_integers() {
        let big = i64::MAX / 3;
        let f = invariant_factors(2, &[vec![big, big - 1], vec![big - 1, big - 2]]);
        assert_eq!(f, vec![1, 1]);
    }

    #[test]
    fn display() {
        assert_eq!(AbelianInvariants::new(2, vec![2]).to_string(), "Z^2 + Z2");
        assert_eq!(AbelianInvariants::trivial().to_string(), "0");
    }
}
