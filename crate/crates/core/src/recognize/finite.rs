//! Small finite groups given by multiplication tables.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("{name}: multiplication is not associative at ({a}, {b}, {c})")]
    NotAssociative { name: String, a: usize, b: usize, c: usize },
    #[error("{name}: element 0 is not an identity")]
    NoIdentity { name: String },
    #[error("{name}: element {0} has no inverse", .element)]
    NoInverse { name: String, element: usize },
    #[error("{name}: order {order} exceeds 255")]
    TooLarge { name: String, order: usize },
}

/// A finite group on elements `0..order`, with 0 the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    name: String,
    order: usize,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

impl FiniteGroupTable {
    /// Validates associativity, identity and inverses.
    pub fn from_table(name: &str, order: usize, mul: Vec<u8>) -> Result<Self, TableError> {
        let name = name.to_string();
        if order > 255 {
            return Err(TableError::TooLarge { name, order });
        }
        assert_eq!(mul.len(), order * order);
        let m = |a: usize, b: usize| mul[a * order + b] as usize;
        if (0..order).any(|a| m(0, a) != a || m(a, 0) != a) {
            return Err(TableError::NoIdentity { name });
        }
        let mut inv = vec![0u8; order];
        for a in 0..order {
            match (0..order).find(|&b| m(a, b) == 0 && m(b, a) == 0) {
                Some(b) => inv[a] = b as u8,
                None => return Err(TableError::NoInverse { name, element: a }),
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(TableError::NotAssociative { name, a, b, c });
                    }
                }
            }
        }
        Ok(Self { name, order, mul, inv })
    }

    /// Closure of the given permutations of `0..degree`.
    pub fn from_permutations(name: &str, degree: usize, gens: &[Vec<usize>]) -> Result<Self, TableError> {
        let id: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { (0..degree).map(|i| q[p[i]]).collect() };
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let h = compose(&elems[i], g);
                if !index.contains_key(&h) {
                    index.insert(h.clone(), elems.len());
                    elems.push(h);
                }
            }
            i += 1;
        }
        let order = elems.len();
        let mut mul = Vec::with_capacity(order * order);
        for a in &elems {
            for b in &elems {
                mul.push(index[&compose(a, b)] as u8);
            }
        }
        Self::from_table(name, order, mul)
    }

    pub fn cyclic(m: usize) -> Self {
        let mul = (0..m * m).map(|k| ((k / m + k % m) % m) as u8).collect();
        Self::from_table(&format!("Z{m}"), m, mul).expect("cyclic group table")
    }

    /// Quaternion group: elements `±1, ±i, ±j, ±k` encoded as `sign * 4 + unit`.
    pub fn quaternion() -> Self {
        // unit products: (unit_a, unit_b) -> (sign, unit), units 1, i, j, k
        const PROD: [[(u8, u8); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let mut mul = Vec::with_capacity(64);
        for a in 0..8u8 {
            for b in 0..8u8 {
                let (s, u) = PROD[(a % 4) as usize][(b % 4) as usize];
                let sign = (a / 4 + b / 4 + s) % 2;
                mul.push(sign * 4 + u);
            }
        }
        Self::from_table("Q8", 8, mul).expect("quaternion table")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    /// Number of elements whose order divides `m`.
    pub fn count_roots(&self, m: usize) -> usize {
        (0..self.order as u8)
            .filter(|&a| {
                let mut x = 0u8;
                for _ in 0..m {
                    x = self.mul(x, a);
                }
                x == 0
            })
            .count()
    }
}

/// The fixed battery: S3, D4, Q8, A4, S4, A5, Z5, Z7, Z8, Z9.
pub fn battery() -> Vec<FiniteGroupTable> {
    let perm = |name: &str, degree: usize, gens: &[&[usize]]| {
        let gens: Vec<Vec<usize>> = gens.iter().map(|g| g.to_vec()).collect();
        FiniteGroupTable::from_permutations(name, degree, &gens).expect("battery group")
    };
    vec![
        perm("S3", 3, &[&[1, 2, 0], &[1, 0, 2]]),
        perm("D4", 4, &[&[1, 2, 3, 0], &[0, 3, 2, 1]]),
        FiniteGroupTable::quaternion(),
        perm("A4", 4, &[&[1, 2, 0, 3], &[1, 0, 3, 2]]),
        perm("S4", 4, &[&[1, 2, 3, 0], &[1, 0, 2, 3]]),
        perm("A5", 5, &[&[1, 2, 3, 4, 0], &[1, 2, 0, 3, 4]]),
        FiniteGroupTable::cyclic(5),
        FiniteGroupTable::cyclic(7),
        FiniteGroupTable::cyclic(8),
        FiniteGroupTable::cyclic(9),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_orders() {
        let orders: Vec<usize> = battery().iter().map(|g| g.order()).collect();
        assert_eq!(orders, vec![6, 8, 8, 12, 24, 60, 5, 7, 8, 9]);
    }

    #[test]
    fn element_orders_identify_groups() {
        let b = battery();
        // elements of order dividing 2
        let involutions: Vec<usize> = b.iter().map(|g| g.count_roots(2)).collect();
        assert_eq!(involutions, vec![4, 6, 2, 4, 10, 16, 1, 1, 2, 1]);
    }

    #[test]
    fn rejects_bad_tables() {
        // 0 is not an identity
        assert!(FiniteGroupTable::from_table("bad", 2, vec![1, 0, 0, 1]).is_err());
        // identity present but not associative: a loop of order 5
        let m = [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ];
        let table = m.iter().flatten().map(|&x| x as u8).collect();
        assert!(matches!(
            FiniteGroupTable::from_table("loop", 5, table),
            Err(TableError::NotAssociative { .. })
        ));
    }
}
