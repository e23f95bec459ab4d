//! Published values the reports are checked against.

use std::collections::BTreeMap;

use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct Reference {
    pub version: u32,
    pub distributions: BTreeMap<usize, ExpectedDistribution>,
    pub groups: BTreeMap<String, Vec<String>>,
    pub pure: BTreeMap<String, u64>,
}

#[derive(Debug, Deserialize)]
pub struct ExpectedDistribution {
    pub total: Option<u64>,
    pub cells: BTreeMap<String, u64>,
    /// What labels outside `cells` may occur: `none` or `free`.
    pub others: Others,
    pub nontrivial: Option<u64>,
    pub noncyclic: Option<u64>,
}

#[derive(Debug, Deserialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "lowercase")]
pub enum Others {
    None,
    Free,
}

pub fn reference() -> Reference {
    serde_json::from_str(include_str!("reference.json")).expect("embedded reference data parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_is_consistent() {
        let r = reference();
        let seven = &r.distributions[&7];
        assert_eq!(seven.cells.values().sum::<u64>(), seven.total.unwrap());
        assert_eq!(seven.total.unwrap() - seven.cells["Trivial"], seven.nontrivial.unwrap());
        assert_eq!(r.pure["7/noncyclic"], seven.noncyclic.unwrap());
    }
}
