//! Component test for a stratified cone over a base.
//!
//! Each stratum carries the jump of the fibre rank over the generic rank and
//! its codimension in the base. A stratum indexes an irreducible component
//! iff its `d = rank_offset - codim` is at least that of every stratum whose
//! closure contains it.

use std::collections::{BTreeMap, BTreeSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum<Id> {
    pub id: Id,
    pub rank_offset: i64,
    pub codim: i64,
}

impl<Id> Stratum<Id> {
    pub fn new(id: Id, rank_offset: i64, codim: i64) -> Self {
        Stratum { id, rank_offset, codim }
    }
}

pub fn d_value<Id>(s: &Stratum<Id>) -> i64 {
    s.rank_offset - s.codim
}

/// Pairs `(a, b)` meaning stratum `a` lies in the closure of stratum `b`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureOrder<Id: Ord> {
    pub relation: BTreeSet<(Id, Id)>,
}

impl<Id: Ord + Clone> ClosureOrder<Id> {
    pub fn new(pairs: impl IntoIterator<Item = (Id, Id)>) -> Self {
        ClosureOrder { relation: pairs.into_iter().collect() }
    }

    pub fn insert(&mut self, a: Id, b: Id) {
        self.relation.insert((a, b));
    }

    pub fn contains(&self, a: &Id, b: &Id) -> bool {
        a == b || self.relation.contains(&(a.clone(), b.clone()))
    }

    /// Adds reflexive pairs for `ids` and closes the relation transitively.
    pub fn closure(&self, ids: &[Id]) -> Self {
        let mut above: BTreeMap<Id, BTreeSet<Id>> =
            ids.iter().map(|i| (i.clone(), BTreeSet::from([i.clone()]))).collect();
        for (a, b) in &self.relation {
            above.entry(a.clone()).or_default().insert(b.clone());
            above.entry(b.clone()).or_default().insert(b.clone());
        }
        loop {
            let mut changed = false;
            let keys: Vec<Id> = above.keys().cloned().collect();
            for a in &keys {
                let ups: Vec<Id> = above[a].iter().cloned().collect();
                let mut add = BTreeSet::new();
                for b in &ups {
                    if let Some(s) = above.get(b) {
                        add.extend(s.iter().cloned());
                    }
                }
                let entry = above.get_mut(a).expect("key present");
                let before = entry.len();
                entry.extend(add);
                changed |= entry.len() != before;
            }
            if !changed {
                break;
            }
        }
        ClosureOrder {
            relation: above.into_iter().flat_map(|(a, s)| s.into_iter().map(move |b| (a.clone(), b))).collect(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StratError {
    #[error("no generic stratum (rank offset 0, codimension 0)")]
    MissingGeneric,
    #[error("more than one stratum has codimension 0")]
    AmbiguousGeneric,
    #[error("closure relation references unknown stratum {0}")]
    UnknownId(String),
}

/// The unique codimension-0 stratum, which must have rank offset 0.
pub fn generic_stratum<Id: Clone + Ord + std::fmt::Debug>(strata: &[Stratum<Id>]) -> Result<&Stratum<Id>, StratError> {
    let mut it = strata.iter().filter(|s| s.codim == 0);
    let g = it.next().ok_or(StratError::MissingGeneric)?;
    if it.next().is_some() {
        return Err(StratError::AmbiguousGeneric);
    }
    if g.rank_offset != 0 {
        return Err(StratError::MissingGeneric);
    }
    Ok(g)
}

/// Ids `s` with `d(s) >= d(s')` for every `s'` such that `(s, s')` is in the order.
pub fn component_strata<Id>(strata: &[Stratum<Id>], order: &ClosureOrder<Id>) -> Result<BTreeSet<Id>, StratError>
where
    Id: Clone + Ord + Hash + std::fmt::Debug,
{
    generic_stratum(strata)?;
    let d: BTreeMap<&Id, i64> = strata.iter().map(|s| (&s.id, d_value(s))).collect();
    for (a, b) in &order.relation {
        for x in [a, b] {
            if !d.contains_key(x) {
                return Err(StratError::UnknownId(format!("{x:?}")));
            }
        }
    }
    let mut worst_above: BTreeMap<&Id, i64> = d.clone();
    for (a, b) in &order.relation {
        let e = worst_above.get_mut(a).expect("checked above");
        *e = (*e).max(d[b]);
    }
    Ok(strata.iter().filter(|s| d[&s.id] >= worst_above[&s.id]).map(|s| s.id.clone()).collect())
}

/// Elements not strictly below another element. `below(a, b)` means `a <= b`.
pub fn maximal_cover<Id: Clone + Ord>(elements: &[Id], below: impl Fn(&Id, &Id) -> bool) -> BTreeSet<Id> {
    elements.iter().filter(|a| !elements.iter().any(|b| b != *a && below(a, b) && !below(b, a))).cloned().collect()
}

/// Absolute dimension `b + f + d` of the preimage of a stratum.
pub fn stratum_dimension(base_dim: i64, generic_rank: i64, d: i64) -> i64 {
    base_dim + generic_rank + d
}
