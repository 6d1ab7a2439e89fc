use fixedbitset::FixedBitSet;

use crate::model::{Coalgebra, StateId};

/// Subset of the states 0..n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        StateSet(s)
    }

    pub fn from_states(n: usize, states: impl IntoIterator<Item = StateId>) -> Self {
        let mut s = Self::empty(n);
        for x in states {
            s.insert(x);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, x: StateId) {
        self.0.insert(x);
    }

    pub fn contains(&self, x: StateId) -> bool {
        self.0.contains(x)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn complement(&self) -> Self {
        let mut s = self.0.clone();
        s.toggle_range(..);
        StateSet(s)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = self.0.clone();
        s.intersect_with(&other.0);
        StateSet(s)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.0.clone();
        s.union_with(&other.0);
        StateSet(s)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<StateId> {
        self.iter().collect()
    }

    pub fn names(&self, c: &Coalgebra) -> Vec<String> {
        self.iter().map(|x| c.name(x).to_string()).collect()
    }
}
