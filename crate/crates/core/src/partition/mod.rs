//! Partition refinement: the refinable partition, splitter queue and main loop.

mod engine;
mod interface;
mod refinable;
mod trace;

pub use engine::{run, Engine, Mode, Outcome, RunStats};
pub use refinable::{BlockId, RefinablePartition};
pub use trace::{
    group_by_block, Child, CompoundId, InitBlock, InitEvent, Refinement, RefinementTrace, SplitEvent, SplitMode,
};

use crate::model::{Coalgebra, StateId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("functor kind {0} is not cancellative")]
    NotCancellative(String),
    #[error("splitter queue is empty")]
    QueueEmpty,
}

/// A partition in canonical form: blocks sorted internally and ordered by
/// their smallest state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
    index: Vec<usize>,
}

impl Partition {
    pub fn from_blocks(mut blocks: Vec<Vec<StateId>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let n = blocks.iter().map(Vec::len).sum();
        let mut index = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                index[x] = i;
            }
        }
        Partition { blocks, index }
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Position of x's block in [`Partition::blocks`].
    pub fn block_index(&self, x: StateId) -> usize {
        self.index[x]
    }

    pub fn equivalent(&self, x: StateId, y: StateId) -> bool {
        self.index[x] == self.index[y]
    }

    pub fn to_json(&self, c: &Coalgebra) -> serde_json::Value {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&x| c.name(x).to_string()).collect::<Vec<_>>())
            .collect()
    }
}
