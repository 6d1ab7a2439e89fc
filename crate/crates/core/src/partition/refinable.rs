use crate::model::StateId;

pub type BlockId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Range {
    start: usize,
    end: usize,
}

/// States kept in one array, grouped by block, with constant-time block
/// lookup and in-place splitting.
#[derive(Clone, Debug)]
pub struct RefinablePartition {
    elements: Vec<StateId>,
    location: Vec<usize>,
    block_of: Vec<BlockId>,
    blocks: Vec<Range>,
}

impl RefinablePartition {
    /// Builds a partition whose block i is `groups[i]`. Groups must be
    /// nonempty, disjoint and cover 0..n.
    pub fn new(n: usize, groups: &[Vec<StateId>]) -> Self {
        let mut elements = Vec::with_capacity(n);
        let mut location = vec![usize::MAX; n];
        let mut block_of = vec![usize::MAX; n];
        let mut blocks = Vec::with_capacity(groups.len());
        for (b, group) in groups.iter().enumerate() {
            assert!(!group.is_empty(), "empty block");
            let start = elements.len();
            for &x in group {
                assert_eq!(block_of[x], usize::MAX, "state {x} listed twice");
                location[x] = elements.len();
                block_of[x] = b;
                elements.push(x);
            }
            blocks.push(Range { start, end: elements.len() });
        }
        assert_eq!(elements.len(), n, "groups do not cover all states");
        RefinablePartition { elements, location, block_of, blocks }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, x: StateId) -> BlockId {
        self.block_of[x]
    }

    pub fn size(&self, b: BlockId) -> usize {
        let r = self.blocks[b];
        r.end - r.start
    }

    pub fn members(&self, b: BlockId) -> &[StateId] {
        let r = self.blocks[b];
        &self.elements[r.start..r.end]
    }

    /// Moves `states` (distinct members of `b`, not all of them) into a
    /// fresh block and returns its id.
    pub fn split_off(&mut self, b: BlockId, states: &[StateId]) -> BlockId {
        let Range { start, end } = self.blocks[b];
        assert!(states.len() < end - start, "split would empty block {b}");
        let mut cut = end;
        for &x in states {
            debug_assert_eq!(self.block_of[x], b);
            cut -= 1;
            let p = self.location[x];
            debug_assert!(p < cut + 1 && p >= start);
            let other = self.elements[cut];
            self.elements.swap(p, cut);
            self.location[other] = p;
            self.location[x] = cut;
        }
        let new = self.blocks.len();
        self.blocks[b].end = cut;
        self.blocks.push(Range { start: cut, end });
        for &x in &self.elements[cut..end] {
            self.block_of[x] = new;
        }
        new
    }

    /// Blocks as sorted state lists, ordered by smallest member.
    pub fn to_blocks(&self) -> Vec<Vec<StateId>> {
        let mut out: Vec<Vec<StateId>> = (0..self.blocks.len())
            .map(|b| {
                let mut v = self.members(b).to_vec();
                v.sort_unstable();
                v
            })
            .collect();
        out.sort_by_key(|v| v[0]);
        out
    }
}
