use std::collections::VecDeque;

use indexmap::IndexMap;

use super::interface::Interface;
use super::refinable::{BlockId, RefinablePartition};
use super::trace::{
    Child, CompoundId, InitBlock, InitEvent, Refinement, RefinementTrace, SplitEvent, SplitMode,
};
use super::{Partition, PartitionError};
use crate::model::{Coalgebra, Key, StateId};

/// Requested splitting discipline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    General,
    Cancellative,
    /// Cancellative when the kind allows it.
    #[default]
    Auto,
}

impl Mode {
    pub fn resolve(self, c: &Coalgebra) -> Result<SplitMode, PartitionError> {
        match self {
            Mode::General => Ok(SplitMode::General),
            Mode::Cancellative if c.kind().cancellative() => Ok(SplitMode::Cancellative),
            Mode::Cancellative => Err(PartitionError::NotCancellative(c.kind().tag().to_string())),
            Mode::Auto if c.kind().cancellative() => Ok(SplitMode::Cancellative),
            Mode::Auto => Ok(SplitMode::General),
        }
    }

    pub fn from_name(s: &str) -> Option<Mode> {
        match s {
            "general" => Some(Mode::General),
            "cancellative" => Some(Mode::Cancellative),
            "auto" => Some(Mode::Auto),
            _ => None,
        }
    }
}

/// Work counters collected during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub iterations: usize,
    /// Splitter states plus predecessor states visited, summed over splits.
    pub touched: u64,
    /// How often each state was a member of the chosen splitter.
    pub splitter_hits: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub partition: Partition,
    pub trace: RefinementTrace,
    pub stats: RunStats,
}

#[derive(Clone, Debug)]
struct Compound {
    blocks: Vec<BlockId>,
    size: usize,
    queued: bool,
}

/// State of one refinement run: the partition P, the compounds making up
/// the coarser partition Q, and the FIFO queue of compounds with two or
/// more blocks.
pub struct Engine<'a> {
    c: &'a Coalgebra,
    mode: SplitMode,
    part: RefinablePartition,
    compounds: Vec<Compound>,
    compound_of: Vec<CompoundId>,
    pos_in_compound: Vec<usize>,
    queue: VecDeque<CompoundId>,
    iface: Interface<'a>,
    stats: RunStats,
}

impl<'a> Engine<'a> {
    /// Groups states by F1 key and puts all blocks into one compound.
    pub fn new(c: &'a Coalgebra, mode: SplitMode) -> Result<(Self, InitEvent), PartitionError> {
        if mode == SplitMode::Cancellative && !c.kind().cancellative() {
            return Err(PartitionError::NotCancellative(c.kind().tag().to_string()));
        }
        let n = c.len();
        let mut groups: IndexMap<Key, Vec<StateId>> = IndexMap::new();
        for x in 0..n {
            groups.entry(c.eval1(x)).or_default().push(x);
        }
        let (keys, members): (Vec<Key>, Vec<Vec<StateId>>) = groups.into_iter().unzip();
        let part = RefinablePartition::new(n, &members);
        let init = InitEvent {
            blocks: keys
                .into_iter()
                .zip(&members)
                .enumerate()
                .map(|(b, (key, states))| InitBlock { key, block: b, states: states.clone() })
                .collect(),
        };
        let nb = members.len();
        let mut engine = Engine {
            c,
            mode,
            part,
            compounds: Vec::new(),
            compound_of: vec![0; nb],
            pos_in_compound: (0..nb).collect(),
            queue: VecDeque::new(),
            iface: Interface::new(c),
            stats: RunStats { splitter_hits: vec![0; n], ..RunStats::default() },
        };
        if n > 0 {
            engine.compounds.push(Compound { blocks: (0..nb).collect(), size: n, queued: false });
            engine.enqueue_if_compound(0);
        }
        Ok((engine, init))
    }

    pub fn partition(&self) -> &RefinablePartition {
        &self.part
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    fn enqueue_if_compound(&mut self, q: CompoundId) {
        let comp = &mut self.compounds[q];
        if comp.blocks.len() >= 2 && !comp.queued {
            comp.queued = true;
            self.queue.push_back(q);
        }
    }

    /// Takes the front compound B and moves a block S with 2|S| <= |B| into
    /// a compound of its own. S is the smaller of the first two blocks
    /// listed in B, ties going to the lower id. Returns (S, B, {S}).
    pub fn select_splitter(&mut self) -> Result<(BlockId, CompoundId, CompoundId), PartitionError> {
        let b = self.queue.pop_front().ok_or(PartitionError::QueueEmpty)?;
        self.compounds[b].queued = false;
        let (first, second) = (self.compounds[b].blocks[0], self.compounds[b].blocks[1]);
        let (s1, s2) = (self.part.size(first), self.part.size(second));
        let s = if s1 < s2 || (s1 == s2 && first < second) { first } else { second };
        self.remove_from_compound(s);
        let size = self.part.size(s);
        self.compounds[b].size -= size;
        let new = self.compounds.len();
        self.compounds.push(Compound { blocks: vec![s], size, queued: false });
        self.compound_of[s] = new;
        self.pos_in_compound[s] = 0;
        self.enqueue_if_compound(b);
        Ok((s, b, new))
    }

    fn remove_from_compound(&mut self, block: BlockId) {
        let q = self.compound_of[block];
        let pos = self.pos_in_compound[block];
        let blocks = &mut self.compounds[q].blocks;
        blocks.swap_remove(pos);
        if let Some(&moved) = blocks.get(pos) {
            self.pos_in_compound[moved] = pos;
        }
    }

    fn add_block_to_compound(&mut self, block: BlockId, q: CompoundId) {
        if self.compound_of.len() <= block {
            self.compound_of.resize(block + 1, 0);
            self.pos_in_compound.resize(block + 1, 0);
        }
        self.compound_of[block] = q;
        self.pos_in_compound[block] = self.compounds[q].blocks.len();
        self.compounds[q].blocks.push(block);
    }

    /// Splits every block with an edge into S by its key with respect to
    /// (S, B). In cancellative mode the key only looks at S.
    pub fn refine(&mut self, s: BlockId, b: CompoundId, s_compound: CompoundId, iteration: usize) -> SplitEvent {
        let splitter: Vec<StateId> = self.part.members(s).to_vec();
        for &x in &splitter {
            self.stats.splitter_hits[x] += 1;
        }
        let touched = {
            let part = &self.part;
            let compound_of = &self.compound_of;
            match self.mode {
                SplitMode::General => self.iface.touch3(&splitter, |y| {
                    let by = part.block_of(y);
                    if by == s {
                        2
                    } else if compound_of[by] == b {
                        1
                    } else {
                        0
                    }
                }),
                SplitMode::Cancellative => self.iface.touch2(&splitter, |y| (part.block_of(y) == s) as u8),
            }
        };
        self.stats.touched += (splitter.len() + touched.len()) as u64;

        // group by parent block, then by key
        let mut touched: Vec<(BlockId, Key, StateId)> =
            touched.into_iter().map(|(x, key)| (self.part.block_of(x), key, x)).collect();
        touched.sort_unstable();
        let mut refinements = Vec::new();
        let mut rest = &touched[..];
        while let Some(&(parent, ..)) = rest.first() {
            let end = rest.iter().position(|t| t.0 != parent).unwrap_or(rest.len());
            let (run, tail) = rest.split_at(end);
            rest = tail;
            let residue = self.part.size(parent) - run.len();
            let mut groups: Vec<(Key, Vec<StateId>)> = Vec::new();
            for (_, key, x) in run {
                match groups.last_mut() {
                    Some((k, g)) if k == key => g.push(*x),
                    _ => groups.push((key.clone(), vec![*x])),
                }
            }
            if residue == 0 && groups.len() == 1 {
                continue;
            }
            groups.sort_by_key(|(_, g)| g[0]);
            let residue_key = (residue > 0).then(|| match self.mode {
                SplitMode::General => groups[0].0.fmap(&[0, 1, 1], 3),
                SplitMode::Cancellative => groups[0].0.fmap(&[0, 0], 2),
            });
            // Edges into S whose weights cancel out leave a state with the
            // residue's key; it stays with the residue.
            if let Some(rk) = &residue_key {
                groups.retain(|(k, _)| k != rk);
                if groups.is_empty() {
                    continue;
                }
            }
            let keeper = if residue > 0 {
                None
            } else {
                let mut best = 0;
                for (i, (_, g)) in groups.iter().enumerate() {
                    if g.len() > groups[best].1.len() {
                        best = i;
                    }
                }
                Some(best)
            };
            let q = self.compound_of[parent];
            let mut children = Vec::with_capacity(groups.len() + 1);
            if let Some(key) = residue_key {
                children.push(Child { key, block: parent, states: None });
            }
            for (i, (key, states)) in groups.into_iter().enumerate() {
                let block = if keeper == Some(i) {
                    parent
                } else {
                    let nb = self.part.split_off(parent, &states);
                    self.add_block_to_compound(nb, q);
                    nb
                };
                children.push(Child { key, block, states: Some(states) });
            }
            self.enqueue_if_compound(q);
            refinements.push(Refinement { parent, children });
        }
        SplitEvent { iteration, splitter: s, compound: b, splitter_compound: s_compound, refinements }
    }

    /// Runs the main loop to the end.
    pub fn run_to_end(mut self, init: InitEvent) -> Outcome {
        let mut splits = Vec::new();
        while !self.queue.is_empty() {
            let (s, b, sq) = self.select_splitter().expect("queue nonempty");
            let iteration = splits.len() + 1;
            splits.push(self.refine(s, b, sq, iteration));
        }
        self.stats.iterations = splits.len();
        let trace = RefinementTrace { mode: self.mode, states: self.c.len(), init, splits };
        Outcome { partition: Partition::from_blocks(self.part.to_blocks()), trace, stats: self.stats }
    }
}

/// Computes behavioural equivalence, recording every split.
pub fn run(c: &Coalgebra, mode: Mode) -> Result<Outcome, PartitionError> {
    let mode = mode.resolve(c)?;
    let (engine, init) = Engine::new(c, mode)?;
    Ok(engine.run_to_end(init))
}
