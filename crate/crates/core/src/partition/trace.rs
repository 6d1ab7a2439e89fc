use serde_json::{json, Value};

use super::refinable::BlockId;
use crate::model::{Coalgebra, Key, StateId};

pub type CompoundId = usize;

/// Which key family a run splits by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitMode {
    /// Keys in F3, relative to the splitter and its enclosing compound.
    General,
    /// Keys in F2, relative to the splitter alone.
    Cancellative,
}

impl SplitMode {
    pub fn name(self) -> &'static str {
        match self {
            SplitMode::General => "general",
            SplitMode::Cancellative => "cancellative",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitBlock {
    pub key: Key,
    pub block: BlockId,
    pub states: Vec<StateId>,
}

/// Creation of the initial partition by F1 keys.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InitEvent {
    pub blocks: Vec<InitBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Child {
    pub key: Key,
    pub block: BlockId,
    /// Members that moved. `None` marks the residue: the states with the
    /// key of a state without edges into the splitter, which stay under
    /// the parent's id.
    pub states: Option<Vec<StateId>>,
}

impl Child {
    pub fn is_residue(&self) -> bool {
        self.states.is_none()
    }
}

/// One parent block that fell apart into at least two children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub parent: BlockId,
    pub children: Vec<Child>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitEvent {
    pub iteration: usize,
    pub splitter: BlockId,
    /// Compound B; after the event its id denotes B minus S.
    pub compound: CompoundId,
    /// Fresh compound holding only S.
    pub splitter_compound: CompoundId,
    pub refinements: Vec<Refinement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementTrace {
    pub mode: SplitMode,
    pub states: usize,
    pub init: InitEvent,
    pub splits: Vec<SplitEvent>,
}

impl RefinementTrace {
    /// Final blocks obtained by replaying every event from scratch.
    pub fn replay(&self) -> Vec<Vec<StateId>> {
        let mut block_of = vec![usize::MAX; self.states];
        for b in &self.init.blocks {
            for &x in &b.states {
                block_of[x] = b.block;
            }
        }
        for ev in &self.splits {
            for r in &ev.refinements {
                for ch in &r.children {
                    if let Some(states) = &ch.states {
                        for &x in states {
                            debug_assert_eq!(block_of[x], r.parent);
                            block_of[x] = ch.block;
                        }
                    }
                }
            }
        }
        group_by_block(&block_of)
    }

    pub fn to_json(&self, c: &Coalgebra) -> Value {
        let names = |v: &[StateId]| -> Value { v.iter().map(|&x| c.name(x).to_string()).collect() };
        let kind = c.kind();
        let mut events = Vec::with_capacity(self.splits.len() + 1);
        events.push(json!({
            "type": "init",
            "blocks": self.init.blocks.iter().map(|b| json!({
                "key": b.key.to_json(kind),
                "block": b.block,
                "states": names(&b.states),
            })).collect::<Vec<_>>(),
        }));
        for ev in &self.splits {
            events.push(json!({
                "type": "split",
                "iteration": ev.iteration,
                "splitter": ev.splitter,
                "compound": ev.compound,
                "splitterCompound": ev.splitter_compound,
                "refinements": ev.refinements.iter().map(|r| json!({
                    "parent": r.parent,
                    "children": r.children.iter().map(|ch| json!({
                        "key": ch.key.to_json(kind),
                        "block": ch.block,
                        "residue": ch.is_residue(),
                        "states": ch.states.as_deref().map(names),
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            }));
        }
        json!({"mode": self.mode.name(), "events": events})
    }
}

/// Groups states by block id, blocks ordered by smallest member.
pub fn group_by_block(block_of: &[usize]) -> Vec<Vec<StateId>> {
    let mut slot = std::collections::HashMap::new();
    let mut out: Vec<Vec<StateId>> = Vec::new();
    for (x, &b) in block_of.iter().enumerate() {
        let i = *slot.entry(b).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[i].push(x);
    }
    out
}
