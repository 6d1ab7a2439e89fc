use std::collections::HashMap;

use super::dag::{EdgeRef, FormulaDag, NodeId};
use super::CertError;
use crate::model::{Coalgebra, Key, StateId};
use crate::partition::{BlockId, CompoundId, InitEvent, RefinementTrace, SplitEvent, SplitMode};

/// Where a conjunct of a block certificate came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ancestry {
    /// Certificate of the parent block before the split.
    pub parent: EdgeRef,
    pub parent_block: BlockId,
    pub block: BlockId,
    pub iteration: usize,
    pub key: Key,
    /// The modal conjunct added at this split.
    pub conjunct: NodeId,
}

/// Certificates per block and per compound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertMap {
    pub mode: SplitMode,
    /// Certificate of each block, indexed by block id.
    pub delta: Vec<EdgeRef>,
    /// Certificate of each compound (general mode only).
    pub beta: Vec<Option<EdgeRef>>,
    /// Keyed by the conjunction node that extended a block certificate.
    pub ancestry: HashMap<NodeId, Ancestry>,
    block_of: Vec<BlockId>,
}

impl CertMap {
    pub fn block_of(&self, x: StateId) -> BlockId {
        self.block_of[x]
    }

    /// Certificate of the block containing x.
    pub fn certificate(&self, x: StateId) -> EdgeRef {
        self.delta[self.block_of[x]]
    }

    /// Conjuncts of a block certificate, oldest first; entry 0 is the F1
    /// leaf. Each entry is (chain node, conjunct).
    pub fn conjuncts(&self, root: EdgeRef) -> Vec<(NodeId, NodeId)> {
        chain(&self.ancestry, root)
    }

    pub fn state_count(&self) -> usize {
        self.block_of.len()
    }
}

fn chain(ancestry: &HashMap<NodeId, Ancestry>, root: EdgeRef) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::new();
    let mut cur = root;
    while let Some(a) = ancestry.get(&cur.node) {
        out.push((cur.node, a.conjunct));
        cur = a.parent;
    }
    out.push((cur.node, cur.node));
    out.reverse();
    out
}

/// Replays a trace, maintaining block and compound certificates.
pub struct CertBuilder {
    mode: SplitMode,
    simplify: bool,
    dag: FormulaDag,
    delta: Vec<EdgeRef>,
    beta: Vec<Option<EdgeRef>>,
    ancestry: HashMap<NodeId, Ancestry>,
    block_of: Vec<BlockId>,
    compound_of: Vec<CompoundId>,
    /// Block certificate a compound was created from; its conjuncts are
    /// the positive conjuncts of the compound certificate.
    origin: Vec<Option<NodeId>>,
}

impl CertBuilder {
    pub fn new(states: usize, mode: SplitMode, simplify: bool) -> Self {
        CertBuilder {
            mode,
            simplify,
            dag: FormulaDag::new(),
            delta: Vec::new(),
            beta: Vec::new(),
            ancestry: HashMap::new(),
            block_of: vec![usize::MAX; states],
            compound_of: Vec::new(),
            origin: Vec::new(),
        }
    }

    pub fn dag(&self) -> &FormulaDag {
        &self.dag
    }

    pub fn delta(&self, b: BlockId) -> EdgeRef {
        self.delta[b]
    }

    pub fn beta(&self, q: CompoundId) -> Option<EdgeRef> {
        self.beta.get(q).copied().flatten()
    }

    /// Current blocks as (id, members).
    pub fn blocks(&self) -> Vec<(BlockId, Vec<StateId>)> {
        let mut out: Vec<Vec<StateId>> = vec![Vec::new(); self.delta.len()];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out.into_iter().enumerate().filter(|(_, v)| !v.is_empty()).collect()
    }

    /// Current compounds as (id, members).
    pub fn compounds(&self) -> Vec<(CompoundId, Vec<StateId>)> {
        let mut out: Vec<Vec<StateId>> = vec![Vec::new(); self.beta.len()];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[self.compound_of[b]].push(x);
        }
        out.into_iter().enumerate().filter(|(_, v)| !v.is_empty()).collect()
    }

    pub fn apply_init(&mut self, init: &InitEvent) {
        for ib in &init.blocks {
            let leaf = self.dag.mod0(ib.key.clone());
            set(&mut self.delta, ib.block, leaf);
            set(&mut self.compound_of, ib.block, 0);
            for &x in &ib.states {
                self.block_of[x] = ib.block;
            }
        }
        if self.mode == SplitMode::General && !init.blocks.is_empty() {
            let top = self.dag.top();
            set(&mut self.beta, 0, Some(top));
        } else if !init.blocks.is_empty() {
            set(&mut self.beta, 0, None);
        }
    }

    pub fn apply_split(&mut self, ev: &SplitEvent) {
        let d_s = self.delta[ev.splitter];
        let b_b = self.beta(ev.compound);
        set(&mut self.compound_of, ev.splitter, ev.splitter_compound);
        if self.mode == SplitMode::General {
            let b_b = b_b.expect("compound certificate");
            set(&mut self.beta, ev.splitter_compound, Some(d_s));
            let excluded = if self.simplify { self.new_conjuncts(d_s, ev.compound) } else { d_s };
            set(&mut self.origin, ev.splitter_compound, Some(d_s.node));
            let rest = self.dag.conj(b_b, excluded.negate());
            self.beta[ev.compound] = Some(rest);
        } else {
            set(&mut self.beta, ev.splitter_compound, None);
        }

        let mut mods: HashMap<&Key, EdgeRef> = HashMap::new();
        for r in &ev.refinements {
            let d_t = self.delta[r.parent];
            let parent_compound = self.compound_of[r.parent];
            for ch in &r.children {
                let m = *mods.entry(&ch.key).or_insert_with(|| match self.mode {
                    SplitMode::General => self.dag.mod3(ch.key.clone(), d_s, b_b.expect("compound certificate")),
                    SplitMode::Cancellative => self.dag.mod2(ch.key.clone(), d_s),
                });
                let link = self.dag.conj(d_t, m);
                set(&mut self.delta, ch.block, link);
                set(&mut self.compound_of, ch.block, parent_compound);
                if let Some(states) = &ch.states {
                    for &x in states {
                        self.block_of[x] = ch.block;
                    }
                }
                self.ancestry.insert(
                    link.node,
                    Ancestry {
                        parent: d_t,
                        parent_block: r.parent,
                        block: ch.block,
                        iteration: ev.iteration,
                        key: ch.key.clone(),
                        conjunct: m.node,
                    },
                );
            }
        }
    }

    /// Conjunction of the conjuncts of `d_s` added after the origin of
    /// compound `b`; the older ones are already conjuncts of β(b).
    fn new_conjuncts(&mut self, d_s: EdgeRef, b: CompoundId) -> EdgeRef {
        let links = chain(&self.ancestry, d_s);
        let start = match self.origin.get(b).copied().flatten() {
            Some(o) => 1 + links.iter().position(|(link, _)| *link == o).expect("splitter descends from its compound"),
            None => 0,
        };
        for (link, _) in &links[start..] {
            self.dag.set_used_in_beta(*link);
        }
        if start == 0 {
            return d_s;
        }
        let fresh = &links[start..];
        let mut acc = EdgeRef::pos(fresh[0].1);
        for (_, m) in &fresh[1..] {
            acc = self.dag.conj(acc, EdgeRef::pos(*m));
        }
        acc
    }

    pub fn finish(self) -> (FormulaDag, CertMap) {
        let map = CertMap {
            mode: self.mode,
            delta: self.delta,
            beta: self.beta,
            ancestry: self.ancestry,
            block_of: self.block_of,
        };
        (self.dag, map)
    }
}

fn set<T: Clone + Default>(v: &mut Vec<T>, i: usize, value: T) {
    if v.len() <= i {
        v.resize(i + 1, T::default());
    }
    v[i] = value;
}

/// Builds certificates for every block of a finished run.
pub fn attach_certificates(
    c: &Coalgebra,
    trace: &RefinementTrace,
    mode: SplitMode,
    simplify: bool,
) -> Result<(FormulaDag, CertMap), CertError> {
    if trace.mode != mode {
        return Err(CertError::ModeMismatch { trace: trace.mode.name(), requested: mode.name() });
    }
    if trace.states != c.len() {
        return Err(CertError::SizeMismatch { trace: trace.states, system: c.len() });
    }
    let mut b = CertBuilder::new(c.len(), mode, simplify);
    b.apply_init(&trace.init);
    for ev in &trace.splits {
        b.apply_split(ev);
    }
    Ok(b.finish())
}
