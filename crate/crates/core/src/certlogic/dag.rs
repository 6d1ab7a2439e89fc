use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::model::Key;

pub type NodeId = usize;

/// Reference to a node, possibly negated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub node: NodeId,
    pub neg: bool,
}

impl EdgeRef {
    pub fn pos(node: NodeId) -> Self {
        EdgeRef { node, neg: false }
    }

    pub fn negate(self) -> Self {
        EdgeRef { node: self.node, neg: !self.neg }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Top,
    Conj(EdgeRef, EdgeRef),
    /// Nullary modality: F!(c(x)) equals the key.
    Mod0(Key),
    /// Unary modality over F2: Fχ_δ(c(x)) equals the key.
    Mod2(Key, EdgeRef),
    /// Binary modality over F3 with arguments δ and β.
    Mod3(Key, EdgeRef, EdgeRef),
}

impl Node {
    pub fn children(&self) -> Vec<EdgeRef> {
        match self {
            Node::Top | Node::Mod0(_) => Vec::new(),
            Node::Conj(l, r) => vec![*l, *r],
            Node::Mod2(_, d) => vec![*d],
            Node::Mod3(_, d, b) => vec![*d, *b],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Node::Top => "top",
            Node::Conj(..) => "conj",
            Node::Mod0(_) => "mod0",
            Node::Mod2(..) => "mod2",
            Node::Mod3(..) => "mod3",
        }
    }

    pub fn is_modal(&self) -> bool {
        !matches!(self, Node::Conj(..))
    }
}

/// Node table where children always precede their parents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormulaDag {
    nodes: Vec<Node>,
    used_in_beta: Vec<bool>,
    top: Option<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DagStats {
    pub node_count: usize,
    /// Longest root-to-leaf path counting modal nodes and ⊤, with binary
    /// conjunctions flattened.
    pub height: usize,
    /// Longest root-to-leaf path counting every node.
    pub depth: usize,
}

impl FormulaDag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn contains(&self, e: EdgeRef) -> bool {
        e.node < self.nodes.len()
    }

    fn push(&mut self, node: Node) -> EdgeRef {
        for ch in node.children() {
            assert!(ch.node < self.nodes.len(), "child must exist before parent");
        }
        self.nodes.push(node);
        self.used_in_beta.push(false);
        EdgeRef::pos(self.nodes.len() - 1)
    }

    /// Appends a node as is. Children must already exist.
    pub fn add(&mut self, node: Node) -> EdgeRef {
        if matches!(node, Node::Top) {
            return self.top();
        }
        self.push(node)
    }

    /// The single ⊤ node, created on first use.
    pub fn top(&mut self) -> EdgeRef {
        match self.top {
            Some(t) => EdgeRef::pos(t),
            None => {
                let e = self.push(Node::Top);
                self.top = Some(e.node);
                e
            }
        }
    }

    pub fn conj(&mut self, l: EdgeRef, r: EdgeRef) -> EdgeRef {
        self.push(Node::Conj(l, r))
    }

    pub fn mod0(&mut self, key: Key) -> EdgeRef {
        self.push(Node::Mod0(key))
    }

    pub fn mod2(&mut self, key: Key, delta: EdgeRef) -> EdgeRef {
        self.push(Node::Mod2(key, delta))
    }

    pub fn mod3(&mut self, key: Key, delta: EdgeRef, beta: EdgeRef) -> EdgeRef {
        self.push(Node::Mod3(key, delta, beta))
    }

    pub fn used_in_beta(&self, id: NodeId) -> bool {
        self.used_in_beta[id]
    }

    pub fn set_used_in_beta(&mut self, id: NodeId) {
        self.used_in_beta[id] = true;
    }

    /// Replaces node `id` wholesale; children must precede `id`.
    /// Used for fault injection in tests.
    pub fn replace(&mut self, id: NodeId, node: Node) {
        for ch in node.children() {
            assert!(ch.node < id);
        }
        self.nodes[id] = node;
    }

    pub fn stats(&self) -> DagStats {
        let mut height = vec![0usize; self.nodes.len()];
        let mut depth = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            let ch = node.children();
            let h = ch.iter().map(|c| height[c.node]).max().unwrap_or(0);
            let d = ch.iter().map(|c| depth[c.node]).max().unwrap_or(0);
            height[i] = h + usize::from(node.is_modal());
            depth[i] = d + 1;
        }
        DagStats {
            node_count: self.nodes.len(),
            height: height.into_iter().max().unwrap_or(0),
            depth: depth.into_iter().max().unwrap_or(0),
        }
    }

    /// Size of the formula tree below `root`: one per node occurrence and
    /// one per negation.
    pub fn tree_size(&self, root: EdgeRef) -> BigUint {
        let mut size: Vec<Option<BigUint>> = vec![None; root.node + 1];
        let edge = |size: &Vec<Option<BigUint>>, e: &EdgeRef| -> BigUint {
            let s = size[e.node].clone().expect("children precede parents");
            if e.neg {
                s + 1u32
            } else {
                s
            }
        };
        for i in self.reachable(root) {
            let mut s = BigUint::one();
            for ch in self.nodes[i].children() {
                s += edge(&size, &ch);
            }
            size[i] = Some(s);
        }
        if size[root.node].is_none() {
            return BigUint::zero();
        }
        edge(&size, &root)
    }

    /// Ids of nodes reachable from `root`, ascending (children first).
    pub fn reachable(&self, root: EdgeRef) -> Vec<NodeId> {
        self.reachable_from(&[root])
    }

    pub fn reachable_from(&self, roots: &[EdgeRef]) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.iter().map(|r| r.node).collect();
        while let Some(i) = stack.pop() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            for ch in self.nodes[i].children() {
                stack.push(ch.node);
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).collect()
    }

    pub fn has_negation(&self) -> bool {
        self.nodes.iter().any(|n| n.children().iter().any(|c| c.neg))
    }

    pub fn count(&self, kind: &str) -> usize {
        self.nodes.iter().filter(|n| n.kind_name() == kind).count()
    }
}

/// 2m(log2 n + 1) + 2n, the node budget for certificates of a system with
/// n states and m edges.
pub fn node_bound(n: usize, m: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    2.0 * m as f64 * ((n as f64).log2() + 1.0) + 2.0 * n as f64
}
