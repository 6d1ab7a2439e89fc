//! Model checking of DAG formulae and the reference partition.

mod oracle;
mod stateset;

use std::collections::HashMap;

use serde_json::{json, Value};

pub use oracle::{image, naive_partition, naive_partition_rounds, Image};
pub use stateset::StateSet;

use crate::certlogic::{CertMap, EdgeRef, FormulaDag, Node, NodeId};
use crate::model::{Coalgebra, Key, StateId};
use crate::partition::Partition;

/// Memoized evaluation of DAG nodes over one coalgebra.
pub struct Evaluator<'a> {
    c: &'a Coalgebra,
    dag: &'a FormulaDag,
    sets: Vec<Option<StateSet>>,
    /// Per (δ, β): the F3 key of every state, and whether δ ⊆ β.
    keys3: HashMap<(EdgeRef, EdgeRef), (Vec<Key>, bool)>,
    keys2: HashMap<EdgeRef, Vec<Key>>,
    violations: Vec<NodeId>,
}

impl<'a> Evaluator<'a> {
    pub fn new(c: &'a Coalgebra, dag: &'a FormulaDag) -> Self {
        Evaluator {
            c,
            dag,
            sets: vec![None; dag.len()],
            keys3: HashMap::new(),
            keys2: HashMap::new(),
            violations: Vec::new(),
        }
    }

    /// Mod3 nodes met so far whose δ argument is not contained in β.
    pub fn contract_violations(&self) -> &[NodeId] {
        &self.violations
    }

    pub fn eval(&mut self, e: EdgeRef) -> StateSet {
        if self.sets[e.node].is_none() {
            for i in self.dag.reachable(e) {
                if self.sets[i].is_none() {
                    let s = self.eval_node(i);
                    self.sets[i] = Some(s);
                }
            }
        }
        let s = self.sets[e.node].as_ref().expect("evaluated");
        if e.neg {
            s.complement()
        } else {
            s.clone()
        }
    }

    fn edge(&self, e: EdgeRef) -> StateSet {
        let s = self.sets[e.node].as_ref().expect("children precede parents");
        if e.neg {
            s.complement()
        } else {
            s.clone()
        }
    }

    fn eval_node(&mut self, i: NodeId) -> StateSet {
        let n = self.c.len();
        let c = self.c;
        match self.dag.node(i) {
            Node::Top => StateSet::full(n),
            Node::Conj(l, r) => self.edge(*l).intersection(&self.edge(*r)),
            Node::Mod0(o) => StateSet::from_states(n, (0..n).filter(|&x| &c.eval1(x) == o)),
            Node::Mod2(s, d) => {
                let d = *d;
                if !self.keys2.contains_key(&d) {
                    let set = self.edge(d);
                    let color: Vec<u8> = (0..n).map(|x| u8::from(set.contains(x))).collect();
                    let keys = (0..n).map(|x| c.eval_key(x, &color, 2)).collect();
                    self.keys2.insert(d, keys);
                }
                let keys = &self.keys2[&d];
                StateSet::from_states(n, (0..n).filter(|&x| &keys[x] == s))
            }
            Node::Mod3(t, d, b) => {
                let (d, b) = (*d, *b);
                if !self.keys3.contains_key(&(d, b)) {
                    let sd = self.edge(d);
                    let sb = self.edge(b);
                    let color: Vec<u8> = (0..n)
                        .map(|x| match (sd.contains(x), sb.contains(x)) {
                            (true, true) => 2,
                            (_, true) => 1,
                            _ => 0,
                        })
                        .collect();
                    let keys = (0..n).map(|x| c.eval3(x, &color)).collect();
                    self.keys3.insert((d, b), (keys, sd.is_subset(&sb)));
                }
                let (keys, contained) = &self.keys3[&(d, b)];
                if !contained {
                    self.violations.push(i);
                }
                StateSet::from_states(n, (0..n).filter(|&x| &keys[x] == t))
            }
        }
    }
}

/// Extension of the formula at `root`.
pub fn eval_formula(c: &Coalgebra, dag: &FormulaDag, root: EdgeRef) -> StateSet {
    Evaluator::new(c, dag).eval(root)
}

/// Unmemoized recursive evaluation, for cross-checking small formulae.
pub fn eval_formula_naive(c: &Coalgebra, dag: &FormulaDag, root: EdgeRef) -> StateSet {
    let n = c.len();
    let s = match dag.node(root.node) {
        Node::Top => StateSet::full(n),
        Node::Conj(l, r) => eval_formula_naive(c, dag, *l).intersection(&eval_formula_naive(c, dag, *r)),
        Node::Mod0(o) => StateSet::from_states(n, (0..n).filter(|&x| &c.eval1(x) == o)),
        Node::Mod2(s, d) => {
            let sd = eval_formula_naive(c, dag, *d);
            let color: Vec<u8> = (0..n).map(|x| u8::from(sd.contains(x))).collect();
            StateSet::from_states(n, (0..n).filter(|&x| &c.eval_key(x, &color, 2) == s))
        }
        Node::Mod3(t, d, b) => {
            let sd = eval_formula_naive(c, dag, *d);
            let sb = eval_formula_naive(c, dag, *b);
            let color: Vec<u8> = (0..n)
                .map(|x| if sb.contains(x) { 1 + u8::from(sd.contains(x)) } else { 0 })
                .collect();
            StateSet::from_states(n, (0..n).filter(|&x| &c.eval3(x, &color) == t))
        }
    };
    if root.neg {
        s.complement()
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub block: Vec<StateId>,
    pub root: EdgeRef,
    pub extension: Vec<StateId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
    /// Mod3 nodes evaluated with δ not inside β.
    pub contract_violations: Vec<NodeId>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self, c: &Coalgebra) -> Value {
        let names = |xs: &[StateId]| -> Vec<&str> { xs.iter().map(|&x| c.name(x)).collect() };
        let v: Vec<Value> = self
            .violations
            .iter()
            .map(|v| {
                json!({
                    "block": names(&v.block),
                    "formulaRoot": {"node": v.root.node, "neg": v.root.neg},
                    "extension": names(&v.extension),
                })
            })
            .collect();
        json!({"violations": v})
    }
}

/// Checks that the certificate of every block holds exactly on the block.
pub fn check_certificates(c: &Coalgebra, partition: &Partition, dag: &FormulaDag, map: &CertMap) -> Report {
    let mut ev = Evaluator::new(c, dag);
    let mut report = Report::default();
    for block in partition.blocks() {
        let root = map.certificate(block[0]);
        let ext = ev.eval(root).to_vec();
        if &ext != block {
            report.violations.push(Violation { block: block.clone(), root, extension: ext });
        }
    }
    report.contract_violations = ev.contract_violations().to_vec();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certlogic::attach_certificates;
    use crate::fixtures;
    use crate::partition::{run, Mode, SplitMode};

    #[test]
    fn top_is_everything() {
        let c = fixtures::fig1();
        let mut d = FormulaDag::new();
        let t = d.top();
        assert_eq!(eval_formula(&c, &d, t).len(), 4);
        assert!(eval_formula(&c, &d, t.negate()).is_empty());
    }

    #[test]
    fn fig1_live_states() {
        let c = fixtures::fig1();
        let mut d = FormulaDag::new();
        let live = d.mod0(Key::Pow(1));
        assert_eq!(eval_formula(&c, &d, live).names(&c), vec!["x", "x1", "y"]);
    }

    #[test]
    fn fig_runs_pass() {
        for c in [fixtures::fig1(), fixtures::fig2()] {
            for simplify in [false, true] {
                let out = run(&c, Mode::General).unwrap();
                let (dag, map) = attach_certificates(&c, &out.trace, SplitMode::General, simplify).unwrap();
                let r = check_certificates(&c, &out.partition, &dag, &map);
                assert!(r.passed(), "{:?}", r);
                assert!(r.contract_violations.is_empty());
                assert_eq!(r.to_json(&c), json!({"violations": []}));
            }
        }
    }

    #[test]
    fn redirected_root_yields_one_violation() {
        // two blocks: a deadlock and a looping state
        let c = Coalgebra::new(
            crate::model::FunctorKind::Powerset,
            vec!["a".into(), "b".into()],
            vec![crate::model::Row::Set(vec![]), crate::model::Row::Set(vec![1])],
        )
        .unwrap();
        let out = run(&c, Mode::General).unwrap();
        let (mut dag, map) = attach_certificates(&c, &out.trace, SplitMode::General, false).unwrap();
        let root = map.certificate(0);
        dag.replace(root.node, Node::Top);
        let r = check_certificates(&c, &out.partition, &dag, &map);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].extension, vec![0, 1]);
        assert_eq!(
            r.to_json(&c)["violations"][0]["block"],
            json!(["a"])
        );
    }

    #[test]
    fn memoized_matches_naive_on_fig2() {
        let c = fixtures::fig2();
        let out = run(&c, Mode::General).unwrap();
        let (dag, _) = attach_certificates(&c, &out.trace, SplitMode::General, false).unwrap();
        let mut ev = Evaluator::new(&c, &dag);
        for i in 0..dag.len() {
            assert_eq!(ev.eval(EdgeRef::pos(i)), eval_formula_naive(&c, &dag, EdgeRef::pos(i)));
        }
    }
}
