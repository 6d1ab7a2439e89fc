//! Domain-specific logics: rewriting generic certificates into the modal
//! operators customary for each system type.

mod eval;
mod syntax;

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

pub use eval::eval_domain;
pub use syntax::{domain_from_json, domain_to_json, parse_domain_formula, render_domain};

use crate::certlogic::{EdgeRef, FormulaDag, Node};
use crate::model::{FunctorKind, Key, Weight};

/// Default tree size above which callers should warn before printing.
pub const TREE_SIZE_WARNING: u64 = 1_000_000;

pub type Formula = Rc<DomainFormula>;

/// Formula tree; subtrees may be shared through `Rc`, which is invisible
/// to equality, rendering and evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainFormula {
    True,
    Not(Formula),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// Some successor satisfies the argument.
    Diamond(Formula),
    /// Total weight of the successors satisfying the argument is exactly m.
    Grade(Weight, Formula),
    /// The operation symbol is the given one.
    Sym(String),
    /// Argument i (1-based) satisfies the formula iff i is in the set.
    Pos(Vec<usize>, Formula),
    /// On the label, the argument holds with probability at least p.
    ProbAtLeast(String, BigRational, Formula),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("{modality} is not available for {kind} systems")]
    KindMismatch { modality: String, kind: &'static str },
    #[error("invalid formula JSON: {0}")]
    Json(String),
}

pub fn top() -> Formula {
    Rc::new(DomainFormula::True)
}

/// Negation; a double negation cancels.
pub fn not(f: Formula) -> Formula {
    match &*f {
        DomainFormula::Not(g) => g.clone(),
        _ => Rc::new(DomainFormula::Not(f)),
    }
}

/// Conjunction that flattens nested conjunctions and drops `T`; the empty
/// conjunction is `T` and a single conjunct stands alone.
pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
    let mut out = Vec::new();
    for p in parts {
        match &*p {
            DomainFormula::True => {}
            DomainFormula::And(inner) => out.extend(inner.iter().cloned()),
            _ => out.push(p),
        }
    }
    match out.len() {
        0 => top(),
        1 => out.pop().expect("one conjunct"),
        _ => Rc::new(DomainFormula::And(out)),
    }
}

pub fn diamond(f: Formula) -> Formula {
    Rc::new(DomainFormula::Diamond(f))
}

pub fn grade(m: Weight, f: Formula) -> Formula {
    Rc::new(DomainFormula::Grade(m, f))
}

pub fn prob(label: &str, p: BigRational, f: Formula) -> Formula {
    Rc::new(DomainFormula::ProbAtLeast(label.to_string(), p, f))
}

pub fn pos(positions: Vec<usize>, f: Formula) -> Formula {
    Rc::new(DomainFormula::Pos(positions, f))
}

impl DomainFormula {
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            DomainFormula::True | DomainFormula::Sym(_) => Vec::new(),
            DomainFormula::And(fs) | DomainFormula::Or(fs) => fs.iter().collect(),
            DomainFormula::Not(f)
            | DomainFormula::Diamond(f)
            | DomainFormula::Grade(_, f)
            | DomainFormula::Pos(_, f)
            | DomainFormula::ProbAtLeast(_, _, f) => vec![f],
        }
    }
}

/// Number of nodes of the fully expanded tree.
pub fn tree_size(f: &Formula) -> BigUint {
    fn go(f: &Formula, memo: &mut HashMap<*const DomainFormula, BigUint>) -> BigUint {
        let key = Rc::as_ptr(f);
        if let Some(s) = memo.get(&key) {
            return s.clone();
        }
        let mut s = BigUint::one();
        for ch in f.children() {
            s += go(ch, memo);
        }
        memo.insert(key, s.clone());
        s
    }
    go(f, &mut HashMap::new())
}

/// Number of distinct shared nodes.
pub fn shared_size(f: &Formula) -> usize {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if seen.insert(Rc::as_ptr(g)) {
            stack.extend(g.children());
        }
    }
    seen.len()
}

fn weights(key: &Key) -> &[Weight] {
    match key {
        Key::Weights(ws) => ws,
        _ => panic!("weighted key expected"),
    }
}

/// Formula for the states whose successor structure collapses to `o`.
pub fn tau(kind: &FunctorKind, o: &Key) -> Formula {
    match (kind, o) {
        (FunctorKind::Powerset, Key::Pow(bits)) => {
            if *bits == 0 {
                not(diamond(top()))
            } else {
                diamond(top())
            }
        }
        (FunctorKind::MonoidValued(_) | FunctorKind::Dist, _) => grade(weights(o)[0].clone(), top()),
        (FunctorKind::Lmc { alphabet }, Key::Lmc(rows)) => and(alphabet.iter().zip(rows).map(|(a, row)| {
            let live = prob(a, BigRational::one(), top());
            if row.is_some() {
                live
            } else {
                not(live)
            }
        })),
        (_, Key::Term { symbol, .. }) => Rc::new(DomainFormula::Sym(kind.term_symbols()[*symbol].0.clone())),
        _ => panic!("key {o:?} does not belong to {}", kind.tag()),
    }
}

fn positions(colors: &[u8], c: u8) -> Vec<usize> {
    colors.iter().enumerate().filter(|(_, &x)| x == c).map(|(i, _)| i + 1).collect()
}

/// Binary modality for an F3 key: δ describes the splitter S and ρ the
/// rest B∖S of the compound.
pub fn lambda(kind: &FunctorKind, t: &Key, delta: &Formula, rho: &Formula) -> Formula {
    match (kind, t) {
        (FunctorKind::Powerset, Key::Pow(bits)) => {
            let (one, two) = (bits & 0b010 != 0, bits & 0b100 != 0);
            match (two, one) {
                (true, false) => not(diamond(rho.clone())),
                (true, true) => and([diamond(delta.clone()), diamond(rho.clone())]),
                (false, true) => not(diamond(delta.clone())),
                (false, false) => top(),
            }
        }
        (FunctorKind::MonoidValued(m), _) if !m.is_cancellative() => {
            let ws = weights(t);
            and([grade(ws[2].clone(), delta.clone()), grade(ws[1].clone(), rho.clone())])
        }
        (FunctorKind::MonoidValued(_) | FunctorKind::Dist, _) => grade(weights(t)[2].clone(), delta.clone()),
        (FunctorKind::Lmc { alphabet }, Key::Lmc(rows)) => and(alphabet.iter().zip(rows).filter_map(|(a, row)| {
            row.as_ref().map(|ps| and([prob(a, ps[2].clone(), delta.clone()), prob(a, ps[1].clone(), rho.clone())]))
        })),
        (_, Key::Term { colors, .. }) => pos(positions(colors, 2), delta.clone()),
        _ => panic!("key {t:?} does not belong to {}", kind.tag()),
    }
}

/// Unary modality for an F2 key (cancellative kinds).
pub fn kappa(kind: &FunctorKind, s: &Key, delta: &Formula) -> Formula {
    match (kind, s) {
        (FunctorKind::MonoidValued(_) | FunctorKind::Dist, _) => grade(weights(s)[1].clone(), delta.clone()),
        (FunctorKind::Lmc { alphabet }, Key::Lmc(rows)) => and(alphabet.iter().zip(rows).filter_map(|(a, row)| {
            row.as_ref()
                .map(|ps| and([prob(a, ps[1].clone(), delta.clone()), prob(a, ps[0].clone(), not(delta.clone()))]))
        })),
        (_, Key::Term { colors, .. }) => pos(positions(colors, 1), delta.clone()),
        _ => panic!("no unary interpretation for key {s:?} of {}", kind.tag()),
    }
}

/// Rewrites the generic formula at `root` into the domain logic of `kind`.
/// Shared DAG nodes are translated once and shared in the result.
pub fn translate(dag: &FormulaDag, root: EdgeRef, kind: &FunctorKind) -> Formula {
    let mut memo: Vec<Option<Formula>> = vec![None; dag.len()];
    for i in dag.reachable(root) {
        let edge = |e: &EdgeRef, memo: &Vec<Option<Formula>>| -> Formula {
            let f = memo[e.node].clone().expect("children precede parents");
            if e.neg {
                not(f)
            } else {
                f
            }
        };
        let f = match dag.node(i) {
            Node::Top => top(),
            Node::Conj(l, r) => and([edge(l, &memo), edge(r, &memo)]),
            Node::Mod0(o) => tau(kind, o),
            Node::Mod2(s, d) => kappa(kind, s, &edge(d, &memo)),
            Node::Mod3(t, d, b) => {
                let d = edge(d, &memo);
                let rho = and([edge(b, &memo), not(d.clone())]);
                lambda(kind, t, &d, &rho)
            }
        };
        memo[i] = Some(f);
    }
    let f = memo[root.node].take().expect("root translated");
    if root.neg {
        not(f)
    } else {
        f
    }
}
