#![allow(dead_code)]

use coalcert::certlogic::{EdgeRef, FormulaDag};
use coalcert::fixtures::{random, random_lifted, RandomKind};
use coalcert::model::Coalgebra;
use coalcert::partition::{Mode, SplitMode};
use proptest::prelude::*;

pub fn modes(c: &Coalgebra) -> Vec<SplitMode> {
    if c.kind().cancellative() {
        vec![SplitMode::General, SplitMode::Cancellative]
    } else {
        vec![SplitMode::General]
    }
}

pub fn run_mode(m: SplitMode) -> Mode {
    match m {
        SplitMode::General => Mode::General,
        SplitMode::Cancellative => Mode::Cancellative,
    }
}

pub fn kind_strategy() -> impl Strategy<Value = RandomKind> {
    prop::sample::select(RandomKind::ALL.to_vec())
}

/// Small random system of any kind; half of them are blown up copies of
/// a smaller system, so that equivalence classes are nontrivial.
pub fn system(max_n: usize) -> impl Strategy<Value = Coalgebra> {
    (kind_strategy(), 1..=max_n, 0.05f64..0.5, any::<u64>(), any::<bool>()).prop_map(move |(k, n, d, seed, lifted)| {
        if lifted {
            random_lifted(k, (n / 3).max(1), 3, seed)
        } else {
            random(k, n, d, seed)
        }
    })
}

pub fn cancellative_system(max_n: usize) -> impl Strategy<Value = Coalgebra> {
    system(max_n).prop_filter("cancellative kind", |c| c.kind().cancellative())
}

/// Disjunction of `parts` as a negated conjunction of negations.
pub fn disjunction(dag: &mut FormulaDag, parts: &[EdgeRef]) -> EdgeRef {
    let top = dag.top();
    let mut acc = top;
    for &p in parts {
        acc = dag.conj(acc, p.negate());
    }
    acc.negate()
}

/// Three-coloring of a pair δ ⊆ β given as membership vectors.
pub fn coloring(delta: &[bool], beta: &[bool]) -> Vec<u8> {
    delta
        .iter()
        .zip(beta)
        .map(|(&d, &b)| match (d, b) {
            (true, _) => 2,
            (false, true) => 1,
            _ => 0,
        })
        .collect()
}
