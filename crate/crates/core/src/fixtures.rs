//! Example systems: the fig1 and fig2 systems, the three-tower and
//! weighted-layer families, and seeded random generators.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{rat, Coalgebra, FunctorKind, Monoid, Row, StateId, Weight};

fn owned(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Transition system where x satisfies "always possibly" and y does not.
pub fn fig1() -> Coalgebra {
    Coalgebra::new(
        FunctorKind::Powerset,
        owned(&["x", "x1", "z", "y"]),
        vec![Row::Set(vec![0, 1]), Row::Set(vec![1, 2]), Row::Set(vec![]), Row::Set(vec![3, 2])],
    )
    .expect("fig1 is well formed")
}

/// Markov chain with one label; x reaches a state that moves surely with
/// probability 1/2, y does not.
pub fn fig2() -> Coalgebra {
    let half = || rat(1, 2);
    Coalgebra::new(
        FunctorKind::Lmc { alphabet: owned(&["tau"]) },
        owned(&["x", "y", "z1", "z2"]),
        vec![
            Row::Labelled(vec![Some(vec![(3, half()), (2, half())])]),
            Row::Labelled(vec![Some(vec![(2, rat(1, 1))])]),
            Row::Labelled(vec![None]),
            Row::Labelled(vec![Some(vec![(2, rat(1, 1))])]),
        ],
    )
    .expect("fig2 is well formed")
}

/// Layers 0..=k of states x_i, y_i, z_i, stored in that order per layer.
pub fn three_tower(k: usize) -> Coalgebra {
    let id = |layer: usize, j: usize| 3 * layer + j;
    let (x, y, z) = (0, 1, 2);
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for i in 0..=k {
        for s in ["x", "y", "z"] {
            names.push(format!("{s}{i}"));
        }
        if i == 0 {
            rows.push(Row::Set(vec![id(0, y)]));
            rows.push(Row::Set(vec![]));
            rows.push(Row::Set(vec![id(0, x)]));
        } else {
            let l = i - 1;
            rows.push(Row::Set(vec![id(l, x), id(l, y), id(l, z)]));
            rows.push(Row::Set(vec![id(l, y), id(l, z)]));
            rows.push(Row::Set(vec![id(l, x), id(l, z)]));
        }
    }
    Coalgebra::new(FunctorKind::Powerset, names, rows).expect("three-tower is well formed")
}

/// Layers 0..=k of states w_i, x_i, y_i, z_i with rational weights; layer
/// 0 has self-loops of weight 1..4, higher layers a weighted complete
/// bipartite link to the layer below.
pub fn layers(k: usize) -> Coalgebra {
    const UP: [[i64; 4]; 4] = [[1, 2, 1, 2], [1, 2, 2, 1], [2, 1, 1, 2], [2, 1, 2, 1]];
    let w = |v: i64| Weight::Rat(rat(v, 1));
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for i in 0..=k {
        for (j, s) in ["w", "x", "y", "z"].iter().enumerate() {
            names.push(format!("{s}{i}"));
            if i == 0 {
                rows.push(Row::Weighted(vec![(j, w(j as i64 + 1))]));
            } else {
                let base = 4 * (i - 1);
                rows.push(Row::Weighted((0..4).map(|t| (base + t, w(UP[j][t]))).collect()));
            }
        }
    }
    Coalgebra::new(FunctorKind::MonoidValued(Monoid::RationalAdd), names, rows).expect("layers is well formed")
}

/// Kinds available to the random generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RandomKind {
    Powerset,
    Int,
    Rational,
    Bool,
    Dist,
    Lmc,
    Dfa,
    Signature,
}

impl RandomKind {
    pub const ALL: [RandomKind; 8] = [
        RandomKind::Powerset,
        RandomKind::Int,
        RandomKind::Rational,
        RandomKind::Bool,
        RandomKind::Dist,
        RandomKind::Lmc,
        RandomKind::Dfa,
        RandomKind::Signature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RandomKind::Powerset => "powerset",
            RandomKind::Int => "int",
            RandomKind::Rational => "rational",
            RandomKind::Bool => "bool",
            RandomKind::Dist => "dist",
            RandomKind::Lmc => "lmc",
            RandomKind::Dfa => "dfa",
            RandomKind::Signature => "signature",
        }
    }

    pub fn from_name(s: &str) -> Option<RandomKind> {
        RandomKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn functor(self) -> FunctorKind {
        match self {
            RandomKind::Powerset => FunctorKind::Powerset,
            RandomKind::Int => FunctorKind::MonoidValued(Monoid::IntAdd),
            RandomKind::Rational => FunctorKind::MonoidValued(Monoid::RationalAdd),
            RandomKind::Bool => FunctorKind::MonoidValued(Monoid::BoolOr),
            RandomKind::Dist => FunctorKind::Dist,
            RandomKind::Lmc => FunctorKind::Lmc { alphabet: owned(&["a", "b"]) },
            RandomKind::Dfa => FunctorKind::Dfa { alphabet: owned(&["a", "b"]) },
            RandomKind::Signature => FunctorKind::signature([("c", 0), ("d", 0), ("f", 1), ("g", 2), ("h", 3)]),
        }
    }
}

fn small_int(rng: &mut ChaCha8Rng) -> i64 {
    *[-2i64, -1, 1, 1, 2, 3].choose(rng).unwrap()
}

fn small_rat(rng: &mut ChaCha8Rng) -> BigRational {
    let p = *[-1i64, 1, 1, 2, 3].choose(rng).unwrap();
    let q = *[1i64, 2, 3, 4].choose(rng).unwrap();
    rat(p, q)
}

/// A distribution over `support` with small positive integer weights.
fn distribution(rng: &mut ChaCha8Rng, support: &[StateId]) -> Vec<(StateId, BigRational)> {
    let ws: Vec<i64> = support.iter().map(|_| rng.gen_range(1..=3)).collect();
    let total: i64 = ws.iter().sum();
    support.iter().zip(ws).map(|(&y, w)| (y, rat(w, total))).collect()
}

/// Random row for state x; `targets` draws successor candidates.
fn random_row(kind: RandomKind, rng: &mut ChaCha8Rng, n: usize, degree: usize) -> Row {
    let pick = |rng: &mut ChaCha8Rng, d: usize| -> Vec<StateId> {
        let mut all: Vec<StateId> = (0..n).collect();
        all.shuffle(rng);
        all.truncate(d.min(n));
        all
    };
    match kind {
        RandomKind::Powerset => Row::Set(pick(rng, degree)),
        RandomKind::Int => Row::Weighted(pick(rng, degree).into_iter().map(|y| (y, Weight::Int(small_int(rng) as i128))).collect()),
        RandomKind::Rational => Row::Weighted(pick(rng, degree).into_iter().map(|y| (y, Weight::Rat(small_rat(rng)))).collect()),
        RandomKind::Bool => Row::Weighted(pick(rng, degree).into_iter().map(|y| (y, Weight::Bool(true))).collect()),
        RandomKind::Dist => {
            let support = pick(rng, degree.max(1));
            Row::Weighted(distribution(rng, &support).into_iter().map(|(y, p)| (y, Weight::Rat(p))).collect())
        }
        RandomKind::Lmc => Row::Labelled(
            (0..2)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        None
                    } else {
                        let support = pick(rng, (degree / 2).max(1));
                        Some(distribution(rng, &support))
                    }
                })
                .collect(),
        ),
        RandomKind::Dfa => Row::Term { symbol: rng.gen_range(0..2), args: (0..2).map(|_| rng.gen_range(0..n)).collect() },
        RandomKind::Signature => {
            let arities = [0usize, 0, 1, 2, 3];
            let symbol = rng.gen_range(0..arities.len());
            Row::Term { symbol, args: (0..arities[symbol]).map(|_| rng.gen_range(0..n)).collect() }
        }
    }
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// Random system with n states; for set-like kinds each possible edge is
/// present with probability `density`.
pub fn random(kind: RandomKind, n: usize, density: f64, seed: u64) -> Coalgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = density.clamp(0.0, 1.0);
    let rows = (0..n)
        .map(|_| {
            let degree = (0..n).filter(|_| rng.gen_bool(density)).count();
            random_row(kind, &mut rng, n, degree)
        })
        .collect();
    Coalgebra::new(kind.functor(), state_names(n), rows).expect("generated rows are well formed")
}

/// Random Powerset system with exactly m distinct edges (m <= n*n).
pub fn random_powerset_edges(n: usize, m: usize, seed: u64) -> Coalgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![Vec::new(); n];
    let mut seen = std::collections::HashSet::new();
    let m = m.min(n * n);
    while seen.len() < m {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if seen.insert((x, y)) {
            rows[x].push(y);
        }
    }
    Coalgebra::new(FunctorKind::Powerset, state_names(n), rows.into_iter().map(Row::Set).collect())
        .expect("generated rows are well formed")
}

/// Splits a weight into two parts summing to it.
fn split_weight(rng: &mut ChaCha8Rng, w: &Weight) -> (Weight, Weight) {
    match w {
        Weight::Int(v) => {
            let a = rng.gen_range(-2i128..=2);
            (Weight::Int(a), Weight::Int(v - a))
        }
        Weight::Rat(r) => {
            let f = rat(rng.gen_range(1..=3), 4);
            let a = r * &f;
            (Weight::Rat(a.clone()), Weight::Rat(r - a))
        }
        Weight::Bool(b) => (Weight::Bool(*b), Weight::Bool(*b)),
    }
}

/// Blows a small random base system up into copies of each state whose
/// successors are spread over copies of the base successors, so that the
/// result has nontrivial equivalence classes. States are shuffled.
pub fn random_lifted(kind: RandomKind, base_n: usize, copies: usize, seed: u64) -> Coalgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_n = base_n.max(1);
    let copies = copies.max(1);
    let base: Vec<Row> = (0..base_n)
        .map(|_| {
            let d = rng.gen_range(0..=3);
            random_row(kind, &mut rng, base_n, d)
        })
        .collect();
    let counts: Vec<usize> = (0..base_n).map(|_| rng.gen_range(1..=copies)).collect();
    let mut ids: Vec<Vec<StateId>> = Vec::new();
    let mut next = 0;
    for &k in &counts {
        ids.push((next..next + k).collect());
        next += k;
    }
    let n = next;
    let mut perm: Vec<StateId> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut rows = vec![Row::Set(Vec::new()); n];
    for (q, row) in base.iter().enumerate() {
        for &copy in &ids[q] {
            let choose = |rng: &mut ChaCha8Rng, t: StateId| perm[*ids[t].choose(rng).unwrap()];
            let lifted = match row {
                Row::Set(succ) => {
                    let mut out = Vec::new();
                    for &t in succ {
                        out.push(choose(&mut rng, t));
                        if rng.gen_bool(0.5) {
                            out.push(choose(&mut rng, t));
                        }
                    }
                    Row::Set(out)
                }
                Row::Weighted(succ) => {
                    let mut out = Vec::new();
                    for (t, w) in succ {
                        if rng.gen_bool(0.5) {
                            let (a, b) = split_weight(&mut rng, w);
                            out.push((choose(&mut rng, *t), a));
                            out.push((choose(&mut rng, *t), b));
                        } else {
                            out.push((choose(&mut rng, *t), w.clone()));
                        }
                    }
                    Row::Weighted(out)
                }
                Row::Labelled(per_label) => Row::Labelled(
                    per_label
                        .iter()
                        .map(|r| {
                            r.as_ref().map(|succ| {
                                let mut out = Vec::new();
                                for (t, p) in succ {
                                    if rng.gen_bool(0.5) {
                                        let f = rat(rng.gen_range(1..=3), 4);
                                        let a = p * &f;
                                        out.push((choose(&mut rng, *t), a.clone()));
                                        out.push((choose(&mut rng, *t), p - a));
                                    } else {
                                        out.push((choose(&mut rng, *t), p.clone()));
                                    }
                                }
                                out
                            })
                        })
                        .collect(),
                ),
                Row::Term { symbol, args } => {
                    Row::Term { symbol: *symbol, args: args.iter().map(|&t| choose(&mut rng, t)).collect() }
                }
            };
            rows[perm[copy]] = lifted;
        }
    }
    Coalgebra::new(kind.functor(), state_names(n), rows).expect("lifted rows are well formed")
}

/// Instance `index` of the seeded test corpus for `kind`: at most 50 states
/// and at most 300 edges, alternating plain and lifted generation.
pub fn corpus_instance(kind: RandomKind, index: u64) -> Coalgebra {
    let seed = index.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (kind as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0u64.. {
        let sub = seed.wrapping_add(attempt);
        let c = if index.is_multiple_of(2) {
            let n = rng.gen_range(0..=50usize);
            let cap = if n == 0 { 1.0 } else { (4.0 / n as f64).min(0.6) };
            let density = rng.gen_range(0.0..=cap);
            random(kind, n, density, sub)
        } else {
            let base = rng.gen_range(1..=12usize);
            let copies = rng.gen_range(1..=(50 / base).clamp(1, 4));
            random_lifted(kind, base, copies, sub)
        };
        if c.len() <= 50 && c.count_transitions() <= 300 {
            return c;
        }
    }
    unreachable!()
}
