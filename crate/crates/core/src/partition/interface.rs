//! Per-kind computation of split keys for the states touched by a splitter.
//!
//! Weighted kinds keep, for every edge x -> y, a shared cell holding the
//! total weight from x into the compound containing y. Splitting a compound
//! only visits the edges into the splitter.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::model::{Coalgebra, FunctorKind, Key, Monoid, Row, StateId, Weight};

const NONE: u32 = u32::MAX;

/// Edges numbered by target, so the edges into a state form a range.
pub(crate) struct Graph {
    pub src: Vec<u32>,
    in_start: Vec<u32>,
}

impl Graph {
    /// Also returns, for each new edge number, the original one.
    fn new(n: usize, src: &[StateId], tgt: &[StateId]) -> (Self, Vec<usize>) {
        let mut in_start = vec![0u32; n + 1];
        for &y in tgt {
            in_start[y + 1] += 1;
        }
        for i in 0..n {
            in_start[i + 1] += in_start[i];
        }
        let mut fill = in_start.clone();
        let mut order = vec![0; tgt.len()];
        for (e, &y) in tgt.iter().enumerate() {
            order[fill[y] as usize] = e;
            fill[y] += 1;
        }
        let src = order.iter().map(|&e| src[e] as u32).collect();
        (Graph { src, in_start }, order)
    }

    pub fn incoming(&self, y: StateId) -> std::ops::Range<usize> {
        self.in_start[y] as usize..self.in_start[y + 1] as usize
    }
}

fn permute<T: Clone>(v: &[T], order: &[usize]) -> Vec<T> {
    order.iter().map(|&e| v[e].clone()).collect()
}

trait Algebra {
    type W: Clone;
    fn zero(&self) -> Self::W;
    fn total(&self, x: StateId) -> Self::W;
    fn add_edge(&self, acc: &mut Self::W, e: usize);
    fn sub_assign(&self, a: &mut Self::W, b: &Self::W);
    /// Key from the weight into each color, color 0 first.
    fn key(&self, x: StateId, parts: &[Self::W]) -> Key;
}

/// Successor counts; serves the powerset and the Boolean monoid.
struct CountAlg {
    total: Vec<u32>,
    boolean: bool,
}

impl Algebra for CountAlg {
    type W = u32;
    fn zero(&self) -> u32 {
        0
    }
    fn total(&self, x: StateId) -> u32 {
        self.total[x]
    }
    fn add_edge(&self, acc: &mut u32, _e: usize) {
        *acc += 1;
    }
    fn sub_assign(&self, a: &mut u32, b: &u32) {
        *a -= *b;
    }
    fn key(&self, _x: StateId, parts: &[u32]) -> Key {
        if self.boolean {
            Key::Weights(parts.iter().map(|&c| Weight::Bool(c > 0)).collect())
        } else {
            let mut bits = 0u8;
            for (i, &c) in parts.iter().enumerate() {
                if c > 0 {
                    bits |= 1 << i;
                }
            }
            Key::Pow(bits)
        }
    }
}

struct IntAlg {
    weight: Vec<i128>,
    total: Vec<i128>,
}

impl Algebra for IntAlg {
    type W = i128;
    fn zero(&self) -> i128 {
        0
    }
    fn total(&self, x: StateId) -> i128 {
        self.total[x]
    }
    fn add_edge(&self, acc: &mut i128, e: usize) {
        *acc += self.weight[e];
    }
    fn sub_assign(&self, a: &mut i128, b: &i128) {
        *a -= *b;
    }
    fn key(&self, _x: StateId, parts: &[i128]) -> Key {
        Key::Weights(parts.iter().map(|&w| Weight::Int(w)).collect())
    }
}

struct RatAlg {
    weight: Vec<BigRational>,
    total: Vec<BigRational>,
}

impl Algebra for RatAlg {
    type W = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn total(&self, x: StateId) -> BigRational {
        self.total[x].clone()
    }
    fn add_edge(&self, acc: &mut BigRational, e: usize) {
        *acc += &self.weight[e];
    }
    fn sub_assign(&self, a: &mut BigRational, b: &BigRational) {
        *a -= b;
    }
    fn key(&self, _x: StateId, parts: &[BigRational]) -> Key {
        Key::Weights(parts.iter().map(|w| Weight::Rat(w.clone())).collect())
    }
}

/// Per-label probability mass; undefined labels carry total 0.
struct LmcAlg {
    label: Vec<usize>,
    weight: Vec<BigRational>,
    defined: Vec<Vec<bool>>,
    labels: usize,
}

impl Algebra for LmcAlg {
    type W = Vec<BigRational>;
    fn zero(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.labels]
    }
    fn total(&self, x: StateId) -> Vec<BigRational> {
        self.defined[x]
            .iter()
            .map(|&d| if d { BigRational::one() } else { BigRational::zero() })
            .collect()
    }
    fn add_edge(&self, acc: &mut Vec<BigRational>, e: usize) {
        acc[self.label[e]] += &self.weight[e];
    }
    fn sub_assign(&self, a: &mut Vec<BigRational>, b: &Vec<BigRational>) {
        for (a, b) in a.iter_mut().zip(b) {
            *a -= b;
        }
    }
    fn key(&self, x: StateId, parts: &[Vec<BigRational>]) -> Key {
        Key::Lmc(
            (0..self.labels)
                .map(|a| self.defined[x][a].then(|| parts.iter().map(|p| p[a].clone()).collect()))
                .collect(),
        )
    }
}

struct Cells<A: Algebra> {
    alg: A,
    cells: Vec<A::W>,
    edge_cell: Vec<u32>,
    /// Number of edges pointing at each cell; cells at zero are reused.
    refs: Vec<u32>,
    free: Vec<u32>,
}

impl<A: Algebra> Cells<A> {
    fn new(alg: A, n: usize, graph: &Graph) -> Self {
        let cells = (0..n).map(|x| alg.total(x)).collect();
        let edge_cell = graph.src.clone();
        let mut refs = vec![0u32; n];
        for &x in &graph.src {
            refs[x as usize] += 1;
        }
        Cells { alg, cells, edge_cell, refs, free: Vec::new() }
    }

    fn alloc(&mut self) -> u32 {
        match self.free.pop() {
            Some(i) => {
                self.cells[i as usize] = self.alg.zero();
                i
            }
            None => {
                self.cells.push(self.alg.zero());
                self.refs.push(0);
                (self.cells.len() - 1) as u32
            }
        }
    }

    fn touch3(&mut self, g: &Graph, splitter: &[StateId], slot: &mut [u32]) -> Vec<(StateId, Key)> {
        let mut visited: Vec<(StateId, u32, u32)> = Vec::new();
        for &y in splitter {
            for e in g.incoming(y) {
                let x = g.src[e] as usize;
                if slot[x] == NONE {
                    slot[x] = visited.len() as u32;
                    let cell = self.alloc();
                    visited.push((x, self.edge_cell[e], cell));
                }
                let cell = visited[slot[x] as usize].2;
                self.alg.add_edge(&mut self.cells[cell as usize], e);
                self.refs[self.edge_cell[e] as usize] -= 1;
                self.refs[cell as usize] += 1;
                self.edge_cell[e] = cell;
            }
        }
        visited
            .into_iter()
            .map(|(x, old, new)| {
                slot[x] = NONE;
                let (old, new) = (old as usize, new as usize);
                let in_s = self.cells[new].clone();
                let in_b = self.cells[old].clone();
                let mut outside = self.alg.total(x);
                self.alg.sub_assign(&mut outside, &in_b);
                let mut rest = in_b;
                self.alg.sub_assign(&mut rest, &in_s);
                let key = self.alg.key(x, &[outside, rest.clone(), in_s]);
                self.cells[old] = rest;
                if self.refs[old] == 0 {
                    self.free.push(old as u32);
                }
                (x, key)
            })
            .collect()
    }

    fn touch2(&mut self, g: &Graph, splitter: &[StateId], slot: &mut [u32]) -> Vec<(StateId, Key)> {
        let mut visited: Vec<(StateId, A::W)> = Vec::new();
        for &y in splitter {
            for e in g.incoming(y) {
                let x = g.src[e] as usize;
                if slot[x] == NONE {
                    slot[x] = visited.len() as u32;
                    visited.push((x, self.alg.zero()));
                }
                let i = slot[x] as usize;
                self.alg.add_edge(&mut visited[i].1, e);
            }
        }
        visited
            .into_iter()
            .map(|(x, in_s)| {
                slot[x] = NONE;
                let mut outside = self.alg.total(x);
                self.alg.sub_assign(&mut outside, &in_s);
                (x, self.alg.key(x, &[outside, in_s]))
            })
            .collect()
    }
}

enum Store {
    Count(Cells<CountAlg>),
    Int(Cells<IntAlg>),
    Rat(Cells<RatAlg>),
    Lmc(Cells<LmcAlg>),
    Term,
}

/// Split-key oracle for one run.
pub(crate) struct Interface<'a> {
    c: &'a Coalgebra,
    pub graph: Graph,
    store: Store,
    slot: Vec<u32>,
}

impl<'a> Interface<'a> {
    pub fn new(c: &'a Coalgebra) -> Self {
        let n = c.len();
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut ints = Vec::new();
        let mut rats = Vec::new();
        let mut labels = Vec::new();
        for x in 0..n {
            match c.row(x) {
                Row::Set(succ) => {
                    for &y in succ {
                        src.push(x);
                        tgt.push(y);
                    }
                }
                Row::Weighted(succ) => {
                    for (y, w) in succ {
                        src.push(x);
                        tgt.push(*y);
                        match w {
                            Weight::Int(v) => ints.push(*v),
                            Weight::Rat(r) => rats.push(r.clone()),
                            Weight::Bool(_) => {}
                        }
                    }
                }
                Row::Labelled(per_label) => {
                    for (a, row) in per_label.iter().enumerate() {
                        for (y, p) in row.iter().flatten() {
                            src.push(x);
                            tgt.push(*y);
                            labels.push(a);
                            rats.push(p.clone());
                        }
                    }
                }
                Row::Term { args, .. } => {
                    for &y in args {
                        src.push(x);
                        tgt.push(y);
                    }
                }
            }
        }
        let (graph, order) = Graph::new(n, &src, &tgt);
        let out_degree = |g: &Graph| {
            let mut d = vec![0u32; n];
            for &x in &g.src {
                d[x as usize] += 1;
            }
            d
        };
        let store = match c.kind() {
            FunctorKind::Powerset | FunctorKind::MonoidValued(Monoid::BoolOr) => {
                let boolean = !matches!(c.kind(), FunctorKind::Powerset);
                Store::Count(Cells::new(CountAlg { total: out_degree(&graph), boolean }, n, &graph))
            }
            FunctorKind::MonoidValued(Monoid::IntAdd) => {
                let ints = permute(&ints, &order);
                let mut total = vec![0i128; n];
                for (e, &x) in graph.src.iter().enumerate() {
                    total[x as usize] += ints[e];
                }
                Store::Int(Cells::new(IntAlg { weight: ints, total }, n, &graph))
            }
            FunctorKind::MonoidValued(Monoid::RationalAdd) | FunctorKind::Dist => {
                let rats = permute(&rats, &order);
                let mut total = vec![BigRational::zero(); n];
                for (e, &x) in graph.src.iter().enumerate() {
                    total[x as usize] += &rats[e];
                }
                Store::Rat(Cells::new(RatAlg { weight: rats, total }, n, &graph))
            }
            FunctorKind::Lmc { alphabet } => {
                let defined = (0..n)
                    .map(|x| match c.row(x) {
                        Row::Labelled(rows) => rows.iter().map(Option::is_some).collect(),
                        _ => unreachable!(),
                    })
                    .collect();
                let alg = LmcAlg {
                    label: permute(&labels, &order),
                    weight: permute(&rats, &order),
                    defined,
                    labels: alphabet.len(),
                };
                Store::Lmc(Cells::new(alg, n, &graph))
            }
            FunctorKind::Dfa { .. } | FunctorKind::Signature { .. } => Store::Term,
        };
        Interface { c, graph, store, slot: vec![NONE; n] }
    }

    /// States with an edge into the splitter, each with Fχ_S^B(c(x)).
    /// `color` must give 2 on S, 1 on B minus S and 0 elsewhere.
    pub fn touch3(&mut self, splitter: &[StateId], color: impl Fn(StateId) -> u8) -> Vec<(StateId, Key)> {
        let (g, slot) = (&self.graph, &mut self.slot);
        match &mut self.store {
            Store::Count(s) => s.touch3(g, splitter, slot),
            Store::Int(s) => s.touch3(g, splitter, slot),
            Store::Rat(s) => s.touch3(g, splitter, slot),
            Store::Lmc(s) => s.touch3(g, splitter, slot),
            Store::Term => touch_terms(self.c, g, splitter, slot, color),
        }
    }

    /// States with an edge into the splitter, each with Fχ_S(c(x)).
    /// `color` must give 1 on S and 0 elsewhere.
    pub fn touch2(&mut self, splitter: &[StateId], color: impl Fn(StateId) -> u8) -> Vec<(StateId, Key)> {
        let (g, slot) = (&self.graph, &mut self.slot);
        match &mut self.store {
            Store::Count(_) => unreachable!("count store is not cancellative"),
            Store::Int(s) => s.touch2(g, splitter, slot),
            Store::Rat(s) => s.touch2(g, splitter, slot),
            Store::Lmc(s) => s.touch2(g, splitter, slot),
            Store::Term => touch_terms(self.c, g, splitter, slot, color),
        }
    }
}

fn touch_terms(
    c: &Coalgebra,
    g: &Graph,
    splitter: &[StateId],
    slot: &mut [u32],
    color: impl Fn(StateId) -> u8,
) -> Vec<(StateId, Key)> {
    let mut touched = Vec::new();
    for &y in splitter {
        for e in g.incoming(y) {
            let x = g.src[e] as usize;
            if slot[x] == NONE {
                slot[x] = 0;
                touched.push(x);
            }
        }
    }
    touched
        .into_iter()
        .map(|x| {
            slot[x] = NONE;
            let Row::Term { symbol, args } = c.row(x) else { unreachable!() };
            (x, Key::Term { symbol: *symbol, colors: args.iter().map(|&y| color(y)).collect() })
        })
        .collect()
}
