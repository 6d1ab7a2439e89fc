use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::functor::FunctorKind;
use super::key::Key;
use super::weight::{rational_string, Monoid, Weight};
use super::ModelError;

pub type StateId = usize;

/// Successor structure of one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Row {
    /// Sorted, duplicate-free successor set.
    Set(Vec<StateId>),
    /// Sorted by target, nonzero weights.
    Weighted(Vec<(StateId, Weight)>),
    /// One entry per label; defined rows are sorted distributions.
    Labelled(Vec<Option<Vec<(StateId, BigRational)>>>),
    /// Symbol index into the kind's ranked alphabet plus arguments.
    Term { symbol: usize, args: Vec<StateId> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    kind: FunctorKind,
    names: Vec<String>,
    rows: Vec<Row>,
    index: HashMap<String, StateId>,
}

impl Coalgebra {
    /// Validates and normalizes a system. Weighted rows may list a target
    /// more than once; such entries are summed and zero sums dropped.
    pub fn new(kind: FunctorKind, names: Vec<String>, rows: Vec<Row>) -> Result<Self, ModelError> {
        if names.len() != rows.len() {
            return Err(ModelError::invalid("edges", "row count differs from state count"));
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(ModelError::invalid(format!("states[{i}]"), format!("duplicate state name {name:?}")));
            }
        }
        match &kind {
            FunctorKind::Lmc { alphabet } | FunctorKind::Dfa { alphabet } if alphabet.is_empty() => {
                return Err(ModelError::invalid("functor.alphabet", "alphabet must be nonempty"));
            }
            _ => {}
        }
        let n = names.len();
        let mut normalized = Vec::with_capacity(n);
        for (x, row) in rows.into_iter().enumerate() {
            let path = format!("edges.{}", names[x]);
            normalized.push(normalize_row(&kind, n, &names, row, &path)?);
        }
        Ok(Coalgebra { kind, names, rows: normalized, index })
    }

    pub fn empty(kind: FunctorKind) -> Self {
        Coalgebra { kind, names: Vec::new(), rows: Vec::new(), index: HashMap::new() }
    }

    pub fn kind(&self) -> &FunctorKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: StateId) -> &str {
        &self.names[x]
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn row(&self, x: StateId) -> &Row {
        &self.rows[x]
    }

    /// F applied to `color`, evaluated at c(x), landing in `arity` colors.
    pub fn eval_key(&self, x: StateId, color: &[u8], arity: usize) -> Key {
        match &self.rows[x] {
            Row::Set(succ) => {
                let mut bits = 0u8;
                for &y in succ {
                    bits |= 1 << color[y];
                }
                Key::Pow(bits)
            }
            Row::Weighted(succ) => {
                let monoid = self.kind.monoid().expect("weighted kind");
                let mut out = vec![monoid.zero(); arity];
                for (y, w) in succ {
                    out[color[*y] as usize].add_assign(w);
                }
                Key::Weights(out)
            }
            Row::Labelled(per_label) => Key::Lmc(
                per_label
                    .iter()
                    .map(|row| {
                        row.as_ref().map(|succ| {
                            let mut out = vec![BigRational::zero(); arity];
                            for (y, p) in succ {
                                out[color[*y] as usize] += p;
                            }
                            out
                        })
                    })
                    .collect(),
            ),
            Row::Term { symbol, args } => {
                Key::Term { symbol: *symbol, colors: args.iter().map(|&y| color[y]).collect() }
            }
        }
    }

    /// F!(c(x)).
    pub fn eval1(&self, x: StateId) -> Key {
        match &self.rows[x] {
            Row::Set(succ) => Key::Pow(if succ.is_empty() { 0 } else { 1 }),
            Row::Term { symbol, args } => Key::Term { symbol: *symbol, colors: vec![0; args.len()] },
            _ => self.eval_key(x, &vec![0; self.len()], 1),
        }
    }

    /// Fχ_S(c(x)) with S given by `member`.
    pub fn eval2(&self, x: StateId, member: &[bool]) -> Result<Key, ModelError> {
        if !self.kind.cancellative() {
            return Err(ModelError::NotCancellative(self.kind.tag().to_string()));
        }
        let color: Vec<u8> = member.iter().map(|&b| b as u8).collect();
        Ok(self.eval_key(x, &color, 2))
    }

    /// F(color)(c(x)) with colors in {0,1,2}.
    pub fn eval3(&self, x: StateId, color: &[u8]) -> Key {
        self.eval_key(x, color, 3)
    }

    /// Targets of stored edges out of x, in storage order, with repetition
    /// for repeated term arguments and multiple labels.
    pub fn successors(&self, x: StateId) -> Vec<StateId> {
        match &self.rows[x] {
            Row::Set(succ) => succ.clone(),
            Row::Weighted(succ) => succ.iter().map(|(y, _)| *y).collect(),
            Row::Labelled(per_label) => {
                per_label.iter().flatten().flat_map(|r| r.iter().map(|(y, _)| *y)).collect()
            }
            Row::Term { args, .. } => args.clone(),
        }
    }

    /// For each state y, the sorted set of states with a stored edge to y.
    pub fn predecessors(&self) -> Vec<Vec<StateId>> {
        let mut pred = vec![Vec::new(); self.len()];
        for x in 0..self.len() {
            for y in self.successors(x) {
                if pred[y].last() != Some(&x) {
                    pred[y].push(x);
                }
            }
        }
        pred
    }

    /// Number of stored edges.
    pub fn count_transitions(&self) -> usize {
        self.rows
            .iter()
            .map(|row| match row {
                Row::Set(s) => s.len(),
                Row::Weighted(s) => s.len(),
                Row::Labelled(rows) => rows.iter().flatten().map(|r| r.len()).sum(),
                Row::Term { args, .. } => args.len(),
            })
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Map, Value};
        let name = |y: &StateId| self.names[*y].clone();
        let mut edges = Map::new();
        for (x, row) in self.rows.iter().enumerate() {
            let v = match row {
                Row::Set(succ) => Value::from(succ.iter().map(name).collect::<Vec<_>>()),
                Row::Weighted(succ) => {
                    let mut m = Map::new();
                    for (y, w) in succ {
                        m.insert(name(y), w.to_json());
                    }
                    Value::Object(m)
                }
                Row::Labelled(per_label) => {
                    let mut m = Map::new();
                    for (a, row) in self.kind.alphabet().iter().zip(per_label) {
                        if let Some(row) = row {
                            let mut r = Map::new();
                            for (y, p) in row {
                                r.insert(name(y), Value::String(rational_string(p)));
                            }
                            m.insert(a.clone(), Value::Object(r));
                        }
                    }
                    Value::Object(m)
                }
                Row::Term { symbol, args } => match &self.kind {
                    FunctorKind::Dfa { alphabet } => {
                        let mut next = Map::new();
                        for (a, y) in alphabet.iter().zip(args) {
                            next.insert(a.clone(), Value::String(name(y)));
                        }
                        json!({"final": *symbol == super::functor::DFA_FINAL, "next": next})
                    }
                    _ => json!({
                        "symbol": self.kind.term_symbols()[*symbol].0,
                        "args": args.iter().map(name).collect::<Vec<_>>(),
                    }),
                },
            };
            edges.insert(self.names[x].clone(), v);
        }
        json!({"functor": self.kind.to_json(), "states": self.names, "edges": edges})
    }
}

fn normalize_row(
    kind: &FunctorKind,
    n: usize,
    names: &[String],
    row: Row,
    path: &str,
) -> Result<Row, ModelError> {
    let check = |y: StateId, p: &str| -> Result<(), ModelError> {
        if y < n {
            Ok(())
        } else {
            Err(ModelError::Dangling { path: p.to_string(), name: format!("#{y}") })
        }
    };
    match (kind, row) {
        (FunctorKind::Powerset, Row::Set(mut succ)) => {
            for &y in &succ {
                check(y, path)?;
            }
            succ.sort_unstable();
            succ.dedup();
            Ok(Row::Set(succ))
        }
        (FunctorKind::MonoidValued(_) | FunctorKind::Dist, Row::Weighted(succ)) => {
            let monoid = kind.monoid().unwrap();
            let mut merged: Vec<(StateId, Weight)> = Vec::new();
            let mut sorted = succ;
            sorted.sort_by_key(|(y, _)| *y);
            for (y, w) in sorted {
                let p = format!("{path}.{}", names.get(y).map(String::as_str).unwrap_or("?"));
                check(y, &p)?;
                if w.monoid() != monoid {
                    return Err(ModelError::invalid(p, format!("expected a {} weight", monoid.name())));
                }
                if let Weight::Int(v) = w {
                    if i64::try_from(v).is_err() {
                        return Err(ModelError::invalid(p, "integer weight outside 64-bit range"));
                    }
                }
                if matches!(kind, FunctorKind::Dist) {
                    if let Weight::Rat(r) = &w {
                        if r.is_negative() {
                            return Err(ModelError::invalid(p, "negative probability"));
                        }
                    }
                }
                match merged.last_mut() {
                    Some((z, acc)) if *z == y => acc.add_assign(&w),
                    _ => merged.push((y, w)),
                }
            }
            merged.retain(|(_, w)| !w.is_zero());
            if matches!(kind, FunctorKind::Dist) {
                let mut total = Monoid::RationalAdd.zero();
                for (_, w) in &merged {
                    total.add_assign(w);
                }
                if total != Weight::Rat(BigRational::one()) {
                    return Err(ModelError::NotNormalized { path: path.to_string(), sum: total.to_string() });
                }
            }
            Ok(Row::Weighted(merged))
        }
        (FunctorKind::Lmc { alphabet }, Row::Labelled(per_label)) => {
            if per_label.len() != alphabet.len() {
                return Err(ModelError::invalid(path, "one entry per label expected"));
            }
            let mut out = Vec::with_capacity(per_label.len());
            for (a, row) in alphabet.iter().zip(per_label) {
                let lp = format!("{path}.{a}");
                let Some(mut row) = row else {
                    out.push(None);
                    continue;
                };
                row.sort_by_key(|(y, _)| *y);
                let mut merged: Vec<(StateId, BigRational)> = Vec::new();
                for (y, p) in row {
                    check(y, &lp)?;
                    if p.is_negative() {
                        return Err(ModelError::invalid(format!("{lp}.{}", names[y]), "negative probability"));
                    }
                    match merged.last_mut() {
                        Some((z, acc)) if *z == y => *acc += p,
                        _ => merged.push((y, p)),
                    }
                }
                merged.retain(|(_, p)| !p.is_zero());
                let total: BigRational = merged.iter().map(|(_, p)| p.clone()).sum();
                if !total.is_one() {
                    return Err(ModelError::NotNormalized { path: lp, sum: rational_string(&total) });
                }
                out.push(Some(merged));
            }
            Ok(Row::Labelled(out))
        }
        (FunctorKind::Dfa { .. } | FunctorKind::Signature { .. }, Row::Term { symbol, args }) => {
            let symbols = kind.term_symbols();
            let Some((_, arity)) = symbols.get(symbol) else {
                return Err(ModelError::invalid(format!("{path}.symbol"), "unknown symbol"));
            };
            if args.len() != *arity {
                return Err(ModelError::Arity { path: format!("{path}.args"), expected: *arity, found: args.len() });
            }
            for &y in &args {
                check(y, path)?;
            }
            Ok(Row::Term { symbol, args })
        }
        (kind, _) => Err(ModelError::invalid(path, format!("row shape does not match kind {}", kind.tag()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::weight::rat;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn fig1() -> Coalgebra {
        // x -> {x, x1}, x1 -> {x1, z}, z -> {}, y -> {y, z}
        Coalgebra::new(
            FunctorKind::Powerset,
            names(&["x", "x1", "z", "y"]),
            vec![Row::Set(vec![0, 1]), Row::Set(vec![1, 2]), Row::Set(vec![]), Row::Set(vec![3, 2])],
        )
        .unwrap()
    }

    #[test]
    fn eval1_deadlock_is_empty() {
        let c = fig1();
        assert_eq!(c.eval1(2), Key::Pow(0));
        assert_eq!(c.eval1(0), Key::Pow(1));
    }

    #[test]
    fn eval1_int_total() {
        let c = Coalgebra::new(
            FunctorKind::MonoidValued(Monoid::IntAdd),
            names(&["x", "y", "z"]),
            vec![Row::Weighted(vec![(1, Weight::Int(2)), (2, Weight::Int(3))]), Row::Weighted(vec![]), Row::Weighted(vec![])],
        )
        .unwrap();
        assert_eq!(c.eval1(0), Key::Weights(vec![Weight::Int(5)]));
    }

    #[test]
    fn eval3_int_per_color() {
        // x -> {a:1, b:2, d:4}; a colored 2, b colored 1, d colored 0
        let c = Coalgebra::new(
            FunctorKind::MonoidValued(Monoid::IntAdd),
            names(&["x", "a", "b", "d"]),
            vec![
                Row::Weighted(vec![(1, Weight::Int(1)), (2, Weight::Int(2)), (3, Weight::Int(4))]),
                Row::Weighted(vec![]),
                Row::Weighted(vec![]),
                Row::Weighted(vec![]),
            ],
        )
        .unwrap();
        let key = c.eval3(0, &[0, 2, 1, 0]);
        assert_eq!(key, Key::Weights(vec![Weight::Int(4), Weight::Int(2), Weight::Int(1)]));
    }

    #[test]
    fn eval3_all_two_is_j1_of_eval1() {
        let c = fig1();
        for x in 0..c.len() {
            assert_eq!(c.eval3(x, &[2; 4]), c.eval1(x).j1());
        }
    }

    #[test]
    fn eval2_dist_and_dfa() {
        let d = Coalgebra::new(
            FunctorKind::Dist,
            names(&["x", "y", "z"]),
            vec![
                Row::Weighted(vec![(1, Weight::Rat(rat(1, 2))), (2, Weight::Rat(rat(1, 2)))]),
                Row::Weighted(vec![(1, Weight::Rat(rat(1, 1)))]),
                Row::Weighted(vec![(2, Weight::Rat(rat(1, 1)))]),
            ],
        )
        .unwrap();
        let k = d.eval2(0, &[false, true, false]).unwrap();
        assert_eq!(k, Key::Weights(vec![Weight::Rat(rat(1, 2)), Weight::Rat(rat(1, 2))]));
        let k = d.eval2(0, &[true, true, true]).unwrap();
        assert_eq!(k, Key::Weights(vec![Weight::Rat(rat(0, 1)), Weight::Rat(rat(1, 1))]));

        let dfa = Coalgebra::new(
            FunctorKind::Dfa { alphabet: names(&["a", "b"]) },
            names(&["x", "y", "z"]),
            vec![
                Row::Term { symbol: 0, args: vec![1, 2] },
                Row::Term { symbol: 1, args: vec![1, 1] },
                Row::Term { symbol: 1, args: vec![2, 2] },
            ],
        )
        .unwrap();
        let k = dfa.eval2(0, &[false, true, false]).unwrap();
        assert_eq!(k, Key::Term { symbol: 0, colors: vec![1, 0] });
    }

    #[test]
    fn eval2_rejects_powerset() {
        let c = fig1();
        assert!(matches!(c.eval2(0, &[false; 4]), Err(ModelError::NotCancellative(_))));
    }

    #[test]
    fn predecessors_fig1() {
        let c = fig1();
        let pred = c.predecessors();
        assert_eq!(pred[2], vec![1, 3]);
        assert_eq!(c.count_transitions(), 6);
    }

    #[test]
    fn signature_pred_counted_once() {
        let c = Coalgebra::new(
            FunctorKind::signature([("f", 2), ("c", 0)]),
            names(&["x", "y"]),
            vec![Row::Term { symbol: 1, args: vec![1, 1] }, Row::Term { symbol: 0, args: vec![] }],
        )
        .unwrap();
        assert_eq!(c.predecessors()[1], vec![0]);
        assert_eq!(c.count_transitions(), 2);
    }

    #[test]
    fn zero_weights_dropped_and_duplicates_merged() {
        let c = Coalgebra::new(
            FunctorKind::MonoidValued(Monoid::IntAdd),
            names(&["x", "y"]),
            vec![
                Row::Weighted(vec![(1, Weight::Int(2)), (1, Weight::Int(-2)), (0, Weight::Int(0))]),
                Row::Weighted(vec![(0, Weight::Int(1)), (0, Weight::Int(1))]),
            ],
        )
        .unwrap();
        assert_eq!(c.row(0), &Row::Weighted(vec![]));
        assert_eq!(c.row(1), &Row::Weighted(vec![(0, Weight::Int(2))]));
        assert_eq!(c.count_transitions(), 1);
    }

    #[test]
    fn dist_must_sum_to_one() {
        let r = Coalgebra::new(
            FunctorKind::Dist,
            names(&["x"]),
            vec![Row::Weighted(vec![(0, Weight::Rat(rat(1, 3)))])],
        );
        assert!(matches!(r, Err(ModelError::NotNormalized { .. })));
    }

    #[test]
    fn arity_mismatch() {
        let r = Coalgebra::new(
            FunctorKind::signature([("f", 2)]),
            names(&["x"]),
            vec![Row::Term { symbol: 0, args: vec![0] }],
        );
        assert!(matches!(r, Err(ModelError::Arity { expected: 2, found: 1, .. })));
    }
}
