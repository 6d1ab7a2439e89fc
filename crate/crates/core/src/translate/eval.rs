use std::collections::HashMap;
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::Zero;

use super::{DomainFormula, Formula, TranslateError};
use crate::model::{Coalgebra, FunctorKind, Row};
use crate::semantics::StateSet;

fn mismatch(modality: &str, kind: &FunctorKind) -> TranslateError {
    TranslateError::KindMismatch { modality: modality.to_string(), kind: kind.tag() }
}

/// Extension of a domain formula. Shared subtrees are evaluated once.
pub fn eval_domain(c: &Coalgebra, f: &Formula) -> Result<StateSet, TranslateError> {
    let mut memo = HashMap::new();
    eval(c, f, &mut memo)
}

fn eval(c: &Coalgebra, f: &Formula, memo: &mut HashMap<*const DomainFormula, StateSet>) -> Result<StateSet, TranslateError> {
    if let Some(s) = memo.get(&Rc::as_ptr(f)) {
        return Ok(s.clone());
    }
    let n = c.len();
    let kind = c.kind();
    let filter = |p: &dyn Fn(&Row) -> bool| StateSet::from_states(n, (0..n).filter(|&x| p(c.row(x))));
    let s = match &**f {
        DomainFormula::True => StateSet::full(n),
        DomainFormula::Not(g) => eval(c, g, memo)?.complement(),
        DomainFormula::And(gs) => {
            let mut acc = StateSet::full(n);
            for g in gs {
                acc = acc.intersection(&eval(c, g, memo)?);
            }
            acc
        }
        DomainFormula::Or(gs) => {
            let mut acc = StateSet::empty(n);
            for g in gs {
                acc = acc.union(&eval(c, g, memo)?);
            }
            acc
        }
        DomainFormula::Diamond(g) => {
            if *kind != FunctorKind::Powerset {
                return Err(mismatch("<>", kind));
            }
            let sg = eval(c, g, memo)?;
            filter(&|row| matches!(row, Row::Set(succ) if succ.iter().any(|&y| sg.contains(y))))
        }
        DomainFormula::Grade(m, g) => {
            let monoid = match kind {
                FunctorKind::MonoidValued(_) | FunctorKind::Dist => kind.monoid().expect("weighted"),
                _ => return Err(mismatch("<m>", kind)),
            };
            if m.monoid() != monoid {
                return Err(mismatch(&format!("<{m}>"), kind));
            }
            let sg = eval(c, g, memo)?;
            filter(&|row| {
                let Row::Weighted(succ) = row else { return false };
                let mut sum = monoid.zero();
                for (y, w) in succ {
                    if sg.contains(*y) {
                        sum.add_assign(w);
                    }
                }
                &sum == m
            })
        }
        DomainFormula::Sym(name) => {
            let Some(sym) = kind.symbol_index(name).filter(|_| kind.is_term()) else {
                return Err(mismatch(&format!("sym({name})"), kind));
            };
            filter(&|row| matches!(row, Row::Term { symbol, .. } if *symbol == sym))
        }
        DomainFormula::Pos(set, g) => {
            if !kind.is_term() {
                return Err(mismatch("pos", kind));
            }
            let sg = eval(c, g, memo)?;
            filter(&|row| {
                let Row::Term { args, .. } = row else { return false };
                set.iter().all(|&i| i >= 1 && i <= args.len())
                    && args.iter().enumerate().all(|(i, &y)| set.contains(&(i + 1)) == sg.contains(y))
            })
        }
        DomainFormula::ProbAtLeast(label, p, g) => {
            let Some(a) = kind.alphabet().iter().position(|l| l == label).filter(|_| matches!(kind, FunctorKind::Lmc { .. }))
            else {
                return Err(mismatch(&format!("<{label}>={p}"), kind));
            };
            let sg = eval(c, g, memo)?;
            if p.is_zero() {
                StateSet::full(n)
            } else {
                filter(&|row| {
                    let Row::Labelled(rows) = row else { return false };
                    let Some(dist) = &rows[a] else { return false };
                    let mass: BigRational = dist.iter().filter(|(y, _)| sg.contains(*y)).map(|(_, q)| q).sum();
                    &mass >= p
                })
            }
        }
    };
    memo.insert(Rc::as_ptr(f), s.clone());
    Ok(s)
}
