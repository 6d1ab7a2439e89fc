//! Canonical encodings of elements of F(k) for k colors, k in {1,2,3}.
//!
//! A key is the image of a successor structure under a coloring of the
//! states. The same type serves F1 (one color), F2 (two) and F3 (three).

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use super::functor::{FunctorKind, DFA_FINAL};
use super::weight::{json_rational, rational_string, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    /// Set of colors hit by some successor, as a bitmask.
    Pow(u8),
    /// Weight sum per color.
    Weights(Vec<Weight>),
    /// Per label: undefined, or probability mass per color.
    Lmc(Vec<Option<Vec<BigRational>>>),
    /// Operation symbol and the color of each argument.
    Term { symbol: usize, colors: Vec<u8> },
}

pub type F1Key = Key;
pub type F2Key = Key;
pub type F3Key = Key;

impl Key {
    /// Applies F to the color map `f`, landing in `arity` colors.
    pub fn fmap(&self, f: &[u8], arity: usize) -> Key {
        match self {
            Key::Pow(bits) => {
                let mut out = 0u8;
                for (i, &target) in f.iter().enumerate() {
                    if bits & (1 << i) != 0 {
                        out |= 1 << target;
                    }
                }
                Key::Pow(out)
            }
            Key::Weights(ws) => {
                let zero = ws[0].monoid().zero();
                let mut out = vec![zero; arity];
                for (i, w) in ws.iter().enumerate() {
                    out[f[i] as usize].add_assign(w);
                }
                Key::Weights(out)
            }
            Key::Lmc(rows) => Key::Lmc(
                rows.iter()
                    .map(|row| {
                        row.as_ref().map(|ps| {
                            let mut out = vec![BigRational::zero(); arity];
                            for (i, p) in ps.iter().enumerate() {
                                out[f[i] as usize] += p;
                            }
                            out
                        })
                    })
                    .collect(),
            ),
            Key::Term { symbol, colors } => Key::Term {
                symbol: *symbol,
                colors: colors.iter().map(|&c| f[c as usize]).collect(),
            },
        }
    }

    /// F1 -> F3 along 0 |-> 2.
    pub fn j1(&self) -> Key {
        self.fmap(&[2], 3)
    }

    /// F2 -> F3 along 0 |-> 1, 1 |-> 2.
    pub fn j2(&self) -> Key {
        self.fmap(&[1, 2], 3)
    }

    /// F3 -> F1.
    pub fn bang(&self) -> Key {
        self.fmap(&[0, 0, 0], 1)
    }

    /// F3 -> F2 along the characteristic map of {1,2}.
    pub fn chi12(&self) -> Key {
        self.fmap(&[0, 1, 1], 2)
    }

    /// F3 -> F2 along the characteristic map of {2}.
    pub fn chi2(&self) -> Key {
        self.fmap(&[0, 0, 1], 2)
    }

    /// Canonical text for an F1 key, used inside `<...>`.
    pub fn render_f1(&self, kind: &FunctorKind) -> String {
        match self {
            Key::Pow(bits) => {
                if *bits == 0 {
                    "pow:empty".to_string()
                } else {
                    "pow:nonempty".to_string()
                }
            }
            Key::Weights(ws) => ws[0].to_string(),
            Key::Lmc(rows) => {
                let parts: Vec<String> = kind
                    .alphabet()
                    .iter()
                    .zip(rows)
                    .map(|(a, row)| match row {
                        Some(ps) => format!("{a}:{}", rational_string(&ps[0])),
                        None => format!("{a}:_"),
                    })
                    .collect();
                format!("{{{}}}", parts.join(","))
            }
            Key::Term { symbol, .. } => kind.term_symbols()[*symbol].0.clone(),
        }
    }

    /// Canonical text for an F2 or F3 key.
    pub fn render(&self, kind: &FunctorKind) -> String {
        match self {
            Key::Pow(bits) => {
                let cs: Vec<String> =
                    (0..8).filter(|i| bits & (1 << i) != 0).map(|i| i.to_string()).collect();
                format!("{{{}}}", cs.join(","))
            }
            Key::Weights(ws) => {
                let parts: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
                format!("({})", parts.join(","))
            }
            Key::Lmc(rows) => {
                let parts: Vec<String> = kind
                    .alphabet()
                    .iter()
                    .zip(rows)
                    .map(|(a, row)| match row {
                        Some(ps) => {
                            let ps: Vec<String> = ps.iter().map(rational_string).collect();
                            format!("{a}:({})", ps.join(","))
                        }
                        None => format!("{a}:_"),
                    })
                    .collect();
                format!("{{{}}}", parts.join(","))
            }
            Key::Term { symbol, colors } => {
                let name = &kind.term_symbols()[*symbol].0;
                let parts: Vec<String> = match kind {
                    FunctorKind::Dfa { alphabet } => alphabet
                        .iter()
                        .zip(colors)
                        .map(|(a, c)| format!("{a}:{c}"))
                        .collect(),
                    _ => colors.iter().map(|c| c.to_string()).collect(),
                };
                format!("{name}({})", parts.join(","))
            }
        }
    }

    pub fn to_json(&self, kind: &FunctorKind) -> Value {
        match self {
            Key::Pow(bits) => {
                Value::from((0..8u8).filter(|i| bits & (1 << i) != 0).collect::<Vec<u8>>())
            }
            Key::Weights(ws) => Value::Array(ws.iter().map(Weight::to_json).collect()),
            Key::Lmc(rows) => {
                let mut map = serde_json::Map::new();
                for (a, row) in kind.alphabet().iter().zip(rows) {
                    let v = match row {
                        Some(ps) => Value::Array(
                            ps.iter().map(|p| Value::String(rational_string(p))).collect(),
                        ),
                        None => Value::Null,
                    };
                    map.insert(a.clone(), v);
                }
                Value::Object(map)
            }
            Key::Term { symbol, colors } => match kind {
                FunctorKind::Dfa { alphabet } => {
                    let mut map = serde_json::Map::new();
                    for (a, c) in alphabet.iter().zip(colors) {
                        map.insert(a.clone(), json!(c));
                    }
                    json!({"final": *symbol == DFA_FINAL, "colors": map})
                }
                _ => json!({"symbol": kind.term_symbols()[*symbol].0, "colors": colors}),
            },
        }
    }

    /// Inverse of [`Key::to_json`] for a key with `arity` colors.
    pub fn from_json(v: &Value, kind: &FunctorKind, arity: usize) -> Option<Key> {
        let color = |c: &Value| -> Option<u8> {
            let c = c.as_u64()?;
            (c < arity as u64).then_some(c as u8)
        };
        match kind {
            FunctorKind::Powerset => {
                let mut bits = 0u8;
                for c in v.as_array()? {
                    bits |= 1 << color(c)?;
                }
                Some(Key::Pow(bits))
            }
            FunctorKind::MonoidValued(_) | FunctorKind::Dist => {
                let monoid = kind.monoid()?;
                let ws = v
                    .as_array()?
                    .iter()
                    .map(|w| Weight::from_json(w, monoid))
                    .collect::<Option<Vec<_>>>()?;
                (ws.len() == arity).then_some(Key::Weights(ws))
            }
            FunctorKind::Lmc { alphabet } => {
                let map = v.as_object()?;
                if map.len() != alphabet.len() {
                    return None;
                }
                let mut rows = Vec::new();
                for a in alphabet {
                    match map.get(a)? {
                        Value::Null => rows.push(None),
                        Value::Array(ps) => {
                            let ps = ps.iter().map(json_rational).collect::<Option<Vec<_>>>()?;
                            if ps.len() != arity {
                                return None;
                            }
                            rows.push(Some(ps));
                        }
                        _ => return None,
                    }
                }
                Some(Key::Lmc(rows))
            }
            FunctorKind::Dfa { alphabet } => {
                let fin = v.get("final")?.as_bool()?;
                let map = v.get("colors")?.as_object()?;
                if map.len() != alphabet.len() {
                    return None;
                }
                let colors =
                    alphabet.iter().map(|a| color(map.get(a)?)).collect::<Option<Vec<_>>>()?;
                let symbol = if fin { DFA_FINAL } else { super::functor::DFA_NONFINAL };
                Some(Key::Term { symbol, colors })
            }
            FunctorKind::Signature { symbols } => {
                let name = v.get("symbol")?.as_str()?;
                let symbol = symbols.iter().position(|(s, _)| s == name)?;
                let colors = v
                    .get("colors")?
                    .as_array()?
                    .iter()
                    .map(color)
                    .collect::<Option<Vec<_>>>()?;
                (colors.len() == symbols[symbol].1).then_some(Key::Term { symbol, colors })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::weight::{rat, Monoid};

    #[test]
    fn pow_fmap_is_image() {
        // {0,2} along chi12 is {0,1}; along chi2 is {0,1}; along bang is {0}
        let k = Key::Pow(0b101);
        assert_eq!(k.chi12(), Key::Pow(0b11));
        assert_eq!(k.chi2(), Key::Pow(0b11));
        assert_eq!(k.bang(), Key::Pow(0b1));
        assert_eq!(Key::Pow(0).bang(), Key::Pow(0));
        assert_eq!(Key::Pow(1).j1(), Key::Pow(0b100));
    }

    #[test]
    fn weights_fmap_sums_buckets() {
        let k = Key::Weights(vec![Weight::Int(1), Weight::Int(2), Weight::Int(4)]);
        assert_eq!(k.bang(), Key::Weights(vec![Weight::Int(7)]));
        assert_eq!(k.chi12(), Key::Weights(vec![Weight::Int(1), Weight::Int(6)]));
        assert_eq!(k.chi2(), Key::Weights(vec![Weight::Int(3), Weight::Int(4)]));
    }

    #[test]
    fn render_forms() {
        let pow = FunctorKind::Powerset;
        assert_eq!(Key::Pow(0).render_f1(&pow), "pow:empty");
        assert_eq!(Key::Pow(0b101).render(&pow), "{0,2}");
        let lmc = FunctorKind::Lmc { alphabet: vec!["a".into(), "b".into()] };
        let k = Key::Lmc(vec![Some(vec![rat(1, 2), rat(1, 2)]), None]);
        assert_eq!(k.render(&lmc), "{a:(1/2,1/2),b:_}");
        let dfa = FunctorKind::Dfa { alphabet: vec!["a".into(), "b".into()] };
        let k = Key::Term { symbol: DFA_FINAL, colors: vec![1, 0] };
        assert_eq!(k.render(&dfa), "final(a:1,b:0)");
    }

    #[test]
    fn json_round_trip_per_kind() {
        let cases = vec![
            (FunctorKind::Powerset, Key::Pow(0b110), 3),
            (
                FunctorKind::MonoidValued(Monoid::RationalAdd),
                Key::Weights(vec![Weight::Rat(rat(1, 3)), Weight::Rat(rat(-2, 1))]),
                2,
            ),
            (
                FunctorKind::Lmc { alphabet: vec!["a".into(), "b".into()] },
                Key::Lmc(vec![None, Some(vec![rat(1, 4), rat(0, 1), rat(3, 4)])]),
                3,
            ),
            (
                FunctorKind::Dfa { alphabet: vec!["a".into()] },
                Key::Term { symbol: 1, colors: vec![2] },
                3,
            ),
            (
                FunctorKind::signature([("f", 2), ("c", 0)]),
                Key::Term { symbol: 1, colors: vec![0, 1] },
                2,
            ),
        ];
        for (kind, key, arity) in cases {
            let v = key.to_json(&kind);
            assert_eq!(Key::from_json(&v, &kind, arity), Some(key.clone()), "{v}");
        }
    }
}
