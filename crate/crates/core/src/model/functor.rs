use super::weight::Monoid;

/// The transition type of a system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctorKind {
    /// Finitely branching transition systems.
    Powerset,
    /// Weighted systems over a commutative monoid.
    MonoidValued(Monoid),
    /// Finite probability distributions with rational weights.
    Dist,
    /// Per label either undefined or a distribution.
    Lmc { alphabet: Vec<String> },
    /// Final flag plus one successor per letter.
    Dfa { alphabet: Vec<String> },
    /// Terms over a ranked alphabet, symbols kept sorted by name.
    Signature { symbols: Vec<(String, usize)> },
}

impl FunctorKind {
    pub fn signature<I, S>(symbols: I) -> FunctorKind
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut symbols: Vec<(String, usize)> =
            symbols.into_iter().map(|(s, a)| (s.into(), a)).collect();
        symbols.sort();
        symbols.dedup_by(|a, b| a.0 == b.0);
        FunctorKind::Signature { symbols }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FunctorKind::Powerset => "powerset",
            FunctorKind::MonoidValued(_) => "monoid",
            FunctorKind::Dist => "dist",
            FunctorKind::Lmc { .. } => "lmc",
            FunctorKind::Dfa { .. } => "dfa",
            FunctorKind::Signature { .. } => "signature",
        }
    }

    pub fn zippable(&self) -> bool {
        true
    }

    pub fn cancellative(&self) -> bool {
        match self {
            FunctorKind::Powerset => false,
            FunctorKind::MonoidValued(m) => m.is_cancellative(),
            _ => true,
        }
    }

    /// Monoid of the weights appearing in keys, if the kind is weighted.
    pub fn monoid(&self) -> Option<Monoid> {
        match self {
            FunctorKind::MonoidValued(m) => Some(*m),
            FunctorKind::Dist | FunctorKind::Lmc { .. } => Some(Monoid::RationalAdd),
            _ => None,
        }
    }

    pub fn alphabet(&self) -> &[String] {
        match self {
            FunctorKind::Lmc { alphabet } | FunctorKind::Dfa { alphabet } => alphabet,
            _ => &[],
        }
    }

    /// Ranked symbols for term-shaped kinds. A DFA is a signature with the
    /// two symbols `final` and `nonfinal` of arity |A|.
    pub fn term_symbols(&self) -> Vec<(String, usize)> {
        match self {
            FunctorKind::Signature { symbols } => symbols.clone(),
            FunctorKind::Dfa { alphabet } => vec![
                ("final".to_string(), alphabet.len()),
                ("nonfinal".to_string(), alphabet.len()),
            ],
            _ => Vec::new(),
        }
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.term_symbols().iter().position(|(s, _)| s == name)
    }

    pub fn is_term(&self) -> bool {
        matches!(self, FunctorKind::Signature { .. } | FunctorKind::Dfa { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            FunctorKind::Powerset => json!({"kind": "powerset"}),
            FunctorKind::MonoidValued(m) => json!({"kind": "monoid", "monoid": m.name()}),
            FunctorKind::Dist => json!({"kind": "dist"}),
            FunctorKind::Lmc { alphabet } => json!({"kind": "lmc", "alphabet": alphabet}),
            FunctorKind::Dfa { alphabet } => json!({"kind": "dfa", "alphabet": alphabet}),
            FunctorKind::Signature { symbols } => {
                let mut map = serde_json::Map::new();
                for (s, a) in symbols {
                    map.insert(s.clone(), json!(a));
                }
                json!({"kind": "signature", "symbols": map})
            }
        }
    }
}

/// Index of the `final` symbol in a DFA's derived signature.
pub const DFA_FINAL: usize = 0;
/// Index of the `nonfinal` symbol in a DFA's derived signature.
pub const DFA_NONFINAL: usize = 1;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellativity_flags() {
        assert!(!FunctorKind::Powerset.cancellative());
        assert!(!FunctorKind::MonoidValued(Monoid::BoolOr).cancellative());
        assert!(FunctorKind::MonoidValued(Monoid::IntAdd).cancellative());
        assert!(FunctorKind::MonoidValued(Monoid::RationalAdd).cancellative());
        assert!(FunctorKind::Dist.cancellative());
        assert!(FunctorKind::Lmc { alphabet: vec!["a".into()] }.cancellative());
        assert!(FunctorKind::Dfa { alphabet: vec!["a".into()] }.cancellative());
        assert!(FunctorKind::signature([("f", 2)]).cancellative());
    }

    #[test]
    fn dfa_symbols() {
        let k = FunctorKind::Dfa { alphabet: vec!["a".into(), "b".into()] };
        assert_eq!(k.term_symbols()[DFA_FINAL], ("final".to_string(), 2));
        assert_eq!(k.symbol_index("nonfinal"), Some(DFA_NONFINAL));
    }

    #[test]
    fn signature_symbols_sorted() {
        let k = FunctorKind::signature([("g", 1), ("c", 0), ("f", 2)]);
        let names: Vec<_> = k.term_symbols().into_iter().map(|s| s.0).collect();
        assert_eq!(names, ["c", "f", "g"]);
    }
}
