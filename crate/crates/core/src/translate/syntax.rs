//! Text and JSON forms of domain formulae.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or    := and ('\/' and)*
//! and   := unary ('/\' unary)*
//! unary := 'T' | '~' unary | '(' or ')' | '<>' unary | '<' m '>' unary
//!        | '<' a '>=' p unary | 'sym(' name ')' | 'pos{' i,... '}' unary
//! ```

use std::rc::Rc;

use num_rational::BigRational;
use serde_json::{json, Value};

use super::{DomainFormula, Formula, TranslateError};
use crate::model::{is_probability, parse_rational, rational_string, FunctorKind, Weight};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    kind: &'a FunctorKind,
}

fn is_word(c: char) -> bool {
    !c.is_whitespace() && !"<>()~{}/\\,".contains(c)
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, TranslateError> {
        Err(TranslateError::Syntax { pos: self.pos, message: message.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), TranslateError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    /// Maximal run of characters satisfying `ok`, without skipping space.
    fn take_while(&mut self, ok: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let end = rest.find(|c: char| !ok(c)).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn mismatch<T>(&self, modality: impl Into<String>) -> Result<T, TranslateError> {
        Err(TranslateError::KindMismatch { modality: modality.into(), kind: self.kind.tag() })
    }

    fn or(&mut self) -> Result<Formula, TranslateError> {
        let mut parts = vec![self.and()?];
        while self.eat("\\/") {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { Rc::new(DomainFormula::Or(parts)) })
    }

    fn and(&mut self) -> Result<Formula, TranslateError> {
        let mut parts = vec![self.unary()?];
        while self.eat("/\\") {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { Rc::new(DomainFormula::And(parts)) })
    }

    fn unary(&mut self) -> Result<Formula, TranslateError> {
        self.skip_ws();
        let start = self.pos;
        if self.eat("~") {
            return Ok(Rc::new(DomainFormula::Not(self.unary()?)));
        }
        if self.eat("(") {
            let f = self.or()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("<>") {
            if *self.kind != FunctorKind::Powerset {
                self.pos = start;
                return self.mismatch("<>");
            }
            return Ok(Rc::new(DomainFormula::Diamond(self.unary()?)));
        }
        if self.eat("<") {
            let inner = self.take_while(|c| !c.is_whitespace() && !"<>()".contains(c));
            if inner.is_empty() {
                return self.err("expected a weight or label after `<`");
            }
            self.expect(">")?;
            if self.rest().starts_with('=') {
                self.pos += 1;
                let lit_pos = self.pos;
                let lit = self.take_while(|c| c.is_ascii_digit() || c == '/' || c == '-');
                let Some(p) = parse_rational(lit).filter(is_probability) else {
                    self.pos = lit_pos;
                    return self.err(format!("expected a probability, found `{lit}`"));
                };
                if !matches!(self.kind, FunctorKind::Lmc { .. }) {
                    self.pos = start;
                    return self.mismatch(format!("<{inner}>="));
                }
                if !self.kind.alphabet().iter().any(|a| a == inner) {
                    self.pos = start + 1;
                    return self.err(format!("unknown label `{inner}`"));
                }
                return Ok(Rc::new(DomainFormula::ProbAtLeast(inner.to_string(), p, self.unary()?)));
            }
            let monoid = match self.kind {
                FunctorKind::MonoidValued(_) | FunctorKind::Dist => self.kind.monoid().expect("weighted"),
                _ => {
                    self.pos = start;
                    return self.mismatch(format!("<{inner}>"));
                }
            };
            let Some(w) = monoid.parse_literal(inner) else {
                self.pos = start + 1;
                return self.err(format!("`{inner}` is not a {} weight", monoid.name()));
            };
            return Ok(Rc::new(DomainFormula::Grade(w, self.unary()?)));
        }
        if self.eat("sym(") {
            self.skip_ws();
            let name_pos = self.pos;
            let name = self.take_while(is_word);
            self.expect(")")?;
            if !self.kind.is_term() {
                self.pos = start;
                return self.mismatch("sym");
            }
            if self.kind.symbol_index(name).is_none() {
                self.pos = name_pos;
                return self.err(format!("unknown symbol `{name}`"));
            }
            return Ok(Rc::new(DomainFormula::Sym(name.to_string())));
        }
        if self.eat("pos{") {
            let mut set = Vec::new();
            self.skip_ws();
            if !self.eat("}") {
                loop {
                    self.skip_ws();
                    let num_pos = self.pos;
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    match digits.parse::<usize>() {
                        Ok(i) if i >= 1 => set.push(i),
                        _ => {
                            self.pos = num_pos;
                            return self.err("expected a position (1, 2, ...)");
                        }
                    }
                    if self.eat("}") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            if !self.kind.is_term() {
                self.pos = start;
                return self.mismatch("pos");
            }
            set.sort_unstable();
            set.dedup();
            return Ok(Rc::new(DomainFormula::Pos(set, self.unary()?)));
        }
        if self.rest().starts_with('T') && !self.rest()[1..].starts_with(is_word) {
            self.pos += 1;
            return Ok(Rc::new(DomainFormula::True));
        }
        if self.rest().is_empty() {
            self.err("unexpected end of formula")
        } else {
            self.err("expected a formula")
        }
    }
}

/// Parses formula text for systems of the given kind.
pub fn parse_domain_formula(text: &str, kind: &FunctorKind) -> Result<Formula, TranslateError> {
    let mut p = Parser { src: text, pos: 0, kind };
    let f = p.or()?;
    p.skip_ws();
    if !p.rest().is_empty() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    OrArg,
    AndArg,
    Unary,
}

fn render(f: &DomainFormula, ctx: Ctx, out: &mut String) {
    match f {
        DomainFormula::True => out.push('T'),
        DomainFormula::Not(g) => {
            out.push('~');
            render(g, Ctx::Unary, out);
        }
        DomainFormula::And(gs) => {
            let wrap = matches!(ctx, Ctx::AndArg | Ctx::Unary);
            if wrap {
                out.push('(');
            }
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" /\\ ");
                }
                render(g, Ctx::AndArg, out);
            }
            if wrap {
                out.push(')');
            }
        }
        DomainFormula::Or(gs) => {
            let wrap = ctx != Ctx::Top;
            if wrap {
                out.push('(');
            }
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" \\/ ");
                }
                render(g, Ctx::OrArg, out);
            }
            if wrap {
                out.push(')');
            }
        }
        DomainFormula::Diamond(g) => {
            out.push_str("<> ");
            render(g, Ctx::Unary, out);
        }
        DomainFormula::Grade(m, g) => {
            out.push_str(&format!("<{m}> "));
            render(g, Ctx::Unary, out);
        }
        DomainFormula::Sym(s) => out.push_str(&format!("sym({s})")),
        DomainFormula::Pos(set, g) => {
            let items: Vec<String> = set.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!("pos{{{}}} ", items.join(",")));
            render(g, Ctx::Unary, out);
        }
        DomainFormula::ProbAtLeast(a, p, g) => {
            out.push_str(&format!("<{a}>={} ", rational_string(p)));
            render(g, Ctx::Unary, out);
        }
    }
}

/// Text form accepted back by [`parse_domain_formula`].
pub fn render_domain(f: &DomainFormula) -> String {
    let mut out = String::new();
    render(f, Ctx::Top, &mut out);
    out
}

pub fn domain_to_json(f: &DomainFormula) -> Value {
    let arg = |g: &Formula| domain_to_json(g);
    match f {
        DomainFormula::True => json!({"op": "true"}),
        DomainFormula::Not(g) => json!({"op": "not", "arg": arg(g)}),
        DomainFormula::And(gs) => json!({"op": "and", "args": gs.iter().map(arg).collect::<Vec<_>>()}),
        DomainFormula::Or(gs) => json!({"op": "or", "args": gs.iter().map(arg).collect::<Vec<_>>()}),
        DomainFormula::Diamond(g) => json!({"op": "diamond", "arg": arg(g)}),
        DomainFormula::Grade(m, g) => json!({"op": "grade", "weight": m.to_json(), "arg": arg(g)}),
        DomainFormula::Sym(s) => json!({"op": "sym", "symbol": s}),
        DomainFormula::Pos(set, g) => json!({"op": "pos", "positions": set, "arg": arg(g)}),
        DomainFormula::ProbAtLeast(a, p, g) => {
            json!({"op": "prob", "label": a, "p": rational_string(p), "arg": arg(g)})
        }
    }
}

/// Inverse of [`domain_to_json`], checked against the kind like the parser.
pub fn domain_from_json(v: &Value, kind: &FunctorKind) -> Result<Formula, TranslateError> {
    let bad = |m: &str| TranslateError::Json(m.to_string());
    let arg = |v: &Value| -> Result<Formula, TranslateError> {
        domain_from_json(v.get("arg").ok_or_else(|| bad("missing arg"))?, kind)
    };
    let args = |v: &Value| -> Result<Vec<Formula>, TranslateError> {
        v.get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing args"))?
            .iter()
            .map(|a| domain_from_json(a, kind))
            .collect()
    };
    let mismatch = |m: &str| TranslateError::KindMismatch { modality: m.to_string(), kind: kind.tag() };
    let op = v.get("op").and_then(Value::as_str).ok_or_else(|| bad("missing op"))?;
    let f = match op {
        "true" => DomainFormula::True,
        "not" => DomainFormula::Not(arg(v)?),
        "and" => DomainFormula::And(args(v)?),
        "or" => DomainFormula::Or(args(v)?),
        "diamond" => {
            if *kind != FunctorKind::Powerset {
                return Err(mismatch("<>"));
            }
            DomainFormula::Diamond(arg(v)?)
        }
        "grade" => {
            let monoid = match kind {
                FunctorKind::MonoidValued(_) | FunctorKind::Dist => kind.monoid().expect("weighted"),
                _ => return Err(mismatch("<m>")),
            };
            let w = v.get("weight").and_then(|w| Weight::from_json(w, monoid)).ok_or_else(|| bad("bad weight"))?;
            DomainFormula::Grade(w, arg(v)?)
        }
        "sym" => {
            let s = v.get("symbol").and_then(Value::as_str).ok_or_else(|| bad("missing symbol"))?;
            if !kind.is_term() {
                return Err(mismatch("sym"));
            }
            if kind.symbol_index(s).is_none() {
                return Err(bad(&format!("unknown symbol {s}")));
            }
            DomainFormula::Sym(s.to_string())
        }
        "pos" => {
            if !kind.is_term() {
                return Err(mismatch("pos"));
            }
            let set = v
                .get("positions")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing positions"))?
                .iter()
                .map(|i| i.as_u64().filter(|&i| i >= 1).map(|i| i as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("positions are integers >= 1"))?;
            DomainFormula::Pos(set, arg(v)?)
        }
        "prob" => {
            if !matches!(kind, FunctorKind::Lmc { .. }) {
                return Err(mismatch("<a>=p"));
            }
            let a = v.get("label").and_then(Value::as_str).ok_or_else(|| bad("missing label"))?;
            if !kind.alphabet().iter().any(|l| l == a) {
                return Err(bad(&format!("unknown label {a}")));
            }
            let p: BigRational = v
                .get("p")
                .and_then(Value::as_str)
                .and_then(parse_rational)
                .filter(is_probability)
                .ok_or_else(|| bad("p must be a rational in [0,1]"))?;
            DomainFormula::ProbAtLeast(a.to_string(), p, arg(v)?)
        }
        other => return Err(bad(&format!("unknown op {other}"))),
    };
    Ok(Rc::new(f))
}
