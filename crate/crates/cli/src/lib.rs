//! Command implementations behind the `coalcert` binary.
//!
//! Every command returns its stdout text, warnings for stderr and an exit
//! code, so tests can drive it without spawning a process.

use std::fmt::Write as _;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use coalcert::certlogic::{
    attach_certificates, distinguish, node_bound, render_text, serialize_dag, CertMap, Distinction, EdgeRef,
    FormulaDag,
};
use coalcert::fixtures::{self, RandomKind};
use coalcert::model::{parse_coalgebra, Coalgebra, Row, StateId};
use coalcert::partition::{run, Mode, Outcome, Partition, SplitMode};
use coalcert::semantics::{check_certificates, eval_formula};
use coalcert::translate::{self, eval_domain, parse_domain_formula, render_domain, Formula};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SELF_CHECK: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "coalcert", version, about = "Coalgebraic minimization with certificates")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Splitting discipline; auto picks cancellative where the kind allows it.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Logic for printed formulae.
    #[arg(long, global = true, value_enum, default_value_t = Logic::Generic)]
    pub logic: Logic,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Shorter compound certificates (default).
    #[arg(long, global = true, overrides_with = "no_simplify")]
    pub simplify: bool,
    /// Negate whole block certificates in compound certificates.
    #[arg(long, global = true, overrides_with = "simplify")]
    pub no_simplify: bool,
    /// Seed for `gen random` when no seed argument is given.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Domain formulae with a larger tree size are not rendered.
    #[arg(long, global = true, default_value_t = translate::TREE_SIZE_WARNING)]
    pub max_tree: u64,
}

impl Options {
    pub fn simplify(&self) -> bool {
        !self.no_simplify
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Auto,
    General,
    Cancellative,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    Generic,
    Domain,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Print the blocks of behavioural equivalence.
    Minimize { input: String },
    /// Print a certificate for every block.
    Certificates { input: String },
    /// Print a formula that holds at X and fails at Y.
    Distinguish { input: String, x: String, y: String },
    /// Evaluate a domain formula, at the listed states or everywhere.
    Check { input: String, formula: String, states: Vec<String> },
    /// Emit a fixture: fig1 | fig2 | threetower K | layers K | random KIND N DENSITY [SEED].
    Gen { fixture: String, params: Vec<String> },
    /// Run statistics: sizes, work counters and DAG measures.
    Stats { input: String },
}

/// Result of one invocation.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Config(String),
    SelfCheck(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Config(_) => EXIT_CONFIG,
            Failure::SelfCheck(_) => EXIT_SELF_CHECK,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Config(m) | Failure::SelfCheck(m) => m,
        }
    }
}

struct Ctx<'a> {
    opts: &'a Options,
    out: String,
    err: String,
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Output {
    let mut ctx = Ctx { opts: &cli.opts, out: String::new(), err: String::new() };
    let result = match &cli.command {
        Command::Minimize { input } => load(input, stdin).and_then(|c| minimize(&mut ctx, &c)),
        Command::Certificates { input } => load(input, stdin).and_then(|c| certificates(&mut ctx, &c)),
        Command::Distinguish { input, x, y } => load(input, stdin).and_then(|c| distinguish_cmd(&mut ctx, &c, x, y)),
        Command::Check { input, formula, states } => {
            load(input, stdin).and_then(|c| check(&mut ctx, &c, formula, states))
        }
        Command::Gen { fixture, params } => gen(&mut ctx, fixture, params),
        Command::Stats { input } => load(input, stdin).and_then(|c| stats(&mut ctx, &c)),
    };
    let code = match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(ctx.err, "error: {}", f.message());
            f.code()
        }
    };
    Output { code, stdout: ctx.out, stderr: ctx.err }
}

fn load(input: &str, stdin: &mut dyn Read) -> Result<Coalgebra, Failure> {
    let mut text = String::new();
    if input == "-" {
        stdin.read_to_string(&mut text).map_err(|e| Failure::Config(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(input).map_err(|e| Failure::Config(format!("reading {input}: {e}")))?;
    }
    parse_coalgebra(&text).map_err(|e| Failure::Parse(e.to_string()))
}

fn split_mode(ctx: &Ctx, c: &Coalgebra) -> Result<SplitMode, Failure> {
    let mode = match ctx.opts.mode {
        ModeArg::Auto => Mode::Auto,
        ModeArg::General => Mode::General,
        ModeArg::Cancellative => Mode::Cancellative,
    };
    mode.resolve(c).map_err(|e| Failure::Config(e.to_string()))
}

fn refine(ctx: &Ctx, c: &Coalgebra) -> Result<(SplitMode, Outcome), Failure> {
    let mode = split_mode(ctx, c)?;
    let flag = match mode {
        SplitMode::General => Mode::General,
        SplitMode::Cancellative => Mode::Cancellative,
    };
    let out = run(c, flag).map_err(|e| Failure::Config(e.to_string()))?;
    Ok((mode, out))
}

/// Runs refinement and certificate construction, and checks the result.
fn certify(ctx: &Ctx, c: &Coalgebra) -> Result<(SplitMode, Outcome, FormulaDag, CertMap), Failure> {
    let (mode, out) = refine(ctx, c)?;
    let (dag, map) = attach_certificates(c, &out.trace, mode, ctx.opts.simplify())
        .map_err(|e| Failure::SelfCheck(e.to_string()))?;
    let report = check_certificates(c, &out.partition, &dag, &map);
    if !report.passed() {
        return Err(Failure::SelfCheck(format!("certificate self-check failed: {}", report.to_json(c))));
    }
    Ok((mode, out, dag, map))
}

fn names(c: &Coalgebra, xs: &[StateId]) -> Vec<String> {
    xs.iter().map(|&x| c.name(x).to_string()).collect()
}

fn braces(c: &Coalgebra, xs: &[StateId]) -> String {
    format!("{{{}}}", names(c, xs).join(", "))
}

fn state(c: &Coalgebra, name: &str) -> Result<StateId, Failure> {
    c.state(name).ok_or_else(|| Failure::Config(format!("unknown state {name:?}")))
}

fn json_line(ctx: &mut Ctx, v: &Value) {
    let _ = writeln!(ctx.out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

fn truncate(s: &str, max: usize) -> String {
    let one_line = s.lines().last().unwrap_or("");
    if one_line.chars().count() <= max {
        one_line.to_string()
    } else {
        format!("{}...", one_line.chars().take(max).collect::<String>())
    }
}

/// The quotient system: one node per block, edges from a representative.
fn quotient_dot(c: &Coalgebra, p: &Partition, labels: Option<&[String]>) -> String {
    let mut s = String::from("digraph quotient {\n  node [shape=box];\n");
    for (i, b) in p.blocks().iter().enumerate() {
        let mut label = braces(c, b);
        if let Some(l) = labels {
            label = format!("{label}\n{}", l[i]);
        }
        let _ = writeln!(s, "  b{i} [label=\"{}\"];", dot_escape(&label));
    }
    for (i, b) in p.blocks().iter().enumerate() {
        let rep = b[0];
        let mut edges: Vec<(usize, String)> = Vec::new();
        match c.row(rep) {
            Row::Set(succ) => {
                for &y in succ {
                    edges.push((p.block_index(y), String::new()));
                }
            }
            Row::Weighted(succ) => {
                let mut sums: Vec<(usize, coalcert::model::Weight)> = Vec::new();
                for (y, w) in succ {
                    let j = p.block_index(*y);
                    match sums.iter_mut().find(|(k, _)| *k == j) {
                        Some((_, acc)) => acc.add_assign(w),
                        None => sums.push((j, w.clone())),
                    }
                }
                edges.extend(sums.into_iter().filter(|(_, w)| !w.is_zero()).map(|(j, w)| (j, w.to_string())));
            }
            Row::Labelled(per_label) => {
                for (a, row) in c.kind().alphabet().iter().zip(per_label) {
                    for (y, q) in row.iter().flatten() {
                        edges.push((p.block_index(*y), format!("{a} {}", coalcert::model::rational_string(q))));
                    }
                }
            }
            Row::Term { args, .. } => {
                for (k, &y) in args.iter().enumerate() {
                    edges.push((p.block_index(y), (k + 1).to_string()));
                }
            }
        }
        edges.sort();
        edges.dedup();
        for (j, label) in edges {
            if label.is_empty() {
                let _ = writeln!(s, "  b{i} -> b{j};");
            } else {
                let _ = writeln!(s, "  b{i} -> b{j} [label=\"{}\"];", dot_escape(&label));
            }
        }
    }
    s.push_str("}\n");
    s
}

fn minimize(ctx: &mut Ctx, c: &Coalgebra) -> Result<(), Failure> {
    let (mode, out) = refine(ctx, c)?;
    match ctx.opts.format {
        Format::Text => {
            let _ = writeln!(ctx.out, "{} blocks", out.partition.len());
            for b in out.partition.blocks() {
                let _ = writeln!(ctx.out, "{}", braces(c, b));
            }
        }
        Format::Json => {
            let v = json!({"mode": mode.name(), "blocks": out.partition.to_json(c)});
            json_line(ctx, &v);
        }
        Format::Dot => ctx.out.push_str(&quotient_dot(c, &out.partition, None)),
    }
    Ok(())
}

/// Translates `root`, warning when the tree is too large to print.
fn domain_formula(ctx: &mut Ctx, c: &Coalgebra, dag: &FormulaDag, root: EdgeRef) -> (Formula, BigUint) {
    let f = translate::translate(dag, root, c.kind());
    let size = translate::tree_size(&f);
    if size > BigUint::from(ctx.opts.max_tree) {
        let _ = writeln!(ctx.err, "warning: domain formula has tree size {size}, above {}", ctx.opts.max_tree);
    }
    (f, size)
}

fn renderable(ctx: &Ctx, size: &BigUint) -> bool {
    size <= &BigUint::from(ctx.opts.max_tree)
}

fn certificates(ctx: &mut Ctx, c: &Coalgebra) -> Result<(), Failure> {
    let (mode, out, dag, map) = certify(ctx, c)?;
    let blocks = out.partition.blocks();
    let mut rendered = Vec::with_capacity(blocks.len());
    for b in blocks {
        let root = map.certificate(b[0]);
        match ctx.opts.logic {
            Logic::Generic => {
                rendered.push((render_text(&dag, root, c.kind()).map_err(|e| Failure::SelfCheck(e.to_string()))?, None))
            }
            Logic::Domain => {
                let (f, size) = domain_formula(ctx, c, &dag, root);
                let ext = eval_domain(c, &f).map_err(|e| Failure::SelfCheck(e.to_string()))?;
                if &ext.to_vec() != b {
                    return Err(Failure::SelfCheck(format!(
                        "translated certificate of {} holds at {}",
                        braces(c, b),
                        braces(c, &ext.to_vec())
                    )));
                }
                let text = if renderable(ctx, &size) {
                    render_domain(&f)
                } else {
                    format!("(tree size {size}, not rendered)")
                };
                rendered.push((text, Some((f, size))));
            }
        }
    }
    match ctx.opts.format {
        Format::Text => {
            for (b, (text, _)) in blocks.iter().zip(&rendered) {
                let _ = writeln!(ctx.out, "{}:", braces(c, b));
                for line in text.lines() {
                    let _ = writeln!(ctx.out, "  {line}");
                }
            }
        }
        Format::Json => {
            let v = match ctx.opts.logic {
                Logic::Generic => {
                    let roots: Vec<(String, EdgeRef)> =
                        (0..c.len()).map(|x| (c.name(x).to_string(), map.certificate(x))).collect();
                    let dag_json =
                        serialize_dag(&dag, &roots, c.kind()).map_err(|e| Failure::SelfCheck(e.to_string()))?;
                    let bl: Vec<Value> = blocks
                        .iter()
                        .map(|b| {
                            let r = map.certificate(b[0]);
                            json!({"states": names(c, b), "certificate": {"node": r.node, "neg": r.neg}})
                        })
                        .collect();
                    json!({"mode": mode.name(), "blocks": bl, "dag": dag_json})
                }
                Logic::Domain => {
                    let bl: Vec<Value> = blocks
                        .iter()
                        .zip(&rendered)
                        .map(|(b, (_, f))| {
                            let (f, size) = f.as_ref().expect("domain formula");
                            let formula =
                                if renderable(ctx, size) { translate::domain_to_json(f) } else { Value::Null };
                            json!({"states": names(c, b), "treeSize": size.to_string(), "formula": formula})
                        })
                        .collect();
                    json!({"mode": mode.name(), "blocks": bl})
                }
            };
            json_line(ctx, &v);
        }
        Format::Dot => {
            let labels: Vec<String> = rendered.iter().map(|(t, _)| truncate(t, 40)).collect();
            ctx.out.push_str(&quotient_dot(c, &out.partition, Some(&labels)));
        }
    }
    Ok(())
}

fn distinguish_cmd(ctx: &mut Ctx, c: &Coalgebra, xn: &str, yn: &str) -> Result<(), Failure> {
    let x = state(c, xn)?;
    let y = state(c, yn)?;
    let (_, _, dag, map) = certify(ctx, c)?;
    let d = distinguish(x, y, &map, &dag).map_err(|e| Failure::SelfCheck(e.to_string()))?;
    let e = match d {
        Distinction::Equivalent => {
            match ctx.opts.format {
                Format::Json => json_line(ctx, &json!({"x": xn, "y": yn, "equivalent": true})),
                _ => ctx.out.push_str("equivalent\n"),
            }
            return Ok(());
        }
        Distinction::Formula(e) => e,
    };
    let (text, json_formula, holds) = match ctx.opts.logic {
        Logic::Generic => {
            let text = render_text(&dag, e, c.kind()).map_err(|err| Failure::SelfCheck(err.to_string()))?;
            let roots = [("formula".to_string(), e)];
            let v = serialize_dag(&dag, &roots, c.kind()).map_err(|err| Failure::SelfCheck(err.to_string()))?;
            (text, v, eval_formula(c, &dag, e))
        }
        Logic::Domain => {
            let (f, size) = domain_formula(ctx, c, &dag, e);
            let holds = eval_domain(c, &f).map_err(|err| Failure::SelfCheck(err.to_string()))?;
            if renderable(ctx, &size) {
                (render_domain(&f), translate::domain_to_json(&f), holds)
            } else {
                (format!("(tree size {size}, not rendered)"), Value::Null, holds)
            }
        }
    };
    let (at_x, at_y) = (holds.contains(x), holds.contains(y));
    if !at_x || at_y {
        return Err(Failure::SelfCheck(format!("distinguishing formula evaluates to {xn}: {at_x}, {yn}: {at_y}")));
    }
    match ctx.opts.format {
        Format::Json => {
            let v = json!({"x": xn, "y": yn, "equivalent": false, "formula": json_formula,
                "holds": {xn: at_x, yn: at_y}});
            json_line(ctx, &v);
        }
        _ => {
            let _ = writeln!(ctx.out, "{text}");
            let _ = writeln!(ctx.out, "{xn}: {at_x}, {yn}: {at_y}");
        }
    }
    Ok(())
}

fn check(ctx: &mut Ctx, c: &Coalgebra, formula: &str, states: &[String]) -> Result<(), Failure> {
    let f = parse_domain_formula(formula, c.kind()).map_err(|e| Failure::Parse(e.to_string()))?;
    let ext = eval_domain(c, &f).map_err(|e| Failure::Parse(e.to_string()))?;
    let ids = states.iter().map(|s| state(c, s)).collect::<Result<Vec<_>, _>>()?;
    match ctx.opts.format {
        Format::Json => {
            let v = if ids.is_empty() {
                json!({"extension": ext.names(c)})
            } else {
                let mut m = serde_json::Map::new();
                for (name, &x) in states.iter().zip(&ids) {
                    m.insert(name.clone(), Value::Bool(ext.contains(x)));
                }
                Value::Object(m)
            };
            json_line(ctx, &v);
        }
        _ => {
            if ids.is_empty() {
                let _ = writeln!(ctx.out, "{{{}}}", ext.names(c).join(", "));
            } else {
                let parts: Vec<String> =
                    states.iter().zip(&ids).map(|(name, &x)| format!("{name}: {}", ext.contains(x))).collect();
                let _ = writeln!(ctx.out, "{}", parts.join(", "));
            }
        }
    }
    Ok(())
}

fn param<T: std::str::FromStr>(params: &[String], i: usize, what: &str) -> Result<T, Failure> {
    let s = params.get(i).ok_or_else(|| Failure::Config(format!("missing parameter {what}")))?;
    s.parse().map_err(|_| Failure::Config(format!("invalid {what}: {s:?}")))
}

fn expect_params(params: &[String], n: usize, usage: &str) -> Result<(), Failure> {
    if params.len() > n {
        return Err(Failure::Config(format!("too many parameters; usage: {usage}")));
    }
    Ok(())
}

fn gen(ctx: &mut Ctx, fixture: &str, params: &[String]) -> Result<(), Failure> {
    let c = match fixture {
        "fig1" => {
            expect_params(params, 0, "gen fig1")?;
            fixtures::fig1()
        }
        "fig2" => {
            expect_params(params, 0, "gen fig2")?;
            fixtures::fig2()
        }
        "threetower" => {
            expect_params(params, 1, "gen threetower K")?;
            fixtures::three_tower(param(params, 0, "layer count K")?)
        }
        "layers" => {
            expect_params(params, 1, "gen layers K")?;
            fixtures::layers(param(params, 0, "layer count K")?)
        }
        "random" => {
            expect_params(params, 4, "gen random KIND N DENSITY [SEED]")?;
            let kind_name: String = param(params, 0, "kind")?;
            let kind = RandomKind::from_name(&kind_name).ok_or_else(|| {
                let known: Vec<&str> = RandomKind::ALL.iter().map(|k| k.name()).collect();
                Failure::Config(format!("unknown kind {kind_name:?}; expected one of {}", known.join(", ")))
            })?;
            let n: usize = param(params, 1, "state count N")?;
            let density: f64 = param(params, 2, "density")?;
            if !(0.0..=1.0).contains(&density) {
                return Err(Failure::Config(format!("density {density} is outside [0, 1]")));
            }
            let seed = if params.len() > 3 { param(params, 3, "seed")? } else { ctx.opts.seed };
            fixtures::random(kind, n, density, seed)
        }
        other => return Err(Failure::Config(format!("unknown fixture {other:?}"))),
    };
    json_line(ctx, &c.to_json());
    Ok(())
}

fn stats(ctx: &mut Ctx, c: &Coalgebra) -> Result<(), Failure> {
    let (mode, out, dag, _) = certify(ctx, c)?;
    let st = dag.stats();
    let n = c.len();
    let m = c.count_transitions();
    let hits = out.stats.splitter_hits.iter().copied().max().unwrap_or(0);
    let hit_limit = if n == 0 { 0 } else { (n as f64).log2().floor() as u64 + 1 };
    let v = json!({
        "kind": c.kind().tag(),
        "mode": mode.name(),
        "states": n,
        "transitions": m,
        "blocks": out.partition.len(),
        "iterations": out.stats.iterations,
        "touched": out.stats.touched,
        "maxSplitterHits": hits,
        "splitterHitLimit": hit_limit,
        "dagNodes": st.node_count,
        "dagHeight": st.height,
        "dagDepth": st.depth,
        "nodeBound": node_bound(n, m),
        "simplify": ctx.opts.simplify(),
    });
    match ctx.opts.format {
        Format::Json => json_line(ctx, &v),
        _ => {
            for (k, val) in v.as_object().expect("object") {
                let _ = writeln!(ctx.out, "{k}: {}", val.as_str().map(str::to_string).unwrap_or_else(|| val.to_string()));
            }
        }
    }
    Ok(())
}
