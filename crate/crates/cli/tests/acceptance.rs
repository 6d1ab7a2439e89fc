//! The acceptance suite: each criterion prints one PASS/FAIL line.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coalcert::certlogic::{attach_certificates, node_bound, EdgeRef, FormulaDag};
use coalcert::fixtures::{self, corpus_instance, RandomKind};
use coalcert::model::{Coalgebra, Key};
use coalcert::partition::{run, Mode, SplitMode};
use coalcert::semantics::{check_certificates, eval_formula, naive_partition};
use coalcert::translate::{self, and, diamond, eval_domain, not, parse_domain_formula, Formula};
use common::{coalcert, fixture};

const CORPUS_PER_KIND: u64 = 500;

struct Verdict {
    ok: bool,
    detail: String,
}

impl Verdict {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Verdict { ok, detail: detail.into() }
    }
}

/// Written past the test harness capture so the lines always show up.
fn report(id: usize, name: &str, v: &Verdict, elapsed: Duration) {
    let status = if v.ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id:>2} [{status}] {name}: {} ({:.2}s)", v.detail, elapsed.as_secs_f64());
}

fn modes(c: &Coalgebra) -> Vec<SplitMode> {
    if c.kind().cancellative() {
        vec![SplitMode::General, SplitMode::Cancellative]
    } else {
        vec![SplitMode::General]
    }
}

fn flag(m: SplitMode) -> Mode {
    match m {
        SplitMode::General => Mode::General,
        SplitMode::Cancellative => Mode::Cancellative,
    }
}

/// Findings of one sweep over the corpus, shared by several criteria.
#[derive(Default)]
struct CorpusSweep {
    instances: usize,
    max_n: usize,
    max_m: usize,
    oracle_mismatches: Vec<String>,
    cert_failures: Vec<String>,
    bound_failures: Vec<String>,
    syntax_failures: Vec<String>,
    hit_failures: Vec<String>,
    translation_runs: usize,
    translation_failures: Vec<String>,
    oracle_time: Duration,
}

fn sweep_corpus() -> CorpusSweep {
    let mut s = CorpusSweep::default();
    for kind in RandomKind::ALL {
        for i in 0..CORPUS_PER_KIND {
            let c = corpus_instance(kind, i);
            let tag = format!("{} #{i}", kind.name());
            let (n, m) = (c.len(), c.count_transitions());
            s.instances += 1;
            s.max_n = s.max_n.max(n);
            s.max_m = s.max_m.max(m);
            let t = Instant::now();
            let oracle = naive_partition(&c);
            let mut partitions = Vec::new();
            for mode in modes(&c) {
                let out = run(&c, flag(mode)).unwrap();
                if out.partition != oracle {
                    s.oracle_mismatches.push(format!("{tag} {}", mode.name()));
                }
                partitions.push(out.partition.clone());
                let limit = if n == 0 { 0 } else { (n as f64).log2().floor() as u32 + 1 };
                if out.stats.splitter_hits.iter().any(|&h| h > limit) {
                    s.hit_failures.push(format!("{tag} {}", mode.name()));
                }
                for simplify in [false, true] {
                    let (dag, map) = attach_certificates(&c, &out.trace, mode, simplify).unwrap();
                    let r = check_certificates(&c, &out.partition, &dag, &map);
                    if !r.passed() || !r.contract_violations.is_empty() {
                        s.cert_failures.push(format!("{tag} {} simplify={simplify}", mode.name()));
                    }
                    if !simplify {
                        let st = dag.stats();
                        if st.node_count as f64 > node_bound(n, m) || st.height > n + 1 {
                            s.bound_failures.push(format!("{tag} {} nodes={} height={}", mode.name(), st.node_count, st.height));
                        }
                    }
                    if mode == SplitMode::Cancellative && (dag.has_negation() || dag.count("mod3") > 0) {
                        s.syntax_failures.push(format!("{tag} simplify={simplify}"));
                    }
                    if n <= 30 {
                        s.translation_runs += 1;
                        for b in out.partition.blocks() {
                            let f = translate::translate(&dag, map.certificate(b[0]), c.kind());
                            if &eval_domain(&c, &f).unwrap().to_vec() != b {
                                s.translation_failures.push(format!("{tag} {} simplify={simplify}", mode.name()));
                            }
                        }
                    }
                }
            }
            if partitions.windows(2).any(|w| w[0] != w[1]) {
                s.oracle_mismatches.push(format!("{tag} modes disagree"));
            }
            s.oracle_time += t.elapsed();
        }
    }
    s
}

fn summary(failures: &[String]) -> String {
    match failures.first() {
        None => String::new(),
        Some(f) => format!("; {} failures, first: {f}", failures.len()),
    }
}

fn criterion_3() -> Verdict {
    let f = fixture("acc-fig1", &["fig1"]);
    let c = fixtures::fig1();
    let d = coalcert(&["distinguish", &f, "x", "y"], None);
    let dist_ok = d.code == 0 && d.stdout.lines().last() == Some("x: true, y: false");
    let dd = coalcert(&["--logic", "domain", "distinguish", &f, "x", "y"], None);
    let domain_ok = dd.code == 0
        && dd.stdout.lines().next().and_then(|l| parse_domain_formula(l, c.kind()).ok()).is_some_and(|phi| {
            let e = eval_domain(&c, &phi).unwrap();
            e.contains(c.state("x").unwrap()) && !e.contains(c.state("y").unwrap())
        });
    let chk = coalcert(&["check", &f, "~<> ~<> T", "x", "y"], None);
    let check_ok = chk.code == 0 && chk.stdout == "x: true, y: false\n";
    Verdict::new(
        dist_ok && domain_ok && check_ok,
        format!(
            "distinguish -> {:?}; domain formula {:?}; check -> {:?}",
            d.stdout.lines().last().unwrap_or(""),
            dd.stdout.lines().next().unwrap_or(""),
            chk.stdout.trim_end()
        ),
    )
}

fn criterion_4() -> Verdict {
    let f = fixture("acc-fig2", &["fig2"]);
    let chk = coalcert(&["check", &f, "<tau>=1/2 <tau>=1 T", "x", "y"], None);
    Verdict::new(chk.code == 0 && chk.stdout == "x: true, y: false\n", format!("check -> {:?}", chk.stdout.trim_end()))
}

fn fixture_bounds() -> Vec<String> {
    let mut systems = vec![("fig1".to_string(), fixtures::fig1()), ("fig2".to_string(), fixtures::fig2())];
    for k in 0..=15 {
        systems.push((format!("threetower {k}"), fixtures::three_tower(k)));
        systems.push((format!("layers {k}"), fixtures::layers(k)));
    }
    let mut failures = Vec::new();
    for (name, c) in systems {
        for mode in modes(&c) {
            let out = run(&c, flag(mode)).unwrap();
            let (dag, _) = attach_certificates(&c, &out.trace, mode, false).unwrap();
            let st = dag.stats();
            if st.node_count as f64 > node_bound(c.len(), c.count_transitions()) || st.height > c.len() + 1 {
                failures.push(format!("{name} {}", mode.name()));
            }
        }
    }
    failures
}

fn fib(k: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::from(0u32), BigUint::from(1u32));
    for _ in 0..k {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

fn criterion_6() -> Verdict {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut last = String::new();
    for k in 5..=15 {
        let c = fixtures::three_tower(k);
        let out = run(&c, Mode::General).unwrap();
        let (dag, map) = attach_certificates(&c, &out.trace, SplitMode::General, false).unwrap();
        let x = c.state(&format!("x{k}")).unwrap();
        let size = dag.tree_size(map.certificate(x));
        let nodes = dag.stats().node_count;
        let bound = node_bound(c.len(), c.count_transitions());
        if size < fib(k) || nodes as f64 > bound {
            failures.push(format!("k={k} tree={size} fib={} nodes={nodes}", fib(k)));
        }
        last = format!("k=15: tree size {size} >= fib = {}, {nodes} nodes <= {bound:.0}", fib(k));
    }
    let elapsed = t.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(5);
    Verdict::new(ok, format!("{last}{}", summary(&failures)))
}

fn criterion_7() -> Verdict {
    let mut failures = Vec::new();
    let mut last = String::new();
    for k in 5..=15 {
        let c = fixtures::layers(k);
        let out = run(&c, Mode::Cancellative).unwrap();
        let (dag, map) = attach_certificates(&c, &out.trace, SplitMode::Cancellative, false).unwrap();
        let floor = BigUint::from(1u32) << k;
        let nodes = dag.stats().node_count;
        let bound = node_bound(c.len(), c.count_transitions());
        let mut smallest: Option<BigUint> = None;
        for s in ["w", "x", "y", "z"] {
            let x = c.state(&format!("{s}{k}")).unwrap();
            let size = dag.tree_size(map.certificate(x));
            smallest = Some(smallest.map_or(size.clone(), |m: BigUint| m.min(size)));
        }
        let smallest = smallest.unwrap();
        if smallest < floor || nodes as f64 > bound {
            failures.push(format!("k={k} min tree={smallest} nodes={nodes}"));
        }
        last = format!("k=15: smallest layer tree size {smallest} >= 2^15, {nodes} nodes <= {bound:.0}");
    }
    Verdict::new(failures.is_empty(), format!("{last}{}", summary(&failures)))
}

fn criterion_9() -> Verdict {
    const SIZES: std::ops::RangeInclusive<u32> = 10..=14;
    // five independent systems per size
    let systems: Vec<Vec<Coalgebra>> = SIZES
        .map(|e| {
            let n = 1usize << e;
            (0..5u64).map(|seed| fixtures::random_powerset_edges(n, 4 * n, 1000 * e as u64 + seed)).collect()
        })
        .collect();
    let mut samples: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); 5]; systems.len()];
    let mut work: Vec<Vec<u64>> = vec![vec![0; 5]; systems.len()];
    // The machine drifts in speed over seconds, so sizes are interleaved
    // as finely as possible, and small systems are timed in batches that
    // take about as long as one run of the largest.
    let largest = *SIZES.end();
    for _ in 0..5 {
        for j in 0..5 {
            for (i, e) in SIZES.enumerate() {
                let c = &systems[i][j];
                let reps = 1u32 << (largest - e);
                let t = Instant::now();
                for _ in 0..reps {
                    let out = run(c, Mode::General).unwrap();
                    work[i][j] = out.stats.touched;
                }
                samples[i][j].push(t.elapsed().as_secs_f64() / reps as f64);
            }
        }
    }
    let median = |mut v: Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let times: Vec<f64> =
        samples.into_iter().map(|per_system| median(per_system.into_iter().map(median).collect())).collect();
    let touched: Vec<f64> = work.into_iter().map(|w| median(w.into_iter().map(|x| x as f64).collect())).collect();
    let time_ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let touch_ratios: Vec<f64> = touched.windows(2).map(|w| w[1] / w[0]).collect();
    let ok = time_ratios.iter().all(|&r| r <= 2.6) && touch_ratios.iter().all(|&r| r <= 2.3);
    let fmt = |v: &[f64]| v.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ");
    Verdict::new(ok, format!("time ratios [{}], touched ratios [{}]", fmt(&time_ratios), fmt(&touch_ratios)))
}

/// Disjunction of `parts` as a negated conjunction of negations.
fn disjunction(dag: &mut FormulaDag, parts: &[EdgeRef]) -> EdgeRef {
    let mut acc = dag.top();
    for &p in parts {
        acc = dag.conj(acc, p.negate());
    }
    acc.negate()
}

/// ◇ or ¬◇ of each color class, according to the bits of t.
fn pow_expansion(t: u8, delta: &Formula, beta: &Formula) -> Formula {
    let classes = [not(beta.clone()), and([beta.clone(), not(delta.clone())]), and([delta.clone(), beta.clone()])];
    and(classes.into_iter().enumerate().map(|(i, class)| {
        if t & (1 << i) != 0 {
            diamond(class)
        } else {
            not(diamond(class))
        }
    }))
}

fn criterion_11() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for i in 0..300u64 {
        let c = if i % 2 == 0 {
            fixtures::random(RandomKind::Powerset, rng.gen_range(1..=10), rng.gen_range(0.1..0.5), i)
        } else {
            fixtures::random_lifted(RandomKind::Powerset, rng.gen_range(1..=4), 3, i)
        };
        if c.len() > 10 {
            continue;
        }
        let out = run(&c, Mode::General).unwrap();
        let (base, map) = attach_certificates(&c, &out.trace, SplitMode::General, true).unwrap();
        let certs: Vec<EdgeRef> = out.partition.blocks().iter().map(|b| map.certificate(b[0])).collect();
        for _ in 0..4 {
            // δ ⊆ β as unions of blocks
            let mut dag = base.clone();
            let mut in_delta = Vec::new();
            let mut in_beta = Vec::new();
            for &cert in &certs {
                let r: f64 = rng.gen();
                if r < 0.35 {
                    in_delta.push(cert);
                    in_beta.push(cert);
                } else if r < 0.7 {
                    in_beta.push(cert);
                }
            }
            let d = disjunction(&mut dag, &in_delta);
            let b = disjunction(&mut dag, &in_beta);
            let fd = translate::translate(&dag, d, c.kind());
            let fb = translate::translate(&dag, b, c.kind());
            for t in 0u8..8 {
                let m = dag.mod3(Key::Pow(t), d, b);
                let generic = eval_formula(&c, &dag, m);
                let expanded = eval_domain(&c, &pow_expansion(t, &fd, &fb)).unwrap();
                checked += 1;
                if generic != expanded {
                    failures.push(format!("system {i} t={t:03b}"));
                }
            }
        }
    }
    Verdict::new(failures.is_empty(), format!("{checked} (t, δ, β, system) cases{}", summary(&failures)))
}

#[test]
fn acceptance_criteria() {
    let _ = writeln!(std::io::stdout().lock(), "\nacceptance criteria");
    let mut all_ok = true;
    let mut record = |id: usize, name: &str, elapsed: Duration, v: Verdict| {
        report(id, name, &v, elapsed);
        all_ok &= v.ok;
    };

    let t = Instant::now();
    let s = sweep_corpus();
    let sweep_time = t.elapsed();
    let corpus = format!("{} instances, n <= {}, m <= {}", s.instances, s.max_n, s.max_m);
    let shape_ok = s.max_n <= 50 && s.max_m <= 300;
    record(
        1,
        "oracle equivalence",
        s.oracle_time,
        Verdict::new(
            shape_ok && s.oracle_mismatches.is_empty() && s.oracle_time < Duration::from_secs(60),
            format!("{corpus}{}", summary(&s.oracle_mismatches)),
        ),
    );
    record(
        2,
        "certificate soundness",
        sweep_time,
        Verdict::new(s.cert_failures.is_empty(), format!("both modes, simplify on and off{}", summary(&s.cert_failures))),
    );

    let t = Instant::now();
    let v = criterion_3();
    record(3, "fig1 example", t.elapsed(), v);
    let t = Instant::now();
    let v = criterion_4();
    record(4, "fig2 example", t.elapsed(), v);

    let t = Instant::now();
    let mut bound_failures = s.bound_failures.clone();
    bound_failures.extend(fixture_bounds());
    record(
        5,
        "DAG size bound",
        t.elapsed(),
        Verdict::new(bound_failures.is_empty(), format!("corpus and fixtures{}", summary(&bound_failures))),
    );

    let t = Instant::now();
    let v = criterion_6();
    record(6, "Fibonacci lower bound", t.elapsed(), v);
    let t = Instant::now();
    let v = criterion_7();
    record(7, "exponential weighted layers", t.elapsed(), v);

    record(
        8,
        "cancellative syntax",
        sweep_time,
        Verdict::new(s.syntax_failures.is_empty(), format!("no negation, no Mod3{}", summary(&s.syntax_failures))),
    );

    let t = Instant::now();
    let v = criterion_9();
    record(9, "quasilinear scaling", t.elapsed(), v);

    record(
        10,
        "translation soundness",
        sweep_time,
        Verdict::new(
            s.translation_runs > 0 && s.translation_failures.is_empty(),
            format!("{} runs with n <= 30{}", s.translation_runs, summary(&s.translation_failures)),
        ),
    );

    let t = Instant::now();
    let v = criterion_11();
    record(11, "powerset modality expansion", t.elapsed(), v);

    record(
        12,
        "half-size discipline",
        sweep_time,
        Verdict::new(s.hit_failures.is_empty(), format!("splitter hits <= floor(log2 n) + 1{}", summary(&s.hit_failures))),
    );

    assert!(all_ok, "some acceptance criteria failed; see the lines above");
}
