//! Acceptance checks, run in sequence with one PASS/FAIL line each.
//! Timed checks run alone, so their wall-clock budgets are meaningful even
//! on a single core.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use catxai_core::diagram::{diagram_eq, typecheck, MorTerm};
use catxai_core::institution::{
    check_morphism_exhaustive, saliency_satisfies, PropSignature, SaliencySignature, Sentence, SignatureMorphism,
};
use catxai_core::laws::sample::{perturb, TermSampler};
use catxai_core::laws::{run_suite, LawConfig, Suite};
use catxai_core::stream::{
    check_equivalent, check_feedback_axioms, prefix_eval, random_value, EquivOptions, EquivOutcome, Value,
};
use catxai_core::taxonomy::{canonical_catalog, classify, format_labels};
use catxai_core::translator::logistic::{bce_gradient, bce_loss};
use catxai_core::translator::{
    perceptron_translator, random_finite_translator, run_training, semantic_xla_translator, separable_dataset,
    syntactic_xla_translator, Translator,
};
use catxai_core::xlearn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Output at step `n` of a term under a finite translator, recomputed from
/// the whole input history by the defining equations. Shares nothing with
/// the incremental evaluator except the generator tables.
fn naive(term: &MorTerm, t: &Translator, n: usize, history: &[Value]) -> Value {
    let split = |v: &Value, k: usize| v.clone().split_at(k);
    match term {
        MorTerm::GenMor { name, .. } => t.mor(name).expect("generator").step(n, &history[..=n]).expect("step"),
        MorTerm::Id(_) => history[n].clone(),
        MorTerm::Copy(_) => Value::pair(history[n].clone(), history[n].clone()),
        MorTerm::Discard(_) => Value::Unit,
        MorTerm::Sym(a, _) => {
            let (x, y) = split(&history[n], a.arity());
            Value::pair(y, x)
        }
        MorTerm::Compose(f, g) => {
            let mids: Vec<Value> = (0..=n).map(|k| naive(f, t, k, history)).collect();
            naive(g, t, n, &mids)
        }
        MorTerm::Tensor(f, g) => {
            let k = f.infer_type().expect("typed").0.arity();
            let (left, right): (Vec<Value>, Vec<Value>) = history[..=n].iter().map(|x| split(x, k)).unzip();
            Value::pair(naive(f, t, n, &left), naive(g, t, n, &right))
        }
        MorTerm::Feedback { state, inner } => {
            let mut s = state
                .atoms()
                .iter()
                .fold(Value::Unit, |acc, a| Value::pair(acc, t.initial_state(a).expect("init").clone()));
            let mut inner_hist = Vec::with_capacity(n + 1);
            let mut out = Value::Unit;
            for (k, x) in history[..=n].iter().enumerate() {
                inner_hist.push(Value::pair(x.clone(), s));
                let yk = naive(inner, t, k, &inner_hist);
                let keep = yk.factor_count() - state.arity();
                let (y, s_next) = yk.split_at(keep);
                out = y;
                s = s_next;
            }
            out
        }
    }
}

fn input_values(t: &Translator, term: &MorTerm) -> Vec<Value> {
    let m = t.interpret(term).expect("interpretable");
    m.dom().as_constant().and_then(|c| c.enumerate_values()).expect("finite domain")
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let cfg = LawConfig::default();
    let mut laws = 0;
    for suite in [Suite::Category, Suite::Monoidal, Suite::Cartesian] {
        for o in run_suite(suite, &cfg).map_err(|e| e.to_string())? {
            ensure(o.passed(), || format!("{}/{}: {:?}", o.suite, o.name, &o.failures[..o.failures.len().min(3)]))?;
            ensure(o.exhaustive, || format!("{}/{} was sampled, not exhaustive", o.suite, o.name))?;
            ensure(o.cases >= 1000, || format!("{}/{}: only {} translators", o.suite, o.name, o.cases))?;
            laws += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    Ok(format!("{laws} laws x 1000 translators, carriers <= 3, 5 steps, exhaustive, {elapsed:.1?}"))
}

fn criterion_2() -> Check {
    let report = check_feedback_axioms(2024, 500, 5).map_err(|e| e.to_string())?;
    for r in &report.results {
        ensure(r.failures.is_empty(), || format!("{}: {:?}", r.axiom, r.failures.first()))?;
        ensure(r.instances >= 500, || format!("{}: {} instances", r.axiom, r.instances))?;
    }
    let names: Vec<String> = report.results.iter().map(|r| r.axiom.to_string()).collect();
    ensure(names.len() == 5, || format!("axioms checked: {names:?}"))?;
    Ok(format!("{} x 500 instances, 0 failures", names.join("/")))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sampler = TermSampler::free(&["A", "B", "C"]);
    sampler.max_width = 3;
    sampler.max_layers = 3;
    let (mut pairs, mut with_feedback) = (0, 0);
    while pairs < 1000 {
        let term = sampler.term_with_feedback(&mut rng);
        if term.depth() > 5 {
            continue;
        }
        let t = random_finite_translator(sampler.presentation(), rng.gen(), 3);
        let values = input_values(&t, &term);
        let inputs: Vec<Value> = (0..6).map(|_| values[rng.gen_range(0..values.len())].clone()).collect();
        let fast = prefix_eval(&t.interpret(&term).map_err(|e| e.to_string())?, &inputs).map_err(|e| e.to_string())?;
        let slow: Vec<Value> = (0..inputs.len()).map(|n| naive(&term, &t, n, &inputs)).collect();
        ensure(fast == slow, || format!("{term}: {fast:?} vs {slow:?}"))?;
        pairs += 1;
        with_feedback += term.has_feedback() as usize;
    }
    Ok(format!("{pairs} (term, input) pairs of depth <= 5, {with_feedback} with feedback, bit-exact"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut sampler = TermSampler::free(&["A", "B", "C"]);
    sampler.max_width = 3;
    let (mut pairs, mut translators) = (0, 0);
    while pairs < 300 {
        let t1 = sampler.term(&mut rng);
        let mut t2 = t1.clone();
        for _ in 0..rng.gen_range(1..=4) {
            t2 = perturb(&t2, &mut rng);
        }
        if !diagram_eq(&t1, &t2).map_err(|e| e.to_string())? {
            return Err(format!("rewrite changed the diagram: {t1} vs {t2}"));
        }
        for _ in 0..10 {
            let tr = random_finite_translator(sampler.presentation(), rng.gen(), 3);
            let (m1, m2) =
                (tr.interpret(&t1).map_err(|e| e.to_string())?, tr.interpret(&t2).map_err(|e| e.to_string())?);
            let opts = EquivOptions { steps: 5, exhaustive_limit: 20_000, samples: 300, seed: rng.gen() };
            if let EquivOutcome::Differ { inputs, left, right } =
                check_equivalent(&m1, &m2, opts).map_err(|e| e.to_string())?
            {
                return Err(format!("{t1} vs {t2} on {inputs:?}: {left} vs {right}"));
            }
            translators += 1;
        }
        pairs += 1;
    }
    Ok(format!("{pairs} diagram-equal pairs, {translators} translator checks, no counterexample"))
}

/// Both sides of functoriality for `Compose`/`Tensor` nodes, on one input
/// sequence: the interpreted composite against the formula applied to the
/// interpreted factors.
fn functor_holds(term: &MorTerm, t: &Translator, inputs: &[Value]) -> Result<bool, String> {
    let direct = prefix_eval(&t.interpret(term).map_err(|e| e.to_string())?, inputs).map_err(|e| e.to_string())?;
    let formula: Vec<Value> = match term {
        MorTerm::Compose(f, g) => {
            let fm = t.interpret(f).map_err(|e| e.to_string())?;
            let gm = t.interpret(g).map_err(|e| e.to_string())?;
            let mids: Vec<Value> = (0..inputs.len()).map(|k| fm.step(k, &inputs[..=k]).expect("step")).collect();
            (0..inputs.len()).map(|n| gm.step(n, &mids[..=n]).expect("step")).collect()
        }
        MorTerm::Tensor(f, g) => {
            let fm = t.interpret(f).map_err(|e| e.to_string())?;
            let gm = t.interpret(g).map_err(|e| e.to_string())?;
            let k = f.infer_type().map_err(|e| e.to_string())?.0.arity();
            let (l, r): (Vec<Value>, Vec<Value>) = inputs.iter().map(|x| x.clone().split_at(k)).unzip();
            (0..inputs.len())
                .map(|n| Value::pair(fm.step(n, &l[..=n]).expect("step"), gm.step(n, &r[..=n]).expect("step")))
                .collect()
        }
        _ => return Ok(true),
    };
    Ok(direct == formula)
}

fn subterms<'a>(t: &'a MorTerm, out: &mut Vec<&'a MorTerm>) {
    out.push(t);
    match t {
        MorTerm::Compose(a, b) | MorTerm::Tensor(a, b) => {
            subterms(a, out);
            subterms(b, out);
        }
        MorTerm::Feedback { inner, .. } => subterms(inner, out),
        _ => {}
    }
}

fn criterion_5() -> Check {
    let pres = xlearn::presentation();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sampler = TermSampler::over(pres);
    sampler.max_width = 3;
    sampler.max_layers = 4;
    let (mut terms, mut nodes, mut with_gens) = (0, 0, 0);
    let mut seen = BTreeSet::new();
    while terms < 500 {
        let term = sampler.term_with_feedback(&mut rng);
        if typecheck(&term, pres).is_err() || !seen.insert(term.to_string()) {
            continue;
        }
        let t = random_finite_translator(pres, rng.gen(), 3);
        let mut subs = Vec::new();
        subterms(&term, &mut subs);
        for s in subs {
            if !matches!(s, MorTerm::Compose(..) | MorTerm::Tensor(..)) {
                continue;
            }
            let dom = t.interpret(s).map_err(|e| e.to_string())?.dom().as_constant().cloned().expect("constant");
            for _ in 0..20 {
                let inputs: Vec<Value> = (0..5).map(|_| random_value(&mut rng, &dom).expect("finite")).collect();
                ensure(functor_holds(s, &t, &inputs)?, || format!("functoriality fails at {s} in {term}"))?;
            }
            nodes += 1;
        }
        terms += 1;
        with_gens += (!term.generators().is_empty()) as usize;
    }
    Ok(format!("{terms} XLearn terms ({with_gens} using eta/nabla), {nodes} compose/tensor nodes, 5 steps"))
}

fn letters(prefix: &str, n: usize) -> PropSignature {
    PropSignature::new((0..n).map(|i| format!("{prefix}{i}"))).expect("valid symbols")
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let (mut morphisms, mut checks) = (0usize, 0u64);
    for s in 0..=4 {
        for t in 0..=4 {
            let (src, tgt) = (letters("p", s), letters("q", t));
            for rho in SignatureMorphism::enumerate_all(&src, &tgt) {
                let report = check_morphism_exhaustive(&rho, 3).map_err(|e| e.to_string())?;
                ensure(report.failures.is_empty(), || report.failures[0].clone())?;
                ensure(report.models == 1 << t, || format!("{} models over {t} symbols", report.models))?;
                morphisms += 1;
                checks += report.checks;
            }
        }
    }
    // every map from a 4-set to a 4-set, down to the empty signature
    let expected: usize = (0..=4u32).flat_map(|s| (0..=4usize).map(move |t| t.pow(s))).sum();
    ensure(morphisms == expected, || format!("{morphisms} morphisms, expected {expected}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:.1?}"))?;
    Ok(format!("{morphisms} morphisms, {checks} (model, sentence) checks at depth <= 3, 100% hold, {elapsed:.1?}"))
}

/// Plain logistic regression on `(x1, x2, 1)`, written out by hand.
fn logistic_oracle(data: &[(f64, [f64; 2])], steps: usize) -> ([f64; 3], Vec<f64>) {
    let (mut w1, mut w2, mut b) = (0.0f64, 0.0f64, 0.0f64);
    let mut losses = Vec::new();
    for i in 0..steps {
        let (y, [x1, x2]) = data[i % data.len()];
        let z = w1 * x1 + w2 * x2 + b;
        let p = 1.0 / (1.0 + (-z).exp());
        losses.push(-(y * p.ln() + (1.0 - y) * (1.0 - p).ln()));
        let r = p - y;
        w1 -= 0.5 * r * x1;
        w2 -= 0.5 * r * x2;
        b -= 0.5 * r;
    }
    ([w1, w2, b], losses)
}

fn criterion_7() -> Check {
    let data = separable_dataset(7, 100, 2);
    let trace = run_training(&perceptron_translator(), &data, 200).map_err(|e| e.to_string())?;
    let plain: Vec<(f64, [f64; 2])> = data.samples.iter().map(|s| (s.label, [s.input[0], s.input[1]])).collect();
    let (oracle, oracle_losses) = logistic_oracle(&plain, 200);
    let params = trace.final_params().ok_or("empty trace")?;
    let max_diff = params.iter().zip(oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(max_diff <= 1e-9, || format!("final params {params:?} vs oracle {oracle:?}"))?;
    for (r, l) in trace.records.iter().zip(&oracle_losses) {
        ensure((r.loss - l).abs() <= 1e-9, || format!("step {} loss {} vs oracle {l}", r.step, r.loss))?;
    }
    let correct = plain
        .iter()
        .filter(|(y, [x1, x2])| {
            let z = oracle[0] * x1 + oracle[1] * x2 + oracle[2];
            (z >= 0.0) == (*y >= 0.5)
        })
        .count();
    let accuracy = correct as f64 / plain.len() as f64;
    ensure(accuracy >= 0.95, || format!("accuracy {accuracy}"))?;
    let (first, last) = (trace.records[0].loss, trace.records[199].loss);
    ensure(last < first, || format!("loss {first} -> {last}"))?;
    let window =
        |r: std::ops::Range<usize>| trace.records[r.clone()].iter().map(|t| t.loss).sum::<f64>() / r.len() as f64;
    let (early, late) = (window(0..50), window(150..200));
    ensure(late < early, || format!("mean loss {early} -> {late}"))?;
    Ok(format!("accuracy {accuracy:.2}, loss {first:.4} -> {last:.4}, max |param - oracle| = {max_diff:.1e}"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let params: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let label = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
        let grad = bce_gradient(&params, &x, label);
        let fd: Vec<f64> = (0..params.len())
            .map(|j| {
                let (mut up, mut down) = (params.clone(), params.clone());
                up[j] += h;
                down[j] -= h;
                (bce_loss(&up, &x, label) - bce_loss(&down, &x, label)) / (2.0 * h)
            })
            .collect();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let diff: Vec<f64> = grad.iter().zip(&fd).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / norm(&grad).max(norm(&fd)).max(1e-300);
        worst = worst.max(rel);
    }
    ensure(worst <= 1e-6, || format!("relative error {worst:.2e}"))?;
    Ok(format!("100 points, worst relative error {worst:.2e}"))
}

fn criterion_9() -> Check {
    let catalog = canonical_catalog();
    ensure(catalog.len() >= 7, || format!("{} entries", catalog.len()))?;
    for e in &catalog {
        let got = classify(&e.spec).map_err(|err| format!("{}: {err}", e.name))?;
        ensure(got == e.expected, || {
            format!("{}: got {} expected {}", e.name, format_labels(&got), format_labels(&e.expected))
        })?;
    }
    Ok(format!("{} catalog entries classify exactly", catalog.len()))
}

fn criterion_10() -> Check {
    let sig = PropSignature::new(["x_flies", "x_animal", "x_plane"]).map_err(|e| e.to_string())?;
    let t = syntactic_xla_translator(&sig).map_err(|e| e.to_string())?;
    let (_, e) = t.predict(0, &[1.0, 0.0], &[2.0, -2.0, 0.0]).map_err(|e| e.to_string())?.split_at(1);
    let Value::Sentence(sentence) = e else { return Err(format!("emitted {e}")) };
    let printed = sentence.to_string();
    ensure(printed == "x_flies & ~x_animal -> x_plane", || format!("printed `{printed}`"))?;
    ensure(Sentence::parse(&printed).map_err(|e| e.to_string())? == sentence, || "reparse differs".into())?;

    let ssig = SaliencySignature::new("S", 4);
    let t = semantic_xla_translator(&ssig).map_err(|e| e.to_string())?;
    let data = separable_dataset(10, 40, 4);
    let trace = run_training(&t, &data, 50).map_err(|e| e.to_string())?;
    ensure(trace.len() == 50, || format!("{} steps", trace.len()))?;
    let mut nonempty = 0;
    for r in &trace.records {
        let Value::Saliency(m) = &r.explanation else {
            return Err(format!("step {}: emitted {}", r.step, r.explanation));
        };
        let lifted = m.lift();
        ensure(saliency_satisfies(m, &lifted).map_err(|e| e.to_string())?, || {
            format!("step {}: {m} fails {lifted}", r.step)
        })?;
        nonempty += !m.pixels.is_empty() as usize;
    }
    ensure(nonempty > 0, || "every explanation was empty".into())?;
    Ok(format!("`{printed}` round-trips; 50/50 saliency models satisfy their lift ({nonempty} non-empty)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("category/monoidal/Cartesian laws", criterion_1),
        ("feedback axioms", criterion_2),
        ("incremental vs naive stream evaluation", criterion_3),
        ("diagram equality soundness", criterion_4),
        ("translator functoriality", criterion_5),
        ("institution satisfaction condition", criterion_6),
        ("learning demo vs logistic oracle", criterion_7),
        ("gradient check", criterion_8),
        ("taxonomy catalog", criterion_9),
        ("explanation round-trip", criterion_10),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if filter.as_deref().is_some_and(|f| !id.contains(f) && !name.contains(f)) {
            continue;
        }
        match check() {
            Ok(detail) => println!("PASS {id}: {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id}: {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
