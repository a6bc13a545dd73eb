//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use blocksynth::engine::{equivalent, repair, simplify, synthesize, verify, SynthConfig};
use blocksynth::lang::{emit, parse, translate};
use blocksynth::sat::{solve, CnfFormula, Literal};
use blocksynth::spec::{compile_spec, Constraint, ConstraintList, Mode, SpecFormula, TriValue, TruthTableRow};
use blocksynth::{
    run_cycle, ClauseSink, simulate, Assignment, Block, BlockInterface, BoolExpr, Direction, Identifier, Lang, Statement,
    VarDecl,
};
use blocksynth_cli::scenario::{magnet, magnet_list};
use blocksynth_cli::{bench_list, bench_run, run, stats, BenchReport, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::statistics::Statistics;

type Check = Result<String, String>;

fn ident(name: &str) -> Identifier {
    Identifier::new(name).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- oracles -------------------------------------------------------------

/// Satisfiability by trying every assignment.
fn brute_force_sat(n: u32, clauses: &[Vec<i64>]) -> bool {
    (0..1u64 << n).any(|a| {
        clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let bit = a >> (l.unsigned_abs() - 1) & 1 == 1;
                bit == (l > 0)
            })
        })
    })
}

fn random_3cnf(rng: &mut ChaCha8Rng, n: u32, m: usize) -> Vec<Vec<i64>> {
    (0..m)
        .map(|_| {
            let mut vars = Vec::new();
            while vars.len() < 3 {
                let v = rng.gen_range(1..=i64::from(n));
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter().map(|v| if rng.gen_bool(0.5) { v } else { -v }).collect()
        })
        .collect()
}

fn random_expr(rng: &mut ChaCha8Rng, vars: &[Identifier], depth: usize) -> BoolExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.05) { BoolExpr::Const(rng.gen()) } else { BoolExpr::var(&vars[rng.gen_range(0..vars.len())]) };
    }
    let op = rng.gen_range(0..4);
    let mut sub = || random_expr(rng, vars, depth - 1);
    match op {
        0 => BoolExpr::not(sub()),
        1 => BoolExpr::and(sub(), sub()),
        2 => BoolExpr::or(sub(), sub()),
        _ => BoolExpr::xor(sub(), sub()),
    }
}

/// Inputs `x0..`, outputs `y0` and maybe `y1`, maybe a temp and a state
/// variable. Temps are read only after being written.
fn random_block(rng: &mut ChaCha8Rng, max_inputs: usize, max_stmts: usize, stateful: bool) -> Block {
    let n = rng.gen_range(1..=max_inputs);
    let mut decls: Vec<VarDecl> = (0..n).map(|i| VarDecl::new(ident(&format!("x{i}")), Direction::Input)).collect();
    for i in 0..rng.gen_range(1..=2) {
        decls.push(VarDecl::new(ident(&format!("y{i}")), Direction::Output));
    }
    if rng.gen_bool(0.5) {
        decls.push(VarDecl::new(ident("t0"), Direction::Temp));
    }
    if stateful {
        decls.push(VarDecl::new(ident("s0"), Direction::State));
    }
    let interface = BlockInterface::new(decls.clone()).unwrap();
    let mut readable: Vec<Identifier> =
        decls.iter().filter(|d| d.direction != Direction::Temp).map(|d| d.name.clone()).collect();
    let targets: Vec<Identifier> =
        decls.iter().filter(|d| d.direction != Direction::Input).map(|d| d.name.clone()).collect();
    let mut body = Vec::new();
    for _ in 0..rng.gen_range(1..=max_stmts) {
        let target = targets[rng.gen_range(0..targets.len())].clone();
        let rhs = random_expr(rng, &readable, 3);
        if !readable.contains(&target) {
            readable.push(target.clone());
        }
        body.push(Statement::new(target, rhs));
    }
    Block::new(ident("R"), interface, body, Lang::St).unwrap()
}

/// Outputs and next state for every (state, input) pattern.
fn behavior(block: &Block) -> Vec<(Assignment, Assignment)> {
    let inputs = block.interface().inputs();
    let states = block.interface().states();
    let mut rows = Vec::new();
    for s in 0..1u64 << states.len() {
        let state = Assignment::from_bits(&states, s);
        for p in 0..1u64 << inputs.len() {
            rows.push(run_cycle(block, &state, &Assignment::from_bits(&inputs, p)).unwrap());
        }
    }
    rows
}

/// Inputs plus outputs for every input pattern of a combinational block.
fn environments(block: &Block) -> Vec<Assignment> {
    let inputs = block.interface().inputs();
    behavior(block)
        .into_iter()
        .enumerate()
        .map(|(p, (outs, _))| {
            let mut env = Assignment::from_bits(&inputs, p as u64);
            for (n, v) in outs.iter() {
                env.insert(n.clone(), v);
            }
            env
        })
        .collect()
}

fn satisfies(block: &Block, spec: &SpecFormula) -> bool {
    environments(block).iter().all(|env| spec.holds(env).unwrap())
}

/// Spec from a full or partial table over `names -> y`: pattern `p` is
/// demanded when bit `p` of `care` is set, with value bit `p` of `value`.
fn table_spec(names: &[&str], care: u64, value: u64) -> SpecFormula {
    let interface = BlockInterface::with_io(names, &["y"]).unwrap();
    let rows = (0..1u64 << names.len())
        .filter(|p| care >> p & 1 == 1)
        .map(|p| {
            let ins: Vec<_> = names.iter().enumerate().map(|(i, n)| (ident(n), p >> i & 1 == 1)).collect();
            Constraint::Row(TruthTableRow::from_bools(&ins, &[(ident("y"), value >> p & 1 == 1)]))
        })
        .collect();
    compile_spec(&ConstraintList::new(ident("T"), Mode::Generate, interface, rows).unwrap()).unwrap()
}

/// Output column of `y` over all input patterns.
fn column(block: &Block) -> u64 {
    environments(block).iter().enumerate().fold(0, |acc, (p, env)| acc | u64::from(env.get(&ident("y")).unwrap()) << p)
}

/// Whether a straight-line program of at most `max_slots` slots (constant,
/// copy, NOT, AND, OR, XOR) over three inputs computes a column accepted by
/// `ok`. Breadth-first over sets of computed columns.
fn exists_program(max_slots: usize, ok: &dyn Fn(u8) -> bool) -> bool {
    let inputs = [0xAAu8, 0xCC, 0xF0];
    let mut frontier: HashSet<Vec<u8>> = HashSet::from([Vec::new()]);
    for slot in 1..=max_slots {
        let mut next = HashSet::new();
        for derived in &frontier {
            let avail: Vec<u8> = inputs.iter().chain(derived).copied().collect();
            let mut candidates = vec![0x00, 0xFF];
            for (i, &a) in avail.iter().enumerate() {
                candidates.extend([a, !a]);
                for &b in &avail[i + 1..] {
                    candidates.extend([a & b, a | b, a ^ b]);
                }
            }
            for c in candidates {
                if ok(c) {
                    return true;
                }
                if slot < max_slots && !avail.contains(&c) {
                    let mut set = derived.clone();
                    set.push(c);
                    set.sort_unstable();
                    next.insert(set);
                }
            }
        }
        frontier = next;
    }
    false
}

// ---- criteria ------------------------------------------------------------

fn sat_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let started = Instant::now();
    let mut sat = 0;
    for i in 0..500u64 {
        let n = rng.gen_range(3..=18u32);
        let ratio = rng.gen_range(2.0..=6.0);
        let m = (f64::from(n) * ratio).round() as usize;
        let clauses = random_3cnf(&mut rng, n, m);
        let mut f = CnfFormula::with_vars(n);
        for c in &clauses {
            f.add_clause(&c.iter().map(|&l| Literal::from_dimacs(l)).collect::<Vec<_>>());
        }
        let result = solve(&f, &[], i);
        let expected = brute_force_sat(n, &clauses);
        ensure(result.is_sat() == expected, || format!("instance {i}: solver says sat={}", result.is_sat()))?;
        if let Some(model) = result.model() {
            ensure(f.is_satisfied_by(model), || format!("instance {i}: model does not satisfy the formula"))?;
            sat += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:.2?}"))?;
    Ok(format!("500 instances agree ({sat} sat), {elapsed:.2?} including the oracle"))
}

fn verify_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violated = 0;
    for i in 0..200 {
        let block = random_block(&mut rng, 6, 8, false);
        let public: Vec<VarDecl> =
            block.interface().decls().iter().filter(|d| d.direction != Direction::Temp).cloned().collect();
        let mut ins = Vec::new();
        for n in block.interface().inputs() {
            if rng.gen_bool(0.5) {
                ins.push((n, TriValue::from(rng.gen_bool(0.5))));
            }
        }
        let outputs = block.interface().outputs();
        let out = outputs[rng.gen_range(0..outputs.len())].clone();
        let row = TruthTableRow::new(ins, vec![(out, TriValue::from(rng.gen_bool(0.5)))]);
        let list =
            ConstraintList::new(ident("R"), Mode::Verify, BlockInterface::new(public).unwrap(), vec![Constraint::Row(row)])
                .unwrap();
        let spec = compile_spec(&list).unwrap();

        let expected = satisfies(&block, &spec);
        let result = verify(&block, &spec, &SynthConfig::default()).map_err(|e| format!("block {i}: {e}"))?;
        ensure(result.is_verified() == expected, || format!("block {i}: verdict {}", result.is_verified()))?;
        if let Some(cex) = result.counterexample() {
            violated += 1;
            let trace = simulate(&block, &cex.input_cycles, &cex.init_state).unwrap();
            let cycle = &trace.cycles[cex.cycle_index];
            let mut env = cycle.inputs.clone();
            for (n, v) in cycle.outputs.iter() {
                env.insert(n.clone(), v);
            }
            let replayed = spec.violation(&env).unwrap();
            ensure(replayed.is_some() && replayed == cex.origin, || format!("block {i}: counterexample does not replay"))?;
        }
    }
    Ok(format!("200 blocks agree ({violated} violated, every counterexample replays)"))
}

fn functional_completeness() -> Check {
    let cfg = SynthConfig::default();
    let mut slowest = Duration::ZERO;
    for f in 0..16u64 {
        let spec = table_spec(&["a", "b"], 0xF, f);
        let started = Instant::now();
        let result = synthesize(&spec.interface, &spec, &cfg).map_err(|e| format!("function {f:04b}: {e}"))?;
        let t = started.elapsed();
        slowest = slowest.max(t);
        ensure(column(&result.block) == f, || format!("function {f:04b}: wrong table"))?;
        ensure(t < Duration::from_secs(1), || format!("function {f:04b}: {t:.2?}"))?;
    }
    let majority = 0b1110_1000;
    let spec = table_spec(&["a", "b", "c"], 0xFF, majority);
    let started = Instant::now();
    let result = synthesize(&spec.interface, &spec, &cfg).map_err(|e| format!("majority: {e}"))?;
    let t = started.elapsed();
    ensure(column(&result.block) == majority, || "majority: wrong table".into())?;
    ensure(t < Duration::from_secs(10), || format!("majority: {t:.2?}"))?;
    Ok(format!("16 functions, slowest {slowest:.2?}; majority {} slots in {t:.2?}", result.slots_used))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn slowest(report: &BenchReport) -> Duration {
    report.runs.iter().map(|r| r.time).max().unwrap()
}

fn warehouse() -> Check {
    let cfg = SynthConfig::default();
    let repeats = 10;
    let bench = |s: Scenario| bench_run(s, repeats, &cfg).map_err(|e| format!("{s}: {e}"));
    // (a) bench_run validates every result against the full table.
    let magnet_report = bench(Scenario::Magnet)?;
    let row = bench(Scenario::Row)?;
    let light = bench(Scenario::SignalLight)?;

    for (report, budget) in [(&magnet_report, 2), (&row, 10), (&light, 300)] {
        let t = slowest(report);
        ensure(t < Duration::from_secs(budget), || format!("{}: slowest run {t:.2?} over {budget} s", report.name))?;
    }

    ensure(row.runs.iter().all(|r| r.synthesis_calls == 3), || "row does not make 3 synthesis calls".into())?;
    let mut per_magnet = Duration::ZERO;
    for k in 1..=3 {
        let report = bench_list(&format!("magnet{k}"), &magnet_list(k), &|x| vec![magnet(x, k)], repeats, &cfg)
            .map_err(|e| format!("magnet{k}: {e}"))?;
        per_magnet += report.stats.mean;
    }
    let row_ratio = row.stats.mean_secs / per_magnet.as_secs_f64();
    ensure(row_ratio <= 1.25, || format!("mean(row) is {row_ratio:.2} x the sum of single magnets"))?;

    let light_ratio = light.stats.mean_secs / magnet_report.stats.mean_secs;
    ensure(light_ratio >= 10.0, || format!("mean(signal-light) is only {light_ratio:.1} x mean(magnet)"))?;
    Ok(format!(
        "magnet {:.2} ms, row {:.2} ms (3 calls, {row_ratio:.2} x single magnets), signal-light {:.0} ms ({light_ratio:.0} x magnet)",
        ms(magnet_report.stats.mean),
        ms(row.stats.mean),
        ms(light.stats.mean)
    ))
}

fn minimality() -> Check {
    let cfg = SynthConfig::default();
    let block = parse(
        "FUNCTION_BLOCK R\nVAR_INPUT a : BOOL; b : BOOL; END_VAR\nVAR_OUTPUT y : BOOL; END_VAR\n\
         BEGIN\ny := (a AND b) OR (a AND NOT b);\nEND_FUNCTION_BLOCK\n",
        Lang::St,
    )
    .unwrap();
    let result = simplify(&block, &cfg).map_err(|e| e.to_string())?;
    ensure(result.slots_used == 1, || format!("simplify used {} slots", result.slots_used))?;
    let exprs = result.block.output_exprs();
    ensure(exprs == vec![(ident("y"), BoolExpr::named("a"))], || format!("simplify gave {exprs:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sizes = Vec::new();
    for i in 0..20 {
        let care: u8 = rng.gen();
        let value: u8 = rng.gen();
        let spec = table_spec(&["x0", "x1", "x2"], u64::from(care), u64::from(value));
        let result = synthesize(&spec.interface, &spec, &cfg).map_err(|e| format!("spec {i}: {e}"))?;
        let got = column(&result.block) as u8;
        ensure(got & care == value & care, || format!("spec {i}: wrong table"))?;
        let ok = |c: u8| c & care == value & care;
        ensure(!exists_program(result.slots_used - 1, &ok), || {
            format!("spec {i}: a program with fewer than {} slots exists", result.slots_used)
        })?;
        sizes.push(result.slots_used);
    }
    Ok(format!("simplify gives `y := a`; 20 random specs minimal, slot counts {sizes:?}"))
}

fn diff(x: &BoolExpr, y: &BoolExpr) -> usize {
    match (x, y) {
        (BoolExpr::Not(a), BoolExpr::Not(b)) => diff(a, b),
        _ => match (x.as_binary(), y.as_binary()) {
            (Some((o1, l1, r1)), Some((o2, l2, r2))) => usize::from(o1 != o2) + diff(l1, l2) + diff(r1, r2),
            _ if x.is_leaf() && y.is_leaf() => usize::from(x != y),
            _ => x.size().max(y.size()),
        },
    }
}

/// Every tree obtained by replacing exactly one node with another node of
/// the same arity.
fn single_node_edits(e: &BoolExpr, leaves: &[BoolExpr]) -> Vec<BoolExpr> {
    let mut out = Vec::new();
    if e.is_leaf() {
        out.extend(leaves.iter().filter(|l| *l != e).cloned());
    } else if let BoolExpr::Not(inner) = e {
        out.extend(single_node_edits(inner, leaves).into_iter().map(BoolExpr::not));
    } else if let Some((op, l, r)) = e.as_binary() {
        for other in [BoolExpr::and, BoolExpr::or, BoolExpr::xor] {
            let candidate = other(l.clone(), r.clone());
            if candidate.as_binary().unwrap().0 != op {
                out.push(candidate);
            }
        }
        out.extend(single_node_edits(l, leaves).into_iter().map(|x| BoolExpr::binary(op, x, r.clone())));
        out.extend(single_node_edits(r, leaves).into_iter().map(|x| BoolExpr::binary(op, l.clone(), x)));
    }
    out
}

fn repair_minimal_edit() -> Check {
    let text = "FUNCTION_BLOCK OrGate\nVAR_INPUT a : BOOL; b : BOOL; END_VAR\nVAR_OUTPUT y : BOOL; END_VAR\n\
                BEGIN\ny := a OR b;\nEND_FUNCTION_BLOCK\n";
    let block = parse(text, Lang::St).unwrap();
    let spec = table_spec(&["a", "b"], 0xF, 0b1000);
    ensure(!satisfies(&block, &spec), || "the original already satisfies the spec".into())?;

    let original = block.body()[0].rhs.clone();
    let leaves = [BoolExpr::named("a"), BoolExpr::named("b"), BoolExpr::Const(false), BoolExpr::Const(true)];
    let fixes: Vec<BoolExpr> = single_node_edits(&original, &leaves)
        .into_iter()
        .filter(|e| {
            let candidate =
                Block::new(block.name().clone(), block.interface().clone(), vec![Statement::new(ident("y"), e.clone())], Lang::St)
                    .unwrap();
            satisfies(&candidate, &spec)
        })
        .collect();
    ensure(!fixes.is_empty(), || "no single-node edit fixes the block".into())?;

    let result = repair(&block, &spec, &SynthConfig::default()).map_err(|e| e.to_string())?;
    ensure(satisfies(&result.block, &spec), || "repaired block violates the spec".into())?;
    ensure(result.changed_nodes == 1, || format!("changed_nodes = {}", result.changed_nodes))?;
    let repaired = &result.block.body()[0].rhs;
    ensure(diff(&original, repaired) == 1, || format!("`{repaired}` is not one node away from `{original}`"))?;
    ensure(fixes.contains(repaired), || format!("`{repaired}` is not among the single-node fixes"))?;
    Ok(format!("`{original}` -> `{repaired}`, 1 changed node; single-node fixes: {}", fixes.len()))
}

fn translation_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SynthConfig { unwind_cycles: 2, ..SynthConfig::default() };
    for i in 0..100 {
        let stateful = rng.gen_bool(0.3);
        let block = random_block(&mut rng, 6, 8, stateful);
        let il = translate(&block, Lang::Il).map_err(|e| format!("block {i}: {e}"))?;
        let verdict = equivalent(&block, &il, &cfg).map_err(|e| format!("block {i}: {e}"))?;
        ensure(verdict.is_verified(), || format!("block {i}: translation is not equivalent"))?;
        let il_text = emit(&il, Lang::Il);
        let reparsed = parse(&il_text, Lang::Il).map_err(|e| format!("block {i}: {e}\n{il_text}"))?;
        let back = translate(&reparsed, Lang::St).map_err(|e| format!("block {i}: {e}"))?;
        let round = parse(&emit(&back, Lang::St), Lang::St).map_err(|e| format!("block {i}: {e}"))?;
        ensure(behavior(&round) == behavior(&block), || format!("block {i}: round trip changes behavior"))?;
    }
    Ok("100 blocks equivalent after translation; ST -> IL -> ST preserves behavior".into())
}

fn statistics() -> Check {
    let samples = [128, 130, 126].map(Duration::from_millis);
    let s = stats(&samples).map_err(|e| e.to_string())?;
    ensure(s.stddev == Duration::from_millis(2) && s.stddev_secs == 0.002, || format!("sigma = {:?}", s.stddev))?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(2..=50);
        let samples: Vec<Duration> = (0..n).map(|_| Duration::from_nanos(rng.gen_range(1..=10_000_000_000))).collect();
        let secs: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        let got = stats(&samples).map_err(|e| e.to_string())?;
        for (ours, theirs) in [(got.mean_secs, secs.iter().mean()), (got.stddev_secs, secs.iter().std_dev())] {
            let rel = if theirs == 0.0 { ours.abs() } else { ((ours - theirs) / theirs).abs() };
            worst = worst.max(rel);
            ensure(rel <= 1e-9, || format!("set {i}: {ours} vs {theirs}"))?;
        }
    }
    Ok(format!("sigma(128, 130, 126 ms) = 2 ms; 100 sets within {worst:.1e} of the oracle"))
}

const AND_TABLE: &str = r#"<constraintList block="Gate" mode="generate">
  <interface>
    <var name="a" dir="in"/>
    <var name="b" dir="in"/>
    <var name="c" dir="in"/>
    <var name="y" dir="out"/>
    <var name="z" dir="out"/>
  </interface>
  <truthTable>
    <row in="a=0;b=0;c=-" out="y=0;z=1"/>
    <row in="a=0;b=1;c=0" out="y=1;z=1"/>
    <row in="a=0;b=1;c=1" out="y=0;z=0"/>
    <row in="a=1;b=-;c=0" out="y=1;z=0"/>
    <row in="a=1;b=-;c=1" out="y=1;z=1"/>
  </truthTable>
</constraintList>
"#;

const EXTRA: &str = r#"<constraintList block="Gate" mode="extend">
  <interface>
    <var name="a" dir="in"/>
    <var name="b" dir="in"/>
    <var name="c" dir="in"/>
    <var name="y" dir="out"/>
    <var name="z" dir="out"/>
  </interface>
  <truthTable>
    <row in="a=1;b=1;c=1" out="y=0;z=0"/>
  </truthTable>
</constraintList>
"#;

const GATE: &str = "FUNCTION_BLOCK Gate\nVAR_INPUT a : BOOL; b : BOOL; c : BOOL; END_VAR\n\
                    VAR_OUTPUT y : BOOL; z : BOOL; END_VAR\nVAR_TEMP t : BOOL; END_VAR\nBEGIN\n\
                    t := a OR b;\ny := t AND NOT c;\nz := (a AND c) OR (NOT a AND NOT c) OR (t AND NOT b);\n\
                    END_FUNCTION_BLOCK\n";

/// Drops timing figures: any token followed by a token starting with `ms`.
fn untimed(text: &str) -> String {
    text.lines()
        .map(|line| {
            let tokens: Vec<&str> = line.split(' ').collect();
            let kept: Vec<&str> = tokens
                .iter()
                .enumerate()
                .filter(|(i, t)| !t.starts_with("ms") && !tokens.get(i + 1).is_some_and(|n| n.starts_with("ms")))
                .map(|(_, t)| *t)
                .collect();
            kept.join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn invoke(args: &[String]) -> (i32, String) {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = run(std::iter::once("blocksynth".to_string()).chain(args.iter().cloned()), &mut stdout, &mut stderr);
    (code, String::from_utf8_lossy(&stdout).into_owned())
}

/// Runs the command, reads `output` (or stdout), removes it, and repeats.
fn twice(name: &str, args: &[String], output: Option<&Path>) -> Result<(), String> {
    let mut seen = Vec::new();
    for _ in 0..2 {
        let (code, stdout) = invoke(args);
        let bytes = match output {
            Some(path) => {
                let bytes = fs::read(path).map_err(|e| format!("{name}: exit {code}, {e}"))?;
                fs::remove_file(path).unwrap();
                bytes
            }
            None => untimed(&stdout).into_bytes(),
        };
        seen.push((code, bytes));
    }
    ensure(seen[0] == seen[1], || format!("{name}: runs differ"))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let path = |name: &str| d.join(name).to_str().unwrap().to_string();
    fs::write(d.join("gate.xml"), AND_TABLE).unwrap();
    fs::write(d.join("extra.xml"), EXTRA).unwrap();
    fs::write(d.join("gate.st"), GATE).unwrap();
    let args = |list: &[&str]| list.iter().map(|s| s.to_string()).collect::<Vec<String>>();

    let synth = args(&["synth", "--constraints", &path("gate.xml"), "--seed", "3", "--out", &path("out.il"), "--lang", "il"]);
    twice("synth", &synth, Some(&d.join("out.il")))?;
    twice("verify", &args(&["verify", "--block", &path("gate.st"), "--constraints", &path("gate.xml"), "--cycles", "2"]), None)?;
    twice("repair", &args(&["repair", "--block", &path("gate.st"), "--constraints", &path("gate.xml"), "--seed", "3"]), Some(&d.join("gate.repaired.st")))?;
    twice("simplify", &args(&["simplify", "--block", &path("gate.st"), "--seed", "3"]), Some(&d.join("gate.simplified.st")))?;
    twice("extend", &args(&["extend", "--block", &path("gate.st"), "--constraints", &path("extra.xml"), "--seed", "3"]), Some(&d.join("gate.extended.st")))?;
    twice("translate", &args(&["translate", "--block", &path("gate.st"), "--to", "il"]), Some(&d.join("gate.il")))?;
    twice("bench", &args(&["bench", "--scenario", "row", "--repeat", "3", "--seed", "3"]), None)?;
    twice("check", &args(&["check", "--constraints", &path("gate.xml")]), None)?;
    Ok("synth, verify, repair, simplify, extend, translate, bench and check repeat byte for byte".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("SAT oracle equivalence", sat_equivalence),
        ("verify oracle equivalence", verify_equivalence),
        ("functional completeness", functional_completeness),
        ("warehouse benchmark", warehouse),
        ("minimality", minimality),
        ("repair minimal edit", repair_minimal_edit),
        ("translation equivalence", translation_equivalence),
        ("statistics", statistics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (verdict, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{verdict} {}. {name}: {detail} [{:.1?}]", i + 1, started.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
