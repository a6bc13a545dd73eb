//! Bounded model checking by unrolling scan cycles into one SAT instance.

use std::collections::BTreeMap;

use super::{Counterexample, EngineError, SynthConfig, VerifyResult};
use crate::model::{simulate, Assignment, Block, BoolExpr, Identifier, Trace};
use crate::sat::{Encoder, Heuristic, Literal, SatResult, Signal, Solver, SolverConfig};
use crate::spec::SpecFormula;
use crate::ClauseSink;

type Env = BTreeMap<Identifier, Signal>;

pub(crate) fn solver_for(seed: u64) -> Solver {
    Solver::new(SolverConfig { seed, heuristic: Heuristic::Vsids, restarts: true })
}

fn encode(solver: &mut Solver, enc: &mut Encoder, expr: &BoolExpr, env: &Env) -> Signal {
    enc.encode(solver, expr, &|id: &Identifier| env.get(id).copied())
        .expect("blocks and specs are checked against the interface")
}

/// One scan cycle: returns the end-of-cycle environment (inputs,
/// outputs, updated state).
fn encode_cycle(solver: &mut Solver, enc: &mut Encoder, block: &Block, state: &Env, inputs: &Env) -> Env {
    let mut env: Env = inputs.clone();
    env.extend(state.iter().map(|(k, v)| (k.clone(), *v)));
    for o in block.interface().outputs() {
        env.insert(o, Signal::Const(false));
    }
    for stmt in block.body() {
        let value = encode(solver, enc, &stmt.rhs, &env);
        env.insert(stmt.target.clone(), value);
    }
    for t in block.interface().temps() {
        env.remove(&t);
    }
    env
}

fn next_state(block: &Block, env: &Env) -> Env {
    block.interface().states().into_iter().map(|s| (s.clone(), env[&s])).collect()
}

/// Signal that is true when some obligation or assertion fails in `env`.
fn spec_violated(solver: &mut Solver, enc: &mut Encoder, spec: &SpecFormula, env: &Env) -> Signal {
    let mut bad = Vec::new();
    for ob in &spec.obligations {
        let guard = encode(solver, enc, &ob.guard, env);
        let out = env[&ob.output];
        let wrong = if ob.value { !out } else { out };
        bad.push(enc.and(solver, guard, wrong));
    }
    for a in &spec.assertions {
        bad.push(!encode(solver, enc, &a.expr, env));
    }
    enc.any(solver, &bad)
}

fn fresh_env(solver: &mut Solver, names: &[Identifier]) -> (Env, Vec<(Identifier, Literal)>) {
    let mut env = Env::new();
    let mut vars = Vec::new();
    for n in names {
        let l = solver.new_var().positive();
        env.insert(n.clone(), Signal::Lit(l));
        vars.push((n.clone(), l));
    }
    (env, vars)
}

fn read(model: &crate::sat::Model, vars: &[(Identifier, Literal)]) -> Assignment {
    Assignment::from_pairs(vars.iter().map(|(n, l)| (n.clone(), model.lit_value(*l))))
}

struct Unrolled {
    init_vars: Vec<(Identifier, Literal)>,
    input_vars: Vec<Vec<(Identifier, Literal)>>,
    bad: Vec<Signal>,
}

impl Unrolled {
    /// Shortest violation: tries each depth in turn under an assumption.
    fn shortest(&self, solver: &mut Solver, enc: &mut Encoder) -> Option<(usize, Assignment, Vec<Assignment>)> {
        for (t, bad) in self.bad.iter().enumerate() {
            let assumption = match *bad {
                Signal::Const(false) => continue,
                other => enc.literal(solver, other),
            };
            if let SatResult::Sat(model) = solver.solve(&[assumption]) {
                let init = read(&model, &self.init_vars);
                let inputs = self.input_vars[..=t].iter().map(|vars| read(&model, vars)).collect();
                return Some((t, init, inputs));
            }
        }
        None
    }
}

fn unroll_init(solver: &mut Solver, block: &Block, symbolic: bool) -> (Env, Vec<(Identifier, Literal)>) {
    let states = block.interface().states();
    if symbolic {
        fresh_env(solver, &states)
    } else {
        let env = states.iter().map(|s| (s.clone(), Signal::Const(false))).collect();
        let vars = Vec::new();
        (env, vars)
    }
}

fn full_init(block: &Block, init: Assignment) -> Assignment {
    let mut full = Assignment::all_false(block.interface().states().iter());
    for (n, v) in init.iter() {
        full.insert(n.clone(), v);
    }
    full
}

fn observe(trace: &Trace, t: usize) -> Assignment {
    let cycle = &trace.cycles[t];
    let mut env = cycle.inputs.clone();
    for (n, v) in cycle.outputs.iter().chain(cycle.state_after.iter()) {
        env.insert(n.clone(), v);
    }
    env
}

fn check_interfaces(a: &crate::BlockInterface, b: &crate::BlockInterface, what: &str) -> Result<(), EngineError> {
    if a.external_signature() != b.external_signature() {
        return Err(EngineError::Type(format!("{what} interfaces differ")));
    }
    Ok(())
}

/// Checks `block` against `spec` for `cfg.unwind_cycles` scan cycles.
pub fn verify(block: &Block, spec: &SpecFormula, cfg: &SynthConfig) -> Result<VerifyResult, EngineError> {
    check_interfaces(block.interface(), &spec.interface, "block and spec")?;
    let cycles = cfg.unwind_cycles.max(1);
    let mut solver = solver_for(cfg.seed);
    let mut enc = Encoder::new();
    let (mut state, init_vars) = unroll_init(&mut solver, block, cfg.symbolic_init);
    let inputs = block.interface().inputs();
    let mut unrolled = Unrolled { init_vars, input_vars: Vec::new(), bad: Vec::new() };
    for _ in 0..cycles {
        let (input_env, vars) = fresh_env(&mut solver, &inputs);
        let env = encode_cycle(&mut solver, &mut enc, block, &state, &input_env);
        unrolled.bad.push(spec_violated(&mut solver, &mut enc, spec, &env));
        unrolled.input_vars.push(vars);
        state = next_state(block, &env);
    }
    let Some((t, init, input_cycles)) = unrolled.shortest(&mut solver, &mut enc) else {
        return Ok(VerifyResult::Verified(cycles));
    };
    let init_state = full_init(block, init);
    let trace = simulate(block, &input_cycles, &init_state).expect("decoded inputs cover the interface");
    let origin = spec
        .violation(&observe(&trace, t))
        .expect("observation binds every spec variable")
        .expect("counterexample must replay");
    Ok(VerifyResult::Violated(Counterexample {
        init_state,
        input_cycles,
        violated: spec.describe(origin).to_string(),
        origin: Some(origin),
        cycle_index: t,
    }))
}

/// Checks that two blocks produce the same outputs from every initial
/// state and input sequence up to `cfg.unwind_cycles` cycles.
pub fn equivalent(a: &Block, b: &Block, cfg: &SynthConfig) -> Result<VerifyResult, EngineError> {
    check_interfaces(a.interface(), b.interface(), "block")?;
    let cycles = cfg.unwind_cycles.max(1);
    let mut solver = solver_for(cfg.seed);
    let mut enc = Encoder::new();
    let (init_env, init_vars) = unroll_init(&mut solver, a, true);
    let (mut sa, mut sb) = (init_env.clone(), init_env);
    let inputs = a.interface().inputs();
    let outputs = a.interface().outputs();
    let mut unrolled = Unrolled { init_vars, input_vars: Vec::new(), bad: Vec::new() };
    for _ in 0..cycles {
        let (input_env, vars) = fresh_env(&mut solver, &inputs);
        let ea = encode_cycle(&mut solver, &mut enc, a, &sa, &input_env);
        let eb = encode_cycle(&mut solver, &mut enc, b, &sb, &input_env);
        let diffs: Vec<Signal> = outputs.iter().map(|o| enc.xor(&mut solver, ea[o], eb[o])).collect();
        unrolled.bad.push(enc.any(&mut solver, &diffs));
        unrolled.input_vars.push(vars);
        sa = next_state(a, &ea);
        sb = next_state(b, &eb);
    }
    let Some((t, init, input_cycles)) = unrolled.shortest(&mut solver, &mut enc) else {
        return Ok(VerifyResult::Verified(cycles));
    };
    let init_state = full_init(a, init);
    let ta = simulate(a, &input_cycles, &init_state).expect("decoded inputs cover the interface");
    let tb = simulate(b, &input_cycles, &init_state).expect("decoded inputs cover the interface");
    let differing: Vec<String> = outputs
        .iter()
        .filter(|o| ta.cycles[t].outputs.get(o) != tb.cycles[t].outputs.get(o))
        .map(|o| o.to_string())
        .collect();
    assert!(!differing.is_empty(), "equivalence counterexample must replay");
    Ok(VerifyResult::Violated(Counterexample {
        init_state,
        input_cycles,
        violated: format!("outputs differ: {}", differing.join(", ")),
        origin: None,
        cycle_index: t,
    }))
}
