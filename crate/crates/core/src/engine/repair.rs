//! Minimal-edit repair, plus simplify and extend built on top of it.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bmc::{solver_for, verify};
use super::cegis::{assemble, cegis, check_synthesizable, group_problem, summarize, synthesize, Problem};
use super::program::{Program, SlotOp, Src};
use super::template::{at_least_counter, Shape, Template};
use super::{run_seed, EngineError, OutputRun, SynthConfig, SynthesisResult};
use crate::model::{Block, BoolExpr, Identifier};
use crate::sat::{Encoder, Literal, SatResult, Signal, Solver};
use crate::spec::{compile_spec, ConstraintList, SpecFormula};

/// The spec that pins every output of a combinational block to its
/// current value.
pub fn behavior_spec(block: &Block) -> SpecFormula {
    let mut spec = SpecFormula::new(block.name().clone(), public_interface(block));
    for (o, e) in block.output_exprs() {
        let origin = spec.add_origin(format!("behavior of {o}"));
        spec.oblige(o.clone(), e.clone(), true, origin);
        spec.oblige(o, BoolExpr::not(e), false, origin);
    }
    spec
}

fn public_interface(block: &Block) -> crate::model::BlockInterface {
    let decls = block
        .interface()
        .decls()
        .iter()
        .filter(|d| d.direction != crate::model::Direction::Temp)
        .cloned()
        .collect();
    crate::model::BlockInterface::new(decls).expect("subset of a valid interface")
}

fn unchanged(block: &Block, started: Instant) -> SynthesisResult {
    SynthesisResult {
        block: block.clone(),
        iterations: 0,
        counterexamples_used: 0,
        slots_used: block.output_exprs().iter().map(|(_, e)| e.operator_count().max(1)).sum(),
        changed_nodes: 0,
        wall_time: started.elapsed(),
        runs: Vec::new(),
    }
}

fn require_combinational(block: &Block, what: &str) -> Result<(), EngineError> {
    if block.is_combinational() {
        Ok(())
    } else {
        Err(EngineError::Unsupported(format!("{what} of blocks with state variables")))
    }
}

/// Solves under `assumptions` until a candidate passes the check or the
/// template is exhausted. Examples added here stay valid for any later
/// assumptions because they only constrain the candidate's behavior.
fn refine(
    problem: &Problem,
    solver: &mut Solver,
    enc: &mut Encoder,
    template: &Template,
    assumptions: &[Literal],
    examples: &mut Vec<Vec<bool>>,
    rng: &mut ChaCha8Rng,
    seed: u64,
    iterations: &mut usize,
) -> Result<Option<Program>, EngineError> {
    loop {
        *iterations += 1;
        let SatResult::Sat(model) = solver.solve(assumptions) else { return Ok(None) };
        let program = template.decode(&model);
        match problem.counterexample(&program, rng, seed) {
            None => return Ok(Some(program)),
            Some(ex) => {
                assert!(!examples.contains(&ex), "counterexample repeated");
                let outs = template.add_example(solver, &ex);
                problem.constrain(solver, enc, &ex, &outs)?;
                examples.push(ex);
            }
        }
    }
}

/// Template layout for an edit budget: the original slots in order, with
/// `budget` free slots before and after them and one between each pair.
struct Layout {
    /// Template position of each original slot.
    position: Vec<usize>,
    size: usize,
}

impl Layout {
    fn new(original: usize, budget: usize) -> Layout {
        let mut position = Vec::with_capacity(original);
        let mut next = budget;
        for j in 0..original {
            if j > 0 {
                next += 1;
            }
            position.push(next);
            next += 1;
        }
        Layout { position, size: next + budget }
    }
}

struct Edit {
    program: Program,
    changed: usize,
}

/// Cheapest edit of `original` (fewest changed slots, then fewest slots)
/// that meets the problem's spec, if one exists within `max_changes`.
fn minimal_edit(
    problem: &Problem,
    original: &Program,
    max_changes: usize,
    seed: u64,
    examples: &mut Vec<Vec<bool>>,
    iterations: &mut usize,
) -> Result<Option<Edit>, EngineError> {
    let n = problem.inputs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for budget in 1..=max_changes {
        let layout = Layout::new(original.slots.len(), budget);
        let mut solver = solver_for(seed);
        let mut enc = Encoder::new();
        let shape = Shape {
            num_inputs: n,
            num_slots: layout.size,
            num_outputs: 1,
            last_slot_output: false,
            symmetry_breaking: false,
        };
        let template = Template::build(&mut solver, shape);
        for ex in examples.iter() {
            let outs = template.add_example(&mut solver, ex);
            problem.constrain(&mut solver, &mut enc, ex, &outs)?;
        }
        let live = template.liveness(&mut solver, &mut enc);
        let map_src = |s: Src| match s {
            Src::Input(i) => i,
            Src::Slot(j) => n + layout.position[j],
        };
        let mut is_original = vec![false; layout.size];
        let mut costs = Vec::new();
        for (j, op) in original.slots.iter().enumerate() {
            let p = layout.position[j];
            is_original[p] = true;
            let keep: Vec<Signal> = template.matches(p, op, &map_src).into_iter().map(Signal::Lit).collect();
            let keep = !enc.any(&mut solver, &keep.into_iter().map(|s| !s).collect::<Vec<_>>());
            let kept = enc.and(&mut solver, live[p], keep);
            costs.push(enc.literal(&mut solver, !kept));
        }
        for (p, l) in live.iter().enumerate() {
            if !is_original[p] {
                costs.push(enc.literal(&mut solver, *l));
            }
        }
        let cost = at_least_counter(&mut solver, &costs, budget + 1);
        let within: Vec<Literal> = cost.get(budget).map(|c| !*c).into_iter().collect();
        let Some(mut best) =
            refine(problem, &mut solver, &mut enc, &template, &within, examples, &mut rng, seed, iterations)?
        else {
            continue;
        };
        // Same number of changes, fewer slots.
        let live_lits: Vec<Literal> = live.iter().map(|l| enc.literal(&mut solver, *l)).collect();
        let size = at_least_counter(&mut solver, &live_lits, layout.size);
        loop {
            let slots = best.live_count();
            if slots <= 1 {
                break;
            }
            let mut assumptions = within.clone();
            assumptions.push(!size[slots - 2]);
            match refine(problem, &mut solver, &mut enc, &template, &assumptions, examples, &mut rng, seed, iterations)? {
                Some(p) => best = p,
                None => break,
            }
        }
        keep_operand_order(original, &mut best, &layout);
        let changed = edit_distance(original, &best, &layout);
        return Ok(Some(Edit { program: best.pruned(), changed }));
    }
    Ok(None)
}

fn at_position(op: &SlotOp, layout: &Layout) -> SlotOp {
    remap(op, &|s| match s {
        Src::Input(i) => Src::Input(i),
        Src::Slot(k) => Src::Slot(layout.position[k]),
    })
}

/// Binary operators commute; a changed operator keeps its operands in
/// the original order.
fn keep_operand_order(original: &Program, program: &mut Program, layout: &Layout) {
    for (j, op) in original.slots.iter().enumerate() {
        let p = layout.position[j];
        if let (SlotOp::Bin(_, l0, r0), SlotOp::Bin(b, l, r)) = (at_position(op, layout), program.slots[p]) {
            if (l, r) == (r0, l0) {
                program.slots[p] = SlotOp::Bin(b, r, l);
            }
        }
    }
}

/// Changed slots of a decoded template program relative to `original`.
fn edit_distance(original: &Program, program: &Program, layout: &Layout) -> usize {
    let live = program.live();
    let mut changed = 0;
    let mut is_original = vec![false; program.slots.len()];
    for (j, op) in original.slots.iter().enumerate() {
        let p = layout.position[j];
        is_original[p] = true;
        let mapped = at_position(op, layout);
        if !live[p] || program.slots[p] != mapped {
            changed += 1;
        }
    }
    changed + (0..program.slots.len()).filter(|p| !is_original[*p] && live[*p]).count()
}

fn remap(op: &SlotOp, f: &dyn Fn(Src) -> Src) -> SlotOp {
    match *op {
        SlotOp::Const(c) => SlotOp::Const(c),
        SlotOp::Id(s) => SlotOp::Id(f(s)),
        SlotOp::Not(s) => SlotOp::Not(f(s)),
        SlotOp::Bin(b, l, r) => SlotOp::Bin(b, f(l), f(r)),
    }
}

/// Edits `block` as little as possible so that it meets `spec`.
pub fn repair(block: &Block, spec: &SpecFormula, cfg: &SynthConfig) -> Result<SynthesisResult, EngineError> {
    let started = Instant::now();
    let interface = public_interface(block);
    check_synthesizable(&interface, spec)?;
    require_combinational(block, "repair")?;
    let check = SynthConfig { unwind_cycles: 1, symbolic_init: false, ..cfg.clone() };
    if verify(block, spec, &check)?.is_verified() {
        return Ok(unchanged(block, started));
    }
    if !cfg.edit_penalty || !(cfg.per_output && spec.is_decomposable()) {
        return rebuilt(synthesize(&interface, spec, cfg)?, block);
    }
    let inputs = interface.inputs();
    let originals: BTreeMap<Identifier, BoolExpr> = block.output_exprs().into_iter().collect();
    let mut runs = Vec::new();
    for o in interface.outputs() {
        let run_started = Instant::now();
        let group = vec![o.clone()];
        let seed = run_seed(cfg.seed, &group);
        let problem = group_problem(spec, &interface, &group);
        let original = Program::from_expr(&originals[&o], &inputs).expect("combinational outputs read inputs only");
        let mut iterations = 0;
        let mut examples = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (program, changed) = if problem.counterexample(&original, &mut rng, seed).is_none() {
            (original, 0)
        } else {
            let scratch = cegis(&problem, cfg.max_slots, seed, Vec::new())?;
            iterations += scratch.iterations;
            examples = scratch.examples;
            let scratch_cost = original.slots.len() + scratch.program.slots.len();
            match minimal_edit(&problem, &original, scratch_cost - 1, seed, &mut examples, &mut iterations)? {
                Some(edit) => (edit.program, edit.changed),
                None => (scratch.program, scratch_cost),
            }
        };
        runs.push(OutputRun {
            outputs: group,
            slots: program.slots.len(),
            program,
            iterations,
            counterexamples: examples.len(),
            changed_nodes: changed,
            wall_time: run_started.elapsed(),
        });
    }
    let repaired = assemble(block.name(), &interface, &runs, block.lang());
    assert!(verify(&repaired, spec, &check)?.is_verified(), "repaired block must meet its spec");
    Ok(summarize(repaired, runs, started))
}

/// Keeps the original block's name and language on a fresh synthesis.
fn rebuilt(mut result: SynthesisResult, block: &Block) -> Result<SynthesisResult, EngineError> {
    let body = result.block.body().to_vec();
    result.block = Block::new(block.name().clone(), result.block.interface().clone(), body, block.lang())
        .expect("same body, same interface");
    Ok(result)
}

/// Smallest block with exactly the same outputs as `block`.
pub fn simplify(block: &Block, cfg: &SynthConfig) -> Result<SynthesisResult, EngineError> {
    require_combinational(block, "simplification")?;
    let spec = behavior_spec(block);
    rebuilt(synthesize(&spec.interface.clone(), &spec, cfg)?, block)
}

/// Adds the behavior described by `extra` to `block`, keeping the old
/// behavior wherever `extra` says nothing, with as few edits as possible.
pub fn extend(block: &Block, extra: &ConstraintList, cfg: &SynthConfig) -> Result<SynthesisResult, EngineError> {
    require_combinational(block, "extension")?;
    let interface = public_interface(block);
    if extra.interface().external_signature() != interface.external_signature() {
        return Err(EngineError::Type("constraint list interface differs from the block's".into()));
    }
    let added = compile_spec(extra).map_err(|e| EngineError::Type(e.to_string()))?;
    let originals: BTreeMap<Identifier, BoolExpr> = block.output_exprs().into_iter().collect();
    let as_before = |e: &BoolExpr| e.substitute(&|id: &Identifier| originals.get(id).cloned());

    let mut spec = added.clone();
    spec.block_name = block.name().clone();
    spec.interface = interface.clone();
    for (o, e) in &originals {
        // Patterns where the new constraints say something about `o`.
        let mut claimed: Vec<BoolExpr> =
            added.obligations.iter().filter(|ob| &ob.output == o).map(|ob| as_before(&ob.guard)).collect();
        for a in &added.assertions {
            if added.assertion_outputs(a).contains(o) {
                claimed.push(BoolExpr::not(as_before(&a.expr)));
            }
        }
        let free = BoolExpr::not(BoolExpr::any(claimed));
        let origin = spec.add_origin(format!("behavior of {o}"));
        spec.oblige(o.clone(), BoolExpr::and(free.clone(), e.clone()), true, origin);
        spec.oblige(o.clone(), BoolExpr::and(free, BoolExpr::not(e.clone())), false, origin);
    }
    repair(block, &spec, cfg)
}
