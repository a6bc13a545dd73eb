//! The synthesis loop: solve for a candidate consistent with the examples
//! seen so far, check it, and feed any counterexample back.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bmc::{solver_for, verify};
use super::program::Program;
use super::table::{self, Column, PatternSpace, MAX_EXHAUSTIVE_INPUTS};
use super::template::{Shape, Template};
use super::{run_seed, EngineError, OutputRun, SynthConfig, SynthesisResult, VerifyResult};
use crate::model::{Assignment, Block, BlockInterface, Direction, Identifier, Lang, Statement, VarDecl};
use crate::sat::{Encoder, SatResult, Signal, Solver};
use crate::spec::SpecFormula;
use crate::ClauseSink;

enum Checker {
    /// Whole truth table at once; guard columns of input-only obligations
    /// are cached.
    Exhaustive { space: PatternSpace, input_env: BTreeMap<Identifier, Column>, guards: Vec<Option<Column>> },
    /// SAT-based verification of each candidate.
    Symbolic,
}

/// One synthesis problem: produce `outputs` from `inputs` so that `spec`
/// holds.
pub(crate) struct Problem {
    pub spec: SpecFormula,
    pub interface: BlockInterface,
    pub inputs: Vec<Identifier>,
    pub outputs: Vec<Identifier>,
    checker: Checker,
}

impl Problem {
    pub fn new(spec: SpecFormula, interface: BlockInterface, outputs: Vec<Identifier>) -> Problem {
        let inputs = interface.inputs();
        let checker = if inputs.len() <= MAX_EXHAUSTIVE_INPUTS {
            let space = PatternSpace::new(inputs.clone());
            let input_env = space.input_env();
            let guards = spec
                .obligations
                .iter()
                .map(|ob| {
                    let input_only = ob.guard.vars().iter().all(|v| input_env.contains_key(v));
                    input_only.then(|| space.eval(&ob.guard, &input_env))
                })
                .collect();
            Checker::Exhaustive { space, input_env, guards }
        } else {
            Checker::Symbolic
        };
        Problem { spec, interface, inputs, outputs, checker }
    }

    /// Patterns at which the given output columns violate the spec.
    fn violations(&self, outs: &[Column]) -> Column {
        let Checker::Exhaustive { space, input_env, guards } = &self.checker else {
            unreachable!("only for exhaustive checking")
        };
        let mut env = input_env.clone();
        for (o, col) in self.outputs.iter().zip(outs) {
            env.insert(o.clone(), col.clone());
        }
        let mut bad = space.constant(false);
        for (ob, guard) in self.spec.obligations.iter().zip(guards) {
            let guard = guard.clone().unwrap_or_else(|| space.eval(&ob.guard, &env));
            let out = &env[&ob.output];
            let wrong = if ob.value { space.not(out) } else { out.clone() };
            bad = table::or(&bad, &table::and(&guard, &wrong));
        }
        for a in &self.spec.assertions {
            bad = table::or(&bad, &space.not(&space.eval(&a.expr, &env)));
        }
        bad
    }

    /// Fails when some input pattern admits no output values at all.
    pub fn check_satisfiable(&self) -> Result<(), EngineError> {
        match &self.checker {
            Checker::Exhaustive { space, .. } => {
                let m = self.outputs.len();
                if m > 10 {
                    return Ok(());
                }
                let mut ok = space.constant(false);
                for combo in 0..1usize << m {
                    let outs: Vec<Column> = (0..m).map(|i| space.constant(combo >> i & 1 == 1)).collect();
                    ok = table::or(&ok, &space.not(&self.violations(&outs)));
                }
                let missing = space.not(&ok);
                match table::nth_set(&missing, 0) {
                    None => Ok(()),
                    Some(p) => Err(self.unsatisfiable(space.assignment(p))),
                }
            }
            Checker::Symbolic => self.pairwise_conflicts(),
        }
    }

    fn unsatisfiable(&self, witness: Assignment) -> EngineError {
        let outputs: Vec<String> = self.outputs.iter().map(|o| o.to_string()).collect();
        EngineError::Unsatisfiable {
            reason: format!("no value of {} meets the spec at {witness}", outputs.join(", ")),
            witness: Some(witness),
        }
    }

    /// Above the enumeration limit only obligation pairs are compared:
    /// two guards that can hold together while demanding different values.
    fn pairwise_conflicts(&self) -> Result<(), EngineError> {
        let mut solver = solver_for(0);
        let mut enc = Encoder::new();
        let mut env = BTreeMap::new();
        let mut vars = Vec::new();
        for n in &self.inputs {
            let l = solver.new_var().positive();
            env.insert(n.clone(), Signal::Lit(l));
            vars.push((n.clone(), l));
        }
        let obs = &self.spec.obligations;
        let guards: Vec<Option<Signal>> = obs
            .iter()
            .map(|ob| enc.encode(&mut solver, &ob.guard, &|id: &Identifier| env.get(id).copied()).ok())
            .collect();
        for i in 0..obs.len() {
            for j in i + 1..obs.len() {
                if obs[i].output != obs[j].output || obs[i].value == obs[j].value {
                    continue;
                }
                let (Some(a), Some(b)) = (guards[i], guards[j]) else { continue };
                let both = enc.and(&mut solver, a, b);
                if both == Signal::Const(false) {
                    continue;
                }
                let lit = enc.literal(&mut solver, both);
                if let SatResult::Sat(model) = solver.solve(&[lit]) {
                    let witness = Assignment::from_pairs(vars.iter().map(|(n, l)| (n.clone(), model.lit_value(*l))));
                    return Err(self.unsatisfiable(witness));
                }
            }
        }
        Ok(())
    }

    /// Smallest slot count that can possibly work. An input is essential
    /// when flipping it alone moves the output between a pattern forced
    /// to 1 and one forced to 0. Every live slot other than the last
    /// feeds a later one, so `k` slots read at most `k + 1` inputs.
    pub fn min_slots(&self) -> usize {
        let Checker::Exhaustive { space, .. } = &self.checker else { return 1 };
        if self.outputs.len() != 1 {
            return 1;
        }
        let bad_if_false = self.violations(&[space.constant(false)]);
        let bad_if_true = self.violations(&[space.constant(true)]);
        let forced_true = table::and(&bad_if_false, &space.not(&bad_if_true));
        let forced_false = table::and(&bad_if_true, &space.not(&bad_if_false));
        let essential = (0..self.inputs.len())
            .filter(|i| {
                (0..space.num_patterns())
                    .any(|p| table::bit(&forced_true, p) && table::bit(&forced_false, p ^ (1 << i)))
            })
            .count();
        essential.saturating_sub(1).max(1)
    }

    /// Candidate block computing this problem's outputs with `program`;
    /// other outputs stay unassigned.
    pub fn candidate_block(&self, program: &Program) -> Block {
        let decls: Vec<VarDecl> = self
            .interface
            .decls()
            .iter()
            .filter(|d| d.direction != Direction::Temp)
            .cloned()
            .collect();
        let interface = BlockInterface::new(decls).expect("subset of a valid interface");
        let body = self
            .outputs
            .iter()
            .enumerate()
            .map(|(i, o)| Statement::new(o.clone(), program.output_expr(i, &self.inputs)))
            .collect();
        Block::new(self.spec.block_name.clone(), interface, body, Lang::St).expect("program only reads inputs")
    }

    /// An input pattern on which `program` violates the spec, if any.
    pub fn counterexample(&self, program: &Program, rng: &mut ChaCha8Rng, seed: u64) -> Option<Vec<bool>> {
        match &self.checker {
            Checker::Exhaustive { space, .. } => {
                let outs = program.eval_outputs(space, &space.inputs());
                let bad = self.violations(&outs);
                let n = table::count(&bad);
                if n == 0 {
                    return None;
                }
                let p = table::nth_set(&bad, rng.gen_range(0..n)).expect("n set bits");
                Some((0..self.inputs.len()).map(|i| p >> i & 1 == 1).collect())
            }
            Checker::Symbolic => {
                let cfg = SynthConfig { seed, unwind_cycles: 1, ..SynthConfig::default() };
                match verify(&self.candidate_block(program), &self.spec, &cfg).expect("interfaces match") {
                    VerifyResult::Verified(_) => None,
                    VerifyResult::Violated(cex) => {
                        let x = &cex.input_cycles[0];
                        Some(self.inputs.iter().map(|n| x.get(n).expect("total")).collect())
                    }
                }
            }
        }
    }

    /// Requires the spec to hold at `pattern` given the template's output
    /// signals there.
    pub fn constrain(
        &self,
        solver: &mut Solver,
        enc: &mut Encoder,
        pattern: &[bool],
        outs: &[Signal],
    ) -> Result<(), EngineError> {
        let mut env: BTreeMap<Identifier, Signal> =
            self.inputs.iter().cloned().zip(pattern.iter().map(|b| Signal::Const(*b))).collect();
        env.extend(self.outputs.iter().cloned().zip(outs.iter().copied()));
        let lookup = |id: &Identifier| env.get(id).copied();
        let mut bad = Vec::new();
        for ob in &self.spec.obligations {
            let guard = enc.encode(solver, &ob.guard, &lookup).expect("spec over interface");
            if guard == Signal::Const(false) {
                continue;
            }
            let out = env[&ob.output];
            bad.push(enc.and(solver, guard, if ob.value { !out } else { out }));
        }
        for a in &self.spec.assertions {
            bad.push(!enc.encode(solver, &a.expr, &lookup).expect("spec over interface"));
        }
        match enc.any(solver, &bad) {
            Signal::Const(false) => Ok(()),
            Signal::Const(true) => {
                let witness = Assignment::from_pairs(self.inputs.iter().cloned().zip(pattern.iter().copied()));
                Err(self.unsatisfiable(witness))
            }
            Signal::Lit(l) => {
                solver.add_clause(&[!l]);
                Ok(())
            }
        }
    }
}

pub(crate) struct RunOutcome {
    pub program: Program,
    pub iterations: usize,
    pub examples: Vec<Vec<bool>>,
}

/// Iterative deepening over slot counts with a CEGIS loop per count.
/// `examples` seeds the example set and receives every counterexample.
pub(crate) fn cegis(
    problem: &Problem,
    max_slots: usize,
    seed: u64,
    mut examples: Vec<Vec<bool>>,
) -> Result<RunOutcome, EngineError> {
    problem.check_satisfiable()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut iterations = 0;
    for k in problem.min_slots()..=max_slots {
        let mut solver = solver_for(seed);
        let mut enc = Encoder::new();
        let shape = Shape {
            num_inputs: problem.inputs.len(),
            num_slots: k,
            num_outputs: problem.outputs.len(),
            last_slot_output: problem.outputs.len() == 1,
            symmetry_breaking: true,
        };
        let template = Template::build(&mut solver, shape);
        for ex in &examples {
            let outs = template.add_example(&mut solver, ex);
            problem.constrain(&mut solver, &mut enc, ex, &outs)?;
        }
        loop {
            iterations += 1;
            let SatResult::Sat(model) = solver.solve(&[]) else { break };
            let program = template.decode(&model);
            match problem.counterexample(&program, &mut rng, seed) {
                None => return Ok(RunOutcome { program: program.pruned(), iterations, examples }),
                Some(ex) => {
                    // The candidate met every earlier example, so this one is new.
                    assert!(!examples.contains(&ex), "counterexample repeated");
                    let outs = template.add_example(&mut solver, &ex);
                    problem.constrain(&mut solver, &mut enc, &ex, &outs)?;
                    examples.push(ex);
                }
            }
        }
    }
    Err(EngineError::SizeBoundExceeded(max_slots))
}

pub(crate) fn check_synthesizable(interface: &BlockInterface, spec: &SpecFormula) -> Result<(), EngineError> {
    if interface.external_signature() != spec.interface.external_signature() {
        return Err(EngineError::Type("interface and spec differ".into()));
    }
    if !interface.states().is_empty() {
        return Err(EngineError::Unsupported("synthesis of blocks with state variables".into()));
    }
    if interface.outputs().is_empty() {
        return Err(EngineError::Type("interface has no outputs".into()));
    }
    Ok(())
}

/// Output groups solved independently: one per output when allowed.
pub(crate) fn output_groups(spec: &SpecFormula, outputs: &[Identifier], per_output: bool) -> Vec<Vec<Identifier>> {
    if per_output && spec.is_decomposable() {
        outputs.iter().map(|o| vec![o.clone()]).collect()
    } else {
        vec![outputs.to_vec()]
    }
}

pub(crate) fn group_problem(spec: &SpecFormula, interface: &BlockInterface, group: &[Identifier]) -> Problem {
    let spec = if group.len() == 1 { spec.restrict_to(&group[0]) } else { spec.clone() };
    Problem::new(spec, interface.clone(), group.to_vec())
}

/// Body assigning every output from the run that produced it.
pub(crate) fn assemble(
    name: &Identifier,
    interface: &BlockInterface,
    runs: &[OutputRun],
    lang: Lang,
) -> Block {
    let inputs = interface.inputs();
    let decls: Vec<VarDecl> =
        interface.decls().iter().filter(|d| d.direction != Direction::Temp).cloned().collect();
    let interface = BlockInterface::new(decls).expect("subset of a valid interface");
    let body = interface
        .outputs()
        .into_iter()
        .map(|o| {
            let (run, i) = runs
                .iter()
                .find_map(|r| r.outputs.iter().position(|x| *x == o).map(|i| (r, i)))
                .expect("every output synthesized");
            Statement::new(o, run.program.output_expr(i, &inputs))
        })
        .collect();
    Block::new(name.clone(), interface, body, lang).expect("programs only read inputs")
}

pub(crate) fn summarize(block: Block, runs: Vec<OutputRun>, started: Instant) -> SynthesisResult {
    SynthesisResult {
        block,
        iterations: runs.iter().map(|r| r.iterations).sum(),
        counterexamples_used: runs.iter().map(|r| r.counterexamples).sum(),
        slots_used: runs.iter().map(|r| r.slots).sum(),
        changed_nodes: runs.iter().map(|r| r.changed_nodes).sum(),
        wall_time: started.elapsed(),
        runs,
    }
}

/// Smallest straight-line program meeting `spec`, per output or jointly.
pub fn synthesize(
    interface: &BlockInterface,
    spec: &SpecFormula,
    cfg: &SynthConfig,
) -> Result<SynthesisResult, EngineError> {
    assert!(cfg.max_slots >= 1, "max_slots must be positive");
    check_synthesizable(interface, spec)?;
    let started = Instant::now();
    let mut runs = Vec::new();
    for group in output_groups(spec, &interface.outputs(), cfg.per_output) {
        let run_started = Instant::now();
        let problem = group_problem(spec, interface, &group);
        let outcome = cegis(&problem, cfg.max_slots, run_seed(cfg.seed, &group), Vec::new())?;
        runs.push(OutputRun {
            slots: outcome.program.slots.len(),
            outputs: group,
            program: outcome.program,
            iterations: outcome.iterations,
            counterexamples: outcome.examples.len(),
            changed_nodes: 0,
            wall_time: run_started.elapsed(),
        });
    }
    let block = assemble(&spec.block_name, interface, &runs, Lang::St);
    let check = SynthConfig { unwind_cycles: 1, symbolic_init: false, ..cfg.clone() };
    assert!(verify(&block, spec, &check)?.is_verified(), "synthesized block must meet its spec");
    Ok(summarize(block, runs, started))
}
