use std::time::{Duration, Instant};

use blocksynth::engine::{synthesize, EngineError, SynthConfig};
use blocksynth::spec::{compile_spec, ConstraintList};
use blocksynth::{run_cycle, Assignment, Block};
use thiserror::Error;

use crate::scenario::Scenario;
use crate::stats::{stats, BenchStats, StatsError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("repeat {repeat}: synthesized block disagrees with the table at {pattern}")]
    Validation { repeat: usize, pattern: Assignment },
}

#[derive(Debug, Clone)]
pub struct BenchRun {
    pub seed: u64,
    pub block: Block,
    /// Time spent inside the synthesis call.
    pub time: Duration,
    pub synthesis_calls: usize,
    pub slots: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub name: String,
    pub runs: Vec<BenchRun>,
    pub stats: BenchStats,
}

/// Checks every input pattern of `block` against `reference`.
pub fn validate(block: &Block, reference: &dyn Fn(&[bool]) -> Vec<bool>) -> Result<(), Assignment> {
    let inputs = block.interface().inputs();
    let outputs = block.interface().outputs();
    let state = Assignment::new();
    for p in 0..1u64 << inputs.len() {
        let x = Assignment::from_bits(&inputs, p);
        let bits: Vec<bool> = (0..inputs.len()).map(|i| p >> i & 1 == 1).collect();
        let (got, _) = run_cycle(block, &state, &x).expect("combinational block over its own inputs");
        let want = reference(&bits);
        if outputs.iter().zip(want).any(|(o, w)| got.get(o) != Some(w)) {
            return Err(x);
        }
    }
    Ok(())
}

/// Synthesizes `list` `repeats` times with seeds `cfg.seed`, `cfg.seed + 1`,
/// ..., validating each result; only the synthesis call is timed.
pub fn bench_list(
    name: &str,
    list: &ConstraintList,
    reference: &dyn Fn(&[bool]) -> Vec<bool>,
    repeats: usize,
    cfg: &SynthConfig,
) -> Result<BenchReport, BenchError> {
    if repeats < 2 {
        return Err(StatsError::InsufficientSamples(repeats).into());
    }
    let spec = compile_spec(list).expect("scenario tables compile");
    let mut runs = Vec::with_capacity(repeats);
    for repeat in 0..repeats {
        let seed = cfg.seed.wrapping_add(repeat as u64);
        let started = Instant::now();
        let result = synthesize(list.interface(), &spec, &cfg.clone().with_seed(seed))?;
        let time = started.elapsed();
        validate(&result.block, reference).map_err(|pattern| BenchError::Validation { repeat, pattern })?;
        runs.push(BenchRun {
            seed,
            synthesis_calls: result.synthesis_calls(),
            slots: result.slots_used,
            iterations: result.iterations,
            block: result.block,
            time,
        });
    }
    let stats = stats(&runs.iter().map(|r| r.time).collect::<Vec<_>>())?;
    Ok(BenchReport { name: name.to_string(), runs, stats })
}

pub fn bench_run(scenario: Scenario, repeats: usize, cfg: &SynthConfig) -> Result<BenchReport, BenchError> {
    bench_list(scenario.keyword(), &scenario.constraint_list(), &|x| scenario.reference(x), repeats, cfg)
}
