//! Verification and synthesis: bounded model checking of blocks against
//! specs, and the counterexample-guided loop behind generate, repair,
//! simplify and extend.

mod bmc;
mod cegis;
pub mod program;
mod repair;
pub mod table;
pub mod template;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::model::{Assignment, Block, Identifier};

pub use bmc::{equivalent, verify};
pub use cegis::synthesize;
pub use program::{Program, SlotOp, Src};
pub use repair::{behavior_spec, extend, repair, simplify};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Largest slot count tried per synthesis run.
    pub max_slots: usize,
    /// One independent run per output when the spec allows it.
    pub per_output: bool,
    /// Scan cycles unrolled by `verify` and `equivalent`.
    pub unwind_cycles: usize,
    /// Let `verify` start from any state instead of all-false.
    pub symbolic_init: bool,
    /// Repair and extend minimize the number of changed nodes; when off
    /// they resynthesize from scratch.
    pub edit_penalty: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            max_slots: 31,
            per_output: true,
            unwind_cycles: 1,
            symbolic_init: false,
            edit_penalty: true,
        }
    }
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unsatisfiable: {reason}")]
    Unsatisfiable { reason: String, witness: Option<Assignment> },
    #[error("no program with at most {0} slots satisfies the spec")]
    SizeBoundExceeded(usize),
    #[error("type error: {0}")]
    Type(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Initial state and input sequence that make a block violate its spec
/// (or make two blocks disagree) at `cycle_index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub init_state: Assignment,
    pub input_cycles: Vec<Assignment>,
    pub violated: String,
    /// Index of the violated constraint's origin in the spec, if any.
    pub origin: Option<usize>,
    pub cycle_index: usize,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, inputs) in self.input_cycles.iter().enumerate() {
            write!(f, "cycle {i}:")?;
            for (n, v) in inputs.iter() {
                write!(f, " {n}={}", u8::from(v))?;
            }
            if i == 0 {
                for (n, v) in self.init_state.iter() {
                    write!(f, " {n}@init={}", u8::from(v))?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "violated: {}", self.violated)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyResult {
    /// No violation within this many cycles.
    Verified(usize),
    Violated(Counterexample),
}

impl VerifyResult {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyResult::Verified(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            VerifyResult::Violated(c) => Some(c),
            VerifyResult::Verified(_) => None,
        }
    }
}

/// Statistics of one CEGIS run (one output, or all outputs jointly).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputRun {
    pub outputs: Vec<Identifier>,
    pub program: Program,
    pub iterations: usize,
    pub counterexamples: usize,
    pub slots: usize,
    pub changed_nodes: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub block: Block,
    pub iterations: usize,
    pub counterexamples_used: usize,
    pub slots_used: usize,
    /// Nodes added, modified or removed relative to the input block
    /// (repair and extend).
    pub changed_nodes: usize,
    pub wall_time: Duration,
    pub runs: Vec<OutputRun>,
}

impl SynthesisResult {
    /// Number of independent synthesis calls made.
    pub fn synthesis_calls(&self) -> usize {
        self.runs.len()
    }
}

/// Stable per-run seed derived from the configured seed and output names.
pub(crate) fn run_seed(seed: u64, outputs: &[Identifier]) -> u64 {
    // FNV-1a over the names.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for o in outputs {
        for b in o.as_str().bytes().chain([0]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    seed ^ h
}
