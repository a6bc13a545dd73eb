use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Duration;

use blocksynth::engine::{
    extend, repair, simplify, synthesize, verify, EngineError, SynthConfig, SynthesisResult, VerifyResult,
};
use blocksynth::lang::{emit, parse, translate};
use blocksynth::spec::{check_consistency, compile_spec, load_constraints, ConstraintList, SpecFormula};
use blocksynth::{Block, Lang};
use clap::{Args, Parser, Subcommand};

use crate::bench::{bench_run, BenchError};
use crate::project::lang_of;
use crate::scenario::Scenario;

#[derive(Debug, Parser)]
#[command(name = "blocksynth", version, about = "Synthesize, verify, repair and translate Boolean PLC blocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file (defaults next to the input, or `<block>.<ext>` for synth)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a block from a constraint list
    Synth {
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long, default_value = "st")]
        lang: Lang,
        #[arg(long, default_value_t = 31)]
        max_slots: usize,
        /// One synthesis run for all outputs together
        #[arg(long)]
        joint: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check a block against a constraint list
    Verify {
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        cycles: u64,
        /// Start from any state instead of all-false
        #[arg(long)]
        symbolic_init: bool,
    },
    /// Change a block as little as possible to meet a constraint list
    Repair {
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Smallest block with the same behavior
    Simplify {
        #[arg(long)]
        block: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Add the behavior of a constraint list to a block
    Extend {
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Convert a block between ST and IL
    Translate {
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        to: Lang,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the warehouse benchmark components
    Bench {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10)]
        repeat: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Report rows of a constraint list that contradict each other
    Check {
        #[arg(long)]
        constraints: PathBuf,
    },
}

/// How a command ended; each variant has its own exit code.
#[derive(Debug)]
enum Failure {
    /// Violated, unsatisfiable or inconsistent.
    Negative(String),
    /// Bad arguments, unreadable or malformed input.
    Usage(String),
    /// Size bound exceeded or anything unexpected.
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Negative(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Negative(m) | Failure::Usage(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Unsatisfiable { .. } => Failure::Negative(e.to_string()),
            EngineError::SizeBoundExceeded(_) => Failure::Internal(e.to_string()),
            EngineError::Type(_) | EngineError::Unsupported(_) => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs one command line; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    // A panic is a bug, but it still has to end in a defined exit code.
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| dispatch(cli.command, stdout)))
        .unwrap_or_else(|_| Err(Failure::Internal("internal error".into())));
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.exit_code()
        }
    }
}

fn read_block(path: &Path) -> Result<Block, Failure> {
    let lang = lang_of(path)
        .ok_or_else(|| Failure::Usage(format!("{}: block files must end in .st or .il", path.display())))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse(&text, lang).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_constraints(path: &Path) -> Result<ConstraintList, Failure> {
    load_constraints(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<SpecFormula, Failure> {
    compile_spec(&read_constraints(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_block(block: &Block, path: &Path) -> Result<(), Failure> {
    fs::write(path, emit(block, block.lang())).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

/// `dir/stem.<tag>.<ext>` next to the input block.
fn beside(input: &Path, tag: &str, lang: Lang) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("block");
    input.with_file_name(format!("{stem}.{tag}.{}", lang.extension()))
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn report(out: &mut dyn Write, path: &Path, result: &SynthesisResult) -> Outcome {
    let _ = writeln!(
        out,
        "wrote {}: {} slots, {} iterations, {} changed nodes, {:.1} ms",
        path.display(),
        result.slots_used,
        result.iterations,
        result.changed_nodes,
        millis(result.wall_time)
    );
    Ok(0)
}

fn finish(out: &mut dyn Write, result: SynthesisResult, path: PathBuf) -> Outcome {
    write_block(&result.block, &path)?;
    report(out, &path, &result)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Synth { constraints, lang, max_slots, joint, out: o } => {
            if max_slots == 0 {
                return Err(Failure::Usage("--max-slots must be at least 1".into()));
            }
            let spec = read_spec(&constraints)?;
            let cfg = SynthConfig { seed: o.seed, max_slots, per_output: !joint, ..SynthConfig::default() };
            let mut result = synthesize(&spec.interface, &spec, &cfg)?;
            result.block = result.block.with_lang(lang);
            let path = o.out.unwrap_or_else(|| PathBuf::from(format!("{}.{}", spec.block_name, lang.extension())));
            finish(out, result, path)
        }
        Command::Verify { block, constraints, cycles, symbolic_init } => {
            let b = read_block(&block)?;
            let spec = read_spec(&constraints)?;
            let cfg = SynthConfig { unwind_cycles: cycles as usize, symbolic_init, ..SynthConfig::default() };
            match verify(&b, &spec, &cfg)? {
                VerifyResult::Verified(k) => {
                    let _ = writeln!(out, "Verified ({k} cycles)");
                    Ok(0)
                }
                VerifyResult::Violated(cex) => {
                    let _ = writeln!(out, "{cex}");
                    Ok(1)
                }
            }
        }
        Command::Repair { block, constraints, out: o } => {
            let b = read_block(&block)?;
            let spec = read_spec(&constraints)?;
            let result = repair(&b, &spec, &SynthConfig::default().with_seed(o.seed))?;
            finish(out, result, o.out.unwrap_or_else(|| beside(&block, "repaired", b.lang())))
        }
        Command::Simplify { block, out: o } => {
            let b = read_block(&block)?;
            let result = simplify(&b, &SynthConfig::default().with_seed(o.seed))?;
            finish(out, result, o.out.unwrap_or_else(|| beside(&block, "simplified", b.lang())))
        }
        Command::Extend { block, constraints, out: o } => {
            let b = read_block(&block)?;
            let extra = read_constraints(&constraints)?;
            let result = extend(&b, &extra, &SynthConfig::default().with_seed(o.seed))?;
            finish(out, result, o.out.unwrap_or_else(|| beside(&block, "extended", b.lang())))
        }
        Command::Translate { block, to, out: o } => {
            let b = read_block(&block)?;
            let translated = translate(&b, to).map_err(|e| Failure::Internal(e.to_string()))?;
            let path = o.unwrap_or_else(|| {
                if b.lang() == to {
                    beside(&block, "translated", to)
                } else {
                    block.with_extension(to.extension())
                }
            });
            write_block(&translated, &path)?;
            let _ = writeln!(out, "wrote {}", path.display());
            Ok(0)
        }
        Command::Bench { scenario, repeat, seed } => {
            if repeat < 2 {
                return Err(Failure::Usage("--repeat must be at least 2".into()));
            }
            let report = bench_run(scenario, repeat, &SynthConfig::default().with_seed(seed)).map_err(|e| match e {
                BenchError::Engine(e) => Failure::from(e),
                other => Failure::Internal(other.to_string()),
            })?;
            let _ = writeln!(out, "scenario {scenario}: {repeat} repeats");
            for (i, r) in report.runs.iter().enumerate() {
                let body: Vec<String> = r.block.body().iter().map(|s| format!("{} := {};", s.target, s.rhs)).collect();
                let _ = writeln!(
                    out,
                    "repeat {i} seed {}: {} slots, {} calls, {} iterations, {:.3} ms: {}",
                    r.seed,
                    r.slots,
                    r.synthesis_calls,
                    r.iterations,
                    millis(r.time),
                    body.join(" ")
                );
            }
            let _ = writeln!(
                out,
                "mean {:.3} ms, stddev {:.3} ms",
                report.stats.mean_secs * 1e3,
                report.stats.stddev_secs * 1e3
            );
            Ok(0)
        }
        Command::Check { constraints } => {
            let list = read_constraints(&constraints)?;
            let report = check_consistency(&list);
            if report.is_consistent() {
                let _ = writeln!(out, "consistent");
                return Ok(0);
            }
            for c in &report.conflicts {
                let _ = writeln!(
                    out,
                    "conflict: constraints {} and {} disagree on {} at {}",
                    c.first, c.second, c.output, c.witness
                );
            }
            Ok(1)
        }
    }
}
