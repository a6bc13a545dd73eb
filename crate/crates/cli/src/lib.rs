//! Command-line front end and benchmark harness.

mod app;
pub mod bench;
pub mod project;
pub mod scenario;
pub mod stats;

pub use app::run;
pub use bench::{bench_list, bench_run, validate, BenchError, BenchReport, BenchRun};
pub use project::{ProjectError, ProjectLayout};
pub use scenario::Scenario;
pub use stats::{stats, BenchStats, StatsError};
