//! Synthesis, verification, repair, simplification and translation of
//! Boolean PLC function blocks driven by declarative constraint lists.

pub mod engine;
pub mod lang;
pub mod model;
pub mod sat;
pub mod spec;

pub use sat::ClauseSink;
pub use model::{
    eval_expr, run_cycle, simulate, Assignment, BinOp, Block, BlockInterface, BoolExpr, Direction,
    Identifier, Lang, ModelError, Statement, Trace, VarDecl,
};
