//! Domain model for Boolean PLC blocks and the reference scan-cycle
//! simulator used as ground truth by the rest of the crate.

mod assignment;
mod expr;
mod sim;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use assignment::Assignment;
pub use expr::{eval_expr, BinOp, BoolExpr, MAX_DEPTH};
pub use sim::{run_cycle, simulate, Cycle, Trace};

pub const MAX_IDENTIFIER_LEN: usize = 64;

/// Words reserved by the ST and IL front ends. Identifiers may not collide
/// with them (compared case-insensitively).
pub const RESERVED_WORDS: &[&str] = &[
    "FUNCTION_BLOCK",
    "END_FUNCTION_BLOCK",
    "VAR_INPUT",
    "VAR_OUTPUT",
    "VAR",
    "VAR_TEMP",
    "END_VAR",
    "BEGIN",
    "BOOL",
    "AND",
    "OR",
    "XOR",
    "NOT",
    "TRUE",
    "FALSE",
    "LD",
    "LDN",
    "ST",
    "ANDN",
    "ORN",
    "XORN",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("`{0}` is a reserved word")]
    ReservedIdentifier(String),
    #[error("variable `{0}` declared more than once")]
    DuplicateDeclaration(Identifier),
    #[error("unbound variable `{0}`")]
    UnboundVariable(Identifier),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(Identifier),
    #[error("cannot assign to input `{0}`")]
    AssignToInput(Identifier),
    #[error("temp variable `{0}` read before assignment")]
    UnassignedTemp(Identifier),
    #[error("expression nesting exceeds {MAX_DEPTH}")]
    DepthExceeded,
    #[error("missing value for {direction} `{name}`")]
    MissingValue { name: Identifier, direction: Direction },
    #[error("`{0}` is not part of the block interface")]
    ExtraneousValue(Identifier),
    #[error("cycle {cycle}: {source}")]
    AtCycle {
        cycle: usize,
        #[source]
        source: Box<ModelError>,
    },
}

/// A validated variable or block name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identifier(String);

impl Identifier {
    pub fn new(text: &str) -> Result<Self, ModelError> {
        let mut chars = text.chars();
        let valid = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            }
            _ => false,
        };
        if !valid || text.len() > MAX_IDENTIFIER_LEN {
            return Err(ModelError::InvalidIdentifier(text.to_string()));
        }
        if is_reserved(text) {
            return Err(ModelError::ReservedIdentifier(text.to_string()));
        }
        Ok(Identifier(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub fn is_reserved(word: &str) -> bool {
    RESERVED_WORDS.iter().any(|r| r.eq_ignore_ascii_case(word))
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Identifier {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identifier::new(s)
    }
}

impl AsRef<str> for Identifier {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Input,
    Output,
    State,
    Temp,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Input => "input",
            Direction::Output => "output",
            Direction::State => "state",
            Direction::Temp => "temp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DataType {
    #[default]
    Bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: Identifier,
    pub direction: Direction,
    pub dtype: DataType,
}

impl VarDecl {
    pub fn new(name: Identifier, direction: Direction) -> Self {
        VarDecl { name, direction, dtype: DataType::Bool }
    }
}

/// Ordered variable declarations of a block. Names are unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BlockInterface {
    decls: Vec<VarDecl>,
}

impl BlockInterface {
    pub fn new(decls: Vec<VarDecl>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for decl in &decls {
            if !seen.insert(&decl.name) {
                return Err(ModelError::DuplicateDeclaration(decl.name.clone()));
            }
        }
        Ok(BlockInterface { decls })
    }

    /// Shorthand for tests and fixed scenarios: inputs then outputs.
    pub fn with_io(inputs: &[&str], outputs: &[&str]) -> Result<Self, ModelError> {
        let mut decls = Vec::new();
        for name in inputs {
            decls.push(VarDecl::new(Identifier::new(name)?, Direction::Input));
        }
        for name in outputs {
            decls.push(VarDecl::new(Identifier::new(name)?, Direction::Output));
        }
        BlockInterface::new(decls)
    }

    pub fn decls(&self) -> &[VarDecl] {
        &self.decls
    }

    pub fn get(&self, name: &Identifier) -> Option<&VarDecl> {
        self.decls.iter().find(|d| &d.name == name)
    }

    pub fn direction_of(&self, name: &Identifier) -> Option<Direction> {
        self.get(name).map(|d| d.direction)
    }

    pub fn names_with(&self, direction: Direction) -> Vec<Identifier> {
        self.decls
            .iter()
            .filter(|d| d.direction == direction)
            .map(|d| d.name.clone())
            .collect()
    }

    pub fn inputs(&self) -> Vec<Identifier> {
        self.names_with(Direction::Input)
    }

    pub fn outputs(&self) -> Vec<Identifier> {
        self.names_with(Direction::Output)
    }

    pub fn states(&self) -> Vec<Identifier> {
        self.names_with(Direction::State)
    }

    pub fn temps(&self) -> Vec<Identifier> {
        self.names_with(Direction::Temp)
    }

    /// Declarations visible from outside the block (everything but temps),
    /// sorted by name so interfaces can be compared modulo order.
    pub fn external_signature(&self) -> BTreeSet<(Identifier, Direction)> {
        self.decls
            .iter()
            .filter(|d| d.direction != Direction::Temp)
            .map(|d| (d.name.clone(), d.direction))
            .collect()
    }

    /// Checks that every variable of `expr` is declared.
    pub fn check_expr(&self, expr: &BoolExpr) -> Result<(), ModelError> {
        if expr.depth() > MAX_DEPTH {
            return Err(ModelError::DepthExceeded);
        }
        for name in expr.vars() {
            if self.get(&name).is_none() {
                return Err(ModelError::UndeclaredVariable(name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Statement {
    pub target: Identifier,
    pub rhs: BoolExpr,
}

impl Statement {
    pub fn new(target: Identifier, rhs: BoolExpr) -> Self {
        Statement { target, rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Lang {
    #[default]
    St,
    Il,
}

impl Lang {
    pub fn extension(self) -> &'static str {
        match self {
            Lang::St => "st",
            Lang::Il => "il",
        }
    }

    pub fn other(self) -> Lang {
        match self {
            Lang::St => Lang::Il,
            Lang::Il => Lang::St,
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lang::St => "ST",
            Lang::Il => "IL",
        })
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "st" => Ok(Lang::St),
            "il" => Ok(Lang::Il),
            other => Err(format!("unknown language `{other}` (expected st or il)")),
        }
    }
}

/// A PLC program unit: interface plus straight-line assignment body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    name: Identifier,
    interface: BlockInterface,
    body: Vec<Statement>,
    lang: Lang,
}

impl Block {
    /// Validates and builds a block.
    ///
    /// Rejects assignments to inputs, undeclared variables, and temps that
    /// may be read before they are written in a cycle.
    pub fn new(
        name: Identifier,
        interface: BlockInterface,
        body: Vec<Statement>,
        lang: Lang,
    ) -> Result<Self, ModelError> {
        let mut assigned_temps = HashSet::new();
        for stmt in &body {
            interface.check_expr(&stmt.rhs)?;
            for var in stmt.rhs.vars() {
                if interface.direction_of(&var) == Some(Direction::Temp)
                    && !assigned_temps.contains(&var)
                {
                    return Err(ModelError::UnassignedTemp(var));
                }
            }
            match interface.direction_of(&stmt.target) {
                None => return Err(ModelError::UndeclaredVariable(stmt.target.clone())),
                Some(Direction::Input) => {
                    return Err(ModelError::AssignToInput(stmt.target.clone()))
                }
                Some(Direction::Temp) => {
                    assigned_temps.insert(stmt.target.clone());
                }
                Some(_) => {}
            }
        }
        Ok(Block { name, interface, body, lang })
    }

    pub fn name(&self) -> &Identifier {
        &self.name
    }

    pub fn interface(&self) -> &BlockInterface {
        &self.interface
    }

    pub fn body(&self) -> &[Statement] {
        &self.body
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    pub fn with_lang(mut self, lang: Lang) -> Self {
        self.lang = lang;
        self
    }

    pub fn is_combinational(&self) -> bool {
        self.interface.states().is_empty()
    }

    /// Expression each output holds at the end of a cycle, with temps and
    /// earlier assignments inlined. Outputs never assigned are `FALSE`;
    /// state variables appear as their value at the start of the cycle.
    pub fn output_exprs(&self) -> Vec<(Identifier, BoolExpr)> {
        let env = self.final_exprs();
        self.interface
            .outputs()
            .into_iter()
            .map(|o| {
                let e = env
                    .iter()
                    .find(|(n, _)| n == &o)
                    .map(|(_, e)| e.clone())
                    .unwrap_or(BoolExpr::Const(false));
                (o, e)
            })
            .collect()
    }

    /// Next-state expressions, inlined like [`Block::output_exprs`].
    pub fn next_state_exprs(&self) -> Vec<(Identifier, BoolExpr)> {
        let env = self.final_exprs();
        self.interface
            .states()
            .into_iter()
            .map(|s| {
                let e = env
                    .iter()
                    .find(|(n, _)| n == &s)
                    .map(|(_, e)| e.clone())
                    .unwrap_or_else(|| BoolExpr::Var(s.clone()));
                (s, e)
            })
            .collect()
    }

    fn final_exprs(&self) -> Vec<(Identifier, BoolExpr)> {
        let mut env: Vec<(Identifier, BoolExpr)> = self
            .interface
            .outputs()
            .into_iter()
            .map(|o| (o, BoolExpr::Const(false)))
            .collect();
        for stmt in &self.body {
            let rhs = stmt.rhs.substitute(&|id: &Identifier| {
                env.iter().find(|(n, _)| n == id).map(|(_, e)| e.clone())
            });
            match env.iter_mut().find(|(n, _)| n == &stmt.target) {
                Some(slot) => slot.1 = rhs,
                None => env.push((stmt.target.clone(), rhs)),
            }
        }
        env
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Identifier {
        Identifier::new(s).unwrap()
    }

    #[test]
    fn identifier_rules() {
        assert!(Identifier::new("a_1").is_ok());
        assert!(Identifier::new("_x").is_ok());
        assert!(Identifier::new("1a").is_err());
        assert!(Identifier::new("").is_err());
        assert!(Identifier::new("a-b").is_err());
        assert!(Identifier::new(&"x".repeat(64)).is_ok());
        assert!(Identifier::new(&"x".repeat(65)).is_err());
        assert_eq!(
            Identifier::new("and"),
            Err(ModelError::ReservedIdentifier("and".into()))
        );
    }

    #[test]
    fn duplicate_declarations_rejected() {
        let decls = vec![
            VarDecl::new(id("a"), Direction::Input),
            VarDecl::new(id("a"), Direction::Output),
        ];
        assert_eq!(
            BlockInterface::new(decls),
            Err(ModelError::DuplicateDeclaration(id("a")))
        );
    }

    #[test]
    fn block_validation() {
        let mut decls = BlockInterface::with_io(&["a"], &["y"]).unwrap().decls().to_vec();
        decls.push(VarDecl::new(id("t"), Direction::Temp));
        let iface = BlockInterface::new(decls).unwrap();

        let assign_input = vec![Statement::new(id("a"), BoolExpr::Const(true))];
        assert_eq!(
            Block::new(id("B"), iface.clone(), assign_input, Lang::St),
            Err(ModelError::AssignToInput(id("a")))
        );

        let temp_first = vec![Statement::new(id("y"), BoolExpr::named("t"))];
        assert_eq!(
            Block::new(id("B"), iface.clone(), temp_first, Lang::St),
            Err(ModelError::UnassignedTemp(id("t")))
        );

        let undeclared = vec![Statement::new(id("y"), BoolExpr::named("q"))];
        assert_eq!(
            Block::new(id("B"), iface.clone(), undeclared, Lang::St),
            Err(ModelError::UndeclaredVariable(id("q")))
        );

        let ok = vec![
            Statement::new(id("t"), BoolExpr::named("a")),
            Statement::new(id("y"), BoolExpr::not(BoolExpr::named("t"))),
        ];
        let block = Block::new(id("B"), iface, ok, Lang::St).unwrap();
        assert_eq!(
            block.output_exprs(),
            vec![(id("y"), BoolExpr::not(BoolExpr::named("a")))]
        );
    }
}
