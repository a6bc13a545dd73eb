//! Constraint lists: the declarative description of a block, their XML
//! persistence, and compilation into obligations the engine can check.

mod xml;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{Assignment, BlockInterface, BoolExpr, Direction, Identifier, ModelError, VarDecl};

pub use xml::{load_constraints, parse_constraints, save_constraints, write_constraints};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Schema { line: u32, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("type error: {0}")]
    Type(String),
    #[error("renaming maps more than one variable to `{0}`")]
    RenameCollision(Identifier),
    #[error("renamed variable `{0}` is not part of the template")]
    MissingRenameTarget(Identifier),
}

impl From<ModelError> for SpecError {
    fn from(e: ModelError) -> Self {
        SpecError::Type(e.to_string())
    }
}

/// A truth-table cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriValue {
    T,
    F,
    DontCare,
}

impl TriValue {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            TriValue::T => Some(true),
            TriValue::F => Some(false),
            TriValue::DontCare => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            TriValue::T => '1',
            TriValue::F => '0',
            TriValue::DontCare => '-',
        }
    }

    pub fn from_symbol(c: &str) -> Option<TriValue> {
        match c {
            "1" => Some(TriValue::T),
            "0" => Some(TriValue::F),
            "-" => Some(TriValue::DontCare),
            _ => None,
        }
    }
}

impl From<bool> for TriValue {
    fn from(b: bool) -> Self {
        if b {
            TriValue::T
        } else {
            TriValue::F
        }
    }
}

/// One truth-table row. Cells keep the order they were written in;
/// a variable without a cell is a don't-care.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTableRow {
    pub inputs: Vec<(Identifier, TriValue)>,
    pub outputs: Vec<(Identifier, TriValue)>,
}

impl TruthTableRow {
    pub fn new(inputs: Vec<(Identifier, TriValue)>, outputs: Vec<(Identifier, TriValue)>) -> Self {
        TruthTableRow { inputs, outputs }
    }

    /// Row with every listed input fixed; convenient for full tables.
    pub fn from_bools(inputs: &[(Identifier, bool)], outputs: &[(Identifier, bool)]) -> Self {
        TruthTableRow {
            inputs: inputs.iter().map(|(n, v)| (n.clone(), TriValue::from(*v))).collect(),
            outputs: outputs.iter().map(|(n, v)| (n.clone(), TriValue::from(*v))).collect(),
        }
    }

    pub fn input(&self, name: &Identifier) -> TriValue {
        lookup(&self.inputs, name)
    }

    pub fn output(&self, name: &Identifier) -> TriValue {
        lookup(&self.outputs, name)
    }

    /// Conjunction of the fixed input cells.
    pub fn guard(&self) -> BoolExpr {
        BoolExpr::all(self.inputs.iter().filter_map(|(n, v)| {
            v.as_bool().map(|b| if b { BoolExpr::var(n) } else { BoolExpr::not(BoolExpr::var(n)) })
        }))
    }

    fn cells_text(cells: &[(Identifier, TriValue)]) -> String {
        cells
            .iter()
            .map(|(n, v)| format!("{n}={}", v.symbol()))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn inputs_text(&self) -> String {
        Self::cells_text(&self.inputs)
    }

    pub fn outputs_text(&self) -> String {
        Self::cells_text(&self.outputs)
    }
}

fn lookup(cells: &[(Identifier, TriValue)], name: &Identifier) -> TriValue {
    cells
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| *v)
        .unwrap_or(TriValue::DontCare)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Combinator {
    Any,
    All,
}

impl Combinator {
    pub fn keyword(self) -> &'static str {
        match self {
            Combinator::Any => "any",
            Combinator::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Blank,
    Mark,
    NegMark,
}

/// One column of a cause-and-effect matrix: the output is driven by the
/// marked inputs, combined with OR (`Any`) or AND (`All`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseEffectColumn {
    pub output: Identifier,
    pub combinator: Combinator,
    /// Non-blank cells in matrix order.
    pub cells: Vec<(Identifier, Cell)>,
}

impl CauseEffectColumn {
    /// Blank cells are dropped; they carry no meaning.
    pub fn new(output: Identifier, combinator: Combinator, cells: Vec<(Identifier, Cell)>) -> Self {
        let cells = cells.into_iter().filter(|(_, c)| *c != Cell::Blank).collect();
        CauseEffectColumn { output, combinator, cells }
    }

    /// The expression the output must equal.
    pub fn effect(&self) -> BoolExpr {
        let lits = self.cells.iter().map(|(n, c)| match c {
            Cell::NegMark => BoolExpr::not(BoolExpr::var(n)),
            _ => BoolExpr::var(n),
        });
        match self.combinator {
            Combinator::Any => BoolExpr::any(lits),
            Combinator::All => BoolExpr::all(lits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Row(TruthTableRow),
    CEColumn(CauseEffectColumn),
    Assert(BoolExpr),
}

impl Constraint {
    pub fn describe(&self) -> String {
        match self {
            Constraint::Row(r) => format!("row {} -> {}", r.inputs_text(), r.outputs_text()),
            Constraint::CEColumn(c) => format!("{} = {}", c.output, c.effect()),
            Constraint::Assert(e) => format!("assertion {e}"),
        }
    }

    fn rename(&self, map: &impl Fn(&Identifier) -> Identifier) -> Constraint {
        let cells = |cs: &[(Identifier, TriValue)]| cs.iter().map(|(n, v)| (map(n), *v)).collect();
        match self {
            Constraint::Row(r) => Constraint::Row(TruthTableRow::new(cells(&r.inputs), cells(&r.outputs))),
            Constraint::CEColumn(c) => Constraint::CEColumn(CauseEffectColumn::new(
                map(&c.output),
                c.combinator,
                c.cells.iter().map(|(n, m)| (map(n), *m)).collect(),
            )),
            Constraint::Assert(e) => Constraint::Assert(e.rename(&|id: &Identifier| map(id))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Generate,
    Verify,
    Repair,
    Simplify,
    Extend,
    Translate,
}

impl Mode {
    pub const ALL: [Mode; 6] =
        [Mode::Generate, Mode::Verify, Mode::Repair, Mode::Simplify, Mode::Extend, Mode::Translate];

    pub fn keyword(self) -> &'static str {
        match self {
            Mode::Generate => "generate",
            Mode::Verify => "verify",
            Mode::Repair => "repair",
            Mode::Simplify => "simplify",
            Mode::Extend => "extend",
            Mode::Translate => "translate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.keyword() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// A block's specification: its interface, a mode and an ordered list
/// of constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintList {
    block_name: Identifier,
    mode: Mode,
    interface: BlockInterface,
    constraints: Vec<Constraint>,
}

impl ConstraintList {
    pub fn new(
        block_name: Identifier,
        mode: Mode,
        interface: BlockInterface,
        constraints: Vec<Constraint>,
    ) -> Result<Self, SpecError> {
        if !interface.temps().is_empty() {
            return Err(SpecError::Type("constraint lists cannot declare temp variables".into()));
        }
        for c in &constraints {
            check_constraint(&interface, c)?;
        }
        Ok(ConstraintList { block_name, mode, interface, constraints })
    }

    pub fn block_name(&self) -> &Identifier {
        &self.block_name
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn interface(&self) -> &BlockInterface {
        &self.interface
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &TruthTableRow)> {
        self.constraints.iter().enumerate().filter_map(|(i, c)| match c {
            Constraint::Row(r) => Some((i, r)),
            _ => None,
        })
    }
}

fn expect_direction(
    interface: &BlockInterface,
    name: &Identifier,
    direction: Direction,
    what: &str,
) -> Result<(), SpecError> {
    match interface.direction_of(name) {
        Some(d) if d == direction => Ok(()),
        Some(d) => Err(SpecError::Type(format!("`{name}` is declared as {d}, expected {what}"))),
        None => Err(SpecError::Type(format!("undeclared variable `{name}`"))),
    }
}

fn check_unique(cells: &[(Identifier, TriValue)]) -> Result<(), SpecError> {
    let mut seen = BTreeSet::new();
    for (n, _) in cells {
        if !seen.insert(n) {
            return Err(SpecError::Type(format!("`{n}` appears twice in one row")));
        }
    }
    Ok(())
}

fn check_constraint(interface: &BlockInterface, c: &Constraint) -> Result<(), SpecError> {
    match c {
        Constraint::Row(r) => {
            check_unique(&r.inputs)?;
            check_unique(&r.outputs)?;
            for (n, _) in &r.inputs {
                expect_direction(interface, n, Direction::Input, "an input")?;
            }
            for (n, _) in &r.outputs {
                expect_direction(interface, n, Direction::Output, "an output")?;
            }
            if r.outputs.iter().all(|(_, v)| *v == TriValue::DontCare) {
                return Err(SpecError::Type("row fixes no output".into()));
            }
        }
        Constraint::CEColumn(col) => {
            expect_direction(interface, &col.output, Direction::Output, "an output")?;
            if col.cells.is_empty() {
                return Err(SpecError::Type(format!("cause-effect column `{}` has no causes", col.output)));
            }
            let mut seen = BTreeSet::new();
            for (n, _) in &col.cells {
                expect_direction(interface, n, Direction::Input, "an input")?;
                if !seen.insert(n) {
                    return Err(SpecError::Type(format!("cause `{n}` listed twice")));
                }
            }
        }
        Constraint::Assert(e) => interface.check_expr(e)?,
    }
    Ok(())
}

/// "Whenever `guard` holds, `output` equals `value`."
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub output: Identifier,
    pub guard: BoolExpr,
    pub value: bool,
    /// Index into [`SpecFormula::origins`].
    pub origin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecAssertion {
    pub expr: BoolExpr,
    pub origin: usize,
}

/// Checkable form of a specification: guarded output obligations plus
/// global assertions, all over the variables of `interface`.
///
/// Obligations and assertions are read at the end of a scan cycle, with
/// state variables holding their updated values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFormula {
    pub block_name: Identifier,
    pub interface: BlockInterface,
    pub obligations: Vec<Obligation>,
    pub assertions: Vec<SpecAssertion>,
    /// Human-readable description of each constraint the items came from.
    pub origins: Vec<String>,
}

impl SpecFormula {
    pub fn new(block_name: Identifier, interface: BlockInterface) -> Self {
        SpecFormula { block_name, interface, obligations: Vec::new(), assertions: Vec::new(), origins: Vec::new() }
    }

    pub fn add_origin(&mut self, description: impl Into<String>) -> usize {
        self.origins.push(description.into());
        self.origins.len() - 1
    }

    pub fn oblige(&mut self, output: Identifier, guard: BoolExpr, value: bool, origin: usize) {
        debug_assert!(origin < self.origins.len());
        self.obligations.push(Obligation { output, guard, value, origin });
    }

    pub fn assert(&mut self, expr: BoolExpr, origin: usize) {
        debug_assert!(origin < self.origins.len());
        self.assertions.push(SpecAssertion { expr, origin });
    }

    pub fn is_empty(&self) -> bool {
        self.obligations.is_empty() && self.assertions.is_empty()
    }

    pub fn describe(&self, origin: usize) -> &str {
        &self.origins[origin]
    }

    /// Origin of the first violated item (in constraint order), if any.
    /// `env` must bind every variable the items mention.
    pub fn violation(&self, env: &Assignment) -> Result<Option<usize>, ModelError> {
        let mut first: Option<usize> = None;
        let mut note = |origin: usize| first = Some(first.map_or(origin, |f: usize| f.min(origin)));
        for ob in &self.obligations {
            if crate::eval_expr(&ob.guard, env)? {
                let actual = env.get(&ob.output).ok_or_else(|| ModelError::UnboundVariable(ob.output.clone()))?;
                if actual != ob.value {
                    note(ob.origin);
                }
            }
        }
        for a in &self.assertions {
            if !crate::eval_expr(&a.expr, env)? {
                note(a.origin);
            }
        }
        Ok(first)
    }

    pub fn holds(&self, env: &Assignment) -> Result<bool, ModelError> {
        Ok(self.violation(env)?.is_none())
    }

    /// Outputs mentioned by an assertion.
    pub fn assertion_outputs(&self, a: &SpecAssertion) -> BTreeSet<Identifier> {
        a.expr
            .vars()
            .into_iter()
            .filter(|v| self.interface.direction_of(v) == Some(Direction::Output))
            .collect()
    }

    /// True when no assertion ties two outputs together, so each output
    /// can be treated on its own.
    pub fn is_decomposable(&self) -> bool {
        self.assertions.iter().all(|a| self.assertion_outputs(a).len() <= 1)
    }

    /// The part of the spec that constrains `output` alone: its
    /// obligations plus assertions that mention no other output.
    pub fn restrict_to(&self, output: &Identifier) -> SpecFormula {
        let mut out = self.clone();
        out.obligations.retain(|ob| &ob.output == output);
        out.assertions.retain(|a| self.assertion_outputs(a).iter().all(|o| o == output));
        out
    }
}

/// Turns a constraint list into obligations and assertions.
pub fn compile_spec(list: &ConstraintList) -> Result<SpecFormula, SpecError> {
    let mut spec = SpecFormula::new(list.block_name.clone(), list.interface.clone());
    for (i, c) in list.constraints.iter().enumerate() {
        check_constraint(&list.interface, c)?;
        let origin = spec.add_origin(format!("constraint {i}: {}", c.describe()));
        match c {
            Constraint::Row(r) => {
                let guard = r.guard();
                for (o, v) in &r.outputs {
                    if let Some(value) = v.as_bool() {
                        spec.oblige(o.clone(), guard.clone(), value, origin);
                    }
                }
            }
            Constraint::CEColumn(col) => {
                let effect = col.effect();
                spec.oblige(col.output.clone(), effect.clone(), true, origin);
                spec.oblige(col.output.clone(), BoolExpr::not(effect), false, origin);
            }
            Constraint::Assert(e) => spec.assert(e.clone(), origin),
        }
    }
    Ok(spec)
}

/// Two rows that can fire on the same input yet disagree on an output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub first: usize,
    pub second: usize,
    pub output: Identifier,
    /// Input valuation triggering both rows; inputs neither row fixes
    /// are false.
    pub witness: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConsistencyReport {
    pub conflicts: Vec<Conflict>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

/// Reports every pair of rows whose input patterns overlap while
/// demanding different values for some output.
pub fn check_consistency(list: &ConstraintList) -> ConsistencyReport {
    let inputs = list.interface.inputs();
    let rows: Vec<(usize, &TruthTableRow)> = list.rows().collect();
    let mut conflicts = Vec::new();
    for (x, &(i, ri)) in rows.iter().enumerate() {
        for &(j, rj) in &rows[x + 1..] {
            let Some(witness) = unify(&inputs, ri, rj) else { continue };
            let clash = ri.outputs.iter().find(|(o, v)| {
                matches!((v.as_bool(), rj.output(o).as_bool()), (Some(a), Some(b)) if a != b)
            });
            if let Some((o, _)) = clash {
                conflicts.push(Conflict { first: i, second: j, output: o.clone(), witness });
            }
        }
    }
    ConsistencyReport { conflicts }
}

fn unify(inputs: &[Identifier], a: &TruthTableRow, b: &TruthTableRow) -> Option<Assignment> {
    let mut witness = Assignment::new();
    for n in inputs {
        let value = match (a.input(n).as_bool(), b.input(n).as_bool()) {
            (Some(x), Some(y)) if x != y => return None,
            (Some(x), _) | (None, Some(x)) => x,
            (None, None) => false,
        };
        witness.insert(n.clone(), value);
    }
    Some(witness)
}

/// Copies a template list with its variables renamed. Names missing from
/// `renaming` keep their name.
pub fn instantiate_template(
    template: &ConstraintList,
    renaming: &BTreeMap<Identifier, Identifier>,
) -> Result<ConstraintList, SpecError> {
    for from in renaming.keys() {
        if template.interface.get(from).is_none() {
            return Err(SpecError::MissingRenameTarget(from.clone()));
        }
    }
    let map = |id: &Identifier| renaming.get(id).cloned().unwrap_or_else(|| id.clone());
    let mut targets = BTreeSet::new();
    let mut decls = Vec::new();
    for d in template.interface.decls() {
        let to = map(&d.name);
        if !targets.insert(to.clone()) {
            return Err(SpecError::RenameCollision(to));
        }
        decls.push(VarDecl::new(to, d.direction));
    }
    let interface = BlockInterface::new(decls)?;
    let constraints = template.constraints.iter().map(|c| c.rename(&map)).collect();
    ConstraintList::new(template.block_name.clone(), template.mode, interface, constraints)
}
