//! The warehouse benchmark components as full truth tables.
//!
//! A row has four slots with light barriers `s1..s4` (true = occupied).
//! Magnet `k` holds when its two surrounding slots are occupied or the
//! second slot ahead of it is vacant; past the end of the row a slot reads
//! as occupied. The signal light turns on when any of four upper shelves is
//! full or any of four lower shelves is empty.

use std::fmt;
use std::str::FromStr;

use blocksynth::spec::{Constraint, ConstraintList, Mode, TruthTableRow};
use blocksynth::{BlockInterface, Identifier};

pub const ROW_SLOTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Magnet,
    Row,
    SignalLight,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Magnet, Scenario::Row, Scenario::SignalLight];

    pub fn keyword(self) -> &'static str {
        match self {
            Scenario::Magnet => "magnet",
            Scenario::Row => "row",
            Scenario::SignalLight => "signal-light",
        }
    }

    pub fn inputs(self) -> Vec<String> {
        match self {
            Scenario::Magnet | Scenario::Row => slot_names(),
            Scenario::SignalLight => {
                let upper = (1..=4).map(|i| format!("upper_full{i}"));
                upper.chain((1..=4).map(|i| format!("lower_empty{i}"))).collect()
            }
        }
    }

    pub fn outputs(self) -> Vec<String> {
        match self {
            Scenario::Magnet => vec!["m2".into()],
            Scenario::Row => (1..ROW_SLOTS).map(|k| format!("m{k}")).collect(),
            Scenario::SignalLight => vec!["light".into()],
        }
    }

    /// Expected outputs for one input pattern (inputs in declaration order).
    pub fn reference(self, x: &[bool]) -> Vec<bool> {
        match self {
            Scenario::Magnet => vec![magnet(x, 2)],
            Scenario::Row => (1..ROW_SLOTS).map(|k| magnet(x, k)).collect(),
            Scenario::SignalLight => vec![x.iter().any(|b| *b)],
        }
    }

    pub fn constraint_list(self) -> ConstraintList {
        full_table(self.keyword(), &self.inputs(), &self.outputs(), &|x| self.reference(x))
    }
}

/// Magnet `k` (1-based) of a row.
pub fn magnet(slots: &[bool], k: usize) -> bool {
    let occupied = |i: usize| slots.get(i - 1).copied().unwrap_or(true);
    (occupied(k) && occupied(k + 1)) || !occupied(k + 2)
}

/// Table of one row magnet alone, over the same inputs as the row.
pub fn magnet_list(k: usize) -> ConstraintList {
    full_table(&format!("magnet{k}"), &slot_names(), &[format!("m{k}")], &|x| vec![magnet(x, k)])
}

fn slot_names() -> Vec<String> {
    (1..=ROW_SLOTS).map(|i| format!("s{i}")).collect()
}

fn ident(name: &str) -> Identifier {
    Identifier::new(name).expect("scenario names are valid identifiers")
}

fn full_table(block: &str, inputs: &[String], outputs: &[String], f: &dyn Fn(&[bool]) -> Vec<bool>) -> ConstraintList {
    let ins: Vec<&str> = inputs.iter().map(String::as_str).collect();
    let outs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    let interface = BlockInterface::with_io(&ins, &outs).expect("distinct names");
    let rows = (0..1u64 << inputs.len())
        .map(|p| {
            let x: Vec<bool> = (0..inputs.len()).map(|i| p >> i & 1 == 1).collect();
            let row_in: Vec<(Identifier, bool)> = inputs.iter().zip(&x).map(|(n, v)| (ident(n), *v)).collect();
            let row_out: Vec<(Identifier, bool)> = outputs.iter().zip(f(&x)).map(|(n, v)| (ident(n), v)).collect();
            Constraint::Row(TruthTableRow::from_bools(&row_in, &row_out))
        })
        .collect();
    let name = block.replace('-', "_");
    ConstraintList::new(ident(&name), Mode::Generate, interface, rows).expect("well-formed table")
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.keyword() == s)
            .ok_or_else(|| format!("unknown scenario `{s}` (expected magnet, row or signal-light)"))
    }
}
