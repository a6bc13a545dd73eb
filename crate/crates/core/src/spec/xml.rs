//! Constraint-list XML.
//!
//! ```text
//! <constraintList block="NAME" mode="generate|verify|repair|simplify|extend|translate">
//!   <interface> <var name="ID" dir="in|out|state" type="BOOL"/>* </interface>
//!   <truthTable> <row in="a=1;b=0;c=-" out="y=1;z=-"/>* </truthTable>
//!   <causeEffect output="ID" combinator="any|all"> <cause input="ID" mark="x|n"/>+ </causeEffect>
//!   <assertion expr="ST-EXPRESSION"/>
//! </constraintList>
//! ```
//!
//! After the interface, table, cause-effect and assertion elements may
//! appear in any order and any number of times; constraint order is the
//! document order. The writer starts a new `truthTable` whenever a run of
//! rows is interrupted, so order survives a round trip.

use std::fmt::Write as _;
use std::path::Path;

use roxmltree::{Document, Node};

use super::{
    CauseEffectColumn, Cell, Combinator, Constraint, ConstraintList, Mode, SpecError, TriValue, TruthTableRow,
};
use crate::lang::parse_expr;
use crate::model::{BlockInterface, Direction, Identifier, VarDecl};

pub fn load_constraints(path: impl AsRef<Path>) -> Result<ConstraintList, SpecError> {
    let text = std::fs::read_to_string(path)?;
    parse_constraints(&text)
}

pub fn save_constraints(list: &ConstraintList, path: impl AsRef<Path>) -> Result<(), SpecError> {
    std::fs::write(path, write_constraints(list))?;
    Ok(())
}

struct Reader<'a> {
    doc: &'a Document<'a>,
}

impl<'a> Reader<'a> {
    fn line(&self, node: Node) -> u32 {
        self.doc.text_pos_at(node.range().start).row
    }

    fn error(&self, node: Node, message: impl Into<String>) -> SpecError {
        SpecError::Schema { line: self.line(node), message: message.into() }
    }

    /// Checks the attribute set and returns values in `allowed` order.
    fn attributes(
        &self,
        node: Node<'a, 'a>,
        required: &[&str],
        optional: &[&str],
    ) -> Result<Vec<Option<&'a str>>, SpecError> {
        let tag = node.tag_name().name();
        for attr in node.attributes() {
            if !required.contains(&attr.name()) && !optional.contains(&attr.name()) {
                return Err(self.error(node, format!("unknown attribute `{}` on <{tag}>", attr.name())));
            }
        }
        let mut out = Vec::new();
        for name in required {
            match node.attribute(*name) {
                Some(v) => out.push(Some(v)),
                None => return Err(self.error(node, format!("<{tag}> needs attribute `{name}`"))),
            }
        }
        for name in optional {
            out.push(node.attribute(*name));
        }
        Ok(out)
    }

    /// Element children, rejecting stray text.
    fn children(&self, node: Node<'a, 'a>) -> Result<Vec<Node<'a, 'a>>, SpecError> {
        let mut out = Vec::new();
        for child in node.children() {
            if child.is_element() {
                out.push(child);
            } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
                return Err(self.error(child, "unexpected text content"));
            }
        }
        Ok(out)
    }

    fn identifier(&self, node: Node, text: &str) -> Result<Identifier, SpecError> {
        Identifier::new(text).map_err(|e| self.error(node, e.to_string()))
    }

    fn expect_empty(&self, node: Node<'a, 'a>) -> Result<(), SpecError> {
        match self.children(node)?.first() {
            Some(child) => Err(self.error(*child, format!("unknown element <{}>", child.tag_name().name()))),
            None => Ok(()),
        }
    }
}

pub fn parse_constraints(text: &str) -> Result<ConstraintList, SpecError> {
    let doc = Document::parse(text)
        .map_err(|e| SpecError::Schema { line: e.pos().row, message: e.to_string() })?;
    let r = Reader { doc: &doc };
    let root = doc.root_element();
    if root.tag_name().name() != "constraintList" {
        return Err(r.error(root, format!("expected <constraintList>, found <{}>", root.tag_name().name())));
    }
    let attrs = r.attributes(root, &["block", "mode"], &[])?;
    let block_name = r.identifier(root, attrs[0].unwrap())?;
    let mode: Mode = attrs[1].unwrap().parse().map_err(|m: String| r.error(root, m))?;

    let children = r.children(root)?;
    let Some((first, rest)) = children.split_first().filter(|(f, _)| f.tag_name().name() == "interface") else {
        return Err(r.error(root, "<constraintList> must start with <interface>"));
    };
    let interface = read_interface(&r, *first)?;

    let mut constraints = Vec::new();
    for node in rest {
        match node.tag_name().name() {
            "truthTable" => {
                r.attributes(*node, &[], &[])?;
                for row in r.children(*node)? {
                    if row.tag_name().name() != "row" {
                        return Err(r.error(row, format!("unknown element <{}>", row.tag_name().name())));
                    }
                    let c = Constraint::Row(read_row(&r, row)?);
                    push_checked(&r, row, &interface, &mut constraints, c)?;
                }
            }
            "causeEffect" => {
                let c = Constraint::CEColumn(read_column(&r, *node)?);
                push_checked(&r, *node, &interface, &mut constraints, c)?;
            }
            "assertion" => {
                let attrs = r.attributes(*node, &["expr"], &[])?;
                r.expect_empty(*node)?;
                let expr = parse_expr(attrs[0].unwrap(), &interface)
                    .map_err(|e| r.error(*node, format!("in assertion: {e}")))?;
                constraints.push(Constraint::Assert(expr));
            }
            "interface" => return Err(r.error(*node, "duplicate <interface>")),
            other => return Err(r.error(*node, format!("unknown element <{other}>"))),
        }
    }
    ConstraintList::new(block_name, mode, interface, constraints).map_err(|e| r.error(root, e.to_string()))
}

fn push_checked(
    r: &Reader,
    node: Node,
    interface: &BlockInterface,
    out: &mut Vec<Constraint>,
    c: Constraint,
) -> Result<(), SpecError> {
    super::check_constraint(interface, &c).map_err(|e| r.error(node, e.to_string()))?;
    out.push(c);
    Ok(())
}

fn read_interface<'a>(r: &Reader<'a>, node: Node<'a, 'a>) -> Result<BlockInterface, SpecError> {
    r.attributes(node, &[], &[])?;
    let mut decls: Vec<VarDecl> = Vec::new();
    for var in r.children(node)? {
        if var.tag_name().name() != "var" {
            return Err(r.error(var, format!("unknown element <{}>", var.tag_name().name())));
        }
        let attrs = r.attributes(var, &["name", "dir"], &["type"])?;
        r.expect_empty(var)?;
        let name = r.identifier(var, attrs[0].unwrap())?;
        let direction = match attrs[1].unwrap() {
            "in" => Direction::Input,
            "out" => Direction::Output,
            "state" => Direction::State,
            other => return Err(r.error(var, format!("unknown direction `{other}`"))),
        };
        if let Some(t) = attrs[2] {
            if t != "BOOL" {
                return Err(r.error(var, format!("unsupported type `{t}`")));
            }
        }
        if decls.iter().any(|d| d.name == name) {
            return Err(r.error(var, format!("variable `{name}` declared twice")));
        }
        decls.push(VarDecl::new(name, direction));
    }
    Ok(BlockInterface::new(decls).expect("duplicates rejected above"))
}

fn read_cells(r: &Reader, node: Node, text: &str) -> Result<Vec<(Identifier, TriValue)>, SpecError> {
    let mut cells = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((name, value)) = part.split_once('=') else {
            return Err(r.error(node, format!("cell `{part}` is not `name=value`")));
        };
        let name = r.identifier(node, name.trim())?;
        let value = TriValue::from_symbol(value.trim())
            .ok_or_else(|| r.error(node, format!("cell value `{}` is not 1, 0 or -", value.trim())))?;
        cells.push((name, value));
    }
    Ok(cells)
}

fn read_row<'a>(r: &Reader<'a>, node: Node<'a, 'a>) -> Result<TruthTableRow, SpecError> {
    let attrs = r.attributes(node, &["out"], &["in"])?;
    r.expect_empty(node)?;
    let outputs = read_cells(r, node, attrs[0].unwrap())?;
    let inputs = read_cells(r, node, attrs[1].unwrap_or(""))?;
    Ok(TruthTableRow::new(inputs, outputs))
}

fn read_column<'a>(r: &Reader<'a>, node: Node<'a, 'a>) -> Result<CauseEffectColumn, SpecError> {
    let attrs = r.attributes(node, &["output", "combinator"], &[])?;
    let output = r.identifier(node, attrs[0].unwrap())?;
    let combinator = match attrs[1].unwrap() {
        "any" => Combinator::Any,
        "all" => Combinator::All,
        other => return Err(r.error(node, format!("unknown combinator `{other}`"))),
    };
    let mut cells = Vec::new();
    for cause in r.children(node)? {
        if cause.tag_name().name() != "cause" {
            return Err(r.error(cause, format!("unknown element <{}>", cause.tag_name().name())));
        }
        let attrs = r.attributes(cause, &["input", "mark"], &[])?;
        r.expect_empty(cause)?;
        let input = r.identifier(cause, attrs[0].unwrap())?;
        let mark = match attrs[1].unwrap() {
            "x" => Cell::Mark,
            "n" => Cell::NegMark,
            other => return Err(r.error(cause, format!("unknown mark `{other}`"))),
        };
        cells.push((input, mark));
    }
    Ok(CauseEffectColumn::new(output, combinator, cells))
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Canonical XML text of `list`.
pub fn write_constraints(list: &ConstraintList) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<constraintList block=\"{}\" mode=\"{}\">", list.block_name(), list.mode());
    out.push_str("  <interface>\n");
    for d in list.interface().decls() {
        let dir = match d.direction {
            Direction::Input => "in",
            Direction::Output => "out",
            Direction::State => "state",
            Direction::Temp => unreachable!("constraint lists have no temps"),
        };
        let _ = writeln!(out, "    <var name=\"{}\" dir=\"{dir}\" type=\"BOOL\"/>", d.name);
    }
    out.push_str("  </interface>\n");

    let mut in_table = false;
    for c in list.constraints() {
        match c {
            Constraint::Row(_) if !in_table => {
                out.push_str("  <truthTable>\n");
                in_table = true;
            }
            Constraint::Row(_) => {}
            _ if in_table => {
                out.push_str("  </truthTable>\n");
                in_table = false;
            }
            _ => {}
        }
        match c {
            Constraint::Row(row) => {
                let _ = writeln!(out, "    <row in=\"{}\" out=\"{}\"/>", row.inputs_text(), row.outputs_text());
            }
            Constraint::CEColumn(col) => {
                let _ = writeln!(
                    out,
                    "  <causeEffect output=\"{}\" combinator=\"{}\">",
                    col.output,
                    col.combinator.keyword()
                );
                for (input, cell) in &col.cells {
                    let mark = if *cell == Cell::NegMark { "n" } else { "x" };
                    let _ = writeln!(out, "    <cause input=\"{input}\" mark=\"{mark}\"/>");
                }
                out.push_str("  </causeEffect>\n");
            }
            Constraint::Assert(e) => {
                let _ = writeln!(out, "  <assertion expr=\"{}\"/>", escape(&e.to_string()));
            }
        }
    }
    if in_table {
        out.push_str("  </truthTable>\n");
    }
    out.push_str("</constraintList>\n");
    out
}
