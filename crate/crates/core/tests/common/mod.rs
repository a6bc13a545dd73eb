#![allow(dead_code)]

use blocksynth::sat::{CnfFormula, Literal, SatVar};
use blocksynth::ClauseSink;
use rand::Rng;

/// Bit masks of the 64 assignments packed into one word for variables 1..=6.
const LOW_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Exhaustive satisfiability check, 64 assignments per word.
pub fn brute_force_sat(num_vars: u32, clauses: &[Vec<i64>]) -> bool {
    let n = num_vars as usize;
    let words: u64 = if n <= 6 { 1 } else { 1 << (n - 6) };
    let valid = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    for w in 0..words {
        let mut acc = valid;
        for clause in clauses {
            let mut c = 0u64;
            for &l in clause {
                let v = (l.unsigned_abs() - 1) as usize;
                let mask = if v < 6 {
                    LOW_MASKS[v]
                } else if w >> (v - 6) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
                c |= if l > 0 { mask } else { !mask };
            }
            acc &= c;
            if acc == 0 {
                break;
            }
        }
        if acc != 0 {
            return true;
        }
    }
    false
}

/// Random 3-CNF with distinct variables per clause.
pub fn random_3cnf<R: Rng>(rng: &mut R, num_vars: u32, num_clauses: usize) -> Vec<Vec<i64>> {
    (0..num_clauses)
        .map(|_| {
            let mut vars: Vec<i64> = Vec::with_capacity(3);
            while vars.len() < 3.min(num_vars as usize) {
                let v = rng.gen_range(1..=num_vars as i64);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter()
                .map(|v| if rng.gen_bool(0.5) { v } else { -v })
                .collect()
        })
        .collect()
}

pub fn to_formula(num_vars: u32, clauses: &[Vec<i64>]) -> CnfFormula {
    let mut f = CnfFormula::with_vars(num_vars);
    for c in clauses {
        let lits: Vec<Literal> = c.iter().map(|&v| Literal::from_dimacs(v)).collect();
        f.add_clause(&lits);
    }
    f
}

pub fn var(i: u32) -> SatVar {
    SatVar::new(i)
}

pub fn ident(name: &str) -> blocksynth::Identifier {
    blocksynth::Identifier::new(name).unwrap()
}

/// Random expression over `vars` with at most `depth` operator levels.
pub fn random_expr<R: Rng>(rng: &mut R, vars: &[blocksynth::Identifier], depth: usize) -> blocksynth::BoolExpr {
    use blocksynth::BoolExpr;
    if depth == 0 || rng.gen_bool(0.25) {
        return if vars.is_empty() || rng.gen_bool(0.05) {
            BoolExpr::Const(rng.gen())
        } else {
            BoolExpr::var(&vars[rng.gen_range(0..vars.len())])
        };
    }
    match rng.gen_range(0..4) {
        0 => BoolExpr::not(random_expr(rng, vars, depth - 1)),
        1 => BoolExpr::and(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
        2 => BoolExpr::or(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
        _ => BoolExpr::xor(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
    }
}

/// Random valid block: `inputs` inputs `x0..`, one or two outputs, and
/// optionally a temp and a state variable. Temps are only read after they
/// are written.
pub fn random_block<R: Rng>(rng: &mut R, inputs: usize, max_stmts: usize, stateful: bool) -> blocksynth::Block {
    use blocksynth::{Block, BlockInterface, Direction, Lang, Statement, VarDecl};
    let mut decls: Vec<VarDecl> = (0..inputs).map(|i| VarDecl::new(ident(&format!("x{i}")), Direction::Input)).collect();
    let outputs = rng.gen_range(1..=2);
    for i in 0..outputs {
        decls.push(VarDecl::new(ident(&format!("y{i}")), Direction::Output));
    }
    let temp = rng.gen_bool(0.5);
    if temp {
        decls.push(VarDecl::new(ident("t0"), Direction::Temp));
    }
    if stateful {
        decls.push(VarDecl::new(ident("s0"), Direction::State));
    }
    let interface = BlockInterface::new(decls.clone()).unwrap();
    let mut readable: Vec<_> = decls
        .iter()
        .filter(|d| d.direction != Direction::Temp)
        .map(|d| d.name.clone())
        .collect();
    let targets: Vec<_> = decls.iter().filter(|d| d.direction != Direction::Input).map(|d| d.name.clone()).collect();
    let mut body = Vec::new();
    for _ in 0..rng.gen_range(1..=max_stmts) {
        let target = targets[rng.gen_range(0..targets.len())].clone();
        let rhs = random_expr(rng, &readable, 3);
        if !readable.contains(&target) {
            readable.push(target.clone());
        }
        body.push(Statement::new(target, rhs));
    }
    Block::new(ident("R"), interface, body, Lang::St).unwrap()
}

/// Output values of a combinational block on every input pattern, in
/// pattern order (bit `i` of the pattern is input `i`).
pub fn truth_table(block: &blocksynth::Block) -> Vec<blocksynth::Assignment> {
    use blocksynth::{run_cycle, Assignment};
    let inputs = block.interface().inputs();
    let state = Assignment::all_false(block.interface().states().iter());
    (0..1u64 << inputs.len())
        .map(|p| run_cycle(block, &state, &Assignment::from_bits(&inputs, p)).unwrap().0)
        .collect()
}
