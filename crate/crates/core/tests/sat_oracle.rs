mod common;

use blocksynth::sat::{solve, tseitin, SatResult, SatVar};
use blocksynth::{BoolExpr, Identifier};
use common::{brute_force_sat, random_3cnf, to_formula};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[test]
fn random_3cnf_12_vars_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut sat = 0;
    for _ in 0..100 {
        let m = rng.gen_range(24..=72);
        let clauses = random_3cnf(&mut rng, 12, m);
        let f = to_formula(12, &clauses);
        let result = solve(&f, &[], 0);
        assert_eq!(result.is_sat(), brute_force_sat(12, &clauses), "{clauses:?}");
        if let SatResult::Sat(model) = result {
            assert!(f.is_satisfied_by(&model));
            sat += 1;
        }
    }
    // The ratio range straddles the threshold, so both verdicts occur.
    assert!(sat > 0 && sat < 100);
}

#[test]
fn seeds_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in [0u64, 1, 99] {
        let clauses = random_3cnf(&mut rng, 16, 50);
        let f = to_formula(16, &clauses);
        let first = solve(&f, &[], seed);
        for _ in 0..3 {
            assert_eq!(solve(&f, &[], seed), first);
        }
    }
}

#[test]
fn assumptions_are_respected() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let clauses = random_3cnf(&mut rng, 10, 30);
        let f = to_formula(10, &clauses);
        let assumption = blocksynth::sat::Literal::new(SatVar::new(rng.gen_range(1..=10)), rng.gen_bool(0.5));
        let mut with_unit = clauses.clone();
        with_unit.push(vec![assumption.to_dimacs()]);
        let result = solve(&f, &[assumption], 3);
        assert_eq!(result.is_sat(), brute_force_sat(10, &with_unit));
        if let Some(m) = result.model() {
            assert!(m.lit_value(assumption));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_matches_enumeration(seed in any::<u64>(), n in 3u32..=18, ratio in 2.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = (f64::from(n) * ratio).round() as usize;
        let clauses = random_3cnf(&mut rng, n, m);
        let f = to_formula(n, &clauses);
        let result = solve(&f, &[], seed % 4);
        prop_assert_eq!(result.is_sat(), brute_force_sat(n, &clauses));
        if let Some(model) = result.model() {
            prop_assert!(f.is_satisfied_by(model));
        }
    }

    #[test]
    fn tseitin_size_bound_and_equisatisfiability(expr in arb_expr(4)) {
        let names: Vec<Identifier> = ["a", "b", "c", "d"].iter().map(|n| Identifier::new(n).unwrap()).collect();
        let vm: BTreeMap<Identifier, SatVar> = names.iter().enumerate()
            .map(|(i, n)| (n.clone(), SatVar::new(i as u32 + 1))).collect();
        let (f, root) = tseitin(&expr, &vm).unwrap();
        let fresh = f.num_vars() as usize - names.len();
        prop_assert!(fresh <= expr.size());
        prop_assert!(f.clauses().len() <= 3 * expr.size() + 1);
        for bits in 0..16u64 {
            let env = blocksynth::Assignment::from_bits(&names, bits);
            let expected = blocksynth::eval_expr(&expr, &env).unwrap();
            let assumptions: Vec<_> = names.iter().enumerate()
                .map(|(i, _)| blocksynth::sat::Literal::new(SatVar::new(i as u32 + 1), bits >> i & 1 == 0))
                .chain(std::iter::once(root))
                .collect();
            prop_assert_eq!(solve(&f, &assumptions, 0).is_sat(), expected);
        }
    }
}

fn arb_expr(depth: u32) -> impl Strategy<Value = BoolExpr> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(BoolExpr::Const),
        prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(BoolExpr::named),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(BoolExpr::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| BoolExpr::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| BoolExpr::or(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| BoolExpr::xor(l, r)),
        ]
    })
}
