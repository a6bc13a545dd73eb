mod common;

use blocksynth::lang::{emit, parse, parse_il, parse_st, translate};
use blocksynth::{simulate, Assignment, Block, Lang};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn block_from_seed(seed: u64, stateful: bool) -> Block {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = 1 + (seed % 5) as usize;
    common::random_block(&mut rng, inputs, 6, stateful)
}

/// Same outputs and state on every two-cycle input trace and initial state.
fn same_behavior(a: &Block, b: &Block) -> bool {
    let inputs = a.interface().inputs();
    let states = a.interface().states();
    let n = inputs.len();
    (0..1u64 << states.len()).all(|s| {
        let init = Assignment::from_bits(&states, s);
        (0..1u64 << (2 * n)).all(|p| {
            let trace = [Assignment::from_bits(&inputs, p), Assignment::from_bits(&inputs, p >> n)];
            simulate(a, &trace, &init).unwrap() == simulate(b, &trace, &init).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn emit_then_parse_is_identity(seed in any::<u64>(), stateful in any::<bool>()) {
        let block = block_from_seed(seed, stateful);
        for lang in [Lang::St, Lang::Il] {
            let text = emit(&block, lang);
            let parsed = parse(&text, lang).unwrap();
            prop_assert_eq!(parsed.interface(), block.interface());
            prop_assert_eq!(emit(&parsed, lang), text.clone());
            prop_assert!(same_behavior(&block, &parsed));
        }
    }

    #[test]
    fn translation_preserves_behavior(seed in any::<u64>(), stateful in any::<bool>()) {
        let block = block_from_seed(seed, stateful);
        let il = translate(&block, Lang::Il).unwrap();
        prop_assert_eq!(il.lang(), Lang::Il);
        prop_assert!(same_behavior(&block, &il));
        let back = translate(&il, Lang::St).unwrap();
        prop_assert!(same_behavior(&block, &back));
    }

    #[test]
    fn emission_is_deterministic(seed in any::<u64>()) {
        let a = block_from_seed(seed, false);
        let b = block_from_seed(seed, false);
        prop_assert_eq!(emit(&a, Lang::St), emit(&b, Lang::St));
        prop_assert_eq!(emit(&a, Lang::Il), emit(&b, Lang::Il));
    }

    #[test]
    fn errors_point_inside_the_text(seed in any::<u64>(), cut in any::<prop::sample::Index>(), junk in "[;:=()A-Za-z ]{1,3}") {
        let block = block_from_seed(seed, false);
        for lang in [Lang::St, Lang::Il] {
            let mut text = emit(&block, lang);
            let at = cut.index(text.len() + 1);
            text.insert_str(at, &junk);
            let result = match lang {
                Lang::St => parse_st(&text),
                Lang::Il => parse_il(&text),
            };
            if let Err(e) = result {
                let span = e.span();
                let lines: Vec<&str> = text.split('\n').collect();
                prop_assert!(span.line >= 1 && span.line <= lines.len(), "line {} of {}", span.line, lines.len());
                prop_assert!(span.column >= 1 && span.column <= lines[span.line - 1].len() + 1);
            }
        }
    }
}
