use std::collections::BTreeMap;

use indexmap::IndexMap;
use proptest::prelude::*;

use syngauntlet::alignment::align;
use syngauntlet::engine::{build_report, SuiteResult};
use syngauntlet::prediction::{
    evaluate_prediction, parse_prediction, Arith, Formula, SurprisalTable,
};
use syngauntlet::scoring::{
    train_ngram, word_spans, NgramScorer, ScoredToken, Scorer, UniformScorer,
};
use syngauntlet::suite::{
    load_suite, render_sentence, serialize_suite, validate_suite, Circuit, Item, RegionedSentence,
    TestSuite,
};

const CONDITIONS: [&str; 3] = ["match", "mismatch", "other_cond"];

fn arith(literals: bool) -> impl Strategy<Value = Arith> {
    let target =
        (1usize..=4, 0..CONDITIONS.len()).prop_map(|(r, c)| Arith::target(r, CONDITIONS[c]));
    let leaf = if literals {
        prop_oneof![3 => target, 1 => (0u32..4000).prop_map(|n| Arith::Literal(n as f64 / 4.0))]
            .boxed()
    } else {
        target.boxed()
    };
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Arith::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Arith::Sub(Box::new(a), Box::new(b))),
        ]
    })
}

fn formula(literals: bool) -> impl Strategy<Value = Formula> {
    let cmp = prop_oneof![
        (arith(literals), arith(literals)).prop_map(|(a, b)| Formula::Less(a, b)),
        (arith(literals), arith(literals)).prop_map(|(a, b)| Formula::Greater(a, b)),
    ];
    cmp.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
        ]
    })
}

/// Integer-valued table, so sums and exact rescalings stay exact.
fn table() -> impl Strategy<Value = SurprisalTable> {
    prop::collection::vec(prop::collection::vec(0u32..64, 4), CONDITIONS.len()).prop_map(|rows| {
        let mut t = SurprisalTable::new();
        for (c, row) in CONDITIONS.iter().zip(rows) {
            t.insert_condition(*c, row.into_iter().map(f64::from).collect());
        }
        t
    })
}

fn region_text() -> impl Strategy<Value = String> {
    prop_oneof![
        1 => Just(String::new()),
        4 => "[a-zA-Záéñü¿?,.]{1,6}( [a-záéñ,.]{1,6}){0,2}",
    ]
}

fn sentence(regions: usize) -> impl Strategy<Value = RegionedSentence> {
    prop::collection::vec(region_text(), regions)
        .prop_filter("some region has text", |r| r.iter().any(|s| !s.is_empty()))
        .prop_map(RegionedSentence::new)
}

fn suite() -> impl Strategy<Value = TestSuite> {
    (1usize..=3, 1usize..=4, 1usize..=4)
        .prop_flat_map(|(conds, regions, items)| {
            let names: Vec<String> = CONDITIONS[..conds].iter().map(|s| s.to_string()).collect();
            let item = prop::collection::vec(sentence(regions), conds);
            (
                Just(names),
                Just(regions),
                prop::collection::vec(item, items),
                "[A-Za-z][A-Za-z ,-]{0,20}",
                prop::sample::select(Circuit::ALL.to_vec()),
                prop::option::of("[a-z_]{1,8}"),
                any::<bool>(),
                prop::collection::vec(formula(true), 0..3),
            )
        })
        .prop_map(
            |(names, regions, items, name, circuit, pair, has_modifier, preds)| TestSuite {
                name,
                circuit,
                language: "es".into(),
                has_modifier,
                modifier_pair_id: pair,
                condition_names: names.clone(),
                region_names: (1..=regions).map(|r| format!("r{r}")).collect(),
                items: items
                    .into_iter()
                    .enumerate()
                    .map(|(i, sentences)| Item {
                        index: i + 1,
                        sentences: names
                            .iter()
                            .cloned()
                            .zip(sentences)
                            .collect::<IndexMap<_, _>>(),
                    })
                    .collect(),
                predictions: preds
                    .iter()
                    .map(|p| p.to_string())
                    .filter(|p| p.contains(&format!(";{}", names[0])))
                    .collect(),
            },
        )
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(f in formula(true)) {
        let printed = f.to_string();
        let parsed = parse_prediction(&printed).unwrap();
        prop_assert_eq!(&parsed, &f);
        prop_assert_eq!(parse_prediction(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn outcomes_survive_positive_rescaling(
        f in formula(false),
        t in table(),
        mantissa in 1u32..1000,
        exponent in -20i32..20,
    ) {
        // mantissa * 2^exponent times a small integer is exact
        let k = f64::from(mantissa) * 2f64.powi(exponent);
        prop_assert_eq!(
            evaluate_prediction(&f, &t).unwrap(),
            evaluate_prediction(&f, &t.scaled(k)).unwrap()
        );
    }

    #[test]
    fn suite_documents_round_trip(s in suite()) {
        let text = serialize_suite(&s);
        prop_assert_eq!(load_suite(text.as_bytes()).unwrap(), s.clone());
        let report = validate_suite(&s);
        prop_assert_eq!(&validate_suite(&s), &report);
    }

    #[test]
    fn region_spans_cover_text_minus_joins(sentence in sentence(5)) {
        let rendered = render_sentence(&sentence).unwrap();
        let covered: usize = rendered.spans.iter().map(|r| r.len()).sum();
        let nonempty = sentence.regions.iter().filter(|r| !r.is_empty()).count();
        prop_assert_eq!(covered, rendered.text.chars().count() - (nonempty - 1));
        let mut last = 0;
        for span in &rendered.spans {
            prop_assert!(span.start >= last);
            last = span.end;
        }
    }

    #[test]
    fn region_totals_conserve_token_totals(
        sentence in sentence(5),
        seed in prop::collection::vec(0.0f64..40.0, 64),
    ) {
        let rendered = render_sentence(&sentence).unwrap();
        let tokens: Vec<ScoredToken> = word_spans(&rendered.text)
            .into_iter()
            .zip(seed.iter().cycle())
            .map(|(w, &bits)| ScoredToken::new(w.text, w.start, w.end, bits))
            .collect();
        let regions = align(&rendered.spans, &tokens).unwrap();
        let by_region: f64 = regions.iter().sum();
        let by_token: f64 = tokens.iter().map(|t| t.surprisal_bits).sum();
        prop_assert_eq!(by_region, by_token);

        let whole = align(std::slice::from_ref(&(0..rendered.text.chars().count())), &tokens).unwrap();
        prop_assert_eq!(whole, vec![by_token]);
    }

    #[test]
    fn equal_tokens_permute_within_a_region(words in prop::collection::vec("[a-z]{1,5}", 2..6), bits in 0.0f64..20.0) {
        let text = words.join(" ");
        let whole_text = 0..text.chars().count();
        let spans = std::slice::from_ref(&whole_text);
        let mut tokens: Vec<ScoredToken> = word_spans(&text)
            .into_iter()
            .map(|w| ScoredToken::new(w.text, w.start, w.end, bits))
            .collect();
        let before = align(spans, &tokens).unwrap();
        let n = tokens.len();
        for i in 0..n / 2 {
            let (a, b) = (tokens[i].surprisal_bits, tokens[n - 1 - i].surprisal_bits);
            tokens[i].surprisal_bits = b;
            tokens[n - 1 - i].surprisal_bits = a;
        }
        prop_assert_eq!(align(spans, &tokens).unwrap(), before);
    }

    #[test]
    fn ngram_histories_are_normalized(
        corpus in prop::collection::vec("[abcd]( [abcd.]){0,6}", 1..12),
        order in 1usize..=3,
        raw in prop::collection::vec(0.05f64..1.0, 3),
    ) {
        let sum: f64 = raw[..order].iter().sum();
        let weights: Vec<f64> = raw[..order].iter().map(|w| w / sum).collect();
        let model = train_ngram(&corpus, order, &weights).unwrap();
        let vocab: Vec<String> = model.vocabulary().map(str::to_string).collect();
        for h in model.observed_histories(order - 1) {
            let hist: Vec<&str> = h.iter().map(String::as_str).collect();
            let total: f64 = vocab.iter().map(|w| model.ngram_prob(&hist, w)).sum();
            prop_assert!((total - 1.0).abs() <= 1e-9, "history {:?} sums to {}", h, total);
            for w in &vocab {
                prop_assert!(model.ngram_prob(&hist, w) > 0.0);
            }
        }
    }

    #[test]
    fn scorers_conserve_and_repeat(
        corpus in prop::collection::vec("[abcd]( [abcd.]){0,6}", 1..12),
        probe in "[abcde]( [abcde.,]){0,8}",
        v in 2u64..100_000,
    ) {
        let ngram = NgramScorer::new("ngram", train_ngram(&corpus, 3, &[0.6, 0.3, 0.1]).unwrap());
        let uniform = UniformScorer::new("uniform", v);
        for scorer in [&ngram as &dyn Scorer, &uniform] {
            let tokens = scorer.score(&probe).unwrap();
            prop_assert_eq!(&scorer.score(&probe).unwrap(), &tokens);
            let sum: f64 = tokens.iter().map(|t| t.surprisal_bits).sum();
            prop_assert!(sum.is_finite());
            let total = scorer.total_surprisal(&probe).unwrap().unwrap();
            prop_assert!((sum - total).abs() <= 1e-9 * total.abs().max(1.0));
        }
    }

    #[test]
    fn report_aggregates_recompute(accs in prop::collection::vec((0usize..7, 0u32..=20), 1..30)) {
        let results: Vec<SuiteResult> = accs
            .iter()
            .enumerate()
            .map(|(i, &(c, passed))| SuiteResult {
                name: format!("s{i}"),
                circuit: Circuit::ALL[c],
                language: "es".into(),
                has_modifier: i % 2 == 1,
                modifier_pair_id: Some(format!("p{}", i / 2)),
                accuracy: f64::from(passed) / 20.0,
                item_results: vec![],
            })
            .collect();
        let report = build_report("x", results.clone(), false);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let all: Vec<f64> = results.iter().map(|s| s.accuracy).collect();
        prop_assert!((report.overall - mean(&all)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&report.overall));
        let mut by_circuit: BTreeMap<Circuit, Vec<f64>> = BTreeMap::new();
        for s in &results {
            by_circuit.entry(s.circuit).or_default().push(s.accuracy);
        }
        prop_assert_eq!(report.circuit_means.len(), by_circuit.len());
        for (c, v) in by_circuit {
            prop_assert!((report.circuit_means[&c] - mean(&v)).abs() < 1e-12);
        }
        prop_assert_eq!(report.modifier_pairs.len(), results.len() / 2);
        for p in &report.modifier_pairs {
            let i: usize = p.pair_id[1..].parse().unwrap();
            prop_assert_eq!(p.accuracy_without, results[2 * i].accuracy);
            prop_assert_eq!(p.accuracy_with, results[2 * i + 1].accuracy);
        }
    }
}
