//! Suite evaluation: render each condition, score it, sum surprisals per
//! region, check the predictions, and aggregate pass rates.

mod compare;
mod report;

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::{align, AlignError};
use crate::prediction::{
    evaluate_prediction, parse_prediction, EvalError, Formula, SurprisalTable,
};
use crate::scoring::{ScoreError, Scorer};
use crate::suite::{
    render_sentence, validate_suite, Circuit, Item, RenderError, TestSuite, ValidationReport,
};

pub use compare::{compare_runs, CompareError, ComparisonRow, ComparisonTable, ModifierRow};
pub use report::{language_name, OutputFormat};

/// A validated suite with its predictions parsed.
#[derive(Debug, Clone)]
pub struct CompiledSuite {
    suite: TestSuite,
    predictions: Vec<Formula>,
}

impl CompiledSuite {
    pub fn compile(suite: TestSuite) -> Result<Self, ValidationReport> {
        let report = validate_suite(&suite);
        if !report.is_clean() {
            return Err(report);
        }
        let predictions = suite
            .predictions
            .iter()
            .map(|p| parse_prediction(p).expect("validated predictions parse"))
            .collect();
        Ok(Self { suite, predictions })
    }

    pub fn suite(&self) -> &TestSuite {
        &self.suite
    }

    pub fn predictions(&self) -> &[Formula] {
        &self.predictions
    }

    pub fn name(&self) -> &str {
        &self.suite.name
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemResult {
    pub item_index: usize,
    pub predictions: Vec<bool>,
    pub passed: bool,
    pub surprisal_table: SurprisalTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub circuit: Circuit,
    pub language: String,
    pub has_modifier: bool,
    pub modifier_pair_id: Option<String>,
    pub accuracy: f64,
    pub item_results: Vec<ItemResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifierPair {
    pub pair_id: String,
    pub accuracy_without: f64,
    pub accuracy_with: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scorer_id: String,
    /// Set when the run was aborted and only the leading suites completed.
    pub partial: bool,
    pub overall: f64,
    pub circuit_means: BTreeMap<Circuit, f64>,
    pub modifier_pairs: Vec<ModifierPair>,
    pub suite_results: Vec<SuiteResult>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("suite `{suite}`, item {item}, condition `{condition}`: {source}")]
    Score {
        suite: String,
        item: usize,
        condition: String,
        source: ScoreError,
    },
    #[error("suite `{suite}`, item {item}, condition `{condition}`: {source}")]
    Align {
        suite: String,
        item: usize,
        condition: String,
        source: AlignError,
    },
    #[error("suite `{suite}`, item {item}, condition `{condition}`: {source}")]
    Render {
        suite: String,
        item: usize,
        condition: String,
        source: RenderError,
    },
    #[error("suite `{suite}`, item {item}, prediction {prediction}: {source}")]
    Eval {
        suite: String,
        item: usize,
        prediction: usize,
        source: EvalError,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("suite name `{0}` occurs more than once")]
    DuplicateSuiteName(String),
    #[error("run aborted: {error}")]
    Aborted {
        error: EngineError,
        /// Results for the suites that completed before the failing one.
        partial: Box<RunReport>,
    },
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

/// Scores every condition of `item` and evaluates all predictions.
pub fn evaluate_item(
    suite: &CompiledSuite,
    item: &Item,
    scorer: &dyn Scorer,
) -> Result<ItemResult, EngineError> {
    let name = &suite.suite.name;
    let mut table = SurprisalTable::new();
    for (condition, sentence) in &item.sentences {
        let rendered = render_sentence(sentence).map_err(|source| EngineError::Render {
            suite: name.clone(),
            item: item.index,
            condition: condition.clone(),
            source,
        })?;
        let tokens = scorer
            .score(&rendered.text)
            .map_err(|source| EngineError::Score {
                suite: name.clone(),
                item: item.index,
                condition: condition.clone(),
                source,
            })?;
        let regions = align(&rendered.spans, &tokens).map_err(|source| EngineError::Align {
            suite: name.clone(),
            item: item.index,
            condition: condition.clone(),
            source,
        })?;
        table.insert_condition(condition.clone(), regions);
    }
    let predictions = suite
        .predictions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            evaluate_prediction(p, &table).map_err(|source| EngineError::Eval {
                suite: name.clone(),
                item: item.index,
                prediction: i + 1,
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ItemResult {
        item_index: item.index,
        passed: predictions.iter().all(|&p| p),
        predictions,
        surprisal_table: table,
    })
}

pub fn evaluate_suite(
    suite: &CompiledSuite,
    scorer: &dyn Scorer,
) -> Result<SuiteResult, EngineError> {
    let items = suite
        .suite
        .items
        .iter()
        .map(|item| evaluate_item(suite, item, scorer))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(suite_result(suite, items))
}

fn suite_result(suite: &CompiledSuite, item_results: Vec<ItemResult>) -> SuiteResult {
    let s = &suite.suite;
    let passed = item_results.iter().filter(|r| r.passed).count();
    SuiteResult {
        name: s.name.clone(),
        circuit: s.circuit,
        language: s.language.clone(),
        has_modifier: s.has_modifier,
        modifier_pair_id: s.modifier_pair_id.clone(),
        accuracy: passed as f64 / item_results.len() as f64,
        item_results,
    }
}

/// Evaluates all suites with up to `workers` items in flight at once.
/// Aggregation follows suite and item order, so the report does not depend
/// on `workers`. The first failing item (in suite/item order) aborts the run.
pub fn evaluate_run(
    suites: &[CompiledSuite],
    scorer: &dyn Scorer,
    workers: usize,
) -> Result<RunReport, RunError> {
    let mut seen = HashSet::new();
    for s in suites {
        if !seen.insert(s.name()) {
            return Err(RunError::DuplicateSuiteName(s.name().to_string()));
        }
    }

    let tasks: Vec<(usize, &Item)> = suites
        .iter()
        .enumerate()
        .flat_map(|(si, s)| s.suite.items.iter().map(move |item| (si, item)))
        .collect();
    let first_failure = AtomicUsize::new(usize::MAX);
    let run_task =
        |(t, &(si, item)): (usize, &(usize, &Item))| -> Option<Result<ItemResult, EngineError>> {
            // Tasks after a known failure are never needed.
            if t > first_failure.load(Ordering::Relaxed) {
                return None;
            }
            let r = evaluate_item(&suites[si], item, scorer);
            if r.is_err() {
                first_failure.fetch_min(t, Ordering::Relaxed);
            }
            Some(r)
        };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RunError::WorkerPool(e.to_string()))?;
    let outcomes: Vec<Option<Result<ItemResult, EngineError>>> =
        pool.install(|| tasks.par_iter().enumerate().map(run_task).collect());

    let mut outcomes = outcomes.into_iter();
    let mut results = Vec::with_capacity(suites.len());
    for suite in suites {
        let mut items = Vec::with_capacity(suite.suite.items.len());
        for _ in &suite.suite.items {
            match outcomes.next().flatten() {
                Some(Ok(r)) => items.push(r),
                Some(Err(error)) => {
                    return Err(RunError::Aborted {
                        error,
                        partial: Box::new(build_report(scorer.id(), results, true)),
                    })
                }
                None => unreachable!("tasks before the first failure always run"),
            }
        }
        results.push(suite_result(suite, items));
    }
    Ok(build_report(scorer.id(), results, false))
}

/// Assembles a report, deriving all aggregates from `suite_results`.
pub fn build_report(scorer_id: &str, suite_results: Vec<SuiteResult>, partial: bool) -> RunReport {
    let overall = mean(suite_results.iter().map(|s| s.accuracy));

    let mut by_circuit: BTreeMap<Circuit, Vec<f64>> = BTreeMap::new();
    for s in &suite_results {
        by_circuit.entry(s.circuit).or_default().push(s.accuracy);
    }
    let circuit_means = by_circuit
        .into_iter()
        .map(|(c, accs)| (c, mean(accs.into_iter())))
        .collect();

    let mut pair_ids: Vec<&str> = Vec::new();
    for s in &suite_results {
        if let Some(id) = s.modifier_pair_id.as_deref() {
            if !pair_ids.contains(&id) {
                pair_ids.push(id);
            }
        }
    }
    let modifier_pairs = pair_ids
        .into_iter()
        .filter_map(|id| {
            let side = |with: bool| {
                let accs: Vec<f64> = suite_results
                    .iter()
                    .filter(|s| s.modifier_pair_id.as_deref() == Some(id) && s.has_modifier == with)
                    .map(|s| s.accuracy)
                    .collect();
                (!accs.is_empty()).then(|| mean(accs.into_iter()))
            };
            Some(ModifierPair {
                pair_id: id.to_string(),
                accuracy_without: side(false)?,
                accuracy_with: side(true)?,
            })
        })
        .collect();

    RunReport {
        scorer_id: scorer_id.to_string(),
        partial,
        overall,
        circuit_means,
        modifier_pairs,
        suite_results,
    }
}

/// Mean in iteration order; NaN for no values.
pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{OracleScorer, ScoredToken, UniformScorer};
    use crate::suite::RegionedSentence;
    use indexmap::IndexMap;

    pub(super) fn two_condition_suite(name: &str, items: usize) -> TestSuite {
        TestSuite {
            name: name.into(),
            circuit: Circuit::Agreement,
            language: "es".into(),
            has_modifier: false,
            modifier_pair_id: None,
            condition_names: vec!["good".into(), "bad".into()],
            region_names: vec!["subject".into(), "verb".into()],
            items: (1..=items)
                .map(|index| Item {
                    index,
                    sentences: IndexMap::from([
                        (
                            "good".to_string(),
                            RegionedSentence::new(["Tú", &format!("cocinas{index}")]),
                        ),
                        (
                            "bad".to_string(),
                            RegionedSentence::new(["Tú", &format!("cocino{index}")]),
                        ),
                    ]),
                })
                .collect(),
            predictions: vec!["(2;good) < (2;bad)".into()],
        }
    }

    /// Good sentences cost 1 bit per token, bad ones 2, except that items
    /// listed in `flipped` are scored the other way round.
    fn oracle(suite: &TestSuite, flipped: &[usize]) -> OracleScorer {
        let mut o = OracleScorer::new("oracle");
        for item in &suite.items {
            for (cond, s) in &item.sentences {
                let good = (cond == "good") != flipped.contains(&item.index);
                let text = render_sentence(s).unwrap().text;
                o.insert_uniform(&text, if good { 1.0 } else { 2.0 })
                    .unwrap();
            }
        }
        o
    }

    #[test]
    fn oracle_passes_every_item() {
        let suite = CompiledSuite::compile(two_condition_suite("s", 20)).unwrap();
        let r = evaluate_suite(&suite, &oracle(suite.suite(), &[])).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.item_results[0].surprisal_table.get("bad", 2), Some(2.0));
    }

    #[test]
    fn failing_half_the_items() {
        let suite = CompiledSuite::compile(two_condition_suite("s", 20)).unwrap();
        let flipped: Vec<usize> = (1..=10).collect();
        let r = evaluate_suite(&suite, &oracle(suite.suite(), &flipped)).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert!(!r.item_results[9].passed && r.item_results[10].passed);
    }

    #[test]
    fn ties_fail() {
        let suite = CompiledSuite::compile(two_condition_suite("s", 3)).unwrap();
        let r = evaluate_suite(&suite, &UniformScorer::new("u", 100)).unwrap();
        assert_eq!(r.accuracy, 0.0);
    }

    #[test]
    fn duplicate_names() {
        let a = CompiledSuite::compile(two_condition_suite("s", 1)).unwrap();
        let err = evaluate_run(&[a.clone(), a], &UniformScorer::new("u", 2), 1).unwrap_err();
        assert_eq!(err, RunError::DuplicateSuiteName("s".into()));
    }

    #[test]
    fn aborts_with_partial_report() {
        let first = CompiledSuite::compile(two_condition_suite("first", 2)).unwrap();
        let mut second = two_condition_suite("second", 2);
        for item in &mut second.items {
            for s in item.sentences.values_mut() {
                s.regions[0] = "Usted".into();
            }
        }
        let second = CompiledSuite::compile(second).unwrap();
        // Knows only the first suite's sentences.
        let o = oracle(first.suite(), &[]);
        for workers in [1, 4] {
            match evaluate_run(&[first.clone(), second.clone()], &o, workers) {
                Err(RunError::Aborted { error, partial }) => {
                    assert!(partial.partial);
                    assert_eq!(partial.suite_results.len(), 1);
                    assert!(matches!(
                        error,
                        EngineError::Score {
                            item: 1,
                            source: ScoreError::UnknownText(_),
                            ..
                        }
                    ));
                }
                other => panic!("expected abort, got {other:?}"),
            }
        }
    }

    fn result(name: &str, circuit: Circuit, acc: f64, pair: Option<(&str, bool)>) -> SuiteResult {
        SuiteResult {
            name: name.into(),
            circuit,
            language: "es".into(),
            has_modifier: pair.is_some_and(|p| p.1),
            modifier_pair_id: pair.map(|p| p.0.to_string()),
            accuracy: acc,
            item_results: vec![],
        }
    }

    #[test]
    fn aggregates() {
        let r = build_report(
            "x",
            vec![
                result("a", Circuit::Agreement, 0.4, None),
                result("b", Circuit::Licensing, 0.8, None),
            ],
            false,
        );
        assert!((r.overall - 0.6).abs() < 1e-15);
        assert_eq!(r.circuit_means[&Circuit::Agreement], 0.4);
        assert_eq!(r.circuit_means[&Circuit::Licensing], 0.8);

        let r = build_report(
            "x",
            vec![
                result("plain", Circuit::Agreement, 0.9, Some(("sv", false))),
                result("rc", Circuit::Agreement, 0.7, Some(("sv", true))),
                result("lonely", Circuit::Agreement, 0.5, Some(("other", true))),
            ],
            false,
        );
        assert_eq!(
            r.modifier_pairs,
            [ModifierPair {
                pair_id: "sv".into(),
                accuracy_without: 0.9,
                accuracy_with: 0.7
            }]
        );
    }

    #[test]
    fn items_are_conjunctive() {
        let mut s = two_condition_suite("s", 1);
        s.predictions.push("(1;good) < (1;bad)".into());
        let suite = CompiledSuite::compile(s).unwrap();
        let mut o = OracleScorer::new("o");
        let item = &suite.suite().items[0];
        for (cond, verb_bits) in [("good", 1.0), ("bad", 2.0)] {
            let text = render_sentence(&item.sentences[cond]).unwrap().text;
            let tokens = vec![
                ScoredToken::new("Tú", 0, 2, 5.0),
                ScoredToken::new("v", 3, text.chars().count(), verb_bits),
            ];
            o.insert_tokens(&text, tokens).unwrap();
        }
        let r = evaluate_item(&suite, item, &o).unwrap();
        assert_eq!(r.predictions, [true, false]);
        assert!(!r.passed);
    }
}
