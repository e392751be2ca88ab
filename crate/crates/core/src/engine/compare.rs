use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::report::{language_name, percent};
use super::{mean, RunReport, SuiteResult};
use crate::suite::Circuit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("nothing to compare")]
    Empty,
    #[error("`{left}` and `{right}` cover different {language} suites: {detail}")]
    SuiteSetMismatch {
        language: String,
        left: String,
        right: String,
        detail: String,
    },
}

/// One line of a side-by-side matrix; `values[m]` belongs to model `m`, and
/// is `None` when that model was not run on the row's language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub language: String,
    pub label: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifierRow {
    pub language: String,
    pub pair_id: String,
    /// (without, with) per model.
    pub values: Vec<Option<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub models: Vec<String>,
    pub languages: Vec<String>,
    /// Mean suite accuracy per language; `overall[m][l]` pairs with
    /// `models[m]` and `languages[l]`.
    pub overall: Vec<Vec<Option<f64>>>,
    pub circuits: Vec<ComparisonRow>,
    pub suites: Vec<ComparisonRow>,
    pub modifiers: Vec<ModifierRow>,
}

/// Lines up several runs. Models need not cover the same languages, but
/// all runs that include a language must include the same suites for it.
pub fn compare_runs(reports: &[RunReport]) -> Result<ComparisonTable, CompareError> {
    if reports.is_empty() {
        return Err(CompareError::Empty);
    }
    let mut languages: Vec<String> = Vec::new();
    for r in reports {
        for s in &r.suite_results {
            if !languages.contains(&s.language) {
                languages.push(s.language.clone());
            }
        }
    }

    let suites_of = |r: &RunReport, lang: &str| -> BTreeSet<String> {
        r.suite_results
            .iter()
            .filter(|s| s.language == lang)
            .map(|s| s.name.clone())
            .collect()
    };
    for lang in &languages {
        let covering: Vec<&RunReport> = reports
            .iter()
            .filter(|r| r.suite_results.iter().any(|s| &s.language == lang))
            .collect();
        let reference = suites_of(covering[0], lang);
        for other in &covering[1..] {
            let set = suites_of(other, lang);
            if set != reference {
                let only_left: Vec<_> = reference.difference(&set).cloned().collect();
                let only_right: Vec<_> = set.difference(&reference).cloned().collect();
                return Err(CompareError::SuiteSetMismatch {
                    language: lang.clone(),
                    left: covering[0].scorer_id.clone(),
                    right: other.scorer_id.clone(),
                    detail: format!("only in left: {only_left:?}; only in right: {only_right:?}"),
                });
            }
        }
    }

    let in_lang = |r: &'_ RunReport, lang: &str| -> Vec<SuiteResult> {
        r.suite_results
            .iter()
            .filter(|s| s.language == lang)
            .cloned()
            .collect()
    };
    let overall = reports
        .iter()
        .map(|r| {
            languages
                .iter()
                .map(|l| {
                    let s = in_lang(r, l);
                    (!s.is_empty()).then(|| mean(s.iter().map(|s| s.accuracy)))
                })
                .collect()
        })
        .collect();

    let mut circuits = Vec::new();
    let mut suites = Vec::new();
    let mut modifiers = Vec::new();
    for lang in &languages {
        let reference = reports
            .iter()
            .map(|r| in_lang(r, lang))
            .find(|s| !s.is_empty())
            .expect("language comes from some report");
        for circuit in Circuit::ALL {
            if !reference.iter().any(|s| s.circuit == circuit) {
                continue;
            }
            circuits.push(ComparisonRow {
                language: lang.clone(),
                label: circuit.display_name().to_string(),
                values: reports
                    .iter()
                    .map(|r| {
                        let accs: Vec<f64> = in_lang(r, lang)
                            .iter()
                            .filter(|s| s.circuit == circuit)
                            .map(|s| s.accuracy)
                            .collect();
                        (!accs.is_empty()).then(|| mean(accs.into_iter()))
                    })
                    .collect(),
            });
        }
        for s in &reference {
            suites.push(ComparisonRow {
                language: lang.clone(),
                label: s.name.clone(),
                values: reports
                    .iter()
                    .map(|r| {
                        r.suite_results
                            .iter()
                            .find(|x| x.name == s.name)
                            .map(|x| x.accuracy)
                    })
                    .collect(),
            });
        }
        let mut pair_ids: Vec<String> = Vec::new();
        for s in &reference {
            if let Some(id) = &s.modifier_pair_id {
                if !pair_ids.contains(id) {
                    pair_ids.push(id.clone());
                }
            }
        }
        for id in pair_ids {
            let values: Vec<Option<(f64, f64)>> = reports
                .iter()
                .map(|r| {
                    let side = |with: bool| {
                        let accs: Vec<f64> = in_lang(r, lang)
                            .iter()
                            .filter(|s| {
                                s.modifier_pair_id.as_deref() == Some(id.as_str())
                                    && s.has_modifier == with
                            })
                            .map(|s| s.accuracy)
                            .collect();
                        (!accs.is_empty()).then(|| mean(accs.into_iter()))
                    };
                    Some((side(false)?, side(true)?))
                })
                .collect();
            if values.iter().any(Option::is_some) {
                modifiers.push(ModifierRow {
                    language: lang.clone(),
                    pair_id: id,
                    values,
                });
            }
        }
    }

    Ok(ComparisonTable {
        models: reports.iter().map(|r| r.scorer_id.clone()).collect(),
        languages,
        overall,
        circuits,
        suites,
        modifiers,
    })
}

const MISSING: &str = "---";

fn cell(v: Option<f64>) -> String {
    v.map(percent).unwrap_or_else(|| MISSING.to_string())
}

impl ComparisonTable {
    /// Models as rows, languages as columns, mean suite accuracy in percent.
    pub fn render_language_summary(&self) -> String {
        let w0 = self
            .models
            .iter()
            .map(|m| m.chars().count())
            .chain([5])
            .max()
            .unwrap_or(5);
        let names: Vec<&str> = self.languages.iter().map(|l| language_name(l)).collect();
        let w = names
            .iter()
            .map(|n| n.chars().count())
            .chain([7])
            .max()
            .unwrap_or(7);
        let mut out = format!("{:<w0$}", "Model");
        for n in &names {
            let _ = write!(out, "  {n:>w$}");
        }
        out.push('\n');
        for (m, row) in self.models.iter().zip(&self.overall) {
            let _ = write!(out, "{m:<w0$}");
            for v in row {
                let _ = write!(out, "  {:>w$}", cell(*v));
            }
            out.push('\n');
        }
        out
    }

    fn render_rows(&self, title: &str, rows: &[ComparisonRow], out: &mut String) {
        for lang in &self.languages {
            let rows: Vec<&ComparisonRow> = rows.iter().filter(|r| &r.language == lang).collect();
            if rows.is_empty() {
                continue;
            }
            let w0 = rows
                .iter()
                .map(|r| r.label.chars().count())
                .chain([title.len() + lang.len() + 3])
                .max()
                .unwrap_or(0);
            let w = self
                .models
                .iter()
                .map(|m| m.chars().count())
                .chain([6])
                .max()
                .unwrap_or(6);
            let _ = write!(
                out,
                "\n{:<w0$}",
                format!("{title} ({})", language_name(lang))
            );
            for m in &self.models {
                let _ = write!(out, "  {m:>w$}");
            }
            out.push('\n');
            for r in rows {
                let _ = write!(out, "{:<w0$}", r.label);
                for v in &r.values {
                    let _ = write!(out, "  {:>w$}", cell(*v));
                }
                out.push('\n');
            }
        }
    }

    /// Language summary followed by per-circuit, per-suite and modifier
    /// matrices.
    pub fn render(&self) -> String {
        let mut out = self.render_language_summary();
        self.render_rows("Circuit", &self.circuits, &mut out);
        self.render_rows("Suite", &self.suites, &mut out);
        if !self.modifiers.is_empty() {
            let rows: Vec<ComparisonRow> = self
                .modifiers
                .iter()
                .flat_map(|m| {
                    [(false, "without"), (true, "with")].map(|(with, tag)| ComparisonRow {
                        language: m.language.clone(),
                        label: format!("{} {tag}", m.pair_id),
                        values: m
                            .values
                            .iter()
                            .map(|v| v.map(|(a, b)| if with { b } else { a }))
                            .collect(),
                    })
                })
                .collect();
            self.render_rows("Modifier pair", &rows, &mut out);
        }
        out
    }
}
