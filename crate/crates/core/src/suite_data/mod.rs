//! Shipped Spanish suites, built by expanding frame × lexicon templates.
//!
//! A template has one frame (a list of region templates containing
//! `{slot}` or `{slot.field}` placeholders) and a lexicon per slot. Each
//! lexicon entry gives, for every field, either one surface form shared by
//! all conditions or one form per condition. Items are produced either as
//! the Cartesian product of the slots (first slot varying slowest) or by
//! zipping slots of equal length.

mod fixtures;
mod spanish;

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::OracleScorer;
use crate::suite::{
    render_sentence, serialize_suite, validate_suite, Circuit, Item, RegionedSentence, TestSuite,
    ValidationReport,
};

pub use fixtures::{fixture_templates, grammaticality_oracle, GRAMMATICALITY_FIXTURE, TIE_FIXTURE};
pub use spanish::spanish_templates;

/// Small Spanish corpus for training the default n-gram scorer.
pub const TOY_CORPUS_ES: &str = include_str!("../../../../data/v1/corpus/es_toy.txt");

/// Version directory of the data layout.
pub const DATA_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Forms {
    Same(String),
    ByCondition(IndexMap<String, String>),
}

impl Forms {
    pub fn same(s: impl Into<String>) -> Self {
        Forms::Same(s.into())
    }

    /// Pairs `conditions[i]` with `forms[i]`.
    pub fn by(conditions: &[&str], forms: &[&str]) -> Self {
        assert_eq!(conditions.len(), forms.len(), "one form per condition");
        Forms::ByCondition(
            conditions
                .iter()
                .zip(forms)
                .map(|(c, f)| (c.to_string(), f.to_string()))
                .collect(),
        )
    }
}

/// One lexicon entry: surface forms for each field of its slot. The unnamed
/// field `""` is what a bare `{slot}` placeholder refers to.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexEntry {
    pub fields: IndexMap<String, Forms>,
}

impl LexEntry {
    pub fn single(forms: Forms) -> Self {
        Self {
            fields: IndexMap::from([(String::new(), forms)]),
        }
    }

    pub fn with(mut self, field: &str, forms: Forms) -> Self {
        self.fields.insert(field.to_string(), forms);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionMode {
    Cartesian,
    Zipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteMeta {
    pub name: String,
    pub slug: String,
    pub circuit: Circuit,
    pub language: String,
    pub has_modifier: bool,
    pub modifier_pair_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteTemplate {
    pub conditions: Vec<String>,
    pub region_names: Vec<String>,
    pub frame: Vec<String>,
    pub slots: IndexMap<String, Vec<LexEntry>>,
    pub mode: ExpansionMode,
    pub predictions: Vec<String>,
    /// Per-condition region costs for the constructed oracle scorer. Every
    /// prediction holds under these costs and fails under the inverted
    /// costs `ORACLE_CEILING - cost`.
    pub oracle_profile: IndexMap<String, Vec<f64>>,
}

/// A template together with the metadata of the suite it expands to.
#[derive(Debug, Clone, PartialEq)]
pub struct ShippedTemplate {
    pub meta: SuiteMeta,
    pub template: SuiteTemplate,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpandError {
    #[error("slot `{slot}` entry {entry}: {message}")]
    InconsistentLexicon {
        slot: String,
        entry: usize,
        message: String,
    },
    #[error("placeholder `{0}` has no matching slot")]
    UnknownPlaceholder(String),
    #[error("unterminated placeholder in region template `{0}`")]
    BadFrame(String),
    #[error("zipped slots have different lengths")]
    ZipLengthMismatch,
    #[error("expanded suite is invalid: {0:?}")]
    Invalid(ValidationReport),
}

enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str, &'a str),
}

fn parse_frame(region: &str) -> Result<Vec<Piece<'_>>, ExpandError> {
    let mut pieces = Vec::new();
    let mut rest = region;
    while let Some(open) = rest.find('{') {
        pieces.push(Piece::Text(&rest[..open]));
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| ExpandError::BadFrame(region.to_string()))?
            + open;
        let name = &rest[open + 1..close];
        let (slot, field) = name.split_once('.').unwrap_or((name, ""));
        pieces.push(Piece::Slot(slot, field));
        rest = &rest[close + 1..];
    }
    pieces.push(Piece::Text(rest));
    Ok(pieces)
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn check_lexicon(template: &SuiteTemplate) -> Result<(), ExpandError> {
    for (slot, entries) in &template.slots {
        for (i, entry) in entries.iter().enumerate() {
            for (field, forms) in &entry.fields {
                let Forms::ByCondition(map) = forms else {
                    continue;
                };
                let inconsistent = |message: String| ExpandError::InconsistentLexicon {
                    slot: slot.clone(),
                    entry: i + 1,
                    message,
                };
                if let Some(c) = template.conditions.iter().find(|c| !map.contains_key(*c)) {
                    return Err(inconsistent(format!(
                        "field `{field}` has no form for condition `{c}`"
                    )));
                }
                if let Some(c) = map.keys().find(|c| !template.conditions.contains(c)) {
                    return Err(inconsistent(format!(
                        "field `{field}` has a form for unknown condition `{c}`"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Expands a template into a validated suite.
pub fn expand_template(
    template: &SuiteTemplate,
    meta: &SuiteMeta,
) -> Result<TestSuite, ExpandError> {
    check_lexicon(template)?;
    let frame = template
        .frame
        .iter()
        .map(|r| parse_frame(r))
        .collect::<Result<Vec<_>, _>>()?;
    let slot_index = |slot: &str| template.slots.get_index_of(slot);
    for piece in frame.iter().flatten() {
        if let Piece::Slot(slot, field) = piece {
            let Some(i) = slot_index(slot) else {
                return Err(ExpandError::UnknownPlaceholder(slot.to_string()));
            };
            let (_, entries) = template.slots.get_index(i).expect("index from lookup");
            if let Some(n) = entries.iter().position(|e| !e.fields.contains_key(*field)) {
                return Err(ExpandError::InconsistentLexicon {
                    slot: slot.to_string(),
                    entry: n + 1,
                    message: format!("missing field `{field}`"),
                });
            }
        }
    }

    let sizes: Vec<usize> = template.slots.values().map(Vec::len).collect();
    let combinations: Vec<Vec<usize>> = match template.mode {
        ExpansionMode::Zipped => {
            let n = sizes.first().copied().unwrap_or(0);
            if sizes.iter().any(|&s| s != n) {
                return Err(ExpandError::ZipLengthMismatch);
            }
            (0..n).map(|i| vec![i; sizes.len()]).collect()
        }
        ExpansionMode::Cartesian => {
            let mut combos = vec![vec![]];
            for &size in &sizes {
                combos = combos
                    .into_iter()
                    .flat_map(|prefix: Vec<usize>| {
                        (0..size).map(move |i| {
                            let mut c = prefix.clone();
                            c.push(i);
                            c
                        })
                    })
                    .collect();
            }
            combos
        }
    };

    let items = combinations
        .iter()
        .enumerate()
        .map(|(n, combo)| {
            let sentences = template
                .conditions
                .iter()
                .map(|cond| {
                    let regions = frame
                        .iter()
                        .map(|pieces| {
                            let mut s = String::new();
                            for piece in pieces {
                                match piece {
                                    Piece::Text(t) => s.push_str(t),
                                    Piece::Slot(slot, field) => {
                                        let i = slot_index(slot).expect("checked above");
                                        let entry = &template.slots[i][combo[i]];
                                        s.push_str(match &entry.fields[*field] {
                                            Forms::Same(f) => f,
                                            Forms::ByCondition(m) => &m[cond],
                                        });
                                    }
                                }
                            }
                            normalize(&s)
                        })
                        .collect::<Vec<_>>();
                    (cond.clone(), RegionedSentence { regions })
                })
                .collect();
            Item {
                index: n + 1,
                sentences,
            }
        })
        .collect();

    let suite = TestSuite {
        name: meta.name.clone(),
        circuit: meta.circuit,
        language: meta.language.clone(),
        has_modifier: meta.has_modifier,
        modifier_pair_id: meta.modifier_pair_id.clone(),
        condition_names: template.conditions.clone(),
        region_names: template.region_names.clone(),
        items,
        predictions: template.predictions.clone(),
    };
    let report = validate_suite(&suite);
    if report.is_clean() {
        Ok(suite)
    } else {
        Err(ExpandError::Invalid(report))
    }
}

impl ShippedTemplate {
    pub fn expand(&self) -> TestSuite {
        expand_template(&self.template, &self.meta)
            .unwrap_or_else(|e| panic!("shipped suite `{}` does not expand: {e}", self.meta.name))
    }

    /// Path of the suite document relative to the data root.
    pub fn relative_path(&self) -> PathBuf {
        suite_path(
            &self.meta.language,
            self.meta.circuit.as_str(),
            &self.meta.slug,
        )
    }
}

fn suite_path(language: &str, group: &str, slug: &str) -> PathBuf {
    [DATA_VERSION, language, group, &format!("{slug}.json")]
        .iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub slug: String,
    pub circuit: Circuit,
    pub language: String,
    pub has_modifier: bool,
    pub modifier_pair_id: Option<String>,
    pub item_count: usize,
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.language,
            self.circuit,
            self.name,
            if self.has_modifier { "modifier" } else { "-" },
            self.item_count
        )
    }
}

pub fn list_shipped_suites() -> Vec<CatalogEntry> {
    spanish_templates()
        .iter()
        .map(|t| CatalogEntry {
            name: t.meta.name.clone(),
            slug: t.meta.slug.clone(),
            circuit: t.meta.circuit,
            language: t.meta.language.clone(),
            has_modifier: t.meta.has_modifier,
            modifier_pair_id: t.meta.modifier_pair_id.clone(),
            item_count: t.expand().items.len(),
        })
        .collect()
}

pub fn shipped_suites() -> Vec<TestSuite> {
    spanish_templates()
        .iter()
        .map(ShippedTemplate::expand)
        .collect()
}

/// Upper bound on oracle region costs; inverted costs are `ORACLE_CEILING - cost`.
pub const ORACLE_CEILING: f64 = 10.0;

/// Builds the constructed oracle for the given templates. Each region's
/// profile cost is spread evenly over its word tokens; empty regions cost 0.
/// With `inverted`, every non-empty region costs `ORACLE_CEILING - cost`,
/// which flips every comparison whose two sides have equal coefficient sums.
pub fn oracle_scorer_for(templates: &[ShippedTemplate], inverted: bool) -> OracleScorer {
    let mut oracle = OracleScorer::new(if inverted {
        "inverted-oracle"
    } else {
        "oracle"
    });
    for t in templates {
        let suite = t.expand();
        for item in &suite.items {
            for (cond, sentence) in &item.sentences {
                let profile = &t.template.oracle_profile[cond];
                let costs: Vec<f64> = sentence
                    .regions
                    .iter()
                    .zip(profile)
                    .map(|(region, &c)| match (region.is_empty(), inverted) {
                        (true, _) => 0.0,
                        (false, false) => c,
                        (false, true) => ORACLE_CEILING - c,
                    })
                    .collect();
                let rendered = render_sentence(sentence).expect("validated sentences render");
                oracle
                    .insert_region_costs(&rendered.text, &rendered.spans, &costs)
                    .unwrap_or_else(|e| panic!("suite `{}` item {}: {e}", suite.name, item.index));
            }
        }
    }
    oracle
}

/// Oracle covering every shipped suite and fixture.
pub fn oracle_scorer(inverted: bool) -> OracleScorer {
    let mut all = spanish_templates();
    all.extend(fixture_templates());
    oracle_scorer_for(&all, inverted)
}

/// Anchor sentences and the suite each must appear in, as
/// `slug<TAB>sentence` lines.
pub const ANCHOR_SENTENCES: &str = include_str!("../../../../data/v1/es/anchor_sentences.tsv");

pub fn anchor_sentences() -> Vec<(&'static str, &'static str)> {
    ANCHOR_SENTENCES
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split_once('\t').expect("slug<TAB>sentence"))
        .collect()
}

/// Writes every shipped suite and fixture document below `root`, returning
/// the paths written.
pub fn write_data_dir(root: &Path) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let docs = spanish_templates()
        .into_iter()
        .map(|t| (t.relative_path(), t.expand()))
        .chain(fixture_templates().into_iter().map(|t| {
            let path = suite_path("fixtures", t.meta.circuit.as_str(), &t.meta.slug);
            (path, t.expand())
        }));
    for (rel, suite) in docs {
        let path = root.join(rel);
        fs::create_dir_all(path.parent().expect("suite paths have a parent"))?;
        fs::write(&path, serialize_suite(&suite))?;
        written.push(path);
    }
    Ok(written)
}


#[cfg(test)]
mod shipped_tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::engine::{evaluate_run, CompiledSuite};
    use crate::scoring::UniformScorer;

    fn compiled(templates: &[ShippedTemplate]) -> Vec<CompiledSuite> {
        templates
            .iter()
            .map(|t| CompiledSuite::compile(t.expand()).expect("shipped suites compile"))
            .collect()
    }

    #[test]
    fn twenty_six_suites_with_enough_items() {
        let catalog = list_shipped_suites();
        assert_eq!(catalog.len(), 26);
        let mut per_circuit: BTreeMap<Circuit, usize> = BTreeMap::new();
        for e in &catalog {
            assert!(e.item_count >= 20, "{} has {} items", e.name, e.item_count);
            assert_eq!(e.language, "es");
            *per_circuit.entry(e.circuit).or_default() += 1;
        }
        let counts: Vec<(Circuit, usize)> = per_circuit.into_iter().collect();
        assert_eq!(
            counts,
            [
                (Circuit::Agreement, 9),
                (Circuit::CenterEmbedding, 2),
                (Circuit::GardenPathEffects, 2),
                (Circuit::GrossSyntacticState, 3),
                (Circuit::Licensing, 4),
                (Circuit::LongDistanceDependencies, 3),
                (Circuit::Linearization, 3),
            ]
            .into_iter()
            .collect::<BTreeMap<_, _>>()
            .into_iter()
            .collect::<Vec<_>>()
        );
        assert!(catalog
            .iter()
            .any(|e| e.name == "NP/Z Garden Path Effect (Overt Object)"));
        assert!(catalog.iter().all(|e| !e.name.contains("MVRR")));
    }

    #[test]
    fn names_and_slugs_are_unique() {
        let catalog = list_shipped_suites();
        let mut names: Vec<&str> = catalog.iter().map(|e| e.name.as_str()).collect();
        let mut slugs: Vec<&str> = catalog.iter().map(|e| e.slug.as_str()).collect();
        names.sort();
        names.dedup();
        slugs.sort();
        slugs.dedup();
        assert_eq!(names.len(), 26);
        assert_eq!(slugs.len(), 26);
    }

    #[test]
    fn modifier_pairs_have_both_sides() {
        let catalog = list_shipped_suites();
        let mut pairs: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for e in &catalog {
            if let Some(id) = &e.modifier_pair_id {
                let p = pairs.entry(id).or_default();
                if e.has_modifier {
                    p.1 += 1;
                } else {
                    p.0 += 1;
                }
            } else {
                assert!(!e.has_modifier, "{}", e.name);
            }
        }
        assert_eq!(
            pairs.into_iter().collect::<Vec<_>>(),
            [
                ("attribute_agreement", (1, 2)),
                ("center_embedding", (1, 1)),
                ("filler_gap", (1, 1)),
                ("subject_verb_agreement", (1, 2)),
                ("subordination", (1, 2)),
            ]
        );
    }

    #[test]
    fn anchor_sentences_appear_in_first_item() {
        let templates = spanish_templates();
        for (slug, sentence) in anchor_sentences() {
            let t = templates
                .iter()
                .find(|t| t.meta.slug == slug)
                .unwrap_or_else(|| panic!("unknown suite {slug}"));
            let suite = t.expand();
            let first: Vec<String> = suite.items[0]
                .sentences
                .values()
                .map(|s| render_sentence(s).unwrap().text)
                .collect();
            assert!(
                first.iter().any(|s| s == sentence),
                "{slug}: `{sentence}` not in {first:?}"
            );
        }
    }

    #[test]
    fn every_region_in_a_prediction_is_non_empty() {
        for t in spanish_templates().iter().chain(&fixture_templates()) {
            let suite = t.expand();
            for p in &suite.predictions {
                let parsed = crate::prediction::parse_prediction(p).unwrap();
                for target in crate::prediction::referenced_targets(&parsed) {
                    for item in &suite.items {
                        assert!(
                            !item.sentences[target.condition.as_str()].regions[target.region - 1]
                                .is_empty(),
                            "{} item {} {target:?}",
                            suite.name,
                            item.index
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_passes_everything_and_inverted_oracle_nothing() {
        let mut templates = spanish_templates();
        templates.extend(fixture_templates());
        let suites = compiled(&templates);
        let good = evaluate_run(&suites, &oracle_scorer_for(&templates, false), 2).unwrap();
        let bad = evaluate_run(&suites, &oracle_scorer_for(&templates, true), 2).unwrap();
        for (g, b) in good.suite_results.iter().zip(&bad.suite_results) {
            assert_eq!(g.accuracy, 1.0, "{}", g.name);
            assert_eq!(b.accuracy, 0.0, "{}", b.name);
        }
    }

    #[test]
    fn fixtures_behave() {
        let templates = fixture_templates();
        let tie = compiled(&templates[..1]);
        let uniform = evaluate_run(&tie, &UniformScorer::new("uniform", 1000), 1).unwrap();
        assert_eq!(uniform.suite_results[0].accuracy, 0.0);

        let suites: Vec<TestSuite> = templates[1..].iter().map(ShippedTemplate::expand).collect();
        let compiled_g = compiled(&templates[1..]);
        let good = grammaticality_oracle(&suites, &["grammatical"], false);
        let bad = grammaticality_oracle(&suites, &["grammatical"], true);
        assert_eq!(evaluate_run(&compiled_g, &good, 1).unwrap().overall, 1.0);
        assert_eq!(evaluate_run(&compiled_g, &bad, 1).unwrap().overall, 0.0);
    }

    #[test]
    fn committed_documents_match_templates() {
        let dir = std::env::temp_dir().join(format!("syngauntlet-data-{}", std::process::id()));
        let written = write_data_dir(&dir).unwrap();
        let committed = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        for path in &written {
            let rel = path.strip_prefix(&dir).unwrap();
            let on_disk = fs::read_to_string(committed.join(rel))
                .unwrap_or_else(|e| panic!("{}: {e}", rel.display()));
            assert_eq!(
                on_disk,
                fs::read_to_string(path).unwrap(),
                "{} is stale",
                rel.display()
            );
        }
        let _ = fs::remove_dir_all(&dir);
    }
}
