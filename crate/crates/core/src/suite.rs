//! Test suite data model: items, conditions, regions and raw prediction
//! strings, together with the JSON document format suites are stored in.
//!
//! Loading is deliberately shallow. [`load_suite`] checks syntax, required
//! keys and primitive types; cross-field invariants (every item has every
//! condition, region counts agree, predictions reference real regions) are
//! the job of [`validate_suite`], which reports every violation it finds
//! instead of stopping at the first.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::prediction;

/// Families of syntactic phenomena a suite can belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Circuit {
    Agreement,
    Licensing,
    CenterEmbedding,
    LongDistanceDependencies,
    GrossSyntacticState,
    GardenPathEffects,
    Linearization,
}

impl Circuit {
    pub const ALL: [Circuit; 7] = [
        Circuit::Agreement,
        Circuit::Licensing,
        Circuit::CenterEmbedding,
        Circuit::LongDistanceDependencies,
        Circuit::GrossSyntacticState,
        Circuit::GardenPathEffects,
        Circuit::Linearization,
    ];

    /// Identifier used in documents and data directory paths.
    pub fn as_str(self) -> &'static str {
        match self {
            Circuit::Agreement => "agreement",
            Circuit::Licensing => "licensing",
            Circuit::CenterEmbedding => "center_embedding",
            Circuit::LongDistanceDependencies => "long_distance_dependencies",
            Circuit::GrossSyntacticState => "gross_syntactic_state",
            Circuit::GardenPathEffects => "garden_path_effects",
            Circuit::Linearization => "linearization",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Circuit::Agreement => "Agreement",
            Circuit::Licensing => "Licensing",
            Circuit::CenterEmbedding => "Center Embedding",
            Circuit::LongDistanceDependencies => "Long-Distance Dependencies",
            Circuit::GrossSyntacticState => "Gross Syntactic State",
            Circuit::GardenPathEffects => "Garden Path Effects",
            Circuit::Linearization => "Linearization",
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown circuit `{0}`")]
pub struct UnknownCircuit(pub String);

impl FromStr for Circuit {
    type Err = UnknownCircuit;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Circuit::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCircuit(s.to_string()))
    }
}

/// A sentence segmented into regions. Regions may be empty (gaps).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionedSentence {
    pub regions: Vec<String>,
}

impl RegionedSentence {
    pub fn new<S: Into<String>>(regions: impl IntoIterator<Item = S>) -> Self {
        Self {
            regions: regions.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    /// 1-based position of the item within its suite.
    pub index: usize,
    /// Condition name to sentence, in document order.
    pub sentences: IndexMap<String, RegionedSentence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSuite {
    pub name: String,
    pub circuit: Circuit,
    /// BCP-47 language tag.
    pub language: String,
    pub has_modifier: bool,
    /// Links the modifier and no-modifier versions of one test family.
    pub modifier_pair_id: Option<String>,
    pub condition_names: Vec<String>,
    pub region_names: Vec<String>,
    pub items: Vec<Item>,
    /// Raw prediction formulas; see [`crate::prediction`] for the syntax.
    pub predictions: Vec<String>,
}

impl TestSuite {
    pub fn region_count(&self) -> usize {
        self.region_names.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    MalformedDocument {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing required field `{field}`")]
    MissingField { field: String },
    #[error("field `{field}` has the wrong type: expected {expected}")]
    TypeMismatch {
        field: String,
        expected: &'static str,
    },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid value for `{field}`: {message}")]
    InvalidValue { field: String, message: String },
}

const SUITE_KEYS: [&str; 9] = [
    "name",
    "circuit",
    "language",
    "has_modifier",
    "modifier_pair_id",
    "region_names",
    "condition_names",
    "predictions",
    "items",
];

/// Parses a suite document. Cross-field invariants are not checked here.
pub fn load_suite(bytes: &[u8]) -> Result<TestSuite, LoadError> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| LoadError::MalformedDocument {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = as_object(&root, "<root>")?;
    reject_unknown(obj, &SUITE_KEYS, "")?;

    let circuit_raw = get_str(obj, "circuit", "circuit")?;
    let circuit = circuit_raw
        .parse::<Circuit>()
        .map_err(|e| LoadError::InvalidValue {
            field: "circuit".into(),
            message: e.to_string(),
        })?;

    let modifier_pair_id = match obj.get("modifier_pair_id") {
        None => return Err(missing("modifier_pair_id")),
        Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(mismatch("modifier_pair_id", "string or null")),
    };

    let items_val = require(obj, "items", "items")?;
    let items_arr = items_val
        .as_array()
        .ok_or_else(|| mismatch("items", "array"))?;
    let items = items_arr
        .iter()
        .enumerate()
        .map(|(i, v)| load_item(v, &format!("items[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(TestSuite {
        name: get_str(obj, "name", "name")?.to_string(),
        circuit,
        language: get_str(obj, "language", "language")?.to_string(),
        has_modifier: require(obj, "has_modifier", "has_modifier")?
            .as_bool()
            .ok_or_else(|| mismatch("has_modifier", "boolean"))?,
        modifier_pair_id,
        condition_names: get_str_array(obj, "condition_names", "condition_names")?,
        region_names: get_str_array(obj, "region_names", "region_names")?,
        items,
        predictions: get_str_array(obj, "predictions", "predictions")?,
    })
}

fn load_item(v: &Value, path: &str) -> Result<Item, LoadError> {
    let obj = as_object(v, path)?;
    reject_unknown(obj, &["index", "conditions"], path)?;
    let index_path = format!("{path}.index");
    let index = require(obj, "index", &index_path)?
        .as_u64()
        .ok_or_else(|| mismatch(&index_path, "non-negative integer"))? as usize;
    let cond_path = format!("{path}.conditions");
    let conds = as_object(require(obj, "conditions", &cond_path)?, &cond_path)?;
    let mut sentences = IndexMap::with_capacity(conds.len());
    for (name, body) in conds {
        let p = format!("{cond_path}.{name}");
        let body = as_object(body, &p)?;
        reject_unknown(body, &["regions"], &p)?;
        let regions = get_str_array(body, "regions", &format!("{p}.regions"))?;
        sentences.insert(name.clone(), RegionedSentence { regions });
    }
    Ok(Item { index, sentences })
}

fn missing(field: &str) -> LoadError {
    LoadError::MissingField {
        field: field.to_string(),
    }
}

fn mismatch(field: &str, expected: &'static str) -> LoadError {
    LoadError::TypeMismatch {
        field: field.to_string(),
        expected,
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, LoadError> {
    v.as_object().ok_or_else(|| mismatch(path, "object"))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), LoadError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) if path.is_empty() => Err(LoadError::UnknownKey { key: k.clone() }),
        Some(k) => Err(LoadError::UnknownKey {
            key: format!("{path}.{k}"),
        }),
        None => Ok(()),
    }
}

fn require<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, LoadError> {
    obj.get(key).ok_or_else(|| missing(path))
}

fn get_str<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str, LoadError> {
    require(obj, key, path)?
        .as_str()
        .ok_or_else(|| mismatch(path, "string"))
}

fn get_str_array(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<Vec<String>, LoadError> {
    let arr = require(obj, key, path)?
        .as_array()
        .ok_or_else(|| mismatch(path, "array of strings"))?;
    arr.iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| mismatch(path, "array of strings"))
        })
        .collect()
}

/// Serializes a suite to its document form (pretty-printed JSON, trailing newline).
pub fn serialize_suite(suite: &TestSuite) -> String {
    let items: Vec<Value> = suite
        .items
        .iter()
        .map(|item| {
            let conditions: Map<String, Value> = item
                .sentences
                .iter()
                .map(|(c, s)| (c.clone(), json!({ "regions": s.regions })))
                .collect();
            json!({ "index": item.index, "conditions": conditions })
        })
        .collect();
    let doc = json!({
        "name": suite.name,
        "circuit": suite.circuit.as_str(),
        "language": suite.language,
        "has_modifier": suite.has_modifier,
        "modifier_pair_id": suite.modifier_pair_id,
        "region_names": suite.region_names,
        "condition_names": suite.condition_names,
        "predictions": suite.predictions,
        "items": items,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("suite documents always serialize");
    out.push('\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ValidationCode {
    EmptyConditionNames,
    EmptyRegionNames,
    DuplicateConditionName,
    DuplicateRegionName,
    NoItems,
    DuplicateItemIndex,
    NonContiguousItemIndex,
    MissingCondition,
    UnknownCondition,
    RegionCountMismatch,
    LineBreakInRegion,
    EmptySentence,
    UnparseablePrediction,
    DanglingRegionRef,
    UnknownConditionRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationError {
    pub code: ValidationCode,
    pub item_index: Option<usize>,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item_index {
            Some(i) => write!(f, "{:?} (item {i}): {}", self.code, self.message),
            None => write!(f, "{:?}: {}", self.code, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<ValidationError>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn codes(&self) -> BTreeSet<ValidationCode> {
        self.errors.iter().map(|e| e.code).collect()
    }

    fn push(
        &mut self,
        code: ValidationCode,
        item_index: Option<usize>,
        message: impl Into<String>,
    ) {
        self.errors.push(ValidationError {
            code,
            item_index,
            message: message.into(),
        });
    }
}

/// Checks every structural invariant of a suite and lists all violations.
pub fn validate_suite(suite: &TestSuite) -> ValidationReport {
    use ValidationCode::*;
    let mut report = ValidationReport::default();

    if suite.condition_names.is_empty() {
        report.push(EmptyConditionNames, None, "condition_names is empty");
    }
    if suite.region_names.is_empty() {
        report.push(EmptyRegionNames, None, "region_names is empty");
    }
    for dup in duplicates(&suite.condition_names) {
        report.push(
            DuplicateConditionName,
            None,
            format!("condition `{dup}` declared more than once"),
        );
    }
    for dup in duplicates(&suite.region_names) {
        report.push(
            DuplicateRegionName,
            None,
            format!("region `{dup}` declared more than once"),
        );
    }

    if suite.items.is_empty() {
        report.push(NoItems, None, "suite has no items");
    }
    let mut seen = HashSet::new();
    for item in &suite.items {
        if !seen.insert(item.index) {
            report.push(
                DuplicateItemIndex,
                Some(item.index),
                format!("item index {} repeated", item.index),
            );
        }
    }
    let distinct: BTreeSet<usize> = seen.into_iter().collect();
    if !distinct.is_empty() && !distinct.iter().copied().eq(1..=distinct.len()) {
        report.push(
            NonContiguousItemIndex,
            None,
            format!("item indices {:?} are not 1..={}", distinct, distinct.len()),
        );
    }

    let declared: HashSet<&str> = suite.condition_names.iter().map(String::as_str).collect();
    let region_count = suite.region_count();
    for item in &suite.items {
        let idx = Some(item.index);
        for cond in &declared {
            if !item.sentences.contains_key(*cond) {
                report.push(MissingCondition, idx, format!("condition `{cond}` missing"));
            }
        }
        for (cond, sentence) in &item.sentences {
            if !declared.contains(cond.as_str()) {
                report.push(
                    UnknownCondition,
                    idx,
                    format!("condition `{cond}` is not declared"),
                );
            }
            if sentence.regions.len() != region_count {
                report.push(
                    RegionCountMismatch,
                    idx,
                    format!(
                        "condition `{cond}` has {} regions, expected {region_count}",
                        sentence.regions.len()
                    ),
                );
            }
            if sentence.regions.iter().any(|r| r.contains(['\n', '\r'])) {
                report.push(
                    LineBreakInRegion,
                    idx,
                    format!("condition `{cond}` has a line break in a region"),
                );
            }
            if sentence.regions.iter().all(|r| r.trim().is_empty()) {
                report.push(
                    EmptySentence,
                    idx,
                    format!("condition `{cond}` renders to empty text"),
                );
            }
        }
    }

    for (p, source) in suite.predictions.iter().enumerate() {
        let ast = match prediction::parse_prediction(source) {
            Ok(ast) => ast,
            Err(e) => {
                report.push(
                    UnparseablePrediction,
                    None,
                    format!("prediction {}: {e}", p + 1),
                );
                continue;
            }
        };
        for target in prediction::referenced_targets(&ast) {
            if target.region == 0 || target.region > region_count {
                report.push(
                    DanglingRegionRef,
                    None,
                    format!(
                        "prediction {} references region {} of a {region_count}-region suite",
                        p + 1,
                        target.region
                    ),
                );
            }
            if !declared.contains(target.condition.as_str()) {
                report.push(
                    UnknownConditionRef,
                    None,
                    format!(
                        "prediction {} references undeclared condition `{}`",
                        p + 1,
                        target.condition
                    ),
                );
            }
        }
    }

    report
}

fn duplicates(names: &[String]) -> Vec<&str> {
    let mut seen = HashSet::new();
    let mut dups = Vec::new();
    for n in names {
        if !seen.insert(n.as_str()) && !dups.contains(&n.as_str()) {
            dups.push(n.as_str());
        }
    }
    dups
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("sentence has no non-empty region")]
    EmptySentence,
}

/// Text of a rendered sentence and the half-open character span of each region.
///
/// Offsets count Unicode scalar values, not bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedSentence {
    pub text: String,
    pub spans: Vec<Range<usize>>,
}

/// Joins the non-empty regions with single spaces.
///
/// An empty region gets a zero-length span at the position where the next
/// region's text starts (after the join space), or at the end of the text
/// when no non-empty region follows it.
pub fn render_sentence(sentence: &RegionedSentence) -> Result<RenderedSentence, RenderError> {
    let regions = &sentence.regions;
    if regions.iter().all(String::is_empty) {
        return Err(RenderError::EmptySentence);
    }
    let mut text = String::new();
    let mut cursor = 0usize;
    let mut spans = Vec::with_capacity(regions.len());
    for (i, region) in regions.iter().enumerate() {
        if region.is_empty() {
            let more = regions[i + 1..].iter().any(|r| !r.is_empty());
            let at = if cursor > 0 && more {
                cursor + 1
            } else {
                cursor
            };
            spans.push(at..at);
            continue;
        }
        if cursor > 0 {
            text.push(' ');
            cursor += 1;
        }
        let len = region.chars().count();
        text.push_str(region);
        spans.push(cursor..cursor + len);
        cursor += len;
    }
    Ok(RenderedSentence { text, spans })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc() -> String {
        r#"{
          "name": "mini",
          "circuit": "agreement",
          "language": "es",
          "has_modifier": false,
          "modifier_pair_id": null,
          "region_names": ["subject", "verb"],
          "condition_names": ["match", "mismatch"],
          "predictions": ["(2;match) < (2;mismatch)"],
          "items": [
            {"index": 1, "conditions": {
              "match": {"regions": ["Tú", "cocinas"]},
              "mismatch": {"regions": ["Tú", "cocinan"]}
            }}
          ]
        }"#
        .to_string()
    }

    #[test]
    fn loads_minimal_document() {
        let suite = load_suite(minimal_doc().as_bytes()).unwrap();
        assert_eq!(suite.items.len(), 1);
        assert_eq!(suite.circuit, Circuit::Agreement);
        assert_eq!(suite.condition_names, ["match", "mismatch"]);
        assert!(validate_suite(&suite).is_clean());
    }

    #[test]
    fn missing_circuit_is_missing_field() {
        let doc = minimal_doc().replace(r#""circuit": "agreement","#, "");
        assert_eq!(
            load_suite(doc.as_bytes()),
            Err(LoadError::MissingField {
                field: "circuit".into()
            })
        );
    }

    #[test]
    fn load_error_kinds() {
        assert!(matches!(
            load_suite(b"{\"name\": "),
            Err(LoadError::MalformedDocument { .. })
        ));
        let doc = minimal_doc().replace(r#""has_modifier": false"#, r#""has_modifier": "no""#);
        assert!(matches!(
            load_suite(doc.as_bytes()),
            Err(LoadError::TypeMismatch { .. })
        ));
        let doc = minimal_doc().replace(r#""name": "mini","#, r#""name": "mini", "author": "x","#);
        assert_eq!(
            load_suite(doc.as_bytes()),
            Err(LoadError::UnknownKey {
                key: "author".into()
            })
        );
        let doc = minimal_doc().replace(r#""agreement""#, r#""phonology""#);
        assert!(matches!(
            load_suite(doc.as_bytes()),
            Err(LoadError::InvalidValue { .. })
        ));
    }

    #[test]
    fn load_does_not_validate() {
        let doc = minimal_doc().replace(
            r#""predictions": ["(2;match) < (2;mismatch)"]"#,
            r#""predictions": ["(9;match) <"]"#,
        );
        let suite = load_suite(doc.as_bytes()).unwrap();
        assert_eq!(suite.predictions, ["(9;match) <"]);
    }

    #[test]
    fn render_basic() {
        let r = render_sentence(&RegionedSentence::new(["The girls", "run", "fast."])).unwrap();
        assert_eq!(r.text, "The girls run fast.");
        assert_eq!(r.spans, vec![0..9, 10..13, 14..19]);
    }

    #[test]
    fn render_gap_region() {
        let r = render_sentence(&RegionedSentence::new([
            "Yo sé lo que tu amigo tiró",
            "",
            "al suelo.",
        ]))
        .unwrap();
        assert_eq!(r.text, "Yo sé lo que tu amigo tiró al suelo.");
        assert_eq!(r.spans, vec![0..26, 27..27, 27..36]);
    }

    #[test]
    fn render_leading_and_trailing_gaps() {
        let r = render_sentence(&RegionedSentence::new(["", "Ella miraba", "", ""])).unwrap();
        assert_eq!(r.text, "Ella miraba");
        assert_eq!(r.spans, vec![0..0, 0..11, 11..11, 11..11]);
    }

    #[test]
    fn render_all_empty_fails() {
        assert_eq!(
            render_sentence(&RegionedSentence::new(["", ""])),
            Err(RenderError::EmptySentence)
        );
    }

    #[test]
    fn render_counts_chars_not_bytes() {
        let r = render_sentence(&RegionedSentence::new(["¿Qué", "compró", "Ana?"])).unwrap();
        assert_eq!(r.spans, vec![0..4, 5..11, 12..16]);
    }
}
