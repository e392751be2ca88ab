//! Prediction formulas over region surprisals.
//!
//! Concrete syntax:
//!
//! ```text
//! formula := disj
//! disj    := conj ("|" conj)*
//! conj    := cmp ("&" cmp)*
//! cmp     := arith ("<" | ">") arith | "(" formula ")"
//! arith   := term (("+" | "-") term)*
//! term    := "(" INT ";" IDENT ")" | NUMBER | "(" arith ")"
//! ```
//!
//! `(2;match)` is the summed surprisal of region 2 in condition `match`.
//! Comparisons are strict and whitespace is insignificant.

mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::{parse_prediction, ParseError};

/// Reference to one region of one condition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Target {
    /// 1-based region index.
    pub region: usize,
    pub condition: String,
}

impl Target {
    pub fn new(region: usize, condition: impl Into<String>) -> Self {
        Self {
            region,
            condition: condition.into(),
        }
    }
}

/// Arithmetic over surprisal values (bits).
#[derive(Debug, Clone, PartialEq)]
pub enum Arith {
    Target(Target),
    Literal(f64),
    Add(Box<Arith>, Box<Arith>),
    Sub(Box<Arith>, Box<Arith>),
}

/// Boolean formula. Comparisons only take arithmetic operands and connectives
/// only take formulas, so every value of this type is well typed.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Less(Arith, Arith),
    Greater(Arith, Arith),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

pub type PredictionAst = Formula;

impl Arith {
    pub fn target(region: usize, condition: &str) -> Self {
        Arith::Target(Target::new(region, condition))
    }

    fn is_compound(&self) -> bool {
        matches!(self, Arith::Add(..) | Arith::Sub(..))
    }

    fn collect_targets(&self, out: &mut BTreeSet<Target>) {
        match self {
            Arith::Target(t) => {
                out.insert(t.clone());
            }
            Arith::Literal(_) => {}
            Arith::Add(a, b) | Arith::Sub(a, b) => {
                a.collect_targets(out);
                b.collect_targets(out);
            }
        }
    }

    fn has_literal(&self) -> bool {
        match self {
            Arith::Target(_) => false,
            Arith::Literal(_) => true,
            Arith::Add(a, b) | Arith::Sub(a, b) => a.has_literal() || b.has_literal(),
        }
    }

    pub fn evaluate(&self, table: &SurprisalTable) -> Result<f64, EvalError> {
        Ok(match self {
            Arith::Target(t) => {
                table
                    .get(&t.condition, t.region)
                    .ok_or_else(|| EvalError::MissingTarget {
                        condition: t.condition.clone(),
                        region: t.region,
                    })?
            }
            Arith::Literal(v) => *v,
            Arith::Add(a, b) => a.evaluate(table)? + b.evaluate(table)?,
            Arith::Sub(a, b) => a.evaluate(table)? - b.evaluate(table)?,
        })
    }
}

impl Formula {
    fn collect_targets(&self, out: &mut BTreeSet<Target>) {
        match self {
            Formula::Less(a, b) | Formula::Greater(a, b) => {
                a.collect_targets(out);
                b.collect_targets(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_targets(out);
                b.collect_targets(out);
            }
        }
    }

    /// True if any numeric literal occurs in the formula.
    pub fn has_literal(&self) -> bool {
        match self {
            Formula::Less(a, b) | Formula::Greater(a, b) => a.has_literal() || b.has_literal(),
            Formula::And(a, b) | Formula::Or(a, b) => a.has_literal() || b.has_literal(),
        }
    }
}

// Display always parenthesizes compound operands, so printing and reparsing
// reproduces the same tree.
impl fmt::Display for Arith {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arith::Target(t) => write!(f, "({};{})", t.region, t.condition),
            Arith::Literal(v) => write!(f, "{v:?}"),
            Arith::Add(a, b) => {
                write_arith_operand(f, a)?;
                f.write_str(" + ")?;
                write_arith_operand(f, b)
            }
            Arith::Sub(a, b) => {
                write_arith_operand(f, a)?;
                f.write_str(" - ")?;
                write_arith_operand(f, b)
            }
        }
    }
}

fn write_arith_operand(f: &mut fmt::Formatter<'_>, a: &Arith) -> fmt::Result {
    if a.is_compound() {
        write!(f, "({a})")
    } else {
        write!(f, "{a}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Less(a, b) => write!(f, "{a} < {b}"),
            Formula::Greater(a, b) => write!(f, "{a} > {b}"),
            Formula::And(a, b) => write!(f, "({a}) & ({b})"),
            Formula::Or(a, b) => write!(f, "({a}) | ({b})"),
        }
    }
}

/// Per-item surprisal values in bits, keyed by condition then 1-based region.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurprisalTable {
    entries: BTreeMap<String, Vec<f64>>,
}

impl SurprisalTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores all region values of one condition, region 1 first.
    pub fn insert_condition(&mut self, condition: impl Into<String>, regions: Vec<f64>) {
        self.entries.insert(condition.into(), regions);
    }

    pub fn get(&self, condition: &str, region: usize) -> Option<f64> {
        let regions = self.entries.get(condition)?;
        region.checked_sub(1).and_then(|r| regions.get(r)).copied()
    }

    pub fn condition(&self, condition: &str) -> Option<&[f64]> {
        self.entries.get(condition).map(Vec::as_slice)
    }

    pub fn conditions(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entries.iter().map(|(c, v)| (c.as_str(), v.as_slice()))
    }

    /// Copy with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(c, v)| (c.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("surprisal table has no entry for region {region} of condition `{condition}`")]
    MissingTarget { condition: String, region: usize },
}

/// Evaluates a formula. Both operands of every connective are evaluated, so a
/// missing target is reported even when the other side already decides the
/// result.
pub fn evaluate_prediction(ast: &Formula, table: &SurprisalTable) -> Result<bool, EvalError> {
    Ok(match ast {
        Formula::Less(a, b) => a.evaluate(table)? < b.evaluate(table)?,
        Formula::Greater(a, b) => a.evaluate(table)? > b.evaluate(table)?,
        Formula::And(a, b) => {
            let l = evaluate_prediction(a, table)?;
            let r = evaluate_prediction(b, table)?;
            l & r
        }
        Formula::Or(a, b) => {
            let l = evaluate_prediction(a, table)?;
            let r = evaluate_prediction(b, table)?;
            l | r
        }
    })
}

pub fn referenced_targets(ast: &Formula) -> BTreeSet<Target> {
    let mut out = BTreeSet::new();
    ast.collect_targets(&mut out);
    out
}
