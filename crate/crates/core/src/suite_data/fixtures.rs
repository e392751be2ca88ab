//! Small suites with known answers for checking scorers and the engine.

use indexmap::IndexMap;

use super::{ExpansionMode, Forms, LexEntry, ShippedTemplate, SuiteMeta, SuiteTemplate};
use crate::scoring::OracleScorer;
use crate::suite::{render_sentence, Circuit, TestSuite};

/// Compared regions hold the same number of words in both conditions, so a
/// scorer that charges every token alike ties on every prediction.
pub const TIE_FIXTURE: &str = "tie_fixture";

/// Conditions `grammatical` and `ungrammatical` with one prediction each way
/// round; see [`grammaticality_oracle`].
pub const GRAMMATICALITY_FIXTURE: &str = "grammaticality_fixture";

const NOUNS: [(&str, &str); 20] = [
    ("El gato", "gatos"),
    ("El perro", "perros"),
    ("La niña", "niñas"),
    ("El libro", "libros"),
    ("La casa", "casas"),
    ("El coche", "coches"),
    ("La mesa", "mesas"),
    ("El árbol", "árboles"),
    ("La silla", "sillas"),
    ("El barco", "barcos"),
    ("La puerta", "puertas"),
    ("El río", "ríos"),
    ("La flor", "flores"),
    ("El tren", "trenes"),
    ("La carta", "cartas"),
    ("El vaso", "vasos"),
    ("La calle", "calles"),
    ("El plato", "platos"),
    ("La nube", "nubes"),
    ("El pájaro", "pájaros"),
];

fn meta(name: &str, slug: &str) -> SuiteMeta {
    SuiteMeta {
        name: name.into(),
        slug: slug.into(),
        circuit: Circuit::Agreement,
        language: "es".into(),
        has_modifier: false,
        modifier_pair_id: None,
    }
}

fn template(conds: [&str; 2], verbs: [&str; 2], predictions: Vec<String>) -> SuiteTemplate {
    SuiteTemplate {
        conditions: conds.iter().map(|c| c.to_string()).collect(),
        region_names: vec!["subject".into(), "verb".into()],
        frame: vec!["{n}".into(), "{v}.".into()],
        slots: IndexMap::from([
            (
                "n".to_string(),
                NOUNS
                    .iter()
                    .map(|(n, _)| LexEntry::single(Forms::same(*n)))
                    .collect(),
            ),
            (
                "v".to_string(),
                vec![LexEntry::single(Forms::by(&conds, &verbs))],
            ),
        ]),
        mode: ExpansionMode::Cartesian,
        predictions,
        oracle_profile: IndexMap::from([
            (conds[0].to_string(), vec![1.0, 1.0]),
            (conds[1].to_string(), vec![1.0, 2.0]),
        ]),
    }
}

pub fn fixture_templates() -> Vec<ShippedTemplate> {
    vec![
        ShippedTemplate {
            meta: meta("Tie Fixture", TIE_FIXTURE),
            template: template(
                ["good", "bad"],
                ["duerme", "duermen"],
                vec!["(2;good) < (2;bad)".into()],
            ),
        },
        ShippedTemplate {
            meta: meta("Grammaticality Fixture", GRAMMATICALITY_FIXTURE),
            template: template(
                ["grammatical", "ungrammatical"],
                ["corre", "corren"],
                vec![
                    "(2;grammatical) < (2;ungrammatical)".into(),
                    "((1;ungrammatical) + (2;ungrammatical)) > ((1;grammatical) + (2;grammatical))"
                        .into(),
                ],
            ),
        },
    ]
}

/// Charges 1 bit per word in the `grammatical` conditions and 2 bits per
/// word elsewhere; `inverted` swaps the two rates.
pub fn grammaticality_oracle(
    suites: &[TestSuite],
    grammatical: &[&str],
    inverted: bool,
) -> OracleScorer {
    let mut oracle = OracleScorer::new(if inverted {
        "inverted-grammaticality"
    } else {
        "grammaticality"
    });
    for suite in suites {
        for item in &suite.items {
            for (cond, sentence) in &item.sentences {
                let good = grammatical.contains(&cond.as_str()) != inverted;
                let text = render_sentence(sentence)
                    .expect("validated sentences render")
                    .text;
                oracle
                    .insert_uniform(&text, if good { 1.0 } else { 2.0 })
                    .unwrap_or_else(|e| panic!("suite `{}` item {}: {e}", suite.name, item.index));
            }
        }
    }
    oracle
}
