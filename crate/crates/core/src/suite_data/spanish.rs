//! Templates for the Spanish suites. Anchor sentences come first in
//! every suite.

use indexmap::IndexMap;

use super::{ExpansionMode, Forms, LexEntry, ShippedTemplate, SuiteMeta, SuiteTemplate};
use crate::suite::Circuit;

fn meta(name: &str, slug: &str, circuit: Circuit, pair: Option<(&str, bool)>) -> SuiteMeta {
    SuiteMeta {
        name: name.into(),
        slug: slug.into(),
        circuit,
        language: "es".into(),
        has_modifier: pair.is_some_and(|(_, with)| with),
        modifier_pair_id: pair.map(|(id, _)| id.to_string()),
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn same(s: &str) -> Forms {
    Forms::same(s)
}

fn by(conds: &[&str], forms: &[&str]) -> Forms {
    Forms::by(conds, forms)
}

fn single(f: Forms) -> LexEntry {
    LexEntry::single(f)
}

fn entry(fields: &[(&str, Forms)]) -> LexEntry {
    fields
        .iter()
        .fold(LexEntry::default(), |e, (k, f)| e.with(k, f.clone()))
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Every region costs 1 except the listed (condition, region, cost) cells.
fn profile(
    conds: &[&str],
    regions: usize,
    cells: &[(&str, usize, f64)],
) -> IndexMap<String, Vec<f64>> {
    let mut p: IndexMap<String, Vec<f64>> = conds
        .iter()
        .map(|c| (c.to_string(), vec![1.0; regions]))
        .collect();
    for &(c, r, cost) in cells {
        p[c][r - 1] = cost;
    }
    p
}

struct Layout<'a> {
    conds: &'a [&'a str],
    regions: &'a [&'a str],
    frame: &'a [&'a str],
    slots: Vec<(&'a str, Vec<LexEntry>)>,
    mode: ExpansionMode,
    predictions: Vec<String>,
    profile: IndexMap<String, Vec<f64>>,
}

fn build(meta: SuiteMeta, s: Layout<'_>) -> ShippedTemplate {
    ShippedTemplate {
        meta,
        template: SuiteTemplate {
            conditions: strings(s.conds),
            region_names: strings(s.regions),
            frame: strings(s.frame),
            slots: s
                .slots
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            mode: s.mode,
            predictions: s.predictions,
            oracle_profile: s.profile,
        },
    }
}

fn t(region: usize, cond: &str) -> String {
    format!("({region};{cond})")
}

/// Sum of the given regions of one condition, parenthesized.
fn total(regions: &[usize], cond: &str) -> String {
    let terms: Vec<String> = regions.iter().map(|&r| t(r, cond)).collect();
    format!("({})", terms.join(" + "))
}

fn diff(a: &str, b: &str) -> String {
    format!("({a} - {b})")
}

fn lt(a: &str, b: &str) -> String {
    format!("{a} < {b}")
}

fn gt(a: &str, b: &str) -> String {
    format!("{a} > {b}")
}

/// Full match beats every partial mismatch, and each partial mismatch beats
/// the double mismatch.
fn graded_agreement(region: usize, full: &str, partial: [&str; 2], none: &str) -> Vec<String> {
    vec![
        lt(&t(region, full), &t(region, partial[0])),
        lt(&t(region, full), &t(region, partial[1])),
        lt(&t(region, full), &t(region, none)),
        lt(&t(region, partial[0]), &t(region, none)),
        lt(&t(region, partial[1]), &t(region, none)),
    ]
}

fn graded_profile(conds: &[&str; 4], regions: usize, region: usize) -> IndexMap<String, Vec<f64>> {
    profile(
        conds,
        regions,
        &[
            (conds[0], region, 1.0),
            (conds[1], region, 2.0),
            (conds[2], region, 2.0),
            (conds[3], region, 3.0),
        ],
    )
}

pub fn spanish_templates() -> Vec<ShippedTemplate> {
    vec![
        basic_subject_verb(),
        subject_verb_rc(false),
        subject_verb_rc(true),
        determiner_noun(),
        adjective_noun(),
        attribute(Modifier::None),
        attribute(Modifier::ObjectRc),
        attribute(Modifier::SubjectRc),
        predicative(),
        center_embedding(false),
        center_embedding(true),
        subordination(Modifier::None),
        subordination(Modifier::ObjectRc),
        subordination(Modifier::SubjectRc),
        basic_filler_gap(),
        filler_gap_embeddings(),
        pseudo_cleft(),
        npz(true),
        npz(false),
        npi_polarity(),
        npi_scope(),
        subjunctive_feeling(),
        subjunctive_belief(),
        subject_aux_verb(),
        subject_verb_object(),
        noun_adjective_pp(),
    ]
}

#[derive(Clone, Copy, PartialEq)]
enum Modifier {
    None,
    ObjectRc,
    SubjectRc,
}

// Agreement

fn basic_subject_verb() -> ShippedTemplate {
    const C: [&str; 4] = [
        "match",
        "person_mismatch",
        "number_mismatch",
        "both_mismatch",
    ];
    const ENDINGS: [&str; 6] = ["o", "as", "a", "amos", "áis", "an"];
    let form = |stem: &str, person: usize, plural: bool| {
        format!("{stem}{}", ENDINGS[person - 1 + if plural { 3 } else { 0 }])
    };
    // Person swapped for the person mismatch, and for the double mismatch.
    let other_person = |p: usize| if p == 1 { 2 } else { 1 };
    let far_person = |p: usize| if p == 3 { 1 } else { 3 };
    let subjects = [
        ("Tú", 2, false),
        ("Yo", 1, false),
        ("Ella", 3, false),
        ("Nosotros", 1, true),
        ("Vosotras", 2, true),
        ("Ellos", 3, true),
    ];
    let mut subj = Vec::new();
    let mut verb = Vec::new();
    for stem in ["cocin", "cant", "trabaj", "bail"] {
        for (pronoun, p, pl) in subjects {
            let mut forms = [
                form(stem, p, pl),
                form(stem, other_person(p), pl),
                form(stem, p, !pl),
                form(stem, far_person(p), !pl),
            ];
            if stem == "cocin" && pronoun == "Tú" {
                // Spelled as in the published example.
                forms[2] = "cocinais".into();
            }
            subj.push(single(same(pronoun)));
            verb.push(single(by(&C, &forms.each_ref().map(String::as_str))));
        }
    }
    build(
        meta(
            "Basic Subject-Verb Agreement",
            "basic_subject_verb_agreement",
            Circuit::Agreement,
            Some(("subject_verb_agreement", false)),
        ),
        Layout {
            conds: &C,
            regions: &["subject", "verb"],
            frame: &["{subj}", "{verb}"],
            slots: vec![("subj", subj), ("verb", verb)],
            mode: ExpansionMode::Zipped,
            predictions: graded_agreement(2, C[0], [C[1], C[2]], C[3]),
            profile: graded_profile(&C, 2, 2),
        },
    )
}

fn subject_verb_rc(object_rc: bool) -> ShippedTemplate {
    const C: [&str; 4] = ["sg_match", "sg_mismatch", "pl_match", "pl_mismatch"];
    let subjects = [
        ("El fontanero", "Los fontaneros"),
        ("La enfermera", "Las enfermeras"),
    ];
    // (singular-head form, plural-head form); the embedded noun has the
    // opposite number of the head.
    let rcs: [(&str, &str); 2] = if object_rc {
        [
            ("que los albañiles contrataron", "que el albañil contrató"),
            ("que los pintores conocieron", "que el pintor conoció"),
        ]
    } else {
        [
            ("que ayudó a los albañiles", "que ayudaron al albañil"),
            ("que conoció a los pintores", "que conocieron al pintor"),
        ]
    };
    let verbs = [
        ("trabaja", "trabajan"),
        ("descansa", "descansan"),
        ("madruga", "madrugan"),
        ("viaja", "viajan"),
        ("cocina", "cocinan"),
    ];
    let (name, slug) = if object_rc {
        (
            "Subject-Verb Agreement with Object Relative Clause",
            "subject_verb_agreement_object_rc",
        )
    } else {
        (
            "Subject-Verb Agreement with Subject Relative Clause",
            "subject_verb_agreement_subject_rc",
        )
    };
    build(
        meta(
            name,
            slug,
            Circuit::Agreement,
            Some(("subject_verb_agreement", true)),
        ),
        Layout {
            conds: &C,
            regions: &["subject", "relative_clause", "verb", "continuation"],
            frame: &["{subj}", "{rc}", "{verb}", "los sábados."],
            slots: vec![
                (
                    "subj",
                    subjects
                        .iter()
                        .map(|(s, p)| single(by(&C, &[s, s, p, p])))
                        .collect(),
                ),
                (
                    "rc",
                    rcs.iter()
                        .map(|(s, p)| single(by(&C, &[s, s, p, p])))
                        .collect(),
                ),
                (
                    "verb",
                    verbs
                        .iter()
                        .map(|(s, p)| single(by(&C, &[s, p, p, s])))
                        .collect(),
                ),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: vec![lt(&t(3, C[0]), &t(3, C[1])), lt(&t(3, C[2]), &t(3, C[3]))],
            profile: profile(&C, 4, &[(C[1], 3, 2.0), (C[3], 3, 2.0)]),
        },
    )
}

fn determiner_noun() -> ShippedTemplate {
    const C: [&str; 4] = ["m_sg", "f_sg", "m_pl", "f_pl"];
    let nouns = [
        "gato",
        "perro",
        "libro",
        "coche",
        "árbol",
        "zapato",
        "vaso",
        "plato",
        "barco",
        "camino",
        "jardín",
        "teléfono",
        "espejo",
        "sombrero",
        "cuaderno",
        "reloj",
        "pájaro",
        "caballo",
        "río",
        "tren",
    ];
    build(
        meta(
            "Determiner-Noun Agreement",
            "determiner_noun_agreement",
            Circuit::Agreement,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["determiner", "noun"],
            frame: &["{det}", "{noun}"],
            slots: vec![
                ("det", vec![single(by(&C, &["El", "La", "Los", "Las"]))]),
                ("noun", nouns.iter().map(|n| single(same(n))).collect()),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: graded_agreement(2, C[0], [C[1], C[2]], C[3]),
            profile: graded_profile(&C, 2, 2),
        },
    )
}

#[derive(Clone, Copy)]
struct Features {
    feminine: bool,
    plural: bool,
}

const M_SG: Features = Features {
    feminine: false,
    plural: false,
};
const F_SG: Features = Features {
    feminine: true,
    plural: false,
};
const M_PL: Features = Features {
    feminine: false,
    plural: true,
};
const F_PL: Features = Features {
    feminine: true,
    plural: true,
};

/// Inflects an adjective given in its masculine singular `-o` form.
fn inflect(adj_m_sg: &str, f: Features) -> String {
    let stem = adj_m_sg.strip_suffix('o').expect("adjective ends in -o");
    format!(
        "{stem}{}{}",
        if f.feminine { "a" } else { "o" },
        if f.plural { "s" } else { "" }
    )
}

/// Forms for (match, gender mismatch, number mismatch, double mismatch).
fn agreement_forms(adj: &str, f: Features) -> [String; 4] {
    let flip_g = Features {
        feminine: !f.feminine,
        ..f
    };
    let flip_n = Features {
        plural: !f.plural,
        ..f
    };
    let flip_both = Features {
        feminine: !f.feminine,
        plural: !f.plural,
    };
    [
        inflect(adj, f),
        inflect(adj, flip_g),
        inflect(adj, flip_n),
        inflect(adj, flip_both),
    ]
}

fn adjective_noun() -> ShippedTemplate {
    const C: [&str; 4] = [
        "match",
        "number_mismatch",
        "gender_mismatch",
        "both_mismatch",
    ];
    let contexts = [
        "La tienda vende",
        "El mercado ofrece",
        "Mi vecino colecciona",
        "Juan compró",
    ];
    let nps = [
        ("discos", M_PL, "usado"),
        ("camisas", F_PL, "blanco"),
        ("libros", M_PL, "viejo"),
        ("mesas", F_PL, "barato"),
        ("zapatos", M_PL, "nuevo"),
        ("sillas", F_PL, "antiguo"),
    ];
    let np_entries = nps
        .iter()
        .map(|&(noun, f, adj)| {
            let [m, g, n, b] = agreement_forms(adj, f);
            entry(&[("noun", same(noun)), ("adj", by(&C, &[&m, &n, &g, &b]))])
        })
        .collect();
    build(
        meta(
            "Adjective-Noun Agreement",
            "adjective_noun_agreement",
            Circuit::Agreement,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["context", "noun", "adjective"],
            frame: &["{ctx}", "{np.noun}", "{np.adj}"],
            slots: vec![
                ("ctx", contexts.iter().map(|c| single(same(c))).collect()),
                ("np", np_entries),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: graded_agreement(3, C[0], [C[1], C[2]], C[3]),
            profile: graded_profile(&C, 3, 3),
        },
    )
}

fn attribute(modifier: Modifier) -> ShippedTemplate {
    const C: [&str; 4] = [
        "match",
        "gender_mismatch",
        "number_mismatch",
        "both_mismatch",
    ];
    let subjects = [
        ("El piso", M_SG),
        ("La habitación", F_SG),
        ("Los armarios", M_PL),
        ("Las cajas", F_PL),
        ("El salón", M_SG),
    ];
    let adjectives = ["vacío", "limpio", "sucio", "ordenado"];
    let object_rcs = [
        "que mis padres compraron",
        "que la vecina alquiló",
        "que nosotros pintamos",
        "que el portero vigila",
    ];
    let subject_rcs = [
        ("que tiene vistas al mar", "que tienen vistas al mar"),
        ("que da a la calle", "que dan a la calle"),
        ("que pertenece a mi tía", "que pertenecen a mi tía"),
        ("que huele a pintura", "que huelen a pintura"),
    ];
    let mut items = Vec::new();
    for (subject, f) in subjects {
        for (i, adj) in adjectives.iter().enumerate() {
            let forms = agreement_forms(adj, f);
            let rc = match modifier {
                Modifier::None => "",
                Modifier::ObjectRc => object_rcs[i],
                Modifier::SubjectRc => {
                    if f.plural {
                        subject_rcs[i].1
                    } else {
                        subject_rcs[i].0
                    }
                }
            };
            items.push(entry(&[
                ("subj", same(subject)),
                ("rc", same(rc)),
                ("cop", same(if f.plural { "están" } else { "está" })),
                ("adj", by(&C, &forms.each_ref().map(String::as_str))),
            ]));
        }
    }
    let (name, slug, regions, frame): (&str, &str, &[&str], &[&str]) = match modifier {
        Modifier::None => (
            "Attribute Agreement",
            "attribute_agreement",
            &["subject", "copula", "attribute"],
            &["{i.subj}", "{i.cop}", "{i.adj}"],
        ),
        Modifier::ObjectRc => (
            "Attribute Agreement with Object Relative Clause",
            "attribute_agreement_object_rc",
            &["subject", "relative_clause", "copula", "attribute"],
            &["{i.subj}", "{i.rc}", "{i.cop}", "{i.adj}"],
        ),
        Modifier::SubjectRc => (
            "Attribute Agreement with Subject Relative Clause",
            "attribute_agreement_subject_rc",
            &["subject", "relative_clause", "copula", "attribute"],
            &["{i.subj}", "{i.rc}", "{i.cop}", "{i.adj}"],
        ),
    };
    let target = regions.len();
    build(
        meta(
            name,
            slug,
            Circuit::Agreement,
            Some(("attribute_agreement", modifier != Modifier::None)),
        ),
        Layout {
            conds: &C,
            regions,
            frame,
            slots: vec![("i", items)],
            mode: ExpansionMode::Zipped,
            predictions: graded_agreement(target, C[0], [C[1], C[2]], C[3]),
            profile: graded_profile(&C, target, target),
        },
    )
}

fn predicative() -> ShippedTemplate {
    const C: [&str; 4] = [
        "match",
        "number_mismatch",
        "gender_mismatch",
        "both_mismatch",
    ];
    let subjects = [
        ("Los niños", M_PL),
        ("La abuela", F_SG),
        ("Las alumnas", F_PL),
        ("El médico", M_SG),
        ("Los soldados", M_PL),
    ];
    let predicates = [
        ("llegó", "llegaron", "cansado"),
        ("volvió", "volvieron", "contento"),
        ("salió", "salieron", "preocupado"),
        ("regresó", "regresaron", "mojado"),
    ];
    let mut items = Vec::new();
    for (subject, f) in subjects {
        for (sg, pl, adj) in predicates {
            let [m, g, n, b] = agreement_forms(adj, f);
            items.push(entry(&[
                ("subj", same(subject)),
                ("verb", same(if f.plural { pl } else { sg })),
                ("adj", by(&C, &[&m, &n, &g, &b])),
            ]));
        }
    }
    build(
        meta(
            "Predicative Agreement",
            "predicative_agreement",
            Circuit::Agreement,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["subject", "verb", "predicative"],
            frame: &["{i.subj}", "{i.verb}", "{i.adj}"],
            slots: vec![("i", items)],
            mode: ExpansionMode::Zipped,
            predictions: graded_agreement(3, C[0], [C[1], C[2]], C[3]),
            profile: graded_profile(&C, 3, 3),
        },
    )
}

// Center embedding

fn center_embedding(with_pp: bool) -> ShippedTemplate {
    const C: [&str; 2] = ["plausible", "implausible"];
    // (head, embedded subject, PP modifier, embedded verb, matrix verb)
    let items = [
        ("La tormenta", "el capitán", "del barco", "capeó", "amainó"),
        ("La carta", "mi abuela", "de Sevilla", "escribió", "llegó"),
        (
            "El jarrón",
            "el niño",
            "del vecino",
            "rompió",
            "desapareció",
        ),
        (
            "El pastel",
            "la cocinera",
            "del hotel",
            "preparó",
            "se enfrió",
        ),
        (
            "La vela",
            "el monaguillo",
            "de la iglesia",
            "encendió",
            "se apagó",
        ),
        ("El globo", "la niña", "de las trenzas", "infló", "explotó"),
        (
            "El barco",
            "el almirante",
            "de la flota",
            "dirigía",
            "zarpó",
        ),
        ("La planta", "la vecina", "del quinto", "regó", "floreció"),
        ("El árbol", "el jardinero", "del parque", "plantó", "creció"),
        (
            "La película",
            "el director",
            "de la productora",
            "rodó",
            "triunfó",
        ),
        (
            "El avión",
            "el piloto",
            "de la compañía",
            "pilotaba",
            "despegó",
        ),
        (
            "La noticia",
            "el periodista",
            "del diario",
            "publicó",
            "circuló",
        ),
        (
            "El tren",
            "el maquinista",
            "de guardia",
            "conducía",
            "descarriló",
        ),
        (
            "La fruta",
            "el vendedor",
            "del mercado",
            "ofreció",
            "se pudrió",
        ),
        (
            "El hielo",
            "el camarero",
            "del bar",
            "sirvió",
            "se derritió",
        ),
        (
            "La canción",
            "la cantante",
            "de la banda",
            "interpretó",
            "gustó",
        ),
        (
            "El incendio",
            "el bombero",
            "del cuartel",
            "combatió",
            "se extendió",
        ),
        (
            "La puerta",
            "el conserje",
            "del edificio",
            "cerró",
            "chirrió",
        ),
        ("El coche", "el mecánico", "del taller", "reparó", "arrancó"),
        (
            "La sopa",
            "el cocinero",
            "del restaurante",
            "calentó",
            "hirvió",
        ),
        ("El perro", "el cazador", "del pueblo", "entrenó", "ladró"),
        ("La empresa", "el banquero", "de Madrid", "fundó", "quebró"),
    ];
    let entries = items
        .iter()
        .map(|&(head, subj, pp, emb, matrix)| {
            entry(&[
                ("head", same(head)),
                ("subj", same(subj)),
                ("pp", same(pp)),
                ("v1", by(&C, &[emb, matrix])),
                ("v2", by(&C, &[matrix, emb])),
            ])
        })
        .collect();
    let (name, slug, regions, frame, verbs): (&str, &str, &[&str], &[&str], [usize; 2]) = if with_pp
    {
        (
            "Center Embedding with PP Modifier",
            "center_embedding_pp_modifier",
            &[
                "matrix_subject",
                "embedded_subject",
                "modifier",
                "first_verb",
                "second_verb",
            ],
            &["{i.head}", "que {i.subj}", "{i.pp}", "{i.v1}", "{i.v2}."],
            [4, 5],
        )
    } else {
        (
            "Center Embedding",
            "center_embedding",
            &[
                "matrix_subject",
                "embedded_subject",
                "first_verb",
                "second_verb",
            ],
            &["{i.head}", "que {i.subj}", "{i.v1}", "{i.v2}."],
            [3, 4],
        )
    };
    build(
        meta(
            name,
            slug,
            Circuit::CenterEmbedding,
            Some(("center_embedding", with_pp)),
        ),
        Layout {
            conds: &C,
            regions,
            frame,
            slots: vec![("i", entries)],
            mode: ExpansionMode::Zipped,
            predictions: vec![lt(&total(&verbs, C[0]), &total(&verbs, C[1]))],
            profile: profile(
                &C,
                regions.len(),
                &[(C[1], verbs[0], 2.0), (C[1], verbs[1], 2.0)],
            ),
        },
    )
}

// Gross syntactic state

fn subordination(modifier: Modifier) -> ShippedTemplate {
    const C: [&str; 4] = [
        "sub_matrix",
        "nosub_matrix",
        "sub_nomatrix",
        "nosub_nomatrix",
    ];
    let subordinators = ["Mientras", "Cuando", "Aunque", "Como"];
    // (clause without its last word, last word, object RC split before its
    // last word, subject RC split likewise, matrix clause)
    let clauses = [
        (
            "ella miraba los",
            "resultados",
            ("que la enfermera había", "traído"),
            ("que acababan de", "llegar"),
            "el doctor entró en la habitación.",
        ),
        (
            "el niño dormía en el",
            "sofá",
            ("que su abuelo había", "comprado"),
            ("que estaba junto a la", "ventana"),
            "sus padres cenaban en la cocina.",
        ),
        (
            "los turistas paseaban por la",
            "playa",
            ("que el guía les había", "recomendado"),
            ("que estaba cerca del", "hotel"),
            "empezó a llover.",
        ),
        (
            "mi hermano leía el",
            "periódico",
            ("que su vecino le había", "prestado"),
            ("que hablaba de la", "crisis"),
            "el teléfono sonó dos veces.",
        ),
        (
            "la profesora corregía los",
            "exámenes",
            ("que los alumnos habían", "entregado"),
            ("que tenían muchas", "faltas"),
            "los alumnos esperaban en silencio.",
        ),
    ];
    let clause_entries = clauses
        .iter()
        .map(|&(start, last, orc, src, matrix)| {
            let (body, rc, end) = match modifier {
                Modifier::None => (start.to_string(), "", last),
                Modifier::ObjectRc => (format!("{start} {last}"), orc.0, orc.1),
                Modifier::SubjectRc => (format!("{start} {last}"), src.0, src.1),
            };
            let cap = capitalize(&body);
            entry(&[
                ("body", by(&C, &[&body, &cap, &body, &cap])),
                ("rc", same(rc)),
                (
                    "end",
                    by(
                        &C,
                        &[
                            &format!("{end},"),
                            &format!("{end},"),
                            &format!("{end}."),
                            &format!("{end}."),
                        ],
                    ),
                ),
                ("matrix", by(&C, &[matrix, matrix, "", ""])),
            ])
        })
        .collect();
    let sub_entries = subordinators
        .iter()
        .map(|s| single(by(&C, &[s, "", s, ""])))
        .collect();
    let (name, slug, regions, frame): (&str, &str, &[&str], &[&str]) = match modifier {
        Modifier::None => (
            "Subordination",
            "subordination",
            &[
                "subordinator",
                "subordinate_clause",
                "clause_end",
                "matrix_clause",
            ],
            &["{sub}", "{c.body}", "{c.end}", "{c.matrix}"],
        ),
        Modifier::ObjectRc => (
            "Subordination with Object Relative Clause",
            "subordination_object_rc",
            &[
                "subordinator",
                "subordinate_clause",
                "modifier",
                "clause_end",
                "matrix_clause",
            ],
            &["{sub}", "{c.body}", "{c.rc}", "{c.end}", "{c.matrix}"],
        ),
        Modifier::SubjectRc => (
            "Subordination with Subject Relative Clause",
            "subordination_subject_rc",
            &[
                "subordinator",
                "subordinate_clause",
                "modifier",
                "clause_end",
                "matrix_clause",
            ],
            &["{sub}", "{c.body}", "{c.rc}", "{c.end}", "{c.matrix}"],
        ),
    };
    let end = regions.len() - 1;
    let matrix = regions.len();
    build(
        meta(
            name,
            slug,
            Circuit::GrossSyntacticState,
            Some(("subordination", modifier != Modifier::None)),
        ),
        Layout {
            conds: &C,
            regions,
            frame,
            slots: vec![("sub", sub_entries), ("c", clause_entries)],
            mode: ExpansionMode::Cartesian,
            predictions: vec![
                gt(&t(end, C[2]), &t(end, C[3])),
                lt(&t(matrix, C[0]), &t(matrix, C[1])),
            ],
            profile: profile(&C, regions.len(), &[(C[2], end, 2.0), (C[1], matrix, 2.0)]),
        },
    )
}

// Long-distance dependencies

const FG: [&str; 4] = [
    "filler_gap",
    "nofiller_gap",
    "filler_nogap",
    "nofiller_nogap",
];

fn filler_gap_events() -> Vec<LexEntry> {
    [
        ("tu amigo tiró", "una colilla", "al suelo."),
        ("el vecino dejó", "una maleta", "en el portal."),
        ("la niña escondió", "un regalo", "debajo de la cama."),
        ("el camarero puso", "una botella", "sobre la mesa."),
        ("mi hermana guardó", "el dinero", "en el cajón."),
    ]
    .iter()
    .map(|&(clause, obj, rest)| {
        entry(&[
            ("clause", same(clause)),
            ("obj", by(&FG, &["", "", obj, obj])),
            ("rest", same(rest)),
        ])
    })
    .collect()
}

fn filler_gap_matrix(m: &str) -> LexEntry {
    entry(&[
        ("", same(m)),
        ("comp", by(&FG, &["lo que", "que", "lo que", "que"])),
    ])
}

fn filler_gap_predictions(object: usize) -> Vec<String> {
    vec![
        gt(&t(object, FG[2]), &t(object, FG[3])),
        lt(&t(object + 1, FG[0]), &t(object + 1, FG[1])),
    ]
}

fn filler_gap_profile(regions: usize, object: usize) -> IndexMap<String, Vec<f64>> {
    profile(
        &FG,
        regions,
        &[(FG[2], object, 2.0), (FG[1], object + 1, 2.0)],
    )
}

fn basic_filler_gap() -> ShippedTemplate {
    let matrices = ["Yo sé", "Ella recuerda", "Todos vimos", "Mi padre sabe"];
    build(
        meta(
            "Basic Filler-Gap Dependencies",
            "basic_filler_gap",
            Circuit::LongDistanceDependencies,
            Some(("filler_gap", false)),
        ),
        Layout {
            conds: &FG,
            regions: &[
                "matrix",
                "complementizer",
                "embedded_clause",
                "object",
                "continuation",
            ],
            frame: &["{m}", "{m.comp}", "{e.clause}", "{e.obj}", "{e.rest}"],
            slots: vec![
                ("m", matrices.iter().map(|m| filler_gap_matrix(m)).collect()),
                ("e", filler_gap_events()),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: filler_gap_predictions(4),
            profile: filler_gap_profile(5, 4),
        },
    )
}

fn filler_gap_embeddings() -> ShippedTemplate {
    let chains = [
        "mi madre dijo que tu padre pensaba que el vecino creía que",
        "el policía contó que la portera sospechaba que el alcalde aseguraba que",
        "todos dicen que el periódico publicó que la jueza afirmó que",
        "Ana me contó que su primo oyó que el profesor explicó que",
    ];
    build(
        meta(
            "Filler-Gap Dependencies with Three Sentential Embeddings",
            "filler_gap_three_embeddings",
            Circuit::LongDistanceDependencies,
            Some(("filler_gap", true)),
        ),
        Layout {
            conds: &FG,
            regions: &[
                "matrix",
                "complementizer",
                "embeddings",
                "embedded_clause",
                "object",
                "continuation",
            ],
            frame: &[
                "{m}",
                "{m.comp}",
                "{chain}",
                "{e.clause}",
                "{e.obj}",
                "{e.rest}",
            ],
            slots: vec![
                ("m", vec![filler_gap_matrix("Yo sé")]),
                ("chain", chains.iter().map(|c| single(same(c))).collect()),
                ("e", filler_gap_events()),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: filler_gap_predictions(5),
            profile: filler_gap_profile(6, 5),
        },
    )
}

fn pseudo_cleft() -> ShippedTemplate {
    const C: [&str; 4] = ["heavy_np", "light_np", "heavy_vp", "light_vp"];
    let subjects = ["tú", "ella", "nosotros", "ellos"];
    let light = ["hiciste", "hizo", "hicimos", "hicieron"];
    let verbs: [([&str; 4], &str, &str); 5] = [
        (
            ["difundiste", "difundió", "difundimos", "difundieron"],
            "un rumor",
            "confirmar",
        ),
        (
            ["pintaste", "pintó", "pintamos", "pintaron"],
            "un cuadro",
            "vender",
        ),
        (
            ["escribiste", "escribió", "escribimos", "escribieron"],
            "una carta",
            "enviar",
        ),
        (
            ["cocinaste", "cocinó", "cocinamos", "cocinaron"],
            "una tarta",
            "decorar",
        ),
        (
            ["leíste", "leyó", "leímos", "leyeron"],
            "una novela",
            "resumir",
        ),
    ];
    let mut items = Vec::new();
    for (heavy, np, vp_verb) in verbs {
        for (i, subject) in subjects.iter().enumerate() {
            let vp = format!("{vp_verb} {np}.");
            let np = format!("{np}.");
            items.push(entry(&[
                ("subj", same(subject)),
                ("verb", by(&C, &[heavy[i], light[i], heavy[i], light[i]])),
                ("ext", by(&C, &[&np, &np, &vp, &vp])),
            ]));
        }
    }
    build(
        meta(
            "Pseudo-Cleft Structures",
            "pseudo_cleft",
            Circuit::LongDistanceDependencies,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["wh_subject", "verb", "copula", "extracted"],
            frame: &["Lo que {i.subj}", "{i.verb}", "fue", "{i.ext}"],
            slots: vec![("i", items)],
            mode: ExpansionMode::Zipped,
            predictions: vec![
                lt(&t(4, C[3]), &t(4, C[2])),
                gt(&t(4, C[1]), &t(4, C[0])),
                gt(
                    &diff(&t(4, C[2]), &t(4, C[3])),
                    &diff(&t(4, C[1]), &t(4, C[0])),
                ),
            ],
            profile: profile(
                &C,
                4,
                &[
                    (C[0], 4, 1.0),
                    (C[1], 4, 2.0),
                    (C[2], 4, 5.0),
                    (C[3], 4, 1.0),
                ],
            ),
        },
    )
}

// Garden path effects

fn npz(overt_object: bool) -> ShippedTemplate {
    // (subject, optionally transitive verb, object, intransitive verb,
    //  ambiguous NP, main verb, continuation)
    let items = [
        (
            "ella",
            "leía",
            "un libro",
            "dormía",
            "sus manuscritos",
            "se volaron",
            "por la ventana.",
        ),
        (
            "el perro",
            "comía",
            "su pienso",
            "ladraba",
            "la carne",
            "se cayó",
            "al suelo.",
        ),
        (
            "mi madre",
            "cosía",
            "un botón",
            "descansaba",
            "el vestido",
            "se manchó",
            "de tinta.",
        ),
        (
            "los niños",
            "pintaban",
            "un dibujo",
            "jugaban",
            "la pared",
            "se agrietó",
            "por el calor.",
        ),
        (
            "el cazador",
            "disparaba",
            "la escopeta",
            "bostezaba",
            "los pájaros",
            "huyeron",
            "hacia el bosque.",
        ),
        (
            "Juan",
            "conducía",
            "un camión",
            "tosía",
            "el coche",
            "se averió",
            "en la autopista.",
        ),
        (
            "la cocinera",
            "removía",
            "la salsa",
            "sonreía",
            "el guiso",
            "se quemó",
            "en el fuego.",
        ),
        (
            "el pintor",
            "limpiaba",
            "los pinceles",
            "silbaba",
            "el suelo",
            "se mojó",
            "por completo.",
        ),
        (
            "el alumno",
            "escribía",
            "una carta",
            "bostezaba",
            "el examen",
            "terminó",
            "de repente.",
        ),
        (
            "el profesor",
            "explicaba",
            "la lección",
            "tosía",
            "el problema",
            "se complicó",
            "mucho.",
        ),
        (
            "el jardinero",
            "regaba",
            "las flores",
            "descansaba",
            "el césped",
            "se secó",
            "con el sol.",
        ),
        (
            "mi abuelo",
            "fumaba",
            "su pipa",
            "dormía",
            "el cigarro",
            "se apagó",
            "solo.",
        ),
        (
            "la orquesta",
            "tocaba",
            "una sinfonía",
            "descansaba",
            "el piano",
            "se desafinó",
            "un poco.",
        ),
        (
            "el ladrón",
            "vigilaba",
            "la calle",
            "temblaba",
            "el banco",
            "cerró",
            "sus puertas.",
        ),
        (
            "los vecinos",
            "cantaban",
            "una canción",
            "paseaban",
            "el himno",
            "sonó",
            "por los altavoces.",
        ),
        (
            "Ana",
            "estudiaba",
            "la gramática",
            "bostezaba",
            "el libro",
            "se cayó",
            "de la mesa.",
        ),
        (
            "el camarero",
            "servía",
            "el vino",
            "sonreía",
            "la cerveza",
            "se derramó",
            "sobre la barra.",
        ),
        (
            "el mecánico",
            "arreglaba",
            "la moto",
            "silbaba",
            "el motor",
            "explotó",
            "de repente.",
        ),
        (
            "el escritor",
            "revisaba",
            "sus notas",
            "dormía",
            "la novela",
            "se publicó",
            "en Francia.",
        ),
        (
            "la niña",
            "dibujaba",
            "un caballo",
            "lloraba",
            "el papel",
            "se rompió",
            "por la mitad.",
        ),
    ];
    let conds: [&str; 4] = if overt_object {
        [
            "no_obj_no_comma",
            "no_obj_comma",
            "obj_no_comma",
            "obj_comma",
        ]
    } else {
        [
            "trans_no_comma",
            "trans_comma",
            "intrans_no_comma",
            "intrans_comma",
        ]
    };
    let entries = items
        .iter()
        .map(|&(subj, verb, obj, intrans, np, main, rest)| {
            let other = if overt_object {
                format!("{verb} {obj}")
            } else {
                intrans.to_string()
            };
            entry(&[
                ("subj", same(subj)),
                (
                    "verb",
                    by(
                        &conds,
                        &[verb, &format!("{verb},"), &other, &format!("{other},")],
                    ),
                ),
                ("np", same(np)),
                ("main", same(main)),
                ("rest", same(rest)),
            ])
        })
        .collect();
    let (name, slug) = if overt_object {
        ("NP/Z Garden Path Effect (Overt Object)", "npz_overt_object")
    } else {
        (
            "NP/Z Garden Path Effect (Intransitive Verb)",
            "npz_intransitive_verb",
        )
    };
    let c = conds;
    build(
        meta(name, slug, Circuit::GardenPathEffects, None),
        Layout {
            conds: &conds,
            regions: &[
                "subordinate_subject",
                "subordinate_verb",
                "noun_phrase",
                "main_verb",
                "continuation",
            ],
            frame: &[
                "Mientras {i.subj}",
                "{i.verb}",
                "{i.np}",
                "{i.main}",
                "{i.rest}",
            ],
            slots: vec![("i", entries)],
            mode: ExpansionMode::Zipped,
            predictions: vec![
                gt(&t(4, c[0]), &t(4, c[1])),
                gt(&t(4, c[0]), &t(4, c[2])),
                gt(
                    &diff(&t(4, c[0]), &t(4, c[1])),
                    &diff(&t(4, c[2]), &t(4, c[3])),
                ),
            ],
            profile: profile(
                &c,
                5,
                &[
                    (c[0], 4, 5.0),
                    (c[1], 4, 1.0),
                    (c[2], 4, 2.0),
                    (c[3], 4, 1.5),
                ],
            ),
        },
    )
}

// Licensing

fn npi_polarity() -> ShippedTemplate {
    const C: [&str; 4] = ["neg_npi", "neg_ppi", "pos_npi", "pos_ppi"];
    let subjects = [
        ("Yo", "bebo"),
        ("Tú", "comes"),
        ("Ella", "canta"),
        ("Nosotros", "compramos"),
        ("Ellos", "leen"),
    ];
    let items = [
        ("nunca", "siempre"),
        ("nada", "algo"),
        ("jamás", "a menudo"),
        ("tampoco", "también"),
    ];
    build(
        meta(
            "Negative Polarity Items and Polarity Agreement",
            "npi_polarity_agreement",
            Circuit::Licensing,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["subject", "negation", "verb", "polarity_item"],
            frame: &["{s}", "{p.neg}", "{s.verb}", "{p.item}."],
            slots: vec![
                (
                    "s",
                    subjects
                        .iter()
                        .map(|(s, v)| entry(&[("", same(s)), ("verb", same(v))]))
                        .collect(),
                ),
                (
                    "p",
                    items
                        .iter()
                        .map(|(npi, ppi)| {
                            entry(&[
                                ("neg", by(&C, &["no", "no", "", ""])),
                                ("item", by(&C, &[npi, ppi, npi, ppi])),
                            ])
                        })
                        .collect(),
                ),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: vec![
                lt(&t(4, C[0]), &t(4, C[1])),
                lt(&t(4, C[0]), &t(4, C[2])),
                lt(&t(4, C[3]), &t(4, C[1])),
                lt(&t(4, C[3]), &t(4, C[2])),
            ],
            profile: profile(&C, 4, &[(C[1], 4, 2.0), (C[2], 4, 3.0)]),
        },
    )
}

fn npi_scope() -> ShippedTemplate {
    const C: [&str; 4] = [
        "sub_neg_matrix_neg",
        "sub_neg_matrix_pos",
        "sub_pos_matrix_neg",
        "sub_pos_matrix_pos",
    ];
    let subjects = ["Tú", "Ella", "Nosotros", "Ellos"];
    let aux = ["has", "ha", "hemos", "han"];
    let clauses: [([&str; 4], &str, &str); 5] = [
        (
            [
                "mirabas por la ventana",
                "miraba por la ventana",
                "mirábamos por la ventana",
                "miraban por la ventana",
            ],
            "visto",
            "a nadie.",
        ),
        (
            [
                "estabas atento",
                "estaba atenta",
                "estábamos atentos",
                "estaban atentos",
            ],
            "oído",
            "nada.",
        ),
        (
            [
                "salías de casa",
                "salía de casa",
                "salíamos de casa",
                "salían de casa",
            ],
            "comprado",
            "nada.",
        ),
        (
            [
                "tenías tiempo",
                "tenía tiempo",
                "teníamos tiempo",
                "tenían tiempo",
            ],
            "llamado",
            "a nadie.",
        ),
        (
            [
                "fuiste a la fiesta",
                "fue a la fiesta",
                "fuimos a la fiesta",
                "fueron a la fiesta",
            ],
            "conocido",
            "a nadie.",
        ),
    ];
    let mut items = Vec::new();
    for (forms, participle, npi) in clauses {
        for (i, subject) in subjects.iter().enumerate() {
            items.push(entry(&[
                ("subj", same(&format!("{subject},"))),
                ("sneg", by(&C, &["no", "no", "", ""])),
                ("clause", same(&format!("{},", forms[i]))),
                ("mneg", by(&C, &["no", "", "no", ""])),
                ("verb", same(&format!("{} {participle}", aux[i]))),
                ("npi", same(npi)),
            ]));
        }
    }
    let mut predictions = Vec::new();
    for unlicensed in [C[1], C[3]] {
        for licensed in [C[0], C[2]] {
            predictions.push(gt(&t(7, unlicensed), &t(7, licensed)));
        }
    }
    build(
        meta(
            "Negative Polarity Items",
            "npi_scope",
            Circuit::Licensing,
            None,
        ),
        Layout {
            conds: &C,
            regions: &[
                "subject",
                "subordinator",
                "subordinate_negation",
                "subordinate_clause",
                "matrix_negation",
                "matrix_verb",
                "npi",
            ],
            frame: &[
                "{i.subj}",
                "como",
                "{i.sneg}",
                "{i.clause}",
                "{i.mneg}",
                "{i.verb}",
                "{i.npi}",
            ],
            slots: vec![("i", items)],
            mode: ExpansionMode::Zipped,
            predictions,
            profile: profile(&C, 7, &[(C[1], 7, 2.0), (C[3], 7, 2.0)]),
        },
    )
}

/// (subordinate subject, subjunctive, indicative); verbs carry the rest of
/// the clause.
const MOOD_CLAUSES: [(&str, &str, &str); 4] = [
    ("mañana", "llueva.", "lloverá."),
    ("el equipo", "gane el partido.", "ganará el partido."),
    ("mi hermano", "venga a la cena.", "vendrá a la cena."),
    ("los precios", "bajen pronto.", "bajarán pronto."),
];

fn subjunctive_feeling() -> ShippedTemplate {
    const C: [&str; 4] = [
        "feeling_subj",
        "feeling_ind",
        "nonfeeling_subj",
        "nonfeeling_ind",
    ];
    let verbs = [
        ("Espero", "Sé"),
        ("Quiero", "Dicen"),
        ("Deseo", "Afirmo"),
        ("Prefiero", "Confirmo"),
        ("Necesito", "Anuncio"),
    ];
    build(
        meta(
            "Subjunctive Mood and Verbs that Express Feeling",
            "subjunctive_feeling_verbs",
            Circuit::Licensing,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["main_verb", "subordinate_subject", "subordinate_verb"],
            frame: &["{v}", "que {c.subj}", "{c.verb}"],
            slots: vec![
                (
                    "v",
                    verbs
                        .iter()
                        .map(|(f, n)| single(by(&C, &[f, f, n, n])))
                        .collect(),
                ),
                (
                    "c",
                    MOOD_CLAUSES
                        .iter()
                        .map(|(s, subj, ind)| {
                            entry(&[("subj", same(s)), ("verb", by(&C, &[subj, ind, subj, ind]))])
                        })
                        .collect(),
                ),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: vec![
                lt(&t(3, C[0]), &t(3, C[1])),
                gt(&t(3, C[2]), &t(3, C[3])),
                gt(&t(3, C[0]), &t(3, C[2])),
            ],
            profile: profile(
                &C,
                3,
                &[
                    (C[3], 3, 1.0),
                    (C[2], 3, 2.0),
                    (C[0], 3, 3.0),
                    (C[1], 3, 4.0),
                ],
            ),
        },
    )
}

fn subjunctive_belief() -> ShippedTemplate {
    const C: [&str; 4] = [
        "main_neg_subj",
        "main_neg_ind",
        "sub_neg_subj",
        "sub_neg_ind",
    ];
    let verbs = ["creo", "pienso", "parece", "es cierto", "es verdad"];
    build(
        meta(
            "Subjunctive Mood, Negation and Belief Verbs",
            "subjunctive_negation_belief",
            Circuit::Licensing,
            None,
        ),
        Layout {
            conds: &C,
            regions: &[
                "main_negation",
                "main_verb",
                "subordinate_subject",
                "subordinate_negation",
                "subordinate_verb",
            ],
            frame: &["{v.neg}", "{v}", "que {c.subj}", "{c.neg}", "{c.verb}"],
            slots: vec![
                (
                    "v",
                    verbs
                        .iter()
                        .map(|v| {
                            let cap = capitalize(v);
                            entry(&[
                                ("neg", by(&C, &["No", "No", "", ""])),
                                ("", by(&C, &[v, v, &cap, &cap])),
                            ])
                        })
                        .collect(),
                ),
                (
                    "c",
                    MOOD_CLAUSES
                        .iter()
                        .map(|(s, subj, ind)| {
                            entry(&[
                                ("subj", same(s)),
                                ("neg", by(&C, &["", "", "no", "no"])),
                                ("verb", by(&C, &[subj, ind, subj, ind])),
                            ])
                        })
                        .collect(),
                ),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: vec![
                lt(&t(5, C[0]), &t(5, C[1])),
                gt(&t(5, C[2]), &t(5, C[3])),
                lt(&t(5, C[0]), &t(5, C[2])),
            ],
            profile: profile(
                &C,
                5,
                &[
                    (C[0], 5, 1.0),
                    (C[1], 5, 3.0),
                    (C[2], 5, 4.0),
                    (C[3], 5, 2.0),
                ],
            ),
        },
    )
}

// Linearization

fn subject_aux_verb() -> ShippedTemplate {
    const C: [&str; 4] = ["s_aux_v", "aux_v_s", "s_v_aux", "aux_s_v"];
    let names = ["Juan", "María", "Pedro", "Lucía", "Carmen"];
    let participles = ["comido", "llegado", "salido", "dormido"];
    let mut items = Vec::new();
    for s in names {
        for p in participles {
            let (sp, pp) = (format!("{s}."), format!("{p}."));
            items.push(entry(&[
                ("a", by(&C, &[s, "Ha", s, "Ha"])),
                ("b", by(&C, &["ha", p, p, s])),
                ("c", by(&C, &[&pp, &sp, "ha.", &pp])),
            ]));
        }
    }
    let all = [1, 2, 3];
    let tot = |c: &str| total(&all, c);
    let postposed = diff(&tot(C[1]), &tot(C[0]));
    build(
        meta(
            "Subject-Auxiliary Verb-Main Verb Linearization",
            "subject_aux_verb_linearization",
            Circuit::Linearization,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["first", "second", "third"],
            frame: &["{i.a}", "{i.b}", "{i.c}"],
            slots: vec![("i", items)],
            mode: ExpansionMode::Zipped,
            predictions: vec![
                lt(&tot(C[1]), &tot(C[2])),
                lt(&tot(C[1]), &tot(C[3])),
                lt(&tot(C[0]), &tot(C[1])),
                lt(&postposed, &diff(&tot(C[2]), &tot(C[1]))),
                lt(&postposed, &diff(&tot(C[3]), &tot(C[1]))),
            ],
            profile: IndexMap::from([
                (C[0].to_string(), vec![1.0, 1.0, 1.0]),
                (C[1].to_string(), vec![1.0, 1.0, 2.0]),
                (C[2].to_string(), vec![2.0, 3.0, 3.0]),
                (C[3].to_string(), vec![3.0, 3.0, 3.0]),
            ]),
        },
    )
}

fn subject_verb_object() -> ShippedTemplate {
    const C: [&str; 4] = ["decl_sv", "decl_vs", "int_vs", "int_sv"];
    let names = ["Ana", "Pedro", "Lucía", "Jorge"];
    let predicates = [
        ("compró", "un libro"),
        ("leyó", "una novela"),
        ("pintó", "un cuadro"),
        ("escribió", "una carta"),
        ("vendió", "su coche"),
    ];
    let mut items = Vec::new();
    for s in names {
        for (v, o) in predicates {
            let cap_v = capitalize(v);
            items.push(entry(&[
                ("a", by(&C, &[s, &cap_v, "¿Qué", "¿Qué"])),
                ("b", by(&C, &[v, o, v, s])),
                (
                    "c",
                    by(
                        &C,
                        &[
                            &format!("{o}."),
                            &format!("{s}."),
                            &format!("{s}?"),
                            &format!("{v}?"),
                        ],
                    ),
                ),
            ]));
        }
    }
    let all = [1, 2, 3];
    let tot = |c: &str| total(&all, c);
    build(
        meta(
            "Subject-Verb-Object Linearization",
            "subject_verb_object_linearization",
            Circuit::Linearization,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["first", "second", "third"],
            frame: &["{i.a}", "{i.b}", "{i.c}"],
            slots: vec![("i", items)],
            mode: ExpansionMode::Zipped,
            predictions: vec![
                lt(&tot(C[1]), &tot(C[3])),
                lt(&tot(C[0]), &tot(C[1])),
                lt(&diff(&tot(C[1]), &tot(C[0])), &diff(&tot(C[3]), &tot(C[1]))),
            ],
            profile: IndexMap::from([
                (C[0].to_string(), vec![1.0, 1.0, 1.0]),
                (C[1].to_string(), vec![1.0, 1.0, 2.0]),
                (C[2].to_string(), vec![1.0, 1.0, 1.0]),
                (C[3].to_string(), vec![3.0, 3.0, 3.0]),
            ]),
        },
    )
}

fn noun_adjective_pp() -> ShippedTemplate {
    const C: [&str; 4] = ["noun_adj", "adj_noun", "noun_pp", "pp_noun"];
    let verbs = ["Construyó", "Compró", "Vendió", "Encontró"];
    let nps = [
        ("una", "mesa", "robusta", "de madera"),
        ("una", "casa", "antigua", "de piedra"),
        ("un", "reloj", "precioso", "de oro"),
        ("un", "barco", "enorme", "de vela"),
        ("una", "caja", "pequeña", "de cartón"),
    ];
    let np_entries = nps
        .iter()
        .map(|&(art, n, a, pp)| {
            entry(&[
                ("art", same(art)),
                ("first", by(&C, &[n, a, n, pp])),
                ("second", by(&C, &[a, n, pp, n])),
            ])
        })
        .collect();
    let tot = |c: &str| total(&[2, 3], c);
    build(
        meta(
            "Noun-Adjective and Noun-PP Linearization",
            "noun_adjective_pp_linearization",
            Circuit::Linearization,
            None,
        ),
        Layout {
            conds: &C,
            regions: &["context", "first", "second"],
            frame: &["{v} {n.art}", "{n.first}", "{n.second}."],
            slots: vec![
                ("v", verbs.iter().map(|v| single(same(v))).collect()),
                ("n", np_entries),
            ],
            mode: ExpansionMode::Cartesian,
            predictions: vec![
                gt(&tot(C[3]), &tot(C[2])),
                gt(&tot(C[1]), &tot(C[0])),
                lt(&diff(&tot(C[1]), &tot(C[0])), &diff(&tot(C[3]), &tot(C[2]))),
            ],
            profile: profile(&C, 3, &[(C[1], 2, 2.0), (C[3], 2, 3.0), (C[3], 3, 3.0)]),
        },
    )
}
