use std::fmt::Write as _;
use std::str::FromStr;

use super::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!(
                "unknown output format `{other}` (expected table, json or csv)"
            )),
        }
    }
}

/// English name for the language tags used by shipped suites; other tags
/// are returned unchanged.
pub fn language_name(tag: &str) -> &str {
    match tag {
        "en" => "English",
        "es" => "Spanish",
        other => other,
    }
}

pub(crate) fn percent(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

impl RunReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.to_table(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Pretty JSON followed by a newline. Equal reports give equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// One row per suite: suite, circuit, language, has_modifier, accuracy.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "circuit", "language", "has_modifier", "accuracy"])
            .expect("in-memory write");
        for s in &self.suite_results {
            w.write_record([
                s.name.as_str(),
                s.circuit.as_str(),
                s.language.as_str(),
                if s.has_modifier { "true" } else { "false" },
                &s.accuracy.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }

    /// Human-readable summary: suites grouped by circuit, with percentages.
    pub fn to_table(&self) -> String {
        let width = self
            .suite_results
            .iter()
            .map(|s| s.name.chars().count() + 2)
            .chain(
                self.modifier_pairs
                    .iter()
                    .map(|p| p.pair_id.chars().count() + 2),
            )
            .chain([24])
            .max()
            .unwrap_or(24);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Scorer: {}{}",
            self.scorer_id,
            if self.partial { " (partial)" } else { "" }
        );
        let _ = writeln!(out, "{:<width$}  {:>8}", "Circuit / suite", "Accuracy");
        for (circuit, mean) in &self.circuit_means {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}",
                circuit.display_name(),
                percent(*mean)
            );
            for s in self.suite_results.iter().filter(|s| s.circuit == *circuit) {
                let _ = writeln!(
                    out,
                    "  {:<w$}  {:>8}",
                    s.name,
                    percent(s.accuracy),
                    w = width - 2
                );
            }
        }
        let _ = writeln!(out, "{:<width$}  {:>8}", "Overall", percent(self.overall));
        if !self.modifier_pairs.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}  {:>8}",
                "Modifier pair", "Without", "With"
            );
            for p in &self.modifier_pairs {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>8}  {:>8}",
                    p.pair_id,
                    percent(p.accuracy_without),
                    percent(p.accuracy_with)
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_report, SuiteResult};
    use super::*;
    use crate::suite::Circuit;

    fn report() -> RunReport {
        let suite = |name: &str, circuit, acc, pair: Option<(&str, bool)>| SuiteResult {
            name: name.into(),
            circuit,
            language: "es".into(),
            has_modifier: pair.is_some_and(|p| p.1),
            modifier_pair_id: pair.map(|p| p.0.into()),
            accuracy: acc,
            item_results: vec![],
        };
        build_report(
            "ngram",
            vec![
                suite("Basic, S-V", Circuit::Agreement, 0.5, Some(("sv", false))),
                suite("S-V RC", Circuit::Agreement, 0.25, Some(("sv", true))),
                suite("NPI", Circuit::Licensing, 1.0, None),
            ],
            false,
        )
    }

    #[test]
    fn csv_columns_and_quoting() {
        assert_eq!(
            report().to_csv(),
            "suite,circuit,language,has_modifier,accuracy\n\
             \"Basic, S-V\",agreement,es,false,0.5\n\
             S-V RC,agreement,es,true,0.25\n\
             NPI,licensing,es,false,1\n"
        );
    }

    #[test]
    fn json_round_trips() {
        let r = report();
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn table_groups_by_circuit() {
        let t = report().to_table();
        let lines: Vec<Vec<&str>> = t.lines().map(|l| l.split_whitespace().collect()).collect();
        assert!(lines.contains(&vec!["Agreement", "37.50"]));
        assert!(lines.contains(&vec!["Licensing", "100.00"]));
        assert!(lines.contains(&vec!["Overall", "58.33"]));
        assert!(lines.contains(&vec!["sv", "50.00", "25.00"]));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse(), Ok(OutputFormat::Csv));
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
