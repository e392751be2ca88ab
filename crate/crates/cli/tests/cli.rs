use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::thread;

use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_syngauntlet"));
    cmd.env_remove("SYNGAUNTLET_ENDPOINT");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/v1")
}

fn fixture(name: &str) -> String {
    data()
        .join("fixtures/agreement")
        .join(name)
        .display()
        .to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_shipped_documents() {
    let o = run(&["validate", p(&data())]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 28);
    assert!(lines.iter().all(|l| l.ends_with(": ok")));
}

#[test]
fn validate_reports_each_problem() {
    let dir = TempDir::new().unwrap();
    let mut doc: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("tie_fixture.json")).unwrap())
            .unwrap();
    doc["predictions"] = json!(["(7;good) < (2;bad)"]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"name\": ").unwrap();

    let o = run(&["validate", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1, "{out}");
    assert!(out.contains("DanglingRegionRef"), "{out}");

    let o = run(&["validate", p(&broken)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with(p(&broken)));

    let o = run(&["validate", p(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn uniform_scorer_fails_every_tie() {
    let o = run(&[
        "run",
        &fixture("tie_fixture.json"),
        "--scorer",
        "uniform",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("suite,circuit,language,has_modifier,accuracy")
    );
    let row = lines.next().unwrap();
    assert!(row.ends_with(",0"), "{row}");
}

#[test]
fn json_reports_are_byte_identical_across_workers() {
    let dir = TempDir::new().unwrap();
    let one = dir.path().join("one.json");
    let eight = dir.path().join("eight.json");
    for (out, workers) in [(&one, "1"), (&eight, "8")] {
        let o = run(&[
            "run",
            "--format",
            "json",
            "--workers",
            workers,
            "--out",
            p(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = std::fs::read(&one).unwrap();
    assert_eq!(a, std::fs::read(&eight).unwrap());
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["suite_results"].as_array().unwrap().len(), 26);
    assert_eq!(report["scorer_id"], "ngram");
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        json!({
            "suites": [fixture("tie_fixture.json")],
            "scorer": "uniform",
            "id": "from-file",
            "vocab_size": 8,
            "format": "json",
            "out": "report.json",
        })
        .to_string(),
    )
    .unwrap();
    let config = dir.path().join("run.json");

    let o = run(&["run", "--config", p(&config)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["scorer_id"], "from-file");
    let first_region = |r: &Value| {
        r["suite_results"][0]["item_results"][0]["surprisal_table"]["good"][0]
            .as_f64()
            .unwrap()
    };
    let eight = first_region(&report);
    assert_eq!(eight % 3.0, 0.0);

    let stdout_out = dir.path().join("flag.json");
    let o = run(&[
        "run",
        "--config",
        p(&config),
        "--id",
        "from-flag",
        "--vocab-size",
        "16",
        "--out",
        p(&stdout_out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&std::fs::read(&stdout_out).unwrap()).unwrap();
    assert_eq!(report["scorer_id"], "from-flag");
    assert_eq!(first_region(&report), eight / 3.0 * 4.0);

    std::fs::write(
        &config,
        json!({ "scorer": "uniform", "bogus": 1 }).to_string(),
    )
    .unwrap();
    assert_eq!(run(&["run", "--config", p(&config)]).status.code(), Some(2));
}

#[test]
fn bad_usage_exits_two() {
    assert_eq!(run(&["run", "--workers", "0"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--order", "4"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--language", "xx"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--scorer", "remote"]).status.code(), Some(2));
}

#[test]
fn filters_select_suites() {
    let o = run(&["run", "--circuit", "licensing", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1 + 4);
    assert!(out.lines().skip(1).all(|l| l.contains(",licensing,es,")));
}

#[test]
fn compare_lines_up_reports() {
    let dir = TempDir::new().unwrap();
    let ngram = dir.path().join("ngram.json");
    let uniform = dir.path().join("uniform.json");
    let tie = dir.path().join("tie.json");
    for (out, scorer, extra) in [
        (&ngram, "ngram", None),
        (&uniform, "uniform", None),
        (&tie, "uniform", Some(fixture("tie_fixture.json"))),
    ] {
        let mut args = vec![
            "run".to_string(),
            "--scorer".into(),
            scorer.into(),
            "--format".into(),
            "json".into(),
        ];
        args.extend(["--out".to_string(), p(out).to_string()]);
        args.extend(extra);
        let o = bin().args(&args).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }

    let o = run(&["compare", p(&ngram), p(&uniform)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let header: Vec<&str> = out.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["Model", "Spanish"]);
    assert!(out.lines().nth(1).unwrap().starts_with("ngram"));
    assert!(out.lines().nth(2).unwrap().starts_with("uniform"));
    assert!(out.contains("Suite (Spanish)"));

    let o = run(&["compare", p(&ngram), p(&uniform), "--format", "json"]);
    let table: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(table["models"], json!(["ngram", "uniform"]));

    let o = run(&["compare", p(&ngram), p(&tie)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("different"), "{}", stderr(&o));

    assert_eq!(run(&["compare", p(&ngram)]).status.code(), Some(2));
    assert_eq!(
        run(&["compare", p(&ngram), p(&dir.path().join("nope.json"))])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn list_and_export() {
    let o = run(&["list", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let catalog: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(catalog.as_array().unwrap().len(), 26);

    let o = run(&["list"]);
    assert_eq!(stdout(&o).lines().count(), 27);

    let dir = TempDir::new().unwrap();
    let o = run(&["export-suites", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["validate", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 28);
    let exported = dir.path().join("v1/es/agreement");
    for entry in std::fs::read_dir(&exported).unwrap() {
        let path = entry.unwrap().path();
        let shipped = data().join("es/agreement").join(path.file_name().unwrap());
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(shipped).unwrap(),
            "{}",
            path.display()
        );
    }
}

/// Scoring service that charges two bits per whitespace-separated token.
fn serve_flat() -> String {
    async fn info() -> Json<Value> {
        Json(json!({ "model_id": "flat", "vocabulary_size": 4, "max_text_len": 1000 }))
    }
    async fn score(Json(req): Json<Value>) -> Json<Value> {
        let text = req["text"].as_str().unwrap_or_default();
        let chars: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut start = None;
        for i in 0..=chars.len() {
            let boundary = i == chars.len() || chars[i].is_whitespace();
            match (start, boundary) {
                (None, false) => start = Some(i),
                (Some(s), true) => {
                    tokens.push(json!({ "text": chars[s..i].iter().collect::<String>(), "start": s, "end": i }));
                    start = None;
                }
                _ => {}
            }
        }
        let bits = (req["mode"] == "sequential_score").then(|| vec![2.0; tokens.len()]);
        Json(json!({ "model_id": "flat", "tokens": tokens, "surprisal_bits": bits }))
    }
    let app = Router::new()
        .route("/v1/info", get(info))
        .route("/v1/score", post(score));
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    format!("http://{addr}")
}

#[test]
fn remote_scorer_runs_against_a_service() {
    let endpoint = serve_flat();
    let o = bin()
        .args([
            "run",
            &fixture("tie_fixture.json"),
            "--scorer",
            "remote",
            "--format",
            "json",
        ])
        .env("SYNGAUNTLET_ENDPOINT", &endpoint)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["scorer_id"], "flat");
    assert_eq!(report["overall"], json!(0.0));
}

#[test]
fn unreachable_service_exits_three() {
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let o = run(&[
        "run",
        &fixture("tie_fixture.json"),
        "--scorer",
        "remote",
        "--endpoint",
        &format!("http://127.0.0.1:{port}"),
        "--retries",
        "0",
        "--timeout-ms",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
