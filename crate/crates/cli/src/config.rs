use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use syngauntlet::engine::OutputFormat;
use syngauntlet::remote::{RemoteScorer, RetryPolicy};
use syngauntlet::scoring::{
    train_ngram, NgramScorer, Scorer, UniformScorer, DEFAULT_ORDER, DEFAULT_WEIGHTS,
};
use syngauntlet::suite::{Circuit, TestSuite};
use syngauntlet::suite_data::{shipped_suites, TOY_CORPUS_ES};

use crate::inputs::{load_suites, LoadedSuite};
use crate::{RunArgs, EXIT_INVALID, EXIT_UNREADABLE};

/// Run defaults read from a JSON file. Keys mirror the long flags with
/// underscores; relative paths are resolved against the file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    suites: Option<Vec<PathBuf>>,
    scorer: Option<String>,
    id: Option<String>,
    corpus: Option<PathBuf>,
    order: Option<usize>,
    lambdas: Option<Vec<f64>>,
    vocab_size: Option<u64>,
    endpoint: Option<String>,
    timeout_ms: Option<u64>,
    retries: Option<u32>,
    in_flight: Option<usize>,
    workers: Option<usize>,
    format: Option<String>,
    out: Option<PathBuf>,
    language: Option<String>,
    circuit: Option<String>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let mut file: ConfigFile = serde_json::from_str(&text)
            .with_context(|| format!("bad config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        file.suites.iter_mut().flatten().for_each(rebase);
        file.corpus.iter_mut().for_each(rebase);
        file.out.iter_mut().for_each(rebase);
        Ok(file)
    }
}

pub enum ScorerSettings {
    Ngram {
        corpus: Option<PathBuf>,
        order: usize,
        lambdas: Vec<f64>,
    },
    Uniform {
        vocab_size: u64,
    },
    Remote {
        endpoint: String,
        policy: RetryPolicy,
    },
}

pub struct RunSettings {
    pub paths: Vec<PathBuf>,
    pub id: Option<String>,
    pub scorer: ScorerSettings,
    pub workers: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub language: Option<String>,
    pub circuit: Option<Circuit>,
}

impl RunSettings {
    /// Flags win over the config file, which wins over defaults.
    pub fn resolve(args: RunArgs, file: ConfigFile) -> Result<Self> {
        let kind = args
            .scorer
            .or(file.scorer)
            .unwrap_or_else(|| "ngram".into());
        let scorer = match kind.as_str() {
            "ngram" => {
                let order = args.order.or(file.order).unwrap_or(DEFAULT_ORDER);
                let lambdas = match args.lambdas.or(file.lambdas) {
                    Some(l) => l,
                    None if order == DEFAULT_ORDER => DEFAULT_WEIGHTS.to_vec(),
                    None if order == 1 => vec![1.0],
                    None => bail!("--lambdas is required with --order {order}"),
                };
                ScorerSettings::Ngram {
                    corpus: args.corpus.or(file.corpus),
                    order,
                    lambdas,
                }
            }
            "uniform" => ScorerSettings::Uniform {
                vocab_size: args.vocab_size.or(file.vocab_size).unwrap_or(1024),
            },
            "remote" => {
                let defaults = RetryPolicy::default();
                ScorerSettings::Remote {
                    endpoint: args.endpoint.or(file.endpoint).ok_or_else(|| {
                        anyhow!("remote scorer needs --endpoint or SYNGAUNTLET_ENDPOINT")
                    })?,
                    policy: RetryPolicy {
                        timeout: args
                            .timeout_ms
                            .or(file.timeout_ms)
                            .map(Duration::from_millis)
                            .unwrap_or(defaults.timeout),
                        max_retries: args
                            .retries
                            .or(file.retries)
                            .unwrap_or(defaults.max_retries),
                        max_in_flight: args
                            .in_flight
                            .or(file.in_flight)
                            .unwrap_or(defaults.max_in_flight),
                        ..defaults
                    },
                }
            }
            other => bail!("unknown scorer `{other}`"),
        };
        let workers = args.workers.or(file.workers).unwrap_or(1);
        if workers == 0 {
            bail!("--workers must be at least 1");
        }
        let format = args
            .format
            .or(file.format)
            .unwrap_or_else(|| "table".into())
            .parse::<OutputFormat>()
            .map_err(|e| anyhow!(e))?;
        let circuit = args
            .circuit
            .or(file.circuit)
            .map(|c| c.parse::<Circuit>().map_err(|e| anyhow!("{e}")))
            .transpose()?;
        Ok(Self {
            paths: if args.paths.is_empty() {
                file.suites.unwrap_or_default()
            } else {
                args.paths
            },
            id: args.id.or(file.id),
            scorer,
            workers,
            format,
            out: args.out.or(file.out),
            language: args.language.or(file.language),
            circuit,
        })
    }

    /// Selected suites, or an exit code after reporting why there are none.
    pub fn suites(&self) -> Result<Vec<TestSuite>, u8> {
        let all = if self.paths.is_empty() {
            shipped_suites()
        } else {
            let loaded = load_suites(&self.paths).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_UNREADABLE
            })?;
            let mut suites = Vec::new();
            let mut malformed = false;
            for entry in loaded {
                match entry {
                    LoadedSuite::Loaded { suite, .. } => suites.push(suite),
                    LoadedSuite::Malformed { path, error } => {
                        eprintln!("{}: {error}", path.display());
                        malformed = true;
                    }
                }
            }
            if malformed {
                return Err(EXIT_INVALID);
            }
            suites
        };
        let selected: Vec<TestSuite> = all
            .into_iter()
            .filter(|s| self.language.as_ref().is_none_or(|l| &s.language == l))
            .filter(|s| self.circuit.is_none_or(|c| s.circuit == c))
            .collect();
        if selected.is_empty() {
            eprintln!("error: no suites selected");
            return Err(EXIT_UNREADABLE);
        }
        Ok(selected)
    }

    pub fn build_scorer(&self) -> Result<Box<dyn Scorer>> {
        Ok(match &self.scorer {
            ScorerSettings::Ngram {
                corpus,
                order,
                lambdas,
            } => {
                let text = match corpus {
                    Some(path) => std::fs::read_to_string(path)
                        .with_context(|| format!("cannot read corpus {}", path.display()))?,
                    None => TOY_CORPUS_ES.to_string(),
                };
                let sentences: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
                let model = train_ngram(&sentences, *order, lambdas)?;
                Box::new(NgramScorer::new(
                    self.id.clone().unwrap_or_else(|| "ngram".into()),
                    model,
                ))
            }
            ScorerSettings::Uniform { vocab_size } => Box::new(UniformScorer::new(
                self.id.clone().unwrap_or_else(|| "uniform".into()),
                *vocab_size,
            )),
            ScorerSettings::Remote { endpoint, policy } => {
                let scorer = RemoteScorer::connect(endpoint, policy.clone())?;
                match &self.id {
                    Some(id) => {
                        let client = scorer.into_client();
                        Box::new(RemoteScorer::new(id.clone(), client))
                    }
                    None => Box::new(scorer),
                }
            }
        })
    }
}
