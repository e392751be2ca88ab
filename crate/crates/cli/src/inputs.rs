use std::path::{Path, PathBuf};

use syngauntlet::suite::{load_suite, LoadError, TestSuite};
use walkdir::WalkDir;

pub enum LoadedSuite {
    Loaded { path: PathBuf, suite: TestSuite },
    Malformed { path: PathBuf, error: LoadError },
}

/// Expands files and directories (searched recursively for `*.json`, in
/// path order) into suite documents. A path that cannot be read is an error;
/// a document that does not parse is reported per file.
pub fn load_suites(paths: &[PathBuf]) -> Result<Vec<LoadedSuite>, String> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = WalkDir::new(path)
                .into_iter()
                .map(|e| e.map_err(|e| format!("{}: {e}", path.display())))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .filter(|e| {
                    e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "json")
                })
                .map(|e| e.into_path())
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    files.iter().map(|f| load_one(f)).collect()
}

fn load_one(path: &Path) -> Result<LoadedSuite, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(match load_suite(&bytes) {
        Ok(suite) => LoadedSuite::Loaded {
            path: path.to_path_buf(),
            suite,
        },
        Err(error) => LoadedSuite::Malformed {
            path: path.to_path_buf(),
            error,
        },
    })
}
