//! Reading a dataset directory.
//!
//! Expected layout:
//!
//! ```text
//! <root>/cases/<id>.pl          one file per case
//! <root>/splits/train           case ids, one per line
//! <root>/splits/test
//! <root>/statutes/source/<name> plain statute text, one file per section
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::case::{parse_case, Case, CaseError, Split, Task};

/// Environment variable naming the dataset root.
pub const ROOT_VAR: &str = "SARA_ROOT";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} contains no cases")]
    Empty(PathBuf),
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error("case {id} is listed in no split")]
    UnknownSplit { id: String },
    #[error("split {split} lists {id}, which has no case file")]
    MissingCase { split: Split, id: String },
    #[error("case {id} is listed in both splits")]
    DuplicateSplit { id: String },
    #[error("no dataset root: pass --data or set {ROOT_VAR}")]
    NoRoot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatuteText {
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    /// Sorted by id.
    pub cases: Vec<Case>,
    /// Sorted by name; empty if the distribution ships none.
    pub statutes: Vec<StatuteText>,
}

impl Dataset {
    pub fn select(&self, split: Option<Split>, task: Option<Task>) -> Vec<&Case> {
        self.cases
            .iter()
            .filter(|c| split.is_none_or(|s| c.split == s) && task.is_none_or(|t| c.task() == t))
            .collect()
    }

    pub fn count(&self, split: Split, task: Task) -> usize {
        self.select(Some(split), Some(task)).len()
    }
}

/// Explicit path, else `$SARA_ROOT`.
pub fn data_root(explicit: Option<&Path>) -> Result<PathBuf, LoadError> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(ROOT_VAR).filter(|v| !v.is_empty()).map(PathBuf::from))
        .ok_or(LoadError::NoRoot)
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> LoadError + '_ {
    move |source| LoadError::Io { path: path.to_path_buf(), source }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, LoadError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io(dir))? {
        let path = entry.map_err(io(dir))?.path();
        if path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn read_split(root: &Path, split: Split) -> Result<Vec<String>, LoadError> {
    let path = root.join("splits").join(split.to_string());
    let text = fs::read_to_string(&path).map_err(io(&path))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.trim_end_matches(".pl").to_string())
        .collect())
}

pub fn load_dataset(root: &Path) -> Result<Dataset, LoadError> {
    let cases_dir = root.join("cases");
    if !cases_dir.is_dir() {
        fs::metadata(root).map_err(io(root))?;
        return Err(LoadError::Empty(root.to_path_buf()));
    }
    let mut split_of: BTreeMap<String, Split> = BTreeMap::new();
    for split in [Split::Train, Split::Test] {
        for id in read_split(root, split)? {
            if split_of.insert(id.clone(), split).is_some() {
                return Err(LoadError::DuplicateSplit { id });
            }
        }
    }

    let mut cases = Vec::new();
    let mut seen = BTreeSet::new();
    for path in sorted_entries(&cases_dir)? {
        if path.extension().is_none_or(|e| e != "pl") {
            continue;
        }
        let id = path.file_stem().expect("file has a name").to_string_lossy().into_owned();
        let split = *split_of.get(&id).ok_or_else(|| LoadError::UnknownSplit { id: id.clone() })?;
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        cases.push(parse_case(&id, &text, split)?);
        seen.insert(id);
    }
    if cases.is_empty() {
        return Err(LoadError::Empty(cases_dir));
    }
    if let Some((id, split)) = split_of.iter().find(|(id, _)| !seen.contains(*id)) {
        return Err(LoadError::MissingCase { split: *split, id: id.clone() });
    }
    cases.sort_by(|a, b| a.id.cmp(&b.id));

    let source = root.join("statutes").join("source");
    let mut statutes = Vec::new();
    if source.is_dir() {
        for path in sorted_entries(&source)? {
            let name = path.file_name().expect("file has a name").to_string_lossy().into_owned();
            let text = fs::read_to_string(&path).map_err(io(&path))?;
            statutes.push(StatuteText { name, text });
        }
    }
    Ok(Dataset { root: root.to_path_buf(), cases, statutes })
}
