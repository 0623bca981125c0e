//! Contrast-pair corpora: a directory holding `manifest.json` and the `.sbt`
//! fixtures it names.
//!
//! ```json
//! { "pairs": [ { "id": "14", "scheme": "path-steps", "members": [
//!     { "file": "fixtures/14a.sbt", "gold": "ungrammatical",
//!       "goal": "lower-copy", "expected": 2.0 }, … ] } ] }
//! ```

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bracket::{parse_bracket, BracketError};
use crate::encoding::{CalibrationFixture, Goal, Payload};
use crate::syntax::SyntacticObject;
use crate::tcc::{ContrastPair, Gold, PairMember};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: invalid manifest: {message}")]
    Manifest { path: String, message: String },
    #[error("{path}:{source}")]
    Fixture { path: String, source: BracketError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub file: String,
    /// Defaults to the file stem; needed when one fixture backs two members.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub gold: Gold,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Goal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub scheme: String,
    pub members: Vec<MemberSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub pairs: Vec<PairSpec>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub pairs: Vec<ContrastPair>,
}

/// Stem of a fixture path: `fixtures/14a.sbt` → `14a`.
pub fn member_id(file: &str) -> String {
    FsPath::new(file).file_stem().map_or_else(|| file.to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn load_fixture(path: &FsPath) -> Result<SyntacticObject, CorpusError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CorpusError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_bracket(&text).map_err(|source| CorpusError::Fixture { path: path.display().to_string(), source })
}

pub fn load_corpus(dir: &FsPath) -> Result<Corpus, CorpusError> {
    let mpath = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&mpath)
        .map_err(|e| CorpusError::Io { path: mpath.display().to_string(), message: e.to_string() })?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| CorpusError::Manifest { path: mpath.display().to_string(), message: e.to_string() })?;
    if manifest.pairs.is_empty() {
        return Err(CorpusError::Manifest { path: mpath.display().to_string(), message: "no pairs".into() });
    }
    let mut pairs = Vec::new();
    for spec in &manifest.pairs {
        let mut members = Vec::new();
        for m in &spec.members {
            let so = load_fixture(&dir.join(&m.file))?;
            let payload = match &m.goal {
                Some(goal) => Payload::Targeted { structure: so, goal: goal.clone() },
                None => Payload::Structure(so),
            };
            let id = m.id.clone().unwrap_or_else(|| member_id(&m.file));
            members.push(PairMember { id, payload, gold: m.gold, expected: m.expected });
        }
        let pair = ContrastPair { id: spec.id.clone(), scheme: spec.scheme.clone(), members };
        pair.validate().map_err(|e| CorpusError::Manifest { path: mpath.display().to_string(), message: e.to_string() })?;
        pairs.push(pair);
    }
    Ok(Corpus { dir: dir.to_path_buf(), manifest, pairs })
}

impl Corpus {
    /// Members with a reported value, as calibration fixtures (family = pair).
    pub fn calibration_fixtures(&self) -> Vec<CalibrationFixture> {
        self.pairs
            .iter()
            .flat_map(|p| {
                p.members.iter().filter_map(move |m| {
                    m.expected.map(|target| CalibrationFixture {
                        id: m.id.clone(),
                        family: p.id.clone(),
                        payload: m.payload.clone(),
                        target,
                    })
                })
            })
            .collect()
    }

    /// Every fixture file the manifest names, in manifest order.
    pub fn fixture_paths(&self) -> Vec<PathBuf> {
        self.manifest.pairs.iter().flat_map(|p| p.members.iter().map(|m| self.dir.join(&m.file))).collect()
    }
}
