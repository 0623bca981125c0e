//! Encoding schemes: how a structure or a search trace becomes a sequence of
//! small-integer symbols for the LZ estimator.
//!
//! Node schemes enumerate a structure (explicit labels, overt terminals, or
//! every phrase with its computed label). Step schemes consume a root-to-goal
//! trace and emit one or two symbols per edge crossed. Symbols are interned in
//! order of first appearance, so symbol `i` always occurs before `i + 1`.

use std::collections::{BTreeSet, HashMap};
use std::path::Path as FsPath;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lz::{self, ComplexityReport, LogBase, LzError};
use crate::search::{self, EnumerationMode, SearchError, SearchTrace, TraceOrigin};
use crate::syntax::SyntacticObject;

pub const MANIFEST_ENV: &str = "TCCLAB_SCHEME_MANIFEST";

const BOUNDARY: &str = "[";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("nothing to encode: the enumeration or trace is empty")]
    EmptyInput,
    #[error("scheme {0} encodes search steps and needs a goal")]
    NeedsGoal(String),
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("invalid scheme {id}: {reason}")]
    InvalidScheme { id: String, reason: String },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("scheme manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeClass {
    /// Explicitly labeled nodes.
    Labels,
    /// Every phrase, labeled explicitly or by the labeling algorithm.
    Phrases,
    /// Overt terminals.
    Terminals,
    /// Edges of a root-to-goal search path.
    Steps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolMap {
    /// Equal descriptors share a symbol; a step emits its two endpoints.
    CategoryIdentity,
    /// Every visit or step is a fresh symbol.
    FreshPerStep,
    /// Descriptors with the projection level stripped (`CP`, `C'` → `C`);
    /// a step is one symbol per (from, to) type.
    FreshPerType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingScheme {
    pub id: String,
    pub node_classes: BTreeSet<NodeClass>,
    pub symbol_map: SymbolMap,
    pub boundary_markers: bool,
}

impl EncodingScheme {
    pub fn new(id: &str, classes: &[NodeClass], symbol_map: SymbolMap, boundary_markers: bool) -> Self {
        EncodingScheme {
            id: id.to_string(),
            node_classes: classes.iter().copied().collect(),
            symbol_map,
            boundary_markers,
        }
    }

    pub fn uses_steps(&self) -> bool {
        self.node_classes.contains(&NodeClass::Steps)
    }

    fn enumeration_mode(&self) -> Result<EnumerationMode, EncodingError> {
        use NodeClass::*;
        let c: Vec<NodeClass> = self.node_classes.iter().copied().collect();
        match c.as_slice() {
            [Labels] => Ok(EnumerationMode::LabelsOnly),
            [Labels, Terminals] => Ok(EnumerationMode::LabelsAndTerminals),
            [Phrases] => Ok(EnumerationMode::PhraseLabels),
            _ => Err(self.invalid("node classes must be {labels}, {labels, terminals}, {phrases} or {steps}")),
        }
    }

    fn invalid(&self, reason: &str) -> EncodingError {
        EncodingError::InvalidScheme { id: self.id.clone(), reason: reason.to_string() }
    }

    pub fn validate(&self) -> Result<(), EncodingError> {
        if self.id.is_empty() {
            return Err(self.invalid("empty id"));
        }
        if self.node_classes.is_empty() {
            return Err(self.invalid("no node class selected"));
        }
        if self.uses_steps() {
            if self.node_classes.len() != 1 {
                return Err(self.invalid("steps cannot be combined with node classes"));
            }
            return Ok(());
        }
        self.enumeration_mode().map(|_| ())
    }
}

/// Interned symbols plus their legend.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolSequence {
    pub symbols: Vec<u32>,
    pub alphabet_size: usize,
    pub scheme: String,
    pub provenance: String,
    /// `legend[i]` is the token that symbol `i` stands for.
    pub legend: Vec<String>,
}

impl SymbolSequence {
    /// Interns tokens by first appearance.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], scheme: &str, provenance: &str) -> Self {
        let mut map: HashMap<&str, u32> = HashMap::new();
        let mut legend = Vec::new();
        let symbols = tokens
            .iter()
            .map(|t| {
                let t = t.as_ref();
                *map.entry(t).or_insert_with(|| {
                    legend.push(t.to_string());
                    legend.len() as u32 - 1
                })
            })
            .collect();
        SymbolSequence {
            symbols,
            alphabet_size: legend.len(),
            scheme: scheme.to_string(),
            provenance: provenance.to_string(),
            legend,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn phrase_count(&self) -> Result<usize, LzError> {
        lz::phrase_count(&self.symbols)
    }

    pub fn complexity(&self, base: LogBase) -> Result<ComplexityReport, LzError> {
        lz::complexity(&self.symbols, base)
    }

    /// Readable form, e.g. `CP TP TP T`.
    pub fn tokens(&self) -> Vec<&str> {
        self.symbols.iter().map(|s| self.legend[*s as usize].as_str()).collect()
    }
}

/// Strips the projection level: `CP` → `C`, `T'` → `T`, `TP` → `T`.
pub fn category_type(descriptor: &str) -> &str {
    let d = descriptor.trim_end_matches('\'');
    if d.chars().count() > 1 {
        d.strip_suffix('P').unwrap_or(d)
    } else {
        d
    }
}

fn tokens_for(trace: &SearchTrace, scheme: &EncodingScheme) -> Vec<String> {
    let mut out = Vec::new();
    if scheme.uses_steps() {
        for (i, w) in trace.visits.windows(2).enumerate() {
            if scheme.boundary_markers {
                out.push(BOUNDARY.to_string());
            }
            match scheme.symbol_map {
                SymbolMap::CategoryIdentity => {
                    out.push(w[0].clone());
                    out.push(w[1].clone());
                }
                SymbolMap::FreshPerStep => out.push(format!("#{i}")),
                SymbolMap::FreshPerType => {
                    out.push(format!("{}>{}", category_type(&w[0]), category_type(&w[1])))
                }
            }
        }
    } else {
        for (i, v) in trace.visits.iter().enumerate() {
            if scheme.boundary_markers {
                out.push(BOUNDARY.to_string());
            }
            match scheme.symbol_map {
                SymbolMap::CategoryIdentity => out.push(v.clone()),
                SymbolMap::FreshPerStep => out.push(format!("#{i}")),
                SymbolMap::FreshPerType => out.push(category_type(v).to_string()),
            }
        }
    }
    out
}

/// Encodes a trace. Step schemes read it as a path (one step per adjacent
/// pair of visits); node schemes read the visits themselves.
pub fn encode(trace: &SearchTrace, scheme: &EncodingScheme) -> Result<SymbolSequence, EncodingError> {
    scheme.validate()?;
    let tokens = tokens_for(trace, scheme);
    if tokens.is_empty() || trace.is_empty() {
        return Err(EncodingError::EmptyInput);
    }
    let provenance = match trace.origin {
        TraceOrigin::LabelSearch => "label-search",
        TraceOrigin::ProbeGoal => "probe-goal",
        TraceOrigin::NodeEnumeration => "node-enumeration",
    };
    Ok(SymbolSequence::from_tokens(&tokens, &scheme.id, provenance))
}

/// Node enumeration followed by [`encode`].
pub fn encode_structure(so: &SyntacticObject, scheme: &EncodingScheme) -> Result<SymbolSequence, EncodingError> {
    scheme.validate()?;
    if scheme.uses_steps() {
        return Err(EncodingError::NeedsGoal(scheme.id.clone()));
    }
    let trace = search::node_enumeration(so, scheme.enumeration_mode()?);
    encode(&trace, scheme)
}

/// What a search-step scheme walks to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Goal {
    /// First minimal-search hit for a category.
    Category(String),
    /// First minimal-search hit for a feature bundle such as `+Q,+N`.
    Features(String),
    /// An explicit root-relative path.
    Path(crate::syntax::Path),
    /// The launch site of the first movement chain.
    LowerCopy,
}

impl Goal {
    pub fn trace(&self, so: &SyntacticObject) -> Result<SearchTrace, EncodingError> {
        use crate::search::SearchTarget;
        let t = match self {
            Goal::Category(c) => {
                let cat = c.parse().map_err(|_| SearchError::EmptyTarget)?;
                search::search_trace(so, &SearchTarget::Category(cat))?
            }
            Goal::Features(f) => {
                let feats = f
                    .split(',')
                    .map(|x| x.trim().parse())
                    .collect::<Result<Vec<crate::syntax::Feature>, _>>()
                    .map_err(|_| SearchError::EmptyTarget)?;
                let fs = crate::syntax::FeatureSet::from_features(feats).map_err(|_| SearchError::EmptyTarget)?;
                search::search_trace(so, &SearchTarget::Features(fs))?
            }
            Goal::Path(p) => search::path_trace(so, p)?,
            Goal::LowerCopy => search::movement_trace(so)?,
        };
        Ok(t)
    }
}

/// Anything a candidate can carry into the estimator.
#[derive(Debug, Clone)]
pub enum Payload {
    Structure(SyntacticObject),
    Targeted { structure: SyntacticObject, goal: Goal },
    Trace(SearchTrace),
}

impl Payload {
    pub fn encode(&self, scheme: &EncodingScheme) -> Result<SymbolSequence, EncodingError> {
        match self {
            Payload::Structure(so) => encode_structure(so, scheme),
            Payload::Targeted { structure, goal } => {
                if scheme.uses_steps() {
                    encode(&goal.trace(structure)?, scheme)
                } else {
                    encode_structure(structure, scheme)
                }
            }
            Payload::Trace(t) => encode(t, scheme),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeRegistry {
    pub schemes: Vec<EncodingScheme>,
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        use NodeClass::*;
        let mut schemes = Vec::new();
        let base: [(&str, &[NodeClass], SymbolMap); 5] = [
            ("labels+terminals", &[Labels, Terminals], SymbolMap::CategoryIdentity),
            ("phrase-labels", &[Phrases], SymbolMap::CategoryIdentity),
            ("path-steps", &[Steps], SymbolMap::FreshPerStep),
            ("path-edges", &[Steps], SymbolMap::CategoryIdentity),
            ("path-types", &[Steps], SymbolMap::FreshPerType),
        ];
        for (id, classes, map) in base {
            schemes.push(EncodingScheme::new(id, classes, map, false));
            schemes.push(EncodingScheme::new(&format!("{id}+bounds"), classes, map, true));
        }
        SchemeRegistry { schemes }
    }
}

impl SchemeRegistry {
    pub fn new(schemes: Vec<EncodingScheme>) -> Result<Self, EncodingError> {
        let reg = SchemeRegistry { schemes };
        reg.validate()?;
        Ok(reg)
    }

    pub fn validate(&self) -> Result<(), EncodingError> {
        let mut seen = BTreeSet::new();
        for s in &self.schemes {
            s.validate()?;
            if !seen.insert(s.id.as_str()) {
                return Err(EncodingError::InvalidScheme { id: s.id.clone(), reason: "duplicate id".into() });
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&EncodingScheme, EncodingError> {
        self.schemes
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| EncodingError::UnknownScheme(id.to_string()))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.schemes.iter().map(|s| s.id.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, EncodingError> {
        let reg: SchemeRegistry =
            serde_json::from_str(text).map_err(|e| EncodingError::Manifest(e.to_string()))?;
        reg.validate()?;
        Ok(reg)
    }

    pub fn load(path: &FsPath) -> Result<Self, EncodingError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EncodingError::Manifest(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The registry named by the manifest environment variable, else the
    /// built-in one.
    pub fn from_env() -> Result<Self, EncodingError> {
        match std::env::var_os(MANIFEST_ENV) {
            Some(p) => Self::load(FsPath::new(&p)),
            None => Ok(Self::default()),
        }
    }
}

/// A calibration input: something to encode, the value it should score, and
/// the family it is compared within (lower target = preferred).
#[derive(Debug, Clone)]
pub struct CalibrationFixture {
    pub id: String,
    pub family: String,
    pub payload: Payload,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureScore {
    pub fixture: String,
    pub target: f64,
    /// `None` when the scheme cannot encode this fixture.
    pub value: Option<f64>,
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeScore {
    pub scheme: String,
    pub orderings_preserved: usize,
    pub orderings_total: usize,
    pub max_error: f64,
    pub within_tolerance: bool,
    pub scores: Vec<FixtureScore>,
}

impl SchemeScore {
    pub fn all_orderings(&self) -> bool {
        self.orderings_preserved == self.orderings_total
    }
}

fn score_scheme(fixtures: &[CalibrationFixture], scheme: &EncodingScheme, base: LogBase, tolerance: f64) -> SchemeScore {
    let scores: Vec<FixtureScore> = fixtures
        .iter()
        .map(|f| {
            let value = f
                .payload
                .encode(scheme)
                .ok()
                .and_then(|seq| seq.complexity(base).ok())
                .map(|r| r.normalized);
            FixtureScore {
                fixture: f.id.clone(),
                target: f.target,
                value,
                error: value.map(|v| (v - f.target).abs()),
            }
        })
        .collect();
    let mut preserved = 0;
    let mut total = 0;
    for i in 0..fixtures.len() {
        for j in i + 1..fixtures.len() {
            let (a, b) = (&fixtures[i], &fixtures[j]);
            if a.family != b.family || a.target == b.target {
                continue;
            }
            total += 1;
            if let (Some(va), Some(vb)) = (scores[i].value, scores[j].value) {
                if (va < vb) == (a.target < b.target) && va != vb {
                    preserved += 1;
                }
            }
        }
    }
    let max_error = scores.iter().map(|s| s.error.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    SchemeScore {
        scheme: scheme.id.clone(),
        orderings_preserved: preserved,
        orderings_total: total,
        max_error,
        within_tolerance: max_error <= tolerance,
        scores,
    }
}

/// Scores every scheme on every fixture and ranks schemes by preserved
/// orderings, then maximum absolute error, then id.
pub fn calibrate(
    fixtures: &[CalibrationFixture],
    schemes: &[EncodingScheme],
    base: LogBase,
    tolerance: f64,
) -> Result<Vec<SchemeScore>, EncodingError> {
    if fixtures.is_empty() {
        return Err(EncodingError::EmptyInput);
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(EncodingError::InvalidScheme { id: "*".into(), reason: "tolerance must be positive".into() });
    }
    let mut ranked: Vec<SchemeScore> =
        schemes.par_iter().map(|s| score_scheme(fixtures, s, base, tolerance)).collect();
    ranked.sort_by(|a, b| {
        b.orderings_preserved
            .cmp(&a.orderings_preserved)
            .then(a.max_error.total_cmp(&b.max_error))
            .then(a.scheme.cmp(&b.scheme))
    });
    Ok(ranked)
}
