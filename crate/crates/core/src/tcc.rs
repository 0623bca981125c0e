//! Compression comparator: among competing options, the one whose encoding
//! has the lowest normalized LZ complexity is preferred; options within the
//! tie tolerance of the minimum are preferred jointly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{EncodingError, Payload, SchemeRegistry};
use crate::lz::{ComplexityReport, LogBase, LzError};

pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gold {
    Grammatical,
    Ungrammatical,
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub id: String,
    pub payload: Payload,
    pub scheme: String,
    /// Carried for reporting only; never consulted when scoring.
    pub gold: Option<Gold>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TccError {
    #[error("need at least two candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("candidates use different schemes: {0} and {1}")]
    SchemeMismatch(String, String),
    #[error("candidate {candidate}: {source}")]
    Encoding { candidate: String, source: EncodingError },
    #[error("candidate {candidate}: {source}")]
    Complexity { candidate: String, source: LzError },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("pair {pair}: {reason}")]
    MalformedPair { pair: String, reason: String },
    #[error("tie tolerance must be a non-negative number")]
    BadTolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateReport {
    pub id: String,
    pub tokens: Vec<String>,
    pub complexity: ComplexityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TccVerdict {
    pub scheme: String,
    pub reports: Vec<CandidateReport>,
    /// Sorted candidate ids.
    pub preferred: Vec<String>,
    pub tie: bool,
}

impl TccVerdict {
    pub fn value(&self, id: &str) -> Option<f64> {
        self.reports.iter().find(|r| r.id == id).map(|r| r.complexity.normalized)
    }
}

fn score(c: &Candidate, registry: &SchemeRegistry, base: LogBase) -> Result<CandidateReport, TccError> {
    let enc = |source| TccError::Encoding { candidate: c.id.clone(), source };
    let scheme = registry.get(&c.scheme).map_err(enc)?;
    let seq = c.payload.encode(scheme).map_err(enc)?;
    let complexity = seq
        .complexity(base)
        .map_err(|source| TccError::Complexity { candidate: c.id.clone(), source })?;
    Ok(CandidateReport { id: c.id.clone(), tokens: seq.tokens().into_iter().map(str::to_string).collect(), complexity })
}

pub fn compare(
    candidates: &[Candidate],
    registry: &SchemeRegistry,
    tie_tolerance: f64,
    base: LogBase,
) -> Result<TccVerdict, TccError> {
    if candidates.len() < 2 {
        return Err(TccError::TooFewCandidates(candidates.len()));
    }
    if !(tie_tolerance >= 0.0) {
        return Err(TccError::BadTolerance);
    }
    let scheme = candidates[0].scheme.clone();
    if let Some(other) = candidates.iter().find(|c| c.scheme != scheme) {
        return Err(TccError::SchemeMismatch(scheme, other.scheme.clone()));
    }
    let reports = candidates.iter().map(|c| score(c, registry, base)).collect::<Result<Vec<_>, _>>()?;
    let min = reports.iter().map(|r| r.complexity.normalized).fold(f64::INFINITY, f64::min);
    let mut preferred: Vec<String> = reports
        .iter()
        .filter(|r| r.complexity.normalized - min <= tie_tolerance)
        .map(|r| r.id.clone())
        .collect();
    preferred.sort();
    let tie = preferred.len() >= 2;
    Ok(TccVerdict { scheme, reports, preferred, tie })
}

#[derive(Debug, Clone)]
pub struct PairMember {
    pub id: String,
    pub payload: Payload,
    pub gold: Gold,
    /// Value reported for this member in the literature, if any.
    pub expected: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ContrastPair {
    pub id: String,
    pub scheme: String,
    pub members: Vec<PairMember>,
}

impl ContrastPair {
    pub fn validate(&self) -> Result<(), TccError> {
        let bad = |reason: &str| TccError::MalformedPair { pair: self.id.clone(), reason: reason.to_string() };
        if self.members.len() < 2 {
            return Err(bad("needs at least two members"));
        }
        let mut ids: Vec<&str> = self.members.iter().map(|m| m.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(bad(&format!("duplicate member id {}", w[0])));
        }
        let grammatical = self.members.iter().filter(|m| m.gold == Gold::Grammatical).count();
        if grammatical != 1 {
            return Err(bad(&format!("needs exactly one grammatical member, found {grammatical}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberOutcome {
    pub id: String,
    pub gold: Gold,
    pub value: f64,
    pub expected: Option<f64>,
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOutcome {
    pub pair: String,
    pub scheme: String,
    pub members: Vec<MemberOutcome>,
    pub preferred: Vec<String>,
    pub correct: bool,
}

impl PairOutcome {
    pub fn grammatical(&self) -> &MemberOutcome {
        self.members.iter().find(|m| m.gold == Gold::Grammatical).expect("validated pair")
    }

    /// The best-scoring ungrammatical member.
    pub fn ungrammatical(&self) -> &MemberOutcome {
        self.members
            .iter()
            .filter(|m| m.gold == Gold::Ungrammatical)
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("validated pair")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub pairs: Vec<PairOutcome>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

impl CorpusReport {
    pub fn all_correct(&self) -> bool {
        self.correct == self.total
    }
}

/// Scores every pair blind to gold labels, then checks that the grammatical
/// member is the unique preferred one.
pub fn evaluate_corpus(
    pairs: &[ContrastPair],
    registry: &SchemeRegistry,
    tie_tolerance: f64,
    base: LogBase,
) -> Result<CorpusReport, TccError> {
    if pairs.is_empty() {
        return Err(TccError::EmptyCorpus);
    }
    for p in pairs {
        p.validate()?;
    }
    let outcomes = pairs
        .par_iter()
        .map(|p| {
            let cands: Vec<Candidate> = p
                .members
                .iter()
                .map(|m| Candidate { id: m.id.clone(), payload: m.payload.clone(), scheme: p.scheme.clone(), gold: None })
                .collect();
            let v = compare(&cands, registry, tie_tolerance, base)?;
            let members = p
                .members
                .iter()
                .map(|m| {
                    let value = v.value(&m.id).expect("scored");
                    MemberOutcome {
                        id: m.id.clone(),
                        gold: m.gold,
                        value,
                        expected: m.expected,
                        error: m.expected.map(|e| (value - e).abs()),
                    }
                })
                .collect::<Vec<_>>();
            let gram = p.members.iter().find(|m| m.gold == Gold::Grammatical).unwrap();
            let correct = v.preferred == [gram.id.clone()];
            Ok(PairOutcome { pair: p.id.clone(), scheme: p.scheme.clone(), members, preferred: v.preferred, correct })
        })
        .collect::<Result<Vec<_>, TccError>>()?;
    let correct = outcomes.iter().filter(|o| o.correct).count();
    let total = outcomes.len();
    Ok(CorpusReport { pairs: outcomes, correct, total, accuracy: correct as f64 / total as f64 })
}
