//! Free-energy quantities on discrete models, in nats.
//!
//! `0 · ln 0` is taken as 0. A divergence whose reference puts zero mass
//! where the other distribution does not is an error, never infinity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const NORM_TOL: f64 = 1e-12;
const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FepError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("support sizes differ: {0} vs {1}")]
    SupportMismatch(usize, usize),
    #[error("reference has zero mass at index {0} where the other distribution does not")]
    AbsoluteContinuity(usize),
    #[error("outcome {0} has zero probability under the model")]
    ZeroEvidence(usize),
    #[error("outcome index {index} out of range ({outcomes} outcomes)")]
    OutcomeIndex { index: usize, outcomes: usize },
    #[error("likelihood must have one row per state ({states}), got {rows}")]
    LikelihoodShape { states: usize, rows: usize },
    #[error("supplied posterior for outcome {outcome} is not the Bayes posterior (off by {gap:e})")]
    Inconsistent { outcome: usize, gap: f64 },
    #[error("policy has no time steps")]
    EmptyPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, FepError> {
        if probs.is_empty() {
            return Err(FepError::InvalidDistribution("empty support".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(FepError::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > NORM_TOL {
            return Err(FepError::InvalidDistribution(format!("sums to {s}")));
        }
        Ok(Distribution(probs))
    }

    pub fn uniform(k: usize) -> Result<Self, FepError> {
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = FepError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Distribution::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.0
    }
}

fn xlogy_ratio(q: f64, p: f64, index: usize) -> Result<f64, FepError> {
    if q == 0.0 {
        Ok(0.0)
    } else if p == 0.0 {
        Err(FepError::AbsoluteContinuity(index))
    } else {
        Ok(q * (q / p).ln())
    }
}

fn kl_raw(q: &[f64], p: &[f64]) -> Result<f64, FepError> {
    if q.len() != p.len() {
        return Err(FepError::SupportMismatch(q.len(), p.len()));
    }
    let mut acc = 0.0;
    for (i, (a, b)) in q.iter().zip(p).enumerate() {
        acc += xlogy_ratio(*a, *b, i)?;
    }
    Ok(acc.max(0.0))
}

/// `D_KL[q ‖ p] = Σ q ln(q/p)`.
pub fn kl_divergence(q: &Distribution, p: &Distribution) -> Result<f64, FepError> {
    kl_raw(&q.0, &p.0)
}

/// How far beliefs moved: `D_KL[posterior ‖ prior]`.
pub fn belief_update_complexity(prior: &Distribution, posterior: &Distribution) -> Result<f64, FepError> {
    kl_divergence(posterior, prior)
}

fn check_rows(rows: &[Vec<f64>], states: usize) -> Result<usize, FepError> {
    if rows.len() != states {
        return Err(FepError::LikelihoodShape { states, rows: rows.len() });
    }
    let width = rows[0].len();
    for r in rows {
        if r.len() != width {
            return Err(FepError::InvalidDistribution("likelihood rows differ in length".into()));
        }
        Distribution::new(r.clone())?;
    }
    Ok(width)
}

/// Prior over states and a row-stochastic likelihood `P(o | s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerativeModel {
    pub prior: Distribution,
    pub likelihood: Vec<Vec<f64>>,
}

impl GenerativeModel {
    pub fn new(prior: Distribution, likelihood: Vec<Vec<f64>>) -> Result<Self, FepError> {
        check_rows(&likelihood, prior.len())?;
        Ok(GenerativeModel { prior, likelihood })
    }

    pub fn outcomes(&self) -> usize {
        self.likelihood.first().map_or(0, Vec::len)
    }

    fn column(&self, o: usize) -> Result<Vec<f64>, FepError> {
        check_rows(&self.likelihood, self.prior.len())?;
        if o >= self.outcomes() {
            return Err(FepError::OutcomeIndex { index: o, outcomes: self.outcomes() });
        }
        Ok(self.likelihood.iter().map(|row| row[o]).collect())
    }

    /// `P(o) = Σ_s P(s) P(o|s)`.
    pub fn evidence(&self, o: usize) -> Result<f64, FepError> {
        let col = self.column(o)?;
        Ok(self.prior.0.iter().zip(&col).map(|(p, l)| p * l).sum())
    }

    /// Exact posterior `P(s | o)`.
    pub fn posterior(&self, o: usize) -> Result<Vec<f64>, FepError> {
        let col = self.column(o)?;
        let z = self.evidence(o)?;
        if z <= 0.0 {
            return Err(FepError::ZeroEvidence(o));
        }
        Ok(self.prior.0.iter().zip(&col).map(|(p, l)| p * l / z).collect())
    }
}

/// The same free energy written four ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decompositions {
    /// `E_Q[ln Q(s) − ln P(o|s) − ln P(s)]`
    pub energy: f64,
    /// `E_Q[ln Q(s) − ln P(s|o) − ln P(o)]`
    pub posterior: f64,
    /// `D_KL[Q(s) ‖ P(s|o)] − ln P(o)`
    pub divergence_minus_evidence: f64,
    /// `D_KL[Q(s) ‖ P(s)] − E_Q[ln P(o|s)]`
    pub complexity_minus_accuracy: f64,
    pub complexity: f64,
    pub accuracy: f64,
    pub log_evidence: f64,
    pub divergence: f64,
}

impl Decompositions {
    pub fn max_residual(&self) -> f64 {
        let v = [self.energy, self.posterior, self.divergence_minus_evidence, self.complexity_minus_accuracy];
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// `F = −ln P(o) + D_KL[Q(s) ‖ P(s|o)]`.
pub fn variational_free_energy(model: &GenerativeModel, q: &Distribution, o: usize) -> Result<f64, FepError> {
    let post = model.posterior(o)?;
    let z = model.evidence(o)?;
    Ok(-z.ln() + kl_raw(&q.0, &post)?)
}

pub fn free_energy_decompositions(
    model: &GenerativeModel,
    q: &Distribution,
    o: usize,
) -> Result<Decompositions, FepError> {
    if q.len() != model.prior.len() {
        return Err(FepError::SupportMismatch(q.len(), model.prior.len()));
    }
    let col = model.column(o)?;
    let post = model.posterior(o)?;
    let z = model.evidence(o)?;
    let log_evidence = z.ln();
    let divergence = kl_raw(&q.0, &post)?;
    let complexity = kl_raw(&q.0, &model.prior.0)?;
    let mut accuracy = 0.0;
    let mut energy = 0.0;
    let mut posterior_form = 0.0;
    for (s, &qs) in q.0.iter().enumerate() {
        if qs == 0.0 {
            continue;
        }
        // q(s) > 0 implies posterior(s) > 0 (checked above), hence prior and
        // likelihood are positive too.
        let (ls, ps) = (col[s].ln(), model.prior.0[s].ln());
        accuracy += qs * ls;
        energy += qs * (qs.ln() - ls - ps);
        posterior_form += qs * (qs.ln() - post[s].ln() - log_evidence);
    }
    Ok(Decompositions {
        energy,
        posterior: posterior_form,
        divergence_minus_evidence: divergence - log_evidence,
        complexity_minus_accuracy: complexity - accuracy,
        complexity,
        accuracy,
        log_evidence,
        divergence,
    })
}

/// One time step of a policy: predicted states `Q(s|π)`, the likelihood,
/// preferred outcomes `P(o)`, and optionally the posteriors `Q(s|o,π)` for
/// each outcome (checked against Bayes' rule when given).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyStep {
    pub state_prior: Distribution,
    pub likelihood: Vec<Vec<f64>>,
    pub outcome_prior: Distribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posteriors: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfeStep {
    #[serde(rename = "G")]
    pub g: f64,
    pub epistemic: f64,
    pub extrinsic: f64,
    pub mutual_information: f64,
    pub expected_divergence: f64,
    pub predicted_outcomes: Vec<f64>,
}

impl EfeStep {
    pub fn identity_residual(&self) -> f64 {
        (self.epistemic - self.mutual_information)
            .abs()
            .max((self.epistemic - self.expected_divergence).abs())
    }
}

/// `G(π, τ) = −epistemic − extrinsic`, with epistemic value computed as
/// `E_Q[ln Q(s|o,π) − ln Q(s|π)]`; the mutual information `I(s; o)` and the
/// expected posterior–prior divergence are computed independently.
pub fn expected_free_energy(step: &PolicyStep) -> Result<EfeStep, FepError> {
    let qs = &step.state_prior.0;
    let width = check_rows(&step.likelihood, qs.len())?;
    if step.outcome_prior.len() != width {
        return Err(FepError::SupportMismatch(step.outcome_prior.len(), width));
    }
    let qo: Vec<f64> = (0..width)
        .map(|o| qs.iter().zip(&step.likelihood).map(|(q, row)| q * row[o]).sum())
        .collect();
    let bayes: Vec<Vec<f64>> = (0..width)
        .map(|o| {
            if qo[o] > 0.0 {
                qs.iter().zip(&step.likelihood).map(|(q, row)| q * row[o] / qo[o]).collect()
            } else {
                vec![0.0; qs.len()]
            }
        })
        .collect();
    let post = match &step.posteriors {
        None => bayes,
        Some(given) => {
            if given.len() != width {
                return Err(FepError::SupportMismatch(given.len(), width));
            }
            for (o, (g, b)) in given.iter().zip(&bayes).enumerate() {
                if qo[o] == 0.0 {
                    continue;
                }
                if g.len() != b.len() {
                    return Err(FepError::SupportMismatch(g.len(), b.len()));
                }
                let gap = g.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                if gap > CONSISTENCY_TOL {
                    return Err(FepError::Inconsistent { outcome: o, gap });
                }
            }
            given.clone()
        }
    };

    let mut epistemic = 0.0;
    for (s, &q) in qs.iter().enumerate() {
        for (o, row) in post.iter().enumerate() {
            let joint = q * step.likelihood[s][o];
            if joint > 0.0 {
                epistemic += joint * (row[s].ln() - q.ln());
            }
        }
    }
    let mut mutual_information = 0.0;
    for (s, &q) in qs.iter().enumerate() {
        for o in 0..width {
            let l = step.likelihood[s][o];
            if q > 0.0 && l > 0.0 {
                mutual_information += q * l * (l / qo[o]).ln();
            }
        }
    }
    let mut expected_divergence = 0.0;
    for o in 0..width {
        if qo[o] > 0.0 {
            expected_divergence += qo[o] * kl_raw(&post[o], qs)?;
        }
    }
    let mut extrinsic = 0.0;
    for (o, &p) in step.outcome_prior.0.iter().enumerate() {
        if qo[o] > 0.0 {
            if p == 0.0 {
                return Err(FepError::AbsoluteContinuity(o));
            }
            extrinsic += qo[o] * p.ln();
        }
    }
    Ok(EfeStep {
        g: -epistemic - extrinsic,
        epistemic,
        extrinsic,
        mutual_information,
        expected_divergence,
        predicted_outcomes: qo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfeReport {
    #[serde(rename = "G")]
    pub g: f64,
    pub steps: Vec<EfeStep>,
}

/// `G(π) = Σ_τ G(π, τ)`.
pub fn policy_free_energy(policy: &[PolicyStep]) -> Result<EfeReport, FepError> {
    if policy.is_empty() {
        return Err(FepError::EmptyPolicy);
    }
    let steps = policy.iter().map(expected_free_energy).collect::<Result<Vec<_>, _>>()?;
    Ok(EfeReport { g: steps.iter().map(|s| s.g).sum(), steps })
}

/// Model file for `kl`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlModel {
    pub q: Distribution,
    pub p: Distribution,
}

/// Model file for `vfe`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VfeModel {
    pub prior: Distribution,
    pub likelihood: Vec<Vec<f64>>,
    pub q: Distribution,
    pub outcome: usize,
}

/// Model file for `efe`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfeModel {
    pub policy: Vec<PolicyStep>,
}
