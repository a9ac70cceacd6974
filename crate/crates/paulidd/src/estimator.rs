// Copyright 2026 the paulidd developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! The randomised shallow-measurement estimator: per-shot energy estimates,
//! the streaming estimate table, exact first/second moments and variance,
//! and confidence bounds on the required shot count.
//!
//! Everything is generic over a [`CoverageModel`], which answers "with what
//! probability does a drawn basis let me estimate P (and Q jointly)". A
//! decision diagram covers terms through every path in their lift; a classic
//! grouping covers each term only through its own group's basis.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::baselines::Grouping;
use crate::dd::DecisionDiagram;
use crate::pauli::{Hamiltonian, PauliError, PauliString, Phase};
use crate::simulator::{expectation, SimulatorError, StateVector};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("term {0} has zero covering probability")]
    ZeroZeta(PauliString),
    #[error("state norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error("{name} must lie in (0, 1), got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
}

/// One prepared-and-measured shot: the chosen basis and the per-qubit ±1
/// eigenvalue readouts.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    basis: PauliString,
    outcomes: Vec<i8>,
}

impl ShotRecord {
    pub fn new(basis: PauliString, outcomes: Vec<i8>) -> ShotRecord {
        assert_eq!(basis.len(), outcomes.len(), "one outcome per qubit");
        debug_assert!(outcomes.iter().all(|&o| o == 1 || o == -1));
        ShotRecord { basis, outcomes }
    }

    pub fn basis(&self) -> &PauliString {
        &self.basis
    }

    pub fn outcomes(&self) -> &[i8] {
        &self.outcomes
    }

    /// Product of outcomes over a set of qubits; empty product is +1.
    pub fn product_over(&self, qubits: impl Iterator<Item = usize>) -> i8 {
        qubits.fold(1i8, |acc, i| acc * self.outcomes[i])
    }
}

/// Coverage probabilities of a basis-selection scheme.
pub trait CoverageModel {
    /// Probability that a drawn basis allows estimating `p`.
    fn zeta(&self, p: &PauliString) -> f64;
    /// Probability that a single drawn basis allows estimating both words.
    fn joint(&self, p: &PauliString, q: &PauliString) -> f64;
}

impl CoverageModel for DecisionDiagram {
    fn zeta(&self, p: &PauliString) -> f64 {
        DecisionDiagram::zeta(self, p)
    }

    fn joint(&self, p: &PauliString, q: &PauliString) -> f64 {
        match p.join(q) {
            Ok(j) => DecisionDiagram::zeta(self, &j),
            Err(_) => 0.0,
        }
    }
}

/// Classic grouped scheme: group k is drawn with its ℓ1 sampling weight and
/// estimates exactly its own members. Doubles as sampler and estimator for
/// simulated runs.
#[derive(Debug, Clone)]
pub struct GroupedScheme {
    weights: Vec<f64>,
    bases: Vec<PauliString>,
    members: Vec<Vec<(f64, PauliString)>>,
    group_of: HashMap<PauliString, usize>,
}

impl GroupedScheme {
    pub fn new(grouping: &Grouping, h: &Hamiltonian) -> GroupedScheme {
        let weights = grouping.sampling_weights(h);
        let mut group_of = HashMap::new();
        let mut members = Vec::with_capacity(grouping.groups.len());
        let mut bases = Vec::with_capacity(grouping.groups.len());
        for (k, g) in grouping.groups.iter().enumerate() {
            let mut mem = Vec::with_capacity(g.members.len());
            for &i in &g.members {
                let (alpha, p) = h.terms()[i];
                mem.push((alpha, p));
                group_of.entry(p).or_insert(k);
            }
            members.push(mem);
            bases.push(grouping.full_basis(k));
        }
        GroupedScheme { weights, bases, members, group_of }
    }

    pub fn num_groups(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn basis(&self, k: usize) -> &PauliString {
        &self.bases[k]
    }

    pub fn members(&self, k: usize) -> &[(f64, PauliString)] {
        &self.members[k]
    }

    pub fn sample_group<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        for (k, w) in self.weights.iter().enumerate() {
            acc += w;
            if draw < acc {
                return k;
            }
        }
        self.weights.len() - 1
    }

    /// Single-shot energy estimate when group `k` was drawn.
    pub fn single_shot_estimate(&self, k: usize, shot: &ShotRecord) -> f64 {
        self.members[k]
            .iter()
            .map(|(alpha, p)| {
                alpha * shot.product_over(p.support()) as f64 / self.weights[k]
            })
            .sum()
    }
}

impl CoverageModel for GroupedScheme {
    fn zeta(&self, p: &PauliString) -> f64 {
        self.group_of.get(p).map_or(0.0, |&k| self.weights[k])
    }

    fn joint(&self, p: &PauliString, q: &PauliString) -> f64 {
        match (self.group_of.get(p), self.group_of.get(q)) {
            (Some(&a), Some(&b)) if a == b => self.weights[a],
            _ => 0.0,
        }
    }
}

/// Precomputed per-term coverage for repeated shot evaluation. Construction
/// fails if any estimable term is uncovered, which is exactly the condition
/// for the estimator to be unbiased.
#[derive(Debug, Clone)]
pub struct ShotEstimator {
    terms: Vec<(f64, PauliString, f64)>,
}

impl ShotEstimator {
    pub fn new(h: &Hamiltonian, cov: &impl CoverageModel) -> Result<ShotEstimator, EstimatorError> {
        let mut terms = Vec::new();
        for (alpha, p) in h.estimated_terms() {
            let zeta = cov.zeta(&p);
            if zeta <= 0.0 {
                return Err(EstimatorError::ZeroZeta(p));
            }
            terms.push((alpha, p, zeta));
        }
        Ok(ShotEstimator { terms })
    }

    /// ν = Σ_P α_P · 1[B covers P]/ζ(P) · μ(B, supp P).
    pub fn estimate(&self, shot: &ShotRecord) -> f64 {
        let mut nu = 0.0;
        for (alpha, p, zeta) in &self.terms {
            if shot.basis().covers(p).unwrap_or(false) {
                nu += alpha * shot.product_over(p.support()) as f64 / zeta;
            }
        }
        nu
    }
}

/// Single-shot estimate against a diagram; excludes the identity term (add
/// the identity coefficient back as a constant offset in reported energies).
pub fn single_shot_estimate(
    h: &Hamiltonian,
    dd: &DecisionDiagram,
    shot: &ShotRecord,
) -> Result<f64, EstimatorError> {
    Ok(ShotEstimator::new(h, dd)?.estimate(shot))
}

/// Streaming per-term running means: for each estimable term, the number of
/// shots whose basis covered it and the running mean of the outcome
/// products.
#[derive(Debug, Clone)]
pub struct EstimateTable {
    entries: Vec<TableEntry>,
}

#[derive(Debug, Clone)]
pub struct TableEntry {
    pub alpha: f64,
    pub pattern: PauliString,
    pub hits: u64,
    pub mean: f64,
}

impl EstimateTable {
    pub fn new(h: &Hamiltonian) -> EstimateTable {
        let entries = h
            .estimated_terms()
            .map(|(alpha, pattern)| TableEntry { alpha, pattern, hits: 0, mean: 0.0 })
            .collect();
        EstimateTable { entries }
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    /// Lift-coverage update: every term covered by the shot's basis folds the
    /// outcome product into its running mean.
    pub fn update(&mut self, shot: &ShotRecord) {
        self.update_where(shot, |p| shot.basis().covers(p).unwrap_or(false));
    }

    /// Update restricted to terms selected by `covered` (used by grouped
    /// schemes, where only the drawn group's members count as estimated).
    pub fn update_where(&mut self, shot: &ShotRecord, covered: impl Fn(&PauliString) -> bool) {
        for e in &mut self.entries {
            if covered(&e.pattern) {
                let mu = shot.product_over(e.pattern.support()) as f64;
                e.mean = (mu + e.hits as f64 * e.mean) / (e.hits as f64 + 1.0);
                e.hits += 1;
            }
        }
    }

    /// Σ α_P μ_P over the table; terms never covered contribute zero.
    pub fn estimate(&self) -> f64 {
        self.entries.iter().map(|e| e.alpha * e.mean).sum()
    }

    pub fn uncovered(&self) -> Vec<PauliString> {
        self.entries.iter().filter(|e| e.hits == 0).map(|e| e.pattern).collect()
    }
}

/// Normalised joint-coverage factor g(P,Q) = joint(P,Q) / (ζ(P)·ζ(Q)).
pub fn g_factor(
    p: &PauliString,
    q: &PauliString,
    cov: &impl CoverageModel,
) -> Result<f64, EstimatorError> {
    let zp = cov.zeta(p);
    if zp <= 0.0 {
        return Err(EstimatorError::ZeroZeta(*p));
    }
    let zq = cov.zeta(q);
    if zq <= 0.0 {
        return Err(EstimatorError::ZeroZeta(*q));
    }
    Ok(cov.joint(p, q) / (zp * zq))
}

/// Exact estimator variance over `shots` preparations:
/// (Σ_{P,Q} α_P α_Q g(P,Q) Tr(PQρ) − Tr(H'ρ)²) / S, with the identity term
/// excluded from H' consistently with the estimator. Tiny negative results
/// from rounding are clamped to zero.
pub fn exact_variance(
    h: &Hamiltonian,
    cov: &impl CoverageModel,
    state: &StateVector,
    shots: u64,
) -> Result<f64, EstimatorError> {
    if shots == 0 {
        return Err(EstimatorError::ZeroShots);
    }
    let norm2: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(EstimatorError::NotNormalized((norm2 - 1.0).abs()));
    }
    let mut terms = Vec::new();
    for (alpha, p) in h.estimated_terms() {
        let zeta = cov.zeta(&p);
        if zeta <= 0.0 {
            return Err(EstimatorError::ZeroZeta(p));
        }
        terms.push((alpha, p, zeta));
    }
    let mut energy = 0.0;
    for (alpha, p, _) in &terms {
        energy += alpha * expectation(state, p)?;
    }
    let mut second_moment = 0.0;
    let mut imag_acc = 0.0;
    let mut exp_cache: HashMap<PauliString, f64> = HashMap::new();
    for (ap, p, zp) in &terms {
        for (aq, q, zq) in &terms {
            let joint = cov.joint(p, q);
            if joint == 0.0 {
                continue;
            }
            let g = joint / (zp * zq);
            let prod = p.product(q)?;
            let r_exp = match exp_cache.get(&prod.pauli) {
                Some(&v) => v,
                None => {
                    let v = expectation(state, &prod.pauli)?;
                    exp_cache.insert(prod.pauli, v);
                    v
                }
            };
            // Tr(PQρ) = phase · ⟨R⟩ with ⟨R⟩ real.
            match prod.phase {
                Phase::PlusOne => second_moment += ap * aq * g * r_exp,
                Phase::MinusOne => second_moment -= ap * aq * g * r_exp,
                Phase::PlusI => imag_acc += ap * aq * g * r_exp,
                Phase::MinusI => imag_acc -= ap * aq * g * r_exp,
            }
        }
    }
    // The double sum is symmetric, so imaginary parts cancel pairwise.
    debug_assert!(imag_acc.abs() <= 1e-9, "imaginary residue {imag_acc}");
    let variance = (second_moment - energy * energy) / shots as f64;
    if variance < 0.0 && variance >= -1e-9 {
        return Ok(0.0);
    }
    Ok(variance)
}

/// 1 − exp(−ε²/2), computed without cancellation for small ε.
fn eta(epsilon: f64) -> f64 {
    -f64::exp_m1(-epsilon * epsilon / 2.0)
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<(), EstimatorError> {
    if !(value > 0.0 && value < 1.0) {
        return Err(EstimatorError::BadParameter { name, value });
    }
    Ok(())
}

/// Upper bound on the probability that any term's estimate from the given
/// basis list errs by more than ε:
/// 2 Σ_l Π_m (1 − η·1[B_m covers P_l]) with η = 1 − exp(−ε²/2).
pub fn inconfidence_bound(
    terms: &[PauliString],
    bases: &[PauliString],
    epsilon: f64,
) -> Result<f64, EstimatorError> {
    check_unit_interval("epsilon", epsilon)?;
    let eta = eta(epsilon);
    let mut bound = 0.0;
    for p in terms {
        let mut covered = 0i32;
        for b in bases {
            if b.covers(p)? {
                covered += 1;
            }
        }
        bound += (1.0 - eta).powi(covered);
    }
    Ok(2.0 * bound)
}

/// Shot count guaranteeing ε-accurate estimates of every term with
/// confidence 1−δ under the scheme's coverage.
#[derive(Debug, Clone, PartialEq)]
pub enum ShotsBound {
    Finite {
        /// ⌈raw⌉, the usable shot count.
        shots: u64,
        /// ln(2L/δ)/η · max_l 1/ζ_l before rounding.
        raw: f64,
    },
    /// Some terms have ζ = 0; no shot count suffices.
    Unbounded { uncovered: Vec<PauliString> },
}

pub fn shots_bound(
    terms: &[PauliString],
    cov: &impl CoverageModel,
    epsilon: f64,
    delta: f64,
) -> Result<ShotsBound, EstimatorError> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let uncovered: Vec<PauliString> =
        terms.iter().filter(|p| cov.zeta(p) <= 0.0).copied().collect();
    if !uncovered.is_empty() {
        return Ok(ShotsBound::Unbounded { uncovered });
    }
    let min_zeta = terms.iter().map(|p| cov.zeta(p)).fold(f64::INFINITY, f64::min);
    let l = terms.len() as f64;
    let raw = (2.0 * l / delta).ln() / eta(epsilon) / min_zeta;
    Ok(ShotsBound::Finite { shots: raw.ceil() as u64, raw })
}
