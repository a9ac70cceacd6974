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

//! Diagonal-cost evaluation and iterative closed-form reweighting of edge
//! probabilities.
//!
//! The diagonal cost Σ_P α_P²/ζ(P,β) is the variance surrogate; the update
//! derives per-edge targets from the stationarity condition of that cost
//! under per-vertex normalisation and damps toward them. Only weights move;
//! the diagram topology is fixed.

use thiserror::Error;

use crate::dd::{DdError, DecisionDiagram, DiagramBuilder, VertexId};
use crate::pauli::{Hamiltonian, Pauli, PauliString};

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("diagram does not cover term {0} (ζ = 0)")]
    Incompatible(PauliString),
    #[error(transparent)]
    Dd(#[from] DdError),
}

/// Damped-update parameters. `passes` applications of
/// `w ← (1−Δ)·w + Δ·target`, clamped to `floor` and renormalised per vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeConfig {
    pub passes: usize,
    pub delta: f64,
    pub floor: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig { passes: 10, delta: 0.5, floor: 1e-6 }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        if self.passes == 0 {
            return Err(OptimizeError::BadConfig("passes must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(OptimizeError::BadConfig(format!(
                "step size must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.floor >= 0.0 && self.floor < 1.0 / 3.0) {
            return Err(OptimizeError::BadConfig(format!(
                "floor must lie in [0, 1/3), got {}",
                self.floor
            )));
        }
        Ok(())
    }
}

/// Σ_P α_P² / ζ(P,β) over the estimable terms of `h`.
pub fn diagonal_cost(dd: &DecisionDiagram, h: &Hamiltonian) -> Result<f64, OptimizeError> {
    let mut cost = 0.0;
    for (alpha, p) in h.estimated_terms() {
        let zeta = dd.zeta(&p);
        if zeta <= 0.0 {
            return Err(OptimizeError::Incompatible(p));
        }
        cost += alpha * alpha / zeta;
    }
    Ok(cost)
}

/// Per-edge target weights of the closed-form update.
#[derive(Debug, Clone)]
pub struct UpdateTargets {
    /// Indexed like the diagram: `targets[v][k]` pairs with `out_edges(v)[k]`.
    pub targets: Vec<Vec<f64>>,
    /// Vertices whose accumulated mass was zero; their targets were left at
    /// the current weights.
    pub stagnant: Vec<VertexId>,
}

/// For each vertex and out-going label W, the target is proportional to
/// Σ_Q α_Q²/ζ(Q,β)² · m(Q, v, W), where m is the probability mass of bases
/// that cover Q, pass through v, and leave along W. The masses come from one
/// forward and one backward sweep per term, so a full update costs
/// O(|terms| · |diagram|).
pub fn closed_form_update(
    dd: &DecisionDiagram,
    h: &Hamiltonian,
) -> Result<UpdateTargets, OptimizeError> {
    let nv = dd.num_vertices();
    let mut acc: Vec<Vec<f64>> =
        dd.vertex_ids().map(|v| vec![0.0; dd.out_edges(v).len()]).collect();
    let mut fwd = vec![0.0f64; nv];
    let mut bwd = vec![0.0f64; nv];

    for (alpha, q) in h.estimated_terms() {
        let consistent =
            |layer: usize, label: Pauli| q.letter(layer) == Pauli::I || q.letter(layer) == label;

        bwd.iter_mut().for_each(|x| *x = 0.0);
        bwd[dd.terminal().index()] = 1.0;
        for layer in (0..dd.num_qubits()).rev() {
            for &v in dd.layer(layer) {
                bwd[v.index()] = dd
                    .out_edges(v)
                    .iter()
                    .filter(|e| consistent(layer, e.label))
                    .map(|e| e.weight * bwd[e.target.index()])
                    .sum();
            }
        }
        let zeta = bwd[dd.root().index()];
        if zeta <= 0.0 {
            return Err(OptimizeError::Incompatible(q));
        }

        fwd.iter_mut().for_each(|x| *x = 0.0);
        fwd[dd.root().index()] = 1.0;
        for layer in 0..dd.num_qubits() {
            for &v in dd.layer(layer) {
                let f = fwd[v.index()];
                if f == 0.0 {
                    continue;
                }
                for e in dd.out_edges(v) {
                    if consistent(layer, e.label) {
                        fwd[e.target.index()] += f * e.weight;
                    }
                }
            }
        }

        let scale = alpha * alpha / (zeta * zeta);
        for v in dd.vertex_ids() {
            let f = fwd[v.index()];
            if f == 0.0 {
                continue;
            }
            let layer = dd.layer_of(v);
            for (k, e) in dd.out_edges(v).iter().enumerate() {
                if consistent(layer, e.label) {
                    acc[v.index()][k] += scale * f * e.weight * bwd[e.target.index()];
                }
            }
        }
    }

    let mut stagnant = Vec::new();
    for v in dd.vertex_ids() {
        if v == dd.terminal() {
            continue;
        }
        let sum: f64 = acc[v.index()].iter().sum();
        if sum > 0.0 {
            for t in &mut acc[v.index()] {
                *t /= sum;
            }
        } else {
            stagnant.push(v);
            for (t, e) in acc[v.index()].iter_mut().zip(dd.out_edges(v)) {
                *t = e.weight;
            }
        }
    }
    Ok(UpdateTargets { targets: acc, stagnant })
}

/// One damped step toward `targets`; returns the largest absolute weight
/// change.
fn apply_damped(
    dd: &DecisionDiagram,
    targets: &UpdateTargets,
    delta: f64,
    floor: f64,
) -> Result<(DecisionDiagram, f64), OptimizeError> {
    let mut b = DiagramBuilder::from(dd);
    let mut max_change = 0.0f64;
    for v in dd.vertex_ids() {
        if v == dd.terminal() {
            continue;
        }
        let before: Vec<f64> = dd.out_edges(v).iter().map(|e| e.weight).collect();
        {
            let vx = b.vertex_mut(v);
            for (k, e) in vx.out.iter_mut().enumerate() {
                let w = (1.0 - delta) * e.weight + delta * targets.targets[v.index()][k];
                e.weight = w.max(floor);
            }
        }
        b.renormalize_vertex(v)?;
        for (k, e) in b.vertex(v).out.iter().enumerate() {
            max_change = max_change.max((e.weight - before[k]).abs());
        }
    }
    Ok((b.finish()?, max_change))
}

/// Outcome of an optimisation run.
#[derive(Debug, Clone)]
pub struct Optimized {
    pub dd: DecisionDiagram,
    /// Diagonal cost before the first pass and after each pass
    /// (`costs.len() == passes + 1`).
    pub costs: Vec<f64>,
}

/// Runs `cfg.passes` damped closed-form updates. Topology is unchanged,
/// compatibility is preserved (the floor keeps every used edge alive).
pub fn optimize(
    dd: &DecisionDiagram,
    h: &Hamiltonian,
    cfg: &OptimizeConfig,
) -> Result<Optimized, OptimizeError> {
    cfg.validate()?;
    let mut current = dd.clone();
    let mut costs = vec![diagonal_cost(&current, h)?];
    for _ in 0..cfg.passes {
        let targets = closed_form_update(&current, h)?;
        let (next, _) = apply_damped(&current, &targets, cfg.delta, cfg.floor)?;
        costs.push(diagonal_cost(&next, h)?);
        current = next;
    }
    Ok(Optimized { dd: current, costs })
}

/// Like [`optimize`] but iterates to convergence: stops when the largest
/// weight change in a pass falls below `tol` or after `max_passes`. Returns
/// the iterate and whether it converged. Used with `floor = 0` where letters
/// are allowed to die out (per-qubit product distributions).
pub fn optimize_to_convergence(
    dd: &DecisionDiagram,
    h: &Hamiltonian,
    delta: f64,
    floor: f64,
    max_passes: usize,
    tol: f64,
) -> Result<(Optimized, bool), OptimizeError> {
    let mut current = dd.clone();
    let mut costs = vec![diagonal_cost(&current, h)?];
    for _ in 0..max_passes {
        let targets = closed_form_update(&current, h)?;
        let (next, change) = apply_damped(&current, &targets, delta, floor)?;
        costs.push(diagonal_cost(&next, h)?);
        current = next;
        if change < tol {
            return Ok((Optimized { dd: current, costs }, true));
        }
    }
    Ok((Optimized { dd: current, costs }, false))
}
