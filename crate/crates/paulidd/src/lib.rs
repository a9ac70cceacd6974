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

//! Probability-carrying decision diagrams over Pauli measurement bases.
//!
//! Estimating `Tr(Hρ)` for a qubit Hamiltonian `H = Σ α_P P` with only
//! single-qubit (shallow-circuit) measurements amounts to choosing a
//! probability distribution β over full-weight Pauli words and averaging
//! reweighted single-shot readouts. This crate represents β as a rooted
//! layered DAG whose edges carry Pauli labels and probabilities:
//!
//! * [`pauli`] — Pauli words, Hamiltonians, and phase-correct products;
//! * [`dd`] — the diagram type, its construction pipeline from a
//!   Hamiltonian, random-walk sampling, and the covering probability ζ;
//! * [`baselines`] — largest-degree-first Pauli grouping and per-qubit
//!   product distributions, both materialised as diagrams;
//! * [`optimize`] — diagonal-cost evaluation and iterative closed-form
//!   reweighting of edge probabilities;
//! * [`estimator`] — single-shot estimates, streaming estimate tables,
//!   exact variance, and confidence bounds;
//! * [`simulator`] — a small statevector backend for ground states and
//!   simulated measurement outcomes.

pub mod baselines;
pub mod dd;
pub mod estimator;
pub mod optimize;
pub mod pauli;
pub mod simulator;

/// Bundled 4-qubit hydrogen-molecule Hamiltonians in the text format.
pub mod fixtures {
    /// Bravyi-Kitaev encoding, 15 terms. The Parity encoding coincides with
    /// this one at 4 qubits.
    pub const H2_BK: &str = include_str!("../fixtures/h2_bk.txt");
    /// Jordan-Wigner encoding, 15 terms.
    pub const H2_JW: &str = include_str!("../fixtures/h2_jw.txt");
}
