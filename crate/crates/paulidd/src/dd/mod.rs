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

//! The decision-diagram data structure: a rooted layered DAG whose edges
//! carry Pauli labels and probabilistic weights. Maximal root-to-terminal
//! paths are full-weight measurement bases; the product of edge weights along
//! a path is that basis's sampling probability β(B).

mod build;
mod serialize;
#[cfg(test)]
pub(crate) mod tests_support;

pub use build::{
    build, build_from_reduced, build_initial, merge_equivalent, normalize, preprocess,
    remove_identities, ReducedPauliList,
};
pub use serialize::{deserialize, export_dot, serialize};

use rand::Rng;
use thiserror::Error;

use crate::pauli::{Hamiltonian, Pauli, PauliString};

/// Out-going weights at a vertex must sum to 1 within this slack.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Index of a vertex inside its diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A labeled, weighted edge. `virtual_edge` marks edges created by splitting
/// an identity edge during construction; they behave like ordinary edges
/// everywhere downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub label: Pauli,
    pub weight: f64,
    pub target: VertexId,
    pub virtual_edge: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Vertex {
    pub layer: usize,
    pub out: Vec<Edge>,
}

impl Vertex {
    pub(crate) fn edge_with_label(&self, label: Pauli) -> Option<&Edge> {
        self.out.iter().find(|e| e.label == label)
    }

    fn sort_edges(&mut self) {
        self.out.sort_by_key(|e| e.label);
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DdError {
    #[error("hamiltonian has no estimable terms after removing the identity")]
    NothingToEstimate,
    #[error("vertex {vertex} has out-going weight sum {sum} (must be positive)")]
    ZeroWeightSum { vertex: VertexId, sum: f64 },
    #[error("path count exceeds 64 bits")]
    PathCountOverflow,
    #[error("vertex {vertex}: out-going weights sum to {sum}, expected 1")]
    NotNormalized { vertex: VertexId, sum: f64 },
    #[error("vertex {vertex} has two out-going edges labeled {label}")]
    DuplicateLabel { vertex: VertexId, label: Pauli },
    #[error("vertex {vertex} carries an identity-labeled edge")]
    IdentityEdge { vertex: VertexId },
    #[error("edge {vertex} -> {target} skips layers ({from_layer} -> {to_layer})")]
    BadLayering { vertex: VertexId, target: VertexId, from_layer: usize, to_layer: usize },
    #[error("edge weight {weight} at vertex {vertex} is outside (0, 1]")]
    WeightOutOfRange { vertex: VertexId, weight: f64 },
    #[error("vertex {vertex} is unreachable from the root")]
    Unreachable { vertex: VertexId },
    #[error("non-terminal vertex {vertex} has no out-going edge")]
    DeadEnd { vertex: VertexId },
    #[error("expected exactly one terminal vertex at layer {expected}")]
    BadTerminal { expected: usize },
    #[error("grouping has a group whose members admit no common cover")]
    NoCommonCover,
    #[error("invalid reduced list: {reason}")]
    BadReducedList { reason: String },
    #[error("serialized diagram, line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Vertex/edge/path tallies, as reported for built diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DdMetrics {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub path_count: u64,
}

/// Rooted layered DAG with Pauli-labeled probabilistic edges.
///
/// Construction goes through [`build`] (or the lower-level pipeline stages);
/// a finished diagram is immutable and satisfies: exactly one root (layer 0)
/// and one terminal (layer `n`), every edge advances one layer, at most one
/// out-edge per label, per-vertex weights sum to 1, and no identity labels.
#[derive(Debug, Clone)]
pub struct DecisionDiagram {
    n: usize,
    vertices: Vec<Vertex>,
    root: VertexId,
    terminal: VertexId,
    /// Vertex ids grouped by layer, root first.
    layers: Vec<Vec<VertexId>>,
}

impl DecisionDiagram {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn terminal(&self) -> VertexId {
        self.terminal
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.vertices.iter().map(|v| v.out.len()).sum()
    }

    pub fn layer_of(&self, v: VertexId) -> usize {
        self.vertices[v.index()].layer
    }

    pub fn out_edges(&self, v: VertexId) -> &[Edge] {
        &self.vertices[v.index()].out
    }

    /// Vertex ids at the given layer (0 = root layer, n = terminal layer).
    pub fn layer(&self, layer: usize) -> &[VertexId] {
        &self.layers[layer]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    /// Probability that a random walk emits exactly the full-weight word `b`,
    /// i.e. β(b). Identity letters in `b` sum over all branches, which makes
    /// this the covering probability ζ(b, β) in general.
    pub fn zeta(&self, p: &PauliString) -> f64 {
        assert_eq!(p.len(), self.n, "pattern length must match diagram");
        // One value per vertex, filled terminal-upward; each vertex sits at a
        // fixed layer so a flat memo suffices and the cost is linear in the
        // diagram size.
        let mut val = vec![0.0f64; self.vertices.len()];
        val[self.terminal.index()] = 1.0;
        for layer in (0..self.n).rev() {
            let want = p.letter(layer);
            for &v in &self.layers[layer] {
                let vx = &self.vertices[v.index()];
                val[v.index()] = if want == Pauli::I {
                    vx.out.iter().map(|e| e.weight * val[e.target.index()]).sum()
                } else {
                    vx.edge_with_label(want)
                        .map(|e| e.weight * val[e.target.index()])
                        .unwrap_or(0.0)
                };
            }
        }
        val[self.root.index()]
    }

    /// True iff every estimable term of `h` has positive covering probability.
    pub fn is_compatible(&self, h: &Hamiltonian) -> bool {
        h.estimated_terms().all(|(_, p)| self.zeta(&p) > 0.0)
    }

    /// Terms of `h` that no path covers.
    pub fn uncovered_terms(&self, h: &Hamiltonian) -> Vec<PauliString> {
        h.estimated_terms().filter(|(_, p)| self.zeta(p) == 0.0).map(|(_, p)| p).collect()
    }

    /// Root-to-terminal random walk; picks each out-edge with probability
    /// equal to its weight and returns the concatenated labels.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        let mut letters = Vec::with_capacity(self.n);
        let mut v = self.root;
        while v != self.terminal {
            let edges = &self.vertices[v.index()].out;
            let draw: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = edges.len() - 1;
            for (i, e) in edges.iter().enumerate() {
                acc += e.weight;
                if draw < acc {
                    chosen = i;
                    break;
                }
            }
            letters.push(edges[chosen].label);
            v = edges[chosen].target;
        }
        PauliString::from_letters(&letters).expect("diagram emits full-length words")
    }

    pub fn metrics(&self) -> Result<DdMetrics, DdError> {
        let mut count = vec![0u64; self.vertices.len()];
        count[self.terminal.index()] = 1;
        for layer in (0..self.n).rev() {
            for &v in &self.layers[layer] {
                let mut total = 0u64;
                for e in &self.vertices[v.index()].out {
                    total = total
                        .checked_add(count[e.target.index()])
                        .ok_or(DdError::PathCountOverflow)?;
                }
                count[v.index()] = total;
            }
        }
        Ok(DdMetrics {
            vertex_count: self.num_vertices(),
            edge_count: self.num_edges(),
            path_count: count[self.root.index()],
        })
    }

    /// Checks every structural invariant of a finished diagram.
    pub fn validate(&self) -> Result<(), DdError> {
        if self.layers.len() != self.n + 1
            || self.layers[self.n].len() != 1
            || self.layers[self.n][0] != self.terminal
            || self.layers[0] != [self.root]
        {
            return Err(DdError::BadTerminal { expected: self.n });
        }
        if !self.vertices[self.terminal.index()].out.is_empty() {
            return Err(DdError::BadTerminal { expected: self.n });
        }
        let mut reach = vec![false; self.vertices.len()];
        reach[self.root.index()] = true;
        for layer in 0..self.n {
            for &v in &self.layers[layer] {
                let vx = &self.vertices[v.index()];
                if vx.out.is_empty() {
                    return Err(DdError::DeadEnd { vertex: v });
                }
                let mut sum = 0.0;
                let mut seen: Vec<Pauli> = Vec::with_capacity(vx.out.len());
                for e in &vx.out {
                    if e.label == Pauli::I {
                        return Err(DdError::IdentityEdge { vertex: v });
                    }
                    if seen.contains(&e.label) {
                        return Err(DdError::DuplicateLabel { vertex: v, label: e.label });
                    }
                    seen.push(e.label);
                    if !(e.weight > 0.0 && e.weight <= 1.0) {
                        return Err(DdError::WeightOutOfRange { vertex: v, weight: e.weight });
                    }
                    let tl = self.vertices[e.target.index()].layer;
                    if tl != vx.layer + 1 {
                        return Err(DdError::BadLayering {
                            vertex: v,
                            target: e.target,
                            from_layer: vx.layer,
                            to_layer: tl,
                        });
                    }
                    if reach[v.index()] {
                        reach[e.target.index()] = true;
                    }
                    sum += e.weight;
                }
                if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(DdError::NotNormalized { vertex: v, sum });
                }
            }
        }
        if let Some(v) = (0..self.vertices.len()).find(|&i| !reach[i]) {
            return Err(DdError::Unreachable { vertex: VertexId(v as u32) });
        }
        Ok(())
    }
}

/// Mutable graph used by the construction passes; `finish` compacts it into
/// a canonical, validated [`DecisionDiagram`].
#[derive(Debug, Clone)]
pub(crate) struct DiagramBuilder {
    pub n: usize,
    pub vertices: Vec<Vertex>,
    pub root: VertexId,
    pub terminal: VertexId,
}

impl DiagramBuilder {
    pub fn new(n: usize) -> DiagramBuilder {
        let root = Vertex { layer: 0, out: Vec::new() };
        let terminal = Vertex { layer: n, out: Vec::new() };
        DiagramBuilder {
            n,
            vertices: vec![root, terminal],
            root: VertexId(0),
            terminal: VertexId(1),
        }
    }

    pub fn add_vertex(&mut self, layer: usize) -> VertexId {
        self.vertices.push(Vertex { layer, out: Vec::new() });
        VertexId(self.vertices.len() as u32 - 1)
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.index()]
    }

    pub fn vertex_mut(&mut self, v: VertexId) -> &mut Vertex {
        &mut self.vertices[v.index()]
    }

    /// Ids of the vertices currently sitting at `layer`, in id order.
    pub fn layer_vertices(&self, layer: usize) -> Vec<VertexId> {
        (0..self.vertices.len())
            .filter(|&i| self.vertices[i].layer == layer)
            .map(|i| VertexId(i as u32))
            .collect()
    }

    /// Divides every vertex's out-going weights by their sum.
    pub fn renormalize_all(&mut self) -> Result<(), DdError> {
        for i in 0..self.vertices.len() {
            if VertexId(i as u32) != self.terminal {
                self.renormalize_vertex(VertexId(i as u32))?;
            }
        }
        Ok(())
    }

    pub fn renormalize_vertex(&mut self, v: VertexId) -> Result<(), DdError> {
        let vx = &mut self.vertices[v.index()];
        if vx.out.is_empty() {
            return Ok(()); // dropped vertices are collected later
        }
        let sum: f64 = vx.out.iter().map(|e| e.weight).sum();
        if sum <= 0.0 {
            return Err(DdError::ZeroWeightSum { vertex: v, sum });
        }
        for e in &mut vx.out {
            e.weight /= sum;
        }
        Ok(())
    }

    /// Drops vertices unreachable from the root and renumbers the survivors
    /// in breadth-first, label-sorted order so equal diagrams always get
    /// equal ids (serialization is byte-stable).
    pub fn finish(mut self) -> Result<DecisionDiagram, DdError> {
        for v in &mut self.vertices {
            v.sort_edges();
        }
        let mut order: Vec<VertexId> = Vec::with_capacity(self.vertices.len());
        let mut remap: Vec<Option<u32>> = vec![None; self.vertices.len()];
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(self.root);
        remap[self.root.index()] = Some(0);
        order.push(self.root);
        while let Some(v) = queue.pop_front() {
            for e in &self.vertices[v.index()].out {
                if remap[e.target.index()].is_none() {
                    remap[e.target.index()] = Some(order.len() as u32);
                    order.push(e.target);
                    queue.push_back(e.target);
                }
            }
        }
        if remap[self.terminal.index()].is_none() {
            return Err(DdError::BadTerminal { expected: self.n });
        }
        let vertices: Vec<Vertex> = order
            .iter()
            .map(|&old| {
                let mut v = self.vertices[old.index()].clone();
                for e in &mut v.out {
                    e.target = VertexId(remap[e.target.index()].unwrap());
                }
                v
            })
            .collect();
        let mut layers: Vec<Vec<VertexId>> = vec![Vec::new(); self.n + 1];
        for (i, v) in vertices.iter().enumerate() {
            if v.layer > self.n {
                return Err(DdError::BadTerminal { expected: self.n });
            }
            layers[v.layer].push(VertexId(i as u32));
        }
        let dd = DecisionDiagram {
            n: self.n,
            root: VertexId(0),
            terminal: VertexId(remap[self.terminal.index()].unwrap()),
            vertices,
            layers,
        };
        Ok(dd)
    }
}

impl From<&DecisionDiagram> for DiagramBuilder {
    fn from(dd: &DecisionDiagram) -> DiagramBuilder {
        DiagramBuilder {
            n: dd.n,
            vertices: dd.vertices.clone(),
            root: dd.root,
            terminal: dd.terminal,
        }
    }
}
