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

//! Construction of a decision diagram from a Hamiltonian: term preprocessing,
//! prefix-trie initialisation, weight normalisation, equivalent-vertex
//! merging, and identity-edge elimination.

use std::collections::HashMap;

use crate::pauli::{Hamiltonian, Pauli, PauliString};

use super::{DdError, DecisionDiagram, DiagramBuilder, Edge, VertexId};

/// Non-identity patterns with positive merged weights, ready for trie
/// initialisation. No pattern appears twice.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPauliList {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl ReducedPauliList {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Validated constructor for externally assembled lists (e.g. grouping
    /// patterns): weights positive, no duplicates, no all-identity pattern.
    pub fn from_terms(n: usize, terms: Vec<(f64, PauliString)>) -> Result<Self, DdError> {
        if terms.is_empty() {
            return Err(DdError::NothingToEstimate);
        }
        for (i, (w, p)) in terms.iter().enumerate() {
            if p.len() != n {
                return Err(DdError::BadReducedList {
                    reason: format!("pattern {p} has length {}, expected {n}", p.len()),
                });
            }
            if !(*w > 0.0) {
                return Err(DdError::BadReducedList {
                    reason: format!("pattern {p} has non-positive weight {w}"),
                });
            }
            if p.is_identity() {
                return Err(DdError::BadReducedList {
                    reason: "all-identity pattern".to_string(),
                });
            }
            if terms[..i].iter().any(|(_, q)| q == p) {
                return Err(DdError::BadReducedList {
                    reason: format!("duplicate pattern {p}"),
                });
            }
        }
        Ok(ReducedPauliList { n, terms })
    }
}

/// Drops the identity term, maps coefficients to their absolute values, and
/// repeatedly merges the term with the most compatible partners into those
/// partners: each partner is replaced by its join with the merged term and
/// receives an equal share of its weight.
///
/// The working list is a multiset: joins that collide on the same pattern
/// stay separate entries until the loop ends, and each duplicate counts as
/// its own compatible partner. Ties on the partner count pick the
/// lexicographically smallest word. Every round removes one entry, so the
/// loop terminates.
pub fn preprocess(h: &Hamiltonian) -> Result<ReducedPauliList, DdError> {
    let mut work: Vec<(f64, PauliString)> =
        h.estimated_terms().map(|(a, p)| (a.abs(), p)).collect();
    if work.is_empty() {
        return Err(DdError::NothingToEstimate);
    }
    loop {
        let mut best: Option<(usize, usize)> = None; // (index, partner count)
        for i in 0..work.len() {
            let ncomp = (0..work.len())
                .filter(|&j| j != i && compatible(&work[i].1, &work[j].1))
                .count();
            if ncomp == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bn)) => ncomp > bn || (ncomp == bn && work[i].1 < work[bi].1),
            };
            if better {
                best = Some((i, ncomp));
            }
        }
        let Some((idx, ncomp)) = best else { break };
        let (weight, high) = work[idx];
        let share = weight / ncomp as f64;
        for j in 0..work.len() {
            if j != idx && compatible(&high, &work[j].1) {
                work[j].0 += share;
                work[j].1 = high.join(&work[j].1).expect("compatible by construction");
            }
        }
        work.remove(idx);
    }
    let mut terms: Vec<(f64, PauliString)> = Vec::with_capacity(work.len());
    for (w, p) in work {
        match terms.iter_mut().find(|(_, q)| *q == p) {
            Some((acc, _)) => *acc += w,
            None => terms.push((w, p)),
        }
    }
    Ok(ReducedPauliList { n: h.num_qubits(), terms })
}

fn compatible(a: &PauliString, b: &PauliString) -> bool {
    a.compatible(b).expect("terms share one length")
}

/// Prefix trie over the reduced list. Each term contributes one maximal
/// path; its weight sits on the final edge and interior edges carry a
/// placeholder weight of 1. The result is not yet normalised and may contain
/// identity-labeled edges.
pub fn build_initial(reduced: &ReducedPauliList) -> DecisionDiagram {
    assert!(!reduced.terms.is_empty(), "reduced list must be non-empty");
    let n = reduced.n;
    let mut b = DiagramBuilder::new(n);
    for &(weight, pattern) in &reduced.terms {
        let mut v = b.root;
        for layer in 0..n - 1 {
            let letter = pattern.letter(layer);
            if let Some(e) = b.vertex(v).edge_with_label(letter) {
                v = e.target;
            } else {
                let next = b.add_vertex(layer + 1);
                b.vertex_mut(v).out.push(Edge {
                    label: letter,
                    weight: 1.0,
                    target: next,
                    virtual_edge: false,
                });
                v = next;
            }
        }
        let last = pattern.letter(n - 1);
        debug_assert!(
            b.vertex(v).edge_with_label(last).is_none(),
            "reduced list contains duplicate patterns"
        );
        let terminal = b.terminal;
        b.vertex_mut(v).out.push(Edge {
            label: last,
            weight,
            target: terminal,
            virtual_edge: false,
        });
    }
    b.finish().expect("trie always reaches the terminal")
}

/// Breadth-first from the terminal upward: divides each vertex's out-going
/// weights by their sum and multiplies the sum onto the in-coming edges.
/// Afterwards every vertex is probabilistic and relative path masses are
/// unchanged.
pub fn normalize(dd: &DecisionDiagram) -> Result<DecisionDiagram, DdError> {
    let mut b = DiagramBuilder::from(dd);
    for layer in (0..b.n).rev() {
        let mut factor: HashMap<VertexId, f64> = HashMap::new();
        for v in b.layer_vertices(layer) {
            let sum: f64 = b.vertex(v).out.iter().map(|e| e.weight).sum();
            if sum <= 0.0 {
                return Err(DdError::ZeroWeightSum { vertex: v, sum });
            }
            for e in &mut b.vertex_mut(v).out {
                e.weight /= sum;
            }
            factor.insert(v, sum);
        }
        if layer > 0 {
            for u in b.layer_vertices(layer - 1) {
                for e in &mut b.vertex_mut(u).out {
                    if let Some(&f) = factor.get(&e.target) {
                        e.weight *= f;
                    }
                }
            }
        }
    }
    b.finish()
}

/// Bottom-up unification of vertices with identical out-going edge sets
/// (label, weight, target, virtual flag — weights compared bit-exactly).
/// In-edges of a duplicate are redirected to its representative; the encoded
/// distribution is untouched.
pub fn merge_equivalent(dd: &DecisionDiagram) -> DecisionDiagram {
    let mut b = DiagramBuilder::from(dd);
    for layer in (1..b.n).rev() {
        let mut reps: HashMap<Vec<(Pauli, u64, VertexId, bool)>, VertexId> = HashMap::new();
        let mut remap: HashMap<VertexId, VertexId> = HashMap::new();
        for v in b.layer_vertices(layer) {
            let mut key: Vec<_> = b
                .vertex(v)
                .out
                .iter()
                .map(|e| (e.label, e.weight.to_bits(), e.target, e.virtual_edge))
                .collect();
            key.sort();
            match reps.entry(key) {
                std::collections::hash_map::Entry::Occupied(o) => {
                    remap.insert(v, *o.get());
                }
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert(v);
                }
            }
        }
        if !remap.is_empty() {
            for u in b.layer_vertices(layer - 1) {
                for e in &mut b.vertex_mut(u).out {
                    if let Some(&r) = remap.get(&e.target) {
                        e.target = r;
                    }
                }
            }
        }
    }
    b.finish().expect("merging keeps the terminal reachable")
}

/// Eliminates identity-labeled edges in three steps, processed terminal-upward
/// per vertex so the recursive merging below never meets an identity edge:
///
/// 1. an identity edge parallel to an X/Y/Z edge with the same target is
///    deleted and its weight added to the smallest-weight parallel edge;
/// 2. an identity edge that is its vertex's only out-edge splits into three
///    equal-weight virtual edges;
/// 3. otherwise the identity edge's target is merged (functionally, memoised)
///    into the target of the smallest-label sibling, which absorbs its weight.
///
/// Superfluous virtual edges are then deleted greedily (largest layer first,
/// labels in X<Y<Z order) as long as every pattern in `required_cover` keeps
/// a covering path, and the diagram is renormalised.
pub fn remove_identities(
    dd: &DecisionDiagram,
    required_cover: &[PauliString],
) -> Result<DecisionDiagram, DdError> {
    let mut b = DiagramBuilder::from(dd);
    let mut memo: HashMap<(VertexId, VertexId), VertexId> = HashMap::new();
    for layer in (0..b.n).rev() {
        for u in b.layer_vertices(layer) {
            // Parallel combining.
            if let Some(ie) = b.vertex(u).edge_with_label(Pauli::I).copied() {
                let has_parallel = b
                    .vertex(u)
                    .out
                    .iter()
                    .any(|e| e.label != Pauli::I && e.target == ie.target);
                if has_parallel {
                    let vx = b.vertex_mut(u);
                    vx.out.retain(|e| e.label != Pauli::I);
                    let absorber = vx
                        .out
                        .iter_mut()
                        .filter(|e| e.target == ie.target)
                        .min_by(|a, c| a.weight.total_cmp(&c.weight).then(a.label.cmp(&c.label)))
                        .expect("parallel edge exists");
                    absorber.weight += ie.weight;
                }
            }
            // Splitting and merging.
            if let Some(ie) = b.vertex(u).edge_with_label(Pauli::I).copied() {
                if b.vertex(u).out.len() == 1 {
                    let w = ie.weight / 3.0;
                    let vx = b.vertex_mut(u);
                    vx.out.clear();
                    for label in [Pauli::X, Pauli::Y, Pauli::Z] {
                        vx.out.push(Edge {
                            label,
                            weight: w,
                            target: ie.target,
                            virtual_edge: true,
                        });
                    }
                } else {
                    let sib = b
                        .vertex(u)
                        .out
                        .iter()
                        .filter(|e| e.label != Pauli::I)
                        .min_by_key(|e| e.label)
                        .copied()
                        .expect("non-identity sibling exists");
                    let merged = merge_vertices(&mut b, ie.target, sib.target, &mut memo)?;
                    let vx = b.vertex_mut(u);
                    vx.out.retain(|e| e.label != Pauli::I);
                    let se = vx.out.iter_mut().find(|e| e.label == sib.label).unwrap();
                    se.target = merged;
                    se.weight += ie.weight;
                }
                b.renormalize_vertex(u)?;
            }
        }
    }
    remove_superfluous_virtual(&mut b, required_cover)?;
    b.renormalize_all()?;
    b.finish()
}

/// Functionally merges the subgraph under `from` into the one under `into`,
/// returning a fresh vertex; existing vertices are never mutated, so shared
/// subgraphs stay intact. Per label: an edge missing from `into` is adopted
/// as-is; same label and target keeps `into`'s weight; same label with
/// different targets recurses and sums the weights. A combined edge stays
/// virtual only if both inputs were virtual. The fresh vertex is normalised.
fn merge_vertices(
    b: &mut DiagramBuilder,
    from: VertexId,
    into: VertexId,
    memo: &mut HashMap<(VertexId, VertexId), VertexId>,
) -> Result<VertexId, DdError> {
    if from == into {
        return Ok(into);
    }
    if let Some(&m) = memo.get(&(from, into)) {
        return Ok(m);
    }
    debug_assert_eq!(b.vertex(from).layer, b.vertex(into).layer);
    let layer = b.vertex(into).layer;
    let mut out: Vec<Edge> = Vec::new();
    for label in [Pauli::X, Pauli::Y, Pauli::Z] {
        let ef = b.vertex(from).edge_with_label(label).copied();
        let et = b.vertex(into).edge_with_label(label).copied();
        match (ef, et) {
            (None, None) => {}
            (Some(e), None) | (None, Some(e)) => out.push(e),
            (Some(a), Some(c)) if a.target == c.target => out.push(Edge {
                label,
                weight: c.weight,
                target: c.target,
                virtual_edge: a.virtual_edge && c.virtual_edge,
            }),
            (Some(a), Some(c)) => {
                let t = merge_vertices(b, a.target, c.target, memo)?;
                out.push(Edge {
                    label,
                    weight: a.weight + c.weight,
                    target: t,
                    virtual_edge: a.virtual_edge && c.virtual_edge,
                });
            }
        }
    }
    let sum: f64 = out.iter().map(|e| e.weight).sum();
    if sum <= 0.0 {
        return Err(DdError::ZeroWeightSum { vertex: into, sum });
    }
    for e in &mut out {
        e.weight /= sum;
    }
    let nv = b.add_vertex(layer);
    b.vertex_mut(nv).out = out;
    memo.insert((from, into), nv);
    Ok(nv)
}

/// Whether a path covering `pattern` exists — a structural check, so weights
/// are irrelevant and the builder may be mid-normalisation.
fn covers_pattern(b: &DiagramBuilder, pattern: &PauliString) -> bool {
    let mut ok = vec![false; b.vertices.len()];
    ok[b.terminal.index()] = true;
    for layer in (0..b.n).rev() {
        let want = pattern.letter(layer);
        for v in b.layer_vertices(layer) {
            ok[v.index()] = b.vertex(v).out.iter().any(|e| {
                (want == Pauli::I || e.label == want) && ok[e.target.index()]
            });
        }
    }
    ok[b.root.index()]
}

fn remove_superfluous_virtual(
    b: &mut DiagramBuilder,
    required_cover: &[PauliString],
) -> Result<(), DdError> {
    let mut candidates: Vec<(usize, VertexId, Pauli)> = Vec::new();
    for (i, v) in b.vertices.iter().enumerate() {
        for e in &v.out {
            if e.virtual_edge {
                candidates.push((v.layer, VertexId(i as u32), e.label));
            }
        }
    }
    // Largest layer first, then vertex id, then label order.
    candidates.sort_by(|a, c| c.0.cmp(&a.0).then(a.1.cmp(&c.1)).then(a.2.cmp(&c.2)));
    for (_, v, label) in candidates {
        let vx = b.vertex(v);
        if vx.out.len() < 2 {
            continue; // never remove a vertex's last out-edge
        }
        let Some(pos) = vx.out.iter().position(|e| e.label == label && e.virtual_edge) else {
            continue;
        };
        let removed = b.vertex_mut(v).out.remove(pos);
        if required_cover.iter().all(|p| covers_pattern(b, p)) {
            b.renormalize_vertex(v)?;
        } else {
            b.vertex_mut(v).out.insert(pos, removed);
        }
    }
    Ok(())
}

/// Trie initialisation, normalisation, vertex merging, identity elimination,
/// and a second merge pass over an already-reduced list.
pub fn build_from_reduced(
    reduced: &ReducedPauliList,
    required_cover: &[PauliString],
) -> Result<DecisionDiagram, DdError> {
    let trie = build_initial(reduced);
    let normed = normalize(&trie)?;
    let merged = merge_equivalent(&normed);
    let cleaned = remove_identities(&merged, required_cover)?;
    let done = merge_equivalent(&cleaned);
    let mut b = DiagramBuilder::from(&done);
    b.renormalize_all()?;
    let dd = b.finish()?;
    dd.validate()?;
    Ok(dd)
}

/// Full pipeline from a Hamiltonian. The result satisfies every structural
/// invariant and covers every estimable term.
pub fn build(h: &Hamiltonian) -> Result<DecisionDiagram, DdError> {
    let reduced = preprocess(h)?;
    let required: Vec<PauliString> = h.estimated_terms().map(|(_, p)| p).collect();
    build_from_reduced(&reduced, &required)
}
