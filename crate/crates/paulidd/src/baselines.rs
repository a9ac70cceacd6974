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

//! Baseline measurement schedules: largest-degree-first Pauli grouping via
//! graph coloring, and per-qubit product distributions (locally-biased
//! shadows). Both are materialised as decision diagrams so everything
//! downstream handles one representation.

use std::fmt::Write as _;

use thiserror::Error;

use crate::dd::{self, DdError, DecisionDiagram, DiagramBuilder, Edge, ReducedPauliList};
use crate::optimize::{self, OptimizeError};
use crate::pauli::{Hamiltonian, Pauli, PauliString};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("product distribution row {row} sums to {sum}, expected 1")]
    RowNotNormalized { row: usize, sum: f64 },
    #[error("product distribution row {row} has a negative entry")]
    NegativeEntry { row: usize },
    #[error("product distribution text, line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// Conflict graph over the estimable terms of a Hamiltonian: vertices are
/// terms, an edge joins two terms that disagree on some qubit where both act
/// non-trivially.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    /// Graph vertex k corresponds to `hamiltonian.terms()[term_index[k]]`.
    pub term_index: Vec<usize>,
    adj: Vec<Vec<bool>>,
}

impl ConflictGraph {
    pub fn num_vertices(&self) -> usize {
        self.term_index.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }
}

/// Builds the conflict graph. The all-identity term needs no measurement and
/// is left out.
pub fn compatibility_graph(h: &Hamiltonian) -> ConflictGraph {
    let terms: Vec<(usize, PauliString)> = h
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, (a, p))| !p.is_identity() && *a != 0.0)
        .map(|(i, (_, p))| (i, *p))
        .collect();
    let m = terms.len();
    let mut adj = vec![vec![false; m]; m];
    for a in 0..m {
        for b in a + 1..m {
            let conflict = !terms[a].1.compatible(&terms[b].1).expect("one Hamiltonian");
            adj[a][b] = conflict;
            adj[b][a] = conflict;
        }
    }
    ConflictGraph { term_index: terms.into_iter().map(|(i, _)| i).collect(), adj }
}

/// Greedy largest-degree-first coloring: vertices in non-increasing degree
/// order (ties by index), each receiving the smallest color absent from its
/// neighbors. Always proper.
pub fn ldf_coloring(graph: &ConflictGraph) -> Vec<usize> {
    let m = graph.num_vertices();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
    let mut color = vec![usize::MAX; m];
    for &v in &order {
        let mut taken: Vec<bool> = Vec::new();
        for u in 0..m {
            if graph.adjacent(v, u) && color[u] != usize::MAX {
                if color[u] >= taken.len() {
                    taken.resize(color[u] + 1, false);
                }
                taken[color[u]] = true;
            }
        }
        color[v] = taken.iter().position(|&t| !t).unwrap_or(taken.len());
    }
    color
}

/// One co-measurable collection of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    /// Join of the members' words; identity positions are unconstrained.
    pub pattern: PauliString,
    /// Indices into the Hamiltonian's term list.
    pub members: Vec<usize>,
}

/// Color classes of the conflict graph, each with its joint cover pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub groups: Vec<Group>,
}

impl Grouping {
    /// Concrete full-weight basis for a group: identity positions measure Z.
    pub fn full_basis(&self, k: usize) -> PauliString {
        let mut b = self.groups[k].pattern;
        for i in 0..b.len() {
            if b.letter(i) == Pauli::I {
                b.set(i, Pauli::Z);
            }
        }
        b
    }

    /// ℓ1 weight of each group's member coefficients, normalised into a
    /// sampling distribution.
    pub fn sampling_weights(&self, h: &Hamiltonian) -> Vec<f64> {
        let raw: Vec<f64> = self
            .groups
            .iter()
            .map(|g| g.members.iter().map(|&i| h.terms()[i].0.abs()).sum())
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// Human-readable listing of the color classes.
    pub fn report(&self, h: &Hamiltonian) -> String {
        let mut out = String::new();
        let weights = self.sampling_weights(h);
        for (k, g) in self.groups.iter().enumerate() {
            writeln!(
                out,
                "group {k}: pattern {} weight {:.6} members {}",
                g.pattern,
                weights[k],
                g.members.len()
            )
            .unwrap();
            for &i in &g.members {
                let (a, p) = h.terms()[i];
                writeln!(out, "  {a:+.6} {p}").unwrap();
            }
        }
        out
    }
}

/// Groups the Hamiltonian's terms by LDF coloring.
pub fn ldf_grouping(h: &Hamiltonian) -> Grouping {
    let graph = compatibility_graph(h);
    let colors = ldf_coloring(&graph);
    let num_colors = colors.iter().max().map_or(0, |&c| c + 1);
    let mut groups = Vec::with_capacity(num_colors);
    for c in 0..num_colors {
        let members: Vec<usize> = (0..graph.num_vertices())
            .filter(|&v| colors[v] == c)
            .map(|v| graph.term_index[v])
            .collect();
        let mut pattern = PauliString::identity(h.num_qubits());
        for &i in &members {
            pattern = pattern.join(&h.terms()[i].1).expect("color classes are compatible");
        }
        groups.push(Group { pattern, members });
    }
    Grouping { groups }
}

/// Materialises a grouping as a decision diagram: one maximal path per group
/// pattern (prefixes and suffixes shared by the usual passes), path weights
/// proportional to the groups' ℓ1 member weight. Patterns with leftover
/// identity positions go through the shared identity-elimination pass.
pub fn grouping_to_dd(
    grouping: &Grouping,
    h: &Hamiltonian,
) -> Result<DecisionDiagram, BaselineError> {
    for g in &grouping.groups {
        for &i in &g.members {
            let (_, p) = h.terms()[i];
            let mut on_support = true;
            for q in p.support() {
                on_support &= g.pattern.letter(q) == p.letter(q);
            }
            if !on_support {
                return Err(BaselineError::Dd(DdError::NoCommonCover));
            }
        }
    }
    let weights = grouping.sampling_weights(h);
    let mut terms: Vec<(f64, PauliString)> = Vec::new();
    for (g, &w) in grouping.groups.iter().zip(&weights) {
        // Greedy coloring can split a compatible set; identical patterns fold
        // into one path.
        match terms.iter_mut().find(|(_, q)| *q == g.pattern) {
            Some((acc, _)) => *acc += w,
            None => terms.push((w, g.pattern)),
        }
    }
    let reduced = ReducedPauliList::from_terms(h.num_qubits(), terms)?;
    let required: Vec<PauliString> = h.estimated_terms().map(|(_, p)| p).collect();
    Ok(dd::build_from_reduced(&reduced, &required)?)
}

/// Per-qubit probabilities over the measurement letters X, Y, Z.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution {
    rows: Vec<[f64; 3]>,
}

fn letter_slot(p: Pauli) -> usize {
    match p {
        Pauli::X => 0,
        Pauli::Y => 1,
        Pauli::Z => 2,
        Pauli::I => panic!("identity has no probability slot"),
    }
}

impl ProductDistribution {
    pub fn new(rows: Vec<[f64; 3]>) -> Result<ProductDistribution, BaselineError> {
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|&x| x < 0.0) {
                return Err(BaselineError::NegativeEntry { row: i });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(BaselineError::RowNotNormalized { row: i, sum });
            }
        }
        Ok(ProductDistribution { rows })
    }

    pub fn uniform(n: usize) -> ProductDistribution {
        ProductDistribution { rows: vec![[1.0 / 3.0; 3]; n] }
    }

    pub fn num_qubits(&self) -> usize {
        self.rows.len()
    }

    pub fn prob(&self, qubit: usize, letter: Pauli) -> f64 {
        self.rows[qubit][letter_slot(letter)]
    }

    /// Product-law covering probability: Π over supp(p) of the letter
    /// probabilities.
    pub fn zeta_product(&self, p: &PauliString) -> f64 {
        p.support().map(|i| self.prob(i, p.letter(i))).product()
    }

    /// Text format: one row of three probabilities per qubit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            writeln!(out, "{:.17e} {:.17e} {:.17e}", row[0], row[1], row[2]).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<ProductDistribution, BaselineError> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let vals: Vec<f64> = content
                .split_whitespace()
                .map(|s| {
                    s.parse::<f64>().map_err(|_| BaselineError::Parse {
                        line,
                        reason: format!("bad probability {s:?}"),
                    })
                })
                .collect::<Result<_, _>>()?;
            if vals.len() != 3 {
                return Err(BaselineError::Parse {
                    line,
                    reason: format!("expected three probabilities, got {}", vals.len()),
                });
            }
            rows.push([vals[0], vals[1], vals[2]]);
        }
        if rows.is_empty() {
            return Err(BaselineError::Parse { line: 0, reason: "no rows".into() });
        }
        ProductDistribution::new(rows)
    }
}

/// Chain diagram of a product distribution: one vertex per layer, one edge
/// per letter with positive probability. ζ on the chain equals the product
/// law.
pub fn lbcs_chain(beta: &ProductDistribution) -> Result<DecisionDiagram, BaselineError> {
    let n = beta.num_qubits();
    let mut b = DiagramBuilder::new(n);
    let mut prev = b.root;
    for layer in 0..n {
        let next = if layer + 1 == n { b.terminal } else { b.add_vertex(layer + 1) };
        for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
            let w = beta.prob(layer, letter);
            if w > 0.0 {
                b.vertex_mut(prev).out.push(Edge {
                    label: letter,
                    weight: w,
                    target: next,
                    virtual_edge: false,
                });
            }
        }
        prev = next;
    }
    let dd = b.finish()?;
    dd.validate()?;
    Ok(dd)
}

/// Result of the iterative product-distribution optimisation.
#[derive(Debug, Clone)]
pub struct LbcsOptimized {
    pub distribution: ProductDistribution,
    /// False when the iteration cap was hit before the weights settled; the
    /// returned iterate is the best seen.
    pub converged: bool,
    pub diagonal_cost: f64,
    pub uniform_cost: f64,
}

const LBCS_MAX_PASSES: usize = 1000;
const LBCS_DELTA: f64 = 0.5;
const LBCS_TOL: f64 = 1e-13;

/// Optimises the diagonal cost over product distributions by running the
/// damped closed-form update on the uniform chain. The chain shape is a
/// fixed point of the update, so the result stays a product distribution.
/// Letters may die out entirely (no floor).
pub fn lbcs_optimize(h: &Hamiltonian) -> Result<LbcsOptimized, BaselineError> {
    let n = h.num_qubits();
    let uniform = lbcs_chain(&ProductDistribution::uniform(n))?;
    let uniform_cost = optimize::diagonal_cost(&uniform, h)?;
    let (outcome, converged) =
        optimize::optimize_to_convergence(&uniform, h, LBCS_DELTA, 0.0, LBCS_MAX_PASSES, LBCS_TOL)?;
    let mut rows = vec![[0.0f64; 3]; n];
    for layer in 0..n {
        let &v = &outcome.dd.layer(layer)[0];
        for e in outcome.dd.out_edges(v) {
            rows[layer][letter_slot(e.label)] = e.weight;
        }
    }
    let distribution = ProductDistribution { rows };
    let diagonal_cost = *outcome.costs.last().unwrap();
    Ok(LbcsOptimized { distribution, converged, diagonal_cost, uniform_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn h2_jw() -> Hamiltonian {
        Hamiltonian::parse(fixtures::H2_JW).unwrap()
    }

    fn h2_bk() -> Hamiltonian {
        Hamiltonian::parse(fixtures::H2_BK).unwrap()
    }

    fn vertex_of(graph: &ConflictGraph, h: &Hamiltonian, pattern: &str) -> usize {
        let want = ps(pattern);
        (0..graph.num_vertices())
            .find(|&v| h.terms()[graph.term_index[v]].1 == want)
            .unwrap()
    }

    #[test]
    fn conflict_graph_follows_compatibility() {
        let h = h2_jw();
        let g = compatibility_graph(&h);
        assert_eq!(g.num_vertices(), 14); // identity left out
        let xxxx = vertex_of(&g, &h, "XXXX");
        let yyyy = vertex_of(&g, &h, "YYYY");
        let ziii = vertex_of(&g, &h, "ZIII");
        let izii = vertex_of(&g, &h, "IZII");
        assert!(g.adjacent(xxxx, yyyy));
        assert!(!g.adjacent(ziii, izii));
        // Adjacency must equal negated compatibility, pairwise.
        for a in 0..g.num_vertices() {
            for b in 0..g.num_vertices() {
                if a == b {
                    continue;
                }
                let pa = h.terms()[g.term_index[a]].1;
                let pb = h.terms()[g.term_index[b]].1;
                assert_eq!(g.adjacent(a, b), !pa.compatible(&pb).unwrap());
            }
        }
    }

    #[test]
    fn single_term_graph_is_edgeless() {
        let h = Hamiltonian::parse("1.0 XY").unwrap();
        let g = compatibility_graph(&h);
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.degree(0), 0);
    }

    #[test]
    fn bk_z_cluster_is_an_independent_set() {
        let h = h2_bk();
        let g = compatibility_graph(&h);
        let z_cluster: Vec<usize> = (0..g.num_vertices())
            .filter(|&v| {
                let p = h.terms()[g.term_index[v]].1;
                ps("ZZZZ").covers(&p).unwrap()
            })
            .collect();
        assert!(z_cluster.len() >= 8);
        for &a in &z_cluster {
            for &b in &z_cluster {
                assert!(a == b || !g.adjacent(a, b));
            }
        }
    }

    fn toy_graph(n: usize, edges: &[(usize, usize)]) -> ConflictGraph {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        ConflictGraph { term_index: (0..n).collect(), adj }
    }

    #[test]
    fn ldf_colors_triangle_with_three() {
        let g = toy_graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let colors = ldf_coloring(&g);
        let mut sorted = colors.clone();
        sorted.sort();
        assert_eq!(sorted, [0, 1, 2]);
    }

    #[test]
    fn ldf_colors_edgeless_with_one() {
        let g = toy_graph(4, &[]);
        assert_eq!(ldf_coloring(&g), [0, 0, 0, 0]);
    }

    #[test]
    fn ldf_coloring_is_always_proper() {
        for h in [h2_jw(), h2_bk()] {
            let g = compatibility_graph(&h);
            let colors = ldf_coloring(&g);
            for a in 0..g.num_vertices() {
                for b in 0..g.num_vertices() {
                    if g.adjacent(a, b) {
                        assert_ne!(colors[a], colors[b]);
                    }
                }
            }
        }
    }

    #[test]
    fn jw_grouping_matches_published_classes() {
        let h = h2_jw();
        let grouping = ldf_grouping(&h);
        let mut patterns: Vec<String> =
            grouping.groups.iter().map(|g| g.pattern.to_string()).collect();
        patterns.sort();
        assert_eq!(patterns, ["XXXX", "XXYY", "YYXX", "YYYY", "ZZZZ"]);
        let z_group = grouping.groups.iter().find(|g| g.pattern == ps("ZZZZ")).unwrap();
        assert_eq!(z_group.members.len(), 10);
    }

    #[test]
    fn grouping_covers_every_estimated_term() {
        for h in [h2_jw(), h2_bk()] {
            let grouping = ldf_grouping(&h);
            for (idx, (alpha, p)) in h.terms().iter().enumerate() {
                if p.is_identity() || *alpha == 0.0 {
                    continue;
                }
                let holder = grouping.groups.iter().find(|g| g.members.contains(&idx));
                let g = holder.expect("term grouped");
                assert!(g.pattern.join(p).is_ok());
                assert!(grouping.full_basis(0).is_full_weight());
            }
        }
    }

    #[test]
    fn grouping_dd_reproduces_published_metrics() {
        let h = h2_jw();
        let dd = grouping_to_dd(&ldf_grouping(&h), &h).unwrap();
        let m = dd.metrics().unwrap();
        assert_eq!((m.vertex_count, m.edge_count, m.path_count), (10, 12, 5));
        assert!(dd.is_compatible(&h));

        let h = h2_bk();
        let dd = grouping_to_dd(&ldf_grouping(&h), &h).unwrap();
        let m = dd.metrics().unwrap();
        assert_eq!((m.vertex_count, m.edge_count, m.path_count), (7, 7, 2));
        assert!(dd.is_compatible(&h));
    }

    #[test]
    fn single_group_gives_single_path() {
        let h = Hamiltonian::parse("0.5 XZ\n0.25 XI").unwrap();
        let grouping = ldf_grouping(&h);
        assert_eq!(grouping.groups.len(), 1);
        let dd = grouping_to_dd(&grouping, &h).unwrap();
        assert_eq!(dd.metrics().unwrap().path_count, 1);
    }

    #[test]
    fn multiply_covered_term_gains_probability_on_the_dd() {
        // Under the diagram, a term covered by several group bases is
        // estimated whenever any of them is drawn.
        let h = h2_bk();
        let grouping = ldf_grouping(&h);
        let dd = grouping_to_dd(&grouping, &h).unwrap();
        let weights = grouping.sampling_weights(&h);
        for (k, g) in grouping.groups.iter().enumerate() {
            for &i in &g.members {
                let (_, p) = h.terms()[i];
                assert!(dd.zeta(&p) >= weights[k] - 1e-12);
            }
        }
        // IZII sits in one group but both bases cover it.
        assert!((dd.zeta(&ps("IZII")) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn chain_zeta_follows_product_law() {
        let uniform = ProductDistribution::uniform(4);
        let dd = lbcs_chain(&uniform).unwrap();
        assert_eq!(dd.num_vertices(), 5);
        assert_eq!(dd.num_edges(), 12);
        assert!((dd.zeta(&ps("XZXZ")) - 1.0 / 81.0).abs() < 1e-15);

        let rows = vec![[0.5, 0.25, 0.25], [0.1, 0.2, 0.7], [0.0, 0.3, 0.7]];
        let beta = ProductDistribution::new(rows).unwrap();
        let dd = lbcs_chain(&beta).unwrap();
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = crate::dd::tests_support::random_pattern(&mut rng, 3);
            assert!((dd.zeta(&p) - beta.zeta_product(&p)).abs() < 1e-12, "pattern {p}");
        }
    }

    #[test]
    fn product_rows_validate() {
        assert!(matches!(
            ProductDistribution::new(vec![[0.5, 0.2, 0.2]]),
            Err(BaselineError::RowNotNormalized { row: 0, .. })
        ));
        assert!(matches!(
            ProductDistribution::new(vec![[1.2, -0.1, -0.1]]),
            Err(BaselineError::NegativeEntry { row: 0 })
        ));
        let text = "0.5 0.25 0.25\n0.2 0.3 0.5\n";
        let beta = ProductDistribution::parse(text).unwrap();
        assert_eq!(beta.num_qubits(), 2);
        assert_eq!(ProductDistribution::parse(&beta.to_text()).unwrap(), beta);
        assert!(matches!(
            ProductDistribution::parse("0.5 0.5\n"),
            Err(BaselineError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn lbcs_single_term_concentrates() {
        let h = Hamiltonian::parse("1.0 XXX").unwrap();
        let opt = lbcs_optimize(&h).unwrap();
        assert!(opt.converged);
        for qubit in 0..3 {
            assert!(opt.distribution.prob(qubit, Pauli::X) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn lbcs_anticorrelated_pair_splits_evenly() {
        let h = Hamiltonian::parse("1.0 XXXXXX\n1.0 ZZZZZZ").unwrap();
        let opt = lbcs_optimize(&h).unwrap();
        assert!(opt.converged);
        let beta = &opt.distribution;
        for qubit in 0..6 {
            assert!((beta.prob(qubit, Pauli::X) - 0.5).abs() < 1e-10);
            assert!((beta.prob(qubit, Pauli::Z) - 0.5).abs() < 1e-10);
        }
        // The product law then hides each full-weight term exponentially.
        assert!((beta.zeta_product(&ps("XXXXXX")) - 1.0 / 64.0).abs() < 1e-9);
    }

    #[test]
    fn lbcs_beats_uniform_on_fixtures() {
        for h in [h2_jw(), h2_bk()] {
            let opt = lbcs_optimize(&h).unwrap();
            assert!(opt.diagonal_cost < opt.uniform_cost);
            let chain = lbcs_chain(&opt.distribution).unwrap();
            assert!(chain.is_compatible(&h));
        }
    }
}
