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

//! Text serialization and Graphviz export for decision diagrams.
//!
//! Format: a `dd <n> <vertex count>` header, one `v <id> <layer>` record per
//! vertex, one `e <src> <dst> <label> <weight> <virtual>` record per edge.
//! Weights are written with 17 significant digits so the round trip is exact.

use std::fmt::Write as _;

use crate::pauli::Pauli;

use super::{DdError, DecisionDiagram, DiagramBuilder, Edge, Vertex, VertexId};

pub fn serialize(dd: &DecisionDiagram) -> String {
    let mut out = String::new();
    writeln!(out, "dd {} {}", dd.num_qubits(), dd.num_vertices()).unwrap();
    for v in dd.vertex_ids() {
        writeln!(out, "v {} {}", v, dd.layer_of(v)).unwrap();
    }
    for v in dd.vertex_ids() {
        for e in dd.out_edges(v) {
            writeln!(
                out,
                "e {} {} {} {:.16e} {}",
                v,
                e.target,
                e.label,
                e.weight,
                if e.virtual_edge { 1 } else { 0 }
            )
            .unwrap();
        }
    }
    out
}

pub fn deserialize(text: &str) -> Result<DecisionDiagram, DdError> {
    let fail = |line: usize, reason: &str| DdError::Parse { line, reason: reason.to_string() };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| fail(1, "empty input"))?;
    let mut hp = header.split_whitespace();
    if hp.next() != Some("dd") {
        return Err(fail(hline, "expected 'dd <n> <vertices>' header"));
    }
    let n: usize = hp
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| fail(hline, "bad qubit count"))?;
    let count: usize = hp
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| fail(hline, "bad vertex count"))?;
    if n == 0 || count < 2 {
        return Err(fail(hline, "diagram needs at least one qubit and two vertices"));
    }

    let mut layers: Vec<Option<usize>> = vec![None; count];
    let mut edges: Vec<(usize, Edge)> = Vec::new();
    for (lineno, line) in lines {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let id: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad vertex id"))?;
                let layer: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad layer"))?;
                if id >= count {
                    return Err(fail(lineno, "vertex id out of range"));
                }
                if layer > n {
                    return Err(fail(lineno, "layer out of range"));
                }
                if layers[id].replace(layer).is_some() {
                    return Err(fail(lineno, "duplicate vertex id"));
                }
            }
            Some("e") => {
                let src: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad source id"))?;
                let dst: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad target id"))?;
                let label = parts
                    .next()
                    .and_then(|s| {
                        let mut chars = s.chars();
                        match (chars.next().and_then(Pauli::from_char), chars.next()) {
                            (Some(p), None) => Some(p),
                            _ => None,
                        }
                    })
                    .ok_or_else(|| fail(lineno, "bad edge label"))?;
                let weight: f64 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad weight"))?;
                let virtual_edge = match parts.next() {
                    Some("0") => false,
                    Some("1") => true,
                    _ => return Err(fail(lineno, "bad virtual flag")),
                };
                if src >= count || dst >= count {
                    return Err(fail(lineno, "edge endpoint out of range"));
                }
                edges.push((
                    src,
                    Edge { label, weight, target: VertexId(dst as u32), virtual_edge },
                ));
            }
            _ => return Err(fail(lineno, "expected 'v' or 'e' record")),
        }
    }
    let mut vertices = Vec::with_capacity(count);
    for (id, layer) in layers.iter().enumerate() {
        let layer = layer.ok_or_else(|| fail(0, &format!("vertex {id} missing")))?;
        vertices.push(Vertex { layer, out: Vec::new() });
    }
    let root = VertexId(
        vertices
            .iter()
            .position(|v| v.layer == 0)
            .ok_or_else(|| fail(0, "no root vertex at layer 0"))? as u32,
    );
    let terminal = VertexId(
        vertices
            .iter()
            .position(|v| v.layer == n)
            .ok_or_else(|| fail(0, "no terminal vertex"))? as u32,
    );
    for (src, e) in edges {
        vertices[src].out.push(e);
    }
    let b = DiagramBuilder { n, vertices, root, terminal };
    let dd = b.finish()?;
    dd.validate()?;
    Ok(dd)
}

/// Graphviz rendering: circles for decision vertices, a box for the
/// terminal, edges labeled `weight·letter` (weight omitted when 1), virtual
/// edges dashed and marked with a combining dot over the letter.
pub fn export_dot(dd: &DecisionDiagram) -> String {
    let mut out = String::new();
    writeln!(out, "digraph dd {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=circle, label=\"\"];").unwrap();
    writeln!(out, "  {} [shape=box];", dd.terminal()).unwrap();
    for v in dd.vertex_ids() {
        for e in dd.out_edges(v) {
            let letter = if e.virtual_edge {
                format!("{}\u{0307}", e.label)
            } else {
                e.label.to_string()
            };
            let label = if (e.weight - 1.0).abs() < 1e-12 {
                letter
            } else {
                format!("{:.3}\u{b7}{letter}", e.weight)
            };
            let style = if e.virtual_edge { ", style=dashed" } else { "" };
            writeln!(out, "  {} -> {} [label=\"{label}\"{style}];", v, e.target).unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
