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

//! Seeded generators shared by the unit tests of several modules.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::pauli::{Pauli, PauliString};

use super::{build_from_reduced, DecisionDiagram, ReducedPauliList};

/// Random valid diagram via the public pipeline: a random pattern list
/// (identities allowed) pushed through trie construction, normalisation,
/// merging, and identity elimination.
pub(crate) fn random_diagram(rng: &mut ChaCha8Rng, n: usize) -> DecisionDiagram {
    loop {
        let count = rng.gen_range(1..=6usize);
        let mut seen: Vec<PauliString> = Vec::new();
        let mut terms = Vec::new();
        for _ in 0..count {
            let p = random_pattern(rng, n);
            if p.is_identity() || seen.contains(&p) {
                continue;
            }
            seen.push(p);
            terms.push((rng.gen_range(0.05..2.0), p));
        }
        if terms.is_empty() {
            continue;
        }
        let required: Vec<PauliString> = terms.iter().map(|(_, p)| *p).collect();
        let reduced = ReducedPauliList::from_terms(n, terms).unwrap();
        return build_from_reduced(&reduced, &required).unwrap();
    }
}

pub(crate) fn random_pattern(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    let letters: Vec<Pauli> = (0..n)
        .map(|_| match rng.gen_range(0..4u8) {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        })
        .collect();
    PauliString::from_letters(&letters).unwrap()
}
