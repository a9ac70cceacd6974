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

//! Pauli strings, Hamiltonians, and phase-correct Pauli algebra.
//!
//! A [`PauliString`] is a word of length `n` over `{I, X, Y, Z}` stored in
//! symplectic form (one X-bit word and one Z-bit word), so the hot-path
//! predicates `covers`, `compatible`, and `join` are a handful of mask
//! operations regardless of `n` (capacity is 64 qubits).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub const fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// (x-bit, z-bit) in the symplectic encoding: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
    const fn bits(self) -> (u64, u64) {
        match self {
            Pauli::I => (0, 0),
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        }
    }

    const fn from_bits(x: u64, z: u64) -> Pauli {
        match (x, z) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Maximum number of qubits a packed Pauli string can hold.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("pauli string length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("measurement basis contains identity at qubit {position}")]
    NotFullWeight { position: usize },
    #[error("incompatible pauli strings (conflict at qubit {position})")]
    Incompatible { position: usize },
    #[error("pauli string longer than {MAX_QUBITS} qubits: {0}")]
    TooLong(usize),
    #[error("empty pauli string")]
    Empty,
    #[error("invalid pauli letter '{0}'")]
    BadLetter(char),
}

/// An `n`-qubit Pauli word. Qubit 0 is the leftmost letter in text form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    /// All-identity word on `n` qubits.
    pub fn identity(n: usize) -> PauliString {
        assert!(n > 0 && n <= MAX_QUBITS, "qubit count out of range: {n}");
        PauliString { n: n as u8, x: 0, z: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Result<PauliString, PauliError> {
        if letters.is_empty() {
            return Err(PauliError::Empty);
        }
        if letters.len() > MAX_QUBITS {
            return Err(PauliError::TooLong(letters.len()));
        }
        let mut s = PauliString { n: letters.len() as u8, x: 0, z: 0 };
        for (i, &p) in letters.iter().enumerate() {
            s.set(i, p);
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        debug_assert!(qubit < self.len());
        Pauli::from_bits((self.x >> qubit) & 1, (self.z >> qubit) & 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        debug_assert!(qubit < self.len());
        let (xb, zb) = p.bits();
        self.x = (self.x & !(1 << qubit)) | (xb << qubit);
        self.z = (self.z & !(1 << qubit)) | (zb << qubit);
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len()).map(move |i| self.letter(i))
    }

    /// Bitmask of non-identity positions.
    fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    /// Qubit positions where the word is not identity.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.support_mask();
        (0..self.len()).filter(move |i| (mask >> i) & 1 == 1)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    /// True iff the word contains no identity letter.
    pub fn is_full_weight(&self) -> bool {
        let all = if self.len() == 64 { u64::MAX } else { (1u64 << self.len()) - 1 };
        self.support_mask() == all
    }

    fn check_len(&self, other: &PauliString) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }

    /// Does the full-weight basis `self` agree with `p` on `supp(p)`?
    pub fn covers(&self, p: &PauliString) -> Result<bool, PauliError> {
        self.check_len(p)?;
        if !self.is_full_weight() {
            let pos = (0..self.len())
                .find(|&i| self.letter(i) == Pauli::I)
                .unwrap_or(0);
            return Err(PauliError::NotFullWeight { position: pos });
        }
        let supp = p.support_mask();
        Ok((self.x ^ p.x) & supp == 0 && (self.z ^ p.z) & supp == 0)
    }

    /// No qubit where both words are non-identity and differ.
    pub fn compatible(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.check_len(other)?;
        let both = self.support_mask() & other.support_mask();
        Ok(((self.x ^ other.x) | (self.z ^ other.z)) & both == 0)
    }

    /// Positionwise union: the letter of `self` where non-identity, else the letter of `other`.
    pub fn join(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        let both = self.support_mask() & other.support_mask();
        let conflict = ((self.x ^ other.x) | (self.z ^ other.z)) & both;
        self.check_len(other)?;
        if conflict != 0 {
            return Err(PauliError::Incompatible { position: conflict.trailing_zeros() as usize });
        }
        Ok(PauliString { n: self.n, x: self.x | other.x, z: self.z | other.z })
    }

    /// Operator product `self * other` as a phase times a Pauli word.
    pub fn product(&self, other: &PauliString) -> Result<PhasedPauli, PauliError> {
        self.check_len(other)?;
        let mut ipow = 0u8;
        let mut overlap = self.support_mask() & other.support_mask();
        while overlap != 0 {
            let i = overlap.trailing_zeros() as usize;
            overlap &= overlap - 1;
            ipow = (ipow + single_product_ipow(self.letter(i), other.letter(i))) % 4;
        }
        Ok(PhasedPauli {
            phase: Phase::from_ipow(ipow),
            pauli: PauliString { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z },
        })
    }
}

/// Power of `i` picked up by the single-qubit product `a * b` (the result word
/// is determined by the symplectic XOR; only the phase needs a table).
fn single_product_ipow(a: Pauli, b: Pauli) -> u8 {
    use Pauli::*;
    match (a, b) {
        (X, Y) | (Y, Z) | (Z, X) => 1,
        (Y, X) | (Z, Y) | (X, Z) => 3,
        _ => 0,
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters() {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: Vec<Pauli> = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or(PauliError::BadLetter(c)))
            .collect::<Result<_, _>>()?;
        PauliString::from_letters(&letters)
    }
}

// Lexicographic by letter with I < X < Y < Z; used for deterministic tie-breaking.
impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len().min(other.len());
        for i in 0..common {
            match self.letter(i).cmp(&other.letter(i)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.len().cmp(&other.len())
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One of the four phase units picked up by Pauli products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub const fn from_ipow(k: u8) -> Phase {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub const fn ipow(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn as_complex(self) -> num_complex::Complex64 {
        match self {
            Phase::PlusOne => num_complex::Complex64::new(1.0, 0.0),
            Phase::PlusI => num_complex::Complex64::new(0.0, 1.0),
            Phase::MinusOne => num_complex::Complex64::new(-1.0, 0.0),
            Phase::MinusI => num_complex::Complex64::new(0.0, -1.0),
        }
    }
}

/// A Pauli word together with a unit phase, as produced by operator products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasedPauli {
    pub phase: Phase,
    pub pauli: PauliString,
}

/// A linear combination of Pauli words with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum HamiltonianParseError {
    #[error("line {line}: expected '<coefficient> <pauli letters>', got {got:?}")]
    Malformed { line: usize, got: String },
    #[error("line {line}: bad coefficient {got:?}")]
    BadCoefficient { line: usize, got: String },
    #[error("line {line}: coefficient is not finite")]
    NonFinite { line: usize },
    #[error("line {line}: {source}")]
    BadPauli {
        line: usize,
        #[source]
        source: PauliError,
    },
    #[error("line {line}: string has {got} letters, earlier terms have {expected}")]
    InconsistentLength { line: usize, got: usize, expected: usize },
    #[error("no terms found")]
    Empty,
}

impl Hamiltonian {
    /// Builds a Hamiltonian from raw terms, coalescing duplicate words by
    /// summing their coefficients (first occurrence keeps its position).
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<Hamiltonian, PauliError> {
        let Some(&(_, first)) = terms.first() else {
            return Err(PauliError::Empty);
        };
        let n = first.len();
        let mut coalesced: Vec<(f64, PauliString)> = Vec::with_capacity(terms.len());
        for (alpha, p) in terms {
            if p.len() != n {
                return Err(PauliError::LengthMismatch { left: n, right: p.len() });
            }
            match coalesced.iter_mut().find(|(_, q)| *q == p) {
                Some((a, _)) => *a += alpha,
                None => coalesced.push((alpha, p)),
            }
        }
        Ok(Hamiltonian { n, terms: coalesced })
    }

    /// Parses the text format: one `<coefficient> <letters>` pair per line,
    /// `#` starts a comment, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Hamiltonian, HamiltonianParseError> {
        let mut terms: Vec<(f64, PauliString)> = Vec::new();
        let mut n: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            let (Some(coeff), Some(word), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(HamiltonianParseError::Malformed { line, got: content.to_string() });
            };
            let alpha: f64 = coeff.parse().map_err(|_| HamiltonianParseError::BadCoefficient {
                line,
                got: coeff.to_string(),
            })?;
            if !alpha.is_finite() {
                return Err(HamiltonianParseError::NonFinite { line });
            }
            let pauli: PauliString =
                word.parse().map_err(|source| HamiltonianParseError::BadPauli { line, source })?;
            if let Some(expected) = n {
                if pauli.len() != expected {
                    return Err(HamiltonianParseError::InconsistentLength {
                        line,
                        got: pauli.len(),
                        expected,
                    });
                }
            } else {
                n = Some(pauli.len());
            }
            match terms.iter_mut().find(|(_, q)| *q == pauli) {
                Some((a, _)) => *a += alpha,
                None => terms.push((alpha, pauli)),
            }
        }
        if terms.is_empty() {
            return Err(HamiltonianParseError::Empty);
        }
        Ok(Hamiltonian { n: n.unwrap(), terms })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// All terms in parse order, duplicates already coalesced.
    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Coefficient of the all-identity word (0.0 if absent).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, p)| p.is_identity())
            .map(|&(a, _)| a)
            .unwrap_or(0.0)
    }

    /// Terms excluding the all-identity word and zero coefficients.
    pub fn estimated_terms(&self) -> impl Iterator<Item = (f64, PauliString)> + '_ {
        self.terms
            .iter()
            .filter(|(a, p)| !p.is_identity() && *a != 0.0)
            .copied()
    }

    /// Renders the text format; parsing the result yields the same term set.
    pub fn to_text(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        for (a, p) in &self.terms {
            writeln!(out, "{a:.17e} {p}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn parse_two_terms() {
        let h = Hamiltonian::parse("0.5 ZZ\n-0.25 XI").unwrap();
        assert_eq!(h.num_qubits(), 2);
        assert_eq!(h.terms(), &[(0.5, ps("ZZ")), (-0.25, ps("XI"))]);
    }

    #[test]
    fn parse_coalesces_duplicates() {
        let h = Hamiltonian::parse("0.5 ZZ\n0.25 ZZ").unwrap();
        assert_eq!(h.terms(), &[(0.75, ps("ZZ"))]);
    }

    #[test]
    fn parse_comments_and_blanks() {
        let h = Hamiltonian::parse("# header\n\n0.5 ZZ # inline\n").unwrap();
        assert_eq!(h.terms(), &[(0.5, ps("ZZ"))]);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = Hamiltonian::parse("0.5 ZZ\noops").unwrap_err();
        assert_eq!(err, HamiltonianParseError::Malformed { line: 2, got: "oops".into() });
        let err = Hamiltonian::parse("0.5 ZZ\n0.25 ZZZ").unwrap_err();
        assert_eq!(
            err,
            HamiltonianParseError::InconsistentLength { line: 2, got: 3, expected: 2 }
        );
        let err = Hamiltonian::parse("inf ZZ").unwrap_err();
        assert_eq!(err, HamiltonianParseError::NonFinite { line: 1 });
        let err = Hamiltonian::parse("0.5 ZW").unwrap_err();
        assert!(matches!(err, HamiltonianParseError::BadPauli { line: 1, .. }));
    }

    #[test]
    fn parse_h2_bk_fixture() {
        let h = Hamiltonian::parse(crate::fixtures::H2_BK).unwrap();
        assert_eq!(h.terms().len(), 15);
        assert_eq!(h.num_qubits(), 4);
        assert_eq!(h.identity_coefficient(), -0.811);
        let (a, _) = h.terms().iter().find(|(_, p)| *p == ps("XZXZ")).unwrap();
        assert_eq!(*a, -0.045);
    }

    #[test]
    fn semantic_round_trip() {
        let h = Hamiltonian::parse(crate::fixtures::H2_JW).unwrap();
        let again = Hamiltonian::parse(&h.to_text()).unwrap();
        assert_eq!(h, again);
    }

    #[test]
    fn covers_examples() {
        assert!(ps("ZZZZ").covers(&ps("IZIZ")).unwrap());
        assert!(!ps("XZXZ").covers(&ps("ZIII")).unwrap());
        assert!(ps("XZXZ").covers(&ps("XIXI")).unwrap());
        assert_eq!(
            ps("XZXI").covers(&ps("XIXI")),
            Err(PauliError::NotFullWeight { position: 3 })
        );
        assert_eq!(
            ps("ZZZ").covers(&ps("ZZ")),
            Err(PauliError::LengthMismatch { left: 3, right: 2 })
        );
    }

    #[test]
    fn compatible_examples() {
        assert!(ps("ZIII").compatible(&ps("IZII")).unwrap());
        assert!(!ps("XZXZ").compatible(&ps("ZZZZ")).unwrap());
        assert!(ps("ZZII").compatible(&ps("IIZZ")).unwrap());
    }

    #[test]
    fn join_examples() {
        assert_eq!(ps("ZZII").join(&ps("IIZZ")).unwrap(), ps("ZZZZ"));
        assert_eq!(ps("XYZI").join(&PauliString::identity(4)).unwrap(), ps("XYZI"));
        assert_eq!(ps("XIXI").join(&ps("IZIZ")).unwrap(), ps("XZXZ"));
        assert_eq!(
            ps("XZXZ").join(&ps("ZZZZ")),
            Err(PauliError::Incompatible { position: 0 })
        );
    }

    #[test]
    fn product_involution() {
        let p = ps("XYZI");
        let r = p.product(&p).unwrap();
        assert_eq!(r.phase, Phase::PlusOne);
        assert!(r.pauli.is_identity());
    }

    #[test]
    fn product_single_qubit() {
        let r = ps("X").product(&ps("Z")).unwrap();
        assert_eq!(r.phase, Phase::MinusI);
        assert_eq!(r.pauli, ps("Y"));
    }

    #[test]
    fn product_fixture_pair() {
        // XZXZ * ZZZZ picks up (X*Z)^2 = (-i)^2 = -1 on qubits 0 and 2.
        let r = ps("XZXZ").product(&ps("ZZZZ")).unwrap();
        assert_eq!(r.phase, Phase::MinusOne);
        assert_eq!(r.pauli, ps("YIYI"));
    }

    #[test]
    fn lexicographic_order() {
        assert!(ps("IZII") < ps("IZIZ"));
        assert!(ps("IIIZ") < ps("IIZI"));
        assert!(ps("XIXI") < ps("XIXZ"));
        assert!(ps("IZZZ") < ps("ZZIZ"));
    }

    #[test]
    fn support_and_weight() {
        let p = ps("XIZI");
        assert_eq!(p.support().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(p.weight(), 2);
        assert!(!p.is_full_weight());
        assert!(ps("XYZX").is_full_weight());
        assert!(PauliString::identity(3).is_identity());
    }
}
