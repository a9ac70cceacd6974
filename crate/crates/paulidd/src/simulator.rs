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

//! Dense statevector backend: ground states, exact Pauli expectation values,
//! and sampling of measurement outcomes in product Pauli bases.
//!
//! Pure states only. Qubit `i` maps to bit `n-1-i` of the amplitude index, so
//! qubit 0 (the leftmost letter of a Pauli word) is the most significant bit.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::estimator::ShotRecord;
use crate::pauli::{Hamiltonian, Pauli, PauliString};

/// Hard cap mirroring the largest molecules this tool targets.
pub const MAX_SIM_QUBITS: usize = 14;
/// Dense diagonalisation is used up to this size, Lanczos above it.
const DENSE_LIMIT: usize = 8;
/// Required accuracy of the eigenpair: `‖Hψ − Eψ‖ ≤ RESIDUAL_TOL`.
const RESIDUAL_TOL: f64 = 1e-8;
/// Ground-space gap below which the result is flagged degenerate.
const DEGENERACY_GAP: f64 = 1e-10;
const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error("simulator supports at most {MAX_SIM_QUBITS} qubits, got {0}")]
    TooManyQubits(usize),
    #[error("state norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error("operator length {operator} does not match state on {state} qubits")]
    LengthMismatch { operator: usize, state: usize },
    #[error("measurement basis contains identity at qubit {0}")]
    BasisNotFullWeight(usize),
    #[error("eigensolver did not reach residual {RESIDUAL_TOL:.0e} (best {best:.3e})")]
    NoConvergence { best: f64 },
    #[error("state file is corrupt: {0}")]
    BadStateFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dense complex amplitude vector over the 2^n computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<StateVector, SimulatorError> {
        assert_eq!(amps.len(), 1 << n, "amplitude count must be 2^n");
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(SimulatorError::NotNormalized((norm2 - 1.0).abs()));
        }
        Ok(StateVector { n, amps })
    }

    /// Computational basis state `|k⟩`.
    pub fn basis_state(n: usize, k: usize) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[k] = Complex64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn bit_of(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.n - 1 - qubit)) & 1
    }
}

/// `P|k⟩ = phase · |k ^ flip⟩`; returns the flip mask and a per-index phase.
fn pauli_action(p: &PauliString, n: usize) -> (usize, impl Fn(usize) -> Complex64 + '_) {
    let mut flip = 0usize;
    for i in 0..n {
        match p.letter(i) {
            Pauli::X | Pauli::Y => flip |= 1 << (n - 1 - i),
            _ => {}
        }
    }
    let phase = move |k: usize| {
        let mut ipow = 0u8; // phase = i^ipow
        for i in 0..n {
            let bit = (k >> (n - 1 - i)) & 1;
            match p.letter(i) {
                Pauli::Y => ipow = (ipow + 1 + 2 * bit as u8) % 4,
                Pauli::Z if bit == 1 => ipow = (ipow + 2) % 4,
                _ => {}
            }
        }
        match ipow {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    };
    (flip, phase)
}

/// `out += alpha * P * v`, without materialising P.
fn accumulate_term(out: &mut [Complex64], v: &[Complex64], alpha: f64, p: &PauliString, n: usize) {
    let (flip, phase) = pauli_action(p, n);
    for k in 0..v.len() {
        out[k ^ flip] += alpha * phase(k) * v[k];
    }
}

fn apply_hamiltonian(h: &Hamiltonian, v: &[Complex64]) -> Vec<Complex64> {
    let n = h.num_qubits();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (alpha, p) in h.terms() {
        accumulate_term(&mut out, v, *alpha, p, n);
    }
    out
}

/// Exact `⟨ψ|P|ψ⟩`.
pub fn expectation(state: &StateVector, p: &PauliString) -> Result<f64, SimulatorError> {
    if p.len() != state.n {
        return Err(SimulatorError::LengthMismatch { operator: p.len(), state: state.n });
    }
    let (flip, phase) = pauli_action(p, state.n);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..state.amps.len() {
        acc += state.amps[k ^ flip].conj() * phase(k) * state.amps[k];
    }
    Ok(acc.re)
}

/// Lowest eigenpair of `Σ α_P P` (identity term included in the energy).
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// Set when the gap to the next eigenvalue is below 1e-10.
    pub degenerate: bool,
}

pub fn ground_state(h: &Hamiltonian) -> Result<GroundState, SimulatorError> {
    let n = h.num_qubits();
    if n > MAX_SIM_QUBITS {
        return Err(SimulatorError::TooManyQubits(n));
    }
    let result = if n <= DENSE_LIMIT { dense_ground(h) } else { lanczos_ground(h) }?;
    let hv = apply_hamiltonian(h, &result.state.amps);
    let residual: f64 = hv
        .iter()
        .zip(&result.state.amps)
        .map(|(hx, x)| (hx - result.energy * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > RESIDUAL_TOL {
        return Err(SimulatorError::NoConvergence { best: residual });
    }
    Ok(result)
}

/// Dense route: materialise H, embed the Hermitian matrix as the real
/// symmetric [[Re, -Im], [Im, Re]] and take the lowest eigenpair. Every
/// complex eigenvalue shows up twice in the embedding, which the degeneracy
/// gap accounts for.
fn dense_ground(h: &Hamiltonian) -> Result<GroundState, SimulatorError> {
    let n = h.num_qubits();
    let dim = 1usize << n;
    let mut re = DMatrix::<f64>::zeros(dim, dim);
    let mut im = DMatrix::<f64>::zeros(dim, dim);
    for (alpha, p) in h.terms() {
        let (flip, phase) = pauli_action(p, n);
        for k in 0..dim {
            let ph = phase(k);
            re[(k ^ flip, k)] += alpha * ph.re;
            im[(k ^ flip, k)] += alpha * ph.im;
        }
    }
    let mut emb = DMatrix::<f64>::zeros(2 * dim, 2 * dim);
    emb.view_mut((0, 0), (dim, dim)).copy_from(&re);
    emb.view_mut((dim, dim), (dim, dim)).copy_from(&re);
    emb.view_mut((0, dim), (dim, dim)).copy_from(&(-&im));
    emb.view_mut((dim, 0), (dim, dim)).copy_from(&im);
    let eig = nalgebra::SymmetricEigen::new(emb);
    let mut order: Vec<usize> = (0..2 * dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lowest = order[0];
    let energy = eig.eigenvalues[lowest];
    // order[1] is the embedding twin of order[0]; the physical gap is to order[2].
    let degenerate = eig.eigenvalues[order[2]] - energy < DEGENERACY_GAP;
    let col = eig.eigenvectors.column(lowest);
    let mut amps: Vec<Complex64> =
        (0..dim).map(|k| Complex64::new(col[k], col[dim + k])).collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Ok(GroundState { energy, state: StateVector { n, amps }, degenerate })
}

/// Iterative route: Lanczos with full reorthogonalisation over the
/// Pauli-term matvec; restarts from the best Ritz vector until the residual
/// target is met.
fn lanczos_ground(h: &Hamiltonian) -> Result<GroundState, SimulatorError> {
    let n = h.num_qubits();
    let dim = 1usize << n;
    let max_basis = 160.min(dim);
    let max_restarts = 12;

    // Deterministic full-support start vector.
    let mut v: Vec<Complex64> = (0..dim)
        .map(|k| {
            let t = (k as f64 + 1.0) * 0.7390851332151607;
            Complex64::new(t.sin() + 0.35, t.cos() * 0.5 + 0.1)
        })
        .collect();
    normalize(&mut v);

    let mut best_residual = f64::INFINITY;
    for _ in 0..max_restarts {
        let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        for j in 0..max_basis {
            let mut w = apply_hamiltonian(h, &basis[j]);
            if j > 0 {
                let b = betas[j - 1];
                for (wk, pk) in w.iter_mut().zip(&basis[j - 1]) {
                    *wk -= b * pk;
                }
            }
            let a = dot(&basis[j], &w).re;
            alphas.push(a);
            for (wk, pk) in w.iter_mut().zip(&basis[j]) {
                *wk -= a * pk;
            }
            // Full reorthogonalisation keeps the basis numerically orthonormal.
            for prev in &basis {
                let c = dot(prev, &w);
                for (wk, pk) in w.iter_mut().zip(prev) {
                    *wk -= c * pk;
                }
            }
            let b = norm_of(&w);
            if b < 1e-13 || basis.len() == max_basis {
                break;
            }
            betas.push(b);
            for wk in &mut w {
                *wk /= b;
            }
            basis.push(w);
        }
        let k = alphas.len();
        let mut tri = DMatrix::<f64>::zeros(k, k);
        for j in 0..k {
            tri[(j, j)] = alphas[j];
            if j + 1 < k {
                tri[(j, j + 1)] = betas[j];
                tri[(j + 1, j)] = betas[j];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(tri);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lowest = order[0];
        let energy = eig.eigenvalues[lowest];
        let y: DVector<f64> = eig.eigenvectors.column(lowest).into();
        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        for (j, base) in basis.iter().enumerate() {
            for (xk, bk) in x.iter_mut().zip(base) {
                *xk += y[j] * bk;
            }
        }
        normalize(&mut x);
        let hx = apply_hamiltonian(h, &x);
        let residual: f64 = hx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - energy * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        best_residual = best_residual.min(residual);
        if residual <= RESIDUAL_TOL {
            let degenerate = order.len() > 1 && eig.eigenvalues[order[1]] - energy < DEGENERACY_GAP;
            return Ok(GroundState { energy, state: StateVector { n, amps: x }, degenerate });
        }
        v = x;
    }
    Err(SimulatorError::NoConvergence { best: best_residual })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_of(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let nrm = norm_of(v);
    for a in v.iter_mut() {
        *a /= nrm;
    }
}

/// Measures every qubit in the product basis `B`, drawing one outcome string
/// from the Born distribution. Qubit `i` is rotated into the measurement
/// frame (X via H, Y via H·S†, Z untouched) and the resulting bitstring maps
/// to ±1 eigenvalues.
pub fn measure_in_basis<R: Rng + ?Sized>(
    state: &StateVector,
    basis: &PauliString,
    rng: &mut R,
) -> Result<ShotRecord, SimulatorError> {
    let n = state.n;
    if basis.len() != n {
        return Err(SimulatorError::LengthMismatch { operator: basis.len(), state: n });
    }
    if let Some(pos) = (0..n).find(|&i| basis.letter(i) == Pauli::I) {
        return Err(SimulatorError::BasisNotFullWeight(pos));
    }
    let mut amps = state.amps.clone();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        let letter = basis.letter(i);
        if letter == Pauli::Z {
            continue;
        }
        let stride = 1usize << (n - 1 - i);
        for base in 0..amps.len() {
            if base & stride != 0 {
                continue;
            }
            let (lo, hi) = (base, base | stride);
            let a = amps[lo];
            let b = if letter == Pauli::Y {
                // S† on this qubit: |1⟩ picks up -i.
                amps[hi] * Complex64::new(0.0, -1.0)
            } else {
                amps[hi]
            };
            amps[lo] = (a + b) * inv_sqrt2;
            amps[hi] = (a - b) * inv_sqrt2;
        }
    }
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    let mut picked = amps.len() - 1;
    for (k, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if draw < acc {
            picked = k;
            break;
        }
    }
    let outcomes: Vec<i8> = (0..n).map(|i| 1 - 2 * state.bit_of(picked, i) as i8).collect();
    Ok(ShotRecord::new(*basis, outcomes))
}

const STATE_MAGIC: &[u8; 4] = b"PDSV";

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Writes the state as little-endian interleaved re/im doubles behind a
/// small header (magic, n, checksum of the payload).
pub fn save_state(state: &StateVector, path: &Path) -> Result<(), SimulatorError> {
    let mut payload = Vec::with_capacity(state.amps.len() * 16);
    for a in &state.amps {
        payload.extend_from_slice(&a.re.to_le_bytes());
        payload.extend_from_slice(&a.im.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(STATE_MAGIC)?;
    f.write_all(&(state.n as u32).to_le_bytes())?;
    f.write_all(&fnv1a(&payload).to_le_bytes())?;
    f.write_all(&payload)?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<StateVector, SimulatorError> {
    let mut f = std::fs::File::open(path)?;
    let mut header = [0u8; 16];
    f.read_exact(&mut header)?;
    if &header[0..4] != STATE_MAGIC {
        return Err(SimulatorError::BadStateFile("bad magic".into()));
    }
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let checksum = u64::from_le_bytes(header[8..16].try_into().unwrap());
    if n == 0 || n > MAX_SIM_QUBITS {
        return Err(SimulatorError::BadStateFile(format!("bad qubit count {n}")));
    }
    let mut payload = Vec::new();
    f.read_to_end(&mut payload)?;
    if payload.len() != (1 << n) * 16 {
        return Err(SimulatorError::BadStateFile(format!(
            "expected {} payload bytes, got {}",
            (1usize << n) * 16,
            payload.len()
        )));
    }
    if fnv1a(&payload) != checksum {
        return Err(SimulatorError::BadStateFile("checksum mismatch".into()));
    }
    let amps: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    StateVector::new(n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn ground_of_minus_z() {
        let h = Hamiltonian::parse("-1.0 Z").unwrap();
        let g = ground_state(&h).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-12);
        assert!((g.state.amplitudes()[0].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ground_of_x() {
        let h = Hamiltonian::parse("1.0 X").unwrap();
        let g = ground_state(&h).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-12);
        // (|0⟩ - |1⟩)/√2 up to global phase
        let a = g.state.amplitudes();
        assert!((a[0] + a[1]).norm() < 1e-9);
        assert!((a[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn degenerate_ground_is_flagged() {
        let h = Hamiltonian::parse("1.0 ZZ").unwrap();
        let g = ground_state(&h).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-12);
        assert!(g.degenerate);
    }

    #[test]
    fn qubit_cap_is_enforced() {
        let word = "Z".repeat(15);
        let h = Hamiltonian::parse(&format!("1.0 {word}")).unwrap();
        assert!(matches!(ground_state(&h), Err(SimulatorError::TooManyQubits(15))));
    }

    #[test]
    fn expectation_basics() {
        let zero = StateVector::basis_state(1, 0);
        assert_eq!(expectation(&zero, &ps("Z")).unwrap(), 1.0);
        assert_eq!(expectation(&zero, &ps("X")).unwrap(), 0.0);
        assert_eq!(expectation(&zero, &PauliString::identity(1)).unwrap(), 1.0);
    }

    #[test]
    fn expectation_multi_qubit_signs() {
        let s = StateVector::basis_state(3, 0b011); // |011⟩: qubit0=0, qubit1=1, qubit2=1
        assert_eq!(expectation(&s, &ps("ZII")).unwrap(), 1.0);
        assert_eq!(expectation(&s, &ps("IZI")).unwrap(), -1.0);
        assert_eq!(expectation(&s, &ps("ZZZ")).unwrap(), 1.0);
    }

    // Independent route: power iteration on (σI - H) over a materialised
    // matrix, checked against the production eigensolver.
    #[test]
    fn ground_state_matches_power_iteration_oracle() {
        let h = Hamiltonian::parse(crate::fixtures::H2_BK).unwrap();
        let g = ground_state(&h).unwrap();

        let n = h.num_qubits();
        let dim = 1 << n;
        let mut mat = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (alpha, p) in h.terms() {
            let (flip, phase) = pauli_action(p, n);
            for k in 0..dim {
                mat[k ^ flip][k] += alpha * phase(k);
            }
        }
        let sigma: f64 = h.terms().iter().map(|(a, _)| a.abs()).sum::<f64>() + 1.0;
        let mut v: Vec<Complex64> =
            (0..dim).map(|k| Complex64::new(1.0 + (k as f64 * 0.3).sin(), 0.2)).collect();
        normalize(&mut v);
        for _ in 0..20000 {
            let mut w = vec![Complex64::new(0.0, 0.0); dim];
            for (r, row) in mat.iter().enumerate() {
                let mut acc = sigma * v[r];
                for (c, m) in row.iter().enumerate() {
                    acc -= m * v[c];
                }
                w[r] = acc;
            }
            normalize(&mut w);
            v = w;
        }
        let mut hv = vec![Complex64::new(0.0, 0.0); dim];
        for (r, row) in mat.iter().enumerate() {
            for (c, m) in row.iter().enumerate() {
                hv[r] += m * v[c];
            }
        }
        let rayleigh = dot(&v, &hv).re;
        assert!(
            (rayleigh - g.energy).abs() < 1e-8,
            "oracle {rayleigh} vs solver {}",
            g.energy
        );
        let overlap: Complex64 = dot(&v, &g.state.amps);
        assert!(overlap.norm() > 1.0 - 1e-7, "states disagree, |overlap| = {}", overlap.norm());
    }

    #[test]
    fn lanczos_path_reaches_residual() {
        // 9 qubits forces the iterative route.
        let text = "1.0 ZZIIIIIII\n-0.7 IZZIIIIII\n0.5 IIXXIIIII\n0.25 IIIIZIIII\n\
                    -0.4 IIIIIXXII\n0.3 IIIIIIIZZ\n0.2 XIIIIIIIX\n";
        let h = Hamiltonian::parse(text).unwrap();
        let g = ground_state(&h).unwrap();
        let hv = apply_hamiltonian(&h, &g.state.amps);
        let res: f64 = hv
            .iter()
            .zip(g.state.amplitudes())
            .map(|(a, b)| (a - g.energy * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res <= RESIDUAL_TOL, "residual {res}");
        // Variational sanity: a handful of random states sit above the minimum.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut v: Vec<Complex64> = (0..1 << 9)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            normalize(&mut v);
            let hv = apply_hamiltonian(&h, &v);
            assert!(dot(&v, &hv).re >= g.energy - 1e-9);
        }
    }

    #[test]
    fn measure_z_on_zero_is_deterministic() {
        let zero = StateVector::basis_state(1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let shot = measure_in_basis(&zero, &ps("Z"), &mut rng).unwrap();
            assert_eq!(shot.outcomes(), &[1]);
        }
    }

    #[test]
    fn measure_x_on_zero_is_fair() {
        let zero = StateVector::basis_state(1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut plus = 0usize;
        let shots = 100_000;
        for _ in 0..shots {
            if measure_in_basis(&zero, &ps("X"), &mut rng).unwrap().outcomes()[0] == 1 {
                plus += 1;
            }
        }
        // chi-squared with 1 dof at p=0.001 is 10.83
        let expected = shots as f64 / 2.0;
        let chi2 = ((plus as f64 - expected).powi(2) / expected) * 2.0;
        assert!(chi2 < 10.83, "chi2 = {chi2}");
    }

    #[test]
    fn bell_state_xx_correlation() {
        let amps = vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let bell = StateVector::new(2, amps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let shot = measure_in_basis(&bell, &ps("XX"), &mut rng).unwrap();
            assert_eq!(shot.outcomes()[0] * shot.outcomes()[1], 1);
        }
    }

    #[test]
    fn measurement_products_estimate_expectations() {
        let h = Hamiltonian::parse(crate::fixtures::H2_BK).unwrap();
        let g = ground_state(&h).unwrap();
        let basis = ps("ZZZZ");
        let p = ps("ZIZI");
        let exact = expectation(&g.state, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shots = 100_000;
        let mut sum = 0.0;
        for _ in 0..shots {
            let shot = measure_in_basis(&g.state, &basis, &mut rng).unwrap();
            sum += shot.product_over(p.support()) as f64;
        }
        let mean = sum / shots as f64;
        let stderr = (1.0 / shots as f64).sqrt(); // outcome variance ≤ 1
        assert!((mean - exact).abs() < 5.0 * stderr, "mean {mean} exact {exact}");
    }

    #[test]
    fn state_file_round_trip() {
        let h = Hamiltonian::parse(crate::fixtures::H2_JW).unwrap();
        let g = ground_state(&h).unwrap();
        let dir = std::env::temp_dir().join(format!("paulidd-state-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("h2_jw.state");
        save_state(&g.state, &path).unwrap();
        let loaded = load_state(&path).unwrap();
        assert_eq!(loaded, g.state);
        // Flipping a payload byte must be rejected.
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0x40;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_state(&path), Err(SimulatorError::BadStateFile(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
