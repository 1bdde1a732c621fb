//! Brute-force reference: the full pair+bath state vector, evolved exactly
//! and traced back down to the pair.
//!
//! The state is a dense vector indexed by `pair * 2^M + bits`, where `pair`
//! is the `{↑↑, ↑↓, ↓↑, ↓↓}` index and bit `k` of `bits` is bath spin `k`
//! (`0` = up). For two separate baths the spins of bath 1 come first. The
//! Hamiltonian is diagonal in this basis, so each central branch simply
//! attaches a product of phased bath spinors.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::types::{Bath, DensityMatrix4, Environment, PairState};

/// Largest total qubit count (pair plus bath) the oracle will allocate.
pub const MAX_QUBITS: usize = 24;

/// `σz` eigenvalues `(z₁, z₂)` of the central pair for each basis index.
const BRANCH_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Tensor product of single-spin states `α e^{−iφ_k}|↑⟩ + β e^{iφ_k}|↓⟩`.
fn product_state<'a>(spins: impl Iterator<Item = (&'a crate::types::BathSpin, f64)>) -> Vec<Complex64> {
    let mut state = vec![Complex64::new(1.0, 0.0)];
    for (spin, phase) in spins {
        let up = spin.alpha() * Complex64::from_polar(1.0, -phase);
        let down = spin.beta() * Complex64::from_polar(1.0, phase);
        let mut next = Vec::with_capacity(state.len() * 2);
        next.extend(state.iter().map(|&a| a * up));
        next.extend(state.iter().map(|&a| a * down));
        state = next;
    }
    state
}

/// State of a separate bath attached to a central spin with `σz`
/// eigenvalue `z` after time `t`: each spin acquires phase `z ω_k t`.
pub fn separate_bath_state(bath: &Bath, z: f64, t: f64) -> Result<Vec<Complex64>> {
    if bath.is_common() {
        return invalid("separate_bath_state called on a common bath");
    }
    Ok(product_state(bath.spins().iter().map(|s| (s, z * s.omega() * t))))
}

/// State of a common bath in the central branch `(z₁, z₂)` after time `t`:
/// each spin acquires phase `(z₁ ω₁ₖ + z₂ ω₂ₖ) t`.
pub fn common_bath_state(bath: &Bath, z1: f64, z2: f64, t: f64) -> Result<Vec<Complex64>> {
    if !bath.is_common() {
        return invalid("common_bath_state called on a separate bath");
    }
    Ok(product_state(bath.spins().iter().map(|s| {
        let w2 = s.omega2().unwrap_or(0.0);
        (s, (z1 * s.omega() + z2 * w2) * t)
    })))
}

fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    // `a` occupies the low bits
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &y in b {
        out.extend(a.iter().map(|&x| x * y));
    }
    out
}

/// The full evolved state `Σ_i a_i |i⟩ ⊗ |bath branch i (t)⟩`.
pub fn evolve_full_state(psi: &PairState, env: &Environment, t: f64) -> Result<Vec<Complex64>> {
    let qubits = env.bath_spins() + 2;
    if qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "oracle needs {qubits} qubits, limit is {MAX_QUBITS}"
        )));
    }
    let dim = 1usize << env.bath_spins();
    let mut full = Vec::with_capacity(4 * dim);
    for (i, &(z1, z2)) in BRANCH_SIGNS.iter().enumerate() {
        let amp = psi.amplitudes()[i];
        let branch = match env {
            Environment::Separate { bath1, bath2 } => {
                kron(&separate_bath_state(bath1, z1, t)?, &separate_bath_state(bath2, z2, t)?)
            }
            Environment::Common(bath) => common_bath_state(bath, z1, z2, t)?,
        };
        full.extend(branch.into_iter().map(|b| amp * b));
    }
    Ok(full)
}

/// `ρ_ij = Σ_b ⟨i b|Ψ⟩⟨Ψ|j b⟩`.
pub fn partial_trace_pair(state: &[Complex64]) -> Result<DensityMatrix4> {
    if state.len() < 4 || !state.len().is_multiple_of(4) || !(state.len() / 4).is_power_of_two() {
        return invalid(format!(
            "state of length {} is not 4·2^m for any bath size m",
            state.len()
        ));
    }
    let dim = state.len() / 4;
    let block = |i: usize| &state[i * dim..(i + 1) * dim];
    let mut rows = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let v: Complex64 = block(i)
                .iter()
                .zip(block(j))
                .map(|(x, y)| x * y.conj())
                .sum();
            rows[i][j] = v;
            rows[j][i] = v.conj();
        }
        rows[i][i].im = 0.0;
    }
    DensityMatrix4::from_rows(rows)
}

/// Reduced pair state at time `t` computed the brute-force way.
pub fn oracle_rho(psi: &PairState, env: &Environment, t: f64) -> Result<DensityMatrix4> {
    partial_trace_pair(&evolve_full_state(psi, env, t)?)
}
