//! Reduced density matrix of the central pair.
//!
//! Populations never change under pure dephasing. The coherence between
//! basis states `i` and `j` is `a_i a_j^*` times the overlap of the bath
//! states attached to the two branches, which is one of the decoherence
//! factors (or its conjugate, below the diagonal).

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::decoherence::factors_at;
use crate::error::{invalid, Result};
use crate::types::{DensityMatrix4, Environment, PairState};

const FACTOR_TOLERANCE: f64 = 1e-12;

fn check_factor(name: &str, r: Complex64) -> Result<()> {
    if !r.re.is_finite() || !r.im.is_finite() || r.norm() > 1.0 + FACTOR_TOLERANCE {
        return invalid(format!("decoherence factor {name} = {r} must have modulus ≤ 1"));
    }
    Ok(())
}

/// Fills `ρ_ij = a_i a_j^* c_ij` from the upper-triangle coherences
/// `c = [c01, c02, c03, c12, c13, c23]`.
fn assemble(psi: &PairState, upper: [Complex64; 6]) -> Result<DensityMatrix4> {
    let a = psi.amplitudes();
    let mut m = Matrix4::zeros();
    let mut k = 0;
    for i in 0..4 {
        m[(i, i)] = Complex64::new(a[i].norm_sqr(), 0.0);
        for j in (i + 1)..4 {
            let v = a[i] * a[j].conj() * upper[k];
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
            k += 1;
        }
    }
    DensityMatrix4::new(m)
}

/// Reduced state for two separate baths. Spin 1 flipping between the two
/// branches contributes `r₁` (or `r₁^*`), spin 2 contributes `r₂`.
pub fn rho_two_baths(psi: &PairState, r1: Complex64, r2: Complex64) -> Result<DensityMatrix4> {
    check_factor("r1", r1)?;
    check_factor("r2", r2)?;
    assemble(psi, [r2, r1, r1 * r2, r1 * r2.conj(), r1, r2])
}

/// Reduced state for a common bath: as for two baths, except the
/// `(↑↑, ↓↓)` coherence carries `r₁₂⁺` and the `(↑↓, ↓↑)` coherence carries
/// `r₁₂⁻`.
///
/// The four factors are taken as given. Factor sets that no bath could
/// produce may yield a matrix that is not positive semidefinite, which is
/// reported as an invalid argument.
pub fn rho_common_bath(
    psi: &PairState,
    r1: Complex64,
    r2: Complex64,
    r12p: Complex64,
    r12m: Complex64,
) -> Result<DensityMatrix4> {
    check_factor("r1", r1)?;
    check_factor("r2", r2)?;
    check_factor("r12+", r12p)?;
    check_factor("r12-", r12m)?;
    assemble(psi, [r2, r1, r12p, r12m, r1, r2])
}

/// `σy⊗σy`, real in this basis.
fn sigma_yy() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

pub(crate) fn spin_flip_matrix(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let yy = sigma_yy();
    yy * m.map(|z| z.conj()) * yy
}

/// `ρ̃ = (σy⊗σy) ρ^* (σy⊗σy)`.
pub fn spin_flip(rho: &DensityMatrix4) -> DensityMatrix4 {
    DensityMatrix4(spin_flip_matrix(rho.matrix()))
}

/// Reduced state in `env` at time `t`.
pub fn rho_at(psi: &PairState, env: &Environment, t: f64) -> Result<DensityMatrix4> {
    let f = factors_at(env, t)?;
    match (f.r12_plus, f.r12_minus) {
        (Some(p), Some(m)) => rho_common_bath(psi, f.r1, f.r2, p, m),
        _ => rho_two_baths(psi, f.r1, f.r2),
    }
}

/// One reduced density matrix per time in `grid`.
pub fn rho_time_sweep(psi: &PairState, env: &Environment, grid: &[f64]) -> Result<Vec<DensityMatrix4>> {
    if grid.is_empty() {
        return invalid("time grid is empty");
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[0] > w[1]) {
        return invalid("time grid must be finite and sorted");
    }
    grid.iter().map(|&t| rho_at(psi, env, t)).collect()
}
