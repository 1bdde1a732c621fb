//! Concurrence of the pair, by the general two-qubit recipe and by the
//! closed forms that hold for Bell-state initial conditions.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::density::spin_flip_matrix;
use crate::error::{invalid, Error, Result};
use crate::types::{check_bell_index, DensityMatrix4, PSD_TOLERANCE};

/// Eigenvalues in `[−tol, 0)` are treated as zero; anything lower is an error.
pub const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// `√ρ` through the spectral decomposition of the Hermitian `ρ`.
fn hermitian_sqrt(rho: &DensityMatrix4) -> Result<Matrix4<Complex64>> {
    let eig = rho.matrix().symmetric_eigen();
    if let Some(&min) = eig.eigenvalues.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
    }
    let v = &eig.eigenvectors;
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)));
    Ok(v * d * v.adjoint())
}

/// Eigenvalues of `ρρ̃`, largest first.
///
/// They are computed as the spectrum of the Hermitian `√ρ ρ̃ √ρ`, which is
/// similar to `ρρ̃`. Round-off negatives down to
/// [`NEGATIVE_EIGENVALUE_TOLERANCE`] are clamped to zero.
pub fn flip_product_eigenvalues(rho: &DensityMatrix4) -> Result<[f64; 4]> {
    let sq = hermitian_sqrt(rho)?;
    let tilde = spin_flip_matrix(rho.matrix());
    let h = sq * tilde * sq;
    let h = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    for l in ev.iter_mut() {
        if *l < -NEGATIVE_EIGENVALUE_TOLERANCE {
            return Err(Error::InternalConsistency(format!(
                "ρρ̃ has eigenvalue {l:e} below round-off"
            )));
        }
        *l = l.max(0.0);
    }
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok([ev[0], ev[1], ev[2], ev[3]])
}

/// Wootters concurrence `max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄}`.
///
/// The square roots `√λᵢ` are taken as the singular values of `√ρ √ρ̃`
/// (whose Gram matrix is `√ρ ρ̃ √ρ`) rather than as square roots of computed
/// eigenvalues, so eigenvalues that vanish exactly do not turn into `√ε`
/// noise.
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64> {
    // surfaces negative spectra as errors
    flip_product_eigenvalues(rho)?;
    let sq = hermitian_sqrt(rho)?;
    let x = sq * spin_flip_matrix(&sq);
    let mut s: Vec<f64> = x.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let c = s[0] - s[1] - s[2] - s[3];
    Ok(c.clamp(0.0, 1.0))
}

/// `C = |r₁||r₂|`, the concurrence of every Bell state in two separate baths.
pub fn concurrence_closed_two_baths(r1: Complex64, r2: Complex64) -> f64 {
    r1.norm() * r2.norm()
}

/// Common-bath concurrence of Bell state `bell_index`: `|r₁₂⁺|` for the
/// parallel states 1 and 3, `|r₁₂⁻|` for the antiparallel states 2 and 4.
pub fn concurrence_closed_common(bell_index: u8, r12p: Complex64, r12m: Complex64) -> Result<f64> {
    check_bell_index(bell_index)?;
    Ok(match bell_index {
        1 | 3 => r12p.norm(),
        _ => r12m.norm(),
    })
}

fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement entropy `h((1 + √(1 − C²))/2)` of a two-qubit state with
/// concurrence `c`, `h` being the binary entropy in bits.
pub fn entanglement_entropy_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return invalid(format!("concurrence must lie in [0, 1], got {c}"));
    }
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}
