//! CHSH correlations for spin measurements in the x–z plane.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::types::{check_bell_index, DecoherenceFactors, DensityMatrix4};

/// Largest imaginary part of a correlator accepted as round-off.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// Quantum upper bound on `|S|`.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// Measurement directions `θ₁, θ₂, θ₁′, θ₂′` (radians from the z axis towards x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub theta1: f64,
    pub theta2: f64,
    pub theta1p: f64,
    pub theta2p: f64,
}

impl AngleSet {
    pub fn new(theta1: f64, theta2: f64, theta1p: f64, theta2p: f64) -> Result<Self> {
        if [theta1, theta2, theta1p, theta2p].iter().any(|a| !a.is_finite()) {
            return invalid("measurement angles must be finite");
        }
        Ok(Self {
            theta1,
            theta2,
            theta1p,
            theta2p,
        })
    }
}

/// `θ₁ = 0, θ₂ = π/4, θ₁′ = π/2, θ₂′ = 3π/4`, for which `A = B = √2`.
pub fn canonical_angles() -> AngleSet {
    AngleSet {
        theta1: 0.0,
        theta2: FRAC_PI_4,
        theta1p: FRAC_PI_2,
        theta2p: 3.0 * FRAC_PI_4,
    }
}

/// `cos θ σz + sin θ σx`.
pub fn measurement_operator(theta: f64) -> Matrix2<Complex64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-c, 0.0),
    )
}

/// `E(θ₁, θ₂) = Tr{ĉ₁(θ₁) ⊗ ĉ₂(θ₂) ρ}`.
pub fn correlator(theta1: f64, theta2: f64, rho: &DensityMatrix4) -> Result<f64> {
    let a = measurement_operator(theta1);
    let b = measurement_operator(theta2);
    let ab: Matrix4<Complex64> = a.kronecker(&b);
    let e = (ab * rho.matrix()).trace();
    if e.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::InternalConsistency(format!(
            "correlator E({theta1}, {theta2}) has imaginary part {:e}",
            e.im
        )));
    }
    Ok(e.re)
}

/// `S = E(θ₁,θ₂) − E(θ₁,θ₂′) + E(θ₁′,θ₂′) + E(θ₁′,θ₂)`.
pub fn chsh_s(angles: &AngleSet, rho: &DensityMatrix4) -> Result<f64> {
    let s = correlator(angles.theta1, angles.theta2, rho)?
        - correlator(angles.theta1, angles.theta2p, rho)?
        + correlator(angles.theta1p, angles.theta2p, rho)?
        + correlator(angles.theta1p, angles.theta2, rho)?;
    if s.abs() > TSIRELSON_BOUND + 1e-9 {
        return Err(Error::InternalConsistency(format!(
            "|S| = {} exceeds the Tsirelson bound",
            s.abs()
        )));
    }
    Ok(s)
}

/// The zz and xx parts `(A, B)` of the CHSH combination.
pub fn ab_coefficients(angles: &AngleSet) -> (f64, f64) {
    let comb = |f: fn(f64) -> f64| {
        f(angles.theta1) * f(angles.theta2) - f(angles.theta1) * f(angles.theta2p)
            + f(angles.theta1p) * f(angles.theta2p)
            + f(angles.theta1p) * f(angles.theta2)
    };
    (comb(f64::cos), comb(f64::sin))
}

/// Whether the pair dephases in two separate baths or one shared bath.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathGeometry {
    TwoBaths,
    Common,
}

/// Closed-form `Sᵢ` for Bell state `i`:
/// `S₁ = A + B x₊`, `S₂ = −A + B x₋`, `S₃ = A − B x₊`, `S₄ = −A − B x₋`,
/// with `x₊ = Re{r₁r₂}`, `x₋ = Re{r₁r₂^*}` for two baths and
/// `x₊ = Re{r₁₂⁺}`, `x₋ = Re{r₁₂⁻}` for a common bath.
pub fn chsh_closed_form(
    bell_index: u8,
    geometry: BathGeometry,
    angles: &AngleSet,
    factors: &DecoherenceFactors,
) -> Result<f64> {
    check_bell_index(bell_index)?;
    let (parallel, antiparallel) = match (geometry, factors.r12_plus, factors.r12_minus) {
        (BathGeometry::TwoBaths, None, None) => (
            (factors.r1 * factors.r2).re,
            (factors.r1 * factors.r2.conj()).re,
        ),
        (BathGeometry::Common, Some(p), Some(m)) => (p.re, m.re),
        _ => return invalid(format!("decoherence factors do not match a {geometry:?} scenario")),
    };
    let (a, b) = ab_coefficients(angles);
    Ok(match bell_index {
        1 => a + b * parallel,
        2 => -a + b * antiparallel,
        3 => a - b * parallel,
        _ => -a - b * antiparallel,
    })
}
