//! Decoherence factors and their Gaussian decay rate.
//!
//! Every factor has the form `Π_k (|α_k|² e^{−2iω_k t} + |β_k|² e^{2iω_k t})`
//! for some effective per-spin frequency `ω_k`. Each term is a convex
//! combination of two unit phases, so its modulus never exceeds one and the
//! product is evaluated directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::types::{Bath, BathSpin, DecoherenceFactors, Environment};

/// Sign of the combined coupling `ω₁ₖ ± ω₂ₖ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSign {
    Plus,
    Minus,
}

/// Which central spin a common-bath factor refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CentralSpin {
    First,
    Second,
}

/// Effective per-spin frequency entering [`gaussian_rate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencySelector {
    /// `ω_k` of a separate bath.
    Single,
    /// `ω₁ₖ` of a common bath.
    First,
    /// `ω₂ₖ` of a common bath.
    Second,
    /// `ω₁ₖ + ω₂ₖ` of a common bath.
    Sum,
    /// `ω₁ₖ − ω₂ₖ` of a common bath.
    Difference,
}

impl FrequencySelector {
    fn effective(self, spin: &BathSpin) -> f64 {
        // omega2 is guaranteed present for common selectors by the bath check
        let w2 = spin.omega2().unwrap_or(0.0);
        match self {
            FrequencySelector::Single | FrequencySelector::First => spin.omega(),
            FrequencySelector::Second => w2,
            FrequencySelector::Sum => spin.omega() + w2,
            FrequencySelector::Difference => spin.omega() - w2,
        }
    }

    fn needs_common(self) -> bool {
        !matches!(self, FrequencySelector::Single)
    }
}

/// One spin's contribution `|α|² e^{−ix} + |β|² e^{ix}` with `x = 2ωt`,
/// written as `cos x + i w sin x` where `w = |β|² − |α|²` over the total
/// weight. The value at `x = 0` is exactly `1`.
#[inline]
fn spin_term(spin: &BathSpin, x: f64) -> Complex64 {
    let p = spin.up_weight();
    let q = spin.down_weight();
    let w = (q - p) / (p + q);
    let (s, c) = x.sin_cos();
    Complex64::new(c, w * s)
}

fn product(bath: &Bath, t: f64, sel: FrequencySelector) -> Complex64 {
    bath.spins().iter().fold(Complex64::new(1.0, 0.0), |acc, spin| {
        acc * spin_term(spin, 2.0 * sel.effective(spin) * t)
    })
}

/// `rₙ(t)` of a separate bath.
pub fn factor_separate(bath: &Bath, t: f64) -> Result<Complex64> {
    if bath.is_common() {
        return invalid("factor_separate called on a common bath");
    }
    Ok(product(bath, t, FrequencySelector::Single))
}

/// `r₁₂^±(t)` of a common bath.
pub fn factor_common_pm(bath: &Bath, sign: PairSign, t: f64) -> Result<Complex64> {
    if !bath.is_common() {
        return invalid("factor_common_pm called on a separate bath");
    }
    let sel = match sign {
        PairSign::Plus => FrequencySelector::Sum,
        PairSign::Minus => FrequencySelector::Difference,
    };
    Ok(product(bath, t, sel))
}

/// `r₁(t)` or `r₂(t)` of a common bath (shared amplitudes, per-spin coupling
/// to the chosen central spin).
pub fn factor_common_single(bath: &Bath, which: CentralSpin, t: f64) -> Result<Complex64> {
    if !bath.is_common() {
        return invalid("factor_common_single called on a separate bath");
    }
    let sel = match which {
        CentralSpin::First => FrequencySelector::First,
        CentralSpin::Second => FrequencySelector::Second,
    };
    Ok(product(bath, t, sel))
}

/// `a = 16 Σ_k |α_k|²|β_k|² ω_eff,k²`, the rate of the `e^{−at²}` envelope
/// that `|r(t)|` follows for large baths.
pub fn gaussian_rate(bath: &Bath, selector: FrequencySelector) -> Result<f64> {
    if selector.needs_common() != bath.is_common() {
        return invalid(format!(
            "frequency selector {selector:?} does not apply to a {:?} bath",
            bath.label()
        ));
    }
    Ok(16.0
        * bath
            .spins()
            .iter()
            .map(|s| {
                let w = selector.effective(s);
                s.up_weight() * s.down_weight() * (w * w)
            })
            .sum::<f64>())
}

/// All factors of an environment at time `t`.
pub fn factors_at(env: &Environment, t: f64) -> Result<DecoherenceFactors> {
    match env {
        Environment::Separate { bath1, bath2 } => Ok(DecoherenceFactors::two_baths(
            t,
            factor_separate(bath1, t)?,
            factor_separate(bath2, t)?,
        )),
        Environment::Common(bath) => Ok(DecoherenceFactors::common(
            t,
            factor_common_single(bath, CentralSpin::First, t)?,
            factor_common_single(bath, CentralSpin::Second, t)?,
            factor_common_pm(bath, PairSign::Plus, t)?,
            factor_common_pm(bath, PairSign::Minus, t)?,
        )),
    }
}
