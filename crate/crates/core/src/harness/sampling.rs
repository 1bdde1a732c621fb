//! Random bath realizations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::types::{bath_spin_from_angles, Bath, BathLabel};

/// Law for a coupling frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OmegaDist {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
    Constant { value: f64 },
    /// Second coupling equal to the first one of the same spin
    /// (`ω₂ₖ = ω₁ₖ`). Only valid as `omega2_dist`.
    Equal,
}

impl Default for OmegaDist {
    fn default() -> Self {
        OmegaDist::Uniform { lo: 0.0, hi: 1.0 }
    }
}

impl OmegaDist {
    fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            OmegaDist::Uniform { lo, hi } if !finite(&[lo, hi]) || lo > hi => {
                invalid(format!("uniform coupling law needs finite lo ≤ hi, got [{lo}, {hi}]"))
            }
            OmegaDist::Gaussian { mean, sd } if !finite(&[mean, sd]) || sd < 0.0 => {
                invalid(format!("gaussian coupling law needs finite mean and sd ≥ 0, got ({mean}, {sd})"))
            }
            OmegaDist::Constant { value } if !value.is_finite() => {
                invalid(format!("constant coupling must be finite, got {value}"))
            }
            _ => Ok(()),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, first: f64) -> f64 {
        match *self {
            OmegaDist::Uniform { lo, hi } => {
                if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..hi)
                }
            }
            OmegaDist::Gaussian { mean, sd } => {
                // sd validated non-negative and finite
                Normal::new(mean, sd).map(|n| n.sample(rng)).unwrap_or(mean)
            }
            OmegaDist::Constant { value } => value,
            OmegaDist::Equal => first,
        }
    }
}

impl fmt::Display for OmegaDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaDist::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            OmegaDist::Gaussian { mean, sd } => write!(f, "gaussian:{mean},{sd}"),
            OmegaDist::Constant { value } => write!(f, "constant:{value}"),
            OmegaDist::Equal => write!(f, "equal"),
        }
    }
}

/// Parses `uniform:LO,HI`, `gaussian:MEAN,SD`, `constant:VALUE` or `equal`.
impl FromStr for OmegaDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "equal" {
            return Ok(OmegaDist::Equal);
        }
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("cannot parse coupling law {s:?}")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad number in coupling law {s:?}: {e}")))?;
        let dist = match (kind, nums.as_slice()) {
            ("uniform", &[lo, hi]) => OmegaDist::Uniform { lo, hi },
            ("gaussian", &[mean, sd]) => OmegaDist::Gaussian { mean, sd },
            ("constant", &[value]) => OmegaDist::Constant { value },
            _ => return invalid(format!("cannot parse coupling law {s:?}")),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// How polar angles of bath spins are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaLaw {
    /// `θ` uniform on `[0, π]`.
    #[default]
    UniformAngle,
    /// Directions uniform on the sphere (`cos θ` uniform on `[−1, 1]`).
    UniformSphere,
}

/// Everything needed to draw one bath realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub n_spins: usize,
    pub label: BathLabel,
    #[serde(default)]
    pub omega_dist: OmegaDist,
    /// Coupling to the second central spin; used for common baths only.
    #[serde(default)]
    pub omega2_dist: OmegaDist,
    #[serde(default)]
    pub theta_law: ThetaLaw,
    pub seed: u64,
}

impl SamplingSpec {
    pub fn new(n_spins: usize, label: BathLabel, seed: u64) -> Self {
        Self {
            n_spins,
            label,
            omega_dist: OmegaDist::default(),
            omega2_dist: OmegaDist::default(),
            theta_law: ThetaLaw::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.omega_dist.validate()?;
        if self.omega_dist == OmegaDist::Equal {
            return invalid("the `equal` law only applies to the second coupling");
        }
        if self.label.is_common() {
            self.omega2_dist.validate()?;
        }
        Ok(())
    }
}

/// Draws a bath from `spec` using RNG stream 0 of `spec.seed`.
pub fn sample_bath(spec: &SamplingSpec) -> Result<Bath> {
    sample_bath_stream(spec, 0)
}

/// Draws a bath from an independent ChaCha stream of `spec.seed`. Distinct
/// streams give independent realizations; the same `(seed, stream)` always
/// gives the same bath.
pub fn sample_bath_stream(spec: &SamplingSpec, stream: u64) -> Result<Bath> {
    spec.validate()?;
    if spec.n_spins == 0 {
        return Ok(Bath::trivial(spec.label));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let mut spins = Vec::with_capacity(spec.n_spins);
    for _ in 0..spec.n_spins {
        let theta = match spec.theta_law {
            ThetaLaw::UniformAngle => rng.random_range(0.0..=PI),
            ThetaLaw::UniformSphere => (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos(),
        };
        let phi = rng.random_range(0.0..2.0 * PI);
        let omega = spec.omega_dist.draw(&mut rng, 0.0);
        let spin = bath_spin_from_angles(theta, phi, omega)?;
        let spin = if spec.label.is_common() {
            let omega2 = spec.omega2_dist.draw(&mut rng, omega);
            spin.with_couplings(omega, Some(omega2))
        } else {
            spin
        };
        spins.push(spin);
    }
    Bath::new(spec.label, spins)
}
