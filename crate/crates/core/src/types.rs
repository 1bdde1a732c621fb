//! Domain types shared by every other module.
//!
//! Two-qubit objects use the product basis ordering `{↑↑, ↑↓, ↓↑, ↓↓}`
//! everywhere: index `2 * s1 + s2` with `s = 0` for up and `s = 1` for down.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance accepted by constructors for `Σ|amplitude|² = 1`. Inputs inside
/// it are rescaled so the stored value is normalized to round-off.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Entrywise Hermiticity and trace tolerance used when validating a
/// [`DensityMatrix4`].
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Lowest eigenvalue still accepted as round-off around zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One environmental spin: `α|↑⟩ + β|↓⟩` with coupling frequency `omega`
/// (radians per unit time). `omega2` is the coupling to the second central
/// spin and is only present for spins of a common bath.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpin {
    alpha: Complex64,
    beta: Complex64,
    omega: f64,
    omega2: Option<f64>,
}

impl BathSpin {
    pub fn new(alpha: Complex64, beta: Complex64, omega: f64) -> Result<Self> {
        let (alpha, beta) = normalize_pair(alpha, beta)?;
        check_finite(omega, "omega")?;
        Ok(Self {
            alpha,
            beta,
            omega,
            omega2: None,
        })
    }

    /// A spin of a common bath, coupled to central spin 1 with `omega1` and
    /// to central spin 2 with `omega2`.
    pub fn new_common(alpha: Complex64, beta: Complex64, omega1: f64, omega2: f64) -> Result<Self> {
        let mut spin = Self::new(alpha, beta, omega1)?;
        check_finite(omega2, "omega2")?;
        spin.omega2 = Some(omega2);
        Ok(spin)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega2(&self) -> Option<f64> {
        self.omega2
    }

    /// `|α|²`, the probability of finding the spin up.
    pub fn up_weight(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn down_weight(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// Returns the same spin with its couplings replaced.
    pub fn with_couplings(&self, omega: f64, omega2: Option<f64>) -> Self {
        Self {
            omega,
            omega2,
            ..*self
        }
    }
}

fn check_finite(x: f64, name: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be finite, got {x}"))
    }
}

fn normalize_pair(alpha: Complex64, beta: Complex64) -> Result<(Complex64, Complex64)> {
    let n2 = alpha.norm_sqr() + beta.norm_sqr();
    if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOLERANCE {
        return invalid(format!("bath spin amplitudes not normalized: |α|²+|β|² = {n2}"));
    }
    let s = n2.sqrt();
    Ok((alpha / s, beta / s))
}

/// Builds a bath spin pointing along the polar direction `(θ, φ)`:
/// `α = cos(θ/2) e^{−iφ/2}`, `β = sin(θ/2) e^{iφ/2}`.
pub fn bath_spin_from_angles(theta: f64, phi: f64, omega: f64) -> Result<BathSpin> {
    if !(0.0..=PI).contains(&theta) {
        return invalid(format!("theta must lie in [0, π], got {theta}"));
    }
    if !(0.0..=2.0 * PI).contains(&phi) {
        return invalid(format!("phi must lie in [0, 2π], got {phi}"));
    }
    check_finite(omega, "omega")?;
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(BathSpin {
        alpha: Complex64::from_polar(c, -phi / 2.0),
        beta: Complex64::from_polar(s, phi / 2.0),
        omega,
        omega2: None,
    })
}

/// Which environment a [`Bath`] plays in a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathLabel {
    /// Separate bath coupled only to central spin 1.
    Bath1,
    /// Separate bath coupled only to central spin 2.
    Bath2,
    /// Shared bath coupled to both central spins.
    Common,
}

impl BathLabel {
    pub fn is_common(self) -> bool {
        matches!(self, BathLabel::Common)
    }
}

/// An ordered collection of bath spins.
#[derive(Clone, Debug, PartialEq)]
pub struct Bath {
    spins: Vec<BathSpin>,
    label: BathLabel,
}

impl Bath {
    /// Rejects an empty spin list (use [`Bath::trivial`]) and spins whose
    /// second coupling does not match the label.
    pub fn new(label: BathLabel, spins: Vec<BathSpin>) -> Result<Self> {
        if spins.is_empty() {
            return invalid("bath has no spins; construct the uncoupled bath with Bath::trivial");
        }
        Self::checked(label, spins)
    }

    /// The uncoupled bath: no spins, every decoherence factor is 1.
    pub fn trivial(label: BathLabel) -> Self {
        Self {
            spins: Vec::new(),
            label,
        }
    }

    pub(crate) fn checked(label: BathLabel, spins: Vec<BathSpin>) -> Result<Self> {
        for (k, spin) in spins.iter().enumerate() {
            match (label.is_common(), spin.omega2.is_some()) {
                (true, false) => return invalid(format!("spin {k} of a common bath lacks omega2")),
                (false, true) => {
                    return invalid(format!("spin {k} of a separate bath carries omega2"))
                }
                _ => {}
            }
        }
        Ok(Self { spins, label })
    }

    pub fn spins(&self) -> &[BathSpin] {
        &self.spins
    }

    pub fn label(&self) -> BathLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn is_common(&self) -> bool {
        self.label.is_common()
    }

    /// Concatenates two baths of the same label.
    pub fn concat(&self, other: &Bath) -> Result<Bath> {
        if self.label != other.label {
            return invalid("cannot concatenate baths with different labels");
        }
        let mut spins = self.spins.clone();
        spins.extend_from_slice(&other.spins);
        Ok(Bath {
            spins,
            label: self.label,
        })
    }

    /// Multiplies every coupling by `s`.
    pub fn scaled(&self, s: f64) -> Bath {
        let spins = self
            .spins
            .iter()
            .map(|sp| sp.with_couplings(sp.omega * s, sp.omega2.map(|w| w * s)))
            .collect();
        Bath {
            spins,
            label: self.label,
        }
    }
}

/// The environment of the central pair.
#[derive(Clone, Debug, PartialEq)]
pub enum Environment {
    /// Each central spin has its own bath (either may be trivial).
    Separate { bath1: Bath, bath2: Bath },
    /// Both central spins couple to one bath.
    Common(Bath),
}

impl Environment {
    pub fn separate(bath1: Bath, bath2: Bath) -> Result<Self> {
        if bath1.is_common() || bath2.is_common() {
            return invalid("separate environment needs two non-common baths");
        }
        Ok(Environment::Separate { bath1, bath2 })
    }

    pub fn common(bath: Bath) -> Result<Self> {
        if !bath.is_common() {
            return invalid("common environment needs a common bath");
        }
        Ok(Environment::Common(bath))
    }

    /// Total number of bath spins.
    pub fn bath_spins(&self) -> usize {
        match self {
            Environment::Separate { bath1, bath2 } => bath1.len() + bath2.len(),
            Environment::Common(b) => b.len(),
        }
    }
}

/// Amplitudes `(a↑↑, a↑↓, a↓↑, a↓↓)` of the central pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairState {
    amplitudes: [Complex64; 4],
}

impl PairState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOLERANCE {
            return invalid(format!("pair state not normalized: Σ|a|² = {n2}"));
        }
        let s = n2.sqrt();
        Ok(Self {
            amplitudes: amplitudes.map(|a| a / s),
        })
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PairState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix4 {
        let a = &self.amplitudes;
        DensityMatrix4(Matrix4::from_fn(|i, j| a[i] * a[j].conj()))
    }
}

/// The Bell state `|e_index⟩`:
/// `e₁ = (↑↑+↓↓)/√2`, `e₂ = (↑↓+↓↑)/√2`, `e₃ = (↑↑−↓↓)/√2`, `e₄ = (↑↓−↓↑)/√2`.
pub fn make_bell_state(index: u8) -> Result<PairState> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let amplitudes = match index {
        1 => [h, ZERO, ZERO, h],
        2 => [ZERO, h, h, ZERO],
        3 => [h, ZERO, ZERO, -h],
        4 => [ZERO, h, -h, ZERO],
        _ => return invalid(format!("Bell index must be 1..=4, got {index}")),
    };
    Ok(PairState { amplitudes })
}

pub(crate) fn check_bell_index(index: u8) -> Result<()> {
    if (1..=4).contains(&index) {
        Ok(())
    } else {
        invalid(format!("Bell index must be 1..=4, got {index}"))
    }
}

/// A two-qubit density matrix in the `{↑↑, ↑↓, ↓↑, ↓↓}` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix4(pub(crate) Matrix4<Complex64>);

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity up to round-off.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let rho = DensityMatrix4(m);
        rho.validate()?;
        Ok(rho)
    }

    /// Builds from a row-major 4×4 array.
    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4(Matrix4::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// Largest entrywise `|self − other|`.
    pub fn max_abs_diff(&self, other: &DensityMatrix4) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise `|ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        if self.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("density matrix has non-finite entries");
        }
        let herm = self.hermiticity_error();
        if herm > DENSITY_TOLERANCE {
            return invalid(format!("density matrix not Hermitian (max |ρ−ρ†| = {herm:e})"));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > DENSITY_TOLERANCE {
            return invalid(format!("density matrix trace is {tr}, expected 1"));
        }
        let min = self.eigenvalues()[0];
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "density matrix not positive semidefinite (eigenvalue {min:e})"
            )));
        }
        Ok(())
    }
}

/// Complex decoherence factors at one instant. The common-bath factors
/// `r12_plus`/`r12_minus` are present only in the common-bath scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceFactors {
    pub time: f64,
    pub r1: Complex64,
    pub r2: Complex64,
    pub r12_plus: Option<Complex64>,
    pub r12_minus: Option<Complex64>,
}

impl DecoherenceFactors {
    pub fn two_baths(time: f64, r1: Complex64, r2: Complex64) -> Self {
        Self {
            time,
            r1,
            r2,
            r12_plus: None,
            r12_minus: None,
        }
    }

    pub fn common(time: f64, r1: Complex64, r2: Complex64, r12p: Complex64, r12m: Complex64) -> Self {
        Self {
            time,
            r1,
            r2,
            r12_plus: Some(r12p),
            r12_minus: Some(r12m),
        }
    }

    /// All present factors set to `value` (1 = fully coherent, 0 = fully
    /// dephased).
    pub fn uniform(common: bool, value: f64) -> Self {
        let v = Complex64::new(value, 0.0);
        if common {
            Self::common(0.0, v, v, v, v)
        } else {
            Self::two_baths(0.0, v, v)
        }
    }

    pub fn is_common(&self) -> bool {
        self.r12_plus.is_some() && self.r12_minus.is_some()
    }
}
