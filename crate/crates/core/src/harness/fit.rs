//! Least-squares fit of a Gaussian envelope `e^{−a t²}` to decay curves.

use std::io::Read;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Points with modulus below `e^{−4}` end the fit window.
pub const FIT_WINDOW_FLOOR: f64 = 0.018_315_638_888_734_18;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeFit {
    /// Fitted rate `â`.
    pub a_hat: f64,
    /// `max |m(t) − e^{−â t²}|` inside the window.
    pub max_residual: f64,
    /// Number of points in the window.
    pub points: usize,
}

/// Fits `−ln m` against `t²` through the origin.
///
/// The window is the leading run of points whose modulus stays at or above
/// `e^{−4}`; later points (tail noise, revivals of small baths) are ignored.
pub fn fit_gaussian_envelope(times: &[f64], moduli: &[f64]) -> Result<EnvelopeFit> {
    if times.len() != moduli.len() {
        return invalid(format!(
            "{} times but {} moduli",
            times.len(),
            moduli.len()
        ));
    }
    if let Some(m) = moduli.iter().find(|m| !(0.0..=1.0 + 1e-12).contains(*m)) {
        return invalid(format!("modulus {m} outside [0, 1]"));
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return invalid(format!("non-finite time {t}"));
    }
    let window = moduli.iter().take_while(|&&m| m >= FIT_WINDOW_FLOOR).count();
    if window < 3 {
        return invalid(format!(
            "only {window} points with modulus ≥ e^-4; need at least 3"
        ));
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&t, &m) in times.iter().zip(moduli).take(window) {
        let x = t * t;
        sxy += x * -m.ln();
        sxx += x * x;
    }
    if sxx == 0.0 {
        return invalid("fit window contains only t = 0");
    }
    let a_hat = sxy / sxx;
    let max_residual = times
        .iter()
        .zip(moduli)
        .take(window)
        .map(|(&t, &m)| (m - (-a_hat * t * t).exp()).abs())
        .fold(0.0, f64::max);
    Ok(EnvelopeFit {
        a_hat,
        max_residual,
        points: window,
    })
}

/// Reads a sweep CSV and fits the envelope of `|factor|` (e.g. `r1`,
/// `r12p`) for the rows whose `trial` column equals `trial`.
pub fn fit_from_csv<R: Read>(reader: R, factor: &str, trial: &str) -> Result<EnvelopeFit> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidArgument(format!("column {name:?} not found in sweep output")))
    };
    let (ct, ctrial) = (col("time")?, col("trial")?);
    let (cre, cim) = (col(&format!("re_{factor}"))?, col(&format!("im_{factor}"))?);
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
    };
    let (mut times, mut moduli) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        if &rec[ctrial] != trial {
            continue;
        }
        times.push(parse(&rec[ct])?);
        moduli.push(Complex64::new(parse(&rec[cre])?, parse(&rec[cim])?).norm().min(1.0));
    }
    if times.is_empty() {
        return invalid(format!("no rows for trial {trial:?}"));
    }
    fit_gaussian_envelope(&times, &moduli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoherence::{factor_separate, gaussian_rate, FrequencySelector};
    use crate::harness::sampling::{sample_bath, SamplingSpec};
    use crate::types::BathLabel;

    #[test]
    fn floor_is_e_to_minus_four() {
        assert!((FIT_WINDOW_FLOOR - (-4.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn recovers_exact_gaussian() {
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.02).collect();
        let moduli: Vec<f64> = times.iter().map(|t| (-3.0 * t * t).exp()).collect();
        let fit = fit_gaussian_envelope(&times, &moduli).unwrap();
        assert!((fit.a_hat - 3.0).abs() < 1e-9);
        assert!(fit.max_residual < 1e-12);
        assert_eq!(fit.points, 50);
    }

    #[test]
    fn window_stops_at_floor() {
        let times: Vec<f64> = (0..100).map(|k| k as f64 * 0.05).collect();
        let moduli: Vec<f64> = times.iter().map(|t| (-1.0 * t * t).exp()).collect();
        let fit = fit_gaussian_envelope(&times, &moduli).unwrap();
        // e^{-t²} ≥ e^{-4} ⇔ t ≤ 2
        assert_eq!(fit.points, 41);
    }

    #[test]
    fn rejects_short_or_bad_input() {
        assert!(fit_gaussian_envelope(&[0.0, 1.0], &[1.0, 0.5]).is_err());
        assert!(fit_gaussian_envelope(&[0.0, 1.0, 2.0], &[1.0, 0.001, 0.5]).is_err());
        assert!(fit_gaussian_envelope(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(fit_gaussian_envelope(&[0.0, 0.1, 0.2], &[1.0, 1.5, 0.5]).is_err());
        assert!(fit_gaussian_envelope(&[0.0, 0.1], &[1.0, 0.9, 0.5]).is_err());
    }

    #[test]
    fn small_bath_fits_but_poorly() {
        let bath = sample_bath(&SamplingSpec::new(2, BathLabel::Bath1, 11)).unwrap();
        let a = gaussian_rate(&bath, FrequencySelector::Single).unwrap();
        assert!(a > 0.0);
        let t_star = 2.0 / a.sqrt();
        let times: Vec<f64> = (0..200).map(|k| k as f64 * t_star / 100.0).collect();
        let moduli: Vec<f64> = times.iter().map(|&t| factor_separate(&bath, t).unwrap().norm()).collect();
        // no accuracy claim for two spins; the fit only has to run
        if let Ok(fit) = fit_gaussian_envelope(&times, &moduli) {
            assert!(fit.a_hat.is_finite() && fit.max_residual >= 0.0);
        }
    }
}
