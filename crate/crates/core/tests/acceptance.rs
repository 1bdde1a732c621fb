//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinbath::chsh::{canonical_angles, chsh_closed_form, chsh_s, AngleSet};
use spinbath::decoherence::{factor_separate, factors_at, gaussian_rate, FrequencySelector};
use spinbath::density::{rho_common_bath, rho_two_baths};
use spinbath::entanglement::{concurrence, concurrence_closed_common, concurrence_closed_two_baths};
use spinbath::harness::fit::fit_gaussian_envelope;
use spinbath::harness::max_oracle_deviation;
use spinbath::harness::sampling::{sample_bath, OmegaDist, SamplingSpec};
use spinbath::harness::sweep::{Scenario, SweepConfig};
use spinbath::{make_bell_state, BathLabel, DecoherenceFactors, DensityMatrix4, Environment, PairState};

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> spinbath::Result<Outcome>;

const SCENARIOS: [(Scenario, usize); 3] =
    [(Scenario::TwoBath, 3), (Scenario::CommonBath, 5), (Scenario::OneCoupled, 4)];

fn environment(scenario: Scenario, n_spins: usize, seed: u64) -> spinbath::Result<Environment> {
    let mut cfg = SweepConfig { scenario, seed, ..SweepConfig::default() };
    cfg.bath.n_spins = n_spins;
    cfg.environment(0)
}

fn rho_for(psi: &PairState, f: &DecoherenceFactors) -> spinbath::Result<DensityMatrix4> {
    match (f.r12_plus, f.r12_minus) {
        (Some(p), Some(m)) => rho_common_bath(psi, f.r1, f.r2, p, m),
        _ => rho_two_baths(psi, f.r1, f.r2),
    }
}

/// A random realization: bath size 1..=12, time in [0, 5), Bell index 1..=4.
fn draw(scenario: Scenario, rng: &mut ChaCha8Rng) -> spinbath::Result<(u8, DecoherenceFactors)> {
    let n = rng.random_range(1..=12);
    let env = environment(scenario, n, rng.random())?;
    let t = rng.random_range(0.0..5.0);
    Ok((rng.random_range(1..=4), factors_at(&env, t)?))
}

fn oracle_equivalence() -> spinbath::Result<Outcome> {
    let start = Instant::now();
    let times: Vec<f64> = (0..10).map(|j| 0.45 * j as f64).collect();
    let mut worst: f64 = 0.0;
    for (scenario, n) in SCENARIOS {
        for seed in 0..20 {
            let env = environment(scenario, n, seed)?;
            for b in 1..=4 {
                worst = worst.max(max_oracle_deviation(&make_bell_state(b)?, &env, &times)?);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst <= 1e-12 && secs < 10.0,
        detail: format!("max entrywise deviation {worst:.2e} over 2400 states (tol 1e-12), {secs:.2} s"),
    })
}

fn concurrence_closed_forms() -> spinbath::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for (scenario, _) in SCENARIOS {
        for _ in 0..200 {
            let (b, f) = draw(scenario, &mut rng)?;
            let closed = match (f.r12_plus, f.r12_minus) {
                (Some(p), Some(m)) => concurrence_closed_common(b, p, m)?,
                _ => concurrence_closed_two_baths(f.r1, f.r2),
            };
            let c = concurrence(&rho_for(&make_bell_state(b)?, &f)?)?;
            worst = worst.max((c - closed).abs());
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-9,
        detail: format!("max |C - closed form| {worst:.2e} over 600 draws (tol 1e-9)"),
    })
}

fn chsh_endpoints() -> spinbath::Result<Outcome> {
    let angles = canonical_angles();
    let tsirelson = 2.0 * SQRT_2;
    let mut worst: f64 = 0.0;
    for common in [false, true] {
        for value in [1.0, 0.0] {
            let f = DecoherenceFactors::uniform(common, value);
            for b in 1..=4u8 {
                let s = chsh_s(&angles, &rho_for(&make_bell_state(b)?, &f)?)?;
                let want = match (value == 1.0, b) {
                    (true, 1 | 4) => tsirelson,
                    (true, _) => 0.0,
                    (false, _) => SQRT_2,
                };
                worst = worst.max((s.abs() - want).abs());
            }
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-12,
        detail: format!("max endpoint error {worst:.2e} (tol 1e-12)"),
    })
}

fn chsh_routes_agree() -> spinbath::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for (scenario, _) in SCENARIOS {
        for _ in 0..200 {
            let (b, f) = draw(scenario, &mut rng)?;
            let mut theta = || rng.random_range(0.0..2.0 * PI);
            let angles = AngleSet::new(theta(), theta(), theta(), theta())?;
            let trace = chsh_s(&angles, &rho_for(&make_bell_state(b)?, &f)?)?;
            let closed = chsh_closed_form(b, scenario.geometry(), &angles, &f)?;
            worst = worst.max((trace - closed).abs());
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-10,
        detail: format!("max |S closed - S trace| {worst:.2e} over 600 draws (tol 1e-10)"),
    })
}

fn frozen_antiparallel_coherence() -> spinbath::Result<Outcome> {
    let laws = [
        (OmegaDist::Uniform { lo: 0.0, hi: 1.0 }, OmegaDist::Equal),
        (OmegaDist::Constant { value: 0.7 }, OmegaDist::Constant { value: 0.7 }),
    ];
    let times: Vec<f64> = (0..100).map(|j| 0.1 * j as f64).collect();
    let mut worst: f64 = 0.0;
    for (omega, omega2) in laws {
        for seed in 0..5 {
            let mut spec = SamplingSpec::new(50, BathLabel::Common, seed);
            spec.omega_dist = omega;
            spec.omega2_dist = omega2;
            let env = Environment::common(sample_bath(&spec)?)?;
            for b in [2u8, 4] {
                let psi = make_bell_state(b)?;
                for &t in &times {
                    let c = concurrence(&rho_for(&psi, &factors_at(&env, t)?)?)?;
                    worst = worst.max((c - 1.0).abs());
                }
            }
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-12,
        detail: format!("max |C - 1| {worst:.2e} over 2000 states (tol 1e-12)"),
    })
}

fn rate_ordering() -> spinbath::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    for seed in 0..100 {
        let mut spec = SamplingSpec::new(rng.random_range(1..=200), BathLabel::Common, seed);
        spec.omega_dist = OmegaDist::Uniform { lo: 1e-3, hi: 2.0 };
        spec.omega2_dist = OmegaDist::Uniform { lo: 1e-3, hi: 0.5 };
        let b = sample_bath(&spec)?;
        if gaussian_rate(&b, FrequencySelector::Sum)? < gaussian_rate(&b, FrequencySelector::Difference)? {
            violations += 1;
        }
    }
    Ok(Outcome {
        pass: violations == 0,
        detail: format!("{violations} violations over 100 positive-coupling common baths"),
    })
}

fn gaussian_envelope() -> spinbath::Result<Outcome> {
    let start = Instant::now();
    let (mut worst_rel, mut worst_res, mut ratio_lo, mut ratio_hi) = (0.0f64, 0.0f64, f64::MAX, 0.0f64);
    for seed in 0..10 {
        let b = sample_bath(&SamplingSpec::new(1000, BathLabel::Bath1, seed))?;
        let a = gaussian_rate(&b, FrequencySelector::Single)?;
        let times: Vec<f64> = (0..=300).map(|j| j as f64 * 0.01 / a.sqrt()).collect();
        let moduli = times
            .iter()
            .map(|&t| factor_separate(&b, t).map(|r| r.norm()))
            .collect::<spinbath::Result<Vec<_>>>()?;
        let fit = fit_gaussian_envelope(&times, &moduli)?;
        let ratio = fit.a_hat / a;
        worst_rel = worst_rel.max((ratio - 1.0).abs());
        worst_res = worst_res.max(fit.max_residual);
        ratio_lo = ratio_lo.min(ratio);
        ratio_hi = ratio_hi.max(ratio);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst_rel <= 0.1 && worst_res <= 0.05 && secs < 5.0,
        detail: format!(
            "a_hat/a in [{ratio_lo:.4}, {ratio_hi:.4}] (tol ±0.1), max residual {worst_res:.2e} (tol 0.05), {secs:.2} s"
        ),
    })
}

fn scaling_law() -> spinbath::Result<Outcome> {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let mut spec = SamplingSpec::new(300, BathLabel::Common, seed);
        spec.omega_dist = OmegaDist::Gaussian { mean: 0.2, sd: 1.0 };
        let common = sample_bath(&spec)?;
        let single = sample_bath(&SamplingSpec::new(300, BathLabel::Bath2, seed))?;
        let cases = [
            (&single, FrequencySelector::Single),
            (&common, FrequencySelector::First),
            (&common, FrequencySelector::Second),
            (&common, FrequencySelector::Sum),
            (&common, FrequencySelector::Difference),
        ];
        for (b, sel) in cases {
            let a = gaussian_rate(b, sel)?;
            let a2 = gaussian_rate(&b.scaled(2.0), sel)?;
            worst = worst.max((a2 - 4.0 * a).abs());
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-12,
        detail: format!("max |a(2ω) - 4a(ω)| {worst:.2e} over 100 rates (tol 1e-12)"),
    })
}

fn sweep_determinism() -> spinbath::Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("spinbath-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let mut mismatches = Vec::new();
    for scenario in ["two-bath", "common", "one-coupled"] {
        let run = |tag: &str| -> spinbath::Result<(Vec<u8>, Vec<u8>)> {
            let out = dir.join(format!("{scenario}-{tag}.csv"));
            let res = Command::new(env!("CARGO_BIN_EXE_spinbath"))
                .args(["sweep", "--scenario", scenario, "--bell", "2", "--n-spins", "40", "--trials", "3"])
                .args(["--steps", "25", "--t-max", "2", "--seed", "17"])
                .arg("--out")
                .arg(&out)
                .output()?;
            if !res.status.success() {
                return Err(spinbath::Error::InternalConsistency(String::from_utf8_lossy(&res.stderr).into()));
            }
            let stdout = Command::new(env!("CARGO_BIN_EXE_spinbath"))
                .args(["sweep", "--scenario", scenario, "--trials", "2", "--seed", "5", "--n-spins", "30"])
                .output()?
                .stdout;
            Ok((std::fs::read(&out)?, stdout))
        };
        let (a, b) = (run("a")?, run("b")?);
        if a != b || a.0.is_empty() || a.1.is_empty() {
            mismatches.push(scenario);
        }
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(Outcome {
        pass: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            "repeated CLI sweeps byte-identical for all scenarios".into()
        } else {
            format!("output differs for {mismatches:?}")
        },
    })
}

fn main() -> ExitCode {
    let start = Instant::now();
    let checks: [(&str, Check); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("concurrence closed forms", concurrence_closed_forms),
        ("CHSH endpoints", chsh_endpoints),
        ("CHSH closed form vs trace", chsh_routes_agree),
        ("frozen antiparallel coherence", frozen_antiparallel_coherence),
        ("rate ordering", rate_ordering),
        ("Gaussian envelope", gaussian_envelope),
        ("scaling law", scaling_law),
        ("sweep determinism", sweep_determinism),
    ];
    let mut failed = 0;
    let mut report = |i: usize, name: &str, pass: bool, detail: &str| {
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {i:>2} {status} {name}: {detail}");
        if !pass {
            failed += 1;
        }
    };
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(o) => report(i + 1, name, o.pass, &o.detail),
            Err(e) => report(i + 1, name, false, &format!("error: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(10, "runtime", secs < 60.0, &format!("acceptance run took {secs:.2} s (limit 60 s)"));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
