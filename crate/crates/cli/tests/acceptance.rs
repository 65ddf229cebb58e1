//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p pathsum-cli --test acceptance`.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pathsum::axioms::{
    classify_branch, functional_equation_relative_residual, functional_equation_residual, run_sorkin, run_suite,
    sorkin_interference, BranchTag, TrialConfig,
};
use pathsum::experiments::{
    fit_kappa, forced_intermediate_intensity, lattice_paths, slit_pattern, FitOptions, LatticeSpec, Pattern,
    SlitGeometry, SpacetimePoint,
};
use pathsum::spectral::{check_generalized_axioms, GeneralizedConfig};
use pathsum::{
    eval_spectral, pn_amplitude, pn_pairwise, quantum_spectrum, Atom, InvariantVector, PairKernel, ParticleParams,
    Potential, SpectralMeasure,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const KAPPAS: [f64; 3] = [0.1, 1.0, 7.0];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn form_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0f64;
    for _ in 0..10_000 {
        let n = rng.random_range(2..=64);
        let phis = (0..n).map(|_| rng.random_range(-100.0..=100.0)).collect();
        let kappa = KAPPAS[rng.random_range(0..3)];
        let v = InvariantVector::new(phis, kappa).unwrap();
        worst = worst.max(rel(pn_pairwise(&v).unwrap(), pn_amplitude(&v).unwrap()));
    }
    let t = secs(start.elapsed());
    outcome(
        worst < 1e-10 && t < 10.0,
        format!("10^4 vectors, max rel residual {worst:.2e} (< 1e-10), {t:.2} s (< 10 s)"),
    )
}

fn axiom_suite() -> Outcome {
    let start = Instant::now();
    let cfg = TrialConfig::default();
    let report = run_suite(&cfg, 1e-10).unwrap();
    let t = secs(start.elapsed());
    let mut pass = t < 30.0;
    let mut parts = Vec::new();
    for a in &report.axioms {
        pass &= a.trials >= 1000 && a.max_rel_residual < 1e-10;
        parts.push(format!("{:?} {:.1e}", a.axiom, a.max_rel_residual));
    }
    outcome(
        pass,
        format!(
            "{} trials each, max rel residual: {} (< 1e-10), {t:.2} s (< 30 s)",
            cfg.trials,
            parts.join(", ")
        ),
    )
}

fn sorkin_hierarchy() -> Outcome {
    let mut second = 0f64;
    for &kappa in &KAPPAS {
        for i in 0..100 {
            let x = -10.0 + 20.0 * i as f64 / 99.0;
            let v = InvariantVector::new(vec![0.0, x], kappa).unwrap();
            let i2 = sorkin_interference(2, &v).unwrap();
            second = second.max((i2.abs() - (2.0 * (kappa * x).cos()).abs()).abs());
        }
    }
    let cfg = TrialConfig {
        seed: 3,
        ..TrialConfig::default()
    };
    let mut pass = second < 1e-12;
    let mut higher = Vec::new();
    for k in 3..=5 {
        let r = run_sorkin(&cfg, k).unwrap();
        pass &= r.interference_values.len() >= 1000 && r.max_abs < 1e-10;
        higher.push(format!("I_{k} {:.1e}", r.max_abs));
    }
    outcome(
        pass,
        format!(
            "|I_2| vs |2cos| max dev {second:.1e} (< 1e-12); max |I_k|: {} (< 1e-10)",
            higher.join(", ")
        ),
    )
}

fn functional_equation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut cos, mut cosh, mut constant) = (0f64, 0f64, 0f64);
    for _ in 0..10_000 {
        let x = rng.random_range(-10.0..=10.0);
        let y = rng.random_range(-10.0..=10.0);
        let kappa = KAPPAS[rng.random_range(0..3)];
        cos = cos.max(functional_equation_residual(&PairKernel::cosine(kappa), x, y));
        cosh = cosh.max(functional_equation_relative_residual(&PairKernel::hyperbolic(0.5), x, y));
        constant = constant.max(functional_equation_residual(&PairKernel::constant(), x, y));
    }
    let mut rate_err = 0f64;
    let mut tags_ok = true;
    for &rate in &[0.01, 0.3, 2.0, 10.0, 100.0] {
        let cos_samples: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let x = i as f64 * (6.0 * PI / rate) / 199.0;
                (x, 2.0 * (rate * x).cos() + 2.0)
            })
            .collect();
        let cosh_samples: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let x = i as f64 * (5.0 / rate) / 199.0;
                (x, 2.0 * (rate * x).cosh() + 2.0)
            })
            .collect();
        for (samples, tag) in [(cos_samples, BranchTag::Cosine), (cosh_samples, BranchTag::Hyperbolic)] {
            match classify_branch(&samples) {
                Ok(fit) => {
                    tags_ok &= fit.branch == tag;
                    rate_err = rate_err.max((fit.rate - rate).abs() / rate);
                }
                Err(_) => tags_ok = false,
            }
        }
    }
    outcome(
        cos < 1e-12 && cosh < 1e-12 && constant < 1e-12 && tags_ok && rate_err < 1e-4,
        format!(
            "residual cos {cos:.1e}, cosh (relative) {cosh:.1e}, const {constant:.1e} (< 1e-12); \
             classifier tags {}, max rate error {rate_err:.1e} (< 1e-4)",
            if tags_ok { "correct" } else { "WRONG" }
        ),
    )
}

fn spectral() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=16);
        let kappa = KAPPAS[rng.random_range(0..3)];
        let phis: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..=10.0)).collect();
        let m = quantum_spectrum(n, kappa);
        let v = InvariantVector::new(phis.clone(), kappa).unwrap();
        worst = worst.max(rel(eval_spectral(&m, &phis).unwrap(), pn_amplitude(&v).unwrap()));
    }
    let triple = SpectralMeasure::new(
        3,
        vec![Atom::new(2.0, vec![0.0, 0.0, 0.0]), Atom::new(1.0, vec![1.0, 1.0, -2.0])],
    )
    .unwrap();
    let report = check_generalized_axioms(&triple, &GeneralizedConfig::default()).unwrap();
    let defect = report.pairwise_additivity.max_abs_residual;
    let pass = worst < 1e-10 && report.time_symmetric && report.shift_invariant && !report.pairwise_additive && defect > 0.1;
    outcome(
        pass,
        format!(
            "quantum spectrum vs amplitude max rel {worst:.1e} (< 1e-10); triple atom: time symmetry {}, \
             shift invariance {}, pairwise defect {defect:.3} (> 0.1)",
            report.time_symmetric, report.shift_invariant
        ),
    )
}

/// `sin^2(n theta) / sin^2(theta)`, reduced to the nearest multiple of pi.
fn grating(n: usize, theta: f64) -> f64 {
    let eps = theta - (theta / PI).round() * PI;
    let nf = n as f64;
    if eps.abs() < 1e-8 {
        return nf * nf * (1.0 - (nf * nf - 1.0) * eps * eps / 3.0);
    }
    ((nf * eps).sin() / eps.sin()).powi(2)
}

fn grating_closed_form() -> Outcome {
    // A quadratic potential tuned so that each invariant is linear in the slit
    // position: phi(a) = const + b(x) * a.
    let (mass, tau1, tau2, xs, kappa, spacing) = (1.0, 1.0, 1.5, 0.3, 1.3, 0.7);
    let c = 2.0 * mass * (1.0 / tau1 + 1.0 / tau2) / (tau1 + tau2);
    let slope = |x: f64| mass * (xs / tau1 + x / tau2) + c * (tau1 * xs + tau2 * x) / 2.0;
    let screen: Vec<f64> = (0..200).map(|i| -6.0 + 12.0 * i as f64 / 199.0).collect();
    let mut worst = 0f64;
    for n in [2usize, 3, 5, 8] {
        let slits = (0..n).map(|k| -0.4 + spacing * k as f64).collect();
        let geometry = SlitGeometry {
            source: SpacetimePoint::new(0.0, xs),
            slit_time: tau1,
            slit_positions: slits,
            screen_time: tau1 + tau2,
            screen_points: screen.clone(),
            particle: ParticleParams::nonrelativistic(mass, Some(Potential::quadratic(c))).unwrap(),
        };
        let p = slit_pattern(&geometry.with_kappa(kappa)).unwrap();
        for (x, i) in screen.iter().zip(&p.intensities) {
            worst = worst.max((i - grating(n, kappa * slope(*x) * spacing / 2.0)).abs());
        }
    }

    let (tau1, tau2, kappa) = (10.0, 20.0, 2.5);
    let proper = |a: f64, x: f64| {
        tau1 * (1.0 - (a / tau1).powi(2)).sqrt() + tau2 * (1.0 - ((x - a) / tau2).powi(2)).sqrt()
    };
    let two = SlitGeometry {
        source: SpacetimePoint::new(0.0, 0.0),
        slit_time: tau1,
        slit_positions: vec![-4.0, 4.0],
        screen_time: tau1 + tau2,
        screen_points: (0..200).map(|i| -10.0 + 20.0 * i as f64 / 199.0).collect(),
        particle: ParticleParams::relativistic(1.0).unwrap(),
    };
    let p = slit_pattern(&two.clone().with_kappa(kappa)).unwrap();
    let mut two_worst = 0f64;
    for (x, i) in two.screen_points.iter().zip(&p.intensities) {
        let delta = proper(-4.0, *x) - proper(4.0, *x);
        two_worst = two_worst.max((i - 4.0 * (kappa * delta / 2.0).cos().powi(2)).abs());
    }
    outcome(
        worst < 1e-9 && two_worst < 1e-12,
        format!(
            "n in {{2,3,5,8}} at 200 points: max dev {worst:.1e} (< 1e-9); two-slit vs 4cos^2 {two_worst:.1e} (< 1e-12)"
        ),
    )
}

fn lattice_factorization() -> Outcome {
    let particle = ParticleParams::nonrelativistic(1.0, Some(Potential::quadratic(0.5))).unwrap();
    let source = SpacetimePoint::new(0.0, 0.0);
    let via = SpacetimePoint::new(1.0, 0.3);
    let target = SpacetimePoint::new(3.0, -0.5);
    let before = LatticeSpec::new(1, 5, (-1.0, 1.0));
    let after = LatticeSpec::new(2, 5, (-1.5, 1.5));
    let f = forced_intermediate_intensity(source, via, target, &before, &after, &particle, 1.7).unwrap();
    let full = lattice_paths(source, target, &LatticeSpec::new(3, 5, (-1.0, 1.0))).unwrap();
    let endpoints_ok = full
        .iter()
        .all(|t| t.start() == (0.0, 0.0) && t.end() == (3.0, -0.5));
    outcome(
        f.composite_paths == 125 && f.residual.rel < 1e-10 && full.len() == 125 && endpoints_ok,
        format!(
            "{} composite paths, intensity {:.6} vs leg product {:.6}, rel residual {:.1e} (< 1e-10)",
            f.composite_paths,
            f.composite,
            f.first_leg * f.second_leg,
            f.residual.rel
        ),
    )
}

/// Free particle, unit leg durations: the two invariants differ by exactly
/// `separation * x`.
fn fit_geometry(kappa: f64) -> SlitGeometry {
    let separation = 1.2 / kappa;
    SlitGeometry {
        source: SpacetimePoint::new(0.0, 0.0),
        slit_time: 1.0,
        slit_positions: vec![-separation / 2.0, separation / 2.0],
        screen_time: 2.0,
        screen_points: (0..200).map(|i| -10.0 + 20.0 * i as f64 / 199.0).collect(),
        particle: ParticleParams::nonrelativistic(1.0, None).unwrap(),
    }
}

fn kappa_recovery() -> Outcome {
    let opts = FitOptions::default();
    let mut slowest = 0f64;
    let mut noiseless = 0f64;
    for kappa in [0.1, 2.5, 10.0] {
        let g = fit_geometry(kappa);
        let p = slit_pattern(&g.clone().with_kappa(kappa)).unwrap();
        let start = Instant::now();
        let fit = fit_kappa(&p, &g, &opts).unwrap();
        slowest = slowest.max(secs(start.elapsed()));
        noiseless = noiseless.max((fit.kappa - kappa).abs() / kappa);
    }

    let kappa = 2.5;
    let g = fit_geometry(kappa);
    let clean = slit_pattern(&g.clone().with_kappa(kappa)).unwrap();
    let noise = Normal::new(0.0, 0.01 * clean.max()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut errors = Vec::with_capacity(100);
    for _ in 0..100 {
        let noisy: Vec<f64> = clean.intensities.iter().map(|i| i + noise.sample(&mut rng)).collect();
        let p = Pattern::new(clean.screen_points.clone(), noisy).unwrap();
        let start = Instant::now();
        let fit = fit_kappa(&p, &g, &opts).unwrap();
        slowest = slowest.max(secs(start.elapsed()));
        errors.push((fit.kappa - kappa).abs() / kappa);
    }
    errors.sort_by(f64::total_cmp);
    let p95 = errors[94];
    outcome(
        noiseless < 1e-4 && p95 < 0.02 && slowest < 5.0,
        format!(
            "noiseless max rel error {noiseless:.1e} (< 1e-4); 1% noise 95th percentile {:.2}% (< 2%); \
             slowest fit {slowest:.3} s (< 5 s)",
            p95 * 100.0
        ),
    )
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    let mut codes = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("report-{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_pathsum"))
            .args(["check-axioms", "--seed", "0", "--out"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        codes.push(status.code());
        outputs.push(std::fs::read(&path).unwrap_or_default());
    }
    let identical = !outputs[0].is_empty() && outputs[0] == outputs[1];
    outcome(
        identical && codes.iter().all(|c| *c == Some(0)),
        format!(
            "reports {} ({} bytes), exit codes {:?}",
            if identical { "byte-identical" } else { "DIFFER" },
            outputs[0].len(),
            codes
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("form equivalence", form_equivalence),
        ("axiom suite", axiom_suite),
        ("Sorkin hierarchy", sorkin_hierarchy),
        ("functional equation and branches", functional_equation),
        ("spectral measures", spectral),
        ("grating closed form", grating_closed_form),
        ("lattice factorization", lattice_factorization),
        ("coupling recovery", kappa_recovery),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
