use std::fs;
use std::path::Path;

use pathsum::axioms::{run_suite, TrialConfig};
use pathsum::experiments::{
    fit_kappa, lattice_propagator_intensity, slit_pattern, FitOptions, LatticeSpec, Pattern, SlitExperiment,
    SlitGeometry, SpacetimePoint,
};
use pathsum::spectral::{check_generalized_axioms, GeneralizedConfig};
use pathsum::{KernelBranch, ParticleParams, SpectralMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::output::{emit, json, note, num};
use crate::{Format, Globals, Kernel};

const DEFAULT_TOLERANCE: f64 = 1e-10;
const SPECTRUM_RANGE: f64 = 10.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {0}: {1}")]
    Read(String, std::io::Error),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid config {0}: {1}")]
    Config(String, serde_json::Error),
    #[error("{0}")]
    Parse(pathsum::Error),
    #[error("{0}")]
    Physics(#[from] pathsum::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Physics(_) => 1,
            _ => 2,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Read(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(path.display().to_string(), e))
}

fn require_config<T: DeserializeOwned>(g: &Globals, command: &str) -> Result<T, CliError> {
    match &g.config {
        Some(p) => read_json(p),
        None => Err(CliError::Usage(format!("`{command}` needs --config <file>"))),
    }
}

fn on_stdout(g: &Globals) -> bool {
    g.out.is_none()
}

pub fn check_axioms(
    g: &Globals,
    kernel: Option<Kernel>,
    trials: Option<usize>,
    max_paths: Option<usize>,
) -> Result<bool, CliError> {
    let mut cfg: TrialConfig = match &g.config {
        Some(p) => read_json(p)?,
        None => TrialConfig::default(),
    };
    cfg.seed = g.seed;
    if let Some(k) = kernel {
        cfg.kernel = match k {
            Kernel::Cosine => KernelBranch::Cosine,
            Kernel::Hyperbolic => KernelBranch::Hyperbolic,
            Kernel::Constant => KernelBranch::Constant,
        };
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(m) = max_paths {
        cfg.max_paths = m;
    }
    if cfg.max_paths < 3 {
        return Err(CliError::Usage("max_paths must be at least 3".into()));
    }
    let tolerance = g.tol.unwrap_or(DEFAULT_TOLERANCE);
    let report = run_suite(&cfg, tolerance)?;

    let bytes = match g.format.unwrap_or(Format::Json) {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("check,trials,max_abs_residual,max_rel_residual\n");
            for a in &report.axioms {
                let name = serde_json::to_value(a.axiom).expect("axiom name");
                s += &format!(
                    "{},{},{},{}\n",
                    name.as_str().unwrap_or_default(),
                    a.trials,
                    num(a.max_abs_residual),
                    num(a.max_rel_residual)
                );
            }
            for k in &report.sorkin {
                s += &format!(
                    "sorkin-{},{},{},{}\n",
                    k.order,
                    k.interference_values.len(),
                    num(k.max_abs),
                    num(k.max_rel)
                );
            }
            s.into_bytes()
        }
    };
    emit(g.out.as_deref(), &bytes)?;
    if !report.bounded {
        note(on_stdout(g), "kernel branch is unbounded: not a physical probability family");
    }
    note(
        on_stdout(g),
        &format!(
            "residuals {} at tolerance {tolerance:e}",
            if report.residuals_pass { "pass" } else { "FAIL" }
        ),
    );
    Ok(report.residuals_pass)
}

pub fn pattern(g: &Globals) -> Result<bool, CliError> {
    let exp: SlitExperiment = require_config(g, "pattern")?;
    let p = slit_pattern(&exp)?;
    let bytes = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => p.to_csv_string()?.into_bytes(),
        Format::Json => json(&p),
    };
    emit(g.out.as_deref(), &bytes)?;
    note(
        on_stdout(g),
        &format!("min {} max {} fringes {}", p.min(), p.max(), p.fringe_count()),
    );
    Ok(true)
}

#[derive(Debug, Serialize)]
struct FitOutput {
    kappa: f64,
    rms: f64,
    normalized: bool,
}

pub fn fit(
    g: &Globals,
    pattern_path: &Path,
    kappa_lo: Option<f64>,
    kappa_hi: Option<f64>,
    seeds: Option<usize>,
) -> Result<bool, CliError> {
    let geometry: SlitGeometry = require_config(g, "fit")?;
    let file = fs::File::open(pattern_path).map_err(|e| CliError::Read(pattern_path.display().to_string(), e))?;
    let pattern = Pattern::read_csv(file).map_err(CliError::Parse)?;
    let mut opts = FitOptions::default();
    if let Some(lo) = kappa_lo {
        opts.kappa_lo = lo;
    }
    if let Some(hi) = kappa_hi {
        opts.kappa_hi = hi;
    }
    if let Some(s) = seeds {
        opts.seeds = s;
    }
    let fit = fit_kappa(&pattern, &geometry, &opts)?;
    let out = FitOutput {
        kappa: fit.kappa,
        rms: fit.rms,
        normalized: true,
    };
    let bytes = match g.format.unwrap_or(Format::Json) {
        Format::Json => json(&out),
        Format::Csv => format!("kappa,rms\n{},{}\n", num(out.kappa), num(out.rms)).into_bytes(),
    };
    emit(g.out.as_deref(), &bytes)?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct Evaluation {
    phis: Vec<f64>,
    value: f64,
}

pub fn spectrum(g: &Globals, points: Option<&Path>, samples: usize) -> Result<bool, CliError> {
    let measure: SpectralMeasure = require_config(g, "spectrum")?;
    measure.validate()?;
    let points: Vec<Vec<f64>> = match points {
        Some(p) => read_json(p)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            (0..samples)
                .map(|_| {
                    (0..measure.n)
                        .map(|_| rng.random_range(-SPECTRUM_RANGE..=SPECTRUM_RANGE))
                        .collect()
                })
                .collect()
        }
    };
    let evaluations = points
        .into_iter()
        .map(|phis| {
            let value = measure.eval(&phis)?;
            Ok(Evaluation { phis, value })
        })
        .collect::<Result<Vec<_>, pathsum::Error>>()?;
    let cfg = GeneralizedConfig {
        seed: g.seed,
        tolerance: g.tol.unwrap_or(DEFAULT_TOLERANCE),
        ..GeneralizedConfig::default()
    };
    let report = check_generalized_axioms(&measure, &cfg)?;

    let bytes = match g.format.unwrap_or(Format::Csv) {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                evaluations: &'a [Evaluation],
                report: &'a pathsum::spectral::GeneralizedReport,
            }
            json(&Out {
                evaluations: &evaluations,
                report: &report,
            })
        }
        Format::Csv => {
            let mut s: String = (1..=measure.n).map(|i| format!("phi_{i},")).collect();
            s += "value\n";
            for e in &evaluations {
                for p in &e.phis {
                    s += &num(*p);
                    s.push(',');
                }
                s += &num(e.value);
                s.push('\n');
            }
            s.into_bytes()
        }
    };
    emit(g.out.as_deref(), &bytes)?;
    let flags = format!(
        "time_symmetry={} shift_invariance={} pairwise_additivity={}",
        report.time_symmetric, report.shift_invariant, report.pairwise_additive
    );
    note(on_stdout(g), &flags);
    Ok(true)
}

/// Configuration of the `propagator` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PropagatorConfig {
    source: SpacetimePoint,
    target_time: f64,
    target_points: Vec<f64>,
    lattice: LatticeSpec,
    particle: ParticleParams,
    kappa: f64,
}

pub fn propagator(g: &Globals) -> Result<bool, CliError> {
    let cfg: PropagatorConfig = require_config(g, "propagator")?;
    if !cfg.kappa.is_finite() {
        return Err(pathsum::Error::NonFiniteKappa(cfg.kappa).into());
    }
    let targets: Vec<SpacetimePoint> = cfg
        .target_points
        .iter()
        .map(|&x| SpacetimePoint::new(cfg.target_time, x))
        .collect();
    let result = lattice_propagator_intensity(cfg.source, &targets, &cfg.lattice, &cfg.particle, cfg.kappa)?;
    let bytes = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => result.pattern.to_csv_string()?.into_bytes(),
        Format::Json => json(&result),
    };
    emit(g.out.as_deref(), &bytes)?;
    let skipped: usize = result.skipped.iter().sum();
    note(
        on_stdout(g),
        &format!(
            "paths per target {} skipped {skipped} max {}",
            cfg.lattice.path_count(),
            result.pattern.max()
        ),
    );
    Ok(true)
}
