use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use sinailab::entropy::{
    jacobian_formula_entropy, pesin_entropy, wedge_table, CrossValidation, EntropyEstimate, Gap, Method,
};
use sinailab::exec::with_workers;
use sinailab::io;
use sinailab::measures::{
    birkhoff_sample, bounded_jacobian_check, holder_parameter_check, ls1_fit, ls2_integral, EmpiricalMeasure,
    HolderFit, JacobianBound, Ls1Fit, Ls2Integral,
};
use sinailab::oseledets::{benettin_spectrum, domination_report, estimate_splitting, DominationReport, LyapunovSpectrum, DEFAULT_N_GRID};
use sinailab::seed::derive_seed;
use sinailab::sweep::{parse_method, run_sweep, SweepConfig, UscVerdict};
use sinailab::systems::{build_system, family, DynamicalSystem, Point};

use crate::args::{Cli, Command, Common, DiagnoseArgs, EntropyArgs, LyapunovArgs, SweepArgs, SystemArgs};
use crate::manifest::{write_files, RunManifest, Timer};
use crate::Failure;

/// Exponents above this count towards the inferred unstable dimension.
const POSITIVE_EXPONENT: f64 = 1e-3;
const INFER_STEPS: usize = 100_000;
const LS1_EPS: [f64; 7] = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001];
const HOLDER_STEP: f64 = 0.01;
const HOLDER_POINTS: usize = 16;

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Lyapunov(a) => lyapunov(a),
        Command::Entropy(a) => entropy(a),
        Command::Sweep(a) => sweep(a),
        Command::Diagnose(a) => diagnose(a),
    }
}

fn env_workers() -> Result<Option<usize>, Failure> {
    match std::env::var("SINAILAB_WORKERS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("SINAILAB_WORKERS must be a non-negative integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn workers(c: &Common) -> Result<usize, Failure> {
    Ok(env_workers()?.unwrap_or(c.workers))
}

fn system(s: &SystemArgs) -> Result<Arc<dyn DynamicalSystem>, Failure> {
    Ok(build_system(&s.system, &s.params)?)
}

fn finish<C: Serialize>(out: &Path, files: Vec<(&str, String)>, config: C, seed: u64, timer: Timer) -> Result<(), Failure> {
    let digests = write_files(out, &files)?;
    let manifest = RunManifest {
        command: std::env::args().collect(),
        config,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock: timer.stop(),
        files: digests,
    };
    std::fs::write(out.join("manifest.json"), io::to_json(&manifest)?)?;
    Ok(())
}

#[derive(Serialize)]
struct SystemInfo {
    name: String,
    params: Vec<(String, f64)>,
    dim: usize,
}

fn info(sys: &dyn DynamicalSystem) -> SystemInfo {
    SystemInfo { name: sys.name().to_string(), params: sys.params(), dim: sys.dim() }
}

#[derive(Serialize)]
struct LyapunovConfig {
    system: SystemInfo,
    steps: usize,
    burn_in: usize,
    blocks: usize,
    workers: usize,
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    system: &'a SystemInfo,
    spectrum: &'a LyapunovSpectrum,
}

fn lyapunov(a: LyapunovArgs) -> Result<(), Failure> {
    let timer = Timer::start();
    let sys = system(&a.system)?;
    let cfg = LyapunovConfig { system: info(&*sys), steps: a.steps, burn_in: a.burn_in, blocks: a.blocks, workers: workers(&a.common)? };
    let s = with_workers(cfg.workers, || benettin_spectrum(&*sys, a.common.seed, a.burn_in, a.steps, a.blocks))?;
    for (l, e) in s.exponents.iter().zip(&s.std_error) {
        println!("{l:.6} ± {e:.1e}");
    }
    let report = SpectrumReport { system: &cfg.system, spectrum: &s };
    let files = vec![("spectrum.json", io::to_json(&report)?), ("spectrum.csv", io::spectrum_csv(&s)?)];
    finish(&a.common.out, files, &cfg, a.common.seed, timer)
}

fn infer_dim_f(s: &LyapunovSpectrum) -> usize {
    s.exponents.iter().filter(|&&l| l > POSITIVE_EXPONENT).count().max(1)
}

#[derive(Serialize)]
struct EntropyConfig {
    system: SystemInfo,
    methods: Vec<Method>,
    tol: f64,
    n_max: usize,
    dim_f: Option<usize>,
    steps: usize,
    length: usize,
    burn_in: usize,
    n_transient: usize,
    workers: usize,
}

#[derive(Serialize)]
struct CrossCheck {
    gaps: Vec<Gap>,
    tol: f64,
    sinai_consistent: bool,
    ruelle_violated: bool,
}

#[derive(Serialize)]
struct EntropyReport<'a> {
    system: &'a SystemInfo,
    dim_f: Option<usize>,
    estimates: Vec<EntropyEstimate>,
    cross_validation: Option<CrossCheck>,
}

fn entropy(a: EntropyArgs) -> Result<(), Failure> {
    let timer = Timer::start();
    let sys = system(&a.system)?;
    let methods = parse_method(&a.method).expect("validated by clap");
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::usage("--tol must be positive"));
    }
    let mut cfg = EntropyConfig {
        system: info(&*sys),
        methods: methods.clone(),
        tol: a.tol,
        n_max: a.nmax,
        dim_f: a.dim_f,
        steps: a.steps,
        length: a.length,
        burn_in: a.burn_in,
        n_transient: a.n_transient,
        workers: workers(&a.common)?,
    };
    let seed = a.common.seed;
    let estimates = with_workers(cfg.workers, || -> Result<Vec<EntropyEstimate>, Failure> {
        let wants = |m| methods.contains(&m);
        let spectrum = if wants(Method::Pesin) || (wants(Method::JacobianF) && a.dim_f.is_none()) {
            let steps = if wants(Method::Pesin) { a.steps } else { INFER_STEPS };
            Some(benettin_spectrum(&*sys, seed, a.burn_in, steps, 10)?)
        } else {
            None
        };
        let measure = if wants(Method::LedrappierStrelcyn) || wants(Method::JacobianF) {
            Some(birkhoff_sample(&*sys, derive_seed(seed, 1), a.burn_in, a.length)?)
        } else {
            None
        };
        let mut out = Vec::new();
        for m in &methods {
            out.push(match m {
                Method::Pesin => pesin_entropy(spectrum.as_ref().expect("computed above")),
                Method::LedrappierStrelcyn => wedge_table(&*sys, measure.as_ref().expect("computed above"), a.nmax)?.ls().estimate(),
                Method::JacobianF => {
                    let dim_f = a.dim_f.unwrap_or_else(|| infer_dim_f(spectrum.as_ref().expect("computed above")));
                    cfg.dim_f = Some(dim_f);
                    jacobian_formula_entropy(&*sys, measure.as_ref().expect("computed above"), dim_f, a.n_transient, derive_seed(seed, 2))?
                }
            });
        }
        Ok(out)
    })?;
    for e in &estimates {
        println!("{:<20} {:.6} ± {:.1e}", e.method.as_str(), e.value, e.std_error);
    }
    let cross_validation = (estimates.len() == 3).then(|| {
        let cv = CrossValidation::from_estimates(estimates[0].clone(), estimates[1].clone(), estimates[2].clone(), a.tol);
        println!("sinai_consistent: {}  ruelle_violated: {}", cv.sinai_consistent, cv.ruelle_violated);
        CrossCheck { gaps: cv.gaps, tol: cv.tol, sinai_consistent: cv.sinai_consistent, ruelle_violated: cv.ruelle_violated }
    });
    let report = EntropyReport { system: &cfg.system, dim_f: cfg.dim_f, estimates, cross_validation };
    let files = vec![("entropy.json", io::to_json(&report)?), ("entropy.csv", io::entropy_csv(&report.estimates)?)];
    finish(&a.common.out, files, &cfg, seed, timer)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let timer = Timer::start();
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| Failure::usage(format!("reading {}: {e}", a.config.display())))?;
    let mut cfg = SweepConfig::parse(&text).map_err(|e| Failure::usage(format!("{}:{e}", a.config.display())))?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(w) = env_workers()? {
        cfg.workers = w;
    }
    if let Some(m) = &a.method {
        cfg.estimators = parse_method(m).expect("validated by clap");
    }
    if let Some(s) = a.steps {
        cfg.steps = s;
    }
    if let Some(t) = a.tol {
        cfg.tolerance = t;
    }
    if let Some(n) = a.nmax {
        cfg.n_max = n;
    }
    if let Some(d) = a.dim_f {
        cfg.dim_f = d;
    }
    cfg.validate()?;
    let r = run_sweep(&cfg)?;
    let primary = r.primary_method();
    for row in &r.rows {
        match (row.estimate(primary), &row.error) {
            (Some(e), _) => println!("{} = {:<10} {:.6} ± {:.1e}", r.param, row.t, e.value, e.std_error),
            (None, Some(err)) => println!("{} = {:<10} failed: {err}", r.param, row.t),
            _ => {}
        }
    }
    let verdict = match r.usc.verdict {
        UscVerdict::Pass => "pass",
        UscVerdict::Fail => "fail",
        UscVerdict::NotApplicable => "not applicable",
    };
    println!("upper semicontinuity: {verdict}");
    let mut files = vec![("sweep.json", io::to_json(&r)?), ("sweep.csv", io::sweep_csv(&r)?)];
    if a.svg {
        files.push(("sweep.svg", io::sweep_svg(&r)));
    }
    finish(&a.out, files, &cfg, cfg.seed, timer)
}

#[derive(Serialize)]
struct DiagnoseConfig {
    system: SystemInfo,
    dim_f: usize,
    length: usize,
    burn_in: usize,
    points: usize,
    n_transient: usize,
    jacobian_bound: f64,
    workers: usize,
}

#[derive(Serialize)]
struct DiagnoseReport<'a> {
    system: &'a SystemInfo,
    ls1: Option<Ls1Fit>,
    ls2: Ls2Integral,
    holder: Option<HolderFit>,
    jacobian: JacobianBound,
    domination: DominationReport,
    notes: Vec<String>,
}

/// Family through `sys` and its parameter value, for the registry families
/// whose other parameters are fixed.
fn family_of(name: &str, sys: &dyn DynamicalSystem) -> Option<(sinailab::systems::FamilyHandle, f64)> {
    let params = sys.params();
    let get = |k: &str| params.iter().find(|(p, _)| p == k).map(|p| p.1);
    let (id, key) = match name {
        "mp" => ("mp", "alpha"),
        "da" => ("da", "deformation"),
        "skew" if get("N") == Some(2.0) => ("skew", "K"),
        _ => return None,
    };
    Some((family(id).ok()?, get(key)?))
}

fn holder_grid(f: &sinailab::systems::FamilyHandle, t0: f64) -> Option<Vec<f64>> {
    let up: Vec<f64> = (0..5).map(|k| t0 + HOLDER_STEP * k as f64).collect();
    let down: Vec<f64> = (0..5).rev().map(|k| t0 - HOLDER_STEP * k as f64).collect();
    [up, down].into_iter().find(|g| g.iter().all(|&t| f.contains(t)))
}

fn spaced(m: &EmpiricalMeasure, n: usize) -> Vec<Point> {
    let n = n.clamp(1, m.len());
    (0..n).map(|k| m.points[k * m.len() / n]).collect()
}

fn diagnose(a: DiagnoseArgs) -> Result<(), Failure> {
    let timer = Timer::start();
    let sys = system(&a.system)?;
    let seed = a.common.seed;
    let workers = workers(&a.common)?;
    let dim_f = match a.dim_f {
        Some(d) if d == 0 || d > sys.dim() => {
            return Err(Failure::usage(format!("--dimF must lie in [1, {}]", sys.dim())));
        }
        Some(d) => d,
        None => with_workers(workers, || benettin_spectrum(&*sys, seed, a.burn_in, INFER_STEPS, 10)).map(|s| infer_dim_f(&s))?,
    };
    let cfg = DiagnoseConfig {
        system: info(&*sys),
        dim_f,
        length: a.length,
        burn_in: a.burn_in,
        points: a.points,
        n_transient: a.n_transient,
        jacobian_bound: a.jacobian_bound,
        workers,
    };
    let mut notes = Vec::new();
    let report = with_workers(workers, || -> Result<DiagnoseReport, Failure> {
        let m = birkhoff_sample(&*sys, derive_seed(seed, 1), a.burn_in, a.length)?;
        let split = estimate_splitting(&*sys, &spaced(&m, a.points), dim_f, a.n_transient, derive_seed(seed, 2))?;
        let domination = domination_report(&*sys, &split, &DEFAULT_N_GRID)?;
        let ls1 = if sys.singular_set().is_empty() {
            notes.push("empty singular set: LS1 holds trivially".into());
            None
        } else {
            Some(ls1_fit(&*sys, &m, &LS1_EPS)?)
        };
        let holder = match family_of(&a.system.system, &*sys).and_then(|(f, t0)| Some((holder_grid(&f, t0)?, f))) {
            Some((grid, f)) => match holder_parameter_check(&f, &grid, &spaced(&m, HOLDER_POINTS)) {
                Ok(h) => Some(h),
                Err(e) => {
                    notes.push(format!("parameter regularity check skipped: {e}"));
                    None
                }
            },
            None => {
                notes.push("no parameter family through this system: regularity check skipped".into());
                None
            }
        };
        Ok(DiagnoseReport {
            system: &cfg.system,
            ls1,
            ls2: ls2_integral(&*sys, &m)?,
            holder,
            jacobian: bounded_jacobian_check(&*sys, &m, a.jacobian_bound)?,
            domination,
            notes: notes.clone(),
        })
    })?;
    if let Some(l) = &report.ls1 {
        println!("LS1: mass ~ {:.4} eps^{:.4}", l.c, l.beta);
    }
    match report.ls2.backward {
        Some(b) => println!("LS2: forward {:.6}  backward {b:.6}", report.ls2.forward),
        None => println!("LS2: forward {:.6}", report.ls2.forward),
    }
    if let Some(h) = &report.holder {
        println!("parameter regularity: c {:.4}  beta {:.4}", h.c, h.beta);
    }
    println!("jacobian: {:.6} (bound {}, pass {})", report.jacobian.value, report.jacobian.bound, report.jacobian.pass);
    println!("domination: rho {:.6}  verdict {:?}", report.domination.rho, report.domination.verdict);
    let files = vec![("diagnose.json", io::to_json(&report)?)];
    finish(&a.common.out, files, &cfg, seed, timer)
}
