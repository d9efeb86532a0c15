//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use rand::Rng;

use sinailab::entropy::{cross_validate, ls_sequence, CrossValidateOptions};
use sinailab::io;
use sinailab::matrixcore::{wedge_profile, SquareMatrix};
use sinailab::measures::{
    birkhoff_sample, ls1_fit, ls2_integral, ulam_matrix, ulam_stationary, weak_star_distance,
};
use sinailab::oseledets::{benettin_spectrum, domination_report, estimate_splitting, Verdict, DEFAULT_N_GRID};
use sinailab::seed::stream;
use sinailab::sweep::{neighborhood_split_entropy, run_sweep, SweepConfig, UscVerdict};
use sinailab::systems::{cat_map, make_derived_from_anosov, make_manneville_pomeau, make_standard_skew, DynamicalSystem};

fn cat_log_lambda() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).ln()
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t0 = Instant::now();
    let v = f();
    (v, t0.elapsed())
}

fn cat_spectrum() -> Outcome {
    let (s, dt) = timed(|| benettin_spectrum(&cat_map(), 7, 1000, 1_000_000, 10).unwrap());
    let l = cat_log_lambda();
    let err = (s.exponents[0] - l).abs().max((s.exponents[1] + l).abs());
    outcome(
        err <= 1e-5 && dt < Duration::from_secs(2),
        format!("exponents {:.7} {:.7}, error {err:.1e}, {:.2}s", s.exponents[0], s.exponents[1], dt.as_secs_f64()),
    )
}

fn entropy_agreement() -> Outcome {
    let systems: Vec<(Box<dyn DynamicalSystem>, usize)> = vec![
        (Box::new(cat_map()), 1),
        (Box::new(make_derived_from_anosov(0.2).unwrap()), 1),
        (Box::new(make_standard_skew(0.5, 2).unwrap()), 2),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (sys, dim_f) in &systems {
        let (cv, dt) = timed(|| {
            let m = birkhoff_sample(sys.as_ref(), 11, 1000, 20_000).unwrap();
            let mut o = CrossValidateOptions::new(*dim_f);
            o.n_max = 60;
            o.n_transient = 60;
            o.seed = 11;
            o.n_steps = 1_000_000;
            cross_validate(sys.as_ref(), &m, &o).unwrap()
        });
        let worst = cv.gaps.iter().map(|g| g.gap).fold(0.0, f64::max);
        pass &= worst <= 0.02 && dt < Duration::from_secs(60);
        parts.push(format!("{} max gap {worst:.4} ({:.1}s)", sys.name(), dt.as_secs_f64()));
    }
    outcome(pass, parts.join("; "))
}

/// Entries on a 2^-10 grid in [-1, 1], so `AB` is exact in f64 and the
/// comparison sees only the error of the wedge computation.
fn random_matrix(rng: &mut impl Rng, d: usize) -> SquareMatrix {
    SquareMatrix::from_fn(d, |_, _| rng.gen_range(-1024i32..=1024) as f64 / 1024.0)
}

fn subadditivity() -> Outcome {
    let mut rng = stream(3, 0);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..10_000 {
        let d = 2 + k % 3;
        let a = random_matrix(&mut rng, d);
        let b = random_matrix(&mut rng, d);
        let (pa, pb, pab) = (wedge_profile(&a), wedge_profile(&b), wedge_profile(&a.mul(&b)));
        let mut excess: Vec<f64> = (1..=d).map(|j| pab.wedge(j) - pa.wedge(j) - pb.wedge(j)).collect();
        excess.push(pab.log_wedge_total - pa.log_wedge_total - pb.log_wedge_total);
        for e in excess {
            worst = worst.max(e);
            if e > 1e-12 {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations, largest excess {worst:.2e}"))
}

fn ls_closed_form() -> Outcome {
    let f = cat_map();
    let m = birkhoff_sample(&f, 1, 100, 1000).unwrap();
    let s = ls_sequence(&f, &m, 40).unwrap();
    let lambda = cat_log_lambda().exp();
    let err = (1..=40)
        .map(|n| (s.a_n[n - 1] - (2.0 + lambda.powi(n as i32)).ln() / n as f64).abs())
        .fold(0.0, f64::max);
    let min_err = (s.value - cat_log_lambda()).abs();
    outcome(err <= 1e-10 && min_err <= 3e-3, format!("max |a_n - closed form| {err:.1e}, min {:.6}", s.value))
}

fn mp_sweep() -> Outcome {
    let (res, dt) = timed(|| {
        let mut base = SweepConfig::new("mp", (0..10).map(|k| k as f64 / 10.0).collect());
        base.seed = 1;
        base.weak_star = false;
        let mut fine = base.clone();
        fine.grid = (0..19).map(|k| k as f64 / 20.0).collect();
        fine.steps *= 4;
        (run_sweep(&base).unwrap(), run_sweep(&fine).unwrap())
    });
    let (a, b) = res;
    let m = a.primary_method();
    let h0 = a.rows[0].estimate(m).unwrap().value;
    let gap_a = a.continuity.as_ref().unwrap().max_gap;
    let gap_b = b.continuity.as_ref().unwrap().max_gap;
    let pass = (h0 - LN_2).abs() <= 0.01
        && a.usc.verdict == UscVerdict::Pass
        && gap_b < gap_a
        && dt < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "h(0) {h0:.4}, usc {:?}, max gap {gap_a:.3} -> {gap_b:.3} refined, {:.0}s",
            a.usc.verdict,
            dt.as_secs_f64()
        ),
    )
}

fn domination() -> Outcome {
    let f = cat_map();
    let m = birkhoff_sample(&f, 2, 100, 64).unwrap();
    let split = estimate_splitting(&f, &m.points, 1, 40, 2).unwrap();
    let r = domination_report(&f, &split, &DEFAULT_N_GRID).unwrap();
    let swapped = domination_report(&f, &split.swapped(), &DEFAULT_N_GRID).unwrap();
    let target = cat_log_lambda().exp().powi(-2);
    let rel = (r.rho / target - 1.0).abs();
    outcome(
        rel <= 0.05 && r.verdict == Verdict::Dominated && swapped.verdict == Verdict::Undetermined,
        format!("rho {:.6} (rel err {rel:.1e}), {:?}; swapped {:?}", r.rho, r.verdict, swapped.verdict),
    )
}

fn ulam() -> Outcome {
    let f = make_manneville_pomeau(0.0).unwrap();
    let s64 = ulam_stationary(&ulam_matrix(&f, 64, 16, 4).unwrap(), 1e-13, 10_000).unwrap();
    let linf = s64.measure.density.iter().map(|v| (v - 1.0 / 64.0).abs()).fold(0.0, f64::max);
    let s256 = ulam_stationary(&ulam_matrix(&f, 256, 16, 4).unwrap(), 1e-13, 10_000).unwrap();
    let b = birkhoff_sample(&f, 4, 1000, 1_000_000).unwrap();
    let w = weak_star_distance(&b, &s256.measure, 4).unwrap();
    outcome(linf <= 1e-6 && w <= 0.01, format!("L-inf {linf:.1e} at 64 cells, weak* {w:.4} at 256"))
}

fn volume_preservation() -> Outcome {
    let f = make_standard_skew(0.5, 2).unwrap();
    let s = benettin_spectrum(&f, 8, 1000, 1_000_000, 10).unwrap();
    let sum = s.sum();
    let mut rng = stream(8, 1);
    let det_err = (0..1000)
        .map(|_| {
            let x = f.space().sample_uniform(&mut rng);
            (f.differential(&x).det().abs() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    outcome(sum.abs() <= 1e-3 && det_err <= 1e-10, format!("sum of exponents {sum:.1e}, max |det - 1| {det_err:.1e}"))
}

fn diagnostics() -> Outcome {
    let f = make_manneville_pomeau(0.0).unwrap();
    let m = birkhoff_sample(&f, 9, 1000, 1_000_000).unwrap();
    let ls1 = ls1_fit(&f, &m, &[0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001]).unwrap();
    let ls2 = ls2_integral(&f, &m).unwrap();
    let split = neighborhood_split_entropy(&f, &m, 0.01).unwrap();
    let target = 0.02 * LN_2;
    let rel = (split.inside / target - 1.0).abs();
    outcome(
        (0.9..=1.1).contains(&ls1.beta) && (ls2.forward - LN_2).abs() <= 1e-6 && rel <= 0.1,
        format!("LS1 beta {:.4}, LS2 forward {:.8}, inside {:.5} (rel err {rel:.3})", ls1.beta, ls2.forward, split.inside),
    )
}

fn determinism() -> Outcome {
    let run = |workers: usize| {
        let mut c = SweepConfig::new("da", vec![0.0, 0.1, 0.2]);
        c.seed = 4;
        c.workers = workers;
        c.steps = 50_000;
        c.n_max = 10;
        c.estimators = sinailab::sweep::parse_method("all").unwrap();
        c.measure = sinailab::sweep::MeasureSpec::Birkhoff { burn_in: 1000, length: 5000 };
        let r = run_sweep(&c).unwrap();
        let mut rows = r.clone();
        rows.config.workers = 0;
        (io::to_json(&rows).unwrap(), io::sweep_csv(&r).unwrap(), io::sweep_svg(&r))
    };
    let a = run(1);
    let b = run(1);
    let c = run(0);
    let spectrum = |_: ()| io::spectrum_csv(&benettin_spectrum(&cat_map(), 5, 100, 10_000, 10).unwrap()).unwrap();
    let same = a == b && a == c && spectrum(()) == spectrum(());
    outcome(same, format!("sweep JSON/CSV/SVG and spectrum CSV identical across reruns and worker counts: {same}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cat map spectrum", cat_spectrum),
        ("entropy triple agreement", entropy_agreement),
        ("wedge subadditivity", subadditivity),
        ("LS sequence closed form", ls_closed_form),
        ("MP sweep continuity", mp_sweep),
        ("domination", domination),
        ("Ulam correctness", ulam),
        ("volume preservation", volume_preservation),
        ("diagnostics", diagnostics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
