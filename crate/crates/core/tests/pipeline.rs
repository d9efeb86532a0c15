use sinailab::entropy::{cross_validate, CrossValidateOptions, Method};
use sinailab::io;
use sinailab::measures::birkhoff_sample;
use sinailab::sweep::{run_sweep, MeasureSpec, SweepConfig, SweepResult};
use sinailab::systems::make_manneville_pomeau;

fn small_sweep() -> SweepConfig {
    let mut c = SweepConfig::new("mp", vec![0.0, 0.2, 0.4]);
    c.seed = 2;
    c.steps = 20_000;
    c.spectrum_burn_in = 500;
    c.estimators = vec![Method::Pesin, Method::LedrappierStrelcyn];
    c.n_max = 12;
    c.measure = MeasureSpec::Birkhoff { burn_in: 500, length: 4000 };
    c
}

#[test]
fn doubling_map_cross_validation() {
    let f = make_manneville_pomeau(0.0).unwrap();
    let m = birkhoff_sample(&f, 3, 1000, 5000).unwrap();
    let mut o = CrossValidateOptions::new(1);
    o.n_steps = 20_000;
    let cv = cross_validate(&f, &m, &o).unwrap();
    assert!(cv.sinai_consistent, "{:?}", cv.gaps);
    assert!(!cv.ruelle_violated);
    assert!((cv.get(Method::Pesin).value - std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn sweep_json_round_trips() {
    let r = run_sweep(&small_sweep()).unwrap();
    let text = io::to_json(&r).unwrap();
    let back: SweepResult = serde_json::from_str(&text).unwrap();
    assert_eq!(io::to_json(&back).unwrap(), text);
}

#[test]
fn sweep_csv_has_a_row_per_point_and_method() {
    let r = run_sweep(&small_sweep()).unwrap();
    let csv = io::sweep_csv(&r).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[0][1], "pesin");
    assert_eq!(&rows[1][1], "ledrappier_strelcyn");
    assert!(rows[0][4].is_empty());
    assert!(rows[2][4].parse::<f64>().unwrap() > 0.0);
    let svg = io::sweep_svg(&r);
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(svg.matches("<circle").count(), 6);
}
