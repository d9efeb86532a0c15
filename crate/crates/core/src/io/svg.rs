use std::fmt::Write;

use crate::entropy::Method;
use crate::sweep::SweepResult;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// Line chart of every estimator's value against `t`, with ±1 standard
/// error bars.
pub fn sweep_svg(r: &SweepResult) -> String {
    let methods: Vec<Method> = r.config.estimators.clone();
    let series: Vec<Vec<(f64, f64, f64)>> = methods
        .iter()
        .map(|m| {
            r.rows
                .iter()
                .filter_map(|row| row.estimate(*m).map(|e| (row.t, e.value, e.std_error)))
                .filter(|p| p.1.is_finite())
                .collect()
        })
        .collect();
    let all: Vec<&(f64, f64, f64)> = series.iter().flatten().collect();
    let (mut x0, mut x1) = (r.config.grid[0], *r.config.grid.last().unwrap());
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let se = |p: &(f64, f64, f64)| if p.2.is_finite() { p.2 } else { 0.0 };
    let mut y0 = all.iter().map(|p| p.1 - se(p)).fold(f64::INFINITY, f64::min);
    let mut y1 = all.iter().map(|p| p.1 + se(p)).fold(f64::NEG_INFINITY, f64::max);
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    let pad = ((y1 - y0) * 0.05).max(1e-3);
    y0 -= pad;
    y1 += pad;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">entropy vs {} ({})</text>"#,
        W / 2.0,
        r.param,
        r.family
    );
    let (bx, by) = (LEFT, H - BOTTOM);
    let _ = writeln!(s, r#"<path d="M{bx:.1} {TOP:.1} V{by:.1} H{:.1}" fill="none" stroke="black"/>"#, W - RIGHT);
    for t in ticks(x0, x1, 5) {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{by:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, by + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{t:.3}</text>"#, by + 16.0);
    }
    for v in ticks(y0, y1, 5) {
        let y = py(v);
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{bx:.1}" y2="{y:.1}" stroke="black"/>"#, bx - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.4}</text>"#, bx - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, r.param);
    for (k, (m, pts)) in methods.iter().zip(&series).enumerate() {
        let c = COLORS[k % COLORS.len()];
        if !pts.is_empty() {
            let d: Vec<String> = pts.iter().map(|p| format!("{:.1},{:.1}", px(p.0), py(p.1))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, d.join(" "));
        }
        for p in pts {
            let (x, e) = (px(p.0), se(p));
            let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{c}"/>"#, py(p.1 - e), py(p.1 + e));
            let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{:.1}" r="2.5" fill="{c}"/>"#, py(p.1));
        }
        let ly = TOP + 14.0 * k as f64 + 6.0;
        let lx = W - RIGHT - 150.0;
        let _ = writeln!(s, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{c}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 26.0, ly + 4.0, m.as_str());
    }
    s.push_str("</svg>\n");
    s
}
