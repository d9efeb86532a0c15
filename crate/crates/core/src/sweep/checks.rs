use serde::{Deserialize, Serialize};

use super::SweepResult;
use crate::entropy::Method;
use crate::error::{Error, Result};
use crate::measures::{birkhoff_sample, EmpiricalMeasure};
use crate::seed::derive_seed;
use crate::systems::{DynamicalSystem, FamilyHandle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UscVerdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UscWitness {
    pub index: usize,
    pub t: f64,
    pub value: f64,
    /// The higher neighbour of the pair that exposed the dip.
    pub neighbor_t: f64,
    pub neighbor_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UscReport {
    pub method: Method,
    pub window: usize,
    pub slack: f64,
    pub verdict: UscVerdict,
    pub witnesses: Vec<UscWitness>,
}

impl UscReport {
    pub fn not_applicable(method: Method) -> Self {
        UscReport { method, window: 0, slack: 0.0, verdict: UscVerdict::NotApplicable, witnesses: Vec::new() }
    }
}

fn curve(result: &SweepResult, method: Method) -> Vec<(usize, f64, f64, f64)> {
    result
        .rows
        .iter()
        .filter_map(|r| r.estimate(method).map(|e| (r.index, r.t, e.value, e.std_error)))
        .collect()
}

/// Flags every interior grid point that dips below the linear interpolation
/// of a symmetric pair of neighbours (up to `window` positions away among
/// the successful points) by more than `slack` plus the combined standard
/// error. An upward jump of size `J` on either side of `t` produces a dip of
/// at least `J/2`; a continuous curve, however steep, produces none beyond
/// its curvature. Endpoints have no symmetric pair and are never witnesses.
pub fn usc_check(result: &SweepResult, method: Method, window: usize, slack: f64) -> UscReport {
    let c = curve(result, method);
    if c.len() < 3 || window == 0 {
        return UscReport { window, slack, ..UscReport::not_applicable(method) };
    }
    let mut witnesses = Vec::new();
    for (k, &(index, t, h, se)) in c.iter().enumerate() {
        let mut worst: Option<(usize, f64)> = None;
        for j in 1..=window.min(k).min(c.len() - 1 - k) {
            let (l, r) = (c[k - j], c[k + j]);
            let wr = (t - l.1) / (r.1 - l.1);
            let wl = 1.0 - wr;
            let interp = wl * l.2 + wr * r.2;
            let err = se.hypot((wl * l.3).hypot(wr * r.3));
            let excess = interp - slack - err - h;
            if excess > 0.0 && worst.is_none_or(|(_, e)| excess > e) {
                // report the higher of the two neighbours
                worst = Some((if l.2 >= r.2 { k - j } else { k + j }, excess));
            }
        }
        if let Some((n, _)) = worst {
            witnesses.push(UscWitness { index, t, value: h, neighbor_t: c[n].1, neighbor_value: c[n].2 });
        }
    }
    let verdict = if witnesses.is_empty() { UscVerdict::Pass } else { UscVerdict::Fail };
    UscReport { method, window, slack, verdict, witnesses }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub method: Method,
    pub max_gap: f64,
    /// Parameters on either side of the largest gap.
    pub location: (f64, f64),
    /// Weak* distance between the measures on either side, when recorded.
    pub weak_star: Option<f64>,
    pub gaps: Vec<f64>,
}

/// Largest `|h(t_{k+1}) − h(t_k)|` over consecutive successful points.
pub fn continuity_modulus(result: &SweepResult, method: Method) -> Option<ContinuityReport> {
    let c = curve(result, method);
    if c.len() < 2 {
        return None;
    }
    let gaps: Vec<f64> = c.windows(2).map(|w| (w[1].2 - w[0].2).abs()).collect();
    let mut best = 0;
    for (k, g) in gaps.iter().enumerate() {
        if *g > gaps[best] {
            best = k;
        }
    }
    let (a, b) = (c[best], c[best + 1]);
    let weak_star = (b.0 == a.0 + 1).then(|| result.rows[b.0].weak_star_prev).flatten();
    Some(ContinuityReport { method, max_gap: gaps[best], location: (a.1, b.1), weak_star, gaps })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodSplit {
    pub delta: f64,
    /// `∫_{B_δ(S)} log|det Df| dμ`.
    pub inside: f64,
    /// `∫_{M∖B_δ(S)} log|det Df| dμ`.
    pub outside: f64,
    pub inside_mass: f64,
    pub skipped: usize,
}

/// Splits `∫log|det Df|dμ` at the δ-neighbourhood of the singular set. Points
/// on the singular set are skipped and the rest reweighted.
pub fn neighborhood_split_entropy(
    system: &dyn DynamicalSystem,
    measure: &EmpiricalMeasure,
    delta: f64,
) -> Result<NeighborhoodSplit> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidInput("delta must be non-negative".into()));
    }
    if system.singular_set().is_empty() {
        return Err(Error::InvalidInput(format!("{} has no singular set", system.name())));
    }
    let integrand = |x: &crate::systems::Point| -> Option<f64> {
        if system.on_singular_set(x) {
            return None;
        }
        let l = system.differential(x).log_abs_det().1;
        l.is_finite().then_some(l)
    };
    let near = |x: &crate::systems::Point| system.distance_to_singular_set(x) < delta;
    let all = measure.weighted_mean(integrand);
    if all.used_weight <= 0.0 {
        return Err(Error::InvalidInput("no measure point has a defined Jacobian".into()));
    }
    let part = |inside: bool| {
        let m = measure.weighted_mean(|x| if near(x) == inside { integrand(x) } else { Some(0.0) });
        m.value
    };
    let inside = part(true);
    let outside = part(false);
    Ok(NeighborhoodSplit {
        delta,
        inside,
        outside,
        inside_mass: measure.mass_where(|x| near(x) && !system.on_singular_set(x)) / all.used_weight,
        skipped: all.skipped,
    })
}

/// [`neighborhood_split_entropy`] for `f_t` against its Birkhoff measure.
pub fn neighborhood_split_family(
    family: &FamilyHandle,
    t: f64,
    delta: f64,
    seed: u64,
    burn_in: usize,
    length: usize,
) -> Result<NeighborhoodSplit> {
    let system = family.build(t)?;
    let m = birkhoff_sample(system.as_ref(), derive_seed(seed, 0), burn_in, length)?;
    neighborhood_split_entropy(system.as_ref(), &m, delta)
}
