//! Integrability and regularity diagnostics: mass of ε-neighbourhoods of the
//! singular set, log⁺ integrability of the derivative, Hölder dependence of
//! the Jacobian on the parameter and a bound on the mean log-Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixcore::singular_values;
use crate::systems::{DynamicalSystem, FamilyHandle, Point};

use super::types::EmpiricalMeasure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ls1Fit {
    /// `exp(intercept)`.
    pub c: f64,
    /// Slope of log-mass against log-ε; `+∞` when every ball is empty.
    pub beta: f64,
    /// RMS of the log-scale fit residuals.
    pub residual: f64,
    pub masses: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ls2Integral {
    pub forward: f64,
    pub backward: Option<f64>,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub c: f64,
    pub beta: f64,
    /// Largest `D(s,t) − c|s−t|^β` over the pairs, floored at 0.
    pub max_violation: f64,
    /// Smallest constant for which the bound holds on every pair at exponent `beta`.
    pub c_envelope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianBound {
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub skipped: usize,
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, rms residual)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    (a, b, (ss / n).sqrt())
}

/// Fits `μ(B_ε(S)) ≈ C ε^β` over `eps_grid`.
pub fn ls1_fit(system: &dyn DynamicalSystem, measure: &EmpiricalMeasure, eps_grid: &[f64]) -> Result<Ls1Fit> {
    if system.singular_set().is_empty() {
        return Err(Error::InvalidInput(format!("{} has an empty singular set", system.name())));
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidInput("eps grid must be non-empty and positive".into()));
    }
    let masses: Vec<(f64, f64)> = eps_grid
        .iter()
        .map(|&eps| (eps, measure.mass_where(|x| system.distance_to_singular_set(x) < eps)))
        .collect();
    let positive: Vec<&(f64, f64)> = masses.iter().filter(|(_, m)| *m > 0.0).collect();
    if positive.is_empty() {
        return Ok(Ls1Fit { c: 0.0, beta: f64::INFINITY, residual: 0.0, masses });
    }
    if positive.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two radii with positive mass to fit an exponent".into(),
        ));
    }
    let xs: Vec<f64> = positive.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = positive.iter().map(|(_, m)| m.ln()).collect();
    let (a, b, residual) = linear_fit(&xs, &ys);
    Ok(Ls1Fit { c: a.exp(), beta: b, residual, masses })
}

fn log_plus(t: f64) -> f64 {
    t.ln().max(0.0)
}

/// `∫log⁺‖Df‖dμ` and, for invertible systems, `∫log⁺‖Df⁻¹‖dμ`.
pub fn ls2_integral(system: &dyn DynamicalSystem, measure: &EmpiricalMeasure) -> Result<Ls2Integral> {
    let usable = |x: &Point| !system.on_singular_set(x);
    let fwd = measure.weighted_mean(|x| {
        if !usable(x) {
            return None;
        }
        let df = system.differential(x);
        df.is_finite().then(|| log_plus(singular_values(&df)[0]))
    });
    if fwd.used_weight <= 0.0 {
        return Err(Error::InvalidInput("no measure point has a defined differential".into()));
    }
    let backward = system.is_invertible().then(|| {
        measure
            .weighted_mean(|x| {
                if !usable(x) {
                    return None;
                }
                let df = system.differential(x);
                let smin = *singular_values(&df).last()?;
                (smin > 0.0).then(|| log_plus(1.0 / smin))
            })
            .value
    });
    Ok(Ls2Integral { forward: fwd.value, backward, skipped: fwd.skipped })
}

/// Hölder fit of `t ↦ log|det Df_t(x)|`, uniform over `sample_points`.
pub fn holder_parameter_check(family: &FamilyHandle, t_grid: &[f64], sample_points: &[Point]) -> Result<HolderFit> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidInput("need at least two parameter values".into()));
    }
    if sample_points.is_empty() {
        return Err(Error::InvalidInput("no sample points".into()));
    }
    let systems = t_grid.iter().map(|&t| family.build(t)).collect::<Result<Vec<_>>>()?;
    for x in sample_points {
        if let Some(s) = systems.iter().find(|s| s.on_singular_set(x)) {
            return Err(Error::InvalidInput(format!(
                "sample point {:?} lies on the singular set of {}",
                x.as_slice(),
                s.name()
            )));
        }
    }
    let logdet: Vec<Vec<f64>> = systems
        .iter()
        .map(|s| sample_points.iter().map(|x| s.differential(x).log_abs_det().1).collect())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..t_grid.len() {
        for j in i + 1..t_grid.len() {
            let gap = (t_grid[i] - t_grid[j]).abs();
            if gap == 0.0 {
                continue;
            }
            let d = logdet[i]
                .iter()
                .zip(&logdet[j])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if !d.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            pairs.push((gap, d));
        }
    }
    let positive: Vec<&(f64, f64)> = pairs.iter().filter(|(_, d)| *d > 0.0).collect();
    if positive.is_empty() {
        return Ok(HolderFit { c: 0.0, beta: 1.0, max_violation: 0.0, c_envelope: 0.0 });
    }
    let xs: Vec<f64> = positive.iter().map(|(g, _)| g.ln()).collect();
    let ys: Vec<f64> = positive.iter().map(|(_, d)| d.ln()).collect();
    let distinct = xs.iter().any(|x| (x - xs[0]).abs() > 1e-12);
    let (c, beta) = if distinct {
        let (a, b, _) = linear_fit(&xs, &ys);
        (a.exp(), b)
    } else {
        let (g, d) = *positive[0];
        (d / g, 1.0)
    };
    let max_violation = pairs.iter().map(|(g, d)| d - c * g.powf(beta)).fold(0.0, f64::max);
    let c_envelope = pairs.iter().map(|(g, d)| d / g.powf(beta)).fold(0.0, f64::max);
    Ok(HolderFit { c, beta, max_violation, c_envelope })
}

/// `|∫log|det Df|dμ|` against `bound`.
pub fn bounded_jacobian_check(system: &dyn DynamicalSystem, measure: &EmpiricalMeasure, bound: f64) -> Result<JacobianBound> {
    let m = measure.weighted_mean(|x| {
        if system.on_singular_set(x) {
            return None;
        }
        let (_, l) = system.differential(x).log_abs_det();
        l.is_finite().then_some(l)
    });
    if m.used_weight <= 0.0 {
        return Err(Error::InvalidInput("no measure point has a defined Jacobian".into()));
    }
    let value = m.value.abs();
    Ok(JacobianBound { value, bound, pass: value <= bound, skipped: m.skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Provenance;
    use crate::systems::{cat_map, family, make_manneville_pomeau, IdentityMap, PhaseSpace};
    use std::f64::consts::LN_2;
    use std::sync::Arc;

    fn lebesgue_interval(n: usize) -> EmpiricalMeasure {
        let pts = (0..n).map(|i| Point::new(&[(i as f64 + 0.5) / n as f64])).collect();
        EmpiricalMeasure::uniform(PhaseSpace::unit_interval(), pts, Provenance::Manual).unwrap()
    }

    fn lebesgue_torus(n: usize) -> EmpiricalMeasure {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                pts.push(Point::new(&[(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]));
            }
        }
        EmpiricalMeasure::uniform(PhaseSpace::torus(2), pts, Provenance::Manual).unwrap()
    }

    #[test]
    fn ls1_doubling_has_unit_exponent() {
        let mp = make_manneville_pomeau(0.0).unwrap();
        let fit = ls1_fit(&mp, &lebesgue_interval(100_000), &[0.001, 0.002, 0.005, 0.01, 0.02, 0.05]).unwrap();
        assert!((fit.beta - 1.0).abs() < 0.01, "{fit:?}");
        assert!((fit.c - 2.0).abs() < 0.05, "{fit:?}");
        assert!(fit.residual >= 0.0);
    }

    #[test]
    fn ls1_vacuous_when_support_avoids_singular_set() {
        let mp = make_manneville_pomeau(0.0).unwrap();
        let m = EmpiricalMeasure::dirac(PhaseSpace::unit_interval(), Point::new(&[0.9])).unwrap();
        let fit = ls1_fit(&mp, &m, &[0.01, 0.1]).unwrap();
        assert_eq!(fit.beta, f64::INFINITY);
    }

    #[test]
    fn ls1_needs_a_singular_set() {
        assert!(ls1_fit(&cat_map(), &lebesgue_torus(4), &[0.1]).is_err());
    }

    #[test]
    fn ls2_cat_is_log_lambda() {
        let r = ls2_integral(&cat_map(), &lebesgue_torus(16)).unwrap();
        let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((r.forward - l).abs() < 1e-12);
        assert!((r.backward.unwrap() - l).abs() < 1e-12);
    }

    #[test]
    fn ls2_identity_and_doubling() {
        let id = IdentityMap::new(PhaseSpace::torus(2));
        assert_eq!(ls2_integral(&id, &lebesgue_torus(4)).unwrap().forward, 0.0);
        let mp = make_manneville_pomeau(0.0).unwrap();
        let r = ls2_integral(&mp, &lebesgue_interval(1000)).unwrap();
        assert!((r.forward - LN_2).abs() < 1e-12);
        assert!(r.backward.is_none());
    }

    #[test]
    fn ls2_skips_singular_points() {
        let mp = make_manneville_pomeau(0.0).unwrap();
        let pts = vec![Point::new(&[0.5]), Point::new(&[0.7])];
        let m = EmpiricalMeasure::uniform(PhaseSpace::unit_interval(), pts, Provenance::Manual).unwrap();
        let r = ls2_integral(&mp, &m).unwrap();
        assert_eq!(r.skipped, 1);
        assert!((r.forward - LN_2).abs() < 1e-15);
    }

    #[test]
    fn holder_constant_family() {
        let fam = FamilyHandle::constant(Arc::new(cat_map()));
        let pts = vec![Point::new(&[0.1, 0.2]), Point::new(&[0.7, 0.3])];
        let h = holder_parameter_check(&fam, &[0.0, 0.5, 1.0], &pts).unwrap();
        assert_eq!(h.max_violation, 0.0);
    }

    #[test]
    fn holder_mp_right_branch_is_flat() {
        let fam = family("mp").unwrap();
        let pts: Vec<Point> = (0..20).map(|i| Point::new(&[0.6 + 0.02 * i as f64])).collect();
        let h = holder_parameter_check(&fam, &[0.0, 0.3, 0.6, 0.9], &pts).unwrap();
        assert_eq!((h.c, h.max_violation), (0.0, 0.0));
    }

    #[test]
    fn holder_mp_left_branch_fits() {
        let fam = family("mp").unwrap();
        let pts: Vec<Point> = (1..20).map(|i| Point::new(&[0.02 * i as f64])).collect();
        let h = holder_parameter_check(&fam, &[0.0, 0.1, 0.2, 0.4, 0.8], &pts).unwrap();
        assert!(h.c > 0.0 && h.beta > 0.0 && h.c_envelope >= h.c);
    }

    #[test]
    fn holder_viana_bound_holds() {
        let fam = family("viana").unwrap();
        let pts: Vec<Point> = (0..10).map(|i| Point::new(&[0.1 * i as f64 + 0.03, 0.3 - 0.05 * i as f64 + 0.01])).collect();
        let h = holder_parameter_check(&fam, &[0.0, 0.01, 0.02, 0.04], &pts).unwrap();
        assert!(h.c.is_finite() && h.beta.is_finite());
        assert!(h.c_envelope.is_finite());
    }

    #[test]
    fn holder_rejects_points_on_singular_set() {
        let fam = family("mp").unwrap();
        assert!(holder_parameter_check(&fam, &[0.0, 0.5], &[Point::new(&[0.5])]).is_err());
    }

    #[test]
    fn jacobian_bound_paths() {
        let r = bounded_jacobian_check(&cat_map(), &lebesgue_torus(8), 1e-9).unwrap();
        assert!(r.value < 1e-12 && r.pass);
        let mp = make_manneville_pomeau(0.0).unwrap();
        let r = bounded_jacobian_check(&mp, &lebesgue_interval(1000), 1.0).unwrap();
        assert!((r.value - LN_2).abs() < 1e-12 && r.pass);
        assert!(!bounded_jacobian_check(&mp, &lebesgue_interval(1000), 0.1).unwrap().pass);
    }
}
