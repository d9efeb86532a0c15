use std::fmt;
use std::sync::Arc;

use super::viana::{DEFAULT_A0, DEFAULT_EXPANSION};
use super::{
    cat_map, cat_matrix, make_derived_from_anosov, make_manneville_pomeau, make_standard_skew,
    make_torus_automorphism, make_viana, DynamicalSystem, IdentityMap, PhaseSpace,
};
use crate::error::{Error, Result};
use crate::matrixcore::SquareMatrix;

type Builder = dyn Fn(f64) -> Result<Arc<dyn DynamicalSystem>> + Send + Sync;

/// One-parameter family of systems `t ↦ f_t`.
#[derive(Clone)]
pub struct FamilyHandle {
    pub id: String,
    pub param: String,
    /// Closed lower end; the upper end is open when `upper_open`.
    pub interval: (f64, f64),
    pub upper_open: bool,
    builder: Arc<Builder>,
}

impl fmt::Debug for FamilyHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyHandle")
            .field("id", &self.id)
            .field("param", &self.param)
            .field("interval", &self.interval)
            .finish()
    }
}

impl FamilyHandle {
    pub fn new(
        id: &str,
        param: &str,
        interval: (f64, f64),
        upper_open: bool,
        builder: impl Fn(f64) -> Result<Arc<dyn DynamicalSystem>> + Send + Sync + 'static,
    ) -> Self {
        FamilyHandle {
            id: id.into(),
            param: param.into(),
            interval,
            upper_open,
            builder: Arc::new(builder),
        }
    }

    /// Family whose every member is `system`.
    pub fn constant(system: Arc<dyn DynamicalSystem>) -> Self {
        let id = format!("constant:{}", system.name());
        FamilyHandle::new(&id, "t", (f64::NEG_INFINITY, f64::INFINITY), false, move |_| {
            Ok(system.clone())
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.interval;
        t >= lo && (t < hi || (!self.upper_open && t == hi))
    }

    pub fn build(&self, t: f64) -> Result<Arc<dyn DynamicalSystem>> {
        if !self.contains(t) {
            return Err(Error::InvalidInput(format!(
                "{} = {t} outside the {} family's parameter interval {:?}",
                self.param, self.id, self.interval
            )));
        }
        (self.builder)(t)
    }
}

/// Named families: `mp` (α), `da` (deformation), `viana` (ε), `skew` (K, N = 2).
pub fn family(id: &str) -> Result<FamilyHandle> {
    let h = match id {
        "mp" => FamilyHandle::new("mp", "alpha", (0.0, 1.0), true, |t| {
            Ok(Arc::new(make_manneville_pomeau(t)?))
        }),
        "da" => FamilyHandle::new("da", "deformation", (0.0, 1.0), true, |t| {
            Ok(Arc::new(make_derived_from_anosov(t)?))
        }),
        "viana" => FamilyHandle::new("viana", "eps", (0.0, 0.05), false, |t| {
            Ok(Arc::new(make_viana(DEFAULT_A0, t, DEFAULT_EXPANSION)?))
        }),
        "skew" => FamilyHandle::new("skew", "K", (0.0, 10.0), false, |t| {
            Ok(Arc::new(make_standard_skew(t, 2)?))
        }),
        other => return Err(Error::InvalidInput(format!("unknown family '{other}'"))),
    };
    Ok(h)
}

fn take(params: &mut Vec<(String, f64)>, key: &str, default: Option<f64>) -> Result<f64> {
    if let Some(pos) = params.iter().position(|(k, _)| k == key) {
        return Ok(params.remove(pos).1);
    }
    default.ok_or_else(|| Error::InvalidInput(format!("missing parameter '{key}'")))
}

fn as_u32(v: f64, key: &str) -> Result<u32> {
    if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
        return Err(Error::InvalidInput(format!("parameter '{key}' must be a non-negative integer")));
    }
    Ok(v as u32)
}

/// Builds a system from its name and `key=value` parameters.
///
/// | name | parameters (defaults) |
/// |------|-----------------------|
/// | `cat` | — |
/// | `cat4` | — (block-diagonal cat map on T⁴) |
/// | `mp` | `alpha` (0) |
/// | `da` | `deformation` (0) |
/// | `skew` | `K` (0.5), `N` (2) |
/// | `viana` | `a0` (1.7808), `eps` (0.01), `d` (16) |
/// | `identity` | `dim` (2), torus |
pub fn build_system(name: &str, params: &[(String, f64)]) -> Result<Arc<dyn DynamicalSystem>> {
    let mut p = params.to_vec();
    let sys: Arc<dyn DynamicalSystem> = match name {
        "cat" => Arc::new(cat_map()),
        "cat4" => {
            let a = cat_matrix();
            let m = SquareMatrix::block_diag(&a, &a)?;
            Arc::new(make_torus_automorphism(&m)?.with_name("cat4"))
        }
        "mp" => Arc::new(make_manneville_pomeau(take(&mut p, "alpha", Some(0.0))?)?),
        "da" => Arc::new(make_derived_from_anosov(take(&mut p, "deformation", Some(0.0))?)?),
        "skew" => {
            let k = take(&mut p, "K", Some(0.5))?;
            let n = as_u32(take(&mut p, "N", Some(2.0))?, "N")?;
            Arc::new(make_standard_skew(k, n)?)
        }
        "viana" => {
            let a0 = take(&mut p, "a0", Some(DEFAULT_A0))?;
            let eps = take(&mut p, "eps", Some(0.01))?;
            let d = as_u32(take(&mut p, "d", Some(DEFAULT_EXPANSION as f64))?, "d")?;
            Arc::new(make_viana(a0, eps, d)?)
        }
        "identity" => {
            let d = as_u32(take(&mut p, "dim", Some(2.0))?, "dim")? as usize;
            if !(1..=8).contains(&d) {
                return Err(Error::InvalidInput("dim must be in 1..=8".into()));
            }
            Arc::new(IdentityMap::new(PhaseSpace::torus(d)))
        }
        other => return Err(Error::InvalidInput(format!("unknown system '{other}'"))),
    };
    if let Some((k, _)) = p.first() {
        return Err(Error::InvalidInput(format!("unknown parameter '{k}' for system '{name}'")));
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::Point;

    #[test]
    fn builders_are_deterministic() {
        let f = family("da").unwrap();
        let a = f.build(0.3).unwrap();
        let b = f.build(0.3).unwrap();
        let x = Point::new(&[0.01, 0.02]);
        assert_eq!(a.eval(&x).as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                   b.eval(&x).as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn interval_enforced() {
        let f = family("mp").unwrap();
        assert!(f.build(0.0).is_ok());
        assert!(f.build(0.999).is_ok());
        assert!(f.build(1.0).is_err());
        assert!(family("nope").is_err());
    }

    #[test]
    fn registry_parses_params() {
        let s = build_system("mp", &[("alpha".into(), 0.5)]).unwrap();
        assert_eq!(s.params(), vec![("alpha".to_string(), 0.5)]);
        assert!(build_system("mp", &[("beta".into(), 0.5)]).is_err());
        assert!(build_system("skew", &[("N".into(), 1.5)]).is_err());
        assert_eq!(build_system("cat4", &[]).unwrap().dim(), 4);
    }
}
