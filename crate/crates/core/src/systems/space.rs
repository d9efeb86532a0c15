use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::Point;
use crate::seed::Rng;

/// Phase spaces used by the example families. Circle coordinates have
/// period 1 and live in `[0, 1)`; segment coordinates are clamped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PhaseSpace {
    Torus { d: usize },
    Interval { lo: f64, hi: f64 },
    /// Circle × segment (the base/fiber space of skew products over the circle).
    Cylinder { lo: f64, hi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    Circle,
    Segment { lo: f64, hi: f64 },
}

impl Axis {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Axis::Circle => (0.0, 1.0),
            Axis::Segment { lo, hi } => (lo, hi),
        }
    }

    pub fn distance(&self, a: f64, b: f64) -> f64 {
        match self {
            Axis::Circle => {
                let d = (a - b).abs() % 1.0;
                d.min(1.0 - d)
            }
            Axis::Segment { .. } => (a - b).abs(),
        }
    }

    fn reduce(&self, v: f64) -> f64 {
        match *self {
            Axis::Circle => wrap(v),
            Axis::Segment { lo, hi } => v.clamp(lo, hi),
        }
    }
}

/// `v mod 1` in `[0, 1)`.
#[inline]
pub fn wrap(v: f64) -> f64 {
    let r = v - v.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

// Low-bit refresh amplitudes: absolute on circles, relative on segments.
const CIRCLE_REFRESH: f64 = 1.0 / (1u64 << 47) as f64;
const SEGMENT_REFRESH: f64 = 1.0 / (1u64 << 48) as f64;

impl PhaseSpace {
    pub fn torus(d: usize) -> Self {
        PhaseSpace::Torus { d }
    }

    pub fn unit_interval() -> Self {
        PhaseSpace::Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            PhaseSpace::Torus { d } => *d,
            PhaseSpace::Interval { .. } => 1,
            PhaseSpace::Cylinder { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PhaseSpace::Torus { .. } => "torus",
            PhaseSpace::Interval { .. } => "interval",
            PhaseSpace::Cylinder { .. } => "cylinder",
        }
    }

    pub fn axis(&self, i: usize) -> Axis {
        match *self {
            PhaseSpace::Torus { .. } => Axis::Circle,
            PhaseSpace::Interval { lo, hi } => Axis::Segment { lo, hi },
            PhaseSpace::Cylinder { lo, hi } => {
                if i == 0 {
                    Axis::Circle
                } else {
                    Axis::Segment { lo, hi }
                }
            }
        }
    }

    pub fn axes(&self) -> Vec<Axis> {
        (0..self.dim()).map(|i| self.axis(i)).collect()
    }

    /// Lebesgue-uniform random point.
    pub fn sample_uniform(&self, rng: &mut Rng) -> Point {
        let mut p = Point::zeros(self.dim());
        for (i, v) in p.iter_mut().enumerate() {
            let (lo, hi) = self.axis(i).bounds();
            *v = lo + (hi - lo) * rng.gen::<f64>();
        }
        p
    }

    pub fn reduce(&self, p: &mut Point) {
        for i in 0..p.dim() {
            p[i] = self.axis(i).reduce(p[i]);
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.iter().enumerate().all(|(i, &v)| {
                let (lo, hi) = self.axis(i).bounds();
                match self.axis(i) {
                    Axis::Circle => (lo..hi).contains(&v),
                    Axis::Segment { .. } => v >= lo && v <= hi,
                }
            })
    }

    /// Max-metric distance.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        (0..self.dim())
            .map(|i| self.axis(i).distance(a[i], b[i]))
            .fold(0.0, f64::max)
    }

    /// Replaces the lowest mantissa bits of `p = f(prev)` with fresh random
    /// bits.
    ///
    /// Maps with integer expansion factors (the doubling map, `θ ↦ 16θ`)
    /// shift zeros into the mantissa and collapse every floating-point orbit
    /// onto a fixed point within ~53 steps. The perturbation is far below any
    /// resolved scale and turns the computed orbit into a pseudo-orbit with
    /// `~1e-14` errors per step. On segments its size follows the rounding
    /// error of the step, `max(|prev|, |p|)`: relative near a fixed point at
    /// 0, absolute after a cancellation such as `2x − 1` near `x = 1/2`.
    /// Values pushed out of the segment are reflected back in.
    pub fn refresh(&self, prev: &Point, p: &mut Point, rng: &mut Rng) {
        for i in 0..p.dim() {
            let u: f64 = rng.gen::<f64>() - 0.5;
            p[i] = match self.axis(i) {
                Axis::Circle => wrap(p[i] + u * CIRCLE_REFRESH),
                Axis::Segment { lo, hi } => {
                    let v = p[i] + u * SEGMENT_REFRESH * p[i].abs().max(prev[i].abs());
                    let v = if v < lo { 2.0 * lo - v } else if v > hi { 2.0 * hi - v } else { v };
                    v.clamp(lo, hi)
                }
            };
        }
    }
}
