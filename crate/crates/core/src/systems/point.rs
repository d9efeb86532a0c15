use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matrixcore::MAX_DIM;

/// A phase-space point with up to eight coordinates, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    dim: usize,
    x: [f64; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        assert!((1..=MAX_DIM).contains(&coords.len()));
        let mut x = [0.0; MAX_DIM];
        x[..coords.len()].copy_from_slice(coords);
        Point {
            dim: coords.len(),
            x,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Point {
            dim,
            x: [0.0; MAX_DIM],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x[..self.dim]
    }

    /// Hash of the coordinate bits; used to seed per-point streams.
    pub fn bit_hash(&self) -> u64 {
        self.as_slice().iter().fold(0xcbf2_9ce4_8422_2325u64, |h, v| {
            (h ^ v.to_bits()).wrapping_mul(0x0100_0000_01b3)
        })
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.x[..self.dim]
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.x[..self.dim]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if !(1..=MAX_DIM).contains(&v.len()) {
            return Err(D::Error::custom(format!("point dimension {} out of range", v.len())));
        }
        Ok(Point::new(&v))
    }
}
