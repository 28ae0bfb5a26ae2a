use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of n-space, n >= 2. Dimension is a runtime value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput("point needs dim >= 2".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Point { coords })
    }

    pub fn new2(x: f64, y: f64) -> Self {
        Point { coords: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn add_scaled(&self, dir: &[f64], t: f64) -> Point {
        Point {
            coords: self
                .coords
                .iter()
                .zip(dir)
                .map(|(a, d)| a + t * d)
                .collect(),
        }
    }

    /// Point on the segment [self, other] at parameter t in [0, 1].
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        }
    }

    pub fn euclid_norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn euclid_dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn euclid_len(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn normalize(v: &[f64]) -> Result<Vec<f64>> {
    let len = euclid_len(v);
    if len == 0.0 || !len.is_finite() {
        return Err(Error::InvalidInput("cannot normalize zero vector".into()));
    }
    Ok(v.iter().map(|c| c / len).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_dim_and_non_finite() {
        assert!(Point::new(vec![1.0]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![1.0, 2.0, 3.0]).is_ok());
    }

    #[test]
    fn lerp_endpoints() {
        let a = Point::new2(0.0, 0.0);
        let b = Point::new2(2.0, 4.0);
        assert_eq!(a.lerp(&b, 0.0), a);
        assert_eq!(a.lerp(&b, 1.0), b);
        assert_eq!(a.lerp(&b, 0.5), Point::new2(1.0, 2.0));
    }
}
