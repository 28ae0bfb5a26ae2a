use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::path::PathPolyline;
use crate::point::{dot, Point};

/// Which metric a distance field or CLI query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Quasihyperbolic,
    DistanceRatio,
    HyperbolicBall,
    HyperbolicHalfspace,
}

/// Distance ratio metric: log(1 + |x-y| / min(d(x), d(y))).
pub fn j_metric(domain: &DomainSpec, x: &Point, y: &Point) -> Result<f64> {
    let norm = NormSpec::Euclidean;
    let dx = domain.boundary_distance(&norm, x)?;
    let dy = domain.boundary_distance(&norm, y)?;
    let sep = x.euclid_dist(y);
    Ok((1.0 + sep / dx.min(dy)).ln())
}

/// Hyperbolic distance in a Euclidean ball. Coordinates are normalized to
/// the unit ball before evaluating 2*arsinh(|x-y| / sqrt((1-|x|^2)(1-|y|^2))).
pub fn hyperbolic_ball_distance(ball: &DomainSpec, x: &Point, y: &Point) -> Result<f64> {
    let (center, radius) = match ball {
        DomainSpec::UnitBall { center, radius } => (center, *radius),
        _ => {
            return Err(Error::UnsupportedCombination(
                "hyperbolic ball distance needs a ball domain".into(),
            ))
        }
    };
    let u: Vec<f64> = x.sub(center).iter().map(|c| c / radius).collect();
    let v: Vec<f64> = y.sub(center).iter().map(|c| c / radius).collect();
    let nu2 = dot(&u, &u);
    let nv2 = dot(&v, &v);
    if nu2 >= 1.0 || nv2 >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    let diff: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
    let num = dot(&diff, &diff).sqrt();
    Ok(2.0 * (num / ((1.0 - nu2) * (1.0 - nv2)).sqrt()).asinh())
}

/// Hyperbolic distance in a half-space: arcosh(1 + |x-y|^2 / (2 h(x) h(y)))
/// with h the height above the boundary hyperplane.
pub fn hyperbolic_halfspace_distance(hs: &DomainSpec, x: &Point, y: &Point) -> Result<f64> {
    let (normal, offset) = match hs {
        DomainSpec::HalfSpace { normal, offset } => (normal, *offset),
        _ => {
            return Err(Error::UnsupportedCombination(
                "hyperbolic half-space distance needs a half-space domain".into(),
            ))
        }
    };
    let hx = dot(&x.coords, normal) - offset;
    let hy = dot(&y.coords, normal) - offset;
    if hx <= 0.0 || hy <= 0.0 {
        return Err(Error::OutsideDomain);
    }
    let diff = x.sub(y);
    let sep2 = dot(&diff, &diff);
    Ok((1.0 + sep2 / (2.0 * hx * hy)).acosh())
}

/// Angle in [0, pi] between the segments [x, 0] and [0, y] at the origin.
/// Computed via atan2 of the in-plane decomposition, which stays accurate
/// near both 0 and pi.
pub fn origin_angle(x: &Point, y: &Point) -> f64 {
    let c = dot(&x.coords, &y.coords);
    let nx2 = dot(&x.coords, &x.coords);
    let ny2 = dot(&y.coords, &y.coords);
    let s2 = (nx2 * ny2 - c * c).max(0.0);
    s2.sqrt().atan2(c)
}

/// Quasihyperbolic distance in punctured n-space with the puncture at the
/// origin: sqrt(alpha^2 + log^2(|x|/|y|)).
pub fn qh_punctured_distance(x: &Point, y: &Point) -> Result<f64> {
    let nx = x.euclid_norm();
    let ny = y.euclid_norm();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::OutsideDomain);
    }
    let alpha = origin_angle(x, y);
    let lr = (nx / ny).ln();
    Ok((alpha * alpha + lr * lr).sqrt())
}

/// An exact quasihyperbolic geodesic in punctured space: a logarithmic
/// spiral r(theta) = |x| e^{c theta} in the plane of x and y, degenerating
/// to a circular arc when |x| = |y| and to a radial segment when the angle
/// vanishes.
#[derive(Debug, Clone)]
pub struct PuncturedGeodesic {
    pub path: PathPolyline,
    /// Set when the endpoints are antipodal with equal radii: two geodesics
    /// exist and one is returned deterministically.
    pub non_unique: bool,
}

pub fn qh_punctured_geodesic(x: &Point, y: &Point, samples: usize) -> Result<PuncturedGeodesic> {
    let nx = x.euclid_norm();
    let ny = y.euclid_norm();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::OutsideDomain);
    }
    if samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    if x == y {
        return Err(Error::InvalidInput("geodesic endpoints coincide".into()));
    }
    let alpha = origin_angle(x, y);
    let e1: Vec<f64> = x.coords.iter().map(|c| c / nx).collect();

    // in-plane unit vector orthogonal to e1, pointing toward y
    let proj = dot(&y.coords, &e1);
    let mut w: Vec<f64> = y.coords.iter().zip(&e1).map(|(c, e)| c - proj * e).collect();
    let wlen = dot(&w, &w).sqrt();
    let mut non_unique = false;
    let e2: Vec<f64> = if wlen > 1e-12 * ny {
        w.iter().map(|c| c / wlen).collect()
    } else if alpha > std::f64::consts::PI / 2.0 {
        // antipodal: pick the lowest-index coordinate axis least parallel to x
        non_unique = true;
        let k = e1
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap();
        w = vec![0.0; e1.len()];
        w[k] = 1.0;
        let p = dot(&w, &e1);
        let mut v: Vec<f64> = w.iter().zip(&e1).map(|(c, e)| c - p * e).collect();
        let vlen = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|c| *c /= vlen);
        v
    } else {
        // radial segment; e2 is unused since alpha = 0
        vec![0.0; e1.len()]
    };

    let log_ratio = (ny / nx).ln();
    let mut vertices = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let theta = alpha * t;
        let r = nx * (log_ratio * t).exp();
        let coords: Vec<f64> = e1
            .iter()
            .zip(&e2)
            .map(|(a, b)| r * (theta.cos() * a + theta.sin() * b))
            .collect();
        vertices.push(Point { coords });
    }
    // snap the far endpoint to y exactly unless we picked an arbitrary plane
    if !non_unique {
        *vertices.last_mut().unwrap() = y.clone();
    }
    vertices.dedup();
    Ok(PuncturedGeodesic {
        path: PathPolyline::new(vertices)?,
        non_unique,
    })
}

/// Inversion in the unit sphere, x -> x / |x|^2. An involution.
pub fn mobius_inversion(x: &Point) -> Result<Point> {
    let n2 = dot(&x.coords, &x.coords);
    if n2 == 0.0 {
        return Err(Error::InvalidInput("inversion undefined at the origin".into()));
    }
    Ok(Point {
        coords: x.coords.iter().map(|c| c / n2).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn j_metric_basic_values() {
        let pp = DomainSpec::punctured_plane();
        let v = j_metric(&pp, &Point::new2(1.0, 0.0), &Point::new2(3.0, 0.0)).unwrap();
        assert!((v - 3.0_f64.ln()).abs() < 1e-12);
        let v = j_metric(&pp, &Point::new2(1.0, 0.0), &Point::new2(-1.0, 0.0)).unwrap();
        assert!((v - 3.0_f64.ln()).abs() < 1e-12);
        let v = j_metric(&pp, &Point::new2(1.0, 0.0), &Point::new2(1.0, 0.0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn hyperbolic_ball_radial_value() {
        let ball = DomainSpec::unit_ball(Point::new2(0.0, 0.0), 1.0).unwrap();
        let o = Point::new2(0.0, 0.0);
        assert_eq!(hyperbolic_ball_distance(&ball, &o, &o).unwrap(), 0.0);
        // radial integral of 2/(1-s^2) from 0 to 1/2 is log 3
        let v = hyperbolic_ball_distance(&ball, &o, &Point::new2(0.5, 0.0)).unwrap();
        assert!((v - 3.0_f64.ln()).abs() < 1e-12);
        // symmetry
        let a = Point::new2(0.3, 0.0);
        let b = Point::new2(0.0, 0.3);
        let ab = hyperbolic_ball_distance(&ball, &a, &b).unwrap();
        let ba = hyperbolic_ball_distance(&ball, &b, &a).unwrap();
        assert_eq!(ab, ba);
        assert!(hyperbolic_ball_distance(&ball, &o, &Point::new2(1.0, 0.0)).is_err());
    }

    #[test]
    fn hyperbolic_halfspace_values() {
        let hs = DomainSpec::upper_half_plane();
        let v =
            hyperbolic_halfspace_distance(&hs, &Point::new2(0.0, 1.0), &Point::new2(0.0, E)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v =
            hyperbolic_halfspace_distance(&hs, &Point::new2(0.0, 1.0), &Point::new2(1.0, 1.0)).unwrap();
        assert!((v - 1.5_f64.acosh()).abs() < 1e-12);
        let p = Point::new2(0.3, 0.7);
        assert_eq!(hyperbolic_halfspace_distance(&hs, &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn punctured_distance_examples() {
        let v = qh_punctured_distance(&Point::new2(1.0, 0.0), &Point::new2(-1.0, 0.0)).unwrap();
        assert!((v - PI).abs() < 1e-12);
        let v = qh_punctured_distance(&Point::new2(1.0, 0.0), &Point::new2(E, 0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = qh_punctured_distance(&Point::new2(1.0, 0.0), &Point::new2(0.0, PI.exp())).unwrap();
        assert!((v - PI * 5.0_f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(qh_punctured_distance(&Point::new2(0.0, 0.0), &Point::new2(1.0, 0.0)).is_err());
    }

    #[test]
    fn geodesic_circular_arc_stays_on_sphere() {
        let x = Point::new2(2.0, 0.0);
        let y = Point::new2(0.0, 2.0);
        let g = qh_punctured_geodesic(&x, &y, 101).unwrap();
        assert!(!g.non_unique);
        for v in &g.path.vertices {
            assert!((v.euclid_norm() - 2.0).abs() < 1e-9);
        }
        assert_eq!(g.path.start(), &x);
        assert_eq!(g.path.end(), &y);
    }

    #[test]
    fn geodesic_radial_segment() {
        let g = qh_punctured_geodesic(&Point::new2(1.0, 0.0), &Point::new2(E, 0.0), 33).unwrap();
        let mut prev = 0.0;
        for v in &g.path.vertices {
            assert!(v.y().abs() < 1e-12);
            assert!(v.x() > prev);
            prev = v.x();
        }
    }

    #[test]
    fn geodesic_length_converges_to_distance() {
        let x = Point::new2(1.0, 0.0);
        let y = Point::new2(0.0, E);
        let g = qh_punctured_geodesic(&x, &y, 512).unwrap();
        let len = crate::path::qh_length(&DomainSpec::punctured_plane(), &NormSpec::Euclidean, &g.path, 16)
            .unwrap();
        let exact = qh_punctured_distance(&x, &y).unwrap();
        assert!((exact - (PI * PI / 4.0 + 1.0).sqrt()).abs() < 1e-12);
        assert!((len - exact).abs() < 1e-4, "len {len} exact {exact}");
    }

    #[test]
    fn antipodal_geodesic_is_flagged_and_circular() {
        let x = Point::new2(1.0, 0.0);
        let y = Point::new2(-1.0, 0.0);
        let g = qh_punctured_geodesic(&x, &y, 65).unwrap();
        assert!(g.non_unique);
        for v in &g.path.vertices {
            assert!((v.euclid_norm() - 1.0).abs() < 1e-9);
        }
        // endpoints are still reached
        assert!(g.path.end().euclid_dist(&y) < 1e-9);
    }

    #[test]
    fn mobius_inversion_involution() {
        let x = Point::new2(3.0, 4.0);
        let fx = mobius_inversion(&x).unwrap();
        let ffx = mobius_inversion(&fx).unwrap();
        assert!(ffx.euclid_dist(&x) < 1e-12);
        let v = mobius_inversion(&Point::new2(2.0, 0.0)).unwrap();
        assert!(v.euclid_dist(&Point::new2(0.5, 0.0)) < 1e-15);
        let u = mobius_inversion(&Point::new2(0.0, 1.0)).unwrap();
        assert!(u.euclid_dist(&Point::new2(0.0, 1.0)) < 1e-15);
        assert!(mobius_inversion(&Point::new2(0.0, 0.0)).is_err());
    }
}
