use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::point::{dot, euclid_len, normalize, Point};

/// A proper subdomain of n-space from one of five parametric families.
/// Each family has an exact membership test and boundary-distance oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    /// { x : <x, normal> > offset } with a unit normal.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// n-space minus a finite nonempty set of punctures.
    Punctured { punctures: Vec<Point> },
    /// Open Euclidean ball.
    UnitBall { center: Point, radius: f64 },
    /// The plane minus the closed ray apex + t*direction, t >= 0. 2D only.
    SlitPlane { apex: Point, direction: Vec<f64> },
    /// Strictly convex polygon interior, counter-clockwise vertices. 2D only.
    ConvexPolygon { vertices: Vec<Point> },
}

impl DomainSpec {
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Ok(DomainSpec::HalfSpace {
            normal: normalize(&normal)?,
            offset,
        })
    }

    pub fn punctured(punctures: Vec<Point>) -> Result<Self> {
        if punctures.is_empty() {
            return Err(Error::InvalidInput("no punctures".into()));
        }
        let d = DomainSpec::Punctured { punctures };
        d.validate()?;
        Ok(d)
    }

    /// The punctured plane with the single puncture at the origin.
    pub fn punctured_plane() -> Self {
        DomainSpec::Punctured {
            punctures: vec![Point::new2(0.0, 0.0)],
        }
    }

    /// The upper half-plane { (x, y) : y > 0 }.
    pub fn upper_half_plane() -> Self {
        DomainSpec::HalfSpace {
            normal: vec![0.0, 1.0],
            offset: 0.0,
        }
    }

    pub fn unit_ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("ball radius must be positive".into()));
        }
        Ok(DomainSpec::UnitBall { center, radius })
    }

    pub fn slit_plane(apex: Point, direction: Vec<f64>) -> Result<Self> {
        if apex.dim() != 2 || direction.len() != 2 {
            return Err(Error::InvalidInput("slit plane is 2D only".into()));
        }
        Ok(DomainSpec::SlitPlane {
            apex,
            direction: normalize(&direction)?,
        })
    }

    pub fn convex_polygon(vertices: Vec<Point>) -> Result<Self> {
        let d = DomainSpec::ConvexPolygon { vertices };
        d.validate()?;
        Ok(d)
    }

    /// Re-check the structural invariants, e.g. after deserializing.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::HalfSpace { normal, .. } => {
                if (euclid_len(normal) - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput("half-space normal not unit".into()));
                }
            }
            DomainSpec::Punctured { punctures } => {
                if punctures.is_empty() {
                    return Err(Error::InvalidInput("no punctures".into()));
                }
                let d0 = punctures[0].dim();
                if punctures.iter().any(|p| p.dim() != d0) {
                    return Err(Error::InvalidInput("puncture dimension mismatch".into()));
                }
            }
            DomainSpec::UnitBall { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidInput("ball radius must be positive".into()));
                }
            }
            DomainSpec::SlitPlane { apex, direction } => {
                if apex.dim() != 2 || direction.len() != 2 {
                    return Err(Error::InvalidInput("slit plane is 2D only".into()));
                }
                if (euclid_len(direction) - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput("slit direction not unit".into()));
                }
            }
            DomainSpec::ConvexPolygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidInput("polygon needs >= 3 vertices".into()));
                }
                if vertices.iter().any(|v| v.dim() != 2) {
                    return Err(Error::InvalidInput("polygon is 2D only".into()));
                }
                let n = vertices.len();
                for i in 0..n {
                    let a = &vertices[i];
                    let b = &vertices[(i + 1) % n];
                    let c = &vertices[(i + 2) % n];
                    let cross = (b.x() - a.x()) * (c.y() - b.y()) - (b.y() - a.y()) * (c.x() - b.x());
                    if cross <= 0.0 {
                        return Err(Error::InvalidInput(
                            "polygon vertices not in strictly convex CCW position".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::HalfSpace { normal, .. } => normal.len(),
            DomainSpec::Punctured { punctures } => punctures[0].dim(),
            DomainSpec::UnitBall { center, .. } => center.dim(),
            DomainSpec::SlitPlane { .. } | DomainSpec::ConvexPolygon { .. } => 2,
        }
    }

    /// Strict interior membership. Puncture and slit points are excluded.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        if x.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "point dim {} does not match domain dim {}",
                x.dim(),
                self.dim()
            )));
        }
        Ok(match self {
            DomainSpec::HalfSpace { normal, offset } => dot(&x.coords, normal) > *offset,
            DomainSpec::Punctured { punctures } => {
                punctures.iter().all(|p| x.euclid_dist(p) > 0.0)
            }
            DomainSpec::UnitBall { center, radius } => x.euclid_dist(center) < *radius,
            DomainSpec::SlitPlane { apex, direction } => {
                ray_distance(x, apex, direction) > 0.0
            }
            DomainSpec::ConvexPolygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = &vertices[i];
                    let b = &vertices[(i + 1) % n];
                    (b.x() - a.x()) * (x.y() - a.y()) - (b.y() - a.y()) * (x.x() - a.x()) > 0.0
                })
            }
        })
    }

    /// Exact distance from an interior point to the boundary.
    ///
    /// General p-norms are supported only for punctured domains, where the
    /// distance is a minimum of point distances. The remaining families are
    /// Euclidean only and fail loudly for other norms.
    pub fn boundary_distance(&self, norm: &NormSpec, x: &Point) -> Result<f64> {
        if !self.contains(x)? {
            return Err(Error::OutsideDomain);
        }
        if let DomainSpec::Punctured { punctures } = self {
            return Ok(punctures
                .iter()
                .map(|p| norm.value(&x.sub(p)).unwrap_or(f64::INFINITY))
                .fold(f64::INFINITY, f64::min));
        }
        if !norm.is_euclidean() {
            return Err(Error::UnsupportedCombination(
                "non-Euclidean boundary distance is only defined for punctured domains".into(),
            ));
        }
        Ok(match self {
            DomainSpec::HalfSpace { normal, offset } => dot(&x.coords, normal) - offset,
            DomainSpec::UnitBall { center, radius } => radius - x.euclid_dist(center),
            DomainSpec::SlitPlane { apex, direction } => ray_distance(x, apex, direction),
            DomainSpec::ConvexPolygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| segment_distance(x, &vertices[i], &vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            DomainSpec::Punctured { .. } => unreachable!(),
        })
    }
}

impl DomainSpec {
    /// Whether the open segment (a, b) stays inside the domain, assuming both
    /// endpoints do. Sampling cannot detect crossings of measure-zero
    /// boundaries (slit, punctures), so this is an exact geometric test.
    pub fn segment_in_domain(&self, a: &Point, b: &Point) -> Result<bool> {
        if !self.contains(a)? || !self.contains(b)? {
            return Ok(false);
        }
        Ok(match self {
            // convex domains contain every chord
            DomainSpec::HalfSpace { .. }
            | DomainSpec::UnitBall { .. }
            | DomainSpec::ConvexPolygon { .. } => true,
            DomainSpec::Punctured { punctures } => punctures
                .iter()
                .all(|p| segment_distance(p, a, b) > 0.0),
            DomainSpec::SlitPlane { apex, direction } => {
                !segment_hits_ray(a, b, apex, direction)
            }
        })
    }
}

/// Does the closed segment [a, b] intersect the closed ray apex + s*dir, s >= 0?
fn segment_hits_ray(a: &Point, b: &Point, apex: &Point, dir: &[f64]) -> bool {
    let rx = b.x() - a.x();
    let ry = b.y() - a.y();
    let qx = apex.x() - a.x();
    let qy = apex.y() - a.y();
    let denom = rx * dir[1] - ry * dir[0];
    if denom == 0.0 {
        // parallel; endpoints are off the ray, so an intersection requires
        // the segment to lie on the ray's line with some point at s >= 0
        if qx * ry - qy * rx != 0.0 {
            return false;
        }
        let sa = -(qx * dir[0] + qy * dir[1]);
        let sb = sa + rx * dir[0] + ry * dir[1];
        return sa.max(sb) >= 0.0;
    }
    let t = (qx * dir[1] - qy * dir[0]) / denom;
    let s = (qx * ry - qy * rx) / denom;
    (0.0..=1.0).contains(&t) && s >= 0.0
}

/// Euclidean distance from x to the closed ray apex + t*dir, t >= 0.
fn ray_distance(x: &Point, apex: &Point, dir: &[f64]) -> f64 {
    let w = x.sub(apex);
    let t = dot(&w, dir).max(0.0);
    let closest = apex.add_scaled(dir, t);
    x.euclid_dist(&closest)
}

/// Euclidean distance from x to the segment [a, b].
pub fn segment_distance(x: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b.sub(a);
    let len2 = dot(&ab, &ab);
    if len2 == 0.0 {
        return x.euclid_dist(a);
    }
    let t = (dot(&x.sub(a), &ab) / len2).clamp(0.0, 1.0);
    x.euclid_dist(&a.lerp(b, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punctured_boundary_distance() {
        let d = DomainSpec::punctured_plane();
        let e = NormSpec::Euclidean;
        let v = d.boundary_distance(&e, &Point::new2(3.0, 4.0)).unwrap();
        assert_eq!(v, 5.0);

        let two = DomainSpec::punctured(vec![Point::new2(1.0, 0.0), Point::new2(-1.0, 0.0)]).unwrap();
        let v = two
            .boundary_distance(&e, &Point::new2(0.0, 3f64.sqrt()))
            .unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_space_height() {
        let d = DomainSpec::upper_half_plane();
        let v = d
            .boundary_distance(&NormSpec::Euclidean, &Point::new2(7.0, 2.0))
            .unwrap();
        assert_eq!(v, 2.0);
        assert!(!d.contains(&Point::new2(5.0, -1.0)).unwrap());
    }

    #[test]
    fn membership_edge_cases() {
        let d = DomainSpec::punctured_plane();
        assert!(!d.contains(&Point::new2(0.0, 0.0)).unwrap());
        let b = DomainSpec::unit_ball(Point::new2(0.0, 0.0), 1.0).unwrap();
        assert!(b.contains(&Point::new2(0.5, 0.0)).unwrap());
        assert!(!b.contains(&Point::new2(1.0, 0.0)).unwrap());
    }

    #[test]
    fn slit_plane_distance_is_ray_distance() {
        let d = DomainSpec::slit_plane(Point::new2(0.0, 0.0), vec![1.0, 0.0]).unwrap();
        let e = NormSpec::Euclidean;
        // above the slit
        assert!((d.boundary_distance(&e, &Point::new2(5.0, 2.0)).unwrap() - 2.0).abs() < 1e-12);
        // behind the apex distance is to the apex itself
        let v = d.boundary_distance(&e, &Point::new2(-3.0, 4.0)).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
        assert!(!d.contains(&Point::new2(2.0, 0.0)).unwrap());
        assert!(d.contains(&Point::new2(-1e-9, 0.0)).unwrap());
    }

    #[test]
    fn polygon_validation_and_distance() {
        let square = DomainSpec::convex_polygon(vec![
            Point::new2(0.0, 0.0),
            Point::new2(1.0, 0.0),
            Point::new2(1.0, 1.0),
            Point::new2(0.0, 1.0),
        ])
        .unwrap();
        let e = NormSpec::Euclidean;
        let v = square
            .boundary_distance(&e, &Point::new2(0.5, 0.5))
            .unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        // clockwise input is rejected
        assert!(DomainSpec::convex_polygon(vec![
            Point::new2(0.0, 0.0),
            Point::new2(0.0, 1.0),
            Point::new2(1.0, 1.0),
            Point::new2(1.0, 0.0),
        ])
        .is_err());
        // collinear vertex is rejected
        assert!(DomainSpec::convex_polygon(vec![
            Point::new2(0.0, 0.0),
            Point::new2(0.5, 0.0),
            Point::new2(1.0, 0.0),
            Point::new2(0.5, 1.0),
        ])
        .is_err());
    }

    #[test]
    fn unsupported_norm_domain_pair() {
        let d = DomainSpec::upper_half_plane();
        let sup = NormSpec::sup();
        assert!(matches!(
            d.boundary_distance(&sup, &Point::new2(0.0, 1.0)),
            Err(Error::UnsupportedCombination(_))
        ));
    }

    #[test]
    fn outside_domain_is_an_error() {
        let d = DomainSpec::punctured_plane();
        assert!(matches!(
            d.boundary_distance(&NormSpec::Euclidean, &Point::new2(0.0, 0.0)),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn json_round_trip() {
        let domains = vec![
            DomainSpec::upper_half_plane(),
            DomainSpec::punctured_plane(),
            DomainSpec::unit_ball(Point::new2(0.0, 0.0), 1.0).unwrap(),
            DomainSpec::slit_plane(Point::new2(0.0, 0.0), vec![1.0, 0.0]).unwrap(),
        ];
        for d in domains {
            let s = serde_json::to_string(&d).unwrap();
            let back: DomainSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(d, back);
        }
        let s = serde_json::to_string(&DomainSpec::punctured_plane()).unwrap();
        assert_eq!(s, r#"{"kind":"punctured","punctures":[[0.0,0.0]]}"#);
    }
}
