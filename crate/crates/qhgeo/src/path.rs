use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::point::Point;

/// An ordered polyline representing a rectifiable curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPolyline {
    pub vertices: Vec<Point>,
}

impl PathPolyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput("path needs >= 2 vertices".into()));
        }
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidInput(
                    "consecutive path vertices must be distinct".into(),
                ));
            }
        }
        Ok(PathPolyline { vertices })
    }

    pub fn start(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Point {
        self.vertices.last().unwrap()
    }

    /// Total length under the given norm.
    pub fn norm_length(&self, norm: &NormSpec) -> Result<f64> {
        let mut total = 0.0;
        for w in self.vertices.windows(2) {
            total += norm.value(&w[1].sub(&w[0]))?;
        }
        Ok(total)
    }

    /// Resample to vertices equally spaced in norm arc length.
    /// The result has `n + 1` vertices (n segments).
    pub fn resample_by_arc_length(&self, norm: &NormSpec, n: usize) -> Result<PathPolyline> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one segment".into()));
        }
        let total = self.norm_length(norm)?;
        if total == 0.0 {
            return Err(Error::InvalidInput("zero-length path".into()));
        }
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.vertices[0].clone());
        let mut seg = 0;
        let mut seg_start_len = 0.0;
        let mut seg_len = norm.value(&self.vertices[1].sub(&self.vertices[0]))?;
        for i in 1..n {
            let target = total * i as f64 / n as f64;
            while seg_start_len + seg_len < target && seg + 2 < self.vertices.len() {
                seg_start_len += seg_len;
                seg += 1;
                seg_len = norm.value(&self.vertices[seg + 1].sub(&self.vertices[seg]))?;
            }
            let t = if seg_len > 0.0 {
                ((target - seg_start_len) / seg_len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            out.push(self.vertices[seg].lerp(&self.vertices[seg + 1], t));
        }
        out.push(self.vertices.last().unwrap().clone());
        out.dedup();
        PathPolyline::new(out)
    }
}

/// Gauss-Legendre nodes and weights on [0, 1], cached per order.
pub fn gauss_legendre_unit(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-based initial guess for the i-th root of P_n on [-1, 1]
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        // map from [-1, 1] to [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Discrete quasihyperbolic length of a polyline: the sum over segments of
/// the quadrature of ||segment direction|| / d(z, boundary).
///
/// A segment whose endpoint boundary distances differ by more than a factor
/// of two is recursively bisected, which keeps the density variation per
/// quadrature cell bounded.
pub fn qh_length(
    domain: &DomainSpec,
    norm: &NormSpec,
    path: &PathPolyline,
    quad_points: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for w in path.vertices.windows(2) {
        total += qh_segment_length(domain, norm, &w[0], &w[1], quad_points)?;
    }
    Ok(total)
}

/// Quasihyperbolic length of the single segment [a, b].
pub fn qh_segment_length(
    domain: &DomainSpec,
    norm: &NormSpec,
    a: &Point,
    b: &Point,
    quad_points: usize,
) -> Result<f64> {
    if !domain.segment_in_domain(a, b)? {
        return Err(Error::PathExitsDomain);
    }
    let da = domain
        .boundary_distance(norm, a)
        .map_err(segment_exit_error)?;
    let db = domain
        .boundary_distance(norm, b)
        .map_err(segment_exit_error)?;
    let seg_len = norm.value(&b.sub(a))?;
    qh_segment_rec(domain, norm, a, b, da, db, seg_len, quad_points, 0)
}

#[allow(clippy::too_many_arguments)]
fn qh_segment_rec(
    domain: &DomainSpec,
    norm: &NormSpec,
    a: &Point,
    b: &Point,
    da: f64,
    db: f64,
    seg_len: f64,
    quad_points: usize,
    depth: u32,
) -> Result<f64> {
    if da <= 0.0 || db <= 0.0 {
        return Err(Error::PathExitsDomain);
    }
    let ratio = if da > db { da / db } else { db / da };
    if ratio > 2.0 && depth < 48 {
        let mid = a.lerp(b, 0.5);
        let dm = domain
            .boundary_distance(norm, &mid)
            .map_err(segment_exit_error)?;
        let half = 0.5 * seg_len;
        return Ok(qh_segment_rec(domain, norm, a, &mid, da, dm, half, quad_points, depth + 1)?
            + qh_segment_rec(domain, norm, &mid, b, dm, db, half, quad_points, depth + 1)?);
    }
    // odd order puts a node at the segment midpoint, so a straight crossing
    // of a puncture is caught even when the endpoint distances agree
    let n = quad_points.max(3);
    let gl = gauss_legendre_unit(if n % 2 == 0 { n + 1 } else { n });
    let (nodes, weights) = (&gl.0, &gl.1);
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(weights) {
        let z = a.lerp(b, *t);
        let d = domain
            .boundary_distance(norm, &z)
            .map_err(segment_exit_error)?;
        if d <= 0.0 {
            return Err(Error::PathExitsDomain);
        }
        acc += w / d;
    }
    Ok(acc * seg_len)
}

fn segment_exit_error(e: Error) -> Error {
    match e {
        Error::OutsideDomain => Error::PathExitsDomain,
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // order n integrates degree 2n-1 exactly on [0, 1]
        let gl = gauss_legendre_unit(5);
        let got: f64 = gl.0.iter().zip(&gl.1).map(|(x, w)| w * x.powi(9)).sum();
        assert!((got - 0.1).abs() < 1e-14);
        let sum_w: f64 = gl.1.iter().sum();
        assert!((sum_w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn radial_path_length_is_log_r() {
        let domain = DomainSpec::punctured_plane();
        let norm = NormSpec::Euclidean;
        for r in [2.0, std::f64::consts::E, 10.0] {
            let path = PathPolyline::new(vec![Point::new2(1.0, 0.0), Point::new2(r, 0.0)]).unwrap();
            let len = qh_length(&domain, &norm, &path, 64).unwrap();
            assert!((len - r.ln()).abs() < 1e-10, "R={r} got {len}");
        }
    }

    #[test]
    fn vertical_path_in_half_plane() {
        let domain = DomainSpec::upper_half_plane();
        let norm = NormSpec::Euclidean;
        let path =
            PathPolyline::new(vec![Point::new2(0.0, 1.0), Point::new2(0.0, std::f64::consts::E)])
                .unwrap();
        let len = qh_length(&domain, &norm, &path, 64).unwrap();
        assert!((len - 1.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_path_rejected() {
        let p = Point::new2(1.0, 0.0);
        assert!(PathPolyline::new(vec![p.clone(), p]).is_err());
    }

    #[test]
    fn segment_through_boundary_is_an_error() {
        let domain = DomainSpec::punctured_plane();
        let norm = NormSpec::Euclidean;
        let path =
            PathPolyline::new(vec![Point::new2(-1.0, 0.0), Point::new2(1.0, 0.0)]).unwrap();
        // density blows up across the puncture; recursion bottoms out in an error
        assert!(qh_length(&domain, &norm, &path, 16).is_err());
    }

    #[test]
    fn additive_over_concatenation() {
        let domain = DomainSpec::punctured_plane();
        let norm = NormSpec::Euclidean;
        let a = Point::new2(1.0, 0.0);
        let m = Point::new2(1.5, 0.7);
        let b = Point::new2(2.0, 1.5);
        let whole = qh_length(
            &domain,
            &norm,
            &PathPolyline::new(vec![a.clone(), m.clone(), b.clone()]).unwrap(),
            32,
        )
        .unwrap();
        let first = qh_length(&domain, &norm, &PathPolyline::new(vec![a, m.clone()]).unwrap(), 32).unwrap();
        let second = qh_length(&domain, &norm, &PathPolyline::new(vec![m, b]).unwrap(), 32).unwrap();
        assert!((whole - first - second).abs() < 1e-12);
    }

    #[test]
    fn resample_preserves_endpoints_and_length() {
        let path = PathPolyline::new(vec![
            Point::new2(0.0, 0.0),
            Point::new2(1.0, 0.0),
            Point::new2(1.0, 1.0),
        ])
        .unwrap();
        let norm = NormSpec::Euclidean;
        let r = path.resample_by_arc_length(&norm, 8).unwrap();
        assert_eq!(r.vertices.len(), 9);
        assert_eq!(r.start(), path.start());
        assert_eq!(r.end(), path.end());
        let l0 = path.norm_length(&norm).unwrap();
        let l1 = r.norm_length(&norm).unwrap();
        assert!((l0 - l1).abs() < 1e-12);
    }
}
