//! Moduli of convexity and smoothness for 2D p-norm spaces, power-type
//! exponent fitting, and an evaluator for both sides of the annulus
//! averaging estimate on the punctured plane.
//!
//! Moduli are computed in 2D only: for p-norms the planar sections through
//! the optimizing pairs realize the moduli, and two dimensions keep the
//! searches exhaustive.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::path::{qh_length, qh_segment_length, PathPolyline};
use crate::point::Point;

/// Result of a modulus computation at one parameter value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusEstimate {
    /// epsilon (convexity) or tau (smoothness)
    pub parameter: f64,
    pub value: f64,
    /// the optimizing pair (x, y); plugging it into the defining expression
    /// reproduces `value`
    pub optimizer_witness: (Vec<f64>, Vec<f64>),
    /// width of the final refinement bracket in angle
    pub search_resolution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    Convexity,
    Smoothness,
}

fn effective_p(norm: &NormSpec) -> f64 {
    match norm {
        NormSpec::Euclidean => 2.0,
        NormSpec::PNorm { p } => *p,
    }
}

/// Point on the unit sphere of the norm in direction `theta`.
fn sphere_point(norm: &NormSpec, theta: f64) -> Result<[f64; 2]> {
    let u = [theta.cos(), theta.sin()];
    let n = norm.value(&u)?;
    Ok([u[0] / n, u[1] / n])
}

fn vadd(a: &[f64; 2], b: &[f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn vsub(a: &[f64; 2], b: &[f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// Golden-section minimization on [a, b]; returns (argmin, min) over all
/// evaluated points.
fn golden_min<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    iters: usize,
) -> Result<(f64, f64)> {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2)?;
        }
        let (xc, fc) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
        if fc < best.1 {
            best = (xc, fc);
        }
    }
    Ok(best)
}

/// Second unit vector `y` with ||x - y|| = eps, found by a first-crossing
/// scan of the sphere angle away from `theta` followed by bisection.
fn convexity_partner(
    norm: &NormSpec,
    x: &[f64; 2],
    theta: f64,
    eps: f64,
    scan: usize,
) -> Result<[f64; 2]> {
    let dist = |phi: f64| -> Result<f64> {
        let y = sphere_point(norm, phi)?;
        norm.value(&vsub(x, &y))
    };
    let mut lo = theta;
    let mut hi = theta + PI;
    let mut found = false;
    for s in 1..=scan {
        let phi = theta + PI * s as f64 / scan as f64;
        if dist(phi)? >= eps {
            hi = phi;
            found = true;
            break;
        }
        lo = phi;
    }
    if !found {
        // eps is the diameter; the antipode is the only candidate
        return sphere_point(norm, theta + PI);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dist(mid)? < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    sphere_point(norm, hi)
}

fn modulus_of_convexity_scan(
    norm: &NormSpec,
    epsilon: f64,
    angles: usize,
    partner_scan: usize,
) -> Result<ModulusEstimate> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::InvalidInput(format!(
            "convexity parameter {epsilon} outside (0, 2]"
        )));
    }
    let mut objective = |theta: f64| -> Result<f64> {
        let x = sphere_point(norm, theta)?;
        let y = convexity_partner(norm, &x, theta, epsilon, partner_scan)?;
        Ok(1.0 - norm.value(&vadd(&x, &y))? / 2.0)
    };
    let mut best = (0.0f64, f64::INFINITY);
    for i in 0..angles {
        let theta = TAU * i as f64 / angles as f64;
        let v = objective(theta)?;
        if v < best.1 {
            best = (theta, v);
        }
    }
    let h = TAU / angles as f64;
    let refined = golden_min(&mut objective, best.0 - h, best.0 + h, 48)?;
    if refined.1 < best.1 {
        best = refined;
    }
    let x = sphere_point(norm, best.0)?;
    let y = convexity_partner(norm, &x, best.0, epsilon, partner_scan)?;
    let value = 1.0 - norm.value(&vadd(&x, &y))? / 2.0;
    Ok(ModulusEstimate {
        parameter: epsilon,
        value,
        optimizer_witness: (x.to_vec(), y.to_vec()),
        search_resolution: 2.0 * h * 0.618f64.powi(48),
    })
}

/// Modulus of convexity delta_X(eps): the infimum of 1 - ||x + y||/2 over
/// unit vectors with ||x - y|| = eps.
pub fn modulus_of_convexity(norm: &NormSpec, epsilon: f64) -> Result<ModulusEstimate> {
    modulus_of_convexity_scan(norm, epsilon, 721, 360)
}

/// Modulus of smoothness rho_X(tau): the supremum of
/// (||x + y|| + ||x - y||)/2 - 1 over ||x|| = 1, ||y|| = tau.
pub fn modulus_of_smoothness(norm: &NormSpec, tau: f64) -> Result<ModulusEstimate> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidInput(format!(
            "smoothness parameter {tau} must be positive"
        )));
    }
    let angles = 721;
    let xs: Vec<[f64; 2]> = (0..angles)
        .map(|i| sphere_point(norm, TAU * i as f64 / angles as f64))
        .collect::<Result<_>>()?;
    let ys: Vec<[f64; 2]> = xs.iter().map(|s| [tau * s[0], tau * s[1]]).collect();
    let pair_value = |x: &[f64; 2], y: &[f64; 2]| -> Result<f64> {
        Ok((norm.value(&vadd(x, y))? + norm.value(&vsub(x, y))?) / 2.0 - 1.0)
    };
    let mut best = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let v = pair_value(x, y)?;
            if v > best.2 {
                best = (
                    TAU * i as f64 / angles as f64,
                    TAU * j as f64 / angles as f64,
                    v,
                );
            }
        }
    }
    // coordinate-wise golden refinement of the sup around the grid optimum
    let mut h = TAU / angles as f64;
    let (mut th, mut ph) = (best.0, best.1);
    for _ in 0..6 {
        let r = golden_min(
            |t| {
                let x = sphere_point(norm, t)?;
                let s = sphere_point(norm, ph)?;
                Ok(-pair_value(&x, &[tau * s[0], tau * s[1]])?)
            },
            th - h,
            th + h,
            32,
        )?;
        th = r.0;
        let r = golden_min(
            |t| {
                let x = sphere_point(norm, th)?;
                let s = sphere_point(norm, t)?;
                Ok(-pair_value(&x, &[tau * s[0], tau * s[1]])?)
            },
            ph - h,
            ph + h,
            32,
        )?;
        ph = r.0;
        h *= 0.25;
    }
    let x = sphere_point(norm, th)?;
    let s = sphere_point(norm, ph)?;
    let y = [tau * s[0], tau * s[1]];
    let mut value = pair_value(&x, &y)?;
    let (mut wx, mut wy) = (x, y);
    if best.2 > value {
        let x = sphere_point(norm, best.0)?;
        let s = sphere_point(norm, best.1)?;
        wx = x;
        wy = [tau * s[0], tau * s[1]];
        value = best.2;
    }
    Ok(ModulusEstimate {
        parameter: tau,
        value,
        optimizer_witness: (wx.to_vec(), wy.to_vec()),
        search_resolution: h,
    })
}

/// Least-squares power-type fit value ~ K * parameter^p in log-log
/// coordinates; returns (K, p).
pub fn power_type_fit(samples: &[(f64, f64)], kind: ModulusKind) -> Result<(f64, f64)> {
    if samples.len() < 4 {
        return Err(Error::InvalidInput(
            "power-type fit needs at least 4 samples".into(),
        ));
    }
    let mut pmin = f64::INFINITY;
    let mut pmax = 0.0f64;
    for &(param, value) in samples {
        if !(param > 0.0) || !param.is_finite() {
            return Err(Error::InvalidInput(format!("bad fit parameter {param}")));
        }
        if !(value > 1e-12) {
            return Err(Error::NotPowerType(format!(
                "{kind:?} sample at parameter {param} has value {value} <= 0"
            )));
        }
        pmin = pmin.min(param);
        pmax = pmax.max(param);
    }
    if pmax / pmin < 4.0 {
        return Err(Error::InvalidInput(
            "fit parameters must span at least a factor of 4".into(),
        ));
    }
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(param, value) in samples {
        let (x, y) = (param.ln(), value.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let k = ((sy - p * sx) / n).exp();
    match kind {
        ModulusKind::Convexity if p < 2.0 - 0.25 => Err(Error::NotPowerType(format!(
            "convexity exponent {p:.3} below 2"
        ))),
        ModulusKind::Smoothness if p > 2.0 + 0.25 => Err(Error::NotPowerType(format!(
            "smoothness exponent {p:.3} above 2"
        ))),
        _ => Ok((k, p)),
    }
}

const DELTA_KNOTS: usize = 200;

/// delta_X tabulated on equally spaced epsilon-knots over [0, 2], cached per
/// norm. Knot values come from a reduced-budget convexity scan; the
/// interpolation error is folded into the reported margin uncertainty.
fn delta_table(norm: &NormSpec) -> Result<Arc<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<f64>>>>> = OnceLock::new();
    let key = effective_p(norm).to_bits();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let mut table = vec![0.0; DELTA_KNOTS + 1];
    for (i, slot) in table.iter_mut().enumerate().skip(1) {
        let eps = 2.0 * i as f64 / DELTA_KNOTS as f64;
        *slot = modulus_of_convexity_scan(norm, eps, 181, 120)?.value.max(0.0);
    }
    let arc = Arc::new(table);
    cache.lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

fn delta_interp(table: &[f64], eps: f64) -> f64 {
    let t = eps.clamp(0.0, 2.0) / 2.0 * DELTA_KNOTS as f64;
    let i = (t.floor() as usize).min(DELTA_KNOTS - 1);
    let frac = t - i as f64;
    table[i] * (1.0 - frac) + table[i + 1] * frac
}

fn punctured_origin() -> DomainSpec {
    DomainSpec::punctured_plane()
}

/// A pair of rectifiable paths in the norm annulus 1 <= ||.|| <= 2 of the
/// punctured plane, validated against conditions (i)-(v) of the averaging
/// estimate and resampled onto a common arc-length parameter grid.
#[derive(Debug, Clone)]
pub struct AnnulusPathPair {
    pub gamma1: PathPolyline,
    pub gamma2: PathPolyline,
    /// norm arc length of gamma1
    pub t1: f64,
    /// norm arc length of gamma2
    pub t2: f64,
    norm: NormSpec,
    /// common parameter grid on [0, t2]; includes t1 and every original
    /// vertex parameter, so the resampled paths are exact
    /// reparameterizations
    params: Vec<f64>,
    /// gamma1 at each parameter, held constant on [t1, t2]
    g1: Vec<Point>,
    g2: Vec<Point>,
}

/// Point at norm arc length `s` along the polyline.
fn point_at_arc_length(path: &PathPolyline, norm: &NormSpec, s: f64) -> Result<Point> {
    let mut acc = 0.0;
    for w in path.vertices.windows(2) {
        let len = norm.value(&w[1].sub(&w[0]))?;
        if acc + len >= s {
            let t = if len > 0.0 {
                ((s - acc) / len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            return Ok(w[0].lerp(&w[1], t));
        }
        acc += len;
    }
    Ok(path.end().clone())
}

/// Cumulative norm arc-length parameters of the polyline vertices.
fn vertex_params(path: &PathPolyline, norm: &NormSpec) -> Result<Vec<f64>> {
    let mut out = vec![0.0];
    for w in path.vertices.windows(2) {
        out.push(out.last().unwrap() + norm.value(&w[1].sub(&w[0]))?);
    }
    Ok(out)
}

/// Minimum of the norm along the segment [a, b] (the norm is convex along a
/// line, so golden-section is exact up to its bracket).
fn segment_norm_min(norm: &NormSpec, a: &Point, b: &Point) -> Result<f64> {
    let na = norm.value(&a.coords)?;
    let nb = norm.value(&b.coords)?;
    let (_, m) = golden_min(
        |t| norm.value(&a.lerp(b, t.clamp(0.0, 1.0)).coords),
        0.0,
        1.0,
        32,
    )?;
    Ok(m.min(na).min(nb))
}

fn check_annulus(norm: &NormSpec, pts: &[Point]) -> Result<()> {
    const TOL: f64 = 1e-9;
    for p in pts {
        if norm.value(&p.coords)? > 2.0 + TOL {
            return Err(Error::ConditionViolated("i"));
        }
    }
    for w in pts.windows(2) {
        if segment_norm_min(norm, &w[0], &w[1])? < 1.0 - TOL {
            return Err(Error::ConditionViolated("i"));
        }
    }
    Ok(())
}

impl AnnulusPathPair {
    /// Validates conditions (i)-(v) for the given quasihyperbolic length
    /// budget `r_max` and builds the common parameterization. `gamma1` must
    /// be the shorter path (condition (iv)).
    pub fn new(
        norm: &NormSpec,
        gamma1: PathPolyline,
        gamma2: PathPolyline,
        r_max: f64,
    ) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(Error::InvalidInput("r_max must be positive".into()));
        }
        if gamma1.vertices.iter().chain(&gamma2.vertices).any(|p| p.dim() != 2) {
            return Err(Error::InvalidInput("annulus paths are 2D".into()));
        }
        let t1 = gamma1.norm_length(norm)?;
        let t2 = gamma2.norm_length(norm)?;
        if t1 > t2 + 1e-12 {
            return Err(Error::ConditionViolated("iv"));
        }
        if gamma1.start().euclid_dist(gamma2.start()) > 1e-9 {
            return Err(Error::ConditionViolated("ii"));
        }

        // common grid: uniform knots plus every original vertex parameter
        // and t1 itself
        let m = 200usize;
        let mut params: Vec<f64> = (0..=m).map(|j| t2 * j as f64 / m as f64).collect();
        params.extend(vertex_params(&gamma1, norm)?);
        params.extend(vertex_params(&gamma2, norm)?);
        params.push(t1);
        params.retain(|s| (0.0..=t2 + 1e-12).contains(s));
        params.sort_by(f64::total_cmp);
        params.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * t2.max(1.0));

        let g1: Vec<Point> = params
            .iter()
            .map(|&s| point_at_arc_length(&gamma1, norm, s.min(t1)))
            .collect::<Result<_>>()?;
        let g2: Vec<Point> = params
            .iter()
            .map(|&s| point_at_arc_length(&gamma2, norm, s))
            .collect::<Result<_>>()?;
        let mid: Vec<Point> = g1.iter().zip(&g2).map(|(a, b)| a.lerp(b, 0.5)).collect();
        check_annulus(norm, &g1)?;
        check_annulus(norm, &g2)?;
        check_annulus(norm, &mid)?;

        let omega = punctured_origin();
        let lk1 = qh_length(&omega, norm, &gamma1, 16)?;
        let lk2 = qh_length(&omega, norm, &gamma2, 16)?;
        if lk1.max(lk2) > r_max + 1e-9 {
            return Err(Error::ConditionViolated("iii"));
        }

        Ok(AnnulusPathPair {
            gamma1,
            gamma2,
            t1,
            t2,
            norm: norm.clone(),
            params,
            g1,
            g2,
        })
    }
}

/// Both sides of the annulus averaging estimate and their difference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QhLemmaReport {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs; the estimate asserts this is nonnegative for small enough
    /// length budgets
    pub margin: f64,
    /// numerical slack from the delta-table interpolation and quadrature
    pub uncertainty: f64,
    /// set when the norm is outside the power-type-2 hypothesis range
    pub hypothesis_warning: Option<String>,
}

/// Evaluates LHS = (l_k(g1) + l_k(g2))/2 + int_{t1}^{t2} ||dg2||/(2 d(g2))
/// and RHS = l_k((g1+g2)/2) + int_0^{t1} delta_X(||D(g1-g2)||)/(||g1||+||g2||)
/// on Omega = plane minus origin, where d(z) = ||z||.
pub fn qhlemma_margin(norm: &NormSpec, pair: &AnnulusPathPair) -> Result<QhLemmaReport> {
    if *norm != pair.norm {
        return Err(Error::InvalidInput(
            "norm differs from the one the pair was validated against".into(),
        ));
    }
    let omega = punctured_origin();
    let lk1 = qh_length(&omega, norm, &pair.gamma1, 16)?;
    let lk2 = qh_length(&omega, norm, &pair.gamma2, 16)?;

    // trailing integral: half the quasihyperbolic length of gamma2 on
    // [t1, t2] (the parameterization is by norm arc length)
    let mut tail = 0.0;
    // midpoint path quasihyperbolic length
    let mut mid_len = 0.0;
    // convexity-gain integral over [0, t1]
    let table = delta_table(norm)?;
    let mut conv = 0.0;

    for j in 0..pair.params.len() - 1 {
        let (s0, s1) = (pair.params[j], pair.params[j + 1]);
        let ds = s1 - s0;
        if ds <= 0.0 {
            continue;
        }
        let (a1, b1) = (&pair.g1[j], &pair.g1[j + 1]);
        let (a2, b2) = (&pair.g2[j], &pair.g2[j + 1]);
        if s0 >= pair.t1 - 1e-12 && a2 != b2 {
            tail += 0.5 * qh_segment_length(&omega, norm, a2, b2, 16)?;
        }
        let ma = a1.lerp(a2, 0.5);
        let mb = b1.lerp(b2, 0.5);
        if ma != mb {
            mid_len += qh_segment_length(&omega, norm, &ma, &mb, 16)?;
        }
        if s1 <= pair.t1 + 1e-12 {
            // left-segment difference quotients of the arc-length
            // parameterizations
            let d1 = b1.sub(a1);
            let d2 = b2.sub(a2);
            let dd: Vec<f64> = d1.iter().zip(&d2).map(|(u, v)| (u - v) / ds).collect();
            let delta = delta_interp(&table, norm.value(&dd)?);
            let n1 = norm.value(&a1.lerp(b1, 0.5).coords)?;
            let n2 = norm.value(&a2.lerp(b2, 0.5).coords)?;
            conv += delta * ds / (n1 + n2);
        }
    }

    let lhs = 0.5 * (lk1 + lk2) + tail;
    let rhs = mid_len + conv;
    let p = effective_p(norm);
    let hypothesis_warning = if (1.5..=3.0).contains(&p) {
        None
    } else {
        Some(format!(
            "p = {p} is outside [1.5, 3]: the power-type-2 hypothesis of the \
             estimate is not satisfied; evaluation is exploratory"
        ))
    };
    Ok(QhLemmaReport {
        lhs,
        rhs,
        margin: lhs - rhs,
        uncertainty: 1e-4 + 1e-9 * (lhs.abs() + rhs.abs()),
        hypothesis_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reeval_convexity(norm: &NormSpec, est: &ModulusEstimate) -> f64 {
        let (x, y) = &est.optimizer_witness;
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        1.0 - norm.value(&sum).unwrap() / 2.0
    }

    #[test]
    fn euclidean_convexity_closed_form() {
        let e = NormSpec::Euclidean;
        // delta_2(eps) = 1 - sqrt(1 - eps^2/4)
        for eps in [0.5, 1.0, 1.5, 2.0] {
            let est = modulus_of_convexity(&e, eps).unwrap();
            let exact = 1.0 - (1.0 - eps * eps / 4.0).sqrt();
            assert!(
                (est.value - exact).abs() < 1e-6,
                "eps={eps} got {} want {exact}",
                est.value
            );
        }
        // delta(1) = 1 - sqrt(3)/2 for the Euclidean plane
        let est = modulus_of_convexity(&e, 1.0).unwrap();
        assert!((est.value - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-4);
    }

    #[test]
    fn sup_norm_flat_sides_give_zero_convexity() {
        let sup = NormSpec::sup();
        let est = modulus_of_convexity(&sup, 1.0).unwrap();
        assert!(est.value.abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn convexity_matches_dense_pair_scan() {
        // independent oracle: min of 1 - ||x+y||/2 over sphere pairs with
        // ||x - y|| >= eps (equal by monotonicity of delta)
        let norm = NormSpec::p_norm(1.5).unwrap();
        let eps = 1.0;
        let n = 1200;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|i| sphere_point(&norm, TAU * i as f64 / n as f64).unwrap())
            .collect();
        let mut oracle = f64::INFINITY;
        for x in &pts {
            for y in &pts {
                if norm.value(&vsub(x, y)).unwrap() >= eps {
                    oracle = oracle.min(1.0 - norm.value(&vadd(x, y)).unwrap() / 2.0);
                }
            }
        }
        let est = modulus_of_convexity(&norm, eps).unwrap();
        assert!(
            (est.value - oracle).abs() < 5e-3,
            "got {} oracle {oracle}",
            est.value
        );
    }

    #[test]
    fn convexity_witness_reevaluates() {
        for norm in [NormSpec::Euclidean, NormSpec::p_norm(3.0).unwrap()] {
            let est = modulus_of_convexity(&norm, 1.2).unwrap();
            assert!((reeval_convexity(&norm, &est) - est.value).abs() < 1e-9);
            let (x, y) = &est.optimizer_witness;
            let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            assert!((norm.value(&diff).unwrap() - 1.2).abs() < 1e-6);
            assert!((0.0..=1.0).contains(&est.value));
        }
    }

    #[test]
    fn convexity_nondecreasing_and_euclid_dominates() {
        let ladder = [0.5, 1.0, 1.5, 2.0];
        let e = NormSpec::Euclidean;
        for norm in [
            NormSpec::p_norm(1.0).unwrap(),
            NormSpec::p_norm(1.5).unwrap(),
            NormSpec::p_norm(4.0).unwrap(),
            NormSpec::sup(),
        ] {
            let mut prev = -1.0;
            for eps in ladder {
                let v = modulus_of_convexity(&norm, eps).unwrap().value;
                assert!(v >= prev - 1e-9, "{norm:?} not monotone at {eps}");
                prev = v;
                let ve = modulus_of_convexity(&e, eps).unwrap().value;
                assert!(ve >= v - 1e-4, "{norm:?} beats euclidean at {eps}");
            }
        }
    }

    #[test]
    fn l1_smoothness_is_identity() {
        let l1 = NormSpec::p_norm(1.0).unwrap();
        for tau in [0.1, 0.5, 1.0] {
            let est = modulus_of_smoothness(&l1, tau).unwrap();
            assert!((est.value - tau).abs() < 1e-3, "tau={tau} got {}", est.value);
        }
    }

    #[test]
    fn euclidean_smoothness_at_one() {
        let est = modulus_of_smoothness(&NormSpec::Euclidean, 1.0).unwrap();
        assert!((est.value - (2f64.sqrt() - 1.0)).abs() < 1e-4, "{}", est.value);
    }

    #[test]
    fn smoothness_monotone_to_zero() {
        let norm = NormSpec::p_norm(3.0).unwrap();
        let mut prev = f64::INFINITY;
        for tau in [0.8, 0.4, 0.2, 0.1, 0.05] {
            let v = modulus_of_smoothness(&norm, tau).unwrap().value;
            assert!(v >= 0.0 && v <= prev + 1e-9);
            prev = v;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn smoothness_ratio_behavior() {
        // rho(tau)/tau decreases toward 0 for uniformly smooth p, stays
        // bounded below for p in {1, inf}
        let ladder = [0.8, 0.4, 0.2, 0.1];
        for p in [1.5, 3.0] {
            let norm = NormSpec::p_norm(p).unwrap();
            let ratios: Vec<f64> = ladder
                .iter()
                .map(|&t| modulus_of_smoothness(&norm, t).unwrap().value / t)
                .collect();
            for w in ratios.windows(2) {
                assert!(w[1] <= w[0] + 1e-6, "p={p} ratios {ratios:?}");
            }
            assert!(
                *ratios.last().unwrap() < 0.5 * ratios[0],
                "p={p} ratios {ratios:?}"
            );
        }
        for norm in [NormSpec::p_norm(1.0).unwrap(), NormSpec::sup()] {
            for &t in &ladder {
                let ratio = modulus_of_smoothness(&norm, t).unwrap().value / t;
                assert!(ratio > 0.5, "{norm:?} tau={t} ratio {ratio}");
            }
        }
    }

    #[test]
    fn smoothness_witness_reevaluates() {
        let norm = NormSpec::p_norm(2.5).unwrap();
        let est = modulus_of_smoothness(&norm, 0.7).unwrap();
        let (x, y) = &est.optimizer_witness;
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let v = (norm.value(&sum).unwrap() + norm.value(&diff).unwrap()) / 2.0 - 1.0;
        assert!((v - est.value).abs() < 1e-9);
    }

    #[test]
    fn power_fit_euclidean_convexity() {
        let e = NormSpec::Euclidean;
        let samples: Vec<(f64, f64)> = [0.1, 0.2, 0.4, 0.8]
            .iter()
            .map(|&eps| (eps, modulus_of_convexity(&e, eps).unwrap().value))
            .collect();
        let (_, p) = power_type_fit(&samples, ModulusKind::Convexity).unwrap();
        assert!((p - 2.0).abs() < 0.05, "p={p}");
    }

    #[test]
    fn power_fit_l1_smoothness() {
        let l1 = NormSpec::p_norm(1.0).unwrap();
        let samples: Vec<(f64, f64)> = [0.1, 0.2, 0.4, 0.8, 1.0]
            .iter()
            .map(|&t| (t, modulus_of_smoothness(&l1, t).unwrap().value))
            .collect();
        let (_, p) = power_type_fit(&samples, ModulusKind::Smoothness).unwrap();
        assert!((p - 1.0).abs() < 0.05, "p={p}");
    }

    #[test]
    fn power_fit_rejects_degenerate_and_bad_input() {
        let zeros = [(0.1, 0.0), (0.2, 0.0), (0.4, 0.0), (0.8, 0.0)];
        assert!(matches!(
            power_type_fit(&zeros, ModulusKind::Convexity),
            Err(Error::NotPowerType(_))
        ));
        let short = [(0.1, 0.1), (0.2, 0.2), (0.4, 0.4)];
        assert!(power_type_fit(&short, ModulusKind::Smoothness).is_err());
        assert!(modulus_of_convexity(&NormSpec::Euclidean, 2.5).is_err());
        assert!(modulus_of_smoothness(&NormSpec::Euclidean, 0.0).is_err());
    }

    #[test]
    fn qhlemma_degenerate_equal_paths() {
        let norm = NormSpec::Euclidean;
        let path = PathPolyline::new(vec![Point::new2(1.1, 0.0), Point::new2(1.9, 0.0)]).unwrap();
        let pair = AnnulusPathPair::new(&norm, path.clone(), path, 1.0).unwrap();
        let rep = qhlemma_margin(&norm, &pair).unwrap();
        assert!(rep.margin.abs() < 1e-9, "{rep:?}");
        assert!(rep.hypothesis_warning.is_none());
    }

    #[test]
    fn qhlemma_condition_errors() {
        let norm = NormSpec::Euclidean;
        // outside the annulus
        let inner =
            PathPolyline::new(vec![Point::new2(0.5, 0.0), Point::new2(0.6, 0.0)]).unwrap();
        assert!(matches!(
            AnnulusPathPair::new(&norm, inner.clone(), inner, 1.0),
            Err(Error::ConditionViolated("i"))
        ));
        // mismatched start points
        let a = PathPolyline::new(vec![Point::new2(1.2, 0.0), Point::new2(1.3, 0.0)]).unwrap();
        let b = PathPolyline::new(vec![Point::new2(1.2, 0.5), Point::new2(1.3, 0.5)]).unwrap();
        assert!(matches!(
            AnnulusPathPair::new(&norm, a.clone(), b, 1.0),
            Err(Error::ConditionViolated("ii"))
        ));
        // gamma1 longer than gamma2
        let long =
            PathPolyline::new(vec![Point::new2(1.2, 0.0), Point::new2(1.8, 0.0)]).unwrap();
        assert!(matches!(
            AnnulusPathPair::new(&norm, long, a.clone(), 1.0),
            Err(Error::ConditionViolated("iv"))
        ));
        // length budget exceeded
        let c = PathPolyline::new(vec![Point::new2(1.2, 0.0), Point::new2(1.9, 0.0)]).unwrap();
        assert!(matches!(
            AnnulusPathPair::new(&norm, a, c, 1e-3),
            Err(Error::ConditionViolated("iii"))
        ));
    }

    /// Random short path pair in the annulus with a common start point.
    pub(crate) fn random_annulus_pair(rng: &mut impl Rng, norm: &NormSpec) -> AnnulusPathPair {
        let start_angle = rng.gen_range(0.0..TAU);
        let start = Point::new2(1.5 * start_angle.cos(), 1.5 * start_angle.sin());
        let mut walk = |steps: usize, step_len: f64| {
            let mut v = vec![start.clone()];
            for _ in 0..steps {
                let a = rng.gen_range(0.0..TAU);
                let dir = [a.cos(), a.sin()];
                let n = norm.value(&dir).unwrap();
                let last = v.last().unwrap();
                v.push(last.add_scaled(&[dir[0] / n, dir[1] / n], step_len));
            }
            PathPolyline::new(v).unwrap()
        };
        let g1 = walk(3, 0.01);
        let g2 = walk(4, 0.012);
        AnnulusPathPair::new(norm, g1, g2, 0.1).unwrap()
    }

    #[test]
    fn qhlemma_margin_on_random_short_pairs() {
        let norm = NormSpec::Euclidean;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut min_margin = f64::INFINITY;
        for _ in 0..30 {
            let pair = random_annulus_pair(&mut rng, &norm);
            let rep = qhlemma_margin(&norm, &pair).unwrap();
            min_margin = min_margin.min(rep.margin);
        }
        assert!(min_margin >= -1e-6, "min margin {min_margin}");
    }

    #[test]
    fn qhlemma_warns_outside_hypothesis_range() {
        let norm = NormSpec::p_norm(1.0).unwrap();
        let path = PathPolyline::new(vec![Point::new2(1.2, 0.0), Point::new2(1.6, 0.0)]).unwrap();
        let pair = AnnulusPathPair::new(&norm, path.clone(), path, 1.0).unwrap();
        let rep = qhlemma_margin(&norm, &pair).unwrap();
        assert!(rep.hypothesis_warning.is_some());
    }
}
