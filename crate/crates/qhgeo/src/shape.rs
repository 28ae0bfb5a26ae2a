//! Numerical certification of metric-ball shape properties: convexity,
//! starlikeness about the center, and close-to-convexity. 2D only.
//!
//! Verdicts are three-valued. `Fail` always carries a witness that survives
//! re-evaluation at ten times the sampling density; when a sufficient test
//! fails without a certified obstruction the verdict is `Inconclusive`.

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::field::{self, closed_form_eval, GridSpec, ScalarField};
use crate::metric::MetricKind;
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeProperty {
    Convex,
    Starlike,
    CloseToConvex,
    Connected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Segment between two ball boundary points leaves the ball.
    SegmentViolation {
        a: Point,
        b: Point,
        point: Point,
        value: f64,
    },
    /// A center ray exits the ball and re-enters further out.
    RayReentry {
        direction: Vec<f64>,
        exit: Point,
        reentry: Point,
    },
    /// A complement point whose away-from-center ray re-enters the ball.
    ComplementRay { from: Point, reentry: Point },
    /// A complement point surrounded by the ball in every sampled direction.
    EnclosedPoint { point: Point },
    /// Two sublevel-set components.
    ComponentPair { first: Point, second: Point },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeReport {
    pub property: ShapeProperty,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub witness: Option<Witness>,
    pub samples_used: usize,
}

/// Sampling budgets for the shape tests.
#[derive(Debug, Clone)]
pub struct SampleBudget {
    /// directions used for boundary sampling
    pub boundary_samples: usize,
    /// membership samples per tested segment
    pub segment_samples: usize,
    /// boundary points kept for pairwise convexity chords
    pub chord_points: usize,
    /// complement grid side for the close-to-convexity window
    pub complement_grid: usize,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget {
            boundary_samples: 720,
            segment_samples: 48,
            chord_points: 240,
            complement_grid: 161,
        }
    }
}

impl SampleBudget {
    pub fn scaled(&self, factor: f64) -> SampleBudget {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(8);
        SampleBudget {
            boundary_samples: s(self.boundary_samples),
            segment_samples: s(self.segment_samples),
            chord_points: s(self.chord_points),
            complement_grid: s(self.complement_grid),
        }
    }
}

/// Distance-from-center oracle: exact closed form where the metric has one,
/// otherwise bilinear interpolation of a numeric field (an upper bound with
/// an error budget).
enum Oracle<'a> {
    Closed {
        eval: field::PairEval<'a>,
        domain: &'a DomainSpec,
        center: Point,
    },
    Field {
        field: ScalarField,
        err: f64,
    },
}

impl Oracle<'_> {
    /// Metric distance from the center; +infinity outside the domain (or
    /// outside the sampled window, which only ever over-approximates the
    /// complement).
    fn dist(&self, p: &Point) -> f64 {
        match self {
            Oracle::Closed {
                eval,
                domain,
                center,
            } => match domain.contains(p) {
                Ok(true) => eval(center, p).unwrap_or(f64::INFINITY),
                _ => f64::INFINITY,
            },
            Oracle::Field { field, .. } => field.interpolate(p).unwrap_or(f64::INFINITY),
        }
    }

    fn err(&self) -> f64 {
        match self {
            Oracle::Closed { .. } => 0.0,
            Oracle::Field { err, .. } => *err,
        }
    }
}

/// Largest possible Euclidean reach of the ball: j <= metric everywhere we
/// test, and j(c, y) >= log(1 + |c-y|/d(c)), so the ball sits inside the
/// Euclidean disk of this radius about the center.
fn ball_reach(domain: &DomainSpec, center: &Point, r: f64) -> Result<f64> {
    let d = domain.boundary_distance(&crate::norm::NormSpec::Euclidean, center)?;
    let reach = d * (r.exp() - 1.0);
    Ok(match domain_extent(domain, center) {
        Some(e) => reach.min(e),
        None => reach,
    })
}

/// Upper bound on |y - center| over y in the domain, for bounded domains.
fn domain_extent(domain: &DomainSpec, center: &Point) -> Option<f64> {
    match domain {
        DomainSpec::UnitBall {
            center: c, radius, ..
        } => Some(center.euclid_dist(c) + radius),
        DomainSpec::ConvexPolygon { vertices } => vertices
            .iter()
            .map(|v| center.euclid_dist(v))
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.max(d)))
            }),
        _ => None,
    }
}

fn make_oracle<'a>(
    domain: &'a DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    grid_refine: f64,
) -> Result<Oracle<'a>> {
    if center.dim() != 2 {
        return Err(Error::InvalidInput("shape tests are 2D".into()));
    }
    if !domain.contains(center)? {
        return Err(Error::OutsideDomain);
    }
    if let Some(eval) = closed_form_eval(domain, metric)? {
        return Ok(Oracle::Closed {
            eval,
            domain,
            center: center.clone(),
        });
    }
    if metric != MetricKind::Quasihyperbolic {
        return Err(Error::UnsupportedCombination(format!(
            "no evaluation strategy for {metric:?} on this domain"
        )));
    }
    let d = domain.boundary_distance(&crate::norm::NormSpec::Euclidean, center)?;
    let half = 1.05 * ball_reach(domain, center, r)?;
    let target_cell = (r / 50.0 * d).min(half / 40.0) * grid_refine;
    let n = (((2.0 * half / target_cell).ceil() as usize) + 1).clamp(41, 801);
    let grid = GridSpec::centered(center, half, n)?;
    let field = field::distance_field(domain, metric, center, &grid)?;
    // blunt budget for lattice anisotropy plus interpolation; verdicts whose
    // margin falls inside it come back inconclusive
    let err = 0.05 * r;
    Ok(Oracle::Field { field, err })
}

/// First crossing of the level `r` along the center ray in direction `u`
/// (unit vector): the returned point sits just inside the ball.
fn boundary_point(
    oracle: &Oracle<'_>,
    center: &Point,
    u: &[f64],
    r: f64,
    reach: f64,
    steps: usize,
) -> Option<Point> {
    let mut t_in = 0.0f64;
    let mut t_out = None;
    for s in 1..=steps {
        let t = reach * 1.001 * s as f64 / steps as f64;
        let p = center.add_scaled(u, t);
        if oracle.dist(&p) < r {
            t_in = t;
        } else {
            t_out = Some(t);
            break;
        }
    }
    let mut hi = t_out?;
    let mut lo = t_in;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let p = center.add_scaled(u, mid);
        if oracle.dist(&p) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        // the ray leaves the ball immediately; no usable boundary sample
        return None;
    }
    Some(center.add_scaled(u, lo))
}

fn directions(n: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..n).map(move |k| {
        let a = std::f64::consts::TAU * k as f64 / n as f64;
        vec![a.cos(), a.sin()]
    })
}

/// Convexity test: all chords between sampled boundary points must stay in
/// the ball.
pub fn test_convex(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    budget: &SampleBudget,
) -> Result<ShapeReport> {
    test_convex_refined(domain, metric, center, r, budget, 1.0)
}

pub(crate) fn test_convex_refined(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    budget: &SampleBudget,
    grid_refine: f64,
) -> Result<ShapeReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let oracle = make_oracle(domain, metric, center, r, grid_refine)?;
    let reach = ball_reach(domain, center, r)?;
    let tol = 1e-6 * r.max(1.0) + oracle.err();

    let mut boundary = Vec::new();
    for u in directions(budget.chord_points.max(8)) {
        if let Some(b) = boundary_point(&oracle, center, &u, r, reach, 4 * budget.segment_samples) {
            boundary.push(b);
        }
    }
    let mut samples_used = boundary.len() * 4 * budget.segment_samples;

    let mut witness = None;
    'outer: for i in 0..boundary.len() {
        for j in (i + 1)..boundary.len() {
            let (a, b) = (&boundary[i], &boundary[j]);
            samples_used += budget.segment_samples;
            for s in 1..budget.segment_samples {
                let p = a.lerp(b, s as f64 / budget.segment_samples as f64);
                let v = oracle.dist(&p);
                if v > r + tol {
                    witness = Some((a.clone(), b.clone(), p, v));
                    break 'outer;
                }
            }
        }
    }

    let report = match witness {
        None => ShapeReport {
            property: ShapeProperty::Convex,
            verdict: Verdict::Pass,
            tolerance: tol,
            witness: None,
            samples_used,
        },
        Some((a, b, p, v)) => {
            // re-verify at 10x the segment density
            let fine = 10 * budget.segment_samples;
            let mut worst = (v, p);
            for s in 1..fine {
                let q = a.lerp(&b, s as f64 / fine as f64);
                let vq = oracle.dist(&q);
                if vq > worst.0 {
                    worst = (vq, q);
                }
            }
            samples_used += fine;
            let verdict = if worst.0 > r + tol {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            ShapeReport {
                property: ShapeProperty::Convex,
                verdict,
                tolerance: tol,
                witness: Some(Witness::SegmentViolation {
                    a,
                    b,
                    point: worst.1,
                    value: worst.0,
                }),
                samples_used,
            }
        }
    };
    Ok(report)
}

/// Starlikeness about the ball center: membership along every center ray
/// must be a single interval.
pub fn test_starlike(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    budget: &SampleBudget,
) -> Result<ShapeReport> {
    test_starlike_refined(domain, metric, center, r, budget, 1.0)
}

pub(crate) fn test_starlike_refined(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    budget: &SampleBudget,
    grid_refine: f64,
) -> Result<ShapeReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let oracle = make_oracle(domain, metric, center, r, grid_refine)?;
    let reach = ball_reach(domain, center, r)?;
    let tol = 1e-6 * r.max(1.0) + oracle.err();
    let steps = 8 * budget.segment_samples;
    let mut samples_used = 0;

    let mut witness = None;
    'rays: for u in directions(budget.boundary_samples) {
        let mut exited_at: Option<Point> = None;
        samples_used += steps;
        for s in 1..=steps {
            let t = reach * 1.001 * s as f64 / steps as f64;
            let p = center.add_scaled(&u, t);
            let v = oracle.dist(&p);
            if v >= r {
                if exited_at.is_none() {
                    exited_at = Some(p);
                }
            } else if let Some(exit) = &exited_at {
                if v < r - tol {
                    witness = Some((u.clone(), exit.clone(), p));
                    break 'rays;
                }
            }
        }
    }

    let report = match witness {
        None => ShapeReport {
            property: ShapeProperty::Starlike,
            verdict: Verdict::Pass,
            tolerance: tol,
            witness: None,
            samples_used,
        },
        Some((u, exit, reentry)) => {
            // re-verify the gap at 10x density between center and reentry
            let fine = 10 * steps;
            let t_re = reentry.euclid_dist(center);
            let mut gap_confirmed = false;
            let mut exit_fine = exit.clone();
            let mut seen_outside = false;
            for s in 1..=fine {
                let t = t_re * s as f64 / fine as f64;
                let p = center.add_scaled(&u, t);
                let v = oracle.dist(&p);
                if v > r + tol {
                    seen_outside = true;
                    exit_fine = p;
                } else if seen_outside && v < r - tol {
                    gap_confirmed = true;
                    break;
                }
            }
            samples_used += fine;
            let verdict = if gap_confirmed {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            ShapeReport {
                property: ShapeProperty::Starlike,
                verdict,
                tolerance: tol,
                witness: Some(Witness::RayReentry {
                    direction: u,
                    exit: exit_fine,
                    reentry,
                }),
                samples_used,
            }
        }
    };
    Ok(report)
}

/// Close-to-convexity via a sufficient condition: from every sampled
/// complement point in the analysis window, the ray pointing directly away
/// from the ball center must never re-enter the ball. Away-rays live on
/// distinct lines through the center, so when each stays in the complement
/// they form a legal pairwise non-intersecting cover. `Fail` needs a
/// certified obstruction (a complement point enclosed by the ball in every
/// sampled direction); otherwise a violated ray yields `Inconclusive`.
pub fn test_close_to_convex(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    budget: &SampleBudget,
) -> Result<ShapeReport> {
    test_close_to_convex_refined(domain, metric, center, r, budget, 1.0)
}

pub(crate) fn test_close_to_convex_refined(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    budget: &SampleBudget,
    grid_refine: f64,
) -> Result<ShapeReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let oracle = make_oracle(domain, metric, center, r, grid_refine)?;
    let reach = ball_reach(domain, center, r)?;
    // a deliberately thick tolerance band: the fold of a just-barely
    // non-starlike ball produces hairline complement slivers whose k-excess
    // is orders of magnitude below this, and those slivers do not obstruct
    // a cover; a genuine covering obstruction shows a solid margin
    let tol = 0.01 * r.max(1.0) + oracle.err();
    // everything the ball can touch lies within `reach`; the window adds
    // margin so rays can be certified once they leave it
    let window = 1.02 * reach;
    let mut samples_used = 0;

    let mut violation: Option<(Point, Point)> = None;

    // complement samples along center rays: their away-rays extend the same
    // line, so one radial profile per direction settles all of them
    let steps = 8 * budget.segment_samples;
    let mut profile = vec![0.0f64; steps + 1];
    'rays: for u in directions(budget.boundary_samples) {
        samples_used += steps;
        for s in 1..=steps {
            let t = window * s as f64 / steps as f64;
            profile[s] = oracle.dist(&center.add_scaled(&u, t));
        }
        // deepest ball re-entry at or beyond each step
        let mut suffix_min = vec![(f64::INFINITY, 0usize); steps + 2];
        for s in (1..=steps).rev() {
            suffix_min[s] = if profile[s] < suffix_min[s + 1].0 {
                (profile[s], s)
            } else {
                suffix_min[s + 1]
            };
        }
        for s in 1..steps {
            if profile[s] >= r + tol && suffix_min[s + 1].0 < r - tol {
                let w = center.add_scaled(&u, window * s as f64 / steps as f64);
                let deep = suffix_min[s + 1].1;
                let p = center.add_scaled(&u, window * deep as f64 / steps as f64);
                violation = Some((w, p));
                break 'rays;
            }
        }
    }

    // coarse complement grid over the window for structures the radial scan
    // cannot see (e.g. complement pockets whose away-ray is not radial)
    if violation.is_none() {
        let n = budget.complement_grid.max(16);
        let cell = 2.0 * window / (n - 1) as f64;
        let step = window / (4 * budget.segment_samples) as f64;
        'grid: for j in 0..n {
            for i in 0..n {
                let w = Point::new2(
                    center.coords[0] - window + i as f64 * cell,
                    center.coords[1] - window + j as f64 * cell,
                );
                let dw = w.euclid_dist(center);
                if dw >= window || dw < 1e-12 {
                    continue;
                }
                if oracle.dist(&w) < r + tol {
                    continue; // inside the ball or within the margin band
                }
                let u = [
                    (w.coords[0] - center.coords[0]) / dw,
                    (w.coords[1] - center.coords[1]) / dw,
                ];
                let len = window - dw;
                let m = (len / step).ceil() as usize;
                samples_used += m;
                for s in 1..=m {
                    let p = w.add_scaled(&u, len * s as f64 / m as f64);
                    if oracle.dist(&p) < r - tol {
                        violation = Some((w, p));
                        break 'grid;
                    }
                }
            }
        }
    }

    let report = match violation {
        None => ShapeReport {
            property: ShapeProperty::CloseToConvex,
            verdict: Verdict::Pass,
            tolerance: tol,
            witness: None,
            samples_used,
        },
        Some((w, reentry)) => {
            // certified obstruction requires the ball to block every escape
            // direction from w
            let dirs = 180;
            let fine = 8 * budget.segment_samples;
            let mut enclosed = true;
            for u in directions(dirs) {
                let mut blocked = false;
                for s in 1..=fine {
                    let p = w.add_scaled(&u, 2.0 * window * s as f64 / fine as f64);
                    if p.euclid_dist(center) > window {
                        break;
                    }
                    if oracle.dist(&p) < r - tol {
                        blocked = true;
                        break;
                    }
                }
                if !blocked {
                    enclosed = false;
                    break;
                }
            }
            samples_used += dirs * fine;
            if enclosed {
                ShapeReport {
                    property: ShapeProperty::CloseToConvex,
                    verdict: Verdict::Fail,
                    tolerance: tol,
                    witness: Some(Witness::EnclosedPoint { point: w }),
                    samples_used,
                }
            } else {
                ShapeReport {
                    property: ShapeProperty::CloseToConvex,
                    verdict: Verdict::Inconclusive,
                    tolerance: tol,
                    witness: Some(Witness::ComplementRay { from: w, reentry }),
                    samples_used,
                }
            }
        }
    };
    Ok(report)
}

/// Starlikeness inheritance: in domains that are themselves starlike about
/// interior points (convex domains), metric balls stay starlike about their
/// center across a ladder of radii.
pub fn test_starlike_domain_inheritance(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    budget: &SampleBudget,
) -> Result<ShapeReport> {
    match domain {
        DomainSpec::ConvexPolygon { .. }
        | DomainSpec::UnitBall { .. }
        | DomainSpec::HalfSpace { .. } => {}
        _ => {
            return Err(Error::InvalidInput(
                "inheritance test needs a convex domain variant".into(),
            ))
        }
    }
    let mut samples_used = 0;
    let mut worst: Option<ShapeReport> = None;
    for r in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let rep = test_starlike(domain, metric, center, r, budget)?;
        samples_used += rep.samples_used;
        let rank = |v: Verdict| match v {
            Verdict::Pass => 0,
            Verdict::Inconclusive => 1,
            Verdict::Fail => 2,
        };
        if worst.as_ref().map_or(true, |w| rank(rep.verdict) > rank(w.verdict)) {
            worst = Some(rep);
        }
    }
    let mut out = worst.expect("nonempty ladder");
    out.samples_used = samples_used;
    Ok(out)
}
