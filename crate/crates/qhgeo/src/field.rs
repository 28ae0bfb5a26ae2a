//! Metric distance fields on rectangular grids and the level-set machinery
//! on top of them: marching-squares boundary tracing and sublevel-set
//! component counting. 2D only.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::metric::{self, MetricKind};
use crate::norm::NormSpec;
use crate::path::PathPolyline;
use crate::point::Point;

/// A rectangular grid of `nx` x `ny` nodes with spacing `cell`, anchored at
/// `origin` (the lower-left node).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(origin: Point, cell: f64, nx: usize, ny: usize) -> Result<Self> {
        if origin.dim() != 2 {
            return Err(Error::InvalidInput("grids are 2D".into()));
        }
        if !(cell > 0.0) || !cell.is_finite() {
            return Err(Error::InvalidInput("cell size must be positive".into()));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidInput("grid needs at least 2x2 nodes".into()));
        }
        Ok(GridSpec {
            origin,
            cell,
            nx,
            ny,
        })
    }

    /// Square grid of `n` x `n` nodes centered on `center` with the given
    /// half-extent per axis.
    pub fn centered(center: &Point, half_extent: f64, n: usize) -> Result<Self> {
        if center.dim() != 2 {
            return Err(Error::InvalidInput("grids are 2D".into()));
        }
        if !(half_extent > 0.0) || n < 2 {
            return Err(Error::InvalidInput(
                "half_extent must be positive and n >= 2".into(),
            ));
        }
        let origin = Point::new2(center.coords[0] - half_extent, center.coords[1] - half_extent);
        GridSpec::new(origin, 2.0 * half_extent / (n - 1) as f64, n, n)
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new2(
            self.origin.coords[0] + i as f64 * self.cell,
            self.origin.coords[1] + j as f64 * self.cell,
        )
    }
}

/// Values of a metric distance from a fixed center, sampled on a grid.
/// `f64::INFINITY` marks nodes outside the domain.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: GridSpec,
    /// row-major: index = j * nx + i
    pub values: Vec<f64>,
    pub center: Point,
    pub metric: MetricKind,
}

impl ScalarField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// Bilinear interpolation at an off-grid point; `None` outside the grid
    /// or when any of the four surrounding nodes is outside the domain.
    pub fn interpolate(&self, p: &Point) -> Option<f64> {
        let fx = (p.coords[0] - self.grid.origin.coords[0]) / self.grid.cell;
        let fy = (p.coords[1] - self.grid.origin.coords[1]) / self.grid.cell;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let i = (fx.floor() as usize).min(self.grid.nx.checked_sub(2)?);
        let j = (fy.floor() as usize).min(self.grid.ny.checked_sub(2)?);
        if fx > (self.grid.nx - 1) as f64 || fy > (self.grid.ny - 1) as f64 {
            return None;
        }
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let v00 = self.value(i, j);
        let v10 = self.value(i + 1, j);
        let v01 = self.value(i, j + 1);
        let v11 = self.value(i + 1, j + 1);
        if !(v00.is_finite() && v10.is_finite() && v01.is_finite() && v11.is_finite()) {
            return None;
        }
        Some(
            v00 * (1.0 - tx) * (1.0 - ty)
                + v10 * tx * (1.0 - ty)
                + v01 * (1.0 - tx) * ty
                + v11 * tx * ty,
        )
    }
}

/// Sample the distance from `center` at every grid node. Closed-form metrics
/// are evaluated per node; the quasihyperbolic metric in domains without a
/// closed form falls back to single-source Dijkstra over the grid graph, in
/// which case the values are upper bounds.
pub fn distance_field(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    grid: &GridSpec,
) -> Result<ScalarField> {
    if center.dim() != 2 {
        return Err(Error::InvalidInput("field analysis is 2D".into()));
    }
    if !domain.contains(center)? {
        return Err(Error::OutsideDomain);
    }
    let norm = NormSpec::Euclidean;
    let closed_form = closed_form_eval(domain, metric)?;
    let n = grid.nx * grid.ny;
    let mut values = vec![f64::INFINITY; n];

    match closed_form {
        Some(eval) => {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let p = grid.node(i, j);
                    if domain.contains(&p)? {
                        values[j * grid.nx + i] = eval(center, &p)?;
                    }
                }
            }
        }
        None => {
            if metric != MetricKind::Quasihyperbolic {
                return Err(Error::UnsupportedCombination(format!(
                    "no evaluation strategy for {metric:?} on this domain"
                )));
            }
            dijkstra_field(domain, &norm, center, grid, &mut values)?;
        }
    }

    Ok(ScalarField {
        grid: grid.clone(),
        values,
        center: center.clone(),
        metric,
    })
}

pub(crate) type PairEval<'a> = Box<dyn Fn(&Point, &Point) -> Result<f64> + 'a>;

pub(crate) fn closed_form_eval<'a>(
    domain: &'a DomainSpec,
    metric: MetricKind,
) -> Result<Option<PairEval<'a>>> {
    Ok(match metric {
        MetricKind::DistanceRatio => Some(Box::new(move |x, y| metric::j_metric(domain, x, y))),
        MetricKind::Quasihyperbolic => match domain {
            DomainSpec::Punctured { punctures } if punctures.len() == 1 => {
                let p = punctures[0].clone();
                Some(Box::new(move |x: &Point, y: &Point| {
                    let xs = Point::new(x.sub(&p))?;
                    let ys = Point::new(y.sub(&p))?;
                    metric::qh_punctured_distance(&xs, &ys)
                }))
            }
            DomainSpec::HalfSpace { .. } => Some(Box::new(move |x, y| {
                metric::hyperbolic_halfspace_distance(domain, x, y)
            })),
            _ => None,
        },
        MetricKind::HyperbolicBall => match domain {
            DomainSpec::UnitBall { .. } => Some(Box::new(move |x, y| {
                metric::hyperbolic_ball_distance(domain, x, y)
            })),
            _ => {
                return Err(Error::UnsupportedCombination(
                    "hyperbolic_ball needs a UnitBall domain".into(),
                ))
            }
        },
        MetricKind::HyperbolicHalfspace => match domain {
            DomainSpec::HalfSpace { .. } => Some(Box::new(move |x, y| {
                metric::hyperbolic_halfspace_distance(domain, x, y)
            })),
            _ => {
                return Err(Error::UnsupportedCombination(
                    "hyperbolic_halfspace needs a HalfSpace domain".into(),
                ))
            }
        },
    })
}

/// Single-source Dijkstra over the grid graph with trapezoid edge weights,
/// seeded at the node nearest the center (plus the exact center-to-node hop).
fn dijkstra_field(
    domain: &DomainSpec,
    norm: &NormSpec,
    center: &Point,
    grid: &GridSpec,
    values: &mut [f64],
) -> Result<()> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let nx = grid.nx;
    let ny = grid.ny;
    let mut in_domain = vec![false; nx * ny];
    let mut bdry = vec![0.0f64; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let p = grid.node(i, j);
            if domain.contains(&p)? {
                in_domain[j * nx + i] = true;
                bdry[j * nx + i] = domain.boundary_distance(norm, &p)?;
            }
        }
    }

    let offsets: &[(i64, i64)] = &[
        (1, 0),
        (0, 1),
        (1, 1),
        (1, -1),
        (1, 2),
        (2, 1),
        (1, -2),
        (2, -1),
        (1, 3),
        (3, 1),
        (1, -3),
        (3, -1),
        (2, 3),
        (3, 2),
        (2, -3),
        (3, -2),
    ];

    let d_center = domain.boundary_distance(norm, center)?;
    let mut heap: BinaryHeap<(Reverse<(u64, usize)>, usize)> = BinaryHeap::new();
    let mut dist = vec![f64::INFINITY; nx * ny];
    // seed every in-domain node within one cell of the center with the exact
    // straight-hop cost, so the source is not biased to a single node
    let ci = ((center.coords[0] - grid.origin.coords[0]) / grid.cell).round() as i64;
    let cj = ((center.coords[1] - grid.origin.coords[1]) / grid.cell).round() as i64;
    for dj in -1..=1i64 {
        for di in -1..=1i64 {
            let (i, j) = (ci + di, cj + dj);
            if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
                continue;
            }
            let idx = j as usize * nx + i as usize;
            if !in_domain[idx] {
                continue;
            }
            let p = grid.node(i as usize, j as usize);
            if !domain.segment_in_domain(center, &p)? {
                continue;
            }
            let len = center.euclid_dist(&p);
            let w = if len == 0.0 {
                0.0
            } else {
                len * 0.5 * (1.0 / d_center + 1.0 / bdry[idx])
            };
            if w < dist[idx] {
                dist[idx] = w;
                heap.push((Reverse((w.to_bits(), idx)), idx));
            }
        }
    }
    if heap.is_empty() {
        return Err(Error::ResolutionTooCoarse(
            "no grid node reachable from the field center".into(),
        ));
    }

    let mut done = vec![false; nx * ny];
    while let Some((Reverse((bits, _)), u)) = heap.pop() {
        if done[u] {
            continue;
        }
        let du = f64::from_bits(bits);
        if du > dist[u] {
            continue;
        }
        done[u] = true;
        let (ui, uj) = ((u % nx) as i64, (u / nx) as i64);
        let pu = grid.node(ui as usize, uj as usize);
        for &(dx, dy) in offsets {
            for sign in [1i64, -1] {
                let (vi, vj) = (ui + sign * dx, uj + sign * dy);
                if vi < 0 || vj < 0 || vi as usize >= nx || vj as usize >= ny {
                    continue;
                }
                let v = vj as usize * nx + vi as usize;
                if !in_domain[v] || done[v] {
                    continue;
                }
                let pv = grid.node(vi as usize, vj as usize);
                if !domain.segment_in_domain(&pu, &pv)? {
                    continue;
                }
                let len = pu.euclid_dist(&pv);
                let w = len * 0.5 * (1.0 / bdry[u] + 1.0 / bdry[v]);
                let nd = du + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push((Reverse((nd.to_bits(), v)), v));
                }
            }
        }
    }

    for idx in 0..nx * ny {
        if in_domain[idx] {
            values[idx] = dist[idx];
        }
    }
    Ok(())
}

fn sublevel_checks(field: &ScalarField, r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let mut any = false;
    for j in 0..ny {
        for i in 0..nx {
            if field.value(i, j) < r {
                any = true;
                if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                    return Err(Error::ResolutionTooCoarse(
                        "sublevel set touches the grid edge; enlarge the grid".into(),
                    ));
                }
            }
        }
    }
    if !any {
        return Err(Error::InvalidInput(
            "sublevel set is empty at this radius".into(),
        ));
    }
    Ok(())
}

/// Marching-squares contours of `{value = r}` with linear interpolation
/// along grid edges. Every returned polyline is closed (first vertex equals
/// last vertex).
pub fn trace_ball_boundary(field: &ScalarField, r: f64) -> Result<Vec<PathPolyline>> {
    sublevel_checks(field, r)?;
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let span = field.max_finite().max(r);
    // interpolation against an out-of-domain node: clamp to a large finite
    // value so the crossing lands very close to the inside node
    let big = r + 10.0 * span.max(1.0);
    let val = |i: usize, j: usize| {
        let v = field.value(i, j);
        if v.is_finite() {
            v
        } else {
            big
        }
    };

    // edge id: (node index, 0 = toward +x, 1 = toward +y)
    let edge_point = |i: usize, j: usize, dir: u8| -> Point {
        let a = val(i, j);
        let (i2, j2) = if dir == 0 { (i + 1, j) } else { (i, j + 1) };
        let b = val(i2, j2);
        let t = ((r - a) / (b - a)).clamp(1e-9, 1.0 - 1e-9);
        let p = field.grid.node(i, j);
        let q = field.grid.node(i2, j2);
        p.lerp(&q, t)
    };

    // per cell, the contour segments as pairs of edge ids
    let edge_id = |i: usize, j: usize, dir: u8| (j * nx + i) * 2 + dir as usize;
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let inside = [
                val(i, j) < r,
                val(i + 1, j) < r,
                val(i + 1, j + 1) < r,
                val(i, j + 1) < r,
            ];
            let case = (inside[0] as usize)
                | (inside[1] as usize) << 1
                | (inside[2] as usize) << 2
                | (inside[3] as usize) << 3;
            // cell edges: bottom, right, top, left
            let bottom = edge_id(i, j, 0);
            let right = edge_id(i + 1, j, 1);
            let top = edge_id(i, j + 1, 0);
            let left = edge_id(i, j, 1);
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((top, left)),
                5 | 10 => {
                    // saddle: disambiguate by the cell-center average
                    let avg = 0.25
                        * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                    let center_inside = avg < r;
                    if (case == 5) == center_inside {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // chain segments into closed loops; every crossed edge appears in
    // exactly two segments because the sublevel set is interior to the grid
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(s);
        adj.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for s0 in 0..segments.len() {
        if used[s0] {
            continue;
        }
        let mut edge_ids = Vec::new();
        let (start_edge, mut cur_edge) = segments[s0];
        let mut cur_seg = s0;
        used[s0] = true;
        edge_ids.push(start_edge);
        loop {
            edge_ids.push(cur_edge);
            if cur_edge == start_edge {
                break;
            }
            let next = adj
                .get(&cur_edge)
                .and_then(|ss| ss.iter().find(|&&s| !used[s]).copied());
            match next {
                Some(s) => {
                    used[s] = true;
                    let (a, b) = segments[s];
                    cur_edge = if a == cur_edge { b } else { a };
                    cur_seg = s;
                }
                None => break,
            }
        }
        let _ = cur_seg;
        if edge_ids.len() < 4 || edge_ids.first() != edge_ids.last() {
            // open chain: contour hit the grid edge, which sublevel_checks
            // should have excluded; treat as a resolution problem
            return Err(Error::ResolutionTooCoarse(
                "open contour chain; enlarge the grid".into(),
            ));
        }
        let mut vertices: Vec<Point> = Vec::with_capacity(edge_ids.len());
        for id in edge_ids {
            let dir = (id % 2) as u8;
            let node = id / 2;
            let (i, j) = (node % nx, node / nx);
            let p = edge_point(i, j, dir);
            if vertices.last() != Some(&p) {
                vertices.push(p);
            }
        }
        // re-close after dedup
        if vertices.first() != vertices.last() {
            vertices.push(vertices[0].clone());
        }
        if vertices.len() >= 4 {
            loops.push(PathPolyline::new(vertices)?);
        }
    }
    Ok(loops)
}

/// Number of 4-connected components of the sublevel set `{value < r}`.
pub fn count_components(field: &ScalarField, r: f64) -> Result<usize> {
    sublevel_checks(field, r)?;
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let mut seen = vec![false; nx * ny];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if seen[start] || !(field.values[start] < r) {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(u) = stack.pop() {
            let (i, j) = (u % nx, u / nx);
            let mut push = |v: usize| {
                if !seen[v] && field.values[v] < r {
                    seen[v] = true;
                    stack.push(v);
                }
            };
            if i > 0 {
                push(u - 1);
            }
            if i + 1 < nx {
                push(u + 1);
            }
            if j > 0 {
                push(u - nx);
            }
            if j + 1 < ny {
                push(u + nx);
            }
        }
    }
    Ok(count)
}
