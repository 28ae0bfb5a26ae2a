//! Numeric quasihyperbolic distances and geodesics in any supported domain.
//!
//! The pipeline: a lattice graph over a padded bounding box of the
//! endpoints, Dijkstra for an initial path, then variational refinement of
//! the polyline (vertex insertion plus pattern-search coordinate descent on
//! interior vertices). The returned value is always an upper bound on the
//! true distance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::path::{qh_length, qh_segment_length, PathPolyline};
use crate::point::{euclid_len, Point};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Lattice cell size as a fraction of the smaller endpoint boundary distance.
    pub grid_resolution: f64,
    pub quadrature_points_per_segment: usize,
    pub refine_iterations: usize,
    pub target_rel_error: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_resolution: 0.2,
            quadrature_points_per_segment: 8,
            refine_iterations: 40,
            target_rel_error: 1e-3,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution <= 0.0
            || self.quadrature_points_per_segment == 0
            || self.target_rel_error < 1e-6
        {
            return Err(Error::InvalidInput(
                "solver options must be positive with target_rel_error >= 1e-6".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want the smallest distance,
        // ties broken by lexicographic node index for determinism
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Lattice {
    origin: Vec<f64>,
    cell: f64,
    dims: Vec<usize>,
    /// flat lattice index -> graph node id (or u32::MAX)
    node_of: Vec<u32>,
    /// graph node -> lattice coordinates
    points: Vec<Point>,
    /// boundary distance per node
    dist_to_boundary: Vec<f64>,
}

impl Lattice {
    fn build(
        domain: &DomainSpec,
        norm: &NormSpec,
        lo: &[f64],
        hi: &[f64],
        cell: f64,
    ) -> Result<Lattice> {
        let dim = lo.len();
        let mut dims = Vec::with_capacity(dim);
        let mut total: usize = 1;
        for i in 0..dim {
            let n = (((hi[i] - lo[i]) / cell).ceil() as usize).max(1) + 1;
            dims.push(n);
            total = total.saturating_mul(n);
        }
        const NODE_CAP: usize = 800_000;
        if total > NODE_CAP {
            let scale = (total as f64 / NODE_CAP as f64).powf(1.0 / dim as f64);
            return Lattice::build(domain, norm, lo, hi, cell * scale * 1.01);
        }
        let mut node_of = vec![u32::MAX; total];
        let mut points = Vec::new();
        let mut dist_to_boundary = Vec::new();
        let mut idx = vec![0usize; dim];
        for flat in 0..total {
            let mut rem = flat;
            for i in (0..dim).rev() {
                idx[i] = rem % dims[i];
                rem /= dims[i];
            }
            let coords: Vec<f64> = (0..dim).map(|i| lo[i] + idx[i] as f64 * cell).collect();
            let p = Point { coords };
            if domain.contains(&p)? {
                let d = domain.boundary_distance(norm, &p)?;
                // nodes hugging the boundary produce useless near-infinite edges
                if d > 0.3 * cell {
                    node_of[flat] = points.len() as u32;
                    points.push(p);
                    dist_to_boundary.push(d);
                }
            }
        }
        Ok(Lattice {
            origin: lo.to_vec(),
            cell,
            dims,
            node_of,
            points,
            dist_to_boundary,
        })
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for i in 0..idx.len() {
            flat = flat * self.dims[i] + idx[i];
        }
        flat
    }

    fn lattice_coords_of(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dims.len()];
        let mut rem = flat;
        for i in (0..self.dims.len()).rev() {
            idx[i] = rem % self.dims[i];
            rem /= self.dims[i];
        }
        idx
    }

    /// Nearest graph node reachable from `p` by a straight in-domain
    /// segment, searching a small lattice neighborhood around `p`.
    fn nearest_node(&self, domain: &DomainSpec, p: &Point) -> Result<Option<u32>> {
        let dim = self.dims.len();
        let base: Vec<i64> = (0..dim)
            .map(|i| ((p.coords[i] - self.origin[i]) / self.cell).round() as i64)
            .collect();
        let r = 3i64;
        let side = (2 * r + 1) as usize;
        let mut best: Option<(f64, u32)> = None;
        for combo in 0..side.pow(dim as u32) {
            let mut rem = combo;
            let mut idx = vec![0usize; dim];
            let mut valid = true;
            for i in 0..dim {
                let off = (rem % side) as i64 - r;
                rem /= side;
                let v = base[i] + off;
                if v < 0 || v as usize >= self.dims[i] {
                    valid = false;
                    break;
                }
                idx[i] = v as usize;
            }
            if !valid {
                continue;
            }
            let node = self.node_of[self.flat_index(&idx)];
            if node == u32::MAX {
                continue;
            }
            let q = &self.points[node as usize];
            let d = p.euclid_dist(q);
            if best.map_or(true, |(bd, bn)| d < bd || (d == bd && node < bn))
                && (d == 0.0 || domain.segment_in_domain(p, q)?)
            {
                best = Some((d, node));
            }
        }
        Ok(best.map(|(_, n)| n))
    }

    fn neighbor_offsets(&self) -> Vec<Vec<i64>> {
        let dim = self.dims.len();
        let mut offsets = Vec::new();
        if dim == 2 {
            // compass, knight, and (1,3)/(2,3)-type moves: the largest angular
            // gap between directions drops to ~11 degrees, which keeps the
            // anisotropy of the chordal metric well under 1% before refinement
            for (dx, dy) in [
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
            ] {
                offsets.push(vec![dx, dy]);
            }
        } else {
            // +/- axes and all two-coordinate diagonals
            for i in 0..dim {
                let mut v = vec![0i64; dim];
                v[i] = 1;
                offsets.push(v);
            }
            for i in 0..dim {
                for j in (i + 1)..dim {
                    for s in [1i64, -1] {
                        let mut v = vec![0i64; dim];
                        v[i] = 1;
                        v[j] = s;
                        offsets.push(v);
                    }
                }
            }
        }
        offsets
    }
}

/// Shortest lattice path by Dijkstra; returns the chain of graph nodes from
/// source to target inclusive, or None when the target is unreachable.
fn dijkstra(
    lattice: &Lattice,
    domain: &DomainSpec,
    norm: &NormSpec,
    source: u32,
    target: u32,
) -> Result<Option<Vec<u32>>> {
    let n = lattice.points.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![u32::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });
    let offsets = lattice.neighbor_offsets();
    let dim = lattice.dims.len();

    // reverse map: node -> lattice index
    let mut lattice_of = vec![0usize; n];
    for (flat, &node) in lattice.node_of.iter().enumerate() {
        if node != u32::MAX {
            lattice_of[node as usize] = flat;
        }
    }

    while let Some(HeapEntry { dist: du, node: u }) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        if u == target {
            break;
        }
        let idx = lattice.lattice_coords_of(lattice_of[u as usize]);
        let pu = &lattice.points[u as usize];
        let du_bdry = lattice.dist_to_boundary[u as usize];
        for off in &offsets {
            for sign in [1i64, -1] {
                let mut nidx = vec![0usize; dim];
                let mut ok = true;
                for i in 0..dim {
                    let v = idx[i] as i64 + sign * off[i];
                    if v < 0 || v as usize >= lattice.dims[i] {
                        ok = false;
                        break;
                    }
                    nidx[i] = v as usize;
                }
                if !ok {
                    continue;
                }
                let v = lattice.node_of[lattice.flat_index(&nidx)];
                if v == u32::MAX || done[v as usize] {
                    continue;
                }
                let pv = &lattice.points[v as usize];
                // edges must not cut across the boundary (slit, punctures)
                if !domain.segment_in_domain(pu, pv)? {
                    continue;
                }
                let dv_bdry = lattice.dist_to_boundary[v as usize];
                let seg = norm.value(&pv.sub(pu))?;
                let w = seg * 0.5 * (1.0 / du_bdry + 1.0 / dv_bdry);
                let nd = du + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    prev[v as usize] = u;
                    heap.push(HeapEntry { dist: nd, node: v });
                }
            }
        }
    }
    if !dist[target as usize].is_finite() {
        return Ok(None);
    }
    let mut chain = vec![target];
    let mut cur = target;
    while cur != source {
        cur = prev[cur as usize];
        chain.push(cur);
    }
    chain.reverse();
    Ok(Some(chain))
}

/// 1-D minimization along `t` starting at `t = 0` where the value is `f0`.
/// Probes both signs at two scales around the trial step `h`, expands in the
/// winning direction while the value keeps dropping, then golden-sections the
/// resulting bracket. Returns the best `(t, f(t))` found, `(0, f0)` if no
/// descent direction shows up.
fn line_min<F: Fn(f64) -> f64>(f: &F, f0: f64, h: f64) -> (f64, f64) {
    let mut best = (0.0, f0);
    for &t in &[h, -h, 0.25 * h, -0.25 * h] {
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    if best.0 == 0.0 {
        return best;
    }
    let (mut t, mut v) = best;
    while t.abs() < 64.0 * h {
        let t2 = 2.0 * t;
        let v2 = f(t2);
        if v2 < v {
            t = t2;
            v = v2;
        } else {
            break;
        }
    }
    // the minimum lies in (0, 2t); golden-section it down
    let (mut lo, mut hi) = if t > 0.0 { (0.0, 2.0 * t) } else { (2.0 * t, 0.0) };
    const PHI: f64 = 0.618_033_988_749_895;
    let mut x1 = hi - PHI * (hi - lo);
    let mut x2 = lo + PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..28 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let (tb, vb) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if vb < v {
        (tb, vb)
    } else {
        (t, v)
    }
}

/// Resample a polyline to `n` segments spaced evenly in discrete
/// quasihyperbolic arc length. Returns `None` when the input length cannot
/// be measured or a resampled segment leaves the domain (coarsening may cut
/// a corner across the boundary).
fn resample_qh(
    domain: &DomainSpec,
    norm: &NormSpec,
    vertices: &[Point],
    n: usize,
    quad: usize,
) -> Option<Vec<Point>> {
    // prefer the curvature-aware interpolant: placing new vertices on
    // straight chords biases the whole path toward the concave side, and
    // that long-wavelength bowl is exactly what per-vertex relaxation is
    // slowest to remove
    resample_qh_mode(domain, norm, vertices, n, quad, true)
        .or_else(|| resample_qh_mode(domain, norm, vertices, n, quad, false))
}

/// Catmull-Rom interpolation between `p1` and `p2` with outer neighbors
/// `p0`, `p3` (uniform parameterization).
fn catmull_rom(p0: &Point, p1: &Point, p2: &Point, p3: &Point, t: f64) -> Point {
    let t2 = t * t;
    let t3 = t2 * t;
    let coords = (0..p1.dim())
        .map(|c| {
            let (a, b, d, e) = (p0.coords[c], p1.coords[c], p2.coords[c], p3.coords[c]);
            0.5 * (2.0 * b
                + (-a + d) * t
                + (2.0 * a - 5.0 * b + 4.0 * d - e) * t2
                + (-a + 3.0 * b - 3.0 * d + e) * t3)
        })
        .collect();
    Point { coords }
}

fn resample_qh_mode(
    domain: &DomainSpec,
    norm: &NormSpec,
    vertices: &[Point],
    n: usize,
    quad: usize,
    smooth: bool,
) -> Option<Vec<Point>> {
    let mut cum = Vec::with_capacity(vertices.len());
    cum.push(0.0f64);
    for w in vertices.windows(2) {
        let l = qh_segment_length(domain, norm, &w[0], &w[1], quad).ok()?;
        cum.push(cum.last().unwrap() + l);
    }
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return None;
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(vertices[0].clone());
    let mut seg = 0usize;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while seg + 2 < vertices.len() && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = if span > 0.0 {
            ((target - cum[seg]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let chord_point = vertices[seg].lerp(&vertices[seg + 1], frac);
        let p = if smooth {
            let p0 = &vertices[seg.saturating_sub(1)];
            let p3 = &vertices[(seg + 2).min(vertices.len() - 1)];
            let spline = catmull_rom(p0, &vertices[seg], &vertices[seg + 1], p3, frac);
            // the spline can overshoot out of the domain near the boundary
            if domain.contains(&spline).unwrap_or(false) {
                spline
            } else {
                chord_point
            }
        } else {
            chord_point
        };
        out.push(p);
    }
    out.push(vertices.last().unwrap().clone());
    out.dedup();
    if out.len() < 2 {
        return None;
    }
    for w in out.windows(2) {
        if qh_segment_length(domain, norm, &w[0], &w[1], quad).is_err() {
            return None;
        }
    }
    Some(out)
}

/// Local minimization of the discrete quasihyperbolic length. Endpoints are
/// fixed; a proposed vertex move is kept only when it reduces the length of
/// the two affected segments and keeps them inside the domain. Interleaves
/// splitting of the quasihyperbolically longest segment with pattern-search
/// sweeps over interior vertices. The result never gets longer.
pub fn refine_path(
    domain: &DomainSpec,
    norm: &NormSpec,
    path: &PathPolyline,
    iterations: usize,
) -> Result<PathPolyline> {
    let quad = 8;
    let mut vertices = path.vertices.clone();
    if iterations == 0 || vertices.len() < 2 {
        return Ok(path.clone());
    }
    let length_in = qh_length(domain, norm, path, quad).ok();
    let dim = vertices[0].dim();

    let seg_len = |a: &Point, b: &Point| qh_segment_length(domain, norm, a, b, quad);
    // +infinity outside the domain, so the line searches below stay feasible
    let eval = |a: &Point, p: &Point, b: &Point| -> f64 {
        match (seg_len(a, p), seg_len(p, b)) {
            (Ok(u), Ok(v)) => u + v,
            _ => f64::INFINITY,
        }
    };

    let scale0 = {
        let mut longest = 0.0f64;
        for w in vertices.windows(2) {
            longest = longest.max(norm.value(&w[1].sub(&w[0]))?);
        }
        longest
    };
    if scale0 == 0.0 {
        return Ok(path.clone());
    }

    let merge_eps = 1e-9 * scale0.max(1e-6);

    // a line-search move can park a vertex quasihyperbolically on top of
    // its neighbor; the near-zero segment adds no geometry but pins both
    // endpoints (any move of either one only adds length), so drop interior
    // vertices that sit within a small fraction of the split threshold of
    // a neighbor
    let merge_degenerate = |vertices: &mut Vec<Point>| {
        let mut i = 1;
        while i + 1 < vertices.len() {
            let near = |a: &Point, b: &Point| {
                a.euclid_dist(b) < merge_eps
                    || matches!(qh_segment_length(domain, norm, a, b, 4), Ok(l) if l < 5e-3)
            };
            if near(&vertices[i - 1], &vertices[i]) || near(&vertices[i], &vertices[i + 1]) {
                vertices.remove(i);
            } else {
                i += 1;
            }
        }
    };

    // Coarse-to-fine relaxation. Per-vertex moves damp long-wavelength error
    // like a diffusion process, so a dense polyline needs O(n^2) sweeps to
    // settle; with a handful of vertices the global shape converges in a few
    // sweeps, after which each finer level only polishes short wavelengths.
    let levels = [0.8f64, 0.4, 0.2, 0.1];
    for &level in &levels {
        let cur_total = {
            let mut t = 0.0;
            let mut ok = true;
            for w in vertices.windows(2) {
                match seg_len(&w[0], &w[1]) {
                    Ok(l) => t += l,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                Some(t)
            } else {
                None
            }
        };
        if let Some(t) = cur_total {
            if t > 0.0 {
                let n = ((t / level).ceil() as usize).max(1);
                if let Some(cand) = resample_qh(domain, norm, &vertices, n, quad) {
                    vertices = cand;
                }
            }
        }

        for _sweep in 0..iterations {
            merge_degenerate(&mut vertices);

            // nonlinear Gauss-Seidel: each interior vertex gets a 1-D line
            // search along the normal of the chord through its neighbors (the
            // direction that actually bends the path) and along the spring
            // direction toward the neighbors' midpoint
            let mut sweep_gain = 0.0;
            let mut total = 0.0;
            for i in 1..vertices.len() - 1 {
                let a = vertices[i - 1].clone();
                let b = vertices[i + 1].clone();
                let mut current = eval(&a, &vertices[i], &b);
                if !current.is_finite() {
                    continue;
                }
                let start = current;
                let h = 0.25
                    * vertices[i]
                        .euclid_dist(&a)
                        .min(vertices[i].euclid_dist(&b))
                        .max(merge_eps);

                let mut dirs_i: Vec<Vec<f64>> = Vec::new();
                let chord = b.sub(&a);
                let clen = euclid_len(&chord);
                if dim == 2 && clen > 0.0 {
                    dirs_i.push(vec![-chord[1] / clen, chord[0] / clen]);
                } else {
                    for ax in 0..dim {
                        let mut v = vec![0.0; dim];
                        v[ax] = 1.0;
                        dirs_i.push(v);
                    }
                }
                let spring = a.lerp(&b, 0.5).sub(&vertices[i]);
                let slen = euclid_len(&spring);
                if slen > merge_eps {
                    dirs_i.push(spring.iter().map(|c| c / slen).collect());
                }

                for d in &dirs_i {
                    let f = |t: f64| eval(&a, &vertices[i].add_scaled(d, t), &b);
                    let (t, ft) = line_min(&f, current, h);
                    if t != 0.0 && ft < current {
                        vertices[i] = vertices[i].add_scaled(d, t);
                        current = ft;
                    }
                }
                sweep_gain += start - current;
                total += current;
            }
            if sweep_gain < 1e-7 * total.max(1e-9) {
                break;
            }
        }
    }
    merge_degenerate(&mut vertices);
    let out = PathPolyline::new(vertices)?;
    // segment insertion re-partitions the quadrature and can nudge the
    // discrete length up by a hair; the contract is monotone non-increase
    if let Some(before) = length_in {
        if let Ok(after) = qh_length(domain, norm, &out, quad) {
            if after > before {
                return Ok(path.clone());
            }
        }
    }
    Ok(out)
}

/// Numeric quasihyperbolic distance and an approximate geodesic.
///
/// The value is the discrete quasihyperbolic length of the returned path
/// and therefore an upper bound on the true distance.
pub fn qh_distance_numeric(
    domain: &DomainSpec,
    norm: &NormSpec,
    x: &Point,
    y: &Point,
    opts: &SolverOptions,
) -> Result<(f64, PathPolyline)> {
    opts.validate()?;
    if !domain.contains(x)? || !domain.contains(y)? {
        return Err(Error::OutsideDomain);
    }
    if x == y {
        return Ok((
            0.0,
            PathPolyline {
                vertices: vec![x.clone()],
            },
        ));
    }
    let dx = domain.boundary_distance(norm, x)?;
    let dy = domain.boundary_distance(norm, y)?;
    let cell = opts.grid_resolution * dx.min(dy);
    let dim = x.dim();

    let mut pad = 3.0 * dx.max(dy);
    let mut last_err: Option<Error> = None;
    for _attempt in 0..6 {
        let lo: Vec<f64> = (0..dim)
            .map(|i| x.coords[i].min(y.coords[i]) - pad)
            .collect();
        let hi: Vec<f64> = (0..dim)
            .map(|i| x.coords[i].max(y.coords[i]) + pad)
            .collect();
        let lattice = Lattice::build(domain, norm, &lo, &hi, cell)?;
        let (src, dst) = match (lattice.nearest_node(domain, x)?, lattice.nearest_node(domain, y)?) {
            (Some(s), Some(d)) => (s, d),
            _ => {
                last_err = Some(Error::ResolutionTooCoarse(
                    "no lattice node near an endpoint; shrink grid_resolution".into(),
                ));
                pad *= 2.0;
                continue;
            }
        };
        let chain = match dijkstra(&lattice, domain, norm, src, dst)? {
            Some(c) => c,
            None => {
                last_err = Some(Error::ResolutionTooCoarse(
                    "endpoints not connected at this resolution; shrink grid_resolution".into(),
                ));
                pad *= 2.0;
                continue;
            }
        };
        let mut vertices = Vec::with_capacity(chain.len() + 2);
        vertices.push(x.clone());
        vertices.extend(chain.iter().map(|&n| lattice.points[n as usize].clone()));
        vertices.push(y.clone());
        vertices.dedup();
        let mut path = PathPolyline::new(vertices)?;

        // refine until the improvement per round drops below target/10
        let quad = opts.quadrature_points_per_segment;
        let mut value = qh_length(domain, norm, &path, quad)?;
        let chunk = opts.refine_iterations.max(1);
        for _round in 0..12 {
            let refined = refine_path(domain, norm, &path, chunk)?;
            let new_value = qh_length(domain, norm, &refined, quad)?;
            if new_value >= value {
                break;
            }
            let improvement = value - new_value;
            path = refined;
            value = new_value;
            if improvement < opts.target_rel_error / 10.0 * new_value.max(1e-12) {
                break;
            }
        }

        // a geodesic hugging the bounding box means the box was too small
        let touches_box = path.vertices.iter().any(|v| {
            (0..dim).any(|i| v.coords[i] < lo[i] + cell || v.coords[i] > hi[i] - cell)
        });
        let endpoint_on_edge = [x, y].iter().any(|p| {
            (0..dim).any(|i| p.coords[i] < lo[i] + cell || p.coords[i] > hi[i] - cell)
        });
        if touches_box && !endpoint_on_edge {
            pad *= 2.0;
            last_err = None;
            continue;
        }
        return Ok((value, path));
    }
    Err(last_err.unwrap_or_else(|| {
        Error::ResolutionTooCoarse("bounding box kept growing without convergence".into())
    }))
}

/// Max over the given pairs of k_numeric / j; a lower bound on the
/// uniformity constant of the domain. Pairs with j = 0 are skipped.
pub fn uniformity_ratio(
    domain: &DomainSpec,
    pairs: &[(Point, Point)],
    opts: &SolverOptions,
) -> Result<(f64, (Point, Point))> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("empty pair list".into()));
    }
    let norm = NormSpec::Euclidean;
    let mut best: Option<(f64, (Point, Point))> = None;
    for (a, b) in pairs {
        let j = crate::metric::j_metric(domain, a, b)?;
        if j == 0.0 {
            continue;
        }
        let (k, _) = qh_distance_numeric(domain, &norm, a, b, opts)?;
        let ratio = k / j;
        if best.as_ref().map_or(true, |(r, _)| ratio > *r) {
            best = Some((ratio, (a.clone(), b.clone())));
        }
    }
    best.ok_or(Error::EmptyEffectiveSet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{hyperbolic_halfspace_distance, qh_punctured_distance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn identical_endpoints() {
        let d = DomainSpec::punctured_plane();
        let p = Point::new2(1.0, 0.0);
        let (v, path) =
            qh_distance_numeric(&d, &NormSpec::Euclidean, &p, &p, &default_opts()).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(path.vertices.len(), 1);
    }

    #[test]
    fn half_plane_matches_closed_form() {
        let domain = DomainSpec::upper_half_plane();
        let norm = NormSpec::Euclidean;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let opts = default_opts();
        for _ in 0..6 {
            let x = Point::new2(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..2.0));
            let y = Point::new2(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..2.0));
            let exact = hyperbolic_halfspace_distance(&domain, &x, &y).unwrap();
            if exact > 5.0 || exact < 1e-3 {
                continue;
            }
            let (num, _) = qh_distance_numeric(&domain, &norm, &x, &y, &opts).unwrap();
            let rel = (num - exact) / exact;
            assert!(rel > -1e-9, "solver beat the infimum: {rel}");
            assert!(rel < 0.01, "x={x:?} y={y:?} exact={exact} num={num}");
        }
    }

    #[test]
    fn punctured_plane_matches_martin_osgood() {
        let domain = DomainSpec::punctured_plane();
        let norm = NormSpec::Euclidean;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let opts = default_opts();
        for _ in 0..6 {
            let r1: f64 = rng.gen_range(0.5..3.0);
            let r2: f64 = rng.gen_range(0.5..3.0);
            let t1: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let t2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = Point::new2(r1 * t1.cos(), r1 * t1.sin());
            let y = Point::new2(r2 * t2.cos(), r2 * t2.sin());
            let exact = qh_punctured_distance(&x, &y).unwrap();
            if exact > 5.0 || exact < 1e-3 {
                continue;
            }
            let (num, _) = qh_distance_numeric(&domain, &norm, &x, &y, &opts).unwrap();
            let rel = (num - exact) / exact;
            assert!(rel > -1e-9);
            assert!(rel < 0.01, "exact={exact} num={num} rel={rel}");
        }
    }

    #[test]
    fn refine_zero_iterations_is_identity() {
        let d = DomainSpec::punctured_plane();
        let p = PathPolyline::new(vec![Point::new2(1.0, 0.0), Point::new2(0.0, 1.0)]).unwrap();
        let r = refine_path(&d, &NormSpec::Euclidean, &p, 0).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn refine_chord_toward_quarter_circle() {
        let d = DomainSpec::punctured_plane();
        let norm = NormSpec::Euclidean;
        let chord =
            PathPolyline::new(vec![Point::new2(1.0, 0.0), Point::new2(0.0, 1.0)]).unwrap();
        let chord_len = qh_length(&d, &norm, &chord, 16).unwrap();
        let mut path = chord;
        for _ in 0..8 {
            path = refine_path(&d, &norm, &path, 40).unwrap();
        }
        let len = qh_length(&d, &norm, &path, 16).unwrap();
        let exact = std::f64::consts::FRAC_PI_2;
        assert!(len < chord_len);
        assert!((len - exact) / exact < 0.01, "len={len} exact={exact}");
        assert!(len > exact - 1e-9);
    }

    #[test]
    fn refine_keeps_radial_geodesic() {
        let d = DomainSpec::punctured_plane();
        let norm = NormSpec::Euclidean;
        let g =
            crate::metric::qh_punctured_geodesic(&Point::new2(1.0, 0.0), &Point::new2(std::f64::consts::E, 0.0), 33)
                .unwrap();
        let before = qh_length(&d, &norm, &g.path, 16).unwrap();
        let refined = refine_path(&d, &norm, &g.path, 30).unwrap();
        let after = qh_length(&d, &norm, &refined, 16).unwrap();
        assert!(after <= before + 1e-12);
        assert!((after - before).abs() < 1e-9);
    }

    #[test]
    fn slit_plane_ratio_grows() {
        let domain = DomainSpec::slit_plane(Point::new2(0.0, 0.0), vec![1.0, 0.0]).unwrap();
        let opts = SolverOptions {
            grid_resolution: 0.33,
            ..default_opts()
        };
        let mut prev = 0.0;
        for s in [2.0, 8.0] {
            let pairs = vec![(Point::new2(s, 1.0), Point::new2(s, -1.0))];
            let (ratio, _) = uniformity_ratio(&domain, &pairs, &opts).unwrap();
            assert!(ratio > prev, "s={s}: ratio {ratio} <= {prev}");
            prev = ratio;
        }
    }

    #[test]
    fn empty_pairs_is_an_error() {
        let domain = DomainSpec::punctured_plane();
        assert!(matches!(
            uniformity_ratio(&domain, &[], &default_opts()),
            Err(Error::InvalidInput(_))
        ));
        let p = Point::new2(1.0, 1.0);
        assert!(matches!(
            uniformity_ratio(&domain, &[(p.clone(), p)], &default_opts()),
            Err(Error::EmptyEffectiveSet)
        ));
    }
}
