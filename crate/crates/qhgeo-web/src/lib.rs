//! Browser bindings for the quasihyperbolic toolkit. Every export takes and
//! returns plain strings (JSON or SVG) so the JavaScript side stays free of
//! generated glue types.

use wasm_bindgen::prelude::*;

use qhgeo::constants::{solve_kappa, solve_lambda};
use qhgeo::field::{distance_field, trace_ball_boundary, GridSpec};
use qhgeo::metric::{j_metric, qh_punctured_distance, qh_punctured_geodesic};
use qhgeo::moduli::{modulus_of_convexity, modulus_of_smoothness};
use qhgeo::solver::{qh_distance_numeric, SolverOptions};
use qhgeo::svg::render_svg;
use qhgeo::{DomainSpec, MetricKind, NormSpec, Point};

// String errors keep the bindings usable in host-side tests; wasm-bindgen
// converts them to JS exceptions in the browser.
fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_domain(json: &str) -> Result<DomainSpec, String> {
    let spec: DomainSpec = serde_json::from_str(json).map_err(err)?;
    spec.validate().map_err(err)?;
    Ok(spec)
}

fn domain_punctures(domain: &DomainSpec) -> Vec<Point> {
    match domain {
        DomainSpec::Punctured { punctures } => punctures.clone(),
        DomainSpec::SlitPlane { apex, .. } => vec![apex.clone()],
        _ => Vec::new(),
    }
}

/// kappa and lambda as a small JSON object.
#[wasm_bindgen]
pub fn constants_json() -> String {
    let (kappa, lambda) = (solve_kappa(), solve_lambda());
    format!(
        "{{\"kappa\": {}, \"lambda\": {}}}",
        kappa.value, lambda.value
    )
}

/// Traced metric-ball boundary as a standalone SVG document.
///
/// `metric` is "k" or "j"; `grid` is the sampling lattice side (odd, e.g.
/// 161 for interactive use).
#[wasm_bindgen]
pub fn ball_svg(
    domain_json: &str,
    metric: &str,
    cx: f64,
    cy: f64,
    r: f64,
    grid: u32,
) -> Result<String, String> {
    let domain = parse_domain(domain_json)?;
    let metric = match metric {
        "k" => MetricKind::Quasihyperbolic,
        "j" => MetricKind::DistanceRatio,
        other => return Err(format!("unknown metric '{other}'")),
    };
    if !(r > 0.0) {
        return Err(err("radius must be positive"));
    }
    let center = Point::new2(cx, cy);
    if !domain.contains(&center).map_err(err)? {
        return Err(err("center lies outside the domain"));
    }
    let d = domain
        .boundary_distance(&NormSpec::Euclidean, &center)
        .map_err(err)?;
    // every k- or j-ball of radius r fits in this Euclidean window
    let half_extent = 1.1 * d * (r.exp() - 1.0);
    let grid = GridSpec::centered(&center, half_extent, (grid as usize).max(3)).map_err(err)?;
    let field = distance_field(&domain, metric, &center, &grid).map_err(err)?;
    let contours = trace_ball_boundary(&field, r).map_err(err)?;
    let lines: Vec<Vec<Point>> = contours.into_iter().map(|c| c.vertices).collect();
    render_svg(&lines, &domain_punctures(&domain)).map_err(err)
}

/// Geodesic between two points plus both distances, as JSON:
/// `{"k": .., "j": .., "closed_form": bool, "svg": "<svg..."}`.
#[wasm_bindgen]
pub fn geodesic_json(
    domain_json: &str,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
) -> Result<String, String> {
    let domain = parse_domain(domain_json)?;
    let x = Point::new2(x1, y1);
    let y = Point::new2(x2, y2);
    if !domain.contains(&x).map_err(err)? || !domain.contains(&y).map_err(err)? {
        return Err(err("a point lies outside the domain"));
    }
    let j = j_metric(&domain, &x, &y).map_err(err)?;

    // exact circular-arc geodesic in the once-punctured plane, light numeric
    // solve elsewhere
    let single_puncture = match &domain {
        DomainSpec::Punctured { punctures } if punctures.len() == 1 => Some(punctures[0].clone()),
        _ => None,
    };
    let (k, vertices, closed_form) = match single_puncture {
        Some(p) => {
            let xs = Point::new2(x.x() - p.x(), x.y() - p.y());
            let ys = Point::new2(y.x() - p.x(), y.y() - p.y());
            let k = qh_punctured_distance(&xs, &ys).map_err(err)?;
            let g = qh_punctured_geodesic(&xs, &ys, 129).map_err(err)?;
            let vertices: Vec<Point> = g
                .path
                .vertices
                .iter()
                .map(|v| Point::new2(v.x() + p.x(), v.y() + p.y()))
                .collect();
            (k, vertices, true)
        }
        None => {
            let opts = SolverOptions {
                grid_resolution: 0.25,
                refine_iterations: 12,
                target_rel_error: 5e-3,
                ..SolverOptions::default()
            };
            let (k, path) =
                qh_distance_numeric(&domain, &NormSpec::Euclidean, &x, &y, &opts).map_err(err)?;
            (k, path.vertices, false)
        }
    };
    let svg = render_svg(&[vertices], &domain_punctures(&domain)).map_err(err)?;
    let doc = serde_json::json!({
        "k": k,
        "j": j,
        "closed_form": closed_form,
        "svg": svg,
    });
    Ok(doc.to_string())
}

/// Modulus curve of the 2D p-norm plane, as JSON
/// `{"samples": [[t, value], ..]}`. `kind` is "convexity" or "smoothness".
#[wasm_bindgen]
pub fn moduli_json(p: f64, kind: &str, samples: u32) -> Result<String, String> {
    let norm = if p.is_infinite() {
        NormSpec::sup()
    } else if (p - 2.0).abs() < 1e-12 {
        NormSpec::Euclidean
    } else {
        NormSpec::p_norm(p).map_err(err)?
    };
    let n = samples.clamp(2, 64) as usize;
    let max_t = match kind {
        "convexity" => 2.0,
        "smoothness" => 1.0,
        other => return Err(format!("unknown modulus kind '{other}'")),
    };
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n {
        let t = max_t * i as f64 / n as f64;
        let est = match kind {
            "convexity" => modulus_of_convexity(&norm, t).map_err(err)?,
            _ => modulus_of_smoothness(&norm, t).map_err(err)?,
        };
        rows.push(serde_json::json!([est.parameter, est.value]));
    }
    Ok(serde_json::json!({ "samples": rows }).to_string())
}
