//! Minimal deterministic SVG rendering of 2D polylines (ball boundaries,
//! geodesics) with puncture markers. A fixed 800x800 viewBox is mapped from
//! the data bounding box with a 5% margin; no styling options, so identical
//! input yields byte-identical output.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::point::Point;

const VIEW: f64 = 800.0;

struct Mapper {
    scale: f64,
    ox: f64,
    oy: f64,
}

impl Mapper {
    fn map(&self, p: &Point) -> (f64, f64) {
        // SVG y grows downward
        (
            (p.coords[0] - self.ox) * self.scale,
            VIEW - (p.coords[1] - self.oy) * self.scale,
        )
    }
}

fn bounding_mapper<'a>(points: impl Iterator<Item = &'a Point>) -> Option<Mapper> {
    let mut bbox: Option<[f64; 4]> = None;
    for p in points {
        let b = bbox.get_or_insert([p.x(), p.y(), p.x(), p.y()]);
        b[0] = b[0].min(p.x());
        b[1] = b[1].min(p.y());
        b[2] = b[2].max(p.x());
        b[3] = b[3].max(p.y());
    }
    let [x0, y0, x1, y1] = bbox?;
    let w = (x1 - x0).max(1e-9);
    let h = (y1 - y0).max(1e-9);
    let span = w.max(h) * 1.1; // 5% margin on each side
    let scale = VIEW / span;
    // center the data in the square viewBox
    let ox = 0.5 * (x0 + x1) - 0.5 * span;
    let oy = 0.5 * (y0 + y1) - 0.5 * span;
    Some(Mapper { scale, ox, oy })
}

/// Renders polylines and puncture markers as a standalone SVG document: one
/// `path` element per polyline, each puncture drawn as a cross.
pub fn render_svg(polylines: &[Vec<Point>], punctures: &[Point]) -> Result<String> {
    for p in polylines.iter().flatten().chain(punctures) {
        if p.dim() != 2 {
            return Err(Error::InvalidInput("svg rendering needs 2D points".into()));
        }
    }
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW} {VIEW}\" \
         width=\"{VIEW}\" height=\"{VIEW}\">"
    )
    .unwrap();
    let all = polylines.iter().flatten().chain(punctures);
    if let Some(m) = bounding_mapper(all) {
        for line in polylines.iter().filter(|l| !l.is_empty()) {
            let mut d = String::new();
            for (i, p) in line.iter().enumerate() {
                let (x, y) = m.map(p);
                let cmd = if i == 0 { 'M' } else { 'L' };
                write!(d, "{cmd}{x:.3} {y:.3} ").unwrap();
            }
            writeln!(
                out,
                "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
                d.trim_end()
            )
            .unwrap();
        }
        let arm = 8.0;
        for p in punctures {
            let (x, y) = m.map(p);
            writeln!(
                out,
                "<path d=\"M{:.3} {y:.3} L{:.3} {y:.3} M{x:.3} {:.3} L{x:.3} {:.3}\" \
                 stroke=\"black\" stroke-width=\"1.5\"/>",
                x - arm,
                x + arm,
                y - arm,
                y + arm
            )
            .unwrap();
        }
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_valid_svg() {
        let svg = render_svg(&[], &[]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<path"));
    }

    #[test]
    fn one_path_element_per_polyline_plus_crosses() {
        let lines = vec![
            vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)],
            vec![Point::new2(0.0, 1.0), Point::new2(1.0, 1.0), Point::new2(1.0, 2.0)],
        ];
        let punctures = vec![Point::new2(0.5, 0.5)];
        let svg = render_svg(&lines, &punctures).unwrap();
        assert_eq!(svg.matches("<path").count(), 3);
        assert!(svg.contains("viewBox=\"0 0 800 800\""));
    }

    #[test]
    fn deterministic_bytes() {
        let lines = vec![vec![
            Point::new2(0.123456789, -2.0),
            Point::new2(3.0, 4.000000001),
        ]];
        let punctures = vec![Point::new2(0.0, 0.0)];
        let a = render_svg(&lines, &punctures).unwrap();
        let b = render_svg(&lines, &punctures).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_2d() {
        let lines = vec![vec![
            Point::new(vec![0.0, 0.0, 0.0]).unwrap(),
            Point::new(vec![1.0, 0.0, 0.0]).unwrap(),
        ]];
        assert!(render_svg(&lines, &[]).is_err());
    }
}
