//! Critical radii for convexity, starlikeness and close-to-convexity of
//! quasihyperbolic and j-metric balls, including the transcendental
//! constants kappa and lambda.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::metric::MetricKind;

/// A named critical radius defined as the root of a transcendental equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalRadius {
    pub name: String,
    pub value: f64,
    pub defining_equation: String,
    pub bracket: (f64, f64),
    pub source: String,
    pub sharp: bool,
}

/// g(p) = cos(sqrt(p^2-1)) + sqrt(p^2-1) * sin(sqrt(p^2-1)).
pub fn radius_equation(p: f64) -> f64 {
    let s = (p * p - 1.0).max(0.0).sqrt();
    s.cos() + s * s.sin()
}

/// g'(p) = p * cos(sqrt(p^2-1)), verified against finite differences in tests.
pub fn radius_equation_derivative(p: f64) -> f64 {
    p * (p * p - 1.0).max(0.0).sqrt().cos()
}

/// Bracketed bisection followed by a Newton polish. Falls back to pure
/// bisection whenever a Newton step leaves the bracket.
pub fn bisect_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    bisect_width: f64,
) -> f64 {
    let (flo, fhi) = (f(lo), f(hi));
    assert!(
        flo * fhi < 0.0,
        "no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
    );
    let sign_lo = flo.signum();
    while hi - lo > bisect_width {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        let d = df(x);
        let next = x - fx / d;
        if d == 0.0 || !(lo..=hi).contains(&next) {
            // shrink the bracket instead
            if fx.signum() == sign_lo {
                lo = x;
            } else {
                hi = x;
            }
            let mid = 0.5 * (lo + hi);
            if (mid - x).abs() < f64::EPSILON * x.abs() {
                return x;
            }
            x = mid;
            continue;
        }
        if (next - x).abs() < 1e-15 * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// The starlikeness radius of quasihyperbolic balls in punctured space:
/// the root of g(p) = 1/e on [1, pi].
pub fn solve_kappa() -> CriticalRadius {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    let value = *KAPPA.get_or_init(|| {
        let target = (-1.0_f64).exp();
        bisect_newton(
            |p| radius_equation(p) - target,
            radius_equation_derivative,
            1.0,
            std::f64::consts::PI,
            1e-8,
        )
    });
    CriticalRadius {
        name: "kappa".into(),
        value,
        defining_equation: "cos(sqrt(p^2-1)) + sqrt(p^2-1) sin(sqrt(p^2-1)) = 1/e".into(),
        bracket: (1.0, std::f64::consts::PI),
        source: "starlikeness radius of k-balls in punctured space".into(),
        sharp: true,
    }
}

/// The close-to-convexity radius of quasihyperbolic balls in the punctured
/// plane: the root of g(p) = 0 on (2, pi).
pub fn solve_lambda() -> CriticalRadius {
    static LAMBDA: OnceLock<f64> = OnceLock::new();
    // the bracket is open, so nudge the endpoints inward
    let value = *LAMBDA.get_or_init(|| {
        bisect_newton(
            radius_equation,
            radius_equation_derivative,
            2.0 + 1e-9,
            std::f64::consts::PI - 1e-9,
            1e-8,
        )
    });
    CriticalRadius {
        name: "lambda".into(),
        value,
        defining_equation: "cos(sqrt(p^2-1)) + sqrt(p^2-1) sin(sqrt(p^2-1)) = 0".into(),
        bracket: (2.0, std::f64::consts::PI),
        source: "close-to-convexity radius of k-balls in the punctured plane".into(),
        sharp: true,
    }
}

/// A single cell of the critical-radius tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusValue {
    Finite { value: f64, expr: String },
    Infinite,
    Unknown,
}

impl RadiusValue {
    fn finite(value: f64, expr: &str) -> Self {
        RadiusValue::Finite {
            value,
            expr: expr.into(),
        }
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            RadiusValue::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn display(&self) -> String {
        match self {
            RadiusValue::Finite { expr, .. } => expr.clone(),
            RadiusValue::Infinite => "inf".into(),
            RadiusValue::Unknown => "?".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEntry {
    pub value: RadiusValue,
    /// false mirrors the asterisk in the published tables (radius not sharp)
    pub sharp: bool,
}

impl RadiusEntry {
    fn sharp(value: RadiusValue) -> Self {
        RadiusEntry { value, sharp: true }
    }

    fn not_sharp(value: RadiusValue) -> Self {
        RadiusEntry {
            value,
            sharp: false,
        }
    }
}

/// One row of a critical-radius table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusTableRow {
    pub domain_class: String,
    pub convex: RadiusEntry,
    pub starlike: RadiusEntry,
    pub close_to_convex: RadiusEntry,
}

fn row(
    domain_class: &str,
    convex: RadiusEntry,
    starlike: RadiusEntry,
    close_to_convex: RadiusEntry,
) -> RadiusTableRow {
    RadiusTableRow {
        domain_class: domain_class.into(),
        convex,
        starlike,
        close_to_convex,
    }
}

/// The known critical radii for the requested metric. Cells published with
/// an asterisk carry `sharp = false`; open "?" entries stay `Unknown`.
pub fn radius_table(metric: MetricKind) -> Vec<RadiusTableRow> {
    let inf = || RadiusEntry::sharp(RadiusValue::Infinite);
    let unknown = || RadiusEntry::sharp(RadiusValue::Unknown);
    match metric {
        MetricKind::Quasihyperbolic => {
            let kappa = solve_kappa().value;
            let lambda = solve_lambda().value;
            let half_pi = std::f64::consts::FRAC_PI_2;
            vec![
                row(
                    "R^2 \\ {0}",
                    RadiusEntry::sharp(RadiusValue::finite(1.0, "1")),
                    RadiusEntry::sharp(RadiusValue::finite(kappa, "kappa")),
                    RadiusEntry::sharp(RadiusValue::finite(lambda, "lambda")),
                ),
                row(
                    "R^n \\ {0}",
                    RadiusEntry::sharp(RadiusValue::finite(1.0, "1")),
                    RadiusEntry::sharp(RadiusValue::finite(kappa, "kappa")),
                    RadiusEntry::not_sharp(RadiusValue::finite(lambda, "lambda")),
                ),
                row("convex, R^n", inf(), inf(), inf()),
                row("convex, Banach space", inf(), inf(), inf()),
                row("starlike w.r.t. x, R^n", unknown(), inf(), inf()),
                row(
                    "general (n = 2)",
                    RadiusEntry::sharp(RadiusValue::finite(1.0, "1")),
                    RadiusEntry::not_sharp(RadiusValue::finite(half_pi, "pi/2")),
                    RadiusEntry::not_sharp(RadiusValue::finite(half_pi, "pi/2")),
                ),
                row(
                    "general (n >= 2)",
                    unknown(),
                    RadiusEntry::not_sharp(RadiusValue::finite(half_pi, "pi/2")),
                    RadiusEntry::not_sharp(RadiusValue::finite(half_pi, "pi/2")),
                ),
            ]
        }
        MetricKind::DistanceRatio => {
            let log2 = std::f64::consts::LN_2;
            let star = (1.0 + 2.0_f64.sqrt()).ln();
            let ctc = (1.0 + 3.0_f64.sqrt()).ln();
            vec![
                row("convex, R^n", inf(), inf(), inf()),
                row("convex, Banach space", inf(), inf(), inf()),
                row(
                    "starlike w.r.t. x, R^n",
                    RadiusEntry::sharp(RadiusValue::finite(log2, "log 2")),
                    inf(),
                    inf(),
                ),
                row(
                    "general (n = 2)",
                    RadiusEntry::sharp(RadiusValue::finite(log2, "log 2")),
                    RadiusEntry::sharp(RadiusValue::finite(star, "log(1+sqrt 2)")),
                    RadiusEntry::sharp(RadiusValue::finite(ctc, "log(1+sqrt 3)")),
                ),
                row(
                    "general (n >= 2)",
                    RadiusEntry::sharp(RadiusValue::finite(log2, "log 2")),
                    RadiusEntry::sharp(RadiusValue::finite(star, "log(1+sqrt 2)")),
                    RadiusEntry::not_sharp(RadiusValue::finite(ctc, "log(1+sqrt 3)")),
                ),
            ]
        }
        _ => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_matches_published_approximation() {
        let k = solve_kappa();
        assert!((k.value - 2.83297).abs() < 5e-6, "kappa = {}", k.value);
        let resid = radius_equation(k.value) - (-1.0_f64).exp();
        assert!(resid.abs() <= 1e-12, "residual {resid}");
        assert!(k.bracket.0 < k.value && k.value < k.bracket.1);
    }

    #[test]
    fn lambda_matches_published_approximation() {
        let l = solve_lambda();
        assert!((l.value - 2.97169).abs() < 5e-6, "lambda = {}", l.value);
        assert!(radius_equation(l.value).abs() <= 1e-12);
        let k = solve_kappa();
        assert!(k.value < l.value && l.value < std::f64::consts::PI);
    }

    #[test]
    fn left_bracket_endpoint_sign() {
        // p = 1 gives cos 0 = 1 > 1/e
        assert_eq!(radius_equation(1.0), 1.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-6;
        for p in [1.3, 2.0, 2.5, 2.9, 3.1] {
            let fd = (radius_equation(p + h) - radius_equation(p - h)) / (2.0 * h);
            let an = radius_equation_derivative(p);
            assert!((fd - an).abs() < 1e-6, "p={p}: {fd} vs {an}");
        }
    }

    #[test]
    fn roots_are_simple() {
        assert!(radius_equation_derivative(solve_kappa().value).abs() > 0.1);
        assert!(radius_equation_derivative(solve_lambda().value).abs() > 0.1);
    }

    #[test]
    fn finer_bisection_does_not_move_the_roots() {
        let target = (-1.0_f64).exp();
        let kappa_fine = bisect_newton(
            |p| radius_equation(p) - target,
            radius_equation_derivative,
            1.0,
            std::f64::consts::PI,
            1e-9,
        );
        assert!((kappa_fine - solve_kappa().value).abs() < 1e-10);
        let lambda_fine = bisect_newton(
            radius_equation,
            radius_equation_derivative,
            2.0 + 1e-9,
            std::f64::consts::PI - 1e-9,
            1e-9,
        );
        assert!((lambda_fine - solve_lambda().value).abs() < 1e-10);
    }

    #[test]
    fn stored_constants_are_ordered() {
        let log2 = std::f64::consts::LN_2;
        let star = (1.0 + 2.0_f64.sqrt()).ln();
        let ctc = (1.0 + 3.0_f64.sqrt()).ln();
        let kappa = solve_kappa().value;
        let lambda = solve_lambda().value;
        assert!(log2 < star && star < 1.0 && 1.0 < ctc);
        assert!(ctc < kappa && kappa < lambda && lambda < std::f64::consts::PI);
    }

    #[test]
    fn table_rows_match_published_entries() {
        let j = radius_table(MetricKind::DistanceRatio);
        let general2 = j.iter().find(|r| r.domain_class == "general (n = 2)").unwrap();
        assert_eq!(
            general2.convex.value.as_finite().unwrap(),
            std::f64::consts::LN_2
        );
        assert_eq!(
            general2.starlike.value.as_finite().unwrap(),
            (1.0 + 2.0_f64.sqrt()).ln()
        );
        assert_eq!(
            general2.close_to_convex.value.as_finite().unwrap(),
            (1.0 + 3.0_f64.sqrt()).ln()
        );

        let k = radius_table(MetricKind::Quasihyperbolic);
        let punctured2 = k.iter().find(|r| r.domain_class == "R^2 \\ {0}").unwrap();
        assert_eq!(punctured2.convex.value.as_finite().unwrap(), 1.0);
        assert_eq!(
            punctured2.starlike.value.as_finite().unwrap(),
            solve_kappa().value
        );
        assert_eq!(
            punctured2.close_to_convex.value.as_finite().unwrap(),
            solve_lambda().value
        );

        let convex = k.iter().find(|r| r.domain_class == "convex, R^n").unwrap();
        assert_eq!(convex.convex.value, RadiusValue::Infinite);
        assert_eq!(convex.starlike.value, RadiusValue::Infinite);
        assert_eq!(convex.close_to_convex.value, RadiusValue::Infinite);

        // open entries stay unknown
        let starlike_row = k
            .iter()
            .find(|r| r.domain_class == "starlike w.r.t. x, R^n")
            .unwrap();
        assert_eq!(starlike_row.convex.value, RadiusValue::Unknown);
    }
}
