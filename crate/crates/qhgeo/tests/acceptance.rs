//! Acceptance gate: runs the complete verification suite and reports one
//! pass/fail line per criterion.
//!
//! Criterion 9's margin experiment is informational (the estimate's length
//! budget is not quantified), so it reports without asserting; everything
//! else must pass.

use qhgeo::verify::{run_suite, CheckVerdict, Suite, VerifyOptions};

const CRITERIA: [(u8, &str); 10] = [
    (1, "critical constants kappa and lambda"),
    (2, "closed-form oracle agreement of the numeric solver"),
    (3, "punctured-plane antipodal distance and geodesic"),
    (4, "quasihyperbolic ball thresholds in the punctured plane"),
    (5, "distance-ratio ball thresholds and component counts"),
    (6, "convexity on convex domains for both metrics"),
    (7, "metric property suites"),
    (8, "moduli of convexity and smoothness"),
    (9, "annulus averaging estimate evaluator"),
    (10, "verdict stability under refined budgets"),
];

#[test]
fn acceptance() {
    let checks = run_suite(Suite::All, &VerifyOptions::default());
    let mut all_ok = true;

    for (criterion, title) in CRITERIA {
        let group: Vec<_> = checks.iter().filter(|c| c.criterion == criterion).collect();
        assert!(
            !group.is_empty(),
            "criterion {criterion} produced no checks"
        );
        let failed: Vec<_> = group.iter().filter(|c| !c.passed()).collect();
        let informational = group
            .iter()
            .filter(|c| c.verdict == CheckVerdict::Info)
            .count();
        let ok = failed.is_empty();
        all_ok &= ok;
        let status = if ok { "pass" } else { "FAIL" };
        let mut line = format!(
            "criterion {criterion:>2}: {status}  ({}/{} checks",
            group.len() - failed.len(),
            group.len()
        );
        if informational > 0 {
            line.push_str(&format!(", {informational} informational"));
        }
        line.push_str(&format!(") - {title}"));
        println!("{line}");
        for f in failed {
            println!(
                "    failed check '{}': expected {}, got {}",
                f.check, f.expected, f.got
            );
        }
    }

    assert!(all_ok, "at least one acceptance criterion failed");
}
