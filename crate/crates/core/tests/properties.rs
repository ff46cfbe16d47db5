//! Property suites at a tenth of the acceptance case counts.
mod common;

fn check(name: &str) {
    let (_, cases, f) = common::property_suites().into_iter().find(|s| s.0 == name).unwrap();
    f((cases / 10).max(2)).unwrap();
}

#[test]
fn convexity() {
    check("convexity in t");
}

#[test]
fn monotonicity() {
    check("monotonicity in t");
}

#[test]
fn order_reversal() {
    check("order reversal of conjugation");
}

#[test]
fn young_inequality() {
    check("Young inequality");
}

#[test]
fn young_equality() {
    check("Young equality at the derivative");
}

#[test]
fn recession_bound() {
    check("feasible fields obey the recession bound");
}

#[test]
fn objective_soundness() {
    check("dual objective below the closed form");
}

#[test]
fn semimodular() {
    check("semimodular axioms");
}

#[test]
fn determinism() {
    check("determinism");
}

#[test]
fn csv_round_trip() {
    check("signal CSV round trip");
}

#[test]
fn pgm_round_trip() {
    check("PGM round trip");
}

#[test]
fn case_counts_total_ten_thousand() {
    assert_eq!(common::property_suites().iter().map(|s| s.1).sum::<u32>(), 10_000);
}
