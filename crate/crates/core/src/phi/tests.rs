use super::*;
use crate::field::ScalarField;

fn c(v: f64) -> ScalarField {
    ScalarField::constant(v)
}

fn close(a: ExtReal, b: f64, tol: f64) -> bool {
    (a.value() - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn spot_values() {
    let x = Point::at(0.3);
    assert_eq!(PhiFunction::double_phase(c(0.0)).unwrap().value(&x, 2.0).value(), 2.0);
    assert_eq!(PhiFunction::power_varexp(c(2.0)).unwrap().value(&x, 3.0).value(), 9.0);
    assert!(close(PhiFunction::clr(c(2.0)).unwrap().value(&x, 0.5), 0.125, 1e-14));
    assert_eq!(PhiFunction::linear().value(&x, 0.0), ExtReal::ZERO);
}

#[test]
fn derivatives() {
    let x = Point::at(0.0);
    assert!(close(PhiFunction::autonomous(0.5, 2.0).unwrap().left_derivative(&x, 3.0), 3.0, 1e-14));
    assert_eq!(PhiFunction::linear().left_derivative(&x, 7.0).value(), 1.0);
    let clr = PhiFunction::clr(c(2.0)).unwrap();
    assert_eq!(clr.left_derivative(&x, 2.0).value(), 1.0);
    // difference quotient of the t > 1 branch
    let h = 1e-6;
    let dq = (clr.value(&x, 2.0).value() - clr.value(&x, 2.0 - h).value()) / h;
    assert!((dq - 1.0).abs() < 1e-8);
}

#[test]
fn conjugate_examples() {
    let x = Point::at(0.0);
    let lin = PhiFunction::linear();
    assert_eq!(lin.conjugate(&x, 0.5), ExtReal::ZERO);
    assert!(lin.conjugate(&x, 2.0).is_infinite());
    assert!(close(PhiFunction::autonomous(0.5, 2.0).unwrap().conjugate(&x, 1.0), 0.5, 1e-14));
    let nv = PhiFunction::normalized_varexp(c(3.0)).unwrap();
    let closed = nv.conjugate(&x, 2.0).value();
    assert!((closed - 2f64.powf(1.5) / 1.5).abs() < 1e-12);
    // brute force over a dense grid
    let brute = (0..200_000)
        .map(|k| {
            let t = k as f64 * 1e-5;
            2.0 * t - t.powi(3) / 3.0
        })
        .fold(0.0f64, f64::max);
    assert!((brute - closed).abs() < 1e-8);
}

#[test]
fn recession_examples() {
    let x = Point::at(0.0);
    assert_eq!(PhiFunction::power_varexp(c(1.0)).unwrap().recession(&x), ExtReal::ONE);
    assert!(PhiFunction::double_phase(c(0.5)).unwrap().recession(&x).is_infinite());
    assert_eq!(PhiFunction::clr(c(3.0)).unwrap().recession(&x), ExtReal::ONE);
    let p = PhiFunction::power_varexp(ScalarField::power_type(1.0, 0.0)).unwrap();
    assert_eq!(p.recession(&Point::at(0.0)), ExtReal::ONE);
    assert!(p.recession(&Point::at(0.1)).is_infinite());
}

#[test]
fn young_gap_examples() {
    let q = PhiFunction::autonomous(0.5, 2.0).unwrap();
    assert!(q.young_gap(0.0, 3.0).unwrap().abs() < 1e-12);
    assert_eq!(PhiFunction::linear().young_gap(0.0, 5.0), Some(0.0));
    let clr = PhiFunction::clr(c(2.0)).unwrap();
    assert!(clr.young_gap(0.0, 0.5).unwrap().abs() < 1e-14);
    assert!((clr.conjugate(&Point::at(0.0), 0.5).value() - 0.125).abs() < 1e-14);
}

#[test]
fn tabulated_profile() {
    let tab = PhiFunction::tabulated(vec![0.0, 1.0, 2.0, 4.0], vec![0.0, 0.5, 2.0, 8.0]).unwrap();
    let x = Point::at(0.0);
    assert_eq!(tab.value(&x, 0.5).value(), 0.25);
    assert_eq!(tab.left_derivative(&x, 1.0).value(), 0.5);
    assert_eq!(tab.left_derivative(&x, 1.5).value(), 1.5);
    assert_eq!(tab.left_derivative(&x, 10.0).value(), 3.0);
    assert_eq!(tab.recession(&x).value(), 3.0);
    for s in [0.2, 0.5, 1.0, 2.0, 2.9] {
        let exact = tab.conjugate(&x, s).value();
        let num = tab.conjugate_numeric(&x, s).value();
        assert!((exact - num).abs() < 1e-6 * exact.max(1.0), "s={s}: {exact} vs {num}");
    }
    assert!(tab.conjugate(&x, 3.5).is_infinite());
    assert!(PhiFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 3.0]).is_err());
}

#[test]
fn domain_checks() {
    let d = Domain::interval(-1.0, 1.0, 8).unwrap();
    let phi = PhiFunction::linear().on(d);
    assert!(phi.eval_phi(0.5, 1.0).is_ok());
    assert!(matches!(phi.eval_phi(1.5, 1.0), Err(Error::OutsideDomain(_))));
    assert!(phi.eval_phi(0.5, -1.0).is_err());
}

#[test]
fn numeric_matches_closed_forms() {
    let x = Point::at(0.0);
    let fams = [
        PhiFunction::power_varexp(c(2.5)).unwrap(),
        PhiFunction::normalized_varexp(c(1.8)).unwrap(),
        PhiFunction::linear(),
        PhiFunction::double_phase(c(0.7)).unwrap(),
        PhiFunction::clr(c(2.0)).unwrap(),
    ];
    for phi in &fams {
        for s in [1e-3, 0.01, 0.3, 0.9, 1.7, 30.0, 1e3] {
            let a = phi.conjugate(&x, s);
            let b = phi.conjugate_numeric(&x, s);
            if a.is_infinite() {
                assert!(b.is_infinite(), "{:?} s={s}", phi.family());
            } else {
                let (a, b) = (a.value(), b.value());
                assert!((a - b).abs() <= 1e-4 * a.max(1e-300) + 1e-300, "{:?} s={s}: {a} vs {b}", phi.family());
            }
        }
    }
}

#[test]
fn recession_probe_agrees() {
    let x = Point::at(0.0);
    for phi in [
        PhiFunction::linear(),
        PhiFunction::clr(c(2.0)).unwrap(),
        PhiFunction::power_varexp(c(1.5)).unwrap(),
        PhiFunction::double_phase(c(0.1)).unwrap(),
        PhiFunction::autonomous(3.0, 1.0).unwrap(),
    ] {
        let closed = phi.recession(&x);
        let probe = legendre::recession_probe(|t| phi.value(&x, t));
        if closed.is_infinite() {
            assert!(probe.is_infinite());
        } else {
            assert!((closed.value() - probe.value()).abs() < 1e-9 * closed.value());
        }
    }
}

#[test]
fn spec_round_trip() {
    let json = r#"{"family":"normalized_varexp","p":{"kind":"log_type","c_log":1.0,"x0":0.0},"growth":{"p_inc":1.0}}"#;
    let phi = PhiSpec::from_json(json).unwrap();
    assert_eq!(phi.family(), Family::NormalizedVarExp);
    let back = serde_json::to_string(&phi.to_spec()).unwrap();
    assert_eq!(PhiSpec::from_json(&back).unwrap(), phi);
    assert!(PhiSpec::from_json(r#"{"family":"clr"}"#).is_err());
    assert!(PhiSpec::from_json(r#"{"family":"nope"}"#).is_err());
}
