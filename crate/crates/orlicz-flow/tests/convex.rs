use orlicz_flow::convex::ConvexScalarFn;
use orlicz_flow::Error;

// Reference values computed with 30-digit arithmetic and frozen here.
const COSH1_M1: f64 = 0.5430806348152438; // cosh(1) - 1
const SINH1: f64 = 1.1752011936438014;
const ASINH1: f64 = 0.881373587019543;
const BP_AT_1: f64 = 0.467160024646448; // 1*asinh(1) - sqrt(2) + 1
const BP_AT_2: f64 = 1.651202972857831; // 2*asinh(2) - sqrt(5) + 1
const COSH2_M1: f64 = 2.7621956910836314;

const D2_BP_DUAL_5: f64 = 150.4198970495757; // (cosh 10 - 1)/(cosh 5 - 1)
const D2_BP_DUAL_10: f64 = 22028.465840206646;
const D2_BP_DUAL_20: f64 = 485165197.4097901;

fn close(a: f64, b: f64, tol: f64) {
    assert!(
        (a - b).abs() <= tol * b.abs().max(1.0),
        "{a} vs {b} (tol {tol})"
    );
}

#[test]
fn power_values_and_slopes() {
    let f = ConvexScalarFn::power(2.0).unwrap();
    assert_eq!(f.eval(3.0), 4.5); // |x|^p / p
    assert_eq!(f.eval(-3.0), 4.5);
    let s = f.subdifferential(3.0);
    assert_eq!((s.lo, s.hi), (3.0, 3.0));

    let raw = ConvexScalarFn::power_raw(2.0).unwrap();
    assert_eq!(raw.eval(3.0), 9.0);
    assert_eq!(raw.subdifferential(-2.0).lo, -4.0);

    let f15 = ConvexScalarFn::power(1.5).unwrap();
    close(f15.eval(4.0), 8.0 / 1.5, 1e-15);
    // slope |x|^{p-1} sgn x is continuous at 0 for p > 1
    let s0 = f15.subdifferential(0.0);
    assert_eq!((s0.lo, s0.hi), (0.0, 0.0));

    assert!(matches!(
        ConvexScalarFn::power(0.5),
        Err(Error::Domain(_))
    ));
}

#[test]
fn linear_abs_kink() {
    let f = ConvexScalarFn::linear_abs();
    assert_eq!(f.eval(-2.5), 2.5);
    let s = f.subdifferential(0.0);
    assert_eq!((s.lo, s.hi), (-1.0, 1.0));
    assert_eq!(f.subdifferential(0.5).lo, 1.0);
}

#[test]
fn bp_pair_values() {
    let p = ConvexScalarFn::bp_primal();
    let d = ConvexScalarFn::bp_dual();
    close(p.eval(1.0), BP_AT_1, 1e-14);
    close(p.eval(-1.0), BP_AT_1, 1e-14);
    close(p.eval(2.0), BP_AT_2, 1e-14);
    close(d.eval(1.0), COSH1_M1, 1e-14);
    close(p.subdifferential(1.0).lo, ASINH1, 1e-14);
    close(d.subdifferential(1.0).lo, SINH1, 1e-14);
    // small-argument accuracy: psi(x) ~ x^2/2, cosh(x)-1 ~ x^2/2
    assert!((p.eval(1e-8) - 0.5e-16).abs() <= 1e-22);
    assert!((d.eval(1e-8) - 0.5e-16).abs() <= 1e-22);
    assert_eq!(p.eval(0.0), 0.0);
    assert_eq!(d.eval(0.0), 0.0);
}

#[test]
fn damage_pair() {
    let p = ConvexScalarFn::damage_primal();
    assert_eq!(p.eval(-2.0), 2.0);
    assert_eq!(p.eval(0.0), 0.0);
    assert_eq!(p.eval(1e-9), f64::INFINITY);
    let at0 = p.subdifferential(0.0);
    assert_eq!(at0.lo, 0.0);
    assert_eq!(at0.hi, f64::INFINITY);
    assert!(p.subdifferential(1.0).is_empty());
    assert_eq!(p.subdifferential(-3.0).lo, -3.0);

    let d = ConvexScalarFn::damage_dual();
    assert_eq!(d.eval(-3.0), 4.5);
    assert_eq!(d.eval(2.0), 0.0);
    assert_eq!(d.subdifferential(-3.0).lo, -3.0);
    assert_eq!(d.subdifferential(2.0).lo, 0.0);
    // the dual is C^1: slope 0 from both sides at 0
    let s0 = d.subdifferential(0.0);
    assert_eq!((s0.lo, s0.hi), (0.0, 0.0));
}

#[test]
fn indicator_ball() {
    let f = ConvexScalarFn::indicator_ball(1.0).unwrap();
    assert_eq!(f.eval(0.3), 0.0);
    assert_eq!(f.eval(-1.0), 0.0);
    assert_eq!(f.eval(1.0000001), f64::INFINITY);
    assert_eq!(f.subdifferential(0.3).lo, 0.0);
    let top = f.subdifferential(1.0);
    assert_eq!(top.lo, 0.0);
    assert_eq!(top.hi, f64::INFINITY);
    let bot = f.subdifferential(-1.0);
    assert_eq!(bot.lo, f64::NEG_INFINITY);
    assert_eq!(bot.hi, 0.0);
    assert!(f.subdifferential(2.0).is_empty());
}

#[test]
fn analytic_conjugates() {
    // power(p)* = power(q), 1/p + 1/q = 1
    let f = ConvexScalarFn::power(1.5).unwrap();
    let g = f.conjugate().unwrap();
    close(g.eval(1.2), 1.2f64.powi(3) / 3.0, 1e-14);
    // self-dual normalized quadratic
    let q = ConvexScalarFn::power(2.0).unwrap().conjugate().unwrap();
    assert_eq!(q.eval(3.0), 4.5);
    // raw quadratic: (x^2)* = xi^2/4
    let r = ConvexScalarFn::power_raw(2.0).unwrap().conjugate().unwrap();
    close(r.eval(2.0), 1.0, 1e-14);
    close(r.eval(3.0), 2.25, 1e-14);
    // |x| <-> indicator of the unit ball
    let ind = ConvexScalarFn::linear_abs().conjugate().unwrap();
    assert_eq!(ind.eval(0.9), 0.0);
    assert_eq!(ind.eval(1.1), f64::INFINITY);
    let back = ind.conjugate().unwrap();
    assert_eq!(back.eval(-2.0), 2.0);
    // scaled ball radius
    let lin = ConvexScalarFn::indicator_ball(2.0).unwrap().conjugate().unwrap();
    assert_eq!(lin.eval(3.0), 6.0);
    // cosh-kind pair
    let bd = ConvexScalarFn::bp_primal().conjugate().unwrap();
    close(bd.eval(1.0), COSH1_M1, 1e-14);
    let bp = ConvexScalarFn::bp_dual().conjugate().unwrap();
    close(bp.eval(2.0), BP_AT_2, 1e-14);
    // damage pair both ways
    let dd = ConvexScalarFn::damage_primal().conjugate().unwrap();
    assert_eq!(dd.eval(-3.0), 4.5);
    assert_eq!(dd.eval(5.0), 0.0);
    let dp = ConvexScalarFn::damage_dual().conjugate().unwrap();
    assert_eq!(dp.eval(-2.0), 2.0);
    assert_eq!(dp.eval(0.1), f64::INFINITY);
    // double conjugation returns to the start on sample points
    let f2 = ConvexScalarFn::power(1.5).unwrap();
    let back2 = f2.conjugate().unwrap().conjugate().unwrap();
    for x in [-2.0, -0.3, 0.0, 0.7, 1.9] {
        close(back2.eval(x), f2.eval(x), 1e-14);
    }
}

#[test]
fn numeric_legendre_matches_analytic() {
    let tol = 1e-10;
    let bp = ConvexScalarFn::bp_primal();
    close(
        bp.legendre_numeric(2.0, (-1.0, 1.0), tol).unwrap(),
        COSH2_M1,
        1e-9,
    );
    close(
        bp.legendre_numeric(-1.0, (-1.0, 1.0), tol).unwrap(),
        COSH1_M1,
        1e-9,
    );
    let p2 = ConvexScalarFn::power(2.0).unwrap();
    close(p2.legendre_numeric(3.0, (-1.0, 1.0), tol).unwrap(), 4.5, 1e-9);
    let dmg = ConvexScalarFn::damage_primal();
    close(
        dmg.legendre_numeric(-2.0, (-1.0, 1.0), tol).unwrap(),
        2.0,
        1e-9,
    );
    let v = dmg.legendre_numeric(3.0, (-1.0, 1.0), tol).unwrap();
    assert!(v.abs() <= 1e-9);
    // bounded conjugate domain: slope saturates at +-1
    let la = ConvexScalarFn::linear_abs();
    assert!(la.legendre_numeric(0.5, (-1.0, 1.0), tol).unwrap().abs() <= 1e-9);
    assert_eq!(
        la.legendre_numeric(2.0, (-1.0, 1.0), tol).unwrap(),
        f64::INFINITY
    );
    // indicator: support function r|xi|
    let ind = ConvexScalarFn::indicator_ball(1.0).unwrap();
    close(
        ind.legendre_numeric(-4.0, (-1.0, 1.0), tol).unwrap(),
        4.0,
        1e-9,
    );
    assert!(matches!(
        bp.legendre_numeric(1.0, (-1.0, 1.0), 0.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn numeric_legendre_custom() {
    // f = x^4/4, f* = (3/4)|xi|^{4/3}; with and without a supplied derivative
    let with_d = ConvexScalarFn::custom(
        |x| 0.25 * x.powi(4),
        Some(Box::new(|x: f64| x.powi(3))),
        (f64::NEG_INFINITY, f64::INFINITY),
    )
    .unwrap();
    let exact = 0.75 * 8.0f64.powf(4.0 / 3.0);
    close(
        with_d.legendre_numeric(8.0, (-1.0, 1.0), 1e-10).unwrap(),
        exact,
        1e-9,
    );
    let no_d = ConvexScalarFn::custom(
        |x| 0.25 * x.powi(4),
        None,
        (f64::NEG_INFINITY, f64::INFINITY),
    )
    .unwrap();
    close(
        no_d.legendre_numeric(8.0, (-1.0, 1.0), 1e-10).unwrap(),
        exact,
        1e-6,
    );
}

#[test]
fn conjugate_of_custom_is_numeric() {
    let f = ConvexScalarFn::custom(
        |x| 0.25 * x.powi(4),
        Some(Box::new(|x: f64| x.powi(3))),
        (f64::NEG_INFINITY, f64::INFINITY),
    )
    .unwrap();
    let g = f.conjugate().unwrap();
    close(g.eval(8.0), 0.75 * 8.0f64.powf(4.0 / 3.0), 1e-8);
    assert!(g.eval(0.0).abs() <= 1e-12);
}

#[test]
fn delta2_probe_discriminates() {
    let samples = [0.5, 1.0, 2.0, 5.0];
    let p2 = ConvexScalarFn::power(2.0).unwrap();
    let r = p2.delta2_probe(&samples).unwrap();
    assert!(r.passes);
    close(r.k.unwrap(), 4.0, 1e-9);

    let p3 = ConvexScalarFn::power(3.0).unwrap();
    close(p3.delta2_probe(&samples).unwrap().k.unwrap(), 8.0, 1e-9);

    let la = ConvexScalarFn::linear_abs();
    close(la.delta2_probe(&samples).unwrap().k.unwrap(), 2.0, 1e-9);

    let bd = ConvexScalarFn::bp_dual();
    let r = bd.delta2_probe(&[5.0, 10.0, 20.0]).unwrap();
    assert!(!r.passes);
    assert!(r.k.is_none());
    close(r.ratio_trace[0], D2_BP_DUAL_5, 1e-12);
    close(r.ratio_trace[1], D2_BP_DUAL_10, 1e-12);
    close(r.ratio_trace[2], D2_BP_DUAL_20, 1e-12);
    assert!(r.ratio_trace[2] > 1e6);

    // bounded ratios for the primal cosh-conjugate kind
    let bp = ConvexScalarFn::bp_primal();
    let r = bp.delta2_probe(&[0.5, 1.0, 5.0, 10.0, 50.0]).unwrap();
    assert!(r.passes, "trace {:?}", r.ratio_trace);

    // indicator: doubling exits the ball -> infinite ratio recorded
    let ind = ConvexScalarFn::indicator_ball(1.0).unwrap();
    let r = ind.delta2_probe(&[0.3, 0.6]).unwrap();
    assert!(!r.passes);
    assert!(r.ratio_trace.iter().any(|x| x.is_infinite()));

    assert!(matches!(
        p2.delta2_probe(&[1.0, -1.0]),
        Err(Error::Domain(_))
    ));
}

#[test]
fn superlinearity_probe_discriminates() {
    let theta = [0.1, 0.01, 0.001];
    let sup = |f: &ConvexScalarFn, v: f64| f.superlinearity_probe(v, &theta).unwrap().superlinear;
    assert!(sup(&ConvexScalarFn::power(2.0).unwrap(), 1.0));
    assert!(sup(&ConvexScalarFn::power(1.1).unwrap(), -1.0));
    assert!(sup(&ConvexScalarFn::bp_primal(), 1.0));
    assert!(sup(&ConvexScalarFn::bp_dual(), 2.0));
    assert!(sup(&ConvexScalarFn::damage_primal(), -1.0));
    assert!(sup(&ConvexScalarFn::indicator_ball(1.0).unwrap(), 1.0));
    assert!(!sup(&ConvexScalarFn::linear_abs(), 1.0));
    assert!(matches!(
        ConvexScalarFn::linear_abs().superlinearity_probe(0.0, &theta),
        Err(Error::Domain(_))
    ));
}

#[test]
fn coercivity_probe_values() {
    let p2 = ConvexScalarFn::power(2.0).unwrap();
    assert_eq!(p2.coercivity_probe(2.0).unwrap(), 2.0);
    assert_eq!(ConvexScalarFn::linear_abs().coercivity_probe(3.0).unwrap(), 3.0);
    // one-sided kind: the weak side governs
    assert_eq!(
        ConvexScalarFn::damage_primal().coercivity_probe(1.0).unwrap(),
        0.5
    );
    assert_eq!(
        ConvexScalarFn::damage_dual().coercivity_probe(1.0).unwrap(),
        0.0
    );
}

#[test]
fn ray_smoothness() {
    for v in [-2.0, -0.5, 0.7, 1.3] {
        assert!(ConvexScalarFn::bp_primal().ray_smooth_at_one(v));
        assert!(ConvexScalarFn::power(1.5).unwrap().ray_smooth_at_one(v));
        assert!(ConvexScalarFn::power(3.0).unwrap().ray_smooth_at_one(v));
    }
    // domain boundary: scaling past r = 1 leaves dom, the probe reports the kink
    assert!(!ConvexScalarFn::indicator_ball(1.0).unwrap().ray_smooth_at_one(1.0));
    // constraint kink at the domain edge shows up in the subdifferential
    let s = ConvexScalarFn::damage_primal().subdifferential(0.0);
    assert_eq!((s.lo, s.hi), (0.0, f64::INFINITY));
    // the v = 0 ray is constant, hence trivially smooth
    assert!(ConvexScalarFn::linear_abs().ray_smooth_at_one(0.0));
}

#[test]
fn monotone_slopes_sampled() {
    for f in [
        ConvexScalarFn::power(1.5).unwrap(),
        ConvexScalarFn::power(2.0).unwrap(),
        ConvexScalarFn::bp_primal(),
        ConvexScalarFn::bp_dual(),
        ConvexScalarFn::linear_abs(),
        ConvexScalarFn::damage_dual(),
    ] {
        let xs = [-3.0, -1.0, -0.25, 0.0, 0.25, 1.0, 3.0];
        for w in xs.windows(2) {
            let a = f.subdifferential(w[0]);
            let b = f.subdifferential(w[1]);
            assert!(a.hi <= b.lo + 1e-12, "{}: {:?} {:?}", f.name(), w, (a.hi, b.lo));
        }
    }
}

#[test]
fn custom_requires_normalization() {
    assert!(matches!(
        ConvexScalarFn::custom(|x| x * x + 1.0, None, (f64::NEG_INFINITY, f64::INFINITY)),
        Err(Error::Domain(_))
    ));
}
