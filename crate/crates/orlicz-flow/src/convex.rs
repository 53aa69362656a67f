//! Convex scalar functions: the density catalog behind dissipation
//! potentials and modulars.
//!
//! Every function here is convex, lower semicontinuous, and normalized to
//! `f(0) = 0`. Evaluation is extended-real: outside the effective domain
//! `eval` returns `+∞` and `subdifferential` returns the empty interval.
//! Subdifferentials at finite domain endpoints include the outward normal
//! cone, so `ξ ∈ ∂f(v)` queries behave correctly at constraint boundaries.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Ratio cap for the doubling probe: sampled ratios `f(2x)/f(x)` above this
/// are treated as unbounded unless the whole trace is essentially constant
/// (which happens for pure powers, whose ratio is exactly `2^p`).
pub const DELTA2_RATIO_CAP: f64 = 1e6;

/// Default scaling sequence for [`ConvexScalarFn::superlinearity_probe`].
pub const DEFAULT_THETA_SEQ: [f64; 3] = [0.1, 0.01, 0.001];

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A closed interval `[lo, hi]` of slopes; `lo > hi` encodes the empty set
/// (subdifferential outside the effective domain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubdiffInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SubdiffInterval {
    pub fn singleton(v: f64) -> Self {
        SubdiffInterval { lo: v, hi: v }
    }

    pub fn empty() -> Self {
        SubdiffInterval {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, xi: f64, tol: f64) -> bool {
        !self.is_empty() && xi >= self.lo - tol && xi <= self.hi + tol
    }

    /// Distance from `xi` to the interval (`+∞` for the empty set).
    pub fn dist(&self, xi: f64) -> f64 {
        if self.is_empty() {
            f64::INFINITY
        } else {
            (self.lo - xi).max(xi - self.hi).max(0.0)
        }
    }

    /// Element of least absolute value (used for minimal-norm selections).
    pub fn minimal_norm(&self) -> f64 {
        if self.is_empty() {
            f64::NAN
        } else {
            0.0f64.clamp(self.lo, self.hi)
        }
    }
}

/// Result of the doubling-condition probe.
#[derive(Debug, Clone)]
pub struct Delta2Report {
    pub passes: bool,
    /// Witness constant (the largest sampled ratio) when the probe passes.
    pub k: Option<f64>,
    /// Sampled ratios `f(2x)/f(x)`, `+∞` where the doubled argument left the
    /// domain; entries with `f(x) = 0` are skipped.
    pub ratio_trace: Vec<f64>,
}

/// Result of the directional superlinearity probe.
#[derive(Debug, Clone)]
pub struct SuperlinearityReport {
    pub superlinear: bool,
    /// The sampled values `θ·f(v/θ)` along the scaling sequence.
    pub trace: Vec<f64>,
}

#[derive(Clone)]
enum Kind {
    /// `coeff · |x|^p`, `p ≥ 1`. Covers `power` (coeff = 1/p), `power_raw`
    /// (coeff = 1) and `linear_abs` (p = 1, coeff = 1).
    Power { p: f64, coeff: f64 },
    /// `x·asinh(x) − √(x²+1) + 1`: superlinear with linear-times-log growth.
    BpPrimal,
    /// `cosh(x) − 1`, the convex conjugate of `BpPrimal`.
    BpDual,
    /// `x²/2` on `(−∞, 0]`, `+∞` on `(0, ∞)`: quadratic with a one-sided
    /// constraint (unidirectional rate).
    DamagePrimal,
    /// `max(−x, 0)²/2`, the conjugate of `DamagePrimal`.
    DamageDual,
    /// `0` on `[−r, r]`, `+∞` outside.
    IndicatorBall { r: f64 },
    Custom {
        value: ScalarFn,
        derivative: Option<ScalarFn>,
        domain: (f64, f64),
        even: bool,
    },
}

/// A convex scalar function from the catalog, with exact subdifferentials,
/// analytic conjugates where known, and a numeric Legendre transform.
#[derive(Clone)]
pub struct ConvexScalarFn {
    kind: Kind,
}

impl std::fmt::Debug for ConvexScalarFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ConvexScalarFn({})", self.name())
    }
}

impl ConvexScalarFn {
    /// Normalized power `|x|^p / p`, `p ≥ 1`; conjugate is `power(q)` with
    /// `1/p + 1/q = 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("power exponent {p} (need p >= 1)")));
        }
        Ok(ConvexScalarFn {
            kind: Kind::Power { p, coeff: 1.0 / p },
        })
    }

    /// Un-normalized power `|x|^p`, `p ≥ 1`.
    pub fn power_raw(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("power exponent {p} (need p >= 1)")));
        }
        Ok(ConvexScalarFn {
            kind: Kind::Power { p, coeff: 1.0 },
        })
    }

    /// `|x|`; conjugate is the indicator of the unit ball.
    pub fn linear_abs() -> Self {
        ConvexScalarFn {
            kind: Kind::Power { p: 1.0, coeff: 1.0 },
        }
    }

    pub fn bp_primal() -> Self {
        ConvexScalarFn { kind: Kind::BpPrimal }
    }

    pub fn bp_dual() -> Self {
        ConvexScalarFn { kind: Kind::BpDual }
    }

    pub fn damage_primal() -> Self {
        ConvexScalarFn {
            kind: Kind::DamagePrimal,
        }
    }

    pub fn damage_dual() -> Self {
        ConvexScalarFn {
            kind: Kind::DamageDual,
        }
    }

    pub fn indicator_ball(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("ball radius {r} (need r > 0)")));
        }
        Ok(ConvexScalarFn {
            kind: Kind::IndicatorBall { r },
        })
    }

    /// User-supplied convex function. The caller guarantees convexity; the
    /// constructor checks the normalization `value(0) = 0`, that `0` lies in
    /// the stated domain, and spot-checks nonnegativity. Evenness is probed
    /// on samples and cached (it decides whether the function qualifies as
    /// an Orlicz density).
    pub fn custom(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
        domain: (f64, f64),
    ) -> Result<Self> {
        if !(domain.0 <= 0.0 && 0.0 <= domain.1) {
            return Err(Error::Domain(format!(
                "custom domain [{}, {}] must contain 0",
                domain.0, domain.1
            )));
        }
        let f0 = value(0.0);
        if !(f0.abs() <= 1e-12) {
            return Err(Error::Domain(format!(
                "custom function must vanish at 0, got {f0}"
            )));
        }
        for s in [0.25f64, 0.5, 1.0] {
            for x in [s.min(domain.1), (-s).max(domain.0)] {
                if value(x) < -1e-12 {
                    return Err(Error::Domain(format!(
                        "custom function is negative at {x}"
                    )));
                }
            }
        }
        let even = [0.25, 0.7, 1.0]
            .iter()
            .filter(|s| **s <= domain.1 && -**s >= domain.0)
            .all(|s| {
                let (a, b) = (value(*s), value(-*s));
                (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
            });
        Ok(ConvexScalarFn {
            kind: Kind::Custom {
                value: Arc::new(value),
                derivative: derivative.map(Arc::from),
                domain,
                even,
            },
        })
    }

    /// Readable kind label for reports and the probe subcommand.
    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Power { p, coeff } => {
                if *p == 1.0 && *coeff == 1.0 {
                    "linear_abs".into()
                } else if (*coeff - 1.0 / *p).abs() <= 1e-15 / *p {
                    format!("power({p})")
                } else if *coeff == 1.0 {
                    format!("power_raw({p})")
                } else {
                    format!("scaled_power({p}, {coeff})")
                }
            }
            Kind::BpPrimal => "bp_primal".into(),
            Kind::BpDual => "bp_dual".into(),
            Kind::DamagePrimal => "damage_primal".into(),
            Kind::DamageDual => "damage_dual".into(),
            Kind::IndicatorBall { r } => format!("indicator_ball({r})"),
            Kind::Custom { .. } => "custom".into(),
        }
    }

    /// Effective domain as a closed interval (infinite endpoints allowed).
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            Kind::DamagePrimal => (f64::NEG_INFINITY, 0.0),
            Kind::IndicatorBall { r } => (-*r, *r),
            Kind::Custom { domain, .. } => *domain,
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Whether the function is even (symmetric densities are the ones that
    /// induce genuine Orlicz norms; one-sided kinds are not).
    pub fn is_even(&self) -> bool {
        match &self.kind {
            Kind::DamagePrimal | Kind::DamageDual => false,
            Kind::Custom { even, .. } => *even,
            _ => true,
        }
    }

    /// Extended-real evaluation; `+∞` outside the effective domain.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Power { p, coeff } => {
                if *p == 1.0 {
                    coeff * x.abs()
                } else {
                    coeff * x.abs().powf(*p)
                }
            }
            // x·asinh x − (√(x²+1) − 1), the second term written to avoid
            // cancellation for small x
            Kind::BpPrimal => {
                let s = (x * x + 1.0).sqrt();
                x * x.asinh() - x * x / (s + 1.0)
            }
            Kind::BpDual => {
                let s = (0.5 * x).sinh();
                2.0 * s * s
            }
            Kind::DamagePrimal => {
                if x <= 0.0 {
                    0.5 * x * x
                } else {
                    f64::INFINITY
                }
            }
            Kind::DamageDual => {
                let m = (-x).max(0.0);
                0.5 * m * m
            }
            Kind::IndicatorBall { r } => {
                if x.abs() <= *r {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::Custom { value, domain, .. } => {
                if x < domain.0 || x > domain.1 {
                    f64::INFINITY
                } else {
                    value(x)
                }
            }
        }
    }

    /// Exact subdifferential, including normal cones at finite domain
    /// endpoints. For derivative-free custom functions this is a central
    /// difference quotient (approximate, documented).
    pub fn subdifferential(&self, x: f64) -> SubdiffInterval {
        match &self.kind {
            Kind::Power { p, coeff } => {
                if *p == 1.0 {
                    if x > 0.0 {
                        SubdiffInterval::singleton(*coeff)
                    } else if x < 0.0 {
                        SubdiffInterval::singleton(-*coeff)
                    } else {
                        SubdiffInterval {
                            lo: -*coeff,
                            hi: *coeff,
                        }
                    }
                } else {
                    let m = coeff * p * x.abs().powf(*p - 1.0);
                    SubdiffInterval::singleton(if x < 0.0 { -m } else { m })
                }
            }
            Kind::BpPrimal => SubdiffInterval::singleton(x.asinh()),
            Kind::BpDual => SubdiffInterval::singleton(x.sinh()),
            Kind::DamagePrimal => {
                if x < 0.0 {
                    SubdiffInterval::singleton(x)
                } else if x == 0.0 {
                    SubdiffInterval {
                        lo: 0.0,
                        hi: f64::INFINITY,
                    }
                } else {
                    SubdiffInterval::empty()
                }
            }
            Kind::DamageDual => SubdiffInterval::singleton(x.min(0.0)),
            Kind::IndicatorBall { r } => {
                if x.abs() < *r {
                    SubdiffInterval::singleton(0.0)
                } else if x == *r {
                    SubdiffInterval {
                        lo: 0.0,
                        hi: f64::INFINITY,
                    }
                } else if x == -*r {
                    SubdiffInterval {
                        lo: f64::NEG_INFINITY,
                        hi: 0.0,
                    }
                } else {
                    SubdiffInterval::empty()
                }
            }
            Kind::Custom {
                value,
                derivative,
                domain,
                ..
            } => {
                if x < domain.0 || x > domain.1 {
                    return SubdiffInterval::empty();
                }
                let slope = match derivative {
                    Some(d) => d(x),
                    None => {
                        let h = 1e-6 * x.abs().max(1.0);
                        let (a, b) = ((x - h).max(domain.0), (x + h).min(domain.1));
                        (value(b) - value(a)) / (b - a)
                    }
                };
                if x == domain.1 && domain.1.is_finite() {
                    SubdiffInterval {
                        lo: slope,
                        hi: f64::INFINITY,
                    }
                } else if x == domain.0 && domain.0.is_finite() {
                    SubdiffInterval {
                        lo: f64::NEG_INFINITY,
                        hi: slope,
                    }
                } else {
                    SubdiffInterval::singleton(slope)
                }
            }
        }
    }

    /// Second derivative where it exists and is finite (used by the Newton
    /// acceleration in the step solver).
    pub(crate) fn second_derivative(&self, x: f64) -> Option<f64> {
        match &self.kind {
            Kind::Power { p, coeff } => {
                if *p == 1.0 {
                    (x != 0.0).then_some(0.0)
                } else if *p == 2.0 {
                    Some(2.0 * coeff)
                } else if *p > 2.0 || x != 0.0 {
                    Some(coeff * p * (*p - 1.0) * x.abs().powf(*p - 2.0))
                } else {
                    None
                }
            }
            Kind::BpPrimal => Some(1.0 / (x * x + 1.0).sqrt()),
            Kind::BpDual => Some(x.cosh()),
            Kind::DamagePrimal => (x < 0.0).then_some(1.0),
            Kind::DamageDual => {
                if x < 0.0 {
                    Some(1.0)
                } else if x > 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            Kind::IndicatorBall { r } => (x.abs() < *r).then_some(0.0),
            Kind::Custom { .. } => None,
        }
    }

    /// Analytic convex conjugate for catalog kinds; custom functions get a
    /// numeric wrapper built on [`Self::legendre_numeric`].
    pub fn conjugate(&self) -> Result<ConvexScalarFn> {
        if !self.eval(0.0).is_finite() {
            return Err(Error::Domain("conjugate of a non-proper function".into()));
        }
        let kind = match &self.kind {
            Kind::Power { p, coeff } => {
                if *p == 1.0 {
                    Kind::IndicatorBall { r: *coeff }
                } else {
                    let q = p / (p - 1.0);
                    let cq = (coeff * p).powf(1.0 - q) / q;
                    Kind::Power { p: q, coeff: cq }
                }
            }
            Kind::BpPrimal => Kind::BpDual,
            Kind::BpDual => Kind::BpPrimal,
            Kind::DamagePrimal => Kind::DamageDual,
            Kind::DamageDual => Kind::DamagePrimal,
            Kind::IndicatorBall { r } => Kind::Power { p: 1.0, coeff: *r },
            Kind::Custom { even, .. } => {
                let inner = self.clone();
                Kind::Custom {
                    value: Arc::new(move |xi: f64| {
                        inner
                            .legendre_numeric(xi, (-1.0, 1.0), 1e-10)
                            .unwrap_or(f64::NAN)
                    }),
                    derivative: None,
                    domain: (f64::NEG_INFINITY, f64::INFINITY),
                    even: *even,
                }
            }
        };
        Ok(ConvexScalarFn { kind })
    }

    /// Numeric Legendre transform `sup_v (ξv − f(v))`.
    ///
    /// The initial bracket is intersected with the domain and doubled (up to
    /// 60 times) until the supremum is interior; an unbounded sup is
    /// certified as `+∞` when the tilted objective still climbs at the final
    /// bracket edge with slope above `tol`. Kinds with exact subdifferentials
    /// use bisection on `ξ ∈ ∂f(v)`; derivative-free custom functions use
    /// golden-section search.
    pub fn legendre_numeric(&self, xi: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::Domain(format!("legendre tolerance {tol}")));
        }
        if !xi.is_finite() {
            return Err(Error::Domain(format!("legendre tilt {xi}")));
        }
        if !(bracket.0 < bracket.1) {
            return Err(Error::Domain(format!(
                "legendre bracket [{}, {}]",
                bracket.0, bracket.1
            )));
        }
        let (dlo, dhi) = self.domain();
        let mut lo = bracket.0.max(dlo);
        let mut hi = bracket.1.min(dhi);
        if !(lo <= hi) {
            // the caller's bracket misses the domain entirely; restart on it
            lo = dlo.max(-1.0);
            hi = dhi.min(1.0);
            if !(lo <= hi) {
                return Err(Error::Domain("bracket does not meet the domain".into()));
            }
        }
        let exact_slopes = !matches!(
            &self.kind,
            Kind::Custom {
                derivative: None,
                ..
            }
        );
        if exact_slopes {
            self.legendre_bisect(xi, lo, hi, tol)
        } else {
            self.legendre_golden(xi, lo, hi, tol)
        }
    }

    fn legendre_bisect(&self, xi: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        let (dlo, dhi) = self.domain();
        let mut width = (hi - lo).max(tol).max(1e-8);
        for _ in 0..60 {
            let s = self.subdifferential(hi);
            if s.hi < xi && hi < dhi {
                hi = (hi + width).min(dhi);
                width *= 2.0;
            } else {
                break;
            }
        }
        let s = self.subdifferential(hi);
        if s.hi < xi {
            // still climbing after 60 doublings
            if xi - s.hi > tol {
                return Ok(f64::INFINITY);
            }
            return Ok(xi * hi - self.eval(hi));
        }
        let mut width = (hi - lo).max(tol).max(1e-8);
        for _ in 0..60 {
            let s = self.subdifferential(lo);
            if s.lo > xi && lo > dlo {
                lo = (lo - width).max(dlo);
                width *= 2.0;
            } else {
                break;
            }
        }
        let s = self.subdifferential(lo);
        if s.lo > xi {
            if s.lo - xi > tol {
                return Ok(f64::INFINITY);
            }
            return Ok(xi * lo - self.eval(lo));
        }
        // invariant: the maximizer lies in [lo, hi]
        for _ in 0..500 {
            if hi - lo <= tol * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let s = self.subdifferential(mid);
            if s.hi < xi {
                lo = mid;
            } else if s.lo > xi {
                hi = mid;
            } else {
                lo = mid;
                hi = mid;
            }
        }
        if hi - lo > tol * hi.abs().max(lo.abs()).max(1.0) {
            let v = 0.5 * (lo + hi);
            return Err(Error::Numeric(format!(
                "legendre bisection stalled at width {:.3e}, best value {:.17e}",
                hi - lo,
                xi * v - self.eval(v)
            )));
        }
        // take the best of midpoint and endpoints: when the supremum sits at
        // a domain edge, the endpoint value is exact while the midpoint
        // approaches it from inside
        let tilted = |v: f64| {
            let fv = self.eval(v);
            if fv.is_finite() {
                xi * v - fv
            } else {
                f64::NEG_INFINITY
            }
        };
        Ok(tilted(0.5 * (lo + hi)).max(tilted(lo)).max(tilted(hi)))
    }

    fn legendre_golden(&self, xi: f64, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
        let h = |v: f64| {
            let fv = self.eval(v);
            if fv.is_finite() {
                xi * v - fv
            } else {
                f64::NEG_INFINITY
            }
        };
        let (dlo, dhi) = self.domain();
        let mut w = (b - a).max(1.0);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if h(b) >= h(m) && b < dhi {
                b = (b + w).min(dhi);
                w *= 2.0;
            } else if h(a) >= h(m) && a > dlo {
                a = (a - w).max(dlo);
                w *= 2.0;
            } else {
                break;
            }
        }
        let m = 0.5 * (a + b);
        if h(b) >= h(m) && b < dhi && (h(b) - h(m)) / (b - m).max(f64::MIN_POSITIVE) > tol {
            return Ok(f64::INFINITY);
        }
        if h(a) >= h(m) && a > dlo && (h(a) - h(m)) / (m - a).max(f64::MIN_POSITIVE) > tol {
            return Ok(f64::INFINITY);
        }
        const INVPHI: f64 = 0.618_033_988_749_894_9;
        let mut x1 = b - INVPHI * (b - a);
        let mut x2 = a + INVPHI * (b - a);
        let mut f1 = h(x1);
        let mut f2 = h(x2);
        for _ in 0..500 {
            if b - a <= tol * a.abs().max(b.abs()).max(1.0) {
                break;
            }
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + INVPHI * (b - a);
                f2 = h(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - INVPHI * (b - a);
                f1 = h(x1);
            }
        }
        Ok(h(0.5 * (a + b)).max(f1).max(f2))
    }

    /// Sampled doubling-condition check: records `f(2x)/f(x)` on the given
    /// positive samples. Fails when a doubled argument leaves the domain or
    /// the ratios grow past [`DELTA2_RATIO_CAP`] without being constant;
    /// otherwise passes with witness `k = max ratio`. Diagnostic only — the
    /// genuine condition is asymptotic and not decidable from samples.
    pub fn delta2_probe(&self, samples: &[f64]) -> Result<Delta2Report> {
        let mut trace = Vec::new();
        for &x in samples {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::Domain(format!("doubling probe sample {x}")));
            }
            let f1 = self.eval(x);
            if !f1.is_finite() {
                return Err(Error::Domain(format!(
                    "doubling probe sample {x} outside the domain"
                )));
            }
            let f2 = self.eval(2.0 * x);
            if f2.is_infinite() {
                trace.push(f64::INFINITY);
            } else if f1 > 0.0 {
                trace.push(f2 / f1);
            }
        }
        let (passes, k) = if trace.iter().any(|r| r.is_infinite()) {
            (false, None)
        } else if trace.is_empty() {
            (true, None)
        } else {
            let mx = trace.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mn = trace.iter().cloned().fold(f64::INFINITY, f64::min);
            if mx <= DELTA2_RATIO_CAP || mx <= 2.0 * mn {
                (true, Some(mx))
            } else {
                (false, None)
            }
        };
        Ok(Delta2Report {
            passes,
            k,
            ratio_trace: trace,
        })
    }

    /// Directional superlinearity probe: samples `θ·f(v/θ)` along a strictly
    /// decreasing positive sequence and reports whether the values diverge
    /// (any `+∞`, or strict growth throughout the trace).
    pub fn superlinearity_probe(&self, v: f64, theta_seq: &[f64]) -> Result<SuperlinearityReport> {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Domain(format!("superlinearity direction {v}")));
        }
        if theta_seq.is_empty() {
            return Err(Error::Domain("empty scaling sequence".into()));
        }
        for w in theta_seq.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::Domain(
                    "scaling sequence must be strictly decreasing".into(),
                ));
            }
        }
        if !(theta_seq[theta_seq.len() - 1] > 0.0) {
            return Err(Error::Domain("scaling sequence must be positive".into()));
        }
        let trace: Vec<f64> = theta_seq.iter().map(|&th| th * self.eval(v / th)).collect();
        let superlinear = trace.iter().any(|x| x.is_infinite())
            || (trace.len() >= 2
                && trace[0] > 0.0
                && trace.windows(2).all(|w| w[1] >= w[0] * (1.0 + 1e-9)));
        Ok(SuperlinearityReport { superlinear, trace })
    }

    /// `min(f(r), f(−r))` for `r > 0`: the sampled coercivity floor in the
    /// weaker of the two directions.
    pub fn coercivity_probe(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("coercivity radius {r}")));
        }
        Ok(self.eval(r).min(self.eval(-r)))
    }

    /// Whether `r ↦ f(rv)` is differentiable at `r = 1`: true when the
    /// subdifferential at `v` is a singleton and scaling slightly past `v`
    /// stays inside the domain. The `v = 0` ray is constant, hence smooth.
    pub fn ray_smooth_at_one(&self, v: f64) -> bool {
        if v == 0.0 {
            return true;
        }
        let s = self.subdifferential(v);
        if s.is_empty() {
            return false;
        }
        let (dlo, dhi) = self.domain();
        let vplus = v * (1.0 + 1e-9);
        if vplus < dlo || vplus > dhi {
            return false;
        }
        s.hi - s.lo <= 1e-12 * s.hi.abs().max(1.0)
    }
}
