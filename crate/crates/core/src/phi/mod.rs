//! Φ-function families and their pointwise calculus.
//!
//! Every family is convex and left-continuous in `t` with `φ(x, 0) = 0`.
//! Closed forms are used for the conjugate `φ*` and the recession function
//! `φ'_∞` wherever the family admits them; [`legendre`] holds the generic
//! numerical routes, which double as independent checks of the closed forms.

pub mod legendre;
mod spec;

pub use spec::{GrowthSpec, PhiSpec, SCHEMA_VERSION};

use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::field::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Linear,
    PowerVarExp,
    NormalizedVarExp,
    Clr,
    DoublePhase,
    Autonomous,
    TabulatedConvex,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::PowerVarExp => "power_varexp",
            Family::NormalizedVarExp => "normalized_varexp",
            Family::Clr => "clr",
            Family::DoublePhase => "double_phase",
            Family::Autonomous => "autonomous",
            Family::TabulatedConvex => "tabulated",
        }
    }
}

/// Declared growth metadata: `(aInc)_p` with constant `L_p`, `(aDec)_q` with `L_q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Growth {
    pub p_inc: Option<f64>,
    pub q_dec: Option<f64>,
    pub l_p: f64,
    pub l_q: f64,
}

impl Default for Growth {
    fn default() -> Self {
        Growth { p_inc: None, q_dec: None, l_p: 1.0, l_q: 1.0 }
    }
}

/// Piecewise-linear convex profile through `(t_j, v_j)` with `t_0 = v_0 = 0`,
/// continued past the last node with the last slope.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    t: Vec<f64>,
    v: Vec<f64>,
    slopes: Vec<f64>,
}

impl Table {
    pub const CONVEXITY_TOL: f64 = 1e-9;

    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() || t.len() < 2 {
            return Err(Error::Input("tabulated profile needs ≥ 2 matching (t, φ) samples".into()));
        }
        if t[0] != 0.0 || v[0] != 0.0 {
            return Err(Error::Input("tabulated profile must start at (0, 0)".into()));
        }
        let mut slopes = Vec::with_capacity(t.len() - 1);
        for j in 1..t.len() {
            if !(t[j] > t[j - 1]) {
                return Err(Error::Input("tabulated nodes must be strictly increasing".into()));
            }
            slopes.push((v[j] - v[j - 1]) / (t[j] - t[j - 1]));
        }
        if slopes[0] < -Self::CONVEXITY_TOL {
            return Err(Error::Input("tabulated profile must be increasing".into()));
        }
        let scale = slopes.iter().fold(1.0f64, |m, s| m.max(s.abs()));
        if slopes.windows(2).any(|w| w[1] - w[0] < -Self::CONVEXITY_TOL * scale) {
            return Err(Error::Input("tabulated profile is not convex".into()));
        }
        Ok(Table { t, v, slopes })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.t, &self.v)
    }

    fn segment(&self, t: f64) -> usize {
        // index j of the slope used on (t_j, t_{j+1}]
        match self.t.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(k) => k.saturating_sub(1),
            Err(k) => k.saturating_sub(1),
        }
        .min(self.slopes.len() - 1)
    }

    fn value(&self, t: f64) -> f64 {
        let j = self.segment(t);
        self.v[j] + self.slopes[j] * (t - self.t[j])
    }

    fn left_derivative(&self, t: f64) -> f64 {
        self.slopes[self.segment(t)]
    }

    fn last_slope(&self) -> f64 {
        *self.slopes.last().unwrap()
    }

    /// Exact Legendre transform of the interpolant: the supremum sits at the
    /// node where the slopes straddle `s`.
    fn conjugate(&self, s: f64) -> ExtReal {
        let last = self.last_slope();
        if s > last {
            return ExtReal::INFINITY;
        }
        let k = self.slopes.partition_point(|&m| m <= s);
        ExtReal::new(s * self.t[k] - self.v[k])
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Linear,
    PowerVarExp(ScalarField),
    NormalizedVarExp(ScalarField),
    Clr(ScalarField),
    DoublePhase(ScalarField),
    Autonomous { coef: f64, exponent: f64 },
    Tabulated(Table),
}

/// An `x`-dependent convex Φ-function.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiFunction {
    kind: Kind,
    growth: Growth,
    domain: Option<Domain>,
}

fn check_exponent(p: &ScalarField) -> Result<()> {
    p.validate()?;
    if p.min_value() < 1.0 {
        return Err(Error::Input("exponent field must satisfy p(x) ≥ 1".into()));
    }
    Ok(())
}

impl PhiFunction {
    fn from_kind(kind: Kind) -> Self {
        PhiFunction { kind, growth: Growth::default(), domain: None }
    }

    pub fn linear() -> Self {
        Self::from_kind(Kind::Linear)
    }

    /// `t^{p(x)}`.
    pub fn power_varexp(p: ScalarField) -> Result<Self> {
        check_exponent(&p)?;
        Ok(Self::from_kind(Kind::PowerVarExp(p)))
    }

    /// `t^{p(x)} / p(x)`.
    pub fn normalized_varexp(p: ScalarField) -> Result<Self> {
        check_exponent(&p)?;
        Ok(Self::from_kind(Kind::NormalizedVarExp(p)))
    }

    /// `t^{p(x)}/p(x)` on `[0, 1]`, `t − 1 + 1/p(x)` beyond.
    pub fn clr(p: ScalarField) -> Result<Self> {
        check_exponent(&p)?;
        Ok(Self::from_kind(Kind::Clr(p)))
    }

    /// `t + a(x) t²`.
    pub fn double_phase(a: ScalarField) -> Result<Self> {
        a.validate()?;
        if a.min_value() < 0.0 {
            return Err(Error::Input("double-phase weight must satisfy a(x) ≥ 0".into()));
        }
        Ok(Self::from_kind(Kind::DoublePhase(a)))
    }

    /// `coef · t^exponent`, independent of `x`.
    pub fn autonomous(coef: f64, exponent: f64) -> Result<Self> {
        if !(coef > 0.0 && coef.is_finite() && exponent >= 1.0 && exponent.is_finite()) {
            return Err(Error::Input("autonomous profile needs coef > 0 and exponent ≥ 1".into()));
        }
        Ok(Self::from_kind(Kind::Autonomous { coef, exponent }))
    }

    pub fn tabulated(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Ok(Self::from_kind(Kind::Tabulated(Table::new(t, v)?)))
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }

    /// Attach a domain; checked evaluations then reject points outside it.
    pub fn on(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn family(&self) -> Family {
        match &self.kind {
            Kind::Linear => Family::Linear,
            Kind::PowerVarExp(_) => Family::PowerVarExp,
            Kind::NormalizedVarExp(_) => Family::NormalizedVarExp,
            Kind::Clr(_) => Family::Clr,
            Kind::DoublePhase(_) => Family::DoublePhase,
            Kind::Autonomous { .. } => Family::Autonomous,
            Kind::Tabulated(_) => Family::TabulatedConvex,
        }
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    /// The exponent field, for the variable-exponent families.
    pub fn exponent(&self) -> Option<&ScalarField> {
        match &self.kind {
            Kind::PowerVarExp(p) | Kind::NormalizedVarExp(p) | Kind::Clr(p) => Some(p),
            _ => None,
        }
    }

    pub fn weight(&self) -> Option<&ScalarField> {
        match &self.kind {
            Kind::DoublePhase(a) => Some(a),
            _ => None,
        }
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.kind {
            Kind::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_autonomous(&self) -> bool {
        match &self.kind {
            Kind::Linear | Kind::Autonomous { .. } | Kind::Tabulated(_) => true,
            Kind::PowerVarExp(f) | Kind::NormalizedVarExp(f) | Kind::Clr(f) | Kind::DoublePhase(f) => f.is_constant(),
        }
    }

    /// First-axis points where the coefficient fields are singular.
    pub fn singular_points(&self) -> Vec<f64> {
        match &self.kind {
            Kind::PowerVarExp(f) | Kind::NormalizedVarExp(f) | Kind::Clr(f) | Kind::DoublePhase(f) => f.singular_points(),
            _ => Vec::new(),
        }
    }

    /// Subset of [`Self::singular_points`] that needs radial quadrature.
    pub fn radial_points(&self) -> Vec<f64> {
        match &self.kind {
            Kind::PowerVarExp(f) | Kind::NormalizedVarExp(f) | Kind::Clr(f) | Kind::DoublePhase(f) => f.radial_points(),
            _ => Vec::new(),
        }
    }

    /// Conjugates and recession functions are available in closed form for
    /// every built-in family.
    pub fn has_closed_conjugate(&self) -> bool {
        true
    }

    fn check(&self, p: &Point) -> Result<()> {
        match &self.domain {
            Some(d) => d.check(p),
            None => Ok(()),
        }
    }

    /// `φ(x, t)`, checked against the attached domain.
    pub fn eval_phi(&self, x: impl Into<Point>, t: f64) -> Result<ExtReal> {
        let p = x.into();
        self.check(&p)?;
        if !(t >= 0.0) {
            return Err(Error::Input(format!("φ is defined for t ≥ 0, got {t}")));
        }
        Ok(self.value(&p, t))
    }

    /// `φ(x, t)` without domain checks.
    pub fn value(&self, p: &Point, t: f64) -> ExtReal {
        if t <= 0.0 {
            return ExtReal::ZERO;
        }
        let v = match &self.kind {
            Kind::Linear => t,
            Kind::PowerVarExp(f) => t.powf(1.0 + f.excess(p)),
            Kind::NormalizedVarExp(f) => {
                let q = 1.0 + f.excess(p);
                t.powf(q) / q
            }
            Kind::Clr(f) => {
                let e = f.excess(p);
                let q = 1.0 + e;
                if t <= 1.0 {
                    t.powf(q) / q
                } else {
                    (t - 1.0) + 1.0 / q
                }
            }
            Kind::DoublePhase(a) => t + a.value(p) * t * t,
            Kind::Autonomous { coef, exponent } => coef * t.powf(*exponent),
            Kind::Tabulated(tab) => tab.value(t),
        };
        ExtReal::new(v)
    }

    /// Left-continuous left derivative `φ'(x, t)` for `t > 0`; at `t = 0`
    /// the right limit.
    pub fn left_derivative(&self, p: &Point, t: f64) -> ExtReal {
        let t = t.max(0.0);
        let v = match &self.kind {
            Kind::Linear => 1.0,
            Kind::PowerVarExp(f) => {
                let e = f.excess(p);
                if e == 0.0 {
                    1.0
                } else {
                    (1.0 + e) * t.powf(e)
                }
            }
            Kind::NormalizedVarExp(f) => {
                let e = f.excess(p);
                if e == 0.0 {
                    1.0
                } else {
                    t.powf(e)
                }
            }
            Kind::Clr(f) => {
                let e = f.excess(p);
                if t > 1.0 || e == 0.0 {
                    1.0
                } else {
                    t.powf(e)
                }
            }
            Kind::DoublePhase(a) => 1.0 + 2.0 * a.value(p) * t,
            Kind::Autonomous { coef, exponent } => {
                if *exponent == 1.0 {
                    *coef
                } else {
                    coef * exponent * t.powf(exponent - 1.0)
                }
            }
            Kind::Tabulated(tab) => tab.left_derivative(t),
        };
        ExtReal::new(v)
    }

    /// Second derivative in `t` where it exists (zero on linear pieces);
    /// `+∞` at `t = 0` for exponents in `(1, 2)`.
    pub fn second_derivative(&self, p: &Point, t: f64) -> f64 {
        match &self.kind {
            Kind::Linear | Kind::Tabulated(_) => 0.0,
            Kind::PowerVarExp(f) => {
                let e = f.excess(p);
                if e == 0.0 {
                    0.0
                } else {
                    (1.0 + e) * e * t.powf(e - 1.0)
                }
            }
            Kind::NormalizedVarExp(f) => {
                let e = f.excess(p);
                if e == 0.0 {
                    0.0
                } else {
                    e * t.powf(e - 1.0)
                }
            }
            Kind::Clr(f) => {
                let e = f.excess(p);
                if t > 1.0 || e == 0.0 {
                    0.0
                } else {
                    e * t.powf(e - 1.0)
                }
            }
            Kind::DoublePhase(a) => 2.0 * a.value(p),
            Kind::Autonomous { coef, exponent } => {
                if *exponent == 1.0 {
                    0.0
                } else {
                    coef * exponent * (exponent - 1.0) * t.powf(exponent - 2.0)
                }
            }
        }
    }

    /// `φ*(x, s) = sup_{t ≥ 0} (st − φ(x, t))`, checked against the domain.
    pub fn conjugate_eval(&self, x: impl Into<Point>, s: f64) -> Result<ExtReal> {
        let p = x.into();
        self.check(&p)?;
        if !(s >= 0.0) {
            return Err(Error::Input(format!("φ* is evaluated at s ≥ 0, got {s}")));
        }
        Ok(self.conjugate(&p, s))
    }

    /// Closed-form conjugate.
    pub fn conjugate(&self, p: &Point, s: f64) -> ExtReal {
        if s <= 0.0 {
            return ExtReal::ZERO;
        }
        // Conjugate of a function with slope-1 tail (or the linear limit p = 1).
        let linear = |s: f64| if s <= 1.0 { ExtReal::ZERO } else { ExtReal::INFINITY };
        match &self.kind {
            Kind::Linear => linear(s),
            Kind::PowerVarExp(f) => {
                let e = f.excess(p);
                if e == 0.0 {
                    return linear(s);
                }
                // t* = (s/p)^{1/e},  φ* = s t* (1 − 1/p)
                let q = 1.0 + e;
                let ln = (e / q).ln() + s.ln() + (s.ln() - q.ln()) / e;
                ExtReal::new(ln.exp())
            }
            Kind::NormalizedVarExp(f) => {
                let e = f.excess(p);
                if e == 0.0 {
                    return linear(s);
                }
                let dual = 1.0 + 1.0 / e;
                ExtReal::new((dual * s.ln() - dual.ln()).exp())
            }
            Kind::Clr(f) => {
                if s > 1.0 {
                    return ExtReal::INFINITY;
                }
                let e = f.excess(p);
                if e == 0.0 {
                    return ExtReal::ZERO;
                }
                let dual = 1.0 + 1.0 / e;
                ExtReal::new((dual * s.ln() - dual.ln()).exp())
            }
            Kind::DoublePhase(a) => {
                if s <= 1.0 {
                    return ExtReal::ZERO;
                }
                let a = a.value(p);
                if a == 0.0 {
                    ExtReal::INFINITY
                } else {
                    ExtReal::new((s - 1.0) * (s - 1.0) / (4.0 * a))
                }
            }
            Kind::Autonomous { coef, exponent } => {
                if *exponent == 1.0 {
                    return if s <= *coef { ExtReal::ZERO } else { ExtReal::INFINITY };
                }
                let t = (s / (coef * exponent)).powf(1.0 / (exponent - 1.0));
                ExtReal::new(s * t * (1.0 - 1.0 / exponent))
            }
            Kind::Tabulated(tab) => tab.conjugate(s),
        }
    }

    /// Numerical Legendre transform of `t ↦ φ(x, t)`.
    pub fn conjugate_numeric(&self, p: &Point, s: f64) -> ExtReal {
        legendre::legendre_transform(|t| self.value(p, t), s)
    }

    /// `φ'_∞(x) = lim_{t→∞} φ(x, t)/t`.
    pub fn recession(&self, p: &Point) -> ExtReal {
        match &self.kind {
            Kind::Linear | Kind::Clr(_) => ExtReal::ONE,
            Kind::PowerVarExp(f) | Kind::NormalizedVarExp(f) => {
                if f.excess(p) == 0.0 {
                    ExtReal::ONE
                } else {
                    ExtReal::INFINITY
                }
            }
            Kind::DoublePhase(a) => {
                if a.value(p) == 0.0 {
                    ExtReal::ONE
                } else {
                    ExtReal::INFINITY
                }
            }
            Kind::Autonomous { coef, exponent } => {
                if *exponent == 1.0 {
                    ExtReal::new(*coef)
                } else {
                    ExtReal::INFINITY
                }
            }
            Kind::Tabulated(tab) => ExtReal::new(tab.last_slope()),
        }
    }

    /// Checked recession evaluation.
    pub fn recession_at(&self, x: impl Into<Point>) -> Result<ExtReal> {
        let p = x.into();
        self.check(&p)?;
        Ok(self.recession(&p))
    }

    /// Young gap `φ(x,t) + φ*(x, φ'(x,t)) − t φ'(x,t)`; `None` when `φ'(x,t) = ∞`.
    pub fn young_gap(&self, x: impl Into<Point>, t: f64) -> Option<f64> {
        let p = x.into();
        let d = self.left_derivative(&p, t);
        let d = d.to_finite()?;
        let v = self.value(&p, t).to_finite()?;
        let c = self.conjugate(&p, d).to_finite()?;
        Some(v + c - t * d)
    }
}

#[cfg(test)]
mod tests;
