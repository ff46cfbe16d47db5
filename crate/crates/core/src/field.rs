//! Coefficient fields: the exponent `p(·)` and the double-phase weight `a(·)`.

use crate::domain::Point;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A scalar field over the domain, given in closed form or by samples.
///
/// `LogType` encodes `1 + c_log / log(1/|x − x₀|)` inside `cutoff` (and its
/// value at the cutoff radius outside); `PowerType` encodes `1 + |x − x₀|^α`.
/// Both equal exactly 1 at `x₀`, which makes `x₀` a singular point for
/// quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    Const {
        value: f64,
    },
    /// Uniform samples on `[lo, hi]`, linearly interpolated, constant outside.
    Grid {
        lo: f64,
        hi: f64,
        values: Vec<f64>,
    },
    /// Bilinear samples on `[x_lo, x_hi] × [y_lo, y_hi]`, row-major with `nx` columns.
    Grid2 {
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
        nx: usize,
        values: Vec<f64>,
    },
    /// `left` for `x < at`, `right` for `x ≥ at`.
    Step {
        at: f64,
        left: f64,
        right: f64,
    },
    LogType {
        c_log: f64,
        x0: f64,
        #[serde(default)]
        y0: f64,
        #[serde(default = "default_cutoff")]
        cutoff: f64,
    },
    PowerType {
        alpha: f64,
        x0: f64,
        #[serde(default)]
        y0: f64,
    },
}

fn default_cutoff() -> f64 {
    0.5
}

impl ScalarField {
    pub fn constant(value: f64) -> Self {
        ScalarField::Const { value }
    }

    pub fn log_type(c_log: f64, x0: f64) -> Self {
        ScalarField::LogType { c_log, x0, y0: 0.0, cutoff: default_cutoff() }
    }

    pub fn power_type(alpha: f64, x0: f64) -> Self {
        ScalarField::PowerType { alpha, x0, y0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarField::Grid { lo, hi, values } => {
                if values.len() < 2 || !(hi > lo) {
                    return Err(Error::Input("grid field needs ≥ 2 samples on a nonempty range".into()));
                }
            }
            ScalarField::Grid2 { x_lo, x_hi, y_lo, y_hi, nx, values } => {
                if *nx < 2 || values.len() % nx != 0 || values.len() / nx < 2 || !(x_hi > x_lo) || !(y_hi > y_lo) {
                    return Err(Error::Input("grid2 field needs ≥ 2×2 samples".into()));
                }
            }
            ScalarField::LogType { c_log, cutoff, .. } => {
                if !(*c_log > 0.0) || !(*cutoff > 0.0 && *cutoff < 1.0) {
                    return Err(Error::Input("log_type needs c_log > 0 and cutoff in (0, 1)".into()));
                }
            }
            ScalarField::PowerType { alpha, .. } => {
                if !(*alpha > 0.0) {
                    return Err(Error::Input("power_type needs alpha > 0".into()));
                }
            }
            _ => {}
        }
        if !self.min_value().is_finite() {
            return Err(Error::Input("field values must be finite".into()));
        }
        Ok(())
    }

    /// Distance to the distinguished point of a radial descriptor.
    fn radius(p: &Point, x0: f64, y0: f64) -> f64 {
        let dx = p.x_minus(x0);
        if p.y == y0 {
            dx.abs()
        } else {
            dx.hypot(p.y - y0)
        }
    }

    /// `value(p) − 1`, computed without cancellation for the closed-form exponents.
    pub fn excess(&self, p: &Point) -> f64 {
        match self {
            ScalarField::LogType { c_log, x0, y0, cutoff } => {
                let r = Self::radius(p, *x0, *y0).min(*cutoff);
                if r == 0.0 {
                    0.0
                } else {
                    c_log / (1.0 / r).ln()
                }
            }
            ScalarField::PowerType { alpha, x0, y0 } => Self::radius(p, *x0, *y0).powf(*alpha),
            _ => self.value(p) - 1.0,
        }
    }

    pub fn value(&self, p: &Point) -> f64 {
        match self {
            ScalarField::Const { value } => *value,
            ScalarField::Grid { lo, hi, values } => interp1(*lo, *hi, values, p.x_value()),
            ScalarField::Grid2 { x_lo, x_hi, y_lo, y_hi, nx, values } => {
                let ny = values.len() / nx;
                let (i, tx) = locate(*x_lo, *x_hi, *nx, p.x_value());
                let (j, ty) = locate(*y_lo, *y_hi, ny, p.y);
                let v = |a: usize, b: usize| values[b * nx + a];
                let i1 = (i + 1).min(nx - 1);
                let j1 = (j + 1).min(ny - 1);
                (1.0 - ty) * ((1.0 - tx) * v(i, j) + tx * v(i1, j)) + ty * ((1.0 - tx) * v(i, j1) + tx * v(i1, j1))
            }
            ScalarField::Step { at, left, right } => {
                if p.x_minus(*at) < 0.0 {
                    *left
                } else {
                    *right
                }
            }
            ScalarField::LogType { .. } | ScalarField::PowerType { .. } => 1.0 + self.excess(p),
        }
    }

    /// Infimum of the field over the whole line (or plane).
    pub fn min_value(&self) -> f64 {
        match self {
            ScalarField::Const { value } => *value,
            ScalarField::Grid { values, .. } | ScalarField::Grid2 { values, .. } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
            ScalarField::Step { left, right, .. } => left.min(*right),
            ScalarField::LogType { .. } | ScalarField::PowerType { .. } => 1.0,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            ScalarField::Const { .. } => true,
            ScalarField::Grid { values, .. } | ScalarField::Grid2 { values, .. } => {
                values.iter().all(|v| *v == values[0])
            }
            ScalarField::Step { left, right, .. } => left == right,
            _ => false,
        }
    }

    /// First-axis locations where the field is singular (non-smooth or
    /// degenerate), used to split quadrature panels.
    pub fn singular_points(&self) -> Vec<f64> {
        match self {
            ScalarField::Step { at, .. } => vec![*at],
            ScalarField::LogType { x0, cutoff, .. } => vec![*x0, x0 - cutoff, x0 + cutoff],
            ScalarField::PowerType { x0, .. } => vec![*x0],
            _ => Vec::new(),
        }
    }

    /// Points where conjugates may blow up, integrated radially.
    pub fn radial_points(&self) -> Vec<f64> {
        match self {
            ScalarField::LogType { x0, .. } | ScalarField::PowerType { x0, .. } => vec![*x0],
            _ => Vec::new(),
        }
    }

    /// Points where the exponent reaches 1 in closed form.
    pub fn unit_points(&self) -> Vec<f64> {
        match self {
            ScalarField::LogType { x0, .. } | ScalarField::PowerType { x0, .. } => vec![*x0],
            ScalarField::Grid { lo, hi, values } => {
                let step = (hi - lo) / (values.len() - 1) as f64;
                (0..values.len()).filter(|&k| values[k] <= 1.0).map(|k| lo + step * k as f64).collect()
            }
            ScalarField::Step { at, left, right } if *left <= 1.0 || *right <= 1.0 => vec![*at],
            _ => Vec::new(),
        }
    }
}

fn locate(lo: f64, hi: f64, n: usize, x: f64) -> (usize, f64) {
    let s = ((x - lo) / (hi - lo) * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
    let i = (s.floor() as usize).min(n - 2);
    (i, s - i as f64)
}

fn interp1(lo: f64, hi: f64, values: &[f64], x: f64) -> f64 {
    let (i, t) = locate(lo, hi, values.len(), x);
    (1.0 - t) * values[i] + t * values[i + 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_type_exponent() {
        let f = ScalarField::log_type(1.0, 0.0);
        let x = (-5.0f64).exp();
        assert!((f.excess(&Point::at(x)) - 0.2).abs() < 1e-12);
        assert_eq!(f.value(&Point::at(0.0)), 1.0);
        // beyond the cutoff the exponent is frozen
        assert_eq!(f.value(&Point::at(0.9)), f.value(&Point::at(0.5)));
        // ultra-close offsets keep their precision
        let e = f.excess(&Point::offset(0.0, 1e-300));
        assert!((e - 1.0 / (300.0 * 10f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn power_type_and_grid() {
        let f = ScalarField::power_type(1.0, 0.2);
        assert!((f.value(&Point::at(0.5)) - 1.3).abs() < 1e-15);
        let g = ScalarField::Grid { lo: 0.0, hi: 1.0, values: vec![1.0, 2.0, 4.0] };
        assert_eq!(g.value(&Point::at(0.25)), 1.5);
        assert_eq!(g.value(&Point::at(0.75)), 3.0);
        assert_eq!(g.value(&Point::at(2.0)), 4.0);
    }

    #[test]
    fn step_and_bilinear() {
        let s = ScalarField::Step { at: 0.5, left: 0.0, right: 2.0 };
        assert_eq!(s.value(&Point::at(0.49)), 0.0);
        assert_eq!(s.value(&Point::at(0.5)), 2.0);
        let g = ScalarField::Grid2 { x_lo: 0.0, x_hi: 1.0, y_lo: 0.0, y_hi: 1.0, nx: 2, values: vec![0.0, 1.0, 2.0, 3.0] };
        assert_eq!(g.value(&Point::xy(0.5, 0.5)), 1.5);
    }

    #[test]
    fn json_descriptor() {
        let f: ScalarField = serde_json::from_str(r#"{"kind":"log_type","c_log":1.0,"x0":0.0,"cutoff":0.4}"#).unwrap();
        assert_eq!(f, ScalarField::LogType { c_log: 1.0, x0: 0.0, y0: 0.0, cutoff: 0.4 });
        f.validate().unwrap();
        let bad: ScalarField = serde_json::from_str(r#"{"kind":"power_type","alpha":0.0,"x0":0.0}"#).unwrap();
        assert!(bad.validate().is_err());
    }
}
