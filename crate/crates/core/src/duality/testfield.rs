//! Piecewise-linear test fields: nodal values on a refined grid plus
//! trapezoid bumps, all vanishing on a one-cell boundary collar.

use crate::domain::{Interval, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Trapezoid: `height` on `|x − center| ≤ plateau`, linear ramps to zero at `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub delta: f64,
    pub plateau: f64,
    pub height: f64,
}

impl Bump {
    /// Value at signed distance `d` from the center.
    pub fn at(&self, d: f64) -> f64 {
        let a = d.abs();
        if a <= self.plateau {
            self.height
        } else if a < self.delta {
            self.height * (self.delta - a) / (self.delta - self.plateau)
        } else {
            0.0
        }
    }

    pub(crate) fn offsets(&self) -> Vec<f64> {
        let mut o = vec![-self.delta, 0.0, self.delta];
        if self.plateau > 0.0 {
            o.extend([-self.plateau, self.plateau]);
        }
        o
    }

    /// Signed distance from the center to the anchored position `anchor + off`.
    pub(crate) fn dist(&self, anchor: f64, off: f64) -> f64 {
        if anchor == self.center {
            off
        } else {
            (anchor - self.center) + off
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestField {
    grid: Interval,
    nodal: Vec<f64>,
    bumps: Vec<Bump>,
}

impl TestField {
    /// Zero field on `grid` (the refined test-field grid).
    pub fn zero(grid: Interval) -> Self {
        TestField { grid, nodal: vec![0.0; grid.n + 1], bumps: Vec::new() }
    }

    /// Nodal values at the `grid.n + 1` nodes; the two outermost nodes on
    /// each side must be zero.
    pub fn from_nodal(grid: Interval, nodal: Vec<f64>) -> Result<Self> {
        if nodal.len() != grid.n + 1 {
            return Err(Error::Shape { expected: grid.n + 1, got: nodal.len() });
        }
        let n = grid.n;
        if n < 4 || [0, 1, n - 1, n].iter().any(|&k| nodal[k] != 0.0) {
            return Err(Error::Input("test field must vanish on the boundary collar".into()));
        }
        Ok(TestField { grid, nodal, bumps: Vec::new() })
    }

    /// Adds a trapezoid; its support must stay inside the collar.
    pub fn with_bump(mut self, b: Bump) -> Result<Self> {
        self.check_bump(&b)?;
        self.bumps.push(b);
        Ok(self)
    }

    pub(crate) fn check_bump(&self, b: &Bump) -> Result<()> {
        let h = self.grid.h();
        let ok = b.delta > 0.0
            && b.plateau >= 0.0
            && b.plateau < b.delta
            && b.height.is_finite()
            && b.center - b.delta >= self.grid.lo + h
            && b.center + b.delta <= self.grid.hi - h;
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("bump at {} with half-width {} is not admissible", b.center, b.delta)))
        }
    }

    /// Largest bump half-width around `c` that clears the collar.
    pub fn max_delta(&self, c: f64) -> f64 {
        let h = self.grid.h();
        ((c - self.grid.lo - h).min(self.grid.hi - h - c)).max(0.0)
    }

    pub fn grid(&self) -> &Interval {
        &self.grid
    }

    pub fn nodal(&self) -> &[f64] {
        &self.nodal
    }

    pub(crate) fn nodal_mut(&mut self) -> &mut Vec<f64> {
        &mut self.nodal
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub(crate) fn set_bumps(&mut self, bumps: Vec<Bump>) {
        self.bumps = bumps;
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut f = self.clone();
        f.nodal.iter_mut().for_each(|v| *v *= k);
        f.bumps.iter_mut().for_each(|b| b.height *= k);
        f
    }

    fn nodal_at(&self, x: f64) -> f64 {
        if !(x > self.grid.lo && x < self.grid.hi) {
            return 0.0;
        }
        let h = self.grid.h();
        let j = self.grid.cell_of(x);
        let t = ((x - self.grid.node(j)) / h).clamp(0.0, 1.0);
        (1.0 - t) * self.nodal[j] + t * self.nodal[j + 1]
    }

    /// `w(x)`; offsets in `p.dx` are honoured by the bump part.
    pub fn value(&self, p: &Point) -> f64 {
        self.nodal_at(p.x_value()) + self.bumps.iter().map(|b| b.at(b.dist(p.x, p.dx))).sum::<f64>()
    }

    /// Largest `|w|` over nodes and bump knots.
    pub fn sup_norm(&self) -> f64 {
        self.knot_points().iter().map(|p| self.value(p).abs()).fold(0.0, f64::max)
    }

    /// Nodes and bump breakpoints, where the piecewise-linear field attains its extremes.
    pub fn knot_points(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = (0..=self.grid.n).map(|k| Point::at(self.grid.node(k))).collect();
        for b in &self.bumps {
            pts.extend(b.offsets().into_iter().map(|o| Point::offset(b.center, o)));
        }
        pts
    }
}
