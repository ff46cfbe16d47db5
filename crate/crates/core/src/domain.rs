//! Bounded computational domains with uniform cell grids.
//!
//! Samples of functions live at cell centers; grid nodes are the cell edges.
//! Atoms of a 1D derivative measure sit on interior nodes, so a jump between
//! two neighbouring samples is located exactly on the node between them.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A location in the domain.
///
/// `dx` is an offset along the first axis kept separately from `x`; quadrature
/// close to a singular point of a coefficient field stores the anchor in `x`
/// and the (possibly sub-ulp) distance in `dx`, so that fields can measure
/// `|x − x₀|` without cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
}

impl Point {
    pub fn at(x: f64) -> Self {
        Point { x, y: 0.0, dx: 0.0 }
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point { x, y, dx: 0.0 }
    }

    pub fn offset(anchor: f64, dx: f64) -> Self {
        Point { x: anchor, y: 0.0, dx }
    }

    /// First coordinate, offset included.
    pub fn x_value(&self) -> f64 {
        self.x + self.dx
    }

    /// Signed distance `x − c` along the first axis.
    pub fn x_minus(&self, c: f64) -> f64 {
        if self.x == c {
            self.dx
        } else {
            (self.x - c) + self.dx
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::at(x)
    }
}

/// Uniform 1D grid on `(lo, hi)` with `n` cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Input(format!("empty interval ({lo}, {hi})")));
        }
        if n < 2 {
            return Err(Error::Input(format!("grid needs at least 2 cells, got {n}")));
        }
        Ok(Interval { lo, hi, n })
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.h()
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.n {
            self.hi
        } else {
            self.lo + k as f64 * self.h()
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.center(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn contains_strictly(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// Index of the node at `x`, if `x` is a node up to a relative snap tolerance.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let k = ((x - self.lo) / self.h()).round();
        if k < 0.0 || k > self.n as f64 {
            return None;
        }
        let k = k as usize;
        ((self.node(k) - x).abs() <= 1e-9 * self.h()).then_some(k)
    }

    /// Cell containing `x` (right-closed cells, clamped to the grid).
    pub fn cell_of(&self, x: f64) -> usize {
        let i = ((x - self.lo) / self.h()).floor();
        (i.max(0.0) as usize).min(self.n - 1)
    }
}

/// Rectangle `(x.lo, x.hi) × (y.lo, y.hi)` with `x.n × y.n` cells, row-major samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x: Interval, y: Interval) -> Self {
        Rect { x, y }
    }

    pub fn cells(&self) -> usize {
        self.x.n * self.y.n
    }

    pub fn cell_area(&self) -> f64 {
        self.x.h() * self.y.h()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.x.n + i
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::xy(self.x.center(i), self.y.center(j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dim")]
pub enum Domain {
    #[serde(rename = "1")]
    Interval(Interval),
    #[serde(rename = "2")]
    Rect(Rect),
}

impl Domain {
    pub fn interval(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Ok(Domain::Interval(Interval::new(lo, hi, n)?))
    }

    pub fn rect(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        Ok(Domain::Rect(Rect::new(
            Interval::new(x.0, x.1, nx)?,
            Interval::new(y.0, y.1, ny)?,
        )))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval(_) => 1,
            Domain::Rect(_) => 2,
        }
    }

    pub fn cells(&self) -> usize {
        match self {
            Domain::Interval(g) => g.n,
            Domain::Rect(r) => r.cells(),
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval(g) => g.length(),
            Domain::Rect(r) => r.x.length() * r.y.length(),
        }
    }

    pub fn cell_measure(&self) -> f64 {
        match self {
            Domain::Interval(g) => g.h(),
            Domain::Rect(r) => r.cell_area(),
        }
    }

    /// Cell centers in sample order.
    pub fn centers(&self) -> Vec<Point> {
        match self {
            Domain::Interval(g) => g.centers().into_iter().map(Point::at).collect(),
            Domain::Rect(r) => (0..r.y.n)
                .flat_map(|j| (0..r.x.n).map(move |i| r.center(i, j)))
                .collect(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Domain::Interval(g) => g.contains(p.x_value()),
            Domain::Rect(r) => r.x.contains(p.x_value()) && r.y.contains(p.y),
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!("({}, {})", p.x_value(), p.y)))
        }
    }

    pub fn as_interval(&self) -> Result<&Interval> {
        match self {
            Domain::Interval(g) => Ok(g),
            Domain::Rect(_) => Err(Error::Unsupported("operation is one-dimensional".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Interval::new(0.0, 1.0, 4).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.center(0), 0.125);
        assert_eq!(g.node(4), 1.0);
        assert_eq!(g.node_index(0.5), Some(2));
        assert_eq!(g.node_index(0.6), None);
        assert!(g.centers().iter().all(|&c| g.contains_strictly(c)));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Interval::new(0.0, 1.0, 1).is_err());
        assert!(Interval::new(1.0, 1.0, 8).is_err());
    }

    #[test]
    fn offset_points_keep_tiny_distances() {
        let p = Point::offset(0.3, 1e-200);
        assert_eq!(p.x_minus(0.3), 1e-200);
        assert_eq!(p.x_value(), 0.3);
    }
}
