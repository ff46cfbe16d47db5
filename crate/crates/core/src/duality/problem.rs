//! Exact evaluation of the dual pairing and the conjugate modular of a test
//! field, piece by piece between consecutive breakpoints.

use super::testfield::{Bump, TestField};
use crate::bv::BVFunction;
use crate::domain::{Interval, Point};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::phi::PhiFunction;
use crate::quadrature::{integrate, integrate_radial_range};
use rayon::prelude::*;

/// A breakpoint at `anchor + off`. `tau` is its fraction across the fine
/// cell (for the nodal part) and `bump` the summed bump value there.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Knot {
    anchor: f64,
    off: f64,
    tau: f64,
    bump: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Cell {
    knots: Vec<Knot>,
    g: f64,
}

pub(crate) struct Problem<'a> {
    pub phi: &'a PhiFunction,
    pub u: &'a BVFunction,
    pub grid: Interval,
    sing: Vec<f64>,
    radial: Vec<f64>,
    /// `(fine node index, x, jump)`
    pub atoms: Vec<(usize, f64, f64)>,
}

fn snap_tol(h: f64) -> f64 {
    1e-9 * h
}

impl<'a> Problem<'a> {
    pub fn new(phi: &'a PhiFunction, u: &'a BVFunction, resolution: usize) -> Result<Self> {
        let coarse = *u.domain().as_interval()?;
        if resolution == 0 {
            return Err(Error::Input("resolution must be ≥ 1".into()));
        }
        let grid = Interval::new(coarse.lo, coarse.hi, coarse.n * resolution)?;
        let mut sing: Vec<f64> = phi.singular_points().into_iter().filter(|x| coarse.contains_strictly(*x)).collect();
        sing.sort_by(f64::total_cmp);
        sing.dedup();
        let radial = phi.radial_points();
        let atoms = u
            .atoms()
            .iter()
            .map(|a| (coarse.node_index(a.x).unwrap() * resolution, a.x, a.jump))
            .collect();
        Ok(Problem { phi, u, grid, sing, radial, atoms })
    }

    pub fn resolution(&self) -> usize {
        self.grid.n / self.u.domain().cells()
    }

    fn is_singular(&self, x: f64) -> bool {
        self.radial.contains(&x)
    }

    /// Exact coordinate to anchor a grid node at: a nearby bump center or
    /// singular point takes precedence.
    fn node_anchor(&self, k: usize, bumps: &[Bump]) -> f64 {
        let x = self.grid.node(k);
        let tol = snap_tol(self.grid.h());
        for b in bumps {
            if (b.center - x).abs() <= tol {
                return b.center;
            }
        }
        for s in &self.sing {
            if (s - x).abs() <= tol {
                return *s;
            }
        }
        x
    }

    pub fn cell(&self, j: usize, bumps: &[Bump]) -> Cell {
        let h = self.grid.h();
        let la = self.node_anchor(j, bumps);
        let ra = self.node_anchor(j + 1, bumps);
        let from_left = |a: f64, o: f64| if a == la { o } else { (a - la) + o };
        let to_right = |a: f64, o: f64| if a == ra { -o } else { (ra - a) - o };
        let mut raw: Vec<(f64, f64)> = vec![(la, 0.0), (ra, 0.0)];
        let (xl, xr) = (self.grid.node(j), self.grid.node(j + 1));
        for b in bumps.iter().filter(|b| b.center - b.delta < xr && b.center + b.delta > xl) {
            for o in b.offsets() {
                if from_left(b.center, o) > 0.0 && to_right(b.center, o) > 0.0 {
                    raw.push((b.center, o));
                }
            }
        }
        for &s in &self.sing {
            if from_left(s, 0.0) > 0.0 && to_right(s, 0.0) > 0.0 {
                raw.push((s, 0.0));
            }
        }
        raw.sort_by(|p, q| {
            if p.0 == q.0 {
                p.1.total_cmp(&q.1)
            } else {
                from_left(p.0, p.1).total_cmp(&from_left(q.0, q.1))
            }
        });
        raw.dedup();
        let knots = raw
            .into_iter()
            .map(|(a, o)| {
                let tau = if a == ra && o == 0.0 { 1.0 } else { (from_left(a, o) / h).clamp(0.0, 1.0) };
                let bump = bumps.iter().map(|b| b.at(b.dist(a, o))).sum();
                Knot { anchor: a, off: o, tau, bump }
            })
            .collect();
        let coarse = j / self.resolution();
        Cell { knots, g: self.u.gradient()[coarse] }
    }

    pub fn geometry(&self, bumps: &[Bump]) -> Vec<Cell> {
        (0..self.grid.n).map(|j| self.cell(j, bumps)).collect()
    }

    /// `∫ φ*(x, scale·|w|)` over the piece between two knots where `w` runs
    /// linearly from `w0` to `w1`.
    fn piece_conj(&self, k0: &Knot, k1: &Knot, w0: f64, w1: f64, scale: f64) -> ExtReal {
        let phi = self.phi;
        let lin = |tau: f64| scale * (w0 + (w1 - w0) * tau).abs();
        let sing0 = self.is_singular(k0.anchor);
        let sing1 = self.is_singular(k1.anchor);
        let len = Self::piece_len(k0, k1);
        if !(len > 0.0) {
            return ExtReal::ZERO;
        }
        if w0 == 0.0 && w1 == 0.0 {
            return ExtReal::ZERO;
        }
        // |w| is linear on the piece, so an infeasible value shows up at an end
        let (e0, e1) = (1e-9, 1.0 - 1e-9);
        if sing0 && k0.off >= 0.0 {
            let (a, o) = (k0.anchor, k0.off);
            let f = |r: f64| phi.conjugate(&Point::offset(a, r), lin((r - o) / len));
            if f(o + e0 * len).is_infinite() || f(o + e1 * len).is_infinite() {
                return ExtReal::INFINITY;
            }
            integrate_radial_range(f, o, o + len)
        } else if sing1 && k1.off <= 0.0 {
            let (a, o) = (k1.anchor, -k1.off);
            let f = |r: f64| phi.conjugate(&Point::offset(a, -r), lin(1.0 - (r - o) / len));
            if f(o + e0 * len).is_infinite() || f(o + e1 * len).is_infinite() {
                return ExtReal::INFINITY;
            }
            integrate_radial_range(f, o, o + len)
        } else {
            let (a, o) = (k0.anchor, k0.off);
            let f = |r: f64| phi.conjugate(&Point::offset(a, o + r), lin(r / len));
            if f(e0 * len).is_infinite() || f(e1 * len).is_infinite() {
                return ExtReal::INFINITY;
            }
            integrate(f, 0.0, len)
        }
    }

    fn knot_value(k: &Knot, wl: f64, wr: f64) -> f64 {
        (1.0 - k.tau) * wl + k.tau * wr + k.bump
    }

    fn piece_len(k0: &Knot, k1: &Knot) -> f64 {
        if k0.anchor == k1.anchor {
            k1.off - k0.off
        } else {
            (k1.anchor - k0.anchor) + (k1.off - k0.off)
        }
    }

    pub fn cell_pairing(&self, c: &Cell, wl: f64, wr: f64) -> f64 {
        if c.g == 0.0 {
            return 0.0;
        }
        c.knots
            .windows(2)
            .map(|k| {
                let (a, b) = (Self::knot_value(&k[0], wl, wr), Self::knot_value(&k[1], wl, wr));
                Self::piece_len(&k[0], &k[1]) * 0.5 * (a + b)
            })
            .sum::<f64>()
            * c.g
    }

    pub fn cell_conj(&self, c: &Cell, wl: f64, wr: f64, scale: f64) -> ExtReal {
        let mut total = ExtReal::ZERO;
        for k in c.knots.windows(2) {
            let (a, b) = (Self::knot_value(&k[0], wl, wr), Self::knot_value(&k[1], wl, wr));
            total += self.piece_conj(&k[0], &k[1], a, b, scale);
            if total.is_infinite() {
                break;
            }
        }
        total
    }

    /// Pairing minus conjugate modular on one fine cell; `−∞` if the latter is infinite.
    pub fn cell_value(&self, c: &Cell, wl: f64, wr: f64) -> f64 {
        match self.cell_conj(c, wl, wr, 1.0).to_finite() {
            Some(v) => self.cell_pairing(c, wl, wr) - v,
            None => f64::NEG_INFINITY,
        }
    }

    pub fn atom_term(&self, w: &TestField, i: usize) -> f64 {
        let (m, x, s) = self.atoms[i];
        s * (w.nodal()[m] + w.bumps().iter().map(|b| b.at(b.dist(x, 0.0))).sum::<f64>())
    }

    pub fn check_grid(&self, w: &TestField) -> Result<()> {
        if *w.grid() != self.grid {
            return Err(Error::Input("test field grid does not match the problem grid".into()));
        }
        Ok(())
    }

    pub fn pairing(&self, w: &TestField, geom: &[Cell]) -> f64 {
        let nodal = w.nodal();
        let ac: f64 = geom.iter().enumerate().map(|(j, c)| self.cell_pairing(c, nodal[j], nodal[j + 1])).sum();
        ac + (0..self.atoms.len()).map(|i| self.atom_term(w, i)).sum::<f64>()
    }

    /// `ρ_{φ*}(scale · |w|)`; cells are evaluated in parallel and summed in order.
    pub fn conj_modular(&self, w: &TestField, geom: &[Cell], scale: f64) -> ExtReal {
        let nodal = w.nodal();
        let parts: Vec<ExtReal> =
            geom.par_iter().enumerate().map(|(j, c)| self.cell_conj(c, nodal[j], nodal[j + 1], scale)).collect();
        parts.into_iter().sum()
    }

    pub fn objective(&self, w: &TestField) -> f64 {
        let geom = self.geometry(w.bumps());
        self.objective_with(w, &geom)
    }

    pub fn objective_with(&self, w: &TestField, geom: &[Cell]) -> f64 {
        match self.conj_modular(w, geom, 1.0).to_finite() {
            Some(c) => self.pairing(w, geom) - c,
            None => f64::NEG_INFINITY,
        }
    }

    /// Fine cells meeting `[c − δ, c + δ]`.
    pub fn cells_near(&self, c: f64, delta: f64) -> std::ops::Range<usize> {
        let h = self.grid.h();
        let lo = (((c - delta - self.grid.lo) / h).floor().max(0.0) as usize).saturating_sub(1);
        let hi = ((((c + delta - self.grid.lo) / h).ceil().max(0.0) as usize) + 1).min(self.grid.n);
        lo..hi
    }

    /// Objective restricted to the given fine cells and the atoms on their nodes.
    pub fn local_objective(&self, w: &TestField, bumps: &[Bump], cells: std::ops::Range<usize>) -> f64 {
        let nodal = w.nodal();
        let mut total = 0.0;
        for j in cells.clone() {
            let c = self.cell(j, bumps);
            let v = self.cell_value(&c, nodal[j], nodal[j + 1]);
            if v == f64::NEG_INFINITY {
                return v;
            }
            total += v;
        }
        for &(m, x, s) in &self.atoms {
            if m >= cells.start && m <= cells.end {
                total += s * (nodal[m] + bumps.iter().map(|b| b.at(b.dist(x, 0.0))).sum::<f64>());
            }
        }
        total
    }
}
