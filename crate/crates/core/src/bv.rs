//! Decomposed BV functions and the closed-form modular.
//!
//! A function is stored as cell samples of `u`, a cell-constant density of
//! the absolutely continuous gradient, and an explicit singular part: atoms on
//! interior nodes in 1D, jumps across grid edges in 2D.

use crate::domain::{Domain, Interval, Point, Rect};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::phi::PhiFunction;
use crate::quadrature::integrate_split_radial;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub jump: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

/// Jump across the edge between cell `(i, j)` and its `+axis` neighbour.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeJump {
    pub i: usize,
    pub j: usize,
    pub axis: Axis,
    pub jump: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BVFunction {
    domain: Domain,
    values: Vec<f64>,
    /// 1D: one entry per cell. 2D: interleaved `(g_x, g_y)` per cell.
    gradient: Vec<f64>,
    atoms: Vec<Atom>,
    edges: Vec<EdgeJump>,
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Shape { expected, got });
    }
    Ok(())
}

/// Forward differences per cell; the last cell gets slope 0.
pub fn forward_differences(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    (0..n).map(|i| if i + 1 < n { (values[i + 1] - values[i]) / h } else { 0.0 }).collect()
}

impl BVFunction {
    /// 1D function from samples, a supplied gradient density, and atoms.
    pub fn from_parts(domain: Domain, values: Vec<f64>, gradient: Vec<f64>, atoms: Vec<Atom>) -> Result<Self> {
        let iv = *domain.as_interval()?;
        check_len(iv.n, values.len())?;
        check_len(iv.n, gradient.len())?;
        if values.iter().chain(&gradient).any(|v| !v.is_finite()) {
            return Err(Error::Input("samples and gradient must be finite".into()));
        }
        let mut snapped = Vec::with_capacity(atoms.len());
        for a in atoms {
            let k = iv
                .node_index(a.x)
                .ok_or_else(|| Error::Input(format!("atom at {} is not on a grid node", a.x)))?;
            if k == 0 || k == iv.n {
                return Err(Error::Input(format!("atom at {} is not inside the domain", a.x)));
            }
            if !a.jump.is_finite() {
                return Err(Error::Input("atom jump must be finite".into()));
            }
            snapped.push(Atom { x: iv.node(k), jump: a.jump });
        }
        snapped.sort_by(|a, b| a.x.total_cmp(&b.x));
        if snapped.windows(2).any(|w| w[0].x == w[1].x) {
            return Err(Error::Input("atom locations must be distinct".into()));
        }
        Ok(BVFunction { domain, values, gradient, atoms: snapped, edges: Vec::new() })
    }

    /// 1D samples with forward-difference gradient and no singular part.
    pub fn from_samples(domain: Domain, values: Vec<f64>) -> Result<Self> {
        let h = domain.as_interval()?.h();
        let g = forward_differences(&values, h);
        Self::from_parts(domain, values, g, Vec::new())
    }

    /// 1D samples where consecutive differences larger than `theta` become
    /// atoms on the node between the two cells.
    pub fn atomize(domain: Domain, values: Vec<f64>, theta: f64) -> Result<Self> {
        let iv = *domain.as_interval()?;
        check_len(iv.n, values.len())?;
        let mut g = forward_differences(&values, iv.h());
        let mut atoms = Vec::new();
        for i in 0..iv.n - 1 {
            let d = values[i + 1] - values[i];
            if d.abs() > theta {
                atoms.push(Atom { x: iv.node(i + 1), jump: d });
                g[i] = 0.0;
            }
        }
        Self::from_parts(domain, values, g, atoms)
    }

    /// Smooth `u` with exact derivative `du`, sampled at cell centers, plus atoms.
    /// Atom jumps are added to the samples to the right of each atom.
    pub fn from_fn(domain: Domain, u: impl Fn(f64) -> f64, du: impl Fn(f64) -> f64, atoms: Vec<Atom>) -> Result<Self> {
        let iv = *domain.as_interval()?;
        let xs = iv.centers();
        let values = xs
            .iter()
            .map(|&x| u(x) + atoms.iter().filter(|a| a.x < x).map(|a| a.jump).sum::<f64>())
            .collect();
        let grad = xs.iter().map(|&x| du(x)).collect();
        Self::from_parts(domain, values, grad, atoms)
    }

    /// `height · χ_{x ≥ at}`.
    pub fn heaviside(domain: Domain, at: f64, height: f64) -> Result<Self> {
        Self::from_fn(domain, |_| 0.0, |_| 0.0, vec![Atom { x: at, jump: height }])
    }

    /// 2D image samples (row-major) with forward differences and explicit edge jumps.
    /// Differences across jump edges are excluded from the gradient.
    pub fn from_image(domain: Domain, values: Vec<f64>, edges: Vec<EdgeJump>) -> Result<Self> {
        let r = match domain {
            Domain::Rect(r) => r,
            _ => return Err(Error::Input("from_image needs a 2D domain".into())),
        };
        check_len(r.cells(), values.len())?;
        for e in &edges {
            let ok = match e.axis {
                Axis::X => e.i + 1 < r.x.n && e.j < r.y.n,
                Axis::Y => e.i < r.x.n && e.j + 1 < r.y.n,
            };
            if !ok || !e.jump.is_finite() {
                return Err(Error::Input(format!("edge ({}, {}) is not an interior grid edge", e.i, e.j)));
            }
        }
        let mut g = image_gradient(&r, &values);
        for e in &edges {
            let k = r.index(e.i, e.j);
            match e.axis {
                Axis::X => g[2 * k] = 0.0,
                Axis::Y => g[2 * k + 1] = 0.0,
            }
        }
        Ok(BVFunction { domain, values, gradient: g, atoms: Vec::new(), edges })
    }

    /// 2D samples where forward differences larger than `theta` become edge jumps.
    pub fn atomize_image(domain: Domain, values: Vec<f64>, theta: f64) -> Result<Self> {
        let r = match domain {
            Domain::Rect(r) => r,
            _ => return Err(Error::Input("atomize_image needs a 2D domain".into())),
        };
        check_len(r.cells(), values.len())?;
        let mut edges = Vec::new();
        for j in 0..r.y.n {
            for i in 0..r.x.n {
                let v = values[r.index(i, j)];
                if i + 1 < r.x.n && (values[r.index(i + 1, j)] - v).abs() > theta {
                    edges.push(EdgeJump { i, j, axis: Axis::X, jump: values[r.index(i + 1, j)] - v });
                }
                if j + 1 < r.y.n && (values[r.index(i, j + 1)] - v).abs() > theta {
                    edges.push(EdgeJump { i, j, axis: Axis::Y, jump: values[r.index(i, j + 1)] - v });
                }
            }
        }
        Self::from_image(domain, values, edges)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn edges(&self) -> &[EdgeJump] {
        &self.edges
    }

    /// `|∇ᵃu|` in cell `k`.
    pub fn gradient_norm(&self, k: usize) -> f64 {
        match self.domain {
            Domain::Interval(_) => self.gradient[k].abs(),
            Domain::Rect(_) => self.gradient[2 * k].hypot(self.gradient[2 * k + 1]),
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let mut u = self.clone();
        u.values.iter_mut().for_each(|v| *v *= lambda);
        u.gradient.iter_mut().for_each(|v| *v *= lambda);
        u.atoms.iter_mut().for_each(|a| a.jump *= lambda);
        u.edges.iter_mut().for_each(|e| e.jump *= lambda);
        u
    }

    /// Same function with atom `k` removed (1D).
    pub fn without_atom(&self, k: usize) -> Self {
        let mut u = self.clone();
        u.atoms.remove(k);
        u
    }

    /// `(u + v)/2` for functions on the same grid with the same atom locations.
    pub fn midpoint(&self, other: &BVFunction) -> Result<Self> {
        if self.domain != other.domain
            || self.atoms.len() != other.atoms.len()
            || self.atoms.iter().zip(&other.atoms).any(|(a, b)| a.x != b.x)
            || !self.edges.is_empty()
            || !other.edges.is_empty()
        {
            return Err(Error::Input("midpoint needs matching grids and atom locations".into()));
        }
        let avg = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect::<Vec<_>>();
        let atoms = self.atoms.iter().zip(&other.atoms).map(|(a, b)| Atom { x: a.x, jump: 0.5 * (a.jump + b.jump) }).collect();
        Ok(BVFunction {
            domain: self.domain,
            values: avg(&self.values, &other.values),
            gradient: avg(&self.gradient, &other.gradient),
            atoms,
            edges: Vec::new(),
        })
    }
}

fn image_gradient(r: &Rect, values: &[f64]) -> Vec<f64> {
    let (hx, hy) = (r.x.h(), r.y.h());
    let mut g = vec![0.0; 2 * r.cells()];
    for j in 0..r.y.n {
        for i in 0..r.x.n {
            let k = r.index(i, j);
            if i + 1 < r.x.n {
                g[2 * k] = (values[r.index(i + 1, j)] - values[k]) / hx;
            }
            if j + 1 < r.y.n {
                g[2 * k + 1] = (values[r.index(i, j + 1)] - values[k]) / hy;
            }
        }
    }
    g
}

fn edge_geometry(r: &Rect, e: &EdgeJump) -> (Point, f64) {
    match e.axis {
        Axis::X => (Point::xy(r.x.node(e.i + 1), r.y.center(e.j)), r.y.h()),
        Axis::Y => (Point::xy(r.x.center(e.i), r.y.node(e.j + 1)), r.x.h()),
    }
}

/// `|Du|(Ω) = Σ|∇ᵃu|·cell measure + |Dˢu|(Ω)`.
pub fn total_variation(u: &BVFunction) -> f64 {
    let cm = u.domain.cell_measure();
    let ac: f64 = (0..u.domain.cells()).map(|k| u.gradient_norm(k) * cm).sum();
    let sing: f64 = match &u.domain {
        Domain::Interval(_) => u.atoms.iter().map(|a| a.jump.abs()).sum(),
        Domain::Rect(r) => u.edges.iter().map(|e| e.jump.abs() * edge_geometry(r, e).1).sum(),
    };
    ac + sing
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomWeight {
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    pub jump: f64,
    /// `φ'_∞` at the atom.
    pub weight: ExtReal,
    /// `φ'_∞ · |jump|` (times edge length in 2D).
    pub contribution: ExtReal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularReport {
    pub ac_part: ExtReal,
    pub singular_part: ExtReal,
    pub fidelity: Option<f64>,
    pub total: ExtReal,
    pub atoms: Vec<AtomWeight>,
}

/// How the absolutely continuous part is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcQuadrature {
    /// One evaluation at each cell center.
    Midpoint,
    /// Adaptive Gauss–Legendre per cell, radial near coefficient singularities.
    #[default]
    Adaptive,
}

fn ac_part_1d(phi: &PhiFunction, iv: &Interval, u: &BVFunction, quad: AcQuadrature) -> ExtReal {
    let sing = phi.singular_points();
    let radial = phi.radial_points();
    let mut total = ExtReal::ZERO;
    for i in 0..iv.n {
        let g = u.gradient[i].abs();
        if g == 0.0 {
            continue;
        }
        total += match quad {
            AcQuadrature::Midpoint => phi.value(&Point::at(iv.center(i)), g).scale(iv.h()),
            AcQuadrature::Adaptive => integrate_split_radial(|p, _| phi.value(&p, g), iv.node(i), iv.node(i + 1), &sing, &radial),
        };
        if total.is_infinite() {
            break;
        }
    }
    total
}

/// `ρ_φ(|∇ᵃu|) + ∫ φ'_∞ d|Dˢu|` with adaptive quadrature of the AC part.
pub fn modular_exact(phi: &PhiFunction, u: &BVFunction) -> ModularReport {
    modular_exact_with(phi, u, AcQuadrature::Adaptive)
}

pub fn modular_exact_with(phi: &PhiFunction, u: &BVFunction, quad: AcQuadrature) -> ModularReport {
    let (ac_part, atoms) = match &u.domain {
        Domain::Interval(iv) => {
            let ac = ac_part_1d(phi, iv, u, quad);
            let atoms = u
                .atoms
                .iter()
                .map(|a| {
                    let w = phi.recession(&Point::at(a.x));
                    AtomWeight { x: a.x, y: None, jump: a.jump, weight: w, contribution: w.scale(a.jump.abs()) }
                })
                .collect::<Vec<_>>();
            (ac, atoms)
        }
        Domain::Rect(r) => {
            // 2D cells always use the midpoint rule
            let ac = u
                .domain
                .centers()
                .iter()
                .enumerate()
                .map(|(k, p)| phi.value(p, u.gradient_norm(k)).scale(r.cell_area()))
                .sum();
            let atoms = u
                .edges
                .iter()
                .map(|e| {
                    let (p, len) = edge_geometry(r, e);
                    let w = phi.recession(&p);
                    AtomWeight { x: p.x, y: Some(p.y), jump: e.jump, weight: w, contribution: w.scale(e.jump.abs() * len) }
                })
                .collect::<Vec<_>>();
            (ac, atoms)
        }
    };
    let singular_part: ExtReal = atoms.iter().map(|a| a.contribution).sum();
    ModularReport { ac_part, singular_part, fidelity: None, total: ac_part + singular_part, atoms }
}

/// `Σ (u_i − f_i)² · cell measure`.
pub fn fidelity(u: &BVFunction, f: &[f64]) -> Result<f64> {
    check_len(u.values.len(), f.len())?;
    let cm = u.domain.cell_measure();
    Ok(u.values.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * cm)
}

/// Closed-form modular plus the quadratic fidelity term.
pub fn modular_fidelity(phi: &PhiFunction, u: &BVFunction, f: &[f64]) -> Result<ModularReport> {
    let fid = fidelity(u, f)?;
    let mut r = modular_exact(phi, u);
    r.fidelity = Some(fid);
    r.total = r.total + ExtReal::new(fid);
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceClass {
    ClassicalBV,
    SobolevW1Phi,
}

/// `BV^φ = BV` when `φ'_∞ < ∞`, `W^{1,φ}` when `φ'_∞ = ∞`.
pub fn classify_space(phi: &PhiFunction) -> Result<SpaceClass> {
    if !phi.is_autonomous() {
        return Err(Error::Classification(
            "φ depends on x; the space depends on where the recession function is finite".into(),
        ));
    }
    Ok(if phi.recession(&Point::at(0.0)).is_finite() { SpaceClass::ClassicalBV } else { SpaceClass::SobolevW1Phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;

    fn unit(n: usize) -> Domain {
        Domain::interval(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn total_variation_examples() {
        let d = unit(16);
        let lin = BVFunction::from_fn(d, |x| x, |_| 1.0, vec![]).unwrap();
        assert!((total_variation(&lin) - 1.0).abs() < 1e-14);
        let h = BVFunction::heaviside(d, 0.5, 1.0).unwrap();
        assert_eq!(total_variation(&h), 1.0);
        let both = BVFunction::from_fn(d, |x| x, |_| 1.0, vec![Atom { x: 0.25, jump: 3.0 }]).unwrap();
        assert!((total_variation(&both) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn atoms_must_snap() {
        let d = unit(16);
        assert!(BVFunction::heaviside(d, 0.51, 1.0).is_err());
        assert!(BVFunction::heaviside(d, 0.0, 1.0).is_err());
        let two = vec![Atom { x: 0.5, jump: 1.0 }, Atom { x: 0.5, jump: 2.0 }];
        assert!(BVFunction::from_fn(d, |_| 0.0, |_| 0.0, two).is_err());
    }

    #[test]
    fn modular_examples() {
        let d = unit(32);
        let u = BVFunction::from_fn(d, |x| x, |_| 1.0, vec![Atom { x: 0.5, jump: -2.0 }]).unwrap();
        let lin = modular_exact(&PhiFunction::linear(), &u);
        assert!((lin.total.value() - total_variation(&u)).abs() < 1e-12);
        let sq = PhiFunction::autonomous(1.0, 2.0).unwrap();
        let v = BVFunction::from_fn(d, |x| x, |_| 1.0, vec![]).unwrap();
        assert!((modular_exact(&sq, &v).total.value() - 1.0).abs() < 1e-12);
        let a = ScalarField::Step { at: 0.5, left: 0.0, right: 1.0 };
        let dp = PhiFunction::double_phase(a).unwrap();
        let inside = BVFunction::heaviside(d, 0.75, 1.0).unwrap();
        let r = modular_exact(&dp, &inside);
        assert!(r.singular_part.is_infinite() && r.total.is_infinite());
        let outside = BVFunction::heaviside(d, 0.25, 1.0).unwrap();
        assert_eq!(modular_exact(&dp, &outside).total.value(), 1.0);
        let mid = modular_exact_with(&sq, &v, AcQuadrature::Midpoint);
        assert!((mid.total.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let d = unit(1000);
        let h = BVFunction::heaviside(d, 0.5, 1.0).unwrap();
        let r = modular_fidelity(&PhiFunction::linear(), &h, h.values()).unwrap();
        assert_eq!(r.total.value(), 1.0);
        let sq = PhiFunction::autonomous(1.0, 2.0).unwrap();
        let v = BVFunction::from_fn(d, |x| x, |_| 1.0, vec![]).unwrap();
        let r = modular_fidelity(&sq, &v, &vec![0.0; 1000]).unwrap();
        assert!((r.total.value() - 4.0 / 3.0).abs() < 1e-6);
        assert!(modular_fidelity(&sq, &v, &[0.0; 3]).is_err());
        let z = BVFunction::from_samples(d, vec![0.5; 1000]).unwrap();
        assert_eq!(modular_fidelity(&sq, &z, &vec![0.5; 1000]).unwrap().total, ExtReal::ZERO);
    }

    #[test]
    fn classification() {
        assert_eq!(classify_space(&PhiFunction::linear()).unwrap(), SpaceClass::ClassicalBV);
        assert_eq!(classify_space(&PhiFunction::autonomous(1.0, 2.0).unwrap()).unwrap(), SpaceClass::SobolevW1Phi);
        assert_eq!(classify_space(&PhiFunction::clr(ScalarField::constant(2.0)).unwrap()).unwrap(), SpaceClass::ClassicalBV);
        assert!(classify_space(&PhiFunction::clr(ScalarField::power_type(1.0, 0.0)).unwrap()).is_err());
    }

    #[test]
    fn atomize_and_images() {
        let d = unit(8);
        let vals = vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        let u = BVFunction::atomize(d, vals, 0.5).unwrap();
        assert_eq!(u.atoms(), &[Atom { x: 0.5, jump: 1.0 }]);
        assert!(u.gradient().iter().all(|g| *g == 0.0));
        let r = Domain::rect((0.0, 1.0), (0.0, 1.0), 4, 4).unwrap();
        let img: Vec<f64> = (0..16).map(|k| if k % 4 >= 2 { 1.0 } else { 0.0 }).collect();
        let u = BVFunction::atomize_image(r, img, 0.5).unwrap();
        assert_eq!(u.edges().len(), 4);
        assert!((total_variation(&u) - 1.0).abs() < 1e-14);
        let m = modular_exact(&PhiFunction::linear(), &u);
        assert!((m.total.value() - 1.0).abs() < 1e-14);
    }
}
