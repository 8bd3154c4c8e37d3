//! Uniform grids over regions of C^n ≅ R^(2n) and the discrete complex
//! Hessian.
//!
//! Real axes are ordered `x_1, y_1, ..., x_n, y_n` with `z_j = x_j + i y_j`.
//! Nodes are stored row-major with the last axis fastest.

use std::sync::Arc;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::cone::{self, HermitianForm};
use crate::error::{arg, domain, Result};

/// Largest per-axis node count for n = 1.
pub const MAX_NODES_N1: usize = 257;
/// Largest total node count for n >= 2 (33^4).
pub const MAX_TOTAL_NODES: usize = 33 * 33 * 33 * 33;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Topology {
    /// Euclidean ball of the given radius centred at the origin.
    Ball { radius: f64 },
    /// Cube `[lo, hi]^(2n)`.
    Cube { lo: f64, hi: f64 },
    /// Flat torus `R^(2n) / (period Z)^(2n)`.
    Torus { period: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    /// Carries Dirichlet data.
    Boundary,
    Exterior,
}

pub type Coords = SmallVec<[f64; 8]>;

#[derive(Debug)]
pub struct GridDomain {
    n: usize,
    nodes: usize,
    h: f64,
    origin: f64,
    topology: Topology,
    strides: SmallVec<[usize; 8]>,
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

impl GridDomain {
    /// Grid on `[-R, R]^(2n)` with `nodes` points per axis; interior nodes are
    /// those with `|x| < R - h/2`.
    pub fn ball(n: usize, radius: f64, nodes: usize) -> Result<Arc<Self>> {
        if !(radius > 0.0 && radius.is_finite()) {
            return arg(format!("ball radius must be positive, got {radius}"));
        }
        if nodes < 3 {
            return arg("ball grids need at least 3 nodes per axis");
        }
        let h = 2.0 * radius / (nodes - 1) as f64;
        Self::build(n, nodes, h, -radius, Topology::Ball { radius })
    }

    pub fn cube(n: usize, lo: f64, hi: f64, nodes: usize) -> Result<Arc<Self>> {
        if !(hi > lo) {
            return arg(format!("cube bounds must satisfy lo < hi, got [{lo}, {hi}]"));
        }
        if nodes < 3 {
            return arg("cube grids need at least 3 nodes per axis");
        }
        let h = (hi - lo) / (nodes - 1) as f64;
        Self::build(n, nodes, h, lo, Topology::Cube { lo, hi })
    }

    /// Periodic grid with `nodes` points per period on each axis.
    pub fn torus(n: usize, period: f64, nodes: usize) -> Result<Arc<Self>> {
        if !(period > 0.0 && period.is_finite()) {
            return arg(format!("torus period must be positive, got {period}"));
        }
        if nodes < 3 {
            return arg("torus grids need at least 3 nodes per axis");
        }
        let h = period / nodes as f64;
        Self::build(n, nodes, h, 0.0, Topology::Torus { period })
    }

    fn build(n: usize, nodes: usize, h: f64, origin: f64, topology: Topology) -> Result<Arc<Self>> {
        if n == 0 {
            return arg("complex dimension must be >= 1");
        }
        let axes = 2 * n;
        if n == 1 && nodes > MAX_NODES_N1 {
            return domain(format!(
                "grid of {nodes}^2 nodes exceeds the cap of {MAX_NODES_N1}^2"
            ));
        }
        let total = (nodes as f64).powi(axes as i32);
        if n >= 2 && total > MAX_TOTAL_NODES as f64 {
            return domain(format!(
                "grid of {nodes}^{axes} nodes exceeds the cap of {MAX_TOTAL_NODES} nodes"
            ));
        }
        let total = total as usize;
        let mut strides: SmallVec<[usize; 8]> = SmallVec::from_elem(1, axes);
        for a in (0..axes.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * nodes;
        }
        let mut dom = GridDomain {
            n,
            nodes,
            h,
            origin,
            topology,
            strides,
            kinds: vec![NodeKind::Exterior; total],
            interior: Vec::new(),
            boundary: Vec::new(),
        };
        dom.classify();
        Ok(Arc::new(dom))
    }

    fn classify(&mut self) {
        let total = self.kinds.len();
        match self.topology {
            Topology::Torus { .. } => {
                self.kinds.iter_mut().for_each(|k| *k = NodeKind::Interior);
            }
            Topology::Cube { .. } => {
                for i in 0..total {
                    let inside = self
                        .multi_index(i)
                        .iter()
                        .all(|&c| c > 0 && c + 1 < self.nodes);
                    self.kinds[i] = if inside {
                        NodeKind::Interior
                    } else {
                        NodeKind::Boundary
                    };
                }
            }
            Topology::Ball { radius } => {
                let limit = radius - 0.5 * self.h;
                for i in 0..total {
                    if self.norm_sqr(i) < limit * limit {
                        self.kinds[i] = NodeKind::Interior;
                    }
                }
                let offsets = self.stencil_offsets();
                for i in 0..total {
                    if self.kinds[i] != NodeKind::Interior {
                        continue;
                    }
                    for off in &offsets {
                        if let Some(j) = self.shift_multi(i, off) {
                            if self.kinds[j] == NodeKind::Exterior {
                                self.kinds[j] = NodeKind::Boundary;
                            }
                        }
                    }
                }
            }
        }
        self.interior = (0..total)
            .filter(|&i| self.kinds[i] == NodeKind::Interior)
            .collect();
        self.boundary = (0..total)
            .filter(|&i| self.kinds[i] == NodeKind::Boundary)
            .collect();
    }

    /// Pure and mixed unit offsets reachable by the Hessian stencil.
    fn stencil_offsets(&self) -> Vec<SmallVec<[(usize, isize); 2]>> {
        let axes = self.axes();
        let mut out = Vec::new();
        for a in 0..axes {
            for s in [-1isize, 1] {
                out.push(SmallVec::from_slice(&[(a, s)]));
            }
            for b in (a + 1)..axes {
                for sa in [-1isize, 1] {
                    for sb in [-1isize, 1] {
                        out.push(SmallVec::from_slice(&[(a, sa), (b, sb)]));
                    }
                }
            }
        }
        out
    }

    fn shift_multi(&self, i: usize, offsets: &[(usize, isize)]) -> Option<usize> {
        let mut j = i;
        for &(a, s) in offsets {
            j = self.shift(j, a, s)?;
        }
        Some(j)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of real axes, `2n`.
    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.topology, Topology::Torus { .. })
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.kinds[i]
    }

    /// Interior node indices in increasing (lexicographic) order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior and boundary nodes, i.e. every node carrying a value.
    pub fn is_active(&self, i: usize) -> bool {
        self.kinds[i] != NodeKind::Exterior
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn multi_index(&self, i: usize) -> SmallVec<[usize; 8]> {
        self.strides.iter().map(|&s| (i / s) % self.nodes).collect()
    }

    pub fn index_of(&self, multi: &[usize]) -> usize {
        multi.iter().zip(self.strides.iter()).map(|(c, s)| c * s).sum()
    }

    pub fn axis_index(&self, i: usize, axis: usize) -> usize {
        (i / self.strides[axis]) % self.nodes
    }

    pub fn coord(&self, i: usize, axis: usize) -> f64 {
        self.origin + self.axis_index(i, axis) as f64 * self.h
    }

    pub fn coords(&self, i: usize) -> Coords {
        (0..self.axes()).map(|a| self.coord(i, a)).collect()
    }

    pub fn norm_sqr(&self, i: usize) -> f64 {
        (0..self.axes()).map(|a| self.coord(i, a).powi(2)).sum()
    }

    /// Complex coordinates `z_j = x_j + i y_j`.
    pub fn complex_coords(&self, i: usize) -> SmallVec<[Complex64; 4]> {
        (0..self.n)
            .map(|j| Complex64::new(self.coord(i, 2 * j), self.coord(i, 2 * j + 1)))
            .collect()
    }

    /// Neighbour `step` nodes along `axis`; wraps on the torus, `None` when
    /// leaving the grid box otherwise.
    #[inline]
    pub fn shift(&self, i: usize, axis: usize, step: isize) -> Option<usize> {
        let c = (i / self.strides[axis]) % self.nodes;
        let stride = self.strides[axis];
        if self.is_periodic() {
            let nodes = self.nodes as isize;
            let target = (c as isize + step).rem_euclid(nodes) as usize;
            Some(i - c * stride + target * stride)
        } else {
            let target = c as isize + step;
            if target < 0 || target >= self.nodes as isize {
                None
            } else {
                Some(i - c * stride + target as usize * stride)
            }
        }
    }

    /// Index offsets of the `+1` and `-1` neighbours of an interior node along
    /// each axis. Offsets along different axes add.
    #[inline]
    pub(crate) fn neighbour_offsets(&self, i: usize) -> (SmallVec<[isize; 8]>, SmallVec<[isize; 8]>) {
        let axes = self.axes();
        let mut plus = SmallVec::with_capacity(axes);
        let mut minus = SmallVec::with_capacity(axes);
        if self.is_periodic() {
            let last = self.nodes - 1;
            for a in 0..axes {
                let s = self.strides[a] as isize;
                let c = (i / self.strides[a]) % self.nodes;
                plus.push(if c == last { -(last as isize) * s } else { s });
                minus.push(if c == 0 { last as isize * s } else { -s });
            }
        } else {
            for a in 0..axes {
                let s = self.strides[a] as isize;
                plus.push(s);
                minus.push(-s);
            }
        }
        (plus, minus)
    }

    /// Node index nearest to a coordinate tuple, if it lies on the grid.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.axes() {
            return None;
        }
        let mut multi: SmallVec<[usize; 8]> = SmallVec::new();
        for &v in x {
            let r = ((v - self.origin) / self.h).round();
            if self.is_periodic() {
                multi.push((r as i64).rem_euclid(self.nodes as i64) as usize);
            } else {
                if r < 0.0 || r >= self.nodes as f64 {
                    return None;
                }
                multi.push(r as usize);
            }
        }
        Some(self.index_of(&multi))
    }

    /// Euclidean distance from the node to the boundary of the continuous
    /// region; infinite on the torus.
    pub fn distance_to_boundary(&self, i: usize) -> f64 {
        match self.topology {
            Topology::Ball { radius } => radius - self.norm_sqr(i).sqrt(),
            Topology::Cube { lo, hi } => (0..self.axes())
                .map(|a| {
                    let x = self.coord(i, a);
                    (x - lo).min(hi - x)
                })
                .fold(f64::INFINITY, f64::min),
            Topology::Torus { .. } => f64::INFINITY,
        }
    }

    /// Parity colour: bit `a` is the parity of the index along axis `a`.
    /// Nodes of equal colour never share a Hessian stencil.
    pub fn color(&self, i: usize) -> usize {
        (0..self.axes()).fold(0, |acc, a| acc | ((self.axis_index(i, a) & 1) << a))
    }

    pub fn color_count(&self) -> usize {
        1 << self.axes()
    }
}

/// Real values on the nodes of a domain; exterior nodes hold NaN.
#[derive(Clone, Debug)]
pub struct GridFunction {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(domain: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return arg(format!(
                "expected {} values, got {}",
                domain.len(),
                values.len()
            ));
        }
        for i in 0..domain.len() {
            if domain.is_active(i) && !values[i].is_finite() {
                return arg(format!("non-finite value at node {i}"));
            }
        }
        Ok(Self { domain, values })
    }

    /// Samples `f` at every interior and boundary node.
    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..domain.len())
            .map(|i| {
                if domain.is_active(i) {
                    f(&domain.coords(i))
                } else {
                    f64::NAN
                }
            })
            .collect();
        Self { domain, values }
    }

    pub fn constant(domain: Arc<GridDomain>, c: f64) -> Self {
        Self::from_fn(domain, |_| c)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, v: f64) {
        self.values[i] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Largest `|self - other|` over the given nodes.
    pub fn max_diff_on(&self, other: &GridFunction, nodes: &[usize]) -> f64 {
        nodes
            .iter()
            .map(|&i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|self - other|` over interior and boundary nodes.
    pub fn max_diff(&self, other: &GridFunction) -> f64 {
        (0..self.domain.len())
            .filter(|&i| self.domain.is_active(i))
            .map(|i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Oscillation `max - min` over interior and boundary nodes.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = (0..self.domain.len())
            .filter(|&i| self.domain.is_active(i))
            .map(|i| self.values[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }
}

/// `A(u)(p) = [∂²u/∂z_j∂z̄_k]` by second-order central differences.
///
/// Pure second derivatives use 3-point differences, mixed ones the 4-point
/// cross. The result is exact on quadratic polynomials.
pub fn discrete_complex_hessian(u: &GridFunction, p: usize) -> Result<HermitianForm> {
    let d = u.domain();
    if p >= d.len() {
        return arg(format!("node {p} out of range"));
    }
    if d.kind(p) != NodeKind::Interior {
        return domain(format!("node {p} has no complete stencil"));
    }
    let mut out = HermitianForm::zeros(d.n());
    hessian_into(d, u.values(), p, &mut out);
    Ok(out)
}

/// Hessian at an interior node without checks; the hot path of the solvers.
#[inline]
pub(crate) fn hessian_into(d: &GridDomain, v: &[f64], p: usize, out: &mut HermitianForm) {
    let n = d.n();
    let inv_h2 = 1.0 / (d.h * d.h);
    let center = v[p];
    let (plus, minus) = d.neighbour_offsets(p);
    let at = |off: isize| v[(p as isize + off) as usize];
    let pure = |a: usize| -> f64 { (at(plus[a]) + at(minus[a]) - 2.0 * center) * inv_h2 };
    let mixed = |a: usize, b: usize| -> f64 {
        (at(plus[a] + plus[b]) - at(plus[a] + minus[b]) - at(minus[a] + plus[b])
            + at(minus[a] + minus[b]))
            * 0.25
            * inv_h2
    };
    for j in 0..n {
        let diag = 0.25 * (pure(2 * j) + pure(2 * j + 1));
        out.set_pair(j, j, Complex64::new(diag, 0.0));
        for k in (j + 1)..n {
            let re = 0.25 * (mixed(2 * j, 2 * k) + mixed(2 * j + 1, 2 * k + 1));
            let im = 0.25 * (mixed(2 * j, 2 * k + 1) - mixed(2 * j + 1, 2 * k));
            out.set_pair(j, k, Complex64::new(re, im));
        }
    }
}

/// Converts a real `2n x 2n` Hessian (row-major, axes `x_1, y_1, ...`) into
/// the complex Hessian `∂²u/∂z_j∂z̄_k`.
pub fn complex_hessian_from_real(n: usize, real: &[f64]) -> HermitianForm {
    let m = 2 * n;
    assert_eq!(real.len(), m * m);
    let r = |a: usize, b: usize| real[a * m + b];
    HermitianForm::from_fn(n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        Complex64::new(
            0.25 * (r(xj, xk) + r(yj, yk)),
            0.25 * (r(xj, yk) - r(yj, xk)),
        )
    })
}

/// `σ_m(A(u))` at every interior node; NaN elsewhere.
pub fn hessian_density_field(u: &GridFunction, m: usize) -> Result<GridFunction> {
    let d = u.domain().clone();
    let mut values = vec![f64::NAN; d.len()];
    let mut a = HermitianForm::zeros(d.n());
    for &p in d.interior() {
        hessian_into(&d, u.values(), p, &mut a);
        values[p] = cone::hessian_density(&a, m)?;
    }
    Ok(GridFunction { domain: d, values })
}

/// How Dirichlet data is read off a boundary function at the band nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundarySampling {
    /// Evaluate at the radial projection of the node onto the sphere `|z| = R`.
    Projected,
    /// Evaluate at the node itself; `g` must be defined on a neighbourhood of
    /// the boundary.
    Nodal,
}

/// Dirichlet data at the boundary nodes; other nodes hold NaN.
pub fn boundary_restriction(
    g: impl Fn(&[f64]) -> f64,
    d: &Arc<GridDomain>,
    sampling: BoundarySampling,
) -> Result<GridFunction> {
    let mut values = vec![f64::NAN; d.len()];
    match d.topology() {
        Topology::Torus { .. } => return domain("a torus has no boundary"),
        Topology::Ball { radius } => {
            for &i in d.boundary() {
                let x = d.coords(i);
                values[i] = match sampling {
                    BoundarySampling::Nodal => g(&x),
                    BoundarySampling::Projected => {
                        let r = d.norm_sqr(i).sqrt();
                        let y: Coords = x.iter().map(|v| v * radius / r).collect();
                        g(&y)
                    }
                };
            }
        }
        // cube boundary nodes lie on the faces already
        Topology::Cube { .. } => {
            for &i in d.boundary() {
                values[i] = g(&d.coords(i));
            }
        }
    }
    Ok(GridFunction {
        domain: d.clone(),
        values,
    })
}

impl GridFunction {
    /// Copies boundary values of `data` into `self`.
    pub fn with_boundary(mut self, data: &GridFunction) -> Self {
        for &i in self.domain.boundary() {
            self.values[i] = data.values[i];
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm2(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn ball_classification() {
        let d = GridDomain::ball(1, 1.0, 17).unwrap();
        let h = d.h();
        for i in 0..d.len() {
            let r = d.norm_sqr(i).sqrt();
            match d.kind(i) {
                NodeKind::Interior => assert!(r < 1.0 - h / 2.0),
                NodeKind::Boundary => assert!(r >= 1.0 - h / 2.0 && r < 1.0 + h),
                NodeKind::Exterior => assert!(r >= 1.0 - h / 2.0),
            }
        }
        // every interior node sees only interior or boundary nodes
        for &p in d.interior() {
            for a in 0..2 {
                for s in [-1, 1] {
                    let q = d.shift(p, a, s).unwrap();
                    assert_ne!(d.kind(q), NodeKind::Exterior);
                }
            }
        }
    }

    #[test]
    fn grid_caps() {
        assert!(GridDomain::ball(1, 1.0, 257).is_ok());
        assert!(GridDomain::ball(1, 1.0, 259).is_err());
        assert!(GridDomain::ball(2, 1.0, 35).is_err());
    }

    #[test]
    fn torus_wraps() {
        let d = GridDomain::torus(1, 1.0, 8).unwrap();
        assert!(d.boundary().is_empty());
        assert_eq!(d.interior().len(), 64);
        let i = d.index_of(&[0, 7]);
        assert_eq!(d.shift(i, 1, 1), Some(d.index_of(&[0, 0])));
        assert_eq!(d.shift(i, 0, -1), Some(d.index_of(&[7, 7])));
    }

    #[test]
    fn hessian_of_norm_squared_is_identity() {
        for (n, nodes) in [(1, 17), (2, 9)] {
            let d = GridDomain::ball(n, 1.0, nodes).unwrap();
            let u = GridFunction::from_fn(d.clone(), norm2);
            for &p in d.interior() {
                let a = discrete_complex_hessian(&u, p).unwrap();
                let diff = a.add(&HermitianForm::identity(n).scale(-1.0));
                assert!(diff.max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pluriharmonic_is_annihilated() {
        let d = GridDomain::ball(2, 1.0, 9).unwrap();
        // Re(z_1^2) = x_1^2 - y_1^2, Re(z_1 z_2) = x_1 x_2 - y_1 y_2
        let u = GridFunction::from_fn(d.clone(), |x| {
            x[0] * x[0] - x[1] * x[1] + 3.0 * (x[0] * x[2] - x[1] * x[3])
        });
        for &p in d.interior() {
            let a = discrete_complex_hessian(&u, p).unwrap();
            assert!(a.max_abs() < 1e-10);
        }
    }

    #[test]
    fn hessian_of_quartic() {
        // |z|^4: A = 2(|z|^2 δ_jk + conj(z_j) z_k) + O(h^2)
        let d = GridDomain::ball(2, 1.0, 17).unwrap();
        let u = GridFunction::from_fn(d.clone(), |x| norm2(x).powi(2));
        let h = d.h();
        for &p in d.interior().iter().step_by(97) {
            let z = d.complex_coords(p);
            let s: f64 = z.iter().map(|v| v.norm_sqr()).sum();
            let want = HermitianForm::from_fn(2, |j, k| {
                let delta = if j == k { s } else { 0.0 };
                (Complex64::new(delta, 0.0) + z[j].conj() * z[k]) * 2.0
            });
            let got = discrete_complex_hessian(&u, p).unwrap();
            // error of the central differences on a quartic is 2h^2 at most
            assert!(got.add(&want.scale(-1.0)).max_abs() <= 2.0 * h * h + 1e-12);
        }
    }

    #[test]
    fn incomplete_stencil_is_rejected() {
        let d = GridDomain::ball(1, 1.0, 9).unwrap();
        let u = GridFunction::constant(d.clone(), 0.0);
        let b = d.boundary()[0];
        assert!(discrete_complex_hessian(&u, b).is_err());
    }

    #[test]
    fn density_field_homogeneity() {
        let d = GridDomain::ball(2, 1.0, 9).unwrap();
        let c = 1.7;
        let u = GridFunction::from_fn(d.clone(), |x| c * norm2(x));
        for m in 1..=2 {
            let f = hessian_density_field(&u, m).unwrap();
            for &p in d.interior() {
                assert!((f.get(p) - c.powi(m as i32)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quartic_density_field() {
        let d = GridDomain::ball(2, 1.0, 17).unwrap();
        let u = GridFunction::from_fn(d.clone(), |x| norm2(x).powi(2));
        let f = hessian_density_field(&u, 2).unwrap();
        let h = d.h();
        for &p in d.interior() {
            let r2 = d.norm_sqr(p);
            assert!((f.get(p) - 8.0 * r2 * r2).abs() < 40.0 * h * h);
        }
    }

    #[test]
    fn boundary_sampling() {
        let d = GridDomain::ball(1, 1.0, 17).unwrap();
        let zero = boundary_restriction(|_| 0.0, &d, BoundarySampling::Projected).unwrap();
        assert!(d.boundary().iter().all(|&i| zero.get(i) == 0.0));
        let sq = boundary_restriction(norm2, &d, BoundarySampling::Projected).unwrap();
        assert!(d.boundary().iter().all(|&i| (sq.get(i) - 1.0).abs() < 1e-12));
        let re = boundary_restriction(|x| x[0], &d, BoundarySampling::Projected).unwrap();
        for &i in d.boundary() {
            let x = d.coords(i);
            let r = norm2(&x).sqrt();
            assert!((re.get(i) - x[0] / r).abs() < 1e-12);
        }
        let t = GridDomain::torus(1, 1.0, 8).unwrap();
        assert!(boundary_restriction(|_| 0.0, &t, BoundarySampling::Nodal).is_err());
    }

    #[test]
    fn torus_translation_equivariance() {
        let d = GridDomain::torus(2, 1.0, 6).unwrap();
        let u = GridFunction::from_fn(d.clone(), |x| {
            (6.0 * x[0]).sin() * (2.0 * std::f64::consts::PI * x[3]).cos() + x[1].powi(2)
        });
        // shift by one node along axis 2 via index rotation
        let mut shifted = u.clone();
        for i in 0..d.len() {
            shifted.set(d.shift(i, 2, 1).unwrap(), u.get(i));
        }
        for i in 0..d.len() {
            let a = discrete_complex_hessian(&u, i).unwrap();
            let b = discrete_complex_hessian(&shifted, d.shift(i, 2, 1).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn hermitian_output() {
        let d = GridDomain::ball(2, 1.0, 9).unwrap();
        let u = GridFunction::from_fn(d.clone(), |x| (x[0] * x[3]).sin() + (x[1] - x[2]).exp());
        for &p in d.interior() {
            let a = discrete_complex_hessian(&u, p).unwrap();
            assert!(a.hermitian_defect() <= 1e-12);
        }
    }

    #[test]
    fn real_to_complex_hessian() {
        // |z|^2 has real Hessian 2 I
        let mut h = vec![0.0; 16];
        for a in 0..4 {
            h[a * 4 + a] = 2.0;
        }
        let a = complex_hessian_from_real(2, &h);
        assert_eq!(a, HermitianForm::identity(2));
    }
}
