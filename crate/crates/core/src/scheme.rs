//! The sampled-infimum scheme shared by the Dirichlet and torus solvers.
//!
//! At an interior node `p` the discrete operator is
//!
//! ```text
//! L(φ)(p) = min_α tr(C_α (s I + A_h(φ)(p)))
//! ```
//!
//! over a direction sample, with `C_α` the mixed coefficients of `α` and
//! `s = 0` (ball) or `1` (torus). Only the diagonal of `A_h` sees the centre
//! value, with weight `-1/h²`, so as a function of the centre value `t` each
//! branch is `ℓ_α + b_α (φ(p) - t)` with `b_α = tr C_α / h² > 0`.
//!
//! The sample is completed by the self-direction `α = A_h/σ_m(A_h)^(1/m)`,
//! whose branch is `σ_m(λ + (φ(p) - t)/h²)^(1/m)` in the eigenvalues `λ` of
//! the jet. On the cone it is the exact infimum, so sampled branches only
//! enter through round-off; off the cone the infimum is non-positive and the
//! branch is continued by a negative linear function. The node update solves
//! `L(t) = F^(1/m)(x_p, t)`, whose left side is strictly decreasing and right
//! side non-decreasing in `t`.

use std::sync::Arc;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::cone::{self, binomial, clamped_root, gamma_member, DirectionSample, HermitianForm};
use crate::error::{Error, Result};
use crate::grid::{hessian_into, GridDomain};
use crate::viscosity::{PointFn, ProfileFn, RhsForm, RhsSpec};

/// Order in which a sweep visits interior nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOrder {
    /// Gauss-Seidel in increasing node index.
    Lexicographic,
    /// Gauss-Seidel over the `2^(2n)` parity colours; nodes of one colour are
    /// updated together and may be processed in parallel.
    Colored,
    /// Jacobi: every node is updated from the values of the previous sweep.
    Simultaneous,
}

impl SweepOrder {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lexicographic" => Some(Self::Lexicographic),
            "colored" | "coloured" => Some(Self::Colored),
            "simultaneous" | "jacobi" => Some(Self::Simultaneous),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lexicographic => "lexicographic",
            Self::Colored => "colored",
            Self::Simultaneous => "simultaneous",
        }
    }
}

enum NodeRhs {
    Separable { root_weight: Vec<f64>, profile: ProfileFn },
    General { f: PointFn, coords: Vec<f64> },
}

/// One direction of the sample flattened for the inner product with the
/// real parameters `(a_jj; Re a_jk, Im a_jk for j < k)` of `A`.
struct Direction {
    weights: SmallVec<[f64; 16]>,
    /// `tr C_α / h²`.
    slope: f64,
}

pub(crate) struct Scheme {
    domain: Arc<GridDomain>,
    m: usize,
    inv_h2: f64,
    jet_shift: f64,
    norm: f64,
    directions: Vec<Direction>,
    rhs: NodeRhs,
    bisection_tol: f64,
}

pub(crate) struct Workspace {
    a: HermitianForm,
    params: SmallVec<[f64; 16]>,
    ell: Vec<f64>,
    slope: Vec<f64>,
    lambda: SmallVec<[f64; 8]>,
}

fn flatten(a: &HermitianForm, out: &mut SmallVec<[f64; 16]>) {
    let n = a.dim();
    out.clear();
    for j in 0..n {
        out.push(a.get(j, j).re);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let v = a.get(j, k);
            out.push(v.re);
            out.push(v.im);
        }
    }
}

impl Scheme {
    pub(crate) fn new(
        domain: Arc<GridDomain>,
        m: usize,
        sample: &DirectionSample,
        rhs: &RhsSpec,
        jet_shift: f64,
        bisection_tol: f64,
    ) -> Result<Self> {
        let n = domain.n();
        let h = domain.h();
        let inv_h2 = 1.0 / (h * h);
        let mut directions = Vec::with_capacity(sample.len());
        for alpha in &sample.directions {
            let c = cone::mixed_linear_coefficients(alpha, m)?;
            // tr(C A) = Σ c_jj a_jj + 2 Σ_(j<k) (Re c_jk Re a_jk + Im c_jk Im a_jk)
            let mut weights = SmallVec::new();
            flatten(&c, &mut weights);
            for w in weights.iter_mut().skip(n) {
                *w *= 2.0;
            }
            directions.push(Direction {
                weights,
                slope: c.trace() * inv_h2,
            });
        }
        let rhs = match rhs.form() {
            RhsForm::Separable { weight, profile } => {
                let mut root_weight = vec![0.0; domain.len()];
                for &p in domain.interior() {
                    root_weight[p] = clamped_root(weight(&domain.coords(p)), m);
                }
                NodeRhs::Separable {
                    root_weight,
                    profile: profile.clone(),
                }
            }
            RhsForm::General(f) => {
                let axes = domain.axes();
                let mut coords = vec![0.0; domain.len() * axes];
                for &p in domain.interior() {
                    coords[p * axes..(p + 1) * axes].copy_from_slice(&domain.coords(p));
                }
                NodeRhs::General { f: f.clone(), coords }
            }
        };
        Ok(Self {
            m,
            inv_h2,
            jet_shift,
            norm: binomial(n, m),
            directions,
            rhs,
            bisection_tol,
            domain,
        })
    }

    pub(crate) fn workspace(&self) -> Workspace {
        Workspace {
            a: HermitianForm::zeros(self.domain.n()),
            params: SmallVec::new(),
            ell: Vec::with_capacity(self.directions.len() + 1),
            slope: Vec::with_capacity(self.directions.len() + 1),
            lambda: SmallVec::new(),
        }
    }

    #[inline]
    fn rhs_root(&self, p: usize, t: f64) -> f64 {
        match &self.rhs {
            NodeRhs::Separable { root_weight, profile } => {
                let w = root_weight[p];
                if w == 0.0 {
                    0.0
                } else {
                    w * clamped_root(profile(t), self.m)
                }
            }
            NodeRhs::General { f, coords } => {
                let axes = self.domain.axes();
                clamped_root(f(&coords[p * axes..(p + 1) * axes], t), self.m)
            }
        }
    }

    /// Fills `ws.ell` / `ws.slope` with the sampled branches at node `p` and
    /// `ws.lambda` with the spectrum of the jet, for the current values `v`.
    fn branches(&self, v: &[f64], p: usize, ws: &mut Workspace) -> Result<()> {
        hessian_into(&self.domain, v, p, &mut ws.a);
        if self.jet_shift != 0.0 {
            ws.a = ws.a.add_scaled_identity(self.jet_shift);
        }
        flatten(&ws.a, &mut ws.params);
        ws.ell.clear();
        ws.slope.clear();
        for d in &self.directions {
            let l: f64 = d.weights.iter().zip(ws.params.iter()).map(|(w, a)| w * a).sum();
            ws.ell.push(l);
            ws.slope.push(d.slope);
        }
        ws.lambda = cone::spectrum(&ws.a)?;
        Ok(())
    }

    /// Self-direction branch `σ_m(λ + s)^(1/m)` on the cone, continued by
    /// `s - s_c` below the cone entry point `s_c`.
    fn exact_branch(&self, lambda: &[f64], s: f64, entry: &mut Option<f64>) -> f64 {
        let mut mu: SmallVec<[f64; 8]> = lambda.iter().map(|l| l + s).collect();
        let e = cone::elementary_symmetric_all(&mu, self.m);
        if e[1..].iter().all(|&v| v >= 0.0) {
            return clamped_root(e[self.m] / self.norm, self.m);
        }
        let sc = *entry.get_or_insert_with(|| {
            // membership is monotone in s; (λ + hi) is strictly positive
            let low = lambda.iter().copied().fold(f64::INFINITY, f64::min);
            let (mut lo, mut hi) = (s, -low + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                mu.iter_mut().zip(lambda).for_each(|(m, l)| *m = l + mid);
                if gamma_member(&mu, self.m, 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        });
        (s - sc).min(0.0)
    }

    #[cfg(test)]
    /// Discrete operator value at the current centre value.
    pub(crate) fn operator_value(&self, v: &[f64], p: usize, ws: &mut Workspace) -> Result<f64> {
        self.branches(v, p, ws)?;
        let sampled = ws.ell.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(sampled.min(self.exact_branch(&ws.lambda, 0.0, &mut None)))
    }

    /// New centre value at `p` solving the scalar node equation.
    ///
    /// Every branch falls at rate at least `1/h²` as the centre value rises
    /// (`tr C_α ≥ 1` for normalised directions, and `d/ds σ_m(λ+s)^(1/m) ≥ 1`
    /// by concavity), so one step of that slope brackets the root.
    pub(crate) fn solve_node(&self, v: &[f64], p: usize, ws: &mut Workspace) -> Result<f64> {
        self.branches(v, p, ws)?;
        let t0 = v[p];
        let ell = &ws.ell;
        let slope = &ws.slope;
        let lambda = &ws.lambda;
        let b = self.inv_h2;
        let mut entry = None;
        let mut g = |t: f64| -> f64 {
            let sampled = ell
                .iter()
                .zip(slope.iter())
                .map(|(l, b)| l + b * (t0 - t))
                .fold(f64::INFINITY, f64::min);
            let exact = self.exact_branch(lambda, (t0 - t) * b, &mut entry);
            sampled.min(exact) - self.rhs_root(p, t)
        };
        // bisection_tol bounds the node residual; the bracket may stop at
        // the matching width tol · h²
        let small = 0.5 * self.bisection_tol;
        let width = self.bisection_tol / b;
        let g0 = g(t0);
        if g0.abs() <= small {
            return Ok(t0);
        }
        let (mut lo, mut hi, mut glo, mut ghi);
        if g0 > 0.0 {
            lo = t0;
            glo = g0;
            hi = t0 + g0 / b;
            ghi = g(hi);
            let mut guard = 0;
            while ghi > 0.0 {
                if ghi <= small {
                    return Ok(hi);
                }
                lo = hi;
                glo = ghi;
                hi += ghi / b;
                ghi = g(hi);
                guard += 1;
                if guard > 64 {
                    return Err(self.bracket_failure(p, t0));
                }
            }
        } else {
            hi = t0;
            ghi = g0;
            lo = t0 + g0 / b;
            glo = g(lo);
            let mut guard = 0;
            while glo < 0.0 {
                if -glo <= small {
                    return Ok(lo);
                }
                hi = lo;
                ghi = glo;
                lo += glo / b;
                glo = g(lo);
                guard += 1;
                if guard > 64 {
                    return Err(self.bracket_failure(p, t0));
                }
            }
        }
        if glo == 0.0 {
            return Ok(lo);
        }
        if ghi == 0.0 {
            return Ok(hi);
        }
        // Illinois regula falsi
        let mut side = 0i8;
        for _ in 0..200 {
            if hi - lo <= width {
                break;
            }
            let mut t = lo - glo * (hi - lo) / (ghi - glo);
            if !(t > lo && t < hi) {
                t = 0.5 * (lo + hi);
            }
            let gt = g(t);
            if gt == 0.0 || gt.abs() <= small {
                return Ok(t);
            }
            if gt > 0.0 {
                lo = t;
                glo = gt;
                if side == 1 {
                    ghi *= 0.5;
                }
                side = 1;
            } else {
                hi = t;
                ghi = gt;
                if side == -1 {
                    glo *= 0.5;
                }
                side = -1;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn bracket_failure(&self, p: usize, t0: f64) -> Error {
        Error::Numerical {
            method: "node solve",
            detail: format!("could not bracket the root at node {p} from t = {t0}"),
        }
    }

    /// One sweep over the interior; returns the largest change and the
    /// largest decrease of any node value.
    pub(crate) fn sweep(
        &self,
        v: &mut [f64],
        order: SweepOrder,
        colors: &[Vec<usize>],
        pool: Option<&rayon::ThreadPool>,
        ws: &mut Workspace,
    ) -> Result<(f64, f64)> {
        let mut change: f64 = 0.0;
        let mut decrease: f64 = 0.0;
        let mut record = |old: f64, new: f64| {
            change = change.max((new - old).abs());
            decrease = decrease.max(old - new);
        };
        match order {
            SweepOrder::Lexicographic => {
                for &p in self.domain.interior() {
                    let t = self.solve_node(v, p, ws)?;
                    record(v[p], t);
                    v[p] = t;
                }
            }
            SweepOrder::Colored => {
                for nodes in colors {
                    let updates = self.batch(v, nodes, pool, ws)?;
                    for (&p, t) in nodes.iter().zip(updates) {
                        record(v[p], t);
                        v[p] = t;
                    }
                }
            }
            SweepOrder::Simultaneous => {
                let nodes = self.domain.interior();
                let updates = self.batch(v, nodes, pool, ws)?;
                for (&p, t) in nodes.iter().zip(updates) {
                    record(v[p], t);
                    v[p] = t;
                }
            }
        }
        Ok((change, decrease))
    }

    fn batch(
        &self,
        v: &[f64],
        nodes: &[usize],
        pool: Option<&rayon::ThreadPool>,
        ws: &mut Workspace,
    ) -> Result<Vec<f64>> {
        match pool {
            Some(pool) => pool.install(|| {
                nodes
                    .par_iter()
                    .map_init(|| self.workspace(), |ws, &p| self.solve_node(v, p, ws))
                    .collect()
            }),
            None => nodes.iter().map(|&p| self.solve_node(v, p, ws)).collect(),
        }
    }
}

/// Interior nodes grouped by parity colour.
pub(crate) fn color_classes(d: &GridDomain) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); d.color_count()];
    for &p in d.interior() {
        classes[d.color(p)].push(p);
    }
    classes.retain(|c| !c.is_empty());
    classes
}

pub(crate) fn thread_pool(threads: usize) -> Result<Option<rayon::ThreadPool>> {
    if threads <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::Argument(format!("cannot start {threads} worker threads: {e}")))
}
