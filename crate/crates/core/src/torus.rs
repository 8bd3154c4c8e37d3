//! The periodic problem `σ_m(I + A(φ)) = F(x, φ)` on the flat torus
//! `R^(2n) / (L Z)^(2n)`, with translations as the transitive symmetry group.

use std::sync::Arc;
use std::time::Instant;

use crate::cone::DirectionSample;
use crate::dirichlet::{pde_residual, Iteration, SolveConfig, SolveReport, SweepOrder};
use crate::error::{arg, domain, Error, Result};
use crate::grid::{GridDomain, GridFunction};
use crate::scheme::Scheme;
use crate::viscosity::{separable_pass, RhsSpec};

/// `max_k f[(i+k) mod N] - c d(k)²` with `d` the periodic index distance.
///
/// Every output entry is a maximum over the same multiset of candidates as
/// its rotated counterpart, so the pass commutes exactly with index rotation.
fn periodic_line_max(f: &[f64], c: f64, out: &mut [f64]) {
    let n = f.len();
    for (i, o) in out.iter_mut().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for (j, &v) in f.iter().enumerate() {
            let k = i.abs_diff(j);
            let dist = k.min(n - k) as f64;
            let cand = v - c * dist * dist;
            if cand > best {
                best = cand;
            }
        }
        *o = best;
    }
}

fn require_torus(u: &GridFunction) -> Result<()> {
    if !u.domain().is_periodic() {
        return domain("group convolutions need a torus domain");
    }
    Ok(())
}

/// `u^ε(x) = max_τ u(x + τ) - |τ|²/ε²` over grid translations `τ`, with the
/// flat torus distance.
pub fn group_sup_convolution(u: &GridFunction, eps: f64) -> GridFunction {
    let d = u.domain();
    let c = d.h() * d.h() / (eps * eps);
    let mut values = u.values().to_vec();
    separable_pass(d, &mut values, |line, out| periodic_line_max(line, c, out));
    GridFunction::from_values(d.clone(), values).expect("finite input stays finite")
}

/// `u_ε(x) = min_τ u(x + τ) + |τ|²/ε²`.
pub fn group_inf_convolution(u: &GridFunction, eps: f64) -> GridFunction {
    group_sup_convolution(&u.map(|v| -v), eps).map(|v| -v)
}

/// Checked form of [`group_sup_convolution`].
pub fn group_sup_convolution_checked(u: &GridFunction, eps: f64) -> Result<GridFunction> {
    require_torus(u)?;
    if !(eps > 0.0) {
        return arg(format!("convolution scale must be positive, got {eps}"));
    }
    Ok(group_sup_convolution(u, eps))
}

#[derive(Clone, Debug)]
pub struct TorusProblem {
    pub n: usize,
    pub m: usize,
    pub period: f64,
    pub nodes: usize,
    /// Must carry brackets `(t_0, t_1)`.
    pub rhs: RhsSpec,
}

/// Number of `t` samples of the strict-monotonicity check.
pub const MONOTONE_SAMPLES: usize = 33;

impl TorusProblem {
    pub fn domain(&self) -> Result<Arc<GridDomain>> {
        GridDomain::torus(self.n, self.period, self.nodes)
    }

    pub fn brackets(&self) -> Result<(f64, f64)> {
        match self.rhs.brackets {
            Some((t0, t1)) if t0 <= t1 => Ok((t0, t1)),
            Some((t0, t1)) => arg(format!("brackets must satisfy t0 <= t1, got ({t0}, {t1})")),
            None => arg("torus problems need brackets (t0, t1)"),
        }
    }

    /// `F(x,t_0) ≤ 1 ≤ F(x,t_1)` at every node and strict increase in `t`
    /// on `[t_0 - 1, t_1 + 1]`.
    pub fn validate(&self, d: &GridDomain) -> Result<()> {
        if self.m == 0 || self.m > self.n {
            return arg(format!("order m = {} out of range for n = {}", self.m, self.n));
        }
        let (t0, t1) = self.brackets()?;
        self.rhs.validate(d, t0 - 1.0, t1 + 1.0, MONOTONE_SAMPLES, true)?;
        for &p in d.interior() {
            let x = d.coords(p);
            let (lo, hi) = (self.rhs.eval(&x, t0), self.rhs.eval(&x, t1));
            if lo > 1.0 || hi < 1.0 {
                return arg(format!(
                    "brackets fail at x = {x:?}: F(x,t0) = {lo}, F(x,t1) = {hi}"
                ));
            }
        }
        Ok(())
    }
}

/// Solves the torus problem from the constant `cfg.initial_value` (the lower
/// bracket by default).
pub fn torus_solve(problem: &TorusProblem, cfg: &SolveConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let d = problem.domain()?;
    cfg.check(d.n())?;
    if cfg.m != problem.m {
        return arg(format!("config order {} differs from problem order {}", cfg.m, problem.m));
    }
    problem.validate(&d)?;
    if cfg.sweep_order == SweepOrder::Colored && d.nodes_per_axis() % 2 != 0 {
        return arg("coloured sweeps on a torus need an even node count per axis");
    }
    let (t0, t1) = problem.brackets()?;
    let init = cfg.initial_value.unwrap_or(t0);
    if !(t0..=t1).contains(&init) {
        return arg(format!("initial value {init} lies outside the brackets [{t0}, {t1}]"));
    }
    let sample = DirectionSample::generate(d.n(), cfg.m, cfg.direction_count, cfg.seed, None)?;
    let scheme = Scheme::new(d.clone(), cfg.m, &sample, &problem.rhs, 1.0, cfg.bisection_tol)?;
    let iteration = Iteration {
        scheme,
        cfg,
        lower: None,
        upper: None,
        bounds: Some((t0, t1)),
    };
    let out = iteration.run(&d, vec![init; d.len()]).map_err(|e| match e {
        Error::Internal(msg) => Error::Internal(format!("bracket violation: {msg}")),
        other => other,
    })?;
    let solution = GridFunction::from_values(d, out.values)?;
    let pde_residual = pde_residual(&solution, cfg.m, &problem.rhs, 1.0)?;
    let report = SolveReport {
        solution,
        residual_history: out.history,
        sandwich: out.sandwich,
        wall_time: start.elapsed(),
        converged: out.converged,
        max_decrease: out.max_decrease,
        pde_residual,
        barrier_scale: None,
        direction_count: sample.len(),
    };
    if !report.converged {
        return Err(Error::NotConverged(Box::new(report)));
    }
    Ok(report)
}
