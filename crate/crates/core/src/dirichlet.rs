//! Perron-style monotone solver for `σ_m(A(φ)) = F(x, φ)` with Dirichlet data
//! on balls (and cubes).
//!
//! The iteration starts from a subsolution barrier `u₀ + Aρ` built on the
//! harmonic extension `u₀` of the data, and raises it node by node with the
//! sampled-infimum scheme until the sweep change drops below `tol_sweep`.
//! The harmonic extension itself is a supersolution and caps the iterates.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::cone::{self, binomial, DirectionSample, HermitianForm, TOL_CONE};
use crate::error::{arg, domain, Error, Result};
use crate::grid::{hessian_into, GridDomain, GridFunction, Topology};
use crate::scheme::{color_classes, thread_pool, Scheme};
pub use crate::scheme::SweepOrder;
use crate::viscosity::{verify_subsolution, verify_supersolution, RhsSpec, VerifyOptions};

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub m: usize,
    /// Size of the fixed direction sample, identity included.
    pub direction_count: usize,
    pub tol_sweep: f64,
    pub max_sweeps: usize,
    /// Residual `|L(t) - F^(1/m)(x, t)|` at which a node solve stops.
    pub bisection_tol: f64,
    pub seed: u64,
    pub sweep_order: SweepOrder,
    pub threads: usize,
    /// Largest tolerated distance of the final iterate outside its barriers.
    pub sandwich_tol: f64,
    /// Options of the final sub/supersolution verification.
    pub verify: VerifyOptions,
    /// Constant starting value on a torus; the lower bracket by default.
    pub initial_value: Option<f64>,
}

impl SolveConfig {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            direction_count: 8,
            tol_sweep: 1e-8,
            max_sweeps: 200_000,
            bisection_tol: 1e-10,
            seed: 0x5eed,
            sweep_order: SweepOrder::Lexicographic,
            threads: 1,
            sandwich_tol: 1e-6,
            verify: VerifyOptions::default(),
            initial_value: None,
        }
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.m == 0 || self.m > n {
            return arg(format!("order m = {} out of range for n = {n}", self.m));
        }
        if self.direction_count == 0 {
            return arg("direction_count must be >= 1");
        }
        if !(self.tol_sweep > 0.0) || !(self.bisection_tol > 0.0) {
            return arg("tolerances must be positive");
        }
        if self.max_sweeps == 0 {
            return arg("max_sweeps must be >= 1");
        }
        Ok(())
    }
}

/// Position of the final iterate between its barriers.
///
/// Sweeps are projected back onto `[lower, upper]`; the distances are those
/// of the last sweep before its projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichCertificate {
    /// `min (φ - lower)`.
    pub above_lower: f64,
    /// `min (upper - φ)`.
    pub below_upper: f64,
    /// Largest correction applied by any projection.
    pub max_projection: f64,
}

impl SandwichCertificate {
    fn new() -> Self {
        Self {
            above_lower: f64::INFINITY,
            below_upper: f64::INFINITY,
            max_projection: 0.0,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.above_lower >= -tol && self.below_upper >= -tol
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: GridFunction,
    /// Sup-norm change of each sweep.
    pub residual_history: Vec<f64>,
    pub sandwich: SandwichCertificate,
    pub wall_time: Duration,
    pub converged: bool,
    /// Largest decrease of a node value within one sweep.
    pub max_decrease: f64,
    /// `max |σ_m(sI + A(φ)) - F(x, φ)|` over interior nodes at the end.
    pub pde_residual: f64,
    /// Scale `A` of the barrier `u₀ + Aρ`, for Dirichlet solves.
    pub barrier_scale: Option<f64>,
    pub direction_count: usize,
}

impl SolveReport {
    pub fn sweeps(&self) -> usize {
        self.residual_history.len()
    }

    pub fn final_change(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} after {} sweeps (last change {:.3e}, pde residual {:.3e}, {:.2?})",
            if self.converged { "converged" } else { "not converged" },
            self.sweeps(),
            self.final_change(),
            self.pde_residual,
            self.wall_time
        )
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "converged = {}", self.converged)?;
        writeln!(f, "sweeps = {}", self.sweeps())?;
        writeln!(f, "final_change = {:e}", self.final_change())?;
        writeln!(f, "pde_residual = {:e}", self.pde_residual)?;
        writeln!(f, "max_decrease = {:e}", self.max_decrease)?;
        writeln!(f, "sandwich_above_lower = {:e}", self.sandwich.above_lower)?;
        writeln!(f, "sandwich_below_upper = {:e}", self.sandwich.below_upper)?;
        writeln!(f, "sandwich_max_projection = {:e}", self.sandwich.max_projection)?;
        if let Some(a) = self.barrier_scale {
            writeln!(f, "barrier_scale = {a}")?;
        }
        writeln!(f, "direction_count = {}", self.direction_count)?;
        writeln!(f, "wall_time_s = {:.3}", self.wall_time.as_secs_f64())
    }
}

fn require_dirichlet(g: &GridFunction) -> Result<()> {
    let d = g.domain();
    if d.is_periodic() {
        return domain("Dirichlet problems need a ball or cube domain");
    }
    for &b in d.boundary() {
        if !g.get(b).is_finite() {
            return arg(format!("boundary data missing at node {b}"));
        }
    }
    Ok(())
}

/// Discrete harmonic extension of the boundary values of `g`:
/// `tr A(u) = 0` on the interior, by Gauss-Seidel until the sweep change
/// falls below `tol`.
pub fn harmonic_supersolution(g: &GridFunction, tol: f64, max_sweeps: usize) -> Result<GridFunction> {
    require_dirichlet(g)?;
    let d = g.domain().clone();
    let boundary = d.boundary();
    let mean = boundary.iter().map(|&b| g.get(b)).sum::<f64>() / boundary.len().max(1) as f64;
    let mut v = g.values().to_vec();
    for &p in d.interior() {
        v[p] = mean;
    }
    let axes = d.axes();
    let weight = 1.0 / (2 * axes) as f64;
    for _ in 0..max_sweeps {
        let mut change: f64 = 0.0;
        for &p in d.interior() {
            let (plus, minus) = d.neighbour_offsets(p);
            let mut s = 0.0;
            for a in 0..axes {
                s += v[(p as isize + plus[a]) as usize] + v[(p as isize + minus[a]) as usize];
            }
            let new = s * weight;
            change = change.max((new - v[p]).abs());
            v[p] = new;
        }
        if change < tol {
            return GridFunction::from_values(d, v);
        }
    }
    Err(Error::Numerical {
        method: "harmonic extension",
        detail: format!("no convergence to {tol:e} within {max_sweeps} sweeps"),
    })
}

/// Barrier `u₀ + Aρ` and its ingredients.
#[derive(Clone, Debug)]
pub struct Barrier {
    pub function: GridFunction,
    pub scale: f64,
    pub harmonic: GridFunction,
}

/// Largest barrier exponent tried: `A ≤ 2^20`.
pub const MAX_BARRIER_EXPONENT: u32 = 20;

/// Radius of the outermost node carrying Dirichlet data. The defining
/// function `ρ = |z|² - R_b²` is nonpositive on every such node.
fn band_radius(d: &GridDomain) -> f64 {
    d.boundary()
        .iter()
        .map(|&b| d.norm_sqr(b))
        .fold(0.0, f64::max)
        .sqrt()
}

/// Whether `σ_m(A(w)) ≥ F(x, w)` and `A(w) ∈ Γ_m` hold at every interior
/// node for the raw discrete jet.
fn is_discrete_subsolution(w: &GridFunction, m: usize, rhs: &RhsSpec) -> Result<bool> {
    let d = w.domain();
    let norm = binomial(d.n(), m);
    let mut a = HermitianForm::zeros(d.n());
    for &p in d.interior() {
        hessian_into(d, w.values(), p, &mut a);
        let lambda = cone::spectrum(&a)?;
        if !cone::gamma_member(&lambda, m, TOL_CONE) {
            return Ok(false);
        }
        let sigma = cone::elementary_symmetric_all(&lambda, m)[m] / norm;
        if sigma < rhs.eval(&d.coords(p), w.get(p)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sweep budget of the harmonic majorant, independent of the solver budget.
pub const HARMONIC_MAX_SWEEPS: usize = 2_000_000;

/// Subsolution barrier `u₀ + Aρ` with the smallest `A = 2^k` for which the
/// barrier passes both the raw discrete check and [`verify_subsolution`].
/// The raw check sees `u₀ + Aρ` on the boundary band as well; the returned
/// function keeps the data of `g` there.
pub fn subsolution_barrier(g: &GridFunction, rhs: &RhsSpec, m: usize, cfg: &SolveConfig) -> Result<Barrier> {
    require_dirichlet(g)?;
    let d = g.domain().clone();
    if m == 0 || m > d.n() {
        return arg(format!("order m = {m} out of range for n = {}", d.n()));
    }
    let harmonic = harmonic_supersolution(g, 0.01 * cfg.tol_sweep, HARMONIC_MAX_SWEEPS)?;
    let rb2 = band_radius(&d).powi(2);
    for k in 0..=MAX_BARRIER_EXPONENT {
        let scale = f64::from(1u32 << k);
        let mut extended = harmonic.clone();
        for i in (0..d.len()).filter(|&i| d.is_active(i)) {
            extended.set(i, harmonic.get(i) + scale * (d.norm_sqr(i) - rb2));
        }
        if !is_discrete_subsolution(&extended, m, rhs)? {
            continue;
        }
        let mut w = harmonic.clone();
        for &p in d.interior() {
            w.set(p, extended.get(p));
        }
        if verify_subsolution(&w, m, rhs, &cfg.verify)?.passed() {
            return Ok(Barrier {
                function: w,
                scale,
                harmonic,
            });
        }
    }
    domain(format!(
        "no subsolution barrier with A <= 2^{MAX_BARRIER_EXPONENT}: right-hand side {} is inadmissible",
        rhs.label()
    ))
}

fn value_range(f: &GridFunction) -> (f64, f64) {
    let d = f.domain();
    (0..d.len())
        .filter(|&i| d.is_active(i))
        .map(|i| f.get(i))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// `max |σ_m(sI + A(φ)) - F(x, φ)|` over the interior.
pub(crate) fn pde_residual(phi: &GridFunction, m: usize, rhs: &RhsSpec, shift: f64) -> Result<f64> {
    let d = phi.domain();
    let norm = binomial(d.n(), m);
    let mut a = HermitianForm::zeros(d.n());
    let mut worst: f64 = 0.0;
    for &p in d.interior() {
        hessian_into(d, phi.values(), p, &mut a);
        let lambda: smallvec::SmallVec<[f64; 8]> = cone::spectrum(&a)?.iter().map(|l| l + shift).collect();
        let sigma = cone::elementary_symmetric_all(&lambda, m)[m] / norm;
        worst = worst.max((sigma - rhs.eval(&d.coords(p), phi.get(p))).abs());
    }
    Ok(worst)
}

/// State shared by the Dirichlet and torus iterations.
pub(crate) struct Iteration<'a> {
    pub scheme: Scheme,
    pub cfg: &'a SolveConfig,
    pub lower: Option<&'a [f64]>,
    pub upper: Option<&'a [f64]>,
    /// Constant bounds used on the torus instead of barrier functions.
    pub bounds: Option<(f64, f64)>,
}

pub(crate) struct Outcome {
    pub values: Vec<f64>,
    pub history: Vec<f64>,
    pub sandwich: SandwichCertificate,
    pub max_decrease: f64,
    pub converged: bool,
}

impl Iteration<'_> {
    pub(crate) fn run(&self, d: &Arc<GridDomain>, mut v: Vec<f64>) -> Result<Outcome> {
        let colors = if self.cfg.sweep_order == SweepOrder::Colored {
            color_classes(d)
        } else {
            Vec::new()
        };
        let pool = thread_pool(self.cfg.threads)?;
        let mut ws = self.scheme.workspace();
        let mut history = Vec::new();
        let mut sandwich = SandwichCertificate::new();
        let mut max_decrease: f64 = 0.0;
        self.project(d, &mut v, &mut sandwich);
        let mut converged = false;
        for _ in 0..self.cfg.max_sweeps {
            let (change, decrease) =
                self.scheme
                    .sweep(&mut v, self.cfg.sweep_order, &colors, pool.as_ref(), &mut ws)?;
            history.push(change);
            max_decrease = max_decrease.max(decrease);
            if !change.is_finite() {
                return Err(Error::Numerical {
                    method: "monotone sweep",
                    detail: "iterate became non-finite".into(),
                });
            }
            self.project(d, &mut v, &mut sandwich);
            if change < self.cfg.tol_sweep {
                converged = true;
                break;
            }
        }
        if !sandwich.holds(self.cfg.sandwich_tol) {
            return Err(Error::Internal(format!(
                "iterate left its barriers: min(φ - lower) = {:e}, min(upper - φ) = {:e}",
                sandwich.above_lower, sandwich.below_upper
            )));
        }
        Ok(Outcome {
            values: v,
            history,
            sandwich,
            max_decrease,
            converged,
        })
    }

    /// Records the distances of `v` to its barriers, then clamps `v` into them.
    fn project(&self, d: &GridDomain, v: &mut [f64], s: &mut SandwichCertificate) {
        let mut above = f64::INFINITY;
        let mut below = f64::INFINITY;
        for &p in d.interior() {
            let (lo, hi) = match (self.lower, self.upper, self.bounds) {
                (Some(l), Some(u), _) => (l[p], u[p]),
                (_, _, Some((l, u))) => (l, u),
                (l, u, None) => (
                    l.map_or(f64::NEG_INFINITY, |l| l[p]),
                    u.map_or(f64::INFINITY, |u| u[p]),
                ),
            };
            above = above.min(v[p] - lo);
            below = below.min(hi - v[p]);
            let c = v[p].clamp(lo, hi);
            s.max_projection = s.max_projection.max((c - v[p]).abs());
            v[p] = c;
        }
        s.above_lower = above;
        s.below_upper = below;
    }
}

/// Solves the Dirichlet problem with boundary data held by `g`.
pub fn perron_solve(g: &GridFunction, rhs: &RhsSpec, cfg: &SolveConfig) -> Result<SolveReport> {
    let start = Instant::now();
    require_dirichlet(g)?;
    let d = g.domain().clone();
    cfg.check(d.n())?;
    // screen F on the data range first so that a bad F is reported as such
    // rather than as a missing barrier
    let (g_lo, g_hi) = value_range(g);
    rhs.validate(&d, g_lo - 1.0, g_hi, 9, false)?;
    let barrier = subsolution_barrier(g, rhs, cfg.m, cfg)?;
    let upper = barrier.harmonic.clone();
    let (lo, _) = value_range(&barrier.function);
    let (_, hi) = value_range(&upper);
    rhs.validate(&d, lo, hi, 9, false)?;

    let sample = DirectionSample::generate(d.n(), cfg.m, cfg.direction_count, cfg.seed, None)?;
    let scheme = Scheme::new(d.clone(), cfg.m, &sample, rhs, 0.0, cfg.bisection_tol)?;
    let iteration = Iteration {
        scheme,
        cfg,
        lower: Some(barrier.function.values()),
        upper: Some(upper.values()),
        bounds: None,
    };
    let out = iteration.run(&d, barrier.function.values().to_vec())?;
    let solution = GridFunction::from_values(d, out.values)?;
    let pde_residual = pde_residual(&solution, cfg.m, rhs, 0.0)?;
    let report = SolveReport {
        solution,
        residual_history: out.history,
        sandwich: out.sandwich,
        wall_time: start.elapsed(),
        converged: out.converged,
        max_decrease: out.max_decrease,
        pde_residual,
        barrier_scale: Some(barrier.scale),
        direction_count: sample.len(),
    };
    if !report.converged {
        return Err(Error::NotConverged(Box::new(report)));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonOutcome {
    /// `u ≤ v + tol_pde` on every interior node.
    pub holds: bool,
    /// `min (v - u)` over the interior.
    pub min_gap: f64,
    pub worst_node: Option<usize>,
}

/// Checks the conclusion `u ≤ v` of the comparison principle after
/// confirming its hypotheses: `u` a subsolution, `v` a supersolution and
/// `u ≤ v + tol_pde` on the boundary nodes.
pub fn comparison_check(
    u: &GridFunction,
    v: &GridFunction,
    m: usize,
    rhs: &RhsSpec,
    opts: &VerifyOptions,
) -> Result<ComparisonOutcome> {
    let d = u.domain();
    if !Arc::ptr_eq(d, v.domain()) && d.len() != v.domain().len() {
        return arg("u and v live on different grids");
    }
    let sub = verify_subsolution(u, m, rhs, opts)?;
    if !sub.passed() {
        return arg(format!(
            "hypothesis failed: u is not a subsolution ({} failing nodes, worst margin {:e})",
            sub.count(crate::viscosity::Verdict::Fail),
            sub.worst_margin
        ));
    }
    let sup = verify_supersolution(v, m, rhs, opts)?;
    if !sup.passed() {
        return arg(format!(
            "hypothesis failed: v is not a supersolution ({} failing nodes, worst margin {:e})",
            sup.count(crate::viscosity::Verdict::Fail),
            sup.worst_margin
        ));
    }
    if let Some(&b) = d.boundary().iter().find(|&&b| u.get(b) > v.get(b) + opts.tol_pde) {
        return arg(format!(
            "hypothesis failed: u > v on the boundary at node {b} ({} > {})",
            u.get(b),
            v.get(b)
        ));
    }
    let mut min_gap = f64::INFINITY;
    let mut worst_node = None;
    for &p in d.interior() {
        let gap = v.get(p) - u.get(p);
        if gap < min_gap {
            min_gap = gap;
            worst_node = Some(p);
        }
    }
    Ok(ComparisonOutcome {
        holds: min_gap >= -opts.tol_pde,
        min_gap,
        worst_node,
    })
}

/// Radius of a ball domain.
pub fn ball_radius(d: &GridDomain) -> Option<f64> {
    match d.topology() {
        Topology::Ball { radius } => Some(radius),
        _ => None,
    }
}
