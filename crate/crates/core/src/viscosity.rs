//! Viscosity-side machinery: right-hand sides, sup/inf-convolutions,
//! discrete sub/supersolution verification and Hölder estimates.
//!
//! Grid data cannot be touched by C² test functions directly, so the
//! verifiers regularize first: a subsolution candidate is replaced by its
//! sup-convolution, a supersolution candidate by its inf-convolution, and the
//! discrete complex Hessian of the regularized function serves as the
//! second-order jet.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use crate::cone::{self, binomial, HermitianForm, TOL_CONE};
use crate::error::{arg, domain, Result};
use crate::grid::{hessian_into, GridDomain, GridFunction, NodeKind};

pub type PointFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
pub type WeightFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How `F(x, t)` is evaluated.
#[derive(Clone)]
pub enum RhsForm {
    General(PointFn),
    /// `F(x, t) = weight(x) · profile(t)`; lets solvers cache the spatial
    /// factor per node.
    Separable { weight: WeightFn, profile: ProfileFn },
}

/// Right-hand side `F(x, t) ≥ 0`, non-decreasing in `t`.
#[derive(Clone)]
pub struct RhsSpec {
    form: RhsForm,
    /// `(γ, C)` with `|F^(1/m)(x,t) - F^(1/m)(y,t)| ≤ C |x-y|^γ`, if known.
    pub holder: Option<(f64, f64)>,
    /// `(t_0, t_1)` with `F(x,t_0) ≤ 1 ≤ F(x,t_1)`, if known.
    pub brackets: Option<(f64, f64)>,
    label: String,
}

impl fmt::Debug for RhsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RhsSpec")
            .field("label", &self.label)
            .field("separable", &self.is_separable())
            .field("holder", &self.holder)
            .field("brackets", &self.brackets)
            .finish()
    }
}

impl RhsSpec {
    pub fn new(label: impl Into<String>, f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            form: RhsForm::General(Arc::new(f)),
            holder: None,
            brackets: None,
            label: label.into(),
        }
    }

    pub fn separable(
        label: impl Into<String>,
        weight: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            form: RhsForm::Separable {
                weight: Arc::new(weight),
                profile: Arc::new(profile),
            },
            holder: None,
            brackets: None,
            label: label.into(),
        }
    }

    /// `F(x, t) = f(x)`.
    pub fn spatial(label: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::separable(label, f, |_| 1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::spatial(format!("constant {c}"), move |_| c)
    }

    pub fn with_holder(mut self, gamma: f64, constant: f64) -> Self {
        self.holder = Some((gamma, constant));
        self
    }

    pub fn with_brackets(mut self, t0: f64, t1: f64) -> Self {
        self.brackets = Some((t0, t1));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn form(&self) -> &RhsForm {
        &self.form
    }

    pub fn is_separable(&self) -> bool {
        matches!(self.form, RhsForm::Separable { .. })
    }

    #[inline]
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match &self.form {
            RhsForm::General(f) => f(x, t),
            RhsForm::Separable { weight, profile } => weight(x) * profile(t),
        }
    }

    /// Checks `F ≥ 0` and monotonicity in `t` on the interior nodes of `d`
    /// over `samples` equally spaced values in `[t_lo, t_hi]`. With `strict`,
    /// `F` must increase by more than `1e-12` between consecutive samples.
    pub fn validate(&self, d: &GridDomain, t_lo: f64, t_hi: f64, samples: usize, strict: bool) -> Result<()> {
        let samples = samples.max(2);
        let ts: Vec<f64> = (0..samples)
            .map(|k| t_lo + (t_hi - t_lo) * k as f64 / (samples - 1) as f64)
            .collect();
        for &p in d.interior() {
            let x = d.coords(p);
            let mut prev: Option<f64> = None;
            for &t in &ts {
                let v = self.eval(&x, t);
                if !v.is_finite() || v < 0.0 {
                    return arg(format!(
                        "inadmissible right-hand side {}: F = {v} at x = {x:?}, t = {t}",
                        self.label
                    ));
                }
                if let Some(pv) = prev {
                    let ok = if strict { v > pv + 1e-12 } else { v >= pv - 1e-12 };
                    if !ok {
                        let what = if strict { "strictly increasing" } else { "non-decreasing" };
                        return arg(format!(
                            "inadmissible right-hand side {}: not {what} in t at x = {x:?} near t = {t}",
                            self.label
                        ));
                    }
                }
                prev = Some(v);
            }
        }
        Ok(())
    }
}

/// `δ = factor · sqrt(h)`.
pub fn coupled_delta(h: f64, factor: f64) -> f64 {
    factor * h.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tol_pde: f64,
    /// Convolution scale is `delta_factor · sqrt(h)`.
    pub delta_factor: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol_pde: 1e-6,
            delta_factor: 0.5,
        }
    }
}

/// A sup- or inf-convolution together with the region where it is trusted.
#[derive(Clone, Debug)]
pub struct Convolution {
    pub value: GridFunction,
    /// `Ω_δ` membership per node.
    pub region: Vec<bool>,
    /// Distance from the boundary excluded from `Ω_δ`, `A·δ`.
    pub reach: f64,
}

impl Convolution {
    pub fn region_nodes(&self) -> Vec<usize> {
        (0..self.region.len()).filter(|&i| self.region[i]).collect()
    }
}

/// `max_j f[j] - c (i-j)²` over the finite entries of `f`, by the lower
/// envelope of parabolas. Entries without a finite candidate become `-∞`.
pub(crate) fn max_plus_parabola(f: &[f64], c: f64, out: &mut [f64], env: &mut Vec<usize>, cuts: &mut Vec<f64>) {
    let n = f.len();
    env.clear();
    cuts.clear();
    // minimize g[j] + c (i-j)² with g = -f
    let key = |j: usize| -f[j] + c * (j * j) as f64;
    for q in 0..n {
        if f[q] == f64::NEG_INFINITY || f[q].is_nan() {
            continue;
        }
        loop {
            match env.last() {
                None => {
                    env.push(q);
                    cuts.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&v) => {
                    let s = (key(q) - key(v)) / (2.0 * c * (q - v) as f64);
                    if s <= *cuts.last().unwrap() {
                        env.pop();
                        cuts.pop();
                    } else {
                        env.push(q);
                        cuts.push(s);
                        break;
                    }
                }
            }
        }
    }
    if env.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::NEG_INFINITY);
        return;
    }
    let mut k = 0;
    for (i, o) in out.iter_mut().enumerate() {
        while k + 1 < env.len() && cuts[k + 1] < i as f64 {
            k += 1;
        }
        let j = env[k];
        let dist = i as f64 - j as f64;
        *o = f[j] - c * dist * dist;
    }
}

/// Applies a 1-D transform along every grid line of every axis.
pub(crate) fn separable_pass(
    d: &GridDomain,
    values: &mut [f64],
    mut line_op: impl FnMut(&[f64], &mut [f64]),
) {
    let nodes = d.nodes_per_axis();
    let mut line = vec![0.0; nodes];
    let mut out = vec![0.0; nodes];
    for a in 0..d.axes() {
        let s = d.stride(a);
        for start in 0..d.len() {
            if d.axis_index(start, a) != 0 {
                continue;
            }
            for k in 0..nodes {
                line[k] = values[start + k * s];
            }
            line_op(&line, &mut out);
            for k in 0..nodes {
                values[start + k * s] = out[k];
            }
        }
    }
}

fn ensure_bounded(d: &GridDomain, what: &str) -> Result<()> {
    if d.is_periodic() {
        return domain(format!("{what} needs a bounded domain; use the group convolution on a torus"));
    }
    Ok(())
}

fn convolution_reach(phi: &GridFunction, delta: f64) -> f64 {
    let a = phi.oscillation().sqrt().ceil() + 1.0;
    a * delta
}

fn sup_convolution_values(phi: &GridFunction, delta: f64) -> Vec<f64> {
    let d = phi.domain();
    let c = d.h() * d.h() / (delta * delta);
    let mut values: Vec<f64> = (0..d.len())
        .map(|i| if d.is_active(i) { phi.get(i) } else { f64::NEG_INFINITY })
        .collect();
    let mut env = Vec::new();
    let mut cuts = Vec::new();
    separable_pass(d, &mut values, |line, out| {
        max_plus_parabola(line, c, out, &mut env, &mut cuts)
    });
    for (i, v) in values.iter_mut().enumerate() {
        if !d.is_active(i) {
            *v = f64::NAN;
        }
    }
    values
}

fn region_for(d: &GridDomain, reach: f64) -> Vec<bool> {
    (0..d.len())
        .map(|i| d.kind(i) == NodeKind::Interior && d.distance_to_boundary(i) > reach)
        .collect()
}

fn sup_convolution_unchecked(phi: &GridFunction, delta: f64) -> Convolution {
    let d = phi.domain();
    let reach = convolution_reach(phi, delta);
    let values = sup_convolution_values(phi, delta);
    Convolution {
        value: GridFunction::from_values(d.clone(), values).expect("finite on active nodes"),
        region: region_for(d, reach),
        reach,
    }
}

/// `φ^δ(x) = max_y φ(y) - |x-y|²/δ²` over all nodes `y` carrying a value,
/// computed exactly by separable lower envelopes.
///
/// The result is trusted on `Ω_δ`, the interior nodes farther than `A·δ`
/// from the boundary with `A = ceil(sqrt(osc φ)) + 1`.
pub fn sup_convolution(phi: &GridFunction, delta: f64) -> Result<Convolution> {
    if !(delta > 0.0) {
        return arg(format!("convolution scale must be positive, got {delta}"));
    }
    ensure_bounded(phi.domain(), "sup-convolution")?;
    let conv = sup_convolution_unchecked(phi, delta);
    if !conv.region.iter().any(|&b| b) {
        return domain(format!(
            "Ω_δ is empty: reach {:.4} leaves no interior node",
            conv.reach
        ));
    }
    Ok(conv)
}

/// `φ_δ(x) = min_y φ(y) + |x-y|²/δ²`, the mirror of [`sup_convolution`].
pub fn inf_convolution(phi: &GridFunction, delta: f64) -> Result<Convolution> {
    let mut conv = sup_convolution(&phi.map(|v| -v), delta)?;
    conv.value = conv.value.map(|v| -v);
    Ok(conv)
}

fn inf_convolution_unchecked(phi: &GridFunction, delta: f64) -> Convolution {
    let mut conv = sup_convolution_unchecked(&phi.map(|v| -v), delta);
    conv.value = conv.value.map(|v| -v);
    conv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Outside `Ω_δ`, where the convolution is not trusted.
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerificationKind {
    Subsolution,
    Supersolution,
}

impl fmt::Display for VerificationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Subsolution => "subsolution",
            Self::Supersolution => "supersolution",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeVerdict {
    pub node: usize,
    pub verdict: Verdict,
    /// `σ_m(A) - F` for subsolutions, `F - [σ_m(A)]_+` for supersolutions;
    /// NaN for skipped nodes.
    pub margin: f64,
    /// Whether the jet passed the cone test (always true on the super side).
    pub cone_ok: bool,
}

/// Per-node outcome of a verification over the interior nodes.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub kind: VerificationKind,
    pub m: usize,
    pub tol_pde: f64,
    pub delta: f64,
    pub nodes: Vec<NodeVerdict>,
    /// Smallest margin over checked nodes (`+∞` if none were checked).
    pub worst_margin: f64,
    pub worst_node: Option<usize>,
    domain: Arc<GridDomain>,
}

impl VerificationReport {
    pub fn count(&self, v: Verdict) -> usize {
        self.nodes.iter().filter(|n| n.verdict == v).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &NodeVerdict> {
        self.nodes.iter().filter(|n| n.verdict == Verdict::Fail)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    /// Summary lines prefixed with `#`, then one line per failing node:
    /// `FAIL node=<index> x=<x1,y1,...> margin=<value> cone=<ok|violated>`.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# {} m={} tol_pde={:e} delta={:e}",
            self.kind, self.m, self.tol_pde, self.delta
        )?;
        writeln!(
            w,
            "# pass={} fail={} skipped={}",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Skipped)
        )?;
        match self.worst_node {
            Some(i) => writeln!(
                w,
                "# worst_margin={:e} at x={}",
                self.worst_margin,
                join_coords(&self.domain, i)
            )?,
            None => writeln!(w, "# worst_margin=none")?,
        }
        for f in self.failures() {
            writeln!(
                w,
                "FAIL node={} x={} margin={:e} cone={}",
                f.node,
                join_coords(&self.domain, f.node),
                f.margin,
                if f.cone_ok { "ok" } else { "violated" }
            )?;
        }
        Ok(())
    }
}

fn join_coords(d: &GridDomain, i: usize) -> String {
    d.coords(i)
        .iter()
        .map(|c| format!("{c}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn regularize(phi: &GridFunction, delta: f64, kind: VerificationKind) -> Convolution {
    let d = phi.domain();
    if d.is_periodic() {
        let value = match kind {
            VerificationKind::Subsolution => crate::torus::group_sup_convolution(phi, delta),
            VerificationKind::Supersolution => crate::torus::group_inf_convolution(phi, delta),
        };
        return Convolution {
            value,
            region: vec![true; d.len()],
            reach: 0.0,
        };
    }
    match kind {
        VerificationKind::Subsolution => sup_convolution_unchecked(phi, delta),
        VerificationKind::Supersolution => inf_convolution_unchecked(phi, delta),
    }
}

fn verify(
    phi: &GridFunction,
    m: usize,
    rhs: &RhsSpec,
    opts: &VerifyOptions,
    kind: VerificationKind,
) -> Result<VerificationReport> {
    let d = phi.domain().clone();
    if m == 0 || m > d.n() {
        return arg(format!("order m = {m} out of range for n = {}", d.n()));
    }
    let delta = coupled_delta(d.h(), opts.delta_factor);
    if !(delta > 0.0) {
        return arg("delta_factor must be positive");
    }
    let conv = regularize(phi, delta, kind);
    // the torus equation is posed for ω + dd^c φ with ω the identity form
    let shift = if d.is_periodic() { 1.0 } else { 0.0 };
    let norm = binomial(d.n(), m);
    let mut a = HermitianForm::zeros(d.n());
    let mut nodes = Vec::with_capacity(d.interior().len());
    let mut worst = f64::INFINITY;
    let mut worst_node = None;
    for &p in d.interior() {
        if !conv.region[p] {
            nodes.push(NodeVerdict {
                node: p,
                verdict: Verdict::Skipped,
                margin: f64::NAN,
                cone_ok: true,
            });
            continue;
        }
        hessian_into(&d, conv.value.values(), p, &mut a);
        let lambda: smallvec::SmallVec<[f64; 8]> = cone::spectrum(&a)?.iter().map(|l| l + shift).collect();
        let e = cone::elementary_symmetric_all(&lambda, m);
        let sigma = e[m] / norm;
        let f = rhs.eval(&d.coords(p), phi.get(p));
        let (margin, cone_ok) = match kind {
            VerificationKind::Subsolution => {
                let lifted: smallvec::SmallVec<[f64; 8]> = lambda.iter().map(|l| l + TOL_CONE).collect();
                (sigma - f, cone::gamma_member(&lifted, m, TOL_CONE))
            }
            VerificationKind::Supersolution => {
                let plus = if cone::gamma_member(&lambda, m, TOL_CONE) {
                    sigma.max(0.0)
                } else {
                    0.0
                };
                (f - plus, true)
            }
        };
        let verdict = if margin >= -opts.tol_pde && cone_ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let effective = if cone_ok { margin } else { margin.min(-opts.tol_pde) };
        if effective < worst {
            worst = effective;
            worst_node = Some(p);
        }
        nodes.push(NodeVerdict {
            node: p,
            verdict,
            margin,
            cone_ok,
        });
    }
    Ok(VerificationReport {
        kind,
        m,
        tol_pde: opts.tol_pde,
        delta,
        nodes,
        worst_margin: worst,
        worst_node,
        domain: d,
    })
}

/// Checks `σ_m(A) ≥ F(x, φ(x)) - tol_pde` and `A + tol_cone·I ∈ Γ_m` at every
/// interior node of `Ω_δ`, with `A` the discrete jet of the sup-convolution.
/// On a torus the jet is `I + A`.
pub fn verify_subsolution(phi: &GridFunction, m: usize, rhs: &RhsSpec, opts: &VerifyOptions) -> Result<VerificationReport> {
    verify(phi, m, rhs, opts, VerificationKind::Subsolution)
}

/// Checks `[σ_m(A)]_+ ≤ F(x, φ(x)) + tol_pde` at every interior node of
/// `Ω_δ`, with `A` the jet of the inf-convolution and `[·]_+` zero off the
/// cone.
pub fn verify_supersolution(phi: &GridFunction, m: usize, rhs: &RhsSpec, opts: &VerifyOptions) -> Result<VerificationReport> {
    verify(phi, m, rhs, opts, VerificationKind::Supersolution)
}

fn holder_args(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return arg(format!("Hölder exponent must lie in (0, 1], got {gamma}"));
    }
    Ok(())
}

/// `ψ(x) = max_y φ(y) + C |x-y|^γ (|x|² - R² - 1)` over every node `y`
/// carrying a value, by direct enumeration.
pub fn holder_envelope(phi: &GridFunction, gamma: f64, c: f64, radius: f64) -> Result<GridFunction> {
    holder_args(gamma)?;
    if !(c > 0.0) {
        return arg(format!("envelope constant must be positive, got {c}"));
    }
    let d = phi.domain();
    if d.is_periodic() {
        return domain("the Hölder envelope is defined on bounded domains");
    }
    let active: Vec<usize> = (0..d.len()).filter(|&i| d.is_active(i)).collect();
    if d.interior().iter().any(|&i| d.norm_sqr(i) > radius * radius) {
        return arg(format!("domain is not contained in B(0, {radius})"));
    }
    if active.iter().any(|&i| d.norm_sqr(i) >= radius * radius + 1.0) {
        return arg(format!("grid nodes reach beyond |x|² = R² + 1 for R = {radius}"));
    }
    let coords: Vec<_> = active.iter().map(|&i| d.coords(i)).collect();
    let mut values = vec![f64::NAN; d.len()];
    for (ix, &i) in active.iter().enumerate() {
        let factor = c * (d.norm_sqr(i) - radius * radius - 1.0);
        let x = &coords[ix];
        let mut best = phi.get(i);
        for (iy, &j) in active.iter().enumerate() {
            if j == i {
                continue;
            }
            let dist2: f64 = x.iter().zip(coords[iy].iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            let cand = phi.get(j) + factor * dist2.powf(0.5 * gamma);
            if cand > best {
                best = cand;
            }
        }
        values[i] = best;
    }
    GridFunction::from_values(d.clone(), values)
}

/// Pair offsets within a radius, in nodes, taking one of each `±o` pair.
fn half_offsets(axes: usize, radius: usize) -> Vec<Vec<isize>> {
    let r = radius as isize;
    let mut out = Vec::new();
    let mut o = vec![-r; axes];
    loop {
        let norm2: isize = o.iter().map(|v| v * v).sum();
        let positive = o.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0);
        if positive && norm2 <= r * r {
            out.push(o.clone());
        }
        let mut a = axes;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if o[a] < r {
                o[a] += 1;
                break;
            }
            o[a] = -r;
        }
    }
}

/// Node reached from `i` by an offset, honouring the topology.
fn offset_node(d: &GridDomain, multi: &[usize], o: &[isize]) -> Option<usize> {
    let nodes = d.nodes_per_axis() as isize;
    let mut idx = 0;
    for a in 0..o.len() {
        let mut c = multi[a] as isize + o[a];
        if d.is_periodic() {
            c = c.rem_euclid(nodes);
        } else if c < 0 || c >= nodes {
            return None;
        }
        idx += c as usize * d.stride(a);
    }
    Some(idx)
}

/// Default pair radius of [`holder_modulus`], in grid steps.
pub const HOLDER_PAIR_RADIUS: usize = 16;

/// `max |φ(x) - φ(y)| / |x-y|^γ` over node pairs at distance at most 16h.
pub fn holder_modulus(phi: &GridFunction, gamma: f64) -> Result<f64> {
    holder_modulus_within(phi, gamma, HOLDER_PAIR_RADIUS)
}

/// [`holder_modulus`] with an explicit pair radius in grid steps. The cost is
/// the node count times the number of lattice points in a `2n`-ball of that
/// radius.
pub fn holder_modulus_within(phi: &GridFunction, gamma: f64, radius: usize) -> Result<f64> {
    holder_args(gamma)?;
    if radius == 0 {
        return arg("pair radius must be >= 1");
    }
    let d = phi.domain();
    let h = d.h();
    let offsets = half_offsets(d.axes(), radius);
    let scales: Vec<f64> = offsets
        .iter()
        .map(|o| {
            let n2: isize = o.iter().map(|v| v * v).sum();
            ((n2 as f64).sqrt() * h).powf(gamma)
        })
        .collect();
    let mut best: f64 = 0.0;
    for i in 0..d.len() {
        if !d.is_active(i) {
            continue;
        }
        let multi = d.multi_index(i);
        for (o, s) in offsets.iter().zip(scales.iter()) {
            if let Some(j) = offset_node(d, &multi, o) {
                if d.is_active(j) {
                    best = best.max((phi.get(i) - phi.get(j)).abs() / s);
                }
            }
        }
    }
    Ok(best)
}

/// Log-log slope of `D(k) = max |φ(x + k h e_a) - φ(x)|` against `k h` for
/// `k = 1..=max_steps`, a direct estimate of the Hölder exponent.
pub fn holder_exponent(phi: &GridFunction, max_steps: usize) -> Result<f64> {
    if max_steps < 2 {
        return arg("need at least two step sizes");
    }
    let d = phi.domain();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=max_steps {
        let mut dk: f64 = 0.0;
        for i in 0..d.len() {
            if !d.is_active(i) {
                continue;
            }
            let multi = d.multi_index(i);
            for a in 0..d.axes() {
                let mut o = vec![0isize; d.axes()];
                o[a] = k as isize;
                if let Some(j) = offset_node(d, &multi, &o) {
                    if d.is_active(j) {
                        dk = dk.max((phi.get(i) - phi.get(j)).abs());
                    }
                }
            }
        }
        if dk > 0.0 {
            xs.push((k as f64 * d.h()).ln());
            ys.push(dk.ln());
        }
    }
    if xs.len() < 2 {
        return domain("function is constant at the probed scales");
    }
    Ok(least_squares_slope(&xs, &ys))
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
