//! Flat `key = value` problem files.
//!
//! One assignment per line; `#` starts a comment. Keys are case-sensitive and
//! may appear once. Unknown keys are rejected so that typos surface early.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `topology` | `ball`, `cube` or `torus` | `ball` |
//! | `n`, `m` | complex dimension and equation order | `1`, `1` |
//! | `nodes` | nodes per axis | `33` |
//! | `radius` | ball radius | `1` |
//! | `lo`, `hi` | cube bounds | `-1`, `1` |
//! | `period` | torus period | `2π` |
//! | `rhs` | `constant`, `exp`, `trig` or `manufactured` | `constant` |
//! | `rhs.value` | constant value | `1` |
//! | `rhs.scale`, `rhs.rate` | `F = scale · exp(rate · t)` | `1`, `1` |
//! | `rhs.base`, `rhs.amp`, `rhs.freq` | `F = base + amp sin(freq x₁) cos(freq y₁)` | `1`, `0.5`, `2` |
//! | `solution` | `none`, `quadratic`, `radial_bump` or `periodic` | `none` |
//! | `solution.scale` | quadratic `scale·|z|²` | `1` |
//! | `solution.eps`, `solution.k` | `|z|² + eps·exp(-k|z|²)` | `0.05`, `4` |
//! | `solution.amp` | periodic amplitude | `0.05` |
//! | `g` | `zero`, `constant`, `quadratic`, `re_z1` or `solution` | `solution` if given, else `zero` |
//! | `g.value` | constant boundary value | `0` |
//! | `boundary_sampling` | `nodal` or `projected` | `nodal` |
//! | `t0`, `t1` | torus brackets | `-1`, `1` |
//! | `tol_sweep`, `max_sweeps`, `bisection_tol` | solver tolerances | `1e-8`, `200000`, `1e-10` |
//! | `sandwich_tol` | allowed barrier breach of the final iterate | `1e-6` |
//! | `tol_pde`, `delta_factor` | verification slack and `δ = factor·√h` | `1e-6`, `0.5` |
//! | `directions`, `seed`, `threads`, `sweep_order` | direction sample and sweeps | `8`, `24301`, `1`, `lexicographic` |
//! | `initial` | torus starting constant | `t0` |
//! | `levels` | comma-separated node counts for a convergence study | none |
//! | `check.max_error`, `check.min_order` | pass thresholds for `solve` | none |
//! | `holder.gammas` | exponents for `holder` | `0.5, 1` |

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use crate::cone::{self, HermitianForm};
use crate::dirichlet::{SolveConfig, SweepOrder};
use crate::error::{Error, Result};
use crate::grid::{complex_hessian_from_real, BoundarySampling, GridDomain};
use crate::viscosity::{RhsSpec, VerifyOptions};

pub struct Config {
    entries: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return cfg_err(format!("line {}: expected `key = value`", no + 1));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return cfg_err(format!("line {}: empty key", no + 1));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return cfg_err(format!("line {}: duplicate key `{k}`", no + 1));
            }
        }
        Ok(Self {
            entries,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .or_else(|_| cfg_err(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.parsed(key, default)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.parsed(key, default)
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        self.parsed(key, default)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .or_else(|_| cfg_err(format!("`{key}`: cannot parse `{s}`")))
                    })
                    .collect()
            })
            .transpose()
    }

    /// Fails on keys that no accessor asked for.
    pub fn ensure_all_used(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .entries
            .keys()
            .filter(|k| !used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            cfg_err(format!("unknown keys: {}", unknown.join(", ")))
        }
    }
}

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Real `2n × 2n` Hessian, row-major.
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Closed-form solution with its real Hessian.
#[derive(Clone)]
pub struct ExactSolution {
    pub label: String,
    pub value: ScalarFn,
    pub hessian: HessianFn,
}

impl ExactSolution {
    pub fn complex_hessian(&self, n: usize, x: &[f64]) -> HermitianForm {
        complex_hessian_from_real(n, &(self.hessian)(x))
    }

    /// `scale · |z|²`.
    pub fn quadratic(n: usize, scale: f64) -> Self {
        let axes = 2 * n;
        Self {
            label: format!("{scale}|z|^2"),
            value: Arc::new(move |x| scale * x.iter().map(|v| v * v).sum::<f64>()),
            hessian: Arc::new(move |_| {
                let mut h = vec![0.0; axes * axes];
                for a in 0..axes {
                    h[a * axes + a] = 2.0 * scale;
                }
                h
            }),
        }
    }

    /// `|z|² + eps · exp(-k |z|²)`.
    pub fn radial_bump(n: usize, eps: f64, k: f64) -> Self {
        let axes = 2 * n;
        let d1 = move |s: f64| 1.0 - eps * k * (-k * s).exp();
        let d2 = move |s: f64| eps * k * k * (-k * s).exp();
        Self {
            label: format!("|z|^2 + {eps} exp(-{k}|z|^2)"),
            value: Arc::new(move |x| {
                let s: f64 = x.iter().map(|v| v * v).sum();
                s + eps * (-k * s).exp()
            }),
            hessian: Arc::new(move |x| {
                let s: f64 = x.iter().map(|v| v * v).sum();
                let (a1, a2) = (d1(s), d2(s));
                let mut h = vec![0.0; axes * axes];
                for a in 0..axes {
                    for b in 0..axes {
                        h[a * axes + b] = 4.0 * a2 * x[a] * x[b] + if a == b { 2.0 * a1 } else { 0.0 };
                    }
                }
                h
            }),
        }
    }

    /// `amp · (Σ_j sin(κ x_j) cos(κ y_j) + ½ cos(κ (x_1 + y_n)))` with
    /// `κ = 2π / period`; the coupling term is present for `n ≥ 2`.
    pub fn periodic(n: usize, amp: f64, period: f64) -> Self {
        let axes = 2 * n;
        let kappa = 2.0 * PI / period;
        let coupled = n >= 2;
        Self {
            label: format!("periodic amplitude {amp}"),
            value: Arc::new(move |x| {
                let mut s = 0.0;
                for j in 0..n {
                    s += (kappa * x[2 * j]).sin() * (kappa * x[2 * j + 1]).cos();
                }
                if coupled {
                    s += 0.5 * (kappa * (x[0] + x[axes - 1])).cos();
                }
                amp * s
            }),
            hessian: Arc::new(move |x| {
                let mut h = vec![0.0; axes * axes];
                let k2 = kappa * kappa;
                for j in 0..n {
                    let (a, b) = (2 * j, 2 * j + 1);
                    let (sx, cx) = (kappa * x[a]).sin_cos();
                    let (sy, cy) = (kappa * x[b]).sin_cos();
                    h[a * axes + a] += -amp * k2 * sx * cy;
                    h[b * axes + b] += -amp * k2 * sx * cy;
                    h[a * axes + b] += -amp * k2 * cx * sy;
                    h[b * axes + a] += -amp * k2 * cx * sy;
                }
                if coupled {
                    let c = -0.5 * amp * k2 * (kappa * (x[0] + x[axes - 1])).cos();
                    for &a in &[0, axes - 1] {
                        for &b in &[0, axes - 1] {
                            h[a * axes + b] += c;
                        }
                    }
                }
                h
            }),
        }
    }

    /// `F(x,t) = σ_m(sI + A(φ*)(x)) · exp(t - φ*(x))`, so that `φ*` solves
    /// `σ_m(sI + A(φ)) = F(x, φ)`.
    pub fn manufactured_rhs(&self, n: usize, m: usize, shift: f64) -> RhsSpec {
        let exact = self.clone();
        RhsSpec::separable(
            format!("manufactured from {}", self.label),
            move |x| {
                let a = exact.complex_hessian(n, x).add_scaled_identity(shift);
                let sigma = cone::hessian_density(&a, m).unwrap_or(0.0).max(0.0);
                sigma * (-(exact.value)(x)).exp()
            },
            f64::exp,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TopologySpec {
    Ball { radius: f64 },
    Cube { lo: f64, hi: f64 },
    Torus { period: f64 },
}

/// A fully parsed problem file.
pub struct Problem {
    pub topology: TopologySpec,
    pub n: usize,
    pub m: usize,
    pub nodes: usize,
    pub rhs: RhsSpec,
    pub boundary: Option<ScalarFn>,
    pub sampling: BoundarySampling,
    pub exact: Option<ExactSolution>,
    pub solve: SolveConfig,
    pub levels: Vec<usize>,
    pub max_error: Option<f64>,
    pub min_order: Option<f64>,
    pub holder_gammas: Vec<f64>,
}

impl Problem {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let n = cfg.usize_or("n", 1)?;
        let m = cfg.usize_or("m", 1)?;
        if n == 0 || m == 0 || m > n {
            return cfg_err(format!("need 1 <= m <= n, got n = {n}, m = {m}"));
        }
        let nodes = cfg.usize_or("nodes", 33)?;
        let topology = match cfg.str_or("topology", "ball") {
            "ball" => TopologySpec::Ball {
                radius: cfg.f64_or("radius", 1.0)?,
            },
            "cube" => TopologySpec::Cube {
                lo: cfg.f64_or("lo", -1.0)?,
                hi: cfg.f64_or("hi", 1.0)?,
            },
            "torus" => TopologySpec::Torus {
                period: cfg.f64_or("period", 2.0 * PI)?,
            },
            other => return cfg_err(format!("unknown topology `{other}`")),
        };
        let periodic = matches!(topology, TopologySpec::Torus { .. });
        let shift = if periodic { 1.0 } else { 0.0 };

        let exact = match cfg.str_or("solution", "none") {
            "none" => None,
            "quadratic" => Some(ExactSolution::quadratic(n, cfg.f64_or("solution.scale", 1.0)?)),
            "radial_bump" => Some(ExactSolution::radial_bump(
                n,
                cfg.f64_or("solution.eps", 0.05)?,
                cfg.f64_or("solution.k", 4.0)?,
            )),
            "periodic" => {
                let TopologySpec::Torus { period } = topology else {
                    return cfg_err("solution `periodic` needs topology = torus");
                };
                Some(ExactSolution::periodic(n, cfg.f64_or("solution.amp", 0.05)?, period))
            }
            other => return cfg_err(format!("unknown solution `{other}`")),
        };

        let t0 = cfg.f64_or("t0", -1.0)?;
        let t1 = cfg.f64_or("t1", 1.0)?;
        let mut rhs = match cfg.str_or("rhs", "constant") {
            "constant" => RhsSpec::constant(cfg.f64_or("rhs.value", 1.0)?),
            "exp" => {
                let scale = cfg.f64_or("rhs.scale", 1.0)?;
                let rate = cfg.f64_or("rhs.rate", 1.0)?;
                RhsSpec::separable(
                    format!("{scale} exp({rate} t)"),
                    move |_| scale,
                    move |t| (rate * t).exp(),
                )
            }
            "trig" => {
                let base = cfg.f64_or("rhs.base", 1.0)?;
                let amp = cfg.f64_or("rhs.amp", 0.5)?;
                let freq = cfg.f64_or("rhs.freq", 2.0)?;
                RhsSpec::spatial(format!("{base} + {amp} sin({freq} x1) cos({freq} y1)"), move |x| {
                    base + amp * (freq * x[0]).sin() * (freq * x[1]).cos()
                })
            }
            "manufactured" => match &exact {
                Some(e) => e.manufactured_rhs(n, m, shift),
                None => return cfg_err("rhs `manufactured` needs a `solution`"),
            },
            other => return cfg_err(format!("unknown rhs `{other}`")),
        };
        if periodic {
            rhs = rhs.with_brackets(t0, t1);
        }

        let default_g = if exact.is_some() { "solution" } else { "zero" };
        let boundary: Option<ScalarFn> = if periodic {
            None
        } else {
            Some(match cfg.str_or("g", default_g) {
                "zero" => Arc::new(|_| 0.0),
                "constant" => {
                    let c = cfg.f64_or("g.value", 0.0)?;
                    Arc::new(move |_| c)
                }
                "quadratic" => Arc::new(|x| x.iter().map(|v| v * v).sum()),
                "re_z1" => Arc::new(|x| x[0]),
                "solution" => match &exact {
                    Some(e) => e.value.clone(),
                    None => return cfg_err("g = solution needs a `solution`"),
                },
                other => return cfg_err(format!("unknown boundary data `{other}`")),
            })
        };
        let sampling = match cfg.str_or("boundary_sampling", "nodal") {
            "nodal" => BoundarySampling::Nodal,
            "projected" => BoundarySampling::Projected,
            other => return cfg_err(format!("unknown boundary_sampling `{other}`")),
        };

        let mut solve = SolveConfig::new(m);
        solve.tol_sweep = cfg.f64_or("tol_sweep", solve.tol_sweep)?;
        solve.max_sweeps = cfg.usize_or("max_sweeps", solve.max_sweeps)?;
        solve.bisection_tol = cfg.f64_or("bisection_tol", solve.bisection_tol)?;
        solve.direction_count = cfg.usize_or("directions", solve.direction_count)?;
        solve.seed = cfg.u64_or("seed", solve.seed)?;
        solve.threads = cfg.usize_or("threads", solve.threads)?;
        solve.sandwich_tol = cfg.f64_or("sandwich_tol", solve.sandwich_tol)?;
        let order = cfg.str_or("sweep_order", "lexicographic");
        solve.sweep_order = SweepOrder::parse(order)
            .ok_or_else(|| Error::Config(format!("unknown sweep_order `{order}`")))?;
        solve.verify = VerifyOptions {
            tol_pde: cfg.f64_or("tol_pde", 1e-6)?,
            delta_factor: cfg.f64_or("delta_factor", 0.5)?,
        };
        solve.initial_value = cfg.raw("initial").map(|v| v.parse::<f64>()).transpose().map_err(|_| {
            Error::Config("`initial`: not a number".into())
        })?;

        let levels = match cfg.list_f64("levels")? {
            Some(v) => v.into_iter().map(|x| x as usize).collect(),
            None => Vec::new(),
        };
        let problem = Self {
            topology,
            n,
            m,
            nodes,
            rhs,
            boundary,
            sampling,
            exact,
            solve,
            levels,
            max_error: cfg.raw("check.max_error").map(str::parse).transpose().map_err(|_| {
                Error::Config("`check.max_error`: not a number".into())
            })?,
            min_order: cfg.raw("check.min_order").map(str::parse).transpose().map_err(|_| {
                Error::Config("`check.min_order`: not a number".into())
            })?,
            holder_gammas: cfg.list_f64("holder.gammas")?.unwrap_or_else(|| vec![0.5, 1.0]),
        };
        cfg.ensure_all_used()?;
        Ok(problem)
    }

    pub fn domain(&self, nodes: usize) -> Result<Arc<GridDomain>> {
        match self.topology {
            TopologySpec::Ball { radius } => GridDomain::ball(self.n, radius, nodes),
            TopologySpec::Cube { lo, hi } => GridDomain::cube(self.n, lo, hi, nodes),
            TopologySpec::Torus { period } => GridDomain::torus(self.n, period, nodes),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.topology, TopologySpec::Torus { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reject() {
        let cfg = Config::parse("# comment\nn = 2\nm=2 # trailing\nnodes = 9\n").unwrap();
        let p = Problem::from_config(&cfg).unwrap();
        assert_eq!((p.n, p.m, p.nodes), (2, 2, 9));
        assert!(Config::parse("n = 1\nn = 2").is_err());
        assert!(Config::parse("just text").is_err());
        let typo = Config::parse("nodse = 9").unwrap();
        assert!(Problem::from_config(&typo).is_err());
    }

    #[test]
    fn radial_hessian_matches_closed_form() {
        let e = ExactSolution::radial_bump(2, 0.05, 4.0);
        let x = [0.1, -0.2, 0.3, 0.05];
        let s: f64 = x.iter().map(|v| v * v).sum();
        let a = e.complex_hessian(2, &x);
        let got = cone::eigenvalues(&a).unwrap();
        let d1 = 1.0 - 0.2 * (-4.0 * s).exp();
        let d2 = 0.8 * (-4.0 * s).exp();
        let want = crate::oracle::radial_hessian(2, d1, d2, s).unwrap().value;
        for (g, w) in got.as_slice().iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-12);
        }
    }
}
