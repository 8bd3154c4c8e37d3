#![allow(dead_code)]

use std::sync::Arc;

use mhessian::grid::{GridDomain, GridFunction};
use mhessian::rng::SeededRng;
use mhessian::viscosity::RhsSpec;

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn sup_error(u: &GridFunction, exact: impl Fn(&[f64]) -> f64) -> f64 {
    let d = u.domain();
    d.interior()
        .iter()
        .map(|&p| (u.get(p) - exact(&d.coords(p))).abs())
        .fold(0.0, f64::max)
}

/// A randomized instance of the comparison principle: `F ≡ f0`, a strict
/// subsolution `u`, a supersolution `v`, and `u ≤ v` on the boundary.
pub struct ComparisonPair {
    pub u: GridFunction,
    pub v: GridFunction,
    pub m: usize,
    pub rhs: RhsSpec,
}

/// `Re(c z_1 z_n) + b·x`, pluriharmonic.
fn pluriharmonic(rng: &mut SeededRng, axes: usize) -> impl Fn(&[f64]) -> f64 {
    let (cr, ci) = (rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
    let b: Vec<f64> = (0..axes).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    move |x: &[f64]| {
        let (x1, y1, xn, yn) = (x[0], x[1], x[axes - 2], x[axes - 1]);
        let re = x1 * xn - y1 * yn;
        let im = x1 * yn + y1 * xn;
        cr * re - ci * im + b.iter().zip(x).map(|(s, v)| s * v).sum::<f64>()
    }
}

pub fn comparison_pair(d: &Arc<GridDomain>, m: usize, rng: &mut SeededRng) -> ComparisonPair {
    let axes = d.axes();
    let f0 = rng.uniform_in(0.5, 2.0);
    let root = f0.powf(1.0 / m as f64);
    let a_u = root * rng.uniform_in(1.05, 2.0);
    let quartic = rng.uniform_in(0.0, 0.5);
    let p = pluriharmonic(rng, axes);
    let u_fn = |x: &[f64]| a_u * norm2(x) + quartic * x.iter().map(|v| v.powi(4)).sum::<f64>() + p(x);
    // supersolution: either a flatter paraboloid or a function outside the cone
    let concave = rng.uniform() < 0.5;
    let a_v = if concave {
        -rng.uniform_in(0.1, 2.0)
    } else {
        root * rng.uniform_in(0.2, 0.95)
    };
    let wiggle = rng.uniform_in(0.0, 0.2);
    let k = rng.uniform_in(0.5, 2.0);
    let v_shape = |x: &[f64]| {
        let w = if concave { wiggle * (k * x[0]).sin() } else { 0.0 };
        a_v * norm2(x) + p(x) + w
    };
    let u = GridFunction::from_fn(d.clone(), u_fn);
    let shape = GridFunction::from_fn(d.clone(), v_shape);
    let lift = d
        .boundary()
        .iter()
        .map(|&b| u.get(b) - shape.get(b))
        .fold(f64::NEG_INFINITY, f64::max)
        + rng.uniform_in(0.0, 0.3);
    let v = shape.map(|x| x + lift);
    ComparisonPair {
        u,
        v,
        m,
        rhs: RhsSpec::constant(f0),
    }
}

/// Smooth positive `F(x)` on `B(0,1) ⊂ C` with random Fourier coefficients.
pub fn random_smooth_rhs(rng: &mut SeededRng) -> (RhsSpec, impl Fn(&[f64]) -> f64 + Clone) {
    let c: Vec<f64> = (0..4).map(|_| rng.uniform_in(-0.4, 0.4)).collect();
    let k = rng.uniform_in(0.5, 2.0);
    let f = move |x: &[f64]| {
        1.0 + c[0] * (k * x[0]).sin() + c[1] * (k * x[1]).cos() + c[2] * (k * (x[0] + x[1])).sin()
            + c[3] * x[0] * x[1]
    };
    (RhsSpec::spatial("random smooth", f.clone()), f)
}
