use std::f64::consts::PI;
use std::sync::Arc;

use mhessian::config::ExactSolution;
use mhessian::dirichlet::{SolveConfig, SweepOrder};
use mhessian::grid::{GridDomain, GridFunction};
use mhessian::rng::SeededRng;
use mhessian::torus::{group_inf_convolution, group_sup_convolution, torus_solve, TorusProblem};
use mhessian::viscosity::{least_squares_slope, RhsSpec};
use mhessian::Error;

fn config(m: usize) -> SolveConfig {
    let mut cfg = SolveConfig::new(m);
    cfg.tol_sweep = 1e-11;
    cfg
}

fn manufactured(n: usize, nodes: usize) -> (TorusProblem, ExactSolution) {
    let exact = ExactSolution::periodic(n, 0.05, 2.0 * PI);
    let rhs = exact.manufactured_rhs(n, n, 1.0).with_brackets(-1.0, 1.0);
    (
        TorusProblem {
            n,
            m: n,
            period: 2.0 * PI,
            nodes,
            rhs,
        },
        exact,
    )
}

fn sup_error(u: &GridFunction, exact: &ExactSolution) -> f64 {
    let d = u.domain();
    d.interior()
        .iter()
        .map(|&p| (u.get(p) - (exact.value)(&d.coords(p))).abs())
        .fold(0.0, f64::max)
}

#[test]
fn constant_rhs_gives_the_constant_solution() {
    for (n, m) in [(1, 1), (2, 1), (2, 2)] {
        let c = 0.3;
        let rhs = RhsSpec::separable("exp(t - 0.3)", |_| 1.0, move |t| (t - c).exp()).with_brackets(-1.0, 1.0);
        let problem = TorusProblem {
            n,
            m,
            period: 1.0,
            nodes: 6,
            rhs,
        };
        let mut cfg = config(m);
        cfg.tol_sweep = 1e-13;
        let r = torus_solve(&problem, &cfg).unwrap();
        let worst = r.solution.values().iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
        assert!(worst <= cfg.bisection_tol, "n={n} m={m}: {worst}");
    }
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for nodes in [16, 32] {
        let (problem, exact) = manufactured(1, nodes);
        let r = torus_solve(&problem, &config(1)).unwrap();
        xs.push((2.0 * PI / nodes as f64).ln());
        ys.push(sup_error(&r.solution, &exact).ln());
    }
    let order = least_squares_slope(&xs, &ys);
    assert!(order >= 1.5, "order {order}");
}

#[test]
fn solution_does_not_depend_on_the_direction_sample() {
    let (problem, _) = manufactured(2, 6);
    let mut a = config(2);
    a.seed = 11;
    let mut b = config(2);
    b.seed = 12;
    b.direction_count = 5;
    let ua = torus_solve(&problem, &a).unwrap().solution;
    let ub = torus_solve(&problem, &b).unwrap().solution;
    assert!(ua.max_diff(&ub) <= 5e-6);
}

#[test]
fn translating_the_data_translates_the_solution_exactly() {
    let (problem, exact) = manufactured(2, 6);
    let d = problem.domain().unwrap();
    let mut cfg = config(2);
    cfg.sweep_order = SweepOrder::Simultaneous;
    let base = torus_solve(&problem, &cfg).unwrap().solution;
    for (axis, k) in [(0usize, 1isize), (3, 2), (1, -1)] {
        let shifted_domain = d.clone();
        let weight_src = exact.clone();
        let n = problem.n;
        // F_τ(x, t) = F(x + τ, t) evaluated at the translated node itself
        let rhs = RhsSpec::separable(
            "translated",
            move |x| {
                let p = shifted_domain.locate(x).expect("node coordinates");
                let q = shifted_domain.shift(p, axis, k).unwrap();
                let y = shifted_domain.coords(q);
                let a = weight_src.complex_hessian(n, &y).add_scaled_identity(1.0);
                mhessian::cone::hessian_density(&a, n).unwrap() * (-(weight_src.value)(&y)).exp()
            },
            f64::exp,
        )
        .with_brackets(-1.0, 1.0);
        let moved = TorusProblem { rhs, ..problem.clone() };
        let sol = torus_solve(&moved, &cfg).unwrap().solution;
        for p in 0..d.len() {
            let q = d.shift(p, axis, k).unwrap();
            assert_eq!(sol.get(p).to_bits(), base.get(q).to_bits(), "axis {axis} shift {k} node {p}");
        }
    }
}

#[test]
fn bracket_and_monotonicity_violations_are_rejected() {
    let base = TorusProblem {
        n: 1,
        m: 1,
        period: 1.0,
        nodes: 8,
        rhs: RhsSpec::separable("exp(t)", |_| 1.0, f64::exp).with_brackets(0.5, 1.0),
    };
    // F(x, 0.5) > 1
    assert!(matches!(torus_solve(&base, &config(1)), Err(Error::Argument(_))));
    let flat = TorusProblem {
        rhs: RhsSpec::constant(1.0).with_brackets(-1.0, 1.0),
        ..base.clone()
    };
    assert!(matches!(torus_solve(&flat, &config(1)), Err(Error::Argument(_))));
    let no_brackets = TorusProblem {
        rhs: RhsSpec::separable("exp(t)", |_| 1.0, f64::exp),
        ..base.clone()
    };
    assert!(torus_solve(&no_brackets, &config(1)).is_err());
    let odd = TorusProblem {
        nodes: 7,
        rhs: RhsSpec::separable("exp(t)", |_| 1.0, f64::exp).with_brackets(-1.0, 1.0),
        ..base
    };
    let mut coloured = config(1);
    coloured.sweep_order = SweepOrder::Colored;
    assert!(torus_solve(&odd, &coloured).is_err());
    assert!(torus_solve(&odd, &config(1)).is_ok());
}

#[test]
fn group_convolutions_commute_with_translations() {
    let d: Arc<GridDomain> = GridDomain::torus(2, 1.0, 6).unwrap();
    let mut rng = SeededRng::new(5);
    let values: Vec<f64> = (0..d.len()).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let u = GridFunction::from_values(d.clone(), values).unwrap();
    let shifted: Vec<f64> = (0..d.len()).map(|p| u.get(d.shift(p, 2, 3).unwrap())).collect();
    let v = GridFunction::from_values(d.clone(), shifted).unwrap();
    let (su, sv) = (group_sup_convolution(&u, 0.2), group_sup_convolution(&v, 0.2));
    let (iu, iv) = (group_inf_convolution(&u, 0.2), group_inf_convolution(&v, 0.2));
    for p in 0..d.len() {
        let q = d.shift(p, 2, 3).unwrap();
        assert_eq!(sv.get(p).to_bits(), su.get(q).to_bits());
        assert_eq!(iv.get(p).to_bits(), iu.get(q).to_bits());
        assert!(iu.get(p) <= u.get(p) && u.get(p) <= su.get(p));
    }
}
