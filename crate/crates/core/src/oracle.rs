//! Brute-force reference computations for cross-checking the fast paths.
//!
//! Nothing here calls into the code it is meant to check: symmetric functions
//! are summed subset by subset, minors are expanded by cofactors, and the
//! Poisson system is assembled and eliminated from scratch.

use num_complex::Complex64;

use crate::cone::HermitianForm;
use crate::error::{arg, domain, Result};
use crate::grid::{GridFunction, NodeKind};

/// Largest vector length accepted by [`sk_enumerate`].
pub const MAX_SUBSET_DIM: usize = 8;
/// Largest matrix dimension accepted by [`minor_enumerate`].
pub const MAX_MINOR_DIM: usize = 6;
/// Largest complex dimension accepted by [`poisson_direct`].
pub const MAX_POISSON_DIM: usize = 4;
/// Cap on band storage entries of the Poisson elimination.
pub const MAX_BAND_ENTRIES: usize = 25_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<T> {
    pub value: T,
    pub method: &'static str,
    /// Number of elementary terms or floating point updates performed.
    pub cost: u64,
}

/// `S_k(λ)` as an explicit sum over every k-subset.
pub fn sk_enumerate(lambda: &[f64], k: usize) -> Result<OracleResult<f64>> {
    let n = lambda.len();
    if n == 0 || n > MAX_SUBSET_DIM {
        return arg(format!("subset oracle needs 1 <= n <= {MAX_SUBSET_DIM}, got {n}"));
    }
    if k == 0 || k > n {
        return arg(format!("order {k} out of range for n = {n}"));
    }
    let mut total = 0.0;
    let mut cost = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let prod: f64 = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| lambda[i])
            .product();
        total += prod;
        cost += 1;
    }
    Ok(OracleResult {
        value: total,
        method: "subset-enumeration",
        cost,
    })
}

fn cofactor_det(m: &[Complex64], size: usize, cost: &mut u64) -> Complex64 {
    match size {
        1 => m[0],
        2 => {
            *cost += 2;
            m[0] * m[3] - m[1] * m[2]
        }
        _ => {
            let mut det = Complex64::new(0.0, 0.0);
            let mut sub = vec![Complex64::new(0.0, 0.0); (size - 1) * (size - 1)];
            for col in 0..size {
                let mut idx = 0;
                for r in 1..size {
                    for c in 0..size {
                        if c != col {
                            sub[idx] = m[r * size + c];
                            idx += 1;
                        }
                    }
                }
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                *cost += 1;
                det += m[col] * sign * cofactor_det(&sub, size - 1, cost);
            }
            det
        }
    }
}

/// Sum of all k×k principal minors of `A`, each by cofactor expansion.
pub fn minor_enumerate(a: &HermitianForm, k: usize) -> Result<OracleResult<f64>> {
    let n = a.dim();
    if n > MAX_MINOR_DIM {
        return arg(format!("minor oracle needs n <= {MAX_MINOR_DIM}, got {n}"));
    }
    if k == 0 || k > n {
        return arg(format!("order {k} out of range for n = {n}"));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut cost = 0;
    let mut sub = Vec::with_capacity(k * k);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let rows: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        sub.clear();
        for &r in &rows {
            for &c in &rows {
                sub.push(a.get(r, c));
            }
        }
        total += cofactor_det(&sub, k, &mut cost);
    }
    Ok(OracleResult {
        value: total.re,
        method: "principal-minor-cofactor",
        cost,
    })
}

/// Eigenvalues of `A(u)` for a radial `u(z) = χ(|z|²)` in `C^n`, given
/// `χ'(s)` and `χ''(s)` at `s = |z|²`: `χ'` with multiplicity `n-1` and
/// `χ' + s χ''` once. Sorted descending.
pub fn radial_hessian(n: usize, d1: f64, d2: f64, s: f64) -> Result<OracleResult<Vec<f64>>> {
    if n == 0 {
        return arg("dimension must be >= 1");
    }
    if s < 0.0 {
        return arg(format!("s = |z|^2 must be >= 0, got {s}"));
    }
    let mut v = vec![d1; n - 1];
    v.push(d1 + s * d2);
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(OracleResult {
        value: v,
        method: "radial-closed-form",
        cost: 1,
    })
}

/// Central finite-difference gradient of a scalar function of a Hermitian
/// form, in the convention `df(A)[H] = tr(G H)`. Row-major entries of `G`.
pub fn fd_gradient(
    f: impl Fn(&HermitianForm) -> f64,
    a: &HermitianForm,
    step: f64,
) -> Result<OracleResult<Vec<Complex64>>> {
    if !(step > 0.0) {
        return arg("finite-difference step must be positive");
    }
    let n = a.dim();
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    let mut cost = 0;
    let perturbed = |j: usize, k: usize, e: Complex64| {
        let mut entries = a.entries().to_vec();
        entries[j * n + k] += e;
        if j != k {
            entries[k * n + j] += e.conj();
        }
        HermitianForm::new(n, &entries).expect("perturbation keeps the form Hermitian")
    };
    for j in 0..n {
        for k in j..n {
            let dir = |e: Complex64| {
                (f(&perturbed(j, k, e * step)) - f(&perturbed(j, k, -e * step))) / (2.0 * step)
            };
            if j == k {
                g[j * n + j] = Complex64::new(dir(Complex64::new(1.0, 0.0)), 0.0);
                cost += 2;
            } else {
                // H = E_jk + E_kj probes 2 Re G_kj, H = i E_jk - i E_kj probes -2 Im G_kj
                let re = dir(Complex64::new(1.0, 0.0)) / 2.0;
                let im = -dir(Complex64::new(0.0, 1.0)) / 2.0;
                g[k * n + j] = Complex64::new(re, im);
                g[j * n + k] = Complex64::new(re, -im);
                cost += 4;
            }
        }
    }
    Ok(OracleResult {
        value: g,
        method: "central-finite-difference",
        cost,
    })
}

/// Solves `tr A(φ) = n f` on the interior with the Dirichlet data held by
/// `g` on the boundary nodes, by banded Gaussian elimination.
///
/// The trace of the discrete complex Hessian is a quarter of the standard
/// `(4n+1)`-point Laplacian, so the assembled rows are
/// `Σ_a (φ(p+e_a) + φ(p-e_a) - 2φ(p)) / h² = 4n f(p)`.
pub fn poisson_direct(
    g: &GridFunction,
    f: impl Fn(&[f64]) -> f64,
) -> Result<OracleResult<GridFunction>> {
    let d = g.domain().clone();
    let n = d.n();
    if n > MAX_POISSON_DIM {
        return arg(format!("Poisson oracle needs n <= {MAX_POISSON_DIM}, got {n}"));
    }
    if d.is_periodic() {
        return domain("Poisson oracle needs Dirichlet data");
    }
    let too_big = if n == 1 {
        d.nodes_per_axis() > 65
    } else {
        d.len() > 17usize.pow(4)
    };
    if too_big {
        return domain("grid exceeds the Poisson oracle caps (65^2 for n = 1, 17^4 otherwise)");
    }

    let interior = d.interior();
    let count = interior.len();
    let mut slot = vec![usize::MAX; d.len()];
    for (r, &p) in interior.iter().enumerate() {
        slot[p] = r;
    }
    let axes = d.axes();
    let mut bw = 0;
    for (r, &p) in interior.iter().enumerate() {
        for a in 0..axes {
            for s in [-1, 1] {
                let q = d.shift(p, a, s).expect("interior stencil");
                if slot[q] != usize::MAX {
                    bw = bw.max(r.abs_diff(slot[q]));
                }
            }
        }
    }
    let width = 2 * bw + 1;
    if count.saturating_mul(width) > MAX_BAND_ENTRIES {
        return domain(format!(
            "Poisson oracle system of {count} unknowns with bandwidth {bw} is too large"
        ));
    }

    // Row r stores columns r-bw ..= r+bw at offsets 0..width.
    let mut band = vec![0.0; count * width];
    let mut rhs = vec![0.0; count];
    let inv_h2 = 1.0 / (d.h() * d.h());
    for (r, &p) in interior.iter().enumerate() {
        band[r * width + bw] = -2.0 * axes as f64 * inv_h2;
        rhs[r] = 4.0 * n as f64 * f(&d.coords(p));
        for a in 0..axes {
            for s in [-1, 1] {
                let q = d.shift(p, a, s).expect("interior stencil");
                match d.kind(q) {
                    NodeKind::Interior => {
                        let c = slot[q];
                        band[r * width + (c + bw - r)] += inv_h2;
                    }
                    NodeKind::Boundary => rhs[r] -= g.get(q) * inv_h2,
                    NodeKind::Exterior => unreachable!("interior stencil reaches exterior"),
                }
            }
        }
    }

    // The matrix is symmetric negative definite and diagonally dominant, so
    // elimination without pivoting is stable.
    let mut cost: u64 = 0;
    for k in 0..count {
        let pivot = band[k * width + bw];
        let last = (k + bw).min(count - 1);
        for r in (k + 1)..=last {
            let off = k + bw - r;
            let factor = band[r * width + off] / pivot;
            if factor == 0.0 {
                continue;
            }
            band[r * width + off] = 0.0;
            for c in (k + 1)..=(k + bw).min(count - 1) {
                band[r * width + (c + bw - r)] -= factor * band[k * width + (c + bw - k)];
            }
            rhs[r] -= factor * rhs[k];
            cost += (bw + 1) as u64;
        }
    }
    let mut x = vec![0.0; count];
    for k in (0..count).rev() {
        let mut s = rhs[k];
        for c in (k + 1)..=(k + bw).min(count - 1) {
            s -= band[k * width + (c + bw - k)] * x[c];
        }
        x[k] = s / band[k * width + bw];
    }

    let mut values = g.values().to_vec();
    for (r, &p) in interior.iter().enumerate() {
        values[p] = x[r];
    }
    Ok(OracleResult {
        value: GridFunction::from_values(d, values)?,
        method: "banded-gaussian-elimination",
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{boundary_restriction, BoundarySampling, GridDomain};

    #[test]
    fn subset_examples() {
        assert_eq!(sk_enumerate(&[1.0, 2.0, 3.0], 2).unwrap().value, 11.0);
        assert_eq!(sk_enumerate(&[1.0; 4], 3).unwrap().value, 4.0);
        assert!(sk_enumerate(&[1.0; 3], 4).is_err());
    }

    #[test]
    fn minor_examples() {
        let i4 = HermitianForm::identity(4);
        for (k, want) in [(1, 4.0), (2, 6.0), (3, 4.0), (4, 1.0)] {
            assert!((minor_enumerate(&i4, k).unwrap().value - want).abs() < 1e-14);
        }
        let diag = [2.0, -1.0, 0.5];
        let a = HermitianForm::diagonal(&diag);
        for k in 1..=3 {
            let m = minor_enumerate(&a, k).unwrap().value;
            let s = sk_enumerate(&diag, k).unwrap().value;
            assert!((m - s).abs() < 1e-14);
        }
    }

    #[test]
    fn radial_examples() {
        assert_eq!(radial_hessian(3, 1.0, 0.0, 0.7).unwrap().value, vec![1.0; 3]);
        // χ(s) = s²: χ' = 2s, χ'' = 2
        let s = 0.3;
        let v = radial_hessian(3, 2.0 * s, 2.0, s).unwrap().value;
        assert_eq!(v, vec![4.0 * s, 2.0 * s, 2.0 * s]);
    }

    #[test]
    fn fd_gradient_of_trace_and_determinant() {
        let a = HermitianForm::new(
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.3, 0.4),
                Complex64::new(0.3, -0.4),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let tr = fd_gradient(|x| x.trace(), &a, 1e-5).unwrap().value;
        for j in 0..2 {
            for k in 0..2 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((tr[j * 2 + k] - Complex64::new(want, 0.0)).norm() < 1e-9);
            }
        }
        // det = a00 a11 - |a01|²; gradient is the adjugate [[a11, -a01], [-a10, a00]]
        let det = |x: &HermitianForm| (x.get(0, 0) * x.get(1, 1) - x.get(0, 1) * x.get(1, 0)).re;
        let g = fd_gradient(det, &a, 1e-5).unwrap().value;
        let want = [a.get(1, 1), -a.get(0, 1), -a.get(1, 0), a.get(0, 0)];
        for (x, y) in g.iter().zip(want.iter()) {
            assert!((x - y).norm() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn poisson_reproduces_harmonic_and_quadratic() {
        for (n, nodes) in [(1, 17), (2, 7)] {
            let d = GridDomain::ball(n, 1.0, nodes).unwrap();
            let g = boundary_restriction(|x| x[0], &d, BoundarySampling::Nodal).unwrap();
            let sol = poisson_direct(&g, |_| 0.0).unwrap().value;
            for &p in d.interior() {
                assert!((sol.get(p) - d.coord(p, 0)).abs() < 1e-11);
            }
            let norm2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
            let g = boundary_restriction(norm2, &d, BoundarySampling::Nodal).unwrap();
            let sol = poisson_direct(&g, |_| 1.0).unwrap().value;
            for &p in d.interior() {
                assert!((sol.get(p) - d.norm_sqr(p)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn poisson_caps() {
        let d = GridDomain::ball(1, 1.0, 67).unwrap();
        let g = boundary_restriction(|_| 0.0, &d, BoundarySampling::Nodal).unwrap();
        assert!(poisson_direct(&g, |_| 0.0).is_err());
    }
}
