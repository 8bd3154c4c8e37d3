//! Elementary symmetric functions, Gårding cones, and Hessian densities of
//! Hermitian forms.
//!
//! A real (1,1)-form is represented by its Hermitian coefficient matrix, with
//! the Kähler form mapping to the identity. Under that correspondence
//! `C(n,k) α^k ∧ β^(n-k) = S̃_k(A) β^n`, so the density of `α^k ∧ β^(n-k)`
//! against `β^n` is [`hessian_density`].

use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{arg, domain, Error, Result};
use crate::rng::SeededRng;

/// Slack on `S_j` values when deciding cone membership.
pub const TOL_CONE: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 60;

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return arg(format!("order {k} outside 1..={n}"));
    }
    Ok(())
}

/// Real vector of eigenvalues of a Hermitian form.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenVector {
    entries: SmallVec<[f64; 8]>,
}

impl EigenVector {
    pub fn new(entries: &[f64]) -> Result<Self> {
        if entries.is_empty() {
            return arg("eigenvector must have dimension >= 1");
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return arg("eigenvector entries must be finite");
        }
        Ok(Self {
            entries: SmallVec::from_slice(entries),
        })
    }

    fn from_sorted(mut entries: SmallVec<[f64; 8]>) -> Self {
        entries.sort_by(|a, b| b.total_cmp(a));
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn shifted(&self, t: f64) -> EigenVector {
        Self {
            entries: self.entries.iter().map(|v| v + t).collect(),
        }
    }
}

/// `S_0, S_1, ..., S_k` of `lambda` by the prefix recurrence
/// `e_j <- e_j + λ_i e_(j-1)`.
pub fn elementary_symmetric_all(lambda: &[f64], k: usize) -> SmallVec<[f64; 9]> {
    let mut e: SmallVec<[f64; 9]> = SmallVec::from_elem(0.0, k + 1);
    e[0] = 1.0;
    for (i, &l) in lambda.iter().enumerate() {
        let top = (i + 1).min(k);
        for j in (1..=top).rev() {
            e[j] += l * e[j - 1];
        }
    }
    e
}

pub fn elementary_symmetric(lambda: &EigenVector, k: usize) -> Result<f64> {
    check_order(lambda.dim(), k)?;
    Ok(elementary_symmetric_all(lambda.as_slice(), k)[k])
}

/// Membership in the Gårding cone Γ_k with the default tolerance.
pub fn in_gamma_k(lambda: &EigenVector, k: usize) -> Result<bool> {
    in_gamma_k_tol(lambda, k, TOL_CONE)
}

pub fn in_gamma_k_tol(lambda: &EigenVector, k: usize, tol: f64) -> Result<bool> {
    check_order(lambda.dim(), k)?;
    Ok(gamma_member(lambda.as_slice(), k, tol))
}

pub(crate) fn gamma_member(lambda: &[f64], k: usize, tol: f64) -> bool {
    let e = elementary_symmetric_all(lambda, k);
    e[1..].iter().all(|&s| s >= -tol)
}

/// `S_k^(1/k)` on Γ_k, with round-off negatives clamped to zero.
pub fn sk_root(lambda: &EigenVector, k: usize) -> Result<f64> {
    let s = elementary_symmetric(lambda, k)?;
    Ok(clamped_root(s, k))
}

pub(crate) fn clamped_root(value: f64, k: usize) -> f64 {
    if value <= 0.0 {
        return 0.0;
    }
    match k {
        1 => value,
        2 => value.sqrt(),
        _ => value.powf(1.0 / k as f64),
    }
}

/// Hermitian coefficient matrix `[a_jk̄]` of a real (1,1)-form.
#[derive(Clone, PartialEq)]
pub struct HermitianForm {
    dim: usize,
    entries: SmallVec<[Complex64; 16]>,
}

impl fmt::Debug for HermitianForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HermitianForm({}x{})", self.dim, self.dim)?;
        for j in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|k| {
                    let c = self.get(j, k);
                    format!("{:+.6e}{:+.6e}i", c.re, c.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl HermitianForm {
    /// Builds a form from row-major entries, replacing `A` by `(A + A*)/2`.
    pub fn new(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return arg("form dimension must be >= 1");
        }
        if entries.len() != dim * dim {
            return arg(format!(
                "expected {} entries for a {dim}x{dim} form, got {}",
                dim * dim,
                entries.len()
            ));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return arg("form entries must be finite");
        }
        let mut form = Self {
            dim,
            entries: SmallVec::from_slice(entries),
        };
        form.symmetrize();
        Ok(form)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: SmallVec::from_elem(Complex64::new(0.0, 0.0), dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut out = Self::zeros(dim);
        for j in 0..dim {
            out.entries[j * dim + j] = Complex64::new(c, 0.0);
        }
        out
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut out = Self::zeros(dim);
        for (j, &d) in diag.iter().enumerate() {
            out.entries[j * dim + j] = Complex64::new(d, 0.0);
        }
        out
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut out = Self::zeros(dim);
        for j in 0..dim {
            for k in 0..dim {
                out.entries[j * dim + k] = f(j, k);
            }
        }
        out.symmetrize();
        out
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for j in 0..n {
            let d = self.entries[j * n + j].re;
            self.entries[j * n + j] = Complex64::new(d, 0.0);
            for k in (j + 1)..n {
                let avg = (self.entries[j * n + k] + self.entries[k * n + j].conj()) * 0.5;
                self.entries[j * n + k] = avg;
                self.entries[k * n + j] = avg.conj();
            }
        }
    }

    /// Sets entry `(j,k)` and its mirror `(k,j)`.
    pub(crate) fn set_pair(&mut self, j: usize, k: usize, value: Complex64) {
        let n = self.dim;
        if j == k {
            self.entries[j * n + j] = Complex64::new(value.re, 0.0);
        } else {
            self.entries[j * n + k] = value;
            self.entries[k * n + j] = value.conj();
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.dim + k]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|j| self.entries[j * self.dim + j].re).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn add_scaled_identity(&self, c: f64) -> Self {
        let mut out = self.clone();
        for j in 0..self.dim {
            out.entries[j * self.dim + j].re += c;
        }
        out
    }

    /// `tr(A B)`, real for Hermitian `A`, `B`.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                let a = self.entries[j * n + k];
                let b = other.entries[k * n + j];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    /// Matrix product; the result is Hermitian when the factors commute,
    /// which is the only way it is used (powers of one form).
    fn matmul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for j in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    acc += self.entries[j * n + l] * other.entries[l * n + k];
                }
                out.entries[j * n + k] = acc;
            }
        }
        out
    }

    /// `U A U*` for a unitary `U` given row-major.
    pub fn conjugate_by(&self, unitary: &[Complex64]) -> Self {
        let n = self.dim;
        assert_eq!(unitary.len(), n * n);
        let mut tmp = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    acc += unitary[j * n + l] * self.entries[l * n + k];
                }
                tmp[j * n + k] = acc;
            }
        }
        Self::from_fn(n, |j, k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                acc += tmp[j * n + l] * unitary[k * n + l].conj();
            }
            acc
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from `A = A*`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let d = self.entries[j * n + k] - self.entries[k * n + j].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// Spectrum of a Hermitian form, sorted descending, by cyclic complex Jacobi
/// rotations.
pub fn eigenvalues(a: &HermitianForm) -> Result<EigenVector> {
    let n = a.dim;
    let mut m = a.entries.clone();
    let scale = a.max_abs();
    if n == 1 || scale == 0.0 {
        return Ok(EigenVector::from_sorted(
            (0..n).map(|j| m[j * n + j].re).collect(),
        ));
    }
    let threshold = f64::EPSILON * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= threshold {
            return Ok(EigenVector::from_sorted(
                (0..n).map(|j| m[j * n + j].re).collect(),
            ));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, n, p, q);
            }
        }
    }
    let mut off = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            off += m[p * n + q].norm_sqr();
        }
    }
    Err(Error::Numerical {
        method: "complex Jacobi eigenvalues",
        detail: format!(
            "no convergence after {JACOBI_MAX_SWEEPS} sweeps: off-diagonal norm {:.3e}, matrix scale {scale:.3e}",
            off.sqrt()
        ),
    })
}

/// Spectrum for the solver hot path: closed form for n ≤ 2, Jacobi otherwise.
pub(crate) fn spectrum(a: &HermitianForm) -> Result<SmallVec<[f64; 8]>> {
    match a.dim {
        1 => Ok(SmallVec::from_slice(&[a.entries[0].re])),
        2 => {
            let (p, q) = (a.entries[0].re, a.entries[3].re);
            let mean = 0.5 * (p + q);
            let rad = (0.5 * (p - q)).hypot(a.entries[1].norm());
            Ok(SmallVec::from_slice(&[mean + rad, mean - rad]))
        }
        _ => Ok(eigenvalues(a)?.entries),
    }
}

fn jacobi_rotate(m: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    // Rephase column/row q so that a_pq becomes real and positive.
    let w = apq / mag;
    let wc = w.conj();
    for k in 0..n {
        m[k * n + q] *= wc;
    }
    for k in 0..n {
        m[q * n + k] *= w;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        let new_kp = akp * c - akq * s;
        let new_kq = akp * s + akq * c;
        m[k * n + p] = new_kp;
        m[p * n + k] = new_kp.conj();
        m[k * n + q] = new_kq;
        m[q * n + k] = new_kq.conj();
    }
    m[p * n + p] = Complex64::new(app - t * mag, 0.0);
    m[q * n + q] = Complex64::new(aqq + t * mag, 0.0);
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);
}

/// `S̃_k(A) = S_k(λ(A))`, the sum of the principal k-minors.
pub fn hessian_symmetric(a: &HermitianForm, k: usize) -> Result<f64> {
    check_order(a.dim, k)?;
    let lambda = eigenvalues(a)?;
    Ok(elementary_symmetric_all(lambda.as_slice(), k)[k])
}

/// `σ_m(A) = S̃_m(A) / C(n,m)`: the density of `α^m ∧ β^(n-m)` against `β^n`.
pub fn hessian_density(a: &HermitianForm, m: usize) -> Result<f64> {
    Ok(hessian_symmetric(a, m)? / binomial(a.dim, m))
}

pub fn is_m_positive(a: &HermitianForm, m: usize) -> Result<bool> {
    check_order(a.dim, m)?;
    let lambda = eigenvalues(a)?;
    Ok(gamma_member(lambda.as_slice(), m, TOL_CONE))
}

/// Gradient of `S̃_m` with respect to the entries of `A`, i.e. the Newton
/// transform `T_(m-1)(A) = Σ_j (-1)^j S̃_(m-1-j)(A) A^j`, so that
/// `d S̃_m(A)[H] = tr(T H)` for Hermitian `H`.
pub fn garding_gradient(a: &HermitianForm, m: usize) -> Result<HermitianForm> {
    check_order(a.dim, m)?;
    let lambda = eigenvalues(a)?;
    Ok(newton_transform(a, lambda.as_slice(), m))
}

pub(crate) fn newton_transform(a: &HermitianForm, lambda: &[f64], m: usize) -> HermitianForm {
    let n = a.dim;
    let e = elementary_symmetric_all(lambda, m - 1);
    let mut out = HermitianForm::scaled_identity(n, e[m - 1]);
    let mut power = HermitianForm::identity(n);
    let mut sign = 1.0;
    for j in 1..m {
        power = power.matmul(a);
        sign = -sign;
        let coeff = sign * e[m - 1 - j];
        for (o, p) in out.entries.iter_mut().zip(power.entries.iter()) {
            *o += p * coeff;
        }
    }
    out.symmetrize();
    out
}

/// Coefficients `T(α) / (m C(n,m))` of the mixed density, so that
/// `dd^c u ∧ α^(m-1) ∧ β^(n-m) / β^n = tr(C A(u))`.
pub fn mixed_linear_coefficients(alpha: &HermitianForm, m: usize) -> Result<HermitianForm> {
    check_order(alpha.dim, m)?;
    let lambda = eigenvalues(alpha)?;
    if !gamma_member(lambda.as_slice(), m, TOL_CONE) {
        return domain(format!("direction is not {m}-positive"));
    }
    let t = newton_transform(alpha, lambda.as_slice(), m);
    Ok(t.scale(1.0 / (m as f64 * binomial(alpha.dim, m))))
}

/// `tr(C(α) A)` for a prepared coefficient matrix.
pub fn mixed_density(coefficients: &HermitianForm, a: &HermitianForm) -> f64 {
    coefficients.trace_product(a)
}

/// Normalization slack accepted for members of `U_m`.
pub const DIRECTION_NORM_TOL: f64 = 1e-9;

/// Minimum of the mixed densities of `A` over a finite sample of `U_m`.
///
/// Every direction must be `m`-positive with `σ_m(α) = 1`. The result bounds
/// `σ_m(A)^(1/m)` from above and equals it when the sample contains
/// `A / σ_m(A)^(1/m)`.
pub fn garding_infimum(a: &HermitianForm, m: usize, directions: &[HermitianForm]) -> Result<f64> {
    check_order(a.dim, m)?;
    if directions.is_empty() {
        return arg("direction sample is empty");
    }
    let lambda = eigenvalues(a)?;
    if !gamma_member(lambda.as_slice(), m, TOL_CONE) {
        return domain(format!("form is not {m}-positive"));
    }
    let mut best = f64::INFINITY;
    for (i, alpha) in directions.iter().enumerate() {
        if alpha.dim != a.dim {
            return arg(format!("direction {i} has dimension {}", alpha.dim));
        }
        let sigma = hessian_density(alpha, m)?;
        if (sigma - 1.0).abs() > DIRECTION_NORM_TOL {
            return arg(format!(
                "direction {i} is not normalized: sigma_{m} = {sigma}"
            ));
        }
        let c = mixed_linear_coefficients(alpha, m)?;
        best = best.min(c.trace_product(a));
    }
    Ok(best)
}

/// Rescales `A` onto `U_m`, i.e. `A / σ_m(A)^(1/m)`; `None` when `A` is not
/// strictly inside the cone.
pub fn normalize_direction(a: &HermitianForm, m: usize) -> Result<Option<HermitianForm>> {
    check_order(a.dim, m)?;
    let lambda = eigenvalues(a)?;
    if !gamma_member(lambda.as_slice(), m, TOL_CONE) {
        return Ok(None);
    }
    let sigma = elementary_symmetric_all(lambda.as_slice(), m)[m] / binomial(a.dim, m);
    if sigma <= f64::MIN_POSITIVE {
        return Ok(None);
    }
    Ok(Some(a.scale(1.0 / clamped_root(sigma, m))))
}

/// Random unitary from Gram-Schmidt on a matrix with entries uniform in the
/// complex unit box. Row-major.
pub fn random_unitary(n: usize, rng: &mut SeededRng) -> Vec<Complex64> {
    loop {
        let mut rows: Vec<Vec<Complex64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.complex_unit_box()).collect())
            .collect();
        let mut ok = true;
        for i in 0..n {
            for j in 0..i {
                let proj: Complex64 = (0..n).map(|k| rows[j][k].conj() * rows[i][k]).sum();
                let pj = rows[j].clone();
                for (x, p) in rows[i].iter_mut().zip(pj.iter()) {
                    *x -= proj * p;
                }
            }
            let norm = rows[i].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                ok = false;
                break;
            }
            for x in rows[i].iter_mut() {
                *x /= norm;
            }
        }
        if ok {
            return rows.into_iter().flatten().collect();
        }
    }
}

/// Finite sample of `U_m`.
///
/// The identity always comes first. The remaining directions are positive
/// diagonals `exp(η u_j)` with `u_j` uniform in [-1,1], conjugated by one of a
/// small pool of random unitaries, each rescaled to `σ_m = 1`. A reference
/// form, when given and strictly inside the cone, contributes its own
/// normalized direction last.
#[derive(Clone, Debug)]
pub struct DirectionSample {
    pub directions: Vec<HermitianForm>,
}

/// Spread of the diagonal perturbations.
pub const DIRECTION_SPREAD: f64 = 0.5;
/// Number of unitaries the non-identity directions are conjugated by.
pub const UNITARY_POOL: usize = 4;

impl DirectionSample {
    pub fn generate(
        n: usize,
        m: usize,
        count: usize,
        seed: u64,
        reference: Option<&HermitianForm>,
    ) -> Result<Self> {
        check_order(n, m)?;
        if count == 0 {
            return arg("direction count must be >= 1");
        }
        let mut rng = SeededRng::new(seed);
        let pool: Vec<Vec<Complex64>> = (0..UNITARY_POOL)
            .map(|_| random_unitary(n, &mut rng))
            .collect();
        let mut directions = Vec::with_capacity(count + 1);
        directions.push(HermitianForm::identity(n));
        while directions.len() < count {
            let diag: Vec<f64> = (0..n)
                .map(|_| (DIRECTION_SPREAD * rng.uniform_in(-1.0, 1.0)).exp())
                .collect();
            let u = &pool[rng.index(pool.len())];
            let alpha = HermitianForm::diagonal(&diag).conjugate_by(u);
            if let Some(d) = normalize_direction(&alpha, m)? {
                directions.push(d);
            }
        }
        if let Some(a) = reference {
            if let Some(d) = normalize_direction(a, m)? {
                directions.push(d);
            }
        }
        Ok(Self { directions })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut SeededRng) -> HermitianForm {
        HermitianForm::from_fn(n, |j, k| {
            if j == k {
                c(rng.uniform_in(-1.0, 1.0), 0.0)
            } else {
                rng.complex_unit_box()
            }
        })
    }

    #[test]
    fn elementary_symmetric_examples() {
        let ones = EigenVector::new(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(elementary_symmetric(&ones, 2).unwrap(), 3.0);
        let v = EigenVector::new(&[2.0, -3.0, 0.5, 4.0]).unwrap();
        assert!((elementary_symmetric(&v, 4).unwrap() - (2.0 * -3.0 * 0.5 * 4.0)).abs() < 1e-14);
        assert!(elementary_symmetric(&v, 0).is_err());
        assert!(elementary_symmetric(&v, 5).is_err());
    }

    #[test]
    fn elementary_symmetric_matches_subset_enumeration() {
        let mut rng = SeededRng::new(11);
        for _ in 0..200 {
            let n = 1 + rng.index(6);
            let lambda: Vec<f64> = (0..n).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
            let v = EigenVector::new(&lambda).unwrap();
            for k in 1..=n {
                let got = elementary_symmetric(&v, k).unwrap();
                let want = oracle::sk_enumerate(&lambda, k).unwrap().value;
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
            }
        }
    }

    #[test]
    fn gamma_membership_examples() {
        let ones = EigenVector::new(&[1.0; 4]).unwrap();
        for k in 1..=4 {
            assert!(in_gamma_k(&ones, k).unwrap());
        }
        let v = EigenVector::new(&[3.0, -1.0]).unwrap();
        assert!(in_gamma_k(&v, 1).unwrap());
        assert!(!in_gamma_k(&v, 2).unwrap());
    }

    #[test]
    fn eigenvalue_examples() {
        let id = eigenvalues(&HermitianForm::identity(3)).unwrap();
        assert_eq!(id.as_slice(), &[1.0, 1.0, 1.0]);
        let d = eigenvalues(&HermitianForm::diagonal(&[2.0, 4.0, 2.0])).unwrap();
        assert_eq!(d.as_slice(), &[4.0, 2.0, 2.0]);
    }

    #[test]
    fn rank_one_update_spectrum() {
        // A = 2|z|^2 I + 2 conj(z) z^T has spectrum (4|z|^2, 2|z|^2, ...).
        let z = [c(0.3, -0.7), c(1.1, 0.2), c(-0.4, 0.5)];
        let s: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let a = HermitianForm::from_fn(3, |j, k| {
            let delta = if j == k { 2.0 * s } else { 0.0 };
            c(delta, 0.0) + z[j].conj() * z[k] * 2.0
        });
        let lambda = eigenvalues(&a).unwrap();
        let want = [4.0 * s, 2.0 * s, 2.0 * s];
        for (g, w) in lambda.as_slice().iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn eigenvalue_backward_error() {
        let mut rng = SeededRng::new(5);
        for _ in 0..100 {
            let n = 1 + rng.index(8);
            let a = random_hermitian(n, &mut rng);
            let lambda = eigenvalues(&a).unwrap();
            let norm = a.max_abs() * n as f64;
            // trace and Frobenius norm are spectral invariants
            let tr: f64 = lambda.as_slice().iter().sum();
            assert!((tr - a.trace()).abs() < 1e-10 * norm.max(1.0));
            let fro: f64 = a.entries().iter().map(|v| v.norm_sqr()).sum();
            let fro_l: f64 = lambda.as_slice().iter().map(|v| v * v).sum();
            assert!((fro - fro_l).abs() < 1e-10 * norm.max(1.0).powi(2));
            assert!(lambda.as_slice().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn hessian_symmetric_examples() {
        for n in 1..=5 {
            for k in 1..=n {
                let v = hessian_symmetric(&HermitianForm::identity(n), k).unwrap();
                assert!((v - binomial(n, k)).abs() < 1e-12);
            }
        }
        let a = HermitianForm::diagonal(&[2.0, 2.0, -1.0]);
        assert!(hessian_symmetric(&a, 2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn hessian_density_examples() {
        for n in 1..=4 {
            for m in 1..=n {
                let one = hessian_density(&HermitianForm::identity(n), m).unwrap();
                assert!((one - 1.0).abs() < 1e-12);
                let two = hessian_density(&HermitianForm::scaled_identity(n, 2.0), m).unwrap();
                assert!((two - 2f64.powi(m as i32)).abs() < 1e-12);
            }
        }
        // |z|^4 at |z| = r in C^2: eigenvalues (4r^2, 2r^2), sigma_2 = 8 r^4.
        let z = [c(0.6, 0.0), c(0.0, 0.8)];
        let r2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let a = HermitianForm::from_fn(2, |j, k| {
            let delta = if j == k { 2.0 * r2 } else { 0.0 };
            c(delta, 0.0) + z[j].conj() * z[k] * 2.0
        });
        let got = hessian_density(&a, 2).unwrap();
        assert!((got - 8.0 * r2 * r2).abs() < 1e-12);
    }

    #[test]
    fn m_positivity_examples() {
        let a = HermitianForm::diagonal(&[2.0, 2.0, -1.0]);
        assert!(is_m_positive(&a, 1).unwrap());
        assert!(is_m_positive(&a, 2).unwrap());
        assert!(!is_m_positive(&a, 3).unwrap());
        let mut rng = SeededRng::new(9);
        for _ in 0..50 {
            let n = 1 + rng.index(5);
            let b = random_hermitian(n, &mut rng);
            // B B* is positive semidefinite
            let psd = HermitianForm::from_fn(n, |j, k| {
                (0..n).map(|l| b.get(j, l) * b.get(k, l).conj()).sum()
            });
            for m in 1..=n {
                assert!(is_m_positive(&psd, m).unwrap());
            }
        }
    }

    #[test]
    fn gradient_examples() {
        for n in 1..=5 {
            for m in 1..=n {
                let t = garding_gradient(&HermitianForm::identity(n), m).unwrap();
                let want = HermitianForm::scaled_identity(n, binomial(n - 1, m - 1));
                assert!(t.add(&want.scale(-1.0)).max_abs() < 1e-12);
            }
        }
        let mu = [1.5, -0.5, 2.0, 0.25];
        let t = garding_gradient(&HermitianForm::diagonal(&mu), 3).unwrap();
        for j in 0..4 {
            let rest: Vec<f64> = mu.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| *v).collect();
            let want = elementary_symmetric_all(&rest, 2)[2];
            assert!((t.get(j, j).re - want).abs() < 1e-12);
            for k in 0..4 {
                if k != j {
                    assert!(t.get(j, k).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mixed_coefficients_identity_direction() {
        let mut rng = SeededRng::new(3);
        for n in 1..=4 {
            for m in 1..=n {
                let c = mixed_linear_coefficients(&HermitianForm::identity(n), m).unwrap();
                assert!((c.trace_product(&HermitianForm::identity(n)) - 1.0).abs() < 1e-12);
                let a = random_hermitian(n, &mut rng);
                assert!((c.trace_product(&a) - a.trace() / n as f64).abs() < 1e-12);
            }
        }
        let bad = HermitianForm::diagonal(&[1.0, -2.0]);
        assert!(matches!(mixed_linear_coefficients(&bad, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn garding_infimum_examples() {
        let id = HermitianForm::identity(3);
        let v = garding_infimum(&id, 2, &[HermitianForm::identity(3)]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);

        let a = HermitianForm::diagonal(&[4.0, 1.0]);
        let sample = DirectionSample::generate(2, 2, 8, 1, Some(&a)).unwrap();
        let v = garding_infimum(&a, 2, &sample.directions).unwrap();
        assert!((v - 2.0).abs() < 1e-9);

        assert!(garding_infimum(&a, 2, &[]).is_err());
        let unnormalized = HermitianForm::scaled_identity(2, 2.0);
        assert!(matches!(
            garding_infimum(&a, 2, &[unnormalized]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn direction_sample_is_normalized_and_seeded() {
        let s1 = DirectionSample::generate(3, 2, 16, 42, None).unwrap();
        let s2 = DirectionSample::generate(3, 2, 16, 42, None).unwrap();
        assert_eq!(s1.len(), 16);
        assert_eq!(s1.directions[0], HermitianForm::identity(3));
        for (a, b) in s1.directions.iter().zip(&s2.directions) {
            assert_eq!(a, b);
            assert!((hessian_density(a, 2).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_root_is_clamped() {
        // S_3 is a tiny negative round-off value on the cone boundary.
        let v = EigenVector::new(&[1.0, 1.0, -1e-14]).unwrap();
        assert!(in_gamma_k(&v, 3).unwrap());
        assert_eq!(sk_root(&v, 3).unwrap(), 0.0);
        assert_eq!(sk_root(&EigenVector::new(&[0.0, 0.0, 0.0]).unwrap(), 3).unwrap(), 0.0);
    }
}
