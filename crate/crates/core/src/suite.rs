//! Randomized property suite over the cone kernel.

use std::fmt;

use num_complex::Complex64;

use crate::cone::{
    self, binomial, elementary_symmetric_all, gamma_member, DirectionSample, EigenVector, HermitianForm,
};
use crate::error::Result;
use crate::oracle;
use crate::rng::SeededRng;

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed violation of the property's inequality, in its own
    /// (scaled) units; zero when every trial passed with room to spare.
    pub worst_excess: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub properties: Vec<PropertyOutcome>,
    /// `(n, m, tr(T A), m S̃_m(A))` for one sample, for display.
    pub euler_spot_check: Option<(usize, usize, f64, f64)>,
}

impl SuiteReport {
    pub fn total_violations(&self) -> usize {
        self.properties.iter().map(|p| p.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_violations() == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            writeln!(
                f,
                "{:<28} trials={:<6} violations={:<4} worst_excess={:.3e}",
                p.name, p.trials, p.violations, p.worst_excess
            )?;
        }
        if let Some((n, m, lhs, rhs)) = self.euler_spot_check {
            writeln!(f, "euler spot check n={n} m={m}: tr(T A) = {lhs:.15e}, m S_m = {rhs:.15e}")?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    trials: usize,
    violations: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            violations: 0,
            worst: 0.0,
        }
    }

    /// Records a trial whose property reads `excess <= 0`.
    fn record(&mut self, excess: f64) {
        self.trials += 1;
        if !(excess <= 0.0) {
            self.violations += 1;
        }
        if excess > self.worst || excess.is_nan() {
            self.worst = excess;
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            name: self.name,
            trials: self.trials,
            violations: self.violations,
            worst_excess: self.worst,
        }
    }
}

pub fn random_hermitian(n: usize, rng: &mut SeededRng) -> HermitianForm {
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        entries[j * n + j] = Complex64::new(rng.uniform_in(-1.0, 1.0), 0.0);
        for k in (j + 1)..n {
            let z = rng.complex_unit_box();
            entries[j * n + k] = z;
            entries[k * n + j] = z.conj();
        }
    }
    HermitianForm::new(n, &entries).expect("Hermitian by construction")
}

/// Vector strictly inside Γ_m, by rejection from a box biased towards the
/// positive orthant.
pub fn random_cone_vector(n: usize, m: usize, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let lambda: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 2.0)).collect();
        let e = elementary_symmetric_all(&lambda, m);
        if e[1..].iter().all(|&s| s > 1e-3) {
            return lambda;
        }
    }
}

/// Form `U diag(λ) U*` with `λ` strictly inside Γ_m and `U` random unitary.
pub fn random_cone_form(n: usize, m: usize, rng: &mut SeededRng) -> HermitianForm {
    let lambda = random_cone_vector(n, m, rng);
    let u = cone::random_unitary(n, rng);
    HermitianForm::diagonal(&lambda).conjugate_by(&u)
}

fn scale_of(lambda: &[f64], k: usize) -> f64 {
    let top = lambda.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    binomial(lambda.len(), k) * top.powi(k as i32)
}

/// Runs every property `trials` times with `n` drawn from `1..=n_max` and
/// `m` from `1..=n` (or fixed to `m` when given and admissible).
pub fn run_cone_suite(n_max: usize, m: Option<usize>, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = SeededRng::new(seed);
    let pick = |rng: &mut SeededRng| {
        let lo = m.unwrap_or(1).max(1);
        let n = lo + rng.index(n_max.saturating_sub(lo) + 1);
        let k = match m {
            Some(k) => k,
            None => 1 + rng.index(n),
        };
        (n, k)
    };

    let mut chain = Tally::new("cone chain");
    let mut concavity = Tally::new("concavity of S_k^(1/k)");
    let mut minors = Tally::new("minor/eigenvalue agreement");
    let mut euler = Tally::new("Euler identity");
    let mut psd = Tally::new("gradient PSD on the cone");
    let mut fd = Tally::new("finite-difference gradient");
    let mut garding = Tally::new("Garding lower bound");
    let mut homogeneity = Tally::new("homogeneity");
    let mut boundary = Tally::new("boundary clamp");
    let mut spot = None;

    for _ in 0..trials {
        let (n, k) = pick(&mut rng);

        // cone chain on vectors near the boundary of the cones
        let lambda: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 2.0)).collect();
        let kk = 2.max(k).min(n);
        if n >= 2 {
            let inner = gamma_member(&lambda, kk, cone::TOL_CONE);
            let outer = gamma_member(&lambda, kk - 1, cone::TOL_CONE);
            chain.record(if inner && !outer { 1.0 } else { -1.0 });
        } else {
            chain.record(-1.0);
        }

        // concavity
        let a = random_cone_vector(n, k, &mut rng);
        let b = random_cone_vector(n, k, &mut rng);
        let t = rng.uniform();
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        let root = |v: &[f64]| cone::sk_root(&EigenVector::new(v).unwrap(), k).unwrap();
        concavity.record(t * root(&a) + (1.0 - t) * root(&b) - root(&mix) - 1e-10);

        // minors against the spectrum
        let h = random_hermitian(n, &mut rng);
        let spec = cone::eigenvalues(&h)?;
        let via_eig = cone::hessian_symmetric(&h, k)?;
        let via_minor = oracle::minor_enumerate(&h, k)?.value;
        minors.record((via_eig - via_minor).abs() / scale_of(spec.as_slice(), k) - 1e-10);

        // Euler identity and PSD gradient on the cone
        let c = random_cone_form(n, k, &mut rng);
        let grad = cone::garding_gradient(&c, k)?;
        let lhs = grad.trace_product(&c);
        let rhs = k as f64 * cone::hessian_symmetric(&c, k)?;
        let cspec = cone::eigenvalues(&c)?;
        let cscale = scale_of(cspec.as_slice(), k);
        euler.record((lhs - rhs).abs() / cscale - 1e-10);
        if spot.is_none() && n >= 3 {
            spot = Some((n, k, lhs, rhs));
        }
        let gmin = cone::eigenvalues(&grad)?.as_slice().last().copied().unwrap_or(0.0);
        psd.record(-gmin / scale_of(cspec.as_slice(), k.saturating_sub(1)) - 1e-10);

        // finite-difference gradient on a unit-scale matrix
        let g_fd = oracle::fd_gradient(|x| cone::hessian_symmetric(x, k).unwrap(), &h, 1e-5)?.value;
        let g = cone::garding_gradient(&h, k)?;
        let err = g_fd
            .iter()
            .zip(g.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        fd.record(err - 1e-6);

        // Garding infimum bound with and without the self-direction
        let sample = DirectionSample::generate(n, k, 8, rng.next_u64(), None)?;
        let target = cone::hessian_density(&c, k)?.powf(1.0 / k as f64);
        let inf = cone::garding_infimum(&c, k, &sample.directions)?;
        let with_self = DirectionSample::generate(n, k, 8, rng.next_u64(), Some(&c))?;
        let inf_self = cone::garding_infimum(&c, k, &with_self.directions)?;
        garding.record((target - inf - 1e-9).max((inf_self - target).abs() - 1e-9));

        // homogeneity of σ_m
        let s = rng.uniform_in(0.0, 3.0);
        let base = cone::hessian_density(&h, k)?;
        let scaled = cone::hessian_density(&h.scale(s), k)?;
        let hs = scale_of(spec.as_slice(), k) * s.max(1.0).powi(k as i32);
        homogeneity.record((scaled - s.powi(k as i32) * base).abs() / hs - 1e-10);

        // vectors on ∂Γ_k: S_k = 0 must clamp to a zero root, never fail
        let mut edge = vec![1.0; n];
        if k == n {
            edge[0] = 0.0;
        } else {
            // (1,...,1,-x) with S_k = C(n-1,k) - x C(n-1,k-1) = 0
            edge[n - 1] = -binomial(n - 1, k) / binomial(n - 1, k - 1);
        }
        let ev = EigenVector::new(&edge)?;
        let r = cone::sk_root(&ev, k)?;
        let member = cone::in_gamma_k(&ev, k)?;
        boundary.record(if r.powi(k as i32) <= 1e-12 * binomial(n, k) && member { -1.0 } else { 1.0 });
    }

    Ok(SuiteReport {
        properties: vec![
            chain.finish(),
            concavity.finish(),
            minors.finish(),
            euler.finish(),
            psd.finish(),
            fd.finish(),
            garding.finish(),
            homogeneity.finish(),
            boundary.finish(),
        ],
        euler_spot_check: spot,
    })
}
