//! Batteries of identity checks on random test functions, shared by the
//! command-line `verify` command and the integration tests.

use super::bispherical::Budget;
use super::direct::{cosine_transform, gen_cosine, radon_transform};
use super::identities::{q_composition_point, restriction_sides, verify_factorization, verify_intertwining, IdentityReport};
use crate::error::{Error, Result};
use crate::harmonic::{apply_multiplier_grid, bridge_multiplier, cosine_multiplier, q_multipliers, MultiplierSpec, ZonalExpansion};
use crate::special::radon_limit_constant;
use crate::sphere::{dot, product_quadrature, product_quadrature_even, random_frame_with, random_unit_vector, rng_for};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Even polynomial c₀ + Σ c_k (a_k·x)^{d_k}, optionally squared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomPolynomial {
    pub c0: f64,
    pub terms: Vec<(f64, Vec<f64>, u32)>,
    pub squared: bool,
}

impl RandomPolynomial {
    /// Random even polynomial of degree ≤ `degree` (rounded down to even).
    pub fn even<R: Rng>(n: usize, degree: usize, rng: &mut R) -> Self {
        let top = (degree / 2) as u32;
        let terms = (0..4)
            .map(|_| {
                let d = 2 * rng.gen_range(1..=top.max(1));
                (rng.gen_range(-1.0..1.0), random_unit_vector(n, rng), d)
            })
            .collect();
        RandomPolynomial { c0: rng.gen_range(0.5..1.5), terms, squared: false }
    }

    /// Square of a random even polynomial, degree ≤ `degree`: non-negative.
    pub fn nonnegative<R: Rng>(n: usize, degree: usize, rng: &mut R) -> Self {
        let mut p = RandomPolynomial::even(n, degree / 2, rng);
        p.c0 = rng.gen_range(-1.0..1.0);
        if degree < 4 {
            p.terms.clear();
        }
        p.squared = true;
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = self.c0 + self.terms.iter().map(|(c, a, d)| c * dot(a, x).powi(*d as i32)).sum::<f64>();
        if self.squared {
            v * v
        } else {
            v
        }
    }
}

/// Parameters shared by the suites. Fields a suite does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteOptions {
    pub n: usize,
    /// Band limit J of the test functions.
    pub max_degree: usize,
    pub seed: u64,
    /// Number of random test functions.
    pub functions: usize,
    /// Evaluation points (or frames, or (η, ξ) pairs) per function.
    pub points: usize,
    /// Monte-Carlo samples per point.
    pub samples: usize,
    pub budget: Budget,
    /// Overrides the suite's default tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            n: 4,
            max_degree: 16,
            seed: 0,
            functions: 10,
            points: 2,
            samples: 20000,
            budget: Budget::default(),
            tolerance: None,
        }
    }
}

impl SuiteOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

fn report(identity: &str, parameters: serde_json::Value, budget: serde_json::Value, seed: u64, max_err: f64, std_err: f64, pass: bool) -> IdentityReport {
    IdentityReport { identity: identity.into(), parameters, budget, seed, max_err, std_err, pass }
}

/// max |m_{j,α} m_{j,2−n−α} − 1| over even j ≤ J; α on a pole of either factor is skipped.
pub fn inversion_suite(ns: &[usize], alphas: &[f64], max_degree: usize, tol: f64) -> Result<IdentityReport> {
    let mut max_err: f64 = 0.0;
    let mut skipped = Vec::new();
    for &n in ns {
        for &a in alphas {
            let b = 2.0 - n as f64 - a;
            let mut pairs = Vec::new();
            for j in (0..=max_degree).step_by(2) {
                match (cosine_multiplier(j, a, n), cosine_multiplier(j, b, n)) {
                    (Ok(x), Ok(y)) => pairs.push(x * y),
                    (Err(Error::Pole(_)), _) | (_, Err(Error::Pole(_))) => {
                        skipped.push(json!({"n": n, "alpha": a}));
                        pairs.clear();
                        break;
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            for p in pairs {
                max_err = max_err.max((p - 1.0).abs());
            }
        }
    }
    Ok(report(
        "multiplier_inversion",
        json!({"n": ns, "alpha": alphas, "J": max_degree, "tolerance": tol, "skipped_poles": skipped}),
        json!({}),
        0,
        max_err,
        0.0,
        max_err <= tol,
    ))
}

/// c_{n−1} M^{2−n} M f = f on random even zonal coefficient vectors.
pub fn funk_round_trip(o: &SuiteOptions) -> Result<IdentityReport> {
    let tol = o.tol(1e-10);
    let n = o.n;
    let mut rng = rng_for(o.seed, 31);
    let c = radon_limit_constant(n - 1);
    let mut max_err: f64 = 0.0;
    for _ in 0..o.functions {
        let coeffs: Vec<f64> =
            (0..=o.max_degree).map(|j| if j % 2 == 0 { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect();
        let f = ZonalExpansion::new(n, coeffs);
        let back = f.apply(&MultiplierSpec::Funk)?.apply(&MultiplierSpec::Cosine { alpha: 2.0 - n as f64 })?;
        let scale = f.coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in back.coeffs.iter().zip(&f.coeffs) {
            max_err = max_err.max((c * x - y).abs() / scale);
        }
    }
    Ok(report(
        "funk_inversion",
        json!({"n": n, "J": o.max_degree, "functions": o.functions, "tolerance": tol}),
        json!({}),
        o.seed,
        max_err,
        0.0,
        max_err <= tol,
    ))
}

/// Relative gap between R_i^α f and c_i R_i f for each α, on random frames.
pub fn limit_errors(o: &SuiteOptions, i: usize, alphas: &[f64]) -> Result<Vec<f64>> {
    let mut rng = rng_for(o.seed, 37);
    let cases: Vec<_> = (0..o.functions)
        .map(|_| (RandomPolynomial::even(o.n, o.max_degree, &mut rng), random_frame_with(o.n, i, &mut rng)))
        .collect();
    let ci = radon_limit_constant(i);
    alphas
        .iter()
        .map(|&a| {
            let mut e: f64 = 0.0;
            for (p, xi) in &cases {
                let f = |x: &[f64]| p.eval(x);
                let r = ci * radon_transform(&f, xi, o.budget.sphere_res)?;
                let g = gen_cosine(&f, xi, a, o.budget)?;
                e = e.max((g - r).abs() / r.abs().max(1e-300));
            }
            Ok(e)
        })
        .collect()
}

/// R_i^α → c_i R_i as α ↓ 0: the last error is within tolerance and the errors decrease.
pub fn limit_suite(o: &SuiteOptions, i: usize, alphas: &[f64]) -> Result<IdentityReport> {
    let tol = o.tol(1e-2);
    let errs = limit_errors(o, i, alphas)?;
    let last = *errs.last().unwrap_or(&f64::NAN);
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    Ok(report(
        "radon_limit",
        json!({"n": o.n, "i": i, "alpha": alphas, "errors": errs, "decreasing": decreasing, "J": o.max_degree,
               "functions": o.functions, "tolerance": tol}),
        json!(o.budget),
        o.seed,
        last,
        0.0,
        last <= tol && decreasing,
    ))
}

/// Direct quadrature of M^α against the multiplier route on band-limited f.
pub fn multiplier_agreement(o: &SuiteOptions, alpha: f64) -> Result<IdentityReport> {
    let tol = o.tol(1e-6);
    let (n, jmax) = (o.n, o.max_degree);
    let mut rng = rng_for(o.seed, 41);
    let rule = product_quadrature(n, jmax + 2)?;
    let mut max_err: f64 = 0.0;
    for _ in 0..o.functions {
        let p = RandomPolynomial::even(n, jmax, &mut rng);
        let f = |x: &[f64]| p.eval(x);
        let outs: Vec<Vec<f64>> = (0..o.points).map(|_| random_unit_vector(n, &mut rng)).collect();
        let grid = apply_multiplier_grid(&rule, &rule.values(f), &MultiplierSpec::Cosine { alpha }, jmax, &outs)?;
        let direct = outs.iter().map(|u| cosine_transform(&f, u, alpha, o.budget)).collect::<Result<Vec<_>>>()?;
        let scale = direct.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in grid.iter().zip(&direct) {
            max_err = max_err.max((a - b).abs() / scale);
        }
    }
    Ok(report(
        "cosine_quadrature_vs_multiplier",
        json!({"n": n, "alpha": alpha, "J": jmax, "functions": o.functions, "points": o.points, "tolerance": tol}),
        json!({"direct": o.budget, "rule_resolution": jmax + 2}),
        o.seed,
        max_err,
        0.0,
        max_err <= tol,
    ))
}

/// Mf = R_i^* R_{n−i,⊥} f for every i in `is`: 3σ at each point and std err ≤ tol·‖f‖_∞.
pub fn factorization_suite(o: &SuiteOptions, is: &[usize]) -> Result<IdentityReport> {
    let tol = o.tol(1e-3);
    let n = o.n;
    let mut rng = rng_for(o.seed, 43);
    let sup_rule = product_quadrature(n, o.max_degree + 4)?;
    let res = o.max_degree / 2 + 1;
    let (mut max_err, mut max_rel_std): (f64, f64) = (0.0, 0.0);
    let mut within = true;
    for k in 0..o.functions {
        let p = RandomPolynomial::even(n, o.max_degree, &mut rng);
        let f = |x: &[f64]| p.eval(x);
        let sup = sup_rule.values(f).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let pts: Vec<Vec<f64>> = (0..o.points).map(|_| random_unit_vector(n, &mut rng)).collect();
        for &i in is {
            let r = verify_factorization(&f, i, &pts, o.samples, o.seed.wrapping_add(1000 * k as u64 + i as u64), res)?;
            within &= r.pass;
            max_err = max_err.max(r.max_err / sup);
            max_rel_std = max_rel_std.max(r.std_err / sup);
        }
    }
    Ok(report(
        "funk_factorization",
        json!({"n": n, "i": is, "J": o.max_degree, "functions": o.functions, "points": o.points,
               "within_3_sigma": within, "std_err_over_sup": max_rel_std, "tolerance": tol}),
        json!({"samples": o.samples, "sphere_res": res}),
        o.seed,
        max_err,
        max_rel_std,
        within && max_rel_std <= tol,
    ))
}

/// R_i M^α f = c R_{n−i,⊥}^{α+i−1} f on random frames.
pub fn intertwining_suite(o: &SuiteOptions, i: usize, alpha: f64) -> Result<IdentityReport> {
    let tol = o.tol(1e-8);
    let mut rng = rng_for(o.seed, 47);
    let mut max_err: f64 = 0.0;
    for _ in 0..o.functions {
        let p = RandomPolynomial::even(o.n, o.max_degree, &mut rng);
        let frames: Vec<_> = (0..o.points).map(|_| random_frame_with(o.n, i, &mut rng)).collect();
        let r = verify_intertwining(&|x: &[f64]| p.eval(x), &frames, alpha, o.budget, o.seed, tol)?;
        max_err = max_err.max(r.max_err);
    }
    Ok(report(
        "radon_cosine_intertwining",
        json!({"n": o.n, "i": i, "alpha": alpha, "J": o.max_degree, "functions": o.functions, "frames": o.points,
               "tolerance": tol}),
        json!(o.budget),
        o.seed,
        max_err,
        0.0,
        max_err <= tol,
    ))
}

/// Restriction identities for ξ ⊂ η ∈ G_{n,m}, dim ξ = k, on `functions`
/// random (f, η, ξ) triples per λ.
pub fn restriction_suite(o: &SuiteOptions, m: usize, k: usize, lambdas: &[f64]) -> Result<IdentityReport> {
    let tol = o.tol(1e-4);
    let n = o.n;
    let mut rng = rng_for(o.seed, 53);
    let mut max_err: f64 = 0.0;
    for &lam in lambdas {
        for _ in 0..o.functions {
            let p = RandomPolynomial::even(n, o.max_degree, &mut rng);
            let eta = random_frame_with(n, m, &mut rng);
            let xi = eta.lift(&random_frame_with(m, k, &mut rng));
            let (l, r) = restriction_sides(&|x: &[f64]| p.eval(x), &eta, &xi, lam, o.budget)?;
            max_err = max_err.max((l - r).abs() / l.abs().max(r.abs()).max(1e-300));
        }
    }
    Ok(report(
        "restriction",
        json!({"n": n, "m": m, "k": k, "lambda": lambdas, "J": o.max_degree, "pairs": o.functions, "tolerance": tol}),
        json!(o.budget),
        o.seed,
        max_err,
        0.0,
        max_err <= tol,
    ))
}

/// Largest |q̂₊q̂₋ − a_{α,β}| / |a_{α,β}| over j ≤ J.
pub fn bridge_factorization_error(alpha: f64, beta: f64, n: usize, max_degree: usize) -> Result<f64> {
    let (mu, nu) = (alpha - beta, 1.0 - beta);
    let mut e: f64 = 0.0;
    for j in 0..=max_degree {
        let a = bridge_multiplier(j, alpha, beta, n)?;
        let (p, q) = q_multipliers(j, mu, nu, n)?;
        e = e.max((p * q - a).abs() / a.abs().max(1e-300));
    }
    Ok(e)
}

/// A_{α,β} on random non-negative band-limited f: worst value of
/// −min(A f)/max f over a grid, plus the q̂₊q̂₋ factorization through degree 40.
pub fn positivity_suite(o: &SuiteOptions, alpha: f64, beta: f64) -> Result<IdentityReport> {
    let tol = o.tol(1e-8);
    let n = o.n;
    let nf = n as f64;
    let mut rng = rng_for(o.seed, 59);
    let rule = product_quadrature_even(n, o.max_degree + 2)?;
    let grid = product_quadrature_even(n, o.max_degree + 6)?;
    let outs: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.node(k).to_vec()).collect();
    let spec = MultiplierSpec::Bridge { alpha, beta };
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..o.functions {
        let p = RandomPolynomial::nonnegative(n, o.max_degree, &mut rng);
        let vals = rule.values(|x| p.eval(x));
        let fmax = grid.values(|x| p.eval(x)).into_iter().fold(0.0f64, f64::max);
        let af = apply_multiplier_grid(&rule, &vals, &spec, o.max_degree, &outs)?;
        let amin = af.into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.max(-amin / fmax);
    }
    let fact = bridge_factorization_error(alpha, beta, n, 40)?;
    let hypotheses = alpha > beta && beta > 1.0 - nf && alpha + beta < 2.0;
    let (mu, nu) = (alpha - beta, 1.0 - beta);
    let q_positive = 0.0 < mu && mu < nu && nu < nf;
    Ok(report(
        "bridge_positivity",
        json!({"n": n, "alpha": alpha, "beta": beta, "J": o.max_degree, "functions": o.functions,
               "a0": bridge_multiplier(0, alpha, beta, n)?, "q_factorization_error": fact,
               "stated_hypotheses": hypotheses, "q_factors_positive": q_positive, "tolerance": tol}),
        json!({"rule_resolution": o.max_degree + 2, "grid_resolution": o.max_degree + 6}),
        o.seed,
        worst.max(0.0),
        0.0,
        worst <= tol && fact <= 1e-12,
    ))
}

/// R_i^* R_i^α f = c₁^{−1} Q^{α+i−1} f at random points (3σ).
pub fn q_composition_suite(o: &SuiteOptions, i: usize, alpha: f64) -> Result<IdentityReport> {
    let mut rng = rng_for(o.seed, 61);
    let (mut max_err, mut std): (f64, f64) = (0.0, 0.0);
    let mut pass = true;
    for k in 0..o.functions {
        let p = RandomPolynomial::even(o.n, o.max_degree, &mut rng);
        for s in 0..o.points {
            let th = random_unit_vector(o.n, &mut rng);
            let seed = o.seed.wrapping_add(7919 * k as u64 + s as u64);
            let c = q_composition_point(&|x: &[f64]| p.eval(x), &th, i, alpha, o.budget, o.samples, seed)?;
            pass &= c.within(3.0);
            max_err = max_err.max((c.exact - c.estimate.mean).abs());
            std = std.max(c.estimate.std_err);
        }
    }
    Ok(report(
        "q_composition",
        json!({"n": o.n, "i": i, "alpha": alpha, "J": o.max_degree, "functions": o.functions, "points": o.points}),
        json!({"samples": o.samples, "direct": o.budget}),
        o.seed,
        max_err,
        std,
        pass,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_polynomials_are_nonnegative() {
        let mut rng = rng_for(1, 0);
        for _ in 0..20 {
            let p = RandomPolynomial::nonnegative(4, 8, &mut rng);
            let x = random_unit_vector(4, &mut rng);
            assert!(p.eval(&x) >= 0.0);
            let y: Vec<f64> = x.iter().map(|v| -v).collect();
            assert!((p.eval(&x) - p.eval(&y)).abs() < 1e-14);
        }
    }

    #[test]
    fn small_suites_pass() {
        let o = SuiteOptions { functions: 3, max_degree: 8, ..Default::default() };
        assert!(inversion_suite(&[4], &[0.5, -2.5], 20, 1e-12).unwrap().pass);
        assert!(funk_round_trip(&o).unwrap().pass);
        assert!(multiplier_agreement(&o, 0.5).unwrap().pass);
        assert!(restriction_suite(&SuiteOptions { functions: 2, ..o.clone() }, 3, 1, &[0.5, 1.0]).unwrap().pass);
        assert!(positivity_suite(&o, 0.5, -0.5).unwrap().pass);
    }
}
