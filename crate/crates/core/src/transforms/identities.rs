use super::bispherical::{subsphere_mean, Budget, SphereFn};
use super::direct::{cosine_transform, funk_transform, gen_cosine, q_alpha, radon_transform, restriction_operator};
use super::dual::{dual_radon, dual_radon_balanced, gen_dual_cosine, monte_carlo, McEstimate};
use crate::error::{Error, Result};
use crate::harmonic::{MultiplierField, MultiplierSpec};
use crate::special::gamma::gamma;
use crate::special::sphere_area;
use crate::sphere::{dot, random_completion, QuadratureRule, SubspaceFrame};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;

/// Outcome of a numerical identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub parameters: Value,
    pub budget: Value,
    pub seed: u64,
    pub max_err: f64,
    pub std_err: f64,
    pub pass: bool,
}

/// Per-point comparison of a deterministic side against a Monte-Carlo side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McComparison {
    pub exact: f64,
    pub estimate: McEstimate,
}

impl McComparison {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.exact - self.estimate.mean).abs() <= sigmas * self.estimate.std_err + 1e-12 * self.exact.abs().max(1.0)
    }
}

fn summarize(identity: &str, parameters: Value, budget: Value, seed: u64, cmp: &[McComparison]) -> IdentityReport {
    let max_err = cmp.iter().map(|c| (c.exact - c.estimate.mean).abs()).fold(0.0, f64::max);
    let std_err = cmp.iter().map(|c| c.estimate.std_err).fold(0.0, f64::max);
    IdentityReport {
        identity: identity.into(),
        parameters,
        budget,
        seed,
        max_err,
        std_err,
        pass: cmp.iter().all(|c| c.within(3.0)),
    }
}

/// Mf(u) against R_i^* R_{n−i,⊥} f(u) at each u.
pub fn factorization_points(
    f: SphereFn,
    i: usize,
    points: &[Vec<f64>],
    samples: usize,
    seed: u64,
    res: usize,
) -> Result<Vec<McComparison>> {
    points
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let exact = funk_transform(f, u, res)?;
            let phi = |xi: &SubspaceFrame| subsphere_mean(f, &xi.complement(), res).unwrap_or(f64::NAN);
            let estimate = dual_radon_balanced(&phi, u, i, samples, seed.wrapping_add(k as u64 * 7919))?;
            Ok(McComparison { exact, estimate })
        })
        .collect()
}

/// Checks Mf = R_i^* R_{n−i,⊥} f at the given directions (3σ rule).
pub fn verify_factorization(
    f: SphereFn,
    i: usize,
    points: &[Vec<f64>],
    samples: usize,
    seed: u64,
    res: usize,
) -> Result<IdentityReport> {
    let n = points.first().map(|p| p.len()).unwrap_or(0);
    let cmp = factorization_points(f, i, points, samples, seed, res)?;
    Ok(summarize(
        "funk_factorization",
        json!({"n": n, "i": i, "points": points.len()}),
        json!({"samples": samples, "sphere_res": res}),
        seed,
        &cmp,
    ))
}

/// c = 2π^{(i−1)/2}/σ_{i−1}.
pub fn intertwining_constant(i: usize) -> f64 {
    2.0 * PI.powf(0.5 * (i as f64 - 1.0)) / sphere_area(i)
}

/// (R_i M^α f)(ξ) and c·(R_{n−i,⊥}^{α+i−1} f)(ξ) on one frame.
pub fn intertwining_sides(f: SphereFn, xi: &SubspaceFrame, alpha: f64, budget: Budget) -> Result<(f64, f64)> {
    let i = xi.k();
    let inner = |u: &[f64]| cosine_transform(f, u, alpha, budget).unwrap_or(f64::NAN);
    let lhs = radon_transform(&inner, xi, budget.sphere_res)?;
    let rhs = intertwining_constant(i) * gen_cosine(f, &xi.complement(), alpha + i as f64 - 1.0, budget)?;
    Ok((lhs, rhs))
}

/// Maximum relative difference of the two sides of the intertwining identity over the frames.
pub fn verify_intertwining(
    f: SphereFn,
    frames: &[SubspaceFrame],
    alpha: f64,
    budget: Budget,
    seed: u64,
    tol: f64,
) -> Result<IdentityReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("intertwining check needs α ∈ (0,1) (α = {alpha})")));
    }
    let mut max_err: f64 = 0.0;
    for xi in frames {
        let (l, r) = intertwining_sides(f, xi, alpha, budget)?;
        max_err = max_err.max((l - r).abs() / l.abs().max(r.abs()).max(1e-300));
    }
    let (n, i) = frames.first().map(|x| (x.dim, x.k())).unwrap_or((0, 0));
    Ok(IdentityReport {
        identity: "radon_cosine_intertwining".into(),
        parameters: json!({"n": n, "i": i, "alpha": alpha, "frames": frames.len()}),
        budget: json!(budget),
        seed,
        max_err,
        std_err: 0.0,
        pass: max_err <= tol,
    })
}

/// φ(ξ) = c₀ + Σ c_k |Pr_ξ a_k|², a function on G_{n,i} whose dual Radon
/// transform is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGrassFn {
    pub c0: f64,
    pub terms: Vec<(f64, Vec<f64>)>,
}

impl QuadraticGrassFn {
    pub fn eval(&self, xi: &SubspaceFrame) -> f64 {
        self.c0 + self.terms.iter().map(|(c, a)| c * xi.coords(a).iter().map(|x| x * x).sum::<f64>()).sum::<f64>()
    }

    /// φ(η^⊥) for η ∈ G_{n,n−i}.
    pub fn eval_perp(&self, eta: &SubspaceFrame) -> f64 {
        self.eval(&eta.complement())
    }

    /// (R_i^* φ)(θ) = c₀ + Σ c_k [(a_k·θ)² + (i−1)(|a_k|² − (a_k·θ)²)/(n−1)].
    pub fn dual_radon_exact(&self, theta: &[f64], i: usize) -> f64 {
        let n = theta.len() as f64;
        self.c0
            + self
                .terms
                .iter()
                .map(|(c, a)| {
                    let t = dot(a, theta);
                    c * (t * t + (i as f64 - 1.0) * (dot(a, a) - t * t) / (n - 1.0))
                })
                .sum::<f64>()
    }
}

/// M^α R_i^*φ(θ) (deterministic, closed-form inner transform) against
/// c·R_{n−i}^{*α+i−1}φ^⊥(θ) (Monte Carlo).
pub fn dual_intertwining_point(
    phi: &QuadraticGrassFn,
    i: usize,
    theta: &[f64],
    alpha: f64,
    budget: Budget,
    samples: usize,
    seed: u64,
) -> Result<McComparison> {
    let inner = |u: &[f64]| phi.dual_radon_exact(u, i);
    let exact = cosine_transform(&inner, theta, alpha, budget)?;
    let n = theta.len();
    let perp = |eta: &SubspaceFrame| phi.eval_perp(eta);
    let est = gen_dual_cosine(&perp, theta, n - i, alpha + i as f64 - 1.0, budget.radial_nodes, samples, seed)?;
    Ok(McComparison { exact, estimate: est.scaled(intertwining_constant(i)) })
}

/// c₁ = Γ((n−i)/2)/Γ((n−1)/2).
pub fn right_inverse_c1(n: usize, i: usize) -> f64 {
    gamma(0.5 * (n - i) as f64).unwrap() / gamma(0.5 * (n as f64 - 1.0)).unwrap()
}

/// c₂ = σ_{n−2}/(2π^{n/2−1}).
pub fn right_inverse_c2(n: usize) -> f64 {
    sphere_area(n - 1) / (2.0 * PI.powf(0.5 * n as f64 - 1.0))
}

/// A f = c₂ R_{n−i,⊥} M^{2−n} f as a function on G_{n,i}.
pub struct RightInverse {
    field: MultiplierField,
    c2: f64,
    res: usize,
}

impl RightInverse {
    pub fn new(rule: &QuadratureRule, f: &[f64], max_degree: usize, res: usize) -> Result<Self> {
        let n = rule.dim;
        let field = MultiplierField::new(rule, f, &MultiplierSpec::Cosine { alpha: 2.0 - n as f64 }, max_degree)?;
        Ok(RightInverse { field, c2: right_inverse_c2(n), res })
    }

    pub fn eval(&self, xi: &SubspaceFrame) -> f64 {
        let g = |u: &[f64]| self.field.eval(u);
        self.c2 * subsphere_mean(&g, &xi.complement(), self.res).unwrap_or(f64::NAN)
    }
}

/// Certifies f = R_i^* A f at the given points by Monte Carlo.
pub fn right_inverse_dual_radon(
    rule: &QuadratureRule,
    f: &[f64],
    f_exact: SphereFn,
    i: usize,
    max_degree: usize,
    points: &[Vec<f64>],
    samples: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let n = rule.dim;
    let a = RightInverse::new(rule, f, max_degree, max_degree + 2)?;
    let phi = |xi: &SubspaceFrame| a.eval(xi);
    let mut cmp = Vec::new();
    for (k, u) in points.iter().enumerate() {
        let estimate = dual_radon(&phi, u, i, samples, seed.wrapping_add(k as u64 * 104729))?;
        cmp.push(McComparison { exact: f_exact(u), estimate });
    }
    Ok(summarize(
        "dual_radon_right_inverse",
        json!({"n": n, "i": i, "J": max_degree, "points": points.len()}),
        json!({"samples": samples, "rule_nodes": rule.len()}),
        seed,
        &cmp,
    ))
}

/// R_i^* R_i^α f(θ) (Monte Carlo) against c₁^{−1} Q^{α+i−1} f(θ).
pub fn q_composition_point(
    f: SphereFn,
    theta: &[f64],
    i: usize,
    alpha: f64,
    budget: Budget,
    samples: usize,
    seed: u64,
) -> Result<McComparison> {
    let n = theta.len();
    let exact = q_alpha(f, theta, alpha + i as f64 - 1.0, budget)? / right_inverse_c1(n, i);
    let t = crate::sphere::normalize(theta);
    let estimate = monte_carlo(samples, seed, |rng| {
        let mut vs = vec![t.clone()];
        vs.extend(random_completion(&[t.clone()], i - 1, rng));
        gen_cosine(f, &SubspaceFrame { dim: n, basis: vs }, alpha, budget)
    })?;
    Ok(McComparison { exact, estimate })
}

/// Sides of the restriction identities for ξ ⊂ η, dim ξ = k:
/// (R_{n−k}^{k−λ} f)(ξ^⊥) and (R_{m−k}^{k−λ} T_η^λ f)(ξ^⊥ ∩ η) when λ < k, and
/// (R_{n−k} f)(ξ^⊥) and c·(R_{m−k} T_η^k f)(ξ^⊥ ∩ η) when λ = k.
pub fn restriction_sides(
    f: SphereFn,
    eta: &SubspaceFrame,
    xi: &SubspaceFrame,
    lambda: f64,
    budget: Budget,
) -> Result<(f64, f64)> {
    let (n, m, k) = (eta.dim, eta.k(), xi.k());
    if k >= m || m >= n {
        return Err(Error::Invalid("restriction identities need k < m < n".into()));
    }
    let xi_perp = xi.complement();
    let inner = xi_perp.intersect(eta)?;
    // work inside η in its own coordinates
    let t = |c: &[f64]| restriction_operator(f, eta, &eta.embed(c), lambda, budget).unwrap_or(f64::NAN);
    let sub = eta.restrict(&inner);
    let kf = k as f64;
    if (lambda - kf).abs() < 1e-12 {
        let lhs = radon_transform(f, &xi_perp, budget.sphere_res)?;
        let c = PI.powf(0.5 * (n - m) as f64) * sphere_area(m - k) / sphere_area(n - k);
        let rhs = c * radon_transform(&t, &sub, budget.sphere_res)?;
        Ok((lhs, rhs))
    } else if lambda < kf {
        let lhs = gen_cosine(f, &xi_perp, kf - lambda, budget)?;
        let rhs = gen_cosine(&t, &sub, kf - lambda, budget)?;
        Ok((lhs, rhs))
    } else {
        Err(Error::Integrability(format!("restriction identity needs λ ≤ k (λ = {lambda}, k = {k})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{normalize, product_quadrature, random_frame, random_unit_vector, rng_for};

    fn smooth(x: &[f64]) -> f64 {
        1.0 + x[0] * x[0] * x[1] * x[1] + 0.3 * x[2].powi(4) - 0.2 * x[0] * x[3]
    }

    #[test]
    fn factorization_n4() {
        let mut rng = rng_for(21, 0);
        let pts: Vec<Vec<f64>> = (0..3).map(|_| random_unit_vector(4, &mut rng)).collect();
        for i in 1..4 {
            let r = verify_factorization(&smooth, i, &pts, 4000, 5, 10).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn intertwining_n4() {
        let frames: Vec<SubspaceFrame> = (0..3).map(|s| random_frame(4, 2, s)).collect();
        let r = verify_intertwining(&smooth, &frames, 0.4, Budget::default(), 0, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        let ones = verify_intertwining(&|_| 1.0, &frames, 0.4, Budget::default(), 0, 1e-10).unwrap();
        assert!(ones.pass);
    }

    #[test]
    fn dual_intertwining() {
        let phi = QuadraticGrassFn { c0: 0.5, terms: vec![(1.0, vec![1.0, 0.0, 0.5, 0.0]), (0.4, vec![0.0, 1.0, 0.0, -1.0])] };
        let th = normalize(&[0.2, 0.4, -0.3, 0.8]);
        let c = dual_intertwining_point(&phi, 2, &th, 0.6, Budget::default(), 4000, 3).unwrap();
        assert!(c.within(3.0), "{c:?}");
    }

    #[test]
    fn right_inverse() {
        let n = 4;
        let rule = product_quadrature(n, 8).unwrap();
        let f = rule.values(smooth);
        let pts = vec![normalize(&[0.1, 0.7, -0.3, 0.2])];
        let r = right_inverse_dual_radon(&rule, &f, &smooth, 2, 6, &pts, 2000, 9).unwrap();
        assert!(r.pass, "{r:?}");
        // the two expressions for A coincide at i = 1, where R_1^0 = c_1 R_1
        let a = RightInverse::new(&rule, &f, 6, 8).unwrap();
        let xi = random_frame(n, 1, 2);
        let one = right_inverse_c1(n, 1) * crate::special::radon_limit_constant(1) * radon_transform(&smooth, &xi, 8).unwrap();
        assert!((a.eval(&xi) - one).abs() < 1e-10 * one.abs(), "{} vs {one}", a.eval(&xi));
    }

    #[test]
    fn q_composition() {
        let th = normalize(&[0.3, 0.1, -0.5, 0.6]);
        let c = q_composition_point(&smooth, &th, 2, 0.5, Budget { sphere_res: 8, radial_nodes: 12 }, 1000, 4).unwrap();
        assert!(c.within(3.0), "{c:?}");
    }

    #[test]
    fn restriction_identities() {
        let eta = random_frame(4, 3, 17);
        for lam in [0.25, 0.5, 1.0] {
            for s in 0..2 {
                let c = random_frame(3, 1, 100 + s);
                let xi = eta.lift(&c);
                let (l, r) = restriction_sides(&smooth, &eta, &xi, lam, Budget::default()).unwrap();
                assert!((l - r).abs() < 1e-10 * l.abs(), "λ={lam}: {l} vs {r}");
            }
        }
    }
}
