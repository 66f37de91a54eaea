use super::lambda::{c_lambda_n, Branch, LambdaParam};
use crate::error::{Error, Result};
use crate::harmonic::{MultiplierField, MultiplierSpec};
use crate::special::sphere_area;
use crate::sphere::body::RadialFn;
use crate::sphere::{product_quadrature, product_quadrature_even, SubspaceFrame, StarBody, Symmetry};
use crate::transforms::{bispherical_mean, cosine_transform, raw_cosine_transform, Budget};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConstructOptions {
    /// Truncation degree of the multiplier route.
    pub max_degree: usize,
    /// Resolution of the sampling rule; J + 1 when absent.
    pub resolution: Option<usize>,
    /// Quadrature budget of the direct route.
    pub budget: Budget,
    /// Resolution of the grid on which positivity is checked.
    pub check_resolution: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { max_degree: 24, resolution: None, budget: Budget::default(), check_resolution: 8 }
    }
}

/// Wraps a function h(u) > 0 with ρ = h^{1/λ} into a body, after checking
/// positivity of h on a grid.
pub(crate) fn body_from_power(n: usize, name: &str, symmetry: Symmetry, lambda: f64, h: RadialFn, check: usize) -> Result<StarBody> {
    let grid = product_quadrature_even(n, check.max(2))?;
    for x in grid.nodes.chunks_exact(n) {
        let v = h(x);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Construction(format!(
                "right-hand side is {v:.3e} at {x:?}: no star body exists at λ = {lambda} for this L"
            )));
        }
    }
    let inv = 1.0 / lambda;
    Ok(StarBody::custom(n, name, symmetry, Arc::new(move |x: &[f64]| h(x).powf(inv))))
}

/// IB_λ(L): ρ_K^λ = s_λ^{−1}c_{λ,n}^{−1} M^{1−λ} ρ_L^{n−λ}, or
/// ρ_K^{−2ℓ} = M̃^{1+2ℓ} ρ_L^{n+2ℓ} on the raw branch. λ < 1 uses direct
/// quadrature, larger λ the truncated multiplier expansion.
pub fn construct_ib(l: &StarBody, lambda: f64, opts: &ConstructOptions) -> Result<StarBody> {
    let n = l.dim;
    if !(lambda < n as f64) {
        return Err(Error::Domain(format!("IB_λ needs λ < n (λ = {lambda}, n = {n})")));
    }
    let lp = LambdaParam::new(lambda, n)?;
    let pow = n as f64 - lambda;
    let lb = l.clone();
    let f = move |x: &[f64]| lb.radial(x).powf(pow);
    let budget = opts.budget;
    let h: RadialFn = match lp.branch {
        Branch::RawEvenNegative => {
            let a = 1.0 - lambda;
            Arc::new(move |u: &[f64]| raw_cosine_transform(&f, u, a, budget).unwrap_or(f64::NAN))
        }
        Branch::Normalized => {
            let c = 1.0 / (lp.s * c_lambda_n(lambda, n));
            if lambda < 1.0 {
                let a = 1.0 - lambda;
                Arc::new(move |u: &[f64]| c * cosine_transform(&f, u, a, budget).unwrap_or(f64::NAN))
            } else {
                let rule = product_quadrature_even(n, opts.resolution.unwrap_or(opts.max_degree + 1))?;
                let vals = rule.values(&f);
                let field = MultiplierField::new(&rule, &vals, &MultiplierSpec::Cosine { alpha: 1.0 - lambda }, opts.max_degree)?;
                Arc::new(move |u: &[f64]| c * field.eval(u))
            }
        }
    };
    body_from_power(n, "ib_lambda", l.symmetry.clone(), lambda, h, opts.check_resolution)
}

/// Radius of IB_λ of the unit ball: (s_λ^{−1}c_{λ,n}^{−1} m_{0,1−λ})^{1/λ}.
pub fn ib_ball_radius(n: usize, lambda: f64) -> Result<f64> {
    let lp = LambdaParam::new(lambda, n)?;
    let m0 = match lp.branch {
        Branch::Normalized => crate::harmonic::cosine_multiplier(0, 1.0 - lambda, n)? / (lp.s * c_lambda_n(lambda, n)),
        Branch::RawEvenNegative => crate::harmonic::raw_cosine_multiplier(0, 1.0 - lambda, n)?,
    };
    Ok(m0.powf(1.0 / lambda))
}

/// Constant of the section body: (m−λ)σ_{n−m}/(2(n−λ)), or π^{(m−n)/2}σ_{n−m}/2
/// on the raw branch.
pub fn section_constant(n: usize, m: usize, lambda: f64) -> Result<f64> {
    let lp = LambdaParam::new(lambda, n)?;
    let (nf, mf) = (n as f64, m as f64);
    Ok(match lp.branch {
        Branch::Normalized => (mf - lambda) * sphere_area(n - m + 1) / (2.0 * (nf - lambda)),
        Branch::RawEvenNegative => PI.powf(0.5 * (mf - nf)) * sphere_area(n - m + 1) / 2.0,
    })
}

/// The body L̃ in η (in frame coordinates) with K ∩ η = IB_λ(L̃) whenever
/// K = IB_λ(L):
/// ρ_L̃^{m−λ}(u) = c̃ ∫_{S^{n−1}∩(η^⊥⊕Ru)} ρ_L^{n−λ}(w)|u·w|^{m−λ−1} dw.
pub fn section_ib(l: &StarBody, eta: &SubspaceFrame, lambda: f64, budget: Budget) -> Result<StarBody> {
    let (n, m) = (l.dim, eta.k());
    if !(1 < m && m < n) {
        return Err(Error::Domain(format!("section needs 1 < m < n (m = {m}, n = {n})")));
    }
    if !(lambda < m as f64) {
        return Err(Error::Integrability(format!("section needs λ < m (λ = {lambda}, m = {m})")));
    }
    let c = section_constant(n, m, lambda)?;
    let perp = eta.complement();
    let frame = eta.clone();
    let lb = l.clone();
    let pow = n as f64 - lambda;
    let p = m as f64 - lambda - 1.0;
    let inv = 1.0 / (m as f64 - lambda);
    let f = move |x: &[f64]| lb.radial(x).powf(pow);
    let h = move |c_in: &[f64]| -> f64 {
        let u = frame.embed(c_in);
        let line = match SubspaceFrame::from_vectors(frame.dim, &[u]) {
            Ok(a) => a,
            Err(_) => return f64::NAN,
        };
        bispherical_mean(&f, &line, &perp, p, 0.0, budget).map(|v| (c * v).powf(inv)).unwrap_or(f64::NAN)
    };
    Ok(StarBody::custom(m, "section_ib", Symmetry::Generic, Arc::new(h)))
}

/// K ∩ η as a body in η, written in frame coordinates.
pub fn section_body(k: &StarBody, eta: &SubspaceFrame) -> StarBody {
    let frame = eta.clone();
    let kb = k.clone();
    StarBody::custom(eta.k(), "section", Symmetry::Generic, Arc::new(move |c: &[f64]| kb.radial(&frame.embed(c))))
}

/// vol_k(K ∩ ξ) compared with vol_{n−k}(L ∩ ξ^⊥) for a k-dimensional ξ.
pub fn section_volumes(k_body: &StarBody, l_body: &StarBody, xi: &SubspaceFrame, res: usize) -> Result<(f64, f64)> {
    let k = xi.k();
    let n = xi.dim;
    let a = crate::sphere::section_volume(k_body, xi, &product_quadrature(k, res)?)?;
    let b = crate::sphere::section_volume(l_body, &xi.complement(), &product_quadrature(n - k, res)?)?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{random_frame, random_unit_vector, rng_for};

    #[test]
    fn ball_radius_matches_j0() {
        for (n, lam) in [(3usize, 0.5), (3, 1.0), (4, 1.5), (4, -1.0), (4, -2.0)] {
            let k = construct_ib(&StarBody::ball(n), lam, &ConstructOptions { max_degree: 8, ..Default::default() })
                .unwrap();
            let r = ib_ball_radius(n, lam).unwrap();
            let mut rng = rng_for(1, 0);
            for _ in 0..5 {
                let u = random_unit_vector(n, &mut rng);
                assert!((k.radial(&u) - r).abs() < 1e-10 * r, "n={n} λ={lam}: {} vs {r}", k.radial(&u));
            }
        }
    }

    #[test]
    fn intersection_body_sections() {
        // λ = k = 1 in R^3: 2ρ_K(ξ) = vol₂(L ∩ ξ^⊥)
        let l = StarBody::ellipsoid(&[1.0, 1.3, 0.8]).unwrap();
        let k = construct_ib(&l, 1.0, &ConstructOptions::default()).unwrap();
        for s in 0..5 {
            let xi = random_frame(3, 1, s);
            let (a, b) = section_volumes(&k, &l, &xi, 40).unwrap();
            assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn negative_construction_is_refused() {
        // a polar spike: M^{1−λ} with 1−λ < 0 is not positivity preserving
        let l = StarBody::custom(3, "spike", Symmetry::Generic, Arc::new(|x: &[f64]| 1.0 + 3.0 * x[2].powi(10)));
        let r = construct_ib(&l, 2.5, &ConstructOptions { max_degree: 40, ..Default::default() });
        assert!(matches!(r, Err(Error::Construction(_))), "{r:?}");
    }

    #[test]
    fn section_of_ball() {
        // L̃ for the unit ball is a ball of radius (c̃ E[|u·w|^{m−λ−1}])^{1/(m−λ)}
        let (n, m, lam) = (4usize, 3usize, 1.5);
        let eta = random_frame(n, m, 3);
        let lt = section_ib(&StarBody::ball(n), &eta, lam, Budget::default()).unwrap();
        let p = m as f64 - lam - 1.0;
        // x ~ Beta(1/2, (n−m)/2): E x^{p/2}
        let g = crate::special::gamma::gamma;
        let ex = g(0.5 + 0.5 * p).unwrap() * g(0.5 * (n - m + 1) as f64).unwrap()
            / (g(0.5).unwrap() * g(0.5 * (n - m + 1) as f64 + 0.5 * p).unwrap());
        let r = (section_constant(n, m, lam).unwrap() * ex).powf(1.0 / (m as f64 - lam));
        let c = [0.6, 0.0, 0.8];
        assert!((lt.radial(&c) - r).abs() < 1e-12);
    }
}
