use super::body::StarBody;
use super::frame::{dot, SubspaceFrame};
use super::quadrature::{embed_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::special::sphere_area;

/// vol_k(K ∩ ξ) = (σ_{k−1}/k) ∫_{S^{n−1}∩ξ} ρ_K^k, with `base` a rule on
/// S^{k−1} in frame coordinates.
pub fn section_volume(body: &StarBody, frame: &SubspaceFrame, base: &QuadratureRule) -> Result<f64> {
    let k = frame.k();
    if base.dim != k {
        return Err(Error::Invalid(format!("section rule has dimension {}, frame has {k}", base.dim)));
    }
    let rule = embed_rule(frame, base);
    let kf = k as i32;
    Ok(sphere_area(k) / k as f64 * rule.integrate(|x| body.radial(x).powi(kf)))
}

/// vol_n(K) = (σ_{n−1}/n) ∫ ρ_K^n dθ.
pub fn body_volume(body: &StarBody, rule: &QuadratureRule) -> f64 {
    let n = body.dim;
    sphere_area(n) / n as f64 * rule.integrate(|x| body.radial(x).powi(n as i32))
}

/// Slices of a convex body orthogonal to a direction u.
pub struct ParallelSections<'a> {
    body: &'a StarBody,
    u: Vec<f64>,
    /// Basis of u^⊥.
    perp: SubspaceFrame,
    /// Point of K maximizing x·u, and the width h_K(u) = x*·u.
    xstar: Vec<f64>,
    width: f64,
    rule: QuadratureRule,
}

/// Maximizer of ρ_K(θ) θ·u over the sphere, by a shrinking pattern search.
pub fn support_point(body: &StarBody, u: &[f64]) -> (Vec<f64>, f64) {
    let n = body.dim;
    let val = |th: &[f64]| body.radial(th) * dot(th, u);
    let mut best = u.to_vec();
    let mut bv = val(&best);
    let mut step = 0.25;
    while step > 1e-12 {
        let mut improved = false;
        for k in 0..n {
            for sgn in [-1.0, 1.0] {
                let mut c = best.clone();
                c[k] += sgn * step;
                let c = super::frame::normalize(&c);
                let v = val(&c);
                if v > bv {
                    bv = v;
                    best = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let r = body.radial(&best);
    (best.iter().map(|x| x * r).collect(), bv)
}

impl<'a> ParallelSections<'a> {
    /// `base` is a rule on S^{n−2} (directions inside u^⊥).
    pub fn new(body: &'a StarBody, u: &[f64], base: QuadratureRule) -> Result<Self> {
        let n = body.dim;
        if base.dim != n - 1 {
            return Err(Error::Invalid("slice rule must live on S^{n−2}".into()));
        }
        let u = super::frame::normalize(u);
        let perp = SubspaceFrame::from_vectors(n, &[u.clone()])?.complement();
        let (xstar, width) = support_point(body, &u);
        let rule = embed_rule(&perp, &base);
        Ok(ParallelSections { body, u, perp, xstar, width, rule })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn frame(&self) -> &SubspaceFrame {
        &self.perp
    }

    /// A_{K,u}(t) = vol_{n−1}(K ∩ {x·u = t}).
    pub fn at(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if t >= self.width {
            return Ok(0.0);
        }
        let n = self.body.dim;
        // an interior point of the slice on the segment [0, x*]
        let s = t / self.width;
        let c: Vec<f64> = self.xstar.iter().map(|x| x * s).collect();
        // projection onto the hyperplane x·u = t keeps c (it already lies there)
        debug_assert!((dot(&c, &self.u) - t).abs() < 1e-9);
        let mut acc = Vec::with_capacity(self.rule.len());
        for (w, wt) in self.rule.iter() {
            let r = ray_exit(self.body, &c, w)?;
            acc.push(wt * r.powi(n as i32 - 1));
        }
        Ok(sphere_area(n - 1) / (n - 1) as f64 * crate::special::quad::pairwise_sum(&acc))
    }
}

/// Largest r with ‖c + r w‖_K ≤ 1, for c inside K.
pub fn ray_exit(body: &StarBody, c: &[f64], w: &[f64]) -> Result<f64> {
    let g = |r: f64| {
        let x: Vec<f64> = c.iter().zip(w).map(|(a, b)| a + r * b).collect();
        body.norm(&x) - 1.0
    };
    let g0 = g(0.0);
    if g0 > 1e-12 {
        return Err(Error::BisectionFailure("slice centre lies outside the body".into()));
    }
    let mut lo = 0.0;
    let mut hi = 0.5;
    let mut prev = g0;
    loop {
        let v = g(hi);
        if v < prev - 1e-12 {
            return Err(Error::BisectionFailure("Minkowski functional decreases along a ray".into()));
        }
        if v > 0.0 {
            break;
        }
        prev = v;
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::BisectionFailure("ray does not leave the body".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = g(mid);
        if v.abs() <= 1e-14 {
            return Ok(mid);
        }
        if v > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One-shot form of [`ParallelSections::at`].
pub fn parallel_section_function(body: &StarBody, u: &[f64], t: f64, base: QuadratureRule) -> Result<f64> {
    ParallelSections::new(body, u, base)?.at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::frame::random_frame;
    use crate::sphere::quadrature::{orthant_quadrature, product_quadrature, sphere_rule_coords};
    use std::f64::consts::PI;

    #[test]
    fn ball_sections() {
        let b = StarBody::ball(5);
        let r2 = sphere_rule_coords(2, 4).unwrap();
        let r3 = sphere_rule_coords(3, 4).unwrap();
        for s in 0..100 {
            let f2 = random_frame(5, 2, s);
            let f3 = random_frame(5, 3, s + 1000);
            assert!((section_volume(&b, &f2, &r2).unwrap() - PI).abs() < 1e-10);
            assert!((section_volume(&b, &f3, &r3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cross_polytope() {
        let b = StarBody::lq_ball(3, 1.0).unwrap();
        let f = SubspaceFrame::coordinate(3, &[0, 1]);
        let r = orthant_quadrature(2, 16, false).unwrap();
        assert!((section_volume(&b, &f, &r).unwrap() - 2.0).abs() < 1e-12);
        let rule = orthant_quadrature(3, 24, false).unwrap();
        assert!((body_volume(&b, &rule) - 4.0 / 3.0).abs() < 1e-6);
        let rule = product_quadrature(3, 8).unwrap();
        assert!((body_volume(&StarBody::ball(3), &rule) - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn ball_slices() {
        let b = StarBody::ball(3);
        let ps = ParallelSections::new(&b, &[0.0, 0.0, 1.0], sphere_rule_coords(2, 8).unwrap()).unwrap();
        assert!((ps.at(0.0).unwrap() - PI).abs() < 1e-11);
        assert!((ps.at(0.6).unwrap() - 0.64 * PI).abs() < 1e-11);
        assert_eq!(ps.at(1.2).unwrap(), 0.0);
    }

    #[test]
    fn tilted_slices_use_interior_centre() {
        // a thin tilted ellipse: slices near the top miss the u-axis
        let m = [1.0, 0.9, 0.0, 0.3];
        let e = StarBody::ball(2).linear_image(&m).unwrap();
        let ps = ParallelSections::new(&e, &[0.0, 1.0], sphere_rule_coords(1, 2).unwrap()).unwrap();
        // points M(c, s) with 0.3 s = t: the chord has length 2√(1 − (t/0.3)²)
        for &t in &[0.0, 0.1, 0.25, 0.29] {
            let exact = 2.0 * (1.0 - (t / 0.3f64).powi(2)).sqrt();
            assert!((ps.at(t).unwrap() - exact).abs() < 1e-10, "t={t}");
        }
        assert!((ps.width() - 0.3).abs() < 1e-9);
    }
}
