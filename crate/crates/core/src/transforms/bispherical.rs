use crate::error::{Error, Result};
use crate::special::gamma::beta;
use crate::special::quad::{gauss_beta, pairwise_sum};
use crate::sphere::{embed_rule, sphere_rule_coords, QuadratureRule, SubspaceFrame};
use rayon::prelude::*;

/// A function on the sphere, evaluable anywhere.
pub type SphereFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Discretization budget for direct quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    /// Resolution of the product rules on the sub-spheres.
    pub sphere_res: usize,
    /// Gauss–Jacobi nodes in the radial variable x = |Pr_A θ|².
    pub radial_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { sphere_res: 12, radial_nodes: 24 }
    }
}

fn sub_rule(frame: &SubspaceFrame, res: usize) -> Result<QuadratureRule> {
    let base = sphere_rule_coords(frame.k(), res)?;
    Ok(embed_rule(frame, &base))
}

/// Mean of f(θ)|Pr_A θ|^p |Pr_B θ|^r over the unit sphere of A ⊕ B (A ⊥ B).
///
/// Writes θ = √x u + √(1−x) v with u, v uniform on the unit spheres of A and
/// B; x then has the Beta(a/2, b/2) law, and the power weights are absorbed
/// into a Gauss–Jacobi rule in x.
pub fn bispherical_mean(f: SphereFn, a: &SubspaceFrame, b: &SubspaceFrame, p: f64, r: f64, budget: Budget) -> Result<f64> {
    let (ka, kb) = (a.k() as f64, b.k() as f64);
    let ea = 0.5 * (ka + p) - 1.0;
    let eb = 0.5 * (kb + r) - 1.0;
    if !(ea > -1.0) || !(eb > -1.0) {
        return Err(Error::Integrability(format!(
            "power weights |Pr θ|^{p}, |Pr θ|^{r} are not integrable on subspaces of dimensions {ka}, {kb}"
        )));
    }
    let rx = gauss_beta(budget.radial_nodes, ea, eb)?;
    let ru = sub_rule(a, budget.sphere_res)?;
    let rv = sub_rule(b, budget.sphere_res)?;
    let n = a.dim;
    let parts: Vec<f64> = rx
        .nodes
        .par_iter()
        .zip(rx.weights.par_iter())
        .map(|(&x, &wx)| {
            let (sx, sy) = (x.sqrt(), (1.0 - x).sqrt());
            let mut terms = Vec::with_capacity(ru.len() * rv.len());
            let mut th = vec![0.0; n];
            for (u, wu) in ru.iter() {
                for (v, wv) in rv.iter() {
                    for k in 0..n {
                        th[k] = sx * u[k] + sy * v[k];
                    }
                    terms.push(wu * wv * f(&th));
                }
            }
            wx * pairwise_sum(&terms)
        })
        .collect();
    Ok(pairwise_sum(&parts) / beta(0.5 * ka, 0.5 * kb)?)
}

/// Mean of f over the unit sphere of ξ.
pub fn subsphere_mean(f: SphereFn, frame: &SubspaceFrame, res: usize) -> Result<f64> {
    let rule = sub_rule(frame, res)?;
    let terms: Vec<f64> = rule.iter().map(|(x, w)| w * f(x)).collect();
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{even_moment, random_frame};

    #[test]
    fn moments_without_weights() {
        let n = 5;
        let a = random_frame(n, 2, 3);
        let b = a.complement();
        let f = |x: &[f64]| x[0].powi(4) * x[2] * x[2];
        let got = bispherical_mean(&f, &a, &b, 0.0, 0.0, Budget::default()).unwrap();
        assert!((got - even_moment(n, &[2, 0, 1])).abs() < 1e-14);
    }

    #[test]
    fn power_weight_beta_oracle() {
        // E|θ·u|^{p} = Γ(n/2)Γ((p+1)/2)/(√π Γ((n+p)/2))
        let n = 4;
        let a = SubspaceFrame::from_vectors(n, &[vec![0.5, 0.5, 0.5, 0.5]]).unwrap();
        let b = a.complement();
        let p = -0.6;
        let got = bispherical_mean(&|_| 1.0, &a, &b, p, 0.0, Budget::default()).unwrap();
        let g = crate::special::gamma::gamma;
        let want = g(2.0).unwrap() * g(0.5 * (p + 1.0)).unwrap() / (std::f64::consts::PI.sqrt() * g(0.5 * (n as f64 + p)).unwrap());
        assert!((got - want).abs() < 1e-13 * want);
        assert!(bispherical_mean(&|_| 1.0, &a, &b, -1.0, 0.0, Budget::default()).is_err());
    }
}
