use crate::error::{Error, Result};
use crate::special::gamma::beta;
use crate::special::gamma_ni_alpha;
use crate::special::quad::{gauss_beta, pairwise_sum};
use crate::sphere::{normalize, random_completion, rng_for, SubspaceFrame};
use rayon::prelude::*;

/// A function on a Grassmannian, evaluated on frames.
pub type GrassFn<'a> = &'a (dyn Fn(&SubspaceFrame) -> f64 + Sync);

const BLOCK: usize = 256;

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_values(v: &[f64]) -> McEstimate {
        let n = v.len();
        let mean = pairwise_sum(v) / n as f64;
        let dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        McEstimate { mean, std_err: (var / n as f64).sqrt(), samples: n }
    }

    pub fn scaled(self, c: f64) -> McEstimate {
        McEstimate { mean: c * self.mean, std_err: c.abs() * self.std_err, samples: self.samples }
    }
}

/// Draws `samples` values of `draw`, block b using the stream (seed, b);
/// independent of the thread count.
pub fn monte_carlo<F>(samples: usize, seed: u64, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    if samples < 2 {
        return Err(Error::Invalid("Monte-Carlo needs at least two samples".into()));
    }
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<Result<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            (0..count).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut all = Vec::with_capacity(samples);
    for p in parts {
        all.extend(p?);
    }
    Ok(McEstimate::from_values(&all))
}

/// (R_i^* φ)(θ): mean of φ over Haar-random i-planes containing θ.
pub fn dual_radon(phi: GrassFn, theta: &[f64], i: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    let n = theta.len();
    if i == 0 || i >= n {
        return Err(Error::Invalid(format!("dual Radon transform needs 1 ≤ i ≤ n−1 (i = {i})")));
    }
    let t = normalize(theta);
    monte_carlo(samples, seed, |rng| {
        let mut vs = vec![t.clone()];
        vs.extend(random_completion(&[t.clone()], i - 1, rng));
        Ok(phi(&SubspaceFrame { dim: n, basis: vs }))
    })
}

/// (R_i^* φ)(θ) with a balanced design: each Haar rotation supplies an
/// orthonormal frame e_1, …, e_{n−1} of θ^⊥, and the sample is the mean of φ
/// over the C(n−1, i−1) planes span(θ, e_S), |S| = i − 1. Every such plane is
/// Haar-distributed, so the estimate stays unbiased with iid samples.
pub fn dual_radon_balanced(phi: GrassFn, theta: &[f64], i: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    let n = theta.len();
    if i == 0 || i >= n {
        return Err(Error::Invalid(format!("dual Radon transform needs 1 ≤ i ≤ n−1 (i = {i})")));
    }
    let t = normalize(theta);
    let subsets = combinations(n - 1, i - 1);
    monte_carlo(samples, seed, |rng| {
        let e = random_completion(&[t.clone()], n - 1, rng);
        let mut acc = 0.0;
        for s in &subsets {
            let mut vs = vec![t.clone()];
            vs.extend(s.iter().map(|&k| e[k].clone()));
            acc += phi(&SubspaceFrame { dim: n, basis: vs });
        }
        Ok(acc / subsets.len() as f64)
    })
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..m {
            cur.push(j);
            go(j + 1, m, k, cur, out);
            cur.pop();
        }
    }
    go(0, m, k, &mut cur, &mut out);
    out
}

/// (R_i^{*α} φ)(θ) = γ_{n,i}(α) ∫ |Pr_{ξ⊥}θ|^{α+i−n} φ(ξ) dξ, α > 0.
///
/// x = |Pr_{ξ⊥}θ|² has the Beta((n−i)/2, i/2) law under Haar measure; the
/// x-integral uses Gauss–Jacobi nodes and the remaining rotation is sampled.
pub fn gen_dual_cosine(
    phi: GrassFn,
    theta: &[f64],
    i: usize,
    alpha: f64,
    radial_nodes: usize,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let n = theta.len();
    if i == 0 || i >= n {
        return Err(Error::Invalid(format!("need 1 ≤ i ≤ n−1 (i = {i})")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Integrability(format!("direct quadrature needs α > 0 (α = {alpha})")));
    }
    let g = gamma_ni_alpha(n, i, alpha)?;
    let (a, b) = (0.5 * (n - i) as f64, 0.5 * i as f64);
    let rx = gauss_beta(radial_nodes, 0.5 * alpha - 1.0, b - 1.0)?;
    let norm = beta(a, b)?;
    let t = normalize(theta);
    let est = monte_carlo(samples, seed, |rng| {
        let e = random_completion(&[t.clone()], i, rng);
        let mut acc = 0.0;
        for (&x, &w) in rx.nodes.iter().zip(&rx.weights) {
            let (sx, sy) = (x.sqrt(), (1.0 - x).sqrt());
            let first: Vec<f64> = t.iter().zip(&e[0]).map(|(p, q)| sy * p + sx * q).collect();
            let mut basis = vec![first];
            basis.extend(e[1..].iter().cloned());
            acc += w * phi(&SubspaceFrame { dim: n, basis });
        }
        Ok(acc / norm)
    })?;
    Ok(est.scaled(g.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::dot;

    #[test]
    fn constants() {
        let th = [0.0, 0.0, 1.0, 0.0];
        let e = dual_radon(&|_| 1.0, &th, 2, 100, 1).unwrap();
        assert!((e.mean - 1.0).abs() < 1e-15 && e.std_err < 1e-15);
        let alpha = 0.7;
        let g = gen_dual_cosine(&|_| 1.0, &th, 2, alpha, 16, 50, 1).unwrap();
        // Haar mean of |Pr_{ξ⊥}θ|^{α+i−n} times γ_{n,i}(α) equals m_{0,...}: check against R_i^α 1
        let direct = crate::transforms::gen_cosine(&|_| 1.0, &crate::sphere::random_frame(4, 2, 3), alpha, Default::default()).unwrap();
        assert!((g.mean - direct).abs() < 1e-12, "{} vs {direct}", g.mean);
    }

    #[test]
    fn closed_form_dual_of_projection_norm() {
        // φ(ξ) = |Pr_ξ a|² has R_i^*φ(θ) = (a·θ)² + (i−1)(|a|² − (a·θ)²)/(n−1)
        let n = 5;
        let a = [0.3, -1.0, 0.2, 0.5, 0.1];
        let th = normalize(&[1.0, 2.0, 0.0, -1.0, 0.5]);
        let phi = |xi: &SubspaceFrame| xi.coords(&a).iter().map(|c| c * c).sum::<f64>();
        let i = 3;
        let e = dual_radon(&phi, &th, i, 20000, 11).unwrap();
        let at = dot(&a, &th);
        let want = at * at + (i as f64 - 1.0) * (dot(&a, &a) - at * at) / (n as f64 - 1.0);
        assert!((e.mean - want).abs() < 4.0 * e.std_err, "{} ± {} vs {want}", e.mean, e.std_err);
    }

    #[test]
    fn balanced_design_is_exact_on_quadratics() {
        let n = 5;
        let a = [0.3, -1.0, 0.2, 0.5, 0.1];
        let th = normalize(&[1.0, 2.0, 0.0, -1.0, 0.5]);
        let phi = |xi: &SubspaceFrame| xi.coords(&a).iter().map(|c| c * c).sum::<f64>();
        let at = dot(&a, &th);
        for i in 1..n {
            let e = dual_radon_balanced(&phi, &th, i, 50, 2).unwrap();
            let want = at * at + (i as f64 - 1.0) * (dot(&a, &a) - at * at) / (n as f64 - 1.0);
            assert!((e.mean - want).abs() < 1e-13 && e.std_err < 1e-13, "i={i}: {e:?} vs {want}");
        }
        assert_eq!(combinations(4, 2).len(), 6);
    }
}
