use super::multiplier::MultiplierSpec;
use super::projection::check_degree;
use crate::error::Result;
use crate::special::{gegenbauer_at_one, harmonic_dimension};
use crate::sphere::QuadratureRule;

/// The function u ↦ Σ_{j ≤ J} m(j) p_j(u) for a sampled f, evaluable at
/// arbitrary directions.
#[derive(Debug, Clone)]
pub struct MultiplierField {
    n: usize,
    nodes: Vec<f64>,
    wf: Vec<f64>,
    // m(j) d_n(j)/C_j^λ(1) for even j
    scale: Vec<f64>,
    max_degree: usize,
}

impl MultiplierField {
    pub fn new(rule: &QuadratureRule, f: &[f64], m: &MultiplierSpec, max_degree: usize) -> Result<Self> {
        check_degree(rule, max_degree)?;
        let n = rule.dim;
        let table = m.table(n, max_degree)?;
        let lam = 0.5 * (n as f64 - 2.0);
        let scale = (0..=max_degree)
            .map(|j| if j % 2 == 0 { table[j] * harmonic_dimension(n, j) / gegenbauer_at_one(j, lam) } else { 0.0 })
            .collect();
        let mut nodes = Vec::new();
        let mut wf = Vec::new();
        for ((x, w), v) in rule.iter().zip(f) {
            if *v != 0.0 {
                nodes.extend_from_slice(x);
                wf.push(w * v);
            }
        }
        Ok(MultiplierField { n, nodes, wf, scale, max_degree })
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        let n = self.n;
        let lam = 0.5 * (n as f64 - 2.0);
        let mut acc = vec![0.0; self.max_degree / 2 + 1];
        for (x, &w) in self.nodes.chunks_exact(n).zip(&self.wf) {
            let t: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
            acc[0] += w;
            let (mut c0, mut c1) = (1.0, if lam == 0.0 { t } else { 2.0 * lam * t });
            for j in 2..=self.max_degree {
                let jf = j as f64;
                let c2 = if lam == 0.0 {
                    2.0 * t * c1 - c0
                } else {
                    (2.0 * (jf - 1.0 + lam) * t * c1 - (jf + 2.0 * lam - 2.0) * c0) / jf
                };
                if j % 2 == 0 {
                    acc[j / 2] += w * c2;
                }
                c0 = c1;
                c1 = c2;
            }
        }
        acc.iter().enumerate().map(|(k, a)| a * self.scale[2 * k]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::apply_multiplier_grid;
    use crate::sphere::{product_quadrature, random_unit_vector, rng_for};

    #[test]
    fn agrees_with_table() {
        let rule = product_quadrature(4, 10).unwrap();
        let f = rule.values(|x| x[0] * x[0] * x[1] * x[1] + x[3].powi(4));
        let m = MultiplierSpec::Cosine { alpha: -1.3 };
        let field = MultiplierField::new(&rule, &f, &m, 8).unwrap();
        let mut rng = rng_for(1, 2);
        let out: Vec<Vec<f64>> = (0..4).map(|_| random_unit_vector(4, &mut rng)).collect();
        let g = apply_multiplier_grid(&rule, &f, &m, 8, &out).unwrap();
        for (u, v) in out.iter().zip(&g) {
            assert!((field.eval(u) - v).abs() < 1e-12);
        }
    }
}
