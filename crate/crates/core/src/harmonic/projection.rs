use super::multiplier::MultiplierSpec;
use crate::error::{Error, Result};
use crate::special::{gegenbauer_at_one, harmonic_dimension};
use crate::sphere::QuadratureRule;
use rayon::prelude::*;

const CHUNK: usize = 1024;
const CHUNKS_PER_BATCH: usize = 32;

/// Even-degree projections p_j(u) = d_n(j) ∫ f(θ) C̃_j(θ·u) dθ of one or more
/// sampled functions, at a list of output directions.
#[derive(Debug, Clone)]
pub struct ProjectionTable {
    pub n: usize,
    pub max_degree: usize,
    pub outputs: Vec<Vec<f64>>,
    fields: usize,
    // [field][j/2][output]
    data: Vec<f64>,
}

/// Checks that projections to degree J are resolved by the rule.
pub fn check_degree(rule: &QuadratureRule, max_degree: usize) -> Result<()> {
    if 2 * max_degree > rule.degree {
        return Err(Error::DegreeOverflow { requested: max_degree, available: rule.degree / 2 });
    }
    Ok(())
}

impl ProjectionTable {
    /// Projects every field (values at the rule's nodes) onto even degrees ≤ J.
    /// The reduction order is fixed, so results do not depend on the thread count.
    pub fn compute(
        rule: &QuadratureRule,
        fields: &[&[f64]],
        max_degree: usize,
        outputs: &[Vec<f64>],
    ) -> Result<ProjectionTable> {
        check_degree(rule, max_degree)?;
        let n = rule.dim;
        for f in fields {
            if f.len() != rule.len() {
                return Err(Error::Invalid("field length differs from the rule size".into()));
            }
        }
        if outputs.iter().any(|u| u.len() != n) {
            return Err(Error::Invalid("output direction of the wrong dimension".into()));
        }
        let nu = outputs.len();
        let nf = fields.len();
        let nj = max_degree / 2 + 1;
        // transposed outputs: [k][u]
        let mut ot = vec![0.0; n * nu];
        for (u, o) in outputs.iter().enumerate() {
            for k in 0..n {
                ot[k * nu + u] = o[k];
            }
        }
        let lam = 0.5 * (n as f64 - 2.0);
        let size = nf * nj * nu;
        let mut total = vec![0.0; size];
        let nchunks = rule.len().div_ceil(CHUNK);
        let mut start = 0;
        while start < nchunks {
            let stop = (start + CHUNKS_PER_BATCH).min(nchunks);
            let parts: Vec<Vec<f64>> = (start..stop)
                .into_par_iter()
                .map(|c| {
                    let lo = c * CHUNK;
                    let hi = (lo + CHUNK).min(rule.len());
                    chunk_accumulate(rule, fields, &ot, nu, nj, max_degree, lam, lo, hi)
                })
                .collect();
            for p in parts {
                for (a, b) in total.iter_mut().zip(&p) {
                    *a += b;
                }
            }
            start = stop;
        }
        for jj in 0..nj {
            let j = 2 * jj;
            let s = harmonic_dimension(n, j) / gegenbauer_at_one(j, lam);
            for f in 0..nf {
                let off = (f * nj + jj) * nu;
                total[off..off + nu].iter_mut().for_each(|x| *x *= s);
            }
        }
        Ok(ProjectionTable { n, max_degree, outputs: outputs.to_vec(), fields: nf, data: total })
    }

    pub fn fields(&self) -> usize {
        self.fields
    }

    /// p_j at output u for field f (0 for odd j).
    pub fn get(&self, field: usize, j: usize, u: usize) -> f64 {
        if j % 2 == 1 || j > self.max_degree {
            return 0.0;
        }
        let nu = self.outputs.len();
        let nj = self.max_degree / 2 + 1;
        self.data[(field * nj + j / 2) * nu + u]
    }

    /// Σ_j m(j) p_j(u) for a multiplier table indexed by degree.
    pub fn apply_table(&self, field: usize, m: &[f64]) -> Vec<f64> {
        let nu = self.outputs.len();
        let mut out = vec![0.0; nu];
        for j in (0..=self.max_degree).step_by(2) {
            let mj = m[j];
            if mj == 0.0 {
                continue;
            }
            for (u, o) in out.iter_mut().enumerate() {
                *o += mj * self.get(field, j, u);
            }
        }
        out
    }

    pub fn apply(&self, field: usize, m: &MultiplierSpec) -> Result<Vec<f64>> {
        let t = m.table(self.n, self.max_degree)?;
        Ok(self.apply_table(field, &t))
    }

    /// max_u |m(j) p_j(u)| for each even j, used for tail estimates.
    pub fn degree_maxima(&self, field: usize, m: &[f64]) -> Vec<(usize, f64)> {
        (0..=self.max_degree)
            .step_by(2)
            .map(|j| {
                let v = (0..self.outputs.len()).map(|u| (m[j] * self.get(field, j, u)).abs()).fold(0.0, f64::max);
                (j, v)
            })
            .collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn chunk_accumulate(
    rule: &QuadratureRule,
    fields: &[&[f64]],
    ot: &[f64],
    nu: usize,
    nj: usize,
    jmax: usize,
    lam: f64,
    lo: usize,
    hi: usize,
) -> Vec<f64> {
    let n = rule.dim;
    let nf = fields.len();
    let mut acc = vec![0.0; nf * nj * nu];
    let mut t = vec![0.0; nu];
    let mut c0 = vec![0.0; nu];
    let mut c1 = vec![0.0; nu];
    let mut c2 = vec![0.0; nu];
    let mut wf = vec![0.0; nf];
    // recurrence coefficients C_j = α_j t C_{j−1} − β_j C_{j−2}
    let coef: Vec<(f64, f64)> = (0..=jmax)
        .map(|j| {
            if j < 2 {
                return (0.0, 0.0);
            }
            if lam == 0.0 {
                return (2.0, 1.0);
            }
            let jf = j as f64;
            (2.0 * (jf - 1.0 + lam) / jf, (jf + 2.0 * lam - 2.0) / jf)
        })
        .collect();
    let c1scale = if lam == 0.0 { 1.0 } else { 2.0 * lam };
    for i in lo..hi {
        let x = rule.node(i);
        let w = rule.weights[i];
        let mut any = false;
        for f in 0..nf {
            wf[f] = w * fields[f][i];
            any |= wf[f] != 0.0;
        }
        if !any {
            continue;
        }
        t.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..n {
            let xk = x[k];
            if xk == 0.0 {
                continue;
            }
            let row = &ot[k * nu..(k + 1) * nu];
            for (tv, o) in t.iter_mut().zip(row) {
                *tv += xk * o;
            }
        }
        for f in 0..nf {
            let a = &mut acc[(f * nj) * nu..(f * nj + 1) * nu];
            a.iter_mut().for_each(|v| *v += wf[f]);
        }
        if jmax < 2 {
            continue;
        }
        c0.iter_mut().for_each(|v| *v = 1.0);
        for (c, tv) in c1.iter_mut().zip(&t) {
            *c = c1scale * tv;
        }
        for j in 2..=jmax {
            let (al, be) = coef[j];
            for u in 0..nu {
                c2[u] = al * t[u] * c1[u] - be * c0[u];
            }
            if j % 2 == 0 {
                for f in 0..nf {
                    let off = (f * nj + j / 2) * nu;
                    let a = &mut acc[off..off + nu];
                    let s = wf[f];
                    for (av, cv) in a.iter_mut().zip(&c2) {
                        *av += s * cv;
                    }
                }
            }
            std::mem::swap(&mut c0, &mut c1);
            std::mem::swap(&mut c1, &mut c2);
        }
    }
    acc
}

/// Values of the multiplier operator m applied to f (sampled at the rule's
/// nodes), truncated at degree J, at the output directions.
pub fn apply_multiplier_grid(
    rule: &QuadratureRule,
    f: &[f64],
    m: &MultiplierSpec,
    max_degree: usize,
    outputs: &[Vec<f64>],
) -> Result<Vec<f64>> {
    m.validate()?;
    let table = ProjectionTable::compute(rule, &[f], max_degree, outputs)?;
    table.apply(0, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::zonal::ZonalExpansion;
    use crate::sphere::{product_quadrature, product_quadrature_even, random_unit_vector, rng_for};

    fn outputs(n: usize, k: usize) -> Vec<Vec<f64>> {
        let mut rng = rng_for(5, 0);
        (0..k).map(|_| random_unit_vector(n, &mut rng)).collect()
    }

    #[test]
    fn constants_and_overflow() {
        let rule = product_quadrature(4, 12).unwrap();
        let ones = vec![1.0; rule.len()];
        let out = outputs(4, 7);
        let v = apply_multiplier_grid(&rule, &ones, &MultiplierSpec::Cosine { alpha: 0.3 }, 10, &out).unwrap();
        let m0 = crate::harmonic::cosine_multiplier(0, 0.3, 4).unwrap();
        assert!(v.iter().all(|x| (x - m0).abs() < 1e-13));
        assert!(matches!(
            apply_multiplier_grid(&rule, &ones, &MultiplierSpec::Funk, 14, &out),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn zonal_consistency() {
        for n in [2usize, 3, 4, 5] {
            let axis = crate::sphere::normalize(&(0..n).map(|k| 1.0 + k as f64).collect::<Vec<_>>());
            let coeffs: Vec<f64> = (0..=12).map(|j| if j % 2 == 0 { 1.0 / (1.0 + j as f64 * j as f64) } else { 0.0 }).collect();
            let e = ZonalExpansion::new(n, coeffs);
            for rule in [product_quadrature(n, 14).unwrap(), product_quadrature_even(n, 14).unwrap()] {
                let f = rule.values(|x| e.evaluate(crate::sphere::dot(x, &axis)));
                let out = outputs(n, 9);
                let m = MultiplierSpec::Cosine { alpha: -0.7 };
                let got = apply_multiplier_grid(&rule, &f, &m, 12, &out).unwrap();
                let z = e.apply(&m).unwrap();
                for (u, g) in out.iter().zip(&got) {
                    let want = z.evaluate(crate::sphere::dot(u, &axis));
                    assert!((g - want).abs() < 1e-9, "n={n}: {g} vs {want}");
                }
            }
        }
    }
}
