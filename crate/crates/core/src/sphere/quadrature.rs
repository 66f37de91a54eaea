use super::frame::SubspaceFrame;
use crate::error::{Error, Result};
use crate::special::quad::{gauss_jacobi, gauss_legendre, pairwise_sum};
use std::f64::consts::PI;
use std::io::Write;

/// How the nodes of a rule were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// Gauss–Gegenbauer in the polar cosine at every level: exact on
    /// polynomials up to the declared degree.
    Product,
    /// Gauss–Legendre panels in the angles, split at every coordinate
    /// hyperplane: spectrally accurate for functions smooth inside orthants.
    Orthant,
    /// Nodes of a sub-sphere rule embedded into R^n.
    Embedded,
}

/// Probability quadrature on S^{dim−1}.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub dim: usize,
    /// Row-major node coordinates, `dim` per node.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Polynomial degree the rule resolves.
    pub degree: usize,
    /// True when only one node of each antipodal pair is kept (weights
    /// doubled); such a rule integrates even functions only.
    pub even_only: bool,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn values<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        use rayon::prelude::*;
        self.nodes.par_chunks_exact(self.dim).map(|x| f(x)).collect()
    }

    pub fn integrate_values(&self, v: &[f64]) -> f64 {
        let p: Vec<f64> = v.iter().zip(&self.weights).map(|(a, w)| a * w).collect();
        pairwise_sum(&p)
    }

    pub fn integrate<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> f64 {
        self.integrate_values(&self.values(f))
    }

    /// Writes the grid as CSV: node coordinates, weight, value.
    pub fn write_grid_csv<W: Write>(&self, values: &[f64], mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|k| format!("x{k}")).collect();
        writeln!(out, "{},weight,value", header.join(","))?;
        for (i, (x, w)) in self.iter().enumerate() {
            let coords: Vec<String> = x.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{},{:.17e},{:.17e}", coords.join(","), w, values[i])?;
        }
        Ok(())
    }
}

// Nodes of a rule on S^{k−1} as flat coordinates plus weights.
struct Raw {
    k: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn circle(r: usize, fold: bool, orthant: bool) -> Raw {
    let mut angles = Vec::new();
    let mut weights = Vec::new();
    if orthant {
        let quarters = if fold { 2 } else { 4 };
        let g = gauss_legendre(r, 0.0, 0.5 * PI);
        for q in 0..quarters {
            for (a, w) in g.nodes.iter().zip(&g.weights) {
                angles.push(a + 0.5 * PI * q as f64);
                weights.push(w / (quarters as f64 * 0.5 * PI));
            }
        }
    } else {
        let m = if fold { r } else { 2 * r };
        for k in 0..m {
            angles.push(PI * (k as f64 + 0.5) / r as f64);
            weights.push(1.0 / m as f64);
        }
    }
    let nodes = angles.iter().flat_map(|a| [a.cos(), a.sin()]).collect();
    Raw { k: 2, nodes, weights }
}

fn build(k: usize, r: usize, fold: bool, orthant: bool) -> Result<Raw> {
    match k {
        0 => Err(Error::Invalid("sphere rule needs dimension ≥ 1".into())),
        1 => Ok(if fold {
            Raw { k: 1, nodes: vec![1.0], weights: vec![1.0] }
        } else {
            Raw { k: 1, nodes: vec![1.0, -1.0], weights: vec![0.5, 0.5] }
        }),
        2 => Ok(circle(r, fold, orthant)),
        _ => {
            let sub = build(k - 1, r, fold, orthant)?;
            let a = 0.5 * (k as f64 - 3.0);
            // polar cosine s and radius √(1−s²) with the weight (1−s²)^{(k−3)/2}
            let (ss, rr, ws): (Vec<f64>, Vec<f64>, Vec<f64>) = if orthant {
                let g = gauss_legendre(r, 0.0, 0.5 * PI);
                let mut s = Vec::new();
                let mut rad = Vec::new();
                let mut w = Vec::new();
                for half in 0..2 {
                    for (p, wp) in g.nodes.iter().zip(&g.weights) {
                        let psi = p + 0.5 * PI * half as f64;
                        s.push(psi.cos());
                        rad.push(psi.sin());
                        w.push(wp * psi.sin().powi(k as i32 - 2));
                    }
                }
                let tot: f64 = w.iter().sum();
                (s, rad, w.iter().map(|x| x / tot).collect())
            } else {
                let g = gauss_jacobi(r, a, a)?;
                let tot: f64 = g.weights.iter().sum();
                let rad = g.nodes.iter().map(|s| (1.0 - s * s).sqrt()).collect();
                (g.nodes.clone(), rad, g.weights.iter().map(|w| w / tot).collect())
            };
            let mut nodes = Vec::with_capacity(ss.len() * sub.weights.len() * k);
            let mut weights = Vec::with_capacity(ss.len() * sub.weights.len());
            for ((s, rad), w) in ss.iter().zip(&rr).zip(&ws) {
                for (x, wx) in sub.nodes.chunks_exact(k - 1).zip(&sub.weights) {
                    nodes.extend(x.iter().map(|c| c * rad));
                    nodes.push(*s);
                    weights.push(w * wx);
                }
            }
            Ok(Raw { k, nodes, weights })
        }
    }
}

fn finish(raw: Raw, degree: usize, even_only: bool, kind: RuleKind) -> QuadratureRule {
    QuadratureRule { dim: raw.k, nodes: raw.nodes, weights: raw.weights, degree, even_only, kind }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::Invalid(format!("quadrature resolution must be ≥ 2 (got {resolution})")));
    }
    Ok(())
}

/// Product rule on S^{n−1}: Gauss–Gegenbauer in each polar cosine and 2r
/// offset angles on the circle; exact through degree 2r − 1.
pub fn product_quadrature(n: usize, resolution: usize) -> Result<QuadratureRule> {
    check_resolution(resolution)?;
    Ok(finish(build(n, resolution, false, false)?, 2 * resolution - 1, false, RuleKind::Product))
}

/// The product rule restricted to one node per antipodal pair.
pub fn product_quadrature_even(n: usize, resolution: usize) -> Result<QuadratureRule> {
    check_resolution(resolution)?;
    Ok(finish(build(n, resolution, true, false)?, 2 * resolution - 1, true, RuleKind::Product))
}

/// Panelled angular rule whose panel edges lie on the coordinate
/// hyperplanes. It resolves polynomials through degree 4·resolution − 48 (to
/// 1e−12 absolute, measured for n ≤ 5) and converges spectrally for functions
/// that are smooth inside each orthant (such as ℓ_q norms).
pub fn orthant_quadrature(n: usize, resolution: usize, even_only: bool) -> Result<QuadratureRule> {
    check_resolution(resolution)?;
    Ok(finish(build(n, resolution, even_only, true)?, (4 * resolution).saturating_sub(48), even_only, RuleKind::Orthant))
}

/// Rule on S^{k−1} written in R^k coordinates (k = 1 gives the two points ±1).
pub fn sphere_rule_coords(k: usize, resolution: usize) -> Result<QuadratureRule> {
    product_quadrature(k, resolution.max(2))
}

/// Probability rule on S^{n−1} ∩ ξ embedded in R^n through the frame.
pub fn subsphere_quadrature(frame: &SubspaceFrame, resolution: usize) -> Result<QuadratureRule> {
    let base = sphere_rule_coords(frame.k(), resolution)?;
    Ok(embed_rule(frame, &base))
}

/// Embeds a rule on S^{k−1} into R^n through a frame.
pub fn embed_rule(frame: &SubspaceFrame, base: &QuadratureRule) -> QuadratureRule {
    let mut nodes = Vec::with_capacity(base.len() * frame.dim);
    for (x, _) in base.iter() {
        nodes.extend(frame.embed(x));
    }
    QuadratureRule {
        dim: frame.dim,
        nodes,
        weights: base.weights.clone(),
        degree: base.degree,
        even_only: base.even_only,
        kind: RuleKind::Embedded,
    }
}

/// Probability rule on S^{n−1} ∩ ξ whose polar axis is the projection of
/// `axis` onto ξ: Gauss–Jacobi nodes in τ = θ·a (weight (1−τ²)^{(k−3)/2})
/// times a product rule on the orthogonal S^{k−2}. Functions of θ·axis alone
/// are integrated exactly up to degree 2·polar_nodes − 1.
pub fn axial_quadrature(
    frame: &SubspaceFrame,
    axis: &[f64],
    polar_nodes: usize,
    resolution: usize,
) -> Result<QuadratureRule> {
    let k = frame.k();
    if k < 2 {
        return subsphere_quadrature(frame, resolution);
    }
    let p = frame.project(axis);
    let first = if super::frame::norm(&p) > 1e-12 { p } else { frame.basis[0].clone() };
    // Gram–Schmidt with the axis first, dropping the dependent basis vector
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    for v in std::iter::once(&first).chain(frame.basis.iter()) {
        if basis.len() == k {
            break;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let r = super::frame::norm(&w);
        if r > 1e-8 {
            basis.push(w.iter().map(|x| x / r).collect());
        }
    }
    let rotated = SubspaceFrame { dim: frame.dim, basis };
    let e = 0.5 * (k as f64 - 3.0);
    let gj = gauss_jacobi(polar_nodes, e, e)?;
    let total: f64 = gj.weights.iter().sum();
    let rest = sphere_rule_coords(k - 1, resolution)?;
    let mut nodes = Vec::with_capacity(gj.nodes.len() * rest.len() * frame.dim);
    let mut weights = Vec::with_capacity(gj.nodes.len() * rest.len());
    let mut c = vec![0.0; k];
    for (&t, &wt) in gj.nodes.iter().zip(&gj.weights) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for (om, wo) in rest.iter() {
            c[0] = t;
            for (ci, o) in c[1..].iter_mut().zip(om) {
                *ci = s * o;
            }
            nodes.extend(rotated.embed(&c));
            weights.push(wt / total * wo);
        }
    }
    Ok(QuadratureRule {
        dim: frame.dim,
        nodes,
        weights,
        degree: (2 * polar_nodes - 1).min(rest.degree),
        even_only: false,
        kind: RuleKind::Embedded,
    })
}

/// ∫ θ^{2β} dθ over S^{n−1} (probability measure) for a multi-index β:
/// Γ(n/2) Π Γ(β_a + 1/2) / (π^{m/2} Γ(n/2 + |β|)), m = number of entries.
pub fn even_moment(n: usize, beta_idx: &[usize]) -> f64 {
    use crate::special::gamma::gamma_ratio;
    let mut num = vec![0.5 * n as f64];
    let mut den = vec![0.5 * n as f64 + beta_idx.iter().sum::<usize>() as f64];
    for &b in beta_idx {
        num.push(b as f64 + 0.5);
        den.push(0.5);
    }
    gamma_ratio(&num, &den).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=6 {
            for r in [2usize, 5, 8] {
                for rule in [
                    product_quadrature(n, r).unwrap(),
                    product_quadrature_even(n, r).unwrap(),
                    orthant_quadrature(n, r, false).unwrap(),
                    orthant_quadrature(n, r, true).unwrap(),
                ] {
                    let s: f64 = rule.weights.iter().sum();
                    assert!((s - 1.0).abs() < 1e-12, "n={n} r={r}");
                    for (x, _) in rule.iter() {
                        let nn: f64 = x.iter().map(|v| v * v).sum();
                        assert!((nn - 1.0).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn documented_moments() {
        let r3 = product_quadrature(3, 4).unwrap();
        assert!((r3.integrate(|x| x[2] * x[2]) - 1.0 / 3.0).abs() < 1e-15);
        let r5 = product_quadrature(5, 4).unwrap();
        assert!((r5.integrate(|x| x[0] * x[0] * x[1] * x[1]) - 1.0 / 35.0).abs() < 1e-15);
    }

    fn monomial_check(rule: &QuadratureRule, degree: usize, tol: f64) {
        let n = rule.dim;
        // all even multi-indices with total degree ≤ `degree` over the first
        // three coordinates (the rest zero), plus pure powers of every axis
        let half = degree / 2;
        for a in 0..=half {
            for b in 0..=(half - a) {
                for c in 0..=(half - a - b) {
                    let mut idx = vec![a, b, c];
                    idx.truncate(n.min(3));
                    let exact = even_moment(n, &idx);
                    let v = rule.integrate(|x| {
                        idx.iter().enumerate().map(|(k, &e)| x[k].powi(2 * e as i32)).product()
                    });
                    assert!((v - exact).abs() <= tol * exact.max(1e-2), "{:?}: {v} vs {exact}", idx);
                }
            }
        }
        for axis in 0..n {
            let exact = even_moment(n, &[half]);
            let v = rule.integrate(|x| x[axis].powi(2 * half as i32));
            assert!((v - exact).abs() <= tol * exact.max(1e-2), "axis {axis} n={n}: {v} {exact}");
        }
    }

    #[test]
    fn product_rule_exactness() {
        for n in 2..=5 {
            let r = 6;
            monomial_check(&product_quadrature(n, r).unwrap(), 2 * r - 2, 1e-12);
            monomial_check(&product_quadrature_even(n, r).unwrap(), 2 * r - 2, 1e-12);
        }
    }

    #[test]
    fn orthant_rule_resolution() {
        for n in 2..=5 {
            let sizes: &[usize] = match n {
                2 | 3 => &[16, 20],
                4 => &[16],
                _ => &[14],
            };
            for &r in sizes {
                let full = orthant_quadrature(n, r, false).unwrap();
                monomial_check(&full, full.degree, 1e-12);
                let half = orthant_quadrature(n, r, true).unwrap();
                monomial_check(&half, half.degree, 1e-12);
            }
        }
    }

    #[test]
    fn subsphere_rules() {
        let f = SubspaceFrame::coordinate(4, &[0]);
        let r = subsphere_quadrature(&f, 4).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.weights, vec![0.5, 0.5]);
        let f = crate::sphere::frame::random_frame(4, 2, 5);
        let r = subsphere_quadrature(&f, 6).unwrap();
        let b1 = f.basis[0].clone();
        let v = r.integrate(|x| crate::sphere::frame::dot(x, &b1).powi(2));
        assert!((v - 0.5).abs() < 1e-14);
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn axial_rule_is_exact_on_its_axis() {
        let f = SubspaceFrame::coordinate(5, &[0, 1, 2, 3, 4]);
        let a = crate::sphere::frame::normalize(&[1.0, -2.0, 0.5, 0.3, 1.0]);
        let r = axial_quadrature(&f, &a, 40, 8).unwrap();
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        // E (θ·a)^{60} = E θ_1^{60}
        let v = r.integrate(|x| crate::sphere::frame::dot(x, &a).powi(60));
        let want = even_moment(5, &[30]);
        assert!((v - want).abs() < 1e-13 * want, "{v} vs {want}");
        // low-degree monomials in other directions
        let v = r.integrate(|x| x[2] * x[2] * x[4] * x[4]);
        assert!((v - even_moment(5, &[1, 1])).abs() < 1e-14);
        // inside a 3-dimensional section, with the axis off the section
        let g = crate::sphere::frame::random_frame(5, 3, 4);
        let r = axial_quadrature(&g, &a, 30, 6).unwrap();
        let p = g.project(&a);
        let s = crate::sphere::frame::norm(&p);
        let v = r.integrate(|x| crate::sphere::frame::dot(x, &a).powi(40));
        let want = s.powi(40) * even_moment(3, &[20]);
        assert!((v - want).abs() < 1e-13 * want, "{v} vs {want}");
    }

    #[test]
    fn grid_dump() {
        let r = product_quadrature(2, 2).unwrap();
        let mut buf = Vec::new();
        r.write_grid_csv(&vec![1.0; r.len()], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x1,x2,weight,value"));
        assert_eq!(s.lines().count(), 5);
    }
}
