use super::multiplier::MultiplierSpec;
use crate::error::{Error, Result};
use crate::special::quad::gauss_jacobi;
use crate::special::{gegenbauer_at_one, harmonic_dimension};
use std::io::Write;

/// Coefficients of an SO(n−1)-invariant function in the basis C̃_j(t) = C_j^λ(t)/C_j^λ(1).
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalExpansion {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

/// Values C̃_0(t), …, C̃_J(t) by the Gegenbauer recurrence.
pub fn normalized_gegenbauer_all(n: usize, max_degree: usize, t: f64) -> Vec<f64> {
    let lam = 0.5 * (n as f64 - 2.0);
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    let (mut a, mut b) = (1.0, if lam == 0.0 { t } else { 2.0 * lam * t });
    out.push(b / gegenbauer_at_one(1, lam));
    let mut at_one = gegenbauer_at_one(1, lam);
    for k in 1..max_degree {
        let kf = k as f64;
        let c = if lam == 0.0 {
            2.0 * t * b - a
        } else {
            (2.0 * (kf + lam) * t * b - (kf + 2.0 * lam - 1.0) * a) / (kf + 1.0)
        };
        if lam != 0.0 {
            at_one *= (2.0 * lam + kf) / (kf + 1.0);
        }
        a = b;
        b = c;
        out.push(b / at_one);
    }
    out
}

impl ZonalExpansion {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Self {
        ZonalExpansion { n, coeffs }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let c = normalized_gegenbauer_all(self.n, self.max_degree(), t);
        c.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    /// Coefficient-wise product with a multiplier.
    pub fn apply(&self, m: &MultiplierSpec) -> Result<ZonalExpansion> {
        let tab = m.table(self.n, self.max_degree())?;
        Ok(ZonalExpansion {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&tab).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &ZonalExpansion) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|j| {
                let a = self.coeffs.get(j).copied().unwrap_or(0.0);
                let b = other.coeffs.get(j).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Invalid(format!("write failed: {e}"));
        writeln!(out, "j,a").map_err(io)?;
        for (j, a) in self.coeffs.iter().enumerate() {
            writeln!(out, "{j},{a:.17e}").map_err(io)?;
        }
        Ok(())
    }
}

/// Expands a profile F on [−1, 1] to degree J with 2J+2 Gauss–Gegenbauer nodes.
pub fn expand_zonal<F: Fn(f64) -> f64>(profile: F, n: usize, max_degree: usize) -> Result<ZonalExpansion> {
    expand_zonal_with_nodes(profile, n, max_degree, 2 * max_degree + 2)
}

/// a_j = d_n(j) · E[F(t) C̃_j(t)] under the probability weight ∝ (1−t²)^{(n−3)/2}.
pub fn expand_zonal_with_nodes<F: Fn(f64) -> f64>(
    profile: F,
    n: usize,
    max_degree: usize,
    nodes: usize,
) -> Result<ZonalExpansion> {
    if n < 2 {
        return Err(Error::Invalid("zonal expansions need n ≥ 2".into()));
    }
    let e = 0.5 * (n as f64 - 3.0);
    let rule = gauss_jacobi(nodes.max(max_degree + 1), e, e)?;
    let total: f64 = rule.weights.iter().sum();
    let mut acc = vec![0.0; max_degree + 1];
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fw = profile(t) * w / total;
        for (a, c) in acc.iter_mut().zip(normalized_gegenbauer_all(n, max_degree, t)) {
            *a += fw * c;
        }
    }
    for (j, a) in acc.iter_mut().enumerate() {
        *a *= harmonic_dimension(n, j);
    }
    Ok(ZonalExpansion { n, coeffs: acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normalized_gegenbauer;

    #[test]
    fn constants_and_quadratics() {
        let e = expand_zonal(|_| 1.0, 4, 10).unwrap();
        assert!((e.coeffs[0] - 1.0).abs() < 1e-14);
        assert!(e.coeffs[1..].iter().all(|c| c.abs() < 1e-13));
        let e = expand_zonal(|t| t * t, 3, 8).unwrap();
        assert!((e.coeffs[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((e.coeffs[2] - 2.0 / 3.0).abs() < 1e-14);
        for (j, c) in e.coeffs.iter().enumerate() {
            if j != 0 && j != 2 {
                assert!(c.abs() < 1e-14);
            }
        }
        for n in 2..=6 {
            let e = expand_zonal(|t| normalized_gegenbauer(6, n, t), n, 12).unwrap();
            for (j, c) in e.coeffs.iter().enumerate() {
                let want = if j == 6 { 1.0 } else { 0.0 };
                assert!((c - want).abs() < 1e-12, "n={n} j={j} {c}");
            }
        }
    }

    #[test]
    fn round_trip() {
        for n in 2..=6 {
            let coeffs: Vec<f64> = (0..=16).map(|j| if j % 2 == 0 { 1.0 / (1.0 + j as f64) } else { 0.0 }).collect();
            let e = ZonalExpansion::new(n, coeffs);
            let back = expand_zonal(|t| e.evaluate(t), n, 16).unwrap();
            assert!(back.max_abs_diff(&e) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn recurrence_matches_scalar() {
        for n in 2..=6 {
            let v = normalized_gegenbauer_all(n, 30, 0.37);
            for (j, x) in v.iter().enumerate() {
                assert!((x - normalized_gegenbauer(j, n, 0.37)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn funk_inversion_on_coefficients() {
        let n = 4;
        let c = crate::special::radon_limit_constant(n - 1);
        let coeffs: Vec<f64> = (0..=20).map(|j| if j % 2 == 0 { (j as f64 * 0.7).sin() } else { 0.0 }).collect();
        let e = ZonalExpansion::new(n, coeffs);
        let mf = e.apply(&MultiplierSpec::Funk).unwrap();
        let back = mf
            .apply(&MultiplierSpec::Cosine { alpha: 2.0 - n as f64 })
            .unwrap()
            .apply(&MultiplierSpec::Custom(vec![c; 21]))
            .unwrap();
        assert!(back.max_abs_diff(&e) < 1e-12);
    }
}
