use crate::error::{Error, Result};
use crate::special::gamma::{log_gamma_ratio, beta};
use crate::special::quad::gauss_beta;
use crate::special::{normalized_gegenbauer, AlphaParam};
use std::io::Write;

/// A rotation-invariant operator on even functions, described by the
/// scalar it applies to degree-j harmonics.
#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierSpec {
    /// M^α: m_{j,α}.
    Cosine { alpha: f64 },
    /// The unnormalized transform f ↦ ∫ f(θ)|θ·u|^{α−1} dθ, α > 0.
    RawCosine { alpha: f64 },
    /// Minkowski–Funk transform M.
    Funk,
    /// a_{α,β}(j) = m_{j,α}/m_{j,β}.
    Bridge { alpha: f64, beta: f64 },
    QPlus { mu: f64, nu: f64 },
    QMinus { mu: f64, nu: f64 },
    /// Π_t: t^j.
    Poisson { t: f64 },
    /// Explicit table indexed by j.
    Custom(Vec<f64>),
    /// Product of several multipliers.
    Product(Vec<MultiplierSpec>),
}

fn signed_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    Ok(match log_gamma_ratio(num, den)? {
        Some((l, s)) => s * l.exp(),
        None => 0.0,
    })
}

/// m_{j,α} = (−1)^{j/2} Γ(j/2 + (1−α)/2) / Γ(j/2 + (n−1+α)/2) for even j, 0 for odd j.
pub fn cosine_multiplier(j: usize, alpha: f64, n: usize) -> Result<f64> {
    if AlphaParam::cosine(alpha).pole_flag {
        return Err(Error::Pole(format!("M^α is undefined at α = {alpha}")));
    }
    if j % 2 == 1 {
        return Ok(0.0);
    }
    let h = 0.5 * j as f64;
    let v = signed_ratio(&[h + 0.5 * (1.0 - alpha)], &[h + 0.5 * (n as f64 - 1.0 + alpha)])?;
    Ok(if (j / 2) % 2 == 0 { v } else { -v })
}

/// a_{α,β}(j) = [Γ(j/2+(1−α)/2)/Γ(j/2+(n−1+α)/2)]·[Γ(j/2+(n−1+β)/2)/Γ(j/2+(1−β)/2)].
pub fn bridge_multiplier(j: usize, alpha: f64, beta: f64, n: usize) -> Result<f64> {
    if AlphaParam::cosine(alpha).pole_flag || AlphaParam::cosine(beta).pole_flag {
        return Err(Error::Pole(format!("bridge multiplier undefined at (α, β) = ({alpha}, {beta})")));
    }
    let h = 0.5 * j as f64;
    let nf = n as f64;
    if crate::special::near_nonpositive_integer(h + 0.5 * (nf - 1.0 + beta), 1e-12) {
        return Err(Error::Pole(format!("m_{{{j},β}} vanishes at β = {beta}")));
    }
    let num = [h + 0.5 * (1.0 - alpha), h + 0.5 * (nf - 1.0 + beta)];
    let den = [h + 0.5 * (nf - 1.0 + alpha), h + 0.5 * (1.0 - beta)];
    signed_ratio(&num, &den)
}

/// (q̂₊, q̂₋) with q̂₊ = Γ((j+n−ν)/2)/Γ((j+n−ν+μ)/2) and
/// q̂₋ = Γ((j+ν−μ)/2)/Γ((j+ν)/2); their product is a_{α,β}(j) when
/// μ = α−β and ν = 1−β.
pub fn q_multipliers(j: usize, mu: f64, nu: f64, n: usize) -> Result<(f64, f64)> {
    let jf = j as f64;
    let nf = n as f64;
    let p = signed_ratio(&[0.5 * (jf + nf - nu)], &[0.5 * (jf + nf - nu + mu)])?;
    let m = signed_ratio(&[0.5 * (jf + nu - mu)], &[0.5 * (jf + nu)])?;
    Ok((p, m))
}

/// E_θ[|θ·u|^{α−1} C̃_j(θ·u)]: multiplier of the unnormalized transform.
pub fn raw_cosine_multiplier(j: usize, alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Integrability(format!("raw cosine transform needs α > 0 (α = {alpha})")));
    }
    if j % 2 == 1 {
        return Ok(0.0);
    }
    let nf = n as f64;
    // substitute x = t²: ∫_0^1 x^{α/2−1}(1−x)^{(n−3)/2} C̃_j(√x) dx, polynomial of degree j/2 in x
    let rule = gauss_beta(j / 2 + 2, 0.5 * alpha - 1.0, 0.5 * (nf - 3.0))?;
    let v = rule.integrate(|x| normalized_gegenbauer(j, n, x.sqrt()));
    Ok(v / beta(0.5, 0.5 * (nf - 1.0))?)
}

impl MultiplierSpec {
    /// Rejects parameters on the excluded sets.
    pub fn validate(&self) -> Result<()> {
        match self {
            MultiplierSpec::Cosine { alpha } if AlphaParam::cosine(*alpha).pole_flag => {
                Err(Error::Pole(format!("M^α is undefined at α = {alpha}")))
            }
            MultiplierSpec::Bridge { alpha, beta }
                if AlphaParam::cosine(*alpha).pole_flag || AlphaParam::cosine(*beta).pole_flag =>
            {
                Err(Error::Pole("bridge parameters on a pole".into()))
            }
            MultiplierSpec::Poisson { t } if !(0.0..=1.0).contains(t) => {
                Err(Error::Domain(format!("Poisson parameter must lie in [0,1] (t = {t})")))
            }
            MultiplierSpec::RawCosine { alpha } if !(*alpha > 0.0) => {
                Err(Error::Integrability("raw cosine transform needs α > 0".into()))
            }
            MultiplierSpec::Product(v) => v.iter().try_for_each(|m| m.validate()),
            _ => Ok(()),
        }
    }

    pub fn value(&self, j: usize, n: usize) -> Result<f64> {
        match self {
            MultiplierSpec::Cosine { alpha } => cosine_multiplier(j, *alpha, n),
            MultiplierSpec::RawCosine { alpha } => raw_cosine_multiplier(j, *alpha, n),
            MultiplierSpec::Funk => Ok(normalized_gegenbauer(j, n, 0.0)),
            MultiplierSpec::Bridge { alpha, beta } => bridge_multiplier(j, *alpha, *beta, n),
            MultiplierSpec::QPlus { mu, nu } => Ok(q_multipliers(j, *mu, *nu, n)?.0),
            MultiplierSpec::QMinus { mu, nu } => Ok(q_multipliers(j, *mu, *nu, n)?.1),
            MultiplierSpec::Poisson { t } => Ok(t.powi(j as i32)),
            MultiplierSpec::Custom(v) => v
                .get(j)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("custom multiplier has no entry for degree {j}"))),
            MultiplierSpec::Product(v) => v.iter().try_fold(1.0, |acc, m| Ok(acc * m.value(j, n)?)),
        }
    }

    /// m(0..=J).
    pub fn table(&self, n: usize, max_degree: usize) -> Result<Vec<f64>> {
        self.validate()?;
        (0..=max_degree).map(|j| self.value(j, n)).collect()
    }

    /// CSV dump (j, m(j)).
    pub fn write_csv<W: Write>(&self, n: usize, max_degree: usize, mut out: W) -> Result<()> {
        let t = self.table(n, max_degree)?;
        let io = |e: std::io::Error| Error::Invalid(format!("write failed: {e}"));
        writeln!(out, "j,m").map_err(io)?;
        for (j, v) in t.iter().enumerate() {
            writeln!(out, "{j},{v:.17e}").map_err(io)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, gamma_n_alpha, radon_limit_constant};

    #[test]
    fn inversion_pairs() {
        for n in 3..=6 {
            for &a in &[-2.5, -0.5, 0.5, 1.0 + std::f64::consts::PI / 7.0] {
                let b = 2.0 - n as f64 - a;
                for j in (0..=60).step_by(2) {
                    let p = cosine_multiplier(j, a, n).unwrap() * cosine_multiplier(j, b, n).unwrap();
                    assert!((p - 1.0).abs() < 1e-12, "n={n} a={a} j={j}: {p}");
                }
            }
        }
    }

    #[test]
    fn zero_order_matches_funk_constant() {
        for n in 3..=6 {
            let c = radon_limit_constant(n - 1);
            assert!((cosine_multiplier(0, 0.0, n).unwrap() - c).abs() < 1e-14);
            for j in (0..20).step_by(2) {
                let f = MultiplierSpec::Funk.value(j, n).unwrap();
                assert!((cosine_multiplier(j, 0.0, n).unwrap() - c * f).abs() < 1e-12);
            }
        }
        assert_eq!(cosine_multiplier(3, 0.5, 4).unwrap(), 0.0);
        assert!(cosine_multiplier(2, 3.0, 4).is_err());
    }

    #[test]
    fn raw_multiplier_times_normalizer() {
        for n in 3..=5 {
            for &a in &[0.2, 0.5, 0.9] {
                let g = gamma_n_alpha(n, a).unwrap().value;
                for j in (0..16).step_by(2) {
                    let m = cosine_multiplier(j, a, n).unwrap();
                    let r = raw_cosine_multiplier(j, a, n).unwrap();
                    assert!((g * r - m).abs() < 1e-12 * m.abs().max(1e-3), "n={n} a={a} j={j}");
                }
            }
        }
        // the kernel t² has harmonics of degree 0 and 2 only
        assert!(raw_cosine_multiplier(4, 3.0, 4).unwrap().abs() < 1e-15);
    }

    #[test]
    fn bridge_and_factorization() {
        for j in 0..=40 {
            assert!((bridge_multiplier(j, 0.7, 0.7, 4).unwrap() - 1.0).abs() < 1e-14);
            let a = bridge_multiplier(j, 0.5, -0.5, 4).unwrap();
            let (p, m) = q_multipliers(j, 1.0, 1.5, 4).unwrap();
            assert!((p * m - a).abs() < 1e-12 * a.abs(), "j={j}");
        }
        let j = 200usize;
        let a = bridge_multiplier(j, 0.5, -0.5, 4).unwrap();
        assert!((a * (j as f64 / 2.0).powf(1.0) - 1.0).abs() < 0.02);
        let _ = gamma(1.0);
    }

    #[test]
    fn csv_table() {
        let mut buf = Vec::new();
        MultiplierSpec::Poisson { t: 0.5 }.write_csv(3, 4, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 6);
    }
}
