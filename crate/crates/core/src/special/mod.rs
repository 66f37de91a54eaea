//! Scalar special functions and the normalizing constants of the cosine and
//! Radon transforms.

pub mod bessel;
pub mod gamma;
pub mod quad;

pub use bessel::{bessel_j, bessel_k};
pub use gamma::{gamma, gamma_ratio, log_gamma_signed, rgamma};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Distance below which a parameter counts as sitting on an excluded point.
pub const POLE_EPS: f64 = 1e-9;

/// A real continuation parameter together with its pole status for the
/// operator that will consume it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam {
    pub value: f64,
    pub pole_flag: bool,
}

impl AlphaParam {
    /// Parameter for M^α: excluded points are α = 1, 3, 5, ….
    pub fn cosine(value: f64) -> Self {
        AlphaParam { value, pole_flag: near_odd_positive(value) }
    }

    /// Parameter for R_i^α on R^n: excluded where (n−α−i)/2 is a pole of Γ.
    pub fn gen_cosine(value: f64, n: usize, i: usize) -> Self {
        let x = 0.5 * (n as f64 - value - i as f64);
        AlphaParam { value, pole_flag: near_nonpositive_integer(x, POLE_EPS / 2.0) }
    }
}

fn near_odd_positive(a: f64) -> bool {
    if a < 1.0 - POLE_EPS {
        return false;
    }
    let k = ((a - 1.0) / 2.0).round();
    (a - (2.0 * k + 1.0)).abs() < POLE_EPS
}

pub(crate) fn near_nonpositive_integer(x: f64, eps: f64) -> bool {
    x < eps && (x - x.round()).abs() < eps
}

/// σ_{n−1}: surface area of the unit sphere in R^n.
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1, "sphere_area needs n >= 1");
    let nf = n as f64;
    2.0 * PI.powf(0.5 * nf) * rgamma(0.5 * nf)
}

/// Volume of the unit ball in R^k.
pub fn ball_volume(k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    sphere_area(k) / k as f64
}

/// A normalizing constant that may vanish by continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub value: f64,
    /// True when the value is zero because 1/Γ(α/2) vanishes.
    pub zero_flag: bool,
}

/// γ_n(α) = σ_{n−1} Γ((1−α)/2) / (2 π^{(n−1)/2} Γ(α/2)).
pub fn gamma_n_alpha(n: usize, alpha: f64) -> Result<Normalizer> {
    if near_odd_positive(alpha) {
        return Err(Error::Pole(format!("γ_n(α) has a pole at α = {alpha}")));
    }
    let zero = near_nonpositive_integer(0.5 * alpha, POLE_EPS / 2.0);
    if zero {
        return Ok(Normalizer { value: 0.0, zero_flag: true });
    }
    let v = sphere_area(n) * gamma((1.0 - alpha) / 2.0)? * rgamma(alpha / 2.0)
        / (2.0 * PI.powf(0.5 * (n as f64 - 1.0)));
    Ok(Normalizer { value: v, zero_flag: false })
}

/// γ_{n,i}(α) = σ_{n−1} Γ((n−α−i)/2) / (2 π^{(n−1)/2} Γ(α/2)).
pub fn gamma_ni_alpha(n: usize, i: usize, alpha: f64) -> Result<Normalizer> {
    let x = 0.5 * (n as f64 - alpha - i as f64);
    if near_nonpositive_integer(x, POLE_EPS / 2.0) {
        return Err(Error::Pole(format!(
            "γ_{{n,i}}(α) has a pole at α = {alpha} (n={n}, i={i})"
        )));
    }
    if near_nonpositive_integer(0.5 * alpha, POLE_EPS / 2.0) {
        return Ok(Normalizer { value: 0.0, zero_flag: true });
    }
    let v = sphere_area(n) * gamma(x)? * rgamma(alpha / 2.0)
        / (2.0 * PI.powf(0.5 * (n as f64 - 1.0)));
    Ok(Normalizer { value: v, zero_flag: false })
}

/// c_i = σ_{i−1} / (2 π^{(i−1)/2}) = √π / Γ(i/2): the factor in R_i^0 = c_i R_i.
pub fn radon_limit_constant(i: usize) -> f64 {
    PI.sqrt() * rgamma(0.5 * i as f64)
}

/// Gegenbauer polynomial C_j^λ(t) by the three-term recurrence. For λ = 0 the
/// Chebyshev polynomial T_j is returned (value 1 at t = 1).
pub fn gegenbauer(j: usize, lam: f64, t: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    if lam == 0.0 {
        let (mut a, mut b) = (1.0, t);
        for _ in 1..j {
            let c = 2.0 * t * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    let (mut a, mut b) = (1.0, 2.0 * lam * t);
    for k in 1..j {
        let kf = k as f64;
        let c = (2.0 * (kf + lam) * t * b - (kf + 2.0 * lam - 1.0) * a) / (kf + 1.0);
        a = b;
        b = c;
    }
    b
}

/// C_j^λ(1) = Γ(j+2λ) / (j! Γ(2λ)); 1 for λ = 0.
pub fn gegenbauer_at_one(j: usize, lam: f64) -> f64 {
    if lam == 0.0 || j == 0 {
        return 1.0;
    }
    let mut v = 1.0;
    for k in 0..j {
        v *= (2.0 * lam + k as f64) / (k as f64 + 1.0);
    }
    v
}

/// Normalized Gegenbauer polynomial C̃_j(t) = C_j^λ(t)/C_j^λ(1) for S^{n−1}.
pub fn normalized_gegenbauer(j: usize, n: usize, t: f64) -> f64 {
    let lam = 0.5 * (n as f64 - 2.0);
    gegenbauer(j, lam, t) / gegenbauer_at_one(j, lam)
}

/// Dimension d_n(j) of the space of degree-j spherical harmonics on S^{n−1}.
pub fn harmonic_dimension(n: usize, j: usize) -> f64 {
    if n == 2 {
        return if j == 0 { 1.0 } else { 2.0 };
    }
    if j == 0 {
        return 1.0;
    }
    // (2j+n−2)(j+n−3)! / (j!(n−2)!)
    let mut v = (2 * j + n - 2) as f64 / (n - 2) as f64;
    for k in 1..=(n - 3) {
        v *= (j + k) as f64 / k as f64;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad::{gauss_jacobi, gauss_legendre};

    #[test]
    fn sphere_areas() {
        let close = |a: f64, b: f64| (a / b - 1.0).abs() < 1e-14;
        assert!(close(sphere_area(2), 2.0 * PI));
        assert!(close(sphere_area(3), 4.0 * PI));
        assert!(close(sphere_area(4), 2.0 * PI * PI));
        assert!(close(sphere_area(1), 2.0));
    }

    #[test]
    fn gamma_n_values() {
        // n=3, α=1/2: σ₂Γ(1/4)/(2πΓ(1/4)) = 4π/(2π) = 2
        let g = gamma_n_alpha(3, 0.5).unwrap();
        assert!((g.value - 2.0).abs() < 1e-14);
        let z = gamma_n_alpha(3, 1e-12).unwrap();
        assert!(z.zero_flag && z.value == 0.0);
        assert!(matches!(gamma_n_alpha(4, 3.0), Err(Error::Pole(_))));
        assert!(gamma_n_alpha(4, -2.0).unwrap().zero_flag);
    }

    #[test]
    fn gamma_n_matches_direct_quadrature() {
        // γ_n(α) ∫|θ·u|^{α−1} dθ = Γ((1−α)/2)/Γ((n−1+α)/2)  (the j = 0 multiplier)
        // ∫|θ·u|^{α−1}dθ = (σ_{n−2}/σ_{n−1}) ∫ |s|^{α−1}(1−s²)^{(n−3)/2} ds = B(α/2,(n−1)/2)/B(1/2,(n−1)/2)
        for n in 3..=6 {
            for &a in &[0.3, 0.5, 0.9] {
                let nf = n as f64;
                let r = crate::special::quad::gauss_beta(30, 0.5 * a - 1.0, 0.5 * (nf - 3.0)).unwrap();
                // substitute x = s²: ∫_0^1 x^{α/2−1}(1−x)^{(n−3)/2} dx
                let integral = r.integrate(|_| 1.0)
                    / gamma::beta(0.5, 0.5 * (nf - 1.0)).unwrap();
                let lhs = gamma_n_alpha(n, a).unwrap().value * integral;
                let rhs = gamma((1.0 - a) / 2.0).unwrap() / gamma((nf - 1.0 + a) / 2.0).unwrap();
                assert!((lhs / rhs - 1.0).abs() < 1e-13, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn gamma_ni_coincides_with_gamma_n() {
        for n in 3..=6 {
            for &a in &[0.25, 0.5, -0.5, 2.5] {
                let x = gamma_ni_alpha(n, n - 1, a).unwrap().value;
                let y = gamma_n_alpha(n, a).unwrap().value;
                assert!((x - y).abs() <= 1e-14 * y.abs());
            }
        }
        let v = gamma_ni_alpha(4, 2, 1.0).unwrap().value;
        assert!((v - sphere_area(4) / (2.0 * PI.powf(1.5))).abs() < 1e-14);
        assert!(gamma_ni_alpha(3, 1, 1e-12).unwrap().zero_flag);
    }

    #[test]
    fn gegenbauer_basics() {
        assert_eq!(gegenbauer(0, 0.5, 0.3), 1.0);
        assert!((gegenbauer(1, 0.5, 0.3) - 0.3).abs() < 1e-16);
        assert!((gegenbauer(4, 0.5, 1.0) - 1.0).abs() < 1e-14);
        assert!((normalized_gegenbauer(7, 5, 1.0) - 1.0).abs() < 1e-13);
        assert!((normalized_gegenbauer(3, 2, 0.5) - (3.0 * (0.5f64).acos()).cos()).abs() < 1e-14);
    }

    #[test]
    fn gegenbauer_orthogonality() {
        // t = cos φ turns the weight (1−t²)^{λ−1/2} dt into sin^{2λ}φ dφ,
        // which Gauss–Legendre handles without endpoint singularities
        let r = gauss_legendre(200, 0.0, PI);
        for &lam in &[0.5, 1.0, 1.5, 2.0] {
            let inner = |j: usize, k: usize| {
                r.integrate(|p| gegenbauer(j, lam, p.cos()) * gegenbauer(k, lam, p.cos()) * p.sin().powf(2.0 * lam))
            };
            let norms: Vec<f64> = (0..=20).map(|j| inner(j, j).sqrt()).collect();
            for j in 0..=20 {
                for k in 0..j {
                    let v = inner(j, k);
                    assert!(v.abs() <= 1e-10 * norms[j] * norms[k], "lam={lam} j={j} k={k}: {v}");
                }
            }
        }
    }

    #[test]
    fn harmonic_dimensions() {
        assert_eq!(harmonic_dimension(3, 4), 9.0);
        assert_eq!(harmonic_dimension(4, 2), 9.0);
        assert_eq!(harmonic_dimension(2, 5), 2.0);
        // addition theorem: ∫ Z_j(θ·u)² dθ = d_n(j) with Z_j = d_n(j) C̃_j
        let r = gauss_jacobi(40, 1.0, 1.0).unwrap(); // n = 5 weight (1−t²)^1
        let total = r.integrate(|_| 1.0);
        for j in [2usize, 6, 11] {
            let d = harmonic_dimension(5, j);
            let v = r.integrate(|t| (d * normalized_gegenbauer(j, 5, t)).powi(2)) / total;
            assert!((v / d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pole_flags() {
        assert!(AlphaParam::cosine(3.0 + 1e-10).pole_flag);
        assert!(!AlphaParam::cosine(2.0).pole_flag);
        assert!(AlphaParam::gen_cosine(2.0, 4, 2).pole_flag);
    }
}
