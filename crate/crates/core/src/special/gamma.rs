use crate::error::{Error, Result};
use std::f64::consts::PI;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() <= 1e-12
}

// Stirling series for y >= 15.
fn ln_gamma_large(y: f64) -> f64 {
    let iy = 1.0 / y;
    let iy2 = iy * iy;
    let series = iy
        * (1.0 / 12.0
            + iy2
                * (-1.0 / 360.0
                    + iy2
                        * (1.0 / 1260.0
                            + iy2
                                * (-1.0 / 1680.0
                                    + iy2 * (1.0 / 1188.0 + iy2 * (-691.0 / 360360.0 + iy2 / 156.0))))));
    (y - 0.5) * y.ln() - y + HALF_LN_2PI + series
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x >= 15.0 {
        return ln_gamma_large(x);
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < 15.0 {
        prod *= y;
        y += 1.0;
    }
    ln_gamma_large(y) - prod.ln()
}

/// log|Γ(x)| together with the sign of Γ(x).
pub fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma_signed: non-finite argument {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(format!("Gamma has a pole at {x}")));
    }
    if x >= 0.5 {
        return Ok((ln_gamma_positive(x), 1.0));
    }
    // reflection: Γ(x)Γ(1−x) = π / sin(πx)
    let s = sin_pi(x);
    let lg = PI.ln() - s.abs().ln() - ln_gamma_positive(1.0 - x);
    Ok((lg, s.signum()))
}

/// Γ(x) for x off the poles.
pub fn gamma(x: f64) -> Result<f64> {
    let (l, s) = log_gamma_signed(x)?;
    Ok(s * l.exp())
}

/// 1/Γ(x), which is entire: returns 0 at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    match log_gamma_signed(x) {
        Ok((l, s)) => s * (-l).exp(),
        Err(_) => 0.0,
    }
}

/// Signed log of a product of Gamma values: Π Γ(num_i) / Π Γ(den_j).
/// A pole in the denominator yields Ok(None) (the ratio vanishes); a pole in
/// the numerator is an error.
pub fn log_gamma_ratio(num: &[f64], den: &[f64]) -> Result<Option<(f64, f64)>> {
    let mut l = 0.0;
    let mut s = 1.0;
    for &a in num {
        let (la, sa) = log_gamma_signed(a)?;
        l += la;
        s *= sa;
    }
    for &b in den {
        match log_gamma_signed(b) {
            Ok((lb, sb)) => {
                l -= lb;
                s *= sb;
            }
            Err(Error::Pole(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some((l, s)))
}

/// Π Γ(num_i) / Π Γ(den_j) as a real number (0 when a denominator has a pole).
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    Ok(match log_gamma_ratio(num, den)? {
        Some((l, s)) => s * l.exp(),
        None => 0.0,
    })
}

/// Beta function B(a, b) for positive arguments.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    gamma_ratio(&[a, b], &[a + b])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> f64 {
        (1..=k).fold(1.0, |acc, i| acc * i as f64)
    }

    #[test]
    fn half_and_integers() {
        let (l, s) = log_gamma_signed(0.5).unwrap();
        assert_eq!(s, 1.0);
        assert!((l - PI.sqrt().ln()).abs() < 1e-15);
        let (l, _) = log_gamma_signed(5.0).unwrap();
        assert!((l - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn reflection_at_minus_half() {
        // Γ(1/2)Γ(1/2) = π / sin(π/2) and Γ(1/2) = −(1/2)Γ(−1/2)
        let expected = -2.0 * PI.sqrt();
        let g = gamma(-0.5).unwrap();
        assert!((g / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn factorials_up_to_fifty() {
        for k in 1..=50u32 {
            let g = gamma(k as f64).unwrap();
            let f = factorial(k - 1);
            assert!((g / f - 1.0).abs() < 1e-13, "k={k}: {g} vs {f}");
        }
    }

    #[test]
    fn half_integers_up_to_fifty() {
        // Γ(k+1/2) = (2k)! √π / (4^k k!)
        for k in 0..=49u32 {
            let g = gamma(k as f64 + 0.5).unwrap();
            let mut expected = PI.sqrt();
            for i in 1..=k {
                expected *= i as f64 - 0.5;
            }
            assert!((g / expected - 1.0).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn poles_rejected() {
        assert!(matches!(log_gamma_signed(0.0), Err(Error::Pole(_))));
        assert!(matches!(log_gamma_signed(-3.0), Err(Error::Pole(_))));
        assert_eq!(rgamma(-2.0), 0.0);
    }

    #[test]
    fn negative_sign_pattern() {
        assert_eq!(log_gamma_signed(-0.5).unwrap().1, -1.0);
        assert_eq!(log_gamma_signed(-1.5).unwrap().1, 1.0);
        assert_eq!(log_gamma_signed(-2.5).unwrap().1, -1.0);
    }
}
