use super::gamma::{gamma, log_gamma_signed};
use super::quad::{gauss_legendre, Rule1d};
use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn rule_0_pi() -> &'static Rule1d {
    static R: OnceLock<Rule1d> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(96, 0.0, PI))
}

fn rule_unit() -> &'static Rule1d {
    static R: OnceLock<Rule1d> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(40, 0.0, 1.0))
}

fn j_series(nu: f64, x: f64) -> f64 {
    // Σ (−1)^k (x/2)^{2k+ν} / (k! Γ(k+ν+1))
    let h = 0.5 * x;
    let lead = match log_gamma_signed(nu + 1.0) {
        Ok((l, _)) => (nu * h.ln() - l).exp(),
        Err(_) => return 0.0,
    };
    let mut term = lead;
    let mut sum = term;
    let q = -h * h;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf > h {
            break;
        }
    }
    sum
}

fn j_integral(nu: f64, x: f64) -> f64 {
    // Schläfli: (1/π)∫_0^π cos(νt − x sin t) dt − (sin νπ/π)∫_0^∞ e^{−x sinh t − νt} dt
    let a = rule_0_pi().integrate(|t| (nu * t - x * t.sin()).cos()) / PI;
    let s = (nu * PI).sin();
    if s.abs() < 1e-300 {
        return a;
    }
    let tmax = (45.0 / x).asinh();
    let r = rule_unit();
    let b = r.integrate(|u| {
        let t = u * tmax;
        (-x * t.sinh() - nu * t).exp()
    }) * tmax;
    a - s / PI * b
}

fn j_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // k odd contributes to Q, k even to P, with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Bessel function of the first kind J_ν(x), ν ≥ 0, x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if nu < 0.0 || x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j needs ν ≥ 0, x ≥ 0 (ν={nu}, x={x})")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(bessel_j_unchecked(nu, x))
}

/// J_ν(x) without argument validation, for hot loops.
pub fn bessel_j_unchecked(nu: f64, x: f64) -> f64 {
    if x < 8.0 {
        return j_series(nu, x);
    }
    if x < 25.0f64.max(nu * nu + 5.0) {
        j_integral(nu, x)
    } else {
        j_hankel(nu, x)
    }
}

/// Modified Bessel function of the second kind K_ν(x), x > 0.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0 (x={x})")));
    }
    let nu = nu.abs();
    // K_ν(x) = ∫_0^∞ e^{−x cosh t} cosh(νt) dt, truncated where the integrand
    // falls below e^{−45} relative to its peak at t = 0.
    let mut tmax: f64 = 1.0;
    while -x * (tmax.cosh() - 1.0) + nu * tmax > -45.0 {
        tmax += 0.5;
    }
    let panels = (tmax.ceil() as usize).max(1) * 2;
    let r = rule_unit();
    let h = tmax / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = p as f64 * h;
        sum += r.integrate(|u| {
            let t = lo + u * h;
            (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh()
        }) * h;
    }
    Ok(sum * (-x).exp())
}

/// ∫_0^∞ s^{μ−1} K_ν(s) ds = 2^{μ−2} Γ((μ−ν)/2) Γ((μ+ν)/2), valid for μ > |ν|.
pub fn bessel_k_mellin(mu: f64, nu: f64) -> Result<f64> {
    if mu <= nu.abs() {
        return Err(Error::Integrability(format!("Mellin transform of K needs μ > |ν| (μ={mu})")));
    }
    Ok(2f64.powf(mu - 2.0) * gamma(0.5 * (mu - nu))? * gamma(0.5 * (mu + nu))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_closed_forms() {
        for i in 1..2000 {
            let x = 0.25 * i as f64;
            let j = bessel_j(0.5, x).unwrap();
            let exact = (2.0 / (PI * x)).sqrt() * x.sin();
            // absolute error relative to the envelope √(2/(πx))
            let env = (2.0 / (PI * x)).sqrt();
            assert!((j - exact).abs() <= 1e-11 * env, "x={x}: {j} {exact}");
            let k = bessel_k(0.5, x.min(400.0)).unwrap();
            let xx = x.min(400.0);
            let kexact = (PI / (2.0 * xx)).sqrt() * (-xx).exp();
            assert!((k / kexact - 1.0).abs() < 1e-10, "K x={xx}");
        }
    }

    #[test]
    fn three_halves_order() {
        // J_{3/2}(x) = √(2/(πx)) (sin x / x − cos x)
        for i in 1..600 {
            let x = 0.83 * i as f64;
            let exact = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            let env = (2.0 / (PI * x)).sqrt();
            let j = bessel_j(1.5, x).unwrap();
            assert!((j - exact).abs() <= 1e-11 * env, "x={x}");
        }
    }

    #[test]
    fn integer_orders_continuous_across_switches() {
        for &nu in &[0.0, 1.0, 2.0, 3.5, 5.0] {
            for &x in &[8.0f64, 25.0, 30.0, 33.0] {
                let a = j_series(nu, x - 1e-9);
                let _ = a;
                let b = j_integral(nu, x);
                let c = j_hankel(nu, x.max(25.0));
                if x >= 25.0 + nu * nu {
                    assert!((b - c).abs() < 1e-12, "nu={nu} x={x}: {b} {c}");
                }
            }
            let s = j_series(nu, 7.5);
            let i = j_integral(nu, 7.5);
            assert!((s - i).abs() < 1e-13, "nu={nu}: {s} {i}");
        }
    }

    // first and second derivatives by Richardson-extrapolated central differences
    fn richardson(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
        let d = |h: f64| {
            let (p, m, c) = (f(x + h), f(x - h), f(x));
            ((p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h))
        };
        let (a1, a2) = d(h);
        let (b1, b2) = d(2.0 * h);
        ((4.0 * a1 - b1) / 3.0, (4.0 * a2 - b2) / 3.0)
    }

    #[test]
    fn bessel_odes() {
        for &nu in &[0.0, 0.5, 1.0, 2.3, 5.0] {
            for &x in &[0.7f64, 3.0, 9.0, 20.0, 60.0, 300.0] {
                let h = 1e-3 * x.max(1.0).sqrt();
                let y = |t: f64| bessel_j(nu, t).unwrap();
                let (d1, d2) = richardson(&y, x, h.min(0.2 * x));
                let y0 = y(x);
                let res = x * x * d2 + x * d1 + (x * x - nu * nu) * y0;
                let scale = (x * x + nu * nu) * (2.0 / (PI * x)).sqrt().max(y0.abs());
                assert!(res.abs() <= 1e-8 * scale, "J nu={nu} x={x}: {res}");
                if x <= 60.0 {
                    let k = |t: f64| bessel_k(nu, t).unwrap();
                    let (d1, d2) = richardson(&k, x, h.min(0.2 * x));
                    let k0 = k(x);
                    let res = x * x * d2 + x * d1 - (x * x + nu * nu) * k0;
                    assert!(res.abs() <= 1e-7 * (x * x + nu * nu) * k0, "K nu={nu} x={x}");
                }
            }
        }
    }

    #[test]
    fn k_mellin_matches_quadrature() {
        let (mu, nu) = (3.5, 1.0);
        let r = super::super::quad::adaptive_gk(
            |s| if s == 0.0 { 0.0 } else { s.powf(mu - 1.0) * bessel_k(nu, s).unwrap() },
            0.0,
            60.0,
            1e-12,
            1e-12,
            400,
        );
        let exact = bessel_k_mellin(mu, nu).unwrap();
        assert!((r.value / exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(2.0, 0.0).unwrap(), 0.0);
        assert!(bessel_k(1.0, 0.0).is_err());
    }
}
