use crate::error::{Error, Result};
use crate::sphere::{dot, QuadratureRule};

/// Poisson kernel (1−t²)/(1 − 2t u·θ + t²)^{n/2} for the probability measure.
pub fn poisson_kernel(n: usize, t: f64, cos: f64) -> f64 {
    let d = 1.0 - 2.0 * t * cos + t * t;
    (1.0 - t * t) / d.powf(0.5 * n as f64)
}

/// Direct quadrature of (Π_t f)(θ) = (1−t²) ∫ f(u)|θ − tu|^{−n} du.
pub fn poisson_direct(rule: &QuadratureRule, f: &[f64], t: f64, theta: &[f64]) -> Result<f64> {
    if !(0.0..=0.999).contains(&t) {
        return Err(Error::Domain(format!("Poisson parameter must lie in [0, 0.999] (t = {t})")));
    }
    let n = rule.dim;
    let mut terms = Vec::with_capacity(rule.len());
    for ((u, w), fv) in rule.iter().zip(f) {
        let c = dot(u, theta);
        let k = if rule.even_only {
            0.5 * (poisson_kernel(n, t, c) + poisson_kernel(n, t, -c))
        } else {
            poisson_kernel(n, t, c)
        };
        terms.push(w * fv * k);
    }
    Ok(crate::special::quad::pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::{apply_multiplier_grid, MultiplierSpec};
    use crate::sphere::{product_quadrature, random_unit_vector, rng_for};

    #[test]
    fn unit_mass_and_mean() {
        let rule = product_quadrature(3, 40).unwrap();
        let ones = vec![1.0; rule.len()];
        let th = [0.0, 0.6, 0.8];
        assert!((poisson_direct(&rule, &ones, 0.5, &th).unwrap() - 1.0).abs() < 1e-12);
        let f = rule.values(|x| x[0] * x[0] + 0.3 * x[2].powi(4));
        let mean = rule.integrate_values(&f);
        assert!((poisson_direct(&rule, &f, 0.0, &th).unwrap() - mean).abs() < 1e-14);
        assert!(poisson_direct(&rule, &f, 1.0, &th).is_err());
    }

    #[test]
    fn matches_multiplier() {
        let n = 4;
        let rule = product_quadrature(n, 60).unwrap();
        let f = rule.values(|x| (x[0] * x[1] + x[2] * x[2] - 0.2 * x[3].powi(4)).powi(2));
        let mut rng = rng_for(3, 1);
        let out: Vec<Vec<f64>> = (0..5).map(|_| random_unit_vector(n, &mut rng)).collect();
        let t = 0.6;
        let grid = apply_multiplier_grid(&rule, &f, &MultiplierSpec::Poisson { t }, 16, &out).unwrap();
        for (u, g) in out.iter().zip(&grid) {
            let d = poisson_direct(&rule, &f, t, u).unwrap();
            assert!((d - g).abs() < 1e-8, "{d} vs {g}");
        }
    }
}
