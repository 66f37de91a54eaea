use super::construct::body_from_power;
use super::lambda::{c_lambda_n, Branch, LambdaParam};
use crate::error::{Error, Result};
use crate::harmonic::{cosine_multiplier, normalized_gegenbauer_all, MultiplierField, MultiplierSpec};
use crate::special::harmonic_dimension;
use crate::sphere::body::RadialFn;
use crate::sphere::{dot, normalize, product_quadrature_even, StarBody, Symmetry};
use std::sync::Arc;

/// An even non-negative measure on S^{n−1}: a density with respect to the
/// probability measure dθ, or atoms. An atom (a, m) puts mass m/2 at each of ±a.
#[derive(Clone)]
pub enum SphericalMeasure {
    Density(RadialFn),
    Atoms(Vec<(Vec<f64>, f64)>),
}

impl std::fmt::Debug for SphericalMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SphericalMeasure::Density(_) => write!(f, "Density(..)"),
            SphericalMeasure::Atoms(a) => write!(f, "Atoms({a:?})"),
        }
    }
}

impl SphericalMeasure {
    pub fn uniform() -> Self {
        SphericalMeasure::Density(Arc::new(|_: &[f64]| 1.0))
    }

    /// Normalizes atom directions and checks masses.
    pub fn atoms(list: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::Invalid("an atomic measure needs at least one atom".into()));
        }
        let mut out = Vec::with_capacity(list.len());
        for (a, m) in list {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(Error::Invalid(format!("atom masses must be finite and non-negative (m = {m})")));
            }
            if !(crate::sphere::norm(&a) > 0.0) {
                return Err(Error::Invalid("atom direction is zero".into()));
            }
            out.push((normalize(&a), m));
        }
        Ok(SphericalMeasure::Atoms(out))
    }

    /// Checks dimension, evenness and non-negativity on a grid.
    pub fn validate(&self, n: usize, res: usize) -> Result<()> {
        match self {
            SphericalMeasure::Atoms(list) => {
                if list.iter().any(|(a, _)| a.len() != n) {
                    return Err(Error::Invalid(format!("atom directions must lie in R^{n}")));
                }
            }
            SphericalMeasure::Density(f) => {
                let grid = product_quadrature_even(n, res)?;
                for x in grid.nodes.chunks_exact(n) {
                    let (a, b) = (f(x), f(&x.iter().map(|v| -v).collect::<Vec<_>>()));
                    if !(a >= 0.0) || !a.is_finite() {
                        return Err(Error::Invalid(format!("density is {a} at {x:?}")));
                    }
                    if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                        return Err(Error::Invalid(format!("density is not even at {x:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn total_mass(&self, n: usize, res: usize) -> Result<f64> {
        Ok(match self {
            SphericalMeasure::Atoms(list) => list.iter().map(|(_, m)| m).sum(),
            SphericalMeasure::Density(f) => {
                let rule = product_quadrature_even(n, res)?;
                rule.integrate(|x| f(x))
            }
        })
    }
}

/// Coefficients t^j m(j) d_n(j) of a zonal kernel, for even j, truncated
/// once they fall below 1e−16 of the largest one (at most `cap`).
fn zonal_kernel(n: usize, t: f64, multiplier: &dyn Fn(usize) -> Result<f64>, cap: usize) -> Result<Vec<f64>> {
    let mut c = vec![0.0];
    c[0] = multiplier(0)?;
    let mut top = c[0].abs();
    let mut small = 0;
    let mut j = 2;
    while j <= cap {
        let v = t.powi(j as i32) * multiplier(j)? * harmonic_dimension(n, j);
        c.push(0.0);
        c.push(v);
        top = top.max(v.abs());
        small = if v.abs() < 1e-16 * top { small + 1 } else { 0 };
        if small >= 3 {
            break;
        }
        j += 2;
    }
    Ok(c)
}

fn atom_sum(atoms: &[(Vec<f64>, f64)], coeffs: &[f64], n: usize, u: &[f64]) -> f64 {
    let deg = coeffs.len() - 1;
    atoms
        .iter()
        .map(|(a, m)| {
            let g = normalized_gegenbauer_all(n, deg, dot(a, u));
            m * g.iter().zip(coeffs).map(|(x, y)| x * y).sum::<f64>()
        })
        .sum()
}

/// One smoothed pair: ρ_{K_t}^λ = Π_tρ_K^λ and ρ_{L_t}^{n−λ} = c_{λ,n}Π_tµ.
#[derive(Debug, Clone)]
pub struct PoissonPair {
    pub t: f64,
    pub k: StarBody,
    pub l: StarBody,
    /// sup |ρ_{K_t} − ρ_K| over the check grid, when ρ_K is bounded.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct PoissonOptions {
    /// Truncation degree for densities.
    pub max_degree: usize,
    /// Cap on the degree of atomic kernels.
    pub atom_degree_cap: usize,
    /// Resolution of the grid on which distances and positivity are checked.
    pub check_resolution: usize,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        PoissonOptions { max_degree: 24, atom_degree_cap: 2000, check_resolution: 10 }
    }
}

/// The smooth pairs (K_t, L_t) approximating K with s_λρ_K^λ = M^{1−λ}µ.
/// For a density, ρ_K itself is the t = 1 member of the same truncated
/// family and distances are reported; atoms give unbounded ρ_K when λ > 0.
pub fn poisson_approximate(
    mu: &SphericalMeasure,
    n: usize,
    lambda: f64,
    t_list: &[f64],
    opts: &PoissonOptions,
) -> Result<Vec<PoissonPair>> {
    let lp = LambdaParam::new(lambda, n)?;
    if lp.branch != Branch::Normalized {
        return Err(Error::Domain(format!("smoothing needs the normalized branch (λ = {lambda})")));
    }
    if !(lambda < n as f64) {
        return Err(Error::Domain(format!("λ must be below n (λ = {lambda})")));
    }
    for &t in t_list {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::Domain(format!("Poisson parameter must lie in [0, 1) (t = {t})")));
        }
    }
    mu.validate(n, opts.check_resolution)?;
    let alpha = 1.0 - lambda;
    let s_inv = 1.0 / lp.s;
    let c = c_lambda_n(lambda, n);
    let check = opts.check_resolution;
    let grid = product_quadrature_even(n, check)?;
    let pts: Vec<&[f64]> = grid.nodes.chunks_exact(n).collect();

    // builds (ρ_{K_t}^λ, ρ_{L_t}^{n−λ}) as functions
    let build = |t: f64| -> Result<(RadialFn, RadialFn)> {
        match mu {
            SphericalMeasure::Atoms(list) => {
                let kc = zonal_kernel(n, t, &|j| cosine_multiplier(j, alpha, n), opts.atom_degree_cap)?;
                let lc = zonal_kernel(n, t, &|_| Ok(1.0), opts.atom_degree_cap)?;
                let (l1, l2) = (list.clone(), list.clone());
                let hk: RadialFn = Arc::new(move |u: &[f64]| s_inv * atom_sum(&l1, &kc, n, u));
                let hl: RadialFn = Arc::new(move |u: &[f64]| c * atom_sum(&l2, &lc, n, u));
                Ok((hk, hl))
            }
            SphericalMeasure::Density(f) => {
                let rule = product_quadrature_even(n, opts.max_degree + 1)?;
                let vals = rule.values(|x| f(x));
                let p = MultiplierSpec::Poisson { t };
                let kf = MultiplierField::new(
                    &rule,
                    &vals,
                    &MultiplierSpec::Product(vec![p.clone(), MultiplierSpec::Cosine { alpha }]),
                    opts.max_degree,
                )?;
                let lf = MultiplierField::new(&rule, &vals, &p, opts.max_degree)?;
                let hk: RadialFn = Arc::new(move |u: &[f64]| s_inv * kf.eval(u));
                let hl: RadialFn = Arc::new(move |u: &[f64]| c * lf.eval(u));
                Ok((hk, hl))
            }
        }
    };
    let reference: Option<Vec<f64>> = match mu {
        SphericalMeasure::Density(_) => {
            let (hk, _) = build(1.0)?;
            Some(pts.iter().map(|u| hk(u).powf(1.0 / lambda)).collect())
        }
        SphericalMeasure::Atoms(_) => None,
    };
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let (hk, hl) = build(t)?;
        let k = body_from_power(n, "poisson_k", Symmetry::Generic, lambda, hk, check)?;
        let l = body_from_power(n, "poisson_l", Symmetry::Generic, n as f64 - lambda, hl, check)?;
        let distance = reference
            .as_ref()
            .map(|r| pts.iter().zip(r).map(|(u, v)| (k.radial(u) - v).abs()).fold(0.0, f64::max));
        out.push(PoissonPair { t, k, l, distance });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ib::ib_ball_radius;
    use crate::sphere::{random_unit_vector, rng_for};

    #[test]
    fn uniform_measure_gives_fixed_ball() {
        let (n, lam) = (3usize, 0.5);
        let pairs = poisson_approximate(&SphericalMeasure::uniform(), n, lam, &[0.3, 0.8], &PoissonOptions::default())
            .unwrap();
        // µ = c_{λ,n}^{−1}ρ_L^{n−λ} with L the unit ball
        let r = ib_ball_radius(n, lam).unwrap() * c_lambda_n(lam, n).powf(1.0 / lam);
        let mut rng = rng_for(5, 0);
        for p in &pairs {
            assert!(p.distance.unwrap() < 1e-12);
            for _ in 0..4 {
                let u = random_unit_vector(n, &mut rng);
                assert!((p.k.radial(&u) - r).abs() < 1e-12 * r);
                let rl = c_lambda_n(lam, n).powf(1.0 / (n as f64 - lam));
                assert!((p.l.radial(&u) - rl).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn atoms_match_poisson_kernel() {
        // Π_t of a symmetrized atom is the even part of the Poisson kernel
        let n = 3;
        let a = normalize(&[1.0, 2.0, -0.5]);
        let mu = SphericalMeasure::atoms(vec![(a.clone(), 1.0)]).unwrap();
        let lam = 0.5;
        let t = 0.6;
        let pair = &poisson_approximate(&mu, n, lam, &[t], &PoissonOptions::default()).unwrap()[0];
        let u = normalize(&[0.3, -0.1, 0.9]);
        let c = dot(&a, &u);
        let pk = 0.5 * (crate::harmonic::poisson_kernel(n, t, c) + crate::harmonic::poisson_kernel(n, t, -c));
        let want = (c_lambda_n(lam, n) * pk).powf(1.0 / (n as f64 - lam));
        assert!((pair.l.radial(&u) - want).abs() < 1e-12 * want);
    }
}
