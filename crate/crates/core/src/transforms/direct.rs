use super::bispherical::{bispherical_mean, subsphere_mean, Budget, SphereFn};
use crate::error::{Error, Result};
use crate::special::gamma::log_gamma_ratio;
use crate::special::{gamma_n_alpha, gamma_ni_alpha, near_nonpositive_integer, sphere_area, AlphaParam};
use crate::sphere::SubspaceFrame;
use std::f64::consts::PI;

fn line(u: &[f64]) -> Result<SubspaceFrame> {
    SubspaceFrame::from_vectors(u.len(), &[u.to_vec()])
}

/// (Mf)(u): mean of f over the great subsphere u^⊥.
pub fn funk_transform(f: SphereFn, u: &[f64], res: usize) -> Result<f64> {
    radon_transform(f, &line(u)?.complement(), res)
}

/// (R_i f)(ξ): mean of f over S^{n−1} ∩ ξ.
pub fn radon_transform(f: SphereFn, xi: &SubspaceFrame, res: usize) -> Result<f64> {
    subsphere_mean(f, xi, res)
}

/// Unnormalized cosine transform ∫ f(θ)|θ·u|^{α−1} dθ, α > 0.
pub fn raw_cosine_transform(f: SphereFn, u: &[f64], alpha: f64, budget: Budget) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Integrability(format!("direct quadrature needs α > 0 (α = {alpha})")));
    }
    let a = line(u)?;
    bispherical_mean(f, &a, &a.complement(), alpha - 1.0, 0.0, budget)
}

/// (M^α f)(u) = γ_n(α) ∫ f(θ)|θ·u|^{α−1} dθ by direct quadrature, α > 0.
pub fn cosine_transform(f: SphereFn, u: &[f64], alpha: f64, budget: Budget) -> Result<f64> {
    if AlphaParam::cosine(alpha).pole_flag {
        return Err(Error::Pole(format!("M^α is undefined at α = {alpha}")));
    }
    let g = gamma_n_alpha(u.len(), alpha)?;
    Ok(g.value * raw_cosine_transform(f, u, alpha, budget)?)
}

/// (R_i^α f)(ξ) = γ_{n,i}(α) ∫ |Pr_{ξ⊥}θ|^{α+i−n} f(θ) dθ, α > 0.
pub fn gen_cosine(f: SphereFn, xi: &SubspaceFrame, alpha: f64, budget: Budget) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Integrability(format!("direct quadrature needs α > 0 (α = {alpha})")));
    }
    let (n, i) = (xi.dim, xi.k());
    let g = gamma_ni_alpha(n, i, alpha)?;
    let perp = xi.complement();
    let m = bispherical_mean(f, &perp, xi, alpha + i as f64 - n as f64, 0.0, budget)?;
    Ok(g.value * m)
}

/// Constant of Q^α: σ_{n−1}Γ((n−1−α)/2)/(2π^{(n−1)/2}Γ(α/2)).
pub fn q_alpha_constant(n: usize, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    if near_nonpositive_integer(0.5 * (nf - 1.0 - alpha), 1e-9) {
        return Err(Error::Pole(format!("Q^α is undefined at α = {alpha} for n = {n}")));
    }
    let r = match log_gamma_ratio(&[0.5 * (nf - 1.0 - alpha)], &[0.5 * alpha])? {
        Some((l, s)) => s * l.exp(),
        None => 0.0,
    };
    Ok(sphere_area(n) * r / (2.0 * PI.powf(0.5 * (nf - 1.0))))
}

/// (Q^α f)(θ) = const · ∫ (1 − |u·θ|²)^{(α−n+1)/2} f(u) du, α > 0.
pub fn q_alpha(f: SphereFn, theta: &[f64], alpha: f64, budget: Budget) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Integrability(format!("direct quadrature needs α > 0 (α = {alpha})")));
    }
    let n = theta.len();
    let c = q_alpha_constant(n, alpha)?;
    let a = line(theta)?;
    Ok(c * bispherical_mean(f, &a, &a.complement(), 0.0, alpha - n as f64 + 1.0, budget)?)
}

/// c̃ = π^{(m−n)/2} σ_{n−m} / 2.
pub fn restriction_constant(n: usize, m: usize) -> f64 {
    PI.powf(0.5 * (m as f64 - n as f64)) * sphere_area(n - m + 1) / 2.0
}

/// (T_η^λ f)(u) = c̃ ∫_{S^{n−1}∩(η^⊥⊕Ru)} f(w)|u·w|^{m−λ−1} dw, u ∈ η, λ < m.
pub fn restriction_operator(f: SphereFn, eta: &SubspaceFrame, u: &[f64], lambda: f64, budget: Budget) -> Result<f64> {
    let (n, m) = (eta.dim, eta.k());
    if !(lambda < m as f64) {
        return Err(Error::Integrability(format!("T_η^λ needs λ < m (λ = {lambda}, m = {m})")));
    }
    if (crate::sphere::norm(&eta.project(u)) - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid("u must be a unit vector in η".into()));
    }
    let a = line(u)?;
    let b = eta.complement();
    let v = bispherical_mean(f, &a, &b, m as f64 - lambda - 1.0, 0.0, budget)?;
    Ok(restriction_constant(n, m) * v)
}
