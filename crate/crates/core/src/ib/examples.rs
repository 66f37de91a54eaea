//! Standard families of λ-intersection bodies, each returned with the
//! classifier's verdict as a certificate.

use super::classify::{classify, ClassificationReport, ClassifyOptions, Verdict};
use super::construct::body_from_power;
use super::lambda::LambdaParam;
use super::measure::SphericalMeasure;
use crate::error::{Error, Result};
use crate::harmonic::{MultiplierField, MultiplierSpec};
use crate::special::gamma_ni_alpha;
use crate::sphere::body::RadialFn;
use crate::sphere::{dot, product_quadrature_even, StarBody, SubspaceFrame, Symmetry};
use crate::transforms::{raw_cosine_transform, Budget};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum ExampleKind {
    /// ρ_K^λ(u) = ∫|θ·u|^{−λ}dµ(θ), λ < 1, λ ≠ 0.
    CosineMeasure { mu: SphericalMeasure, n: usize, lambda: f64 },
    /// ρ_K^λ = γ_{n,n−i}(i−λ) Σ_a ν_a |Pr_{ξ_a^⊥}θ|^{−λ} for ξ_a ∈ G_{n,n−i}.
    GrassmannDual { frames: Vec<(SubspaceFrame, f64)>, i: usize, lambda: f64 },
    /// ρ_K^λ = M^{i−λ}µ with (i−1)/2 < λ ≤ i < n.
    CosinePower { mu: SphericalMeasure, n: usize, i: usize, lambda: f64 },
    /// ρ_K = ρ_L^{λ/δ} for L certified at δ < λ.
    Power { l: StarBody, delta: f64, lambda: f64 },
}

impl ExampleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleKind::CosineMeasure { .. } => "cosine_measure",
            ExampleKind::GrassmannDual { .. } => "grassmann_dual",
            ExampleKind::CosinePower { .. } => "cosine_power",
            ExampleKind::Power { .. } => "power",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleCertificate {
    pub kind: String,
    pub lambda: f64,
    /// The radial function is unbounded (it blows up on a null set).
    pub unbounded: bool,
    pub report: ClassificationReport,
    /// Certificate of L at δ, for the power construction.
    pub base_report: Option<ClassificationReport>,
}

#[derive(Debug, Clone)]
pub struct GeneratedExample {
    pub body: StarBody,
    pub certificate: ExampleCertificate,
}

impl GeneratedExample {
    pub fn certified(&self) -> bool {
        self.certificate.report.verdict == Verdict::Member
    }
}

#[derive(Debug, Clone)]
pub struct ExampleOptions {
    pub classify: ClassifyOptions,
    pub budget: Budget,
    /// Resolution of the rule carrying densities through multipliers.
    pub resolution: usize,
    pub check_resolution: usize,
}

impl Default for ExampleOptions {
    fn default() -> Self {
        ExampleOptions {
            classify: ClassifyOptions::default(),
            budget: Budget::default(),
            resolution: 13,
            check_resolution: 8,
        }
    }
}

fn check_lambda(lambda: f64, n: usize) -> Result<()> {
    LambdaParam::new(lambda, n).map(|_| ())
}

pub fn generate_example(kind: &ExampleKind, opts: &ExampleOptions) -> Result<GeneratedExample> {
    let mut base_report = None;
    let mut unbounded = false;
    let (body, lambda) = match kind {
        ExampleKind::CosineMeasure { mu, n, lambda } => {
            let (n, lam) = (*n, *lambda);
            if !(lam < 1.0) || lam == 0.0 {
                return Err(Error::Domain(format!("needs λ < 1, λ ≠ 0 (λ = {lam})")));
            }
            check_lambda(lam, n)?;
            mu.validate(n, opts.check_resolution)?;
            let h: RadialFn = match mu {
                SphericalMeasure::Density(f) => {
                    let f = f.clone();
                    let budget = opts.budget;
                    Arc::new(move |u: &[f64]| raw_cosine_transform(&|x| f(x), u, 1.0 - lam, budget).unwrap_or(f64::NAN))
                }
                SphericalMeasure::Atoms(list) => {
                    if lam > 0.0 {
                        return Err(Error::Construction(
                            "atoms give a radial function that is infinite on great subspheres for λ > 0; use a density"
                                .into(),
                        ));
                    }
                    let list = list.clone();
                    Arc::new(move |u: &[f64]| list.iter().map(|(a, m)| m * dot(a, u).abs().powf(-lam)).sum())
                }
            };
            (body_from_power(n, "cosine_measure", Symmetry::Generic, lam, h, opts.check_resolution)?, lam)
        }
        ExampleKind::GrassmannDual { frames, i, lambda } => {
            let (i, lam) = (*i, *lambda);
            let n = frames.first().map(|f| f.0.dim).ok_or_else(|| Error::Invalid("no frames given".into()))?;
            if !(0.0 < lam && lam < i as f64 && i < n) {
                return Err(Error::Domain(format!(
                    "needs 0 < λ < i < n (λ = {lam}, i = {i}, n = {n}); at λ = i the kernel is a singular measure"
                )));
            }
            check_lambda(lam, n)?;
            let mut perps = Vec::with_capacity(frames.len());
            for (xi, m) in frames {
                if xi.dim != n || xi.k() != n - i {
                    return Err(Error::Invalid(format!("frames must be (n−i)-dimensional in R^{n}")));
                }
                if !(*m >= 0.0) {
                    return Err(Error::Invalid(format!("masses must be non-negative (m = {m})")));
                }
                perps.push((xi.complement(), *m));
            }
            let g = gamma_ni_alpha(n, n - i, i as f64 - lam)?.value;
            let h: RadialFn = Arc::new(move |th: &[f64]| {
                g * perps.iter().map(|(p, m)| m * crate::sphere::norm(&p.coords(th)).powf(-lam)).sum::<f64>()
            });
            unbounded = true;
            (body_from_power(n, "grassmann_dual", Symmetry::Generic, lam, h, opts.check_resolution)?, lam)
        }
        ExampleKind::CosinePower { mu, n, i, lambda } => {
            let (n, i, lam) = (*n, *i, *lambda);
            if !(0.5 * (i as f64 - 1.0) < lam && lam <= i as f64 && i < n && i >= 1) {
                return Err(Error::Domain(format!("needs (i−1)/2 < λ ≤ i < n (λ = {lam}, i = {i}, n = {n})")));
            }
            check_lambda(lam, n)?;
            mu.validate(n, opts.check_resolution)?;
            let spec = MultiplierSpec::Cosine { alpha: i as f64 - lam };
            let jmax = opts.resolution.saturating_sub(1) & !1;
            let h: RadialFn = match mu {
                SphericalMeasure::Density(f) => {
                    let rule = product_quadrature_even(n, opts.resolution)?;
                    let vals = rule.values(|x| f(x));
                    let field = MultiplierField::new(&rule, &vals, &spec, jmax)?;
                    Arc::new(move |u: &[f64]| field.eval(u))
                }
                SphericalMeasure::Atoms(_) => {
                    return Err(Error::Construction("this family is built from densities only".into()));
                }
            };
            (body_from_power(n, "cosine_power", Symmetry::Generic, lam, h, opts.check_resolution)?, lam)
        }
        ExampleKind::Power { l, delta, lambda } => {
            let (d, lam) = (*delta, *lambda);
            let n = l.dim;
            if !(0.0 < d && d < lam && lam < n as f64) {
                return Err(Error::Domain(format!("needs 0 < δ < λ < n (δ = {d}, λ = {lam})")));
            }
            let r = classify(l, d, &opts.classify)?;
            if r.verdict != Verdict::Member {
                return Err(Error::Construction(format!(
                    "L is not certified at δ = {d} (verdict {})",
                    r.verdict.as_str()
                )));
            }
            base_report = Some(r);
            (l.powered(lam / d), lam)
        }
    };
    let report = classify(&body, lambda, &opts.classify)?;
    Ok(GeneratedExample {
        body,
        certificate: ExampleCertificate { kind: kind.name().into(), lambda, unbounded, report, base_report },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma::gamma;

    #[test]
    fn uniform_measure_gives_ball() {
        let (n, lam) = (3usize, 0.4);
        let opts = ExampleOptions { classify: ClassifyOptions { max_degree: 8, ..Default::default() }, ..Default::default() };
        let kind = ExampleKind::CosineMeasure { mu: SphericalMeasure::uniform(), n, lambda: lam };
        let ex = generate_example(&kind, &opts).unwrap();
        // E|θ_1|^{−λ} = Γ(n/2)Γ((1−λ)/2)/(√π Γ((n−λ)/2))
        let nf = n as f64;
        let m = gamma(nf / 2.0).unwrap() * gamma((1.0 - lam) / 2.0).unwrap()
            / (gamma(0.5).unwrap() * gamma((nf - lam) / 2.0).unwrap());
        let r = m.powf(1.0 / lam);
        for u in [[1.0, 0.0, 0.0], [0.6, 0.0, 0.8], [0.48, 0.6, 0.64]] {
            assert!((ex.body.radial(&u) - r).abs() < 1e-10 * r);
        }
        assert!(ex.certified());
    }

    #[test]
    fn domain_checks() {
        let opts = ExampleOptions::default();
        let k = ExampleKind::CosineMeasure { mu: SphericalMeasure::uniform(), n: 3, lambda: 1.5 };
        assert!(generate_example(&k, &opts).is_err());
        let k = ExampleKind::CosinePower { mu: SphericalMeasure::uniform(), n: 4, i: 3, lambda: 0.5 };
        assert!(generate_example(&k, &opts).is_err());
    }
}
