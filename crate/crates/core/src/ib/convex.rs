//! Convex bodies for n−3 ≤ λ < n: the criterion s_λM^{1+λ−n}ρ_K^λ is
//! evaluated twice, by multipliers and by the analytically continued
//! integral of the parallel-section function A_{K,u}(t) = vol_{n−1}(K ∩ {x·u = t}).

use super::classify::{classify, default_rule, ClassificationReport, ClassifyOptions};
use super::lambda::LambdaParam;
use crate::error::{Error, Result};
use crate::harmonic::{cosine_multiplier, ProjectionTable};
use crate::special::gamma::{gamma, rgamma};
use crate::special::quad::gauss_legendre;
use crate::sphere::{normalize, product_quadrature, random_unit_vector, rng_for, ParallelSections, StarBody};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct ConvexOptions {
    pub classify: ClassifyOptions,
    /// Random directions added to e_1 and the main diagonal.
    pub random_directions: usize,
    pub seed: u64,
    /// Resolution of the rule on S^{n−2} used for slice volumes.
    pub slice_resolution: usize,
    /// Gauss–Legendre nodes per piece of the t-integral.
    pub nodes: usize,
    /// Relative agreement demanded between the two routes.
    pub agreement: f64,
    /// Midpoint-convexity defect above which a warning is attached.
    pub convexity_slack: f64,
}

impl Default for ConvexOptions {
    fn default() -> Self {
        ConvexOptions {
            classify: ClassifyOptions::default(),
            random_directions: 3,
            seed: 0,
            slice_resolution: 16,
            nodes: 24,
            agreement: 1e-4,
            convexity_slack: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationPoint {
    pub u: Vec<f64>,
    /// Truncated multiplier series at t = 1.
    pub multiplier: f64,
    /// Continued integral of A_{K,u}.
    pub continuation: f64,
    pub width: f64,
    pub a0: f64,
    /// A''_{K,u}(0) by Richardson-extrapolated second differences.
    pub a2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexRangeReport {
    pub report: ClassificationReport,
    pub alpha: f64,
    pub trace: Vec<ContinuationPoint>,
    /// max |multiplier − continuation| / max |continuation|.
    pub max_rel_diff: f64,
    pub routes_agree: bool,
    pub min_continuation: f64,
    /// min_continuation ≥ −rel_floor · max |continuation|.
    pub continuation_nonnegative: bool,
    pub convexity_defect: f64,
    pub convexity_warning: Option<String>,
}

/// (α+n−1)Γ((1−α)/2)/(π^{(n−1)/2}Γ(α/2)), the factor in front of ∫_0^∞ t^{α−1}A(t)dt.
fn prefactor(n: usize, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    Ok((alpha + nf - 1.0) * gamma(0.5 * (1.0 - alpha))? * rgamma(0.5 * alpha) / PI.powf(0.5 * (nf - 1.0)))
}

/// Value of M^αρ_K^{α+n−1}(u) for α ∈ [−2, 1) from slices orthogonal to u.
pub fn continued_section_integral(
    body: &StarBody,
    u: &[f64],
    alpha: f64,
    slice_resolution: usize,
    nodes: usize,
) -> Result<ContinuationPoint> {
    let n = body.dim;
    if !(-2.0 - 1e-12..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("continuation implemented for −2 ≤ α < 1 (α = {alpha})")));
    }
    let u = normalize(u);
    let ps = ParallelSections::new(body, &u, product_quadrature(n - 1, slice_resolution)?)?;
    let w = ps.width();
    let a0 = ps.at(0.0)?;
    let h = 0.02 * w;
    let (a1, a2h) = (ps.at(h)?, ps.at(2.0 * h)?);
    // A(t) = A0 + a t² + b t⁴ + …
    let (d1, d2) = (a1 - a0, a2h - a0);
    let a2 = 2.0 * (16.0 * d1 - d2) / (12.0 * h * h);
    let b4 = (d2 - 4.0 * d1) / (12.0 * h.powi(4));
    let gl = gauss_legendre(nodes, 0.0, 1.0);
    let nf = n as f64;
    // ∫_{w/2}^{w} t^{α−1} g(t) dt with t = w − (w/2)s², smooth at the far end
    let upper = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let mut acc = 0.0;
        for (&s, &wt) in gl.nodes.iter().zip(&gl.weights) {
            let t = w - 0.5 * w * s * s;
            acc += wt * t.powf(alpha - 1.0) * g(t)? * w * s;
        }
        Ok(acc)
    };
    let value = if alpha.abs() < 1e-12 {
        (nf - 1.0) * a0 / (2.0 * PI.powf(0.5 * (nf - 2.0)))
    } else if (alpha + 2.0).abs() < 1e-12 {
        -(nf - 3.0) * PI.sqrt() / (8.0 * PI.powf(0.5 * (nf - 1.0))) * a2
    } else if alpha > 0.0 {
        // lower half with t = (w/2)v^{1/α}
        let half = 0.5 * w;
        let mut lower = 0.0;
        for (&v, &wt) in gl.nodes.iter().zip(&gl.weights) {
            lower += wt * ps.at(half * v.powf(1.0 / alpha))?;
        }
        lower *= half.powf(alpha) / alpha;
        prefactor(n, alpha)? * (lower + upper(&|t| ps.at(t))?)
    } else {
        // −2 < α < 0: ∫_0^w t^{α−1}[A(t) − A(0)]dt + A(0)w^α/α
        let t0 = 0.5 * h;
        let taylor = 0.5 * a2 * t0.powf(alpha + 2.0) / (alpha + 2.0) + b4 * t0.powf(alpha + 4.0) / (alpha + 4.0);
        // [t0, w/2] in y = ln t
        let (y0, y1) = (t0.ln(), (0.5 * w).ln());
        let gy = gauss_legendre(nodes, y0, y1);
        let mut mid = 0.0;
        for (&y, &wt) in gy.nodes.iter().zip(&gy.weights) {
            let t = y.exp();
            mid += wt * t.powf(alpha) * (ps.at(t)? - a0);
        }
        let up = upper(&|t| Ok(ps.at(t)? - a0))?;
        prefactor(n, alpha)? * (taylor + mid + up + a0 * w.powf(alpha) / alpha)
    };
    Ok(ContinuationPoint { u, multiplier: f64::NAN, continuation: value, width: w, a0, a2 })
}

/// Both routes at e_1, the diagonal and random directions, plus the classifier.
pub fn convex_range_check(body: &StarBody, lambda: f64, opts: &ConvexOptions) -> Result<ConvexRangeReport> {
    let n = body.dim;
    let nf = n as f64;
    if !(nf - 3.0 - 1e-12 <= lambda && lambda < nf && lambda > 0.0) {
        return Err(Error::Domain(format!("needs n−3 ≤ λ < n and λ > 0 (λ = {lambda}, n = {n})")));
    }
    let lp = LambdaParam::new(lambda, n)?;
    let alpha = lp.criterion_alpha();
    let defect = body.midpoint_convexity_defect(400, opts.seed);
    let convexity_warning = (defect > opts.convexity_slack)
        .then(|| format!("midpoint convexity defect {defect:.3e}: the body does not look convex"));

    let mut dirs = vec![crate::sphere::unit_vector(n, 0), normalize(&vec![1.0; n])];
    let mut rng = rng_for(opts.seed, 41);
    dirs.extend((0..opts.random_directions).map(|_| random_unit_vector(n, &mut rng)));

    let jmax = opts.classify.max_degree - opts.classify.max_degree % 2;
    let rule = default_rule(body, jmax, opts.classify.resolution)?;
    let field: Vec<f64> = rule.values(|x| body.radial(x).powf(lambda));
    let table = ProjectionTable::compute(&rule, &[&field], jmax, &dirs)?;
    let m: Vec<f64> = (0..=jmax).map(|j| cosine_multiplier(j, alpha, n).map(|v| lp.s * v)).collect::<Result<_>>()?;
    let series = table.apply_table(0, &m);

    let mut trace = Vec::with_capacity(dirs.len());
    for (u, mv) in dirs.iter().zip(series) {
        let mut p = match continued_section_integral(body, u, alpha, opts.slice_resolution, opts.nodes) {
            Ok(p) => p,
            // slices of a non-convex body may not be star-shaped about their centre
            Err(_) if convexity_warning.is_some() => ContinuationPoint {
                u: u.clone(),
                multiplier: f64::NAN,
                continuation: f64::NAN,
                width: f64::NAN,
                a0: f64::NAN,
                a2: f64::NAN,
            },
            Err(e) => return Err(e),
        };
        p.multiplier = mv;
        trace.push(p);
    }
    let scale = trace.iter().fold(0.0f64, |a, p| a.max(p.continuation.abs()));
    let max_rel_diff = trace.iter().fold(0.0f64, |a, p| a.max((p.multiplier - p.continuation).abs())) / scale;
    let min_continuation = trace.iter().fold(f64::INFINITY, |a, p| a.min(p.continuation));
    let report = classify(body, lambda, &opts.classify)?;
    Ok(ConvexRangeReport {
        report,
        alpha,
        routes_agree: max_rel_diff <= opts.agreement,
        trace,
        max_rel_diff,
        min_continuation,
        continuation_nonnegative: min_continuation >= -opts.classify.rel_floor * scale,
        convexity_defect: defect,
        convexity_warning,
    })
}
