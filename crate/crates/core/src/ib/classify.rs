use super::lambda::{Branch, LambdaParam};
use crate::error::{Error, Result};
use crate::harmonic::{cosine_multiplier, ProjectionTable};
use crate::sphere::body::BodyKind;
use crate::sphere::{
    normalize, orthant_quadrature, product_quadrature_even, unit_vector, QuadratureRule, RuleKind, StarBody, Symmetry,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::NonMember => "non_member",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Result of one smoothing level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingLevel {
    pub t: f64,
    pub min: f64,
    pub tol: f64,
    /// Estimated truncation tail; infinite when the coefficients do not decay.
    pub tail: f64,
    pub decay_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub body: String,
    pub n: usize,
    pub lambda: f64,
    pub branch: Branch,
    pub verdict: Verdict,
    pub min_value: f64,
    pub tolerance: f64,
    pub scale: f64,
    pub witness: Vec<f64>,
    pub levels: Vec<SmoothingLevel>,
    pub max_degree: usize,
    pub rule_kind: String,
    pub rule_nodes: usize,
    pub outputs: usize,
    pub note: String,
}

/// Numerical policy of the classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub max_degree: usize,
    /// Rule resolution; chosen from the body when absent.
    pub resolution: Option<usize>,
    /// Poisson radii; the smoothed function Π_t g is non-negative for every
    /// t < 1 exactly when g is a non-negative measure.
    pub t_values: Vec<f64>,
    /// Relative floor of the tolerance.
    pub rel_floor: f64,
    /// Multiplier applied to the geometric tail estimate.
    pub tail_safety: f64,
    /// Points per meridian for zonal and bizonal bodies.
    pub meridian_points: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            max_degree: 24,
            resolution: None,
            t_values: vec![1.0, 0.95, 0.9, 0.8, 0.7],
            rel_floor: 1e-7,
            tail_safety: 3.5,
            meridian_points: 181,
        }
    }
}

fn has_coordinate_kinks(body: &StarBody) -> bool {
    match &body.kind {
        BodyKind::Lq { q } | BodyKind::Ql { q, .. } => *q < 2.0,
        BodyKind::Perturbed { base, .. } => has_coordinate_kinks(base),
        _ => false,
    }
}

/// Orthant panels for bodies with kinks on coordinate hyperplanes, the even
/// product rule otherwise; the resolution is the smallest that resolves 2J.
pub fn default_rule(body: &StarBody, max_degree: usize, resolution: Option<usize>) -> Result<QuadratureRule> {
    let n = body.dim;
    if has_coordinate_kinks(body) {
        let r = resolution.unwrap_or((2 * max_degree + 48).div_ceil(4));
        orthant_quadrature(n, r, true)
    } else {
        product_quadrature_even(n, resolution.unwrap_or(max_degree + 1))
    }
}

/// Directions where the tested function is evaluated: one meridian for
/// zonal and bizonal bodies, a Weyl chamber for coordinate-symmetric ones.
pub fn output_directions(body: &StarBody, rule: &QuadratureRule, meridian_points: usize) -> Vec<Vec<f64>> {
    let n = body.dim;
    let meridian = |a: &[f64], b: &[f64]| -> Vec<Vec<f64>> {
        (0..meridian_points)
            .map(|k| {
                let phi = 0.5 * std::f64::consts::PI * k as f64 / (meridian_points - 1).max(1) as f64;
                normalize(&a.iter().zip(b).map(|(x, y)| phi.cos() * x + phi.sin() * y).collect::<Vec<_>>())
            })
            .collect()
    };
    match &body.symmetry {
        Symmetry::Zonal(axis) => {
            let a = normalize(axis);
            let k = (0..n).min_by(|&i, &j| a[i].abs().partial_cmp(&a[j].abs()).unwrap()).unwrap();
            let e = unit_vector(n, k);
            let c = crate::sphere::dot(&a, &e);
            let w = normalize(&e.iter().zip(&a).map(|(x, y)| x - c * y).collect::<Vec<_>>());
            meridian(&a, &w)
        }
        Symmetry::Bizonal(_) => meridian(&unit_vector(n, 0), &unit_vector(n, n - 1)),
        Symmetry::Coordinate => chamber_points(n, chamber_levels(n)),
        Symmetry::Generic => {
            if rule.len() <= 20_000 {
                rule.nodes.chunks_exact(n).map(|x| x.to_vec()).collect()
            } else {
                let r = product_quadrature_even(n, 12).expect("valid resolution");
                r.nodes.chunks_exact(n).map(|x| x.to_vec()).collect()
            }
        }
    }
}

/// Directions of the chamber x₁ ≥ … ≥ x_n ≥ 0: every non-increasing integer
/// vector with entries at most `levels`, normalized and deduplicated.
pub fn chamber_points(n: usize, levels: usize) -> Vec<Vec<f64>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, cap: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=cap {
            prefix.push(a);
            rec(prefix, n, a, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(&mut Vec::new(), n, levels, &mut raw);
    let mut pts: Vec<Vec<f64>> = raw
        .into_iter()
        .filter(|v| v[0] > 0)
        .map(|v| normalize(&v.iter().map(|&a| a as f64).collect::<Vec<_>>()))
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
    pts
}

/// Grid size giving roughly a thousand chamber points.
pub fn chamber_levels(n: usize) -> usize {
    match n {
        0..=2 => 400,
        3 => 40,
        4 => 14,
        5 => 8,
        6 => 6,
        _ => 4,
    }
}

/// Geometric tail bound Σ_{j>J} D_j ≈ A ρ/(1−ρ), where A is the larger of
/// the last two maxima and ρ the per-step decay between the last two pairs.
/// Pairs are compared because symmetric bodies skip alternate degrees.
fn tail_estimate(maxima: &[(usize, f64)]) -> (f64, f64) {
    let k = maxima.len();
    if k < 4 {
        return (f64::INFINITY, 1.0);
    }
    let a = maxima[k - 1].1.max(maxima[k - 2].1);
    let b = maxima[k - 3].1.max(maxima[k - 4].1);
    let top = maxima.iter().fold(0.0f64, |m, x| m.max(x.1));
    // rounding-level coefficients: the expansion has terminated
    if a <= 1e-13 * top {
        return (a, 0.0);
    }
    let ratio = if b > 0.0 { (a / b).sqrt() } else { f64::INFINITY };
    if ratio >= 0.9 {
        return (f64::INFINITY, ratio);
    }
    (a * ratio / (1.0 - ratio), ratio)
}

/// Function values s_λ Σ_j t^j m_j p_j(u) at every output, their maxima per
/// degree and the resulting tail bound.
struct Smoothed {
    values: Vec<f64>,
    tail: f64,
    ratio: f64,
}

fn smoothed(table: &ProjectionTable, field: usize, base: &[f64], t: f64) -> Smoothed {
    let m: Vec<f64> = base.iter().enumerate().map(|(j, b)| b * t.powi(j as i32)).collect();
    let values = table.apply_table(field, &m);
    let (tail, ratio) = tail_estimate(&table.degree_maxima(field, &m));
    Smoothed { values, tail, ratio }
}

/// Decides membership from the smoothed minima of the resolved levels (finite
/// tolerance). Non-member needs one level below −3·tol. Member needs a
/// resolved level with t ≥ 0.7 and every resolved level above −tol/3, so a
/// negative minimum counts only at noise level.
fn decide(levels: &[SmoothingLevel]) -> Verdict {
    let resolved: Vec<&SmoothingLevel> = levels.iter().filter(|l| l.tol.is_finite()).collect();
    if resolved.iter().any(|l| l.min < -3.0 * l.tol) {
        Verdict::NonMember
    } else if resolved.iter().any(|l| l.t >= 0.7) && resolved.iter().all(|l| l.min >= -l.tol / 3.0) {
        Verdict::Member
    } else {
        Verdict::Inconclusive
    }
}

/// Tests s_λ M^{1+λ−n} ρ_K^λ ≥ 0 through Poisson-smoothed truncated
/// expansions at the given rule and outputs. All λ share one projection pass.
pub fn classify_with(
    body: &StarBody,
    lambdas: &[LambdaParam],
    rule: &QuadratureRule,
    outputs: &[Vec<f64>],
    opts: &ClassifyOptions,
) -> Result<Vec<ClassificationReport>> {
    for lp in lambdas {
        if lp.n != body.dim {
            return Err(Error::Invalid("λ parameter built for another dimension".into()));
        }
        if lp.branch == Branch::RawEvenNegative {
            return Err(Error::Invalid("λ ∈ {−2, −4, …} uses the least-squares route (classify_negative)".into()));
        }
    }
    if outputs.is_empty() {
        return Err(Error::Invalid("no output directions".into()));
    }
    let jmax = opts.max_degree - opts.max_degree % 2;
    let radial = rule.values(|x| body.radial(x));
    let fields: Vec<Vec<f64>> = lambdas.iter().map(|lp| radial.iter().map(|r| r.powf(lp.value)).collect()).collect();
    let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
    let table = ProjectionTable::compute(rule, &refs, jmax, outputs)?;
    lambdas
        .iter()
        .enumerate()
        .map(|(field, lp)| report_for_field(body, *lp, &table, field, rule, opts))
        .collect()
}

fn report_for_field(
    body: &StarBody,
    lp: LambdaParam,
    table: &ProjectionTable,
    field: usize,
    rule: &QuadratureRule,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    let n = body.dim;
    let jmax = table.max_degree;
    let alpha = lp.criterion_alpha();
    let base: Vec<f64> =
        (0..=jmax).map(|j| cosine_multiplier(j, alpha, n).map(|m| lp.s * m)).collect::<Result<_>>()?;
    let all: Vec<(f64, Smoothed)> = opts.t_values.iter().map(|&t| (t, smoothed(table, field, &base, t))).collect();
    let scale = all.iter().flat_map(|(_, s)| s.values.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
    let mut levels = Vec::new();
    // the level with the most negative min/tol supplies the witness
    let mut pick: Option<(f64, usize, f64, f64)> = None;
    for (t, s) in &all {
        let (iu, mn) = s
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) });
        let tol = (opts.rel_floor * scale).max(opts.tail_safety * s.tail);
        levels.push(SmoothingLevel { t: *t, min: mn, tol, tail: s.tail, decay_ratio: s.ratio });
        let score = if tol.is_finite() { mn / tol } else { f64::INFINITY };
        if pick.map_or(true, |p| score < p.0) {
            pick = Some((score, iu, mn, tol));
        }
    }
    let (_, iu, min_value, tolerance) = pick.ok_or_else(|| Error::Invalid("no Poisson radii given".into()))?;
    let verdict = decide(&levels);
    let note = match verdict {
        Verdict::Member => "member (density certificate on the smoothed truncation)",
        Verdict::NonMember => "non_member (sign witness)",
        Verdict::Inconclusive => "inconclusive (minimum within the tolerance band)",
    };
    Ok(ClassificationReport {
        body: body.kind_name().to_string(),
        n,
        lambda: lp.value,
        branch: lp.branch,
        verdict,
        min_value,
        tolerance,
        scale,
        witness: table.outputs[iu].clone(),
        levels,
        max_degree: jmax,
        rule_kind: rule_kind_name(rule.kind).to_string(),
        rule_nodes: rule.len(),
        outputs: table.outputs.len(),
        note: note.to_string(),
    })
}

pub fn rule_kind_name(kind: RuleKind) -> &'static str {
    match kind {
        RuleKind::Product => "product",
        RuleKind::Orthant => "orthant",
        RuleKind::Embedded => "embedded",
    }
}

/// Classifies K at several λ with the default rule and output set.
pub fn classify_many(body: &StarBody, lambdas: &[f64], opts: &ClassifyOptions) -> Result<Vec<ClassificationReport>> {
    let lps: Vec<LambdaParam> = lambdas.iter().map(|&l| LambdaParam::new(l, body.dim)).collect::<Result<_>>()?;
    let rule = default_rule(body, opts.max_degree, opts.resolution)?;
    let outputs = output_directions(body, &rule, opts.meridian_points);
    classify_with(body, &lps, &rule, &outputs, opts)
}

/// Classifies K at λ with the default rule and output set.
pub fn classify(body: &StarBody, lambda: f64, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    Ok(classify_many(body, &[lambda], opts)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_is_member() {
        for lam in [0.5, 1.5, 2.5] {
            let r = classify(&StarBody::ball(4), lam, &ClassifyOptions { max_degree: 8, ..Default::default() }).unwrap();
            assert_eq!(r.verdict, Verdict::Member);
            assert!(r.min_value > 0.0);
        }
    }

    #[test]
    fn chamber_points_are_sorted_and_unique() {
        let pts = chamber_points(3, 4);
        for p in &pts {
            assert!(p.windows(2).all(|w| w[0] >= w[1]) && p[2] >= 0.0);
            assert!((crate::sphere::norm(p) - 1.0).abs() < 1e-14);
        }
        // (1,0,0), (1,1,0), (1,1,1) appear once each
        assert_eq!(pts.iter().filter(|p| p[1] == 0.0).count(), 1);
    }
}
