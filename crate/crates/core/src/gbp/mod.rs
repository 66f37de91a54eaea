//! Generalized Busemann–Petty counterexamples. From a body B that is not an
//! (n−i)-intersection body, the body A with ρ_A^i = ρ_B^i − εM^{1−i}h has
//! smaller central i-sections than B but larger volume.

use crate::error::{Error, Result};
use crate::harmonic::{cosine_multiplier, expand_zonal, normalized_gegenbauer_all, MultiplierField, MultiplierSpec};
use crate::ib::{classify, default_rule, ClassificationReport, ClassifyOptions, LambdaParam, Verdict};
use crate::special::quad::gauss_legendre;
use crate::special::{harmonic_dimension, sphere_area};
use crate::sphere::{
    axial_quadrature, dot, normalize, product_quadrature, product_quadrature_even, random_completion,
    random_frame_with, random_unit_vector, rng_for, subsphere_quadrature, BodySpec, QuadratureRule, StarBody,
    SubspaceFrame, Symmetry,
};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// h(θ) = c(θ·w)^{2N} together with k = M^{1−i}h as a zonal series; c is
/// chosen so that max |k| = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapPerturbation {
    pub n: usize,
    pub i: usize,
    pub axis: Vec<f64>,
    pub power: usize,
    pub scale: f64,
    /// Coefficients of h in the basis C̃_j(θ·w).
    pub h_coeffs: Vec<f64>,
    pub k_coeffs: Vec<f64>,
}

impl CapPerturbation {
    pub fn new(n: usize, i: usize, axis: &[f64], power: usize) -> Result<Self> {
        if !(1 <= i && i < n) || axis.len() != n {
            return Err(Error::Domain(format!("needs 1 ≤ i < n and an axis in R^{n} (i = {i})")));
        }
        if power == 0 {
            return Err(Error::Domain("cap power must be positive".into()));
        }
        let deg = 2 * power;
        let h = expand_zonal(|t| t.powi(deg as i32), n, deg)?.coeffs;
        let alpha = 1.0 - i as f64;
        let m: Vec<f64> = (0..=deg).map(|j| cosine_multiplier(j, alpha, n)).collect::<Result<_>>()?;
        let k: Vec<f64> = h.iter().zip(&m).enumerate().map(|(j, (a, b))| if j % 2 == 0 { a * b } else { 0.0 }).collect();
        let mut cap = CapPerturbation { n, i, axis: normalize(axis), power, scale: 1.0, h_coeffs: h, k_coeffs: k };
        let top = (0..=4000).map(|s| cap.k_profile(s as f64 / 4000.0).abs()).fold(0.0, f64::max);
        if !(top > 0.0) || !top.is_finite() {
            return Err(Error::Construction("M^{1−i}h vanishes identically".into()));
        }
        cap.scale = 1.0 / top;
        cap.h_coeffs.iter_mut().for_each(|c| *c /= top);
        cap.k_coeffs.iter_mut().for_each(|c| *c /= top);
        Ok(cap)
    }

    pub fn h(&self, theta: &[f64]) -> f64 {
        self.scale * dot(theta, &self.axis).powi(2 * self.power as i32)
    }

    pub fn k_profile(&self, t: f64) -> f64 {
        let c = normalized_gegenbauer_all(self.n, self.k_coeffs.len() - 1, t.clamp(-1.0, 1.0));
        c.iter().zip(&self.k_coeffs).map(|(a, b)| a * b).sum()
    }

    /// (M^{1−i}h)(θ).
    pub fn k(&self, theta: &[f64]) -> f64 {
        self.k_profile(dot(theta, &self.axis))
    }
}

/// ρ_A = (ρ_B^i − εk)^{1/i}; NaN where the right side is not positive.
pub fn forged_body(b: &StarBody, cap: &CapPerturbation, eps: f64) -> StarBody {
    let n = cap.n;
    let (b, cap) = (b.clone(), cap.clone());
    let i = cap.i as i32;
    let inv = 1.0 / cap.i as f64;
    let f = Arc::new(move |th: &[f64]| {
        let v = b.radial(th).powi(i) - eps * cap.k(th);
        if v > 0.0 {
            v.powf(inv)
        } else {
            f64::NAN
        }
    });
    StarBody::custom(n, "gbp_forged", Symmetry::Generic, f)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForgeOptions {
    pub classify: ClassifyOptions,
    /// Candidate ε, in units where max |M^{1−i}h| = 1; the largest admissible one is used.
    pub eps_schedule: Vec<f64>,
    /// Demand a passed midpoint-convexity test from A.
    pub require_convex: bool,
    pub frames: usize,
    /// Extra frames through the witness direction.
    pub witness_frames: usize,
    pub seed: u64,
    /// Share of the mass of h that must lie in the cap inscribed in Ω.
    pub mass_inside: f64,
    pub max_power: usize,
    /// Geodesics from the witness along which the inradius of Ω is measured.
    pub inradius_directions: usize,
    pub convexity_samples: usize,
    /// Allowed excess vol_i(A∩ξ) − vol_i(B∩ξ).
    pub section_tolerance: f64,
    pub section_resolution: usize,
    pub volume_resolution: usize,
}

impl Default for ForgeOptions {
    fn default() -> Self {
        ForgeOptions {
            classify: ClassifyOptions::default(),
            eps_schedule: vec![0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
            require_convex: true,
            frames: 500,
            witness_frames: 20,
            seed: 0,
            mass_inside: 0.99,
            max_power: 120,
            inradius_directions: 12,
            convexity_samples: 4000,
            section_tolerance: 1e-6,
            section_resolution: 8,
            volume_resolution: 12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsilonTrial {
    pub eps: f64,
    /// min ρ_A^i over the volume grid.
    pub min_rho_i: f64,
    pub positive: bool,
    pub convexity_defect: f64,
    pub convex: bool,
    /// vol_n(A) − vol_n(B) at the coarse resolution; NaN when A does not exist.
    pub volume_gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameMargin {
    pub index: usize,
    /// "haar" or "witness".
    pub kind: String,
    pub vol_a: f64,
    pub vol_b: f64,
    /// vol_i(B∩ξ) − vol_i(A∩ξ).
    pub margin: f64,
    /// R_i M^{1−i}h(ξ) by quadrature.
    pub radon_k: f64,
    /// c R^0_{n−i,⊥}h(ξ), which it must equal.
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbpCertificate {
    pub n: usize,
    pub i: usize,
    pub body: BodySpec,
    pub seed: u64,
    pub classification: ClassificationReport,
    pub body_convexity_defect: f64,
    /// Ω = {φ < threshold}.
    pub omega_threshold: f64,
    pub witness: Vec<f64>,
    pub phi_at_witness: f64,
    pub inradius: f64,
    pub cap_power: usize,
    pub cap_scale: f64,
    pub cap_mass_inside: f64,
    pub epsilon: f64,
    pub trials: Vec<EpsilonTrial>,
    /// Volume gap increasing in ε over the admissible trials.
    pub eps_monotone: bool,
    pub frames: Vec<FrameMargin>,
    pub max_section_excess: f64,
    pub sections_hold: bool,
    /// max |radon_k − predicted|.
    pub mechanism_error: f64,
    /// ∫ρ_B^{n−i}(ρ_B^i − ρ_A^i)/ε on a product grid.
    pub pairing_grid: f64,
    /// (φ, h) from zonal coefficients and multipliers.
    pub pairing_multiplier: f64,
    pub pairing_rel_diff: f64,
    pub pairing_negative: bool,
    /// (ρ_B^{n−i}, ρ_B^i) and (ρ_B^{n−i}, ρ_A^i).
    pub holder_lhs: f64,
    pub holder_rhs: f64,
    pub holder_ok: bool,
    pub vol_a: f64,
    pub vol_b: f64,
    pub vol_gap: f64,
    pub vol_gap_error: f64,
    /// First-order prediction −(σ_{n−1}/i) ε (φ, h).
    pub predicted_gap: f64,
    pub volume_fails: bool,
    pub convexity_defect: f64,
    pub convexity_verified: bool,
    pub counterexample: bool,
    pub status: String,
    pub options: ForgeOptions,
}

#[derive(Debug, Clone)]
pub struct ForgedInstance {
    pub a: StarBody,
    pub b: StarBody,
    pub cap: CapPerturbation,
    pub certificate: GbpCertificate,
}

/// The point at geodesic distance d from w towards the unit vector p ⊥ w.
fn geodesic(w: &[f64], p: &[f64], d: f64) -> Vec<f64> {
    w.iter().zip(p).map(|(a, b)| a * d.cos() + b * d.sin()).collect()
}

fn orthogonal_direction<R: Rng>(w: &[f64], rng: &mut R) -> Vec<f64> {
    loop {
        let v = random_unit_vector(w.len(), rng);
        let c = dot(&v, w);
        let p: Vec<f64> = v.iter().zip(w).map(|(a, b)| a - c * b).collect();
        if crate::sphere::norm(&p) > 1e-6 {
            return normalize(&p);
        }
    }
}

/// Largest d such that φ < thr on the geodesic ball of radius d about w,
/// measured along the given directions.
fn inradius(phi: &dyn Fn(&[f64]) -> f64, w: &[f64], thr: f64, dirs: &[Vec<f64>]) -> f64 {
    let step = 0.05;
    let mut best = 0.5 * PI;
    for p in dirs {
        let mut lo = 0.0;
        let mut hi = f64::NAN;
        let mut d = step;
        while d <= 0.5 * PI + 1e-12 {
            if phi(&geodesic(w, p, d)) >= thr {
                hi = d;
                break;
            }
            lo = d;
            d += step;
        }
        if hi.is_nan() {
            continue;
        }
        for _ in 0..6 {
            let mid = 0.5 * (lo + hi);
            if phi(&geodesic(w, p, mid)) >= thr {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        best = best.min(lo);
    }
    best
}

/// Share of ∫(θ·w)^{2N} lying in the cap of geodesic radius r about ±w.
fn cap_mass_fraction(n: usize, power: usize, r: f64) -> f64 {
    let f = |d: f64| d.cos().powi(2 * power as i32) * d.sin().powi(n as i32 - 2);
    let inside = gauss_legendre(200, 0.0, r.min(0.5 * PI)).integrate(f);
    let total = inside + if r < 0.5 * PI { gauss_legendre(200, r, 0.5 * PI).integrate(f) } else { 0.0 };
    inside / total
}

/// Midpoint test on pairs of close boundary points near ±w.
fn local_midpoint_defect(body: &StarBody, w: &[f64], radius: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, 83);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let p = orthogonal_direction(w, &mut rng);
        let a = geodesic(w, &p, radius * rng.gen::<f64>());
        let d = random_unit_vector(w.len(), &mut rng);
        let s = 0.02 + 0.1 * rng.gen::<f64>();
        let b = normalize(&a.iter().zip(&d).map(|(x, y)| x + s * y).collect::<Vec<_>>());
        let (ra, rb) = (body.radial(&a), body.radial(&b));
        let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x * ra + y * rb)).collect();
        worst = worst.max(body.norm(&m) - 1.0);
    }
    worst
}

fn convexity_defect(body: &StarBody, w: &[f64], samples: usize, seed: u64) -> f64 {
    body.midpoint_convexity_defect(samples / 2, seed).max(local_midpoint_defect(body, w, 0.8, samples / 2, seed))
}

/// Haar frames, followed by frames through `witness` when given.
pub fn gbp_frames(n: usize, i: usize, seed: u64, haar: usize, witness: Option<(&[f64], usize)>) -> Vec<(String, SubspaceFrame)> {
    let mut rng = rng_for(seed, 71);
    let mut out: Vec<(String, SubspaceFrame)> =
        (0..haar).map(|_| ("haar".to_string(), random_frame_with(n, i, &mut rng))).collect();
    if let Some((w, count)) = witness {
        let w = normalize(w);
        for _ in 0..count {
            let mut vs = vec![w.clone()];
            vs.extend(random_completion(&[w.clone()], i - 1, &mut rng));
            if let Ok(f) = SubspaceFrame::from_vectors(n, &vs) {
                out.push(("witness".to_string(), f));
            }
        }
    }
    out
}

fn section_rule(frame: &SubspaceFrame, axis: Option<&[f64]>, polar: usize, res: usize) -> Result<QuadratureRule> {
    match axis {
        Some(a) => axial_quadrature(frame, a, polar, res),
        None => subsphere_quadrature(frame, res),
    }
}

fn volume_of(body: &StarBody, rule: &QuadratureRule) -> f64 {
    let n = body.dim;
    sphere_area(n) / n as f64 * rule.integrate(|x| body.radial(x).powi(n as i32))
}

/// Largest ε of the schedule that keeps ρ_A^i positive (and A convex, when
/// demanded), with the trials that led to it.
fn choose_epsilon(
    b: &StarBody,
    cap: &CapPerturbation,
    rule: &QuadratureRule,
    opts: &ForgeOptions,
) -> Result<(f64, bool, Vec<EpsilonTrial>)> {
    let i = cap.i as i32;
    let rho_i: Vec<f64> = rule.values(|x| b.radial(x).powi(i));
    let kv: Vec<f64> = rule.values(|x| cap.k(x));
    let vol_b = volume_of(b, rule);
    let mut sched = opts.eps_schedule.clone();
    sched.retain(|e| *e > 0.0 && e.is_finite());
    sched.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut trials = Vec::new();
    let mut pick: Option<(f64, bool)> = None;
    for eps in sched {
        let min_rho_i = rho_i.iter().zip(&kv).map(|(r, k)| r - eps * k).fold(f64::INFINITY, f64::min);
        let positive = min_rho_i > 0.0;
        let (defect, gap) = if positive {
            let a = forged_body(b, cap, eps);
            (convexity_defect(&a, &cap.axis, opts.convexity_samples, opts.seed), volume_of(&a, rule) - vol_b)
        } else {
            (f64::NAN, f64::NAN)
        };
        let convex = positive && defect <= 1e-12;
        trials.push(EpsilonTrial { eps, min_rho_i, positive, convexity_defect: defect, convex, volume_gap: gap });
        if pick.is_none() && positive && (convex || !opts.require_convex) {
            pick = Some((eps, convex));
        }
    }
    let (eps, convex) = match pick {
        Some(p) => p,
        None => {
            // no convex candidate: fall back to the largest positive one
            match trials.iter().find(|t| t.positive) {
                Some(t) => (t.eps, false),
                None => {
                    return Err(Error::EpsilonExhausted(format!(
                        "ρ_B^i − εM^{{1−i}}h changes sign for every ε in the schedule (min ε tried: {:?})",
                        trials.last().map(|t| t.eps)
                    )))
                }
            }
        }
    };
    Ok((eps, convex, trials))
}

/// Builds A from a smooth convex B with B ∉ I_{n−i} and certifies
/// vol_i(A∩ξ) ≤ vol_i(B∩ξ) on sampled ξ while vol_n(A) > vol_n(B).
pub fn forge_counterexample(b: &StarBody, i: usize, opts: &ForgeOptions) -> Result<ForgedInstance> {
    let n = b.dim;
    if !(1 <= i && i < n) {
        return Err(Error::Domain(format!("needs 1 ≤ i < n (i = {i}, n = {n})")));
    }
    let lambda = (n - i) as f64;
    let lp = LambdaParam::new(lambda, n)?;
    let report = classify(b, lambda, &opts.classify)?;
    if report.verdict != Verdict::NonMember {
        return Err(Error::NotNonMember(format!(
            "classify(B, {lambda}) returned {} (min {:.3e}, tol {:.3e})",
            report.verdict.as_str(),
            report.min_value,
            report.tolerance
        )));
    }
    let w = normalize(&report.witness);

    // φ = M^{1−i}ρ_B^{n−i} on the classifier's rule
    let jmax = opts.classify.max_degree - opts.classify.max_degree % 2;
    let rule = default_rule(b, jmax, opts.classify.resolution)?;
    let vals = rule.values(|x| b.radial(x).powf(lambda));
    let field = MultiplierField::new(&rule, &vals, &MultiplierSpec::Cosine { alpha: lp.criterion_alpha() }, jmax)?;
    let phi = |u: &[f64]| lp.s * field.eval(u);
    let thr = -3.0 * report.tolerance;
    let phi_w = phi(&w);
    if !(phi_w < thr) {
        return Err(Error::NotNonMember(format!("φ(witness) = {phi_w:.3e} is not below −3·tol = {thr:.3e}")));
    }
    let mut rng = rng_for(opts.seed, 67);
    let dirs: Vec<Vec<f64>> = (0..opts.inradius_directions.max(1)).map(|_| orthogonal_direction(&w, &mut rng)).collect();
    let r_in = inradius(&phi, &w, thr, &dirs);

    let power = (1..=opts.max_power)
        .find(|&p| cap_mass_fraction(n, p, r_in) >= opts.mass_inside)
        .ok_or_else(|| Error::Construction(format!("Ω is too thin (inradius {r_in:.3}) for the cap budget")))?;
    let cap = CapPerturbation::new(n, i, &w, power)?;
    let whole = SubspaceFrame::coordinate(n, &(0..n).collect::<Vec<_>>());
    let coarse = axial_quadrature(&whole, &w, 2 * power + 16, opts.volume_resolution)?;
    let fine = axial_quadrature(&whole, &w, 2 * power + 32, opts.volume_resolution + 6)?;

    // (φ, h) = Σ_j m_j c_j h_j / d_n(j), c_j the zonal coefficients of ρ_B^{n−i} about w
    let deg = 2 * power;
    let f_vals = fine.values(|x| b.radial(x).powf(lambda));
    let mut c = vec![0.0; deg + 1];
    for ((x, wt), f) in fine.iter().zip(&f_vals) {
        let g = normalized_gegenbauer_all(n, deg, dot(x, &w));
        for (cj, gj) in c.iter_mut().zip(g) {
            *cj += wt * f * gj;
        }
    }
    let mut pairing_multiplier = 0.0;
    for j in (0..=deg).step_by(2) {
        let m = lp.s * cosine_multiplier(j, lp.criterion_alpha(), n)?;
        pairing_multiplier += m * harmonic_dimension(n, j) * c[j] * cap.h_coeffs[j] / harmonic_dimension(n, j);
    }

    let (eps, convex, trials) = choose_epsilon(b, &cap, &coarse, opts)?;
    let a = forged_body(b, &cap, eps);

    let grid = product_quadrature_even(n, power + 14)?;
    let ii = i as i32;
    let pairing_grid = grid.integrate(|x| {
        let rb = b.radial(x);
        rb.powf(lambda) * (rb.powi(ii) - a.radial(x).powi(ii)) / eps
    });
    let pairing_rel_diff = (pairing_grid - pairing_multiplier).abs() / pairing_multiplier.abs();

    // sections
    let frames = gbp_frames(n, i, opts.seed, opts.frames, Some((&w, opts.witness_frames)));
    let kc = sphere_area(i) / i as f64;
    let cconst = 2.0 * PI.powf(0.5 * (i as f64 - 1.0)) / sphere_area(i) * sphere_area(n - i)
        / (2.0 * PI.powf(0.5 * ((n - i) as f64 - 1.0)));
    let margins: Vec<FrameMargin> = frames
        .par_iter()
        .enumerate()
        .map(|(idx, (kind, f))| -> Result<FrameMargin> {
            let r = axial_quadrature(f, &w, power + 8, opts.section_resolution)?;
            let (mut va, mut vb, mut rk) = (0.0, 0.0, 0.0);
            for (x, wt) in r.iter() {
                va += wt * a.radial(x).powi(ii);
                vb += wt * b.radial(x).powi(ii);
                rk += wt * cap.k(x);
            }
            let comp = subsphere_quadrature(&f.complement(), power + 2)?;
            let predicted = cconst * comp.integrate(|x| cap.h(x));
            Ok(FrameMargin {
                index: idx,
                kind: kind.clone(),
                vol_a: kc * va,
                vol_b: kc * vb,
                margin: kc * (vb - va),
                radon_k: rk,
                predicted,
            })
        })
        .collect::<Result<_>>()?;
    let max_section_excess = margins.iter().map(|m| -m.margin).fold(f64::NEG_INFINITY, f64::max);
    let mechanism_error = margins.iter().map(|m| (m.radon_k - m.predicted).abs()).fold(0.0, f64::max);

    // volumes at two resolutions
    let (va_c, vb_c) = (volume_of(&a, &coarse), volume_of(b, &coarse));
    let (vol_a, vol_b) = (volume_of(&a, &fine), volume_of(b, &fine));
    let vol_gap = vol_a - vol_b;
    let vol_gap_error = (vol_gap - (va_c - vb_c)).abs() + 1e-14 * vol_b;
    let predicted_gap = -sphere_area(n) / i as f64 * eps * pairing_multiplier;

    let holder_lhs = fine.integrate(|x| b.radial(x).powi(n as i32));
    let holder_rhs = fine.integrate(|x| b.radial(x).powf(lambda) * a.radial(x).powi(ii));
    let int_a = fine.integrate(|x| a.radial(x).powi(n as i32));
    let nf = n as f64;
    let holder_ok = holder_lhs < holder_rhs
        && holder_rhs <= holder_lhs.powf(lambda / nf) * int_a.powf(i as f64 / nf) * (1.0 + 1e-12);

    let gaps: Vec<(f64, f64)> = trials.iter().filter(|t| t.positive).map(|t| (t.eps, t.volume_gap)).collect();
    let eps_monotone = gaps.windows(2).all(|p| p[0].1 > p[1].1);

    let sections_hold = max_section_excess <= opts.section_tolerance;
    let volume_fails = vol_gap > 0.0 && vol_gap > 10.0 * vol_gap_error;
    let pairing_negative = pairing_multiplier < 0.0 && pairing_grid < 0.0;
    let counterexample = sections_hold && volume_fails && pairing_negative && pairing_rel_diff <= 1e-6;
    let status = match (counterexample, convex) {
        (true, true) => "counterexample",
        (true, false) => "star_body_counterexample (convexity unverified)",
        _ => "failed",
    };
    let certificate = GbpCertificate {
        n,
        i,
        body: b.to_spec(64)?,
        seed: opts.seed,
        body_convexity_defect: convexity_defect(b, &w, opts.convexity_samples, opts.seed),
        classification: report,
        omega_threshold: thr,
        witness: w.clone(),
        phi_at_witness: phi_w,
        inradius: r_in,
        cap_power: power,
        cap_scale: cap.scale,
        cap_mass_inside: cap_mass_fraction(n, power, r_in),
        epsilon: eps,
        trials,
        eps_monotone,
        frames: margins,
        max_section_excess,
        sections_hold,
        mechanism_error,
        pairing_grid,
        pairing_multiplier,
        pairing_rel_diff,
        pairing_negative,
        holder_lhs,
        holder_rhs,
        holder_ok,
        vol_a,
        vol_b,
        vol_gap,
        vol_gap_error,
        predicted_gap,
        volume_fails,
        convexity_defect: convexity_defect(&a, &w, opts.convexity_samples, opts.seed),
        convexity_verified: convex,
        counterexample,
        status: status.into(),
        options: opts.clone(),
    };
    Ok(ForgedInstance { a, b: b.clone(), cap, certificate })
}

/// Rebuilds (A, B) from a certificate.
pub fn rebuild_instance(cert: &GbpCertificate) -> Result<(StarBody, StarBody)> {
    let b = StarBody::from_spec(&cert.body)?;
    if b.dim != cert.n {
        return Err(Error::Invalid("certificate body has the wrong dimension".into()));
    }
    let cap = CapPerturbation::new(cert.n, cert.i, &cert.witness, cert.cap_power)?;
    Ok((forged_body(&b, &cap, cert.epsilon), b))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbpCheckOptions {
    pub frames: usize,
    pub seed: u64,
    /// Frames through the axis, when one is given.
    pub axis_frames: usize,
    /// Polar axis for the section and volume rules.
    pub axis: Option<Vec<f64>>,
    pub polar_nodes: usize,
    pub section_resolution: usize,
    pub volume_resolution: usize,
    pub tolerance: f64,
}

impl Default for GbpCheckOptions {
    fn default() -> Self {
        GbpCheckOptions {
            frames: 500,
            seed: 0,
            axis_frames: 0,
            axis: None,
            polar_nodes: 48,
            section_resolution: 10,
            volume_resolution: 16,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbpCheckReport {
    pub n: usize,
    pub i: usize,
    /// vol_i(B∩ξ) − vol_i(A∩ξ) per frame.
    pub margins: Vec<f64>,
    pub max_section_excess: f64,
    /// vol_i(A∩ξ) ≤ vol_i(B∩ξ) + tolerance on every frame.
    pub sections_dominated: bool,
    pub vol_a: f64,
    pub vol_b: f64,
    pub vol_error: f64,
    /// vol_n(A) ≤ vol_n(B) within the error.
    pub volume_dominated: bool,
    /// Sections dominated while vol_n(A) − vol_n(B) exceeds ten times its error.
    pub counterexample: bool,
}

/// Evaluates vol_i(A∩ξ) ≤ vol_i(B∩ξ) on Haar-sampled ξ and vol_n(A) ≤ vol_n(B).
pub fn check_gbp_instance(a: &StarBody, b: &StarBody, i: usize, opts: &GbpCheckOptions) -> Result<GbpCheckReport> {
    let n = a.dim;
    if b.dim != n || !(1 <= i && i < n) {
        return Err(Error::Domain(format!("needs bodies in the same R^n and 1 ≤ i < n (i = {i})")));
    }
    let axis = opts.axis.as_ref().map(|v| normalize(v));
    let frames = gbp_frames(n, i, opts.seed, opts.frames, axis.as_deref().map(|w| (w, opts.axis_frames)));
    let kc = sphere_area(i) / i as f64;
    let ii = i as i32;
    let margins: Vec<f64> = frames
        .par_iter()
        .map(|(_, f)| -> Result<f64> {
            let r = section_rule(f, axis.as_deref(), opts.polar_nodes, opts.section_resolution)?;
            let mut d = 0.0;
            for (x, wt) in r.iter() {
                d += wt * (b.radial(x).powi(ii) - a.radial(x).powi(ii));
            }
            Ok(kc * d)
        })
        .collect::<Result<_>>()?;
    let whole = SubspaceFrame::coordinate(n, &(0..n).collect::<Vec<_>>());
    let (lo, hi) = match &axis {
        Some(w) => (
            axial_quadrature(&whole, w, opts.polar_nodes, opts.volume_resolution)?,
            axial_quadrature(&whole, w, opts.polar_nodes + 16, opts.volume_resolution + 6)?,
        ),
        None => (product_quadrature(n, opts.volume_resolution)?, product_quadrature(n, opts.volume_resolution + 8)?),
    };
    let (vol_a, vol_b) = (volume_of(a, &hi), volume_of(b, &hi));
    let gap_lo = volume_of(a, &lo) - volume_of(b, &lo);
    let vol_error = ((vol_a - vol_b) - gap_lo).abs() + 1e-14 * vol_b.abs().max(vol_a.abs());
    if !vol_a.is_finite() || !vol_b.is_finite() {
        return Err(Error::InvalidBody("a radial function is not finite on the volume grid".into()));
    }
    let max_section_excess = margins.iter().map(|m| -m).fold(f64::NEG_INFINITY, f64::max);
    let sections_dominated = max_section_excess <= opts.tolerance;
    let volume_dominated = vol_a <= vol_b + vol_error;
    Ok(GbpCheckReport {
        n,
        i,
        margins,
        max_section_excess,
        sections_dominated,
        vol_a,
        vol_b,
        vol_error,
        volume_dominated,
        counterexample: sections_dominated && vol_a - vol_b > 10.0 * vol_error,
    })
}

/// Independent re-check of a certificate: rebuilds A and B and reruns the
/// section and volume comparisons on the recorded frames.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub check: GbpCheckReport,
    /// |gap − certified gap| within both error estimates.
    pub volume_gap_matches: bool,
    pub confirmed: bool,
}

pub fn verify_certificate(cert: &GbpCertificate) -> Result<CertificateCheck> {
    let (a, b) = rebuild_instance(cert)?;
    let o = &cert.options;
    let opts = GbpCheckOptions {
        frames: o.frames,
        seed: cert.seed,
        axis_frames: o.witness_frames,
        axis: Some(cert.witness.clone()),
        polar_nodes: 2 * cert.cap_power + 16,
        section_resolution: o.section_resolution,
        volume_resolution: o.volume_resolution,
        tolerance: o.section_tolerance,
    };
    let check = check_gbp_instance(&a, &b, cert.i, &opts)?;
    let gap = check.vol_a - check.vol_b;
    let volume_gap_matches = (gap - cert.vol_gap).abs() <= 10.0 * (check.vol_error + cert.vol_gap_error);
    let confirmed = check.counterexample == cert.counterexample && volume_gap_matches;
    Ok(CertificateCheck { check, volume_gap_matches, confirmed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_is_refused() {
        let o = ForgeOptions { classify: ClassifyOptions { max_degree: 8, ..Default::default() }, ..Default::default() };
        match forge_counterexample(&StarBody::ball(5), 4, &o) {
            Err(Error::NotNonMember(_)) => {}
            other => panic!("expected NotNonMember, got {:?}", other.map(|f| f.certificate.status)),
        }
    }

    #[test]
    fn mechanism_identity_for_caps() {
        // R_i M^{1−i}h(ξ) = c R^0_{n−i,⊥}h(ξ) on random frames
        for (n, i) in [(5usize, 4usize), (5, 3), (4, 2)] {
            let w = normalize(&[0.3, -1.0, 0.4, 0.8, 0.2][..n]);
            let cap = CapPerturbation::new(n, i, &w, 6).unwrap();
            let c = 2.0 * PI.powf(0.5 * (i as f64 - 1.0)) / sphere_area(i) * sphere_area(n - i)
                / (2.0 * PI.powf(0.5 * ((n - i) as f64 - 1.0)));
            for (_, f) in gbp_frames(n, i, 3, 6, Some((&w, 2))) {
                let r = axial_quadrature(&f, &w, 20, 6).unwrap().integrate(|x| cap.k(x));
                let p = c * subsphere_quadrature(&f.complement(), 10).unwrap().integrate(|x| cap.h(x));
                assert!((r - p).abs() < 1e-11, "n={n} i={i}: {r} vs {p}");
                assert!(p >= 0.0);
            }
        }
    }

    #[test]
    fn scaled_and_equal_bodies() {
        let b = StarBody::lq_ball(4, 4.0).unwrap();
        let o = GbpCheckOptions { frames: 30, volume_resolution: 10, ..Default::default() };
        let r = check_gbp_instance(&b.scaled(0.9), &b, 3, &o).unwrap();
        assert!(r.sections_dominated && r.volume_dominated && !r.counterexample);
        let r = check_gbp_instance(&b, &b, 3, &o).unwrap();
        assert!(r.margins.iter().all(|m| *m == 0.0));
        assert_eq!(r.vol_a, r.vol_b);
        assert!(r.sections_dominated && r.volume_dominated);
    }
}
