//! (q,ℓ)-balls {|x′|^q + |x″|^q ≤ 1}, x′ ∈ R^{n−ℓ}, x″ ∈ R^ℓ, on the
//! Fourier side.

pub mod gamma;

pub use gamma::{
    asymptotic_check, asymptotic_constant, gamma_ql, gamma_ql_detailed, gamma_ql_positivity_scan, AsymptoticRow,
    GammaTable, GammaValue, PositivityScan,
};

use crate::error::{Error, Result};
use crate::ib::{classify_many, Branch, ClassificationReport, ClassifyOptions, LambdaParam, Verdict};
use crate::special::gamma::rgamma;
use crate::special::quad::{adaptive_gk, gauss_beta};
use crate::sphere::StarBody;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QlBallSpec {
    pub n: usize,
    pub ell: usize,
    pub q: f64,
}

impl QlBallSpec {
    pub fn new(n: usize, ell: usize, q: f64) -> Result<Self> {
        if !(0 < ell && ell < n) {
            return Err(Error::Domain(format!("need 0 < ℓ < n (ℓ = {ell}, n = {n})")));
        }
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("q must be positive (q = {q})")));
        }
        Ok(QlBallSpec { n, ell, q })
    }

    pub fn body(&self) -> Result<StarBody> {
        StarBody::ql_ball(self.n, self.q, self.ell)
    }

    /// q > 2, ℓ > 1 and max(n−ℓ, ℓ) − 2 < λ < n − 3: no known answer.
    pub fn open_region(&self, lambda: f64) -> bool {
        let m = (self.n - self.ell).max(self.ell) as f64;
        self.q > 2.0 && self.ell > 1 && m - 2.0 < lambda && lambda < self.n as f64 - 3.0
    }
}

/// Tables of γ_{q,n−ℓ} and γ_{q,ℓ} shared by all evaluations of h.
#[derive(Debug, Clone)]
pub struct HKernel {
    pub spec: QlBallSpec,
    first: GammaTable,
    second: GammaTable,
}

impl HKernel {
    pub fn new(spec: QlBallSpec) -> Result<Self> {
        let first = GammaTable::new(spec.q, spec.n - spec.ell)?;
        let second = if spec.ell == spec.n - spec.ell { first.clone() } else { GammaTable::new(spec.q, spec.ell)? };
        Ok(HKernel { spec, first, second })
    }

    /// h_{p,q,ℓ}(ξ) = (q/Γ(−p/q)) ∫_0^∞ t^{n+p−1} γ_{q,n−ℓ}(at) γ_{q,ℓ}(bt) dt,
    /// a = |ξ′|, b = |ξ″|. Returns (value, error estimate).
    pub fn h(&self, p: f64, a: f64, b: f64) -> Result<(f64, f64)> {
        let QlBallSpec { n, ell, q } = self.spec;
        let nf = n as f64;
        if !(-nf < p && p < 0.0) {
            return Err(Error::Integrability(format!("h needs −n < p < 0 (p = {p})")));
        }
        if !(a >= 0.0 && b >= 0.0) || (a == 0.0 && b == 0.0) {
            return Err(Error::Domain("h needs a, b ≥ 0, not both zero".into()));
        }
        let even = (q / 2.0 - (q / 2.0).round()).abs() < 1e-12;
        // on an axis only one factor decays
        for (x, dim) in [(a, n - ell), (b, ell)] {
            if x == 0.0 && !even && !(nf + p < (nf - dim as f64) + q) {
                return Err(Error::Integrability(format!(
                    "the t-integral diverges on this axis (n + p = {} ≥ {} + q)",
                    nf + p,
                    n - dim
                )));
            }
        }
        let g = |t: f64| self.first.eval(a * t) * self.second.eval(b * t);
        // [0, 1] against the weight t^{n+p−1}
        let gb = gauss_beta(40, nf + p - 1.0, 0.0)?;
        let head: f64 = gb.nodes.iter().zip(&gb.weights).map(|(&t, &w)| w * g(t)).sum();
        let lo = [a, b].into_iter().filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
        let top = (self.first.switch.max(self.second.switch) / lo).max(2.0);
        let f = |t: f64| t.powf(nf + p - 1.0) * g(t);
        let scale = self.first.eval(0.0) * self.second.eval(0.0);
        let mid = adaptive_gk(f, 1.0, top, 1e-14 * scale, 1e-11, 4000);
        // [top, ∞) with t = top/u
        let tail = adaptive_gk(
            |u: f64| if u <= 0.0 { 0.0 } else { f(top / u) * top / (u * u) },
            0.0,
            1.0,
            1e-15 * scale,
            1e-10,
            2000,
        );
        let c = q * rgamma(-p / q);
        let err = c.abs() * (mid.error + tail.error + 1e-13 * scale + (self.first.max_error + self.second.max_error) * scale);
        Ok((c * (head + mid.value + tail.value), err))
    }
}

pub fn h_pql(spec: QlBallSpec, p: f64, a: f64, b: f64) -> Result<f64> {
    Ok(HKernel::new(spec)?.h(p, a, b)?.0)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QlScanOptions {
    /// Angles ψ ∈ [0, π/2] with (a, b) = (cos ψ, sin ψ).
    pub angles: usize,
    /// Run the sphere-side classifier when n ≤ this.
    pub sphere_max_n: usize,
    pub sphere_degree: usize,
}

impl Default for QlScanOptions {
    fn default() -> Self {
        QlScanOptions { angles: 46, sphere_max_n: 5, sphere_degree: 24 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QlClassification {
    pub spec: QlBallSpec,
    pub lambda: f64,
    pub fourier: ClassificationReport,
    pub sphere: Option<ClassificationReport>,
    /// Both verdicts decisive and equal; None when a side is missing or inconclusive.
    pub agree: Option<bool>,
    pub open_region: bool,
    pub scan: Vec<ScanPoint>,
}

impl QlClassification {
    /// Decisive verdicts that contradict each other.
    pub fn disagreement(&self) -> bool {
        self.agree == Some(false)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Invalid(format!("write failed: {e}"));
        writeln!(out, "a,b,h,error").map_err(io)?;
        for p in &self.scan {
            writeln!(out, "{:.17e},{:.17e},{:.17e},{:.3e}", p.a, p.b, p.h, p.error).map_err(io)?;
        }
        Ok(())
    }
}

/// Sign scan of h_{−λ,q,ℓ} on the quarter circle (a, b) = (cos ψ, sin ψ):
/// ‖·‖^{−λ} has a positive Fourier transform exactly when h ≥ 0.
pub fn classify_qlball(spec: QlBallSpec, lambda: f64, opts: &QlScanOptions) -> Result<QlClassification> {
    Ok(classify_qlball_many(spec, &[lambda], opts)?.remove(0))
}

/// As `classify_qlball` for several λ; the sphere-side classifier shares one
/// projection pass.
pub fn classify_qlball_many(spec: QlBallSpec, lambdas: &[f64], opts: &QlScanOptions) -> Result<Vec<QlClassification>> {
    let n = spec.n;
    for &lambda in lambdas {
        if !(0.0 < lambda && lambda < n as f64) {
            return Err(Error::Domain(format!("λ must lie in (0, n) (λ = {lambda})")));
        }
    }
    let kernel = HKernel::new(spec)?;
    let spheres: Vec<Option<ClassificationReport>> = if n <= opts.sphere_max_n {
        let body = spec.body()?;
        let copts = ClassifyOptions { max_degree: opts.sphere_degree, ..Default::default() };
        classify_many(&body, lambdas, &copts)?.into_iter().map(Some).collect()
    } else {
        vec![None; lambdas.len()]
    };
    lambdas
        .iter()
        .zip(spheres)
        .map(|(&lambda, sphere)| fourier_side(spec, &kernel, lambda, opts, sphere))
        .collect()
}

fn fourier_side(
    spec: QlBallSpec,
    kernel: &HKernel,
    lambda: f64,
    opts: &QlScanOptions,
    sphere: Option<ClassificationReport>,
) -> Result<QlClassification> {
    let n = spec.n;
    let lp = LambdaParam::new(lambda, n)?;
    let p = -lambda;
    let m = opts.angles.max(3);
    let mut scan = Vec::with_capacity(m);
    for k in 0..m {
        let psi = 0.5 * std::f64::consts::PI * k as f64 / (m - 1) as f64;
        let (a, b) = if k == 0 {
            (1.0, 0.0)
        } else if k == m - 1 {
            (0.0, 1.0)
        } else {
            (psi.cos(), psi.sin())
        };
        match kernel.h(p, a, b) {
            Ok((h, error)) => scan.push(ScanPoint { a, b, h, error }),
            // the axis value does not exist as a function; skip it
            Err(Error::Integrability(_)) if a == 0.0 || b == 0.0 => {}
            Err(e) => return Err(e),
        }
    }
    let scale = scan.iter().fold(0.0f64, |s, x| s.max(x.h.abs()));
    let err = scan.iter().fold(0.0f64, |s, x| s.max(x.error));
    let tol = (1e-7 * scale).max(err);
    let (iw, min) = scan.iter().enumerate().fold((0, f64::INFINITY), |b, (i, x)| if x.h < b.1 { (i, x.h) } else { b });
    let verdict = if min < -10.0 * tol {
        Verdict::NonMember
    } else if min >= -tol {
        Verdict::Member
    } else {
        Verdict::Inconclusive
    };
    let open_region = spec.open_region(lambda);
    let w = &scan[iw];
    let mut witness = vec![0.0; n];
    witness[0] = w.a;
    witness[n - 1] = w.b;
    let fourier = ClassificationReport {
        body: "ql_ball".into(),
        n,
        lambda,
        branch: lp.branch,
        verdict,
        min_value: min,
        tolerance: tol,
        scale,
        witness,
        levels: Vec::new(),
        max_degree: 0,
        rule_kind: "fourier_scan".into(),
        rule_nodes: scan.len(),
        outputs: scan.len(),
        note: if open_region {
            "OPEN: numerical evidence only, no known answer in this range".into()
        } else {
            "sign of h_{−λ,q,ℓ} on the quarter circle".into()
        },
    };
    debug_assert_eq!(lp.branch, Branch::Normalized);
    let decisive = |v: Verdict| v != Verdict::Inconclusive;
    let agree = sphere.as_ref().and_then(|s| {
        (decisive(s.verdict) && decisive(fourier.verdict)).then(|| s.verdict == fourier.verdict)
    });
    Ok(QlClassification { spec, lambda, fourier, sphere, agree, open_region, scan })
}
