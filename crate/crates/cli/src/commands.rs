use crate::{Failure, Sink};
use anyhow::{anyhow, Context};
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sphtomo::gbp::{forge_counterexample, verify_certificate, ForgeOptions, GbpCertificate};
use sphtomo::ib::{
    classify_many, classify_negative, construct_ib, generate_example, section_body, section_ib, ClassificationReport,
    ClassifyOptions, ConstructOptions, ExampleKind, ExampleOptions, SphericalMeasure, Verdict,
};
use sphtomo::ql::{asymptotic_check, classify_qlball_many, gamma_ql_detailed, HKernel, QlBallSpec, QlScanOptions};
use sphtomo::sphere::{product_quadrature, random_frame, rng_for, random_frame_with, section_volume, BodySpec, StarBody};
use sphtomo::transforms::suites::*;
use sphtomo::transforms::{Budget, IdentityReport};
use std::path::{Path, PathBuf};
use std::sync::Arc;

type Outcome = Result<(), Failure>;

fn config_error(msg: impl Into<String>) -> Failure {
    Failure::Config(anyhow!(msg.into()))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Loads a body spec, either bare or as the `body` field of a report.
pub fn load_body(path: &Path) -> Result<StarBody, Failure> {
    let v = read_json(path)?;
    let v = match v.get("body") {
        Some(b) if v.get("kind").is_none() => b.clone(),
        _ => v,
    };
    let spec: BodySpec = serde_json::from_value(v).with_context(|| format!("{} is not a body spec", path.display()))?;
    Ok(StarBody::from_spec(&spec)?)
}

fn need_body(p: &Option<PathBuf>, what: &str) -> Result<StarBody, Failure> {
    match p {
        Some(p) => load_body(p),
        None => Err(config_error(format!("--{what} is required"))),
    }
}

fn parse_verdict(s: &str) -> Result<Verdict, Failure> {
    match s {
        "member" => Ok(Verdict::Member),
        "non_member" => Ok(Verdict::NonMember),
        "inconclusive" => Ok(Verdict::Inconclusive),
        _ => Err(config_error(format!("unknown verdict `{s}` (member, non_member, inconclusive)"))),
    }
}

fn finish(sink: &Sink, report: &Value, failures: Vec<String>) -> Outcome {
    sink.json(report)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Math(failures.join("; ")))
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyArgs {
    /// Body-spec JSON.
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// Classify the (q,ℓ)-ball with this n on the Fourier side (with --ql-ell, --ql-q).
    #[arg(long)]
    pub ql_n: Option<usize>,
    #[arg(long)]
    pub ql_ell: Option<usize>,
    #[arg(long)]
    pub ql_q: Option<f64>,
    /// One or more λ (comma separated); λ < 0 tests embedding in L_{−λ}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    /// Truncation degree.
    #[arg(long = "J", default_value_t = 24)]
    #[serde(rename = "J")]
    pub max_degree: usize,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Expected verdict; a mismatch exits with status 1.
    #[arg(long)]
    pub expect: Option<String>,
}

pub fn classify(a: ClassifyArgs, sink: &Sink) -> Outcome {
    if a.lambda.is_empty() {
        return Err(config_error("at least one --lambda is required"));
    }
    let expect = a.expect.as_deref().map(parse_verdict).transpose()?;
    let opts = ClassifyOptions { max_degree: a.max_degree, resolution: a.resolution, ..Default::default() };
    let mut failures = Vec::new();
    let check = |failures: &mut Vec<String>, lam: f64, v: Verdict| {
        if let Some(e) = expect {
            if v != e {
                failures.push(format!("λ = {lam}: verdict {} (expected {})", v.as_str(), e.as_str()));
            }
        }
    };
    let reports: Value = match (&a.body, a.ql_n) {
        (Some(_), Some(_)) => return Err(config_error("give either --body or --ql-n, not both")),
        (None, None) => return Err(config_error("--body or --ql-n is required")),
        (Some(p), None) => {
            let body = load_body(p)?;
            let positive: Vec<f64> = a.lambda.iter().copied().filter(|l| *l > 0.0).collect();
            let mut pos = classify_many(&body, &positive, &opts)?.into_iter();
            let mut out: Vec<ClassificationReport> = Vec::new();
            for &lam in &a.lambda {
                let r = if lam > 0.0 { pos.next().unwrap() } else { classify_negative(&body, -lam, &opts)? };
                check(&mut failures, lam, r.verdict);
                out.push(r);
            }
            serde_json::to_value(out).unwrap()
        }
        (None, Some(n)) => {
            let ell = a.ql_ell.ok_or_else(|| config_error("--ql-ell is required"))?;
            let q = a.ql_q.ok_or_else(|| config_error("--ql-q is required"))?;
            let spec = QlBallSpec::new(n, ell, q)?;
            let sopts = QlScanOptions { sphere_degree: a.max_degree, ..Default::default() };
            let out = classify_qlball_many(spec, &a.lambda, &sopts)?;
            for c in &out {
                check(&mut failures, c.lambda, c.fourier.verdict);
                if c.disagreement() {
                    failures.push(format!("λ = {}: Fourier and sphere verdicts disagree", c.lambda));
                }
            }
            serde_json::to_value(out).unwrap()
        }
    };
    let verdicts: Vec<Value> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.get("verdict").or_else(|| r.get("fourier").and_then(|f| f.get("verdict"))).cloned().unwrap_or(Value::Null))
        .collect();
    let report = json!({
        "command": "classify",
        "config": a,
        "verdicts": verdicts,
        "pass": failures.is_empty(),
        "reports": reports,
    });
    finish(sink, &report, failures)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ConstructArgs {
    /// ib, section, section_ib, cosine_measure, grassmann_dual, cosine_power or power.
    #[arg(long)]
    pub kind: String,
    /// Input body (L, K, the density's radial function, or the base body).
    #[arg(long)]
    pub body: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// δ of the power construction.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub i: Option<usize>,
    /// Ambient dimension when no body is given.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension of the random subspace η for sections.
    #[arg(long)]
    pub m: Option<usize>,
    /// JSON list of [direction, mass] atoms for cosine_measure.
    #[arg(long)]
    pub atoms: Option<PathBuf>,
    /// Number of random subspaces for grassmann_dual.
    #[arg(long, default_value_t = 3)]
    pub subspaces: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "J", default_value_t = 24)]
    #[serde(rename = "J")]
    pub max_degree: usize,
    /// Grid intervals per angle when the result is tabulated.
    #[arg(long, default_value_t = 16)]
    pub counts: usize,
}

pub fn construct(a: ConstructArgs, sink: &Sink) -> Outcome {
    let lambda = || a.lambda.ok_or_else(|| config_error("--lambda is required"));
    let dim = |b: &Option<StarBody>| -> Result<usize, Failure> {
        b.as_ref().map(|b| b.dim).or(a.n).ok_or_else(|| config_error("--n or --body is required"))
    };
    let eta = |n: usize| -> Result<sphtomo::sphere::SubspaceFrame, Failure> {
        let m = a.m.ok_or_else(|| config_error("--m is required"))?;
        if !(1 <= m && m < n) {
            return Err(config_error(format!("need 1 ≤ m < n (m = {m}, n = {n})")));
        }
        Ok(random_frame(n, m, a.seed))
    };
    let eopts = ExampleOptions {
        classify: ClassifyOptions { max_degree: a.max_degree, ..Default::default() },
        ..Default::default()
    };
    let input = a.body.as_ref().map(|p| load_body(p)).transpose()?;
    let mut extra = json!(null);
    let (body, certificate) = match a.kind.as_str() {
        "ib" => {
            let l = input.ok_or_else(|| config_error("--body is required"))?;
            let opts = ConstructOptions { max_degree: a.max_degree, ..Default::default() };
            (construct_ib(&l, lambda()?, &opts)?, None)
        }
        "section" => {
            let k = input.ok_or_else(|| config_error("--body is required"))?;
            let e = eta(k.dim)?;
            extra = json!({ "eta": e.basis });
            (section_body(&k, &e), None)
        }
        "section_ib" => {
            let l = input.ok_or_else(|| config_error("--body is required"))?;
            let e = eta(l.dim)?;
            extra = json!({ "eta": e.basis });
            (section_ib(&l, &e, lambda()?, Budget::default())?, None)
        }
        "cosine_measure" | "cosine_power" => {
            let n = dim(&input)?;
            let mu = match (&a.atoms, &input) {
                (Some(p), _) => {
                    let list: Vec<(Vec<f64>, f64)> = serde_json::from_value(read_json(p)?)
                        .map_err(|e| config_error(format!("atoms must be [[direction, mass], ...]: {e}")))?;
                    SphericalMeasure::atoms(list)?
                }
                (None, Some(b)) => {
                    let b = b.clone();
                    SphericalMeasure::Density(Arc::new(move |x: &[f64]| b.radial(x)))
                }
                (None, None) => SphericalMeasure::uniform(),
            };
            let kind = if a.kind == "cosine_measure" {
                ExampleKind::CosineMeasure { mu, n, lambda: lambda()? }
            } else {
                let i = a.i.ok_or_else(|| config_error("--i is required"))?;
                ExampleKind::CosinePower { mu, n, i, lambda: lambda()? }
            };
            let ex = generate_example(&kind, &eopts)?;
            (ex.body, Some(ex.certificate))
        }
        "grassmann_dual" => {
            let n = dim(&input)?;
            let i = a.i.ok_or_else(|| config_error("--i is required"))?;
            if !(1 <= i && i < n) {
                return Err(config_error("need 1 ≤ i < n"));
            }
            let mut rng = rng_for(a.seed, 0);
            let frames = (0..a.subspaces.max(1)).map(|_| (random_frame_with(n, n - i, &mut rng), 1.0)).collect();
            let ex = generate_example(&ExampleKind::GrassmannDual { frames, i, lambda: lambda()? }, &eopts)?;
            (ex.body, Some(ex.certificate))
        }
        "power" => {
            let l = input.ok_or_else(|| config_error("--body is required"))?;
            let delta = a.delta.ok_or_else(|| config_error("--delta is required"))?;
            let ex = generate_example(&ExampleKind::Power { l, delta, lambda: lambda()? }, &eopts)?;
            (ex.body, Some(ex.certificate))
        }
        other => return Err(config_error(format!("unknown construction `{other}`"))),
    };
    let spec = body.to_spec(a.counts)?;
    let report = json!({
        "command": "construct",
        "config": a,
        "body": spec,
        "details": extra,
        "certificate": certificate,
    });
    finish(sink, &report, Vec::new())
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SectionArgs {
    /// The body K.
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// Optional body L: vol_k(K∩ξ) is compared with vol_{n−k}(L∩ξ^⊥).
    #[arg(long)]
    pub other: Option<PathBuf>,
    /// Section dimension (default n − 1).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub frames: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 24)]
    pub resolution: usize,
    /// Relative tolerance of the comparison with L.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Also classify every section K∩ξ (inside ξ) at this λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Expected verdict of every classified section.
    #[arg(long)]
    pub expect: Option<String>,
    #[arg(long = "J", default_value_t = 24)]
    #[serde(rename = "J")]
    pub max_degree: usize,
}

pub fn section(a: SectionArgs, sink: &Sink) -> Outcome {
    let k_body = need_body(&a.body, "body")?;
    let l_body = a.other.as_ref().map(|p| load_body(p)).transpose()?;
    let n = k_body.dim;
    let k = a.k.unwrap_or(n - 1);
    if !(1 <= k && k < n) {
        return Err(config_error(format!("need 1 ≤ k < n (k = {k})")));
    }
    if let Some(l) = &l_body {
        if l.dim != n {
            return Err(config_error("bodies live in different dimensions"));
        }
    }
    let expect = a.expect.as_deref().map(parse_verdict).transpose()?;
    if a.lambda.is_some() && k < 2 {
        return Err(config_error("classifying sections needs k ≥ 2"));
    }
    let copts = ClassifyOptions { max_degree: a.max_degree, ..Default::default() };
    let base = product_quadrature(k, a.resolution)?;
    let mut rng = rng_for(a.seed, 0);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for idx in 0..a.frames {
        let xi = random_frame_with(n, k, &mut rng);
        let vk = section_volume(&k_body, &xi, &base)?;
        let mut row = json!({ "index": idx, "basis": xi.basis, "volume": vk });
        if let Some(l) = &l_body {
            let perp = xi.complement();
            let vl = section_volume(l, &perp, &product_quadrature(n - k, a.resolution)?)?;
            let rel = (vk - vl).abs() / vl.abs().max(1e-300);
            worst = worst.max(rel);
            row["other_volume"] = json!(vl);
            row["relative_gap"] = json!(rel);
        }
        if let Some(lam) = a.lambda {
            let r = sphtomo::ib::classify(&section_body(&k_body, &xi), lam, &copts)?;
            if let Some(e) = expect {
                if r.verdict != e {
                    failures.push(format!("section {idx}: verdict {}", r.verdict.as_str()));
                }
            }
            row["verdict"] = json!(r.verdict);
        }
        rows.push(row);
    }
    if l_body.is_some() && worst > a.tolerance {
        failures.push(format!("section volumes differ by {worst:.3e} (tolerance {:.1e})", a.tolerance));
    }
    let report = json!({
        "command": "section",
        "config": a,
        "n": n,
        "k": k,
        "max_relative_gap": if l_body.is_some() { json!(worst) } else { Value::Null },
        "pass": failures.is_empty(),
        "sections": rows,
    });
    finish(sink, &report, failures)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// inversion, funk, limit, multiplier, factorization, intertwining,
    /// restriction, positivity, q_composition or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long = "J", default_value_t = 16)]
    #[serde(rename = "J")]
    pub max_degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random test functions per suite.
    #[arg(long, default_value_t = 3)]
    pub functions: usize,
    /// Evaluation points, frames or pairs per function.
    #[arg(long, default_value_t = 2)]
    pub points: usize,
    /// Monte-Carlo samples per point.
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub i: Option<usize>,
    /// Dimension of η in the restriction suite.
    #[arg(long)]
    pub m: Option<usize>,
    /// Dimension of ξ in the restriction suite.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value_t = 12)]
    pub sphere_res: usize,
    #[arg(long, default_value_t = 24)]
    pub radial_nodes: usize,
}

const SUITES: [&str; 9] =
    ["inversion", "funk", "limit", "multiplier", "factorization", "intertwining", "restriction", "positivity", "q_composition"];

fn run_suite(name: &str, a: &VerifyArgs) -> Result<IdentityReport, Failure> {
    let n = a.n;
    if n < 3 {
        return Err(config_error("the suites need n ≥ 3"));
    }
    let o = SuiteOptions {
        n,
        max_degree: a.max_degree,
        seed: a.seed,
        functions: a.functions,
        points: a.points,
        samples: a.samples,
        budget: Budget { sphere_res: a.sphere_res, radial_nodes: a.radial_nodes },
        tolerance: a.tolerance,
    };
    let all_i: Vec<usize> = match a.i {
        Some(i) if 1 <= i && i < n => vec![i],
        Some(i) => return Err(config_error(format!("need 1 ≤ i < n (i = {i})"))),
        None => (1..n).collect(),
    };
    let one_i = a.i.unwrap_or(2.min(n - 1));
    Ok(match name {
        "inversion" => {
            let alphas = match a.alpha {
                Some(x) => vec![x],
                None => vec![-2.5, -0.5, 0.5, 1.0 + std::f64::consts::PI / 7.0],
            };
            inversion_suite(&[n], &alphas, a.max_degree, a.tolerance.unwrap_or(1e-12))?
        }
        "funk" => funk_round_trip(&o)?,
        "limit" => {
            let alphas = [1e-1, 1e-2, 1e-3];
            let mut worst: Option<IdentityReport> = None;
            for &i in &all_i {
                let r = limit_suite(&o, i, &alphas)?;
                if worst.as_ref().map_or(true, |w| !r.pass || (w.pass && r.max_err > w.max_err)) {
                    worst = Some(r);
                }
            }
            worst.unwrap()
        }
        "multiplier" => multiplier_agreement(&o, a.alpha.unwrap_or(0.5))?,
        "factorization" => factorization_suite(&o, &all_i)?,
        "intertwining" => intertwining_suite(&o, one_i, a.alpha.unwrap_or(0.5))?,
        "restriction" => {
            let m = a.m.unwrap_or(n - 1);
            let k = a.k.unwrap_or(1);
            let lambdas = if a.lambda.is_empty() {
                [0.25, 0.5, 1.0].into_iter().filter(|l| *l <= k as f64).collect()
            } else {
                a.lambda.clone()
            };
            restriction_suite(&o, m, k, &lambdas)?
        }
        "positivity" => positivity_suite(&o, a.alpha.unwrap_or(0.5), a.beta.unwrap_or(-0.5))?,
        "q_composition" => q_composition_suite(&o, one_i, a.alpha.unwrap_or(0.5))?,
        other => return Err(config_error(format!("unknown suite `{other}`"))),
    })
}

pub fn verify(a: VerifyArgs, sink: &Sink) -> Outcome {
    let names: Vec<&str> = if a.suite == "all" { SUITES.to_vec() } else { vec![a.suite.as_str()] };
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for name in names {
        let r = run_suite(name, &a)?;
        if !r.pass {
            failures.push(format!("{name}: max_err {:.3e}", r.max_err));
        }
        reports.push(json!({ "suite": name, "report": r }));
    }
    let report = json!({
        "command": "verify",
        "config": a,
        "seed": a.seed,
        "pass": failures.is_empty(),
        "reports": reports,
    });
    finish(sink, &report, failures)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct QlscanArgs {
    /// gamma, asymptotic, hmap or classify.
    #[arg(long, default_value = "gamma")]
    pub mode: String,
    #[arg(long, default_value_t = 1.5)]
    pub q: f64,
    #[arg(long, default_value_t = 2)]
    pub ell: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 50.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Values of s for the asymptotic table.
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 46)]
    pub angles: usize,
    #[arg(long = "J", default_value_t = 24)]
    #[serde(rename = "J")]
    pub max_degree: usize,
}

fn csv_text<F>(header: &[&str], fill: F) -> Result<String, Failure>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), Failure>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::Config(e.into()))?;
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Failure::Config(anyhow!("{e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn rec(w: &mut csv::Writer<Vec<u8>>, fields: &[String]) -> Result<(), Failure> {
    w.write_record(fields).map_err(|e| Failure::Config(e.into()))
}

fn num(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn qlscan(a: QlscanArgs, sink: &Sink) -> Outcome {
    let mut failures = Vec::new();
    let text = match a.mode.as_str() {
        "gamma" => {
            if a.points < 2 || !(a.s_max > 0.0) {
                return Err(config_error("need --points ≥ 2 and --s-max > 0"));
            }
            csv_text(&["s", "gamma", "error"], |w| {
                for k in 0..a.points {
                    let s = a.s_max * k as f64 / (a.points - 1) as f64;
                    let g = gamma_ql_detailed(a.q, a.ell, s)?;
                    rec(w, &[num(s), num(g.value), num(g.error)])?;
                }
                Ok(())
            })?
        }
        "asymptotic" => {
            let s = if a.s.is_empty() { vec![25.0, 50.0, 100.0, 200.0, 400.0] } else { a.s.clone() };
            let rows = asymptotic_check(a.q, a.ell, &s)?;
            csv_text(&["s", "scaled", "constant", "rel_diff", "error"], |w| {
                for r in &rows {
                    rec(w, &[num(r.s), num(r.scaled), num(r.constant), num(r.rel_diff), num(r.error)])?;
                }
                Ok(())
            })?
        }
        "hmap" => {
            if a.lambda.is_empty() {
                return Err(config_error("--lambda is required"));
            }
            let kernel = HKernel::new(QlBallSpec::new(a.n, a.ell, a.q)?)?;
            let m = a.angles.max(3);
            csv_text(&["lambda", "psi", "a", "b", "h", "error", "sign"], |w| {
                for &lam in &a.lambda {
                    // the axes themselves are excluded: h need not exist there
                    for k in 1..m - 1 {
                        let psi = 0.5 * std::f64::consts::PI * k as f64 / (m - 1) as f64;
                        let (h, e) = kernel.h(-lam, psi.cos(), psi.sin())?;
                        let sign = if h > e { "+" } else if h < -e { "-" } else { "0" };
                        rec(w, &[num(lam), num(psi), num(psi.cos()), num(psi.sin()), num(h), num(e), sign.into()])?;
                    }
                }
                Ok(())
            })?
        }
        "classify" => {
            if a.lambda.is_empty() {
                return Err(config_error("--lambda is required"));
            }
            let spec = QlBallSpec::new(a.n, a.ell, a.q)?;
            let opts = QlScanOptions { angles: a.angles, sphere_degree: a.max_degree, ..Default::default() };
            let out = classify_qlball_many(spec, &a.lambda, &opts)?;
            csv_text(&["lambda", "fourier", "sphere", "agree", "open_region", "min_h"], |w| {
                for c in &out {
                    if c.disagreement() {
                        failures.push(format!("λ = {}: Fourier and sphere verdicts disagree", c.lambda));
                    }
                    rec(
                        w,
                        &[
                            num(c.lambda),
                            c.fourier.verdict.as_str().into(),
                            c.sphere.as_ref().map_or("", |s| s.verdict.as_str()).into(),
                            c.agree.map_or(String::new(), |b| b.to_string()),
                            c.open_region.to_string(),
                            num(c.fourier.min_value),
                        ],
                    )?;
                }
                Ok(())
            })?
        }
        other => return Err(config_error(format!("unknown mode `{other}`"))),
    };
    sink.write(&text)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Math(failures.join("; ")))
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GbpForgeArgs {
    /// The body B (a smooth non-member at λ = n − i).
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// Expected dimension of B.
    #[arg(long)]
    pub n: Option<usize>,
    /// Section dimension (default n − 1).
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub frames: usize,
    #[arg(long, default_value_t = 20)]
    pub witness_frames: usize,
    /// Accept a certificate whose body A fails the convexity test.
    #[arg(long, default_value_t = false)]
    pub allow_nonconvex: bool,
    /// Remaining forge options (config file only).
    #[arg(skip)]
    pub forge: Option<Value>,
}

pub fn gbp_forge(a: GbpForgeArgs, sink: &Sink) -> Outcome {
    let b = need_body(&a.body, "body")?;
    let n = b.dim;
    if let Some(m) = a.n {
        if m != n {
            return Err(config_error(format!("--n {m} but the body lives in R^{n}")));
        }
    }
    let i = a.i.unwrap_or(n - 1);
    let mut opts = crate::merge_config(ForgeOptions::default(), a.forge.as_ref())?;
    opts.seed = a.seed;
    opts.frames = a.frames;
    opts.witness_frames = a.witness_frames;
    opts.require_convex = !a.allow_nonconvex;
    let forged = forge_counterexample(&b, i, &opts)?;
    let c = forged.certificate;
    let failures = if c.counterexample { Vec::new() } else { vec![format!("no counterexample: {}", c.status)] };
    let report = json!({
        "command": "gbp forge",
        "config": a,
        "seed": a.seed,
        "certificate": c,
    });
    finish(sink, &report, failures)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GbpVerifyArgs {
    /// Certificate written by `gbp forge`.
    pub certificate: PathBuf,
}

pub fn gbp_verify(a: GbpVerifyArgs, sink: &Sink) -> Outcome {
    let v = read_json(&a.certificate)?;
    let v = v.get("certificate").cloned().unwrap_or(v);
    let cert: GbpCertificate =
        serde_json::from_value(v).map_err(|e| config_error(format!("not a certificate: {e}")))?;
    let check = verify_certificate(&cert)?;
    let failures = if check.confirmed { Vec::new() } else { vec!["certificate not confirmed".to_string()] };
    let report = json!({
        "command": "gbp verify",
        "config": a,
        "seed": cert.seed,
        "status": cert.status,
        "check": check,
    });
    finish(sink, &report, failures)
}
