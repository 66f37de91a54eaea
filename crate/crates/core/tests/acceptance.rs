//! End-to-end acceptance checks. Runs without the libtest harness so that
//! one PASS/FAIL line per criterion reaches the console; exits non-zero if
//! any criterion fails.

use sphtomo::gbp::{forge_counterexample, ForgeOptions};
use sphtomo::ib::{
    classify, classify_many, construct_ib, section_body, section_volumes, ClassifyOptions, ConstructOptions,
    ExampleKind, ExampleOptions, SphericalMeasure, Verdict, generate_example,
};
use sphtomo::ql::{asymptotic_check, classify_qlball, classify_qlball_many, gamma_ql, QlBallSpec, QlScanOptions};
use sphtomo::sphere::{
    body_volume, orthant_quadrature, product_quadrature, random_frame, random_frame_with, rng_for, section_volume,
    StarBody,
};
use sphtomo::transforms::suites::*;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

type Outcome = (bool, String);

fn inversion() -> Outcome {
    let alphas = [-2.5, -0.5, 0.5, 1.0 + PI / 7.0];
    let r = inversion_suite(&[3, 4, 5, 6], &alphas, 60, 1e-12).unwrap();
    (r.pass, format!("max |m_a m_(2-n-a) - 1| = {:.2e}", r.max_err))
}

fn funk() -> Outcome {
    let o = SuiteOptions { n: 4, max_degree: 16, functions: 20, seed: 2, ..Default::default() };
    let r = funk_round_trip(&o).unwrap();
    (r.pass, format!("max coefficient error = {:.2e}", r.max_err))
}

fn limit() -> Outcome {
    let o = SuiteOptions { n: 4, max_degree: 8, functions: 5, seed: 3, ..Default::default() };
    let alphas = [1e-1, 1e-2, 1e-3];
    let mut ok = true;
    let mut msg = Vec::new();
    for i in [1, 2, 3] {
        let r = limit_suite(&o, i, &alphas).unwrap();
        ok &= r.pass;
        let errs: Vec<String> = r.parameters["errors"]
            .as_array()
            .map(|v| v.iter().filter_map(|e| e.as_f64()).map(|e| format!("{e:.2e}")).collect())
            .unwrap_or_default();
        msg.push(format!("i={i}: {}", errs.join(" > ")));
    }
    (ok, msg.join("; "))
}

fn multiplier() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in [3, 4] {
        let o = SuiteOptions { n, max_degree: 16, functions: 5, points: 6, seed: 4, ..Default::default() };
        let r = multiplier_agreement(&o, 0.5).unwrap();
        ok &= r.pass;
        worst = worst.max(r.max_err);
    }
    (ok, format!("max relative error = {worst:.2e}"))
}

fn factorization() -> Outcome {
    let o = SuiteOptions { n: 4, max_degree: 6, functions: 10, points: 2, samples: 20000, seed: 5, ..Default::default() };
    let r = factorization_suite(&o, &[1, 2, 3]).unwrap();
    (
        r.pass,
        format!(
            "all points within 3 sigma: {}, max std err / sup f = {:.2e}",
            r.parameters["within_3_sigma"], r.std_err
        ),
    )
}

fn restriction() -> Outcome {
    let o = SuiteOptions { n: 4, max_degree: 8, functions: 10, seed: 6, ..Default::default() };
    let r = restriction_suite(&o, 3, 1, &[0.25, 0.5, 1.0]).unwrap();
    (r.pass, format!("max relative difference = {:.2e}", r.max_err))
}

fn positivity() -> Outcome {
    let o = SuiteOptions { n: 4, max_degree: 8, functions: 200, seed: 7, ..Default::default() };
    let mut ok = true;
    let mut msg = Vec::new();
    for (a, b) in [(0.5, -0.5), (1.5, -1.2)] {
        let r = positivity_suite(&o, a, b).unwrap();
        ok &= r.pass;
        msg.push(format!(
            "({a},{b}): {} worst -min/max = {:.2e}, a(0) = {:.4}, q-factorization error = {:.1e}",
            if r.pass { "ok" } else { "VIOLATED" },
            r.max_err,
            r.parameters["a0"].as_f64().unwrap(),
            r.parameters["q_factorization_error"].as_f64().unwrap()
        ));
    }
    (ok, msg.join("; "))
}

fn volumes() -> Outcome {
    let mut err: f64 = 0.0;
    for n in [3, 4, 5] {
        let ball = StarBody::ball(n);
        for k in [2, 3] {
            if k >= n {
                continue;
            }
            let v = section_volume(&ball, &random_frame(n, k, 10 + n as u64), &product_quadrature(k, 4).unwrap()).unwrap();
            let want = if k == 2 { PI } else { 4.0 * PI / 3.0 };
            err = err.max((v - want).abs());
        }
    }
    let v = body_volume(&StarBody::lq_ball(3, 1.0).unwrap(), &orthant_quadrature(3, 24, false).unwrap());
    let e1 = (v - 4.0 / 3.0).abs();
    (err <= 1e-10 && e1 <= 1e-6, format!("ball sections error = {err:.1e}, vol B_1^3 error = {e1:.1e}"))
}

fn construction() -> Outcome {
    let l = StarBody::ellipsoid(&[1.0, 1.3, 0.8]).unwrap().norm_blend(&StarBody::lq_ball(3, 4.0).unwrap(), 0.3, 2.0);
    let k = construct_ib(&l, 1.0, &ConstructOptions::default()).unwrap();
    let mut rng = rng_for(9, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let xi = random_frame_with(3, 1, &mut rng);
        let (a, b) = section_volumes(&k, &l, &xi, 40).unwrap();
        worst = worst.max((a - b).abs() / b);
    }
    (worst <= 1e-3, format!("max relative gap over 100 lines = {worst:.2e}"))
}

fn verdicts(body: &StarBody, lambdas: &[f64]) -> Vec<Verdict> {
    classify_many(body, lambdas, &ClassifyOptions::default()).unwrap().iter().map(|r| r.verdict).collect()
}

fn lq_classification() -> Outcome {
    use Verdict::*;
    let mut ok = true;
    let mut msg = Vec::new();
    let l = [0.5, 1.0, 1.9, 2.0, 2.5, 3.5];
    let v = verdicts(&StarBody::lq_ball(5, 4.0).unwrap(), &l);
    ok &= v == [NonMember, NonMember, NonMember, Member, Member, Member];
    msg.push(format!("B_4^5 {:?}", v.iter().map(|x| x.as_str()).collect::<Vec<_>>()));
    for q in [1.0, 1.5] {
        let v = verdicts(&StarBody::lq_ball(4, q).unwrap(), &[0.5, 1.5, 2.5, 3.5]);
        ok &= v.iter().all(|x| *x == Member);
        msg.push(format!("B_{q}^4 {:?}", v.iter().map(|x| x.as_str()).collect::<Vec<_>>()));
    }
    (ok, msg.join("; "))
}

fn ql_suite() -> Outcome {
    let start = Instant::now();
    let mut msg = Vec::new();
    let mut e2: f64 = 0.0;
    for ell in 1..=3 {
        for k in 0..=100 {
            let s = 0.5 * k as f64;
            let want = PI.powf(0.5 * ell as f64) * (-s * s / 4.0).exp();
            e2 = e2.max((gamma_ql(2.0, ell, s).unwrap() - want).abs());
        }
    }
    let mut ok = e2 <= 1e-10;
    msg.push(format!("gaussian error {e2:.1e}"));
    let mut worst: f64 = 0.0;
    for (q, ell) in [(1.0, 1), (1.0, 2), (1.5, 3), (3.0, 2)] {
        worst = worst.max(asymptotic_check(q, ell, &[200.0]).unwrap()[0].rel_diff);
    }
    ok &= worst <= 0.05;
    msg.push(format!("asymptotic constant gap {:.2}%", 100.0 * worst));
    let mut e11: f64 = 0.0;
    for k in 0..=400 {
        let s = 0.5 * k as f64;
        let want = 2.0 / (1.0 + s * s);
        e11 = e11.max((gamma_ql(1.0, 1, s).unwrap() - want).abs() / want);
    }
    ok &= e11 <= 1e-8;
    msg.push(format!("(1,1) closed form rel error {e11:.1e}"));
    let opts = QlScanOptions::default();
    let spec = QlBallSpec::new(5, 2, 1.5).unwrap();
    for c in classify_qlball_many(spec, &[1.0, 2.0, 3.0, 4.0], &opts).unwrap() {
        let lam = c.lambda;
        let good = c.fourier.verdict == Verdict::Member && c.agree != Some(false);
        ok &= good;
        if !good {
            msg.push(format!("q=1.5 λ={lam}: {:?} / {:?}", c.fourier.verdict, c.sphere.map(|s| s.verdict)));
        }
    }
    let c = classify_qlball(QlBallSpec::new(6, 2, 4.0).unwrap(), 1.0, &opts).unwrap();
    ok &= c.fourier.verdict == Verdict::NonMember;
    msg.push(format!("q=4 n=6 λ=1: {}", c.fourier.verdict.as_str()));
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    msg.push(format!("{secs:.0} s"));
    (ok, msg.join("; "))
}

fn gbp() -> Outcome {
    let start = Instant::now();
    let n = 5;
    let b = StarBody::lq_ball(n, 4.0).unwrap().norm_blend(&StarBody::ball(n), 0.1, 4.0);
    let f = forge_counterexample(&b, 4, &ForgeOptions::default()).unwrap();
    let c = &f.certificate;
    let secs = start.elapsed().as_secs_f64();
    let all_500 = c.frames.len() >= 500;
    let ok = all_500
        && c.max_section_excess <= 1e-6
        && c.pairing_negative
        && c.vol_gap > 10.0 * c.vol_gap_error
        && secs < 600.0;
    (
        ok,
        format!(
            "{} frames, max section excess {:.2e}, pairing {:.3e}, volume gap {:.3e} (error {:.1e}), status {}, {secs:.0} s",
            c.frames.len(),
            c.max_section_excess,
            c.pairing_multiplier,
            c.vol_gap,
            c.vol_gap_error,
            c.status
        ),
    )
}

fn closure_bodies() -> Vec<(String, StarBody)> {
    let n = 4;
    let mut out = vec![
        ("ball".to_string(), StarBody::ball(n)),
        ("ellipsoid".to_string(), StarBody::ellipsoid(&[1.0, 1.4, 0.8, 1.1]).unwrap()),
    ];
    let m = [1.0, 0.3, 0.0, 0.1, 0.0, 1.2, 0.2, 0.0, 0.1, 0.0, 0.9, 0.3, 0.0, 0.2, 0.0, 1.1];
    out.push(("linear_image".to_string(), StarBody::ball(n).linear_image(&m).unwrap()));
    let mu = SphericalMeasure::Density(Arc::new(|x: &[f64]| 1.0 + 0.6 * x[0] * x[0] + 0.8 * (x[1] * x[2]).powi(2)));
    let opts = ExampleOptions::default();
    let kind = ExampleKind::CosinePower { mu, n, i: 2, lambda: 1.5 };
    out.push(("cosine_power".to_string(), generate_example(&kind, &opts).unwrap().body));
    let l = StarBody::ellipsoid(&[1.2, 1.0, 0.9, 1.0]).unwrap();
    let kind = ExampleKind::Power { l, delta: 0.5, lambda: 1.5 };
    out.push(("power".to_string(), generate_example(&kind, &opts).unwrap().body));
    out
}

fn section_closure() -> Outcome {
    let lam = 1.5;
    let opts = ClassifyOptions::default();
    let mut ok = true;
    let mut msg = Vec::new();
    let mut rng = rng_for(13, 0);
    for (name, body) in closure_bodies() {
        let whole = classify(&body, lam, &opts).unwrap().verdict;
        if whole != Verdict::Member {
            ok = false;
            msg.push(format!("{name} not certified ({})", whole.as_str()));
            continue;
        }
        let mut members = 0;
        for _ in 0..20 {
            let eta = random_frame_with(4, 3, &mut rng);
            let v = classify(&section_body(&body, &eta), lam, &opts).unwrap().verdict;
            members += (v == Verdict::Member) as usize;
            if v == Verdict::NonMember {
                msg.push(format!("{name}: non-member section"));
            }
        }
        ok &= members == 20;
        msg.push(format!("{name} {members}/20"));
    }
    (ok, msg.join("; "))
}

fn main() {
    // keep the libtest-style filter argument harmless
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("multiplier inversion", inversion),
        ("funk inversion round trip", funk),
        ("radon limit of the generalized cosine transform", limit),
        ("quadrature vs multiplier", multiplier),
        ("funk factorization", factorization),
        ("restriction identities", restriction),
        ("positivity of the bridge operator", positivity),
        ("volume identities", volumes),
        ("intersection body construction", construction),
        ("classification of l_q balls", lq_classification),
        ("(q,l)-ball suite", ql_suite),
        ("busemann-petty counterexample", gbp),
        ("section closure", section_closure),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if let Some(f) = &filter {
            if !name.contains(f.as_str()) && f != &(k + 1).to_string() {
                continue;
            }
        }
        let t = Instant::now();
        let (pass, detail) = run();
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<48} {} ({:.1} s) {detail}",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
