use proptest::prelude::*;
use sphtomo::harmonic::{bridge_multiplier, cosine_multiplier};
use sphtomo::ib::{classify, classify_many, ClassifyOptions, Verdict};
use sphtomo::ql::{HKernel, QlBallSpec};
use sphtomo::special::log_gamma_signed;
use sphtomo::sphere::{dot, normalize, product_quadrature, random_frame, section_volume, StarBody};
use sphtomo::transforms::{cosine_transform, Budget};

fn near_pole(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gamma_recurrence(x in -10.0f64..10.0) {
        prop_assume!(!near_pole(x) && !near_pole(x + 1.0));
        let (l0, s0) = log_gamma_signed(x).unwrap();
        let (l1, s1) = log_gamma_signed(x + 1.0).unwrap();
        // Γ(x+1)/(xΓ(x)) = 1
        let ratio = (l1 - l0 - x.abs().ln()).exp() * s1 * s0 * x.signum();
        prop_assert!((ratio - 1.0).abs() <= 1e-12, "x = {x}: ratio {ratio}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn multipliers_invert(n in 3usize..8, alpha in -6.0f64..4.0, half_j in 0usize..11) {
        let j = 2 * half_j;
        let beta = 2.0 - n as f64 - alpha;
        let (Ok(a), Ok(b)) = (cosine_multiplier(j, alpha, n), cosine_multiplier(j, beta, n)) else {
            return Ok(());
        };
        prop_assert!((a * b - 1.0).abs() <= 1e-12, "n = {n}, α = {alpha}, j = {j}: {}", a * b);
    }

    #[test]
    fn bridge_is_a_ratio(n in 3usize..7, alpha in -1.5f64..1.8, beta in -1.5f64..1.8, half_j in 0usize..9) {
        let j = 2 * half_j;
        let (Ok(a), Ok(b), Ok(ab)) =
            (cosine_multiplier(j, alpha, n), cosine_multiplier(j, beta, n), bridge_multiplier(j, alpha, beta, n))
        else {
            return Ok(());
        };
        // A_{α,β} = M^α M^{2−n−β}, i.e. a(j) = m_α(j)/m_β(j)
        prop_assert!((ab - a / b).abs() <= 1e-12 * (1.0 + ab.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn transforms_fix_constants_and_parity(seed in 0u64..1000, n in 3usize..6, alpha in 0.3f64..3.0) {
        let u = random_frame(n, 1, seed).basis[0].clone();
        let minus: Vec<f64> = u.iter().map(|x| -x).collect();
        let budget = Budget::default();
        let Ok(c) = cosine_transform(&|_| 1.0, &u, alpha, budget) else { return Ok(()) };
        let m0 = cosine_multiplier(0, alpha, n).unwrap();
        prop_assert!((c - m0).abs() <= 1e-9 * m0.abs().max(1.0), "{c} vs {m0}");
        let a = normalize(&random_frame(n, 1, seed + 1).basis[0]);
        let f = move |x: &[f64]| 1.0 + dot(&a, x).powi(2) + 0.5 * x[0].powi(4);
        let p = cosine_transform(&f, &u, alpha, budget).unwrap();
        let q = cosine_transform(&f, &minus, alpha, budget).unwrap();
        prop_assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0));
    }

    #[test]
    fn quadrature_is_rotation_invariant(seed in 0u64..1000, n in 3usize..6, d in 1i32..5) {
        let rule = product_quadrature(n, 16).unwrap();
        let a = random_frame(n, 1, seed).basis[0].clone();
        let rotated = rule.integrate(|x| dot(&a, x).powi(2 * d));
        let axial = rule.integrate(|x| x[n - 1].powi(2 * d));
        prop_assert!((rotated - axial).abs() <= 1e-12);
    }

    #[test]
    fn ball_sections_do_not_depend_on_the_frame(seed in 0u64..1000, n in 3usize..7, k in 1usize..6) {
        prop_assume!(k < n);
        let ball = StarBody::ball(n);
        let base = product_quadrature(k, 8).unwrap();
        let v = section_volume(&ball, &random_frame(n, k, seed), &base).unwrap();
        let e = section_volume(&ball, &random_frame(n, k, seed + 7919), &base).unwrap();
        prop_assert!((v - e).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn h_is_homogeneous(a in 0.05f64..1.0, b in 0.05f64..1.0, t in 0.5f64..2.0, lam in 0.5f64..3.5) {
        let kernel = HKernel::new(QlBallSpec::new(5, 2, 1.5).unwrap()).unwrap();
        let p = -lam;
        let (h, e) = kernel.h(p, a, b).unwrap();
        let (ht, et) = kernel.h(p, t * a, t * b).unwrap();
        // degree −n−p
        let predicted = t.powf(-5.0 - p) * h;
        prop_assert!((ht - predicted).abs() <= 1e-6 * predicted.abs() + et + e * t.powf(-5.0 - p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2))]

    #[test]
    fn verdicts_are_scale_and_rotation_invariant(seed in 0u64..1000) {
        let opts = ClassifyOptions::default();
        let body = StarBody::lq_ball(4, 4.0).unwrap();
        let rot = random_frame(4, 4, seed).basis.concat();
        let rotated = body.linear_image(&rot).unwrap();
        for (lam, expected) in [(0.5, Verdict::NonMember), (1.5, Verdict::Member)] {
            for c in [0.5, 2.0] {
                let r = classify(&body.scaled(c), lam, &opts).unwrap();
                prop_assert_eq!(r.verdict, expected);
            }
            let r = classify(&rotated, lam, &opts).unwrap();
            prop_assert_eq!(r.verdict, expected, "rotated body at λ = {}: min {}", lam, r.min_value);
        }
    }
}

#[test]
fn lq_ball_verdict_flips_once_near_n_minus_3() {
    let body = StarBody::lq_ball(5, 4.0).unwrap();
    let lambdas: Vec<f64> = (1..=14).map(|k| 0.25 * k as f64).collect();
    let reports = classify_many(&body, &lambdas, &ClassifyOptions::default()).unwrap();
    let members: Vec<bool> = reports.iter().map(|r| r.verdict == Verdict::Member).collect();
    let flips = members.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 1, "{members:?}");
    let first = lambdas[members.iter().position(|&m| m).unwrap()];
    assert!((first - 2.0).abs() <= 0.25, "first member at λ = {first}");
}
