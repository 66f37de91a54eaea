//! One-dimensional quadrature: Gauss–Jacobi (Golub–Welsch seeded, Newton
//! polished), adaptive Gauss–Kronrod and a double-exponential rule.

use super::gamma::log_gamma_signed;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let v: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&v)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Pairwise summation with a fixed reduction tree.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

// Jacobi polynomial P_N^{(a,b)}(x) and P_{N-1}.
fn jacobi_pair(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    if n == 0 {
        return (p0, 0.0);
    }
    let mut p1 = 0.5 * (a - b + (a + b + 2.0) * x);
    for k in 1..n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let a1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * c;
        let a2 = (c + 1.0) * (a * a - b * b);
        let a3 = c * (c + 1.0) * (c + 2.0);
        let a4 = 2.0 * (k + a) * (k + b) * (c + 2.0);
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Gauss–Jacobi rule for the weight (1−x)^a (1+x)^b on [−1, 1], a, b > −1.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Rule1d> {
    if n == 0 {
        return Err(Error::Invalid("gauss_jacobi: zero nodes".into()));
    }
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::Integrability(format!(
            "Jacobi weight exponents must exceed -1 (a={a}, b={b})"
        )));
    }
    let ab = a + b;
    // Golub–Welsch for initial nodes
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let d = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        m[(k, k)] = d;
        if k + 1 < n {
            let j = kf + 1.0;
            let beta = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            let s = beta.sqrt();
            m[(k, k + 1)] = s;
            m[(k + 1, k)] = s;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let nf = n as f64;
    // log of Γ(N+a+1)Γ(N+b+1) 2^{a+b+1} / (Γ(N+a+b+1) N!)
    let lc = log_gamma_signed(nf + a + 1.0)?.0 + log_gamma_signed(nf + b + 1.0)?.0
        - log_gamma_signed(nf + ab + 1.0)?.0
        - log_gamma_signed(nf + 1.0)?.0
        + (ab + 1.0) * std::f64::consts::LN_2;
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        let mut dp = 1.0;
        for _ in 0..3 {
            let (p, pm) = jacobi_pair(n, a, b, *x);
            dp = (nf * ((a - b) - (2.0 * nf + ab) * *x) * p + 2.0 * (nf + a) * (nf + b) * pm)
                / ((2.0 * nf + ab) * (1.0 - *x * *x));
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *x -= step;
            if step.abs() < 1e-16 {
                let (p, pm) = jacobi_pair(n, a, b, *x);
                dp = (nf * ((a - b) - (2.0 * nf + ab) * *x) * p
                    + 2.0 * (nf + a) * (nf + b) * pm)
                    / ((2.0 * nf + ab) * (1.0 - *x * *x));
                break;
            }
        }
        let w = (lc - (1.0 - *x * *x).ln() - 2.0 * dp.abs().ln()).exp();
        weights.push(w);
    }
    Ok(Rule1d { nodes, weights })
}

/// Gauss–Legendre on [lo, hi].
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Rule1d {
    let r = gauss_jacobi(n, 0.0, 0.0).expect("legendre rule");
    let h = 0.5 * (hi - lo);
    Rule1d {
        nodes: r.nodes.iter().map(|&x| lo + h * (x + 1.0)).collect(),
        weights: r.weights.iter().map(|&w| w * h).collect(),
    }
}

/// Gauss rule on [0, 1] for the weight x^p (1−x)^q.
pub fn gauss_beta(n: usize, p: f64, q: f64) -> Result<Rule1d> {
    let r = gauss_jacobi(n, q, p)?;
    let scale = 2f64.powf(-p - q - 1.0);
    Ok(Rule1d {
        nodes: r.nodes.iter().map(|&y| 0.5 * (1.0 + y)).collect(),
        weights: r.weights.iter().map(|&w| w * scale).collect(),
    })
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: (integral, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let x = h * GK_XK[i];
        let s = f(c - x) + f(c + x);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive Gauss–Kronrod integration on [a, b].
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> AdaptiveResult {
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return AdaptiveResult { value: total, error: err, converged: true };
        }
        if panels.len() >= max_panels {
            return AdaptiveResult { value: total, error: err, converged: false };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Double-exponential (tanh-sinh) rule on [a, b]; robust against algebraic
/// endpoint singularities. `f` receives (x, distance to a, distance to b).
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, levels: usize) -> f64 {
    let half = 0.5 * (b - a);
    let h0 = 1.0 / 16.0;
    let tmax = 4.5;
    let mut sum = 0.0;
    let n = ((tmax / h0) as i64) << levels;
    let h = h0 / (1u64 << levels) as f64;
    for k in -n..=n {
        let t = k as f64 * h;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        // distances to the endpoints, computed without cancellation
        // 1 ∓ tanh(u) = e^{∓u}/cosh(u), evaluated without cancellation
        let (da, db) = if u >= 0.0 {
            let e = (-u).exp() / ch;
            (half * (2.0 - e), half * e)
        } else {
            let e = u.exp() / ch;
            (half * e, half * (2.0 - e))
        };
        if da <= 0.0 || db <= 0.0 {
            continue;
        }
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (ch * ch);
        if w < 1e-300 {
            continue;
        }
        let x = a + da;
        sum += w * f(x, da, db);
    }
    sum * h * half
}
