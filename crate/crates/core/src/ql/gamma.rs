use crate::error::{Error, Result};
use crate::special::gamma::{gamma, rgamma};
use crate::special::quad::adaptive_gk;
use crate::special::sphere_area;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// γ_{q,ℓ}(s) with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaValue {
    pub value: f64,
    pub error: f64,
    /// False when some adaptive panel budget ran out.
    pub converged: bool,
}

fn check(q: f64, ell: usize) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be positive (q = {q})")));
    }
    if ell == 0 {
        return Err(Error::Domain("ℓ must be at least 1".into()));
    }
    Ok(())
}

/// G(σ) = ∫_0^∞ e^{−r^q} r^{ℓ−1} cos(rσ) dr, integrated along the ray
/// z = τe^{iφ}; there both e^{−z^q} and e^{izσ} decay, so no oscillatory
/// cancellation is left.
fn slice_profile(q: f64, ell: usize, sigma: f64) -> GammaValue {
    let phi = (PI / 3.0).min(PI / (3.0 * q));
    let rot = Complex64::from_polar(1.0, phi);
    let rot_q = Complex64::from_polar(1.0, q * phi);
    let rot_l = Complex64::from_polar(1.0, ell as f64 * phi);
    let cut = 50.0;
    let t_q = (cut / (q * phi).cos()).powf(1.0 / q);
    let t_s = if sigma > 0.0 { cut / (sigma * phi.sin()) } else { f64::INFINITY };
    let top = t_q.min(t_s) * 1.2;
    let f = |tau: f64| -> f64 {
        if tau == 0.0 {
            return if ell == 1 { rot.re } else { 0.0 };
        }
        let z = rot * tau;
        let e = (-(rot_q * tau.powf(q)) + Complex64::i() * z * sigma).exp();
        (e * rot_l * tau.powi(ell as i32 - 1)).re
    };
    let scale = gamma(ell as f64 / q).unwrap_or(1.0) / q;
    let r = adaptive_gk(f, 0.0, top, 1e-17 * scale, 1e-14, 600);
    GammaValue { value: r.value, error: r.error, converged: r.converged }
}

/// γ_{q,ℓ}(s) = ∫_{R^ℓ} e^{−|y|^q} e^{iy·η} dy at |η| = s. For ℓ ≥ 2 the
/// projection-slice form C_ℓ ∫_0^π sin^{ℓ−2}θ G(s cos θ) dθ is used, with
/// C_ℓ = 2π^{(ℓ−1)/2}/Γ((ℓ−1)/2).
pub fn gamma_ql_detailed(q: f64, ell: usize, s: f64) -> Result<GammaValue> {
    check(q, ell)?;
    let s = s.abs();
    if ell == 1 {
        let g = slice_profile(q, 1, s);
        return Ok(GammaValue { value: 2.0 * g.value, error: 2.0 * g.error, converged: g.converged });
    }
    if s == 0.0 {
        return Ok(GammaValue { value: sphere_area(ell) * gamma(ell as f64 / q)? / q, error: 0.0, converged: true });
    }
    let c = 2.0 * PI.powf(0.5 * (ell as f64 - 1.0)) * rgamma(0.5 * (ell as f64 - 1.0));
    let mut ok = true;
    let mut inner_err = 0.0f64;
    let f = |th: f64| -> f64 {
        let g = slice_profile(q, ell, s * th.cos());
        if !g.converged {
            ok = false;
        }
        inner_err = inner_err.max(g.error);
        th.sin().powi(ell as i32 - 2) * g.value
    };
    let scale = gamma(ell as f64 / q)? / q;
    let r = adaptive_gk(f, 0.0, 0.5 * PI, 1e-16 * scale, 1e-13, 2000);
    Ok(GammaValue {
        value: 2.0 * c * r.value,
        error: 2.0 * c * (r.error + 0.5 * PI * inner_err),
        converged: r.converged && ok,
    })
}

pub fn gamma_ql(q: f64, ell: usize, s: f64) -> Result<f64> {
    Ok(gamma_ql_detailed(q, ell, s)?.value)
}

/// lim |η|^{ℓ+q} γ_{q,ℓ}(η) = 2^{ℓ+q}π^{ℓ/2−1}Γ(1+q/2)Γ((ℓ+q)/2) sin(πq/2).
pub fn asymptotic_constant(q: f64, ell: usize) -> Result<f64> {
    check(q, ell)?;
    let l = ell as f64;
    Ok(2f64.powf(l + q) * PI.powf(0.5 * l - 1.0) * gamma(1.0 + 0.5 * q)? * gamma(0.5 * (l + q))? * (PI * q / 2.0).sin())
}

/// Coefficients c_k of γ_{q,ℓ}(s) ~ Σ_{k≥1} c_k s^{−qk−ℓ}, from the termwise
/// transform of e^{−r^q} = Σ (−1)^k r^{qk}/k!.
fn asymptotic_coeffs(q: f64, ell: usize, terms: usize) -> Vec<f64> {
    let l = ell as f64;
    let mut out = Vec::with_capacity(terms);
    let mut fact = 1.0;
    for k in 1..=terms {
        let kf = k as f64;
        fact *= kf;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let c = sign / fact
            * 2f64.powf(q * kf + l)
            * PI.powf(0.5 * l)
            * gamma(0.5 * (q * kf + l)).unwrap_or(f64::INFINITY)
            * rgamma(-0.5 * q * kf);
        out.push(if c.is_finite() { c } else { 0.0 });
    }
    out
}

/// Sum of the asymptotic series up to its smallest term; returns (value, last term).
fn asymptotic_sum(coeffs: &[f64], q: f64, ell: usize, s: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        let term = c * s.powf(-q * (k + 1) as f64 - ell as f64);
        if term.abs() > prev && term != 0.0 {
            break;
        }
        if term != 0.0 {
            prev = term.abs();
        }
        sum += term;
        last = term.abs();
    }
    (sum, last)
}

/// Row of the large-s check: s^{ℓ+q}γ_{q,ℓ}(s) against the limit constant.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub s: f64,
    pub scaled: f64,
    pub constant: f64,
    pub rel_diff: f64,
    pub error: f64,
}

pub fn asymptotic_check(q: f64, ell: usize, s_list: &[f64]) -> Result<Vec<AsymptoticRow>> {
    let c = asymptotic_constant(q, ell)?;
    let even = (q / 2.0 - (q / 2.0).round()).abs() < 1e-12;
    s_list
        .iter()
        .map(|&s| {
            let g = gamma_ql_detailed(q, ell, s)?;
            let k = s.powf(ell as f64 + q);
            let scaled = k * g.value;
            // even q: the constant vanishes and the decay is faster than any power
            let rel_diff = if even { scaled.abs() } else { (scaled - c).abs() / c.abs() };
            Ok(AsymptoticRow { s, scaled, constant: if even { 0.0 } else { c }, rel_diff, error: k * g.error })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityScan {
    pub q: f64,
    pub ell: usize,
    pub min: f64,
    pub argmin: f64,
    /// First grid interval on which γ changes sign.
    pub first_sign_change: Option<(f64, f64)>,
    pub positive: bool,
}

pub fn gamma_ql_positivity_scan(q: f64, ell: usize, s_max: f64, points: usize) -> Result<PositivityScan> {
    if points < 2 || !(s_max > 0.0) {
        return Err(Error::Invalid("scan needs s_max > 0 and at least two points".into()));
    }
    let mut min = f64::INFINITY;
    let mut argmin = 0.0;
    let mut first = None;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..points {
        let s = s_max * k as f64 / (points - 1) as f64;
        let g = gamma_ql_detailed(q, ell, s)?;
        if g.value < min {
            min = g.value;
            argmin = s;
        }
        if let Some((ps, pv)) = prev {
            if first.is_none() && pv > g.error && g.value < -g.error {
                first = Some((ps, s));
            }
        }
        prev = Some((s, g.value));
    }
    Ok(PositivityScan { q, ell, min, argmin, first_sign_change: first, positive: min > 0.0 })
}

/// γ_{q,ℓ} on [0, ∞) for repeated evaluation: Chebyshev panels of width 2
/// up to a switch point, the asymptotic series (or zero, for even q) beyond.
#[derive(Debug, Clone)]
pub struct GammaTable {
    pub q: f64,
    pub ell: usize,
    pub switch: f64,
    panel: f64,
    nodes: usize,
    values: Vec<Vec<f64>>,
    coeffs: Vec<f64>,
    even: bool,
    pub max_error: f64,
}

impl GammaTable {
    pub fn new(q: f64, ell: usize) -> Result<Self> {
        check(q, ell)?;
        let even = (q / 2.0 - (q / 2.0).round()).abs() < 1e-12;
        let coeffs = if even { Vec::new() } else { asymptotic_coeffs(q, ell, 60) };
        let g0 = gamma_ql(q, ell, 0.0)?;
        // switch where the series (or the value itself, for even q) is negligible
        let mut switch = 300.0;
        let mut s = 8.0;
        while s <= 300.0 {
            if even {
                if gamma_ql(q, ell, s)?.abs() < 1e-15 * g0 {
                    switch = s;
                    break;
                }
            } else {
                let (v, last) = asymptotic_sum(&coeffs, q, ell, s);
                if last < 1e-12 * v.abs().max(1e-300) && last < 1e-15 * g0 {
                    switch = s;
                    break;
                }
            }
            s += 4.0;
        }
        let panel = 2.0;
        let nodes = 16;
        let count = (switch / panel).ceil() as usize;
        let mut values = Vec::with_capacity(count);
        let mut max_error = 0.0f64;
        for p in 0..count {
            let (lo, hi) = (p as f64 * panel, (p + 1) as f64 * panel);
            let mut row = Vec::with_capacity(nodes);
            for k in 0..nodes {
                let x = (PI * (k as f64 + 0.5) / nodes as f64).cos();
                let g = gamma_ql_detailed(q, ell, 0.5 * (lo + hi) + 0.5 * (hi - lo) * x)?;
                max_error = max_error.max(g.error);
                row.push(g.value);
            }
            values.push(row);
        }
        Ok(GammaTable { q, ell, switch: count as f64 * panel, panel, nodes, values, coeffs, even, max_error })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        if s >= self.switch {
            return if self.even { 0.0 } else { asymptotic_sum(&self.coeffs, self.q, self.ell, s).0 };
        }
        let p = ((s / self.panel) as usize).min(self.values.len() - 1);
        let (lo, hi) = (p as f64 * self.panel, (p + 1) as f64 * self.panel);
        let x = (2.0 * s - lo - hi) / (hi - lo);
        // barycentric interpolation at Chebyshev points of the first kind
        let n = self.nodes;
        let (mut num, mut den) = (0.0, 0.0);
        for (k, v) in self.values[p].iter().enumerate() {
            let th = PI * (k as f64 + 0.5) / n as f64;
            let xk = th.cos();
            let d = x - xk;
            if d.abs() < 1e-15 {
                return *v;
            }
            let w = if k % 2 == 0 { th.sin() } else { -th.sin() } / d;
            num += w * v;
            den += w;
        }
        num / den
    }
}
