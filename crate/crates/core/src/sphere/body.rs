use super::frame::{dot, norm, random_rotation_fixing_with, random_unit_vector, rng_for, unit_vector};
use crate::error::{Error, Result};
use crate::special::normalized_gegenbauer;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::sync::Arc;

/// Declared invariance group of a body, used to select fast paths.
#[derive(Debug, Clone, PartialEq)]
pub enum Symmetry {
    /// Invariant under rotations fixing the axis.
    Zonal(Vec<f64>),
    /// Invariant under SO(n−ℓ) × SO(ℓ) acting on the first n−ℓ and the last
    /// ℓ coordinates.
    Bizonal(usize),
    /// Invariant under permutations and sign changes of the coordinates.
    Coordinate,
    Generic,
}

impl Symmetry {
    pub fn tag(&self) -> &'static str {
        match self {
            Symmetry::Zonal(_) => "zonal",
            Symmetry::Bizonal(_) => "bizonal",
            Symmetry::Coordinate => "coordinate",
            Symmetry::Generic => "generic",
        }
    }
}

pub type RadialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Radial function sampled on a hyperspherical-angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRadial {
    pub n: usize,
    /// Intervals per polar angle ψ_1..ψ_{n−2} on [0, π], then the number of
    /// azimuth samples on [0, 2π).
    pub counts: Vec<usize>,
    pub values: Vec<f64>,
}

/// Hyperspherical angles (ψ_1, …, ψ_{n−2}, φ) with θ_n = cos ψ_1 and so on.
pub fn hyperspherical_angles(theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    let mut out = Vec::with_capacity(n - 1);
    let mut tail_sq: f64 = theta.iter().map(|x| x * x).sum();
    for k in (2..n).rev() {
        let r = tail_sq.max(0.0).sqrt();
        let c = if r > 0.0 { (theta[k] / r).clamp(-1.0, 1.0) } else { 1.0 };
        out.push(c.acos());
        tail_sq -= theta[k] * theta[k];
    }
    let mut phi = theta[1].atan2(theta[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    out.push(phi);
    out
}

/// Inverse of [`hyperspherical_angles`].
pub fn from_hyperspherical(angles: &[f64]) -> Vec<f64> {
    let n = angles.len() + 1;
    let mut x = vec![0.0; n];
    let mut r = 1.0;
    for (idx, k) in (2..n).rev().enumerate() {
        x[k] = r * angles[idx].cos();
        r *= angles[idx].sin();
    }
    let phi = angles[n - 2];
    x[0] = r * phi.cos();
    x[1] = r * phi.sin();
    x
}

impl TabulatedRadial {
    fn axis_len(&self, a: usize) -> usize {
        if a + 1 == self.counts.len() {
            self.counts[a]
        } else {
            self.counts[a] + 1
        }
    }

    fn total(&self) -> usize {
        (0..self.counts.len()).map(|a| self.axis_len(a)).product()
    }

    /// Samples a radial function on the grid.
    pub fn sample(n: usize, counts: &[usize], f: &dyn Fn(&[f64]) -> f64) -> Result<Self> {
        if counts.len() != n - 1 || counts.iter().any(|&c| c < 2) {
            return Err(Error::InvalidBody("tabulated grid needs n−1 axes with ≥ 2 samples".into()));
        }
        let mut t = TabulatedRadial { n, counts: counts.to_vec(), values: Vec::new() };
        let total = t.total();
        let mut values = Vec::with_capacity(total);
        for idx in 0..total {
            values.push(f(&from_hyperspherical(&t.angles_of(idx))));
        }
        t.values = values;
        t.validate()?;
        Ok(t)
    }

    fn angles_of(&self, mut idx: usize) -> Vec<f64> {
        let m = self.counts.len();
        let mut a = vec![0.0; m];
        for ax in (0..m).rev() {
            let len = self.axis_len(ax);
            let i = idx % len;
            idx /= len;
            a[ax] = if ax + 1 == m {
                2.0 * PI * i as f64 / len as f64
            } else {
                PI * i as f64 / self.counts[ax] as f64
            };
        }
        a
    }

    /// Checks positivity, size and the neighbour-jump continuity bound.
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.total() {
            return Err(Error::InvalidBody(format!(
                "tabulated grid expects {} values, got {}",
                self.total(),
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidBody("tabulated radial values must be positive".into()));
        }
        let vmax = self.values.iter().cloned().fold(0.0, f64::max);
        let m = self.counts.len();
        let mut stride = 1;
        for ax in (0..m).rev() {
            let len = self.axis_len(ax);
            let h = if ax + 1 == m { 2.0 * PI / len as f64 } else { PI / self.counts[ax] as f64 };
            for idx in 0..self.values.len() {
                let i = (idx / stride) % len;
                let j = if i + 1 < len {
                    idx + stride
                } else if ax + 1 == m {
                    idx + stride - len * stride
                } else {
                    continue;
                };
                let jump = (self.values[idx] - self.values[j]).abs();
                if jump > 50.0 * vmax * h {
                    return Err(Error::InvalidBody(format!(
                        "tabulated radial function jumps by {jump:.3e} across one cell (axis {ax})"
                    )));
                }
            }
            stride *= len;
        }
        Ok(())
    }

    /// Multilinear interpolation at a unit vector.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        let ang = hyperspherical_angles(theta);
        let m = self.counts.len();
        let mut base = Vec::with_capacity(m);
        let mut frac = Vec::with_capacity(m);
        for ax in 0..m {
            let len = self.axis_len(ax);
            let pos = if ax + 1 == m {
                ang[ax] / (2.0 * PI) * len as f64
            } else {
                ang[ax] / PI * self.counts[ax] as f64
            };
            let mut i = pos.floor() as isize;
            let limit = if ax + 1 == m { len as isize } else { self.counts[ax] as isize };
            if ax + 1 != m && i >= limit {
                i = limit - 1;
            }
            base.push(i);
            frac.push(pos - i as f64);
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << m) {
            let mut w = 1.0;
            let mut idx = 0usize;
            for ax in 0..m {
                let bit = (corner >> ax) & 1;
                let len = self.axis_len(ax) as isize;
                let mut i = base[ax] + bit as isize;
                if ax + 1 == m {
                    i = i.rem_euclid(len);
                }
                w *= if bit == 1 { frac[ax] } else { 1.0 - frac[ax] };
                idx = idx * len as usize + i as usize;
            }
            if w != 0.0 {
                acc += w * self.values[idx];
            }
        }
        acc
    }
}

/// A modification applied to a base body.
#[derive(Clone)]
pub enum Modifier {
    /// Dilation by a factor.
    Scale(f64),
    /// Image under a linear map T (row-major); stores T^{−1}.
    Linear { matrix: Vec<f64>, inverse: Vec<f64> },
    /// ρ(θ)·(1 + a (θ·w)^{2p}).
    ZonalBump { axis: Vec<f64>, amplitude: f64, power: u32 },
    /// ρ(θ)^γ.
    Power(f64),
    /// ‖x‖ = ((1−w)‖x‖_base^q + w‖x‖_other^q)^{1/q}.
    NormBlend { other: Box<StarBody>, weight: f64, q: f64 },
}

#[derive(Clone)]
pub enum BodyKind {
    Ball { radius: f64 },
    /// Unit ball of the ℓ_q norm.
    Lq { q: f64 },
    /// (|x'|^q + |x''|^q)^{1/q} ≤ 1 with x' the first n−ℓ coordinates.
    Ql { q: f64, ell: usize },
    Tabulated(Arc<TabulatedRadial>),
    /// ρ(θ)^power = Σ_j c_j C̃_j(θ·axis).
    ZonalProfile { axis: Vec<f64>, power: f64, coeffs: Vec<f64> },
    Perturbed { base: Box<StarBody>, modifier: Modifier },
    Custom { name: String, f: RadialFn },
}

/// Origin-symmetric star body in R^n given by its radial function.
#[derive(Clone)]
pub struct StarBody {
    pub dim: usize,
    pub kind: BodyKind,
    pub symmetry: Symmetry,
}

impl std::fmt::Debug for StarBody {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StarBody({}, n={}, {})", self.kind_name(), self.dim, self.symmetry.tag())
    }
}

impl StarBody {
    pub fn ball(n: usize) -> Self {
        StarBody { dim: n, kind: BodyKind::Ball { radius: 1.0 }, symmetry: Symmetry::Zonal(unit_vector(n, n - 1)) }
    }

    pub fn lq_ball(n: usize, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::InvalidBody(format!("ℓ_q ball needs q > 0 (q={q})")));
        }
        let symmetry = if q == 2.0 { Symmetry::Zonal(unit_vector(n, n - 1)) } else { Symmetry::Coordinate };
        Ok(StarBody { dim: n, kind: BodyKind::Lq { q }, symmetry })
    }

    pub fn ql_ball(n: usize, q: f64, ell: usize) -> Result<Self> {
        if !(q > 0.0) || ell == 0 || ell >= n {
            return Err(Error::InvalidBody(format!("(q,ℓ)-ball needs q > 0, 0 < ℓ < n (q={q}, ℓ={ell})")));
        }
        let symmetry = if q == 2.0 {
            Symmetry::Zonal(unit_vector(n, n - 1))
        } else if ell == 1 {
            Symmetry::Zonal(unit_vector(n, n - 1))
        } else if ell == n - 1 {
            Symmetry::Zonal(unit_vector(n, 0))
        } else {
            Symmetry::Bizonal(ell)
        };
        Ok(StarBody { dim: n, kind: BodyKind::Ql { q, ell }, symmetry })
    }

    /// Ellipsoid with the given semi-axes along the coordinate directions.
    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        let n = semi_axes.len();
        if semi_axes.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::InvalidBody("ellipsoid semi-axes must be positive".into()));
        }
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            m[k * n + k] = semi_axes[k];
        }
        StarBody::ball(n).linear_image(&m)
    }

    pub fn custom(n: usize, name: &str, symmetry: Symmetry, f: RadialFn) -> Self {
        StarBody { dim: n, kind: BodyKind::Custom { name: name.to_string(), f }, symmetry }
    }

    pub fn zonal_profile(axis: &[f64], power: f64, coeffs: Vec<f64>) -> Self {
        let n = axis.len();
        let a = super::frame::normalize(axis);
        StarBody {
            dim: n,
            kind: BodyKind::ZonalProfile { axis: a.clone(), power, coeffs },
            symmetry: Symmetry::Zonal(a),
        }
    }

    pub fn tabulated(t: TabulatedRadial) -> Result<Self> {
        t.validate()?;
        Ok(StarBody { dim: t.n, kind: BodyKind::Tabulated(Arc::new(t)), symmetry: Symmetry::Generic })
    }

    fn perturbed(&self, modifier: Modifier, symmetry: Symmetry) -> Self {
        StarBody { dim: self.dim, kind: BodyKind::Perturbed { base: Box::new(self.clone()), modifier }, symmetry }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.perturbed(Modifier::Scale(c), self.symmetry.clone())
    }

    pub fn powered(&self, gamma: f64) -> Self {
        self.perturbed(Modifier::Power(gamma), self.symmetry.clone())
    }

    pub fn linear_image(&self, matrix: &[f64]) -> Result<Self> {
        let n = self.dim;
        let m = nalgebra::DMatrix::from_row_slice(n, n, matrix);
        let inv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidBody("linear map is singular".into()))?;
        let mut inverse = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                inverse.push(inv[(i, j)]);
            }
        }
        Ok(self.perturbed(Modifier::Linear { matrix: matrix.to_vec(), inverse }, Symmetry::Generic))
    }

    pub fn with_zonal_bump(&self, axis: &[f64], amplitude: f64, power: u32) -> Self {
        let a = super::frame::normalize(axis);
        let sym = match &self.symmetry {
            Symmetry::Zonal(ax) if (dot(ax, &a).abs() - 1.0).abs() < 1e-12 => self.symmetry.clone(),
            _ => Symmetry::Generic,
        };
        self.perturbed(Modifier::ZonalBump { axis: a, amplitude, power }, sym)
    }

    pub fn norm_blend(&self, other: &StarBody, weight: f64, q: f64) -> Self {
        let sym = if other.symmetry == self.symmetry || matches!(other.kind, BodyKind::Ball { .. }) {
            self.symmetry.clone()
        } else {
            Symmetry::Generic
        };
        self.perturbed(Modifier::NormBlend { other: Box::new(other.clone()), weight, q }, sym)
    }

    /// Overrides the declared symmetry (checked by [`StarBody::check_symmetry`]).
    pub fn with_symmetry(mut self, s: Symmetry) -> Self {
        self.symmetry = s;
        self
    }

    pub fn kind_name(&self) -> &str {
        match &self.kind {
            BodyKind::Ball { .. } => "euclidean_ball",
            BodyKind::Lq { .. } => "lq_ball",
            BodyKind::Ql { .. } => "ql_ball",
            BodyKind::Tabulated(_) => "tabulated",
            BodyKind::ZonalProfile { .. } => "zonal_profile",
            BodyKind::Perturbed { .. } => "perturbed",
            BodyKind::Custom { name, .. } => name,
        }
    }

    /// ρ_K(θ) for a unit vector θ.
    pub fn radial(&self, theta: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius } => *radius,
            BodyKind::Lq { q } => 1.0 / lq_norm(theta, *q),
            BodyKind::Ql { q, ell } => {
                let split = self.dim - ell;
                let a: f64 = theta[..split].iter().map(|x| x * x).sum::<f64>().sqrt();
                let b: f64 = theta[split..].iter().map(|x| x * x).sum::<f64>().sqrt();
                1.0 / lq_norm(&[a, b], *q)
            }
            BodyKind::Tabulated(t) => t.eval(theta),
            BodyKind::ZonalProfile { axis, power, coeffs } => {
                let t = dot(theta, axis).clamp(-1.0, 1.0);
                zonal_series(self.dim, coeffs, t).powf(1.0 / power)
            }
            BodyKind::Perturbed { base, modifier } => match modifier {
                Modifier::Scale(c) => c * base.radial(theta),
                Modifier::Power(g) => base.radial(theta).powf(*g),
                Modifier::ZonalBump { axis, amplitude, power } => {
                    base.radial(theta) * (1.0 + amplitude * dot(theta, axis).powi(2 * *power as i32))
                }
                Modifier::Linear { inverse, .. } => {
                    let n = self.dim;
                    let y: Vec<f64> = (0..n).map(|i| dot(&inverse[i * n..(i + 1) * n], theta)).collect();
                    1.0 / base.norm(&y)
                }
                Modifier::NormBlend { other, weight, q } => {
                    let a = 1.0 / base.radial(theta);
                    let b = 1.0 / other.radial(theta);
                    1.0 / ((1.0 - weight) * a.powf(*q) + weight * b.powf(*q)).powf(1.0 / q)
                }
            },
            BodyKind::Custom { f, .. } => f(theta),
        }
    }

    /// Minkowski functional ‖x‖_K = |x| / ρ_K(x/|x|).
    pub fn norm(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        if r == 0.0 {
            return 0.0;
        }
        match &self.kind {
            BodyKind::Lq { q } => lq_norm(x, *q),
            _ => {
                let th: Vec<f64> = x.iter().map(|v| v / r).collect();
                r / self.radial(&th)
            }
        }
    }

    /// Checks positivity and origin symmetry on random samples.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = rng_for(seed, 17);
        for _ in 0..samples {
            let th = random_unit_vector(self.dim, &mut rng);
            let a = self.radial(&th);
            let neg: Vec<f64> = th.iter().map(|x| -x).collect();
            let b = self.radial(&neg);
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidBody(format!("radial function not positive: ρ = {a}")));
            }
            if (a - b).abs() > 1e-9 * a.max(b) {
                return Err(Error::InvalidBody(format!("body not origin-symmetric: {a} vs {b}")));
            }
        }
        Ok(())
    }

    /// Samples the declared symmetry; errors if it does not hold.
    pub fn check_symmetry(&self, samples: usize, seed: u64) -> Result<()> {
        let n = self.dim;
        let mut rng = rng_for(seed, 23);
        for s in 0..samples {
            let th = random_unit_vector(n, &mut rng);
            let image: Vec<f64> = match &self.symmetry {
                Symmetry::Generic => continue,
                Symmetry::Zonal(axis) => {
                    let r = random_rotation_fixing_with(axis, &mut rng);
                    r.apply(&th)
                }
                Symmetry::Bizonal(ell) => {
                    let split = n - ell;
                    let mut y = th.clone();
                    rotate_block(&mut y[..split], &mut rng);
                    rotate_block(&mut y[split..], &mut rng);
                    y
                }
                Symmetry::Coordinate => {
                    let mut perm: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        perm.swap(i, rng.gen_range(0..=i));
                    }
                    perm.iter()
                        .map(|&p| if rng.gen::<bool>() { th[p] } else { -th[p] })
                        .collect()
                }
            };
            let a = self.radial(&th);
            let b = self.radial(&image);
            if (a - b).abs() > 1e-8 * a.max(b) {
                return Err(Error::InvalidBody(format!(
                    "declared {} symmetry fails at sample {s}: {a} vs {b}",
                    self.symmetry.tag()
                )));
            }
        }
        Ok(())
    }

    /// Midpoint convexity test on sampled pairs of boundary points:
    /// ‖(x+y)/2‖_K ≤ 1. Returns the worst violation (≤ 0 when passed).
    pub fn midpoint_convexity_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = rng_for(seed, 29);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..samples {
            let a = random_unit_vector(self.dim, &mut rng);
            // nearby partner so local concavity is seen, plus far partners
            let spread = if rng.gen::<bool>() { 0.05 } else { 1.0 };
            let d = random_unit_vector(self.dim, &mut rng);
            let b: Vec<f64> = a.iter().zip(&d).map(|(x, y)| x + spread * y).collect();
            let b = super::frame::normalize(&b);
            let x: Vec<f64> = a.iter().map(|v| v * self.radial(&a)).collect();
            let y: Vec<f64> = b.iter().map(|v| v * self.radial(&b)).collect();
            let m: Vec<f64> = x.iter().zip(&y).map(|(p, q)| 0.5 * (p + q)).collect();
            worst = worst.max(self.norm(&m) - 1.0);
        }
        worst
    }

    /// Serializable description. Bodies without a closed form are tabulated
    /// on a grid with `counts` intervals per angle.
    pub fn to_spec(&self, counts: usize) -> Result<BodySpec> {
        let n = self.dim;
        let params = match &self.kind {
            BodyKind::Ball { radius } => json!({ "radius": radius }),
            BodyKind::Lq { q } => json!({ "q": q }),
            BodyKind::Ql { q, ell } => json!({ "q": q, "ell": ell }),
            BodyKind::ZonalProfile { axis, power, coeffs } => {
                json!({ "axis": axis, "power": power, "coeffs": coeffs })
            }
            BodyKind::Tabulated(t) => json!({ "counts": t.counts, "values": t.values }),
            BodyKind::Perturbed { base, modifier } => {
                let m = match modifier {
                    Modifier::Scale(c) => json!({ "type": "scale", "factor": c }),
                    Modifier::Power(g) => json!({ "type": "power", "exponent": g }),
                    Modifier::Linear { matrix, .. } => json!({ "type": "linear", "matrix": matrix }),
                    Modifier::ZonalBump { axis, amplitude, power } => {
                        json!({ "type": "zonal_bump", "axis": axis, "amplitude": amplitude, "power": power })
                    }
                    Modifier::NormBlend { other, weight, q } => json!({
                        "type": "norm_blend",
                        "other": serde_json::to_value(other.to_spec(counts)?).unwrap(),
                        "weight": weight,
                        "q": q
                    }),
                };
                json!({ "base": serde_json::to_value(base.to_spec(counts)?).unwrap(), "modifier": m })
            }
            BodyKind::Custom { .. } => {
                let mut c = vec![counts; n - 1];
                c[n - 2] = 2 * counts;
                let f = |x: &[f64]| self.radial(x);
                let t = TabulatedRadial::sample(n, &c, &f)?;
                return Ok(BodySpec {
                    kind: "tabulated".into(),
                    n,
                    params: json!({ "counts": t.counts, "values": t.values }),
                    symmetry_tag: Some(self.symmetry.tag().into()),
                    axis: None,
                    ell: None,
                });
            }
        };
        let (axis, ell) = match &self.symmetry {
            Symmetry::Zonal(a) => (Some(a.clone()), None),
            Symmetry::Bizonal(l) => (None, Some(*l)),
            _ => (None, None),
        };
        Ok(BodySpec {
            kind: self.kind_name().to_string(),
            n,
            params,
            symmetry_tag: Some(self.symmetry.tag().into()),
            axis,
            ell,
        })
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        let n = spec.n;
        if n < 2 {
            return Err(Error::InvalidBody("body dimension must be ≥ 2".into()));
        }
        let p = &spec.params;
        let num = |k: &str| -> Result<f64> {
            p.get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::InvalidBody(format!("body parameter `{k}` missing or not a number")))
        };
        let vecf = |v: &Value, k: &str| -> Result<Vec<f64>> {
            v.get(k)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidBody(format!("body parameter `{k}` must be an array")))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::InvalidBody(format!("`{k}` has a non-number"))))
                .collect()
        };
        let body = match spec.kind.as_str() {
            "euclidean_ball" | "ball" => {
                let r = p.get("radius").and_then(Value::as_f64).unwrap_or(1.0);
                let b = StarBody::ball(n);
                if r == 1.0 { b } else { b.scaled(r) }
            }
            "lq_ball" => StarBody::lq_ball(n, num("q")?)?,
            "ql_ball" => StarBody::ql_ball(n, num("q")?, num("ell")? as usize)?,
            "ellipsoid" => {
                let a = vecf(p, "semi_axes")?;
                if a.len() != n {
                    return Err(Error::InvalidBody("ellipsoid needs n semi-axes".into()));
                }
                StarBody::ellipsoid(&a)?
            }
            "zonal_profile" => {
                let axis = vecf(p, "axis")?;
                if axis.len() != n {
                    return Err(Error::InvalidBody("zonal axis has wrong dimension".into()));
                }
                StarBody::zonal_profile(&axis, num("power")?, vecf(p, "coeffs")?)
            }
            "tabulated" => {
                let counts: Vec<usize> = vecf(p, "counts")?.iter().map(|c| *c as usize).collect();
                StarBody::tabulated(TabulatedRadial { n, counts, values: vecf(p, "values")? })?
            }
            "perturbed" => {
                let base: BodySpec = serde_json::from_value(p.get("base").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::InvalidBody(format!("perturbed base: {e}")))?;
                let base = StarBody::from_spec(&base)?;
                let m = p.get("modifier").ok_or_else(|| Error::InvalidBody("modifier missing".into()))?;
                let mnum = |k: &str| -> Result<f64> {
                    m.get(k).and_then(Value::as_f64).ok_or_else(|| Error::InvalidBody(format!("modifier `{k}` missing")))
                };
                match m.get("type").and_then(Value::as_str).unwrap_or("") {
                    "scale" => base.scaled(mnum("factor")?),
                    "power" => base.powered(mnum("exponent")?),
                    "linear" => base.linear_image(&vecf(m, "matrix")?)?,
                    "zonal_bump" => base.with_zonal_bump(&vecf(m, "axis")?, mnum("amplitude")?, mnum("power")? as u32),
                    "norm_blend" => {
                        let o: BodySpec = serde_json::from_value(m.get("other").cloned().unwrap_or(Value::Null))
                            .map_err(|e| Error::InvalidBody(format!("norm_blend other: {e}")))?;
                        base.norm_blend(&StarBody::from_spec(&o)?, mnum("weight")?, mnum("q")?)
                    }
                    other => return Err(Error::InvalidBody(format!("unknown modifier `{other}`"))),
                }
            }
            other => return Err(Error::InvalidBody(format!("unknown body kind `{other}`"))),
        };
        let body = match spec.symmetry_tag.as_deref() {
            None => body,
            Some("generic") => body.with_symmetry(Symmetry::Generic),
            Some("coordinate") => body.with_symmetry(Symmetry::Coordinate),
            Some("zonal") => {
                let axis = match (&spec.axis, &body.symmetry) {
                    (Some(a), _) => super::frame::normalize(a),
                    (None, Symmetry::Zonal(a)) => a.clone(),
                    _ => unit_vector(n, n - 1),
                };
                body.with_symmetry(Symmetry::Zonal(axis))
            }
            Some("bizonal") => {
                let ell = match (&spec.ell, &body.symmetry) {
                    (Some(l), _) => *l,
                    (None, Symmetry::Bizonal(l)) => *l,
                    _ => return Err(Error::InvalidBody("bizonal tag needs `ell`".into())),
                };
                body.with_symmetry(Symmetry::Bizonal(ell))
            }
            Some(t) => return Err(Error::InvalidBody(format!("unknown symmetry tag `{t}`"))),
        };
        body.validate(64, 1)?;
        body.check_symmetry(32, 2)?;
        Ok(body)
    }
}

fn rotate_block<R: Rng>(y: &mut [f64], rng: &mut R) {
    let k = y.len();
    if k < 2 {
        if k == 1 && rng.gen::<bool>() {
            y[0] = -y[0];
        }
        return;
    }
    let f = super::frame::random_frame_with(k, k, rng);
    let x = y.to_vec();
    for (i, b) in f.basis.iter().enumerate() {
        y[i] = dot(b, &x);
    }
}

fn lq_norm(x: &[f64], q: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Σ_j c_j C̃_j(t) on S^{n−1}.
pub fn zonal_series(n: usize, coeffs: &[f64], t: f64) -> f64 {
    let mut s = 0.0;
    for (j, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            s += c * normalized_gegenbauer(j, n, t);
        }
    }
    s
}

/// On-disk body description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_round_trip() {
        let mut rng = rng_for(1, 0);
        for n in 2..=6 {
            for _ in 0..50 {
                let th = random_unit_vector(n, &mut rng);
                let back = from_hyperspherical(&hyperspherical_angles(&th));
                for (a, b) in th.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tabulated_interpolates_smooth_body() {
        let e = StarBody::ellipsoid(&[1.0, 1.3, 0.8]).unwrap();
        let f = |x: &[f64]| e.radial(x);
        let t = TabulatedRadial::sample(3, &[64, 128], &f).unwrap();
        let tb = StarBody::tabulated(t).unwrap();
        let mut rng = rng_for(2, 0);
        for _ in 0..200 {
            let th = random_unit_vector(3, &mut rng);
            assert!((tb.radial(&th) - e.radial(&th)).abs() < 2e-3);
        }
        tb.validate(100, 3).unwrap();
    }

    #[test]
    fn tabulated_rejects_jumps() {
        let f = |x: &[f64]| if x[0] > 0.3 { 1.0 } else { 20.0 };
        assert!(TabulatedRadial::sample(3, &[256, 512], &f).is_err());
    }

    #[test]
    fn declared_symmetries_hold() {
        StarBody::lq_ball(5, 4.0).unwrap().check_symmetry(50, 1).unwrap();
        StarBody::ql_ball(6, 4.0, 2).unwrap().check_symmetry(50, 1).unwrap();
        StarBody::ql_ball(5, 4.0, 1).unwrap().check_symmetry(50, 1).unwrap();
        let wrong = StarBody::ellipsoid(&[1.0, 2.0, 3.0]).unwrap().with_symmetry(Symmetry::Coordinate);
        assert!(wrong.check_symmetry(50, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let b = StarBody::lq_ball(4, 1.5).unwrap().with_zonal_bump(&[0.0, 0.0, 0.0, 1.0], 0.1, 2);
        let s = b.to_spec(8).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back = StarBody::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
        let mut rng = rng_for(4, 0);
        for _ in 0..20 {
            let th = random_unit_vector(4, &mut rng);
            assert_eq!(b.radial(&th), back.radial(&th));
        }
    }

    #[test]
    fn ql_ball_with_q2_is_ball() {
        let b = StarBody::ql_ball(5, 2.0, 2).unwrap();
        let mut rng = rng_for(5, 0);
        for _ in 0..20 {
            let th = random_unit_vector(5, &mut rng);
            assert!((b.radial(&th) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn convexity_test_flags_nonconvex() {
        assert!(StarBody::lq_ball(3, 4.0).unwrap().midpoint_convexity_defect(2000, 1) <= 1e-12);
        assert!(StarBody::lq_ball(3, 0.5).unwrap().midpoint_convexity_defect(2000, 1) > 1e-3);
    }
}
