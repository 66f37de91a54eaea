use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Deterministic generator for (seed, stream).
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let r = norm(a);
    a.iter().map(|x| x / r).collect()
}

pub fn unit_vector(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

pub fn random_unit_vector<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if norm(&v) > 1e-8 {
            return normalize(&v);
        }
    }
}

// Gram–Schmidt of `v` against an orthonormal set, applied twice.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

/// Orthonormal basis of a k-dimensional subspace ξ ∈ G_{n,k}.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceFrame {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
}

impl SubspaceFrame {
    /// Orthonormalizes the given spanning vectors.
    pub fn from_vectors(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::Invalid("frame vector has wrong dimension".into()));
            }
            let mut w = v.clone();
            orthogonalize(&mut w, &basis);
            let r = norm(&w);
            if r < 1e-10 {
                return Err(Error::Invalid("frame vectors are linearly dependent".into()));
            }
            basis.push(w.iter().map(|x| x / r).collect());
        }
        Ok(SubspaceFrame { dim, basis })
    }

    /// Span of the coordinate axes with the given indices.
    pub fn coordinate(dim: usize, axes: &[usize]) -> Self {
        SubspaceFrame { dim, basis: axes.iter().map(|&a| unit_vector(dim, a)).collect() }
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                e = e.max((dot(a, b) - target).abs());
            }
        }
        e
    }

    /// Coordinates of x in the frame basis.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, x)).collect()
    }

    /// Embeds frame coordinates into R^n.
    pub fn embed(&self, c: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (ci, b) in c.iter().zip(&self.basis) {
            for (xk, bk) in x.iter_mut().zip(b) {
                *xk += ci * bk;
            }
        }
        x
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.embed(&self.coords(x))
    }

    /// Orthogonal complement ξ^⊥.
    pub fn complement(&self) -> SubspaceFrame {
        let mut basis = self.basis.clone();
        let mut out = Vec::new();
        for a in 0..self.dim {
            if basis.len() == self.dim {
                break;
            }
            let mut e = unit_vector(self.dim, a);
            orthogonalize(&mut e, &basis);
            let r = norm(&e);
            if r > 1e-6 {
                let v: Vec<f64> = e.iter().map(|x| x / r).collect();
                basis.push(v.clone());
                out.push(v);
            }
        }
        SubspaceFrame { dim: self.dim, basis: out }
    }

    /// Intersection ξ ∩ η, computed as the null space of the projection onto
    /// η^⊥ restricted to ξ.
    pub fn intersect(&self, other: &SubspaceFrame) -> Result<SubspaceFrame> {
        let perp = other.complement();
        let k = self.k();
        let mut g = nalgebra::DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                g[(i, j)] = perp
                    .basis
                    .iter()
                    .map(|p| dot(&self.basis[i], p) * dot(&self.basis[j], p))
                    .sum();
            }
        }
        let eig = nalgebra::SymmetricEigen::new(g);
        let mut vectors = Vec::new();
        for (r, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev.abs() < 1e-12 {
                let c: Vec<f64> = (0..k).map(|j| eig.eigenvectors[(j, r)]).collect();
                vectors.push(self.embed(&c));
            }
        }
        if vectors.is_empty() {
            return Err(Error::Invalid("subspaces intersect trivially".into()));
        }
        SubspaceFrame::from_vectors(self.dim, &vectors)
    }

    /// Expresses another subspace of this one in frame coordinates.
    pub fn restrict(&self, sub: &SubspaceFrame) -> SubspaceFrame {
        SubspaceFrame { dim: self.k(), basis: sub.basis.iter().map(|b| self.coords(b)).collect() }
    }

    /// Lifts a frame written in this frame's coordinates back into R^n.
    pub fn lift(&self, sub: &SubspaceFrame) -> SubspaceFrame {
        SubspaceFrame { dim: self.dim, basis: sub.basis.iter().map(|b| self.embed(b)).collect() }
    }
}

/// Length of Pr_{ξ⊥}θ and its direction; direction is None when the length
/// is below 1e−14 (θ ∈ ξ).
pub fn project_orth(frame: &SubspaceFrame, theta: &[f64]) -> (f64, Option<Vec<f64>>) {
    let p = frame.project(theta);
    let r: Vec<f64> = theta.iter().zip(&p).map(|(a, b)| a - b).collect();
    let len = norm(&r);
    if len < 1e-14 {
        (len, None)
    } else {
        (len, Some(r.iter().map(|x| x / len).collect()))
    }
}

/// k random orthonormal vectors orthogonal to the given orthonormal set,
/// Haar-distributed in its complement.
pub fn random_completion<R: rand::Rng>(span: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = span.first().map(|v| v.len()).unwrap_or(0);
    let mut all = span.to_vec();
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        orthogonalize(&mut v, &all);
        let r = norm(&v);
        if r < 1e-8 {
            continue;
        }
        let v: Vec<f64> = v.iter().map(|x| x / r).collect();
        all.push(v.clone());
        out.push(v);
    }
    out
}

/// Haar-random k-dimensional subspace of R^n.
pub fn random_frame(n: usize, k: usize, seed: u64) -> SubspaceFrame {
    random_frame_with(n, k, &mut rng_for(seed, 0))
}

pub fn random_frame_with<R: rand::Rng>(n: usize, k: usize, rng: &mut R) -> SubspaceFrame {
    loop {
        let vs: Vec<Vec<f64>> =
            (0..k).map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect()).collect();
        if let Ok(f) = SubspaceFrame::from_vectors(n, &vs) {
            return f;
        }
    }
}

/// Dense n×n rotation, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    pub n: usize,
    pub m: Vec<f64>,
}

impl Rotation {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(&self.m[i * self.n..(i + 1) * self.n], x)).collect()
    }
}

/// A Haar-random rotation in the stabilizer of θ: r θ = θ.
pub fn random_rotation_fixing(theta: &[f64], seed: u64) -> Rotation {
    random_rotation_fixing_with(theta, &mut rng_for(seed, 0))
}

pub fn random_rotation_fixing_with<R: rand::Rng>(theta: &[f64], rng: &mut R) -> Rotation {
    let n = theta.len();
    let t = normalize(theta);
    // a fixed orthonormal basis q of θ^⊥ and a Haar-random one w; r = θθᵀ + Σ w_k q_kᵀ
    let q = SubspaceFrame::from_vectors(n, &[t.clone()]).unwrap().complement().basis;
    let mut w: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut span = vec![t.clone()];
    while w.len() < n - 1 {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        orthogonalize(&mut v, &span);
        let r = norm(&v);
        if r < 1e-8 {
            continue;
        }
        let v: Vec<f64> = v.iter().map(|x| x / r).collect();
        span.push(v.clone());
        w.push(v);
    }
    // keep det = +1
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = t[i] * t[j];
            for k in 0..n - 1 {
                s += w[k][i] * q[k][j];
            }
            m[i * n + j] = s;
        }
    }
    let mut rot = Rotation { n, m };
    if det(&rot) < 0.0 && n > 2 {
        // flip the last w column
        for i in 0..n {
            for j in 0..n {
                rot.m[i * n + j] -= 2.0 * w[n - 2][i] * q[n - 2][j];
            }
        }
    }
    rot
}

fn det(r: &Rotation) -> f64 {
    nalgebra::DMatrix::from_row_slice(r.n, r.n, &r.m).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_are_orthonormal() {
        for s in 0..20 {
            let f = random_frame(5, 3, s);
            assert!(f.gram_error() < 1e-12);
            let c = f.complement();
            assert_eq!(c.k(), 2);
            for a in &f.basis {
                for b in &c.basis {
                    assert!(dot(a, b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotation_fixes_theta() {
        let mut rng = rng_for(3, 1);
        for s in 0..20 {
            let th = random_unit_vector(4, &mut rng);
            let r = random_rotation_fixing(&th, s);
            let y = r.apply(&th);
            for (a, b) in y.iter().zip(&th) {
                assert!((a - b).abs() < 1e-14);
            }
            assert!((det(&r) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_cases() {
        let f = SubspaceFrame::coordinate(3, &[2]);
        let (l, d) = project_orth(&f, &[0.0, 0.0, 1.0]);
        assert!(l < 1e-14 && d.is_none());
        let (l, d) = project_orth(&f, &[1.0, 0.0, 0.0]);
        assert!((l - 1.0).abs() < 1e-15 && d.unwrap()[0] == 1.0);
        let psi: f64 = 0.7;
        let (l, _) = project_orth(&f, &[psi.sin(), 0.0, psi.cos()]);
        assert!((l - psi.sin().abs()).abs() < 1e-15);
    }

    #[test]
    fn line_moment() {
        // E (b₁·e₁)² = 1/4 for Haar lines in R^4
        let mut rng = rng_for(11, 0);
        let n = 100_000;
        let vals: Vec<f64> = (0..n).map(|_| random_frame_with(4, 1, &mut rng).basis[0][0].powi(2)).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - 0.25).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn intersection_of_subspaces() {
        let a = random_frame(4, 3, 1);
        let b = random_frame(4, 3, 2);
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.k(), 2);
        let ap = a.complement();
        let bp = b.complement();
        for v in &c.basis {
            assert!(dot(v, &ap.basis[0]).abs() < 1e-12 && dot(v, &bp.basis[0]).abs() < 1e-12);
        }
    }
}
