use super::classify::{classify_many, rule_kind_name, ClassificationReport, ClassifyOptions, Verdict};
use super::lambda::{Branch, LambdaParam};
use crate::error::{Error, Result};
use crate::sphere::{product_quadrature_even, StarBody};
use nalgebra::{DMatrix, DVector};

/// Relative residual below which the atomic fit certifies membership.
pub const LSQ_MEMBER_TOL: f64 = 1e-6;
/// Relative residual above which no non-negative atomic measure on the grid fits.
pub const LSQ_NON_MEMBER_TOL: f64 = 1e-3;

/// Lawson–Hanson non-negative least squares: argmin ‖Ax − b‖ over x ≥ 0.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = a.ncols();
    let mut x = DVector::zeros(k);
    let mut passive = vec![false; k];
    let scale = a.amax() * b.amax().max(1e-300);
    let tol = 1e-13 * scale * a.nrows() as f64;
    for _ in 0..3 * k {
        let w = a.transpose() * (b - a * &x);
        let cand = (0..k).filter(|&j| !passive[j]).max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j) = cand else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            let ap = a.select_columns(&idx);
            let z = match ap.clone().svd(true, true).solve(b, 1e-14) {
                Ok(z) => z,
                Err(_) => return x,
            };
            if z.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (c, &i) in idx.iter().enumerate() {
                    x[i] = z[c];
                }
                break;
            }
            let mut step = f64::INFINITY;
            for (c, &i) in idx.iter().enumerate() {
                if z[c] <= 0.0 {
                    let d = x[i] - z[c];
                    if d > 0.0 {
                        step = step.min(x[i] / d);
                    }
                }
            }
            if !step.is_finite() {
                step = 0.0;
            }
            for (c, &i) in idx.iter().enumerate() {
                x[i] += step * (z[c] - x[i]);
                if x[i] <= 1e-15 * scale {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

/// Result of fitting ρ_K^{−2ℓ}(u) = Σ_k μ_k |θ_k·u|^{2ℓ} with μ ≥ 0.
#[derive(Debug, Clone)]
pub struct AtomicFit {
    pub atoms: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
    /// max_u |fit − target| / max target, over the test directions.
    pub residual: f64,
}

/// Non-negative atomic fit on the nodes of an even product rule.
pub fn atomic_fit(body: &StarBody, power: f64, atom_res: usize, test_res: usize) -> Result<AtomicFit> {
    let n = body.dim;
    let atoms: Vec<Vec<f64>> = product_quadrature_even(n, atom_res)?.nodes.chunks_exact(n).map(|x| x.to_vec()).collect();
    let tests: Vec<Vec<f64>> = product_quadrature_even(n, test_res)?.nodes.chunks_exact(n).map(|x| x.to_vec()).collect();
    let kernel = |u: &[f64], th: &[f64]| crate::sphere::dot(u, th).abs().powf(power);
    let a = DMatrix::from_fn(tests.len(), atoms.len(), |i, k| kernel(&tests[i], &atoms[k]));
    let b = DVector::from_iterator(tests.len(), tests.iter().map(|u| body.radial(u).powf(-power)));
    let x = nnls(&a, &b);
    let r = &a * &x - &b;
    let residual = r.amax() / b.amax();
    Ok(AtomicFit { atoms, masses: x.iter().cloned().collect(), residual })
}

/// Embedding of (R^n, ‖·‖_K) into L_p, tested as K ∈ I_{−p}^n. For p ∉ 2N
/// this is the Poisson-smoothed positivity test at λ = −p; for p = 2ℓ it is
/// a non-negative least-squares fit of ‖u‖_K^{2ℓ} = ∫|θ·u|^{2ℓ}dμ(θ), a
/// discrete surrogate for the existence of μ.
pub fn classify_negative(body: &StarBody, p: f64, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive (p = {p})")));
    }
    let lp = LambdaParam::new(-p, body.dim)?;
    if lp.branch == Branch::Normalized {
        return Ok(classify_many(body, &[-p], opts)?.remove(0));
    }
    let n = body.dim;
    let atom_res = opts.resolution.unwrap_or(p as usize + 4);
    let fit = atomic_fit(body, p, atom_res, atom_res + 7)?;
    let verdict = if fit.residual <= LSQ_MEMBER_TOL {
        Verdict::Member
    } else if fit.residual >= LSQ_NON_MEMBER_TOL {
        Verdict::NonMember
    } else {
        Verdict::Inconclusive
    };
    let (iw, _) = fit.masses.iter().enumerate().fold((0, 0.0), |b, (i, m)| if *m > b.1 { (i, *m) } else { b });
    Ok(ClassificationReport {
        body: body.kind_name().to_string(),
        n,
        lambda: -p,
        branch: Branch::RawEvenNegative,
        verdict,
        min_value: -fit.residual,
        tolerance: LSQ_MEMBER_TOL,
        scale: 1.0,
        witness: fit.atoms[iw].clone(),
        levels: Vec::new(),
        max_degree: p as usize,
        rule_kind: rule_kind_name(crate::sphere::RuleKind::Product).to_string(),
        rule_nodes: fit.atoms.len(),
        outputs: 0,
        note: format!(
            "non-negative least squares over {} grid atoms: relative residual {:.3e}; a discrete surrogate, the \
             witness is the heaviest atom",
            fit.atoms.len(),
            fit.residual
        ),
    })
}
