use crate::error::{Error, Result};
use crate::special::gamma::gamma;
use crate::special::near_nonpositive_integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// s_λ ρ_K^λ = M^{1−λ} µ.
    Normalized,
    /// λ = −2ℓ: ρ_K^{−2ℓ} = M̃^{1+2ℓ} µ.
    RawEvenNegative,
}

/// The parameter λ together with its branch and the sign factor s_λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaParam {
    pub value: f64,
    pub n: usize,
    pub branch: Branch,
    pub s: f64,
}

const EPS: f64 = 1e-9;

impl LambdaParam {
    /// Rejects λ ∈ {0} ∪ {n, n+2, …}; λ ∈ {−2, −4, …} selects the raw branch.
    pub fn new(value: f64, n: usize) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain("λ must be finite".into()));
        }
        if value.abs() < EPS {
            return Err(Error::Pole("λ = 0 is excluded".into()));
        }
        let d = value - n as f64;
        if d > -EPS && near_nonpositive_integer(-0.5 * d, EPS) {
            return Err(Error::Pole(format!("λ = {value} lies in {{n, n+2, …}} for n = {n}")));
        }
        if value < 0.0 && near_nonpositive_integer(0.5 * value, EPS) {
            return Ok(LambdaParam { value, n, branch: Branch::RawEvenNegative, s: 1.0 });
        }
        let s = if value > 0.0 { 1.0 } else { gamma(0.5 * value)? };
        Ok(LambdaParam { value, n, branch: Branch::Normalized, s })
    }

    pub fn ell(&self) -> Option<usize> {
        match self.branch {
            Branch::RawEvenNegative => Some((-0.5 * self.value).round() as usize),
            Branch::Normalized => None,
        }
    }

    /// Order of the cosine transform in the membership criterion: 1 + λ − n.
    pub fn criterion_alpha(&self) -> f64 {
        1.0 + self.value - self.n as f64
    }
}

/// c_{λ,n} = π^{λ−n/2}(n−λ)/|λ|. The absolute value keeps the constant
/// positive for λ < 0, where IB_λ of a star body must have ρ_K^λ > 0.
pub fn c_lambda_n(lambda: f64, n: usize) -> f64 {
    let nf = n as f64;
    PI.powf(lambda - 0.5 * nf) * (nf - lambda) / lambda.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches() {
        let l = LambdaParam::new(1.5, 4).unwrap();
        assert_eq!(l.branch, Branch::Normalized);
        assert_eq!(l.s, 1.0);
        let l = LambdaParam::new(-1.0, 4).unwrap();
        assert!((l.s + 2.0 * PI.sqrt()).abs() < 1e-12);
        let l = LambdaParam::new(-4.0, 4).unwrap();
        assert_eq!(l.branch, Branch::RawEvenNegative);
        assert_eq!(l.ell(), Some(2));
        assert!(LambdaParam::new(0.0, 4).is_err());
        assert!(LambdaParam::new(4.0, 4).is_err());
        assert!(LambdaParam::new(6.0, 4).is_err());
        assert!(LambdaParam::new(5.0, 4).is_ok());
    }
}
