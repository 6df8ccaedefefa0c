use std::fmt;

use num::{BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// `(1 - P₁)^alpha · P₂^beta`, where `P₁ = Σ t_i` and `P₂ = Σ t_i²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisElement {
    pub alpha: u32,
    pub beta: u32,
}

impl BasisElement {
    pub fn degree(&self) -> u32 {
        self.alpha + 2 * self.beta
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.alpha, self.beta) {
            (0, 0) => f.write_str("1"),
            (a, 0) => write!(f, "(1-P1)^{a}"),
            (0, b) => write!(f, "P2^{b}"),
            (a, b) => write!(f, "(1-P1)^{a}*P2^{b}"),
        }
    }
}

/// All elements with `alpha + 2 beta <= degree_cap`, by degree then `beta`.
pub fn symmetric_basis(degree_cap: u32) -> Vec<BasisElement> {
    let mut out = Vec::new();
    for d in 0..=degree_cap {
        for beta in 0..=d / 2 {
            out.push(BasisElement {
                alpha: d - 2 * beta,
                beta,
            });
        }
    }
    out
}

/// A symmetric polynomial `F = Σ c_j b_j` on the simplex, zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPoly {
    pub k: usize,
    pub terms: Vec<(BasisElement, BigRational)>,
}

impl SymmetricPoly {
    pub fn constant(k: usize, value: BigRational) -> Self {
        SymmetricPoly {
            k,
            terms: vec![(BasisElement { alpha: 0, beta: 0 }, value)],
        }
    }

    pub fn zero(k: usize) -> Self {
        SymmetricPoly { k, terms: Vec::new() }
    }

    pub fn new(k: usize, terms: Vec<(BasisElement, BigRational)>) -> Self {
        SymmetricPoly { k, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_zero())
    }

    /// `F(t)`, which vanishes unless all `t_i ≥ 0` and `Σ t_i ≤ 1`.
    pub fn eval(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.k, "point has wrong dimension");
        if t.iter().any(|&x| x < 0.0) {
            return 0.0;
        }
        let p1: f64 = t.iter().sum();
        if p1 > 1.0 {
            return 0.0;
        }
        let p2: f64 = t.iter().map(|x| x * x).sum();
        self.terms
            .iter()
            .map(|(b, c)| {
                c.to_f64().unwrap_or(0.0) * (1.0 - p1).powi(b.alpha as i32) * p2.powi(b.beta as i32)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(symmetric_basis(0).len(), 1);
        assert_eq!(symmetric_basis(1).len(), 2);
        assert_eq!(symmetric_basis(2).len(), 4);
        assert_eq!(symmetric_basis(11).len(), 42);
        assert!(symmetric_basis(11).iter().all(|b| b.degree() <= 11));
    }

    #[test]
    fn evaluation_respects_support() {
        let f = SymmetricPoly::new(
            2,
            vec![(BasisElement { alpha: 1, beta: 0 }, BigRational::from_integer(1.into()))],
        );
        assert!((f.eval(&[0.2, 0.3]) - 0.5).abs() < 1e-15);
        assert_eq!(f.eval(&[0.7, 0.5]), 0.0);
        assert_eq!(f.eval(&[-0.1, 0.5]), 0.0);
        assert_eq!(BasisElement { alpha: 2, beta: 1 }.to_string(), "(1-P1)^2*P2^1");
    }
}
