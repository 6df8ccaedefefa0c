//! Gram matrices of the two quadratic forms
//!
//! ```text
//! I_k(F)  = ∫_{Δ_k} F²
//! ΣJ_k(F) = Σ_m ∫_{Δ_{k-1}} (∫ F dt_m)²
//! ```
//!
//! over a basis of symmetric polynomials. By symmetry every `m` contributes
//! the same amount, so `ΣJ = k · J^{(k)}`. For `b = (1-P₁)^α P₂^β`, write
//! `s = 1 - P₁'` (sum over the other `k-1` coordinates); then
//!
//! ```text
//! ∫_0^s (s - t)^α (P₂' + t²)^β dt = Σ_j C(β,j) α!(2j)!/(α+2j+1)! · s^{α+2j+1} P₂'^{β-j}
//! ```
//!
//! which is again a combination of `(1-P₁')^a P₂'^c` on `Δ_{k-1}`.
//!
//! Entries are stored multiplied by `k!` (see [`QuadraticForms::scale`]),
//! which leaves every Rayleigh quotient unchanged.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::basis::{symmetric_basis, BasisElement, SymmetricPoly};
use super::integrals::{factorial, scaled_symmetric_integral};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuadraticForms {
    pub k: usize,
    pub basis: Vec<BasisElement>,
    /// `k! · ΣJ(b_i, b_j)`
    pub a: Vec<Vec<BigRational>>,
    /// `k! · I(b_i, b_j)`
    pub b: Vec<Vec<BigRational>>,
    pub a_f64: DMatrix<f64>,
    pub b_f64: DMatrix<f64>,
}

/// `(exponent of 1-P₁', exponent of P₂', coefficient)` terms of `∫ b dt_m`.
fn section_terms(e: BasisElement) -> Vec<(u32, u32, BigRational)> {
    let alpha = e.alpha as u64;
    (0..=e.beta)
        .map(|j| {
            let binom = factorial(e.beta as u64) / (factorial(j as u64) * factorial((e.beta - j) as u64));
            let coeff = BigRational::new(
                binom * factorial(alpha) * factorial(2 * j as u64),
                factorial(alpha + 2 * j as u64 + 1),
            );
            (e.alpha + 2 * j + 1, e.beta - j, coeff)
        })
        .collect()
}

pub fn build_forms(k: usize, degree_cap: u32) -> Result<QuadraticForms> {
    build_forms_for(k, &symmetric_basis(degree_cap))
}

pub fn build_forms_for(k: usize, basis: &[BasisElement]) -> Result<QuadraticForms> {
    if k == 0 {
        return Err(crate::error::invalid("k", "must be at least 1"));
    }
    if basis.is_empty() {
        return Err(crate::error::invalid("basis", "must not be empty"));
    }
    if k == 1 {
        check_univariate_independence(basis)?;
    }
    Ok(assemble(k, basis))
}

fn assemble(k: usize, basis: &[BasisElement]) -> QuadraticForms {
    let k64 = k as u64;

    // integral tables, keyed by (power of 1-P1, power of P2)
    let mut b_keys: Vec<(u32, u32)> = Vec::new();
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i..] {
            b_keys.push((x.alpha + y.alpha, x.beta + y.beta));
        }
    }
    let sections: Vec<Vec<(u32, u32, BigRational)>> = basis.iter().map(|&e| section_terms(e)).collect();
    let mut a_keys: Vec<(u32, u32)> = Vec::new();
    for (i, si) in sections.iter().enumerate() {
        for sj in &sections[i..] {
            for s in si {
                for t in sj {
                    a_keys.push((s.0 + t.0, s.1 + t.1));
                }
            }
        }
    }
    b_keys.sort_unstable();
    b_keys.dedup();
    a_keys.sort_unstable();
    a_keys.dedup();
    let b_table: HashMap<(u32, u32), BigRational> = b_keys
        .par_iter()
        .map(|&(p, q)| ((p, q), scaled_symmetric_integral(k64, p, q)))
        .collect();
    let a_table: HashMap<(u32, u32), BigRational> = a_keys
        .par_iter()
        .map(|&(p, q)| ((p, q), scaled_symmetric_integral(k64 - 1, p, q)))
        .collect();

    // k!·k·∫_{Δ_{k-1}} = k² · (k-1)!∫_{Δ_{k-1}}
    let k_sq = BigRational::from_integer(BigInt::from(k64 * k64));
    let n = basis.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries: Vec<(BigRational, BigRational)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (basis[i], basis[j]);
            let b_ij = b_table[&(x.alpha + y.alpha, x.beta + y.beta)].clone();
            let mut a_ij = BigRational::zero();
            for s in &sections[i] {
                for t in &sections[j] {
                    a_ij += &s.2 * &t.2 * &a_table[&(s.0 + t.0, s.1 + t.1)];
                }
            }
            (a_ij * &k_sq, b_ij)
        })
        .collect();

    let mut a = vec![vec![BigRational::zero(); n]; n];
    let mut b = vec![vec![BigRational::zero(); n]; n];
    for (&(i, j), (a_ij, b_ij)) in pairs.iter().zip(entries) {
        a[i][j] = a_ij.clone();
        a[j][i] = a_ij;
        b[i][j] = b_ij.clone();
        b[j][i] = b_ij;
    }
    let a_f64 = DMatrix::from_fn(n, n, |i, j| a[i][j].to_f64().unwrap_or(f64::NAN));
    let b_f64 = DMatrix::from_fn(n, n, |i, j| b[i][j].to_f64().unwrap_or(f64::NAN));
    QuadraticForms {
        k,
        basis: basis.to_vec(),
        a,
        b,
        a_f64,
        b_f64,
    }
}

// For k = 1, P₂ = t² is a polynomial in 1-P₁, so the basis can be dependent.
// For k >= 2, P₁ and P₂ are algebraically independent and it never is.
fn check_univariate_independence(basis: &[BasisElement]) -> Result<()> {
    let max_deg = basis.iter().map(|e| e.degree()).max().unwrap_or(0) as usize;
    // coefficients of (1-t)^a t^{2b} in powers of t
    let expand = |e: &BasisElement| -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); max_deg + 1];
        let a = e.alpha as u64;
        for i in 0..=a {
            let binom = factorial(a) / (factorial(i) * factorial(a - i));
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            v[i as usize + 2 * e.beta as usize] = BigRational::from_integer(binom * sign);
        }
        v
    };
    // echelon rows keyed by pivot column
    let mut rows: Vec<(usize, Vec<BigRational>)> = Vec::new();
    for (index, e) in basis.iter().enumerate() {
        let mut v = expand(e);
        for (pivot, row) in &rows {
            if !v[*pivot].is_zero() {
                let f = &v[*pivot] / &row[*pivot];
                for c in 0..v.len() {
                    let d = &f * &row[c];
                    v[c] -= d;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => rows.push((p, v)),
            None => {
                return Err(Error::DegenerateBasis {
                    index,
                    label: e.to_string(),
                })
            }
        }
    }
    Ok(())
}

impl QuadraticForms {
    /// The common factor `k!` by which stored entries exceed true integrals.
    pub fn scale(&self) -> BigInt {
        factorial(self.k as u64)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// True value of `I(b_i, b_j)`.
    pub fn true_b(&self, i: usize, j: usize) -> BigRational {
        &self.b[i][j] / BigRational::from_integer(self.scale())
    }

    /// True value of `ΣJ(b_i, b_j)`.
    pub fn true_a(&self, i: usize, j: usize) -> BigRational {
        &self.a[i][j] / BigRational::from_integer(self.scale())
    }

    fn quadratic(m: &[Vec<BigRational>], c: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let mut row = BigRational::zero();
            for (j, cj) in c.iter().enumerate() {
                if !cj.is_zero() {
                    row += &m[i][j] * cj;
                }
            }
            acc += ci * row;
        }
        acc
    }

    /// `I_k(F)` for `F = Σ c_i b_i`.
    pub fn i_value(&self, c: &[BigRational]) -> BigRational {
        Self::quadratic(&self.b, c) / BigRational::from_integer(self.scale())
    }

    /// `Σ_m J_k^{(m)}(F)` for `F = Σ c_i b_i`.
    pub fn j_total(&self, c: &[BigRational]) -> BigRational {
        Self::quadratic(&self.a, c) / BigRational::from_integer(self.scale())
    }

    /// `ΣJ(F) / I(F)`, exactly; `None` when `I(F) = 0`.
    pub fn rayleigh_quotient(&self, c: &[BigRational]) -> Option<BigRational> {
        let den = Self::quadratic(&self.b, c);
        if den.is_zero() || den.is_negative() {
            return None;
        }
        Some(Self::quadratic(&self.a, c) / den)
    }
}

/// `I_k(F)` of a symmetric polynomial, exactly.
pub fn i_k(f: &SymmetricPoly) -> Result<BigRational> {
    if f.is_zero() {
        return Ok(BigRational::zero());
    }
    let (forms, c) = forms_of(f)?;
    Ok(forms.i_value(&c))
}

/// `Σ_m J_k^{(m)}(F)` of a symmetric polynomial, exactly.
pub fn j_total(f: &SymmetricPoly) -> Result<BigRational> {
    if f.is_zero() {
        return Ok(BigRational::zero());
    }
    let (forms, c) = forms_of(f)?;
    Ok(forms.j_total(&c))
}

fn forms_of(f: &SymmetricPoly) -> Result<(QuadraticForms, Vec<BigRational>)> {
    // merge repeated elements so the basis has no duplicates
    let mut merged: Vec<(BasisElement, BigRational)> = Vec::new();
    for (e, c) in &f.terms {
        match merged.iter_mut().find(|(x, _)| x == e) {
            Some((_, acc)) => *acc += c,
            None => merged.push((*e, c.clone())),
        }
    }
    let basis: Vec<BasisElement> = merged.iter().map(|(e, _)| *e).collect();
    let coeffs: Vec<BigRational> = merged.into_iter().map(|(_, c)| c).collect();
    // a k = 1 dependence only matters for the matrix, not the value
    let forms = if f.k == 1 {
        assemble(1, &basis)
    } else {
        build_forms_for(f.k, &basis)?
    };
    Ok((forms, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn constant_basis_matches_closed_form() {
        for k in 1..=12usize {
            let f = build_forms(k, 0).unwrap();
            let kf = factorial(k as u64);
            assert_eq!(f.true_b(0, 0), BigRational::new(1.into(), kf.clone()));
            let expect_a = BigRational::new(BigInt::from(2 * k), factorial(k as u64 + 1));
            assert_eq!(f.true_a(0, 0), expect_a);
            let ratio = f.rayleigh_quotient(&[q(1, 1)]).unwrap();
            assert_eq!(ratio, q(2 * k as i64, k as i64 + 1));
        }
    }

    #[test]
    fn k1_degenerate_basis_is_reported() {
        match build_forms(1, 2) {
            Err(Error::DegenerateBasis { index, label }) => {
                assert_eq!(index, 3);
                assert_eq!(label, "P2^1");
            }
            other => panic!("expected degenerate basis, got {other:?}"),
        }
        assert!(build_forms(1, 1).is_ok());
        assert!(build_forms(2, 4).is_ok());
    }

    #[test]
    fn forms_are_symmetric() {
        let f = build_forms(4, 4).unwrap();
        for i in 0..f.dim() {
            for j in 0..f.dim() {
                assert_eq!(f.a[i][j], f.a[j][i]);
                assert_eq!(f.b[i][j], f.b[j][i]);
            }
        }
    }

    #[test]
    fn functionals_of_polynomials() {
        let one = SymmetricPoly::constant(2, q(1, 1));
        assert_eq!(i_k(&one).unwrap(), q(1, 2));
        assert_eq!(j_total(&one).unwrap(), q(2 * 2, 6));
        assert_eq!(i_k(&SymmetricPoly::constant(1, q(1, 1))).unwrap(), q(1, 1));
        assert_eq!(i_k(&SymmetricPoly::zero(3)).unwrap(), q(0, 1));
        // duplicate terms merge: 2·1 on Δ_2 gives I = 4 · 1/2
        let two = SymmetricPoly::new(
            2,
            vec![
                (BasisElement { alpha: 0, beta: 0 }, q(1, 1)),
                (BasisElement { alpha: 0, beta: 0 }, q(1, 1)),
            ],
        );
        assert_eq!(i_k(&two).unwrap(), q(2, 1));
    }
}
