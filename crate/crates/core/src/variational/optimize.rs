//! Maximizing `ΣJ(F)/I(F)` over the span of a basis.
//!
//! This is the generalized symmetric-definite eigenproblem `A v = λ B v`.
//! `B` is Jacobi-scaled and factored by a pivoted Cholesky, which drops basis
//! members whose pivot falls below `PIVOT_TOLERANCE` relative to the largest
//! diagonal entry. The reduced problem `L⁻¹ A L⁻ᵀ` is then diagonalized.
//! The top eigenvector is converted to exact rationals and its quotient is
//! recomputed from the exact forms: that value, not the floating-point
//! eigenvalue, is what [`MkResult::lower_bound`] reports.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::{BigRational, ToPrimitive, Zero};
use serde::Serialize;

use super::basis::BasisElement;
use super::forms::{build_forms, QuadraticForms};
use crate::error::{Error, Result};

pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct MkResult {
    pub k: usize,
    pub basis_degree: u32,
    /// Exact Rayleigh quotient of `witness`, rounded to f64.
    pub lower_bound: f64,
    /// Exact Rayleigh quotient of `witness`, as `numerator/denominator`.
    pub certified: String,
    /// Largest eigenvalue from the floating-point solve.
    pub eigenvalue: f64,
    pub basis: Vec<BasisElement>,
    /// Coefficients of the optimal `F` in `basis`, normalized to `I(F) = 1`
    /// up to rounding (zero for pruned members).
    pub witness: Vec<f64>,
    /// Indices of basis members dropped as numerically dependent.
    pub pruned: Vec<usize>,
}

pub fn maximize_mk(k: usize, degree_cap: u32) -> Result<MkResult> {
    let forms = build_forms(k, degree_cap)?;
    maximize_forms(&forms, degree_cap)
}

pub fn maximize_forms(forms: &QuadraticForms, degree_cap: u32) -> Result<MkResult> {
    let n = forms.dim();
    let diag: Vec<f64> = (0..n).map(|i| forms.b_f64[(i, i)]).collect();
    if let Some(&d) = diag.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::Indefinite { pivot: d });
    }
    let scale: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    let bs = DMatrix::from_fn(n, n, |i, j| forms.b_f64[(i, j)] * scale[i] * scale[j]);
    let as_ = DMatrix::from_fn(n, n, |i, j| forms.a_f64[(i, j)] * scale[i] * scale[j]);

    let (kept, pruned) = pivoted_cholesky_selection(&bs)?;
    let m = kept.len();
    let b_red = DMatrix::from_fn(m, m, |i, j| bs[(kept[i], kept[j])]);
    let a_red = DMatrix::from_fn(m, m, |i, j| as_[(kept[i], kept[j])]);
    let chol = b_red
        .clone()
        .cholesky()
        .ok_or(Error::Indefinite { pivot: smallest_pivot(&b_red) })?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ
    let linv_a = l
        .solve_lower_triangular(&a_red)
        .expect("cholesky factor is nonsingular");
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .expect("cholesky factor is nonsingular");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let (top, eigenvalue) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let y: DVector<f64> = eig.eigenvectors.column(top).into_owned();
    let v = l
        .transpose()
        .solve_upper_triangular(&y)
        .expect("cholesky factor is nonsingular");

    let mut witness = vec![0.0; n];
    for (slot, &idx) in kept.iter().enumerate() {
        witness[idx] = v[slot] * scale[idx];
    }
    // sign convention: positive value at the origin-most coefficient
    if let Some(first) = witness.iter().find(|w| **w != 0.0) {
        if *first < 0.0 {
            witness.iter_mut().for_each(|w| *w = -*w);
        }
    }
    let exact: Vec<BigRational> = witness
        .iter()
        .map(|&w| BigRational::from_float(w).unwrap_or_else(BigRational::zero))
        .collect();
    let certified = forms
        .rayleigh_quotient(&exact)
        .ok_or(Error::Indefinite { pivot: 0.0 })?;
    let lower_bound = certified.to_f64().unwrap_or(f64::NAN);

    Ok(MkResult {
        k: forms.k,
        basis_degree: degree_cap,
        lower_bound,
        certified: format!("{}/{}", certified.numer(), certified.denom()),
        eigenvalue,
        basis: forms.basis.clone(),
        witness,
        pruned,
    })
}

/// Greedy diagonal pivoting; returns (kept, pruned) index lists, each ascending.
fn pivoted_cholesky_selection(b: &DMatrix<f64>) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = b.nrows();
    let mut work = b.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut kept = Vec::new();
    let max_diag = (0..n).map(|i| b[(i, i)]).fold(0.0, f64::max);
    let tol = PIVOT_TOLERANCE * max_diag;
    while !remaining.is_empty() {
        let (pos, &p) = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| work[(*x.1, *x.1)].total_cmp(&work[(*y.1, *y.1)]).then(y.1.cmp(x.1)))
            .unwrap();
        let pivot = work[(p, p)];
        if pivot < -tol {
            return Err(Error::Indefinite { pivot });
        }
        if pivot <= tol {
            break;
        }
        remaining.remove(pos);
        kept.push(p);
        let root = pivot.sqrt();
        let col: Vec<f64> = remaining.iter().map(|&i| work[(i, p)] / root).collect();
        for (ai, &i) in remaining.iter().enumerate() {
            for (aj, &j) in remaining.iter().enumerate() {
                work[(i, j)] -= col[ai] * col[aj];
            }
        }
    }
    kept.sort_unstable();
    remaining.sort_unstable();
    Ok((kept, remaining))
}

fn smallest_pivot(b: &DMatrix<f64>) -> f64 {
    // LDLᵀ without pivoting; reports the first non-positive pivot
    let n = b.nrows();
    let mut w = b.clone();
    let mut smallest = f64::INFINITY;
    for p in 0..n {
        let d = w[(p, p)];
        smallest = smallest.min(d);
        if d <= 0.0 {
            return d;
        }
        for i in p + 1..n {
            let f = w[(i, p)] / d;
            for j in p + 1..n {
                w[(i, j)] -= f * w[(p, j)];
            }
        }
    }
    smallest
}
