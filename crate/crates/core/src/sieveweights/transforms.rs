//! The changes of variable between `λ`, `y` and `y^{(m)}`.
//!
//! ```text
//! λ_d    = ∏μ(d_i)d_i · Σ_{r: d_i|r_i} y_r / ∏φ(r_i)
//! y_r    = ∏μ(r_i)φ(r_i) · Σ_{d: r_i|d_i} λ_d / ∏d_i
//! y^(m)_r = ∏μ(r_i)g(r_i) · Σ_{d: r_i|d_i, d_m=1} λ_d / ∏φ(d_i)
//! ```
//!
//! All of them are evaluated exactly in rational arithmetic.

use num::{BigInt, BigRational, Zero};
use serde::Serialize;

use super::config::SieveConfig;
use super::table::{divisor_vectors, Support, WeightKind, WeightTable};
use crate::arith::{euler_phi, g_mult, mobius};
use crate::error::{invalid, Result};

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn prod_of(key: &[u64], f: impl Fn(u64) -> i64) -> BigRational {
    int(key.iter().map(|&r| f(r)).product())
}

/// `y_r = F(log r_1/log R, ..., log r_k/log R)` on the support. Values of `F`
/// are taken as exact binary fractions of their f64 evaluation.
pub fn y_from_f(cfg: &SieveConfig, f: impl Fn(&[f64]) -> f64) -> Result<WeightTable> {
    if !(cfg.r_level > 1.0) {
        return Err(invalid("R", format!("sieve level must exceed 1, got {}", cfg.r_level)));
    }
    let log_r = cfg.r_level.ln();
    let mut table = WeightTable::zero(WeightKind::Y, Support::of(cfg));
    let keys: Vec<Vec<u64>> = table.entries.keys().cloned().collect();
    let mut point = vec![0.0; cfg.k];
    for key in keys {
        for (t, &r) in point.iter_mut().zip(&key) {
            *t = (r as f64).ln() / log_r;
        }
        let value = f(&point);
        let exact = BigRational::from_float(value)
            .ok_or_else(|| invalid("F", format!("non-finite value {value} at {key:?}")))?;
        table.set(&key, exact);
    }
    Ok(table)
}

/// Inverts [`y_from_lambda`].
pub fn lambda_from_y(y: &WeightTable) -> WeightTable {
    let mut acc = WeightTable::zero(WeightKind::Lambda, strip_fixed(&y.support));
    for (r, value) in y.nonzero() {
        let weight = value / prod_of(r, |x| euler_phi(x) as i64);
        for d in divisor_vectors(r) {
            let e = acc.entries.get_mut(&d).expect("divisors of supported keys are supported");
            *e += &weight;
        }
    }
    for (d, v) in acc.entries.iter_mut() {
        if !v.is_zero() {
            *v *= prod_of(d, |x| mobius(x) * x as i64);
        }
    }
    acc
}

pub fn y_from_lambda(lambda: &WeightTable) -> WeightTable {
    let mut acc = WeightTable::zero(WeightKind::Y, strip_fixed(&lambda.support));
    for (d, value) in lambda.nonzero() {
        let weight = value / prod_of(d, |x| x as i64);
        for r in divisor_vectors(d) {
            *acc.entries.get_mut(&r).expect("supported") += &weight;
        }
    }
    for (r, v) in acc.entries.iter_mut() {
        if !v.is_zero() {
            *v *= prod_of(r, |x| mobius(x) * euler_phi(x) as i64);
        }
    }
    acc
}

/// `y^{(m)}` for a zero-based coordinate `m`.
pub fn ym_from_lambda(lambda: &WeightTable, m: usize) -> Result<WeightTable> {
    let k = lambda.support.k;
    if m >= k {
        return Err(invalid("m", format!("coordinate {m} out of range for k = {k}")));
    }
    let support = strip_fixed(&lambda.support).with_fixed_one(m);
    let mut acc = WeightTable::zero(WeightKind::YM(m), support);
    for (d, value) in lambda.nonzero().filter(|(d, _)| d[m] == 1) {
        let weight = value / prod_of(d, |x| euler_phi(x) as i64);
        for r in divisor_vectors(d) {
            *acc.entries.get_mut(&r).expect("supported") += &weight;
        }
    }
    for (r, v) in acc.entries.iter_mut() {
        if !v.is_zero() {
            *v *= prod_of(r, |x| mobius(x) * g_mult(x));
        }
    }
    Ok(acc)
}

fn strip_fixed(s: &Support) -> Support {
    Support {
        fixed_one: None,
        ..s.clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub m: usize,
    pub entries_checked: usize,
    /// Largest `|lhs - rhs|`, as a reduced fraction.
    pub max_abs_discrepancy: String,
    pub exact: bool,
}

/// Checks, in exact arithmetic, that `y^{(m)}` obtained through `λ` agrees
/// with the direct expression in `y`:
///
/// ```text
/// y^(m)_r = ∏μ(r_i)g(r_i) · Σ_{a: r_i|a_i} y_a/∏φ(a_i) · ∏_{i≠m} μ(a_i) r_i/φ(a_i)
/// ```
///
/// which follows from `Σ_{r|d|a} μ(d)d/φ(d) = μ(a)r/φ(a)` for squarefree `a`.
pub fn ym_identity_check(y: &WeightTable, m: usize) -> Result<IdentityReport> {
    let lambda = lambda_from_y(y);
    let lhs = ym_from_lambda(&lambda, m)?;
    let mut rhs = WeightTable::zero(WeightKind::YM(m), lhs.support.clone());
    for (a, value) in y.nonzero() {
        let base = value / prod_of(a, |x| euler_phi(x) as i64);
        for r in divisor_vectors(a).into_iter().filter(|r| r[m] == 1) {
            let mut term = base.clone();
            for i in (0..a.len()).filter(|&i| i != m) {
                term *= BigRational::new(
                    BigInt::from(mobius(a[i]) * r[i] as i64),
                    BigInt::from(euler_phi(a[i])),
                );
            }
            *rhs.entries.get_mut(&r).expect("supported") += term;
        }
    }
    for (r, v) in rhs.entries.iter_mut() {
        if !v.is_zero() {
            *v *= prod_of(r, |x| mobius(x) * g_mult(x));
        }
    }
    let diff = lhs.max_abs_diff(&rhs);
    Ok(IdentityReport {
        m,
        entries_checked: lhs.len(),
        max_abs_discrepancy: format!("{}/{}", diff.numer(), diff.denom()),
        exact: diff.is_zero(),
    })
}

/// `Σ_{d | a, r | d} μ(d) d/φ(d)` and `μ(a) r/φ(a)`, for squarefree `a` and `r | a`.
pub fn collapse_sides(a: u64, r: u64) -> (BigRational, BigRational) {
    let lhs = crate::arith::squarefree_divisors(&crate::arith::prime_divisors(a))
        .into_iter()
        .filter(|d| d % r == 0)
        .map(|d| BigRational::new(BigInt::from(mobius(d) * d as i64), BigInt::from(euler_phi(d))))
        .fold(BigRational::zero(), |s, x| s + x);
    let rhs = BigRational::new(BigInt::from(mobius(a) * r as i64), BigInt::from(euler_phi(a)));
    (lhs, rhs)
}
