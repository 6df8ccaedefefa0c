//! Exact integrals of polynomials over the unit simplex
//! `Δ_k = {t ∈ [0,1]^k : Σ t_i ≤ 1}`.
//!
//! Everything rests on the Dirichlet integral
//!
//! ```text
//! ∫_{Δ_k} (1 - Σt)^b ∏ t_i^{a_i} dt = b! ∏ a_i! / (k + b + Σ a_i)!
//! ```

use num::{BigInt, BigRational, One, Zero};

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `(lo)(lo+1)...(lo+len-1)`, or 1 when `len = 0`.
pub(crate) fn rising(lo: u64, len: u64) -> BigInt {
    (lo..lo + len).fold(BigInt::one(), |acc, i| acc * i)
}

/// `∫_{Δ_k} ∏ t_i^{a_i} dt` with `k = exponents.len()`.
pub fn monomial_integral(exponents: &[u32]) -> BigRational {
    dirichlet_integral(0, exponents)
}

/// `∫_{Δ_k} (1 - Σt)^b ∏ t_i^{a_i} dt` with `k = exponents.len()`.
pub fn dirichlet_integral(b: u32, exponents: &[u32]) -> BigRational {
    let k = exponents.len() as u64;
    let total: u64 = exponents.iter().map(|&a| a as u64).sum::<u64>() + b as u64;
    let num = exponents
        .iter()
        .fold(factorial(b as u64), |acc, &a| acc * factorial(a as u64));
    BigRational::new(num, factorial(k + total))
}

/// Integer partitions of `n` into at most `max_parts` parts, parts descending.
pub(crate) fn partitions(n: u32, max_parts: usize) -> Vec<Vec<u32>> {
    fn go(n: u32, cap: u32, max_parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() == max_parts {
            return;
        }
        for part in (1..=cap.min(n)).rev() {
            cur.push(part);
            go(n - part, part, max_parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, max_parts, &mut Vec::new(), &mut out);
    out
}

/// `k! · ∫_{Δ_k} (1 - P₁)^b P₂^c dt` with `P₁ = Σt_i`, `P₂ = Σt_i²`.
///
/// Expanding `P₂^c` multinomially, each monomial `∏ t_i^{2c_i}` integrates to
/// a value depending only on the multiset of nonzero `c_i`, i.e. on a
/// partition `λ ⊢ c` with at most `k` parts. That partition occurs in
/// `k! / ((k-ℓ)! ∏ m_j!)` placements (`ℓ` parts, `m_j` multiplicities).
/// The `k!` prefactor keeps values for large `k` in a sensible range:
/// `k!/(k+n)! = 1/((k+1)...(k+n))`.
pub fn scaled_symmetric_integral(k: u64, b: u32, c: u32) -> BigRational {
    let mut sum = BigInt::zero();
    let c_fact = factorial(c as u64);
    let b_fact = factorial(b as u64);
    for lambda in partitions(c, k as usize) {
        let parts = lambda.len() as u64;
        // placements of the parts among k coordinates
        let mut placements = rising(k - parts + 1, parts);
        let mut run = 1u64;
        for w in lambda.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                placements /= factorial(run);
                run = 1;
            }
        }
        if !lambda.is_empty() {
            placements /= factorial(run);
        }
        let mut multinomial = c_fact.clone();
        let mut moments = b_fact.clone();
        for &p in &lambda {
            multinomial /= factorial(p as u64);
            moments *= factorial(2 * p as u64);
        }
        sum += placements * multinomial * moments;
    }
    BigRational::new(sum, rising(k + 1, b as u64 + 2 * c as u64))
}

/// `∫_{Δ_k} (1 - P₁)^b P₂^c dt`.
pub fn symmetric_integral(k: u64, b: u32, c: u32) -> BigRational {
    scaled_symmetric_integral(k, b, c) / BigRational::from_integer(factorial(k))
}
