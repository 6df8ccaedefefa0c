//! The sieve sums over the window `x ≤ n < 2x`, `n ≡ ν₀ (mod W')`:
//!
//! ```text
//! S1      = Σ_n (Σ_{d_i | nM+h_i} λ_d)²
//! S2^(m)  = Σ_n 1_prime(nM+h_m) (Σ_{d_i | nM+h_i} λ_d)²
//! S^(ρ)   = S2 - ρ S1
//! ```

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{count_in_class, SieveConfig};
use super::table::WeightTable;
use crate::arith::{crt_combine, gcd, lcm, mod_inverse};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

const CHUNK: usize = 4096;

/// Nonzero weights as integers over a common denominator.
struct Scaled {
    keys: Vec<Vec<u64>>,
    numer: Vec<BigInt>,
    denom: BigInt,
}

impl Scaled {
    fn new(table: &WeightTable) -> Self {
        let nonzero: Vec<(&Vec<u64>, &BigRational)> = table.nonzero().collect();
        let denom = nonzero
            .iter()
            .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        let numer = nonzero
            .iter()
            .map(|(_, v)| v.numer() * (&denom / v.denom()))
            .collect();
        Scaled {
            keys: nonzero.iter().map(|(k, _)| (*k).clone()).collect(),
            numer,
            denom,
        }
    }

    /// `Σ_{d_i | values_i} λ_d`, scaled by `denom`.
    fn inner(&self, values: &[u64]) -> BigInt {
        let mut acc = BigInt::zero();
        for (key, w) in self.keys.iter().zip(&self.numer) {
            if key.iter().zip(values).all(|(&d, &v)| v % d == 0) {
                acc += w;
            }
        }
        acc
    }
}

fn window_values(cfg: &SieveConfig) -> Vec<u64> {
    cfg.window().collect()
}

/// `S1` by direct evaluation over the window. An empty window gives 0.
pub fn s1_bruteforce(cfg: &SieveConfig, lambda: &WeightTable) -> BigRational {
    let scaled = Scaled::new(lambda);
    if scaled.keys.is_empty() {
        return BigRational::zero();
    }
    let ns = window_values(cfg);
    let total: BigInt = ns
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut values = vec![0u64; cfg.k];
            let mut acc = BigInt::zero();
            for &n in chunk {
                for (v, &h) in values.iter_mut().zip(&cfg.tuple) {
                    *v = n * cfg.modulus + h;
                }
                let s = scaled.inner(&values);
                if !s.is_zero() {
                    acc += &s * &s;
                }
            }
            acc
        })
        .reduce(BigInt::zero, |a, b| a + b);
    BigRational::new(total, &scaled.denom * &scaled.denom)
}

/// The residue class of `n` modulo `q` on which `[d_i, e_i] | nM + h_i` for
/// all `i` and `n ≡ ν₀ (mod W')`, or `None` when it is empty.
pub fn pair_class(cfg: &SieveConfig, d: &[u64], e: &[u64]) -> Option<(u64, u64)> {
    let mut class = (cfg.nu0 % cfg.w_prime, cfg.w_prime);
    for ((&di, &ei), &h) in d.iter().zip(e).zip(&cfg.tuple) {
        let q = lcm(di, ei);
        if q == 1 {
            continue;
        }
        // M n ≡ -h (mod q)
        let g = gcd(cfg.modulus % q, q);
        if h % g != 0 {
            return None;
        }
        let qg = q / g;
        let target = (qg - (h / g) % qg) % qg;
        let inv = mod_inverse((cfg.modulus / g) % qg, qg)?;
        let r = (target as u128 * inv as u128 % qg as u128) as u64;
        class = crt_combine(class.0, class.1, r, qg)?;
    }
    Some(class)
}

/// `S1` as `Σ_{d,e} λ_d λ_e · #{n : n ≡ ν₀ (W'), [d_i,e_i] | nM+h_i}` with
/// exact class counts.
pub fn s1_rearranged(cfg: &SieveConfig, lambda: &WeightTable) -> BigRational {
    let entries: Vec<(&Vec<u64>, &BigRational)> = lambda.nonzero().collect();
    entries
        .par_iter()
        .map(|(d, ld)| {
            let mut row = BigRational::zero();
            for (e, le) in &entries {
                if let Some((r, q)) = pair_class(cfg, d, e) {
                    let c = count_in_class(cfg.x, 2 * cfg.x, r, q);
                    if c > 0 {
                        row += *le * BigRational::from_integer(BigInt::from(c));
                    }
                }
            }
            row * *ld
        })
        .reduce(BigRational::zero, |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct S2Sums {
    /// `S2^(m)` for `m = 0..k`.
    pub per_m: Vec<BigRational>,
    pub total: BigRational,
}

/// `S2^(m)` for every `m` by direct evaluation; `primes` must cover the
/// largest shifted value `(2x - 1)M + max h_i`.
pub fn s2_bruteforce(cfg: &SieveConfig, lambda: &WeightTable, primes: &PrimeTable) -> Result<S2Sums> {
    let need = cfg.max_shifted();
    if primes.limit() < need {
        return Err(Error::TableTooSmall {
            have: primes.limit(),
            need,
        });
    }
    let scaled = Scaled::new(lambda);
    let k = cfg.k;
    let ns = window_values(cfg);
    let sums: Vec<BigInt> = ns
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut values = vec![0u64; k];
            let mut acc = vec![BigInt::zero(); k];
            for &n in chunk {
                for (v, &h) in values.iter_mut().zip(&cfg.tuple) {
                    *v = n * cfg.modulus + h;
                }
                if !values.iter().any(|&v| primes.is_prime(v)) {
                    continue;
                }
                let s = scaled.inner(&values);
                if s.is_zero() {
                    continue;
                }
                let sq = &s * &s;
                for (slot, &v) in acc.iter_mut().zip(&values) {
                    if primes.is_prime(v) {
                        *slot += &sq;
                    }
                }
            }
            acc
        })
        .reduce(
            || vec![BigInt::zero(); k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let den = &scaled.denom * &scaled.denom;
    let per_m: Vec<BigRational> = sums
        .into_iter()
        .map(|s| BigRational::new(s, den.clone()))
        .collect();
    let total = per_m.iter().fold(BigRational::zero(), |a, b| a + b);
    Ok(S2Sums { per_m, total })
}

/// `S^(ρ) = S2 - ρ S1`, with `ρ` taken exactly from its binary value.
pub fn s_rho(s1: &BigRational, s2: &BigRational, rho: f64) -> Result<BigRational> {
    let r = BigRational::from_float(rho)
        .ok_or_else(|| crate::error::invalid("rho", format!("not finite: {rho}")))?;
    Ok(s2 - r * s1)
}

/// `ρ = ϑ M_k / 2 - δ'`.
pub fn rho_from_mk(theta: f64, mk: f64, delta_prime: f64) -> f64 {
    theta * mk / 2.0 - delta_prime
}

/// Summary of the sums for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct SumsReport {
    pub window_len: u64,
    pub s1: f64,
    pub s2: f64,
    pub s2_per_m: Vec<f64>,
    pub rho: f64,
    pub s_rho: f64,
    pub s_rho_positive: bool,
}

impl SumsReport {
    pub fn new(window_len: u64, s1: &BigRational, s2: &S2Sums, rho: f64) -> Result<Self> {
        use num::ToPrimitive;
        let sr = s_rho(s1, &s2.total, rho)?;
        Ok(SumsReport {
            window_len,
            s1: s1.to_f64().unwrap_or(f64::NAN),
            s2: s2.total.to_f64().unwrap_or(f64::NAN),
            s2_per_m: s2.per_m.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
            rho,
            s_rho: sr.to_f64().unwrap_or(f64::NAN),
            s_rho_positive: sr.is_positive(),
        })
    }
}
