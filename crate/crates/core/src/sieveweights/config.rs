use serde::Serialize;

use crate::arith::{gcd, mod_inverse, small_primes};
use crate::error::{invalid, Error, Result};
use crate::tuples::Tuple;

/// Inputs from which a [`SieveConfig`] is derived.
#[derive(Debug, Clone)]
pub struct SieveParams {
    /// Scale `X`; the window is `n ∈ [x, 2x)` with `x = ⌊X/M⌋`.
    pub x_scale: u64,
    pub modulus: u64,
    pub residue: u64,
    /// Base tuple; the sieve works with `h_i = M·base_i + a`.
    pub base: Tuple,
    pub theta: f64,
    pub delta: f64,
    /// `W` is the product of the primes `≤ d0`.
    pub d0: u64,
    /// Exceptional-prime input; 1 when no exceptional modulus is assumed.
    pub pf: u64,
}

/// All derived sieve parameters.
///
/// * `w = ∏_{p ≤ d0} p`, `w_prime = w / gcd(w, pf·M)`, `v = w_prime·M`
/// * `r_level = X^{θ/2 - δ}`
/// * `gcd(M·nu0 + h_i, w_prime) = 1` for every `i`
/// * `diam(h) < d0·M` and every `h_i ≡ a (mod M)`
#[derive(Debug, Clone, Serialize)]
pub struct SieveConfig {
    pub x_scale: u64,
    pub modulus: u64,
    pub residue: u64,
    pub k: usize,
    /// Dilated tuple `h_i`.
    pub tuple: Vec<u64>,
    pub theta: f64,
    pub delta: f64,
    pub d0: u64,
    pub w: u64,
    pub pf: u64,
    pub w_prime: u64,
    pub v: u64,
    pub r_level: f64,
    pub nu0: u64,
    pub x: u64,
}

impl SieveConfig {
    pub fn new(p: &SieveParams) -> Result<Self> {
        if p.modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let a = p.residue % p.modulus;
        let g = gcd(a, p.modulus);
        if g != 1 {
            return Err(Error::NotCoprime {
                residue: a,
                modulus: p.modulus,
                gcd: g,
            });
        }
        if p.pf == 0 {
            return Err(invalid("pf", "must be positive (use 1 for none)"));
        }
        if !(p.theta > 0.0 && p.theta < 0.5) {
            return Err(invalid("theta", format!("must lie in (0, 1/2), got {}", p.theta)));
        }
        if !(p.delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {}", p.delta)));
        }
        if p.x_scale < p.modulus {
            return Err(invalid("x_scale", "X must be at least M so that x = X/M ≥ 1"));
        }
        if p.base.diameter() >= p.d0 {
            return Err(invalid(
                "d0",
                format!(
                    "tuple diameter {} must be below d0·M = {}",
                    p.base.diameter() * p.modulus,
                    p.d0 * p.modulus
                ),
            ));
        }
        let w: u64 = small_primes(p.d0).iter().product();
        let w_prime = w / gcd(w, p.pf * p.modulus);
        let v = w_prime * p.modulus;
        let r_level = (p.x_scale as f64).powf(p.theta / 2.0 - p.delta);
        let tuple: Vec<u64> = p.base.offsets().iter().map(|&h| p.modulus * h + a).collect();
        let nu0 = choose_nu0(w_prime, p.modulus, &tuple)?;
        Ok(SieveConfig {
            x_scale: p.x_scale,
            modulus: p.modulus,
            residue: a,
            k: tuple.len(),
            tuple,
            theta: p.theta,
            delta: p.delta,
            d0: p.d0,
            w,
            pf: p.pf,
            w_prime,
            v,
            r_level,
            nu0,
            x: p.x_scale / p.modulus,
        })
    }

    /// `V·P_f`, the modulus the weights' support must avoid.
    pub fn vpf(&self) -> u64 {
        self.v * self.pf
    }

    /// Largest value of `nM + h_i` over the window.
    pub fn max_shifted(&self) -> u64 {
        (2 * self.x - 1) * self.modulus + self.tuple.iter().max().copied().unwrap_or(0)
    }

    /// The window `n ∈ [x, 2x)` with `n ≡ nu0 (mod w_prime)`.
    pub fn window(&self) -> impl Iterator<Item = u64> + '_ {
        let first = self.x + (self.nu0 + self.w_prime - self.x % self.w_prime) % self.w_prime;
        (first..2 * self.x).step_by(self.w_prime as usize)
    }

    pub fn window_len(&self) -> u64 {
        count_in_class(self.x, 2 * self.x, self.nu0, self.w_prime)
    }
}

/// Number of `n ∈ [lo, hi)` with `n ≡ r (mod q)`.
pub fn count_in_class(lo: u64, hi: u64, r: u64, q: u64) -> u64 {
    if hi <= lo {
        return 0;
    }
    // #{n < N : n ≡ r} = ⌈(N - r)/q⌉ for N > r
    let below = |n: u64| if n > r % q { (n - r % q).div_ceil(q) } else { 0 };
    below(hi) - below(lo)
}

/// Smallest `ν₀ ∈ [0, W')` with `gcd(M ν₀ + h_i, W') = 1` for all `i`.
///
/// Such a class exists iff for every prime `p | W'` some class of `ν₀ mod p`
/// avoids all of `-h_i M⁻¹ (mod p)`; that is checked prime by prime, and the
/// smallest solution is then found by scanning `[0, W')`.
pub fn choose_nu0(w_prime: u64, modulus: u64, tuple: &[u64]) -> Result<u64> {
    if w_prime == 1 {
        return Ok(0);
    }
    for p in crate::arith::prime_divisors(w_prime) {
        let inv = mod_inverse(modulus % p, p).ok_or_else(|| {
            invalid("modulus", format!("M = {modulus} is not invertible mod {p} | W'"))
        })?;
        let mut blocked = vec![false; p as usize];
        for &h in tuple {
            let bad = (p - h % p) % p * inv % p;
            blocked[bad as usize] = true;
        }
        if blocked.iter().all(|&b| b) {
            return Err(Error::NotAdmissible { prime: p });
        }
    }
    let nu0 = (0..w_prime)
        .find(|&nu| tuple.iter().all(|&h| gcd(modulus * nu + h, w_prime) == 1))
        .expect("per-prime classes exist, so CRT gives a solution");
    Ok(nu0)
}
