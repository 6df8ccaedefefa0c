//! Small-integer arithmetic helpers: gcd, CRT, Möbius, Euler phi and the
//! totally multiplicative `g(p) = p - 2` used by the prime-detecting weights.

use num::integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Combines `x ≡ r1 (mod m1)` and `x ≡ r2 (mod m2)` for arbitrary (not
/// necessarily coprime) moduli. Returns `None` when the system is inconsistent.
pub fn crt_combine(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let g = gcd(m1, m2);
    let (r1, r2) = (r1 as i128, r2 as i128);
    if (r2 - r1).rem_euclid(g as i128) != 0 {
        return None;
    }
    let l = (m1 / g) as i128 * m2 as i128;
    let m1g = (m1 / g) as i128;
    let m2g = (m2 / g) as i128;
    // r1 + m1 * t with t ≡ (r2 - r1)/g * inv(m1/g) (mod m2/g)
    let inv = if m2g == 1 {
        0
    } else {
        mod_inverse((m1g.rem_euclid(m2g)) as u64, m2g as u64)? as i128
    };
    let t = ((r2 - r1) / g as i128).rem_euclid(m2g.max(1)) * inv % m2g.max(1);
    let x = (r1 + m1 as i128 * t).rem_euclid(l);
    Some((x as u64, l as u64))
}

/// Prime factors of `n` with multiplicity, by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors of `n`.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1, "mobius(0) is undefined");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "phi(0) is undefined");
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// The totally multiplicative function with `g(p) = p - 2`; `g(1) = 1`.
pub fn g_mult(n: u64) -> i64 {
    assert!(n >= 1);
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p as i64 - 2).pow(e))
        .product()
}

/// All divisors of a squarefree number given its prime factors.
pub fn squarefree_divisors(primes: &[u64]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &p in primes {
        let cur = divs.len();
        for i in 0..cur {
            divs.push(divs[i] * p);
        }
    }
    divs
}

/// Primes up to `n` by a plain sieve; for small bounds only.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}
