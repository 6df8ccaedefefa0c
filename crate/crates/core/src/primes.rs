//! Prime generation and arithmetic-progression statistics.
//!
//! [`PrimeTable`] stores primality of odd numbers only, one bit each, and is
//! filled by a segmented sieve of Eratosthenes. Segments are independent, so
//! construction runs in parallel on the current rayon pool; the resulting bit
//! array does not depend on the number of threads.

use rayon::prelude::*;

use crate::arith::{gcd, CompensatedSum};
use crate::error::{Error, Result};

/// Default upper bound on `limit`, about 1 GiB of bits.
pub const DEFAULT_LIMIT_CAP: u64 = 1 << 34;

/// Words per segment: 32 KiB of bits, i.e. 2^18 odd numbers.
const SEGMENT_WORDS: usize = 1 << 12;

#[derive(Clone)]
pub struct PrimeTable {
    limit: u64,
    // bit i of the array <=> 2i+1 is prime
    bits: Vec<u64>,
    count: u64,
}

impl std::fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeTable")
            .field("limit", &self.limit)
            .field("count", &self.count)
            .finish()
    }
}

/// Sieve all primes up to and including `limit`.
pub fn sieve_upto(limit: u64) -> Result<PrimeTable> {
    PrimeTable::with_cap(limit, DEFAULT_LIMIT_CAP)
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_LIMIT_CAP)
    }

    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::LimitTooSmall { limit });
        }
        if limit > cap {
            return Err(Error::LimitAboveCap { limit, cap });
        }
        let n_odd = (limit - 1) / 2 + 1; // odd numbers 1, 3, ..., <= limit
        let n_words = n_odd.div_ceil(64) as usize;
        let base: Vec<u64> = crate::arith::small_primes(isqrt(limit))
            .into_iter()
            .filter(|&p| p > 2)
            .collect();

        let mut bits = vec![u64::MAX; n_words];
        bits.par_chunks_mut(SEGMENT_WORDS)
            .enumerate()
            .for_each(|(seg, words)| {
                let lo_idx = (seg * SEGMENT_WORDS * 64) as u64;
                let hi_idx = lo_idx + (words.len() * 64) as u64; // exclusive
                let hi_n = 2 * hi_idx - 1;
                for &p in &base {
                    if p * p > hi_n {
                        break;
                    }
                    // first odd multiple of p that is >= max(p^2, 2*lo_idx+1)
                    let lo_n = 2 * lo_idx + 1;
                    let mut m = lo_n.div_ceil(p).max(p);
                    if m % 2 == 0 {
                        m += 1;
                    }
                    let mut idx = (m * p - 1) / 2;
                    while idx < hi_idx {
                        let off = (idx - lo_idx) as usize;
                        words[off / 64] &= !(1u64 << (off % 64));
                        idx += p;
                    }
                }
            });
        // 1 is not prime
        bits[0] &= !1;
        // clear bits beyond the limit
        let tail = (n_odd % 64) as u32;
        if tail != 0 {
            let last = bits.len() - 1;
            bits[last] &= (1u64 << tail) - 1;
        }
        let count = 1 + bits.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        Ok(PrimeTable { limit, bits, count })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes up to `limit`.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Primality of `n`; panics if `n` exceeds the table limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "{n} is beyond the prime table limit {}",
            self.limit
        );
        if n == 2 {
            return true;
        }
        if n < 2 || n.is_multiple_of(2) {
            return false;
        }
        let i = (n / 2) as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// π(n) for `n <= limit`.
    pub fn count_upto(&self, n: u64) -> u64 {
        let n = n.min(self.limit);
        if n < 2 {
            return 0;
        }
        let last = ((n - 1) / 2) as usize; // index of the largest odd <= n
        let full = last / 64;
        let mut c: u64 = self.bits[..full].iter().map(|w| w.count_ones() as u64).sum();
        let rem = (last % 64) as u32 + 1;
        let mask = if rem == 64 { u64::MAX } else { (1u64 << rem) - 1 };
        c += (self.bits[full] & mask).count_ones() as u64;
        c + 1
    }

    /// All primes in ascending order.
    pub fn iter(&self) -> PrimeIter<'_> {
        self.range(2, self.limit)
    }

    /// Primes in `[lo, hi]`, ascending; `hi` is clamped to the limit.
    pub fn range(&self, lo: u64, hi: u64) -> PrimeIter<'_> {
        let hi = hi.min(self.limit);
        let emit_two = lo <= 2 && hi >= 2;
        let start_idx = if lo <= 1 { 0 } else { lo / 2 } as usize;
        let end_idx = if hi < 1 { 0 } else { (hi - 1) / 2 + 1 } as usize;
        let start_idx = start_idx.min(end_idx);
        let word = start_idx / 64;
        let cur = if word < self.bits.len() {
            self.bits[word] & (u64::MAX << (start_idx % 64))
        } else {
            0
        };
        PrimeIter {
            table: self,
            emit_two,
            word,
            cur,
            end_idx,
        }
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Primes `p ≡ a (mod M)` inside the window, ascending.
    pub fn primes_in_ap(&self, window: &APWindow) -> Result<Vec<u64>> {
        if window.hi > self.limit {
            return Err(Error::TableTooSmall {
                have: self.limit,
                need: window.hi,
            });
        }
        Ok(window.iter(self).collect())
    }

    /// Chebyshev ψ(X; q, a) = Σ Λ(n) over n ≤ X with n ≡ a (mod q).
    pub fn psi_ap(&self, x: u64, q: u64, a: u64) -> Result<f64> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        if x > self.limit {
            return Err(Error::TableTooSmall {
                have: self.limit,
                need: x,
            });
        }
        let a = a % q;
        let mut acc = CompensatedSum::new();
        for p in self.range(2, x) {
            let lp = (p as f64).ln();
            let mut pk = p;
            loop {
                if pk % q == a {
                    acc.add(lp);
                }
                match pk.checked_mul(p) {
                    Some(next) if next <= x => pk = next,
                    _ => break,
                }
            }
        }
        Ok(acc.value())
    }
}

pub struct PrimeIter<'a> {
    table: &'a PrimeTable,
    emit_two: bool,
    word: usize,
    cur: u64,
    end_idx: usize,
}

impl Iterator for PrimeIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.emit_two {
            self.emit_two = false;
            return Some(2);
        }
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                let idx = self.word * 64 + bit;
                if idx >= self.end_idx {
                    self.cur = 0;
                    self.word = usize::MAX - 1;
                    return None;
                }
                self.cur &= self.cur - 1;
                return Some(2 * idx as u64 + 1);
            }
            self.word = self.word.saturating_add(1);
            if self.word >= self.table.bits.len() || self.word * 64 >= self.end_idx {
                return None;
            }
            self.cur = self.table.bits[self.word];
        }
    }
}

/// The primes `p ≡ residue (mod modulus)` with `lo ≤ p ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct APWindow {
    pub modulus: u64,
    pub residue: u64,
    pub lo: u64,
    pub hi: u64,
}

impl APWindow {
    /// `residue` is reduced mod `modulus`. With `modulus = 1` every residue
    /// (including 0) names the progression of all integers.
    pub fn new(modulus: u64, residue: u64, lo: u64, hi: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let residue = residue % modulus;
        let g = gcd(residue, modulus);
        if g != 1 {
            return Err(Error::NotCoprime {
                residue,
                modulus,
                gcd: g,
            });
        }
        if lo > hi {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(APWindow {
            modulus,
            residue,
            lo,
            hi,
        })
    }

    pub fn iter<'a>(&self, table: &'a PrimeTable) -> impl Iterator<Item = u64> + 'a {
        let w = *self;
        let hi = w.hi.min(table.limit());
        // small moduli: filter the prime stream; large moduli: step through the class
        let filtered = (w.modulus <= 16).then(move || {
            table
                .range(w.lo, hi)
                .filter(move |p| p % w.modulus == w.residue)
        });
        let stepped = (w.modulus > 16).then(move || {
            let first = w.lo + (w.residue + w.modulus - w.lo % w.modulus) % w.modulus;
            (first..=hi)
                .step_by(w.modulus as usize)
                .filter(move |&n| table.is_prime(n))
        });
        filtered
            .into_iter()
            .flatten()
            .chain(stepped.into_iter().flatten())
    }
}

/// Primes `≡ a (mod M)` in `[lo, hi]`, sieving up to `hi`.
pub fn primes_in_ap(modulus: u64, residue: u64, lo: u64, hi: u64) -> Result<Vec<u64>> {
    let window = APWindow::new(modulus, residue, lo, hi)?;
    let table = PrimeTable::new(hi.max(2))?;
    table.primes_in_ap(&window)
}

/// The n-th prime, `nth_prime(1) = 2`.
pub fn nth_prime(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(crate::error::invalid("n", "must be at least 1"));
    }
    let table = PrimeTable::new(nth_prime_upper_bound(n))?;
    Ok(table
        .iter()
        .nth((n - 1) as usize)
        .expect("upper bound holds for all n"))
}

/// Rosser–Schoenfeld style bound `p_n < n (ln n + ln ln n)` for `n ≥ 6`.
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    if n < 6 {
        return 13;
    }
    let nf = n as f64;
    (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 1
}

/// ψ(X; q, a), sieving up to `X`.
pub fn psi_ap(x: u64, q: u64, a: u64) -> Result<f64> {
    if x < 2 {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        return Ok(0.0);
    }
    PrimeTable::new(x)?.psi_ap(x, q, a)
}

const CACHE_MAGIC: &[u8; 8] = b"APGPRIM1";

impl PrimeTable {
    /// Binary image: magic, limit, count, then the bit words, little-endian.
    pub fn write_to(&self, mut w: impl std::io::Write) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&self.count.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.bits.len() * 8);
        for word in &self.bits {
            buf.extend_from_slice(&word.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Reads an image produced by [`PrimeTable::write_to`].
    pub fn read_from(mut r: impl std::io::Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let bad = |m: &str| Error::Parse {
            line: 0,
            message: format!("prime table image: {m}"),
        };
        if bytes.len() < 24 || &bytes[..8] != CACHE_MAGIC {
            return Err(bad("missing header"));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
        let (limit, count) = (word(8), word(16));
        let n_words = ((limit.max(1) - 1) / 2 + 1).div_ceil(64) as usize;
        if limit < 2 || bytes.len() != 24 + 8 * n_words {
            return Err(bad("size does not match the limit"));
        }
        let bits: Vec<u64> = (0..n_words).map(|i| word(24 + 8 * i)).collect();
        let ones = 1 + bits.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        if ones != count {
            return Err(bad("prime count mismatch"));
        }
        Ok(PrimeTable { limit, bits, count })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_tables() {
        assert_eq!(sieve_upto(10).unwrap().to_vec(), vec![2, 3, 5, 7]);
        assert_eq!(sieve_upto(10).unwrap().count(), 4);
        assert_eq!(sieve_upto(2).unwrap().to_vec(), vec![2]);
        assert_eq!(sieve_upto(3).unwrap().to_vec(), vec![2, 3]);
    }

    #[test]
    fn rejects_bad_limits() {
        assert_eq!(sieve_upto(1).unwrap_err(), Error::LimitTooSmall { limit: 1 });
        assert!(matches!(
            PrimeTable::with_cap(1000, 100),
            Err(Error::LimitAboveCap { .. })
        ));
        assert!(matches!(
            sieve_upto(DEFAULT_LIMIT_CAP + 1),
            Err(Error::LimitAboveCap { .. })
        ));
    }

    #[test]
    fn segment_boundaries_agree_with_trial_division() {
        // spans several segments
        let limit = 3 * (SEGMENT_WORDS as u64) * 128 + 17;
        let t = sieve_upto(limit).unwrap();
        for n in (0..limit).step_by(97).chain(limit - 500..=limit) {
            assert_eq!(t.is_prime(n), trial_division(n), "n = {n}");
        }
        let seg = (SEGMENT_WORDS * 128) as u64;
        for n in seg - 50..seg + 50 {
            assert_eq!(t.is_prime(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn count_upto_and_range() {
        let t = sieve_upto(1000).unwrap();
        for n in 0..=1000 {
            let brute = (0..=n).filter(|&m| trial_division(m)).count() as u64;
            assert_eq!(t.count_upto(n), brute);
        }
        let r: Vec<u64> = t.range(90, 110).collect();
        assert_eq!(r, vec![97, 101, 103, 107, 109]);
        assert_eq!(t.range(2, 2).collect::<Vec<_>>(), vec![2]);
        assert_eq!(t.range(14, 16).count(), 0);
        assert_eq!(t.range(997, 5000).collect::<Vec<_>>(), vec![997]);
    }

    #[test]
    fn nth_prime_values() {
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(5).unwrap(), 11);
        assert!(nth_prime(0).is_err());
    }

    #[test]
    fn ap_windows() {
        assert_eq!(
            primes_in_ap(3, 1, 100, 200).unwrap(),
            vec![103, 109, 127, 139, 151, 157, 163, 181, 193, 199]
        );
        assert_eq!(
            primes_in_ap(1, 0, 10, 30).unwrap(),
            vec![11, 13, 17, 19, 23, 29]
        );
        assert!(matches!(
            primes_in_ap(4, 2, 1, 100),
            Err(Error::NotCoprime { gcd: 2, .. })
        ));
        // large modulus takes the stepping path
        let t = sieve_upto(10_000).unwrap();
        let w = APWindow::new(101, 3, 0, 10_000).unwrap();
        let stepped: Vec<u64> = w.iter(&t).collect();
        let brute: Vec<u64> = (0..=10_000)
            .filter(|&n| n % 101 == 3 && trial_division(n))
            .collect();
        assert_eq!(stepped, brute);
    }

    #[test]
    fn psi_small() {
        let expect = 2f64.ln() * 3.0 + 3f64.ln() * 2.0 + 5f64.ln() + 7f64.ln();
        assert!((psi_ap(10, 1, 0).unwrap() - expect).abs() < 1e-12);
        let expect = 3f64.ln() * 2.0 + 5f64.ln() + 7f64.ln();
        assert!((psi_ap(10, 2, 1).unwrap() - expect).abs() < 1e-12);
        assert_eq!(psi_ap(1, 7, 3).unwrap(), 0.0);
    }

    #[test]
    fn image_round_trip() {
        let t = PrimeTable::new(100_003).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let back = PrimeTable::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.to_vec(), t.to_vec());
        assert_eq!(back.limit(), 100_003);
        buf[30] ^= 0xff;
        assert!(PrimeTable::read_from(buf.as_slice()).is_err());
        assert!(PrimeTable::read_from(&b"nope"[..]).is_err());
    }
}
