use std::collections::BTreeMap;

use num::{BigRational, Zero};

use super::config::SieveConfig;
use crate::arith::{gcd, prime_divisors, small_primes};

/// Which weights a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Lambda,
    Y,
    /// `y^{(m)}` with a zero-based `m`.
    YM(usize),
}

/// The admissible index vectors for weights: `k`-vectors of positive
/// integers whose product is squarefree, coprime to `V·P_f` and below `R`.
/// For `y^{(m)}` additionally `r_m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub k: usize,
    pub vpf: u64,
    pub r_level: f64,
    pub fixed_one: Option<usize>,
}

impl Support {
    pub fn of(cfg: &SieveConfig) -> Self {
        Support {
            k: cfg.k,
            vpf: cfg.vpf(),
            r_level: cfg.r_level,
            fixed_one: None,
        }
    }

    pub fn with_fixed_one(mut self, m: usize) -> Self {
        self.fixed_one = Some(m);
        self
    }

    pub fn contains(&self, key: &[u64]) -> bool {
        if key.len() != self.k || key.contains(&0) {
            return false;
        }
        if let Some(m) = self.fixed_one {
            if key[m] != 1 {
                return false;
            }
        }
        let mut prod: u64 = 1;
        for &r in key {
            match prod.checked_mul(r) {
                Some(p) => prod = p,
                None => return false,
            }
        }
        (prod as f64) < self.r_level
            && gcd(prod, self.vpf) == 1
            && crate::arith::is_squarefree(prod)
    }

    /// Every supported key, in lexicographic order.
    pub fn keys(&self) -> Vec<Vec<u64>> {
        let bound = if self.r_level <= 1.0 {
            return Vec::new();
        } else {
            self.r_level.ceil() as u64
        };
        let primes: Vec<u64> = small_primes(bound)
            .into_iter()
            .filter(|&p| !self.vpf.is_multiple_of(p))
            .collect();
        let mut out = Vec::new();
        let mut key = vec![1u64; self.k];
        self.assign(&primes, 0, 1, &mut key, &mut out);
        out.sort();
        out
    }

    // distribute increasing primes among the coordinates
    fn assign(&self, primes: &[u64], start: usize, prod: u64, key: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(key.clone());
        for (idx, &p) in primes.iter().enumerate().skip(start) {
            let next = prod * p;
            if next as f64 >= self.r_level {
                break;
            }
            for i in 0..self.k {
                if self.fixed_one == Some(i) {
                    continue;
                }
                key[i] *= p;
                self.assign(primes, idx + 1, next, key, out);
                key[i] /= p;
            }
        }
    }
}

/// Exact weights on a [`Support`]. Every supported key is present (possibly
/// with value 0); lookups off the support return 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub kind: WeightKind,
    pub support: Support,
    pub entries: BTreeMap<Vec<u64>, BigRational>,
}

impl WeightTable {
    pub fn zero(kind: WeightKind, support: Support) -> Self {
        let entries = support
            .keys()
            .into_iter()
            .map(|k| (k, BigRational::zero()))
            .collect();
        WeightTable {
            kind,
            support,
            entries,
        }
    }

    pub fn get(&self, key: &[u64]) -> BigRational {
        self.entries.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Sets a supported entry; panics when `key` is off the support.
    pub fn set(&mut self, key: &[u64], value: BigRational) {
        assert!(self.support.contains(key), "{key:?} is outside the weight support");
        self.entries.insert(key.to_vec(), value);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u64>, &BigRational)> {
        self.entries.iter()
    }

    /// Entries with a nonzero value.
    pub fn nonzero(&self) -> impl Iterator<Item = (&Vec<u64>, &BigRational)> {
        self.entries.iter().filter(|(_, v)| !v.is_zero())
    }

    /// Largest absolute difference between two tables, over both supports.
    pub fn max_abs_diff(&self, other: &WeightTable) -> BigRational {
        let mut worst = BigRational::zero();
        for key in self.entries.keys().chain(other.entries.keys()) {
            let d = num::abs(self.get(key) - other.get(key));
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// All divisor vectors `(r_1, ..., r_k)` with `r_i | d_i`, for squarefree `d_i`.
pub(crate) fn divisor_vectors(d: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::with_capacity(d.len())];
    for &di in d {
        let divs = crate::arith::squarefree_divisors(&prime_divisors(di));
        let mut next = Vec::with_capacity(out.len() * divs.len());
        for prefix in &out {
            for &r in &divs {
                let mut v = prefix.clone();
                v.push(r);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn support(k: usize, vpf: u64, r: f64) -> Support {
        Support {
            k,
            vpf,
            r_level: r,
            fixed_one: None,
        }
    }

    #[test]
    fn key_enumeration_matches_filter() {
        for (k, vpf, r) in [(1, 6, 30.0), (2, 6, 30.0), (3, 30, 40.0), (2, 1, 12.5), (2, 2, 1.0)] {
            let s = support(k, vpf, r);
            let keys = s.keys();
            let bound = r.ceil() as u64;
            let mut brute = Vec::new();
            let mut key = vec![1u64; k];
            loop {
                if s.contains(&key) {
                    brute.push(key.clone());
                }
                let mut i = 0;
                loop {
                    if i == k {
                        break;
                    }
                    key[i] += 1;
                    if key[i] <= bound {
                        break;
                    }
                    key[i] = 1;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
            brute.sort();
            assert_eq!(keys, brute, "k={k} vpf={vpf} R={r}");
        }
    }

    #[test]
    fn fixed_coordinate() {
        let s = support(2, 6, 30.0).with_fixed_one(1);
        assert!(s.keys().iter().all(|k| k[1] == 1));
        assert!(!s.contains(&[1, 5]));
        assert!(s.contains(&[5, 1]));
    }

    #[test]
    fn off_support_reads_zero() {
        let t = WeightTable::zero(WeightKind::Y, support(2, 6, 30.0));
        assert!(t.get(&[2, 1]).is_zero());
        assert!(t.get(&[5, 7]).is_zero());
        assert_eq!(t.len(), t.support.keys().len());
    }

    #[test]
    fn divisors_of_vectors() {
        let v = divisor_vectors(&[6, 5]);
        assert_eq!(v.len(), 8);
        assert!(v.contains(&vec![3, 5]));
        assert_eq!(divisor_vectors(&[1, 1]), vec![vec![1, 1]]);
    }
}
