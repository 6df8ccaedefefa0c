//! Admissible tuples.
//!
//! A set of `k` integers is admissible when, for every prime `p`, it misses at
//! least one residue class mod `p`. Only primes `p ≤ k` need checking: `k`
//! integers occupy at most `k < p` classes mod any larger prime, so at least
//! one class is always missed there.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::arith::{gcd, small_primes};
use crate::error::{Error, Result};
use crate::primes::{nth_prime_upper_bound, PrimeTable};

/// Strictly increasing offsets normalized to start at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple {
    offsets: Vec<u64>,
}

impl Tuple {
    /// Builds a tuple from strictly increasing offsets, shifting them so the
    /// first one is 0.
    pub fn new(offsets: &[i64]) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidTuple("a tuple needs at least one offset".into()));
        }
        if let Some(w) = offsets.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTuple(format!(
                "offsets must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        let first = offsets[0];
        Ok(Tuple {
            offsets: offsets.iter().map(|&h| (h - first) as u64).collect(),
        })
    }

    pub(crate) fn from_sorted_unchecked(offsets: Vec<u64>) -> Self {
        debug_assert!(offsets.windows(2).all(|w| w[0] < w[1]));
        let first = offsets[0];
        Tuple {
            offsets: offsets.into_iter().map(|h| h - first).collect(),
        }
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn diameter(&self) -> u64 {
        *self.offsets.last().unwrap()
    }

    /// `h ↦ diam - h`, renormalized.
    pub fn reversed(&self) -> Tuple {
        let d = self.diameter();
        Tuple {
            offsets: self.offsets.iter().rev().map(|&h| d - h).collect(),
        }
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.offsets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl FromStr for Tuple {
    type Err = Error;

    /// Parses the one-line comma-separated format. Blank lines and `#`
    /// comments around the data line are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let mut data = None;
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if data.is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "expected a single line of offsets".into(),
                });
            }
            data = Some((lineno + 1, line));
        }
        let (lineno, line) = data.ok_or(Error::Parse {
            line: 1,
            message: "no offsets found".into(),
        })?;
        let offsets = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<i64>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad offset `{}`: {e}", tok.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Tuple::new(&offsets)
    }
}

/// The first prime `p ≤ k` whose residue classes are all hit, if any.
pub fn admissibility_obstruction(t: &Tuple) -> Option<u64> {
    let k = t.len() as u64;
    let mut seen = Vec::new();
    for p in small_primes(k) {
        seen.clear();
        seen.resize(p as usize, false);
        for &h in t.offsets() {
            seen[(h % p) as usize] = true;
        }
        if seen.iter().all(|&s| s) {
            return Some(p);
        }
    }
    None
}

pub fn is_admissible(t: &Tuple) -> bool {
    admissibility_obstruction(t).is_none()
}

/// `{p_{π(k)+1}, ..., p_{π(k)+k}}` shifted to start at 0. Every element is a
/// prime larger than `k`, so no class 0 mod `p ≤ k` is hit.
pub fn shifted_primes_tuple(k: usize) -> Tuple {
    assert!(k >= 1, "k must be at least 1");
    if k == 1 {
        return Tuple { offsets: vec![0] };
    }
    let pi_k = small_primes(k as u64).len();
    let need = (pi_k + k) as u64;
    let table = PrimeTable::new(nth_prime_upper_bound(need)).expect("bound is small");
    let primes: Vec<u64> = table.iter().skip(pi_k).take(k).collect();
    Tuple::from_sorted_unchecked(primes)
}

/// The tuple `{M h_i + a}`; all elements are `≡ a (mod M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilatedTuple {
    pub base: Tuple,
    pub modulus: u64,
    pub residue: u64,
}

impl DilatedTuple {
    pub fn elements(&self) -> Vec<u64> {
        self.base
            .offsets()
            .iter()
            .map(|&h| self.modulus * h + self.residue)
            .collect()
    }

    pub fn diameter(&self) -> u64 {
        self.modulus * self.base.diameter()
    }
}

pub fn dilate(t: &Tuple, modulus: u64, residue: u64) -> Result<DilatedTuple> {
    if modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    let g = gcd(residue % modulus, modulus);
    if g != 1 {
        return Err(Error::NotCoprime {
            residue,
            modulus,
            gcd: g,
        });
    }
    Ok(DilatedTuple {
        base: t.clone(),
        modulus,
        residue,
    })
}

/// How much work [`narrow_tuple`] may spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchBudget {
    /// Number of sieve candidates (shift, width) evaluated by the greedy
    /// refinement. Candidates are visited in a fixed order, so a larger
    /// budget never yields a wider tuple.
    Candidates(usize),
    /// Depth-first search for a true minimum; only feasible for small `k`.
    /// Falls back to a large candidate budget when `k > EXHAUSTIVE_MAX_K`.
    Exhaustive,
}

pub const EXHAUSTIVE_MAX_K: usize = 12;

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::Candidates(4096)
    }
}

/// Finds a narrow admissible `k`-tuple.
///
/// Starts from [`shifted_primes_tuple`] and improves on it with a greedy
/// residue sieve over shifted intervals `[s, s + D]`: for each prime `p ≤ k`
/// in turn, the class mod `p` hitting the fewest survivors is removed (ties go
/// to the smallest class). The narrowest `k` consecutive survivors give a
/// candidate. The width `D` is bisected between the current best diameter and
/// a lower bound. Ties between equally narrow tuples go to the
/// lexicographically smallest offsets.
pub fn narrow_tuple(k: usize, budget: SearchBudget) -> Tuple {
    assert!(k >= 1, "k must be at least 1");
    if k == 1 {
        return Tuple { offsets: vec![0] };
    }
    let candidates = match budget {
        SearchBudget::Exhaustive if k <= EXHAUSTIVE_MAX_K => {
            let t = minimal_admissible_tuple(k);
            debug_assert!(is_admissible(&t));
            return t;
        }
        SearchBudget::Exhaustive => 1 << 16,
        SearchBudget::Candidates(n) => n,
    };
    let mut best = shifted_primes_tuple(k);
    let sieve = GreedySieve::new(k);
    let mut spent = 0usize;

    // Each round fixes a width and scans shifts; the rounds themselves are a
    // bisection on the width.
    let mut lo = (k as u64 - 1).max(1); // k distinct integers need width >= k-1
    let mut hi = best.diameter();
    while lo < hi && spent < candidates {
        let width = lo + (hi - lo) / 2;
        let shifts = shifts_for(width, k, candidates - spent);
        spent += shifts.len();
        let found = shifts
            .par_iter()
            .filter_map(|&s| sieve.run(s, width))
            .min_by(|a, b| (a.diameter(), a.offsets()).cmp(&(b.diameter(), b.offsets())));
        match found {
            Some(t) => {
                hi = t.diameter();
                if (t.diameter(), t.offsets()) < (best.diameter(), best.offsets()) {
                    best = t;
                }
            }
            None => lo = width + 1,
        }
    }
    debug_assert!(is_admissible(&best));
    best
}

// Shifts to try at a given width: centred intervals first (Hensley–Richards),
// then walking away from zero in both directions.
fn shifts_for(width: u64, k: usize, room: usize) -> Vec<i64> {
    let per_round = room.min(64 + 4 * k);
    let centre = -(width as i64) / 2;
    let mut out = Vec::with_capacity(per_round);
    out.push(0);
    out.push(centre);
    let mut step = 1i64;
    while out.len() < per_round {
        out.push(centre + step);
        if out.len() < per_round {
            out.push(centre - step);
        }
        if out.len() < per_round {
            out.push(step);
        }
        step += 1;
    }
    out.truncate(per_round);
    out
}

struct GreedySieve {
    k: usize,
    primes: Vec<u64>,
}

impl GreedySieve {
    fn new(k: usize) -> Self {
        GreedySieve {
            k,
            primes: small_primes(k as u64),
        }
    }

    /// Sieve `[shift, shift + width]`; returns the narrowest `k` survivors.
    fn run(&self, shift: i64, width: u64) -> Option<Tuple> {
        let mut alive: Vec<i64> = (shift..=shift + width as i64).collect();
        let mut counts = Vec::new();
        for &p in &self.primes {
            if alive.len() < self.k {
                return None;
            }
            counts.clear();
            counts.resize(p as usize, 0usize);
            for &n in &alive {
                counts[n.rem_euclid(p as i64) as usize] += 1;
            }
            let (class, _) = counts
                .iter()
                .enumerate()
                .min_by_key(|&(c, &n)| (n, c))
                .unwrap();
            alive.retain(|&n| n.rem_euclid(p as i64) as usize != class);
        }
        if alive.len() < self.k {
            return None;
        }
        let (start, _) = alive
            .windows(self.k)
            .enumerate()
            .min_by_key(|(i, w)| (w[self.k - 1] - w[0], *i))
            .unwrap();
        let w = &alive[start..start + self.k];
        Some(Tuple {
            offsets: w.iter().map(|&n| (n - w[0]) as u64).collect(),
        })
    }
}

/// Smallest-diameter admissible `k`-tuple, lexicographically smallest among
/// ties, by depth-first search over offsets with per-prime class pruning.
pub fn minimal_admissible_tuple(k: usize) -> Tuple {
    assert!(k >= 1);
    if k == 1 {
        return Tuple { offsets: vec![0] };
    }
    let primes = small_primes(k as u64);
    let mut diameter = k as u64 - 1;
    loop {
        let mut chosen = vec![0u64];
        let mut classes: Vec<Vec<u32>> = primes.iter().map(|&p| vec![0; p as usize]).collect();
        for (pi, &p) in primes.iter().enumerate() {
            classes[pi][0 % p as usize] += 1;
        }
        if dfs(k, diameter, &primes, &mut chosen, &mut classes) {
            return Tuple { offsets: chosen };
        }
        diameter += 1;
    }
}

fn covers_all(classes: &[u32]) -> bool {
    classes.iter().all(|&c| c > 0)
}

fn dfs(k: usize, diameter: u64, primes: &[u64], chosen: &mut Vec<u64>, classes: &mut [Vec<u32>]) -> bool {
    let last = *chosen.last().unwrap();
    let remaining = k - chosen.len();
    if remaining == 0 {
        return last == diameter;
    }
    // the final element must be exactly `diameter`
    let candidates: Box<dyn Iterator<Item = u64>> = if remaining == 1 {
        Box::new(std::iter::once(diameter))
    } else {
        Box::new(last + 1..=diameter - remaining as u64 + 1)
    };
    for h in candidates {
        if h <= last {
            continue;
        }
        for (pi, &p) in primes.iter().enumerate() {
            classes[pi][(h % p) as usize] += 1;
        }
        let ok = classes.iter().all(|c| !covers_all(c));
        if ok {
            chosen.push(h);
            if dfs(k, diameter, primes, chosen, classes) {
                return true;
            }
            chosen.pop();
        }
        for (pi, &p) in primes.iter().enumerate() {
            classes[pi][(h % p) as usize] -= 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> Tuple {
        Tuple::new(v).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&t(&[0, 2])));
        assert!(!is_admissible(&t(&[0, 1])));
        assert!(is_admissible(&t(&[0, 2, 6, 8, 12])));
        assert_eq!(admissibility_obstruction(&t(&[0, 2, 4])), Some(3));
        assert!(is_admissible(&t(&[0])));
    }

    #[test]
    fn construction_and_normalization() {
        assert_eq!(t(&[5, 7, 11]).offsets(), &[0, 2, 6]);
        assert_eq!(t(&[-3, 0]).offsets(), &[0, 3]);
        assert!(Tuple::new(&[]).is_err());
        assert!(Tuple::new(&[0, 0]).is_err());
        assert!(Tuple::new(&[3, 1]).is_err());
        assert_eq!(t(&[0, 2, 6]).reversed().offsets(), &[0, 4, 6]);
    }

    #[test]
    fn text_format() {
        let x: Tuple = "0,2,6,8,12\n".parse().unwrap();
        assert_eq!(x.offsets(), &[0, 2, 6, 8, 12]);
        assert_eq!(x.to_string(), "0,2,6,8,12");
        let y: Tuple = "# comment\n 3, 5 ,9\n\n".parse().unwrap();
        assert_eq!(y.offsets(), &[0, 2, 6]);
        assert!(matches!("0,2\n4,6".parse::<Tuple>(), Err(Error::Parse { line: 2, .. })));
        assert!(matches!("0,x".parse::<Tuple>(), Err(Error::Parse { line: 1, .. })));
        assert!("".parse::<Tuple>().is_err());
    }

    #[test]
    fn shifted_primes_examples() {
        assert_eq!(shifted_primes_tuple(1).offsets(), &[0]);
        assert_eq!(shifted_primes_tuple(2).offsets(), &[0, 2]);
        assert_eq!(shifted_primes_tuple(5).offsets(), &[0, 4, 6, 10, 12]);
    }

    #[test]
    fn dilation() {
        let d = dilate(&t(&[0, 2]), 5, 1).unwrap();
        assert_eq!(d.elements(), vec![1, 11]);
        assert_eq!(d.diameter(), 10);
        assert_eq!(dilate(&t(&[0, 2, 6]), 3, 2).unwrap().elements(), vec![2, 8, 20]);
        assert_eq!(dilate(&t(&[0]), 7, 3).unwrap().elements(), vec![3]);
        assert!(matches!(dilate(&t(&[0, 2]), 4, 2), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn narrow_small() {
        assert_eq!(narrow_tuple(1, SearchBudget::default()).diameter(), 0);
        let five = narrow_tuple(5, SearchBudget::default());
        assert!(is_admissible(&five));
        assert_eq!(five.diameter(), 12);
        assert_eq!(minimal_admissible_tuple(2).offsets(), &[0, 2]);
        assert_eq!(minimal_admissible_tuple(3).diameter(), 6);
    }
}
