use num::{BigInt, BigRational};
use serde::Serialize;

use super::transforms::collapse_sides;
use crate::arith::{euler_phi, g_mult, gcd, is_squarefree, lcm, prime_divisors, squarefree_divisors};

/// Outcome of [`multiplicative_identities_selftest`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct SelftestReport {
    pub bound: u64,
    pub pairs_checked: u64,
    /// Pairs where `1/[d,e] = (1/de) Σ_{u|(d,e)} φ(u)` failed.
    pub lcm_failures: Vec<(u64, u64)>,
    /// Pairs where `1/φ([d,e]) = (1/φ(d)φ(e)) Σ_{u|(d,e)} g(u)` failed.
    pub phi_failures: Vec<(u64, u64)>,
    pub collapse_checked: u64,
    /// `(a, r)` where `Σ_{r|d|a} μ(d)d/φ(d) = μ(a)r/φ(a)` failed.
    pub collapse_failures: Vec<(u64, u64)>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.lcm_failures.is_empty() && self.phi_failures.is_empty() && self.collapse_failures.is_empty()
    }
}

fn ratio(n: i64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Both sides of the `1/[d,e]` expansion.
pub fn lcm_expansion(d: u64, e: u64) -> (BigRational, BigRational) {
    let s: u64 = squarefree_divisors(&prime_divisors(gcd(d, e)))
        .into_iter()
        .map(euler_phi)
        .sum();
    (ratio(1, lcm(d, e)), ratio(s as i64, d * e))
}

/// Both sides of the `1/φ([d,e])` expansion.
pub fn phi_expansion(d: u64, e: u64) -> (BigRational, BigRational) {
    let s: i64 = squarefree_divisors(&prime_divisors(gcd(d, e)))
        .into_iter()
        .map(g_mult)
        .sum();
    (
        ratio(1, euler_phi(lcm(d, e))),
        ratio(s, euler_phi(d) * euler_phi(e)),
    )
}

/// Checks the two divisor-sum expansions for all squarefree `d, e ≤ bound`
/// and the collapse identity for all squarefree `a ≤ bound`, `r | a`.
pub fn multiplicative_identities_selftest(bound: u64) -> SelftestReport {
    let sf: Vec<u64> = (1..=bound).filter(|&n| is_squarefree(n)).collect();
    let mut report = SelftestReport {
        bound,
        ..Default::default()
    };
    for &d in &sf {
        for &e in &sf {
            report.pairs_checked += 1;
            let (l, r) = lcm_expansion(d, e);
            if l != r {
                report.lcm_failures.push((d, e));
            }
            let (l, r) = phi_expansion(d, e);
            if l != r {
                report.phi_failures.push((d, e));
            }
        }
    }
    for &a in &sf {
        for r in squarefree_divisors(&prime_divisors(a)) {
            report.collapse_checked += 1;
            let (l, rhs) = collapse_sides(a, r);
            if l != rhs {
                report.collapse_failures.push((a, r));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_examples() {
        assert_eq!(lcm_expansion(6, 10), (ratio(1, 30), ratio(2, 60)));
        let (l, r) = phi_expansion(6, 10);
        assert_eq!(l, ratio(1, 8));
        assert_eq!(r, ratio(1, 8));
        assert_eq!(lcm_expansion(1, 1).0, lcm_expansion(1, 1).1);
        assert_eq!(collapse_sides(6, 2), (ratio(1, 1), ratio(1, 1)));
    }

    #[test]
    fn all_pairs_up_to_200() {
        let r = multiplicative_identities_selftest(200);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.pairs_checked, 122 * 122);
    }

    #[test]
    fn the_check_can_fail() {
        // a wrong right-hand side is caught
        let (l, r) = lcm_expansion(6, 10);
        assert_ne!(l, r * ratio(2, 1));
    }
}
