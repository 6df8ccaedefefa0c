//! Maynard–Tao sieve weights for a dilated tuple `h_i = M·b_i + a`.
//!
//! Weights `y_r` are sampled from a symmetric `F` on the simplex, turned into
//! `λ_d` and `y^{(m)}_r` exactly, and fed into the window sums `S1`, `S2`.
//!
//! ```
//! use apgaps::sieveweights::{lambda_from_y, s1_bruteforce, s1_rearranged, y_from_f, SieveConfig, SieveParams};
//! use apgaps::tuples::Tuple;
//!
//! let cfg = SieveConfig::new(&SieveParams {
//!     x_scale: 3_000,
//!     modulus: 1,
//!     residue: 0,
//!     base: Tuple::new(&[0, 2]).unwrap(),
//!     theta: 0.49,
//!     delta: 0.02,
//!     d0: 3,
//!     pf: 1,
//! })
//! .unwrap();
//! let y = y_from_f(&cfg, |t| 1.0 - t.iter().sum::<f64>()).unwrap();
//! let lambda = lambda_from_y(&y);
//! assert_eq!(s1_bruteforce(&cfg, &lambda), s1_rearranged(&cfg, &lambda));
//! ```

mod asymptotic;
mod config;
mod selftest;
mod sums;
mod table;
mod transforms;

pub use asymptotic::{s1_asymptotic, s2_asymptotic, S2Asymptotic};
pub use config::{choose_nu0, count_in_class, SieveConfig, SieveParams};
pub use selftest::{lcm_expansion, multiplicative_identities_selftest, phi_expansion, SelftestReport};
pub use sums::{pair_class, rho_from_mk, s1_bruteforce, s1_rearranged, s2_bruteforce, s_rho, S2Sums, SumsReport};
pub use table::{Support, WeightKind, WeightTable};
pub use transforms::{
    collapse_sides, lambda_from_y, y_from_f, y_from_lambda, ym_from_lambda, ym_identity_check,
    IdentityReport,
};

use num::{BigRational, ToPrimitive};
use serde::Serialize;

use crate::error::Result;
use crate::primes::PrimeTable;
use crate::variational::{maximize_mk, SymmetricPoly};

/// Everything `sieve demo` reports.
#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub config: SieveConfig,
    pub degree: u32,
    pub mk_lower_bound: f64,
    pub support_size: usize,
    pub sums: SumsReport,
    pub s1_main_term: f64,
    pub s2_main_term: f64,
    pub s1_ratio: f64,
    pub s2_ratio: f64,
    /// `(log R / log X)·M_k`, the main-term ratio `S2/S1`.
    pub main_term_quotient: f64,
    pub warnings: Vec<String>,
}

/// The optimal polynomial of [`maximize_mk`] as a [`SymmetricPoly`].
pub fn optimal_f(k: usize, degree: u32) -> Result<(SymmetricPoly, f64)> {
    let res = maximize_mk(k, degree)?;
    let terms = res
        .basis
        .iter()
        .zip(&res.witness)
        .filter(|(_, w)| **w != 0.0)
        .map(|(b, &w)| (*b, BigRational::from_float(w).expect("finite witness")))
        .collect();
    Ok((SymmetricPoly::new(k, terms), res.lower_bound))
}

/// Runs the whole pipeline for the optimal `F` of the given degree:
/// weights, brute-force sums, main terms and their ratios, with
/// `ρ = ϑ M_k / 2 - δ`.
pub fn sieve_demo(params: &SieveParams, degree: u32) -> Result<DemoReport> {
    let cfg = SieveConfig::new(params)?;
    let primes = PrimeTable::new(cfg.max_shifted().max(2))?;
    sieve_demo_in(params, degree, &primes)
}

/// As [`sieve_demo`], with a prime table covering [`SieveConfig::max_shifted`].
pub fn sieve_demo_in(params: &SieveParams, degree: u32, primes: &PrimeTable) -> Result<DemoReport> {
    let cfg = SieveConfig::new(params)?;
    let (f, mk) = optimal_f(cfg.k, degree)?;
    let y = y_from_f(&cfg, |t| f.eval(t))?;
    let lambda = lambda_from_y(&y);
    let s1 = s1_bruteforce(&cfg, &lambda);
    let s2 = s2_bruteforce(&cfg, &lambda, primes)?;
    let rho = rho_from_mk(cfg.theta, mk, cfg.delta);
    let window_len = cfg.window_len();
    let sums = SumsReport::new(window_len, &s1, &s2, rho)?;
    let m1 = s1_asymptotic(&cfg, &f)?;
    let m2 = s2_asymptotic(&cfg, &f)?;
    let mut warnings = Vec::new();
    if window_len == 0 {
        warnings.push("empty window: all sums are 0".to_string());
    }
    Ok(DemoReport {
        main_term_quotient: m2.total / m1,
        s1_ratio: s1.to_f64().unwrap_or(f64::NAN) / m1,
        s2_ratio: sums.s2 / m2.total,
        support_size: y.len(),
        config: cfg,
        degree,
        mk_lower_bound: mk,
        sums,
        s1_main_term: m1,
        s2_main_term: m2.total,
        warnings,
    })
}

/// Exact structural checks on one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigSelftest {
    pub round_trip_exact: bool,
    pub ym_identities: Vec<IdentityReport>,
    pub s1_agree: bool,
}

/// λ↔y round-trip, the `y^{(m)}` identity for every `m`, and
/// `s1_bruteforce = s1_rearranged`, for `y` sampled from `f`.
pub fn config_selftest(cfg: &SieveConfig, f: impl Fn(&[f64]) -> f64) -> Result<ConfigSelftest> {
    let y = y_from_f(cfg, f)?;
    let lambda = lambda_from_y(&y);
    let back = y_from_lambda(&lambda);
    let ym_identities = (0..cfg.k)
        .map(|m| ym_identity_check(&y, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfigSelftest {
        round_trip_exact: back.entries == y.entries,
        ym_identities,
        s1_agree: s1_bruteforce(cfg, &lambda) == s1_rearranged(cfg, &lambda),
    })
}
