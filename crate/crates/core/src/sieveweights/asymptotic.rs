//! Main terms of `S1` and `S2` as the window grows.
//!
//! ```text
//! S1     ~ φ(VP_f)^k X (log R)^k     / (V (VP_f)^k)         · I_k(F)
//! S2^(m) ~ φ(VP_f)^k X (log R)^{k+1} / (V (VP_f)^k log X)   · J_k^(m)(F)
//! ```

use num::ToPrimitive;
use serde::Serialize;

use super::config::SieveConfig;
use crate::arith::prime_divisors;
use crate::error::{invalid, Result};
use crate::variational::{i_k, j_total, SymmetricPoly};

/// `(φ(VP_f)/(VP_f))^k · X / V`.
fn density_factor(cfg: &SieveConfig) -> f64 {
    let ratio: f64 = prime_divisors(cfg.vpf())
        .into_iter()
        .map(|p| 1.0 - 1.0 / p as f64)
        .product();
    ratio.powi(cfg.k as i32) * cfg.x_scale as f64 / cfg.v as f64
}

fn check(cfg: &SieveConfig, f: &SymmetricPoly) -> Result<f64> {
    if f.k != cfg.k {
        return Err(invalid("F", format!("F has k = {} but the tuple has k = {}", f.k, cfg.k)));
    }
    if !(cfg.r_level > 1.0) {
        return Err(invalid("R", format!("sieve level must exceed 1, got {}", cfg.r_level)));
    }
    Ok(cfg.r_level.ln())
}

pub fn s1_asymptotic(cfg: &SieveConfig, f: &SymmetricPoly) -> Result<f64> {
    let log_r = check(cfg, f)?;
    let i = i_k(f)?.to_f64().unwrap_or(f64::NAN);
    Ok(density_factor(cfg) * log_r.powi(cfg.k as i32) * i)
}

#[derive(Debug, Clone, Serialize)]
pub struct S2Asymptotic {
    /// Identical for every `m` since `F` is symmetric.
    pub per_m: f64,
    pub total: f64,
}

pub fn s2_asymptotic(cfg: &SieveConfig, f: &SymmetricPoly) -> Result<S2Asymptotic> {
    let log_r = check(cfg, f)?;
    let j = j_total(f)?.to_f64().unwrap_or(f64::NAN);
    let log_x = (cfg.x_scale as f64).ln();
    let total = density_factor(cfg) * log_r.powi(cfg.k as i32 + 1) / log_x * j;
    Ok(S2Asymptotic {
        per_m: total / cfg.k as f64,
        total,
    })
}
