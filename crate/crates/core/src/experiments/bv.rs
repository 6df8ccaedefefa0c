use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, gcd, CompensatedSum};
use crate::error::{invalid, Error, Result};
use crate::primes::PrimeTable;
use crate::variational::Regime;

/// Largest `X` a scan accepts unless the caller raises it.
pub const DESK_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BVScanConfig {
    pub x_scale: u64,
    pub modulus: u64,
    pub pf: u64,
    pub q_max: u64,
    pub regime: Regime,
    /// Slack in the advisory range `q ≤ X^{e_f - δ}`.
    pub delta: f64,
    /// Exponent `A` of the reference scale `X / (φ(M) (log X)^A)`.
    pub a_exponent: f64,
    pub cap: u64,
}

impl BVScanConfig {
    pub fn new(x_scale: u64, modulus: u64, q_max: u64, regime: Regime) -> Self {
        BVScanConfig {
            x_scale,
            modulus,
            pf: 1,
            q_max,
            regime,
            delta: 0.01,
            a_exponent: 1.0,
            cap: DESK_CAP,
        }
    }

    /// `1/2` for moduli up to `exp(C √log X)`, `ϑ` beyond.
    pub fn e_f(&self) -> f64 {
        match self.regime {
            Regime::LogPower | Regime::ExpSqrt => 0.5,
            Regime::Power(theta) => theta,
        }
    }

    /// Size of the exception set in this regime.
    pub fn z_f(&self) -> &'static str {
        match self.regime {
            Regime::LogPower => "0",
            Regime::ExpSqrt => "1",
            Regime::Power(_) => "O((log log X)^C)",
        }
    }

    /// `X^{e_f - δ}`.
    pub fn q_limit(&self) -> f64 {
        (self.x_scale as f64).powf(self.e_f() - self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BVRow {
    pub q: u64,
    /// `qM`.
    pub modulus: u64,
    /// `max_{(a,qM)=1} |ψ(X;qM,a) - ψ(X)/φ(qM)|`.
    pub max_discrepancy: f64,
    /// Smallest residue attaining the maximum.
    pub worst_residue: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BVReport {
    pub config: BVScanConfig,
    pub e_f: f64,
    pub z_f: String,
    pub q_limit: f64,
    /// Whether `q_max ≤ X^{e_f - δ}`; advisory only.
    pub q_range_ok: bool,
    pub psi_x: f64,
    pub total: f64,
    /// `X / (φ(M) (log X)^A)`.
    pub reference: f64,
    pub ratio: f64,
    pub rows: Vec<BVRow>,
}

/// Prime powers `p^j ≤ X` with `log p`, in increasing order of `p`.
fn prime_powers(table: &PrimeTable, x: u64) -> (Vec<u64>, Vec<f64>) {
    let mut values = Vec::new();
    let mut logs = Vec::new();
    for p in table.range(2, x) {
        let lp = (p as f64).ln();
        let mut pk = p;
        loop {
            values.push(pk);
            logs.push(lp);
            match pk.checked_mul(p) {
                Some(next) if next <= x => pk = next,
                _ => break,
            }
        }
    }
    (values, logs)
}

pub fn bv_discrepancy(cfg: &BVScanConfig) -> Result<BVReport> {
    if cfg.x_scale > cfg.cap {
        return Err(Error::LimitAboveCap {
            limit: cfg.x_scale,
            cap: cfg.cap,
        });
    }
    if cfg.modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    if cfg.pf == 0 {
        return Err(invalid("pf", "must be positive (use 1 for none)"));
    }
    if cfg.q_max == 0 {
        return Err(invalid("q_max", "must be at least 1"));
    }
    let table = PrimeTable::new(cfg.x_scale.max(2))?;
    bv_discrepancy_in(&table, cfg)
}

/// As [`bv_discrepancy`], reusing a table that covers `X`.
pub fn bv_discrepancy_in(table: &PrimeTable, cfg: &BVScanConfig) -> Result<BVReport> {
    let x = cfg.x_scale;
    if table.limit() < x {
        return Err(Error::TableTooSmall {
            have: table.limit(),
            need: x,
        });
    }
    let (values, logs) = prime_powers(table, x);
    let psi_x = logs.iter().copied().collect::<CompensatedSum>().value();
    let mpf = cfg.modulus * cfg.pf;
    let qs: Vec<u64> = (1..=cfg.q_max).filter(|&q| gcd(q, mpf) == 1).collect();
    let rows: Vec<BVRow> = qs
        .par_iter()
        .map(|&q| {
            let big_q = q * cfg.modulus;
            let mut acc = vec![CompensatedSum::new(); big_q as usize];
            for (&v, &l) in values.iter().zip(&logs) {
                acc[(v % big_q) as usize].add(l);
            }
            let expected = psi_x / euler_phi(big_q) as f64;
            let (worst_residue, max_discrepancy) = (0..big_q)
                .filter(|&a| gcd(a, big_q) == 1)
                .map(|a| (a, (acc[a as usize].value() - expected).abs()))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            BVRow {
                q,
                modulus: big_q,
                max_discrepancy,
                worst_residue,
            }
        })
        .collect();
    let total = rows.iter().map(|r| r.max_discrepancy).collect::<CompensatedSum>().value();
    let reference = x as f64 / euler_phi(cfg.modulus) as f64 / (x as f64).ln().powf(cfg.a_exponent);
    Ok(BVReport {
        config: cfg.clone(),
        e_f: cfg.e_f(),
        z_f: cfg.z_f().to_string(),
        q_limit: cfg.q_limit(),
        q_range_ok: cfg.q_max as f64 <= cfg.q_limit(),
        psi_x,
        total,
        reference,
        ratio: total / reference,
        rows,
    })
}
