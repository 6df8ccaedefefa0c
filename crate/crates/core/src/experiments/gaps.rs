use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{APWindow, PrimeTable};
use crate::tuples::Tuple;
use crate::variational::{theorem_bound, Regime};

/// What to scan: primes `≡ residue (mod modulus)` in `[X, 2X]`, windows of
/// `r + 1` consecutive such primes.
#[derive(Debug, Clone, PartialEq)]
pub struct GapQuery {
    pub modulus: u64,
    pub residue: u64,
    pub x_scale: u64,
    pub r: u64,
    pub tuple_hint: Option<Tuple>,
    pub regime: Regime,
}

impl GapQuery {
    pub fn new(modulus: u64, residue: u64, x_scale: u64, r: u64) -> Self {
        GapQuery {
            modulus,
            residue,
            x_scale,
            r,
            tuple_hint: None,
            regime: Regime::LogPower,
        }
    }

    pub fn with_tuple(mut self, t: Tuple) -> Self {
        self.tuple_hint = Some(t);
        self
    }

    /// Upper end of the scanned range.
    pub fn hi(&self) -> u64 {
        2 * self.x_scale
    }
}

/// One row of a gap scan. CSV columns follow the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub modulus: u64,
    pub residue: u64,
    pub x_scale: u64,
    pub r: u64,
    pub gap_observed: u64,
    pub regime: String,
    pub bound_shape: String,
    pub bound_coefficient: f64,
    /// `gap ≤ coefficient·M`, only when the bound is explicit.
    pub within_bound: Option<bool>,
    /// The earliest minimal window.
    #[serde(with = "space_list")]
    pub witness_primes: Vec<u64>,
    /// Number of windows attaining the minimum.
    pub minimal_windows: u64,
    pub tuple_hint: Option<String>,
    /// Smallest `n` with `nM + a + M·b_0 ∈ [X, 2X]` whose translate of the
    /// hint holds `r + 1` primes.
    pub tuple_translate: Option<u64>,
}

mod space_list {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<String> = v.iter().map(u64::to_string).collect();
        s.serialize_str(&text.join(" "))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        let text = String::deserialize(d)?;
        text.split_whitespace()
            .map(|t| t.parse().map_err(D::Error::custom))
            .collect()
    }
}

/// Start indices `i` of the minimal windows `ps[i..=i+r]`, and the minimal diameter.
pub fn minimal_windows(ps: &[u64], r: usize) -> Option<(u64, Vec<usize>)> {
    if r == 0 || ps.len() < r + 1 {
        return None;
    }
    let best = (0..ps.len() - r).map(|i| ps[i + r] - ps[i]).min()?;
    let starts = (0..ps.len() - r).filter(|&i| ps[i + r] - ps[i] == best).collect();
    Some((best, starts))
}

/// Sieves to `2X` and scans; see [`gap_scan_in`].
pub fn gap_scan(query: &GapQuery) -> Result<GapRecord> {
    let hint_reach = query
        .tuple_hint
        .as_ref()
        .map_or(0, |t| t.diameter() * query.modulus);
    let table = PrimeTable::new(query.hi() + hint_reach)?;
    gap_scan_in(&table, query)
}

pub fn gap_scan_in(table: &PrimeTable, query: &GapQuery) -> Result<GapRecord> {
    if query.r == 0 {
        return Err(crate::error::invalid("r", "must be at least 1"));
    }
    let window = APWindow::new(query.modulus, query.residue, query.x_scale, query.hi())?;
    if table.limit() < query.hi() {
        return Err(Error::TableTooSmall {
            have: table.limit(),
            need: query.hi(),
        });
    }
    let ps: Vec<u64> = window.iter(table).collect();
    let r = query.r as usize;
    let (gap, starts) = minimal_windows(&ps, r).ok_or(Error::InsufficientPrimes {
        found: ps.len(),
        needed: r + 1,
    })?;
    let bound = theorem_bound(query.r, query.regime)?;
    let within_bound = bound
        .explicit
        .then_some(gap as f64 <= bound.coefficient * query.modulus as f64);
    let tuple_translate = match &query.tuple_hint {
        Some(t) => translate_hit(table, query, window.residue, t)?,
        None => None,
    };
    Ok(GapRecord {
        modulus: query.modulus,
        residue: window.residue,
        x_scale: query.x_scale,
        r: query.r,
        gap_observed: gap,
        regime: query.regime.to_string(),
        bound_shape: bound.shape,
        bound_coefficient: bound.coefficient,
        within_bound,
        witness_primes: ps[starts[0]..=starts[0] + r].to_vec(),
        minimal_windows: starts.len() as u64,
        tuple_hint: query.tuple_hint.as_ref().map(|t| t.to_string()),
        tuple_translate,
    })
}

/// All minimal windows of a scan, earliest first.
pub fn all_minimal_windows(table: &PrimeTable, query: &GapQuery) -> Result<Vec<Vec<u64>>> {
    let window = APWindow::new(query.modulus, query.residue, query.x_scale, query.hi())?;
    let ps: Vec<u64> = window.iter(table).collect();
    let r = query.r as usize;
    let (_, starts) = minimal_windows(&ps, r).ok_or(Error::InsufficientPrimes {
        found: ps.len(),
        needed: r + 1,
    })?;
    Ok(starts.into_iter().map(|i| ps[i..=i + r].to_vec()).collect())
}

fn translate_hit(table: &PrimeTable, q: &GapQuery, a: u64, t: &Tuple) -> Result<Option<u64>> {
    let m = q.modulus;
    let reach = q.hi() + t.diameter() * m;
    if table.limit() < reach {
        return Err(Error::TableTooSmall {
            have: table.limit(),
            need: reach,
        });
    }
    // elements n·M + (M·b_i + a) with the first one in [X, 2X]
    let first_n = q.x_scale.saturating_sub(a).div_ceil(m);
    let last_n = (q.hi() - a.min(q.hi())) / m;
    Ok((first_n..=last_n).find(|&n| {
        let hits = t
            .offsets()
            .iter()
            .filter(|&&b| table.is_prime(n * m + m * b + a))
            .count() as u64;
        hits > q.r
    }))
}
