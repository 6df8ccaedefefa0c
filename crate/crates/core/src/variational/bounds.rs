//! Turning `M_k` into prime counts, and prime counts back into `k`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `r_k = ⌈ϑ M_k / 2⌉`, the number of primes guaranteed among the tuple.
pub fn rk_threshold(mk_lower: f64, theta: f64) -> Result<u64> {
    if !(mk_lower > 0.0) || !mk_lower.is_finite() {
        return Err(invalid("mk_lower", format!("must be positive, got {mk_lower}")));
    }
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(invalid("theta", format!("must lie in (0, 1/2], got {theta}")));
    }
    Ok((theta * mk_lower / 2.0).ceil() as u64)
}

/// `log k - 2 log log k - 2`, the asymptotic lower bound for `M_k`.
pub fn analytic_mk_bound(k: f64) -> f64 {
    k.ln() - 2.0 * k.ln().ln() - 2.0
}

/// Result of [`k_for_r`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KForR {
    /// `5r / (3η)`: the value `M_k` has to exceed.
    pub target: f64,
    /// Smallest `k ≥ 16` with `log k - 2 log log k - 2 > target`, when it fits in u64.
    pub k: Option<u64>,
    /// Natural log of that `k` (always available).
    pub ln_k: f64,
    /// `ln(C (r/η)² e^{5r/(3η)})` for the supplied constant `C`, if any.
    pub ln_closed_form: Option<f64>,
}

/// The bound is increasing for `k > e²`, so binary search from 16 upward.
pub fn smallest_k_exceeding(target: f64) -> (Option<u64>, f64) {
    // search over ln k so huge k stay representable
    let f = |lnk: f64| lnk - 2.0 * lnk.ln() - 2.0;
    let mut lo = 16f64.ln();
    if f(lo) > target {
        return (Some(16), lo);
    }
    let mut hi = lo;
    while f(hi) <= target {
        hi *= 2.0;
    }
    if hi < 43.0 {
        // integer search when k fits comfortably in u64
        let mut klo: u64 = 16;
        let mut khi: u64 = hi.exp().ceil() as u64 + 1;
        while klo < khi {
            let mid = klo + (khi - klo) / 2;
            if analytic_mk_bound(mid as f64) > target {
                khi = mid;
            } else {
                klo = mid + 1;
            }
        }
        return (Some(klo), (klo as f64).ln());
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (None, hi)
}

/// Tuple length needed for `r + 1` primes when `M ≪ X^{5/12 - η}`:
/// the level of distribution is `6η/5`, so `M_k` must exceed `5r/(3η)`.
/// `closed_form_constant` is the unspecified absolute constant `C` in
/// `k ≥ C (r/η)² e^{5r/(3η)}`; it is only used when supplied.
pub fn k_for_r(r: u64, eta: f64, closed_form_constant: Option<f64>) -> Result<KForR> {
    if r == 0 {
        return Err(invalid("r", "must be at least 1"));
    }
    if !(eta > 0.0 && eta < 5.0 / 12.0) {
        return Err(invalid("eta", format!("must lie in (0, 5/12), got {eta}")));
    }
    let target = 5.0 * r as f64 / (3.0 * eta);
    let (k, ln_k) = smallest_k_exceeding(target);
    let ln_closed_form = closed_form_constant
        .map(|c| c.ln() + 2.0 * (r as f64 / eta).ln() + target);
    Ok(KForR {
        target,
        k,
        ln_k,
        ln_closed_form,
    })
}

/// Uniformity regime of the modulus `M` relative to `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "kebab-case")]
pub enum Regime {
    /// `M ≪ (log X)^C`
    LogPower,
    /// `M ≪ exp(c √log X)`, at most one excluded modulus
    ExpSqrt,
    /// `M ≪ X^{5/12 - η}`; carries `η` for gap bounds and `ϑ` for BV scans
    Power(f64),
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::LogPower => f.write_str("log-power"),
            Regime::ExpSqrt => f.write_str("exp-sqrt"),
            Regime::Power(e) => write!(f, "power({e})"),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "log-power" => return Ok(Regime::LogPower),
            "exp-sqrt" => return Ok(Regime::ExpSqrt),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("power(").and_then(|r| r.strip_suffix(')')) {
            let e: f64 = inner
                .parse()
                .map_err(|_| invalid("regime", format!("bad exponent in `{s}`")))?;
            if !(e > 0.0 && e < 5.0 / 12.0) {
                return Err(invalid("regime", format!("exponent must lie in (0, 5/12), got {e}")));
            }
            return Ok(Regime::Power(e));
        }
        Err(invalid(
            "regime",
            format!("expected log-power, exp-sqrt or power(<x>), got `{s}`"),
        ))
    }
}

/// Shape of a gap bound `p'_{n+r} - p'_n ≪ (...)·M`. Implied constants are
/// not known, so only the explicit `600` of the two-prime case is numeric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundShape {
    pub r: u64,
    pub regime: Regime,
    /// Human-readable shape, e.g. `r^3 e^{4r} * M`.
    pub shape: String,
    /// The shape's coefficient evaluated at this `r`, without any implied constant.
    pub coefficient: f64,
    /// True when `coefficient` is an explicit bound rather than an order of magnitude.
    pub explicit: bool,
}

pub fn theorem_bound(r: u64, regime: Regime) -> Result<BoundShape> {
    if r == 0 {
        return Err(invalid("r", "must be at least 1"));
    }
    let rf = r as f64;
    let shape = match regime {
        Regime::LogPower | Regime::ExpSqrt if r == 1 => BoundShape {
            r,
            regime,
            shape: "600*M".into(),
            coefficient: 600.0,
            explicit: true,
        },
        Regime::LogPower | Regime::ExpSqrt => BoundShape {
            r,
            regime,
            shape: "r^3 e^{4r} * M".into(),
            coefficient: rf.powi(3) * (4.0 * rf).exp(),
            explicit: false,
        },
        Regime::Power(eta) => {
            if !(eta > 0.0 && eta < 5.0 / 12.0) {
                return Err(invalid("eta", format!("must lie in (0, 5/12), got {eta}")));
            }
            BoundShape {
                r,
                regime,
                shape: "(r/eta)^3 e^{5r/(3 eta)} * M".into(),
                coefficient: (rf / eta).powi(3) * (5.0 * rf / (3.0 * eta)).exp(),
                explicit: false,
            }
        }
    };
    Ok(shape)
}
