//! Desk-scale numerical studies: Bombieri–Vinogradov discrepancies and
//! small gaps between primes in a progression.
//!
//! ```
//! use apgaps::experiments::{gap_scan, GapQuery};
//!
//! let rec = gap_scan(&GapQuery::new(3, 1, 100, 1)).unwrap();
//! assert_eq!(rec.gap_observed, 6);
//! assert_eq!(rec.within_bound, Some(true));
//! ```

mod bv;
mod gaps;
mod persist;

pub use bv::{bv_discrepancy, bv_discrepancy_in, BVReport, BVRow, BVScanConfig, DESK_CAP};
pub use gaps::{all_minimal_windows, gap_scan, gap_scan_in, minimal_windows, GapQuery, GapRecord};
pub use persist::{load, persist, to_csv};
