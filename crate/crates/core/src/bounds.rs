//! Closed-form quantities: the packing number, the construction lower bound,
//! the counting upper bound, known exact values and bound tables.
//!
//! Everything is exact integer or rational arithmetic.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("rho={rho} is out of range for v={v} (need 1 <= rho and 3*rho <= v)")]
    OutOfDomain { rho: u64, v: u64 },
}

/// Maximum number of blocks in a partial Steiner triple system on `v` points.
pub fn packing_number(v: u64) -> u64 {
    if v < 3 {
        return 0;
    }
    let base = v * ((v - 1) / 2) / 3;
    if v % 6 == 5 {
        base - 1
    } else {
        base
    }
}

/// `floor(v(v-1)/6)`, the pair-counting cap on any design.
pub fn trivial_upper(v: u64) -> u64 {
    v * v.saturating_sub(1) / 6
}

fn check_domain(rho: u64, v: u64) -> Result<(), BoundsError> {
    if rho == 0 || v < 3 * rho {
        Err(BoundsError::OutOfDomain { rho, v })
    } else {
        Ok(())
    }
}

/// Where a bound value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Factor construction with `v - rho` even, plus a maximum packing on the
    /// construction points.
    ConstructionEven,
    /// The same construction with one point removed, `v - rho` odd.
    ConstructionOdd,
    /// Seven blocks of the Fano plane, any `v >= 7` with `rho = 1`.
    FanoEmbedding,
    /// Counting argument over the points covered by a maximum class.
    Counting,
    /// `floor(v(v-1)/6)`.
    Trivial,
    /// A published exact value, see [`KnownExact`].
    Known(KnownExact),
}

/// Provenance of an exact value of `beta(rho, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownExact {
    /// The complete `rho = 1` table.
    SingleBlockClass,
    /// `beta(2, 7) = 5`.
    SevenPoints,
    /// A Steiner triple system with a (near-)parallel class.
    SteinerWithParallelClass,
    /// Steiner triple systems on 15, 21 and 27 points whose maximum classes
    /// are 4, 6 and 8; no local witness.
    CitedSteiner,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Source::ConstructionEven => "construction-even",
            Source::ConstructionOdd => "construction-odd",
            Source::FanoEmbedding => "fano-embedding",
            Source::Counting => "counting",
            Source::Trivial => "trivial",
            Source::Known(KnownExact::SingleBlockClass) => "known-rho1",
            Source::Known(KnownExact::SevenPoints) => "known-psts7",
            Source::Known(KnownExact::SteinerWithParallelClass) => "known-sts",
            Source::Known(KnownExact::CitedSteiner) => "known-cited",
        };
        f.write_str(s)
    }
}

/// Lower bound from the factor constructions, with its source.
///
/// For `rho = 1` and `v >= 7` the Fano plane (seven pairwise intersecting
/// blocks) beats the generic value up to `v = 14` and is used when larger.
pub fn beta_lower_with_source(rho: u64, v: u64) -> Result<(u64, Source), BoundsError> {
    check_domain(rho, v)?;
    let d = packing_number(rho);
    let generic = if (v - rho).is_multiple_of(2) && (v, rho) != (6, 2) {
        (rho * (v - rho) / 2 + d, Source::ConstructionEven)
    } else {
        // v - rho odd (so v > 3 rho), or the excluded (6, 2) case
        (rho * (v - rho - 1) / 2 + d, Source::ConstructionOdd)
    };
    if rho == 1 && v >= 7 && generic.0 < 7 {
        return Ok((7, Source::FanoEmbedding));
    }
    Ok(generic)
}

pub fn beta_lower(rho: u64, v: u64) -> Result<u64, BoundsError> {
    beta_lower_with_source(rho, v).map(|(b, _)| b)
}

/// The counting bound `C(3 rho, 2) - 2 rho + rho * max(6, floor((v - 3 rho) / 2))`
/// before capping.
pub fn counting_upper(rho: u64, v: u64) -> Result<u64, BoundsError> {
    check_domain(rho, v)?;
    let pairs = 3 * rho * (3 * rho - 1) / 2;
    let per_block = 6.max((v - 3 * rho) / 2);
    Ok(pairs - 2 * rho + rho * per_block)
}

/// The smaller of the counting bound and the trivial cap, with its source.
pub fn beta_upper_with_source(rho: u64, v: u64) -> Result<(u64, Source), BoundsError> {
    let counting = counting_upper(rho, v)?;
    let trivial = trivial_upper(v);
    Ok(if counting <= trivial {
        (counting, Source::Counting)
    } else {
        (trivial, Source::Trivial)
    })
}

pub fn beta_upper(rho: u64, v: u64) -> Result<u64, BoundsError> {
    beta_upper_with_source(rho, v).map(|(b, _)| b)
}

/// Published exact values of `beta(rho, v)`.
pub fn beta_exact_known(rho: u64, v: u64) -> Option<(u64, KnownExact)> {
    if rho == 0 || v < 3 * rho {
        return None;
    }
    if rho == 1 {
        let b = match v {
            3 | 4 => 1,
            5 => 2,
            6 => 4,
            7..=14 => 7,
            _ => (v - 1) / 2,
        };
        return Some((b, KnownExact::SingleBlockClass));
    }
    match (rho, v) {
        (2, 7) => return Some((5, KnownExact::SevenPoints)),
        (4, 15) => return Some((35, KnownExact::CitedSteiner)),
        (6, 21) => return Some((70, KnownExact::CitedSteiner)),
        (8, 27) => return Some((117, KnownExact::CitedSteiner)),
        _ => {}
    }
    if rho == v / 3 && matches!(v % 6, 1 | 3) && v != 7 {
        return Some((v * (v - 1) / 6, KnownExact::SteinerWithParallelClass));
    }
    None
}

/// `(10 rho^2 - 8 rho + 1) / 3`, the bound on the distance between the two
/// bounds for fixed `rho` once `v >= 3 rho + 12`.
pub fn gap_bound(rho: u64) -> Ratio<i64> {
    let r = rho as i64;
    Ratio::new(10 * r * r - 8 * r + 1, 3)
}

/// `f(rho) = rho (6 rho + v - 7) / 2` and whether it beats the trivial bound,
/// which happens exactly when `rho < (v + 3) / 6`.
pub fn f_threshold(rho: u64, v: u64) -> (Ratio<i64>, bool) {
    let (r, v) = (rho as i64, v as i64);
    let f = Ratio::new(r * (6 * r + v - 7), 2);
    (f, 6 * r < v + 3)
}

/// One row of a bound table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRecord {
    pub rho: u64,
    pub v: u64,
    pub d_rho: u64,
    pub lower: u64,
    pub lower_source: Source,
    pub upper: u64,
    pub upper_source: Source,
    pub exact: Option<u64>,
}

/// Bounds for each `rho` in `rhos` at fixed `v`. With `with_known`, a
/// published exact value replaces both bounds.
pub fn bound_table(
    v: u64,
    rhos: impl IntoIterator<Item = u64>,
    with_known: bool,
) -> Result<Vec<BoundRecord>, BoundsError> {
    rhos.into_iter()
        .map(|rho| {
            let (mut lower, mut lower_source) = beta_lower_with_source(rho, v)?;
            let (mut upper, mut upper_source) = beta_upper_with_source(rho, v)?;
            let mut exact = None;
            if with_known {
                if let Some((b, src)) = beta_exact_known(rho, v) {
                    exact = Some(b);
                    if b != lower {
                        (lower, lower_source) = (b, Source::Known(src));
                    }
                    if b != upper {
                        (upper, upper_source) = (b, Source::Known(src));
                    }
                }
            }
            debug_assert!(lower <= upper);
            Ok(BoundRecord {
                rho,
                v,
                d_rho: packing_number(rho),
                lower,
                lower_source,
                upper,
                upper_source,
                exact,
            })
        })
        .collect()
}

/// Aligned text table.
pub fn format_table_text(records: &[BoundRecord]) -> String {
    let mut out = String::new();
    if let Some(first) = records.first() {
        out.push_str(&format!("bounds on beta(rho, {})\n", first.v));
    }
    out.push_str(&format!(
        "{:>4} {:>7} {:>6} {:>6} {:>6}\n",
        "rho", "D(rho)", "lower", "upper", "exact"
    ));
    for r in records {
        let exact = r.exact.map_or_else(|| "-".to_string(), |e| e.to_string());
        out.push_str(&format!(
            "{:>4} {:>7} {:>6} {:>6} {:>6}\n",
            r.rho, r.d_rho, r.lower, r.upper, exact
        ));
    }
    out
}

/// Machine-readable rows `rho,D,lower,upper,exact,sources`.
pub fn format_table_rows(records: &[BoundRecord]) -> String {
    let mut out = String::from("rho,D,lower,upper,exact,sources\n");
    for r in records {
        let exact = r.exact.map_or_else(String::new, |e| e.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},lower={};upper={}\n",
            r.rho, r.d_rho, r.lower, r.upper, exact, r.lower_source, r.upper_source
        ));
    }
    out
}
