//! Counting formulas for tribranched standard forms, and a direct count of
//! the placements their derivation describes.
//!
//! The direct count walks the case analysis literally: `Q` vertices go to
//! named trunk vertices or along trunk edges, every gap between consecutive
//! special vertices on an edge holds zero or one even spacer, and the grey
//! trunk vertex takes either parity. An edge carrying `m` of the `Q`s thus
//! has `m + 1` gaps and `2^(m+1)` fillings.

use num_rational::Ratio;
use thiserror::Error;

use crate::enumerate::TrunkType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("the per-type counts assume k >= 3, got k = {0}")]
    SmallK(usize),
    #[error("trunks of type A carry at most one Q vertex")]
    TrunkA,
}

/// `(k³ − 2k² − k + 11) · 2^(k−2)`, exact.
pub fn upper_bound(k: usize) -> Ratio<i128> {
    let k_ = k as i128;
    let poly = Ratio::from_integer(k_ * k_ * k_ - 2 * k_ * k_ - k_ + 11);
    if k >= 2 {
        poly * Ratio::from_integer(1i128 << (k - 2))
    } else {
        poly / Ratio::from_integer(1i128 << (2 - k))
    }
}

/// Closed forms for types B, C and D.
pub fn type_counts(k: usize) -> Result<(u128, u128, u128), FormulaError> {
    if k < 3 {
        return Err(FormulaError::SmallK(k));
    }
    let k_ = k as u128;
    let half = 1u128 << (k - 1);
    let b = 3 * (1u128 << k);
    let c = (3 * k_ * k_ + 13 - 11 * k_) * half;
    let d = (k_ - 2) * (k_ * k_ + 4 - 3 * k_) * half;
    Ok((b, c, d))
}

/// Weak compositions of `total` into `parts` parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Spacer fillings of trunk edges carrying the given numbers of `Q`s.
fn fillings(edges: &[usize]) -> u128 {
    edges.iter().map(|&m| 1u128 << (m + 1)).product()
}

/// Sum of fillings over every way to spread `total` Qs on `parts` edges.
fn spread(total: isize, parts: usize) -> u128 {
    if total < 0 {
        return 0;
    }
    compositions(total as usize, parts).iter().map(|c| fillings(c)).sum()
}

/// Placements of `k` Q vertices on a trunk, before any contractibility
/// filtering, following the cases of the derivation literally.
pub fn raw_placements(k: usize, trunk: TrunkType) -> Result<u128, FormulaError> {
    if trunk == TrunkType::A {
        return Err(FormulaError::TrunkA);
    }
    if k < 3 {
        return Err(FormulaError::SmallK(k));
    }
    let k = k as isize;
    let grey = 2;
    let count = match trunk {
        TrunkType::A => unreachable!(),
        // Q at a; then Q at b with the rest on the edge, or b extremal.
        TrunkType::B => spread(k - 2, 1) + spread(k - 1, 1),
        // Chain a - c - b with the grey vertex c in the middle.
        TrunkType::C => {
            let both = spread(k - 2, 2) + spread(k - 3, 2);
            // b extremal: its edge is empty, one Q at a, the rest on a's edge.
            let b_extremal = spread(k - 1, 1);
            both + b_extremal
        }
        // Arms to a, b, c around the grey centre d.
        TrunkType::D => {
            let all = spread(k - 3, 3) + spread(k - 4, 3);
            // c extremal: its arm is empty and d carries no Q.
            let c_extremal = spread(k - 2, 2);
            all + c_extremal
        }
    };
    Ok(grey * count)
}
