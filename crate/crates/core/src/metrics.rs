//! Approximation quality indicators and the paired comparison test.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::dominance::Front;
use crate::error::{Error, Result};
use crate::instance::ObjectiveVector;

fn distance(a: &ObjectiveVector, b: &ObjectiveVector) -> f64 {
    let dx = (a.d1 - b.d1) as f64;
    let dy = (a.d2 - b.d2) as f64;
    (dx * dx + dy * dy).sqrt()
}

/// `(1/|from|) * sqrt(sum of squared nearest distances from `from` to `to`)`.
fn mean_root_distance(from: &[ObjectiveVector], to: &[ObjectiveVector]) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::InvalidArgument(
            "distance indicators need two non-empty sets".into(),
        ));
    }
    let sum: f64 = from
        .iter()
        .map(|a| {
            let mu = to.iter().map(|b| distance(a, b)).fold(f64::INFINITY, f64::min);
            mu * mu
        })
        .sum();
    Ok(sum.sqrt() / from.len() as f64)
}

/// Generational distance of the point set `approx` to `reference`, using
/// raw (unnormalised) Euclidean distances.
pub fn gd(approx: &[ObjectiveVector], reference: &[ObjectiveVector]) -> Result<f64> {
    mean_root_distance(approx, reference)
}

/// Inverted generational distance: the same measure from the reference side.
pub fn igd(approx: &[ObjectiveVector], reference: &[ObjectiveVector]) -> Result<f64> {
    mean_root_distance(reference, approx)
}

/// `(gd, igd)` of two fronts.
pub fn front_distances(approx: &Front, reference: &Front) -> Result<(f64, f64)> {
    let (a, r) = (approx.vectors(), reference.vectors());
    Ok((gd(&a, &r)?, igd(&a, &r)?))
}

/// Fewest non-zero differences for which the test is attempted.
pub const WILCOXON_MIN_PAIRS: usize = 6;
/// Below this many non-zero differences the exact null distribution is used.
pub const WILCOXON_EXACT_BELOW: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct WilcoxonOutcome {
    /// Number of pairs with a non-zero difference.
    pub n_used: usize,
    /// Rank sum of the positive differences.
    pub w_plus: f64,
    /// Rank sum of the negative differences.
    pub w_minus: f64,
    /// `min(w_plus, w_minus)`.
    pub statistic: f64,
    /// Two-sided p-value; `None` when too few pairs remain.
    pub p_value: Option<f64>,
    pub significant: bool,
}

impl WilcoxonOutcome {
    pub fn is_inconclusive(&self) -> bool {
        self.p_value.is_none()
    }
}

/// Mid-ranks (1-based) of `values`, together with the sizes of tie groups.
fn mid_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// `P(T <= t)` for the signed-rank sum `T` under the null, by counting sign
/// assignments. Ranks are doubled so mid-ranks become integers.
fn exact_lower_tail(ranks: &[f64], t: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0f64; total + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let limit = (t * 2.0).round() as usize;
    let hits: f64 = counts[..=limit.min(total)].iter().sum();
    hits / 2f64.powi(ranks.len() as i32)
}

/// Two-sided paired Wilcoxon signed-rank test.
///
/// Zero differences are dropped, absolute differences are ranked with
/// mid-ranks, and the smaller signed-rank sum is referred to its exact null
/// distribution (fewer than 20 pairs) or to the tie-corrected normal
/// approximation.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alpha: f64) -> Result<WilcoxonOutcome> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1)")));
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = mid_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();
    let statistic = w_plus.min(w_minus);

    let p_value = if n < WILCOXON_MIN_PAIRS {
        None
    } else if n < WILCOXON_EXACT_BELOW {
        Some((2.0 * exact_lower_tail(&ranks, statistic)).min(1.0))
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = ties
            .iter()
            .map(|&t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum::<f64>()
            / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
        let z = (statistic - mean) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        Some((2.0 * normal.cdf(z)).min(1.0))
    };
    Ok(WilcoxonOutcome {
        n_used: n,
        w_plus,
        w_minus,
        statistic,
        significant: p_value.is_some_and(|p| p < alpha),
        p_value,
    })
}
