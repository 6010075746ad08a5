//! Pareto-set reduction from "quanta of information" about the decision
//! maker's preferences.
//!
//! A quantum says that criterion `i` is more important than `j` with a
//! coefficient of relative importance `θ ∈ (0, 1)`: the decision maker
//! accepts losing `θ` units of `j` to gain `1 - θ` units of `i`. Taking it
//! into account replaces the less important criterion by
//! `θ·D_i + (1 - θ)·D_j`; Pareto filtering in the recombined space keeps a
//! subset of the original front. Two opposing quanta recombine both
//! criteria and are consistent only when `θ12 + θ21 < 1`.
//!
//! Every computation is exact. Coefficients are rationals and the
//! recombined criteria are compared as scaled integers, so boundary cases
//! such as `θ = k/(k+1)` on a line-shaped front are never blurred by
//! rounding.

use std::fmt;
use std::io::Write;

use num_rational::{Ratio, Rational64};
use num_traits::{One, Zero};

use crate::dominance::{nondominated_indices, Front};
use crate::error::{Error, Result};
use crate::instance::{Criterion, ObjectiveVector};

/// Exact point in the recombined criterion space.
pub type RationalVector = (Ratio<i128>, Ratio<i128>);

fn widen(r: Rational64) -> Ratio<i128> {
    Ratio::new(*r.numer() as i128, *r.denom() as i128)
}

fn check_open_unit(theta: Rational64, what: &str) -> Result<()> {
    if theta <= Rational64::zero() || theta >= Rational64::one() {
        return Err(Error::InvalidArgument(format!(
            "{what} = {} must lie strictly between 0 and 1",
            format_theta(theta)
        )));
    }
    Ok(())
}

/// "Criterion `more_important` matters more than the other one, with
/// coefficient `theta`."
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Quantum {
    more_important: Criterion,
    theta: Rational64,
}

impl Quantum {
    pub fn new(more_important: Criterion, theta: Rational64) -> Result<Self> {
        check_open_unit(theta, "theta")?;
        Ok(Self {
            more_important,
            theta,
        })
    }

    /// From the raw trade-off: lose `w_less` of the less important criterion
    /// to gain `w_more` of the more important one; `θ = w_less / (w_more + w_less)`.
    pub fn from_weights(more_important: Criterion, w_more: i64, w_less: i64) -> Result<Self> {
        if w_more <= 0 || w_less <= 0 {
            return Err(Error::InvalidArgument(format!(
                "quantum weights must be positive, got {w_more} and {w_less}"
            )));
        }
        Self::new(more_important, Rational64::new(w_less, w_more + w_less))
    }

    pub fn more_important(&self) -> Criterion {
        self.more_important
    }

    pub fn less_important(&self) -> Criterion {
        self.more_important.other()
    }

    pub fn theta(&self) -> Rational64 {
        self.theta
    }
}

/// Two opposing quanta: 1st over 2nd with `theta12`, 2nd over 1st with `theta21`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuantumPair {
    theta12: Rational64,
    theta21: Rational64,
}

impl QuantumPair {
    pub fn new(theta12: Rational64, theta21: Rational64) -> Result<Self> {
        check_open_unit(theta12, "theta12")?;
        check_open_unit(theta21, "theta21")?;
        let sum = theta12 + theta21;
        if sum >= Rational64::one() {
            return Err(Error::InconsistentQuanta {
                sum: format_theta(sum),
            });
        }
        Ok(Self { theta12, theta21 })
    }

    pub fn theta12(&self) -> Rational64 {
        self.theta12
    }

    pub fn theta21(&self) -> Rational64 {
        self.theta21
    }
}

/// The recombined vector for a single quantum. Only the less important
/// component changes.
pub fn transform_single(v: &ObjectiveVector, q: &Quantum) -> RationalVector {
    let t = widen(q.theta);
    let one = Ratio::one();
    let (y1, y2) = (Ratio::from(v.d1 as i128), Ratio::from(v.d2 as i128));
    match q.more_important {
        Criterion::First => (y1, t * y1 + (one - t) * y2),
        Criterion::Second => (t * y2 + (one - t) * y1, y2),
    }
}

/// The recombined vector for two opposing quanta.
pub fn transform_double(v: &ObjectiveVector, qp: &QuantumPair) -> RationalVector {
    let (t12, t21) = (widen(qp.theta12), widen(qp.theta21));
    let one = Ratio::one();
    let (y1, y2) = (Ratio::from(v.d1 as i128), Ratio::from(v.d2 as i128));
    (
        (one - t21) * y1 + t21 * y2,
        t12 * y1 + (one - t12) * y2,
    )
}

/// `θ·a + (1-θ)·b` multiplied by the denominator of `θ`.
fn scaled_mix(theta: Rational64, a: i64, b: i64) -> i128 {
    let (p, q) = (*theta.numer() as i128, *theta.denom() as i128);
    p * a as i128 + (q - p) * b as i128
}

fn survivors(front: &Front, keys: Vec<(i128, i128)>) -> Front {
    front.select(&nondominated_indices(&keys))
}

/// Entries of `front` that stay non-dominated after applying `q`.
pub fn reduce_single(front: &Front, q: &Quantum) -> Front {
    let keys = front
        .entries()
        .iter()
        .map(|e| {
            let (y1, y2) = (e.vector.d1, e.vector.d2);
            match q.more_important {
                Criterion::First => (y1 as i128, scaled_mix(q.theta, y1, y2)),
                Criterion::Second => (scaled_mix(q.theta, y2, y1), y2 as i128),
            }
        })
        .collect();
    survivors(front, keys)
}

/// Entries of `front` that stay non-dominated after applying both quanta.
pub fn reduce_double(front: &Front, qp: &QuantumPair) -> Front {
    let keys = front
        .entries()
        .iter()
        .map(|e| {
            let (y1, y2) = (e.vector.d1, e.vector.d2);
            (
                scaled_mix(qp.theta21, y2, y1),
                scaled_mix(qp.theta12, y1, y2),
            )
        })
        .collect();
    survivors(front, keys)
}

/// Preference information for a reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preference {
    Single(Quantum),
    Pair(QuantumPair),
}

impl Preference {
    pub fn reduce(&self, front: &Front) -> Front {
        match self {
            Preference::Single(q) => reduce_single(front, q),
            Preference::Pair(qp) => reduce_double(front, qp),
        }
    }
}

/// Front lying on `p` parallel lines `y2 = a_i - k·y1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineModel {
    a: Rational64,
    k: Rational64,
    p: usize,
}

impl LineModel {
    pub fn new(a: Rational64, k: Rational64, p: usize) -> Result<Self> {
        if a <= Rational64::zero() || k <= Rational64::zero() || p == 0 {
            return Err(Error::InvalidArgument(format!(
                "line model needs a > 0, k > 0, p >= 1 (got a = {a}, k = {k}, p = {p})"
            )));
        }
        Ok(Self { a, k, p })
    }

    pub fn intercept(&self) -> Rational64 {
        self.a
    }

    pub fn slope(&self) -> Rational64 {
        self.k
    }

    pub fn lines(&self) -> usize {
        self.p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinePrediction {
    /// Exactly one element survives.
    Singleton,
    /// Nothing is excluded.
    Unchanged,
    /// At most this many elements survive (one per line).
    AtMost(usize),
    /// No threshold is met on a multi-line front; the theory says nothing.
    Undetermined,
}

/// Outcome predicted by the line-front threshold theory: a quantum 1st over
/// 2nd collapses a line of slope `-k` iff `θ12 >= k/(k+1)`, a quantum 2nd
/// over 1st iff `θ21 >= 1/(k+1)`, and a pair iff either holds.
pub fn predict_line_reduction(line: &LineModel, pref: &Preference) -> LinePrediction {
    let k = line.k;
    let one = Rational64::one();
    let first_over_second = |t: Rational64| t * (k + one) >= k;
    let second_over_first = |t: Rational64| t * (k + one) >= one;
    let collapses = match pref {
        Preference::Single(q) => match q.more_important {
            Criterion::First => first_over_second(q.theta),
            Criterion::Second => second_over_first(q.theta),
        },
        Preference::Pair(qp) => first_over_second(qp.theta12) || second_over_first(qp.theta21),
    };
    match (line.p, collapses) {
        (1, true) => LinePrediction::Singleton,
        (1, false) => LinePrediction::Unchanged,
        (p, true) => LinePrediction::AtMost(p),
        (_, false) => LinePrediction::Undetermined,
    }
}

/// Whether two entries `C'`, `C''` of `front` satisfy
/// `(D_i(C') - D_i(C'')) / (D_j(C'') - D_j(C')) >= (1 - θ)/θ` with
/// `D_j(C'') > D_j(C')`, for `i` the more important criterion. When this
/// holds the reduction removes at least one element.
pub fn guaranteed_exclusion(front: &Front, q: &Quantum) -> bool {
    let i = q.more_important;
    let j = i.other();
    let (p, d) = (*q.theta.numer() as i128, *q.theta.denom() as i128);
    let entries = front.entries();
    entries.iter().any(|c1| {
        entries.iter().any(|c2| {
            let gain_j = c2.vector.get(j) as i128 - c1.vector.get(j) as i128;
            let loss_i = c1.vector.get(i) as i128 - c2.vector.get(i) as i128;
            // loss_i / gain_j >= (d - p) / p, with gain_j > 0 and p > 0
            gain_j > 0 && p * loss_i >= (d - p) * gain_j
        })
    })
}

/// Share (in percent) of `before` removed in `after`.
pub fn exclusion_percentage(before: &Front, after: &Front) -> Result<f64> {
    if before.is_empty() {
        return Err(Error::InvalidArgument(
            "exclusion percentage of an empty front".into(),
        ));
    }
    if !after.is_subset_of(before) {
        return Err(Error::NotSubset);
    }
    Ok(100.0 * (before.len() - after.len()) as f64 / before.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SweepCase {
    /// 1st criterion more important.
    FirstOverSecond,
    /// 2nd criterion more important.
    SecondOverFirst,
    /// Both quanta at once.
    Pair,
}

impl fmt::Display for SweepCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepCase::FirstOverSecond => "12",
            SweepCase::SecondOverFirst => "21",
            SweepCase::Pair => "pair",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub case: SweepCase,
    pub theta12: Option<Rational64>,
    pub theta21: Option<Rational64>,
    pub n_before: usize,
    pub n_after: usize,
    pub excluded_pct: f64,
}

/// `0.1, 0.2, ..., 0.9`.
pub fn default_grid() -> Vec<Rational64> {
    (1..=9).map(|k| Rational64::new(k, 10)).collect()
}

/// Exclusion percentages for every single quantum on `grid` (both
/// directions) and every consistent pair `θ12 + θ21 < 1`. Inconsistent pair
/// cells are omitted.
pub fn theta_sweep(front: &Front, grid: &[Rational64]) -> Result<Vec<SweepRow>> {
    for &t in grid {
        check_open_unit(t, "grid value")?;
    }
    let mut rows = Vec::new();
    let mut push = |case, theta12, theta21, after: Front| -> Result<()> {
        rows.push(SweepRow {
            case,
            theta12,
            theta21,
            n_before: front.len(),
            n_after: after.len(),
            excluded_pct: exclusion_percentage(front, &after)?,
        });
        Ok(())
    };
    for &t in grid {
        let q = Quantum::new(Criterion::First, t)?;
        push(SweepCase::FirstOverSecond, Some(t), None, reduce_single(front, &q))?;
    }
    for &t in grid {
        let q = Quantum::new(Criterion::Second, t)?;
        push(SweepCase::SecondOverFirst, None, Some(t), reduce_single(front, &q))?;
    }
    for &t12 in grid {
        for &t21 in grid {
            if t12 + t21 >= Rational64::one() {
                continue;
            }
            let qp = QuantumPair::new(t12, t21)?;
            push(SweepCase::Pair, Some(t12), Some(t21), reduce_double(front, &qp))?;
        }
    }
    Ok(rows)
}

/// Writes sweep rows as `case,theta12,theta21,n_before,n_after,excluded_pct`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["case", "theta12", "theta21", "n_before", "n_after", "excluded_pct"])?;
    for r in rows {
        let t = |x: Option<Rational64>| x.map(format_theta).unwrap_or_default();
        w.write_record([
            r.case.to_string(),
            t(r.theta12),
            t(r.theta21),
            r.n_before.to_string(),
            r.n_after.to_string(),
            format!("{:.4}", r.excluded_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `0.3`, `.25`, `1/3` or `1` into an exact rational.
pub fn parse_theta(text: &str) -> Result<Rational64> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse coefficient {text:?}"));
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let scale = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    Ok(Rational64::new(int * scale + frac, scale))
}

/// Decimal form when the denominator is a divisor of a small power of ten,
/// `p/q` otherwise.
pub fn format_theta(r: Rational64) -> String {
    let (p, q) = (*r.numer(), *r.denom());
    for digits in 0..=6u32 {
        let scale = 10i64.pow(digits);
        if scale % q == 0 {
            let v = p * (scale / q);
            if digits == 0 {
                return v.to_string();
            }
            let sign = if v < 0 { "-" } else { "" };
            let v = v.abs();
            return format!(
                "{sign}{}.{:0width$}",
                v / scale,
                v % scale,
                width = digits as usize
            );
        }
    }
    format!("{p}/{q}")
}
