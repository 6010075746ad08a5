//! Bicriteria ATSP instances, tours and their evaluation.
//!
//! An instance is a complete directed graph on `n` vertices where every arc
//! carries two positive integer weights. Tours are stored in successor form,
//! so a tour *is* its arc set: two tours are equal exactly when they use the
//! same arcs, regardless of which vertex one starts reading from.
//!
//! All randomness in this crate comes from [`ChaCha8Rng`] seeded through
//! [`rng_from_seed`], so generated instances are reproducible bit for bit.

use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seedable generator used everywhere: ChaCha with 8 rounds.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One of the two optimisation criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    First,
    Second,
}

impl Criterion {
    pub const BOTH: [Criterion; 2] = [Criterion::First, Criterion::Second];

    pub fn other(self) -> Criterion {
        match self {
            Criterion::First => Criterion::Second,
            Criterion::Second => Criterion::First,
        }
    }
}

/// Total tour weights `(D1, D2)`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct ObjectiveVector {
    pub d1: i64,
    pub d2: i64,
}

impl ObjectiveVector {
    pub fn new(d1: i64, d2: i64) -> Self {
        Self { d1, d2 }
    }

    pub fn get(&self, c: Criterion) -> i64 {
        match c {
            Criterion::First => self.d1,
            Criterion::Second => self.d2,
        }
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// Square arc-weight matrix. Off-diagonal entries are `>= 1`; the diagonal
/// holds a sentinel larger than the weight of any Hamiltonian circuit so that
/// assignment solvers never pick a self-loop. Evaluation never reads it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMatrix {
    n: usize,
    data: Vec<i64>,
}

impl WeightMatrix {
    /// Builds a matrix from rows; the diagonal of `rows` is ignored.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (u, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {u} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (v, &w) in row.iter().enumerate() {
                if u != v && w < 1 {
                    return Err(Error::InvalidArgument(format!(
                        "weight ({u}, {v}) = {w} is not positive"
                    )));
                }
                data.push(if u == v { 0 } else { w });
            }
        }
        Self::with_sentinel(n, data)
    }

    fn with_sentinel(n: usize, mut data: Vec<i64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "an instance needs at least 3 vertices, got {n}"
            )));
        }
        let max = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .map(|(u, v)| data[u * n + v])
            .max()
            .unwrap_or(1);
        let sentinel = max
            .checked_mul(n as i64)
            .and_then(|s| s.checked_add(1))
            .ok_or_else(|| Error::InvalidArgument("weights too large".into()))?;
        for v in 0..n {
            data[v * n + v] = sentinel;
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> i64 {
        self.data[u * self.n + v]
    }

    /// The diagonal value.
    pub fn sentinel(&self) -> i64 {
        self.data[0]
    }

    pub fn max_off_diagonal(&self) -> i64 {
        self.off_diagonal().max().unwrap_or(0)
    }

    fn off_diagonal(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n).flat_map(move |u| {
            (0..self.n)
                .filter(move |&v| v != u)
                .map(move |v| self.get(u, v))
        })
    }

    pub fn min_outgoing(&self, u: usize) -> i64 {
        (0..self.n)
            .filter(|&v| v != u)
            .map(|v| self.get(u, v))
            .min()
            .unwrap_or(0)
    }

    pub fn max_outgoing(&self, u: usize) -> i64 {
        (0..self.n)
            .filter(|&v| v != u)
            .map(|v| self.get(u, v))
            .max()
            .unwrap_or(0)
    }

    /// Rows with a zero diagonal, the form used in serialized instances.
    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|u| {
                (0..self.n)
                    .map(|v| if u == v { 0 } else { self.get(u, v) })
                    .collect()
            })
            .collect()
    }

    /// Multiplies every off-diagonal weight by `factor`.
    pub fn scaled(&self, factor: i64) -> Result<Self> {
        let rows: Vec<Vec<i64>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|w| w * factor).collect())
            .collect();
        Self::from_rows(&rows)
    }
}

/// A Hamiltonian circuit in successor form: `succ[v]` follows `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tour {
    succ: Vec<usize>,
}

impl Tour {
    pub fn from_successors(succ: Vec<usize>) -> Result<Self> {
        check_successors(&succ)?;
        Ok(Self { succ })
    }

    pub(crate) fn from_successors_unchecked(succ: Vec<usize>) -> Self {
        debug_assert!(check_successors(&succ).is_ok(), "invalid tour {succ:?}");
        Self { succ }
    }

    /// Builds a tour visiting `order` cyclically.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut succ = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || succ[v] != usize::MAX {
                return Err(Error::InvalidTour(format!(
                    "{order:?} is not a permutation of 0..{n}"
                )));
            }
            succ[v] = order[(i + 1) % n];
        }
        Self::from_successors(succ)
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn succ(&self) -> &[usize] {
        &self.succ
    }

    #[inline]
    pub fn next(&self, v: usize) -> usize {
        self.succ[v]
    }

    pub fn predecessors(&self) -> Vec<usize> {
        let mut pred = vec![0; self.succ.len()];
        for (u, &v) in self.succ.iter().enumerate() {
            pred[v] = u;
        }
        pred
    }

    /// Visiting order starting at vertex 0.
    pub fn order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.succ.len());
        let mut v = 0;
        for _ in 0..self.succ.len() {
            out.push(v);
            v = self.succ[v];
        }
        out
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().copied().enumerate()
    }

    pub fn contains_arc(&self, u: usize, v: usize) -> bool {
        self.succ.get(u) == Some(&v)
    }

    /// A random circuit starting at vertex 0.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order[1..].shuffle(rng);
        Self::from_order(&order).expect("shuffled permutation")
    }

    /// `0-5-3-...` form used in front files.
    pub fn to_path_string(&self) -> String {
        self.order()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }

    pub fn parse_path(text: &str) -> Result<Self> {
        let order = text
            .split('-')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidTour(format!("bad vertex {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_order(&order)
    }
}

fn check_successors(succ: &[usize]) -> Result<()> {
    let n = succ.len();
    if n == 0 {
        return Err(Error::InvalidTour("empty tour".into()));
    }
    let mut seen = vec![false; n];
    let mut v = 0;
    for _ in 0..n {
        if seen[v] {
            return Err(Error::InvalidTour(format!(
                "sub-tour detected in successor array {succ:?}"
            )));
        }
        seen[v] = true;
        v = *succ.get(v).filter(|&&s| s < n).ok_or_else(|| {
            Error::InvalidTour(format!("successor out of range in {succ:?}"))
        })?;
    }
    if v != 0 {
        return Err(Error::InvalidTour(format!(
            "successor array {succ:?} does not close at vertex 0"
        )));
    }
    Ok(())
}

/// A bi-ATSP instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct Instance {
    name: String,
    w1: WeightMatrix,
    w2: WeightMatrix,
}

impl Instance {
    pub fn new(name: impl Into<String>, w1: WeightMatrix, w2: WeightMatrix) -> Result<Self> {
        if w1.n() != w2.n() {
            return Err(Error::InvalidArgument(format!(
                "criterion matrices disagree on size: {} vs {}",
                w1.n(),
                w2.n()
            )));
        }
        Ok(Self {
            name: name.into(),
            w1,
            w2,
        })
    }

    pub fn from_rows(name: impl Into<String>, w1: &[Vec<i64>], w2: &[Vec<i64>]) -> Result<Self> {
        Self::new(name, WeightMatrix::from_rows(w1)?, WeightMatrix::from_rows(w2)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.w1.n()
    }

    pub fn matrix(&self, c: Criterion) -> &WeightMatrix {
        match c {
            Criterion::First => &self.w1,
            Criterion::Second => &self.w2,
        }
    }

    #[inline]
    pub fn weight(&self, c: Criterion, u: usize, v: usize) -> i64 {
        self.matrix(c).get(u, v)
    }

    #[inline]
    pub fn arc(&self, u: usize, v: usize) -> ObjectiveVector {
        ObjectiveVector::new(self.w1.get(u, v), self.w2.get(u, v))
    }

    pub fn evaluate(&self, tour: &Tour) -> Result<ObjectiveVector> {
        if tour.len() != self.n() {
            return Err(Error::InvalidTour(format!(
                "tour has {} vertices, instance has {}",
                tour.len(),
                self.n()
            )));
        }
        Ok(self.cost(tour))
    }

    /// Evaluation for tours already known to match the instance.
    #[inline]
    pub(crate) fn cost(&self, tour: &Tour) -> ObjectiveVector {
        let (mut d1, mut d2) = (0, 0);
        for (u, v) in tour.arcs() {
            d1 += self.w1.get(u, v);
            d2 += self.w2.get(u, v);
        }
        ObjectiveVector::new(d1, d2)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    name: String,
    n: usize,
    w1: Vec<Vec<i64>>,
    w2: Vec<Vec<i64>>,
}

impl From<Instance> for InstanceDoc {
    fn from(inst: Instance) -> Self {
        InstanceDoc {
            n: inst.n(),
            w1: inst.w1.to_rows(),
            w2: inst.w2.to_rows(),
            name: inst.name,
        }
    }
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        if doc.w1.len() != doc.n || doc.w2.len() != doc.n {
            return Err(Error::InvalidArgument(format!(
                "declared n = {} does not match matrix sizes",
                doc.n
            )));
        }
        Instance::from_rows(doc.name, &doc.w1, &doc.w2)
    }
}

fn check_range(name: &str, r: &RangeInclusive<i64>) -> Result<()> {
    if *r.start() < 1 || r.start() > r.end() {
        return Err(Error::InvalidArgument(format!(
            "{name} range [{}, {}] must satisfy 1 <= lo <= hi",
            r.start(),
            r.end()
        )));
    }
    Ok(())
}

fn random_matrix<R: Rng>(n: usize, range: &RangeInclusive<i64>, rng: &mut R) -> Result<WeightMatrix> {
    let mut data = vec![0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                data[u * n + v] = rng.gen_range(range.clone());
            }
        }
    }
    WeightMatrix::with_sentinel(n, data)
}

/// Instance with weights drawn uniformly from the two integer ranges.
/// All first-criterion weights are drawn before the second criterion.
pub fn generate_random(
    n: usize,
    range1: RangeInclusive<i64>,
    range2: RangeInclusive<i64>,
    seed: u64,
) -> Result<Instance> {
    check_range("first criterion", &range1)?;
    check_range("second criterion", &range2)?;
    let mut rng = rng_from_seed(seed);
    let w1 = random_matrix(n, &range1, &mut rng)?;
    let w2 = random_matrix(n, &range2, &mut rng)?;
    let name = format!(
        "S{n}[{},{}][{},{}]",
        range1.start(),
        range1.end(),
        range2.start(),
        range2.end()
    );
    Instance::new(name, w1, w2)
}

/// Instance whose criteria contradict each other: `w1 ∈ {1, 2}` and
/// `w2 = 3 - w1`, so every tour satisfies `D1 + D2 = 3n`.
pub fn generate_contradicting(n: usize, seed: u64) -> Result<Instance> {
    let mut rng = rng_from_seed(seed);
    let w1 = random_matrix(n, &(1..=2), &mut rng)?;
    let mut data = vec![0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                data[u * n + v] = 3 - w1.get(u, v);
            }
        }
    }
    let w2 = WeightMatrix::with_sentinel(n, data)?;
    Instance::new(format!("S{n}contr[1,2][1,2]"), w1, w2)
}

/// Keeps `base` as the first criterion and draws the second uniformly from
/// `[1, max off-diagonal weight of base]`.
pub fn generate_ftv_derived(base: &TsplibMatrix, seed: u64) -> Result<Instance> {
    let hi = base.matrix.max_off_diagonal();
    let mut rng = rng_from_seed(seed);
    let w2 = random_matrix(base.matrix.n(), &(1..=hi), &mut rng)?;
    Instance::new(format!("{}Rand", base.name), base.matrix.clone(), w2)
}

/// A single-criterion ATSP matrix read from a TSPLIB file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsplibMatrix {
    pub name: String,
    pub matrix: WeightMatrix,
}

/// Parses an `EXPLICIT` / `FULL_MATRIX` ATSP file.
pub fn parse_tsplib(text: &str) -> Result<TsplibMatrix> {
    let err = |line: usize, message: String| Error::Parse { line, message };

    let mut name = None;
    let mut dimension = None;
    let mut kind = None;
    let mut weight_type = None;
    let mut weight_format = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut section_line = None;

    for (no, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if line.starts_with("EDGE_WEIGHT_SECTION") {
            section_line = Some(no);
            break;
        }
        if line == "EOF" {
            break;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(err(no, format!("expected `KEY: VALUE`, found {line:?}")));
        };
        let value = value.trim().to_string();
        match key.trim() {
            "NAME" => name = Some(value),
            "TYPE" => {
                if value != "ATSP" {
                    return Err(err(no, format!("TYPE must be ATSP, found {value}")));
                }
                kind = Some(value);
            }
            "DIMENSION" => {
                let d: usize = value
                    .parse()
                    .map_err(|e| err(no, format!("bad DIMENSION {value:?}: {e}")))?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EXPLICIT" {
                    return Err(err(no, format!("EDGE_WEIGHT_TYPE must be EXPLICIT, found {value}")));
                }
                weight_type = Some(value);
            }
            "EDGE_WEIGHT_FORMAT" => {
                if value != "FULL_MATRIX" {
                    return Err(err(
                        no,
                        format!("EDGE_WEIGHT_FORMAT must be FULL_MATRIX, found {value}"),
                    ));
                }
                weight_format = Some(value);
            }
            _ => {}
        }
    }

    let last_line = text.lines().count().max(1);
    let Some(section_no) = section_line else {
        return Err(err(last_line, "missing EDGE_WEIGHT_SECTION".into()));
    };
    for (key, present) in [
        ("NAME", name.is_some()),
        ("TYPE", kind.is_some()),
        ("DIMENSION", dimension.is_some()),
        ("EDGE_WEIGHT_TYPE", weight_type.is_some()),
        ("EDGE_WEIGHT_FORMAT", weight_format.is_some()),
    ] {
        if !present {
            return Err(err(section_no, format!("missing {key} before EDGE_WEIGHT_SECTION")));
        }
    }
    let n = dimension.unwrap_or_default();
    if n < 3 {
        return Err(err(section_no, format!("DIMENSION {n} is below 3")));
    }

    let mut data = Vec::with_capacity(n * n);
    for (no, line) in lines {
        if line == "EOF" {
            break;
        }
        for token in line.split_whitespace() {
            if data.len() == n * n {
                return Err(err(no, format!("more than {} matrix entries", n * n)));
            }
            let w: i64 = token
                .parse()
                .map_err(|e| err(no, format!("bad weight {token:?}: {e}")))?;
            let (u, v) = (data.len() / n, data.len() % n);
            if u != v && w < 1 {
                return Err(err(no, format!("weight ({u}, {v}) = {w} is not positive")));
            }
            data.push(w);
        }
    }
    if data.len() != n * n {
        return Err(err(
            last_line,
            format!("expected {} matrix entries, found {}", n * n, data.len()),
        ));
    }
    Ok(TsplibMatrix {
        name: name.unwrap_or_default(),
        matrix: WeightMatrix::with_sentinel(n, data)?,
    })
}
