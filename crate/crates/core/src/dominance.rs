//! Pareto relation, fronts, NSGA-II ranking and crowding.

use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Criterion, Instance, ObjectiveVector, Tour};

/// `a` is no worse than `b` in both criteria and differs from it.
#[inline]
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    a.d1 <= b.d1 && a.d2 <= b.d2 && a != b
}

/// Indices of the non-dominated, pairwise distinct points of `points`,
/// ordered by increasing first coordinate. Among equal points the one
/// appearing first in the input is kept.
pub fn nondominated_indices<T: Ord>(points: &[(T, T)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].cmp(&points[b]).then(a.cmp(&b)));
    let mut kept = Vec::new();
    let mut best: Option<&T> = None;
    for i in order {
        let y = &points[i].1;
        if best.is_none_or(|b| y < b) {
            kept.push(i);
            best = Some(y);
        }
    }
    kept
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontEntry {
    pub vector: ObjectiveVector,
    pub tour: Option<Tour>,
}

/// Mutually non-dominated, pairwise distinct objective vectors, each with an
/// optional representative tour. Entries are kept sorted by increasing `d1`
/// (hence decreasing `d2`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Front {
    entries: Vec<FrontEntry>,
}

// JSON form: a list of `{d1, d2, tour}` rows, the tour as a path string.
#[derive(Serialize, Deserialize)]
struct FrontRow {
    d1: i64,
    d2: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tour: Option<String>,
}

impl Serialize for Front {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|e| FrontRow {
            d1: e.vector.d1,
            d2: e.vector.d2,
            tour: e.tour.as_ref().map(Tour::to_path_string),
        }))
    }
}

impl<'de> Deserialize<'de> for Front {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<FrontRow>::deserialize(d)?;
        let count = rows.len();
        let mut points = Vec::with_capacity(count);
        for row in rows {
            let tour = row.tour.as_deref().map(Tour::parse_path).transpose().map_err(D::Error::custom)?;
            points.push((ObjectiveVector::new(row.d1, row.d2), tour));
        }
        let front = pareto_filter(points);
        if front.len() != count {
            return Err(D::Error::custom("rows are duplicated or dominated; not a Pareto front"));
        }
        Ok(front)
    }
}

/// Keeps exactly the non-dominated distinct vectors of `points`; the first
/// payload seen for a vector is retained.
pub fn pareto_filter<I>(points: I) -> Front
where
    I: IntoIterator<Item = (ObjectiveVector, Option<Tour>)>,
{
    let mut points: Vec<_> = points.into_iter().map(Some).collect();
    let keys: Vec<(i64, i64)> = points
        .iter()
        .map(|p| {
            let v = p.as_ref().unwrap().0;
            (v.d1, v.d2)
        })
        .collect();
    let entries = nondominated_indices(&keys)
        .into_iter()
        .map(|i| {
            let (vector, tour) = points[i].take().unwrap();
            FrontEntry { vector, tour }
        })
        .collect();
    Front { entries }
}

impl Front {
    pub fn from_vectors<I: IntoIterator<Item = ObjectiveVector>>(vectors: I) -> Front {
        pareto_filter(vectors.into_iter().map(|v| (v, None)))
    }

    /// Entries that are already sorted and mutually non-dominated.
    pub(crate) fn from_sorted_entries(entries: Vec<FrontEntry>) -> Front {
        debug_assert!(entries.windows(2).all(|w| w[0].vector.d1 < w[1].vector.d1
            && w[0].vector.d2 > w[1].vector.d2));
        Front { entries }
    }

    pub fn entries(&self) -> &[FrontEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vectors(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.vector).collect()
    }

    pub fn contains(&self, v: &ObjectiveVector) -> bool {
        self.entries
            .binary_search_by(|e| e.vector.d1.cmp(&v.d1))
            .map(|i| self.entries[i].vector == *v)
            .unwrap_or(false)
    }

    /// Every vector of `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &Front) -> bool {
        self.entries.iter().all(|e| other.contains(&e.vector))
    }

    /// Entries at the given positions, in their original order.
    pub(crate) fn select(&self, indices: &[usize]) -> Front {
        let mut indices = indices.to_vec();
        indices.sort_unstable();
        Front {
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    /// Writes the `d1,d2,tour` CSV form.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["d1", "d2", "tour"])?;
        for e in &self.entries {
            let tour = e.tour.as_ref().map(Tour::to_path_string).unwrap_or_default();
            w.write_record([e.vector.d1.to_string(), e.vector.d2.to_string(), tour])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Reads a front written by [`Front::write_csv`]. Rows that do not form a
    /// Pareto front (duplicates or dominated vectors) are rejected.
    pub fn read_csv<R: Read>(reader: R) -> Result<Front> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().take(2).collect::<Vec<_>>() != ["d1", "d2"] {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header d1,d2,tour, found {headers:?}"),
            });
        }
        let mut points = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let field = |k: usize| -> Result<i64> {
                let raw = record.get(k).unwrap_or("");
                raw.trim().parse().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad value {raw:?}: {e}"),
                })
            };
            let vector = ObjectiveVector::new(field(0)?, field(1)?);
            let tour = match record.get(2).map(str::trim) {
                None | Some("") => None,
                Some(t) => Some(Tour::parse_path(t).map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?),
            };
            points.push((vector, tour));
        }
        let count = points.len();
        let front = pareto_filter(points);
        if front.len() != count {
            return Err(Error::InvalidArgument(format!(
                "{} of {count} rows are duplicated or dominated; not a Pareto front",
                count - front.len()
            )));
        }
        Ok(front)
    }
}

/// A population member annotated with its non-domination rank (1 = best)
/// and crowding distance within that rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub tour: Tour,
    pub objectives: ObjectiveVector,
    pub rank: usize,
    pub crowding: f64,
}

impl Member {
    /// Crowded-comparison order: lower rank first, then larger crowding.
    pub fn crowded_cmp(&self, other: &Member) -> Ordering {
        self.rank.cmp(&other.rank).then_with(|| {
            other
                .crowding
                .partial_cmp(&self.crowding)
                .unwrap_or(Ordering::Equal)
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RankedPopulation {
    members: Vec<Member>,
}

impl RankedPopulation {
    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Member> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Non-dominated set of the population as a front.
    pub fn front(&self) -> Front {
        pareto_filter(
            self.members
                .iter()
                .filter(|m| m.rank == 1)
                .map(|m| (m.objectives, Some(m.tour.clone()))),
        )
    }

    /// Keeps the best `n` members under the crowded-comparison order.
    /// Whole ranks are taken first; the last partial rank is cut by crowding.
    pub fn truncate_best(mut self, n: usize) -> RankedPopulation {
        // stable, so equal members keep their input order
        self.members.sort_by(Member::crowded_cmp);
        self.members.truncate(n);
        self
    }
}

/// Non-domination ranks (1-based) by the fast non-dominated sort: dominance
/// counts plus lists of dominated members, `O(N^2)` comparisons.
pub fn nondominated_ranks(vectors: &[ObjectiveVector]) -> Vec<usize> {
    let n = vectors.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(&vectors[p], &vectors[q]) {
                dominated_by[p].push(q);
                count[q] += 1;
            } else if dominates(&vectors[q], &vectors[p]) {
                dominated_by[q].push(p);
                count[p] += 1;
            }
        }
    }
    let mut rank = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&p| count[p] == 0).collect();
    let mut level = 1;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            rank[p] = level;
            for &q in &dominated_by[p] {
                count[q] -= 1;
                if count[q] == 0 {
                    next.push(q);
                }
            }
        }
        current = next;
        level += 1;
    }
    rank
}

/// Crowding distance of every member of a single non-domination level.
///
/// Per objective the level is sorted; the two boundary members get infinity
/// and interior ones accumulate `(next - prev) / (max - min)`. An objective
/// with zero range contributes nothing.
pub fn crowding_distances(level: &[ObjectiveVector]) -> Vec<f64> {
    let n = level.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    for c in Criterion::BOTH {
        order.sort_by_key(|&i| (level[i].get(c), level[i].get(c.other()), i));
        let lo = level[order[0]].get(c);
        let hi = level[order[n - 1]].get(c);
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = (hi - lo) as f64;
        if range == 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let gap = (level[order[k + 1]].get(c) - level[order[k - 1]].get(c)) as f64;
            distance[order[k]] += gap / range;
        }
    }
    distance
}

/// Ranks a population and assigns crowding distances level by level.
/// Members keep their input order.
pub fn nondominated_sort(pop: Vec<(Tour, ObjectiveVector)>) -> RankedPopulation {
    let vectors: Vec<ObjectiveVector> = pop.iter().map(|p| p.1).collect();
    let ranks = nondominated_ranks(&vectors);
    let mut crowding = vec![0.0; pop.len()];
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); max_rank + 1];
    for (i, &r) in ranks.iter().enumerate() {
        by_level[r].push(i);
    }
    for level in by_level.iter().filter(|l| !l.is_empty()) {
        let vs: Vec<ObjectiveVector> = level.iter().map(|&i| vectors[i]).collect();
        for (&i, d) in level.iter().zip(crowding_distances(&vs)) {
            crowding[i] = d;
        }
    }
    let members = pop
        .into_iter()
        .zip(ranks)
        .zip(crowding)
        .map(|(((tour, objectives), rank), crowding)| Member {
            tour,
            objectives,
            rank,
            crowding,
        })
        .collect();
    RankedPopulation { members }
}

/// Upper bound on the size of the Pareto set: the smaller of the two
/// criterion value ranges `UB - LB + 1`, where `LB`/`UB` sum the cheapest /
/// dearest outgoing arc of every vertex.
pub fn cardinality_bound(inst: &Instance) -> u64 {
    Criterion::BOTH
        .iter()
        .map(|&c| {
            let m = inst.matrix(c);
            let (lb, ub) = (0..inst.n()).fold((0i64, 0i64), |(lb, ub), u| {
                (lb + m.min_outgoing(u), ub + m.max_outgoing(u))
            });
            (ub - lb + 1) as u64
        })
        .min()
        .expect("two criteria")
}
