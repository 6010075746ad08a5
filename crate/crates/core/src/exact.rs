//! Exact Pareto sets for small instances.
//!
//! Two independent routes: complete enumeration of the `(n-1)!` circuits
//! through vertex 0, and a bi-objective Held-Karp labelling over
//! `(visited set, last vertex)` states. They serve as mutual oracles.

use rayon::prelude::*;

use crate::dominance::{Front, FrontEntry};
use crate::error::{Error, Result};
use crate::instance::{Instance, ObjectiveVector, Tour};

pub const DEFAULT_ENUMERATION_LIMIT: usize = 13;
pub const DP_LIMIT: usize = 16;

/// Non-dominated archive sorted by increasing `d1`. Each vector keeps the
/// lexicographically smallest successor array that reaches it.
#[derive(Default)]
struct Archive {
    entries: Vec<(ObjectiveVector, Vec<usize>)>,
}

impl Archive {
    fn offer(&mut self, v: ObjectiveVector, succ: impl FnOnce() -> Vec<usize>) {
        let upper = self.entries.partition_point(|e| e.0.d1 <= v.d1);
        if upper > 0 {
            let (w, best) = &mut self.entries[upper - 1];
            if w.d2 <= v.d2 {
                if *w == v {
                    let candidate = succ();
                    if candidate < *best {
                        *best = candidate;
                    }
                }
                return;
            }
        }
        let start = self.entries.partition_point(|e| e.0.d1 < v.d1);
        let mut end = start;
        while end < self.entries.len() && self.entries[end].0.d2 >= v.d2 {
            end += 1;
        }
        self.entries.splice(start..end, std::iter::once((v, succ())));
    }

    fn merge(mut self, other: Archive) -> Archive {
        for (v, succ) in other.entries {
            self.offer(v, || succ);
        }
        self
    }

    fn into_front(self) -> Front {
        Front::from_sorted_entries(
            self.entries
                .into_iter()
                .map(|(vector, succ)| FrontEntry {
                    vector,
                    tour: Some(Tour::from_successors_unchecked(succ)),
                })
                .collect(),
        )
    }
}

struct Enumerator<'a> {
    inst: &'a Instance,
    n: usize,
    path: Vec<usize>,
    visited: Vec<bool>,
    archive: Archive,
}

impl Enumerator<'_> {
    fn descend(&mut self, d1: i64, d2: i64) {
        let depth = self.path.len();
        let last = self.path[depth - 1];
        if depth == self.n {
            let closing = self.inst.arc(last, 0);
            let v = ObjectiveVector::new(d1 + closing.d1, d2 + closing.d2);
            let path = &self.path;
            self.archive.offer(v, || successors_of(path));
            return;
        }
        for next in 1..self.n {
            if self.visited[next] {
                continue;
            }
            let a = self.inst.arc(last, next);
            self.visited[next] = true;
            self.path.push(next);
            self.descend(d1 + a.d1, d2 + a.d2);
            self.path.pop();
            self.visited[next] = false;
        }
    }
}

fn successors_of(path: &[usize]) -> Vec<usize> {
    let n = path.len();
    let mut succ = vec![0; n];
    for i in 0..n {
        succ[path[i]] = path[(i + 1) % n];
    }
    succ
}

/// Exact Pareto set by complete enumeration of all circuits starting at
/// vertex 0. Work is split on the second vertex of the circuit; the result
/// does not depend on how branches are scheduled.
pub fn enumerate_pareto(inst: &Instance, limit: usize) -> Result<Front> {
    let n = inst.n();
    if n > limit {
        return Err(Error::TooLarge {
            n,
            limit,
            method: "complete enumeration",
        });
    }
    let archive = (1..n)
        .into_par_iter()
        .map(|second| {
            let mut e = Enumerator {
                inst,
                n,
                path: vec![0, second],
                visited: vec![false; n],
                archive: Archive::default(),
            };
            e.visited[0] = true;
            e.visited[second] = true;
            let a = inst.arc(0, second);
            e.descend(a.d1, a.d2);
            e.archive
        })
        .reduce(Archive::default, Archive::merge);
    Ok(archive.into_front())
}

#[derive(Clone, Copy)]
struct Label {
    d1: i64,
    d2: i64,
    vertex: usize,
    parent: u32,
}

const ROOT: u32 = u32::MAX;

/// Exact Pareto set by dynamic programming over `(visited set, last vertex)`
/// states, keeping the non-dominated cost labels of each state.
pub fn dp_pareto(inst: &Instance) -> Result<Front> {
    let n = inst.n();
    if n > DP_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DP_LIMIT,
            method: "dynamic programming",
        });
    }
    let full = (1usize << n) - 1;
    let mut labels = vec![Label {
        d1: 0,
        d2: 0,
        vertex: 0,
        parent: ROOT,
    }];
    let mut states: Vec<Vec<u32>> = vec![Vec::new(); (full + 1) * n];
    states[n] = vec![0]; // mask {0}, last vertex 0

    for mask in (1..=full).step_by(2) {
        for last in 0..n {
            let here = std::mem::take(&mut states[mask * n + last]);
            if here.is_empty() {
                continue;
            }
            for next in (1..n).filter(|&v| mask & (1 << v) == 0) {
                let a = inst.arc(last, next);
                let slot = (mask | (1 << next)) * n + next;
                for &id in &here {
                    let from = labels[id as usize];
                    let cand = Label {
                        d1: from.d1 + a.d1,
                        d2: from.d2 + a.d2,
                        vertex: next,
                        parent: id,
                    };
                    let bucket = &mut states[slot];
                    if bucket.iter().any(|&o| {
                        let o = &labels[o as usize];
                        o.d1 <= cand.d1 && o.d2 <= cand.d2
                    }) {
                        continue;
                    }
                    bucket.retain(|&o| {
                        let o = &labels[o as usize];
                        !(cand.d1 <= o.d1 && cand.d2 <= o.d2)
                    });
                    bucket.push(labels.len() as u32);
                    labels.push(cand);
                }
            }
            // full-mask states are read again when closing the circuits
            if mask == full {
                states[mask * n + last] = here;
            }
        }
    }

    let mut closing = Vec::new();
    for last in 1..n {
        for &id in &states[full * n + last] {
            let l = labels[id as usize];
            let a = inst.arc(last, 0);
            closing.push((ObjectiveVector::new(l.d1 + a.d1, l.d2 + a.d2), id));
        }
    }
    let keys: Vec<(i64, i64)> = closing.iter().map(|(v, _)| (v.d1, v.d2)).collect();
    let entries = crate::dominance::nondominated_indices(&keys)
        .into_iter()
        .map(|i| {
            let (vector, mut id) = closing[i];
            let mut path = Vec::with_capacity(n);
            while id != ROOT {
                let l = labels[id as usize];
                path.push(l.vertex);
                id = l.parent;
            }
            path.reverse();
            FrontEntry {
                vector,
                tour: Some(Tour::from_successors_unchecked(successors_of(&path))),
            }
        })
        .collect();
    Ok(Front::from_sorted_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::cardinality_bound;
    use crate::instance::{generate_random, Criterion};

    fn all_orders(n: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            for v in 1..n {
                if !prefix.contains(&v) {
                    prefix.push(v);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut vec![0], n, &mut out);
        out
    }

    #[test]
    fn three_vertices() {
        let inst = generate_random(3, 1..=9, 1..=9, 2).unwrap();
        let t1 = Tour::from_order(&[0, 1, 2]).unwrap();
        let t2 = Tour::from_order(&[0, 2, 1]).unwrap();
        let expect = Front::from_vectors([inst.evaluate(&t1).unwrap(), inst.evaluate(&t2).unwrap()]);
        assert_eq!(enumerate_pareto(&inst, 13).unwrap().vectors(), expect.vectors());
        assert_eq!(dp_pareto(&inst).unwrap().vectors(), expect.vectors());
    }

    #[test]
    fn uniform_weights_single_point() {
        let w1 = vec![vec![2; 6]; 6];
        let w2 = vec![vec![7; 6]; 6];
        let inst = Instance::from_rows("u", &w1, &w2).unwrap();
        let expect = vec![ObjectiveVector::new(12, 42)];
        assert_eq!(dp_pareto(&inst).unwrap().vectors(), expect);
        let f = enumerate_pareto(&inst, 13).unwrap();
        assert_eq!(f.vectors(), expect);
        // all 120 circuits tie, the smallest successor array is 0->1->...->5->0
        assert_eq!(f.entries()[0].tour.as_ref().unwrap().succ(), &[1, 2, 3, 4, 5, 0]);
    }

    #[test]
    fn guard_refuses_large_instances() {
        let inst = generate_random(14, 1..=9, 1..=9, 2).unwrap();
        assert!(matches!(enumerate_pareto(&inst, 13), Err(Error::TooLarge { .. })));
        let inst = generate_random(17, 1..=9, 1..=9, 2).unwrap();
        assert!(matches!(dp_pareto(&inst), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn matches_brute_force_with_canonical_representatives() {
        for seed in 0..5 {
            let inst = generate_random(7, 1..=3, 1..=3, seed).unwrap();
            let mut all: Vec<(ObjectiveVector, Vec<usize>)> = all_orders(7)
                .iter()
                .map(|o| {
                    let t = Tour::from_order(o).unwrap();
                    (inst.evaluate(&t).unwrap(), t.succ().to_vec())
                })
                .collect();
            all.sort();
            let expect = Front::from_vectors(all.iter().map(|p| p.0));
            let got = enumerate_pareto(&inst, 13).unwrap();
            assert_eq!(got.vectors(), expect.vectors());
            for e in got.entries() {
                let smallest = &all.iter().find(|p| p.0 == e.vector).unwrap().1;
                assert_eq!(e.tour.as_ref().unwrap().succ(), smallest.as_slice());
            }
            let dp = dp_pareto(&inst).unwrap();
            assert_eq!(dp.vectors(), expect.vectors());
            for e in dp.entries() {
                assert_eq!(inst.evaluate(e.tour.as_ref().unwrap()).unwrap(), e.vector);
            }
            assert!(got.len() as u64 <= cardinality_bound(&inst));
        }
    }

    #[test]
    fn front_spans_single_criterion_optima() {
        let inst = generate_random(8, 1..=10, 1..=10, 77).unwrap();
        let f = dp_pareto(&inst).unwrap();
        let best = |c: Criterion| {
            all_orders(8)
                .iter()
                .map(|o| inst.evaluate(&Tour::from_order(o).unwrap()).unwrap().get(c))
                .min()
                .unwrap()
        };
        assert_eq!(f.entries()[0].vector.d1, best(Criterion::First));
        assert_eq!(f.entries()[f.len() - 1].vector.d2, best(Criterion::Second));
    }
}
