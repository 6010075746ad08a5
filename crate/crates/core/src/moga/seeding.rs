//! Initial population: assignment-patching heuristics plus random circuits.

use rand::Rng;

use crate::instance::{Criterion, Instance, Tour, WeightMatrix};

/// How the circuits of an optimal assignment are merged into one tour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatchStrategy {
    /// Repeatedly merge the two circuits whose cheapest patch is globally
    /// cheapest.
    CheapestPair,
    /// Start from the largest circuit and patch the others into it in
    /// decreasing size order, each at its cheapest position.
    LargestFirst,
}

/// Dense `O(n^3)` Hungarian method (shortest augmenting paths with
/// potentials). Returns `row -> column`.
pub(crate) fn min_cost_assignment(m: &WeightMatrix) -> Vec<usize> {
    let n = m.n();
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = m.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    assignment
}

fn cycles_of(succ: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; succ.len()];
    let mut cycles = Vec::new();
    for start in 0..succ.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v);
            v = succ[v];
        }
        cycles.push(cycle);
    }
    cycles
}

/// Cheapest exchange `a -> succ[b]`, `b -> succ[a]` with `a` in `left` and
/// `b` in `right`: `(extra cost, a, b)`.
fn cheapest_patch(m: &WeightMatrix, succ: &[usize], left: &[usize], right: &[usize]) -> (i64, usize, usize) {
    let mut best = (i64::MAX, usize::MAX, usize::MAX);
    for &a in left {
        for &b in right {
            let delta = m.get(a, succ[b]) + m.get(b, succ[a]) - m.get(a, succ[a]) - m.get(b, succ[b]);
            if delta < best.0 {
                best = (delta, a, b);
            }
        }
    }
    best
}

/// Solves the assignment relaxation on one criterion and patches its
/// circuits into a single tour, measuring patch costs on that criterion.
pub fn assignment_patch(inst: &Instance, criterion: Criterion, strategy: PatchStrategy) -> Tour {
    let m = inst.matrix(criterion);
    let mut succ = min_cost_assignment(m);
    debug_assert!(succ.iter().enumerate().all(|(u, &v)| u != v));
    let mut cycles = cycles_of(&succ);

    match strategy {
        PatchStrategy::CheapestPair => {
            while cycles.len() > 1 {
                let mut best = (i64::MAX, 0, 0, 0, 0);
                for i in 0..cycles.len() {
                    for j in (i + 1)..cycles.len() {
                        let (d, a, b) = cheapest_patch(m, &succ, &cycles[i], &cycles[j]);
                        if d < best.0 {
                            best = (d, i, j, a, b);
                        }
                    }
                }
                let (_, i, j, a, b) = best;
                succ.swap(a, b);
                let absorbed = cycles.swap_remove(j);
                cycles[i].extend(absorbed);
            }
        }
        PatchStrategy::LargestFirst => {
            // largest first; equal sizes keep discovery order
            cycles.sort_by_key(|c| std::cmp::Reverse(c.len()));
            let mut rest = cycles.into_iter();
            let mut grown = rest.next().expect("at least one circuit");
            for cycle in rest {
                let (_, a, b) = cheapest_patch(m, &succ, &grown, &cycle);
                succ.swap(a, b);
                grown.extend(cycle);
            }
        }
    }
    Tour::from_successors_unchecked(succ)
}

/// `N` starting tours: assignment patching on each criterion with both
/// strategies, then `N - 4` random circuits through vertex 0.
pub fn seed_population<R: Rng + ?Sized>(inst: &Instance, size: usize, rng: &mut R) -> Vec<Tour> {
    let mut tours = Vec::with_capacity(size);
    for c in Criterion::BOTH {
        for s in [PatchStrategy::CheapestPair, PatchStrategy::LargestFirst] {
            if tours.len() < size {
                tours.push(assignment_patch(inst, c, s));
            }
        }
    }
    while tours.len() < size {
        tours.push(Tour::random(inst.n(), rng));
    }
    tours
}
