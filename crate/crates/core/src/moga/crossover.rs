//! Respectful crossovers that reconnect common-arc fragments with a
//! Pareto-aware nearest-neighbour rule.
//!
//! Both operators copy every arc shared by the parents and then grow a
//! single path through the resulting fragments, starting from the fragment
//! that contains vertex 0. At each step the next fragment is reached by an
//! arc from the current path end to the first vertex of an unused fragment,
//! which can never close a premature sub-tour. Among the feasible arcs one
//! that is non-dominated under the componentwise arc-weight order is chosen
//! uniformly at random.
//!
//! * DEC (directed edge crossover): feasible arcs are parent arcs. If none
//!   is usable from the current end, any usable arc is allowed.
//! * DPX (distance preserving crossover): feasible arcs are those absent
//!   from both parents. Parent arcs are used only when nothing else is usable.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mutation::shift_mutation;
use crate::instance::{Instance, Tour};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverKind {
    Dec,
    Dpx,
}

/// Candidates whose arc-weight vector is not dominated by another
/// candidate's. Equal vectors are all kept.
fn nondominated_arcs(inst: &Instance, from: usize, heads: &[usize]) -> Vec<usize> {
    let mut keyed: Vec<((i64, i64), usize)> = heads
        .iter()
        .map(|&v| {
            let a = inst.arc(from, v);
            ((a.d1, a.d2), v)
        })
        .collect();
    keyed.sort_unstable();
    let mut out = Vec::new();
    // minimum second weight over keys strictly smaller in lexicographic order
    let mut best_before = i64::MAX;
    let mut i = 0;
    while i < keyed.len() {
        let key = keyed[i].0;
        let mut j = i;
        while j < keyed.len() && keyed[j].0 == key {
            j += 1;
        }
        if key.1 < best_before {
            out.extend(keyed[i..j].iter().map(|k| k.1));
        }
        best_before = best_before.min(key.1);
        i = j;
    }
    out
}

fn reconnect<R: Rng + ?Sized>(
    p1: &Tour,
    p2: &Tour,
    inst: &Instance,
    kind: CrossoverKind,
    rng: &mut R,
) -> Tour {
    let n = p1.len();
    debug_assert_eq!(n, p2.len());
    let mut succ = vec![usize::MAX; n];
    let mut common_pred = vec![usize::MAX; n];
    for (u, s) in succ.iter_mut().enumerate() {
        let v = p1.next(u);
        if p2.next(u) == v {
            *s = v;
            common_pred[v] = u;
        }
    }
    if succ.iter().all(|&v| v != usize::MAX) {
        return p1.clone();
    }

    // fragment ends, indexed by fragment start
    let mut end_of = vec![usize::MAX; n];
    let mut unused: Vec<usize> = Vec::new();
    for s in (0..n).filter(|&v| common_pred[v] == usize::MAX) {
        let mut e = s;
        while succ[e] != usize::MAX {
            e = succ[e];
        }
        end_of[s] = e;
        unused.push(s);
    }
    let mut first = 0;
    while common_pred[first] != usize::MAX {
        first = common_pred[first];
    }
    unused.retain(|&s| s != first);
    let mut cur = end_of[first];

    let mut heads = Vec::with_capacity(n);
    while !unused.is_empty() {
        heads.clear();
        let (a, b) = (p1.next(cur), p2.next(cur));
        match kind {
            CrossoverKind::Dec => {
                heads.extend(unused.iter().copied().filter(|&v| v == a || v == b));
            }
            CrossoverKind::Dpx => {
                heads.extend(unused.iter().copied().filter(|&v| v != a && v != b));
            }
        }
        if heads.is_empty() {
            heads.extend_from_slice(&unused);
        }
        let options = nondominated_arcs(inst, cur, &heads);
        let next = options[rng.gen_range(0..options.len())];
        succ[cur] = next;
        unused.retain(|&s| s != next);
        cur = end_of[next];
    }
    succ[cur] = first;
    Tour::from_successors_unchecked(succ)
}

/// Directed edge crossover with Pareto relation.
pub fn dec_pr_crossover<R: Rng + ?Sized>(p1: &Tour, p2: &Tour, inst: &Instance, rng: &mut R) -> Tour {
    reconnect(p1, p2, inst, CrossoverKind::Dec, rng)
}

/// Distance preserving crossover with Pareto relation.
pub fn dpx_pr_crossover<R: Rng + ?Sized>(p1: &Tour, p2: &Tour, inst: &Instance, rng: &mut R) -> Tour {
    reconnect(p1, p2, inst, CrossoverKind::Dpx, rng)
}

pub fn crossover<R: Rng + ?Sized>(
    kind: CrossoverKind,
    p1: &Tour,
    p2: &Tour,
    inst: &Instance,
    rng: &mut R,
) -> Tour {
    reconnect(p1, p2, inst, kind, rng)
}

/// Crossover with a clone guard: an offspring equal to either parent is
/// replaced by a shift mutation of a parent chosen with equal probability.
pub fn recombine<R: Rng + ?Sized>(
    p1: &Tour,
    p2: &Tour,
    inst: &Instance,
    kind: CrossoverKind,
    rng: &mut R,
) -> Tour {
    let child = crossover(kind, p1, p2, inst, rng);
    if child == *p1 || child == *p2 {
        let base = if rng.gen_bool(0.5) { p1 } else { p2 };
        return shift_mutation(base, rng);
    }
    child
}
