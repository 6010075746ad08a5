use rand::seq::index;
use rand::Rng;

use crate::instance::{Criterion, Instance, Tour};

/// Moves vertex `v` so that it directly follows `after`. Moving `v` behind
/// its own predecessor leaves the tour unchanged.
pub fn shift_move(t: &Tour, v: usize, after: usize) -> Tour {
    assert_ne!(v, after, "a vertex cannot follow itself");
    let mut succ = t.succ().to_vec();
    let pred = t.predecessors()[v];
    if pred == after {
        return t.clone();
    }
    succ[pred] = succ[v];
    succ[v] = succ[after];
    succ[after] = v;
    Tour::from_successors_unchecked(succ)
}

/// Shift mutation: one uniformly chosen vertex is removed and reinserted
/// after a uniformly chosen vertex other than itself and its predecessor,
/// so the result always differs from `t`. Tours with fewer than four
/// vertices are returned unchanged.
pub fn shift_mutation<R: Rng + ?Sized>(t: &Tour, rng: &mut R) -> Tour {
    let n = t.len();
    if n < 4 {
        return t.clone();
    }
    let v = rng.gen_range(0..n);
    let pred = t.predecessors()[v];
    let (lo, hi) = (v.min(pred), v.max(pred));
    let mut after = rng.gen_range(0..n - 2);
    if after >= lo {
        after += 1;
    }
    if after >= hi {
        after += 1;
    }
    shift_move(t, v, after)
}

/// Orientation-preserving 3-opt move: with `a`, `b`, `c` in tour order, the
/// segment `succ(a)..=b` is relocated between `c` and `succ(c)`.
pub fn segment_insertion(t: &Tour, a: usize, b: usize, c: usize) -> Tour {
    let mut succ = t.succ().to_vec();
    let (a1, b1, c1) = (succ[a], succ[b], succ[c]);
    succ[a] = b1;
    succ[c] = a1;
    succ[b] = c1;
    Tour::from_successors_unchecked(succ)
}

fn insertion_delta(inst: &Instance, crit: Criterion, t: &Tour, a: usize, b: usize, c: usize) -> i64 {
    let w = |u, v| inst.weight(crit, u, v);
    let (a1, b1, c1) = (t.next(a), t.next(b), t.next(c));
    w(a, b1) + w(c, a1) + w(b, c1) - w(a, a1) - w(b, b1) - w(c, c1)
}

/// Random jump in the 3-opt neighbourhood that tries to improve one
/// criterion (chosen with equal probability). Up to `n` random segment
/// insertions are sampled; the first one that strictly improves the chosen
/// criterion is applied, otherwise the last sample is applied anyway.
/// Tours with fewer than five vertices are returned unchanged.
pub fn three_opt_jump<R: Rng + ?Sized>(t: &Tour, inst: &Instance, rng: &mut R) -> Tour {
    traced_jump(t, inst, rng).tour
}

#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct Jump {
    pub tour: Tour,
    pub criterion: Criterion,
    pub improving: bool,
}

pub(crate) fn traced_jump<R: Rng + ?Sized>(t: &Tour, inst: &Instance, rng: &mut R) -> Jump {
    let n = t.len();
    if n < 5 {
        return Jump {
            tour: t.clone(),
            criterion: Criterion::First,
            improving: false,
        };
    }
    let crit = if rng.gen_bool(0.5) { Criterion::First } else { Criterion::Second };
    let order = t.order();
    let mut last = (0, 0, 0);
    for _ in 0..n {
        let mut pos = index::sample(rng, n, 3).into_vec();
        pos.sort_unstable();
        let (a, b, c) = (order[pos[0]], order[pos[1]], order[pos[2]]);
        if insertion_delta(inst, crit, t, a, b, c) < 0 {
            return Jump {
                tour: segment_insertion(t, a, b, c),
                criterion: crit,
                improving: true,
            };
        }
        last = (a, b, c);
    }
    Jump {
        tour: segment_insertion(t, last.0, last.1, last.2),
        criterion: crit,
        improving: false,
    }
}
