use std::cmp::Ordering;

use rand::Rng;

use crate::dominance::Member;

/// Best of `s` uniform draws with replacement under the crowded-comparison
/// order. On a tie the earlier draw wins.
pub fn tournament_select<'a, R: Rng + ?Sized>(pop: &'a [Member], s: usize, rng: &mut R) -> &'a Member {
    assert!(!pop.is_empty(), "tournament on an empty population");
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..s.max(1) {
        let m = &pop[rng.gen_range(0..pop.len())];
        if m.crowded_cmp(best) == Ordering::Less {
            best = m;
        }
    }
    best
}
