//! Enumeration of fault sets: all subsets of at most `k` items, smallest first and in
//! colexicographic order within each size.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::digraph::EdgeId;
use crate::error::{capability, Result};

/// A set of failed edges.
pub type FaultSet = BTreeSet<EdgeId>;

/// Environment variable that overrides [`DEFAULT_FAULT_LIMIT`].
pub const FAULT_LIMIT_ENV: &str = "SCC_PRESERVE_FAULT_LIMIT";

/// Largest number of fault sets an exhaustive routine enumerates by default.
pub const DEFAULT_FAULT_LIMIT: u128 = 2_000_000;

pub fn fault_limit() -> u128 {
    std::env::var(FAULT_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_FAULT_LIMIT)
}

pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of subsets of an `m`-set with at most `k` elements.
pub fn count_fault_sets(m: usize, k: usize) -> u128 {
    (0..=k.min(m)).map(|i| binomial(m, i)).sum()
}

pub(crate) fn ensure_within_limit(m: usize, k: usize, limit: u128, what: &str) -> Result<()> {
    let total = count_fault_sets(m, k);
    if total > limit {
        return capability(format!(
            "{what}: {total} fault sets over {m} edges with k = {k} exceed the limit of {limit}"
        ));
    }
    Ok(())
}

/// Advances `c` (ascending, values below `universe`) to its colex successor.
fn colex_next(c: &mut [usize], universe: usize) -> bool {
    let r = c.len();
    for j in 0..r {
        let limit = if j + 1 < r { c[j + 1] } else { universe };
        if c[j] + 1 < limit {
            c[j] += 1;
            for (i, x) in c.iter_mut().enumerate().take(j) {
                *x = i;
            }
            return true;
        }
    }
    false
}

/// The subset of size `r` with colex rank `rank`.
fn colex_unrank(mut rank: u128, r: usize) -> Vec<usize> {
    let mut c = vec![0; r];
    for i in (1..=r).rev() {
        let mut x = i - 1;
        while binomial(x + 1, i) <= rank {
            x += 1;
        }
        c[i - 1] = x;
        rank -= binomial(x, i);
    }
    c
}

/// Visits every subset of `0..universe` with at most `k` elements in graded colex order.
pub(crate) fn for_each_subset(
    universe: usize,
    k: usize,
    f: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for_each_subset_in_range(universe, k, 0, count_fault_sets(universe, k), f)
}

/// Visits the subsets whose graded colex index lies in `start..start + len`.
pub(crate) fn for_each_subset_in_range(
    universe: usize,
    k: usize,
    start: u128,
    len: u128,
    mut f: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut remaining = len;
    let mut offset = start;
    for r in 0..=k.min(universe) {
        let layer = binomial(universe, r);
        if offset >= layer {
            offset -= layer;
            continue;
        }
        let mut c = colex_unrank(offset, r);
        offset = 0;
        loop {
            if remaining == 0 {
                return ControlFlow::Continue(());
            }
            remaining -= 1;
            f(&c)?;
            if !colex_next(&mut c, universe) {
                break;
            }
        }
    }
    ControlFlow::Continue(())
}
