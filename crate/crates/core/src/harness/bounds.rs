//! Init-bound rules. A rule maps the word length `n` to a check-stack
//! length that suffices for every nontrivial word of length at most `n`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::Letter;
use crate::oracles::{BoundedOracle, GroupOracle, HtOracle};

/// Bound given explicitly in a group-spec file.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundOverride {
    Fixed { value: usize },
    Linear { per_letter: usize, offset: usize },
}

impl BoundOverride {
    pub fn at(&self, n: usize) -> usize {
        match *self {
            BoundOverride::Fixed { value } => value,
            BoundOverride::Linear { per_letter, offset } => n * per_letter + offset,
        }
    }
}

#[derive(Clone)]
pub enum BoundRule {
    Linear {
        per_letter: usize,
        offset: usize,
    },
    /// Deepest moved level over all words, plus a pad.
    Bounded(Arc<BoundedOracle>),
    /// Cheapest moved string over all words; see [`ht_witness_cost`].
    Higman(Arc<HtOracle>),
    Scaled {
        factor: usize,
        inner: Box<BoundRule>,
    },
    Direct(Box<BoundRule>, Box<BoundRule>),
    Free(Box<BoundRule>, Box<BoundRule>),
    Wreath {
        base: Box<BoundRule>,
        per_letter: usize,
    },
}

impl BoundRule {
    pub fn at(&self, n: usize) -> usize {
        match self {
            BoundRule::Linear { per_letter, offset } => n * per_letter + offset,
            BoundRule::Bounded(o) => {
                o.alphabet().words_up_to(n).filter_map(|w| o.moved_depth(&w)).max().unwrap_or(0) + 1
            }
            BoundRule::Higman(o) => {
                o.alphabet().words_up_to(n).filter_map(|w| ht_witness_cost(o, &w)).max().unwrap_or(0)
            }
            BoundRule::Scaled { factor, inner } => inner.at(n * factor),
            BoundRule::Direct(h, k) => 1 + h.at(n).max(k.at(n)),
            BoundRule::Free(h, k) => n * (h.at(1).max(k.at(1)) + 1),
            BoundRule::Wreath { base, per_letter } => base.at(n) + 1 + 2 * (n * per_letter + 1) + 1,
        }
    }

    pub fn is_calibrated(&self) -> bool {
        match self {
            BoundRule::Linear { .. } => false,
            BoundRule::Bounded(_) | BoundRule::Higman(_) => true,
            BoundRule::Scaled { inner, .. } | BoundRule::Wreath { base: inner, .. } => inner.is_calibrated(),
            BoundRule::Direct(h, k) | BoundRule::Free(h, k) => h.is_calibrated() || k.is_calibrated(),
        }
    }
}

/// Least init length over strings `x` moved by `w`: the run needs `x` and
/// a pad below, and room for every intermediate image. `None` when `w` is
/// trivial.
pub fn ht_witness_cost(o: &HtOracle, w: &[Letter]) -> Option<usize> {
    if o.is_trivial(w) {
        return None;
    }
    let mut best: Option<usize> = None;
    for k in 0.. {
        if best.is_some_and(|b| k + 2 >= b) {
            break;
        }
        for x in strings(o.n, o.r, k) {
            let mut cur = x.clone();
            let mut height = x.len() + 1;
            let moved = w.iter().all(|&a| match o.elements[a].apply(&cur) {
                Some(next) => {
                    height = height.max(next.len());
                    cur = next;
                    true
                }
                None => false,
            });
            if moved && cur != x {
                best = Some(best.map_or(height, |b| b.min(height)));
            }
        }
    }
    best
}

/// All of `Q Σ^k` in lexicographic order.
fn strings(n: usize, r: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = r * n.pow(k as u32);
    (0..total).map(move |mut i| {
        let mut out = vec![0; k + 1];
        for slot in out.iter_mut().skip(1).rev() {
            *slot = i % n;
            i /= n;
        }
        out[0] = i;
        out
    })
}
