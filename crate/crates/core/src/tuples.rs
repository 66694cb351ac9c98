//! Enumeration of strictly increasing index tuples and their intersections.
//!
//! All indices handed to callers are 1-based, matching how the sequences
//! `A_1, A_2, ...` are numbered throughout the crate.

use serde::{Deserialize, Serialize};

use crate::exact_sets::{IntervalSet, Rational};

/// Two measures that were expected to agree but did not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub indices: Vec<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// All strictly increasing tuples of length `len` drawn from `1..=n`, in
/// lexicographic order.
pub fn combinations(n: usize, len: usize) -> Combinations {
    Combinations {
        n,
        current: if len <= n { Some((1..=len).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let len = next.len();
        let mut pos = len;
        while pos > 0 {
            pos -= 1;
            if next[pos] < self.n - (len - 1 - pos) {
                next[pos] += 1;
                for k in pos + 1..len {
                    next[k] = next[k - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

/// Number of `len`-subsets of an `n`-set.
pub fn binomial(n: usize, len: usize) -> u128 {
    if len > n {
        return 0;
    }
    let len = len.min(n - len);
    (0..len).fold(1u128, |acc, k| acc * (n - k) as u128 / (k + 1) as u128)
}

/// Values that can be intersected, so tuples of them can be walked with
/// shared prefixes.
pub trait Meet: Sized {
    fn meet(&self, other: &Self) -> Self;
}

impl Meet for IntervalSet {
    fn meet(&self, other: &Self) -> Self {
        self.intersect(other)
    }
}

impl<T: Meet, U: Meet> Meet for (T, U) {
    fn meet(&self, other: &Self) -> Self {
        (self.0.meet(&other.0), self.1.meet(&other.1))
    }
}

/// Depth-first walk over every increasing tuple of length `1..=max_len`
/// whose last index is less than `max_span` past its first (if given),
/// calling `visit` with the tuple and the meet of the selected items.
/// Meets along a common prefix are shared. Tuples are visited in
/// lexicographic order.
pub fn walk_intersections<T, F>(items: &[T], max_len: usize, max_span: Option<usize>, mut visit: F)
where
    T: Meet + Clone,
    F: FnMut(&[usize], &T),
{
    for first in 1..=items.len() {
        walk_intersections_from(items, first, max_len, max_span, &mut visit);
    }
}

/// Same as [`walk_intersections`] but restricted to tuples starting at `first`.
pub fn walk_intersections_from<T, F>(items: &[T], first: usize, max_len: usize, max_span: Option<usize>, mut visit: F)
where
    T: Meet + Clone,
    F: FnMut(&[usize], &T),
{
    let mut stack = Vec::with_capacity(max_len);
    let start = items[first - 1].clone();
    walk_from(items, first, max_len, max_span, &mut stack, &start, &mut visit);
}

fn walk_from<T, F>(
    items: &[T],
    index: usize,
    max_len: usize,
    max_span: Option<usize>,
    stack: &mut Vec<usize>,
    acc: &T,
    visit: &mut F,
) where
    T: Meet,
    F: FnMut(&[usize], &T),
{
    if max_len == 0 {
        return;
    }
    stack.push(index);
    visit(stack, acc);
    if stack.len() < max_len {
        let first = stack[0];
        let last = match max_span {
            Some(span) => (first + span - 1).min(items.len()),
            None => items.len(),
        };
        for next in index + 1..=last {
            let inter = acc.meet(&items[next - 1]);
            walk_from(items, next, max_len, max_span, stack, &inter, visit);
        }
    }
    stack.pop();
}
