use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Half-open interval `[lo, hi)` with `0 <= lo < hi <= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "(Rational, Rational)")]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        check_bounds(&lo, &hi)?;
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> Rational {
        &self.hi - &self.lo
    }
}

impl From<Interval> for (Rational, Rational) {
    fn from(i: Interval) -> Self {
        (i.lo, i.hi)
    }
}

fn check_bounds(lo: &Rational, hi: &Rational) -> Result<()> {
    let reason = if lo >= hi {
        Some("lo must be strictly below hi")
    } else if lo.is_negative() || *hi > Rational::one() {
        Some("endpoints must lie in [0,1]")
    } else {
        None
    };
    match reason {
        Some(reason) => Err(Error::InvalidInterval {
            lo: lo.to_string(),
            hi: hi.to_string(),
            reason,
        }),
        None => Ok(()),
    }
}

/// Finite union of half-open intervals in `[0,1)`, kept sorted, disjoint and
/// non-adjacent. Two sets are equal exactly when their interval lists are.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIntervalSet")]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

#[derive(Deserialize)]
struct RawIntervalSet {
    intervals: Vec<(Rational, Rational)>,
}

impl TryFrom<RawIntervalSet> for IntervalSet {
    type Error = Error;

    fn try_from(raw: RawIntervalSet) -> Result<Self> {
        IntervalSet::canonicalize(raw.intervals)
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// `[0,1)`.
    pub fn unit() -> Self {
        IntervalSet {
            intervals: vec![Interval {
                lo: Rational::zero(),
                hi: Rational::one(),
            }],
        }
    }

    /// Single interval `[lo, hi)`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Ok(IntervalSet {
            intervals: vec![Interval::new(lo, hi)?],
        })
    }

    /// Builds the canonical form of an arbitrary list of intervals.
    /// Overlapping or touching pieces are merged.
    pub fn canonicalize<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut pieces = Vec::new();
        for (lo, hi) in raw {
            pieces.push(Interval::new(lo, hi)?);
        }
        Ok(Self::from_valid(pieces))
    }

    /// Union of the dyadic cells `[t 2^-level, (t+1) 2^-level)` for each `t`.
    pub fn from_dyadic_cells(level: u32, cells: impl IntoIterator<Item = u64>) -> Self {
        let width = Rational::dyadic(level);
        let mut cells: Vec<u64> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        let mut out: Vec<Interval> = Vec::new();
        let mut run: Option<(u64, u64)> = None;
        for t in cells {
            assert!(t < 1u64 << level, "dyadic cell {t} outside level {level}");
            run = match run {
                Some((start, end)) if end == t => Some((start, t + 1)),
                Some((start, end)) => {
                    out.push(Interval {
                        lo: &width * Rational::from(start),
                        hi: &width * Rational::from(end),
                    });
                    Some((t, t + 1))
                }
                None => Some((t, t + 1)),
            };
        }
        if let Some((start, end)) = run {
            out.push(Interval {
                lo: &width * Rational::from(start),
                hi: &width * Rational::from(end),
            });
        }
        IntervalSet { intervals: out }
    }

    fn from_valid(mut pieces: Vec<Interval>) -> Self {
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match out.last_mut() {
                Some(last) if piece.lo <= last.hi => {
                    if piece.hi > last.hi {
                        last.hi = piece.hi;
                    }
                }
                _ => out.push(piece),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = if a[i].lo > b[j].lo { &a[i].lo } else { &b[j].lo };
            let (hi, advance_a) = match a[i].hi.cmp(&b[j].hi) {
                Ordering::Less => (&a[i].hi, true),
                _ => (&b[j].hi, false),
            };
            if lo < hi {
                out.push(Interval {
                    lo: lo.clone(),
                    hi: hi.clone(),
                });
            }
            if advance_a {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of an intersection of canonical sets are already disjoint
        // and non-adjacent.
        IntervalSet { intervals: out }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut merged = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].lo <= b[j].lo);
            let next = if take_a {
                i += 1;
                &a[i - 1]
            } else {
                j += 1;
                &b[j - 1]
            };
            match merged.last_mut() {
                Some(Interval { hi, .. }) if next.lo <= *hi => {
                    if next.hi > *hi {
                        *hi = next.hi.clone();
                    }
                }
                _ => merged.push(next.clone()),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a IntervalSet>) -> IntervalSet {
        let pieces: Vec<Interval> = sets.into_iter().flat_map(|s| s.intervals.iter().cloned()).collect();
        Self::from_valid(pieces)
    }

    /// Complement within `[0,1)`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = Rational::zero();
        for piece in &self.intervals {
            if cursor < piece.lo {
                out.push(Interval {
                    lo: cursor,
                    hi: piece.lo.clone(),
                });
            }
            cursor = piece.hi.clone();
        }
        if cursor < Rational::one() {
            out.push(Interval {
                lo: cursor,
                hi: Rational::one(),
            });
        }
        IntervalSet { intervals: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.intersect(other) == *self
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// Image under `x -> factor * x + offset`.
    pub fn scale_translate(&self, factor: &Rational, offset: &Rational) -> Result<IntervalSet> {
        if !factor.is_positive() || offset.is_negative() || factor + offset > Rational::one() {
            return Err(Error::ScaleOutOfRange {
                factor: factor.to_string(),
                offset: offset.to_string(),
            });
        }
        Ok(self.map_affine(factor, offset))
    }

    /// Like [`scale_translate`](Self::scale_translate) but a zero factor maps
    /// everything to the empty set.
    pub fn scale(&self, factor: &Rational) -> Result<IntervalSet> {
        if factor.is_zero() {
            Ok(IntervalSet::empty())
        } else {
            self.scale_translate(factor, &Rational::zero())
        }
    }

    fn map_affine(&self, factor: &Rational, offset: &Rational) -> IntervalSet {
        IntervalSet {
            intervals: self
                .intervals
                .iter()
                .map(|p| Interval {
                    lo: &p.lo * factor + offset,
                    hi: &p.hi * factor + offset,
                })
                .collect(),
        }
    }

    /// Union of `copies` translated copies of `self` scaled by `1/copies`,
    /// one in each cell `[t/copies, (t+1)/copies)`.
    pub fn tile(&self, copies: u64) -> IntervalSet {
        assert!(copies >= 1);
        let factor = Rational::new(1, copies);
        let mut pieces = Vec::with_capacity(self.intervals.len() * copies as usize);
        for t in 0..copies {
            let offset = &factor * Rational::from(t);
            pieces.extend(self.map_affine(&factor, &offset).intervals);
        }
        Self::from_valid(pieces)
    }

    /// Intersection of many sets; `[0,1)` for an empty iterator.
    pub fn intersect_all<'a>(sets: impl IntoIterator<Item = &'a IntervalSet>) -> IntervalSet {
        let mut iter = sets.into_iter();
        let Some(first) = iter.next() else {
            return IntervalSet::unit();
        };
        let mut acc = first.clone();
        for s in iter {
            if acc.is_empty() {
                break;
            }
            acc = acc.intersect(s);
        }
        acc
    }
}
