use serde::{Deserialize, Serialize};

use super::constants::{Strategy, T12Constants};
use crate::bc_bounds::MeasureTable;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exact_sets::{IntervalSet, Rational};
use crate::nested_family::{build_nested_explicit_capped, check_increasing, Backend, FirstLevel, NestedParams};
use crate::tuples::walk_intersections;

/// Cursor state for the floating intervals `K_n^δ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloatCursor {
    pub position: Rational,
    /// How many times placement has run past 1 and restarted at 0.
    pub wraps: u64,
}

impl FloatCursor {
    /// Greedily takes `amount` of `free`, left to right from the cursor,
    /// wrapping at 1. The cursor moves to the end of the last piece taken.
    pub fn place(&mut self, free: &IntervalSet, amount: &Rational) -> Result<IntervalSet> {
        if free.measure() < *amount {
            return Err(Error::InsufficientRoom(format!(
                "need {amount} but only {} is free",
                free.measure()
            )));
        }
        let mut pieces = Vec::new();
        let mut left = amount.clone();
        let mut passes = 0;
        while left.is_positive() {
            if self.position >= Rational::one() || passes > 0 {
                self.position = Rational::zero();
                self.wraps += 1;
            }
            passes += 1;
            for iv in free.intervals() {
                if iv.hi <= self.position {
                    continue;
                }
                let lo = iv.lo.clone().max(self.position.clone());
                let room = &iv.hi - &lo;
                let take = room.min(left.clone());
                let hi = &lo + &take;
                left -= &take;
                self.position = hi.clone();
                pieces.push((lo, hi));
                if left.is_zero() {
                    break;
                }
            }
            debug_assert!(passes <= 2, "free measure was checked up front");
        }
        IntervalSet::canonicalize(pieces)
    }
}

/// Smallest `n` with `δ (1 + 1/2 + ... + 1/n) > 1`, i.e. the first level
/// whose floating interval cannot fit before the cursor passes 1 (ignoring
/// the gaps it has to skip). `None` if not reached by `limit`.
pub fn harmonic_wrap_index(delta: &Rational, limit: u64) -> Option<u64> {
    let mut total = Rational::zero();
    for n in 1..=limit {
        total += delta / Rational::from(n);
        if total > Rational::one() {
            return Some(n);
        }
    }
    None
}

/// Floating-point estimate of [`harmonic_wrap_index`], `e^{1/δ - γ}`.
pub fn harmonic_wrap_estimate(delta: &Rational) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    (1.0 / delta.to_f64() - EULER_GAMMA).exp()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloatPlacement {
    pub n: u32,
    #[serde(rename = "K")]
    pub set: IntervalSet,
    /// Cursor before and after placement, in unscaled coordinates.
    pub cursor_before: Rational,
    pub cursor_after: Rational,
    /// Total wraps so far, including this placement.
    pub wraps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitSets {
    #[serde(rename = "A")]
    pub a: Vec<IntervalSet>,
    #[serde(rename = "B")]
    pub b: Vec<IntervalSet>,
    pub floats: Vec<FloatPlacement>,
    /// Union of the scaled `H_n` copies inside `B_n`, one per level.
    #[serde(skip)]
    pub b_h_copies: Vec<IntervalSet>,
    /// The scaled `G_n` components of `A_n` and `B_n`, `[level][component]`.
    #[serde(skip)]
    pub a_components: Vec<Vec<IntervalSet>>,
    #[serde(skip)]
    pub b_components: Vec<Vec<IntervalSet>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct T12Family {
    pub constants: T12Constants,
    pub n_max: u32,
    pub backend: Backend,
    pub c_limsup: Rational,
    /// `d_j = Σ_{k<j} c_k`.
    pub offsets: Vec<Rational>,
    /// `d̃_j = Σ_{k<j} c̃_k`; the float lives in `[Σ c̃, 1)` at level 1.
    pub offsets_tilde: Vec<Rational>,
    pub explicit: Option<ExplicitSets>,
}

fn prefix_sums(xs: &[Rational]) -> Vec<Rational> {
    let mut acc = Rational::zero();
    xs.iter()
        .map(|x| {
            let d = acc.clone();
            acc += x;
            d
        })
        .collect()
}

pub fn build_t12_family(
    constants: &T12Constants,
    n_max: u32,
    backend: Backend,
    c_limsup: &Rational,
) -> Result<T12Family> {
    build_t12_family_capped(constants, n_max, backend, c_limsup, &Caps::default())
}

pub fn build_t12_family_capped(
    constants: &T12Constants,
    n_max: u32,
    backend: Backend,
    c_limsup: &Rational,
    caps: &Caps,
) -> Result<T12Family> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if !c_limsup.is_positive() || *c_limsup > Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "c_limsup = {c_limsup} must lie in (0,1]; at 0 the strict inequalities degenerate"
        )));
    }
    let offsets = prefix_sums(&constants.c);
    let offsets_tilde = prefix_sums(&constants.c_tilde);
    if constants.sum_c() > Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "Σ c = {} does not fit in [0,1]",
            constants.sum_c()
        )));
    }
    if constants.sum_c_tilde() + &constants.delta > Rational::one() {
        return Err(Error::InvalidParameter("Σ c̃ + δ does not fit in [0,1]".into()));
    }

    let explicit = match backend {
        Backend::Formula => None,
        Backend::Explicit => {
            if constants.strategy != Strategy::Compact {
                return Err(Error::NeedsExplicit(
                    "only compact constants can be materialized; use the formula backend".into(),
                ));
            }
            Some(materialize(constants, n_max, c_limsup, &offsets, &offsets_tilde, caps)?)
        }
    };

    Ok(T12Family {
        constants: constants.clone(),
        n_max,
        backend,
        c_limsup: c_limsup.clone(),
        offsets,
        offsets_tilde,
        explicit,
    })
}

fn materialize(
    k: &T12Constants,
    n_max: u32,
    c_limsup: &Rational,
    offsets: &[Rational],
    offsets_tilde: &[Rational],
    caps: &Caps,
) -> Result<ExplicitSets> {
    let nested =
        k.p.iter()
            .zip(&k.q)
            .map(|(p, q)| {
                let params = NestedParams::new(p.clone(), q.clone(), n_max)?;
                build_nested_explicit_capped(&params, FirstLevel::Balanced, caps)
            })
            .collect::<Result<Vec<_>>>()?;

    let place = |set: &IntervalSet, scale: &Rational, offset: &Rational| -> Result<IntervalSet> {
        set.scale_translate(scale, offset)?.scale(c_limsup)
    };

    let mut cursor = FloatCursor::default();
    let mut out = ExplicitSets {
        a: Vec::new(),
        b: Vec::new(),
        floats: Vec::new(),
        b_h_copies: Vec::new(),
        a_components: Vec::new(),
        b_components: Vec::new(),
    };
    for n in 1..=n_max {
        let mut a_parts = Vec::with_capacity(nested.len());
        let mut b_parts = Vec::with_capacity(nested.len());
        let mut h_copies = IntervalSet::empty();
        for (j, fam) in nested.iter().enumerate() {
            a_parts.push(place(fam.g(n), &k.c[j], &offsets[j])?);
            b_parts.push(place(fam.g(n), &k.c_tilde[j], &offsets_tilde[j])?);
            h_copies = h_copies.union(&fam.h(n).scale_translate(&k.c_tilde[j], &offsets_tilde[j])?);
        }
        // the float is placed in unscaled coordinates, then scaled with the rest
        let free = h_copies.complement();
        let before = cursor.position.clone();
        let float_unit = cursor.place(&free, &(&k.delta / Rational::from(n as u64)))?;
        let float = float_unit.scale(c_limsup)?;
        out.a.push(IntervalSet::union_all(&a_parts));
        out.b.push(IntervalSet::union_all(&b_parts).union(&float));
        out.floats.push(FloatPlacement {
            n,
            set: float,
            cursor_before: before,
            cursor_after: cursor.position.clone(),
            wraps: cursor.wraps,
        });
        out.b_h_copies.push(h_copies.scale(c_limsup)?);
        out.a_components.push(a_parts);
        out.b_components.push(b_parts);
    }
    Ok(out)
}

/// Exact A value and B bounds for one tuple, plus materialized values when
/// the family is explicit and the tuple is within `n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct T12Measure {
    pub indices: Vec<usize>,
    pub a: Rational,
    pub b_lower: Rational,
    pub b_upper: Rational,
    pub a_explicit: Option<Rational>,
    pub b_explicit: Option<Rational>,
}

/// Row sums `(Σ c_j p_j^r/q_j^r, Σ c̃_j p_j^r/q_j^r)` for `r = 1..=max_r`,
/// the only inputs the closed forms need besides `i_r`.
#[derive(Clone, Debug)]
pub struct RowSums {
    sums: Vec<(Rational, Rational)>,
}

impl RowSums {
    pub fn new(constants: &T12Constants, max_r: u32) -> Self {
        RowSums {
            sums: (1..=max_r).map(|r| constants.row_sums(r)).collect(),
        }
    }

    pub fn get(&self, r: u32) -> &(Rational, Rational) {
        &self.sums[r as usize - 1]
    }
}

impl T12Family {
    pub fn row_sums(&self, max_r: u32) -> RowSums {
        RowSums::new(&self.constants, max_r)
    }

    /// `(A, B_lower, B_upper)` for a tuple ending at `i_r`, given the row
    /// sums for its length `r`.
    pub fn closed_forms(&self, row: &(Rational, Rational), last: usize) -> (Rational, Rational, Rational) {
        let (lhs, rhs) = row;
        let scale = &self.c_limsup / Rational::from(last as u64);
        let a = lhs * &scale;
        let b_lower = rhs * &scale;
        let b_upper = &b_lower + &self.constants.delta * &scale;
        (a, b_lower, b_upper)
    }

    pub fn intersection_measure(&self, indices: &[usize]) -> Result<T12Measure> {
        check_increasing(indices)?;
        let r = indices.len() as u32;
        let last = *indices.last().expect("nonempty");
        let (a, b_lower, b_upper) = self.closed_forms(&self.constants.row_sums(r), last);
        let (a_explicit, b_explicit) = match &self.explicit {
            Some(sets) if last <= self.n_max as usize => (
                Some(IntervalSet::intersect_all(indices.iter().map(|&i| &sets.a[i - 1])).measure()),
                Some(IntervalSet::intersect_all(indices.iter().map(|&i| &sets.b[i - 1])).measure()),
            ),
            _ => (None, None),
        };
        Ok(T12Measure {
            indices: indices.to_vec(),
            a,
            b_lower,
            b_upper,
            a_explicit,
            b_explicit,
        })
    }

    /// `K_n^δ`, as placed during construction.
    pub fn floating_interval(&self, n: u32) -> Result<&IntervalSet> {
        let sets = self
            .explicit
            .as_ref()
            .ok_or_else(|| Error::NeedsExplicit("floating intervals exist only on the explicit backend".into()))?;
        sets.floats
            .get(n as usize - 1)
            .map(|f| &f.set)
            .ok_or_else(|| Error::InvalidParameter(format!("level {n} beyond n_max = {}", self.n_max)))
    }

    /// `Σ_j c_j / N`: `⋃_{i>=N} A_i` lies in the scaled copies of `H_N`.
    pub fn tail_bound(&self, start: u32) -> Rational {
        &self.c_limsup * self.constants.sum_c() / Rational::from(start as u64)
    }

    /// `δ (1 + 1/2 + ... + 1/n)`, scaled: total float mass through level `n`.
    pub fn float_mass_through(&self, n: u32) -> Rational {
        let harmonic: Rational = (1..=n as u64).map(|k| Rational::new(1, k)).sum();
        &self.c_limsup * &self.constants.delta * harmonic
    }

    /// Closed-form A table over `1..=n` with tuples up to `max_len`.
    pub fn formula_table_a(&self, n: usize, max_len: usize) -> Result<MeasureTable> {
        self.formula_table(n, max_len, |a, _, _| a)
    }

    /// B lower bounds (the G components alone).
    pub fn formula_table_b_lower(&self, n: usize, max_len: usize) -> Result<MeasureTable> {
        self.formula_table(n, max_len, |_, lo, _| lo)
    }

    /// B upper bounds (components plus the whole float of the last index).
    pub fn formula_table_b_upper(&self, n: usize, max_len: usize) -> Result<MeasureTable> {
        self.formula_table(n, max_len, |_, _, hi| hi)
    }

    fn formula_table(
        &self,
        n: usize,
        max_len: usize,
        pick: impl Fn(Rational, Rational, Rational) -> Rational,
    ) -> Result<MeasureTable> {
        let max_len = max_len.min(n);
        let sums = self.row_sums(max_len as u32);
        let mut entries = Vec::new();
        for len in 1..=max_len {
            for tuple in crate::tuples::combinations(n, len) {
                let (a, lo, hi) = self.closed_forms(sums.get(len as u32), *tuple.last().expect("nonempty"));
                entries.push((tuple, pick(a, lo, hi)));
            }
        }
        MeasureTable::from_entries(entries)
    }

    /// Exact tables of the materialized A and B sets.
    pub fn explicit_tables(&self, max_len: usize, max_span: Option<usize>) -> Result<(MeasureTable, MeasureTable)> {
        let sets = self
            .explicit
            .as_ref()
            .ok_or_else(|| Error::NeedsExplicit("measure tables of sets need the explicit backend".into()))?;
        Ok((
            MeasureTable::from_sets(&sets.a, max_len, max_span),
            MeasureTable::from_sets(&sets.b, max_len, max_span),
        ))
    }
}

/// Walks every tuple of `1..=n_max` (lengths up to `max_len`) on the
/// materialized pair, calling `visit(tuple, μ(∩A), μ(∩B))`.
pub(crate) fn walk_explicit(sets: &ExplicitSets, max_len: usize, mut visit: impl FnMut(&[usize], Rational, Rational)) {
    let pairs: Vec<(IntervalSet, IntervalSet)> = sets.a.iter().cloned().zip(sets.b.iter().cloned()).collect();
    walk_intersections(&pairs, max_len, None, |t, (ia, ib): &(IntervalSet, IntervalSet)| {
        visit(t, ia.measure(), ib.measure())
    });
}
