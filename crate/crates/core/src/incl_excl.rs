//! Union measures from intersection tables alone, by inclusion–exclusion,
//! and the two finite comparison checks built on them:
//!
//! * entry-wise equal tables give equal union measures on every range;
//! * tables whose odd-length entries dominate and even-length entries are
//!   dominated give ordered union measures on every range.
//!
//! Ranges are `[k, n]` with `n - k + 1` capped (20 by default), since the
//! alternating sum has `2^{n-k+1} - 1` terms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc_bounds::MeasureTable;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exact_sets::{IntervalSet, Rational};
use crate::tuples::{combinations, Mismatch};

fn check_range(k: usize, n: usize, max_width: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "range [{k}, {n}] is empty or not 1-based"
        )));
    }
    if n - k + 1 > max_width {
        return Err(Error::ResourceCap(format!(
            "range [{k}, {n}] has width {} above the cap {max_width}",
            n - k + 1
        )));
    }
    Ok(())
}

/// Every nonempty increasing tuple inside `[k, n]`, shortest first.
fn tuples_in(k: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let width = n - k + 1;
    (1..=width).flat_map(move |len| combinations(width, len).map(move |t| t.into_iter().map(|i| i + k - 1).collect()))
}

/// `μ(⋃_{i=k}^n A_i) = Σ_{S ⊆ [k,n], S ≠ ∅} (-1)^{|S|+1} μ(⋂_{i∈S} A_i)`.
pub fn union_by_inclusion_exclusion(table: &MeasureTable, k: usize, n: usize) -> Result<Rational> {
    union_by_inclusion_exclusion_capped(table, k, n, Caps::default().max_range_width)
}

pub fn union_by_inclusion_exclusion_capped(
    table: &MeasureTable,
    k: usize,
    n: usize,
    max_width: usize,
) -> Result<Rational> {
    check_range(k, n, max_width)?;
    let width = n - k + 1;
    let per_len: Vec<Rational> = (1..=width)
        .into_par_iter()
        .map(|len| {
            let mut sum = Rational::zero();
            for t in combinations(width, len) {
                let tuple: Vec<usize> = t.into_iter().map(|i| i + k - 1).collect();
                sum += table.require(&tuple)?;
            }
            Ok(if len % 2 == 1 { sum } else { -sum })
        })
        .collect::<Result<_>>()?;
    Ok(per_len.into_iter().sum())
}

/// Direct measure of `A_k ∪ ... ∪ A_n`, the oracle for the alternating sum.
pub fn direct_union_measure(sets: &[IntervalSet], k: usize, n: usize) -> Rational {
    IntervalSet::union_all(&sets[k - 1..n]).measure()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Union measures agree.
    Equal,
    /// `lhs > rhs`.
    LhsGreater,
    /// The tables disagree inside the range, so equality is not implied;
    /// the witness names the first differing tuple.
    TablesDiffer,
    /// The implication failed.
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionComparison {
    pub k: usize,
    pub n: usize,
    pub lhs_union: Rational,
    pub rhs_union: Rational,
    pub relation: Relation,
    pub witness: Option<Mismatch>,
}

/// Ranges `[k, n]` with `k <= k_max`, `n <= n_max`, width at most `max_width`.
fn ranges(k_max: usize, n_max: usize, max_width: usize) -> Vec<(usize, usize)> {
    (1..=k_max.min(n_max))
        .flat_map(|k| (k..=n_max.min(k + max_width - 1)).map(move |n| (k, n)))
        .collect()
}

fn first_difference(a: &MeasureTable, b: &MeasureTable, k: usize, n: usize) -> Result<Option<Mismatch>> {
    for tuple in tuples_in(k, n) {
        let (lhs, rhs) = (a.require(&tuple)?, b.require(&tuple)?);
        if lhs != rhs {
            return Ok(Some(Mismatch {
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                indices: tuple,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm13Report {
    pub pass: bool,
    pub k_max: usize,
    pub n_max: usize,
    pub max_width: usize,
    pub equal_ranges: usize,
    pub differing_ranges: usize,
    pub violations: usize,
    pub comparisons: Vec<UnionComparison>,
}

/// For each range: if both tables agree on every tuple inside it, the two
/// union measures must be equal (else `Violated`). Ranges where the tables
/// differ are reported as `TablesDiffer` with the first differing tuple.
pub fn verify_thm13(
    a: &MeasureTable,
    b: &MeasureTable,
    k_max: usize,
    n_max: usize,
    max_width: usize,
) -> Result<Thm13Report> {
    if max_width == 0 {
        return Err(Error::InvalidParameter("range width cap must be positive".into()));
    }
    let comparisons = ranges(k_max, n_max, max_width)
        .into_par_iter()
        .map(|(k, n)| {
            let lhs_union = union_by_inclusion_exclusion_capped(a, k, n, max_width)?;
            let rhs_union = union_by_inclusion_exclusion_capped(b, k, n, max_width)?;
            let witness = first_difference(a, b, k, n)?;
            let relation = match (&witness, lhs_union == rhs_union) {
                (Some(_), _) => Relation::TablesDiffer,
                (None, true) => Relation::Equal,
                (None, false) => Relation::Violated,
            };
            Ok(UnionComparison {
                k,
                n,
                lhs_union,
                rhs_union,
                relation,
                witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let count = |r: Relation| comparisons.iter().filter(|c| c.relation == r).count();
    let violations = count(Relation::Violated);
    Ok(Thm13Report {
        pass: violations == 0,
        k_max,
        n_max,
        max_width,
        equal_ranges: count(Relation::Equal),
        differing_ranges: count(Relation::TablesDiffer),
        violations,
        comparisons,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisWitness {
    pub indices: Vec<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
    /// `"lhs >= rhs"` for odd length, `"lhs <= rhs"` for even.
    pub required: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm14Report {
    pub pass: bool,
    pub k_max: usize,
    pub n_max: usize,
    pub max_width: usize,
    pub hypothesis_holds: bool,
    pub hypothesis_witness: Option<HypothesisWitness>,
    pub violations: usize,
    /// Empty when the hypothesis fails; no union is compared then.
    pub comparisons: Vec<UnionComparison>,
}

/// First checks, on every tuple the ranges use, that odd-length entries of
/// `a` are at least those of `b` and even-length ones at most. Only then
/// compares `μ_a(⋃_{i=k}^n) >= μ_b(⋃_{i=k}^n)` on each range.
pub fn verify_thm14(
    a: &MeasureTable,
    b: &MeasureTable,
    k_max: usize,
    n_max: usize,
    max_width: usize,
) -> Result<Thm14Report> {
    if max_width == 0 {
        return Err(Error::InvalidParameter("range width cap must be positive".into()));
    }
    let all_ranges = ranges(k_max, n_max, max_width);
    // the widest range starting at each k covers every tuple the others use
    let mut widest: Vec<(usize, usize)> = Vec::new();
    for &(k, n) in &all_ranges {
        match widest.last_mut() {
            Some(last) if last.0 == k => last.1 = n,
            _ => widest.push((k, n)),
        }
    }
    let mut hypothesis_witness = None;
    'outer: for &(k, n) in &widest {
        for tuple in tuples_in(k, n).filter(|t| t[0] == k) {
            let (lhs, rhs) = (a.require(&tuple)?, b.require(&tuple)?);
            let odd = tuple.len() % 2 == 1;
            if (odd && lhs < rhs) || (!odd && lhs > rhs) {
                hypothesis_witness = Some(HypothesisWitness {
                    required: if odd { "lhs >= rhs" } else { "lhs <= rhs" }.to_string(),
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    indices: tuple,
                });
                break 'outer;
            }
        }
    }
    if hypothesis_witness.is_some() {
        return Ok(Thm14Report {
            pass: false,
            k_max,
            n_max,
            max_width,
            hypothesis_holds: false,
            hypothesis_witness,
            violations: 0,
            comparisons: Vec::new(),
        });
    }

    let comparisons = all_ranges
        .into_par_iter()
        .map(|(k, n)| {
            let lhs_union = union_by_inclusion_exclusion_capped(a, k, n, max_width)?;
            let rhs_union = union_by_inclusion_exclusion_capped(b, k, n, max_width)?;
            let relation = match lhs_union.cmp(&rhs_union) {
                std::cmp::Ordering::Equal => Relation::Equal,
                std::cmp::Ordering::Greater => Relation::LhsGreater,
                std::cmp::Ordering::Less => Relation::Violated,
            };
            Ok(UnionComparison {
                k,
                n,
                lhs_union,
                rhs_union,
                relation,
                witness: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = comparisons.iter().filter(|c| c.relation == Relation::Violated).count();
    Ok(Thm14Report {
        pass: violations == 0,
        k_max,
        n_max,
        max_width,
        hypothesis_holds: true,
        hypothesis_witness: None,
        violations,
        comparisons,
    })
}
