//! Nested systems `H_1 ⊇ H_2 ⊇ ...` with `μ(H_n) = 1/n`, and selections
//! `G_n ⊆ H_n` keeping a `p/q` fraction, arranged so that
//! `μ(G_{i_1} ∩ ... ∩ G_{i_n}) = p^n / (q^n i_n)`.
//!
//! `H_{n+1}` places `q` children of length `1/((n+1) q^n)` left-justified in
//! every interval of `H_n`, with left endpoints `1/(n q^n)` apart. For
//! `n >= 2`, `G_n` keeps the first `p` of every `q` consecutive intervals of
//! `H_n`; since each parent has exactly `q` children, groups align with
//! parents and every level selects on its own "digit".
//!
//! `G_1` needs a digit of its own. Taking `[0, p/q)` would select the same
//! children as `G_2`, so by default `G_1` instead keeps the left `p/q` of
//! every elementary piece cut out by the endpoints of `H_1..H_depth`
//! ([`FirstLevel::Balanced`]). The plain prefix is still available as
//! [`FirstLevel::Literal`].

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exact_sets::{big_decimal, IntervalSet, Rational};
use crate::tuples::{walk_intersections_from, Mismatch};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedParams {
    #[serde(with = "big_decimal")]
    pub p: BigInt,
    #[serde(with = "big_decimal")]
    pub q: BigInt,
    pub depth: u32,
}

impl NestedParams {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, depth: u32) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if !p.is_positive() || !q.is_positive() {
            return Err(Error::InvalidParameter(format!("p = {p} and q = {q} must be positive")));
        }
        if p > q {
            return Err(Error::InvalidParameter(format!("p = {p} exceeds q = {q}")));
        }
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be at least 1".into()));
        }
        Ok(NestedParams { p, q, depth })
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }

    /// Number of intervals in `H_depth`, i.e. `q^{depth-1}`.
    pub fn deepest_level_size(&self) -> BigInt {
        num_traits::pow(self.q.clone(), (self.depth - 1) as usize)
    }

    fn check_explicit(&self, caps: &Caps) -> Result<(u64, u64)> {
        let size = self.deepest_level_size();
        if size > BigInt::from(caps.max_intervals) {
            return Err(Error::ResourceCap(format!(
                "H_{} would hold {} intervals (cap {}); use the formula backend",
                self.depth, size, caps.max_intervals
            )));
        }
        // q^{depth-1} fits, so q does unless depth = 1
        let q = self
            .q
            .to_u64()
            .ok_or_else(|| Error::ResourceCap(format!("q = {} too large", self.q)))?;
        let p = self.p.to_u64().expect("p <= q");
        Ok((p, q))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FirstLevel {
    #[default]
    Balanced,
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Explicit,
    Formula,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Backend::Explicit),
            "formula" => Ok(Backend::Formula),
            other => Err(Error::Parse(format!(
                "unknown backend {other:?} (expected explicit|formula)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedLevel {
    pub n: u32,
    #[serde(rename = "H")]
    pub h: IntervalSet,
    #[serde(rename = "G")]
    pub g: IntervalSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedFamily {
    pub params: NestedParams,
    pub first_level: FirstLevel,
    pub levels: Vec<NestedLevel>,
}

impl NestedFamily {
    pub fn h(&self, n: u32) -> &IntervalSet {
        &self.levels[n as usize - 1].h
    }

    pub fn g(&self, n: u32) -> &IntervalSet {
        &self.levels[n as usize - 1].g
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn intersection_measure(&self, indices: &[usize]) -> Rational {
        IntervalSet::intersect_all(indices.iter().map(|&i| &self.levels[i - 1].g)).measure()
    }
}

pub fn build_nested_explicit(params: &NestedParams, first_level: FirstLevel) -> Result<NestedFamily> {
    build_nested_explicit_capped(params, first_level, &Caps::default())
}

pub fn build_nested_explicit_capped(
    params: &NestedParams,
    first_level: FirstLevel,
    caps: &Caps,
) -> Result<NestedFamily> {
    let (p, q) = params.check_explicit(caps)?;
    let ratio = params.ratio();

    // left endpoints of H_n; every interval of H_n has length 1/(n q^{n-1})
    let mut lefts = vec![Rational::zero()];
    let mut levels = Vec::with_capacity(params.depth as usize);
    let mut h_pieces: Vec<Vec<(Rational, Rational)>> = Vec::new();
    for n in 1..=params.depth {
        if n > 1 {
            let prev = n - 1;
            let step = Rational::new(1, BigInt::from(prev) * num_traits::pow(BigInt::from(q), prev as usize));
            let mut next = Vec::with_capacity(lefts.len() * q as usize);
            for lo in &lefts {
                for k in 0..q {
                    next.push(lo + &step * Rational::from(k));
                }
            }
            lefts = next;
        }
        let len = Rational::new(1, BigInt::from(n) * num_traits::pow(BigInt::from(q), (n - 1) as usize));
        let pieces: Vec<(Rational, Rational)> = lefts.iter().map(|lo| (lo.clone(), lo + &len)).collect();
        let h = IntervalSet::canonicalize(pieces.iter().cloned())?;
        let g = if n == 1 {
            IntervalSet::interval(Rational::zero(), ratio.clone())?
        } else {
            IntervalSet::canonicalize(
                pieces
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (*i as u64) % q < p)
                    .map(|(_, iv)| iv.clone()),
            )?
        };
        h_pieces.push(pieces);
        levels.push(NestedLevel { n, h, g });
    }

    if first_level == FirstLevel::Balanced && p < q && params.depth > 1 {
        levels[0].g = balanced_first_level(&h_pieces, &ratio)?;
    }

    Ok(NestedFamily {
        params: params.clone(),
        first_level,
        levels,
    })
}

/// Left `ratio` fraction of each piece of `[0,1)` between consecutive
/// endpoints of any interval of any level.
fn balanced_first_level(levels: &[Vec<(Rational, Rational)>], ratio: &Rational) -> Result<IntervalSet> {
    let mut points: Vec<Rational> = levels
        .iter()
        .flatten()
        .flat_map(|(lo, hi)| [lo.clone(), hi.clone()])
        .collect();
    points.push(Rational::zero());
    points.push(Rational::one());
    points.sort();
    points.dedup();
    IntervalSet::canonicalize(points.windows(2).map(|w| {
        let width = &w[1] - &w[0];
        (w[0].clone(), &w[0] + width * ratio)
    }))
}

/// `p^n / (q^n i_n)` for a strictly increasing tuple of length `n`.
pub fn nested_intersection_measure_formula(params: &NestedParams, indices: &[usize]) -> Result<Rational> {
    check_increasing(indices)?;
    let n = indices.len() as u32;
    let last = *indices.last().expect("nonempty") as u64;
    Ok(params.ratio().pow(n) / Rational::from(last))
}

pub(crate) fn check_increasing(indices: &[usize]) -> Result<()> {
    if indices.is_empty() || indices[0] == 0 || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotIncreasing(indices.to_vec()));
    }
    Ok(())
}

pub fn h_measure(n: u32) -> Rational {
    Rational::new(1, n)
}

pub fn g_measure(params: &NestedParams, n: u32) -> Rational {
    params.ratio() / Rational::from(n as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    #[serde(rename = "N")]
    pub start: u32,
    /// `μ(G_N ∪ ... ∪ G_depth)`.
    pub union_measure: Rational,
    /// `1/N`.
    pub bound: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedReport {
    #[serde(with = "big_decimal")]
    pub p: BigInt,
    #[serde(with = "big_decimal")]
    pub q: BigInt,
    pub depth: u32,
    pub first_level: FirstLevel,
    pub pass: bool,
    pub checked_tuples: usize,
    pub mismatches: usize,
    pub witness: Option<Mismatch>,
    /// `μ(H_n) = 1/n` and `μ(G_n) = p/(qn)` at every level.
    pub measures_ok: bool,
    /// `H_{n+1} ⊆ H_n` and `G_n ⊆ H_n`.
    pub nesting_ok: bool,
    pub tail_bounds: Vec<TailBound>,
}

pub fn verify_nested(params: &NestedParams) -> Result<NestedReport> {
    Ok(verify_nested_family(&build_nested_explicit(
        params,
        FirstLevel::Balanced,
    )?))
}

/// Checks a materialized family (possibly altered after construction)
/// against the closed forms, over every increasing tuple of levels.
pub fn verify_nested_family(family: &NestedFamily) -> NestedReport {
    let params = &family.params;
    let depth = family.depth() as usize;
    let sets: Vec<IntervalSet> = family.levels.iter().map(|l| l.g.clone()).collect();
    let per_first: Vec<(usize, usize, Option<Mismatch>)> = (1..=depth)
        .into_par_iter()
        .map(|first| {
            let (mut checked, mut bad, mut witness) = (0, 0, None);
            walk_intersections_from(&sets, first, depth, None, |tuple, inter: &IntervalSet| {
                checked += 1;
                let lhs = inter.measure();
                let rhs = nested_intersection_measure_formula(params, tuple).expect("walk yields increasing tuples");
                if lhs != rhs {
                    bad += 1;
                    witness.get_or_insert(Mismatch {
                        indices: tuple.to_vec(),
                        lhs,
                        rhs,
                    });
                }
            });
            (checked, bad, witness)
        })
        .collect();
    let checked_tuples = per_first.iter().map(|x| x.0).sum();
    let mismatches = per_first.iter().map(|x| x.1).sum();
    let witness = per_first.into_iter().find_map(|x| x.2);

    let measures_ok = family
        .levels
        .iter()
        .all(|l| l.h.measure() == h_measure(l.n) && l.g.measure() == g_measure(params, l.n));
    let nesting_ok = family.levels.iter().all(|l| l.g.is_subset(&l.h))
        && family.levels.windows(2).all(|w| w[1].h.is_subset(&w[0].h));

    let mut tail_bounds = Vec::with_capacity(depth);
    let mut acc = IntervalSet::empty();
    for level in family.levels.iter().rev() {
        acc = acc.union(&level.g);
        let bound = h_measure(level.n);
        let union_measure = acc.measure();
        tail_bounds.push(TailBound {
            start: level.n,
            holds: union_measure <= bound,
            union_measure,
            bound,
        });
    }
    tail_bounds.reverse();

    NestedReport {
        p: params.p.clone(),
        q: params.q.clone(),
        depth: family.depth(),
        first_level: family.first_level,
        pass: mismatches == 0 && measures_ok && nesting_ok && tail_bounds.iter().all(|t| t.holds),
        checked_tuples,
        mismatches,
        witness,
        measures_ok,
        nesting_ok,
        tail_bounds,
    }
}

/// Closed-form intersection measures for every increasing tuple of
/// `1..=depth`, as stored by the formula backend.
pub fn formula_table(params: &NestedParams, max_len: usize) -> Result<crate::bc_bounds::MeasureTable> {
    let depth = params.depth as usize;
    let mut entries = Vec::new();
    for len in 1..=max_len.min(depth) {
        for tuple in crate::tuples::combinations(depth, len) {
            let m = nested_intersection_measure_formula(params, &tuple)?;
            entries.push((tuple, m));
        }
    }
    crate::bc_bounds::MeasureTable::from_entries(entries)
}

/// `true` when `p == q`, where every level keeps all of `H_n`.
pub fn selects_everything(params: &NestedParams) -> bool {
    params.p == params.q || (params.q.is_one() && !params.p.is_zero())
}
