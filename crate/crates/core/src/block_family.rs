//! Block-by-block construction of two sequences `(A_i)`, `(B_i)` with equal
//! `l`-wise intersection measures for every `l <= m`, where the union of each
//! A-block shrinks by the factor `1 - 2^-m` while every B-block covers the
//! whole interval.
//!
//! Block 1 is a parity family (`A = C`, `B = D`). Block `k+1` has
//! `(m+1)^{k+1}` members: for each member `A_i` of block `k` and each
//! `1 <= j <= m+1`, the set `E_j^{k+1} ∩ A_i`, where the replicator
//! `E_j^{k+1}` tiles a copy of `C_j` shrunk by `2^{km}` into every dyadic
//! cell of length `2^{-km}`. The B side uses `D_j` in the same way.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc_bounds::MeasureTable;
use crate::error::{Error, Result};
use crate::exact_sets::{IntervalSet, Rational};
use crate::parity_family::{build_parity_family, ParityFamily};
use crate::tuples::{combinations, walk_intersections_from, Mismatch};

/// Largest total number of sets [`build_block_family`] will materialize.
pub const MAX_BLOCK_SETS: usize = 20_000;
/// Finest dyadic resolution exponent `K·m` allowed.
pub const MAX_BLOCK_RESOLUTION: u32 = 20;

/// `Σ_{r=1}^{k} (m+1)^r`, the index of the last set in block `k`.
pub fn block_end(m: u32, k: u32) -> usize {
    let base = m as usize + 1;
    (1..=k).map(|r| base.pow(r)).sum()
}

/// First and last (1-based, inclusive) index of block `k >= 1`.
pub fn block_bounds(m: u32, k: u32) -> (usize, usize) {
    assert!(k >= 1, "blocks are numbered from 1");
    (block_end(m, k - 1) + 1, block_end(m, k))
}

/// Which block an index falls in.
pub fn block_of(m: u32, n: usize) -> u32 {
    assert!(n >= 1);
    let mut k = 1;
    while block_end(m, k) < n {
        k += 1;
    }
    k
}

/// Result of [`index_maps`] for an index `n` in block `k+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMap {
    /// Index of the parent set in block `k`.
    pub f: usize,
    /// Which replicator `E_g^{k+1}` (or `F_g^{k+1}`) the parent is cut by.
    pub g: usize,
    /// The parent block `k`; `n` lies in block `k + 1`.
    pub k: u32,
}

/// Writes `n = S_k + (m+1)(i-1) + j` and returns `f = S_{k-1} + i`, `g = j`,
/// so that `A_n = E_g^{k+1} ∩ A_f`.
pub fn index_maps(m: u32, n: usize) -> Result<IndexMap> {
    if n == 0 {
        return Err(Error::InvalidParameter("indices are 1-based".into()));
    }
    let block = block_of(m, n);
    if block == 1 {
        return Err(Error::NoPredecessor { index: n });
    }
    let k = block - 1;
    let width = m as usize + 1;
    let offset = n - block_end(m, k) - 1;
    let i = offset / width + 1;
    let j = offset % width + 1;
    Ok(IndexMap {
        f: block_end(m, k - 1) + i,
        g: j,
        k,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFamily {
    pub m: u32,
    #[serde(rename = "K")]
    pub blocks: u32,
    pub c: Rational,
    #[serde(rename = "A")]
    pub a: Vec<IntervalSet>,
    #[serde(rename = "B")]
    pub b: Vec<IntervalSet>,
    #[serde(skip)]
    pub base: Option<ParityFamily>,
}

/// Replicators `E_j^{level}` and `F_j^{level}` for `j = 1..=m+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replicators {
    pub level: u32,
    pub e: Vec<IntervalSet>,
    pub f: Vec<IntervalSet>,
}

/// Builds the replicators of the given level (`>= 2`) at unit scale.
pub fn replicators(base: &ParityFamily, level: u32) -> Replicators {
    assert!(level >= 2, "replicators start at level 2");
    let copies = 1u64 << ((level - 1) * base.m);
    Replicators {
        level,
        e: base.c.iter().map(|s| s.tile(copies)).collect(),
        f: base.d.iter().map(|s| s.tile(copies)).collect(),
    }
}

pub fn build_block_family(m: u32, blocks: u32, c: &Rational) -> Result<BlockFamily> {
    if m == 0 || blocks == 0 {
        return Err(Error::InvalidParameter("block family needs m >= 1 and K >= 1".into()));
    }
    if c.is_negative() || *c > Rational::one() {
        return Err(Error::InvalidParameter(format!("scaling c = {c} outside [0,1]")));
    }
    let total = (1..=blocks).try_fold(0usize, |acc, r| {
        (m as usize + 1).checked_pow(r).and_then(|x| acc.checked_add(x))
    });
    match total {
        Some(t) if t <= MAX_BLOCK_SETS && blocks * m <= MAX_BLOCK_RESOLUTION => {}
        _ => {
            return Err(Error::ResourceCap(format!(
                "m = {m}, K = {blocks} needs more than {MAX_BLOCK_SETS} sets or resolution beyond 2^-{MAX_BLOCK_RESOLUTION}"
            )))
        }
    }

    let base = build_parity_family(m)?;
    let mut a = base.c.clone();
    let mut b = base.d.clone();
    for k in 1..blocks {
        let reps = replicators(&base, k + 1);
        let (start, end) = block_bounds(m, k);
        let next: Vec<(IntervalSet, IntervalSet)> = (start..=end)
            .into_par_iter()
            .flat_map_iter(|parent| {
                let (pa, pb) = (&a[parent - 1], &b[parent - 1]);
                reps.e
                    .iter()
                    .zip(&reps.f)
                    .map(move |(e, f)| (e.intersect(pa), f.intersect(pb)))
            })
            .collect();
        for (na, nb) in next {
            a.push(na);
            b.push(nb);
        }
    }

    if !c.is_one() {
        a = a.iter().map(|s| s.scale(c)).collect::<Result<_>>()?;
        b = b.iter().map(|s| s.scale(c)).collect::<Result<_>>()?;
    }

    Ok(BlockFamily {
        m,
        blocks,
        c: c.clone(),
        a,
        b,
        base: Some(base),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

impl BlockFamily {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.c.is_zero()
    }

    pub fn sets(&self, side: Side) -> &[IntervalSet] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    fn base(&self) -> ParityFamily {
        match &self.base {
            Some(b) => b.clone(),
            None => build_parity_family(self.m).expect("m was validated at construction"),
        }
    }

    /// Replicators of the given level, scaled by `c` like the family itself.
    pub fn scaled_replicators(&self, level: u32) -> Result<Replicators> {
        let reps = replicators(&self.base(), level);
        Ok(Replicators {
            level,
            e: reps.e.iter().map(|s| s.scale(&self.c)).collect::<Result<_>>()?,
            f: reps.f.iter().map(|s| s.scale(&self.c)).collect::<Result<_>>()?,
        })
    }

    pub fn intersection_measure(&self, side: Side, indices: &[usize]) -> Rational {
        let sets = self.sets(side);
        IntervalSet::intersect_all(indices.iter().map(|&i| &sets[i - 1])).measure()
    }

    pub fn block_union(&self, side: Side, k: u32) -> IntervalSet {
        let (start, end) = block_bounds(self.m, k);
        IntervalSet::union_all(&self.sets(side)[start - 1..end])
    }

    /// Measure table of one side, over tuples of length up to `max_len`
    /// (and span up to `max_span`, if given).
    pub fn measure_table(&self, side: Side, max_len: usize, max_span: Option<usize>) -> MeasureTable {
        MeasureTable::from_sets(self.sets(side), max_len, max_span)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub m: u32,
    pub blocks: u32,
    pub l_max: usize,
    pub pass: bool,
    pub checked_tuples: usize,
    pub mismatches: usize,
    /// First mismatching tuple in lexicographic order.
    pub witness: Option<Mismatch>,
    /// `c = 0`: every set is empty and all equalities hold trivially.
    pub degenerate: bool,
}

/// Compares `μ(A_{i_1} ∩ ... ∩ A_{i_l})` with the B counterpart for every
/// increasing tuple of length `1..=l_max` over all built indices.
pub fn verify_block_equalities(family: &BlockFamily, l_max: usize) -> BlockReport {
    let pairs: Vec<(IntervalSet, IntervalSet)> = family.a.iter().cloned().zip(family.b.iter().cloned()).collect();
    let per_first: Vec<(usize, usize, Option<Mismatch>)> = (1..=pairs.len())
        .into_par_iter()
        .map(|first| {
            let mut checked = 0usize;
            let mut bad = 0usize;
            let mut witness = None;
            walk_intersections_from(
                &pairs,
                first,
                l_max,
                None,
                |tuple, (ia, ib): &(IntervalSet, IntervalSet)| {
                    checked += 1;
                    let (lhs, rhs) = (ia.measure(), ib.measure());
                    if lhs != rhs {
                        bad += 1;
                        if witness.is_none() {
                            witness = Some(Mismatch {
                                indices: tuple.to_vec(),
                                lhs,
                                rhs,
                            });
                        }
                    }
                },
            );
            (checked, bad, witness)
        })
        .collect();
    let checked_tuples = per_first.iter().map(|p| p.0).sum();
    let mismatches = per_first.iter().map(|p| p.1).sum();
    let witness = per_first.into_iter().find_map(|p| p.2);
    BlockReport {
        m: family.m,
        blocks: family.blocks,
        l_max,
        pass: mismatches == 0,
        checked_tuples,
        mismatches,
        witness,
        degenerate: family.is_degenerate(),
    }
}

/// First tuple of exactly `len` indices (lexicographic order) whose A and B
/// intersection measures differ.
pub fn find_first_mismatch(family: &BlockFamily, len: usize) -> Option<Mismatch> {
    combinations(family.len(), len).find_map(|tuple| {
        let lhs = family.intersection_measure(Side::A, &tuple);
        let rhs = family.intersection_measure(Side::B, &tuple);
        (lhs != rhs).then_some(Mismatch {
            indices: tuple,
            lhs,
            rhs,
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceCheck {
    pub level: u32,
    pub j: usize,
    pub indices: Vec<usize>,
    /// False when some index is not in a block below `level`; the identity
    /// is then not asserted.
    pub precondition_ok: bool,
    pub holds_a: bool,
    pub holds_b: bool,
    pub e_measure: Rational,
    pub f_measure: Rational,
    pub lhs_a: Rational,
    pub rhs_a: Rational,
    pub lhs_b: Rational,
    pub rhs_b: Rational,
}

/// Checks `μ(E_j ∩ A_{i_1} ∩ ... ∩ A_{i_s}) = μ(E_j) μ(A_{i_1} ∩ ... ∩ A_{i_s})`
/// and the F/B analogue. For a scaled family all measures are taken relative
/// to the ambient interval `[0,c)`, i.e. the left side is multiplied by `c`.
pub fn verify_replicator_independence(
    family: &BlockFamily,
    level: u32,
    indices: &[usize],
    j: usize,
) -> Result<IndependenceCheck> {
    if level < 2 || level > family.blocks.max(1) + 1 {
        return Err(Error::InvalidParameter(format!(
            "replicator level {level} out of range"
        )));
    }
    if j == 0 || j > family.m as usize + 1 {
        return Err(Error::InvalidParameter(format!(
            "replicator index j = {j} out of range"
        )));
    }
    let limit = block_end(family.m, level - 1).min(family.len());
    let precondition_ok = indices.iter().all(|&i| i >= 1 && i <= limit);
    let reps = family.scaled_replicators(level)?;
    let (e, f) = (&reps.e[j - 1], &reps.f[j - 1]);
    let e_measure = e.measure();
    let f_measure = f.measure();

    let mut check = IndependenceCheck {
        level,
        j,
        indices: indices.to_vec(),
        precondition_ok,
        holds_a: false,
        holds_b: false,
        e_measure: e_measure.clone(),
        f_measure: f_measure.clone(),
        lhs_a: Rational::zero(),
        rhs_a: Rational::zero(),
        lhs_b: Rational::zero(),
        rhs_b: Rational::zero(),
    };
    if !precondition_ok {
        return Ok(check);
    }
    let ambient = if family.is_degenerate() {
        Rational::one()
    } else {
        family.c.clone()
    };
    let side = |rep: &IntervalSet, rep_measure: &Rational, sets: &[IntervalSet]| {
        let base = IntervalSet::intersect_all(indices.iter().map(|&i| &sets[i - 1]));
        let base = if indices.is_empty() { IntervalSet::unit() } else { base };
        let lhs = rep.intersect(&base).measure() * &ambient;
        let rhs = rep_measure * base.measure();
        (lhs, rhs)
    };
    let (lhs_a, rhs_a) = side(e, &e_measure, &family.a);
    let (lhs_b, rhs_b) = side(f, &f_measure, &family.b);
    check.holds_a = if indices.is_empty() {
        rep_alone(e, &e_measure)
    } else {
        lhs_a == rhs_a
    };
    check.holds_b = if indices.is_empty() {
        rep_alone(f, &f_measure)
    } else {
        lhs_b == rhs_b
    };
    check.lhs_a = lhs_a;
    check.rhs_a = rhs_a;
    check.lhs_b = lhs_b;
    check.rhs_b = rhs_b;
    Ok(check)
}

/// Empty tuple: the identity reads `μ(E ∩ [0,1)) = μ(E)`.
fn rep_alone(rep: &IntervalSet, rep_measure: &Rational) -> bool {
    rep.intersect(&IntervalSet::unit()).measure() == *rep_measure
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockUnion {
    pub k: u32,
    pub a: Rational,
    pub b: Rational,
    /// `c (1 - 2^-m)^k`.
    pub expected_a: Rational,
    /// `c`.
    pub expected_b: Rational,
}

pub fn tail_union_measures(family: &BlockFamily) -> Vec<BlockUnion> {
    let shrink = Rational::one() - Rational::dyadic(family.m);
    (1..=family.blocks)
        .map(|k| BlockUnion {
            k,
            a: family.block_union(Side::A, k).measure(),
            b: family.block_union(Side::B, k).measure(),
            expected_a: &family.c * shrink.pow(k),
            expected_b: family.c.clone(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Each A-block union lies inside the previous one.
    pub nested: bool,
    /// `A_n = E_{g(n)} ∩ A_{f(n)}` and `B_n = F_{g(n)} ∩ B_{f(n)}` for every
    /// `n` past block 1.
    pub recurrence: bool,
    /// Block-union measures equal their closed forms.
    pub unions_match: bool,
}

pub fn verify_block_structure(family: &BlockFamily) -> Result<StructureReport> {
    let nested = (1..family.blocks).all(|k| {
        family
            .block_union(Side::A, k + 1)
            .is_subset(&family.block_union(Side::A, k))
    });
    let mut recurrence = true;
    for level in 2..=family.blocks {
        let reps = family.scaled_replicators(level)?;
        let (start, end) = block_bounds(family.m, level);
        recurrence &= (start..=end).into_par_iter().all(|n| {
            let map = index_maps(family.m, n).expect("n is past block 1");
            family.a[n - 1] == reps.e[map.g - 1].intersect(&family.a[map.f - 1])
                && family.b[n - 1] == reps.f[map.g - 1].intersect(&family.b[map.f - 1])
        });
    }
    let unions_match = tail_union_measures(family)
        .iter()
        .all(|u| u.a == u.expected_a && u.b == u.expected_b);
    Ok(StructureReport {
        nested,
        recurrence,
        unions_match,
    })
}
