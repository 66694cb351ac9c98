//! Parity families: two collections `C_1..C_{m+1}` and `D_1..D_{m+1}` built
//! from the `2^m` dyadic cells of length `2^-m`.
//!
//! Each odd-size subset of `{1..m+1}` receives its own cell, which is added
//! to every `D_i` with `i` in the subset. Each nonempty even-size subset
//! receives a cell that is added to the matching `C_i`. There are `2^m` odd
//! subsets but only `2^m - 1` nonempty even ones, so exactly one cell (the
//! last) belongs to no `C_i`. All `l`-wise intersection measures agree for
//! `l <= m`; at `l = m + 1` they differ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_sets::{IntervalSet, Rational};
use crate::tuples::{combinations, Mismatch};

/// Largest `m` accepted by [`build_parity_family`].
pub const MAX_PARITY_M: u32 = 12;

/// A subset of `{1..m+1}` (bit `i-1` set iff `i` is a member) together with
/// the index of the dyadic cell it was assigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellAssignment {
    pub subset: u32,
    pub cell: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityFamily {
    pub m: u32,
    #[serde(rename = "C")]
    pub c: Vec<IntervalSet>,
    #[serde(rename = "D")]
    pub d: Vec<IntervalSet>,
    #[serde(skip)]
    pub c_assignment: Vec<CellAssignment>,
    #[serde(skip)]
    pub d_assignment: Vec<CellAssignment>,
}

pub fn build_parity_family(m: u32) -> Result<ParityFamily> {
    if m == 0 {
        return Err(Error::InvalidParameter("parity family needs m >= 1".into()));
    }
    if m > MAX_PARITY_M {
        return Err(Error::ResourceCap(format!(
            "parity family with m = {m} exceeds the cap m <= {MAX_PARITY_M}"
        )));
    }
    let members = m + 1;
    let mut c_assignment = Vec::new();
    let mut d_assignment = Vec::new();
    for subset in 1u32..(1 << members) {
        if subset.count_ones() % 2 == 1 {
            let cell = d_assignment.len() as u64;
            d_assignment.push(CellAssignment { subset, cell });
        } else {
            let cell = c_assignment.len() as u64;
            c_assignment.push(CellAssignment { subset, cell });
        }
    }
    debug_assert_eq!(d_assignment.len(), 1 << m);
    debug_assert_eq!(c_assignment.len(), (1 << m) - 1);

    let collect = |assignment: &[CellAssignment]| -> Vec<IntervalSet> {
        (0..members)
            .map(|bit| {
                let cells = assignment.iter().filter(|a| a.subset & (1 << bit) != 0).map(|a| a.cell);
                IntervalSet::from_dyadic_cells(m, cells)
            })
            .collect()
    };

    Ok(ParityFamily {
        m,
        c: collect(&c_assignment),
        d: collect(&d_assignment),
        c_assignment,
        d_assignment,
    })
}

impl ParityFamily {
    pub fn members(&self) -> usize {
        self.c.len()
    }

    /// `μ(C_{i_1} ∩ ... ∩ C_{i_l})` for 1-based indices.
    pub fn c_intersection(&self, indices: &[usize]) -> Rational {
        IntervalSet::intersect_all(indices.iter().map(|&i| &self.c[i - 1])).measure()
    }

    pub fn d_intersection(&self, indices: &[usize]) -> Rational {
        IntervalSet::intersect_all(indices.iter().map(|&i| &self.d[i - 1])).measure()
    }
}

/// Measure of the atom `⋂_{i∈S} X_i ∩ ⋂_{i∉S} X_i^c`, where `S` is given as
/// a bitmask over `{1..m+1}`.
fn atom_measure(sets: &[IntervalSet], subset: u32) -> Rational {
    let mut acc = IntervalSet::unit();
    for (bit, set) in sets.iter().enumerate() {
        acc = if subset & (1 << bit) != 0 {
            acc.intersect(set)
        } else {
            acc.difference(set)
        };
        if acc.is_empty() {
            break;
        }
    }
    acc.measure()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub m: u32,
    pub pass: bool,
    /// Number of distinct increasing tuples of length `1..=m` compared.
    pub checked_tuples: usize,
    /// First tuple (lexicographic within each length) where C and D differ.
    pub witness: Option<Mismatch>,
    pub union_c: Rational,
    pub union_d: Rational,
    /// `μ(⋃D) = 1` and `μ(⋃C) = 1 - 2^-m`.
    pub unions_ok: bool,
    /// Every atom has measure `2^-m` or `0` according to the parity of its
    /// membership count (odd for D, even for C).
    pub atoms_ok: bool,
    /// The `(m+1)`-wise intersection, which is not required to agree.
    pub full_intersection: Mismatch,
}

pub fn verify_parity_properties(family: &ParityFamily) -> ParityReport {
    let m = family.m;
    let members = family.members();
    let mut checked = 0usize;
    let mut witness = None;
    'outer: for len in 1..=m as usize {
        for tuple in combinations(members, len) {
            checked += 1;
            let lhs = family.c_intersection(&tuple);
            let rhs = family.d_intersection(&tuple);
            if lhs != rhs {
                witness = Some(Mismatch {
                    indices: tuple,
                    lhs,
                    rhs,
                });
                break 'outer;
            }
        }
    }

    let cell = Rational::dyadic(m);
    let union_c = IntervalSet::union_all(&family.c).measure();
    let union_d = IntervalSet::union_all(&family.d).measure();
    let unions_ok = union_d == Rational::one() && union_c == Rational::one() - &cell;

    let atoms_ok = (0u32..(1 << members)).all(|subset| {
        let odd = subset.count_ones() % 2 == 1;
        let expect = |hit: bool| if hit { cell.clone() } else { Rational::zero() };
        atom_measure(&family.d, subset) == expect(odd) && atom_measure(&family.c, subset) == expect(!odd)
    });

    let all: Vec<usize> = (1..=members).collect();
    let full_intersection = Mismatch {
        lhs: family.c_intersection(&all),
        rhs: family.d_intersection(&all),
        indices: all,
    };

    ParityReport {
        m,
        pass: witness.is_none() && unions_ok && atoms_ok,
        checked_tuples: checked,
        witness,
        union_c,
        union_d,
        unions_ok,
        atoms_ok,
        full_intersection,
    }
}
