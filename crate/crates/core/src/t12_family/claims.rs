use serde::{Deserialize, Serialize};

use super::family::{walk_explicit, T12Family};
use super::inequality::{verify_inequality_system, InequalityReport};
use crate::exact_sets::{IntervalSet, Rational};
use crate::nested_family::Backend;
use crate::tuples::binomial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimWitness {
    /// Tuple length and its largest index; every tuple with the same pair
    /// has the same closed-form values.
    pub r: u32,
    pub last: usize,
    pub a: Rational,
    pub b_lower: Rational,
    pub b_upper: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossBackendWitness {
    pub indices: Vec<usize>,
    pub a_formula: Rational,
    pub a_explicit: Rational,
    pub b_lower: Rational,
    pub b_upper: Rational,
    pub b_explicit: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossBackendReport {
    pub checked_tuples: usize,
    pub a_mismatches: usize,
    pub b_out_of_bounds: usize,
    pub witness: Option<CrossBackendWitness>,
    /// The scaled components of each `A_n` (resp. `B_n`) are pairwise disjoint.
    pub components_disjoint: bool,
    /// Each `K_n^δ` avoids every scaled `H_n` copy of `B_n`.
    pub floats_disjoint: bool,
    /// `μ(K_n^δ) = c·δ/n`.
    pub float_measures_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    #[serde(rename = "N")]
    pub start: u32,
    /// `c · Σ_j c_j / N`.
    pub bound: Rational,
    /// `μ(A_N ∪ ... ∪ A_{n_max})` when materialized.
    pub explicit_union: Option<Rational>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloatProgress {
    pub n: u32,
    /// `c · δ (1 + ... + 1/n)`, the float mass laid down through level `n`.
    pub cumulative: Rational,
    pub cursor: Option<Rational>,
    pub wraps: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimsReport {
    pub m: u32,
    pub depth: u32,
    pub backend: Backend,
    pub c_limsup: Rational,
    pub pass: bool,
    pub inequalities: InequalityReport,
    /// Tuples of `1..=depth` with length `r <= m` covered by the strict checks.
    pub checked_tuples: u128,
    pub strict_failures: u128,
    pub witness: Option<ClaimWitness>,
    pub cross_backend: Option<CrossBackendReport>,
    pub tail_bounds: Vec<TailBound>,
    pub float_progress: Vec<FloatProgress>,
}

/// Checks `μ(∩A) > μ(∩B)` for odd `r` and `<` for even `r`, over all
/// increasing tuples of `1..=depth` with `r <= m`. A uses the exact closed
/// form; B uses its upper bound on odd rows and lower bound on even rows,
/// so the checks are conservative.
///
/// The closed forms depend only on `r` and the last index, so each pair
/// `(r, i_r)` is evaluated once and stands for its `C(i_r - 1, r - 1)` tuples.
pub fn verify_t12_claims(family: &T12Family, depth: u32) -> ClaimsReport {
    let k = &family.constants;
    let max_r = k.m.min(depth);
    let sums = family.row_sums(max_r.max(1));
    let mut checked = 0u128;
    let mut failures = 0u128;
    let mut witness = None;
    for r in 1..=max_r {
        for last in r as usize..=depth as usize {
            let count = binomial(last - 1, r as usize - 1);
            let (a, b_lower, b_upper) = family.closed_forms(sums.get(r), last);
            let ok = if r % 2 == 1 { a > b_upper } else { a < b_lower };
            checked += count;
            if !ok {
                failures += count;
                witness.get_or_insert(ClaimWitness {
                    r,
                    last,
                    a,
                    b_lower,
                    b_upper,
                });
            }
        }
    }

    let cross_backend = family.explicit.as_ref().map(|_| cross_check(family, depth));

    let tail_bounds = (1..=depth)
        .map(|start| {
            let bound = family.tail_bound(start);
            let explicit_union = family.explicit.as_ref().and_then(|sets| {
                (start <= family.n_max).then(|| IntervalSet::union_all(&sets.a[start as usize - 1..]).measure())
            });
            TailBound {
                start,
                holds: explicit_union.as_ref().is_none_or(|u| *u <= bound),
                bound,
                explicit_union,
            }
        })
        .collect::<Vec<_>>();

    let float_progress = (1..=depth)
        .map(|n| {
            let placed = family
                .explicit
                .as_ref()
                .and_then(|sets| sets.floats.get(n as usize - 1));
            FloatProgress {
                n,
                cumulative: family.float_mass_through(n),
                cursor: placed.map(|f| f.cursor_after.clone()),
                wraps: placed.map(|f| f.wraps),
            }
        })
        .collect();

    let inequalities = verify_inequality_system(k);
    let cross_ok = cross_backend.as_ref().is_none_or(|c| {
        c.a_mismatches == 0
            && c.b_out_of_bounds == 0
            && c.components_disjoint
            && c.floats_disjoint
            && c.float_measures_exact
    });
    ClaimsReport {
        m: k.m,
        depth,
        backend: family.backend,
        c_limsup: family.c_limsup.clone(),
        pass: failures == 0 && inequalities.pass && cross_ok && tail_bounds.iter().all(|t| t.holds),
        inequalities,
        checked_tuples: checked,
        strict_failures: failures,
        witness,
        cross_backend,
        tail_bounds,
        float_progress,
    }
}

/// Materialized values against the closed forms, for every tuple of
/// `1..=min(depth, n_max)` of any length.
fn cross_check(family: &T12Family, depth: u32) -> CrossBackendReport {
    let sets = family.explicit.as_ref().expect("explicit backend");
    let n = depth.min(family.n_max) as usize;
    let trimmed = super::family::ExplicitSets {
        a: sets.a[..n].to_vec(),
        b: sets.b[..n].to_vec(),
        floats: Vec::new(),
        b_h_copies: Vec::new(),
        a_components: Vec::new(),
        b_components: Vec::new(),
    };
    let sums = family.row_sums(n as u32);
    let mut report = CrossBackendReport {
        checked_tuples: 0,
        a_mismatches: 0,
        b_out_of_bounds: 0,
        witness: None,
        components_disjoint: true,
        floats_disjoint: true,
        float_measures_exact: true,
    };
    walk_explicit(&trimmed, n, |tuple, a_explicit, b_explicit| {
        report.checked_tuples += 1;
        let (a, b_lower, b_upper) = family.closed_forms(sums.get(tuple.len() as u32), *tuple.last().expect("nonempty"));
        let a_bad = a != a_explicit;
        let b_bad = b_explicit < b_lower || b_explicit > b_upper;
        report.a_mismatches += a_bad as usize;
        report.b_out_of_bounds += b_bad as usize;
        if (a_bad || b_bad) && report.witness.is_none() {
            report.witness = Some(CrossBackendWitness {
                indices: tuple.to_vec(),
                a_formula: a,
                a_explicit,
                b_lower,
                b_upper,
                b_explicit,
            });
        }
    });

    let pairwise_disjoint = |parts: &[IntervalSet]| {
        parts
            .iter()
            .enumerate()
            .all(|(i, x)| parts[i + 1..].iter().all(|y| x.is_disjoint(y)))
    };
    report.components_disjoint = sets.a_components[..n].iter().all(|p| pairwise_disjoint(p))
        && sets.b_components[..n].iter().all(|p| pairwise_disjoint(p));
    report.floats_disjoint = sets.floats[..n]
        .iter()
        .zip(&sets.b_h_copies)
        .all(|(f, h)| f.set.is_disjoint(h));
    report.float_measures_exact = sets.floats[..n]
        .iter()
        .all(|f| f.set.measure() == &family.c_limsup * &family.constants.delta / Rational::from(f.n as u64));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_sets::rat;
    use crate::t12_family::{build_t12_family, make_constants, Strategy};

    #[test]
    fn paper_m2_depth6() {
        let k = make_constants(2, Strategy::Paper).unwrap();
        let fam = build_t12_family(&k, 6, Backend::Formula, &Rational::one()).unwrap();
        let report = verify_t12_claims(&fam, 6);
        assert!(report.pass, "{:?}", report.witness);
        assert_eq!(report.checked_tuples, 6 + 15);
        assert!(report.cross_backend.is_none());
    }

    #[test]
    fn single_indices_a_exceeds_b() {
        for m in 1..=4 {
            let k = make_constants(m, Strategy::Paper).unwrap();
            let fam = build_t12_family(&k, 3, Backend::Formula, &rat(1, 3)).unwrap();
            for i in 1..=5usize {
                let t = fam.intersection_measure(&[i]).unwrap();
                assert!(t.a > t.b_upper, "m = {m}, i = {i}");
            }
        }
    }

    #[test]
    fn tail_bound_at_100() {
        let k = make_constants(2, Strategy::Paper).unwrap();
        let fam = build_t12_family(&k, 1, Backend::Formula, &Rational::one()).unwrap();
        assert_eq!(fam.tail_bound(100), (&k.c[0] + &k.c[1]) / Rational::from(100u64));
    }

    #[test]
    fn compact_cross_backend() {
        for (m, depth) in [(1, 6), (2, 4)] {
            let k = make_constants(m, Strategy::Compact).unwrap();
            let fam = build_t12_family(&k, depth, Backend::Explicit, &Rational::one()).unwrap();
            let report = verify_t12_claims(&fam, depth);
            let cross = report.cross_backend.as_ref().unwrap();
            assert_eq!(cross.checked_tuples, (1 << depth) - 1);
            assert!(report.pass, "m = {m}: {:?} {:?}", report.witness, cross);
        }
    }

    #[test]
    fn swapped_constants_fail() {
        let k = make_constants(1, Strategy::Compact).unwrap().swapped();
        let fam = build_t12_family(&k, 3, Backend::Formula, &Rational::one()).unwrap();
        let report = verify_t12_claims(&fam, 3);
        assert!(!report.pass);
        assert_eq!(report.witness.unwrap().r, 1);
    }
}
