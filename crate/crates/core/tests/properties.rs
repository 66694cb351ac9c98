use limsup_core::bc_bounds::{bounds_report, frolov_quantities, kochen_stone_prefix, MeasureTable};
use limsup_core::incl_excl::{
    direct_union_measure, union_by_inclusion_exclusion, verify_thm13, verify_thm14, Relation,
};
use limsup_core::tuples::combinations;
use limsup_core::{rat, IntervalSet, Rational};
use proptest::prelude::*;

const GRID: i64 = 48;

fn arb_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0..GRID, 1..=GRID / 2), 0..5).prop_map(|pieces| {
        IntervalSet::canonicalize(pieces.into_iter().map(|(lo, w)| {
            let hi = (lo + w).min(GRID);
            (rat(lo.min(hi - 1), GRID), rat(hi, GRID))
        }))
        .unwrap()
    })
}

fn arb_sets(max: usize) -> impl Strategy<Value = Vec<IntervalSet>> {
    prop::collection::vec(arb_set(), 1..=max)
}

/// `x ↦ 1 - x`, which preserves every intersection measure.
fn reflect(set: &IntervalSet) -> IntervalSet {
    IntervalSet::canonicalize(
        set.intervals()
            .iter()
            .map(|i| (Rational::one() - &i.hi, Rational::one() - &i.lo)),
    )
    .unwrap()
}

/// Length-only tables from a strictly decreasing `v_1 > v_2 > ...`:
/// `a(l) = v_l, b(l) = v_{l+1}` for odd `l` and the reverse for even `l`.
/// Both stay monotone and `a` dominates on odd lengths only.
fn alternating_tables(v: &[Rational], n: usize) -> (MeasureTable, MeasureTable) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for len in 1..=n {
        let (hi, lo) = (v[len - 1].clone(), v[len].clone());
        let (va, vb) = if len % 2 == 1 { (hi, lo) } else { (lo, hi) };
        for t in combinations(n, len) {
            a.push((t.clone(), va.clone()));
            b.push((t, vb.clone()));
        }
    }
    (
        MeasureTable::from_entries(a).unwrap(),
        MeasureTable::from_entries(b).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inclusion_exclusion_matches_direct_union(sets in arb_sets(7)) {
        let n = sets.len();
        let table = MeasureTable::from_sets(&sets, n, None);
        for k in 1..=n {
            for last in k..=n {
                prop_assert_eq!(union_by_inclusion_exclusion(&table, k, last).unwrap(), direct_union_measure(&sets, k, last));
            }
        }
    }

    #[test]
    fn kochen_stone_at_most_one(sets in arb_sets(10)) {
        let table = MeasureTable::from_sets(&sets, 2, None);
        for n in 1..=sets.len() {
            prop_assert!(kochen_stone_prefix(&table, n).unwrap().ratio <= Rational::one());
        }
    }

    #[test]
    fn incremental_report_matches_prefix_calls(sets in arb_sets(8)) {
        let n = sets.len();
        let table = MeasureTable::from_sets(&sets, 3, None);
        let report = bounds_report(&table, n, true, true).unwrap();
        for row in &report.rows {
            prop_assert_eq!(row.kochen_stone.as_ref().unwrap(), &kochen_stone_prefix(&table, row.n).unwrap());
            if row.n >= 3 {
                prop_assert_eq!(row.frolov.as_ref().unwrap(), &frolov_quantities(&table, row.n).unwrap());
            }
        }
    }

    #[test]
    fn measure_preserving_image_gives_equal_unions(sets in arb_sets(6)) {
        let n = sets.len();
        let mirrored: Vec<IntervalSet> = sets.iter().map(reflect).collect();
        let a = MeasureTable::from_sets(&sets, n, None);
        let b = MeasureTable::from_sets(&mirrored, n, None);
        prop_assert_eq!(&a, &b);
        let report = verify_thm13(&a, &b, n, n, n).unwrap();
        prop_assert!(report.pass);
        prop_assert!(report.comparisons.iter().all(|c| c.relation == Relation::Equal));
        for c in &report.comparisons {
            prop_assert_eq!(&c.lhs_union, &direct_union_measure(&mirrored, c.k, c.n));
        }
    }

    #[test]
    fn alternating_tables_give_ordered_unions(
        n in 1usize..=6,
        steps in prop::collection::vec(1i64..=20, 7),
    ) {
        // v_1 = 1 > v_2 > ... > v_7 > 0
        let total: i64 = steps.iter().sum::<i64>() + 1;
        let mut v = Vec::new();
        let mut acc = total;
        for s in &steps {
            v.push(rat(acc, total));
            acc -= s;
        }
        v.push(rat(acc, total));
        let (a, b) = alternating_tables(&v, n);
        let report = verify_thm14(&a, &b, n, n, n).unwrap();
        prop_assert!(report.hypothesis_holds);
        prop_assert!(report.pass);
        prop_assert!(report.comparisons.iter().all(|c| c.lhs_union >= c.rhs_union));
    }
}

#[test]
fn pairwise_independent_ratio_rises_to_one() {
    // μ = 1/2 and pairwise intersections 1/4 give ratio n / (n + 1)
    let n = 64;
    let mut entries = Vec::new();
    for i in 1..=n {
        entries.push((vec![i], rat(1, 2)));
        for j in i + 1..=n {
            entries.push((vec![i, j], rat(1, 4)));
        }
    }
    let table = MeasureTable::from_entries(entries).unwrap();
    let report = bounds_report(&table, n, true, false).unwrap();
    let ratios: Vec<Rational> = report
        .rows
        .iter()
        .map(|r| r.kochen_stone.as_ref().unwrap().ratio.clone())
        .collect();
    for (i, r) in ratios.iter().enumerate() {
        assert_eq!(*r, rat(i as i64 + 1, i as i64 + 2));
    }
    assert!(ratios.windows(2).all(|w| w[0] < w[1]));

    // the same values from actual sets: the first ten binary digits
    let digits: Vec<IntervalSet> = (1..=10u32)
        .map(|i| IntervalSet::from_dyadic_cells(i, (0..1u64 << (i - 1)).map(|t| 2 * t + 1)))
        .collect();
    let real = MeasureTable::from_sets(&digits, 2, None);
    for k in 1..=10 {
        assert_eq!(kochen_stone_prefix(&real, k).unwrap().ratio, ratios[k - 1]);
    }
}
