use serde::{Deserialize, Serialize};

use super::MeasureTable;
use crate::error::{Error, Result};
use crate::exact_sets::Rational;

/// Kochen–Stone ratio `(Σ μ(A_s))² / Σ_{s,t} μ(A_s ∩ A_t)` for one prefix.
/// The double sum runs over all ordered pairs, diagonal included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KochenStone {
    pub n: usize,
    pub s1: Rational,
    pub s2_full: Rational,
    pub ratio: Rational,
    /// Set when every measure is zero; the ratio is then reported as 0.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frolov {
    pub n: usize,
    pub s1: Rational,
    pub s2: Rational,
    pub s3: Rational,
    pub delta1: Rational,
    pub delta2: Rational,
    /// `δ1² / (n (δ1 + δ2)) + s1 / n`, absent when `δ1 + δ2 = 0`.
    pub bound: Option<Rational>,
    pub degenerate: bool,
}

/// The asymptotic hypotheses (`δ1(n)/n → ∞`, `s2 = o(δ1 + δ2)`) cannot be
/// certified at a finite `n`, so every reported bound carries this note.
pub const FROLOV_VALIDITY_NOTE: &str =
    "finite-n evaluation; the asymptotic hypotheses delta1(n)/n -> inf and s2(n) = o(delta1(n)+delta2(n)) are not certified";

fn singleton(table: &MeasureTable, i: usize) -> Result<&Rational> {
    table.require(&[i])
}

pub fn kochen_stone_prefix(table: &MeasureTable, n: usize) -> Result<KochenStone> {
    let mut s1 = Rational::zero();
    let mut off_diagonal = Rational::zero();
    for t in 1..=n {
        s1 += singleton(table, t)?;
        for s in 1..t {
            off_diagonal += table.require(&[s, t])?;
        }
    }
    Ok(ks_from_sums(n, s1, off_diagonal))
}

fn ks_from_sums(n: usize, s1: Rational, off_diagonal: Rational) -> KochenStone {
    let s2_full = &s1 + &off_diagonal + &off_diagonal;
    let (ratio, degenerate) = if s2_full.is_zero() {
        (Rational::zero(), true)
    } else {
        (&s1 * &s1 / &s2_full, false)
    };
    KochenStone {
        n,
        s1,
        s2_full,
        ratio,
        degenerate,
    }
}

pub fn frolov_quantities(table: &MeasureTable, n: usize) -> Result<Frolov> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "Frolov quantities need n >= 3, got {n}"
        )));
    }
    let mut s1 = Rational::zero();
    let mut pairs = Rational::zero();
    let mut triples = Rational::zero();
    for k in 1..=n {
        s1 += singleton(table, k)?;
        for j in 1..k {
            pairs += table.require(&[j, k])?;
            for i in 1..j {
                triples += table.require(&[i, j, k])?;
            }
        }
    }
    Ok(frolov_from_sums(n, s1, pairs, triples))
}

fn frolov_from_sums(n: usize, s1: Rational, pairs: Rational, triples: Rational) -> Frolov {
    let nr = Rational::from(n);
    let s2 = Rational::from(2u64) * pairs;
    let s3 = Rational::from(6u64) * triples;
    let delta1 = (&nr - Rational::one()) * &s1 - &s2;
    let delta2 = (&nr - Rational::from(2u64)) * &s2 - &s3;
    let denom = &delta1 + &delta2;
    let bound = if denom.is_zero() {
        None
    } else {
        Some(&delta1 * &delta1 / (&nr * &denom) + &s1 / &nr)
    };
    Frolov {
        n,
        degenerate: bound.is_none(),
        s1,
        s2,
        s3,
        delta1,
        delta2,
        bound,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub n: usize,
    pub kochen_stone: Option<KochenStone>,
    /// Running maximum of the Kochen–Stone ratio over prefixes `1..=n`,
    /// the finite stand-in for the limsup over `n`.
    pub ks_running_max: Option<Rational>,
    pub frolov: Option<Frolov>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub upto: usize,
    pub rows: Vec<BoundsRow>,
    /// True once `Σ μ(A_s)` exceeds 1 within the prefix, the earliest finite
    /// evidence compatible with a divergent series.
    pub divergence_flag: bool,
    pub frolov_note: Option<String>,
}

/// Evaluates the requested bounds for every prefix `1..=upto`. Sums are
/// accumulated incrementally, so the whole sweep costs one pass over the
/// pairs (and triples, if Frolov is requested).
pub fn bounds_report(table: &MeasureTable, upto: usize, kochen_stone: bool, frolov: bool) -> Result<BoundsReport> {
    let mut rows = Vec::with_capacity(upto);
    let mut s1 = Rational::zero();
    let mut pairs = Rational::zero();
    let mut triples = Rational::zero();
    let mut running: Option<Rational> = None;
    for n in 1..=upto {
        s1 += singleton(table, n)?;
        for j in 1..n {
            pairs += table.require(&[j, n])?;
            if frolov {
                for i in 1..j {
                    triples += table.require(&[i, j, n])?;
                }
            }
        }
        let ks = kochen_stone.then(|| ks_from_sums(n, s1.clone(), pairs.clone()));
        if let Some(ks) = &ks {
            running = Some(match running {
                Some(r) => r.max(ks.ratio.clone()),
                None => ks.ratio.clone(),
            });
        }
        let fr = (frolov && n >= 3).then(|| frolov_from_sums(n, s1.clone(), pairs.clone(), triples.clone()));
        rows.push(BoundsRow {
            n,
            kochen_stone: ks,
            ks_running_max: kochen_stone.then(|| running.clone()).flatten(),
            frolov: fr,
        });
    }
    Ok(BoundsReport {
        upto,
        rows,
        divergence_flag: s1 > Rational::one(),
        frolov_note: frolov.then(|| FROLOV_VALIDITY_NOTE.to_string()),
    })
}

impl BoundsReport {
    /// Plot-ready CSV with columns `n,ks_ratio,frolov_bound`; values are
    /// exact `p/q` strings and missing values are left empty.
    pub fn to_plot_csv(&self) -> String {
        let mut out = String::from("n,ks_ratio,frolov_bound\n");
        for row in &self.rows {
            let ks = row
                .kochen_stone
                .as_ref()
                .map(|k| k.ratio.to_string())
                .unwrap_or_default();
            let fr = row
                .frolov
                .as_ref()
                .and_then(|f| f.bound.as_ref())
                .map(Rational::to_string)
                .unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", row.n, ks, fr));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_sets::{rat, IntervalSet};

    fn table_of(sets: &[IntervalSet]) -> MeasureTable {
        MeasureTable::from_sets(sets, 3, None)
    }

    #[test]
    fn identical_full_sets_ratio_one() {
        for n in 1..6 {
            let t = table_of(&vec![IntervalSet::unit(); n]);
            let ks = kochen_stone_prefix(&t, n).unwrap();
            assert_eq!(ks.ratio, Rational::one());
            assert!(!ks.degenerate);
        }
    }

    #[test]
    fn pairwise_independent_halves() {
        // four sets of measure 1/2 with pairwise intersections 1/4
        let sets: Vec<IntervalSet> = (1..=4u32)
            .map(|k| {
                let cells = (0..16u64).filter(|c| (c >> (k - 1)) & 1 == 1);
                IntervalSet::from_dyadic_cells(4, cells)
            })
            .collect();
        let t = table_of(&sets);
        let ks = kochen_stone_prefix(&t, 4).unwrap();
        assert_eq!(ks.s1, rat(2, 1));
        assert_eq!(ks.s2_full, rat(5, 1));
        assert_eq!(ks.ratio, rat(4, 5));
    }

    #[test]
    fn zero_measures_are_degenerate() {
        let t = MeasureTable::from_entries([
            (vec![1], Rational::zero()),
            (vec![2], Rational::zero()),
            (vec![1, 2], Rational::zero()),
        ])
        .unwrap();
        let ks = kochen_stone_prefix(&t, 2).unwrap();
        assert!(ks.degenerate);
        assert_eq!(ks.ratio, Rational::zero());
    }

    #[test]
    fn missing_pair_is_an_error() {
        let t = MeasureTable::from_entries([(vec![1], rat(1, 2)), (vec![2], rat(1, 2))]).unwrap();
        assert!(matches!(kochen_stone_prefix(&t, 2), Err(Error::MissingTuple(p)) if p == vec![1, 2]));
    }

    #[test]
    fn frolov_all_ones_degenerate() {
        let t = table_of(&vec![IntervalSet::unit(); 3]);
        let f = frolov_quantities(&t, 3).unwrap();
        assert_eq!(
            (f.s1.clone(), f.s2.clone(), f.s3.clone()),
            (rat(3, 1), rat(6, 1), rat(6, 1))
        );
        assert_eq!(f.delta1, Rational::zero());
        assert_eq!(f.delta2, Rational::zero());
        assert!(f.degenerate);
        assert!(f.bound.is_none());
    }

    #[test]
    fn frolov_disjoint_quarters() {
        let sets = vec![
            IntervalSet::interval(rat(0, 1), rat(1, 4)).unwrap(),
            IntervalSet::interval(rat(1, 4), rat(1, 2)).unwrap(),
            IntervalSet::interval(rat(1, 2), rat(3, 4)).unwrap(),
        ];
        let f = frolov_quantities(&table_of(&sets), 3).unwrap();
        assert_eq!(f.s2, Rational::zero());
        assert_eq!(f.delta1, rat(3, 2));
        assert_eq!(f.delta2, Rational::zero());
        assert_eq!(f.bound, Some(rat(3, 4)));
    }

    #[test]
    fn frolov_needs_three() {
        let t = table_of(&vec![IntervalSet::unit(); 3]);
        assert!(frolov_quantities(&t, 2).is_err());
        let short = MeasureTable::from_sets(&vec![IntervalSet::unit(); 3], 2, None);
        assert!(matches!(frolov_quantities(&short, 3), Err(Error::MissingTuple(_))));
    }

    #[test]
    fn report_matches_single_prefix_calls() {
        let sets: Vec<IntervalSet> = (0..6u64)
            .map(|k| IntervalSet::from_dyadic_cells(3, [k, (k + 3) % 8, (2 * k + 1) % 8]))
            .collect();
        let t = table_of(&sets);
        let report = bounds_report(&t, 6, true, true).unwrap();
        for row in &report.rows {
            assert_eq!(
                row.kochen_stone.as_ref().unwrap(),
                &kochen_stone_prefix(&t, row.n).unwrap()
            );
            if row.n >= 3 {
                assert_eq!(row.frolov.as_ref().unwrap(), &frolov_quantities(&t, row.n).unwrap());
            }
        }
        let max = report
            .rows
            .iter()
            .map(|r| r.kochen_stone.as_ref().unwrap().ratio.clone())
            .max()
            .unwrap();
        assert_eq!(report.rows.last().unwrap().ks_running_max.as_ref(), Some(&max));
        assert!(report.to_plot_csv().starts_with("n,ks_ratio,frolov_bound\n1,"));
    }
}
