use serde::{Deserialize, Serialize};

use super::constants::{make_constants, row_term, MultiplierRule, Strategy, T12Constants};
use crate::exact_sets::Rational;

/// One row `r` of the alternating system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCheck {
    pub r: u32,
    pub odd: bool,
    /// `Σ_j c_j p_j^r / q_j^r`.
    pub lhs: Rational,
    /// `Σ_j c̃_j p_j^r / q_j^r`.
    pub rhs: Rational,
    /// Odd rows: `lhs - rhs - δ`. Even rows: `rhs - lhs`. Nonnegative iff the row holds.
    pub margin: Rational,
    pub holds: bool,
    pub dominance: Dominance,
}

/// The reverse-diagonal bookkeeping for row `r = m - a + 1`: column `a`
/// carries the row, measured on the difference vector `|c_j - c̃_j|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dominance {
    pub column: u32,
    pub dominant_term: Rational,
    /// Sum of the other columns' difference terms.
    pub others: Rational,
    /// `dominant_term > others + δ`.
    pub strict: bool,
    /// `min(α_a, α_{a+1})` over the ones that exist (`paper` strategies).
    pub alpha_eff: Option<Rational>,
    /// `10^{α_eff} / m`.
    pub factor: Option<Rational>,
    /// `dominant_term >= factor · (others + δ)`.
    pub factor_holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowMargin {
    pub r: u32,
    pub margin: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub m: u32,
    pub strategy: Strategy,
    pub multiplier_rule: MultiplierRule,
    pub pass: bool,
    /// First row (1-based) that fails.
    pub first_violation: Option<u32>,
    pub dominance_ok: bool,
    pub rows: Vec<RowCheck>,
    /// Set when the multipliers differ from the original column-parity
    /// assignment.
    pub deviation: Option<String>,
    /// Row margins of the column-parity assignment, for comparison
    /// (`paper` strategy only).
    pub unmodified_margins: Option<Vec<RowMargin>>,
}

fn diff_term(k: &T12Constants, j: usize, r: u32) -> Rational {
    row_term(&(&k.c[j] - &k.c_tilde[j]).abs(), &k.p[j], &k.q[j], r)
}

fn check_row(k: &T12Constants, r: u32) -> RowCheck {
    let (lhs, rhs) = k.row_sums(r);
    let odd = r % 2 == 1;
    let margin = if odd { &lhs - &rhs - &k.delta } else { &rhs - &lhs };
    let holds = !margin.is_negative();

    let a = k.m - r + 1;
    let col = a as usize - 1;
    let dominant_term = diff_term(k, col, r);
    let others: Rational = (0..k.c.len()).filter(|&j| j != col).map(|j| diff_term(k, j, r)).sum();
    let strict = dominant_term > &others + &k.delta;
    let alpha_eff = [a, a + 1]
        .into_iter()
        .filter(|&n| n >= 2 && n <= k.m && !k.alpha.is_empty())
        .map(|n| k.alpha[n as usize - 2].clone())
        .min();
    let factor = alpha_eff.as_ref().map(|e| {
        let e = e.floor();
        Rational::pow10(num_traits::ToPrimitive::to_i64(&e).expect("small exponent")) / Rational::from(k.m as u64)
    });
    let factor_holds = factor.as_ref().map(|f| dominant_term >= f * (&others + &k.delta));
    RowCheck {
        r,
        odd,
        lhs,
        rhs,
        margin,
        holds,
        dominance: Dominance {
            column: a,
            dominant_term,
            others,
            strict,
            alpha_eff,
            factor,
            factor_holds,
        },
    }
}

pub fn verify_inequality_system(constants: &T12Constants) -> InequalityReport {
    let rows: Vec<RowCheck> = (1..=constants.m).map(|r| check_row(constants, r)).collect();
    let first_violation = rows.iter().find(|row| !row.holds).map(|row| row.r);
    let dominance_ok = rows.iter().all(|row| row.dominance.strict);

    let differs_from_original = (1..=constants.m)
        .any(|a| MultiplierRule::RowParity.pair(constants.m, a) != MultiplierRule::ColumnParity.pair(constants.m, a));
    let deviation = (constants.multiplier_rule == MultiplierRule::RowParity
        && constants.strategy != Strategy::Compact
        && differs_from_original)
        .then(|| {
            format!(
                "m = {} is even: multipliers follow the parity of each column's dominant row instead of the column index",
                constants.m
            )
        });
    let unmodified_margins = (constants.strategy == Strategy::Paper).then(|| {
        let plain = make_constants(constants.m, Strategy::PaperUnmodified).expect("same m was accepted");
        (1..=plain.m)
            .map(|r| {
                let row = check_row(&plain, r);
                RowMargin {
                    r,
                    margin: row.margin,
                    holds: row.holds,
                }
            })
            .collect()
    });

    InequalityReport {
        m: constants.m,
        strategy: constants.strategy,
        multiplier_rule: constants.multiplier_rule,
        pass: first_violation.is_none(),
        first_violation,
        dominance_ok,
        rows,
        deviation,
        unmodified_margins,
    }
}
