use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_sets::{big_decimal, Rational};

/// Largest `m` accepted by the `paper` strategies; the moduli grow like
/// `10^{(2m-1)!}` and the fourth power of the last one already has about
/// twenty thousand digits at `m = 4`.
pub const MAX_PAPER_M: u32 = 4;
pub const MAX_COMPACT_M: u32 = 4;

/// Exponent range `e` for compact moduli `q = 2^e`.
const COMPACT_EXPONENTS: std::ops::RangeInclusive<u32> = 1..=5;
/// Largest `log2` weight tried per column by the compact search.
const COMPACT_MAX_WEIGHT_LOG2: u32 = 12;
/// Largest denominator allowed for a normalized compact weight.
const COMPACT_MAX_DENOM_LOG2: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Factorial-exponent moduli with multipliers chosen by row parity.
    Paper,
    /// Same moduli, multipliers alternating with column parity as in the
    /// original argument. Only sound for odd `m`.
    PaperUnmodified,
    /// Small dyadic constants found by bounded search, small enough to
    /// materialize.
    Compact,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Strategy::Paper),
            "paper-unmodified" => Ok(Strategy::PaperUnmodified),
            "compact" => Ok(Strategy::Compact),
            other => Err(Error::Parse(format!(
                "unknown strategy {other:?} (expected paper|paper-unmodified|compact)"
            ))),
        }
    }
}

/// How the `(2,1)` / `(1,2)` multiplier pairs are distributed over columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiplierRule {
    /// Column `a` gets `(2,1)` when its dominant row `m-a+1` is odd.
    RowParity,
    /// Column `a` gets `(2,1)` when `a` is odd.
    ColumnParity,
}

impl MultiplierRule {
    /// `(c, c̃)` base multipliers for column `a` (1-based).
    pub fn pair(self, m: u32, a: u32) -> (u32, u32) {
        let first = match self {
            MultiplierRule::RowParity => (m - a + 1) % 2 == 1,
            MultiplierRule::ColumnParity => a % 2 == 1,
        };
        if first {
            (2, 1)
        } else {
            (1, 2)
        }
    }
}

/// Constants of the alternating system
/// `Σ_j c_j p_j^r / q_j^r  ≥ Σ_j c̃_j p_j^r / q_j^r + δ` (r odd) and
/// `Σ_j c_j p_j^r / q_j^r  ≤ Σ_j c̃_j p_j^r / q_j^r` (r even), `r = 1..=m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct T12Constants {
    pub m: u32,
    pub strategy: Strategy,
    pub multiplier_rule: MultiplierRule,
    /// Factorial offset of the `paper`-strategy moduli `q_i = 10^{(b+i-1)!}`.
    pub b: Option<u32>,
    #[serde(with = "big_decimal::vec")]
    pub p: Vec<BigInt>,
    #[serde(with = "big_decimal::vec")]
    pub q: Vec<BigInt>,
    pub c: Vec<Rational>,
    pub c_tilde: Vec<Rational>,
    pub delta: Rational,
    /// The divisor that turned the raw constants into `c`, `c̃`, `δ`.
    pub normalization: Rational,
    pub raw_c: Vec<Rational>,
    pub raw_c_tilde: Vec<Rational>,
    pub raw_delta: Rational,
    /// `γ_1..γ_m` (`paper` strategies only).
    pub gamma: Vec<Rational>,
    /// `α_2..α_m` (`paper` strategies only).
    pub alpha: Vec<Rational>,
    /// `log2` of the per-column weights (compact strategy only).
    pub weights_log2: Option<Vec<u32>>,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `γ_n = Σ_{i=1}^{n-1} (m - 1/2 - (i-1)) ((b+i)! - (b+i-1)!)`.
pub fn gamma(m: u32, b: u32, n: u32) -> Rational {
    (1..n)
        .map(|i| {
            let weight = Rational::from(m as u64) - Rational::new(1, 2) - Rational::from((i - 1) as u64);
            weight * Rational::from(factorial(b + i) - factorial(b + i - 1))
        })
        .sum()
}

/// `α_n = ((b+n-1)! - (b+n-2)!) / 2` for `n >= 2`.
pub fn alpha(b: u32, n: u32) -> Rational {
    assert!(n >= 2);
    Rational::from(factorial(b + n - 1) - factorial(b + n - 2)) * Rational::new(1, 2)
}

fn pow10(exp: &Rational) -> Result<Rational> {
    if !exp.is_integer() {
        return Err(Error::InvalidParameter(format!("exponent {exp} is not an integer")));
    }
    let e = exp
        .numer()
        .to_i64()
        .ok_or_else(|| Error::ResourceCap(format!("exponent {exp} too large")))?;
    Ok(Rational::pow10(e))
}

pub fn make_constants(m: u32, strategy: Strategy) -> Result<T12Constants> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    match strategy {
        Strategy::Paper => paper_constants(m, MultiplierRule::RowParity, strategy),
        Strategy::PaperUnmodified => paper_constants(m, MultiplierRule::ColumnParity, strategy),
        Strategy::Compact => compact_constants(m),
    }
}

fn paper_constants(m: u32, rule: MultiplierRule, strategy: Strategy) -> Result<T12Constants> {
    if m > MAX_PAPER_M {
        return Err(Error::ResourceCap(format!(
            "paper constants are limited to m <= {MAX_PAPER_M}, got {m}"
        )));
    }
    let b = m;
    let q: Vec<BigInt> = (1..=m)
        .map(|i| {
            let e = factorial(b + i - 1).to_usize().expect("small factorial");
            num_traits::pow(BigInt::from(10), e)
        })
        .collect();
    let gamma: Vec<Rational> = (1..=m).map(|n| gamma(m, b, n)).collect();
    let alpha: Vec<Rational> = (2..=m).map(|n| alpha(b, n)).collect();

    let mut raw_c = Vec::with_capacity(m as usize);
    let mut raw_c_tilde = Vec::with_capacity(m as usize);
    for a in 1..=m {
        let scale = pow10(&gamma[a as usize - 1])?;
        let (x, y) = rule.pair(m, a);
        raw_c.push(&scale * Rational::from(x as u64));
        raw_c_tilde.push(&scale * Rational::from(y as u64));
    }
    let p = vec![BigInt::one(); m as usize];

    // δ: smallest dominant term, pushed below every margin by 10^{α_min + 1}
    let dominant_min = (1..=m)
        .map(|a| {
            let r = m - a + 1;
            row_term(&raw_c[a as usize - 1], &p[a as usize - 1], &q[a as usize - 1], r)
        })
        .min()
        .expect("m >= 1");
    let alpha_min = alpha.iter().min().cloned().unwrap_or_else(Rational::zero);
    let raw_delta = dominant_min / pow10(&(alpha_min + Rational::one()))?;

    let sum_c: Rational = raw_c.iter().sum();
    let sum_ct: Rational = raw_c_tilde.iter().sum();
    let normalization = Rational::from(2u64) * sum_c.max(sum_ct + &raw_delta);
    Ok(T12Constants {
        m,
        strategy,
        multiplier_rule: rule,
        b: Some(b),
        c: raw_c.iter().map(|x| x / &normalization).collect(),
        c_tilde: raw_c_tilde.iter().map(|x| x / &normalization).collect(),
        delta: &raw_delta / &normalization,
        normalization,
        p,
        q,
        raw_c,
        raw_c_tilde,
        raw_delta,
        gamma,
        alpha,
        weights_log2: None,
    })
}

/// `c · p^r / q^r`.
pub(crate) fn row_term(c: &Rational, p: &BigInt, q: &BigInt, r: u32) -> Rational {
    c * Rational::new(
        num_traits::pow(p.clone(), r as usize),
        num_traits::pow(q.clone(), r as usize),
    )
}

/// Increasing `len`-tuples of the compact exponents, lexicographic.
fn exponent_choices(len: usize) -> Vec<Vec<u32>> {
    let pool: Vec<u32> = COMPACT_EXPONENTS.collect();
    crate::tuples::combinations(pool.len(), len)
        .map(|t| t.into_iter().map(|i| pool[i - 1]).collect())
        .collect()
}

fn next_power_of_two_at_least(x: &Rational) -> Rational {
    let mut p = Rational::one();
    while &p < x {
        p = p * Rational::from(2u64);
    }
    while &(&p / Rational::from(2u64)) >= x {
        p = p / Rational::from(2u64);
    }
    p
}

fn largest_power_of_two_at_most(x: &Rational) -> Rational {
    let mut p = Rational::one();
    while &p > x {
        p = p / Rational::from(2u64);
    }
    while &(&p * Rational::from(2u64)) <= x {
        p = p * Rational::from(2u64);
    }
    p
}

fn dyadic_denominator_ok(x: &Rational) -> bool {
    let limit = BigInt::one() << COMPACT_MAX_DENOM_LOG2;
    x.denom() <= &limit
}

/// Bounded exact search: moduli `q_j = 2^{e_j}` with increasing `e`, and
/// per-column weights `2^{s_a}` (`s_1 = 0`), multipliers by row parity.
/// Every row must hold strictly before `δ` is chosen.
fn compact_constants(m: u32) -> Result<T12Constants> {
    if m > MAX_COMPACT_M {
        return Err(Error::ResourceCap(format!(
            "compact search is limited to m <= {MAX_COMPACT_M}, got {m}"
        )));
    }
    let rule = MultiplierRule::RowParity;
    let columns = m as usize;
    let p = vec![BigInt::one(); columns];
    let two = Rational::from(2u64);
    for exps in exponent_choices(columns) {
        let q: Vec<BigInt> = exps.iter().map(|&e| BigInt::one() << e).collect();
        let mut weights = vec![0u32; columns];
        loop {
            let raw_c: Vec<Rational> = (1..=m)
                .map(|a| {
                    Rational::from(rule.pair(m, a).0 as u64) * Rational::from(BigInt::one() << weights[a as usize - 1])
                })
                .collect();
            let raw_c_tilde: Vec<Rational> = (1..=m)
                .map(|a| {
                    Rational::from(rule.pair(m, a).1 as u64) * Rational::from(BigInt::one() << weights[a as usize - 1])
                })
                .collect();
            if let Some(slack) = strict_slack(&raw_c, &raw_c_tilde, &p, &q) {
                let raw_delta = largest_power_of_two_at_most(&(slack / &two));
                let sum_c: Rational = raw_c.iter().sum();
                let sum_ct: Rational = raw_c_tilde.iter().sum();
                let normalization = next_power_of_two_at_least(&(&two * sum_c.max(sum_ct + &raw_delta)));
                let c: Vec<Rational> = raw_c.iter().map(|x| x / &normalization).collect();
                let c_tilde: Vec<Rational> = raw_c_tilde.iter().map(|x| x / &normalization).collect();
                if c.iter().chain(&c_tilde).all(dyadic_denominator_ok) {
                    return Ok(T12Constants {
                        m,
                        strategy: Strategy::Compact,
                        multiplier_rule: rule,
                        b: None,
                        delta: &raw_delta / &normalization,
                        c,
                        c_tilde,
                        normalization,
                        p,
                        q,
                        raw_c,
                        raw_c_tilde,
                        raw_delta,
                        gamma: Vec::new(),
                        alpha: Vec::new(),
                        weights_log2: Some(weights),
                    });
                }
            }
            if !advance(&mut weights[1..], COMPACT_MAX_WEIGHT_LOG2) {
                break;
            }
        }
    }
    Err(Error::NoCompactWitness(format!(
        "m = {m}: no dyadic constants with q in 2^{COMPACT_EXPONENTS:?} and weights up to 2^{COMPACT_MAX_WEIGHT_LOG2}"
    )))
}

/// Odometer over `0..=max` per digit, last digit fastest.
fn advance(digits: &mut [u32], max: u32) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < max {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// Smallest odd-row margin when every row holds strictly, else `None`.
fn strict_slack(c: &[Rational], ct: &[Rational], p: &[BigInt], q: &[BigInt]) -> Option<Rational> {
    let m = c.len() as u32;
    let mut slack: Option<Rational> = None;
    for r in 1..=m {
        let diff: Rational = (0..c.len()).map(|j| row_term(&(&c[j] - &ct[j]), &p[j], &q[j], r)).sum();
        if r % 2 == 1 {
            if !diff.is_positive() {
                return None;
            }
            slack = Some(match slack {
                Some(s) => s.min(diff),
                None => diff,
            });
        } else if !diff.is_negative() {
            return None;
        }
    }
    slack
}

impl T12Constants {
    /// `(Σ_j c_j p_j^r / q_j^r, Σ_j c̃_j p_j^r / q_j^r)` on the normalized constants.
    pub fn row_sums(&self, r: u32) -> (Rational, Rational) {
        let lhs = (0..self.c.len())
            .map(|j| row_term(&self.c[j], &self.p[j], &self.q[j], r))
            .sum();
        let rhs = (0..self.c.len())
            .map(|j| row_term(&self.c_tilde[j], &self.p[j], &self.q[j], r))
            .sum();
        (lhs, rhs)
    }

    pub fn sum_c(&self) -> Rational {
        self.c.iter().sum()
    }

    pub fn sum_c_tilde(&self) -> Rational {
        self.c_tilde.iter().sum()
    }

    /// Same constants with the two sides exchanged.
    pub fn swapped(&self) -> T12Constants {
        let mut out = self.clone();
        std::mem::swap(&mut out.c, &mut out.c_tilde);
        std::mem::swap(&mut out.raw_c, &mut out.raw_c_tilde);
        out
    }
}
