//! Two sequences `A_n`, `B_n` whose `r`-wise intersection measures strictly
//! alternate in order (`A` larger for odd `r`, smaller for even `r`, up to
//! `r = m`) while `limsup A` is null and `limsup B` has measure `c`.
//!
//! `A_n` is a union of disjoint scaled copies `c_j G_n^{(j)} + d_j` of nested
//! families with moduli `q_j`. `B_n` uses weights `c̃_j` and adds a floating
//! interval `K_n^δ` of measure `δ/n` that sweeps `[0,1)` over and over, since
//! `Σ δ/n` diverges. The weights come from an alternating linear system in
//! the powers `q_j^{-r}` whose reverse diagonal dominates.

mod claims;
mod constants;
mod family;
mod inequality;

pub use claims::{
    verify_t12_claims, ClaimWitness, ClaimsReport, CrossBackendReport, CrossBackendWitness, FloatProgress, TailBound,
};
pub use constants::{alpha, gamma, make_constants, MultiplierRule, Strategy, T12Constants, MAX_COMPACT_M, MAX_PAPER_M};
pub use family::{
    build_t12_family, build_t12_family_capped, harmonic_wrap_estimate, harmonic_wrap_index, ExplicitSets, FloatCursor,
    FloatPlacement, RowSums, T12Family, T12Measure,
};
pub use inequality::{verify_inequality_system, Dominance, InequalityReport, RowCheck, RowMargin};
