//! `limsup`: build the interval-set families, verify their identities and
//! evaluate limsup bounds on measure tables.
//!
//! Exit status is 0 when every check passes, 1 when a verification fails
//! (the JSON report on stdout carries the witness) and 2 for usage errors,
//! unreadable inputs and exceeded resource caps.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use limsup_core::Rational;
use num_bigint::BigInt;

#[derive(Debug, Parser)]
#[command(
    name = "limsup",
    version,
    about = "Exact interval-set constructions and limsup bound checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parity family C_1..C_{m+1}, D_1..D_{m+1} on dyadic cells of length 2^-m.
    BuildParity(ParityArgs),
    /// Iterated block family A_n, B_n with equal l-wise intersections for l <= m.
    BuildBlocks(BlockArgs),
    /// Nested G/H family with ratio p/q.
    Gpq(GpqArgs),
    /// Build the alternating-inequality family A_n, B_n and its constants.
    BuildT12(T12Args),
    /// Verify the constants and the strict alternating intersection claims.
    VerifyT12(T12Args),
    /// Kochen–Stone and Frolov quantities on a measure table.
    Bounds(BoundsArgs),
    /// Compare union measures of two tables by inclusion–exclusion.
    InclExcl(InclExclArgs),
    /// Export a family or its measure table as CSV or JSON.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct ParityArgs {
    #[arg(long)]
    pub m: u32,
    /// Check unions, atoms and all l-wise equalities for l <= m.
    #[arg(long)]
    pub verify: bool,
    /// Write the family as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BlockArgs {
    #[arg(long)]
    pub m: u32,
    /// Number of blocks K.
    #[arg(long)]
    pub blocks: u32,
    /// Scaling factor in [0,1], as `p/q` or an integer.
    #[arg(long, default_value = "1")]
    pub c: Rational,
    #[arg(long)]
    pub verify: bool,
    /// Longest tuple compared (defaults to m).
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Explicit,
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FirstLevelArg {
    Balanced,
    Literal,
}

#[derive(Debug, Args)]
pub struct GpqArgs {
    #[arg(long)]
    pub p: BigInt,
    #[arg(long)]
    pub q: BigInt,
    #[arg(long)]
    pub depth: u32,
    #[arg(long, value_enum, default_value_t = BackendArg::Explicit)]
    pub backend: BackendArg,
    #[arg(long, value_enum, default_value_t = FirstLevelArg::Balanced)]
    pub first_level: FirstLevelArg,
    /// Longest tuple in the formula table (defaults to depth).
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Explicit backend: the family as JSON. Formula backend: its measure
    /// table, CSV unless the path ends in `.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Paper,
    PaperUnmodified,
    Compact,
}

#[derive(Debug, Args)]
pub struct T12Args {
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_enum, default_value_t = StrategyArg::Paper)]
    pub strategy: StrategyArg,
    /// Number of sets built and largest index checked.
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    /// Explicit for the compact strategy, formula otherwise.
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Measure of limsup B, in (0,1].
    #[arg(long, default_value = "1")]
    pub c_limsup: Rational,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the file extension.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Largest prefix evaluated (defaults to the table's n).
    #[arg(long)]
    pub upto: Option<usize>,
    #[arg(long)]
    pub kochen_stone: bool,
    #[arg(long)]
    pub frolov: bool,
    /// Plot-ready CSV with columns n, ks_ratio, frolov_bound.
    #[arg(long)]
    pub plot_csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Thm13,
    Thm14,
}

#[derive(Debug, Args)]
pub struct InclExclArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// `thm13`: equal tables give equal unions. `thm14`: alternating
    /// tables give ordered unions.
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long)]
    pub kmax: usize,
    #[arg(long)]
    pub nmax: usize,
    /// Widest range n - k + 1 (defaults to the resource cap).
    #[arg(long)]
    pub max_width: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Parity,
    Blocks,
    Gpq,
    T12,
    /// Random grid-aligned sets drawn from `--seed`.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    A,
    B,
    C,
    D,
    G,
    BLower,
    BUpper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WhatArg {
    Table,
    Family,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_enum, default_value_t = WhatArg::Table)]
    pub what: WhatArg,
    /// Which sequence to tabulate: c|d (parity), a|b (blocks, t12),
    /// g (gpq), b-lower|b-upper (t12 formula bounds).
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    /// Load a family written earlier by a build command instead of building.
    #[arg(long)]
    pub from: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub blocks: Option<u32>,
    #[arg(long, default_value = "1")]
    pub c: Rational,
    #[arg(long)]
    pub p: Option<BigInt>,
    #[arg(long)]
    pub q: Option<BigInt>,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Compact)]
    pub strategy: StrategyArg,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long, default_value = "1")]
    pub c_limsup: Rational,
    /// Number of random sets.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = commands::DEFAULT_SEED)]
    pub seed: u64,
    /// Longest tuple tabulated.
    #[arg(long, default_value_t = 3)]
    pub max_len: usize,
    /// Only tuples with last - first < max_span.
    #[arg(long)]
    pub max_span: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Whether the checks behind a command passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
