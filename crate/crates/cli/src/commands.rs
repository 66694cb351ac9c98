use anyhow::{bail, Context, Result};
use limsup_core::bc_bounds::{bounds_report, MeasureTable};
use limsup_core::block_family::{
    build_block_family, find_first_mismatch, tail_union_measures, verify_block_equalities, verify_block_structure,
    BlockFamily, Side,
};
use limsup_core::caps::Caps;
use limsup_core::exact_sets::random::{random_sets, RandomSetShape};
use limsup_core::incl_excl::{verify_thm13, verify_thm14};
use limsup_core::nested_family::{
    build_nested_explicit_capped, formula_table, g_measure, h_measure, verify_nested_family, Backend, FirstLevel,
    NestedFamily, NestedParams,
};
use limsup_core::parity_family::{build_parity_family, verify_parity_properties, ParityFamily};
use limsup_core::t12_family::{build_t12_family_capped, make_constants, verify_t12_claims, Strategy, T12Family};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::io::{print_json, read_json, read_table, render_table, table_format, write_atomic, write_json};
use crate::{
    BackendArg, BlockArgs, BoundsArgs, Cli, Command, ExportArgs, FamilyArg, FirstLevelArg, GpqArgs, InclExclArgs,
    ModeArg, Outcome, ParityArgs, SideArg, StrategyArg, T12Args, WhatArg,
};

pub const DEFAULT_SEED: u64 = 0x5eed;

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let caps = Caps::from_env()?;
    match cli.command {
        Command::BuildParity(args) => build_parity(args),
        Command::BuildBlocks(args) => build_blocks(args),
        Command::Gpq(args) => gpq(args, &caps),
        Command::BuildT12(args) => build_t12(args, &caps),
        Command::VerifyT12(args) => verify_t12(args, &caps),
        Command::Bounds(args) => bounds(args),
        Command::InclExcl(args) => incl_excl(args, &caps),
        Command::Export(args) => export(args, &caps),
    }
}

fn build_parity(args: ParityArgs) -> Result<Outcome> {
    let family = build_parity_family(args.m)?;
    if let Some(out) = &args.out {
        write_json(out, &family)?;
    }
    if !args.verify {
        print_json(&json!({ "m": family.m, "members": family.members(), "out": args.out }))?;
        return Ok(Outcome::Pass);
    }
    let report = verify_parity_properties(&family);
    let pass = report.pass && report.unions_ok && report.atoms_ok;
    print_json(&report)?;
    Ok(outcome(pass))
}

fn build_blocks(args: BlockArgs) -> Result<Outcome> {
    let family = build_block_family(args.m, args.blocks, &args.c)?;
    if let Some(out) = &args.out {
        write_json(out, &family)?;
    }
    if !args.verify {
        print_json(&json!({
            "m": family.m,
            "K": family.blocks,
            "c": family.c,
            "sets": family.len(),
            "out": args.out,
        }))?;
        return Ok(Outcome::Pass);
    }
    let l_max = args.l_max.unwrap_or(args.m as usize);
    let equalities = verify_block_equalities(&family, l_max);
    let structure = verify_block_structure(&family)?;
    let beyond = find_first_mismatch(&family, args.m as usize + 1);
    let pass = equalities.pass && structure.nested && structure.recurrence && structure.unions_match;
    print_json(&json!({
        "pass": pass,
        "equalities": equalities,
        "structure": structure,
        "block_unions": tail_union_measures(&family),
        "first_mismatch_beyond_m": beyond,
    }))?;
    Ok(outcome(pass))
}

fn first_level(arg: FirstLevelArg) -> FirstLevel {
    match arg {
        FirstLevelArg::Balanced => FirstLevel::Balanced,
        FirstLevelArg::Literal => FirstLevel::Literal,
    }
}

fn backend(arg: BackendArg) -> Backend {
    match arg {
        BackendArg::Explicit => Backend::Explicit,
        BackendArg::Formula => Backend::Formula,
    }
}

fn strategy(arg: StrategyArg) -> Strategy {
    match arg {
        StrategyArg::Paper => Strategy::Paper,
        StrategyArg::PaperUnmodified => Strategy::PaperUnmodified,
        StrategyArg::Compact => Strategy::Compact,
    }
}

fn gpq(args: GpqArgs, caps: &Caps) -> Result<Outcome> {
    let params = NestedParams::new(args.p, args.q, args.depth)?;
    match args.backend {
        BackendArg::Explicit => {
            let family = build_nested_explicit_capped(&params, first_level(args.first_level), caps)?;
            if let Some(out) = &args.out {
                write_json(out, &family)?;
            }
            let report = verify_nested_family(&family);
            print_json(&report)?;
            Ok(outcome(report.pass))
        }
        BackendArg::Formula => {
            let table = formula_table(&params, args.max_len.unwrap_or(args.depth as usize))?;
            if let Some(out) = &args.out {
                write_atomic(out, render_table(&table, table_format(None, Some(out))).as_bytes())?;
            }
            let levels: Vec<_> = (1..=args.depth)
                .map(|n| json!({ "n": n, "H": h_measure(n), "G": g_measure(&params, n) }))
                .collect();
            print_json(&json!({
                "p": params.p.to_string(),
                "q": params.q.to_string(),
                "depth": params.depth,
                "backend": "formula",
                "levels": levels,
                "table_entries": table.len(),
                "out": args.out,
            }))?;
            Ok(Outcome::Pass)
        }
    }
}

fn t12_family(args: &T12Args, caps: &Caps) -> Result<T12Family> {
    let strategy = strategy(args.strategy);
    let constants = make_constants(args.m, strategy)?;
    let backend = args.backend.map(backend).unwrap_or(if strategy == Strategy::Compact {
        Backend::Explicit
    } else {
        Backend::Formula
    });
    Ok(build_t12_family_capped(
        &constants,
        args.depth,
        backend,
        &args.c_limsup,
        caps,
    )?)
}

fn build_t12(args: T12Args, caps: &Caps) -> Result<Outcome> {
    let family = t12_family(&args, caps)?;
    if let Some(out) = &args.out {
        write_json(out, &family)?;
    }
    print_json(&json!({
        "m": family.constants.m,
        "n_max": family.n_max,
        "backend": family.backend,
        "c_limsup": family.c_limsup,
        "constants": family.constants,
        "out": args.out,
    }))?;
    Ok(Outcome::Pass)
}

fn verify_t12(args: T12Args, caps: &Caps) -> Result<Outcome> {
    let family = t12_family(&args, caps)?;
    let report = verify_t12_claims(&family, args.depth);
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    print_json(&report)?;
    Ok(outcome(report.pass))
}

fn bounds(args: BoundsArgs) -> Result<Outcome> {
    let table = read_table(&args.input, args.format)?;
    let upto = args.upto.unwrap_or(table.n());
    if upto == 0 {
        bail!("the table is empty; nothing to evaluate");
    }
    let (ks, frolov) = match (args.kochen_stone, args.frolov) {
        (false, false) => (true, true),
        chosen => chosen,
    };
    let report = bounds_report(&table, upto, ks, frolov)?;
    if let Some(path) = &args.plot_csv {
        write_atomic(path, report.to_plot_csv().as_bytes())?;
    }
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    print_json(&report)?;
    Ok(Outcome::Pass)
}

fn incl_excl(args: InclExclArgs, caps: &Caps) -> Result<Outcome> {
    let width = args.max_width.unwrap_or(caps.max_range_width);
    if width > caps.max_range_width {
        bail!(limsup_core::Error::ResourceCap(format!(
            "range width {width} above the cap {}",
            caps.max_range_width
        )));
    }
    let a = read_table(&args.a, args.format)?;
    let b = read_table(&args.b, args.format)?;
    let (pass, report) = match args.mode {
        ModeArg::Thm13 => {
            let r = verify_thm13(&a, &b, args.kmax, args.nmax, width)?;
            (r.pass, serde_json::to_value(&r)?)
        }
        ModeArg::Thm14 => {
            let r = verify_thm14(&a, &b, args.kmax, args.nmax, width)?;
            (r.pass, serde_json::to_value(&r)?)
        }
    };
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    print_json(&report)?;
    Ok(outcome(pass))
}

fn need<T: Clone>(value: &Option<T>, flag: &str, family: &str) -> Result<T> {
    value
        .clone()
        .with_context(|| format!("--{flag} is required for the {family} family"))
}

/// A family either loaded with `--from` or built from the flags.
enum Loaded {
    Parity(ParityFamily),
    Blocks(BlockFamily),
    Nested(NestedFamily),
    NestedFormula(NestedParams),
    T12(Box<T12Family>),
    Random(Vec<limsup_core::IntervalSet>),
}

fn load_family(args: &ExportArgs, caps: &Caps) -> Result<Loaded> {
    if let Some(path) = &args.from {
        return Ok(match args.family {
            FamilyArg::Parity => Loaded::Parity(read_json(path)?),
            FamilyArg::Blocks => Loaded::Blocks(read_json(path)?),
            FamilyArg::Gpq => Loaded::Nested(read_json(path)?),
            FamilyArg::T12 => Loaded::T12(Box::new(read_json(path)?)),
            FamilyArg::Random => Loaded::Random(read_json(path)?),
        });
    }
    Ok(match args.family {
        FamilyArg::Parity => Loaded::Parity(build_parity_family(need(&args.m, "m", "parity")?)?),
        FamilyArg::Blocks => Loaded::Blocks(build_block_family(
            need(&args.m, "m", "blocks")?,
            need(&args.blocks, "blocks", "blocks")?,
            &args.c,
        )?),
        FamilyArg::Gpq => {
            let params = NestedParams::new(
                need(&args.p, "p", "gpq")?,
                need(&args.q, "q", "gpq")?,
                need(&args.depth, "depth", "gpq")?,
            )?;
            match args.backend.unwrap_or(BackendArg::Explicit) {
                BackendArg::Explicit => {
                    Loaded::Nested(build_nested_explicit_capped(&params, FirstLevel::Balanced, caps)?)
                }
                BackendArg::Formula => Loaded::NestedFormula(params),
            }
        }
        FamilyArg::T12 => Loaded::T12(Box::new(t12_family(
            &T12Args {
                m: need(&args.m, "m", "t12")?,
                strategy: args.strategy,
                depth: need(&args.depth, "depth", "t12")?,
                backend: args.backend,
                c_limsup: args.c_limsup.clone(),
                out: None,
            },
            caps,
        )?)),
        FamilyArg::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            Loaded::Random(random_sets(&mut rng, args.n, RandomSetShape::default()))
        }
    })
}

fn wrong_side(side: SideArg, family: &str, allowed: &str) -> anyhow::Error {
    anyhow::anyhow!("--side {side:?} does not apply to the {family} family (expected {allowed})")
}

fn tabulate(loaded: &Loaded, side: Option<SideArg>, max_len: usize, max_span: Option<usize>) -> Result<MeasureTable> {
    let table = match loaded {
        Loaded::Parity(f) => match side.unwrap_or(SideArg::C) {
            SideArg::C => MeasureTable::from_sets(&f.c, max_len, max_span),
            SideArg::D => MeasureTable::from_sets(&f.d, max_len, max_span),
            s => return Err(wrong_side(s, "parity", "c|d")),
        },
        Loaded::Blocks(f) => match side.unwrap_or(SideArg::A) {
            SideArg::A => f.measure_table(Side::A, max_len, max_span),
            SideArg::B => f.measure_table(Side::B, max_len, max_span),
            s => return Err(wrong_side(s, "blocks", "a|b")),
        },
        Loaded::Nested(f) => match side.unwrap_or(SideArg::G) {
            SideArg::G => {
                let g: Vec<_> = f.levels.iter().map(|l| l.g.clone()).collect();
                MeasureTable::from_sets(&g, max_len, max_span)
            }
            s => return Err(wrong_side(s, "gpq", "g")),
        },
        Loaded::NestedFormula(params) => match side.unwrap_or(SideArg::G) {
            SideArg::G => formula_table(params, max_len)?,
            s => return Err(wrong_side(s, "gpq", "g")),
        },
        Loaded::T12(f) => {
            let n = f.n_max as usize;
            match side.unwrap_or(SideArg::A) {
                SideArg::A if f.explicit.is_some() => f.explicit_tables(max_len, max_span)?.0,
                SideArg::A => f.formula_table_a(n, max_len)?,
                SideArg::B => f.explicit_tables(max_len, max_span)?.1,
                SideArg::BLower => f.formula_table_b_lower(n, max_len)?,
                SideArg::BUpper => f.formula_table_b_upper(n, max_len)?,
                s => return Err(wrong_side(s, "t12", "a|b|b-lower|b-upper")),
            }
        }
        Loaded::Random(sets) => MeasureTable::from_sets(sets, max_len, max_span),
    };
    Ok(table)
}

fn export(args: ExportArgs, caps: &Caps) -> Result<Outcome> {
    let loaded = load_family(&args, caps)?;
    let text = match args.what {
        WhatArg::Table => {
            let table = tabulate(&loaded, args.side, args.max_len, args.max_span)?;
            render_table(&table, table_format(args.format, args.out.as_deref()))
        }
        WhatArg::Family => crate::io::to_json(&match &loaded {
            Loaded::Parity(f) => serde_json::to_value(f)?,
            Loaded::Blocks(f) => serde_json::to_value(f)?,
            Loaded::Nested(f) => serde_json::to_value(f)?,
            Loaded::NestedFormula(p) => serde_json::to_value(p)?,
            Loaded::T12(f) => serde_json::to_value(f)?,
            Loaded::Random(sets) => serde_json::to_value(sets)?,
        })?,
    };
    match &args.out {
        Some(out) => write_atomic(out, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(Outcome::Pass)
}
