use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_sets::{IntervalSet, Rational};
use crate::tuples::walk_intersections;

/// Exact intersection measures keyed by strictly increasing 1-based index
/// tuples. Singletons hold `μ(A_s)`, pairs `μ(A_s ∩ A_t)`, and so on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeasureTable {
    n: usize,
    entries: BTreeMap<Vec<usize>, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::Parse(format!("unknown table format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    n: usize,
    entries: Vec<JsonEntry>,
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    indices: Vec<usize>,
    measure: Rational,
}

/// Sorts and collapses repeated indices; `μ` is unchanged by repetition.
fn normalize_tuple(mut tuple: Vec<usize>) -> Vec<usize> {
    tuple.sort_unstable();
    tuple.dedup();
    tuple
}

impl MeasureTable {
    pub fn new() -> Self {
        MeasureTable::default()
    }

    /// Number of sets, i.e. the largest index seen.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize], &Rational)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Inserts one measurement. Fails on an empty tuple, a zero index, a
    /// value outside `[0,1]`, or a tuple already present.
    pub fn insert(&mut self, tuple: Vec<usize>, measure: Rational) -> Result<()> {
        let tuple = normalize_tuple(tuple);
        if tuple.is_empty() || tuple[0] == 0 {
            return Err(Error::TableInvariant {
                tuple,
                message: "indices must be nonempty and 1-based".into(),
            });
        }
        if measure.is_negative() || measure > Rational::one() {
            return Err(Error::TableInvariant {
                tuple,
                message: format!("measure {measure} outside [0,1]"),
            });
        }
        if self.entries.contains_key(&tuple) {
            return Err(Error::TableInvariant {
                tuple,
                message: "duplicate tuple".into(),
            });
        }
        self.n = self.n.max(*tuple.last().expect("nonempty"));
        self.entries.insert(tuple, measure);
        Ok(())
    }

    pub fn get(&self, tuple: &[usize]) -> Option<&Rational> {
        self.entries.get(tuple)
    }

    pub fn require(&self, tuple: &[usize]) -> Result<&Rational> {
        self.entries
            .get(tuple)
            .ok_or_else(|| Error::MissingTuple(tuple.to_vec()))
    }

    /// Table of every increasing tuple of length up to `max_len` (and span
    /// at most `max_span`, if given) over the given sets.
    pub fn from_sets(sets: &[IntervalSet], max_len: usize, max_span: Option<usize>) -> Self {
        let mut entries = BTreeMap::new();
        walk_intersections(sets, max_len, max_span, |tuple, inter: &IntervalSet| {
            entries.insert(tuple.to_vec(), inter.measure());
        });
        MeasureTable { n: sets.len(), entries }
    }

    /// Builds a table from already-computed values, checking the invariants.
    pub fn from_entries(entries: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Result<Self> {
        let mut table = MeasureTable::new();
        for (tuple, measure) in entries {
            table.insert(tuple, measure)?;
        }
        table.validate()?;
        Ok(table)
    }

    /// Drops every entry with an index above `n`.
    pub fn truncated(&self, n: usize) -> Self {
        MeasureTable {
            n: n.min(self.n),
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| *k.last().expect("nonempty") <= n)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Checks monotonicity: for each stored tuple, every stored sub-tuple
    /// obtained by dropping one index has measure at least as large.
    pub fn validate(&self) -> Result<()> {
        for (tuple, measure) in &self.entries {
            if tuple.len() < 2 {
                continue;
            }
            for skip in 0..tuple.len() {
                let sub: Vec<usize> = tuple
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &i)| i)
                    .collect();
                if let Some(parent) = self.entries.get(&sub) {
                    if measure > parent {
                        return Err(Error::TableInvariant {
                            tuple: tuple.clone(),
                            message: format!("measure {measure} exceeds {parent} of sub-tuple {sub:?}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Rows `i1,i2,...,ik;p/q`, one per entry, ordered by tuple.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .delimiter(b';')
            .has_headers(false)
            .from_writer(out);
        for (tuple, measure) in &self.entries {
            let key = tuple.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            writer.write_record([key, measure.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b';')
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(input);
        let mut table = MeasureTable::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let fail = |message: String| Error::Table { line, message };
            if record.len() != 2 {
                return Err(fail(format!(
                    "expected `indices;measure`, found {} field(s)",
                    record.len()
                )));
            }
            let tuple = record[0]
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| fail(format!("bad index list {:?}: {e}", &record[0])))?;
            let measure: Rational = record[1].parse().map_err(|e: Error| fail(e.to_string()))?;
            table.insert(tuple, measure).map_err(|e| fail(e.to_string()))?;
        }
        table.validate()?;
        Ok(table)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.to_json_value())?;
        Ok(())
    }

    fn to_json_value(&self) -> JsonTable {
        JsonTable {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| JsonEntry {
                    indices: k.clone(),
                    measure: v.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("table serializes")
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let raw: JsonTable = serde_json::from_reader(input)?;
        let mut table = MeasureTable::from_entries(raw.entries.into_iter().map(|e| (e.indices, e.measure)))?;
        if raw.n < table.n {
            return Err(Error::TableInvariant {
                tuple: vec![table.n],
                message: format!("declared n = {} is below the largest index", raw.n),
            });
        }
        table.n = raw.n;
        Ok(table)
    }
}

/// Reads a table from a stream in the given format and validates it.
pub fn ingest_table<R: Read>(input: R, format: TableFormat) -> Result<MeasureTable> {
    match format {
        TableFormat::Csv => MeasureTable::read_csv(input),
        TableFormat::Json => MeasureTable::read_json(input),
    }
}
