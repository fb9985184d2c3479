//! Result persistence, embedded reference fixtures, fixture verification,
//! and OEIS b-file export.
//!
//! The store is an append-only journal: one self-describing JSON record per
//! line, deduplicated by (canonical shape, mode). Payloads are decimal
//! strings, which keeps the journal exact, diff-friendly, and readable from
//! any language.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::kinggraph::GridShape;
use crate::{BigCount, Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// What a stored payload counts.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Count,
    CountByC,
    Weighted,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Count => "count",
            Mode::CountByC => "count_by_c",
            Mode::Weighted => "weighted",
        })
    }
}

/// A scalar result or a c-indexed table, as decimal strings.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Scalar(String),
    Vector(Vec<String>),
}

impl Payload {
    pub fn scalar(value: &BigCount) -> Payload {
        Payload::Scalar(value.to_string())
    }

    pub fn vector(values: &[BigCount]) -> Payload {
        Payload::Vector(values.iter().map(|v| v.to_string()).collect())
    }

    fn strings(&self) -> Vec<&str> {
        match self {
            Payload::Scalar(s) => vec![s.as_str()],
            Payload::Vector(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

/// One journal line.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub shape: GridShape,
    pub mode: Mode,
    pub payload: Payload,
    pub engine: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merge_width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
    pub schema_version: u32,
}

impl ResultRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    fn key(&self) -> StoreKey {
        let canonical = self.shape.canonicalize();
        (canonical.m, canonical.n, self.mode)
    }
}

type StoreKey = (u32, u32, Mode);

fn validate_payload(record: &ResultRecord) -> Result<()> {
    for s in record.payload.strings() {
        let well_formed = !s.is_empty()
            && s.bytes().all(|b| b.is_ascii_digit())
            && (s == "0" || !s.starts_with('0'));
        if !well_formed {
            return Err(Error::IntegrityError {
                key: format!(
                    "{} {} (payload is not a canonical decimal string)",
                    record.shape.canonicalize(),
                    record.mode
                ),
            });
        }
    }
    Ok(())
}

/// Append-only result store: a journal file plus its replayed key map.
/// Single writer, any number of concurrent readers of the file.
pub struct Store {
    path: PathBuf,
    records: BTreeMap<StoreKey, ResultRecord>,
}

impl Store {
    /// Opens a store, replaying the journal if the file exists. The newest
    /// record wins for each key during replay.
    pub fn open(path: impl AsRef<Path>) -> Result<Store> {
        let path = path.as_ref().to_path_buf();
        let mut records = BTreeMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: ResultRecord =
                    serde_json::from_str(&line).map_err(|e| Error::CorruptJournal {
                        line: i + 1,
                        detail: e.to_string(),
                    })?;
                records.insert(record.key(), record);
            }
        }
        Ok(Store { path, records })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends a record. Re-storing an identical payload for an existing key
    /// is a no-op append; a different payload for the same key is refused.
    pub fn put(&mut self, record: ResultRecord) -> Result<()> {
        validate_payload(&record)?;
        let key = record.key();
        if let Some(existing) = self.records.get(&key) {
            if existing.payload != record.payload {
                return Err(Error::IntegrityError {
                    key: format!("{}x{} {}", key.0, key.1, key.2),
                });
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        writeln!(file, "{}", record.to_json_line())?;
        self.records.insert(key, record);
        Ok(())
    }

    /// Newest record for the canonicalized (shape, mode) key.
    pub fn get(&self, shape: GridShape, mode: Mode) -> Option<&ResultRecord> {
        let canonical = shape.canonicalize();
        self.records.get(&(canonical.m, canonical.n, mode))
    }

    pub fn keys(&self) -> impl Iterator<Item = &StoreKey> {
        self.records.keys()
    }
}

/// A pinned reference value: expected payload for one (shape, mode) key.
#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub shape: GridShape,
    pub mode: Mode,
    pub expected: &'static str,
    pub provenance: &'static str,
}

/// Plain counts for the 39-column strip, heights 1 through 10.
pub const COUNT_STRIP_39: [&str; 10] = [
    "165580141",
    "733007751851",
    "502179158360159299",
    "22771944702872450167161",
    "4140603472432724183285215455",
    "361264217123294193531786810807269",
    "46171388216658592659967120655934594283",
    "4829005428999699203482047276834319460871985",
    "560823794943799981958596276541103531065285978787",
    "61653632830449131139551142952360173537910722679009015",
];

/// Weighted totals for the 36-column strip, heights 1 through 10.
pub const WEIGHTED_STRIP_36: [&str; 10] = [
    "394905492",
    "1119872954208",
    "437795895219640704",
    "10488449457877727581896",
    "950690466861189052025808624",
    "40405648811419545702973459599252",
    "2446512847037847019074434950183648624",
    "119561815924055428415685514629635629063188",
    "6391107867299675456409258933225136908100573930",
    "320284968162368720355981263263997702188252565628932",
];

/// The embedded reference set: both published strips.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = Vec::with_capacity(20);
    for (i, expected) in COUNT_STRIP_39.iter().enumerate() {
        out.push(Fixture {
            shape: GridShape {
                m: i as u32 + 1,
                n: 39,
            },
            mode: Mode::Count,
            expected,
            provenance: "39-column count strip (OEIS A245013)",
        });
    }
    for (i, expected) in WEIGHTED_STRIP_36.iter().enumerate() {
        out.push(Fixture {
            shape: GridShape {
                m: i as u32 + 1,
                n: 36,
            },
            mode: Mode::Weighted,
            expected,
            provenance: "36-column weighted strip",
        });
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FixtureStatus {
    Pass,
    Fail { expected: String, actual: String },
    Skipped,
}

#[derive(Clone, Debug)]
pub struct FixtureOutcome {
    pub label: String,
    pub status: FixtureStatus,
}

#[derive(Clone, Debug, Default)]
pub struct FixtureReport {
    pub outcomes: Vec<FixtureOutcome>,
}

impl FixtureReport {
    pub fn has_failures(&self) -> bool {
        self.outcomes
            .iter()
            .any(|o| matches!(o.status, FixtureStatus::Fail { .. }))
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for outcome in &self.outcomes {
            match &outcome.status {
                FixtureStatus::Pass => writeln!(f, "PASS    {}", outcome.label)?,
                FixtureStatus::Skipped => writeln!(f, "SKIPPED {}", outcome.label)?,
                FixtureStatus::Fail { expected, actual } => writeln!(
                    f,
                    "FAIL    {} expected={} actual={}",
                    outcome.label, expected, actual
                )?,
            }
        }
        Ok(())
    }
}

/// Checks every fixture against the store. Absent keys are reported as
/// skipped; value mismatches are failures naming the fixture.
pub fn verify_fixtures(store: &Store) -> FixtureReport {
    let mut report = FixtureReport::default();
    for fixture in fixtures() {
        let label = format!(
            "{} {} [{}]",
            fixture.mode,
            fixture.shape.canonicalize(),
            fixture.provenance
        );
        let status = match store.get(fixture.shape, fixture.mode) {
            None => FixtureStatus::Skipped,
            Some(record) => {
                let actual = match &record.payload {
                    Payload::Scalar(s) => s.clone(),
                    Payload::Vector(v) => v.join(","),
                };
                if actual == fixture.expected {
                    FixtureStatus::Pass
                } else {
                    FixtureStatus::Fail {
                        expected: fixture.expected.to_string(),
                        actual,
                    }
                }
            }
        };
        report.outcomes.push(FixtureOutcome { label, status });
    }
    report
}

/// Renders `(index, value)` pairs in OEIS b-file form: one `index value` line
/// per entry, a leading comment line declaring the reading convention, no
/// trailing whitespace. Indices must be strictly increasing.
pub fn export_bfile(values: &[(u64, BigCount)]) -> Result<String> {
    let mut lines = vec![String::from(
        "# Antidiagonal reading: s = m+n ascending, m ascending within each s, \
         index starting at 1; offset against the OEIS entry is declared, not verified.",
    )];
    let mut prev: Option<u64> = None;
    for (index, value) in values {
        if let Some(p) = prev {
            if *index <= p {
                return Err(Error::NonMonotoneIndex {
                    prev: p,
                    next: *index,
                });
            }
        }
        prev = Some(*index);
        lines.push(format!("{index} {value}"));
    }
    Ok(lines.join("\n"))
}
