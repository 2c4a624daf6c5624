//! Append-only term cache: one JSON object per line,
//! `{"kind":"r","i":5,"d":6,"t":30,"num":"...","den":"..."}`.
//!
//! Records are validated on load (legal canonical triple, value in the
//! statistic's range, no contradicting duplicates). Appends go through a
//! mutex and are flushed line by line, so an interrupted run can resume.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ReductionTriple;
use crate::stats::{canonical, StatCache, StatKind, TermKey};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub kind: StatKind,
    pub i: u64,
    pub d: u64,
    pub t: u64,
    pub num: String,
    pub den: String,
}

impl TermRecord {
    pub fn new(key: &TermKey, value: &BigRational) -> Self {
        TermRecord {
            kind: key.kind,
            i: key.i,
            d: key.d,
            t: key.t,
            num: value.numer().to_string(),
            den: value.denom().to_string(),
        }
    }

    pub fn key(&self) -> TermKey {
        TermKey {
            kind: self.kind,
            i: self.i,
            d: self.d,
            t: self.t,
        }
    }

    /// Checks the record and returns its value.
    pub fn validate(&self) -> std::result::Result<BigRational, String> {
        let triple = ReductionTriple { i: self.i, d: self.d, t: self.t };
        if !triple.is_legal() {
            return Err(format!("illegal triple {triple}"));
        }
        match canonical(self.d, self.t) {
            Ok(c) if c == (self.i, self.d, self.t) => {}
            Ok(c) => return Err(format!("triple {triple} is not canonical (expected {c:?})")),
            Err(e) => return Err(e.to_string()),
        }
        let num: BigInt = self.num.parse().map_err(|_| format!("bad numerator '{}'", self.num))?;
        let den: BigInt = self.den.parse().map_err(|_| format!("bad denominator '{}'", self.den))?;
        if den.is_zero() || den.is_negative() {
            return Err(format!("bad denominator '{}'", self.den));
        }
        let value = BigRational::new(num, den);
        let (lo, hi) = self.kind.range();
        let integral = matches!(self.kind, StatKind::G | StatKind::V);
        if value < lo || value > hi || (integral && !value.is_integer()) {
            return Err(format!("value {value} outside the range of {}", self.kind));
        }
        Ok(value)
    }
}

/// Reads and validates every record of a cache file.
pub fn load(path: &Path) -> Result<Vec<(TermKey, BigRational)>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut seen: std::collections::HashMap<TermKey, BigRational> = Default::default();
    let mut out = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        let corrupt = |reason: String| Error::CacheCorrupt { line: lineno, reason };
        let rec: TermRecord = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        let value = rec.validate().map_err(corrupt)?;
        let key = rec.key();
        match seen.get(&key) {
            Some(old) if *old != value => {
                return Err(corrupt(format!("duplicate key with values {old} and {value}")));
            }
            Some(_) => {}
            None => {
                seen.insert(key, value.clone());
                out.push((key, value));
            }
        }
    }
    Ok(out)
}

struct Appender {
    path: PathBuf,
    file: Mutex<File>,
}

impl Appender {
    fn append(&self, key: &TermKey, value: &BigRational) -> Result<()> {
        let mut line = serde_json::to_string(&TermRecord::new(key, value)).expect("record serializes");
        line.push('\n');
        let mut f = self.file.lock().expect("cache file lock");
        f.write_all(line.as_bytes())?;
        f.flush()?;
        log::trace!("cached {key:?} in {}", self.path.display());
        Ok(())
    }
}

/// Loads `path` into `cache` and appends every newly computed value to it.
/// Returns the number of records loaded.
pub fn attach(cache: &StatCache, path: &Path) -> Result<usize> {
    let records = load(path)?;
    let n = records.len();
    for (key, value) in records {
        if let Err(old) = cache.seed(key, value.clone()) {
            return Err(Error::CacheCorrupt {
                line: 0,
                reason: format!("{key:?} cached as {value} but already known as {old}"),
            });
        }
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let app = Appender {
        path: path.to_path_buf(),
        file: Mutex::new(file),
    };
    cache.set_sink(Box::new(move |k, v| app.append(k, v)));
    log::info!("term cache {}: {n} records loaded", path.display());
    Ok(n)
}
