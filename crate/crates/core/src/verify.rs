//! Capacity verification: compares the composite-coding inner bound with the
//! polymatroidal outer bound, one problem at a time or over every
//! isomorphism class of a given size.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Rational;
use crate::inner_bounds::{
    composite_member_with_budget, flat_timeshare_region, symmetric_inner, symmetric_outer,
    AchievabilityCertificate, Membership, SearchBudget,
};
use crate::outer_bound::outer_region;
use crate::problem::{canonical_key, enumerate_problems_with_limit, CanonicalKey, Problem};

/// Outcome of comparing the two bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Every outer vertex is achievable: the bounds coincide.
    Matched,
    /// Some outer vertex is outside the inner bound.
    Unmatched,
    /// The time budget ran out before a decision.
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Matched => "matched",
            Verdict::Unmatched => "unmatched",
            Verdict::Undecided => "undecided",
        })
    }
}

/// Symmetric rate of each bound; `inner` is absent when undecided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricRates {
    pub inner: Option<Rational>,
    pub outer: Rational,
}

/// Result of verifying one problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub key: CanonicalKey,
    pub problem: String,
    pub outer_facets: usize,
    pub outer_vertices: usize,
    pub verdict: Verdict,
    pub matched: bool,
    /// One certificate per outer vertex, in vertex order, when matched.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<AchievabilityCertificate>,
    /// The first outer vertex without a certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_vertex: Option<Vec<Rational>>,
    pub flat_timeshare_matched: bool,
    pub symmetric: SymmetricRates,
    /// Elapsed time; recorded only on request so that result files are
    /// reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

/// Knobs shared by single-problem verification and sweeps.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Time allowed for the achievability searches of one problem.
    pub lp_budget: Option<Duration>,
    pub record_wall_time: bool,
    /// Split each membership search over worker threads.
    pub parallel_search: bool,
}

/// Verifies one problem.
pub fn verify_capacity(p: &Problem) -> Result<VerificationRecord> {
    verify_capacity_with(p, VerifyOptions::default())
}

pub fn verify_capacity_with(p: &Problem, options: VerifyOptions) -> Result<VerificationRecord> {
    let start = Instant::now();
    let budget = SearchBudget {
        deadline: options.lp_budget.map(|b| start + b),
        parallel: options.parallel_search,
    };
    let key = canonical_key(p)?;
    let outer = outer_region(p)?;

    let mut verdict = Verdict::Matched;
    let mut certificates = Vec::with_capacity(outer.vertices().len());
    let mut failing_vertex = None;
    for v in outer.vertices() {
        match composite_member_with_budget(p, v, budget)? {
            Membership::Member(cert) => certificates.push(*cert),
            Membership::NotMember => {
                verdict = Verdict::Unmatched;
                failing_vertex = Some(v.clone());
                break;
            }
            Membership::Undecided => {
                verdict = Verdict::Undecided;
                failing_vertex = Some(v.clone());
                break;
            }
        }
    }
    let matched = verdict == Verdict::Matched;
    if !matched {
        certificates.clear();
    }

    let flat_timeshare_matched = flat_timeshare_region(p)?.equals(&outer)?;
    let sym_outer = symmetric_outer(p)?;
    // When the regions coincide the symmetric rates do too.
    let sym_inner = if matched {
        Some(sym_outer.clone())
    } else {
        symmetric_inner(p, &sym_outer, budget)?
    };

    Ok(VerificationRecord {
        key,
        problem: p.render(),
        outer_facets: outer.facets().len(),
        outer_vertices: outer.vertices().len(),
        verdict,
        matched,
        certificates,
        failing_vertex,
        flat_timeshare_matched,
        symmetric: SymmetricRates {
            inner: sym_inner,
            outer: sym_outer,
        },
        wall_ms: options
            .record_wall_time
            .then(|| start.elapsed().as_millis() as u64),
    })
}

/// Counts over a sweep's result file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub total: usize,
    pub matched: usize,
    pub unmatched: usize,
    pub undecided: usize,
    /// Records on which time sharing of flat coding misses the outer bound.
    pub flat_only_failures: usize,
}

impl SweepSummary {
    fn add(&mut self, rec: &VerificationRecord) {
        self.total += 1;
        match rec.verdict {
            Verdict::Matched => self.matched += 1,
            Verdict::Unmatched => self.unmatched += 1,
            Verdict::Undecided => self.undecided += 1,
        }
        if !rec.flat_timeshare_matched {
            self.flat_only_failures += 1;
        }
    }

    /// Whether every record matched.
    pub fn all_matched(&self) -> bool {
        self.matched == self.total
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20} {:>10}", "messages", self.n)?;
        writeln!(f, "{:<20} {:>10}", "total", self.total)?;
        writeln!(f, "{:<20} {:>10}", "matched", self.matched)?;
        writeln!(f, "{:<20} {:>10}", "unmatched", self.unmatched)?;
        writeln!(f, "{:<20} {:>10}", "undecided", self.undecided)?;
        write!(f, "{:<20} {:>10}", "flat_only_failures", self.flat_only_failures)
    }
}

/// Sweep settings.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub verify: VerifyOptions,
    /// Worker threads; `0` uses the default pool size.
    pub workers: usize,
    /// Keep records already present in the output file.
    pub resume: bool,
    /// Largest message count to enumerate.
    pub max_n: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            verify: VerifyOptions::default(),
            workers: 0,
            resume: false,
            max_n: crate::problem::DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

/// Failure of a sweep.
#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("{path}: {source} (last durable record: {})", last_durable.map_or("none".to_string(), |k| k.to_string()))]
    Io {
        path: PathBuf,
        last_durable: Option<CanonicalKey>,
        #[source]
        source: io::Error,
    },
    #[error("{path}, line {line}: {reason}")]
    Corrupt { path: PathBuf, line: usize, reason: String },
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Reads the complete records of a result file. A trailing line without a
/// newline (an interrupted append) is ignored; its length is returned so the
/// caller can cut it off.
fn read_records(path: &Path) -> std::result::Result<(BTreeMap<CanonicalKey, String>, u64), SweepError> {
    let io_err = |source| SweepError::Io {
        path: path.to_path_buf(),
        last_durable: None,
        source,
    };
    let mut out = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((out, 0)),
        Err(e) => return Err(io_err(e)),
    };
    let mut reader = BufReader::new(file);
    let mut durable = 0u64;
    let mut line_no = 0;
    let mut buf = String::new();
    loop {
        buf.clear();
        let read = reader.read_line(&mut buf).map_err(io_err)?;
        if read == 0 || !buf.ends_with('\n') {
            break;
        }
        line_no += 1;
        durable += read as u64;
        let line = buf.trim_end();
        if line.is_empty() {
            continue;
        }
        let rec: VerificationRecord = serde_json::from_str(line).map_err(|e| SweepError::Corrupt {
            path: path.to_path_buf(),
            line: line_no,
            reason: e.to_string(),
        })?;
        out.insert(rec.key, line.to_string());
    }
    Ok((out, durable))
}

/// Verifies every isomorphism class with `n` messages, appending one JSON
/// line per class to `out` as results arrive, then rewrites the file sorted
/// by canonical key.
pub fn sweep(n: usize, out: &Path, options: SweepOptions) -> std::result::Result<SweepSummary, SweepError> {
    let io_err = |last: Option<CanonicalKey>| {
        move |source| SweepError::Io {
            path: out.to_path_buf(),
            last_durable: last,
            source,
        }
    };
    let (done, durable_len) = if options.resume {
        read_records(out)?
    } else {
        (BTreeMap::new(), 0)
    };
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(!options.resume)
        .open(out)
        .map_err(io_err(None))?;
    if options.resume {
        file.set_len(durable_len).map_err(io_err(done.keys().last().copied()))?;
    }
    let mut file = file;
    io::Seek::seek(&mut file, io::SeekFrom::End(0)).map_err(io_err(None))?;

    let mut pending: Vec<CanonicalKey> = Vec::new();
    for p in enumerate_problems_with_limit(n, options.max_n).map_err(Error::from)? {
        let key = canonical_key(&p).map_err(Error::from)?;
        if !done.contains_key(&key) {
            pending.push(key);
        }
    }

    struct Writer {
        file: File,
        last: Option<CanonicalKey>,
    }
    let writer = Mutex::new(Writer {
        file,
        last: done.keys().last().copied(),
    });
    let work = || -> std::result::Result<Vec<(CanonicalKey, String)>, SweepError> {
        pending
            .par_iter()
            .map(|&key| {
                let rec = verify_capacity_with(&key.to_problem(), options.verify)?;
                let line = serde_json::to_string(&rec).expect("records serialize");
                let mut w = writer.lock().expect("writer lock");
                let last = w.last;
                writeln!(w.file, "{line}")
                    .and_then(|()| w.file.flush())
                    .map_err(io_err(last))?;
                w.last = Some(key);
                Ok((key, line))
            })
            .collect()
    };
    let fresh = if options.workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .map_err(|e| SweepError::Pool(e.to_string()))?
            .install(work)?
    };
    let last = writer.into_inner().expect("writer lock").last;

    let mut all = done;
    all.extend(fresh);
    let mut summary = SweepSummary {
        n,
        ..Default::default()
    };
    let mut body = String::new();
    for line in all.values() {
        let rec: VerificationRecord = serde_json::from_str(line).expect("records parse");
        summary.add(&rec);
        body.push_str(line);
        body.push('\n');
    }
    let tmp = out.with_extension("tmp");
    fs::write(&tmp, body).map_err(io_err(last))?;
    fs::rename(&tmp, out).map_err(io_err(last))?;
    Ok(summary)
}

/// Summary of an existing result file.
pub fn summarize(n: usize, path: &Path) -> std::result::Result<SweepSummary, SweepError> {
    let (records, _) = read_records(path)?;
    let mut summary = SweepSummary {
        n,
        ..Default::default()
    };
    for line in records.values() {
        summary.add(&serde_json::from_str(line).expect("validated on read"));
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("icap-verify-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn three_message_problem_matches_with_flat_coding() {
        let rec = verify_capacity(&parse_problem("(1|2),(2|1,3),(3|1)").unwrap()).unwrap();
        assert!(rec.matched);
        assert_eq!(rec.verdict, Verdict::Matched);
        assert!(rec.flat_timeshare_matched);
        assert_eq!(rec.certificates.len(), rec.outer_vertices);
        assert_eq!(rec.wall_ms, None);
    }

    #[test]
    fn example_two_needs_composite_coding() {
        let p = parse_problem("(1|4),(2|3,4),(3|1,2),(4|2,3)").unwrap();
        let rec = verify_capacity(&p).unwrap();
        assert!(rec.matched);
        assert!(!rec.flat_timeshare_matched);
        for c in &rec.certificates {
            assert_eq!(c.validate(&p), Ok(()));
        }
        assert_eq!(rec.symmetric.inner.as_ref(), Some(&rec.symmetric.outer));
    }

    #[test]
    fn five_cycle_matches() {
        let rec = verify_capacity(&Problem::symmetric(5, 1, 1).unwrap()).unwrap();
        assert!(rec.matched);
        assert_eq!(rec.symmetric.outer, Rational::new(2, 5));
    }

    #[test]
    fn exhausted_budget_is_undecided() {
        let rec = verify_capacity_with(
            &Problem::symmetric(5, 1, 1).unwrap(),
            VerifyOptions {
                lp_budget: Some(Duration::ZERO),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(rec.verdict, Verdict::Undecided);
        assert!(!rec.matched);
        assert!(rec.failing_vertex.is_some());
        assert_eq!(rec.symmetric.inner, None);
    }

    #[test]
    fn record_round_trips_through_json() {
        let rec = verify_capacity(&Problem::no_side_info(2)).unwrap();
        let text = serde_json::to_string(&rec).unwrap();
        assert!(text.starts_with(r#"{"key":"2:00","problem":"(1|),(2|)""#), "{text}");
        assert_eq!(serde_json::from_str::<VerificationRecord>(&text).unwrap(), rec);
    }

    #[test]
    fn sweep_of_three_messages_and_resume() {
        let path = scratch("n3.jsonl");
        let summary = sweep(3, &path, SweepOptions::default()).unwrap();
        assert_eq!((summary.total, summary.matched, summary.flat_only_failures), (16, 16, 0));
        let full = fs::read(&path).unwrap();

        // Interrupt: keep five records out of order plus a torn line.
        let text = String::from_utf8(full.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let mut partial = String::new();
        for i in [7, 2, 11, 0, 5] {
            partial.push_str(lines[i]);
            partial.push('\n');
        }
        partial.push_str(&lines[3][..20]);
        fs::write(&path, partial).unwrap();
        let resumed = sweep(
            3,
            &path,
            SweepOptions {
                resume: true,
                workers: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(resumed, summary);
        assert_eq!(fs::read(&path).unwrap(), full);
        assert_eq!(summarize(3, &path).unwrap(), summary);
    }

    #[test]
    fn sweep_output_is_independent_of_worker_count() {
        let a = scratch("w1.jsonl");
        let b = scratch("w4.jsonl");
        let one = SweepOptions {
            workers: 1,
            ..Default::default()
        };
        let four = SweepOptions {
            workers: 4,
            ..Default::default()
        };
        sweep(3, &a, one).unwrap();
        sweep(3, &b, four).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }

    #[test]
    fn corrupt_file_is_reported() {
        let path = scratch("bad.jsonl");
        fs::write(&path, "not json\n").unwrap();
        let err = sweep(
            2,
            &path,
            SweepOptions {
                resume: true,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, SweepError::Corrupt { line: 1, .. }), "{err}");
    }
}
