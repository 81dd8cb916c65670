//! Regularly sampled wind-speed series and their CSV form.
//!
//! Canonical file layout:
//!
//! ```text
//! timestamp,speed_ms
//! 2004-01-01T00:00:00Z,7.31
//! 2004-01-01T00:10:00Z,7.05
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDateTime, TimeZone, Utc};

use crate::error::{Error, Result};

/// Longest run of missing slots that is filled by linear interpolation.
pub const MAX_INTERPOLATED_GAP: usize = 3;

/// Default sampling interval of the wind records, in seconds.
pub const DEFAULT_INTERVAL_SECS: i64 = 600;

/// What to do with a gap longer than [`MAX_INTERPOLATED_GAP`] samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GapPolicy {
    #[default]
    Error,
    /// Keep one timeline; the gap is recorded as a missing range (NaN values).
    SplitAtGap,
}

impl FromStr for GapPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "error" => Ok(GapPolicy::Error),
            "split-at-gap" | "split" => Ok(GapPolicy::SplitAtGap),
            other => Err(Error::InvalidParameter(format!(
                "unknown gap policy `{other}` (expected error or split-at-gap)"
            ))),
        }
    }
}

impl std::fmt::Display for GapPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GapPolicy::Error => "error",
            GapPolicy::SplitAtGap => "split-at-gap",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    start: DateTime<Utc>,
    interval_secs: i64,
    values: Vec<f64>,
    gaps: Vec<Range<usize>>,
    missing: Vec<Range<usize>>,
}

/// Start time used for generated series.
pub fn default_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2004, 1, 1, 0, 0, 0).unwrap()
}

impl TimeSeries {
    /// A gap-free series; every value must be finite.
    pub fn new(start: DateTime<Utc>, interval_secs: i64, values: Vec<f64>) -> Result<Self> {
        if interval_secs <= 0 {
            return Err(Error::InvalidParameter("interval must be positive".into()));
        }
        crate::error::check_finite(&values)?;
        Ok(Self {
            start,
            interval_secs,
            values,
            gaps: Vec::new(),
            missing: Vec::new(),
        })
    }

    /// Gap-free series starting at 2004-01-01 with a 10-minute interval.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(default_start(), DEFAULT_INTERVAL_SECS, values)
    }

    /// Marks `range` as missing; its values become NaN.
    pub fn mark_missing(&mut self, range: Range<usize>) -> Result<()> {
        if range.start >= range.end || range.end > self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "missing range {range:?} is empty or outside 0..{}",
                self.values.len()
            )));
        }
        if self
            .missing
            .iter()
            .chain(&self.gaps)
            .any(|r| r.start < range.end && range.start < r.end)
        {
            return Err(Error::InvalidParameter(format!(
                "missing range {range:?} overlaps an existing gap"
            )));
        }
        for v in &mut self.values[range.clone()] {
            *v = f64::NAN;
        }
        self.missing.push(range);
        self.missing.sort_by_key(|r| r.start);
        Ok(())
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn interval_secs(&self) -> i64 {
        self.interval_secs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in m/s; NaN inside missing ranges.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index ranges that were filled by interpolation.
    pub fn gaps(&self) -> &[Range<usize>] {
        &self.gaps
    }

    /// Index ranges with no data.
    pub fn missing(&self) -> &[Range<usize>] {
        &self.missing
    }

    pub fn has_missing_in(&self, range: Range<usize>) -> bool {
        self.missing
            .iter()
            .any(|r| r.start < range.end && range.start < r.end)
    }

    pub fn timestamp(&self, index: usize) -> DateTime<Utc> {
        self.start + Duration::seconds(self.interval_secs * index as i64)
    }

    /// Index of the first sample at or after `time`.
    pub fn index_at_or_after(&self, time: DateTime<Utc>) -> usize {
        let secs = (time - self.start).num_seconds();
        if secs <= 0 {
            return 0;
        }
        let idx = (secs + self.interval_secs - 1) / self.interval_secs;
        (idx as usize).min(self.values.len())
    }

    /// Renders the canonical CSV. Missing samples are omitted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("timestamp,speed_ms\n");
        for (i, v) in self.values.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            let _ = writeln!(out, "{},{}", format_timestamp(self.timestamp(i)), v);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

pub fn format_timestamp(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
        .map(|naive| naive.and_utc())
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(|e| Error::io(path, e))
}

/// Reads a `timestamp,speed_ms` file sampled every `interval_secs` seconds.
///
/// Runs of up to three missing slots are filled by linear interpolation and
/// listed in [`TimeSeries::gaps`]; longer runs follow `gap_policy`.
pub fn load_csv(path: &Path, interval_secs: i64, gap_policy: GapPolicy) -> Result<TimeSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, &path.display().to_string(), interval_secs, gap_policy)
}

pub(crate) fn parse_csv(
    text: &str,
    origin: &str,
    interval_secs: i64,
    gap_policy: GapPolicy,
) -> Result<TimeSeries> {
    if interval_secs <= 0 {
        return Err(Error::InvalidParameter("interval must be positive".into()));
    }
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("timestamp") {
        return Err(parse_err(1, "expected header `timestamp,speed_ms`".into()));
    }

    let mut rows: Vec<(usize, DateTime<Utc>, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() < 2 {
            return Err(parse_err(line, "expected `timestamp,speed`".into()));
        }
        let t = parse_timestamp(&record[0])
            .ok_or_else(|| parse_err(line, format!("bad timestamp `{}`", &record[0])))?;
        let v: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("bad speed `{}`", &record[1])))?;
        if !v.is_finite() {
            return Err(parse_err(line, format!("non-finite speed `{}`", &record[1])));
        }
        rows.push((line, t, v));
    }
    let Some(&(_, start, _)) = rows.first() else {
        return Err(parse_err(1, "file contains no data rows".into()));
    };

    let mut values = Vec::with_capacity(rows.len());
    let mut gaps = Vec::new();
    let mut missing = Vec::new();
    let mut prev: Option<DateTime<Utc>> = None;
    for &(line, t, v) in &rows {
        if let Some(p) = prev {
            let step = (t - p).num_seconds();
            if step <= 0 {
                return Err(parse_err(line, format!("timestamp {} is not after {}", t, p)));
            }
            if step % interval_secs != 0 {
                return Err(parse_err(
                    line,
                    format!("step of {step} s is not a multiple of the {interval_secs} s interval"),
                ));
            }
            let skipped = (step / interval_secs - 1) as usize;
            if skipped > 0 {
                let from = values.len();
                if skipped <= MAX_INTERPOLATED_GAP {
                    let last = *values.last().unwrap();
                    for s in 1..=skipped {
                        let w = s as f64 / (skipped + 1) as f64;
                        values.push(last + w * (v - last));
                    }
                    gaps.push(from..from + skipped);
                } else {
                    match gap_policy {
                        GapPolicy::Error => {
                            return Err(parse_err(
                                line,
                                format!("gap of {skipped} samples before this row exceeds {MAX_INTERPOLATED_GAP}"),
                            ))
                        }
                        GapPolicy::SplitAtGap => {
                            values.extend(std::iter::repeat_n(f64::NAN, skipped));
                            missing.push(from..from + skipped);
                        }
                    }
                }
            }
        }
        values.push(v);
        prev = Some(t);
    }

    Ok(TimeSeries {
        start,
        interval_secs,
        values,
        gaps,
        missing,
    })
}
