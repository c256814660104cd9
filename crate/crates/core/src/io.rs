//! JSON inputs with line-level diagnostics and CSV outputs with a manifest
//! header line.
//!
//! Inputs:
//! - measure: `{"atoms": [[x, m], …], "segments": [[a, b, m], …]}`
//! - Cantor spec: `{"alpha": {"kind": "constant", "c": …}, "depth": N}`
//! - field: `{"fibers": [{"x": …, "w": …, "fiber": [[v, p], …]}, …]}`
//! - interval set: `{"intervals": [[a, b], …]}`

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::value::RawValue;

use crate::cantor::CantorSpec;
use crate::error::{Error, Result};
use crate::field::{Fiber, MeasureField};
use crate::intervals::IntervalSet;
use crate::measure::{Atom, Measure1D, Segment};
use crate::porosity::{PorosityProfile, Verdict};
use crate::rates::{CantorRow, RateSample};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

fn syntax(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// 1-based line and column of `part`, which must be a slice of `src`.
fn locate(src: &str, part: &str) -> (usize, usize) {
    let offset = (part.as_ptr() as usize).saturating_sub(src.as_ptr() as usize).min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn at(src: &str, part: &str, e: Error) -> Error {
    let (line, column) = locate(src, part);
    let message = match e {
        Error::Parse { message, .. } => message,
        other => other.to_string(),
    };
    Error::Parse { line, column, message }
}

/// Parses one borrowed entry, attributing failures to its position.
fn entry<T: DeserializeOwned>(src: &str, raw: &RawValue) -> Result<T> {
    serde_json::from_str(raw.get()).map_err(|e| at(src, raw.get(), syntax(e)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure<'a> {
    #[serde(default, borrow)]
    atoms: Vec<&'a RawValue>,
    #[serde(default, borrow)]
    segments: Vec<&'a RawValue>,
}

pub fn parse_measure(src: &str) -> Result<Measure1D> {
    let raw: RawMeasure = serde_json::from_str(src).map_err(syntax)?;
    let mut atoms = Vec::with_capacity(raw.atoms.len());
    for r in &raw.atoms {
        let (position, mass): (f64, f64) = entry(src, r)?;
        let atom = Atom { position, mass };
        Measure1D::from_parts(vec![atom], vec![]).map_err(|e| at(src, r.get(), e))?;
        atoms.push(atom);
    }
    let mut segments = Vec::with_capacity(raw.segments.len());
    for r in &raw.segments {
        let (left, right, mass): (f64, f64, f64) = entry(src, r)?;
        let seg = Segment { left, right, mass };
        Measure1D::from_parts(vec![], vec![seg]).map_err(|e| at(src, r.get(), e))?;
        segments.push(seg);
    }
    Measure1D::from_parts(atoms, segments).map_err(|e| at(src, src, e))
}

pub fn parse_cantor_spec(src: &str) -> Result<CantorSpec> {
    let raw: &RawValue = serde_json::from_str(src).map_err(syntax)?;
    let spec: CantorSpec = serde_json::from_str(raw.get()).map_err(syntax)?;
    spec.validate().map_err(|e| match e {
        Error::DepthExceeded { .. } => e,
        other => at(src, raw.get(), other),
    })?;
    Ok(spec)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField<'a> {
    #[serde(borrow)]
    fibers: Vec<&'a RawValue>,
}

pub fn parse_field(src: &str) -> Result<MeasureField> {
    let raw: RawField = serde_json::from_str(src).map_err(syntax)?;
    let mut fibers: Vec<Fiber> = Vec::with_capacity(raw.fibers.len());
    for r in &raw.fibers {
        let fiber: Fiber = entry(src, r)?;
        // validate incrementally so the failing entry is the one reported
        fibers.push(fiber);
        if let Err(e) = MeasureField::new(fibers[fibers.len().saturating_sub(2)..].to_vec()) {
            return Err(at(src, r.get(), e));
        }
    }
    MeasureField::new(fibers).map_err(|e| at(src, src, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntervals<'a> {
    #[serde(borrow)]
    intervals: Vec<&'a RawValue>,
}

/// Sorted, pairwise disjoint closed intervals; `[x, x]` is a point.
pub fn parse_intervals(src: &str) -> Result<IntervalSet> {
    let raw: RawIntervals = serde_json::from_str(src).map_err(syntax)?;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.intervals.len());
    for r in &raw.intervals {
        let iv: (f64, f64) = entry(src, r)?;
        out.push(iv);
        IntervalSet::new(out[out.len().saturating_sub(2)..].to_vec()).map_err(|e| at(src, r.get(), e))?;
    }
    if out.is_empty() {
        return Err(at(src, src, Error::InvalidSpec("no intervals".into())));
    }
    IntervalSet::new(out)
}

/// First line of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub config_hash: String,
    pub seed: u64,
}

impl std::fmt::Display for Manifest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "# porous-ot {VERSION} config={} seed={}", self.config_hash, self.seed)
    }
}

/// 17 significant digits; parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Io { path: "<csv>".into(), message: e.to_string() }
}

fn write_table<W: Write>(
    mut out: W,
    manifest: &Manifest,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
    footer: Option<String>,
) -> Result<()> {
    writeln!(out, "{manifest}").map_err(csv_err)?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(csv_err)?;
    }
    if let Some(line) = footer {
        writeln!(out, "{line}").map_err(csv_err)?;
    }
    Ok(())
}

pub fn write_rate_csv<W: Write>(out: W, manifest: &Manifest, rows: &[RateSample]) -> Result<()> {
    let body = rows.iter().map(|r| {
        [r.h, r.p, r.distance, r.quotient, r.truncation_error_bound].map(fmt_f64).to_vec()
    });
    write_table(out, manifest, &["h", "p", "distance", "quotient", "trunc_bound"], body, None)
}

pub fn write_cantor_csv<W: Write>(out: W, manifest: &Manifest, rows: &[CantorRow]) -> Result<()> {
    let body = rows.iter().map(|r| {
        let s = &r.sample;
        let mut v = vec![r.probe.to_string(), r.n.to_string()];
        v.extend([s.h, s.p, s.distance, s.quotient, s.truncation_error_bound].map(fmt_f64));
        v
    });
    let header = ["probe", "n", "h", "p", "distance", "quotient", "trunc_bound"];
    write_table(out, manifest, &header, body, None)
}

pub fn write_profile_csv<W: Write>(
    out: W,
    manifest: &Manifest,
    profile: &PorosityProfile,
    verdict: Verdict,
    threshold: f64,
) -> Result<()> {
    let body = profile.rows.iter().map(|r| vec![fmt_f64(r.s), fmt_f64(r.tau)]);
    let footer = format!("# verdict={verdict} threshold={}", fmt_f64(threshold));
    write_table(out, manifest, &["s", "tau"], body, Some(footer))
}
