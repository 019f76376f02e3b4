//! Output plumbing: the report envelope, JSON with 17 significant digits,
//! CSV export of scans, and grid parsing for the command line.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::bounds::{RegionScan, SubspaceCensus};
use crate::channels::WitnessReport;
use crate::constructions::ConstructionSpec;
use crate::error::{ensure, Error, Result};
use crate::oracle::{max_schmidt_in_subspace, OracleConfig, OracleEstimate};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact CSV header of region scans.
pub const SCAN_CSV_HEADER: [&str; 8] = ["family", "p", "d", "member", "n_or_x0", "C", "c", "margin"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstructionSummary {
    pub spec: ConstructionSpec,
    pub dim: usize,
    pub ambient_dims: Vec<usize>,
    pub orthonormality_residual: f64,
    /// Oracle estimate of the largest `μ₁²` over unit vectors of the space.
    pub max_schmidt_sq: f64,
    pub max_schmidt_spread: f64,
}

pub fn construction_summary(spec: &ConstructionSpec, cfg: &OracleConfig) -> Result<ConstructionSummary> {
    let w = spec.build()?;
    let est = max_schmidt_in_subspace(&w, cfg)?;
    Ok(ConstructionSummary {
        spec: spec.clone(),
        dim: w.dim(),
        ambient_dims: w.ambient_dims().to_vec(),
        orthonormality_residual: w.orthonormality_residual(),
        max_schmidt_sq: est.value,
        max_schmidt_spread: est.spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "kebab-case")]
pub enum Payload {
    Construction(ConstructionSummary),
    Witness(Box<WitnessReport>),
    Scan(RegionScan),
    Oracle(Box<OracleEstimate>),
    Census(SubspaceCensus),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportEnvelope {
    pub tool_version: String,
    pub command: String,
    /// UTC, ISO-8601.
    pub timestamp: String,
    pub seed: u64,
    pub payload: Payload,
}

impl ReportEnvelope {
    pub fn new(command: impl Into<String>, seed: u64, payload: Payload) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed,
            payload,
        }
    }
}

/// Pretty-printing JSON formatter that writes every float with 17
/// significant digits.
struct PreciseFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// `{:.16e}`: 17 significant digits, which round-trips every finite `f64`.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        PreciseFormatter { inner: PrettyFormatter::with_indent(b"  ") },
    );
    value.serialize(&mut ser).map_err(|e| Error::Resource(format!("JSON serialization failed: {e}")))?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Writes a scan as CSV with [`SCAN_CSV_HEADER`], one row per grid point.
pub fn write_scan_csv<W: Write>(scan: &RegionScan, writer: W) -> Result<()> {
    let io_err = |e: csv::Error| Error::Resource(format!("CSV write failed: {e}"));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SCAN_CSV_HEADER).map_err(io_err)?;
    for row in &scan.rows {
        w.write_record([
            scan.family.as_str().to_string(),
            format_float(row.p),
            row.d.to_string(),
            row.member.as_str().to_string(),
            opt_float(row.n_or_x0),
            opt_float(row.lower),
            opt_float(row.upper),
            opt_float(row.margin),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Resource(format!("CSV write failed: {e}")))?;
    Ok(())
}

/// Parses `"3"`, `"2.5,3,4"` into a list of Rényi orders.
pub fn parse_p_grid(s: &str) -> Result<Vec<f64>> {
    let grid = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Argument(format!("bad p value '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    ensure!(!grid.is_empty(), Argument, "empty p grid");
    ensure!(grid.iter().all(|p| p.is_finite()), Argument, "p grid must be finite");
    Ok(grid)
}

/// Parses a comma list whose items are integers or inclusive ranges `a..b`,
/// e.g. `"2..6,8,10"`.
pub fn parse_d_grid(s: &str) -> Result<Vec<usize>> {
    let bad = |t: &str| Error::Argument(format!("bad d value '{t}'"));
    let mut grid = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match item.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad(item))?;
                let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad(item))?;
                ensure!(a <= b, Argument, "empty d range '{item}'");
                grid.extend(a..=b);
            }
            None => grid.push(item.parse().map_err(|_| bad(item))?),
        }
    }
    ensure!(!grid.is_empty(), Argument, "empty d grid");
    Ok(grid)
}
