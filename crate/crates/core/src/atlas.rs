//! Parameter sweeps and the data files they produce.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{evaluate_profile, FamilyId};
use crate::solver::{solve_family, Diagnostic, SolutionRecord, SolveSpec, Status};
use crate::vars::Var;
use crate::verify::{attach_pde, collocation_domain};

pub const FORMAT_VERSION: u32 = 1;

pub const TABULAR_HEADER: &str = "family,m,A,B,D,F,G,H,x0,constraint_max,pde_max,feasible";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| {
                    if k == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub grid: BTreeMap<Var, GridAxis>,
    /// Template for every grid point; grid values override its fixed entries.
    pub base: SolveSpec,
    pub seed: u64,
}

impl SweepSpec {
    pub fn family(&self) -> FamilyId {
        self.base.family
    }

    pub fn validate(&self) -> Result<()> {
        for (v, axis) in &self.grid {
            if axis.count == 0 {
                return Err(Error::invalid(format!("grid axis `{}` has no points", v.name())));
            }
            if !axis.start.is_finite() || !axis.stop.is_finite() {
                return Err(Error::invalid(format!("grid axis `{}` is not finite", v.name())));
            }
            if self.base.free.contains(v) {
                return Err(Error::invalid(format!("`{}` is both a grid name and free", v.name())));
            }
        }
        Ok(())
    }

    /// Grid points in row-major order over the axes sorted by name.
    pub fn points(&self) -> Vec<BTreeMap<Var, f64>> {
        let mut out = vec![BTreeMap::new()];
        for (v, axis) in &self.grid {
            let vals = axis.values();
            out = out
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |x| {
                        let mut q = p.clone();
                        q.insert(*v, *x);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
    /// What produced the file; kept free of clocks so replays are identical.
    pub created_by: String,
}

impl Header {
    pub fn new(seed: u64, created_by: &str) -> Self {
        Header {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            created_by: created_by.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub values: BTreeMap<Var, f64>,
    /// Number of records this point contributed.
    pub records: usize,
    pub diagnostics: Vec<Diagnostic>,
    /// Set when the point could not be solved at all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasFile {
    pub format_version: u32,
    pub header: Header,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub points: Vec<GridPoint>,
    pub records: Vec<SolutionRecord>,
}

impl AtlasFile {
    pub fn from_records(records: Vec<SolutionRecord>, seed: u64, created_by: &str) -> Self {
        AtlasFile {
            format_version: FORMAT_VERSION,
            header: Header::new(seed, created_by),
            sweep: None,
            points: Vec::new(),
            records,
        }
    }

    pub fn converged(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.records.iter().filter(|r| r.is_converged())
    }
}

fn solve_point(spec: &SweepSpec, values: &BTreeMap<Var, f64>) -> (Vec<SolutionRecord>, GridPoint) {
    let mut s = spec.base.clone();
    s.seed = spec.seed;
    for (v, x) in values {
        s.fixed.insert(*v, *x);
    }
    let mut point = GridPoint {
        values: values.clone(),
        records: 0,
        diagnostics: Vec::new(),
        error: None,
    };
    match solve_family(&s) {
        Ok(out) => {
            let mut records = out.records;
            for r in &mut records {
                if r.status != Status::Degenerate {
                    if let Err(e) = attach_pde(r) {
                        point.error = Some(e.to_string());
                    }
                }
            }
            point.records = records.len();
            point.diagnostics = out.diagnostics;
            (records, point)
        }
        Err(e) => {
            point.error = Some(e.to_string());
            (Vec::new(), point)
        }
    }
}

/// Solves and verifies every grid point. Failures at a point are recorded
/// on that point; the sweep itself only fails on an invalid spec.
pub fn sweep(spec: &SweepSpec) -> Result<AtlasFile> {
    spec.validate()?;
    let results: Vec<_> = spec.points().par_iter().map(|p| solve_point(spec, p)).collect();
    let mut records = Vec::new();
    let mut points = Vec::new();
    for (r, p) in results {
        records.extend(r);
        points.push(p);
    }
    Ok(AtlasFile {
        format_version: FORMAT_VERSION,
        header: Header::new(spec.seed, "sweep"),
        sweep: Some(spec.clone()),
        points,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Structured,
    Tabular,
}

fn finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Serialization(format!("non-finite {what}: {x}")))
    }
}

fn check_record(r: &SolutionRecord) -> Result<()> {
    let c = &r.coeffs;
    for (n, x) in [("A", c.a), ("B", c.b), ("D", c.d), ("F", c.f), ("G", c.g), ("x0", c.x0)] {
        finite(n, x)?;
    }
    if let Some(h) = c.h {
        finite("H", h)?;
    }
    for (v, x) in r.params.to_assignment().iter() {
        if !v.is_coefficient() {
            finite(v.name(), x)?;
        }
    }
    finite("constraint_max", r.constraint_max)?;
    if let Some(p) = r.pde_max {
        finite("pde_max", p)?;
    }
    for v in &r.feasibility.violated {
        finite("slack", v.slack)?;
    }
    for (k, x) in &r.derived_ratios {
        finite(k, *x)?;
    }
    for x in r.provenance.spec.fixed.values() {
        finite("fixed value", *x)?;
    }
    Ok(())
}

fn check_file(file: &AtlasFile) -> Result<()> {
    for r in &file.records {
        check_record(r)?;
    }
    for p in &file.points {
        for x in p.values.values() {
            finite("grid value", *x)?;
        }
        for d in &p.diagnostics {
            if let Diagnostic::NoConvergence { best_norm: Some(n), .. } = d {
                finite("best_norm", *n)?;
            }
        }
    }
    Ok(())
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn export_records(file: &AtlasFile, format: ExportFormat) -> Result<Vec<u8>> {
    check_file(file)?;
    match format {
        ExportFormat::Structured => {
            let mut s = serde_json::to_string_pretty(file).map_err(|e| Error::Serialization(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        ExportFormat::Tabular => {
            let mut s = String::from(TABULAR_HEADER);
            s.push('\n');
            for r in &file.records {
                let c = &r.coeffs;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.family,
                    c.m.value(),
                    c.a,
                    c.b,
                    c.d,
                    c.f,
                    c.g,
                    cell(c.h),
                    c.x0,
                    r.constraint_max,
                    cell(r.pde_max),
                    r.feasibility.is_feasible()
                );
            }
            Ok(s.into_bytes())
        }
    }
}

pub fn parse_structured(bytes: &[u8]) -> Result<AtlasFile> {
    let file: AtlasFile = serde_json::from_slice(bytes).map_err(|e| Error::Serialization(e.to_string()))?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::Serialization(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            file.format_version
        )));
    }
    Ok(file)
}

/// `n` uniform samples `(x, φ, ψ)` over the collocation domain.
pub fn emit_profile_samples(record: &SolutionRecord, n: usize) -> Result<Vec<(f64, f64, f64)>> {
    if !record.is_converged() {
        return Err(Error::NonConvergedRecord);
    }
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 samples, got {n}")));
    }
    let (a, b) = collocation_domain(&record.coeffs)?;
    (0..n)
        .map(|k| {
            let x = if k == n - 1 {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            };
            let (p, q) = evaluate_profile(record.family, &record.coeffs, x)?;
            Ok((x, p, q))
        })
        .collect()
}
