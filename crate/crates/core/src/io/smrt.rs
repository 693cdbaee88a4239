//! The `SMRT 1` container: a magic line, ordered `key = value` header lines,
//! a `data` separator, and rows of ASCII floats with 17 significant digits.
//!
//! Header keys are a fixed set per kind:
//!
//! | kind | keys |
//! |------|------|
//! | all | `kind`, `dim`, `provenance.command`, `provenance.config_hash`, optional `config.<key>` |
//! | boundary | `centers.layout` (`circle`, `sphere`, `general`), `centers.count`, `centers.n_theta`, `centers.offset`, `centers.n_polar`, `centers.n_az`, `t.start`, `t.end`, `t.len` |
//! | field | `m_max`, `r.start`, `r.end`, `r.len` |
//! | spectrum | `m_max`, `t.start`, `t.end`, `t.len` |
//! | report | `report.all_pass`, `report.data_energy`, `report.<condition>.{worst,threshold,evaluated,result}` |
//!
//! Boundary payloads hold one row per center (general layouts first list
//! `x y z weight nx ny nz` per center); field and spectrum payloads one row per
//! channel in basis order; report payloads rows `family k m l j lambda raw value`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::forward::BoundaryData;
use crate::grid::{CenterGrid, CenterLayout, UniformGrid};
use crate::phantom::PolarField;
use crate::range::{HarmonicSpectrum, RangeReport};
use crate::specfun::HarmonicBasis;

use super::config::CONFIG_KEYS;

/// First line of every file.
pub const MAGIC: &str = "SMRT 1";

/// Line separating header and payload.
const DATA_MARKER: &str = "data";

/// Report row families, indexed by the first column of a report payload row.
pub const REPORT_FAMILIES: [&str; 6] = ["moment", "moment-fit", "recurrence", "growth", "orthogonality", "bessel-zero"];

const COMMON_KEYS: [&str; 4] = ["kind", "dim", "provenance.command", "provenance.config_hash"];
const BOUNDARY_KEYS: [&str; 9] = [
    "centers.layout",
    "centers.count",
    "centers.n_theta",
    "centers.offset",
    "centers.n_polar",
    "centers.n_az",
    "t.start",
    "t.end",
    "t.len",
];
const FIELD_KEYS: [&str; 4] = ["m_max", "r.start", "r.end", "r.len"];
const SPECTRUM_KEYS: [&str; 4] = ["m_max", "t.start", "t.end", "t.len"];
const REPORT_SUFFIXES: [&str; 4] = ["worst", "threshold", "evaluated", "result"];

/// File kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Boundary,
    Field,
    Spectrum,
    Report,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Boundary => "boundary",
            Kind::Field => "field",
            Kind::Spectrum => "spectrum",
            Kind::Report => "report",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        match s {
            "boundary" => Some(Kind::Boundary),
            "field" => Some(Kind::Field),
            "spectrum" => Some(Kind::Spectrum),
            "report" => Some(Kind::Report),
            _ => None,
        }
    }

    fn allows(self, key: &str) -> bool {
        if COMMON_KEYS.contains(&key) {
            return true;
        }
        if let Some(k) = key.strip_prefix("config.") {
            return CONFIG_KEYS.contains(&k);
        }
        match self {
            Kind::Boundary => BOUNDARY_KEYS.contains(&key),
            Kind::Field => FIELD_KEYS.contains(&key),
            Kind::Spectrum => SPECTRUM_KEYS.contains(&key),
            Kind::Report => {
                if key == "report.all_pass" || key == "report.data_energy" {
                    return true;
                }
                key.strip_prefix("report.")
                    .and_then(|rest| rest.rsplit_once('.'))
                    .is_some_and(|(c, s)| REPORT_FAMILIES.contains(&c) && REPORT_SUFFIXES.contains(&s))
            }
        }
    }
}

/// Command line and configuration hash of the run that produced a file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub command: String,
    pub config_hash: String,
    /// Serialized configuration entries.
    pub config: Vec<(String, String)>,
}

/// Parsed container: ordered header and numeric payload rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SmrtFile {
    pub kind: Kind,
    pub header: Vec<(String, String)>,
    pub payload: Vec<Vec<f64>>,
}

impl SmrtFile {
    fn new(kind: Kind, dim: usize, prov: &Provenance) -> Self {
        let mut header = vec![
            ("kind".to_string(), kind.as_str().to_string()),
            ("dim".to_string(), dim.to_string()),
            ("provenance.command".to_string(), prov.command.replace('\n', " ")),
            ("provenance.config_hash".to_string(), prov.config_hash.clone()),
        ];
        header.extend(prov.config.iter().map(|(k, v)| (format!("config.{k}"), v.clone())));
        SmrtFile { kind, header, payload: Vec::new() }
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.header.push((key.to_string(), value.to_string()));
    }

    /// Value of a header key.
    pub fn get(&self, key: &str) -> Result<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    fn get_usize(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.parse().map_err(|_| Error::InvalidArgument(format!("header key `{key}`: expected an integer, got `{v}`")))
    }

    fn get_f64(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        v.parse().map_err(|_| Error::InvalidArgument(format!("header key `{key}`: expected a number, got `{v}`")))
    }

    pub fn dim(&self) -> Result<usize> {
        let n = self.get_usize("dim")?;
        if n != 2 && n != 3 {
            return Err(Error::Dimension(n));
        }
        Ok(n)
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            command: self.get("provenance.command").unwrap_or("").to_string(),
            config_hash: self.get("provenance.config_hash").unwrap_or("").to_string(),
            config: self
                .header
                .iter()
                .filter_map(|(k, v)| k.strip_prefix("config.").map(|k| (k.to_string(), v.clone())))
                .collect(),
        }
    }

    /// Parses the textual form, rejecting unknown or duplicate keys.
    pub fn parse(text: &str) -> Result<SmrtFile> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim_end() == MAGIC => {}
            Some((_, l)) => return Err(Error::Parse { line: 1, message: format!("expected `{MAGIC}`, got `{l}`") }),
            None => return Err(Error::Parse { line: 1, message: "empty file".into() }),
        }
        let mut header: Vec<(String, String)> = Vec::new();
        let mut in_data = false;
        let mut payload = Vec::new();
        for (i, line) in lines {
            if in_data {
                if line.trim().is_empty() {
                    continue;
                }
                let row = line
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<Vec<f64>, _>>()
                    .map_err(|e| Error::Parse { line: i + 1, message: format!("bad number: {e}") })?;
                payload.push(row);
                continue;
            }
            if line.trim() == DATA_MARKER {
                in_data = true;
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if header.iter().any(|(h, _)| *h == k) {
                return Err(Error::Parse { line: i + 1, message: format!("duplicate header key `{k}`") });
            }
            header.push((k, v));
        }
        if !in_data {
            return Err(Error::MissingKey(DATA_MARKER.into()));
        }
        let kind_str = header
            .iter()
            .find(|(k, _)| k == "kind")
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::MissingKey("kind".into()))?;
        let kind = Kind::parse(&kind_str)
            .ok_or_else(|| Error::InvalidArgument(format!("header key `kind`: unknown kind `{kind_str}`")))?;
        if let Some((k, _)) = header.iter().find(|(k, _)| !kind.allows(k)) {
            return Err(Error::UnknownKey(k.clone()));
        }
        let file = SmrtFile { kind, header, payload };
        file.dim()?;
        Ok(file)
    }

    /// Textual form; `parse(to_text(x)) = x` exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(MAGIC);
        s.push('\n');
        for (k, v) in &self.header {
            let _ = writeln!(s, "{k} = {v}");
        }
        s.push_str(DATA_MARKER);
        s.push('\n');
        for row in &self.payload {
            let mut first = true;
            for v in row {
                if !first {
                    s.push(' ');
                }
                first = false;
                let _ = write!(s, "{v:.16e}");
            }
            s.push('\n');
        }
        s
    }

    fn expect_kind(&self, kind: Kind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidArgument(format!(
                "header key `kind`: expected `{}`, got `{}`",
                kind.as_str(),
                self.kind.as_str()
            )));
        }
        Ok(())
    }

    fn grid(&self, prefix: &str) -> Result<UniformGrid> {
        UniformGrid::new(
            self.get_f64(&format!("{prefix}.start"))?,
            self.get_f64(&format!("{prefix}.end"))?,
            self.get_usize(&format!("{prefix}.len"))?,
        )
    }

    fn push_grid(&mut self, prefix: &str, g: &UniformGrid) {
        self.push(&format!("{prefix}.start"), format!("{:.16e}", g.start));
        self.push(&format!("{prefix}.end"), format!("{:.16e}", g.end));
        self.push(&format!("{prefix}.len"), g.len);
    }

    fn rows(&self, range: std::ops::Range<usize>, width: usize) -> Result<&[Vec<f64>]> {
        if self.payload.len() < range.end {
            return Err(Error::Parse {
                line: 0,
                message: format!("payload has {} rows, expected {}", self.payload.len(), range.end),
            });
        }
        let rows = &self.payload[range];
        if let Some(bad) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::Parse {
                line: 0,
                message: format!("payload row {} has {} values, expected {width}", bad + 1, rows[bad].len()),
            });
        }
        Ok(rows)
    }
}

/// Writes a file.
pub fn write_file(path: &Path, f: &SmrtFile) -> Result<()> {
    std::fs::write(path, f.to_text())?;
    Ok(())
}

/// Reads and parses a file.
pub fn read_file(path: &Path) -> Result<SmrtFile> {
    SmrtFile::parse(&std::fs::read_to_string(path)?)
}

pub fn boundary_to_file(g: &BoundaryData, prov: &Provenance) -> SmrtFile {
    let mut f = SmrtFile::new(Kind::Boundary, g.n, prov);
    let c = &g.centers;
    match c.layout {
        CenterLayout::Circle { n_theta, offset } => {
            f.push("centers.layout", "circle");
            f.push("centers.n_theta", n_theta);
            f.push("centers.offset", format!("{offset:.16e}"));
        }
        CenterLayout::Sphere { n_polar, n_az } => {
            f.push("centers.layout", "sphere");
            f.push("centers.n_polar", n_polar);
            f.push("centers.n_az", n_az);
        }
        CenterLayout::General => {
            f.push("centers.layout", "general");
            f.push("centers.count", c.len());
            for i in 0..c.len() {
                let (p, w, nv) = (c.points[i], c.weights[i], c.normals[i]);
                f.payload.push(vec![p[0], p[1], p[2], w, nv[0], nv[1], nv[2]]);
            }
        }
    }
    f.push_grid("t", &g.t_grid);
    for i in 0..c.len() {
        f.payload.push(g.row(i).to_vec());
    }
    f
}

pub fn boundary_from_file(f: &SmrtFile) -> Result<BoundaryData> {
    f.expect_kind(Kind::Boundary)?;
    let n = f.dim()?;
    let t_grid = f.grid("t")?;
    let (centers, skip) = match f.get("centers.layout")? {
        "circle" if n == 2 => (CenterGrid::circle_rotated(f.get_usize("centers.n_theta")?, f.get_f64("centers.offset")?)?, 0),
        "sphere" if n == 3 => (CenterGrid::sphere(f.get_usize("centers.n_polar")?, f.get_usize("centers.n_az")?)?, 0),
        "general" => {
            let count = f.get_usize("centers.count")?;
            let rows = f.rows(0..count, 7)?;
            let points = rows.iter().map(|r| [r[0], r[1], r[2]]).collect();
            let weights = rows.iter().map(|r| r[3]).collect();
            let normals = rows.iter().map(|r| [r[4], r[5], r[6]]).collect();
            (CenterGrid::general(n, points, weights, normals)?, count)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "header key `centers.layout`: `{other}` is not valid in dimension {n}"
            )))
        }
    };
    let rows = f.rows(skip..skip + centers.len(), t_grid.len)?;
    if f.payload.len() != skip + centers.len() {
        return Err(Error::Parse { line: 0, message: "payload has extra rows".into() });
    }
    let values = rows.iter().flatten().copied().collect();
    Ok(BoundaryData { n, centers, t_grid, values })
}

pub fn field_to_file(field: &PolarField, prov: &Provenance) -> SmrtFile {
    let mut f = SmrtFile::new(Kind::Field, field.n, prov);
    f.push("m_max", field.m_max);
    f.push_grid("r", &field.r_grid);
    f.payload = field.coeffs.clone();
    f
}

pub fn field_from_file(f: &SmrtFile) -> Result<PolarField> {
    f.expect_kind(Kind::Field)?;
    let n = f.dim()?;
    let m_max = f.get_usize("m_max")?;
    let r_grid = f.grid("r")?;
    let k = HarmonicBasis::new(n, m_max)?.len();
    let coeffs = f.rows(0..k, r_grid.len)?.to_vec();
    if f.payload.len() != k {
        return Err(Error::Parse { line: 0, message: format!("expected {k} channel rows, got {}", f.payload.len()) });
    }
    Ok(PolarField { n, m_max, r_grid, coeffs })
}

pub fn spectrum_to_file(spec: &HarmonicSpectrum, prov: &Provenance) -> SmrtFile {
    let mut f = SmrtFile::new(Kind::Spectrum, spec.n, prov);
    f.push("m_max", spec.m_max);
    f.push_grid("t", &spec.t_grid);
    f.payload = spec.channels.clone();
    f
}

pub fn spectrum_from_file(f: &SmrtFile) -> Result<HarmonicSpectrum> {
    f.expect_kind(Kind::Spectrum)?;
    let n = f.dim()?;
    let m_max = f.get_usize("m_max")?;
    let t_grid = f.grid("t")?;
    let k = HarmonicBasis::new(n, m_max)?.len();
    let channels = f.rows(0..k, t_grid.len)?.to_vec();
    if f.payload.len() != k {
        return Err(Error::Parse { line: 0, message: format!("expected {k} channel rows, got {}", f.payload.len()) });
    }
    HarmonicSpectrum::new(n, m_max, t_grid, channels)
}

/// Report as read back from disk: summary header and residual rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFile {
    pub all_pass: bool,
    pub summary: Vec<(String, String)>,
    /// Rows `family k m l j lambda raw value` (`NaN` where not applicable).
    pub rows: Vec<[f64; 8]>,
}

pub fn report_to_file(rep: &RangeReport, prov: &Provenance) -> SmrtFile {
    let mut f = SmrtFile::new(Kind::Report, rep.n, prov);
    f.push("report.all_pass", rep.all_pass());
    f.push("report.data_energy", format!("{:.16e}", rep.data_energy));
    for c in &rep.conditions {
        let verdict = match c.pass {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "n/a",
        };
        f.push(&format!("report.{}.worst", c.name), format!("{:.16e}", c.worst));
        f.push(&format!("report.{}.threshold", c.name), format!("{:.16e}", c.threshold));
        f.push(&format!("report.{}.evaluated", c.name), c.evaluated);
        f.push(&format!("report.{}.result", c.name), verdict);
    }
    let nan = f64::NAN;
    for r in &rep.moment {
        f.payload.push(vec![0.0, r.k as f64, r.m as f64, r.l as f64, nan, nan, r.moment, r.value]);
    }
    for (k, v) in rep.fit.iter().enumerate() {
        f.payload.push(vec![1.0, k as f64, nan, nan, nan, nan, nan, *v]);
    }
    for (k, v) in rep.recurrence.iter().enumerate() {
        f.payload.push(vec![2.0, (k + 1) as f64, nan, nan, nan, nan, nan, *v]);
    }
    if let Some(g) = &rep.growth {
        for k in 1..g.roots.len() {
            f.payload.push(vec![3.0, k as f64, nan, nan, nan, nan, g.max_abs[k], g.roots[k]]);
        }
    }
    for r in &rep.orthogonality {
        f.payload.push(vec![4.0, nan, r.m as f64, r.l as f64, r.j as f64, r.lambda, r.raw, r.value]);
    }
    for r in &rep.bessel_zero {
        f.payload.push(vec![5.0, nan, r.m as f64, r.l as f64, r.j as f64, r.lambda, r.raw, r.value.unwrap_or(nan)]);
    }
    f
}

impl ReportFile {
    pub fn from_file(f: &SmrtFile) -> Result<ReportFile> {
        f.expect_kind(Kind::Report)?;
        let all_pass = match f.get("report.all_pass")? {
            "true" => true,
            "false" => false,
            other => return Err(Error::InvalidArgument(format!("header key `report.all_pass`: `{other}`"))),
        };
        let summary = f.header.iter().filter(|(k, _)| k.starts_with("report.")).cloned().collect();
        let rows = f
            .rows(0..f.payload.len(), 8)?
            .iter()
            .map(|r| {
                let mut a = [0.0; 8];
                a.copy_from_slice(r);
                a
            })
            .collect();
        Ok(ReportFile { all_pass, summary, rows })
    }
}
