//! Plain CSV in and out: comma separator, one header row, floats with 17
//! significant digits so every value parses back to the same bits.
//!
//! Lines starting with `#` carry grid metadata as `key=value` pairs.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::calibrate::ErrorReport;
use crate::error::{Error, Result};
use crate::grid::{TimeGrid, Trajectory};
use crate::pdelift::{Field2D, SpaceTimeGrid};

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Io(format!("cannot parse '{s}' as a number")))
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("'{}' has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

fn metadata_line(kind: &str, pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {kind} {}\n", body.join(","))
}

/// Columns of equal length under one header row.
pub fn table_csv(headers: &[&str], columns: &[&[f64]]) -> Result<String> {
    if headers.len() != columns.len() {
        return Err(Error::InvalidInput(format!("{} headers for {} columns", headers.len(), columns.len())));
    }
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidInput("columns differ in length".into()));
    }
    let mut out = headers.join(",");
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = columns.iter().map(|c| format_float(c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Parsed CSV: metadata from `#` lines, header names, and numeric columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: HashMap<String, String>,
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::Io(format!("missing column '{name}'")))
    }

    fn meta<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.metadata
            .get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Io(format!("missing or malformed metadata '{key}'")))
    }
}

pub fn parse_table(text: &str) -> Result<Table> {
    let mut table = Table::default();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let pairs = meta.trim().split_once(' ').map_or("", |(_, rest)| rest);
            for pair in pairs.split(',') {
                if let Some((k, v)) = pair.split_once('=') {
                    table.metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
            continue;
        }
        if table.headers.is_empty() {
            table.headers = line.split(',').map(|h| h.trim().to_string()).collect();
            table.columns = vec![Vec::new(); table.headers.len()];
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != table.headers.len() {
            return Err(Error::Io(format!("row '{line}' has {} cells, expected {}", cells.len(), table.headers.len())));
        }
        for (col, cell) in table.columns.iter_mut().zip(cells) {
            col.push(parse_float(cell)?);
        }
    }
    if table.headers.is_empty() {
        return Err(Error::Io("no header row".into()));
    }
    Ok(table)
}

pub fn read_table(path: &Path) -> Result<Table> {
    parse_table(&fs::read_to_string(path)?)
}

/// `(t, value)` rows under a grid metadata line.
pub fn trajectory_csv(trajectory: &Trajectory, value_header: &str) -> String {
    let g = trajectory.grid;
    let mut out = metadata_line(
        "grid",
        &[("t0", format_float(g.t0)), ("dt", format_float(g.dt)), ("n", g.n.to_string())],
    );
    let times: Vec<f64> = g.times().collect();
    out.push_str(&table_csv(&["t", value_header], &[&times, &trajectory.values]).expect("matching lengths"));
    out
}

pub fn write_trajectory(path: &Path, trajectory: &Trajectory, value_header: &str) -> Result<()> {
    write_atomic(path, &trajectory_csv(trajectory, value_header))
}

/// Reads a file from [`write_trajectory`]; `column` picks the value column.
pub fn parse_trajectory(text: &str, column: &str) -> Result<Trajectory> {
    let table = parse_table(text)?;
    let grid = TimeGrid::new(table.meta("t0")?, table.meta("dt")?, table.meta("n")?)?;
    Trajectory::new(grid, table.column(column)?.to_vec())
}

pub fn read_trajectory(path: &Path, column: &str) -> Result<Trajectory> {
    parse_trajectory(&fs::read_to_string(path)?, column)
}

pub const REPORT_HEADER: &str = "source,s1,s2,min_er,max_er,horizon,dt,optimized_flag";

pub fn report_csv(reports: &[ErrorReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.source_tag,
            format_float(r.s1),
            format_float(r.s2),
            format_float(r.min_er),
            format_float(r.max_er),
            format_float(r.horizon),
            format_float(r.dt),
            u8::from(r.optimized)
        );
    }
    out
}

/// One parsed report line.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub source: String,
    pub s1: f64,
    pub s2: f64,
    pub min_er: f64,
    pub max_er: f64,
    pub horizon: f64,
    pub dt: f64,
    pub optimized: bool,
}

pub fn parse_report(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(REPORT_HEADER) {
        return Err(Error::Io("report header mismatch".into()));
    }
    lines
        .map(|line| {
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 8 {
                return Err(Error::Io(format!("report row '{line}' has {} cells", c.len())));
            }
            Ok(ReportRow {
                source: c[0].to_string(),
                s1: parse_float(c[1])?,
                s2: parse_float(c[2])?,
                min_er: parse_float(c[3])?,
                max_er: parse_float(c[4])?,
                horizon: parse_float(c[5])?,
                dt: parse_float(c[6])?,
                optimized: c[7].trim() == "1",
            })
        })
        .collect()
}

fn field_metadata(field: &Field2D) -> String {
    let g = field.grid;
    metadata_line(
        "field",
        &[
            ("x0", format_float(g.x0)),
            ("dx", format_float(g.dx)),
            ("nx", g.nx.to_string()),
            ("t0", format_float(g.t0)),
            ("dt", format_float(g.dt)),
            ("nt", g.nt.to_string()),
            ("truncation_warning", u8::from(field.truncation_warning).to_string()),
        ],
    )
}

/// `(x, t, w)` triplets and the companion `(x, t, masked)` file.
pub fn field_csv(field: &Field2D) -> (String, String) {
    let g = field.grid;
    let meta = field_metadata(field);
    let mut data = format!("{meta}x,t,w\n");
    let mut mask = format!("{meta}x,t,masked\n");
    for i in 0..g.nx {
        for j in 0..g.nt {
            let (x, t) = (format_float(g.x(i)), format_float(g.t(j)));
            let _ = writeln!(data, "{x},{t},{}", format_float(field.get(i, j)));
            let _ = writeln!(mask, "{x},{t},{}", u8::from(field.is_masked(i, j)));
        }
    }
    (data, mask)
}

pub fn write_field(data_path: &Path, mask_path: &Path, field: &Field2D) -> Result<()> {
    let (data, mask) = field_csv(field);
    write_atomic(data_path, &data)?;
    write_atomic(mask_path, &mask)
}

pub fn parse_field(data: &str, mask: &str) -> Result<Field2D> {
    let d = parse_table(data)?;
    let m = parse_table(mask)?;
    let grid = SpaceTimeGrid::new(
        d.meta("x0")?,
        d.meta("dx")?,
        d.meta("nx")?,
        d.meta("t0")?,
        d.meta("dt")?,
        d.meta("nt")?,
    )?;
    let flags = m.column("masked")?.iter().map(|v| *v != 0.0).collect();
    let mut field = Field2D::new(grid, d.column("w")?.to_vec(), flags)?;
    field.truncation_warning = d.meta::<u8>("truncation_warning")? != 0;
    Ok(field)
}

pub fn read_field(data_path: &Path, mask_path: &Path) -> Result<Field2D> {
    parse_field(&fs::read_to_string(data_path)?, &fs::read_to_string(mask_path)?)
}
