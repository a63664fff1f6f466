//! Scan CSV files: `x,P0,P1,P2` model curves and `x,shots,n0,n1,n2` counts.
//!
//! Files start with `#` comment lines; `# x: tau_us` or `# x: delta_khz`
//! names the abscissa.

use std::fmt::Write as _;
use std::path::Path;

use pairspin::detection::{OutcomeCounts, OutcomeDistribution};
use pairspin::inference::{CountData, ScanVariable};

use crate::error::CliError;
use crate::format::g12;

pub const MODEL_HEADER: [&str; 4] = ["x", "P0", "P1", "P2"];
pub const COUNT_HEADER: [&str; 5] = ["x", "shots", "n0", "n1", "n2"];

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Model { x: Vec<f64>, curves: Vec<OutcomeDistribution> },
    Counts(CountData),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// `None` when the file does not declare its abscissa.
    pub axis: Option<ScanVariable>,
    pub rows: Rows,
}

impl Table {
    pub fn x(&self) -> &[f64] {
        match &self.rows {
            Rows::Model { x, .. } => x,
            Rows::Counts(d) => &d.x,
        }
    }

    /// The declared axis, or `fallback`, or an error.
    pub fn axis_or(&self, fallback: Option<ScanVariable>) -> Result<ScanVariable, CliError> {
        fallback.or(self.axis).ok_or_else(|| {
            CliError::data("file does not declare its x axis; pass --axis tau_us|delta_khz").with_key("x")
        })
    }
}

/// Comment block written at the top of every CSV.
pub fn header_comments(command: &str, axis: ScanVariable, args_json: &str, config_json: &str) -> String {
    let mut s = String::new();
    writeln!(s, "# {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "# command: {command}").unwrap();
    writeln!(s, "# x: {}", axis.axis_label()).unwrap();
    writeln!(s, "# args: {args_json}").unwrap();
    writeln!(s, "# config: {config_json}").unwrap();
    s
}

pub fn model_csv(comments: &str, x: &[f64], curves: &[OutcomeDistribution]) -> String {
    let mut s = comments.to_string();
    s.push_str(&MODEL_HEADER.join(","));
    s.push('\n');
    for (xi, d) in x.iter().zip(curves) {
        writeln!(s, "{},{},{},{}", g12(*xi), g12(d.p0), g12(d.p1), g12(d.p2)).unwrap();
    }
    s
}

pub fn counts_csv(comments: &str, data: &CountData) -> String {
    let mut s = comments.to_string();
    s.push_str(&COUNT_HEADER.join(","));
    s.push('\n');
    for (xi, c) in data.x.iter().zip(&data.counts) {
        writeln!(s, "{},{},{},{},{}", g12(*xi), c.shots(), c.n0, c.n1, c.n2).unwrap();
    }
    s
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())).with_key("data"))?;
    parse_table(&text).map_err(|e| CliError {
        message: format!("{}: {}", path.display(), e.message),
        ..e
    })
}

pub fn parse_table(text: &str) -> Result<Table, CliError> {
    let mut axis = None;
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some(label) = line.trim().strip_prefix("x:") {
            let label = label.trim();
            axis = Some(ScanVariable::from_axis_label(label).ok_or_else(|| {
                CliError::data(format!("unknown x axis `{label}`")).with_key("x")
            })?);
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::data(format!("bad CSV header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let is_model = header == MODEL_HEADER;
    if !is_model && header != COUNT_HEADER {
        return Err(CliError::data(format!(
            "header `{}` is neither `{}` nor `{}`",
            header.join(","),
            MODEL_HEADER.join(","),
            COUNT_HEADER.join(",")
        ))
        .with_key("header"));
    }

    let mut x = Vec::new();
    let mut curves = Vec::new();
    let mut counts = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::data(format!("row {}: {e}", i + 1)))?;
        let cell = |k: usize| -> Result<&str, CliError> {
            record
                .get(k)
                .ok_or_else(|| CliError::data(format!("row {}: missing column", i + 1)).with_key(&header[k]))
        };
        let float = |k: usize| -> Result<f64, CliError> {
            let v = cell(k)?;
            v.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::data(format!("row {}: `{v}` is not a number", i + 1)).with_key(&header[k]))
        };
        let int = |k: usize| -> Result<u64, CliError> {
            let v = cell(k)?;
            v.parse::<u64>().map_err(|_| {
                CliError::data(format!("row {}: `{v}` is not a count", i + 1)).with_key(&header[k])
            })
        };
        x.push(float(0)?);
        if is_model {
            let d = OutcomeDistribution { p0: float(1)?, p1: float(2)?, p2: float(3)? };
            if d.as_array().iter().any(|p| !(0.0..=1.0).contains(p)) || (d.sum() - 1.0).abs() > 1e-9 {
                return Err(CliError::data(format!("row {}: probabilities are not a distribution", i + 1)));
            }
            curves.push(d);
        } else {
            let shots = int(1)?;
            let c = OutcomeCounts { n0: int(2)?, n1: int(3)?, n2: int(4)? };
            if c.shots() != shots {
                return Err(CliError::data(format!(
                    "row {}: n0 + n1 + n2 = {} but shots = {shots}",
                    i + 1,
                    c.shots()
                ))
                .with_key("shots"));
            }
            counts.push(c);
        }
    }
    if x.is_empty() {
        return Err(CliError::data("no data rows"));
    }
    let rows = if is_model {
        Rows::Model { x, curves }
    } else {
        Rows::Counts(CountData::new(x, counts).map_err(|e| CliError::data(e.to_string()))?)
    };
    Ok(Table { axis, rows })
}
