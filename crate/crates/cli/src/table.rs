//! Output rows and their CSV/JSON encodings.
//!
//! Reals are written with 12 significant digits; absent values are empty CSV
//! fields and JSON `null`.

use std::io::Write;

use inclined_casimir::EnergyResult;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, Units};
use crate::error::{CliError, Result};

pub const SWEEP_HEADER: [&str; 8] = [
    "r",
    "theta",
    "E_num",
    "E_pfa",
    "E_asym",
    "E_gradexp",
    "ratio_num_pfa",
    "omega_ratio",
];

/// Header used with `--units raw`.
pub const SWEEP_HEADER_RAW: [&str; 8] = [
    "d",
    "theta",
    "E_num_d",
    "E_pfa_d",
    "E_asym_d",
    "E_gradexp_d",
    "ratio_num_pfa",
    "omega_ratio",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(Option<f64>),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => v
                .filter(|x| x.is_finite())
                .map(format_real)
                .unwrap_or_default(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // round-tripping through the text keeps CSV and JSON identical
            Cell::Real(v) => v
                .filter(|x| x.is_finite())
                .and_then(|x| format_real(x).parse::<f64>().ok())
                .map_or(Value::Null, Value::from),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

pub fn format_real(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn parse_optional(s: &str) -> std::result::Result<Option<f64>, std::num::ParseFloatError> {
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// A header plus rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let err = |e: csv::Error| CliError::Write(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Write(e.to_string()))
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let err = |e: std::io::Error| CliError::Write(e.to_string());
        serde_json::to_writer_pretty(&mut *out, &rows)
            .map_err(|e| CliError::Write(e.to_string()))?;
        out.write_all(b"\n").map_err(err)
    }
}

/// One point of a distance or angle sweep. Energies are in `hbar c / R`
/// (zero temperature) or `k_B T` (classical).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub theta: f64,
    pub e_num: Option<f64>,
    pub e_pfa: Option<f64>,
    pub e_asym: Option<f64>,
    pub e_gradexp: Option<f64>,
    pub ratio_num_pfa: Option<f64>,
    pub omega_ratio: Option<f64>,
}

impl SweepRow {
    pub fn cells(&self, units: Units) -> Vec<Cell> {
        let (x, scale) = match units {
            Units::Scaled => (self.r, 1.0),
            Units::Raw => (1.0 / self.r, 1.0 / self.r),
        };
        let e = |v: Option<f64>| Cell::Real(v.map(|v| v * scale));
        vec![
            Cell::Real(Some(x)),
            Cell::Real(Some(self.theta)),
            e(self.e_num),
            e(self.e_pfa),
            e(self.e_asym),
            e(self.e_gradexp),
            Cell::Real(self.ratio_num_pfa),
            Cell::Real(self.omega_ratio),
        ]
    }

    /// Parses a record written with [`Units::Scaled`].
    pub fn from_record(record: &csv::StringRecord) -> Result<SweepRow> {
        if record.len() != SWEEP_HEADER.len() {
            return Err(CliError::usage(format!(
                "expected {} columns, got {}",
                SWEEP_HEADER.len(),
                record.len()
            )));
        }
        let mut v = [None; 8];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = parse_optional(field)
                .map_err(|e| CliError::usage(format!("bad number '{field}': {e}")))?;
        }
        let need = |x: Option<f64>, name: &str| {
            x.ok_or_else(|| CliError::usage(format!("missing {name}")))
        };
        Ok(SweepRow {
            r: need(v[0], "r")?,
            theta: need(v[1], "theta")?,
            e_num: v[2],
            e_pfa: v[3],
            e_asym: v[4],
            e_gradexp: v[5],
            ratio_num_pfa: v[6],
            omega_ratio: v[7],
        })
    }
}

pub fn sweep_table(rows: &[SweepRow], units: Units) -> Table {
    let header = match units {
        Units::Scaled => SWEEP_HEADER,
        Units::Raw => SWEEP_HEADER_RAW,
    };
    let mut t = Table::new(&header);
    for row in rows {
        t.push(row.cells(units));
    }
    t
}

pub const POINT_HEADER: [&str; 13] = [
    "quantity",
    "field",
    "regime",
    "d",
    "theta",
    "r1",
    "r2",
    "value",
    "units",
    "n_max",
    "n_k",
    "kappa_nodes",
    "est_error",
];

pub fn point_cells(res: &EnergyResult, d: f64, theta: f64, r1: f64, r2: f64) -> Vec<Cell> {
    let quantity = serde_json::to_value(res.quantity)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    vec![
        Cell::Text(quantity),
        Cell::Text(res.field.to_string()),
        Cell::Text(res.regime.to_string()),
        Cell::Real(Some(d)),
        Cell::Real(Some(theta)),
        Cell::Real(Some(r1)),
        Cell::Real(Some(r2)),
        Cell::Real(Some(res.value)),
        Cell::Text(res.units.clone()),
        Cell::Int(res.n_max.into()),
        Cell::Int(res.n_k as u64),
        Cell::Int(res.kappa_nodes as u64),
        Cell::Real(res.est_error),
    ]
}
