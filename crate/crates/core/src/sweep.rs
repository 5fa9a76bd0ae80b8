//! Temperature-difference sweeps and their CSV form.
//!
//! CSV files use `\n` line endings, `#` comment lines before the header and
//! every number in `{:.11e}` form (12 significant digits), so identical
//! inputs give byte-identical files.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::lamb::{self, ShiftOptions};
use crate::model::Eigensystem;
use crate::spectral::BathSpec;
use crate::transport;

pub const SWEEP_HEADER: [&str; 10] = [
    "dT",
    "j1_lamb",
    "j1_nolamb",
    "dj",
    "delta1",
    "delta2",
    "margin1",
    "margin2",
    "supremum",
    "asympt_slope",
];

/// One sweep point. Currents are magnitudes: `J₁` itself is negative
/// whenever bath 2 is the hotter one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub dt: f64,
    pub j1_lamb: f64,
    pub j1_nolamb: f64,
    /// `|J₁^δ| − |J₁⁰|`, negative where the shift suppresses the flow.
    pub dj: f64,
    pub delta: [f64; 2],
    pub margin: [f64; 2],
    pub supremum: f64,
    pub asympt_slope: f64,
}

impl SweepRow {
    pub fn values(&self) -> Vec<f64> {
        vec![
            self.dt,
            self.j1_lamb,
            self.j1_nolamb,
            self.dj,
            self.delta[0],
            self.delta[1],
            self.margin[0],
            self.margin[1],
            self.supremum,
            self.asympt_slope,
        ]
    }
}

/// With `lamb == false` the shifts are taken as zero, so the shifted and
/// unshifted columns coincide.
pub fn sweep_row(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    dt: f64,
    lamb: bool,
    opts: &ShiftOptions,
) -> Result<SweepRow> {
    let delta = if lamb {
        lamb::transition_shifts(eig, baths, opts)?
    } else {
        [0.0; 2]
    };
    let margin = transport::second_law_margin(eig, delta)?;
    let with = transport::heat_current_with_shifts(eig, baths, delta)?.abs();
    let without = transport::heat_current_with_shifts(eig, baths, [0.0; 2])?.abs();
    Ok(SweepRow {
        dt,
        j1_lamb: with,
        j1_nolamb: without,
        dj: with - without,
        delta,
        margin,
        supremum: transport::current_supremum(eig, &baths[0]),
        asympt_slope: transport::asymptotic_slope(eig, baths, &opts.pv)?,
    })
}

/// Evaluates `make_baths(dT)` at each grid point, concurrently, keeping
/// grid order.
pub fn sweep<F>(
    eig: &Eigensystem,
    grid: &[f64],
    make_baths: F,
    lamb: bool,
    opts: &ShiftOptions,
) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<[BathSpec; 2]> + Sync,
{
    grid.par_iter()
        .map(|&dt| sweep_row(eig, &make_baths(dt)?, dt, lamb, opts))
        .collect()
}

/// Baths `T₁` and `T₁ + dT` sharing everything else with `template`.
pub fn gradient_baths(template: &[BathSpec; 2], dt: f64) -> Result<[BathSpec; 2]> {
    let hot = template[1].with_temperature(template[0].temperature + dt);
    hot.validate()?;
    Ok([template[0], hot])
}

/// A CSV table with leading `#` comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII and UTF-8 only")
    }
}

/// Twelve significant digits in scientific notation.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

pub fn sweep_table(name: &str, rows: &[SweepRow]) -> Table {
    let mut t = Table::new(name, &SWEEP_HEADER);
    t.rows = rows.iter().map(SweepRow::values).collect();
    t
}

pub const CURRENT_NOTE: &str =
    "currents are |J1| (J1 < 0 when bath 2 is hotter); dj = |J1 with shift| - |J1 without shift|";
