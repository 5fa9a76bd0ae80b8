//! Parameter sets of the published figures and the CSV tables for each.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::lamb::{self, ShiftOptions};
use crate::model::{eigensystem, SystemParams};
use crate::spectral::{BathSpec, SpectralKind};
use crate::sweep::{self, Table, CURRENT_NOTE, SWEEP_HEADER};

pub const PRESETS: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

/// One curve: a system, the bath pair at `ΔT = 0`, and the `ΔT` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetCase {
    pub preset: &'static str,
    /// File stem, e.g. `fig4_wd20`.
    pub label: String,
    pub caption: String,
    pub system: SystemParams,
    pub baths: [BathSpec; 2],
    pub grid: Vec<f64>,
}

impl PresetCase {
    pub fn omega_d(&self) -> f64 {
        self.baths[1].omega_d
    }

    pub fn baths_at(&self, dt: f64) -> Result<[BathSpec; 2]> {
        sweep::gradient_baths(&self.baths, dt)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn case(
    preset: &'static str,
    label: String,
    caption: String,
    (eps1, eps2, g): (f64, f64, f64),
    (t1, gamma, omega_d, kind): (f64, f64, f64, SpectralKind),
    grid: Vec<f64>,
) -> Result<PresetCase> {
    let bath = BathSpec::new(t1, gamma, omega_d, kind)?;
    Ok(PresetCase {
        preset,
        label,
        caption,
        system: SystemParams::new(eps1, eps2, g)?,
        baths: [bath, bath],
        grid,
    })
}

pub fn preset_cases(name: &str) -> Result<Vec<PresetCase>> {
    let drude = SpectralKind::Drude;
    match name {
        "fig2" => Ok(vec![case(
            "fig2",
            "fig2".into(),
            "T1=1, T2=1+dT, gamma1=gamma2=0.01, omega_D=50, eps1=3, eps2=2, k=0.5".into(),
            (3.0, 2.0, 0.5),
            (1.0, 0.01, 50.0, drude),
            linspace(0.0, 100.0, 41),
        )?]),
        "fig3" => Ok(vec![case(
            "fig3",
            "fig3".into(),
            "eps1=3, eps2=2, T1=0.1, T2=0.1+dT, gamma1=gamma2=0.02, omega_D=100, k=0.5".into(),
            (3.0, 2.0, 0.5),
            (0.1, 0.02, 100.0, drude),
            linspace(0.0, 1000.0, 101),
        )?]),
        "fig4" => [10.0, 20.0, 50.0, 100.0]
            .into_iter()
            .map(|wd| {
                case(
                    "fig4",
                    format!("fig4_wd{wd}"),
                    format!("eps1=3, eps2=2, T1=1, T2=1+dT, gamma1=gamma2=0.02, k=0.5, omega_D={wd}"),
                    (3.0, 2.0, 0.5),
                    (1.0, 0.02, wd, drude),
                    linspace(0.0, 1000.0, 401),
                )
            })
            .collect(),
        "fig5" => [(3.0, 2.0, "blue"), (2.75, 2.25, "red"), (2.5, 2.5, "green")]
            .into_iter()
            .map(|(e1, e2, colour)| {
                case(
                    "fig5",
                    format!("fig5_{colour}"),
                    format!(
                        "T1=1, T2=1+dT, gamma1=gamma2=0.01, omega_D=50, k=0.5, eps1={e1}, eps2={e2}"
                    ),
                    (e1, e2, 0.5),
                    (1.0, 0.01, 50.0, drude),
                    linspace(0.0, 1000.0, 201),
                )
            })
            .collect(),
        "fig6" => SpectralKind::ALL
            .into_iter()
            .map(|kind| {
                case(
                    "fig6",
                    format!("fig6_{kind}"),
                    format!(
                        "T1=1, T2=1+dT, gamma1=gamma2=0.01, omega_D=50, eps1=3, eps2=2.5, k=0.5, spectral density {kind}"
                    ),
                    (3.0, 2.5, 0.5),
                    (1.0, 0.01, 50.0, kind),
                    linspace(0.0, 1000.0, 101),
                )
            })
            .collect(),
        other => Err(Error::Config(format!(
            "unknown figure preset `{other}` (expected one of {})",
            PRESETS.join(", ")
        ))),
    }
}

pub const FIG2_HEADER: [&str; 5] = ["dT_over_wD", "R21_exact", "R21_estimate", "delta1", "delta2"];
pub const FIG4_HEADER: [&str; 4] = ["dT", "dj", "delta1", "delta2"];

fn header_comments(case: &PresetCase) -> Vec<String> {
    vec![
        format!("preset {}: {}", case.preset, case.caption),
        "k denotes the qubit-qubit coupling g; units hbar = k_B = 1".into(),
    ]
}

fn fig2_table(case: &PresetCase, opts: &ShiftOptions) -> Result<Table> {
    let eig = eigensystem(&case.system)?;
    let wd = case.omega_d();
    let rows: Result<Vec<Vec<f64>>> = case
        .grid
        .par_iter()
        .map(|&dt| {
            let baths = case.baths_at(dt)?;
            let w1 = eig.omega[0];
            let r = lamb::matsubara_r(&baths[1], w1, opts.series_tol)?.value;
            let est = lamb::matsubara_r_estimate(&baths[1], w1)?;
            let delta = lamb::transition_shifts(&eig, &baths, opts)?;
            Ok(vec![dt / wd, r, est, delta[0], delta[1]])
        })
        .collect();
    let mut t = Table::new(&case.label, &FIG2_HEADER);
    t.comments = header_comments(case);
    t.rows = rows?;
    Ok(t)
}

fn current_table(case: &PresetCase, opts: &ShiftOptions) -> Result<Table> {
    let eig = eigensystem(&case.system)?;
    let rows = sweep::sweep(&eig, &case.grid, |dt| case.baths_at(dt), true, opts)?;
    let mut t = if case.preset == "fig4" {
        let mut t = Table::new(&case.label, &FIG4_HEADER);
        t.rows = rows.iter().map(|r| vec![r.dt, r.dj, r.delta[0], r.delta[1]]).collect();
        t
    } else {
        let mut header = vec!["dT_over_wD"];
        header.extend(SWEEP_HEADER);
        let mut t = Table::new(&case.label, &header);
        let wd = case.omega_d();
        t.rows = rows
            .iter()
            .map(|r| {
                let mut v = vec![r.dt / wd];
                v.extend(r.values());
                v
            })
            .collect();
        t
    };
    t.comments = header_comments(case);
    t.comments.push(CURRENT_NOTE.into());
    Ok(t)
}

pub fn preset_tables(name: &str, opts: &ShiftOptions) -> Result<Vec<Table>> {
    preset_cases(name)?
        .iter()
        .map(|case| match case.preset {
            "fig2" => fig2_table(case, opts),
            _ => current_table(case, opts),
        })
        .collect()
}

fn column_doc(name: &str) -> (&'static str, &'static str) {
    match name {
        "dT" => ("T2 - T1", "energy"),
        "dT_over_wD" => ("(T2 - T1) / omega_D", "dimensionless"),
        "R21_exact" => ("Matsubara remainder R for bath 2, lower transition, summed", "dimensionless"),
        "R21_estimate" => ("Euler-Maclaurin estimate of the same remainder", "dimensionless"),
        "j1_lamb" => ("|J1| with shifted transition frequencies", "energy/time"),
        "j1_nolamb" => ("|J1| with bare transition frequencies", "energy/time"),
        "dj" => ("|J1 with shift| - |J1 without shift|", "energy/time"),
        "delta1" => ("shift of the lower transition frequency omega_1", "energy"),
        "delta2" => ("shift of the upper transition frequency omega_2", "energy"),
        "margin1" => ("omega_1 + delta1, must stay positive", "energy"),
        "margin2" => ("omega_2 + delta2, must stay positive", "energy"),
        "supremum" => ("large-gradient limit of |J1| without shift", "energy/time"),
        "asympt_slope" => ("large-gradient limit of d(dj)/d(dT)", "energy/time/temperature"),
        _ => ("", ""),
    }
}

/// Column documentation for the given tables, keyed by file name.
pub fn schema(tables: &[Table]) -> serde_json::Value {
    let files: serde_json::Map<String, serde_json::Value> = tables
        .iter()
        .map(|t| {
            let cols: Vec<_> = t
                .header
                .iter()
                .map(|h| {
                    let (desc, unit) = column_doc(h);
                    json!({"name": h, "description": desc, "unit": unit})
                })
                .collect();
            (format!("{}.csv", t.name), json!({"columns": cols, "comment_prefix": "#"}))
        })
        .collect();
    json!({"format": "csv, 12 significant digits, scientific notation", "files": files})
}

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("cannot write {0}: {1}")]
    Io(PathBuf, std::io::Error),
}

/// Writes one CSV per curve plus `<preset>_schema.json` into `outdir`.
pub fn write_preset(
    name: &str,
    outdir: &Path,
    opts: &ShiftOptions,
) -> std::result::Result<Vec<PathBuf>, WriteError> {
    let tables = preset_tables(name, opts)?;
    std::fs::create_dir_all(outdir).map_err(|e| WriteError::Io(outdir.to_path_buf(), e))?;
    let mut written = Vec::new();
    for t in &tables {
        let path = outdir.join(format!("{}.csv", t.name));
        let file = std::fs::File::create(&path).map_err(|e| WriteError::Io(path.clone(), e))?;
        t.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| WriteError::Io(path.clone(), e))?;
        written.push(path);
    }
    let path = outdir.join(format!("{name}_schema.json"));
    let text = serde_json::to_string_pretty(&schema(&tables)).expect("json values serialize");
    std::fs::write(&path, text + "\n").map_err(|e| WriteError::Io(path.clone(), e))?;
    written.push(path);
    Ok(written)
}
