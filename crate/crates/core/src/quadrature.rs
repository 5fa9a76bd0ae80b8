//! Direct numerical evaluation of the level-shift integrals.
//!
//! This is the independent oracle for [`crate::lamb`]: it never touches the
//! Matsubara series. Principal values are taken by pairing `ω = p ± t`
//! inside a symmetric window around the pole, where the `1/(p − ω)`
//! singularity cancels; everything else is adaptive Gauss–Kronrod (7/15)
//! with global bisection. Semi-infinite ranges are mapped onto `(0, 1]` with
//! `ω = W/s` past a split point `W`, so no truncation is involved.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{BathSpec, SpectralKind};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperLimit {
    /// Integrate to infinity: finite panels up to `split_factor · scale`,
    /// then the substitution `ω = W/s`.
    Mapped { split_factor: f64 },
    /// Hard truncation at a fixed frequency.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Half-width of the symmetric window around the pole. `None` picks
    /// `min(p/2, (upper − p)/2, 1)`.
    pub pole_window: Option<f64>,
    pub upper_limit: UpperLimit,
    pub max_subdivisions: usize,
}

impl Default for PvConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-15,
            pole_window: None,
            upper_limit: UpperLimit::Mapped { split_factor: 4.0 },
            max_subdivisions: 4000,
        }
    }
}

impl PvConfig {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn with_pole_window(self, h: f64) -> Self {
        Self {
            pole_window: Some(h),
            ..self
        }
    }

    pub fn with_upper_limit(self, upper_limit: UpperLimit) -> Self {
        Self {
            upper_limit,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gauss_kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

struct Panel {
    part: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive integration of several pieces at once. Each piece is an
/// integrand with its initial panel boundaries; the total error target is
/// shared.
fn integrate_parts(
    parts: &[(&dyn Fn(f64) -> f64, Vec<f64>)],
    cfg: &PvConfig,
) -> Result<Estimate> {
    let mut panels: Vec<Panel> = Vec::new();
    for (idx, (f, edges)) in parts.iter().enumerate() {
        for w in edges.windows(2) {
            if w[1] > w[0] {
                let (value, error) = gauss_kronrod(*f, w[0], w[1]);
                panels.push(Panel {
                    part: idx,
                    a: w[0],
                    b: w[1],
                    value,
                    error,
                });
            }
        }
    }
    loop {
        let (total, err) = panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error: err,
                subdivisions: panels.len(),
            });
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            // fixed panel order for a deterministic sum
            panels.sort_by(|x, y| x.part.cmp(&y.part).then(x.a.total_cmp(&y.a)));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Estimate { value, error: err });
        }
        if panels.len() >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error: err,
                subdivisions: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { part, a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let f = parts[part].0;
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (value, error) = gauss_kronrod(f, lo, hi);
            panels.push(Panel {
                part,
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Ordinary adaptive integral over `[lower, upper]`; `upper` may be infinite.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    cfg: &PvConfig,
) -> Result<Estimate> {
    let segments = Segments::new(lower, upper, breakpoints, cfg);
    let split = segments.split;
    let tail = |s: f64| f(split / s) * split / (s * s);
    let mut parts: Vec<(&dyn Fn(f64) -> f64, Vec<f64>)> = vec![(f, segments.finite_edges(lower))];
    if segments.mapped {
        parts.push((&tail, vec![0.0, 0.25, 1.0]));
    }
    integrate_parts(&parts, cfg)
}

struct Segments {
    split: f64,
    mapped: bool,
    breaks: Vec<f64>,
}

impl Segments {
    fn new(lower: f64, upper: f64, breakpoints: &[f64], cfg: &PvConfig) -> Self {
        let scale = breakpoints
            .iter()
            .copied()
            .chain([lower.abs(), 1.0])
            .fold(0.0f64, f64::max);
        let (split, mapped) = match (upper.is_finite(), cfg.upper_limit) {
            (true, _) => (upper, false),
            (false, UpperLimit::Mapped { split_factor }) => (split_factor * scale, true),
            (false, UpperLimit::Fixed(w)) => (w, false),
        };
        let mut breaks: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lower && b < split)
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Self {
            split,
            mapped,
            breaks,
        }
    }

    fn finite_edges(&self, lower: f64) -> Vec<f64> {
        self.edges_between(lower, self.split)
    }

    fn edges_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut edges = vec![lo];
        edges.extend(self.breaks.iter().copied().filter(|&b| b > lo && b < hi));
        edges.push(hi);
        edges
    }
}

/// Cauchy principal value of `∫ kernel(ω) dω` over `[lower, upper]`, where
/// `kernel` has a simple pole at `pole` and is otherwise smooth. `upper`
/// may be `f64::INFINITY`.
pub fn pv_integral(
    kernel: &dyn Fn(f64) -> f64,
    pole: f64,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    cfg: &PvConfig,
) -> Result<Estimate> {
    if !(pole > lower && pole < upper) {
        return integrate(kernel, lower, upper, breakpoints, cfg);
    }
    let room_below = pole - lower;
    let room_above = upper - pole;
    let h = match cfg.pole_window {
        Some(h) => h,
        None => (0.5 * room_below).min(0.5 * room_above).min(1.0),
    };
    if !(h > 0.0 && h < room_below && h < room_above) {
        return Err(Error::InvalidParameter {
            name: "pole_window",
            value: h,
            reason: "window must be positive and fit inside the integration range",
        });
    }

    let mut all_breaks: Vec<f64> = breakpoints.to_vec();
    all_breaks.push(pole + h);
    let segments = Segments::new(lower, upper, &all_breaks, cfg);
    let paired = |t: f64| kernel(pole + t) + kernel(pole - t);
    let split = segments.split;
    let tail = |s: f64| kernel(split / s) * split / (s * s);
    let mut parts: Vec<(&dyn Fn(f64) -> f64, Vec<f64>)> = vec![
        (kernel, segments.edges_between(lower, pole - h)),
        (&paired, vec![0.0, h]),
        (kernel, segments.edges_between(pole + h, segments.split)),
    ];
    if segments.mapped {
        parts.push((&tail, vec![0.0, 0.25, 1.0]));
    }
    integrate_parts(&parts, cfg)
}

/// Sign of the frequency argument in `S_j(±ω_μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

/// Upper end of the spectral support and frequency scales worth seeding
/// panel boundaries at.
fn support(bath: &BathSpec, pole: f64) -> Result<(f64, Vec<f64>)> {
    let wd = bath.omega_d;
    let mut breaks = vec![wd, bath.temperature];
    match bath.kind {
        SpectralKind::Sharp => {
            if pole == wd {
                return Err(Error::PoleOnCutoff { pole, omega_d: wd });
            }
            breaks.retain(|&b| b < wd);
            Ok((wd, breaks))
        }
        SpectralKind::Gaussian => {
            breaks.extend([2.0 * wd, 4.0 * wd]);
            Ok((f64::INFINITY, breaks))
        }
        SpectralKind::Drude => Ok((f64::INFINITY, breaks)),
    }
}

fn pv_over_bath(
    bath: &BathSpec,
    pole: f64,
    kernel: &dyn Fn(f64) -> f64,
    cfg: &PvConfig,
) -> Result<Estimate> {
    crate::error::require_positive("omega_mu", pole)?;
    let (upper, breaks) = support(bath, pole)?;
    pv_integral(kernel, pole, 0.0, upper, &breaks, cfg)
}

/// `S_j(±ω_μ)` straight from its defining principal-value integral.
pub fn s_coeff_quad(
    bath: &BathSpec,
    omega_mu: f64,
    sign: ShiftSign,
    cfg: &PvConfig,
) -> Result<Estimate> {
    let kernel = |w: f64| {
        let j = bath.density(w);
        let n = bath.occupation(w);
        match sign {
            ShiftSign::Plus => j * ((n + 1.0) / (omega_mu - w) + n / (omega_mu + w)) / PI,
            ShiftSign::Minus => -j * (n / (omega_mu - w) + (n + 1.0) / (omega_mu + w)) / PI,
        }
    };
    pv_over_bath(bath, omega_mu, &kernel, cfg)
}

/// Thermal part `Δ_jμ = (2ω_μ/π) P∫ J n̄ / (ω_μ² − ω²)`.
pub fn delta_quad(bath: &BathSpec, omega_mu: f64, cfg: &PvConfig) -> Result<Estimate> {
    let kernel = |w: f64| {
        2.0 * omega_mu / PI * bath.density(w) * bath.occupation(w)
            / ((omega_mu - w) * (omega_mu + w))
    };
    pv_over_bath(bath, omega_mu, &kernel, cfg)
}

/// Vacuum part `Δ′_jμ = (2ω_μ/π) P∫ J / (ω_μ² − ω²)`, computed directly and
/// cross-checked against `Δ⁺ + Δ⁻`.
pub fn delta_prime_quad(bath: &BathSpec, omega_mu: f64, cfg: &PvConfig) -> Result<Estimate> {
    let direct = delta_prime_direct(bath, omega_mu, cfg)?;
    let (plus, minus) = delta_pm_quad(bath, omega_mu, cfg)?;
    let split_sum = plus.value + minus.value;
    let allowed = 10.0 * (direct.error + plus.error + minus.error)
        + 10.0 * cfg.rel_tol * direct.value.abs()
        + cfg.abs_tol;
    if (split_sum - direct.value).abs() > allowed {
        return Err(Error::QuadratureNonConvergence {
            estimate: direct.value,
            error: (split_sum - direct.value).abs(),
            subdivisions: 0,
        });
    }
    Ok(direct)
}

pub(crate) fn delta_prime_direct(bath: &BathSpec, omega_mu: f64, cfg: &PvConfig) -> Result<Estimate> {
    let kernel =
        |w: f64| 2.0 * omega_mu / PI * bath.density(w) / ((omega_mu - w) * (omega_mu + w));
    pv_over_bath(bath, omega_mu, &kernel, cfg)
}

/// `2Δ_jμ + Δ′_jμ = (2ω_μ/π) P∫ J (2n̄ + 1) / (ω_μ² − ω²)` as one integral.
pub fn combined_quad(bath: &BathSpec, omega_mu: f64, cfg: &PvConfig) -> Result<Estimate> {
    let kernel = |w: f64| {
        2.0 * omega_mu / PI * bath.density(w) * (2.0 * bath.occupation(w) + 1.0)
            / ((omega_mu - w) * (omega_mu + w))
    };
    pv_over_bath(bath, omega_mu, &kernel, cfg)
}

/// `(Δ⁺_jμ, Δ⁻_jμ) = ((1/π)∫ J/(ω_μ + ω), (1/π) P∫ J/(ω_μ − ω))`.
pub fn delta_pm_quad(bath: &BathSpec, omega_mu: f64, cfg: &PvConfig) -> Result<(Estimate, Estimate)> {
    let plus_kernel = |w: f64| bath.density(w) / (omega_mu + w) / PI;
    let minus_kernel = |w: f64| bath.density(w) / (omega_mu - w) / PI;
    let plus = pv_over_bath(bath, omega_mu, &plus_kernel, cfg)?;
    let minus = pv_over_bath(bath, omega_mu, &minus_kernel, cfg)?;
    Ok((plus, minus))
}
