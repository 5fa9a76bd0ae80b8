//! Closed-form steady state and heat currents.
//!
//! Currents follow the sign of `J₁ = Tr((H_S + H_LS) ℒ₁(ρ))`: negative when
//! bath 2 is the hotter one. `J₂ = −J₁`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lamb::{self, ShiftOptions};
use crate::model::Eigensystem;
use crate::quadrature;
use crate::spectral::{BathSpec, SpectralKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    /// `ρ₁₁ … ρ₄₄` in the eigenbasis order `s₁ … s₄`.
    pub populations: [f64; 4],
    pub x_plus: f64,
    pub x_minus: f64,
    pub y_plus: f64,
    pub y_minus: f64,
    pub x: f64,
    pub y: f64,
}

/// Per-transition ingredients shared by every current formula.
#[derive(Debug, Clone, Copy)]
struct Transition {
    omega: f64,
    /// `J₁(ω_μ)`, `J₂(ω_μ)`
    density: [f64; 2],
    /// `n̄₁(ω_μ)`, `n̄₂(ω_μ)`
    occupation: [f64; 2],
    /// channel weights of bath 1 and bath 2 on this transition
    weight: [f64; 2],
}

impl Transition {
    fn new(eig: &Eigensystem, baths: &[BathSpec; 2], mu: usize) -> Self {
        let omega = eig.omega[mu];
        Self {
            omega,
            density: [baths[0].density(omega), baths[1].density(omega)],
            occupation: [baths[0].occupation(omega), baths[1].occupation(omega)],
            weight: [eig.channel_weight(0, mu), eig.channel_weight(1, mu)],
        }
    }

    /// `(Σ_j J_j n̄_j w_j, Σ_j J_j (n̄_j + 1) w_j)`
    fn up_down(&self) -> (f64, f64) {
        (0..2).fold((0.0, 0.0), |(up, down), j| {
            let jw = self.density[j] * self.weight[j];
            (up + jw * self.occupation[j], down + jw * (self.occupation[j] + 1.0))
        })
    }

    /// `A_μ = 2 w₁ w₂ J₁ J₂ / (up + down)`
    fn prefactor(&self) -> f64 {
        let (up, down) = self.up_down();
        2.0 * self.weight[0] * self.weight[1] * self.density[0] * self.density[1] / (up + down)
    }

    fn occupation_gap(&self) -> f64 {
        self.occupation[0] - self.occupation[1]
    }
}

fn transitions(eig: &Eigensystem, baths: &[BathSpec; 2]) -> Result<[Transition; 2]> {
    for bath in baths {
        bath.validate()?;
    }
    let t = [Transition::new(eig, baths, 0), Transition::new(eig, baths, 1)];
    for (mu, tr) in t.iter().enumerate() {
        let (up, down) = tr.up_down();
        if !(up + down > 0.0) {
            return Err(Error::DegenerateBath { transition: mu });
        }
    }
    Ok(t)
}

pub fn steady_state(eig: &Eigensystem, baths: &[BathSpec; 2]) -> Result<SteadyState> {
    let [t1, t2] = transitions(eig, baths)?;
    let (x_plus, x_minus) = t1.up_down();
    let (y_plus, y_minus) = t2.up_down();
    let (x, y) = (x_plus + x_minus, y_plus + y_minus);
    let xy = x * y;
    Ok(SteadyState {
        populations: [
            x_minus * y_minus / xy,
            x_plus * y_plus / xy,
            x_minus * y_plus / xy,
            x_plus * y_minus / xy,
        ],
        x_plus,
        x_minus,
        y_plus,
        y_minus,
        x,
        y,
    })
}

/// Whether transition frequencies carry the environment-induced shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lamb {
    On,
    Off,
}

/// `J₁ = Σ_μ A_μ (n̄₁ − n̄₂)(ω_μ + δ_μ)` for given shifts.
pub fn heat_current_with_shifts(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    delta: [f64; 2],
) -> Result<f64> {
    let t = transitions(eig, baths)?;
    Ok((0..2)
        .map(|mu| t[mu].prefactor() * t[mu].occupation_gap() * (t[mu].omega + delta[mu]))
        .sum())
}

pub fn heat_current(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    lamb: Lamb,
    opts: &ShiftOptions,
) -> Result<f64> {
    let delta = match lamb {
        Lamb::On => lamb::transition_shifts(eig, baths, opts)?,
        Lamb::Off => [0.0; 2],
    };
    heat_current_with_shifts(eig, baths, delta)
}

/// `ΔJ₁ = Σ_μ A_μ (n̄₁ − n̄₂) δ_μ`.
pub fn current_difference(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    opts: &ShiftOptions,
) -> Result<f64> {
    let delta = lamb::transition_shifts(eig, baths, opts)?;
    current_difference_with_shifts(eig, baths, delta)
}

pub fn current_difference_with_shifts(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    delta: [f64; 2],
) -> Result<f64> {
    let t = transitions(eig, baths)?;
    Ok((0..2)
        .map(|mu| t[mu].prefactor() * t[mu].occupation_gap() * delta[mu])
        .sum())
}

/// Slope of `−J₁⁰` with respect to `T₂` at fixed `T₁`,
/// `2K₁(J₁ sin²φ₊ + J₂ cos²φ₋)ω₁/X² + 2K₂(J₂ sin²φ₋ + J₁ cos²φ₊)ω₂/Y²`.
/// Positive for any temperatures.
pub fn current_derivative_dt(eig: &Eigensystem, baths: &[BathSpec; 2]) -> Result<f64> {
    let t = transitions(eig, baths)?;
    let t2 = baths[1].temperature;
    Ok(t.iter()
        .map(|tr| {
            let (up, down) = tr.up_down();
            let total = up + down;
            let n2 = tr.occupation[1];
            let dn2 = n2 * (n2 + 1.0) * tr.omega / (t2 * t2);
            let k = dn2
                * tr.weight[0]
                * tr.weight[1]
                * tr.density[0]
                * tr.density[1]
                * (2.0 * tr.occupation[0] + 1.0);
            let bracket = tr.density[0] * tr.weight[0] + tr.density[1] * tr.weight[1];
            2.0 * k * bracket * tr.omega / (total * total)
        })
        .sum())
}

/// Large-`ΔT` limit of `|J₁⁰|`: `J₁(ω₁)ω₁ sin²φ₊ + J₁(ω₂)ω₂ cos²φ₊`.
pub fn current_supremum(eig: &Eigensystem, bath1: &BathSpec) -> f64 {
    (0..2)
        .map(|mu| {
            let w = eig.omega[mu];
            bath1.density(w) * w * eig.channel_weight(0, mu)
        })
        .sum()
}

/// Growth rate of `2Δ_jμ + Δ′_jμ` with bath temperature at high temperature,
/// `(4ω_μ/π) P∫ J(ω) / (ω(ω_μ² − ω²)) dω`, which is `2J(ω_μ)/ω_D` for Drude.
pub fn thermal_slope(bath: &BathSpec, omega_mu: f64, cfg: &quadrature::PvConfig) -> Result<f64> {
    match bath.kind {
        SpectralKind::Drude => Ok(2.0 * bath.density(omega_mu) / bath.omega_d),
        _ => {
            let kernel = |w: f64| {
                let j_over_w = if w > 0.0 {
                    bath.density(w) / w
                } else {
                    bath.gamma
                };
                4.0 * omega_mu / PI * j_over_w / ((omega_mu - w) * (omega_mu + w))
            };
            let upper = match bath.kind {
                SpectralKind::Sharp => bath.omega_d,
                _ => f64::INFINITY,
            };
            if bath.kind == SpectralKind::Sharp && omega_mu == bath.omega_d {
                return Err(Error::PoleOnCutoff {
                    pole: omega_mu,
                    omega_d: bath.omega_d,
                });
            }
            let breaks = [bath.omega_d, 2.0 * bath.omega_d];
            let breaks: Vec<f64> = breaks.into_iter().filter(|&b| b < upper).collect();
            Ok(quadrature::pv_integral(&kernel, omega_mu, 0.0, upper, &breaks, cfg)?.value)
        }
    }
}

/// `δ_μ = P_μ + Q_μ ΔT + (Q_μ ω_D/π) R₂,μ` for Drude baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PqDecomposition {
    pub p: [f64; 2],
    pub q: [f64; 2],
    /// `R₂,μ`
    pub r2: [f64; 2],
}

impl PqDecomposition {
    pub fn reconstruct(&self, delta_t: f64, omega_d2: f64) -> [f64; 2] {
        [0, 1].map(|mu| self.p[mu] + self.q[mu] * delta_t + self.q[mu] * omega_d2 / PI * self.r2[mu])
    }
}

pub fn pq_decomposition(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    series_tol: f64,
) -> Result<PqDecomposition> {
    let [b1, b2] = baths;
    if b1.kind != SpectralKind::Drude || b2.kind != SpectralKind::Drude {
        return Err(Error::Config("P/Q decomposition needs Drude baths".into()));
    }
    let mut p = [0.0; 2];
    let mut q = [0.0; 2];
    let mut r2 = [0.0; 2];
    for mu in 0..2 {
        let w = eig.omega[mu];
        let (w1, w2) = (eig.channel_weight(0, mu), eig.channel_weight(1, mu));
        let r1 = lamb::matsubara_r(b1, w, series_tol)?.value;
        r2[mu] = lamb::matsubara_r(b2, w, series_tol)?.value;
        p[mu] = 2.0 * b1.density(w) / PI * (PI * b1.temperature / b1.omega_d + r1) * w1
            + 2.0 * b2.density(w) * b1.temperature / b2.omega_d * w2;
        q[mu] = 2.0 * b2.density(w) / b2.omega_d * w2;
    }
    Ok(PqDecomposition { p, q, r2 })
}

/// `J₁(ω₁) Q₁ sin²φ₊ + J₁(ω₂) Q₂ cos²φ₊`, the limiting `d|ΔJ₁|/dΔT`.
/// For non-Drude baths `Q_μ` uses the general [`thermal_slope`].
pub fn asymptotic_slope(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    cfg: &quadrature::PvConfig,
) -> Result<f64> {
    let mut slope = 0.0;
    for mu in 0..2 {
        let w = eig.omega[mu];
        let q = thermal_slope(&baths[1], w, cfg)? * eig.channel_weight(1, mu);
        slope += baths[0].density(w) * q * eig.channel_weight(0, mu);
    }
    Ok(slope)
}

/// `ω_μ + δ_μ`; an error if either is not positive.
pub fn second_law_margin(eig: &Eigensystem, delta: [f64; 2]) -> Result<[f64; 2]> {
    let margin = [eig.omega[0] + delta[0], eig.omega[1] + delta[1]];
    for mu in 0..2 {
        if !(margin[mu] > 0.0) {
            return Err(Error::SecondLawViolation {
                transition: mu,
                omega: eig.omega[mu],
                delta: delta[mu],
                margin: margin[mu],
            });
        }
    }
    Ok(margin)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurrentReport {
    pub j1_with_lamb: f64,
    pub j1_no_lamb: f64,
    pub dj: f64,
    pub a: [f64; 2],
    pub delta: [f64; 2],
    pub supremum: f64,
    pub slope_dt: f64,
    pub asympt_slope: f64,
    pub second_law_margin: [f64; 2],
    /// Drude baths only.
    pub pq: Option<PqDecomposition>,
}

impl CurrentReport {
    pub fn j2_with_lamb(&self) -> f64 {
        -self.j1_with_lamb
    }

    /// `|J₁^δ| − |J₁⁰|`: negative where the shift suppresses the flow.
    pub fn dj_magnitude(&self) -> f64 {
        self.j1_with_lamb.abs() - self.j1_no_lamb.abs()
    }
}

pub fn current_report(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    opts: &ShiftOptions,
) -> Result<CurrentReport> {
    let t = transitions(eig, baths)?;
    let delta = lamb::transition_shifts(eig, baths, opts)?;
    let margin = second_law_margin(eig, delta)?;
    let a = [t[0].prefactor(), t[1].prefactor()];
    let j1_no_lamb = (0..2).map(|mu| a[mu] * t[mu].occupation_gap() * t[mu].omega).sum();
    let dj = (0..2).map(|mu| a[mu] * t[mu].occupation_gap() * delta[mu]).sum();
    let both_drude = baths.iter().all(|b| b.kind == SpectralKind::Drude);
    Ok(CurrentReport {
        j1_with_lamb: heat_current_with_shifts(eig, baths, delta)?,
        j1_no_lamb,
        dj,
        a,
        delta,
        supremum: current_supremum(eig, &baths[0]),
        slope_dt: current_derivative_dt(eig, baths)?,
        asympt_slope: asymptotic_slope(eig, baths, &opts.pv)?,
        second_law_margin: margin,
        pq: if both_drude {
            Some(pq_decomposition(eig, baths, opts.series_tol)?)
        } else {
            None
        },
    })
}
