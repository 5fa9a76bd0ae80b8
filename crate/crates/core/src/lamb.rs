//! Environment-induced level and transition shifts.
//!
//! For the Drude cutoff the principal-value integrals reduce, via the residue
//! theorem, to a logarithm plus a Matsubara series
//!
//! ```text
//! R = Σ_k (2π/β) (ω_μ² − ω_D ω_k) / ((ω_μ² + ω_k²)(ω_D + ω_k)),   ω_k = 2πk/β.
//! ```
//!
//! This series is already the pole-free (Mittag-Leffler) form, so the
//! `cot(β ω_D / 2)` coincidences at `β ω_D ∈ 2πℤ` never arise. Terms decay as
//! `k⁻²`; the sum is taken exactly up to some `K` and the remainder is
//! added in closed form with Euler–Maclaurin corrections.
//!
//! The Sharp and Gaussian cutoffs have no such closed form and go through
//! [`crate::quadrature`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Eigensystem;
use crate::quadrature::{self, PvConfig};
use crate::spectral::{BathSpec, SpectralKind};

/// Largest number of explicitly summed Matsubara terms.
pub const MAX_SERIES_TERMS: u64 = 100_000_000;

/// Default relative tolerance for the Matsubara series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-13;

/// `B_{2m} / (2m)!` for m = 1..=6.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    /// Size of the first omitted Euler–Maclaurin correction.
    pub bound: f64,
    /// Terms summed explicitly before the tail correction.
    pub terms: u64,
}

/// Sum of `G(k) = (v² − u k) / ((v² + k²)(u + k))` over `k ≥ 1`, with
/// `u = β ω_D / 2π` and `v = β ω_μ / 2π`.
///
/// `G(k) = 1/(k + u) − Re 1/(k + iv)`, which makes the tail integral and all
/// derivatives needed by Euler–Maclaurin elementary.
fn reduced_matsubara_sum(u: f64, v: f64, tol: f64) -> Result<SeriesSum> {
    let term = |k: f64| (v * v - u * k) / ((v * v + k * k) * (u + k));
    // n-th derivative of G at x, n odd
    let derivative = |x: f64, n: i32| {
        let factorial: f64 = (1..=n).map(f64::from).product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let r = x.hypot(v);
        let angle = v.atan2(x);
        let complex_part = ((n + 1) as f64 * angle).cos() / r.powi(n + 1);
        sign * factorial * ((x + u).powi(-(n + 1)) - complex_part)
    };

    let mut explicit = 0.0;
    let mut summed: u64 = 0;
    let mut cutoff: u64 = 32;
    loop {
        // terms 1..cutoff-1 explicitly, in increasing k
        for k in (summed + 1)..cutoff {
            explicit += term(k as f64);
        }
        summed = cutoff - 1;

        let x = cutoff as f64;
        let integral = 0.5 * (v * v / (x * x)).ln_1p() - (u / x).ln_1p();
        let mut tail = integral + 0.5 * term(x);
        for (m, coeff) in BERNOULLI_OVER_FACTORIAL[..5].iter().enumerate() {
            tail -= coeff * derivative(x, 2 * m as i32 + 1);
        }
        let bound = (BERNOULLI_OVER_FACTORIAL[5] * derivative(x, 11)).abs();
        let value = explicit + tail;
        if bound <= tol * value.abs() || bound < f64::MIN_POSITIVE {
            return Ok(SeriesSum {
                value,
                bound,
                terms: summed,
            });
        }
        if cutoff >= MAX_SERIES_TERMS {
            return Err(Error::SeriesNonConvergence {
                estimate: value,
                bound,
                terms: summed,
            });
        }
        cutoff = (cutoff * 4).min(MAX_SERIES_TERMS);
    }
}

fn reduced_frequencies(bath: &BathSpec, omega_mu: f64) -> (f64, f64) {
    let scale = bath.beta() / (2.0 * PI);
    (bath.omega_d * scale, omega_mu * scale)
}

fn require_drude(bath: &BathSpec) -> Result<()> {
    if bath.kind == SpectralKind::Drude {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "Matsubara series only applies to the Drude cutoff, got {}",
            bath.kind
        )))
    }
}

/// The Matsubara remainder `R_jμ`.
pub fn matsubara_r(bath: &BathSpec, omega_mu: f64, tol: f64) -> Result<SeriesSum> {
    require_drude(bath)?;
    crate::error::require_positive("omega_mu", omega_mu)?;
    let (u, v) = reduced_frequencies(bath, omega_mu);
    reduced_matsubara_sum(u, v, tol)
}

/// Euler–Maclaurin estimate `ln(√(4π² + ω_μ²β²) / (2π + ω_D β))`.
pub fn matsubara_r_estimate(bath: &BathSpec, omega_mu: f64) -> Result<f64> {
    require_drude(bath)?;
    crate::error::require_positive("omega_mu", omega_mu)?;
    let (u, v) = reduced_frequencies(bath, omega_mu);
    Ok(0.5 * (v * v).ln_1p() - u.ln_1p())
}

/// Inverts `Δ = (J/π)(ln(ω_D/ω_μ) + π/(βω_D) + R)` for `R`, given a thermal
/// shift obtained some other way (e.g. by quadrature).
pub fn r_from_thermal_shift(bath: &BathSpec, omega_mu: f64, delta: f64) -> f64 {
    PI * delta / bath.density(omega_mu)
        - (bath.omega_d / omega_mu).ln()
        - PI / (bath.beta() * bath.omega_d)
}

/// Thermal shift `Δ_jμ = (J(ω_μ)/π)(ln(ω_D/ω_μ) + π/(βω_D) + R_jμ)`.
pub fn delta_analytic(bath: &BathSpec, omega_mu: f64, tol: f64) -> Result<f64> {
    let r = matsubara_r(bath, omega_mu, tol)?.value;
    Ok(bath.density(omega_mu) / PI
        * ((bath.omega_d / omega_mu).ln() + PI / (bath.beta() * bath.omega_d) + r))
}

/// Vacuum shift `Δ′_jμ = −(2J(ω_μ)/π) ln(ω_D/ω_μ)`.
pub fn delta_prime_analytic(bath: &BathSpec, omega_mu: f64) -> Result<f64> {
    require_drude(bath)?;
    crate::error::require_positive("omega_mu", omega_mu)?;
    Ok(-2.0 * bath.density(omega_mu) / PI * (bath.omega_d / omega_mu).ln())
}

/// `2Δ_jμ + Δ′_jμ` from the coth expansion,
/// `J(ω_μ)(2/(βω_D) + (4/β) Σ_k (ω_μ² − ω_D ω_k)/((ω_D + ω_k)(ω_μ² + ω_k²)))`.
/// The logarithms cancel, so this is what transition shifts need.
pub fn combined_2d_plus_dprime(bath: &BathSpec, omega_mu: f64, tol: f64) -> Result<f64> {
    require_drude(bath)?;
    crate::error::require_positive("omega_mu", omega_mu)?;
    let beta = bath.beta();
    let (u, v) = reduced_frequencies(bath, omega_mu);
    // each summand of the coth series is G(k) / (2π/β)
    let sum = reduced_matsubara_sum(u, v, tol)?.value * beta / (2.0 * PI);
    Ok(bath.density(omega_mu) * (2.0 / (beta * bath.omega_d) + 4.0 / beta * sum))
}

/// Where `Δ_jμ` and `Δ′_jμ` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Quadrature,
}

/// Picks a method: the series for Drude baths unless quadrature is forced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftOptions {
    pub force_quadrature: bool,
    pub series_tol: f64,
    pub pv: PvConfig,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        Self {
            force_quadrature: false,
            series_tol: DEFAULT_SERIES_TOL,
            pv: PvConfig::default(),
        }
    }
}

impl ShiftOptions {
    pub fn quadrature() -> Self {
        Self {
            force_quadrature: true,
            ..Self::default()
        }
    }

    pub fn method_for(&self, bath: &BathSpec) -> Method {
        if bath.kind == SpectralKind::Drude && !self.force_quadrature {
            Method::Series
        } else {
            Method::Quadrature
        }
    }
}

fn combined_coefficient(bath: &BathSpec, omega_mu: f64, opts: &ShiftOptions) -> Result<f64> {
    match opts.method_for(bath) {
        Method::Series => combined_2d_plus_dprime(bath, omega_mu, opts.series_tol),
        Method::Quadrature => Ok(quadrature::combined_quad(bath, omega_mu, &opts.pv)?.value),
    }
}

fn thermal_and_vacuum(bath: &BathSpec, omega_mu: f64, opts: &ShiftOptions) -> Result<(f64, f64)> {
    match opts.method_for(bath) {
        Method::Series => Ok((
            delta_analytic(bath, omega_mu, opts.series_tol)?,
            delta_prime_analytic(bath, omega_mu)?,
        )),
        Method::Quadrature => Ok((
            quadrature::delta_quad(bath, omega_mu, &opts.pv)?.value,
            quadrature::delta_prime_direct(bath, omega_mu, &opts.pv)?.value,
        )),
    }
}

/// Transition-frequency shifts from the `2Δ + Δ′` combinations,
/// `δ₁ = c₁₁ sin²φ₊ + c₂₁ cos²φ₋` and `δ₂ = c₂₂ sin²φ₋ + c₁₂ cos²φ₊`.
pub fn transition_shifts_from_combined(eig: &Eigensystem, combined: &[[f64; 2]; 2]) -> [f64; 2] {
    [0, 1].map(|mu| (0..2).map(|j| combined[j][mu] * eig.channel_weight(j, mu)).sum())
}

pub fn transition_shifts(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    opts: &ShiftOptions,
) -> Result<[f64; 2]> {
    let mut combined = [[0.0; 2]; 2];
    for (j, bath) in baths.iter().enumerate() {
        for mu in 0..2 {
            combined[j][mu] = combined_coefficient(bath, eig.omega[mu], opts)?;
        }
    }
    Ok(transition_shifts_from_combined(eig, &combined))
}

/// `Δ₁…Δ₄` from thermal shifts `Δ_jμ` and the split vacuum shifts `Δ±_jμ`,
/// all indexed `[j][mu]`.
pub fn level_shifts_from_parts(
    eig: &Eigensystem,
    thermal: &[[f64; 2]; 2],
    plus: &[[f64; 2]; 2],
    minus: &[[f64; 2]; 2],
) -> [f64; 4] {
    // S_j(+ω_μ) = Δ + Δ⁻ sits on the upper level of each jump, S_j(−ω_μ) = −(Δ + Δ⁺)
    // on the lower one.
    let mut shifts = [0.0; 4];
    let ops = crate::model::jump_operators(eig);
    for op in ops.iter() {
        let (j, mu) = (op.qubit, op.transition);
        let w = eig.channel_weight(j, mu);
        let s_plus = thermal[j][mu] + minus[j][mu];
        let s_minus = -(thermal[j][mu] + plus[j][mu]);
        for p in &op.pairs {
            shifts[p.from] += s_plus * w;
            shifts[p.to] += s_minus * w;
        }
    }
    shifts
}

/// Transition shifts implied by a set of level shifts, once per link:
/// `δ₁` from `Δ₂ − Δ₃` and `Δ₄ − Δ₁`, `δ₂` from `Δ₂ − Δ₄` and `Δ₃ − Δ₁`.
pub fn transition_shifts_from_levels(levels: &[f64; 4]) -> [[f64; 2]; 2] {
    [
        [levels[1] - levels[2], levels[3] - levels[0]],
        [levels[1] - levels[3], levels[2] - levels[0]],
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambShiftReport {
    pub delta_jmu: [[f64; 2]; 2],
    pub delta_prime_jmu: [[f64; 2]; 2],
    /// Present for Drude baths only.
    pub r_jmu: [[Option<f64>; 2]; 2],
    pub r_estimate_jmu: [[Option<f64>; 2]; 2],
    /// `(Δ⁺, Δ⁻)` from quadrature.
    pub delta_pm: Option<[[(f64, f64); 2]; 2]>,
    pub level_shifts: Option<[f64; 4]>,
    pub transition_shifts: [f64; 2],
    pub method: [Method; 2],
}

/// Every shift quantity for the given baths. Level shifts need the split
/// vacuum integrals `Δ±`, which are only available by quadrature, so they are
/// computed only on request.
pub fn lamb_shift_report(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    opts: &ShiftOptions,
    with_level_shifts: bool,
) -> Result<LambShiftReport> {
    let mut delta = [[0.0; 2]; 2];
    let mut delta_prime = [[0.0; 2]; 2];
    let mut r = [[None; 2]; 2];
    let mut r_est = [[None; 2]; 2];
    for (j, bath) in baths.iter().enumerate() {
        for mu in 0..2 {
            let w = eig.omega[mu];
            let (d, dp) = thermal_and_vacuum(bath, w, opts)?;
            delta[j][mu] = d;
            delta_prime[j][mu] = dp;
            if bath.kind == SpectralKind::Drude {
                r[j][mu] = Some(matsubara_r(bath, w, opts.series_tol)?.value);
                r_est[j][mu] = Some(matsubara_r_estimate(bath, w)?);
            }
        }
    }
    let combined = [0, 1].map(|j| [0, 1].map(|mu| 2.0 * delta[j][mu] + delta_prime[j][mu]));
    let transition = transition_shifts_from_combined(eig, &combined);

    let (delta_pm, level_shifts) = if with_level_shifts {
        let (pm, levels) = level_shifts_with_pm(eig, baths, &delta, &delta_prime, opts)?;
        (Some(pm), Some(levels))
    } else {
        (None, None)
    };

    Ok(LambShiftReport {
        delta_jmu: delta,
        delta_prime_jmu: delta_prime,
        r_jmu: r,
        r_estimate_jmu: r_est,
        delta_pm,
        level_shifts,
        transition_shifts: transition,
        method: [opts.method_for(&baths[0]), opts.method_for(&baths[1])],
    })
}

type PmTable = [[(f64, f64); 2]; 2];

fn level_shifts_with_pm(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    thermal: &[[f64; 2]; 2],
    vacuum: &[[f64; 2]; 2],
    opts: &ShiftOptions,
) -> Result<(PmTable, [f64; 4])> {
    let mut pm = [[(0.0, 0.0); 2]; 2];
    let mut plus = [[0.0; 2]; 2];
    let mut minus = [[0.0; 2]; 2];
    for (j, bath) in baths.iter().enumerate() {
        for mu in 0..2 {
            let (p, m) = quadrature::delta_pm_quad(bath, eig.omega[mu], &opts.pv)?;
            pm[j][mu] = (p.value, m.value);
            plus[j][mu] = p.value;
            minus[j][mu] = m.value;
        }
    }
    let levels = level_shifts_from_parts(eig, thermal, &plus, &minus);

    // the level picture must reproduce the transition shifts built from Δ′
    let combined = [0, 1].map(|j| [0, 1].map(|mu| 2.0 * thermal[j][mu] + vacuum[j][mu]));
    let expected = transition_shifts_from_combined(eig, &combined);
    let implied = transition_shifts_from_levels(&levels);
    let scale = levels.iter().fold(1e-3f64, |a, x| a.max(x.abs()));
    let allowed = 1e-10f64.max(100.0 * opts.pv.rel_tol * scale);
    for mu in 0..2 {
        for value in implied[mu] {
            if (value - expected[mu]).abs() > allowed {
                return Err(Error::QuadratureNonConvergence {
                    estimate: value,
                    error: (value - expected[mu]).abs(),
                    subdivisions: 0,
                });
            }
        }
    }
    Ok((pm, levels))
}

/// Level shifts `Δ₁…Δ₄` (thermal parts by `opts`, vacuum split by quadrature).
pub fn level_shifts(eig: &Eigensystem, baths: &[BathSpec; 2], opts: &ShiftOptions) -> Result<[f64; 4]> {
    let mut thermal = [[0.0; 2]; 2];
    let mut vacuum = [[0.0; 2]; 2];
    for (j, bath) in baths.iter().enumerate() {
        for mu in 0..2 {
            let (d, dp) = thermal_and_vacuum(bath, eig.omega[mu], opts)?;
            thermal[j][mu] = d;
            vacuum[j][mu] = dp;
        }
    }
    Ok(level_shifts_with_pm(eig, baths, &thermal, &vacuum, opts)?.1)
}
