//! Cross-checks between independent evaluation paths, reported as a
//! pass/fail table.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{self, BuildOptions};
use crate::error::Result;
use crate::lamb::{self, ShiftOptions};
use crate::model::{eigensystem, hierarchy_warnings, Eigensystem, SystemParams};
use crate::presets::{preset_cases, PresetCase, PRESETS};
use crate::quadrature::{self, PvConfig};
use crate::spectral::{rate, BathSpec, Direction, SpectralKind};
use crate::transport::{self, Lamb};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl std::str::FromStr for Level {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            other => Err(crate::Error::Config(format!("unknown level `{other}` (expected quick or full)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub level: Level,
    /// Scales every emission rate in the generator used by the dynamics
    /// checks. 1 is the correct generator.
    pub emission_scale: f64,
}

impl SuiteOptions {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            emission_scale: 1.0,
        }
    }

    fn build(&self, lamb_levels: Option<[f64; 4]>) -> BuildOptions {
        BuildOptions {
            lamb_levels,
            emission_scale: self.emission_scale,
            ..BuildOptions::default()
        }
    }

    fn full(&self) -> bool {
        self.level == Level::Full
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub quantity: String,
    /// Human-readable acceptance condition.
    pub expected: String,
    pub got: f64,
    pub passed: bool,
    pub elapsed: Duration,
}

impl Check {
    fn at_most(name: &str, quantity: &str, got: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            quantity: quantity.into(),
            expected: format!("<= {tol:.1e}"),
            got,
            passed: got <= tol,
            elapsed: Duration::ZERO,
        }
    }

    fn holds(name: &str, quantity: &str, expected: &str, got: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            quantity: quantity.into(),
            expected: expected.into(),
            got,
            passed,
            elapsed: Duration::ZERO,
        }
    }

    fn error(name: &str, err: &crate::Error) -> Self {
        Self {
            name: name.into(),
            quantity: format!("error: {err}"),
            expected: "no error".into(),
            got: f64::NAN,
            passed: false,
            elapsed: Duration::ZERO,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        writeln!(f, "{:<6} {:<width$} {:>13} {:<28} {:>8}  quantity", "status", "check", "got", "expected", "time")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<6} {:<width$} {:>13.6e} {:<28} {:>7.2}s  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.got,
                c.expected,
                c.elapsed.as_secs_f64(),
                c.quantity
            )?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} failed, {:.1}s",
            self.checks.len(),
            failed,
            self.elapsed.as_secs_f64()
        )
    }
}

fn reference_system() -> Eigensystem {
    eigensystem(&SystemParams::new(3.0, 2.0, 0.5).expect("valid")).expect("valid")
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn strict_pv() -> PvConfig {
    PvConfig::default().with_rel_tol(1e-10)
}

fn lamb_oracle(opts: &SuiteOptions) -> Result<Check> {
    let eig = reference_system();
    let (temps, cutoffs): (&[f64], &[f64]) = if opts.full() {
        (&[0.1, 1.0, 10.0], &[10.0, 50.0, 100.0])
    } else {
        (&[1.0], &[50.0])
    };
    let cfg = strict_pv();
    let mut worst = 0.0f64;
    for &t in temps {
        for &wd in cutoffs {
            let b = BathSpec::drude(t, 0.01, wd)?;
            for w in eig.omega {
                worst = worst
                    .max(rel(lamb::delta_analytic(&b, w, 1e-14)?, quadrature::delta_quad(&b, w, &cfg)?.value))
                    .max(rel(
                        lamb::delta_prime_analytic(&b, w)?,
                        quadrature::delta_prime_quad(&b, w, &cfg)?.value,
                    ));
            }
        }
    }
    Ok(Check::at_most("lamb_series_vs_quadrature", "max rel diff of thermal and vacuum shifts", worst, 1e-6))
}

fn remainder_oracle(opts: &SuiteOptions) -> Result<Check> {
    let eig = reference_system();
    let n = if opts.full() { 21 } else { 3 };
    let cfg = strict_pv();
    let w = eig.omega[0];
    let mut worst = 0.0f64;
    for i in 0..n {
        let dt = 100.0 * i as f64 / (n - 1) as f64;
        let b = BathSpec::drude(1.0 + dt, 0.01, 50.0)?;
        let series = lamb::matsubara_r(&b, w, 1e-14)?.value;
        let quad = lamb::r_from_thermal_shift(&b, w, quadrature::delta_quad(&b, w, &cfg)?.value);
        worst = worst.max(rel(series, quad));
    }
    Ok(Check::at_most("remainder_series_vs_quadrature", "max rel diff of R21 over dT/wD in [0,2]", worst, 1e-5))
}

fn combined_identity() -> Result<Check> {
    let eig = reference_system();
    let mut worst = 0.0f64;
    for t in [1e-3, 0.1, 1.0, 10.0, 1e3] {
        let b = BathSpec::drude(t, 0.01, 50.0)?;
        for w in eig.omega {
            let combined = lamb::combined_2d_plus_dprime(&b, w, 1e-14)?;
            let parts = 2.0 * lamb::delta_analytic(&b, w, 1e-14)? + lamb::delta_prime_analytic(&b, w)?;
            worst = worst.max(rel(parts, combined));
        }
    }
    Ok(Check::at_most("combined_shift_identity", "rel diff of 2D+D' series vs separate parts", worst, 1e-10))
}

fn level_shift_consistency(opts: &SuiteOptions) -> Result<Check> {
    let eig = reference_system();
    let kinds: &[SpectralKind] = if opts.full() { &SpectralKind::ALL } else { &[SpectralKind::Drude] };
    let shift = ShiftOptions::default();
    let mut worst = 0.0f64;
    for &kind in kinds {
        let baths = [BathSpec::new(1.0, 0.01, 50.0, kind)?, BathSpec::new(5.0, 0.01, 50.0, kind)?];
        let levels = lamb::level_shifts(&eig, &baths, &shift)?;
        let delta = lamb::transition_shifts(&eig, &baths, &shift)?;
        let implied = lamb::transition_shifts_from_levels(&levels);
        for mu in 0..2 {
            for v in implied[mu] {
                worst = worst.max((v - delta[mu]).abs());
            }
        }
    }
    Ok(Check::at_most("level_shift_consistency", "max |level differences - transition shifts|", worst, 1e-10))
}

/// One representative point per preset curve (and a few more in full mode).
fn oracle_points(opts: &SuiteOptions) -> Result<Vec<(PresetCase, f64)>> {
    let mut out = Vec::new();
    for name in PRESETS {
        for case in preset_cases(name)? {
            let dts: Vec<f64> = if opts.full() {
                vec![0.1 * case.omega_d(), case.omega_d(), case.grid[case.grid.len() - 1]]
            } else {
                vec![10.0]
            };
            for dt in dts {
                out.push((case.clone(), dt));
            }
            if !opts.full() {
                break;
            }
        }
    }
    Ok(out)
}

struct DynamicsComparison {
    population: f64,
    current: f64,
    conservation: f64,
    stationarity: f64,
    commutator: f64,
}

fn compare_with_dynamics(case: &PresetCase, dt: f64, opts: &SuiteOptions) -> Result<DynamicsComparison> {
    let eig = eigensystem(&case.system)?;
    let baths = case.baths_at(dt)?;
    let shift = ShiftOptions::default();
    let closed = transport::steady_state(&eig, &baths)?;
    let levels = lamb::level_shifts(&eig, &baths, &shift)?;
    let mut out = DynamicsComparison {
        population: 0.0,
        current: 0.0,
        conservation: 0.0,
        stationarity: 0.0,
        commutator: 0.0,
    };
    for (lamb_levels, flag) in [(None, Lamb::Off), (Some(levels), Lamb::On)] {
        let l = dynamics::build_liouvillian(&eig, &baths, &opts.build(lamb_levels))?;
        let rho = dynamics::steady_state_nullspace(&l)?;
        let pops = dynamics::populations(&rho);
        for n in 0..4 {
            out.population = out.population.max((pops[n] - closed.populations[n]).abs());
        }
        let [j1, j2] = dynamics::current_from_dissipator(&l, &rho);
        let expected = transport::heat_current(&eig, &baths, flag, &shift)?;
        out.current = out.current.max(rel(j1, expected));
        out.conservation = out.conservation.max((j1 + j2).abs() / j1.abs().max(f64::MIN_POSITIVE));
        let x = dynamics::vectorize(&rho);
        let total = (l.dissipators[0] + l.dissipators[1]) * x;
        out.stationarity = out.stationarity.max(total.norm());
        let h = l.hamiltonian;
        out.commutator = out.commutator.max((h * rho - rho * h).norm());
    }
    Ok(out)
}

fn dynamics_checks(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let points = oracle_points(opts)?;
    let results: Result<Vec<DynamicsComparison>> =
        points.par_iter().map(|(case, dt)| compare_with_dynamics(case, *dt, opts)).collect();
    let results = results?;
    let worst = |f: fn(&DynamicsComparison) -> f64| results.iter().map(f).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("steady_state_vs_nullspace", "max abs population diff", worst(|r| r.population), 1e-8),
        Check::at_most("current_vs_dissipator_trace", "max rel diff of J1, shift on and off", worst(|r| r.current), 1e-10),
        Check::at_most("conservation", "max |J1 + J2| / |J1| from dissipators", worst(|r| r.conservation), 1e-10),
        Check::at_most("stationarity", "max |(L1 + L2) rho|", worst(|r| r.stationarity), 1e-10),
        Check::at_most("commutes_with_hamiltonian", "max |[H_S + H_LS, rho]|", worst(|r| r.commutator), 1e-12),
    ])
}

fn generator_checks(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let eig = reference_system();
    let baths = [BathSpec::drude(1.0, 0.02, 50.0)?, BathSpec::drude(3.0, 0.02, 50.0)?];
    let l = dynamics::build_liouvillian(&eig, &baths, &opts.build(None))?;
    let spectrum = dynamics::spectrum(&l);
    let zeros = spectrum.iter().filter(|z| z.norm() < 1e-10).count();
    let abscissa = spectrum
        .iter()
        .filter(|z| z.norm() >= 1e-10)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut checks = vec![
        Check::at_most("trace_preservation", "max |trace row of L|", dynamics::trace_residual(&l), 1e-12),
        Check::at_most(
            "secular_block_structure",
            "max population-coherence coupling",
            dynamics::population_coherence_coupling(&l),
            1e-14,
        ),
        Check::holds("single_zero_eigenvalue", "number of zero eigenvalues", "== 1", zeros as f64, zeros == 1),
        Check::holds("spectral_gap", "largest real part of nonzero eigenvalues", "< 0", abscissa, abscissa < 0.0),
    ];
    if opts.full() {
        let slowest = -abscissa;
        let dt = 0.05 / dynamics::norm(&l.matrix);
        let mut rho0 = dynamics::maximally_mixed();
        rho0[(0, 1)] = num_complex::Complex64::new(0.1, 0.05);
        rho0[(1, 0)] = rho0[(0, 1)].conj();
        let rho = dynamics::evolve(&l, &rho0, 50.0 / slowest, dt)?;
        let target = dynamics::steady_state_nullspace(&l)?;
        checks.push(Check::at_most(
            "evolution_to_kernel",
            "max |rho(t = 50/gap) - kernel state|",
            (rho - target).camax(),
            1e-7,
        ));
    }
    Ok(checks)
}

fn mutation_detected() -> Result<Check> {
    let eig = reference_system();
    let baths = [BathSpec::drude(1.0, 0.01, 50.0)?, BathSpec::drude(11.0, 0.01, 50.0)?];
    let broken = BuildOptions {
        emission_scale: 0.5,
        ..BuildOptions::default()
    };
    let l = dynamics::build_liouvillian(&eig, &baths, &broken)?;
    let rho = dynamics::steady_state_nullspace(&l)?;
    let j1 = dynamics::current_from_dissipator(&l, &rho)[0];
    let expected = transport::heat_current(&eig, &baths, Lamb::Off, &ShiftOptions::default())?;
    let diff = rel(j1, expected);
    Ok(Check::holds(
        "mutation_detected",
        "rel current diff with emission rates halved",
        "> 1.0e-10",
        diff,
        diff > 1e-10,
    ))
}

fn kms() -> Result<Check> {
    let mut worst = 0.0f64;
    for kind in SpectralKind::ALL {
        for t in [0.05, 0.5, 5.0, 50.0] {
            let b = BathSpec::new(t, 0.02, 50.0, kind)?;
            for i in 1..=40 {
                let w = 0.05 * f64::from(i);
                let up = rate(&b, w, Direction::Emission)?;
                let down = rate(&b, w, Direction::Absorption)?;
                worst = worst.max(rel(down, up * (-w / t).exp()));
            }
        }
    }
    Ok(Check::at_most("kms_detailed_balance", "max rel deviation of G(-w) from exp(-w/T) G(w)", worst, 1e-12))
}

fn second_law(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let shift = ShiftOptions::default();
    let stride = if opts.full() { 1 } else { 10 };
    let mut min_margin = f64::INFINITY;
    let mut worst_conservation = 0.0f64;
    for name in PRESETS {
        for case in preset_cases(name)? {
            let eig = eigensystem(&case.system)?;
            let grid: Vec<f64> = case.grid.iter().step_by(stride).copied().collect();
            let per_point: Result<Vec<(f64, f64)>> = grid
                .par_iter()
                .map(|&dt| {
                    let baths = case.baths_at(dt)?;
                    let delta = lamb::transition_shifts(&eig, &baths, &shift)?;
                    let margin = [eig.omega[0] + delta[0], eig.omega[1] + delta[1]];
                    let j1 = transport::heat_current_with_shifts(&eig, &baths, delta)?;
                    // J2 from bath 2's own expression, with the baths relabelled
                    let swapped = [baths[1], baths[0]];
                    let mirror = swap_system(&eig)?;
                    let j2 = transport::heat_current_with_shifts(&mirror, &swapped, delta)?;
                    let cons = if j1 == 0.0 { (j1 + j2).abs() } else { (j1 + j2).abs() / j1.abs() };
                    Ok((margin[0].min(margin[1]), cons))
                })
                .collect();
            for (m, c) in per_point? {
                min_margin = min_margin.min(m);
                worst_conservation = worst_conservation.max(c);
            }
        }
    }
    Ok(vec![
        Check::holds("second_law_margin", "min of w_mu + delta_mu over every preset", "> 0", min_margin, min_margin > 0.0),
        Check::at_most("conservation_closed_form", "max |J1 + J2| / |J1| over every preset", worst_conservation, 1e-10),
    ])
}

/// The same physical system with the qubit labels exchanged.
fn swap_system(eig: &Eigensystem) -> Result<Eigensystem> {
    let p = eig.params;
    eigensystem(&SystemParams::new(p.eps2, p.eps1, p.g)?)
}

fn saturation() -> Result<Check> {
    let eig = reference_system();
    let shift = ShiftOptions::default();
    let b1 = BathSpec::drude(1.0, 0.01, 50.0)?;
    let sup = transport::current_supremum(&eig, &b1);
    let mut prev = 0.0;
    let mut monotone = true;
    for i in 0..=60 {
        let dt = 10f64.powf(-2.0 + 0.1 * f64::from(i));
        let j = transport::heat_current(&eig, &[b1, b1.with_temperature(1.0 + dt)], Lamb::Off, &shift)?.abs();
        monotone &= j > prev && j < sup;
        prev = j;
    }
    let ratio = prev / sup;
    Ok(Check::holds(
        "saturation_below_supremum",
        "|J1 no shift| / supremum at dT = 1e4 (monotone on log grid)",
        "in (0.98, 1)",
        ratio,
        monotone && ratio > 0.98 && ratio < 1.0,
    ))
}

fn asymptotic_slope() -> Result<Check> {
    let eig = reference_system();
    let shift = ShiftOptions::default();
    let wd = 50.0;
    let b1 = BathSpec::drude(1.0, 0.01, wd)?;
    let deviation = |dt: f64| -> Result<f64> {
        let baths = [b1, b1.with_temperature(1.0 + dt)];
        let report = transport::current_report(&eig, &baths, &shift)?;
        Ok((report.dj_magnitude() / dt - report.asympt_slope) / report.asympt_slope)
    };
    let near = deviation(1e2 * wd)?;
    let far = deviation(1e3 * wd)?;
    // the leading correction falls off as 1/dT
    let order = (near / far).log10();
    Ok(Check::holds(
        "asymptotic_slope",
        "rel deviation of dj/dT from the limiting slope at dT = 1e3 wD",
        "< 2% and ~1/dT decay",
        far.abs(),
        far.abs() < 0.02 && (order - 1.0).abs() < 0.1,
    ))
}

fn crossover() -> Result<Vec<Check>> {
    let shift = ShiftOptions::default();
    let sign_changes = |case: &PresetCase| -> Result<(usize, f64, bool)> {
        let eig = eigensystem(&case.system)?;
        let rows = crate::sweep::sweep(&eig, &case.grid[1..], |dt| case.baths_at(dt), true, &shift)?;
        let mut changes = 0;
        let mut at = f64::NAN;
        for w in rows.windows(2) {
            if (w[0].dj < 0.0) != (w[1].dj < 0.0) {
                changes += 1;
                at = w[1].dt;
            }
        }
        Ok((changes, at, rows[0].dj < 0.0))
    };
    let fig3 = &preset_cases("fig3")?[0];
    let (n3, at3, starts_negative) = sign_changes(fig3)?;
    let mut crossings = Vec::new();
    let mut single = true;
    for case in preset_cases("fig4")? {
        let (n, at, neg) = sign_changes(&case)?;
        single &= n == 1 && neg;
        crossings.push(at);
    }
    let increasing = crossings.windows(2).all(|w| w[1] > w[0]);
    Ok(vec![
        Check::holds(
            "suppression_then_enhancement",
            "dT of the single sign change of dj (fig3 parameters)",
            "one change, negative first",
            at3,
            n3 == 1 && starts_negative,
        ),
        Check::holds(
            "crossover_grows_with_cutoff",
            "crossover dT at wD = 100 (fig4, all four increasing)",
            "strictly increasing",
            crossings[crossings.len() - 1],
            single && increasing,
        ),
    ])
}

fn estimate_order() -> Result<Vec<Check>> {
    let eig = reference_system();
    let wd = 50.0;
    let w = eig.omega[0];
    // beta from 1e-4 to 1e-2 in units of 1/wD
    let points: Vec<(f64, f64)> = (0..=8)
        .map(|i| {
            let beta = 1e-4 * 10f64.powf(0.25 * f64::from(i)) / wd;
            let b = BathSpec::drude(1.0 / beta, 0.01, wd)?;
            let err = (lamb::matsubara_r(&b, w, 1e-14)?.value - lamb::matsubara_r_estimate(&b, w)?).abs();
            Ok((beta.ln(), err.ln()))
        })
        .collect::<Result<_>>()?;
    let slope = least_squares_slope(&points);

    let fig2 = &preset_cases("fig2")?[0];
    let mut prev = f64::INFINITY;
    let mut shrinking = true;
    for &dt in &fig2.grid {
        let b = fig2.baths_at(dt)?[1];
        let err = (lamb::matsubara_r(&b, w, 1e-14)?.value - lamb::matsubara_r_estimate(&b, w)?).abs();
        shrinking &= err < prev;
        prev = err;
    }

    let ratio = |dt: f64| -> Result<f64> {
        let b = BathSpec::drude(1.0 + dt, 0.01, wd)?;
        Ok((lamb::matsubara_r(&b, w, 1e-14)?.value / dt).abs())
    };
    let (r3, r4) = (ratio(1e3)?, ratio(1e4)?);
    Ok(vec![
        Check::holds(
            "estimate_error_order",
            "log-log slope of |R - estimate| vs beta",
            "1 +/- 0.2",
            slope,
            (slope - 1.0).abs() <= 0.2 && shrinking,
        ),
        Check::holds(
            "remainder_over_gradient_vanishes",
            "|R21| / dT at dT = 1e4 (smaller than at 1e3)",
            "decreasing",
            r4,
            r4 < r3,
        ),
    ])
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Parameter draws inside the weak-coupling, well-separated regime.
pub fn random_draws(seed: u64, count: usize) -> Result<Vec<(SystemParams, [BathSpec; 2])>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let eps2 = rng.random_range(1.0..3.0);
        let eps1 = eps2 + rng.random_range(0.0..2.0);
        let g = rng.random_range(0.1..1.0);
        let wd = rng.random_range(20.0..200.0);
        let gammas = [rng.random_range(0.001..0.03), rng.random_range(0.001..0.03)];
        let t1 = rng.random_range(0.2..5.0);
        let dt = rng.random_range(0.0..100.0);
        let params = SystemParams::new(eps1, eps2, g)?;
        let eig = eigensystem(&params)?;
        if !hierarchy_warnings(&eig, wd, gammas).is_empty() {
            continue;
        }
        out.push((
            params,
            [BathSpec::drude(t1, gammas[0], wd)?, BathSpec::drude(t1 + dt, gammas[1], wd)?],
        ));
    }
    Ok(out)
}

/// Central difference of `|J₁⁰|` in `T₂` with step `1e-4 T₁`.
pub fn derivative_by_differences(eig: &Eigensystem, baths: &[BathSpec; 2]) -> Result<f64> {
    let h = 1e-4 * baths[0].temperature;
    let t2 = baths[1].temperature;
    let at = |t: f64| -> Result<f64> {
        let pair = [baths[0], baths[1].with_temperature(t)];
        Ok(-transport::heat_current_with_shifts(eig, &pair, [0.0; 2])?)
    };
    Ok((at(t2 + h)? - at(t2 - h)?) / (2.0 * h))
}

fn derivative(opts: &SuiteOptions) -> Result<Check> {
    let count = if opts.full() { 200 } else { 20 };
    let mut worst = 0.0f64;
    let mut positive = true;
    for (params, baths) in random_draws(2024, count)? {
        let eig = eigensystem(&params)?;
        let exact = transport::current_derivative_dt(&eig, &baths)?;
        positive &= exact > 0.0;
        worst = worst.max(rel(derivative_by_differences(&eig, &baths)?, exact));
    }
    Ok(Check::holds(
        "derivative_vs_finite_difference",
        &format!("max rel diff over {count} random draws (all positive)"),
        "<= 1.0e-6",
        worst,
        worst <= 1e-6 && positive,
    ))
}

fn spectral_kinds(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let shift = ShiftOptions::default();
    let cases = preset_cases("fig6")?;
    let eig = eigensystem(&cases[0].system)?;
    let wd = cases[0].omega_d();
    let n = if opts.full() { 41 } else { 9 };
    let mut worst = 0.0f64;
    for i in 0..n {
        let dt = 2.0 * wd * i as f64 / (n - 1) as f64 + 1e-3;
        let currents: Vec<f64> = cases
            .iter()
            .map(|c| Ok(transport::heat_current(&eig, &c.baths_at(dt)?, Lamb::Off, &shift)?.abs()))
            .collect::<Result<_>>()?;
        let lo = currents.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = currents.iter().cloned().fold(0.0, f64::max);
        worst = worst.max((hi - lo) / hi);
    }
    let grid = &cases[0].grid;
    let mut growing = true;
    let mut last_over_sup = f64::INFINITY;
    for case in &cases {
        let tail: Vec<f64> = grid[grid.len() - 5..].to_vec();
        let values: Vec<f64> = tail
            .iter()
            .map(|&dt| Ok(transport::heat_current(&eig, &case.baths_at(dt)?, Lamb::On, &shift)?.abs()))
            .collect::<Result<_>>()?;
        let sup = transport::current_supremum(&eig, &case.baths[0]);
        growing &= values.windows(2).all(|w| w[1] > w[0]);
        last_over_sup = last_over_sup.min(values[values.len() - 1] / sup);
    }
    Ok(vec![
        Check::at_most("kinds_agree_without_shift", "max rel spread of |J1 no shift| for dT/wD <= 2", worst, 0.01),
        Check::holds(
            "kinds_grow_with_shift",
            "min over kinds of |J1 with shift| / supremum at the last grid point",
            "> 1 and increasing",
            last_over_sup,
            growing && last_over_sup > 1.0,
        ),
    ])
}

type CheckFn = fn(&SuiteOptions) -> Result<Vec<Check>>;

fn one(c: Result<Check>) -> Result<Vec<Check>> {
    c.map(|c| vec![c])
}

const SUITE: [(&str, CheckFn); 15] = [
    ("lamb_series_vs_quadrature", |o| one(lamb_oracle(o))),
    ("remainder_series_vs_quadrature", |o| one(remainder_oracle(o))),
    ("combined_shift_identity", |_| one(combined_identity())),
    ("level_shift_consistency", |o| one(level_shift_consistency(o))),
    ("dynamics", dynamics_checks),
    ("generator", generator_checks),
    ("mutation_detected", |_| one(mutation_detected())),
    ("kms_detailed_balance", |_| one(kms())),
    ("second_law", second_law),
    ("saturation_below_supremum", |_| one(saturation())),
    ("asymptotic_slope", |_| one(asymptotic_slope())),
    ("crossover", |_| crossover()),
    ("estimate", |_| estimate_order()),
    ("derivative_vs_finite_difference", |o| one(derivative(o))),
    ("spectral_kinds", spectral_kinds),
];

pub fn run(opts: &SuiteOptions) -> Report {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (name, f) in SUITE {
        let t0 = Instant::now();
        let mut produced = match f(opts) {
            Ok(v) => v,
            Err(e) => vec![Check::error(name, &e)],
        };
        let elapsed = t0.elapsed();
        let share = elapsed / produced.len().max(1) as u32;
        for c in &mut produced {
            c.elapsed = share;
        }
        checks.extend(produced);
    }
    Report {
        checks,
        elapsed: start.elapsed(),
    }
}
