//! Dense GKLS generator on vectorized 4×4 density matrices, in the
//! eigenbasis of `H_S`. Used as an independent check of the closed forms in
//! [`crate::transport`].
//!
//! Vectorization stacks columns: `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{jump_operators, Eigensystem};
use crate::spectral::{rate, BathSpec, Direction};

pub type Superop = SMatrix<Complex64, 16, 16>;
pub type Density = Matrix4<Complex64>;
type Vec16 = SVector<Complex64, 16>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest `dt · ‖L‖₂` accepted by [`evolve`].
pub const MAX_STEP_NORM: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Level shifts `Δ₁ … Δ₄` added to `H_S`; `None` drops `H_LS`.
    pub lamb_levels: Option<[f64; 4]>,
    /// Multiplies every `Γ_j(+ω)`. Anything but 1 is a deliberately broken
    /// generator, used to make sure the validation suite notices.
    pub emission_scale: f64,
    /// Multiplies every `Γ_j(−ω)`.
    pub absorption_scale: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            lamb_levels: None,
            emission_scale: 1.0,
            absorption_scale: 1.0,
        }
    }
}

impl BuildOptions {
    pub fn with_lamb(levels: [f64; 4]) -> Self {
        Self {
            lamb_levels: Some(levels),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: Superop,
    /// `ℒ₁`, `ℒ₂` alone.
    pub dissipators: [Superop; 2],
    /// `H_S + H_LS`, diagonal in this basis.
    pub hamiltonian: Density,
    pub include_lamb: bool,
}

fn kron(a: &Density, b: &Density) -> Superop {
    let mut out = Superop::zeros();
    for (i, j) in itertools_product() {
        let aij = a[(i, j)];
        if aij == ZERO {
            continue;
        }
        for k in 0..4 {
            for l in 0..4 {
                out[(4 * i + k, 4 * j + l)] = aij * b[(k, l)];
            }
        }
    }
    out
}

fn itertools_product() -> impl Iterator<Item = (usize, usize)> {
    (0..4).flat_map(|i| (0..4).map(move |j| (i, j)))
}

fn to_complex(m: &Matrix4<f64>) -> Density {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `ρ ↦ V ρ V† − ½{V†V, ρ}` as a superoperator.
fn dissipator(v: &Density) -> Superop {
    let id = Density::identity();
    let vdv = v.adjoint() * v;
    kron(&v.conjugate(), v) - (kron(&id, &vdv) + kron(&vdv.transpose(), &id)) * Complex64::from(0.5)
}

pub fn build_liouvillian(
    eig: &Eigensystem,
    baths: &[BathSpec; 2],
    opts: &BuildOptions,
) -> Result<Liouvillian> {
    let mut levels = eig.levels;
    if let Some(shift) = opts.lamb_levels {
        for (e, s) in levels.iter_mut().zip(shift) {
            *e += s;
        }
    }
    let hamiltonian = Density::from_diagonal(&levels.map(|e| Complex64::new(e, 0.0)).into());
    let id = Density::identity();
    let coherent = (kron(&id, &hamiltonian) - kron(&hamiltonian.transpose(), &id)) * (-I);

    let ops = jump_operators(eig);
    let mut dissipators = [Superop::zeros(), Superop::zeros()];
    for op in ops.iter() {
        let bath = &baths[op.qubit];
        let w = eig.omega[op.transition];
        let v = to_complex(&op.matrix());
        let down = rate(bath, w, Direction::Emission)? * opts.emission_scale;
        let up = rate(bath, w, Direction::Absorption)? * opts.absorption_scale;
        dissipators[op.qubit] +=
            dissipator(&v) * Complex64::from(down) + dissipator(&v.adjoint()) * Complex64::from(up);
    }
    Ok(Liouvillian {
        matrix: coherent + dissipators[0] + dissipators[1],
        dissipators,
        hamiltonian,
        include_lamb: opts.lamb_levels.is_some(),
    })
}

pub fn vectorize(rho: &Density) -> Vec16 {
    Vec16::from_iterator(rho.iter().copied())
}

pub fn unvectorize(v: &Vec16) -> Density {
    Density::from_iterator(v.iter().copied())
}

fn hermitize(rho: &Density) -> Density {
    (rho + rho.adjoint()) * Complex64::from(0.5)
}

fn trace(rho: &Density) -> Complex64 {
    rho.trace()
}

/// Operator 2-norm.
pub fn norm(l: &Superop) -> f64 {
    l.singular_values().max()
}

/// Largest `|Σ_n L[(n,n), k]|`: how far the map is from trace preserving.
pub fn trace_residual(l: &Liouvillian) -> f64 {
    (0..16)
        .map(|col| (0..4).map(|n| l.matrix[(5 * n, col)]).sum::<Complex64>().norm())
        .fold(0.0, f64::max)
}

/// Largest coupling between populations and coherences in either direction.
pub fn population_coherence_coupling(l: &Liouvillian) -> f64 {
    let is_pop = |k: usize| k % 5 == 0;
    let mut worst = 0.0f64;
    for r in 0..16 {
        for c in 0..16 {
            if is_pop(r) != is_pop(c) {
                worst = worst.max(l.matrix[(r, c)].norm());
            }
        }
    }
    worst
}

/// Fixed-step RK4 from `rho0` to time `t`, with steps no longer than `dt`.
pub fn evolve(l: &Liouvillian, rho0: &Density, t: f64, dt: f64) -> Result<Density> {
    if !(dt > 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "time step and duration must be positive",
        });
    }
    let product = dt * norm(&l.matrix);
    if product >= MAX_STEP_NORM {
        return Err(Error::StepTooLarge { dt, product });
    }
    let steps = (t / dt).ceil() as u64;
    if steps == 0 {
        return Ok(*rho0);
    }
    let h = Complex64::from(t / steps as f64);
    let half = h * 0.5;
    let m = &l.matrix;
    let mut x = vectorize(rho0);
    for _ in 0..steps {
        let k1 = m * x;
        let k2 = m * (x + k1 * half);
        let k3 = m * (x + k2 * half);
        let k4 = m * (x + k3 * h);
        x += (k1 + (k2 + k3) * Complex64::from(2.0) + k4) * (h / 6.0);
        x = vectorize(&hermitize(&unvectorize(&x)));
    }
    Ok(unvectorize(&x))
}

/// Normalized kernel element of the generator, via SVD.
pub fn steady_state_nullspace(l: &Liouvillian) -> Result<Density> {
    let svd = l.matrix.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let scale = svd.singular_values.max();
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let kernel: Vec<usize> = (0..16).filter(|&k| svd.singular_values[k] <= tol).collect();
    if kernel.len() != 1 {
        return Err(Error::DegenerateSteadyState { dim: kernel.len() });
    }
    let row = v_t.row(kernel[0]);
    let v = Vec16::from_iterator(row.iter().map(|z| z.conj()));
    let rho = hermitize(&unvectorize(&v));
    let tr = trace(&rho);
    Ok(rho / tr)
}

/// `Tr((H_S + H_LS) ℒ_j(ρ))` for each bath.
pub fn current_from_dissipator(l: &Liouvillian, rho: &Density) -> [f64; 2] {
    let x = vectorize(rho);
    l.dissipators
        .map(|d| (l.hamiltonian * unvectorize(&(d * x))).trace().re)
}

/// Eigenvalues of the generator.
pub fn spectrum(l: &Liouvillian) -> Vec<Complex64> {
    let schur = nalgebra::Schur::new(l.matrix);
    let (_, t) = schur.unpack();
    (0..16).map(|k| t[(k, k)]).collect()
}

pub fn populations(rho: &Density) -> [f64; 4] {
    [0, 1, 2, 3].map(|n| rho[(n, n)].re)
}

pub fn max_coherence(rho: &Density) -> f64 {
    itertools_product()
        .filter(|(i, j)| i != j)
        .map(|(i, j)| rho[(i, j)].norm())
        .fold(0.0, f64::max)
}

pub fn maximally_mixed() -> Density {
    Density::identity() * Complex64::from(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lamb::{self, ShiftOptions};
    use crate::model::{eigensystem, SystemParams};
    use crate::transport::{self, Lamb};
    use approx::assert_relative_eq;

    fn reference() -> Eigensystem {
        eigensystem(&SystemParams::new(3.0, 2.0, 0.5).unwrap()).unwrap()
    }

    fn fig5_baths() -> [BathSpec; 2] {
        [
            BathSpec::drude(1.0, 0.01, 50.0).unwrap(),
            BathSpec::drude(11.0, 0.01, 50.0).unwrap(),
        ]
    }

    #[test]
    fn vectorization_convention() {
        let a = Density::from_fn(|i, j| Complex64::new(i as f64, j as f64 + 1.0));
        let b = Density::from_fn(|i, j| Complex64::new((i * j) as f64, 1.0 - i as f64));
        let rho = Density::from_fn(|i, j| Complex64::new(1.0 + (i + 2 * j) as f64, i as f64));
        let lhs = vectorize(&(a * rho * b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&rho);
        assert!((lhs - rhs).norm() < 1e-12);
        assert_eq!(unvectorize(&vectorize(&rho)), rho);
    }

    #[test]
    fn generator_structure() {
        let eig = reference();
        let l = build_liouvillian(&eig, &fig5_baths(), &BuildOptions::default()).unwrap();
        assert!(trace_residual(&l) < 1e-12);
        assert!(population_coherence_coupling(&l) < 1e-14);
        let spec = spectrum(&l);
        let zeros = spec.iter().filter(|z| z.norm() < 1e-10).count();
        assert_eq!(zeros, 1);
        assert!(spec.iter().all(|z| z.re <= 1e-10));
        assert!(spec.iter().filter(|z| z.norm() >= 1e-10).all(|z| z.re < 0.0));
    }

    #[test]
    fn cold_baths_only_emit() {
        let eig = reference();
        let cold = BathSpec::drude(1e-4, 0.01, 50.0).unwrap();
        let l = build_liouvillian(&eig, &[cold, cold], &BuildOptions::default()).unwrap();
        // the ground state is a fixed point and nothing feeds the top level
        let ground = Density::from_fn(|i, j| if i == 0 && j == 0 { 1.0.into() } else { ZERO });
        assert!((l.matrix * vectorize(&ground)).norm() < 1e-14);
        let rho = steady_state_nullspace(&l).unwrap();
        assert_relative_eq!(rho[(0, 0)].re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn nullspace_matches_closed_form() {
        let eig = reference();
        let baths = fig5_baths();
        let closed = transport::steady_state(&eig, &baths).unwrap();
        let shifts = lamb::level_shifts(&eig, &baths, &ShiftOptions::default()).unwrap();
        for opts in [BuildOptions::default(), BuildOptions::with_lamb(shifts)] {
            let l = build_liouvillian(&eig, &baths, &opts).unwrap();
            let rho = steady_state_nullspace(&l).unwrap();
            let pops = populations(&rho);
            for n in 0..4 {
                assert!((pops[n] - closed.populations[n]).abs() < 1e-8);
            }
            assert!(max_coherence(&rho) < 1e-12);
        }
    }

    #[test]
    fn dissipator_current_matches_closed_form() {
        let eig = reference();
        let baths = fig5_baths();
        let opts = ShiftOptions::default();
        let shifts = lamb::level_shifts(&eig, &baths, &opts).unwrap();
        for (build, lamb_flag) in [
            (BuildOptions::default(), Lamb::Off),
            (BuildOptions::with_lamb(shifts), Lamb::On),
        ] {
            let l = build_liouvillian(&eig, &baths, &build).unwrap();
            let rho = steady_state_nullspace(&l).unwrap();
            let [j1, j2] = current_from_dissipator(&l, &rho);
            let closed = transport::heat_current(&eig, &baths, lamb_flag, &opts).unwrap();
            assert_relative_eq!(j1, closed, max_relative = 1e-10);
            assert!((j1 + j2).abs() < 1e-10 * j1.abs());
        }
    }

    #[test]
    fn broken_rates_change_the_current() {
        let eig = reference();
        let baths = fig5_baths();
        let build = BuildOptions {
            emission_scale: 0.5,
            ..BuildOptions::default()
        };
        let l = build_liouvillian(&eig, &baths, &build).unwrap();
        let rho = steady_state_nullspace(&l).unwrap();
        let j1 = current_from_dissipator(&l, &rho)[0];
        let closed = transport::heat_current(&eig, &baths, Lamb::Off, &ShiftOptions::default()).unwrap();
        assert!(((j1 - closed) / closed).abs() > 1e-3);
    }

    #[test]
    fn evolution_reaches_the_kernel() {
        let eig = reference();
        let baths = [
            BathSpec::drude(1.0, 0.02, 50.0).unwrap(),
            BathSpec::drude(3.0, 0.02, 50.0).unwrap(),
        ];
        let l = build_liouvillian(&eig, &baths, &BuildOptions::default()).unwrap();
        let slowest = spectrum(&l)
            .iter()
            .filter(|z| z.norm() > 1e-10)
            .map(|z| -z.re)
            .fold(f64::INFINITY, f64::min);
        let dt = 0.05 / norm(&l.matrix);
        // start from a state with coherences
        let mut rho0 = maximally_mixed();
        rho0[(0, 1)] = Complex64::new(0.1, 0.05);
        rho0[(1, 0)] = rho0[(0, 1)].conj();
        assert_eq!(evolve(&l, &rho0, 0.0, dt).unwrap(), rho0);
        let rho = evolve(&l, &rho0, 50.0 / slowest, dt).unwrap();
        let target = steady_state_nullspace(&l).unwrap();
        assert!((trace(&rho) - 1.0).norm() < 1e-10);
        assert!((rho - target).camax() < 1e-7);
        assert!(max_coherence(&rho) < 1e-8);
        assert!(matches!(
            evolve(&l, &rho0, 1.0, 1.0),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn equal_temperatures_relax_to_gibbs() {
        let eig = reference();
        let b = BathSpec::drude(1.5, 0.02, 50.0).unwrap();
        let l = build_liouvillian(&eig, &[b, b], &BuildOptions::default()).unwrap();
        let rho = steady_state_nullspace(&l).unwrap();
        let w = eig.levels.map(|e| (-e / 1.5).exp());
        let z: f64 = w.iter().sum();
        for n in 0..4 {
            assert_relative_eq!(rho[(n, n)].re, w[n] / z, max_relative = 1e-9);
        }
        let [j1, j2] = current_from_dissipator(&l, &rho);
        assert!(j1.abs() < 1e-14 && j2.abs() < 1e-14);
    }
}
