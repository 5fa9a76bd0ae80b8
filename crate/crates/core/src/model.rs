//! Two coupled qubits, `H_S = ε₁/2 σ₁ᶻ + ε₂/2 σ₂ᶻ + g σ₁ˣσ₂ˣ`, and the secular
//! jump operators it induces on each qubit's bath channel.
//!
//! Conventions used throughout the crate:
//! - `σᶻ|0⟩ = −|0⟩`, so `|0,0⟩` is the uncoupled ground state.
//! - Product basis order is `{|0,0⟩, |1,1⟩, |1,0⟩, |0,1⟩}` (first slot is qubit 1).
//! - Eigenstates are ordered `s₁…s₄` with energies `(−β, β, α, −α)`.
//! - Qubit index `j` and transition index `μ` are zero-based in code.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub eps1: f64,
    pub eps2: f64,
    pub g: f64,
}

impl SystemParams {
    pub fn new(eps1: f64, eps2: f64, g: f64) -> Result<Self> {
        let params = Self { eps1, eps2, g };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("eps1", self.eps1)?;
        require_positive("eps2", self.eps2)?;
        require_positive("g", self.g)?;
        Ok(())
    }

    /// Returns parameters with `eps1 >= eps2`, and whether the qubit labels
    /// had to be exchanged to get there.
    pub fn normalized(&self) -> (Self, bool) {
        if self.eps2 > self.eps1 {
            (
                Self {
                    eps1: self.eps2,
                    eps2: self.eps1,
                    g: self.g,
                },
                true,
            )
        } else {
            (*self, false)
        }
    }

    /// `H_S` in the product basis `{|0,0⟩, |1,1⟩, |1,0⟩, |0,1⟩}`.
    pub fn hamiltonian_product_basis(&self) -> Matrix4<f64> {
        let sum = 0.5 * (self.eps1 + self.eps2);
        let diff = 0.5 * (self.eps1 - self.eps2);
        let g = self.g;
        Matrix4::new(
            -sum, g, 0.0, 0.0, //
            g, sum, 0.0, 0.0, //
            0.0, 0.0, diff, g, //
            0.0, 0.0, g, -diff,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigensystem {
    pub params: SystemParams,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    /// `s₁…s₄ = (−β, β, α, −α)`.
    pub levels: [f64; 4],
    /// `ω₁ = β − α`, `ω₂ = β + α`.
    pub omega: [f64; 2],
}

/// Diagonalizes `H_S` analytically.
///
/// The angles come from `atan2`, so `ε₁ = ε₂` gives `θ = π/2` exactly. The
/// formulas stay valid for `ε₁ < ε₂` as well (θ then lies in `(π/2, π)`);
/// callers who want the conventional labelling should use
/// [`SystemParams::normalized`] first.
pub fn eigensystem(params: &SystemParams) -> Result<Eigensystem> {
    params.validate()?;
    let SystemParams { eps1, eps2, g } = *params;
    let half_sum = 0.5 * (eps1 + eps2);
    let half_diff = 0.5 * (eps1 - eps2);
    let alpha = half_diff.hypot(g);
    let beta = half_sum.hypot(g);
    let phi = (2.0 * g).atan2(eps1 + eps2);
    let theta = (2.0 * g).atan2(eps1 - eps2);
    // β² − α² = ε₁ε₂, avoids cancellation in β − α
    let omega1 = eps1 * eps2 / (beta + alpha);
    let omega2 = beta + alpha;
    Ok(Eigensystem {
        params: *params,
        alpha,
        beta,
        theta,
        phi,
        phi_plus: 0.5 * (theta + phi),
        phi_minus: 0.5 * (theta - phi),
        levels: [-beta, beta, alpha, -alpha],
        omega: [omega1, omega2],
    })
}

impl Eigensystem {
    /// Squared jump amplitude for qubit `j` on transition `mu`:
    /// `sin²φ₊, cos²φ₊` for qubit 1 and `cos²φ₋, sin²φ₋` for qubit 2.
    pub fn channel_weight(&self, j: usize, mu: usize) -> f64 {
        let a = jump_amplitude(self, j, mu);
        a * a
    }

    pub fn sin2_phi_plus(&self) -> f64 {
        self.phi_plus.sin().powi(2)
    }

    pub fn cos2_phi_plus(&self) -> f64 {
        self.phi_plus.cos().powi(2)
    }

    pub fn sin2_phi_minus(&self) -> f64 {
        self.phi_minus.sin().powi(2)
    }

    pub fn cos2_phi_minus(&self) -> f64 {
        self.phi_minus.cos().powi(2)
    }

    pub fn hamiltonian_eigenbasis(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::from(self.levels))
    }
}

fn jump_amplitude(eig: &Eigensystem, j: usize, mu: usize) -> f64 {
    match (j, mu) {
        (0, 0) => eig.phi_plus.sin(),
        (0, 1) => eig.phi_plus.cos(),
        (1, 0) => eig.phi_minus.cos(),
        (1, 1) => eig.phi_minus.sin(),
        _ => panic!("qubit and transition indices must be 0 or 1, got ({j}, {mu})"),
    }
}

/// Columns are `|s₁⟩…|s₄⟩` expressed in the product basis.
pub fn eigenvector_matrix(eig: &Eigensystem) -> Matrix4<f64> {
    let (sp, cp) = (0.5 * eig.phi).sin_cos();
    let (st, ct) = (0.5 * eig.theta).sin_cos();
    Matrix4::new(
        cp, sp, 0.0, 0.0, //
        -sp, cp, 0.0, 0.0, //
        0.0, 0.0, ct, -st, //
        0.0, 0.0, st, ct,
    )
}

/// One matrix element `|s_to⟩⟨s_from|` of a jump operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelPair {
    pub to: usize,
    pub from: usize,
    pub sign: f64,
}

/// `V_jμ = amplitude · Σ sign |s_to⟩⟨s_from|`, lowering the energy by `ω_μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOperator {
    pub qubit: usize,
    pub transition: usize,
    pub amplitude: f64,
    pub pairs: [LevelPair; 2],
}

impl JumpOperator {
    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for p in &self.pairs {
            m[(p.to, p.from)] += self.amplitude * p.sign;
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOperatorSet {
    /// Indexed `[j][mu]`.
    pub ops: [[JumpOperator; 2]; 2],
}

impl JumpOperatorSet {
    pub fn get(&self, j: usize, mu: usize) -> &JumpOperator {
        &self.ops[j][mu]
    }

    pub fn iter(&self) -> impl Iterator<Item = &JumpOperator> {
        self.ops.iter().flatten()
    }
}

const fn pair(to: usize, from: usize, sign: f64) -> LevelPair {
    LevelPair { to, from, sign }
}

pub fn jump_operators(eig: &Eigensystem) -> JumpOperatorSet {
    // zero-based: s1 -> 0, s2 -> 1, s3 -> 2, s4 -> 3
    let op = |j: usize, mu: usize, pairs: [LevelPair; 2]| JumpOperator {
        qubit: j,
        transition: mu,
        amplitude: jump_amplitude(eig, j, mu),
        pairs,
    };
    JumpOperatorSet {
        ops: [
            [
                op(0, 0, [pair(2, 1, 1.0), pair(0, 3, -1.0)]),
                op(0, 1, [pair(0, 2, 1.0), pair(3, 1, 1.0)]),
            ],
            [
                op(1, 0, [pair(2, 1, 1.0), pair(0, 3, 1.0)]),
                op(1, 1, [pair(0, 2, 1.0), pair(3, 1, -1.0)]),
            ],
        ],
    }
}

/// `σ_jˣ` in the product basis `{|0,0⟩, |1,1⟩, |1,0⟩, |0,1⟩}`.
pub fn sigma_x_product_basis(j: usize) -> Matrix4<f64> {
    // flipping qubit 1 maps 00<->10 and 11<->01; qubit 2 maps 00<->01 and 11<->10
    let swaps: [(usize, usize); 2] = match j {
        0 => [(0, 2), (1, 3)],
        1 => [(0, 3), (1, 2)],
        _ => panic!("qubit index must be 0 or 1, got {j}"),
    };
    let mut m = Matrix4::zeros();
    for (a, b) in swaps {
        m[(a, b)] = 1.0;
        m[(b, a)] = 1.0;
    }
    m
}

/// Warnings for parameter sets outside the weak-coupling, well-separated
/// regime where the secular master equation is trustworthy.
pub fn hierarchy_warnings(eig: &Eigensystem, omega_d: f64, gammas: [f64; 2]) -> Vec<String> {
    const MUCH_GREATER: f64 = 10.0;
    let mut out = Vec::new();
    let g = eig.params.g;
    if omega_d / g < MUCH_GREATER {
        out.push(format!(
            "cutoff not well above the qubit coupling: omega_d/g = {:.3}",
            omega_d / g
        ));
    }
    let gamma_max = gammas[0].max(gammas[1]);
    let rate_scale = gamma_max * eig.omega[1];
    if 2.0 * eig.alpha <= MUCH_GREATER * rate_scale {
        out.push(format!(
            "secular approximation questionable: level gap 2*alpha = {:.4e} vs dissipation scale {:.4e}",
            2.0 * eig.alpha,
            rate_scale
        ));
    }
    out
}
