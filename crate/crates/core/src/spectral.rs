//! Ohmic spectral densities with three cutoff shapes, Bose occupation and
//! the golden-rule rates `Γ_j(±ω)`.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralKind {
    /// `γω / (1 + (ω/ω_D)²)`
    Drude,
    /// `γω` below `ω_D`, zero at and above it.
    Sharp,
    /// `γω exp(−ω²/ω_D²)`
    Gaussian,
}

impl SpectralKind {
    pub const ALL: [SpectralKind; 3] = [Self::Drude, Self::Sharp, Self::Gaussian];

    pub fn name(self) -> &'static str {
        match self {
            Self::Drude => "drude",
            Self::Sharp => "sharp",
            Self::Gaussian => "gaussian",
        }
    }
}

impl std::str::FromStr for SpectralKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "drude" => Ok(Self::Drude),
            "sharp" => Ok(Self::Sharp),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(Error::Config(format!(
                "unknown spectral kind `{other}` (expected drude, sharp or gaussian)"
            ))),
        }
    }
}

impl std::fmt::Display for SpectralKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One thermal reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub temperature: f64,
    pub gamma: f64,
    pub omega_d: f64,
    pub kind: SpectralKind,
}

impl BathSpec {
    pub fn new(temperature: f64, gamma: f64, omega_d: f64, kind: SpectralKind) -> Result<Self> {
        let bath = Self {
            temperature,
            gamma,
            omega_d,
            kind,
        };
        bath.validate()?;
        Ok(bath)
    }

    pub fn drude(temperature: f64, gamma: f64, omega_d: f64) -> Result<Self> {
        Self::new(temperature, gamma, omega_d, SpectralKind::Drude)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("temperature", self.temperature)?;
        require_positive("gamma", self.gamma)?;
        require_positive("omega_d", self.omega_d)?;
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        Self {
            temperature,
            ..*self
        }
    }

    /// `J(ω)` for `ω ≥ 0`, without argument checking.
    pub(crate) fn density(&self, omega: f64) -> f64 {
        let x = omega / self.omega_d;
        match self.kind {
            SpectralKind::Drude => self.gamma * omega / (1.0 + x * x),
            SpectralKind::Sharp => {
                if omega < self.omega_d {
                    self.gamma * omega
                } else {
                    0.0
                }
            }
            SpectralKind::Gaussian => self.gamma * omega * (-x * x).exp(),
        }
    }

    /// `n̄(ω)` at this bath's temperature, without argument checking.
    pub(crate) fn occupation(&self, omega: f64) -> f64 {
        bose(omega / self.temperature)
    }
}

fn bose(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

pub fn spectral_density(bath: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            reason: "spectral density needs omega >= 0",
        });
    }
    Ok(bath.density(omega))
}

/// `n̄ = 1/(e^{ω/T} − 1)`.
pub fn bose_occupation(temperature: f64, omega: f64) -> Result<f64> {
    require_positive("temperature", temperature)?;
    require_positive("omega", omega)?;
    Ok(bose(omega / temperature))
}

/// `dn̄/dT = n̄(n̄+1) ω/T²`.
pub fn bose_occupation_dt(temperature: f64, omega: f64) -> Result<f64> {
    let n = bose_occupation(temperature, omega)?;
    Ok(n * (n + 1.0) * omega / (temperature * temperature))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `Γ(+ω) = 2J(ω)(n̄+1)`, the system loses `ω`.
    Emission,
    /// `Γ(−ω) = 2J(ω)n̄`, the system gains `ω`.
    Absorption,
}

pub fn rate(bath: &BathSpec, omega: f64, direction: Direction) -> Result<f64> {
    require_positive("omega", omega)?;
    let j = bath.density(omega);
    let n = bath.occupation(omega);
    Ok(match direction {
        Direction::Emission => 2.0 * j * (n + 1.0),
        Direction::Absorption => 2.0 * j * n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bath(kind: SpectralKind) -> BathSpec {
        BathSpec::new(1.0, 0.01, 50.0, kind).unwrap()
    }

    #[test]
    fn densities_at_cutoff() {
        let wd = 50.0;
        assert_relative_eq!(spectral_density(&bath(SpectralKind::Drude), wd).unwrap(), 0.01 * wd / 2.0);
        assert_eq!(spectral_density(&bath(SpectralKind::Sharp), wd).unwrap(), 0.0);
        assert!(spectral_density(&bath(SpectralKind::Sharp), wd * (1.0 - 1e-12)).unwrap() > 0.0);
        assert_relative_eq!(
            spectral_density(&bath(SpectralKind::Gaussian), wd).unwrap(),
            0.01 * wd / std::f64::consts::E,
            max_relative = 1e-15
        );
        assert!(spectral_density(&bath(SpectralKind::Drude), -1.0).is_err());
        assert_eq!(spectral_density(&bath(SpectralKind::Drude), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn occupation_values() {
        assert_relative_eq!(bose_occupation(1.0, 2f64.ln()).unwrap(), 1.0, max_relative = 1e-14);
        // 1/(e^10 - 1)
        assert_relative_eq!(
            bose_occupation(1.0, 10.0).unwrap(),
            4.540_199_100_968_777e-5,
            max_relative = 1e-13
        );
        let n = bose_occupation(1.0, 1e-6).unwrap();
        assert!((n / 1e6 - 1.0).abs() < 1e-6);
        // expansion T/ω − 1/2: the expm1 form keeps this correction
        assert_relative_eq!(n, 1e6 - 0.5, max_relative = 1e-12);
        assert!(bose_occupation(1.0, 0.0).is_err());
        assert!(bose_occupation(0.0, 1.0).is_err());
    }

    #[test]
    fn rate_limits() {
        let b = bath(SpectralKind::Drude).with_temperature(1e-4);
        let w = 1.5;
        assert_eq!(rate(&b, w, Direction::Absorption).unwrap(), 0.0);
        assert_relative_eq!(rate(&b, w, Direction::Emission).unwrap(), 2.0 * b.density(w));

        let b = bath(SpectralKind::Gaussian).with_temperature(1.0 / 2f64.ln());
        let up = rate(&b, 1.0, Direction::Emission).unwrap();
        let down = rate(&b, 1.0, Direction::Absorption).unwrap();
        assert_relative_eq!(down, up / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn reference_rate() {
        // ω₁ of the (3, 2, 0.5) system, high-precision reference values
        let w1 = 1.842_402_975_609_844_9;
        let b = bath(SpectralKind::Drude);
        assert_relative_eq!(b.density(w1), 0.018_399_047_906_219_27, max_relative = 1e-14);
        assert_relative_eq!(
            rate(&b, w1, Direction::Emission).unwrap(),
            0.043_725_856_545_803_88,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            rate(&b, w1, Direction::Absorption).unwrap(),
            0.006_927_760_733_365_338,
            max_relative = 1e-13
        );
    }

    #[test]
    fn occupation_derivative_matches_finite_difference() {
        let (t, w) = (1.3, 2.1);
        let h = 1e-5;
        let fd = (bose_occupation(t + h, w).unwrap() - bose_occupation(t - h, w).unwrap()) / (2.0 * h);
        assert_relative_eq!(bose_occupation_dt(t, w).unwrap(), fd, max_relative = 1e-8);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("Drude".parse::<SpectralKind>().unwrap(), SpectralKind::Drude);
        assert_eq!("gaussian".parse::<SpectralKind>().unwrap(), SpectralKind::Gaussian);
        assert!("lorentz".parse::<SpectralKind>().is_err());
    }

    fn any_kind() -> impl Strategy<Value = SpectralKind> {
        prop_oneof![
            Just(SpectralKind::Drude),
            Just(SpectralKind::Sharp),
            Just(SpectralKind::Gaussian)
        ]
    }

    proptest! {
        #[test]
        fn kms_detailed_balance(kind in any_kind(), t in 0.05f64..100.0, w in 1e-3f64..40.0) {
            let b = BathSpec::new(t, 0.02, 50.0, kind).unwrap();
            let up = rate(&b, w, Direction::Emission).unwrap();
            let down = rate(&b, w, Direction::Absorption).unwrap();
            let expected = (-w / t).exp() * up;
            prop_assert!((down - expected).abs() <= 1e-12 * expected.abs().max(1e-300));
        }

        #[test]
        fn cutoffs_agree_at_low_frequency(w in 1e-3f64..25.0, wd in 10.0f64..200.0) {
            let w = w.min(wd / 2.0 * 0.999);
            let gamma = 0.03;
            let mk = |kind| BathSpec::new(1.0, gamma, wd, kind).unwrap();
            let sharp = mk(SpectralKind::Sharp).density(w);
            let bound = gamma * w.powi(3) / (wd * wd);
            prop_assert!((mk(SpectralKind::Drude).density(w) - sharp).abs() <= bound * (1.0 + 1e-12));
            prop_assert!((mk(SpectralKind::Gaussian).density(w) - sharp).abs() <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn density_non_negative(kind in any_kind(), w in 0.0f64..1e4) {
            prop_assert!(bath(kind).density(w) >= 0.0);
        }
    }
}
