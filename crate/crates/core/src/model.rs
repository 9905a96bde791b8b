//! Physical constants and the parameter types shared by every module.
//!
//! All quantities are SI. Presentation code divides by [`reference_time`],
//! the packet width, or the neutron mass to obtain dimensionless output.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Reduced Planck constant, CODATA 2018 (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Neutron mass as rounded in the reference parameter set (kg).
pub const NEUTRON_MASS: f64 = 1.67e-27;

/// Approximate surface gravity used throughout (m/s^2).
pub const STANDARD_G: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub default_g: f64,
    pub neutron_mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            default_g: STANDARD_G,
            neutron_mass: NEUTRON_MASS,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, default_g: f64, neutron_mass: f64) -> Result<Self> {
        ensure_positive("hbar", hbar)?;
        ensure_positive("default_g", default_g)?;
        ensure_positive("neutron_mass", neutron_mass)?;
        Ok(Self {
            hbar,
            default_g,
            neutron_mass,
        })
    }

    /// `2 m sigma0^2 / hbar` with this constant set.
    pub fn reference_time(&self, mass: f64, sigma0: f64) -> f64 {
        2.0 * mass * sigma0 * sigma0 / self.hbar
    }

    /// `hbar / sqrt(g sigma0^3)` with this constant set.
    pub fn characteristic_mass(&self, g: f64, sigma0: f64) -> f64 {
        self.hbar / (g * sigma0.powi(3)).sqrt()
    }
}

/// Characteristic spreading time `2 m sigma0^2 / hbar` (s).
pub fn reference_time(mass: f64, sigma0: f64) -> f64 {
    PhysicalConstants::default().reference_time(mass, sigma0)
}

/// Mass scale `hbar / sqrt(g sigma0^3)` built from hbar, g and the width (kg).
pub fn characteristic_mass(g: f64, sigma0: f64) -> f64 {
    PhysicalConstants::default().characteristic_mass(g, sigma0)
}

/// Initial data of one Gaussian packet: rms width, center and kick wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketSpec {
    pub sigma0: f64,
    pub z_c: f64,
    pub k: f64,
}

impl GaussianPacketSpec {
    pub fn new(sigma0: f64, z_c: f64, k: f64) -> Result<Self> {
        let spec = Self { sigma0, z_c, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("sigma0", self.sigma0)?;
        ensure_finite("z_c", self.z_c)?;
        ensure_finite("k", self.k)
    }
}

/// External field the packets evolve in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    FreeEvolution,
    /// Uniform field `V(z) = m g z`, z pointing up.
    FreeFall {
        g: f64,
    },
}

impl Scenario {
    pub fn free_fall(g: f64) -> Result<Self> {
        ensure_positive("g", g)?;
        Ok(Scenario::FreeFall { g })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Scenario::FreeEvolution => Ok(()),
            Scenario::FreeFall { g } => ensure_positive("g", g),
        }
    }

    /// Gravitational acceleration, zero for free evolution.
    pub fn gravity(&self) -> f64 {
        match *self {
            Scenario::FreeEvolution => 0.0,
            Scenario::FreeFall { g } => g,
        }
    }

    pub fn is_free_fall(&self) -> bool {
        matches!(self, Scenario::FreeFall { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Scenario::FreeEvolution => "free",
            Scenario::FreeFall { .. } => "fall",
        }
    }
}

/// Particle statistics of the two-body state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatisticsKind {
    /// Distinguishable product state.
    MaxwellBoltzmann,
    /// Symmetrized state (upper sign).
    BoseEinstein,
    /// Antisymmetrized state (lower sign).
    FermiDirac,
}

impl StatisticsKind {
    pub const ALL: [StatisticsKind; 3] = [
        StatisticsKind::BoseEinstein,
        StatisticsKind::FermiDirac,
        StatisticsKind::MaxwellBoltzmann,
    ];

    /// `+1` for BE, `-1` for FD, `None` for MB.
    pub fn exchange_sign(self) -> Option<f64> {
        match self {
            StatisticsKind::MaxwellBoltzmann => None,
            StatisticsKind::BoseEinstein => Some(1.0),
            StatisticsKind::FermiDirac => Some(-1.0),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            StatisticsKind::MaxwellBoltzmann => "MB",
            StatisticsKind::BoseEinstein => "BE",
            StatisticsKind::FermiDirac => "FD",
        }
    }
}

impl fmt::Display for StatisticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for StatisticsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mb" | "maxwell-boltzmann" => Ok(StatisticsKind::MaxwellBoltzmann),
            "be" | "bose-einstein" => Ok(StatisticsKind::BoseEinstein),
            "fd" | "fermi-dirac" => Ok(StatisticsKind::FermiDirac),
            other => Err(Error::InvalidParameter {
                field: "statistics",
                reason: format!("unknown statistics `{other}` (expected mb, be or fd)"),
            }),
        }
    }
}

/// Two identical non-interacting particles built from a pair of packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodyConfig {
    pub packet_a: GaussianPacketSpec,
    pub packet_b: GaussianPacketSpec,
    pub statistics: StatisticsKind,
    pub scenario: Scenario,
    pub mass: f64,
}

impl TwoBodyConfig {
    pub fn new(
        packet_a: GaussianPacketSpec,
        packet_b: GaussianPacketSpec,
        statistics: StatisticsKind,
        scenario: Scenario,
        mass: f64,
    ) -> Result<Self> {
        let config = Self {
            packet_a,
            packet_b,
            statistics,
            scenario,
            mass,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.packet_a.validate()?;
        self.packet_b.validate()?;
        self.scenario.validate()?;
        ensure_positive("mass", self.mass)
    }

    pub fn with_statistics(mut self, statistics: StatisticsKind) -> Self {
        self.statistics = statistics;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    /// Same state with the packet labels exchanged.
    pub fn swapped(mut self) -> Self {
        std::mem::swap(&mut self.packet_a, &mut self.packet_b);
        self
    }

    /// Reference time built from this mass and the wider of the two packets.
    pub fn time_scale(&self) -> f64 {
        reference_time(self.mass, self.packet_a.sigma0.max(self.packet_b.sigma0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIGMA0: f64 = 10e-6;

    #[test]
    fn reference_time_matches_quoted_value() {
        let t_ref = reference_time(NEUTRON_MASS, SIGMA0);
        assert!(((t_ref - 3.165e-3) / 3.165e-3).abs() < 2e-3, "{t_ref}");
    }

    #[test]
    fn reference_time_scaling() {
        let base = reference_time(NEUTRON_MASS, SIGMA0);
        let twice_mass = reference_time(2.0 * NEUTRON_MASS, SIGMA0);
        let twice_width = reference_time(NEUTRON_MASS, 2.0 * SIGMA0);
        assert!((twice_mass / base - 2.0).abs() < 1e-15);
        assert!((twice_width / base - 4.0).abs() < 1e-15);
    }

    #[test]
    fn characteristic_mass_matches_quoted_value() {
        let m0 = characteristic_mass(STANDARD_G, SIGMA0);
        assert!(((m0 - 1.055e-27) / 1.055e-27).abs() < 2e-3, "{m0}");
        let quarter = characteristic_mass(4.0 * STANDARD_G, SIGMA0);
        let eighth = characteristic_mass(STANDARD_G, 4.0 * SIGMA0);
        assert!((quarter / m0 - 0.5).abs() < 1e-14);
        assert!((eighth / m0 - 0.125).abs() < 1e-14);
    }

    #[test]
    fn dimensionless_ratios_are_unit_independent() {
        // Lengths in micrometres, times in milliseconds, masses in units of m_n:
        // hbar becomes 1.0546e-34 * 1e12 um^2 * 1e3 ms^-1 ... / m_n.
        let si = PhysicalConstants::default();
        let scaled =
            PhysicalConstants::new(HBAR * 1e12 * 1e-3 / NEUTRON_MASS, 10.0 * 1e6 * 1e-6, 1.0)
                .unwrap();
        let t_si =
            si.reference_time(3.0 * NEUTRON_MASS, SIGMA0) / si.reference_time(NEUTRON_MASS, SIGMA0);
        let t_scaled = scaled.reference_time(3.0, 10.0) / scaled.reference_time(1.0, 10.0);
        assert!((t_si - t_scaled).abs() < 1e-14);
        let m_si = si.characteristic_mass(10.0, SIGMA0) / NEUTRON_MASS;
        let m_scaled = scaled.characteristic_mass(10.0 * 1e6 * 1e-6, 10.0) / 1.0;
        assert!(
            (m_si - m_scaled).abs() / m_si < 1e-12,
            "{m_si} vs {m_scaled}"
        );
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(GaussianPacketSpec::new(0.0, 0.0, 0.0).is_err());
        assert!(GaussianPacketSpec::new(-1.0, 0.0, 0.0).is_err());
        assert!(GaussianPacketSpec::new(1.0, f64::NAN, 0.0).is_err());
        assert!(Scenario::free_fall(0.0).is_err());
        let p = GaussianPacketSpec::new(SIGMA0, 0.0, 0.0).unwrap();
        assert!(TwoBodyConfig::new(
            p,
            p,
            StatisticsKind::BoseEinstein,
            Scenario::FreeEvolution,
            -1.0
        )
        .is_err());
        assert!(PhysicalConstants::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn statistics_signs_and_parsing() {
        assert_eq!(StatisticsKind::BoseEinstein.exchange_sign(), Some(1.0));
        assert_eq!(StatisticsKind::FermiDirac.exchange_sign(), Some(-1.0));
        assert_eq!(StatisticsKind::MaxwellBoltzmann.exchange_sign(), None);
        assert_eq!(
            "FD".parse::<StatisticsKind>().unwrap(),
            StatisticsKind::FermiDirac
        );
        assert!("xx".parse::<StatisticsKind>().is_err());
    }
}
