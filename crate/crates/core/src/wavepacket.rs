//! Closed-form Gaussian packets under free evolution and in a uniform field.
//!
//! A packet starts as
//! `psi(z, 0) = (2 pi sigma0^2)^(-1/4) exp(i k z - (z - z_c)^2 / (4 sigma0^2))`
//! and keeps a Gaussian shape with complex width
//! `s_t = sigma0 (1 + i hbar t / (2 m sigma0^2))`.
//!
//! In the field `V = m g z` the solution is the free one evaluated at
//! `z + g t^2 / 2`, times the position-dependent phase
//! `exp(-i m g t z / hbar - i m g^2 t^3 / (6 hbar))`. That phase is common to
//! every packet of the same mass, so products `psi_b^* psi_a` are evaluated
//! without it (see [`EvolvedPacket::reduced`]).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{GaussianPacketSpec, Scenario, StatisticsKind, HBAR};

/// Value of `psi` or `d psi / dz` at one spacetime point (m^-1/2 or m^-3/2).
pub type ComplexAmplitude = Complex64;

/// Complex width `s_t = sigma0 (1 + i hbar t / 2 m sigma0^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWidth {
    pub value: Complex64,
}

impl ComplexWidth {
    pub fn new(sigma0: f64, mass: f64, t: f64) -> Self {
        Self {
            value: Complex64::new(sigma0, HBAR * t / (2.0 * mass * sigma0)),
        }
    }

    /// `sigma_t = sigma0 sqrt(1 + hbar^2 t^2 / 4 m^2 sigma0^4)`.
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// Real rms width of the evolved density.
pub fn evolved_width(sigma0: f64, mass: f64, t: f64) -> f64 {
    ComplexWidth::new(sigma0, mass, t).modulus()
}

/// Classical trajectory of the packet center.
pub fn classical_center(spec: &GaussianPacketSpec, mass: f64, scenario: Scenario, t: f64) -> f64 {
    let g = scenario.gravity();
    spec.z_c + HBAR * spec.k * t / mass - 0.5 * g * t * t
}

/// One packet frozen at time `t`; evaluates `psi` and its derivative in `z`.
#[derive(Debug, Clone, Copy)]
pub struct EvolvedPacket {
    spec: GaussianPacketSpec,
    mass: f64,
    g: f64,
    t: f64,
    width: Complex64,
    // -ln(2 pi s_t^2) / 4 - i hbar k^2 t / 2m
    log_prefactor: Complex64,
    // 1 / (4 sigma0 s_t)
    inv_four_sigma_s: Complex64,
    drift: f64,
}

impl EvolvedPacket {
    pub fn new(spec: &GaussianPacketSpec, mass: f64, scenario: Scenario, t: f64) -> Result<Self> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        spec.validate()?;
        scenario.validate()?;
        let width = ComplexWidth::new(spec.sigma0, mass, t).value;
        let log_prefactor = -0.25 * (2.0 * PI).ln()
            - 0.5 * width.ln()
            - Complex64::i() * (HBAR * spec.k * spec.k * t / (2.0 * mass));
        Ok(Self {
            spec: *spec,
            mass,
            g: scenario.gravity(),
            t,
            width,
            log_prefactor,
            inv_four_sigma_s: 1.0 / (4.0 * spec.sigma0 * width),
            drift: HBAR * spec.k * t / mass,
        })
    }

    pub fn width(&self) -> ComplexWidth {
        ComplexWidth { value: self.width }
    }

    fn offset(&self, z: f64) -> f64 {
        z + 0.5 * self.g * self.t * self.t - self.spec.z_c - self.drift
    }

    /// `psi` without the common gravitational phase, and `d ln psi / dz`
    /// including the phase's gradient.
    pub fn reduced(&self, z: f64) -> (Complex64, Complex64) {
        let xi = z + 0.5 * self.g * self.t * self.t;
        let u = self.offset(z);
        let log_amp = self.log_prefactor - u * u * self.inv_four_sigma_s
            + Complex64::i() * (self.spec.k * xi);
        let log_deriv = -2.0 * u * self.inv_four_sigma_s
            + Complex64::i() * (self.spec.k - self.mass * self.g * self.t / HBAR);
        (log_amp.exp(), log_deriv)
    }

    fn gauge_phase(&self, z: f64) -> f64 {
        let (m, g, t) = (self.mass, self.g, self.t);
        -(m * g * t * z) / HBAR - m * g * g * t * t * t / (6.0 * HBAR)
    }

    pub fn amplitude(&self, z: f64) -> ComplexAmplitude {
        let (phi, _) = self.reduced(z);
        phi * Complex64::from_polar(1.0, self.gauge_phase(z))
    }

    pub fn derivative(&self, z: f64) -> ComplexAmplitude {
        let (phi, dlog) = self.reduced(z);
        phi * dlog * Complex64::from_polar(1.0, self.gauge_phase(z))
    }

    pub fn density(&self, z: f64) -> f64 {
        self.reduced(z).0.norm_sqr()
    }

    /// Single-packet current `(hbar/m) Im(psi^* psi')`.
    pub fn current(&self, z: f64) -> f64 {
        let (phi, dlog) = self.reduced(z);
        HBAR / self.mass * phi.norm_sqr() * dlog.im
    }
}

pub fn evolve_free(
    spec: &GaussianPacketSpec,
    mass: f64,
    t: f64,
    z: f64,
) -> Result<ComplexAmplitude> {
    Ok(EvolvedPacket::new(spec, mass, Scenario::FreeEvolution, t)?.amplitude(z))
}

pub fn evolve_fall(
    spec: &GaussianPacketSpec,
    mass: f64,
    g: f64,
    t: f64,
    z: f64,
) -> Result<ComplexAmplitude> {
    let scenario = Scenario::free_fall(g)?;
    Ok(EvolvedPacket::new(spec, mass, scenario, t)?.amplitude(z))
}

pub fn evolve(
    spec: &GaussianPacketSpec,
    mass: f64,
    scenario: Scenario,
    t: f64,
    z: f64,
) -> Result<ComplexAmplitude> {
    Ok(EvolvedPacket::new(spec, mass, scenario, t)?.amplitude(z))
}

/// Analytic `d psi / dz`.
pub fn evolve_derivative(
    spec: &GaussianPacketSpec,
    mass: f64,
    scenario: Scenario,
    t: f64,
    z: f64,
) -> Result<ComplexAmplitude> {
    Ok(EvolvedPacket::new(spec, mass, scenario, t)?.derivative(z))
}

/// `<psi_a(t)|psi_b(t)>` from the initial data.
///
/// Unitary evolution leaves the overlap unchanged, and in the uniform field
/// both packets pick up the same phase, so the same expression serves both
/// scenarios (and any pair of kicks).
pub fn overlap(a: &GaussianPacketSpec, b: &GaussianPacketSpec, _scenario: Scenario) -> Complex64 {
    let (sa2, sb2) = (a.sigma0 * a.sigma0, b.sigma0 * b.sigma0);
    let sum = sa2 + sb2;
    let dk = a.k - b.k;
    let dz = a.z_c - b.z_c;
    let prefactor = (2.0 * a.sigma0 * b.sigma0 / sum).sqrt();
    let exponent = Complex64::new(
        -(4.0 * dk * dk * sa2 * sb2 + dz * dz) / (4.0 * sum),
        -dk * (sb2 * a.z_c + sa2 * b.z_c) / sum,
    );
    prefactor * exponent.exp()
}

/// `N = [2 (1 +/- |<a|b>|^2)]^(-1/2)` for BE (+) and FD (-).
pub fn normalization(
    a: &GaussianPacketSpec,
    b: &GaussianPacketSpec,
    statistics: StatisticsKind,
    scenario: Scenario,
) -> Result<f64> {
    let sign = statistics.exchange_sign().ok_or_else(|| {
        Error::UnsupportedConfiguration(
            "normalization constants are defined for BE and FD only".into(),
        )
    })?;
    let overlap_sq = overlap(a, b, scenario).norm_sqr();
    normalization_from_overlap(sign, overlap_sq)
}

pub(crate) fn normalization_from_overlap(sign: f64, overlap_sq: f64) -> Result<f64> {
    let bracket = 1.0 + sign * overlap_sq;
    if bracket <= 1e-14 {
        return Err(Error::DegenerateState);
    }
    Ok((2.0 * bracket).powf(-0.5))
}
