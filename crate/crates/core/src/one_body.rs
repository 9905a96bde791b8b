//! One-body density and current of a two-particle state.
//!
//! For BE (+) and FD (-) with `S = <a|b>` and `|N|^2 = 1 / 2(1 +/- |S|^2)`:
//!
//! ```text
//! rho_1 = |N|^2 (|psi_a|^2 +/- 2 Re[S psi_b^* psi_a] + |psi_b|^2)
//! j_1   = (hbar/m) |N|^2 Im{psi_a^* psi_a' + psi_b^* psi_b' +/- S psi_b^* psi_a' +/- S^* psi_a^* psi_b'}
//! ```
//!
//! MB is the average of the two single-packet densities and currents, which
//! is the same expression with `|N|^2 = 1/2` and no exchange term.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{GaussianPacketSpec, TwoBodyConfig, HBAR};
use crate::wavepacket::{normalization_from_overlap, overlap, EvolvedPacket};

/// Density and current at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCurrentSample {
    pub z: f64,
    pub t: f64,
    pub rho: f64,
    pub j: f64,
}

/// A two-body configuration with its overlap and normalization cached.
#[derive(Debug, Clone, Copy)]
pub struct TwoBodySystem {
    config: TwoBodyConfig,
    overlap: Complex64,
    norm_sq: f64,
    // +1 BE, -1 FD, 0 MB
    sign: f64,
}

impl TwoBodySystem {
    pub fn new(config: TwoBodyConfig) -> Result<Self> {
        config.validate()?;
        let s = overlap(&config.packet_a, &config.packet_b, config.scenario);
        let (norm_sq, sign) = match config.statistics.exchange_sign() {
            Some(sign) => (
                normalization_from_overlap(sign, s.norm_sqr())?.powi(2),
                sign,
            ),
            None => (0.5, 0.0),
        };
        Ok(Self {
            config,
            overlap: s,
            norm_sq,
            sign,
        })
    }

    pub fn config(&self) -> &TwoBodyConfig {
        &self.config
    }

    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// `|N|^2` (1/2 for MB).
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// Scales `N` by `factor`. Only used to check that verification catches a bad normalization.
    #[doc(hidden)]
    pub fn perturb_normalization(mut self, factor: f64) -> Self {
        self.norm_sq *= factor * factor;
        self
    }

    /// Both packets evolved to time `t`.
    pub fn at(&self, t: f64) -> Result<Snapshot<'_>> {
        let c = &self.config;
        Ok(Snapshot {
            system: self,
            t,
            a: EvolvedPacket::new(&c.packet_a, c.mass, c.scenario, t)?,
            b: EvolvedPacket::new(&c.packet_b, c.mass, c.scenario, t)?,
        })
    }

    pub fn rho1(&self, z: f64, t: f64) -> Result<f64> {
        Ok(self.at(t)?.rho(z))
    }

    pub fn j1(&self, z: f64, t: f64) -> Result<f64> {
        Ok(self.at(t)?.current(z))
    }

    /// `<z>(t) = <z>(0) + t <p>(0)/m - g t^2/2`, exact for the uniform field.
    pub fn mean_position(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let (z0, v0) = self.initial_moments();
        let g = self.config.scenario.gravity();
        Ok(z0 + v0 * t - 0.5 * g * t * t)
    }

    // <z>(0) and <p>(0)/m
    fn initial_moments(&self) -> (f64, f64) {
        let GaussianPacketSpec {
            sigma0: sa,
            z_c: za,
            k: ka,
        } = self.config.packet_a;
        let GaussianPacketSpec {
            sigma0: sb,
            z_c: zb,
            k: kb,
        } = self.config.packet_b;
        let (sa2, sb2) = (sa * sa, sb * sb);
        let exchange = 2.0 * self.sign * self.overlap.norm_sqr();
        let z_mix = (za * sb2 + zb * sa2) / (sa2 + sb2);
        let k_mix = (ka * sa2 + kb * sb2) / (sa2 + sb2);
        let z0 = self.norm_sq * (za + zb + exchange * z_mix);
        let k0 = self.norm_sq * (ka + kb + exchange * k_mix);
        (z0, HBAR * k0 / self.config.mass)
    }

    /// Rms width of `rho_1`. Requires equal widths and equal kicks.
    pub fn position_spread(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let (a, b) = (&self.config.packet_a, &self.config.packet_b);
        if a.sigma0 != b.sigma0 || a.k != b.k {
            return Err(Error::UnsupportedConfiguration(
                "position spread needs packets of equal width and equal kick".into(),
            ));
        }
        let sigma = a.sigma0;
        let tau = HBAR * t / (2.0 * self.config.mass * sigma * sigma);
        let spreading = 1.0 + tau * tau;
        let half_sep = 0.5 * (a.z_c - b.z_c);
        let d2 = half_sep * half_sep;
        let s2 = self.overlap.norm_sqr();
        let exchange = if self.sign == 0.0 {
            0.0
        } else {
            self.sign * spreading * d2 * s2 / (1.0 + self.sign * s2)
        };
        Ok((sigma * sigma * spreading + d2 - exchange).sqrt())
    }

    /// Earliest `t >= 0` at which `<z>(t)` reaches `detector_z`.
    pub fn center_crossing_time(&self, detector_z: f64) -> Result<f64> {
        let (z0, v0) = self.initial_moments();
        let gap = z0 - detector_z;
        let g = self.config.scenario.gravity();
        if gap == 0.0 {
            return Ok(0.0);
        }
        if g == 0.0 {
            let t = -gap / v0;
            return if t.is_finite() && t > 0.0 {
                Ok(t)
            } else {
                Err(Error::NoCrossing)
            };
        }
        // z0 + v0 t - g t^2 / 2 = Z
        let radicand = v0 * v0 + 2.0 * g * gap;
        if radicand < 0.0 {
            return Err(Error::NoCrossing);
        }
        let root = radicand.sqrt();
        let early = (v0 - root) / g;
        let late = (v0 + root) / g;
        if early >= 0.0 {
            Ok(early)
        } else if late >= 0.0 {
            Ok(late)
        } else {
            Err(Error::NoCrossing)
        }
    }
}

/// A [`TwoBodySystem`] with both packets evolved to one time.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    system: &'a TwoBodySystem,
    t: f64,
    a: EvolvedPacket,
    b: EvolvedPacket,
}

impl Snapshot<'_> {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn sample(&self, z: f64) -> DensityCurrentSample {
        let (pa, da) = self.a.reduced(z);
        let (pb, db) = self.b.reduced(z);
        let sys = self.system;
        let s = sys.overlap;
        // psi_b^* psi_a, common gravitational phase cancelled
        let cross = pb.conj() * pa;
        let direct_rho = pa.norm_sqr() + pb.norm_sqr();
        let rho = sys.norm_sq * (direct_rho + 2.0 * sys.sign * (s * cross).re);
        let direct_j = pa.norm_sqr() * da.im + pb.norm_sqr() * db.im;
        let exchange_j = (s * cross * da + (s * cross).conj() * db).im;
        let j = HBAR / sys.config.mass * sys.norm_sq * (direct_j + sys.sign * exchange_j);
        DensityCurrentSample {
            z,
            t: self.t,
            rho: rho.max(0.0),
            j,
        }
    }

    pub fn rho(&self, z: f64) -> f64 {
        self.sample(z).rho
    }

    pub fn current(&self, z: f64) -> f64 {
        self.sample(z).j
    }
}

pub fn rho1(config: &TwoBodyConfig, z: f64, t: f64) -> Result<f64> {
    TwoBodySystem::new(*config)?.rho1(z, t)
}

pub fn j1(config: &TwoBodyConfig, z: f64, t: f64) -> Result<f64> {
    TwoBodySystem::new(*config)?.j1(z, t)
}

pub fn mean_position(config: &TwoBodyConfig, t: f64) -> Result<f64> {
    TwoBodySystem::new(*config)?.mean_position(t)
}

pub fn position_spread(config: &TwoBodyConfig, t: f64) -> Result<f64> {
    TwoBodySystem::new(*config)?.position_spread(t)
}

pub fn center_crossing_time(config: &TwoBodyConfig, detector_z: f64) -> Result<f64> {
    TwoBodySystem::new(*config)?.center_crossing_time(detector_z)
}
