//! Arrival-time distribution `Pi(Z, t) = |j_1(Z, t)| / int_0^inf |j_1(Z, t)| dt`
//! at a detector plane and its mean `tau(Z) = int t Pi dt`.
//!
//! The time integral is truncated according to [`CutoffRule`]. In free
//! evolution `j_1(Z, t)` decays only like `t^-2`, so `int t |j| dt` diverges
//! logarithmically and a fixed cutoff is used by default; in free fall the
//! packet passes the detector and the tail is Gaussian.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{GaussianPacketSpec, Scenario, StatisticsKind, TwoBodyConfig};
use crate::one_body::TwoBodySystem;
use crate::quadrature::{integrate_semi_infinite, CutoffRule, QuadraturePolicy, TailRule};

/// Fixed cutoff used for free evolution under [`CutoffRule::Auto`], in reference times.
pub const FREE_EVOLUTION_CUTOFF: f64 = 15.0;

/// Below this flux integral the packet is considered never to reach the detector.
pub const MIN_NORM_INTEGRAL: f64 = 1e-12;

const SAMPLES_PER_INTERVAL: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalResult {
    pub detector_z: f64,
    /// Sample times (s), a uniform refinement of the final adaptive partition.
    pub times: Vec<f64>,
    /// `Pi` at `times` (1/s).
    pub pi_values: Vec<f64>,
    /// `int |j_1| dt` before normalization.
    pub norm_integral: f64,
    pub mean_time: f64,
    pub cutoff_time: f64,
    /// Estimated absolute error of `mean_time / time_unit`.
    pub quadrature_error_estimate: f64,
    /// Time unit used for the integration variable and the error estimate (s).
    pub time_unit: f64,
    /// Sign changes of `j_1(Z, t)` used as breakpoints (s).
    pub current_zeros: Vec<f64>,
}

impl ArrivalResult {
    /// Estimated absolute error of `mean_time` in seconds.
    pub fn mean_time_error(&self) -> f64 {
        self.quadrature_error_estimate * self.time_unit
    }
}

fn resolve_cutoff(config: &TwoBodyConfig, policy: &QuadraturePolicy) -> CutoffRule {
    match policy.cutoff {
        CutoffRule::Auto => match config.scenario {
            Scenario::FreeEvolution => CutoffRule::FixedReferenceTimes(FREE_EVOLUTION_CUTOFF),
            Scenario::FreeFall { .. } => CutoffRule::Adaptive,
        },
        rule => rule,
    }
}

/// Arrival distribution of the configured two-body state at `z = detector_z`.
pub fn arrival_distribution(
    config: &TwoBodyConfig,
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<ArrivalResult> {
    let system = TwoBodySystem::new(*config)?;
    arrival_for_system(&system, detector_z, policy)
}

/// As [`arrival_distribution`] for an already constructed system.
pub fn arrival_for_system(
    system: &TwoBodySystem,
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<ArrivalResult> {
    policy.validate()?;
    if !detector_z.is_finite() {
        return Err(Error::InvalidParameter {
            field: "detector_z",
            reason: format!("must be finite, got {detector_z}"),
        });
    }
    let config = system.config();
    let reference = config.time_scale();
    let crossing = system
        .center_crossing_time(detector_z)
        .ok()
        .filter(|t| *t > 0.0);
    let unit = crossing.unwrap_or(reference);

    let (initial_cutoff, tail) = match resolve_cutoff(config, policy) {
        CutoffRule::FixedReferenceTimes(n) => (n * reference / unit, TailRule::Fixed),
        _ => (policy.initial_cutoff_factor, TailRule::Extend),
    };

    let current = |u: f64| -> f64 {
        system
            .at(u * unit)
            .map(|s| s.current(detector_z))
            .unwrap_or(0.0)
    };
    let est = integrate_semi_infinite(
        |u| {
            let j = current(u).abs() * unit;
            [j, u * j]
        },
        current,
        initial_cutoff,
        tail,
        policy,
    )?;

    let [norm, first] = est.values;
    if !(norm >= MIN_NORM_INTEGRAL) {
        return Err(Error::NoArrival {
            norm_integral: norm,
        });
    }
    let mean_u = first / norm;
    // quadrature error plus the size of the last tail segment
    let [e0, e1] = est.errors;
    let [r0, r1] = est.last_tail_ratio;
    let err0 = e0 + r0 * norm;
    let err1 = e1 + r1 * first.abs();
    let error = err1 / norm + first.abs() * err0 / (norm * norm);

    let mut nodes: Vec<f64> = est
        .intervals
        .iter()
        .flat_map(|&(a, b)| {
            (0..=SAMPLES_PER_INTERVAL)
                .map(move |i| a + (b - a) * i as f64 / SAMPLES_PER_INTERVAL as f64)
        })
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let times: Vec<f64> = nodes.iter().map(|u| u * unit).collect();
    let pi_values = nodes.iter().map(|&u| current(u).abs() / norm).collect();

    Ok(ArrivalResult {
        detector_z,
        times,
        pi_values,
        norm_integral: norm,
        mean_time: mean_u * unit,
        cutoff_time: est.cutoff * unit,
        quadrature_error_estimate: error,
        time_unit: unit,
        current_zeros: est.kinks.iter().map(|u| u * unit).collect(),
    })
}

/// `Pi(Z, t)` at arbitrary times given the flux integral of a previous run.
pub fn pi_at_times(
    config: &TwoBodyConfig,
    detector_z: f64,
    norm_integral: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    let system = TwoBodySystem::new(*config)?;
    times
        .iter()
        .map(|&t| Ok(system.j1(detector_z, t)?.abs() / norm_integral))
        .collect()
}

pub fn mean_arrival_time(
    config: &TwoBodyConfig,
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<f64> {
    Ok(arrival_distribution(config, detector_z, policy)?.mean_time)
}

/// Distribution for a lone packet (the MB state of two copies of it).
pub fn single_packet_arrival(
    packet: &GaussianPacketSpec,
    mass: f64,
    scenario: Scenario,
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<ArrivalResult> {
    let config = TwoBodyConfig::new(
        *packet,
        *packet,
        StatisticsKind::MaxwellBoltzmann,
        scenario,
        mass,
    )?;
    arrival_distribution(&config, detector_z, policy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassSweepRow {
    pub mass: f64,
    pub tau_be: Result<f64>,
    pub tau_fd: Result<f64>,
    pub tau_mb: Result<f64>,
    pub tau_a: Result<f64>,
    pub tau_b: Result<f64>,
}

impl MassSweepRow {
    /// `tau_MB - (tau_a + tau_b) / 2` when all three are available.
    pub fn mb_average_residual(&self) -> Option<f64> {
        match (&self.tau_mb, &self.tau_a, &self.tau_b) {
            (Ok(mb), Ok(a), Ok(b)) => Some(mb - 0.5 * (a + b)),
            _ => None,
        }
    }
}

fn validate_grid(field: &'static str, values: &[f64], positive: bool) -> Result<()> {
    let ok = values
        .iter()
        .all(|v| v.is_finite() && (!positive || *v > 0.0))
        && values.windows(2).all(|w| w[0] <= w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: "values must be finite, sorted ascending (and positive for masses)".into(),
        })
    }
}

/// Mean arrival times for every statistics and both single packets, per mass.
/// Rows come back in input order; failures are recorded per entry.
pub fn mass_sweep(
    template: &TwoBodyConfig,
    masses: &[f64],
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<Vec<MassSweepRow>> {
    template.validate()?;
    validate_grid("masses", masses, true)?;
    Ok(masses
        .par_iter()
        .map(|&mass| {
            let config = template.with_mass(mass);
            let tau = |stats| mean_arrival_time(&config.with_statistics(stats), detector_z, policy);
            let single = |p: &GaussianPacketSpec| {
                single_packet_arrival(p, mass, config.scenario, detector_z, policy)
                    .map(|r| r.mean_time)
            };
            MassSweepRow {
                mass,
                tau_be: tau(StatisticsKind::BoseEinstein),
                tau_fd: tau(StatisticsKind::FermiDirac),
                tau_mb: tau(StatisticsKind::MaxwellBoltzmann),
                tau_a: single(&config.packet_a),
                tau_b: single(&config.packet_b),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationRow {
    pub z_ca: f64,
    pub overlap: f64,
    pub tau_be: Result<f64>,
    pub tau_fd: Result<f64>,
    pub tau_mb: Result<f64>,
}

/// Mean arrival times for each initial center of packet a.
pub fn separation_sweep(
    template: &TwoBodyConfig,
    z_ca_values: &[f64],
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<Vec<SeparationRow>> {
    template.validate()?;
    validate_grid("z_ca", z_ca_values, false)?;
    Ok(z_ca_values
        .par_iter()
        .map(|&z_ca| {
            let mut config = *template;
            config.packet_a.z_c = z_ca;
            let tau = |stats| mean_arrival_time(&config.with_statistics(stats), detector_z, policy);
            SeparationRow {
                z_ca,
                overlap: crate::wavepacket::overlap(
                    &config.packet_a,
                    &config.packet_b,
                    config.scenario,
                )
                .norm(),
                tau_be: tau(StatisticsKind::BoseEinstein),
                tau_fd: tau(StatisticsKind::FermiDirac),
                tau_mb: tau(StatisticsKind::MaxwellBoltzmann),
            }
        })
        .collect())
}
