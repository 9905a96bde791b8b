#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use weq_core::quadrature::{integrate_adaptive_vec, QuadraturePolicy};
use weq_core::wavepacket::{classical_center, evolved_width, EvolvedPacket};
use weq_core::{
    reference_time, GaussianPacketSpec, Scenario, StatisticsKind, TwoBodyConfig, HBAR,
    NEUTRON_MASS, STANDARD_G,
};

pub const SIGMA0: f64 = 10e-6;

pub fn t_ref() -> f64 {
    reference_time(NEUTRON_MASS, SIGMA0)
}

pub fn fall() -> Scenario {
    Scenario::FreeFall { g: STANDARD_G }
}

pub fn packet(zc: f64, k: f64) -> GaussianPacketSpec {
    GaussianPacketSpec::new(SIGMA0, zc * SIGMA0, k / SIGMA0).unwrap()
}

/// Table geometry: b at 8 sigma, both kicked by -2/sigma in free evolution
/// and released at rest in the field.
pub fn table_config(z_ca: f64, stats: StatisticsKind, scenario: Scenario) -> TwoBodyConfig {
    let k = if scenario.is_free_fall() { 0.0 } else { -2.0 };
    TwoBodyConfig::new(
        packet(z_ca, k),
        packet(8.0, k),
        stats,
        scenario,
        NEUTRON_MASS,
    )
    .unwrap()
}

/// A valid random two-body configuration; FD states are kept away from the
/// degenerate limit.
pub fn random_config<R: Rng>(rng: &mut R) -> TwoBodyConfig {
    loop {
        let mut spec = || {
            let sigma = rng.gen_range(5e-6..20e-6);
            GaussianPacketSpec::new(
                sigma,
                rng.gen_range(-15.0..15.0) * SIGMA0,
                rng.gen_range(-3.0..3.0) / sigma,
            )
            .unwrap()
        };
        let (a, b) = (spec(), spec());
        let stats = StatisticsKind::ALL[rng.gen_range(0..3)];
        let scenario = if rng.gen_bool(0.5) {
            Scenario::FreeEvolution
        } else {
            Scenario::FreeFall {
                g: rng.gen_range(1.0..20.0),
            }
        };
        let mass = NEUTRON_MASS * 10f64.powf(rng.gen_range(-0.6..2.0));
        let config = TwoBodyConfig::new(a, b, stats, scenario, mass).unwrap();
        let s2 = weq_core::wavepacket::overlap(&a, &b, scenario).norm_sqr();
        if stats != StatisticsKind::FermiDirac || s2 < 0.95 {
            return config;
        }
    }
}

/// Window holding both packets at time `t`, with their centers.
pub fn window(config: &TwoBodyConfig, t: f64, widths: f64) -> (f64, f64, [f64; 2]) {
    let centers = [&config.packet_a, &config.packet_b]
        .map(|p| classical_center(p, config.mass, config.scenario, t));
    let reach = [&config.packet_a, &config.packet_b]
        .map(|p| evolved_width(p.sigma0, config.mass, t))
        .into_iter()
        .fold(0.0, f64::max)
        * widths;
    let lo = centers[0].min(centers[1]) - reach;
    let hi = centers[0].max(centers[1]) + reach;
    (lo, hi, centers)
}

fn breakpoints(lo: f64, hi: f64, centers: [f64; 2]) -> Vec<f64> {
    let mut pts = vec![lo, hi, centers[0], centers[1]];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn tight() -> QuadraturePolicy {
    QuadraturePolicy::default().with_tolerances(1e-14, 1e-12)
}

pub fn density_integral(config: &TwoBodyConfig, t: f64) -> f64 {
    let system = weq_core::one_body::TwoBodySystem::new(*config).unwrap();
    let snap = system.at(t).unwrap();
    let (lo, hi, centers) = window(config, t, 16.0);
    integrate_adaptive_vec(|z| [snap.rho(z)], &breakpoints(lo, hi, centers), &tight())
        .unwrap()
        .values[0]
}

/// `<psi_a(t)|psi_b(t)>` by quadrature of the evolved amplitudes.
pub fn grid_overlap(config: &TwoBodyConfig, t: f64) -> Complex64 {
    let a = EvolvedPacket::new(&config.packet_a, config.mass, config.scenario, t).unwrap();
    let b = EvolvedPacket::new(&config.packet_b, config.mass, config.scenario, t).unwrap();
    let (lo, hi, centers) = window(config, t, 16.0);
    let v = integrate_adaptive_vec(
        |z| {
            let p = a.amplitude(z).conj() * b.amplitude(z);
            [p.re, p.im]
        },
        &breakpoints(lo, hi, centers),
        &tight(),
    )
    .unwrap()
    .values;
    Complex64::new(v[0], v[1])
}

/// Fourth-order central difference in units of the step.
fn stencil<F: Fn(f64) -> f64>(f: F) -> f64 {
    (8.0 * (f(1.0) - f(-1.0)) - (f(2.0) - f(-2.0))) / 12.0
}

/// `|d rho/dt + d j/dz|` by central differences, and the scale it is judged
/// against, floored at `1e-10` of a peak density so the far tails do not count.
pub fn continuity_residual(config: &TwoBodyConfig, z: f64, t: f64) -> (f64, f64) {
    let system = weq_core::one_body::TwoBodySystem::new(*config).unwrap();
    let hz = 1e-3 * config.packet_a.sigma0.min(config.packet_b.sigma0);
    // a falling packet can cross its own width long before the spreading time
    let speed = [&config.packet_a, &config.packet_b]
        .map(|p| (HBAR * p.k / config.mass - config.scenario.gravity() * t).abs())
        .into_iter()
        .fold(0.0, f64::max);
    let ht = 1e-3 * config.time_scale().min(1e3 * hz / speed.max(1e-300));
    let width = window(config, t, 1.0).1 - window(config, t, 0.0).1;
    let drho = stencil(|s| system.rho1(z, t + s * ht).unwrap()) / ht;
    let dj = stencil(|s| system.j1(z + s * hz, t).unwrap()) / hz;
    (
        (drho + dj).abs(),
        drho.abs() + dj.abs() + (system.rho1(z, t).unwrap() + 1e-10 / width) / config.time_scale(),
    )
}

/// Time scale for finite-difference probes: beyond it a heavy packet falls
/// far enough that `z +- h` no longer resolves its width in double precision.
pub fn probe_time_scale(config: &TwoBodyConfig) -> f64 {
    let sigma = config.packet_a.sigma0.max(config.packet_b.sigma0);
    config.time_scale().min(reference_time(NEUTRON_MASS, sigma))
}
