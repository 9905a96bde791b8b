//! The `verify` suite: invariants of the closed forms, grid-oracle
//! comparisons and regression values for the two tables.

use rayon::prelude::*;
use weq_core::arrival::mean_arrival_time;
use weq_core::one_body::TwoBodySystem;
use weq_core::oracle::oracle_l2_error;
use weq_core::quadrature::{integrate_adaptive_vec, QuadraturePolicy};
use weq_core::spin_current::{current_vectors, schrodinger_current_modulus, spin_current_modulus};
use weq_core::wavepacket::{
    classical_center, evolved_width, normalization, overlap, EvolvedPacket,
};
use weq_core::StatisticsKind::{self, BoseEinstein, FermiDirac, MaxwellBoltzmann};
use weq_core::{Scenario, TwoBodyConfig};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, Sink};

/// Reference values of this implementation for the default parameters:
/// (scenario, z_ca / sigma0, overlap, tau_BE, tau_FD, tau_MB in t_ref).
const TABLE_GOLDEN: [(&str, f64, f64, [f64; 3]); 8] = [
    ("free", 10.0, 0.6065, [2.371385, 2.546192, 2.426608]),
    ("free", 11.0, 0.3247, [2.517686, 2.613607, 2.560593]),
    ("free", 12.0, 0.1353, [2.681680, 2.707453, 2.694331]),
    ("free", 13.0, 0.04394, [2.826188, 2.829371, 2.827777]),
    ("fall", 10.0, 0.6065, [1.338654, 1.340010, 1.339083]),
    ("fall", 11.0, 0.3247, [1.373224, 1.374020, 1.373580]),
    ("fall", 12.0, 0.1353, [1.406406, 1.406657, 1.406530]),
    ("fall", 13.0, 0.04394, [1.438103, 1.438145, 1.438124]),
];
const GOLDEN_TAU_TOL: f64 = 1e-5;
const GOLDEN_OVERLAP_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub bound: f64,
}

impl Check {
    fn new(name: &'static str, residual: f64, bound: f64) -> Self {
        Self {
            name,
            residual,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Low-discrepancy point in `[0, 1)`.
fn lattice(i: usize, dim: usize) -> f64 {
    const STEPS: [f64; 4] = [
        0.618_033_988_749_895,
        0.414_213_562_373_095,
        0.732_050_807_568_877,
        0.236_067_977_499_790,
    ];
    ((i as f64 + 0.5) * STEPS[dim % 4]).fract()
}

fn pairs(cfg: &RunConfig) -> CliResult<Vec<TwoBodyConfig>> {
    let z = cfg.z_ca_values()[0];
    let mut out = Vec::new();
    for scenario in [Scenario::FreeEvolution, Scenario::FreeFall { g: cfg.g }] {
        for stats in StatisticsKind::ALL {
            match cfg.two_body(z, stats, scenario) {
                Ok(c) if TwoBodySystem::new(c).is_ok() => out.push(c),
                Ok(_) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn window(c: &TwoBodyConfig, t: f64, widths: f64) -> (f64, f64, Vec<f64>) {
    let centers: Vec<f64> = [&c.packet_a, &c.packet_b]
        .iter()
        .map(|p| classical_center(p, c.mass, c.scenario, t))
        .collect();
    let w = [&c.packet_a, &c.packet_b]
        .iter()
        .map(|p| evolved_width(p.sigma0, c.mass, t))
        .fold(0.0, f64::max);
    let lo = centers[0].min(centers[1]) - widths * w;
    let hi = centers[0].max(centers[1]) + widths * w;
    let mut pts = vec![lo, hi, centers[0], centers[1]];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    (lo, hi, pts)
}

fn tight() -> QuadraturePolicy {
    QuadraturePolicy::default().with_tolerances(1e-14, 1e-12)
}

fn normalization_check(cfg: &RunConfig) -> CliResult<Check> {
    let mut worst: f64 = 0.0;
    for c in pairs(cfg)? {
        let system = TwoBodySystem::new(c)?.perturb_normalization(cfg.debug_norm_factor);
        for f in [0.0, 1.0, 2.0] {
            let t = f * c.time_scale();
            let snap = system.at(t)?;
            let (_, _, pts) = window(&c, t, 16.0);
            let est = integrate_adaptive_vec(|z| [snap.rho(z)], &pts, &tight())?;
            worst = worst.max((est.values[0] - 1.0).abs());
        }
    }
    Ok(Check::new("normalization", worst, 1e-8))
}

/// Fourth-order central difference in units of the step.
fn derivative<F: Fn(f64) -> weq_core::Result<f64>>(f: F) -> weq_core::Result<f64> {
    Ok((8.0 * (f(1.0)? - f(-1.0)?) - (f(2.0)? - f(-2.0)?)) / 12.0)
}

fn continuity_check(cfg: &RunConfig) -> CliResult<Check> {
    let mut worst: f64 = 0.0;
    for c in pairs(cfg)? {
        let system = TwoBodySystem::new(c)?;
        let hz = 1e-3 * c.packet_a.sigma0.min(c.packet_b.sigma0);
        // later on a heavy packet falls too far for z +- h to resolve its width
        let sigma = c.packet_a.sigma0.max(c.packet_b.sigma0);
        let span = c
            .time_scale()
            .min(weq_core::reference_time(weq_core::NEUTRON_MASS, sigma));
        for i in 0..50 {
            let t = (0.1 + 2.9 * lattice(i, 0)) * span;
            let (lo, hi, _) = window(&c, t, 3.0);
            let z = lo + (hi - lo) * lattice(i, 1);
            let speed = [&c.packet_a, &c.packet_b]
                .iter()
                .map(|p| (weq_core::HBAR * p.k / c.mass - c.scenario.gravity() * t).abs())
                .fold(0.0, f64::max);
            let ht = 1e-3 * c.time_scale().min(1e3 * hz / speed.max(1e-300));
            let drho = derivative(|s| system.rho1(z, t + s * ht))? / ht;
            let dj = derivative(|s| system.j1(z + s * hz, t))? / hz;
            let w = (hi - lo) / 6.0;
            let scale = drho.abs() + dj.abs() + (system.rho1(z, t)? + 1e-10 / w) / c.time_scale();
            worst = worst.max((drho + dj).abs() / scale);
        }
    }
    Ok(Check::new("continuity", worst, 1e-6))
}

fn overlap_check(cfg: &RunConfig) -> CliResult<Check> {
    let mut worst: f64 = 0.0;
    for c in pairs(cfg)?
        .into_iter()
        .filter(|c| c.statistics == MaxwellBoltzmann)
    {
        let exact = overlap(&c.packet_a, &c.packet_b, c.scenario);
        for f in [0.0, 1.0, 2.0] {
            let t = f * c.time_scale();
            let a = EvolvedPacket::new(&c.packet_a, c.mass, c.scenario, t)?;
            let b = EvolvedPacket::new(&c.packet_b, c.mass, c.scenario, t)?;
            let (_, _, pts) = window(&c, t, 16.0);
            let v = integrate_adaptive_vec(
                |z| {
                    let p = a.amplitude(z).conj() * b.amplitude(z);
                    [p.re, p.im]
                },
                &pts,
                &tight(),
            )?
            .values;
            worst = worst.max(((v[0] - exact.re).powi(2) + (v[1] - exact.im).powi(2)).sqrt());
        }
    }
    Ok(Check::new("overlap time-invariance", worst, 1e-6))
}

fn gravity_check(cfg: &RunConfig) -> CliResult<Check> {
    let z = cfg.z_ca_values()[0];
    let bits = |g: f64| -> CliResult<Vec<u64>> {
        let c = cfg.two_body(z, BoseEinstein, Scenario::FreeFall { g })?;
        let s = overlap(&c.packet_a, &c.packet_b, c.scenario);
        let mut out = vec![s.re.to_bits(), s.im.to_bits()];
        for stats in [BoseEinstein, FermiDirac] {
            if let Ok(n) = normalization(&c.packet_a, &c.packet_b, stats, c.scenario) {
                out.push(n.to_bits());
            }
            if let Ok(dz) = TwoBodySystem::new(c.with_statistics(stats))
                .and_then(|s| s.position_spread(c.time_scale()))
            {
                out.push(dz.to_bits());
            }
        }
        Ok(out)
    };
    let same = bits(1.0)? == bits(100.0)?;
    Ok(Check::new(
        "g-independence",
        if same { 0.0 } else { 1.0 },
        0.0,
    ))
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn exchange_check(cfg: &RunConfig) -> CliResult<Check> {
    let mut worst: f64 = 0.0;
    for c in pairs(cfg)? {
        let (s, w) = (TwoBodySystem::new(c)?, TwoBodySystem::new(c.swapped())?);
        for i in 0..50 {
            let t = 2.0 * lattice(i, 2) * c.time_scale();
            let (lo, hi, _) = window(&c, t, 3.0);
            let z = lo + (hi - lo) * lattice(i, 3);
            worst = worst
                .max(relative(s.rho1(z, t)?, w.rho1(z, t)?))
                .max(relative(s.j1(z, t)?, w.j1(z, t)?));
        }
    }
    Ok(Check::new("exchange symmetry", worst, 1e-12))
}

fn distinguishable_check(cfg: &RunConfig) -> CliResult<Check> {
    let mut worst: f64 = 0.0;
    for scenario in [Scenario::FreeEvolution, Scenario::FreeFall { g: cfg.g }] {
        let far = cfg.two_body(cfg.z_cb + 50.0, MaxwellBoltzmann, scenario)?;
        let mb = TwoBodySystem::new(far)?;
        for stats in [BoseEinstein, FermiDirac] {
            let q = TwoBodySystem::new(far.with_statistics(stats))?;
            for step in 0..=10 {
                let t = far.time_scale() * step as f64 / 5.0;
                let (lo, hi, _) = window(&far, t, 4.0);
                let mut samples = Vec::with_capacity(201);
                for n in 0..=200 {
                    let z = lo + (hi - lo) * n as f64 / 200.0;
                    samples.push([mb.rho1(z, t)?, q.rho1(z, t)?, mb.j1(z, t)?, q.j1(z, t)?]);
                }
                let max = |k: usize| samples.iter().map(|s| s[k].abs()).fold(1e-300, f64::max);
                let (rho_max, j_max) = (max(0), max(2));
                for s in &samples {
                    worst = worst
                        .max((s[1] - s[0]).abs() / rho_max)
                        .max((s[3] - s[2]).abs() / j_max);
                }
            }
        }
    }
    Ok(Check::new(
        "distinguishable limit at 50 sigma0",
        worst,
        1e-8,
    ))
}

fn moments_check(cfg: &RunConfig) -> CliResult<Check> {
    let mut worst: f64 = 0.0;
    for c in pairs(cfg)? {
        let system = TwoBodySystem::new(c)?;
        for f in [0.0, 1.0] {
            let t = f * c.time_scale();
            let snap = system.at(t)?;
            let (_, _, pts) = window(&c, t, 16.0);
            let m = integrate_adaptive_vec(
                |z| {
                    let r = snap.rho(z);
                    [r, z * r, z * z * r]
                },
                &pts,
                &tight(),
            )?
            .values;
            let mean = m[1] / m[0];
            worst = worst.max((mean - system.mean_position(t)?).abs() / c.packet_a.sigma0);
            if let Ok(spread) = system.position_spread(t) {
                let var = m[2] / m[0] - mean * mean;
                worst = worst.max((var.max(0.0).sqrt() - spread).abs() / c.packet_a.sigma0);
            }
        }
    }
    Ok(Check::new("mean position and spread", worst, 1e-6))
}

fn spin_check(cfg: &RunConfig) -> CliResult<Check> {
    let base = cfg.spin_scenario()?;
    let mut scn = base;
    scn.spin_axis = weq_core::spin_current::SpinScenario::Y_AXIS;
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let mass = base.mass * 10f64.powf(3.0 * lattice(i, 0) - 0.6);
        let s = scn.with_mass(mass);
        let t = (0.01 + 3.0 * lattice(i, 1)) * weq_core::reference_time(mass, s.sigma0);
        let w = evolved_width(s.sigma0, mass, t);
        let zc = s.z_c + weq_core::HBAR * s.k0 * t / mass - 0.5 * s.g * t * t;
        let x = (6.0 * lattice(i, 2) - 3.0) * w;
        let z = zc + (6.0 * lattice(i, 3) - 3.0) * w;
        let v = current_vectors(&s, x, z, t)?;
        let norm = |a: [f64; 3]| a[0].hypot(a[1]).hypot(a[2]);
        worst = worst
            .max(relative(
                schrodinger_current_modulus(&s, x, z, t)?,
                norm(v.schrodinger),
            ))
            .max(relative(
                spin_current_modulus(&s, x, z, t)?,
                norm(v.total()),
            ));
    }
    Ok(Check::new("spin current closed forms", worst, 1e-8))
}

fn oracle_check(cfg: &RunConfig) -> CliResult<Check> {
    let z = cfg.z_ca_values()[0];
    let mut jobs = Vec::new();
    for scenario in [Scenario::FreeEvolution, Scenario::FreeFall { g: cfg.g }] {
        let c = cfg.two_body(z, MaxwellBoltzmann, scenario)?;
        jobs.push((c.packet_a, c.mass, scenario));
        jobs.push((c.packet_b, c.mass, scenario));
    }
    let errors: Vec<weq_core::Result<f64>> = jobs
        .par_iter()
        .map(|(p, m, s)| oracle_l2_error(p, *m, *s, weq_core::reference_time(*m, p.sigma0)))
        .collect();
    let mut worst: f64 = 0.0;
    for e in errors {
        worst = worst.max(e?);
    }
    Ok(Check::new("grid oracle L2", worst, 1e-6))
}

fn table_checks() -> CliResult<Vec<Check>> {
    let defaults = RunConfig::default();
    let unit = defaults.t_ref();
    let results: Vec<CliResult<(f64, f64)>> = TABLE_GOLDEN
        .par_iter()
        .map(|(label, z_ca, ov, taus)| {
            let scenario = if *label == "free" {
                Scenario::FreeEvolution
            } else {
                Scenario::FreeFall { g: defaults.g }
            };
            let mut worst_tau: f64 = 0.0;
            let mut worst_ov: f64 = 0.0;
            for (stats, expected) in [BoseEinstein, FermiDirac, MaxwellBoltzmann]
                .iter()
                .zip(taus)
            {
                let c = defaults.two_body(*z_ca, *stats, scenario)?;
                let tau = mean_arrival_time(&c, defaults.detector(), &defaults.policy)? / unit;
                worst_tau = worst_tau.max((tau - expected).abs());
                worst_ov =
                    worst_ov.max((overlap(&c.packet_a, &c.packet_b, scenario).norm() - ov).abs());
            }
            Ok((worst_tau, worst_ov))
        })
        .collect();
    let mut tau: f64 = 0.0;
    let mut ov: f64 = 0.0;
    for r in results {
        let (t, o) = r?;
        tau = tau.max(t);
        ov = ov.max(o);
    }
    Ok(vec![
        Check::new("table overlaps", ov, GOLDEN_OVERLAP_TOL),
        Check::new("table mean arrival times", tau, GOLDEN_TAU_TOL),
    ])
}

pub fn run_checks(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let quick: [fn(&RunConfig) -> CliResult<Check>; 8] = [
        normalization_check,
        continuity_check,
        overlap_check,
        gravity_check,
        exchange_check,
        distinguishable_check,
        moments_check,
        spin_check,
    ];
    let mut checks: Vec<Check> = quick.par_iter().map(|f| f(cfg)).collect::<CliResult<_>>()?;
    if !cfg.quick {
        checks.push(oracle_check(cfg)?);
        checks.extend(table_checks()?);
    }
    Ok(checks)
}

pub fn verify(cfg: &RunConfig) -> CliResult<()> {
    let checks = run_checks(cfg)?;
    let mut table = crate::commands::header(cfg, "verify");
    table.meta("mode", if cfg.quick { "quick" } else { "full" });
    table.meta("debug_norm_factor", cfg.debug_norm_factor);
    table.columns = vec!["check", "residual", "bound", "status"];
    for c in &checks {
        table.push(vec![
            c.name.into(),
            num(c.residual),
            num(c.bound),
            if c.passed() { "PASS" } else { "FAIL" }.into(),
        ]);
    }
    Sink::from_out(cfg.out.as_deref()).write(&table.render(cfg.format.delimiter()))?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}
