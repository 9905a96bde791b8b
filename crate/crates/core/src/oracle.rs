//! Independent numerical checks: a grid Schrodinger propagator and
//! brute-force moments of sampled densities.
//!
//! The propagator is Strang-split Fourier on a periodic grid. For `V = 0` the
//! kinetic step is exact. For `V = m g z` the splitting is exact up to a
//! global phase `exp(i m g^2 dt^3 / 24 hbar)` per step, which is removed, so
//! the remaining error comes only from the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{ensure_positive, Error, Result};
use crate::model::{GaussianPacketSpec, Scenario, HBAR};
use crate::wavepacket::{classical_center, evolve, evolved_width};

pub const MIN_GRID_POINTS: usize = 1 << 10;

/// Per-run norm drift above which propagation is rejected.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    None,
    /// `V(z) = m g z`.
    Linear {
        g: f64,
    },
}

impl From<Scenario> for Potential {
    fn from(scenario: Scenario) -> Self {
        match scenario {
            Scenario::FreeEvolution => Potential::None,
            Scenario::FreeFall { g } => Potential::Linear { g },
        }
    }
}

/// Amplitudes on the periodic grid `z_j = z_min + j (z_max - z_min) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
    /// Requested time step; [`propagate`] shortens it to divide the interval evenly.
    pub dt: f64,
    pub values: Vec<Complex64>,
    /// Time the amplitudes refer to.
    pub t: f64,
}

impl GridState {
    pub fn sample<F>(z_min: f64, z_max: f64, n_points: usize, dt: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut state = Self {
            z_min,
            z_max,
            n_points,
            dt,
            values: Vec::new(),
            t: 0.0,
        };
        state.validate()?;
        state.values = (0..n_points).map(|j| f(state.z(j))).collect();
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter {
                field: "n_points",
                reason: format!("need at least {MIN_GRID_POINTS}, got {}", self.n_points),
            });
        }
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_min < self.z_max) {
            return Err(Error::InvalidParameter {
                field: "grid",
                reason: format!("invalid extent [{}, {}]", self.z_min, self.z_max),
            });
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: format!("must be finite and > 0, got {}", self.dt),
            });
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max - self.z_min) / self.n_points as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.spacing()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spacing()
    }

    /// `(sum |psi_j - f(z_j)|^2 dz)^(1/2)`.
    pub fn l2_distance<F>(&self, f: F) -> f64
    where
        F: Fn(f64) -> Complex64,
    {
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| (v - f(self.z(j))).norm_sqr())
            .sum();
        (sum * self.spacing()).sqrt()
    }
}

/// Evolves `initial` to `t_final` (measured from `initial.t`).
pub fn propagate(
    initial: &GridState,
    potential: Potential,
    mass: f64,
    t_final: f64,
) -> Result<GridState> {
    initial.validate()?;
    if initial.values.len() != initial.n_points {
        return Err(Error::InvalidParameter {
            field: "values",
            reason: format!(
                "expected {} amplitudes, got {}",
                initial.n_points,
                initial.values.len()
            ),
        });
    }
    ensure_positive("mass", mass)?;
    if t_final < 0.0 || t_final.is_nan() {
        return Err(Error::NegativeTime(t_final));
    }
    let mut state = initial.clone();
    if t_final == 0.0 {
        return Ok(state);
    }
    let steps = (t_final / initial.dt).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let n = state.n_points;
    let dz = state.spacing();

    let kinetic: Vec<Complex64> = (0..n)
        .map(|j| {
            let m = if j <= n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            let k = 2.0 * PI * m / (n as f64 * dz);
            Complex64::from_polar(1.0 / n as f64, -HBAR * k * k * dt / (2.0 * mass))
        })
        .collect();
    let (half_kick, phase_fix) = match potential {
        Potential::None => (None, Complex64::new(1.0, 0.0)),
        Potential::Linear { g } => {
            let kick: Vec<Complex64> = (0..n)
                .map(|j| Complex64::from_polar(1.0, -mass * g * state.z(j) * dt / (2.0 * HBAR)))
                .collect();
            let fix = Complex64::from_polar(1.0, -mass * g * g * dt.powi(3) / (24.0 * HBAR));
            (Some(kick), fix)
        }
    };

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let norm0 = state.norm();
    let buf = &mut state.values;
    for _ in 0..steps {
        if let Some(kick) = &half_kick {
            buf.iter_mut().zip(kick).for_each(|(v, k)| *v *= k);
        }
        forward.process(buf);
        buf.iter_mut().zip(&kinetic).for_each(|(v, k)| *v *= k);
        inverse.process(buf);
        if let Some(kick) = &half_kick {
            buf.iter_mut()
                .zip(kick)
                .for_each(|(v, k)| *v *= k * phase_fix);
        }
    }
    state.t = initial.t + t_final;
    state.dt = dt;
    let drift = (state.norm() - norm0).abs() / norm0;
    if !(drift <= MAX_NORM_DRIFT) {
        return Err(Error::StepSize { drift });
    }
    Ok(state)
}

/// Grid covering a packet from `t = 0` to `t_final` with `n_points` nodes,
/// or the smallest power of two that resolves its momenta if that is larger.
pub fn grid_for_packet(
    spec: &GaussianPacketSpec,
    mass: f64,
    scenario: Scenario,
    t_final: f64,
    min_points: usize,
) -> Result<GridState> {
    spec.validate()?;
    let width = evolved_width(spec.sigma0, mass, t_final);
    let start = spec.z_c;
    let end = classical_center(spec, mass, scenario, t_final);
    // the center of a falling packet can turn around in between
    let apex = if scenario.is_free_fall() && spec.k > 0.0 {
        let t_top = (HBAR * spec.k / mass / scenario.gravity()).min(t_final);
        classical_center(spec, mass, scenario, t_top)
    } else {
        start
    };
    let margin = 14.0 * width;
    let z_min = start.min(end).min(apex) - margin;
    let z_max = start.max(end).max(apex) + margin;
    // largest wavenumber present: kick, gravitational drift and 8 momentum widths
    let k_max =
        spec.k.abs() + mass * scenario.gravity() * t_final / HBAR + 8.0 / (2.0 * spec.sigma0);
    let needed = ((z_max - z_min) * k_max / PI).ceil() as usize;
    let n_points = needed
        .max(min_points)
        .max(MIN_GRID_POINTS)
        .next_power_of_two();
    let dt = if t_final > 0.0 { t_final / 64.0 } else { 1.0 };
    GridState::sample(z_min, z_max, n_points, dt, |z| {
        evolve(spec, mass, scenario, 0.0, z).unwrap_or_default()
    })
}

/// Grid propagation of one packet compared with the closed form at `t`:
/// returns the L2 distance on the grid nodes.
pub fn oracle_l2_error(
    spec: &GaussianPacketSpec,
    mass: f64,
    scenario: Scenario,
    t: f64,
) -> Result<f64> {
    let initial = grid_for_packet(spec, mass, scenario, t, MIN_GRID_POINTS)?;
    let evolved = propagate(&initial, scenario.into(), mass, t)?;
    Ok(evolved.l2_distance(|z| evolve(spec, mass, scenario, t, z).unwrap_or_default()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub norm: f64,
    pub mean: f64,
    pub spread: f64,
}

/// Norm, mean and rms width of a density sampled at `z_min + j dz`.
///
/// Composite Simpson for an odd number of samples, trapezoid otherwise.
/// With `coverage_widths = Some(c)` the grid must extend at least `c`
/// widths beyond the mean on both sides.
pub fn brute_force_moments(
    z_min: f64,
    dz: f64,
    rho: &[f64],
    coverage_widths: Option<f64>,
) -> Result<Moments> {
    if rho.len() < 3 || !(dz > 0.0) {
        return Err(Error::InvalidParameter {
            field: "rho",
            reason: "need at least three samples and a positive spacing".into(),
        });
    }
    let n = rho.len() - 1;
    let weight = |j: usize| -> f64 {
        if n.is_multiple_of(2) {
            let w = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * dz / 3.0
        } else if j == 0 || j == n {
            0.5 * dz
        } else {
            dz
        }
    };
    let (mut m0, mut m1) = (0.0, 0.0);
    for (j, r) in rho.iter().enumerate() {
        let w = weight(j) * r;
        m0 += w;
        m1 += w * (z_min + j as f64 * dz);
    }
    let mean = m1 / m0;
    let var: f64 = rho
        .iter()
        .enumerate()
        .map(|(j, r)| weight(j) * r * (z_min + j as f64 * dz - mean).powi(2))
        .sum::<f64>()
        / m0;
    let moments = Moments {
        norm: m0,
        mean,
        spread: var.sqrt(),
    };
    if let Some(c) = coverage_widths {
        let z_max = z_min + n as f64 * dz;
        let reach = c * moments.spread;
        if mean - reach < z_min || mean + reach > z_max {
            return Err(Error::GridCoverage(format!(
                "[{z_min:e}, {z_max:e}] does not contain mean {mean:e} +/- {c} x {:e}",
                moments.spread
            )));
        }
    }
    Ok(moments)
}
