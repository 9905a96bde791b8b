//! Spin-dependent current of a falling two-dimensional Gaussian.
//!
//! The packet is `psi(x, z, t) = psi_x(x, t) psi_z(z, t)`: a free packet at
//! rest in `x` and a falling packet in `z`. With `s = (hbar/2) s_hat` the
//! current is `j = j_Sch + (1/m) grad(rho) x s`. Arrival distributions use
//! the modulus of the current integrated over the detector line `z = Z`.

use rayon::prelude::*;

use std::f64::consts::PI;

use crate::arrival::ArrivalResult;
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::model::{GaussianPacketSpec, Scenario, HBAR};
use crate::quadrature::{
    integrate_adaptive_vec_with, integrate_semi_infinite_with, QuadraturePolicy, TailRule,
};
use crate::wavepacket::{evolved_width, EvolvedPacket};

/// `x` integrals extend to this many evolved widths on either side.
pub const X_EXTENT_WIDTHS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinScenario {
    pub sigma0: f64,
    pub z_c: f64,
    pub k0: f64,
    pub mass: f64,
    pub g: f64,
    pub spin_axis: [f64; 3],
}

impl SpinScenario {
    pub const Y_AXIS: [f64; 3] = [0.0, 1.0, 0.0];

    pub fn new(
        sigma0: f64,
        z_c: f64,
        k0: f64,
        mass: f64,
        g: f64,
        spin_axis: [f64; 3],
    ) -> Result<Self> {
        let scn = Self {
            sigma0,
            z_c,
            k0,
            mass,
            g,
            spin_axis,
        };
        scn.validate()?;
        Ok(scn)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("sigma0", self.sigma0)?;
        ensure_finite("z_c", self.z_c)?;
        ensure_finite("k0", self.k0)?;
        ensure_positive("mass", self.mass)?;
        ensure_positive("g", self.g)?;
        let norm = self.spin_axis.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() < 1e-12) {
            return Err(Error::InvalidParameter {
                field: "spin_axis",
                reason: format!("must be a unit vector, |s| = {norm}"),
            });
        }
        Ok(())
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    fn is_y_axis(&self) -> bool {
        self.spin_axis == Self::Y_AXIS
    }

    /// Time at which the classical center reaches `detector_z`, if it does.
    pub fn classical_crossing_time(&self, detector_z: f64) -> Option<f64> {
        let u = HBAR * self.k0 / self.mass;
        let radicand = u * u + 2.0 * self.g * (self.z_c - detector_z);
        if radicand < 0.0 {
            return None;
        }
        let root = radicand.sqrt();
        [(u - root) / self.g, (u + root) / self.g]
            .into_iter()
            .find(|t| *t > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentModulusSample {
    pub x: f64,
    pub z: f64,
    pub t: f64,
    pub j_sch_modulus: f64,
    pub j_spin_modulus: f64,
}

/// Schrodinger current and spin term `(1/m) grad(rho) x s` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentVectors {
    pub schrodinger: [f64; 3],
    pub spin_term: [f64; 3],
}

impl CurrentVectors {
    pub fn total(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.schrodinger[i] + self.spin_term[i])
    }

    /// `|j_Sch| - |j|` without cancellation between the two moduli.
    pub fn modulus_difference(&self) -> f64 {
        let (s, w) = (self.schrodinger, self.spin_term);
        let sw: f64 = (0..3).map(|i| s[i] * w[i]).sum();
        let ww: f64 = w.iter().map(|c| c * c).sum();
        let sum = norm3(&s) + norm3(&self.total());
        if sum == 0.0 {
            0.0
        } else {
            -(2.0 * sw + ww) / sum
        }
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    v[0].hypot(v[1]).hypot(v[2])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Both factor packets frozen at one time.
#[derive(Debug, Clone, Copy)]
struct Factors {
    scn: SpinScenario,
    px: EvolvedPacket,
    pz: EvolvedPacket,
}

impl Factors {
    fn new(scn: &SpinScenario, t: f64) -> Result<Self> {
        let px = EvolvedPacket::new(
            &GaussianPacketSpec::new(scn.sigma0, 0.0, 0.0)?,
            scn.mass,
            Scenario::FreeEvolution,
            t,
        )?;
        let pz = EvolvedPacket::new(
            &GaussianPacketSpec::new(scn.sigma0, scn.z_c, scn.k0)?,
            scn.mass,
            Scenario::FreeFall { g: scn.g },
            t,
        )?;
        Ok(Self { scn: *scn, px, pz })
    }

    fn vectors(&self, x: f64, z: f64) -> CurrentVectors {
        let (phx, dx) = self.px.reduced(x);
        let (phz, dz) = self.pz.reduced(z);
        let flux = HBAR / self.scn.mass * phx.norm_sqr() * phz.norm_sqr();
        // rho Im(grad psi / psi) and rho Re(grad psi / psi) = grad(rho) / 2
        let schrodinger = [flux * dx.im, 0.0, flux * dz.im];
        let half_grad = [flux * dx.re, 0.0, flux * dz.re];
        CurrentVectors {
            schrodinger,
            spin_term: cross(half_grad, self.scn.spin_axis),
        }
    }
}

pub fn current_vectors(scn: &SpinScenario, x: f64, z: f64, t: f64) -> Result<CurrentVectors> {
    scn.validate()?;
    Ok(Factors::new(scn, t)?.vectors(x, z))
}

struct Closed {
    sigma_t: f64,
    envelope: f64,
}

fn closed_common(scn: &SpinScenario, x: f64, z: f64, t: f64) -> Closed {
    let sigma_t = evolved_width(scn.sigma0, scn.mass, t);
    let z_cl = -0.5 * scn.g * t * t + HBAR * scn.k0 / scn.mass * t + scn.z_c;
    let envelope = (-(x * x + (z - z_cl).powi(2)) / (2.0 * sigma_t * sigma_t)).exp();
    Closed { sigma_t, envelope }
}

/// `f_0 ... f_4` of the Schrodinger-current modulus.
pub(crate) fn f_coefficients(scn: &SpinScenario, x: f64, z: f64, t: f64) -> [f64; 5] {
    let (h, g, k, s0, zc) = (HBAR, scn.g, scn.k0, scn.sigma0, scn.z_c);
    let s4 = s0.powi(4);
    let s8 = s4 * s4;
    let gt2 = g * t * t;
    let f0 =
        h.powi(4) * t * t * (gt2 * gt2 + 4.0 * (x * x + (z - zc).powi(2)) + 4.0 * gt2 * (zc - z));
    let f1 = -16.0 * h.powi(3) * k * s4 * t * (gt2 - 2.0 * z + 2.0 * zc);
    let f2 = 16.0 * h * h * s4 * (4.0 * k * k * s4 + gt2 * (gt2 - 2.0 * z + 2.0 * zc));
    let f3 = -128.0 * g * h * k * s8 * t;
    let f4 = 64.0 * g * g * s8 * t * t;
    [f0, f1, f2, f3, f4]
}

/// `h_0 ... h_2` of the spin-dependent modulus for `s_hat = (0, 1, 0)`.
pub(crate) fn h_coefficients(scn: &SpinScenario, x: f64, z: f64, t: f64) -> [f64; 3] {
    let (h, g, k, s0, zc) = (HBAR, scn.g, scn.k0, scn.sigma0, scn.z_c);
    let s2 = s0 * s0;
    let gt2 = g * t * t;
    let h0 = h
        * h
        * (16.0 * k * k * s2 * s2 + gt2 * gt2 - 16.0 * k * s2 * x
            + 4.0 * (x * x + (z - zc).powi(2))
            + 4.0 * gt2 * (zc - z));
    let h1 = 16.0 * g * h * s2 * t * (x - 2.0 * k * s2);
    let h2 = 16.0 * g * g * s2 * s2 * t * t;
    [h0, h1, h2]
}

/// `|j_Sch|` from its closed polynomial-under-root form.
pub fn schrodinger_current_modulus(scn: &SpinScenario, x: f64, z: f64, t: f64) -> Result<f64> {
    scn.validate()?;
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let c = closed_common(scn, x, z, t);
    let m = scn.mass;
    let [f0, f1, f2, f3, f4] = f_coefficients(scn, x, z, t);
    let radicand = (((f4 * m + f3) * m + f2) * m + f1) * m + f0;
    Ok(
        radicand.max(0.0).sqrt() / (16.0 * PI * m * m * scn.sigma0.powi(2) * c.sigma_t.powi(4))
            * c.envelope,
    )
}

/// `|j_Sch + (1/m) grad(rho) x s|`; closed form for `s_hat = (0, 1, 0)`,
/// vector construction otherwise.
pub fn spin_current_modulus(scn: &SpinScenario, x: f64, z: f64, t: f64) -> Result<f64> {
    scn.validate()?;
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if !scn.is_y_axis() {
        return Ok(norm3(&Factors::new(scn, t)?.vectors(x, z).total()));
    }
    let c = closed_common(scn, x, z, t);
    let m = scn.mass;
    let [h0, h1, h2] = h_coefficients(scn, x, z, t);
    let radicand = (h2 * m + h1) * m + h0;
    Ok(radicand.max(0.0).sqrt() / (8.0 * PI * m * scn.sigma0 * c.sigma_t.powi(3)) * c.envelope)
}

pub fn current_moduli(scn: &SpinScenario, x: f64, z: f64, t: f64) -> Result<CurrentModulusSample> {
    Ok(CurrentModulusSample {
        x,
        z,
        t,
        j_sch_modulus: schrodinger_current_modulus(scn, x, z, t)?,
        j_spin_modulus: spin_current_modulus(scn, x, z, t)?,
    })
}

const INNER_REL_TOL: f64 = 1e-11;
const OUTER_REL_TOL: f64 = 1e-10;
// The modulus difference is resolved to this fraction of the Schrodinger flux,
// well below the difference itself at every mass of interest.
const DIFFERENCE_FLOOR: f64 = 1e-15;
const ABS_FLOOR: f64 = 1e-30;

fn target(rel: f64, value: f64) -> f64 {
    ABS_FLOOR.max(rel * value.abs())
}

/// `int dx [|j_Sch|, |j|, |j_Sch| - |j|]` over the line `z`, in units of `sigma_t`.
fn line_integrals(
    scn: &SpinScenario,
    z: f64,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<[f64; 3]> {
    let f = Factors::new(scn, t)?;
    let sigma_t = evolved_width(scn.sigma0, scn.mass, t);
    // fold x -> -x so that the odd part of the spin correction cancels pointwise
    let integrand = |y: f64| {
        let (p, q) = (f.vectors(y * sigma_t, z), f.vectors(-y * sigma_t, z));
        [
            norm3(&p.schrodinger) + norm3(&q.schrodinger),
            norm3(&p.total()) + norm3(&q.total()),
            p.modulus_difference() + q.modulus_difference(),
        ]
    };
    let mut points = vec![0.0, X_EXTENT_WIDTHS];
    let kink = (2.0 * scn.k0 * scn.sigma0 * scn.sigma0 / sigma_t).abs();
    if kink > 0.0 && kink < X_EXTENT_WIDTHS {
        points.insert(1, kink);
    }
    let rel = policy.rel_tol.min(INNER_REL_TOL);
    let est = integrate_adaptive_vec_with(integrand, &points, policy.max_subdivisions, |v| {
        [
            target(rel, v[0]),
            target(rel, v[1]),
            target(rel, v[2]).max(DIFFERENCE_FLOOR * v[0].abs()),
        ]
    })?;
    Ok(est.values.map(|v| v * sigma_t))
}

/// Moments of both x-integrated distributions from a single time quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinComparison {
    pub mass: f64,
    pub tau_sch: f64,
    pub tau_spin: f64,
    /// `tau_Sch - tau(s_hat)` from the difference integrand.
    pub delta: f64,
    pub norm_sch: f64,
    pub norm_spin: f64,
    pub cutoff_time: f64,
}

fn time_unit(scn: &SpinScenario, detector_z: f64) -> f64 {
    scn.classical_crossing_time(detector_z)
        .unwrap_or_else(|| crate::model::reference_time(scn.mass, scn.sigma0))
}

pub fn spin_comparison(
    scn: &SpinScenario,
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<SpinComparison> {
    scn.validate()?;
    policy.validate()?;
    let unit = time_unit(scn, detector_z);
    let rel = policy.rel_tol.min(OUTER_REL_TOL);
    let est = integrate_semi_infinite_with(
        |u| match line_integrals(scn, detector_z, u * unit, policy) {
            Ok([a, b, d]) => [a * unit, u * a * unit, d * unit, u * d * unit, b * unit],
            Err(_) => [f64::NAN; 5],
        },
        |_| 1.0,
        policy.initial_cutoff_factor,
        TailRule::Extend,
        policy,
        |v| {
            [
                target(rel, v[0]),
                target(rel, v[1]),
                target(rel, v[2]).max(DIFFERENCE_FLOOR * v[0].abs()),
                target(rel, v[3]).max(DIFFERENCE_FLOOR * v[1].abs()),
                target(rel, v[4]),
            ]
        },
    )?;
    let [n_sch, m_sch, n_diff, m_diff, n_spin] = est.values;
    if !(n_sch >= crate::arrival::MIN_NORM_INTEGRAL)
        || !(n_spin >= crate::arrival::MIN_NORM_INTEGRAL)
    {
        return Err(Error::NoArrival {
            norm_integral: n_sch.min(n_spin),
        });
    }
    let tau_sch = m_sch / n_sch;
    let norm_spin = n_sch - n_diff;
    let delta = (m_diff - tau_sch * n_diff) / norm_spin;
    Ok(SpinComparison {
        mass: scn.mass,
        tau_sch: tau_sch * unit,
        tau_spin: (tau_sch - delta) * unit,
        delta: delta * unit,
        norm_sch: n_sch,
        norm_spin,
        cutoff_time: est.cutoff * unit,
    })
}

/// x-integrated arrival distribution with or without the spin term.
pub fn spin_arrival_distribution(
    scn: &SpinScenario,
    detector_z: f64,
    include_spin: bool,
    policy: &QuadraturePolicy,
) -> Result<ArrivalResult> {
    scn.validate()?;
    policy.validate()?;
    let unit = time_unit(scn, detector_z);
    let idx = if include_spin { 1 } else { 0 };
    let line = |u: f64| {
        line_integrals(scn, detector_z, u * unit, policy)
            .map(|v| v[idx])
            .unwrap_or(f64::NAN)
    };
    let rel = policy.rel_tol.min(OUTER_REL_TOL);
    let est = integrate_semi_infinite_with(
        |u| {
            let p = line(u) * unit;
            [p, u * p]
        },
        |_| 1.0,
        policy.initial_cutoff_factor,
        TailRule::Extend,
        policy,
        |v| v.map(|x| target(rel, x)),
    )?;
    let [norm, first] = est.values;
    if !(norm >= crate::arrival::MIN_NORM_INTEGRAL) {
        return Err(Error::NoArrival {
            norm_integral: norm,
        });
    }
    let [e0, e1] = est.errors;
    let [r0, r1] = est.last_tail_ratio;
    let error = (e1 + r1 * first.abs()) / norm + first.abs() * (e0 + r0 * norm) / (norm * norm);
    let mut nodes: Vec<f64> = est
        .intervals
        .iter()
        .flat_map(|&(a, b)| (0..=8).map(move |i| a + (b - a) * i as f64 / 8.0))
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    Ok(ArrivalResult {
        detector_z,
        times: nodes.iter().map(|u| u * unit).collect(),
        pi_values: nodes.iter().map(|&u| line(u) / norm).collect(),
        norm_integral: norm,
        mean_time: first / norm * unit,
        cutoff_time: est.cutoff * unit,
        quadrature_error_estimate: error,
        time_unit: unit,
        current_zeros: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinSweepRow {
    pub mass: f64,
    pub result: Result<SpinComparison>,
}

/// [`spin_comparison`] for each mass, in input order.
pub fn spin_mass_sweep(
    template: &SpinScenario,
    masses: &[f64],
    detector_z: f64,
    policy: &QuadraturePolicy,
) -> Result<Vec<SpinSweepRow>> {
    template.validate()?;
    if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::InvalidParameter {
            field: "masses",
            reason: "masses must be finite and > 0".into(),
        });
    }
    Ok(masses
        .par_iter()
        .map(|&mass| SpinSweepRow {
            mass,
            result: spin_comparison(&template.with_mass(mass), detector_z, policy),
        })
        .collect())
}
