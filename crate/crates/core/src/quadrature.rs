//! Adaptive 1D quadrature with error estimates.
//!
//! The rule is the 21-point Gauss-Kronrod pair with QUADPACK-style error
//! scaling, applied by global bisection of the interval with the largest
//! error. Integrands may be vector valued (`[f64; N]`) so that e.g. a
//! normalization and a first moment share one set of nodes.
//!
//! `|f|` has a kink wherever `f` changes sign; [`locate_sign_changes`] finds
//! those points so they can be used as initial breakpoints. Integrals over
//! `[0, inf)` are truncated by [`integrate_semi_infinite`].

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_453,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// How the upper limit of a semi-infinite time integral is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffRule {
    /// Scenario default: a fixed cutoff for free evolution, extension for free fall.
    Auto,
    /// Double the cutoff until the tail is negligible.
    Adaptive,
    /// Fixed cutoff, in multiples of the configuration's reference time.
    FixedReferenceTimes(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePolicy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Multiplies the classical crossing estimate to give the first cutoff.
    pub initial_cutoff_factor: f64,
    /// Extension stops once the last tail segment is below this fraction of the total.
    pub tail_fraction: f64,
    pub scan_points: usize,
    pub max_cutoff_extensions: usize,
    pub cutoff: CutoffRule,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 4000,
            initial_cutoff_factor: 4.0,
            tail_fraction: 1e-8,
            scan_points: 256,
            max_cutoff_extensions: 40,
            cutoff: CutoffRule::Auto,
        }
    }
}

impl QuadraturePolicy {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad("tolerance", "abs_tol and rel_tol must be > 0");
        }
        if self.max_subdivisions < 16 {
            return bad("max_subdivisions", "must be at least 16");
        }
        if !(self.initial_cutoff_factor > 0.0) || !(self.tail_fraction > 0.0) {
            return bad(
                "cutoff",
                "initial_cutoff_factor and tail_fraction must be > 0",
            );
        }
        if self.scan_points < 32 {
            return bad("scan_points", "must be at least 32");
        }
        if let CutoffRule::FixedReferenceTimes(n) = self.cutoff {
            if !(n > 0.0 && n.is_finite()) {
                return bad("cutoff", "fixed cutoff must be a positive multiple");
            }
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_cutoff(mut self, cutoff: CutoffRule) -> Self {
        self.cutoff = cutoff;
        self
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Scalar result of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

/// Vector result; `intervals` is the final partition, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct VecEstimate<const N: usize> {
    pub values: [f64; N],
    pub errors: [f64; N],
    pub intervals: Vec<(f64, f64)>,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// One Gauss-Kronrod 21 application on `[a, b]`.
fn gk21<const N: usize, F>(f: &F, a: f64, b: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let mut res_abs = [0.0; N];
    let mut samples = [([0.0; N], [0.0; N]); 10];
    for i in 0..N {
        kronrod[i] = WGK[10] * fc[i];
        res_abs[i] = (WGK[10] * fc[i]).abs();
    }
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        for i in 0..N {
            kronrod[i] += WGK[j] * (lo[i] + hi[i]);
            res_abs[i] += WGK[j] * (lo[i].abs() + hi[i].abs());
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * (lo[i] + hi[i]);
            }
        }
        *sample = (lo, hi);
    }
    let mut values = [0.0; N];
    let mut errors = [0.0; N];
    for i in 0..N {
        let mean = 0.5 * kronrod[i];
        let mut res_asc = WGK[10] * (fc[i] - mean).abs();
        for (j, (lo, hi)) in samples.iter().enumerate() {
            res_asc += WGK[j] * ((lo[i] - mean).abs() + (hi[i] - mean).abs());
        }
        values[i] = kronrod[i] * half;
        errors[i] = rescale_error(
            (kronrod[i] - gauss[i]) * half,
            res_abs[i] * half.abs(),
            res_asc * half.abs(),
        );
    }
    (values, errors)
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    values: [f64; N],
    errors: [f64; N],
}

/// Globally adaptive integration of a vector integrand over the partition
/// given by `breakpoints` (sorted, at least two points).
pub fn integrate_adaptive_vec<const N: usize, F>(
    f: F,
    breakpoints: &[f64],
    policy: &QuadraturePolicy,
) -> Result<VecEstimate<N>>
where
    F: Fn(f64) -> [f64; N],
{
    integrate_adaptive_vec_with(f, breakpoints, policy.max_subdivisions, |v: &[f64; N]| {
        v.map(|x| policy.tolerance(x))
    })
}

/// As [`integrate_adaptive_vec`], with the per-component error target
/// computed from the running totals by `tolerance`.
pub fn integrate_adaptive_vec_with<const N: usize, F, T>(
    f: F,
    breakpoints: &[f64],
    max_subdivisions: usize,
    tolerance: T,
) -> Result<VecEstimate<N>>
where
    F: Fn(f64) -> [f64; N],
    T: Fn(&[f64; N]) -> [f64; N],
{
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter {
            field: "interval",
            reason: format!("breakpoints must be strictly increasing, got {breakpoints:?}"),
        });
    }
    let mut pieces: Vec<Piece<N>> = breakpoints
        .windows(2)
        .map(|w| {
            let (values, errors) = gk21(&f, w[0], w[1]);
            Piece {
                a: w[0],
                b: w[1],
                values,
                errors,
            }
        })
        .collect();

    let totals = |pieces: &[Piece<N>]| {
        let mut v = [0.0; N];
        let mut e = [0.0; N];
        for p in pieces {
            for i in 0..N {
                v[i] += p.values[i];
                e[i] += p.errors[i];
            }
        }
        (v, e)
    };

    loop {
        let (values, errors) = totals(&pieces);
        if values.iter().chain(&errors).any(|v| !v.is_finite()) {
            return Err(convergence_failure(&values, &errors, pieces.len()));
        }
        let tols = tolerance(&values);
        if (0..N).all(|i| errors[i] <= tols[i]) {
            let mut intervals: Vec<(f64, f64)> = pieces.iter().map(|p| (p.a, p.b)).collect();
            intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
            return Ok(VecEstimate {
                values,
                errors,
                intervals,
            });
        }
        if pieces.len() >= max_subdivisions {
            return Err(convergence_failure(&values, &errors, pieces.len()));
        }
        // bisect the piece contributing most to the normalized error
        let mut worst = None;
        let mut worst_score = 0.0;
        for (idx, p) in pieces.iter().enumerate() {
            let mid = 0.5 * (p.a + p.b);
            if !(p.a < mid && mid < p.b) {
                continue;
            }
            let score: f64 = (0..N).map(|i| p.errors[i] / tols[i]).sum();
            if score > worst_score {
                worst_score = score;
                worst = Some(idx);
            }
        }
        let Some(idx) = worst else {
            return Err(convergence_failure(&values, &errors, pieces.len()));
        };
        let p = pieces.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let (values, errors) = gk21(&f, a, b);
            pieces.push(Piece {
                a,
                b,
                values,
                errors,
            });
        }
    }
}

fn convergence_failure<const N: usize>(
    values: &[f64; N],
    errors: &[f64; N],
    subdivisions: usize,
) -> Error {
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Error::ConvergenceFailure {
        best_estimate: values.to_vec(),
        error_estimate: worst,
        subdivisions,
    }
}

/// `int_a^b f` with an error estimate.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, policy: &QuadraturePolicy) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let est = integrate_adaptive_vec(|x| [f(x)], &[a, b], policy)?;
    Ok(Estimate {
        value: est.values[0],
        error_estimate: est.errors[0],
        subdivisions: est.intervals.len(),
    })
}

/// Points in `(a, b)` where `f` changes sign, found by scanning
/// `scan_points` uniform samples and bisecting each bracket to
/// `1e-12 (b - a)`.
pub fn locate_sign_changes<F>(f: F, a: f64, b: f64, scan_points: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let n = scan_points.max(32);
    let h = (b - a) / n as f64;
    let tol = 1e-12 * (b - a);
    let mut roots = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for i in 0..=n {
        let x = if i == n { b } else { a + i as f64 * h };
        let fx = f(x);
        if fx == 0.0 || !fx.is_finite() {
            continue;
        }
        if let Some((xl, fl)) = last {
            if fl.signum() != fx.signum() {
                roots.push(bisect(&f, xl, fl, x, tol));
            }
        }
        last = Some((x, fx));
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, f_lo: f64, mut hi: f64, tol: f64) -> f64 {
    let s_lo = f_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn with_roots(a: f64, b: f64, roots: &[f64]) -> Vec<f64> {
    let mut points = Vec::with_capacity(roots.len() + 2);
    points.push(a);
    for &r in roots {
        if r > *points.last().unwrap() && r < b {
            points.push(r);
        }
    }
    points.push(b);
    points
}

/// `int_a^b |f|`, splitting at the sign changes of `f`.
pub fn integrate_abs<F>(f: F, a: f64, b: f64, policy: &QuadraturePolicy) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let roots = locate_sign_changes(&f, a, b, policy.scan_points);
    let points = with_roots(a, b, &roots);
    let est = integrate_adaptive_vec(|x| [f(x).abs()], &points, policy)?;
    Ok(Estimate {
        value: est.values[0],
        error_estimate: est.errors[0],
        subdivisions: est.intervals.len(),
    })
}

/// How [`integrate_semi_infinite`] treats the initial cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Integrate exactly to the given cutoff.
    Fixed,
    /// Keep appending `[T, 2T]` until the tail is negligible.
    Extend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiInfiniteEstimate<const N: usize> {
    pub values: [f64; N],
    pub errors: [f64; N],
    pub cutoff: f64,
    pub intervals: Vec<(f64, f64)>,
    /// Sign changes of the probe, used as breakpoints.
    pub kinks: Vec<f64>,
    /// Per-component ratio of the last tail segment to the total (zero for a fixed cutoff).
    pub last_tail_ratio: [f64; N],
}

/// `int_0^inf f` truncated at a cutoff. Each segment is split at the sign
/// changes of `sign_probe`. With [`TailRule::Extend`] the cutoff doubles until
/// every component of the last segment is below `tail_fraction` of its
/// running total (or below the error target).
pub fn integrate_semi_infinite<const N: usize, F, S>(
    f: F,
    sign_probe: S,
    initial_cutoff: f64,
    rule: TailRule,
    policy: &QuadraturePolicy,
) -> Result<SemiInfiniteEstimate<N>>
where
    F: Fn(f64) -> [f64; N],
    S: Fn(f64) -> f64,
{
    integrate_semi_infinite_with(
        f,
        sign_probe,
        initial_cutoff,
        rule,
        policy,
        |v: &[f64; N]| v.map(|x| policy.tolerance(x)),
    )
}

/// As [`integrate_semi_infinite`] with a custom per-component error target.
pub fn integrate_semi_infinite_with<const N: usize, F, S, T>(
    f: F,
    sign_probe: S,
    initial_cutoff: f64,
    rule: TailRule,
    policy: &QuadraturePolicy,
    tolerance: T,
) -> Result<SemiInfiniteEstimate<N>>
where
    F: Fn(f64) -> [f64; N],
    S: Fn(f64) -> f64,
    T: Fn(&[f64; N]) -> [f64; N],
{
    policy.validate()?;
    if !(initial_cutoff > 0.0 && initial_cutoff.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "cutoff",
            reason: format!("initial cutoff must be positive, got {initial_cutoff}"),
        });
    }
    let mut values = [0.0; N];
    let mut errors = [0.0; N];
    let mut intervals = Vec::new();
    let mut kinks = Vec::new();
    let mut lo = 0.0;
    let mut hi = initial_cutoff;
    let mut extensions = 0;
    loop {
        let roots = locate_sign_changes(&sign_probe, lo, hi, policy.scan_points);
        let points = with_roots(lo, hi, &roots);
        let seg = integrate_adaptive_vec_with(&f, &points, policy.max_subdivisions, &tolerance)?;
        for i in 0..N {
            values[i] += seg.values[i];
            errors[i] += seg.errors[i];
        }
        intervals.extend(seg.intervals);
        kinks.extend(roots);
        if rule == TailRule::Fixed {
            return Ok(SemiInfiniteEstimate {
                values,
                errors,
                cutoff: hi,
                intervals,
                kinks,
                last_tail_ratio: [0.0; N],
            });
        }
        if lo > 0.0 {
            let ratio: [f64; N] = std::array::from_fn(|i| {
                if values[i] == 0.0 {
                    0.0
                } else {
                    (seg.values[i] / values[i]).abs()
                }
            });
            let tols = tolerance(&values);
            let negligible =
                (0..N).all(|i| ratio[i] <= policy.tail_fraction || seg.values[i].abs() <= tols[i]);
            if negligible {
                return Ok(SemiInfiniteEstimate {
                    values,
                    errors,
                    cutoff: hi,
                    intervals,
                    kinks,
                    last_tail_ratio: ratio,
                });
            }
        }
        extensions += 1;
        if extensions > policy.max_cutoff_extensions {
            return Err(Error::CutoffNotConverged { cutoff: hi });
        }
        lo = hi;
        hi *= 2.0;
    }
}
