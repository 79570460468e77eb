//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! The engine keeps a heap of segments ordered by error estimate and bisects
//! the worst one until the summed error meets `abs_tol + rel_tol·|value|`.
//! Refinement order is fixed (error, then creation order) and final values are
//! summed left to right with compensation, so a given integrand and spec always
//! produce the same bits. Integrands may be vector valued (`[f64; K]`) so that
//! several moments of an expensive function share evaluations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of segments the interval may be split into.
    pub max_subdivisions: usize,
    /// Finite surrogate for +∞ in semi-infinite integrals.
    pub upper_cut: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            upper_cut: 1e5,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec(format!(
                "tolerances must be positive (abs_tol={}, rel_tol={})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.upper_cut > 0.0 && self.upper_cut.is_finite()) {
            return Err(QuadratureError::InvalidSpec(format!(
                "upper_cut must be positive and finite, got {}",
                self.upper_cut
            )));
        }
        Ok(())
    }

    pub fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol + self.rel_tol * value.abs()
    }
}

/// Result of an integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecEstimate<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("subdivision limit reached; best estimate {} ± {}", best.value, best.error)]
    MaxSubdivisions { best: Estimate },
    #[error("segment too small to bisect; best estimate {} ± {}", best.value, best.error)]
    Roundoff { best: Estimate },
    #[error("tail bound {bound:e} beyond upper cut {cut} exceeds abs_tol/10 = {limit:e}")]
    TailBound { cut: f64, bound: f64, limit: f64 },
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn check_finite<const K: usize>(x: f64, v: [f64; K]) -> Result<[f64; K], QuadratureError> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { x })
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn gk21<const K: usize, F>(f: &F, a: f64, b: f64) -> Result<([f64; K], [f64; K]), QuadratureError>
where
    F: Fn(f64) -> [f64; K],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = check_finite(center, f(center))?;
    let mut res_k = [0.0; K];
    let mut res_g = [0.0; K];
    let mut res_abs = [0.0; K];
    for k in 0..K {
        res_k[k] = WGK[10] * fc[k];
        res_abs[k] = (WGK[10] * fc[k]).abs();
        // the 10-point Gauss rule has no centre node
    }
    let mut fv1 = [[0.0; K]; 10];
    let mut fv2 = [[0.0; K]; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let f1 = check_finite(x1, f(x1))?;
        let f2 = check_finite(x2, f(x2))?;
        fv1[j] = f1;
        fv2[j] = f2;
        for k in 0..K {
            res_k[k] += WGK[j] * (f1[k] + f2[k]);
            res_abs[k] += WGK[j] * (f1[k].abs() + f2[k].abs());
            // odd Kronrod indices are the Gauss nodes
            if j % 2 == 1 {
                res_g[k] += WG[j / 2] * (f1[k] + f2[k]);
            }
        }
    }

    let mut value = [0.0; K];
    let mut error = [0.0; K];
    for k in 0..K {
        let mean = 0.5 * res_k[k];
        let mut res_asc = WGK[10] * (fc[k] - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv1[j][k] - mean).abs() + (fv2[j][k] - mean).abs());
        }
        let res_asc = res_asc * abs_half;
        let res_abs_k = res_abs[k] * abs_half;
        let mut err = ((res_k[k] - res_g[k]) * half).abs();
        if res_asc != 0.0 && err != 0.0 {
            err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
        }
        if res_abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * res_abs_k);
        }
        value[k] = res_k[k] * half;
        error[k] = err;
    }
    Ok((value, error))
}

#[derive(Debug, Clone, Copy)]
struct Segment<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: [f64; K],
    priority: f64,
    seq: u64,
}

impl<const K: usize> PartialEq for Segment<K> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const K: usize> Eq for Segment<K> {}
impl<const K: usize> PartialOrd for Segment<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const K: usize> Ord for Segment<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Totals<const K: usize> {
    value: [f64; K],
    error: [f64; K],
}

fn totals<const K: usize>(segments: &[Segment<K>]) -> Totals<K> {
    let mut value = [CompensatedSum::new(); K];
    let mut error = [CompensatedSum::new(); K];
    for s in segments {
        for k in 0..K {
            value[k].add(s.value[k]);
            error[k].add(s.error[k]);
        }
    }
    Totals {
        value: value.map(|v| v.value()),
        error: error.map(|v| v.value()),
    }
}

fn converged<const K: usize>(t: &Totals<K>, spec: &QuadratureSpec, extra: f64) -> bool {
    (0..K).all(|k| t.error[k] + extra <= spec.tolerance(t.value[k]))
}

/// Core driver over an initial partition `points` (strictly increasing).
/// `extra_error` is an externally known error (e.g. a truncated tail) that
/// counts against the tolerance.
fn adaptive_core<const K: usize, F>(
    f: &F,
    points: &[f64],
    spec: &QuadratureSpec,
    extra_error: f64,
) -> Result<VecEstimate<K>, QuadratureError>
where
    F: Fn(f64) -> [f64; K],
{
    spec.validate()?;
    if points.len() < 2 {
        return Err(QuadratureError::InvalidInterval {
            a: points.first().copied().unwrap_or(f64::NAN),
            b: f64::NAN,
        });
    }
    for w in points.windows(2) {
        if !(w[0].is_finite() && w[1].is_finite() && w[0] <= w[1]) {
            return Err(QuadratureError::InvalidInterval { a: w[0], b: w[1] });
        }
    }

    let mut seq = 0u64;
    let mut evaluations = 0usize;
    let mut segments: Vec<Segment<K>> = Vec::new();
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (value, error) = gk21(f, w[0], w[1])?;
        evaluations += 21;
        segments.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
            priority: 0.0,
            seq,
        });
        seq += 1;
    }
    if segments.is_empty() {
        return Ok(VecEstimate {
            value: [0.0; K],
            error: [0.0; K],
            subdivisions: 0,
            evaluations: 0,
        });
    }

    // Normalise component errors by a fixed scale so vector integrands are
    // refined where the worst relative error lives.
    let first = totals(&segments);
    let scale: [f64; K] = std::array::from_fn(|k| spec.tolerance(first.value[k]).max(f64::MIN_POSITIVE));
    let priority = |error: &[f64; K]| -> f64 { (0..K).map(|k| error[k] / scale[k]).fold(0.0, f64::max) };
    for s in &mut segments {
        s.priority = priority(&s.error);
    }

    let mut heap: BinaryHeap<Segment<K>> = segments.into_iter().collect();
    let finish = |heap: BinaryHeap<Segment<K>>, evaluations: usize| {
        let mut segs = heap.into_vec();
        segs.sort_by(|x, y| x.a.total_cmp(&y.a));
        let t = totals(&segs);
        VecEstimate {
            value: t.value,
            error: t.error.map(|e| e + extra_error),
            subdivisions: segs.len(),
            evaluations,
        }
    };

    loop {
        let snapshot: Vec<Segment<K>> = heap.iter().copied().collect();
        let t = totals(&snapshot);
        if converged(&t, spec, extra_error) {
            return Ok(finish(heap, evaluations));
        }
        if heap.len() >= spec.max_subdivisions {
            let est = finish(heap, evaluations);
            return Err(QuadratureError::MaxSubdivisions {
                best: scalar_view(&est),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            let est = finish(heap, evaluations);
            return Err(QuadratureError::Roundoff {
                best: scalar_view(&est),
            });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk21(f, a, b)?;
            evaluations += 21;
            heap.push(Segment {
                a,
                b,
                value,
                error,
                priority: priority(&error),
                seq,
            });
            seq += 1;
        }
    }
}

/// Collapse a vector estimate to its worst component, for error reporting.
fn scalar_view<const K: usize>(est: &VecEstimate<K>) -> Estimate {
    let k = (0..K)
        .max_by(|&i, &j| est.error[i].total_cmp(&est.error[j]))
        .unwrap_or(0);
    Estimate {
        value: est.value.get(k).copied().unwrap_or(0.0),
        error: est.error.get(k).copied().unwrap_or(0.0),
        subdivisions: est.subdivisions,
        evaluations: est.evaluations,
    }
}

fn unwrap_scalar(est: VecEstimate<1>) -> Estimate {
    Estimate {
        value: est.value[0],
        error: est.error[0],
        subdivisions: est.subdivisions,
        evaluations: est.evaluations,
    }
}

/// ∫ₐᵇ f(x) dx. Requires a ≤ b.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_panels(f, &[a, b], spec)
}

/// Same as [`integrate_adaptive`] with an initial partition at `points`.
pub fn integrate_panels<F>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    adaptive_core(&|x| [f(x)], points, spec, 0.0).map(unwrap_scalar)
}

/// Vector-valued integrand over an initial partition; every component must
/// meet the tolerance.
pub fn integrate_panels_vec<const K: usize, F>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<VecEstimate<K>, QuadratureError>
where
    F: Fn(f64) -> [f64; K],
{
    adaptive_core(&f, points, spec, 0.0)
}

/// ∫ₐ^∞ f(y) dy via y = a + t/(1−t), truncated at `spec.upper_cut`.
///
/// `tail_bound(Y)` must bound |∫_Y^∞ f|; it is required to be below
/// `abs_tol/10` at the cut and is added to the reported error.
pub fn integrate_to_infinity<F, T>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
    tail_bound: T,
) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    spec.validate()?;
    let cut = spec.upper_cut;
    if !(a.is_finite() && a < cut) {
        return Err(QuadratureError::InvalidInterval { a, b: cut });
    }
    let bound = tail_bound(cut).abs();
    let limit = spec.abs_tol / 10.0;
    if !(bound < limit) {
        return Err(QuadratureError::TailBound { cut, bound, limit });
    }
    let span = cut - a;
    let t_cut = span / (1.0 + span);
    let g = |t: f64| {
        let s = 1.0 - t;
        [f(a + t / s) / (s * s)]
    };
    let points: Vec<f64> = (0..=8).map(|i| t_cut * i as f64 / 8.0).collect();
    adaptive_core(&g, &points, spec, bound).map(unwrap_scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate_adaptive(|x| x * x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(est.subdivisions, 1);
    }

    #[test]
    fn beta_function_integrand() {
        let spec = QuadratureSpec::default();
        let est = integrate_to_infinity(
            |y| y.powi(4) / (1.0 + y * y).powi(6),
            0.0,
            &spec,
            |cut| cut.powi(-7) / 7.0,
        )
        .unwrap();
        assert!((est.value - 3.0 * PI / 512.0).abs() < 1e-9);
        assert!(est.error <= spec.tolerance(est.value));
    }

    #[test]
    fn kink_needs_subdivision() {
        let spec = QuadratureSpec::default();
        let est = integrate_adaptive(|x| (x - 0.3).abs(), 0.0, 1.0, &spec).unwrap();
        assert!((est.value - 0.29).abs() < 1e-10);
        assert!(est.subdivisions > 1, "subdivisions = {}", est.subdivisions);
        assert!((est.value - 0.29).abs() <= est.error.max(1e-15));
    }

    #[test]
    fn subdivision_limit_reports_best_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            rel_tol: 1e-14,
            abs_tol: 1e-16,
            ..Default::default()
        };
        match integrate_adaptive(|x| x.sqrt(), 0.0, 1.0, &spec) {
            Err(QuadratureError::MaxSubdivisions { best }) => {
                assert!((best.value - 2.0 / 3.0).abs() < 1e-4);
                assert_eq!(best.subdivisions, 3);
            }
            other => panic!("expected subdivision failure, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_rejected() {
        let err = integrate_adaptive(|x| 1.0 / (x - 0.5), 0.0, 1.0, &QuadratureSpec::default());
        assert!(matches!(err, Err(QuadratureError::NonFinite { .. })));
    }

    #[test]
    fn bad_spec_and_interval() {
        let bad = QuadratureSpec {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            integrate_adaptive(|x| x, 0.0, 1.0, &bad),
            Err(QuadratureError::InvalidSpec(_))
        ));
        assert!(matches!(
            integrate_adaptive(|x| x, 1.0, 0.0, &QuadratureSpec::default()),
            Err(QuadratureError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn tail_bound_must_be_small() {
        let spec = QuadratureSpec {
            upper_cut: 10.0,
            ..Default::default()
        };
        let err = integrate_to_infinity(|y| 1.0 / (1.0 + y * y), 0.0, &spec, |c| 1.0 / c);
        assert!(matches!(err, Err(QuadratureError::TailBound { .. })));
    }

    #[test]
    fn vector_integrand_matches_scalar() {
        let spec = QuadratureSpec::default();
        let v = integrate_panels_vec(|x: f64| [x.sin(), x.cos(), (-x).exp()], &[0.0, 1.0, 3.0], &spec).unwrap();
        assert!((v.value[0] - (1.0 - 3f64.cos())).abs() < 1e-13);
        assert!((v.value[1] - 3f64.sin()).abs() < 1e-13);
        assert!((v.value[2] - (1.0 - (-3f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let est = integrate_adaptive(|x| x, 2.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn repeated_runs_bit_identical() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (10.0 * x).sin() * (-x).exp();
        let a = integrate_adaptive(f, 0.0, 20.0, &spec).unwrap();
        let b = integrate_adaptive(f, 0.0, 20.0, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
