//! Globally adaptive Gauss-Kronrod (10/21) quadrature over a set of
//! breakpoints, with a shared subdivision budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_532_341,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig<T> {
    /// Absolute error the refinement aims for.
    pub abs_tol: T,
    /// Relative error at which refinement also stops.
    pub rel_tol: T,
    /// Largest error estimate a caller should accept.
    pub accept_tol: T,
    /// Upper bound on the number of live subintervals.
    pub max_subdivisions: usize,
}

impl<T: Scalar> Default for QuadConfig<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            abs_tol: T::lit(1e-10).max(eps * T::lit(100.0)),
            rel_tol: T::lit(1e-12).max(eps * T::lit(50.0)),
            accept_tol: T::lit(1e-8).max(eps * T::lit(1000.0)),
            max_subdivisions: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
}

struct Piece<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
    splittable: bool,
}

impl<T: Scalar> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Piece<T> {}

impl<T: Scalar> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // unsplittable pieces sink to the bottom of the max-heap
        self.splittable
            .cmp(&other.splittable)
            .then(self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal))
    }
}

/// One 21-point Kronrod panel with the QUADPACK error rescaling.
/// Returns `(value, error, resabs)`.
fn kronrod21<T: Scalar, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> (T, T, T) {
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let abs_half_len = half_len.abs();

    let fc = f(center);
    let mut res_g = T::zero();
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half_len * T::lit(XGK[jtw]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g = res_g + T::lit(WG[j]) * (f1 + f2);
        res_k = res_k + T::lit(WGK[jtw]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[jtw]) * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half_len * T::lit(XGK[jtwm1]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k = res_k + T::lit(WGK[jtwm1]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[jtwm1]) * (f1.abs() + f2.abs());
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half_len;
    res_abs = res_abs * abs_half_len;
    res_asc = res_asc * abs_half_len;
    let mut err = ((res_k - res_g) * half_len).abs();

    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let eps50 = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / eps50 {
        err = err.max(eps50 * res_abs);
    }
    (value, err, res_abs)
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`.
///
/// Each gap between consecutive (sorted, deduplicated) breakpoints starts as
/// its own panel; the panel with the largest error is bisected until the
/// total error meets `abs_tol` or `rel_tol`, the budget is spent, or no
/// panel can be split further. The caller checks `error` against
/// `accept_tol`, or uses [`integrate_checked`].
pub fn integrate<T, F>(f: F, breakpoints: &[T], config: &QuadConfig<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mut pts: Vec<T> = breakpoints.to_vec();
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("non-finite integration breakpoint".into()));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    pts.dedup();
    if pts.len() < 2 {
        return Ok(QuadResult {
            value: T::zero(),
            error: T::zero(),
            subdivisions: 0,
        });
    }

    let min_width = |lo: T, hi: T| {
        let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
        (hi - lo) > scale * T::epsilon() * T::lit(1000.0)
    };

    let mut heap = BinaryHeap::with_capacity(pts.len().max(16));
    let mut total = T::zero();
    let mut total_err = T::zero();
    for w in pts.windows(2) {
        let (value, error, res_abs) = kronrod21(&f, w[0], w[1]);
        total = total + value;
        total_err = total_err + error;
        let floor = T::lit(50.0) * T::epsilon() * res_abs;
        heap.push(Piece {
            lo: w[0],
            hi: w[1],
            value,
            error,
            splittable: min_width(w[0], w[1]) && error > floor,
        });
    }

    let budget = config.max_subdivisions.max(heap.len());
    while total_err > config.abs_tol.max(config.rel_tol * total.abs()) && heap.len() < budget {
        let worst = match heap.pop() {
            Some(p) if p.splittable => p,
            Some(p) => {
                heap.push(p);
                break;
            }
            None => break,
        };
        let mid = T::lit(0.5) * (worst.lo + worst.hi);
        total = total - worst.value;
        total_err = total_err - worst.error;
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, error, res_abs) = kronrod21(&f, lo, hi);
            total = total + value;
            total_err = total_err + error;
            let floor = T::lit(50.0) * T::epsilon() * res_abs;
            heap.push(Piece {
                lo,
                hi,
                value,
                error,
                splittable: min_width(lo, hi) && error > floor,
            });
        }
    }

    // re-sum to shed the drift of the running totals
    let (value, error) = heap
        .iter()
        .fold((T::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.error));
    Ok(QuadResult {
        value,
        error,
        subdivisions: heap.len(),
    })
}

/// [`integrate`], failing with [`Error::Convergence`] when the final error
/// estimate exceeds `accept_tol`.
pub fn integrate_checked<T, F>(f: F, breakpoints: &[T], config: &QuadConfig<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let r = integrate(f, breakpoints, config)?;
    if r.error > config.accept_tol || !r.value.is_finite() {
        return Err(Error::Convergence {
            error_estimate: r.error.as_f64(),
            subdivisions: r.subdivisions,
        });
    }
    Ok(r)
}
