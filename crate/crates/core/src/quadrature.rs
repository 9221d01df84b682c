//! Adaptive Gauss–Kronrod quadrature (21-point Kronrod / 10-point Gauss pair)
//! with global bisection of the panel carrying the largest error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
    0.123_491_976_262_065_851_077_208_980_628_070,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Stopping rule: the summed error estimate must fall below
/// `max(abs, rel * |integral|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4000;

    pub fn absolute(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_subdivisions: Self::DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel = rel;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    /// Same rule with the absolute part scaled by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Tolerance {
            abs: self.abs * factor,
            ..self
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };

    fn combine(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            error: self.error + o.error,
            evaluations: self.evaluations + o.evaluations,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Rounding floor of the error estimate.
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        // ties broken on position so the refinement order is reproducible
        self.error.total_cmp(&o.error).then_with(|| o.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 21-point Kronrod panel with the embedded Gauss error estimate.
fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: "integrand".into(),
                at: x,
            })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let ah = half.abs();
    let floor = 50.0 * f64::EPSILON * res_abs * ah;
    Ok((res_k * half, rescale_error(err, res_abs * ah, res_asc * ah), floor))
}

/// Integrate a fallible integrand over `[a, b]`.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("integration bounds [{a}, {b}] not finite")));
    }
    if !(tol.abs >= 0.0 && tol.rel >= 0.0) || (tol.abs == 0.0 && tol.rel == 0.0) {
        return Err(Error::invalid("quadrature tolerance must be positive"));
    }
    if a == b {
        return Ok(Estimate::ZERO);
    }
    if a > b {
        let e = try_integrate(f, b, a, tol)?;
        return Ok(Estimate { value: -e.value, ..e });
    }

    let (v0, e0, r0) = gk21(&mut f, a, b)?;
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    // panels too narrow to bisect in floating point
    let mut frozen: Vec<Panel> = Vec::new();
    heap.push(Panel {
        a,
        b,
        value: v0,
        error: e0,
        floor: r0,
    });
    let mut total = v0;
    let mut total_err = e0;
    let mut total_floor = r0;
    let mut splits = 0usize;

    loop {
        // an error estimate sitting on the rounding floor cannot be improved
        if total_err <= tol.target(total).max(2.0 * total_floor) {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if width <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
            || mid <= worst.a
            || mid >= worst.b
        {
            frozen.push(worst);
            continue;
        }
        if splits >= tol.max_subdivisions {
            heap.push(worst);
            break;
        }
        let (vl, el, rl) = gk21(&mut f, worst.a, mid).map_err(|e| e.within("quadrature"))?;
        let (vr, er, rr) = gk21(&mut f, mid, worst.b).map_err(|e| e.within("quadrature"))?;
        evaluations += 42;
        splits += 1;
        total += vl + vr - worst.value;
        total_err += el + er - worst.error;
        total_floor += rl + rr - worst.floor;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: vl,
            error: el,
            floor: rl,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: vr,
            error: er,
            floor: rr,
        });
        if splits.is_multiple_of(64) {
            total = heap.iter().chain(frozen.iter()).map(|p| p.value).sum();
            total_err = heap.iter().chain(frozen.iter()).map(|p| p.error).sum();
            total_floor = heap.iter().chain(frozen.iter()).map(|p| p.floor).sum();
        }
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    let floor: f64 = panels.iter().map(|p| p.floor).sum();
    if error > tol.target(value).max(2.0 * floor) {
        return Err(Error::Convergence {
            context: format!("adaptive quadrature on [{a}, {b}]"),
            estimate: value,
            error,
            requested: tol.target(value),
        });
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Integrate an infallible integrand over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, tol)
}

/// Integrate over consecutive intervals `points[i]..points[i+1]`, sharing the
/// absolute tolerance in proportion to interval width. Kinks and jumps of the
/// integrand should be listed as breakpoints.
pub fn try_integrate_breakpoints<F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points.len() < 2 {
        return Err(Error::invalid("need at least two breakpoints"));
    }
    let span = (points[points.len() - 1] - points[0]).abs();
    let mut acc = Estimate::ZERO;
    for w in points.windows(2) {
        let frac = if span > 0.0 { (w[1] - w[0]).abs() / span } else { 1.0 };
        if frac == 0.0 {
            continue;
        }
        acc = acc.combine(try_integrate(&mut f, w[0], w[1], tol.scaled(frac))?);
    }
    Ok(acc)
}

/// Composite trapezoid rule over one period with `n` nodes; spectrally accurate
/// for smooth periodic integrands.
pub fn periodic_trapezoid<F>(mut f: F, a: f64, period: f64, n: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    let h = period / n as f64;
    (0..n).map(|k| f(a + k as f64 * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_are_normalized() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polynomials_are_exact() {
        let e = integrate(
            |x| 7.0 * x.powi(6) - 3.0 * x * x + 1.0,
            -1.0,
            2.0,
            Tolerance::absolute(1e-13),
        )
        .unwrap();
        // x^7 - x^3 + x from -1 to 2
        let exact = (128.0 - 8.0 + 2.0) - (-1.0 + 1.0 - 1.0);
        assert!((e.value - exact).abs() < 1e-12);
        assert_eq!(e.evaluations, 21);
    }

    #[test]
    fn oscillatory_and_reversed() {
        let e = integrate(f64::sin, 0.0, 20.0 * PI, Tolerance::absolute(1e-12)).unwrap();
        assert!(e.value.abs() < 1e-12);
        let r = integrate(|x| x.exp(), 1.0, 0.0, Tolerance::absolute(1e-13)).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // integral of ln x on (0, 1] is -1
        let e = integrate(f64::ln, 0.0, 1.0, Tolerance::absolute(1e-10)).unwrap();
        assert!((e.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn jump_needs_no_breakpoint_but_converges() {
        let e = integrate(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, Tolerance::absolute(1e-9)).unwrap();
        assert!((e.value - 0.3).abs() < 1e-9);
    }

    #[test]
    fn non_finite_integrand_reports_location() {
        let err = integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, Tolerance::absolute(1e-8));
        match err {
            Err(Error::NonFinite { at, .. }) => assert_eq!(at, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_returns_best_estimate() {
        let tol = Tolerance::absolute(1e-14).with_max_subdivisions(3);
        match integrate(|x| x.abs().sqrt().recip(), 0.0, 1.0, tol) {
            Err(Error::Convergence { estimate, error, .. }) => {
                assert!(estimate > 1.0 && estimate < 2.0);
                assert!(error > 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn breakpoints_and_trapezoid() {
        let e = try_integrate_breakpoints(|x| Ok(x.abs()), &[-1.0, 0.0, 2.0], Tolerance::absolute(1e-12)).unwrap();
        assert!((e.value - 2.5).abs() < 1e-13);
        let t = periodic_trapezoid(|t| (t.cos()).powi(2), 0.0, 2.0 * PI, 16);
        assert!((t - PI).abs() < 1e-14);
    }
}
