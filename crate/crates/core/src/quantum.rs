//! Bessel functions of real nonnegative order and the flux-shifted angular
//! eigenmodes `J_{|α|}(kr) e^{i m φ − i k² t / 2M} / √(2π)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate, try_integrate_breakpoints, Tolerance};
use crate::sources::{far_field_asymptote, finite_b_z, geometric_breaks, HalfLength, SolenoidSpec};

const SERIES_LIMIT: f64 = 10.0;
const HANKEL_MIN: f64 = 25.0;

fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let log_first = nu * half.ln() - libm::lgamma(nu + 1.0);
    if log_first < -745.0 {
        return 0.0;
    }
    let mut term = log_first.exp();
    let q = -half * half;
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel's large-argument expansion, summed until the terms stop shrinking.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() >= last || term == 0.0 {
            break;
        }
        last = term.abs();
        // signs run (+Q, −P, −Q, +P, …)
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `(1/π)∫₀^π cos(νθ − x sin θ) dθ − (sin νπ/π)∫₀^∞ e^{−x sinh t − νt} dt`.
fn integral(nu: f64, x: f64, tol: f64) -> Result<f64> {
    let oscillations = ((x + nu) / PI).ceil().max(1.0) as usize;
    let pts: Vec<f64> = (0..=oscillations)
        .map(|i| PI * i as f64 / oscillations as f64)
        .collect();
    let t = Tolerance::absolute(0.5 * tol * PI).with_max_subdivisions(20_000);
    let first = try_integrate_breakpoints(|th| Ok((nu * th - x * th.sin()).cos()), &pts, t)?.value / PI;
    let s = (nu * PI).sin();
    if s == 0.0 {
        return Ok(first);
    }
    // integrand below e^{-40} beyond t_max
    let t_max = (40.0 / x).asinh().min(if nu > 0.0 { 40.0 / nu } else { f64::INFINITY });
    let second = try_integrate(
        |t| Ok((-x * t.sinh() - nu * t).exp()),
        0.0,
        t_max,
        Tolerance::absolute(0.5 * tol * PI),
    )?
    .value;
    Ok(first - s / PI * second)
}

/// `J_ν(x)` for `ν >= 0`, `x >= 0`, with absolute error at most `tol`.
pub fn bessel_j(nu: f64, x: f64, tol: f64) -> Result<f64> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::invalid(format!(
            "Bessel order {nu} must be finite and nonnegative"
        )));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!(
            "Bessel argument {x} must be finite and nonnegative"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("Bessel tolerance must be positive"));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let v = if x <= SERIES_LIMIT {
        series(nu, x)
    } else if x > HANKEL_MIN && x > nu * nu {
        hankel(nu, x)
    } else {
        integral(nu, x, tol).map_err(|e| e.within(&format!("J_{nu}({x})")))?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            context: format!("J_{nu}"),
            at: x,
        })
    }
}

/// `α = m + e ∫_r^∞ B_z(r', z) r' dr'` for a finite solenoid. The integral is
/// taken numerically out to `max(1000·max(R, L), 10 r)` and the rest from the
/// `r⁻³` far field.
pub fn alpha_exponent(m: i64, r: f64, z: f64, spec: &SolenoidSpec, e: f64, tol: f64) -> Result<f64> {
    let HalfLength::Finite(l) = spec.half_length else {
        return Err(Error::invalid("the alpha exponent needs a finite solenoid"));
    };
    let (_, far_bz) = far_field_asymptote(spec, 1.0)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius {r} must be positive")));
    }
    let r_cut = (1000.0 * spec.radius.max(l)).max(10.0 * r);
    let mut pts = vec![r];
    let mut cuts = geometric_breaks(spec.radius.max(r), r_cut);
    if spec.radius > r {
        cuts.insert(0, spec.radius);
    }
    pts.extend(cuts.into_iter().filter(|&p| p > r));
    pts.dedup();
    let inner = 0.01 * tol / r_cut;
    let body = try_integrate_breakpoints(
        |rp| Ok(rp * finite_b_z(spec, rp, z, inner)?),
        &pts,
        Tolerance::absolute(0.5 * tol),
    )
    .map_err(|e| e.within("alpha exponent"))?;
    // ∫_{r_cut}^∞ (−½ B₀ R² L / r'³) r' dr' with far_bz = −½ B₀ R² L
    let tail = far_bz / r_cut;
    Ok(m as f64 + e * (body.value + tail))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    pub m: i64,
    pub k: f64,
    pub mass: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl EigenMode {
    /// Mode of the ideal infinite solenoid, `α = m − β`.
    pub fn new(m: i64, k: f64, mass: f64, beta: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite() && mass > 0.0 && mass.is_finite() && beta.is_finite()) {
            return Err(Error::invalid("eigenmode needs k > 0, M > 0 and finite beta"));
        }
        Ok(EigenMode {
            m,
            k,
            mass,
            beta,
            alpha: m as f64 - beta,
        })
    }

    /// Bessel order used for the radial factor.
    pub fn order(&self) -> f64 {
        self.alpha.abs()
    }

    /// Time after which the mode's phase repeats, `4πM/k²`.
    pub fn period(&self) -> f64 {
        4.0 * PI * self.mass / (self.k * self.k)
    }
}

pub fn eigenmode_value(mode: &EigenMode, r: f64, phi: f64, t: f64, tol: f64) -> Result<Complex64> {
    if !(r >= 0.0 && r.is_finite() && phi.is_finite() && t.is_finite()) {
        return Err(Error::invalid("eigenmode needs finite r >= 0, φ and t"));
    }
    let radial = bessel_j(mode.order(), mode.k * r, tol)?;
    let phase = mode.m as f64 * phi - mode.k * mode.k / (2.0 * mode.mass) * t;
    Ok(Complex64::from_polar(radial / (2.0 * PI).sqrt(), phase))
}

/// Sorted Bessel orders `|m − β|` for the given `m`.
pub fn order_set(beta: f64, ms: impl IntoIterator<Item = i64>) -> Vec<f64> {
    let mut v: Vec<f64> = ms.into_iter().map(|m| (m as f64 - beta).abs()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// For integer `β`, the orders over `m ∈ [β − n, β + n]` coincide exactly with
/// the field-free orders over `m ∈ [−n, n]`. Returns `None` when `β` is not an
/// integer.
pub fn integer_flux_degeneracy(beta: f64, n: i64) -> Option<bool> {
    if beta.fract() != 0.0 || !beta.is_finite() {
        return None;
    }
    let b = beta as i64;
    Some(order_set(beta, (b - n)..=(b + n)) == order_set(0.0, -n..=n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j_half(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * x.sin()
    }

    fn j_three_halves(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos())
    }

    #[test]
    fn small_cases() {
        assert_eq!(bessel_j(0.0, 0.0, 1e-12).unwrap(), 1.0);
        assert_eq!(bessel_j(2.5, 0.0, 1e-12).unwrap(), 0.0);
        assert!((bessel_j(0.5, PI / 2.0, 1e-12).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!(bessel_j(-1.0, 1.0, 1e-12).is_err());
        assert!(bessel_j(1.0, -1.0, 1e-12).is_err());
    }

    #[test]
    fn three_halves_at_two() {
        // mpmath besselj(1.5, 2) at 30 digits
        let want = 0.491_293_778_687_162_3;
        assert!((bessel_j(1.5, 2.0, 1e-13).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn half_integer_forms_across_regimes() {
        for x in [0.3, 4.0, 9.9, 10.5, 17.0, 24.0, 30.0, 80.0] {
            let a = bessel_j(0.5, x, 1e-12).unwrap();
            let b = bessel_j(1.5, x, 1e-12).unwrap();
            assert!((a - j_half(x)).abs() < 1e-11, "J_1/2({x})");
            assert!((b - j_three_halves(x)).abs() < 1e-11, "J_3/2({x})");
        }
    }

    #[test]
    fn integer_orders_against_known_values() {
        // mpmath at 30 digits
        assert!((bessel_j(0.0, 20.0, 1e-12).unwrap() - 0.167_024_664_340_583_15).abs() < 1e-12);
        assert!((bessel_j(1.0, 20.0, 1e-12).unwrap() - 0.066_833_124_175_850_05).abs() < 1e-12);
        assert!((bessel_j(5.0, 12.0, 1e-12).unwrap() + 0.073_470_963_101_658_58).abs() < 1e-12);
    }

    #[test]
    fn first_zero_of_j0() {
        let z = 2.404_825_557_695_773;
        assert!(bessel_j(0.0, z, 1e-12).unwrap().abs() < 1e-14);
    }

    #[test]
    fn tiny_values_underflow_to_zero() {
        assert_eq!(bessel_j(400.0, 1e-3, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn mode_modulus_and_period() {
        let m = EigenMode::new(1, 1.3, 2.0, -0.5).unwrap();
        assert_eq!(m.order(), 1.5);
        let a = eigenmode_value(&m, 0.7, 0.0, 0.0, 1e-12).unwrap();
        let b = eigenmode_value(&m, 0.7, 2.0, 3.0, 1e-12).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-15);
        let c = eigenmode_value(&m, 0.7, 2.0, 3.0 + m.period(), 1e-12).unwrap();
        assert!((b - c).norm() < 1e-12);
    }

    #[test]
    fn degeneracy() {
        assert_eq!(integer_flux_degeneracy(2.0, 6), Some(true));
        assert_eq!(integer_flux_degeneracy(-3.0, 4), Some(true));
        assert_eq!(integer_flux_degeneracy(0.5, 4), None);
        assert_ne!(order_set(0.5, -3..=3), order_set(0.0, -3..=3));
    }

    #[test]
    fn alpha_without_field() {
        let s = SolenoidSpec::finite(1.0, 0.0, 5.0).unwrap();
        assert_eq!(alpha_exponent(3, 2.0, 0.0, &s, -1.0, 1e-8).unwrap(), 3.0);
    }
}
