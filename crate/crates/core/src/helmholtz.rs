//! Transverse/longitudinal split of a planar vector potential. The transverse
//! part is rebuilt from the curl through the 2-D logarithmic kernel,
//!
//! ```text
//! A_⊥ = −∇ × [ψ e_z],   ψ(x) = (1/2π) ∬ B_z(x') ln(|x − x'| / r₀) d²x',
//! ```
//!
//! with the derivative taken under the integral sign. Points inside the
//! support use polar coordinates centred on the field point, which absorbs
//! the kernel singularity into the area element.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{curl_z, default_step, PlanarField, Point2, Vec2};
use crate::quadrature::{try_integrate_breakpoints, Tolerance};
use crate::sources::{GaugeField, ScalarFn};

/// A scalar field that vanishes outside `|x| <= support_radius`.
#[derive(Clone)]
pub struct CompactScalarField {
    support_radius: f64,
    eval: ScalarFn,
    kinks: Vec<f64>,
}

impl std::fmt::Debug for CompactScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompactScalarField")
            .field("support_radius", &self.support_radius)
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl CompactScalarField {
    pub fn new<F>(support_radius: f64, f: F) -> Result<Self>
    where
        F: Fn(Point2) -> f64 + Send + Sync + 'static,
    {
        Self::try_new(support_radius, Arc::new(move |x| Ok(f(x))))
    }

    pub fn try_new(support_radius: f64, eval: ScalarFn) -> Result<Self> {
        if !(support_radius > 0.0 && support_radius.is_finite()) {
            return Err(Error::NonCompact(format!("support radius {support_radius}")));
        }
        Ok(CompactScalarField {
            support_radius,
            eval,
            kinks: Vec::new(),
        })
    }

    /// Radii about the origin where the field jumps; used as quadrature
    /// breakpoints.
    pub fn with_kinks(mut self, radii: Vec<f64>) -> Self {
        self.kinks = radii;
        self
    }

    /// The curl of `a`, restricted to the support `a` declares.
    pub fn curl_of(a: &GaugeField) -> Result<Self> {
        let support = a.curl_support().ok_or_else(|| {
            Error::NonCompact(format!(
                "{} gauge field without a declared curl support",
                a.tag().name()
            ))
        })?;
        let field = a.clone();
        Ok(Self::try_new(support, Arc::new(move |x| field.curl(x)))?.with_kinks(a.kink_radii()))
    }

    /// Curl of `a` by central differences, even when a closed form is known.
    /// The support is widened by the stencil reach.
    pub fn numeric_curl_of(a: &GaugeField) -> Result<Self> {
        let support = a.curl_support().ok_or_else(|| {
            Error::NonCompact(format!(
                "{} gauge field without a declared curl support",
                a.tag().name()
            ))
        })?;
        let reach = 2.0 * default_step(Vec2::new(support, 0.0));
        let field = a.clone();
        Ok(Self::try_new(support + reach, Arc::new(move |x| curl_z(&field, x, None)))?.with_kinks(a.kink_radii()))
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn eval(&self, x: Point2) -> Result<f64> {
        if x.r() > self.support_radius {
            return Ok(0.0);
        }
        let v = (self.eval)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: "compact field".into(),
                at: x.r(),
            })
        }
    }
}

/// Ray `x + s ê` against the circle `|p| = rho`: the parameter values where
/// it enters and leaves, if it meets the circle at all.
fn ray_circle(x: Point2, dir: Vec2, rho: f64) -> Option<(f64, f64)> {
    let b = x.dot(dir);
    let c = x.dot(x) - rho * rho;
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let q = -(b + b.signum() * s);
    let (mut lo, mut hi) = if q != 0.0 { (q, c / q) } else { (-s, s) };
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    Some((lo, hi))
}

/// Radial breakpoints along one ray, clipped to `[lo, hi]`.
fn ray_breaks(bz: &CompactScalarField, x: Point2, dir: Vec2, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut cuts: Vec<f64> = bz
        .kinks
        .iter()
        .filter_map(|&rho| ray_circle(x, dir, rho))
        .flat_map(|(a, b)| [a, b])
        .filter(|&s| s > lo && s < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    pts.extend(cuts);
    pts.push(hi);
    pts
}

/// `∫ g(s) B_z(x + s ê) ds` over the part of the ray inside the support.
fn along_ray<G>(bz: &CompactScalarField, x: Point2, theta: f64, g: G, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let dir = Vec2::from_polar(1.0, theta);
    let Some((s0, s1)) = ray_circle(x, dir, bz.support_radius) else {
        return Ok(0.0);
    };
    let lo = s0.max(0.0);
    if s1 <= lo {
        return Ok(0.0);
    }
    let pts = ray_breaks(bz, x, dir, lo, s1);
    let e = try_integrate_breakpoints(
        |s| Ok(g(s) * bz.eval(x + dir * s)?),
        &pts,
        Tolerance::absolute(tol).with_max_subdivisions(500),
    )?;
    Ok(e.value)
}

/// `∇ψ` at a point inside the support, in polar coordinates about `x`:
/// `∇ψ = −(1/2π) ∫ dθ ê(θ) ∫ B_z(x + s ê) ds`.
fn grad_psi_inside(bz: &CompactScalarField, x: Point2, tol: f64) -> Result<Vec2> {
    let diameter = 2.0 * bz.support_radius;
    let inner_tol = 0.05 * tol;
    let radial = |theta: f64| along_ray(bz, x, theta, |_| 1.0, inner_tol / diameter.max(1.0));
    let outer = Tolerance::absolute(tol).with_max_subdivisions(2000);
    let angles = [0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI];
    let gx = try_integrate_breakpoints(|t| Ok(t.cos() * radial(t)?), &angles, outer)?;
    let gy = try_integrate_breakpoints(|t| Ok(t.sin() * radial(t)?), &angles, outer)?;
    Ok(Vec2::new(gx.value, gy.value) * (-1.0 / (2.0 * PI)))
}

/// `∇ψ` at a point outside the support, integrating over the source disk in
/// origin-centred polar coordinates.
fn grad_psi_outside(bz: &CompactScalarField, x: Point2, tol: f64) -> Result<Vec2> {
    let rb = bz.support_radius;
    let phi_x = x.phi();
    let ring = |rp: f64, comp: usize| -> Result<f64> {
        let e = try_integrate_breakpoints(
            |p| {
                let src = Vec2::from_polar(rp, p);
                let d = x - src;
                let k = d / d.dot(d);
                let c = if comp == 0 { k.x } else { k.y };
                Ok(c * bz.eval(src)?)
            },
            &[phi_x - PI, phi_x, phi_x + PI],
            Tolerance::absolute(0.05 * tol / rb.max(1.0)).with_max_subdivisions(500),
        )?;
        Ok(rp * e.value)
    };
    let mut pts = vec![0.0];
    let mut cuts: Vec<f64> = bz.kinks.iter().copied().filter(|&r| r > 0.0 && r < rb).collect();
    cuts.sort_by(f64::total_cmp);
    pts.extend(cuts);
    pts.push(rb);
    let outer = Tolerance::absolute(tol).with_max_subdivisions(2000);
    let gx = try_integrate_breakpoints(|r| ring(r, 0), &pts, outer)?;
    let gy = try_integrate_breakpoints(|r| ring(r, 1), &pts, outer)?;
    Ok(Vec2::new(gx.value, gy.value) * (1.0 / (2.0 * PI)))
}

/// Gradient of the log-kernel stream function; `A_⊥ = (−∂_y ψ, ∂_x ψ)`.
pub fn stream_gradient(bz: &CompactScalarField, x: Point2, tol: f64) -> Result<Vec2> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    if !x.is_finite() {
        return Err(Error::invalid("field point must be finite"));
    }
    let g = if x.r() < bz.support_radius {
        grad_psi_inside(bz, x, 0.5 * tol)
    } else {
        grad_psi_outside(bz, x, 0.5 * tol)
    };
    g.map_err(|e| e.within("transverse potential"))
}

/// The stream function `ψ` itself, with length scale `r0` in the logarithm.
/// Only its derivatives are physical; shifting `r0` adds a constant.
pub fn stream_function(bz: &CompactScalarField, x: Point2, r0: f64, tol: f64) -> Result<f64> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::invalid(format!("kernel length r0 = {r0} must be positive")));
    }
    let diameter = 2.0 * bz.support_radius;
    let radial = |theta: f64| {
        along_ray(
            bz,
            x,
            theta,
            |s| if s > 0.0 { s * (s / r0).ln() } else { 0.0 },
            0.05 * tol / diameter.max(1.0),
        )
    };
    let e = try_integrate_breakpoints(
        radial,
        &[0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI],
        Tolerance::absolute(tol).with_max_subdivisions(2000),
    )
    .map_err(|e| e.within("stream function"))?;
    Ok(e.value / (2.0 * PI))
}

/// Transverse (divergence-free) potential generated by `bz`.
pub fn transverse_from_b_2d(bz: &CompactScalarField, x: Point2, tol: f64) -> Result<Vec2> {
    let g = stream_gradient(bz, x, tol)?;
    Ok(Vec2::new(-g.y, g.x))
}

/// Both parts of the decomposition of `a` at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub total: Vec2,
    pub transverse: Vec2,
    pub longitudinal: Vec2,
}

pub fn decompose(a: &GaugeField, x: Point2, tol: f64) -> Result<Decomposition> {
    let bz = CompactScalarField::curl_of(a)?;
    let total = a.eval(x)?;
    let transverse = transverse_from_b_2d(&bz, x, tol)?;
    Ok(Decomposition {
        total,
        transverse,
        longitudinal: total - transverse,
    })
}

/// `A − A_⊥`: the curl-free remainder.
pub fn longitudinal_part(a: &GaugeField, x: Point2, tol: f64) -> Result<Vec2> {
    Ok(decompose(a, x, tol)?.longitudinal)
}

/// `A + ∇χ`. Curls and closed-loop integrals are unchanged for single-valued χ.
pub fn apply_gauge<F>(a: &GaugeField, chi: F) -> GaugeField
where
    F: Fn(Point2) -> f64 + Send + Sync + 'static,
{
    GaugeField::transformed(a.clone(), Arc::new(move |x| Ok(chi(x))))
}

/// Outcome of reducing the causal decomposition to the static case.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticReduction {
    /// Largest `|∂A/∂t|` found at the probe points; the retarded time-derivative
    /// term is built from it.
    pub time_term: f64,
    /// Largest `|A − (A_∥ + A_⊥)|` where `A_⊥` comes from the finite-difference
    /// curl of `A` and `A_∥` from the closed-form curl.
    pub residual: f64,
    pub points: Vec<Point2>,
}

/// Default probe points: radii `{0.5, 2, 5}·R` at three angles each.
pub fn static_probe_points(radius: f64) -> Vec<Point2> {
    let mut pts = Vec::new();
    for k in [0.5, 2.0, 5.0] {
        for phi in [0.3, 2.1, -1.7] {
            pts.push(Point2::from_polar(k * radius, phi));
        }
    }
    pts
}

/// Checks that for a static potential the causal Helmholtz decomposition
/// collapses to the ordinary one: the time-derivative term vanishes, and the
/// curl term (with retardation collapsed) plus the divergence term rebuild `A`.
pub fn static_reduction_check(a: &GaugeField, points: &[Point2], tol: f64) -> Result<StaticReduction> {
    let exact = CompactScalarField::curl_of(a)?;
    let numeric = CompactScalarField::numeric_curl_of(a)?;
    let dt = 1e-3;
    let mut time_term = 0.0f64;
    let mut residual = 0.0f64;
    for &x in points {
        // A carries no time dependence, so the stencil sees the same value
        let later = a.eval(x)?;
        let earlier = a.eval(x)?;
        time_term = time_term.max(((later - earlier) / (2.0 * dt)).norm());
        let total = a.eval(x)?;
        let longitudinal = total - transverse_from_b_2d(&exact, x, tol)?;
        let curl_term = transverse_from_b_2d(&numeric, x, tol)?;
        residual = residual.max((total - (longitudinal + curl_term)).norm());
    }
    Ok(StaticReduction {
        time_term,
        residual,
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::SolenoidSpec;

    fn disk() -> CompactScalarField {
        CompactScalarField::new(1.0, |x| if x.r() <= 1.0 { 1.0 } else { 0.0 })
            .unwrap()
            .with_kinks(vec![1.0])
    }

    #[test]
    fn uniform_disk_gives_symmetric_gauge() {
        let b = disk();
        for (r, want) in [(0.5, 0.25), (2.0, 0.25), (5.0, 0.1)] {
            let x = Point2::from_polar(r, 0.7);
            let a = transverse_from_b_2d(&b, x, 1e-9).unwrap();
            assert!((a.dot(x.e_phi()) - want).abs() < 1e-7, "r={r}: {a:?}");
            assert!(a.dot(x.e_r()).abs() < 1e-7);
        }
        let a0 = transverse_from_b_2d(&b, Point2::ZERO, 1e-9).unwrap();
        assert!(a0.norm() < 1e-9);
    }

    #[test]
    fn stream_function_shift_is_constant() {
        let b = disk();
        let x = Point2::new(0.3, -0.2);
        let y = Point2::new(0.6, 0.1);
        let d1 = stream_function(&b, x, 1.0, 1e-10).unwrap() - stream_function(&b, y, 1.0, 1e-10).unwrap();
        let d10 = stream_function(&b, x, 10.0, 1e-10).unwrap() - stream_function(&b, y, 10.0, 1e-10).unwrap();
        assert!((d1 - d10).abs() < 1e-8);
        // ψ = r²/4 + const inside the unit disk
        assert!((d1 - (0.13 - 0.37) / 4.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_fields_without_support() {
        let open = GaugeField::numeric(|p| Vec2::new(-p.y, p.x));
        assert!(matches!(CompactScalarField::curl_of(&open), Err(Error::NonCompact(_))));
        assert!(CompactScalarField::new(f64::INFINITY, |_| 1.0).is_err());
    }

    #[test]
    fn landau2_longitudinal_is_gradient() {
        let s = SolenoidSpec::infinite(1.0, 1.0).unwrap();
        let l2 = GaugeField::landau2(&s).unwrap();
        for x in [Point2::new(0.3, 0.1), Point2::new(2.0, -1.0)] {
            let al = longitudinal_part(&l2, x, 1e-8).unwrap();
            assert!(al.max_abs_diff(Vec2::new(0.5 * x.y, 0.5 * x.x)) < 1e-6, "{x:?}: {al:?}");
        }
    }

    #[test]
    fn apply_gauge_identity_and_landau() {
        let s = SolenoidSpec::infinite(1.0, 1.0).unwrap();
        let sym = GaugeField::symmetric(&s).unwrap();
        let l2 = GaugeField::landau2(&s).unwrap();
        let same = apply_gauge(&sym, |_| 0.0);
        let to_l2 = apply_gauge(&sym, |p| 0.5 * p.x * p.y);
        for x in [Point2::new(0.2, 0.4), Point2::new(-3.0, 1.0)] {
            assert_eq!(same.eval(x).unwrap(), sym.eval(x).unwrap());
            assert!(to_l2.eval(x).unwrap().max_abs_diff(l2.eval(x).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn zero_field_reduces_exactly() {
        let z = GaugeField::zero();
        let rep = static_reduction_check(&z, &static_probe_points(1.0), 1e-6).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert_eq!(rep.time_term, 0.0);
    }
}
