//! Magnetic sources: the ideal infinite solenoid in two gauges and the
//! finite-length solenoid modelled as a cylindrical surface-current sheet.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{try_grad_scalar, PlanarField, Point2, Point3, Vec2, Vec3};
use crate::quadrature::{try_integrate, try_integrate_breakpoints, Tolerance};

/// Axial extent of a solenoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfLength {
    Finite(f64),
    Infinite,
}

/// Solenoid on the z axis through the origin. Natural units (μ₀ = 1), so the
/// surface current density equals `b0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolenoidSpec {
    pub radius: f64,
    pub b0: f64,
    pub half_length: HalfLength,
}

impl SolenoidSpec {
    pub fn infinite(radius: f64, b0: f64) -> Result<Self> {
        Self::new(radius, b0, HalfLength::Infinite)
    }

    pub fn finite(radius: f64, b0: f64, half_length: f64) -> Result<Self> {
        Self::new(radius, b0, HalfLength::Finite(half_length))
    }

    pub fn new(radius: f64, b0: f64, half_length: HalfLength) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("solenoid radius {radius} must be positive")));
        }
        if !b0.is_finite() {
            return Err(Error::invalid("field strength must be finite"));
        }
        if let HalfLength::Finite(l) = half_length {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("half length {l} must be positive")));
            }
        }
        Ok(SolenoidSpec {
            radius,
            b0,
            half_length,
        })
    }

    /// Total flux through the cross-section, `π R² B₀`.
    pub fn flux(&self) -> f64 {
        PI * self.radius * self.radius * self.b0
    }

    pub fn surface_current(&self) -> f64 {
        self.b0
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.half_length, HalfLength::Infinite)
    }

    /// Default exclusion distance around the current sheet.
    pub fn sheet_epsilon(&self) -> f64 {
        1e-3 * self.radius
    }

    fn require_infinite(&self, op: &str) -> Result<()> {
        if self.is_infinite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("{op} needs an infinite solenoid")))
        }
    }

    fn require_finite(&self, op: &str) -> Result<f64> {
        match self.half_length {
            HalfLength::Finite(l) => Ok(l),
            HalfLength::Infinite => Err(Error::invalid(format!("{op} needs a finite solenoid"))),
        }
    }
}

pub(crate) fn symmetric_potential(x: Point2, radius: f64, b0: f64) -> Vec2 {
    let r = x.r();
    if r == 0.0 {
        return Vec2::ZERO;
    }
    let a_phi = if r < radius {
        0.5 * b0 * r
    } else {
        0.5 * b0 * radius * radius / r
    };
    x.e_phi() * a_phi
}

pub(crate) fn landau2_potential(x: Point2, radius: f64, b0: f64) -> Vec2 {
    let r = x.r();
    if r < radius {
        return Vec2::new(0.0, b0 * x.x);
    }
    let phi = x.phi();
    let (s2, c2) = (2.0 * phi).sin_cos();
    let a_phi = 0.5 * b0 * r * (c2 + radius * radius / (r * r));
    let a_r = 0.5 * b0 * r * s2;
    x.e_phi() * a_phi + x.e_r() * a_r
}

fn step_field(x: Point2, radius: f64, b0: f64) -> f64 {
    if x.r() <= radius {
        b0
    } else {
        0.0
    }
}

/// Symmetric (Coulomb) gauge potential of the infinite solenoid.
pub fn eval_a_symmetric(x: Point2, spec: &SolenoidSpec) -> Result<Vec2> {
    spec.require_infinite("symmetric gauge potential")?;
    Ok(symmetric_potential(x, spec.radius, spec.b0))
}

/// Generalized second Landau gauge: `B₀ x e_y` inside, the symmetric gauge
/// plus `∇(½ B₀ x y)` outside.
pub fn eval_a_landau2(x: Point2, spec: &SolenoidSpec) -> Result<Vec2> {
    spec.require_infinite("landau2 gauge potential")?;
    Ok(landau2_potential(x, spec.radius, spec.b0))
}

/// `B₀ θ(R − r)` with the wall itself counted as inside.
pub fn eval_b_infinite(x: Point2, spec: &SolenoidSpec) -> Result<f64> {
    spec.require_infinite("infinite-solenoid field")?;
    Ok(step_field(x, spec.radius, spec.b0))
}

pub type ScalarFn = Arc<dyn Fn(Point2) -> Result<f64> + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point2) -> Result<Vec2> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaugeTag {
    Symmetric,
    Landau2,
    /// A base field plus the gradient of a scalar.
    Custom,
    Numeric,
}

impl GaugeTag {
    pub fn name(self) -> &'static str {
        match self {
            GaugeTag::Symmetric => "symmetric",
            GaugeTag::Landau2 => "landau2",
            GaugeTag::Custom => "custom",
            GaugeTag::Numeric => "numeric",
        }
    }
}

#[derive(Clone)]
enum Repr {
    Symmetric {
        radius: f64,
        b0: f64,
    },
    Landau2 {
        radius: f64,
        b0: f64,
    },
    Custom {
        base: Box<GaugeField>,
        chi: ScalarFn,
    },
    Numeric {
        eval: VectorFn,
        curl: Option<ScalarFn>,
        curl_support: Option<f64>,
        kinks: Vec<f64>,
    },
}

/// An evaluable planar vector potential tagged with its gauge.
#[derive(Clone)]
pub struct GaugeField {
    repr: Repr,
}

impl fmt::Debug for GaugeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Symmetric { radius, b0 } => write!(f, "Symmetric {{ radius: {radius}, b0: {b0} }}"),
            Repr::Landau2 { radius, b0 } => write!(f, "Landau2 {{ radius: {radius}, b0: {b0} }}"),
            Repr::Custom { base, .. } => write!(f, "Custom {{ base: {base:?} }}"),
            Repr::Numeric { curl_support, .. } => write!(f, "Numeric {{ curl_support: {curl_support:?} }}"),
        }
    }
}

impl GaugeField {
    pub fn symmetric(spec: &SolenoidSpec) -> Result<Self> {
        spec.require_infinite("symmetric gauge")?;
        Ok(GaugeField {
            repr: Repr::Symmetric {
                radius: spec.radius,
                b0: spec.b0,
            },
        })
    }

    pub fn landau2(spec: &SolenoidSpec) -> Result<Self> {
        spec.require_infinite("landau2 gauge")?;
        Ok(GaugeField {
            repr: Repr::Landau2 {
                radius: spec.radius,
                b0: spec.b0,
            },
        })
    }

    /// `base + ∇χ`, with `∇χ` taken by central differences.
    pub fn transformed(base: GaugeField, chi: ScalarFn) -> Self {
        GaugeField {
            repr: Repr::Custom {
                base: Box::new(base),
                chi,
            },
        }
    }

    pub fn numeric<F>(f: F) -> Self
    where
        F: Fn(Point2) -> Vec2 + Send + Sync + 'static,
    {
        Self::try_numeric(move |x| Ok(f(x)))
    }

    pub fn try_numeric<F>(f: F) -> Self
    where
        F: Fn(Point2) -> Result<Vec2> + Send + Sync + 'static,
    {
        GaugeField {
            repr: Repr::Numeric {
                eval: Arc::new(f),
                curl: None,
                curl_support: None,
                kinks: Vec::new(),
            },
        }
    }

    /// The identically vanishing potential.
    pub fn zero() -> Self {
        Self::numeric(|_| Vec2::ZERO).with_curl(Arc::new(|_| Ok(0.0)), 1.0)
    }

    /// Attach an analytic curl with support inside `|x| <= support`.
    /// Only meaningful for numeric fields; other gauges already know theirs.
    pub fn with_curl(mut self, curl: ScalarFn, support: f64) -> Self {
        if let Repr::Numeric {
            curl: c, curl_support, ..
        } = &mut self.repr
        {
            *c = Some(curl);
            *curl_support = Some(support);
        }
        self
    }

    /// Declare the support radius of the curl without giving it analytically.
    pub fn with_curl_support(mut self, support: f64) -> Self {
        if let Repr::Numeric { curl_support, .. } = &mut self.repr {
            *curl_support = Some(support);
        }
        self
    }

    pub fn with_kinks(mut self, radii: Vec<f64>) -> Self {
        if let Repr::Numeric { kinks, .. } = &mut self.repr {
            *kinks = radii;
        }
        self
    }

    /// Same values and declared support, but no analytic curl; curls are then
    /// taken by finite differences.
    pub fn without_analytic_curl(&self) -> Self {
        let this = self.clone();
        let support = self.curl_support();
        let kinks = self.kink_radii();
        let mut f = GaugeField::try_numeric(move |x| this.eval(x)).with_kinks(kinks);
        if let Some(s) = support {
            f = f.with_curl_support(s);
        }
        f
    }

    pub fn tag(&self) -> GaugeTag {
        match self.repr {
            Repr::Symmetric { .. } => GaugeTag::Symmetric,
            Repr::Landau2 { .. } => GaugeTag::Landau2,
            Repr::Custom { .. } => GaugeTag::Custom,
            Repr::Numeric { .. } => GaugeTag::Numeric,
        }
    }

    pub fn eval(&self, x: Point2) -> Result<Vec2> {
        match &self.repr {
            Repr::Symmetric { radius, b0 } => Ok(symmetric_potential(x, *radius, *b0)),
            Repr::Landau2 { radius, b0 } => Ok(landau2_potential(x, *radius, *b0)),
            Repr::Custom { base, chi } => {
                let g = try_grad_scalar(|p| chi(p), x, None)?;
                Ok(base.eval(x)? + g)
            }
            Repr::Numeric { eval, .. } => eval(x),
        }
    }

    /// Closed-form `∂_x A_y − ∂_y A_x`, when known.
    pub fn analytic_curl(&self, x: Point2) -> Option<Result<f64>> {
        match &self.repr {
            Repr::Symmetric { radius, b0 } | Repr::Landau2 { radius, b0 } => Some(Ok(step_field(x, *radius, *b0))),
            Repr::Custom { base, .. } => base.analytic_curl(x),
            Repr::Numeric { curl, .. } => curl.as_ref().map(|c| c(x)),
        }
    }

    /// Analytic curl if available, otherwise central differences.
    pub fn curl(&self, x: Point2) -> Result<f64> {
        match self.analytic_curl(x) {
            Some(c) => c,
            None => crate::geometry::curl_z(self, x, None),
        }
    }

    /// Radius of a disk about the origin outside which the curl vanishes.
    pub fn curl_support(&self) -> Option<f64> {
        match &self.repr {
            Repr::Symmetric { radius, .. } | Repr::Landau2 { radius, .. } => Some(*radius),
            Repr::Custom { base, .. } => base.curl_support(),
            Repr::Numeric { curl_support, .. } => *curl_support,
        }
    }

    /// `(R, B₀)` of the underlying infinite solenoid, if any.
    pub fn solenoid(&self) -> Option<(f64, f64)> {
        match &self.repr {
            Repr::Symmetric { radius, b0 } | Repr::Landau2 { radius, b0 } => Some((*radius, *b0)),
            Repr::Custom { base, .. } => base.solenoid(),
            Repr::Numeric { .. } => None,
        }
    }
}

impl PlanarField for GaugeField {
    fn value(&self, x: Point2) -> Result<Vec2> {
        self.eval(x)
    }

    fn kink_radii(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Symmetric { radius, .. } | Repr::Landau2 { radius, .. } => vec![*radius],
            Repr::Custom { base, .. } => base.kink_radii(),
            Repr::Numeric { kinks, .. } => kinks.clone(),
        }
    }
}

/// Vector potential and magnetic field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub a: Vec3,
    pub b: Vec3,
}

/// Cylindrical components `(A_φ, B_r, B_z)` of the finite sheet at `(r, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalField {
    pub a_phi: f64,
    pub b_r: f64,
    pub b_z: f64,
}

#[derive(Clone, Copy)]
struct Sheet {
    radius: f64,
    b0: f64,
    half_length: f64,
}

impl Sheet {
    fn from_spec(spec: &SolenoidSpec, op: &str) -> Result<Sheet> {
        Ok(Sheet {
            radius: spec.radius,
            b0: spec.b0,
            half_length: spec.require_finite(op)?,
        })
    }

    fn distance(&self, r: f64, z: f64) -> f64 {
        let dz = (z.abs() - self.half_length).max(0.0);
        (r - self.radius).hypot(dz)
    }

    fn check(&self, r: f64, z: f64, eps: f64) -> Result<()> {
        let d = self.distance(r, z);
        if d <= eps {
            Err(Error::NearSingular {
                distance: d,
                minimum: eps,
            })
        } else {
            Ok(())
        }
    }

    /// `ρ²` between the field point and the source ring at angle `phi`.
    fn rho2(&self, r: f64, phi: f64) -> f64 {
        let s = (0.5 * phi).sin();
        (r - self.radius).powi(2) + 4.0 * r * self.radius * s * s
    }

    fn prefactor(&self) -> f64 {
        // (B₀ R / 4π) over [0, 2π] folded onto [0, π]
        self.b0 * self.radius / (2.0 * PI)
    }

    fn azimuthal<F>(&self, mut kernel: F, tol: f64) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        let pre = self.prefactor();
        if pre == 0.0 {
            return Ok(0.0);
        }
        let t = Tolerance::absolute(tol / pre.abs()).with_max_subdivisions(20_000);
        Ok(pre * try_integrate(|p| Ok(kernel(p)), 0.0, PI, t)?.value)
    }

    fn a_phi(&self, r: f64, z: f64, tol: f64) -> Result<f64> {
        let (lp, lm) = (self.half_length + z, self.half_length - z);
        self.azimuthal(
            |p| {
                let rho = self.rho2(r, p).sqrt();
                p.cos() * ((lm / rho).asinh() + (lp / rho).asinh())
            },
            tol,
        )
    }

    fn b_r(&self, r: f64, z: f64, tol: f64) -> Result<f64> {
        let (zp, zm) = (z + self.half_length, z - self.half_length);
        self.azimuthal(
            |p| {
                let rho2 = self.rho2(r, p);
                p.cos() * (1.0 / (rho2 + zm * zm).sqrt() - 1.0 / (rho2 + zp * zp).sqrt())
            },
            tol,
        )
    }

    fn b_z(&self, r: f64, z: f64, tol: f64) -> Result<f64> {
        let (zp, zm) = (z + self.half_length, z - self.half_length);
        let radius = self.radius;
        self.azimuthal(
            |p| {
                let rho2 = self.rho2(r, p);
                let axial = zp / (rho2 + zp * zp).sqrt() - zm / (rho2 + zm * zm).sqrt();
                (radius - r * p.cos()) / rho2 * axial
            },
            tol,
        )
    }
}

/// `A` and `B` of the finite surface-current sheet at `x`, by azimuthal
/// adaptive quadrature with the axial integral done in closed form.
pub fn eval_finite_solenoid(x: Point3, spec: &SolenoidSpec, tol: f64) -> Result<FieldSample> {
    let sheet = Sheet::from_spec(spec, "finite-solenoid field")?;
    if !x.is_finite() {
        return Err(Error::invalid("field point must be finite"));
    }
    let r = x.rho();
    sheet.check(r, x.z, spec.sheet_epsilon())?;
    let c = cylindrical_unchecked(&sheet, r, x.z, tol)?;
    let (er, ephi) = if r > 0.0 {
        let p = x.planar();
        (p.e_r(), p.e_phi())
    } else {
        (Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0))
    };
    let a = ephi * c.a_phi;
    let b = er * c.b_r;
    Ok(FieldSample {
        a: Vec3::new(a.x, a.y, 0.0),
        b: Vec3::new(b.x, b.y, c.b_z),
    })
}

fn cylindrical_unchecked(sheet: &Sheet, r: f64, z: f64, tol: f64) -> Result<CylindricalField> {
    let ctx = |e: Error| e.within(&format!("finite solenoid at r={r}, z={z}"));
    Ok(CylindricalField {
        a_phi: sheet.a_phi(r, z, tol).map_err(ctx)?,
        b_r: sheet.b_r(r, z, tol).map_err(ctx)?,
        b_z: sheet.b_z(r, z, tol).map_err(ctx)?,
    })
}

/// Cylindrical components at radius `r`, height `z`.
pub fn finite_cylindrical(spec: &SolenoidSpec, r: f64, z: f64, tol: f64) -> Result<CylindricalField> {
    let sheet = Sheet::from_spec(spec, "finite-solenoid field")?;
    sheet.check(r, z, spec.sheet_epsilon())?;
    cylindrical_unchecked(&sheet, r, z, tol)
}

pub fn finite_a_phi(spec: &SolenoidSpec, r: f64, z: f64, tol: f64) -> Result<f64> {
    let sheet = Sheet::from_spec(spec, "finite-solenoid field")?;
    sheet.check(r, z, spec.sheet_epsilon())?;
    sheet.a_phi(r, z, tol)
}

pub fn finite_b_z(spec: &SolenoidSpec, r: f64, z: f64, tol: f64) -> Result<f64> {
    let sheet = Sheet::from_spec(spec, "finite-solenoid field")?;
    sheet.check(r, z, spec.sheet_epsilon())?;
    sheet.b_z(r, z, tol)
}

/// Far-field asymptotes of the finite solenoid at the equator, `r ≫ R, L`:
/// `A_φ ≃ ½ B₀ R² L / r²` and `B_z ≃ −½ B₀ R² L / r³`.
pub fn far_field_asymptote(spec: &SolenoidSpec, r: f64) -> Result<(f64, f64)> {
    let l = spec.require_finite("far-field asymptote")?;
    let m = 0.5 * spec.b0 * spec.radius * spec.radius * l;
    Ok((m / (r * r), -m / (r * r * r)))
}

/// Flux of `B_z` through the disk `r <= r_max` of the `z = 0` plane, with the
/// analytic `r⁻³` tail beyond `r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxReport {
    /// Quadrature over `0..r_max`.
    pub truncated: f64,
    /// `∫_{r_max}^∞ B_z 2πr dr` from the far-field asymptote.
    pub tail: f64,
    /// Size of the leading neglected term in the tail.
    pub tail_uncertainty: f64,
    pub quadrature_error: f64,
}

impl FluxReport {
    pub fn net(&self) -> f64 {
        self.truncated + self.tail
    }
}

/// Geometric breakpoints `r0, 2 r0, 4 r0, …` up to `r1`.
pub(crate) fn geometric_breaks(r0: f64, r1: f64) -> Vec<f64> {
    let mut pts = vec![r0];
    let mut r = 2.0 * r0;
    while r < r1 {
        pts.push(r);
        r *= 2.0;
    }
    pts.push(r1);
    pts
}

pub fn net_flux_z0(spec: &SolenoidSpec, r_max: f64, tol: f64) -> Result<FluxReport> {
    if !(r_max > spec.radius && r_max.is_finite()) {
        return Err(Error::invalid(format!("r_max {r_max} must exceed the solenoid radius")));
    }
    let mut points = vec![0.0];
    points.extend(geometric_breaks(spec.radius, r_max));
    let t = Tolerance::absolute(tol).with_max_subdivisions(2000);
    match spec.half_length {
        HalfLength::Infinite => {
            let e = try_integrate_breakpoints(
                |r| Ok(step_field(Vec2::new(r, 0.0), spec.radius, spec.b0) * 2.0 * PI * r),
                &points,
                t,
            )?;
            Ok(FluxReport {
                truncated: e.value,
                tail: 0.0,
                tail_uncertainty: 0.0,
                quadrature_error: e.error,
            })
        }
        HalfLength::Finite(l) => {
            let extent = spec.radius.max(l);
            if r_max < 10.0 * extent {
                return Err(Error::invalid(format!(
                    "r_max {r_max} is inside the near zone; the far-field tail needs r_max >= {}",
                    10.0 * extent
                )));
            }
            let sheet = Sheet::from_spec(spec, "net flux")?;
            let inner_tol = tol / (20.0 * PI * r_max);
            let e = try_integrate_breakpoints(|r| Ok(sheet.b_z(r, 0.0, inner_tol)? * 2.0 * PI * r), &points, t)
                .map_err(|e| e.within("net flux"))?;
            let tail = -PI * spec.b0 * spec.radius * spec.radius * l / r_max;
            Ok(FluxReport {
                truncated: e.value,
                tail,
                tail_uncertainty: tail.abs() * (extent / r_max).powi(2),
                quadrature_error: e.error,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curl_z, grad_scalar};

    fn unit() -> SolenoidSpec {
        SolenoidSpec::infinite(1.0, 1.0).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SolenoidSpec::infinite(0.0, 1.0).is_err());
        assert!(SolenoidSpec::finite(1.0, 1.0, -1.0).is_err());
        assert!(SolenoidSpec::infinite(1.0, f64::NAN).is_err());
        assert!((unit().flux() - PI).abs() < 1e-15);
        assert!(eval_a_symmetric(Vec2::ZERO, &SolenoidSpec::finite(1.0, 1.0, 2.0).unwrap()).is_err());
    }

    #[test]
    fn symmetric_gauge_values() {
        let s = unit();
        let a = eval_a_symmetric(Vec2::new(0.5, 0.0), &s).unwrap();
        assert!((a.y - 0.25).abs() < 1e-15 && a.x.abs() < 1e-15);
        let p = Vec2::from_polar(2.0, 1.0);
        let a = eval_a_symmetric(p, &s).unwrap();
        assert!((a.dot(p.e_phi()) - 0.25).abs() < 1e-15);
        assert!(a.dot(p.e_r()).abs() < 1e-15);
        assert_eq!(eval_a_symmetric(Vec2::ZERO, &s).unwrap(), Vec2::ZERO);
        // both branches agree on the wall
        let w = Vec2::from_polar(1.0, 0.3);
        let inside = 0.5 * 1.0 * 1.0;
        let outside = 0.5 * 1.0 * 1.0 / 1.0;
        assert!((eval_a_symmetric(w, &s).unwrap().norm() - inside).abs() < 1e-15);
        assert_eq!(inside, outside);
    }

    #[test]
    fn landau2_values() {
        let s = unit();
        let a = eval_a_landau2(Vec2::new(0.3, 0.1), &s).unwrap();
        assert_eq!(a, Vec2::new(0.0, 0.3));
        let x = Vec2::new(2.0, 0.0);
        let a = eval_a_landau2(x, &s).unwrap();
        assert!((a.dot(x.e_phi()) - 1.25).abs() < 1e-14);
        assert!(a.dot(x.e_r()).abs() < 1e-14);
        // cross-check: symmetric + ∇(½xy) = (½y, ½x)
        let s2 = eval_a_symmetric(x, &s).unwrap() + Vec2::new(0.0, 1.0);
        assert!(a.max_abs_diff(s2) < 1e-14);
    }

    #[test]
    fn landau2_is_symmetric_plus_gradient() {
        let s = SolenoidSpec::infinite(1.3, 0.7).unwrap();
        let chi = |p: Point2| 0.5 * 0.7 * p.x * p.y;
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let p = Vec2::new(8.0 * next() - 4.0, 8.0 * next() - 4.0);
            let diff = eval_a_landau2(p, &s).unwrap() - eval_a_symmetric(p, &s).unwrap();
            let g = grad_scalar(chi, p, None).unwrap();
            assert!(diff.max_abs_diff(g) < 1e-9, "at {p:?}");
        }
    }

    #[test]
    fn b_field_and_curls() {
        let s = unit();
        assert_eq!(eval_b_infinite(Vec2::new(0.5, 0.0), &s).unwrap(), 1.0);
        assert_eq!(eval_b_infinite(Vec2::new(2.0, 0.0), &s).unwrap(), 0.0);
        assert_eq!(eval_b_infinite(Vec2::new(0.0, 1.0), &s).unwrap(), 1.0);
        let sym = GaugeField::symmetric(&s).unwrap();
        let l2 = GaugeField::landau2(&s).unwrap();
        assert!((curl_z(&sym, Vec2::new(0.5, 0.0), None).unwrap() - 1.0).abs() < 1e-8);
        assert!(curl_z(&sym, Vec2::new(2.0, 0.0), None).unwrap().abs() < 1e-8);
        assert!((curl_z(&l2, Vec2::new(0.3, 0.1), None).unwrap() - 1.0).abs() < 1e-8);
        for p in [Vec2::new(-0.4, 0.6), Vec2::new(1.5, -2.0), Vec2::new(3.0, 3.0)] {
            for f in [&sym, &l2] {
                let c = curl_z(f, p, None).unwrap();
                assert!((c - eval_b_infinite(p, &s).unwrap()).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn finite_solenoid_on_axis() {
        let s = SolenoidSpec::finite(1.0, 1.0, 10.0).unwrap();
        let f = eval_finite_solenoid(Vec3::ZERO, &s, 1e-12).unwrap();
        let exact = 10.0 / (100.0f64 + 1.0).sqrt();
        assert!((f.b.z - exact).abs() < 1e-11);
        assert!(f.a.norm() < 1e-12 && f.b.x.abs() < 1e-12);
    }

    #[test]
    fn finite_solenoid_rejects_sheet_and_infinite() {
        let s = SolenoidSpec::finite(1.0, 1.0, 2.0).unwrap();
        let e = eval_finite_solenoid(Vec3::new(1.0005, 0.0, 0.0), &s, 1e-10);
        assert!(matches!(e, Err(Error::NearSingular { .. })));
        // the rim counts as part of the sheet
        let e = eval_finite_solenoid(Vec3::new(1.0, 0.0, 2.0005), &s, 1e-10);
        assert!(matches!(e, Err(Error::NearSingular { .. })));
        assert!(eval_finite_solenoid(Vec3::new(1.0, 0.0, 2.5), &s, 1e-10).is_ok());
        assert!(eval_finite_solenoid(Vec3::ZERO, &unit(), 1e-10).is_err());
    }

    #[test]
    fn infinite_flux_has_no_return() {
        let f = net_flux_z0(&unit(), 7.0, 1e-10).unwrap();
        assert!((f.net() - PI).abs() < 1e-10);
    }

    #[test]
    fn gauge_tags_and_support() {
        let s = unit();
        assert_eq!(GaugeField::symmetric(&s).unwrap().tag(), GaugeTag::Symmetric);
        assert_eq!(GaugeField::landau2(&s).unwrap().tag(), GaugeTag::Landau2);
        let z = GaugeField::zero();
        assert_eq!(z.tag(), GaugeTag::Numeric);
        assert_eq!(z.curl(Vec2::new(1.0, 1.0)).unwrap(), 0.0);
        let n = GaugeField::numeric(|p| Vec2::new(-p.y, p.x));
        assert!(n.curl_support().is_none());
        assert!((n.curl(Vec2::new(0.2, 0.3)).unwrap() - 2.0).abs() < 1e-9);
        let stripped = GaugeField::symmetric(&s).unwrap().without_analytic_curl();
        assert_eq!(stripped.curl_support(), Some(1.0));
        assert!(stripped.analytic_curl(Vec2::ZERO).is_none());
    }
}
