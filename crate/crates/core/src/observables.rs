//! Aharonov–Bohm phase, the three orbital angular momenta of a charge near
//! the solenoid, and the boundary terms that reconcile them with the field
//! angular momentum.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{line_integral, Path, Point2, Vec2};
use crate::helmholtz::decompose;
use crate::quadrature::{try_integrate_breakpoints, Tolerance};
use crate::sources::{eval_b_infinite, GaugeField, SolenoidSpec};

/// `e ∮ A·dx` around a closed loop.
pub fn ab_phase(a: &GaugeField, loop_path: &Path, e: f64, tol: f64) -> Result<f64> {
    if !loop_path.is_closed() {
        return Err(Error::invalid("AB phase needs a closed loop"));
    }
    Ok(e * line_integral(a, loop_path, tol)?)
}

/// `β = eΦ/2π`.
pub fn beta(spec: &SolenoidSpec, e: f64) -> f64 {
    e * spec.flux() / (2.0 * PI)
}

/// `e (x × A_⊥)_z`.
pub fn potential_oam(x: Point2, a_perp: Vec2, e: f64) -> f64 {
    e * x.cross(a_perp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOamReport {
    pub radius: f64,
    pub phase: f64,
    pub l_pot: f64,
    pub residual: f64,
    /// Variation of `A_φ` around the circle.
    pub spread: f64,
}

/// Checks `φ_AB = 2π L^pot` on the circle of radius `r`. The relation assumes
/// `A_⊥ = A_φ(r) e_φ`, so a field whose azimuthal component varies around the
/// circle by more than `tol` is rejected.
pub fn phase_oam_relation(a_perp: &GaugeField, r: f64, e: f64, tol: f64) -> Result<PhaseOamReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("circle radius {r} must be positive")));
    }
    const SAMPLES: usize = 64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..SAMPLES {
        let x = Point2::from_polar(r, 2.0 * PI * k as f64 / SAMPLES as f64);
        let a_phi = a_perp.eval(x)?.dot(x.e_phi());
        lo = lo.min(a_phi);
        hi = hi.max(a_phi);
    }
    let spread = hi - lo;
    if spread > tol {
        return Err(Error::NonAxisymmetric { spread, tol });
    }
    let phase = ab_phase(a_perp, &Path::circle(Point2::ZERO, r)?, e, 0.1 * tol)?;
    let x = Point2::new(r, 0.0);
    let l_pot = potential_oam(x, a_perp.eval(x)?, e);
    Ok(PhaseOamReport {
        radius: r,
        phase,
        l_pot,
        residual: (phase - 2.0 * PI * l_pot).abs(),
        spread,
    })
}

/// Mechanical, potential and gauge-invariant canonical angular momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OamLedger {
    /// `(x × (p − eA))_z`.
    pub l_mech: f64,
    /// `e (x × A_⊥)_z`.
    pub l_pot: f64,
    /// `(x × (p − eA_∥))_z`.
    pub l_gic: f64,
}

impl OamLedger {
    /// Builds the ledger from the two parts of the potential. `L_gic` is formed
    /// from `p − eA_∥` directly, not as the sum of the other two.
    pub fn from_parts(x: Point2, p: Vec2, a_perp: Vec2, a_par: Vec2, e: f64) -> Self {
        let a = a_perp + a_par;
        OamLedger {
            l_mech: x.cross(p - a * e),
            l_pot: potential_oam(x, a_perp, e),
            l_gic: x.cross(p - a_par * e),
        }
    }

    /// `L_gic − (L_mech + L_pot)`.
    pub fn identity_residual(&self) -> f64 {
        self.l_gic - (self.l_mech + self.l_pot)
    }

    /// The conserved canonical value, `m₀`.
    pub fn canonical(&self) -> f64 {
        self.l_gic
    }
}

/// Ledger at phase-space point `(x, p)`, splitting `a` with the Helmholtz
/// decomposition.
pub fn ledger(x: Point2, p: Vec2, a: &GaugeField, e: f64, tol: f64) -> Result<OamLedger> {
    let d = decompose(a, x, tol)?;
    Ok(OamLedger::from_parts(x, p, d.transverse, d.longitudinal, e))
}

/// Boundary terms of the field angular momentum identity for a static charge
/// `e` at `x_e` outside an infinite solenoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceTerms {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub l_pot: f64,
    /// `|∫_annulus [x × (E_∥ × B)]_z − (L_pot + S₁ + S₂ + S₃)|`.
    pub lhs_residual: f64,
    /// Flux of `E_∥` out of the outer circle; Gauss gives `e`.
    pub gauss_outer: f64,
    /// Flux of `E_∥` out of the solenoid wall; Gauss gives 0.
    pub gauss_inner: f64,
}

struct Coulomb {
    charge: f64,
    at: Point2,
    r0: f64,
}

impl Coulomb {
    /// `A⁰ = −(e/2π) ln(|x − x_e| / r₀)`.
    fn potential(&self, x: Point2) -> f64 {
        -self.charge / (2.0 * PI) * ((x - self.at).norm() / self.r0).ln()
    }

    /// `E_∥ = −∇A⁰`.
    fn field(&self, x: Point2) -> Vec2 {
        let d = x - self.at;
        d * (self.charge / (2.0 * PI * d.dot(d)))
    }
}

/// `∮ g(φ) r dφ` on the circle of radius `r`, with a breakpoint at the
/// charge's angle where the integrand peaks.
fn circle_integral<G>(r: f64, peak: f64, g: G, tol: f64) -> Result<f64>
where
    G: Fn(Point2) -> Result<f64>,
{
    let e = try_integrate_breakpoints(
        |p| Ok(g(Point2::from_polar(r, p))? * r),
        &[peak - PI, peak, peak + PI],
        Tolerance::absolute(tol).with_max_subdivisions(4000),
    )?;
    Ok(e.value)
}

/// `∂A/∂φ` at fixed radius, by central differences in angle.
fn dphi(a: &GaugeField, x: Point2) -> Result<Vec2> {
    let h = 1e-5;
    let (r, p) = (x.r(), x.phi());
    Ok((a.eval(Point2::from_polar(r, p + h))? - a.eval(Point2::from_polar(r, p - h))?) / (2.0 * h))
}

/// Evaluates `S₁`, `S₂`, `S₃` on the circles `r = R` and `r = r_inf` for a
/// charge at `x_e`, with `A_⊥` the symmetric-gauge potential and `r₀ = R`.
pub fn surface_terms(x_e: Point2, spec: &SolenoidSpec, e: f64, r_inf: f64, tol: f64) -> Result<SurfaceTerms> {
    let radius = spec.radius;
    let a_perp = GaugeField::symmetric(spec)?;
    let d = x_e.r();
    if !(d > radius && d < r_inf) {
        return Err(Error::invalid(format!(
            "charge at |x| = {d} must lie between R = {radius} and r_inf = {r_inf}"
        )));
    }
    let eps = spec.sheet_epsilon();
    let gap = (d - radius).min(r_inf - d);
    if gap <= 10.0 * eps {
        return Err(Error::IllConditioned(format!(
            "charge is {gap:e} from a boundary circle (minimum {:e})",
            10.0 * eps
        )));
    }
    let q = Coulomb {
        charge: e,
        at: x_e,
        r0: radius,
    };
    let peak = x_e.phi();
    let t = 0.1 * tol;
    // the field is evaluated just outside the wall so the outer branch is used
    let wall = radius * (1.0 + 1e-14);

    let flux = |r: f64| circle_integral(r, peak, |x| Ok(q.field(x).dot(x.e_r())), t);
    let gauss_outer = flux(r_inf)?;
    let gauss_inner = flux(wall)?;

    let s1_part = |r: f64| circle_integral(r, peak, |x| Ok(q.field(x).dot(x.e_r()) * x.cross(a_perp.eval(x)?)), t);
    let s1 = -s1_part(r_inf)? + s1_part(wall)?;

    let s2_part = |r: f64| circle_integral(r, peak, |x| Ok(q.potential(x) * dphi(&a_perp, x)?.dot(x.e_r())), t);
    let s2 = -s2_part(r_inf)? + s2_part(wall)?;

    let s3_part = |r: f64| circle_integral(r, peak, |x| Ok(q.potential(x) * a_perp.eval(x)?.dot(x.e_phi())), t);
    let s3 = -s3_part(r_inf)? + s3_part(wall)?;

    let l_pot = potential_oam(x_e, a_perp.eval(x_e)?, e);

    // [x × (E × B e_z)]_z = −B (x·E); B vanishes throughout the annulus
    let lhs = {
        let ring = |r: f64| circle_integral(r, peak, |x| Ok(-eval_b_infinite(x, spec)? * x.dot(q.field(x))), t);
        let mut pts = vec![wall];
        pts.extend([d].into_iter().filter(|&v| v > wall && v < r_inf));
        pts.push(r_inf);
        try_integrate_breakpoints(ring, &pts, Tolerance::absolute(t))?.value
    };

    Ok(SurfaceTerms {
        s1,
        s2,
        s3,
        l_pot,
        lhs_residual: (lhs - (l_pot + s1 + s2 + s3)).abs(),
        gauss_outer,
        gauss_inner,
    })
}
