//! Gauge-invariant, path-dependent potentials `Ã = A − ∇Λ`, where `Λ(x)` is
//! the line integral of `A` from the origin to `x` along a chosen path.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{default_step, line_integral, try_grad_scalar, Path, PlanarField, Point2, Vec2};
use crate::sources::GaugeField;

/// Rule assigning each field point a path from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathFamily {
    /// The straight segment from the origin to `x`.
    RadialStraight,
    /// Origin to `(0, y)`, then across to `(x, y)`.
    PolygonalXY,
    /// `n` clockwise turns of the rectangle with corners at the origin and
    /// `(x, y)/√(2n)`, followed by the straight segment to `x`.
    LoopedRadial(u32),
}

impl PathFamily {
    pub fn name(&self) -> String {
        match self {
            PathFamily::RadialStraight => "radial".into(),
            PathFamily::PolygonalXY => "polygonal_xy".into(),
            PathFamily::LoopedRadial(n) => format!("looped_{n}"),
        }
    }

    pub fn path(&self, x: Point2) -> Result<Path> {
        if !x.is_finite() {
            return Err(Error::invalid("path endpoint must be finite"));
        }
        let o = Point2::ZERO;
        match *self {
            PathFamily::RadialStraight => Ok(Path::line(o, x)),
            PathFamily::PolygonalXY => Path::polyline(&[o, Point2::new(0.0, x.y), x]),
            PathFamily::LoopedRadial(n) => {
                if n == 0 {
                    return Err(Error::invalid("looped path needs at least one turn"));
                }
                let c = x / (2.0 * f64::from(n)).sqrt();
                Path::polyline(&[o, Point2::new(0.0, c.y), c, Point2::new(c.x, 0.0), o])?
                    .repeat(n)?
                    .then(Path::line(o, x))
            }
        }
    }

    /// The closed loop part of the path, if the family has one.
    pub fn loop_part(&self, x: Point2) -> Result<Option<Path>> {
        if let PathFamily::LoopedRadial(_) = self {
            let full = self.path(x)?;
            Ok(Some(Path::new(vec![full.segments()[0].clone()])?))
        } else {
            Ok(None)
        }
    }
}

/// `Λ(x)`: line integral of `a` along the family's path to `x`.
pub fn dewitt_lambda(a: &GaugeField, family: PathFamily, x: Point2, tol: f64) -> Result<f64> {
    line_integral(a, &family.path(x)?, tol)
        .map_err(|e| e.within(&format!("{} path to ({}, {})", family.name(), x.x, x.y)))
}

/// `Ã(x) = A(x) − ∇Λ(x)`, with `∇Λ` by central differences. `Λ` is evaluated
/// tightly enough that the differencing does not amplify its error past `tol`.
pub fn dewitt_potential(a: &GaugeField, family: PathFamily, x: Point2, tol: f64) -> Result<Vec2> {
    dewitt_potential_with_step(a, family, x, tol, None)
}

pub fn dewitt_potential_with_step(
    a: &GaugeField,
    family: PathFamily,
    x: Point2,
    tol: f64,
    h: Option<f64>,
) -> Result<Vec2> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    let step = h.unwrap_or_else(|| default_step(x));
    let lambda_tol = (0.1 * tol * step).min(1e-12);
    let grad = try_grad_scalar(|p| dewitt_lambda(a, family, p, lambda_tol), x, Some(step))?;
    Ok(a.eval(x)? - grad)
}

/// The DeWitt potential as a field in its own right.
pub fn dewitt_field(a: &GaugeField, family: PathFamily, tol: f64) -> GaugeField {
    let base = a.clone();
    let kinks = a.kink_radii();
    let support = a.curl_support();
    let f = GaugeField::try_numeric(move |x| dewitt_potential(&base, family, x, tol)).with_kinks(kinks);
    match support {
        Some(s) => f.with_curl_support(s),
        None => f,
    }
}

/// Result of comparing looped and straight DeWitt potentials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopReport {
    pub n: u32,
    pub point: Point2,
    /// `Ã^{loop}(x) − Ã^{radial}(x)`.
    pub difference: Vec2,
    /// `∇(½ B₀ x y)` at the point.
    pub expected: Vec2,
    pub residual: f64,
    /// Line integral over the `n` rectangle turns.
    pub loop_integral: f64,
}

/// Checks `Ã^{LoopedRadial(n)} − Ã^{RadialStraight} = ∇(½ B₀ x y)` at `x`,
/// which requires `R < |x| < √(2n) R` so the rectangle lies inside the
/// solenoid while `x` lies outside.
pub fn loop_gauge_correspondence(a: &GaugeField, n: u32, x: Point2, tol: f64) -> Result<LoopReport> {
    let (radius, b0) = a
        .solenoid()
        .ok_or_else(|| Error::invalid("loop correspondence needs a field built on an infinite solenoid"))?;
    let r = x.r();
    let upper = (2.0 * f64::from(n)).sqrt() * radius;
    if !(r > radius && r < upper) {
        return Err(Error::invalid(format!(
            "|x| = {r} is outside the validity window ({radius}, {upper}) for n = {n}"
        )));
    }
    let looped = dewitt_potential(a, PathFamily::LoopedRadial(n), x, tol)?;
    let straight = dewitt_potential(a, PathFamily::RadialStraight, x, tol)?;
    let difference = looped - straight;
    let expected = Vec2::new(0.5 * b0 * x.y, 0.5 * b0 * x.x);
    let loop_path = PathFamily::LoopedRadial(n)
        .loop_part(x)?
        .expect("looped family has a loop");
    Ok(LoopReport {
        n,
        point: x,
        difference,
        expected,
        residual: (difference - expected).norm(),
        loop_integral: line_integral(a, &loop_path, 1e-12)?,
    })
}

/// A single-valued gauge function `χ` as a shareable closure.
pub fn gauge_function<F>(f: F) -> crate::sources::ScalarFn
where
    F: Fn(Point2) -> f64 + Send + Sync + 'static,
{
    Arc::new(move |x| Ok(f(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::SolenoidSpec;

    fn spec() -> SolenoidSpec {
        SolenoidSpec::infinite(1.0, 1.0).unwrap()
    }

    #[test]
    fn paths_start_at_origin_and_end_at_x() {
        let x = Point2::new(1.5, -0.7);
        for fam in [
            PathFamily::RadialStraight,
            PathFamily::PolygonalXY,
            PathFamily::LoopedRadial(4),
        ] {
            let p = fam.path(x).unwrap();
            assert_eq!(p.start(), Point2::ZERO);
            assert!((p.end() - x).norm() < 1e-15);
        }
        let lp = PathFamily::LoopedRadial(4).loop_part(x).unwrap().unwrap();
        assert!(lp.is_closed());
        assert!(PathFamily::LoopedRadial(0).path(x).is_err());
    }

    #[test]
    fn lambda_values() {
        let sym = GaugeField::symmetric(&spec()).unwrap();
        let l2 = GaugeField::landau2(&spec()).unwrap();
        let x = Point2::new(2.0, 0.0);
        assert!(
            dewitt_lambda(&sym, PathFamily::RadialStraight, Point2::new(1.3, 2.2), 1e-12)
                .unwrap()
                .abs()
                < 1e-14
        );
        assert!(dewitt_lambda(&l2, PathFamily::RadialStraight, x, 1e-12).unwrap().abs() < 1e-12);
        let y = Point2::new(2.0, 1.0);
        let lam = dewitt_lambda(&sym, PathFamily::LoopedRadial(8), y, 1e-12).unwrap();
        assert!((lam + 1.0).abs() < 1e-10, "{lam}");
    }

    #[test]
    fn polygonal_reproduces_landau2_inside() {
        let sym = GaugeField::symmetric(&spec()).unwrap();
        let a = dewitt_potential(&sym, PathFamily::PolygonalXY, Point2::new(0.3, 0.1), 1e-6).unwrap();
        assert!(a.max_abs_diff(Vec2::new(0.0, 0.3)) < 1e-6, "{a:?}");
    }

    #[test]
    fn radial_from_landau2_is_symmetric() {
        let l2 = GaugeField::landau2(&spec()).unwrap();
        let x = Point2::from_polar(2.0, 0.8);
        let a = dewitt_potential(&l2, PathFamily::RadialStraight, x, 1e-6).unwrap();
        assert!((a - x.e_phi() * 0.25).norm() < 1e-6, "{a:?}");
    }

    #[test]
    fn correspondence_window_enforced() {
        let sym = GaugeField::symmetric(&spec()).unwrap();
        assert!(loop_gauge_correspondence(&sym, 2, Point2::new(0.5, 0.0), 1e-6).is_err());
        assert!(loop_gauge_correspondence(&sym, 2, Point2::new(2.5, 0.0), 1e-6).is_err());
        let rep = loop_gauge_correspondence(&sym, 8, Point2::new(2.0, 1.0), 1e-6).unwrap();
        assert!(rep.residual < 1e-6, "{rep:?}");
        assert_eq!(rep.expected, Vec2::new(0.5, 1.0));
    }

    #[test]
    fn zero_field_has_zero_dewitt_potential() {
        let z = GaugeField::symmetric(&SolenoidSpec::infinite(1.0, 0.0).unwrap()).unwrap();
        let rep = loop_gauge_correspondence(&z, 8, Point2::new(2.0, 1.0), 1e-6).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert_eq!(rep.difference, Vec2::ZERO);
    }
}
