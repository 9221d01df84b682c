//! Paths in the plane, line integrals along them, and central-difference
//! derivatives of planar fields.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate_breakpoints, Estimate, Tolerance};
pub use crate::vector::{normalize_angle, Point2, Point3, Vec2, Vec3, Vector2};

/// Default absolute tolerance for line integrals of closed-form fields.
pub const TOL_ANALYTIC: f64 = 1e-10;
/// Default absolute tolerance when the field itself comes from quadrature.
pub const TOL_QUADRATURE: f64 = 1e-6;

const JOIN_TOL: f64 = 1e-12;

/// A planar vector field that can be integrated along paths.
pub trait PlanarField: Send + Sync {
    fn value(&self, x: Point2) -> Result<Vec2>;

    /// Radii about the origin where the field is not smooth. Line integrals
    /// are split where a segment crosses one of these circles.
    fn kink_radii(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F> PlanarField for F
where
    F: Fn(Point2) -> Vec2 + Send + Sync,
{
    fn value(&self, x: Point2) -> Result<Vec2> {
        Ok(self(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Line {
        start: Point2,
        end: Point2,
    },
    /// Circular arc `center + radius (cos t, sin t)` for `t` from `start_angle`
    /// through `start_angle + sweep`; `|sweep| <= 2 pi`.
    Arc {
        center: Point2,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// Axis-aligned elliptic arc `center + (semi_x cos t, semi_y sin t)`.
    EllipticArc {
        center: Point2,
        semi_x: f64,
        semi_y: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// `times` traversals of a closed sub-path.
    Repeat {
        path: Box<Path>,
        times: u32,
    },
}

impl Segment {
    pub fn start(&self) -> Point2 {
        match self {
            Segment::Line { start, .. } => *start,
            Segment::Repeat { path, .. } => path.start(),
            _ => self.point(self.param_range().0),
        }
    }

    pub fn end(&self) -> Point2 {
        match self {
            Segment::Line { end, .. } => *end,
            Segment::Repeat { path, .. } => path.end(),
            _ => self.point(self.param_range().1),
        }
    }

    fn param_range(&self) -> (f64, f64) {
        match self {
            Segment::Line { .. } | Segment::Repeat { .. } => (0.0, 1.0),
            Segment::Arc { start_angle, sweep, .. } | Segment::EllipticArc { start_angle, sweep, .. } => {
                (*start_angle, start_angle + sweep)
            }
        }
    }

    fn point(&self, t: f64) -> Point2 {
        match self {
            Segment::Line { start, end } => *start + (*end - *start) * t,
            Segment::Arc { center, radius, .. } => *center + Vec2::from_polar(*radius, t),
            Segment::EllipticArc {
                center, semi_x, semi_y, ..
            } => *center + Vec2::new(semi_x * t.cos(), semi_y * t.sin()),
            Segment::Repeat { .. } => unreachable!("repeat has no direct parametrization"),
        }
    }

    fn tangent(&self, t: f64) -> Vec2 {
        match self {
            Segment::Line { start, end } => *end - *start,
            Segment::Arc { radius, .. } => Vec2::new(-t.sin(), t.cos()) * *radius,
            Segment::EllipticArc { semi_x, semi_y, .. } => Vec2::new(-semi_x * t.sin(), semi_y * t.cos()),
            Segment::Repeat { .. } => unreachable!("repeat has no direct parametrization"),
        }
    }

    fn reversed(&self) -> Segment {
        match self {
            Segment::Line { start, end } => Segment::Line {
                start: *end,
                end: *start,
            },
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Segment::Arc {
                center: *center,
                radius: *radius,
                start_angle: normalize_angle(start_angle + sweep),
                sweep: -sweep,
            },
            Segment::EllipticArc {
                center,
                semi_x,
                semi_y,
                start_angle,
                sweep,
            } => Segment::EllipticArc {
                center: *center,
                semi_x: *semi_x,
                semi_y: *semi_y,
                start_angle: normalize_angle(start_angle + sweep),
                sweep: -sweep,
            },
            Segment::Repeat { path, times } => Segment::Repeat {
                path: Box::new(path.reversed()),
                times: *times,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Segment::Line { start, end } => {
                if !(start.is_finite() && end.is_finite()) {
                    return Err(Error::invalid("line segment endpoints must be finite"));
                }
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                if !(center.is_finite() && radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid("arc needs a finite center and positive radius"));
                }
                check_angles(*start_angle, *sweep)?;
            }
            Segment::EllipticArc {
                center,
                semi_x,
                semi_y,
                start_angle,
                sweep,
            } => {
                if !(center.is_finite() && *semi_x > 0.0 && *semi_y > 0.0 && semi_x.is_finite() && semi_y.is_finite()) {
                    return Err(Error::invalid("ellipse needs positive finite semi-axes"));
                }
                check_angles(*start_angle, *sweep)?;
            }
            Segment::Repeat { path, .. } => {
                if !path.is_closed() {
                    return Err(Error::invalid("only closed paths can be repeated"));
                }
            }
        }
        Ok(())
    }

    /// Parameters in the open range where the segment crosses the circle
    /// `|x| = radius`, sorted along the segment.
    fn crossings(&self, radius: f64) -> Vec<f64> {
        let (t0, t1) = self.param_range();
        let inside = |t: f64| (t - t0) * (t1 - t) > 0.0;
        let mut out = Vec::new();
        match self {
            Segment::Line { start, end } => {
                let d = *end - *start;
                let a = d.dot(d);
                if a == 0.0 {
                    return out;
                }
                let b = 2.0 * start.dot(d);
                let c = start.dot(*start) - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc > 0.0 {
                    let s = disc.sqrt();
                    // numerically stable pair of roots
                    let q = -0.5 * (b + b.signum() * s);
                    let mut roots = if q != 0.0 { vec![q / a, c / q] } else { vec![0.0] };
                    roots.sort_by(f64::total_cmp);
                    out.extend(roots.into_iter().filter(|&t| inside(t)));
                }
            }
            Segment::Arc {
                center, radius: rho, ..
            } => {
                let cn = center.r();
                if cn == 0.0 {
                    return out;
                }
                let cosv = (radius * radius - cn * cn - rho * rho) / (2.0 * rho * cn);
                if cosv.abs() < 1.0 {
                    let psi = center.phi();
                    let delta = cosv.acos();
                    for base in [psi + delta, psi - delta] {
                        // every representative of base (mod 2 pi) inside the sweep
                        let lo = t0.min(t1);
                        let hi = t0.max(t1);
                        let mut t = base + 2.0 * PI * ((lo - base) / (2.0 * PI)).ceil();
                        while t < hi {
                            if inside(t) {
                                out.push(t);
                            }
                            t += 2.0 * PI;
                        }
                    }
                }
                out.sort_by(|a, b| if t1 >= t0 { a.total_cmp(b) } else { b.total_cmp(a) });
            }
            Segment::EllipticArc { .. } => {
                // sample then bisect the sign changes of |p(t)|^2 - radius^2
                let g = |t: f64| {
                    let p = self.point(t);
                    p.dot(p) - radius * radius
                };
                let n = 512;
                let h = (t1 - t0) / n as f64;
                for k in 0..n {
                    let (mut a, mut b) = (t0 + k as f64 * h, t0 + (k + 1) as f64 * h);
                    let (ga, gb) = (g(a), g(b));
                    if ga == 0.0 && k > 0 {
                        out.push(a);
                        continue;
                    }
                    if ga * gb < 0.0 {
                        let mut fa = ga;
                        for _ in 0..200 {
                            let m = 0.5 * (a + b);
                            let fm = g(m);
                            if fm == 0.0 || (b - a).abs() < 1e-15 * (1.0 + m.abs()) {
                                a = m;
                                b = m;
                                break;
                            }
                            if fa * fm < 0.0 {
                                b = m;
                            } else {
                                a = m;
                                fa = fm;
                            }
                        }
                        out.push(0.5 * (a + b));
                    }
                }
            }
            Segment::Repeat { .. } => {}
        }
        out
    }
}

fn check_angles(start: f64, sweep: f64) -> Result<()> {
    if !(start.is_finite() && sweep.is_finite()) {
        return Err(Error::invalid("arc angles must be finite"));
    }
    if start <= -PI || start > PI {
        return Err(Error::invalid(format!("arc start angle {start} outside (-pi, pi]")));
    }
    if sweep.abs() > 2.0 * PI * (1.0 + 1e-15) {
        return Err(Error::invalid("arc sweeps beyond one turn must use Repeat"));
    }
    Ok(())
}

/// Ordered, connected sequence of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    segments: Vec<Segment>,
}

fn joined(a: Point2, b: Point2) -> bool {
    let scale = 1.0f64.max(a.r()).max(b.r());
    a.distance(b) <= JOIN_TOL * scale
}

impl Path {
    pub fn new(segments: Vec<Segment>) -> Result<Path> {
        if segments.is_empty() {
            return Err(Error::invalid("path needs at least one segment"));
        }
        for s in &segments {
            s.validate()?;
        }
        for (i, w) in segments.windows(2).enumerate() {
            if !joined(w[0].end(), w[1].start()) {
                return Err(Error::invalid(format!(
                    "segments {i} and {} are not connected: {:?} vs {:?}",
                    i + 1,
                    w[0].end(),
                    w[1].start()
                )));
            }
        }
        Ok(Path { segments })
    }

    pub fn line(start: Point2, end: Point2) -> Path {
        Path {
            segments: vec![Segment::Line { start, end }],
        }
    }

    pub fn polyline(points: &[Point2]) -> Result<Path> {
        if points.len() < 2 {
            return Err(Error::invalid("polyline needs two or more points"));
        }
        Path::new(
            points
                .windows(2)
                .map(|w| Segment::Line { start: w[0], end: w[1] })
                .collect(),
        )
    }

    /// Counterclockwise circle starting on its +x side.
    pub fn circle(center: Point2, radius: f64) -> Result<Path> {
        Path::new(vec![Segment::Arc {
            center,
            radius,
            start_angle: 0.0,
            sweep: 2.0 * PI,
        }])
    }

    pub fn arc(center: Point2, radius: f64, start_angle: f64, sweep: f64) -> Result<Path> {
        Path::new(vec![Segment::Arc {
            center,
            radius,
            start_angle,
            sweep,
        }])
    }

    /// Counterclockwise axis-aligned ellipse.
    pub fn ellipse(center: Point2, semi_x: f64, semi_y: f64) -> Result<Path> {
        Path::new(vec![Segment::EllipticArc {
            center,
            semi_x,
            semi_y,
            start_angle: 0.0,
            sweep: 2.0 * PI,
        }])
    }

    /// Counterclockwise axis-aligned square of half-width `half` about `center`.
    pub fn square(center: Point2, half: f64) -> Result<Path> {
        let c = center;
        Path::polyline(&[
            c + Vec2::new(half, -half),
            c + Vec2::new(half, half),
            c + Vec2::new(-half, half),
            c + Vec2::new(-half, -half),
            c + Vec2::new(half, -half),
        ])
    }

    pub fn repeat(self, times: u32) -> Result<Path> {
        Path::new(vec![Segment::Repeat {
            path: Box::new(self),
            times,
        }])
    }

    /// Concatenate; `other` must start where `self` ends.
    pub fn then(mut self, other: Path) -> Result<Path> {
        if !joined(self.end(), other.start()) {
            return Err(Error::invalid(format!(
                "cannot join path ending at {:?} to path starting at {:?}",
                self.end(),
                other.start()
            )));
        }
        self.segments.extend(other.segments);
        Ok(self)
    }

    pub fn reversed(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Point2 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Point2 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn is_closed(&self) -> bool {
        joined(self.start(), self.end())
    }

    /// Number of primitive pieces, counting each repetition.
    fn weight(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Repeat { path, times } => path.weight() * f64::from(*times),
                _ => 1.0,
            })
            .sum::<f64>()
            .max(1.0)
    }
}

/// `∫ A · dx` along `path` with summed absolute error estimate `<= tol`.
pub fn line_integral<F>(field: &F, path: &Path, tol: f64) -> Result<f64>
where
    F: PlanarField + ?Sized,
{
    line_integral_estimate(field, path, tol).map(|e| e.value)
}

pub fn line_integral_estimate<F>(field: &F, path: &Path, tol: f64) -> Result<Estimate>
where
    F: PlanarField + ?Sized,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!(
            "line integral tolerance {tol} must be positive"
        )));
    }
    let kinks = field.kink_radii();
    integrate_path(field, path, tol, &kinks)
}

fn integrate_path<F>(field: &F, path: &Path, tol: f64, kinks: &[f64]) -> Result<Estimate>
where
    F: PlanarField + ?Sized,
{
    let per_piece = tol / path.weight();
    let mut acc = Estimate::ZERO;
    for (i, seg) in path.segments.iter().enumerate() {
        let e = match seg {
            Segment::Repeat { path: sub, times } => {
                if *times == 0 {
                    Estimate::ZERO
                } else {
                    let w = sub.weight();
                    let one = integrate_path(field, sub, per_piece * w, kinks)?;
                    let n = f64::from(*times);
                    Estimate {
                        value: one.value * n,
                        error: one.error * n,
                        evaluations: one.evaluations,
                    }
                }
            }
            _ => integrate_segment(field, seg, per_piece, kinks).map_err(|e| e.within(&format!("segment {i}")))?,
        };
        acc.value += e.value;
        acc.error += e.error;
        acc.evaluations += e.evaluations;
    }
    Ok(acc)
}

fn integrate_segment<F>(field: &F, seg: &Segment, tol: f64, kinks: &[f64]) -> Result<Estimate>
where
    F: PlanarField + ?Sized,
{
    let (t0, t1) = seg.param_range();
    let mut points = vec![t0];
    let mut cuts: Vec<f64> = kinks.iter().flat_map(|&r| seg.crossings(r)).collect();
    if t1 >= t0 {
        cuts.sort_by(f64::total_cmp);
    } else {
        cuts.sort_by(|a, b| b.total_cmp(a));
    }
    points.extend(cuts);
    points.push(t1);
    let integrand = |t: f64| -> Result<f64> {
        let a = field.value(seg.point(t))?;
        if !a.is_finite() {
            return Err(Error::NonFinite {
                context: "field on path".into(),
                at: t,
            });
        }
        Ok(a.dot(seg.tangent(t)))
    };
    try_integrate_breakpoints(integrand, &points, Tolerance::absolute(tol))
}

/// Step used when none is given: `1e-5 * max(1, |x|)`.
pub fn default_step(x: Point2) -> f64 {
    1e-5 * x.r().max(1.0)
}

fn stencil_step(x: Point2, h: Option<f64>) -> Result<f64> {
    let h = h.unwrap_or_else(|| default_step(x));
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Stencil {
            x: x.x,
            y: x.y,
            reason: format!("step {h} must be positive"),
        });
    }
    Ok(h)
}

fn stencil_value(v: Result<f64>, at: Point2) -> Result<f64> {
    match v {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::Stencil {
            x: at.x,
            y: at.y,
            reason: format!("non-finite value {v}"),
        }),
        Err(e) => Err(Error::Stencil {
            x: at.x,
            y: at.y,
            reason: e.to_string(),
        }),
    }
}

/// Central-difference gradient of a fallible scalar field.
pub fn try_grad_scalar<F>(f: F, x: Point2, h: Option<f64>) -> Result<Vec2>
where
    F: Fn(Point2) -> Result<f64>,
{
    let h = stencil_step(x, h)?;
    let ex = Vec2::new(h, 0.0);
    let ey = Vec2::new(0.0, h);
    let at = |p: Point2| stencil_value(f(p), p);
    let dx = (at(x + ex)? - at(x - ex)?) / (2.0 * h);
    let dy = (at(x + ey)? - at(x - ey)?) / (2.0 * h);
    Ok(Vec2::new(dx, dy))
}

pub fn grad_scalar<F>(f: F, x: Point2, h: Option<f64>) -> Result<Vec2>
where
    F: Fn(Point2) -> f64,
{
    try_grad_scalar(|p| Ok(f(p)), x, h)
}

fn field_stencil<F>(field: &F, x: Point2, h: Option<f64>) -> Result<(f64, [Vec2; 4])>
where
    F: PlanarField + ?Sized,
{
    let h = stencil_step(x, h)?;
    let pts = [
        x + Vec2::new(h, 0.0),
        x - Vec2::new(h, 0.0),
        x + Vec2::new(0.0, h),
        x - Vec2::new(0.0, h),
    ];
    let mut vals = [Vec2::ZERO; 4];
    for (v, p) in vals.iter_mut().zip(pts) {
        let a = field.value(p);
        let ax = stencil_value(a.clone().map(|a| a.x), p)?;
        let ay = stencil_value(a.map(|a| a.y), p)?;
        *v = Vec2::new(ax, ay);
    }
    Ok((h, vals))
}

/// `∂_x A_y − ∂_y A_x` by central differences.
pub fn curl_z<F>(field: &F, x: Point2, h: Option<f64>) -> Result<f64>
where
    F: PlanarField + ?Sized,
{
    let (h, [xp, xm, yp, ym]) = field_stencil(field, x, h)?;
    Ok((xp.y - xm.y - yp.x + ym.x) / (2.0 * h))
}

/// `∂_x A_x + ∂_y A_y` by central differences.
pub fn divergence<F>(field: &F, x: Point2, h: Option<f64>) -> Result<f64>
where
    F: PlanarField + ?Sized,
{
    let (h, [xp, xm, yp, ym]) = field_stencil(field, x, h)?;
    Ok((xp.x - xm.x + yp.y - ym.y) / (2.0 * h))
}
