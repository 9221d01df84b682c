//! One runner per subcommand. Each turns the configuration into tables,
//! observables and checks; numerical failures carry the operation that failed.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::config::RunConfig;
use super::output::{Check, ScenarioResult, Table};
use crate::dewitt::{dewitt_potential, loop_gauge_correspondence, PathFamily};
use crate::dynamics::{
    approach_scenario, infinite_length_sweep, ramp_scenario, Approach, RampProfile, RampShape, SweepSettings,
};
use crate::geometry::{curl_z, divergence, Path, Point2, Vec2};
use crate::helmholtz::{
    apply_gauge, longitudinal_part, static_probe_points, static_reduction_check, stream_function, transverse_from_b_2d,
    CompactScalarField,
};
use crate::observables::{ab_phase, beta, ledger, phase_oam_relation, surface_terms};
use crate::quantum::{alpha_exponent, bessel_j, eigenmode_value, integer_flux_degeneracy, EigenMode};
use crate::sources::{
    eval_b_infinite, far_field_asymptote, finite_a_phi, finite_b_z, finite_cylindrical, net_flux_z0, GaugeField,
    HalfLength, SolenoidSpec,
};
use crate::Error;

#[derive(Debug, Error)]
#[error("{operation}: {source}")]
pub struct StepError {
    pub operation: String,
    #[source]
    pub source: Error,
}

pub type Run<T> = std::result::Result<T, StepError>;

trait Context<T> {
    fn ctx(self, operation: &str) -> Run<T>;
}

impl<T> Context<T> for crate::Result<T> {
    fn ctx(self, operation: &str) -> Run<T> {
        self.map_err(|source| StepError {
            operation: operation.to_string(),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Field,
    Phase,
    Helmholtz,
    Dewitt,
    Oam,
    Surface,
    Ramp,
    Approach,
    Sweep,
    Quantum,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Field,
        Scenario::Phase,
        Scenario::Helmholtz,
        Scenario::Dewitt,
        Scenario::Oam,
        Scenario::Surface,
        Scenario::Ramp,
        Scenario::Approach,
        Scenario::Sweep,
        Scenario::Quantum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Field => "field",
            Scenario::Phase => "phase",
            Scenario::Helmholtz => "helmholtz",
            Scenario::Dewitt => "dewitt",
            Scenario::Oam => "oam",
            Scenario::Surface => "surface",
            Scenario::Ramp => "ramp",
            Scenario::Approach => "approach",
            Scenario::Sweep => "sweep",
            Scenario::Quantum => "quantum",
        }
    }

    /// Each scenario draws from its own ChaCha stream, so results do not
    /// depend on which other scenarios run or in what order.
    fn rng(self, seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self as u64 + 1);
        rng
    }

    pub fn run(self, cfg: &RunConfig) -> Run<ScenarioResult> {
        let started = Instant::now();
        let mut res = ScenarioResult::new(self.name(), cfg.echo(), cfg.seed);
        let mut rng = self.rng(cfg.seed);
        match self {
            Scenario::Field => field(cfg, &mut res),
            Scenario::Phase => phase(cfg, &mut res),
            Scenario::Helmholtz => helmholtz(cfg, &mut res),
            Scenario::Dewitt => dewitt(cfg, &mut res, &mut rng),
            Scenario::Oam => oam(cfg, &mut res, &mut rng),
            Scenario::Surface => surface(cfg, &mut res),
            Scenario::Ramp => ramp(cfg, &mut res),
            Scenario::Approach => approach(cfg, &mut res),
            Scenario::Sweep => sweep(cfg, &mut res),
            Scenario::Quantum => quantum(cfg, &mut res),
        }?;
        res.wall_clock_s = started.elapsed().as_secs_f64();
        Ok(res)
    }
}

fn infinite(cfg: &RunConfig) -> Run<SolenoidSpec> {
    SolenoidSpec::infinite(cfg.solenoid.radius, cfg.solenoid.b0).ctx("solenoid")
}

fn finite(cfg: &RunConfig, l: f64) -> Run<SolenoidSpec> {
    SolenoidSpec::finite(cfg.solenoid.radius, cfg.solenoid.b0, l).ctx("finite solenoid")
}

/// Uniform point in the annulus `lo <= r <= hi`, kept at least `gap` away
/// from the circle `r = avoid`.
fn annulus_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64, avoid: f64, gap: f64) -> Point2 {
    loop {
        let r = rng.gen_range(lo..hi);
        let phi = rng.gen_range(-PI..PI);
        if (r - avoid).abs() > gap {
            return Point2::from_polar(r, phi);
        }
    }
}

fn field(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let spec = infinite(cfg)?;
    let radius = spec.radius;
    let tol = cfg.tol.analytic;
    let eps = spec.sheet_epsilon();
    let fin = match cfg.solenoid.half_length {
        Some(l) => Some(finite(cfg, l)?),
        None => None,
    };

    let mut cols = vec!["r", "a_phi_infinite", "b_z_infinite"];
    if fin.is_some() {
        cols.extend(["a_phi_finite", "b_z_finite"]);
    }
    let mut profile = Table::new("profile", &cols);
    let sym = GaugeField::symmetric(&spec).ctx("symmetric gauge")?;
    let n = cfg.field.samples;
    for i in 0..n {
        // midpoints keep the grid off r = 0
        let r = (i as f64 + 0.5) * cfg.field.r_max / n as f64;
        if (r - radius).abs() <= 10.0 * eps {
            continue;
        }
        let x = Point2::new(r, 0.0);
        let mut row = vec![
            r.into(),
            sym.eval(x).ctx("symmetric gauge")?.y.into(),
            eval_b_infinite(x, &spec).ctx("infinite field")?.into(),
        ];
        if let Some(f) = &fin {
            let c = finite_cylindrical(f, r, 0.0, tol).ctx("finite solenoid field")?;
            row.extend([c.a_phi.into(), c.b_z.into()]);
        }
        profile.push(row);
    }
    res.tables.push(profile);

    // curl A = B and div A = 0 off the sheet, in both gauges
    let gauges = [
        ("symmetric", GaugeField::symmetric(&spec).ctx("symmetric gauge")?),
        ("landau2", GaugeField::landau2(&spec).ctx("landau2 gauge")?),
    ];
    let probes = [0.3, 0.7, 1.5, 3.0].map(|k| Point2::from_polar(k * radius, 0.9));
    let mut curl_err = 0.0f64;
    let mut div_err = 0.0f64;
    for (_, a) in &gauges {
        for &x in &probes {
            let c = curl_z(a, x, None).ctx("numeric curl")?;
            curl_err = curl_err.max((c - eval_b_infinite(x, &spec).ctx("infinite field")?).abs());
        }
    }
    for &x in &probes {
        div_err = div_err.max(divergence(&gauges[0].1, x, None).ctx("numeric divergence")?.abs());
    }
    res.check(Check::below("curl_a_equals_b", curl_err, 1e-6 * spec.b0.abs().max(1.0)));
    res.check(Check::below(
        "symmetric_gauge_divergence_free",
        div_err,
        1e-6 * spec.b0.abs().max(1.0),
    ));

    // centre of a long solenoid: B0 L / sqrt(L² + R²)
    let l10 = finite(cfg, 10.0 * radius)?;
    let centre = finite_b_z(&l10, 0.0, 0.0, tol).ctx("on-axis field")?;
    let l = 10.0 * radius;
    let want = spec.b0 * l / (l * l + radius * radius).sqrt();
    res.observe("b_z_centre_l10", centre);
    res.check(Check::within(
        "on_axis_centre_field",
        centre,
        want,
        1e-8 * spec.b0.abs().max(1e-300),
    ));

    let Some(f) = fin else {
        return Ok(());
    };
    let HalfLength::Finite(l) = f.half_length else {
        unreachable!()
    };
    let scale = radius.max(l);
    let mut far = Table::new("far", &["r", "a_phi", "a_phi_asymptote", "b_z", "b_z_asymptote"]);
    let mut at_100 = None;
    for k in [5.0, 10.0, 20.0, 50.0, 100.0, 200.0] {
        let r = k * scale;
        let t = tol * (radius / r).powi(3);
        let c = finite_cylindrical(&f, r, 0.0, t).ctx("far field")?;
        let (a_as, b_as) = far_field_asymptote(&f, r).ctx("far-field asymptote")?;
        far.push(vec![r.into(), c.a_phi.into(), a_as.into(), c.b_z.into(), b_as.into()]);
        if k == 100.0 {
            at_100 = Some((c, a_as, b_as));
        }
    }
    res.tables.push(far);
    let (c, a_as, b_as) = at_100.expect("r = 100 max(R, L) is on the grid");
    let rel = |v: f64, w: f64| if w == 0.0 { v.abs() } else { (v - w).abs() / w.abs() };
    res.check(Check::below("far_a_phi_relative", rel(c.a_phi, a_as), 0.05));
    res.check(Check::below("far_b_z_relative", rel(c.b_z, b_as), 0.05));

    let flux = net_flux_z0(&f, cfg.field.r_flux, cfg.tol.quadrature).ctx("z = 0 flux")?;
    res.observe("flux_truncated", flux.truncated);
    res.observe("flux_tail", flux.tail);
    res.observe("flux_net", flux.net());
    let limit = 1e-2 * spec.flux().abs();
    res.check(Check::below("flux_within_r_flux", flux.truncated, limit));
    res.check(Check::below("flux_net_with_tail", flux.net(), limit));
    Ok(())
}

fn phase(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let spec = infinite(cfg)?;
    let e = cfg.charge;
    let rho = cfg.phase.radius;
    let tol = cfg.tol.analytic;
    let want = e * spec.flux();
    let o = Point2::ZERO;
    let path = |p: crate::Result<Path>| p.ctx("loop construction");

    let sym = GaugeField::symmetric(&spec).ctx("symmetric gauge")?;
    let l2 = GaugeField::landau2(&spec).ctx("landau2 gauge")?;
    // a smooth single-valued χ on top of the symmetric gauge
    let shifted = apply_gauge(&sym, |p| 0.3 * (p.x * 0.7).sin() * (p.y * 1.1).cos() + 0.05 * p.x * p.y);
    let k = cfg.phase.winding;

    let circle = path(Path::circle(o, rho))?;
    let mut cases: Vec<(&str, &GaugeField, &str, u32, Path, f64, f64)> = vec![
        ("symmetric", &sym, "circle", 1, circle.clone(), want, 1e-8),
        ("landau2", &l2, "circle", 1, circle.clone(), want, 1e-8),
        ("transformed", &shifted, "circle", 1, circle.clone(), want, 1e-6),
    ];
    for (name, a) in [("symmetric", &sym), ("landau2", &l2)] {
        cases.push((name, a, "square", 1, path(Path::square(o, rho))?, want, 1e-6));
        cases.push((
            name,
            a,
            "ellipse",
            1,
            path(Path::ellipse(o, 1.5 * rho, 0.75 * rho))?,
            want,
            1e-6,
        ));
        cases.push((
            name,
            a,
            "circle",
            k,
            path(circle.clone().repeat(k))?,
            f64::from(k) * want,
            1e-6 * f64::from(k),
        ));
        cases.push((name, a, "reversed_circle", 1, circle.reversed(), -want, 1e-8));
        cases.push((
            name,
            a,
            "outside_circle",
            1,
            path(Path::circle(Point2::new(3.0 * rho, 0.0), 0.5 * rho))?,
            0.0,
            1e-8,
        ));
    }

    let mut t = Table::new("phase", &["gauge", "loop", "winding", "phase", "expected", "error"]);
    for (gauge, a, shape, w, p, expect, tolerance) in cases {
        let ph = ab_phase(a, &p, e, tol).ctx(&format!("phase over {shape} in {gauge} gauge"))?;
        t.push(vec![
            gauge.into(),
            shape.into(),
            f64::from(w).into(),
            ph.into(),
            expect.into(),
            (ph - expect).into(),
        ]);
        res.check(Check::within(
            format!("phase_{gauge}_{shape}_w{w}"),
            ph,
            expect,
            tolerance,
        ));
    }
    res.tables.push(t);
    res.observe("e_flux", want);
    Ok(())
}

fn helmholtz(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let spec = infinite(cfg)?;
    let radius = spec.radius;
    let tol = cfg.tol.quadrature;
    let sym = GaugeField::symmetric(&spec).ctx("symmetric gauge")?;
    let l2 = GaugeField::landau2(&spec).ctx("landau2 gauge")?;
    let bz = CompactScalarField::curl_of(&sym).ctx("curl of symmetric gauge")?;

    let mut rec = Table::new(
        "recovery",
        &["r", "phi", "a_x", "a_y", "exact_x", "exact_y", "relative_error"],
    );
    for &r in &cfg.helmholtz.radii {
        let mut worst = 0.0f64;
        for phi in [0.4, 2.5, -1.9] {
            let x = Point2::from_polar(r * radius, phi);
            let a = transverse_from_b_2d(&bz, x, tol).ctx("transverse part from B")?;
            let exact = sym.eval(x).ctx("symmetric gauge")?;
            let err = (a - exact).norm() / exact.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(err);
            rec.push(vec![
                (r * radius).into(),
                phi.into(),
                a.x.into(),
                a.y.into(),
                exact.x.into(),
                exact.y.into(),
                err.into(),
            ]);
        }
        res.check(Check::below(format!("transverse_recovery_r{r}"), worst, 1e-3));
    }
    res.tables.push(rec);

    let mut lon = Table::new("longitudinal", &["x", "y", "al_x", "al_y", "grad_x", "grad_y", "error"]);
    let mut worst = 0.0f64;
    for &r in &cfg.helmholtz.radii {
        for phi in [0.4, 2.5, -1.9] {
            let x = Point2::from_polar(r * radius, phi);
            let al = longitudinal_part(&l2, x, tol).ctx("landau2 longitudinal part")?;
            let g = Vec2::new(0.5 * spec.b0 * x.y, 0.5 * spec.b0 * x.x);
            let err = al.max_abs_diff(g);
            worst = worst.max(err);
            lon.push(vec![
                x.x.into(),
                x.y.into(),
                al.x.into(),
                al.y.into(),
                g.x.into(),
                g.y.into(),
                err.into(),
            ]);
        }
    }
    res.tables.push(lon);
    res.check(Check::below("landau2_longitudinal_is_gradient", worst, 2e-3));

    let st = static_reduction_check(&sym, &static_probe_points(radius), tol).ctx("static reduction")?;
    res.check(Check::below("static_time_term", st.time_term, 0.0));
    res.check(Check::below("static_reduction_residual", st.residual, 2e-3));
    let zero = static_reduction_check(&GaugeField::zero(), &static_probe_points(radius), tol)
        .ctx("static reduction of zero field")?;
    res.check(Check::below("zero_field_reduction", zero.residual, 0.0));

    // ψ(x) − ψ(y) does not depend on the reference radius
    let (x, y) = (
        Point2::new(0.3 * radius, -0.2 * radius),
        Point2::new(2.0 * radius, 0.5 * radius),
    );
    let diff = |r0: f64| -> Run<f64> {
        Ok(stream_function(&bz, x, r0, tol).ctx("stream function")?
            - stream_function(&bz, y, r0, tol).ctx("stream function")?)
    };
    let (d1, d10) = (diff(radius)?, diff(10.0 * radius)?);
    res.observe("stream_difference_r0_r", d1);
    res.observe("stream_difference_r0_10r", d10);
    res.check(Check::within("stream_reference_independence", d10, d1, 10.0 * tol));
    Ok(())
}

fn dewitt(cfg: &RunConfig, res: &mut ScenarioResult, rng: &mut ChaCha8Rng) -> Run<()> {
    let spec = infinite(cfg)?;
    let radius = spec.radius;
    let tol = cfg.tol.quadrature;
    let sym = GaugeField::symmetric(&spec).ctx("symmetric gauge")?;
    let l2 = GaugeField::landau2(&spec).ctx("landau2 gauge")?;

    let mut t = Table::new(
        "radial",
        &["x", "y", "a_x", "a_y", "symmetric_x", "symmetric_y", "error"],
    );
    let mut worst = 0.0f64;
    for _ in 0..cfg.dewitt.points {
        let x = annulus_point(rng, 0.1 * radius, 5.0 * radius, radius, 0.02 * radius);
        let a = dewitt_potential(&l2, PathFamily::RadialStraight, x, tol).ctx("radial DeWitt potential")?;
        let s = sym.eval(x).ctx("symmetric gauge")?;
        let err = a.max_abs_diff(s);
        worst = worst.max(err);
        t.push(vec![
            x.x.into(),
            x.y.into(),
            a.x.into(),
            a.y.into(),
            s.x.into(),
            s.y.into(),
            err.into(),
        ]);
    }
    res.tables.push(t);
    res.check(Check::below("radial_from_landau2_is_symmetric", worst, 1e-4));

    let mut t = Table::new(
        "polygonal",
        &["x", "y", "a_x", "a_y", "landau2_x", "landau2_y", "error"],
    );
    let mut worst = 0.0f64;
    for _ in 0..cfg.dewitt.points {
        let x = annulus_point(rng, 0.05 * radius, 0.95 * radius, radius, 0.0);
        let a = dewitt_potential(&sym, PathFamily::PolygonalXY, x, tol).ctx("polygonal DeWitt potential")?;
        let w = l2.eval(x).ctx("landau2 gauge")?;
        let err = a.max_abs_diff(w);
        worst = worst.max(err);
        t.push(vec![
            x.x.into(),
            x.y.into(),
            a.x.into(),
            a.y.into(),
            w.x.into(),
            w.y.into(),
            err.into(),
        ]);
    }
    res.tables.push(t);
    res.check(Check::below("polygonal_from_symmetric_is_landau2_inside", worst, 1e-4));

    let mut t = Table::new(
        "loops",
        &[
            "n",
            "x",
            "y",
            "difference_x",
            "difference_y",
            "expected_x",
            "expected_y",
            "residual",
            "loop_integral",
        ],
    );
    for x in [
        Point2::new(1.5 * radius, 0.6 * radius),
        Point2::new(2.0 * radius, radius),
    ] {
        let mut diffs = Vec::new();
        for &n in &cfg.dewitt.loops {
            let upper = (2.0 * f64::from(n)).sqrt() * radius;
            if x.r() >= upper {
                continue;
            }
            let rep = loop_gauge_correspondence(&sym, n, x, tol).ctx(&format!("loop correspondence n = {n}"))?;
            t.push(vec![
                f64::from(n).into(),
                x.x.into(),
                x.y.into(),
                rep.difference.x.into(),
                rep.difference.y.into(),
                rep.expected.x.into(),
                rep.expected.y.into(),
                rep.residual.into(),
                rep.loop_integral.into(),
            ]);
            res.check(Check::below(
                format!("loop_correspondence_n{n}_x{}_{}", x.x, x.y),
                rep.residual,
                1e-4,
            ));
            diffs.push(rep.difference);
        }
        let spread = diffs
            .iter()
            .flat_map(|a| diffs.iter().map(move |b| a.max_abs_diff(*b)))
            .fold(0.0, f64::max);
        res.check(Check::below(
            format!("loop_n_independence_x{}_{}", x.x, x.y),
            spread,
            1e-4,
        ));
    }
    res.tables.push(t);

    // Ã is unchanged by a random single-valued gauge transformation
    let (c1, c2, k1, k2): (f64, f64, f64, f64) = (
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(0.2..1.5),
        rng.gen_range(0.2..1.5),
    );
    let moved = apply_gauge(&sym, move |p| c1 * (k1 * p.x).sin() * (k2 * p.y).cos() + c2 * p.x * p.y);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = annulus_point(rng, 0.1 * radius, 4.0 * radius, radius, 0.05 * radius);
        let a =
            dewitt_potential(&moved, PathFamily::RadialStraight, x, tol).ctx("DeWitt potential of shifted gauge")?;
        let b = dewitt_potential(&sym, PathFamily::RadialStraight, x, tol).ctx("DeWitt potential")?;
        worst = worst.max(a.max_abs_diff(b));
    }
    res.check(Check::below("random_gauge_invariance", worst, 1e-4));
    Ok(())
}

fn oam(cfg: &RunConfig, res: &mut ScenarioResult, rng: &mut ChaCha8Rng) -> Run<()> {
    let spec = infinite(cfg)?;
    let radius = spec.radius;
    let e = cfg.charge;
    let sym = GaugeField::symmetric(&spec).ctx("symmetric gauge")?;
    let l2 = GaugeField::landau2(&spec).ctx("landau2 gauge")?;

    let mut t = Table::new("relation", &["r", "phase", "l_pot", "two_pi_l_pot", "residual"]);
    for &r in &cfg.oam.radii {
        let rep = phase_oam_relation(&sym, r * radius, e, cfg.tol.analytic).ctx("phase and OAM relation")?;
        t.push(vec![
            rep.radius.into(),
            rep.phase.into(),
            rep.l_pot.into(),
            (2.0 * PI * rep.l_pot).into(),
            rep.residual.into(),
        ]);
        res.check(Check::below(format!("phase_equals_2pi_l_pot_r{r}"), rep.residual, 1e-8));
    }
    res.tables.push(t);

    let mut t = Table::new(
        "ledger",
        &["gauge", "x", "y", "p_x", "p_y", "l_mech", "l_pot", "l_gic", "residual"],
    );
    let mut worst = [0.0f64; 2];
    for _ in 0..cfg.oam.samples {
        let x = annulus_point(rng, 0.1 * radius, 5.0 * radius, radius, 0.02 * radius);
        let p = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        for (i, (name, a)) in [("symmetric", &sym), ("landau2", &l2)].into_iter().enumerate() {
            let l = ledger(x, p, a, e, cfg.tol.quadrature).ctx(&format!("OAM ledger in {name} gauge"))?;
            worst[i] = worst[i].max(l.identity_residual().abs());
            t.push(vec![
                name.into(),
                x.x.into(),
                x.y.into(),
                p.x.into(),
                p.y.into(),
                l.l_mech.into(),
                l.l_pot.into(),
                l.l_gic.into(),
                l.identity_residual().into(),
            ]);
        }
    }
    res.tables.push(t);
    res.check(Check::below("ledger_identity_symmetric", worst[0], 2e-3));
    res.check(Check::below("ledger_identity_landau2", worst[1], 2e-3));
    res.observe("beta", beta(&spec, e));
    Ok(())
}

fn surface(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let spec = infinite(cfg)?;
    let e = cfg.charge;
    let x_e = Point2::new(cfg.surface.x_e * spec.radius, 0.0);
    let mut t = Table::new(
        "surface",
        &[
            "r_inf",
            "s1",
            "s2",
            "s3",
            "l_pot",
            "s1_plus_l_pot",
            "s2_plus_s3",
            "lhs_residual",
            "gauss_outer",
            "gauss_inner",
        ],
    );
    let decisive = cfg.surface.r_inf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for &r_inf in &cfg.surface.r_inf {
        let s = surface_terms(x_e, &spec, e, r_inf * spec.radius, cfg.tol.quadrature)
            .ctx(&format!("surface terms at r_inf = {r_inf}"))?;
        t.push(vec![
            r_inf.into(),
            s.s1.into(),
            s.s2.into(),
            s.s3.into(),
            s.l_pot.into(),
            (s.s1 + s.l_pot).into(),
            (s.s2 + s.s3).into(),
            s.lhs_residual.into(),
            s.gauss_outer.into(),
            s.gauss_inner.into(),
        ]);
        // only the outermost circle is asserted; the rest show the trend
        let grade = |c: Check| if r_inf == decisive { c } else { c.warn() };
        res.check(grade(Check::below(
            format!("s1_cancels_l_pot_r{r_inf}"),
            s.s1 + s.l_pot,
            0.01 * s.l_pot.abs(),
        )));
        res.check(grade(Check::below(
            format!("s2_cancels_s3_r{r_inf}"),
            s.s2 + s.s3,
            0.01 * s.s2.abs(),
        )));
        res.check(Check::within(
            format!("gauss_outer_r{r_inf}"),
            s.gauss_outer,
            e,
            10.0 * cfg.tol.quadrature,
        ));
        res.check(Check::below(
            format!("gauss_inner_r{r_inf}"),
            s.gauss_inner,
            10.0 * cfg.tol.quadrature,
        ));
    }
    res.tables.push(t);
    Ok(())
}

fn ramp(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let spec = infinite(cfg)?;
    let e = cfg.charge;
    let b0 = cfg.solenoid.b0;
    let target = -beta(&spec, e);
    let run = |shape: RampShape, t_f: f64, b_final: f64, samples: usize| {
        let profile = RampProfile::new(shape, t_f, b_final).ctx("ramp profile")?;
        ramp_scenario(
            cfg.ramp.r_e * spec.radius,
            &spec,
            &profile,
            e,
            0.0,
            samples,
            cfg.tol.ode,
        )
        .ctx(&format!("{} ramp over t_f = {t_f}", shape.name()))
    };

    let main = run(cfg.ramp.shape, cfg.ramp.t_f, b0, cfg.ramp.samples)?;
    let mut t = Table::new("ramp", &["t", "r", "l_mech", "l_pot", "l_gic", "residual"]);
    for r in &main.rows {
        t.push(vec![
            r.s.into(),
            r.r.into(),
            r.l_mech.into(),
            r.l_pot.into(),
            r.l_gic.into(),
            r.residual.into(),
        ]);
    }
    res.tables.push(t);
    let delta = main.last().l_mech - main.first().l_mech;
    res.observe("delta_l_mech", delta);
    res.observe("delta_l_pot", main.last().l_pot - main.first().l_pot);
    res.check(Check::within("delta_l_mech_equals_minus_beta", delta, target, 1e-8));
    res.check(Check::below("l_gic_drift", main.canonical_drift(), 1e-8));

    let mut t = Table::new(
        "variants",
        &["shape", "t_f", "b_final", "delta_l_mech", "expected", "l_gic_drift"],
    );
    let mut variants = vec![];
    for shape in [RampShape::Smoothstep, RampShape::Linear] {
        for t_f in [1.0, 10.0, 100.0] {
            variants.push((shape, t_f, b0, target));
        }
    }
    variants.push((cfg.ramp.shape, cfg.ramp.t_f, 0.5 * b0, 0.5 * target));
    for (shape, t_f, b_final, expected) in variants {
        let tr = run(shape, t_f, b_final, 20)?;
        let d = tr.last().l_mech - tr.first().l_mech;
        t.push(vec![
            shape.name().into(),
            t_f.into(),
            b_final.into(),
            d.into(),
            expected.into(),
            tr.canonical_drift().into(),
        ]);
        let tag = if b_final == b0 { "full" } else { "half" };
        res.check(Check::within(
            format!("delta_l_mech_{}_{tag}_tf{t_f}", shape.name()),
            d,
            expected,
            1e-8,
        ));
        res.check(Check::below(
            format!("l_gic_drift_{}_{tag}_tf{t_f}", shape.name()),
            tr.canonical_drift(),
            1e-8,
        ));
    }
    res.tables.push(t);
    Ok(())
}

fn approach(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let a = &cfg.approach;
    let spec = finite(cfg, a.half_length)?;
    let run = Approach {
        z: a.z,
        m0: a.m0,
        r_start: a.r_start * spec.radius,
        r_end: a.r_end * spec.radius,
        e: cfg.charge,
        rtol: cfg.tol.ode,
        samples: a.samples,
    };
    let tr = approach_scenario(&spec, &run).ctx("radial approach")?;
    let mut t = Table::new("approach", &["r", "z", "l_mech", "l_pot", "l_gic", "residual"]);
    for r in &tr.rows {
        t.push(vec![
            r.r.into(),
            r.z.into(),
            r.l_mech.into(),
            r.l_pot.into(),
            r.l_gic.into(),
            r.residual.into(),
        ]);
    }
    res.tables.push(t);
    res.observe("l_mech_start", tr.first().l_mech);
    res.observe("l_mech_end", tr.last().l_mech);
    res.observe("l_pot_end", tr.last().l_pot);
    res.observe("ode_steps", tr.stats.accepted as f64);
    res.check(Check::below("m0_conservation", tr.max_residual(), 1e-3));
    // far out, A_φ falls like 1/r², so L_pot = e r A_φ is O(1/r)
    let (a_far, _) = far_field_asymptote(&spec, run.r_start).ctx("far-field asymptote")?;
    let bound = 2.0 * (cfg.charge * run.r_start * a_far).abs();
    res.check(Check::within("l_mech_start_near_m0", tr.first().l_mech, a.m0, bound));
    Ok(())
}

fn sweep(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let set = SweepSettings {
        radius: cfg.solenoid.radius,
        b0: cfg.solenoid.b0,
        z: 0.0,
        m0: cfg.sweep.m0,
        e: cfg.charge,
        r_probe: cfg.sweep.r_probe * cfg.solenoid.radius,
        rtol: cfg.tol.ode,
        r_start_min: cfg.approach.r_start * cfg.solenoid.radius,
    };
    let mut lengths: Vec<f64> = cfg.sweep.lengths.iter().map(|l| l * cfg.solenoid.radius).collect();
    lengths.sort_by(f64::total_cmp);
    let sw = infinite_length_sweep(&set, &lengths).ctx("infinite-length sweep")?;
    let mut t = Table::new(
        "sweep",
        &[
            "half_length",
            "r_start",
            "l_mech",
            "l_pot",
            "residual",
            "exterior_flux",
            "b_z_probe",
        ],
    );
    for r in &sw.rows {
        t.push(vec![
            r.half_length.into(),
            r.r_start.into(),
            r.l_mech.into(),
            r.l_pot.into(),
            r.residual.into(),
            r.exterior_flux.into(),
            r.b_z_probe.into(),
        ]);
        res.check(Check::below(
            format!("m0_conservation_l{}", r.half_length),
            r.residual,
            1e-3,
        ));
    }
    res.tables.push(t);
    res.observe("beta", sw.beta);
    let last = sw.rows.last().expect("sweep has rows");
    let mech = sw.m0 - sw.beta;
    res.check(Check::within("l_pot_limit", last.l_pot, sw.beta, 0.02 * sw.beta.abs()));
    res.check(Check::within("l_mech_limit", last.l_mech, mech, 0.02 * mech.abs()));
    res.check(Check::holds("monotone_convergence", sw.converges_monotonically()));
    let shrinking = sw
        .rows
        .windows(2)
        .all(|w| w[1].exterior_flux.abs() <= w[0].exterior_flux.abs());
    res.check(Check::holds("exterior_flux_decreasing", shrinking));
    Ok(())
}

fn quantum(cfg: &RunConfig, res: &mut ScenarioResult) -> Run<()> {
    let spec = infinite(cfg)?;
    let e = cfg.charge;
    let q = &cfg.quantum;
    let b = beta(&spec, e);
    let tol = cfg.tol.analytic;
    let j = |nu: f64, x: f64| bessel_j(nu, x, 1e-3 * tol).ctx(&format!("J_{nu}({x})"));

    let mut t = Table::new("bessel", &["nu", "x", "value", "reference", "error"]);
    let mut worst = 0.0f64;
    for x in [0.3, 2.0, 9.5, 12.0, 30.0, 80.0] {
        let s = (2.0 / (PI * x)).sqrt();
        for (nu, want) in [(0.5, s * x.sin()), (1.5, s * (x.sin() / x - x.cos()))] {
            let v = j(nu, x)?;
            worst = worst.max((v - want).abs());
            t.push(vec![nu.into(), x.into(), v.into(), want.into(), (v - want).into()]);
        }
    }
    res.check(Check::below("bessel_half_integer", worst, 1e-10));
    let mut worst = 0.0f64;
    for nu in [1.0, 1.5, 2.3, 7.2] {
        for x in [0.7, 3.0, 15.0, 40.0] {
            let lhs = j(nu - 1.0, x)? + j(nu + 1.0, x)?;
            let rhs = 2.0 * nu / x * j(nu, x)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    res.check(Check::below("bessel_recurrence", worst, 1e-9));
    let z0 = 2.404_825_557_695_773;
    res.check(Check::below("bessel_j0_first_zero", j(0.0, z0)?, 1e-10));
    res.tables.push(t);

    let mut t = Table::new(
        "alpha",
        &["half_length", "alpha", "m_minus_beta", "oracle", "difference"],
    );
    let r = q.r * spec.radius;
    let target = q.m as f64 - b;
    let longest = q.lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shortest = q.lengths.iter().copied().fold(f64::INFINITY, f64::min);
    for &l in &q.lengths {
        let fin = finite(cfg, l * spec.radius)?;
        let alpha =
            alpha_exponent(q.m, r, 0.0, &fin, e, cfg.tol.quadrature * 1e-3).ctx(&format!("alpha at L = {l}"))?;
        // conservation gives the same exponent from the local potential
        let oracle = q.m as f64 - e * r * finite_a_phi(&fin, r, 0.0, tol).ctx("finite A_phi")?;
        t.push(vec![
            l.into(),
            alpha.into(),
            target.into(),
            oracle.into(),
            (alpha - oracle).into(),
        ]);
        res.check(Check::within(
            format!("alpha_matches_local_potential_l{l}"),
            alpha,
            oracle,
            1e-3,
        ));
        if l == longest {
            res.check(Check::within(
                format!("alpha_limit_l{l}"),
                alpha,
                target,
                0.02 * target.abs(),
            ));
        }
        if l == shortest {
            res.observe("alpha_shortest", alpha);
        }
    }
    res.tables.push(t);

    for (beta_int, n) in [(2.0, 5), (-3.0, 4), (0.0, 3)] {
        res.check(Check::holds(
            format!("integer_flux_degeneracy_beta{beta_int}"),
            integer_flux_degeneracy(beta_int, n) == Some(true),
        ));
    }
    if b.fract() != 0.0 {
        res.check(Check::holds(
            "fractional_flux_not_degenerate",
            integer_flux_degeneracy(b, 3).is_none(),
        ));
    }

    let mode = EigenMode::new(q.m, q.k, q.mass, b).ctx("eigenmode")?;
    let mut t = Table::new("mode", &["r", "re", "im", "modulus"]);
    for i in 0..=40 {
        let rr = 0.25 * i as f64 * spec.radius;
        let v = eigenmode_value(&mode, rr, 0.3, 0.0, tol).ctx("eigenmode value")?;
        t.push(vec![rr.into(), v.re.into(), v.im.into(), v.norm().into()]);
    }
    res.tables.push(t);
    let at = |time: f64| eigenmode_value(&mode, r, 0.3, time, tol).ctx("eigenmode value");
    let drift = (at(1.7 + mode.period())? - at(1.7)?).norm();
    res.observe("mode_period", mode.period());
    res.check(Check::below("mode_periodic_in_time", drift, 1e-9));
    Ok(())
}
