//! The two local-force accounts of the potential angular momentum: the torque
//! from the induced electric field while the solenoid flux ramps up, and the
//! magnetic Lorentz torque on a charge approaching a finite solenoid.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ode::{dopri5, OdeOptions, OdeStats};
use crate::quadrature::{try_integrate_breakpoints, Tolerance};
use crate::sources::{finite_a_phi, finite_b_z, geometric_breaks, HalfLength, SolenoidSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampShape {
    /// `3u² − 2u³`, continuous first derivative.
    Smoothstep,
    Linear,
}

impl RampShape {
    pub fn name(self) -> &'static str {
        match self {
            RampShape::Smoothstep => "smoothstep",
            RampShape::Linear => "linear",
        }
    }
}

impl std::str::FromStr for RampShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoothstep" => Ok(RampShape::Smoothstep),
            "linear" => Ok(RampShape::Linear),
            other => Err(Error::invalid(format!("unknown ramp shape '{other}'"))),
        }
    }
}

/// `B(t)`: zero for `t <= 0`, `b_final` for `t >= t_f`, monotone in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampProfile {
    pub shape: RampShape,
    pub t_f: f64,
    pub b_final: f64,
}

impl RampProfile {
    pub fn new(shape: RampShape, t_f: f64, b_final: f64) -> Result<Self> {
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(Error::invalid(format!("ramp duration {t_f} must be positive")));
        }
        if !b_final.is_finite() {
            return Err(Error::invalid("ramp target field must be finite"));
        }
        Ok(RampProfile { shape, t_f, b_final })
    }

    pub fn field(&self, t: f64) -> f64 {
        let u = (t / self.t_f).clamp(0.0, 1.0);
        self.b_final
            * match self.shape {
                RampShape::Smoothstep => u * u * (3.0 - 2.0 * u),
                RampShape::Linear => u,
            }
    }

    /// `dB/dt` on the closed interval `[0, t_f]`, zero outside.
    pub fn rate(&self, t: f64) -> f64 {
        if !(0.0..=self.t_f).contains(&t) {
            return 0.0;
        }
        let u = t / self.t_f;
        self.b_final / self.t_f
            * match self.shape {
                RampShape::Smoothstep => 6.0 * u * (1.0 - u),
                RampShape::Linear => 1.0,
            }
    }
}

/// One sample along a scenario. `s` is time for the ramp and radius for the
/// approach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub s: f64,
    pub r: f64,
    pub z: f64,
    pub l_mech: f64,
    pub l_pot: f64,
    pub l_gic: f64,
    /// Drift of the conserved quantity from its initial value.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Name of the independent variable, `"t"` or `"r"`.
    pub variable: &'static str,
    pub rows: Vec<TrajectoryRow>,
    pub stats: OdeStats,
}

impl Trajectory {
    pub fn first(&self) -> &TrajectoryRow {
        &self.rows[0]
    }

    pub fn last(&self) -> &TrajectoryRow {
        &self.rows[self.rows.len() - 1]
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }

    /// Largest departure of `L_gic` from its first value.
    pub fn canonical_drift(&self) -> f64 {
        let g0 = self.first().l_gic;
        self.rows.iter().map(|r| (r.l_gic - g0).abs()).fold(0.0, f64::max)
    }
}

/// Charge held at radius `r_e` while the solenoid field follows `ramp`. The
/// induced field `E_φ = −½ Ḃ R²/r` exerts the torque `e r E_φ`, so
/// `dL_mech/dt = −½ e Ḃ R²`. The run covers `[0, 1.25 t_f]` in `samples`
/// equal steps.
pub fn ramp_scenario(
    r_e: f64,
    spec: &SolenoidSpec,
    ramp: &RampProfile,
    e: f64,
    l_mech0: f64,
    samples: usize,
    rtol: f64,
) -> Result<Trajectory> {
    if !spec.is_infinite() {
        return Err(Error::invalid("the flux ramp needs an infinite solenoid"));
    }
    if !(r_e > spec.radius && r_e.is_finite()) {
        return Err(Error::invalid(format!(
            "charge radius {r_e} must exceed R = {}",
            spec.radius
        )));
    }
    let samples = samples.max(4);
    let radius = spec.radius;
    let t_end = 1.25 * ramp.t_f;
    let times: Vec<f64> = (1..=samples).map(|i| t_end * i as f64 / samples as f64).collect();
    let opts = OdeOptions::with_tolerances(rtol, rtol * 1e-3);
    let torque = |t: f64| -0.5 * e * ramp.rate(t) * radius * radius;

    let (during, after): (Vec<f64>, Vec<f64>) = times.iter().partition(|&&t| t <= ramp.t_f);
    let leg1 = dopri5(
        |t, _, dy| {
            dy[0] = torque(t);
            Ok(())
        },
        0.0,
        &[l_mech0],
        ramp.t_f,
        &during,
        &opts,
    )?;
    let y_tf = leg1.y.last().expect("solution has rows")[0];
    let leg2 = dopri5(
        |_, _, dy| {
            dy[0] = 0.0;
            Ok(())
        },
        ramp.t_f,
        &[y_tf],
        t_end,
        &after,
        &opts,
    )?;

    let l_pot = |t: f64| 0.5 * e * ramp.field(t) * radius * radius;
    let g0 = l_mech0 + l_pot(0.0);
    let mut rows = Vec::with_capacity(samples + 1);
    let mut push = |t: f64, l_mech: f64| {
        let lp = l_pot(t);
        rows.push(TrajectoryRow {
            s: t,
            r: r_e,
            z: 0.0,
            l_mech,
            l_pot: lp,
            l_gic: l_mech + lp,
            residual: l_mech + lp - g0,
        });
    };
    for (t, y) in leg1.t.iter().zip(&leg1.y) {
        push(*t, y[0]);
    }
    for (t, y) in leg2.t.iter().zip(&leg2.y).skip(1) {
        push(*t, y[0]);
    }
    rows.dedup_by(|a, b| a.s == b.s);
    Ok(Trajectory {
        variable: "t",
        rows,
        stats: OdeStats {
            accepted: leg1.stats.accepted + leg2.stats.accepted,
            rejected: leg1.stats.rejected + leg2.stats.rejected,
            evaluations: leg1.stats.evaluations + leg2.stats.evaluations,
        },
    })
}

/// Inputs to the radial approach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approach {
    pub z: f64,
    pub m0: f64,
    pub r_start: f64,
    pub r_end: f64,
    pub e: f64,
    /// Relative tolerance of the radial integration.
    pub rtol: f64,
    pub samples: usize,
}

fn field_tol(spec: &SolenoidSpec, r: f64, power: i32) -> f64 {
    (1e-11 * spec.b0.abs() * spec.radius * spec.radius / r.powi(power)).max(1e-300)
}

/// Integrates `dL_mech/dr = −e r B_z(r, z)` inward from `r_start`, starting
/// from `L_mech = m₀ − e r A_φ`, and reports the conservation residual
/// `m₀ − (L_mech + e r A_φ)` at every sample.
pub fn approach_scenario(spec: &SolenoidSpec, run: &Approach) -> Result<Trajectory> {
    let l = match spec.half_length {
        HalfLength::Finite(l) => l,
        HalfLength::Infinite => return Err(Error::invalid("the radial approach needs a finite solenoid")),
    };
    let Approach {
        z,
        m0,
        r_start,
        r_end,
        e,
        rtol,
        samples,
    } = *run;
    let eps = spec.sheet_epsilon();
    if !(r_end > 0.0 && r_start > r_end && r_start.is_finite()) {
        return Err(Error::invalid(format!(
            "need r_start > r_end > 0, got {r_start} and {r_end}"
        )));
    }
    if r_start < 10.0 * spec.radius.max(l) {
        return Err(Error::invalid(format!(
            "r_start = {r_start} is not far from the solenoid (needs >= {})",
            10.0 * spec.radius.max(l)
        )));
    }
    if z.abs() <= l + eps && r_end <= spec.radius + eps {
        return Err(Error::NearSingular {
            distance: (r_end - spec.radius).abs(),
            minimum: eps,
        });
    }
    let samples = samples.max(2);
    let (s_start, s_end) = (r_start.ln(), r_end.ln());
    let outputs: Vec<f64> = (1..samples)
        .map(|i| s_start + (s_end - s_start) * i as f64 / (samples - 1) as f64)
        .collect();
    let era = |r: f64| -> Result<f64> { Ok(e * r * finite_a_phi(spec, r, z, field_tol(spec, r, 1))?) };
    let l0 = m0 - era(r_start)?;
    let opts = OdeOptions {
        // the torque is concentrated near r ~ max(R, L); cap steps in ln r so
        // no single step can straddle it unseen
        h_max: Some(0.25),
        ..OdeOptions::with_tolerances(rtol, 1e-9 * m0.abs().max(1.0))
    };
    // in s = ln r: dL/ds = −e r² B_z
    let sol = dopri5(
        |s, _, dy| {
            let r = s.exp();
            dy[0] = -e * r * r * finite_b_z(spec, r, z, field_tol(spec, r, 2))?;
            Ok(())
        },
        s_start,
        &[l0],
        s_end,
        &outputs,
        &opts,
    )?;
    let mut rows = Vec::with_capacity(sol.t.len());
    for (i, (s, y)) in sol.t.iter().zip(&sol.y).enumerate() {
        // pin the endpoints to the requested radii exactly
        let r = if i == 0 {
            r_start
        } else if i + 1 == sol.t.len() {
            r_end
        } else {
            s.exp()
        };
        let l_pot = era(r)?;
        rows.push(TrajectoryRow {
            s: r,
            r,
            z,
            l_mech: y[0],
            l_pot,
            l_gic: y[0] + l_pot,
            residual: m0 - (y[0] + l_pot),
        });
    }
    Ok(Trajectory {
        variable: "r",
        rows,
        stats: sol.stats,
    })
}

/// One length in the long-solenoid sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub half_length: f64,
    pub r_start: f64,
    pub l_mech: f64,
    pub l_pot: f64,
    pub residual: f64,
    /// `∫ B_z 2πr dr` over `R < r <= window` in the `z` plane.
    pub exterior_flux: f64,
    /// Exterior field observed at the probe radius.
    pub b_z_probe: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub beta: f64,
    pub m0: f64,
    pub r_probe: f64,
    pub window: f64,
    pub rows: Vec<SweepRow>,
}

impl Sweep {
    /// `|L_pot − β|` and `|L_mech − (m₀ − β)|` both shrink as `L` grows.
    pub fn converges_monotonically(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            (b.l_pot - self.beta).abs() <= (a.l_pot - self.beta).abs()
                && (b.l_mech - (self.m0 - self.beta)).abs() <= (a.l_mech - (self.m0 - self.beta)).abs()
        })
    }
}

/// Settings shared by every run of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub radius: f64,
    pub b0: f64,
    pub z: f64,
    pub m0: f64,
    pub e: f64,
    pub r_probe: f64,
    pub rtol: f64,
    /// Lower bound for the starting radius; each run starts at least
    /// `100·max(R, L)` out.
    pub r_start_min: f64,
}

/// Runs the approach for each half length and records the angular momenta at
/// `r_probe`, plus the exterior return flux inside `10·r_probe`.
pub fn infinite_length_sweep(set: &SweepSettings, lengths: &[f64]) -> Result<Sweep> {
    if lengths.is_empty() {
        return Err(Error::invalid("sweep needs at least one length"));
    }
    let window = 10.0 * set.r_probe;
    let mut rows = Vec::with_capacity(lengths.len());
    for &l in lengths {
        let spec = SolenoidSpec::finite(set.radius, set.b0, l)?;
        let r_start = set.r_start_min.max(100.0 * set.radius.max(l));
        let traj = approach_scenario(
            &spec,
            &Approach {
                z: set.z,
                m0: set.m0,
                r_start,
                r_end: set.r_probe,
                e: set.e,
                rtol: set.rtol,
                samples: 2,
            },
        )
        .map_err(|err| err.within(&format!("sweep at L = {l}")))?;
        let end = traj.last();
        let lo = set.radius + spec.sheet_epsilon();
        let exterior_flux = if window > lo {
            let pts = geometric_breaks(lo, window);
            let mut all = vec![lo];
            all.extend(pts.into_iter().skip(1));
            try_integrate_breakpoints(
                |r| Ok(2.0 * PI * r * finite_b_z(&spec, r, set.z, field_tol(&spec, r, 2))?),
                &all,
                Tolerance::absolute(1e-9 * spec.flux().abs().max(1e-300)),
            )?
            .value
        } else {
            0.0
        };
        rows.push(SweepRow {
            half_length: l,
            r_start,
            l_mech: end.l_mech,
            l_pot: end.l_pot,
            residual: end.residual,
            exterior_flux,
            b_z_probe: finite_b_z(&spec, set.r_probe, set.z, field_tol(&spec, set.r_probe, 2))?,
        });
    }
    Ok(Sweep {
        beta: set.e * set.b0 * PI * set.radius * set.radius / (2.0 * PI),
        m0: set.m0,
        r_probe: set.r_probe,
        window,
        rows,
    })
}
