//! Flat `section.key = value` run configuration. Every key has a default, so an
//! empty file is a complete configuration; unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::RampShape;
use crate::sources::HalfLength;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    Value { line: usize, key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolenoidConfig {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "B0")]
    pub b0: f64,
    /// Half length used for the finite-solenoid columns of the field scan.
    pub half_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub analytic: f64,
    pub quadrature: f64,
    pub ode: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldConfig {
    pub r_max: f64,
    pub samples: usize,
    pub r_flux: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseConfig {
    pub radius: f64,
    pub winding: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HelmholtzConfig {
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DewittConfig {
    pub points: usize,
    pub loops: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OamConfig {
    pub radii: Vec<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceConfig {
    pub x_e: f64,
    pub r_inf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RampConfig {
    pub r_e: f64,
    #[serde(serialize_with = "ser_shape")]
    pub shape: RampShape,
    pub t_f: f64,
    pub samples: usize,
}

fn ser_shape<S: serde::Serializer>(s: &RampShape, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(s.name())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachConfig {
    pub half_length: f64,
    pub z: f64,
    pub m0: f64,
    pub r_start: f64,
    pub r_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub lengths: Vec<f64>,
    pub r_probe: f64,
    pub m0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumConfig {
    pub m: i64,
    pub r: f64,
    pub lengths: Vec<f64>,
    pub k: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: String,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub solenoid: SolenoidConfig,
    pub charge: f64,
    pub seed: u64,
    pub tol: Tolerances,
    pub field: FieldConfig,
    pub phase: PhaseConfig,
    pub helmholtz: HelmholtzConfig,
    pub dewitt: DewittConfig,
    pub oam: OamConfig,
    pub surface: SurfaceConfig,
    pub ramp: RampConfig,
    pub approach: ApproachConfig,
    pub sweep: SweepConfig,
    pub quantum: QuantumConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solenoid: SolenoidConfig {
                radius: 1.0,
                b0: 1.0,
                half_length: Some(1.0),
            },
            charge: -1.0,
            seed: 0,
            tol: Tolerances {
                analytic: 1e-10,
                quadrature: 1e-6,
                ode: 1e-9,
            },
            field: FieldConfig {
                r_max: 6.0,
                samples: 60,
                r_flux: 200.0,
            },
            phase: PhaseConfig {
                radius: 2.0,
                winding: 3,
            },
            helmholtz: HelmholtzConfig {
                radii: vec![0.5, 2.0, 5.0],
            },
            dewitt: DewittConfig {
                points: 20,
                loops: vec![2, 8, 32],
            },
            oam: OamConfig {
                radii: vec![2.0, 5.0, 10.0],
                samples: 100,
            },
            surface: SurfaceConfig {
                x_e: 3.0,
                r_inf: vec![20.0, 50.0, 100.0],
            },
            ramp: RampConfig {
                r_e: 3.0,
                shape: RampShape::Smoothstep,
                t_f: 10.0,
                samples: 50,
            },
            approach: ApproachConfig {
                half_length: 5.0,
                z: 0.0,
                m0: 2.0,
                r_start: 500.0,
                r_end: 1.5,
                samples: 60,
            },
            sweep: SweepConfig {
                lengths: vec![5.0, 20.0, 80.0],
                r_probe: 2.0,
                m0: 1.0,
            },
            quantum: QuantumConfig {
                m: 1,
                r: 2.0,
                lengths: vec![5.0, 20.0, 100.0],
                k: 1.0,
                mass: 1.0,
            },
            output: OutputConfig {
                format: OutputFormat::Csv,
                path: "out".into(),
                precision: 17,
            },
        }
    }
}

fn parse<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: Display,
{
    v.parse::<T>().map_err(|e| ConfigError::Value {
        line,
        key: key.into(),
        reason: e.to_string(),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: Display,
{
    let items: Result<Vec<T>, _> = v.split(',').map(|s| parse(line, key, s.trim())).collect();
    let items = items?;
    if items.is_empty() {
        return Err(ConfigError::Value {
            line,
            key: key.into(),
            reason: "empty list".into(),
        });
    }
    Ok(items)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let Some((k, v)) = t.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: t.into() });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(ConfigError::Syntax { line, text: t.into() });
            }
            if seen.insert(k.to_string(), line).is_some() {
                return Err(ConfigError::Duplicate { line, key: k.into() });
            }
            cfg.set(line, k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "solenoid.R" => self.solenoid.radius = parse(line, key, v)?,
            "solenoid.B0" => self.solenoid.b0 = parse(line, key, v)?,
            "solenoid.half_length" => {
                self.solenoid.half_length = if v == "infinite" {
                    None
                } else {
                    Some(parse(line, key, v)?)
                }
            }
            "charge.e" => self.charge = parse(line, key, v)?,
            "run.seed" => self.seed = parse(line, key, v)?,
            "tol.analytic" => self.tol.analytic = parse(line, key, v)?,
            "tol.quadrature" => self.tol.quadrature = parse(line, key, v)?,
            "tol.ode" => self.tol.ode = parse(line, key, v)?,
            "field.r_max" => self.field.r_max = parse(line, key, v)?,
            "field.samples" => self.field.samples = parse(line, key, v)?,
            "field.r_flux" => self.field.r_flux = parse(line, key, v)?,
            "phase.radius" => self.phase.radius = parse(line, key, v)?,
            "phase.winding" => self.phase.winding = parse(line, key, v)?,
            "helmholtz.radii" => self.helmholtz.radii = parse_list(line, key, v)?,
            "dewitt.points" => self.dewitt.points = parse(line, key, v)?,
            "dewitt.loops" => self.dewitt.loops = parse_list(line, key, v)?,
            "oam.radii" => self.oam.radii = parse_list(line, key, v)?,
            "oam.samples" => self.oam.samples = parse(line, key, v)?,
            "surface.x_e" => self.surface.x_e = parse(line, key, v)?,
            "surface.r_inf" => self.surface.r_inf = parse_list(line, key, v)?,
            "ramp.r_e" => self.ramp.r_e = parse(line, key, v)?,
            "ramp.shape" => self.ramp.shape = parse(line, key, v)?,
            "ramp.t_f" => self.ramp.t_f = parse(line, key, v)?,
            "ramp.samples" => self.ramp.samples = parse(line, key, v)?,
            "approach.half_length" => self.approach.half_length = parse(line, key, v)?,
            "approach.z" => self.approach.z = parse(line, key, v)?,
            "approach.m0" => self.approach.m0 = parse(line, key, v)?,
            "approach.r_start" => self.approach.r_start = parse(line, key, v)?,
            "approach.r_end" => self.approach.r_end = parse(line, key, v)?,
            "approach.samples" => self.approach.samples = parse(line, key, v)?,
            "sweep.lengths" => self.sweep.lengths = parse_list(line, key, v)?,
            "sweep.r_probe" => self.sweep.r_probe = parse(line, key, v)?,
            "sweep.m0" => self.sweep.m0 = parse(line, key, v)?,
            "quantum.m" => self.quantum.m = parse(line, key, v)?,
            "quantum.r" => self.quantum.r = parse(line, key, v)?,
            "quantum.lengths" => self.quantum.lengths = parse_list(line, key, v)?,
            "quantum.k" => self.quantum.k = parse(line, key, v)?,
            "quantum.mass" => self.quantum.mass = parse(line, key, v)?,
            "output.format" => self.output.format = parse(line, key, v)?,
            "output.path" => self.output.path = v.to_string(),
            "output.precision" => self.output.precision = parse(line, key, v)?,
            _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let mut reals: Vec<(&str, f64)> = vec![
            ("solenoid.R", self.solenoid.radius),
            ("solenoid.B0", self.solenoid.b0),
            ("charge.e", self.charge),
            ("tol.analytic", self.tol.analytic),
            ("tol.quadrature", self.tol.quadrature),
            ("tol.ode", self.tol.ode),
            ("field.r_max", self.field.r_max),
            ("field.r_flux", self.field.r_flux),
            ("phase.radius", self.phase.radius),
            ("surface.x_e", self.surface.x_e),
            ("ramp.r_e", self.ramp.r_e),
            ("ramp.t_f", self.ramp.t_f),
            ("approach.half_length", self.approach.half_length),
            ("approach.z", self.approach.z),
            ("approach.m0", self.approach.m0),
            ("approach.r_start", self.approach.r_start),
            ("approach.r_end", self.approach.r_end),
            ("sweep.r_probe", self.sweep.r_probe),
            ("sweep.m0", self.sweep.m0),
            ("quantum.r", self.quantum.r),
            ("quantum.k", self.quantum.k),
            ("quantum.mass", self.quantum.mass),
        ];
        if let Some(l) = self.solenoid.half_length {
            reals.push(("solenoid.half_length", l));
        }
        for (k, v) in &reals {
            if !v.is_finite() {
                return bad(format!("{k} must be finite"));
            }
        }
        for (k, v) in reals.iter().chain(
            self.helmholtz
                .radii
                .iter()
                .chain(&self.oam.radii)
                .chain(&self.surface.r_inf)
                .chain(&self.sweep.lengths)
                .chain(&self.quantum.lengths)
                .map(|v| ("list entry", *v))
                .collect::<Vec<_>>()
                .iter(),
        ) {
            let must_be_positive = !matches!(
                *k,
                "solenoid.B0" | "charge.e" | "approach.z" | "approach.m0" | "sweep.m0"
            );
            if must_be_positive && !(*v > 0.0 && v.is_finite()) {
                return bad(format!("{k} must be positive and finite, got {v}"));
            }
        }
        if !(6..=17).contains(&self.output.precision) {
            return bad(format!("output.precision {} outside 6..=17", self.output.precision));
        }
        if self.field.samples == 0 || self.ramp.samples == 0 || self.approach.samples < 2 || self.oam.samples == 0 {
            return bad("sample counts must be positive (approach needs two)".into());
        }
        if 0.75 * self.phase.radius <= self.solenoid.radius {
            return bad("phase.radius must exceed 4R/3 so every test loop encloses the solenoid".into());
        }
        if self.surface.x_e <= 1.0
            || self.surface.x_e.is_nan()
            || self.surface.r_inf.iter().any(|&r| r <= self.surface.x_e)
        {
            return bad("surface needs 1 < surface.x_e < every surface.r_inf (units of R)".into());
        }
        if self.dewitt.loops.contains(&0) {
            return bad("dewitt.loops entries must be at least 1".into());
        }
        Ok(())
    }

    /// Every key with its resolved value, sorted by key. `output.path` is left
    /// out so results do not depend on where they were written.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("solenoid.R", format!("{}", self.solenoid.radius));
        put("solenoid.B0", format!("{}", self.solenoid.b0));
        put(
            "solenoid.half_length",
            self.solenoid.half_length.map_or("infinite".into(), |l| format!("{l}")),
        );
        put("charge.e", format!("{}", self.charge));
        put("run.seed", format!("{}", self.seed));
        put("tol.analytic", format!("{:e}", self.tol.analytic));
        put("tol.quadrature", format!("{:e}", self.tol.quadrature));
        put("tol.ode", format!("{:e}", self.tol.ode));
        put("field.r_max", format!("{}", self.field.r_max));
        put("field.samples", format!("{}", self.field.samples));
        put("field.r_flux", format!("{}", self.field.r_flux));
        put("phase.radius", format!("{}", self.phase.radius));
        put("phase.winding", format!("{}", self.phase.winding));
        put("helmholtz.radii", list(&self.helmholtz.radii));
        put("dewitt.points", format!("{}", self.dewitt.points));
        put(
            "dewitt.loops",
            self.dewitt
                .loops
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        put("oam.radii", list(&self.oam.radii));
        put("oam.samples", format!("{}", self.oam.samples));
        put("surface.x_e", format!("{}", self.surface.x_e));
        put("surface.r_inf", list(&self.surface.r_inf));
        put("ramp.r_e", format!("{}", self.ramp.r_e));
        put("ramp.shape", self.ramp.shape.name().into());
        put("ramp.t_f", format!("{}", self.ramp.t_f));
        put("ramp.samples", format!("{}", self.ramp.samples));
        put("approach.half_length", format!("{}", self.approach.half_length));
        put("approach.z", format!("{}", self.approach.z));
        put("approach.m0", format!("{}", self.approach.m0));
        put("approach.r_start", format!("{}", self.approach.r_start));
        put("approach.r_end", format!("{}", self.approach.r_end));
        put("approach.samples", format!("{}", self.approach.samples));
        put("sweep.lengths", list(&self.sweep.lengths));
        put("sweep.r_probe", format!("{}", self.sweep.r_probe));
        put("sweep.m0", format!("{}", self.sweep.m0));
        put("quantum.m", format!("{}", self.quantum.m));
        put("quantum.r", format!("{}", self.quantum.r));
        put("quantum.lengths", list(&self.quantum.lengths));
        put("quantum.k", format!("{}", self.quantum.k));
        put("quantum.mass", format!("{}", self.quantum.mass));
        put(
            "output.format",
            match self.output.format {
                OutputFormat::Csv => "csv".into(),
                OutputFormat::Json => "json".into(),
            },
        );
        put("output.precision", format!("{}", self.output.precision));
        m
    }

    pub fn solenoid_half_length(&self) -> HalfLength {
        self.solenoid
            .half_length
            .map_or(HalfLength::Infinite, HalfLength::Finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::parse("# only a comment\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn parses_values_and_lists() {
        let c = RunConfig::parse(
            "solenoid.R = 1.25\nsweep.lengths=5, 10\nsolenoid.half_length=infinite\nramp.shape=linear",
        )
        .unwrap();
        assert_eq!(c.solenoid.radius, 1.25);
        assert_eq!(c.sweep.lengths, vec![5.0, 10.0]);
        assert_eq!(c.solenoid.half_length, None);
        assert_eq!(c.ramp.shape, RampShape::Linear);
    }

    #[test]
    fn strictness() {
        assert!(matches!(
            RunConfig::parse("solenoid.radius=1"),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("charge.e=1\ncharge.e=2"),
            Err(ConfigError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(RunConfig::parse("charge.e"), Err(ConfigError::Syntax { .. })));
        assert!(matches!(
            RunConfig::parse("charge.e=abc"),
            Err(ConfigError::Value { .. })
        ));
        assert!(matches!(
            RunConfig::parse("solenoid.R=-1"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            RunConfig::parse("solenoid.B0=inf"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            RunConfig::parse("output.precision=20"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn echo_round_trips() {
        let c = RunConfig::parse("solenoid.B0=0.5\nsurface.r_inf=20,100").unwrap();
        let text: String = c.echo().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
    }
}
