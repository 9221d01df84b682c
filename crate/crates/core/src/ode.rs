//! Dormand–Prince 5(4) with adaptive step control. Steps are shortened to land
//! exactly on requested output times, so no interpolation is involved.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: None,
            h_max: None,
            max_steps: 100_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        OdeOptions {
            rtol,
            atol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub stats: OdeStats,
}

fn error_norm(err: &[f64], y: &[f64], y_new: &[f64], opts: &OdeOptions) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction), returning
/// the state at `t0`, at every entry of `outputs`, and at `t_end`.
pub fn dopri5<F>(mut f: F, t0: f64, y0: &[f64], t_end: f64, outputs: &[f64], opts: &OdeOptions) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(t0.is_finite() && t_end.is_finite()) || y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial value problem has non-finite data"));
    }
    if !(opts.rtol > 0.0 && opts.atol >= 0.0) {
        return Err(Error::invalid("integrator tolerances must be positive"));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut targets: Vec<f64> = Vec::with_capacity(outputs.len() + 1);
    let mut last = t0;
    for &t in outputs {
        if dir * (t - last) < 0.0 || dir * (t - t_end) > 0.0 {
            return Err(Error::invalid(format!(
                "output time {t} out of order or outside the interval"
            )));
        }
        if t != last {
            targets.push(t);
        }
        last = t;
    }
    if targets.last() != Some(&t_end) && t_end != t0 {
        targets.push(t_end);
    }

    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut sol = OdeSolution {
        t: vec![t0],
        y: vec![y0.to_vec()],
        stats,
    };
    if targets.is_empty() {
        return Ok(sol);
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut call = |t: f64, y: &[f64], out: &mut [f64], stats: &mut OdeStats| -> Result<()> {
        stats.evaluations += 1;
        f(t, y, out)?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integrator {
                t,
                reason: "right-hand side is not finite".into(),
            });
        }
        Ok(())
    };
    call(t, &y, &mut k[0], &mut stats)?;

    let span = (t_end - t0).abs();
    let h_max = opts.h_max.unwrap_or(span).abs();
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => {
            let d0 = error_norm(&y, &y, &y, opts).max(1e-5);
            let d1 = error_norm(&k[0], &y, &y, opts).max(1e-5);
            (0.01 * d0 / d1).min(h_max)
        }
    };
    h = h.min(h_max).max(1e-12 * span);

    let mut next = 0usize;
    let mut steps = 0usize;
    while next < targets.len() {
        let target = targets[next];
        let remaining = (target - t).abs();
        let h_free = h;
        let mut clipped = false;
        if h >= remaining {
            h = remaining;
            clipped = true;
        }
        if steps >= opts.max_steps {
            return Err(Error::Integrator {
                t,
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        steps += 1;
        let hs = dir * h;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += hs * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            call(t + C[s] * hs, &stage, &mut k[s], &mut stats)?;
        }
        // stage 7 was evaluated at the fifth-order solution
        y_new.copy_from_slice(&stage);
        for i in 0..n {
            err[i] = hs * k.iter().zip(E.iter()).map(|(kj, e)| e * kj[i]).sum::<f64>();
        }
        let en = error_norm(&err, &y, &y_new, opts);
        if !en.is_finite() {
            return Err(Error::Integrator {
                t,
                reason: "error estimate is not finite".into(),
            });
        }
        if en <= 1.0 {
            stats.accepted += 1;
            t = if clipped { target } else { t + hs };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            if clipped {
                sol.t.push(t);
                sol.y.push(y.clone());
                next += 1;
            }
            let fac = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            // a step shortened to hit an output says nothing about the next one
            h = if clipped && fac >= 1.0 { h_free } else { h * fac }.min(h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
            if h < 1e-14 * span.max(t.abs()) {
                return Err(Error::Integrator {
                    t,
                    reason: format!("step size underflow (error norm {en:e})"),
                });
            }
        }
    }
    sol.stats = stats;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = dopri5(
            |_, y, dy| {
                dy[0] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            5.0,
            &[1.0, 2.0],
            &OdeOptions::with_tolerances(1e-10, 1e-12),
        )
        .unwrap();
        assert_eq!(sol.t, vec![0.0, 1.0, 2.0, 5.0]);
        for (t, y) in sol.t.iter().zip(&sol.y) {
            assert!((y[0] - (-t).exp()).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn backward_harmonic_oscillator() {
        let sol = dopri5(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            10.0,
            &[10.0f64.sin(), 10.0f64.cos()],
            0.0,
            &[],
            &OdeOptions::with_tolerances(1e-10, 1e-12),
        )
        .unwrap();
        let y = sol.y.last().unwrap();
        assert!(y[0].abs() < 1e-8 && (y[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quartic_polynomial_is_exact() {
        // fifth-order method integrates a polynomial of degree 4 in t exactly
        let sol = dopri5(
            |t, _, dy| {
                dy[0] = 5.0 * t.powi(4);
                Ok(())
            },
            0.0,
            &[0.0],
            2.0,
            &[],
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((sol.y.last().unwrap()[0] - 32.0).abs() < 1e-12);
    }

    #[test]
    fn reports_bad_rhs_and_outputs() {
        let e = dopri5(
            |t, _, dy| {
                dy[0] = if t > 0.5 { f64::NAN } else { 1.0 };
                Ok(())
            },
            0.0,
            &[0.0],
            1.0,
            &[],
            &OdeOptions::default(),
        );
        assert!(matches!(e, Err(Error::Integrator { .. })));
        let e = dopri5(|_, _, _| Ok(()), 0.0, &[0.0], 1.0, &[0.5, 0.2], &OdeOptions::default());
        assert!(e.is_err());
    }
}
