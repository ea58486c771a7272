//! Dormand–Prince 5(4) with adaptive step size.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{norm, powf, sqrt};

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Stop when the state norm exceeds this.
    pub blowup_norm: f64,
    /// Stop before accepting a state with a non-positive coordinate.
    pub require_positive: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: None,
            max_steps: 1_000_000,
            blowup_norm: 1e12,
            require_positive: true,
        }
    }
}

/// Why integration stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// The next step would make coordinate `index` non-positive.
    NonPositive { index: usize, t: f64 },
    /// The norm passed the blow-up threshold; `direction` is the unit state.
    BlowUp { t: f64, direction: Vec<f64> },
    MaxSteps { t: f64 },
    /// The step size fell below `1e-14 · t_end`, typically at a finite-time
    /// singularity.
    StepUnderflow { t: f64, h: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// States at every accepted step, starting with the initial condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step_stats: StepStats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial time")
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of `A`: first same as last).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `ẋ = f(x)` from `t = 0` to `t_end`.
///
/// The local error estimate is the RMS over components of
/// `|x₅ − x₄| / (abs_tol + rel_tol·max(|x|, |x_new|))`; a step is accepted when
/// it is at most 1.
pub fn integrate<F>(mut f: F, x0: &[f64], t_end: f64, opts: &IntegrationOptions) -> Result<Trajectory>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument("t_end must be positive and finite".into()));
    }
    if x0.is_empty() || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("initial state must be finite and non-empty".into()));
    }
    if opts.require_positive {
        if let Some((index, &value)) = x0.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositiveMetric { index, value });
        }
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut k = vec![vec![0.0; n]; 7];
    f(&x, &mut k[0]);
    let mut h = opts
        .initial_step
        .unwrap_or_else(|| initial_step(&x, &k[0], opts))
        .min(t_end);
    let h_min = 1e-14 * t_end;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        step_stats: StepStats::default(),
        termination: Termination::Completed,
    };
    let mut stage = vec![0.0; n];
    let mut x5 = vec![0.0; n];
    while t < t_end {
        if traj.step_stats.accepted >= opts.max_steps {
            traj.termination = Termination::MaxSteps { t };
            return Ok(traj);
        }
        if h < h_min {
            traj.termination = Termination::StepUnderflow { t, h };
            return Ok(traj);
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let acc: f64 = (0..s).map(|j| A[s][j] * k[j][i]).sum();
                stage[i] = x[i] + h * acc;
            }
            f(&stage, &mut k[s]);
        }
        let mut err = 0.0;
        for i in 0..n {
            x5[i] = x[i] + h * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>();
            let x4 = x[i] + h * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>();
            let sc = opts.abs_tol + opts.rel_tol * x[i].abs().max(x5[i].abs());
            let e = (x5[i] - x4) / sc;
            err += e * e;
        }
        let err = sqrt(err / n as f64);
        let finite = err.is_finite() && x5.iter().all(|v| v.is_finite());
        if finite && err <= 1.0 {
            if opts.require_positive {
                if let Some(index) = x5.iter().position(|v| *v <= 0.0) {
                    traj.termination = Termination::NonPositive { index, t };
                    return Ok(traj);
                }
            }
            t = if last { t_end } else { t + h };
            x.copy_from_slice(&x5);
            // First same as last: the final stage is f at the new state.
            k.swap(0, 6);
            traj.times.push(t);
            traj.states.push(x.clone());
            traj.step_stats.accepted += 1;
            let size = norm(&x);
            if size > opts.blowup_norm {
                traj.termination = Termination::BlowUp {
                    t,
                    direction: x.iter().map(|v| v / size).collect(),
                };
                return Ok(traj);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * powf(err, -0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            traj.step_stats.rejected += 1;
            h *= if finite { (0.9 * powf(err, -0.2)).clamp(0.1, 0.9) } else { 0.25 };
        }
    }
    Ok(traj)
}

fn initial_step(x: &[f64], dx: &[f64], opts: &IntegrationOptions) -> f64 {
    let scale: Vec<f64> = x.iter().map(|v| opts.abs_tol + opts.rel_tol * v.abs()).collect();
    let d0 = sqrt(x.iter().zip(&scale).map(|(v, s)| (v / s) * (v / s)).sum::<f64>());
    let d1 = sqrt(dx.iter().zip(&scale).map(|(v, s)| (v / s) * (v / s)).sum::<f64>());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}
