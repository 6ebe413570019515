//! Adiabatic switching functions `f(t)` with `f(0) ~ 0` and `f(T_R) ~ 1`.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Classical oscillator period `2 pi / omega`.
pub const OSCILLATOR_PERIOD: f64 = 2.0 * PI;

/// Period of the ground-state phase, `2 pi / W0` with `W0 = 1/2`.
pub const GROUND_PHASE_PERIOD: f64 = 4.0 * PI;

/// Default oscillator run time, fifteen ground-state phase periods. Fifteen
/// classical periods leave the displaced oscillator excited at the 1e-4 level.
pub const DEFAULT_RUN_TIME: f64 = 15.0 * GROUND_PHASE_PERIOD;

/// Default run time for the scattering model, whose level spacing
/// (`~0.16` at `N = 6`) is far smaller than the oscillator gap.
pub const PSM_RUN_TIME: f64 = 1500.0;

pub const DEFAULT_STEEPNESS: f64 = 20.0;
pub const DEFAULT_MIDPOINT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `1/2 + 1/2 tanh(steepness * (t/T_R - midpoint))`.
    Tanh {
        steepness: f64,
        midpoint_fraction: f64,
    },
    /// `t / T_R`.
    Linear,
}

impl Shape {
    pub fn tanh() -> Self {
        Shape::Tanh {
            steepness: DEFAULT_STEEPNESS,
            midpoint_fraction: DEFAULT_MIDPOINT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    run_time: f64,
    shape: Shape,
}

impl Schedule {
    pub fn new(run_time: f64, shape: Shape) -> Result<Self> {
        if !(run_time.is_finite() && run_time > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "run time must be positive, got {run_time}"
            )));
        }
        if let Shape::Tanh {
            steepness,
            midpoint_fraction,
        } = shape
        {
            if !(steepness.is_finite() && steepness > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "steepness must be positive, got {steepness}"
                )));
            }
            if !(0.0..=1.0).contains(&midpoint_fraction) {
                return Err(Error::InvalidSchedule(format!(
                    "midpoint fraction {midpoint_fraction} outside [0, 1]"
                )));
            }
        }
        Ok(Self { run_time, shape })
    }

    /// Default tanh ramp over `run_time`.
    pub fn tanh(run_time: f64) -> Result<Self> {
        Self::new(run_time, Shape::tanh())
    }

    pub fn linear(run_time: f64) -> Result<Self> {
        Self::new(run_time, Shape::Linear)
    }

    pub fn run_time(&self) -> f64 {
        self.run_time
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// `f(t)` for `t` in `[0, T_R]`; a few ulps of rounding past `T_R` are
    /// accepted so that computed grids like `T_R * k / n` stay in range.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let end = self.run_time * (1.0 + 4.0 * f64::EPSILON);
        if !(0.0..=end).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                run_time: self.run_time,
            });
        }
        Ok(self.value(t))
    }

    /// Unchecked evaluation for integrator stage times known to lie in range.
    pub(crate) fn value(&self, t: f64) -> f64 {
        let s = t / self.run_time;
        let f = match self.shape {
            Shape::Tanh {
                steepness,
                midpoint_fraction,
            } => 0.5 + 0.5 * (steepness * s - steepness * midpoint_fraction).tanh(),
            Shape::Linear => s,
        };
        f.clamp(0.0, 1.0)
    }
}
