//! Heisenberg-picture evolution of observables.
//!
//! Three engines integrate the same equation
//! `dB/dt = c · [B, qH]_{α,β}` with `c = 1/(iħ)` ([`EquationForm::Heisenberg`])
//! or `c = 1` ([`EquationForm::Literal`]):
//!
//! * closed forms for the worked examples ([`closed`]),
//! * fixed-step RK4 with a half-step Richardson estimate ([`evolve_ode`]),
//! * the exponential of the vectorized generator ([`evolve_liouville`]).
//!
//! At `q = 1` the unitary conjugation [`heisenberg_transform`] serves as the
//! undeformed oracle.

pub mod closed;
mod engines;
pub mod poly;
pub mod scenario;
pub mod spin;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::opcore::{expectation, OpError, Operator, C64};
use crate::qnum::QnumError;
use crate::reps::RepError;
use ndarray::Array1;

pub use engines::{
    evolve_liouville, evolve_liouville_with, evolve_ode, evolve_ode_with, heisenberg_rhs, heisenberg_transform,
    unitary_path, OdeOptions,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynError {
    #[error("end time must be positive and finite, got {0}")]
    BadEndTime(f64),
    #[error("at least one time step is required")]
    NoSteps,
    #[error("quadrature needs at least 2 steps, got {0}")]
    TooFewQuadratureSteps(usize),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("operators come from different representations ({0})")]
    MixedRepresentations(String),
    #[error(transparent)]
    Operator(#[from] OpError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, DynError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(DynError::NonPositive { name, value })
    }
}

/// Uniform grid `t_k = k · t_end / steps`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self, DynError> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(DynError::BadEndTime(t_end));
        }
        if steps == 0 {
            return Err(DynError::NoSteps);
        }
        Ok(Self { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            return self.t_end;
        }
        k as f64 * self.t_end / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    /// Same end time, twice the steps.
    pub fn refined(&self) -> TimeGrid {
        Self { t_end: self.t_end, steps: 2 * self.steps }
    }
}

/// Prefactor in front of the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationForm {
    /// `dB/dt = (1/iħ)[B, qH]`.
    #[default]
    Heisenberg,
    /// `dB/du = [B, qH]` with no `1/iħ`.
    Literal,
}

impl EquationForm {
    pub fn prefactor(self, hbar: f64) -> C64 {
        match self {
            EquationForm::Heisenberg => C64::new(0.0, -1.0 / hbar),
            EquationForm::Literal => C64::new(1.0, 0.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EquationForm::Heisenberg => "heisenberg",
            EquationForm::Literal => "literal",
        }
    }
}

impl fmt::Display for EquationForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Closed,
    Ode,
    Liouville,
    /// `U†BU`, the undeformed oracle.
    Unitary,
}

impl Engine {
    pub fn label(self) -> &'static str {
        match self {
            Engine::Closed => "closed",
            Engine::Ode => "ode",
            Engine::Liouville => "liouville",
            Engine::Unitary => "unitary",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Operator trajectory on a grid. `operators[0]` is the initial observable.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub engine: Engine,
    pub times: Vec<f64>,
    pub operators: Vec<Operator>,
    /// Richardson estimate of the global error (ODE engine only).
    pub error_estimate: Option<f64>,
    /// Set when `error_estimate` exceeds the requested tolerance.
    pub tolerance_exceeded: bool,
}

impl EvolutionResult {
    pub fn last(&self) -> &Operator {
        self.operators.last().expect("nonempty trajectory")
    }

    pub fn expectations(&self, state: &Array1<C64>) -> Result<Vec<C64>, OpError> {
        self.operators.iter().map(|b| expectation(state, b)).collect()
    }
}

/// Largest `‖P(A_k − B_k)P‖_F` over two trajectories.
pub fn max_deviation(a: &[Operator], b: &[Operator], projector: Option<&Operator>) -> Result<f64, OpError> {
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        let mut d = x.checked_sub(y)?;
        if let Some(p) = projector {
            d = d.sandwich(p)?;
        }
        worst = worst.max(d.frobenius_norm());
    }
    Ok(worst)
}
