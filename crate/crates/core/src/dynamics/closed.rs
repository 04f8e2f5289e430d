//! Closed-form solutions of the worked examples.
//!
//! [`SolutionMode::Paper`] reproduces the printed formulas, typos included:
//! the dagger solution built from `a(0)`, the `cos`/`sin` forms of `x_H`,
//! `p_H`, the spin solution with its signs and `Sz(t) = 0`.

use serde::{Deserialize, Serialize};

use crate::opcore::{Operator, C64};
use crate::reps::FockRep;

use super::{positive, DynError, Engine, EvolutionResult, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionMode {
    /// Solutions of the stated equations of motion.
    #[default]
    Default,
    /// Formulas exactly as printed.
    Paper,
}

/// Velocity prefactor `q(q+1)/2m` of the free-particle solution.
pub fn free_particle_coefficient(q: f64, mass: f64) -> f64 {
    q * (q + 1.0) / (2.0 * mass)
}

/// `x_H(t) = x0 + (q(q+1)/2m) p Λ t`. The momentum is constant.
pub fn closed_free_particle(
    x0: &Operator,
    p: &Operator,
    lambda: &Operator,
    q: f64,
    mass: f64,
    t: f64,
) -> Result<Operator, DynError> {
    positive("mass", mass)?;
    if x0.dim() != p.dim() || p.dim() != lambda.dim() {
        return Err(DynError::MixedRepresentations(format!(
            "x is {}-dimensional, p is {}, Lambda is {}",
            x0.dim(),
            p.dim(),
            lambda.dim()
        )));
    }
    let slope = (p * lambda).scale(C64::new(free_particle_coefficient(q, mass) * t, 0.0));
    Ok(x0 + &slope)
}

pub fn closed_free_particle_path(
    x0: &Operator,
    p: &Operator,
    lambda: &Operator,
    q: f64,
    mass: f64,
    grid: &TimeGrid,
) -> Result<EvolutionResult, DynError> {
    let operators = grid
        .times()
        .into_iter()
        .map(|t| closed_free_particle(x0, p, lambda, q, mass, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(closed_result(grid, operators))
}

pub(crate) fn closed_result(grid: &TimeGrid, operators: Vec<Operator>) -> EvolutionResult {
    EvolutionResult {
        engine: Engine::Closed,
        times: grid.times(),
        operators,
        error_estimate: None,
        tolerance_exceeded: false,
    }
}

/// Oscillator observables at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSnapshot {
    pub a: Operator,
    pub adag: Operator,
    pub x: Operator,
    pub p: Operator,
}

/// `a_H = a e^{−iqω_q t}`, `a†_H = a† e^{iqω_q t}`, and `x_H`, `p_H` built
/// from them with mass `mass`.
pub fn closed_oscillator(rep: &FockRep, mass: f64, t: f64, mode: SolutionMode) -> Result<OscillatorSnapshot, DynError> {
    positive("mass", mass)?;
    let phase = rep.q() * rep.omega_q() * t;
    let minus = C64::from_polar(1.0, -phase);
    let plus = C64::from_polar(1.0, phase);
    let sx = (rep.hbar() / (2.0 * mass * rep.omega_q())).sqrt();
    let sp = (mass * rep.omega_q() * rep.hbar() / 2.0).sqrt();
    let a = rep.a().scale(minus);
    Ok(match mode {
        SolutionMode::Default => {
            let adag = rep.adag().scale(plus);
            let x = (&a + &adag).scale(C64::new(sx, 0.0));
            let p = (&a - &adag).scale(C64::new(0.0, sp));
            OscillatorSnapshot { a, adag, x, p }
        }
        SolutionMode::Paper => OscillatorSnapshot {
            adag: rep.a().scale(plus),
            x: rep.a().scale(C64::new(2.0 * sx * phase.cos(), 0.0)),
            p: rep.adag().scale(C64::new(2.0 * sp * phase.sin(), 0.0)),
            a,
        },
    })
}

/// Spin values `(Sx, Sy, Sz)` at time `t` for the precession with
/// frequency `omega_q`.
///
/// Default: the solution of `dSx/dt = ωSy`, `dSy/dt = −ωSx`, `dSz/dt = 0`.
/// Paper: `Sx cos − Sy sin`, `Sy cos + Sx sin`, `Sz = 0`.
pub fn closed_spin(s0: [f64; 3], omega_q: f64, t: f64, mode: SolutionMode) -> [f64; 3] {
    let (s, c) = (omega_q * t).sin_cos();
    let [x, y, z] = s0;
    match mode {
        SolutionMode::Default => [x * c + y * s, y * c - x * s, z],
        SolutionMode::Paper => [x * c - y * s, y * c + x * s, 0.0],
    }
}
