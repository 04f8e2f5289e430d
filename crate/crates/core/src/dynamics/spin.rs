//! Spin precession in structure-constant form.
//!
//! With `qH = Σ_j h_j S_j`, the table gives
//! `dS_i/dt = (1/iħ)[S_i, qH] = λ Σ_{j,k} h_j c^k_{ij} S_k`, a linear flow
//! `S' = A S` on the component values.

use ndarray::{arr1, Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::opcore::{expm, matrix_exp, Operator, C64, EXPM_TOL};
use crate::reps::{spin_half_matrices, SpinRep};

use super::engines::rk4_path;
use super::{positive, DynError, Engine, TimeGrid};

/// Physical inputs of the precession example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinField {
    pub b_field: f64,
    pub electron_mass: f64,
    pub light_speed: f64,
    /// Charge factor `e`; the printed frequency omits it.
    pub charge: f64,
}

impl SpinField {
    pub fn validate(&self) -> Result<(), DynError> {
        positive("electron_mass", self.electron_mass)?;
        positive("light_speed", self.light_speed)?;
        if !self.b_field.is_finite() || !self.charge.is_finite() {
            return Err(DynError::NonPositive { name: "b_field/charge (finite)", value: f64::NAN });
        }
        Ok(())
    }

    /// `qH = −q²(eB/m_e c) Sz` as a component vector.
    pub fn q_hamiltonian(&self, q: f64) -> [f64; 3] {
        [0.0, 0.0, -q * q * self.charge * self.b_field / (self.electron_mass * self.light_speed)]
    }

    /// `ω_q = e B q² λ/(m_e c)`; with `include_charge = false` the printed
    /// `B q² λ/(m_e c)`.
    pub fn omega_q(&self, q: f64, lambda: f64, include_charge: bool) -> f64 {
        let e = if include_charge { self.charge } else { 1.0 };
        e * self.b_field * q * q * lambda / (self.electron_mass * self.light_speed)
    }
}

/// Flow matrix `A` with `A[i][k] = λ Σ_j h_j c^k_{ij}`.
pub fn spin_flow_matrix(rep: &SpinRep, h: [f64; 3]) -> [[f64; 3]; 3] {
    let c = rep.table();
    let mut a = [[0.0; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = rep.lambda() * (0..3).map(|j| h[j] * c[i][j][k]).sum::<f64>();
        }
    }
    a
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinTrajectory {
    pub engine: Engine,
    pub times: Vec<f64>,
    pub values: Vec<[f64; 3]>,
}

impl SpinTrajectory {
    /// `max_t |S_x|² + |S_y|² − (same at t = 0)|`.
    pub fn transverse_drift(&self) -> f64 {
        let r = |s: &[f64; 3]| s[0] * s[0] + s[1] * s[1];
        let r0 = r(&self.values[0]);
        self.values.iter().map(|s| (r(s) - r0).abs()).fold(0.0, f64::max)
    }
}

/// Largest Euclidean distance between two value paths.
pub fn max_spin_deviation(a: &SpinTrajectory, b: &SpinTrajectory) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn mat3(a: &[[f64; 3]; 3]) -> Array2<f64> {
    Array2::from_shape_fn((3, 3), |(i, k)| a[i][k])
}

fn to3(v: &Array1<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

/// RK4 on the structure-constant flow.
pub fn spin_ode(s0: [f64; 3], a: &[[f64; 3]; 3], grid: &TimeGrid) -> SpinTrajectory {
    let m = mat3(a);
    let path = rk4_path(arr1(&s0), grid.dt(), grid.steps(), |s| m.dot(s));
    SpinTrajectory { engine: Engine::Ode, times: grid.times(), values: path.iter().map(to3).collect() }
}

/// `S(t_k) = exp(t_k A) S0`, stepping with `exp(dt A)`.
pub fn spin_exponential(s0: [f64; 3], a: &[[f64; 3]; 3], grid: &TimeGrid) -> SpinTrajectory {
    let m = mat3(a).mapv(|x| C64::new(x * grid.dt(), 0.0));
    let step = expm(&m, EXPM_TOL).mapv(|z| z.re);
    let mut s = arr1(&s0);
    let mut values = vec![s0];
    for _ in 0..grid.steps() {
        s = step.dot(&s);
        values.push(to3(&s));
    }
    SpinTrajectory { engine: Engine::Liouville, times: grid.times(), values }
}

/// Undeformed oracle: spin-1/2 matrices `ħσ/2`, `S_i(t) = U†S_iU` with
/// `U = exp(−i qH t/ħ)`, decomposed back onto `S_k` and applied to `s0`.
pub fn spin_unitary(s0: [f64; 3], h: [f64; 3], grid: &TimeGrid, hbar: f64) -> Result<SpinTrajectory, DynError> {
    positive("hbar", hbar)?;
    let s: Vec<Operator> = spin_half_matrices().iter().map(|m| m.scale(C64::new(hbar, 0.0))).collect();
    let mut qh = Operator::zeros(2);
    for (hj, sj) in h.iter().zip(&s) {
        qh = &qh + &sj.scale(C64::new(*hj, 0.0));
    }
    let norm = hbar * hbar / 2.0;
    let mut values = Vec::with_capacity(grid.steps() + 1);
    for t in grid.times() {
        let u = matrix_exp(&qh.scale(C64::new(0.0, -t / hbar)), EXPM_TOL);
        let mut out = [0.0; 3];
        for (i, si) in s.iter().enumerate() {
            let evolved = &(&u.adjoint() * si) * &u;
            for (k, sk) in s.iter().enumerate() {
                out[i] += (sk * &evolved).trace().re / norm * s0[k];
            }
        }
        values.push(out);
    }
    Ok(SpinTrajectory { engine: Engine::Unitary, times: grid.times(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::closed::{closed_spin, SolutionMode};
    use crate::reps::make_spin;

    fn field() -> SpinField {
        SpinField { b_field: 2.0, electron_mass: 1.0, light_speed: 1.0, charge: 0.5 }
    }

    #[test]
    fn flow_matrix_gives_stated_equations() {
        let q = 1.2;
        let rep = make_spin(0.8);
        let a = spin_flow_matrix(&rep, field().q_hamiltonian(q));
        let w = field().omega_q(q, 0.8, true);
        assert!((a[0][1] - w).abs() < 1e-15);
        assert!((a[1][0] + w).abs() < 1e-15);
        assert_eq!([a[0][0], a[0][2], a[1][1], a[1][2]], [0.0; 4]);
        assert_eq!(a[2], [0.0; 3]);
        assert_eq!(field().omega_q(q, 0.8, false), w / 0.5);
    }

    #[test]
    fn engines_agree_with_rotation() {
        let q = 1.3;
        let rep = make_spin(1.0);
        let f = field();
        let a = spin_flow_matrix(&rep, f.q_hamiltonian(q));
        let w = f.omega_q(q, 1.0, true);
        let grid = TimeGrid::new(10.0 / w, 2000).unwrap();
        let s0 = [0.3, -0.4, 0.2];
        let closed = SpinTrajectory {
            engine: Engine::Closed,
            times: grid.times(),
            values: grid.times().iter().map(|&t| closed_spin(s0, w, t, SolutionMode::Default)).collect(),
        };
        let ode = spin_ode(s0, &a, &grid);
        let ex = spin_exponential(s0, &a, &grid);
        assert!(max_spin_deviation(&closed, &ode) < 1e-8);
        assert!(max_spin_deviation(&closed, &ex) < 1e-12);
        assert!(ode.transverse_drift() < 1e-10);
        assert!(ex.transverse_drift() < 1e-10);
    }

    #[test]
    fn standard_limit_matches_pauli_evolution() {
        let rep = make_spin(1.0);
        let f = field();
        let a = spin_flow_matrix(&rep, f.q_hamiltonian(1.0));
        let grid = TimeGrid::new(3.0, 300).unwrap();
        let s0 = [0.5, 0.1, -0.3];
        let uni = spin_unitary(s0, f.q_hamiltonian(1.0), &grid, 1.0).unwrap();
        let ex = spin_exponential(s0, &a, &grid);
        assert!(max_spin_deviation(&uni, &ex) < 1e-10);
    }
}
