//! Finite matrix representations with interior projectors.
//!
//! Truncation breaks the defining relations near the boundary of each basis.
//! Every representation therefore carries an interior projector `P`, and
//! relations are compared as `P·X·P`. A word of degree `d` needs the deeper
//! projector from [`Representation::interior_projector_depth`].

use std::collections::BTreeMap;

use thiserror::Error;

use crate::opcore::{Operator, C64};
use crate::qnum::{QParams, QnumError};
use crate::qsymb::Generator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("truncation {got} is below the minimum {min}")]
    TooSmall { min: usize, got: usize },
    #[error("the lattice representation is singular at q = {0}")]
    ClassicalQ(f64),
    #[error("momentum scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Projector onto the basis states `lo..=hi` of a `dim`-dimensional space.
pub fn basis_projector(dim: usize, lo: usize, hi: usize) -> Operator {
    let diag: Vec<C64> = (0..dim).map(|k| re(if (lo..=hi).contains(&k) { 1.0 } else { 0.0 })).collect();
    Operator::diagonal(&diag)
}

pub trait Representation {
    fn dim(&self) -> usize;

    /// Generator matrices, keyed for [`crate::qsymb::eval_on_matrices`].
    fn generators(&self) -> BTreeMap<Generator, Operator>;

    /// Projector on which words of degree ≤ `depth` see no truncation.
    fn interior_projector_depth(&self, depth: usize) -> Operator;

    fn interior_projector(&self) -> Operator {
        self.interior_projector_depth(1)
    }

    /// `P·X·P` with the depth-1 interior.
    fn on_interior(&self, x: &Operator) -> Operator {
        x.sandwich(&self.interior_projector()).expect("same dimension")
    }
}

/// Truncated q-oscillator on `|0⟩ … |N−1⟩`.
#[derive(Debug, Clone)]
pub struct FockRep {
    params: QParams,
    omega: f64,
    omega_q: f64,
    a: Operator,
    adag: Operator,
    number: Operator,
    hamiltonian: Operator,
}

pub fn make_fock(n: usize, q: f64, omega: f64) -> Result<FockRep, RepError> {
    FockRep::new(n, QParams::new(q, 1.0)?, omega)
}

impl FockRep {
    pub const MIN_DIM: usize = 3;

    pub fn new(n: usize, params: QParams, omega: f64) -> Result<Self, RepError> {
        if n < Self::MIN_DIM {
            return Err(RepError::TooSmall { min: Self::MIN_DIM, got: n });
        }
        let omega_q = params.q_frequency_osc(omega)?;
        let a = Operator::from_fn(n, |r, c| {
            if c == r + 1 {
                re(params.basic_number_osc(c as u32).sqrt())
            } else {
                re(0.0)
            }
        })
        .expect("finite entries")
        .with_label("a");
        let adag = a.adjoint().with_label("adag");
        let number = Operator::diagonal(&(0..n).map(|k| re(k as f64)).collect::<Vec<_>>()).with_label("N");
        let hamiltonian = (&(&a * &adag) + &(&adag * &a))
            .scale(re(params.hbar() * omega_q / 2.0))
            .with_label("H");
        Ok(Self { params, omega, omega_q, a, adag, number, hamiltonian })
    }

    pub fn params(&self) -> QParams {
        self.params
    }

    pub fn q(&self) -> f64 {
        self.params.q()
    }

    pub fn hbar(&self) -> f64 {
        self.params.hbar()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_q(&self) -> f64 {
        self.omega_q
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn adag(&self) -> &Operator {
        &self.adag
    }

    /// Plain occupation number `diag(0, 1, …)`; note `a†a = diag([n])`.
    pub fn number(&self) -> &Operator {
        &self.number
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    /// `a a† − q a† a − 1`.
    pub fn relation_defect(&self) -> Operator {
        let aad = &self.a * &self.adag;
        let ada = &self.adag * &self.a;
        &(&aad - &ada.scale(re(self.q()))) - &Operator::identity(self.dim())
    }

    /// `√(ħ/2mω_q)(a + a†)`.
    pub fn position(&self, mass: f64) -> Operator {
        let s = (self.hbar() / (2.0 * mass * self.omega_q)).sqrt();
        (&self.a + &self.adag).scale(re(s)).with_label("x")
    }

    /// `i√(mω_q ħ/2)(a − a†)`.
    pub fn momentum(&self, mass: f64) -> Operator {
        let s = (mass * self.omega_q * self.hbar() / 2.0).sqrt();
        (&self.a - &self.adag).scale(C64::new(0.0, s)).with_label("p")
    }
}

impl Representation for FockRep {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn generators(&self) -> BTreeMap<Generator, Operator> {
        BTreeMap::from([(Generator::A, self.a.clone()), (Generator::ADag, self.adag.clone())])
    }

    /// `span{|0⟩ … |N−1−depth⟩}`.
    fn interior_projector_depth(&self, depth: usize) -> Operator {
        let n = self.dim();
        if depth >= n {
            return Operator::zeros(n);
        }
        basis_projector(n, 0, n - 1 - depth)
    }
}

/// Geometric momentum lattice `|n⟩`, `n = −N … N`, with dilatation shift.
///
/// `p|n⟩ = p0 qⁿ|n⟩`, `Λ|n⟩ = |n−1⟩`, `x|n⟩ = ξₙ|n−1⟩`. From
/// `Λx = q⁻¹xΛ` one gets `ξₙ = q⁻¹ξₙ₋₁`, and `[x,p] = iħΛ` fixes
/// `ξₙ p0 q^{n−1}(q−1) = iħ`, so `ξₙ = iħ q^{1−n}/(p0(q−1))`.
#[derive(Debug, Clone)]
pub struct LatticeRep {
    half_width: usize,
    params: QParams,
    p0: f64,
    x: Operator,
    p: Operator,
    lambda: Operator,
    lambda_inv: Operator,
}

pub fn make_lattice(n: usize, q: f64, p0: f64) -> Result<LatticeRep, RepError> {
    LatticeRep::new(n, QParams::new(q, 1.0)?, p0)
}

impl LatticeRep {
    pub const MIN_HALF_WIDTH: usize = 2;

    pub fn new(half_width: usize, params: QParams, p0: f64) -> Result<Self, RepError> {
        if half_width < Self::MIN_HALF_WIDTH {
            return Err(RepError::TooSmall { min: Self::MIN_HALF_WIDTH, got: half_width });
        }
        if params.is_classical() {
            return Err(RepError::ClassicalQ(params.q()));
        }
        if !(p0.is_finite() && p0 > 0.0) {
            return Err(RepError::BadScale(p0));
        }
        let q = params.q();
        let hbar = params.hbar();
        let dim = 2 * half_width + 1;
        let level = |k: usize| k as i32 - half_width as i32;
        let p = Operator::diagonal(&(0..dim).map(|k| re(p0 * q.powi(level(k)))).collect::<Vec<_>>()).with_label("p");
        let shift_down = |r: usize, c: usize| re(if c == r + 1 { 1.0 } else { 0.0 });
        let lambda = Operator::from_fn(dim, shift_down).expect("finite").with_label("L");
        let lambda_inv = lambda.adjoint().with_label("Linv");
        let x = Operator::from_fn(dim, |r, c| {
            if c == r + 1 {
                C64::new(0.0, hbar * q.powi(1 - level(c)) / (p0 * (q - 1.0)))
            } else {
                re(0.0)
            }
        })
        .expect("finite")
        .with_label("x");
        Ok(Self { half_width, params, p0, x, p, lambda, lambda_inv })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn q(&self) -> f64 {
        self.params.q()
    }

    pub fn hbar(&self) -> f64 {
        self.params.hbar()
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn x(&self) -> &Operator {
        &self.x
    }

    pub fn p(&self) -> &Operator {
        &self.p
    }

    pub fn lambda(&self) -> &Operator {
        &self.lambda
    }

    pub fn lambda_inv(&self) -> &Operator {
        &self.lambda_inv
    }

    /// Basis index of level `n`.
    pub fn index(&self, level: i32) -> usize {
        (level + self.half_width as i32) as usize
    }

    /// Defects of `Λp − qpΛ`, `Λx − q⁻¹xΛ` and `xp − px − iħΛ`.
    pub fn relation_defects(&self) -> [Operator; 3] {
        let q = self.q();
        let (x, p, l) = (&self.x, &self.p, &self.lambda);
        [
            &(l * p) - &(p * l).scale(re(q)),
            &(l * x) - &(x * l).scale(re(1.0 / q)),
            &(&(x * p) - &(p * x)) - &l.scale(C64::new(0.0, self.hbar())),
        ]
    }
}

impl Representation for LatticeRep {
    fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    fn generators(&self) -> BTreeMap<Generator, Operator> {
        BTreeMap::from([
            (Generator::X, self.x.clone()),
            (Generator::P, self.p.clone()),
            (Generator::Lambda, self.lambda.clone()),
            (Generator::LambdaInv, self.lambda_inv.clone()),
        ])
    }

    /// Excludes `depth` states at each end of the lattice.
    fn interior_projector_depth(&self, depth: usize) -> Operator {
        let dim = self.dim();
        if 2 * depth >= dim {
            return Operator::zeros(dim);
        }
        basis_projector(dim, depth, dim - 1 - depth)
    }
}

/// Spin component index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub const ALL: [SpinAxis; 3] = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SpinAxis::X => "Sx",
            SpinAxis::Y => "Sy",
            SpinAxis::Z => "Sz",
        }
    }
}

/// Structure constants `c[i][j][k]` with `[S_i, S_j] = iħλ Σ_k c^k_{ij} S_k`.
pub type StructureConstants = [[[f64; 3]; 3]; 3];

/// The deformed spin table: `[Sx,Sy] → −Sz`, `[Sy,Sz] → +Sx`,
/// `[Sx,Sz] → −Sy`, antisymmetric on swapped arguments.
pub fn deformed_spin_constants() -> StructureConstants {
    let mut c = [[[0.0; 3]; 3]; 3];
    let listed = [((0, 1), 2, -1.0), ((1, 2), 0, 1.0), ((0, 2), 1, -1.0)];
    for ((i, j), k, v) in listed {
        c[i][j][k] = v;
        c[j][i][k] = -v;
    }
    c
}

/// Standard su(2): `c^k_{ij} = ε_{ijk}`.
pub fn su2_constants() -> StructureConstants {
    let mut c = [[[0.0; 3]; 3]; 3];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[i][j][k] = 1.0;
        c[j][i][k] = -1.0;
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinRep {
    lambda: f64,
    hbar: f64,
    table: StructureConstants,
}

pub fn make_spin(lambda: f64) -> SpinRep {
    SpinRep::new(lambda, 1.0)
}

impl SpinRep {
    pub fn new(lambda: f64, hbar: f64) -> Self {
        Self { lambda, hbar, table: deformed_spin_constants() }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn table(&self) -> &StructureConstants {
        &self.table
    }

    /// Common prefactor `iħλ` of every bracket.
    pub fn prefactor(&self) -> C64 {
        C64::new(0.0, self.hbar * self.lambda)
    }

    /// Channel vector `c^·_{ij}` of `[S_i, S_j]`, without the prefactor.
    pub fn bracket_table(&self, i: SpinAxis, j: SpinAxis) -> [f64; 3] {
        self.table[i.index()][j.index()]
    }

    /// Channel vector of `[S_i, Σ_j h_j S_j]`.
    pub fn bracket_with(&self, i: SpinAxis, h: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (j, hj) in h.iter().enumerate() {
            for (k, o) in out.iter_mut().enumerate() {
                *o += hj * self.table[i.index()][j][k];
            }
        }
        out
    }

    /// Ordered pairs whose channel differs from standard su(2).
    pub fn su2_differences(&self) -> Vec<(SpinAxis, SpinAxis)> {
        let std = su2_constants();
        let mut out = Vec::new();
        for i in SpinAxis::ALL {
            for j in SpinAxis::ALL {
                if i < j && self.table[i.index()][j.index()] != std[i.index()][j.index()] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Spin-1/2 matrices `σ/2` (in units of ħ) for the standard-limit oracle.
pub fn spin_half_matrices() -> [Operator; 3] {
    let z = re(0.0);
    let h = re(0.5);
    let ih = C64::new(0.0, 0.5);
    let m = |e: [[C64; 2]; 2]| Operator::from_fn(2, |r, c| e[r][c]).expect("finite");
    [m([[z, h], [h, z]]), m([[z, -ih], [ih, z]]), m([[h, z], [z, -h]])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::commutator;
    use crate::qnum::basic_number_osc;

    fn max_abs(x: &Operator) -> f64 {
        x.max_abs()
    }

    #[test]
    fn fock_classical_ladder() {
        let rep = make_fock(12, 1.0, 1.0).unwrap();
        for n in 1..12 {
            assert!((rep.a().get(n - 1, n).re - (n as f64).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn fock_q2_entries() {
        let rep = make_fock(4, 2.0, 1.0).unwrap();
        assert_eq!(rep.a().get(0, 1), re(1.0));
        assert!((rep.a().get(1, 2).re - 3f64.sqrt()).abs() < 1e-15);
        assert!((rep.a().get(2, 3).re - 7f64.sqrt()).abs() < 1e-15);
        assert_eq!(rep.adag().get(1, 0), re(1.0));
    }

    #[test]
    fn fock_defect_is_top_corner() {
        for &q in &[0.5, 0.9, 1.5, 2.0] {
            for &n in &[4usize, 8, 16] {
                let rep = make_fock(n, q, 1.0).unwrap();
                let d = rep.relation_defect();
                for r in 0..n {
                    for c in 0..n {
                        if (r, c) == (n - 1, n - 1) {
                            let want = -basic_number_osc(n as u32, q).unwrap();
                            assert!((d.get(r, c).re - want).abs() < 1e-9 * want.abs());
                        } else {
                            // Rounding of √[n] squared: a few ulps of the largest term.
                            let scale = basic_number_osc(r as u32 + 1, q).unwrap();
                            assert!(d.get(r, c).norm() <= 8.0 * f64::EPSILON * scale, "q={q} n={n} ({r},{c})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fock_hamiltonian_spectrum() {
        let q = 1.3;
        let rep = make_fock(10, q, 2.0).unwrap();
        let h = rep.hamiltonian();
        assert!(h.is_hermitian(0.0));
        let wq = rep.omega_q();
        for n in 0..9u32 {
            let want = wq / 2.0 * (basic_number_osc(n + 1, q).unwrap() + basic_number_osc(n, q).unwrap());
            let got = h.get(n as usize, n as usize).re;
            assert!((got - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn fock_rejects_small() {
        assert_eq!(make_fock(2, 1.0, 1.0).unwrap_err(), RepError::TooSmall { min: 3, got: 2 });
        assert!(make_fock(5, -1.0, 1.0).is_err());
        assert!(make_fock(5, 1.0, 0.0).is_err());
    }

    #[test]
    fn lattice_relations_on_interior() {
        for &q in &[0.5, 0.9, 1.5, 2.0] {
            for &n in &[4usize, 8, 16] {
                let rep = make_lattice(n, q, 1.0).unwrap();
                for d in rep.relation_defects() {
                    let scale = rep.p().max_abs().max(1.0);
                    assert!(max_abs(&rep.on_interior(&d)) < 1e-12 * scale, "q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn lattice_inverse_defect_at_edges() {
        let rep = make_lattice(4, 1.5, 1.0).unwrap();
        let dim = rep.dim();
        let one = Operator::identity(dim);
        let ll = &(rep.lambda() * rep.lambda_inv()) - &one;
        let lil = &(rep.lambda_inv() * rep.lambda()) - &one;
        assert_eq!(ll.get(dim - 1, dim - 1), re(-1.0));
        assert_eq!(lil.get(0, 0), re(-1.0));
        assert_eq!(ll.frobenius_norm(), 1.0);
        assert_eq!(lil.frobenius_norm(), 1.0);
        assert_eq!(rep.on_interior(&ll).max_abs(), 0.0);
    }

    #[test]
    fn lattice_rejects_classical_q() {
        assert_eq!(make_lattice(4, 1.0, 1.0).unwrap_err(), RepError::ClassicalQ(1.0));
        assert!(make_lattice(1, 2.0, 1.0).is_err());
        assert!(make_lattice(4, 2.0, 0.0).is_err());
    }

    #[test]
    fn spin_table() {
        let s = make_spin(1.0);
        assert_eq!(s.bracket_table(SpinAxis::X, SpinAxis::Y), [0.0, 0.0, -1.0]);
        assert_eq!(s.bracket_table(SpinAxis::Y, SpinAxis::Z), [1.0, 0.0, 0.0]);
        assert_eq!(s.bracket_table(SpinAxis::X, SpinAxis::Z), [0.0, -1.0, 0.0]);
        assert_eq!(s.prefactor(), C64::new(0.0, 1.0));
        // [Sz, H] with H ∝ Sz has an empty channel.
        assert_eq!(s.bracket_with(SpinAxis::Z, [0.0, 0.0, -2.5]), [0.0; 3]);
        for i in SpinAxis::ALL {
            for j in SpinAxis::ALL {
                let a = s.bracket_table(i, j);
                let b = s.bracket_table(j, i);
                assert!(a.iter().zip(b).all(|(x, y)| *x == -y));
            }
        }
    }

    #[test]
    fn spin_differs_from_su2_only_in_xy() {
        assert_eq!(make_spin(1.0).su2_differences(), vec![(SpinAxis::X, SpinAxis::Y)]);
        // The su(2) table itself agrees with the Pauli matrices.
        let s = spin_half_matrices();
        let std = su2_constants();
        for i in 0..3 {
            for j in 0..3 {
                let lhs = commutator(&s[i], &s[j]).unwrap();
                let mut rhs = Operator::zeros(2);
                for (k, sk) in s.iter().enumerate() {
                    rhs = &rhs + &sk.scale(C64::new(0.0, std[i][j][k]));
                }
                assert!((&lhs - &rhs).max_abs() < 1e-15);
            }
        }
    }
}
