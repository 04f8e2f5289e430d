//! Dense complex operator algebra.
//!
//! Operators are square `Array2<Complex64>` matrices. Superoperators act on
//! column-stacked operators: `vec(F)[i + j*d] = F[i, j]`, so that
//! `vec(A F B) = (Bᵀ ⊗ A) vec(F)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Default accuracy target for [`matrix_exp`].
pub const EXPM_TOL: f64 = 1e-15;

/// Scaled matrices are reduced to at most this 1-norm before the Taylor core.
const EXPM_SCALED_NORM: f64 = 0.5;
const EXPM_MAX_TERMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator must have positive dimension")]
    Empty,
    #[error("operator has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state vector has zero norm")]
    ZeroState,
}

/// Square complex matrix with an optional display label. Equality ignores
/// the label.
#[derive(Clone)]
pub struct Operator {
    mat: Array2<C64>,
    label: Option<String>,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("dim", &self.dim())
            .field("label", &self.label)
            .field("mat", &self.mat)
            .finish()
    }
}

impl Operator {
    pub fn new(mat: Array2<C64>) -> Result<Self, OpError> {
        let (rows, cols) = mat.dim();
        if rows != cols {
            return Err(OpError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(OpError::Empty);
        }
        if let Some(((row, col), _)) = mat
            .indexed_iter()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(OpError::NonFinite { row, col });
        }
        Ok(Self { mat, label: None })
    }

    /// Wraps a matrix already known to be square and finite.
    pub(crate) fn from_matrix_unchecked(mat: Array2<C64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat, label: None }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self, OpError> {
        Self::new(Array2::from_shape_fn((dim, dim), |(i, j)| f(i, j)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix_unchecked(Array2::zeros((dim, dim)))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(Array2::eye(dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_matrix_unchecked(Array2::from_diag(&Array1::from(entries.to_vec())))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[[row, col]]
    }

    fn check_dims(&self, other: &Operator) -> Result<(), OpError> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(OpError::DimensionMismatch { left: self.dim(), right: other.dim() })
        }
    }

    pub fn checked_mul(&self, other: &Operator) -> Result<Operator, OpError> {
        self.check_dims(other)?;
        Ok(Self::from_matrix_unchecked(self.mat.dot(&other.mat)))
    }

    pub fn checked_add(&self, other: &Operator) -> Result<Operator, OpError> {
        self.check_dims(other)?;
        Ok(Self::from_matrix_unchecked(&self.mat + &other.mat))
    }

    pub fn checked_sub(&self, other: &Operator) -> Result<Operator, OpError> {
        self.check_dims(other)?;
        Ok(Self::from_matrix_unchecked(&self.mat - &other.mat))
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Self::from_matrix_unchecked(self.mat.mapv(|z| z * factor))
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_matrix_unchecked(self.mat.t().mapv(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        one_norm(&self.mat)
    }

    /// `P X P` for a projector `P`.
    pub fn sandwich(&self, projector: &Operator) -> Result<Operator, OpError> {
        projector.checked_mul(self)?.checked_mul(projector)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self - &self.adjoint()).max_abs() <= tol
    }

    /// Column-stacked vectorization.
    pub fn vectorize(&self) -> Array1<C64> {
        let d = self.dim();
        Array1::from_shape_fn(d * d, |k| self.mat[[k % d, k / d]])
    }

    pub fn unvectorize(v: &Array1<C64>, dim: usize) -> Result<Operator, OpError> {
        if v.len() != dim * dim {
            return Err(OpError::DimensionMismatch { left: v.len(), right: dim * dim });
        }
        Operator::new(Array2::from_shape_fn((dim, dim), |(i, j)| v[i + j * dim]))
    }

    pub fn apply(&self, state: &Array1<C64>) -> Result<Array1<C64>, OpError> {
        if state.len() != self.dim() {
            return Err(OpError::DimensionMismatch { left: self.dim(), right: state.len() });
        }
        Ok(self.mat.dot(state))
    }
}

impl Add for &Operator {
    type Output = Operator;

    /// Panics on dimension mismatch, like ndarray arithmetic.
    fn add(self, rhs: &Operator) -> Operator {
        self.checked_add(rhs).expect("operator dimensions must match")
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.checked_sub(rhs).expect("operator dimensions must match")
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.checked_mul(rhs).expect("operator dimensions must match")
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Weighted bracket `[A, B]_{α,β} = α A B − β B A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketSpec {
    pub alpha: C64,
    pub beta: C64,
}

impl BracketSpec {
    pub fn new(alpha: C64, beta: C64) -> Self {
        Self { alpha, beta }
    }

    pub fn real(alpha: f64, beta: f64) -> Self {
        Self::new(C64::new(alpha, 0.0), C64::new(beta, 0.0))
    }

    /// Plain commutator, `(1, 1)`.
    pub fn commutator() -> Self {
        Self::real(1.0, 1.0)
    }

    /// `A B − q B A`, the oscillator bracket.
    pub fn q_commutator(q: f64) -> Self {
        Self::real(1.0, q)
    }

    /// `q^{1/2} A B − q^{−1/2} B A`.
    pub fn symmetric(q: f64) -> Self {
        let s = q.sqrt();
        Self::real(s, 1.0 / s)
    }

    /// `(β, α)`: `[A, B]_{α,β} = −[B, A]_{β,α}`.
    pub fn swapped(&self) -> Self {
        Self::new(self.beta, self.alpha)
    }
}

impl fmt::Display for BracketSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={}, beta={}", fmt_c64(self.alpha), fmt_c64(self.beta))
    }
}

fn fmt_c64(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

pub fn bracket(a: &Operator, b: &Operator, spec: BracketSpec) -> Result<Operator, OpError> {
    a.check_dims(b)?;
    let ab = a.mat.dot(&b.mat);
    let ba = b.mat.dot(&a.mat);
    Ok(Operator::from_matrix_unchecked(ab * spec.alpha - ba * spec.beta))
}

pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator, OpError> {
    bracket(a, b, BracketSpec::commutator())
}

pub fn adjoint(a: &Operator) -> Operator {
    a.adjoint()
}

fn one_norm(m: &Array2<C64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
pub fn expm(a: &Array2<C64>, tol: f64) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    let squarings = if norm > EXPM_SCALED_NORM {
        (norm / EXPM_SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(2f64.powi(-squarings), 0.0);
    // Truncation error of the scaled series is amplified roughly 2^s times.
    let term_tol = (tol * 2f64.powi(-squarings)).max(f64::MIN_POSITIVE);

    let mut sum = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..=EXPM_MAX_TERMS {
        term = term.dot(&scaled) * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
        let tn = one_norm(&term);
        if tn <= term_tol || tn <= f64::EPSILON * 0.5 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

pub fn matrix_exp(a: &Operator, tol: f64) -> Operator {
    Operator::from_matrix_unchecked(expm(&a.mat, tol))
}

/// `⟨ψ|A|ψ⟩ / ⟨ψ|ψ⟩`.
pub fn expectation(state: &Array1<C64>, a: &Operator) -> Result<C64, OpError> {
    let norm_sqr: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if norm_sqr == 0.0 {
        return Err(OpError::ZeroState);
    }
    let applied = a.apply(state)?;
    let braket: C64 = state.iter().zip(applied.iter()).map(|(l, r)| l.conj() * r).sum();
    Ok(braket / norm_sqr)
}

/// Linear map on column-stacked `dim × dim` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: Array2<C64>,
}

impl Superoperator {
    pub fn new(dim: usize, mat: Array2<C64>) -> Result<Self, OpError> {
        let (rows, cols) = mat.dim();
        if rows != cols {
            return Err(OpError::NotSquare { rows, cols });
        }
        if rows != dim * dim {
            return Err(OpError::DimensionMismatch { left: rows, right: dim * dim });
        }
        Ok(Self { dim, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn scale(&self, factor: C64) -> Superoperator {
        Self { dim: self.dim, mat: self.mat.mapv(|z| z * factor) }
    }

    pub fn apply(&self, f: &Operator) -> Result<Operator, OpError> {
        if f.dim() != self.dim {
            return Err(OpError::DimensionMismatch { left: self.dim, right: f.dim() });
        }
        Operator::unvectorize(&self.mat.dot(&f.vectorize()), self.dim)
    }

    pub fn apply_vec(&self, v: &Array1<C64>) -> Array1<C64> {
        self.mat.dot(v)
    }

    /// `exp(t S)` as a superoperator.
    pub fn exp(&self, t: f64, tol: f64) -> Superoperator {
        let scaled = &self.mat * C64::new(t, 0.0);
        Self { dim: self.dim, mat: expm(&scaled, tol) }
    }
}

/// Superoperator of `F ↦ [q H, F]_{α,β} = α q H F − β q F H`.
pub fn build_liouvillian(h: &Operator, spec: BracketSpec, q: f64) -> Superoperator {
    let d = h.dim();
    let left = spec.alpha * q;
    let right = spec.beta * q;
    let hm = h.matrix();
    let mut s = Array2::<C64>::zeros((d * d, d * d));
    // rows (i, j) -> i + j d; columns (k, l) -> k + l d
    for j in 0..d {
        for i in 0..d {
            let row = i + j * d;
            for k in 0..d {
                s[[row, k + j * d]] += left * hm[[i, k]];
            }
            for l in 0..d {
                s[[row, i + l * d]] -= right * hm[[l, j]];
            }
        }
    }
    Superoperator { dim: d, mat: s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> Operator {
        Operator::from_fn(2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) }).unwrap()
    }

    fn pauli_y() -> Operator {
        Operator::new(ndarray::array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
            .unwrap()
    }

    fn pauli_z() -> Operator {
        Operator::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])
    }

    #[test]
    fn construction_rejects_bad_matrices() {
        assert_eq!(
            Operator::new(Array2::zeros((2, 3))).unwrap_err(),
            OpError::NotSquare { rows: 2, cols: 3 }
        );
        assert_eq!(Operator::new(Array2::zeros((0, 0))).unwrap_err(), OpError::Empty);
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[1, 0]] = c(f64::NAN, 0.0);
        assert_eq!(Operator::new(m).unwrap_err(), OpError::NonFinite { row: 1, col: 0 });
    }

    #[test]
    fn bracket_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = sample::random_operator(&mut rng, 3, 1.0);
        let z = bracket(&Operator::identity(3), &b, BracketSpec::commutator()).unwrap();
        assert!(z.max_abs() < 1e-15);

        // σx σy = iσz, σy σx = −iσz
        let comm = commutator(&pauli_x(), &pauli_y()).unwrap();
        assert!((&comm - &pauli_z().scale(c(0.0, 2.0))).max_abs() < 1e-15);

        let q = 1.7;
        let self_br = bracket(&b, &b, BracketSpec::q_commutator(q)).unwrap();
        let expected = (&b * &b).scale(c(1.0 - q, 0.0));
        assert!((&self_br - &expected).max_abs() < 1e-12);

        assert!(bracket(&b, &pauli_x(), BracketSpec::commutator()).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = sample::random_operator(&mut rng, 4, 1.0);
        assert_eq!(adjoint(&adjoint(&a)), a);
        assert_eq!(adjoint(&Operator::identity(3)), Operator::identity(3));
        let sigma_plus = (&pauli_x() + &pauli_y().scale(c(0.0, 1.0))).scale(c(0.5, 0.0));
        let sigma_minus = (&pauli_x() - &pauli_y().scale(c(0.0, 1.0))).scale(c(0.5, 0.0));
        assert_eq!(sigma_plus.get(0, 1), c(1.0, 0.0));
        assert_eq!(sigma_plus.adjoint(), sigma_minus);
        assert_eq!(sigma_minus.get(1, 0), c(1.0, 0.0));
    }

    #[test]
    fn expm_examples() {
        assert_eq!(matrix_exp(&Operator::zeros(3), EXPM_TOL), Operator::identity(3));

        let thetas = [0.3, -1.2, 2.5, 7.0];
        let d = Operator::diagonal(&thetas.map(|t| c(0.0, t)));
        let e = matrix_exp(&d, EXPM_TOL);
        for (k, t) in thetas.iter().enumerate() {
            assert!((e.get(k, k) - c(0.0, *t).exp()).norm() < 1e-13);
        }
        assert!((&e - &Operator::diagonal(&thetas.map(|t| c(0.0, t).exp()))).max_abs() < 1e-13);

        // exp(−iθσx) = cos θ − i sin θ σx
        let e = matrix_exp(&pauli_x().scale(c(0.0, -PI / 2.0)), EXPM_TOL);
        assert!((&e - &pauli_x().scale(c(0.0, -1.0))).max_abs() < 1e-14);
    }

    #[test]
    fn expm_respects_loose_tolerance() {
        let a = pauli_x().scale(c(0.0, 3.0));
        let loose = matrix_exp(&a, 1e-6);
        let tight = matrix_exp(&a, EXPM_TOL);
        assert!((&loose - &tight).max_abs() < 1e-6);
    }

    #[test]
    fn liouvillian_examples() {
        let zero = build_liouvillian(&Operator::zeros(3), BracketSpec::commutator(), 1.3);
        assert!(zero.matrix().iter().all(|z| *z == c(0.0, 0.0)));

        let l = build_liouvillian(&pauli_z(), BracketSpec::commutator(), 1.0);
        let sigma_plus = Operator::from_fn(2, |i, j| if (i, j) == (0, 1) { c(1.0, 0.0) } else { c(0.0, 0.0) }).unwrap();
        let out = l.apply(&sigma_plus).unwrap();
        assert!((&out - &sigma_plus.scale(c(2.0, 0.0))).max_abs() < 1e-15);
    }

    #[test]
    fn column_stacking_layout() {
        let f = Operator::from_fn(2, |i, j| c((i + 10 * j) as f64, 0.0)).unwrap();
        let v = f.vectorize();
        assert_eq!(v.to_vec(), vec![c(0.0, 0.0), c(1.0, 0.0), c(10.0, 0.0), c(11.0, 0.0)]);
        assert_eq!(Operator::unvectorize(&v, 2).unwrap(), f);
    }

    #[test]
    fn expectation_examples() {
        let e0 = Array1::from(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let d = Operator::diagonal(&[c(3.0, 0.0), c(5.0, 0.0)]);
        assert!((expectation(&e0, &d).unwrap() - c(3.0, 0.0)).norm() < 1e-15);

        let psi = Array1::from(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        assert!((expectation(&psi, &Operator::identity(2)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let s = 1.0 / 2f64.sqrt();
        let plus = Array1::from(vec![c(s, 0.0), c(s, 0.0)]);
        assert!((expectation(&plus, &pauli_x()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        assert_eq!(expectation(&Array1::zeros(2), &d), Err(OpError::ZeroState));
        assert!(expectation(&Array1::from(vec![c(1.0, 0.0)]), &d).is_err());
    }

    #[test]
    fn liouvillian_contract_on_twenty_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for k in 0..20 {
            let d = 2 + k % 5;
            let h = sample::random_operator(&mut rng, d, 1.0);
            let f = sample::random_operator(&mut rng, d, 1.0);
            let q = 0.5 + k as f64 * 0.1;
            for spec in [BracketSpec::commutator(), BracketSpec::q_commutator(q), BracketSpec::symmetric(q)] {
                let direct = bracket(&h.scale(c(q, 0.0)), &f, spec).unwrap();
                let via = build_liouvillian(&h, spec, q).apply(&f).unwrap();
                assert!((&direct - &via).max_abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn commutator_antisymmetric(seed in any::<u64>(), d in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::random_operator(&mut rng, d, 1.0);
            let b = sample::random_operator(&mut rng, d, 1.0);
            let ab = commutator(&a, &b).unwrap();
            let ba = commutator(&b, &a).unwrap();
            prop_assert!((&ab + &ba).max_abs() < 1e-12);
        }

        #[test]
        fn bracket_bilinear(seed in any::<u64>(), d in 1usize..6, s in -2.0f64..2.0, q in 0.3f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::random_operator(&mut rng, d, 1.0);
            let a2 = sample::random_operator(&mut rng, d, 1.0);
            let b = sample::random_operator(&mut rng, d, 1.0);
            let spec = BracketSpec::q_commutator(q);
            let z = c(s, 0.5);
            let lhs = bracket(&(&a + &a2.scale(z)), &b, spec).unwrap();
            let rhs = &bracket(&a, &b, spec).unwrap() + &bracket(&a2, &b, spec).unwrap().scale(z);
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
            let lhs = bracket(&b, &(&a + &a2.scale(z)), spec).unwrap();
            let rhs = &bracket(&b, &a, spec).unwrap() + &bracket(&b, &a2, spec).unwrap().scale(z);
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
        }

        #[test]
        fn expm_inverse(seed in any::<u64>(), d in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::random_operator(&mut rng, d, 1.0);
            let a = a.scale(c(2.0 / a.one_norm().max(1e-300), 0.0));
            let prod = &matrix_exp(&a, EXPM_TOL) * &matrix_exp(&-&a, EXPM_TOL);
            prop_assert!((&prod - &Operator::identity(d)).max_abs() < 1e-9);
        }

        #[test]
        fn expm_unitary_for_hermitian(seed in any::<u64>(), d in 1usize..7, t in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = sample::random_hermitian(&mut rng, d, 1.0);
            let u = matrix_exp(&h.scale(c(0.0, -t)), EXPM_TOL);
            let gram = &u.adjoint() * &u;
            prop_assert!((&gram - &Operator::identity(d)).max_abs() < 1e-9);
        }
    }
}
