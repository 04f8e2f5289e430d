use ndarray::{Array, Array2, Dimension, LinalgScalar, ScalarOperand};

use crate::opcore::{bracket, build_liouvillian, matrix_exp, BracketSpec, OpError, Operator, C64, EXPM_TOL};

use super::{DynError, Engine, EquationForm, EvolutionResult, TimeGrid};

/// Classical RK4 path `y_0 … y_steps` for `y' = f(y)`.
pub(crate) fn rk4_path<T, D>(y0: Array<T, D>, dt: f64, steps: usize, f: impl Fn(&Array<T, D>) -> Array<T, D>) -> Vec<Array<T, D>>
where
    T: LinalgScalar + ScalarOperand + From<f64>,
    D: Dimension,
{
    let half = T::from(dt / 2.0);
    let full = T::from(dt);
    let sixth = T::from(dt / 6.0);
    let two = T::from(2.0);
    let mut path = Vec::with_capacity(steps + 1);
    let mut y = y0;
    path.push(y.clone());
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&(&y + &(&k1 * half)));
        let k3 = f(&(&y + &(&k2 * half)));
        let k4 = f(&(&y + &(&k3 * full)));
        let incr = &(&(&k1 + &(&k2 * two)) + &(&k3 * two)) + &k4;
        y = &y + &(&incr * sixth);
        path.push(y.clone());
    }
    path
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeOptions {
    pub form: EquationForm,
    /// Run the half-step comparison.
    pub richardson: bool,
    /// Flag (not fail) when the estimate exceeds this.
    pub tolerance: Option<f64>,
    /// Measure the estimate on `P·B·P` only.
    pub projector: Option<Operator>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { form: EquationForm::Heisenberg, richardson: true, tolerance: None, projector: None }
    }
}

fn check_dims(b0: &Operator, h: &Operator) -> Result<(), DynError> {
    if b0.dim() != h.dim() {
        return Err(OpError::DimensionMismatch { left: b0.dim(), right: h.dim() }.into());
    }
    Ok(())
}

/// RK4 on `dB/dt = (1/iħ)[B, qH]_{α,β}` with the default options.
pub fn evolve_ode(
    b0: &Operator,
    h: &Operator,
    spec: BracketSpec,
    q: f64,
    grid: &TimeGrid,
    hbar: f64,
) -> Result<EvolutionResult, DynError> {
    evolve_ode_with(b0, h, spec, q, grid, hbar, OdeOptions::default())
}

pub fn evolve_ode_with(
    b0: &Operator,
    h: &Operator,
    spec: BracketSpec,
    q: f64,
    grid: &TimeGrid,
    hbar: f64,
    opts: OdeOptions,
) -> Result<EvolutionResult, DynError> {
    check_dims(b0, h)?;
    let qh = h.scale(C64::new(q, 0.0));
    let c = opts.form.prefactor(hbar);
    let (la, lb) = (spec.alpha * c, spec.beta * c);
    let qhm = qh.matrix();
    // c(α B qH − β qH B)
    let rhs = |b: &Array2<C64>| &(b.dot(qhm) * la) - &(qhm.dot(b) * lb);
    let run = |g: &TimeGrid| rk4_path(b0.matrix().clone(), g.dt(), g.steps(), rhs);

    let coarse = run(grid);
    let error_estimate = if opts.richardson {
        let fine = run(&grid.refined());
        let mut worst: f64 = 0.0;
        for (k, y) in coarse.iter().enumerate() {
            let mut d = y - &fine[2 * k];
            if let Some(p) = &opts.projector {
                d = p.matrix().dot(&d).dot(p.matrix());
            }
            worst = worst.max(d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        }
        // Error of the returned coarse path: |coarse − fine| · 16/15.
        Some(worst * 16.0 / 15.0)
    } else {
        None
    };
    let operators = coarse.into_iter().map(Operator::new).collect::<Result<Vec<_>, _>>()?;
    Ok(EvolutionResult {
        engine: Engine::Ode,
        times: grid.times(),
        operators,
        tolerance_exceeded: matches!((error_estimate, opts.tolerance), (Some(e), Some(t)) if e > t),
        error_estimate,
    })
}

/// `vec B(t_k) = exp(t_k N) vec B0`, with `N` the generator of the same
/// right-hand side as [`evolve_ode`].
///
/// The superoperator `L` of `F ↦ [qH, F]_{β,α}` satisfies
/// `[F, qH]_{α,β} = −L F`, so `N = (i/ħ) L` and the propagator is
/// `exp(iLt/ħ)`.
pub fn evolve_liouville(
    b0: &Operator,
    h: &Operator,
    spec: BracketSpec,
    q: f64,
    grid: &TimeGrid,
    hbar: f64,
) -> Result<EvolutionResult, DynError> {
    evolve_liouville_with(b0, h, spec, q, grid, hbar, EquationForm::Heisenberg)
}

pub fn evolve_liouville_with(
    b0: &Operator,
    h: &Operator,
    spec: BracketSpec,
    q: f64,
    grid: &TimeGrid,
    hbar: f64,
    form: EquationForm,
) -> Result<EvolutionResult, DynError> {
    check_dims(b0, h)?;
    let l = build_liouvillian(h, spec.swapped(), q);
    let n = l.scale(-form.prefactor(hbar));
    let step = n.exp(grid.dt(), EXPM_TOL);
    let d = b0.dim();
    let mut v = b0.vectorize();
    let mut operators = Vec::with_capacity(grid.steps() + 1);
    operators.push(b0.clone());
    for _ in 0..grid.steps() {
        v = step.apply_vec(&v);
        operators.push(Operator::unvectorize(&v, d)?);
    }
    Ok(EvolutionResult {
        engine: Engine::Liouville,
        times: grid.times(),
        operators,
        error_estimate: None,
        tolerance_exceeded: false,
    })
}

/// `U†BU` with `U = exp(−itH/ħ)`.
pub fn heisenberg_transform(b: &Operator, h: &Operator, t: f64, hbar: f64) -> Result<Operator, DynError> {
    check_dims(b, h)?;
    let u = matrix_exp(&h.scale(C64::new(0.0, -t / hbar)), EXPM_TOL);
    Ok(u.adjoint().checked_mul(b)?.checked_mul(&u)?)
}

/// [`heisenberg_transform`] on every grid point.
pub fn unitary_path(b: &Operator, h: &Operator, grid: &TimeGrid, hbar: f64) -> Result<EvolutionResult, DynError> {
    check_dims(b, h)?;
    let step = matrix_exp(&h.scale(C64::new(0.0, -grid.dt() / hbar)), EXPM_TOL);
    let step_dag = step.adjoint();
    let mut cur = b.clone();
    let mut operators = vec![cur.clone()];
    for _ in 0..grid.steps() {
        cur = &(&step_dag * &cur) * &step;
        operators.push(cur.clone());
    }
    Ok(EvolutionResult {
        engine: Engine::Unitary,
        times: grid.times(),
        operators,
        error_estimate: None,
        tolerance_exceeded: false,
    })
}

/// One evaluation of the right-hand side, exposed for diagnostics.
pub fn heisenberg_rhs(b: &Operator, h: &Operator, spec: BracketSpec, q: f64, form: EquationForm, hbar: f64) -> Result<Operator, DynError> {
    let qh = h.scale(C64::new(q, 0.0));
    Ok(bracket(b, &qh, spec)?.scale(form.prefactor(hbar)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_hermitian, random_operator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_hamiltonian_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_operator(&mut rng, 3, 1.0);
        let h = Operator::zeros(3);
        let grid = TimeGrid::new(2.0, 10).unwrap();
        for r in [
            evolve_ode(&b, &h, BracketSpec::commutator(), 1.3, &grid, 1.0).unwrap(),
            evolve_liouville(&b, &h, BracketSpec::commutator(), 1.3, &grid, 1.0).unwrap(),
        ] {
            assert!(r.operators.iter().all(|x| x == &b));
        }
    }

    #[test]
    fn q_one_matches_unitary_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_operator(&mut rng, 4, 1.0);
        let h = random_hermitian(&mut rng, 4, 1.0);
        let grid = TimeGrid::new(1.0, 400).unwrap();
        let ode = evolve_ode(&b, &h, BracketSpec::commutator(), 1.0, &grid, 0.7).unwrap();
        let oracle = heisenberg_transform(&b, &h, 1.0, 0.7).unwrap();
        assert!((ode.last() - &oracle).max_abs() < 1e-8);
        assert!(ode.error_estimate.unwrap() < 1e-9);
        assert_eq!(ode.operators[0], b);
    }

    #[test]
    fn liouville_matches_ode_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in [BracketSpec::commutator(), BracketSpec::q_commutator(1.2), BracketSpec::symmetric(0.8)] {
            let b = random_operator(&mut rng, 3, 1.0);
            let h = random_operator(&mut rng, 3, 1.0);
            let grid = TimeGrid::new(1.0, 200).unwrap();
            for form in [EquationForm::Heisenberg, EquationForm::Literal] {
                let opts = OdeOptions { form, ..OdeOptions::default() };
                let ode = evolve_ode_with(&b, &h, spec, 1.1, &grid, 1.0, opts).unwrap();
                let liou = evolve_liouville_with(&b, &h, spec, 1.1, &grid, 1.0, form).unwrap();
                assert!((ode.last() - liou.last()).frobenius_norm() < 1e-6, "{spec} {form}");
            }
        }
    }

    #[test]
    fn diagonal_operators_stay_constant() {
        let d = |v: &[f64]| Operator::diagonal(&v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let b = d(&[1.0, -2.0, 0.5]);
        let h = d(&[0.3, 1.0, 2.0]);
        let r = evolve_liouville(&b, &h, BracketSpec::commutator(), 1.0, &TimeGrid::new(3.0, 30).unwrap(), 1.0).unwrap();
        assert!((r.last() - &b).max_abs() < 1e-14);
    }

    #[test]
    fn unitary_similarity_keeps_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_hermitian(&mut rng, 5, 1.0);
        let b = random_hermitian(&mut rng, 5, 1.0);
        let u = heisenberg_transform(&b, &h, 1.7, 1.0).unwrap();
        // Similarity preserves tr(B^k); Hermitian spectra are fixed by k = 1..5.
        let mut pb = Operator::identity(5);
        let mut pu = Operator::identity(5);
        for _ in 0..5 {
            pb = &pb * &b;
            pu = &pu * &u;
            assert!((pb.trace() - pu.trace()).norm() < 1e-9);
        }
        assert_eq!(heisenberg_transform(&b, &h, 0.0, 1.0).unwrap(), b);
        assert!((&heisenberg_transform(&h, &h, 2.5, 1.0).unwrap() - &h).max_abs() < 1e-12);
    }

    #[test]
    fn tolerance_breach_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_operator(&mut rng, 3, 1.0);
        let h = random_hermitian(&mut rng, 3, 5.0);
        let grid = TimeGrid::new(5.0, 10).unwrap();
        let opts = OdeOptions { tolerance: Some(1e-12), ..OdeOptions::default() };
        let r = evolve_ode_with(&b, &h, BracketSpec::commutator(), 1.0, &grid, 1.0, opts).unwrap();
        assert!(r.tolerance_exceeded);
        assert!(evolve_ode(&b, &Operator::zeros(2), BracketSpec::commutator(), 1.0, &grid, 1.0).is_err());
    }
}
