//! Evaluator for the polynomial dynamical functions under `H = b x + c y`.
//!
//! For `f = Σ α_nm(u) xⁿ yᵐ` the stated solution is
//!
//! ```text
//! f(t) = f(0) + iΛ ∫₀ᵗ Σ α_nm(u) [q^{3/2} c [n] x^{n−1} − q^{1/2} [m] b y^{m−1}] du
//! ```
//!
//! with the q²-base basic numbers. The single-generator cases also have
//! exponential forms `α(0) exp(iλω ∫α)` with `ω = q^{1/2}c` for `x` and
//! `ω = −q^{3/2}b` for `y`. `Λ` is a central marker here: it is kept as a
//! word in the polynomial output and replaced by the scalar `λ` in the
//! exponents. Nothing is solved; the stated forms are made computable so
//! they can be compared.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::opcore::C64;
use crate::qnum::basic_number_paper;
use crate::qsymb::{Generator, Word};

use super::closed::SolutionMode;
use super::DynError;

pub type AlphaFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// One term `α_nm(u) xⁿ yᵐ`.
#[derive(Clone)]
pub struct AlphaTerm {
    pub n: u32,
    pub m: u32,
    pub alpha: AlphaFn,
}

impl fmt::Debug for AlphaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlphaTerm({}, {})", self.n, self.m)
    }
}

impl AlphaTerm {
    pub fn new(n: u32, m: u32, alpha: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self { n, m, alpha: Arc::new(alpha) }
    }

    pub fn constant(n: u32, m: u32, value: f64) -> Self {
        Self::new(n, m, move |_| C64::new(value, 0.0))
    }

    /// `Σ_k coeffs[k] u^k`.
    pub fn polynomial(n: u32, m: u32, coeffs: Vec<f64>) -> Self {
        Self::new(n, m, move |u| C64::new(coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c), 0.0))
    }
}

/// Composite Simpson rule on `[a, b]`; odd step counts are rounded up.
pub fn simpson(f: impl Fn(f64) -> C64, a: f64, b: f64, steps: usize) -> Result<C64, DynError> {
    if steps < 2 {
        return Err(DynError::TooFewQuadratureSteps(steps));
    }
    let n = steps + steps % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + k as f64 * h) * w;
    }
    Ok(acc * (h / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEvalOptions {
    pub q: f64,
    pub b: f64,
    pub c: f64,
    /// Scalar standing in for `Λ` in the exponents.
    pub lambda: f64,
    pub quad_steps: usize,
    /// `Paper` integrates `α₁₀` in the `y` exponent, as printed.
    pub mode: SolutionMode,
}

/// Linear (first-order) and exponential forms of one single-generator term.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleTermReport {
    pub generator: Generator,
    pub omega: f64,
    pub integral: C64,
    /// `α(0) + iλω∫α`
    pub linear: C64,
    /// `α(0) exp(iλω∫α)`
    pub exponential: C64,
    pub difference: f64,
}

/// `Λ` prefactor of a single-generator derivative from the general formula
/// and from the dedicated derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefactorCheck {
    pub generator: Generator,
    pub from_solution: C64,
    pub from_derivative: C64,
}

impl PrefactorCheck {
    pub fn matches(&self, tol: f64) -> bool {
        (self.from_solution - self.from_derivative).norm() <= tol * self.from_derivative.norm().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyReport {
    pub t: f64,
    pub initial: BTreeMap<Word, C64>,
    pub solution: BTreeMap<Word, C64>,
    pub single: Vec<SingleTermReport>,
    pub prefactors: Vec<PrefactorCheck>,
}

fn word(n: u32, m: u32, lambda: bool) -> Word {
    let mut v = vec![Generator::X; n as usize];
    v.extend(std::iter::repeat(Generator::Y).take(m as usize));
    if lambda {
        v.push(Generator::Lambda);
    }
    Word(v)
}

fn add(map: &mut BTreeMap<Word, C64>, w: Word, c: C64) {
    *map.entry(w).or_insert(C64::new(0.0, 0.0)) += c;
}

pub fn poly_coeff_evolution(terms: &[AlphaTerm], opts: &PolyEvalOptions, t: f64) -> Result<PolyReport, DynError> {
    super::positive("q", opts.q)?;
    let PolyEvalOptions { q, b, c, lambda, quad_steps, mode } = *opts;
    let i = C64::new(0.0, 1.0);
    let (sq, sq3) = (q.sqrt(), q * q.sqrt());

    let mut initial = BTreeMap::new();
    let mut solution = BTreeMap::new();
    let mut integrals = Vec::with_capacity(terms.len());
    for term in terms {
        let a0 = (term.alpha)(0.0);
        add(&mut initial, word(term.n, term.m, false), a0);
        add(&mut solution, word(term.n, term.m, false), a0);
        let integral = simpson(|u| (term.alpha)(u), 0.0, t, quad_steps)?;
        integrals.push(integral);
        if term.n >= 1 {
            let bn = basic_number_paper(term.n, q)?;
            add(&mut solution, word(term.n - 1, 0, true), i * sq3 * c * bn * integral);
        }
        if term.m >= 1 {
            let bm = basic_number_paper(term.m, q)?;
            add(&mut solution, word(0, term.m - 1, true), -i * sq * bm * b * integral);
        }
    }
    solution.retain(|_, v| *v != C64::new(0.0, 0.0));
    initial.retain(|_, v| *v != C64::new(0.0, 0.0));

    let find = |n, m| terms.iter().zip(&integrals).find(|(tm, _)| tm.n == n && tm.m == m);
    let mut single = Vec::new();
    if let Some((term, integral)) = find(1, 0) {
        single.push(single_report(Generator::X, (term.alpha)(0.0), sq * c, *integral, lambda));
    }
    if let Some((term, integral)) = find(0, 1) {
        let integral = match mode {
            SolutionMode::Default => *integral,
            SolutionMode::Paper => find(1, 0).map(|(_, i)| *i).unwrap_or_default(),
        };
        single.push(single_report(Generator::Y, (term.alpha)(0.0), -sq3 * b, integral, lambda));
    }

    let prefactors = vec![
        PrefactorCheck { generator: Generator::X, from_solution: i * sq3 * c, from_derivative: i * sq * c },
        PrefactorCheck { generator: Generator::Y, from_solution: -i * sq * b, from_derivative: -i * sq3 * b },
    ];
    Ok(PolyReport { t, initial, solution, single, prefactors })
}

fn single_report(generator: Generator, a0: C64, omega: f64, integral: C64, lambda: f64) -> SingleTermReport {
    let theta = C64::new(0.0, lambda * omega) * integral;
    let linear = a0 + theta;
    let exponential = a0 * theta.exp();
    SingleTermReport { generator, omega, integral, linear, exponential, difference: (exponential - linear).norm() }
}
