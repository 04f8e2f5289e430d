//! Exact symbolic algebra for the deformed generators.
//!
//! Polynomials in noncommuting generators with coefficients in
//! `Q(i)[q^{±1/2}, ħ^{±1}]`, normal ordering under named rewrite systems and
//! an evaluator onto matrices.

pub mod coeff;
pub mod conventions;
pub mod parse;
pub mod poly;
pub mod random;
pub mod rules;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::opcore::{OpError, Operator, C64};

pub use conventions::{convention_report, conventions, ConventionReport, ConventionRow};
pub use coeff::{crat, crat_i, crat_to_c64, CRational, Monomial, NumericContext, QCoefficient, Symbol};
pub use parse::{parse, parse_with, ParseContext};
pub use poly::{Generator, QPolynomial, Word};
pub use rules::{is_normal, normal_order, normal_order_with, NormalOrderOptions, Rule, RuleSet, Strategy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol '{name}' at {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("division at {pos} is not by a nonzero single-term scalar")]
    InvalidDivisor { pos: usize },
    #[error("normal ordering exceeded the budget of {budget} rule applications")]
    BudgetExceeded { budget: usize },
    #[error("rule {lhs} in rule set '{rule_set}' rejected: {reason}")]
    InvalidRule { rule_set: String, lhs: String, reason: String },
    #[error("generator {generator} is not in the alphabet of rule set '{rule_set}'")]
    UnsupportedGenerator { generator: Generator, rule_set: String },
    #[error("operands were normal-ordered under different rule sets ('{left}' vs '{right}')")]
    MixedRuleSets { left: String, right: String },
    #[error("operand is not the output of normal ordering")]
    NotNormalOrdered,
    #[error("no value bound for parameter '{0}'")]
    UnboundParameter(String),
    #[error("no matrix supplied for generator {0}")]
    MissingMatrix(Generator),
    #[error(transparent)]
    Operator(#[from] OpError),
}

/// `[f, g] = αfg − βgf` with exact weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbBracket {
    pub alpha: QCoefficient,
    pub beta: QCoefficient,
}

impl SymbBracket {
    pub fn new(alpha: QCoefficient, beta: QCoefficient) -> Self {
        Self { alpha, beta }
    }

    pub fn commutator() -> Self {
        Self::new(QCoefficient::one(), QCoefficient::one())
    }

    /// `(1, q)`
    pub fn q_commutator() -> Self {
        Self::new(QCoefficient::one(), QCoefficient::q_pow(1))
    }

    /// `(q^{1/2}, q^{−1/2})`
    pub fn symmetric() -> Self {
        Self::new(QCoefficient::sqrt_q_pow(1), QCoefficient::sqrt_q_pow(-1))
    }
}

/// Normal-ordered `αfg − βgf`.
pub fn symb_bracket(
    f: &QPolynomial,
    g: &QPolynomial,
    spec: &SymbBracket,
    rules: &RuleSet,
) -> Result<QPolynomial, SymbError> {
    let raw = &(f * g).scale(&spec.alpha) - &(g * f).scale(&spec.beta);
    normal_order(&raw, rules)
}

/// Exact equality of two normal forms produced under the same rule set.
pub fn canonical_equal(f: &QPolynomial, g: &QPolynomial) -> Result<bool, SymbError> {
    match (f.ordered_under(), g.ordered_under()) {
        (Some(a), Some(b)) if a == b => Ok(f == g),
        (Some(a), Some(b)) => Err(SymbError::MixedRuleSets { left: a.to_string(), right: b.to_string() }),
        _ => Err(SymbError::NotNormalOrdered),
    }
}

/// Evaluates every coefficient; words whose value is exactly zero are kept.
pub fn substitute_numeric(poly: &QPolynomial, ctx: &NumericContext) -> Result<BTreeMap<Word, C64>, SymbError> {
    poly.terms().map(|(w, c)| Ok((w.clone(), c.evaluate(ctx)?))).collect()
}

/// Sums `coeff · M(g1)…M(gk)` with generators replaced by the supplied
/// matrices. `dim` fixes the size of the unit word.
pub fn eval_on_matrices(
    poly: &QPolynomial,
    ctx: &NumericContext,
    matrices: &BTreeMap<Generator, Operator>,
    dim: usize,
) -> Result<Operator, SymbError> {
    let mut acc = Operator::zeros(dim);
    for (w, c) in substitute_numeric(poly, ctx)? {
        let mut prod = Operator::identity(dim);
        for g in w.generators() {
            let m = matrices.get(g).ok_or(SymbError::MissingMatrix(*g))?;
            prod = prod.checked_mul(m)?;
        }
        acc = acc.checked_add(&prod.scale(c))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    fn ih() -> QCoefficient {
        &QCoefficient::imag() * &QCoefficient::hbar()
    }

    #[test]
    fn bracket_with_self_vanishes() {
        let pm = RuleSet::position_momentum();
        let f = parse("x p + 2 L x").unwrap();
        assert!(symb_bracket(&f, &f, &SymbBracket::commutator(), &pm).unwrap().is_zero());
    }

    #[test]
    fn oscillator_bracket_with_hamiltonian() {
        // H = (ħω/2)(a a† + a† a); [a, qH]_{(1,q)} = qħω a exactly.
        let osc = RuleSet::oscillator();
        let ctx = ParseContext::with_params(&["w"]);
        let qh = parse_with("q * hbar*w/2 * (a adag + adag a)", &ctx).unwrap();
        let a = QPolynomial::generator(A);
        let got = symb_bracket(&a, &qh, &SymbBracket::q_commutator(), &osc).unwrap();
        let want = normal_order(&parse_with("q hbar w a", &ctx).unwrap(), &osc).unwrap();
        assert!(canonical_equal(&got, &want).unwrap());
        // The plain commutator is not proportional to a.
        let plain = symb_bracket(&a, &qh, &SymbBracket::commutator(), &osc).unwrap();
        assert!(plain.coefficient(&Word::new([ADag, A, A])).is_some());
    }

    #[test]
    fn canonical_equality_examples() {
        let pm = RuleSet::position_momentum();
        let f = normal_order(&parse("x p").unwrap(), &pm).unwrap();
        assert!(canonical_equal(&f, &f).unwrap());
        let g = normal_order(&parse("p x + i hbar L").unwrap(), &pm).unwrap();
        assert!(canonical_equal(&f, &g).unwrap());
        let h = normal_order(&parse("p x").unwrap(), &pm).unwrap();
        assert!(!canonical_equal(&f, &h).unwrap());

        let osc = RuleSet::oscillator();
        let one = normal_order(&QPolynomial::one(), &osc).unwrap();
        let one_pm = normal_order(&QPolynomial::one(), &pm).unwrap();
        assert!(matches!(canonical_equal(&one, &one_pm), Err(SymbError::MixedRuleSets { .. })));
        assert_eq!(canonical_equal(&parse("x").unwrap(), &f), Err(SymbError::NotNormalOrdered));
    }

    #[test]
    fn substitute_examples() {
        let ctx = NumericContext::new(2.0, 1.0);
        let m = substitute_numeric(&QPolynomial::monomial(ih(), Word::new([Lambda])), &ctx).unwrap();
        assert_eq!(m[&Word::new([Lambda])], C64::new(0.0, 1.0));

        let p = parse("(1 + q) p L").unwrap();
        let m = substitute_numeric(&p, &NumericContext::new(3.0, 1.0)).unwrap();
        assert_eq!(m[&Word::new([P, Lambda])], C64::new(4.0, 0.0));

        let m = substitute_numeric(&parse("sqrtq").unwrap(), &NumericContext::new(4.0, 1.0)).unwrap();
        assert_eq!(m[&Word::unit()], C64::new(2.0, 0.0));
    }

    #[test]
    fn matrix_evaluation_needs_every_generator() {
        let mut mats = BTreeMap::new();
        mats.insert(X, Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]));
        let ctx = NumericContext::new(1.0, 1.0);
        let v = eval_on_matrices(&parse("3 x x + 1").unwrap(), &ctx, &mats, 2).unwrap();
        assert_eq!(v.get(1, 1), C64::new(13.0, 0.0));
        assert_eq!(
            eval_on_matrices(&parse("x p").unwrap(), &ctx, &mats, 2),
            Err(SymbError::MissingMatrix(P))
        );
    }
}
