//! Rewrite systems over generator words and the normal-ordering engine.
//!
//! A rule rewrites one adjacent pair `b a` into a polynomial. Accepted rules
//! satisfy the termination witness checked in [`RuleSet::new`]: every word on
//! the right-hand side is either shorter than two letters, or is exactly the
//! sorted pair `a b` with `a < b`. Rewriting inside a context then replaces a
//! word by words that are shorter or have one inversion fewer, so the
//! multiset of `(length, inversions)` strictly decreases.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::coeff::QCoefficient;
use super::poly::{Generator, QPolynomial, Word};
use super::SymbError;

/// Default cap on rule applications per normal-ordering call.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs: (Generator, Generator),
    pub rhs: QPolynomial,
}

impl Rule {
    pub fn new(left: Generator, right: Generator, rhs: QPolynomial) -> Self {
        Self { lhs: (left, right), rhs }
    }
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    name: String,
    alphabet: BTreeSet<Generator>,
    rules: HashMap<(Generator, Generator), QPolynomial>,
}

/// Which redex to rewrite first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalOrderOptions {
    pub strategy: Strategy,
    pub budget: usize,
}

impl Default for NormalOrderOptions {
    fn default() -> Self {
        Self { strategy: Strategy::Leftmost, budget: DEFAULT_BUDGET }
    }
}

fn check_rule(alphabet: &BTreeSet<Generator>, rule: &Rule) -> Result<(), String> {
    let (b, a) = rule.lhs;
    for g in [b, a].into_iter().chain(rule.rhs.generators()) {
        if !alphabet.contains(&g) {
            return Err(format!("generator {g} is outside the alphabet"));
        }
    }
    for (w, _) in rule.rhs.terms() {
        match w.len() {
            0 | 1 => {}
            2 if b > a && w.generators() == [a, b] => {}
            2 => return Err(format!("right-hand word {w} is not the sorted pair {a}*{b}")),
            _ => return Err(format!("right-hand word {w} is longer than the pattern")),
        }
    }
    Ok(())
}

impl RuleSet {
    /// Builds a rule set, rejecting rules that violate the termination witness.
    pub fn new(
        name: impl Into<String>,
        alphabet: impl IntoIterator<Item = Generator>,
        rules: Vec<Rule>,
    ) -> Result<Self, SymbError> {
        let name = name.into();
        let alphabet: BTreeSet<Generator> = alphabet.into_iter().collect();
        let mut map = HashMap::new();
        for rule in rules {
            let lhs = format!("{}*{}", rule.lhs.0, rule.lhs.1);
            check_rule(&alphabet, &rule)
                .map_err(|reason| SymbError::InvalidRule { rule_set: name.clone(), lhs: lhs.clone(), reason })?;
            if map.insert(rule.lhs, rule.rhs).is_some() {
                return Err(SymbError::InvalidRule {
                    rule_set: name,
                    lhs,
                    reason: "duplicate left-hand side".into(),
                });
            }
        }
        Ok(Self { name, alphabet, rules: map })
    }

    /// Skips the termination witness. Only the application budget guards
    /// against non-terminating rules built this way.
    pub fn new_unchecked(
        name: impl Into<String>,
        alphabet: impl IntoIterator<Item = Generator>,
        rules: Vec<Rule>,
    ) -> Self {
        Self {
            name: name.into(),
            alphabet: alphabet.into_iter().collect(),
            rules: rules.into_iter().map(|r| (r.lhs, r.rhs)).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &BTreeSet<Generator> {
        &self.alphabet
    }

    pub fn rule(&self, left: Generator, right: Generator) -> Option<&QPolynomial> {
        self.rules.get(&(left, right))
    }

    pub fn rules(&self) -> impl Iterator<Item = Rule> + '_ {
        let mut v: Vec<Rule> = self.rules.iter().map(|(&lhs, rhs)| Rule { lhs, rhs: rhs.clone() }).collect();
        v.sort_by_key(|r| r.lhs);
        v.into_iter()
    }

    /// Position-momentum algebra with dilatation:
    /// `x p − p x = iħΛ`, `Λx = q⁻¹ xΛ`, `Λp = q pΛ`, and the formal inverse `Λ⁻¹`.
    pub fn position_momentum() -> Self {
        use Generator::{Lambda, LambdaInv, P, X};
        let ih = &QCoefficient::imag() * &QCoefficient::hbar();
        let rules = vec![
            // p x = x p − iħΛ
            Rule::new(P, X, &QPolynomial::word(&[X, P]) - &QPolynomial::monomial(ih, Word::new([Lambda]))),
            Rule::new(Lambda, X, QPolynomial::monomial(QCoefficient::q_pow(-1), Word::new([X, Lambda]))),
            Rule::new(Lambda, P, QPolynomial::monomial(QCoefficient::q_pow(1), Word::new([P, Lambda]))),
            Rule::new(LambdaInv, X, QPolynomial::monomial(QCoefficient::q_pow(1), Word::new([X, LambdaInv]))),
            Rule::new(LambdaInv, P, QPolynomial::monomial(QCoefficient::q_pow(-1), Word::new([P, LambdaInv]))),
            Rule::new(LambdaInv, Lambda, QPolynomial::one()),
            Rule::new(Lambda, LambdaInv, QPolynomial::one()),
        ];
        Self::new("position-momentum", [X, P, Lambda, LambdaInv], rules).expect("built-in rules are valid")
    }

    /// q-oscillator: `a a† = 1 + q a† a`.
    pub fn oscillator() -> Self {
        use Generator::{ADag, A};
        let rules = vec![Rule::new(
            A,
            ADag,
            &QPolynomial::one() + &QPolynomial::monomial(QCoefficient::q_pow(1), Word::new([ADag, A])),
        )];
        Self::new("oscillator", [ADag, A], rules).expect("built-in rules are valid")
    }

    /// Two commuting deformed pairs:
    /// `q^{1/2} x y − q^{−1/2} y x = iΛ` and the same for the tilde pair;
    /// hatted and tilde generators commute; `Λ`, `Λ̃` are central markers.
    pub fn deformed_phase_space() -> Self {
        use Generator::{Lambda, LambdaT, Xt, Yt, X, Y};
        let i_sqrt_q = &QCoefficient::imag() * &QCoefficient::sqrt_q_pow(1);
        let swap = |l: Generator, r: Generator| Rule::new(l, r, QPolynomial::word(&[r, l]));
        let mut rules = vec![
            // y x = q x y − i q^{1/2} Λ
            Rule::new(
                Y,
                X,
                &QPolynomial::monomial(QCoefficient::q_pow(1), Word::new([X, Y]))
                    - &QPolynomial::monomial(i_sqrt_q.clone(), Word::new([Lambda])),
            ),
            Rule::new(
                Yt,
                Xt,
                &QPolynomial::monomial(QCoefficient::q_pow(1), Word::new([Xt, Yt]))
                    - &QPolynomial::monomial(i_sqrt_q, Word::new([LambdaT])),
            ),
            swap(Lambda, X),
            swap(Lambda, Y),
            swap(LambdaT, Xt),
            swap(LambdaT, Yt),
        ];
        for tilde in [Xt, Yt, LambdaT] {
            for hat in [X, Y, Lambda] {
                rules.push(swap(tilde, hat));
            }
        }
        Self::new("deformed-phase-space", [X, Y, Lambda, Xt, Yt, LambdaT], rules)
            .expect("built-in rules are valid")
    }
}

fn find_redex(rules: &RuleSet, w: &[Generator], strategy: Strategy) -> Option<usize> {
    let hit = |i: &usize| rules.rules.contains_key(&(w[*i], w[*i + 1]));
    let n = w.len().saturating_sub(1);
    match strategy {
        Strategy::Leftmost => (0..n).find(hit),
        Strategy::Rightmost => (0..n).rev().find(hit),
    }
}

pub fn normal_order(poly: &QPolynomial, rules: &RuleSet) -> Result<QPolynomial, SymbError> {
    normal_order_with(poly, rules, NormalOrderOptions::default())
}

pub fn normal_order_with(
    poly: &QPolynomial,
    rules: &RuleSet,
    opts: NormalOrderOptions,
) -> Result<QPolynomial, SymbError> {
    if let Some(g) = poly.generators().into_iter().find(|g| !rules.alphabet.contains(g)) {
        return Err(SymbError::UnsupportedGenerator { generator: g, rule_set: rules.name.clone() });
    }
    // Pending terms merge by word, so repeated subwords are rewritten once.
    let mut pending: BTreeMap<Word, QCoefficient> = BTreeMap::new();
    for (w, c) in poly.terms() {
        accumulate(&mut pending, w.clone(), c.clone());
    }
    let mut out = QPolynomial::zero();
    let mut applied = 0usize;
    while let Some((word, coeff)) = pending.pop_first() {
        match find_redex(rules, word.generators(), opts.strategy) {
            None => out.add_term(word, coeff),
            Some(i) => {
                applied += 1;
                if applied > opts.budget {
                    return Err(SymbError::BudgetExceeded { budget: opts.budget });
                }
                let g = word.generators();
                let rhs = &rules.rules[&(g[i], g[i + 1])];
                for (rw, rc) in rhs.terms() {
                    let mut v = g[..i].to_vec();
                    v.extend_from_slice(rw.generators());
                    v.extend_from_slice(&g[i + 2..]);
                    accumulate(&mut pending, Word(v), &coeff * rc);
                }
            }
        }
    }
    out.set_ordered_under(&rules.name);
    Ok(out)
}

fn accumulate(map: &mut BTreeMap<Word, QCoefficient>, word: Word, c: QCoefficient) {
    if c.is_zero() {
        return;
    }
    let remove = {
        let slot = map.entry(word.clone()).or_default();
        *slot = &*slot + &c;
        slot.is_zero()
    };
    if remove {
        map.remove(&word);
    }
}

/// True when no rule of `rules` applies anywhere in `poly`.
pub fn is_normal(poly: &QPolynomial, rules: &RuleSet) -> bool {
    poly.terms().all(|(w, _)| find_redex(rules, w.generators(), Strategy::Leftmost).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    fn ih() -> QCoefficient {
        &QCoefficient::imag() * &QCoefficient::hbar()
    }

    #[test]
    fn builtin_sets_are_valid_and_sorted() {
        for rs in [RuleSet::position_momentum(), RuleSet::oscillator(), RuleSet::deformed_phase_space()] {
            for r in rs.rules() {
                for (w, _) in r.rhs.terms() {
                    assert!(w.len() < 2 || w.is_sorted(), "{} {w}", rs.name());
                }
            }
        }
    }

    #[test]
    fn commutator_of_x_and_p() {
        let pm = RuleSet::position_momentum();
        let f = &QPolynomial::word(&[P, X]) - &QPolynomial::word(&[X, P]);
        let n = normal_order(&f, &pm).unwrap();
        assert_eq!(n, QPolynomial::monomial(-ih(), Word::new([Lambda])));
        assert_eq!(n.ordered_under(), Some("position-momentum"));
    }

    #[test]
    fn x_with_p_squared() {
        let pm = RuleSet::position_momentum();
        let f = &QPolynomial::word(&[X, P, P]) - &QPolynomial::word(&[P, P, X]);
        let n = normal_order(&f, &pm).unwrap();
        let expected = QPolynomial::monomial(&ih() * &(&QCoefficient::one() + &QCoefficient::q_pow(1)), Word::new([P, Lambda]));
        assert_eq!(n, expected);
    }

    #[test]
    fn oscillator_relation() {
        let osc = RuleSet::oscillator();
        let n = normal_order(&QPolynomial::word(&[A, ADag]), &osc).unwrap();
        let expected = &QPolynomial::one() + &QPolynomial::monomial(QCoefficient::q_pow(1), Word::new([ADag, A]));
        assert_eq!(n, expected);
    }

    #[test]
    fn dilatation_inverse_cancels() {
        let pm = RuleSet::position_momentum();
        let n = normal_order(&QPolynomial::word(&[Lambda, X, LambdaInv]), &pm).unwrap();
        assert_eq!(n, QPolynomial::monomial(QCoefficient::q_pow(-1), Word::new([X])));
    }

    #[test]
    fn rejects_rules_without_witness() {
        let bad_order = RuleSet::new("bad", [X, P], vec![Rule::new(X, P, QPolynomial::word(&[P, X]))]);
        assert!(matches!(bad_order, Err(SymbError::InvalidRule { .. })));
        let too_long = RuleSet::new("bad", [X, P], vec![Rule::new(P, X, QPolynomial::word(&[X, P, P]))]);
        assert!(matches!(too_long, Err(SymbError::InvalidRule { .. })));
        let foreign = RuleSet::new("bad", [X, P], vec![Rule::new(P, X, QPolynomial::word(&[A]))]);
        assert!(matches!(foreign, Err(SymbError::InvalidRule { .. })));
        let dup = RuleSet::new(
            "bad",
            [X, P],
            vec![Rule::new(P, X, QPolynomial::word(&[X, P])), Rule::new(P, X, QPolynomial::one())],
        );
        assert!(matches!(dup, Err(SymbError::InvalidRule { .. })));
    }

    #[test]
    fn budget_guards_looping_rules() {
        let looping = RuleSet::new_unchecked(
            "loop",
            [X, P],
            vec![Rule::new(P, X, QPolynomial::word(&[X, P])), Rule::new(X, P, QPolynomial::word(&[P, X]))],
        );
        let opts = NormalOrderOptions { budget: 1000, ..Default::default() };
        let r = normal_order_with(&QPolynomial::word(&[P, X]), &looping, opts);
        assert_eq!(r, Err(SymbError::BudgetExceeded { budget: 1000 }));
    }

    #[test]
    fn foreign_generators_rejected() {
        let r = normal_order(&QPolynomial::word(&[A, X]), &RuleSet::position_momentum());
        assert!(matches!(r, Err(SymbError::UnsupportedGenerator { generator: A, .. })));
        let r = normal_order(&QPolynomial::word(&[Sx]), &RuleSet::oscillator());
        assert!(r.is_err());
    }

    #[test]
    fn tilde_family_commutes_with_hatted() {
        let h = RuleSet::deformed_phase_space();
        let n = normal_order(&QPolynomial::word(&[Yt, Xt, Y, X]), &h).unwrap();
        assert!(n.terms().all(|(w, _)| w.is_sorted()));
        assert!(is_normal(&n, &h));
    }
}
