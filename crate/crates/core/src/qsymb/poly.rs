use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::coeff::QCoefficient;

/// Noncommuting generators. The declaration order is the normal-ordering
/// order: hatted position-momentum generators first, then `Y` and the
/// dilatation pair, then the oscillator pair (`ADag < A`), then the tilde
/// family, then the spin symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    X,
    P,
    Y,
    Lambda,
    LambdaInv,
    ADag,
    A,
    Xt,
    Yt,
    LambdaT,
    Sx,
    Sy,
    Sz,
}

impl Generator {
    pub const ALL: [Generator; 13] = [
        Generator::X,
        Generator::P,
        Generator::Y,
        Generator::Lambda,
        Generator::LambdaInv,
        Generator::ADag,
        Generator::A,
        Generator::Xt,
        Generator::Yt,
        Generator::LambdaT,
        Generator::Sx,
        Generator::Sy,
        Generator::Sz,
    ];

    /// Name accepted by the expression parser.
    pub fn name(self) -> &'static str {
        match self {
            Generator::X => "x",
            Generator::P => "p",
            Generator::Y => "y",
            Generator::Lambda => "L",
            Generator::LambdaInv => "Linv",
            Generator::ADag => "adag",
            Generator::A => "a",
            Generator::Xt => "xt",
            Generator::Yt => "yt",
            Generator::LambdaT => "Lt",
            Generator::Sx => "Sx",
            Generator::Sy => "Sy",
            Generator::Sz => "Sz",
        }
    }

    pub fn from_name(name: &str) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.name() == name)
    }

    pub fn is_spin(self) -> bool {
        matches!(self, Generator::Sx | Generator::Sy | Generator::Sz)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered product of generators; the empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn new(gens: impl Into<Vec<Generator>>) -> Self {
        Self(gens.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Number of pairs `i < j` with `w[i] > w[j]`.
    pub fn inversions(&self) -> usize {
        let w = &self.0;
        (0..w.len())
            .map(|i| w[i + 1..].iter().filter(|&&g| g < w[i]).count())
            .sum()
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let names: Vec<&str> = self.0.iter().map(|g| g.name()).collect();
        f.write_str(&names.join("*"))
    }
}

/// Noncommutative polynomial: words with exact coefficients.
///
/// `ordered_under` records the rule set that produced this value through
/// normal ordering; any arithmetic clears it.
#[derive(Clone, Debug, Default)]
pub struct QPolynomial {
    terms: BTreeMap<Word, QCoefficient>,
    ordered_under: Option<String>,
}

impl PartialEq for QPolynomial {
    /// Structural equality of the term maps.
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for QPolynomial {}

impl QPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(QCoefficient::one())
    }

    pub fn scalar(c: QCoefficient) -> Self {
        Self::monomial(c, Word::unit())
    }

    pub fn monomial(c: QCoefficient, word: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(word, c);
        p
    }

    pub fn generator(g: Generator) -> Self {
        Self::monomial(QCoefficient::one(), Word(vec![g]))
    }

    pub fn word(gens: &[Generator]) -> Self {
        Self::monomial(QCoefficient::one(), Word(gens.to_vec()))
    }

    pub fn add_term(&mut self, word: Word, c: QCoefficient) {
        self.ordered_under = None;
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(word.clone()).or_default();
            *slot = &*slot + &c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&word);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &QCoefficient)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Word, QCoefficient> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &Word) -> Option<&QCoefficient> {
        self.terms.get(word)
    }

    pub fn ordered_under(&self) -> Option<&str> {
        self.ordered_under.as_deref()
    }

    pub(crate) fn set_ordered_under(&mut self, name: &str) {
        self.ordered_under = Some(name.to_string());
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms.keys().flat_map(|w| w.0.iter().copied()).collect()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &QCoefficient) -> QPolynomial {
        let mut out = QPolynomial::zero();
        for (w, k) in &self.terms {
            out.add_term(w.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> QPolynomial {
        (0..n).fold(QPolynomial::one(), |acc, _| &acc * self)
    }

    /// Replaces every generator in `gens` by the unit, e.g. `Λ → 1`.
    pub fn drop_generators(&self, gens: &[Generator]) -> QPolynomial {
        let mut out = QPolynomial::zero();
        for (w, c) in &self.terms {
            let kept: Vec<Generator> = w.0.iter().copied().filter(|g| !gens.contains(g)).collect();
            out.add_term(Word(kept), c.clone());
        }
        out
    }

    /// Sets `q = 1` in every coefficient.
    pub fn at_q_one(&self) -> QPolynomial {
        let mut out = QPolynomial::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.at_q_one());
        }
        out
    }
}

impl Add for &QPolynomial {
    type Output = QPolynomial;

    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out.ordered_under = None;
        out
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;

    fn neg(self) -> QPolynomial {
        self.scale(&QCoefficient::integer(-1))
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;

    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;

    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = QPolynomial::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for QPolynomial {
            type Output = QPolynomial;
            fn $method(self, rhs: QPolynomial) -> QPolynomial {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for QPolynomial {
    type Output = QPolynomial;

    fn neg(self) -> QPolynomial {
        -&self
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let cs = c.to_string();
            match (w.is_empty(), cs.as_str()) {
                (true, _) if c.num_terms() > 1 => write!(f, "({cs})")?,
                (true, _) => write!(f, "{cs}")?,
                (false, "1") => write!(f, "{w}")?,
                (false, "-1") => write!(f, "-{w}")?,
                (false, _) if c.num_terms() > 1 => write!(f, "({cs})*{w}")?,
                (false, _) => write!(f, "{cs}*{w}")?,
            }
        }
        Ok(())
    }
}
