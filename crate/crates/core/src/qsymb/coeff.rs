//! Exact scalar coefficients: Laurent polynomials in `q^{1/2}` and `ħ`, plus
//! optional named commuting parameters, over the complex rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::opcore::C64;

use super::SymbError;

pub type CRational = Complex<BigRational>;

pub fn crat(num: i64, den: i64) -> CRational {
    Complex::new(BigRational::new(BigInt::from(num), BigInt::from(den)), BigRational::zero())
}

pub fn crat_i() -> CRational {
    Complex::new(BigRational::zero(), BigRational::one())
}

fn crat_inverse(z: &CRational) -> Option<CRational> {
    let n = &z.re * &z.re + &z.im * &z.im;
    if n.is_zero() {
        return None;
    }
    Some(Complex::new(&z.re / &n, -(&z.im / &n)))
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn crat_to_c64(z: &CRational) -> C64 {
    C64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// `q^{1/2}`
    SqrtQ,
    Hbar,
    Param(String),
}

/// Product of symbols with nonzero integer exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Symbol, i32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn of(symbol: Symbol, power: i32) -> Self {
        let mut m = BTreeMap::new();
        if power != 0 {
            m.insert(symbol, power);
        }
        Self(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, symbol: &Symbol) -> i32 {
        self.0.get(symbol).copied().unwrap_or(0)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, i32)> {
        self.0.iter().map(|(s, &e)| (s, e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (sym, &e) in &other.0 {
            let slot = out.entry(sym.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                out.remove(sym);
            }
        }
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|(s, &e)| (s.clone(), -e)).collect())
    }

    fn without(&self, symbol: &Symbol) -> Monomial {
        let mut m = self.0.clone();
        m.remove(symbol);
        Monomial(m)
    }
}

/// Values for the symbols of a coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericContext {
    pub q: f64,
    pub hbar: f64,
    pub params: BTreeMap<String, f64>,
}

impl NumericContext {
    pub fn new(q: f64, hbar: f64) -> Self {
        Self { q, hbar, params: BTreeMap::new() }
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    fn value(&self, symbol: &Symbol) -> Result<f64, SymbError> {
        match symbol {
            Symbol::SqrtQ => Ok(self.q.sqrt()),
            Symbol::Hbar => Ok(self.hbar),
            Symbol::Param(name) => self
                .params
                .get(name)
                .copied()
                .ok_or_else(|| SymbError::UnboundParameter(name.clone())),
        }
    }
}

/// Finite sum of monomials with complex-rational coefficients; zero terms pruned.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QCoefficient {
    terms: BTreeMap<Monomial, CRational>,
}

impl QCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(crat(1, 1))
    }

    pub fn constant(c: CRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(crat(n, 1))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::constant(crat(num, den))
    }

    pub fn imag() -> Self {
        Self::constant(crat_i())
    }

    pub fn term(c: CRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    /// `q^{k/2}`.
    pub fn sqrt_q_pow(k: i32) -> Self {
        Self::term(crat(1, 1), Monomial::of(Symbol::SqrtQ, k))
    }

    /// `q^k`.
    pub fn q_pow(k: i32) -> Self {
        Self::sqrt_q_pow(2 * k)
    }

    pub fn hbar() -> Self {
        Self::term(crat(1, 1), Monomial::of(Symbol::Hbar, 1))
    }

    pub fn param(name: impl Into<String>) -> Self {
        Self::term(crat(1, 1), Monomial::of(Symbol::Param(name.into()), 1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, c: CRational) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(m.clone()).or_insert_with(Complex::zero);
            *slot = &*slot + &c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    /// Inverse of a single-term coefficient.
    pub fn inverse(&self) -> Option<QCoefficient> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        Some(Self::term(crat_inverse(c)?, m.inverse()))
    }

    pub fn evaluate(&self, ctx: &NumericContext) -> Result<C64, SymbError> {
        let mut total = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = crat_to_c64(c);
            for (sym, e) in m.symbols() {
                v *= match sym {
                    // Even powers of q^{1/2} go through q itself to avoid sqrt rounding.
                    Symbol::SqrtQ if e % 2 == 0 => ctx.q.powi(e / 2),
                    Symbol::SqrtQ => ctx.q.powi(e.div_euclid(2)) * ctx.q.sqrt(),
                    _ => ctx.value(sym)?.powi(e),
                };
            }
            total += v;
        }
        Ok(total)
    }

    /// Sets `q^{1/2} = 1`.
    pub fn at_q_one(&self) -> QCoefficient {
        let mut out = QCoefficient::zero();
        for (m, c) in &self.terms {
            out.add_term(m.without(&Symbol::SqrtQ), c.clone());
        }
        out
    }

    pub fn has_symbol(&self, symbol: &Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(symbol) != 0)
    }
}

impl Add for &QCoefficient {
    type Output = QCoefficient;

    fn add(self, rhs: &QCoefficient) -> QCoefficient {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &QCoefficient {
    type Output = QCoefficient;

    fn sub(self, rhs: &QCoefficient) -> QCoefficient {
        self + &(-rhs)
    }
}

impl Neg for &QCoefficient {
    type Output = QCoefficient;

    fn neg(self) -> QCoefficient {
        QCoefficient { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Mul for &QCoefficient {
    type Output = QCoefficient;

    fn mul(self, rhs: &QCoefficient) -> QCoefficient {
        let mut out = QCoefficient::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for QCoefficient {
            type Output = QCoefficient;
            fn $method(self, rhs: QCoefficient) -> QCoefficient {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for QCoefficient {
    type Output = QCoefficient;

    fn neg(self) -> QCoefficient {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a complex rational. The bool reports whether the text is a bare
/// sum that needs parentheses inside a product.
fn fmt_crat(z: &CRational) -> (String, bool) {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => (fmt_rational(&z.re), false),
        (true, false) => {
            let s = if z.im.is_one() {
                "i".to_string()
            } else if (-&z.im).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rational(&z.im))
            };
            (s, false)
        }
        (false, false) => {
            let sign = if z.im.is_negative() { "-" } else { "+" };
            let im = z.im.abs();
            let im = if im.is_one() { "i".to_string() } else { format!("{}*i", fmt_rational(&im)) };
            (format!("{} {} {}", fmt_rational(&z.re), sign, im), true)
        }
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (sym, e) in m.symbols() {
        let (name, e_num, e_den) = match sym {
            Symbol::SqrtQ if e % 2 == 0 => ("q".to_string(), e / 2, 1),
            Symbol::SqrtQ => ("q".to_string(), e, 2),
            Symbol::Hbar => ("hbar".to_string(), e, 1),
            Symbol::Param(p) => (p.clone(), e, 1),
        };
        let part = match (e_num, e_den) {
            (1, 1) => name,
            (n, 1) if n > 0 => format!("{name}^{n}"),
            (n, 1) => format!("{name}^({n})"),
            (n, d) => format!("{name}^({n}/{d})"),
        };
        parts.push(part);
    }
    parts.join("*")
}

impl fmt::Display for QCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Ascending powers of q, then the stored order.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| m.exponent(&Symbol::SqrtQ));
        let mut first = true;
        for (m, c) in terms {
            let (mut cs, compound) = fmt_crat(c);
            let mut negative = false;
            if !compound && cs.starts_with('-') {
                negative = true;
                cs.remove(0);
            }
            if !first {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            } else if negative {
                write!(f, "-")?;
            }
            first = false;
            let ms = fmt_monomial(m);
            match (ms.is_empty(), cs.as_str(), compound) {
                (true, _, true) => write!(f, "({cs})")?,
                (true, _, false) => write!(f, "{cs}")?,
                (false, "1", false) => write!(f, "{ms}")?,
                (false, _, true) => write!(f, "({cs})*{ms}")?,
                (false, _, false) => write!(f, "{cs}*{ms}")?,
            }
        }
        Ok(())
    }
}
