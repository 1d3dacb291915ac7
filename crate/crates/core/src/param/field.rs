//! The parameter field ℚ(m, f₀, κ, …): rational functions in canonical form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::poly::{fmt_rational, Poly};
use super::symbol::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("denominator vanishes after substitution ({0})")]
    Pole(String),
    #[error("parameter `{0}` has no binding")]
    Unbound(String),
}

/// A ratio of coprime polynomials with a monic denominator.
///
/// Zero is `0/1`. Because numerator and denominator are coprime and the
/// denominator's lex-leading coefficient is 1, two values are equal iff their
/// representations are identical, so the derived `Eq`/`Ord` are sound.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ParamField {
    num: Poly,
    den: Poly,
}

impl Default for ParamField {
    fn default() -> ParamField {
        ParamField::zero()
    }
}

impl ParamField {
    pub fn new(num: Poly, den: Poly) -> ParamField {
        assert!(!den.is_zero(), "ParamField with zero denominator");
        if num.is_zero() {
            return ParamField::zero();
        }
        if let Some(c) = den.constant_value() {
            return ParamField { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let lc = den.leading_coeff().recip();
        ParamField { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn zero() -> ParamField {
        ParamField { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> ParamField {
        ParamField { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> ParamField {
        ParamField { num: Poly::from_int(c), den: Poly::one() }
    }

    pub fn ratio(p: i64, q: i64) -> ParamField {
        ParamField::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn rational(r: BigRational) -> ParamField {
        ParamField { num: Poly::constant(r), den: Poly::one() }
    }

    pub fn symbol(s: Symbol) -> ParamField {
        ParamField { num: Poly::var(s), den: Poly::one() }
    }

    /// Shorthand for `ParamField::symbol(Symbol::named(name))`.
    pub fn sym(name: &str) -> ParamField {
        ParamField::symbol(Symbol::named(name))
    }

    pub fn from_poly(p: Poly) -> ParamField {
        ParamField { num: p, den: Poly::one() }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        let r = self.as_rational()?;
        if r.denom().is_one() {
            r.numer().to_i64()
        } else {
            None
        }
    }

    /// True if `r` is a constant whose sign is negative; symbolic values report false.
    pub fn is_negative_constant(&self) -> bool {
        self.as_rational().map(|r| r.is_negative()).unwrap_or(false)
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut v = self.num.vars();
        for x in self.den.vars() {
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v.sort_unstable();
        v.into_iter().map(Symbol::from_id).collect()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.num.contains_var(s.id()) || self.den.contains_var(s.id())
    }

    pub fn recip(&self) -> ParamField {
        assert!(!self.is_zero(), "reciprocal of zero");
        ParamField::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &ParamField) -> Option<ParamField> {
        if other.is_zero() {
            None
        } else {
            Some(self * &other.recip())
        }
    }

    pub fn pow(&self, k: i32) -> ParamField {
        if k >= 0 {
            ParamField::new(self.num.pow(k as u32), self.den.pow(k as u32))
        } else {
            self.recip().pow(-k)
        }
    }

    fn poly_substitute(p: &Poly, s: Symbol, value: &ParamField) -> ParamField {
        let mut acc = ParamField::zero();
        for (e, c) in p.terms() {
            let k = e.get(s.id()).copied().unwrap_or(0);
            let mut rest = e.clone();
            if s.id() < rest.len() {
                rest[s.id()] = 0;
            }
            let base = ParamField::from_poly(Poly::monomial_from(&rest, c));
            acc = &acc + &(&base * &value.pow(k as i32));
        }
        acc
    }

    /// Replaces symbol `s` by `value` and re-canonicalizes.
    pub fn substitute(&self, s: Symbol, value: &ParamField) -> Result<ParamField, FieldError> {
        if !self.contains(s) {
            return Ok(self.clone());
        }
        let n = Self::poly_substitute(&self.num, s, value);
        let d = Self::poly_substitute(&self.den, s, value);
        if d.is_zero() {
            return Err(FieldError::Pole(format!("{} at {} = {}", self, s, value)));
        }
        Ok(&n / &d)
    }

    /// Exact evaluation with every symbol supplied by `value`.
    pub fn eval<F>(&self, value: &F) -> Result<BigRational, FieldError>
    where
        F: Fn(Symbol) -> Option<BigRational>,
    {
        let lookup = |i: usize| value(Symbol::from_id(i));
        let unbound = || {
            let missing = self
                .symbols()
                .into_iter()
                .find(|s| value(*s).is_none())
                .map(|s| s.name())
                .unwrap_or_default();
            FieldError::Unbound(missing)
        };
        let n = self.num.eval(&lookup).ok_or_else(unbound)?;
        let d = self.den.eval(&lookup).ok_or_else(unbound)?;
        if d.is_zero() {
            return Err(FieldError::Pole(self.to_string()));
        }
        Ok(n / d)
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|r| r.to_f64())
    }
}

impl From<i64> for ParamField {
    fn from(c: i64) -> Self {
        ParamField::from_int(c)
    }
}

impl From<BigRational> for ParamField {
    fn from(r: BigRational) -> Self {
        ParamField::rational(r)
    }
}

impl<'a> Add<&'a ParamField> for &'a ParamField {
    type Output = ParamField;
    fn add(self, rhs: &ParamField) -> ParamField {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ParamField { num: self.num.add(&rhs.num), den: Poly::one() };
        }
        if self.den == rhs.den {
            return ParamField::new(self.num.add(&rhs.num), self.den.clone());
        }
        ParamField::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl<'a> Sub<&'a ParamField> for &'a ParamField {
    type Output = ParamField;
    fn sub(self, rhs: &ParamField) -> ParamField {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ParamField> for &'a ParamField {
    type Output = ParamField;
    fn mul(self, rhs: &ParamField) -> ParamField {
        if self.is_zero() || rhs.is_zero() {
            return ParamField::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ParamField { num: self.num.mul(&rhs.num), den: Poly::one() };
        }
        ParamField::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl<'a> Div<&'a ParamField> for &'a ParamField {
    type Output = ParamField;
    fn div(self, rhs: &ParamField) -> ParamField {
        self.checked_div(rhs).expect("division by zero in ParamField")
    }
}

impl Neg for &ParamField {
    type Output = ParamField;
    fn neg(self) -> ParamField {
        ParamField { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<ParamField> for ParamField {
            type Output = ParamField;
            fn $f(self, rhs: ParamField) -> ParamField { (&self).$f(&rhs) }
        }
        impl<'a> $tr<&'a ParamField> for ParamField {
            type Output = ParamField;
            fn $f(self, rhs: &ParamField) -> ParamField { (&self).$f(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for ParamField {
    type Output = ParamField;
    fn neg(self) -> ParamField {
        -&self
    }
}

impl fmt::Display for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = match self.num.constant_value() {
            Some(c) if c.denom().is_one() => fmt_rational(&c),
            Some(c) => format!("({})", fmt_rational(&c)),
            None if self.num.num_terms() == 1 && !self.num.leading_coeff().is_negative() => {
                self.num.to_string()
            }
            None => format!("({})", self.num),
        };
        let den_vars = self.den.vars();
        let den = if self.den.num_terms() == 1 && den_vars.len() == 1 && self.den.degree_in(den_vars[0]) == 1 {
            self.den.to_string()
        } else {
            format!("({})", self.den)
        };
        write!(f, "{}/{}", num, den)
    }
}
