//! Pointwise evaluation of jet expressions, exact where possible.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::{JetExpr, Monomial, MultiIndex};
use crate::param::{FieldError, ParamField, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value for `{0}`")]
    Unbound(String),
    #[error("{0} has no exact rational value")]
    Transcendental(&'static str),
    #[error("exponent {0} is not an integer")]
    NonIntegerPower(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Values for every coordinate of the jet space plus parameter bindings.
///
/// Opaque atoms take their values from `fders` (`F^(j)(u)`), `mu` and `damp`
/// (`a^(j)(t)`); these are free and need not be mutually consistent unless a
/// test relies on it.
#[derive(Clone, Debug, Default)]
pub struct JetPoint {
    pub t: BigRational,
    /// `x[k-1]` is `x_k`.
    pub x: Vec<BigRational>,
    pub u: BigRational,
    pub derivs: BTreeMap<MultiIndex, BigRational>,
    pub fders: Vec<BigRational>,
    pub mu: BigRational,
    pub damp: Vec<BigRational>,
    pub params: BTreeMap<Symbol, BigRational>,
}

impl JetPoint {
    pub fn param(&self, s: Symbol) -> Option<BigRational> {
        self.params.get(&s).cloned()
    }

    fn field(&self, f: &ParamField) -> Result<BigRational, EvalError> {
        Ok(f.eval(&|s| self.param(s))?)
    }

    fn int_exponent(&self, f: &ParamField) -> Result<i32, EvalError> {
        let r = self.field(f)?;
        if !r.denom().is_one() {
            return Err(EvalError::NonIntegerPower(r.to_string()));
        }
        r.numer().to_i32().ok_or_else(|| EvalError::NonIntegerPower(r.to_string()))
    }

    fn deriv(&self, j: &MultiIndex) -> Result<&BigRational, EvalError> {
        self.derivs.get(j).ok_or_else(|| EvalError::Unbound(format!("u_{:?}", j.vars())))
    }
}

fn rpow(base: &BigRational, e: i32, what: &str) -> Result<BigRational, EvalError> {
    if e < 0 && base.is_zero() {
        return Err(EvalError::Domain(format!("{} = 0 raised to {}", what, e)));
    }
    Ok(if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    })
}

fn at<'a>(v: &'a [BigRational], i: usize, what: &str) -> Result<&'a BigRational, EvalError> {
    v.get(i).ok_or_else(|| EvalError::Unbound(format!("{}{}", what, i)))
}

fn mono_exact(m: &Monomial, p: &JetPoint) -> Result<BigRational, EvalError> {
    if !m.exp_u.is_zero() {
        return Err(EvalError::Transcendental("exp"));
    }
    if m.log_t > 0 || m.log_u > 0 {
        return Err(EvalError::Transcendental("log"));
    }
    let mut acc = BigRational::one();
    for (j, k) in &m.derivs {
        acc *= num_traits::pow(p.deriv(j)?.clone(), *k as usize);
    }
    if !m.u_pow.is_zero() {
        acc *= rpow(&p.u, p.int_exponent(&m.u_pow)?, "u")?;
    }
    for (j, k) in &m.fders {
        acc *= num_traits::pow(at(&p.fders, *j as usize, "F")?.clone(), *k as usize);
    }
    if !m.t_pow.is_zero() {
        acc *= rpow(&p.t, p.int_exponent(&m.t_pow)?, "t")?;
    }
    for (i, k) in m.x_pows.iter().enumerate() {
        if *k > 0 {
            acc *= num_traits::pow(at(&p.x, i, "x")?.clone(), *k as usize);
        }
    }
    if m.mu_pow != 0 {
        acc *= rpow(&p.mu, m.mu_pow, "mu")?;
    }
    for (j, k) in &m.damp {
        acc *= num_traits::pow(at(&p.damp, *j as usize, "a")?.clone(), *k as usize);
    }
    Ok(acc)
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn mono_f64(m: &Monomial, p: &JetPoint) -> Result<f64, EvalError> {
    let mut acc = 1.0;
    for (j, k) in &m.derivs {
        acc *= f(p.deriv(j)?).powi(*k as i32);
    }
    let u = f(&p.u);
    let t = f(&p.t);
    if !m.u_pow.is_zero() {
        let e = p.field(&m.u_pow)?;
        acc *= if e.denom().is_one() { u.powi(e.numer().to_i32().unwrap_or(i32::MAX)) } else { u.powf(f(&e)) };
    }
    if !m.exp_u.is_zero() {
        acc *= (f(&p.field(&m.exp_u)?) * u).exp();
    }
    if m.log_u > 0 {
        acc *= u.abs().ln().powi(m.log_u as i32);
    }
    for (j, k) in &m.fders {
        acc *= f(at(&p.fders, *j as usize, "F")?).powi(*k as i32);
    }
    if !m.t_pow.is_zero() {
        let e = p.field(&m.t_pow)?;
        acc *= if e.denom().is_one() { t.powi(e.numer().to_i32().unwrap_or(i32::MAX)) } else { t.powf(f(&e)) };
    }
    if m.log_t > 0 {
        if t <= 0.0 {
            return Err(EvalError::Domain("ln t with t <= 0".into()));
        }
        acc *= t.ln().powi(m.log_t as i32);
    }
    for (i, k) in m.x_pows.iter().enumerate() {
        acc *= f(at(&p.x, i, "x")?).powi(*k as i32);
    }
    if m.mu_pow != 0 {
        acc *= f(&p.mu).powi(m.mu_pow);
    }
    for (j, k) in &m.damp {
        acc *= f(at(&p.damp, *j as usize, "a")?).powi(*k as i32);
    }
    Ok(acc)
}

impl JetExpr {
    /// Exact value; fails on `exp`/`log` atoms or non-integer exponents.
    pub fn eval_exact(&self, p: &JetPoint) -> Result<BigRational, EvalError> {
        let mut acc = BigRational::zero();
        for (m, c) in self.terms() {
            acc += p.field(c)? * mono_exact(m, p)?;
        }
        Ok(acc)
    }

    /// Floating-point value; parameters are still instantiated exactly first.
    pub fn eval_f64(&self, p: &JetPoint) -> Result<f64, EvalError> {
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            acc += f(&p.field(c)?) * mono_f64(m, p)?;
        }
        Ok(acc)
    }
}

/// Convenience for building rational values in tests and oracles.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
