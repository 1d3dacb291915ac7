//! Canonical expressions on the second-order jet space over (t, x_1..x_n; u).
//!
//! A [`JetExpr`] is a finite sum of terms `c · M` where `c` is a [`ParamField`]
//! coefficient and `M` a [`Monomial`], a product of atoms:
//!
//! * derivative coordinates `u_J` (`J` an unordered multi-index over `0..=n`,
//!   `0` standing for `t`, order at most 3), with nonnegative integer powers;
//! * `u^e`, `t^e` with `e` in the parameter field;
//! * `exp(c·u)` with `c` in the parameter field;
//! * integer powers of `x_k`, `ln t` and `ln|u|`;
//! * opaque `F^(j)(u)` (the j-th derivative of an unspecified potential);
//! * opaque `μ(t)` and the damping derivatives `a^(j)(t)`, tied by `μ' = aμ`.
//!
//! Terms live in a `BTreeMap` keyed by monomial, so like terms are always
//! merged and the term order is the derived (fixed, total) monomial order.
//! Zero coefficients are never stored, hence equal values have equal maps.

mod calculus;
mod eval;
mod render;
mod sexpr;
mod vector_field;

pub use calculus::{divergence, euler, is_total_divergence, total_derivative, DivergenceTest};
pub use eval::{rat, EvalError, JetPoint};
pub use sexpr::{parse_sexpr, SexprError};
pub use vector_field::{Prolongation, VectorField};

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::param::{FieldError, ParamField, Symbol};

/// Highest derivative order representable in a [`JetExpr`].
pub const MAX_ORDER: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("derivative order overflow: operand has order {0}, cap is {MAX_ORDER}")]
    OrderOverflow(usize),
    #[error("vector field coefficient `{0}` depends on derivatives of u")]
    NotPointField(String),
    #[error("expected {expected} components, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An unordered derivative multi-index of order 1..=MAX_ORDER over variables `0..=n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex {
    len: u8,
    idx: [u8; MAX_ORDER],
}

impl MultiIndex {
    /// Builds from variable indices in any order; `None` if empty or longer than 3.
    pub fn new(vars: &[usize]) -> Option<MultiIndex> {
        if vars.is_empty() || vars.len() > MAX_ORDER {
            return None;
        }
        let mut idx = [0u8; MAX_ORDER];
        for (slot, v) in idx.iter_mut().zip(vars) {
            *slot = *v as u8;
        }
        idx[..vars.len()].sort_unstable();
        Some(MultiIndex { len: vars.len() as u8, idx })
    }

    pub fn single(a: usize) -> MultiIndex {
        MultiIndex::new(&[a]).expect("order 1")
    }

    pub fn order(&self) -> usize {
        self.len as usize
    }

    pub fn vars(&self) -> &[u8] {
        &self.idx[..self.len as usize]
    }

    /// The multi-index with one more derivative in variable `a`.
    pub fn with(&self, a: usize) -> Option<MultiIndex> {
        if self.order() == MAX_ORDER {
            return None;
        }
        let mut v: Vec<usize> = self.vars().iter().map(|x| *x as usize).collect();
        v.push(a);
        MultiIndex::new(&v)
    }
}

fn merge_powers<K: Ord + Copy>(a: &[(K, u32)], b: &[(K, u32)]) -> Vec<(K, u32)> {
    let mut out: Vec<(K, u32)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn bump_power<K: Ord + Copy>(list: &mut Vec<(K, u32)>, key: K, delta: i64) {
    match list.binary_search_by(|e| e.0.cmp(&key)) {
        Ok(i) => {
            let p = list[i].1 as i64 + delta;
            assert!(p >= 0, "negative integer power");
            if p == 0 {
                list.remove(i);
            } else {
                list[i].1 = p as u32;
            }
        }
        Err(i) => {
            assert!(delta > 0, "negative integer power");
            list.insert(i, (key, delta as u32));
        }
    }
}

/// A factor of a [`Monomial`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Atom {
    Deriv(MultiIndex),
    U,
    ExpU,
    LogU,
    /// `F^(j)(u)`.
    F(u32),
    T,
    LogT,
    X(usize),
    Mu,
    /// `a^(j)(t)`.
    Damping(u32),
}

/// A product of atoms. Field order defines the canonical term order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial {
    pub(crate) derivs: Vec<(MultiIndex, u32)>,
    pub(crate) u_pow: ParamField,
    pub(crate) exp_u: ParamField,
    pub(crate) log_u: u32,
    pub(crate) fders: Vec<(u32, u32)>,
    pub(crate) t_pow: ParamField,
    pub(crate) log_t: u32,
    /// `x_pows[k-1]` is the power of `x_k`; trailing zeros trimmed.
    pub(crate) x_pows: Vec<u32>,
    pub(crate) mu_pow: i32,
    pub(crate) damp: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn is_one(&self) -> bool {
        *self == Monomial::default()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut x_pows = vec![0; self.x_pows.len().max(o.x_pows.len())];
        for (i, p) in self.x_pows.iter().enumerate() {
            x_pows[i] += p;
        }
        for (i, p) in o.x_pows.iter().enumerate() {
            x_pows[i] += p;
        }
        Monomial {
            derivs: merge_powers(&self.derivs, &o.derivs),
            u_pow: &self.u_pow + &o.u_pow,
            exp_u: &self.exp_u + &o.exp_u,
            log_u: self.log_u + o.log_u,
            fders: merge_powers(&self.fders, &o.fders),
            t_pow: &self.t_pow + &o.t_pow,
            log_t: self.log_t + o.log_t,
            x_pows,
            mu_pow: self.mu_pow + o.mu_pow,
            damp: merge_powers(&self.damp, &o.damp),
        }
    }

    /// Highest derivative order among the `u_J` atoms (0 if none).
    pub fn order(&self) -> usize {
        self.derivs.iter().map(|(j, _)| j.order()).max().unwrap_or(0)
    }

    pub fn x_pow(&self, k: usize) -> u32 {
        self.x_pows.get(k - 1).copied().unwrap_or(0)
    }

    pub fn deriv_pow(&self, j: &MultiIndex) -> u32 {
        self.derivs
            .binary_search_by(|e| e.0.cmp(j))
            .map(|i| self.derivs[i].1)
            .unwrap_or(0)
    }

    pub(crate) fn with_deriv(&self, j: MultiIndex, delta: i64) -> Monomial {
        let mut m = self.clone();
        bump_power(&mut m.derivs, j, delta);
        m
    }

    pub(crate) fn with_fder(&self, j: u32, delta: i64) -> Monomial {
        let mut m = self.clone();
        bump_power(&mut m.fders, j, delta);
        m
    }

    pub(crate) fn with_damp(&self, j: u32, delta: i64) -> Monomial {
        let mut m = self.clone();
        bump_power(&mut m.damp, j, delta);
        m
    }

    pub(crate) fn with_x(&self, k: usize, delta: i64) -> Monomial {
        let mut m = self.clone();
        if m.x_pows.len() < k {
            m.x_pows.resize(k, 0);
        }
        let p = m.x_pows[k - 1] as i64 + delta;
        assert!(p >= 0, "negative power of x");
        m.x_pows[k - 1] = p as u32;
        while m.x_pows.last() == Some(&0) {
            m.x_pows.pop();
        }
        m
    }

    /// True if any atom depends on a derivative of u.
    pub fn has_derivs(&self) -> bool {
        !self.derivs.is_empty()
    }

    /// The factors of the monomial with their exponents. For [`Atom::ExpU`] the
    /// value is the rate `c` of `exp(c u)`.
    pub fn atoms(&self) -> Vec<(Atom, ParamField)> {
        let int = |k: u32| ParamField::from_int(k as i64);
        let mut out: Vec<(Atom, ParamField)> = self.derivs.iter().map(|(j, k)| (Atom::Deriv(*j), int(*k))).collect();
        if !self.u_pow.is_zero() {
            out.push((Atom::U, self.u_pow.clone()));
        }
        if !self.exp_u.is_zero() {
            out.push((Atom::ExpU, self.exp_u.clone()));
        }
        if self.log_u > 0 {
            out.push((Atom::LogU, int(self.log_u)));
        }
        out.extend(self.fders.iter().map(|(j, k)| (Atom::F(*j), int(*k))));
        if !self.t_pow.is_zero() {
            out.push((Atom::T, self.t_pow.clone()));
        }
        if self.log_t > 0 {
            out.push((Atom::LogT, int(self.log_t)));
        }
        for (i, k) in self.x_pows.iter().enumerate() {
            if *k > 0 {
                out.push((Atom::X(i + 1), int(*k)));
            }
        }
        if self.mu_pow != 0 {
            out.push((Atom::Mu, ParamField::from_int(self.mu_pow as i64)));
        }
        out.extend(self.damp.iter().map(|(j, k)| (Atom::Damping(*j), int(*k))));
        out
    }

    fn substitute(&self, s: Symbol, v: &ParamField) -> Result<Monomial, FieldError> {
        let mut m = self.clone();
        m.u_pow = m.u_pow.substitute(s, v)?;
        m.exp_u = m.exp_u.substitute(s, v)?;
        m.t_pow = m.t_pow.substitute(s, v)?;
        Ok(m)
    }

    fn mentions(&self, s: Symbol) -> bool {
        self.u_pow.contains(s) || self.exp_u.contains(s) || self.t_pow.contains(s)
    }
}

/// Canonical sum of terms; see the module docs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct JetExpr {
    terms: BTreeMap<Monomial, ParamField>,
}

impl JetExpr {
    pub fn zero() -> JetExpr {
        JetExpr::default()
    }

    pub fn one() -> JetExpr {
        JetExpr::constant(ParamField::one())
    }

    pub fn constant(c: ParamField) -> JetExpr {
        JetExpr::term(c, Monomial::one())
    }

    pub fn from_int(c: i64) -> JetExpr {
        JetExpr::constant(ParamField::from_int(c))
    }

    pub fn term(c: ParamField, m: Monomial) -> JetExpr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        JetExpr { terms }
    }

    pub fn monomial(m: Monomial) -> JetExpr {
        JetExpr::term(ParamField::one(), m)
    }

    /// The independent variable `x_a` (`a = 0` is `t`).
    pub fn var(a: usize) -> JetExpr {
        if a == 0 {
            JetExpr::t()
        } else {
            JetExpr::x(a)
        }
    }

    pub fn t() -> JetExpr {
        JetExpr::t_pow(ParamField::one())
    }

    pub fn t_pow(e: ParamField) -> JetExpr {
        JetExpr::monomial(Monomial { t_pow: e, ..Monomial::default() })
    }

    pub fn x(k: usize) -> JetExpr {
        assert!(k >= 1, "spatial variables are 1-based");
        JetExpr::monomial(Monomial::one().with_x(k, 1))
    }

    pub fn u() -> JetExpr {
        JetExpr::u_pow(ParamField::one())
    }

    pub fn u_pow(e: ParamField) -> JetExpr {
        JetExpr::monomial(Monomial { u_pow: e, ..Monomial::default() })
    }

    /// The derivative coordinate `u_J`.
    pub fn deriv(vars: &[usize]) -> JetExpr {
        let j = MultiIndex::new(vars).expect("multi-index of order 1..=3");
        JetExpr::monomial(Monomial::one().with_deriv(j, 1))
    }

    /// First derivative `u_a` (`a = 0` is `u_t`).
    pub fn ud(a: usize) -> JetExpr {
        JetExpr::deriv(&[a])
    }

    pub fn exp_u(c: ParamField) -> JetExpr {
        JetExpr::monomial(Monomial { exp_u: c, ..Monomial::default() })
    }

    pub fn log_t() -> JetExpr {
        JetExpr::monomial(Monomial { log_t: 1, ..Monomial::default() })
    }

    pub fn log_u() -> JetExpr {
        JetExpr::monomial(Monomial { log_u: 1, ..Monomial::default() })
    }

    /// Opaque `F^(j)(u)`; `fder(0)` is the potential `F`, `fder(1)` is `f = F'`.
    pub fn fder(j: u32) -> JetExpr {
        JetExpr::monomial(Monomial::one().with_fder(j, 1))
    }

    /// Opaque integrating factor `μ(t)` with `μ' = a(t)μ`.
    pub fn mu() -> JetExpr {
        JetExpr::monomial(Monomial { mu_pow: 1, ..Monomial::default() })
    }

    /// Opaque `a^(j)(t)`; `damping(0)` is the damping coefficient itself.
    pub fn damping(j: u32) -> JetExpr {
        JetExpr::monomial(Monomial::one().with_damp(j, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ParamField)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> ParamField {
        self.terms.get(m).cloned().unwrap_or_else(ParamField::zero)
    }

    /// The value as a parameter-field constant, if it has no atoms.
    pub fn as_constant(&self) -> Option<ParamField> {
        match self.terms.len() {
            0 => Some(ParamField::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().expect("one term");
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Maximal derivative order of any `u_J` atom.
    pub fn order(&self) -> usize {
        self.terms.keys().map(Monomial::order).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: ParamField) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &ParamField) -> JetExpr {
        if c.is_zero() {
            return JetExpr::zero();
        }
        JetExpr {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> JetExpr {
        let mut acc = JetExpr::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces symbol `s` by `v` in coefficients and exponents, merging terms that collide.
    pub fn substitute(&self, s: Symbol, v: &ParamField) -> Result<JetExpr, FieldError> {
        let mut out = JetExpr::zero();
        for (m, c) in &self.terms {
            let m2 = if m.mentions(s) { m.substitute(s, v)? } else { m.clone() };
            out.add_term(m2, c.substitute(s, v)?);
        }
        Ok(out)
    }

    /// Symbols appearing anywhere (coefficients or exponents).
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for (m, c) in &self.terms {
            for f in [c, &m.u_pow, &m.exp_u, &m.t_pow] {
                for s in f.symbols() {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// True if symbol `s` occurs in some atom exponent (not only in coefficients).
    pub fn symbol_in_exponents(&self, s: Symbol) -> bool {
        self.terms.keys().any(|m| m.mentions(s))
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coefficients<F>(&self, f: F) -> JetExpr
    where
        F: Fn(&ParamField) -> ParamField,
    {
        let mut out = JetExpr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// True if every term has no derivative atoms (a function of t, x, u only).
    pub fn is_point_function(&self) -> bool {
        self.terms.keys().all(|m| !m.has_derivs())
    }

    /// True if some term involves the opaque potential, μ, or a(t).
    pub fn has_opaque_atoms(&self) -> bool {
        self.terms
            .keys()
            .any(|m| !m.fders.is_empty() || m.mu_pow != 0 || !m.damp.is_empty())
    }
}

impl<'a> Add<&'a JetExpr> for &'a JetExpr {
    type Output = JetExpr;
    fn add(self, rhs: &JetExpr) -> JetExpr {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a JetExpr> for &'a JetExpr {
    type Output = JetExpr;
    fn sub(self, rhs: &JetExpr) -> JetExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a JetExpr> for &'a JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: &JetExpr) -> JetExpr {
        let mut out = JetExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        JetExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<JetExpr> for JetExpr {
            type Output = JetExpr;
            fn $f(self, rhs: JetExpr) -> JetExpr { (&self).$f(&rhs) }
        }
        impl<'a> $tr<&'a JetExpr> for JetExpr {
            type Output = JetExpr;
            fn $f(self, rhs: &JetExpr) -> JetExpr { (&self).$f(rhs) }
        }
        impl<'a> $tr<JetExpr> for &'a JetExpr {
            type Output = JetExpr;
            fn $f(self, rhs: JetExpr) -> JetExpr { self.$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Mul<&ParamField> for &JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: &ParamField) -> JetExpr {
        self.scale(rhs)
    }
}

impl Mul<ParamField> for JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: ParamField) -> JetExpr {
        self.scale(&rhs)
    }
}

impl From<ParamField> for JetExpr {
    fn from(c: ParamField) -> Self {
        JetExpr::constant(c)
    }
}

impl std::iter::Sum for JetExpr {
    fn sum<I: Iterator<Item = JetExpr>>(iter: I) -> JetExpr {
        let mut acc = JetExpr::zero();
        for e in iter {
            for (m, c) in e.terms {
                acc.add_term(m, c);
            }
        }
        acc
    }
}
