//! Sparse multivariate polynomials over ℚ in the registered parameter symbols.
//!
//! Terms are kept strictly descending in lexicographic order (symbol id 0 most
//! significant), zero coefficients are never stored. An exponent vector is a
//! `Vec<u32>` indexed by symbol id with trailing zeros trimmed, which makes the
//! derived `Vec` ordering coincide with lex order.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::symbol::Symbol;

pub(crate) type Exps = Vec<u32>;

fn trim(e: &mut Exps) {
    while e.last() == Some(&0) {
        e.pop();
    }
}

fn exps_add(a: &[u32], b: &[u32]) -> Exps {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn exps_sub(a: &[u32], b: &[u32]) -> Option<Exps> {
    if b.len() > a.len() {
        return None;
    }
    let mut out = a.to_vec();
    for (i, x) in b.iter().enumerate() {
        if out[i] < *x {
            return None;
        }
        out[i] -= x;
    }
    trim(&mut out);
    Some(out)
}

/// A polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Exps, BigRational)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Vec::new(), c)] }
        }
    }

    pub fn from_int(c: i64) -> Poly {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(s: Symbol) -> Poly {
        let mut e = vec![0; s.id() + 1];
        e[s.id()] = 1;
        Poly { terms: vec![(e, BigRational::one())] }
    }

    fn monomial(mut e: Exps, c: BigRational) -> Poly {
        trim(&mut e);
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(e, c)] }
        }
    }

    fn from_map(map: BTreeMap<Exps, BigRational>) -> Poly {
        let terms = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_empty())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_empty() && self.terms[0].1.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    /// Coefficient of the lex-leading term.
    pub fn leading_coeff(&self) -> BigRational {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), -x)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Greater => {
                    out.push((ea.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((eb.clone(), cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = ca + cb;
                    if !s.is_zero() {
                        out.push((ea.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().cloned());
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut map: BTreeMap<Exps, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = exps_add(ea, eb);
                let c = ca * cb;
                let slot = map.entry(e).or_insert_with(BigRational::zero);
                *slot += c;
            }
        }
        Poly::from_map(map)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Ids of symbols with a nonzero exponent somewhere.
    pub fn vars(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        for (e, _) in &self.terms {
            for (i, x) in e.iter().enumerate() {
                if *x > 0 && !seen.contains(&i) {
                    seen.push(i);
                }
            }
        }
        seen.sort_unstable();
        seen
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.terms.iter().any(|(e, _)| e.get(v).copied().unwrap_or(0) > 0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e.get(v).copied().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Splits into coefficients of powers of symbol `v`; entry `i` multiplies `v^i`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut maps: Vec<BTreeMap<Exps, BigRational>> = vec![BTreeMap::new(); deg + 1];
        for (e, c) in &self.terms {
            let d = e.get(v).copied().unwrap_or(0) as usize;
            let mut rest = e.clone();
            if v < rest.len() {
                rest[v] = 0;
            }
            trim(&mut rest);
            maps[d].insert(rest, c.clone());
        }
        maps.into_iter().map(Poly::from_map).collect()
    }

    fn var_power(v: usize, k: u32) -> Poly {
        let mut e = vec![0; v + 1];
        e[v] = k;
        Poly::monomial(e, BigRational::one())
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (de, dc) = &d.terms[0];
        let mut r = self.clone();
        let mut q = Poly::zero();
        while !r.is_zero() {
            let (re, rc) = &r.terms[0];
            let te = exps_sub(re, de)?;
            let t = Poly::monomial(te, rc / dc);
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    /// Scales so the lex-leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }

    fn content_in(&self, v: usize) -> Poly {
        self.coeffs_in(v)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Poly::zero(), |acc, c| Poly::gcd(&acc, &c))
    }

    fn primitive_part_in(&self, v: usize) -> Poly {
        let c = self.content_in(v);
        self.exact_div(&c).expect("content divides polynomial")
    }

    fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
        let db = b.degree_in(v);
        let lcb = b.coeffs_in(v).pop().expect("nonzero divisor");
        let mut r = a.clone();
        while !r.is_zero() && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let lcr = r.coeffs_in(v).pop().expect("nonzero remainder");
            r = r.mul(&lcb).sub(&lcr.mul(&Poly::var_power(v, dr - db)).mul(b));
        }
        r
    }

    /// Monic greatest common divisor (recursive primitive remainder sequence).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        if a == b {
            return a.monic();
        }
        let va = a.vars();
        let vb = b.vars();
        let v = *va.first().into_iter().chain(vb.first()).min().expect("nonconstant");
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da == 0 {
            return Poly::gcd(a, &b.content_in(v));
        }
        if db == 0 {
            return Poly::gcd(&a.content_in(v), b);
        }
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        let g = Poly::gcd(&ca, &cb);
        let mut p1 = a.exact_div(&ca).expect("content divides");
        let mut p2 = b.exact_div(&cb).expect("content divides");
        if p1.degree_in(v) < p2.degree_in(v) {
            std::mem::swap(&mut p1, &mut p2);
        }
        let last = loop {
            let r = Poly::pseudo_rem(&p1, &p2, v);
            if r.is_zero() {
                break p2.primitive_part_in(v);
            }
            if r.degree_in(v) == 0 {
                break Poly::one();
            }
            p1 = p2;
            p2 = r.primitive_part_in(v);
        };
        g.mul(&last).monic()
    }

    /// Partial derivative with respect to symbol `v`.
    pub fn diff(&self, v: usize) -> Poly {
        let mut map = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e.get(v).copied().unwrap_or(0);
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] -= 1;
            trim(&mut e2);
            map.insert(e2, c * BigRational::from_integer(BigInt::from(k)));
        }
        Poly::from_map(map)
    }

    /// Rebuilds `Σ c_i v^i` from the output of [`Poly::coeffs_in`].
    pub fn from_coeffs_in(v: usize, coeffs: &[Poly]) -> Poly {
        coeffs
            .iter()
            .enumerate()
            .fold(Poly::zero(), |acc, (i, c)| acc.add(&c.mul(&Poly::var_power(v, i as u32))))
    }

    /// Exact square root if `self` is the square of a polynomial over ℚ.
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (e0, c0) = &self.terms[0];
        if e0.iter().any(|k| k % 2 == 1) {
            return None;
        }
        let lead = Poly::monomial(e0.iter().map(|k| k / 2).collect(), rational_sqrt(c0)?);
        let two_lead = lead.scale(&BigRational::from_integer(BigInt::from(2)));
        let mut root = lead;
        for _ in 0..=self.terms.len() {
            let rem = self.sub(&root.mul(&root));
            if rem.is_zero() {
                return Some(root);
            }
            let (re, rc) = &rem.terms[0];
            let (le, lc) = &two_lead.terms[0];
            let te = exps_sub(re, le)?;
            let next = Poly::monomial(te, rc / lc);
            if next.terms.is_empty() || root.terms.last().map(|t| t.0 <= next.terms[0].0).unwrap_or(false) {
                return None;
            }
            root = root.add(&next);
        }
        None
    }

    /// Evaluates with `value(id)` supplying each symbol; `None` if a symbol is unbound.
    pub fn eval<F>(&self, value: &F) -> Option<BigRational>
    where
        F: Fn(usize) -> Option<BigRational>,
    {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, k) in e.iter().enumerate() {
                if *k > 0 {
                    let x = value(i)?;
                    t *= num_traits::pow(x, *k as usize);
                }
            }
            acc += t;
        }
        Some(acc)
    }

    /// Iterates over `(exponents, coefficient)` in descending lex order.
    pub(crate) fn terms(&self) -> impl Iterator<Item = (&Exps, &BigRational)> {
        self.terms.iter().map(|(e, c)| (e, c))
    }

    /// Term-wise map over exponent vectors, used for substitution.
    pub(crate) fn monomial_from(e: &Exps, c: &BigRational) -> Poly {
        Poly::monomial(e.clone(), c.clone())
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.is_empty() {
                factors.push(fmt_rational(&mag));
            }
            for (i, x) in e.iter().enumerate() {
                match *x {
                    0 => {}
                    1 => factors.push(Symbol::from_id(i).name()),
                    x => factors.push(format!("{}^{}", Symbol::from_id(i).name(), x)),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Poly {
        Poly::var(Symbol::m())
    }
    fn q() -> Poly {
        Poly::var(Symbol::q())
    }
    fn c(x: i64) -> Poly {
        Poly::from_int(x)
    }

    #[test]
    fn add_cancels_to_zero() {
        let a = m().add(&c(3));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn exact_division_recovers_factor() {
        let a = m().add(&c(1));
        let b = q().sub(&m());
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a), Some(b.clone()));
        assert_eq!(prod.exact_div(&b), Some(a));
        assert_eq!(m().exact_div(&q()), None);
    }

    #[test]
    fn gcd_of_products_is_common_factor() {
        let g = m().add(&q()).add(&c(2));
        let a = g.mul(&m().sub(&c(1)));
        let b = g.mul(&q().mul(&q()).add(&c(5)));
        assert_eq!(Poly::gcd(&a, &b), g.monic());
        assert!(Poly::gcd(&m(), &q()).is_one());
    }

    #[test]
    fn gcd_univariate_with_multiplicity() {
        // (m-1)^2 (m+2) and (m-1)(m+3)
        let a = m().sub(&c(1)).pow(2).mul(&m().add(&c(2)));
        let b = m().sub(&c(1)).mul(&m().add(&c(3)));
        assert_eq!(Poly::gcd(&a, &b), m().sub(&c(1)));
    }

    #[test]
    fn display_is_readable() {
        let p = m().mul(&m()).sub(&c(2).mul(&m())).add(&Poly::constant(BigRational::new(3.into(), 2.into())));
        assert_eq!(p.to_string(), "m^2 - 2*m + 3/2");
    }

    #[test]
    fn square_roots_are_exact_or_refused() {
        let m = Poly::var(Symbol::m());
        let k = Poly::var(Symbol::kappa());
        let r = m.scale(&BigRational::new(2.into(), 3.into())).sub(&k).add(&Poly::from_int(5));
        assert_eq!(r.mul(&r).sqrt().map(|s| s.monic()), Some(r.monic()));
        assert_eq!(m.mul(&m).add(&Poly::one()).sqrt(), None);
        assert_eq!(Poly::from_int(2).sqrt(), None);
    }

    #[test]
    fn derivative_and_rebuild() {
        let m = Poly::var(Symbol::m());
        let q = Poly::var(Symbol::q());
        let p = m.mul(&q).mul(&q).add(&q).add(&Poly::from_int(7));
        assert_eq!(p.diff(Symbol::q().id()), m.mul(&q).scale(&BigRational::from_integer(2.into())).add(&Poly::one()));
        assert_eq!(Poly::from_coeffs_in(Symbol::q().id(), &p.coeffs_in(Symbol::q().id())), p);
    }
}
