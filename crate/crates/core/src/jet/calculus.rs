//! Partial and total derivatives, the Euler operator, and divergence tests.

use std::collections::BTreeSet;

use super::{JetError, JetExpr, Monomial, MultiIndex, MAX_ORDER};
use crate::param::ParamField;

fn int(k: i64) -> ParamField {
    ParamField::from_int(k)
}

/// ∂/∂x_a of a monomial, holding u and its derivatives fixed.
fn partial_var_mono(m: &Monomial, a: usize) -> Vec<(ParamField, Monomial)> {
    let mut out = Vec::new();
    if a == 0 {
        if !m.t_pow.is_zero() {
            let mut r = m.clone();
            r.t_pow = &m.t_pow - &ParamField::one();
            out.push((m.t_pow.clone(), r));
        }
        if m.log_t > 0 {
            let mut r = m.clone();
            r.log_t -= 1;
            r.t_pow = &m.t_pow - &ParamField::one();
            out.push((int(m.log_t as i64), r));
        }
        if m.mu_pow != 0 {
            out.push((int(m.mu_pow as i64), m.with_damp(0, 1)));
        }
        for (j, p) in &m.damp {
            out.push((int(*p as i64), m.with_damp(*j, -1).with_damp(j + 1, 1)));
        }
    } else {
        let p = m.x_pow(a);
        if p > 0 {
            out.push((int(p as i64), m.with_x(a, -1)));
        }
    }
    out
}

/// ∂/∂u of a monomial.
fn partial_u_mono(m: &Monomial) -> Vec<(ParamField, Monomial)> {
    let mut out = Vec::new();
    if !m.u_pow.is_zero() {
        let mut r = m.clone();
        r.u_pow = &m.u_pow - &ParamField::one();
        out.push((m.u_pow.clone(), r));
    }
    if !m.exp_u.is_zero() {
        out.push((m.exp_u.clone(), m.clone()));
    }
    if m.log_u > 0 {
        let mut r = m.clone();
        r.log_u -= 1;
        r.u_pow = &m.u_pow - &ParamField::one();
        out.push((int(m.log_u as i64), r));
    }
    for (j, p) in &m.fders {
        out.push((int(*p as i64), m.with_fder(*j, -1).with_fder(j + 1, 1)));
    }
    out
}

fn collect(e: &JetExpr, f: impl Fn(&Monomial) -> Vec<(ParamField, Monomial)>) -> JetExpr {
    let mut out = JetExpr::zero();
    for (m, c) in e.terms() {
        for (k, r) in f(m) {
            out.add_term(r, c * &k);
        }
    }
    out
}

impl JetExpr {
    /// Explicit partial derivative in the independent variable `x_a` (`a = 0` is t).
    pub fn partial_var(&self, a: usize) -> JetExpr {
        collect(self, |m| partial_var_mono(m, a))
    }

    /// Partial derivative in u, holding all derivative coordinates fixed.
    pub fn partial_u(&self) -> JetExpr {
        collect(self, partial_u_mono)
    }

    /// Partial derivative in the jet coordinate `u_J`.
    pub fn partial_deriv(&self, j: &MultiIndex) -> JetExpr {
        collect(self, |m| {
            let p = m.deriv_pow(j);
            if p == 0 {
                Vec::new()
            } else {
                vec![(int(p as i64), m.with_deriv(*j, -1))]
            }
        })
    }

    /// All multi-indices `J` with `u_J` present.
    pub fn multi_indices(&self) -> BTreeSet<MultiIndex> {
        self.terms()
            .flat_map(|(m, _)| m.derivs.iter().map(|(j, _)| *j))
            .collect()
    }
}

fn total_derivative_mono(m: &Monomial, a: usize) -> Result<Vec<(ParamField, Monomial)>, JetError> {
    let mut out = partial_var_mono(m, a);
    let ua = MultiIndex::single(a);
    for (k, r) in partial_u_mono(m) {
        out.push((k, r.with_deriv(ua, 1)));
    }
    for (j, p) in &m.derivs {
        let next = j.with(a).ok_or(JetError::OrderOverflow(MAX_ORDER))?;
        out.push((int(*p as i64), m.with_deriv(*j, -1).with_deriv(next, 1)));
    }
    Ok(out)
}

/// Total derivative `D_a e`, with `a = 0` the time direction.
///
/// Fails if `e` contains a third-order coordinate, whose derivative would
/// exceed the representable order.
pub fn total_derivative(e: &JetExpr, a: usize) -> Result<JetExpr, JetError> {
    if e.order() >= MAX_ORDER {
        return Err(JetError::OrderOverflow(e.order()));
    }
    let mut out = JetExpr::zero();
    for (m, c) in e.terms() {
        for (k, r) in total_derivative_mono(m, a)? {
            out.add_term(r, c * &k);
        }
    }
    Ok(out)
}

fn apply_total(e: &JetExpr, vars: &[u8]) -> Result<JetExpr, JetError> {
    let mut acc = e.clone();
    for a in vars {
        acc = total_derivative(&acc, *a as usize)?;
    }
    Ok(acc)
}

/// The Euler operator `E(e) = ∂e/∂u − Σ_a D_a ∂e/∂u_a + Σ_{a≤b} D_a D_b ∂e/∂u_ab`.
pub fn euler(e: &JetExpr) -> Result<JetExpr, JetError> {
    if 2 * e.order() > MAX_ORDER {
        return Err(JetError::OrderOverflow(e.order()));
    }
    let mut out = e.partial_u();
    for j in e.multi_indices() {
        let term = apply_total(&e.partial_deriv(&j), j.vars())?;
        out = if j.order() % 2 == 1 { &out - &term } else { &out + &term };
    }
    Ok(out)
}

/// `D_t c_0 + Σ_k D_k c_k` for a tuple `(c_0, c_1, .., c_n)`.
pub fn divergence(components: &[JetExpr]) -> Result<JetExpr, JetError> {
    let mut out = JetExpr::zero();
    for (a, c) in components.iter().enumerate() {
        if !c.is_zero() {
            out = &out + &total_derivative(c, a)?;
        }
    }
    Ok(out)
}

/// Outcome of [`is_total_divergence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergenceTest {
    pub is_divergence: bool,
    /// `E(e)`; zero exactly when `e` is a total divergence.
    pub obstruction: JetExpr,
}

pub fn is_total_divergence(e: &JetExpr) -> Result<DivergenceTest, JetError> {
    let obstruction = euler(e)?;
    Ok(DivergenceTest { is_divergence: obstruction.is_zero(), obstruction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::Symbol;

    fn q() -> ParamField {
        ParamField::symbol(Symbol::q())
    }
    fn m() -> ParamField {
        ParamField::symbol(Symbol::m())
    }
    fn half() -> ParamField {
        ParamField::ratio(1, 2)
    }

    #[test]
    fn d_t_of_u_is_u_t() {
        assert_eq!(total_derivative(&JetExpr::u(), 0).unwrap(), JetExpr::ud(0));
    }

    #[test]
    fn d_k_of_conformal_potential() {
        // D_k(-q t^m u^2 / 2) = -q t^m u u_k
        let b = (JetExpr::t_pow(m()) * JetExpr::u().pow(2)).scale(&(-q() * half()));
        let expect = (JetExpr::t_pow(m()) * JetExpr::u() * JetExpr::ud(2)).scale(&-q());
        assert_eq!(total_derivative(&b, 2).unwrap(), expect);
    }

    #[test]
    fn d_t_of_weighted_velocity() {
        let e = JetExpr::t_pow(m()) * JetExpr::ud(0);
        let expect = JetExpr::t_pow(m() - ParamField::one()) * JetExpr::ud(0) * JetExpr::constant(m())
            + JetExpr::t_pow(m()) * JetExpr::deriv(&[0, 0]);
        assert_eq!(total_derivative(&e, 0).unwrap(), expect);
    }

    #[test]
    fn order_overflow_is_reported() {
        let e = JetExpr::deriv(&[0, 0, 1, 1, 2, 2]);
        assert_eq!(total_derivative(&e, 0), Err(JetError::OrderOverflow(6)));
        assert!(euler(&JetExpr::deriv(&[0, 1, 1, 2])).is_err());
        assert!(euler(&JetExpr::deriv(&[0, 1, 1])).is_ok());
    }

    #[test]
    fn euler_of_u_is_one() {
        assert_eq!(euler(&JetExpr::u()).unwrap(), JetExpr::one());
    }

    #[test]
    fn euler_annihilates_divergences() {
        let p0 = JetExpr::u() * JetExpr::ud(0);
        let p1 = JetExpr::u().pow(3) * JetExpr::ud(1);
        let div = divergence(&[p0, p1]).unwrap();
        assert!(euler(&div).unwrap().is_zero());
    }

    #[test]
    fn zero_tuple_has_zero_divergence() {
        assert!(divergence(&[JetExpr::zero(), JetExpr::zero(), JetExpr::zero()]).unwrap().is_zero());
        assert!(is_total_divergence(&JetExpr::zero()).unwrap().is_divergence);
    }

    #[test]
    fn u_times_u_t_squared_is_not_a_divergence() {
        let e = JetExpr::u() * JetExpr::ud(0).pow(2);
        let r = is_total_divergence(&e).unwrap();
        assert!(!r.is_divergence);
        // E(u u_t^2) = u_t^2 - D_t(2 u u_t) = -u_t^2 - 2 u u_tt
        let expect = -(JetExpr::ud(0).pow(2)) - JetExpr::u() * JetExpr::deriv(&[0, 0]) * JetExpr::from_int(2);
        assert_eq!(r.obstruction, expect);
    }

    #[test]
    fn damping_atoms_follow_chain_rule() {
        // D_t(mu u_t) = a mu u_t + mu u_tt
        let e = JetExpr::mu() * JetExpr::ud(0);
        let expect = JetExpr::damping(0) * JetExpr::mu() * JetExpr::ud(0) + JetExpr::mu() * JetExpr::deriv(&[0, 0]);
        assert_eq!(total_derivative(&e, 0).unwrap(), expect);
    }

    #[test]
    fn log_u_derivative() {
        // D_1 ln|u| = u^{-1} u_1
        let expect = JetExpr::u_pow(ParamField::from_int(-1)) * JetExpr::ud(1);
        assert_eq!(total_derivative(&JetExpr::log_u(), 1).unwrap(), expect);
    }
}
