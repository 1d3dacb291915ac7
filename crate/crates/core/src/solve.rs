//! Solving for free parameters that make a jet expression vanish identically.
//!
//! Every coefficient of a canonical [`JetExpr`] must vanish. Numerators of the
//! coefficients are polynomials in the unknowns (with the remaining parameters
//! generic); the system is solved one unknown at a time, branching over the
//! roots of the simplest equation and re-canonicalizing the expression after
//! each substitution, so collisions of exponents are handled by the canonical
//! form rather than by the equation system.

use thiserror::Error;

use crate::jet::{JetError, JetExpr};
use crate::param::{FieldError, ParamField, Poly, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("no equation is of degree <= 2 in the unknowns {0:?}")]
    Degree(Vec<String>),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Ordered substitutions `symbol := value`; later values never mention earlier symbols.
pub type Assignment = Vec<(Symbol, ParamField)>;

/// Applies an assignment to a parameter value in order.
pub fn apply(assign: &[(Symbol, ParamField)], v: &ParamField) -> Result<ParamField, FieldError> {
    let mut out = v.clone();
    for (s, x) in assign {
        out = out.substitute(*s, x)?;
    }
    Ok(out)
}

fn roots_in(p: &Poly, v: usize) -> Option<Vec<ParamField>> {
    let mut coeffs = p.coeffs_in(v);
    let mut roots = Vec::new();
    let low = coeffs.iter().take_while(|c| c.is_zero()).count();
    if low > 0 {
        roots.push(ParamField::zero());
        coeffs.drain(..low);
    }
    let mut reduced = Poly::from_coeffs_in(v, &coeffs);
    if reduced.degree_in(v) == 0 {
        return Some(roots);
    }
    let g = Poly::gcd(&reduced, &reduced.diff(v));
    if g.degree_in(v) > 0 {
        reduced = reduced.exact_div(&g).expect("gcd divides");
    }
    let c = reduced.coeffs_in(v);
    match c.len() - 1 {
        1 => roots.push(&ParamField::from_poly(c[0].neg()) / &ParamField::from_poly(c[1].clone())),
        2 => {
            let disc = c[1].mul(&c[1]).sub(&c[2].mul(&c[0]).scale(&crate::jet::rat(4, 1)));
            if let Some(r) = disc.sqrt() {
                let den = ParamField::from_poly(c[2].scale(&crate::jet::rat(2, 1)));
                for s in [r.clone(), r.neg()] {
                    roots.push(&ParamField::from_poly(c[1].neg().add(&s)) / &den);
                }
            }
        }
        _ => return None,
    }
    roots.sort();
    roots.dedup();
    Some(roots)
}

/// All assignments of `unknowns` for which `residual(assignment)` is identically zero.
///
/// `residual` returns `Ok(None)` when the assignment hits a pole of the family.
/// Unknowns left unassigned in a solution are free. Special values at which two
/// exponent atoms would merge are found only if they are also roots of some
/// coefficient equation.
pub fn solve_vanishing<F>(unknowns: &[Symbol], residual: &F) -> Result<Vec<Assignment>, SolveError>
where
    F: Fn(&[(Symbol, ParamField)]) -> Result<Option<JetExpr>, SolveError>,
{
    let mut out = Vec::new();
    branch(unknowns, &mut Vec::new(), residual, &mut out)?;
    let mut finals: Vec<Assignment> = Vec::new();
    for a in out {
        let f = back_substitute(&a)?;
        if !finals.contains(&f) {
            finals.push(f);
        }
    }
    Ok(finals)
}

fn back_substitute(a: &[(Symbol, ParamField)]) -> Result<Assignment, FieldError> {
    let mut out = Vec::with_capacity(a.len());
    for (i, (s, v)) in a.iter().enumerate() {
        out.push((*s, apply(&a[i + 1..], v)?));
    }
    out.sort_by_key(|(s, _)| *s);
    Ok(out)
}

fn branch<F>(
    unknowns: &[Symbol],
    assign: &mut Assignment,
    residual: &F,
    out: &mut Vec<Assignment>,
) -> Result<(), SolveError>
where
    F: Fn(&[(Symbol, ParamField)]) -> Result<Option<JetExpr>, SolveError>,
{
    let expr = match residual(assign)? {
        Some(e) => e,
        None => return Ok(()),
    };
    if expr.is_zero() {
        out.push(assign.clone());
        return Ok(());
    }
    let open: Vec<Symbol> = unknowns.iter().copied().filter(|s| !assign.iter().any(|(a, _)| a == s)).collect();
    let mut equations: Vec<Poly> = Vec::new();
    for (_, c) in expr.terms() {
        let num = c.numer().clone();
        if !open.iter().any(|s| num.contains_var(s.id())) {
            // A nonzero coefficient free of the unknowns cannot vanish generically.
            return Ok(());
        }
        if !equations.contains(&num) {
            equations.push(num);
        }
    }
    let mut best: Option<(usize, u32, Symbol, &Poly)> = None;
    for eq in &equations {
        for s in &open {
            let deg = eq.degree_in(s.id());
            if deg == 0 {
                continue;
            }
            let others = open.iter().filter(|o| *o != s && eq.contains_var(o.id())).count();
            let key = (others, deg);
            if best.map(|(o, d, _, _)| key < (o, d)).unwrap_or(true) {
                best = Some((others, deg, *s, eq));
            }
        }
    }
    let (_, _, var, eq) = best.expect("every equation mentions an open unknown");
    let roots = match roots_in(eq, var.id()) {
        Some(r) => r,
        None => {
            // Try any other equation of degree <= 2 in some unknown.
            let alt = equations.iter().find_map(|e| {
                open.iter().find_map(|s| {
                    let d = e.degree_in(s.id());
                    (d > 0).then(|| roots_in(e, s.id()).map(|r| (*s, r))).flatten()
                })
            });
            match alt {
                Some((s, r)) => return descend(unknowns, assign, residual, out, s, r),
                None => return Err(SolveError::Degree(open.iter().map(|s| s.name()).collect())),
            }
        }
    };
    descend(unknowns, assign, residual, out, var, roots)
}

fn descend<F>(
    unknowns: &[Symbol],
    assign: &mut Assignment,
    residual: &F,
    out: &mut Vec<Assignment>,
    var: Symbol,
    roots: Vec<ParamField>,
) -> Result<(), SolveError>
where
    F: Fn(&[(Symbol, ParamField)]) -> Result<Option<JetExpr>, SolveError>,
{
    for r in roots {
        assign.push((var, r));
        branch(unknowns, assign, residual, out)?;
        assign.pop();
    }
    Ok(())
}

/// Substitutes an assignment into an expression; `None` on a pole.
pub fn substitute_all(e: &JetExpr, assign: &[(Symbol, ParamField)]) -> Option<JetExpr> {
    let mut out = e.clone();
    for (s, v) in assign {
        out = out.substitute(*s, v).ok()?;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Symbol {
        Symbol::q()
    }

    #[test]
    fn linear_root_in_terms_of_other_parameters() {
        // (q + m + 2) u_t^2 vanishes only at q = -m - 2.
        let e = JetExpr::ud(0).pow(2).scale(&(&ParamField::sym("q") + &(&ParamField::sym("m") + &ParamField::from_int(2))));
        let sols = solve_vanishing(&[q()], &|a: &[(Symbol, ParamField)]| Ok(substitute_all(&e, a))).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0][0].1.to_string(), "-m - 2");
    }

    #[test]
    fn quadratic_roots_and_inconsistent_systems() {
        let qf = ParamField::sym("q");
        let m = ParamField::sym("m");
        // (q - m)(q + 1) u + (q - m) u_t
        let e = JetExpr::u().scale(&(&(&qf - &m) * &(&qf + &ParamField::one()))) + JetExpr::ud(0).scale(&(&qf - &m));
        let sols = solve_vanishing(&[q()], &|a: &[(Symbol, ParamField)]| Ok(substitute_all(&e, a))).unwrap();
        assert_eq!(sols, vec![vec![(q(), m.clone())]]);
        let bad = e + JetExpr::ud(1);
        let none = solve_vanishing(&[q()], &|a: &[(Symbol, ParamField)]| Ok(substitute_all(&bad, a))).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn sequential_unknowns_back_substitute() {
        let d = ParamField::sym("d");
        let p = ParamField::sym("p");
        // (2d + 1) u_t^2 + (d(p+1) - 2(d-1)) u^3
        let e1 = &(&d * &ParamField::from_int(2)) + &ParamField::one();
        let e2 = &(&d * &(&p + &ParamField::one())) - &(&(&d - &ParamField::one()) * &ParamField::from_int(2));
        let e = JetExpr::ud(0).pow(2).scale(&e1) + JetExpr::u().pow(3).scale(&e2);
        let sols = solve_vanishing(&[Symbol::d(), Symbol::p()], &|a: &[(Symbol, ParamField)]| Ok(substitute_all(&e, a)))
            .unwrap();
        assert_eq!(sols, vec![vec![(Symbol::d(), ParamField::ratio(-1, 2)), (Symbol::p(), ParamField::from_int(5))]]);
    }

    #[test]
    fn irrational_roots_are_not_reported() {
        let qf = ParamField::sym("q");
        let e = JetExpr::u().scale(&(&(&qf * &qf) - &ParamField::from_int(2)));
        let sols = solve_vanishing(&[q()], &|a: &[(Symbol, ParamField)]| Ok(substitute_all(&e, a))).unwrap();
        assert!(sols.is_empty());
    }
}
