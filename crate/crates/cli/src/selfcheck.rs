//! Seeded randomized checks of the jet engine, run on request by `verify-symbolic`.

use noether_core::jet::{euler, rat, total_derivative, JetError, JetExpr, JetPoint, MultiIndex};
use noether_core::param::{ParamField, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfCheck {
    pub property: String,
    pub cases: usize,
    pub failures: usize,
    /// First failing expression, as an s-expression.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
}

fn random_expr(rng: &mut impl Rng, n: usize) -> JetExpr {
    let mut e = JetExpr::zero();
    for _ in 0..rng.gen_range(1..4) {
        let mut m = JetExpr::constant(ParamField::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
        for _ in 0..rng.gen_range(0..4) {
            let atom = match rng.gen_range(0..10) {
                0 => JetExpr::t(),
                1 => JetExpr::x(rng.gen_range(1..=n)),
                2 => JetExpr::u(),
                3 => JetExpr::u_pow(ParamField::sym("p")),
                4 => JetExpr::t_pow(ParamField::sym("m")),
                5 => JetExpr::exp_u(ParamField::sym("m")),
                6 => JetExpr::fder(rng.gen_range(0..2)),
                7 => JetExpr::mu(),
                8 => JetExpr::ud(rng.gen_range(0..=n)),
                _ => JetExpr::deriv(&[rng.gen_range(0..=n), rng.gen_range(0..=n)]),
            };
            m = m * atom;
        }
        e = e + m;
    }
    e
}

/// Polynomial in the jet coordinates with integer coefficients; exactly evaluable.
fn plain_expr(rng: &mut impl Rng, n: usize) -> JetExpr {
    let mut e = JetExpr::zero();
    for _ in 0..rng.gen_range(1..4) {
        let mut m = JetExpr::from_int(rng.gen_range(-4..=4));
        for _ in 0..rng.gen_range(0..4) {
            let atom = match rng.gen_range(0..5) {
                0 => JetExpr::t(),
                1 => JetExpr::x(rng.gen_range(1..=n)),
                2 => JetExpr::u(),
                3 => JetExpr::ud(rng.gen_range(0..=n)),
                _ => JetExpr::deriv(&[rng.gen_range(0..=n), rng.gen_range(0..=n)]),
            };
            m = m * atom;
        }
        e = e + m;
    }
    e
}

fn random_point(rng: &mut impl Rng, n: usize) -> JetPoint {
    let mut r = |nonzero: bool| loop {
        let v = rat(rng.gen_range(-7..=7), rng.gen_range(1..=5));
        if !nonzero || v != rat(0, 1) {
            return v;
        }
    };
    let mut pt = JetPoint { t: r(true), x: (0..n).map(|_| r(false)).collect(), u: r(true), ..Default::default() };
    for a in 0..=n {
        pt.derivs.insert(MultiIndex::single(a), r(false));
        for b in a..=n {
            pt.derivs.insert(MultiIndex::new(&[a, b]).unwrap(), r(false));
        }
    }
    pt.params.insert(Symbol::m(), r(false));
    pt
}

fn run(property: &str, cases: usize, seed: u64, n: usize, check: impl Fn(&JetExpr, usize, usize) -> Result<bool, JetError>) -> SelfCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SelfCheck { property: property.into(), cases, failures: 0, example: None };
    for _ in 0..cases {
        let e = random_expr(&mut rng, n);
        let a = rng.gen_range(0..=n);
        let b = rng.gen_range(0..=n);
        if !check(&e, a, b).unwrap_or(false) {
            out.failures += 1;
            out.example.get_or_insert_with(|| e.to_sexpr());
        }
    }
    out
}

/// Canonical `e1 e2 - e3` evaluated at a random rational jet point equals the
/// same combination of the separate values.
fn canonical_vs_evaluation(cases: usize, seed: u64, n: usize) -> SelfCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SelfCheck { property: "canonical form agrees with evaluation".into(), cases, failures: 0, example: None };
    for _ in 0..cases {
        let (e1, e2, e3) = (plain_expr(&mut rng, n), plain_expr(&mut rng, n), plain_expr(&mut rng, n));
        let pt = random_point(&mut rng, n);
        let combined = &(&e1 * &e2) - &e3;
        let ok = match (combined.eval_exact(&pt), e1.eval_exact(&pt), e2.eval_exact(&pt), e3.eval_exact(&pt)) {
            (Ok(l), Ok(a), Ok(b), Ok(c)) => l == a * b - c,
            _ => false,
        };
        if !ok {
            out.failures += 1;
            out.example.get_or_insert_with(|| combined.to_sexpr());
        }
    }
    out
}

/// `D_a D_b = D_b D_a`, `E(D_a e) = 0` and canonical-vs-evaluation, on
/// `cases` random instances each.
pub fn engine_checks(cases: usize, seed: u64, n: usize) -> Vec<SelfCheck> {
    vec![
        run("total derivatives commute", cases, seed, n, |e, a, b| {
            let ab = total_derivative(&total_derivative(e, b)?, a)?;
            let ba = total_derivative(&total_derivative(e, a)?, b)?;
            Ok((&ab - &ba).is_zero())
        }),
        run("euler operator annihilates total derivatives", cases, seed.wrapping_add(1), n, |e, a, _| {
            Ok(euler(&total_derivative(e, a)?)?.is_zero())
        }),
        canonical_vs_evaluation(cases, seed.wrapping_add(2), n),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_pass_and_are_seeded() {
        let a = engine_checks(20, 5, 2);
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|c| c.failures == 0 && c.cases == 20), "{:?}", a);
        assert_eq!(a, engine_checks(20, 5, 2));
    }
}
