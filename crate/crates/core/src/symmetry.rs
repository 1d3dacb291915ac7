//! Candidate generators and the variational-symmetry decision procedure.
//!
//! For a generator `v` and first-order Lagrangian `L` the remainder
//! `R = pr¹v(L) + L·Div ξ` decides the verdict: `R = 0` is a strict
//! variational symmetry, `E_u(R) = 0` a divergence symmetry, anything else is
//! reported with `E_u(R)` as the obstruction.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jet::{euler, total_derivative, JetError, JetExpr, MultiIndex, VectorField};
use crate::model::{ModelError, ModelSpec, Nonlinearity};
use crate::param::{ParamField, Symbol};
use crate::solve::{solve_vanishing, substitute_all, Assignment, SolveError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn zeros(n: usize) -> Vec<JetExpr> {
    vec![JetExpr::zero(); n + 1]
}

fn r2(n: usize) -> JetExpr {
    (1..=n).map(|k| JetExpr::x(k).pow(2)).sum()
}

fn field(name: String, xi: Vec<JetExpr>, eta: JetExpr) -> VectorField {
    VectorField::new(name, xi, eta).expect("catalog coefficients are point functions")
}

/// `P_a = ∂_a` (`a = 0` is the time translation).
pub fn translation(n: usize, a: usize) -> VectorField {
    let mut xi = zeros(n);
    xi[a] = JetExpr::one();
    field(format!("P_{}", a), xi, JetExpr::zero())
}

/// `J_kl = x_k ∂_l − x_l ∂_k`.
pub fn rotation(n: usize, k: usize, l: usize) -> VectorField {
    let mut xi = zeros(n);
    xi[l] = JetExpr::x(k);
    xi[k] = -JetExpr::x(l);
    field(format!("J_{}{}", k, l), xi, JetExpr::zero())
}

/// `K_k = t ∂_k + x_k ∂_t`.
pub fn boost(n: usize, k: usize) -> VectorField {
    let mut xi = zeros(n);
    xi[0] = JetExpr::x(k);
    xi[k] = JetExpr::t();
    field(format!("K_{}", k), xi, JetExpr::zero())
}

/// `D = t ∂_t + x_k ∂_k + d u ∂_u`.
pub fn dilation(n: usize, d: &ParamField) -> VectorField {
    let xi = (0..=n).map(JetExpr::var).collect();
    field("D".into(), xi, JetExpr::u().scale(d))
}

/// `D = t ∂_t + x_k ∂_k − (2/m) ∂_u`, paired with the exponential interaction.
pub fn dilation_exp(n: usize, m: &ParamField) -> VectorField {
    let xi = (0..=n).map(JetExpr::var).collect();
    field("D_exp".into(), xi, JetExpr::constant(&ParamField::from_int(-2) / m))
}

/// `C_0 = (t² + r²) ∂_t + 2t x_l ∂_l + (1 − n) t u ∂_u`.
pub fn conformal_time(n: usize) -> VectorField {
    let mut xi = vec![JetExpr::t().pow(2) + r2(n)];
    for l in 1..=n {
        xi.push((JetExpr::t() * JetExpr::x(l)).scale(&ParamField::from_int(2)));
    }
    let eta = (JetExpr::t() * JetExpr::u()).scale(&ParamField::from_int(1 - n as i64));
    field("C_0".into(), xi, eta)
}

fn conformal_xi(n: usize, k: usize) -> Vec<JetExpr> {
    let two = ParamField::from_int(2);
    let mut xi = vec![(JetExpr::t() * JetExpr::x(k)).scale(&two)];
    for l in 1..=n {
        let mut c = (JetExpr::x(k) * JetExpr::x(l)).scale(&two);
        if l == k {
            c = c + JetExpr::t().pow(2) - r2(n);
        }
        xi.push(c);
    }
    xi
}

/// `C_k = 2t x_k ∂_t + 2x_k x_l ∂_l + (t² − r²) ∂_k + q x_k u ∂_u`.
pub fn conformal(n: usize, k: usize, q: &ParamField) -> VectorField {
    field(format!("C_{}", k), conformal_xi(n, k), (JetExpr::x(k) * JetExpr::u()).scale(q))
}

/// `C_k` with `−(4/m) x_k ∂_u`, paired with the exponential interaction.
pub fn conformal_exp(n: usize, k: usize, m: &ParamField) -> VectorField {
    let eta = JetExpr::x(k).scale(&(&ParamField::from_int(-4) / m));
    field(format!("C_{}_exp", k), conformal_xi(n, k), eta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Variational,
    Divergence,
    NotVariational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub generator: String,
    pub status: Status,
    /// `E_u(R)`; zero unless not variational.
    pub obstruction: JetExpr,
    /// `B` with `R = Div B` when a potential was found (divergence symmetries).
    pub potential: Option<Vec<JetExpr>>,
    /// Values chosen for free factors of the family.
    pub factors: Assignment,
}

impl Verdict {
    pub fn is_symmetry(&self) -> bool {
        self.status != Status::NotVariational
    }
}

/// `R = pr¹v(L) + L·Div ξ`.
pub fn remainder(v: &VectorField, lagrangian: &JetExpr) -> Result<JetExpr, JetError> {
    let pr = v.prolong1()?;
    Ok(pr.apply(lagrangian)? + lagrangian * &v.div_xi()?)
}

/// The factor multiplying `u_t²/2` in `L`, used as the weight of candidate potentials.
fn lagrangian_weight(l: &JetExpr) -> JetExpr {
    let ut = MultiIndex::single(0);
    for (m, c) in l.terms() {
        if m.deriv_pow(&ut) == 2 && m.order() == 1 && m.derivs.len() == 1 {
            let w = m.with_deriv(ut, -2);
            return JetExpr::term(c * &ParamField::from_int(2), w);
        }
    }
    JetExpr::one()
}

/// Looks for `B_a = Σ_j c_{a,j} w u^j` (j = 1, 2) with `Div B = R`.
pub fn find_potential(r: &JetExpr, n: usize, weight: &JetExpr) -> Result<Option<Vec<JetExpr>>, SymmetryError> {
    let mut unknowns = Vec::new();
    let mut basis = Vec::new();
    let mut ansatz = JetExpr::zero();
    for a in 0..=n {
        for j in 1..=2u32 {
            let c = Symbol::named(&format!("c_{}_{}", a, j));
            let b = weight * &JetExpr::u().pow(j);
            ansatz = ansatz + total_derivative(&b, a)?.scale(&ParamField::symbol(c));
            unknowns.push(c);
            basis.push((a, b));
        }
    }
    let diff = r - &ansatz;
    let sols = solve_vanishing(&unknowns, &|asg: &[(Symbol, ParamField)]| Ok(substitute_all(&diff, asg)))?;
    let Some(sol) = sols.into_iter().next() else { return Ok(None) };
    let mut b = vec![JetExpr::zero(); n + 1];
    for (c, (a, basis_b)) in unknowns.iter().zip(basis) {
        // Unknowns left free are set to zero.
        let mut value = sol.iter().find(|(s, _)| s == c).map(|(_, v)| v.clone()).unwrap_or_else(ParamField::zero);
        for other in &unknowns {
            value = value.substitute(*other, &ParamField::zero()).map_err(SolveError::from)?;
        }
        b[a] = &b[a] + &basis_b.scale(&value);
    }
    Ok(Some(b))
}

/// Decides whether `v` is a variational or divergence symmetry of `L`.
pub fn variational_test(v: &VectorField, lagrangian: &JetExpr) -> Result<Verdict, SymmetryError> {
    let r = remainder(v, lagrangian)?;
    let mut verdict = Verdict {
        generator: v.name().to_string(),
        status: Status::Variational,
        obstruction: JetExpr::zero(),
        potential: None,
        factors: Vec::new(),
    };
    if r.is_zero() {
        verdict.potential = Some(vec![JetExpr::zero(); v.dim() + 1]);
        return Ok(verdict);
    }
    let obstruction = euler(&r)?;
    if !obstruction.is_zero() {
        verdict.status = Status::NotVariational;
        verdict.obstruction = obstruction;
        return Ok(verdict);
    }
    verdict.status = Status::Divergence;
    verdict.potential = find_potential(&r, v.dim(), &lagrangian_weight(lagrangian))?;
    Ok(verdict)
}

/// One root of a free-factor problem with the verdict of the instantiated generator.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSolution {
    pub assignment: Assignment,
    pub field: VectorField,
    pub lagrangian: JetExpr,
    pub verdict: Verdict,
}

/// All values of `unknowns` (symbols in `v` and/or `L`) that make `v` a
/// variational or divergence symmetry; each root is re-verified from scratch.
pub fn solve_factor(v: &VectorField, lagrangian: &JetExpr, unknowns: &[Symbol]) -> Result<Vec<FactorSolution>, SymmetryError> {
    let obstruction = euler(&remainder(v, lagrangian)?)?;
    let sols = solve_vanishing(unknowns, &|a: &[(Symbol, ParamField)]| Ok(substitute_all(&obstruction, a)))?;
    let mut out = Vec::new();
    for assignment in sols {
        let mut field = v.clone();
        let mut l = lagrangian.clone();
        let mut pole = false;
        for (s, x) in &assignment {
            match (field.substitute(*s, x), l.substitute(*s, x)) {
                (Ok(f), Ok(ll)) => {
                    field = f;
                    l = ll;
                }
                _ => pole = true,
            }
        }
        if pole {
            continue;
        }
        let mut verdict = variational_test(&field, &l)?;
        if !verdict.is_symmetry() {
            continue;
        }
        verdict.factors = assignment.clone();
        out.push(FactorSolution { assignment, field, lagrangian: l, verdict });
    }
    Ok(out)
}

/// A catalog generator; `unknowns` are free factors to be solved for.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub field: VectorField,
    pub unknowns: Vec<Symbol>,
}

/// The generator catalog evaluated for a model of dimension `n`.
pub fn catalog(spec: &ModelSpec) -> Vec<CatalogEntry> {
    let n = spec.n;
    let fixed = |field| CatalogEntry { field, unknowns: Vec::new() };
    let mut out = Vec::new();
    for a in 0..=n {
        out.push(fixed(translation(n, a)));
    }
    for k in 1..=n {
        for l in k + 1..=n {
            out.push(fixed(rotation(n, k, l)));
        }
    }
    for k in 1..=n {
        out.push(fixed(boost(n, k)));
    }
    out.push(CatalogEntry { field: dilation(n, &ParamField::symbol(Symbol::d())), unknowns: vec![Symbol::d()] });
    out.push(fixed(conformal_time(n)));
    for k in 1..=n {
        out.push(CatalogEntry { field: conformal(n, k, &ParamField::symbol(Symbol::q())), unknowns: vec![Symbol::q()] });
    }
    if let Nonlinearity::Exponential { rate, .. } = &spec.nonlinearity {
        out.push(fixed(dilation_exp(n, rate)));
        for k in 1..=n {
            out.push(fixed(conformal_exp(n, k, rate)));
        }
    }
    out
}

/// A catalog generator together with its verdict for one model.
#[derive(Clone, Debug)]
pub struct Listing {
    pub field: VectorField,
    pub verdict: Verdict,
}

fn evaluate(entry: &CatalogEntry, l: &JetExpr) -> Result<Listing, SymmetryError> {
    if entry.unknowns.is_empty() {
        return Ok(Listing { field: entry.field.clone(), verdict: variational_test(&entry.field, l)? });
    }
    if let Some(sol) = solve_factor(&entry.field, l, &entry.unknowns)?.into_iter().next() {
        return Ok(Listing { field: sol.field, verdict: sol.verdict });
    }
    Ok(Listing { field: entry.field.clone(), verdict: variational_test(&entry.field, l)? })
}

/// Evaluates the whole catalog against the model, in catalog order.
pub fn list_symmetries(spec: &ModelSpec) -> Result<Vec<Listing>, SymmetryError> {
    spec.check_symbolic()?;
    let l = spec.lagrangian()?;
    catalog(spec).par_iter().map(|e| evaluate(e, &l)).collect()
}

/// JSON-friendly verdict.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerdictReport {
    pub generator: String,
    pub status: Status,
    pub factors: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<String>>,
}

impl From<&Verdict> for VerdictReport {
    fn from(v: &Verdict) -> Self {
        VerdictReport {
            generator: v.generator.clone(),
            status: v.status,
            factors: v.factors.iter().map(|(s, x)| (s.name(), x.to_string())).collect(),
            obstruction: (!v.obstruction.is_zero()).then(|| v.obstruction.to_sexpr()),
            potential: v.potential.as_ref().map(|b| b.iter().map(JetExpr::to_sexpr).collect()),
        }
    }
}
