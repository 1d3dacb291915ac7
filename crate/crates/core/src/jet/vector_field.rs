//! Point vector fields `v = Σ ξ_a ∂_{x_a} + η ∂_u` and their first prolongation.

use super::calculus::total_derivative;
use super::{JetError, JetExpr, MultiIndex};

/// A point symmetry generator; all coefficients depend on (t, x, u) only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    name: String,
    xi: Vec<JetExpr>,
    eta: JetExpr,
}

impl VectorField {
    /// `xi[0]` multiplies `∂_t`, `xi[k]` multiplies `∂_{x_k}`.
    pub fn new(name: impl Into<String>, xi: Vec<JetExpr>, eta: JetExpr) -> Result<VectorField, JetError> {
        let name = name.into();
        for c in xi.iter().chain(std::iter::once(&eta)) {
            if !c.is_point_function() {
                return Err(JetError::NotPointField(name));
            }
        }
        Ok(VectorField { name, xi, eta })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Spatial dimension n (the field has n + 1 horizontal components).
    pub fn dim(&self) -> usize {
        self.xi.len() - 1
    }

    pub fn xi(&self, a: usize) -> &JetExpr {
        &self.xi[a]
    }

    pub fn eta(&self) -> &JetExpr {
        &self.eta
    }

    /// `Q = η − Σ_a ξ_a u_a`.
    pub fn characteristic(&self) -> JetExpr {
        let mut q = self.eta.clone();
        for (a, xi) in self.xi.iter().enumerate() {
            if !xi.is_zero() {
                q = &q - &(xi * &JetExpr::ud(a));
            }
        }
        q
    }

    /// Total divergence `Σ_a D_a ξ_a` of the horizontal part.
    pub fn div_xi(&self) -> Result<JetExpr, JetError> {
        super::calculus::divergence(&self.xi)
    }

    pub fn prolong1(&self) -> Result<Prolongation, JetError> {
        let mut tau = Vec::with_capacity(self.xi.len());
        for a in 0..self.xi.len() {
            let mut t = total_derivative(&self.eta, a)?;
            for (b, xi) in self.xi.iter().enumerate() {
                let dxi = total_derivative(xi, a)?;
                if !dxi.is_zero() {
                    t = &t - &(&JetExpr::ud(b) * &dxi);
                }
            }
            tau.push(t);
        }
        Ok(Prolongation { field: self.clone(), tau })
    }

    /// Substitutes a symbol in every coefficient.
    pub fn substitute(&self, s: crate::param::Symbol, v: &crate::param::ParamField) -> Result<VectorField, JetError> {
        Ok(VectorField {
            name: self.name.clone(),
            xi: self.xi.iter().map(|c| c.substitute(s, v)).collect::<Result<_, _>>()?,
            eta: self.eta.substitute(s, v)?,
        })
    }
}

/// First prolongation `pr¹v = v + Σ_a τ_a ∂_{u_a}`.
#[derive(Clone, Debug)]
pub struct Prolongation {
    field: VectorField,
    tau: Vec<JetExpr>,
}

impl Prolongation {
    /// Coefficient of `∂_{u_a}`: `τ_a = D_a η − Σ_b u_b D_a ξ_b`.
    pub fn tau(&self, a: usize) -> &JetExpr {
        &self.tau[a]
    }

    /// Applies `pr¹v` to a first-order expression.
    pub fn apply(&self, e: &JetExpr) -> Result<JetExpr, JetError> {
        if e.order() > 1 {
            return Err(JetError::OrderOverflow(e.order()));
        }
        let mut out = &self.field.eta * &e.partial_u();
        for (a, xi) in self.field.xi.iter().enumerate() {
            if !xi.is_zero() {
                out = &out + &(xi * &e.partial_var(a));
            }
        }
        for (a, tau) in self.tau.iter().enumerate() {
            if !tau.is_zero() {
                out = &out + &(tau * &e.partial_deriv(&MultiIndex::single(a)));
            }
        }
        Ok(out)
    }
}
