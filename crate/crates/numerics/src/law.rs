//! Floating-point forms of the damping law a(t), the integrating factor μ(t)
//! and the interaction f(u), instantiated from a [`ModelSpec`].

use noether_core::model::{Damping, ModelError, ModelSpec, Nonlinearity};
use noether_core::param::{ParamField, Symbol};
use serde::Serialize;
use thiserror::Error;

/// Floor below which `ln|u|` terms contribute nothing.
pub const LOG_FLOOR: f64 = 1e-12;

/// Parameter values used to instantiate a model, applied in order.
pub type Bindings = Vec<(Symbol, ParamField)>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LawError {
    #[error("`{what}` is not a number after binding parameters: {value}")]
    Unbound { what: String, value: String },
    #[error("numeric runs need a concrete {0}")]
    Generic(&'static str),
    #[error("invalid damping table: {0}")]
    Table(String),
    #[error("t = {t} is outside the domain of {what}")]
    Domain { what: &'static str, t: f64 },
    #[error("F^({0}) is not available numerically")]
    Derivative(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn bind(v: &ParamField, bindings: &[(Symbol, ParamField)]) -> Result<ParamField, LawError> {
    let mut out = v.clone();
    for (s, x) in bindings {
        out = out.substitute(*s, x).map_err(|e| LawError::Model(e.into()))?;
    }
    Ok(out)
}

fn number(v: &ParamField, what: &str, bindings: &[(Symbol, ParamField)]) -> Result<f64, LawError> {
    let b = bind(v, bindings)?;
    b.to_f64().ok_or_else(|| LawError::Unbound { what: what.to_string(), value: b.to_string() })
}

/// Exponent of `u^p`; integer powers avoid the branch cut at `u < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Exponent {
    Int(i32),
    Real(f64),
}

impl Exponent {
    fn from_field(p: &ParamField, what: &str, bindings: &[(Symbol, ParamField)]) -> Result<Exponent, LawError> {
        let b = bind(p, bindings)?;
        match b.as_integer() {
            Some(k) if k.abs() < i32::MAX as i64 => Ok(Exponent::Int(k as i32)),
            _ => Ok(Exponent::Real(number(&b, what, &[])?)),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Int(k) => k as f64,
            Exponent::Real(p) => p,
        }
    }

    /// `u^p`, odd-extended as `sign(u)|u|^p` for non-integer `p`.
    pub fn pow(self, u: f64) -> f64 {
        match self {
            Exponent::Int(k) => u.powi(k),
            Exponent::Real(p) => u.signum() * u.abs().powf(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ForceLaw {
    Power { f0: f64, p: Exponent },
    Exponential { f0: f64, rate: f64 },
    Logarithmic { sigma: f64, kappa: f64 },
}

fn log_abs(u: f64) -> f64 {
    if u.abs() < LOG_FLOOR {
        0.0
    } else {
        u.abs().ln()
    }
}

impl ForceLaw {
    pub fn from_spec(nl: &Nonlinearity, bindings: &[(Symbol, ParamField)]) -> Result<ForceLaw, LawError> {
        Ok(match nl {
            Nonlinearity::Power { f0, p } => {
                let p = Exponent::from_field(p, "p", bindings)?;
                if p.value() == -1.0 {
                    return Err(ModelError::PowerMinusOne.into());
                }
                ForceLaw::Power { f0: number(f0, "f0", bindings)?, p }
            }
            Nonlinearity::Exponential { f0, rate } => {
                let rate = number(rate, "rate", bindings)?;
                if rate == 0.0 {
                    return Err(ModelError::ZeroRate.into());
                }
                ForceLaw::Exponential { f0: number(f0, "f0", bindings)?, rate }
            }
            Nonlinearity::Logarithmic { sigma, kappa } => {
                ForceLaw::Logarithmic { sigma: number(sigma, "sigma", bindings)?, kappa: number(kappa, "kappa", bindings)? }
            }
            Nonlinearity::Generic => return Err(LawError::Generic("nonlinearity")),
        })
    }

    /// `f(u)`.
    pub fn force(&self, u: f64) -> f64 {
        match *self {
            ForceLaw::Power { f0, p } => f0 * p.pow(u),
            ForceLaw::Exponential { f0, rate } => f0 * (rate * u).exp(),
            ForceLaw::Logarithmic { sigma, kappa } => (sigma + kappa * log_abs(u)) * u,
        }
    }

    /// `F(u)` with `F' = f`.
    pub fn potential(&self, u: f64) -> f64 {
        match *self {
            ForceLaw::Power { f0, p } => {
                let p1 = p.value() + 1.0;
                let up1 = match p {
                    Exponent::Int(k) => u.powi(k + 1),
                    Exponent::Real(q) => u.abs().powf(q + 1.0),
                };
                f0 * up1 / p1
            }
            ForceLaw::Exponential { f0, rate } => f0 / rate * (rate * u).exp(),
            ForceLaw::Logarithmic { sigma, kappa } => {
                let u2 = u * u;
                0.5 * sigma * u2 + 0.5 * kappa * u2 * log_abs(u) - 0.25 * kappa * u2
            }
        }
    }

    /// `f'(u)`.
    pub fn force_derivative(&self, u: f64) -> f64 {
        match *self {
            ForceLaw::Power { f0, p } => match p {
                Exponent::Int(0) => 0.0,
                Exponent::Int(k) => f0 * k as f64 * u.powi(k - 1),
                Exponent::Real(q) => f0 * q * u.abs().powf(q - 1.0),
            },
            ForceLaw::Exponential { f0, rate } => f0 * rate * (rate * u).exp(),
            ForceLaw::Logarithmic { sigma, kappa } => sigma + kappa + kappa * log_abs(u),
        }
    }

    /// `F^(j)(u)` for `j ≤ 2`.
    pub fn nth(&self, j: u32, u: f64) -> Result<f64, LawError> {
        match j {
            0 => Ok(self.potential(u)),
            1 => Ok(self.force(u)),
            2 => Ok(self.force_derivative(u)),
            _ => Err(LawError::Derivative(j)),
        }
    }

    /// True when the law is evaluated off its real branch for `u < 0`.
    pub fn needs_positive_data(&self) -> bool {
        matches!(self, ForceLaw::Power { p: Exponent::Real(_), .. })
    }

    pub fn is_linear(&self) -> bool {
        match *self {
            ForceLaw::Power { f0, p } => f0 == 0.0 || p == Exponent::Int(1),
            ForceLaw::Exponential { f0, .. } => f0 == 0.0,
            ForceLaw::Logarithmic { kappa, .. } => kappa == 0.0,
        }
    }
}

/// Piecewise-linear `a(t)` with its running integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    t: Vec<f64>,
    a: Vec<f64>,
    integral: Vec<f64>,
}

impl Table {
    pub fn new(samples: &[(f64, f64)]) -> Result<Table, LawError> {
        if samples.len() < 2 {
            return Err(LawError::Table("need at least two samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(LawError::Table("times must be strictly increasing".into()));
        }
        if samples.iter().any(|(t, a)| !t.is_finite() || !a.is_finite()) {
            return Err(LawError::Table("non-finite sample".into()));
        }
        let t: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let a: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let mut integral = vec![0.0];
        for i in 1..t.len() {
            integral.push(integral[i - 1] + 0.5 * (a[i] + a[i - 1]) * (t[i] - t[i - 1]));
        }
        Ok(Table { t, a, integral })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }

    fn segment(&self, t: f64) -> Result<usize, LawError> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&t) {
            return Err(LawError::Domain { what: "tabulated a(t)", t });
        }
        Ok(match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            k => (k - 1).min(self.t.len() - 2),
        })
    }

    pub fn a(&self, t: f64) -> Result<f64, LawError> {
        let i = self.segment(t)?;
        let w = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        Ok(self.a[i] + w * (self.a[i + 1] - self.a[i]))
    }

    /// Slope of the segment containing `t`.
    pub fn slope(&self, t: f64) -> Result<f64, LawError> {
        let i = self.segment(t)?;
        Ok((self.a[i + 1] - self.a[i]) / (self.t[i + 1] - self.t[i]))
    }

    /// `∫_{t_first}^t a`.
    pub fn integral(&self, t: f64) -> Result<f64, LawError> {
        let i = self.segment(t)?;
        let at = self.a(t)?;
        Ok(self.integral[i] + 0.5 * (self.a[i] + at) * (t - self.t[i]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DampingLaw {
    None,
    /// `a = m/t`, `μ = t^m`.
    Power { m: f64 },
    /// `a = a0`, `μ = exp(a0 (t − t0))`.
    Constant { a0: f64 },
    Tabulated(Table),
}

impl DampingLaw {
    pub fn from_spec(d: &Damping, bindings: &[(Symbol, ParamField)]) -> Result<DampingLaw, LawError> {
        Ok(match d {
            Damping::None => DampingLaw::None,
            Damping::Power(m) => DampingLaw::Power { m: number(m, "m", bindings)? },
            Damping::Constant(a0) => DampingLaw::Constant { a0: number(a0, "a0", bindings)? },
            Damping::Tabulated(s) => DampingLaw::Tabulated(Table::new(s)?),
            Damping::Generic => return Err(LawError::Generic("damping")),
        })
    }

    pub fn a(&self, t: f64) -> Result<f64, LawError> {
        match self {
            DampingLaw::None => Ok(0.0),
            DampingLaw::Power { m } => {
                if t <= 0.0 {
                    return Err(LawError::Domain { what: "a = m/t", t });
                }
                Ok(m / t)
            }
            DampingLaw::Constant { a0 } => Ok(*a0),
            DampingLaw::Tabulated(tab) => tab.a(t),
        }
    }

    /// `a^(j)(t)`.
    pub fn nth(&self, j: u32, t: f64) -> Result<f64, LawError> {
        if j == 0 {
            return self.a(t);
        }
        match self {
            DampingLaw::None | DampingLaw::Constant { .. } => Ok(0.0),
            DampingLaw::Power { m } => {
                if t <= 0.0 {
                    return Err(LawError::Domain { what: "a = m/t", t });
                }
                let fact: f64 = (1..=j).map(|k| k as f64).product();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Ok(sign * m * fact * t.powi(-(j as i32) - 1))
            }
            DampingLaw::Tabulated(tab) if j == 1 => tab.slope(t),
            DampingLaw::Tabulated(_) => Ok(0.0),
        }
    }

    /// `μ(t)` with `μ' = aμ`, normalized by `μ(t0) = 1` except for `t^m`.
    pub fn mu(&self, t: f64, t0: f64) -> Result<f64, LawError> {
        match self {
            DampingLaw::None => Ok(1.0),
            DampingLaw::Power { m } => {
                if t <= 0.0 {
                    return Err(LawError::Domain { what: "mu = t^m", t });
                }
                Ok(t.powf(*m))
            }
            DampingLaw::Constant { a0 } => Ok((a0 * (t - t0)).exp()),
            DampingLaw::Tabulated(tab) => Ok((tab.integral(t)? - tab.integral(t0)?).exp()),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DampingLaw::None)
    }
}

/// A model with every parameter instantiated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericModel {
    pub n: usize,
    pub damping: DampingLaw,
    pub force: ForceLaw,
    pub t0: f64,
}

impl NumericModel {
    pub fn from_spec(spec: &ModelSpec, bindings: &[(Symbol, ParamField)]) -> Result<NumericModel, LawError> {
        Ok(NumericModel {
            n: spec.n,
            damping: DampingLaw::from_spec(&spec.damping, bindings)?,
            force: ForceLaw::from_spec(&spec.nonlinearity, bindings)?,
            t0: number(&spec.t0, "t0", bindings)?,
        })
    }
}
