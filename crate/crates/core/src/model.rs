//! The damped wave family `u_tt − Δu + a(t)u_t + f(u) = 0`: damping laws,
//! nonlinearities, the integrating factor μ, and the assembled Lagrangian and
//! residual as jet expressions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::JetExpr;
use crate::param::{parse_param, FieldError, ParamField, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("tabulated damping has no symbolic integrating factor")]
    TabulatedSymbolic,
    #[error("constant damping has no symbolic integrating factor")]
    ConstantSymbolic,
    #[error("power nonlinearity with p = -1 is not supported")]
    PowerMinusOne,
    #[error("exponential nonlinearity needs a nonzero rate")]
    ZeroRate,
    #[error("degenerate nonlinearity, f'' vanishes: {0}")]
    Degenerate(String),
    #[error("pole at m = 1 - n = {0}")]
    Pole(i64),
    #[error("dimension n = {0} is not supported")]
    Dimension(usize),
    #[error("invalid value for `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The damping coefficient `a(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Damping {
    None,
    /// `a = m/t`, `μ = t^m`.
    Power(ParamField),
    /// An unspecified `a(t)` with opaque `μ`, `μ' = aμ`.
    Generic,
    /// `a = a0`; numeric only.
    Constant(ParamField),
    /// Samples `(t, a)` on an increasing time grid; numeric only.
    Tabulated(Vec<(f64, f64)>),
}

/// The interaction `f(u)` together with its antiderivative `F`.
#[derive(Clone, Debug, PartialEq)]
pub enum Nonlinearity {
    /// `f = f0 u^p`.
    Power { f0: ParamField, p: ParamField },
    /// `f = f0 e^{rate·u}`.
    Exponential { f0: ParamField, rate: ParamField },
    /// `f = (σ + κ ln|u|) u`.
    Logarithmic { sigma: ParamField, kappa: ParamField },
    /// Opaque `F` with `F' = f`.
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub n: usize,
    pub damping: Damping,
    pub nonlinearity: Nonlinearity,
    pub t0: ParamField,
}

/// `p = (n+3+m)/(n−1+m)`.
pub fn special_exponent(n: usize, m: &ParamField) -> Result<ParamField, ModelError> {
    let n = ParamField::from_int(n as i64);
    let den = &(&n - &ParamField::one()) + m;
    if den.is_zero() {
        return Err(ModelError::Pole(1 - n.as_integer().unwrap_or(0)));
    }
    Ok(&(&(&n + &ParamField::from_int(3)) + m) / &den)
}

/// `q = 1 − n − m`.
pub fn conformal_factor(n: usize, m: &ParamField) -> ParamField {
    &ParamField::from_int(1 - n as i64) - m
}

/// `d = (1 − m − n)/2`.
pub fn dilation_weight(n: usize, m: &ParamField) -> ParamField {
    &conformal_factor(n, m) * &ParamField::ratio(1, 2)
}

impl Damping {
    /// The exponent `m` of power damping, `0` for no damping.
    pub fn power_m(&self) -> Option<ParamField> {
        match self {
            Damping::None => Some(ParamField::zero()),
            Damping::Power(m) => Some(m.clone()),
            _ => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Damping::None | Damping::Power(_) | Damping::Generic)
    }
}

impl Nonlinearity {
    /// `F(u)`.
    pub fn potential(&self) -> Result<JetExpr, ModelError> {
        Ok(match self {
            Nonlinearity::Power { f0, p } => {
                let p1 = p + &ParamField::one();
                if p1.is_zero() {
                    return Err(ModelError::PowerMinusOne);
                }
                JetExpr::u_pow(p1.clone()).scale(&(f0 / &p1))
            }
            Nonlinearity::Exponential { f0, rate } => {
                if rate.is_zero() {
                    return Err(ModelError::ZeroRate);
                }
                JetExpr::exp_u(rate.clone()).scale(&(f0 / rate))
            }
            Nonlinearity::Logarithmic { sigma, kappa } => {
                let u2 = JetExpr::u().pow(2);
                let half = ParamField::ratio(1, 2);
                u2.scale(&(sigma * &half)) + (&u2 * &JetExpr::log_u()).scale(&(kappa * &half))
                    - u2.scale(&(kappa * &ParamField::ratio(1, 4)))
            }
            Nonlinearity::Generic => JetExpr::fder(0),
        })
    }

    /// `f(u)`.
    pub fn force(&self) -> Result<JetExpr, ModelError> {
        Ok(match self {
            Nonlinearity::Power { f0, p } => JetExpr::u_pow(p.clone()).scale(f0),
            Nonlinearity::Exponential { f0, rate } => {
                if rate.is_zero() {
                    return Err(ModelError::ZeroRate);
                }
                JetExpr::exp_u(rate.clone()).scale(f0)
            }
            Nonlinearity::Logarithmic { sigma, kappa } => {
                JetExpr::u().scale(sigma) + (JetExpr::u() * JetExpr::log_u()).scale(kappa)
            }
            Nonlinearity::Generic => JetExpr::fder(1),
        })
    }

    /// Rejects interactions with `f'' ≡ 0`.
    pub fn check_nondegenerate(&self) -> Result<(), ModelError> {
        let bad = match self {
            Nonlinearity::Power { f0, p } => {
                f0.is_zero() || p.is_zero() || p.is_one()
            }
            Nonlinearity::Exponential { f0, rate } => f0.is_zero() || rate.is_zero(),
            Nonlinearity::Logarithmic { kappa, .. } => kappa.is_zero(),
            Nonlinearity::Generic => false,
        };
        if bad {
            Err(ModelError::Degenerate(format!("{:?}", self)))
        } else {
            Ok(())
        }
    }
}

impl ModelSpec {
    pub fn new(n: usize, damping: Damping, nonlinearity: Nonlinearity) -> ModelSpec {
        ModelSpec { n, damping, nonlinearity, t0: ParamField::one() }
    }

    /// The undamped power model with `p = (n+3)/(n−1)` and symbolic `f0`.
    pub fn conformal_power(n: usize, m: ParamField) -> Result<ModelSpec, ModelError> {
        let p = special_exponent(n, &m)?;
        let damping = if m.is_zero() { Damping::None } else { Damping::Power(m) };
        Ok(ModelSpec::new(n, damping, Nonlinearity::Power { f0: ParamField::sym("f0"), p }))
    }

    pub fn check_symbolic(&self) -> Result<(), ModelError> {
        if !(1..=4).contains(&self.n) {
            return Err(ModelError::Dimension(self.n));
        }
        match self.damping {
            Damping::Tabulated(_) => Err(ModelError::TabulatedSymbolic),
            Damping::Constant(_) => Err(ModelError::ConstantSymbolic),
            _ => Ok(()),
        }
    }

    /// `μ` with `μ' = aμ`.
    pub fn mu(&self) -> Result<JetExpr, ModelError> {
        match &self.damping {
            Damping::None => Ok(JetExpr::one()),
            Damping::Power(m) => Ok(JetExpr::t_pow(m.clone())),
            Damping::Generic => Ok(JetExpr::mu()),
            Damping::Constant(_) => Err(ModelError::ConstantSymbolic),
            Damping::Tabulated(_) => Err(ModelError::TabulatedSymbolic),
        }
    }

    /// `a(t)` as an expression.
    pub fn damping_coefficient(&self) -> Result<JetExpr, ModelError> {
        match &self.damping {
            Damping::None => Ok(JetExpr::zero()),
            Damping::Power(m) => Ok(JetExpr::t_pow(ParamField::from_int(-1)).scale(m)),
            Damping::Generic => Ok(JetExpr::damping(0)),
            Damping::Constant(a0) => Ok(JetExpr::constant(a0.clone())),
            Damping::Tabulated(_) => Err(ModelError::TabulatedSymbolic),
        }
    }

    /// `L0 = ½(u_t² − |∇u|²) − F(u)`.
    pub fn lagrangian0(&self) -> Result<JetExpr, ModelError> {
        let half = ParamField::ratio(1, 2);
        let mut l = JetExpr::ud(0).pow(2).scale(&half);
        for k in 1..=self.n {
            l = l - JetExpr::ud(k).pow(2).scale(&half);
        }
        Ok(l - self.nonlinearity.potential()?)
    }

    /// `L = μ L0`.
    pub fn lagrangian(&self) -> Result<JetExpr, ModelError> {
        Ok(self.mu()? * self.lagrangian0()?)
    }

    /// `𝓔 = u_tt − Σ u_kk + a(t)u_t + f(u)`.
    pub fn residual(&self) -> Result<JetExpr, ModelError> {
        let mut e = JetExpr::deriv(&[0, 0]);
        for k in 1..=self.n {
            e = e - JetExpr::deriv(&[k, k]);
        }
        Ok(e + self.damping_coefficient()? * JetExpr::ud(0) + self.nonlinearity.force()?)
    }

    /// Every parameter symbol the model mentions.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        let mut push = |f: &ParamField| {
            for s in f.symbols() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        };
        match &self.damping {
            Damping::Power(m) | Damping::Constant(m) => push(m),
            _ => {}
        }
        match &self.nonlinearity {
            Nonlinearity::Power { f0, p } => {
                push(f0);
                push(p)
            }
            Nonlinearity::Exponential { f0, rate } => {
                push(f0);
                push(rate)
            }
            Nonlinearity::Logarithmic { sigma, kappa } => {
                push(sigma);
                push(kappa)
            }
            Nonlinearity::Generic => {}
        }
        out.sort();
        out
    }

    /// Replaces a symbol everywhere in the model parameters.
    pub fn substitute(&self, s: Symbol, v: &ParamField) -> Result<ModelSpec, ModelError> {
        let sub = |f: &ParamField| f.substitute(s, v);
        let damping = match &self.damping {
            Damping::Power(m) => {
                let m = sub(m)?;
                if m.is_zero() {
                    Damping::None
                } else {
                    Damping::Power(m)
                }
            }
            Damping::Constant(a) => Damping::Constant(sub(a)?),
            other => other.clone(),
        };
        let nonlinearity = match &self.nonlinearity {
            Nonlinearity::Power { f0, p } => Nonlinearity::Power { f0: sub(f0)?, p: sub(p)? },
            Nonlinearity::Exponential { f0, rate } => Nonlinearity::Exponential { f0: sub(f0)?, rate: sub(rate)? },
            Nonlinearity::Logarithmic { sigma, kappa } => {
                Nonlinearity::Logarithmic { sigma: sub(sigma)?, kappa: sub(kappa)? }
            }
            Nonlinearity::Generic => Nonlinearity::Generic,
        };
        Ok(ModelSpec { n: self.n, damping, nonlinearity, t0: sub(&self.t0)? })
    }

    /// One-line description for reports.
    pub fn describe(&self) -> String {
        let a = match &self.damping {
            Damping::None => "a = 0".to_string(),
            Damping::Power(m) => format!("a = ({})/t", m),
            Damping::Generic => "a = a(t)".to_string(),
            Damping::Constant(a0) => format!("a = {}", a0),
            Damping::Tabulated(s) => format!("a tabulated ({} samples)", s.len()),
        };
        let f = match &self.nonlinearity {
            Nonlinearity::Power { f0, p } => format!("f = ({})*u^({})", f0, p),
            Nonlinearity::Exponential { f0, rate } => format!("f = ({})*exp(({})*u)", f0, rate),
            Nonlinearity::Logarithmic { sigma, kappa } => format!("f = ({} + ({})*ln|u|)*u", sigma, kappa),
            Nonlinearity::Generic => "f = F'(u)".to_string(),
        };
        format!("n = {}, {}, {}", self.n, a, f)
    }
}

/// Human-editable model block. Parameter values are strings: `"p/q"`,
/// decimals, infix expressions in other parameters, `"sym"` to keep the
/// parameter symbolic, and `"special"` for `p = (n+3+m)/(n−1+m)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    /// `none`, `power`, `generic`, `constant` or `tabulated`.
    #[serde(default = "default_none")]
    pub damping: String,
    #[serde(default)]
    pub m: Option<String>,
    #[serde(default)]
    pub a0: Option<String>,
    /// `(t, a)` pairs for tabulated damping.
    #[serde(default)]
    pub samples: Option<Vec<[f64; 2]>>,
    /// `power`, `exponential`, `logarithmic` or `generic`.
    #[serde(default = "default_power")]
    pub nonlinearity: String,
    #[serde(default)]
    pub f0: Option<String>,
    #[serde(default)]
    pub p: Option<String>,
    /// Exponential rate; defaults to the damping exponent `m`.
    #[serde(default)]
    pub rate: Option<String>,
    #[serde(default)]
    pub sigma: Option<String>,
    #[serde(default)]
    pub kappa: Option<String>,
    #[serde(default)]
    pub t0: Option<String>,
}

fn default_none() -> String {
    "none".into()
}

fn default_power() -> String {
    "power".into()
}

fn config_err(key: &str, msg: impl ToString) -> ModelError {
    ModelError::Config { key: key.into(), msg: msg.to_string() }
}

impl ModelConfig {
    fn value(&self, key: &str, raw: Option<&String>, default: &str, m: &ParamField) -> Result<ParamField, ModelError> {
        let text = raw.map(String::as_str).unwrap_or(default).trim();
        if text == "sym" {
            return Ok(ParamField::sym(key));
        }
        if text == "special" {
            if key != "p" {
                return Err(config_err(key, "`special` applies only to p"));
            }
            return special_exponent(self.n, m);
        }
        let v = parse_param(text).map_err(|e| config_err(key, e))?;
        if key != "m" && v.contains(Symbol::m()) {
            return Ok(v.substitute(Symbol::m(), m)?);
        }
        Ok(v)
    }

    pub fn to_spec(&self) -> Result<ModelSpec, ModelError> {
        if !(1..=4).contains(&self.n) {
            return Err(ModelError::Dimension(self.n));
        }
        let m_sym = ParamField::symbol(Symbol::m());
        let m = match self.damping.as_str() {
            "power" => self.value("m", self.m.as_ref(), "sym", &m_sym)?,
            _ => {
                if self.m.is_some() && self.damping != "none" {
                    return Err(config_err("m", "only used with power damping"));
                }
                ParamField::zero()
            }
        };
        let damping = match self.damping.as_str() {
            "none" => Damping::None,
            "power" => {
                if m.is_zero() {
                    Damping::None
                } else {
                    Damping::Power(m.clone())
                }
            }
            "generic" => Damping::Generic,
            "constant" => Damping::Constant(self.value("a0", self.a0.as_ref(), "sym", &m)?),
            "tabulated" => {
                let s = self.samples.as_ref().ok_or_else(|| config_err("samples", "required for tabulated damping"))?;
                if s.len() < 2 || s.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(config_err("samples", "need at least two samples with increasing t"));
                }
                Damping::Tabulated(s.iter().map(|x| (x[0], x[1])).collect())
            }
            other => return Err(config_err("damping", format!("unknown kind `{}`", other))),
        };
        let nonlinearity = match self.nonlinearity.as_str() {
            "power" => Nonlinearity::Power {
                f0: self.value("f0", self.f0.as_ref(), "sym", &m)?,
                p: self.value("p", self.p.as_ref(), "special", &m)?,
            },
            "exponential" => Nonlinearity::Exponential {
                f0: self.value("f0", self.f0.as_ref(), "sym", &m)?,
                rate: self.value("rate", self.rate.as_ref(), "m", &m)?,
            },
            "logarithmic" => Nonlinearity::Logarithmic {
                sigma: self.value("sigma", self.sigma.as_ref(), "sym", &m)?,
                kappa: self.value("kappa", self.kappa.as_ref(), "sym", &m)?,
            },
            "generic" => Nonlinearity::Generic,
            other => return Err(config_err("nonlinearity", format!("unknown kind `{}`", other))),
        };
        let t0 = self.value("t0", self.t0.as_ref(), "1", &m)?;
        let spec = ModelSpec { n: self.n, damping, nonlinearity, t0 };
        if let Nonlinearity::Power { p, .. } = &spec.nonlinearity {
            if (p + &ParamField::one()).is_zero() {
                return Err(ModelError::PowerMinusOne);
            }
        }
        if let Nonlinearity::Exponential { rate, .. } = &spec.nonlinearity {
            if rate.is_zero() {
                return Err(ModelError::ZeroRate);
            }
        }
        if matches!(spec.damping, Damping::Power(_)) {
            if let Some(t0) = spec.t0.as_rational() {
                if t0 <= num_rational::BigRational::from_integer(0.into()) {
                    return Err(config_err("t0", "power damping needs t0 > 0"));
                }
            }
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::euler;

    fn pf(p: i64, q: i64) -> ParamField {
        ParamField::ratio(p, q)
    }

    #[test]
    fn exponents_at_reference_points() {
        assert_eq!(special_exponent(3, &ParamField::zero()).unwrap(), pf(3, 1));
        assert_eq!(conformal_factor(3, &ParamField::zero()), pf(-2, 1));
        assert_eq!(dilation_weight(3, &ParamField::zero()), pf(-1, 1));
        let one = ParamField::one();
        assert_eq!(special_exponent(2, &one).unwrap(), pf(3, 1));
        assert_eq!(conformal_factor(2, &one), pf(-2, 1));
        assert_eq!(dilation_weight(2, &one), pf(-1, 1));
        let m = ParamField::sym("m");
        assert_eq!(special_exponent(3, &m).unwrap().to_string(), "(m + 6)/(m + 2)");
        assert!(matches!(special_exponent(3, &pf(-2, 1)), Err(ModelError::Pole(-2))));
    }

    #[test]
    fn lagrangian_reference_form() {
        let spec = ModelSpec::new(3, Damping::None, Nonlinearity::Power { f0: ParamField::sym("f0"), p: pf(3, 1) });
        let half = pf(1, 2);
        let expected = JetExpr::ud(0).pow(2).scale(&half)
            - (1..=3).map(|k| JetExpr::ud(k).pow(2).scale(&half)).sum::<JetExpr>()
            - JetExpr::u().pow(4).scale(&(ParamField::sym("f0") * pf(1, 4)));
        assert_eq!(spec.lagrangian().unwrap(), expected);
    }

    #[test]
    fn residual_assembly() {
        let spec = ModelSpec::new(2, Damping::None, Nonlinearity::Power { f0: pf(1, 1), p: pf(3, 1) });
        let expected = JetExpr::deriv(&[0, 0]) - JetExpr::deriv(&[1, 1]) - JetExpr::deriv(&[2, 2]) + JetExpr::u().pow(3);
        assert_eq!(spec.residual().unwrap(), expected);
    }

    #[test]
    fn euler_of_lagrangian_is_minus_mu_residual() {
        let m = ParamField::sym("m");
        let specs = [
            ModelSpec::conformal_power(3, m.clone()).unwrap(),
            ModelSpec::new(2, Damping::Generic, Nonlinearity::Generic),
            ModelSpec::new(2, Damping::Power(m.clone()), Nonlinearity::Exponential { f0: ParamField::sym("f0"), rate: m }),
            ModelSpec::new(
                3,
                Damping::None,
                Nonlinearity::Logarithmic { sigma: ParamField::sym("sigma"), kappa: ParamField::sym("kappa") },
            ),
        ];
        for spec in specs {
            let lhs = euler(&spec.lagrangian().unwrap()).unwrap();
            let rhs = -(spec.mu().unwrap() * spec.residual().unwrap());
            assert_eq!(lhs, rhs, "{}", spec.describe());
        }
    }

    #[test]
    fn potential_derivative_is_force() {
        let nl = [
            Nonlinearity::Power { f0: ParamField::sym("f0"), p: ParamField::sym("p") },
            Nonlinearity::Exponential { f0: ParamField::sym("f0"), rate: ParamField::sym("m") },
            Nonlinearity::Logarithmic { sigma: ParamField::sym("sigma"), kappa: ParamField::sym("kappa") },
            Nonlinearity::Generic,
        ];
        for f in nl {
            assert_eq!(f.potential().unwrap().partial_u(), f.force().unwrap());
        }
    }

    #[test]
    fn symbolic_mode_rejects_numeric_damping() {
        let spec = ModelSpec::new(1, Damping::Tabulated(vec![(1.0, 0.0), (2.0, 0.0)]), Nonlinearity::Generic);
        assert_eq!(spec.mu(), Err(ModelError::TabulatedSymbolic));
        assert_eq!(ModelSpec::new(2, Damping::None, Nonlinearity::Generic).mu().unwrap(), JetExpr::one());
        let m = ParamField::sym("m");
        assert_eq!(ModelSpec::new(2, Damping::Power(m.clone()), Nonlinearity::Generic).mu().unwrap(), JetExpr::t_pow(m));
    }

    #[test]
    fn degenerate_interactions_are_flagged() {
        assert!(Nonlinearity::Power { f0: pf(1, 1), p: pf(1, 1) }.check_nondegenerate().is_err());
        assert!(Nonlinearity::Logarithmic { sigma: pf(1, 1), kappa: pf(0, 1) }.check_nondegenerate().is_err());
        assert!(Nonlinearity::Power { f0: pf(1, 1), p: pf(3, 1) }.check_nondegenerate().is_ok());
    }

    #[test]
    fn config_resolves_special_and_rate() {
        let cfg = ModelConfig {
            n: 3,
            damping: "power".into(),
            m: Some("-2".into()),
            a0: None,
            samples: None,
            nonlinearity: "exponential".into(),
            f0: Some("1".into()),
            p: None,
            rate: None,
            sigma: None,
            kappa: None,
            t0: None,
        };
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec.damping, Damping::Power(pf(-2, 1)));
        assert_eq!(spec.nonlinearity, Nonlinearity::Exponential { f0: pf(1, 1), rate: pf(-2, 1) });
        let cfg2 = ModelConfig { nonlinearity: "power".into(), m: Some("sym".into()), n: 2, ..cfg };
        match cfg2.to_spec().unwrap().nonlinearity {
            Nonlinearity::Power { p, .. } => assert_eq!(p.to_string(), "(m + 5)/(m + 1)"),
            other => panic!("{:?}", other),
        }
    }
}
