//! Human-readable renderings: plain `Display` and a LaTeX-like form for reports.

use std::fmt;

use super::{JetExpr, Monomial};
use crate::param::ParamField;

fn var_name(v: u8) -> String {
    if v == 0 {
        "t".into()
    } else {
        format!("x{}", v)
    }
}

fn exponent(e: &ParamField) -> String {
    match e.as_integer() {
        Some(k) if k >= 0 => k.to_string(),
        _ => format!("({})", e),
    }
}

fn plain_factors(m: &Monomial) -> Vec<String> {
    let mut out = Vec::new();
    let pw = |base: String, k: String| if k == "1" { base } else { format!("{}^{}", base, k) };
    for (j, k) in &m.derivs {
        let sub: String = j.vars().iter().map(|v| var_name(*v)).collect();
        out.push(pw(format!("u_{}", sub), k.to_string()));
    }
    if !m.u_pow.is_zero() {
        out.push(pw("u".into(), exponent(&m.u_pow)));
    }
    if !m.exp_u.is_zero() {
        out.push(format!("exp({}*u)", exponent(&m.exp_u)));
    }
    if m.log_u > 0 {
        out.push(pw("ln|u|".into(), m.log_u.to_string()));
    }
    for (j, k) in &m.fders {
        out.push(pw(format!("F{}(u)", "'".repeat(*j as usize)), k.to_string()));
    }
    if !m.t_pow.is_zero() {
        out.push(pw("t".into(), exponent(&m.t_pow)));
    }
    if m.log_t > 0 {
        out.push(pw("ln(t)".into(), m.log_t.to_string()));
    }
    for (i, k) in m.x_pows.iter().enumerate() {
        if *k > 0 {
            out.push(pw(format!("x{}", i + 1), k.to_string()));
        }
    }
    if m.mu_pow != 0 {
        out.push(pw("mu".into(), if m.mu_pow == 1 { "1".into() } else { format!("({})", m.mu_pow) }));
    }
    for (j, k) in &m.damp {
        out.push(pw(format!("a{}(t)", "'".repeat(*j as usize)), k.to_string()));
    }
    out
}

fn write_sum(
    f: &mut impl fmt::Write,
    e: &JetExpr,
    coeff: impl Fn(&ParamField) -> (bool, String),
    factors: impl Fn(&Monomial) -> Vec<String>,
    sep: &str,
) -> fmt::Result {
    if e.is_zero() {
        return f.write_str("0");
    }
    for (i, (m, c)) in e.terms().enumerate() {
        let (neg, mag) = coeff(c);
        match (i, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let mut parts = factors(m);
        if mag != "1" || parts.is_empty() {
            parts.insert(0, mag);
        }
        f.write_str(&parts.join(sep))?;
    }
    Ok(())
}

fn plain_coeff(c: &ParamField) -> (bool, String) {
    if let Some(r) = c.as_rational() {
        let neg = r < num_rational::BigRational::from_integer(0.into());
        let mag = if neg { -r } else { r };
        let s = if mag.denom() == &1.into() { mag.numer().to_string() } else { format!("{}/{}", mag.numer(), mag.denom()) };
        (neg, s)
    } else {
        (false, format!("({})", c))
    }
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self, plain_coeff, plain_factors, "*")
    }
}

fn latex_symbol(name: &str) -> String {
    match name {
        "kappa" => "\\kappa".into(),
        "sigma" => "\\sigma".into(),
        "sigma0" => "\\sigma_0".into(),
        "f0" => "f_0".into(),
        other => other.into(),
    }
}

fn latex_field(c: &ParamField) -> String {
    let raw = c.to_string();
    let mut out = String::new();
    let mut word = String::new();
    for ch in raw.chars() {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            word.push(ch);
        } else {
            if !word.is_empty() {
                out.push_str(&latex_symbol(&word));
                word.clear();
            }
            if ch != '*' {
                out.push(ch);
            } else {
                out.push(' ');
            }
        }
    }
    out.push_str(&latex_symbol(&word));
    out
}

fn latex_coeff(c: &ParamField) -> (bool, String) {
    if let Some(r) = c.as_rational() {
        let neg = r < num_rational::BigRational::from_integer(0.into());
        let mag = if neg { -r } else { r };
        let s = if mag.denom() == &1.into() {
            mag.numer().to_string()
        } else {
            format!("\\frac{{{}}}{{{}}}", mag.numer(), mag.denom())
        };
        (neg, s)
    } else {
        (false, format!("\\left({}\\right)", latex_field(c)))
    }
}

fn latex_factors(m: &Monomial) -> Vec<String> {
    let mut out = Vec::new();
    let pw = |base: String, k: String| if k == "1" { base } else { format!("{}^{{{}}}", base, k) };
    for (j, k) in &m.derivs {
        let sub: Vec<String> = j.vars().iter().map(|v| if *v == 0 { "t".into() } else { format!("x_{}", v) }).collect();
        out.push(pw(format!("u_{{{}}}", sub.join("")), k.to_string()));
    }
    let ex = |e: &ParamField| match e.as_integer() {
        Some(k) => k.to_string(),
        None => latex_field(e),
    };
    if !m.u_pow.is_zero() {
        out.push(pw("u".into(), ex(&m.u_pow)));
    }
    if !m.exp_u.is_zero() {
        out.push(format!("e^{{{} u}}", ex(&m.exp_u)));
    }
    if m.log_u > 0 {
        out.push(pw("\\ln|u|".into(), m.log_u.to_string()));
    }
    for (j, k) in &m.fders {
        out.push(pw(format!("F^{{({})}}(u)", j), k.to_string()));
    }
    if !m.t_pow.is_zero() {
        out.push(pw("t".into(), ex(&m.t_pow)));
    }
    if m.log_t > 0 {
        out.push(pw("\\ln t".into(), m.log_t.to_string()));
    }
    for (i, k) in m.x_pows.iter().enumerate() {
        if *k > 0 {
            out.push(pw(format!("x_{}", i + 1), k.to_string()));
        }
    }
    if m.mu_pow != 0 {
        out.push(pw("\\mu".into(), m.mu_pow.to_string()));
    }
    for (j, k) in &m.damp {
        out.push(pw(format!("a^{{({})}}", j), k.to_string()));
    }
    out
}

impl JetExpr {
    /// LaTeX-like rendering used in JSON reports.
    pub fn to_latex(&self) -> String {
        let mut s = String::new();
        let _ = write_sum(&mut s, self, latex_coeff, latex_factors, " ");
        s
    }
}
