//! Plain-text s-expression form of [`JetExpr`], used for golden files and reports.
//!
//! ```text
//! expr   := "0" | "(+" term+ ")"
//! term   := "(*" coeff factor* ")"
//! coeff  := INT | INT "/" INT | "[" infix-parameter-expression "]"
//! factor := base | "(^" base power ")"
//! base   := "t" | "x"K | "u" | "mu" | "(d" VAR+ ")" | "(exp" coeff ")"
//!         | "(ln t)" | "(ln u)" | "(F" J ")" | "(a" J ")"
//! power  := coeff            ; symbolic powers only on t and u
//! ```
//!
//! `(d 0 1)` is `u_{t x_1}`; `(F 1)` is `f = F'`; `(a 0)` is the damping
//! coefficient. The parser also accepts any nesting of `+`, `*` and `^`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{JetExpr, Monomial};
use crate::param::{parse_param, ParamField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SexprError {
    #[error("unbalanced parentheses or brackets")]
    Unbalanced,
    #[error("unexpected token `{0}`")]
    Unexpected(String),
    #[error("bad coefficient `{0}`: {1}")]
    Coefficient(String, String),
    #[error("power `{0}` not allowed here")]
    BadPower(String),
}

fn coeff_str(c: &ParamField) -> String {
    match c.as_rational() {
        Some(r) if r.denom() == &1.into() => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None => format!("[{}]", c),
    }
}

fn push_pow(out: &mut Vec<String>, base: &str, pow: String) {
    if pow == "1" {
        out.push(base.to_string());
    } else {
        out.push(format!("(^ {} {})", base, pow));
    }
}

fn factors(m: &Monomial) -> Vec<String> {
    let mut out = Vec::new();
    for (j, k) in &m.derivs {
        let vars: Vec<String> = j.vars().iter().map(|v| v.to_string()).collect();
        push_pow(&mut out, &format!("(d {})", vars.join(" ")), k.to_string());
    }
    if !m.u_pow.is_zero() {
        push_pow(&mut out, "u", coeff_str(&m.u_pow));
    }
    if !m.exp_u.is_zero() {
        out.push(format!("(exp {})", coeff_str(&m.exp_u)));
    }
    if m.log_u > 0 {
        push_pow(&mut out, "(ln u)", m.log_u.to_string());
    }
    for (j, k) in &m.fders {
        push_pow(&mut out, &format!("(F {})", j), k.to_string());
    }
    if !m.t_pow.is_zero() {
        push_pow(&mut out, "t", coeff_str(&m.t_pow));
    }
    if m.log_t > 0 {
        push_pow(&mut out, "(ln t)", m.log_t.to_string());
    }
    for (i, k) in m.x_pows.iter().enumerate() {
        if *k > 0 {
            push_pow(&mut out, &format!("x{}", i + 1), k.to_string());
        }
    }
    if m.mu_pow != 0 {
        push_pow(&mut out, "mu", m.mu_pow.to_string());
    }
    for (j, k) in &m.damp {
        push_pow(&mut out, &format!("(a {})", j), k.to_string());
    }
    out
}

impl JetExpr {
    pub fn to_sexpr(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::from("(+");
        for (m, c) in self.terms() {
            let _ = write!(s, " (* {}", coeff_str(c));
            for f in factors(m) {
                s.push(' ');
                s.push_str(&f);
            }
            s.push(')');
        }
        s.push(')');
        s
    }
}

#[derive(Debug, Clone)]
enum Node {
    Atom(String),
    Bracket(String),
    List(Vec<Node>),
}

fn tokenize(src: &str) -> Result<Vec<Node>, SexprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut stack: Vec<Vec<Node>> = vec![Vec::new()];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                stack.push(Vec::new());
                i += 1;
            }
            ')' => {
                let done = stack.pop().ok_or(SexprError::Unbalanced)?;
                stack.last_mut().ok_or(SexprError::Unbalanced)?.push(Node::List(done));
                i += 1;
            }
            '[' => {
                let mut depth = 1;
                let start = i + 1;
                i += 1;
                while i < chars.len() && depth > 0 {
                    match chars[i] {
                        '[' => depth += 1,
                        ']' => depth -= 1,
                        _ => {}
                    }
                    i += 1;
                }
                if depth != 0 {
                    return Err(SexprError::Unbalanced);
                }
                let inner: String = chars[start..i - 1].iter().collect();
                stack.last_mut().ok_or(SexprError::Unbalanced)?.push(Node::Bracket(inner));
            }
            ']' => return Err(SexprError::Unbalanced),
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"()[]".contains(chars[i]) {
                    i += 1;
                }
                let tok: String = chars[start..i].iter().collect();
                stack.last_mut().ok_or(SexprError::Unbalanced)?.push(Node::Atom(tok));
            }
        }
    }
    if stack.len() != 1 {
        return Err(SexprError::Unbalanced);
    }
    Ok(stack.pop().expect("root"))
}

fn coeff(node: &Node) -> Result<ParamField, SexprError> {
    let text = match node {
        Node::Atom(s) => s.clone(),
        Node::Bracket(s) => s.clone(),
        Node::List(_) => return Err(SexprError::Unexpected("list where coefficient expected".into())),
    };
    parse_param(&text).map_err(|e| SexprError::Coefficient(text, e.to_string()))
}

fn index(node: &Node) -> Result<usize, SexprError> {
    match node {
        Node::Atom(s) => s.parse().map_err(|_| SexprError::Unexpected(s.clone())),
        other => Err(SexprError::Unexpected(format!("{:?}", other))),
    }
}

fn head(items: &[Node]) -> Option<&str> {
    match items.first() {
        Some(Node::Atom(s)) => Some(s.as_str()),
        _ => None,
    }
}

fn build(node: &Node) -> Result<JetExpr, SexprError> {
    match node {
        Node::Bracket(_) => Ok(JetExpr::constant(coeff(node)?)),
        Node::Atom(s) => match s.as_str() {
            "t" => Ok(JetExpr::t()),
            "u" => Ok(JetExpr::u()),
            "mu" => Ok(JetExpr::mu()),
            s if s.starts_with('x') && s.len() > 1 && s[1..].chars().all(|c| c.is_ascii_digit()) => {
                let k: usize = s[1..].parse().map_err(|_| SexprError::Unexpected(s.into()))?;
                if k == 0 {
                    return Err(SexprError::Unexpected(s.into()));
                }
                Ok(JetExpr::x(k))
            }
            _ => Ok(JetExpr::constant(coeff(node)?)),
        },
        Node::List(items) => {
            let op = head(items).ok_or_else(|| SexprError::Unexpected("list without operator".into()))?;
            let args = &items[1..];
            match op {
                "+" => args.iter().map(build).sum(),
                "*" => args.iter().try_fold(JetExpr::one(), |acc, a| Ok(acc * build(a)?)),
                "^" => {
                    if args.len() != 2 {
                        return Err(SexprError::Unexpected("^ takes two arguments".into()));
                    }
                    let e = coeff(&args[1])?;
                    match &args[0] {
                        Node::Atom(b) if b == "u" => Ok(JetExpr::u_pow(e)),
                        Node::Atom(b) if b == "t" => Ok(JetExpr::t_pow(e)),
                        Node::Atom(b) if b == "mu" => {
                            let k = e.as_integer().ok_or_else(|| SexprError::BadPower(e.to_string()))?;
                            Ok(JetExpr::monomial(Monomial { mu_pow: k as i32, ..Monomial::default() }))
                        }
                        base => {
                            let k = e
                                .as_integer()
                                .filter(|k| *k >= 0)
                                .ok_or_else(|| SexprError::BadPower(e.to_string()))?;
                            Ok(build(base)?.pow(k as u32))
                        }
                    }
                }
                "d" => {
                    let vars: Vec<usize> = args.iter().map(index).collect::<Result<_, _>>()?;
                    if vars.is_empty() || vars.len() > super::MAX_ORDER {
                        return Err(SexprError::Unexpected(format!("derivative order {}", vars.len())));
                    }
                    Ok(JetExpr::deriv(&vars))
                }
                "exp" if args.len() == 1 => Ok(JetExpr::exp_u(coeff(&args[0])?)),
                "ln" if args.len() == 1 => match &args[0] {
                    Node::Atom(v) if v == "t" => Ok(JetExpr::log_t()),
                    Node::Atom(v) if v == "u" => Ok(JetExpr::log_u()),
                    other => Err(SexprError::Unexpected(format!("ln {:?}", other))),
                },
                "F" if args.len() == 1 => Ok(JetExpr::fder(index(&args[0])? as u32)),
                "a" if args.len() == 1 => Ok(JetExpr::damping(index(&args[0])? as u32)),
                other => Err(SexprError::Unexpected(other.to_string())),
            }
        }
    }
}

/// Parses the s-expression form back into canonical form.
pub fn parse_sexpr(src: &str) -> Result<JetExpr, SexprError> {
    let nodes = tokenize(src)?;
    match nodes.as_slice() {
        [single] => build(single),
        [] => Err(SexprError::Unexpected("empty input".into())),
        _ => Err(SexprError::Unexpected("more than one top-level form".into())),
    }
}
