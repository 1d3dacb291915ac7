//! Infix parser for parameter-field values: `3/2`, `-m`, `(n+3+m)/(n-1+m)`, `f0*kappa^2`.
//!
//! Decimal literals are read exactly (`0.25` is `1/4`). The output of
//! `ParamField`'s `Display` impl is accepted by this parser.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::field::ParamField;
use super::symbol::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{1}` at offset {0}")]
    Unexpected(usize, char),
    #[error("unexpected end of input")]
    Eof,
    #[error("trailing input at offset {0}")]
    Trailing(usize),
    #[error("division by zero")]
    DivZero,
    #[error("exponent must be an integer literal")]
    BadExponent,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ParamField, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ParamField, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc * self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.checked_div(&d).ok_or(ParseError::DivZero)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ParamField, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ParamField, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.integer().ok_or(ParseError::BadExponent)?;
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return Err(ParseError::DivZero);
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Option<i32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn atom(&mut self) -> Result<ParamField, ParseError> {
        let c = self.peek().ok_or(ParseError::Eof)?;
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    Ok(e)
                }
                Some(c) => Err(ParseError::Unexpected(self.pos, c as char)),
                None => Err(ParseError::Eof),
            }
        } else if c.is_ascii_digit() || c == b'.' {
            self.number()
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            Ok(ParamField::symbol(Symbol::named(name)))
        } else {
            Err(ParseError::Unexpected(self.pos, c as char))
        }
    }

    fn number(&mut self) -> Result<ParamField, ParseError> {
        let start = self.pos;
        let mut int_part = BigInt::zero();
        let mut frac = BigRational::zero();
        let mut scale = BigRational::one();
        let ten = BigInt::from(10);
        let mut seen_dot = false;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() {
                let digit = BigInt::from(c - b'0');
                if seen_dot {
                    scale /= BigRational::from_integer(ten.clone());
                    frac += BigRational::from_integer(digit) * &scale;
                } else {
                    int_part = int_part * &ten + digit;
                }
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start + 1 && self.src[start] == b'.' {
            return Err(ParseError::Unexpected(start, '.'));
        }
        Ok(ParamField::rational(BigRational::from_integer(int_part) + frac))
    }
}

/// Parses an infix parameter expression into canonical form.
pub fn parse_param(s: &str) -> Result<ParamField, ParseError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError::Trailing(p.pos));
    }
    Ok(v)
}
