//! Exact parameter arithmetic: symbols, polynomials, and the rational-function field.

mod field;
mod parse;
mod poly;
mod symbol;

pub use field::{FieldError, ParamField};
pub use parse::{parse_param, ParseError};
pub use poly::Poly;
pub use symbol::Symbol;
