//! Process-wide registry of parameter symbols.
//!
//! Symbols are interned once and never removed, so a [`Symbol`] stays valid
//! for the lifetime of the process. The symbols used by the wave-equation
//! family are pre-registered in a fixed order so that canonical forms (which
//! order variables by id) are reproducible across runs.

use std::fmt;
use std::sync::{OnceLock, RwLock};

const PREDECLARED: &[&str] = &["m", "f0", "kappa", "sigma", "sigma0", "d", "q", "p"];

fn registry() -> &'static RwLock<Vec<String>> {
    static REGISTRY: OnceLock<RwLock<Vec<String>>> = OnceLock::new();
    REGISTRY.get_or_init(|| RwLock::new(PREDECLARED.iter().map(|s| s.to_string()).collect()))
}

/// An interned parameter name such as `m` or `kappa`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u32);

impl Symbol {
    /// Looks up `name`, registering it if it has not been seen before.
    pub fn named(name: &str) -> Symbol {
        {
            let reg = registry().read().expect("symbol registry poisoned");
            if let Some(i) = reg.iter().position(|s| s == name) {
                return Symbol(i as u32);
            }
        }
        let mut reg = registry().write().expect("symbol registry poisoned");
        if let Some(i) = reg.iter().position(|s| s == name) {
            return Symbol(i as u32);
        }
        reg.push(name.to_string());
        Symbol((reg.len() - 1) as u32)
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_id(id: usize) -> Symbol {
        Symbol(id as u32)
    }

    pub fn name(self) -> String {
        registry().read().expect("symbol registry poisoned")[self.0 as usize].clone()
    }

    pub fn m() -> Symbol {
        Symbol(0)
    }
    pub fn f0() -> Symbol {
        Symbol(1)
    }
    pub fn kappa() -> Symbol {
        Symbol(2)
    }
    pub fn sigma() -> Symbol {
        Symbol(3)
    }
    pub fn sigma0() -> Symbol {
        Symbol(4)
    }
    pub fn d() -> Symbol {
        Symbol(5)
    }
    pub fn q() -> Symbol {
        Symbol(6)
    }
    pub fn p() -> Symbol {
        Symbol(7)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predeclared_symbols_have_fixed_ids() {
        assert_eq!(Symbol::named("m"), Symbol::m());
        assert_eq!(Symbol::named("sigma0"), Symbol::sigma0());
        assert_eq!(Symbol::p().name(), "p");
    }

    #[test]
    fn registration_is_idempotent() {
        let a = Symbol::named("lambda_test");
        let b = Symbol::named("lambda_test");
        assert_eq!(a, b);
        assert_eq!(a.name(), "lambda_test");
    }
}
