//! Coefficient rings: `ℤ` and prime fields.

use std::fmt;

use serde::Serialize;

use crate::modp::{check_prime, NotPrime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Ring {
    Integers,
    Prime(u64),
}

impl Ring {
    pub fn prime(p: u64) -> Result<Self, NotPrime> {
        check_prime(p).map(Ring::Prime)
    }

    /// Parses `z` or `f<p>`.
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "z" | "Z" => Some(Ring::Integers),
            _ => {
                let p = tag.strip_prefix('f').or_else(|| tag.strip_prefix('F'))?;
                Ring::prime(p.parse().ok()?).ok()
            }
        }
    }

    pub fn normalize(self, x: i128) -> i128 {
        match self {
            Ring::Integers => x,
            Ring::Prime(p) => x.rem_euclid(p as i128),
        }
    }

    pub fn add(self, a: i128, b: i128) -> i128 {
        self.normalize(a + b)
    }

    pub fn mul(self, a: i128, b: i128) -> i128 {
        self.normalize(a * b)
    }

    pub fn neg(self, a: i128) -> i128 {
        self.normalize(-a)
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(self, a: i128) -> Option<i128> {
        match self {
            Ring::Integers => (a == 1 || a == -1).then_some(a),
            Ring::Prime(p) => {
                let a = self.normalize(a);
                (a != 0).then(|| crate::modp::pow_mod(a as u64, p - 2, p) as i128)
            }
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Prime(p) => write!(f, "F{p}"),
        }
    }
}
