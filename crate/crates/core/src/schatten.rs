//! Schatten p-norms: the vector p-norm of the singular values.
//!
//! `p = 1` is the nuclear norm, `p = 2` the Frobenius norm and `p = ∞` the
//! spectral (operator two-) norm. Only integer `p ≥ 1` and `∞` are admitted.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::{singular_values, DenseMatrix};
use crate::error::{Error, Result};

/// Index `p` of a Schatten norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchattenIndex {
    Finite(u32),
    Inf,
}

impl SchattenIndex {
    pub const NUCLEAR: Self = Self::Finite(1);
    pub const FROBENIUS: Self = Self::Finite(2);
    pub const SPECTRAL: Self = Self::Inf;

    pub fn finite(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("Schatten index must be >= 1".into()));
        }
        Ok(Self::Finite(p))
    }

    pub fn is_even(self) -> bool {
        matches!(self, Self::Finite(p) if p % 2 == 0)
    }

    pub fn is_inf(self) -> bool {
        self == Self::Inf
    }

    /// `p/2` for even `p`, `∞` for `∞`; `None` for odd `p`.
    pub fn half(self) -> Option<Self> {
        match self {
            Self::Inf => Some(Self::Inf),
            Self::Finite(p) if p % 2 == 0 => Some(Self::Finite(p / 2)),
            Self::Finite(_) => None,
        }
    }

    /// `1/p`, zero for `∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Inf => 0.0,
            Self::Finite(p) => 1.0 / p as f64,
        }
    }

    /// `d^{1/p}` with `0^{1/p} = 0` for every p, including ∞.
    pub fn root_of_dim(self, d: usize) -> f64 {
        if d == 0 {
            0.0
        } else {
            (d as f64).powf(self.reciprocal())
        }
    }
}

impl fmt::Display for SchattenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for SchattenIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Inf),
            other => {
                let p: u32 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("Schatten index {s:?} is neither an integer >= 1 nor \"inf\"")))?;
                Self::finite(p)
            }
        }
    }
}

impl Serialize for SchattenIndex {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(p) => ser.serialize_u32(*p),
            Self::Inf => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SchattenIndex {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(p) => Self::finite(p).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `‖A‖_p` from the singular values of `a`.
pub fn schatten_norm(a: &DenseMatrix, p: SchattenIndex) -> Result<f64> {
    let s = singular_values(a)?;
    schatten_norm_of_singular_values(&s, p)
}

/// Schatten norm of a matrix with the given singular values.
///
/// Evaluated as `σ_max · (Σ (σ_j/σ_max)^p)^{1/p}` so large `p` cannot overflow.
pub fn schatten_norm_of_singular_values(sigmas: &[f64], p: SchattenIndex) -> Result<f64> {
    if let Some(&bad) = sigmas.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
        return Err(Error::NegativeSingularValue(bad));
    }
    let top = sigmas.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    Ok(match p {
        SchattenIndex::Inf => top,
        SchattenIndex::Finite(1) => sigmas.iter().sum(),
        SchattenIndex::Finite(q) => {
            let q = q as i32;
            let sum: f64 = sigmas.iter().map(|s| (s / top).powi(q)).sum();
            top * sum.powf(1.0 / q as f64)
        }
    })
}
