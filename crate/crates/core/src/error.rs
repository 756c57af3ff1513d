use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemiringError {
    #[error("unknown semiring `{0}`")]
    UnknownSemiring(String),
    #[error("malformed weight literal `{0}`")]
    Malformed(String),
    #[error("gcd of an empty sequence")]
    EmptyGcd,
}

/// Syntax error in an expression, with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    /// A closure whose operand has a nonzero constant term.
    #[error("closure at positions {first}..{last} has a nullable operand (constant term {coeff})")]
    NotProper {
        first: usize,
        last: usize,
        coeff: String,
    },
    #[error("operation requires the boolean semiring")]
    NotBoolean,
}

/// Schema violation in a WFA document. `pointer` is a JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pointer}: {message}")]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

/// Why a WFA was found not to be the Glushkov automaton of an SNF expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RejectReason {
    NotHomogeneous,
    NotHammock,
    OrbitBoundaryIrregular,
    FactorizationFailed,
    NotReducible,
    /// The recovered expression disagrees with the automaton on some word.
    VerificationFailed,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct Rejection {
    pub reason: RejectReason,
    /// Vertex ids of the orbit being processed, innermost last level.
    pub orbit: Vec<usize>,
    pub step: String,
    pub detail: String,
}

impl Rejection {
    pub fn new(reason: RejectReason, step: impl Into<String>, detail: impl Into<String>) -> Self {
        Rejection {
            reason,
            orbit: Vec::new(),
            step: step.into(),
            detail: detail.into(),
        }
    }

    pub fn in_orbit(mut self, orbit: &[usize]) -> Self {
        if self.orbit.is_empty() {
            self.orbit = orbit.to_vec();
        }
        self
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.reason, self.step)?;
        if !self.orbit.is_empty() {
            write!(f, " (orbit {:?})", self.orbit)?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}
