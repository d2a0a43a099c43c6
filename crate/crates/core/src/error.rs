use thiserror::Error;

use crate::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a root of type C{rank}: {vector}")]
    NotARoot { rank: usize, vector: String },

    #[error("unknown Weyl element `{0}`")]
    UnknownWeylElement(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cannot resolve character class for power {power} of {class}")]
    UnresolvedClass { class: String, power: i64 },

    #[error("order at s0 = {s0} is only known up to critical-strip zeros of {symbols}")]
    StripUnknown { s0: Q, symbols: String },

    #[error("leading coefficient indeterminate: germ vanishes to order at least {at_least}")]
    Indeterminate { at_least: i64 },

    #[error("series leading coefficient is not invertible: {0}")]
    NotInvertible(String),

    #[error("no local rule covers {0}")]
    UncoveredKey(String),

    #[error("choice {choice} is not covered by the action notes of {key}")]
    UnknownChoice { key: String, choice: String },

    #[error("invalid place profile: {0}")]
    InvalidProfile(String),

    #[error("numeric evaluation failed: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
