use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its domain.
    InvalidInput(String),
    /// The requested object would exceed the configured size cap.
    ResourceLimit { required: u128, cap: u128 },
    /// An iterative solver ran out of steps.
    NonConvergence { what: &'static str, steps: usize },
    /// No sign change could be bracketed.
    NoBracket(&'static str),
    /// The reference value sits on the extremum, so it has no partner.
    NoDistinctPartner { p_ref: f64, extremum: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::ResourceLimit { required, cap } => {
                write!(
                    f,
                    "resource limit: {required} entries requested, cap is {cap}"
                )
            }
            Error::NonConvergence { what, steps } => {
                write!(f, "{what} did not converge after {steps} steps")
            }
            Error::NoBracket(what) => write!(f, "no sign change bracketed for {what}"),
            Error::NoDistinctPartner { p_ref, extremum } => write!(
                f,
                "p = {p_ref} is at the extremum p = {extremum}; no distinct partner exists"
            ),
        }
    }
}

impl core::error::Error for Error {}
