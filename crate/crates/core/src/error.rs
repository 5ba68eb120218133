use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A node or closed form was evaluated outside its domain.
    #[error("domain error in {node} at x = {x}: {reason}")]
    Domain { node: String, x: f64, reason: String },

    /// The Schwarzian is undefined because `f'` vanishes.
    #[error("critical point at x = {x}: f'(x) = {slope:e} is below tolerance")]
    CriticalPoint { x: f64, slope: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Grid evidence cannot decide, e.g. `f'` vanishes on a whole interval.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("solution blew up at t = {t}: |x| = {x:e} exceeds 1e12")]
    Overflow { t: f64, x: f64 },

    #[error("only {found} extrema found before t = {horizon}, needed {wanted}")]
    NoExtremum { found: usize, wanted: usize, horizon: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(node: impl Into<String>, x: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            node: node.into(),
            x,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
