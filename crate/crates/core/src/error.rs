use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scattering denominator vanishes at omega = {omega}")]
    DegenerateDenominator { omega: f64 },

    #[error("hopping rate J must be positive and finite, got {0}")]
    InvalidHopping(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("derivative step too large at omega = {omega}: estimates {coarse} and {fine} disagree")]
    StepTooLarge { omega: f64, coarse: f64, fine: f64 },

    #[error("invalid frequency window [{lo}, {hi}]")]
    InvalidWindow { lo: f64, hi: f64 },

    #[error("transmission amplitude vanishes; no finite transfer matrix")]
    ZeroTransmission,

    #[error("Bloch relation evaluated on a polariton pole at omega = {omega}")]
    PoleAtBandEdge { omega: f64 },

    #[error("band grid too coarse: run of {points} point(s) near omega = {omega}")]
    GridTooCoarse { omega: f64, points: usize },

    #[error("no forbidden band found above resonance in [{lo}, {hi}]")]
    NoGapFound { lo: f64, hi: f64 },

    #[error("degenerate gap-law fit: {0}")]
    DegenerateFit(String),

    #[error("singular amplitude system (condition number {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("{source} (at omega = {omega})")]
    AtFrequency {
        omega: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { path: path.into(), message: message.into() }
    }

    pub(crate) fn at(self, omega: f64) -> Self {
        match self {
            e @ Error::AtFrequency { .. } => e,
            e => Error::AtFrequency { omega, source: Box::new(e) },
        }
    }

    /// Strips any frequency context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtFrequency { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for configuration problems (as opposed to numerical or I/O failures).
    pub fn is_config(&self) -> bool {
        matches!(
            self.root(),
            Error::Parse(_)
                | Error::Validation { .. }
                | Error::InvalidParameter { .. }
                | Error::InvalidHopping(_)
                | Error::InvalidWindow { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self.root(), Error::Io(_))
    }
}
