use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A declarative description named something we do not support or that is
    /// internally inconsistent.
    InvalidSystem(String),
    NoGenerators,
    NotSelfMap { generator: usize, reason: String },
    GeneratorIndex { index: usize, k: usize },
    /// Point or potential does not belong to the system's space.
    SpaceMismatch(&'static str),
    /// A symbolic point was asked for a symbol past its stored prefix.
    DepthUnderflow { needed: usize, available: usize },
    /// Two symbolic points agree on everything that is stored.
    Indistinguishable,
    Overflow { k: usize, n: usize },
    OrbitCap { size: u64, cap: u64 },
    EmptySample,
    DuplicatePoint(usize),
    PoolTooLarge { size: usize, cap: usize },
    BracketNotFound { lo: f64, hi: f64 },
    InvalidArgument(String),
    TrimPrecondition(String),
    NotACover { missing: usize },
    MeasureNotSupported,
    InvalidMeasure(String),
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSystem(s) => write!(f, "invalid system: {s}"),
            Error::NoGenerators => write!(f, "a system needs at least one generator"),
            Error::NotSelfMap { generator, reason } => {
                write!(f, "generator {generator} does not map the space into itself: {reason}")
            }
            Error::GeneratorIndex { index, k } => {
                write!(f, "generator index {index} out of range for k = {k}")
            }
            Error::SpaceMismatch(what) => write!(f, "{what} does not belong to the system's space"),
            Error::DepthUnderflow { needed, available } => write!(
                f,
                "symbolic prefix exhausted: needed depth {needed}, only {available} stored"
            ),
            Error::Indistinguishable => {
                write!(f, "symbolic points agree on their whole stored prefix")
            }
            Error::Overflow { k, n } => write!(f, "level size overflows for k = {k}, n = {n}"),
            Error::OrbitCap { size, cap } => {
                write!(f, "orbit table of {size} entries exceeds the cap of {cap}")
            }
            Error::EmptySample => write!(f, "sample set is empty"),
            Error::DuplicatePoint(i) => write!(f, "sample point {i} is a duplicate"),
            Error::PoolTooLarge { size, cap } => {
                write!(f, "candidate pool of {size} balls exceeds the exact-search cap of {cap}")
            }
            Error::BracketNotFound { lo, hi } => {
                write!(f, "no sign change of ln M found in [{lo}, {hi}]")
            }
            Error::InvalidArgument(s) => write!(f, "invalid argument: {s}"),
            Error::TrimPrecondition(s) => write!(f, "trim precondition violated: {s}"),
            Error::NotACover { missing } => {
                write!(f, "cover strategy misses {missing} sample point(s)")
            }
            Error::MeasureNotSupported => write!(f, "measure not supported on Z"),
            Error::InvalidMeasure(s) => write!(f, "invalid measure: {s}"),
            Error::Unsupported(s) => write!(f, "unsupported: {s}"),
        }
    }
}

impl core::error::Error for Error {}
