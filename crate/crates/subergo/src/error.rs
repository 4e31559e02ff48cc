use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown letter {letter:?} in rule for {rule:?}")]
    UnknownLetter { rule: String, letter: String },

    #[error("empty rule for letter {0:?}")]
    EmptyRule(String),

    #[error("rule for {letter:?} is not a square grid: {detail}")]
    NonSquareImage { letter: String, detail: String },

    #[error("inconsistent inflation factor: rule for {letter:?} is {found}x{found}, expected {expected}x{expected}")]
    InconsistentInflation { letter: String, expected: usize, found: usize },

    #[error("letter index {0} out of range")]
    LetterOutOfRange(usize),

    #[error("operation needs a {expected}-dimensional substitution, got dim={found}")]
    WrongDimension { expected: u8, found: u8 },

    #[error("predicted size {predicted} exceeds cap {cap}")]
    LengthCap { predicted: u128, cap: u128 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("power iteration did not converge after {iterations} iterations (bracket [{lower}, {upper}])")]
    NoConvergence { iterations: usize, lower: f64, upper: f64 },

    #[error("matrix is not primitive")]
    NotPrimitive,

    #[error("no B-part: {0}")]
    MissingBPart(String),

    #[error("spectral radius of the B-part is {0}, need > 1")]
    DegenerateB(f64),

    #[error("substitution is not admissible: {}", .0.join("; "))]
    Inadmissible(Vec<String>),

    #[error("geometry mismatch: {0}")]
    Geometry(String),

    #[error("word is not in the language within depth {0}")]
    NotInLanguage(usize),

    #[error("bracket depth {requested} exceeds cap {cap}")]
    DepthCap { requested: usize, cap: usize },

    #[error("bracket too wide: mean relative half-width {width:.3e} at extra depth {depth}, need about {needed}")]
    BracketTooWide { width: f64, depth: usize, needed: usize },

    #[error("coverage shortfall: need {needed}, have {available}")]
    Coverage { needed: f64, available: f64 },

    #[error("patch too small for radius {radius}: need level {required_level}")]
    PatchTooSmall { radius: f64, required_level: usize },

    #[error("degenerate vector: {0}")]
    Degenerate(String),

    #[error("invalid observable: {0}")]
    Observable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
