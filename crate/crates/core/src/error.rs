use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid word {0:?}: {1}")]
    InvalidWord(String, &'static str),
    #[error("generator index {generator} out of range for rank {rank}")]
    GeneratorOutOfRange { generator: usize, rank: usize },
    #[error("the identity has no primitive root")]
    IdentityRoot,
    #[error("element is not hyperbolic (|Re a| = {re_a})")]
    NotHyperbolic { re_a: f64 },
    #[error("numeric overflow applying isometry")]
    Overflow,
    #[error("Schottky certificate failed: circles {i} and {j} overlap (gap {gap:.6} < radii {radii:.6})")]
    CertificateFailed { i: usize, j: usize, gap: f64, radii: f64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pressure does not change sign on the grid (pressure({s_hi}) = {value})")]
    NoSignChange { s_hi: f64, value: f64 },
    #[error("no orbit entries in radius window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("no nontrivial kernel element found up to length {0}")]
    EmptyKernel(usize),
    #[error("word {0} is not in the kernel")]
    NotInKernel(String),
    #[error("subgroup rewriting failed: {0}")]
    Rewriting(String),
    #[error("subgroup is not malnormal: {count} violations, first ({g}, {h})")]
    NotMalnormal { count: usize, g: String, h: String },
}

pub type Result<T> = std::result::Result<T, Error>;
