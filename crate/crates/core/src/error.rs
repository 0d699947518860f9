use thiserror::Error;

/// Errors raised across the compiler, decoupling generator and verifier.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrobeError {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit count {0} exceeds the 64-qubit register limit")]
    RegisterTooLarge(usize),

    #[error("cannot parse Pauli string `{0}`")]
    PauliParse(String),

    #[error("terms of a Pauli exponential must mutually commute")]
    NonCommutingExponent,

    #[error("generators are not independent (rank {rank} < {count})")]
    DependentGenerators { rank: usize, count: usize },

    #[error("generators do not mutually commute")]
    NonCommutingGenerators,

    #[error("enumeration over {qubits} qubits exceeds the cap of {cap}")]
    EnumerationCap { qubits: usize, cap: usize },

    #[error("degenerate grid {rows}x{cols}")]
    DegenerateGrid { rows: usize, cols: usize },

    #[error("invalid hole specification: {0}")]
    InvalidHole(String),

    #[error("schedule is not cyclic: pulse product is not the identity")]
    NotCyclic,

    #[error("unknown hamiltonian `{0}` referenced by schedule")]
    UnknownHamiltonian(String),

    #[error("inexact pulse angle; only the numeric path is available")]
    InexactPulse,

    #[error("symbolic Magnus expansion supports orders 0..=2, requested {0}")]
    UnsupportedOrder(usize),

    #[error("segment length must be an integer number of steps for symbolic work")]
    NonStepSegment,

    #[error("purge pulse certification failed: {0}")]
    PurgeCertification(String),

    #[error("missing couplings: {0}")]
    MissingCouplings(String),

    #[error("wrong connectivity: {0}")]
    WrongConnectivity(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("no decoupling colouring exists for the requested pattern")]
    NoColouring,

    #[error("pulse does not commute with the system Hamiltonian: {0}")]
    PulseCommutation(String),

    #[error("incompatible parameter binding: {0}")]
    Binding(String),

    #[error("dense dimension cap exceeded: {qubits} qubits > {cap}")]
    DenseCap { qubits: usize, cap: usize },

    #[error("eigenvalue at the logarithm branch cut")]
    BranchCut,

    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("residuals at the float noise floor")]
    NoiseFloor,

    #[error("operator acts outside the register: {0}")]
    OutsideRegister(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, StrobeError>;
