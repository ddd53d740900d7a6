use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial parse error: {0}")]
    Parse(String),
    #[error("polynomial must be monic (leading coefficient 1)")]
    NotMonic,
    #[error("polynomial degree must be at least 2")]
    DegreeTooSmall,
    #[error("polynomial is reducible: factor {0}")]
    Reducible(String),
    #[error("irreducibility unknown at prime budget {0} (pass the override flag to proceed)")]
    IrreducibilityUnknown(u64),
    #[error("polynomial is not even: f(-X) != f(X)")]
    NotEven,
    #[error("factoring budget exceeded at n={n}: residual {residual}")]
    FactoringBudget { n: u64, residual: String },
    #[error("root certification failed: max coefficient error {err:.3e} exceeds tolerance {tol:.3e} (condition estimate {cond:.3e})")]
    RootCertification { err: f64, tol: f64, cond: f64 },
    #[error("root pairing ambiguous: |r + r'| = {gap:.3e} falls inside the guard band [{tol:.3e}, {guard:.3e})")]
    PairingAmbiguous { gap: f64, tol: f64, guard: f64 },
    #[error("admissibility filter admits unbounded profiles; no finiteness cap derivable")]
    UnboundedFilter,
    #[error("negation pairing yields no admissible u <= degree")]
    NoPairingU,
    #[error("no violation-free cutoff in grid [{0}]")]
    NoCutoff(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 3 = input rejected, 4 = factoring
    /// budget exceeded, 1 = everything else. Verification failures use 2
    /// but are not errors (violations are data).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::NotMonic
            | Error::DegreeTooSmall
            | Error::Reducible(_)
            | Error::IrreducibilityUnknown(_)
            | Error::NotEven
            | Error::NoPairingU
            | Error::UnboundedFilter
            | Error::Config(_) => 3,
            Error::NoCutoff(_) => 2,
            Error::FactoringBudget { .. } => 4,
            _ => 1,
        }
    }
}
