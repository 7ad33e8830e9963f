use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("site {site} out of range 1..={num_sites}")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("orthogonality center at {found:?}, expected {expected}")]
    CenterMisplaced { expected: usize, found: Option<usize> },

    #[error("Krylov exponential did not converge (residual estimate {residual:.3e})")]
    Convergence { residual: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("gate error: {0}")]
    Gate(String),

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("state of {num_qubits} qubits exceeds the dense limit of {max}")]
    Oversize { num_qubits: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
