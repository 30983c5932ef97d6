use thiserror::Error;

/// Errors raised by the model, classification and profile routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state ({psi0}, {psi1}) is outside the state space psi0 > |psi1|")]
    StateOutsideDomain { psi0: f64, psi1: f64 },

    #[error("dissipation parameter eps = {0} is outside the admissible range")]
    EpsilonOutOfRange(f64),

    #[error(
        "dissipation parameter eps = {0} is not below eps_hat; the upper separatrix is undefined"
    )]
    EpsilonAboveHat(f64),

    #[error("shock parameter q_tilde = {0} is outside (3/4, 1)")]
    QOutOfRange(f64),

    #[error("v_plus^2 = {0} is outside (1/8, 1/2)")]
    ZOutOfRange(f64),

    #[error("(eps, q_tilde) = ({eps}, {q_tilde}) is outside the parameter domain (0,1] x (3/4,1)")]
    ParamsOutOfOmega { eps: f64, q_tilde: f64 },

    #[error("q_tilde = {0} is too close to 3/4: rest points coalesce")]
    DegenerateShock(f64),

    #[error("parameter {name} = {value} must be strictly positive")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("dissipation matrix is singular (det = {det:e})")]
    SingularBsharp { det: f64 },

    #[error("rest point is not a hyperbolic saddle (eigenvalues {0:?})")]
    NotASaddle([f64; 2]),

    #[error("cubic root polishing stalled at eps = {eps} (residual {residual:e})")]
    RootFindingFailure { eps: f64, residual: f64 },

    #[error("classification routes disagree at (eps, q_tilde) = ({eps}, {q_tilde})")]
    InternalInconsistency { eps: f64, q_tilde: f64 },

    #[error("invalid options: {0}")]
    InvalidOptions(&'static str),

    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
