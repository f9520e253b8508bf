use thiserror::Error;

/// Error type shared by all subsystems.
#[derive(Debug, Clone, Error)]
pub enum E1Error {
    /// The jet is at (or numerically indistinguishable from) a singular
    /// point of the surface, D < d_min.
    #[error("singular point: D = {d:.3e} below threshold {d_min:.3e}")]
    SingularPoint { d: f64, d_min: f64 },

    /// A radius outside the domain of a closed-form solution family.
    #[error("domain exceeded: r = {r} not in (0, {limit}) for {family}")]
    DomainExceeded {
        r: f64,
        limit: f64,
        family: String,
    },

    /// det A (or the s factor) too close to zero for the closed-form
    /// inverse to be trusted.
    #[error("near-characteristic state: {detail}")]
    NearCharacteristic { detail: String },

    /// The quadrature density exceeded the overflow guard.
    #[error("quadrature unstable: density {value:.3e} exceeds guard {guard:.3e}")]
    QuadratureUnstable { value: f64, guard: f64 },

    /// A classification where two families both fit within tolerance.
    #[error("ambiguous fit: {candidates:?} all within tolerance")]
    AmbiguousFit { candidates: Vec<String> },

    /// Local error estimate of the ODE integrator exceeded its guard.
    #[error("step too large: local error {err:.3e} at r = {r}")]
    StepTooLarge { err: f64, r: f64 },

    /// Initial data for the Cauchy march failed the spectral tail test.
    #[error("nonsmooth initial data: spectral tail fraction {tail:.3e}")]
    NonsmoothInitialData { tail: f64 },

    /// The CFL constraint cannot be met with the given parameters.
    #[error("CFL violation: {detail}")]
    CflViolation { detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, E1Error>;
