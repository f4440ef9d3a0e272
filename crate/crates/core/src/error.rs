use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("hermitian symmetry violated at frequency {freq}: V(-m) != conj V(m)")]
    HermitianSymmetry { freq: i64 },

    #[error("potential bandwidth {bandwidth} exceeds buffer width {buffer}")]
    Truncation { bandwidth: usize, buffer: usize },

    #[error("requested bandwidth {bandwidth} aliases on a grid of {grid} points (limit {limit})")]
    Aliasing {
        bandwidth: usize,
        grid: usize,
        limit: usize,
    },

    #[error("buffer mass {leak:.3e} exceeds leak_max {leak_max:.3e} at t = {t}")]
    LeakageExceeded { leak: f64, leak_max: f64, t: f64 },

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("site {site} outside admissible range |n| <= {limit}")]
    SiteOutOfRange { site: i64, limit: i64 },

    #[error("time {t} outside crossing interval I_{l} = [{lo}, {hi})")]
    OutsideCrossingInterval { t: f64, l: i64, lo: f64, hi: f64 },

    #[error("reduced resolvent near-singular at site {site}: |gap| = {gap:.3e}")]
    NearSingular { site: i64, gap: f64 },

    #[error("self-crossing excluded: 2n + l = 0 for n = {n}, l = {l}")]
    SelfCrossing { n: i64, l: i64 },

    #[error("quadrature did not converge after {panels} panels (change {change:.3e})")]
    Quadrature { panels: usize, change: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("dense oracle limited to half-width <= {max}, got {got}")]
    DenseTooLarge { got: usize, max: usize },
}
