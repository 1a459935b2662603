use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("result would overflow: |Re z| = {re_abs} exceeds {limit}")]
    Overflow { re_abs: f64, limit: f64 },

    #[error("argument on the branch cut (non-positive real axis): z = {re} + {im}i")]
    BranchCut { re: f64, im: f64 },

    #[error("transverse constant on the wrong branch (Re kappa1 = {re_kappa1}); field would not decay")]
    BranchViolation { re_kappa1: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("seed {seed_re} + {seed_im}i is outside the basin of attraction: {detail}")]
    SeedOutsideBasin {
        seed_re: f64,
        seed_im: f64,
        detail: String,
    },

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("eps2 = -eps1 (flat-interface plasmon resonance) is a singular configuration")]
    Resonance,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("wavelength {lambda} um outside table range [{min}, {max}] um")]
    OutOfRange { lambda: f64, min: f64, max: f64 },

    #[error("material table is not strictly increasing in wavelength at row {row}")]
    NonMonotone { row: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("quadrature did not reach tolerance (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("objective is flat over the bracket (variation {variation:e})")]
    FlatObjective { variation: f64 },

    #[error("residue contour radii disagree: {first:e} vs {second:e}")]
    ContourMismatch { first: f64, second: f64 },

    #[error(
        "plasmon too slow for the fiber: Re k_par = {plasmon_k} >= sqrt(eps_core) = {max_k} \
         (matching needs a wire radius above roughly k0R = {bounding_k0r})"
    )]
    Unmatchable {
        plasmon_k: f64,
        max_k: f64,
        bounding_k0r: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
