//! Intrinsic subhyperbolic geometry of planar domains.
//!
//! The crate builds Whitney decompositions of a planar domain, computes the
//! subhyperbolic metrics `d_alpha` and `d~_alpha` through chains of Whitney
//! cubes, constructs the alpha-boundary (boundary elements with agglutination
//! and inaccessibility detection), evaluates the Whitney extension operator
//! with a smooth partition of unity, and implements three equivalent
//! trace-norm characterizations for Sobolev boundary data: a variational
//! packing functional, a collar `L_p` criterion, and a fractional sharp
//! maximal function.
//!
//! Everything is 2-D and measured in the uniform (sup) norm, so "cubes" are
//! axis-aligned squares. The main entry points:
//!
//! * [`geometry::Domain`] — polygon-with-holes-and-slits, box-union or
//!   occupancy-grid domains, plus the built-in [`geometry::gallery`].
//! * [`whitney::WhitneyDecomposition`] — dyadic Whitney cubes with adjacency
//!   and nearest-boundary anchors.
//! * [`metrics::MetricSpace`] — chain-based estimates of the subhyperbolic
//!   metrics with certified lower bounds.
//! * [`alpha_boundary::AlphaBoundary`] — boundary elements, agglutinated and
//!   inaccessible points.
//! * [`extension::ExtensionField`] — the partition-of-unity extension of
//!   boundary data, with analytic gradients and trace evaluation.
//! * [`criteria`] — trace-norm functionals and cross-checks.
//! * [`verify`] — a numerical harness that spot-checks the structural
//!   inequalities the construction relies on.
//!
//! Runnable demonstrations live under `examples/`; the `subhyp` binary wraps
//! the same operations as subcommands.

pub mod alpha_boundary;
pub mod cli;
pub mod criteria;
pub mod expr;
pub mod extension;
pub mod geometry;
pub mod metrics;
pub mod verify;
pub mod whitney;

pub use geometry::{Cube, Domain, FaceTag, Point, Rect, Segment, Side};
pub use whitney::WhitneyDecomposition;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point ({0}, {1}) is outside the domain")]
    OutsideDomain(f64, f64),

    #[error("domain has {components} connected components at check resolution {resolution}")]
    Disconnected { components: usize, resolution: usize },

    #[error("domain is empty at check resolution {0}")]
    EmptyDomain(usize),

    #[error("empty decomposition: no cube satisfies the Whitney condition up to depth {0}")]
    EmptyDecomposition(u32),

    #[error("invalid cube id {0}")]
    InvalidCubeId(usize),

    #[error("point ({0}, {1}) lies in the coverage deficit region; refine the decomposition")]
    DeficitRegion(f64, f64),

    #[error("subhyperbolic length diverges (partial sum exceeded guard {0:.1e})")]
    DivergentLength(f64),

    #[error("segment from ({0}, {1}) to ({2}, {3}) leaves the domain")]
    SegmentLeavesDomain(f64, f64, f64, f64),

    #[error("decomposition depth {depth} too shallow, need at least {required}")]
    InsufficientDepth { depth: u32, required: u32 },

    #[error("no boundary rule matches element {id} (anchor ({x}, {y}), face {face})")]
    RuleGap { id: usize, x: f64, y: f64, face: String },

    #[error("trace ladder did not converge (residual {residual:.3e} over {rungs} rungs)")]
    TraceNotConverged { residual: f64, rungs: usize },

    #[error("approach segment left all clusters of the sample at ({0}, {1})")]
    ApproachLost(f64, f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 input error, 3 resolution error,
    /// 4 data-rule error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::OutsideDomain(..)
            | Error::Disconnected { .. }
            | Error::EmptyDomain(_)
            | Error::InvalidCubeId(_)
            | Error::SegmentLeavesDomain(..) => 2,
            Error::EmptyDecomposition(_)
            | Error::DeficitRegion(..)
            | Error::InsufficientDepth { .. }
            | Error::DivergentLength(_)
            | Error::TraceNotConverged { .. } => 3,
            Error::RuleGap { .. } => 4,
            Error::ApproachLost(..) => 1,
        }
    }
}
