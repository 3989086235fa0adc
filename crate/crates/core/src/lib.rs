//! Walk-on-spheres Monte Carlo for the fractional Poisson problem
//! `(-Δ)^{α/2} u = f` in `Ω`, `u = g` on `Ωᶜ`.

pub mod engine;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod oracle;
pub mod sampling;
pub mod specfun;
pub mod stats;

pub use engine::{
    error_metric, estimate_field, estimate_point, run_path, step_bound, Estimate, Field,
    PathRealization, ProblemSpec, StepBound, WalkConfig, Walker,
};
pub use error::{Error, Result};
pub use geometry::{dist_boundary, AnnulusDomain, BallDomain, BoxDomain, Domain, PolygonDomain};
pub use kernels::{make_constants, BallGeom, FracOrder, KernelConstants};
pub use sampling::RngStream;
pub use oracle::{ball_solution_quadrature, exact_registry, CaseId, ExactCase};
