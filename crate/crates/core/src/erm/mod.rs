//! Losses, geometry and exact ERM oracles.

mod dataset;
mod extension;
mod geometry;
mod loss;

pub use dataset::{Dataset, DomainTag};
pub use extension::{
    lipschitz_extension, minimize_over_ball, AbsoluteLoss, ConvexLoss, LinearLoss, LipschitzExtension, Minimum,
    SolverOptions,
};
pub use geometry::{
    distance, dot, lower_bound_curve, lp_constants, norm2, project, pure_lower_bound_curve, Ball, BallNorm, Geometry,
    DEFAULT_C0,
};
pub use loss::{
    empirical_loss, excess_loss, extended_linear_loss, extended_linear_loss_search, l1_loss, l1_minimizer,
    ExcessLossReport, LossFamily, LossKind, EXCESS_TOLERANCE,
};
