//! Seed recognition: blind patterns, the choice of a decorated observable
//! whose mean separates two seeds, Monte Carlo moments and total-variation
//! lower bounds.

mod mc;
mod plan;
mod report;

pub use mc::{
    empirical_tv, martingale_track, mc_moments, mc_samples, tv_bound_with_ci, tv_lower_bound,
    McEstimate, TvBoundReport,
};
pub use plan::{
    distinguishing_decoration, distinguishing_decoration_unequal,
    distinguishing_decoration_with_cap, f_infinity, is_blind, minimal_nonblind, BlindReport,
    DeltaEntry, DistinguishPlan, DEFAULT_DECORATION_CAP,
};
pub use report::{distinguish, DistinguishReport, NEstimate, REPORT_SCHEMA};
