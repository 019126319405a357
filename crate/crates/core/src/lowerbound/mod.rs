//! Numerical lab for the minimax lower bound: the plateau kernel prior,
//! the water-filling design and the van Trees type Bayes risk bound.

pub mod bound;
pub mod design;
pub mod kernel;
pub mod ladder;
pub mod prior;
pub mod waterfill;

pub use bound::{
    bayes_lower_bound, bound_components, distortion_interval, van_trees_bound, BoundComponents,
    LowerBound,
};
pub use design::{
    budget_for, build_design, conditions_check, design_constants, f_profile, f_profile_derivative,
    Conditions, NRule, PriorDesign,
};
pub use kernel::{bump, bump_cdf, e_bar, e_basis, kernel_i, KernelProfile};
pub use ladder::{ladder, LadderConfig, LadderRow};
pub use prior::{prior_draw, PriorDraw, PriorSampling};
pub use waterfill::{
    budget_used, minimal_budget, tau_bar, waterfill, waterfill_numeric, waterfill_value,
};
