//! Exact baselines: the optimal preemptive schedule, exhaustive
//! non-preemptive optima on small instances, and the generalized Bell number.

mod bell;
mod brute;
mod yds;

pub use bell::generalized_bell;
pub use brute::{
    brute_force_heterogeneous, brute_force_nonpreemptive, common_window_optimum, DEFAULT_STATE_CAP,
};
pub use yds::{yds_preemptive, SpeedPiece, SpeedProfile};
