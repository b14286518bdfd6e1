//! The reduction from bounded 3-dimensional matching to scheduling with
//! processor-dependent works, and the tools that map schedules back to
//! matchings.
//!
//! `f` sends a 3DM instance to `3q` machines and `5q` jobs, all living on
//! `[0, 3]`. `g` first repairs a schedule so every element job sits on the
//! machine of a triple containing it, then keeps the fully assembled
//! triples.

mod reduce;
mod repair;
mod tdm;

pub use reduce::{reduce_f, ReductionArtifacts, DUMMY_WORK, HEAVY_WORK, HORIZON, LIGHT_WORK};
pub use repair::{
    assembled_triples, beta, element_counts, extract_matching_g, load_energy, repair_schedule,
    repair_schedule_traced, verify_gap_inequality, GapReport, Repair, RepairStep, GAP_TOL,
};
pub use tdm::{maximum_matching, parse_tdm, planted_instance, ThreeDMInstance, MAX_OCCURRENCES};
