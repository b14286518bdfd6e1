//! Minimum-energy scheduling with speed scaling: exact oracles, the
//! landmark-grid LP relaxation with its rounding, the multiprocessor
//! approximation, and the hardness reduction.

pub mod discretize;
pub mod error;
pub mod hardness;
pub mod instances;
pub mod lp;
pub mod lp1;
pub mod matching;
pub mod multiproc;
pub mod oracle;
pub mod rounding;
pub mod time;

pub use error::{Error, Result};
