//! Parallel sweeps, the JSON instance format and the `triperim` command-line
//! front end for [`triperim_core`].

pub mod cli;
pub mod parallel;
pub mod report;
pub mod schema;

pub use triperim_core;
