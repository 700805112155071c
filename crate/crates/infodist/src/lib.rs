//! File formats, experiment runners and the command-line front end for
//! [`infodist_core`].

pub mod cli;
pub mod experiments;
pub mod io;
pub mod table;

pub use io::{parse_distribution, read_distribution, to_json, DistributionFile};
