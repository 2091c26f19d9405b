//! Batch front end for `fastkde`: sample and bandwidth ingestion, density
//! artifacts, and the `estimate` / `compare` / `bench` subcommands.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod bandwidth;
pub mod datasets;
pub mod error;
pub mod io;

pub use app::{compare, run, Cli, CompareReport, AGREEMENT_GATE};
pub use bandwidth::{rule_of_thumb_bandwidth, sample_covariance};
pub use datasets::Dataset;
pub use error::{BandwidthError, ExitClass, Failure, LoadError};
pub use io::{load_samples, parse_bandwidth, parse_samples, Delimiter};
