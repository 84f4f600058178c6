//! command-line front end: config ingestion, report assembly, and the
//! randomized identity suite shared between `verify` and the tests.

pub mod config;
pub mod report;
pub mod suite;
