//! File formats, problem generators, the reduction pipeline and benchmarks on
//! top of `symred-core`.

pub mod bench;
pub mod formats;
pub mod generators;
pub mod job;
pub mod pipeline;
pub mod report;
