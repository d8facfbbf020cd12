//! framegrind: a real-time asynchronous multi-stage frame-processing
//! framework with a desk-scale smile-detection reference pipeline.
//!
//! The crate is organized around five subsystems:
//! - [`pipeline`]: bounded frame queue, per-stage status flags,
//!   most-recent-first polling with prerequisite chaining, latest-results
//!   board, real and simulated clocks.
//! - [`geometry`]: landmark sets, similarity-transform fitting, template
//!   symmetrization, flip augmentation and image warping.
//! - [`stages`]: concrete stages (synthetic face source, heuristic face
//!   detector, alignment, stub smile classifier, overlay sink, external
//!   plugin adapter).
//! - [`costmodel`]: analytic CNN parameter/FLO counting under width and
//!   resolution multipliers.
//! - [`metrics`]: classification metrics (ACC, ROC, AUC) and pipeline
//!   throughput/latency reports.

pub mod cmd;
pub mod costmodel;
pub mod geometry;
pub mod manifest;
pub mod metrics;
pub mod pipeline;
pub mod stages;
