//! Library surface of the experiment runner, kept separate from the
//! binary so the integration tests can drive experiments in-process.

pub mod branches;
pub mod config;
pub mod experiments;
pub mod report;
pub mod svg;
