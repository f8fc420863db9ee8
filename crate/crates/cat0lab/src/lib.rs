//! IO, file formats and command layer for the CAT(0) geodesic laboratory.
//!
//! The algorithmic core lives in `cat0lab-core`; this crate adds the JSON
//! and CSV interchange formats, named space descriptors, run configuration
//! with reproducibility digests, and the five CLI commands (`audit`,
//! `iterate`, `fixedpoint`, `bounds`, `suggest`).

pub mod commands;
pub mod config;
pub mod dto;
pub mod output;
pub mod spaces;
