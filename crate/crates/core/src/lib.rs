pub mod acqopt;
pub mod benchmarks;
pub mod chimera;
pub mod domain;
pub mod error;
pub mod harness;
pub mod planner;
pub mod surrogate;
