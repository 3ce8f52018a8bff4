//! Configuration-driven experiments on top of `lowdeg-core`: instance
//! generation, learner runs, sweeps and reports.

pub mod cli;
pub mod config;
pub mod error;
pub mod instance;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, InstanceSpec, Task};
pub use error::{HarnessError, Result};
pub use instance::{Family, Instance, InstanceGenerator};
pub use run::{run, sweep, ExperimentRecord};
