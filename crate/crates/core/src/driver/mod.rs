//! Simulation orchestration: configuration, the time loop, run records,
//! boundary traces, checkpoints and resolution studies.

pub mod checkpoint;
pub mod config;
pub mod linstab;
pub mod record;
pub mod simulation;
pub mod study;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use config::{ConfigError, SimulationConfig};
pub use record::{emit_traces, RunRecord, RunRow, TraceRow, Traces};
pub use simulation::{run, DriverError, Evaluation, RunOutcome, RunStatus, RunSummary, Simulation};
pub use study::{convergence_rate, convergence_study, ConvergenceTable, Refinement, StudyError};
