//! The time loop: solve both boundary systems on the current interface, form
//! the normal velocity, record diagnostics, advance the interface.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::checkpoint::{Checkpoint, CheckpointError, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
use super::config::{ConfigError, SimulationConfig};
use super::record::{emit_traces, RecordError, RunRecord, RunRow, Traces};
use crate::dynamics::{self, DynamicsError, StepperHistory};
use crate::geometry::{
    area, curvature, min_distance, min_self_distance, reconstruct, shape_diagnostics,
    FixedBoundary, GeometryError, InterfaceState, PlanarCurveSamples, Snapshot,
};
use crate::solver::{normal_velocity, BimSolver, BoundaryFields, SolverError};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("step {step}: {source}")]
    Solver { step: u64, source: SolverError },
    #[error("step {step}: {source}")]
    Dynamics { step: u64, source: DynamicsError },
    #[error("step {step}: {source}")]
    Geometry { step: u64, source: GeometryError },
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl DriverError {
    /// Failures of the numerical method itself, as opposed to bad input or
    /// file trouble.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Self::Solver { .. } | Self::Dynamics { .. } | Self::Geometry { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// Stopped because parts of the boundary came too close.
    NearTouch,
    SolverFailure,
    /// Stopped at a requested step before `t_final`.
    Paused,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Completed | Self::Paused => 0,
            Self::NearTouch => 2,
            Self::SolverFailure => 3,
        }
    }
}

/// Machine-readable end-of-run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub steps: u64,
    pub final_time: f64,
    pub wall_time_s: f64,
    pub peak_gmres_nutrient: usize,
    pub peak_gmres_pressure: usize,
    pub message: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub record: RunRecord,
    pub summary: RunSummary,
}

/// Everything computed on one interface position.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub gamma: PlanarCurveSamples,
    /// Absent only when the solve failed on a near-touching interface.
    pub fields: Option<BoundaryFields>,
    pub velocity: Vec<f64>,
    pub row: RunRow,
    pub near_touch: bool,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimulationConfig,
    solver: BimSolver,
    state: InterfaceState,
    history: Option<StepperHistory>,
    steps: u64,
    record: RunRecord,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DriverError + '_ {
    move |source| DriverError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Simulation {
    pub fn new(config: SimulationConfig) -> Result<Self, DriverError> {
        config.validate()?;
        let n = config.numerics.n;
        let state = InterfaceState::from_radial(config.initial.shape(), n)
            .map_err(|source| DriverError::Geometry { step: 0, source })?;
        Self::with_state(config, state, None, 0, RunRecord::default())
    }

    fn with_state(
        config: SimulationConfig,
        state: InterfaceState,
        history: Option<StepperHistory>,
        steps: u64,
        record: RunRecord,
    ) -> Result<Self, DriverError> {
        let n = config.numerics.n;
        // The necrotic boundary carries as many nodes as the interface.
        let gamma0 = FixedBoundary::new(config.necrotic.shape(), n).map_err(|source| {
            DriverError::Geometry {
                step: steps,
                source,
            }
        })?;
        let mut solver = BimSolver::new(gamma0, config.gmres());
        solver.prepare(n);
        Ok(Self {
            config,
            solver,
            state,
            history,
            steps,
            record,
        })
    }

    /// Continue from a checkpoint. Only `t_final` and the output settings may
    /// differ from the configuration the checkpoint was written with.
    pub fn resume(config: SimulationConfig, ck: Checkpoint) -> Result<Self, DriverError> {
        config.validate()?;
        ck.validate()?;
        let mut a = config.clone();
        let mut b = ck.config.clone();
        for c in [&mut a, &mut b] {
            c.numerics.t_final = 0.0;
            c.output = Default::default();
        }
        if a != b {
            let what = if a.numerics.n != b.numerics.n {
                "marker count N differs"
            } else {
                "settings differ"
            };
            return Err(CheckpointError::Incompatible(what.into()).into());
        }
        Self::with_state(config, ck.state, ck.history, ck.steps, ck.record)
    }

    pub fn from_checkpoint(ck: Checkpoint) -> Result<Self, DriverError> {
        let config = ck.config.clone();
        Self::resume(config, ck)
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn state(&self) -> &InterfaceState {
        &self.state
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn record(&self) -> &RunRecord {
        &self.record
    }

    pub fn gamma0(&self) -> &FixedBoundary {
        &self.solver.gamma0
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            steps: self.steps,
            state: self.state.clone(),
            history: self.history.clone(),
            record: self.record.clone(),
        }
    }

    /// Solve the fields on the current interface and collect diagnostics.
    pub fn evaluate(&self) -> Result<Evaluation, DriverError> {
        let step = self.steps;
        let geo = |source| DriverError::Geometry { step, source };
        let gamma = reconstruct(&self.state).map_err(geo)?;
        let g0 = &self.solver.gamma0.samples;
        let halt = &self.config.halt;
        let min_gap = min_self_distance(&gamma, halt.min_index_gap).min(min_distance(&gamma, g0));
        let near_touch = min_gap < halt.gap_factor * gamma.mean_spacing();
        let params = &self.config.params;
        let fields = match self
            .solver
            .solve_fields(&gamma, &curvature(&self.state), params)
        {
            Ok(f) => Some(f),
            Err(_) if near_touch => None,
            Err(source) => return Err(DriverError::Solver { step, source }),
        };
        let velocity = fields
            .as_ref()
            .map(|f| normal_velocity(f, &gamma, params))
            .unwrap_or_default();
        let a = area(&gamma);
        let delta_over_r = shape_diagnostics(&gamma, self.config.diagnostics.mode)
            .map(|d| d.delta_over_r)
            .unwrap_or(f64::NAN);
        let row = RunRow {
            step,
            time: self.state.time,
            area: a,
            r_eff: (a / std::f64::consts::PI).sqrt(),
            delta_over_r,
            gmres_nutrient: fields.as_ref().map_or(0, |f| f.gmres_iters_nutrient),
            gmres_pressure: fields.as_ref().map_or(0, |f| f.gmres_iters_pressure),
            min_gap,
            max_speed: if fields.is_some() {
                velocity.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
            } else {
                f64::NAN
            },
        };
        Ok(Evaluation {
            gamma,
            fields,
            velocity,
            row,
            near_touch,
        })
    }

    /// Take one step with the velocity of `eval`.
    pub fn advance(&mut self, eval: &Evaluation) -> Result<(), DriverError> {
        let step = self.steps;
        let dt = self.config.numerics.dt;
        let (mut next, hist) = dynamics::advance(
            &self.state,
            &eval.velocity,
            self.history.as_ref(),
            dt,
            &self.config.step_config(),
        )
        .map_err(|source| DriverError::Dynamics { step, source })?;
        self.steps += 1;
        // Time from the step count so runs with different dt share sample times.
        next.time = self.steps as f64 * dt;
        self.state = next;
        self.history = Some(hist);
        Ok(())
    }

    /// Boundary traces on the current interface.
    pub fn traces(&self) -> Result<Traces, DriverError> {
        let eval = self.evaluate()?;
        let fields = eval.fields.as_ref().ok_or(DriverError::Solver {
            step: self.steps,
            source: SolverError::NotConverged {
                system: "boundary",
                iterations: 0,
                residual: f64::NAN,
            },
        })?;
        Ok(emit_traces(
            self.state.time,
            &self.solver.gamma0,
            &eval.gamma,
            fields,
            &self.config.params,
        )?)
    }

    fn due(&self, every: u64) -> bool {
        every > 0 && self.steps % every == 0
    }

    fn out_dir(&self) -> Option<&Path> {
        self.config.output.dir.as_deref()
    }

    fn observe(&mut self, eval: &Evaluation, last: bool) -> Result<(), DriverError> {
        let out = self.config.output.clone();
        if self.due(out.record_every) || last || eval.near_touch {
            self.record.push(eval.row);
        }
        let Some(dir) = self.out_dir() else {
            return Ok(());
        };
        let dir = dir.to_path_buf();
        if self.due(out.snapshot_every) || (out.snapshot_every > 0 && last) || eval.near_touch {
            self.write_snapshot(&dir, &eval.gamma)?;
        }
        if self.due(out.trace_every) || (out.trace_every > 0 && last) {
            if let Some(f) = &eval.fields {
                let tr = emit_traces(
                    self.state.time,
                    &self.solver.gamma0,
                    &eval.gamma,
                    f,
                    &self.config.params,
                )?;
                let sub = dir.join("traces");
                std::fs::create_dir_all(&sub).map_err(io_err(&sub))?;
                tr.write(&sub.join(format!("traces_{:07}.csv", self.steps)))?;
            }
        }
        Ok(())
    }

    fn write_snapshot(&self, dir: &Path, gamma: &PlanarCurveSamples) -> Result<(), DriverError> {
        let sub = dir.join("snapshots");
        std::fs::create_dir_all(&sub).map_err(io_err(&sub))?;
        let snap = Snapshot {
            time: self.state.time,
            s_alpha: self.state.s_alpha,
            x: gamma.x.clone(),
            y: gamma.y.clone(),
        };
        snap.write(&sub.join(format!("snapshot_{:07}.txt", self.steps)))
            .map_err(|source| DriverError::Geometry {
                step: self.steps,
                source,
            })
    }

    fn write_checkpoint(&self) -> Result<(), DriverError> {
        if let Some(dir) = self.out_dir() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
            self.checkpoint().write(&dir.join("checkpoint.json"))?;
        }
        Ok(())
    }

    /// March until step `stop` (exclusive of its evaluation) or the end of the
    /// run. The final state at `t_final` is evaluated and recorded.
    pub fn run_until(&mut self, stop: u64) -> Result<RunStatus, DriverError> {
        let total = self.config.total_steps();
        let stop = stop.min(total);
        loop {
            if self.steps > 0 && self.steps < total && self.due(self.config.output.checkpoint_every)
            {
                self.write_checkpoint()?;
            }
            if self.steps >= stop && self.steps < total {
                return Ok(RunStatus::Paused);
            }
            let last = self.steps >= total;
            let eval = self.evaluate()?;
            self.observe(&eval, last)?;
            if eval.near_touch {
                log::warn!(
                    "near touch at step {} (t = {}): gap {:.3e}",
                    self.steps,
                    self.state.time,
                    eval.row.min_gap
                );
                return Ok(RunStatus::NearTouch);
            }
            if last {
                return Ok(RunStatus::Completed);
            }
            if self.steps % 1000 == 0 {
                log::info!(
                    "step {} t = {:.5} area = {:.10}",
                    self.steps,
                    self.state.time,
                    eval.row.area
                );
            }
            self.advance(&eval)?;
        }
    }

    /// Run to `t_final`. Numerical failures end the run with status
    /// `SolverFailure`; the record so far and the summary are still written.
    pub fn run(&mut self) -> Result<RunOutcome, DriverError> {
        let start = Instant::now();
        let (status, message) = match self.run_until(u64::MAX) {
            Ok(s) => (s, None),
            Err(e) if e.is_numerical() => {
                log::error!("{e}");
                (RunStatus::SolverFailure, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        };
        let (peak_n, peak_p) = self.record.peak_iterations();
        let summary = RunSummary {
            status,
            steps: self.steps,
            final_time: self.state.time,
            wall_time_s: start.elapsed().as_secs_f64(),
            peak_gmres_nutrient: peak_n,
            peak_gmres_pressure: peak_p,
            message,
        };
        if let Some(dir) = self.out_dir() {
            let dir = dir.to_path_buf();
            std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let cfg_path = dir.join("config.toml");
            std::fs::write(&cfg_path, self.config.to_toml()).map_err(io_err(&cfg_path))?;
            self.record.write(&dir.join("record.csv"))?;
            self.write_checkpoint()?;
            if status == RunStatus::SolverFailure {
                if let Ok(gamma) = reconstruct(&self.state) {
                    self.write_snapshot(&dir, &gamma)?;
                }
            }
            let path = dir.join("summary.json");
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            std::fs::write(&path, text).map_err(io_err(&path))?;
        }
        Ok(RunOutcome {
            status,
            record: self.record.clone(),
            summary,
        })
    }
}

/// Build and run a simulation.
pub fn run(config: SimulationConfig) -> Result<RunOutcome, DriverError> {
    Simulation::new(config)?.run()
}
