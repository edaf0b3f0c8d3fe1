//! Resolution studies: run one configuration at several time steps or marker
//! counts and compare areas against the finest run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::SimulationConfig;
use super::simulation::{DriverError, RunOutcome, Simulation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// Time steps, coarsest first.
    Dt(Vec<f64>),
    /// Marker counts, coarsest first.
    N(Vec<usize>),
}

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("need at least two levels")]
    TooFew,
    #[error("levels must be ordered coarsest first")]
    Order,
    #[error("record interval {interval} is not a whole number of steps at dt = {dt}")]
    Cadence { interval: f64, dt: f64 },
    #[error("runs do not share sample times")]
    Mismatch,
    #[error("level {level}: {source}")]
    Run { level: usize, source: DriverError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    /// The refinement values, coarsest first; the last one is the reference.
    pub levels: Vec<f64>,
    /// Sample times shared by all runs.
    pub times: Vec<f64>,
    /// `errors[i][t] = |A_i(t) - A_ref(t)|` for every non-reference level.
    pub errors: Vec<Vec<f64>>,
    /// `rates[i][t] = ln(e_i / e_{i+1}) / ln 2` between consecutive levels.
    pub rates: Vec<Vec<f64>>,
}

/// Observed order between errors at two consecutive refinement levels.
pub fn convergence_rate(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / std::f64::consts::LN_2
}

/// Member configurations of a study. For a time-step study every member keeps
/// the base record interval in time, so the step cadence is rescaled.
pub fn study_configs(
    base: &SimulationConfig,
    refine: &Refinement,
) -> Result<Vec<SimulationConfig>, StudyError> {
    let mut out = Vec::new();
    match refine {
        Refinement::Dt(dts) => {
            if dts.len() < 2 {
                return Err(StudyError::TooFew);
            }
            if dts.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(StudyError::Order);
            }
            let interval = base.numerics.dt * base.output.record_every as f64;
            for &dt in dts {
                let every = (interval / dt).round();
                if every < 1.0 || (every * dt - interval).abs() > 1e-9 * interval {
                    return Err(StudyError::Cadence { interval, dt });
                }
                let mut c = base.clone();
                c.numerics.dt = dt;
                c.output.record_every = every as u64;
                out.push(c);
            }
        }
        Refinement::N(ns) => {
            if ns.len() < 2 {
                return Err(StudyError::TooFew);
            }
            if ns.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(StudyError::Order);
            }
            for &n in ns {
                let mut c = base.clone();
                c.numerics.n = n;
                out.push(c);
            }
        }
    }
    for c in &mut out {
        c.output.dir = None;
    }
    Ok(out)
}

/// Run every member (concurrently; they share nothing) and tabulate area
/// errors against the last one. Runs that stop early shorten the table to the
/// common window.
pub fn convergence_study(
    base: &SimulationConfig,
    refine: &Refinement,
) -> Result<ConvergenceTable, StudyError> {
    let configs = study_configs(base, refine)?;
    let results: Vec<Result<RunOutcome, DriverError>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| s.spawn(move || Simulation::new(c.clone()).and_then(|mut sim| sim.run())))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study member panicked"))
            .collect()
    });
    let mut outcomes = Vec::new();
    for (level, r) in results.into_iter().enumerate() {
        outcomes.push(r.map_err(|source| StudyError::Run { level, source })?);
    }
    let levels = match refine {
        Refinement::Dt(v) => v.clone(),
        Refinement::N(v) => v.iter().map(|&n| n as f64).collect(),
    };
    tabulate(levels, &outcomes)
}

/// Table from finished runs; the last outcome is the reference.
pub fn tabulate(levels: Vec<f64>, outcomes: &[RunOutcome]) -> Result<ConvergenceTable, StudyError> {
    let len = outcomes
        .iter()
        .map(|o| o.record.rows.len())
        .min()
        .unwrap_or(0);
    let reference = &outcomes.last().ok_or(StudyError::TooFew)?.record.rows;
    let times: Vec<f64> = reference[..len].iter().map(|r| r.time).collect();
    for o in outcomes {
        for (row, t) in o.record.rows.iter().zip(&times) {
            if (row.time - t).abs() > 1e-9 * t.abs().max(1.0) {
                return Err(StudyError::Mismatch);
            }
        }
    }
    let errors: Vec<Vec<f64>> = outcomes[..outcomes.len() - 1]
        .iter()
        .map(|o| {
            (0..len)
                .map(|i| (o.record.rows[i].area - reference[i].area).abs())
                .collect()
        })
        .collect();
    let rates = errors
        .windows(2)
        .map(|w| {
            (0..len)
                .map(|i| convergence_rate(w[0][i], w[1][i]))
                .collect()
        })
        .collect();
    Ok(ConvergenceTable {
        levels,
        times,
        errors,
        rates,
    })
}

impl ConvergenceTable {
    /// CSV with columns `time, e_1, ..., C_1, ...`.
    pub fn to_csv(&self) -> String {
        let mut head = vec!["time".to_string()];
        head.extend((1..=self.errors.len()).map(|i| format!("e_{i}")));
        head.extend((1..=self.rates.len()).map(|i| format!("C_{i}")));
        let mut out = head.join(",") + "\n";
        for (i, t) in self.times.iter().enumerate() {
            let mut cells = vec![t.to_string()];
            cells.extend(self.errors.iter().map(|e| e[i].to_string()));
            cells.extend(self.rates.iter().map(|r| r[i].to_string()));
            out += &(cells.join(",") + "\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_of_exact_halving_is_one() {
        assert!((convergence_rate(2e-6, 1e-6) - 1.0).abs() < 1e-15);
        assert!((convergence_rate(4e-6, 1e-6) - 2.0).abs() < 1e-15);
    }
}
