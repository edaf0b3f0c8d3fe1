//! Run configuration, read from TOML with sections `[params]`, `[necrotic]`,
//! `[initial]`, `[numerics]`, `[output]`, `[halt]`, `[diagnostics]` and
//! `[linstab]`. Key names follow the usual model notation (`P`, `A`, `chi`,
//! `beta`, `sigma_n`, `Ginv`, `R0`, `R_init`, `N`, ...).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::StepConfig;
use crate::geometry::spectral::check_grid;
use crate::geometry::RadialShape;
use crate::gmres::GmresConfig;
use crate::linear::LinearConfig;
use crate::solver::Params;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Fixed necrotic boundary `r = R0 + eps0 cos(k0 alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NecroticConfig {
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(default)]
    pub eps0: f64,
    #[serde(default)]
    pub k0: u32,
}

impl NecroticConfig {
    pub fn shape(&self) -> RadialShape {
        RadialShape {
            radius: self.r0,
            eps: self.eps0,
            k: self.k0,
        }
    }
}

/// Initial interface `r = R_init + eps_init cos(k_init alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(rename = "R_init")]
    pub r_init: f64,
    #[serde(default)]
    pub eps_init: f64,
    #[serde(default)]
    pub k_init: u32,
}

impl InitialConfig {
    pub fn shape(&self) -> RadialShape {
        RadialShape {
            radius: self.r_init,
            eps: self.eps_init,
            k: self.k_init,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    /// Markers on each boundary.
    #[serde(rename = "N")]
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    /// Relative GMRES tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Integrating factor for the stiff term.
    #[serde(default = "yes")]
    pub integrating_factor: bool,
    /// High-order Fourier filter on the tangent angle.
    #[serde(default = "yes")]
    pub filter: bool,
    /// Krasny floor; `0` disables it.
    #[serde(default = "default_floor")]
    pub krasny_floor: f64,
}

/// Output cadences are in steps; `0` disables that artifact. Without `dir`
/// nothing is written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "one")]
    pub record_every: u64,
    #[serde(default)]
    pub snapshot_every: u64,
    #[serde(default)]
    pub trace_every: u64,
    #[serde(default)]
    pub checkpoint_every: u64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            record_every: 1,
            snapshot_every: 0,
            trace_every: 0,
            checkpoint_every: 0,
        }
    }
}

/// Near-touch halt: stop once two parts of the interface, or the interface
/// and the necrotic boundary, come closer than `gap_factor` mean node spacings.
/// Nodes closer than `min_index_gap` along the curve are not compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaltConfig {
    #[serde(default = "default_gap_factor")]
    pub gap_factor: f64,
    #[serde(default = "default_index_gap")]
    pub min_index_gap: usize,
}

impl Default for HaltConfig {
    fn default() -> Self {
        Self {
            gap_factor: default_gap_factor(),
            min_index_gap: default_index_gap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Fourier mode reported as the shape factor.
    #[serde(default = "default_mode")]
    pub mode: u32,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            mode: default_mode(),
        }
    }
}

/// Radius range and resolution for stability curves, plus the step for the
/// linear ODE integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinstabConfig {
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_ode_dt")]
    pub ode_dt: f64,
}

impl Default for LinstabConfig {
    fn default() -> Self {
        Self {
            r_min: default_r_min(),
            r_max: default_r_max(),
            points: default_points(),
            ode_dt: default_ode_dt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub params: Params,
    pub necrotic: NecroticConfig,
    pub initial: InitialConfig,
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub halt: HaltConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub linstab: LinstabConfig,
}

fn default_tol() -> f64 {
    GmresConfig::default().tol
}
fn default_max_iter() -> usize {
    GmresConfig::default().max_iter
}
fn default_floor() -> f64 {
    StepConfig::default().krasny_floor
}
fn yes() -> bool {
    true
}
fn one() -> u64 {
    1
}
fn default_gap_factor() -> f64 {
    2.0
}
fn default_index_gap() -> usize {
    8
}
fn default_mode() -> u32 {
    2
}
fn default_r_min() -> f64 {
    0.5
}
fn default_r_max() -> f64 {
    4.0
}
fn default_points() -> usize {
    200
}
fn default_ode_dt() -> f64 {
    1e-3
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

impl SimulationConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::load_with(path, &[])
    }

    /// Load and apply `section.key = value` overrides before validation.
    /// Values use TOML syntax (`1.0`, `256`, `true`, `"out"`).
    pub fn load_with(path: &Path, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_with(&text, overrides)
    }

    pub fn from_toml_with(text: &str, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut table: toml::Table = toml::from_str(text)?;
        for (key, value) in overrides {
            let parsed: toml::Table = toml::from_str(&format!("v = {value}"))
                .or_else(|_| toml::from_str(&format!("v = {:?}", value)))?;
            let value = parsed["v"].clone();
            let mut parts: Vec<&str> = key.split('.').collect();
            let leaf = parts
                .pop()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| invalid(format!("bad key `{key}`")))?;
            let mut node = &mut table;
            for p in parts {
                node = node
                    .entry(p)
                    .or_insert_with(|| toml::Value::Table(Default::default()))
                    .as_table_mut()
                    .ok_or_else(|| invalid(format!("`{p}` in `{key}` is not a section")))?;
            }
            node.insert(leaf.to_string(), value);
        }
        let cfg: Self = table.try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate().map_err(invalid)?;
        let core = self.necrotic.shape();
        let init = self.initial.shape();
        core.validate()
            .map_err(|e| invalid(format!("necrotic boundary: {e}")))?;
        init.validate()
            .map_err(|e| invalid(format!("initial interface: {e}")))?;
        // Both curves are radial about the origin, so containment is a
        // pointwise comparison of the radii.
        let inside = (0..4096)
            .map(|j| 2.0 * PI * j as f64 / 4096.0)
            .all(|a| init.r(a) > core.r(a));
        if !inside {
            return Err(invalid(
                "initial interface must lie strictly outside the necrotic boundary",
            ));
        }
        let num = &self.numerics;
        check_grid(num.n).map_err(|e| invalid(e.to_string()))?;
        if !(num.dt.is_finite() && num.dt > 0.0) {
            return Err(invalid("dt must be positive"));
        }
        if !(num.t_final.is_finite() && num.t_final > 0.0) {
            return Err(invalid("t_final must be positive"));
        }
        if !(num.tol > 0.0 && num.tol < 1.0) {
            return Err(invalid("tol must lie in (0, 1)"));
        }
        if num.max_iter == 0 {
            return Err(invalid("max_iter must be positive"));
        }
        if !(num.krasny_floor >= 0.0) {
            return Err(invalid("krasny_floor must be >= 0"));
        }
        if self.output.record_every == 0 {
            return Err(invalid("record_every must be >= 1"));
        }
        if !(self.halt.gap_factor.is_finite() && self.halt.gap_factor >= 0.0) {
            return Err(invalid("gap_factor must be >= 0"));
        }
        if self.halt.min_index_gap == 0 || self.halt.min_index_gap >= num.n / 2 {
            return Err(invalid("min_index_gap must lie in [1, N/2)"));
        }
        if self.diagnostics.mode == 0 {
            return Err(invalid("diagnostic mode must be >= 1"));
        }
        let ls = &self.linstab;
        if !(ls.r_min > 0.0 && ls.r_max > ls.r_min && ls.points >= 2 && ls.ode_dt > 0.0) {
            return Err(invalid(
                "linstab needs 0 < r_min < r_max, points >= 2, ode_dt > 0",
            ));
        }
        Ok(())
    }

    /// Number of steps to reach `t_final`.
    pub fn total_steps(&self) -> u64 {
        ((self.numerics.t_final / self.numerics.dt) - 1e-9)
            .ceil()
            .max(1.0) as u64
    }

    pub fn gmres(&self) -> GmresConfig {
        GmresConfig {
            tol: self.numerics.tol,
            max_iter: self.numerics.max_iter,
        }
    }

    pub fn step_config(&self) -> StepConfig {
        StepConfig {
            integrating_factor: self.numerics.integrating_factor,
            filter: self.numerics.filter,
            krasny_floor: self.numerics.krasny_floor,
        }
    }

    /// Linear-theory setup matching this run: circular core of radius `R0`,
    /// initial radius `R_init` and perturbation `eps_init` in mode `l`.
    pub fn linear(&self, l: u32) -> LinearConfig {
        LinearConfig {
            r0: self.necrotic.r0,
            l,
            params: self.params,
            r_init: self.initial.r_init,
            delta_init: self.initial.eps_init,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG7: &str = r#"
[params]
P = 5.0
A = 0.25
chi = 5.0
beta = 0.5
sigma_n = 0.2
Ginv = 0.001

[necrotic]
R0 = 0.1

[initial]
R_init = 2.5
eps_init = 0.1
k_init = 2

[numerics]
N = 64
dt = 1e-3
t_final = 0.01
"#;

    #[test]
    fn parses_with_defaults() {
        let c = SimulationConfig::from_toml(FIG7).unwrap();
        assert_eq!(c.params.p, 5.0);
        assert_eq!(c.params.ginv, 0.001);
        assert_eq!(c.necrotic.eps0, 0.0);
        assert_eq!(c.numerics.tol, 1e-10);
        assert_eq!(c.halt.gap_factor, 2.0);
        assert_eq!(c.output.record_every, 1);
        assert_eq!(c.total_steps(), 10);
    }

    #[test]
    fn toml_round_trip() {
        let c = SimulationConfig::from_toml(FIG7).unwrap();
        assert_eq!(SimulationConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn overrides_replace_keys() {
        let ov = |k: &str, v: &str| (k.to_string(), v.to_string());
        let c = SimulationConfig::from_toml_with(
            FIG7,
            &[
                ov("params.beta", "2.0"),
                ov("numerics.N", "128"),
                ov("output.dir", "runs/a"),
            ],
        )
        .unwrap();
        assert_eq!(c.params.beta, 2.0);
        assert_eq!(c.numerics.n, 128);
        assert_eq!(c.output.dir.as_deref(), Some(Path::new("runs/a")));
        assert!(SimulationConfig::from_toml_with(FIG7, &[ov("params.beta", "-1.0")]).is_err());
        assert!(SimulationConfig::from_toml_with(FIG7, &[ov("params.beta.x", "1.0")]).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let cases = [
            ("N = 64", "N = 60"),
            ("dt = 1e-3", "dt = 0.0"),
            ("t_final = 0.01", "t_final = -1.0"),
            ("R0 = 0.1", "R0 = 2.6"),
            ("sigma_n = 0.2", "sigma_n = 1.5"),
        ];
        for (from, to) in cases {
            let text = FIG7.replace(from, to);
            assert!(
                matches!(
                    SimulationConfig::from_toml(&text),
                    Err(ConfigError::Invalid(_))
                ),
                "{to} accepted"
            );
        }
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        let text = FIG7.replace("chi = 5.0", "chi = 5.0\nkappa = 1.0");
        assert!(matches!(
            SimulationConfig::from_toml(&text),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            SimulationConfig::from_toml("not toml ="),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn interface_touching_a_lobed_core_is_rejected() {
        let text = FIG7.replace("R0 = 0.1", "R0 = 2.45");
        assert!(SimulationConfig::from_toml(&text).is_err());
        let text = FIG7.replace("R0 = 0.1", "R0 = 2.0\neps0 = 0.45\nk0 = 3");
        assert!(SimulationConfig::from_toml(&text).is_err());
        let text = FIG7.replace("R0 = 0.1", "R0 = 1.0\neps0 = 0.3\nk0 = 3");
        assert!(SimulationConfig::from_toml(&text).is_ok());
    }
}
