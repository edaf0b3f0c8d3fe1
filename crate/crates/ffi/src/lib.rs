//! C ABI for the tumor-bim simulator.
//!
//! Every function returns a [`TbStatus`]; on failure a message is kept per
//! thread and can be copied out with [`tb_last_error_message`]. Simulations
//! are opaque [`TbSimulation`] handles created by `tb_simulation_*` and
//! released with [`tb_simulation_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use tumor_bim::driver::{Checkpoint, DriverError, RunStatus, Simulation, SimulationConfig};
use tumor_bim::geometry::reconstruct;
use tumor_bim::linear::{critical_apoptosis, dr_dt, dshape_dt, LinearConfig};
use tumor_bim::solver::Params;
use tumor_bim::special_functions::{bessel_i, bessel_k};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Configuration could not be read or is invalid.
    Config = 4,
    /// Checkpoint is corrupted, of another version, or does not match.
    Checkpoint = 5,
    /// The numerical method failed.
    Numerical = 6,
    Io = 7,
    /// The output buffer is too small; nothing was written.
    BufferTooSmall = 8,
    Panic = 9,
}

/// How a run ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbRunStatus {
    Completed = 0,
    NearTouch = 2,
    SolverFailure = 3,
    Paused = 10,
}

impl From<RunStatus> for TbRunStatus {
    fn from(s: RunStatus) -> Self {
        match s {
            RunStatus::Completed => Self::Completed,
            RunStatus::NearTouch => Self::NearTouch,
            RunStatus::SolverFailure => Self::SolverFailure,
            RunStatus::Paused => Self::Paused,
        }
    }
}

/// Dimensionless model parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbParams {
    pub proliferation: f64,
    pub apoptosis: f64,
    pub chi: f64,
    pub beta: f64,
    pub sigma_n: f64,
    pub ginv: f64,
}

impl From<TbParams> for Params {
    fn from(p: TbParams) -> Self {
        Params {
            p: p.proliferation,
            a: p.apoptosis,
            chi: p.chi,
            beta: p.beta,
            sigma_n: p.sigma_n,
            ginv: p.ginv,
        }
    }
}

/// Diagnostics of the most recently recorded state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TbRunRow {
    pub step: u64,
    pub time: f64,
    pub area: f64,
    pub r_eff: f64,
    pub delta_over_r: f64,
    pub gmres_nutrient: u64,
    pub gmres_pressure: u64,
    pub min_gap: f64,
    pub max_speed: f64,
}

/// Opaque simulation handle.
pub struct TbSimulation {
    inner: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

struct Failure(TbStatus, String);

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        let code = match &e {
            DriverError::Config(_) => TbStatus::Config,
            DriverError::Checkpoint(_) => TbStatus::Checkpoint,
            DriverError::Io { .. } | DriverError::Record(_) => TbStatus::Io,
            _ => TbStatus::Numerical,
        };
        Failure(code, e.to_string())
    }
}

fn null() -> Failure {
    Failure(TbStatus::NullPointer, "null pointer argument".into())
}

fn invalid(msg: impl ToString) -> Failure {
    Failure(TbStatus::InvalidArgument, msg.to_string())
}

/// Run `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TbStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            TbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid("string is not valid UTF-8"))
}

unsafe fn sim_mut<'a>(p: *mut TbSimulation) -> Result<&'a mut TbSimulation, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn sim_ref<'a>(p: *const TbSimulation) -> Result<&'a TbSimulation, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn hand_out(out: *mut *mut TbSimulation, sim: Simulation) -> Result<(), Failure> {
    write_out(out, Box::into_raw(Box::new(TbSimulation { inner: sim })))
}

/// Copy the last error message of this thread into `buf` as a NUL-terminated
/// string, truncating if needed. Returns the full message length in bytes
/// (without the terminator); pass a null `buf` to query it.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Create a simulation from configuration text.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_new(
    config_toml: *const c_char,
    out: *mut *mut TbSimulation,
) -> TbStatus {
    guard(|| {
        let cfg = SimulationConfig::from_toml(str_arg(config_toml)?).map_err(DriverError::from)?;
        hand_out(out, Simulation::new(cfg)?)
    })
}

/// Create a simulation from a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_load(
    path: *const c_char,
    out: *mut *mut TbSimulation,
) -> TbStatus {
    guard(|| {
        let cfg =
            SimulationConfig::load(&PathBuf::from(str_arg(path)?)).map_err(DriverError::from)?;
        hand_out(out, Simulation::new(cfg)?)
    })
}

/// Continue a simulation from a checkpoint file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_resume(
    path: *const c_char,
    out: *mut *mut TbSimulation,
) -> TbStatus {
    guard(|| {
        let ck = Checkpoint::read(&PathBuf::from(str_arg(path)?)).map_err(DriverError::from)?;
        hand_out(out, Simulation::from_checkpoint(ck)?)
    })
}

/// Write a checkpoint of the current state.
///
/// # Safety
/// `sim` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_save_checkpoint(
    sim: *const TbSimulation,
    path: *const c_char,
) -> TbStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let path = PathBuf::from(str_arg(path)?);
        sim.inner
            .checkpoint()
            .write(&path)
            .map_err(DriverError::from)?;
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_free(sim: *mut TbSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// March until step `stop` or the end of the run.
///
/// # Safety
/// `sim` must be a live handle; `status` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_run_until(
    sim: *mut TbSimulation,
    stop: u64,
    status: *mut TbRunStatus,
) -> TbStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        let s = match sim.inner.run_until(stop) {
            Ok(s) => s,
            Err(e) if e.is_numerical() => {
                set_error(e.to_string());
                RunStatus::SolverFailure
            }
            Err(e) => return Err(e.into()),
        };
        write_out(status, s.into())
    })
}

/// Run to the configured final time, writing any configured output files.
///
/// # Safety
/// `sim` must be a live handle; `status` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_run(
    sim: *mut TbSimulation,
    status: *mut TbRunStatus,
) -> TbStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        let outcome = sim.inner.run()?;
        if let Some(m) = &outcome.summary.message {
            set_error(m.clone());
        }
        write_out(status, outcome.status.into())
    })
}

/// Steps taken and current time.
///
/// # Safety
/// `sim` must be a live handle; `steps` and `time` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_progress(
    sim: *const TbSimulation,
    steps: *mut u64,
    time: *mut f64,
) -> TbStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        write_out(steps, sim.inner.steps())?;
        write_out(time, sim.inner.state().time)
    })
}

/// Number of interface markers.
///
/// # Safety
/// `sim` must be a live handle; `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_marker_count(
    sim: *const TbSimulation,
    n: *mut usize,
) -> TbStatus {
    guard(|| write_out(n, sim_ref(sim)?.inner.state().n_markers()))
}

/// Copy the interface node positions into `x` and `y`, each of length `len`
/// (at least the marker count).
///
/// # Safety
/// `sim` must be a live handle; `x`, `y` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_interface(
    sim: *const TbSimulation,
    x: *mut f64,
    y: *mut f64,
    len: usize,
) -> TbStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        if x.is_null() || y.is_null() {
            return Err(null());
        }
        let g = reconstruct(sim.inner.state())
            .map_err(|e| Failure(TbStatus::Numerical, e.to_string()))?;
        if len < g.len() {
            return Err(Failure(
                TbStatus::BufferTooSmall,
                format!("need {} entries, got {len}", g.len()),
            ));
        }
        ptr::copy_nonoverlapping(g.x.as_ptr(), x, g.len());
        ptr::copy_nonoverlapping(g.y.as_ptr(), y, g.len());
        Ok(())
    })
}

/// Diagnostics of the last recorded state. Fails with `InvalidArgument`
/// before the first evaluation.
///
/// # Safety
/// `sim` must be a live handle; `row` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulation_last_row(
    sim: *const TbSimulation,
    row: *mut TbRunRow,
) -> TbStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let r = sim
            .inner
            .record()
            .last()
            .ok_or_else(|| invalid("nothing recorded yet"))?;
        write_out(
            row,
            TbRunRow {
                step: r.step,
                time: r.time,
                area: r.area,
                r_eff: r.r_eff,
                delta_over_r: r.delta_over_r,
                gmres_nutrient: r.gmres_nutrient as u64,
                gmres_pressure: r.gmres_pressure as u64,
                min_gap: r.min_gap,
                max_speed: r.max_speed,
            },
        )
    })
}

/// Modified Bessel function `I_n(x)`, `x >= 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_bessel_i(n: u32, x: f64, out: *mut f64) -> TbStatus {
    guard(|| write_out(out, bessel_i(n, x).map_err(invalid)?))
}

/// Modified Bessel function `K_n(x)`, `x > 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_bessel_k(n: u32, x: f64, out: *mut f64) -> TbStatus {
    guard(|| write_out(out, bessel_k(n, x).map_err(invalid)?))
}

fn linear_config(params: &TbParams, r0: f64, mode: u32, r: f64) -> LinearConfig {
    LinearConfig {
        r0,
        l: mode,
        params: (*params).into(),
        r_init: r,
        delta_init: 0.0,
    }
}

/// Growth rate `dR/dt` of a circular tumor of radius `r` around a core `r0`.
///
/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_linear_radius_rate(
    params: *const TbParams,
    r0: f64,
    r: f64,
    out: *mut f64,
) -> TbStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(null)?;
        write_out(out, dr_dt(r, &linear_config(p, r0, 2, r)).map_err(invalid)?)
    })
}

/// Relative growth rate of the shape factor of mode `mode`.
///
/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_linear_shape_rate(
    params: *const TbParams,
    r0: f64,
    mode: u32,
    r: f64,
    out: *mut f64,
) -> TbStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(null)?;
        write_out(
            out,
            dshape_dt(r, &linear_config(p, r0, mode, r)).map_err(invalid)?,
        )
    })
}

/// Apoptosis value at which the mode-`mode` shape factor is stationary.
///
/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_linear_critical_apoptosis(
    params: *const TbParams,
    r0: f64,
    mode: u32,
    r: f64,
    out: *mut f64,
) -> TbStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(null)?;
        write_out(
            out,
            critical_apoptosis(r, &linear_config(p, r0, mode, r)).map_err(invalid)?,
        )
    })
}
