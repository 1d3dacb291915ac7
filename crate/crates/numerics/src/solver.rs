//! Explicit leapfrog for `u_tt = Δu − a(t)u_t − f(u)` with the damping term
//! averaged over the two outer time levels:
//!
//! `u⁺ = [2u⁰ − (1 − α)u⁻ + Δt²(Δ_h u⁰ − f(u⁰))]/(1 + α)`, `α = a(t⁰)Δt/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, GridSpec};
use crate::law::{LawError, NumericModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("non-finite value at step {step} (t = {t})")]
    BlowUp { step: usize, t: f64 },
    #[error("time step {dt} exceeds the CFL bound {max}")]
    Cfl { dt: f64, max: f64 },
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("model dimension {model} does not match grid dimension {grid}")]
    Dimension { model: usize, grid: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Law(#[from] LawError),
}

/// `h/√n`, before any safety factor.
pub fn cfl_max_dt(grid: &GridSpec) -> f64 {
    grid.h() / (grid.n() as f64).sqrt()
}

/// The initial velocity `u_t(t0)` of a Gaussian bump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Velocity {
    Zero,
    /// `u_t = −∂_axis u`: a bump moving with unit speed along `axis`.
    Translating { axis: usize },
    /// `u_t = c·u`.
    Proportional { factor: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    /// `u = A exp(−|x − c|²/w²)`.
    Gaussian { amplitude: f64, center: Vec<f64>, width: f64, velocity: Velocity },
    /// Explicit samples of `u` and `u_t` at `t0`.
    Fields { u: Vec<f64>, ut: Vec<f64> },
}

impl InitialData {
    /// `(u, u_t)` sampled on the grid.
    pub fn sample(&self, grid: &GridSpec) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
        match self {
            InitialData::Gaussian { amplitude, center, width, velocity } => {
                if center.len() != grid.n() {
                    return Err(SolverError::Config(format!("center has {} coordinates", center.len())));
                }
                let c = [center[0], center.get(1).copied().unwrap_or(0.0)];
                let n = grid.n();
                let w2 = width * width;
                let bump = |x: [f64; 2]| {
                    let r2: f64 = (0..n).map(|k| (x[k] - c[k]).powi(2)).sum();
                    amplitude * (-r2 / w2).exp()
                };
                let u = grid.sample(bump);
                let ut = match velocity {
                    Velocity::Zero => vec![0.0; u.len()],
                    Velocity::Translating { axis } => {
                        if !(1..=n).contains(axis) {
                            return Err(SolverError::Config(format!("no axis {}", axis)));
                        }
                        let k = axis - 1;
                        grid.sample(|x| 2.0 * (x[k] - c[k]) / w2 * bump(x))
                    }
                    Velocity::Proportional { factor } => u.iter().map(|v| factor * v).collect(),
                };
                Ok((u, ut))
            }
            InitialData::Fields { u, ut } => {
                grid.check_len(u)?;
                grid.check_len(ut)?;
                Ok((u.clone(), ut.clone()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeStep {
    Fixed(f64),
    /// `Δt = c_s h/√n`, shrunk slightly so that `t_end` is hit exactly.
    Cfl(f64),
}

/// How snapshots estimate `u_t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtEstimate {
    /// `(u⁺ − u⁻)/(2Δt)`.
    #[default]
    Centered,
    /// `(u⁺ − u⁰)/Δt`, first order; used as a negative control.
    Forward,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: NumericModel,
    pub grid: GridSpec,
    pub step: TimeStep,
    pub t0: f64,
    pub t_end: f64,
    pub stride: usize,
    pub initial: InitialData,
    pub ut_estimate: UtEstimate,
}

/// Resolved time stepping of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub dt: f64,
    pub steps: usize,
}

impl RunConfig {
    pub fn new(model: NumericModel, grid: GridSpec, t_end: f64, initial: InitialData) -> RunConfig {
        RunConfig {
            t0: model.t0,
            model,
            grid,
            step: TimeStep::Cfl(0.5),
            t_end,
            stride: 1,
            initial,
            ut_estimate: UtEstimate::Centered,
        }
    }

    pub fn schedule(&self) -> Result<Schedule, SolverError> {
        let span = self.t_end - self.t0;
        if !(span > 0.0 && span.is_finite()) {
            return Err(SolverError::Config(format!("t_end = {} must exceed t0 = {}", self.t_end, self.t0)));
        }
        let max = cfl_max_dt(&self.grid);
        match self.step {
            TimeStep::Cfl(cs) => {
                if !(cs > 0.0 && cs <= 1.0) {
                    return Err(SolverError::Config(format!("CFL safety factor {} is outside (0, 1]", cs)));
                }
                let steps = (span / (cs * max)).ceil().max(1.0) as usize;
                Ok(Schedule { dt: span / steps as f64, steps })
            }
            TimeStep::Fixed(dt) => {
                if !(dt > 0.0) {
                    return Err(SolverError::Config(format!("time step {} must be positive", dt)));
                }
                if dt > max * (1.0 + 1e-12) {
                    return Err(SolverError::Cfl { dt, max });
                }
                let steps = (span / dt).round().max(1.0) as usize;
                Ok(Schedule { dt, steps })
            }
        }
    }

    pub fn validate(&self) -> Result<Schedule, SolverError> {
        if self.model.n != self.grid.n() {
            return Err(SolverError::Dimension { model: self.model.n, grid: self.grid.n() });
        }
        if self.stride == 0 {
            return Err(SolverError::Config("snapshot stride must be at least 1".into()));
        }
        if let InitialData::Gaussian { center, width, .. } = &self.initial {
            if !(*width > 0.0) {
                return Err(SolverError::Config(format!("width {} must be positive", width)));
            }
            let room = self.grid.distance_to_boundary(center);
            if room < 4.0 * width {
                return Err(SolverError::Config(format!(
                    "bump support reaches within {:.3} of the boundary; need at least 4w = {}",
                    room,
                    4.0 * width
                )));
            }
        }
        let sched = self.schedule()?;
        // Evaluate the damping law on the whole interval up front.
        self.model.damping.a(self.t0)?;
        self.model.damping.a(self.t0 + sched.steps as f64 * sched.dt)?;
        self.model.damping.mu(self.t0, self.t0)?;
        Ok(sched)
    }
}

/// Two time levels of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
    /// Time of `u_curr`.
    pub t: f64,
    pub dt: f64,
}

/// One leapfrog update of `next` from `prev`, `curr` at time `t`.
pub fn step_into(
    grid: &GridSpec,
    model: &NumericModel,
    prev: &[f64],
    curr: &[f64],
    t: f64,
    dt: f64,
    next: &mut [f64],
) -> Result<(), SolverError> {
    let alpha = model.damping.a(t)? * dt / 2.0;
    let dt2 = dt * dt;
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let force = &model.force;
    let update = |idx: usize, lap: f64| {
        (2.0 * curr[idx] - (1.0 - alpha) * prev[idx] + dt2 * (lap - force.force(curr[idx]))) / (1.0 + alpha)
    };
    match grid.n() {
        1 => {
            let p = grid.points()[0];
            next.par_chunks_mut(1024).enumerate().for_each(|(c, chunk)| {
                for (j, out) in chunk.iter_mut().enumerate() {
                    let i = c * 1024 + j;
                    let l = curr[(i + p - 1) % p];
                    let r = curr[(i + 1) % p];
                    *out = update(i, (l - 2.0 * curr[i] + r) * inv_h2);
                }
            });
        }
        _ => {
            let (p1, p2) = (grid.points()[0], grid.points()[1]);
            next.par_chunks_mut(p2).enumerate().for_each(|(i, row)| {
                let up = ((i + p1 - 1) % p1) * p2;
                let down = ((i + 1) % p1) * p2;
                let here = i * p2;
                for (j, out) in row.iter_mut().enumerate() {
                    let jl = if j == 0 { p2 - 1 } else { j - 1 };
                    let jr = if j + 1 == p2 { 0 } else { j + 1 };
                    let c = curr[here + j];
                    let lap = (curr[up + j] + curr[down + j] + curr[here + jl] + curr[here + jr] - 4.0 * c) * inv_h2;
                    *out = update(here + j, lap);
                }
            });
        }
    }
    Ok(())
}

fn all_finite(v: &[f64]) -> bool {
    v.par_iter().all(|x| x.is_finite())
}

/// Advances a state by one step.
pub fn step(s: &GridState, model: &NumericModel, grid: &GridSpec) -> Result<GridState, SolverError> {
    grid.check_len(&s.u_prev)?;
    grid.check_len(&s.u_curr)?;
    let mut next = vec![0.0; grid.len()];
    step_into(grid, model, &s.u_prev, &s.u_curr, s.t, s.dt, &mut next)?;
    if !all_finite(&next) {
        return Err(SolverError::BlowUp { step: 1, t: s.t + s.dt });
    }
    Ok(GridState { u_prev: s.u_curr.clone(), u_curr: next, t: s.t + s.dt, dt: s.dt })
}

/// Level `−1` from a Taylor expansion: `u⁻ = u − Δt v + Δt²/2 (Δ_h u − a v − f(u))`.
pub fn initial_state(cfg: &RunConfig, dt: f64) -> Result<GridState, SolverError> {
    let (u, v) = cfg.initial.sample(&cfg.grid)?;
    let a = cfg.model.damping.a(cfg.t0)?;
    let g = &cfg.grid;
    let prev: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let acc = g.laplacian_at(&u, i) - a * v[i] - cfg.model.force.force(u[i]);
            u[i] - dt * v[i] + 0.5 * dt * dt * acc
        })
        .collect();
    Ok(GridState { u_prev: prev, u_curr: u, t: cfg.t0, dt })
}

/// Three consecutive levels around time `t`, handed to observers at every step.
pub struct StepView<'a> {
    pub index: usize,
    pub t: f64,
    pub dt: f64,
    pub prev: &'a [f64],
    pub curr: &'a [f64],
    pub next: &'a [f64],
    pub grid: &'a GridSpec,
    pub model: &'a NumericModel,
}

impl StepView<'_> {
    pub fn ut(&self, how: UtEstimate) -> Vec<f64> {
        match how {
            UtEstimate::Centered => {
                let s = 0.5 / self.dt;
                self.next.iter().zip(self.prev).map(|(a, b)| (a - b) * s).collect()
            }
            UtEstimate::Forward => self.next.iter().zip(self.curr).map(|(a, b)| (a - b) / self.dt).collect(),
        }
    }

    pub fn snapshot(&self, how: UtEstimate) -> Snapshot {
        Snapshot { index: self.index, t: self.t, u: self.curr.to_vec(), ut: self.ut(how) }
    }
}

/// The field and its time derivative at one instant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub index: usize,
    pub t: f64,
    pub u: Vec<f64>,
    pub ut: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunInfo {
    pub dt: f64,
    pub steps: usize,
    pub t_end: f64,
    /// Non-integer powers evaluated as `sign(u)|u|^p`.
    pub odd_extended_power: bool,
    pub blowup: Option<(usize, f64)>,
}

/// Runs `cfg`, calling `observe` at every level `0..=steps`.
///
/// A blow-up stops the run and is reported in [`RunInfo::blowup`]; levels
/// already observed stay valid.
pub fn simulate_with(cfg: &RunConfig, mut observe: impl FnMut(&StepView)) -> Result<RunInfo, SolverError> {
    let sched = cfg.validate()?;
    let mut state = initial_state(cfg, sched.dt)?;
    let mut info = RunInfo {
        dt: sched.dt,
        steps: sched.steps,
        t_end: cfg.t0 + sched.steps as f64 * sched.dt,
        odd_extended_power: cfg.model.force.needs_positive_data(),
        blowup: None,
    };
    if !all_finite(&state.u_prev) || !all_finite(&state.u_curr) {
        info.blowup = Some((0, cfg.t0));
        return Ok(info);
    }
    let mut next = vec![0.0; cfg.grid.len()];
    for k in 0..=sched.steps {
        let t = cfg.t0 + k as f64 * sched.dt;
        step_into(&cfg.grid, &cfg.model, &state.u_prev, &state.u_curr, t, sched.dt, &mut next)?;
        if !all_finite(&next) {
            info.blowup = Some((k + 1, t + sched.dt));
            return Ok(info);
        }
        observe(&StepView {
            index: k,
            t,
            dt: sched.dt,
            prev: &state.u_prev,
            curr: &state.u_curr,
            next: &next,
            grid: &cfg.grid,
            model: &cfg.model,
        });
        std::mem::swap(&mut state.u_prev, &mut state.u_curr);
        std::mem::swap(&mut state.u_curr, &mut next);
    }
    Ok(info)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Run {
    pub info: RunInfo,
    pub snapshots: Vec<Snapshot>,
}

impl Run {
    /// `Err` if the run blew up.
    pub fn completed(self) -> Result<Run, SolverError> {
        match self.info.blowup {
            Some((step, t)) => Err(SolverError::BlowUp { step, t }),
            None => Ok(self),
        }
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }
}

/// Runs `cfg`, keeping every `stride`-th level and the final one.
pub fn simulate(cfg: &RunConfig) -> Result<Run, SolverError> {
    let mut snapshots = Vec::new();
    let steps = cfg.schedule()?.steps;
    let info = simulate_with(cfg, |v| {
        if v.index % cfg.stride == 0 || v.index == steps {
            snapshots.push(v.snapshot(cfg.ut_estimate));
        }
    })?;
    Ok(Run { info, snapshots })
}
