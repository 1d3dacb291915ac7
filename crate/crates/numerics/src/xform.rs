//! Removal of the damping term by `u = μ^(−1/2) v`.
//!
//! With `f(u) = (σ + κ ln|u|)u` the substitution yields `□v + g(v) = 0`,
//! `g(v) = (σ − σ0 + κ ln|v|)v`, whenever
//! `ȧ/2 + a²/4 + (κ/2)∫a dt = σ0` holds identically. The integration
//! constant of `∫a dt` is 0 (for `a = m/t`, `∫a dt = m ln t`).

use noether_core::jet::JetExpr;
use noether_core::model::{Damping, ModelSpec, Nonlinearity};
use noether_core::param::{ParamField, Symbol};
use noether_core::solve::{solve_vanishing, substitute_all, Assignment, SolveError};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::grid::GridSpec;
use crate::law::{bind, Bindings, DampingLaw, ForceLaw, LawError, NumericModel, Table};
use crate::solver::{simulate, simulate_with, InitialData, RunConfig, Snapshot, SolverError, TimeStep};
use crate::sum::max_abs;

/// Tolerance on the residual of a tabulated `a(t)`, times `max(1, |σ0|)`.
pub const TABLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XformError {
    #[error("a = m/t is only defined for t > 0, got t = {0}")]
    Domain(f64),
    #[error("the removal condition does not hold: residual {0}")]
    Refused(String),
    #[error("damping removal needs f = (sigma + kappa ln|u|) u")]
    Nonlinearity,
    #[error("generic damping has no removal condition")]
    Generic,
    #[error("`{0}` must be numeric here")]
    Unbound(String),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemovalCondition {
    pub kappa: ParamField,
    pub sigma0: ParamField,
    pub damping: Damping,
}

impl RemovalCondition {
    /// Reads `κ` and `a(t)` from a logarithmic model.
    pub fn from_spec(spec: &ModelSpec, sigma0: ParamField) -> Result<RemovalCondition, XformError> {
        match &spec.nonlinearity {
            Nonlinearity::Logarithmic { kappa, .. } => {
                Ok(RemovalCondition { kappa: kappa.clone(), sigma0, damping: spec.damping.clone() })
            }
            _ => Err(XformError::Nonlinearity),
        }
    }
}

/// `ȧ/2 + a²/4 + (κ/2)∫a dt − σ0` as an expression in `t` for the analytic laws.
pub fn residual_expr(rc: &RemovalCondition) -> Result<Option<JetExpr>, XformError> {
    let half = ParamField::ratio(1, 2);
    let quarter = ParamField::ratio(1, 4);
    let k = &rc.kappa;
    let s0 = JetExpr::constant(rc.sigma0.clone());
    Ok(Some(match &rc.damping {
        Damping::None => -s0,
        Damping::Power(m) => {
            let c2 = &(m * &(m - &ParamField::from_int(2))) * &quarter;
            let cl = &(k * m) * &half;
            JetExpr::t_pow(ParamField::from_int(-2)).scale(&c2) + JetExpr::log_t().scale(&cl) - s0
        }
        Damping::Constant(a0) => {
            JetExpr::constant(&(a0 * a0) * &quarter) + JetExpr::t().scale(&(&(k * a0) * &half)) - s0
        }
        Damping::Tabulated(_) => return Ok(None),
        Damping::Generic => return Err(XformError::Generic),
    }))
}

fn number(v: &ParamField, what: &str) -> Result<f64, XformError> {
    v.to_f64().ok_or_else(|| XformError::Unbound(what.to_string()))
}

/// The residual at time `t`; every parameter must be numeric.
pub fn ode_residual(rc: &RemovalCondition, t: f64) -> Result<f64, XformError> {
    let kappa = number(&rc.kappa, "kappa")?;
    let sigma0 = number(&rc.sigma0, "sigma0")?;
    let (a, adot, int) = match &rc.damping {
        Damping::None => (0.0, 0.0, 0.0),
        Damping::Power(m) => {
            if t <= 0.0 {
                return Err(XformError::Domain(t));
            }
            let m = number(m, "m")?;
            (m / t, -m / (t * t), m * t.ln())
        }
        Damping::Constant(a0) => {
            let a0 = number(a0, "a0")?;
            (a0, 0.0, a0 * t)
        }
        Damping::Tabulated(s) => {
            let tab = Table::new(s)?;
            (tab.a(t)?, tab.slope(t)?, tab.integral(t)?)
        }
        Damping::Generic => return Err(XformError::Generic),
    };
    Ok(adot / 2.0 + a * a / 4.0 + kappa / 2.0 * int - sigma0)
}

/// Whether the removal condition holds: exactly for analytic laws, to
/// [`TABLE_TOLERANCE`] at the samples and midpoints of a table.
pub fn condition_holds(rc: &RemovalCondition) -> Result<(bool, String), XformError> {
    if let Some(e) = residual_expr(rc)? {
        return Ok((e.is_zero(), e.to_string()));
    }
    let Damping::Tabulated(s) = &rc.damping else { unreachable!() };
    let sigma0 = number(&rc.sigma0, "sigma0")?;
    let mut worst = 0.0f64;
    for w in s.windows(2) {
        for t in [w[0].0, 0.5 * (w[0].0 + w[1].0), w[1].0] {
            worst = worst.max(ode_residual(rc, t)?.abs());
        }
    }
    Ok((worst <= TABLE_TOLERANCE * sigma0.abs().max(1.0), format!("{:e}", worst)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionVerdict {
    /// The residual for `a = m/t` with symbolic `σ0`.
    pub residual: String,
    /// Its `t`-dependent part.
    pub t_dependent: String,
    /// True if the residual is constant in `t` for the given `(m, κ)`.
    pub constant: bool,
    /// Every assignment of the symbolic inputs making the residual constant.
    pub conditions: Vec<Vec<(String, String)>>,
}

/// Decides when `a = m/t` admits a constant `σ0`.
pub fn obstruction_check(m: &ParamField, kappa: &ParamField) -> Result<ObstructionVerdict, XformError> {
    let rc = RemovalCondition { kappa: kappa.clone(), sigma0: ParamField::sym("sigma0"), damping: Damping::Power(m.clone()) };
    let residual = residual_expr(&rc)?.expect("power law is analytic");
    let t_dep: JetExpr = residual
        .terms()
        .filter(|(mono, _)| !mono.is_one())
        .map(|(mono, c)| JetExpr::term(c.clone(), mono.clone()))
        .sum();
    let mut unknowns: Vec<Symbol> = m.symbols();
    for s in kappa.symbols() {
        if !unknowns.contains(&s) {
            unknowns.push(s);
        }
    }
    let conditions: Vec<Assignment> = if t_dep.is_zero() {
        vec![Vec::new()]
    } else if unknowns.is_empty() {
        Vec::new()
    } else {
        solve_vanishing(&unknowns, &|a: &[(Symbol, ParamField)]| Ok(substitute_all(&t_dep, a)))?
    };
    Ok(ObstructionVerdict {
        residual: residual.to_string(),
        t_dependent: t_dep.to_string(),
        constant: t_dep.is_zero(),
        conditions: conditions
            .iter()
            .map(|a| a.iter().map(|(s, v)| (s.name(), v.to_string())).collect())
            .collect(),
    })
}

/// `g(v) = (σ − σ0 + κ ln|v|) v` as a model nonlinearity.
pub fn transformed_nonlinearity(nl: &Nonlinearity, sigma0: &ParamField) -> Result<Nonlinearity, XformError> {
    match nl {
        Nonlinearity::Logarithmic { sigma, kappa } => {
            Ok(Nonlinearity::Logarithmic { sigma: sigma - sigma0, kappa: kappa.clone() })
        }
        _ => Err(XformError::Nonlinearity),
    }
}

/// `v = μ^(1/2) u`, `v_t = μ^(1/2)(u_t + a u/2)`.
pub fn transform_fields(u: &[f64], ut: &[f64], mu: f64, a: f64) -> (Vec<f64>, Vec<f64>) {
    let s = mu.sqrt();
    let v = u.iter().map(|x| s * x).collect();
    let vt = u.iter().zip(ut).map(|(x, y)| s * (y + 0.5 * a * x)).collect();
    (v, vt)
}

/// Maps damped snapshots to the undamped variable; refuses if the condition fails.
pub fn remove_damping(
    snaps: &[Snapshot],
    damping: &DampingLaw,
    t0: f64,
    rc: &RemovalCondition,
) -> Result<Vec<Snapshot>, XformError> {
    let (ok, residual) = condition_holds(rc)?;
    if !ok {
        return Err(XformError::Refused(residual));
    }
    snaps
        .par_iter()
        .map(|s| {
            let (v, vt) = transform_fields(&s.u, &s.ut, damping.mu(s.t, t0)?, damping.a(s.t)?);
            Ok(Snapshot { index: s.index, t: s.t, u: v, ut: vt })
        })
        .collect()
}

/// `max |(v⁺ − 2v⁰ + v⁻)/Δt² − Δ_h v⁰ + g(v⁰)|`.
pub fn wave_residual(grid: &GridSpec, g: &ForceLaw, prev: &[f64], curr: &[f64], next: &[f64], dt: f64) -> f64 {
    let r: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| (next[i] - 2.0 * curr[i] + prev[i]) / (dt * dt) - grid.laplacian_at(curr, i) + g.force(curr[i]))
        .collect();
    max_abs(&r)
}

/// A damped logarithmic run compared against the undamped run it should map to.
#[derive(Clone, Debug, PartialEq)]
pub struct RemovalSetup {
    pub spec: ModelSpec,
    pub bindings: Bindings,
    pub sigma0: ParamField,
    pub grid: GridSpec,
    pub t_end: f64,
    pub initial: InitialData,
    pub step: TimeStep,
    pub stride: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemovalReport {
    /// `max_t ‖μ^(1/2)u − v‖_∞` over compared snapshots.
    pub gap_max: f64,
    /// `gap_max / max_t ‖v‖_∞`.
    pub gap_relative: f64,
    /// Largest discrete residual of `□v + g(v)` on the transformed damped levels.
    pub wave_residual_max: f64,
    pub dt: f64,
    pub steps: usize,
    pub snapshots: usize,
    pub condition: String,
}

pub fn removal_experiment(setup: &RemovalSetup) -> Result<RemovalReport, XformError> {
    let sigma0 = bind(&setup.sigma0, &setup.bindings)?;
    let spec = setup.spec.clone();
    let mut rc = RemovalCondition::from_spec(&spec, sigma0.clone())?;
    rc.kappa = bind(&rc.kappa, &setup.bindings)?;
    if let Damping::Power(m) | Damping::Constant(m) = &mut rc.damping {
        *m = bind(m, &setup.bindings)?;
    }
    let (ok, condition) = condition_holds(&rc)?;
    if !ok {
        return Err(XformError::Refused(condition));
    }
    let damped = NumericModel::from_spec(&spec, &setup.bindings)?;
    let undamped_spec = ModelSpec {
        damping: Damping::None,
        nonlinearity: transformed_nonlinearity(&spec.nonlinearity, &sigma0)?,
        ..spec.clone()
    };
    let undamped = NumericModel::from_spec(&undamped_spec, &setup.bindings)?;

    let mut cfg = RunConfig::new(damped.clone(), setup.grid.clone(), setup.t_end, setup.initial.clone());
    cfg.step = setup.step;
    cfg.stride = setup.stride;
    let t0 = cfg.t0;

    let mut wave_residual_max = 0.0f64;
    let mut wave_err = None;
    let mut transformed = Vec::new();
    let sched = cfg.schedule()?;
    let info = simulate_with(&cfg, |v| {
        let lift = |w: &[f64], t: f64| -> Result<Vec<f64>, LawError> {
            let s = damped.damping.mu(t, t0)?.sqrt();
            Ok(w.iter().map(|x| s * x).collect())
        };
        let levels = (|| {
            Ok::<_, LawError>((lift(v.prev, v.t - v.dt)?, lift(v.curr, v.t)?, lift(v.next, v.t + v.dt)?))
        })();
        match levels {
            Ok((p, c, n)) => {
                if v.index > 0 {
                    wave_residual_max = wave_residual_max.max(wave_residual(v.grid, &undamped.force, &p, &c, &n, v.dt));
                }
                if v.index % cfg.stride == 0 || v.index == sched.steps {
                    transformed.push(c);
                }
            }
            Err(e) => wave_err = Some(e),
        }
    })?;
    if let Some(e) = wave_err {
        return Err(e.into());
    }
    if let Some((step, t)) = info.blowup {
        return Err(SolverError::BlowUp { step, t }.into());
    }

    let (u0, ut0) = setup.initial.sample(&setup.grid)?;
    let (v0, vt0) = transform_fields(&u0, &ut0, damped.damping.mu(t0, t0)?, damped.damping.a(t0)?);
    let mut ucfg = RunConfig::new(undamped, setup.grid.clone(), setup.t_end, InitialData::Fields { u: v0, ut: vt0 });
    ucfg.step = setup.step;
    ucfg.stride = setup.stride;
    ucfg.t0 = t0;
    let direct = simulate(&ucfg)?.completed()?;

    let mut gap_max = 0.0f64;
    let mut scale = 0.0f64;
    for (a, b) in transformed.iter().zip(&direct.snapshots) {
        let diff: Vec<f64> = a.iter().zip(&b.u).map(|(x, y)| x - y).collect();
        gap_max = gap_max.max(max_abs(&diff));
        scale = scale.max(max_abs(&b.u));
    }
    Ok(RemovalReport {
        gap_max,
        gap_relative: if scale > 0.0 { gap_max / scale } else { 0.0 },
        wave_residual_max,
        dt: info.dt,
        steps: info.steps,
        snapshots: transformed.len(),
        condition,
    })
}
