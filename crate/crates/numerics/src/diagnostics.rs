//! Lowering of symbolic densities to grid evaluators, conserved charges,
//! drift and energy reports, and refinement orders.

use noether_core::jet::{Atom, JetExpr};
use noether_core::model::ModelSpec;
use noether_core::param::{ParamField, Symbol};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::grid::{GridError, GridSpec};
use crate::law::{bind, Exponent, LawError, NumericModel};
use crate::solver::{Snapshot, StepView};
use crate::sum::pairwise_sum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagError {
    #[error("densities must be first order; found an order-{0} derivative")]
    Order(usize),
    #[error("coefficient or exponent is not numeric after binding: {0}")]
    Unbound(String),
    #[error("x{axis} does not exist on a {n}D grid")]
    Axis { axis: usize, n: usize },
    #[error("empty series")]
    Empty,
    #[error("time stamps are not strictly increasing")]
    Times,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Law(#[from] LawError),
}

#[derive(Clone, Debug, PartialEq)]
enum CellFactor {
    Ut(i32),
    Grad(usize, i32),
    U(Exponent),
    ExpU(f64),
    LogU(i32),
    F(u32, i32),
    X(usize, i32),
}

#[derive(Clone, Debug, PartialEq)]
enum TimeFactor {
    T(f64),
    LogT(i32),
    Mu(i32),
    Damping(u32, i32),
}

#[derive(Clone, Debug, PartialEq)]
struct Term {
    coeff: f64,
    time: Vec<TimeFactor>,
    cell: Vec<CellFactor>,
}

/// A first-order density ready for evaluation on snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledDensity {
    pub name: String,
    terms: Vec<Term>,
    model: NumericModel,
}

fn numeric(v: &ParamField) -> Result<f64, DiagError> {
    v.to_f64().ok_or_else(|| DiagError::Unbound(v.to_string()))
}

fn int_power(v: &ParamField) -> Result<i32, DiagError> {
    v.as_integer().map(|k| k as i32).ok_or_else(|| DiagError::Unbound(v.to_string()))
}

/// Lowers `e` after substituting `bindings` into it and into `spec`.
pub fn compile_density(
    name: &str,
    e: &JetExpr,
    spec: &ModelSpec,
    bindings: &[(Symbol, ParamField)],
) -> Result<CompiledDensity, DiagError> {
    let model = NumericModel::from_spec(spec, bindings)?;
    let mut bound = e.clone();
    for (s, v) in bindings {
        bound = bound.substitute(*s, v).map_err(|err| DiagError::Unbound(err.to_string()))?;
    }
    let mut terms = Vec::new();
    for (m, c) in bound.terms() {
        let mut term = Term { coeff: numeric(c)?, time: Vec::new(), cell: Vec::new() };
        for (atom, k) in m.atoms() {
            match atom {
                Atom::Deriv(j) => {
                    if j.order() > 1 {
                        return Err(DiagError::Order(j.order()));
                    }
                    let a = j.vars()[0] as usize;
                    term.cell.push(if a == 0 { CellFactor::Ut(int_power(&k)?) } else { CellFactor::Grad(a, int_power(&k)?) });
                }
                Atom::U => {
                    let b = bind(&k, bindings)?;
                    term.cell.push(CellFactor::U(match b.as_integer() {
                        Some(i) => Exponent::Int(i as i32),
                        None => Exponent::Real(numeric(&b)?),
                    }));
                }
                Atom::ExpU => term.cell.push(CellFactor::ExpU(numeric(&k)?)),
                Atom::LogU => term.cell.push(CellFactor::LogU(int_power(&k)?)),
                Atom::F(j) => {
                    model.force.nth(j, 0.0)?;
                    term.cell.push(CellFactor::F(j, int_power(&k)?));
                }
                Atom::X(axis) => {
                    if axis > spec.n {
                        return Err(DiagError::Axis { axis, n: spec.n });
                    }
                    term.cell.push(CellFactor::X(axis, int_power(&k)?));
                }
                Atom::T => term.time.push(TimeFactor::T(numeric(&k)?)),
                Atom::LogT => term.time.push(TimeFactor::LogT(int_power(&k)?)),
                Atom::Mu => term.time.push(TimeFactor::Mu(int_power(&k)?)),
                Atom::Damping(j) => term.time.push(TimeFactor::Damping(j, int_power(&k)?)),
            }
        }
        terms.push(term);
    }
    Ok(CompiledDensity { name: name.to_string(), terms, model })
}

fn log_abs(u: f64) -> f64 {
    if u.abs() < crate::law::LOG_FLOOR {
        0.0
    } else {
        u.abs().ln()
    }
}

impl CompiledDensity {
    fn time_coefficients(&self, t: f64) -> Result<Vec<f64>, DiagError> {
        self.terms
            .iter()
            .map(|term| {
                let mut c = term.coeff;
                for f in &term.time {
                    c *= match *f {
                        TimeFactor::T(p) => t.powf(p),
                        TimeFactor::LogT(k) => t.ln().powi(k),
                        TimeFactor::Mu(k) => self.model.damping.mu(t, self.model.t0)?.powi(k),
                        TimeFactor::Damping(j, k) => self.model.damping.nth(j, t)?.powi(k),
                    };
                }
                Ok(c)
            })
            .collect()
    }

    /// The density at every cell of a snapshot.
    pub fn eval_field(&self, snap: &Snapshot, grid: &GridSpec) -> Result<Vec<f64>, DiagError> {
        grid.check_len(&snap.u)?;
        grid.check_len(&snap.ut)?;
        let coeffs = self.time_coefficients(snap.t)?;
        let force = &self.model.force;
        let out: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let u = snap.u[idx];
                let x = grid.position(idx);
                let mut acc = 0.0;
                for (term, c) in self.terms.iter().zip(&coeffs) {
                    let mut v = *c;
                    for f in &term.cell {
                        v *= match *f {
                            CellFactor::Ut(k) => snap.ut[idx].powi(k),
                            CellFactor::Grad(a, k) => grid.centered(&snap.u, idx, a).powi(k),
                            CellFactor::U(p) => p.pow(u),
                            CellFactor::ExpU(r) => (r * u).exp(),
                            CellFactor::LogU(k) => log_abs(u).powi(k),
                            CellFactor::F(j, k) => force.nth(j, u).unwrap_or(f64::NAN).powi(k),
                            CellFactor::X(a, k) => x[a - 1].powi(k),
                        };
                    }
                    acc += v;
                }
                acc
            })
            .collect();
        Ok(out)
    }
}

/// `Σ I₀ h^n` together with `Σ |I₀| h^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Charge {
    pub value: f64,
    pub abs: f64,
}

pub fn charge(snap: &Snapshot, cd: &CompiledDensity, grid: &GridSpec) -> Result<Charge, DiagError> {
    let field = cd.eval_field(snap, grid)?;
    let vol = grid.cell_volume();
    let abs: Vec<f64> = field.iter().map(|v| v.abs()).collect();
    Ok(Charge { value: pairwise_sum(&field) * vol, abs: pairwise_sum(&abs) * vol })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChargeSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub abs: Vec<f64>,
}

/// Charges of `cd` on every snapshot, evaluated in parallel.
pub fn charge_series(snaps: &[Snapshot], cd: &CompiledDensity, grid: &GridSpec) -> Result<ChargeSeries, DiagError> {
    let charges: Result<Vec<Charge>, DiagError> = snaps.par_iter().map(|s| charge(s, cd, grid)).collect();
    let charges = charges?;
    Ok(ChargeSeries {
        name: cd.name.clone(),
        times: snaps.iter().map(|s| s.t).collect(),
        values: charges.iter().map(|c| c.value).collect(),
        abs: charges.iter().map(|c| c.abs).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Drift {
    /// `max_t |C(t) − C(t0)|`.
    pub max_abs: f64,
    /// `max(|C(t0)|, max_t ∫|I₀|)`.
    pub scale: f64,
    pub relative: f64,
}

pub fn drift_report(series: &ChargeSeries) -> Result<Drift, DiagError> {
    let c0 = *series.values.first().ok_or(DiagError::Empty)?;
    if series.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DiagError::Times);
    }
    let max_abs = series.values.iter().fold(0.0f64, |m, c| m.max((c - c0).abs()));
    let scale = series.abs.iter().fold(c0.abs(), |m, a| m.max(*a));
    let relative = if scale > 0.0 { max_abs / scale } else { 0.0 };
    Ok(Drift { max_abs, scale, relative })
}

/// `Σ [½u_t² + ½|D⁺u|² + F(u)] h^n` on a snapshot.
pub fn snapshot_energy(snap: &Snapshot, model: &NumericModel, grid: &GridSpec) -> Result<f64, DiagError> {
    grid.check_len(&snap.u)?;
    let dens: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let grad2: f64 = (1..=grid.n()).map(|a| grid.forward(&snap.u, i, a).powi(2)).sum();
            0.5 * snap.ut[i] * snap.ut[i] + 0.5 * grad2 + model.force.potential(snap.u[i])
        })
        .collect();
    Ok(pairwise_sum(&dens) * grid.cell_volume())
}

/// Per-step energy bookkeeping.
///
/// `E^{k+1/2} = Σ[½((u⁺−u⁰)/Δt)² + ½ D⁺u⁺·D⁺u⁰ + G(u⁺, u⁰)] h^n` with
/// `G = ½(F(u⁺)+F(u⁰)) − ¼ f′(ū)(u⁺−u⁰)²`, `ū` the midpoint, is the energy
/// the scheme balances exactly for linear f; the dissipation between
/// `E^{k−1/2}` and `E^{k+1/2}` is `a(t_k) Δt Σ ((u⁺−u⁻)/2Δt)² h^n`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EnergyLog {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Dissipation accumulated since the first entry.
    pub dissipated: Vec<f64>,
    pub dt: f64,
    pub a_min: f64,
}

impl EnergyLog {
    pub fn new() -> EnergyLog {
        EnergyLog { a_min: f64::INFINITY, ..Default::default() }
    }

    pub fn observe(&mut self, v: &StepView) {
        let g = v.grid;
        let inv_dt = 1.0 / v.dt;
        let force = &v.model.force;
        let (e, diss): (Vec<f64>, Vec<f64>) = (0..g.len())
            .into_par_iter()
            .map(|i| {
                let kin = ((v.next[i] - v.curr[i]) * inv_dt).powi(2);
                let grad: f64 = (1..=g.n()).map(|a| g.forward(v.next, i, a) * g.forward(v.curr, i, a)).sum();
                let jump = v.next[i] - v.curr[i];
                let mid = 0.5 * (v.next[i] + v.curr[i]);
                let pot = force.potential(v.next[i]) + force.potential(v.curr[i]) - 0.5 * force.force_derivative(mid) * jump * jump;
                let ut = (v.next[i] - v.prev[i]) * 0.5 * inv_dt;
                (0.5 * (kin + grad + pot), ut * ut)
            })
            .unzip();
        let vol = g.cell_volume();
        let a = v.model.damping.a(v.t).unwrap_or(f64::NAN);
        self.a_min = self.a_min.min(a);
        self.dt = v.dt;
        let prev = self.dissipated.last().copied();
        self.dissipated.push(match prev {
            None => 0.0,
            Some(d) => d + a * v.dt * pairwise_sum(&diss) * vol,
        });
        self.times.push(v.t + 0.5 * v.dt);
        self.energy.push(pairwise_sum(&e) * vol);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub e0: f64,
    pub e_final: f64,
    /// `max |E − E0| / E0`.
    pub max_relative_change: f64,
    /// Largest single-step increase, relative to `E0`.
    pub max_increase: f64,
    /// `10 Δt² E0`.
    pub tolerance: f64,
    pub monotone: bool,
    pub strictly_decreasing: bool,
    /// `max_k |E_k − E_0 + D_k| / E0`.
    pub balance_residual: f64,
}

/// Monotonicity and balance of a logged run; requires `a ≥ 0` throughout.
pub fn energy_decay_check(log: &EnergyLog) -> Result<EnergyReport, DiagError> {
    let e0 = *log.energy.first().ok_or(DiagError::Empty)?;
    if !(log.a_min >= 0.0) {
        return Err(DiagError::Precondition(format!("a(t) takes the value {} < 0", log.a_min)));
    }
    let scale = e0.abs().max(f64::MIN_POSITIVE);
    let tolerance = 10.0 * log.dt * log.dt * e0.abs();
    let max_increase = log.energy.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let max_relative_change = log.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / scale;
    let balance = log
        .energy
        .iter()
        .zip(&log.dissipated)
        .map(|(e, d)| (e - e0 + d).abs())
        .fold(0.0, f64::max)
        / scale;
    let monotone = max_increase <= tolerance;
    let e_final = *log.energy.last().unwrap();
    Ok(EnergyReport {
        e0,
        e_final,
        max_relative_change,
        max_increase: max_increase / scale,
        tolerance,
        monotone,
        strictly_decreasing: monotone && e_final < e0,
        balance_residual: balance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    Estimated { order: f64, monotone: bool },
    /// Every observable is below the floor; nothing to estimate.
    BelowFloor,
}

/// `log₂ |o_h − o_{h/2}| / |o_{h/2} − o_{h/4}|` for three matched runs.
pub fn convergence_order(obs: [f64; 3], floor: f64) -> Order {
    if obs.iter().all(|o| o.abs() < floor) {
        return Order::BelowFloor;
    }
    let d1 = obs[0] - obs[1];
    let d2 = obs[1] - obs[2];
    let monotone = d1 * d2 > 0.0 && d1.abs() > d2.abs();
    Order::Estimated { order: (d1.abs() / d2.abs()).log2(), monotone }
}

/// `log₂(e_h / e_{h/2})` for an error-like observable that tends to zero.
pub fn error_order(coarse: f64, fine: f64) -> f64 {
    (coarse.abs() / fine.abs()).log2()
}
