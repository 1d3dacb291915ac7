//! The subcommands. Each validates its configuration before touching the
//! output directory, then writes its artifacts and a `<command>.json`
//! summary listing every file with its hash.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use noether_core::currents::{noether_current, paper_catalog, CurrentReport, ReadingOutcome};
use noether_core::model::{Damping, ModelSpec, Nonlinearity};
use noether_core::param::{parse_param, Symbol};
use noether_core::symmetry::{catalog, list_symmetries, solve_factor, VerdictReport};
use noether_numerics::diagnostics::{
    charge, compile_density, drift_report, energy_decay_check, error_order, ChargeSeries, CompiledDensity, Drift,
    EnergyLog, EnergyReport,
};
use noether_numerics::grid::GridSpec;
use noether_numerics::snapio::{write_csv, Header, SnapshotWriter};
use noether_numerics::solver::{simulate_with, RunConfig, RunInfo, Snapshot, SolverError};
use noether_numerics::xform::{
    condition_holds, obstruction_check, removal_experiment, ObstructionVerdict, RemovalCondition, RemovalReport,
    RemovalSetup, XformError,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::{Artifacts, Pending};
use crate::config::Config;
use crate::selfcheck::engine_checks;
use crate::svg::{line_chart, Series};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    BlowUp,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::BlowUp => 3,
        }
    }

    fn from_pass(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

pub struct Ctx<'a> {
    pub config: &'a Config,
    pub out: &'a Path,
    pub seed: u64,
}

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

fn finish(mut art: Artifacts, command: &str, status: Status, ctx: &Ctx, body: Value) -> Result<Status, CliError> {
    let summary = json!({
        "command": command,
        "status": status,
        "seed": ctx.seed,
        "config": ctx.config,
        "result": body,
        "files": art.files(),
    });
    art.write_json(&format!("{}.json", command), &summary)?;
    Ok(status)
}

#[derive(Serialize)]
struct GeneratorEntry {
    verdict: VerdictReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    current: Option<CurrentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct FamilyEntry {
    family: String,
    generator: String,
    readings: Vec<ReadingOutcome>,
    printed_reading_verifies: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    adopted: Option<CurrentReport>,
}

pub fn verify_symbolic(ctx: &Ctx) -> Result<Status, CliError> {
    let spec = ctx.config.spec()?;
    let listings = list_symmetries(&spec).map_err(config_err)?;
    let (families, applicability) = paper_catalog(&spec).map_err(config_err)?;
    let mut failures = Vec::new();

    let mut generators = Vec::new();
    for l in &listings {
        let mut entry = GeneratorEntry { verdict: VerdictReport::from(&l.verdict), current: None, error: None };
        if l.verdict.is_symmetry() {
            match noether_current(&l.field, &spec, &l.verdict).and_then(|cs| CurrentReport::new(&cs)) {
                Ok(r) => {
                    if !(r.identity && r.multiplier_ok) {
                        failures.push(format!("current of {} fails its identity", l.field.name()));
                    }
                    entry.current = Some(r);
                }
                Err(e) => {
                    failures.push(format!("{}: {}", l.field.name(), e));
                    entry.error = Some(e.to_string());
                }
            }
        }
        generators.push(entry);
    }

    let mut family_entries = Vec::new();
    for t in &families {
        let adopted = t.adopted.as_ref().map(CurrentReport::new).transpose().map_err(config_err)?;
        match &adopted {
            Some(r) if r.identity && r.multiplier_ok => {}
            _ => failures.push(format!("{} ({}) has no verifying reading", t.family, t.generator.name())),
        }
        family_entries.push(FamilyEntry {
            family: t.family.clone(),
            generator: t.generator.name().to_string(),
            readings: t.readings.clone(),
            printed_reading_verifies: t.printed_passes(),
            adopted,
        });
    }

    let v = &ctx.config.verify;
    let find = |name: &str| listings.iter().find(|l| l.field.name() == name);
    for name in &v.expect_symmetry {
        match find(name) {
            Some(l) if l.verdict.is_symmetry() => {}
            Some(_) => failures.push(format!("{} was expected to be a symmetry but is not variational", name)),
            None => return Err(config_err(format!("no cataloged generator named `{}`", name))),
        }
    }
    for name in &v.expect_not_symmetry {
        match find(name) {
            Some(l) if !l.verdict.is_symmetry() => {}
            Some(_) => failures.push(format!("{} was expected not to be a symmetry", name)),
            None => return Err(config_err(format!("no cataloged generator named `{}`", name))),
        }
    }
    for fam in &v.expect_families {
        let members: Vec<_> = families.iter().filter(|t| &t.family == fam).collect();
        if members.is_empty() || members.iter().any(|t| t.adopted.is_none()) {
            failures.push(format!("family `{}` was expected to verify", fam));
        }
    }

    let checks = if v.property_cases > 0 { engine_checks(v.property_cases, ctx.seed, spec.n) } else { Vec::new() };
    for c in &checks {
        if c.failures > 0 {
            failures.push(format!("{}: {} of {} cases failed", c.property, c.failures, c.cases));
        }
    }

    let status = Status::from_pass(failures.is_empty());
    let art = Artifacts::create(ctx.out)?;
    let body = json!({
        "model": spec.describe(),
        "lagrangian_convention": "L = mu (u_t^2/2 - |grad u|^2/2 - F(u)); E_u(L) = -mu (u_tt - lap u + a u_t + f)",
        "generators": generators,
        "families": family_entries,
        "applicability": applicability,
        "self_checks": checks,
        "failures": failures,
    });
    finish(art, "verify-symbolic", status, ctx, body)
}

#[derive(Serialize)]
struct FactorEntry {
    generator: String,
    unknowns: Vec<String>,
    solutions: Vec<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn derive_factors(ctx: &Ctx) -> Result<Status, CliError> {
    let spec = ctx.config.spec()?;
    let l = spec.lagrangian().map_err(config_err)?;
    let extra: Vec<Symbol> = ctx.config.factors.solve_for.iter().map(|s| Symbol::named(s)).collect();
    let mut entries = Vec::new();
    for entry in catalog(&spec) {
        let mut unknowns = entry.unknowns.clone();
        for s in &extra {
            if !unknowns.contains(s) {
                unknowns.push(*s);
            }
        }
        if unknowns.is_empty() {
            continue;
        }
        let mut e = FactorEntry {
            generator: entry.field.name().to_string(),
            unknowns: unknowns.iter().map(|s| s.name()).collect(),
            solutions: Vec::new(),
            error: None,
        };
        match solve_factor(&entry.field, &l, &unknowns) {
            Ok(sols) => {
                e.solutions =
                    sols.iter().map(|s| s.assignment.iter().map(|(k, v)| (k.name(), v.to_string())).collect()).collect()
            }
            Err(err) => e.error = Some(err.to_string()),
        }
        entries.push(e);
    }

    let mut failures = Vec::new();
    for (gen, expected) in &ctx.config.factors.expect {
        let entry = entries
            .iter()
            .find(|e| &e.generator == gen)
            .ok_or_else(|| config_err(format!("no factor problem for generator `{}`", gen)))?;
        let mut wanted = Vec::new();
        for (k, v) in expected {
            let value = parse_param(v).map_err(|e| config_err(format!("factors.expect.{}.{}: {}", gen, k, e)))?;
            wanted.push((k.clone(), value));
        }
        let found = entry.solutions.iter().any(|sol| {
            wanted.iter().all(|(k, v)| sol.get(k).and_then(|s| parse_param(s).ok()).is_some_and(|got| &got == v))
        });
        if !found {
            failures.push(format!("{}: no solution matches the expected factors", gen));
        }
    }
    let status = Status::from_pass(failures.is_empty());
    let art = Artifacts::create(ctx.out)?;
    finish(art, "derive-factors", status, ctx, json!({ "model": spec.describe(), "factors": entries, "failures": failures }))
}

/// Observes a run: snapshots at the stride, the energy log, and charges.
struct Recorder<'a> {
    stride: usize,
    steps: usize,
    cfg: &'a RunConfig,
    stream: Option<SnapshotWriter<Pending>>,
    keep: bool,
    kept: Vec<Snapshot>,
    densities: &'a [CompiledDensity],
    series: Vec<ChargeSeries>,
    energy: EnergyLog,
    error: Option<CliError>,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a RunConfig, densities: &'a [CompiledDensity], stream: Option<SnapshotWriter<Pending>>, keep: bool) -> Result<Recorder<'a>, CliError> {
        Ok(Recorder {
            stride: cfg.stride,
            steps: cfg.schedule().map_err(config_err)?.steps,
            cfg,
            stream,
            keep,
            kept: Vec::new(),
            densities,
            series: densities
                .iter()
                .map(|d| ChargeSeries { name: d.name.clone(), times: vec![], values: vec![], abs: vec![] })
                .collect(),
            energy: EnergyLog::new(),
            error: None,
        })
    }

    fn observe(&mut self, v: &noether_numerics::solver::StepView) {
        if self.error.is_some() {
            return;
        }
        self.energy.observe(v);
        if v.index % self.stride != 0 && v.index != self.steps {
            return;
        }
        let snap = v.snapshot(self.cfg.ut_estimate);
        for (d, s) in self.densities.iter().zip(self.series.iter_mut()) {
            match charge(&snap, d, &self.cfg.grid) {
                Ok(c) => {
                    s.times.push(snap.t);
                    s.values.push(c.value);
                    s.abs.push(c.abs);
                }
                Err(e) => {
                    self.error = Some(config_err(e));
                    return;
                }
            }
        }
        if let Some(w) = self.stream.as_mut() {
            if let Err(e) = w.push(&snap) {
                self.error = Some(CliError::Io(std::io::Error::other(e.to_string())));
                return;
            }
        }
        if self.keep {
            self.kept.push(snap);
        }
    }
}

fn open_stream(art: &Artifacts, ctx: &Ctx, cfg: &RunConfig) -> Result<Option<SnapshotWriter<Pending>>, CliError> {
    if !ctx.config.output.snapshots {
        return Ok(None);
    }
    let dt = cfg.schedule().map_err(config_err)?.dt;
    let p = art.begin("snapshots.bin")?;
    let w = SnapshotWriter::new(p, &Header::new(&cfg.grid, dt, cfg.t0)).map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(Some(w))
}

fn close_stream(art: &mut Artifacts, w: Option<SnapshotWriter<Pending>>) -> Result<(), CliError> {
    if let Some(w) = w {
        let p = w.finish().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        art.commit(p)?;
    }
    Ok(())
}

fn write_fields_csv(art: &mut Artifacts, snaps: &[Snapshot], grid: &GridSpec) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, snaps, grid)?;
    art.write("fields.csv", &buf)?;
    Ok(())
}

fn write_energy(art: &mut Artifacts, log: &EnergyLog, svg: bool) -> Result<(), CliError> {
    let mut csv = String::from("t,energy,dissipated,balance\n");
    let e0 = log.energy.first().copied().unwrap_or(0.0);
    for ((t, e), d) in log.times.iter().zip(&log.energy).zip(&log.dissipated) {
        let _ = writeln!(csv, "{:e},{:e},{:e},{:e}", t, e, d, e - e0 + d);
    }
    art.write("energy.csv", csv.as_bytes())?;
    if svg {
        let pts = |v: &[f64]| log.times.iter().copied().zip(v.iter().copied()).collect();
        let series = vec![Series { name: "E".into(), points: pts(&log.energy) }];
        art.write("energy.svg", line_chart("discrete energy", "t", "E", &series).as_bytes())?;
    }
    Ok(())
}

fn blowup_body(info: &RunInfo) -> Value {
    let (step, t) = info.blowup.unwrap_or((0, f64::NAN));
    json!({ "blowup": { "step": step, "t": t }, "run": info })
}

#[derive(Serialize)]
struct EnergySummary {
    report: EnergyReport,
    criterion: String,
    pass: bool,
}

fn energy_verdict(log: &EnergyLog, ctx: &Ctx, undamped: bool) -> Result<EnergySummary, CliError> {
    let report = energy_decay_check(log).map_err(config_err)?;
    let (pass, criterion) = if undamped {
        (
            report.max_relative_change <= ctx.config.energy.tolerance,
            format!("relative change <= {:e}", ctx.config.energy.tolerance),
        )
    } else {
        (report.monotone, format!("no increase beyond 10 dt^2 E0 = {:e}", report.tolerance))
    };
    Ok(EnergySummary { report, criterion, pass })
}

pub fn simulate(ctx: &Ctx) -> Result<Status, CliError> {
    let cfg = ctx.config.run_config(1)?;
    let mut art = Artifacts::create(ctx.out)?;
    let stream = open_stream(&art, ctx, &cfg)?;
    let keep = cfg.grid.len() <= ctx.config.output.csv_cells;
    let mut rec = Recorder::new(&cfg, &[], stream, keep)?;
    let info = simulate_with(&cfg, |v| rec.observe(v)).map_err(config_err)?;
    if let Some(e) = rec.error.take() {
        return Err(e);
    }
    close_stream(&mut art, rec.stream.take())?;
    if keep {
        write_fields_csv(&mut art, &rec.kept, &cfg.grid)?;
    }
    write_energy(&mut art, &rec.energy, ctx.config.output.svg)?;
    if info.blowup.is_some() {
        return finish(art, "simulate", Status::BlowUp, ctx, blowup_body(&info));
    }
    let energy = energy_verdict(&rec.energy, ctx, cfg.model.damping.is_none())?;
    let status = Status::from_pass(energy.pass);
    finish(art, "simulate", status, ctx, json!({ "run": info, "energy": energy }))
}

fn selected_densities(ctx: &Ctx, spec: &ModelSpec) -> Result<(Vec<CompiledDensity>, Vec<Value>), CliError> {
    let listings = list_symmetries(spec).map_err(config_err)?;
    let wanted = ctx.config.charges.generators.as_ref();
    if let Some(names) = wanted {
        for n in names {
            if !listings.iter().any(|l| l.field.name() == n) {
                return Err(config_err(format!("no cataloged generator named `{}`", n)));
            }
        }
    }
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for l in &listings {
        let name = l.field.name();
        let requested = wanted.map(|w| w.iter().any(|n| n == name));
        if requested == Some(false) {
            continue;
        }
        if !l.verdict.is_symmetry() {
            if requested == Some(true) {
                return Err(CliError::Verification(format!("{} is not a symmetry of this model", name)));
            }
            continue;
        }
        let compiled = noether_current(&l.field, spec, &l.verdict)
            .map_err(|e| e.to_string())
            .and_then(|cs| compile_density(name, &cs.density, spec, &[]).map_err(|e| e.to_string()));
        match compiled {
            Ok(cd) => out.push(cd),
            Err(e) if requested == Some(true) => return Err(CliError::Verification(format!("{}: {}", name, e))),
            Err(e) => skipped.push(json!({ "generator": name, "reason": e })),
        }
    }
    Ok((out, skipped))
}

#[derive(Serialize)]
struct ChargeResult {
    name: String,
    initial: f64,
    drift: Drift,
    below_floor: bool,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    refinement: Option<Refinement>,
}

#[derive(Serialize)]
struct Refinement {
    points: Vec<usize>,
    relative_drift: Vec<f64>,
    contraction: Vec<f64>,
    order: Vec<f64>,
}

fn run_charges(cfg: &RunConfig, densities: &[CompiledDensity]) -> Result<(RunInfo, Vec<ChargeSeries>), CliError> {
    let mut rec = Recorder::new(cfg, densities, None, false)?;
    let info = simulate_with(cfg, |v| rec.observe(v)).map_err(config_err)?;
    if let Some(e) = rec.error.take() {
        return Err(e);
    }
    Ok((info, rec.series))
}

pub fn charges(ctx: &Ctx) -> Result<Status, CliError> {
    let spec = ctx.config.spec()?;
    let cfg = ctx.config.run_config(1)?;
    let refined = if ctx.config.charges.refine {
        vec![ctx.config.run_config(2)?, ctx.config.run_config(4)?]
    } else {
        Vec::new()
    };
    let (densities, skipped) = selected_densities(ctx, &spec)?;
    if densities.is_empty() {
        return Err(CliError::Verification("no conserved density to audit".into()));
    }
    let mut art = Artifacts::create(ctx.out)?;
    let stream = open_stream(&art, ctx, &cfg)?;
    let mut rec = Recorder::new(&cfg, &densities, stream, false)?;
    let info = simulate_with(&cfg, |v| rec.observe(v)).map_err(config_err)?;
    if let Some(e) = rec.error.take() {
        return Err(e);
    }
    close_stream(&mut art, rec.stream.take())?;

    let mut csv = String::from("t,current,value\n");
    for s in &rec.series {
        for (t, v) in s.times.iter().zip(&s.values) {
            let _ = writeln!(csv, "{:e},{},{:e}", t, s.name, v);
        }
    }
    art.write("charges.csv", csv.as_bytes())?;
    if info.blowup.is_some() {
        return finish(art, "charges", Status::BlowUp, ctx, blowup_body(&info));
    }

    let tol = ctx.config.charges.tolerance;
    let floor = ctx.config.charges.floor;
    let mut results = Vec::new();
    let mut drifts = Vec::new();
    for s in &rec.series {
        let drift = drift_report(s).map_err(config_err)?;
        let below_floor = drift.scale < floor;
        drifts.push(drift);
        results.push(ChargeResult {
            name: s.name.clone(),
            initial: s.values[0],
            drift,
            below_floor,
            pass: below_floor || drift.relative <= tol,
            refinement: None,
        });
    }
    if !refined.is_empty() {
        let mut levels = vec![drifts.iter().map(|d| d.relative).collect::<Vec<_>>()];
        let mut points = vec![cfg.grid.points()[0]];
        for rc in &refined {
            let (rinfo, series) = run_charges(rc, &densities)?;
            if rinfo.blowup.is_some() {
                return finish(art, "charges", Status::BlowUp, ctx, blowup_body(&rinfo));
            }
            let rel: Result<Vec<f64>, CliError> =
                series.iter().map(|s| drift_report(s).map(|d| d.relative).map_err(config_err)).collect();
            levels.push(rel?);
            points.push(rc.grid.points()[0]);
        }
        for (k, r) in results.iter_mut().enumerate() {
            let rel: Vec<f64> = levels.iter().map(|l| l[k]).collect();
            let contraction: Vec<f64> = rel.windows(2).map(|w| w[0] / w[1]).collect();
            let order = rel.windows(2).map(|w| error_order(w[0], w[1])).collect();
            r.refinement = Some(Refinement { points: points.clone(), relative_drift: rel, contraction, order });
        }
    }
    if ctx.config.output.svg {
        let series: Vec<Series> = rec
            .series
            .iter()
            .zip(&drifts)
            .map(|(s, d)| Series {
                name: s.name.clone(),
                points: s.times.iter().zip(&s.values).map(|(t, v)| (*t, (v - s.values[0]) / d.scale.max(f64::MIN_POSITIVE))).collect(),
            })
            .collect();
        art.write("charges.svg", line_chart("relative charge deviation", "t", "(C - C0)/scale", &series).as_bytes())?;
    }
    let status = Status::from_pass(results.iter().all(|r| r.pass));
    finish(art, "charges", status, ctx, json!({ "run": info, "tolerance": tol, "charges": results, "skipped": skipped }))
}

fn removal_setup(ctx: &Ctx, refine: usize) -> Result<RemovalSetup, CliError> {
    let cfg = ctx.config.run_config(refine)?;
    Ok(RemovalSetup {
        spec: ctx.config.spec()?,
        bindings: vec![],
        sigma0: ctx.config.sigma0()?,
        grid: cfg.grid.clone(),
        t_end: cfg.t_end,
        initial: cfg.initial.clone(),
        step: cfg.step,
        stride: cfg.stride,
    })
}

pub fn transform_check(ctx: &Ctx) -> Result<Status, CliError> {
    let spec = ctx.config.spec()?;
    let tcfg = ctx.config.transform.as_ref().ok_or_else(|| config_err("missing [transform] section"))?;
    let rc = RemovalCondition::from_spec(&spec, ctx.config.sigma0()?).map_err(config_err)?;
    let (holds, condition) = condition_holds(&rc).map_err(config_err)?;
    let obstruction: Option<ObstructionVerdict> = match (&spec.damping, &spec.nonlinearity) {
        (Damping::Power(m), Nonlinearity::Logarithmic { kappa, .. }) => Some(obstruction_check(m, kappa).map_err(config_err)?),
        _ => None,
    };
    let setups = [removal_setup(ctx, 1)?, removal_setup(ctx, 2)?, removal_setup(ctx, 4)?];
    let mut art = Artifacts::create(ctx.out)?;
    if !holds {
        let body = json!({ "condition": condition, "holds": false, "obstruction": obstruction });
        return finish(art, "transform-check", Status::Fail, ctx, body);
    }
    let mut reports: Vec<RemovalReport> = Vec::new();
    for s in &setups {
        match removal_experiment(s) {
            Ok(r) => reports.push(r),
            Err(XformError::Solver(SolverError::BlowUp { step, t })) => {
                let body = json!({ "blowup": { "step": step, "t": t, "points": s.grid.points()[0] }, "completed": reports });
                return finish(art, "transform-check", Status::BlowUp, ctx, body);
            }
            Err(e) => return Err(config_err(e)),
        }
    }
    let orders: Vec<f64> = reports.windows(2).map(|w| error_order(w[0].gap_max, w[1].gap_max)).collect();
    let pass = orders.iter().all(|o| (o - tcfg.order).abs() <= tcfg.order_slack);
    let mut csv = String::from("points,dt,gap_max,gap_relative,wave_residual_max\n");
    for (s, r) in setups.iter().zip(&reports) {
        let _ = writeln!(csv, "{},{:e},{:e},{:e},{:e}", s.grid.points()[0], r.dt, r.gap_max, r.gap_relative, r.wave_residual_max);
    }
    art.write("transform.csv", csv.as_bytes())?;
    if ctx.config.output.svg {
        let pts = setups.iter().zip(&reports).map(|(s, r)| (s.grid.h().log2(), r.gap_max.log2())).collect();
        let series = vec![Series { name: "gap".into(), points: pts }];
        art.write("transform.svg", line_chart("transformed damped vs direct undamped", "log2 h", "log2 gap", &series).as_bytes())?;
    }
    let body = json!({
        "condition": condition,
        "holds": true,
        "obstruction": obstruction,
        "integration_constant": "the antiderivative of a(t) is taken with constant 0",
        "levels": reports,
        "orders": orders,
        "required_order": tcfg.order,
        "slack": tcfg.order_slack,
    });
    finish(art, "transform-check", Status::from_pass(pass), ctx, body)
}

const SUMMARIES: [&str; 5] = ["verify-symbolic", "derive-factors", "simulate", "charges", "transform-check"];

/// Collects the summaries already present in the output directory.
pub fn report(ctx: &Ctx) -> Result<Status, CliError> {
    let mut found = Vec::new();
    for name in SUMMARIES {
        let path = ctx.out.join(format!("{}.json", name));
        if let Ok(text) = std::fs::read_to_string(&path) {
            let v: Value = serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {}", path.display(), e)))?;
            let status = v.get("status").and_then(Value::as_str).unwrap_or("unknown").to_string();
            found.push((name, status, crate::artifacts::sha256_hex(text.as_bytes())));
        }
    }
    if found.is_empty() {
        return Err(config_err(format!("no summaries in {}", ctx.out.display())));
    }
    let mut md = String::from("# Audit report\n\n| command | status |\n|---|---|\n");
    for (name, status, _) in &found {
        let _ = writeln!(md, "| {} | {} |", name, status);
    }
    let status = if found.iter().any(|(_, s, _)| s == "blow-up") {
        Status::BlowUp
    } else {
        Status::from_pass(found.iter().all(|(_, s, _)| s == "pass"))
    };
    let mut art = Artifacts::create(ctx.out)?;
    let mut f = art.begin("report.md")?;
    f.write_all(md.as_bytes())?;
    art.commit(f)?;
    let entries: Vec<Value> =
        found.iter().map(|(n, s, h)| json!({ "summary": format!("{}.json", n), "status": s, "sha256": h })).collect();
    finish(art, "report", status, ctx, json!({ "summaries": entries }))
}
