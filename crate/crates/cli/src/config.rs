//! TOML run configuration with `--set section.key=value` overrides.

use std::collections::BTreeMap;
use std::path::Path;

use noether_core::model::{ModelConfig, ModelSpec};
use noether_core::param::{parse_param, ParamField};
use noether_numerics::grid::GridSpec;
use noether_numerics::law::NumericModel;
use noether_numerics::solver::{InitialData, RunConfig, TimeStep, UtEstimate, Velocity};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelConfig,
    pub grid: Option<GridConfig>,
    pub run: Option<RunSection>,
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub factors: FactorsConfig,
    #[serde(default)]
    pub charges: ChargesConfig,
    #[serde(default)]
    pub energy: EnergyConfig,
    pub transform: Option<TransformConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A periodic cube `[−extent/2, extent/2)^n`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub extent: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_end: f64,
    /// CFL safety factor; ignored when `dt` is set.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub ut: UtEstimate,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default = "unit")]
    pub amplitude: f64,
    pub center: Option<Vec<f64>>,
    #[serde(default = "unit")]
    pub width: f64,
    /// `zero`, `translating` or `proportional`.
    #[serde(default = "zero_velocity")]
    pub velocity: String,
    #[serde(default = "one")]
    pub axis: usize,
    #[serde(default)]
    pub factor: f64,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Generators asserted to be variational or divergence symmetries.
    #[serde(default)]
    pub expect_symmetry: Vec<String>,
    /// Generators asserted not to be.
    #[serde(default)]
    pub expect_not_symmetry: Vec<String>,
    /// Published current families asserted to verify.
    #[serde(default)]
    pub expect_families: Vec<String>,
    /// Randomized engine self-checks per property (seeded by `--seed`).
    #[serde(default)]
    pub property_cases: usize,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FactorsConfig {
    /// Model parameters solved for alongside each generator's own factor.
    #[serde(default)]
    pub solve_for: Vec<String>,
    /// `generator -> {symbol -> expected value}`; checked exactly.
    #[serde(default)]
    pub expect: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChargesConfig {
    /// Defaults to every verified generator whose density compiles.
    pub generators: Option<Vec<String>>,
    #[serde(default = "default_drift")]
    pub tolerance: f64,
    /// Charges with `Σ|I₀|h^n` below this are reported and excluded.
    #[serde(default = "default_floor")]
    pub floor: f64,
    /// Also run at 2x and 4x the resolution and report contraction.
    #[serde(default)]
    pub refine: bool,
}

impl Default for ChargesConfig {
    fn default() -> Self {
        ChargesConfig { generators: None, tolerance: default_drift(), floor: default_floor(), refine: false }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    /// Relative change allowed for undamped runs.
    #[serde(default = "default_energy")]
    pub tolerance: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig { tolerance: default_energy() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub sigma0: String,
    /// Gap contraction order required under refinement.
    #[serde(default = "two")]
    pub order: f64,
    #[serde(default = "default_order_slack")]
    pub order_slack: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "yes")]
    pub snapshots: bool,
    /// Snapshot CSV is written only for grids up to this many cells.
    #[serde(default = "default_csv_cells")]
    pub csv_cells: usize,
    #[serde(default = "yes")]
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { snapshots: true, csv_cells: default_csv_cells(), svg: true }
    }
}

fn default_cfl() -> f64 {
    0.5
}
fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn yes() -> bool {
    true
}
fn zero_velocity() -> String {
    "zero".into()
}
fn default_drift() -> f64 {
    5e-3
}
fn default_floor() -> f64 {
    1e-12
}
fn default_energy() -> f64 {
    1e-4
}
fn default_order_slack() -> f64 {
    0.25
}
fn default_csv_cells() -> usize {
    4096
}

fn config_err(msg: impl ToString) -> CliError {
    CliError::Config(msg.to_string())
}

/// Parses an override value as a TOML value, falling back to a bare string.
fn override_value(raw: &str) -> toml::Value {
    match format!("v = {}", raw).parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn apply_override(root: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_err(format!("override `{}` is not key=value", assignment)))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(config_err(format!("bad override key `{}`", path)));
    }
    let mut table = root;
    for k in &keys[..keys.len() - 1] {
        let entry = table.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| config_err(format!("`{}` is not a section", k)))?;
    }
    let last = keys[keys.len() - 1];
    let raw = raw.trim();
    // Model parameters are exact-value strings such as "3/2" or "sym".
    let textual = matches!(table.get(last), Some(toml::Value::String(_)))
        || (keys.len() == 2 && keys[0] == "model" && !matches!(last, "n" | "samples"));
    let value = if textual { toml::Value::String(raw.trim_matches('"').into()) } else { override_value(raw) };
    table.insert(last.to_string(), value);
    Ok(())
}

impl Config {
    pub fn parse(text: &str, overrides: &[String]) -> Result<Config, CliError> {
        let mut root: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err(e.message()))?;
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        toml::Value::Table(root).try_into().map_err(|e: toml::de::Error| config_err(e.message()))
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {}", path.display(), e)))?;
        Config::parse(&text, overrides)
    }

    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        self.model.to_spec().map_err(|e| config_err(e))
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        let g = self.grid.as_ref().ok_or_else(|| config_err("missing [grid] section"))?;
        GridSpec::cube(self.model.n, g.extent, g.points).map_err(config_err)
    }

    pub fn initial(&self) -> Result<InitialData, CliError> {
        let default = InitialConfig {
            amplitude: 1.0,
            center: None,
            width: 1.0,
            velocity: zero_velocity(),
            axis: 1,
            factor: 0.0,
        };
        let i = self.initial.as_ref().unwrap_or(&default);
        let velocity = match i.velocity.as_str() {
            "zero" => Velocity::Zero,
            "translating" => Velocity::Translating { axis: i.axis },
            "proportional" => Velocity::Proportional { factor: i.factor },
            other => return Err(config_err(format!("unknown velocity profile `{}`", other))),
        };
        Ok(InitialData::Gaussian {
            amplitude: i.amplitude,
            center: i.center.clone().unwrap_or_else(|| vec![0.0; self.model.n]),
            width: i.width,
            velocity,
        })
    }

    pub fn time_step(&self) -> Result<TimeStep, CliError> {
        let r = self.run.as_ref().ok_or_else(|| config_err("missing [run] section"))?;
        Ok(match r.dt {
            Some(dt) => TimeStep::Fixed(dt),
            None => TimeStep::Cfl(r.cfl),
        })
    }

    /// A validated run configuration at `refine` times the configured resolution.
    pub fn run_config(&self, refine: usize) -> Result<RunConfig, CliError> {
        let spec = self.spec()?;
        let model = NumericModel::from_spec(&spec, &[]).map_err(config_err)?;
        let r = self.run.as_ref().ok_or_else(|| config_err("missing [run] section"))?;
        let g = self.grid()?;
        let grid = GridSpec::cube(self.model.n, g.extent()[0], g.points()[0] * refine).map_err(config_err)?;
        let mut cfg = RunConfig::new(model, grid, r.t_end, self.initial()?);
        cfg.step = match self.time_step()? {
            TimeStep::Fixed(dt) => TimeStep::Fixed(dt / refine as f64),
            s => s,
        };
        cfg.stride = r.stride * refine;
        cfg.ut_estimate = r.ut;
        cfg.validate().map_err(config_err)?;
        Ok(cfg)
    }

    pub fn sigma0(&self) -> Result<ParamField, CliError> {
        let t = self.transform.as_ref().ok_or_else(|| config_err("missing [transform] section"))?;
        parse_param(&t.sigma0).map_err(|e| config_err(format!("sigma0: {}", e)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
n = 1
damping = "power"
m = "1"
p = "3"
f0 = "1"

[grid]
extent = 40.0
points = 128

[run]
t_end = 4.0
stride = 4
"#;

    #[test]
    fn parses_and_builds_a_run() {
        let c = Config::parse(BASE, &[]).unwrap();
        let cfg = c.run_config(2).unwrap();
        assert_eq!(cfg.grid.points(), &[256]);
        assert_eq!(cfg.stride, 8);
        assert_eq!(cfg.t0, 1.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{}\nbogus = 1\n", BASE);
        assert!(matches!(Config::parse(&bad, &[]), Err(CliError::Config(_))));
        let bad = BASE.replace("stride = 4", "stride = 4\nstrid = 5");
        assert!(matches!(Config::parse(&bad, &[]), Err(CliError::Config(_))));
    }

    #[test]
    fn overrides_apply_before_validation() {
        let c = Config::parse(BASE, &["grid.points=64".into(), "model.m=2".into(), "charges.refine=true".into()]).unwrap();
        assert_eq!(c.grid.as_ref().unwrap().points, 64);
        assert_eq!(c.model.m.as_deref(), Some("2"));
        assert!(c.charges.refine);
        assert!(Config::parse(BASE, &["grid.nope=1".into()]).is_err());
        assert!(Config::parse(BASE, &["grid".into()]).is_err());
    }

    #[test]
    fn numeric_runs_need_concrete_parameters() {
        let c = Config::parse(BASE, &["model.p=sym".into()]).unwrap();
        assert!(matches!(c.run_config(1), Err(CliError::Config(_))));
    }
}
