use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use crate::dynamics::Params;
use crate::error::{Error, Result};
use crate::estimates::{hardy_interp_exponents, suites, TheoremParams, CHAIN_SLACK, ENERGY_SLACK};
use crate::grid::Grid;
use crate::norms::{Exponent, Recorder, TrackedField};
use crate::ops::AdvectionScheme;
use crate::scenarios::SCENARIO_NAMES;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    /// Scenario parameters, e.g. `amplitude` or `buoyancy`.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub theorem: TheoremConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub radius: f64,
    pub half_height: f64,
    pub nr: usize,
    pub nz: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { radius: 1.0, half_height: 1.0, nr: 32, nz: 64 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub nu: f64,
    pub kappa: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig { nu: 0.1, kappa: 0.1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationConfig {
    pub t_end: f64,
    pub cfl_adv: f64,
    pub cfl_diff: f64,
    /// Fixed step; skips the stability bound entirely.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub swirl_scheme: AdvectionScheme,
    pub theta_scheme: AdvectionScheme,
    pub omega_scheme: AdvectionScheme,
    pub elliptic_tol: f64,
    pub freeze_flow: bool,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        let p = Params::default();
        IntegrationConfig {
            t_end: 0.1,
            cfl_adv: p.cfl_adv,
            cfl_diff: p.cfl_diff,
            dt: None,
            swirl_scheme: p.swirl_scheme,
            theta_scheme: p.theta_scheme,
            omega_scheme: p.omega_scheme,
            elliptic_tol: p.elliptic_tol,
            freeze_flow: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Record every `cadence`-th step (the last step is always recorded).
    pub cadence: usize,
    pub fields: Vec<TrackedField>,
    /// Defaults to `{1, 2, 3, 6/5, 10/7, 3/2, d, ∞}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<Exponent>>,
    pub energy_slack: f64,
    pub chain_slack: f64,
    /// Repeat the run at half resolution for the refinement checks.
    pub refinement: bool,
    /// Divergence below this is treated as round-off.
    pub divergence_floor: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        use TrackedField::*;
        DiagnosticsConfig {
            cadence: 1,
            fields: vec![V, VPhi, U, Theta, Phi, Gamma, OmegaR, OmegaZ, GradU, Psi, Psi1],
            exponents: None,
            energy_slack: ENERGY_SLACK,
            chain_slack: CHAIN_SLACK,
            refinement: true,
            divergence_floor: 1e-12,
        }
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::One(v) => vec![v],
        Raw::Many(v) => v,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremConfig {
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub d: f64,
    pub c0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_star: Option<f64>,
    /// Weights `μ` of the weighted elliptic estimate; a single number is accepted.
    #[serde(deserialize_with = "one_or_many")]
    pub mu: Vec<f64>,
    /// `(p, s, q)` triples for the Hardy interpolation suite.
    pub hardy_interp: Vec<(f64, f64, f64)>,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        let t = TheoremParams::default();
        TheoremConfig {
            epsilon0: t.epsilon0,
            epsilon1: t.epsilon1,
            epsilon2: t.epsilon2,
            d: t.d,
            c0: t.c0,
            c_star: None,
            mu: vec![0.25, 0.5, 0.75],
            hardy_interp: suites::hardy_interp_params(),
        }
    }
}

impl TheoremConfig {
    pub fn params(&self) -> TheoremParams {
        TheoremParams {
            epsilon0: self.epsilon0,
            epsilon1: self.epsilon1,
            epsilon2: self.epsilon2,
            d: self.d,
            c0: self.c0,
            c_star: self.c_star,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    /// Random fields per suite.
    pub draws: usize,
    /// Coarse grid of each refinement pair; the fine one is twice as dense.
    pub n: usize,
    pub elliptic_tol: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig { draws: 20, n: 16, elliptic_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub levels: Vec<usize>,
    pub scheme: AdvectionScheme,
    pub kappa: f64,
    pub t_end: f64,
    pub elliptic_tol: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig { levels: vec![16, 32, 64], scheme: AdvectionScheme::Central2, kappa: 0.1, t_end: 0.05, elliptic_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Final-state snapshots written as `fields_<name>.csv`.
    pub fields: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), fields: Vec::new() }
    }
}

pub const SNAPSHOT_FIELDS: [&str; 9] = ["u", "omega_phi", "theta", "psi", "psi1", "v_r", "v_z", "v_phi", "Gamma"];

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses and validates a TOML config, applying `key.path=value` overrides first.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err(format!("syntax error: {e}")))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: RunConfig = table.try_into().map_err(|e: toml::de::Error| config_err(e.to_string().trim_end().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Sets `a.b.c = value` in the table; the value is read as TOML and falls
/// back to a plain string.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| config_err(format!("override `{spec}` is not of the form key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').map(str::trim).collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(config_err(format!("override `{spec}` has an empty key")));
    }
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut cur = table;
    for k in &keys[..keys.len() - 1] {
        let entry = cur.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| config_err(format!("override `{spec}`: `{k}` is not a section")))?;
    }
    cur.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !SCENARIO_NAMES.contains(&self.scenario.as_str()) {
            return Err(config_err(format!("unknown scenario `{}` (expected one of {})", self.scenario, SCENARIO_NAMES.join(", "))));
        }
        self.grid()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_err(format!("{name} must be positive (got {v})")))
            }
        };
        positive("physics.nu", self.physics.nu)?;
        positive("physics.kappa", self.physics.kappa)?;
        let it = &self.integration;
        if !(it.t_end >= 0.0 && it.t_end.is_finite()) {
            return Err(config_err(format!("integration.t_end must be nonnegative (got {})", it.t_end)));
        }
        positive("integration.cfl_adv", it.cfl_adv)?;
        positive("integration.cfl_diff", it.cfl_diff)?;
        positive("integration.elliptic_tol", it.elliptic_tol)?;
        if let Some(dt) = it.dt {
            positive("integration.dt", dt)?;
        }
        let dg = &self.diagnostics;
        if dg.cadence == 0 {
            return Err(config_err("diagnostics.cadence must be at least 1"));
        }
        positive("diagnostics.energy_slack", dg.energy_slack)?;
        positive("diagnostics.chain_slack", dg.chain_slack)?;
        if !(dg.divergence_floor >= 0.0) {
            return Err(config_err("diagnostics.divergence_floor must be nonnegative"));
        }
        self.theorem.params().validate()?;
        if self.theorem.mu.is_empty() {
            return Err(config_err("theorem.mu needs at least one value"));
        }
        for &mu in &self.theorem.mu {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(config_err(format!("theorem.mu must lie in (0, 1) (got {mu})")));
            }
        }
        for &(p, s, q) in &self.theorem.hardy_interp {
            hardy_interp_exponents(p, s, q).map_err(|e| config_err(format!("theorem.hardy_interp ({p}, {s}, {q}): {e}")))?;
        }
        if self.checks.draws == 0 {
            return Err(config_err("checks.draws must be at least 1"));
        }
        Grid::new(1.0, 1.0, self.checks.n, self.checks.n)?;
        positive("checks.elliptic_tol", self.checks.elliptic_tol)?;
        let cv = &self.convergence;
        if cv.levels.len() < 2 {
            return Err(config_err("convergence.levels needs at least 2 grids"));
        }
        if cv.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("convergence.levels must be strictly increasing"));
        }
        Grid::new(1.0, 1.0, cv.levels[0], cv.levels[0])?;
        positive("convergence.kappa", cv.kappa)?;
        positive("convergence.t_end", cv.t_end)?;
        positive("convergence.elliptic_tol", cv.elliptic_tol)?;
        for f in &self.output.fields {
            if !SNAPSHOT_FIELDS.contains(&f.as_str()) {
                return Err(config_err(format!("unknown snapshot field `{f}` (expected one of {})", SNAPSHOT_FIELDS.join(", "))));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        Grid::new(g.radius, g.half_height, g.nr, g.nz)
    }

    pub fn params(&self) -> Params {
        let it = &self.integration;
        Params {
            nu: self.physics.nu,
            kappa: self.physics.kappa,
            swirl_scheme: it.swirl_scheme,
            theta_scheme: it.theta_scheme,
            omega_scheme: it.omega_scheme,
            cfl_adv: it.cfl_adv,
            cfl_diff: it.cfl_diff,
            dt: it.dt,
            elliptic_tol: it.elliptic_tol,
            freeze_flow: it.freeze_flow,
        }
    }

    pub fn recorder(&self) -> Result<Recorder> {
        let d = self.theorem.d;
        let exps = self.diagnostics.exponents.clone().unwrap_or_else(|| Recorder::default_exponents(d));
        Recorder::new(self.diagnostics.fields.clone(), exps, d)
    }
}

