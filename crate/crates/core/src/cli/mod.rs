//! Configuration, run orchestration and output files.

mod config;
mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

pub use config::{
    apply_override, parse_config, ChecksConfig, ConvergenceConfig, DiagnosticsConfig, GridConfig, IntegrationConfig,
    OutputConfig, PhysicsConfig, RunConfig, TheoremConfig, SNAPSHOT_FIELDS,
};
pub use output::{write_series_csv, write_snapshot_csv};

use crate::dynamics::convergence::{elliptic_ladder, evolution_ladder, ConvergenceLadder};
use crate::dynamics::{run, RunOutcome, SimState};
use crate::error::{Error, Result};
use crate::estimates::{self as est, suites, EstimateReport};
use crate::grid::Grid;
use crate::norms::DiagnosticHistory;
use crate::ops::AdvectionScheme;
use crate::scenarios::{make_scenario, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BLOW_UP: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// A finished (or aborted) integration with its recorded diagnostics.
pub struct Simulation {
    pub scenario: Scenario,
    pub history: DiagnosticHistory,
    pub outcome: RunOutcome,
}

impl Simulation {
    pub fn final_state(&self) -> &SimState {
        &self.outcome.state
    }
}

/// Builds the configured scenario on `grid` and integrates it to `t_end`.
pub fn simulate(cfg: &RunConfig, grid: Grid) -> Result<Simulation> {
    let grid = Arc::new(grid);
    let scenario = make_scenario(&cfg.scenario, &grid, &cfg.overrides)?;
    let params = cfg.params();
    let recorder = cfg.recorder()?;
    let initial = scenario.initial_state(params.elliptic_tol)?;
    let mut history = DiagnosticHistory::new();
    let mut push_err = None;
    let outcome = run(initial, &scenario.forcing, &params, cfg.integration.t_end, cfg.diagnostics.cadence, |s, k| {
        if push_err.is_none() {
            if let Err(e) = history.push(s.t, k, recorder.record(s)) {
                push_err = Some(e);
            }
        }
    });
    if let Some(e) = push_err {
        return Err(e);
    }
    Ok(Simulation { scenario, history, outcome })
}

/// Everything written to `report.json`.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub grid: [usize; 2],
    pub steps: usize,
    pub t_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub constants: BTreeMap<String, f64>,
    /// Checks that decide the exit status.
    pub checks: Vec<EstimateReport>,
    /// Empirical ratios and other logged quantities.
    pub diagnostics: Vec<EstimateReport>,
    pub pass: bool,
}

fn refinement_pair(coarse: &BTreeMap<String, est::EmpiricalRatio>, fine: &BTreeMap<String, est::EmpiricalRatio>) -> Vec<EstimateReport> {
    fine.iter()
        .filter_map(|(k, f)| coarse.get(k).map(|c| EstimateReport::refinement(format!("refinement {k}"), c.value(), f.value())))
        .collect()
}

/// Runs every applicable check on `sim`; `companion` is the same run at half
/// resolution and enables the refinement checks.
pub fn evaluate(cfg: &RunConfig, sim: &Simulation, companion: Option<&Simulation>) -> Result<RunReport> {
    let h = &sim.history;
    let forcing = &sim.scenario.forcing;
    let theorem = cfg.theorem.params();
    let nu = cfg.physics.nu;
    let dg = &cfg.diagnostics;
    let cs = est::constants_series(h, forcing, &theorem, nu)?;
    let last = cs.last().ok_or_else(|| Error::MissingSeries("history is empty".into()))?;

    let monotone_theta = cfg.integration.theta_scheme == AdvectionScheme::Upwind1;
    let monotone_swirl = cfg.integration.swirl_scheme == AdvectionScheme::Upwind1;
    let swirl_source = forcing.f0.max_abs() > 0.0;
    let mut checks = vec![est::check_mean_theta(h, forcing.g.integral())?];
    let mut diagnostics = Vec::new();
    let theta_bounds = est::check_theta_bounds(h, &cs)?;
    if monotone_theta {
        checks.push(theta_bounds);
    } else {
        diagnostics.push(theta_bounds);
    }
    checks.push(est::check_swirl_max(h, &cs, monotone_swirl)?);
    if !swirl_source {
        let m = est::check_swirl_monotone(h)?;
        if monotone_swirl {
            checks.push(m);
        } else {
            diagnostics.push(m);
        }
    }
    checks.push(est::check_energy_velocity(h, &cs, nu, dg.energy_slack)?);
    checks.push(est::check_theta_energy(h, &cs, dg.chain_slack)?);
    checks.push(est::check_vphi_sup(h, &cs, nu, dg.chain_slack)?);
    checks.push(est::check_budget(h, &theorem)?);

    let ratios = est::flow_ratios(h, last, nu)?;
    for (k, r) in &ratios {
        diagnostics.push(r.report(k.clone()));
    }
    if let Some(a3) = est::assumption3_ratio(h, theorem.d)? {
        diagnostics.push(
            EstimateReport::new("assumption3", a3, theorem.c0, 0.0, 0.0).with_note("logged only; compared against c0"),
        );
    }
    let fin = sim.final_state();
    let (psi1, gamma) = (&fin.derived.psi1, &fin.derived.gamma);
    diagnostics.push(est::check_elliptic_h2(psi1, gamma));
    diagnostics.push(est::check_elliptic_h3(psi1, gamma));
    for &mu in &cfg.theorem.mu {
        diagnostics.push(est::check_weighted_estimate(psi1, gamma, mu)?);
    }

    if let Some(c) = companion {
        let div = |s: &Simulation| s.history.max_of("div_v.Linf");
        let hf = sim.final_state().grid().h();
        checks.push(est::check_divergence(div(c)?, div(sim)?, hf, dg.divergence_floor));
        let cc = est::compute_constants(&c.history, &c.scenario.forcing, &theorem, nu)?;
        let coarse = est::flow_ratios(&c.history, &cc, nu)?;
        checks.extend(refinement_pair(&coarse, &ratios));
    }

    let mut constants = last.named();
    if let Some(cstar) = theorem.c_star {
        constants.insert("c_star".into(), cstar);
    }
    let error = sim.outcome.error.as_ref().map(|e| e.to_string());
    let pass = error.is_none() && checks.iter().all(|r| r.pass);
    let g = sim.final_state().grid();
    Ok(RunReport {
        scenario: cfg.scenario.clone(),
        parameters: sim.scenario.parameters.clone(),
        grid: [g.nr(), g.nz()],
        steps: sim.outcome.steps,
        t_final: fin.t,
        error,
        constants,
        checks,
        diagnostics,
        pass,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidParameter(format!("serializing report: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn blown_up(sim: &Simulation) -> bool {
    matches!(sim.outcome.error, Some(Error::BlowUp { .. }) | Some(Error::EllipticNonConvergence { .. }))
}

/// `run`: integrate, check, and write `series.csv`, `report.json` and snapshots.
pub fn cmd_run(cfg: &RunConfig) -> Result<i32> {
    let out = &cfg.output.dir;
    fs::create_dir_all(out)?;
    let grid = cfg.grid()?;
    let sim = simulate(cfg, grid.clone())?;
    if let Some(e) = &sim.outcome.error {
        if !blown_up(&sim) {
            return Err(Error::InvalidParameter(e.to_string()));
        }
    }

    let mut series = sim.history.clone();
    series.add_column("X", est::compute_x(&series)?)?;
    write_series_csv(&out.join("series.csv"), &series)?;
    for name in &cfg.output.fields {
        write_snapshot_csv(&out.join(format!("fields_{name}.csv")), sim.final_state(), name)?;
    }

    if blown_up(&sim) {
        let report = RunReport {
            scenario: cfg.scenario.clone(),
            parameters: sim.scenario.parameters.clone(),
            grid: [grid.nr(), grid.nz()],
            steps: sim.outcome.steps,
            t_final: sim.final_state().t,
            error: sim.outcome.error.as_ref().map(|e| e.to_string()),
            constants: BTreeMap::new(),
            checks: Vec::new(),
            diagnostics: Vec::new(),
            pass: false,
        };
        write_json(&out.join("report.json"), &report)?;
        return Ok(EXIT_BLOW_UP);
    }

    let coarse_grid = (grid.nr() / 2, grid.nz() / 2);
    let companion = if cfg.diagnostics.refinement && coarse_grid.0 >= crate::grid::MIN_CELLS && coarse_grid.1 >= crate::grid::MIN_CELLS {
        let g = Grid::new(grid.radius(), grid.half_height(), coarse_grid.0, coarse_grid.1)?;
        let c = simulate(cfg, g)?;
        if c.outcome.error.is_some() {
            None
        } else {
            Some(c)
        }
    } else {
        None
    };
    let report = evaluate(cfg, &sim, companion.as_ref())?;
    write_json(&out.join("report.json"), &report)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Contents of `check_report.json`.
#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub draws: usize,
    pub grids: [usize; 2],
    pub reports: Vec<EstimateReport>,
    pub elliptic_ladder: ConvergenceLadder,
    pub pass: bool,
}

/// The flow-free suites.
pub fn run_checks(cfg: &RunConfig) -> Result<CheckReport> {
    let c = &cfg.checks;
    let th = &cfg.theorem;
    let mut reports = suites::hardy_suite()?;
    reports.extend(suites::sobolev_suite(cfg.seed, c.draws, c.n)?);
    reports.extend(suites::hardy_interp_suite(cfg.seed, c.draws, c.n, &th.hardy_interp)?);
    reports.extend(suites::elliptic_suite(cfg.seed, c.draws, c.n, &th.mu, c.elliptic_tol)?);
    let ladder = elliptic_ladder(&[c.n, 2 * c.n], cfg.convergence.elliptic_tol)?;
    reports.push(EstimateReport::new("manufactured_elliptic_order", 1.8, ladder.min_order(), 0.0, 0.0));
    let pass = reports.iter().all(|r| r.pass);
    Ok(CheckReport { seed: cfg.seed, draws: c.draws, grids: [c.n, 2 * c.n], reports, elliptic_ladder: ladder, pass })
}

/// `check`: writes `check_report.json`.
pub fn cmd_check(cfg: &RunConfig) -> Result<i32> {
    fs::create_dir_all(&cfg.output.dir)?;
    let report = run_checks(cfg)?;
    write_json(&cfg.output.dir.join("check_report.json"), &report)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Debug, Serialize)]
pub struct ConvergenceReport {
    pub elliptic: ConvergenceLadder,
    pub evolution: ConvergenceLadder,
    pub scheme: AdvectionScheme,
    pub required_order: f64,
    pub pass: bool,
}

pub fn required_order(scheme: AdvectionScheme) -> f64 {
    match scheme {
        AdvectionScheme::Central2 => 1.8,
        AdvectionScheme::Upwind1 => 0.8,
    }
}

pub fn run_convergence(cfg: &RunConfig) -> Result<ConvergenceReport> {
    let cv = &cfg.convergence;
    let elliptic = elliptic_ladder(&cv.levels, cv.elliptic_tol)?;
    let evolution = evolution_ladder(&cv.levels, cv.scheme, cv.kappa, cv.t_end)?;
    let required = required_order(cv.scheme);
    let pass = elliptic.min_order() >= 1.8 && evolution.min_order() >= required;
    Ok(ConvergenceReport { elliptic, evolution, scheme: cv.scheme, required_order: required, pass })
}

/// `convergence`: writes `convergence_report.json`.
pub fn cmd_convergence(cfg: &RunConfig) -> Result<i32> {
    fs::create_dir_all(&cfg.output.dir)?;
    let report = run_convergence(cfg)?;
    write_json(&cfg.output.dir.join("convergence_report.json"), &report)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Maps a command result to the process exit code, printing any error.
pub fn exit_code(result: Result<i32>) -> i32 {
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests;
