use std::fs;

use super::*;

fn cfg(text: &str, overrides: &[&str]) -> Result<RunConfig> {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    parse_config(text, &o)
}

fn small(scenario: &str, dir: &Path) -> RunConfig {
    let text = format!("scenario = \"{scenario}\"\n[grid]\nnr = 8\nnz = 16\n[integration]\nt_end = 0.02\n");
    let mut c = cfg(&text, &[]).unwrap();
    c.output.dir = dir.to_path_buf();
    c
}

#[test]
fn minimal_config_uses_defaults() {
    let c = cfg("scenario = \"zero\"", &[]).unwrap();
    assert_eq!(c.grid.nr, 32);
    assert_eq!(c.grid.nz, 64);
    assert_eq!(c.integration.cfl_adv, 0.4);
    assert_eq!(c.integration.cfl_diff, 0.25);
    assert_eq!(c.integration.swirl_scheme, AdvectionScheme::Upwind1);
    assert_eq!(c.theorem.d, 6.0);
    assert_eq!(c.theorem.mu, vec![0.25, 0.5, 0.75]);
    assert_eq!(c.seed, 0);
}

#[test]
fn semantic_errors_name_the_rule() {
    let e = cfg("scenario = \"zero\"\n[theorem]\nd = 3.0\n", &[]).unwrap_err();
    assert!(e.to_string().contains("d must exceed 3"), "{e}");
    assert_eq!(e.exit_code(), EXIT_CONFIG);
    let e = cfg("scenario = \"zero\"\n[grid]\nnr = 4\n", &[]).unwrap_err();
    assert!(e.to_string().contains("nr = 4"), "{e}");
    let e = cfg("scenario = \"zero\"\n[theorem]\nmu = 1.2\n", &[]).unwrap_err();
    assert!(e.to_string().contains("(0, 1)"), "{e}");
    let e = cfg("scenario = \"zero\"\n[convergence]\nlevels = [32]\n", &[]).unwrap_err();
    assert!(e.to_string().contains("at least 2 grids"), "{e}");
    let e = cfg("scenario = \"nope\"", &[]).unwrap_err();
    assert!(e.to_string().contains("unknown scenario"), "{e}");
    let e = cfg("scenario = \"zero\"\n[theorem]\nhardy_interp = [[2.0, 1.0, 4.1]]\n", &[]).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
}

#[test]
fn unknown_keys_are_errors() {
    for text in [
        "scenario = \"zero\"\nsed = 1\n",
        "scenario = \"zero\"\n[grid]\nnrr = 16\n",
        "scenario = \"zero\"\n[theorem]\nepsilon3 = 0.1\n",
        "scenario = \"zero\"\n[colour]\n",
    ] {
        let e = cfg(text, &[]).unwrap_err();
        assert!(e.to_string().contains("unknown field"), "{text}: {e}");
    }
}

#[test]
fn syntax_errors_carry_a_line_number() {
    let e = cfg("scenario = \"zero\"\n[grid]\nnr = = 3\n", &[]).unwrap_err();
    assert!(e.to_string().contains("line 3"), "{e}");
}

#[test]
fn overrides_set_nested_keys() {
    let c = cfg("scenario = \"zero\"", &["grid.nr=16", "scenario=decaying_swirl", "overrides.amplitude=2", "theorem.mu=[0.5]"]).unwrap();
    assert_eq!(c.grid.nr, 16);
    assert_eq!(c.scenario, "decaying_swirl");
    assert_eq!(c.overrides["amplitude"], 2.0);
    assert_eq!(c.theorem.mu, vec![0.5]);
    assert!(cfg("scenario = \"zero\"", &["grid.nr"]).is_err());
    assert!(cfg("scenario = \"zero\"", &["scenario.x=1"]).is_err());
}

#[test]
fn zero_scenario_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small("zero", dir.path());
    c.output.fields = vec!["theta".into(), "u".into()];
    assert_eq!(cmd_run(&c).unwrap(), EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let xi = header.iter().position(|&h| h == "X").unwrap();
    assert!(header.contains(&"div_v.Linf") && header.contains(&"theta.min") && header.contains(&"u.Linf"));
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').nth(xi).unwrap().parse::<f64>().unwrap(), 0.0);
    }
    let snap = fs::read_to_string(dir.path().join("fields_theta.csv")).unwrap();
    assert_eq!(snap.lines().count(), 1 + 9 * 17);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
}

#[test]
fn unknown_scenario_parameter_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small("zero", dir.path());
    c.overrides.insert("amplitude".into(), 1.0);
    assert_eq!(exit_code(cmd_run(&c)), EXIT_CONFIG);
}

#[test]
fn oversized_step_blows_up() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small("decaying_swirl", dir.path());
    c.integration.dt = Some(1.0);
    c.integration.t_end = 1000.0;
    assert_eq!(cmd_run(&c).unwrap(), EXIT_BLOW_UP);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["error"].as_str().unwrap().contains("blow-up"));
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(cmd_run(&small("buoyant_cell", d.path())).unwrap(), EXIT_OK);
    }
    for f in ["series.csv", "report.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn series_values_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = small("heated_swirl", dir.path());
    let sim = simulate(&c, c.grid().unwrap()).unwrap();
    write_series_csv(&dir.path().join("s.csv"), &sim.history).unwrap();
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let k = header.iter().position(|&h| h == "u.Linf").unwrap();
    let parsed: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect();
    assert_eq!(parsed, sim.history.series("u.Linf").unwrap());
}

#[test]
fn check_and_convergence_commands() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("scenario = \"zero\"\n[checks]\ndraws = 3\nn = 16\n[convergence]\nlevels = [8, 16]\nscheme = \"upwind1\"\n", &[]).unwrap();
    c.output.dir = dir.path().to_path_buf();
    assert_eq!(cmd_check(&c).unwrap(), EXIT_OK);
    assert!(dir.path().join("check_report.json").exists());
    assert_eq!(cmd_convergence(&c).unwrap(), EXIT_OK);
    let r = run_convergence(&c).unwrap();
    assert!(r.evolution.min_order() > 0.8 && r.evolution.min_order() < 1.6, "{:?}", r.evolution);
}
