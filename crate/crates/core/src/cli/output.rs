use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::norms::DiagnosticHistory;

/// 17 significant digits, enough to round-trip any `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per record: `t`, `step`, then every column in name order.
pub fn write_series_csv(path: &Path, h: &DiagnosticHistory) -> Result<()> {
    let names: Vec<&str> = h.column_names().collect();
    let cols: Vec<&[f64]> = names.iter().map(|n| h.series(n)).collect::<Result<_>>()?;
    let mut s = String::from("t,step");
    for n in &names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (k, (&t, &step)) in h.times().iter().zip(h.steps()).enumerate() {
        write!(s, "{},{step}", num(t)).unwrap();
        for c in &cols {
            write!(s, ",{}", num(c[k])).unwrap();
        }
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

fn snapshot<'a>(s: &'a SimState, name: &str) -> Result<&'a ScalarField> {
    let d = &s.derived;
    Ok(match name {
        "u" => &s.u,
        "omega_phi" => &s.omega_phi,
        "theta" => &s.theta,
        "psi" => &d.psi,
        "psi1" => &d.psi1,
        "v_r" => &d.v_r,
        "v_z" => &d.v_z,
        "v_phi" => &d.v_phi,
        "Gamma" => &d.gamma,
        _ => return Err(Error::Config(format!("unknown snapshot field `{name}`"))),
    })
}

/// `r,z,value` triples of one field.
pub fn write_snapshot_csv(path: &Path, s: &SimState, name: &str) -> Result<()> {
    let f = snapshot(s, name)?;
    let g = s.grid();
    let mut out = String::from("r,z,value\n");
    for i in 0..=g.nr() {
        for j in 0..=g.nz() {
            writeln!(out, "{},{},{}", num(g.r(i)), num(g.z(j)), num(f.get(i, j))).unwrap();
        }
    }
    fs::write(path, out)?;
    Ok(())
}
