use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{grad_sq, lp_norm, Exponent};
use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::field::{Parity, ScalarField};
use crate::ops::{ddr, ddz, divergence_cyl};

/// Fields whose `L_p` norms can be tracked per record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackedField {
    /// Full velocity vector (pointwise Euclidean magnitude).
    V,
    VR,
    VPhi,
    VZ,
    U,
    Theta,
    #[serde(rename = "Phi")]
    Phi,
    #[serde(rename = "Gamma")]
    Gamma,
    OmegaR,
    OmegaZ,
    OmegaPhi,
    /// `∇u` as a vector `(u_r, u_z)`.
    GradU,
    Psi,
    Psi1,
}

impl TrackedField {
    pub const ALL: [TrackedField; 14] = [
        TrackedField::V,
        TrackedField::VR,
        TrackedField::VPhi,
        TrackedField::VZ,
        TrackedField::U,
        TrackedField::Theta,
        TrackedField::Phi,
        TrackedField::Gamma,
        TrackedField::OmegaR,
        TrackedField::OmegaZ,
        TrackedField::OmegaPhi,
        TrackedField::GradU,
        TrackedField::Psi,
        TrackedField::Psi1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrackedField::V => "v",
            TrackedField::VR => "v_r",
            TrackedField::VPhi => "v_phi",
            TrackedField::VZ => "v_z",
            TrackedField::U => "u",
            TrackedField::Theta => "theta",
            TrackedField::Phi => "Phi",
            TrackedField::Gamma => "Gamma",
            TrackedField::OmegaR => "omega_r",
            TrackedField::OmegaZ => "omega_z",
            TrackedField::OmegaPhi => "omega_phi",
            TrackedField::GradU => "grad_u",
            TrackedField::Psi => "psi",
            TrackedField::Psi1 => "psi1",
        }
    }

    /// Components whose pointwise Euclidean magnitude defines the field.
    fn components(self, s: &SimState) -> Vec<ScalarField> {
        let d = &s.derived;
        match self {
            TrackedField::V => vec![d.v_r.clone(), d.v_phi.clone(), d.v_z.clone()],
            TrackedField::VR => vec![d.v_r.clone()],
            TrackedField::VPhi => vec![d.v_phi.clone()],
            TrackedField::VZ => vec![d.v_z.clone()],
            TrackedField::U => vec![s.u.clone()],
            TrackedField::Theta => vec![s.theta.clone()],
            TrackedField::Phi => vec![d.phi.clone()],
            TrackedField::Gamma => vec![d.gamma.clone()],
            TrackedField::OmegaR => vec![d.omega_r.clone()],
            TrackedField::OmegaZ => vec![d.omega_z.clone()],
            TrackedField::OmegaPhi => vec![s.omega_phi.clone()],
            TrackedField::GradU => vec![ddr(&s.u), ddz(&s.u)],
            TrackedField::Psi => vec![d.psi.clone()],
            TrackedField::Psi1 => vec![d.psi1.clone()],
        }
    }
}

/// Column name of the spatial `L_p` norm of `field`.
pub(crate) fn lp_column(field: &str, p: Exponent) -> String {
    format!("{field}.L{p}")
}

fn magnitude(parts: &[ScalarField]) -> ScalarField {
    if parts.len() == 1 {
        return parts[0].clone();
    }
    let mut sq = parts[0].map(|v| v * v).with_parity(Parity::Even);
    for p in &parts[1..] {
        sq = sq.zip_map(p, Parity::Even, |a, b| a + b * b);
    }
    sq.map(f64::sqrt)
}

/// Computes one diagnostic record from a state.
#[derive(Debug, Clone, Serialize)]
pub struct Recorder {
    pub fields: Vec<TrackedField>,
    pub exponents: Vec<Exponent>,
    /// Integrability exponent `d` for `v_φ`; `|v_φ|_d` is always recorded.
    pub d: Exponent,
}

impl Recorder {
    pub fn default_exponents(d: f64) -> Vec<Exponent> {
        let mut ps: Vec<Exponent> = [1.0, 2.0, 3.0, 1.2, 10.0 / 7.0, 1.5, d]
            .iter()
            .map(|&p| Exponent::new(p).expect("valid default exponent"))
            .collect();
        ps.push(Exponent::INF);
        ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ps.dedup();
        ps
    }

    pub fn new(fields: Vec<TrackedField>, exponents: Vec<Exponent>, d: f64) -> Result<Self> {
        Ok(Recorder { fields, exponents, d: Exponent::new(d)? })
    }

    pub fn record(&self, s: &SimState) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let d = &s.derived;
        for &f in &self.fields {
            let parts = f.components(s);
            let mag = magnitude(&parts);
            for &p in &self.exponents {
                m.insert(lp_column(f.name(), p), lp_norm(&mag, p));
            }
            m.insert(format!("{}.grad2", f.name()), parts.iter().map(grad_sq).sum::<f64>().sqrt());
        }

        let l2 = Exponent::new(2.0).unwrap();
        let comps = [&d.v_r, &d.v_phi, &d.v_z];
        m.insert("v.sq".into(), comps.iter().map(|c| lp_norm(c, l2).powi(2)).sum());
        m.insert("grad_v.sq".into(), comps.iter().map(|c| grad_sq(c)).sum());
        let g = s.grid();
        let mut metric = 0.0;
        for i in 1..=g.nr() {
            let r2 = g.r(i) * g.r(i);
            for j in 0..=g.nz() {
                metric += g.weight(i, j) * (d.v_r.get(i, j).powi(2) + d.v_phi.get(i, j).powi(2)) / r2;
            }
        }
        m.insert("v_metric.sq".into(), metric);

        m.insert("theta.min".into(), s.theta.min());
        m.insert("theta.max".into(), s.theta.max());
        m.insert("theta.integral".into(), s.theta.integral());
        let put = |m: &mut BTreeMap<String, f64>, name: &str, f: &ScalarField| {
            m.insert(format!("{name}.L2"), lp_norm(f, l2));
            m.insert(format!("{name}.grad2"), grad_sq(f).sqrt());
        };
        put(&mut m, "theta", &s.theta);
        put(&mut m, "Phi", &d.phi);
        put(&mut m, "Gamma", &d.gamma);
        put(&mut m, "omega_r", &d.omega_r);
        put(&mut m, "omega_z", &d.omega_z);
        put(&mut m, "omega_phi", &s.omega_phi);
        put(&mut m, "psi1", &d.psi1);
        let u_z = ddz(&s.u);
        let u_r = ddr(&s.u);
        put(&mut m, "u_z", &u_z);
        put(&mut m, "u_r", &u_r);
        m.insert("u_rr.L2".into(), lp_norm(&ddr(&u_r), l2));
        m.insert("u_rz.L2".into(), lp_norm(&ddz(&u_r), l2));
        m.insert("u.Linf".into(), s.u.max_abs());
        m.insert("v_phi.Linf".into(), d.v_phi.max_abs());
        m.insert(lp_column("v_phi", self.d), lp_norm(&d.v_phi, self.d));
        m.insert("v_phi.L2".into(), lp_norm(&d.v_phi, l2));
        m.insert("u.L2".into(), lp_norm(&s.u, l2));

        let psi_sq = lp_norm(&d.psi, l2).powi(2) + grad_sq(&d.psi);
        m.insert("psi.H1".into(), psi_sq.sqrt());
        let psi_z = ddz(&d.psi);
        m.insert("psi_z.H1".into(), (lp_norm(&psi_z, l2).powi(2) + grad_sq(&psi_z)).sqrt());
        let psi1_z = ddz(&d.psi1);
        m.insert("psi1_z.L2".into(), lp_norm(&psi1_z, l2));
        m.insert("Gamma_z.L2".into(), lp_norm(&ddz(&d.gamma), l2));
        m.insert("div_v.Linf".into(), divergence_cyl(&d.v_r, &d.v_z).max_abs());
        m
    }
}

/// Time series of named diagnostics, one row per record.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DiagnosticHistory {
    times: Vec<f64>,
    steps: Vec<usize>,
    columns: BTreeMap<String, Vec<f64>>,
}

impl DiagnosticHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, step: usize, record: BTreeMap<String, f64>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidParameter(format!("record time {t} does not follow {last}")));
            }
            if record.len() != self.columns.len() || record.keys().zip(self.columns.keys()).any(|(a, b)| a != b) {
                return Err(Error::InvalidParameter("record columns differ from the history's".into()));
            }
        }
        self.times.push(t);
        self.steps.push(step);
        for (k, v) in record {
            self.columns.entry(k).or_default().push(v);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }
    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn series(&self, name: &str) -> Result<&[f64]> {
        self.columns.get(name).map(Vec::as_slice).ok_or_else(|| Error::MissingSeries(name.to_string()))
    }

    /// First recorded value of a series.
    pub fn initial(&self, name: &str) -> Result<f64> {
        self.series(name)?.first().copied().ok_or_else(|| Error::MissingSeries(format!("{name} (empty history)")))
    }

    /// Largest recorded value of a series.
    pub fn max_of(&self, name: &str) -> Result<f64> {
        Ok(self.series(name)?.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn min_of(&self, name: &str) -> Result<f64> {
        Ok(self.series(name)?.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Appends a derived column computed from each row index.
    pub fn add_column(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::InvalidParameter(format!("column {name} has {} values for {} records", values.len(), self.len())));
        }
        self.columns.insert(name.to_string(), values);
        Ok(())
    }
}
