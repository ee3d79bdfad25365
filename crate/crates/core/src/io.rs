//! Scenario files and report serialization.
//!
//! A scenario is a JSON object:
//!
//! ```json
//! {
//!   "M": 2, "K_I": 1, "K_E": 1,
//!   "channels_h": [[[0.001, 0.0], [0.0, -0.0005]]],
//!   "channels_g": [[[0.03, 0.01], [0.02, 0.0]]],
//!   "sigma2_dbm": -50,
//!   "gamma_db": 10,
//!   "alpha": [1.0],
//!   "zeta": 0.5,
//!   "power_w": 1.0
//! }
//! ```
//!
//! Channels are row vectors given as `[re, im]` pairs, one row per receiver.
//! Exactly one of `sigma2_dbm` / `sigma2_w` and one of `gamma_db` /
//! `gamma_linear` must be present; each may be a scalar applied to every ID
//! receiver or a per-receiver list. `alpha` defaults to `1/K_E` each and
//! `zeta` to 1. Decibel values are converted to linear units on load.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};
use crate::model::{ReceiverType, Scenario, SolveReport};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn expand(self, n: usize, key: &str) -> Result<Vec<f64>> {
        match self {
            OneOrMany::One(v) => Ok(vec![v; n]),
            OneOrMany::Many(v) if v.len() == n => Ok(v),
            OneOrMany::Many(v) => Err(Error::Parse(format!(
                "{key} has {} entries, expected {n}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "K_I")]
    k_i: usize,
    #[serde(rename = "K_E")]
    k_e: usize,
    channels_h: Vec<Vec<[f64; 2]>>,
    channels_g: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma2_dbm: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma2_w: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_db: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_linear: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zeta: Option<f64>,
    power_w: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

fn channels(rows: Vec<Vec<[f64; 2]>>, m: usize, count: usize, key: &str) -> Result<Vec<CVector>> {
    if rows.len() != count {
        return Err(Error::Parse(format!(
            "{key} has {} rows, expected {count}",
            rows.len()
        )));
    }
    rows.into_iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != m {
                return Err(Error::Parse(format!(
                    "{key} row {r} has {} entries, expected M = {m}",
                    row.len()
                )));
            }
            Ok(CVector::from_iterator(
                m,
                row.into_iter().map(|[re, im]| C64::new(re, im)),
            ))
        })
        .collect()
}

fn pick(a: Option<OneOrMany>, b: Option<OneOrMany>, names: [&str; 2]) -> Result<(OneOrMany, bool)> {
    match (a, b) {
        (Some(v), None) => Ok((v, true)),
        (None, Some(v)) => Ok((v, false)),
        (Some(_), Some(_)) => Err(Error::Parse(format!(
            "give only one of {} and {}",
            names[0], names[1]
        ))),
        (None, None) => Err(Error::Parse(format!(
            "missing {} or {}",
            names[0], names[1]
        ))),
    }
}

/// Parses a scenario document. Syntax errors carry line and column.
pub fn scenario_from_str(text: &str) -> Result<Scenario> {
    let f: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let h = channels(f.channels_h, f.m, f.k_i, "channels_h")?;
    let g = channels(f.channels_g, f.m, f.k_e, "channels_g")?;
    let (sigma, in_dbm) = pick(f.sigma2_dbm, f.sigma2_w, ["sigma2_dbm", "sigma2_w"])?;
    let mut sigma2 = sigma.expand(f.k_i, "sigma2")?;
    if in_dbm {
        sigma2.iter_mut().for_each(|v| *v = dbm_to_watts(*v));
    }
    let (gamma, in_db) = pick(f.gamma_db, f.gamma_linear, ["gamma_db", "gamma_linear"])?;
    let mut gamma = gamma.expand(f.k_i, "gamma")?;
    if in_db {
        gamma.iter_mut().for_each(|v| *v = db_to_linear(*v));
    }
    let alpha = f
        .alpha
        .unwrap_or_else(|| vec![1.0 / f.k_e.max(1) as f64; f.k_e]);
    Scenario::new(
        f.m,
        h,
        g,
        sigma2,
        gamma,
        alpha,
        f.zeta.unwrap_or(1.0),
        f.power_w,
    )
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    scenario_from_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn pairs(v: &[CVector]) -> Vec<Vec<[f64; 2]>> {
    v.iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Serializes a scenario in linear units (`sigma2_w`, `gamma_linear`).
pub fn scenario_to_string(s: &Scenario) -> Result<String> {
    let f = ScenarioFile {
        m: s.m,
        k_i: s.k_i(),
        k_e: s.k_e(),
        channels_h: pairs(&s.h),
        channels_g: pairs(&s.g),
        sigma2_dbm: None,
        sigma2_w: Some(OneOrMany::Many(s.sigma2.clone())),
        gamma_db: None,
        gamma_linear: Some(OneOrMany::Many(s.gamma.clone())),
        alpha: Some(s.alpha.clone()),
        zeta: Some(s.zeta),
        power_w: s.power,
    };
    serde_json::to_string_pretty(&f).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_scenario(path: &Path, s: &Scenario) -> Result<()> {
    std::fs::write(path, scenario_to_string(s)? + "\n")?;
    Ok(())
}

/// Structured form of a [`SolveReport`].
pub fn report_to_json(r: &SolveReport, receiver: ReceiverType) -> Value {
    json!({
        "receiver": receiver.label(),
        "region": r.region.label(),
        "objective_w": r.objective,
        "per_id_sinr": r.per_id_sinr,
        "per_id_sinr_db": r.per_id_sinr.iter().map(|&v| linear_to_db(v)).collect::<Vec<_>>(),
        "per_eh_power_w": r.per_eh_power,
        "total_power_w": r.total_power,
        "energy_beam_power_w": r.energy_beam_power,
        "dual_beta": r.dual_beta,
        "uplink_lambdas": r.uplink_lambdas,
        "iterations": r.iterations,
        "info_beams": pairs(&r.solution.info),
        "energy_beams": pairs(&r.solution.energy),
    })
}
