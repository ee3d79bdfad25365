//! Seeded Monte-Carlo sweeps over SINR targets.
//!
//! Every trial draws one channel realization from `(seed, trial)` and keeps
//! it across the whole γ grid, so feasible sets shrink monotonically as γ
//! grows. Trials run through [`crate::par::map_indexed`]; aggregation walks
//! the records in trial order and is independent of the execution mode.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::baselines::{separate_design_type1, separate_design_type2};
use crate::duality::{DualProblem, SolverOptions};
use crate::error::{Error, Result};
use crate::io::{db_to_linear, dbm_to_watts};
use crate::linalg::{CVector, C64};
use crate::model::{Region, Scenario};
use crate::par::{map_indexed, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    JointType1,
    JointType2,
    SeparateType1,
    SeparateType2,
}

impl Design {
    pub const ALL: [Design; 4] = [
        Design::JointType1,
        Design::JointType2,
        Design::SeparateType1,
        Design::SeparateType2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Design::JointType1 => "joint_type1",
            Design::JointType2 => "joint_type2",
            Design::SeparateType1 => "separate_type1",
            Design::SeparateType2 => "separate_type2",
        }
    }

    fn is_joint(self) -> bool {
        matches!(self, Design::JointType1 | Design::JointType2)
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Design::ALL
            .into_iter()
            .find(|d| d.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown design '{s}'")))
    }
}

fn default_grid() -> Vec<f64> {
    (0..=16).map(|k| -10.0 + 2.5 * k as f64).collect()
}

/// Monte-Carlo setup. Keys match the TOML config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub k_i: usize,
    pub k_e: usize,
    pub gamma_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub eh_attenuation_db: f64,
    pub id_attenuation_db: f64,
    pub power_w: f64,
    pub zeta: f64,
    pub sigma2_dbm: f64,
    /// Energy weights; equal weights `1/K_E` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    pub designs: Vec<Design>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 4,
            k_i: 2,
            k_e: 2,
            gamma_db: default_grid(),
            trials: 200,
            seed: 1,
            eh_attenuation_db: 30.0,
            id_attenuation_db: 70.0,
            power_w: 1.0,
            zeta: 0.5,
            sigma2_dbm: -50.0,
            alpha: None,
            designs: vec![Design::JointType1, Design::JointType2],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.m == 0 {
            return bad("m must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.gamma_db.is_empty() || self.gamma_db.iter().any(|g| !g.is_finite()) {
            return bad("gamma_db must be a non-empty list of finite values".into());
        }
        if self.designs.is_empty() {
            return bad("designs must not be empty".into());
        }
        if !(self.power_w > 0.0 && self.power_w.is_finite()) {
            return bad(format!("power_w must be positive, got {}", self.power_w));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return bad(format!("zeta must lie in (0, 1], got {}", self.zeta));
        }
        let finite = [
            self.eh_attenuation_db,
            self.id_attenuation_db,
            self.sigma2_dbm,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("attenuations and sigma2_dbm must be finite".into());
        }
        if let Some(a) = &self.alpha {
            if a.len() != self.k_e || a.iter().any(|&x| !(x >= 0.0)) {
                return bad(format!(
                    "alpha needs {} nonnegative weights, got {a:?}",
                    self.k_e
                ));
            }
        }
        Ok(())
    }

    fn alpha(&self) -> Vec<f64> {
        self.alpha
            .clone()
            .unwrap_or_else(|| vec![1.0 / self.k_e.max(1) as f64; self.k_e])
    }
}

fn rayleigh(rng: &mut ChaCha8Rng, m: usize, power: f64) -> CVector {
    let sd = (power / 2.0).sqrt();
    CVector::from_fn(m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(sd * re, sd * im)
    })
}

/// Channel realization `trial` with SINR targets at `gamma_db`.
pub fn gen_scenario_at(cfg: &ExperimentConfig, trial: usize, gamma_db: f64) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let id_gain = db_to_linear(-cfg.id_attenuation_db);
    let eh_gain = db_to_linear(-cfg.eh_attenuation_db);
    let h = (0..cfg.k_i)
        .map(|_| rayleigh(&mut rng, cfg.m, id_gain))
        .collect();
    let g = (0..cfg.k_e)
        .map(|_| rayleigh(&mut rng, cfg.m, eh_gain))
        .collect();
    Scenario::new(
        cfg.m,
        h,
        g,
        vec![dbm_to_watts(cfg.sigma2_dbm); cfg.k_i],
        vec![db_to_linear(gamma_db); cfg.k_i],
        cfg.alpha(),
        cfg.zeta,
        cfg.power_w,
    )
}

/// Channel realization `trial` at the first grid point.
pub fn gen_scenario(cfg: &ExperimentConfig, trial: usize) -> Result<Scenario> {
    gen_scenario_at(cfg, trial, cfg.gamma_db[0])
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Solved {
        objective_w: f64,
        /// Power on dedicated energy beams.
        q_w: f64,
        region: Option<Region>,
    },
    Infeasible,
    Inapplicable,
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub gamma_db: f64,
    pub design: Design,
    pub outcome: Outcome,
}

impl TrialRecord {
    pub fn objective(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Solved { objective_w, .. } => Some(objective_w),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RegionCounts {
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
    pub na: usize,
}

impl RegionCounts {
    fn add(&mut self, r: Region) {
        match r {
            Region::R1 => self.r1 += 1,
            Region::R2 => self.r2 += 1,
            Region::R3 => self.r3 += 1,
            Region::NA => self.na += 1,
        }
    }
}

impl fmt::Display for RegionCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R1:{};R2:{};R3:{};NA:{}",
            self.r1, self.r2, self.r3, self.na
        )
    }
}

impl FromStr for RegionCounts {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = RegionCounts::default();
        for part in s.split(';') {
            let (k, v) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad region count '{part}'")))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad region count '{part}'")))?;
            match k {
                "R1" => out.r1 = v,
                "R2" => out.r2 = v,
                "R3" => out.r3 = v,
                "NA" => out.na = v,
                _ => return Err(Error::Parse(format!("unknown region '{k}'"))),
            }
        }
        Ok(out)
    }
}

/// One aggregated grid point. Means are over solved trials only; `None`
/// marks a flagged row with no solved trial.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub gamma_db: f64,
    pub design: Design,
    pub mean_mw: Option<f64>,
    pub std_mw: Option<f64>,
    pub feasible_rate: f64,
    pub mean_q_w: Option<f64>,
    pub region_counts: RegionCounts,
}

impl SweepRow {
    pub fn flagged(&self) -> bool {
        self.mean_mw.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub records: Vec<TrialRecord>,
}

pub const CSV_HEADER: [&str; 7] = [
    "gamma_db",
    "design",
    "mean_mw",
    "std_mw",
    "feasible_rate",
    "mean_q_w",
    "region_counts",
];

/// Pairwise summation, fixed by input order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().fold(0.0, |a, b| a + b);
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| pairwise_sum(v) / v.len() as f64)
}

/// Sample standard deviation (zero for a single value).
fn std_dev(v: &[f64]) -> Option<f64> {
    let mu = mean(v)?;
    if v.len() < 2 {
        return Some(0.0);
    }
    let sq: Vec<f64> = v.iter().map(|x| (x - mu) * (x - mu)).collect();
    Some((pairwise_sum(&sq) / (v.len() - 1) as f64).sqrt())
}

impl SweepTable {
    pub fn row(&self, gamma_db: f64, design: Design) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.gamma_db == gamma_db && r.design == design)
    }

    pub fn designs(&self) -> Vec<Design> {
        let mut d: Vec<Design> = self.rows.iter().map(|r| r.design).collect();
        d.sort();
        d.dedup();
        d
    }

    pub fn grid(&self) -> Vec<f64> {
        let mut g: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !g.contains(&r.gamma_db) {
                g.push(r.gamma_db);
            }
        }
        g
    }

    /// Objective of one trial at one grid point, if solved.
    pub fn trial_value(&self, trial: usize, gamma_db: f64, design: Design) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.trial == trial && r.gamma_db == gamma_db && r.design == design)
            .and_then(TrialRecord::objective)
    }

    /// Rebuilds the aggregate rows from the per-trial records.
    pub fn aggregate(
        records: Vec<TrialRecord>,
        grid: &[f64],
        designs: &[Design],
        trials: usize,
    ) -> Self {
        let mut rows = Vec::with_capacity(grid.len() * designs.len());
        for &gamma in grid {
            for &design in designs {
                let mine: Vec<&TrialRecord> = records
                    .iter()
                    .filter(|r| r.gamma_db == gamma && r.design == design)
                    .collect();
                let mut values = Vec::new();
                let mut qs = Vec::new();
                let mut regions = RegionCounts::default();
                for r in &mine {
                    if let Outcome::Solved {
                        objective_w,
                        q_w,
                        region,
                    } = r.outcome
                    {
                        values.push(objective_w * 1e3);
                        qs.push(q_w);
                        if let Some(reg) = region {
                            regions.add(reg);
                        }
                    }
                }
                rows.push(SweepRow {
                    gamma_db: gamma,
                    design,
                    mean_mw: mean(&values),
                    std_mw: std_dev(&values),
                    feasible_rate: values.len() as f64 / trials.max(1) as f64,
                    mean_q_w: mean(&qs),
                    region_counts: regions,
                });
            }
        }
        Self { rows, records }
    }

    /// Trials whose objective rises by more than `rtol` between consecutive
    /// grid points where both are solved, as `(trial, gamma_db)` pairs.
    pub fn per_trial_monotonicity_violations(
        &self,
        design: Design,
        rtol: f64,
    ) -> Vec<(usize, f64)> {
        let grid = self.grid();
        let trials: usize = self.records.iter().map(|r| r.trial + 1).max().unwrap_or(0);
        let mut out = Vec::new();
        for t in 0..trials {
            for w in grid.windows(2) {
                if let (Some(a), Some(b)) = (
                    self.trial_value(t, w[0], design),
                    self.trial_value(t, w[1], design),
                ) {
                    if b > a * (1.0 + rtol) {
                        out.push((t, w[1]));
                    }
                }
            }
        }
        out
    }

    /// Means over the trials solved at both of two consecutive grid points,
    /// as `(gamma_lo, mean_lo_mw, gamma_hi, mean_hi_mw)`. The common set is
    /// the feasible set at the larger target, nested in the smaller one.
    pub fn common_set_means(&self, design: Design) -> Vec<(f64, f64, f64, f64)> {
        let grid = self.grid();
        let trials: usize = self.records.iter().map(|r| r.trial + 1).max().unwrap_or(0);
        grid.windows(2)
            .filter_map(|w| {
                let (mut lo, mut hi) = (Vec::new(), Vec::new());
                for t in 0..trials {
                    if let (Some(a), Some(b)) = (
                        self.trial_value(t, w[0], design),
                        self.trial_value(t, w[1], design),
                    ) {
                        lo.push(a * 1e3);
                        hi.push(b * 1e3);
                    }
                }
                Some((w[0], mean(&lo)?, w[1], mean(&hi)?))
            })
            .collect()
    }
}

/// Execution and solver settings shared by sweeps.
#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    pub execution: Execution,
    pub solver: SolverOptions,
}

fn run_trial(
    cfg: &ExperimentConfig,
    designs: &[Design],
    opts: &SolverOptions,
    trial: usize,
) -> Vec<TrialRecord> {
    let mut out = Vec::with_capacity(cfg.gamma_db.len() * designs.len());
    for &gamma in &cfg.gamma_db {
        let s = match gen_scenario_at(cfg, trial, gamma) {
            Ok(s) => s,
            Err(e) => {
                for &design in designs {
                    out.push(TrialRecord {
                        trial,
                        gamma_db: gamma,
                        design,
                        outcome: Outcome::Failed(e.to_string()),
                    });
                }
                continue;
            }
        };
        let joint = designs
            .iter()
            .any(|d| d.is_joint())
            .then(|| DualProblem::new(&s, opts.clone()).and_then(|dp| dp.solve_both()));
        for &design in designs {
            let outcome = match design {
                Design::JointType1 | Design::JointType2 => {
                    match joint.as_ref().expect("joint solved") {
                        Ok(pair) => {
                            let r = if design == Design::JointType1 {
                                &pair.p1
                            } else {
                                &pair.p2
                            };
                            Outcome::Solved {
                                objective_w: r.objective,
                                q_w: r.energy_beam_power,
                                region: Some(r.region),
                            }
                        }
                        Err(e) => classify_error(e),
                    }
                }
                Design::SeparateType1 | Design::SeparateType2 => {
                    let res = if design == Design::SeparateType1 {
                        separate_design_type1(&s)
                    } else {
                        separate_design_type2(&s)
                    };
                    match res {
                        Ok(b) => Outcome::Solved {
                            objective_w: b.objective,
                            q_w: b.solution.energy_power(),
                            region: None,
                        },
                        Err(e) => classify_error(&e),
                    }
                }
            };
            out.push(TrialRecord {
                trial,
                gamma_db: gamma,
                design,
                outcome,
            });
        }
    }
    out
}

fn classify_error(e: &Error) -> Outcome {
    match e {
        Error::Infeasible(_) => Outcome::Infeasible,
        Error::Applicability(_) => Outcome::Inapplicable,
        other => Outcome::Failed(other.to_string()),
    }
}

fn run_designs(
    cfg: &ExperimentConfig,
    designs: &[Design],
    opts: &SweepOptions,
) -> Result<SweepTable> {
    cfg.validate()?;
    let per_trial = map_indexed(cfg.trials, opts.execution, |t| {
        run_trial(cfg, designs, &opts.solver, t)
    });
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    Ok(SweepTable::aggregate(
        records,
        &cfg.gamma_db,
        designs,
        cfg.trials,
    ))
}

/// Average harvested power of the configured designs over the γ grid.
pub fn sweep_gamma(cfg: &ExperimentConfig) -> Result<SweepTable> {
    sweep_gamma_with(cfg, &SweepOptions::default())
}

pub fn sweep_gamma_with(cfg: &ExperimentConfig, opts: &SweepOptions) -> Result<SweepTable> {
    run_designs(cfg, &cfg.designs, opts)
}

/// Joint versus separate designs for both receiver types.
pub fn compare_designs(cfg: &ExperimentConfig) -> Result<SweepTable> {
    compare_designs_with(cfg, &SweepOptions::default())
}

pub fn compare_designs_with(cfg: &ExperimentConfig, opts: &SweepOptions) -> Result<SweepTable> {
    run_designs(cfg, &Design::ALL, opts)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::Parse(format!("bad number '{field}'")))
}

/// Path of the plot-data companion for a CSV path: `out.csv` becomes
/// `out.series.csv`.
pub fn series_path(path: &Path) -> PathBuf {
    companion(path, "series")
}

/// Path of the per-trial record file: `out.csv` becomes `out.trials.csv`.
pub fn trials_path(path: &Path) -> PathBuf {
    companion(path, "trials")
}

fn companion(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}.{tag}.csv"))
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Writes the table, its plot-data companion (one mean column per design)
/// and the per-trial records.
pub fn write_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.gamma_db.to_string(),
            r.design.label().to_string(),
            opt(r.mean_mw),
            opt(r.std_mw),
            r.feasible_rate.to_string(),
            opt(r.mean_q_w),
            r.region_counts.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let designs = table.designs();
    let mut w = csv::Writer::from_path(series_path(path)).map_err(csv_err)?;
    let mut header = vec!["gamma_db".to_string()];
    header.extend(designs.iter().map(|d| d.label().to_string()));
    w.write_record(&header).map_err(csv_err)?;
    for g in table.grid() {
        let mut rec = vec![g.to_string()];
        rec.extend(
            designs
                .iter()
                .map(|&d| opt(table.row(g, d).and_then(|r| r.mean_mw))),
        );
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(trials_path(path)).map_err(csv_err)?;
    w.write_record([
        "trial",
        "gamma_db",
        "design",
        "status",
        "objective_w",
        "q_w",
        "region",
    ])
    .map_err(csv_err)?;
    for r in &table.records {
        let (status, obj, q, reg) = match &r.outcome {
            Outcome::Solved {
                objective_w,
                q_w,
                region,
            } => (
                "solved".to_string(),
                objective_w.to_string(),
                q_w.to_string(),
                region.map(|x| x.label().to_string()).unwrap_or_default(),
            ),
            Outcome::Infeasible => (
                "infeasible".into(),
                String::new(),
                String::new(),
                String::new(),
            ),
            Outcome::Inapplicable => (
                "inapplicable".into(),
                String::new(),
                String::new(),
                String::new(),
            ),
            Outcome::Failed(msg) => (
                format!("failed: {msg}"),
                String::new(),
                String::new(),
                String::new(),
            ),
        };
        w.write_record([
            r.trial.to_string(),
            r.gamma_db.to_string(),
            r.design.label().to_string(),
            status,
            obj,
            q,
            reg,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the aggregate rows written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{}'", &rec[i])))
        };
        rows.push(SweepRow {
            gamma_db: num(0)?,
            design: rec[1].parse()?,
            mean_mw: parse_opt(&rec[2])?,
            std_mw: parse_opt(&rec[3])?,
            feasible_rate: num(4)?,
            mean_q_w: parse_opt(&rec[5])?,
            region_counts: rec[6].parse()?,
        });
    }
    Ok(rows)
}
