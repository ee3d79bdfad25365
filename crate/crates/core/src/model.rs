//! System model for a multiuser MISO SWIPT downlink.
//!
//! An access point with `M` antennas serves `K_I` information-decoding (ID)
//! receivers and `K_E` energy-harvesting (EH) receivers. Channels are stored
//! as the conjugate-free row vectors `h_i`, `g_j`, so the received amplitude
//! of beam `w` at ID receiver `i` is `h_i w`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dominant_eigpair, row_dot, CVector, HermitianMatrix};

/// Default relative tolerance for feasibility checks on solutions.
pub const DEFAULT_FEAS_TOL: f64 = 1e-6;

/// Whether an ID receiver can cancel interference from the (known) energy
/// signals before decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReceiverType {
    /// No cancellation: energy beams interfere.
    TypeI,
    /// Energy-signal interference is cancelled.
    TypeII,
}

impl ReceiverType {
    pub fn label(self) -> &'static str {
        match self {
            ReceiverType::TypeI => "type1",
            ReceiverType::TypeII => "type2",
        }
    }
}

/// SINR-target regime of a solved instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Dedicated energy beams are unnecessary, the power constraint binds
    /// above the dominant eigenvalue.
    R1,
    /// A dedicated energy beam strictly helps Type II receivers.
    R2,
    /// The optimal energy beamformer alone meets every SINR target.
    R3,
    /// Not classified.
    NA,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::R1 => "R1",
            Region::R2 => "R2",
            Region::R3 => "R3",
            Region::NA => "NA",
        }
    }
}

/// Channels, noise powers, SINR targets, energy weights and power budget.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub m: usize,
    pub h: Vec<CVector>,
    pub g: Vec<CVector>,
    pub sigma2: Vec<f64>,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub zeta: f64,
    pub power: f64,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m: usize,
        h: Vec<CVector>,
        g: Vec<CVector>,
        sigma2: Vec<f64>,
        gamma: Vec<f64>,
        alpha: Vec<f64>,
        zeta: f64,
        power: f64,
    ) -> Result<Self> {
        let s = Self {
            m,
            h,
            g,
            sigma2,
            gamma,
            alpha,
            zeta,
            power,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn k_i(&self) -> usize {
        self.h.len()
    }

    pub fn k_e(&self) -> usize {
        self.g.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidInput("antenna count must be positive".into()));
        }
        if self.h.is_empty() && self.g.is_empty() {
            return Err(Error::InvalidInput(
                "need at least one ID or EH receiver".into(),
            ));
        }
        for (name, chans) in [("h", &self.h), ("g", &self.g)] {
            for (k, c) in chans.iter().enumerate() {
                if c.len() != self.m {
                    return Err(Error::Dimension(format!(
                        "channel {name}[{k}] has length {}, expected {}",
                        c.len(),
                        self.m
                    )));
                }
                if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "channel {name}[{k}] has non-finite entries"
                    )));
                }
            }
        }
        let k_i = self.k_i();
        if self.sigma2.len() != k_i || self.gamma.len() != k_i {
            return Err(Error::Dimension(format!(
                "expected {k_i} noise powers and SINR targets, got {} and {}",
                self.sigma2.len(),
                self.gamma.len()
            )));
        }
        if self.alpha.len() != self.k_e() {
            return Err(Error::Dimension(format!(
                "expected {} energy weights, got {}",
                self.k_e(),
                self.alpha.len()
            )));
        }
        if self.sigma2.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("noise powers must be positive".into()));
        }
        if self.gamma.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("SINR targets must be positive".into()));
        }
        if self.alpha.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(
                "energy weights must be nonnegative".into(),
            ));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "harvest efficiency must lie in (0, 1], got {}",
                self.zeta
            )));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::InvalidInput("power budget must be positive".into()));
        }
        Ok(())
    }

    pub fn with_power(&self, power: f64) -> Self {
        Self {
            power,
            ..self.clone()
        }
    }

    pub fn with_gamma(&self, gamma: Vec<f64>) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }
}

/// Weighted energy matrix `G = ζ Σ α_j g_j^H g_j` with its dominant pair.
#[derive(Clone, Debug)]
pub struct EnergyProfile {
    pub g: HermitianMatrix,
    pub xi: f64,
    pub v: CVector,
}

pub fn energy_matrix(s: &Scenario) -> Result<EnergyProfile> {
    let mut g = HermitianMatrix::zeros(s.m);
    for (gj, &a) in s.g.iter().zip(&s.alpha) {
        // g_j^H g_j is the outer product of the column conj(g_j).
        g.add_outer(&gj.conjugate(), s.zeta * a);
    }
    let (xi, v) = dominant_eigpair(&g)?;
    Ok(EnergyProfile {
        g,
        xi: xi.max(0.0),
        v,
    })
}

/// Downlink information beams, dedicated energy beams and receiver type.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamSolution {
    pub info: Vec<CVector>,
    pub energy: Vec<CVector>,
    pub receiver: ReceiverType,
}

impl BeamSolution {
    pub fn new(info: Vec<CVector>, energy: Vec<CVector>, receiver: ReceiverType) -> Self {
        Self {
            info,
            energy,
            receiver,
        }
    }

    pub fn info_power(&self) -> f64 {
        self.info.iter().fold(0.0, |acc, w| acc + w.norm_squared())
    }

    pub fn energy_power(&self) -> f64 {
        self.energy
            .iter()
            .fold(0.0, |acc, v| acc + v.norm_squared())
    }

    pub fn total_power(&self) -> f64 {
        self.info_power() + self.energy_power()
    }
}

pub fn sinr(sol: &BeamSolution, s: &Scenario, i: usize) -> Result<f64> {
    if i >= s.k_i() || i >= sol.info.len() {
        return Err(Error::InvalidInput(format!(
            "ID receiver index {i} out of range"
        )));
    }
    let h = &s.h[i];
    let signal = row_dot(h, &sol.info[i]).norm_sqr();
    let mut denom = s.sigma2[i];
    for (k, w) in sol.info.iter().enumerate() {
        if k != i {
            denom += row_dot(h, w).norm_sqr();
        }
    }
    if sol.receiver == ReceiverType::TypeI {
        denom += sol
            .energy
            .iter()
            .map(|v| row_dot(h, v).norm_sqr())
            .sum::<f64>();
    }
    Ok(signal / denom)
}

pub fn harvested_power(sol: &BeamSolution, s: &Scenario, j: usize) -> Result<f64> {
    if j >= s.k_e() {
        return Err(Error::InvalidInput(format!(
            "EH receiver index {j} out of range"
        )));
    }
    let g = &s.g[j];
    let total: f64 = sol
        .info
        .iter()
        .chain(sol.energy.iter())
        .map(|b| row_dot(g, b).norm_sqr())
        .sum();
    Ok(s.zeta * total)
}

/// Weighted sum harvested power `Σ_j α_j Q_j`.
pub fn objective_value(sol: &BeamSolution, s: &Scenario) -> f64 {
    (0..s.k_e())
        .map(|j| s.alpha[j] * harvested_power(sol, s, j).unwrap_or(0.0))
        .sum()
}

/// The same objective through the energy matrix, `Σ w^H G w`.
pub fn objective_with_matrix(sol: &BeamSolution, g: &HermitianMatrix) -> f64 {
    sol.info
        .iter()
        .chain(sol.energy.iter())
        .map(|b| g.quad_form(b))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Sinr {
        user: usize,
        achieved: f64,
        target: f64,
    },
    Power {
        total: f64,
        budget: f64,
    },
    Shape(String),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Sinr {
                user,
                achieved,
                target,
            } => write!(f, "SINR of user {user} is {achieved:e}, target {target:e}"),
            Violation::Power { total, budget } => {
                write!(f, "total power {total:e} W exceeds budget {budget:e} W")
            }
            Violation::Shape(msg) => write!(f, "{msg}"),
        }
    }
}

/// Lists every SINR target missed by more than `tol` (relative) and a power
/// budget overrun beyond `P (1 + tol)`.
pub fn validate_solution(sol: &BeamSolution, s: &Scenario, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if sol.info.len() != s.k_i() {
        out.push(Violation::Shape(format!(
            "{} information beams for {} ID receivers",
            sol.info.len(),
            s.k_i()
        )));
        return out;
    }
    if sol.info.iter().chain(&sol.energy).any(|b| b.len() != s.m) {
        out.push(Violation::Shape(format!(
            "beam length differs from M = {}",
            s.m
        )));
        return out;
    }
    for i in 0..s.k_i() {
        let achieved = sinr(sol, s, i).unwrap_or(0.0);
        if !(achieved >= s.gamma[i] * (1.0 - tol)) {
            out.push(Violation::Sinr {
                user: i,
                achieved,
                target: s.gamma[i],
            });
        }
    }
    let total = sol.total_power();
    if !(total <= s.power * (1.0 + tol)) {
        out.push(Violation::Power {
            total,
            budget: s.power,
        });
    }
    out
}

/// Result of a joint beamforming solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: BeamSolution,
    pub objective: f64,
    pub per_id_sinr: Vec<f64>,
    pub per_eh_power: Vec<f64>,
    pub total_power: f64,
    pub dual_beta: f64,
    pub uplink_lambdas: Vec<f64>,
    pub energy_beam_power: f64,
    pub region: Region,
    pub iterations: usize,
}

impl SolveReport {
    pub fn from_solution(
        solution: BeamSolution,
        s: &Scenario,
        dual_beta: f64,
        uplink_lambdas: Vec<f64>,
        region: Region,
        iterations: usize,
    ) -> Self {
        let per_id_sinr = (0..s.k_i())
            .map(|i| sinr(&solution, s, i).unwrap_or(0.0))
            .collect();
        let per_eh_power: Vec<f64> = (0..s.k_e())
            .map(|j| harvested_power(&solution, s, j).unwrap_or(0.0))
            .collect();
        let objective = per_eh_power.iter().zip(&s.alpha).map(|(q, a)| q * a).sum();
        Self {
            total_power: solution.total_power(),
            energy_beam_power: solution.energy_power(),
            solution,
            objective,
            per_id_sinr,
            per_eh_power,
            dual_beta,
            uplink_lambdas,
            region,
            iterations,
        }
    }
}
