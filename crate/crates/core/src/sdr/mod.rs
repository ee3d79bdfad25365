//! Semidefinite relaxations of both joint designs, solved as real symmetric
//! SDPs by a dense interior-point method.
//!
//! Complex Hermitian blocks enter through the embedding
//! `W ↦ [[Re W, −Im W], [Im W, Re W]]`, under which `tr(A W) = ½ tr(Â Ŵ)`.
//! Problems are scaled before solving: `W' = W/P`, `G' = G/ξ_E` and
//! `h'_i = h_i √(P/σ_i²)`, so every quantity the solver sees is of order one.

pub mod export;
pub mod ipm;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, psd_dominance_check, CVector, HermitianMatrix, C64};
use crate::model::{energy_matrix, BeamSolution, ReceiverType, Scenario};

pub use ipm::{BlockEntry, IpmOptions, IpmSolution, IpmStatus, SparseBlocks, StandardSdp};

/// Largest total PSD dimension accepted by [`solve_sdp`].
pub const MAX_DIMENSION: usize = 64;
/// Largest number of constraints accepted by [`solve_sdp`].
pub const MAX_CONSTRAINTS: usize = 16;

/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn embed_complex(h: &HermitianMatrix) -> DMatrix<f64> {
    let n = h.dim();
    let a = h.matrix();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = a[(r % n, c % n)];
        match (r / n, c / n) {
            (0, 1) => -z.im,
            (1, 0) => z.im,
            _ => z.re,
        }
    })
}

/// Inverse of [`embed_complex`], averaging the redundant blocks.
pub fn recover_complex(x: &DMatrix<f64>) -> Result<HermitianMatrix> {
    if x.nrows() != x.ncols() || !x.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "embedded matrix must be square with even order, got {:?}",
            x.shape()
        )));
    }
    let n = x.nrows() / 2;
    let w = DMatrix::from_fn(n, n, |r, c| {
        C64::new(
            0.5 * (x[(r, c)] + x[(r + n, c + n)]),
            0.5 * (x[(r + n, c)] - x[(r, c + n)]),
        )
    });
    HermitianMatrix::new(w)
}

fn half_embed(h: &HermitianMatrix, s: f64) -> DMatrix<f64> {
    embed_complex(h) * (0.5 * s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpConstraint {
    pub terms: SparseBlocks,
    pub sense: Sense,
    pub rhs: f64,
}

/// Scaling that maps an SDR back to physical units.
#[derive(Clone, Debug, PartialEq)]
pub struct SdrLayout {
    pub receiver: ReceiverType,
    pub m: usize,
    pub k_i: usize,
    pub power: f64,
    /// Normalizer of `G` (ξ_E, or 1 without energy receivers).
    pub energy_scale: f64,
    pub sigma2: Vec<f64>,
}

/// `max ⟨C, X⟩` over block-diagonal `X ⪰ 0` subject to linear constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSdp {
    pub sizes: Vec<usize>,
    pub objective: SparseBlocks,
    pub constraints: Vec<SdpConstraint>,
    pub layout: Option<SdrLayout>,
}

/// Primal blocks and constraint multipliers of a solved [`RealSdp`].
///
/// Multipliers use the natural sign: nonnegative for inequalities.
#[derive(Clone, Debug)]
pub struct RealSdpSolution {
    pub x: Vec<DMatrix<f64>>,
    pub z: Vec<DMatrix<f64>>,
    pub multipliers: Vec<f64>,
    pub value: f64,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub iterations: usize,
    pub status: IpmStatus,
}

impl RealSdp {
    pub fn validate(&self) -> Result<()> {
        self.to_standard().validate()
    }

    /// Constraint left-hand sides `⟨A_m, X⟩` at `x`.
    pub fn evaluate(&self, x: &[DMatrix<f64>]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| {
                c.terms
                    .iter()
                    .map(|e| e.mat.component_mul(&x[e.block]).sum())
                    .sum()
            })
            .collect()
    }

    pub fn objective_at(&self, x: &[DMatrix<f64>]) -> f64 {
        self.objective
            .iter()
            .map(|e| e.mat.component_mul(&x[e.block]).sum())
            .sum()
    }

    /// Largest constraint violation at `x`, scaled by `1 + |b_m|`.
    pub fn max_violation(&self, x: &[DMatrix<f64>]) -> f64 {
        self.evaluate(x)
            .iter()
            .zip(&self.constraints)
            .map(|(&v, c)| {
                let gap = match c.sense {
                    Sense::Le => v - c.rhs,
                    Sense::Ge => c.rhs - v,
                    Sense::Eq => (v - c.rhs).abs(),
                };
                gap.max(0.0) / (1.0 + c.rhs.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Minimization form with one 1×1 slack block per inequality.
    pub fn to_standard(&self) -> StandardSdp {
        let mut sizes = self.sizes.clone();
        let mut a = Vec::with_capacity(self.constraints.len());
        for con in &self.constraints {
            let mut terms = con.terms.clone();
            let slack = match con.sense {
                Sense::Le => Some(1.0),
                Sense::Ge => Some(-1.0),
                Sense::Eq => None,
            };
            if let Some(sign) = slack {
                terms.push(BlockEntry::scalar(sizes.len(), sign));
                sizes.push(1);
            }
            a.push(terms);
        }
        StandardSdp {
            sizes,
            c: self
                .objective
                .iter()
                .map(|e| BlockEntry::new(e.block, -&e.mat))
                .collect(),
            a,
            b: self.constraints.iter().map(|c| c.rhs).collect(),
        }
    }

    pub fn solve(&self, opts: &IpmOptions) -> Result<RealSdpSolution> {
        let std = self.to_standard();
        let sol = ipm::solve(&std, opts)?;
        let multipliers = self
            .constraints
            .iter()
            .zip(sol.y.iter())
            .map(|(c, &y)| match c.sense {
                Sense::Le => -y,
                Sense::Ge | Sense::Eq => y,
            })
            .collect();
        let mut x = sol.x;
        x.truncate(self.sizes.len());
        let mut z = sol.z;
        z.truncate(self.sizes.len());
        Ok(RealSdpSolution {
            x,
            z,
            multipliers,
            value: -sol.primal_obj,
            rel_gap: sol.rel_gap,
            primal_infeas: sol.primal_infeas,
            dual_infeas: sol.dual_infeas,
            iterations: sol.iterations,
            status: sol.status,
        })
    }
}

fn layout_for(s: &Scenario, receiver: ReceiverType, xi: f64) -> SdrLayout {
    SdrLayout {
        receiver,
        m: s.m,
        k_i: s.k_i(),
        power: s.power,
        energy_scale: if xi > 0.0 { xi } else { 1.0 },
        sigma2: s.sigma2.clone(),
    }
}

/// Scaled `h'_i^H h'_i = (P/σ_i²) h_i^H h_i`.
fn scaled_channel(s: &Scenario, i: usize) -> HermitianMatrix {
    let mut h = HermitianMatrix::zeros(s.m);
    h.add_outer(&s.h[i].conjugate(), s.power / s.sigma2[i]);
    h
}

/// SDR of either joint design. Blocks `0..K_I` hold `W_i`, block `K_I`
/// holds `W_E`; rows `0..K_I` are SINR constraints, the last row is the
/// power budget.
pub fn build_sdr(s: &Scenario, receiver: ReceiverType) -> Result<RealSdp> {
    s.validate()?;
    let e = energy_matrix(s)?;
    let layout = layout_for(s, receiver, e.xi);
    let k = s.k_i();
    let n = 2 * s.m;
    let g_hat = half_embed(&e.g, 1.0 / layout.energy_scale);
    let objective = (0..=k).map(|b| BlockEntry::new(b, g_hat.clone())).collect();
    let mut constraints = Vec::with_capacity(k + 1);
    for i in 0..k {
        let h = half_embed(&scaled_channel(s, i), 1.0);
        let mut terms: SparseBlocks = (0..k)
            .map(|b| {
                if b == i {
                    BlockEntry::new(b, &h / s.gamma[i])
                } else {
                    BlockEntry::new(b, -&h)
                }
            })
            .collect();
        if receiver == ReceiverType::TypeI {
            terms.push(BlockEntry::new(k, -&h));
        }
        constraints.push(SdpConstraint {
            terms,
            sense: Sense::Ge,
            rhs: 1.0,
        });
    }
    let half_eye = DMatrix::identity(n, n) * 0.5;
    constraints.push(SdpConstraint {
        terms: (0..=k)
            .map(|b| BlockEntry::new(b, half_eye.clone()))
            .collect(),
        sense: Sense::Le,
        rhs: 1.0,
    });
    Ok(RealSdp {
        sizes: vec![n; k + 1],
        objective,
        constraints,
        layout: Some(layout),
    })
}

pub fn build_sdr1(s: &Scenario) -> Result<RealSdp> {
    build_sdr(s, ReceiverType::TypeI)
}

pub fn build_sdr2(s: &Scenario) -> Result<RealSdp> {
    build_sdr(s, ReceiverType::TypeII)
}

/// Scaled primal blocks for a complex beam design, laid out like
/// [`build_sdr`].
pub fn embed_solution(sol: &BeamSolution, power: f64) -> Vec<DMatrix<f64>> {
    let m = sol
        .info
        .first()
        .or(sol.energy.first())
        .map_or(0, |w| w.len());
    let mut blocks: Vec<DMatrix<f64>> = sol
        .info
        .iter()
        .map(|w| embed_complex(&HermitianMatrix::outer(w)) / power)
        .collect();
    let mut we = HermitianMatrix::zeros(m);
    for v in &sol.energy {
        we.add_outer(v, 1.0 / power);
    }
    blocks.push(embed_complex(&we));
    blocks
}

/// Optimal covariance matrices of an SDR with its dual certificate.
#[derive(Clone, Debug)]
pub struct SdrSolution {
    pub receiver: ReceiverType,
    pub w_info: Vec<HermitianMatrix>,
    pub w_energy: HermitianMatrix,
    /// Weighted harvested power in W.
    pub value: f64,
    pub lambdas: Vec<f64>,
    pub beta: f64,
    /// `‖Z_b X_b‖ / (‖Z_b‖ Σ tr X)` per block from the solver's dual slack,
    /// information blocks first.
    pub kkt_residuals: Vec<f64>,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub iterations: usize,
}

impl SdrSolution {
    pub fn energy_trace(&self) -> f64 {
        self.w_energy.trace()
    }

    pub fn total_power(&self) -> f64 {
        self.w_info.iter().map(HermitianMatrix::trace).sum::<f64>() + self.energy_trace()
    }
}

/// Solves an SDR built by [`build_sdr`] and maps the result back to
/// physical units.
pub fn solve_sdp(p: &RealSdp, tol: f64) -> Result<SdrSolution> {
    let layout = p.layout.as_ref().ok_or_else(|| {
        Error::InvalidInput("solve_sdp needs an SDR layout; use RealSdp::solve".into())
    })?;
    let dim: usize = p.sizes.iter().sum();
    if dim > MAX_DIMENSION || p.constraints.len() > MAX_CONSTRAINTS {
        return Err(Error::InvalidInput(format!(
            "SDP of dimension {dim} with {} constraints exceeds the supported size",
            p.constraints.len()
        )));
    }
    let opts = IpmOptions {
        tol,
        ..IpmOptions::default()
    };
    let sol = p.solve(&opts)?;
    let k = layout.k_i;
    let pw = layout.power;
    let mut blocks = sol
        .x
        .iter()
        .map(|x| recover_complex(x).map(|w| w.scaled(pw)))
        .collect::<Result<Vec<_>>>()?;
    let w_energy = blocks
        .pop()
        .unwrap_or_else(|| HermitianMatrix::zeros(layout.m));
    let scale = layout.energy_scale;
    let lambdas: Vec<f64> = (0..k)
        .map(|i| scale * pw * sol.multipliers[i].max(0.0) / layout.sigma2[i])
        .collect();
    let beta = scale * sol.multipliers[k].max(0.0);
    let mut out = SdrSolution {
        receiver: layout.receiver,
        w_info: blocks,
        w_energy,
        value: scale * pw * sol.value,
        lambdas,
        beta,
        kkt_residuals: vec![],
        rel_gap: sol.rel_gap,
        primal_infeas: sol.primal_infeas,
        dual_infeas: sol.dual_infeas,
        iterations: sol.iterations,
    };
    let total: f64 = sol
        .x
        .iter()
        .map(DMatrix::trace)
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    out.kkt_residuals = sol
        .x
        .iter()
        .zip(&sol.z)
        .map(|(x, z)| (z * x).norm() / (z.norm().max(f64::MIN_POSITIVE) * total))
        .collect();
    Ok(out)
}

/// Convenience wrapper: build and solve the SDR for one receiver type.
pub fn solve_sdr(s: &Scenario, receiver: ReceiverType, tol: f64) -> Result<SdrSolution> {
    solve_sdp(&build_sdr(s, receiver)?, tol)
}

/// Matrices whose products with the optimal covariances vanish at a KKT
/// point: `A_i W_i = 0` and `C W_E = 0`.
#[derive(Clone, Debug)]
pub struct KktMatrices {
    pub a: Vec<HermitianMatrix>,
    pub c: HermitianMatrix,
}

impl KktMatrices {
    /// `A_i = G + (λ_i/γ_i) H_i − Σ_{k≠i} λ_k H_k − βI`; `C_1 = G − Σ λ_k H_k
    /// − βI` for Type I and `C_2 = G − βI` for Type II.
    pub fn new(s: &Scenario, lambdas: &[f64], beta: f64, receiver: ReceiverType) -> Result<Self> {
        if lambdas.len() != s.k_i() {
            return Err(Error::Dimension(format!(
                "{} multipliers for {} ID receivers",
                lambdas.len(),
                s.k_i()
            )));
        }
        let e = energy_matrix(s)?;
        let mut base = e.g.clone();
        base.add_identity(-beta);
        let mut c1 = base.clone();
        for (h, &l) in s.h.iter().zip(lambdas) {
            c1.add_outer(&h.conjugate(), -l);
        }
        let a = (0..s.k_i())
            .map(|i| {
                let mut ai = c1.clone();
                ai.add_outer(&s.h[i].conjugate(), lambdas[i] * (1.0 + 1.0 / s.gamma[i]));
                ai
            })
            .collect();
        let c = match receiver {
            ReceiverType::TypeI => c1,
            ReceiverType::TypeII => base,
        };
        Ok(Self { a, c })
    }

    /// Complementary-slackness residuals `‖A W‖ / (‖A‖ Σ tr W)`,
    /// information blocks first.
    pub fn residuals(&self, sol: &SdrSolution) -> Vec<f64> {
        let total = sol.total_power().max(f64::MIN_POSITIVE);
        let rel = |a: &HermitianMatrix, w: &HermitianMatrix| {
            let an = a.norm_fro().max(f64::MIN_POSITIVE);
            (a.matrix() * w.matrix()).norm() / (an * total)
        };
        self.a
            .iter()
            .zip(&sol.w_info)
            .map(|(a, w)| rel(a, w))
            .chain(std::iter::once(rel(&self.c, &sol.w_energy)))
            .collect()
    }

    /// Largest eigenvalue over all KKT matrices, relative to their norms.
    /// Nonpositive at a dual-feasible point.
    pub fn max_relative_eigenvalue(&self) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for m in self.a.iter().chain(std::iter::once(&self.c)) {
            let eig = hermitian_eig(m)?;
            let top = eig.values[0] / eig.max_abs().max(f64::MIN_POSITIVE);
            worst = worst.max(top);
        }
        Ok(worst)
    }
}

/// Returns `√λ1 v1` for the dominant eigenpair of `W`.
pub fn extract_rank_one(w: &HermitianMatrix, tol: f64) -> Result<CVector> {
    let eig = hermitian_eig(w)?;
    let trace: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    if trace <= 0.0 {
        return Ok(CVector::zeros(w.dim()));
    }
    let ratio = eig.values[0] / trace;
    if ratio < 1.0 - tol {
        return Err(Error::NotRankOne { ratio });
    }
    Ok(eig.vector(0) * C64::new(eig.values[0].sqrt(), 0.0))
}

/// Dominant eigenvalue over trace; 1 for the zero matrix.
pub fn dominant_ratio(w: &HermitianMatrix) -> Result<f64> {
    let eig = hermitian_eig(w)?;
    let trace: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    Ok(if trace <= 0.0 {
        1.0
    } else {
        eig.values[0] / trace
    })
}

/// Rank-one beams from an SDR solution. An energy covariance carrying more
/// than `tol` of the total power becomes one beam along its dominant
/// eigenvector; a smaller one is dropped.
pub fn beams_from_sdr(sol: &SdrSolution, tol: f64) -> Result<BeamSolution> {
    let info = sol
        .w_info
        .iter()
        .map(|w| extract_rank_one(w, tol))
        .collect::<Result<Vec<_>>>()?;
    let energy = if sol.energy_trace() > tol * sol.total_power() {
        vec![extract_rank_one(&sol.w_energy, tol)?]
    } else {
        vec![]
    };
    Ok(BeamSolution::new(info, energy, sol.receiver))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureTolerances {
    /// `tr(W_E) ≤ trace · P` for Type I; alignment `≥ 1 − trace` for Type II.
    pub trace: f64,
    /// Dominant-eigenvalue ratio `≥ 1 − rank` for each `W_i`.
    pub rank: f64,
    pub slackness: f64,
}

impl Default for StructureTolerances {
    fn default() -> Self {
        Self {
            trace: 1e-6,
            rank: 1e-4,
            slackness: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub receiver: ReceiverType,
    pub energy_trace: f64,
    /// `v_E^H W_E v_E / tr(W_E)` when `W_E` is not negligible.
    pub energy_alignment: Option<f64>,
    /// OeBF-feasible instance: the optimal face admits `W_E` along `v_E`
    /// for either receiver type, so Type I is held to the alignment test.
    pub oebf_feasible: bool,
    pub rank_ratios: Vec<f64>,
    pub slackness: Vec<f64>,
    pub max_kkt_eigenvalue: f64,
    pub failures: Vec<String>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the optimal-structure properties of an SDR solution: zero or
/// `v_E`-aligned energy covariance, rank-one information covariances and
/// complementary slackness.
pub fn verify_structure(
    sol: &SdrSolution,
    s: &Scenario,
    receiver: ReceiverType,
    tol: &StructureTolerances,
) -> Result<StructureReport> {
    let e = energy_matrix(s)?;
    let kkt = KktMatrices::new(s, &sol.lambdas, sol.beta, receiver)?;
    let mut failures = Vec::new();
    let energy_trace = sol.energy_trace();
    let mut energy_alignment = None;
    let oebf_feasible = crate::feasibility::oebf_feasibility(s)?.is_some();
    match receiver {
        ReceiverType::TypeI if !oebf_feasible => {
            if energy_trace > tol.trace * s.power {
                failures.push(format!(
                    "energy covariance trace {energy_trace:e} exceeds {:e}",
                    tol.trace * s.power
                ));
            }
        }
        _ => {
            if energy_trace > 1e-8 * s.power {
                let align = sol.w_energy.quad_form(&e.v) / energy_trace;
                energy_alignment = Some(align);
                if align < 1.0 - tol.trace {
                    failures.push(format!("energy covariance alignment {align} with v_E"));
                }
            }
        }
    }
    let rank_ratios = sol
        .w_info
        .iter()
        .map(dominant_ratio)
        .collect::<Result<Vec<_>>>()?;
    for (i, r) in rank_ratios.iter().enumerate() {
        if *r < 1.0 - tol.rank {
            failures.push(format!("W_{} dominant ratio {r}", i + 1));
        }
    }
    let slackness = kkt.residuals(sol);
    for (i, r) in slackness.iter().enumerate() {
        if *r > tol.slackness {
            let name = if i < s.k_i() {
                format!("A_{} W_{}", i + 1, i + 1)
            } else {
                "C W_E".to_string()
            };
            failures.push(format!("slackness residual of {name} is {r:e}"));
        }
    }
    let max_kkt_eigenvalue = kkt.max_relative_eigenvalue()?;
    if max_kkt_eigenvalue > tol.slackness {
        failures.push(format!(
            "KKT matrix has positive eigenvalue {max_kkt_eigenvalue:e}"
        ));
    }
    Ok(StructureReport {
        receiver,
        energy_trace,
        energy_alignment,
        oebf_feasible,
        rank_ratios,
        slackness,
        max_kkt_eigenvalue,
        failures,
    })
}

/// `Z_i = Σ_{k≠i} λ_k H_k + βI − G`.
pub fn z_matrix(
    s: &Scenario,
    g: &HermitianMatrix,
    lambdas: &[f64],
    beta: f64,
    i: usize,
) -> HermitianMatrix {
    let mut z = g.scaled(-1.0);
    z.add_identity(beta);
    for (k, (h, &l)) in s.h.iter().zip(lambdas).enumerate() {
        if k != i {
            z.add_outer(&h.conjugate(), l);
        }
    }
    z
}

/// Tests `Z_i ⪰ (λ_i/γ_i) h_i^H h_i` for every ID receiver.
///
/// Each matrix pair is scaled to unit size before the dominance test so `tol`
/// is relative.
pub fn dual_feasibility_check(lambdas: &[f64], beta: f64, s: &Scenario, tol: f64) -> Result<bool> {
    if lambdas.len() != s.k_i() {
        return Err(Error::Dimension(format!(
            "{} multipliers for {} ID receivers",
            lambdas.len(),
            s.k_i()
        )));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l >= 0.0)) {
        return Err(Error::InvalidInput(format!("multiplier {l} is negative")));
    }
    let e = energy_matrix(s)?;
    for i in 0..s.k_i() {
        let z = z_matrix(s, &e.g, lambdas, beta, i);
        let b = s.h[i].conjugate() * C64::new((lambdas[i] / s.gamma[i]).sqrt(), 0.0);
        let scale = z.norm_fro().max(b.norm_squared()).max(f64::MIN_POSITIVE);
        let zs = z.scaled(1.0 / scale);
        if hermitian_eig(&zs)?.min_value() < -tol {
            return Ok(false);
        }
        let bs = &b * C64::new(scale.sqrt().recip(), 0.0);
        if !psd_dominance_check(&zs, &bs, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shift applied to the dual LMI so its Phase-I problem has an interior.
const LMI_SHIFT: f64 = 2.0;

/// Phase-I margin of the dual constraint system at `β`:
///
/// ```text
/// max t  s.t.  Z_i(λ) − (λ_i/γ_i) H_i ⪰ t·s0·I,  λ ≥ 0,  Σ λ'_k ≤ L
/// ```
///
/// with `s0 = max(ξ_E, β)`, `λ'_k = λ_k ‖h_k‖²/s0` and `L = 10³(1 + Σγ_k)`.
/// The system is feasible iff the margin is nonnegative.
pub fn dual_lmi_margin(s: &Scenario, beta: f64, opts: &IpmOptions) -> Result<f64> {
    s.validate()?;
    let e = energy_matrix(s)?;
    let k = s.k_i();
    let s0 = e.xi.max(beta).max(f64::MIN_POSITIVE);
    let n = 2 * s.m;
    let bound = 1e3 * (1.0 + s.gamma.iter().sum::<f64>());
    let unit: Vec<DMatrix<f64>> =
        s.h.iter()
            .map(|h| {
                let mut hh = HermitianMatrix::zeros(s.m);
                hh.add_outer(&h.conjugate(), 1.0 / h.norm_squared());
                embed_complex(&hh)
            })
            .collect();
    let mut base = e.g.scaled(-1.0 / s0);
    base.add_identity(beta / s0 + LMI_SHIFT);
    let base = embed_complex(&base);

    // Blocks: K LMI blocks, K multiplier signs, t ≥ 0, the bound row.
    let mut sizes = vec![n; k];
    sizes.extend(std::iter::repeat_n(1, k + 2));
    let t_block = 2 * k;
    let bound_block = 2 * k + 1;
    let mut c: SparseBlocks = (0..k).map(|i| BlockEntry::new(i, base.clone())).collect();
    c.push(BlockEntry::scalar(bound_block, bound));
    let mut a: Vec<SparseBlocks> = Vec::with_capacity(k + 1);
    for (j, u) in unit.iter().enumerate() {
        let mut row: SparseBlocks = (0..k)
            .map(|i| {
                if i == j {
                    BlockEntry::new(i, u / s.gamma[j])
                } else {
                    BlockEntry::new(i, -u)
                }
            })
            .collect();
        row.push(BlockEntry::scalar(k + j, -1.0));
        row.push(BlockEntry::scalar(bound_block, 1.0));
        a.push(row);
    }
    let mut t_row: SparseBlocks = (0..k)
        .map(|i| BlockEntry::new(i, DMatrix::identity(n, n)))
        .collect();
    t_row.push(BlockEntry::scalar(t_block, -1.0));
    t_row.push(BlockEntry::scalar(bound_block, 1.0));
    a.push(t_row);
    let mut b = vec![0.0; k];
    b.push(1.0);
    let p = StandardSdp { sizes, c, a, b };
    let sol = ipm::solve(&p, opts)?;
    Ok(sol.y[k] - LMI_SHIFT)
}

/// Whether some `λ ≥ 0` satisfies `Z_i ⪰ (λ_i/γ_i) H_i` for all `i`.
pub fn dual_lmi_feasible(s: &Scenario, beta: f64, tol: f64) -> Result<bool> {
    Ok(dual_lmi_margin(s, beta, &IpmOptions::default())? >= -tol)
}

/// Minimum transmit power of the relaxed SINR-feasibility problem, from
/// `max t s.t. SINR_i ≥ t·γ_i-scaled noise, Σ tr W_i ≤ P`: `P_min = P/t*`.
/// Returns infinity when no power meets the targets.
pub fn sdr_min_power(s: &Scenario, tol: f64) -> Result<f64> {
    s.validate()?;
    let k = s.k_i();
    if k == 0 {
        return Ok(0.0);
    }
    let n = 2 * s.m;
    let mut constraints = Vec::with_capacity(k + 1);
    for i in 0..k {
        let h = half_embed(&scaled_channel(s, i), 1.0);
        let mut terms: SparseBlocks = (0..k)
            .map(|b| {
                if b == i {
                    BlockEntry::new(b, &h / s.gamma[i])
                } else {
                    BlockEntry::new(b, -&h)
                }
            })
            .collect();
        terms.push(BlockEntry::scalar(k, -1.0));
        constraints.push(SdpConstraint {
            terms,
            sense: Sense::Ge,
            rhs: 0.0,
        });
    }
    let half_eye = DMatrix::identity(n, n) * 0.5;
    constraints.push(SdpConstraint {
        terms: (0..k)
            .map(|b| BlockEntry::new(b, half_eye.clone()))
            .collect(),
        sense: Sense::Le,
        rhs: 1.0,
    });
    let mut sizes = vec![n; k];
    sizes.push(1);
    let p = RealSdp {
        sizes,
        objective: vec![BlockEntry::scalar(k, 1.0)],
        constraints,
        layout: None,
    };
    let opts = IpmOptions {
        tol,
        ..IpmOptions::default()
    };
    let t = p.solve(&opts)?.value;
    Ok(if t <= tol { f64::INFINITY } else { s.power / t })
}

#[cfg(test)]
mod tests;
