//! Separate information/energy designs used as suboptimal references.
//!
//! Both start from the minimum-power information beams and spend the leftover
//! budget on one energy beam. For Type I receivers the energy beam lives in
//! the null space of the stacked ID channels so it causes no interference;
//! for Type II receivers it simply follows `v_E`.

use crate::error::{Error, Result};
use crate::feasibility::min_power_beams;
use crate::linalg::{dominant_eigpair, null_space_basis, CMatrix, CVector, HermitianMatrix, C64};
use crate::model::{energy_matrix, objective_value, BeamSolution, ReceiverType, Scenario};

#[derive(Clone, Debug)]
pub struct BaselineResult {
    pub solution: BeamSolution,
    /// Weighted harvested power in W.
    pub objective: f64,
    /// Budget left after the minimum-power information beams, in W.
    pub residual_power: f64,
}

fn info_beams(s: &Scenario) -> Result<(Vec<CVector>, f64)> {
    if s.k_i() == 0 {
        return Ok((vec![], s.power));
    }
    let (beams, p_min) = min_power_beams(s)?;
    if p_min > s.power {
        return Err(Error::Infeasible(format!(
            "minimum power {p_min:e} W exceeds the budget {:e} W",
            s.power
        )));
    }
    Ok((beams, s.power - p_min))
}

fn finish(
    s: &Scenario,
    info: Vec<CVector>,
    energy: CVector,
    residual: f64,
    receiver: ReceiverType,
) -> BaselineResult {
    let beam = energy * C64::new(residual.sqrt(), 0.0);
    let solution = BeamSolution::new(info, vec![beam], receiver);
    BaselineResult {
        objective: objective_value(&solution, s),
        solution,
        residual_power: residual,
    }
}

/// Type I separate design: energy beam along the dominant eigenvector of
/// `G` restricted to the null space of `H = [h_1; …; h_{K_I}]`.
pub fn separate_design_type1(s: &Scenario) -> Result<BaselineResult> {
    s.validate()?;
    if s.k_i() + 1 > s.m {
        return Err(Error::Applicability(format!(
            "null-space energy beam needs K_I <= M - 1, got K_I = {} with M = {}",
            s.k_i(),
            s.m
        )));
    }
    let (info, residual) = info_beams(s)?;
    let e = energy_matrix(s)?;
    let h = CMatrix::from_fn(s.k_i(), s.m, |i, j| s.h[i][j]);
    let v_bar = null_space_basis(&h)?;
    let reduced = HermitianMatrix::new(v_bar.adjoint() * e.g.matrix() * &v_bar)?;
    let (_, v_prime) = dominant_eigpair(&reduced)?;
    let direction = &v_bar * v_prime;
    Ok(finish(s, info, direction, residual, ReceiverType::TypeI))
}

/// Type II separate design: energy beam along `v_E`, invisible to the ID
/// receivers after cancellation.
pub fn separate_design_type2(s: &Scenario) -> Result<BaselineResult> {
    s.validate()?;
    let (info, residual) = info_beams(s)?;
    let e = energy_matrix(s)?;
    Ok(finish(s, info, e.v, residual, ReceiverType::TypeII))
}
