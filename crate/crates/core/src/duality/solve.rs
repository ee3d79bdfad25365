//! Bisection over the power multiplier and recovery of both joint designs.

use super::{DualProblem, InnerOutcome, InnerSolution};
use crate::error::{Error, Result};
use crate::feasibility::{min_power_beams_with, oebf_beams, oebf_feasibility_with};
use crate::linalg::{CVector, C64};
use crate::model::{
    energy_matrix, BeamSolution, EnergyProfile, ReceiverType, Region, Scenario, SolveReport,
};

/// Relative tolerance used when labelling regions inside the solver.
const REGION_TOL: f64 = 1e-6;

/// Optimal Type I and Type II designs for one scenario.
#[derive(Clone, Debug)]
pub struct SolvePair {
    pub p1: SolveReport,
    pub p2: SolveReport,
}

struct Bracketed {
    beta: f64,
    sol: InnerSolution,
}

impl<'a> DualProblem<'a> {
    /// Type I joint design (no dedicated energy beam).
    pub fn solve_p1(&self) -> Result<SolveReport> {
        Ok(self.solve_both()?.p1)
    }

    /// Type II joint design (information beams plus one energy beam along
    /// `v_E`).
    pub fn solve_p2(&self) -> Result<SolveReport> {
        Ok(self.solve_both()?.p2)
    }

    pub fn solve_both(&self) -> Result<SolvePair> {
        let s = self.scenario();
        let power = s.power;
        if s.k_i() == 0 {
            let beam = self.v_e() * C64::new(power.sqrt(), 0.0);
            return Ok(self.pair_from(vec![], vec![beam], self.xi(), vec![], Region::R3, 0));
        }
        let (mp_beams, p_min) = min_power_beams_with(s, self.options(), None)?;
        if p_min > power {
            return Err(Error::Infeasible(format!(
                "minimum power {p_min:e} W exceeds the budget {power:e} W"
            )));
        }
        if self.xi() <= 0.0 {
            // Nothing to harvest: any feasible beams are optimal.
            let k = s.k_i();
            return Ok(self.pair_from(mp_beams, vec![], 0.0, vec![0.0; k], Region::NA, 0));
        }
        let profile = EnergyProfile {
            g: self.energy().clone(),
            xi: self.xi(),
            v: self.v_e().clone(),
        };
        if let Some(p) = oebf_feasibility_with(s, &profile) {
            let beams = oebf_beams(s, &profile, &p);
            let k = s.k_i();
            return Ok(self.pair_from(beams, vec![], self.xi(), vec![0.0; k], Region::R3, 0));
        }

        let mut iterations = 0;
        let (at_xi, above) = self.solve_at_xi()?;
        iterations += at_xi.iterations + above.iterations;
        let upsilon_xi = power - at_xi.beam_power();

        if upsilon_xi < 0.0 {
            // The budget binds above xi_E: both designs coincide.
            let best = self.bisect_above(above, &mut iterations)?;
            let lambdas = best.sol.state.lambdas.clone();
            return Ok(self.pair_from(
                best.sol.beams,
                vec![],
                best.beta,
                lambdas,
                Region::R1,
                iterations,
            ));
        }

        // Type II: beta* = xi_E and the leftover power rides on v_E.
        let q = upsilon_xi;
        let energy = if q > 0.0 {
            vec![self.v_e() * C64::new(q.sqrt(), 0.0)]
        } else {
            vec![]
        };
        let p2_sol = BeamSolution::new(at_xi.beams.clone(), energy, ReceiverType::TypeII);
        let p2_lambdas = at_xi.state.lambdas.clone();

        // Type I: the optimum multiplier lies in [0, xi_E].
        let best = self.bisect_below(at_xi, &mut iterations)?;
        let p1_sol = BeamSolution::new(best.sol.beams.clone(), vec![], ReceiverType::TypeI);
        let mut p1 = SolveReport::from_solution(
            p1_sol,
            s,
            best.beta,
            best.sol.state.lambdas.clone(),
            Region::NA,
            iterations,
        );
        let mut p2 =
            SolveReport::from_solution(p2_sol, s, self.xi(), p2_lambdas, Region::NA, iterations);
        let region = classify_region(s, &p1, &p2, REGION_TOL)?;
        p1.region = region;
        p2.region = region;
        Ok(SolvePair { p1, p2 })
    }

    fn pair_from(
        &self,
        info: Vec<CVector>,
        energy: Vec<CVector>,
        beta: f64,
        lambdas: Vec<f64>,
        region: Region,
        iterations: usize,
    ) -> SolvePair {
        let s = self.scenario();
        let t1 = BeamSolution::new(info.clone(), energy.clone(), ReceiverType::TypeI);
        let t2 = BeamSolution::new(info, energy, ReceiverType::TypeII);
        SolvePair {
            p1: SolveReport::from_solution(t1, s, beta, lambdas.clone(), region, iterations),
            p2: SolveReport::from_solution(t2, s, beta, lambdas, region, iterations),
        }
    }

    /// Bisection stops once the bracket is narrower than `bisect_tol · hi`
    /// and the budget is met within `bisect_tol · P`, or once the bracket
    /// reaches rounding level. Near the OeBF boundary the beam power is
    /// steep in `β`, so a narrow bracket alone leaves slack in the budget.
    fn bracket_done(&self, lo: f64, hi: f64, hi_sol: &InnerSolution) -> bool {
        let opts = self.options();
        let power = self.scenario().power;
        let width = hi - lo;
        if width <= 8.0 * f64::EPSILON * hi {
            return true;
        }
        width <= opts.bisect_tol * hi && power - hi_sol.beam_power() <= opts.bisect_tol * power
    }

    /// Bisection on the sign of `υ(β)` over `[ξ_E, β_up]`, where `υ(ξ_E) < 0`.
    fn bisect_above(&self, above: InnerSolution, iterations: &mut usize) -> Result<Bracketed> {
        let power = self.scenario().power;
        let opts = self.options();
        let mut lo = self.xi();
        let mut hi = 2.0 * self.xi();
        let mut hi_sol = above;
        let mut steps = 0;
        while power - hi_sol.beam_power() < 0.0 {
            steps += 1;
            if steps > opts.max_bisect_iters {
                return Err(Error::Convergence {
                    what: "multiplier bracket search",
                    iterations: opts.max_bisect_iters,
                });
            }
            lo = hi;
            hi *= opts.bracket_growth;
            hi_sol = self.algorithm1(hi, Some(&hi_sol.state.lambdas))?;
            *iterations += hi_sol.iterations;
        }
        steps = 0;
        while !self.bracket_done(lo, hi, &hi_sol) && steps < opts.max_bisect_iters {
            steps += 1;
            let mid = 0.5 * (lo + hi);
            // The optimum at hi is a supersolution at mid.
            let sol = self.algorithm1(mid, Some(&hi_sol.state.lambdas))?;
            *iterations += sol.iterations;
            if power - sol.beam_power() < 0.0 {
                lo = mid;
            } else {
                hi = mid;
                hi_sol = sol;
            }
        }
        Ok(Bracketed {
            beta: hi,
            sol: hi_sol,
        })
    }

    /// Bisection over `[0, ξ_E]` for the Type I multiplier when `υ(ξ_E) ≥ 0`.
    fn bisect_below(&self, at_xi: InnerSolution, iterations: &mut usize) -> Result<Bracketed> {
        let power = self.scenario().power;
        let opts = self.options();
        let mut lo = 0.0;
        let mut hi = self.xi();
        let mut hi_sol = at_xi;
        let mut steps = 0;
        while !self.bracket_done(lo, hi, &hi_sol) && steps < opts.max_bisect_iters {
            steps += 1;
            let mid = 0.5 * (lo + hi);
            match self.algorithm2(mid, &hi_sol.state.lambdas)? {
                InnerOutcome::Unbounded { iterations: n, .. } => {
                    *iterations += n;
                    lo = mid;
                }
                InnerOutcome::Bounded(sol) => {
                    *iterations += sol.iterations;
                    if power - sol.beam_power() < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                        hi_sol = sol;
                    }
                }
            }
        }
        Ok(Bracketed {
            beta: hi,
            sol: hi_sol,
        })
    }
}

/// Labels the regime of a solved instance from its two reports.
///
/// R3: both multipliers at `ξ_E` and both values equal `ξ_E P`. R1: no
/// energy-beam power and equal values. R2: positive energy-beam power and a
/// strict Type II gain.
pub fn classify_region(
    s: &Scenario,
    p1: &SolveReport,
    p2: &SolveReport,
    tol: f64,
) -> Result<Region> {
    let e = energy_matrix(s)?;
    let xi = e.xi;
    let top = xi * s.power;
    let near_xi = |b: f64| (b - xi).abs() <= tol * xi.max(f64::MIN_POSITIVE);
    let (v1, v2) = (p1.objective, p2.objective);
    let q = p2.energy_beam_power;
    if near_xi(p1.dual_beta)
        && near_xi(p2.dual_beta)
        && (v1 - top).abs() <= tol * top
        && (v2 - top).abs() <= tol * top
    {
        return Ok(Region::R3);
    }
    if q <= tol * s.power && (v1 - v2).abs() <= tol * top {
        return Ok(Region::R1);
    }
    if q > tol * s.power && v2 > v1 {
        return Ok(Region::R2);
    }
    Err(Error::Classification(format!(
        "values {v1:e} / {v2:e} with energy power {q:e} fit no region"
    )))
}
