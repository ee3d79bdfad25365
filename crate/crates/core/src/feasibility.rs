//! SINR feasibility pre-checks.
//!
//! [`min_power_beams`] finds the minimum sum-power information beams meeting
//! every SINR target; the scenario is feasible iff that power fits the
//! budget. [`oebf_feasibility`] tests whether aligning every information beam
//! with the dominant eigenvector of `G` already meets the targets, in which
//! case both joint problems are trivially solved.

use crate::duality::{DualProblem, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{row_dot, spectral_radius, CVector, C64};
use crate::model::{energy_matrix, EnergyProfile, Scenario};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Minimum sum power meeting every SINR target, `+∞` when unreachable.
    pub min_power: f64,
    pub min_power_beams: Vec<CVector>,
    /// Minimal powers of the OeBF-aligned solution, when one fits the budget.
    pub oebf_powers: Option<Vec<f64>>,
}

/// Minimum sum-power beams meeting every SINR target with equality.
pub fn min_power_beams(s: &Scenario) -> Result<(Vec<CVector>, f64)> {
    min_power_beams_with(s, &SolverOptions::default(), None)
}

/// As [`min_power_beams`] with explicit options and uplink start point.
pub fn min_power_beams_with(
    s: &Scenario,
    opts: &SolverOptions,
    start: Option<&[f64]>,
) -> Result<(Vec<CVector>, f64)> {
    if s.k_i() == 0 {
        return Err(Error::InvalidInput(
            "minimum-power beams need an ID receiver".into(),
        ));
    }
    let dp = DualProblem::min_power(s, opts.clone())?;
    let sol = match dp.algorithm1(1.0, start) {
        Ok(sol) => sol,
        Err(Error::Mapping(rho)) => {
            return Err(Error::Infeasible(format!(
                "downlink coupling has spectral radius {rho}"
            )))
        }
        Err(Error::Convergence { .. }) => {
            return Err(Error::Infeasible(
                "uplink powers did not settle: SINR targets unreachable".into(),
            ))
        }
        Err(e) => return Err(e),
    };
    let p = sol.beam_power();
    Ok((sol.beams, p))
}

pub fn is_feasible(s: &Scenario) -> bool {
    matches!(min_power_beams(s), Ok((_, p)) if p <= s.power)
}

/// Minimal powers for information beams aligned with `v_E`, if they fit the
/// budget.
pub fn oebf_feasibility(s: &Scenario) -> Result<Option<Vec<f64>>> {
    let e = energy_matrix(s)?;
    Ok(oebf_feasibility_with(s, &e))
}

pub fn oebf_feasibility_with(s: &Scenario, e: &EnergyProfile) -> Option<Vec<f64>> {
    let k = s.k_i();
    if k == 0 {
        return Some(Vec::new());
    }
    let a: Vec<f64> = s.h.iter().map(|h| row_dot(h, &e.v).norm_sqr()).collect();
    if a.contains(&0.0) {
        return None;
    }
    let d = DMatrix::from_fn(k, k, |i, j| if i == j { 0.0 } else { s.gamma[i] });
    if !(spectral_radius(&d) < 1.0) {
        return None;
    }
    let u = DVector::from_fn(k, |i, _| s.gamma[i] * s.sigma2[i] / a[i]);
    let p = (DMatrix::identity(k, k) - d).lu().solve(&u)?;
    if p.iter().any(|&v| !(v >= 0.0)) || p.sum() > s.power {
        return None;
    }
    Some(p.iter().copied().collect())
}

/// Full-budget OeBF-aligned beams `w_i = sqrt(P p_i / Σp) v_E`.
pub fn oebf_beams(s: &Scenario, e: &EnergyProfile, p: &[f64]) -> Vec<CVector> {
    let total: f64 = p.iter().sum();
    p.iter()
        .map(|&pi| &e.v * C64::new((s.power * pi / total).sqrt(), 0.0))
        .collect()
}

pub fn check(s: &Scenario) -> Result<FeasibilityReport> {
    s.validate()?;
    let (beams, p_min) = match min_power_beams(s) {
        Ok(r) => r,
        Err(Error::Infeasible(_)) => (Vec::new(), f64::INFINITY),
        Err(e) => return Err(e),
    };
    Ok(FeasibilityReport {
        feasible: p_min <= s.power,
        min_power: p_min,
        min_power_beams: beams,
        oebf_powers: oebf_feasibility(s)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sinr, BeamSolution, ReceiverType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rvec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn scenario(rng: &mut ChaCha8Rng, m: usize, k_i: usize, gamma: f64, power: f64) -> Scenario {
        Scenario::new(
            m,
            (0..k_i).map(|_| rvec(rng, m)).collect(),
            (0..2).map(|_| rvec(rng, m)).collect(),
            vec![0.01; k_i],
            vec![gamma; k_i],
            vec![0.5, 0.5],
            0.5,
            power,
        )
        .unwrap()
    }

    #[test]
    fn scalar_closed_form() {
        let h = CVector::from_vec(vec![c(0.3, 0.4)]);
        let s = Scenario::new(1, vec![h], vec![], vec![0.1], vec![2.0], vec![], 1.0, 10.0).unwrap();
        let (_, p) = min_power_beams(&s).unwrap();
        assert!((p - 2.0 * 0.1 / 0.25).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_channels_decouple() {
        let h1 = CVector::from_vec(vec![c(1.0, 0.5), c(0.0, 0.0), c(0.0, 0.0)]);
        let h2 = CVector::from_vec(vec![c(0.0, 0.0), c(0.2, -0.7), c(0.0, 0.0)]);
        let s = Scenario::new(
            3,
            vec![h1.clone(), h2.clone()],
            vec![],
            vec![0.1, 0.3],
            vec![3.0, 5.0],
            vec![],
            1.0,
            100.0,
        )
        .unwrap();
        let (_, p) = min_power_beams(&s).unwrap();
        let oracle = 3.0 * 0.1 / h1.norm_squared() + 5.0 * 0.3 / h2.norm_squared();
        assert!((p - oracle).abs() <= 1e-10 * oracle);
    }

    #[test]
    fn min_power_beams_are_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = scenario(&mut rng, 4, 3, 2.0, 100.0);
        let (beams, p) = min_power_beams(&s).unwrap();
        let sol = BeamSolution::new(beams, vec![], ReceiverType::TypeI);
        assert!((sol.total_power() - p).abs() < 1e-14 * p.max(1.0));
        for i in 0..3 {
            let r = sinr(&sol, &s, i).unwrap();
            assert!((r - 2.0).abs() <= 1e-8 * 2.0, "user {i}: {r}");
        }
    }

    #[test]
    fn budget_decides_feasibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = scenario(&mut rng, 4, 2, 1.0, 1.0);
        let (_, p) = min_power_beams(&s).unwrap();
        assert!(is_feasible(&s.with_power(2.0 * p)));
        assert!(!is_feasible(&s.with_power(0.5 * p)));
        let report = check(&s.with_power(0.5 * p)).unwrap();
        assert!(!report.feasible);
        assert!((report.min_power - p).abs() <= 1e-12 * p);
    }

    #[test]
    fn interference_limited_targets_are_infeasible() {
        // Three users on a two-antenna array cannot all reach a huge SINR.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = scenario(&mut rng, 2, 3, 1e4, 1.0);
        assert!(matches!(min_power_beams(&s), Err(Error::Infeasible(_))));
        assert!(!is_feasible(&s));
    }

    #[test]
    fn start_point_does_not_change_min_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = scenario(&mut rng, 4, 3, 3.0, 100.0);
        let opts = SolverOptions::default();
        let (_, p0) = min_power_beams_with(&s, &opts, None).unwrap();
        for _ in 0..5 {
            let start: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..100.0)).collect();
            let (_, p) = min_power_beams_with(&s, &opts, Some(&start)).unwrap();
            assert!((p - p0).abs() <= 1e-6 * p0);
        }
    }

    #[test]
    fn oebf_scalar_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = scenario(&mut rng, 3, 1, 0.5, 1.0);
        let e = energy_matrix(&s).unwrap();
        let a = row_dot(&s.h[0], &e.v).norm_sqr();
        let p1 = 0.5 * 0.01 / a;
        let got = oebf_feasibility(&s.with_power(p1 * 1.01)).unwrap().unwrap();
        assert!((got[0] - p1).abs() <= 1e-12 * p1);
        assert!(oebf_feasibility(&s.with_power(p1 * 0.99))
            .unwrap()
            .is_none());
    }

    #[test]
    fn oebf_interference_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = scenario(&mut rng, 4, 2, 1.5, 1e9);
        assert!(oebf_feasibility(&s).unwrap().is_none());
    }

    #[test]
    fn oebf_powers_satisfy_constraints_and_are_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = scenario(&mut rng, 4, 3, 0.2, 10.0);
        let e = energy_matrix(&s).unwrap();
        let p = oebf_feasibility_with(&s, &e).expect("small targets align with the OeBF");
        assert!(p.iter().sum::<f64>() <= s.power);
        let sol = BeamSolution::new(
            p.iter().map(|&pi| &e.v * c(pi.sqrt(), 0.0)).collect(),
            vec![],
            ReceiverType::TypeI,
        );
        for i in 0..3 {
            assert!(sinr(&sol, &s, i).unwrap() >= 0.2 * (1.0 - 1e-10));
        }
        // Any perturbed feasible p' dominates p component-wise.
        let a: Vec<f64> = s.h.iter().map(|h| row_dot(h, &e.v).norm_sqr()).collect();
        for _ in 0..200 {
            let q: Vec<f64> = p
                .iter()
                .map(|&pi| pi * rng.random_range(0.5..2.0))
                .collect();
            let ok = (0..3).all(|i| {
                let interf: f64 = (0..3).filter(|&k| k != i).map(|k| q[k]).sum();
                q[i] * a[i] >= 0.2 * (interf * a[i] + s.sigma2[i])
            });
            if ok {
                assert!(q.iter().zip(&p).all(|(qi, pi)| qi >= &(pi * (1.0 - 1e-12))));
            }
        }
        let full = oebf_beams(&s, &e, &p);
        let total: f64 = full.iter().map(|w| w.norm_squared()).sum();
        assert!((total - s.power).abs() <= 1e-12 * s.power);
    }
}
