//! Cross-checks between the duality solver, the SDR oracle, the baselines
//! and the experiment pipeline.

use proptest::prelude::*;
use swipt::baselines::{separate_design_type1, separate_design_type2};
use swipt::duality::{DualProblem, SolverOptions};
use swipt::experiments::{
    gen_scenario_at, read_csv, sweep_gamma_with, write_csv, ExperimentConfig, SweepOptions,
};
use swipt::feasibility::{check, min_power_beams};
use swipt::model::{energy_matrix, objective_value, validate_solution, DEFAULT_FEAS_TOL};
use swipt::par::Execution;
use swipt::sdr::{sdr_min_power, solve_sdr};
use swipt::{ReceiverType, Region, Scenario};

fn draw(k_i: usize, seed: u64, trial: usize, gamma_db: f64) -> Scenario {
    let cfg = ExperimentConfig {
        k_i,
        seed,
        ..ExperimentConfig::default()
    };
    gen_scenario_at(&cfg, trial, gamma_db).unwrap()
}

#[test]
fn feasibility_agrees_with_relaxed_min_power() {
    let mut feasible = 0;
    for t in 0..50 {
        let s = draw(2 + t % 3, 21, t, [5.0, 10.0, 12.5][t % 3]);
        let rep = check(&s).unwrap();
        let relaxed = sdr_min_power(&s, 1e-10).unwrap();
        assert_eq!(
            rep.feasible,
            relaxed <= s.power,
            "trial {t}: {} vs {relaxed}",
            rep.min_power
        );
        if rep.min_power.is_finite() {
            assert!(
                (rep.min_power - relaxed).abs() <= 1e-6 * relaxed,
                "trial {t}"
            );
        } else {
            assert!(relaxed.is_infinite());
        }
        feasible += rep.feasible as usize;
    }
    // The corpus must exercise both outcomes.
    assert!(feasible > 5 && feasible < 45, "{feasible}");
}

#[test]
fn min_power_beams_meet_targets_with_relaxed_power() {
    for t in 0..10 {
        let s = draw(3, 22, t, 5.0);
        let (beams, p) = min_power_beams(&s).unwrap();
        let total: f64 = beams.iter().map(|w| w.norm_squared()).sum();
        assert!((total - p).abs() <= 1e-9 * p);
        let relaxed = sdr_min_power(&s, 1e-10).unwrap();
        assert!((p - relaxed).abs() <= 1e-6 * relaxed);
    }
}

#[test]
fn dual_function_at_optimum_equals_primal_values() {
    let mut r2 = 0;
    for t in 0..16 {
        let s = draw(2, 23, t, [2.5, 5.0][t % 2]);
        if !check(&s).unwrap().feasible {
            continue;
        }
        let dp = DualProblem::new(&s, SolverOptions::default()).unwrap();
        let pair = dp.solve_both().unwrap();
        let v1 = solve_sdr(&s, ReceiverType::TypeI, 1e-11).unwrap().value;
        let v2 = solve_sdr(&s, ReceiverType::TypeII, 1e-11).unwrap().value;
        let f1 = dp.f1(pair.p1.dual_beta).unwrap().value;
        let f2 = dp.f2(pair.p2.dual_beta).unwrap().value;
        assert!((f1 - v1).abs() <= 1e-5 * v1, "trial {t}: f1 {f1} vs {v1}");
        assert!((f2 - v2).abs() <= 1e-5 * v2, "trial {t}: f2 {f2} vs {v2}");
        if pair.p2.region == Region::R2 {
            r2 += 1;
            assert_eq!(pair.p2.dual_beta, dp.xi());
        }
    }
    assert!(r2 > 0);
}

#[test]
fn baselines_never_beat_joint_designs() {
    for t in 0..20 {
        let s = draw(2, 24, t, [-5.0, 0.0, 5.0, 7.5][t % 4]);
        let Ok(pair) =
            DualProblem::new(&s, SolverOptions::default()).and_then(|dp| dp.solve_both())
        else {
            continue;
        };
        for (base, joint) in [
            (separate_design_type1(&s).unwrap(), &pair.p1),
            (separate_design_type2(&s).unwrap(), &pair.p2),
        ] {
            assert!(validate_solution(&base.solution, &s, DEFAULT_FEAS_TOL).is_empty());
            assert!(
                (objective_value(&base.solution, &s) - base.objective).abs()
                    <= 1e-12 * joint.objective
            );
            assert!(base.objective <= joint.objective * (1.0 + 1e-9));
        }
    }
}

#[test]
fn sequential_and_parallel_sweeps_match_and_round_trip() {
    let cfg = ExperimentConfig {
        trials: 12,
        gamma_db: vec![-5.0, 5.0, 10.0],
        ..ExperimentConfig::default()
    };
    let par = sweep_gamma_with(&cfg, &SweepOptions::default()).unwrap();
    let seq = sweep_gamma_with(
        &cfg,
        &SweepOptions {
            execution: Execution::Sequential,
            ..SweepOptions::default()
        },
    )
    .unwrap();
    assert_eq!(par, seq);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_csv(&par, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), par.rows);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn joint_values_are_bracketed_by_relaxations(trial in 0usize..5_000, gamma_db in -5.0f64..10.0, k_i in 1usize..4) {
        let s = draw(k_i, 25, trial, gamma_db);
        let solved = DualProblem::new(&s, SolverOptions::default()).and_then(|dp| dp.solve_both());
        prop_assume!(!matches!(solved, Err(swipt::Error::Infeasible(_))));
        let pair = solved.unwrap();
        let top = energy_matrix(&s).unwrap().xi * s.power;
        for (r, receiver) in [(&pair.p1, ReceiverType::TypeI), (&pair.p2, ReceiverType::TypeII)] {
            prop_assert!(validate_solution(&r.solution, &s, DEFAULT_FEAS_TOL).is_empty());
            prop_assert!(r.objective <= top * (1.0 + 1e-9));
            let sdr = solve_sdr(&s, receiver, 1e-11).unwrap().value;
            prop_assert!((r.objective - sdr).abs() <= 1e-4 * sdr, "{} vs {}", r.objective, sdr);
        }
        prop_assert!(pair.p2.objective >= pair.p1.objective * (1.0 - 1e-9));
    }
}
