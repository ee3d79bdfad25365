//! Subcommand bodies. Each returns the process exit code.

use std::path::Path;

use serde_json::{json, Value};
use swipt::duality::{DualProblem, SolverOptions};
use swipt::experiments::{
    compare_designs_with, sweep_gamma_with, write_csv, ExperimentConfig, SweepOptions, SweepTable,
};
use swipt::feasibility;
use swipt::io::{linear_to_db, read_scenario, report_to_json};
use swipt::model::{energy_matrix, validate_solution, DEFAULT_FEAS_TOL};
use swipt::sdr::{beams_from_sdr, solve_sdr, verify_structure, StructureTolerances};
use swipt::{Error, ReceiverType, Scenario, SolveReport};

use crate::{ScenarioArgs, SolveArgs, SweepArgs, VerifyArgs};

const OK: u8 = 0;
const USAGE: u8 = 1;
const INFEASIBLE: u8 = 2;
const VERIFY_FAILED: u8 = 3;
/// Interior-point target used by the oracle path.
const SDP_TOL: f64 = 1e-11;
/// Rank tolerance for beam extraction from SDR covariances.
const RANK_TOL: f64 = 1e-4;

fn fail(e: &Error) -> u8 {
    eprintln!("error: {e}");
    match e {
        Error::Infeasible(_) => INFEASIBLE,
        _ => USAGE,
    }
}

fn check_out(out: Option<&Path>) -> Result<(), Error> {
    if let Some(parent) = out.and_then(Path::parent) {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            return Err(Error::InvalidInput(format!(
                "output directory {} does not exist",
                parent.display()
            )));
        }
    }
    Ok(())
}

fn load(args: &ScenarioArgs) -> Result<Scenario, Error> {
    check_out(args.out.as_deref())?;
    read_scenario(&args.scenario)
}

fn solver_options(tol: Option<f64>) -> Result<SolverOptions, Error> {
    let mut opts = SolverOptions::default();
    if let Some(t) = tol {
        opts.fp_tol = t;
        opts.bisect_tol = t;
    }
    opts.validate()?;
    Ok(opts)
}

fn emit(args: &ScenarioArgs, value: &Value, text: impl FnOnce()) -> u8 {
    let pretty = serde_json::to_string_pretty(value).expect("JSON values serialize");
    if args.json {
        println!("{pretty}");
    } else {
        text();
    }
    if let Some(out) = &args.out {
        if let Err(e) = std::fs::write(out, pretty + "\n") {
            return fail(&Error::Io(e));
        }
    }
    OK
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn print_report(r: &SolveReport, receiver: ReceiverType) {
    println!("receiver            {}", receiver.label());
    println!("region              {}", r.region.label());
    println!(
        "harvested power     {:.6e} W ({:.6} mW)",
        r.objective,
        r.objective * 1e3
    );
    println!("transmit power      {:.6e} W", r.total_power);
    println!("energy beam power   {:.6e} W", r.energy_beam_power);
    let sinr_db: Vec<f64> = r.per_id_sinr.iter().map(|&v| linear_to_db(v)).collect();
    let parts: Vec<String> = sinr_db.iter().map(|x| format!("{x:.4}")).collect();
    println!("SINR (dB)           [{}]", parts.join(", "));
    println!("per-EH power (W)    {}", fmt_list(&r.per_eh_power));
    println!("beta                {:.6e}", r.dual_beta);
    println!("uplink lambdas      {}", fmt_list(&r.uplink_lambdas));
    println!("iterations          {}", r.iterations);
}

pub fn solve(a: &SolveArgs) -> u8 {
    let s = match load(&a.common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let opts = match solver_options(a.tol) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let pair = match DualProblem::new(&s, opts).and_then(|dp| dp.solve_both()) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let picked: Vec<(ReceiverType, &SolveReport)> = match a.receiver {
        Some(1) => vec![(ReceiverType::TypeI, &pair.p1)],
        Some(_) => vec![(ReceiverType::TypeII, &pair.p2)],
        None => vec![
            (ReceiverType::TypeI, &pair.p1),
            (ReceiverType::TypeII, &pair.p2),
        ],
    };
    let value = if picked.len() == 1 {
        report_to_json(picked[0].1, picked[0].0)
    } else {
        Value::Array(picked.iter().map(|(t, r)| report_to_json(r, *t)).collect())
    };
    emit(&a.common, &value, || {
        for (k, (t, r)) in picked.iter().enumerate() {
            if k > 0 {
                println!();
            }
            print_report(r, *t);
        }
    })
}

pub fn check(a: &ScenarioArgs) -> u8 {
    let s = match load(a) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let rep = match feasibility::check(&s) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let value = json!({
        "feasible": rep.feasible,
        "min_power_w": if rep.min_power.is_finite() { json!(rep.min_power) } else { Value::Null },
        "power_w": s.power,
        "oebf_feasible": rep.oebf_powers.is_some(),
        "oebf_powers_w": rep.oebf_powers,
    });
    let code = emit(a, &value, || {
        println!("feasible            {}", rep.feasible);
        println!("minimum power       {:.6e} W", rep.min_power);
        println!("budget              {:.6e} W", s.power);
        println!("OeBF feasible       {}", rep.oebf_powers.is_some());
    });
    if code != OK {
        code
    } else if rep.feasible {
        OK
    } else {
        INFEASIBLE
    }
}

fn summary(table: &SweepTable) -> Vec<Value> {
    table
        .designs()
        .into_iter()
        .map(|d| {
            let rows: Vec<_> = table.rows.iter().filter(|r| r.design == d).collect();
            json!({
                "design": d.label(),
                "gamma_db": rows.iter().map(|r| r.gamma_db).collect::<Vec<_>>(),
                "mean_mw": rows.iter().map(|r| r.mean_mw).collect::<Vec<_>>(),
                "feasible_rate": rows.iter().map(|r| r.feasible_rate).collect::<Vec<_>>(),
            })
        })
        .collect()
}

pub fn sweep(a: &SweepArgs, compare: bool) -> u8 {
    if let Err(e) = check_out(Some(&a.out)) {
        return fail(&e);
    }
    let mut cfg = match &a.config {
        Some(p) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        },
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let solver = match solver_options(a.tol) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let opts = SweepOptions {
        solver,
        ..SweepOptions::default()
    };
    let run = if compare {
        compare_designs_with
    } else {
        sweep_gamma_with
    };
    let table = match run(&cfg, &opts) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    if let Err(e) = write_csv(&table, &a.out) {
        return fail(&e);
    }
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary(&table)).expect("JSON values serialize")
        );
    } else {
        for d in table.designs() {
            let rows: Vec<_> = table.rows.iter().filter(|r| r.design == d).collect();
            let feasible = rows.iter().map(|r| r.feasible_rate).sum::<f64>() / rows.len() as f64;
            let (first, last) = (rows[0], rows[rows.len() - 1]);
            let mw = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4} mW"));
            println!(
                "{:<15} {} at {} dB, {} at {} dB, mean feasible rate {:.3}",
                d.label(),
                mw(first.mean_mw),
                first.gamma_db,
                mw(last.mean_mw),
                last.gamma_db,
                feasible
            );
        }
        println!("wrote {}", a.out.display());
    }
    OK
}

pub fn verify(a: &VerifyArgs) -> u8 {
    let s = match load(&a.common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let pair = match DualProblem::new(&s, SolverOptions::default()).and_then(|dp| dp.solve_both()) {
        Ok(p) => p,
        Err(e @ Error::Infeasible(_)) => return fail(&e),
        Err(e @ (Error::InvalidInput(_) | Error::Dimension(_))) => return fail(&e),
        Err(e) => {
            eprintln!("error: duality solver failed: {e}");
            return VERIFY_FAILED;
        }
    };
    let top = energy_matrix(&s).map(|e| e.xi * s.power).unwrap_or(0.0);
    let mut passed = true;
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    for (receiver, report) in [
        (ReceiverType::TypeI, &pair.p1),
        (ReceiverType::TypeII, &pair.p2),
    ] {
        let sdr = match solve_sdr(&s, receiver, SDP_TOL) {
            Ok(x) => x,
            Err(e) => {
                eprintln!("error: SDR oracle failed for {}: {e}", receiver.label());
                return VERIFY_FAILED;
            }
        };
        let scale = sdr.value.abs().max(1e-12 * top).max(f64::MIN_POSITIVE);
        let gap = (report.objective - sdr.value).abs() / scale;
        let gap_ok = gap <= a.tol;
        let structure = match verify_structure(&sdr, &s, receiver, &StructureTolerances::default())
        {
            Ok(r) => r,
            Err(e) => {
                eprintln!(
                    "error: structure check failed for {}: {e}",
                    receiver.label()
                );
                return VERIFY_FAILED;
            }
        };
        let beams_ok = match beams_from_sdr(&sdr, RANK_TOL) {
            Ok(b) => validate_solution(&b, &s, DEFAULT_FEAS_TOL).is_empty(),
            Err(_) => false,
        };
        let ok = gap_ok && structure.passed() && beams_ok;
        passed &= ok;
        lines.push(format!(
            "{}: duality {:.9e} W, SDR {:.9e} W, relative gap {:.3e} [{}]",
            receiver.label(),
            report.objective,
            sdr.value,
            gap,
            if gap_ok { "ok" } else { "FAIL" }
        ));
        lines.push(format!(
            "  trace(W_E)/P {:.3e}, alignment {}, rank ratios {}, max slackness {:.3e}, rank-one beams {}",
            structure.energy_trace / s.power,
            structure
                .energy_alignment
                .map_or("n/a".to_string(), |x| format!("{x:.9}")),
            fmt_list(&structure.rank_ratios),
            structure.slackness.iter().copied().fold(0.0, f64::max),
            if beams_ok { "feasible" } else { "INFEASIBLE" }
        ));
        for f in &structure.failures {
            lines.push(format!("  FAIL {f}"));
        }
        entries.push(json!({
            "receiver": receiver.label(),
            "duality_value_w": report.objective,
            "sdr_value_w": sdr.value,
            "relative_gap": gap,
            "energy_trace_w": structure.energy_trace,
            "energy_alignment": structure.energy_alignment,
            "rank_ratios": structure.rank_ratios,
            "slackness": structure.slackness,
            "rank_one_beams_feasible": beams_ok,
            "failures": structure.failures,
            "passed": ok,
        }));
    }
    let value = json!({ "passed": passed, "checks": entries });
    let code = emit(&a.common, &value, || {
        for l in &lines {
            println!("{l}");
        }
        println!(
            "{}",
            if passed {
                "verification passed"
            } else {
                "verification FAILED"
            }
        );
    });
    if code != OK {
        code
    } else if passed {
        OK
    } else {
        VERIFY_FAILED
    }
}
