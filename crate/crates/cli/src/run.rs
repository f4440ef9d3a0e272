use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use swlab_core::experiments::{
    acceleration_persistence, bound_state_probe, decay_exponent_fit_seeded, deviation_scan,
    deviation_scan_negative, Cell, DeviationReport,
};
use swlab_core::FiberState;

use crate::config::{self, ExperimentSection, Kind};
use crate::CliError;

pub const CSV_HEADER: &str = "experiment,n,k,t,window_prob,dev_norm,err,leak,valid";

struct Outcome {
    cells: Vec<Cell>,
    summary: String,
    pass: bool,
}

pub fn run(config_path: &Path, out: &Path, only: &[String], seed: u64) -> Result<(), CliError> {
    let cfg = config::load(config_path)?;
    for name in only {
        if !cfg.experiments.contains_key(name) {
            return Err(CliError::Config(format!("unknown experiment `{name}` in --only")));
        }
    }
    let base = config_path.parent().unwrap_or(Path::new("."));
    let selected: Vec<(&String, &ExperimentSection)> = cfg
        .experiments
        .iter()
        .filter(|(name, _)| only.is_empty() || only.contains(name))
        .collect();
    // validate everything before spending time on any run
    let specs = selected
        .iter()
        .map(|(name, sec)| sec.spec(name, base))
        .collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(out).map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;

    let mut summary = String::new();
    let mut all_pass = true;
    for ((name, sec), spec) in selected.iter().zip(&specs) {
        let o = run_one(sec, spec, seed)?;
        write_csv(&out.join(format!("{name}.csv")), name, &o.cells)?;
        let _ = writeln!(
            summary,
            "{name}: {} {}",
            if o.pass { "pass" } else { "fail" },
            o.summary
        );
        all_pass &= o.pass;
    }
    fs::write(out.join("summary.txt"), &summary).map_err(|e| CliError::Internal(e.to_string()))?;
    print!("{summary}");
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Failure("some experiments failed their checks; see summary.txt".into()))
    }
}

fn run_one(sec: &ExperimentSection, spec: &swlab_core::experiments::ExperimentSpec, seed: u64) -> Result<Outcome, CliError> {
    let mut notes = Vec::new();
    if let Some(alpha) = sec.alpha {
        notes.push(format!("norm_alpha={:.6e}", spec.scaled_potential().sobolev_norm(alpha)));
    }
    let outcome = match sec.experiment {
        Kind::DeviationScan | Kind::DeviationScanNegative => {
            let reports = if sec.experiment == Kind::DeviationScan {
                deviation_scan(spec)
            } else {
                deviation_scan_negative(spec)
            }
            .map_err(CliError::from_run)?;
            scan_outcome(sec, &reports, seed, notes)
        }
        Kind::AccelerationPersistence => {
            let rep = acceleration_persistence(spec, sec.epsilon).map_err(CliError::from_run)?;
            let valid = rep.cells.iter().all(|c| c.valid);
            notes.push(match rep.found {
                Some(n) => format!("found_n={n}"),
                None => "found_n=none".into(),
            });
            Outcome {
                pass: valid,
                summary: with_valid(notes, valid),
                cells: rep.cells,
            }
        }
        Kind::BoundStateProbe => {
            let start = spec.n_list[0];
            let cfg = spec.cell_config(start, spec.t_max);
            let psi0 = spec
                .k_values()
                .into_iter()
                .map(|k| FiberState::unit(cfg.half_width, start, k, 0.0))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::from_run)?;
            let res = bound_state_probe(&psi0, spec).map_err(CliError::from_run)?;
            let valid = res.iter().all(|r| r.cells.iter().all(|c| c.valid));
            for r in &res {
                notes.push(format!(
                    "n={}:{}",
                    r.n,
                    if r.inconclusive {
                        "inconclusive"
                    } else if r.decaying {
                        "decaying"
                    } else {
                        "not_decaying"
                    }
                ));
            }
            notes.push("(finite-horizon heuristic)".into());
            Outcome {
                pass: valid,
                summary: with_valid(notes, valid),
                cells: res.into_iter().flat_map(|r| r.cells).collect(),
            }
        }
    };
    Ok(outcome)
}

fn with_valid(mut notes: Vec<String>, valid: bool) -> String {
    notes.insert(0, format!("valid={valid}"));
    notes.join(" ")
}

fn scan_outcome(sec: &ExperimentSection, reports: &[DeviationReport], seed: u64, mut notes: Vec<String>) -> Outcome {
    let valid = reports.iter().all(|r| r.valid);
    let mut pass = valid;
    let distinct = {
        let mut ns: Vec<i64> = reports.iter().map(|r| r.n.abs()).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.len()
    };
    let want_fit = sec.min_exponent.is_some() || sec.max_exponent.is_some();
    if distinct >= 5 {
        match decay_exponent_fit_seeded(reports, seed) {
            Ok(fit) => {
                notes.push(format!("exponent={:.6} ci={:.6}", fit.exponent, fit.ci));
                if sec.min_exponent.is_some_and(|m| fit.exponent < m)
                    || sec.max_exponent.is_some_and(|m| fit.exponent > m)
                {
                    pass = false;
                }
            }
            Err(e) => {
                notes.push(format!("exponent=none ({e})"));
                pass &= !want_fit;
            }
        }
    } else if want_fit {
        notes.push("exponent=none (fewer than 5 windows)".into());
        pass = false;
    }
    let sups: Vec<String> = reports
        .iter()
        .map(|r| format!("{}:{:.3e}{}", r.n, r.dev_norm, if r.converged { "" } else { "*" }))
        .collect();
    notes.push(format!("sup_dev=[{}]", sups.join(" ")));
    Outcome {
        pass,
        summary: with_valid(notes, valid),
        cells: reports.iter().flat_map(|r| r.cells.iter().copied()).collect(),
    }
}

fn write_csv(path: &Path, name: &str, cells: &[Cell]) -> Result<(), CliError> {
    let mut s = String::with_capacity(128 * (cells.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for c in cells {
        let _ = writeln!(
            s,
            "{name},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            c.n, c.k, c.t, c.window_prob, c.dev_norm, c.err, c.leak, c.valid
        );
    }
    fs::write(path, s).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}
