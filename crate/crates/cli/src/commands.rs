use std::fmt::Write as _;

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};
use tribell::inequalities::Settings;
use tribell::shots::EstimatedReport;
use tribell::{
    correlation_tensor, estimate_tensor, evaluate, lhv_max, optimize, sample_counts, Functional,
    Model, OptimizationConfig, SettingsPair,
};

use crate::args::{CorrelationsArgs, LhvScanArgs, OptimizeArgs, ReproduceArgs, SampleArgs};
use crate::manifest::Manifest;

/// A rendered command result in all three output formats.
pub struct Report {
    pub json: Value,
    pub table: String,
    pub csv: String,
    /// Every checked value matched its expectation.
    pub ok: bool,
}

const PARTIES: [&str; 3] = ["a", "b", "c"];

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("in-memory CSV write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory CSV flush")).expect("utf-8 CSV")
}

pub fn settings_json(settings: &Settings) -> Value {
    Value::Array(
        settings
            .iter()
            .zip(PARTIES)
            .map(|(p, party)| {
                json!({
                    "party": party,
                    "phi_deg": p.phi.degrees(),
                    "phi_prime_deg": p.phi_prime.degrees(),
                    "phi_rad": p.phi.radians(),
                    "phi_prime_rad": p.phi_prime.radians(),
                })
            })
            .collect(),
    )
}

fn settings_table(settings: &Settings, out: &mut String) {
    for (p, party) in settings.iter().zip(PARTIES) {
        let _ = writeln!(
            out,
            "  {party}: phi = {:10.4}°  phi' = {:10.4}°",
            p.phi.degrees(),
            p.phi_prime.degrees()
        );
    }
}

/// Builds per-party settings from one pair (shared) or three pairs.
pub fn settings_from_pairs(pairs: &[(f64, f64)], radians: bool) -> anyhow::Result<Settings> {
    let make = |&(a, b): &(f64, f64)| {
        if radians {
            SettingsPair::from_radians(a, b)
        } else {
            SettingsPair::from_degrees(a, b)
        }
    };
    Ok(match pairs {
        [one] => [make(one)?; 3],
        [a, b, c] => [make(a)?, make(b)?, make(c)?],
        _ => anyhow::bail!("--pairs must be given once or three times, got {}", pairs.len()),
    })
}

pub fn reproduce(args: &ReproduceArgs) -> anyhow::Result<Report> {
    let manifest = Manifest::load(args.manifest.as_deref())?;
    let rows = manifest
        .row
        .iter()
        .map(|r| r.evaluate().with_context(|| format!("row {}", r.id)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.pass);
    let mut table = format!("{:<32} {:>12} {:>12} {:>10}  status\n", "quantity", "value", "expected", "tolerance");
    for r in &rows {
        let _ = writeln!(
            table,
            "{:<32} {:>12.6} {:>12.6} {:>10.0e}  {}",
            r.label,
            r.value,
            r.expected,
            r.tolerance,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    let _ = writeln!(table, "{}", if ok { "all rows pass" } else { "some rows FAIL" });
    Ok(Report {
        json: json!({ "rows": to_value(&rows), "all_pass": ok }),
        csv: csv_string(&rows),
        table,
        ok,
    })
}

pub fn optimize_cmd(args: &OptimizeArgs, radians: bool) -> anyhow::Result<Report> {
    let rho = args.state.state.load(args.state.visibility)?;
    let mut config = OptimizationConfig {
        refine_tolerance: args.refine_tolerance,
        max_refine_iterations: args.max_iterations,
        random_restarts: args.restarts,
        seed: args.seed,
        ..OptimizationConfig::default()
    };
    if let Some(step) = args.grid_step {
        config.grid_step = if radians { step } else { step.to_radians() };
    }
    let r = optimize(&rho, args.functional, &config)?;
    let report = evaluate(&rho, &r.best_settings, args.functional);

    #[derive(Serialize)]
    struct TraceRow {
        iteration: usize,
        value: f64,
    }
    let trace_csv = csv_string(r.trace.iter().map(|&(iteration, value)| TraceRow { iteration, value }));
    if let Some(path) = &args.trace_csv {
        std::fs::write(path, &trace_csv).with_context(|| format!("writing {}", path.display()))?;
    }

    let mut table = format!(
        "max |{}| for state {} (visibility {}): {:.8}\n",
        args.functional, args.state.state, args.state.visibility, r.best_value
    );
    settings_table(&r.best_settings, &mut table);
    let _ = writeln!(
        table,
        "classification: {:?}; {} refinement runs, {} evaluations",
        report.classification, r.restarts_used, r.evaluations
    );
    Ok(Report {
        json: json!({
            "functional": args.functional,
            "state": args.state.state.to_string(),
            "visibility": args.state.visibility,
            "best_value": r.best_value,
            "settings": settings_json(&r.best_settings),
            "classification": report.classification,
            "restarts_used": r.restarts_used,
            "evaluations": r.evaluations,
            "config": config,
        }),
        csv: trace_csv,
        table,
        ok: true,
    })
}

pub fn lhv_scan(args: &LhvScanArgs) -> anyhow::Result<Report> {
    let functionals = args.functional.map_or(Functional::ALL.to_vec(), |f| vec![f]);
    let models = args.model.map_or(Model::ALL.to_vec(), |m| vec![m]);
    let results: Vec<_> = functionals
        .iter()
        .flat_map(|&f| models.iter().map(move |&m| lhv_max(f, m)))
        .collect();

    #[derive(Serialize)]
    struct Row {
        functional: Functional,
        model: Model,
        max_value: f64,
        strategies_checked: usize,
    }
    let rows: Vec<Row> = results
        .iter()
        .map(|r| Row {
            functional: r.functional,
            model: r.model,
            max_value: r.max_value,
            strategies_checked: r.strategies_checked,
        })
        .collect();
    let mut table = format!("{:<12} {:<8} {:>6} {:>12}\n", "functional", "model", "max", "strategies");
    for r in &rows {
        let _ = writeln!(
            table,
            "{:<12} {:<8} {:>6} {:>12}",
            r.functional.to_string(),
            r.model.to_string(),
            r.max_value,
            r.strategies_checked
        );
    }
    let ok = results.iter().all(|r| r.verify());
    Ok(Report {
        json: json!({ "results": to_value(&results) }),
        csv: csv_string(&rows),
        table,
        ok,
    })
}

pub fn sample(args: &SampleArgs, radians: bool) -> anyhow::Result<Report> {
    let rho = args.state.state.load(args.state.visibility)?;
    let pairs = settings_from_pairs(&args.pairs.pairs, radians)?;
    let counts = sample_counts(&rho, &pairs, args.shots, args.seed)?;
    let (tensor, errors) = estimate_tensor(&counts)?;
    let report = EstimatedReport::from_tensor(&tensor, &errors, args.functional);
    let mut table = format!(
        "{} shots per setting, seed {}, state {} (visibility {})\n",
        args.shots, args.seed, args.state.state, args.state.visibility
    );
    settings_table(&pairs, &mut table);
    for (n, (e, s)) in tensor.entries().iter().zip(&errors).enumerate() {
        let _ = writeln!(table, "  E{}{}{} = {e:+.6} ± {s:.6}", n >> 2 & 1, n >> 1 & 1, n & 1);
    }
    let z = report.z_score.map_or("n/a".to_string(), |z| format!("{z:.3}"));
    let _ = writeln!(
        table,
        "{} = {:+.6} ± {:.6} (bound {}), z = {z}, {:?}",
        args.functional, report.report.value, report.std_error, report.report.bound, report.report.classification
    );
    Ok(Report {
        json: json!({
            "shots": args.shots,
            "seed": args.seed,
            "state": args.state.state.to_string(),
            "visibility": args.state.visibility,
            "settings": settings_json(&pairs),
            "counts": to_value(&counts),
            "tensor": to_value(&tensor),
            "std_errors": errors.to_vec(),
            "report": to_value(&report),
        }),
        csv: counts.to_csv(),
        table,
        ok: true,
    })
}

pub fn correlations(args: &CorrelationsArgs, radians: bool) -> anyhow::Result<Report> {
    let rho = args.state.state.load(args.state.visibility)?;
    let pairs = settings_from_pairs(&args.pairs.pairs, radians)?;
    let tensor = correlation_tensor(&rho, &pairs);
    let mermin = evaluate(&rho, &pairs, Functional::Mermin);
    let svetlichny = evaluate(&rho, &pairs, Functional::Svetlichny);
    let mut table = format!("state {} (visibility {})\n", args.state.state, args.state.visibility);
    settings_table(&pairs, &mut table);
    for (n, e) in tensor.entries().iter().enumerate() {
        let _ = writeln!(table, "  E{}{}{} = {e:+.9}", n >> 2 & 1, n >> 1 & 1, n & 1);
    }
    for r in [&mermin, &svetlichny] {
        let _ = writeln!(
            table,
            "{:<10} = {:+.9} (bound {}, algebraic max {}): {:?}{}",
            r.functional.to_string(),
            r.value,
            r.bound,
            r.algebraic_max,
            r.classification,
            if r.degenerate { " [degenerate settings]" } else { "" }
        );
    }
    Ok(Report {
        json: json!({
            "state": args.state.state.to_string(),
            "visibility": args.state.visibility,
            "settings": settings_json(&pairs),
            "tensor": to_value(&tensor),
            "mermin": to_value(&mermin),
            "svetlichny": to_value(&svetlichny),
        }),
        csv: tensor.to_csv(),
        table,
        ok: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_expand() {
        let s = settings_from_pairs(&[(90.0, 0.0)], false).unwrap();
        assert!(s.iter().all(|p| (p.phi.degrees() - 90.0).abs() < 1e-12));
        let s = settings_from_pairs(&[(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)], true).unwrap();
        assert!((s[2].phi_prime.radians() - 3.0).abs() < 1e-15);
        assert!(settings_from_pairs(&[(0.0, 1.0), (0.0, 2.0)], false).is_err());
    }
}
