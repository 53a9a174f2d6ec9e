//! Artifact writing for single scenarios and the comparison run.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use dmnkit::circuit::{export_csv, export_touchstone, s_parameters, to_db, SParameterSweep};
use serde_json::{json, Value};

use crate::config::{RunConfig, Scenario};
use crate::design::design;
use crate::report::{bandwidth_entry, bandwidth_specs, design_report, measure};

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes the design report and netlist; with `sweep` also the S-parameter
/// files and bandwidths. Returns the sweep when one was run.
pub fn run_scenario(cfg: &RunConfig, scenario: Scenario, dir: &Path, sweep: bool) -> Result<Option<SParameterSweep>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let d = design(cfg, scenario).with_context(|| format!("{} design", scenario.name()))?;
    write_json(&dir.join("design_report.json"), &design_report(&d, cfg))?;
    let netlist = d.netlist(cfg)?;
    let text = netlist.to_json()?;
    fs::write(dir.join("netlist.json"), text + "\n").context("writing netlist.json")?;
    if !sweep {
        return Ok(None);
    }
    let s = s_parameters(&netlist, &cfg.grid()).with_context(|| format!("{} sweep", scenario.name()))?;
    export_touchstone(&s, &dir.join("sweep.s2p"))?;
    export_csv(&s, &dir.join("sweep.csv"))?;
    let entries: Vec<Value> = bandwidth_specs(scenario)
        .iter()
        .map(|spec| bandwidth_entry(spec, &measure(&s, spec, cfg.reference_frequency_hz)))
        .collect();
    write_json(&dir.join("bandwidth.json"), &json!({ "scenario": scenario.name(), "bandwidths": entries }))?;
    Ok(Some(s))
}

/// Runs every design scenario into its own subdirectory, then writes the
/// combined magnitude table and a summary at `f_r`.
pub fn run_compare(cfg: &RunConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let results: Vec<Result<SParameterSweep>> = std::thread::scope(|scope| {
        let handles: Vec<_> = Scenario::DESIGNS
            .iter()
            .map(|&s| {
                scope.spawn(move || {
                    let sweep = run_scenario(cfg, s, &dir.join(s.name()), true)?;
                    Ok(sweep.expect("sweep requested"))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let sweeps = results.into_iter().collect::<Result<Vec<_>>>()?;

    let traces = [("s11", 0, 0), ("s22", 1, 1), ("s12", 0, 1)];
    let mut header = vec!["freq_hz".to_string()];
    for s in Scenario::DESIGNS {
        for (t, _, _) in traces {
            header.push(format!("{}_{t}_db", s.name()));
        }
    }
    let mut csv = header.join(",");
    csv.push('\n');
    for (k, f) in sweeps[0].frequencies_hz.iter().enumerate() {
        let mut row = vec![format!("{f:?}")];
        for sw in &sweeps {
            for (_, i, j) in traces {
                row.push(format!("{:.6}", to_db(sw.s[k][(i, j)])));
            }
        }
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    fs::write(dir.join("compare.csv"), csv).context("writing compare.csv")?;

    let f_r = cfg.reference_frequency_hz;
    let mut summary = serde_json::Map::new();
    for (s, sw) in Scenario::DESIGNS.iter().zip(&sweeps) {
        let k = sw.nearest_index(f_r);
        let mut entry = serde_json::Map::new();
        entry.insert("frequency_hz".into(), json!(sw.frequencies_hz[k]));
        for (t, i, j) in traces {
            entry.insert(format!("{t}_db"), json!(to_db(sw.s[k][(i, j)])));
        }
        summary.insert(s.name().into(), Value::Object(entry));
    }
    let mut cfg = cfg.clone();
    cfg.scenario = Scenario::Compare;
    write_json(
        &dir.join("compare_summary.json"),
        &json!({ "config": serde_json::to_value(&cfg)?, "at_reference_frequency": summary }),
    )
}
