//! `spectrum`: closed-form spectrum of the Hessian at the minimum and its
//! match against a dense eigensolve.

use serde_json::{json, Value};
use symbif_core::hessian::{assemble_dense, hessian_at_minimum};
use symbif_core::spectral::{analytic_spectrum, spectrum_match_for, FormulaId, SpectrumEntry, SpectrumMatch};
use symbif_core::symrep::IrrepFamily;

use super::{family_name, param, require_k};
use crate::config::{AlphaSpec, RunConfig, PERTURBATION};
use crate::golden::spectrum_golden;
use crate::json::num;
use crate::report::{CliError, Exit, Report};

/// Largest width for the dense eigensolve.
pub const DENSE_MAX_K: usize = 64;

/// Distinct eigenvalues with total multiplicity and the formulas producing them.
pub fn distinct_values(entries: &[SpectrumEntry]) -> Vec<(f64, usize, Vec<FormulaId>)> {
    let mut sorted: Vec<&SpectrumEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<(f64, usize, Vec<FormulaId>)> = Vec::new();
    for e in sorted {
        match out.last_mut() {
            Some(last) if (last.0 - e.value).abs() <= 1e-12 * e.value.abs().max(1.0) => {
                last.1 += e.multiplicity;
                last.2.push(e.formula_id);
            }
            _ => out.push((e.value, e.multiplicity, vec![e.formula_id])),
        }
    }
    out
}

pub fn match_json(m: &SpectrumMatch) -> Value {
    let clusters = |cs: &[symbif_core::spectral::Cluster]| -> Vec<Value> {
        cs.iter()
            .map(|c| {
                let dims: serde_json::Map<String, Value> =
                    IrrepFamily::ALL.iter().zip(c.family_dims).map(|(f, d)| (family_name(*f).to_string(), num(d))).collect();
                json!({ "value": num(c.value), "multiplicity": c.multiplicity, "family_dimensions": dims })
            })
            .collect()
    };
    let min_dominant = m.dominant.iter().map(|d| d.2).fold(f64::INFINITY, f64::min);
    json!({
        "max_deviation": num(m.max_deviation),
        "tolerance": num(m.tolerance),
        "cluster_gap": num(m.cluster_gap),
        "multiplicities_agree": m.multiplicities_agree,
        "families_agree": m.families_agree,
        "min_dominant_weight": num(min_dominant),
        "numerical_clusters": clusters(&m.numerical),
        "analytic_clusters": clusters(&m.analytic),
    })
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = require_k(cfg)?;
    let alphas = cfg.alpha.clone().unwrap_or(AlphaSpec::Grid { start: 0.0, stop: 3.5, points: 11 }).values();
    let tol = cfg.tolerances.get("spectrum");
    let golden = if k == 5 { spectrum_golden()? } else { Vec::new() };
    let mut report = Report::new("spectrum");
    report.insert("k", json!(k));
    report.insert("tolerance", num(tol));
    report.insert("perturbation_injected", json!(cfg.inject_hessian_perturbation));
    let mut runs = Vec::new();
    for a in alphas {
        let p = param(a)?;
        let entries = analytic_spectrum(k, p)?;
        let analytic: Vec<Value> = entries
            .iter()
            .map(|e| {
                json!({
                    "formula": e.formula_id.name(),
                    "partition": e.label.to_string(),
                    "value": num(e.value),
                    "multiplicity": e.multiplicity,
                })
            })
            .collect();
        let distinct = distinct_values(&entries);
        let distinct_json: Vec<Value> = distinct
            .iter()
            .map(|(v, m, f)| json!({ "value": num(*v), "multiplicity": m, "formulas": f.iter().map(|x| x.name()).collect::<Vec<_>>() }))
            .collect();
        let mut run = json!({ "alpha": num(a), "analytic": analytic, "distinct": distinct_json });
        if k <= DENSE_MAX_K {
            let mut dense = assemble_dense(&hessian_at_minimum(k, p)?)?;
            if cfg.inject_hessian_perturbation {
                dense[(0, 0)] += PERTURBATION;
            }
            let m = spectrum_match_for(&dense, k, p, tol)?;
            report.hard(format!("spectrum_match k={k} alpha={a}"), m.passed, match_json(&m));
            run["match"] = match_json(&m);
        } else {
            report.forced_exit = Some(Exit::Capacity);
            report.notices.push(format!("dense eigensolve skipped at alpha = {a}: limited to k <= {DENSE_MAX_K}"));
        }
        if let Some((_, reference)) = golden.iter().find(|(ga, _)| *ga == a) {
            let agree =
                reference.len() == distinct.len() && reference.iter().zip(&distinct).all(|(r, d)| r.1 == d.1 && (r.0 - d.0).abs() <= 1e-12);
            let worst = reference.iter().zip(&distinct).map(|(r, d)| (r.0 - d.0).abs()).fold(0.0, f64::max);
            report.hard(format!("golden_spectrum alpha={a}"), agree, json!({ "max_deviation": num(worst), "tolerance": num(1e-12) }));
        }
        runs.push(run);
    }
    report.insert("runs", Value::Array(runs));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, alpha: f64) -> RunConfig {
        RunConfig { k: Some(k), alpha: Some(AlphaSpec::Single(alpha)), ..RunConfig::default() }
    }

    #[test]
    fn width5_alpha1_has_six_values() {
        let r = cmd_spectrum(&cfg(5, 1.0)).unwrap();
        assert_eq!(r.exit(), Exit::Pass);
        let distinct = r.data["runs"][0]["distinct"].as_array().unwrap();
        let mut mult: Vec<u64> = distinct.iter().map(|d| d["multiplicity"].as_u64().unwrap()).collect();
        mult.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(mult, [10, 5, 4, 4, 1, 1]);
        assert!(r.check("golden_spectrum alpha=1").unwrap().passed);
    }

    #[test]
    fn width4_alpha0_degenerate_clusters() {
        let r = cmd_spectrum(&cfg(4, 0.0)).unwrap();
        assert_eq!(r.exit(), Exit::Pass);
        assert_eq!(r.data["runs"][0]["distinct"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn perturbation_fails() {
        let mut c = cfg(5, 1.0);
        c.inject_hessian_perturbation = true;
        assert_eq!(cmd_spectrum(&c).unwrap().exit(), Exit::Failure);
    }

    #[test]
    fn small_k_is_usage_error() {
        assert_eq!(cmd_spectrum(&cfg(3, 1.0)).unwrap_err().exit, Exit::Usage);
        assert_eq!(cmd_spectrum(&cfg(5, f64::NAN)).unwrap_err().exit, Exit::Usage);
    }
}
