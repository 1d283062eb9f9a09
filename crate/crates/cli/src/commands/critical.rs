//! `critical`: the critical leaky parameters, their ordering and residuals.

use serde_json::{json, Value};
use symbif_core::degree::theorem_report;
use symbif_core::spectral::critical_set;

use super::{family_name, require_k};
use crate::config::RunConfig;
use crate::json::{num, nums};
use crate::report::{CliError, Report};

pub fn cmd_critical(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = require_k(cfg)?;
    let tol = cfg.tolerances.get("critical_residual");
    let set = critical_set(k)?;
    let theorem = theorem_report(k, None)?;
    let ord = &theorem.ordering;
    let mut report = Report::new("critical");
    report.insert("k", json!(k));
    let values: Vec<Value> = set
        .values
        .iter()
        .map(|v| {
            json!({
                "value": num(v.value),
                "formulas": v.formulas.iter().map(|f| f.name()).collect::<Vec<_>>(),
                "partitions": v.labels.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "residual": num(v.residual),
            })
        })
        .collect();
    report.insert("values", Value::Array(values));
    report.insert(
        "ordering",
        json!({
            "values": nums(&ord.values),
            "chain_holds": ord.chain_holds,
            "zero_families": ord.zero_families.iter().map(|f| family_name(*f)).collect::<Vec<_>>(),
            "extra_zero_families": ord.extra_zero_families.iter().map(|f| family_name(*f)).collect::<Vec<_>>(),
            "min_positive": num(ord.min_positive),
            "asymptote_distance": nums(&ord.asymptote_distance),
        }),
    );
    for (i, v) in set.values.iter().enumerate() {
        report.hard(format!("residual value{i}"), v.residual <= tol, json!({ "residual": num(v.residual), "tolerance": num(tol) }));
    }
    report.hard("ordering_chain", ord.chain_holds, json!({ "values": nums(&ord.values) }));
    report.hard("nonzero_values_exceed_one", theorem.clause_iii, json!({ "min_positive": num(ord.min_positive) }));
    let roots = |v: &[(symbif_core::spectral::FormulaId, f64)]| -> Vec<Value> {
        v.iter().map(|(f, r)| json!({ "formula": f.name(), "root": num(*r) })).collect()
    };
    let scanned = k <= 64;
    report.hard(
        "no_other_real_roots",
        theorem.clause_ii,
        json!({
            "scanned": scanned,
            "interval": nums(&[-10.0, 10.0]),
            "negative_roots": roots(&theorem.negative_roots),
            "unexpected_roots": roots(&theorem.unexpected_roots),
        }),
    );
    if !scanned {
        report.notices.push(format!("root scan skipped for k = {k}; closed-form critical values only"));
    }
    if !ord.extra_zero_families.is_empty() {
        report.notices.push(format!(
            "at alpha = 0 the eigenvalues of {} also vanish",
            ord.extra_zero_families.iter().map(|f| family_name(*f)).collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Exit;

    fn run(k: usize) -> Report {
        cmd_critical(&RunConfig { k: Some(k), ..RunConfig::default() }).unwrap()
    }

    #[test]
    fn width5_values() {
        let r = run(5);
        assert_eq!(r.exit(), Exit::Pass);
        let v: Vec<f64> = r.data["values"].as_array().unwrap().iter().map(|x| x["value"].as_f64().unwrap()).collect();
        assert_eq!(v[0], 0.0);
        // Oracle: closed form evaluated at 40 digits with mpmath.
        assert!((v[1] - 2.2094612037).abs() < 1e-9);
        assert!((v[2] - 3.1587272826).abs() < 1e-9);
    }

    #[test]
    fn width4_middle() {
        let r = run(4);
        let mid = r.data["values"][1]["value"].as_f64().unwrap();
        assert!((mid - 2.254).abs() < 5e-4, "{mid}");
    }

    #[test]
    fn huge_width_tends_to_two() {
        let r = run(1_000_000);
        assert_eq!(r.exit(), Exit::Pass);
        for d in r.data["ordering"]["asymptote_distance"].as_array().unwrap() {
            assert!(d.as_f64().unwrap() <= 1e-4);
        }
    }
}
