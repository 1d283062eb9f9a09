//! Subcommand implementations. Each returns a [`Report`] or a [`CliError`]
//! that ends the run with the mapped exit code.

pub mod critical;
pub mod invariants;
pub mod spectrum;
pub mod verify;

use serde_json::{json, Value};
use symbif_core::burnside::{BurnsideElement, SubgroupLattice};
use symbif_core::landscape::LeakyParam;
use symbif_core::symrep::IrrepFamily;

use crate::config::RunConfig;
use crate::report::{CliError, Report};

pub fn param(alpha: f64) -> Result<LeakyParam, CliError> {
    Ok(LeakyParam::new(alpha)?)
}

pub fn require_k(cfg: &RunConfig) -> Result<usize, CliError> {
    let k = cfg.k.ok_or_else(|| CliError::usage("--k is required"))?;
    if k < 4 {
        return Err(CliError::usage(format!("k must be at least 4, got {k}")));
    }
    Ok(k)
}

pub fn family_name(f: IrrepFamily) -> &'static str {
    match f {
        IrrepFamily::Hook => "hook",
        IrrepFamily::TwoRow => "two_row",
        IrrepFamily::Standard => "standard",
        IrrepFamily::Trivial => "trivial",
    }
}

pub fn class_json(l: &SubgroupLattice, id: usize) -> Value {
    let c = l.class(id);
    json!({ "id": id, "label": c.label, "order": c.order, "weyl_order": c.weyl_order() })
}

pub fn class_labels(l: &SubgroupLattice, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&i| l.class(i).label.clone()).collect()
}

pub fn element_json(x: &BurnsideElement, l: &SubgroupLattice) -> Value {
    let terms: Vec<Value> =
        x.support().into_iter().map(|id| json!({ "class": l.class(id).label, "id": id, "coefficient": x.coeff(id) })).collect();
    json!({ "expansion": x.display(l), "terms": terms })
}

/// Runs one subcommand by name, turning errors into reports.
pub fn run(command: &'static str, cfg: &RunConfig) -> Report {
    let result = match command {
        "spectrum" => spectrum::cmd_spectrum(cfg),
        "critical" => critical::cmd_critical(cfg),
        "invariants" => invariants::cmd_invariants(cfg).map(|(r, _)| r),
        "verify" => verify::cmd_verify(cfg),
        other => Err(CliError::usage(format!("unknown command {other}"))),
    };
    result.unwrap_or_else(|e| Report::from_error(command, &e))
}
