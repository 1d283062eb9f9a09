//! `invariants`: basic degrees, bifurcation invariants and their maximal
//! types in the Burnside ring, with the `k = 5` reference comparison.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use symbif_core::burnside::{BurnsideElement, SubgroupLattice, MAX_K};
use symbif_core::degree::{
    basic_degrees, bifurcation_invariant, homotopy_report, infer_name_map, leading_coefficient_check, match_expansion, ring_law_report,
    single_substitution_repairs, spectral_invariant, theorem_report, BasicDegrees, BifurcationInvariant, ExpansionMatch, NameMap,
    PublishedExpansion,
};
use symbif_core::symrep::IrrepFamily;

use super::{class_json, class_labels, element_json, family_name, require_k};
use crate::cache::{default_cache_dir, obtain_lattice, LatticeOrigin};
use crate::config::RunConfig;
use crate::golden::{basic_degrees_golden, character_table_golden, compare_character_table, invariants_golden, partition_for};
use crate::json::num;
use crate::report::{CliError, Exit, Report};

fn invariant_json(w: &BifurcationInvariant, l: &SubgroupLattice) -> Value {
    json!({
        "critical_value": num(w.critical_value),
        "families": w.families.iter().map(|f| family_name(*f)).collect::<Vec<_>>(),
        "partitions": w.labels.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "element": element_json(&w.element, l),
        "maximal_types": class_labels(l, &w.maximal_types),
        "support_maximal_types": class_labels(l, &w.support_maximal_types),
    })
}

fn match_json(m: &ExpansionMatch, l: &SubgroupLattice) -> Value {
    let diffs: Vec<Value> =
        m.differences.iter().map(|&(id, c, p)| json!({ "class": l.class(id).label, "computed": c, "reference": p })).collect();
    json!({
        "exact": m.exact,
        "multiset_equal": m.multiset_equal,
        "unmapped_labels": m.unmapped_labels,
        "repeated_labels": m.repeated_labels,
        "differences": diffs,
    })
}

fn mapped_set(names: &[String], map: &NameMap) -> Option<BTreeSet<usize>> {
    names.iter().map(|n| map.assigned.get(n).copied()).collect()
}

/// Reference comparison at `k = 5`.
fn golden_section(report: &mut Report, l: &SubgroupLattice, d: &BasicDegrees, inv: &[BifurcationInvariant]) -> Result<(), CliError> {
    let table = compare_character_table(&character_table_golden()?)?;
    report.hard(
        "character_table_golden",
        table.passed(),
        json!({ "unmatched_rows": table.unmatched_rows, "permutation_character_matches": table.permutation_character_matches }),
    );
    let correspondence: serde_json::Map<String, Value> =
        table.correspondence.iter().map(|(n, p)| (n.clone(), json!(p.to_string()))).collect();
    report.insert("irreducible_correspondence", Value::Object(correspondence));

    let bd = basic_degrees_golden()?;
    let om = invariants_golden()?;
    let family_of = |name: &str| -> Result<IrrepFamily, CliError> {
        let p = partition_for(&table, name)?;
        IrrepFamily::of_partition(&p).ok_or_else(|| CliError::failure(format!("{name} = {p} does not occur in R^(k×k)")))
    };
    let mut pairs_owned: Vec<(PublishedExpansion, BurnsideElement)> = Vec::new();
    for e in &bd.corrected {
        pairs_owned.push((e.clone(), d.get(family_of(&e.name)?).element.clone()));
    }
    for (i, e) in om.corrected.iter().enumerate() {
        let w = inv.get(i).ok_or_else(|| CliError::failure(format!("no computed invariant for {}", e.name)))?;
        pairs_owned.push((e.clone(), w.element.clone()));
    }
    let pairs: Vec<(&PublishedExpansion, &BurnsideElement)> = pairs_owned.iter().map(|(p, x)| (p, x)).collect();
    let map = infer_name_map(&pairs, l);
    let map_json: serde_json::Map<String, Value> = map.assigned.iter().map(|(n, &id)| (n.clone(), class_json(l, id))).collect();
    report.insert(
        "name_map",
        json!({
            "assigned": map_json,
            "ambiguous": map.ambiguous.iter().map(|(n, c)| json!({ "label": n, "candidates": class_labels(l, c) })).collect::<Vec<_>>(),
            "unresolved": map.unresolved,
            "unnamed_classes": (0..l.len()).filter(|id| !map.assigned.values().any(|v| v == id)).map(|id| l.class(id).label.clone()).collect::<Vec<_>>(),
        }),
    );
    report.hard("name_map_complete", map.ambiguous.is_empty() && map.unresolved.is_empty(), json!({ "assigned": map.assigned.len() }));

    for (published, computed) in &pairs_owned {
        let m = match_expansion(published, computed, &map, l);
        let kind = if published.name.starts_with("omega") { "invariant" } else { "basic_degree" };
        report.hard(format!("{kind}_golden {}", published.name), m.exact && m.multiset_equal, match_json(&m, l));
    }
    for printed in &bd.printed {
        let computed = d.get(family_of(&printed.name)?).element.clone();
        let m = match_expansion(printed, &computed, &map, l);
        let repairs = single_substitution_repairs(printed, &computed, &map, l);
        let ok = m.exact || repairs.len() == 1;
        let repairs_json: Vec<Value> = repairs.iter().map(|(i, from, to)| json!({ "term": i, "printed": from, "corrected": to })).collect();
        report.hard(
            format!("printed_basic_degree {}", printed.name),
            ok,
            json!({ "exact": m.exact, "single_label_repairs": repairs_json, "match": match_json(&m, l) }),
        );
    }
    for (name, labels) in &bd.maximal {
        let expected = mapped_set(labels, &map);
        let got: BTreeSet<usize> = d.get(family_of(name)?).maximal_types.iter().copied().collect();
        report.hard(
            format!("basic_degree_maximal_types {name}"),
            expected.as_ref() == Some(&got),
            json!({ "reference": labels, "computed": class_labels(l, &got.into_iter().collect::<Vec<_>>()) }),
        );
    }
    for (i, e) in om.corrected.iter().enumerate() {
        let Some(labels) = om.maximal.get(&e.name) else { continue };
        let expected = mapped_set(labels, &map);
        let got: BTreeSet<usize> = inv[i].maximal_types.iter().copied().collect();
        report.hard(
            format!("invariant_maximal_types {}", e.name),
            expected.as_ref() == Some(&got),
            json!({
                "reference": labels,
                "computed": class_labels(l, &inv[i].maximal_types),
                "support_maximal_types": class_labels(l, &inv[i].support_maximal_types),
            }),
        );
    }
    Ok(())
}

/// Runs the command and also returns where the lattice came from.
pub fn cmd_invariants(cfg: &RunConfig) -> Result<(Report, LatticeOrigin), CliError> {
    let k = require_k(cfg)?;
    if k > MAX_K as usize {
        return Err(CliError {
            exit: Exit::Capacity,
            message: format!(
                "Burnside-ring computations support 4 <= k <= {MAX_K}, got {k}; use `critical --k {k}` for the spectral conclusions"
            ),
        });
    }
    let dir = cfg.cache_dir.clone().or_else(default_cache_dir);
    let (l, origin) = obtain_lattice(k as u32, dir.as_deref())?;
    let d = basic_degrees(&l)?;
    let mut report = Report::new("invariants");
    report.insert("k", json!(k));
    report.insert("classes", Value::Array((0..l.len()).map(|i| class_json(&l, i)).collect()));

    let mut basic = serde_json::Map::new();
    for f in IrrepFamily::ALL {
        let bd = d.get(f);
        let lead = leading_coefficient_check(bd, &l);
        basic.insert(
            family_name(f).to_string(),
            json!({
                "partition": bd.irrep.to_string(),
                "element": element_json(&bd.element, &l),
                "maximal_types": class_labels(&l, &bd.maximal_types),
            }),
        );
        let exempt: Vec<Value> =
            lead.exempt.iter().map(|v| json!({ "class": l.class(v.class).label, "coefficient": v.coefficient })).collect();
        let violations: Vec<Value> = lead
            .violations
            .iter()
            .map(|v| json!({ "class": l.class(v.class).label, "coefficient": v.coefficient, "weyl_order": v.weyl_order, "fixed_dim": v.fixed_dim }))
            .collect();
        report.hard(
            format!("leading_coefficients {}", family_name(f)),
            lead.violations.is_empty(),
            json!({ "checked": class_labels(&l, &lead.checked), "violations": violations, "exempt_top_class": exempt }),
        );
    }
    report.insert("basic_degrees", Value::Object(basic));

    let laws = ring_law_report(&d, &l)?;
    let triples = |v: &[(IrrepFamily, IrrepFamily, usize)]| -> Vec<Value> {
        v.iter().map(|(a, b, h)| json!([family_name(*a), family_name(*b), l.class(*h).label])).collect()
    };
    report.hard(
        "involution",
        laws.involution_failures.is_empty(),
        json!({ "failures": laws.involution_failures.iter().map(|f| family_name(*f)).collect::<Vec<_>>() }),
    );
    report.hard(
        "cancellation_at_shared_maximal_types",
        laws.cancellation_failures.is_empty(),
        json!({ "checked": laws.cancellation_checked, "failures": triples(&laws.cancellation_failures) }),
    );
    let not_applicable: Vec<Value> = laws
        .persistence_not_applicable
        .iter()
        .map(|(a, b, h, p, x)| json!({ "factors": [family_name(*a), family_name(*b)], "class": l.class(*h).label, "product": p, "factor": x }))
        .collect();
    report.hard(
        "persistence_of_unshared_maximal_types",
        laws.persistence_failures.is_empty(),
        json!({ "checked": laws.persistence_checked, "failures": triples(&laws.persistence_failures), "not_applicable": not_applicable }),
    );

    let inv = (0..3).map(|i| bifurcation_invariant(i, &d, &l)).collect::<Result<Vec<_>, _>>()?;
    report.insert("invariants", Value::Array(inv.iter().map(|w| invariant_json(w, &l)).collect()));
    let total = inv.iter().fold(BurnsideElement::zero(&l), |acc, w| acc.add(&w.element));
    let nonzero = inv.iter().all(|w| !w.element.is_zero() && !w.maximal_types.is_empty());
    report.hard("invariants_nonzero", nonzero, json!({ "sum": element_json(&total, &l) }));

    let homotopy = homotopy_report(5, &d, &l)?;
    let spectral = (0..3).map(|i| spectral_invariant(i, &d, &l)).collect::<Result<Vec<_>, _>>()?;
    report.insert(
        "spectral_model",
        json!({
            "interval_samples": homotopy.samples.iter().map(|s| crate::json::nums(s)).collect::<Vec<_>>(),
            "interval_degrees": homotopy.degrees.iter().map(|x| element_json(x, &l)).collect::<Vec<_>>(),
            "invariants": spectral.iter().map(|w| invariant_json(w, &l)).collect::<Vec<_>>(),
        }),
    );
    report.hard("degree_constant_between_critical_values", homotopy.constant_on_components, json!({ "samples_per_interval": 5 }));
    let same = spectral.iter().zip(&inv).filter(|(s, c)| s.element == c.element).count();
    report.info("crossing_and_spectral_models_agree", same == inv.len(), json!({ "agreeing_invariants": same }));

    let theorem = theorem_report(k, Some(&l))?;
    report.hard("nonzero_invariants_certify_branches", theorem.clause_i == Some(true), json!({}));
    report.hard("no_negative_or_extra_critical_values", theorem.clause_ii, json!({}));
    report.hard("critical_values_exceed_one", theorem.clause_iii, json!({ "min_positive": num(theorem.ordering.min_positive) }));

    if k == 5 {
        golden_section(&mut report, &l, &d, &inv)?;
    }
    Ok((report, origin))
}
