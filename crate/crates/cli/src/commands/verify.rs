//! `verify`: oracle checks of the closed forms, the Hessian, the spectrum and
//! the Burnside ring. `gradient_paper` and `hessian_paper` are compared with
//! finite differences away from `α = 1` for information only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};
use symbif_core::burnside::{mark_vector, multiply, table_of_marks, BurnsideElement, SubgroupLattice};
use symbif_core::hessian::{assemble_dense, hessian_at_minimum, hessian_paper};
use symbif_core::landscape::{
    finite_diff_gradient, finite_diff_hessian, gradient_exact, gradient_paper, kernel_f, kernel_mc, loss, loss_mc, relative_error,
    WeightMatrix, RNG_ALGORITHM,
};
use symbif_core::spectral::{spectrum_match_for, SpectrumMatch};
use symbif_core::symrep::{character_table, decompose_diag_square, IrrepFamily};

use super::spectrum::match_json;
use super::{family_name, param};
use crate::cache::{default_cache_dir, obtain_lattice};
use crate::config::{RunConfig, PERTURBATION};
use crate::golden::{character_table_golden, compare_character_table, decomposition_golden, partition_for};
use crate::json::{num, nums};
use crate::report::{CliError, Report};

/// Step of the central-difference gradient.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Step of the second-difference Hessian.
pub const HESSIAN_STEP: f64 = 1e-4;

fn gaussian_vec(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Student with i.i.d. standard normal entries.
pub fn random_student(rng: &mut ChaCha20Rng, k: usize) -> Result<WeightMatrix, CliError> {
    Ok(WeightMatrix::from_rows((0..k).map(|_| gaussian_vec(rng, k)).collect())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct McSummary {
    pub trials: usize,
    pub samples: usize,
    pub sigma: f64,
    pub within: usize,
    pub fraction: f64,
    pub max_abs_z: f64,
    pub first_estimate: f64,
    pub first_stderr: f64,
    pub first_closed_form: f64,
    /// The first trial repeated with the same seed gives bit-identical output.
    pub deterministic: bool,
}

/// Monte-Carlo kernel against the closed form over random `(w, v, α ≥ 0)` in `R^dim`.
pub fn mc_kernel_trials(dim: usize, trials: usize, samples: usize, seed: u64, sigma: f64) -> Result<McSummary, CliError> {
    if trials == 0 {
        return Err(CliError::usage("need at least one Monte-Carlo trial"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut within = 0;
    let mut max_abs_z: f64 = 0.0;
    let mut first = None;
    let mut deterministic = true;
    for t in 0..trials {
        let w = gaussian_vec(&mut rng, dim);
        let v = gaussian_vec(&mut rng, dim);
        let alpha = param(rng.random_range(0.0..3.0))?;
        let trial_seed = seed.wrapping_add(1 + t as u64);
        let est = kernel_mc(&w, &v, alpha, samples, trial_seed)?;
        let exact = kernel_f(&w, &v, alpha)?;
        let z = (est.estimate - exact) / est.stderr;
        max_abs_z = max_abs_z.max(z.abs());
        if z.abs() <= sigma {
            within += 1;
        }
        if t == 0 {
            let again = kernel_mc(&w, &v, alpha, samples, trial_seed)?;
            deterministic = again.estimate.to_bits() == est.estimate.to_bits() && again.stderr.to_bits() == est.stderr.to_bits();
            first = Some((est.estimate, est.stderr, exact));
        }
    }
    let (first_estimate, first_stderr, first_closed_form) = first.expect("at least one trial");
    Ok(McSummary {
        trials,
        samples,
        sigma,
        within,
        fraction: within as f64 / trials as f64,
        max_abs_z,
        first_estimate,
        first_stderr,
        first_closed_form,
        deterministic,
    })
}

/// Largest relative error of the exact gradient against central differences
/// at random `k = 4` students, `α` uniform in `[-1, 3]`, teacher `I`.
pub fn exact_gradient_vs_fd(points: usize, seed: u64) -> Result<(f64, f64), CliError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let teacher = WeightMatrix::identity(4)?;
    let mut worst = (0.0, 0.0);
    for _ in 0..points {
        let s = random_student(&mut rng, 4)?;
        let a: f64 = rng.random_range(-1.0..3.0);
        let p = param(a)?;
        let err = relative_error(&gradient_exact(&s, &teacher, p)?, &finite_diff_gradient(&s, &teacher, p, GRADIENT_STEP)?);
        if err > worst.0 {
            worst = (err, a);
        }
    }
    Ok(worst)
}

/// Errors of `gradient_paper`, `hessian_paper` and `gradient_exact` against finite differences at one `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeErrors {
    pub alpha: f64,
    pub gradient_exact: f64,
    pub gradient_paper: f64,
    /// `max|H_paper - H_fd| / max(max|H_fd|, 1)`.
    pub hessian_paper: f64,
}

pub fn derivative_errors(s: &WeightMatrix, teacher: &WeightMatrix, alpha: f64) -> Result<DerivativeErrors, CliError> {
    let p = param(alpha)?;
    let fd = finite_diff_gradient(s, teacher, p, GRADIENT_STEP)?;
    let h_fd = finite_diff_hessian(s, teacher, p, HESSIAN_STEP)?;
    let h_paper = assemble_dense(&hessian_paper(s, teacher, p)?)?;
    Ok(DerivativeErrors {
        alpha,
        gradient_exact: relative_error(&gradient_exact(s, teacher, p)?, &fd),
        gradient_paper: relative_error(&gradient_paper(s, teacher, p)?, &fd),
        hessian_paper: (h_paper - &h_fd).amax() / h_fd.amax().max(1.0),
    })
}

/// Worst errors over random `k = 4` students at `α = 1`.
pub fn alpha_one_errors(points: usize, seed: u64) -> Result<DerivativeErrors, CliError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let teacher = WeightMatrix::identity(4)?;
    let mut worst = DerivativeErrors { alpha: 1.0, gradient_exact: 0.0, gradient_paper: 0.0, hessian_paper: 0.0 };
    for _ in 0..points {
        let e = derivative_errors(&random_student(&mut rng, 4)?, &teacher, 1.0)?;
        worst.gradient_exact = worst.gradient_exact.max(e.gradient_exact);
        worst.gradient_paper = worst.gradient_paper.max(e.gradient_paper);
        worst.hessian_paper = worst.hessian_paper.max(e.hessian_paper);
    }
    Ok(worst)
}

/// Largest gradient entry at the minimum over the given `α` values.
pub fn minimum_gradient(k: usize, alphas: &[f64]) -> Result<f64, CliError> {
    let t = WeightMatrix::identity(k)?;
    let mut worst: f64 = 0.0;
    for &a in alphas {
        worst = worst.max(gradient_exact(&t, &t, param(a)?)?.amax());
    }
    Ok(worst)
}

/// Dense spectrum checks over `k × α`, optionally perturbing entry `(0,0)`.
pub fn spectrum_sweep(ks: &[usize], alphas: &[f64], tol: f64, perturb: bool) -> Result<Vec<SpectrumMatch>, CliError> {
    let mut out = Vec::new();
    for &k in ks {
        for &a in alphas {
            let p = param(a)?;
            let mut dense = assemble_dense(&hessian_at_minimum(k, p)?)?;
            if perturb {
                dense[(0, 0)] += PERTURBATION;
            }
            out.push(spectrum_match_for(&dense, k, p, tol)?);
        }
    }
    Ok(out)
}

/// `φ(x·y) = φ(x)φ(y)` for all pairs of generators; returns `(checked, failures)`.
pub fn mark_homomorphism(l: &SubgroupLattice) -> Result<(usize, usize), CliError> {
    let marks = table_of_marks(l);
    let mut failures = 0;
    let mut checked = 0;
    for h in 0..l.len() {
        for k in h..l.len() {
            let (x, y) = (BurnsideElement::generator(l, h), BurnsideElement::generator(l, k));
            let prod = mark_vector(&multiply(&x, &y, l)?, &marks);
            let expect: Vec<i64> = mark_vector(&x, &marks).iter().zip(mark_vector(&y, &marks)).map(|(a, b)| a * b).collect();
            checked += 1;
            if prod != expect {
                failures += 1;
            }
        }
    }
    Ok((checked, failures))
}

/// Evenly spaced `α` values in `[0, 3.5]`.
pub fn sweep_alphas(points: usize) -> Vec<f64> {
    (0..points).map(|i| 3.5 * i as f64 / (points - 1) as f64).collect()
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let ks: Vec<usize> = match cfg.k {
        Some(k) if k < 4 => return Err(CliError::usage(format!("k must be at least 4, got {k}"))),
        Some(k) => vec![k],
        None => vec![4, 5],
    };
    let tol = &cfg.tolerances;
    let mut report = Report::new("verify");
    report.insert("widths", json!(ks));
    report.insert("seed", json!(cfg.seed));
    report.insert("rng", json!(RNG_ALGORITHM));
    report.insert("tolerances", Value::Object(tol.iter().map(|(k, v)| (k.to_string(), num(v))).collect()));

    let mc = mc_kernel_trials(4, cfg.mc_trials, cfg.mc_samples, cfg.seed, tol.get("mc_sigma"))?;
    report.hard(
        "mc_kernel_within_sigma",
        mc.fraction >= tol.get("mc_pass_fraction"),
        json!({
            "trials": mc.trials, "samples": mc.samples, "sigma": num(mc.sigma), "within": mc.within,
            "fraction": num(mc.fraction), "required_fraction": num(tol.get("mc_pass_fraction")), "max_abs_z": num(mc.max_abs_z),
            "first_estimate": num(mc.first_estimate), "first_stderr": num(mc.first_stderr), "first_closed_form": num(mc.first_closed_form),
        }),
    );
    report.hard("mc_deterministic", mc.deterministic, json!({ "seed": cfg.seed }));

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let s = random_student(&mut rng, 4)?;
    let t = WeightMatrix::identity(4)?;
    let lp = param(0.5)?;
    let lmc = loss_mc(&s, &t, lp, cfg.mc_samples, cfg.seed)?;
    let lexact = loss(&s, &t, lp)?;
    let z = (lmc.estimate - lexact) / lmc.stderr;
    report.info(
        "mc_loss",
        z.abs() <= tol.get("mc_sigma"),
        json!({ "alpha": num(0.5), "estimate": num(lmc.estimate), "stderr": num(lmc.stderr), "closed_form": num(lexact), "z": num(z) }),
    );

    let (gerr, galpha) = exact_gradient_vs_fd(100, cfg.seed)?;
    report.hard(
        "exact_gradient_vs_fd",
        gerr <= tol.get("gradient_fd"),
        json!({ "points": 100, "max_relative_error": num(gerr), "at_alpha": num(galpha), "tolerance": num(tol.get("gradient_fd")) }),
    );
    let one = alpha_one_errors(10, cfg.seed)?;
    let t1 = tol.get("alpha_one_fd");
    report.hard(
        "gradient_paper_at_alpha_one",
        one.gradient_paper <= t1,
        json!({ "points": 10, "max_relative_error": num(one.gradient_paper), "tolerance": num(t1) }),
    );
    report.hard(
        "hessian_paper_at_alpha_one",
        one.hessian_paper <= t1,
        json!({ "points": 10, "max_scaled_error": num(one.hessian_paper), "tolerance": num(t1) }),
    );
    let table_alphas = [-1.0, 0.0, 0.5, 1.0, 2.0, 3.0];
    let rows = table_alphas.iter().map(|&a| derivative_errors(&s, &t, a)).collect::<Result<Vec<_>, _>>()?;
    let agree = rows.iter().all(|r| r.gradient_paper <= t1 && r.hessian_paper <= t1);
    report.info(
        "derivative_forms_general_alpha",
        agree,
        json!({ "rows": rows.iter().map(|r| json!({
            "alpha": num(r.alpha), "gradient_exact": num(r.gradient_exact),
            "gradient_paper": num(r.gradient_paper), "hessian_paper": num(r.hessian_paper),
        })).collect::<Vec<_>>() }),
    );

    let crit_alphas: Vec<f64> = (0..21).map(|i| -1.0 + 0.25 * i as f64).collect();
    for &k in &ks {
        let g = minimum_gradient(k, &crit_alphas)?;
        report.hard(
            format!("minimum_is_critical k={k}"),
            g <= tol.get("critical_point"),
            json!({ "alphas": nums(&crit_alphas), "max_abs_gradient": num(g), "tolerance": num(tol.get("critical_point")) }),
        );
    }

    let alphas = sweep_alphas(11);
    let sweep = spectrum_sweep(&ks, &alphas, tol.get("spectrum"), cfg.inject_hessian_perturbation)?;
    let worst = sweep.iter().map(|m| m.max_deviation).fold(0.0, f64::max);
    let failed: Vec<Value> =
        sweep.iter().filter(|m| !m.passed).map(|m| json!({ "k": m.k, "alpha": num(m.alpha), "detail": match_json(m) })).collect();
    report.hard(
        "spectrum_sweep",
        failed.is_empty(),
        json!({
            "alphas": nums(&alphas), "max_deviation": num(worst), "tolerance": num(tol.get("spectrum")),
            "perturbation_injected": cfg.inject_hessian_perturbation, "failures": failed,
        }),
    );

    let dir = cfg.cache_dir.clone().or_else(default_cache_dir);
    for &k in ks.iter().filter(|&&k| k <= symbif_core::burnside::MAX_K as usize) {
        let (l, _) = obtain_lattice(k as u32, dir.as_deref())?;
        let (checked, failures) = mark_homomorphism(&l)?;
        report.hard(format!("mark_homomorphism k={k}"), failures == 0, json!({ "products": checked, "failures": failures }));
    }

    for &k in &ks {
        if let Ok(table) = character_table(k as u32) {
            report.hard(
                format!("character_orthogonality k={k}"),
                table.rows_orthonormal() && table.columns_orthogonal(),
                json!({ "rows_orthonormal": table.rows_orthonormal(), "columns_orthogonal": table.columns_orthogonal() }),
            );
        }
    }
    let law: Vec<Value> = (4..=10u32)
        .map(|k| {
            let m = decompose_diag_square(k)?;
            let counts: serde_json::Map<String, Value> =
                IrrepFamily::ALL.iter().map(|f| (family_name(*f).to_string(), json!(m.get(&f.partition(k))))).collect();
            Ok(json!({ "k": k, "multiplicities": counts }))
        })
        .collect::<Result<_, symbif_core::Error>>()?;
    let law_ok = (4..=10u32).all(|k| {
        decompose_diag_square(k).is_ok_and(|m| {
            [(IrrepFamily::Trivial, 2), (IrrepFamily::Standard, 3), (IrrepFamily::TwoRow, 1), (IrrepFamily::Hook, 1)]
                .iter()
                .all(|(f, c)| m.get(&f.partition(k)) == *c)
        })
    });
    report.hard("decomposition_law", law_ok, json!({ "widths": law }));

    let table = compare_character_table(&character_table_golden()?)?;
    report.hard("character_table_golden", table.passed(), json!({ "unmatched_rows": table.unmatched_rows }));
    let dec = decomposition_golden()?;
    let computed = decompose_diag_square(5)?;
    let mut dec_ok = true;
    for (name, &mult) in &dec {
        dec_ok &= computed.get(&partition_for(&table, name)?) == mult;
    }
    dec_ok &= computed.entries.len() == dec.len();
    report.hard("decomposition_golden", dec_ok, json!({ "reference": dec }));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mc_is_reproducible() {
        let a = mc_kernel_trials(4, 3, 2000, 7, 3.0).unwrap();
        let b = mc_kernel_trials(4, 3, 2000, 7, 3.0).unwrap();
        assert_eq!(a, b);
        assert!(a.deterministic);
    }

    #[test]
    fn gradient_paper_differs_away_from_alpha_one() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let s = random_student(&mut rng, 4).unwrap();
        let t = WeightMatrix::identity(4).unwrap();
        let e = derivative_errors(&s, &t, 2.0).unwrap();
        assert!(e.gradient_exact < 1e-6);
        assert!(e.gradient_paper > 1e-3);
        let one = derivative_errors(&s, &t, 1.0).unwrap();
        assert!(one.gradient_paper < 1e-6 && one.hessian_paper < 1e-5);
    }

    #[test]
    fn perturbed_sweep_fails() {
        let ok = spectrum_sweep(&[4], &[1.0], 1e-10, false).unwrap();
        assert!(ok[0].passed);
        let bad = spectrum_sweep(&[4], &[1.0], 1e-10, true).unwrap();
        assert!(!bad[0].passed);
    }
}
