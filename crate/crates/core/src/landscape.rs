//! Closed-form loss, kernel and gradients of the teacher-student model.
//!
//! The student and teacher are `k×k` weight matrices whose rows are neuron
//! weights. With `x ~ N(0, I_k)` the population loss is
//! `½ E[(Σ_i σ_α(u_i·x) - Σ_i σ_α(v_i·x))²]`, and it expands into the
//! pairwise kernel `f_α`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DMatrix;
#[cfg_attr(test, allow(unused_imports))]
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};

/// Name of the random stream used by the Monte-Carlo estimators.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64) + Ziggurat StandardNormal (rand_distr 0.5)";

/// Threshold on `|x̂ - cosθ ŷ|` below which two vectors count as parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

/// Leaky parameter `α`; the activation is `max{(1-α)a, a}`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LeakyParam(f64);

impl LeakyParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(domain(format!("alpha must be finite, got {alpha}")));
        }
        Ok(LeakyParam(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `σ_α(a) = max{(1-α)a, a}`.
    pub fn activate(self, a: f64) -> f64 {
        ((1.0 - self.0) * a).max(a)
    }

    /// `2 + α² - 2α`, twice the coefficient of `w·v` in the kernel.
    pub fn beta(self) -> f64 {
        2.0 + self.0 * self.0 - 2.0 * self.0
    }
}

/// `k×k` matrix with nonzero rows `u_1, .., u_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    rows: Vec<Vec<f64>>,
}

impl WeightMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k < 2 {
            return Err(domain(format!("need k >= 2 rows, got {k}")));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != k {
                return Err(domain(format!("row {i} has length {} but k = {k}", r.len())));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(domain(format!("row {i} has a non-finite entry")));
            }
            if norm(r) == 0.0 {
                return Err(domain(format!("row {i} is zero")));
            }
        }
        Ok(WeightMatrix { rows })
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(domain("weight matrix must be square"));
        }
        Self::from_rows((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
    }

    /// The teacher `v°` with rows `e_1, .., e_k`.
    pub fn identity(k: usize) -> Result<Self> {
        Self::from_rows((0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let k = self.k();
        DMatrix::from_fn(k, k, |i, j| self.rows[i][j])
    }

    /// Smallest row norm, the distance to the boundary of `Ω` in each row.
    pub fn min_row_norm(&self) -> f64 {
        self.rows.iter().map(|r| norm(r)).fold(f64::INFINITY, f64::min)
    }
}

/// Angle data between two nonzero vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelAngles {
    pub theta: f64,
    pub cos: f64,
    pub sin: f64,
    pub norms: (f64, f64),
    /// Whether the pair is parallel or antiparallel within [`PARALLEL_TOL`].
    pub parallel: bool,
}

impl KernelAngles {
    pub fn new(w: &[f64], v: &[f64]) -> Result<Self> {
        if w.len() != v.len() {
            return Err(domain("vectors have different lengths"));
        }
        let nw = norm(w);
        let nv = norm(v);
        if nw == 0.0 {
            return Err(domain("first argument has zero norm"));
        }
        if nv == 0.0 {
            return Err(domain("second argument has zero norm"));
        }
        let cos = (dot(w, v) / (nw * nv)).clamp(-1.0, 1.0);
        let residual = w.iter().zip(v).map(|(a, b)| (a / nw - cos * b / nv).powi(2)).sum::<f64>().sqrt();
        if residual <= PARALLEL_TOL {
            // arccos near ±1 amplifies rounding, so snap to the exact endpoint.
            let (theta, cos) = if cos > 0.0 { (0.0, 1.0) } else { (PI, -1.0) };
            return Ok(KernelAngles { theta, cos, sin: 0.0, norms: (nw, nv), parallel: true });
        }
        let theta = cos.acos();
        Ok(KernelAngles { theta, cos, sin: theta.sin(), norms: (nw, nv), parallel: false })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_pair(student: &WeightMatrix, teacher: &WeightMatrix) -> Result<()> {
    if student.k() != teacher.k() {
        return Err(domain(format!("student k = {} but teacher k = {}", student.k(), teacher.k())));
    }
    Ok(())
}

/// `f_α(w,v) = (1/2π)|w||v|(α²(sinθ - θcosθ) + (2+α²-2α)π cosθ)`.
pub fn kernel_f(w: &[f64], v: &[f64], alpha: LeakyParam) -> Result<f64> {
    let ang = KernelAngles::new(w, v)?;
    let a = alpha.value();
    let (nw, nv) = ang.norms;
    Ok(nw * nv / (2.0 * PI) * (a * a * (ang.sin - ang.theta * ang.cos) + alpha.beta() * PI * ang.cos))
}

/// Mean and standard error of a Monte-Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

fn welford(n: usize, mut sample: impl FnMut() -> f64) -> McEstimate {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        let x = sample();
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let var = m2 / (n - 1) as f64;
    McEstimate { estimate: mean, stderr: (var / n as f64).sqrt() }
}

/// Monte-Carlo estimate of `E[σ_α(w·x) σ_α(v·x)]` with `x ~ N(0, I)`.
pub fn kernel_mc(w: &[f64], v: &[f64], alpha: LeakyParam, n_samples: usize, seed: u64) -> Result<McEstimate> {
    KernelAngles::new(w, v)?;
    if n_samples < 2 {
        return Err(domain("need at least two samples"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut x = alloc::vec![0.0; w.len()];
    Ok(welford(n_samples, || {
        for xi in x.iter_mut() {
            *xi = rng.sample(StandardNormal);
        }
        alpha.activate(dot(w, &x)) * alpha.activate(dot(v, &x))
    }))
}

/// Closed-form loss `Σ_{i,j} ½f(u_i,u_j) - f(u_i,v_j) + ½f(v_i,v_j)`.
pub fn loss(student: &WeightMatrix, teacher: &WeightMatrix, alpha: LeakyParam) -> Result<f64> {
    check_pair(student, teacher)?;
    let k = student.k();
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..k {
            total += 0.5 * kernel_f(student.row(i), student.row(j), alpha)? - kernel_f(student.row(i), teacher.row(j), alpha)?
                + 0.5 * kernel_f(teacher.row(i), teacher.row(j), alpha)?;
        }
    }
    Ok(total)
}

/// Direct Monte-Carlo estimate of `½E[(Σσ(u_i·x) - Σσ(v_i·x))²]`.
pub fn loss_mc(student: &WeightMatrix, teacher: &WeightMatrix, alpha: LeakyParam, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_pair(student, teacher)?;
    if n_samples < 2 {
        return Err(domain("need at least two samples"));
    }
    let k = student.k();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut x = alloc::vec![0.0; k];
    Ok(welford(n_samples, || {
        for xi in x.iter_mut() {
            *xi = rng.sample(StandardNormal);
        }
        let y: f64 = (0..k).map(|i| alpha.activate(dot(student.row(i), &x)) - alpha.activate(dot(teacher.row(i), &x))).sum();
        0.5 * y * y
    }))
}

/// `∂f/∂w (w,v) = (α²/2π)(|v| sinθ ŵ - θ v) + ((2+α²-2α)/2) v`.
fn kernel_grad_w(w: &[f64], v: &[f64], alpha: LeakyParam, out: &mut [f64]) -> Result<()> {
    let ang = KernelAngles::new(w, v)?;
    let a2 = alpha.value() * alpha.value() / (2.0 * PI);
    let (nw, nv) = ang.norms;
    let half_beta = alpha.beta() / 2.0;
    for d in 0..w.len() {
        out[d] += a2 * (nv * ang.sin * w[d] / nw - ang.theta * v[d]) + half_beta * v[d];
    }
    Ok(())
}

/// Exact gradient of [`loss`]; row `i` is `∂F/∂u_i`.
pub fn gradient_exact(student: &WeightMatrix, teacher: &WeightMatrix, alpha: LeakyParam) -> Result<DMatrix<f64>> {
    check_pair(student, teacher)?;
    let k = student.k();
    let mut g = DMatrix::zeros(k, k);
    let mut plus = alloc::vec![0.0; k];
    let mut minus = alloc::vec![0.0; k];
    for i in 0..k {
        plus.fill(0.0);
        minus.fill(0.0);
        for j in 0..k {
            kernel_grad_w(student.row(i), student.row(j), alpha, &mut plus)?;
            kernel_grad_w(student.row(i), teacher.row(j), alpha, &mut minus)?;
        }
        for d in 0..k {
            g[(i, d)] = plus[d] - minus[d];
        }
    }
    Ok(g)
}

/// Published closed-form gradient, term by term:
/// `(α/2π)Σ_j(|u_j| sinθ_ij/|u_i| u_i - θ_ij u_j) - (α/2π)Σ_j(sinθ̃_ij/|u_i| u_i - θ̃_ij v_j) + ½Σ_j(u_j - v_j)`.
///
/// It coincides with [`gradient_exact`] at `α = 1` for unit teacher rows.
pub fn gradient_paper(student: &WeightMatrix, teacher: &WeightMatrix, alpha: LeakyParam) -> Result<DMatrix<f64>> {
    check_pair(student, teacher)?;
    let k = student.k();
    let c = alpha.value() / (2.0 * PI);
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        let ui = student.row(i);
        let ni = norm(ui);
        for j in 0..k {
            let uj = student.row(j);
            let vj = teacher.row(j);
            let a = KernelAngles::new(ui, uj)?;
            let b = KernelAngles::new(ui, vj)?;
            for d in 0..k {
                g[(i, d)] += c * (a.norms.1 * a.sin / ni * ui[d] - a.theta * uj[d]);
                g[(i, d)] -= c * (b.sin / ni * ui[d] - b.theta * vj[d]);
                g[(i, d)] += 0.5 * (uj[d] - vj[d]);
            }
        }
    }
    Ok(g)
}

fn perturbed(student: &WeightMatrix, i: usize, d: usize, delta: f64) -> Result<WeightMatrix> {
    let mut rows = student.rows().to_vec();
    rows[i][d] += delta;
    WeightMatrix::from_rows(rows)
}

fn check_step(student: &WeightMatrix, step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(domain(format!("step must be positive, got {step}")));
    }
    if student.min_row_norm() <= 2.0 * step {
        return Err(domain(format!("step {step} is too large: a row of norm {} could leave the domain", student.min_row_norm())));
    }
    Ok(())
}

/// Central differences of [`loss`], entrywise.
pub fn finite_diff_gradient(student: &WeightMatrix, teacher: &WeightMatrix, alpha: LeakyParam, step: f64) -> Result<DMatrix<f64>> {
    check_pair(student, teacher)?;
    check_step(student, step)?;
    let k = student.k();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for d in 0..k {
            let fp = loss(&perturbed(student, i, d, step)?, teacher, alpha)?;
            let fm = loss(&perturbed(student, i, d, -step)?, teacher, alpha)?;
            g[(i, d)] = (fp - fm) / (2.0 * step);
        }
    }
    Ok(g)
}

/// Second differences of [`loss`] as a `k²×k²` matrix; index `i·k + d` is entry `d` of row `i`.
pub fn finite_diff_hessian(student: &WeightMatrix, teacher: &WeightMatrix, alpha: LeakyParam, step: f64) -> Result<DMatrix<f64>> {
    check_pair(student, teacher)?;
    check_step(student, step)?;
    let k = student.k();
    let n = k * k;
    let at = |p: usize, sp: f64, q: usize, sq: f64| -> Result<f64> {
        let mut rows = student.rows().to_vec();
        rows[p / k][p % k] += sp;
        rows[q / k][q % k] += sq;
        loss(&WeightMatrix::from_rows(rows)?, teacher, alpha)
    };
    let mut h = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in p..n {
            let v =
                (at(p, step, q, step)? - at(p, step, q, -step)? - at(p, -step, q, step)? + at(p, -step, q, -step)?) / (4.0 * step * step);
            h[(p, q)] = v;
            h[(q, p)] = v;
        }
    }
    Ok(h)
}

/// Largest entrywise difference divided by the largest entry of `reference`.
pub fn relative_error(value: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    let diff = (value - reference).amax();
    let scale = reference.amax();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
