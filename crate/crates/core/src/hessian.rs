//! Hessian blocks of the loss, the Hessian at the global minimum and the
//! equivalent block operator on `k×k` matrices.
//!
//! Block `A_ij` is the `k×k` matrix of second derivatives in `(u_i, u_j)`.
//! The dense matrix places block `(i, j)` at rows `i·k..`, columns `j·k..`,
//! so index `i·k + d` is coordinate `d` of row `u_i`, matching
//! [`crate::landscape::finite_diff_hessian`].
//!
//! For the block operator a matrix `U` is identified with the stacked vector
//! of its columns `(u_1, .., u_k)`, i.e. `vec(U)[i·k + d] = U[d, i]`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, inconsistent, Result};
use crate::landscape::{KernelAngles, LeakyParam, WeightMatrix};

/// Coefficients of the block operator: `a = ½ - α/4`, `b = α/4`, `c = α/2π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbcCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn abc(alpha: LeakyParam) -> AbcCoefficients {
    let al = alpha.value();
    AbcCoefficients { a: 0.5 - al / 4.0, b: al / 4.0, c: al / (2.0 * PI) }
}

/// Unit normal to `y` in the plane of `x, y`: `(x̂ - cosθ ŷ)/sinθ`, zero when parallel.
/// `ang` is symmetric in its arguments apart from the order of `norms`.
fn unit_normal(x: &[f64], y: &[f64], ang: &KernelAngles) -> DVector<f64> {
    let k = x.len();
    if ang.parallel {
        return DVector::zeros(k);
    }
    let (nx, ny) = (crate::landscape::norm(x), crate::landscape::norm(y));
    DVector::from_iterator(k, (0..k).map(|d| (x[d] / nx - ang.cos * y[d] / ny) / ang.sin))
}

/// `h1(x,y) = (sinθ|y| / 2π|x|)(I - x̂x̂ᵀ + n̂_yx n̂_yxᵀ)`.
pub fn h1(x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    let ang = KernelAngles::new(x, y)?;
    let k = x.len();
    if ang.parallel {
        return Ok(DMatrix::zeros(k, k));
    }
    let (nx, ny) = ang.norms;
    let xh = DVector::from_iterator(k, x.iter().map(|v| v / nx));
    let n_yx = unit_normal(y, x, &ang);
    let m = DMatrix::identity(k, k) - &xh * xh.transpose() + &n_yx * n_yx.transpose();
    Ok(m * (ang.sin * ny / (2.0 * PI * nx)))
}

/// `h2(x,y) = (1/2π)(-θI + n̂_xy ŷᵀ + n̂_yx x̂ᵀ)`.
pub fn h2(x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    let ang = KernelAngles::new(x, y)?;
    let k = x.len();
    let (nx, ny) = ang.norms;
    let xh = DVector::from_iterator(k, x.iter().map(|v| v / nx));
    let yh = DVector::from_iterator(k, y.iter().map(|v| v / ny));
    let n_xy = unit_normal(x, y, &ang);
    let n_yx = unit_normal(y, x, &ang);
    let m = DMatrix::identity(k, k) * (-ang.theta) + &n_xy * yh.transpose() + &n_yx * xh.transpose();
    Ok(m / (2.0 * PI))
}

/// `k×k` array of `k×k` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianBlocks {
    k: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl HessianBlocks {
    /// Builds from blocks listed row by row (`blocks[i·k + j] = A_ij`).
    pub fn from_blocks(k: usize, blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        if k == 0 || blocks.len() != k * k {
            return Err(domain(format!("expected {} blocks, got {}", k * k, blocks.len())));
        }
        if blocks.iter().any(|b| b.nrows() != k || b.ncols() != k) {
            return Err(domain(format!("every block must be {k}×{k}")));
        }
        Ok(HessianBlocks { k, blocks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.blocks[i * self.k + j]
    }

    pub fn block_mut(&mut self, i: usize, j: usize) -> &mut DMatrix<f64> {
        &mut self.blocks[i * self.k + j]
    }

    /// Largest entry of `A_ij - A_jiᵀ` over all block pairs.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.k {
            for j in i..self.k {
                worst = worst.max((self.block(i, j) - self.block(j, i).transpose()).amax());
            }
        }
        worst
    }

    /// Largest blockwise entry difference.
    pub fn max_abs_diff(&self, other: &HessianBlocks) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max)
    }
}

/// Hessian blocks `A_ii = ½I + α Σ_j (h1(u_i,u_j) - h1(u_i,v_j))`, `A_ij = ½I + α h2(u_i,u_j)`.
pub fn hessian_paper(student: &WeightMatrix, teacher: &WeightMatrix, alpha: LeakyParam) -> Result<HessianBlocks> {
    let k = student.k();
    if teacher.k() != k {
        return Err(domain(format!("student k = {k} but teacher k = {}", teacher.k())));
    }
    let al = alpha.value();
    let half = DMatrix::identity(k, k) * 0.5;
    let mut blocks = Vec::with_capacity(k * k);
    for i in 0..k {
        let ui = student.row(i);
        for j in 0..k {
            let block = if i == j {
                let mut sum = DMatrix::zeros(k, k);
                for l in 0..k {
                    sum += h1(ui, student.row(l))? - h1(ui, teacher.row(l))?;
                }
                &half + sum * al
            } else {
                &half + h2(ui, student.row(j))? * al
            };
            blocks.push(block);
        }
    }
    HessianBlocks::from_blocks(k, blocks)
}

/// Hessian at the identity teacher: `A_ii = ½I`, `A_ij = aI + c(E_ij + E_ji)` for `i ≠ j`.
pub fn hessian_at_minimum(k: usize, alpha: LeakyParam) -> Result<HessianBlocks> {
    if k < 2 {
        return Err(domain(format!("k must be at least 2, got {k}")));
    }
    let AbcCoefficients { a, c, .. } = abc(alpha);
    let mut blocks = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            if i == j {
                blocks.push(DMatrix::identity(k, k) * 0.5);
            } else {
                let mut m = DMatrix::identity(k, k) * a;
                m[(i, j)] += c;
                m[(j, i)] += c;
                blocks.push(m);
            }
        }
    }
    HessianBlocks::from_blocks(k, blocks)
}

/// `ℒ(U) = U(aJ + bI) + c(Uᵀ + tr(U)I - 2Diag(U))`.
pub fn block_operator_apply(u: &DMatrix<f64>, alpha: LeakyParam) -> Result<DMatrix<f64>> {
    if u.nrows() != u.ncols() {
        return Err(domain(format!("block operator needs a square matrix, got {}×{}", u.nrows(), u.ncols())));
    }
    let k = u.nrows();
    let AbcCoefficients { a, b, c } = abc(alpha);
    let aj_bi = DMatrix::from_element(k, k, a) + DMatrix::identity(k, k) * b;
    let mut out = u * aj_bi + u.transpose() * c;
    let tr = u.trace();
    for d in 0..k {
        out[(d, d)] += c * (tr - 2.0 * u[(d, d)]);
    }
    Ok(out)
}

/// Places the blocks into a symmetric `k²×k²` matrix.
///
/// Asymmetry above `1e-9` is an error; anything smaller is averaged out.
pub fn assemble_dense(blocks: &HessianBlocks) -> Result<DMatrix<f64>> {
    let k = blocks.k;
    let n = k * k;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            m.view_mut((i * k, j * k), (k, k)).copy_from(blocks.block(i, j));
        }
    }
    let asym = (&m - m.transpose()).amax();
    if asym > 1e-9 {
        return Err(inconsistent(format!("assembled Hessian is asymmetric by {asym:e}")));
    }
    Ok((&m + m.transpose()) * 0.5)
}

/// Inverse of [`assemble_dense`] for a `k²×k²` matrix.
pub fn disassemble(m: &DMatrix<f64>, k: usize) -> Result<HessianBlocks> {
    if m.nrows() != k * k || m.ncols() != k * k {
        return Err(domain(format!("expected a {}×{} matrix", k * k, k * k)));
    }
    let blocks = (0..k * k).map(|ij| m.view(((ij / k) * k, (ij % k) * k), (k, k)).into_owned()).collect();
    HessianBlocks::from_blocks(k, blocks)
}

/// Stacks the columns of `u`.
pub fn vec_columns(u: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(u.as_slice())
}

/// Inverse of [`vec_columns`].
pub fn unvec_columns(v: &DVector<f64>, k: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(k, k, v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::finite_diff_hessian;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    fn param(a: f64) -> LeakyParam {
        LeakyParam::new(a).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha20Rng, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(k, k, |_, _| rng.sample(StandardNormal))
    }

    /// `Φ(x,y) = |y| sinθ x̂ - θ y`.
    fn phi(x: &[f64], y: &[f64]) -> Vec<f64> {
        let ang = KernelAngles::new(x, y).unwrap();
        (0..x.len()).map(|d| ang.norms.1 * ang.sin * x[d] / ang.norms.0 - ang.theta * y[d]).collect()
    }

    #[test]
    fn abc_reference_values() {
        assert_eq!(abc(param(0.0)), AbcCoefficients { a: 0.5, b: 0.0, c: 0.0 });
        let one = abc(param(1.0));
        assert_eq!((one.a, one.b), (0.25, 0.25));
        assert!((one.c - 1.0 / (2.0 * PI)).abs() < 1e-16);
        let two = abc(param(2.0));
        assert_eq!((two.a, two.b), (0.0, 0.5));
        assert!((two.c - 1.0 / PI).abs() < 1e-16);
    }

    #[test]
    fn h1_vanishes_on_parallel_inputs() {
        assert_eq!(h1(&[1.0, 2.0, 0.0], &[2.0, 4.0, 0.0]).unwrap().amax(), 0.0);
        assert_eq!(h1(&[1.0, 2.0, 0.0], &[-0.5, -1.0, 0.0]).unwrap().amax(), 0.0);
        assert!(h1(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn h2_on_orthogonal_unit_vectors() {
        let got = h2(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        let mut want = DMatrix::identity(3, 3) * (-PI / 2.0);
        want[(0, 1)] += 1.0;
        want[(1, 0)] += 1.0;
        assert!((got - want / (2.0 * PI)).amax() < 1e-15);
    }

    #[test]
    fn h1_is_scaled_jacobian_of_phi() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
            let y: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
            let h = 1e-6;
            let mut jac = DMatrix::zeros(4, 4);
            for d in 0..4 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[d] += h;
                xm[d] -= h;
                let (fp, fm) = (phi(&xp, &y), phi(&xm, &y));
                for r in 0..4 {
                    jac[(r, d)] = (fp[r] - fm[r]) / (2.0 * h) / (2.0 * PI);
                }
            }
            assert!((h1(&x, &y).unwrap() - jac).amax() < 1e-6);
        }
    }

    #[test]
    fn hessian_paper_at_minimum_matches_closed_form() {
        for k in [2, 4, 5] {
            let t = WeightMatrix::identity(k).unwrap();
            for al in [-1.0, 0.0, 0.6, 1.0, 2.5] {
                let p = hessian_paper(&t, &t, param(al)).unwrap();
                let m = hessian_at_minimum(k, param(al)).unwrap();
                assert!(p.max_abs_diff(&m) < 1e-12, "k={k} α={al}");
            }
        }
    }

    #[test]
    fn alpha_zero_blocks_are_half_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let s = WeightMatrix::from_matrix(&random_matrix(&mut rng, 4)).unwrap();
        let t = WeightMatrix::identity(4).unwrap();
        let p = hessian_paper(&s, &t, param(0.0)).unwrap();
        let half = DMatrix::<f64>::identity(4, 4) * 0.5;
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p.block(i, j), &half);
            }
        }
    }

    #[test]
    fn hessian_paper_matches_finite_differences_at_alpha_one() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let t = WeightMatrix::identity(4).unwrap();
        let mut tested = 0;
        while tested < 20 {
            let s = WeightMatrix::from_matrix(&random_matrix(&mut rng, 4)).unwrap();
            if s.min_row_norm() < 0.3 {
                continue;
            }
            let p = assemble_dense(&hessian_paper(&s, &t, param(1.0)).unwrap()).unwrap();
            let fd = finite_diff_hessian(&s, &t, param(1.0), 1e-4).unwrap();
            assert!((p - &fd).amax() <= 1e-5 * fd.amax().max(1.0));
            tested += 1;
        }
    }

    #[test]
    fn operator_on_identity_and_ones() {
        for k in [4usize, 5, 7] {
            for al in [0.0, 1.0, 2.7] {
                let AbcCoefficients { a, b, c } = abc(param(al));
                let kf = k as f64;
                let i = DMatrix::<f64>::identity(k, k);
                let j = DMatrix::<f64>::from_element(k, k, 1.0);
                let li = block_operator_apply(&i, param(al)).unwrap();
                assert!((li - (&j * a + &i * (b + c * kf - c))).amax() < 1e-14);
                let lj = block_operator_apply(&j, param(al)).unwrap();
                assert!((lj - (&i * (c * (kf - 2.0)) + &j * (kf * a + b + c))).amax() < 1e-13);
            }
        }
        assert!(block_operator_apply(&DMatrix::zeros(2, 3), param(1.0)).is_err());
    }

    #[test]
    fn operator_matches_assembled_matrix() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        for k in [4, 5, 6] {
            for al in [0.0, 0.8, 3.1] {
                let dense = assemble_dense(&hessian_at_minimum(k, param(al)).unwrap()).unwrap();
                for _ in 0..5 {
                    let u = random_matrix(&mut rng, k);
                    let lhs = &dense * vec_columns(&u);
                    let rhs = vec_columns(&block_operator_apply(&u, param(al)).unwrap());
                    assert!((lhs - rhs).amax() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn assembly_basics() {
        let zero = HessianBlocks::from_blocks(2, alloc::vec![DMatrix::zeros(2, 2); 4]).unwrap();
        assert_eq!(assemble_dense(&zero).unwrap(), DMatrix::zeros(4, 4));
        let mut bad = hessian_at_minimum(3, param(1.0)).unwrap();
        bad.block_mut(0, 1)[(0, 2)] += 1e-6;
        assert!(assemble_dense(&bad).is_err());
        assert!(hessian_at_minimum(1, param(1.0)).is_err());
        let m = hessian_at_minimum(5, param(1.0)).unwrap();
        let off = m.block(0, 3);
        assert!((off[(1, 1)] - 0.25).abs() < 1e-16 && (off[(0, 3)] - 0.5 / PI).abs() < 1e-16 && (off[(3, 3)] - 0.25).abs() < 1e-16);
    }

    proptest! {
        #[test]
        fn disassemble_inverts_assemble(seed in any::<u64>(), k in 2usize..6) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, k * k);
            let sym = (&m + m.transpose()) * 0.5;
            let blocks = disassemble(&sym, k).unwrap();
            prop_assert_eq!(assemble_dense(&blocks).unwrap(), sym);
        }

        #[test]
        fn hessian_paper_blocks_are_transpose_symmetric(seed in any::<u64>(), al in -1.0f64..4.0) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let s = WeightMatrix::from_matrix(&random_matrix(&mut rng, 4)).unwrap();
            let t = WeightMatrix::identity(4).unwrap();
            let p = hessian_paper(&s, &t, param(al)).unwrap();
            prop_assert!(p.asymmetry() < 1e-12);
        }
    }
}
