//! Exact Laurent polynomials in `α` and `π` with rational coefficients, used
//! to compare the closed-form spectrum against a printed display by
//! coefficient comparison instead of sampling.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

/// `Σ c_{i,j} α^i π^j` with `i >= 0` and `j` of either sign.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Laurent {
    terms: BTreeMap<(u32, i32), Rational64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn constant(c: Rational64) -> Self {
        Laurent::monomial(c, 0, 0)
    }

    pub fn int(c: i64) -> Self {
        Laurent::constant(Rational64::from_integer(c))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Laurent::constant(Rational64::new(n, d))
    }

    /// `c·α^alpha_pow·π^pi_pow`.
    pub fn monomial(c: Rational64, alpha_pow: u32, pi_pow: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((alpha_pow, pi_pow), c);
        }
        Laurent { terms }
    }

    pub fn alpha() -> Self {
        Laurent::monomial(Rational64::one(), 1, 0)
    }

    pub fn pi() -> Self {
        Laurent::monomial(Rational64::one(), 0, 1)
    }

    pub fn pi_inv() -> Self {
        Laurent::monomial(Rational64::one(), 0, -1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha_pow: u32, pi_pow: i32) -> Rational64 {
        self.terms.get(&(alpha_pow, pi_pow)).copied().unwrap_or_else(Rational64::zero)
    }

    /// Nonzero terms as `((α power, π power), coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, i32), &Rational64)> {
        self.terms.iter()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Laurent::int(1), |acc, _| &acc * self)
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| {
                let c = *c.numer() as f64 / *c.denom() as f64;
                c * libm::pow(alpha, i as f64) * libm::pow(core::f64::consts::PI, j as f64)
            })
            .sum()
    }

    fn insert_add(&mut self, key: (u32, i32), c: Rational64) {
        let entry = self.terms.entry(key).or_insert_with(Rational64::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&k, &c) in &rhs.terms {
            out.insert_add(k, c);
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(&k, &c)| (k, -c)).collect() }
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        self + &(-rhs)
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &rhs.terms {
                out.insert_add((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Laurent {
            type Output = Laurent;
            fn $m(self, rhs: Laurent) -> Laurent {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl core::fmt::Display for Laurent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (idx, (&(i, j), c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                s.push('-');
            }
            s.push_str(&format!("{}", c.abs()));
            if i > 0 {
                s.push_str(&format!("·α^{i}"));
            }
            if j != 0 {
                s.push_str(&format!("·π^{j}"));
            }
        }
        f.write_str(&s)
    }
}

/// `(a, b, c)` of the block operator as Laurent polynomials.
pub fn abc_symbolic() -> (Laurent, Laurent, Laurent) {
    let al = Laurent::alpha();
    let a = &Laurent::ratio(1, 2) - &(&al * &Laurent::ratio(1, 4));
    let b = &al * &Laurent::ratio(1, 4);
    let c = &(&al * &Laurent::pi_inv()) * &Laurent::ratio(1, 2);
    (a, b, c)
}

/// Closed-form spectrum at width `k` in the shape `(p ± √R)/2`, one pair per family.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicSpectrum {
    pub wedge: Laurent,
    pub sym0: Laurent,
    pub w_p: Laurent,
    pub w_radicand: Laurent,
    pub ij_p: Laurent,
    pub ij_radicand: Laurent,
}

pub fn symbolic_spectrum(k: i64) -> SymbolicSpectrum {
    let (a, b, c) = abc_symbolic();
    let kk = Laurent::int(k);
    let two = Laurent::int(2);
    let four = Laurent::int(4);
    let w_p = &(&a * &kk) + &(&two * &b);
    let w_radicand = &(&(&a * &a) * &(&kk * &kk)) + &(&(&four * &c) * &(&c - &(&two * &a)));
    let ij_p = &(&two * &b) + &(&kk * &(&a + &c));
    let amc = &a - &c;
    let ij_radicand = &(&(&kk * &kk) * &(&amc * &amc)) + &(&(&(&four * &c) * &(&(&two * &a) - &c)) * &Laurent::int(k - 1));
    SymbolicSpectrum { wedge: &b - &c, sym0: &b + &c, w_p, w_radicand, ij_p, ij_radicand }
}

/// A displayed eigenvalue `(numerator_p ± √(numerator_radicand)) / denominator`
/// compared with `(p ± √R)/2` by checking `2·numerator_p = denominator·p` and
/// `4·numerator_radicand = denominator²·R`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplayCheck {
    pub name: &'static str,
    pub linear_difference: Laurent,
    pub radicand_difference: Laurent,
}

impl DisplayCheck {
    pub fn holds(&self) -> bool {
        self.linear_difference.is_zero() && self.radicand_difference.is_zero()
    }
}

fn compare_pair(name: &'static str, p: &Laurent, r: &Laurent, num_p: &Laurent, num_r: &Laurent, den: &Laurent) -> DisplayCheck {
    let two = Laurent::int(2);
    let four = Laurent::int(4);
    DisplayCheck { name, linear_difference: &(&two * num_p) - &(den * p), radicand_difference: &(&four * num_r) - &(&(den * den) * r) }
}

/// The printed width-5 spectrum: `α/4 - α/2π`, `α/4 + α/2π`,
/// `(π(10-3α) ± ρ₁)/8π` and `(π(10-3α) + 10α ± ρ₂)/8π` with
/// `ρ₁² = 25π²(α-2)² + 16πα(α-2) + 16α²`, `ρ₂² = 25π²(α-2)² + 36πα(α-2) + 36α²`.
pub fn width5_display_checks() -> Vec<DisplayCheck> {
    let s = symbolic_spectrum(5);
    let al = Laurent::alpha();
    let pi = Laurent::pi();
    let quarter_alpha = &al * &Laurent::ratio(1, 4);
    let alpha_over_2pi = &(&al * &Laurent::pi_inv()) * &Laurent::ratio(1, 2);
    let am2 = &al - &Laurent::int(2);
    let base = &(&Laurent::int(25) * &(&pi * &pi)) * &(&am2 * &am2);
    let rho1_sq = &(&base + &(&(&Laurent::int(16) * &pi) * &(&al * &am2))) + &(&Laurent::int(16) * &(&al * &al));
    let rho2_sq = &(&base + &(&(&Laurent::int(36) * &pi) * &(&al * &am2))) + &(&Laurent::int(36) * &(&al * &al));
    let lin1 = &pi * &(&Laurent::int(10) - &(&Laurent::int(3) * &al));
    let lin2 = &lin1 + &(&Laurent::int(10) * &al);
    let den = &Laurent::int(8) * &pi;
    let zero = Laurent::zero();
    alloc::vec![
        DisplayCheck {
            name: "wedge",
            linear_difference: &s.wedge - &(&quarter_alpha - &alpha_over_2pi),
            radicand_difference: zero.clone()
        },
        DisplayCheck { name: "sym0", linear_difference: &s.sym0 - &(&quarter_alpha + &alpha_over_2pi), radicand_difference: zero },
        compare_pair("W_plus/W_minus", &s.w_p, &s.w_radicand, &lin1, &rho1_sq, &den),
        compare_pair("span_IJ_plus/span_IJ_minus", &s.ij_p, &s.ij_radicand, &lin2, &rho2_sq, &den),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::LeakyParam;
    use crate::spectral::{eigenvalue, FormulaId};

    #[test]
    fn arithmetic_basics() {
        let x = &Laurent::alpha() + &Laurent::pi_inv();
        let sq = &x * &x;
        assert_eq!(sq.coefficient(2, 0), Rational64::from_integer(1));
        assert_eq!(sq.coefficient(1, -1), Rational64::from_integer(2));
        assert_eq!(sq.coefficient(0, -2), Rational64::from_integer(1));
        assert!((&x - &x).is_zero());
        assert_eq!(x.pow(3), &sq * &x);
    }

    #[test]
    fn printed_width5_spectrum_matches() {
        for check in width5_display_checks() {
            assert!(check.holds(), "{}: {} / {}", check.name, check.linear_difference, check.radicand_difference);
        }
    }

    #[test]
    fn altered_display_is_rejected() {
        let s = symbolic_spectrum(5);
        let pi = Laurent::pi();
        let wrong = &pi * &(&Laurent::int(10) - &(&Laurent::int(2) * &Laurent::alpha()));
        let c = compare_pair("x", &s.w_p, &s.w_radicand, &wrong, &s.w_radicand, &(&Laurent::int(8) * &pi));
        assert!(!c.holds());
    }

    #[test]
    fn symbolic_values_agree_with_numeric_closed_forms() {
        for k in [4i64, 5, 9] {
            let s = symbolic_spectrum(k);
            for al in [-1.5, 0.2, 1.0, 3.3] {
                let p = LeakyParam::new(al).unwrap();
                let wp = 0.5 * (s.w_p.eval(al) + s.w_radicand.eval(al).sqrt());
                let im = 0.5 * (s.ij_p.eval(al) - s.ij_radicand.eval(al).sqrt());
                assert!((wp - eigenvalue(FormulaId::WPlus, k as usize, p).unwrap()).abs() < 1e-12);
                assert!((im - eigenvalue(FormulaId::SpanIjMinus, k as usize, p).unwrap()).abs() < 1e-12);
                assert!((s.wedge.eval(al) - eigenvalue(FormulaId::Wedge, k as usize, p).unwrap()).abs() < 1e-15);
            }
        }
    }
}
