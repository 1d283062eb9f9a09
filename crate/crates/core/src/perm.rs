//! Permutations of `{0, .., n-1}` stored as image vectors.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{domain, Result};
use crate::symrep::CycleType;

/// A permutation `x -> images[x]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n as u8).collect() }
    }

    /// Builds a permutation from its image vector, rejecting non-bijections.
    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(domain("image vector is not a bijection"));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of `n` points from 0-based cycles.
    pub fn from_cycles(n: usize, cycles: &[&[u8]]) -> Result<Self> {
        let mut images: Vec<u8> = (0..n as u8).collect();
        for cycle in cycles {
            for (idx, &x) in cycle.iter().enumerate() {
                let next = cycle[(idx + 1) % cycle.len()];
                if x as usize >= n || next as usize >= n {
                    return Err(domain("cycle entry out of range"));
                }
                images[x as usize] = next;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = alloc::vec![0u8; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u8;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    /// Disjoint cycles of length at least two, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let n = self.images.len();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u8);
                x = self.images[x] as usize;
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.images.len();
        let mut lengths: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        let moved: usize = lengths.iter().sum();
        lengths.extend(core::iter::repeat_n(1, n - moved));
        CycleType::from_lengths(&lengths)
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    /// 1-based cycle notation, `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let mut s = String::new();
        for cycle in self.cycles() {
            s.push('(');
            for (idx, x) in cycle.iter().enumerate() {
                if idx > 0 {
                    s.push(',');
                }
                s.push_str(&alloc::format!("{}", x + 1));
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("()");
        }
        s
    }

    /// Parses 1-based cycle notation such as `(1,2,3)(4,5)` on `n` points.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Perm> {
        let text = text.trim();
        if text == "()" {
            return Ok(Perm::identity(n));
        }
        let mut cycles: Vec<Vec<u8>> = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| domain("cycle must start with '('"))?;
            let close = open.find(')').ok_or_else(|| domain("unterminated cycle"))?;
            let mut cycle = Vec::new();
            for tok in open[..close].split(',') {
                let v: usize = tok.trim().parse().map_err(|_| domain("bad cycle entry"))?;
                if v == 0 || v > n {
                    return Err(domain("cycle entry out of range"));
                }
                cycle.push((v - 1) as u8);
            }
            cycles.push(cycle);
            rest = &open[close + 1..];
        }
        let refs: Vec<&[u8]> = cycles.iter().map(Vec::as_slice).collect();
        Perm::from_cycles(n, &refs)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

/// All permutations of `n` points in lexicographic order of image vectors.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut current: Vec<u8> = (0..n as u8).collect();
    let mut out = alloc::vec![Perm { images: current.clone() }];
    // Standard next-permutation step.
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(Perm { images: current.clone() });
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_factor_first() {
        let a = Perm::parse_cycles(3, "(1,2)").unwrap();
        let b = Perm::parse_cycles(3, "(2,3)").unwrap();
        // a∘b sends 1 -> 2, 2 -> 3 -> 3, 3 -> 2 -> 1.
        assert_eq!(a.compose(&b).to_cycle_string(), "(1,2,3)");
    }

    #[test]
    fn cycle_notation_round_trips() {
        let p = Perm::parse_cycles(6, "(1,4)(2,5,6)").unwrap();
        assert_eq!(Perm::parse_cycles(6, &p.to_cycle_string()).unwrap(), p);
        assert_eq!(p.order(), 6);
        assert_eq!(p.cycle_type().counts()[1], 1);
    }

    #[test]
    fn all_perms_counts() {
        assert_eq!(all_perms(5).len(), 120);
        assert!(all_perms(4).windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn inverse_cancels() {
        for p in all_perms(4) {
            assert!(p.compose(&p.inverse()).is_identity());
        }
    }
}
