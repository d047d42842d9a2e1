//! Multi-indices over modes.
//!
//! A [`MultiIndex`] α assigns a multiplicity α_k ≥ 1 to finitely many modes
//! k ≥ 1 and labels the Wick monomial :x_α: = :x₁^{α₁}⋯x_d^{α_d}:. Modes
//! with multiplicity zero are never stored, so structural equality is
//! semantic equality and the `BTreeMap` ordering gives a stable total order
//! on monomials.

use crate::scalar::{factorial, Rational};
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;

/// A finitely supported multi-index α: mode → multiplicity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex {
    mults: BTreeMap<u32, u32>,
}

impl MultiIndex {
    /// The empty index (degree 0, labelling the constant monomial 1).
    pub fn empty() -> Self {
        MultiIndex::default()
    }

    /// The index with multiplicity 1 at a single mode.
    pub fn single(mode: u32) -> Self {
        let mut mults = BTreeMap::new();
        mults.insert(mode, 1);
        MultiIndex { mults }
    }

    /// Build from (mode, multiplicity) pairs; zero multiplicities are
    /// dropped, repeated modes accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut mults = BTreeMap::new();
        for (mode, mult) in pairs {
            if mult > 0 {
                *mults.entry(mode).or_insert(0) += mult;
            }
        }
        MultiIndex { mults }
    }

    /// Build from a list of modes with repetition, e.g. `[1, 2, 2]` ↦
    /// x₁x₂².
    pub fn from_modes<I: IntoIterator<Item = u32>>(modes: I) -> Self {
        MultiIndex::from_pairs(modes.into_iter().map(|m| (m, 1)))
    }

    /// Total degree |α| = Σ_k α_k.
    pub fn degree(&self) -> u32 {
        self.mults.values().sum()
    }

    /// Multiplicity at a mode (0 when absent).
    pub fn mult(&self, mode: u32) -> u32 {
        self.mults.get(&mode).copied().unwrap_or(0)
    }

    /// Iterate (mode, multiplicity) pairs in increasing mode order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.mults.iter().map(|(&k, &m)| (k, m))
    }

    /// Modes with nonzero multiplicity, increasing.
    pub fn modes(&self) -> impl Iterator<Item = u32> + '_ {
        self.mults.keys().copied()
    }

    /// Expand to a sorted list of modes with repetition (degree entries).
    pub fn to_mode_list(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (&mode, &mult) in &self.mults {
            for _ in 0..mult {
                out.push(mode);
            }
        }
        out
    }

    /// Whether the index is empty (degree 0).
    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    /// Largest mode present, if any.
    pub fn max_mode(&self) -> Option<u32> {
        self.mults.keys().next_back().copied()
    }

    /// α with the multiplicity at `mode` increased by 1.
    pub fn raised(&self, mode: u32) -> MultiIndex {
        let mut mults = self.mults.clone();
        *mults.entry(mode).or_insert(0) += 1;
        MultiIndex { mults }
    }

    /// α with the multiplicity at `mode` decreased by 1, or `None` when the
    /// mode is absent.
    pub fn lowered(&self, mode: u32) -> Option<MultiIndex> {
        let current = self.mult(mode);
        if current == 0 {
            return None;
        }
        let mut mults = self.mults.clone();
        if current == 1 {
            mults.remove(&mode);
        } else {
            mults.insert(mode, current - 1);
        }
        Some(MultiIndex { mults })
    }

    /// α! = Π_k α_k! as an exact rational.
    pub fn factorial(&self) -> Rational {
        let mut acc = Rational::one();
        for &m in self.mults.values() {
            acc *= factorial(m);
        }
        acc
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiIndex({self})")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mults.is_empty() {
            return write!(f, "1");
        }
        write!(f, ":")?;
        for (&mode, &mult) in &self.mults {
            if mult == 1 {
                write!(f, "x{mode}")?;
            } else {
                write!(f, "x{mode}^{mult}")?;
            }
        }
        write!(f, ":")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_normalizes_zeros_and_repeats() {
        let a = MultiIndex::from_pairs([(1, 2), (3, 0), (2, 1), (1, 1)]);
        assert_eq!(a, MultiIndex::from_modes([1, 1, 1, 2]));
        assert_eq!(a.degree(), 4);
        assert_eq!(a.mult(1), 3);
        assert_eq!(a.mult(3), 0);
        assert_eq!(a.max_mode(), Some(2));
        assert_eq!(a.to_mode_list(), vec![1, 1, 1, 2]);
    }

    #[test]
    fn raise_and_lower_are_inverse() {
        let a = MultiIndex::from_modes([1, 2, 2]);
        let up = a.raised(3);
        assert_eq!(up.mult(3), 1);
        assert_eq!(up.lowered(3), Some(a.clone()));
        assert_eq!(a.lowered(5), None);
        let down = a.lowered(2).unwrap();
        assert_eq!(down, MultiIndex::from_modes([1, 2]));
        // Lowering to zero removes the key entirely, keeping equality semantic.
        let single = MultiIndex::single(7);
        assert_eq!(single.lowered(7), Some(MultiIndex::empty()));
    }

    #[test]
    fn factorial_is_product_of_mode_factorials() {
        assert_eq!(MultiIndex::empty().factorial(), Rational::from_integer(1));
        // (x₁³x₂²)! = 3!·2! = 12.
        let a = MultiIndex::from_pairs([(1, 3), (2, 2)]);
        assert_eq!(a.factorial(), Rational::from_integer(12));
    }

    #[test]
    fn display_reads_as_wick_monomial() {
        assert_eq!(MultiIndex::empty().to_string(), "1");
        assert_eq!(MultiIndex::from_modes([1, 2, 2]).to_string(), ":x1x2^2:");
    }

    #[test]
    fn ordering_is_stable_and_total() {
        let a = MultiIndex::from_modes([1]);
        let b = MultiIndex::from_modes([1, 1]);
        let c = MultiIndex::from_modes([2]);
        let mut v = [c.clone(), b.clone(), a.clone()];
        v.sort();
        // BTreeMap ordering: shorter-prefix and smaller-mode structures first.
        assert_eq!(v.len(), 3);
        assert!(v.contains(&a) && v.contains(&b) && v.contains(&c));
    }
}
