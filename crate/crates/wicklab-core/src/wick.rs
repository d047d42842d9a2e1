//! Wick-ordered polynomial algebra over Gaussian Q-space.
//!
//! Elements are finite linear combinations F = Σ_α c_α :x_α: of Wick
//! monomials, stored sparsely by multi-index. The inner product is the one
//! induced by the product Gaussian measure dμ = Π_k π^{−1/2}e^{−x_k²}dx_k,
//! under which distinct Wick monomials are orthogonal and
//! ‖:x_α:‖² = α!/2^{|α|}.
//!
//! All identities here are exact over the exact backends; the same code
//! runs over `f64`/`Complex64` where quadrature and truncation need it.

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::scalar::{Rational, Scalar};
use num_complex::Complex64;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// ‖:x_α:‖² = α!/2^{|α|} as an exact rational.
pub fn monomial_norm_sq(alpha: &MultiIndex) -> Rational {
    alpha.factorial() / Rational::from_integer(1i128 << alpha.degree())
}

/// ⟨:x_α:, :x_β:⟩ = δ_{αβ}·α!/2^{|α|}.
pub fn monomial_inner_product(alpha: &MultiIndex, beta: &MultiIndex) -> Rational {
    if alpha == beta {
        monomial_norm_sq(alpha)
    } else {
        Rational::from_integer(0)
    }
}

/// Value of the one-dimensional Wick power :x^n: at a point, via the
/// recurrence :x^{n+1}: = x·:x^n: − (n/2)·:x^{n−1}: with :x⁰: = 1.
pub fn wick_value_1d(n: u32, x: f64) -> f64 {
    let mut prev = 1.0; // :x⁰:
    if n == 0 {
        return prev;
    }
    let mut cur = x; // :x¹:
    for k in 1..n {
        let next = x * cur - (f64::from(k) / 2.0) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// A finitely supported real direction f = Σ_k f_k·e_k in the one-particle
/// space, stored as mode → coefficient. Coefficients live in the ambient
/// backend but must be real-valued; constructors enforce nothing, the
/// operations that require reality check it.
#[derive(Clone, PartialEq, Debug)]
pub struct DirectionVector<S: Scalar> {
    entries: BTreeMap<u32, S>,
}

impl<S: Scalar> Default for DirectionVector<S> {
    fn default() -> Self {
        DirectionVector {
            entries: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> DirectionVector<S> {
    /// The zero direction.
    pub fn zero() -> Self {
        DirectionVector::default()
    }

    /// The basis direction e_k.
    pub fn e(mode: u32) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(mode, S::one());
        DirectionVector { entries }
    }

    /// Build from (mode, coefficient) pairs; zero coefficients are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (u32, S)>>(pairs: I) -> Self {
        let mut entries = BTreeMap::new();
        for (mode, c) in pairs {
            if !c.is_zero() {
                entries.insert(mode, c);
            }
        }
        DirectionVector { entries }
    }

    /// Coefficient at a mode (zero when absent).
    pub fn coeff(&self, mode: u32) -> S {
        self.entries.get(&mode).cloned().unwrap_or_else(S::zero)
    }

    /// Iterate (mode, coefficient) pairs in increasing mode order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &S)> + '_ {
        self.entries.iter().map(|(&k, c)| (k, c))
    }

    /// Modes with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    /// Whether all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.entries.clone();
        for (&mode, c) in &other.entries {
            let entry = out.entry(mode).or_insert_with(S::zero);
            *entry += c.clone();
            if entry.is_zero() {
                out.remove(&mode);
            }
        }
        DirectionVector { entries: out }
    }

    /// Scale every coefficient.
    pub fn scale(&self, s: &S) -> Self {
        DirectionVector::from_pairs(
            self.entries
                .iter()
                .map(|(&mode, c)| (mode, c.clone() * s.clone())),
        )
    }

    /// Σ_k f_k² (the norm² of f in the one-particle space, for real f).
    pub fn norm_sq(&self) -> S {
        let mut acc = S::zero();
        for c in self.entries.values() {
            acc += c.clone() * c.clone();
        }
        acc
    }

    /// Euclidean pairing Σ_k f_k g_k.
    pub fn dot(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (&mode, c) in &self.entries {
            if let Some(d) = other.entries.get(&mode) {
                acc += c.clone() * d.clone();
            }
        }
        acc
    }

    /// The linear polynomial x(f) = Σ_k f_k·:x_k:.
    pub fn wick_linear(&self) -> WickPolynomial<S> {
        WickPolynomial::from_terms(
            self.entries
                .iter()
                .map(|(&mode, c)| (MultiIndex::single(mode), c.clone())),
        )
    }

    /// Convert coefficients to another backend.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DirectionVector<T> {
        DirectionVector::from_pairs(self.entries.iter().map(|(&mode, c)| (mode, f(c))))
    }
}

/// A sparse Wick polynomial Σ_α c_α·:x_α:.
#[derive(Clone, PartialEq)]
pub struct WickPolynomial<S: Scalar> {
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Default for WickPolynomial<S> {
    fn default() -> Self {
        WickPolynomial {
            terms: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> WickPolynomial<S> {
    /// The zero polynomial.
    pub fn zero() -> Self {
        WickPolynomial::default()
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        WickPolynomial::constant(S::one())
    }

    /// The constant polynomial c·1.
    pub fn constant(c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(MultiIndex::empty(), c);
        }
        WickPolynomial { terms }
    }

    /// A single scaled monomial c·:x_α:.
    pub fn monomial(alpha: MultiIndex, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        WickPolynomial { terms }
    }

    /// The coordinate monomial :x_k:.
    pub fn x(mode: u32) -> Self {
        WickPolynomial::monomial(MultiIndex::single(mode), S::one())
    }

    /// Build from (index, coefficient) pairs; repeats accumulate, zeros drop.
    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, S)>>(pairs: I) -> Self {
        let mut out = WickPolynomial::zero();
        for (alpha, c) in pairs {
            out.add_term(alpha, c);
        }
        out
    }

    /// Add c·:x_α: in place.
    pub fn add_term(&mut self, alpha: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(alpha.clone()).or_insert_with(S::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    /// Coefficient of :x_α: (zero when absent). This is the coefficient
    /// functional c_α(F) = ⟨:x_α:, F⟩·2^{|α|}/α!.
    pub fn coefficient(&self, alpha: &MultiIndex) -> S {
        self.terms.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    /// Iterate (index, coefficient) pairs in the stable index order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &S)> + '_ {
        self.terms.iter()
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Whether the polynomial is identically zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree among terms (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// All modes appearing in any term.
    pub fn support_modes(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for alpha in self.terms.keys() {
            out.extend(alpha.modes());
        }
        out
    }

    /// The homogeneous part of total degree n.
    pub fn homogeneous_part(&self, n: u32) -> Self {
        WickPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(alpha, _)| alpha.degree() == n)
                .map(|(alpha, c)| (alpha.clone(), c.clone()))
                .collect(),
        }
    }

    /// Scale every coefficient.
    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return WickPolynomial::zero();
        }
        WickPolynomial::from_terms(
            self.terms
                .iter()
                .map(|(alpha, c)| (alpha.clone(), c.clone() * s.clone())),
        )
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj(&self) -> Self {
        WickPolynomial::from_terms(
            self.terms
                .iter()
                .map(|(alpha, c)| (alpha.clone(), c.conj())),
        )
    }

    /// Whether every coefficient is real-valued.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(Scalar::is_real_value)
    }

    /// ⟨F, G⟩ = Σ_α conj(c_α(F))·c_α(G)·α!/2^{|α|}, conjugate-linear in the
    /// first argument.
    pub fn inner_product(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (alpha, c) in &self.terms {
            if let Some(d) = other.terms.get(alpha) {
                acc += c.conj() * d.clone() * S::from_rational(monomial_norm_sq(alpha));
            }
        }
        acc
    }

    /// ‖F‖² = ⟨F, F⟩.
    pub fn norm_squared(&self) -> S {
        self.inner_product(self)
    }

    /// ∂_k F: Wick monomials differentiate like plain monomials,
    /// ∂_k :x_α: = α_k·:x_{α−e_k}:.
    pub fn partial_derivative(&self, mode: u32) -> Self {
        let mut out = WickPolynomial::zero();
        for (alpha, c) in &self.terms {
            let m = alpha.mult(mode);
            if m == 0 {
                continue;
            }
            let lowered = alpha.lowered(mode).expect("multiplicity checked above");
            out.add_term(lowered, c.clone() * S::from_ratio(i128::from(m), 1));
        }
        out
    }

    /// Directional derivative Σ_k g_k·∂_k F along a real direction g.
    pub fn directional_derivative(&self, g: &DirectionVector<S>) -> Self {
        let mut out = WickPolynomial::zero();
        for (mode, gk) in g.iter() {
            out = &out + &self.partial_derivative(mode).scale(gk);
        }
        out
    }

    /// Multiset raise: Σ c_α :x_α: ↦ Σ c_α :x_{α+e_k}:.
    pub fn raise(&self, mode: u32) -> Self {
        WickPolynomial::from_terms(
            self.terms
                .iter()
                .map(|(alpha, c)| (alpha.raised(mode), c.clone())),
        )
    }

    /// The Wick (pointwise) product F·G re-expanded in Wick monomials.
    ///
    /// Per mode, :x^m:·:x^n: = Σ_j j!·C(m,j)·C(n,j)·(1/2)^j·:x^{m+n−2j}:,
    /// the sum running over contraction counts j ≤ min(m,n); the
    /// multi-mode product factorizes. Errors with
    /// [`Error::DegreeCapExceeded`] when any contributing pair of terms has
    /// combined degree above `cap`, before expansion.
    pub fn wick_product(&self, other: &Self, cap: u32) -> Result<Self> {
        let mut out = WickPolynomial::zero();
        for (alpha, ca) in &self.terms {
            for (beta, cb) in &other.terms {
                let combined = alpha.degree() + beta.degree();
                if combined > cap {
                    return Err(Error::DegreeCapExceeded {
                        needed: combined,
                        cap,
                    });
                }
                let scale = ca.clone() * cb.clone();
                for (gamma, w) in monomial_product(alpha, beta) {
                    out.add_term(gamma, scale.clone() * S::from_rational(w));
                }
            }
        }
        Ok(out)
    }

    /// Evaluate at a point (modes absent from `point` read as 0), as a
    /// genuine function of x via the one-dimensional Wick values.
    pub fn eval_c64(&self, point: &BTreeMap<u32, f64>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut factor = 1.0;
            for (mode, mult) in alpha.iter() {
                let x = point.get(&mode).copied().unwrap_or(0.0);
                factor *= wick_value_1d(mult, x);
            }
            acc += c.to_c64() * factor;
        }
        acc
    }

    /// Convert coefficients to another backend.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> WickPolynomial<T> {
        WickPolynomial::from_terms(self.terms.iter().map(|(alpha, c)| (alpha.clone(), f(c))))
    }

    /// View with `Complex64` coefficients.
    pub fn to_c64_poly(&self) -> WickPolynomial<Complex64> {
        self.map_scalars(Scalar::to_c64)
    }
}

/// Expansion of :x_α:·:x_β: as exact (index, rational weight) pairs.
fn monomial_product(alpha: &MultiIndex, beta: &MultiIndex) -> Vec<(MultiIndex, Rational)> {
    let mut acc: Vec<(MultiIndex, Rational)> =
        vec![(MultiIndex::empty(), Rational::from_integer(1))];
    let modes: BTreeSet<u32> = alpha.modes().chain(beta.modes()).collect();
    for mode in modes {
        let m = alpha.mult(mode);
        let n = beta.mult(mode);
        // Per-mode expansion: contraction count j contributes weight
        // j!·C(m,j)·C(n,j)/2^j at power m+n−2j, built incrementally as
        // w_j = w_{j−1}·(m−j+1)(n−j+1)/(2j) to stay in small integers.
        let mut mode_terms: Vec<(u32, Rational)> = Vec::with_capacity((m.min(n) + 1) as usize);
        let mut w = Rational::from_integer(1);
        mode_terms.push((m + n, w));
        for j in 1..=m.min(n) {
            w *= Rational::new(
                i128::from(m - j + 1) * i128::from(n - j + 1),
                2 * i128::from(j),
            );
            mode_terms.push((m + n - 2 * j, w));
        }
        let mut next = Vec::with_capacity(acc.len() * mode_terms.len());
        for (idx, weight) in &acc {
            for (power, mode_w) in &mode_terms {
                let mut new_idx = idx.clone();
                if *power > 0 {
                    new_idx = MultiIndex::from_pairs(
                        new_idx.iter().chain(std::iter::once((mode, *power))),
                    );
                }
                next.push((new_idx, *weight * *mode_w));
            }
        }
        acc = next;
    }
    acc
}

impl<S: Scalar> Add for &WickPolynomial<S> {
    type Output = WickPolynomial<S>;
    fn add(self, rhs: &WickPolynomial<S>) -> WickPolynomial<S> {
        let mut out = self.clone();
        for (alpha, c) in &rhs.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &WickPolynomial<S> {
    type Output = WickPolynomial<S>;
    fn sub(self, rhs: &WickPolynomial<S>) -> WickPolynomial<S> {
        let mut out = self.clone();
        for (alpha, c) in &rhs.terms {
            out.add_term(alpha.clone(), -c.clone());
        }
        out
    }
}

impl<S: Scalar> Neg for &WickPolynomial<S> {
    type Output = WickPolynomial<S>;
    fn neg(self) -> WickPolynomial<S> {
        WickPolynomial::from_terms(
            self.terms
                .iter()
                .map(|(alpha, c)| (alpha.clone(), -c.clone())),
        )
    }
}

impl<S: Scalar> fmt::Debug for WickPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WickPolynomial({self})")
    }
}

impl<S: Scalar> fmt::Display for WickPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (alpha, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if alpha.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})·{alpha}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use num_rational::Ratio;
    use proptest::prelude::*;

    type P = WickPolynomial<Exact>;

    fn q(n: i128, d: i128) -> Rational {
        Ratio::new(n, d)
    }

    fn ex(n: i128, d: i128) -> Exact {
        Exact::from_rational(q(n, d))
    }

    #[test]
    fn monomial_inner_products_match_gaussian_moments() {
        let x1 = MultiIndex::single(1);
        let x1x1 = MultiIndex::from_modes([1, 1]);
        let x1x2 = MultiIndex::from_modes([1, 2]);
        assert_eq!(monomial_inner_product(&x1, &x1), q(1, 2));
        assert_eq!(monomial_inner_product(&x1x1, &x1x1), q(1, 2));
        assert_eq!(monomial_inner_product(&x1x2, &x1x2), q(1, 4));
        assert_eq!(monomial_inner_product(&x1, &x1x1), q(0, 1));
        // ‖:x₁²x₂:‖² = 2!·1!/2³ = 1/4.
        let a = MultiIndex::from_modes([1, 1, 2]);
        assert_eq!(monomial_norm_sq(&a), q(1, 4));
        // ‖:x^n:‖² = n!/2^n, single mode, a few n.
        for n in 0..8u32 {
            let alpha = MultiIndex::from_pairs([(1, n)]);
            assert_eq!(
                monomial_norm_sq(&alpha),
                alpha.factorial() / q(1i128 << n, 1)
            );
        }
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_slot() {
        use crate::scalar::ExactC;
        let i = <ExactC as Scalar>::imag_unit().unwrap();
        let f = WickPolynomial::<ExactC>::x(1).scale(&i);
        let g = WickPolynomial::<ExactC>::x(1);
        // ⟨i·x₁, x₁⟩ = conj(i)·(1/2) = −i/2.
        assert_eq!(f.inner_product(&g), -i * ExactC::from_ratio(1, 2));
        // ⟨x₁, i·x₁⟩ = +i/2.
        assert_eq!(g.inner_product(&f), i * ExactC::from_ratio(1, 2));
    }

    #[test]
    fn scaled_inner_product_and_norm() {
        let f = P::monomial(MultiIndex::from_modes([1, 1]), ex(2, 1));
        let g = P::monomial(MultiIndex::from_modes([1, 1]), ex(3, 1));
        assert_eq!(f.inner_product(&g), ex(3, 1));
        assert_eq!(
            P::monomial(MultiIndex::from_modes([1, 1, 2]), Exact::from_integer(1)).norm_squared(),
            ex(1, 4)
        );
    }

    #[test]
    fn wick_products_reproduce_single_mode_tables() {
        let cap = 12;
        let x = P::x(1);
        // :x₁:·:x₁: = :x₁²: + 1/2.
        let sq = x.wick_product(&x, cap).unwrap();
        let mut expected = P::monomial(MultiIndex::from_modes([1, 1]), Exact::from_integer(1));
        expected.add_term(MultiIndex::empty(), ex(1, 2));
        assert_eq!(sq, expected);
        // :x₁²:·:x₁: = :x₁³: + :x₁:.
        let x2 = P::monomial(MultiIndex::from_modes([1, 1]), Exact::from_integer(1));
        let cube = x2.wick_product(&x, cap).unwrap();
        let mut expected = P::monomial(MultiIndex::from_modes([1, 1, 1]), Exact::from_integer(1));
        expected.add_term(MultiIndex::single(1), Exact::from_integer(1));
        assert_eq!(cube, expected);
        // Cross-mode monomials multiply freely: :x₁:·:x₂: = :x₁x₂:.
        let xy = P::x(1).wick_product(&P::x(2), cap).unwrap();
        assert_eq!(
            xy,
            P::monomial(MultiIndex::from_modes([1, 2]), Exact::from_integer(1))
        );
        // :x₁²:·:x₁²: = :x₁⁴: + 2:x₁²: + 1/2.
        let quartic = x2.wick_product(&x2, cap).unwrap();
        let mut expected = P::monomial(MultiIndex::from_pairs([(1, 4)]), Exact::from_integer(1));
        expected.add_term(MultiIndex::from_modes([1, 1]), Exact::from_integer(2));
        expected.add_term(MultiIndex::empty(), ex(1, 2));
        assert_eq!(quartic, expected);
    }

    #[test]
    fn degree_cap_rejects_before_expanding() {
        let x2 = P::monomial(MultiIndex::from_pairs([(1, 2)]), Exact::from_integer(1));
        let x3 = P::monomial(MultiIndex::from_pairs([(1, 3)]), Exact::from_integer(1));
        match x2.wick_product(&x3, 4) {
            Err(Error::DegreeCapExceeded { needed: 5, cap: 4 }) => {}
            other => panic!("expected degree-cap error, got {other:?}"),
        }
        assert!(x2.wick_product(&x3, 5).is_ok());
    }

    #[test]
    fn derivatives_act_like_plain_monomial_calculus() {
        let x2 = P::monomial(MultiIndex::from_modes([1, 1]), Exact::from_integer(1));
        assert_eq!(x2.partial_derivative(1), P::x(1).scale(&ex(2, 1)));
        let xy = P::monomial(MultiIndex::from_modes([1, 2]), Exact::from_integer(1));
        assert_eq!(xy.partial_derivative(1), P::x(2));
        assert_eq!(xy.partial_derivative(3), P::zero());
        // Directional derivative along g = 2e₁ − e₂ of :x₁x₂:.
        let g = DirectionVector::from_pairs([(1, ex(2, 1)), (2, ex(-1, 1))]);
        let expected = &P::x(2).scale(&ex(2, 1)) - &P::x(1);
        assert_eq!(xy.directional_derivative(&g), expected);
    }

    #[test]
    fn constant_term_of_product_recovers_bilinear_pairing() {
        // ⟨1, F·G⟩ = Σ_α c_α(F)c_α(G)·α!/2^{|α|} for real F, G: full
        // contraction is the only route to degree zero.
        let f = P::from_terms([
            (MultiIndex::single(1), ex(1, 2)),
            (MultiIndex::from_modes([1, 2]), ex(3, 1)),
            (MultiIndex::empty(), ex(-1, 1)),
        ]);
        let g = P::from_terms([
            (MultiIndex::single(1), ex(4, 1)),
            (MultiIndex::from_modes([1, 2]), ex(1, 3)),
            (MultiIndex::from_modes([2, 2]), ex(5, 1)),
        ]);
        let product = f.wick_product(&g, 12).unwrap();
        let constant = product.coefficient(&MultiIndex::empty());
        assert_eq!(constant, f.inner_product(&g));
        assert_eq!(
            constant,
            ex(1, 2) * ex(4, 1) * ex(1, 2) + ex(3, 1) * ex(1, 3) * ex(1, 4)
        );
    }

    #[test]
    fn evaluation_matches_wick_recurrence() {
        // :x²:(x) = x² − 1/2 and :x³:(x) = x³ − (3/2)x.
        assert!((wick_value_1d(2, 1.25) - (1.25f64 * 1.25 - 0.5)).abs() < 1e-15);
        assert!((wick_value_1d(3, 0.75) - (0.75f64.powi(3) - 1.5 * 0.75)).abs() < 1e-15);
        let f = P::from_terms([
            (MultiIndex::from_modes([1, 1]), Exact::from_integer(1)),
            (MultiIndex::single(2), ex(2, 1)),
        ]);
        let point: BTreeMap<u32, f64> = [(1, 0.5), (2, -1.0)].into_iter().collect();
        let v = f.eval_c64(&point);
        assert!((v.re - ((0.25 - 0.5) + -2.0)).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    fn arb_poly() -> impl Strategy<Value = P> {
        // Small random polynomials: up to 4 terms, modes ≤ 3, degree ≤ 3.
        proptest::collection::vec(
            (
                proptest::collection::vec(1u32..=3, 0..=3),
                -4i128..=4,
                1i128..=3,
            ),
            0..=4,
        )
        .prop_map(|terms| {
            P::from_terms(
                terms
                    .into_iter()
                    .map(|(modes, n, d)| (MultiIndex::from_modes(modes), ex(n, d))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_is_commutative(f in arb_poly(), g in arb_poly()) {
            prop_assert_eq!(
                f.wick_product(&g, 16).unwrap(),
                g.wick_product(&f, 16).unwrap()
            );
        }

        #[test]
        fn product_is_associative(f in arb_poly(), g in arb_poly(), h in arb_poly()) {
            let left = f.wick_product(&g, 16).unwrap().wick_product(&h, 16).unwrap();
            let right = f.wick_product(&g.wick_product(&h, 16).unwrap(), 16).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn product_distributes_over_sums(f in arb_poly(), g in arb_poly(), h in arb_poly()) {
            let lhs = f.wick_product(&(&g + &h), 16).unwrap();
            let rhs = &f.wick_product(&g, 16).unwrap() + &f.wick_product(&h, 16).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn derivative_satisfies_leibniz(f in arb_poly(), g in arb_poly()) {
            // ∂₁(FG) = (∂₁F)G + F(∂₁G): multiplication is genuine pointwise
            // multiplication, so the product rule holds term-exactly.
            let prod = f.wick_product(&g, 16).unwrap();
            let lhs = prod.partial_derivative(1);
            let rhs = &f.partial_derivative(1).wick_product(&g, 16).unwrap()
                + &f.wick_product(&g.partial_derivative(1), 16).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn norms_are_nonnegative_and_faithful(f in arb_poly()) {
            let n = f.norm_squared();
            prop_assert!(n.signum() >= 0);
            prop_assert_eq!(n.is_zero(), f.is_zero());
        }
    }
}
