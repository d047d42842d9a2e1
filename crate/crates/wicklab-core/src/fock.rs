//! One-particle vectors, ladder operators, and free fields on Q-space.
//!
//! The one-particle space is treated as a real space V ⊕ JV: a vector is
//! f = g + Jh with real, finitely supported g and h. The complex structure
//! J acts by (g, h) ↦ (−h, g), the real inner product is
//! s(f, f′) = ⟨g, g′⟩ + ⟨h, h′⟩, and the symplectic form is normalized so
//! that σ(e_k, Je_l) = δ_{kl}.
//!
//! On Q-space the ladder operators act by
//! a(e_k) = 2^{−1/2}·∂_k (antilinear in its argument, a(Jf) = −i·a(f)) and
//! a*(e_k) = 2^{1/2}·(multiset raise) (linear). The field
//! Φ(f) = 2^{−1/2}(a(f) + a*(f)) then satisfies the canonical commutation
//! relation [Φ(f), Φ(g)] = i·σ(f, g)·𝟙 on polynomials.
//!
//! The occupation dictionary maps the Fock basis vector with occupation α
//! (the symmetrized product of basis modes, degree r = |α|) to
//! (r!)^{−1/2}·2^{r/2}·:x_α:. The scale factor √(2^r/r!) leaves ℚ(√2)
//! for r ≥ 3, which the exact backends report as an error rather than
//! approximating.

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::scalar::Scalar;
use crate::wick::{DirectionVector, WickPolynomial};

/// A one-particle vector f = g + Jh with real parts g (the `v` component)
/// and h (the `jv` component).
#[derive(Clone, PartialEq, Debug)]
pub struct HVector<S: Scalar> {
    /// Real part along V: the coefficients of e_k.
    pub v_part: DirectionVector<S>,
    /// Real part along JV: the coefficients of Je_k.
    pub jv_part: DirectionVector<S>,
}

impl<S: Scalar> Default for HVector<S> {
    fn default() -> Self {
        HVector {
            v_part: DirectionVector::default(),
            jv_part: DirectionVector::default(),
        }
    }
}

impl<S: Scalar> HVector<S> {
    /// The zero vector.
    pub fn zero() -> Self {
        HVector::default()
    }

    /// Assemble from the two real components of f = g + Jh.
    pub fn from_parts(v_part: DirectionVector<S>, jv_part: DirectionVector<S>) -> Self {
        HVector { v_part, jv_part }
    }

    /// Basis vector e_k.
    pub fn e(mode: u32) -> Self {
        HVector {
            v_part: DirectionVector::e(mode),
            jv_part: DirectionVector::zero(),
        }
    }

    /// Basis vector Je_k.
    pub fn je(mode: u32) -> Self {
        HVector {
            v_part: DirectionVector::zero(),
            jv_part: DirectionVector::e(mode),
        }
    }

    /// J·f: (g, h) ↦ (−h, g).
    pub fn apply_j(&self) -> Self {
        HVector {
            v_part: self.jv_part.scale(&-S::one()),
            jv_part: self.v_part.clone(),
        }
    }

    /// Scale both components by a real scalar.
    pub fn scale(&self, s: &S) -> Self {
        HVector {
            v_part: self.v_part.scale(s),
            jv_part: self.jv_part.scale(s),
        }
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Self) -> Self {
        HVector {
            v_part: self.v_part.add(&other.v_part),
            jv_part: self.jv_part.add(&other.jv_part),
        }
    }

    /// Whether both components vanish.
    pub fn is_zero(&self) -> bool {
        self.v_part.is_zero() && self.jv_part.is_zero()
    }

    /// Real inner product s(f, f′) = ⟨g, g′⟩ + ⟨h, h′⟩.
    pub fn s_form(&self, other: &Self) -> S {
        self.v_part.dot(&other.v_part) + self.jv_part.dot(&other.jv_part)
    }

    /// Symplectic form σ(f, f′) = ⟨g, h′⟩ − ⟨h, g′⟩, normalized so that
    /// σ(e_k, Je_l) = δ_{kl}; satisfies s(f, f′) = −σ(Jf, f′).
    pub fn sigma_form(&self, other: &Self) -> S {
        self.v_part.dot(&other.jv_part) - self.jv_part.dot(&other.v_part)
    }

    /// ‖f‖² = s(f, f).
    pub fn norm_sq(&self) -> S {
        self.s_form(self)
    }

    /// View with `Complex64` coefficients (used at the truncation boundary).
    pub fn map_to_c64(&self) -> HVector<num_complex::Complex64> {
        HVector::from_parts(
            self.v_part.map_scalars(Scalar::to_c64),
            self.jv_part.map_scalars(Scalar::to_c64),
        )
    }

    /// The complex-linear coordinate polynomial x(f) = x(g) + i·x(h).
    /// Needs the imaginary unit when the Jh component is present.
    pub fn x_polynomial(&self) -> Result<WickPolynomial<S>> {
        let mut out = self.v_part.wick_linear();
        if !self.jv_part.is_zero() {
            let i = S::imag_unit().ok_or_else(|| Error::NoImaginaryUnit {
                backend: S::backend_name(),
            })?;
            out = &out + &self.jv_part.wick_linear().scale(&i);
        }
        Ok(out)
    }
}

/// Annihilation a(f)F for f = g + Jh: antilinear in f,
/// a(f) = 2^{−1/2}(∂_g − i·∂_h).
pub fn annihilate<S: Scalar>(
    f: &HVector<S>,
    poly: &WickPolynomial<S>,
) -> Result<WickPolynomial<S>> {
    let inv_sqrt2 = S::sqrt2() * S::from_ratio(1, 2); // 1/√2 = √2/2
    let mut out = poly.directional_derivative(&f.v_part).scale(&inv_sqrt2);
    if !f.jv_part.is_zero() {
        let i = S::imag_unit().ok_or_else(|| Error::NoImaginaryUnit {
            backend: S::backend_name(),
        })?;
        out = &out
            - &poly
                .directional_derivative(&f.jv_part)
                .scale(&(i * inv_sqrt2));
    }
    Ok(out)
}

/// Creation a*(f)F: linear in f, a*(f) = 2^{1/2}·(raise_g + i·raise_h)
/// where raise_g F = Σ_k g_k·(F with mode k raised).
pub fn create<S: Scalar>(f: &HVector<S>, poly: &WickPolynomial<S>) -> Result<WickPolynomial<S>> {
    let sqrt2 = S::sqrt2();
    let mut out = raise_along(&f.v_part, poly).scale(&sqrt2);
    if !f.jv_part.is_zero() {
        let i = S::imag_unit().ok_or_else(|| Error::NoImaginaryUnit {
            backend: S::backend_name(),
        })?;
        out = &out + &raise_along(&f.jv_part, poly).scale(&(i * sqrt2));
    }
    Ok(out)
}

fn raise_along<S: Scalar>(g: &DirectionVector<S>, poly: &WickPolynomial<S>) -> WickPolynomial<S> {
    let mut out = WickPolynomial::zero();
    for (mode, c) in g.iter() {
        out = &out + &poly.raise(mode).scale(c);
    }
    out
}

/// The field Φ(f)F = x(g)·F + Σ_k h_k·((1/i)·∂_kF + i·x_k·F) for
/// f = g + Jh: multiplication along V, the momentum combination along JV.
/// Real-linear in f; equals 2^{−1/2}(a(f) + a*(f)). The multiplications go
/// through [`WickPolynomial::wick_product`] and respect `cap`.
pub fn field_apply<S: Scalar>(
    f: &HVector<S>,
    poly: &WickPolynomial<S>,
    cap: u32,
) -> Result<WickPolynomial<S>> {
    let mut out = f.v_part.wick_linear().wick_product(poly, cap)?;
    if !f.jv_part.is_zero() {
        let i = S::imag_unit().ok_or_else(|| Error::NoImaginaryUnit {
            backend: S::backend_name(),
        })?;
        let momentum = &f.jv_part.wick_linear().wick_product(poly, cap)?.scale(&i)
            - &poly.directional_derivative(&f.jv_part).scale(&i);
        out = &out + &momentum;
    }
    Ok(out)
}

/// The number operator N = Σ_k a*(e_k)a(e_k): scales each homogeneous
/// term by its total degree.
pub fn number_apply<S: Scalar>(poly: &WickPolynomial<S>) -> WickPolynomial<S> {
    WickPolynomial::from_terms(poly.iter().map(|(alpha, c)| {
        (
            alpha.clone(),
            c.clone() * S::from_ratio(i128::from(alpha.degree()), 1),
        )
    }))
}

/// Projection onto the degree-n homogeneous component.
pub fn project_degree<S: Scalar>(poly: &WickPolynomial<S>, n: u32) -> WickPolynomial<S> {
    poly.homogeneous_part(n)
}

/// The occupation scale √(2^r/r!) for degree r, when the backend can
/// represent it.
fn occupation_scale<S: Scalar>(r: u32) -> Result<S> {
    let num: u128 = 1u128 << r;
    let den: u128 = {
        let f = crate::scalar::factorial(r);
        *f.numer() as u128
    };
    S::sqrt_ratio(num, den).ok_or(Error::ScaleNotRepresentable {
        num,
        den,
        backend: S::backend_name(),
    })
}

/// Image of the Fock occupation basis vector |α⟩:
/// (r!)^{−1/2}·2^{r/2}·:x_α: with r = |α|.
pub fn fock_basis_to_qspace<S: Scalar>(alpha: &MultiIndex) -> Result<WickPolynomial<S>> {
    let scale: S = occupation_scale(alpha.degree())?;
    Ok(WickPolynomial::monomial(alpha.clone(), scale))
}

/// Apply the occupation dictionary to a vector given by coefficients in
/// the occupation basis: Σ_α d_α|α⟩ ↦ Σ_α d_α·√(2^{|α|}/|α|!)·:x_α:.
pub fn fock_to_qspace<S: Scalar>(fock: &WickPolynomial<S>) -> Result<WickPolynomial<S>> {
    let mut out = WickPolynomial::zero();
    for (alpha, d) in fock.iter() {
        let scale: S = occupation_scale(alpha.degree())?;
        out.add_term(alpha.clone(), d.clone() * scale);
    }
    Ok(out)
}

/// Inverse of [`fock_to_qspace`]: divide each coefficient by the same
/// stored scale factor.
pub fn qspace_to_fock<S: Scalar>(poly: &WickPolynomial<S>) -> Result<WickPolynomial<S>> {
    let mut out = WickPolynomial::zero();
    for (alpha, c) in poly.iter() {
        let scale: S = occupation_scale(alpha.degree())?;
        out.add_term(alpha.clone(), c.clone() / scale);
    }
    Ok(out)
}

/// The unit vector :x_α:/‖:x_α:‖, when 2^{|α|}/α! has a representable
/// square root in the backend.
pub fn normalized_basis<S: Scalar>(alpha: &MultiIndex) -> Result<WickPolynomial<S>> {
    let num: u128 = 1u128 << alpha.degree();
    let den: u128 = *alpha.factorial().numer() as u128;
    let scale = S::sqrt_ratio(num, den).ok_or(Error::ScaleNotRepresentable {
        num,
        den,
        backend: S::backend_name(),
    })?;
    Ok(WickPolynomial::monomial(alpha.clone(), scale))
}
