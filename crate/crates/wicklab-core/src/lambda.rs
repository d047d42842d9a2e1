//! Transformation maps Λ and the admissibility calculus.
//!
//! A map Λ sends the one-particle basis into polynomials: Λe_k is a real
//! constant (the position-shift component) and ΛJe_k is a polynomial with
//! real coefficients. The perturbed field is
//! Φ_Λ(f) = Φ(f) + multiplication by Λf.
//!
//! Φ_Λ satisfies the canonical commutation relations iff, per degree
//! m ≥ 1, the coefficients of the ΛJe_k assemble into a totally symmetric
//! tensor: with λ_{k,α} = (2^m/m!)·⟨ΛJe_k, :x_α:⟩ = c_α(ΛJe_k)·α!/m!,
//! the order-(m+1) array indexed by (k, α) must be symmetric under swapping
//! the head k into the body α. Because the body is already a multiset, the
//! head-swap equalities
//!
//!   ⟨ΛJe_k, :x_α:⟩ = ⟨ΛJe_j, :x_β:⟩ for β = α − e_j + e_k, j ∈ α,
//!
//! generate full symmetry; they are also equivalent, degree by degree, to
//! the curl condition ∂_j P_n(ΛJe_k) = ∂_k P_n(ΛJe_j). All three views are
//! implemented and cross-checked.

use crate::error::{Error, Result};
use crate::fock::{field_apply, project_degree, HVector};
use crate::index::MultiIndex;
use crate::scalar::{display_compact, factorial, Scalar};
use crate::wick::WickPolynomial;
use std::collections::{BTreeMap, BTreeSet};

/// A transformation map: mode → constant for Λe_k, mode → polynomial for
/// ΛJe_k. Absent modes map to zero.
#[derive(Clone, PartialEq, Debug)]
pub struct LambdaMap<S: Scalar> {
    v_images: BTreeMap<u32, S>,
    jv_images: BTreeMap<u32, WickPolynomial<S>>,
}

impl<S: Scalar> Default for LambdaMap<S> {
    fn default() -> Self {
        LambdaMap {
            v_images: BTreeMap::new(),
            jv_images: BTreeMap::new(),
        }
    }
}

/// Outcome of an admissibility check: valid, or a witness describing the
/// first violated symmetry in deterministic order.
#[derive(Clone, PartialEq, Debug)]
pub struct CcrCheck {
    /// Whether the map satisfies the CCR admissibility conditions.
    pub valid: bool,
    /// Human-readable first violation, when invalid.
    pub witness: Option<String>,
}

impl CcrCheck {
    fn valid() -> Self {
        CcrCheck {
            valid: true,
            witness: None,
        }
    }

    fn invalid(witness: String) -> Self {
        CcrCheck {
            valid: false,
            witness: Some(witness),
        }
    }
}

/// A symmetric tensor of the given order, stored by multiset: the entry at
/// multi-index β (with |β| = order) is the common value of all arrangements.
#[derive(Clone, PartialEq, Debug)]
pub struct SymmetricTensorView<S: Scalar> {
    /// Tensor order (number of slots).
    pub order: u32,
    /// Nonzero entries keyed by multisets of size `order`.
    pub entries: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> SymmetricTensorView<S> {
    /// Build from (multiset, value) pairs, dropping zeros; every key must
    /// have degree equal to `order`.
    pub fn new<I: IntoIterator<Item = (MultiIndex, S)>>(order: u32, entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (beta, value) in entries {
            if beta.degree() != order {
                return Err(Error::Model(format!(
                    "tensor of order {order} given an entry of size {}",
                    beta.degree()
                )));
            }
            if !value.is_zero() {
                map.insert(beta, value);
            }
        }
        Ok(SymmetricTensorView {
            order,
            entries: map,
        })
    }

    /// Entry at a multiset (zero when absent).
    pub fn entry(&self, beta: &MultiIndex) -> S {
        self.entries.get(beta).cloned().unwrap_or_else(S::zero)
    }
}

/// The outcome of [`standard_form`]: the map reorganized as coherent
/// constants plus one symmetric tensor per polynomial degree.
#[derive(Clone, PartialEq, Debug)]
pub struct StandardForm<S: Scalar> {
    /// Which one-particle basis the presentation is expressed in.
    pub basis_note: String,
    /// Constants Λe_k (position-shift component).
    pub v_constants: BTreeMap<u32, S>,
    /// Constant parts of ΛJe_k (coherent component).
    pub jv_constants: BTreeMap<u32, S>,
    /// One symmetric tensor of order m+1 per polynomial degree m ≥ 1,
    /// ascending in m; zero layers are included as empty tensors.
    pub tensors: Vec<SymmetricTensorView<S>>,
}

/// The three mutually orthogonal layers of a map: constants, linear parts,
/// and everything of degree ≥ 2.
#[derive(Clone, PartialEq, Debug)]
pub struct DecomposedParts<S: Scalar> {
    /// Constants: all of Λe_k plus the degree-0 parts of ΛJe_k.
    pub coherent: LambdaMap<S>,
    /// Degree-1 parts of ΛJe_k only.
    pub linear: LambdaMap<S>,
    /// Degree-≥2 parts of ΛJe_k only.
    pub higher: LambdaMap<S>,
}

/// One row of a band profile: the total weight of the degree-`m` output
/// block over all degree-`input_degree` basis inputs.
#[derive(Clone, PartialEq, Debug)]
pub struct BandRow<S: Scalar> {
    /// Input homogeneous degree k.
    pub input_degree: u32,
    /// Σ_α ‖P_m Φ_Λ(f) :x_α:‖² over the degree-k basis; exactly zero iff
    /// the block vanishes.
    pub block_weight: S,
}

impl<S: Scalar> LambdaMap<S> {
    /// The zero map.
    pub fn zero() -> Self {
        LambdaMap::default()
    }

    /// Set Λe_k to a constant.
    pub fn set_v(&mut self, mode: u32, value: S) {
        if value.is_zero() {
            self.v_images.remove(&mode);
        } else {
            self.v_images.insert(mode, value);
        }
    }

    /// Set ΛJe_k to a polynomial.
    pub fn set_jv(&mut self, mode: u32, poly: WickPolynomial<S>) {
        if poly.is_zero() {
            self.jv_images.remove(&mode);
        } else {
            self.jv_images.insert(mode, poly);
        }
    }

    /// The constant Λe_k.
    pub fn v_image(&self, mode: u32) -> S {
        self.v_images.get(&mode).cloned().unwrap_or_else(S::zero)
    }

    /// The polynomial ΛJe_k.
    pub fn jv_image(&self, mode: u32) -> WickPolynomial<S> {
        self.jv_images
            .get(&mode)
            .cloned()
            .unwrap_or_else(WickPolynomial::zero)
    }

    /// Modes with a nonzero Λe_k.
    pub fn v_modes(&self) -> impl Iterator<Item = u32> + '_ {
        self.v_images.keys().copied()
    }

    /// Modes with a nonzero ΛJe_k.
    pub fn jv_modes(&self) -> impl Iterator<Item = u32> + '_ {
        self.jv_images.keys().copied()
    }

    /// Whether the map is identically zero.
    pub fn is_zero(&self) -> bool {
        self.v_images.is_empty() && self.jv_images.is_empty()
    }

    /// Largest polynomial degree among the ΛJe_k (0 for the zero map).
    pub fn degree(&self) -> u32 {
        self.jv_images
            .values()
            .map(WickPolynomial::degree)
            .max()
            .unwrap_or(0)
    }

    /// Every mode the map touches: keys on both sides plus all modes
    /// occurring inside the image polynomials.
    pub fn involved_modes(&self) -> BTreeSet<u32> {
        let mut out: BTreeSet<u32> = self.v_images.keys().copied().collect();
        out.extend(self.jv_images.keys().copied());
        for poly in self.jv_images.values() {
            out.extend(poly.support_modes());
        }
        out
    }

    /// Λf for f = Σ c_k·e_k + Σ d_k·Je_k: the real-linear combination
    /// Σ c_k·(Λe_k) + Σ d_k·(ΛJe_k) as a polynomial.
    pub fn image_of(&self, f: &HVector<S>) -> WickPolynomial<S> {
        let mut out = WickPolynomial::zero();
        for (mode, c) in f.v_part.iter() {
            out.add_term(MultiIndex::empty(), c.clone() * self.v_image(mode));
        }
        for (mode, d) in f.jv_part.iter() {
            out = &out + &self.jv_image(mode).scale(d);
        }
        out
    }

    /// Pointwise sum of maps.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&mode, c) in &other.v_images {
            out.set_v(mode, out.v_image(mode) + c.clone());
        }
        for (&mode, poly) in &other.jv_images {
            out.set_jv(mode, &out.jv_image(mode) + poly);
        }
        out
    }

    /// Convert coefficients to another backend.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> LambdaMap<T> {
        let mut out = LambdaMap::zero();
        for (&mode, c) in &self.v_images {
            out.set_v(mode, f(c));
        }
        for (&mode, poly) in &self.jv_images {
            out.set_jv(mode, poly.map_scalars(f));
        }
        out
    }
}

fn format_index_set(alpha: &MultiIndex) -> String {
    let modes: Vec<String> = alpha.to_mode_list().iter().map(u32::to_string).collect();
    format!("{{{}}}", modes.join(","))
}

/// ⟨ΛJe_k, :x_α:⟩ = c_α(ΛJe_k)·α!/2^{|α|} for a stored image.
fn pairing<S: Scalar>(image: &WickPolynomial<S>, alpha: &MultiIndex) -> S {
    image.coefficient(alpha) * S::from_rational(crate::wick::monomial_norm_sq(alpha))
}

/// Walk every head-swap constraint of the map in deterministic order,
/// reporting the first failure of `compare` as a witness.
fn head_swap_scan<S: Scalar>(
    lambda: &LambdaMap<S>,
    mut compare: impl FnMut(&S, &S) -> bool,
) -> Option<String> {
    for (&k, image) in &lambda.jv_images {
        for (alpha, _) in image.iter() {
            if alpha.degree() == 0 {
                continue; // constants carry no symmetry constraint
            }
            for j in alpha.modes() {
                if j == k {
                    continue;
                }
                let beta = alpha
                    .lowered(j)
                    .expect("j drawn from the support of α")
                    .raised(k);
                let lhs = pairing(image, alpha);
                let rhs = pairing(&lambda.jv_image(j), &beta);
                if !compare(&lhs, &rhs) {
                    return Some(format!(
                        "(k={k}, α={}): ⟨ΛJe{k}, {alpha}⟩ = {} ≠ {} = ⟨ΛJe{j}, {beta}⟩",
                        format_index_set(alpha),
                        display_compact(&lhs),
                        display_compact(&rhs)
                    ));
                }
            }
        }
    }
    None
}

/// Exact admissibility check: all coefficients real, all head-swap
/// symmetries holding with exact equality.
pub fn validate_ccr<S: Scalar>(lambda: &LambdaMap<S>) -> CcrCheck {
    for (&k, c) in &lambda.v_images {
        if !c.is_real_value() {
            return CcrCheck::invalid(format!("Λe{k} = {c} is not a real constant"));
        }
    }
    for (&k, image) in &lambda.jv_images {
        for (alpha, c) in image.iter() {
            if !c.is_real_value() {
                return CcrCheck::invalid(format!(
                    "ΛJe{k} has a non-real coefficient at {alpha}: {c}"
                ));
            }
        }
    }
    match head_swap_scan(lambda, |lhs, rhs| lhs == rhs) {
        None => CcrCheck::valid(),
        Some(witness) => CcrCheck::invalid(witness),
    }
}

/// Tolerant admissibility check for floating backends: reality and
/// head-swap equalities up to `tol` in absolute value.
pub fn validate_ccr_approx<S: Scalar>(lambda: &LambdaMap<S>, tol: f64) -> CcrCheck {
    for (&k, c) in &lambda.v_images {
        if c.to_c64().im.abs() > tol {
            return CcrCheck::invalid(format!("Λe{k} = {c} is not a real constant"));
        }
    }
    for (&k, image) in &lambda.jv_images {
        for (alpha, c) in image.iter() {
            if c.to_c64().im.abs() > tol {
                return CcrCheck::invalid(format!(
                    "ΛJe{k} has a non-real coefficient at {alpha}: {c}"
                ));
            }
        }
    }
    match head_swap_scan(lambda, |lhs, rhs| {
        (lhs.to_c64() - rhs.to_c64()).norm() <= tol
    }) {
        None => CcrCheck::valid(),
        Some(witness) => CcrCheck::invalid(witness),
    }
}

/// Curl condition on the degree-n layer:
/// ∂_j P_n(ΛJe_k) = ∂_k P_n(ΛJe_j) for all mode pairs. Equivalent to the
/// head-swap symmetry at degree n.
pub fn curl_check<S: Scalar>(lambda: &LambdaMap<S>, n: u32) -> bool {
    let modes: Vec<u32> = lambda.involved_modes().into_iter().collect();
    let layers: BTreeMap<u32, WickPolynomial<S>> = modes
        .iter()
        .map(|&k| (k, project_degree(&lambda.jv_image(k), n)))
        .collect();
    for (i, &k) in modes.iter().enumerate() {
        for &j in &modes[i + 1..] {
            let left = layers[&k].partial_derivative(j);
            let right = layers[&j].partial_derivative(k);
            if left != right {
                return false;
            }
        }
    }
    true
}

/// Curl condition on every layer up to the map's degree.
pub fn curl_check_all<S: Scalar>(lambda: &LambdaMap<S>) -> bool {
    (1..=lambda.degree()).all(|n| curl_check(lambda, n))
}

/// Assemble the order-(m+1) symmetric tensor of the degree-m layer:
/// entry at β = α + e_k is λ_{k,α} = c_α(ΛJe_k)·α!/m!. Requires the map
/// to pass [`validate_ccr`]; the witness is carried in the error.
pub fn assemble_tensor<S: Scalar>(lambda: &LambdaMap<S>, m: u32) -> Result<SymmetricTensorView<S>> {
    let check = validate_ccr(lambda);
    if !check.valid {
        return Err(Error::NotAdmissible {
            witness: check.witness.unwrap_or_default(),
        });
    }
    assert!(m >= 1, "tensor layers are defined for degree m ≥ 1");
    let m_fact = S::from_rational(factorial(m));
    let mut entries = BTreeMap::new();
    for (&k, image) in &lambda.jv_images {
        for (alpha, c) in project_degree(image, m).iter() {
            let beta = alpha.raised(k);
            let value = c.clone() * S::from_rational(alpha.factorial()) / m_fact.clone();
            // Well-defined by admissibility: every decomposition of β gives
            // the same value, so repeated insertions agree.
            entries.insert(beta, value);
        }
    }
    SymmetricTensorView::new(m + 1, entries)
}

/// Rebuild the polynomial layers from symmetric tensors: an order-(m+1)
/// tensor contributes c_α(ΛJe_k) = T_{α+e_k}·m!/α! for every mode k in the
/// multiset. The inverse of [`assemble_tensor`] layer by layer.
pub fn lambda_from_tensors<S: Scalar>(tensors: &[SymmetricTensorView<S>]) -> Result<LambdaMap<S>> {
    let mut lambda = LambdaMap::zero();
    for tensor in tensors {
        if tensor.order == 0 {
            return Err(Error::Model(
                "an order-0 tensor has no head slot to split off".into(),
            ));
        }
        let m = tensor.order - 1;
        let m_fact = S::from_rational(factorial(m));
        for (beta, value) in &tensor.entries {
            for k in beta.modes() {
                let alpha = beta.lowered(k).expect("k drawn from the support of β");
                let coeff = value.clone() * m_fact.clone() / S::from_rational(alpha.factorial());
                let mut image = lambda.jv_image(k);
                image.add_term(alpha, coeff);
                lambda.set_jv(k, image);
            }
        }
    }
    Ok(lambda)
}

/// Split a map into coherent (constant), linear, and higher layers; the
/// three sum back to the original and are mutually orthogonal degree by
/// degree.
pub fn decompose_parts<S: Scalar>(lambda: &LambdaMap<S>) -> DecomposedParts<S> {
    let mut coherent = LambdaMap::zero();
    let mut linear = LambdaMap::zero();
    let mut higher = LambdaMap::zero();
    for (&mode, c) in &lambda.v_images {
        coherent.set_v(mode, c.clone());
    }
    for (&mode, image) in &lambda.jv_images {
        coherent.set_jv(mode, project_degree(image, 0));
        linear.set_jv(mode, project_degree(image, 1));
        let mut rest = WickPolynomial::zero();
        for n in 2..=image.degree() {
            rest = &rest + &project_degree(image, n);
        }
        higher.set_jv(mode, rest);
    }
    DecomposedParts {
        coherent,
        linear,
        higher,
    }
}

/// Present an admissible map in standard form: coherent constants plus one
/// symmetric tensor per degree. No change of one-particle basis is
/// performed.
pub fn standard_form<S: Scalar>(lambda: &LambdaMap<S>) -> Result<StandardForm<S>> {
    let check = validate_ccr(lambda);
    if !check.valid {
        return Err(Error::NotAdmissible {
            witness: check.witness.unwrap_or_default(),
        });
    }
    let mut tensors = Vec::new();
    for m in 1..=lambda.degree() {
        tensors.push(assemble_tensor(lambda, m)?);
    }
    let jv_constants = lambda
        .jv_images
        .iter()
        .filter_map(|(&mode, image)| {
            let c = image.coefficient(&MultiIndex::empty());
            if c.is_zero() {
                None
            } else {
                Some((mode, c))
            }
        })
        .collect();
    Ok(StandardForm {
        basis_note: "identity basis retained".to_string(),
        v_constants: lambda.v_images.clone(),
        jv_constants,
        tensors,
    })
}

/// The perturbed field Φ_Λ(f)F = Φ(f)F + (Λf)·F.
pub fn transformed_field<S: Scalar>(
    lambda: &LambdaMap<S>,
    f: &HVector<S>,
    poly: &WickPolynomial<S>,
    cap: u32,
) -> Result<WickPolynomial<S>> {
    let free = field_apply(f, poly, cap)?;
    let shift = lambda.image_of(f).wick_product(poly, cap)?;
    Ok(&free + &shift)
}

/// All multi-indices of the given degree over the given modes.
fn enumerate_indices(modes: &[u32], degree: u32) -> Vec<MultiIndex> {
    fn recurse(
        modes: &[u32],
        remaining: u32,
        acc: &mut Vec<(u32, u32)>,
        out: &mut Vec<MultiIndex>,
    ) {
        match modes {
            [] => {
                if remaining == 0 {
                    out.push(MultiIndex::from_pairs(acc.iter().copied()));
                }
            }
            [first, rest @ ..] => {
                for take in (0..=remaining).rev() {
                    acc.push((*first, take));
                    recurse(rest, remaining - take, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    recurse(modes, degree, &mut Vec::new(), &mut out);
    out
}

/// Weight of each block P_m Φ_Λ(f) P_k for k = 0.. up to the largest input
/// degree the cap admits. The block at input degree k vanishes whenever
/// k > m + max(deg Λ, 1) + 1; the profile makes that visible.
pub fn band_profile<S: Scalar>(
    lambda: &LambdaMap<S>,
    f: &HVector<S>,
    m: u32,
    cap: u32,
) -> Result<Vec<BandRow<S>>> {
    let mut modes: BTreeSet<u32> = lambda.involved_modes();
    modes.extend(f.v_part.support());
    modes.extend(f.jv_part.support());
    let modes: Vec<u32> = modes.into_iter().collect();
    let n_eff = lambda.degree().max(1);
    if cap < n_eff {
        return Err(Error::DegreeCapExceeded { needed: n_eff, cap });
    }
    let max_k = cap - n_eff;
    let mut rows = Vec::with_capacity((max_k + 1) as usize);
    for k in 0..=max_k {
        let mut weight = S::zero();
        for alpha in enumerate_indices(&modes, k) {
            let basis = WickPolynomial::monomial(alpha, S::one());
            let image = transformed_field(lambda, f, &basis, cap)?;
            weight += project_degree(&image, m).norm_squared();
        }
        rows.push(BandRow {
            input_degree: k,
            block_weight: weight,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactC;
    use crate::wick::DirectionVector;

    type P = WickPolynomial<ExactC>;

    fn c_int(n: i128) -> ExactC {
        ExactC::from_ratio(n, 1)
    }

    fn i_unit() -> ExactC {
        <ExactC as Scalar>::imag_unit().unwrap()
    }

    /// The admissible quadratic map generated by the symmetric tensor with
    /// a single entry at the multiset {1,2,2}: ΛJe₁ = :x₂²:, ΛJe₂ = 2:x₁x₂:.
    fn closure_example() -> LambdaMap<ExactC> {
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::monomial(MultiIndex::from_modes([2, 2]), c_int(1)));
        lambda.set_jv(2, P::monomial(MultiIndex::from_modes([1, 2]), c_int(2)));
        lambda
    }

    /// The same map with the partner image dropped — the canonical
    /// inadmissible example.
    fn broken_example() -> LambdaMap<ExactC> {
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::monomial(MultiIndex::from_modes([2, 2]), c_int(1)));
        lambda
    }

    /// One-mode cubic layer: tensor entry {1,1,1} ↦ 1 gives ΛJe₁ = :x₁²:.
    fn cubic_example() -> LambdaMap<ExactC> {
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::monomial(MultiIndex::from_modes([1, 1]), c_int(1)));
        lambda
    }

    #[test]
    fn closure_pair_is_admissible_and_dropped_partner_is_not() {
        assert!(validate_ccr(&closure_example()).valid);
        let check = validate_ccr(&broken_example());
        assert!(!check.valid);
        let witness = check.witness.unwrap();
        // Witness pins the head, the index, and both pairing values.
        assert_eq!(
            witness,
            "(k=1, α={2,2}): ⟨ΛJe1, :x2^2:⟩ = 1/2 ≠ 0 = ⟨ΛJe2, :x1x2:⟩"
        );
    }

    #[test]
    fn reality_is_part_of_admissibility() {
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::monomial(MultiIndex::from_modes([1, 1]), i_unit()));
        let check = validate_ccr(&lambda);
        assert!(!check.valid);
        assert!(check.witness.unwrap().contains("non-real"));
        let mut lambda = LambdaMap::<ExactC>::zero();
        lambda.set_v(1, i_unit());
        assert!(!validate_ccr(&lambda).valid);
        // Constants and linear shifts on the jv side are fine.
        let mut lambda = LambdaMap::zero();
        lambda.set_v(1, c_int(3));
        lambda.set_jv(1, P::constant(c_int(-2)));
        assert!(validate_ccr(&lambda).valid);
    }

    #[test]
    fn linear_layer_requires_a_symmetric_matrix() {
        // ΛJe₁ = 2:x₂: without ΛJe₂ = 2:x₁: breaks head-swap at degree 1.
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::x(2).scale(&c_int(2)));
        assert!(!validate_ccr(&lambda).valid);
        lambda.set_jv(2, P::x(1).scale(&c_int(2)));
        assert!(validate_ccr(&lambda).valid);
    }

    #[test]
    fn curl_and_head_swap_agree_on_examples() {
        assert!(curl_check_all(&closure_example()));
        assert!(!curl_check_all(&broken_example()));
        assert!(curl_check(&closure_example(), 2));
        assert!(!curl_check(&broken_example(), 2));
        // The approx variant matches the exact one here.
        assert!(validate_ccr_approx(&closure_example(), 1e-12).valid);
        assert!(!validate_ccr_approx(&broken_example(), 1e-12).valid);
    }

    #[test]
    fn tensor_assembly_and_reconstruction_roundtrip() {
        let lambda = closure_example();
        let tensor = assemble_tensor(&lambda, 2).unwrap();
        assert_eq!(tensor.order, 3);
        assert_eq!(tensor.entries.len(), 1);
        assert_eq!(tensor.entry(&MultiIndex::from_modes([1, 2, 2])), c_int(1));
        let rebuilt = lambda_from_tensors(std::slice::from_ref(&tensor)).unwrap();
        assert_eq!(rebuilt, lambda);
        // The cubic example assembles to the {1,1,1} unit tensor.
        let tensor = assemble_tensor(&cubic_example(), 2).unwrap();
        assert_eq!(tensor.entry(&MultiIndex::from_pairs([(1, 3)])), c_int(1));
        // Assembly refuses inadmissible maps and carries the witness.
        match assemble_tensor(&broken_example(), 2) {
            Err(Error::NotAdmissible { witness }) => assert!(witness.contains("k=1")),
            other => panic!("expected admissibility error, got {other:?}"),
        }
    }

    #[test]
    fn decomposition_splits_and_reassembles() {
        // ΛJe₁ = 3 + 2:x₁: + :x₁²: plus a v-side constant.
        let mut lambda = LambdaMap::zero();
        lambda.set_v(2, c_int(5));
        lambda.set_jv(
            1,
            P::from_terms([
                (MultiIndex::empty(), c_int(3)),
                (MultiIndex::single(1), c_int(2)),
                (MultiIndex::from_modes([1, 1]), c_int(1)),
            ]),
        );
        let parts = decompose_parts(&lambda);
        assert_eq!(parts.coherent.v_image(2), c_int(5));
        assert_eq!(parts.coherent.jv_image(1), P::constant(c_int(3)));
        assert_eq!(parts.linear.jv_image(1), P::x(1).scale(&c_int(2)));
        assert_eq!(
            parts.higher.jv_image(1),
            P::monomial(MultiIndex::from_modes([1, 1]), c_int(1))
        );
        // Sum reconstructs exactly.
        let reassembled = parts.coherent.add(&parts.linear).add(&parts.higher);
        assert_eq!(reassembled, lambda);
        // The three jv layers are mutually orthogonal.
        for (a, b) in [
            (&parts.coherent, &parts.linear),
            (&parts.coherent, &parts.higher),
            (&parts.linear, &parts.higher),
        ] {
            let ip = a.jv_image(1).inner_product(&b.jv_image(1));
            assert!(Scalar::is_zero(&ip));
        }
    }

    #[test]
    fn standard_form_reports_layers_in_the_identity_basis() {
        let mut lambda = closure_example();
        lambda.set_v(1, c_int(-1));
        lambda.set_jv(3, P::constant(c_int(4)));
        let sf = standard_form(&lambda).unwrap();
        assert_eq!(sf.basis_note, "identity basis retained");
        assert_eq!(sf.v_constants.get(&1), Some(&c_int(-1)));
        assert_eq!(sf.jv_constants.get(&3), Some(&c_int(4)));
        // Degrees 1 and 2: the degree-1 tensor is empty, degree 2 carries
        // the {1,2,2} entry.
        assert_eq!(sf.tensors.len(), 2);
        assert_eq!(sf.tensors[0].order, 2);
        assert!(sf.tensors[0].entries.is_empty());
        assert_eq!(sf.tensors[1].order, 3);
        assert_eq!(
            sf.tensors[1].entry(&MultiIndex::from_modes([1, 2, 2])),
            c_int(1)
        );
        assert!(standard_form(&broken_example()).is_err());
    }

    #[test]
    fn transformed_field_adds_the_multiplication_layer() {
        // Φ_Λ(Je₁)1 = i:x₁: + :x₁²: for the one-mode cubic layer.
        let lambda = cubic_example();
        let out = transformed_field(&lambda, &HVector::je(1), &P::one(), 12).unwrap();
        let expected =
            &P::x(1).scale(&i_unit()) + &P::monomial(MultiIndex::from_modes([1, 1]), c_int(1));
        assert_eq!(out, expected);
        // On the v side only the constant shift appears: Φ_Λ(e₂) = q₂ + 5.
        let mut shifted = LambdaMap::zero();
        shifted.set_v(2, c_int(5));
        let out = transformed_field(&shifted, &HVector::e(2), &P::one(), 12).unwrap();
        assert_eq!(out, &P::x(2) + &P::constant(c_int(5)));
    }

    #[test]
    fn transformed_fields_keep_the_commutation_relation() {
        // [Φ_Λ(f), Φ_Λ(g)] = i·σ(f,g)·𝟙 on polynomials of low enough degree,
        // for an admissible quadratic map.
        let lambda = closure_example();
        let cap = 12;
        let vectors = [
            HVector::<ExactC>::e(1),
            HVector::je(1),
            HVector::e(2),
            HVector::je(2),
            HVector::from_parts(
                DirectionVector::from_pairs([(1, c_int(1))]),
                DirectionVector::from_pairs([(2, c_int(-2))]),
            ),
        ];
        let probes = [
            P::one(),
            P::x(1),
            P::from_terms([
                (MultiIndex::from_modes([1, 2]), c_int(1)),
                (MultiIndex::from_modes([2, 2]), c_int(-1)),
            ]),
        ];
        for f in &vectors {
            for g in &vectors {
                let sigma = f.sigma_form(g);
                for poly in &probes {
                    let fg = transformed_field(
                        &lambda,
                        f,
                        &transformed_field(&lambda, g, poly, cap).unwrap(),
                        cap,
                    )
                    .unwrap();
                    let gf = transformed_field(
                        &lambda,
                        g,
                        &transformed_field(&lambda, f, poly, cap).unwrap(),
                        cap,
                    )
                    .unwrap();
                    assert_eq!(&fg - &gf, poly.scale(&(i_unit() * sigma)));
                }
            }
        }
    }

    #[test]
    fn band_profile_vanishes_beyond_the_stated_width() {
        // Degree-2 map: blocks with input degree k > m + deg + 1 are zero.
        let lambda = closure_example();
        let m = 1;
        let rows = band_profile(&lambda, &HVector::je(1), m, 9).unwrap();
        let n = lambda.degree();
        for row in &rows {
            if row.input_degree > m + n + 1 {
                assert!(
                    Scalar::is_zero(&row.block_weight),
                    "block at k={} should vanish",
                    row.input_degree
                );
            }
        }
        // The near-diagonal blocks are genuinely populated.
        assert!(!Scalar::is_zero(&rows[0].block_weight) || !Scalar::is_zero(&rows[2].block_weight));
    }

    #[test]
    fn index_enumeration_counts_stars_and_bars() {
        let modes = [1u32, 2, 3];
        // C(3+2-1, 2) = 6 multi-indices of degree 2 over 3 modes.
        assert_eq!(enumerate_indices(&modes, 2).len(), 6);
        assert_eq!(enumerate_indices(&modes, 0), vec![MultiIndex::empty()]);
        assert_eq!(enumerate_indices(&[], 1), Vec::<MultiIndex>::new());
    }
}
