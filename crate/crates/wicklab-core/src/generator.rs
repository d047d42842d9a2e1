//! Generators of the unitaries implementing admissible transformations.
//!
//! An admissible map Λ with no position-shift component is implemented by
//! conjugation with e^{iG}, where the real polynomial G is a potential for
//! Λ: ∂_k G = ΛJe_k for every mode. On Q-space, multiplication operators
//! commute, so e^{−iG}·q_k·e^{iG} = q_k and
//! e^{−iG}·p_k·e^{iG} = p_k + (∂_k G) — conjugation adds exactly the
//! multiplication layer of the transformed field.
//!
//! The degree-m tensor layer T (order m+1) has the potential
//! G = Σ_β T_β·(m!/β!)·:x_β: over multisets β of size m+1; then ∂_k G
//! reproduces the layer and, degree by degree,
//! ‖G‖² = (Σ_k ‖ΛJe_k‖²)/(2(m+1)) ≤ (Σ_k ‖ΛJe_k‖²)/2.

use crate::error::{Error, Result};
use crate::fock::HVector;
use crate::index::MultiIndex;
use crate::lambda::{lambda_from_tensors, validate_ccr, LambdaMap, SymmetricTensorView};
use crate::scalar::{factorial, Scalar};
use crate::truncation::{truncate_field, truncate_multiplication, weyl_matrix, TruncationScheme};
use crate::wick::WickPolynomial;

/// A generator together with its exact norm² and the norm² bound it is
/// guaranteed to satisfy.
#[derive(Clone, PartialEq, Debug)]
pub struct GeneratorResult<S: Scalar> {
    /// The generator polynomial G.
    pub g: WickPolynomial<S>,
    /// ‖G‖², exact in the backend.
    pub g_norm_sq: S,
    /// The bound (Σ_k ‖ΛJe_k‖²)/2 that ‖G‖² never exceeds.
    pub bound_norm_sq: S,
}

/// One cutoff's worth of conjugation evidence.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ConjugationRow {
    /// Levels per mode in this run.
    pub cutoff: u32,
    /// Probe depth the residual was measured on.
    pub probe: u32,
    /// max over the probe block of |e^{−iG}·Φ(f)·e^{iG} − Φ_Λ(f)|.
    pub residual: f64,
}

/// Build the potential of a list of symmetric tensor layers: each tensor
/// of order m+1 ≥ 2 contributes c_β(G) = T_β·m!/β!. Tensors of order ≤ 1
/// are rejected — constants have no head slot to integrate against.
pub fn build_generator_symmetric<S: Scalar>(
    tensors: &[SymmetricTensorView<S>],
) -> Result<GeneratorResult<S>> {
    let mut g = WickPolynomial::zero();
    for tensor in tensors {
        if tensor.order < 2 {
            return Err(Error::NotHigherOrder {
                place: format!("tensor of order {}", tensor.order),
            });
        }
        let m = tensor.order - 1;
        let m_fact = S::from_rational(factorial(m));
        for (beta, value) in &tensor.entries {
            g.add_term(
                beta.clone(),
                value.clone() * m_fact.clone() / S::from_rational(beta.factorial()),
            );
        }
    }
    let lambda = lambda_from_tensors(tensors)?;
    Ok(finish_generator(g, &lambda))
}

/// Build the potential of a map concentrated on one mode: for a real
/// polynomial F in the distinguished mode only, G has
/// c_{α+e_d}(G) = c_α(F)/(α_d + 1), so that ∂_d G = F.
pub fn build_generator_single_mode<S: Scalar>(
    poly: &WickPolynomial<S>,
    mode: u32,
) -> Result<GeneratorResult<S>> {
    for (alpha, c) in poly.iter() {
        if !c.is_real_value() {
            return Err(Error::NonRealCoefficient {
                place: format!("coefficient at {alpha}"),
                value: format!("{c}"),
            });
        }
        if alpha.modes().any(|k| k != mode) {
            return Err(Error::Unsupported(format!(
                "single-mode builder for mode {mode} given a term at {alpha}"
            )));
        }
    }
    let mut g = WickPolynomial::zero();
    for (alpha, c) in poly.iter() {
        let n = alpha.mult(mode);
        g.add_term(
            alpha.raised(mode),
            c.clone() / S::from_ratio(i128::from(n) + 1, 1),
        );
    }
    let mut lambda = LambdaMap::zero();
    lambda.set_jv(mode, poly.clone());
    Ok(finish_generator(g, &lambda))
}

fn finish_generator<S: Scalar>(g: WickPolynomial<S>, lambda: &LambdaMap<S>) -> GeneratorResult<S> {
    let g_norm_sq = g.norm_squared();
    let mut total = S::zero();
    for mode in lambda.jv_modes().collect::<Vec<_>>() {
        total += lambda.jv_image(mode).norm_squared();
    }
    let bound_norm_sq = total * S::from_ratio(1, 2);
    GeneratorResult {
        g,
        g_norm_sq,
        bound_norm_sq,
    }
}

/// Whether G is a potential for the map: ∂_k G = ΛJe_k for every mode
/// either side touches, with exact equality.
pub fn verify_gradient<S: Scalar>(g: &WickPolynomial<S>, lambda: &LambdaMap<S>) -> bool {
    let mut modes = g.support_modes();
    modes.extend(lambda.jv_modes());
    modes
        .into_iter()
        .all(|k| g.partial_derivative(k) == lambda.jv_image(k))
}

/// Measure how well the truncated unitary e^{iG} implements the
/// transformation: for each cutoff, the probe-block max of
/// |e^{−iG}·Φ(f)·e^{iG} − Φ_Λ(f)| on the truncated space.
///
/// Requires an admissible map with no position-shift component; the
/// generator is assembled from the coherent layer (linear terms) and the
/// symmetric tensor layers.
pub fn conjugation_evidence<S: Scalar>(
    lambda: &LambdaMap<S>,
    f: &HVector<S>,
    cutoffs: &[u32],
    probe: u32,
) -> Result<Vec<ConjugationRow>> {
    let check = validate_ccr(lambda);
    if !check.valid {
        return Err(Error::NotAdmissible {
            witness: check.witness.unwrap_or_default(),
        });
    }
    if lambda.v_modes().next().is_some() {
        return Err(Error::PositionShiftPresent);
    }

    // G = Σ_k c_∅(ΛJe_k)·:x_k: (potential of the coherent layer) plus the
    // potentials of the tensor layers m ≥ 1.
    let mut g = WickPolynomial::zero();
    for mode in lambda.jv_modes().collect::<Vec<_>>() {
        let constant = lambda.jv_image(mode).coefficient(&MultiIndex::empty());
        g.add_term(MultiIndex::single(mode), constant);
    }
    let mut tensors = Vec::new();
    for m in 1..=lambda.degree() {
        tensors.push(crate::lambda::assemble_tensor(lambda, m)?);
    }
    if !tensors.is_empty() {
        g = &g + &build_generator_symmetric(&tensors)?.g;
    }
    debug_assert!(verify_gradient(&g, lambda));

    let mut modes_needed = 1u32;
    for m in lambda.involved_modes() {
        modes_needed = modes_needed.max(m);
    }
    for m in f.v_part.support().chain(f.jv_part.support()) {
        modes_needed = modes_needed.max(m);
    }
    for m in g.support_modes() {
        modes_needed = modes_needed.max(m);
    }

    let lambda_f = lambda.image_of(f);
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        let scheme = TruncationScheme::new(modes_needed, cutoff, probe)?;
        let u = weyl_matrix(&truncate_multiplication(&g, &scheme)?)?;
        let phi = truncate_field(f, &scheme)?;
        let phi_lambda = phi.add(&truncate_multiplication(&lambda_f, &scheme)?);
        let conjugated = u.adjoint().mul(&phi).mul(&u);
        let residual = conjugated.sub(&phi_lambda).probe_block_max_abs();
        rows.push(ConjugationRow {
            cutoff,
            probe,
            residual,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Rational};

    type P = WickPolynomial<Exact>;

    fn one() -> Exact {
        Exact::from_integer(1)
    }

    fn q(n: i128, d: i128) -> Exact {
        Exact::from_rational(Rational::new(n, d))
    }

    fn tensor(order: u32, entries: Vec<(Vec<u32>, Exact)>) -> SymmetricTensorView<Exact> {
        SymmetricTensorView::new(
            order,
            entries
                .into_iter()
                .map(|(modes, v)| (MultiIndex::from_modes(modes), v)),
        )
        .unwrap()
    }

    #[test]
    fn reference_generators_come_out_exactly() {
        // {1,1,1} ↦ 1 gives G = (1/3):x₁³:.
        let result = build_generator_symmetric(&[tensor(3, vec![(vec![1, 1, 1], one())])]).unwrap();
        assert_eq!(
            result.g,
            P::monomial(MultiIndex::from_pairs([(1, 3)]), q(1, 3))
        );
        // {1,2,2} ↦ 1 gives G = :x₁x₂²:.
        let result = build_generator_symmetric(&[tensor(3, vec![(vec![1, 2, 2], one())])]).unwrap();
        assert_eq!(
            result.g,
            P::monomial(MultiIndex::from_modes([1, 2, 2]), one())
        );
    }

    #[test]
    fn gradient_property_holds_for_builder_outputs() {
        // Tensor route, two layers at once.
        let tensors = [
            tensor(2, vec![(vec![1, 2], q(3, 2))]),
            tensor(3, vec![(vec![1, 2, 2], one()), (vec![1, 1, 1], q(-2, 1))]),
        ];
        let result = build_generator_symmetric(&tensors).unwrap();
        let lambda = lambda_from_tensors(&tensors).unwrap();
        assert!(verify_gradient(&result.g, &lambda));
        // The generator has degree Λ-degree + 1.
        assert_eq!(result.g.degree(), lambda.degree() + 1);
        // Single-mode route.
        let f = P::from_terms([
            (MultiIndex::from_pairs([(1, 2)]), one()),
            (MultiIndex::single(1), q(-1, 2)),
            (MultiIndex::empty(), q(5, 1)),
        ]);
        let result = build_generator_single_mode(&f, 1).unwrap();
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, f);
        assert!(verify_gradient(&result.g, &lambda));
        // A wrong potential is detected.
        assert!(!verify_gradient(&result.g.scale(&q(2, 1)), &lambda));
    }

    #[test]
    fn norm_bound_is_exact_and_strict_here() {
        // Cubic layer: ‖G‖² = 1/12, bound = ‖:x₁²:‖²/2 = 1/4.
        let result = build_generator_symmetric(&[tensor(3, vec![(vec![1, 1, 1], one())])]).unwrap();
        assert_eq!(result.g_norm_sq, q(1, 12));
        assert_eq!(result.bound_norm_sq, q(1, 4));
        assert!(result.g_norm_sq <= result.bound_norm_sq);
        // {1,2,2}: ‖G‖² = ‖:x₁x₂²:‖² = 2/8 = 1/4; images :x₂²: and 2:x₁x₂:
        // give bound (1/2 + 1)/2 = 3/4.
        let result = build_generator_symmetric(&[tensor(3, vec![(vec![1, 2, 2], one())])]).unwrap();
        assert_eq!(result.g_norm_sq, q(1, 4));
        assert_eq!(result.bound_norm_sq, q(3, 4));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        // Order-1 tensors cannot be integrated.
        let low = tensor(1, vec![(vec![1], one())]);
        match build_generator_symmetric(&[low]) {
            Err(Error::NotHigherOrder { place }) => assert!(place.contains("order 1")),
            other => panic!("expected order error, got {other:?}"),
        }
        // Single-mode builder rejects foreign modes and non-real input.
        let mixed = P::monomial(MultiIndex::from_modes([1, 2]), one());
        assert!(build_generator_single_mode(&mixed, 1).is_err());
        use crate::scalar::ExactC;
        let complex_poly = WickPolynomial::<ExactC>::monomial(
            MultiIndex::single(1),
            <ExactC as Scalar>::imag_unit().unwrap(),
        );
        match build_generator_single_mode(&complex_poly, 1) {
            Err(Error::NonRealCoefficient { .. }) => {}
            other => panic!("expected reality error, got {other:?}"),
        }
    }

    #[test]
    fn zero_map_conjugates_with_zero_residual() {
        let lambda = LambdaMap::<Exact>::zero();
        let rows = conjugation_evidence(&lambda, &HVector::je(1), &[16], 4).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].residual, 0.0);
        assert_eq!(rows[0].cutoff, 16);
        assert_eq!(rows[0].probe, 4);
    }

    #[test]
    fn position_directions_conjugate_to_float_epsilon() {
        // G is a polynomial in the position matrices, so it commutes with
        // Φ(e₁) exactly — the residual is pure floating-point noise.
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::monomial(MultiIndex::from_pairs([(1, 2)]), one()));
        let rows = conjugation_evidence(&lambda, &HVector::e(1), &[20], 5).unwrap();
        assert!(rows[0].residual < 1e-12, "residual {}", rows[0].residual);
    }

    #[test]
    fn momentum_conjugation_residual_falls_with_cutoff() {
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::monomial(MultiIndex::from_pairs([(1, 2)]), one()));
        let rows = conjugation_evidence(&lambda, &HVector::je(1), &[16, 32], 2).unwrap();
        assert!(
            rows[1].residual <= rows[0].residual.max(1e-12),
            "rows {rows:?}"
        );
    }

    #[test]
    fn position_shift_and_inadmissible_maps_are_refused() {
        let mut lambda = LambdaMap::zero();
        lambda.set_v(1, one());
        match conjugation_evidence(&lambda, &HVector::je(1), &[16], 2) {
            Err(Error::PositionShiftPresent) => {}
            other => panic!("expected shift error, got {other:?}"),
        }
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::monomial(MultiIndex::from_modes([2, 2]), one()));
        match conjugation_evidence(&lambda, &HVector::je(1), &[16], 2) {
            Err(Error::NotAdmissible { .. }) => {}
            other => panic!("expected admissibility error, got {other:?}"),
        }
    }

    #[test]
    fn coherent_layer_rides_along_in_the_generator() {
        // ΛJe₁ = 2 (a constant): G = 2:x₁:, and conjugation shifts p₁ by 2.
        let mut lambda = LambdaMap::zero();
        lambda.set_jv(1, P::constant(q(2, 1)));
        let rows = conjugation_evidence(&lambda, &HVector::je(1), &[32], 4).unwrap();
        assert!(rows[0].residual < 1e-9, "residual {}", rows[0].residual);
    }
}
