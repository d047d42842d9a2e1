//! Gauss–Hermite quadrature against the normalized Gaussian measure.
//!
//! The measure per mode is dμ = π^{−1/2}e^{−x²}dx, so nodes are the
//! classical Hermite nodes and the weights are normalized to sum to 1.
//! Rules are generated by the Golub–Welsch eigenvalue method: the monic
//! orthogonal polynomials for this weight satisfy
//! π_{n+1} = x·π_n − (n/2)·π_{n−1}, giving a Jacobi matrix with zero
//! diagonal and off-diagonal entries √(k/2).
//!
//! An n-point rule integrates polynomials of degree ≤ 2n−1 exactly, so
//! every integral here is exact up to floating-point rounding; quadrature
//! serves as an oracle that is computed by a completely different route
//! than the coefficient algebra.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::wick::WickPolynomial;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Nodes and weights of the n-point rule for dμ = π^{−1/2}e^{−x²}dx,
/// nodes ascending, weights summing to 1.
pub fn gauss_hermite(n: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let n = n as usize;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let node = eig.eigenvalues[j];
            let first = eig.eigenvectors[(0, j)];
            (node, first * first) // μ₀ = ∫dμ = 1
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    pairs.into_iter().unzip()
}

/// ∫ Π_i F_i dμ over the product Gaussian measure, evaluated on a tensor
/// quadrature grid just large enough to be exact for the combined degree.
/// No conjugation is applied to any factor. Errors with
/// [`Error::NodeBudgetExceeded`] when exactness would need more than
/// `node_budget` nodes per mode.
pub fn integrate<S: Scalar>(factors: &[&WickPolynomial<S>], node_budget: u32) -> Result<Complex64> {
    if factors.iter().any(|f| f.is_zero()) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let total_degree: u32 = factors.iter().map(|f| f.degree()).sum();
    let nodes_needed = total_degree / 2 + 1;
    if nodes_needed > node_budget {
        return Err(Error::NodeBudgetExceeded {
            needed: nodes_needed,
            budget: node_budget,
        });
    }
    let c64_factors: Vec<WickPolynomial<Complex64>> =
        factors.iter().map(|f| f.to_c64_poly()).collect();
    let mut modes: Vec<u32> = Vec::new();
    for f in &c64_factors {
        for m in f.support_modes() {
            if !modes.contains(&m) {
                modes.push(m);
            }
        }
    }
    modes.sort_unstable();
    let (nodes, weights) = gauss_hermite(nodes_needed);
    let n = nodes.len();

    // Odometer over the tensor grid; the point map is allocated once and
    // updated in place.
    let mut point: BTreeMap<u32, f64> = modes.iter().map(|&m| (m, nodes[0])).collect();
    let dims = modes.len();
    let mut counter = vec![0usize; dims];
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut weight = 1.0;
        for (d, &c) in counter.iter().enumerate() {
            weight *= weights[c];
            *point.get_mut(&modes[d]).expect("mode preinserted") = nodes[c];
        }
        let mut value = Complex64::new(1.0, 0.0);
        for f in &c64_factors {
            value *= f.eval_c64(&point);
        }
        acc += value * weight;

        // Advance the odometer; done when it wraps past the last digit
        // (immediately, for a constant integrand with no modes).
        let mut d = 0;
        loop {
            if d == dims {
                return Ok(acc);
            }
            counter[d] += 1;
            if counter[d] < n {
                break;
            }
            counter[d] = 0;
            d += 1;
        }
    }
}

/// ∫ F·G dμ with no conjugation — bilinear, not sesquilinear. For real F
/// and G this equals the inner product; for complex coefficients it is the
/// analytic continuation of it.
pub fn quadrature_eval<S: Scalar>(
    f: &WickPolynomial<S>,
    g: &WickPolynomial<S>,
    node_budget: u32,
) -> Result<Complex64> {
    integrate(&[f, g], node_budget)
}

/// Coefficient functional computed by quadrature alone:
/// c_α(F) = (∫ F·:x_α: dμ)·2^{|α|}/α!. Used as an oracle against the
/// stored-coefficient lookup.
pub fn extract_coefficient_via_quadrature<S: Scalar>(
    f: &WickPolynomial<S>,
    alpha: &crate::index::MultiIndex,
    node_budget: u32,
) -> Result<Complex64> {
    let probe = WickPolynomial::<S>::monomial(alpha.clone(), S::one());
    let raw = integrate(&[f, &probe], node_budget)?;
    let norm_sq = crate::wick::monomial_norm_sq(alpha);
    let scale = *norm_sq.denom() as f64 / *norm_sq.numer() as f64;
    Ok(raw * scale)
}
