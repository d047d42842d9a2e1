//! Finite-dimensional symplectic maps and quasifree data.
//!
//! Matrices act on coordinates ordered q-then-p: a vector f = g + Jh is
//! the column (g₁..g_d, h₁..h_d)ᵀ. In this basis
//!
//!   Ω = [[0, I], [−I, 0]] (the symplectic form, σ(f, f′) = fᵀΩf′),
//!   J = [[0, −I], [I, 0]] (the reference complex structure),
//!
//! and the real inner product is the Euclidean one, s(f, f′) = fᵀf′ =
//! −σ(Jf, f′). A map T is symplectic when TᵀΩT = Ω; equivalently
//! −J·T⁻¹·J = Tᵀ, which is checked independently as a cross-validation.

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::lambda::LambdaMap;
use crate::wick::WickPolynomial;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// Symmetry / compatibility tolerance for user-supplied matrices.
const STRUCTURE_TOL: f64 = 1e-9;
/// Eigenvalues at or below this are treated as a degenerate metric.
const EIGENVALUE_CLIP: f64 = 1e-12;

fn check_even_square(t: &DMatrix<f64>, what: &str) -> Result<usize> {
    if t.nrows() != t.ncols() || !t.nrows().is_multiple_of(2) || t.nrows() == 0 {
        return Err(Error::Unsupported(format!(
            "{what} must be square of even dimension, got {}×{}",
            t.nrows(),
            t.ncols()
        )));
    }
    Ok(t.nrows() / 2)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// The symplectic form matrix Ω on d modes (2d×2d).
pub fn omega(d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        m[(k, d + k)] = 1.0;
        m[(d + k, k)] = -1.0;
    }
    m
}

/// The reference complex structure J on d modes (2d×2d); J = −Ω.
pub fn jmat(d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        m[(k, d + k)] = -1.0;
        m[(d + k, k)] = 1.0;
    }
    m
}

/// Whether TᵀΩT = Ω within `tol` (max entry).
pub fn is_symplectic(t: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let d = check_even_square(t, "a symplectic candidate")?;
    let om = omega(d);
    Ok(max_abs(&(t.transpose() * &om * t - &om)) <= tol)
}

/// Whether −J·T⁻¹·J = Tᵀ within `tol` — an equivalent characterization of
/// symplecticity that exercises the inverse instead of the form.
pub fn inverse_adjoint_check(t: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let d = check_even_square(t, "a symplectic candidate")?;
    let inv = t.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let j = jmat(d);
    Ok(max_abs(&(-(&j * inv * &j) - t.transpose())) <= tol)
}

/// Recover the positive symplectic map from a metric and a compatible
/// complex structure: validates M = Mᵀ, J′² = −𝟙, and M = −J·J′, then
/// returns the principal square root T = M^{1/2}. A metric eigenvalue at
/// or below the clip is rejected rather than inverted into noise.
pub fn build_t_from_metric(m: &DMatrix<f64>, jprime: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = check_even_square(m, "a metric")?;
    if jprime.nrows() != 2 * d || jprime.ncols() != 2 * d {
        return Err(Error::Unsupported(format!(
            "complex structure is {}×{} but the metric is {}×{}",
            jprime.nrows(),
            jprime.ncols(),
            2 * d,
            2 * d
        )));
    }
    let sym_dev = max_abs(&(m - m.transpose()));
    if sym_dev > STRUCTURE_TOL {
        return Err(Error::NotSymmetric { deviation: sym_dev });
    }
    let jj = jprime * jprime;
    let identity = DMatrix::<f64>::identity(2 * d, 2 * d);
    let dev = max_abs(&(&jj + &identity));
    if dev > STRUCTURE_TOL {
        return Err(Error::BadComplexStructure {
            reason: format!("J′² deviates from −𝟙 by {dev:.3e}"),
        });
    }
    let compat = max_abs(&(m + jmat(d) * jprime));
    if compat > STRUCTURE_TOL {
        return Err(Error::BadComplexStructure {
            reason: format!("metric is not −J·J′ (deviation {compat:.3e})"),
        });
    }
    let eig = m.clone().symmetric_eigen();
    for &lambda in eig.eigenvalues.iter() {
        if lambda <= EIGENVALUE_CLIP {
            return Err(Error::MetricNotPositive {
                reason: format!("eigenvalue {lambda:.3e} at or below clip {EIGENVALUE_CLIP:.0e}"),
            });
        }
    }
    let mut roots = DMatrix::zeros(2 * d, 2 * d);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        roots[(k, k)] = lambda.sqrt();
    }
    Ok(&eig.eigenvectors * roots * eig.eigenvectors.transpose())
}

/// Polar decomposition T = U·A with U orthogonal and A = (TᵀT)^{1/2}
/// symmetric positive definite.
pub fn polar_decompose(t: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_even_square(t, "a map to decompose")?;
    let gram = t.transpose() * t;
    let eig = gram.symmetric_eigen();
    let n = t.nrows();
    let mut roots = DMatrix::zeros(n, n);
    let mut inv_roots = DMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= EIGENVALUE_CLIP {
            return Err(Error::SingularMatrix);
        }
        roots[(k, k)] = lambda.sqrt();
        inv_roots[(k, k)] = 1.0 / lambda.sqrt();
    }
    let a = &eig.eigenvectors * roots * eig.eigenvectors.transpose();
    let a_inv = &eig.eigenvectors * inv_roots * eig.eigenvectors.transpose();
    Ok((t * a_inv, a))
}

/// ‖𝟙 − (TᵀT)^{1/2}‖²_F — the squared Frobenius distance of the positive
/// part from the identity. Zero exactly for orthogonal T.
pub fn shale_index(t: &DMatrix<f64>) -> Result<f64> {
    let (_, a) = polar_decompose(t)?;
    let n = t.nrows();
    let diff = DMatrix::<f64>::identity(n, n) - a;
    Ok(diff.iter().map(|x| x * x).sum())
}

/// A quasifree specification: a symplectic map T and a linear functional l
/// (as a coordinate vector, q-then-p).
#[derive(Clone, PartialEq, Debug)]
pub struct QuasifreeSpec {
    /// The symplectic map.
    pub t: DMatrix<f64>,
    /// The linear functional's coordinates.
    pub l: DVector<f64>,
}

/// The quasifree characteristic value at f:
/// exp(i·l(f) − s(Tf, Tf)/4).
pub fn quasifree_char(spec: &QuasifreeSpec, f: &DVector<f64>) -> Result<Complex64> {
    let n = spec.t.nrows();
    if spec.t.ncols() != n || spec.l.len() != n || f.len() != n {
        return Err(Error::Unsupported(format!(
            "quasifree data with inconsistent dimensions: T is {}×{}, l has {}, f has {}",
            spec.t.nrows(),
            spec.t.ncols(),
            spec.l.len(),
            f.len()
        )));
    }
    let tf = &spec.t * f;
    let quad = tf.dot(&tf) / 4.0;
    let phase = spec.l.dot(f);
    Ok(Complex64::new(0.0, phase).exp() * (-quad).exp())
}

/// Build the linear map Λ from a symmetric matrix S and a linear
/// functional l: Λe_k = l(e_k)·𝟙 and ΛJe_k = Σ_j S_{jk}·:x_j: + l(Je_k)·𝟙.
/// Coefficients are copied through unchanged, so the roundtrip with
/// [`s_from_linear_lambda`] is exact.
pub fn linear_lambda_from_s(s: &DMatrix<f64>, l: &DVector<f64>) -> Result<LambdaMap<f64>> {
    let d = s.nrows();
    if s.ncols() != d || d == 0 {
        return Err(Error::Unsupported(format!(
            "coefficient matrix must be square and nonempty, got {}×{}",
            s.nrows(),
            s.ncols()
        )));
    }
    if l.len() != 2 * d {
        return Err(Error::Unsupported(format!(
            "functional has {} coordinates but the matrix implies {}",
            l.len(),
            2 * d
        )));
    }
    let sym_dev = max_abs(&(s - s.transpose()));
    if sym_dev > 0.0 {
        return Err(Error::NotSymmetric { deviation: sym_dev });
    }
    let mut lambda = LambdaMap::zero();
    for k in 0..d {
        lambda.set_v(k as u32 + 1, l[k]);
        let mut image = WickPolynomial::zero();
        for j in 0..d {
            image.add_term(MultiIndex::single(j as u32 + 1), s[(j, k)]);
        }
        image.add_term(MultiIndex::empty(), l[d + k]);
        lambda.set_jv(k as u32 + 1, image);
    }
    Ok(lambda)
}

/// Read the matrix S and functional l back out of a linear map. The map
/// must have images of degree ≤ 1; `d` is the largest involved mode.
pub fn s_from_linear_lambda(lambda: &LambdaMap<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let modes = lambda.involved_modes();
    let d = modes.iter().max().copied().unwrap_or(0) as usize;
    if d == 0 {
        return Err(Error::Unsupported(
            "cannot size the coefficient matrix of an empty map".into(),
        ));
    }
    let mut s = DMatrix::zeros(d, d);
    let mut l = DVector::zeros(2 * d);
    for k in 1..=d as u32 {
        l[(k - 1) as usize] = lambda.v_image(k);
        let image = lambda.jv_image(k);
        if image.degree() > 1 {
            return Err(Error::Unsupported(format!(
                "ΛJe{k} has degree {} — the map is not linear",
                image.degree()
            )));
        }
        l[(d as u32 + k - 1) as usize] = image.coefficient(&MultiIndex::empty());
        for j in 1..=d as u32 {
            s[((j - 1) as usize, (k - 1) as usize)] = image.coefficient(&MultiIndex::single(j));
        }
    }
    Ok((s, l))
}

/// The symplectic shear induced by a symmetric linear layer:
/// (g, h) ↦ (g + S·h, h), i.e. the block matrix [[I, S], [0, I]].
pub fn induced_symplectic(s: &DMatrix<f64>) -> DMatrix<f64> {
    let d = s.nrows();
    let mut t = DMatrix::identity(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            t[(i, d + j)] = s[(i, j)];
        }
    }
    t
}

/// A random symplectic matrix on d modes: the product of a block-diagonal
/// [[A, 0], [0, A⁻ᵀ]] (A = L·U with unit-triangular factors, invertible by
/// construction) and two symmetric shears.
pub fn random_symplectic<R: Rng>(rng: &mut R, d: usize) -> DMatrix<f64> {
    assert!(d >= 1);
    let mut lower = DMatrix::<f64>::identity(d, d);
    let mut upper = DMatrix::<f64>::identity(d, d);
    for i in 0..d {
        for j in 0..i {
            lower[(i, j)] = rng.gen_range(-0.8..0.8);
            upper[(j, i)] = rng.gen_range(-0.8..0.8);
        }
    }
    let a = lower * upper;
    let a_inv_t = a
        .clone()
        .try_inverse()
        .expect("unit-triangular product is invertible")
        .transpose();
    let mut block = DMatrix::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(&a);
    block.view_mut((d, d), (d, d)).copy_from(&a_inv_t);

    let sym = |rng: &mut R| {
        let mut b = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                let v = rng.gen_range(-0.8..0.8);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        b
    };
    let b = sym(rng);
    let c = sym(rng);
    let mut shear_b = DMatrix::identity(2 * d, 2 * d);
    shear_b.view_mut((0, d), (d, d)).copy_from(&b);
    let mut shear_c = DMatrix::identity(2 * d, 2 * d);
    shear_c.view_mut((d, 0), (d, d)).copy_from(&c);
    block * shear_b * shear_c
}

/// A random compatible (metric, complex structure) pair: M = XᵀX for a
/// random symplectic X is symmetric, positive, and symplectic, so
/// J′ = J·M squares to −𝟙 and satisfies M = −J·J′.
pub fn random_compatible_pair<R: Rng>(rng: &mut R, d: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let x = random_symplectic(rng, d);
    let m = x.transpose() * &x;
    let jp = jmat(d) * &m;
    (m, jp)
}
