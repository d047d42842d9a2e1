//! Finite-dimensional truncations and numerical Weyl-relation checks.
//!
//! Each mode is truncated to its lowest `cutoff` occupation levels; the
//! full space is the tensor product over modes, indexed mode-major:
//! (n₁, n₂, n₃) ↦ ((n₁·N + n₂)·N + n₃). Position and momentum are the
//! familiar tridiagonal matrices in the occupation basis,
//! ⟨n+1|q|n⟩ = √((n+1)/2) and ⟨n±1|p|n⟩ = ±i√((n + (1±1)/2)/2).
//!
//! Multiplication operators are truncated by functional calculus, not by
//! entrywise compression: the operator for Σ c_α·:x_α: is
//! Σ c_α·Π_k W_{α_k}(Q_k), with W defined by the Wick recurrence
//! W_{n+1} = Q·W_n − (n/2)·W_{n−1}. Because the truncated position matrix
//! is the Jacobi matrix of the Gaussian measure, the entry (i, j) of
//! W_n(Q) equals the exact matrix element ⟨u_i, :x^n:·u_j⟩ whenever
//! i + j + n ≤ 2·cutoff − 1, so every probe-block comparison in this
//! module is exact up to floating-point rounding. It also makes the
//! truncated algebra genuinely multiplicative: polynomials in commuting
//! matrices compose exactly.
//!
//! The probe block — indices with every occupation ≤ `probe` — is where
//! residuals are measured; `probe ≤ cutoff/4` keeps it far from the
//! boundary where truncation artifacts live.

use crate::error::{Error, Result};
use crate::fock::HVector;
use crate::scalar::Scalar;
use crate::wick::WickPolynomial;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Maximum number of matrix entries a scheme may allocate.
pub const MAX_MATRIX_ENTRIES: u64 = 1_000_000;

/// A truncation scheme: how many modes, how many levels per mode, and how
/// deep the probe block reaches.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TruncationScheme {
    /// Number of modes (modes are labelled 1..=modes).
    pub modes: u32,
    /// Occupation levels kept per mode (0..cutoff).
    pub cutoff: u32,
    /// Largest occupation per mode inside the probe block.
    pub probe: u32,
}

impl TruncationScheme {
    /// Validate and build a scheme. The probe must stay within the first
    /// quarter of the levels, and the full matrices must fit the entry cap.
    pub fn new(modes: u32, cutoff: u32, probe: u32) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Unsupported(
                "a truncation scheme needs at least one mode".into(),
            ));
        }
        if cutoff == 0 {
            return Err(Error::Unsupported(
                "a truncation scheme needs at least one level".into(),
            ));
        }
        if probe * 4 > cutoff {
            return Err(Error::ProbeTooDeep { cutoff, probe });
        }
        let dim = (u64::from(cutoff)).checked_pow(modes);
        let entries = dim.and_then(|d| d.checked_mul(d));
        match entries {
            Some(e) if e <= MAX_MATRIX_ENTRIES => Ok(TruncationScheme {
                modes,
                cutoff,
                probe,
            }),
            _ => Err(Error::TruncationTooLarge {
                entries: u128::from(entries.unwrap_or(u64::MAX)),
                cap: u128::from(MAX_MATRIX_ENTRIES),
            }),
        }
    }

    /// Total dimension cutoff^modes.
    pub fn dim(&self) -> usize {
        (self.cutoff as usize).pow(self.modes)
    }

    /// Dimension of the probe block, (probe+1)^modes.
    pub fn probe_dim(&self) -> usize {
        (self.probe as usize + 1).pow(self.modes)
    }

    /// Mode-major index of an occupation tuple (length = modes, entries
    /// < cutoff).
    pub fn index(&self, occupations: &[u32]) -> usize {
        assert_eq!(occupations.len(), self.modes as usize);
        let mut idx = 0usize;
        for &n in occupations {
            assert!(n < self.cutoff);
            idx = idx * self.cutoff as usize + n as usize;
        }
        idx
    }

    /// Occupation tuple of a mode-major index.
    pub fn occupations(&self, mut index: usize) -> Vec<u32> {
        let n = self.cutoff as usize;
        let mut out = vec![0u32; self.modes as usize];
        for slot in out.iter_mut().rev() {
            *slot = (index % n) as u32;
            index /= n;
        }
        out
    }

    /// Indices whose occupations all lie in 0..=probe, ascending.
    pub fn probe_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.occupations(i).iter().all(|&n| n <= self.probe))
            .collect()
    }
}

/// A matrix tagged with the scheme it lives on.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    /// The matrix in the mode-major occupation basis.
    pub matrix: DMatrix<Complex64>,
    /// The scheme the matrix belongs to.
    pub scheme: TruncationScheme,
}

impl TruncatedOperator {
    /// The identity on the scheme's space.
    pub fn identity(scheme: TruncationScheme) -> Self {
        TruncatedOperator {
            matrix: DMatrix::identity(scheme.dim(), scheme.dim()),
            scheme,
        }
    }

    /// Largest entry magnitude over the whole matrix.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude over the probe block (rows and columns with
    /// all occupations ≤ probe).
    pub fn probe_block_max_abs(&self) -> f64 {
        let idx = self.scheme.probe_indices();
        let mut max = 0.0f64;
        for &i in &idx {
            for &j in &idx {
                max = max.max(self.matrix[(i, j)].norm());
            }
        }
        max
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        TruncatedOperator {
            matrix: self.matrix.adjoint(),
            scheme: self.scheme,
        }
    }

    /// Matrix product (schemes must match).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.scheme, other.scheme, "operator schemes must match");
        TruncatedOperator {
            matrix: &self.matrix * &other.matrix,
            scheme: self.scheme,
        }
    }

    /// Difference (schemes must match).
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.scheme, other.scheme, "operator schemes must match");
        TruncatedOperator {
            matrix: &self.matrix - &other.matrix,
            scheme: self.scheme,
        }
    }

    /// Sum (schemes must match).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.scheme, other.scheme, "operator schemes must match");
        TruncatedOperator {
            matrix: &self.matrix + &other.matrix,
            scheme: self.scheme,
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> Self {
        TruncatedOperator {
            matrix: &self.matrix * c,
            scheme: self.scheme,
        }
    }
}

/// Single-mode position matrix: ⟨n+1|q|n⟩ = ⟨n|q|n+1⟩ = √((n+1)/2).
fn position_1d(n: usize) -> DMatrix<Complex64> {
    let mut q = DMatrix::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        let v = Complex64::new(((k as f64 + 1.0) / 2.0).sqrt(), 0.0);
        q[(k + 1, k)] = v;
        q[(k, k + 1)] = v;
    }
    q
}

/// Single-mode momentum matrix: ⟨n+1|p|n⟩ = i√((n+1)/2),
/// ⟨n−1|p|n⟩ = −i√(n/2).
fn momentum_1d(n: usize) -> DMatrix<Complex64> {
    let mut p = DMatrix::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        let v = ((k as f64 + 1.0) / 2.0).sqrt();
        p[(k + 1, k)] = Complex64::new(0.0, v);
        p[(k, k + 1)] = Complex64::new(0.0, -v);
    }
    p
}

/// Embed a single-mode matrix at mode k (1-based) by Kronecker products
/// with identities, consistent with the mode-major index.
fn embed_at_mode(
    scheme: &TruncationScheme,
    mode: u32,
    op: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    assert!(mode >= 1 && mode <= scheme.modes, "mode out of range");
    let n = scheme.cutoff as usize;
    let mut out = DMatrix::identity(1, 1);
    for k in 1..=scheme.modes {
        let factor = if k == mode {
            op.clone()
        } else {
            DMatrix::identity(n, n)
        };
        out = out.kronecker(&factor);
    }
    out
}

/// Truncated free field Φ(f) = Σ_k g_k·Q_k + Σ_k h_k·P_k for f = g + Jh.
/// Modes outside the scheme are rejected.
pub fn truncate_field<S: Scalar>(
    f: &HVector<S>,
    scheme: &TruncationScheme,
) -> Result<TruncatedOperator> {
    let dim = scheme.dim();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let q1 = position_1d(scheme.cutoff as usize);
    let p1 = momentum_1d(scheme.cutoff as usize);
    for (mode, c) in f.v_part.iter() {
        if mode == 0 || mode > scheme.modes {
            return Err(Error::UnsupportedMode { mode });
        }
        matrix += embed_at_mode(scheme, mode, &q1) * c.to_c64();
    }
    for (mode, c) in f.jv_part.iter() {
        if mode == 0 || mode > scheme.modes {
            return Err(Error::UnsupportedMode { mode });
        }
        matrix += embed_at_mode(scheme, mode, &p1) * c.to_c64();
    }
    Ok(TruncatedOperator {
        matrix,
        scheme: *scheme,
    })
}

/// Wick power tables W_0..=W_max of a single-mode position matrix, via
/// W_{n+1} = Q·W_n − (n/2)·W_{n−1}.
fn wick_power_table(q: &DMatrix<Complex64>, max: u32) -> Vec<DMatrix<Complex64>> {
    let n = q.nrows();
    let mut table = Vec::with_capacity(max as usize + 1);
    table.push(DMatrix::identity(n, n));
    if max >= 1 {
        table.push(q.clone());
    }
    for k in 1..max {
        let next = q * &table[k as usize]
            - &table[(k - 1) as usize] * Complex64::new(f64::from(k) / 2.0, 0.0);
        table.push(next);
    }
    table
}

/// Truncated multiplication operator for a polynomial, by functional
/// calculus on the commuting truncated position matrices. The polynomial's
/// degree must stay below the cutoff.
pub fn truncate_multiplication<S: Scalar>(
    poly: &WickPolynomial<S>,
    scheme: &TruncationScheme,
) -> Result<TruncatedOperator> {
    if poly.degree() >= scheme.cutoff {
        return Err(Error::DegreeVsCutoff {
            degree: poly.degree(),
            cutoff: scheme.cutoff,
        });
    }
    for mode in poly.support_modes() {
        if mode == 0 || mode > scheme.modes {
            return Err(Error::UnsupportedMode { mode });
        }
    }
    let n = scheme.cutoff as usize;
    let q1 = position_1d(n);
    let mut max_mult = vec![0u32; scheme.modes as usize + 1];
    for (alpha, _) in poly.iter() {
        for (mode, mult) in alpha.iter() {
            let slot = &mut max_mult[mode as usize];
            *slot = (*slot).max(mult);
        }
    }
    let overall_max = max_mult.iter().copied().max().unwrap_or(0);
    let table = wick_power_table(&q1, overall_max);

    let dim = scheme.dim();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for (alpha, c) in poly.iter() {
        // Π_k W_{α_k}(Q_k), assembled as one Kronecker product in mode
        // order; absent modes contribute the identity (W_0).
        let mut term = DMatrix::identity(1, 1);
        for mode in 1..=scheme.modes {
            term = term.kronecker(&table[alpha.mult(mode) as usize]);
        }
        matrix += term * c.to_c64();
    }
    Ok(TruncatedOperator {
        matrix,
        scheme: *scheme,
    })
}

/// e^{iA} for a Hermitian truncated operator, by spectral decomposition.
/// Rejects non-Hermitian input (tolerance 1e−10) and verifies unitarity of
/// the result (tolerance 1e−9).
pub fn weyl_matrix(a: &TruncatedOperator) -> Result<TruncatedOperator> {
    const HERMITIAN_TOL: f64 = 1e-10;
    const UNITARY_TOL: f64 = 1e-9;
    let deviation = a.sub(&a.adjoint()).max_abs();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITIAN_TOL,
        });
    }
    let eig = a.matrix.clone().symmetric_eigen();
    let dim = a.scheme.dim();
    let mut phases = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        phases[(j, j)] = Complex64::new(0.0, eig.eigenvalues[j]).exp();
    }
    let matrix = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    let w = TruncatedOperator {
        matrix,
        scheme: a.scheme,
    };
    let residual = w
        .mul(&w.adjoint())
        .sub(&TruncatedOperator::identity(a.scheme))
        .max_abs();
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary {
            residual,
            tolerance: UNITARY_TOL,
        });
    }
    Ok(w)
}

/// Max-entry residual of the Weyl relation on the probe block:
/// W(tf)·W(sg) − e^{−i·t·s·σ(f,g)/2}·W(tf + sg).
pub fn verify_weyl_relation<S: Scalar>(
    f: &HVector<S>,
    g: &HVector<S>,
    t: f64,
    s: f64,
    scheme: &TruncationScheme,
) -> Result<f64> {
    let sigma = f.sigma_form(g).to_c64().re;
    let wf = weyl_matrix(&truncate_field(f, scheme)?.scale(Complex64::new(t, 0.0)))?;
    let wg = weyl_matrix(&truncate_field(g, scheme)?.scale(Complex64::new(s, 0.0)))?;
    let f64f = f.map_to_c64();
    let f64g = g.map_to_c64();
    let combined = f64f
        .scale(&Complex64::new(t, 0.0))
        .add(&f64g.scale(&Complex64::new(s, 0.0)));
    let w_sum = weyl_matrix(&truncate_field(&combined, scheme)?)?;
    let phase = Complex64::new(0.0, -t * s * sigma / 2.0).exp();
    let difference = wf.mul(&wg).sub(&w_sum.scale(phase));
    Ok(difference.probe_block_max_abs())
}

/// Vacuum expectation ⟨Ω, A·Ω⟩: the (0,0) matrix entry.
pub fn vacuum_expectation(a: &TruncatedOperator) -> Complex64 {
    a.matrix[(0, 0)]
}

/// Largest deviation of [Q_k, P_k] from i·𝟙 over interior indices (all
/// occupations < cutoff−1). The truncated pair satisfies the commutation
/// relation exactly away from the top level.
pub fn interior_ccr_residual(scheme: &TruncationScheme) -> Result<f64> {
    let mut worst = 0.0f64;
    let interior: Vec<usize> = (0..scheme.dim())
        .filter(|&i| scheme.occupations(i).iter().all(|&n| n + 1 < scheme.cutoff))
        .collect();
    for mode in 1..=scheme.modes {
        let q = truncate_field(&HVector::<Complex64>::e(mode), scheme)?;
        let p = truncate_field(&HVector::<Complex64>::je(mode), scheme)?;
        let comm = q.mul(&p).sub(&p.mul(&q));
        for &i in &interior {
            for &j in &interior {
                let expected = if i == j {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((comm.matrix[(i, j)] - expected).norm());
            }
        }
    }
    Ok(worst)
}

/// Max-entry deviation, over the probe block, between the truncated
/// multiplication operator and the exact matrix elements
/// ⟨u_β, F·u_α⟩ computed in the polynomial algebra.
pub fn multiplication_consistency_residual<S: Scalar>(
    poly: &WickPolynomial<S>,
    scheme: &TruncationScheme,
) -> Result<f64> {
    let truncated = truncate_multiplication(poly, scheme)?;
    let poly64 = poly.to_c64_poly();
    let cap = poly.degree() + scheme.probe * scheme.modes + 1;
    let idx = scheme.probe_indices();
    let mut worst = 0.0f64;
    for &col in &idx {
        let alpha_occ = scheme.occupations(col);
        let alpha = crate::index::MultiIndex::from_pairs(
            alpha_occ
                .iter()
                .enumerate()
                .map(|(k, &n)| (k as u32 + 1, n)),
        );
        let u_alpha = crate::fock::normalized_basis::<Complex64>(&alpha)?;
        let image = poly64.wick_product(&u_alpha, cap)?;
        for &row in &idx {
            let beta_occ = scheme.occupations(row);
            let beta = crate::index::MultiIndex::from_pairs(
                beta_occ.iter().enumerate().map(|(k, &n)| (k as u32 + 1, n)),
            );
            let u_beta = crate::fock::normalized_basis::<Complex64>(&beta)?;
            let exact = u_beta.inner_product(&image);
            let got = truncated.matrix[(row, col)];
            worst = worst.max((got - exact).norm());
        }
    }
    Ok(worst)
}
