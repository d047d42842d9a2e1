//! Equivalence classification through Hilbert–Schmidt series.
//!
//! Every classifier here reduces to the convergence of a nonnegative
//! series indexed by mode. Finitely many terms are computed exactly from
//! the data at hand; the behavior beyond the stored modes must be
//! *declared* as a [`TailRule`]. Divergence is never inferred from a
//! finite sample — a spread-out query without a declared tail is an
//! error, not a guess. Power-law tails are bracketed by integral bounds,
//! so every outcome carries a rigorous enclosure `[lower, upper]` along
//! with the convergence verdict.

use crate::error::{Error, Result};
use crate::fock::HVector;
use crate::index::MultiIndex;
use crate::lambda::{decompose_parts, LambdaMap};
use crate::symplectic::{induced_symplectic, is_symplectic, polar_decompose, QuasifreeSpec};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Declared behavior of a nonnegative per-mode series beyond the modes
/// stored explicitly. The rule describes the summed term itself (already
/// squared where the series is a sum of squares).
#[derive(Clone, PartialEq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailRule {
    /// All terms beyond the explicit ones vanish.
    Zero,
    /// Terms follow c·k^(−p) for modes k past the explicit range.
    PowerLaw { c: f64, p: f64 },
    /// The caller asserts summability (or its failure) without giving a
    /// closed form; no numeric enclosure is available.
    CustomSummable { summable: bool },
}

// Deserialization is written out by hand: serde's derive ignores unknown
// fields on internally tagged enums, and a silently dropped field in a
// convergence declaration is exactly the kind of typo this schema must
// reject.
impl<'de> Deserialize<'de> for TailRule {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wire {
            kind: String,
            #[serde(default)]
            c: Option<f64>,
            #[serde(default)]
            p: Option<f64>,
            #[serde(default)]
            summable: Option<bool>,
        }
        use serde::de::Error as _;
        let wire = Wire::deserialize(deserializer)?;
        fn extras<'a>(names: &[(&'a str, bool)]) -> Vec<&'a str> {
            names
                .iter()
                .filter_map(|&(n, present)| present.then_some(n))
                .collect()
        }
        match wire.kind.as_str() {
            "zero" => {
                let stray = extras(&[
                    ("c", wire.c.is_some()),
                    ("p", wire.p.is_some()),
                    ("summable", wire.summable.is_some()),
                ]);
                if !stray.is_empty() {
                    return Err(D::Error::custom(format!(
                        "tail rule \"zero\" takes no fields, got {}",
                        stray.join(", ")
                    )));
                }
                Ok(TailRule::Zero)
            }
            "power_law" => match (wire.c, wire.p, wire.summable) {
                (Some(c), Some(p), None) => Ok(TailRule::PowerLaw { c, p }),
                _ => Err(D::Error::custom(
                    "tail rule \"power_law\" requires exactly the fields c and p",
                )),
            },
            "custom_summable" => match (wire.c, wire.p, wire.summable) {
                (None, None, Some(summable)) => Ok(TailRule::CustomSummable { summable }),
                _ => Err(D::Error::custom(
                    "tail rule \"custom_summable\" requires exactly the field summable",
                )),
            },
            other => Err(D::Error::custom(format!(
                "unknown tail rule kind {other:?}; valid kinds: zero, power_law, custom_summable"
            ))),
        }
    }
}

impl TailRule {
    /// Check the rule's parameter invariants: c ≥ 0 and p > 0.
    pub fn validate(&self) -> Result<()> {
        if let TailRule::PowerLaw { c, p } = self {
            if !c.is_finite() || *c < 0.0 {
                return Err(Error::Model(format!(
                    "power-law tail requires a nonnegative finite coefficient, got c = {c}"
                )));
            }
            if !p.is_finite() || *p <= 0.0 {
                return Err(Error::Model(format!(
                    "power-law tail requires a positive exponent, got p = {p}"
                )));
            }
        }
        Ok(())
    }
}

/// A per-mode series: explicit nonnegative terms for modes 1..=len,
/// then a declared rule for every later mode.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TailFamily {
    /// Terms for the leading modes, in mode order starting at 1.
    pub explicit: Vec<f64>,
    /// Behavior of all later terms.
    pub rule: TailRule,
}

/// The outcome of summing a nonnegative series: a convergence verdict
/// and a rigorous enclosure of the value (infinite on divergence, and
/// `upper` may be infinite for a tail declared summable without a form).
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct SumOutcome {
    /// Whether the full series converges.
    pub converges: bool,
    /// Lower bound on the sum.
    pub lower: f64,
    /// Upper bound on the sum.
    pub upper: f64,
}

impl SumOutcome {
    fn exactly(v: f64) -> Self {
        SumOutcome {
            converges: true,
            lower: v,
            upper: v,
        }
    }

    fn diverges() -> Self {
        SumOutcome {
            converges: false,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
        }
    }

    fn plus(&self, other: &SumOutcome) -> SumOutcome {
        if !self.converges || !other.converges {
            return SumOutcome::diverges();
        }
        SumOutcome {
            converges: true,
            lower: self.lower + other.lower,
            upper: self.upper + other.upper,
        }
    }
}

/// Sum a declared rule over all modes k ≥ k0 (k0 ≥ 1). Power laws use
/// the integral bracket Σ ∈ [c·k0^(1−p)/(p−1), c·k0^(−p) + c·k0^(1−p)/(p−1)]
/// and converge exactly when p > 1.
pub fn tail_sum(rule: &TailRule, k0: u32) -> Result<SumOutcome> {
    rule.validate()?;
    assert!(k0 >= 1, "mode indices start at 1");
    match rule {
        TailRule::Zero => Ok(SumOutcome::exactly(0.0)),
        TailRule::PowerLaw { c, p } => {
            if *c == 0.0 {
                return Ok(SumOutcome::exactly(0.0));
            }
            if *p <= 1.0 {
                return Ok(SumOutcome::diverges());
            }
            let k0f = k0 as f64;
            let integral = c * k0f.powf(1.0 - p) / (p - 1.0);
            Ok(SumOutcome {
                converges: true,
                lower: integral,
                upper: c * k0f.powf(-p) + integral,
            })
        }
        TailRule::CustomSummable { summable } => {
            if *summable {
                Ok(SumOutcome {
                    converges: true,
                    lower: 0.0,
                    upper: f64::INFINITY,
                })
            } else {
                Ok(SumOutcome::diverges())
            }
        }
    }
}

impl TailFamily {
    /// Sum the whole family: explicit part exactly, declared part by rule.
    pub fn sum(&self) -> Result<SumOutcome> {
        let mut head = 0.0f64;
        for (k, &v) in self.explicit.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Model(format!(
                    "series term for mode {} must be finite and nonnegative, got {v}",
                    k + 1
                )));
            }
            head += v;
        }
        Ok(SumOutcome::exactly(head).plus(&tail_sum(&self.rule, self.explicit.len() as u32 + 1)?))
    }
}

/// Sum explicit nonnegative values (modes 1..=len) plus a declared tail.
pub fn hs_norm(values: &[f64], rule: &TailRule) -> Result<SumOutcome> {
    TailFamily {
        explicit: values.to_vec(),
        rule: rule.clone(),
    }
    .sum()
}

/// Two-valued classification outcome.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The Hilbert–Schmidt series converges.
    Equivalent,
    /// The series diverges.
    Inequivalent,
}

/// A classification result: the verdict, which criterion produced it,
/// the series enclosure, and the running partial sums of the explicit
/// head terms as evidence.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    /// Equivalent or inequivalent.
    pub verdict: Verdict,
    /// Which comparison was run ("fock", "coherent_shift", "quasifree",
    /// "fock_pair").
    pub criterion: String,
    /// The series enclosure behind the verdict.
    pub hs_value: SumOutcome,
    /// Running partial sums of the explicit terms, in summation order.
    pub evidence: Vec<f64>,
}

fn partial_sums(terms: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    terms
        .iter()
        .map(|t| {
            acc += t;
            acc
        })
        .collect()
}

fn verdict_from(sum: SumOutcome, criterion: &str, evidence: Vec<f64>) -> EquivalenceVerdict {
    EquivalenceVerdict {
        verdict: if sum.converges {
            Verdict::Equivalent
        } else {
            Verdict::Inequivalent
        },
        criterion: criterion.to_string(),
        hs_value: sum,
        evidence,
    }
}

/// Classify the representation twisted by `lambda` against the untwisted
/// one. The stored modes contribute (Λe_k)² + ‖ΛJe_k‖² exactly; `rule`
/// declares those terms for every later mode.
pub fn classify_vs_fock(lambda: &LambdaMap<f64>, rule: &TailRule) -> Result<EquivalenceVerdict> {
    let modes = lambda.involved_modes();
    let max_mode = modes.iter().max().copied().unwrap_or(0);
    let mut values = Vec::with_capacity(max_mode as usize);
    for k in 1..=max_mode {
        let v = lambda.v_image(k);
        let term = v * v + lambda.jv_image(k).norm_squared();
        values.push(term);
    }
    let sum = hs_norm(&values, rule)?;
    let evidence = partial_sums(&values);
    Ok(verdict_from(sum, "fock", evidence))
}

/// Classify a pure coherent shift. With a base metric M the stored part
/// contributes lᵀM⁻¹l; without one it contributes Σ l_k². The rule
/// declares the squared shift terms beyond the stored coordinates.
pub fn classify_coherent_shift(
    l_values: &DVector<f64>,
    base_metric: Option<&DMatrix<f64>>,
    rule: &TailRule,
) -> Result<EquivalenceVerdict> {
    let head = match base_metric {
        None => l_values.iter().map(|x| x * x).sum::<f64>(),
        Some(m) => {
            if m.nrows() != m.ncols() || m.nrows() != l_values.len() {
                return Err(Error::Unsupported(format!(
                    "metric is {}×{} but the shift has {} coordinates",
                    m.nrows(),
                    m.ncols(),
                    l_values.len()
                )));
            }
            let eig = m.clone().symmetric_eigen();
            for &ev in eig.eigenvalues.iter() {
                if ev <= 1e-12 {
                    return Err(Error::MetricNotPositive {
                        reason: format!("eigenvalue {ev:.3e} in the shift metric"),
                    });
                }
            }
            let solved = m
                .clone()
                .lu()
                .solve(l_values)
                .ok_or(Error::SingularMatrix)?;
            l_values.dot(&solved)
        }
    };
    // The stored coordinates cover modes 1..=ceil(len/2) in q-then-p
    // order when no metric reshapes them; the rule takes over after the
    // stored block either way.
    let k0 = l_values.len() as u32 / 2 + 1;
    let sum = SumOutcome::exactly(head).plus(&tail_sum(rule, k0.max(1))?);
    Ok(verdict_from(sum, "coherent_shift", vec![head]))
}

fn pad_to(m: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    // Embed a 2d′×2d′ q-then-p matrix into 2d×2d, identity on new modes.
    let dp = m.nrows() / 2;
    assert!(dp <= d);
    let mut out = DMatrix::identity(2 * d, 2 * d);
    for i in 0..dp {
        for j in 0..dp {
            out[(i, j)] = m[(i, j)];
            out[(i, d + j)] = m[(i, dp + j)];
            out[(d + i, j)] = m[(dp + i, j)];
            out[(d + i, d + j)] = m[(dp + i, dp + j)];
        }
    }
    out
}

/// Classify `lambda` against the quasifree representation described by
/// `spec`. The stored modes contribute three exact pieces: the squared
/// norms of the degree-≥2 parts of ΛJe_k, the Frobenius distance between
/// the positive polar parts of the two linear layers, and the squared
/// distance between the shift vectors. `rule` declares the degree-≥2
/// norm series beyond the stored modes.
pub fn classify_vs_quasifree(
    lambda: &LambdaMap<f64>,
    rule: &TailRule,
    spec: &QuasifreeSpec,
) -> Result<EquivalenceVerdict> {
    if spec.t.nrows() != spec.t.ncols() || !spec.t.nrows().is_multiple_of(2) || spec.t.nrows() == 0
    {
        return Err(Error::Unsupported(format!(
            "quasifree map must be square of even dimension, got {}×{}",
            spec.t.nrows(),
            spec.t.ncols()
        )));
    }
    if spec.l.len() != spec.t.nrows() {
        return Err(Error::Unsupported(format!(
            "quasifree shift has {} coordinates but the map is {}×{}",
            spec.l.len(),
            spec.t.nrows(),
            spec.t.ncols()
        )));
    }
    if !is_symplectic(&spec.t, 1e-6)? {
        return Err(Error::Unsupported(
            "quasifree comparison requires a symplectic map".into(),
        ));
    }
    let lambda_max = lambda.involved_modes().iter().max().copied().unwrap_or(0) as usize;
    let d = lambda_max.max(spec.t.nrows() / 2);

    // Split the map: constants and the linear layer feed the matrix
    // comparison; everything of degree ≥ 2 is summed directly.
    let parts = decompose_parts(lambda);
    let mut s_mat = DMatrix::<f64>::zeros(d, d);
    let mut l_vec = DVector::<f64>::zeros(2 * d);
    let mut higher_terms = vec![0.0f64; d];
    for k in 1..=d as u32 {
        l_vec[(k - 1) as usize] = parts.coherent.v_image(k);
        l_vec[(d as u32 + k - 1) as usize] =
            parts.coherent.jv_image(k).coefficient(&MultiIndex::empty());
        let linear_image = parts.linear.jv_image(k);
        for j in 1..=d as u32 {
            s_mat[((j - 1) as usize, (k - 1) as usize)] =
                linear_image.coefficient(&MultiIndex::single(j));
        }
        higher_terms[(k - 1) as usize] = parts.higher.jv_image(k).norm_squared();
    }

    // Positive polar parts: the quasifree state sees only (TᵀT)^{1/2}.
    let t_lambda = induced_symplectic(&s_mat);
    let (_, a_lambda) = polar_decompose(&t_lambda)?;
    let (_, a_spec) = polar_decompose(&pad_to(&spec.t, d))?;
    let a_gap: f64 = (a_lambda - a_spec).iter().map(|x| x * x).sum();

    let mut l_spec = DVector::<f64>::zeros(2 * d);
    let dsp = spec.t.nrows() / 2;
    for i in 0..dsp {
        l_spec[i] = spec.l[i];
        l_spec[d + i] = spec.l[dsp + i];
    }
    let l_gap: f64 = (l_vec - l_spec).iter().map(|x| x * x).sum();

    let higher_sum = hs_norm(&higher_terms, rule)?;
    let sum = SumOutcome::exactly(a_gap + l_gap).plus(&higher_sum);
    // Evidence order: polar-part gap, then the shift gap, then the
    // per-mode degree-≥2 norms.
    let mut lead = vec![a_gap, l_gap];
    lead.extend_from_slice(&higher_terms);
    Ok(verdict_from(sum, "quasifree", partial_sums(&lead)))
}

/// Classify two complex structures against each other. Both must square
/// to −𝟙 and preserve the form; the stored part is ‖J_a − J_b‖²_F and
/// `rule` declares the per-mode terms beyond the stored block.
pub fn fock_pair_equivalence(
    j_a: &DMatrix<f64>,
    j_b: &DMatrix<f64>,
    rule: &TailRule,
) -> Result<EquivalenceVerdict> {
    for (name, j) in [("first", j_a), ("second", j_b)] {
        if j.nrows() != j.ncols() || j.nrows() % 2 != 0 || j.nrows() == 0 {
            return Err(Error::BadComplexStructure {
                reason: format!("{name} structure must be square of even dimension"),
            });
        }
        let n = j.nrows();
        let dev = (j * j + DMatrix::<f64>::identity(n, n))
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if dev > 1e-9 {
            return Err(Error::BadComplexStructure {
                reason: format!("{name} structure deviates from J² = −𝟙 by {dev:.3e}"),
            });
        }
        if !is_symplectic(j, 1e-9)? {
            return Err(Error::BadComplexStructure {
                reason: format!("{name} structure does not preserve the form"),
            });
        }
    }
    if j_a.nrows() != j_b.nrows() {
        return Err(Error::Unsupported(format!(
            "structures have different dimensions: {} vs {}",
            j_a.nrows(),
            j_b.nrows()
        )));
    }
    let head: f64 = (j_a - j_b).iter().map(|x| x * x).sum();
    let d = j_a.nrows() as u32 / 2;
    let sum = SumOutcome::exactly(head).plus(&tail_sum(rule, d + 1)?);
    Ok(verdict_from(sum, "fock_pair", vec![head]))
}

/// Integral bracket for the scaling family a_k = 1 + c·k^(−q): the
/// per-mode Hilbert–Schmidt term (a_k − 1)² + (1/a_k − 1)² lies between
/// c²k^(−2q) and 2c²k^(−2q) once a_k ≥ 1, so the series converges
/// exactly when 2q > 1.
pub fn scaling_tail_bounds(c: f64, q: f64) -> (TailRule, TailRule) {
    (
        TailRule::PowerLaw {
            c: c * c,
            p: 2.0 * q,
        },
        TailRule::PowerLaw {
            c: 2.0 * c * c,
            p: 2.0 * q,
        },
    )
}

/// A domain-membership query: either a concrete finite vector or a
/// spread-out profile giving squared coefficients per mode.
#[derive(Clone, PartialEq, Debug)]
pub enum DomainQuery {
    /// A finitely supported vector, given exactly.
    Finite(HVector<f64>),
    /// Squared coefficients |g_k|² + |h_k|² as a per-mode family.
    Spread(TailFamily),
}

/// Outcome of a maximal-domain membership test.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct DomainVerdict {
    /// Whether the queried vector lies in the maximal domain.
    pub contained: bool,
    /// The controlling series: Σ_k q_k·(1 + ‖ΛJe_k‖²) with q_k the
    /// squared coefficient weight of mode k.
    pub series: SumOutcome,
    /// What was summed.
    pub evidence: String,
}

/// Test whether a vector lies in the maximal domain of the twisted
/// field. The controlling series is Σ_k q_k·(1 + ‖ΛJe_k‖²), where q_k
/// is the squared coefficient weight of mode k in the query: membership
/// needs the vector itself square-summable and its pairing with the
/// image norms summable. A finite query terminates the series exactly.
/// A spread query multiplies two declared tails, so the map's norm
/// series tail must be declared (`lambda_rule`) unless the query's own
/// tail already vanishes.
pub fn lambda_max_contains(
    lambda: &LambdaMap<f64>,
    query: &DomainQuery,
    lambda_rule: Option<&TailRule>,
) -> Result<DomainVerdict> {
    let norm_sq_of = |k: u32| -> f64 {
        let v = lambda.v_image(k);
        v * v + lambda.jv_image(k).norm_squared()
    };
    match query {
        DomainQuery::Finite(f) => {
            // Finitely many nonzero coefficients: the series is a finite
            // sum no matter how the map's norms behave beyond them.
            let mut total = 0.0f64;
            let mut modes = 0u32;
            for (k, &g) in f.v_part.iter() {
                total += g * g * (1.0 + norm_sq_of(k));
                modes += 1;
            }
            for (k, &h) in f.jv_part.iter() {
                total += h * h * (1.0 + norm_sq_of(k));
                modes += 1;
            }
            Ok(DomainVerdict {
                contained: true,
                series: SumOutcome::exactly(total),
                evidence: format!(
                    "finite query: Σ q_k·(1 + ‖ΛJe_k‖²) over {modes} coefficient entries = {total:.6e}"
                ),
            })
        }
        DomainQuery::Spread(family) => {
            // Explicit head: exact terms against stored map norms.
            let mut head = 0.0f64;
            for (i, &qk) in family.explicit.iter().enumerate() {
                if !qk.is_finite() || qk < 0.0 {
                    return Err(Error::Model(format!(
                        "query weight for mode {} must be finite and nonnegative, got {qk}",
                        i + 1
                    )));
                }
                head += qk * (1.0 + norm_sq_of(i as u32 + 1));
            }
            let k0 = family.explicit.len() as u32 + 1;
            // The tail needs q alone (vector membership) and q·λ (the
            // pairing with the image norms).
            let q_tail = tail_sum(&family.rule, k0)?;
            let product_tail = match (&family.rule, lambda_rule) {
                (TailRule::Zero, _) => SumOutcome::exactly(0.0),
                (_, None) => {
                    return Err(Error::MissingTail {
                        what: "the map's norm series beyond its stored modes".into(),
                    })
                }
                (TailRule::PowerLaw { c: cq, p: pq }, Some(rule)) => match rule {
                    TailRule::Zero => SumOutcome::exactly(0.0),
                    TailRule::PowerLaw { c: cl, p: pl } => tail_sum(
                        &TailRule::PowerLaw {
                            c: cq * cl,
                            p: pq + pl,
                        },
                        k0,
                    )?,
                    TailRule::CustomSummable { summable } => {
                        // Bounded q-weights times a summable norm series.
                        rule.validate()?;
                        if *summable && q_tail.converges {
                            SumOutcome {
                                converges: true,
                                lower: 0.0,
                                upper: f64::INFINITY,
                            }
                        } else {
                            SumOutcome::diverges()
                        }
                    }
                },
                (TailRule::CustomSummable { summable }, Some(rule)) => {
                    rule.validate()?;
                    let lambda_ok = !matches!(rule, TailRule::CustomSummable { summable: false });
                    if *summable && lambda_ok {
                        SumOutcome {
                            converges: true,
                            lower: 0.0,
                            upper: f64::INFINITY,
                        }
                    } else {
                        SumOutcome::diverges()
                    }
                }
            };
            let series = SumOutcome::exactly(head).plus(&q_tail).plus(&product_tail);
            Ok(DomainVerdict {
                contained: series.converges,
                series,
                evidence: format!(
                    "spread query: head {head:.6e} over {} stored modes, query tail {:?}, map tail {:?}",
                    family.explicit.len(),
                    family.rule,
                    lambda_rule
                ),
            })
        }
    }
}
