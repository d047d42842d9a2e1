//! Named verification suites and machine-readable reports.
//!
//! A suite takes a validated model file and produces a list of check
//! records; every record carries a `citation` key resolving against the
//! shipped theorem map (`docs/theorem_map.md`), the scalar backend the
//! check ran on, and its evidence. Reports are deterministic: the same
//! model, seed, and flags produce byte-identical JSON. Wall-clock timings
//! are recorded only when explicitly requested, because they would break
//! that contract.
//!
//! Verdict strings: boolean checks use `pass`/`fail` (with `error` when
//! the computation itself was refused and `not_run` when a prerequisite
//! failed); classification checks record the classification itself
//! (`quasi_equivalent`, `not_quasi_equivalent`, `contained`,
//! `not_contained`) and count as passed — a negative classification is a
//! successful check. Failed records sort first.

use crate::equivalence::{
    classify_coherent_shift, classify_vs_fock, classify_vs_quasifree, fock_pair_equivalence,
    lambda_max_contains, DomainQuery, SumOutcome, Verdict,
};
use crate::error::{Error, Result};
use crate::fock::HVector;
use crate::generator::{build_generator_symmetric, conjugation_evidence, verify_gradient};
use crate::index::MultiIndex;
use crate::lambda::{
    band_profile, curl_check_all, decompose_parts, lambda_from_tensors, standard_form,
    transformed_field, validate_ccr, LambdaMap,
};
use crate::model::ModelFile;
use crate::quadrature::quadrature_eval;
use crate::scalar::{ExactC, Scalar};
use crate::symplectic::{
    build_t_from_metric, induced_symplectic, inverse_adjoint_check, is_symplectic, jmat,
    linear_lambda_from_s, omega, quasifree_char, random_symplectic, s_from_linear_lambda,
    QuasifreeSpec,
};
use crate::truncation::{
    interior_ccr_residual, multiplication_consistency_residual, truncate_field, vacuum_expectation,
    verify_weyl_relation, weyl_matrix, TruncationScheme,
};
use crate::wick::WickPolynomial;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Valid suite names, in canonical order.
pub const SUITE_NAMES: &[&str] = &[
    "ccr",
    "standard_form",
    "generator",
    "weyl",
    "symplectic",
    "equivalence",
    "all",
];

/// Every citation key a record may carry. Each must resolve against the
/// shipped theorem map.
pub const CITATION_KEYS: &[&str] = &[
    "wick-norm-identity",
    "wick-product-expansion",
    "quadrature-cross-check",
    "ccr-admissibility-symmetry",
    "ccr-curl-criterion",
    "transformed-field-commutator",
    "standard-form-decomposition",
    "band-structure-window",
    "generator-gradient",
    "generator-norm-bound",
    "generator-conjugation",
    "truncation-consistency",
    "weyl-vacuum-gaussian",
    "weyl-composition-relation",
    "symplectic-form-preservation",
    "symplectic-inverse-adjoint",
    "metric-square-root",
    "symplectic-shear-linear-map",
    "quasifree-characteristic",
    "hs-equivalence-fock",
    "hs-coherent-shift",
    "hs-quasifree-comparison",
    "hs-structure-pair",
    "maximal-domain-membership",
];

/// The theorem map shipped with the library, embedded at compile time so
/// citation resolution needs no runtime file access.
pub const THEOREM_MAP: &str = include_str!("../../../docs/theorem_map.md");

/// A named verification suite.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Suite {
    /// Admissibility, curl agreement, transformed-field commutators, and
    /// the quadrature cross-check of image norms.
    Ccr,
    /// Layer decomposition, tensor roundtrip, and the band window.
    StandardForm,
    /// Gradient identity, norm bound, and truncated conjugation evidence.
    Generator,
    /// Truncated-matrix residuals: interior commutators, the vacuum
    /// Gaussian, and the composition relation.
    Weyl,
    /// Form preservation, the inverse-adjoint characterization, metric
    /// square roots, and the linear-map correspondence.
    Symplectic,
    /// Hilbert–Schmidt classifiers with declared tails.
    Equivalence,
    /// All of the above, in order.
    All,
}

impl Suite {
    /// Parse a suite name.
    pub fn parse(name: &str) -> Result<Suite> {
        match name {
            "ccr" => Ok(Suite::Ccr),
            "standard_form" => Ok(Suite::StandardForm),
            "generator" => Ok(Suite::Generator),
            "weyl" => Ok(Suite::Weyl),
            "symplectic" => Ok(Suite::Symplectic),
            "equivalence" => Ok(Suite::Equivalence),
            "all" => Ok(Suite::All),
            other => Err(Error::Unsupported(format!(
                "unknown suite {other:?}; valid names: {}",
                SUITE_NAMES.join(", ")
            ))),
        }
    }

    /// Canonical name.
    pub fn name(self) -> &'static str {
        match self {
            Suite::Ccr => "ccr",
            Suite::StandardForm => "standard_form",
            Suite::Generator => "generator",
            Suite::Weyl => "weyl",
            Suite::Symplectic => "symplectic",
            Suite::Equivalence => "equivalence",
            Suite::All => "all",
        }
    }

    /// The concrete suites this one expands to.
    pub fn components(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Ccr,
                Suite::StandardForm,
                Suite::Generator,
                Suite::Weyl,
                Suite::Symplectic,
                Suite::Equivalence,
            ],
            s => vec![s],
        }
    }
}

/// One executed check.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Stable identifier of the check.
    pub check_id: String,
    /// Key into the shipped theorem map.
    pub citation: String,
    /// Outcome: pass/fail/error/not_run or a classification string.
    pub verdict: String,
    /// Whether the check counts as passed for the exit status.
    pub passed: bool,
    /// Scalar backend the check ran on.
    pub backend: String,
    /// Numbers and context behind the verdict.
    pub evidence: String,
    /// Wall-clock milliseconds; zero unless timings were requested.
    pub runtime_ms: u64,
}

/// Pass/fail counts.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Summary {
    /// Number of records.
    pub total: usize,
    /// Records with `passed == true`.
    pub passed: usize,
    /// Records with `passed == false`.
    pub failed: usize,
}

/// A full report: library version, suite, seed, counts, and the records
/// with failures first.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Report {
    /// Library version that produced the report.
    pub version: String,
    /// Suite name (or `+`-joined names when driven by the model file).
    pub suite: String,
    /// Seed used for every randomized check.
    pub seed: u64,
    /// Pass/fail counts.
    pub summary: Summary,
    /// The records, failures first, otherwise in execution order.
    pub records: Vec<CheckRecord>,
}

/// Execution options shared by all suites.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct RunOptions {
    /// Seed for randomized checks.
    pub seed: u64,
    /// Override of the model's truncation cutoff.
    pub cutoff: Option<u32>,
    /// Record wall-clock timings (breaks byte-determinism of reruns).
    pub timings: bool,
    /// Degree cap for exact products.
    pub degree_cap: u32,
    /// Node budget per mode for the quadrature oracle.
    pub node_budget: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: crate::DEFAULT_SEED,
            cutoff: None,
            timings: false,
            degree_cap: crate::DEFAULT_DEGREE_CAP,
            node_budget: crate::DEFAULT_NODE_BUDGET,
        }
    }
}

/// Run one suite (or `all`) against a model.
pub fn run_suite(model: &ModelFile, suite: Suite, opts: &RunOptions) -> Result<Report> {
    let mut records = Vec::new();
    for component in suite.components() {
        run_component(model, component, opts, &mut records)?;
    }
    Ok(assemble_report(suite.name(), opts.seed, records))
}

/// Run the named suites (the model's own list when `names` is empty).
pub fn run_named(model: &ModelFile, names: &[String], opts: &RunOptions) -> Result<Report> {
    let names: Vec<String> = if names.is_empty() {
        model.suites.clone()
    } else {
        names.to_vec()
    };
    let mut records = Vec::new();
    let mut seen = Vec::new();
    for name in &names {
        for component in Suite::parse(name)?.components() {
            if !seen.contains(&component) {
                seen.push(component);
                run_component(model, component, opts, &mut records)?;
            }
        }
    }
    Ok(assemble_report(&names.join("+"), opts.seed, records))
}

/// Assemble a report: stable-sort failures first and count.
pub fn assemble_report(suite: &str, seed: u64, mut records: Vec<CheckRecord>) -> Report {
    records.sort_by_key(|r| r.passed);
    let passed = records.iter().filter(|r| r.passed).count();
    Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        suite: suite.to_string(),
        seed,
        summary: Summary {
            total: records.len(),
            passed,
            failed: records.len() - passed,
        },
        records,
    }
}

/// Serialize a report as pretty JSON with stable field order.
pub fn emit_json(report: &Report) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serialization is total");
    out.push('\n');
    out
}

/// Human summary of the JSON report.
pub fn emit_text(report: &Report) -> String {
    let mut out = format!(
        "wicklab report — suite {}, seed {}, version {}\n{}/{} checks passed, {} failed\n",
        report.suite,
        report.seed,
        report.version,
        report.summary.passed,
        report.summary.total,
        report.summary.failed,
    );
    for r in &report.records {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{tag} {} [{}] {} — {}\n",
            r.check_id, r.citation, r.verdict, r.evidence
        ));
    }
    out
}

// ---------------------------------------------------------------------
// Suite implementations
// ---------------------------------------------------------------------

fn run_component(
    model: &ModelFile,
    suite: Suite,
    opts: &RunOptions,
    out: &mut Vec<CheckRecord>,
) -> Result<()> {
    match suite {
        Suite::Ccr => suite_ccr(model, opts, out),
        Suite::StandardForm => suite_standard_form(model, opts, out),
        Suite::Generator => suite_generator(model, opts, out),
        Suite::Weyl => suite_weyl(model, opts, out),
        Suite::Symplectic => suite_symplectic(model, opts, out),
        Suite::Equivalence => suite_equivalence(model, opts, out),
        Suite::All => unreachable!("expanded by components()"),
    }
}

struct Check<'a> {
    out: &'a mut Vec<CheckRecord>,
    timings: bool,
}

impl<'a> Check<'a> {
    fn push(
        &mut self,
        check_id: &str,
        citation: &str,
        backend: &str,
        body: impl FnOnce() -> (bool, String, String),
    ) {
        debug_assert!(
            CITATION_KEYS.contains(&citation),
            "unregistered citation {citation}"
        );
        let start = Instant::now();
        let (passed, verdict, evidence) = body();
        self.out.push(CheckRecord {
            check_id: check_id.to_string(),
            citation: citation.to_string(),
            verdict,
            passed,
            backend: backend.to_string(),
            evidence,
            runtime_ms: if self.timings {
                start.elapsed().as_millis() as u64
            } else {
                0
            },
        });
    }
}

fn pass_fail(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

fn fmt_outcome(sum: &SumOutcome) -> String {
    format!(
        "converges={}, enclosure=[{:.6e}, {:.6e}]",
        sum.converges, sum.lower, sum.upper
    )
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Equivalent => "quasi_equivalent",
        Verdict::Inequivalent => "not_quasi_equivalent",
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// A small random polynomial with exact rational coefficients.
fn random_probe(rng: &mut ChaCha8Rng, modes: &[u32], degree: u32) -> WickPolynomial<ExactC> {
    let mut poly = WickPolynomial::zero();
    for _ in 0..3 {
        let d = rng.gen_range(0..=degree);
        let mut idx = MultiIndex::empty();
        for _ in 0..d {
            idx = idx.raised(modes[rng.gen_range(0..modes.len())]);
        }
        poly.add_term(
            idx,
            <ExactC as Scalar>::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4)),
        );
    }
    poly
}

/// Leading modes of a map (at least mode 1), capped for cost control.
fn leading_modes<S: Scalar>(lambda: &LambdaMap<S>, cap: usize) -> Vec<u32> {
    let modes: Vec<u32> = lambda.involved_modes().into_iter().take(cap).collect();
    if modes.is_empty() {
        vec![1]
    } else {
        modes
    }
}

fn suite_ccr(model: &ModelFile, opts: &RunOptions, out: &mut Vec<CheckRecord>) -> Result<()> {
    let mut check = Check {
        out,
        timings: opts.timings,
    };
    let lambda: LambdaMap<ExactC> = model.lambda_map()?;
    let admissible = validate_ccr(&lambda);

    check.push(
        "ccr_admissible",
        "ccr-admissibility-symmetry",
        "exact-complex",
        || {
            let evidence = match &admissible.witness {
                Some(w) => format!("witness: {w}"),
                None => format!(
                    "head-swap equalities hold at every degree up to {}",
                    lambda.degree()
                ),
            };
            (admissible.valid, pass_fail(admissible.valid), evidence)
        },
    );

    check.push(
        "ccr_curl_agreement",
        "ccr-curl-criterion",
        "exact-complex",
        || {
            let curl = curl_check_all(&lambda);
            let agree = curl == admissible.valid;
            (
                agree,
                pass_fail(agree),
                format!("validate_ccr: {}, curl_check: {curl}", admissible.valid),
            )
        },
    );

    check.push(
        "ccr_transformed_commutator",
        "transformed-field-commutator",
        "exact-complex",
        || {
            if !admissible.valid {
                return (
                    false,
                    "not_run".to_string(),
                    "map is not admissible; the commutator identity was not attempted".to_string(),
                );
            }
            let modes = leading_modes(&lambda, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut probes = vec![WickPolynomial::<ExactC>::one()];
            for &m in &modes {
                probes.push(WickPolynomial::x(m));
            }
            probes.push(random_probe(&mut rng, &modes, 2));
            let mut vectors = Vec::new();
            for &m in &modes {
                vectors.push(HVector::<ExactC>::e(m));
                vectors.push(HVector::<ExactC>::je(m));
            }
            let i_unit = <ExactC as Scalar>::imag_unit().expect("complex backend");
            let mut checked = 0usize;
            for a in 0..vectors.len() {
                for b in (a + 1)..vectors.len() {
                    let (f, g) = (&vectors[a], &vectors[b]);
                    let sigma = f.sigma_form(g);
                    for p in &probes {
                        let fg = transformed_field(&lambda, g, p, opts.degree_cap)
                            .and_then(|q| transformed_field(&lambda, f, &q, opts.degree_cap));
                        let gf = transformed_field(&lambda, f, p, opts.degree_cap)
                            .and_then(|q| transformed_field(&lambda, g, &q, opts.degree_cap));
                        match (fg, gf) {
                            (Ok(x), Ok(y)) => {
                                let commutator = &x - &y;
                                let rhs = p.scale(&(i_unit * sigma));
                                if commutator != rhs {
                                    return (
                                        false,
                                        "fail".to_string(),
                                        format!(
                                            "commutator deviates from i·σ(f,g)·𝟙 on pair ({a},{b})"
                                        ),
                                    );
                                }
                                checked += 1;
                            }
                            (Err(e), _) | (_, Err(e)) => {
                                return (false, "error".to_string(), e.to_string());
                            }
                        }
                    }
                }
            }
            (
                true,
                "pass".to_string(),
                format!("[Φ_Λ(f),Φ_Λ(g)] = i·σ(f,g)·𝟙 exactly on {checked} (pair, probe) cases"),
            )
        },
    );

    // Norm identity and quadrature cross-check on the stored images plus
    // one seeded random polynomial.
    let mut norm_targets: Vec<WickPolynomial<ExactC>> = lambda
        .jv_modes()
        .collect::<Vec<_>>()
        .into_iter()
        .map(|k| lambda.jv_image(k))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    norm_targets.push(random_probe(&mut rng, &leading_modes(&lambda, 3), 3));

    check.push(
        "wick_norm_identity",
        "wick-norm-identity",
        "exact-complex",
        || {
            let all = norm_targets
                .iter()
                .all(|p| p.norm_squared() == p.inner_product(p));
            (
                all,
                pass_fail(all),
                format!(
                    "norm_squared equals inner_product(F,F) exactly on {} polynomials",
                    norm_targets.len()
                ),
            )
        },
    );

    check.push(
        "norm_quadrature_agreement",
        "quadrature-cross-check",
        "c64",
        || {
            let mut worst = 0.0f64;
            for p in &norm_targets {
                match quadrature_eval(&p.conj(), p, opts.node_budget) {
                    Ok(quad) => {
                        let exact = p.norm_squared().to_c64();
                        worst = worst.max((quad - exact).norm());
                    }
                    Err(e) => return (false, "error".to_string(), e.to_string()),
                }
            }
            let ok = worst <= 1e-9;
            (
                ok,
                pass_fail(ok),
                format!(
                    "max |quadrature − exact| = {worst:.3e} over {} norms (budget {} nodes/mode)",
                    norm_targets.len(),
                    opts.node_budget
                ),
            )
        },
    );

    Ok(())
}

fn suite_standard_form(
    model: &ModelFile,
    opts: &RunOptions,
    out: &mut Vec<CheckRecord>,
) -> Result<()> {
    let mut check = Check {
        out,
        timings: opts.timings,
    };
    let lambda: LambdaMap<ExactC> = model.lambda_map()?;
    let parts = decompose_parts(&lambda);

    check.push(
        "decomposition_reassembly",
        "standard-form-decomposition",
        "exact-complex",
        || {
            let reassembled = parts.coherent.add(&parts.linear).add(&parts.higher);
            let ok = reassembled == lambda;
            (
                ok,
                pass_fail(ok),
                format!(
                    "coherent + linear + higher layers reassemble the map; degrees {}/{}/{}",
                    parts.coherent.degree(),
                    parts.linear.degree(),
                    parts.higher.degree()
                ),
            )
        },
    );

    check.push(
        "standard_form_roundtrip",
        "standard-form-decomposition",
        "exact-complex",
        || match standard_form(&lambda) {
            Ok(form) => match lambda_from_tensors(&form.tensors) {
                Ok(rebuilt) => {
                    let expected = parts.linear.add(&parts.higher);
                    let ok = rebuilt == expected;
                    (
                        ok,
                        pass_fail(ok),
                        format!(
                            "{} tensor layers (orders {:?}) reproduce the degree-≥1 content exactly",
                            form.tensors.len(),
                            form.tensors.iter().map(|t| t.order).collect::<Vec<_>>()
                        ),
                    )
                }
                Err(e) => (false, "error".to_string(), e.to_string()),
            },
            Err(e) => (false, "error".to_string(), e.to_string()),
        },
    );

    check.push(
        "band_window_vanishing",
        "band-structure-window",
        "exact-complex",
        || {
            let f = HVector::<ExactC>::je(leading_modes(&lambda, 1)[0]);
            let window_slack = lambda.degree().max(1) + 1;
            for m in 0..=2u32 {
                match band_profile(&lambda, &f, m, opts.degree_cap) {
                    Ok(rows) => {
                        for row in rows {
                            if row.input_degree > m + window_slack && !row.block_weight.is_zero() {
                                return (
                                    false,
                                    "fail".to_string(),
                                    format!(
                                        "block (m={m}, k={}) is nonzero outside the band window",
                                        row.input_degree
                                    ),
                                );
                            }
                        }
                    }
                    Err(e) => return (false, "error".to_string(), e.to_string()),
                }
            }
            (
                true,
                "pass".to_string(),
                format!("P_m Φ_Λ(f) P_k = 0 exactly for k > m + {window_slack}, checked for m ≤ 2"),
            )
        },
    );

    Ok(())
}

fn suite_generator(model: &ModelFile, opts: &RunOptions, out: &mut Vec<CheckRecord>) -> Result<()> {
    let mut check = Check {
        out,
        timings: opts.timings,
    };
    let lambda: LambdaMap<ExactC> = model.lambda_map()?;
    let admissible = validate_ccr(&lambda);

    if !admissible.valid {
        let witness = admissible.witness.clone().unwrap_or_default();
        for (id, citation) in [
            ("generator_gradient", "generator-gradient"),
            ("generator_norm_bound", "generator-norm-bound"),
            ("generator_conjugation", "generator-conjugation"),
        ] {
            check.push(id, citation, "exact-complex", || {
                (
                    false,
                    "not_run".to_string(),
                    format!("map is not admissible: {witness}"),
                )
            });
        }
        return Ok(());
    }

    let form = standard_form(&lambda)?;
    let built = build_generator_symmetric(&form.tensors);

    check.push(
        "generator_gradient",
        "generator-gradient",
        "exact-complex",
        || {
            match &built {
                Ok(result) => {
                    // The full potential adds the coherent layer's linear terms.
                    let mut g_full = result.g.clone();
                    for (&k, c) in &form.jv_constants {
                        g_full.add_term(MultiIndex::single(k), *c);
                    }
                    let ok = verify_gradient(&g_full, &lambda);
                    (
                        ok,
                        pass_fail(ok),
                        format!(
                            "∂_k G = ΛJe_k exactly on {} momentum directions",
                            lambda.jv_modes().count().max(1)
                        ),
                    )
                }
                Err(e) => (false, "error".to_string(), e.to_string()),
            }
        },
    );

    check.push(
        "generator_norm_bound",
        "generator-norm-bound",
        "exact-complex",
        || match &built {
            Ok(result) => {
                let g = &result.g_norm_sq.re;
                let bound = &result.bound_norm_sq.re;
                let ok = g <= bound;
                (
                    ok,
                    pass_fail(ok),
                    format!(
                        "‖G‖² = {:.6e} ≤ {:.6e} = (Σ‖ΛJe_k‖²)/2, compared exactly",
                        g.to_f64(),
                        bound.to_f64()
                    ),
                )
            }
            Err(e) => (false, "error".to_string(), e.to_string()),
        },
    );

    check.push("generator_conjugation", "generator-conjugation", "c64", || {
        let lambda64: LambdaMap<f64> = match model.lambda_map() {
            Ok(l) => l,
            Err(e) => return (false, "error".to_string(), e.to_string()),
        };
        let f_mode = leading_modes(&lambda64, 1)[0];
        let f = HVector::<f64>::je(f_mode);
        let max_mode = lambda64
            .involved_modes()
            .into_iter()
            .max()
            .unwrap_or(0)
            .max(f_mode);
        // Dense matrices bound the affordable cutoffs per mode count; the
        // residual magnitude gate applies only where cutoff 80 is reachable.
        let cutoffs: &[u32] = match max_mode {
            0 | 1 => &[20, 40, 80],
            2 => &[12, 24],
            3 => &[6, 10],
            _ => {
                return (
                    false,
                    "error".to_string(),
                    format!(
                        "dense conjugation evidence is limited to 3 modes; the map involves {max_mode}"
                    ),
                )
            }
        };
        let probe = 1;
        match conjugation_evidence(&lambda64, &f, cutoffs, probe) {
            Ok(rows) => {
                let last = rows.last().expect("at least one cutoff").residual;
                let non_increasing = rows.windows(2).all(|w| w[1].residual <= w[0].residual);
                let magnitude_gate = *cutoffs.last().expect("nonempty") >= 80;
                let ok = non_increasing && (!magnitude_gate || last <= 1e-3);
                let table = rows
                    .iter()
                    .map(|r| format!("cutoff {} → {:.3e}", r.cutoff, r.residual))
                    .collect::<Vec<_>>()
                    .join(", ");
                let gate_note = if magnitude_gate {
                    "final ≤ 1e-3 required"
                } else {
                    "decrease required; the magnitude gate needs cutoff 80"
                };
                (ok, pass_fail(ok), format!("probe {probe}: {table}; {gate_note}"))
            }
            Err(e) => (false, "error".to_string(), e.to_string()),
        }
    });

    Ok(())
}

fn suite_weyl(model: &ModelFile, opts: &RunOptions, out: &mut Vec<CheckRecord>) -> Result<()> {
    let mut check = Check {
        out,
        timings: opts.timings,
    };
    let base = model.truncation_scheme()?;
    let scheme = match opts.cutoff {
        Some(c) => TruncationScheme::new(base.modes, c, base.probe.min(c / 4))?,
        None => base,
    };
    let cutoff = scheme.cutoff;

    check.push(
        "weyl_interior_ccr",
        "truncation-consistency",
        "c64",
        || match interior_ccr_residual(&scheme) {
            Ok(r) => {
                let ok = r <= 1e-8;
                (
                    ok,
                    pass_fail(ok),
                    format!("max interior |[Q_k,P_k] − i𝟙| = {r:.3e} at cutoff {cutoff}"),
                )
            }
            Err(e) => (false, "error".to_string(), e.to_string()),
        },
    );

    check.push(
        "weyl_vacuum_gaussian",
        "weyl-vacuum-gaussian",
        "c64",
        || {
            let tol = if cutoff >= 60 {
                1e-8
            } else if cutoff >= 24 {
                1e-5
            } else {
                1e-3
            };
            let mut worst = 0.0f64;
            for t in [0.25f64, 0.5, 1.0, 1.5] {
                let op = match truncate_field(&HVector::<f64>::e(1), &scheme) {
                    Ok(op) => op.scale(Complex64::new(t, 0.0)),
                    Err(e) => return (false, "error".to_string(), e.to_string()),
                };
                match weyl_matrix(&op) {
                    Ok(w) => {
                        let expected = Complex64::new((-t * t / 4.0).exp(), 0.0);
                        worst = worst.max((vacuum_expectation(&w) - expected).norm());
                    }
                    Err(e) => return (false, "error".to_string(), e.to_string()),
                }
            }
            let ok = worst <= tol;
            (
                ok,
                pass_fail(ok),
                format!("max |⟨Ω, e^{{itQ₁}}Ω⟩ − e^(−t²/4)| = {worst:.3e} (tolerance {tol:.0e})"),
            )
        },
    );

    check.push("weyl_composition", "weyl-composition-relation", "c64", || {
        let tol = if cutoff >= 40 {
            1e-6
        } else if cutoff >= 20 {
            1e-4
        } else {
            1e-2
        };
        let f = HVector::<f64>::e(1);
        let g = HVector::<f64>::je(1);
        let mut worst = 0.0f64;
        for t in [0.3f64, 0.7, 1.0] {
            for s in [0.3f64, 0.7, 1.0] {
                match verify_weyl_relation(&f, &g, t, s, &scheme) {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => return (false, "error".to_string(), e.to_string()),
                }
            }
        }
        let ok = worst <= tol;
        (
            ok,
            pass_fail(ok),
            format!(
                "max probe residual of W(tf)W(sg) − e^(−itsσ/2)W(tf+sg) = {worst:.3e} (tolerance {tol:.0e})"
            ),
        )
    });

    check.push(
        "weyl_truncation_consistency",
        "truncation-consistency",
        "c64",
        || {
            let lambda: LambdaMap<Complex64> = match model.lambda_map() {
                Ok(l) => l,
                Err(e) => return (false, "error".to_string(), e.to_string()),
            };
            let candidate = lambda
                .jv_modes()
                .collect::<Vec<_>>()
                .into_iter()
                .map(|k| lambda.jv_image(k))
                .find(|p| {
                    let deg = p.degree();
                    deg >= 1
                        && deg < cutoff
                        && p.support_modes().iter().max().copied().unwrap_or(1) <= scheme.modes
                });
            let poly = candidate.unwrap_or_else(|| {
                let deg = if cutoff > 2 { 2 } else { 1 };
                WickPolynomial::monomial(
                    MultiIndex::from_pairs([(1u32, deg)]),
                    Complex64::new(1.0, 0.0),
                )
            });
            match multiplication_consistency_residual(&poly, &scheme) {
                Ok(r) => {
                    let ok = r <= 1e-9;
                    (
                        ok,
                        pass_fail(ok),
                        format!(
                            "probe-block deviation of the truncated multiplication from the exact \
                         matrix elements: {r:.3e} (degree {})",
                            poly.degree()
                        ),
                    )
                }
                Err(e) => (false, "error".to_string(), e.to_string()),
            }
        },
    );

    Ok(())
}

fn linear_layer_matrix(lambda: &LambdaMap<f64>) -> (usize, DMatrix<f64>) {
    let d = lambda
        .involved_modes()
        .into_iter()
        .max()
        .unwrap_or(0)
        .max(1) as usize;
    let mut s = DMatrix::zeros(d, d);
    for k in 1..=d as u32 {
        let image = lambda.jv_image(k);
        for j in 1..=d as u32 {
            s[((j - 1) as usize, (k - 1) as usize)] = image.coefficient(&MultiIndex::single(j));
        }
    }
    (d, s)
}

fn coherent_vector(lambda: &LambdaMap<f64>) -> DVector<f64> {
    let d = lambda
        .involved_modes()
        .into_iter()
        .max()
        .unwrap_or(0)
        .max(1) as usize;
    let mut l = DVector::zeros(2 * d);
    for k in 1..=d as u32 {
        l[(k - 1) as usize] = lambda.v_image(k);
        l[(d as u32 + k - 1) as usize] = lambda.jv_image(k).coefficient(&MultiIndex::empty());
    }
    l
}

fn suite_symplectic(
    model: &ModelFile,
    opts: &RunOptions,
    out: &mut Vec<CheckRecord>,
) -> Result<()> {
    let mut check = Check {
        out,
        timings: opts.timings,
    };
    let spec = model.quasifree()?;
    let lambda64: Option<LambdaMap<f64>> = model.lambda_map().ok();

    // The reference map: the model's quasifree T when present, otherwise
    // the shear induced by the map's linear layer.
    let t_mat: DMatrix<f64> = match (&spec, &lambda64) {
        (Some(s), _) => s.t.clone(),
        (None, Some(l)) => {
            let (_, s_mat) = linear_layer_matrix(l);
            induced_symplectic(&s_mat)
        }
        (None, None) => DMatrix::identity(2, 2),
    };
    let d = t_mat.nrows() / 2;

    check.push(
        "symplectic_form_preservation",
        "symplectic-form-preservation",
        "f64",
        || {
            let om = omega(d);
            let dev = max_abs(&(t_mat.transpose() * &om * &t_mat - &om));
            let ok = dev <= 1e-9;
            (
                ok,
                pass_fail(ok),
                format!(
                    "max |TᵀΩT − Ω| = {dev:.3e} on the {}-dimensional doubled space",
                    2 * d
                ),
            )
        },
    );

    check.push(
        "symplectic_inverse_adjoint",
        "symplectic-inverse-adjoint",
        "f64",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut samples: Vec<DMatrix<f64>> = vec![t_mat.clone()];
            for dim in 1..=3usize {
                for _ in 0..5 {
                    let t = random_symplectic(&mut rng, dim);
                    let mut broken = t.clone();
                    broken[(0, 0)] += 0.37;
                    samples.push(t);
                    samples.push(broken);
                }
            }
            let mut agreed = 0usize;
            for t in &samples {
                let by_form = match is_symplectic(t, 1e-9) {
                    Ok(v) => v,
                    Err(e) => return (false, "error".to_string(), e.to_string()),
                };
                match inverse_adjoint_check(t, 1e-9) {
                    Ok(by_inverse) => {
                        if by_inverse != by_form {
                            return (
                                false,
                                "fail".to_string(),
                                "the two symplecticity characterizations disagree".to_string(),
                            );
                        }
                        agreed += 1;
                    }
                    // A perturbation may render the matrix singular; the
                    // inverse-based test is then undefined, not in conflict.
                    Err(Error::SingularMatrix) => {}
                    Err(e) => return (false, "error".to_string(), e.to_string()),
                }
            }
            (
                true,
                "pass".to_string(),
                format!("−J·T⁻¹·J = Tᵀ agreed with TᵀΩT = Ω on {agreed} matrices"),
            )
        },
    );

    check.push(
        "metric_square_root_roundtrip",
        "metric-square-root",
        "f64",
        || {
            let m = t_mat.transpose() * &t_mat;
            let jp = jmat(d) * &m;
            match build_t_from_metric(&m, &jp) {
                Ok(root) => {
                    let dev = max_abs(&(root.transpose() * &root - &m));
                    let ok = dev <= 1e-9;
                    (
                        ok,
                        pass_fail(ok),
                        format!("T = M^(1/2) reproduces the metric: max |TᵀT − M| = {dev:.3e}"),
                    )
                }
                Err(e) => (false, "error".to_string(), e.to_string()),
            }
        },
    );

    check.push(
        "symplectic_linear_roundtrip",
        "symplectic-shear-linear-map",
        "f64",
        || {
            let lambda = match &lambda64 {
                Some(l) => l,
                None => {
                    return (
                        false,
                        "error".to_string(),
                        "the map's coefficients do not fit the real backend".to_string(),
                    )
                }
            };
            let parts = decompose_parts(lambda);
            let low = parts.coherent.add(&parts.linear);
            if low.is_zero() {
                return (
                    true,
                    "pass".to_string(),
                    "the map has no constant or linear layer; nothing to roundtrip".to_string(),
                );
            }
            match s_from_linear_lambda(&low) {
                Ok((s_mat, l_vec)) => match linear_lambda_from_s(&s_mat, &l_vec) {
                    Ok(back) => {
                        let ok = back == low;
                        (
                            ok,
                            pass_fail(ok),
                            format!(
                                "matrix/functional roundtrip is bit-exact on {} modes",
                                s_mat.nrows()
                            ),
                        )
                    }
                    Err(e) => (false, "error".to_string(), e.to_string()),
                },
                Err(e) => (false, "error".to_string(), e.to_string()),
            }
        },
    );

    if let Some(spec) = &spec {
        check.push(
            "quasifree_character_modulus",
            "quasifree-characteristic",
            "c64",
            || {
                let n = spec.t.nrows();
                let mut f = DVector::zeros(n);
                f[0] = 1.0;
                let no_shift = QuasifreeSpec {
                    t: spec.t.clone(),
                    l: DVector::zeros(n),
                };
                match (quasifree_char(spec, &f), quasifree_char(&no_shift, &f)) {
                    (Ok(with_l), Ok(without_l)) => {
                        let tf = &spec.t * &f;
                        let expected = (-tf.dot(&tf) / 4.0).exp();
                        let dev = (with_l.norm() - expected)
                            .abs()
                            .max((without_l.norm() - expected).abs());
                        let ok = dev <= 1e-12;
                        (
                            ok,
                            pass_fail(ok),
                            format!(
                                "|char| = e^(−s(Tf,Tf)/4) to {dev:.3e}; the shift only rotates the phase"
                            ),
                        )
                    }
                    (Err(e), _) | (_, Err(e)) => (false, "error".to_string(), e.to_string()),
                }
            },
        );
    }

    Ok(())
}

fn suite_equivalence(
    model: &ModelFile,
    opts: &RunOptions,
    out: &mut Vec<CheckRecord>,
) -> Result<()> {
    let mut check = Check {
        out,
        timings: opts.timings,
    };
    let lambda64: LambdaMap<f64> = match model.lambda_map() {
        Ok(l) => l,
        Err(e) => {
            let msg = e.to_string();
            check.push("equivalence_vs_fock", "hs-equivalence-fock", "f64", || {
                (false, "error".to_string(), msg.clone())
            });
            return Ok(());
        }
    };
    let rule = model.lambda_tail_rule();

    check.push(
        "equivalence_vs_fock",
        "hs-equivalence-fock",
        "f64",
        || match classify_vs_fock(&lambda64, &rule) {
            Ok(v) => (
                true,
                verdict_name(v.verdict).to_string(),
                format!(
                    "{}; {} head terms",
                    fmt_outcome(&v.hs_value),
                    v.evidence.len()
                ),
            ),
            Err(e) => (false, "error".to_string(), e.to_string()),
        },
    );

    check.push(
        "equivalence_coherent_shift",
        "hs-coherent-shift",
        "f64",
        || {
            let l = coherent_vector(&lambda64);
            match classify_coherent_shift(&l, None, &model.tail.rule) {
                Ok(v) => (
                    true,
                    verdict_name(v.verdict).to_string(),
                    fmt_outcome(&v.hs_value),
                ),
                Err(e) => (false, "error".to_string(), e.to_string()),
            }
        },
    );

    let spec = model.quasifree()?;
    if let Some(spec) = &spec {
        check.push(
            "equivalence_vs_quasifree",
            "hs-quasifree-comparison",
            "f64",
            || match classify_vs_quasifree(&lambda64, &rule, spec) {
                Ok(v) => (
                    true,
                    verdict_name(v.verdict).to_string(),
                    format!(
                        "{}; {} head terms",
                        fmt_outcome(&v.hs_value),
                        v.evidence.len()
                    ),
                ),
                Err(e) => (false, "error".to_string(), e.to_string()),
            },
        );

        check.push(
            "equivalence_structure_pair",
            "hs-structure-pair",
            "f64",
            || {
                let d = spec.t.nrows() / 2;
                let m = spec.t.transpose() * &spec.t;
                let jp = jmat(d) * &m;
                match fock_pair_equivalence(&jmat(d), &jp, &model.tail.rule) {
                    Ok(v) => (
                        true,
                        verdict_name(v.verdict).to_string(),
                        fmt_outcome(&v.hs_value),
                    ),
                    Err(e) => (false, "error".to_string(), e.to_string()),
                }
            },
        );
    }

    check.push(
        "domain_membership",
        "maximal-domain-membership",
        "f64",
        || {
            let query = DomainQuery::Finite(HVector::<f64>::je(1));
            match lambda_max_contains(&lambda64, &query, Some(&rule)) {
                Ok(v) => (
                    true,
                    if v.contained {
                        "contained"
                    } else {
                        "not_contained"
                    }
                    .to_string(),
                    format!("{}; {}", fmt_outcome(&v.series), v.evidence),
                ),
                Err(e) => (false, "error".to_string(), e.to_string()),
            }
        },
    );

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{TailFamily, TailRule};
    use crate::model::{LambdaWire, MatrixWire, PolyWire, QuasifreeWire, TermWire, TruncationWire};

    fn poly(terms: &[(&[(u32, u32)], f64)]) -> PolyWire {
        PolyWire {
            terms: terms
                .iter()
                .map(|(modes, re)| TermWire {
                    modes: modes.to_vec(),
                    re: *re,
                    im: 0.0,
                })
                .collect(),
        }
    }

    /// The closure pair ΛJe₁ = :x₂²:, ΛJe₂ = 2:x₁x₂: with a quasifree block.
    fn sample_model() -> ModelFile {
        ModelFile {
            lambda: LambdaWire {
                degree: 2,
                v: vec![],
                jv: vec![
                    (1, poly(&[(&[(2, 2)], 1.0)])),
                    (2, poly(&[(&[(1, 1), (2, 1)], 2.0)])),
                ],
                tail: None,
            },
            tail: TailFamily {
                explicit: vec![],
                rule: TailRule::Zero,
            },
            quasifree_spec: Some(QuasifreeWire {
                t: MatrixWire {
                    basis: "q-then-p".to_string(),
                    rows: 2,
                    cols: 2,
                    data: vec![2.0, 0.0, 0.0, 0.5],
                },
                l: vec![0.0, 0.0],
            }),
            truncation: TruncationWire {
                modes: 2,
                cutoff: 12,
                probe: 3,
            },
            suites: vec!["ccr".to_string(), "equivalence".to_string()],
        }
    }

    /// A single-mode cubic-generator model for the heavier suites.
    fn single_mode_model() -> ModelFile {
        ModelFile {
            lambda: LambdaWire {
                degree: 2,
                v: vec![],
                jv: vec![(1, poly(&[(&[(1, 2)], 1.0)]))],
                tail: None,
            },
            tail: TailFamily {
                explicit: vec![],
                rule: TailRule::Zero,
            },
            quasifree_spec: None,
            truncation: TruncationWire {
                modes: 1,
                cutoff: 24,
                probe: 3,
            },
            suites: vec!["all".to_string()],
        }
    }

    /// An asymmetric linear map: jv₁ = :x₂: without the matching partner.
    fn broken_model() -> ModelFile {
        let mut model = sample_model();
        model.lambda.degree = 1;
        model.lambda.jv = vec![(1, poly(&[(&[(2, 1)], 1.0)]))];
        model
    }

    #[test]
    fn every_citation_key_resolves_against_the_theorem_map() {
        for key in CITATION_KEYS {
            assert!(
                THEOREM_MAP.contains(&format!("`{key}`")),
                "citation key {key} missing from the theorem map"
            );
        }
        // Suite names and parse agree.
        for name in SUITE_NAMES {
            assert_eq!(Suite::parse(name).unwrap().name(), *name);
        }
        assert!(Suite::parse("everything").is_err());
        assert_eq!(Suite::All.components().len(), 6);
    }

    #[test]
    fn ccr_suite_passes_on_the_closure_pair() {
        let model = sample_model();
        model.validate().unwrap();
        let report = run_suite(&model, Suite::Ccr, &RunOptions::default()).unwrap();
        assert_eq!(report.summary.failed, 0, "records: {:#?}", report.records);
        assert_eq!(report.summary.total, 5);
        for r in &report.records {
            assert!(CITATION_KEYS.contains(&r.citation.as_str()));
            assert_eq!(r.runtime_ms, 0);
        }
    }

    #[test]
    fn standard_form_and_symplectic_suites_pass() {
        let model = sample_model();
        let opts = RunOptions::default();
        let report = run_suite(&model, Suite::StandardForm, &opts).unwrap();
        assert_eq!(report.summary.failed, 0, "records: {:#?}", report.records);
        let report = run_suite(&model, Suite::Symplectic, &opts).unwrap();
        assert_eq!(report.summary.failed, 0, "records: {:#?}", report.records);
        // The quasifree block is present, so the character check ran.
        assert!(report
            .records
            .iter()
            .any(|r| r.check_id == "quasifree_character_modulus"));
    }

    #[test]
    fn equivalence_suite_records_classifications_not_failures() {
        let mut model = sample_model();
        let opts = RunOptions::default();
        let report = run_suite(&model, Suite::Equivalence, &opts).unwrap();
        assert_eq!(report.summary.failed, 0, "records: {:#?}", report.records);
        let fock = report
            .records
            .iter()
            .find(|r| r.check_id == "equivalence_vs_fock")
            .unwrap();
        assert_eq!(fock.verdict, "quasi_equivalent");
        // A divergent declared tail flips the verdict but never the pass bit.
        model.lambda.tail = Some(TailFamily {
            explicit: vec![],
            rule: TailRule::PowerLaw { c: 1.0, p: 1.0 },
        });
        let report = run_suite(&model, Suite::Equivalence, &opts).unwrap();
        assert_eq!(report.summary.failed, 0);
        let fock = report
            .records
            .iter()
            .find(|r| r.check_id == "equivalence_vs_fock")
            .unwrap();
        assert_eq!(fock.verdict, "not_quasi_equivalent");
    }

    #[test]
    fn generator_and_weyl_suites_pass_on_the_single_mode_model() {
        let model = single_mode_model();
        let opts = RunOptions::default();
        let report = run_suite(&model, Suite::Generator, &opts).unwrap();
        assert_eq!(report.summary.failed, 0, "records: {:#?}", report.records);
        let report = run_suite(&model, Suite::Weyl, &opts).unwrap();
        assert_eq!(report.summary.failed, 0, "records: {:#?}", report.records);
    }

    #[test]
    fn failures_sort_first_and_flip_the_summary() {
        let model = broken_model();
        let report = run_suite(&model, Suite::Ccr, &RunOptions::default()).unwrap();
        assert!(report.summary.failed >= 1);
        assert!(
            !report.records[0].passed,
            "failures must lead the record list"
        );
        // Once a record fails, all failed records precede all passed ones.
        let first_pass = report.records.iter().position(|r| r.passed);
        if let Some(i) = first_pass {
            assert!(report.records[i..].iter().all(|r| r.passed));
        }
    }

    #[test]
    fn reports_are_byte_identical_across_reruns() {
        let model = sample_model();
        let opts = RunOptions::default();
        let a = emit_json(&run_named(&model, &[], &opts).unwrap());
        let b = emit_json(&run_named(&model, &[], &opts).unwrap());
        assert_eq!(a, b);
        // Model-driven runs expand and dedupe the model's suite list.
        let report = run_named(&model, &[], &opts).unwrap();
        assert_eq!(report.suite, "ccr+equivalence");
    }

    #[test]
    fn empty_reports_and_text_mode_are_well_formed() {
        let empty = assemble_report("ccr", 7, vec![]);
        assert_eq!(empty.summary.total, 0);
        assert_eq!(empty.summary.failed, 0);
        let json = emit_json(&empty);
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, empty);

        let model = sample_model();
        let report = run_suite(&model, Suite::Ccr, &RunOptions::default()).unwrap();
        let text = emit_text(&report);
        assert!(text.contains("PASS ccr_admissible [ccr-admissibility-symmetry]"));
        assert!(text.starts_with("wicklab report — suite ccr"));
    }

    #[test]
    fn timings_are_zero_unless_requested() {
        let model = sample_model();
        let mut opts = RunOptions::default();
        let report = run_suite(&model, Suite::Equivalence, &opts).unwrap();
        assert!(report.records.iter().all(|r| r.runtime_ms == 0));
        opts.timings = true;
        // With timings on the fields are populated (possibly still zero on
        // a fast machine) — the run must succeed either way.
        run_suite(&model, Suite::Equivalence, &opts).unwrap();
    }
}
