//! Model-file ingestion: schema types, JSON parsing with positioned
//! errors, and conversion into the library's working types.
//!
//! Wire formats, all with unknown fields rejected:
//!
//! * polynomial — `{"terms":[{"modes":[[k,mult],…],"re":num,"im":num}]}`,
//!   modes 1-based;
//! * map — `{"degree":n,"v":[[k,c],…],"jv":[[k,<polynomial>],…],"tail":<family|null>}`,
//!   where each `c` is a number (a polynomial is accepted only if it is
//!   constant — the map must be scalar on the position directions);
//! * matrix — row-major `{"basis":"q-then-p","rows":r,"cols":c,"data":[…]}`;
//! * model — `{"lambda":…,"tail":…,"quasifree_spec":…|null,"truncation":…,"suites":[…]}`.
//!
//! Numbers are converted to exact coefficients through their dyadic
//! representation, so a model loads identically into the exact and the
//! floating-point backends.

use crate::equivalence::{TailFamily, TailRule};
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::lambda::LambdaMap;
use crate::scalar::{Exact, Scalar};
use crate::symplectic::QuasifreeSpec;
use crate::truncation::TruncationScheme;
use crate::wick::WickPolynomial;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One polynomial term on the wire: a multi-index as (mode, multiplicity)
/// pairs and a complex coefficient split into real and imaginary parts.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermWire {
    /// (mode, multiplicity) pairs, modes 1-based.
    pub modes: Vec<(u32, u32)>,
    /// Real part of the coefficient.
    pub re: f64,
    /// Imaginary part of the coefficient.
    pub im: f64,
}

/// A polynomial on the wire.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyWire {
    /// The terms; an empty list is the zero polynomial.
    pub terms: Vec<TermWire>,
}

/// A position-direction image: a plain number, or a polynomial object
/// that must turn out to be constant.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstOrPoly {
    /// The constant value directly.
    Number(f64),
    /// A polynomial form; rejected at validation unless degree 0.
    Poly(PolyWire),
}

/// A transformation map on the wire.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaWire {
    /// Declared degree; must match the computed degree of the jv images.
    pub degree: u32,
    /// Images of the position directions, as (mode, constant) pairs.
    pub v: Vec<(u32, ConstOrPoly)>,
    /// Images of the momentum directions, as (mode, polynomial) pairs.
    pub jv: Vec<(u32, PolyWire)>,
    /// Declared norm-series behavior beyond the stored modes.
    pub tail: Option<TailFamily>,
}

/// A dense matrix on the wire, row-major, with its basis convention named.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixWire {
    /// Basis convention; only "q-then-p" is accepted.
    pub basis: String,
    /// Row count.
    pub rows: usize,
    /// Column count.
    pub cols: usize,
    /// Entries, row-major; length must be rows × cols.
    pub data: Vec<f64>,
}

/// Quasifree data on the wire: the map and the linear functional.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasifreeWire {
    /// The symplectic map.
    pub t: MatrixWire,
    /// The functional's coordinates, q-then-p.
    pub l: Vec<f64>,
}

/// Truncation parameters on the wire.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationWire {
    /// Number of modes carried by the dense matrices.
    pub modes: u32,
    /// Hermite levels kept per mode.
    pub cutoff: u32,
    /// Probe depth for residual measurements.
    pub probe: u32,
}

/// A fully parsed and schema-validated model file.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    /// The transformation map under study.
    pub lambda: LambdaWire,
    /// Default tail family for series classifiers.
    pub tail: TailFamily,
    /// Optional quasifree comparison data.
    pub quasifree_spec: Option<QuasifreeWire>,
    /// Dense-matrix truncation parameters.
    pub truncation: TruncationWire,
    /// Suites to run when none is named on the command line.
    pub suites: Vec<String>,
}

fn schema_err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Model(format!("{path}: {msg}"))
}

/// Translate a serde line/column position into a byte offset in `src`.
fn byte_offset(src: &str, line: usize, column: usize) -> usize {
    let mut offset = 0usize;
    for (i, l) in src.split('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len() + 1;
    }
    offset
}

/// Parse and validate a model from a JSON string.
pub fn parse_model(src: &str) -> Result<ModelFile> {
    let model: ModelFile = serde_json::from_str(src).map_err(|e| {
        Error::Model(format!(
            "parse error at byte {} (line {}, column {}): {e}",
            byte_offset(src, e.line(), e.column()),
            e.line(),
            e.column()
        ))
    })?;
    model.validate()?;
    Ok(model)
}

/// Read and validate a model file from disk.
pub fn load_model(path: &Path) -> Result<ModelFile> {
    let src = std::fs::read_to_string(path)?;
    parse_model(&src)
}

fn validate_term(term: &TermWire, path: &str) -> Result<MultiIndex> {
    if !term.re.is_finite() || !term.im.is_finite() {
        return Err(schema_err(path, "coefficient must be finite"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(mode, mult) in &term.modes {
        if mode == 0 {
            return Err(schema_err(path, "modes are 1-based; 0 is not a mode"));
        }
        if mult == 0 {
            return Err(schema_err(path, format!("mode {mode} has multiplicity 0")));
        }
        if !seen.insert(mode) {
            return Err(schema_err(
                path,
                format!("mode {mode} appears twice in one term"),
            ));
        }
    }
    Ok(MultiIndex::from_pairs(term.modes.iter().copied()))
}

fn poly_degree(poly: &PolyWire, path: &str) -> Result<u32> {
    let mut degree = 0u32;
    let mut seen = std::collections::BTreeSet::new();
    for (i, term) in poly.terms.iter().enumerate() {
        let alpha = validate_term(term, &format!("{path}.terms[{i}]"))?;
        if !seen.insert(alpha.clone()) {
            return Err(schema_err(
                &format!("{path}.terms[{i}]"),
                "duplicate multi-index; merge the coefficients",
            ));
        }
        if term.re != 0.0 || term.im != 0.0 {
            degree = degree.max(alpha.degree());
        }
    }
    Ok(degree)
}

impl ModelFile {
    /// Full schema and invariant validation; called by the parsers.
    pub fn validate(&self) -> Result<()> {
        // Position-direction images must be constants.
        let mut v_seen = std::collections::BTreeSet::new();
        for (i, (mode, value)) in self.lambda.v.iter().enumerate() {
            let path = format!("lambda.v[{i}]");
            if *mode == 0 {
                return Err(schema_err(&path, "modes are 1-based; 0 is not a mode"));
            }
            if !v_seen.insert(*mode) {
                return Err(schema_err(&path, format!("mode {mode} listed twice")));
            }
            match value {
                ConstOrPoly::Number(x) => {
                    if !x.is_finite() {
                        return Err(schema_err(&path, "value must be finite"));
                    }
                }
                ConstOrPoly::Poly(p) => {
                    let degree = poly_degree(p, &path)?;
                    if degree > 0 {
                        return Err(schema_err(
                            &path,
                            format!(
                                "the image of a position direction must be a constant \
                                 (the constant-on-V condition); got a polynomial of degree {degree}"
                            ),
                        ));
                    }
                }
            }
        }
        // Momentum-direction images: structural validity and the degree.
        let mut computed_degree = 0u32;
        let mut jv_seen = std::collections::BTreeSet::new();
        for (i, (mode, poly)) in self.lambda.jv.iter().enumerate() {
            let path = format!("lambda.jv[{i}]");
            if *mode == 0 {
                return Err(schema_err(&path, "modes are 1-based; 0 is not a mode"));
            }
            if !jv_seen.insert(*mode) {
                return Err(schema_err(&path, format!("mode {mode} listed twice")));
            }
            computed_degree = computed_degree.max(poly_degree(poly, &path)?);
        }
        if computed_degree != self.lambda.degree {
            return Err(schema_err(
                "lambda.degree",
                format!(
                    "declared degree {} but the jv images have degree {computed_degree}",
                    self.lambda.degree
                ),
            ));
        }
        // Tail families.
        self.tail.rule.validate()?;
        for (i, &t) in self.tail.explicit.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(schema_err(
                    &format!("tail.explicit[{i}]"),
                    "series terms must be finite and nonnegative",
                ));
            }
        }
        if let Some(family) = &self.lambda.tail {
            family.rule.validate()?;
            for (i, &t) in family.explicit.iter().enumerate() {
                if !t.is_finite() || t < 0.0 {
                    return Err(schema_err(
                        &format!("lambda.tail.explicit[{i}]"),
                        "series terms must be finite and nonnegative",
                    ));
                }
            }
        }
        // Truncation parameters must form a valid scheme.
        self.truncation_scheme()?;
        // Quasifree block.
        if let Some(spec) = &self.quasifree_spec {
            let t = &spec.t;
            if t.basis != "q-then-p" {
                return Err(schema_err(
                    "quasifree_spec.t.basis",
                    format!(
                        "only the \"q-then-p\" convention is supported, got {:?}",
                        t.basis
                    ),
                ));
            }
            if t.rows != t.cols || t.rows == 0 || t.rows % 2 != 0 {
                return Err(schema_err(
                    "quasifree_spec.t",
                    format!(
                        "matrix must be square of even dimension, got {}×{}",
                        t.rows, t.cols
                    ),
                ));
            }
            if t.data.len() != t.rows * t.cols {
                return Err(schema_err(
                    "quasifree_spec.t.data",
                    format!("expected {} entries, got {}", t.rows * t.cols, t.data.len()),
                ));
            }
            if t.data.iter().any(|x| !x.is_finite()) {
                return Err(schema_err(
                    "quasifree_spec.t.data",
                    "entries must be finite",
                ));
            }
            if spec.l.len() != t.rows {
                return Err(schema_err(
                    "quasifree_spec.l",
                    format!("expected {} coordinates, got {}", t.rows, spec.l.len()),
                ));
            }
            if spec.l.iter().any(|x| !x.is_finite()) {
                return Err(schema_err("quasifree_spec.l", "coordinates must be finite"));
            }
        }
        // Suite names.
        if self.suites.is_empty() {
            return Err(schema_err("suites", "at least one suite must be listed"));
        }
        for (i, name) in self.suites.iter().enumerate() {
            if !crate::report::SUITE_NAMES.contains(&name.as_str()) {
                return Err(schema_err(
                    &format!("suites[{i}]"),
                    format!(
                        "unknown suite {name:?}; valid names: {}",
                        crate::report::SUITE_NAMES.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }

    /// The map, converted into the requested scalar backend.
    pub fn lambda_map<S: Scalar>(&self) -> Result<LambdaMap<S>> {
        let mut lambda = LambdaMap::zero();
        for (i, (mode, value)) in self.lambda.v.iter().enumerate() {
            let path = format!("lambda.v[{i}]");
            let x = match value {
                ConstOrPoly::Number(x) => scalar_from_f64::<S>(*x, &path)?,
                ConstOrPoly::Poly(p) => {
                    // Validation guarantees degree 0; sum the constant terms.
                    let poly: WickPolynomial<S> = poly_from_wire(p, &path)?;
                    poly.coefficient(&MultiIndex::empty())
                }
            };
            lambda.set_v(*mode, x);
        }
        for (i, (mode, poly)) in self.lambda.jv.iter().enumerate() {
            lambda.set_jv(*mode, poly_from_wire(poly, &format!("lambda.jv[{i}]"))?);
        }
        Ok(lambda)
    }

    /// The truncation scheme, with an optional cutoff override.
    pub fn truncation_scheme(&self) -> Result<TruncationScheme> {
        TruncationScheme::new(
            self.truncation.modes,
            self.truncation.cutoff,
            self.truncation.probe,
        )
    }

    /// The quasifree specification, if one is present.
    pub fn quasifree(&self) -> Result<Option<QuasifreeSpec>> {
        match &self.quasifree_spec {
            None => Ok(None),
            Some(spec) => Ok(Some(QuasifreeSpec {
                t: matrix_from_wire(&spec.t)?,
                l: DVector::from_vec(spec.l.clone()),
            })),
        }
    }

    /// The tail rule governing the map's own norm series: the map-level
    /// declaration when present, the model-level family otherwise.
    pub fn lambda_tail_rule(&self) -> TailRule {
        self.lambda
            .tail
            .as_ref()
            .map(|family| family.rule.clone())
            .unwrap_or_else(|| self.tail.rule.clone())
    }
}

/// Convert a wire number into a scalar backend exactly, through the
/// number's dyadic representation. Exponents outside the supported dyadic
/// window are rejected rather than rounded.
pub fn scalar_from_f64<S: Scalar>(x: f64, path: &str) -> Result<S> {
    let exact = Exact::from_f64_dyadic(x).ok_or_else(|| {
        schema_err(
            path,
            format!("{x} has no representation in the exact dyadic window"),
        )
    })?;
    Ok(S::from_rational(exact.a))
}

/// Convert a wire polynomial into a working polynomial over any backend.
/// A nonzero imaginary part requires a complex backend.
pub fn poly_from_wire<S: Scalar>(wire: &PolyWire, path: &str) -> Result<WickPolynomial<S>> {
    let mut poly = WickPolynomial::zero();
    for (i, term) in wire.terms.iter().enumerate() {
        let term_path = format!("{path}.terms[{i}]");
        let alpha = validate_term(term, &term_path)?;
        let mut coeff = scalar_from_f64::<S>(term.re, &term_path)?;
        if term.im != 0.0 {
            let unit = S::imag_unit().ok_or(Error::NoImaginaryUnit {
                backend: S::backend_name(),
            })?;
            coeff += unit * scalar_from_f64::<S>(term.im, &term_path)?;
        }
        poly.add_term(alpha, coeff);
    }
    Ok(poly)
}

/// Serialize a polynomial to the wire form (coefficients via `to_c64`).
pub fn poly_to_wire<S: Scalar>(poly: &WickPolynomial<S>) -> PolyWire {
    let terms = poly
        .iter()
        .map(|(alpha, c)| {
            let z = c.to_c64();
            TermWire {
                modes: alpha.iter().collect(),
                re: z.re,
                im: z.im,
            }
        })
        .collect();
    PolyWire { terms }
}

/// Materialize a wire matrix (row-major, q-then-p).
pub fn matrix_from_wire(wire: &MatrixWire) -> Result<DMatrix<f64>> {
    if wire.data.len() != wire.rows * wire.cols {
        return Err(schema_err(
            "matrix.data",
            format!(
                "expected {} entries, got {}",
                wire.rows * wire.cols,
                wire.data.len()
            ),
        ));
    }
    Ok(DMatrix::from_row_slice(wire.rows, wire.cols, &wire.data))
}

/// Serialize a matrix to the wire form.
pub fn matrix_to_wire(m: &DMatrix<f64>) -> MatrixWire {
    MatrixWire {
        basis: "q-then-p".to_string(),
        rows: m.nrows(),
        cols: m.ncols(),
        data: m.transpose().as_slice().to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ExactC, Rational};
    use num_complex::Complex64;

    fn quadratic_model_json() -> String {
        r#"{
  "lambda": {
    "degree": 2,
    "v": [],
    "jv": [
      [1, {"terms": [{"modes": [[2, 2]], "re": 1.0, "im": 0.0}]}],
      [2, {"terms": [{"modes": [[1, 1], [2, 1]], "re": 2.0, "im": 0.0}]}]
    ],
    "tail": {"explicit": [], "rule": {"kind": "zero"}}
  },
  "tail": {"explicit": [], "rule": {"kind": "zero"}},
  "quasifree_spec": null,
  "truncation": {"modes": 2, "cutoff": 12, "probe": 3},
  "suites": ["ccr", "standard_form"]
}"#
        .to_string()
    }

    #[test]
    fn valid_quadratic_model_loads_with_its_degree() {
        let model = parse_model(&quadratic_model_json()).unwrap();
        assert_eq!(model.lambda.degree, 2);
        let lambda: LambdaMap<ExactC> = model.lambda_map().unwrap();
        assert_eq!(lambda.degree(), 2);
        assert!(crate::lambda::validate_ccr(&lambda).valid);
        let scheme = model.truncation_scheme().unwrap();
        assert_eq!(scheme.dim(), 144);
    }

    #[test]
    fn nonconstant_position_image_is_rejected_by_name() {
        let src = quadratic_model_json().replace(
            r#""v": []"#,
            r#""v": [[1, {"terms": [{"modes": [[1, 1]], "re": 1.0, "im": 0.0}]}]]"#,
        );
        match parse_model(&src) {
            Err(Error::Model(msg)) => {
                assert!(msg.contains("constant-on-V"), "message was: {msg}");
                assert!(msg.contains("lambda.v[0]"));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        // A constant given in polynomial form is fine.
        let src = quadratic_model_json().replace(
            r#""v": []"#,
            r#""v": [[1, {"terms": [{"modes": [], "re": 0.5, "im": 0.0}]}]]"#,
        );
        let model = parse_model(&src).unwrap();
        let lambda: LambdaMap<f64> = model.lambda_map().unwrap();
        assert_eq!(lambda.v_image(1), 0.5);
        // And so is a plain number.
        let src = quadratic_model_json().replace(r#""v": []"#, r#""v": [[1, -2.5]]"#);
        let model = parse_model(&src).unwrap();
        let lambda: LambdaMap<f64> = model.lambda_map().unwrap();
        assert_eq!(lambda.v_image(1), -2.5);
    }

    #[test]
    fn malformed_json_reports_a_byte_offset() {
        let src = r#"{"lambda": }"#;
        match parse_model(src) {
            Err(Error::Model(msg)) => {
                assert!(msg.contains("parse error at byte 11"), "message was: {msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        // Multi-line input: offset counts all bytes before the error line.
        let src = "{\n  \"lambda\": ]\n}";
        match parse_model(src) {
            Err(Error::Model(msg)) => {
                // Byte 14 is the ']' — 2 bytes for line 1, 12 into line 2.
                assert!(msg.contains("byte 14"), "message was: {msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn schema_violations_carry_field_paths() {
        // Unknown top-level field.
        let src = quadratic_model_json().replace(
            r#""suites": ["ccr", "standard_form"]"#,
            r#""suites": ["ccr"], "extra": 1"#,
        );
        assert!(parse_model(&src).is_err());
        // Degree mismatch.
        let src = quadratic_model_json().replace(r#""degree": 2"#, r#""degree": 3"#);
        match parse_model(&src) {
            Err(Error::Model(msg)) => {
                assert!(msg.contains("lambda.degree"), "message was: {msg}");
                assert!(msg.contains("degree 3") && msg.contains("degree 2"));
            }
            other => panic!("expected degree mismatch, got {other:?}"),
        }
        // Duplicate jv mode.
        let src = quadratic_model_json().replace(
            r#"[2, {"terms": [{"modes": [[1, 1], [2, 1]], "re": 2.0, "im": 0.0}]}]"#,
            r#"[1, {"terms": [{"modes": [[1, 1], [2, 1]], "re": 2.0, "im": 0.0}]}]"#,
        );
        match parse_model(&src) {
            Err(Error::Model(msg)) => assert!(msg.contains("listed twice")),
            other => panic!("expected duplicate-mode error, got {other:?}"),
        }
        // Unknown suite name.
        let src = quadratic_model_json().replace(r#""standard_form""#, r#""everything""#);
        match parse_model(&src) {
            Err(Error::Model(msg)) => assert!(msg.contains("unknown suite")),
            other => panic!("expected suite error, got {other:?}"),
        }
        // Matrix with the wrong basis tag.
        let src = quadratic_model_json().replace(
            r#""quasifree_spec": null"#,
            r#""quasifree_spec": {"t": {"basis": "p-then-q", "rows": 2, "cols": 2, "data": [1.0, 0.0, 0.0, 1.0]}, "l": [0.0, 0.0]}"#,
        );
        match parse_model(&src) {
            Err(Error::Model(msg)) => assert!(msg.contains("q-then-p")),
            other => panic!("expected basis error, got {other:?}"),
        }
    }

    #[test]
    fn coefficients_load_exactly_through_the_dyadic_window() {
        let model = parse_model(&quadratic_model_json()).unwrap();
        let exact: LambdaMap<ExactC> = model.lambda_map().unwrap();
        let coeff = exact
            .jv_image(2)
            .coefficient(&MultiIndex::from_pairs([(1, 1), (2, 1)]));
        assert_eq!(coeff.re, Exact::from_integer(2));
        assert_eq!(coeff.im, Exact::from_integer(0));
        // 0.1 is a dyadic f64: it loads to the exact value of that f64.
        let x: ExactC = scalar_from_f64(0.1, "test").unwrap();
        assert_eq!(x.re.a, Rational::new(3602879701896397i128, 1i128 << 55));
        // The floating backend sees the identical values.
        let float: LambdaMap<f64> = model.lambda_map().unwrap();
        for k in [1u32, 2] {
            let a = exact.jv_image(k).to_c64_poly();
            let b = float.jv_image(k).to_c64_poly();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn imaginary_parts_need_a_complex_backend() {
        let src =
            quadratic_model_json().replace(r#""re": 1.0, "im": 0.0"#, r#""re": 1.0, "im": 0.5"#);
        let model = parse_model(&src).unwrap();
        assert!(matches!(
            model.lambda_map::<f64>(),
            Err(Error::NoImaginaryUnit { backend: "f64" })
        ));
        let complex: LambdaMap<Complex64> = model.lambda_map().unwrap();
        let c = complex
            .jv_image(1)
            .coefficient(&MultiIndex::from_pairs([(2, 2)]));
        assert_eq!(c, Complex64::new(1.0, 0.5));
    }

    #[test]
    fn quasifree_block_materializes_into_working_types() {
        let src = quadratic_model_json().replace(
            r#""quasifree_spec": null"#,
            r#""quasifree_spec": {"t": {"basis": "q-then-p", "rows": 2, "cols": 2, "data": [2.0, 0.0, 0.0, 0.5]}, "l": [1.0, -1.0]}"#,
        );
        let model = parse_model(&src).unwrap();
        let spec = model.quasifree().unwrap().unwrap();
        assert_eq!(spec.t[(0, 0)], 2.0);
        assert_eq!(spec.t[(1, 1)], 0.5);
        assert_eq!(spec.l[1], -1.0);
        // Row-major wire order: entry (0,1) is data[1].
        let wire = matrix_to_wire(&spec.t);
        assert_eq!(wire.data, vec![2.0, 0.0, 0.0, 0.5]);
        assert_eq!(wire.basis, "q-then-p");
    }

    #[test]
    fn polynomial_wire_roundtrip_preserves_terms() {
        let mut poly: WickPolynomial<Complex64> = WickPolynomial::zero();
        poly.add_term(MultiIndex::from_pairs([(1, 2)]), Complex64::new(0.75, -0.5));
        poly.add_term(MultiIndex::empty(), Complex64::new(3.0, 0.0));
        let wire = poly_to_wire(&poly);
        let back: WickPolynomial<Complex64> = poly_from_wire(&wire, "roundtrip").unwrap();
        assert_eq!(poly, back);
    }
}
