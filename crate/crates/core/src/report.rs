//! Text and JSON reporting for solver results.
//!
//! The JSON layout is `{equation, field, generic[], constants[], at_zero[],
//! at_infinity[], algebraic?}` with every series rendered as
//! `{ramification, terms: [{num, den_exp, coeff}], order_known}` — a term
//! `{num, den_exp, coeff}` stands for `coeff * x^(num/den_exp)`. Exact
//! rationals are rendered as `a/b` strings so no precision is lost.

use num::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebraic::MinimalPolynomialResult;
use crate::curve::Coord;
use crate::field::Q;
use crate::series::{ExpansionPoint, PuiseuxSeries};
use crate::solver::{GenericSolution, SolutionTruncation, SolveReport};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    /// Exponent numerator: the term is coeff * x^(num/den_exp).
    pub num: i64,
    /// Exponent denominator, always the ramification of the series.
    pub den_exp: u64,
    /// Exact coefficient, rendered in the field's canonical text form.
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub ramification: u64,
    pub terms: Vec<TermJson>,
    /// True when the order (lowest exponent) of the series is certain:
    /// either the series is exact or a nonzero term is already known.
    pub order_known: bool,
    /// "zero" or "infinity"; exponents are relative to x or 1/x accordingly.
    pub point: String,
    /// Coefficients are known for exponents strictly below this rational,
    /// or for all exponents when null (exact series).
    pub truncation: Option<String>,
    /// Human-readable rendering of the same data.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationJson {
    pub series: SeriesJson,
    /// Initial tuple (y0, p0); infinite coordinates render as "infinity".
    pub y0: String,
    pub p0: String,
    /// Claimed order of the truncation.
    pub order: u64,
    pub expansion_point: String,
    /// True when the truncation determines a unique solution.
    pub guarantee: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_parameter: Option<String>,
    /// Minimal polynomial of the conjugacy class of the leading coefficient,
    /// when the truncation stands for a full class of conjugate solutions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugacy_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantJson {
    pub value: String,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_minpoly: Option<String>,
    pub class_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericJson {
    /// Coefficients c_0, c_1, ... of y = sum c_k x^k with c_0 = _CC free.
    pub coeffs: Vec<String>,
    /// Algebraic relation tying _P (= y'(0)) to _CC, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    /// Conditions on _CC under which the family degenerates.
    pub exceptional: Vec<String>,
    pub component_id: usize,
    pub field: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicJson {
    pub minimal_polynomial: String,
    /// The full solution family G(x + c, y).
    pub shifted: String,
    pub component_id: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub equation: String,
    pub field: Vec<String>,
    pub generic: Vec<GenericJson>,
    pub constants: Vec<ConstantJson>,
    pub at_zero: Vec<TruncationJson>,
    pub at_infinity: Vec<TruncationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebraic: Option<AlgebraicJson>,
    /// Normalization steps applied to the input equation.
    pub transforms: Vec<String>,
}

fn q_str(q: &Q) -> String {
    format!("{q}")
}

fn coord_str(c: &Coord) -> String {
    match c.finite() {
        Some(v) => format!("{v}"),
        None => "infinity".to_string(),
    }
}

pub fn series_json(s: &PuiseuxSeries) -> Result<SeriesJson> {
    let ram = s.ramification();
    let mut terms = Vec::new();
    for (e, c) in s.iter_terms() {
        let key = &e * Q::from_integer(ram.into());
        if !key.is_integer() {
            return Err(Error::Internal(format!(
                "exponent {e} is not a multiple of 1/{ram}"
            )));
        }
        let num = key.to_integer().to_i64().ok_or_else(|| {
            Error::Internal(format!("exponent {e} does not fit the JSON schema"))
        })?;
        terms.push(TermJson {
            num,
            den_exp: ram,
            coeff: format!("{c}"),
        });
    }
    Ok(SeriesJson {
        ramification: ram,
        order_known: s.truncation().is_none() || !terms.is_empty(),
        point: match s.point {
            ExpansionPoint::Zero => "zero".to_string(),
            ExpansionPoint::Infinity => "infinity".to_string(),
        },
        truncation: s.truncation().as_ref().map(q_str),
        text: format!("{s}"),
        terms,
    })
}

pub fn truncation_json(t: &SolutionTruncation) -> Result<TruncationJson> {
    Ok(TruncationJson {
        series: series_json(&t.series)?,
        y0: coord_str(&t.initial_tuple.y0),
        p0: coord_str(&t.initial_tuple.p0),
        order: t.n,
        expansion_point: match t.expansion_point {
            ExpansionPoint::Zero => "zero".to_string(),
            ExpansionPoint::Infinity => "infinity".to_string(),
        },
        guarantee: t.guarantee,
        free_parameter: t.free_parameter.clone(),
        conjugacy_class: t.conjugacy_class.as_ref().map(|p| p.to_string()),
    })
}

pub fn generic_json(g: &GenericSolution) -> GenericJson {
    GenericJson {
        coeffs: g.coeffs.iter().map(|c| format!("{c}")).collect(),
        relation: g.relation.as_ref().map(|p| p.to_string()),
        exceptional: g.exceptional.clone(),
        component_id: g.component_id,
        field: g.field.describe(),
    }
}

pub fn report_json(
    report: &SolveReport,
    algebraic: Option<&Option<MinimalPolynomialResult>>,
) -> Result<ReportJson> {
    Ok(ReportJson {
        equation: report.equation.render(),
        field: report.equation.field.describe(),
        generic: report.generic.iter().map(generic_json).collect(),
        constants: report
            .constants
            .iter()
            .map(|r| ConstantJson {
                value: format!("{}", r.value),
                multiplicity: r.multiplicity,
                class_minpoly: r.class_minpoly.as_ref().map(|p| p.to_string()),
                class_degree: r.class_degree,
            })
            .collect(),
        at_zero: report
            .at_zero
            .iter()
            .map(truncation_json)
            .collect::<Result<_>>()?,
        at_infinity: report
            .at_infinity
            .iter()
            .map(truncation_json)
            .collect::<Result<_>>()?,
        algebraic: algebraic.map(|a| match a {
            Some(res) => AlgebraicJson {
                minimal_polynomial: res.g.render(),
                shifted: res.shifted.render(),
                component_id: res.component_id,
                note: res.family_note.clone(),
            },
            None => AlgebraicJson {
                minimal_polynomial: "none".to_string(),
                shifted: "none".to_string(),
                component_id: 0,
                note: "no algebraic solution exists".to_string(),
            },
        }),
        transforms: report.transforms.clone(),
    })
}

/// Render the generic family as a truncated power series in x.
pub fn generic_text(g: &GenericSolution) -> String {
    let mut parts = Vec::new();
    for (k, c) in g.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cs = format!("{c}");
        let cs = if cs.contains('+') || cs.contains(' ') || (cs.contains('-') && !cs.starts_with('-')) || (cs.starts_with('-') && k > 0)
        {
            format!("({cs})")
        } else {
            cs
        };
        parts.push(match k {
            0 => cs,
            1 if cs == "1" => "x".to_string(),
            1 => format!("{cs}*x"),
            _ if cs == "1" => format!("x^{k}"),
            _ => format!("{cs}*x^{k}"),
        });
    }
    parts.push(format!("O(x^{})", g.coeffs.len()));
    let mut out = format!("y(x) = {}", parts.join(" + "));
    if let Some(rel) = &g.relation {
        out.push_str(&format!("\n    where _P satisfies {rel} = 0"));
    }
    if !g.exceptional.is_empty() {
        out.push_str(&format!("\n    except when {}", g.exceptional.join(" or ")));
    }
    out
}

fn truncation_text(t: &SolutionTruncation) -> String {
    let mut line = format!(
        "(y0, p0) = ({}, {}):  y = {}",
        coord_str(&t.initial_tuple.y0),
        coord_str(&t.initial_tuple.p0),
        t.series
    );
    let mut notes = Vec::new();
    if t.guarantee {
        notes.push("unique extension".to_string());
    } else {
        notes.push("no uniqueness guarantee".to_string());
    }
    if let Some(p) = &t.free_parameter {
        notes.push(format!("free parameter {p}"));
    }
    if let Some(c) = &t.conjugacy_class {
        notes.push(format!("one of a conjugate class, leading coefficient root of {c}"));
    }
    line.push_str(&format!("  [{}]", notes.join("; ")));
    line
}

/// Human-readable text rendering of a full report.
pub fn report_text(
    report: &SolveReport,
    algebraic: Option<&Option<MinimalPolynomialResult>>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("equation: {} = 0\n", report.equation.render()));
    for line in report.equation.field.describe() {
        out.push_str(&format!("field: {line}\n"));
    }
    for t in &report.transforms {
        out.push_str(&format!("normalization: {t}\n"));
    }
    if !report.constants.is_empty() {
        out.push_str("constant solutions:\n");
        for r in &report.constants {
            match &r.class_minpoly {
                Some(p) if r.class_degree > 1 => {
                    out.push_str(&format!("  y = {}  (any root of {})\n", r.value, p));
                }
                _ => out.push_str(&format!("  y = {}\n", r.value)),
            }
        }
    }
    if !report.generic.is_empty() {
        out.push_str("generic solution (y(0) = _CC free, y'(0) = _P):\n");
        for g in &report.generic {
            out.push_str(&format!("  {}\n", generic_text(g)));
        }
    }
    if !report.at_zero.is_empty() {
        out.push_str("solutions at x = 0:\n");
        for t in &report.at_zero {
            out.push_str(&format!("  {}\n", truncation_text(t)));
        }
    }
    if !report.at_infinity.is_empty() {
        out.push_str("solutions at x = infinity:\n");
        for t in &report.at_infinity {
            out.push_str(&format!("  {}\n", truncation_text(t)));
        }
    }
    if let Some(a) = algebraic {
        match a {
            Some(res) => {
                out.push_str(&format!(
                    "algebraic solution: {} = 0\n  full family: {} = 0\n  {}\n",
                    res.g.render(),
                    res.shifted.render(),
                    res.family_note
                ));
            }
            None => out.push_str("algebraic solution: none\n"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::tests::bp;
    use crate::field::q_from;
    use crate::solver::{puiseux_solve, SolveOptions};

    #[test]
    fn json_round_trip_circle() {
        // y'^2 + y^2 - 1
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let report = puiseux_solve(&f, &q_from(6), &SolveOptions::default()).unwrap();
        let json = report_json(&report, Some(&None)).unwrap();
        let text = serde_json::to_string_pretty(&json).unwrap();
        let back: ReportJson = serde_json::from_str(&text).unwrap();
        assert_eq!(json, back);
        let again = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(text, again);
        // spot checks on the schema
        assert_eq!(json.constants.len(), 2);
        assert!(!json.at_zero.is_empty());
        let cos = json
            .at_zero
            .iter()
            .find(|t| t.y0 == "1" && t.p0 == "0")
            .expect("truncation at (1, 0)");
        assert_eq!(cos.series.ramification, 1);
        assert!(cos.series.order_known);
        let x2 = cos
            .series
            .terms
            .iter()
            .find(|t| t.num == 2)
            .expect("x^2 term");
        assert_eq!(x2.coeff, "-1/2");
        assert_eq!(x2.den_exp, 1);
    }

    #[test]
    fn ramified_series_terms() {
        // 4*y'^2*y - 1 has the class solution with ramification 3
        let f = bp(&[(1, 2, 4), (0, 0, -1)]);
        let report = puiseux_solve(&f, &q_from(4), &SolveOptions::default()).unwrap();
        let t = report
            .at_zero
            .iter()
            .find(|t| t.conjugacy_class.is_some())
            .expect("class truncation");
        let json = truncation_json(t).unwrap();
        assert_eq!(json.series.ramification, 3);
        assert!(json.series.terms.iter().any(|term| term.num == 2 && term.den_exp == 3));
        assert!(json.conjugacy_class.is_some());
    }

    #[test]
    fn text_report_mentions_everything() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let report = puiseux_solve(&f, &q_from(6), &SolveOptions::default()).unwrap();
        let text = report_text(&report, Some(&None));
        assert!(text.contains("constant solutions:"));
        assert!(text.contains("y = 1"));
        assert!(text.contains("y = -1"));
        assert!(text.contains("generic solution"));
        assert!(text.contains("solutions at x = 0:"));
        assert!(text.contains("algebraic solution: none"));
    }
}
