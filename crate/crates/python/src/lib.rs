//! Python bindings: each function returns the solver's JSON report as a
//! string, ready for `json.loads`.

use std::str::FromStr;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use aode_solve::algebraic::algebraic_solution;
use aode_solve::briot::prolong_truncation;
use aode_solve::field::Q;
use aode_solve::parse::{parse_constant, parse_equation, parse_polynomial};
use aode_solve::report::{generic_json, report_json, series_json};
use aode_solve::series::{ExpansionPoint, PuiseuxSeries};
use aode_solve::solver::{
    expand_conjugates, generic_solution_truncation, puiseux_solve, SolveOptions, SolveReport,
};
use aode_solve::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_order(s: &str) -> PyResult<Q> {
    Q::from_str(s.trim())
        .map_err(|_| PyValueError::new_err(format!("invalid order `{s}`: expected a rational like 6 or 13/2")))
}

/// Solve F(y, y') = 0: constants, the generic family, and all Puiseux series
/// solution truncations at x = 0 and x = infinity. Returns a JSON report.
#[pyfunction]
#[pyo3(signature = (equation, order="6", iv=None, generic=true, constants=true, finite=true, infinity=true, expand=false, bound_override=None))]
#[allow(clippy::too_many_arguments)]
fn solve(
    equation: &str,
    order: &str,
    iv: Option<&str>,
    generic: bool,
    constants: bool,
    finite: bool,
    infinity: bool,
    expand: bool,
    bound_override: Option<u32>,
) -> PyResult<String> {
    let eq = parse_equation(equation).map_err(to_py)?;
    let order = parse_order(order)?;
    let opts = SolveOptions {
        generic,
        constants,
        finite,
        infinity,
        iv: iv.map(parse_constant).transpose().map_err(to_py)?,
        bound_override,
    };
    let mut report = puiseux_solve(&eq.poly, &order, &opts).map_err(to_py)?;
    if expand {
        for list in [&mut report.at_zero, &mut report.at_infinity] {
            let mut expanded = Vec::new();
            for t in list.iter() {
                expanded.extend(expand_conjugates(t).map_err(to_py)?);
            }
            *list = expanded;
        }
    }
    let json = report_json(&report, None).map_err(to_py)?;
    serde_json::to_string_pretty(&json).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// The generic solution family around a non-critical initial tuple.
/// Returns a JSON list of families.
#[pyfunction]
#[pyo3(signature = (equation, order="6", irreducible=false))]
fn generic(equation: &str, order: &str, irreducible: bool) -> PyResult<String> {
    let eq = parse_equation(equation).map_err(to_py)?;
    let order = parse_order(order)?;
    let gens = generic_solution_truncation(&eq.poly, &order, irreducible).map_err(to_py)?;
    let json: Vec<_> = gens.iter().map(generic_json).collect();
    serde_json::to_string_pretty(&json).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Prolong a determined truncation (a polynomial in x) to a higher order.
/// Returns the prolonged series as JSON.
#[pyfunction]
#[pyo3(signature = (equation, trunc, order="8", at="zero"))]
fn prolong(equation: &str, trunc: &str, order: &str, at: &str) -> PyResult<String> {
    let eq = parse_equation(equation).map_err(to_py)?;
    let order = parse_order(order)?;
    let point = match at {
        "zero" => ExpansionPoint::Zero,
        "infinity" => ExpansionPoint::Infinity,
        other => return Err(PyValueError::new_err(format!("`at` must be zero or infinity, not `{other}`"))),
    };
    let (poly, field) = parse_polynomial(trunc, "x").map_err(to_py)?;
    let deg = poly.degree().unwrap_or(0);
    let mut series =
        PuiseuxSeries::unknown(&field, "x", point, Q::from_integer((deg as i64 + 1).into()));
    for (i, c) in poly.coeffs.iter().enumerate() {
        series = series
            .add(&PuiseuxSeries::monomial(c.clone(), i as i64, 1, "x", point))
            .map_err(to_py)?;
    }
    let prolonged = prolong_truncation(&eq.poly, &series, &order, true).map_err(to_py)?;
    let json = series_json(&prolonged).map_err(to_py)?;
    serde_json::to_string_pretty(&json).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Decide whether F(y, y') = 0 has an algebraic solution; if so, report its
/// minimal polynomial G(x, y) and the family G(x + c, y). Returns JSON with
/// an `algebraic` key (its `minimal_polynomial` is "none" when none exists).
#[pyfunction]
#[pyo3(signature = (equation, irreducible=false))]
fn algebraic(equation: &str, irreducible: bool) -> PyResult<String> {
    let eq = parse_equation(equation).map_err(to_py)?;
    let result = algebraic_solution(&eq.poly, irreducible).map_err(to_py)?;
    let report = SolveReport {
        equation: eq.poly.clone(),
        generic: Vec::new(),
        constants: Vec::new(),
        at_zero: Vec::new(),
        at_infinity: Vec::new(),
        transforms: Vec::new(),
    };
    let json = report_json(&report, Some(&result)).map_err(to_py)?;
    serde_json::to_string_pretty(&json).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Parse and canonically re-render an equation (errors on invalid input).
#[pyfunction]
fn render(equation: &str) -> PyResult<String> {
    Ok(parse_equation(equation).map_err(to_py)?.render())
}

#[pymodule]
fn aode_solve_py(m: &Bound<PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(generic, m)?)?;
    m.add_function(wrap_pyfunction!(prolong, m)?)?;
    m.add_function(wrap_pyfunction!(algebraic, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    Ok(())
}
