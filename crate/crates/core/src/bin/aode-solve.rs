//! Command line front end: Puiseux series and algebraic solutions of
//! first-order autonomous ODEs F(y, y') = 0.

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use aode_solve::algebraic::algebraic_solution;
use aode_solve::briot::prolong_truncation;
use aode_solve::field::Q;
use aode_solve::parse::{parse_constant, parse_equation, parse_polynomial};
use aode_solve::report::{generic_json, generic_text, report_json, report_text, series_json};
use aode_solve::series::{ExpansionPoint, PuiseuxSeries};
use aode_solve::solver::{
    expand_conjugates, generic_solution_truncation, puiseux_solve, SolveOptions, SolveReport,
};
use aode_solve::{Error, Result};

#[derive(Parser)]
#[command(
    name = "aode-solve",
    about = "Formal Puiseux series and algebraic solutions of first-order autonomous ODEs F(y, y') = 0",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// The equation, e.g. "y'^2 + y^2 - 1" (y' may be written D(y)).
    equation: String,
    /// Truncation order (a rational, e.g. 6 or 13/2).
    #[arg(short = 'N', long = "order", default_value = "6")]
    order: String,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// All solution truncations: constants, generic family, series at 0 and at infinity.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Only report solutions with this initial value y(0).
        #[arg(long)]
        iv: Option<String>,
        /// Skip the generic solution family.
        #[arg(long)]
        no_generic: bool,
        /// Skip constant solutions.
        #[arg(long)]
        no_const: bool,
        /// Skip series expansions at x = 0.
        #[arg(long)]
        no_finite: bool,
        /// Skip series expansions at x = infinity.
        #[arg(long)]
        no_infinity: bool,
        /// List every conjugate of a solution class instead of one representative.
        #[arg(long)]
        expand_conjugates: bool,
        /// Worker threads (accepted for compatibility; the solver is single-threaded).
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the computed truncation bound (use with care: the
        /// uniqueness guarantee is only reported relative to this bound).
        #[arg(long)]
        bound_override: Option<u32>,
    },
    /// The generic solution family around a non-critical initial tuple.
    Generic {
        #[command(flatten)]
        common: Common,
        /// Assume the equation is irreducible (skips factorization work).
        #[arg(long)]
        irreducible: bool,
    },
    /// Prolong a determined truncation to a higher order.
    Prolong {
        #[command(flatten)]
        common: Common,
        /// The known truncation as a polynomial in x, e.g. "1 + x".
        #[arg(long)]
        trunc: String,
        /// Expansion point of the truncation.
        #[arg(long, default_value = "zero", value_parser = ["zero", "infinity"])]
        at: String,
    },
    /// Decide existence of an algebraic solution and print its minimal polynomial.
    Algebraic {
        #[command(flatten)]
        common: Common,
        /// Assume the equation is irreducible (skips factorization work).
        #[arg(long)]
        irreducible: bool,
    },
}

fn parse_order(s: &str) -> Result<Q> {
    Q::from_str(s.trim()).map_err(|_| Error::Parse {
        line: 1,
        col: 1,
        msg: format!("invalid order `{s}`: expected a rational like 6 or 13/2"),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve {
            common,
            iv,
            no_generic,
            no_const,
            no_finite,
            no_infinity,
            expand_conjugates: expand,
            jobs: _jobs,
            bound_override,
        } => {
            let eq = parse_equation(&common.equation)?;
            let order = parse_order(&common.order)?;
            let opts = SolveOptions {
                generic: !no_generic,
                constants: !no_const,
                finite: !no_finite,
                infinity: !no_infinity,
                iv: iv.as_deref().map(parse_constant).transpose()?,
                bound_override,
            };
            let mut report = puiseux_solve(&eq.poly, &order, &opts)?;
            if expand {
                for list in [&mut report.at_zero, &mut report.at_infinity] {
                    let mut expanded = Vec::new();
                    for t in list.iter() {
                        expanded.extend(expand_conjugates(t)?);
                    }
                    *list = expanded;
                }
            }
            emit(&report, None, common.json)
        }
        Cmd::Generic { common, irreducible } => {
            let eq = parse_equation(&common.equation)?;
            let order = parse_order(&common.order)?;
            let generics = generic_solution_truncation(&eq.poly, &order, irreducible)?;
            if common.json {
                let json: Vec<_> = generics.iter().map(generic_json).collect();
                println!("{}", serde_json::to_string_pretty(&json).expect("serialization"));
            } else {
                println!("equation: {} = 0", eq.render());
                for g in &generics {
                    println!("{}", generic_text(g));
                }
            }
            Ok(())
        }
        Cmd::Prolong { common, trunc, at } => {
            let eq = parse_equation(&common.equation)?;
            let order = parse_order(&common.order)?;
            let point = if at == "infinity" {
                ExpansionPoint::Infinity
            } else {
                ExpansionPoint::Zero
            };
            let (poly, field) = parse_polynomial(&trunc, "x")?;
            let deg = poly.degree().unwrap_or(0);
            let mut series = PuiseuxSeries::unknown(
                &field,
                "x",
                point,
                Q::from_integer((deg as i64 + 1).into()),
            );
            for (i, c) in poly.coeffs.iter().enumerate() {
                series = series.add(&PuiseuxSeries::monomial(c.clone(), i as i64, 1, "x", point))?;
            }
            let prolonged = prolong_truncation(&eq.poly, &series, &order, true)?;
            if common.json {
                let json = series_json(&prolonged)?;
                println!("{}", serde_json::to_string_pretty(&json).expect("serialization"));
            } else {
                println!("y = {prolonged}");
            }
            Ok(())
        }
        Cmd::Algebraic { common, irreducible } => {
            let eq = parse_equation(&common.equation)?;
            let result = algebraic_solution(&eq.poly, irreducible)?;
            if common.json {
                let report = SolveReport {
                    equation: eq.poly.clone(),
                    generic: Vec::new(),
                    constants: Vec::new(),
                    at_zero: Vec::new(),
                    at_infinity: Vec::new(),
                    transforms: Vec::new(),
                };
                let json = report_json(&report, Some(&result))?;
                println!("{}", serde_json::to_string_pretty(&json).expect("serialization"));
            } else {
                match &result {
                    Some(res) => {
                        println!("minimal polynomial: {} = 0", res.g.render());
                        println!("solution family:    {} = 0", res.shifted.render());
                        println!("{}", res.family_note);
                    }
                    None => println!("none"),
                }
            }
            Ok(())
        }
    }
}

fn emit(
    report: &SolveReport,
    algebraic: Option<&Option<aode_solve::algebraic::MinimalPolynomialResult>>,
    json: bool,
) -> Result<()> {
    if json {
        let json = report_json(report, algebraic)?;
        println!("{}", serde_json::to_string_pretty(&json).expect("serialization"));
    } else {
        print!("{}", report_text(report, algebraic));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Internal(_)) => {
            eprintln!("internal error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
