//! Expression parser for first-order autonomous equations F(y, y') = 0.
//!
//! Accepted syntax: the indeterminates `y` and `y'` (the derivative may also
//! be written `D(y)`), the operators `+ - * / ^`, integer literals,
//! parentheses, and `rootof(<monic-or-not irreducible polynomial>)` terms
//! which adjoin an algebraic number to the coefficient field. Division is
//! only permitted by nonzero constants (so `3/4` is a rational literal while
//! `y'/y` is rejected as non-polynomial). Exponents must be nonnegative
//! integer literals.
//!
//! Errors carry line/column positions. `parse -> render -> parse` is a fixed
//! point for equations over Q.

use std::fmt;

use num::{BigInt, ToPrimitive};

use crate::bipoly::BiPoly;
use crate::factor::factor_univariate;
use crate::field::{AlgElem, NumberField};
use crate::{Error, Result};

/// Variable names used for the parsed polynomial: F(y, y').
pub const VARS: (&str, &str) = ("y", "y'");

#[derive(Debug, Clone)]
pub struct InputEquation {
    /// The text as given.
    pub source: String,
    /// The parsed polynomial in (y, y').
    pub poly: BiPoly,
    /// Base coefficient field (Q extended by any rootof(...) terms).
    pub field: NumberField,
}

impl InputEquation {
    pub fn render(&self) -> String {
        self.poly.render()
    }
}

impl fmt::Display for InputEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::Prime => write!(f, "`'`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut it = text.chars().peekable();
    while let Some(&c) = it.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |it: &mut std::iter::Peekable<std::str::Chars>| {
            let c = it.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut it);
            }
            '0'..='9' => {
                let mut digits = String::new();
                while matches!(it.peek(), Some('0'..='9')) {
                    digits.push(bump(&mut it));
                }
                let n: BigInt = digits
                    .parse()
                    .map_err(|_| err_at(tl, tc, format!("invalid integer literal `{digits}`")))?;
                out.push(Spanned { tok: Tok::Int(n), line: tl, col: tc });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut name = String::new();
                while matches!(it.peek(), Some('a'..='z' | 'A'..='Z' | '0'..='9' | '_')) {
                    name.push(bump(&mut it));
                }
                out.push(Spanned { tok: Tok::Ident(name), line: tl, col: tc });
            }
            _ => {
                let tok = match c {
                    '\'' | '\u{2032}' => Tok::Prime,
                    '+' => Tok::Plus,
                    '-' | '\u{2212}' => Tok::Minus,
                    '*' | '\u{b7}' | '\u{22c5}' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    other => {
                        return Err(err_at(tl, tc, format!("unexpected character `{other}`")));
                    }
                };
                bump(&mut it);
                out.push(Spanned { tok, line: tl, col: tc });
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

/// What identifiers mean at the current nesting level.
#[derive(Debug, Clone)]
enum Scope {
    /// Top level: `y` and `y'`/`D(y)` are the indeterminates.
    Equation,
    /// Inside `rootof(...)`: a single bound variable, fixed on first sight.
    Root(Option<String>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    field: NumberField,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(err_at(t.line, t.col, format!("expected {tok}, found {}", t.tok)))
        }
    }

    fn poly_zero(&self) -> BiPoly {
        BiPoly::zero(VARS, &self.field)
    }

    fn poly_const(&self, c: AlgElem) -> Result<BiPoly> {
        let mut p = self.poly_zero();
        let c = c.coerce(&self.field)?;
        if !c.is_zero() {
            p.add_term((0, 0), c)?;
        }
        Ok(p)
    }

    fn poly_var(&self, second: bool) -> Result<BiPoly> {
        let mut p = self.poly_zero();
        p.add_term(if second { (0, 1) } else { (1, 0) }, self.field.one())?;
        Ok(p)
    }

    /// Coerce both sides into the current (possibly freshly extended) field.
    fn lift(&self, p: &BiPoly) -> Result<BiPoly> {
        p.coerce(&self.field)
    }

    fn expr(&mut self, scope: &mut Scope) -> Result<BiPoly> {
        let mut acc = self.term(scope)?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    let rhs = self.term(scope)?;
                    acc = self.lift(&acc)?.add(&rhs)?;
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.term(scope)?;
                    acc = self.lift(&acc)?.sub(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self, scope: &mut Scope) -> Result<BiPoly> {
        let mut acc = self.unary(scope)?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    let rhs = self.unary(scope)?;
                    acc = self.lift(&acc)?.mul(&rhs)?;
                }
                Tok::Slash => {
                    let at = self.next();
                    let rhs = self.unary(scope)?;
                    if !rhs.is_constant() {
                        return Err(err_at(
                            at.line,
                            at.col,
                            "not polynomial in y, y': division is only allowed by nonzero constants",
                        ));
                    }
                    if rhs.is_zero() {
                        return Err(err_at(at.line, at.col, "division by zero"));
                    }
                    let c = rhs.eval(&rhs.field.zero(), &rhs.field.zero())?;
                    acc = self.lift(&acc)?.scale(&c.coerce(&self.field)?.inv()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self, scope: &mut Scope) -> Result<BiPoly> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                Ok(self.unary(scope)?.neg())
            }
            Tok::Plus => {
                self.next();
                self.unary(scope)
            }
            _ => self.power(scope),
        }
    }

    fn power(&mut self, scope: &mut Scope) -> Result<BiPoly> {
        let base = self.atom(scope)?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let t = self.next();
        let e = match t.tok {
            Tok::Int(ref n) => n.to_u64().ok_or_else(|| {
                err_at(t.line, t.col, format!("exponent `{n}` is out of range"))
            })?,
            Tok::Minus => {
                return Err(err_at(
                    t.line,
                    t.col,
                    "not polynomial in y, y': negative exponents are not allowed",
                ));
            }
            ref other => {
                return Err(err_at(
                    t.line,
                    t.col,
                    format!("expected a nonnegative integer exponent, found {other}"),
                ));
            }
        };
        if e > 10_000 {
            return Err(err_at(t.line, t.col, format!("exponent {e} is too large")));
        }
        base.pow(e)
    }

    fn atom(&mut self, scope: &mut Scope) -> Result<BiPoly> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => {
                let c = AlgElem::from_q(&self.field, num::BigRational::from_integer(n));
                self.poly_const(c)
            }
            Tok::LParen => {
                let inner = self.expr(scope)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(&name, t.line, t.col, scope),
            other => Err(err_at(t.line, t.col, format!("expected a term, found {other}"))),
        }
    }

    fn ident(&mut self, name: &str, line: usize, col: usize, scope: &mut Scope) -> Result<BiPoly> {
        if name == "rootof" || name == "RootOf" {
            return self.rootof(line, col);
        }
        match scope {
            Scope::Equation => match name {
                "y" => {
                    if self.peek().tok == Tok::Prime {
                        self.next();
                        self.poly_var(true)
                    } else {
                        self.poly_var(false)
                    }
                }
                "D" => {
                    self.expect(Tok::LParen)?;
                    let arg = self.next();
                    if arg.tok != Tok::Ident("y".to_string()) {
                        return Err(err_at(
                            arg.line,
                            arg.col,
                            "D(...) only accepts the dependent variable y",
                        ));
                    }
                    self.expect(Tok::RParen)?;
                    self.poly_var(true)
                }
                other => Err(err_at(
                    line,
                    col,
                    format!("unknown identifier `{other}`; only y, y', D(y) and rootof(...) are allowed"),
                )),
            },
            Scope::Root(bound) => {
                match bound {
                    Some(b) if b == name => {}
                    Some(b) => {
                        return Err(err_at(
                            line,
                            col,
                            format!("rootof(...) must be univariate; found `{name}` after `{b}`"),
                        ));
                    }
                    None => {
                        if name == "y" || name == "D" {
                            return Err(err_at(
                                line,
                                col,
                                "the rootof(...) polynomial may not involve y or y'",
                            ));
                        }
                        *bound = Some(name.to_string());
                    }
                }
                // The bound variable is carried in the first slot of a
                // bivariate scratch polynomial and extracted afterwards.
                self.poly_var(false)
            }
        }
    }

    fn rootof(&mut self, line: usize, col: usize) -> Result<BiPoly> {
        self.expect(Tok::LParen)?;
        let mut scope = Scope::Root(None);
        let inner = self.expr(&mut scope)?;
        self.expect(Tok::RParen)?;
        let inner = self.lift(&inner)?;
        if inner.deg2() > 0 {
            return Err(err_at(line, col, "the rootof(...) polynomial may not involve y'"));
        }
        let upoly = inner.eval_v2(&self.field.zero())?;
        let deg = match upoly.degree() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(err_at(
                    line,
                    col,
                    "rootof(...) needs a non-constant univariate polynomial",
                ));
            }
        };
        let monic = upoly
            .make_monic()
            .map_err(|e| err_at(line, col, format!("invalid rootof(...) polynomial: {e}")))?;
        let factors = factor_univariate(&monic)
            .map_err(|e| err_at(line, col, format!("cannot factor rootof(...) polynomial: {e}")))?;
        if factors.len() != 1 || factors[0].1 != 1 || factors[0].0.degree() != Some(deg) {
            return Err(err_at(
                line,
                col,
                format!(
                    "rootof(...) polynomial is reducible over the current field (factor: {})",
                    factors[0].0
                ),
            ));
        }
        let coeffs: Vec<AlgElem> = (0..deg).map(|i| monic.coeff(i)).collect();
        let (field, gen) = self
            .field
            .adjoin_algebraic(None, &coeffs)
            .map_err(|e| err_at(line, col, format!("cannot adjoin root: {e}")))?;
        self.field = field;
        self.poly_const(gen)
    }
}

/// Parse a univariate polynomial in `var` (e.g. a truncated series "1 + x")
/// over Q extended by any `rootof(...)` terms.
pub fn parse_polynomial(text: &str, var: &str) -> Result<(crate::upoly::UniPoly, NumberField)> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        field: NumberField::rationals(),
    };
    let mut scope = Scope::Root(Some(var.to_string()));
    let poly = parser.expr(&mut scope)?;
    let t = parser.peek().clone();
    if t.tok != Tok::Eof {
        return Err(err_at(t.line, t.col, format!("unexpected {} after the expression", t.tok)));
    }
    let poly = poly.coerce(&parser.field)?;
    let scratch = poly.eval_v2(&parser.field.zero())?;
    let named = crate::upoly::UniPoly::new(var, &parser.field, scratch.coeffs.clone())?;
    Ok((named, parser.field))
}

/// Parse a constant expression (rationals and rootof terms only).
pub fn parse_constant(text: &str) -> Result<AlgElem> {
    let (p, field) = parse_polynomial(text, "x")?;
    if !p.is_constant() {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "expected a constant expression".into(),
        });
    }
    p.eval(&field.zero())
}

/// Parse an equation text into a polynomial F(y, y') over Q extended by any
/// `rootof(...)` terms appearing in the text.
pub fn parse_equation(text: &str) -> Result<InputEquation> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        field: NumberField::rationals(),
    };
    let mut scope = Scope::Equation;
    let poly = parser.expr(&mut scope)?;
    let t = parser.peek().clone();
    if t.tok != Tok::Eof {
        return Err(err_at(t.line, t.col, format!("unexpected {} after the expression", t.tok)));
    }
    let poly = poly.coerce(&parser.field)?;
    Ok(InputEquation {
        source: text.to_string(),
        poly,
        field: parser.field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::tests::bp;

    fn check(text: &str, expected: &[(u32, u32, i64)]) {
        let eq = parse_equation(text).unwrap();
        let want = bp(expected);
        assert!(
            eq.poly.sub(&want).unwrap().is_zero(),
            "{text} parsed to {} instead of {}",
            eq.poly.render(),
            want.render()
        );
    }

    #[test]
    fn basic_equations() {
        check("y'^2 - y", &[(0, 2, 1), (1, 0, -1)]);
        check("4*y'^2*y - 1", &[(1, 2, 4), (0, 0, -1)]);
        check("y' + y^2", &[(0, 1, 1), (2, 0, 1)]);
        check("D(y)^2 + y^2 - 1", &[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        check("-y + - 2", &[(1, 0, -1), (0, 0, -2)]);
        check("(y - 1)*(y + 1)", &[(2, 0, 1), (0, 0, -1)]);
        check("0", &[]);
    }

    #[test]
    fn rational_literals() {
        let eq = parse_equation("3/4*y - 1/2").unwrap();
        let q = NumberField::rationals();
        assert_eq!(eq.poly.eval(&q.from_int(2), &q.zero()).unwrap(), q.from_q(crate::field::q_from(1)));
        // division groups left-to-right with multiplication
        check("6/2*y", &[(1, 0, 3)]);
    }

    #[test]
    fn division_by_y_rejected() {
        let err = parse_equation("y'/y - 1").unwrap_err();
        match err {
            Error::Parse { line, col, msg } => {
                assert_eq!((line, col), (1, 3));
                assert!(msg.contains("not polynomial in y, y'"), "{msg}");
            }
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn positioned_diagnostics() {
        match parse_equation("y^2 +\n z") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 2)),
            other => panic!("expected a parse error, got {other:?}"),
        }
        assert!(parse_equation("y^-2").is_err());
        assert!(parse_equation("y' y").is_err());
        assert!(parse_equation("(y").is_err());
        assert!(parse_equation("y / 0").is_err());
    }

    #[test]
    fn rootof_extension() {
        let eq = parse_equation("y'^2 - rootof(z^2 - 2)*y").unwrap();
        assert_eq!(eq.field.tower_degree(), 2);
        // the adjoined constant squares to 2
        let gen = eq.field.generator(1);
        assert_eq!(gen.mul(&gen).unwrap(), eq.field.from_int(2));
        // reducible polynomials are rejected
        assert!(parse_equation("y - rootof(z^2 - 1)").is_err());
        // y may not leak into the rootof scope
        assert!(parse_equation("y - rootof(y^2 - 2)").is_err());
        assert!(parse_equation("y - rootof(z*w - 2)").is_err());
    }

    #[test]
    fn parse_render_fixed_point() {
        for text in [
            "y'^2 + y^2 - 1",
            "4*y'^2*y - 1",
            "y'^2 - 4*y^3",
            "-y' + 1/3*y^2 - 7",
            "y^4 + y'^4 - 2*y*y'",
        ] {
            let first = parse_equation(text).unwrap();
            let rendered = first.render();
            let second = parse_equation(&rendered).unwrap();
            assert!(
                first.poly.sub(&second.poly).unwrap().is_zero(),
                "render `{rendered}` of `{text}` re-parses differently"
            );
            assert_eq!(rendered, second.render());
        }
    }
}
