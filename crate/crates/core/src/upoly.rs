//! Dense univariate polynomials over a [`NumberField`].

use std::fmt;

use crate::field::{AlgElem, NumberField, Q};
use crate::{Error, Result};

/// Univariate polynomial; coefficient `coeffs[i]` multiplies `var^i`,
/// trailing zeros stripped, all coefficients in one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    pub var: String,
    pub field: NumberField,
    pub coeffs: Vec<AlgElem>,
}

impl UniPoly {
    pub fn new(var: &str, field: &NumberField, mut coeffs: Vec<AlgElem>) -> Result<UniPoly> {
        let mut fld = field.clone();
        for c in &coeffs {
            fld = fld.join(c.field())?;
        }
        for c in coeffs.iter_mut() {
            *c = c.coerce(&fld)?;
        }
        let mut p = UniPoly {
            var: var.to_string(),
            field: fld,
            coeffs,
        };
        p.strip();
        Ok(p)
    }

    pub fn zero(var: &str, field: &NumberField) -> UniPoly {
        UniPoly {
            var: var.to_string(),
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(var: &str, c: AlgElem) -> UniPoly {
        let field = c.field().clone();
        let coeffs = if c.is_zero() { vec![] } else { vec![c] };
        UniPoly {
            var: var.to_string(),
            field,
            coeffs,
        }
    }

    pub fn monomial(var: &str, c: AlgElem, e: usize) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero(var, c.field());
        }
        let field = c.field().clone();
        let mut coeffs = vec![AlgElem::zero(&field); e + 1];
        coeffs[e] = c;
        UniPoly {
            var: var.to_string(),
            field,
            coeffs,
        }
    }

    fn strip(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> AlgElem {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| AlgElem::zero(&self.field))
    }

    pub fn coeff(&self, i: usize) -> AlgElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| AlgElem::zero(&self.field))
    }

    /// Coerce all coefficients into a larger tower.
    pub fn coerce(&self, field: &NumberField) -> Result<UniPoly> {
        UniPoly::new(
            &self.var,
            field,
            self.coeffs
                .iter()
                .map(|c| c.coerce(field))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn add(&self, other: &UniPoly) -> Result<UniPoly> {
        let field = self.field.join(&other.field)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).coerce(&field)?.add(&other.coeff(i).coerce(&field)?)?);
        }
        UniPoly::new(&self.var, &field, coeffs)
    }

    pub fn sub(&self, other: &UniPoly) -> Result<UniPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            var: self.var.clone(),
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> Result<UniPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(UniPoly::zero(&self.var, &self.field));
        }
        let field = self.field.join(&other.field)?;
        let mut coeffs = vec![AlgElem::zero(&field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let a = a.coerce(&field)?;
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(&b.coerce(&field)?)?)?;
            }
        }
        UniPoly::new(&self.var, &field, coeffs)
    }

    pub fn scale(&self, s: &AlgElem) -> Result<UniPoly> {
        let field = self.field.join(s.field())?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.coerce(&field)?.mul(&s.coerce(&field)?))
            .collect::<Result<Vec<_>>>()?;
        UniPoly::new(&self.var, &field, coeffs)
    }

    /// Division with remainder over the coefficient field.
    pub fn div_rem(&self, other: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let field = self.field.join(&other.field)?;
        let b = other.coerce(&field)?;
        let mut rem = self.coerce(&field)?;
        let db = b.coeffs.len();
        if rem.coeffs.len() < db {
            return Ok((UniPoly::zero(&self.var, &field), rem));
        }
        let lc_inv = b.leading().inv()?;
        let mut quo = vec![AlgElem::zero(&field); rem.coeffs.len() - db + 1];
        while rem.coeffs.len() >= db {
            let e = rem.coeffs.len() - db;
            let c = rem.leading().mul(&lc_inv)?;
            quo[e] = c.clone();
            for j in 0..db {
                let t = c.mul(&b.coeffs[j])?;
                rem.coeffs[e + j] = rem.coeffs[e + j].sub(&t)?;
            }
            rem.strip();
        }
        Ok((UniPoly::new(&self.var, &field, quo)?, rem))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, other: &UniPoly) -> Result<UniPoly> {
        let (q, r) = self.div_rem(other)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic gcd over the coefficient field.
    pub fn gcd(&self, other: &UniPoly) -> Result<UniPoly> {
        let field = self.field.join(&other.field)?;
        let mut a = self.coerce(&field)?;
        let mut b = other.coerce(&field)?;
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn make_monic(&self) -> Result<UniPoly> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        self.scale(&self.leading().inv()?)
    }

    pub fn derivative(&self) -> UniPoly {
        let mut coeffs = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            coeffs.push(c.scale(&Q::from_integer(num::BigInt::from(i))));
        }
        let mut p = UniPoly {
            var: self.var.clone(),
            field: self.field.clone(),
            coeffs,
        };
        p.strip();
        p
    }

    /// Squarefree part: f / gcd(f, f').
    pub fn squarefree_part(&self) -> Result<UniPoly> {
        if self.is_zero() {
            return Err(Error::Invalid("squarefree part of zero".into()));
        }
        let g = self.gcd(&self.derivative())?;
        if g.is_constant() {
            return self.make_monic();
        }
        self.div_exact(&g)?.make_monic()
    }

    pub fn eval(&self, x: &AlgElem) -> Result<AlgElem> {
        let field = self.field.join(x.field())?;
        let x = x.coerce(&field)?;
        let mut acc = AlgElem::zero(&field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&x)?.add(&c.coerce(&field)?)?;
        }
        Ok(acc)
    }

    /// Substitute var -> var + shift.
    pub fn shift(&self, shift: &AlgElem) -> Result<UniPoly> {
        let field = self.field.join(shift.field())?;
        let x_plus = UniPoly::new(
            &self.var,
            &field,
            vec![shift.coerce(&field)?, AlgElem::one(&field)],
        )?;
        let mut acc = UniPoly::zero(&self.var, &field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&x_plus)?.add(&UniPoly::constant(&self.var, c.coerce(&field)?))?;
        }
        Ok(acc)
    }

    pub fn pow(&self, mut e: u64) -> Result<UniPoly> {
        let mut base = self.clone();
        let mut acc = UniPoly::constant(&self.var, AlgElem::one(&self.field));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = format!("{c}");
            let needs_parens = cs.contains('+') || cs.contains(' ');
            let cs = if needs_parens { format!("({cs})") } else { cs };
            match i {
                0 => parts.push(cs),
                1 if c.is_one() => parts.push(self.var.clone()),
                1 => parts.push(format!("{cs}*{}", self.var)),
                _ if c.is_one() => parts.push(format!("{}^{}", self.var, i)),
                _ => parts.push(format!("{cs}*{}^{}", self.var, i)),
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Extend `field` by a root of the given monic squarefree polynomial.
/// Degree 1 collapses to the root itself in the unchanged field. The caller
/// is responsible for irreducibility (certified through factorization);
/// with `certified_irreducible = false` a cheap reducibility probe
/// (rational roots) is run and a discovered factor is reported.
pub fn adjoin_root(
    field: &NumberField,
    minpoly: &UniPoly,
    certified_irreducible: bool,
) -> Result<(NumberField, AlgElem)> {
    let d = minpoly.degree().ok_or_else(|| Error::Invalid("zero minimal polynomial".into()))?;
    if !minpoly.leading().is_one() {
        return Err(Error::Invalid("minimal polynomial must be monic".into()));
    }
    if d == 0 {
        return Err(Error::Invalid("constant minimal polynomial".into()));
    }
    if d >= 2 && !certified_irreducible {
        if let Some(root) = crate::factor::rational_root(minpoly)? {
            let lin = UniPoly::new(
                &minpoly.var,
                field,
                vec![root.neg(), AlgElem::one(field)],
            )?;
            return Err(Error::Reducible(Some(format!("{lin}"))));
        }
    }
    let coeffs: Vec<AlgElem> = minpoly.coeffs[..d].to_vec();
    field.adjoin_algebraic(None, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q_from;

    fn qq() -> NumberField {
        NumberField::rationals()
    }

    fn upoly(coeffs: &[i64]) -> UniPoly {
        let q = qq();
        UniPoly::new("z", &q, coeffs.iter().map(|&c| q.from_int(c)).collect()).unwrap()
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = upoly(&[1, 0, -3, 2]);
        let b = upoly(&[-1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        let back = q.mul(&b).unwrap().add(&r).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (z-1)(z+2) and (z-1)(z-3) share z-1
        let a = upoly(&[-2, 1, 1]);
        let b = upoly(&[3, -4, 1]);
        let g = a.gcd(&b).unwrap();
        assert_eq!(g, upoly(&[-1, 1]));
    }

    #[test]
    fn squarefree_part_of_square() {
        let f = upoly(&[-1, 1]).pow(3).unwrap();
        let sf = f.squarefree_part().unwrap();
        assert_eq!(sf, upoly(&[-1, 1]));
    }

    #[test]
    fn adjoin_quadratic_and_collapse() {
        let q = qq();
        let (f, alpha) = adjoin_root(&q, &upoly(&[-2, 0, 1]), true).unwrap();
        assert_eq!(alpha.mul(&alpha).unwrap(), f.from_int(2));
        let (f2, r) = adjoin_root(&q, &upoly(&[-3, 1]), false).unwrap();
        assert_eq!(f2, q);
        assert_eq!(r.as_rational().unwrap(), q_from(3));
    }

    #[test]
    fn adjoin_reducible_is_rejected() {
        let q = qq();
        // z^2 - 4 = (z-2)(z+2)
        let e = adjoin_root(&q, &upoly(&[-4, 0, 1]), false);
        assert!(matches!(e, Err(Error::Reducible(Some(_)))));
    }
}
