//! Truncated Puiseux series with exact algebraic coefficients.
//!
//! A series is a finite sum of terms c * v^(k/n) plus an explicit precision
//! marker: either every further coefficient is zero (`trunc == None`) or
//! coefficients are only known for exponents strictly below `trunc`. At an
//! infinite expansion point the internal variable is z = 1/x and only the
//! rendering changes (z^q prints as x^(-q)).

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Zero};

use crate::bipoly::BiPoly;
use crate::field::{AlgElem, NumberField, Q};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionPoint {
    Zero,
    Infinity,
}

#[derive(Debug, Clone)]
pub struct PuiseuxSeries {
    pub var: String,
    pub point: ExpansionPoint,
    field: NumberField,
    /// ramification: stored key k stands for exponent k/ram
    ram: u64,
    /// nonzero coefficients by key, all with k/ram < trunc
    terms: BTreeMap<i64, AlgElem>,
    /// None: exact (all later coefficients are zero)
    trunc: Option<Q>,
}

fn qmin(a: &Option<Q>, b: &Option<Q>) -> Option<Q> {
    match (a, b) {
        (None, x) => x.clone(),
        (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(x.min(y).clone()),
    }
}

fn qadd(a: &Option<Q>, b: &Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

impl PuiseuxSeries {
    pub fn zero(field: &NumberField, var: &str, point: ExpansionPoint) -> Self {
        PuiseuxSeries {
            var: var.to_string(),
            point,
            field: field.clone(),
            ram: 1,
            terms: BTreeMap::new(),
            trunc: None,
        }
    }

    /// A zero stub: nothing known below `trunc` and nothing above.
    pub fn unknown(field: &NumberField, var: &str, point: ExpansionPoint, trunc: Q) -> Self {
        PuiseuxSeries {
            var: var.to_string(),
            point,
            field: field.clone(),
            ram: 1,
            terms: BTreeMap::new(),
            trunc: Some(trunc),
        }
    }

    pub fn constant(value: AlgElem, var: &str, point: ExpansionPoint) -> Self {
        let mut s = PuiseuxSeries::zero(&value.field(), var, point);
        if !value.is_zero() {
            s.terms.insert(0, value);
        }
        s
    }

    /// c * v^(num/den)
    pub fn monomial(coeff: AlgElem, num: i64, den: u64, var: &str, point: ExpansionPoint) -> Self {
        let mut s = PuiseuxSeries::zero(&coeff.field(), var, point);
        if !coeff.is_zero() {
            s.ram = den.max(1);
            s.terms.insert(num, coeff);
        }
        s.normalize();
        s
    }

    pub fn from_terms(
        field: &NumberField,
        var: &str,
        point: ExpansionPoint,
        ram: u64,
        terms: Vec<(i64, AlgElem)>,
        trunc: Option<Q>,
    ) -> Result<Self> {
        let mut s = PuiseuxSeries {
            var: var.to_string(),
            point,
            field: field.clone(),
            ram: ram.max(1),
            terms: BTreeMap::new(),
            trunc,
        };
        for (k, c) in terms {
            if c.is_zero() {
                continue;
            }
            let c = c.coerce(field)?;
            if let Some(t) = &s.trunc {
                if &Q::new(BigInt::from(k), BigInt::from(s.ram)) >= t {
                    continue;
                }
            }
            if s.terms.insert(k, c).is_some() {
                return Err(Error::Invalid("duplicate exponent in series terms".into()));
            }
        }
        s.normalize();
        Ok(s)
    }

    pub fn field(&self) -> NumberField {
        self.field.clone()
    }

    pub fn ramification(&self) -> u64 {
        self.ram
    }

    pub fn truncation(&self) -> Option<Q> {
        self.trunc.clone()
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn exponent_of(&self, key: i64) -> Q {
        Q::new(BigInt::from(key), BigInt::from(self.ram))
    }

    /// (exponent, coefficient) pairs in increasing exponent order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (Q, &AlgElem)> {
        let ram = self.ram;
        self.terms
            .iter()
            .map(move |(k, c)| (Q::new(BigInt::from(*k), BigInt::from(ram)), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_at(&self, exp: &Q) -> AlgElem {
        let scaled = exp * Q::from_integer(BigInt::from(self.ram));
        if scaled.denom().is_one() {
            if let Some(k) = scaled.numer().try_into().ok() {
                if let Some(c) = self.terms.get(&k) {
                    return c.clone();
                }
            }
        }
        AlgElem::zero(&self.field)
    }

    /// Order of the series. Errors when no nonzero term is known and the
    /// precision is finite (the order may be anything >= trunc), or when the
    /// series is exactly zero.
    pub fn order(&self) -> Result<Q> {
        if let Some((k, _)) = self.terms.iter().next() {
            return Ok(self.exponent_of(*k));
        }
        match &self.trunc {
            Some(t) => Err(Error::OrderUnknown(format!(
                "no nonzero term below precision {}",
                t
            ))),
            None => Err(Error::Invalid("order of the zero series".into())),
        }
    }

    /// Lower bound on the order: the first exponent, else the precision,
    /// else None standing for +infinity (exact zero).
    pub fn order_lower_bound(&self) -> Option<Q> {
        if let Some((k, _)) = self.terms.iter().next() {
            Some(self.exponent_of(*k))
        } else {
            self.trunc.clone()
        }
    }

    pub fn leading_coeff(&self) -> Result<AlgElem> {
        self.terms
            .values()
            .next()
            .cloned()
            .ok_or_else(|| Error::Invalid("series has no known nonzero term".into()))
    }

    fn normalize(&mut self) {
        // drop precision-violating terms, then reduce the lattice
        if let Some(t) = self.trunc.clone() {
            let ram = self.ram;
            self.terms
                .retain(|k, _| Q::new(BigInt::from(*k), BigInt::from(ram)) < t);
        }
        if self.ram > 1 {
            let mut g: u64 = self.ram;
            for k in self.terms.keys() {
                g = num::integer::gcd(g, k.unsigned_abs());
                if g == 1 {
                    break;
                }
            }
            if g > 1 && !self.terms.is_empty() {
                let mut nt = BTreeMap::new();
                for (k, c) in std::mem::take(&mut self.terms) {
                    nt.insert(k / g as i64, c);
                }
                self.terms = nt;
                self.ram /= g;
            } else if self.terms.is_empty() {
                self.ram = 1;
            }
        }
    }

    fn with_ram(&self, ram: u64) -> Result<Self> {
        if ram % self.ram != 0 {
            return Err(Error::Internal("ramification not a multiple".into()));
        }
        let f = (ram / self.ram) as i64;
        let mut s = self.clone();
        s.ram = ram;
        s.terms = self.terms.iter().map(|(k, c)| (k * f, c.clone())).collect();
        Ok(s)
    }

    fn unify(&self, other: &Self) -> Result<(Self, Self)> {
        if self.point != other.point {
            return Err(Error::Invalid(
                "series expanded at different points".into(),
            ));
        }
        let field = self.field.join(&other.field)?;
        let ram = num::integer::lcm(self.ram, other.ram);
        let mut a = self.with_ram(ram)?;
        let mut b = other.with_ram(ram)?;
        if field != a.field {
            for c in a.terms.values_mut() {
                *c = c.coerce(&field)?;
            }
            a.field = field.clone();
        }
        if field != b.field {
            for c in b.terms.values_mut() {
                *c = c.coerce(&field)?;
            }
            b.field = field;
        }
        Ok((a, b))
    }

    pub fn truncate(&self, to: &Q) -> Self {
        let mut s = self.clone();
        s.trunc = qmin(&s.trunc, &Some(to.clone()));
        s.normalize();
        s
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (mut a, b) = self.unify(other)?;
        a.trunc = qmin(&a.trunc, &b.trunc);
        for (k, c) in &b.terms {
            let cur = a
                .terms
                .remove(k)
                .unwrap_or_else(|| AlgElem::zero(&a.field));
            let s = cur.add(c)?;
            if !s.is_zero() {
                a.terms.insert(*k, s);
            }
        }
        a.normalize();
        Ok(a)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.neg();
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &AlgElem) -> Result<Self> {
        if c.is_zero() {
            return Ok(PuiseuxSeries::zero(&self.field, &self.var, self.point));
        }
        let field = self.field.join(&c.field())?;
        let c = c.coerce(&field)?;
        let mut s = self.clone();
        s.field = field.clone();
        for v in s.terms.values_mut() {
            *v = v.coerce(&field)?.mul(&c)?;
        }
        s.normalize();
        Ok(s)
    }

    /// Multiply by c * v^(num/den).
    pub fn mul_monomial(&self, c: &AlgElem, num: i64, den: u64) -> Result<Self> {
        let mono = PuiseuxSeries::monomial(c.clone(), num, den, &self.var, self.point);
        self.mul(&mono)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        // precision: min(Ta + ord(b), Tb + ord(a)); exact zero absorbs
        let ta = qadd(&a.trunc, &b.order_lower_bound());
        let tb = qadd(&b.trunc, &a.order_lower_bound());
        let trunc = qmin(&ta, &tb);
        let mut out = PuiseuxSeries {
            var: a.var.clone(),
            point: a.point,
            field: a.field.clone(),
            ram: a.ram,
            terms: BTreeMap::new(),
            trunc,
        };
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let k = ka + kb;
                if let Some(t) = &out.trunc {
                    if &out.exponent_of(k) >= t {
                        continue;
                    }
                }
                let p = ca.mul(cb)?;
                let cur = out
                    .terms
                    .remove(&k)
                    .unwrap_or_else(|| AlgElem::zero(&out.field));
                let s = cur.add(&p)?;
                if !s.is_zero() {
                    out.terms.insert(k, s);
                }
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        let mut acc = PuiseuxSeries::constant(
            AlgElem::one(&self.field),
            &self.var,
            self.point,
        );
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inverse()?.pow((-e) as u64)
        }
    }

    /// Multiplicative inverse via a geometric series, to the precision the
    /// input supports (T - 2*ord).
    pub fn inverse(&self) -> Result<Self> {
        let (k0, c0) = self
            .terms
            .iter()
            .next()
            .map(|(k, c)| (*k, c.clone()))
            .ok_or_else(|| Error::Invalid("cannot invert a series with no known term".into()))?;
        let ord = self.exponent_of(k0);
        let c0inv = c0.inv()?;
        // u = self / (c0 v^ord) - 1, ord(u) > 0
        let mut u = self.mul_monomial(&c0inv, -k0, self.ram)?;
        let one = PuiseuxSeries::constant(AlgElem::one(&self.field), &self.var, self.point);
        u = u.sub(&one)?;
        if self.trunc.is_none() && self.num_terms() > 1 {
            return Err(Error::Invalid(
                "inverse of an exact multi-term series has infinitely many terms; \
                 truncate to a finite precision first"
                    .into(),
            ));
        }
        let target = self.trunc.as_ref().map(|t| t - &ord - &ord);
        // the accumulator lives before the final shift by v^(-ord), so its
        // own precision target is T - ord
        let acc_target = self.trunc.as_ref().map(|t| t - &ord);
        // sum (-u)^j while it can still contribute below the target
        let mut acc = one.clone();
        let mut p = one;
        let mu = u.neg();
        loop {
            match mu.order_lower_bound() {
                Some(_) => {}
                None => break, // u exactly zero
            }
            let plb = p.order_lower_bound();
            let next = p.mul(&mu)?;
            let nlb = next.order_lower_bound();
            match (&nlb, &acc_target) {
                (Some(n), Some(t)) if n >= t => break,
                (None, _) => break,
                _ => {}
            }
            if nlb == plb && next.num_terms() == 0 {
                break;
            }
            p = next;
            acc = acc.add(&p)?;
            if p.num_terms() == 0 {
                break;
            }
        }
        let mut out = acc.mul_monomial(&c0inv, -k0, self.ram)?;
        out.trunc = qmin(&out.trunc, &target.map(|t| t.clone()));
        out.normalize();
        Ok(out)
    }

    /// Formal derivative with respect to the series variable.
    pub fn derivative(&self) -> Self {
        let mut out = PuiseuxSeries {
            var: self.var.clone(),
            point: self.point,
            field: self.field.clone(),
            ram: self.ram,
            terms: BTreeMap::new(),
            trunc: self.trunc.as_ref().map(|t| t - Q::one()),
        };
        for (k, c) in &self.terms {
            if *k == 0 {
                continue;
            }
            let e = self.exponent_of(*k);
            let scaled = c.scale(&e);
            if !scaled.is_zero() {
                out.terms.insert(k - out.ram as i64, scaled);
            }
        }
        out.normalize();
        out
    }

    /// Substitute the series variable by `s`, which must have order >= 1.
    /// `self` may be Laurent but must live on the integer lattice (ram 1).
    pub fn compose(&self, s: &Self) -> Result<Self> {
        if self.ram != 1 {
            return Err(Error::Invalid(
                "composition requires integer exponents in the outer series".into(),
            ));
        }
        let s_ord = s
            .order_lower_bound()
            .ok_or_else(|| Error::Invalid("composition with the zero series".into()))?;
        if s_ord < Q::one() {
            return Err(Error::Invalid(
                "composition requires the inner series to have order >= 1".into(),
            ));
        }
        let field = self.field.join(&s.field)?;
        // precision bound
        let mut trunc = self.trunc.as_ref().map(|t| t * &s_ord);
        if s.trunc.is_some() {
            for (k, _) in self.terms.iter() {
                let e = Q::from_integer(BigInt::from(*k));
                let b = qadd(&s.trunc, &Some((&e - Q::one()) * &s_ord));
                trunc = qmin(&trunc, &b);
            }
        }
        let mut out = PuiseuxSeries::zero(&field, &s.var, s.point);
        out.trunc = trunc.clone();
        // cache powers of s
        let mut cache: BTreeMap<i64, PuiseuxSeries> = BTreeMap::new();
        for (k, c) in &self.terms {
            let pk = match cache.get(k) {
                Some(p) => p.clone(),
                None => {
                    let p = s.powi(*k)?;
                    cache.insert(*k, p.clone());
                    p
                }
            };
            out = out.add(&pk.scale(c)?)?;
        }
        out.trunc = qmin(&out.trunc, &trunc);
        out.normalize();
        Ok(out)
    }

    /// Reinterpret a series in t as a series in v^(1/n) (t = v^(1/n)).
    pub fn reinterpret_ram(&self, n: u64, var: &str, point: ExpansionPoint) -> Self {
        let mut s = self.clone();
        s.var = var.to_string();
        s.point = point;
        s.ram *= n;
        s.trunc = self
            .trunc
            .as_ref()
            .map(|t| t / Q::from_integer(BigInt::from(n)));
        s.normalize();
        s
    }

    /// Coefficient-wise field coercion.
    pub fn coerce(&self, field: &NumberField) -> Result<Self> {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.coerce(field)?;
        }
        s.field = field.clone();
        Ok(s)
    }

    /// Map every coefficient through `f` (e.g. substituting a generator).
    pub fn map_coeffs<F>(&self, field: &NumberField, mut f: F) -> Result<Self>
    where
        F: FnMut(&AlgElem) -> Result<AlgElem>,
    {
        let mut out = PuiseuxSeries {
            var: self.var.clone(),
            point: self.point,
            field: field.clone(),
            ram: self.ram,
            terms: BTreeMap::new(),
            trunc: self.trunc.clone(),
        };
        for (k, c) in &self.terms {
            let v = f(c)?;
            if !v.is_zero() {
                out.terms.insert(*k, v);
            }
        }
        out.normalize();
        Ok(out)
    }
}

/// Evaluate a bivariate polynomial at a pair of series.
pub fn substitute_bipoly(
    f: &BiPoly,
    ys: &PuiseuxSeries,
    ps: &PuiseuxSeries,
) -> Result<PuiseuxSeries> {
    let field = f.field.join(&ys.field())?.join(&ps.field())?;
    let mut out = PuiseuxSeries::zero(&field, &ys.var, ys.point);
    let mut ypows: BTreeMap<u32, PuiseuxSeries> = BTreeMap::new();
    let mut ppows: BTreeMap<u32, PuiseuxSeries> = BTreeMap::new();
    for ((i, j), c) in f.terms.iter() {
        let yp = match ypows.get(i) {
            Some(p) => p.clone(),
            None => {
                let p = ys.pow(*i as u64)?;
                ypows.insert(*i, p.clone());
                p
            }
        };
        let pp = match ppows.get(j) {
            Some(p) => p.clone(),
            None => {
                let p = ps.pow(*j as u64)?;
                ppows.insert(*j, p.clone());
                p
            }
        };
        out = out.add(&yp.mul(&pp)?.scale(c)?)?;
    }
    Ok(out)
}

fn fmt_exponent(e: &Q, point: ExpansionPoint) -> String {
    let e = match point {
        ExpansionPoint::Zero => e.clone(),
        ExpansionPoint::Infinity => -e,
    };
    if e.denom().is_one() {
        format!("{}", e.numer())
    } else {
        format!("({})", e)
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter_terms() {
            let cs = format!("{}", c);
            let (sign, body) = if let Some(rest) = cs.strip_prefix('-') {
                ("-", rest.to_string())
            } else {
                ("+", cs)
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let needs_paren = body.contains(' ') || body.contains('+');
            let body = if needs_paren {
                format!("({})", body)
            } else {
                body
            };
            if e.is_zero() {
                write!(f, "{}", body)?;
            } else {
                if body != "1" {
                    write!(f, "{}*", body)?;
                }
                let shown = match self.point {
                    ExpansionPoint::Zero => e.clone(),
                    ExpansionPoint::Infinity => -e.clone(),
                };
                if shown.is_one() && shown.denom().is_one() {
                    write!(f, "{}", self.var)?;
                } else {
                    write!(f, "{}^{}", self.var, fmt_exponent(&e, self.point))?;
                }
            }
        }
        match &self.trunc {
            Some(t) => {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "O({}^{})", self.var, fmt_exponent(t, self.point))
            }
            None => {
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}
