//! Exact arithmetic over Q and towers of simple extensions of Q.
//!
//! A [`NumberField`] is an ordered tower of generators. Each generator is
//! either algebraic over the field below it (with a stored monic minimal
//! polynomial) or transcendental (the level is then a rational function
//! field). Elements ([`AlgElem`]) are kept in a canonical reduced form:
//! polynomials in the generators reduced modulo each minimal polynomial,
//! and at transcendental levels gcd-reduced fractions with monic
//! denominator. Two elements are equal iff their reduced forms are
//! identical.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::{Error, Result};

pub type Q = BigRational;

/// Parse helpers for small rationals.
pub fn q_from(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Default cap on the total algebraic degree of a tower.
pub const DEFAULT_MAX_TOWER_DEGREE: u64 = 64;

fn max_tower_degree() -> u64 {
    std::env::var("AODE_SOLVE_MAX_TOWER")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_TOWER_DEGREE)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenKind {
    /// Monic minimal polynomial c_0 + c_1 g + ... + c_{d-1} g^{d-1} + g^d,
    /// stored as the coefficient list [c_0, ..., c_{d-1}] (degree d >= 2).
    Algebraic { minpoly: Vec<Repr> },
    Transcendental,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub name: String,
    pub kind: GenKind,
}

#[derive(Debug, PartialEq, Eq)]
pub struct FieldInner {
    levels: Vec<Level>,
}

/// A tower of simple extensions of Q. Cheap to clone (shared).
#[derive(Debug, Clone)]
pub struct NumberField(Arc<FieldInner>);

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for NumberField {}

impl NumberField {
    /// The rational numbers (empty tower).
    pub fn rationals() -> Self {
        NumberField(Arc::new(FieldInner { levels: Vec::new() }))
    }

    pub fn levels(&self) -> &[Level] {
        &self.0.levels
    }

    pub fn num_levels(&self) -> usize {
        self.0.levels.len()
    }

    /// Total algebraic degree of the tower (transcendental levels do not count).
    pub fn tower_degree(&self) -> u64 {
        self.0
            .levels
            .iter()
            .map(|l| match &l.kind {
                GenKind::Algebraic { minpoly } => minpoly.len() as u64,
                GenKind::Transcendental => 1,
            })
            .product()
    }

    pub fn is_prefix_of(&self, other: &NumberField) -> bool {
        let a = &self.0.levels;
        let b = &other.0.levels;
        a.len() <= b.len() && a[..] == b[..a.len()]
    }

    /// The larger of two compatible towers; errors if neither is a prefix
    /// of the other.
    pub fn join(&self, other: &NumberField) -> Result<NumberField> {
        if self.is_prefix_of(other) {
            Ok(other.clone())
        } else if other.is_prefix_of(self) {
            Ok(self.clone())
        } else {
            Err(Error::IncompatibleFields)
        }
    }

    fn fresh_name(&self, base: &str) -> String {
        let mut i = self.num_levels() + 1;
        loop {
            let name = format!("{base}{i}");
            if self.0.levels.iter().all(|l| l.name != name) {
                return name;
            }
            i += 1;
        }
    }

    /// Adjoin an algebraic generator with the given monic minimal polynomial
    /// (coefficients c_0..c_{d-1} as elements of `self`, degree d >= 1).
    /// Degree 1 collapses: the "generator" is just -c_0 in the same field.
    /// Irreducibility is the caller's duty.
    pub fn adjoin_algebraic(&self, name: Option<String>, coeffs: &[AlgElem]) -> Result<(NumberField, AlgElem)> {
        let d = coeffs.len();
        if d == 0 {
            return Err(Error::Invalid("empty minimal polynomial".into()));
        }
        for c in coeffs {
            if !(c.field() == self || c.field().is_prefix_of(self)) {
                return Err(Error::IncompatibleFields);
            }
        }
        if d == 1 {
            let root = coeffs[0].clone().coerce(self)?.neg();
            return Ok((self.clone(), root));
        }
        let new_degree = self.tower_degree() * d as u64;
        if new_degree > max_tower_degree() {
            return Err(Error::TowerDegreeExceeded(new_degree, max_tower_degree()));
        }
        let name = name.unwrap_or_else(|| self.fresh_name("_a"));
        if self.0.levels.iter().any(|l| l.name == name) {
            return Err(Error::Invalid(format!("duplicate generator name {name}")));
        }
        let minpoly: Vec<Repr> = coeffs.iter().map(|c| c.repr.clone()).collect();
        let mut levels = self.0.levels.clone();
        levels.push(Level {
            name,
            kind: GenKind::Algebraic { minpoly },
        });
        let field = NumberField(Arc::new(FieldInner { levels }));
        let lvl = field.num_levels();
        let gen = AlgElem {
            field: field.clone(),
            repr: Repr::Pol {
                level: lvl,
                coeffs: vec![Repr::rat0(), Repr::rat1()],
            },
        };
        Ok((field, gen))
    }

    /// Adjoin a transcendental generator (free parameter).
    pub fn adjoin_transcendental(&self, name: &str) -> Result<(NumberField, AlgElem)> {
        if self.0.levels.iter().any(|l| l.name == name) {
            return Err(Error::Invalid(format!("duplicate generator name {name}")));
        }
        let mut levels = self.0.levels.clone();
        levels.push(Level {
            name: name.to_string(),
            kind: GenKind::Transcendental,
        });
        let field = NumberField(Arc::new(FieldInner { levels }));
        let lvl = field.num_levels();
        let gen = AlgElem {
            field: field.clone(),
            repr: Repr::Pol {
                level: lvl,
                coeffs: vec![Repr::rat0(), Repr::rat1()],
            },
        };
        Ok((field, gen))
    }

    /// The i-th generator (1-based) as an element.
    pub fn generator(&self, level: usize) -> AlgElem {
        assert!(level >= 1 && level <= self.num_levels());
        AlgElem {
            field: self.clone(),
            repr: Repr::Pol {
                level,
                coeffs: vec![Repr::rat0(), Repr::rat1()],
            },
        }
    }

    pub fn generator_named(&self, name: &str) -> Option<AlgElem> {
        self.0
            .levels
            .iter()
            .position(|l| l.name == name)
            .map(|i| self.generator(i + 1))
    }

    /// The field with the top level removed.
    pub fn parent(&self) -> NumberField {
        let mut levels = self.0.levels.clone();
        levels.pop();
        NumberField(Arc::new(FieldInner { levels }))
    }

    /// Minimal polynomial of the top generator of `level` as elements of the
    /// field below; None for transcendental levels.
    pub fn minpoly_at(&self, level: usize) -> Option<Vec<AlgElem>> {
        let lv = &self.0.levels[level - 1];
        match &lv.kind {
            GenKind::Algebraic { minpoly } => {
                let sub = NumberField(Arc::new(FieldInner {
                    levels: self.0.levels[..level - 1].to_vec(),
                }));
                let mut out: Vec<AlgElem> = minpoly
                    .iter()
                    .map(|r| AlgElem {
                        field: sub.clone(),
                        repr: r.clone(),
                    })
                    .collect();
                out.push(AlgElem::one(&sub));
                Some(out)
            }
            GenKind::Transcendental => None,
        }
    }

    pub fn zero(&self) -> AlgElem {
        AlgElem::zero(self)
    }
    pub fn one(&self) -> AlgElem {
        AlgElem::one(self)
    }
    pub fn from_q(&self, q: Q) -> AlgElem {
        AlgElem {
            field: self.clone(),
            repr: Repr::Rat(q),
        }
    }
    pub fn from_int(&self, n: i64) -> AlgElem {
        self.from_q(q_from(n))
    }

    /// Canonical text description of the tower for reports.
    pub fn describe(&self) -> Vec<String> {
        self.0
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| match &l.kind {
                GenKind::Algebraic { minpoly } => {
                    let sub = NumberField(Arc::new(FieldInner {
                        levels: self.0.levels[..i].to_vec(),
                    }));
                    let mut s = String::new();
                    let d = minpoly.len();
                    s.push_str(&format!("{}^{}", l.name, d));
                    for (j, c) in minpoly.iter().enumerate().rev() {
                        if is_rzero(c) {
                            continue;
                        }
                        let cs = repr_to_string(&sub, c);
                        if j == 0 {
                            s.push_str(&format!(" + {cs}"));
                        } else if j == 1 {
                            s.push_str(&format!(" + ({cs})*{}", l.name));
                        } else {
                            s.push_str(&format!(" + ({cs})*{}^{}", l.name, j));
                        }
                    }
                    format!("{} = 0", s)
                }
                GenKind::Transcendental => format!("{} transcendental", l.name),
            })
            .collect()
    }
}

/// Canonical internal representation of a tower element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Repr {
    Rat(Q),
    /// Polynomial in generator `level` (1-based); coeffs[i] multiplies g^i,
    /// each of strictly lower level; len >= 2 and the last entry nonzero.
    Pol { level: usize, coeffs: Vec<Repr> },
    /// Reduced fraction at a transcendental level. `den` is monic,
    /// nonconstant in the generator; gcd(num, den) = 1; num nonzero.
    Frac {
        level: usize,
        num: Vec<Repr>,
        den: Vec<Repr>,
    },
}

impl Repr {
    fn rat0() -> Repr {
        Repr::Rat(Q::zero())
    }
    fn rat1() -> Repr {
        Repr::Rat(Q::one())
    }
}

fn rlevel(r: &Repr) -> usize {
    match r {
        Repr::Rat(_) => 0,
        Repr::Pol { level, .. } | Repr::Frac { level, .. } => *level,
    }
}

fn is_rzero(r: &Repr) -> bool {
    matches!(r, Repr::Rat(q) if q.is_zero())
}

fn is_rone(r: &Repr) -> bool {
    matches!(r, Repr::Rat(q) if q.is_one())
}

/// View `r` (level <= L) as a fraction of polynomials in generator L.
fn to_poly_at(r: &Repr, level: usize) -> (Vec<Repr>, Vec<Repr>) {
    match r {
        Repr::Pol { level: l, coeffs } if *l == level => (coeffs.clone(), vec![Repr::rat1()]),
        Repr::Frac { level: l, num, den } if *l == level => (num.clone(), den.clone()),
        _ => {
            debug_assert!(rlevel(r) < level);
            (vec![r.clone()], vec![Repr::rat1()])
        }
    }
}

fn pstrip(coeffs: &mut Vec<Repr>) {
    while let Some(last) = coeffs.last() {
        if is_rzero(last) {
            coeffs.pop();
        } else {
            break;
        }
    }
}

fn padd(f: &FieldInner, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(Repr::rat0);
        let y = b.get(i).cloned().unwrap_or_else(Repr::rat0);
        out.push(radd(f, &x, &y));
    }
    pstrip(&mut out);
    out
}

fn pneg(f: &FieldInner, a: &[Repr]) -> Vec<Repr> {
    a.iter().map(|c| rneg(f, c)).collect()
}

fn pmul(f: &FieldInner, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Repr::rat0(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if is_rzero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if is_rzero(y) {
                continue;
            }
            let t = rmul(f, x, y);
            out[i + j] = radd(f, &out[i + j], &t);
        }
    }
    pstrip(&mut out);
    out
}

fn pscale(f: &FieldInner, a: &[Repr], s: &Repr) -> Vec<Repr> {
    let mut out: Vec<Repr> = a.iter().map(|c| rmul(f, c, s)).collect();
    pstrip(&mut out);
    out
}

/// Division with remainder; coefficients live in a field, so the leading
/// coefficient of `b` is inverted.
fn pdivrem(f: &FieldInner, a: &[Repr], b: &[Repr]) -> Result<(Vec<Repr>, Vec<Repr>)> {
    let db = b.len();
    if db == 0 {
        return Err(Error::DivisionByZero);
    }
    let lc_inv = rinv(f, &b[db - 1])?;
    let mut rem: Vec<Repr> = a.to_vec();
    pstrip(&mut rem);
    if rem.len() < db {
        return Ok((Vec::new(), rem));
    }
    let mut quo = vec![Repr::rat0(); rem.len() - db + 1];
    while rem.len() >= db {
        let e = rem.len() - db;
        let c = rmul(f, rem.last().unwrap(), &lc_inv);
        quo[e] = c.clone();
        for j in 0..db {
            let t = rmul(f, &c, &b[j]);
            rem[e + j] = rsub(f, &rem[e + j], &t);
        }
        pstrip(&mut rem);
    }
    pstrip(&mut quo);
    Ok((quo, rem))
}

/// Monic gcd by the Euclidean algorithm over the coefficient field.
fn pgcd(f: &FieldInner, a: &[Repr], b: &[Repr]) -> Result<Vec<Repr>> {
    let mut x: Vec<Repr> = a.to_vec();
    let mut y: Vec<Repr> = b.to_vec();
    pstrip(&mut x);
    pstrip(&mut y);
    while !y.is_empty() {
        let (_, r) = pdivrem(f, &x, &y)?;
        x = y;
        y = r;
    }
    if !x.is_empty() {
        let inv = rinv(f, x.last().unwrap())?;
        x = pscale(f, &x, &inv);
    }
    Ok(x)
}

/// Extended gcd returning (g, u) with u*a = g mod b; used for inverses
/// modulo an irreducible minimal polynomial.
fn pext_gcd(f: &FieldInner, a: &[Repr], b: &[Repr]) -> Result<(Vec<Repr>, Vec<Repr>)> {
    let mut r0: Vec<Repr> = a.to_vec();
    let mut r1: Vec<Repr> = b.to_vec();
    pstrip(&mut r0);
    pstrip(&mut r1);
    let mut s0 = vec![Repr::rat1()];
    let mut s1: Vec<Repr> = Vec::new();
    while !r1.is_empty() {
        let (q, r) = pdivrem(f, &r0, &r1)?;
        let qs1 = pmul(f, &q, &s1);
        let ns = padd(f, &s0, &pneg(f, &qs1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, ns);
    }
    Ok((r0, s0))
}

/// Canonicalize a polynomial at `level` into a Repr: strip, collapse
/// constants, reduce modulo the minimal polynomial at algebraic levels.
fn norm_pol(f: &FieldInner, level: usize, mut coeffs: Vec<Repr>) -> Repr {
    pstrip(&mut coeffs);
    if let GenKind::Algebraic { minpoly } = &f.levels[level - 1].kind {
        let d = minpoly.len();
        while coeffs.len() > d {
            let top = coeffs.pop().unwrap();
            if is_rzero(&top) {
                continue;
            }
            let e = coeffs.len() - d;
            for (j, m) in minpoly.iter().enumerate() {
                let t = rmul(f, &top, m);
                coeffs[e + j] = rsub(f, &coeffs[e + j], &t);
            }
        }
        pstrip(&mut coeffs);
    }
    match coeffs.len() {
        0 => Repr::rat0(),
        1 => coeffs.pop().unwrap(),
        _ => Repr::Pol { level, coeffs },
    }
}

/// Canonicalize a fraction at a transcendental level.
fn make_frac(f: &FieldInner, level: usize, num: Vec<Repr>, den: Vec<Repr>) -> Result<Repr> {
    let mut num = num;
    let mut den = den;
    pstrip(&mut num);
    pstrip(&mut den);
    if den.is_empty() {
        return Err(Error::DivisionByZero);
    }
    if num.is_empty() {
        return Ok(Repr::rat0());
    }
    let g = pgcd(f, &num, &den)?;
    if g.len() > 1 {
        num = pdivrem(f, &num, &g)?.0;
        den = pdivrem(f, &den, &g)?.0;
    }
    let lc_inv = rinv(f, den.last().unwrap())?;
    num = pscale(f, &num, &lc_inv);
    den = pscale(f, &den, &lc_inv);
    if den.len() == 1 {
        Ok(norm_pol(f, level, num))
    } else {
        Ok(Repr::Frac { level, num, den })
    }
}

fn is_transcendental(f: &FieldInner, level: usize) -> bool {
    matches!(f.levels[level - 1].kind, GenKind::Transcendental)
}

pub(crate) fn radd(f: &FieldInner, a: &Repr, b: &Repr) -> Repr {
    let level = rlevel(a).max(rlevel(b));
    if level == 0 {
        if let (Repr::Rat(x), Repr::Rat(y)) = (a, b) {
            return Repr::Rat(x + y);
        }
        unreachable!()
    }
    let (na, da) = to_poly_at(a, level);
    let (nb, db) = to_poly_at(b, level);
    if is_transcendental(f, level) {
        let num = padd(f, &pmul(f, &na, &db), &pmul(f, &nb, &da));
        let den = pmul(f, &da, &db);
        make_frac(f, level, num, den).expect("fraction with nonzero denominator")
    } else {
        norm_pol(f, level, padd(f, &na, &nb))
    }
}

pub(crate) fn rneg(f: &FieldInner, a: &Repr) -> Repr {
    match a {
        Repr::Rat(q) => Repr::Rat(-q),
        Repr::Pol { level, coeffs } => Repr::Pol {
            level: *level,
            coeffs: coeffs.iter().map(|c| rneg(f, c)).collect(),
        },
        Repr::Frac { level, num, den } => Repr::Frac {
            level: *level,
            num: num.iter().map(|c| rneg(f, c)).collect(),
            den: den.clone(),
        },
    }
}

pub(crate) fn rsub(f: &FieldInner, a: &Repr, b: &Repr) -> Repr {
    radd(f, a, &rneg(f, b))
}

pub(crate) fn rmul(f: &FieldInner, a: &Repr, b: &Repr) -> Repr {
    if is_rzero(a) || is_rzero(b) {
        return Repr::rat0();
    }
    if is_rone(a) {
        return b.clone();
    }
    if is_rone(b) {
        return a.clone();
    }
    let level = rlevel(a).max(rlevel(b));
    if level == 0 {
        if let (Repr::Rat(x), Repr::Rat(y)) = (a, b) {
            return Repr::Rat(x * y);
        }
        unreachable!()
    }
    let (na, da) = to_poly_at(a, level);
    let (nb, db) = to_poly_at(b, level);
    if is_transcendental(f, level) {
        let num = pmul(f, &na, &nb);
        let den = pmul(f, &da, &db);
        make_frac(f, level, num, den).expect("fraction with nonzero denominator")
    } else {
        norm_pol(f, level, pmul(f, &na, &nb))
    }
}

pub(crate) fn rinv(f: &FieldInner, a: &Repr) -> Result<Repr> {
    if is_rzero(a) {
        return Err(Error::DivisionByZero);
    }
    match a {
        Repr::Rat(q) => Ok(Repr::Rat(q.recip())),
        Repr::Frac { level, num, den } => make_frac(f, *level, den.clone(), num.clone()),
        Repr::Pol { level, coeffs } => {
            if is_transcendental(f, *level) {
                make_frac(f, *level, vec![Repr::rat1()], coeffs.clone())
            } else {
                let minpoly = match &f.levels[*level - 1].kind {
                    GenKind::Algebraic { minpoly } => minpoly,
                    GenKind::Transcendental => unreachable!(),
                };
                let mut m = minpoly.clone();
                m.push(Repr::rat1());
                let (g, u) = pext_gcd(f, coeffs, &m)?;
                if g.len() != 1 {
                    // The minimal polynomial was not irreducible after all.
                    return Err(Error::ReducibleMinimalPolynomial);
                }
                let ginv = rinv(f, &g[0])?;
                Ok(norm_pol(f, *level, pscale(f, &u, &ginv)))
            }
        }
    }
}

fn rdiff(f: &FieldInner, a: &Repr, target: usize) -> Repr {
    match a {
        Repr::Rat(_) => Repr::rat0(),
        Repr::Pol { level, coeffs } => {
            if *level < target {
                return Repr::rat0();
            }
            if *level > target {
                return norm_pol(
                    f,
                    *level,
                    coeffs.iter().map(|c| rdiff(f, c, target)).collect(),
                );
            }
            let mut out = Vec::new();
            for (i, c) in coeffs.iter().enumerate().skip(1) {
                out.push(rmul(f, &Repr::Rat(q_from(i as i64)), c));
            }
            norm_pol(f, *level, out)
        }
        Repr::Frac { level, num, den } => {
            if *level < target {
                return Repr::rat0();
            }
            let dpoly = |p: &[Repr]| -> Vec<Repr> {
                if *level > target {
                    p.iter().map(|c| rdiff(f, c, target)).collect()
                } else {
                    let mut out = Vec::new();
                    for (i, c) in p.iter().enumerate().skip(1) {
                        out.push(rmul(f, &Repr::Rat(q_from(i as i64)), c));
                    }
                    out
                }
            };
            let dn = dpoly(num);
            let dd = dpoly(den);
            // (n/d)' = (n'd - nd')/d^2
            let t1 = pmul(f, &dn, den);
            let t2 = pmul(f, num, &dd);
            let top = padd(f, &t1, &pneg(f, &t2));
            let bot = pmul(f, den, den);
            make_frac(f, *level, top, bot).expect("nonzero denominator")
        }
    }
}

/// Substitute `value` for generator `target` (levels above `target` must not occur).
fn rsubst(
    _f: &FieldInner,
    a: &Repr,
    target: usize,
    value: &AlgElem,
) -> Result<AlgElem> {
    let vf = value.field.clone();
    match a {
        Repr::Rat(q) => Ok(vf.from_q(q.clone())),
        Repr::Pol { level, coeffs } | Repr::Frac { level, num: coeffs, .. } if *level > target => {
            let _ = (level, coeffs);
            Err(Error::Invalid("substitution under higher generators".into()))
        }
        Repr::Pol { level, coeffs } => {
            if *level < target {
                return Ok(AlgElem {
                    field: vf,
                    repr: a.clone(),
                });
            }
            let mut acc = vf.zero();
            for c in coeffs.iter().rev() {
                let cv = AlgElem {
                    field: vf.clone(),
                    repr: c.clone(),
                };
                acc = acc.mul(value)?.add(&cv)?;
            }
            Ok(acc)
        }
        Repr::Frac { level, num, den } => {
            if *level < target {
                return Ok(AlgElem {
                    field: vf,
                    repr: a.clone(),
                });
            }
            let eval = |p: &[Repr]| -> Result<AlgElem> {
                let mut acc = vf.zero();
                for c in p.iter().rev() {
                    let cv = AlgElem {
                        field: vf.clone(),
                        repr: c.clone(),
                    };
                    acc = acc.mul(value)?.add(&cv)?;
                }
                Ok(acc)
            };
            eval(num)?.div(&eval(den)?)
        }
    }
}

fn repr_to_string(field: &NumberField, r: &Repr) -> String {
    fn q_str(q: &Q) -> String {
        if q.denom().is_one() {
            format!("{}", q.numer())
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    }
    fn term(field: &NumberField, r: &Repr, out: &mut Vec<String>, prefix: &str) {
        match r {
            Repr::Rat(q) => {
                if !q.is_zero() {
                    if prefix.is_empty() {
                        out.push(q_str(q));
                    } else if q.is_one() {
                        out.push(prefix.to_string());
                    } else {
                        out.push(format!("{}*{}", q_str(q), prefix));
                    }
                }
            }
            Repr::Pol { level, coeffs } => {
                let g = &field.levels()[*level - 1].name;
                for (i, c) in coeffs.iter().enumerate() {
                    let p = if i == 0 {
                        prefix.to_string()
                    } else {
                        let gp = if i == 1 {
                            g.clone()
                        } else {
                            format!("{g}^{i}")
                        };
                        if prefix.is_empty() {
                            gp
                        } else {
                            format!("{gp}*{prefix}")
                        }
                    };
                    term(field, c, out, &p);
                }
            }
            Repr::Frac { .. } => {
                // a rational function in a lower (transcendental) generator
                // appearing as a coefficient: render it parenthesized
                let s = repr_to_string(field, r);
                if prefix.is_empty() {
                    out.push(s);
                } else {
                    out.push(format!("({s})*{prefix}"));
                }
            }
        }
    }
    match r {
        Repr::Frac { level, num, den } => {
            let n = repr_to_string(
                field,
                &Repr::Pol {
                    level: *level,
                    coeffs: num.clone(),
                },
            );
            let d = repr_to_string(
                field,
                &Repr::Pol {
                    level: *level,
                    coeffs: den.clone(),
                },
            );
            format!("({n})/({d})")
        }
        Repr::Pol { level, coeffs } if coeffs.len() == 1 => repr_to_string(field, &coeffs[0]),
        _ => {
            let mut parts = Vec::new();
            term(field, r, &mut parts, "");
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        }
    }
}

/// Exact element of a tower of simple extensions of Q, in canonical form.
#[derive(Debug, Clone)]
pub struct AlgElem {
    field: NumberField,
    repr: Repr,
}

impl PartialEq for AlgElem {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr
    }
}
impl Eq for AlgElem {}

impl AlgElem {
    pub fn zero(field: &NumberField) -> AlgElem {
        AlgElem {
            field: field.clone(),
            repr: Repr::rat0(),
        }
    }
    pub fn one(field: &NumberField) -> AlgElem {
        AlgElem {
            field: field.clone(),
            repr: Repr::rat1(),
        }
    }
    pub fn from_q(field: &NumberField, q: Q) -> AlgElem {
        field.from_q(q)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub(crate) fn repr(&self) -> &Repr {
        &self.repr
    }

    pub(crate) fn from_repr(field: &NumberField, repr: Repr) -> AlgElem {
        AlgElem {
            field: field.clone(),
            repr,
        }
    }

    pub fn is_zero(&self) -> bool {
        is_rzero(&self.repr)
    }

    pub fn is_one(&self) -> bool {
        is_rone(&self.repr)
    }

    /// True when the element lies in Q; returns the value.
    pub fn as_rational(&self) -> Option<Q> {
        match &self.repr {
            Repr::Rat(q) => Some(q.clone()),
            _ => None,
        }
    }

    /// Move the element into a larger compatible tower.
    pub fn coerce(&self, field: &NumberField) -> Result<AlgElem> {
        if &self.field == field {
            return Ok(self.clone());
        }
        if self.field.is_prefix_of(field) {
            Ok(AlgElem {
                field: field.clone(),
                repr: self.repr.clone(),
            })
        } else {
            Err(Error::IncompatibleFields)
        }
    }

    fn binop(&self, other: &AlgElem, op: impl Fn(&FieldInner, &Repr, &Repr) -> Repr) -> Result<AlgElem> {
        let field = self.field.join(&other.field)?;
        let repr = op(&field.0, &self.repr, &other.repr);
        Ok(AlgElem { field, repr })
    }

    pub fn add(&self, other: &AlgElem) -> Result<AlgElem> {
        self.binop(other, radd)
    }
    pub fn sub(&self, other: &AlgElem) -> Result<AlgElem> {
        self.binop(other, rsub)
    }
    pub fn mul(&self, other: &AlgElem) -> Result<AlgElem> {
        self.binop(other, rmul)
    }
    pub fn div(&self, other: &AlgElem) -> Result<AlgElem> {
        let field = self.field.join(&other.field)?;
        let inv = rinv(&field.0, &other.repr)?;
        Ok(AlgElem {
            field: field.clone(),
            repr: rmul(&field.0, &self.repr, &inv),
        })
    }
    pub fn inv(&self) -> Result<AlgElem> {
        let repr = rinv(&self.field.0, &self.repr)?;
        Ok(AlgElem {
            field: self.field.clone(),
            repr,
        })
    }
    pub fn neg(&self) -> AlgElem {
        AlgElem {
            field: self.field.clone(),
            repr: rneg(&self.field.0, &self.repr),
        }
    }
    pub fn pow(&self, mut e: u64) -> AlgElem {
        let mut base = self.clone();
        let mut acc = AlgElem::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        acc
    }
    pub fn scale(&self, q: &Q) -> AlgElem {
        AlgElem {
            field: self.field.clone(),
            repr: rmul(&self.field.0, &self.repr, &Repr::Rat(q.clone())),
        }
    }

    /// Formal partial derivative with respect to generator `level` of the
    /// canonical representative (quotient rule at transcendental levels).
    pub fn partial(&self, level: usize) -> AlgElem {
        AlgElem {
            field: self.field.clone(),
            repr: rdiff(&self.field.0, &self.repr, level),
        }
    }

    /// Substitute `value` for generator `level`; generators above `level`
    /// must not occur in the element. `value` lives in the target field,
    /// which must extend the sub-tower below `level`.
    pub fn substitute_generator(&self, level: usize, value: &AlgElem) -> Result<AlgElem> {
        rsubst(&self.field.0, &self.repr, level, value)
    }

    /// View the element as a polynomial in the top generator of its field
    /// (which must not appear in any denominator); coefficients are elements
    /// of the field below.
    pub fn top_coefficients(&self) -> Result<Vec<AlgElem>> {
        let top = self.field.num_levels();
        let parent = self.field.parent();
        match &self.repr {
            Repr::Frac { level, .. } if *level == top => Err(Error::Invalid(
                "element has the top generator in a denominator".into(),
            )),
            Repr::Pol { level, coeffs } if *level == top => Ok(coeffs
                .iter()
                .map(|c| AlgElem {
                    field: parent.clone(),
                    repr: c.clone(),
                })
                .collect()),
            r => {
                debug_assert!(rlevel(r) < top || top == 0);
                Ok(vec![AlgElem {
                    field: parent,
                    repr: r.clone(),
                }])
            }
        }
    }
}

impl fmt::Display for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", repr_to_string(&self.field, &self.repr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2_field() -> (NumberField, AlgElem) {
        // Q(alpha) with alpha^2 = 2
        let q = NumberField::rationals();
        let coeffs = vec![q.from_int(-2), q.from_int(0)];
        q.adjoin_algebraic(Some("_a1".into()), &coeffs).unwrap()
    }

    #[test]
    fn quadratic_adjunction() {
        let (f, alpha) = q2_field();
        assert_eq!(f.tower_degree(), 2);
        let two = f.from_int(2);
        assert_eq!(alpha.mul(&alpha).unwrap(), two);
    }

    #[test]
    fn degree_one_collapse() {
        let q = NumberField::rationals();
        let (f, root) = q.adjoin_algebraic(None, &[q.from_int(-3)]).unwrap();
        assert_eq!(f, q);
        assert_eq!(root, q.from_int(3));
    }

    #[test]
    fn cube_root_of_six() {
        let q = NumberField::rationals();
        let coeffs = vec![q.from_int(-6), q.from_int(0), q.from_int(0)];
        let (f, beta) = q.adjoin_algebraic(Some("_b".into()), &coeffs).unwrap();
        let cube = beta.pow(3);
        assert_eq!(cube, f.from_int(6));
        assert!(cube.sub(&f.from_int(6)).unwrap().is_zero());
    }

    #[test]
    fn inverse_in_extension() {
        // 1/(1+alpha) = alpha - 1 when alpha^2 = 2
        let (f, alpha) = q2_field();
        let one = f.one();
        let x = one.add(&alpha).unwrap();
        let inv = one.div(&x).unwrap();
        let expected = alpha.sub(&one).unwrap();
        assert_eq!(inv, expected);
        assert_eq!(x.mul(&inv).unwrap(), one);
    }

    #[test]
    fn division_by_zero() {
        let q = NumberField::rationals();
        assert!(matches!(
            q.one().div(&q.zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn transcendental_fractions() {
        let q = NumberField::rationals();
        let (f, c) = q.adjoin_transcendental("_C").unwrap();
        let one = f.one();
        // 1/(1+c) * (1+c) = 1
        let x = one.add(&c).unwrap();
        let inv = x.inv().unwrap();
        assert_eq!(x.mul(&inv).unwrap(), one);
        // (c^2 - 1)/(c - 1) = c + 1
        let num = c.mul(&c).unwrap().sub(&one).unwrap();
        let den = c.sub(&one).unwrap();
        assert_eq!(num.div(&den).unwrap(), c.add(&one).unwrap());
    }

    #[test]
    fn coercion_consistency() {
        let (f, alpha) = q2_field();
        let q = NumberField::rationals();
        let a = q.from_q(q_ratio(3, 4));
        let b = q.from_int(5);
        let in_sub = a.mul(&b).unwrap().coerce(&f).unwrap();
        let via_big = a.coerce(&f).unwrap().mul(&b.coerce(&f).unwrap()).unwrap();
        assert_eq!(in_sub, via_big);
        let _ = alpha;
    }

    #[test]
    fn tower_cap() {
        std::env::remove_var("AODE_SOLVE_MAX_TOWER");
        let mut f = NumberField::rationals();
        // adjoin x^2 - p for successive primes until the cap triggers
        let primes = [2i64, 3, 5, 7, 11, 13, 17];
        let mut failed = false;
        for p in primes {
            let coeffs = vec![f.from_int(-p), f.from_int(0)];
            match f.adjoin_algebraic(None, &coeffs) {
                Ok((nf, _)) => f = nf,
                Err(Error::TowerDegreeExceeded(..)) => {
                    failed = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(failed, "cap of 64 should trigger before 2^7");
    }

    #[test]
    fn partial_derivative_quotient_rule() {
        let q = NumberField::rationals();
        let (f, c) = q.adjoin_transcendental("_C").unwrap();
        // d/dc (1/c) = -1/c^2
        let inv = c.inv().unwrap();
        let d = inv.partial(1);
        let expected = f.one().neg().div(&c.mul(&c).unwrap()).unwrap();
        assert_eq!(d, expected);
    }
}
