//! Sparse bivariate polynomials over a [`NumberField`].
//!
//! The same type serves F(y, p) in the differential solver and G(x, y) in
//! the algebraic-solution module; the variable pair is carried with the
//! polynomial. Resultants use the subresultant PRS over the coefficient
//! ring K[v1].

use std::collections::BTreeMap;
use std::fmt;

use crate::field::{AlgElem, NumberField};
use crate::upoly::UniPoly;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPoly {
    /// (first, second) variable names, e.g. ("y", "p") or ("x", "y").
    pub vars: (String, String),
    pub field: NumberField,
    /// (e1, e2) -> coefficient of v1^e1 * v2^e2; no zero entries.
    pub terms: BTreeMap<(u32, u32), AlgElem>,
}

impl BiPoly {
    pub fn zero(vars: (&str, &str), field: &NumberField) -> BiPoly {
        BiPoly {
            vars: (vars.0.to_string(), vars.1.to_string()),
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        vars: (&str, &str),
        field: &NumberField,
        terms: impl IntoIterator<Item = ((u32, u32), AlgElem)>,
    ) -> Result<BiPoly> {
        let mut out = BiPoly::zero(vars, field);
        for (e, c) in terms {
            out.add_term(e, c)?;
        }
        Ok(out)
    }

    pub fn add_term(&mut self, e: (u32, u32), c: AlgElem) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        self.field = self.field.join(c.field())?;
        let cur = match self.terms.remove(&e) {
            Some(old) => old.coerce(&self.field)?.add(&c.coerce(&self.field)?)?,
            None => c.coerce(&self.field)?,
        };
        if !cur.is_zero() {
            self.terms.insert(e, cur);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(a, b)| a == 0 && b == 0)
    }

    pub fn deg1(&self) -> u32 {
        self.terms.keys().map(|&(a, _)| a).max().unwrap_or(0)
    }

    pub fn deg2(&self) -> u32 {
        self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    pub fn coerce(&self, field: &NumberField) -> Result<BiPoly> {
        let mut out = BiPoly::zero((&self.vars.0, &self.vars.1), field);
        for (e, c) in &self.terms {
            out.add_term(*e, c.coerce(field)?)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &BiPoly) -> Result<BiPoly> {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BiPoly) -> Result<BiPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            vars: self.vars.clone(),
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &BiPoly) -> Result<BiPoly> {
        let field = self.field.join(&other.field)?;
        let mut out = BiPoly::zero((&self.vars.0, &self.vars.1), &field);
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term((a1 + a2, b1 + b2), c1.coerce(&field)?.mul(&c2.coerce(&field)?)?)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &AlgElem) -> Result<BiPoly> {
        let field = self.field.join(s.field())?;
        let mut out = BiPoly::zero((&self.vars.0, &self.vars.1), &field);
        for (e, c) in &self.terms {
            out.add_term(*e, c.coerce(&field)?.mul(&s.coerce(&field)?)?)?;
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<BiPoly> {
        let mut base = self.clone();
        let mut acc = BiPoly::from_terms(
            (&self.vars.0, &self.vars.1),
            &self.field,
            [((0, 0), AlgElem::one(&self.field))],
        )?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to the named variable.
    pub fn partial_derivative(&self, var: &str) -> Result<BiPoly> {
        let first = if var == self.vars.0 {
            true
        } else if var == self.vars.1 {
            false
        } else {
            return Err(Error::Invalid(format!("unknown variable {var}")));
        };
        let mut out = BiPoly::zero((&self.vars.0, &self.vars.1), &self.field);
        for (&(a, b), c) in &self.terms {
            let (e, k) = if first { (a, (a.saturating_sub(1), b)) } else { (b, (a, b.saturating_sub(1))) };
            if e == 0 {
                continue;
            }
            out.add_term(k, c.scale(&crate::field::q_from(e as i64)))?;
        }
        Ok(out)
    }

    /// Coefficient vector in the second variable: entry j is the
    /// K[v1]-coefficient of v2^j.
    pub fn coeffs_in_v2(&self) -> Vec<UniPoly> {
        let d = self.deg2() as usize;
        let mut out = vec![UniPoly::zero(&self.vars.0, &self.field); d + 1];
        for (&(a, b), c) in &self.terms {
            out[b as usize] = out[b as usize]
                .add(&UniPoly::monomial(&self.vars.0, c.clone(), a as usize))
                .expect("same field");
        }
        out
    }

    /// Coefficient vector in the first variable.
    pub fn coeffs_in_v1(&self) -> Vec<UniPoly> {
        let d = self.deg1() as usize;
        let mut out = vec![UniPoly::zero(&self.vars.1, &self.field); d + 1];
        for (&(a, b), c) in &self.terms {
            out[a as usize] = out[a as usize]
                .add(&UniPoly::monomial(&self.vars.1, c.clone(), b as usize))
                .expect("same field");
        }
        out
    }

    pub fn from_coeffs_in_v2(vars: (&str, &str), field: &NumberField, coeffs: &[UniPoly]) -> Result<BiPoly> {
        let mut out = BiPoly::zero(vars, field);
        for (j, u) in coeffs.iter().enumerate() {
            for (i, c) in u.coeffs.iter().enumerate() {
                out.add_term((i as u32, j as u32), c.clone())?;
            }
        }
        Ok(out)
    }

    pub fn from_coeffs_in_v1(vars: (&str, &str), field: &NumberField, coeffs: &[UniPoly]) -> Result<BiPoly> {
        let mut out = BiPoly::zero(vars, field);
        for (i, u) in coeffs.iter().enumerate() {
            for (j, c) in u.coeffs.iter().enumerate() {
                out.add_term((i as u32, j as u32), c.clone())?;
            }
        }
        Ok(out)
    }

    /// Specialize the first variable, leaving a univariate polynomial in v2.
    pub fn eval_v1(&self, val: &AlgElem) -> Result<UniPoly> {
        let field = self.field.join(val.field())?;
        let mut acc = UniPoly::zero(&self.vars.1, &field);
        for (&(a, b), c) in &self.terms {
            let t = c.coerce(&field)?.mul(&val.coerce(&field)?.pow(a as u64))?;
            acc = acc.add(&UniPoly::monomial(&self.vars.1, t, b as usize))?;
        }
        Ok(acc)
    }

    pub fn eval_v2(&self, val: &AlgElem) -> Result<UniPoly> {
        let field = self.field.join(val.field())?;
        let mut acc = UniPoly::zero(&self.vars.0, &field);
        for (&(a, b), c) in &self.terms {
            let t = c.coerce(&field)?.mul(&val.coerce(&field)?.pow(b as u64))?;
            acc = acc.add(&UniPoly::monomial(&self.vars.0, t, a as usize))?;
        }
        Ok(acc)
    }

    pub fn eval(&self, v1: &AlgElem, v2: &AlgElem) -> Result<AlgElem> {
        self.eval_v1(v1)?.eval(v2)
    }

    /// Substitute v1 -> v1 + a, v2 -> v2 + b.
    pub fn shift(&self, a: &AlgElem, b: &AlgElem) -> Result<BiPoly> {
        let field = self.field.join(a.field())?.join(b.field())?;
        let coeffs = self.coeffs_in_v2();
        let shifted: Vec<UniPoly> = coeffs
            .iter()
            .map(|u| u.coerce(&field)?.shift(&a.coerce(&field)?))
            .collect::<Result<Vec<_>>>()?;
        // Horner in v2 with (v2 + b)
        let vb = BiPoly::from_terms(
            (&self.vars.0, &self.vars.1),
            &field,
            [((0, 1), AlgElem::one(&field)), ((0, 0), b.coerce(&field)?)],
        )?;
        let mut acc = BiPoly::zero((&self.vars.0, &self.vars.1), &field);
        for u in shifted.iter().rev() {
            let ubp = BiPoly::from_coeffs_in_v2((&self.vars.0, &self.vars.1), &field, &[u.clone()])?;
            acc = acc.mul(&vb)?.add(&ubp)?;
        }
        Ok(acc)
    }

    /// Multiply by var^deg and substitute var -> 1/var (projective flip in
    /// one variable). `first` selects v1.
    pub fn invert_var(&self, first: bool) -> BiPoly {
        let d = if first { self.deg1() } else { self.deg2() };
        let mut out = BiPoly::zero((&self.vars.0, &self.vars.1), &self.field);
        for (&(a, b), c) in &self.terms {
            let e = if first { (d - a, b) } else { (a, d - b) };
            out.add_term(e, c.clone()).expect("same field");
        }
        out
    }

    /// Remove the monomial content v1^a * v2^b.
    pub fn strip_monomial_content(&self) -> (BiPoly, u32, u32) {
        if self.is_zero() {
            return (self.clone(), 0, 0);
        }
        let a = self.terms.keys().map(|&(a, _)| a).min().unwrap();
        let b = self.terms.keys().map(|&(_, b)| b).min().unwrap();
        let mut out = BiPoly::zero((&self.vars.0, &self.vars.1), &self.field);
        for (&(i, j), c) in &self.terms {
            out.add_term((i - a, j - b), c.clone()).expect("same field");
        }
        (out, a, b)
    }

    /// Render with explicit `*` and `^`, deterministic term order.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&(a, b), c) in self.terms.iter().rev() {
            let cs = format!("{c}");
            let needs_parens = cs.contains('+') || cs.contains(' ') || cs.contains('-');
            let mut factors = Vec::new();
            if !(c.is_one() && (a > 0 || b > 0)) {
                factors.push(if needs_parens { format!("({cs})") } else { cs });
            }
            if a > 0 {
                factors.push(if a == 1 {
                    self.vars.0.clone()
                } else {
                    format!("{}^{}", self.vars.0, a)
                });
            }
            if b > 0 {
                factors.push(if b == 1 {
                    self.vars.1.clone()
                } else {
                    format!("{}^{}", self.vars.1, b)
                });
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

fn upoly_content(coeffs: &[UniPoly]) -> Result<UniPoly> {
    let mut g: Option<UniPoly> = None;
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = Some(match g {
            None => c.make_monic()?,
            Some(acc) => acc.gcd(c)?,
        });
        if let Some(ref acc) = g {
            if acc.is_constant() {
                break;
            }
        }
    }
    g.ok_or_else(|| Error::Invalid("content of zero polynomial".into()))
}

fn divide_coeffs(coeffs: &[UniPoly], d: &UniPoly) -> Result<Vec<UniPoly>> {
    coeffs.iter().map(|c| {
        if c.is_zero() {
            Ok(c.clone())
        } else {
            c.div_exact(d)
        }
    }).collect()
}

fn strip_vec(v: &mut Vec<UniPoly>) {
    while matches!(v.last(), Some(c) if c.is_zero()) {
        v.pop();
    }
}

/// Pseudo-remainder of A by B in (K[v1])[v2]: lc(B)^(degA-degB+1) * A mod B.
fn prem_vec(a: &[UniPoly], b: &[UniPoly]) -> Result<Vec<UniPoly>> {
    let db = b.len() - 1;
    let lcb = b[db].clone();
    let mut r: Vec<UniPoly> = a.to_vec();
    strip_vec(&mut r);
    if r.is_empty() {
        return Ok(r);
    }
    let da = r.len() - 1;
    if da < db {
        return Ok(r);
    }
    let mut reps = (da - db + 1) as i64;
    while !r.is_empty() && r.len() - 1 >= db {
        let shift = r.len() - 1 - db;
        let lcr = r.last().unwrap().clone();
        // r := lcb * r - lcr * v2^shift * b
        for c in r.iter_mut() {
            *c = c.mul(&lcb)?;
        }
        for j in 0..=db {
            let t = lcr.mul(&b[j])?;
            r[shift + j] = r[shift + j].sub(&t)?;
        }
        strip_vec(&mut r);
        reps -= 1;
    }
    for _ in 0..reps.max(0) {
        for c in r.iter_mut() {
            *c = c.mul(&lcb)?;
        }
    }
    Ok(r)
}

/// Resultant of f and g with respect to `var` via the subresultant PRS.
/// Returns a univariate polynomial in the other variable.
pub fn resultant(f: &BiPoly, g: &BiPoly, var: &str) -> Result<UniPoly> {
    let field = f.field.join(&g.field)?;
    let f = f.coerce(&field)?;
    let g = g.coerce(&field)?;
    let (mut a, mut b, other) = if var == f.vars.1 {
        (f.coeffs_in_v2(), g.coeffs_in_v2(), f.vars.0.clone())
    } else if var == f.vars.0 {
        (f.coeffs_in_v1(), g.coeffs_in_v1(), f.vars.1.clone())
    } else {
        return Err(Error::Invalid(format!("unknown variable {var}")));
    };
    let strip = |v: &mut Vec<UniPoly>| {
        while matches!(v.last(), Some(c) if c.is_zero()) {
            v.pop();
        }
    };
    strip(&mut a);
    strip(&mut b);
    let one = || UniPoly::constant(&other, AlgElem::one(&field));
    if a.is_empty() || b.is_empty() {
        return Ok(UniPoly::zero(&other, &field));
    }
    let mut s = 1i32;
    if a.len() < b.len() {
        if (a.len() - 1) % 2 == 1 && (b.len() - 1) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    // content extraction
    let ca = upoly_content(&a)?;
    let cb = upoly_content(&b)?;
    a = divide_coeffs(&a, &ca)?;
    b = divide_coeffs(&b, &cb)?;
    let mut t = ca.pow((b.len() - 1) as u64)?.mul(&cb.pow((a.len() - 1) as u64)?)?;
    let mut gco = one();
    let mut h = one();
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let d = da - db;
        let r = prem_vec(&a, &b)?;
        a = b;
        if r.is_empty() {
            // common factor in var: resultant vanishes (unless b was constant)
            if a.len() - 1 == 0 {
                break;
            }
            return Ok(UniPoly::zero(&other, &field));
        }
        let denom = gco.mul(&h.pow(d as u64)?)?;
        b = divide_coeffs(&r, &denom)?;
        let mut bst = b.clone();
        strip(&mut bst);
        b = bst;
        if b.is_empty() {
            if a.len() - 1 == 0 {
                break;
            }
            return Ok(UniPoly::zero(&other, &field));
        }
        gco = a.last().unwrap().clone();
        h = match d {
            0 => h,
            1 => gco.clone(),
            _ => gco.pow(d as u64)?.div_exact(&h.pow((d - 1) as u64)?)?,
        };
        if b.len() - 1 == 0 {
            let da2 = a.len() - 1;
            let lb = b[0].clone();
            let hf = if da2 == 0 {
                one()
            } else {
                lb.pow(da2 as u64)?.div_exact(&h.pow((da2 - 1) as u64)?)?
            };
            let mut res = t.mul(&hf)?;
            if s < 0 {
                res = res.neg();
            }
            return Ok(res);
        }
    }
    // both inputs were constant in var
    if s < 0 {
        t = t.neg();
    }
    Ok(t)
}

/// Gcd of two bivariate polynomials, computed in (K(v1))[v2] and lifted
/// back to a primitive polynomial times the gcd of the K[v1]-contents.
pub fn gcd_bivariate(f: &BiPoly, g: &BiPoly) -> Result<BiPoly> {
    let field = f.field.join(&g.field)?;
    let f = f.coerce(&field)?;
    let g = g.coerce(&field)?;
    if f.is_zero() {
        return Ok(g);
    }
    if g.is_zero() {
        return Ok(f);
    }
    let (tf, tgen) = field.adjoin_transcendental("_t_gcd")?;
    let to_ext = |p: &BiPoly| -> Result<UniPoly> {
        let mut coeffs: Vec<AlgElem> = vec![AlgElem::zero(&tf); p.deg2() as usize + 1];
        for (&(a, b), c) in &p.terms {
            let t = c.coerce(&tf)?.mul(&tgen.pow(a as u64))?;
            coeffs[b as usize] = coeffs[b as usize].add(&t)?;
        }
        UniPoly::new(&p.vars.1, &tf, coeffs)
    };
    let cf = upoly_content(&f.coeffs_in_v2())?;
    let cg = upoly_content(&g.coeffs_in_v2())?;
    let ccontent = cf.gcd(&cg)?;
    let uf = to_ext(&f)?;
    let ug = to_ext(&g)?;
    let ugcd = uf.gcd(&ug)?;
    // lift: each coefficient is a rational function in _t_gcd; clear the
    // common denominator, then take the primitive part
    let lifted = lift_from_function_field(&ugcd, &field, (&f.vars.0, &f.vars.1))?;
    let (prim, _, _) = lifted.strip_monomial_content();
    let cont = upoly_content(&prim.coeffs_in_v2())?;
    let prim_coeffs = divide_coeffs(&prim.coeffs_in_v2(), &cont)?;
    let prim = BiPoly::from_coeffs_in_v2((&f.vars.0, &f.vars.1), &field, &prim_coeffs)?;
    // multiply back the content gcd
    let cbp = BiPoly::from_coeffs_in_v2((&f.vars.0, &f.vars.1), &field, &[ccontent])?;
    prim.mul(&cbp)
}

/// Convert a univariate polynomial over K(_t) back to a bivariate
/// polynomial, clearing denominators.
fn lift_from_function_field(u: &UniPoly, base: &NumberField, vars: (&str, &str)) -> Result<BiPoly> {
    // scale by den of each coefficient: simplest exact route is to multiply
    // through by the product of denominators one coefficient at a time.
    let tlevel = u.field.num_levels();
    let mut coeffs = u.coeffs.clone();
    // clear denominators: multiply all coefficients by each denominator found
    loop {
        let mut cleared = true;
        for c in coeffs.clone() {
            if let Some(d) = frac_denominator(&c, tlevel) {
                for cc in coeffs.iter_mut() {
                    *cc = cc.mul(&d)?;
                }
                cleared = false;
                break;
            }
        }
        if cleared {
            break;
        }
    }
    let mut out = BiPoly::zero(vars, base);
    for (j, c) in coeffs.iter().enumerate() {
        let tc = c.top_coefficients()?;
        for (i, cc) in tc.iter().enumerate() {
            // cc lives in the field below _t, which is `base`
            out.add_term((i as u32, j as u32), cc.clone())?;
        }
    }
    Ok(out)
}

fn frac_denominator(c: &AlgElem, tlevel: usize) -> Option<AlgElem> {
    use crate::field::Repr;
    match c.repr() {
        Repr::Frac { level, den, .. } if *level == tlevel => Some(AlgElem::from_repr(
            c.field(),
            Repr::Pol {
                level: *level,
                coeffs: den.clone(),
            },
        )),
        _ => None,
    }
}

/// Squarefree part with all single-variable factors removed; the removed
/// factors are returned so constant solutions implied by K[v1]-factors are
/// not lost. Errors if f is constant.
pub fn squarefree_normalize(f: &BiPoly) -> Result<(BiPoly, Vec<BiPoly>)> {
    if f.is_constant() {
        return Err(Error::Invalid("cannot normalize a constant polynomial".into()));
    }
    let mut removed = Vec::new();
    let (mut cur, a, b) = f.strip_monomial_content();
    if a > 0 {
        removed.push(BiPoly::from_terms(
            (&f.vars.0, &f.vars.1),
            &f.field,
            [((a, 0), AlgElem::one(&f.field))],
        )?);
    }
    if b > 0 {
        removed.push(BiPoly::from_terms(
            (&f.vars.0, &f.vars.1),
            &f.field,
            [((0, b), AlgElem::one(&f.field))],
        )?);
    }
    // content in K[v1] (factors depending only on v1)
    if cur.deg2() > 0 {
        let cont = upoly_content(&cur.coeffs_in_v2())?;
        if !cont.is_constant() {
            removed.push(BiPoly::from_coeffs_in_v2((&f.vars.0, &f.vars.1), &f.field, &[cont.clone()])?);
            let coeffs = divide_coeffs(&cur.coeffs_in_v2(), &cont)?;
            cur = BiPoly::from_coeffs_in_v2((&f.vars.0, &f.vars.1), &cur.field, &coeffs)?;
        }
    }
    // content in K[v2]
    if cur.deg1() > 0 {
        let cont = upoly_content(&cur.coeffs_in_v1())?;
        if !cont.is_constant() {
            removed.push(BiPoly::from_coeffs_in_v1((&f.vars.0, &f.vars.1), &f.field, &[cont.clone()])?);
            let coeffs: Vec<UniPoly> = cur
                .coeffs_in_v1()
                .iter()
                .map(|c| if c.is_zero() { Ok(c.clone()) } else { c.div_exact(&cont) })
                .collect::<Result<Vec<_>>>()?;
            cur = BiPoly::from_coeffs_in_v1((&f.vars.0, &f.vars.1), &cur.field, &coeffs)?;
        }
    }
    if cur.is_constant() {
        return Err(Error::Invalid(
            "polynomial has only single-variable factors".into(),
        ));
    }
    // squarefree part: divide by gcd(f, df/dv2) (every remaining factor
    // involves v2, so repeats are caught here); one more pass against v1
    // for factors that became v1-only is not needed after content removal.
    for var_first in [false, true] {
        let d = if var_first {
            cur.partial_derivative(&cur.vars.0.clone())?
        } else {
            cur.partial_derivative(&cur.vars.1.clone())?
        };
        if d.is_zero() {
            continue;
        }
        let g = gcd_bivariate(&cur, &d)?;
        if g.is_constant() {
            continue;
        }
        removed.push(g.clone());
        // exact division cur / g in (K(v1))[v2] style: use coefficient
        // division via the function-field trick through gcd_bivariate's
        // normalization: divide with pseudo-division and exact check.
        cur = bipoly_div_exact(&cur, &g)?;
    }
    Ok((cur, removed))
}

/// Exact bivariate division (r must be zero).
pub fn bipoly_div_exact(f: &BiPoly, g: &BiPoly) -> Result<BiPoly> {
    let field = f.field.join(&g.field)?;
    let f2 = f.coerce(&field)?;
    let g2 = g.coerce(&field)?;
    let (tf, tgen) = field.adjoin_transcendental("_t_div")?;
    let to_ext = |p: &BiPoly| -> Result<UniPoly> {
        let mut coeffs: Vec<AlgElem> = vec![AlgElem::zero(&tf); p.deg2() as usize + 1];
        for (&(a, b), c) in &p.terms {
            let t = c.coerce(&tf)?.mul(&tgen.pow(a as u64))?;
            coeffs[b as usize] = coeffs[b as usize].add(&t)?;
        }
        UniPoly::new(&p.vars.1, &tf, coeffs)
    };
    let q = to_ext(&f2)?.div_exact(&to_ext(&g2)?)?;
    let lifted = lift_from_function_field(&q, &field, (&f.vars.0, &f.vars.1))?;
    // lifting may have multiplied by a denominator; verify and fix scale by
    // comparing lifted * g with f
    let prod = lifted.mul(&g2)?;
    if prod == f2 {
        return Ok(lifted);
    }
    // find the scalar/unipoly ratio f / prod coefficientwise
    let (e_f, c_f) = f2.terms.iter().next().ok_or(Error::DivisionByZero)?;
    let c_p = prod
        .terms
        .get(e_f)
        .ok_or_else(|| Error::Internal("inexact bivariate division".into()))?;
    let ratio = c_f.div(c_p)?;
    let scaled = lifted.scale(&ratio)?;
    if scaled.mul(&g2)? == f2 {
        Ok(scaled)
    } else {
        // general polynomial cofactor in v1: divide via UniPoly exact division
        let cf = upoly_content(&f2.coeffs_in_v2())?;
        let cp = upoly_content(&prod.coeffs_in_v2())?;
        let num = cf;
        let den = cp;
        let qq = num.div_exact(&den)?;
        let qbp = BiPoly::from_coeffs_in_v2((&f.vars.0, &f.vars.1), &field, &[qq])?;
        let fixed = lifted.mul(&qbp)?;
        if fixed.mul(&g2)? == f2 {
            Ok(fixed)
        } else {
            Err(Error::Internal("inexact bivariate division".into()))
        }
    }
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::field::NumberField;

    fn qq() -> NumberField {
        NumberField::rationals()
    }

    pub fn bp(terms: &[(u32, u32, i64)]) -> BiPoly {
        let q = qq();
        BiPoly::from_terms(
            ("y", "p"),
            &q,
            terms.iter().map(|&(a, b, c)| ((a, b), q.from_int(c))),
        )
        .unwrap()
    }

    /// 2x2/3x3 Sylvester determinant oracle for low-degree resultants.
    fn sylvester_resultant_oracle(f: &BiPoly, g: &BiPoly) -> UniPoly {
        // res_p with deg_p f = m, deg_p g = n: (m+n)x(m+n) determinant over K[y]
        let fa = f.coeffs_in_v2();
        let ga = g.coeffs_in_v2();
        let m = fa.len() - 1;
        let n = ga.len() - 1;
        let size = m + n;
        let field = f.field.clone();
        let zero = UniPoly::zero("y", &field);
        let mut mat = vec![vec![zero.clone(); size]; size];
        for r in 0..n {
            for (k, c) in fa.iter().enumerate() {
                mat[r][r + (m - k)] = c.clone();
            }
        }
        for r in 0..m {
            for (k, c) in ga.iter().enumerate() {
                mat[n + r][r + (n - k)] = c.clone();
            }
        }
        // cofactor expansion (size <= 4 in tests)
        fn det(mat: &[Vec<UniPoly>]) -> UniPoly {
            let n = mat.len();
            if n == 1 {
                return mat[0][0].clone();
            }
            let field = mat[0][0].field.clone();
            let mut acc = UniPoly::zero("y", &field);
            for j in 0..n {
                if mat[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<UniPoly>> = mat[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = mat[0][j].mul(&det(&minor)).unwrap();
                acc = if j % 2 == 0 {
                    acc.add(&term).unwrap()
                } else {
                    acc.sub(&term).unwrap()
                };
            }
            acc
        }
        det(&mat)
    }

    #[test]
    fn partial_derivatives() {
        let f = bp(&[(0, 2, 1), (1, 0, -1)]); // p^2 - y
        assert_eq!(f.partial_derivative("p").unwrap(), bp(&[(0, 1, 2)]));
        assert_eq!(f.partial_derivative("y").unwrap(), bp(&[(0, 0, -1)]));
        let g = bp(&[(1, 2, 4), (0, 0, -1)]); // 4p^2y - 1
        assert_eq!(g.partial_derivative("p").unwrap(), bp(&[(1, 1, 8)]));
    }

    #[test]
    fn resultant_matches_sylvester_oracle() {
        // res_p(p^2 - y, 2p) = -4y
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let g = bp(&[(0, 1, 2)]);
        let r = resultant(&f, &g, "p").unwrap();
        let oracle = sylvester_resultant_oracle(&f, &g);
        assert_eq!(r, oracle);
        assert_eq!(r, UniPoly::new("y", &qq(), vec![qq().from_int(0), qq().from_int(-4)]).unwrap());

        // res_p(p^2 + y^2 - 1, 2p) = 4(y^2 - 1)
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let r = resultant(&f, &g, "p").unwrap();
        let oracle = sylvester_resultant_oracle(&f, &g);
        assert_eq!(r, oracle);
        assert_eq!(
            r,
            UniPoly::new("y", &qq(), vec![qq().from_int(-4), qq().from_int(0), qq().from_int(4)]).unwrap()
        );

        // res_p(p - y, 1) = 1
        let f = bp(&[(0, 1, 1), (1, 0, -1)]);
        let one = bp(&[(0, 0, 1)]);
        let r = resultant(&f, &one, "p").unwrap();
        assert_eq!(r, UniPoly::constant("y", qq().one()));
    }

    #[test]
    fn resultant_detects_common_factor() {
        // f = (p - y) * (p + 1), g = (p - y) * (p + 2) share p - y
        let pm = bp(&[(0, 1, 1), (1, 0, -1)]);
        let f = pm.mul(&bp(&[(0, 1, 1), (0, 0, 1)])).unwrap();
        let g = pm.mul(&bp(&[(0, 1, 1), (0, 0, 2)])).unwrap();
        let r = resultant(&f, &g, "p").unwrap();
        assert!(r.is_zero());
        // and without the planted factor the resultant is nonzero
        let f2 = bp(&[(0, 1, 1), (0, 0, 1)]);
        let g2 = bp(&[(0, 1, 1), (0, 0, 2)]);
        assert!(!resultant(&f2, &g2, "p").unwrap().is_zero());
    }

    #[test]
    fn squarefree_of_square() {
        let base = bp(&[(0, 2, 1), (1, 0, -1)]); // p^2 - y
        let f = base.mul(&base).unwrap();
        let (sf, removed) = squarefree_normalize(&f).unwrap();
        assert_eq!(sf, base);
        assert!(!removed.is_empty());
    }

    #[test]
    fn squarefree_removes_single_variable_factor() {
        let base = bp(&[(0, 2, 1), (1, 0, -1)]);
        let f = base.mul(&bp(&[(1, 0, 1)])).unwrap(); // y * (p^2 - y)
        let (sf, removed) = squarefree_normalize(&f).unwrap();
        assert_eq!(sf, base);
        assert_eq!(removed.len(), 1);
        assert_eq!(removed[0], bp(&[(1, 0, 1)]));
    }

    #[test]
    fn squarefree_no_change_when_normalized() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]); // p^2 + y^2 - 1
        let (sf, removed) = squarefree_normalize(&f).unwrap();
        assert_eq!(sf, f);
        assert!(removed.is_empty());
    }

    #[test]
    fn squarefree_gcd_property() {
        // gcd(out, d out/dy) and gcd(out, d out/dp) constant
        for f in [
            bp(&[(0, 2, 1), (1, 0, -1)]).pow(2).unwrap(),
            bp(&[(1, 2, 4), (0, 0, -1)]),
            bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]).mul(&bp(&[(1, 0, 1)])).unwrap(),
        ] {
            let (sf, _) = squarefree_normalize(&f).unwrap();
            for v in ["y", "p"] {
                let d = sf.partial_derivative(v).unwrap();
                if d.is_zero() {
                    continue;
                }
                let g = gcd_bivariate(&sf, &d).unwrap();
                assert!(g.is_constant(), "gcd with d/d{v} not constant: {g}");
            }
        }
    }

    #[test]
    fn shift_and_eval() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]); // p^2 + y^2 - 1
        let q = qq();
        let s = f.shift(&q.from_int(1), &q.from_int(0)).unwrap();
        // f(1+u, v) = v^2 + u^2 + 2u
        assert_eq!(s, bp(&[(0, 2, 1), (2, 0, 1), (1, 0, 2)]));
        assert!(f.eval(&q.from_int(1), &q.from_int(0)).unwrap().is_zero());
    }
}
