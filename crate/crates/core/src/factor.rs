//! Univariate factorization over Q and over algebraic towers.
//!
//! Rational factorization is Zassenhaus-style: reduce to the monic integer
//! case, factor modulo a good prime, Hensel-lift past the Landau-Mignotte
//! bound and recombine. Extension fields use Trager's norm descent. Both
//! paths return complete factorizations into monic irreducibles.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::bipoly::{self, BiPoly};
use crate::field::{AlgElem, GenKind, NumberField, Q};
use crate::upoly::{adjoin_root, UniPoly};
use crate::{Error, Result};

/// One representative root of an irreducible factor, together with its
/// conjugacy-class data. `class_degree > 1` means the root stands for a
/// class of conjugates (the other roots of `class_minpoly`).
#[derive(Debug, Clone)]
pub struct Root {
    pub value: AlgElem,
    pub multiplicity: usize,
    pub field: NumberField,
    /// Minimal polynomial of the class over the base field (None when the
    /// root already lies in the base field).
    pub class_minpoly: Option<UniPoly>,
    pub class_degree: usize,
}

/// Complete factorization into monic irreducibles over the coefficient
/// field; the scalar unit is dropped. Multiplicities via Yun.
pub fn factor_univariate(f: &UniPoly) -> Result<Vec<(UniPoly, usize)>> {
    if f.is_zero() {
        return Err(Error::Invalid("cannot factor the zero polynomial".into()));
    }
    if f.is_constant() {
        return Ok(Vec::new());
    }
    if f
        .field
        .levels()
        .iter()
        .any(|l| matches!(l.kind, GenKind::Transcendental))
    {
        return Err(Error::Invalid(
            "factorization over transcendental extensions is not supported".into(),
        ));
    }
    let monic = f.make_monic()?;
    let mut out = Vec::new();
    for (part, mult) in yun_squarefree(&monic)? {
        for irr in factor_squarefree(&part)? {
            out.push((irr, mult));
        }
    }
    // deterministic order: by degree, then rendering
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| format!("{}", a.0).cmp(&format!("{}", b.0)))
    });
    Ok(out)
}

/// Yun's squarefree decomposition (characteristic zero).
pub fn yun_squarefree(f: &UniPoly) -> Result<Vec<(UniPoly, usize)>> {
    let f = f.make_monic()?;
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let df = f.derivative();
    let g = f.gcd(&df)?;
    let mut w = f.div_exact(&g)?;
    let mut y = df.div_exact(&g)?;
    let mut out = Vec::new();
    let mut i = 1usize;
    loop {
        let z = y.sub(&w.derivative())?;
        if z.is_zero() {
            if !w.is_constant() {
                out.push((w.make_monic()?, i));
            }
            break;
        }
        let h = w.gcd(&z)?;
        if !h.is_constant() {
            out.push((h.make_monic()?, i));
        }
        w = w.div_exact(&h)?;
        y = z.div_exact(&h)?;
        i += 1;
        if w.is_constant() {
            break;
        }
    }
    Ok(out)
}

/// Factor a monic squarefree polynomial over its (algebraic) field.
fn factor_squarefree(f: &UniPoly) -> Result<Vec<UniPoly>> {
    let d = f.degree().unwrap_or(0);
    if d <= 1 {
        return Ok(vec![f.clone()]);
    }
    if f.field.num_levels() == 0 {
        factor_squarefree_q(f)
    } else {
        factor_squarefree_trager(f)
    }
}

// ---------------------------------------------------------------------------
// rational case
// ---------------------------------------------------------------------------

fn to_integer_coeffs(f: &UniPoly) -> Result<Vec<BigInt>> {
    let mut den = BigInt::one();
    let mut qs = Vec::with_capacity(f.coeffs.len());
    for c in &f.coeffs {
        let q = c
            .as_rational()
            .ok_or_else(|| Error::Internal("expected rational coefficients".into()))?;
        den = den.lcm(q.denom());
        qs.push(q);
    }
    Ok(qs
        .iter()
        .map(|q| q.numer() * (&den / q.denom()))
        .collect())
}

fn primitive_part(c: &mut Vec<BigInt>) {
    let mut g = BigInt::zero();
    for x in c.iter() {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in c.iter_mut() {
        *x = &*x / &g;
    }
}

/// Factor a monic squarefree polynomial over Q. Strategy: monicize over Z
/// via f~(x) = L^(d-1) f(x/L), factor the monic integer polynomial, map
/// factors back through x -> Lx and take primitive parts.
fn factor_squarefree_q(f: &UniPoly) -> Result<Vec<UniPoly>> {
    let q = f.field.clone();
    let mut ic = to_integer_coeffs(f)?;
    primitive_part(&mut ic);
    let d = ic.len() - 1;
    let lc = ic[d].clone();
    // monicize: coefficient of x^i gets multiplied by L^(d-1-i)
    let mut monic: Vec<BigInt> = Vec::with_capacity(ic.len());
    for (i, c) in ic.iter().enumerate() {
        let e = (d - i) as u32;
        let mut v = c.clone();
        if e >= 1 {
            v *= lc.pow(e - 1);
        } else {
            // leading term: becomes 1 after dividing by L^d... handled below
        }
        monic.push(v);
    }
    monic[d] = BigInt::one();
    let factors = factor_monic_integer(&monic)?;
    let mut out = Vec::new();
    for g in factors {
        // map back: h(x) = g(L x), then primitive part
        let dg = g.len() - 1;
        let mut h: Vec<BigInt> = g
            .iter()
            .enumerate()
            .map(|(i, c)| c * lc.pow(i as u32))
            .collect();
        primitive_part(&mut h);
        let coeffs: Vec<AlgElem> = h
            .iter()
            .map(|c| q.from_q(Q::from_integer(c.clone())))
            .collect();
        let up = UniPoly::new(&f.var, &q, coeffs)?;
        debug_assert_eq!(up.degree(), Some(dg));
        out.push(up.make_monic()?);
    }
    Ok(out)
}

/// Rational root probe: returns one rational root of f if any exists.
/// Best-effort when coefficients involve generators (None means "no root
/// found by this probe", not a certificate).
pub fn rational_root(f: &UniPoly) -> Result<Option<AlgElem>> {
    if f.coeffs.iter().any(|c| c.as_rational().is_none()) {
        return Ok(None);
    }
    let mut ic = to_integer_coeffs(f)?;
    primitive_part(&mut ic);
    while ic.first().map(|c| c.is_zero()).unwrap_or(false) {
        // x = 0 is a root
        return Ok(Some(f.field.from_int(0)));
    }
    if ic.len() < 2 {
        return Ok(None);
    }
    let a0 = ic[0].abs();
    let an = ic[ic.len() - 1].abs();
    for p in divisors(&a0) {
        for qd in divisors(&an) {
            for sign in [1i64, -1] {
                let cand = Q::new(&p * BigInt::from(sign), qd.clone());
                let val = f.eval(&f.field.from_q(cand.clone()))?;
                if val.is_zero() {
                    return Ok(Some(f.field.from_q(cand)));
                }
            }
        }
    }
    Ok(None)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // n is expected small at desk scale; fall back to 1 and |n| if huge
    if let Some(v) = n.abs().to_u64_digits().1.first().copied().filter(|_| n.abs() < BigInt::from(1_000_000u64)) {
        let v = v.max(1);
        let mut out = Vec::new();
        let mut i = 1u64;
        while i * i <= v {
            if v % i == 0 {
                out.push(BigInt::from(i));
                if i != v / i {
                    out.push(BigInt::from(v / i));
                }
            }
            i += 1;
        }
        out.sort();
        out
    } else {
        vec![BigInt::one(), n.abs().max(BigInt::one())]
    }
}

// --- arithmetic mod a small prime -----------------------------------------

const PRIMES: &[u64] = &[
    4099, 4111, 4127, 4129, 4133, 4139, 4153, 4157, 4159, 4177, 4201, 4211,
    4217, 4219, 4229, 4231, 4241, 4243, 4253, 4259, 4261, 4271, 4273, 4283,
];

fn pm_strip(a: &mut Vec<u64>) {
    while matches!(a.last(), Some(0)) {
        a.pop();
    }
}

fn pm_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + (x as u128 * y as u128 % p as u128) as u64) % p;
        }
    }
    pm_strip(&mut out);
    out
}

fn pm_inv(a: u64, p: u64) -> u64 {
    // Fermat
    pm_pow_scalar(a, p - 2, p)
}

fn pm_pow_scalar(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

fn pm_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    pm_strip(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lcinv = pm_inv(b[db], p);
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let e = r.len() - 1 - db;
        let c = (r[r.len() - 1] as u128 * lcinv as u128 % p as u128) as u64;
        q[e] = c;
        for j in 0..=db {
            let t = (c as u128 * b[j] as u128 % p as u128) as u64;
            r[e + j] = (r[e + j] + p - t) % p;
        }
        pm_strip(&mut r);
        if r.is_empty() {
            break;
        }
    }
    (q, r)
}

fn pm_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    pm_strip(&mut x);
    pm_strip(&mut y);
    while !y.is_empty() {
        let (_, r) = pm_divrem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lc) = x.last() {
        let inv = pm_inv(lc, p);
        for c in x.iter_mut() {
            *c = (*c as u128 * inv as u128 % p as u128) as u64;
        }
    }
    x
}

fn pm_derivative(a: &[u64], p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for (i, &c) in a.iter().enumerate().skip(1) {
        out.push((c as u128 * (i as u64 % p) as u128 % p as u128) as u64);
    }
    pm_strip(&mut out);
    out
}

fn pm_powmod(base: &[u64], mut e: num::BigUint, modp: &[u64], p: u64) -> Vec<u64> {
    use num::BigUint;
    let mut acc = vec![1u64];
    let mut b = pm_divrem(base, modp, p).1;
    let two = BigUint::from(2u32);
    while !e.is_zero() {
        if (&e % &two) == BigUint::one() {
            acc = pm_divrem(&pm_mul(&acc, &b, p), modp, p).1;
        }
        b = pm_divrem(&pm_mul(&b, &b, p), modp, p).1;
        e >>= 1;
    }
    acc
}

/// Factor a monic squarefree polynomial mod p into monic irreducibles:
/// distinct-degree then Cantor-Zassenhaus equal-degree splitting.
fn pm_factor_squarefree(f: &[u64], p: u64) -> Vec<Vec<u64>> {
    use num::BigUint;
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x = vec![0u64, 1u64];
    let mut h = x.clone();
    let mut d = 0usize;
    while rest.len() - 1 >= 2 * (d + 1) {
        d += 1;
        h = pm_powmod(&h, BigUint::from(p), &rest, p);
        // gcd(rest, h - x)
        let mut hx = h.clone();
        while hx.len() < 2 {
            hx.push(0);
        }
        hx[1] = (hx[1] + p - 1) % p;
        pm_strip(&mut hx);
        let g = pm_gcd(&rest, &hx, p);
        if g.len() > 1 {
            for irr in pm_equal_degree(&g, d, p) {
                out.push(irr);
            }
            rest = pm_divrem(&rest, &g, p).0;
            h = pm_divrem(&h, &rest, p).1;
        }
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting (odd p).
fn pm_equal_degree(f: &[u64], d: usize, p: u64) -> Vec<Vec<u64>> {
    use num::BigUint;
    let n = f.len() - 1;
    if n == d {
        return vec![f.to_vec()];
    }
    let mut rng_state: u64 = 0x9E3779B97F4A7C15 ^ (n as u64) << 8 ^ d as u64;
    let mut next = || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        rng_state
    };
    loop {
        // random poly of degree < n
        let mut a: Vec<u64> = (0..n).map(|_| next() % p).collect();
        pm_strip(&mut a);
        if a.len() <= 1 {
            continue;
        }
        let g = pm_gcd(f, &a, p);
        if g.len() > 1 && g.len() - 1 < n {
            let mut out = pm_equal_degree(&g, d, p);
            out.extend(pm_equal_degree(&pm_divrem(f, &g, p).0, d, p));
            return out;
        }
        // b = a^((p^d - 1)/2) mod f
        let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
        let mut b = pm_powmod(&a, e, f, p);
        if b.is_empty() {
            continue;
        }
        b[0] = (b[0] + p - 1) % p;
        pm_strip(&mut b);
        if b.is_empty() {
            continue;
        }
        let g = pm_gcd(f, &b, p);
        if g.len() > 1 && g.len() - 1 < n {
            let mut out = pm_equal_degree(&g, d, p);
            out.extend(pm_equal_degree(&pm_divrem(f, &g, p).0, d, p));
            return out;
        }
    }
}

// --- arithmetic mod a big modulus (for Hensel lifting) ---------------------

fn bm_norm(a: &mut Vec<BigInt>, m: &BigInt) {
    for c in a.iter_mut() {
        *c = c.mod_floor(m);
    }
    while matches!(a.last(), Some(c) if c.is_zero()) {
        a.pop();
    }
}

fn bm_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    bm_norm(&mut out, m);
    out
}

fn bm_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out.push(x + y);
    }
    bm_norm(&mut out, m);
    out
}

fn bm_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out.push(x - y);
    }
    bm_norm(&mut out, m);
    out
}

/// Division by a monic polynomial mod m.
fn bm_divrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut r = a.to_vec();
    bm_norm(&mut r, m);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db {
        let e = r.len() - 1 - db;
        let c = r[r.len() - 1].clone();
        q[e] = c.clone();
        for j in 0..=db {
            let t = (&c * &b[j]).mod_floor(m);
            r[e + j] = (&r[e + j] - t).mod_floor(m);
        }
        bm_norm(&mut r, m);
        if r.is_empty() {
            break;
        }
    }
    bm_norm(&mut q, m);
    (q, r)
}

/// One quadratic Hensel step: from f = g h (mod m) with Bezout data
/// s g + t h = 1 (mod m), to the same relations mod m^2. g, h monic.
#[allow(clippy::too_many_arguments)]
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let m2 = m * m;
    let e = bm_sub(f, &bm_mul(g, h, &m2), &m2);
    let se = bm_mul(s, &e, &m2);
    let (q, r) = bm_divrem_monic(&se, h, &m2);
    let gs = bm_add(&bm_add(g, &bm_mul(t, &e, &m2), &m2), &bm_mul(&q, g, &m2), &m2);
    let hs = bm_add(h, &r, &m2);
    // refresh Bezout
    let mut b = bm_sub(
        &bm_add(&bm_mul(s, &gs, &m2), &bm_mul(t, &hs, &m2), &m2),
        &[BigInt::one()],
        &m2,
    );
    bm_norm(&mut b, &m2);
    let sb = bm_mul(s, &b, &m2);
    let (c, d) = bm_divrem_monic(&sb, &hs, &m2);
    let ss = bm_sub(s, &d, &m2);
    let ts = bm_sub(&bm_sub(t, &bm_mul(t, &b, &m2), &m2), &bm_mul(&c, &gs, &m2), &m2);
    (gs, hs, ss, ts)
}

fn pm_to_big(a: &[u64]) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Extended Euclid mod p for the initial Bezout pair.
fn pm_ext_gcd(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    pm_strip(&mut r0);
    pm_strip(&mut r1);
    let mut s0 = vec![1u64];
    let mut s1: Vec<u64> = Vec::new();
    let mut t0: Vec<u64> = Vec::new();
    let mut t1 = vec![1u64];
    while !r1.is_empty() {
        let (q, r) = pm_divrem(&r0, &r1, p);
        let qs = pm_mul(&q, &s1, p);
        let qt = pm_mul(&q, &t1, p);
        let ns: Vec<u64> = {
            let n = s0.len().max(qs.len());
            let mut v = vec![0u64; n];
            for i in 0..n {
                let x = s0.get(i).copied().unwrap_or(0);
                let y = qs.get(i).copied().unwrap_or(0);
                v[i] = (x + p - y) % p;
            }
            pm_strip(&mut v);
            v
        };
        let nt: Vec<u64> = {
            let n = t0.len().max(qt.len());
            let mut v = vec![0u64; n];
            for i in 0..n {
                let x = t0.get(i).copied().unwrap_or(0);
                let y = qt.get(i).copied().unwrap_or(0);
                v[i] = (x + p - y) % p;
            }
            pm_strip(&mut v);
            v
        };
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, ns);
        t0 = std::mem::replace(&mut t1, nt);
    }
    (r0, s0, t0)
}

/// Lift the factorization f = prod(factors) (mod p) to (mod p^(2^steps)),
/// all polynomials monic. Returns factors mod the final modulus.
fn hensel_lift_tree(
    f: &[BigInt],
    factors: &[Vec<u64>],
    p: u64,
    target: &BigInt,
) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        let mut r = f.to_vec();
        bm_norm(&mut r, target);
        return vec![r];
    }
    let mid = factors.len() / 2;
    let (left, right) = factors.split_at(mid);
    let gl = left.iter().fold(vec![1u64], |acc, g| pm_mul(&acc, g, p));
    let gr = right.iter().fold(vec![1u64], |acc, g| pm_mul(&acc, g, p));
    let (gcd, s, t) = pm_ext_gcd(&gl, &gr, p);
    debug_assert_eq!(gcd.len(), 1);
    let ginv = pm_inv(gcd[0], p);
    let scale = |v: &[u64]| -> Vec<u64> {
        v.iter()
            .map(|&c| (c as u128 * ginv as u128 % p as u128) as u64)
            .collect()
    };
    let mut g = pm_to_big(&gl);
    let mut h = pm_to_big(&gr);
    let mut s = pm_to_big(&scale(&s));
    let mut t = pm_to_big(&scale(&t));
    let mut m = BigInt::from(p);
    while &m < target {
        let (gs, hs, ss, ts) = hensel_step(f, &g, &h, &s, &t, &m);
        g = gs;
        h = hs;
        s = ss;
        t = ts;
        m = &m * &m;
    }
    bm_norm(&mut g, target);
    bm_norm(&mut h, target);
    let mut out = hensel_lift_tree(&g, left, p, target);
    out.extend(hensel_lift_tree(&h, right, p, target));
    out
}

fn symmetric_rep(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    a.iter()
        .map(|c| {
            let v = c.mod_floor(m);
            if v > half {
                v - m
            } else {
                v
            }
        })
        .collect()
}

fn zx_divides(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    // exact division of integer polys, g monic
    let dg = g.len() - 1;
    let mut r = f.to_vec();
    if r.len() <= dg {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - dg];
    while r.len() > dg {
        let c = r[r.len() - 1].clone();
        let e = r.len() - 1 - dg;
        q[e] = c.clone();
        for j in 0..=dg {
            r[e + j] -= &c * &g[j];
        }
        while matches!(r.last(), Some(x) if x.is_zero()) {
            r.pop();
        }
        if r.len() <= dg {
            break;
        }
    }
    if r.is_empty() {
        Some(q)
    } else {
        None
    }
}

/// Factor a monic squarefree integer polynomial into monic irreducibles
/// over Z (equivalently Q).
fn factor_monic_integer(f: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
    let d = f.len() - 1;
    if d <= 1 {
        return Ok(vec![f.to_vec()]);
    }
    // pick a prime keeping f squarefree
    let mut chosen = None;
    for &p in PRIMES {
        let fp: Vec<u64> = f
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect();
        let mut fp = fp;
        pm_strip(&mut fp);
        if fp.len() != f.len() {
            continue;
        }
        let g = pm_gcd(&fp, &pm_derivative(&fp, p), p);
        if g.len() == 1 {
            chosen = Some((p, fp));
            break;
        }
    }
    let (p, fp) = chosen.ok_or_else(|| Error::Internal("no good prime found".into()))?;
    let modular = pm_factor_squarefree(&fp, p);
    if modular.len() == 1 {
        return Ok(vec![f.to_vec()]);
    }
    // Landau-Mignotte bound for monic factors of monic f
    let norm2: f64 = f
        .iter()
        .map(|c| {
            let v = c.to_string().parse::<f64>().unwrap_or(f64::MAX);
            v * v
        })
        .sum::<f64>()
        .sqrt();
    let bound = 2.0f64.powi(d as i32 + 1) * norm2.max(1.0);
    let mut target = BigInt::from(p);
    while target.to_string().parse::<f64>().unwrap_or(f64::MAX) <= 2.0 * bound {
        target = &target * &target;
    }
    let lifted = hensel_lift_tree(f, &modular, p, &target);
    // recombination
    let mut avail: Vec<Vec<BigInt>> = lifted;
    let mut rest = f.to_vec();
    let mut out = Vec::new();
    let mut size = 1usize;
    'outer: while 2 * size <= avail.len() {
        let idxs: Vec<usize> = (0..avail.len()).collect();
        for combo in combinations(&idxs, size) {
            let mut prod = vec![BigInt::one()];
            for &i in &combo {
                prod = bm_mul(&prod, &avail[i], &target);
            }
            let cand = symmetric_rep(&prod, &target);
            if let Some(qt) = zx_divides(&rest, &cand) {
                out.push(cand);
                rest = qt;
                let mut keep = Vec::new();
                for (i, v) in avail.into_iter().enumerate() {
                    if !combo.contains(&i) {
                        keep.push(v);
                    }
                }
                avail = keep;
                continue 'outer;
            }
        }
        size += 1;
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    Ok(out)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// extension fields: Trager's norm descent
// ---------------------------------------------------------------------------

fn factor_squarefree_trager(f: &UniPoly) -> Result<Vec<UniPoly>> {
    let field = f.field.clone();
    let top = field.num_levels();
    let sub = field.parent();
    let alpha = field.generator(top);
    let minpoly = field
        .minpoly_at(top)
        .ok_or_else(|| Error::Invalid("transcendental level in factorization".into()))?;
    // minpoly as BiPoly in (x, z) over the subfield (no x part)
    let mut mbi = BiPoly::zero(("x", "z"), &sub);
    for (j, c) in minpoly.iter().enumerate() {
        mbi.add_term((0, j as u32), c.clone())?;
    }
    let shifts: &[i64] = &[0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5];
    for &k in shifts {
        // g_k(x) = f(x - k*alpha), coefficients in L; rewrite alpha -> z
        let shift = alpha.scale(&crate::field::q_from(-k));
        let gk = f.shift(&shift)?;
        let mut gbi = BiPoly::zero(("x", "z"), &sub);
        let mut ok = true;
        for (i, c) in gk.coeffs.iter().enumerate() {
            // c is an element of L = sub(alpha); expand in powers of alpha
            let comps = c.top_coefficients()?;
            if comps.len() > minpoly.len() - 1 + 1 {
                ok = false;
                break;
            }
            for (j, cc) in comps.iter().enumerate() {
                gbi.add_term((i as u32, j as u32), cc.clone())?;
            }
        }
        if !ok {
            continue;
        }
        let norm = bipoly::resultant(&mbi, &gbi, "z")?;
        if norm.is_zero() {
            continue;
        }
        let dnorm = norm.derivative();
        if !norm.gcd(&dnorm)?.is_constant() {
            continue;
        }
        // norm is squarefree: factor it over the subfield
        let nf = norm.make_monic()?;
        let subfactors = factor_squarefree_over(&nf)?;
        if subfactors.len() == 1 {
            return Ok(vec![f.make_monic()?]);
        }
        let mut out = Vec::new();
        for h in subfactors {
            // gcd(f(x), h(x + k*alpha)) over L
            let hl = h.coerce(&field)?;
            let hshift = hl.shift(&alpha.scale(&crate::field::q_from(k)))?;
            let g = f.gcd(&hshift)?;
            if !g.is_constant() {
                out.push(g.make_monic()?);
            }
        }
        return Ok(out);
    }
    Err(Error::Internal(
        "no squarefree norm found in Trager descent".into(),
    ))
}

fn factor_squarefree_over(f: &UniPoly) -> Result<Vec<UniPoly>> {
    factor_squarefree(f)
}

// ---------------------------------------------------------------------------
// roots
// ---------------------------------------------------------------------------

/// One representative root per irreducible factor, adjoining an extension
/// of the input field where necessary (rational/in-field roots come first,
/// so towers stay minimal).
pub fn roots_in_closure(f: &UniPoly) -> Result<Vec<Root>> {
    if f.is_zero() || f.is_constant() {
        return Err(Error::Invalid(
            "roots_in_closure requires a nonzero non-constant polynomial".into(),
        ));
    }
    let base = f.field.clone();
    let mut out = Vec::new();
    for (irr, mult) in factor_univariate(f)? {
        let d = irr.degree().unwrap();
        if d == 1 {
            let root = irr.coeff(0).neg();
            out.push(Root {
                value: root,
                multiplicity: mult,
                field: base.clone(),
                class_minpoly: None,
                class_degree: 1,
            });
        } else {
            let (ext, gen) = adjoin_root(&base, &irr, true)?;
            out.push(Root {
                value: gen,
                multiplicity: mult,
                field: ext,
                class_minpoly: Some(irr),
                class_degree: d,
            });
        }
    }
    // in-field roots first
    out.sort_by_key(|r| r.class_degree);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qq() -> NumberField {
        NumberField::rationals()
    }

    fn upoly(coeffs: &[i64]) -> UniPoly {
        let q = qq();
        UniPoly::new("y", &q, coeffs.iter().map(|&c| q.from_int(c)).collect()).unwrap()
    }

    fn check_product(f: &UniPoly, factors: &[(UniPoly, usize)]) {
        let mut prod = UniPoly::constant(&f.var, AlgElem::one(&f.field));
        for (g, m) in factors {
            prod = prod.mul(&g.pow(*m as u64).unwrap()).unwrap();
        }
        let fm = f.make_monic().unwrap();
        let pm = prod.coerce(&fm.field).unwrap_or(prod.clone());
        assert_eq!(fm, pm, "product of factors differs from input");
    }

    #[test]
    fn splits_linear_factors() {
        let f = upoly(&[-1, 0, 1]); // y^2 - 1
        let fs = factor_univariate(&f).unwrap();
        assert_eq!(fs.len(), 2);
        check_product(&f, &fs);
    }

    #[test]
    fn irreducible_quadratic_stays() {
        let f = upoly(&[-2, 0, 1]); // y^2 - 2
        let fs = factor_univariate(&f).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0, f.make_monic().unwrap());
    }

    #[test]
    fn splits_over_extension() {
        // y^2 - 2 over Q(alpha) with alpha^2 = 2 splits
        let q = qq();
        let (ext, alpha) = adjoin_root(&q, &upoly(&[-2, 0, 1]), true).unwrap();
        let f = upoly(&[-2, 0, 1]).coerce(&ext).unwrap();
        let fs = factor_univariate(&f).unwrap();
        assert_eq!(fs.len(), 2);
        check_product(&f, &fs);
        // the roots are +-alpha
        let roots: Vec<AlgElem> = fs.iter().map(|(g, _)| g.coeff(0).neg()).collect();
        assert!(roots.contains(&alpha));
        assert!(roots.contains(&alpha.neg()));
    }

    #[test]
    fn nontrivial_integer_factorization() {
        // (y^2 + y + 1)(y^3 - 2) with a repeated quadratic
        let a = upoly(&[1, 1, 1]);
        let b = upoly(&[-2, 0, 0, 1]);
        let f = a.mul(&a).unwrap().mul(&b).unwrap();
        let fs = factor_univariate(&f).unwrap();
        check_product(&f, &fs);
        assert_eq!(fs.len(), 2);
        let mults: Vec<usize> = fs.iter().map(|x| x.1).collect();
        assert!(mults.contains(&2) && mults.contains(&1));
    }

    #[test]
    fn non_monic_rational_factorization() {
        // 4y^2 - 1 = (2y-1)(2y+1); monic output (y - 1/2)(y + 1/2)
        let f = upoly(&[-1, 0, 4]);
        let fs = factor_univariate(&f).unwrap();
        assert_eq!(fs.len(), 2);
        check_product(&f, &fs);
    }

    #[test]
    fn roots_with_classes() {
        let f = upoly(&[-2, 0, 1]); // y^2 - 2
        let roots = roots_in_closure(&f).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].class_degree, 2);
        let r = &roots[0].value;
        assert_eq!(r.mul(r).unwrap(), roots[0].field.from_int(2));
    }

    #[test]
    fn roots_rational_first() {
        // (y-1)(y^2-3)
        let f = upoly(&[-1, 1]).mul(&upoly(&[-3, 0, 1])).unwrap();
        let roots = roots_in_closure(&f).unwrap();
        assert_eq!(roots[0].class_degree, 1);
        assert_eq!(roots[0].value, qq().from_int(1));
        assert_eq!(roots[1].class_degree, 2);
    }

    #[test]
    fn yun_multiplicities() {
        let f = upoly(&[-1, 1]).pow(3).unwrap().mul(&upoly(&[1, 1])).unwrap();
        let parts = yun_squarefree(&f).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().any(|(g, m)| *m == 3 && g == &upoly(&[-1, 1])));
        assert!(parts.iter().any(|(g, m)| *m == 1 && g == &upoly(&[1, 1])));
    }

    #[test]
    fn trager_over_cubic_tower() {
        // over Q(beta), beta^3 = 6: factor y^3 - 6 -> (y - beta)(quadratic)
        let q = qq();
        let (ext, beta) = adjoin_root(&q, &upoly(&[-6, 0, 0, 1]), true).unwrap();
        let f = upoly(&[-6, 0, 0, 1]).coerce(&ext).unwrap();
        let fs = factor_univariate(&f).unwrap();
        check_product(&f, &fs);
        assert_eq!(fs.len(), 2);
        let linear = fs.iter().find(|(g, _)| g.degree() == Some(1)).unwrap();
        assert_eq!(linear.0.coeff(0).neg(), beta);
    }
}
