//! Local analysis of the curve F(y,p) = 0: critical points on the
//! compactified curve and Newton-Puiseux computation of the places (local
//! parametrizations) centered there.

use num::{BigInt, One, Signed};

use crate::bipoly::{resultant, BiPoly};
use crate::factor::roots_in_closure;
use crate::field::{AlgElem, NumberField, Q};
use crate::series::{substitute_bipoly, ExpansionPoint, PuiseuxSeries};
use crate::upoly::UniPoly;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum Coord {
    Finite(AlgElem),
    Infinity,
}

impl Coord {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Coord::Infinity)
    }

    pub fn finite(&self) -> Option<&AlgElem> {
        match self {
            Coord::Finite(v) => Some(v),
            Coord::Infinity => None,
        }
    }

    fn key(&self) -> String {
        match self {
            Coord::Infinity => "inf".to_string(),
            Coord::Finite(v) => format!("{}@[{}]", v, v.field().describe().join(";")),
        }
    }
}

impl std::fmt::Display for Coord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coord::Infinity => write!(f, "inf"),
            Coord::Finite(v) => write!(f, "{}", v),
        }
    }
}

/// A point of the compactified curve, possibly with infinite coordinates.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub y0: Coord,
    pub p0: Coord,
    pub field: NumberField,
}

impl CurvePoint {
    /// Build a point and verify it lies on the closure of F = 0 (infinite
    /// coordinates are checked after clearing denominators).
    pub fn new(f: &BiPoly, y0: Coord, p0: Coord) -> Result<CurvePoint> {
        let mut field = f.field.clone();
        if let Coord::Finite(v) = &y0 {
            field = field.join(&v.field())?;
        }
        if let Coord::Finite(v) = &p0 {
            field = field.join(&v.field())?;
        }
        let mut g = f.coerce(&field)?;
        let yv = match &y0 {
            Coord::Finite(v) => v.coerce(&field)?,
            Coord::Infinity => {
                g = g.invert_var(true);
                AlgElem::zero(&field)
            }
        };
        let pv = match &p0 {
            Coord::Finite(v) => v.coerce(&field)?,
            Coord::Infinity => {
                g = g.invert_var(false);
                AlgElem::zero(&field)
            }
        };
        if !g.eval(&yv, &pv)?.is_zero() {
            return Err(Error::NotOnCurve);
        }
        Ok(CurvePoint { y0, p0, field })
    }

    pub fn key(&self) -> String {
        format!("({},{})", self.y0.key(), self.p0.key())
    }
}

impl std::fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.y0, self.p0)
    }
}

/// A place of the curve: an irreducible local parametrization (a(t), b(t))
/// truncated far enough for the downstream solution-place analysis.
#[derive(Debug, Clone)]
pub struct Place {
    pub center: CurvePoint,
    pub a: PuiseuxSeries,
    pub b: PuiseuxSeries,
    /// ord_t(a - y0) for finite y0; ord_t(1/a) when y0 is infinite
    pub e: u64,
    pub field: NumberField,
}

impl Place {
    /// Number of conjugate places this one represents over `base`.
    pub fn conjugates_over(&self, base: &NumberField) -> u64 {
        let b = base.tower_degree().max(1);
        self.field.tower_degree() / b
    }
}

/// The truncation order guaranteeing uniqueness of the downstream solution
/// truncations: 2(deg_p - 1) deg_y + 1 when F is monic in p, and the
/// conservative 2 deg_p deg_y + 1 otherwise.
pub fn truncation_bound(f: &BiPoly) -> u32 {
    let dy = f.deg1();
    let dp = f.deg2();
    let lc = f.coeffs_in_v2().pop();
    let monic = lc.map(|c| c.is_constant()).unwrap_or(false);
    if monic {
        (2 * (dp.saturating_sub(1)) * dy + 1).max(1)
    } else {
        2 * dp * dy + 1
    }
}

fn push_point(out: &mut Vec<CurvePoint>, seen: &mut std::collections::BTreeSet<String>, p: CurvePoint) {
    let k = p.key();
    if seen.insert(k) {
        out.push(p);
    }
}

/// All critical points of the compactified curve: p0 in {0, inf}, the
/// vanishing locus of dF/dp, and points with y0 = inf (including the
/// detection of (inf, inf)).
pub fn critical_points(f: &BiPoly) -> Result<Vec<CurvePoint>> {
    if f.deg1() == 0 || f.deg2() == 0 {
        return Err(Error::Invalid(
            "equation must involve both y and y'".into(),
        ));
    }
    let field = f.field.clone();
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();

    // p0 = 0: roots of F(y, 0)
    let fy0 = f.eval_v2(&AlgElem::zero(&field))?;
    if fy0.is_zero() {
        return Err(Error::Invalid(
            "F(y,0) vanishes identically; apply squarefree normalization first".into(),
        ));
    }
    if !fy0.is_constant() {
        for r in roots_in_closure(&fy0)? {
            let p = CurvePoint::new(f, Coord::Finite(r.value), Coord::Finite(AlgElem::zero(&r.field)))?;
            push_point(&mut out, &mut seen, p);
        }
    }

    // dF/dp = 0 locus with finite coordinates
    let fp = f.partial_derivative(&f.vars.1)?;
    let candidates: Vec<crate::factor::Root> = if fp.deg2() == 0 {
        // F_p depends on y only
        let a = fp.eval_v2(&AlgElem::zero(&field))?;
        if a.is_constant() {
            Vec::new()
        } else {
            roots_in_closure(&a)?
        }
    } else {
        let res = resultant(f, &fp, &f.vars.1)?;
        if res.is_zero() {
            return Err(Error::Invalid(
                "F and dF/dp share a factor; apply squarefree normalization first".into(),
            ));
        }
        if res.is_constant() {
            Vec::new()
        } else {
            roots_in_closure(&res)?
        }
    };
    for r in candidates {
        let fe = f.coerce(&r.field)?;
        let fpe = fp.coerce(&r.field)?;
        let fy = fe.eval_v1(&r.value)?;
        let fpy = fpe.eval_v1(&r.value)?;
        let g = if fpy.is_zero() { fy.clone() } else { fy.gcd(&fpy)? };
        if g.is_constant() {
            continue;
        }
        for pr in roots_in_closure(&g)? {
            let y0 = r.value.coerce(&pr.field)?;
            let p = CurvePoint::new(f, Coord::Finite(y0), Coord::Finite(pr.value))?;
            push_point(&mut out, &mut seen, p);
        }
    }

    // p0 = inf: zeros of the leading coefficient in p
    let lcp = f
        .coeffs_in_v2()
        .pop()
        .ok_or_else(|| Error::Internal("empty polynomial".into()))?;
    if !lcp.is_constant() {
        for r in roots_in_closure(&lcp)? {
            let p = CurvePoint::new(f, Coord::Finite(r.value), Coord::Infinity)?;
            push_point(&mut out, &mut seen, p);
        }
    }

    // y0 = inf: zeros of the leading coefficient in y
    let lcy = f
        .coeffs_in_v1()
        .pop()
        .ok_or_else(|| Error::Internal("empty polynomial".into()))?;
    if !lcy.is_constant() {
        for r in roots_in_closure(&lcy)? {
            let p = CurvePoint::new(f, Coord::Infinity, Coord::Finite(r.value))?;
            push_point(&mut out, &mut seen, p);
        }
    }

    // (inf, inf): on the closure iff the top bidegree coefficient vanishes
    if f.terms.get(&(f.deg1(), f.deg2())).is_none() {
        push_point(
            &mut out,
            &mut seen,
            CurvePoint::new(f, Coord::Infinity, Coord::Infinity)?,
        );
    }

    out.sort_by_key(|p| {
        (
            p.y0.is_infinite(),
            p.p0.is_infinite(),
            p.key(),
        )
    });
    Ok(out)
}

fn alg_powi(v: &AlgElem, e: i64) -> Result<AlgElem> {
    if e >= 0 {
        Ok(v.pow(e as u64))
    } else {
        Ok(v.inv()?.pow((-e) as u64))
    }
}

fn swap_bipoly(h: &BiPoly) -> Result<BiPoly> {
    let mut out = BiPoly::zero((h.vars.1.as_str(), h.vars.0.as_str()), &h.field);
    for ((i, j), c) in h.terms.iter() {
        out.add_term((*j, *i), c.clone())?;
    }
    Ok(out)
}

fn coeff_at(h: &BiPoly, e: (u32, u32)) -> AlgElem {
    h.terms
        .get(&e)
        .cloned()
        .unwrap_or_else(|| AlgElem::zero(&h.field))
}

/// Branch of v(u) through the origin as a parametrization (U(t), V(t)),
/// both of order >= 1.
type RawBranch = (PuiseuxSeries, PuiseuxSeries, NumberField);

/// Implicit-function recursion at a point regular in the v direction:
/// v = phi(u) with integer exponents, solved coefficient by coefficient.
fn linear_branch(h: &BiPoly, field: &NumberField, prec: i64) -> Result<RawBranch> {
    let l = coeff_at(h, (0, 1));
    debug_assert!(!l.is_zero());
    let t = PuiseuxSeries::monomial(AlgElem::one(field), 1, 1, "t", ExpansionPoint::Zero);
    let mut phi = PuiseuxSeries::zero(field, "t", ExpansionPoint::Zero);
    let mut exact = false;
    for k in 1..=prec {
        let r = substitute_bipoly(h, &t, &phi)?;
        if r.is_exactly_zero() {
            exact = true;
            break;
        }
        let rk = r.coeff_at(&Q::from_integer(BigInt::from(k)));
        if !rk.is_zero() {
            let ak = rk.div(&l)?.neg();
            phi = phi.add(&PuiseuxSeries::monomial(ak, k, 1, "t", ExpansionPoint::Zero))?;
        }
    }
    if !exact && substitute_bipoly(h, &t, &phi)?.is_exactly_zero() {
        exact = true;
    }
    if !exact {
        phi = phi.truncate(&Q::from_integer(BigInt::from(prec + 1)));
    }
    Ok((t, phi, field.clone()))
}

/// Lower convex hull of support points (j = v-exponent, i = u-exponent);
/// returns the hull vertices in increasing j.
fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            // keep right turns (we want minimal i)
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// All branches v(u) of h(u,v) = 0 through the origin, as parametrizations
/// in t. Newton polygon with lazy field extension; simple characteristic
/// roots fall through to the linear recursion.
fn np_branches(h: &BiPoly, field: &NumberField, prec: i64, depth: u32) -> Result<Vec<RawBranch>> {
    if depth > 64 {
        return Err(Error::Internal("Newton polygon recursion too deep".into()));
    }
    let h = h.coerce(field)?;
    let mut out: Vec<RawBranch> = Vec::new();
    let (h, cu, cv) = h.strip_monomial_content();
    let _ = cu;
    if cv > 0 {
        // v = 0 is an exact branch (the remaining tail vanishes identically)
        let t = PuiseuxSeries::monomial(AlgElem::one(field), 1, 1, "t", ExpansionPoint::Zero);
        let z = PuiseuxSeries::zero(field, "t", ExpansionPoint::Zero);
        out.push((t, z, field.clone()));
    }
    if h.is_constant() {
        return Ok(out);
    }
    if !coeff_at(&h, (0, 0)).is_zero() {
        return Ok(out);
    }
    if !coeff_at(&h, (0, 1)).is_zero() {
        out.push(linear_branch(&h, field, prec)?);
        return Ok(out);
    }

    // Newton polygon: minimal u-exponent per v-exponent
    let mut imin: std::collections::BTreeMap<i64, i64> = std::collections::BTreeMap::new();
    for ((i, j), _) in h.terms.iter() {
        let e = imin.entry(*j as i64).or_insert(*i as i64);
        *e = (*e).min(*i as i64);
    }
    let pts: Vec<(i64, i64)> = imin.into_iter().collect();
    let hull = lower_hull(&pts);
    for w in hull.windows(2) {
        let (j1, i1) = w[0];
        let (j2, i2) = w[1];
        if i2 >= i1 {
            continue; // slope gives non-positive exponent
        }
        let num = i1 - i2;
        let den = j2 - j1;
        let g = num::integer::gcd(num, den);
        let q = num / g; // exponent gamma = q/m in lowest terms
        let m = den / g;
        // characteristic polynomial along the edge
        let steps = (den / m) as usize;
        let mut chi_coeffs = vec![AlgElem::zero(field); steps + 1];
        for ((i, j), c) in h.terms.iter() {
            let (i, j) = (*i as i64, *j as i64);
            if j < j1 || j > j2 {
                continue;
            }
            if (i1 - i) * den != num * (j - j1) {
                continue;
            }
            debug_assert_eq!((j - j1) % m, 0);
            chi_coeffs[((j - j1) / m) as usize] = c.clone();
        }
        let chi = UniPoly::new("w", field, chi_coeffs)?;
        for root in roots_in_closure(&chi)? {
            if root.value.is_zero() {
                continue;
            }
            let rf = root.field.clone();
            let w0 = root.value.clone();
            // integers with a*m - b*q = 1 so the substitution
            // u = w0^b s^m, v = w0^a s^q (1 + w) avoids taking m-th roots
            let egcd = num::integer::Integer::extended_gcd(&m, &q);
            debug_assert!(egcd.gcd.is_one());
            let (aa, bb) = (egcd.x, -egcd.y);
            // build the transformed polynomial in (s, w)
            let onepw = {
                let mut p = BiPoly::zero(("s", "w"), &rf);
                p.add_term((0, 0), AlgElem::one(&rf))?;
                p.add_term((0, 1), AlgElem::one(&rf))?;
                p
            };
            let mut pw_cache: std::collections::BTreeMap<u32, BiPoly> =
                std::collections::BTreeMap::new();
            let mut acc = BiPoly::zero(("s", "w"), &rf);
            for ((i, j), c) in h.terms.iter() {
                let (ii, jj) = (*i as i64, *j as i64);
                let scale = c
                    .coerce(&rf)?
                    .mul(&alg_powi(&w0, bb * ii + aa * jj)?)?;
                let pw = match pw_cache.get(j) {
                    Some(p) => p.clone(),
                    None => {
                        let p = onepw.pow(*j as u64)?;
                        pw_cache.insert(*j, p.clone());
                        p
                    }
                };
                let shift = (m * ii + q * jj) as u32;
                for ((si, sj), sc) in pw.terms.iter() {
                    acc.add_term((si + shift, *sj), sc.mul(&scale)?)?;
                }
            }
            for (ts, tv, tf) in np_branches(&acc, &rf, prec, depth + 1)? {
                // u = w0^b ts^m, v = w0^a ts^q (1 + tv)
                let w0t = w0.coerce(&tf)?;
                let u = ts.pow(m as u64)?.scale(&alg_powi(&w0t, bb)?)?;
                let one = PuiseuxSeries::constant(AlgElem::one(&tf), "t", ExpansionPoint::Zero);
                let v = ts
                    .pow(q as u64)?
                    .scale(&alg_powi(&w0t, aa)?)?
                    .mul(&one.add(&tv)?)?;
                out.push((u, v, tf));
            }
        }
    }
    Ok(out)
}

/// Places of the curve centered at `center`, with parametrizations known
/// to t-order >= terms. Conjugate branches are represented once, in the
/// minimal field tower.
pub fn local_parametrizations(f: &BiPoly, center: &CurvePoint, terms: u32) -> Result<Vec<Place>> {
    let field = f.field.join(&center.field)?;
    let mut g = f.coerce(&field)?;
    let y0v = match &center.y0 {
        Coord::Finite(v) => v.coerce(&field)?,
        Coord::Infinity => {
            g = g.invert_var(true);
            AlgElem::zero(&field)
        }
    };
    let p0v = match &center.p0 {
        Coord::Finite(v) => v.coerce(&field)?,
        Coord::Infinity => {
            g = g.invert_var(false);
            AlgElem::zero(&field)
        }
    };
    let h = g.shift(&y0v, &p0v)?;
    if !coeff_at(&h, (0, 0)).is_zero() {
        return Err(Error::NotOnCurve);
    }
    let prec = terms.max(1) as i64;
    let raw: Vec<RawBranch> = if !coeff_at(&h, (0, 1)).is_zero() {
        np_branches(&h, &field, prec, 0)?
    } else if !coeff_at(&h, (1, 0)).is_zero() {
        // regular in the u direction: solve u as a series in v
        let hs = swap_bipoly(&h)?;
        np_branches(&hs, &field, prec, 0)?
            .into_iter()
            .map(|(u, v, f)| (v, u, f))
            .collect()
    } else {
        np_branches(&h, &field, prec, 0)?
    };
    let mut places = Vec::new();
    for (u, v, bf) in raw {
        let e_ord = u
            .order()
            .map_err(|_| Error::Internal("branch with unknown y-order".into()))?;
        if !e_ord.denom().is_one() || !e_ord.numer().is_positive() {
            return Err(Error::Internal("branch parametrization not of order >= 1".into()));
        }
        let e: u64 = e_ord
            .numer()
            .try_into()
            .map_err(|_| Error::Internal("branch order overflow".into()))?;
        let a = match &center.y0 {
            Coord::Finite(_) => {
                let c = PuiseuxSeries::constant(y0v.coerce(&bf)?, "t", ExpansionPoint::Zero);
                c.add(&u)?
            }
            Coord::Infinity => u.inverse()?,
        };
        let b = match &center.p0 {
            Coord::Finite(_) => {
                let c = PuiseuxSeries::constant(p0v.coerce(&bf)?, "t", ExpansionPoint::Zero);
                c.add(&v)?
            }
            Coord::Infinity => {
                if v.num_terms() == 0 {
                    return Err(Error::Internal(
                        "cannot invert an identically zero branch coordinate".into(),
                    ));
                }
                v.inverse()?
            }
        };
        places.push(Place {
            center: center.clone(),
            a,
            b,
            e,
            field: bf,
        });
    }
    places.sort_by_key(|p| (p.e, format!("{}", p.a), format!("{}", p.b)));
    Ok(places)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q_ratio;
    use num::Zero;

    fn qq() -> NumberField {
        NumberField::rationals()
    }

    fn bp(terms: &[(u32, u32, i64)]) -> BiPoly {
        let q = qq();
        let mut f = BiPoly::zero(("y", "p"), &q);
        for &(i, j, c) in terms {
            f.add_term((i, j), q.from_int(c)).unwrap();
        }
        f
    }

    fn keys(points: &[CurvePoint]) -> Vec<String> {
        points.iter().map(|p| format!("{}", p)).collect()
    }

    #[test]
    fn criticals_of_parabola() {
        // p^2 - y: (0,0) and (inf,inf)
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let pts = critical_points(&f).unwrap();
        assert_eq!(keys(&pts), vec!["(0, 0)", "(inf, inf)"]);
    }

    #[test]
    fn criticals_of_circle() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let pts = critical_points(&f).unwrap();
        // finite critical points are (1,0) and (-1,0); the closure also
        // meets (inf,inf) since the top bidegree coefficient vanishes
        assert_eq!(keys(&pts), vec!["(-1, 0)", "(1, 0)", "(inf, inf)"]);
    }

    #[test]
    fn criticals_of_non_monic_example() {
        // 4p^2y - 1: (0,inf) and (inf,0)
        let f = bp(&[(1, 2, 4), (0, 0, -1)]);
        let pts = critical_points(&f).unwrap();
        assert_eq!(keys(&pts), vec!["(0, inf)", "(inf, 0)"]);
    }

    #[test]
    fn bounds() {
        assert_eq!(truncation_bound(&bp(&[(0, 2, 1), (1, 0, -1)])), 3);
        assert_eq!(
            truncation_bound(&bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)])),
            5
        );
        assert_eq!(truncation_bound(&bp(&[(0, 1, 1), (1, 0, -1)])), 1);
        // non-monic case
        assert_eq!(truncation_bound(&bp(&[(1, 2, 4), (0, 0, -1)])), 5);
    }

    fn assert_place_on_curve(f: &BiPoly, pl: &Place, min_order: i64) {
        let r = substitute_bipoly(f, &pl.a, &pl.b).unwrap();
        assert_eq!(r.num_terms(), 0, "nonzero residual {}", r);
        if let Some(t) = r.truncation() {
            assert!(
                t >= Q::from_integer(BigInt::from(min_order)),
                "residual order bound {} below {}",
                t,
                min_order
            );
        }
    }

    #[test]
    fn parabola_place_at_origin() {
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let c = CurvePoint::new(&f, Coord::Finite(qq().from_int(0)), Coord::Finite(qq().from_int(0))).unwrap();
        let places = local_parametrizations(&f, &c, 8).unwrap();
        assert_eq!(places.len(), 1);
        let pl = &places[0];
        // (a, b) = (t^2, t), exactly
        assert_eq!(format!("{}", pl.a), "x^2".replace('x', "t"));
        assert_eq!(format!("{}", pl.b), "t");
        assert_eq!(pl.e, 2);
        assert_place_on_curve(&f, pl, 8);
    }

    #[test]
    fn circle_place_is_rational() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let c = CurvePoint::new(&f, Coord::Finite(qq().from_int(1)), Coord::Finite(qq().from_int(0))).unwrap();
        let places = local_parametrizations(&f, &c, 6).unwrap();
        assert_eq!(places.len(), 1);
        let pl = &places[0];
        assert_eq!(pl.field.num_levels(), 0, "expected no field extension");
        assert_eq!(pl.e, 2);
        // a = 1 - t^2/2 - t^4/8 - ..., b = t
        assert_eq!(pl.a.coeff_at(&Q::zero()), qq().from_int(1));
        assert_eq!(
            pl.a.coeff_at(&Q::from_integer(BigInt::from(2))),
            qq().from_q(q_ratio(-1, 2))
        );
        assert_eq!(
            pl.a.coeff_at(&Q::from_integer(BigInt::from(4))),
            qq().from_q(q_ratio(-1, 8))
        );
        assert_eq!(format!("{}", pl.b), "t");
        assert_place_on_curve(&f, pl, 6);
    }

    #[test]
    fn inverted_p_place() {
        // 4p^2y - 1 at (0, inf): place (t^2/4, 1/t)
        let f = bp(&[(1, 2, 4), (0, 0, -1)]);
        let c = CurvePoint::new(&f, Coord::Finite(qq().from_int(0)), Coord::Infinity).unwrap();
        let places = local_parametrizations(&f, &c, 8).unwrap();
        assert_eq!(places.len(), 1);
        let pl = &places[0];
        assert_eq!(
            pl.a.coeff_at(&Q::from_integer(BigInt::from(2))),
            qq().from_q(q_ratio(1, 4))
        );
        assert_eq!(pl.a.num_terms(), 1);
        assert_eq!(format!("{}", pl.b), "t^-1");
        assert_eq!(pl.e, 2);
        assert_place_on_curve(&f, pl, 5);
    }

    #[test]
    fn cusp_newton_polygon() {
        // p^2 - y^3 at (0,0): place (t^2, t^3)
        let f = bp(&[(0, 2, 1), (3, 0, -1)]);
        let c = CurvePoint::new(&f, Coord::Finite(qq().from_int(0)), Coord::Finite(qq().from_int(0))).unwrap();
        let places = local_parametrizations(&f, &c, 8).unwrap();
        assert_eq!(places.len(), 1);
        let pl = &places[0];
        assert_eq!(pl.e, 2);
        assert_eq!(pl.b.order().unwrap(), Q::from_integer(BigInt::from(3)));
        assert_place_on_curve(&f, pl, 8);
    }

    #[test]
    fn polygon_with_extension() {
        // p^3 - 2y^3 at (0,0): one place class with a cubic extension
        let f = bp(&[(0, 3, 1), (3, 0, -2)]);
        let c = CurvePoint::new(&f, Coord::Finite(qq().from_int(0)), Coord::Finite(qq().from_int(0))).unwrap();
        let places = local_parametrizations(&f, &c, 6).unwrap();
        assert_eq!(places.len(), 1);
        let pl = &places[0];
        assert_eq!(pl.conjugates_over(&qq()), 3);
        assert_place_on_curve(&f, pl, 6);
    }

    #[test]
    fn generic_branch_count() {
        // over a non-critical y0, places counted with conjugates equal deg_p
        let fs = [
            bp(&[(0, 2, 1), (1, 0, -1)]),
            bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]),
            bp(&[(1, 2, 4), (0, 0, -1)]),
        ];
        let samples = [5i64, 7, 11, -3, 13];
        for f in &fs {
            let crit = critical_points(f).unwrap();
            'sample: for &s in &samples {
                let y0 = qq().from_int(s);
                for c in &crit {
                    if let Coord::Finite(v) = &c.y0 {
                        if v.as_rational() == y0.as_rational() {
                            continue 'sample;
                        }
                    }
                }
                let fy = f.eval_v1(&y0).unwrap();
                if fy.degree() != Some(f.deg2() as usize) {
                    continue; // y0 on the leading-coefficient locus
                }
                let mut count = 0u64;
                for r in roots_in_closure(&fy).unwrap() {
                    let p0 = r.value;
                    let cp = CurvePoint::new(f, Coord::Finite(y0.coerce(&r.field).unwrap()), Coord::Finite(p0)).unwrap();
                    let places = local_parametrizations(f, &cp, 4).unwrap();
                    for pl in &places {
                        count += pl.conjugates_over(&cp.field) * r.class_degree as u64;
                        assert_place_on_curve(f, pl, 4);
                    }
                }
                assert_eq!(count, f.deg2() as u64);
            }
        }
    }

    #[test]
    fn off_curve_center_rejected() {
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let r = CurvePoint::new(&f, Coord::Finite(qq().from_int(1)), Coord::Finite(qq().from_int(0)));
        assert!(matches!(r, Err(Error::NotOnCurve)));
    }

    #[test]
    fn tacnode_two_branches() {
        // (p - y)(p + y) + y^5 has two branches at the origin
        // expand: p^2 - y^2 + y^5
        let f = bp(&[(0, 2, 1), (2, 0, -1), (5, 0, 1)]);
        let c = CurvePoint::new(&f, Coord::Finite(qq().from_int(0)), Coord::Finite(qq().from_int(0))).unwrap();
        let places = local_parametrizations(&f, &c, 8).unwrap();
        assert_eq!(places.len(), 2);
        for pl in &places {
            assert_eq!(pl.e, 1);
            assert_place_on_curve(&f, pl, 8);
        }
    }
}
