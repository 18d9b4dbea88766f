//! The differential core: the solution-place test, the associated
//! reparametrization ODE with its Briot-Bouquet-type linear coefficient
//! recursion, and prolongation of determined solution truncations.

use num::{BigInt, One, Zero};

use crate::bipoly::BiPoly;
use crate::curve::Place;
use crate::field::{AlgElem, NumberField, Q};
use crate::series::{substitute_bipoly, ExpansionPoint, PuiseuxSeries};
use crate::upoly::{adjoin_root, UniPoly};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NotSolutionPlace,
    /// For h = 0 this is a certificate; for h = 2 it is necessary only and
    /// the reparametrization solver decides.
    SolutionPlace { n: u64 },
}

#[derive(Debug, Clone)]
pub struct SolutionPlaceCheck {
    pub h: u32,
    pub k: i64,
    pub r: i64,
    pub verdict: Verdict,
}

/// A solution s(t) of the associated ODE, with sigma_1 kept as a root
/// class when it is irrational and an optional free parameter (h = 2).
#[derive(Debug, Clone)]
pub struct ReparamSolution {
    pub s: PuiseuxSeries,
    pub field: NumberField,
    /// (parameter name, index i at which sigma_i is free)
    pub free: Option<(String, i64)>,
    /// minimal polynomial of sigma_1 over the place field, when nontrivial
    pub sigma1_class: Option<UniPoly>,
}

fn series_order_i64(s: &PuiseuxSeries, what: &str) -> Result<i64> {
    let o = s.order().map_err(|e| match e {
        Error::OrderUnknown(m) => Error::InsufficientTruncation(format!("order of {what}: {m}")),
        other => other,
    })?;
    if !o.denom().is_one() {
        return Err(Error::Internal(format!("{what} has fractional t-order")));
    }
    o.numer()
        .try_into()
        .map_err(|_| Error::Internal("order overflow".into()))
}

/// The order condition n(1-h) = ord_t(a - y0) - ord_t(b).
pub fn check_solution_place(place: &Place, h: u32) -> Result<SolutionPlaceCheck> {
    if h != 0 && h != 2 {
        return Err(Error::Invalid("h must be 0 or 2".into()));
    }
    let y0 = place
        .center
        .y0
        .finite()
        .ok_or_else(|| Error::Invalid("solution-place test requires finite y0".into()))?;
    let field = place.field.clone();
    let y0c = PuiseuxSeries::constant(y0.coerce(&field)?, &place.a.var, place.a.point);
    let diff = place.a.sub(&y0c)?;
    let k = series_order_i64(&diff, "a - y0")?;
    let r = series_order_i64(&place.b, "b")?;
    let lhs = k - r; // = n(1-h)
    let n = if h == 0 { lhs } else { -lhs };
    let verdict = if n > 0 {
        Verdict::SolutionPlace { n: n as u64 }
    } else {
        Verdict::NotSolutionPlace
    };
    Ok(SolutionPlaceCheck { h, k, r, verdict })
}

/// Outcome of the linear coefficient recursion.
pub enum CoreOutcome {
    Solved {
        s: PuiseuxSeries,
        field: NumberField,
        free: Option<(String, i64)>,
    },
    Inconsistent {
        at: i64,
    },
}

/// Generic Briot-Bouquet-type recursion: s = sigma_1 t + ..., and at every
/// step i >= 2 the caller supplies the linear equation L * sigma_i = R for
/// the current partial sum. L != 0 determines sigma_i; L = 0 with R = 0
/// marks sigma_i free (a one-parameter family); L = 0 with R != 0 is an
/// inconsistency verdict.
pub fn briot_bouquet_core<FS>(
    field: &NumberField,
    sigma1: &AlgElem,
    terms: i64,
    mut step: FS,
) -> Result<CoreOutcome>
where
    FS: FnMut(i64, &PuiseuxSeries) -> Result<(AlgElem, AlgElem)>,
{
    let mut field = field.join(&sigma1.field())?;
    let mut s = PuiseuxSeries::monomial(sigma1.coerce(&field)?, 1, 1, "t", ExpansionPoint::Zero);
    let mut free: Option<(String, i64)> = None;
    for i in 2..=terms {
        let (l, r) = step(i, &s)?;
        if !l.is_zero() {
            let si = r.div(&l)?;
            if !si.is_zero() {
                let f2 = field.join(&si.field())?;
                if f2 != field {
                    field = f2.clone();
                    s = s.coerce(&f2)?;
                }
                s = s.add(&PuiseuxSeries::monomial(si, i, 1, "t", ExpansionPoint::Zero))?;
            }
        } else if r.is_zero() {
            if free.is_some() {
                return Err(Error::Internal(
                    "second free coefficient in one recursion".into(),
                ));
            }
            let mut name = "_C".to_string();
            let mut idx = 0usize;
            let (ext, gen) = loop {
                match field.adjoin_transcendental(&name) {
                    Ok(pair) => break pair,
                    Err(_) => {
                        idx += 1;
                        name = format!("_C{idx}");
                    }
                }
            };
            free = Some((name, i));
            s = s.coerce(&ext)?;
            field = ext;
            s = s.add(&PuiseuxSeries::monomial(gen, i, 1, "t", ExpansionPoint::Zero))?;
        } else {
            return Err(Error::Inconsistent(format!(
                "coefficient equation 0 * sigma_{i} = {r}"
            )));
        }
    }
    let trunc = Q::from_integer(BigInt::from(terms + 1));
    Ok(CoreOutcome::Solved {
        s: s.truncate(&trunc),
        field,
        free,
    })
}

/// Residual of the associated ODE a'(s) s' - n(1-h) t^(n(1-h)-1) b(s),
/// valid at least up to t-order `prec`.
fn assoc_residual(
    a: &PuiseuxSeries,
    b: &PuiseuxSeries,
    s: &PuiseuxSeries,
    n: i64,
    h: u32,
    prec: &Q,
) -> Result<PuiseuxSeries> {
    let nh = if h == 0 { n } else { -n }; // n(1-h)
    let ad = a.derivative();
    // a' and b may be Laurent; composing their negative powers with an
    // exact partial sum would not terminate, so cap s at a precision that
    // still leaves the residual valid past `prec` (ord s = 1)
    let mut kmin = Q::zero();
    for src in [&ad, b] {
        if let Some(o) = src.order_lower_bound() {
            if o < kmin {
                kmin = o;
            }
        }
    }
    let need = prec - &kmin + Q::from_integer(BigInt::from(n.abs() + 4));
    let s = s.truncate(&need);
    let lhs = ad.compose(&s)?.mul(&s.derivative())?;
    let field = lhs.field();
    let rhs = b
        .compose(&s)?
        .mul_monomial(&field.from_int(nh), nh - 1, 1)?;
    lhs.sub(&rhs)
}

/// Solve the associated ODE for a candidate solution place with
/// ramification n: one ReparamSolution per sigma_1 root class. For h = 2
/// an empty result (inconsistent recursion) is a valid outcome.
pub fn solve_reparametrization(
    place: &Place,
    n: u64,
    h: u32,
    terms: i64,
) -> Result<Vec<ReparamSolution>> {
    let check = check_solution_place(place, h)?;
    if check.verdict != (Verdict::SolutionPlace { n }) {
        return Err(Error::Invalid(format!(
            "place does not pass the order condition with n = {n}"
        )));
    }
    let field = place.field.clone();
    let y0 = place.center.y0.finite().unwrap().coerce(&field)?;
    let y0c = PuiseuxSeries::constant(y0, &place.a.var, place.a.point);
    let diff = place.a.sub(&y0c)?;
    let k = check.k;
    let ck = diff.leading_coeff()?;
    let cr = place.b.leading_coeff()?;
    let ni = n as i64;
    let nh = if h == 0 { ni } else { -ni }; // n(1-h) = k - r
    // leading-term matching: sigma_1^(k-r) = n(1-h) c_r / (k c_k)
    // with k - r = n(1-h), so sigma_1^n has a closed form either way
    let kck = ck.scale(&Q::from_integer(BigInt::from(k)));
    let nhcr = cr.scale(&Q::from_integer(BigInt::from(nh)));
    let lambda = if h == 0 {
        nhcr.div(&kck)?
    } else {
        kck.div(&nhcr)?
    };
    // sigma_1 classes: roots of z^n - lambda
    let mut zc = vec![lambda.neg()];
    for _ in 1..n {
        zc.push(AlgElem::zero(&field));
    }
    zc.push(AlgElem::one(&field));
    let zp = UniPoly::new("z", &field, zc)?;
    let factors = crate::factor::factor_univariate(&zp)?;
    let mut out = Vec::new();
    for (irr, _) in factors {
        let d = irr.degree().unwrap_or(0);
        let (sf, sigma1) = if d == 1 {
            (field.clone(), irr.coeff(0).neg())
        } else {
            adjoin_root(&field, &irr, true)?
        };
        let target = k - 2; // action order of sigma_i is k - 2 + i
        let a = place.a.coerce(&sf)?;
        let b = place.b.coerce(&sf)?;
        let step = |i: i64, partial: &PuiseuxSeries| -> Result<(AlgElem, AlgElem)> {
            let want = Q::from_integer(BigInt::from(target + i));
            let r0 = assoc_residual(&a, &b, partial, ni, h, &want)?;
            if let Some(t) = r0.truncation() {
                if t <= want {
                    return Err(Error::InsufficientTruncation(format!(
                        "need residual order {want}, place known to {t}"
                    )));
                }
            }
            let aa = r0.coeff_at(&want);
            let pf = partial.field();
            let probe = partial.add(&PuiseuxSeries::monomial(
                AlgElem::one(&pf),
                i,
                1,
                "t",
                ExpansionPoint::Zero,
            ))?;
            let r1 = assoc_residual(&a, &b, &probe, ni, h, &want)?;
            let bb = r1.coeff_at(&want).sub(&aa.coerce(&r1.field())?)?;
            // equation: aa + bb * sigma_i = 0
            Ok((bb, aa.neg()))
        };
        match briot_bouquet_core(&sf, &sigma1, terms, step) {
            Ok(CoreOutcome::Solved { s, field: ff, free }) => out.push(ReparamSolution {
                s,
                field: ff,
                free,
                sigma1_class: if d > 1 { Some(irr.clone()) } else { None },
            }),
            Ok(CoreOutcome::Inconsistent { .. }) => {}
            Err(Error::Inconsistent(_)) => {
                // no solution in this class; a verdict, not a failure
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The ODE residual F(y, y') of a truncated series at the given expansion
/// point; at infinity the series is in z = 1/x and y' = -z^2 dy/dz.
pub fn ode_residual(f: &BiPoly, y: &PuiseuxSeries) -> Result<PuiseuxSeries> {
    let p = match y.point {
        ExpansionPoint::Zero => y.derivative(),
        ExpansionPoint::Infinity => {
            let field = y.field();
            y.derivative()
                .mul_monomial(&field.from_int(-1), 2, 1)?
        }
    };
    substitute_bipoly(f, y, &p)
}

/// Extend a determined solution truncation to all exponents <= target.
/// Every added coefficient is forced by the leading term of the residual,
/// so the extension is unique; inconsistency means the input was not a
/// valid determined truncation.
pub fn prolong_truncation(
    f: &BiPoly,
    s: &PuiseuxSeries,
    target: &Q,
    guaranteed: bool,
) -> Result<PuiseuxSeries> {
    if !guaranteed {
        return Err(Error::Invalid(
            "prolongation requires a truncation with the uniqueness guarantee".into(),
        ));
    }
    let field = f.field.join(&s.field())?;
    let fy = f.partial_derivative(&f.vars.0)?;
    let fp = f.partial_derivative(&f.vars.1)?;
    let ram = s.ramification() as i64;
    // work with the known terms as an exact polynomial; the truncation
    // marker only tells us where unknown coefficients may start
    let known_from = s.truncation();
    let mut cur = PuiseuxSeries::from_terms(
        &field,
        &s.var,
        s.point,
        s.ramification(),
        s.iter_terms()
            .map(|(e, c)| {
                let k = (&e * Q::from_integer(BigInt::from(ram))).numer().clone();
                Ok((
                    k.try_into()
                        .map_err(|_| Error::Internal("exponent overflow".into()))?,
                    c.coerce(&field)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
        None,
    )?;
    let mut floor = match known_from {
        Some(t) => t,
        None => {
            // exact input: certify and return
            let r = ode_residual(f, &cur)?;
            if !r.is_exactly_zero() {
                return Err(Error::Inconsistent(format!(
                    "series marked exact has residual {r}"
                )));
            }
            return Ok(cur);
        }
    };
    let lattice = Q::new(BigInt::one(), BigInt::from(ram));
    let mut guard = 0u32;
    loop {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Internal("prolongation did not terminate".into()));
        }
        let r = ode_residual(f, &cur)?;
        if r.num_terms() == 0 {
            // exact polynomial solution: all later coefficients vanish
            debug_assert!(r.truncation().is_none());
            return Ok(cur);
        }
        let m = r.order()?;
        let ay = substitute_bipoly(&fy, &cur, &deriv_for(&cur))?;
        let ap = substitute_bipoly(&fp, &cur, &deriv_for(&cur))?;
        // perturbing y by c x^e moves the residual by
        //   c (F_y x^e + d(e) F_p x^(e+ds))
        // with (d, ds) = (e, -1) at zero and (-e, +1) at infinity
        let ds: i64 = match cur.point {
            ExpansionPoint::Zero => -1,
            ExpansionPoint::Infinity => 1,
        };
        let oy = ay.order_lower_bound();
        let op = ap.order_lower_bound().map(|o| o + Q::from_integer(BigInt::from(ds)));
        let w = match (oy.clone(), op.clone()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(Error::Inconsistent(
                    "residual cannot be cancelled by any coefficient".into(),
                ))
            }
        };
        let e = &m - &w;
        if e > *target {
            // every remaining coefficient up to target is zero
            let t = target + &lattice;
            let mut done = cur.truncate(&t);
            if done.truncation().is_none() {
                done = done.truncate(&t);
            }
            return Ok(done);
        }
        if e < floor {
            return Err(Error::Inconsistent(format!(
                "extension would modify a determined coefficient at order {e}"
            )));
        }
        let elat = &e * Q::from_integer(BigInt::from(ram));
        if !elat.denom().is_one() {
            return Err(Error::Inconsistent(format!(
                "extension requires exponent {e} off the 1/{ram} lattice"
            )));
        }
        // total linear action at order m
        let mut l = AlgElem::zero(&field);
        if ay.order_lower_bound().map(|o| o + &e == m).unwrap_or(false) {
            l = l.add(&ay.leading_coeff()?)?;
        }
        if ap
            .order_lower_bound()
            .map(|o| o + Q::from_integer(BigInt::from(ds)) + &e == m)
            .unwrap_or(false)
        {
            let de = match cur.point {
                ExpansionPoint::Zero => e.clone(),
                ExpansionPoint::Infinity => -e.clone(),
            };
            l = l.add(&ap.leading_coeff()?.scale(&de))?;
        }
        if l.is_zero() {
            return Err(Error::Inconsistent(format!(
                "linear coefficient equation degenerates at order {e}"
            )));
        }
        let c = r.leading_coeff()?.div(&l)?.neg();
        let key: i64 = elat
            .numer()
            .try_into()
            .map_err(|_| Error::Internal("exponent overflow".into()))?;
        if !c.is_zero() {
            cur = cur.add(&PuiseuxSeries::from_terms(
                &field,
                &cur.var.clone(),
                cur.point,
                ram as u64,
                vec![(key, c)],
                None,
            )?)?;
        }
        floor = e + &lattice;
    }
}

fn deriv_for(y: &PuiseuxSeries) -> PuiseuxSeries {
    match y.point {
        ExpansionPoint::Zero => y.derivative(),
        ExpansionPoint::Infinity => {
            let field = y.field();
            y.derivative()
                .mul_monomial(&field.from_int(-1), 2, 1)
                .expect("monomial multiply")
        }
    }
}
