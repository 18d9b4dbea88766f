//! The solution pipeline: normalization, constant solutions, the generic
//! one-parameter truncation, per-critical-point local solutions at zero and
//! at infinity, and the 1/y inversion for solutions with a pole.

use num::{BigInt, One, Zero};
use std::collections::BTreeSet;

use crate::bipoly::{squarefree_normalize, BiPoly};
use crate::briot::{check_solution_place, ode_residual, solve_reparametrization, Verdict};
use crate::curve::{critical_points, local_parametrizations, truncation_bound, Coord, CurvePoint};
use crate::factor::{roots_in_closure, Root};
use crate::field::{AlgElem, NumberField, Q};
use crate::series::{ExpansionPoint, PuiseuxSeries};
use crate::upoly::UniPoly;
use crate::{Error, Result};

/// A single truncated series solution with its provenance.
#[derive(Debug, Clone)]
pub struct SolutionTruncation {
    pub series: PuiseuxSeries,
    pub initial_tuple: CurvePoint,
    /// ramification of the class (number of conjugate solutions obtained by
    /// rotating the ramified variable)
    pub n: u64,
    pub expansion_point: ExpansionPoint,
    /// true iff the truncation is long enough that its extension to a full
    /// solution exists and is unique
    pub guarantee: bool,
    /// name of the free parameter for one-parameter families
    pub free_parameter: Option<String>,
    /// minimal polynomial of the leading reparametrization coefficient over
    /// the place field, when it generates a proper extension
    pub conjugacy_class: Option<UniPoly>,
}

/// The generic solution truncation: coefficients are elements of the field
/// Q(...)(_CC)[_P] modulo the curve relation F(_CC,_P) = 0.
#[derive(Debug, Clone)]
pub struct GenericSolution {
    pub field: NumberField,
    /// c_0, c_1, ... with y(x) = sum c_k x^k
    pub coeffs: Vec<AlgElem>,
    /// defining polynomial of _P over the base with _CC (None when y'
    /// appears linearly and was eliminated)
    pub relation: Option<UniPoly>,
    /// parameter constraints excluded from the genericity statement
    pub exceptional: Vec<String>,
    pub component_id: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub generic: bool,
    pub constants: bool,
    pub finite: bool,
    pub infinity: bool,
    pub iv: Option<AlgElem>,
    pub bound_override: Option<u32>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            generic: true,
            constants: true,
            finite: true,
            infinity: true,
            iv: None,
            bound_override: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// the normalized equation actually solved
    pub equation: BiPoly,
    pub generic: Vec<GenericSolution>,
    pub constants: Vec<Root>,
    pub at_zero: Vec<SolutionTruncation>,
    pub at_infinity: Vec<SolutionTruncation>,
    pub transforms: Vec<String>,
}

fn q_of_u32(n: u32) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn q_ceil_i64(q: &Q) -> Result<i64> {
    q.ceil()
        .to_integer()
        .try_into()
        .map_err(|_| Error::Internal("order too large".into()))
}

fn q_floor_i64(q: &Q) -> Result<i64> {
    q.floor()
        .to_integer()
        .try_into()
        .map_err(|_| Error::Internal("order too large".into()))
}

/// Constant solutions: roots of F(y, 0).
pub fn constant_solutions(g: &BiPoly) -> Result<Vec<Root>> {
    let up = g.eval_v2(&AlgElem::zero(&g.field))?;
    if up.is_zero() {
        return Err(Error::Invalid(
            "F(y,0) is identically zero; apply squarefree normalization to remove the y' factor"
                .into(),
        ));
    }
    if up.is_constant() {
        return Ok(Vec::new());
    }
    roots_in_closure(&up)
}

/// The equation satisfied by 1/y: numerator of F(1/y, -p/y^2), with
/// monomial content stripped.
pub fn inverted_equation(g: &BiPoly) -> Result<BiPoly> {
    let dy = g.deg1();
    let dp = g.deg2();
    let shift = dy + 2 * dp;
    let mut out = BiPoly::zero((&g.vars.0, &g.vars.1), &g.field);
    for ((i, j), c) in g.terms.iter() {
        let e = shift - i - 2 * j;
        let v = if j % 2 == 1 { c.neg() } else { c.clone() };
        out.add_term((e, *j), v)?;
    }
    let (stripped, _, _) = out.strip_monomial_content();
    Ok(stripped)
}

/// All points of the curve with the given finite first coordinate,
/// including (y0, infinity) when the leading coefficient in p vanishes.
fn centers_with_y0(g: &BiPoly, y0: &AlgElem) -> Result<Vec<CurvePoint>> {
    let up = g.eval_v1(y0)?;
    if up.is_zero() {
        return Err(Error::Invalid(format!(
            "the line y = {} is a component; apply squarefree normalization",
            y0
        )));
    }
    let mut out = Vec::new();
    if !up.is_constant() {
        for r in roots_in_closure(&up)? {
            out.push(CurvePoint::new(
                g,
                Coord::Finite(y0.clone()),
                Coord::Finite(r.value),
            )?);
        }
    }
    if g.deg2() > 0 {
        let lc = g
            .coeffs_in_v2()
            .pop()
            .ok_or_else(|| Error::Internal("missing leading coefficient".into()))?;
        if lc.eval(y0)?.is_zero() {
            out.push(CurvePoint::new(g, Coord::Finite(y0.clone()), Coord::Infinity)?);
        }
    }
    Ok(out)
}

/// Rebuild a series without its truncation marker (candidate exact form).
fn strip_truncation(s: &PuiseuxSeries) -> Result<PuiseuxSeries> {
    let ram = s.ramification();
    let field = s.field();
    let terms: Vec<(i64, AlgElem)> = s
        .iter_terms()
        .map(|(e, c)| {
            let k = (&e * Q::from_integer(BigInt::from(ram))).numer().clone();
            Ok((
                k.try_into()
                    .map_err(|_| Error::Internal("exponent overflow".into()))?,
                c.clone(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    PuiseuxSeries::from_terms(&field, &s.var, s.point, ram, terms, None)
}

/// Solutions through one center (finite y0) for the pass h (0 = expansion
/// at zero, 2 = expansion at infinity).
fn solutions_at_center(
    g: &BiPoly,
    center: &CurvePoint,
    h: u32,
    n_eff: &Q,
    bound: u32,
    guarantee: bool,
) -> Result<Vec<SolutionTruncation>> {
    let mut tprec: u32 = bound.max(2 * q_ceil_i64(n_eff)?.max(1) as u32 + 8);
    for attempt in 0.. {
        match try_center(g, center, h, n_eff, tprec, guarantee) {
            Err(Error::InsufficientTruncation(_)) if attempt < 5 => {
                tprec = tprec.saturating_mul(2);
            }
            other => return other,
        }
    }
    unreachable!()
}

fn try_center(
    g: &BiPoly,
    center: &CurvePoint,
    h: u32,
    n_eff: &Q,
    tprec: u32,
    guarantee: bool,
) -> Result<Vec<SolutionTruncation>> {
    let places = local_parametrizations(g, center, tprec)?;
    let point = if h == 0 {
        ExpansionPoint::Zero
    } else {
        ExpansionPoint::Infinity
    };
    let mut out = Vec::new();
    for pl in &places {
        let check = check_solution_place(pl, h)?;
        let n = match check.verdict {
            Verdict::SolutionPlace { n } => n,
            Verdict::NotSolutionPlace => continue,
        };
        let sigma_terms = q_ceil_i64(&(n_eff * Q::from_integer(BigInt::from(n))))?.max(1) + 2;
        let sols = solve_reparametrization(pl, n, h, sigma_terms)?;
        for rs in sols {
            let a = pl.a.coerce(&rs.field)?;
            let yt = a.compose(&rs.s)?;
            let mut series = yt.reinterpret_ram(n, "x", point);
            if let Some(t) = series.truncation() {
                if &t <= n_eff {
                    return Err(Error::InsufficientTruncation(format!(
                        "composed solution known to {t}, need beyond {n_eff}"
                    )));
                }
            }
            // re-certify exact (polynomial / finite Puiseux) solutions
            let candidate = strip_truncation(&series)?;
            if ode_residual(g, &candidate)?.is_exactly_zero() {
                series = candidate;
            } else {
                let lattice = Q::new(BigInt::one(), BigInt::from(series.ramification()));
                series = series.truncate(&(n_eff + &lattice));
            }
            out.push(SolutionTruncation {
                series,
                initial_tuple: center.clone(),
                n,
                expansion_point: point,
                guarantee,
                free_parameter: rs.free.map(|(name, _)| name),
                conjugacy_class: rs.sigma1_class,
            });
        }
    }
    Ok(out)
}

/// Map a solution of the inverted equation back: y = 1 / y~.
fn invert_solution(
    g: &BiPoly,
    sol: SolutionTruncation,
    n_eff: &Q,
) -> Result<SolutionTruncation> {
    let mut s = sol.series;
    if s.truncation().is_none() && s.num_terms() > 1 {
        let m = s.order()?;
        let cap = n_eff + &m + &m + q_of_u32(4);
        s = s.truncate(&cap);
    }
    let inv = s.inverse()?;
    let inv = if inv.truncation().is_some() {
        let lattice = Q::new(BigInt::one(), BigInt::from(inv.ramification()));
        inv.truncate(&(n_eff + &lattice))
    } else {
        inv
    };
    // the original tuple: y0 = infinity, p0 from the order of y'
    let ps = match inv.point {
        ExpansionPoint::Zero => inv.derivative(),
        ExpansionPoint::Infinity => inv
            .derivative()
            .mul_monomial(&inv.field().from_int(-1), 2, 1)?,
    };
    let p0 = match ps.order_lower_bound() {
        None => Coord::Finite(AlgElem::zero(&inv.field())),
        Some(o) => {
            if o > Q::zero() {
                Coord::Finite(AlgElem::zero(&inv.field()))
            } else if o.is_zero() {
                Coord::Finite(ps.coeff_at(&Q::zero()))
            } else {
                Coord::Infinity
            }
        }
    };
    let tuple = match CurvePoint::new(g, Coord::Infinity, p0.clone()) {
        Ok(t) => t,
        Err(_) => CurvePoint {
            y0: Coord::Infinity,
            p0,
            field: inv.field(),
        },
    };
    let n = inv.ramification();
    Ok(SolutionTruncation {
        series: inv,
        initial_tuple: tuple,
        n,
        expansion_point: sol.expansion_point,
        guarantee: sol.guarantee,
        free_parameter: sol.free_parameter,
        conjugacy_class: sol.conjugacy_class,
    })
}

fn sort_truncations(v: &mut [SolutionTruncation]) {
    v.sort_by_key(|t| {
        (
            t.initial_tuple.key(),
            t.conjugacy_class
                .as_ref()
                .map(|c| c.to_string())
                .unwrap_or_default(),
            t.series.to_string(),
        )
    });
}

fn same_value(a: &AlgElem, b: &AlgElem) -> bool {
    match a.field().join(&b.field()) {
        Ok(j) => match (a.coerce(&j), b.coerce(&j)) {
            (Ok(x), Ok(y)) => x.sub(&y).map(|d| d.is_zero()).unwrap_or(false),
            _ => false,
        },
        Err(_) => false,
    }
}

/// Full pipeline: all formal Puiseux series solutions of F(y, y') = 0 as
/// truncations beyond the requested order (at least the uniqueness bound).
pub fn puiseux_solve(f: &BiPoly, order: &Q, opts: &SolveOptions) -> Result<SolveReport> {
    if f.is_zero() || f.is_constant() {
        return Err(Error::Invalid("the equation must be non-constant".into()));
    }
    let mut transforms = Vec::new();
    let (g, removed) = squarefree_normalize(f)?;
    for r in &removed {
        transforms.push(format!("removed factor: {}", r.render()));
        if r.deg1() == 0 && r.deg2() > 0 {
            transforms.push(
                "a factor involving only y' was removed; every constant function solves that component"
                    .into(),
            );
        }
    }
    let bound = opts.bound_override.unwrap_or_else(|| truncation_bound(&g));
    let full_bound = truncation_bound(&g);
    let n_eff = {
        let b = q_of_u32(bound);
        if *order > b {
            order.clone()
        } else {
            b
        }
    };
    let guarantee = n_eff >= q_of_u32(full_bound);

    let mut constants = Vec::new();
    if opts.constants {
        constants = constant_solutions(&g)?;
        // factors removed by normalization that involve only y contribute
        // constant solutions as well
        for r in &removed {
            if r.deg2() == 0 && r.deg1() > 0 {
                let up = r.eval_v2(&AlgElem::zero(&r.field))?;
                constants.extend(roots_in_closure(&up)?);
            }
        }
        let mut seen = BTreeSet::new();
        constants.retain(|r| seen.insert(format!("{}@{:?}", r.value, r.field.describe())));
        if let Some(iv) = &opts.iv {
            constants.retain(|r| same_value(&r.value, iv));
        }
        constants.sort_by_key(|r| (r.class_degree, r.value.to_string()));
    }

    let generic = if opts.generic {
        generic_solution_truncation(&g, &n_eff, true)?
    } else {
        Vec::new()
    };

    let crit = critical_points(&g)?;

    let mut at_zero = Vec::new();
    if opts.finite {
        let mut centers: Vec<CurvePoint> = Vec::new();
        let mut seen = BTreeSet::new();
        for c in crit.iter().filter(|c| !c.y0.is_infinite()) {
            if seen.insert(c.key()) {
                centers.push(c.clone());
            }
        }
        if let Some(iv) = &opts.iv {
            for c in centers_with_y0(&g, iv)? {
                if seen.insert(c.key()) {
                    centers.push(c);
                }
            }
        }
        for c in &centers {
            if let Some(iv) = &opts.iv {
                match c.y0.finite() {
                    Some(v) if same_value(v, iv) => {}
                    _ => continue,
                }
            }
            at_zero.extend(solutions_at_center(&g, c, 0, &n_eff, bound, guarantee)?);
        }
        if opts.iv.is_none() {
            // solutions with a pole at zero, via the 1/y substitution
            let gi = inverted_equation(&g)?;
            if !gi.is_constant() && gi.deg1() > 0 && gi.deg2() > 0 || is_solvable_line(&gi) {
                transforms.push(format!("inversion y -> 1/y: {}", gi.render()));
                let zero = AlgElem::zero(&gi.field);
                for c in centers_with_y0(&gi, &zero)? {
                    for sol in solutions_at_center(&gi, &c, 0, &n_eff, truncation_bound(&gi), guarantee)? {
                        at_zero.push(invert_solution(&g, sol, &n_eff)?);
                    }
                }
            }
        }
        if let Some(iv) = &opts.iv {
            at_zero.retain(|t| {
                let c0 = t.series.coeff_at(&Q::zero());
                if iv.is_zero() {
                    t.series
                        .order_lower_bound()
                        .map(|o| o > Q::zero())
                        .unwrap_or(false)
                        || same_value(&c0, iv)
                } else {
                    same_value(&c0, iv)
                }
            });
        }
        sort_truncations(&mut at_zero);
    }

    let mut at_infinity = Vec::new();
    if opts.infinity {
        for c in crit.iter() {
            let finite_y0 = !c.y0.is_infinite();
            let p0_zero = c.p0.finite().map(|v| v.is_zero()).unwrap_or(false);
            if finite_y0 && p0_zero {
                at_infinity.extend(solutions_at_center(&g, c, 2, &n_eff, bound, guarantee)?);
            }
        }
        // unbounded growth at infinity: 1/y tends to zero
        let gi = inverted_equation(&g)?;
        if !gi.is_constant() {
            let zero = AlgElem::zero(&gi.field);
            if let Ok(c) = CurvePoint::new(&gi, Coord::Finite(zero.clone()), Coord::Finite(zero)) {
                for sol in solutions_at_center(&gi, &c, 2, &n_eff, truncation_bound(&gi), guarantee)? {
                    at_infinity.push(invert_solution(&g, sol, &n_eff)?);
                }
            }
        }
        sort_truncations(&mut at_infinity);
    }

    Ok(SolveReport {
        equation: g,
        generic,
        constants,
        at_zero,
        at_infinity,
        transforms,
    })
}

/// A curve with no y-dependence (e.g. "1 - p") still carries solutions
/// y = p0 x + c; the local machinery handles it through its places.
fn is_solvable_line(g: &BiPoly) -> bool {
    !g.is_constant() && g.deg2() > 0
}

/// The generic solution around a non-critical initial tuple (_CC, _P) with
/// F(_CC,_P) = 0: coefficients c_k = y^(k)(0)/k! computed by the implicit
/// derivation D(_CC) = _P, D(_P) = -F_y _P / F_p.
pub fn generic_solution_truncation(
    f: &BiPoly,
    order: &Q,
    _irreducible: bool,
) -> Result<Vec<GenericSolution>> {
    let (g, _) = squarefree_normalize(f)?;
    if g.deg2() == 0 {
        return Err(Error::Invalid(
            "the equation does not involve y' after normalization".into(),
        ));
    }
    let base = g.field.clone();
    let (f1, cc) = base.adjoin_transcendental("_CC")?;
    let cc_level = f1.num_levels();
    let gc = g.coerce(&f1)?;
    let up = gc.eval_v1(&cc)?;
    let d = up
        .degree()
        .ok_or_else(|| Error::Internal("curve vanishes at a generic y".into()))?;
    let (field2, p_elem, relation) = if d == 1 {
        let p = up.coeff(0).neg().div(&up.coeff(1))?;
        (f1.clone(), p, None)
    } else {
        let monic = up.make_monic()?;
        let named = UniPoly::new("_P", &monic.field, monic.coeffs.clone())?;
        let dd = named
            .degree()
            .ok_or_else(|| Error::Internal("zero defining polynomial".into()))?;
        let (f2, gen) = f1.adjoin_algebraic(Some("_P".to_string()), &named.coeffs[..dd])?;
        (f2, gen, Some(named))
    };
    let p_level = relation.as_ref().map(|_| field2.num_levels());
    let ccx = cc.coerce(&field2)?;
    let fy = gc.partial_derivative(&gc.vars.0.clone())?;
    let fp = gc.partial_derivative(&gc.vars.1.clone())?;
    let fy_v = fy.coerce(&field2)?.eval(&ccx, &p_elem)?;
    let fp_v = fp.coerce(&field2)?.eval(&ccx, &p_elem)?;
    if fp_v.is_zero() {
        return Err(Error::Internal(
            "dF/dy' vanishes on the whole curve; normalization failed".into(),
        ));
    }
    let pdot = fy_v.mul(&p_elem)?.div(&fp_v)?.neg();
    let kmax = q_floor_i64(order)?.max(1);
    let mut coeffs = vec![ccx.clone(), p_elem.clone()];
    let mut yk = p_elem.clone();
    let mut fact = Q::one();
    for k in 2..=kmax {
        let mut dk = yk.partial(cc_level).mul(&p_elem)?;
        if let Some(pl) = p_level {
            dk = dk.add(&yk.partial(pl).mul(&pdot)?)?;
        }
        yk = dk;
        fact *= Q::from_integer(BigInt::from(k));
        coeffs.push(yk.scale(&(Q::one() / &fact)));
    }
    let mut exceptional = vec!["_P = 0".to_string()];
    if !fp_v.is_zero() && relation.is_some() {
        exceptional.push(format!("{} = 0", fp_v));
    }
    if let Some(lc) = gc.coeffs_in_v2().pop() {
        if !lc.is_constant() {
            exceptional.push(format!("{} = 0", lc.eval(&cc)?));
        }
    }
    Ok(vec![GenericSolution {
        field: field2,
        coeffs,
        relation,
        exceptional,
        component_id: 0,
    }])
}

impl GenericSolution {
    /// Substitute a concrete curve point (y0, p0) for (_CC, _P).
    pub fn specialize(&self, y0: &AlgElem, p0: &AlgElem) -> Result<Vec<AlgElem>> {
        let target = y0.field().join(&p0.field())?;
        let has_p = self.relation.is_some();
        let cc_level = self.field.num_levels() - if has_p { 1 } else { 0 };
        let mut out = Vec::new();
        for c in &self.coeffs {
            let tops = if has_p {
                c.top_coefficients()?
            } else {
                vec![c.clone()]
            };
            let mut acc = AlgElem::zero(&target);
            let mut ppow = AlgElem::one(&target);
            for t in tops {
                let v = t.substitute_generator(cc_level, &y0.coerce(&target)?)?;
                acc = acc.add(&v.mul(&ppow)?)?;
                ppow = ppow.mul(&p0.coerce(&target)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Expand a conjugacy-class representative into one truncation per root of
/// the class polynomial (each conjugate obtained by substituting the class
/// generator). Truncations that are not class representatives, or whose
/// coefficient field is not generated by the class polynomial at the top
/// level, are returned unchanged.
pub fn expand_conjugates(t: &SolutionTruncation) -> Result<Vec<SolutionTruncation>> {
    let cls = match &t.conjugacy_class {
        Some(c) if c.degree().is_some_and(|d| d > 1) => c.clone(),
        _ => return Ok(vec![t.clone()]),
    };
    let fld = t.series.field();
    let top = fld.num_levels();
    if top == 0 {
        return Ok(vec![t.clone()]);
    }
    let Some(mp) = fld.minpoly_at(top) else {
        return Ok(vec![t.clone()]);
    };
    let d = cls.degree().unwrap();
    let parent = fld.parent();
    let Ok(cls_parent) = cls.make_monic()?.coerce(&parent) else {
        return Ok(vec![t.clone()]);
    };
    if mp.len() != d + 1 || (0..=d).any(|i| mp[i] != cls_parent.coeff(i)) {
        return Ok(vec![t.clone()]);
    }
    let mut out = Vec::new();
    for root in crate::factor::roots_in_closure(&cls_parent)? {
        let val = root.value.clone();
        let target = val.field().clone();
        let series = t
            .series
            .map_coeffs(&target, |c| c.substitute_generator(top, &val))?;
        out.push(SolutionTruncation {
            series,
            initial_tuple: t.initial_tuple.clone(),
            n: t.n,
            expansion_point: t.expansion_point,
            guarantee: t.guarantee,
            free_parameter: t.free_parameter.clone(),
            conjugacy_class: if root.class_degree > 1 {
                root.class_minpoly.clone()
            } else {
                None
            },
        });
    }
    out.sort_by_key(|s| s.series.to_string());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::tests::bp;
    use crate::field::q_ratio;

    fn qq() -> NumberField {
        NumberField::rationals()
    }

    fn qi(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }

    #[test]
    fn constants_examples() {
        // circle: y = 1 and y = -1
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let cs = constant_solutions(&f).unwrap();
        let mut vals: Vec<String> = cs.iter().map(|r| r.value.to_string()).collect();
        vals.sort();
        assert_eq!(vals, vec!["-1", "1"]);
        // p^2 - y: y = 0
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let cs = constant_solutions(&f).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].value.is_zero());
        // 4p^2y - 1: none
        let f = bp(&[(1, 2, 4), (0, 0, -1)]);
        assert!(constant_solutions(&f).unwrap().is_empty());
    }

    #[test]
    fn generic_linear_eliminates_p() {
        // p - y: y = _CC e^x
        let f = bp(&[(0, 1, 1), (1, 0, -1)]);
        let gs = generic_solution_truncation(&f, &qi(4), true).unwrap();
        assert_eq!(gs.len(), 1);
        let g = &gs[0];
        assert!(g.relation.is_none());
        let cc = g.field.generator_named("_CC").unwrap();
        assert_eq!(g.coeffs[0], cc);
        assert_eq!(g.coeffs[1], cc);
        assert_eq!(g.coeffs[3], cc.scale(&q_ratio(1, 6)));
        assert_eq!(g.coeffs[4], cc.scale(&q_ratio(1, 24)));
    }

    #[test]
    fn generic_parabola_exact() {
        // p^2 - y: _CC + _P x + x^2/4, later coefficients vanish
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let gs = generic_solution_truncation(&f, &qi(5), true).unwrap();
        let g = &gs[0];
        assert!(g.relation.is_some());
        assert_eq!(g.coeffs[2], g.field.from_q(q_ratio(1, 4)));
        assert!(g.coeffs[3].is_zero());
        assert!(g.coeffs[5].is_zero());
    }

    #[test]
    fn generic_circle_relation() {
        // p^2 + y^2 - 1: relation _P^2 = 1 - _CC^2, cosine/sine recursion
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let gs = generic_solution_truncation(&f, &qi(3), true).unwrap();
        let g = &gs[0];
        let rel = g.relation.as_ref().unwrap();
        assert_eq!(rel.degree(), Some(2));
        let cc = rel.field.generator_named("_CC").unwrap();
        // constant term of the monic relation: _CC^2 - 1
        let want = cc.mul(&cc).unwrap().sub(&AlgElem::one(&rel.field)).unwrap();
        assert_eq!(rel.coeff(0), want);
        let ccx = g.field.generator_named("_CC").unwrap();
        let ppx = g.field.generator_named("_P").unwrap();
        assert_eq!(g.coeffs[2], ccx.scale(&q_ratio(-1, 2)));
        assert_eq!(g.coeffs[3], ppx.scale(&q_ratio(-1, 6)));
    }

    #[test]
    fn generic_specialization_matches() {
        // circle specialized at (0, 1) is the sine series
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let gs = generic_solution_truncation(&f, &qi(5), true).unwrap();
        let g = &gs[0];
        let q = qq();
        let vals = g.specialize(&q.from_int(0), &q.from_int(1)).unwrap();
        assert!(vals[0].is_zero());
        assert_eq!(vals[1], q.from_int(1));
        assert!(vals[2].is_zero());
        assert_eq!(vals[3], q.from_q(q_ratio(-1, 6)));
        assert_eq!(vals[5], q.from_q(q_ratio(1, 120)));
    }

    #[test]
    fn solve_ramified_class() {
        // 4 y'^2 y = 1: the class (sigma_1^2/4) x^(2/3) with sigma_1^3 = 6
        let f = bp(&[(1, 2, 4), (0, 0, -1)]);
        let rep = puiseux_solve(&f, &qi(2), &SolveOptions::default()).unwrap();
        assert!(rep.constants.is_empty());
        assert_eq!(rep.generic.len(), 1);
        assert_eq!(rep.at_zero.len(), 1);
        let t = &rep.at_zero[0];
        assert_eq!(t.n, 3);
        assert!(t.guarantee);
        let cls = t.conjugacy_class.as_ref().unwrap();
        assert_eq!(cls.degree(), Some(3));
        let c = t.series.coeff_at(&q_ratio(2, 3));
        // c = sigma_1^2 / 4, so c^3 = 36/64 = 9/16
        let c3 = c.mul(&c).unwrap().mul(&c).unwrap();
        assert_eq!(c3, c.field().from_q(q_ratio(9, 16)));
        // residual vanishes on all known terms
        let r = ode_residual(&rep.equation, &t.series).unwrap();
        assert_eq!(r.num_terms(), 0, "residual {}", r);
    }

    #[test]
    fn expand_conjugates_preserves_solutions() {
        let f = bp(&[(1, 2, 4), (0, 0, -1)]);
        let rep = puiseux_solve(&f, &qi(2), &SolveOptions::default()).unwrap();
        let t = &rep.at_zero[0];
        let expanded = expand_conjugates(t).unwrap();
        // conjugates of the class representative, counted with class degree
        let total: usize = expanded
            .iter()
            .map(|e| e.conjugacy_class.as_ref().and_then(|c| c.degree()).unwrap_or(1))
            .sum();
        assert_eq!(total, 3);
        for e in &expanded {
            // every conjugate solves the equation to the known precision
            let r = ode_residual(&rep.equation, &e.series).unwrap();
            assert_eq!(r.num_terms(), 0, "residual {}", r);
            let c = e.series.coeff_at(&q_ratio(2, 3));
            let c3 = c.mul(&c).unwrap().mul(&c).unwrap();
            assert_eq!(c3, c.field().from_q(q_ratio(9, 16)));
        }
        // a class-free truncation is returned unchanged
        let cosine = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let rep2 = puiseux_solve(&cosine, &qi(4), &SolveOptions::default()).unwrap();
        let plain = expand_conjugates(&rep2.at_zero[0]).unwrap();
        assert_eq!(plain.len(), 1);
    }

    #[test]
    fn solve_circle_cosine() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let rep = puiseux_solve(&f, &qi(6), &SolveOptions::default()).unwrap();
        assert_eq!(rep.constants.len(), 2);
        assert_eq!(rep.at_zero.len(), 2);
        assert!(rep.at_infinity.is_empty());
        let cos = rep
            .at_zero
            .iter()
            .find(|t| t.series.coeff_at(&Q::zero()) == qq().from_int(1))
            .unwrap();
        assert_eq!(cos.n, 1);
        assert!(cos.guarantee);
        assert_eq!(cos.series.coeff_at(&qi(2)), qq().from_q(q_ratio(-1, 2)));
        assert_eq!(cos.series.coeff_at(&qi(4)), qq().from_q(q_ratio(1, 24)));
        assert_eq!(cos.series.coeff_at(&qi(6)), qq().from_q(q_ratio(-1, 720)));
        assert!(cos.series.coeff_at(&qi(1)).is_zero());
        assert!(cos.series.coeff_at(&qi(3)).is_zero());
    }

    #[test]
    fn solve_pole_and_infinity_family() {
        // y'^2 = 4 y^3: y = 1/(x+c)^2; at zero the pole solution x^-2,
        // at infinity the one-parameter family
        let f = bp(&[(0, 2, 1), (3, 0, -4)]);
        let rep = puiseux_solve(&f, &qi(4), &SolveOptions::default()).unwrap();
        assert_eq!(rep.constants.len(), 1);
        assert!(rep.constants[0].value.is_zero());
        // at zero: only the exact pole 1/x^2
        assert_eq!(rep.at_zero.len(), 1);
        let pole = &rep.at_zero[0];
        assert!(pole.initial_tuple.y0.is_infinite());
        assert!(pole.series.truncation().is_none(), "pole should be exact");
        assert_eq!(pole.series.coeff_at(&qi(-2)), pole.series.field().one());
        assert_eq!(pole.series.num_terms(), 1);
        // at infinity: one family with a free parameter
        assert_eq!(rep.at_infinity.len(), 1);
        let fam = &rep.at_infinity[0];
        assert!(fam.free_parameter.is_some());
        let r = ode_residual(&rep.equation, &fam.series).unwrap();
        assert_eq!(r.num_terms(), 0, "family residual {}", r);
    }

    #[test]
    fn solve_simple_pole() {
        // y' + y^2 = 0: y = 1/(x+c), at zero the exact pole 1/x
        let f = bp(&[(0, 1, 1), (2, 0, 1)]);
        let rep = puiseux_solve(&f, &qi(3), &SolveOptions::default()).unwrap();
        assert_eq!(rep.at_zero.len(), 1);
        let pole = &rep.at_zero[0];
        assert!(pole.series.truncation().is_none());
        assert_eq!(pole.series.coeff_at(&qi(-1)), pole.series.field().one());
        assert_eq!(pole.series.num_terms(), 1);
    }

    #[test]
    fn solve_growing_at_infinity() {
        // y'^2 = y: y = (x+c)^2/4 grows at infinity as a family
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let rep = puiseux_solve(&f, &qi(4), &SolveOptions::default()).unwrap();
        // at zero: x^2/4 exact through (0,0)
        assert_eq!(rep.at_zero.len(), 1);
        let t = &rep.at_zero[0];
        assert!(t.series.truncation().is_none());
        assert_eq!(t.series.coeff_at(&qi(2)), qq().from_q(q_ratio(1, 4)));
        // at infinity: family 1/ytilde with ytilde = 4/(x+c)^2
        assert_eq!(rep.at_infinity.len(), 1);
        let fam = &rep.at_infinity[0];
        assert!(fam.free_parameter.is_some());
        let r = ode_residual(&rep.equation, &fam.series).unwrap();
        assert_eq!(r.num_terms(), 0, "family residual {}", r);
    }

    #[test]
    fn iv_filter_regular_point() {
        // circle with iv = 1/2: one conjugate class through (1/2, ±√3/2)
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let mut opts = SolveOptions::default();
        opts.iv = Some(qq().from_q(q_ratio(1, 2)));
        opts.infinity = false;
        let rep = puiseux_solve(&f, &qi(4), &opts).unwrap();
        assert!(rep.constants.is_empty());
        assert_eq!(rep.at_zero.len(), 1);
        let t = &rep.at_zero[0];
        assert_eq!(t.series.coeff_at(&Q::zero()), t.series.field().from_q(q_ratio(1, 2)));
        assert_eq!(t.initial_tuple.field.tower_degree(), 2);
        let r = ode_residual(&rep.equation, &t.series).unwrap();
        assert_eq!(r.num_terms(), 0);
    }

    #[test]
    fn iv_filter_keeps_matching_constant() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        let mut opts = SolveOptions::default();
        opts.iv = Some(qq().from_int(1));
        opts.infinity = false;
        let rep = puiseux_solve(&f, &qi(4), &opts).unwrap();
        assert_eq!(rep.constants.len(), 1);
        assert_eq!(rep.constants[0].value, qq().from_int(1));
        assert_eq!(rep.at_zero.len(), 1);
        assert_eq!(rep.at_zero[0].series.coeff_at(&Q::zero()), qq().from_int(1));
    }

    #[test]
    fn no_puiseux_solution_for_exponential_pole() {
        // y' = y has no Puiseux solutions with a pole and none at infinity
        let f = bp(&[(0, 1, 1), (1, 0, -1)]);
        let rep = puiseux_solve(&f, &qi(4), &SolveOptions::default()).unwrap();
        // at zero only the zero constant (through (0,0): y = 0 is constant,
        // handled by constants; the place at (0,0) passes with n=1 giving
        // members of the generic family)
        for t in &rep.at_zero {
            assert!(!t.initial_tuple.y0.is_infinite(), "no pole solutions");
        }
        assert!(rep.at_infinity.is_empty());
    }
}
