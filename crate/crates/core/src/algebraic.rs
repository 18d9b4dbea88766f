//! Deciding algebraic solutions: seed a Puiseux series solution, prolong it
//! past the reconstruction bound, recover a minimal polynomial candidate by
//! linear algebra, and certify it with a differential pseudo-remainder.

use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeSet;

use crate::bipoly::{squarefree_normalize, BiPoly};
use crate::briot::prolong_truncation;
use crate::field::{AlgElem, NumberField, Q};
use crate::series::PuiseuxSeries;
use crate::solver::{puiseux_solve, SolveOptions};
use crate::upoly::UniPoly;
use crate::{Error, Result};

/// A certified minimal polynomial G(x,y) of an algebraic solution; every
/// solution of the equation is then a branch of G(x+c, y) = 0.
#[derive(Debug, Clone)]
pub struct MinimalPolynomialResult {
    /// the minimal polynomial, in variables (x, y)
    pub g: BiPoly,
    /// G with x replaced by x + c (c a free constant)
    pub shifted: BiPoly,
    pub component_id: usize,
    pub family_note: String,
}

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Embed a polynomial in y as a bivariate polynomial in (x, y).
fn embed_y(u: &UniPoly, vars: (&str, &str), field: &NumberField) -> Result<BiPoly> {
    let mut out = BiPoly::zero(vars, field);
    if let Some(d) = u.degree() {
        for k in 0..=d {
            let c = u.coeff(k).coerce(field)?;
            if !c.is_zero() {
                out.add_term((0, k as u32), c)?;
            }
        }
    }
    Ok(out)
}

/// The y-leading coefficient of a bivariate polynomial in (x, y), as a
/// bivariate polynomial in x only.
fn y_leading(b: &BiPoly) -> Result<BiPoly> {
    let d = b.deg2();
    let mut out = BiPoly::zero((&b.vars.0, &b.vars.1), &b.field);
    for ((i, j), c) in b.terms.iter() {
        if *j == d {
            out.add_term((*i, 0), c.clone())?;
        }
    }
    Ok(out)
}

/// Pseudo-remainder of b by a with respect to y (second variable).
fn prem_y(b: &BiPoly, a: &BiPoly) -> Result<BiPoly> {
    let da = a.deg2();
    if da == 0 {
        return Err(Error::Invalid("pseudo-division by a y-free polynomial".into()));
    }
    let field = b.field.join(&a.field)?;
    let a = a.coerce(&field)?;
    let lca = y_leading(&a)?;
    let mut r = b.coerce(&field)?;
    let mut guard = 0u32;
    while !r.is_zero() && r.deg2() >= da {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Internal("pseudo-division did not terminate".into()));
        }
        let dr = r.deg2();
        let lcr = y_leading(&r)?;
        let mut shift = BiPoly::zero((&r.vars.0, &r.vars.1), &field);
        shift.add_term((0, dr - da), AlgElem::one(&field))?;
        r = r.mul(&lca)?.sub(&lcr.mul(&shift)?.mul(&a)?)?;
    }
    Ok(r)
}

/// Differential pseudo-remainder of F(y, y') with respect to A(x, y):
/// substitute y' = -A_x/A_y into F (cleared by A_y^deg_p) and pseudo-reduce
/// the result by A in y. Zero certifies that every branch of A solves F.
pub fn diff_pseudo_remainder(f: &BiPoly, a: &BiPoly) -> Result<BiPoly> {
    if a.deg2() == 0 {
        return Err(Error::Invalid("A must be non-constant in y".into()));
    }
    let field = f.field.join(&a.field)?;
    let a = a.coerce(&field)?;
    let fc = f.coerce(&field)?;
    let ax = a.partial_derivative(&a.vars.0.clone())?;
    let ay = a.partial_derivative(&a.vars.1.clone())?;
    let dp = fc.deg2();
    let max = ax.neg();
    let fj = fc.coeffs_in_v2();
    let mut b = BiPoly::zero((&a.vars.0, &a.vars.1), &field);
    for (j, cj) in fj.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let term = embed_y(cj, (&a.vars.0, &a.vars.1), &field)?
            .mul(&max.pow(j as u64)?)?
            .mul(&ay.pow((dp as u64) - j as u64)?)?;
        b = b.add(&term)?;
    }
    prem_y(&b, &a)
}

/// Replace x by x + c for a fresh free constant c.
pub fn shift_family(g: &BiPoly, c: &str) -> Result<BiPoly> {
    let (fc, cgen) = g.field.adjoin_transcendental(c)?;
    let gc = g.coerce(&fc)?;
    gc.shift(&cgen, &AlgElem::zero(&fc))
}

/// Reduced row echelon form in place; returns pivot column per row.
fn rref(rows: &mut Vec<Vec<AlgElem>>, ncols: usize) -> Result<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let mut sel = None;
        for r in rank..rows.len() {
            if !rows[r][col].is_zero() {
                sel = Some(r);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        rows.swap(rank, sel);
        let inv = rows[rank][col].inv()?;
        for c in col..ncols {
            rows[rank][c] = rows[rank][c].mul(&inv)?;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let sub = factor.mul(&rows[rank][c])?;
                    rows[r][c] = rows[r][c].sub(&sub)?;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(pivots)
}

/// Scale rational candidates to a primitive integer polynomial with
/// positive leading term (ordered by (deg_y, deg_x)); otherwise make the
/// leading coefficient one.
fn normalize_candidate(a: &BiPoly) -> Result<BiPoly> {
    let lead = a
        .terms
        .iter()
        .max_by_key(|((i, j), _)| (*j, *i))
        .map(|(k, c)| (*k, c.clone()))
        .ok_or_else(|| Error::Internal("empty candidate".into()))?;
    let rationals: Option<Vec<Q>> = a.terms.values().map(|c| c.as_rational()).collect();
    match rationals {
        Some(qs) => {
            let mut den = BigInt::one();
            let mut num = BigInt::zero();
            for q in &qs {
                den = num::integer::lcm(den.clone(), q.denom().clone());
                num = num::integer::gcd(num.clone(), q.numer().clone());
            }
            if num.is_zero() {
                num = BigInt::one();
            }
            let mut scale = Q::new(den, num);
            let leadq = lead.1.as_rational().unwrap();
            if (&leadq * &scale).is_negative() {
                scale = -scale;
            }
            a.scale(&a.field.from_q(scale))
        }
        None => {
            let inv = lead.1.inv()?;
            a.scale(&inv)
        }
    }
}

/// Reconstruct the minimal-degree polynomial A(x,y) with deg_x <= d_x,
/// deg_y <= d_y vanishing on ybar up to the reconstruction bound; None when
/// only the zero polynomial qualifies.
pub fn reconstruct_candidate(
    ybar: &PuiseuxSeries,
    d_x: u32,
    d_y: u32,
    nu_prime: &Q,
) -> Result<Option<BiPoly>> {
    if nu_prime > &Q::zero() {
        return Err(Error::Invalid("nu' must be non-positive".into()));
    }
    let dxq = qi(d_x as i64);
    let dyq = qi(d_y as i64);
    let known_bound = qi(2) * &dxq * &dyq - qi(2) * nu_prime * (&dyq - Q::one());
    if let Some(t) = ybar.truncation() {
        if t <= known_bound {
            return Err(Error::InsufficientTruncation(format!(
                "reconstruction requires the series beyond order {known_bound}, known to {t}"
            )));
        }
    }
    let cond_bound = qi(2) * &dxq * &dyq - nu_prime * (&dyq - Q::one());
    let field = ybar.field();
    // powers of ybar
    let mut pows: Vec<PuiseuxSeries> = Vec::with_capacity(d_y as usize + 1);
    pows.push(PuiseuxSeries::constant(
        AlgElem::one(&field),
        &ybar.var,
        ybar.point,
    ));
    for j in 1..=d_y {
        let next = pows[(j - 1) as usize].mul(ybar)?;
        pows.push(next);
    }
    for dy_c in 1..=d_y {
        // all coefficients of x^i ybar^j below this order are reliable
        let row_limit: Option<Q> = (0..=dy_c)
            .filter_map(|j| pows[j as usize].truncation())
            .min();
        if let Some(rl) = &row_limit {
            if *rl <= cond_bound {
                return Err(Error::InsufficientTruncation(format!(
                    "reconstruction conditions reach order {cond_bound}, powers known to {rl}"
                )));
            }
        }
        for dx_c in 0..=d_x {
            // unknowns (i, j), i <= dx_c, j <= dy_c, ordered by (j, i)
            let mut cols: Vec<(u32, u32)> = Vec::new();
            for j in 0..=dy_c {
                for i in 0..=dx_c {
                    cols.push((i, j));
                }
            }
            // condition exponents: the union of supports of x^i * ybar^j,
            // using every reliably known coefficient (at least the required
            // bound; extra conditions only cut spurious kernel elements,
            // the true minimal polynomial satisfies them all)
            let mut exps: BTreeSet<Q> = BTreeSet::new();
            for &(i, j) in &cols {
                for (e, _) in pows[j as usize].iter_terms() {
                    let s = &e + qi(i as i64);
                    let ok = match &row_limit {
                        Some(rl) => &s < rl,
                        None => true,
                    };
                    if ok {
                        exps.insert(s);
                    }
                }
            }
            let mut rows: Vec<Vec<AlgElem>> = Vec::new();
            for e in &exps {
                let mut row = Vec::with_capacity(cols.len());
                for &(i, j) in &cols {
                    row.push(pows[j as usize].coeff_at(&(e - qi(i as i64))));
                }
                rows.push(row);
            }
            let pivots = rref(&mut rows, cols.len())?;
            if pivots.len() == cols.len() {
                continue; // trivial kernel at these degrees
            }
            // pick the highest-order free column and back-substitute
            let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
            let free = (0..cols.len())
                .rev()
                .find(|c| !pivot_set.contains(c))
                .expect("free column exists");
            let mut sol = vec![AlgElem::zero(&field); cols.len()];
            sol[free] = AlgElem::one(&field);
            for (r, &pc) in pivots.iter().enumerate() {
                sol[pc] = rows[r][free].neg();
            }
            let mut a = BiPoly::zero(("x", "y"), &field);
            for (k, c) in cols.iter().zip(sol.into_iter()) {
                if !c.is_zero() {
                    a.add_term(*k, c)?;
                }
            }
            if a.is_zero() || a.deg2() == 0 {
                continue;
            }
            return Ok(Some(normalize_candidate(&a)?));
        }
    }
    Ok(None)
}

/// Decide whether the equation has algebraic solutions and return the
/// certified minimal polynomial of one of them; all solutions are then
/// branches of its x-shifts.
pub fn algebraic_solution(
    f: &BiPoly,
    _irreducible: bool,
) -> Result<Option<MinimalPolynomialResult>> {
    let (g, _) = squarefree_normalize(f)?;
    let d_x = g.deg2();
    let d_y = g.deg1() + g.deg2();
    if d_x == 0 {
        return Err(Error::Invalid(
            "the equation does not involve y' after normalization".into(),
        ));
    }
    // seed: a nonconstant solution truncation around zero
    let opts = SolveOptions {
        generic: false,
        constants: false,
        finite: true,
        infinity: false,
        iv: None,
        bound_override: None,
    };
    let rep = puiseux_solve(&g, &Q::one(), &opts)?;
    let mut seeds: Vec<_> = rep
        .at_zero
        .into_iter()
        .filter(|t| t.guarantee && t.free_parameter.is_none())
        .collect();
    if seeds.is_empty() {
        return Ok(None);
    }
    seeds.sort_by_key(|t| {
        (
            t.series.field().tower_degree(),
            t.series.ramification(),
            t.series.to_string(),
        )
    });
    let seed = &seeds[0];
    let mut ybar = seed.series.clone();
    let n = ybar.ramification();
    let nu = ybar.order()?;
    let nu_prime = if nu < Q::zero() { nu } else { Q::zero() };
    let dxq = qi(d_x as i64);
    let dyq = qi(d_y as i64);
    let target = qi(2) * &dxq * &dyq - qi(2) * &nu_prime * (&dyq - Q::one())
        + Q::new(BigInt::one(), BigInt::from(n));
    if let Some(t) = ybar.truncation() {
        if t <= target {
            ybar = prolong_truncation(&g, &ybar, &target, true)?;
        }
    }
    let cand = match reconstruct_candidate(&ybar, d_x, d_y, &nu_prime)? {
        Some(a) => a,
        None => return Ok(None),
    };
    let rem = diff_pseudo_remainder(&g, &cand)?;
    if !rem.is_zero() {
        return Ok(None);
    }
    if cand.deg1() != d_x {
        return Err(Error::Internal(format!(
            "certified candidate has x-degree {} but the theory requires {}",
            cand.deg1(),
            d_x
        )));
    }
    let shifted = shift_family(&cand, "c")?;
    Ok(Some(MinimalPolynomialResult {
        g: cand.clone(),
        shifted,
        component_id: 0,
        family_note: format!(
            "all formal Puiseux series solutions are algebraic, given by {} = 0 with c an arbitrary constant",
            // render with the shift made explicit
            shifted_render(&cand)
        ),
    }))
}

fn shifted_render(g: &BiPoly) -> String {
    // display-only: G(x+c, y)
    format!("G(x+c, y) with G = {}", g.render())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::tests::bp;
    use crate::field::q_ratio;
    use crate::series::ExpansionPoint;

    fn qq() -> NumberField {
        NumberField::rationals()
    }

    fn xy(terms: &[(u32, u32, i64)]) -> BiPoly {
        let q = qq();
        BiPoly::from_terms(
            ("x", "y"),
            &q,
            terms.iter().map(|&(a, b, c)| ((a, b), q.from_int(c))),
        )
        .unwrap()
    }

    #[test]
    fn prem_examples() {
        // F = p^2 - y, A = 4y - x^2: zero
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let a = xy(&[(0, 1, 4), (2, 0, -1)]);
        assert!(diff_pseudo_remainder(&f, &a).unwrap().is_zero());
        // F = p - y, A = 4y - x^2: nonzero
        let f = bp(&[(0, 1, 1), (1, 0, -1)]);
        assert!(!diff_pseudo_remainder(&f, &a).unwrap().is_zero());
    }

    #[test]
    fn reconstruct_exact_parabola() {
        // ybar = x^2/4, bounds (2, 3): A = 4y - x^2
        let q = qq();
        let ybar = PuiseuxSeries::monomial(
            q.from_q(q_ratio(1, 4)),
            2,
            1,
            "x",
            ExpansionPoint::Zero,
        );
        let a = reconstruct_candidate(&ybar, 2, 3, &Q::zero())
            .unwrap()
            .unwrap();
        assert_eq!(a.render(), xy(&[(0, 1, 4), (2, 0, -1)]).render());
    }

    #[test]
    fn reconstruct_exponential_none() {
        // partial sums of e^x admit no algebraic relation at bounds (1, 2)
        let q = qq();
        let mut terms = Vec::new();
        let mut fact = Q::one();
        for k in 0..=14i64 {
            if k > 0 {
                fact *= Q::from_integer(BigInt::from(k));
            }
            terms.push((k, q.from_q(Q::one() / &fact)));
        }
        let ybar = PuiseuxSeries::from_terms(
            &q,
            "x",
            ExpansionPoint::Zero,
            1,
            terms,
            Some(Q::from_integer(BigInt::from(15))),
        )
        .unwrap();
        assert!(reconstruct_candidate(&ybar, 1, 2, &Q::zero())
            .unwrap()
            .is_none());
    }

    #[test]
    fn algebraic_parabola() {
        let f = bp(&[(0, 2, 1), (1, 0, -1)]);
        let res = algebraic_solution(&f, true).unwrap().unwrap();
        assert_eq!(res.g.render(), xy(&[(0, 1, 4), (2, 0, -1)]).render());
        // shift closure: prem(F, G(x+c, y)) = 0 identically in c
        assert!(diff_pseudo_remainder(&f, &res.shifted).unwrap().is_zero());
    }

    #[test]
    fn algebraic_ramified() {
        let f = bp(&[(1, 2, 4), (0, 0, -1)]);
        let res = algebraic_solution(&f, true).unwrap().unwrap();
        assert_eq!(
            res.g.render(),
            xy(&[(0, 3, 16), (2, 0, -9)]).render()
        );
        assert!(diff_pseudo_remainder(&f, &res.g).unwrap().is_zero());
        assert!(diff_pseudo_remainder(&f, &res.shifted).unwrap().is_zero());
        // degree bounds
        assert_eq!(res.g.deg1(), f.deg2());
        assert!(res.g.deg2() <= f.deg1() + f.deg2());
    }

    #[test]
    fn algebraic_none_for_exponential() {
        let f = bp(&[(0, 1, 1), (1, 0, -1)]);
        assert!(algebraic_solution(&f, true).unwrap().is_none());
    }

    #[test]
    fn algebraic_none_for_circle() {
        let f = bp(&[(0, 2, 1), (2, 0, 1), (0, 0, -1)]);
        assert!(algebraic_solution(&f, true).unwrap().is_none());
    }

    #[test]
    fn algebraic_pole_family() {
        // y' + y^2 = 0: y = 1/(x+c), G = xy - 1
        let f = bp(&[(0, 1, 1), (2, 0, 1)]);
        let res = algebraic_solution(&f, true).unwrap().unwrap();
        assert_eq!(res.g.render(), xy(&[(1, 1, 1), (0, 0, -1)]).render());
        assert!(diff_pseudo_remainder(&f, &res.shifted).unwrap().is_zero());
    }
}
