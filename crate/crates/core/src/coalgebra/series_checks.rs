use std::collections::BTreeMap;

use crate::algebra::{LinMap, Matrix};
use crate::error::Result;
use crate::formal::{delta_shift, Coeff, Difference, FormalSeries, SignedVar, VarName, Window};
use crate::report::{CheckReport, Witness};

use super::cb::{CbEvaluator, CbTerm};
use super::model::{DStarData, VertexCoalgebra};

fn var(s: &str) -> VarName {
    VarName::from(s)
}

/// `nabla(x) = sum_n Delta_n x^{-n-1}`.
pub fn nabla(v: &VertexCoalgebra, x: &str) -> FormalSeries<LinMap<2>> {
    FormalSeries::polynomial(&[var(x)], v.delta().iter().map(|(n, m)| (vec![-n - 1], m.clone()))).expect("one variable")
}

/// `(Id (x) c) nabla(z)`.
pub fn counit_nabla(v: &VertexCoalgebra, z: &str) -> FormalSeries<Matrix> {
    FormalSeries::polynomial(&[var(z)], v.delta().iter().map(|(n, _)| (vec![-n - 1], v.right_counit_image(n))))
        .expect("one variable")
}

/// `exp(+-z D*)` as a polynomial in `z`.
pub fn exponential(terms: &[Matrix], z: &str, negate: bool) -> FormalSeries<Matrix> {
    let coeffs = terms.iter().enumerate().map(|(k, m)| {
        let m = if negate && k % 2 == 1 { m.scale(&crate::algebra::Scalar::from_int(-1)) } else { m.clone() };
        (vec![k as i64], m)
    });
    FormalSeries::polynomial(&[var(z)], coeffs).expect("one variable")
}

fn witness(d: &Difference) -> Witness {
    let mono: Vec<String> = d.monomial.iter().map(|(v, e)| format!("{v}^{e}")).collect();
    let mono = mono.join(" ");
    Witness::new(d.exponents(), None, format!("{mono} : {}", d.lhs), format!("{mono} : {}", d.rhs))
}

fn compare<C: Coeff>(
    name: &str,
    lhs: &FormalSeries<C>,
    rhs: &FormalSeries<C>,
    within: Option<&Window>,
) -> Result<CheckReport> {
    let diff = match within {
        Some(w) => lhs.first_difference_within(rhs, w)?,
        None => lhs.first_difference(rhs)?,
    };
    let evaluated = lhs.len().max(rhs.len()) as u64;
    Ok(CheckReport::from_witnesses(name, evaluated, diff.iter().map(witness).collect()))
}

/// Items (2), (3), the series form of (4), and (6), with `z` powers up to
/// `z_order`.
pub(crate) fn dstar_series_items(v: &VertexCoalgebra, data: &DStarData, z_order: u32) -> Result<[CheckReport; 4]> {
    let (x, z) = (var("x"), var("z"));
    let terms = data.exponential_terms()?;
    let e_z = exponential(&terms, "z", false);
    let e_minus_z = exponential(&terms, "z", true);
    let e_x = exponential(&terms, "x", false);
    let nab = nabla(v, "x");
    let shifted = nab.taylor_shift(&x, &z, z_order)?;

    let lhs2 = e_z.convolve(&nab, |m, d| d.then_map_slot(m, 1).expect("slot 1"))?;
    let item2 = compare("item2_translation", &lhs2, &shifted, None)?;

    let item3 = compare("item3_cocreation", &e_z, &counit_nabla(v, "z"), None)?;

    let lhs4 = nab.map_coeffs(LinMap::transpose12);
    let rhs4 = nab.negate_var(&x)?.convolve(&e_x, |d, m| d.after(m))?;
    let item4 = compare("coskew_series", &lhs4, &rhs4, None)?;

    let conj = nab.convolve(&e_z, |d, m| d.after(m))?;
    let lhs6 = e_minus_z.convolve(&conj, |m, d| d.then_map_slot(m, 2).expect("slot 2"))?;
    let item6 = compare("item6_conjugation", &lhs6, &shifted, None)?;

    Ok([item2, item3, item4, item6])
}

fn composition_series(table: &BTreeMap<(i64, i64), LinMap<3>>, u_var: &str, w_var: &str) -> FormalSeries<LinMap<3>> {
    FormalSeries::polynomial(
        &[var(u_var), var(w_var)],
        table.iter().map(|(&(u, w), m)| (vec![-u - 1, -w - 1], m.clone())),
    )
    .expect("distinct variables")
}

/// Co-Jacobi identity as series in `x, y, z`, compared on
/// `[-order, order]^3`:
/// `delta(x-z,y) (nabla(z) (x) Id) nabla(y) = delta(x-y,z) (Id (x) nabla(y)) nabla(x)
///  - delta(-y+x,z) (T (x) Id)(Id (x) nabla(x)) nabla(y)`.
pub fn co_jacobi_series_at(ev: &CbEvaluator<'_>, order: i64) -> Result<CheckReport> {
    let g1 = composition_series(ev.compositions(CbTerm::One), "z", "y");
    let g2 = composition_series(ev.compositions(CbTerm::Two), "y", "x");
    let g3 = composition_series(ev.compositions(CbTerm::Three), "x", "y");
    let s = ev.support();
    let extent = if s.is_empty() { 0 } else { (s.lo + 1).abs().max((s.hi + 1).abs()) };
    let wide = Window::cube(&["x", "y", "z"], -order - extent, order + extent);
    let y = var("y");
    let z = var("z");
    let d1 = delta_shift(&SignedVar::plus("x"), &SignedVar::minus("z"), &y, &wide)?;
    let d2 = delta_shift(&SignedVar::plus("x"), &SignedVar::minus("y"), &z, &wide)?;
    let d3 = delta_shift(&SignedVar::minus("y"), &SignedVar::plus("x"), &z, &wide)?;
    let lhs = d1.mul_coeffs(&g1)?;
    let rhs = d2.mul_coeffs(&g2)?.sub(&d3.mul_coeffs(&g3)?)?;
    compare("co_jacobi_series", &lhs, &rhs, Some(&Window::cube(&["x", "y", "z"], -order, order)))
}

/// The series spot check used by bundle A, on a window that grows with the
/// width of the support.
pub(crate) fn co_jacobi_series(v: &VertexCoalgebra, ev: &CbEvaluator<'_>) -> CheckReport {
    let s = v.support();
    let order = if s.is_empty() { 6 } else { 6.max(2 * s.len() as i64 + 2) };
    co_jacobi_series_at(ev, order).unwrap_or_else(|e| {
        CheckReport::fail("co_jacobi_series", Witness::new(vec![], None, format!("evaluation error: {e}"), "-"))
    })
}
