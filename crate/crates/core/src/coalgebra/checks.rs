use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{binom_or_zero, LinMap, Matrix, Scalar};
use crate::error::{Error, Result};
use crate::lattice::{Interval, LatticeBox, LatticePoint};
use crate::report::{CheckReport, Witness};

use super::cb::{first_column_difference, CbEvaluator};
use super::model::{DStarData, VertexCoalgebra};
use super::series_checks::{co_jacobi_series, dstar_series_items};
use super::window::EffectiveWindow;

fn map_witness<const R: usize>(indices: Vec<i64>, lhs: &LinMap<R>, rhs: &LinMap<R>) -> Option<Witness> {
    first_column_difference(lhs, rhs).map(|(i, l, r)| Witness::new(indices, Some(i), l, r))
}

/// Runs `f` over `items` in parallel and keeps witnesses in input order.
fn grid<T: Sync>(name: &str, dim: usize, items: &[T], f: impl Fn(&T) -> Option<Witness> + Sync + Send) -> CheckReport {
    let witnesses: Vec<Witness> = items.par_iter().filter_map(f).collect();
    CheckReport::from_witnesses(name, (items.len() * dim) as u64, witnesses)
}

fn indices_with(support: Interval, extra: &[i64]) -> Vec<i64> {
    let mut ns: Vec<i64> = support.iter().chain(extra.iter().copied()).collect();
    ns.sort_unstable();
    ns.dedup();
    ns
}

/// `(c (x) Id) Delta_n = Id` if `n = -1` and `0` otherwise.
pub fn check_left_counit(v: &VertexCoalgebra) -> CheckReport {
    let ns = indices_with(v.support(), &[-1]);
    let id = Matrix::identity(v.dim());
    let zero = Matrix::zero(v.dim());
    grid("left_counit", v.dim(), &ns, |&n| {
        let expected = if n == -1 { &id } else { &zero };
        map_witness(vec![n], &v.left_counit_image(n), expected)
    })
}

/// `(Id (x) c) Delta_n = 0` for `n >= 0` and `(Id (x) c) Delta_{-1} = Id`.
pub fn check_weak_cocreation(v: &VertexCoalgebra) -> CheckReport {
    let s = v.support();
    let ns = indices_with(Interval::new(s.lo.max(0), s.hi), &[-1]);
    let id = Matrix::identity(v.dim());
    let zero = Matrix::zero(v.dim());
    grid("weak_cocreation", v.dim(), &ns, |&n| {
        let expected = if n == -1 { &id } else { &zero };
        map_witness(vec![n], &v.right_counit_image(n), expected)
    })
}

/// The strong form `exp(x D*) = (Id (x) c) nabla(x)`: the weak clauses plus
/// `D*^i / i! = (Id (x) c) Delta_{-1-i}` for every `i` up to the first index
/// at which the right side is forced to vanish.
pub fn check_cocreation(v: &VertexCoalgebra) -> CheckReport {
    let data = v.dstar_data();
    let s = v.support();
    let top = if s.is_empty() { 1 } else { (-s.lo).max(1) };
    let is: Vec<i64> = (0..=top).collect();
    let divided = grid("divided_powers", v.dim(), &is, |&i| {
        map_witness(vec![i], &data.power_over_factorial(i as u32), &v.right_counit_image(-1 - i))
    });
    CheckReport::group("cocreation", vec![check_weak_cocreation(v), divided])
}

fn compose_left(outer: &LinMap<2>, inner: &LinMap<2>) -> LinMap<3> {
    inner.then_slot_apply(outer, 1).expect("rank-2 slot")
}

fn compose_right(outer: &LinMap<2>, inner: &LinMap<2>) -> LinMap<3> {
    inner.then_slot_apply(outer, 2).expect("rank-2 slot")
}

/// `sum_i binom(p,i) (Delta_i (x) Id) Delta_{p+q-i}` against
/// `(Id (x) Delta_q) Delta_p - (T (x) Id)(Id (x) Delta_p) Delta_q`, evaluated
/// straight from the coproducts.
pub fn cocommutator_sides(v: &VertexCoalgebra, p: i64, q: i64) -> (LinMap<3>, LinMap<3>) {
    let d = v.delta();
    let s = v.support();
    let mut lhs = LinMap::zero(v.dim());
    if !s.is_empty() {
        for i in 0..=s.hi.max(-1) {
            if let (Some(di), Some(dw)) = (d.get(i), d.get(p + q - i)) {
                lhs.add_scaled(&binom_or_zero(p, i), &compose_left(di, dw));
            }
        }
    }
    let mut rhs = LinMap::zero(v.dim());
    if let (Some(dq), Some(dp)) = (d.get(q), d.get(p)) {
        rhs.add_scaled(&Scalar::one(), &compose_right(dq, dp));
    }
    if let (Some(dp), Some(dq)) = (d.get(p), d.get(q)) {
        rhs.add_scaled(&Scalar::from_int(-1), &compose_right(dp, dq).transpose12());
    }
    (lhs, rhs)
}

/// `(Delta_r (x) Id) Delta_q` against
/// `sum_i (-1)^i binom(r,i) [(Id (x) Delta_{q+i}) Delta_{r-i} - (-1)^r (T (x) Id)(Id (x) Delta_i) Delta_{q+r-i}]`.
pub fn coassociator_sides(v: &VertexCoalgebra, q: i64, r: i64) -> (LinMap<3>, LinMap<3>) {
    let d = v.delta();
    let s = v.support();
    let mut lhs = LinMap::zero(v.dim());
    if let (Some(dr), Some(dq)) = (d.get(r), d.get(q)) {
        lhs = compose_left(dr, dq);
    }
    let mut rhs = LinMap::zero(v.dim());
    if !s.is_empty() {
        let top = (s.hi - q).max(s.hi);
        for i in 0..=top.max(-1) {
            let c = &Scalar::sign_pow(i) * &binom_or_zero(r, i);
            if c.is_zero() {
                continue;
            }
            if let (Some(dqi), Some(dri)) = (d.get(q + i), d.get(r - i)) {
                rhs.add_scaled(&c, &compose_right(dqi, dri));
            }
            if let (Some(di), Some(dw)) = (d.get(i), d.get(q + r - i)) {
                let c3 = -(&c * &Scalar::sign_pow(r));
                rhs.add_scaled(&c3, &compose_right(di, dw).transpose12());
            }
        }
    }
    (lhs, rhs)
}

pub fn check_cocommutator(v: &VertexCoalgebra, p: i64, q: i64) -> CheckReport {
    let (l, r) = cocommutator_sides(v, p, q);
    CheckReport::from_witnesses("cocommutator", v.dim() as u64, map_witness(vec![p, q], &l, &r).into_iter().collect())
}

pub fn check_coassociator(v: &VertexCoalgebra, q: i64, r: i64) -> CheckReport {
    let (l, rr) = coassociator_sides(v, q, r);
    CheckReport::from_witnesses("coassociator", v.dim() as u64, map_witness(vec![q, r], &l, &rr).into_iter().collect())
}

/// `T Delta_r` against `sum_{i >= 0} (-1)^{r+1+i} Delta_{r+i} D*^(i)` with
/// `D*^(i) = D*^i / i!`.
pub fn coskew_sides(v: &VertexCoalgebra, data: &DStarData, r: i64) -> (LinMap<2>, LinMap<2>) {
    let d = v.delta();
    let s = v.support();
    let lhs = d.get(r).map_or_else(|| LinMap::zero(v.dim()), |m| m.transpose12());
    let mut rhs = LinMap::zero(v.dim());
    if !s.is_empty() {
        for i in 0.max(s.lo - r)..=(s.hi - r) {
            let Some(m) = d.get(r + i) else { continue };
            let term = m.after(&data.power_over_factorial(i as u32));
            rhs.add_scaled(&Scalar::sign_pow(r + 1 + i), &term);
        }
    }
    (lhs, rhs)
}

pub fn check_coskew(v: &VertexCoalgebra, r: i64) -> CheckReport {
    let data = v.dstar_data();
    let (l, rr) = coskew_sides(v, &data, r);
    CheckReport::from_witnesses("coskew", v.dim() as u64, map_witness(vec![r], &l, &rr).into_iter().collect())
}

/// Every `r` at which either side of co-skew symmetry can be nonzero.
pub fn coskew_range(v: &VertexCoalgebra) -> Interval {
    let s = v.support();
    if s.is_empty() {
        return Interval::EMPTY;
    }
    let reach = v.dstar_data().nilpotency_index.map_or(v.dim() as i64 + 1, i64::from);
    Interval::new(s.lo - reach, s.hi)
}

pub fn check_coskew_all(v: &VertexCoalgebra) -> CheckReport {
    let data = v.dstar_data();
    let rs: Vec<i64> = coskew_range(v).iter().collect();
    grid("coskew", v.dim(), &rs, |&r| {
        let (l, rr) = coskew_sides(v, &data, r);
        map_witness(vec![r], &l, &rr)
    })
}

/// `(D* (x) Id) Delta_q = -q Delta_{q-1}` for all `q`.
pub fn check_dstar_formula(v: &VertexCoalgebra) -> CheckReport {
    let dstar = v.dstar();
    let s = v.support();
    let qs: Vec<i64> = if s.is_empty() { vec![] } else { (s.lo..=s.hi + 1).collect() };
    grid("dstar_formula", v.dim(), &qs, |&q| {
        let lhs = v.delta().get_or_zero(q).then_map_slot(&dstar, 1).expect("slot 1");
        let rhs = v.delta().get_or_zero(q - 1).scale(&Scalar::from_int(-q));
        map_witness(vec![q], &lhs, &rhs)
    })
}

/// `-n Delta_{n-1} = Delta_n D* - (Id (x) D*) Delta_n` for all `n`.
pub fn check_dstar_bracket(v: &VertexCoalgebra) -> CheckReport {
    let dstar = v.dstar();
    let s = v.support();
    let ns: Vec<i64> = if s.is_empty() { vec![] } else { (s.lo..=s.hi + 1).collect() };
    grid("dstar_bracket", v.dim(), &ns, |&n| {
        let dn = v.delta().get_or_zero(n);
        let lhs = v.delta().get_or_zero(n - 1).scale(&Scalar::from_int(-n));
        let mut rhs = dn.after(&dstar);
        rhs.add_scaled(&Scalar::from_int(-1), &dn.then_map_slot(&dstar, 2).expect("slot 2"));
        map_witness(vec![n], &lhs, &rhs)
    })
}

/// The six properties of `D*`. Items (2), (3), (6) and the series form of
/// (4) are compared as polynomial series with exact exponentials; `z` powers
/// are compared up to `max(z_order, -nMin)`.
pub fn check_dstar_properties(v: &VertexCoalgebra, z_order: u32) -> Result<CheckReport> {
    let data = v.dstar_data();
    let nil = data.nilpotency_index.ok_or_else(|| Error::Contract("D* is not nilpotent".into()))?;
    if z_order < nil {
        return Err(Error::Contract(format!("z order {z_order} is below the nilpotency index {nil} of D*")));
    }
    let s = v.support();
    let k = if s.is_empty() { z_order } else { z_order.max(u32::try_from(-s.lo).unwrap_or(0)) };
    let series = dstar_series_items(v, &data, k)?;
    let [item2, item3, item4s, item6] = series;
    let item1 = rename(check_dstar_formula(v), "item1_derivative");
    let item4 = CheckReport::group("item4_coskew", vec![check_coskew_all(v), item4s]);
    let item5 = rename(check_dstar_bracket(v), "item5_bracket");
    Ok(CheckReport::group("dstar_properties", vec![item1, item2, item3, item4, item5, item6]))
}

fn rename(mut r: CheckReport, name: &str) -> CheckReport {
    r.check = name.to_string();
    r
}

/// The four equivalent axiom systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bundle {
    /// Series form: counit, cocreation, truncation, Co-Jacobi.
    A,
    /// Coefficient form: counit, cocreation, truncation, Co-Borcherds.
    B,
    /// Counit, strong cocreation, co-skew symmetry, `D*` formula,
    /// co-commutator formula.
    C,
    /// As `C` with the co-associator formula in place of the co-commutator.
    D,
}

impl Bundle {
    pub const ALL: [Bundle; 4] = [Bundle::A, Bundle::B, Bundle::C, Bundle::D];
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Bundle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Bundle::A),
            "B" | "b" => Ok(Bundle::B),
            "C" | "c" => Ok(Bundle::C),
            "D" | "d" => Ok(Bundle::D),
            _ => Err(Error::Parse(format!("unknown bundle `{s}`"))),
        }
    }
}

/// The effective window of `v`.
pub fn effective_window(v: &VertexCoalgebra) -> EffectiveWindow {
    EffectiveWindow::for_support(v.support())
}

pub fn check_bundle(which: Bundle, v: &VertexCoalgebra) -> CheckReport {
    check_bundle_in(which, v, &LatticeBox::EMPTY)
}

/// Runs a bundle over the effective window enlarged to contain `extra`.
pub fn check_bundle_in(which: Bundle, v: &VertexCoalgebra, extra: &LatticeBox) -> CheckReport {
    let window = effective_window(v);
    let region = window.bounds.hull(extra);
    let truncation = CheckReport::pass("truncation", v.dim() as u64);
    let parts = match which {
        Bundle::A | Bundle::B => {
            let ev = CbEvaluator::new(v);
            let cb = ev.check_points("co_borcherds", &window.live_points(&region));
            let mut parts = vec![check_left_counit(v), check_weak_cocreation(v), truncation, cb];
            if which == Bundle::A {
                parts.push(co_jacobi_series(v, &ev));
            }
            parts
        }
        Bundle::C => {
            let pairs: Vec<(i64, i64)> = pairs_on_planes(&window, region.p, region.q);
            let cc = grid("cocommutator", v.dim(), &pairs, |&(p, q)| {
                let (l, r) = cocommutator_sides(v, p, q);
                map_witness(vec![p, q], &l, &r)
            });
            vec![check_left_counit(v), check_cocreation(v), check_coskew_all(v), check_dstar_formula(v), cc]
        }
        Bundle::D => {
            let pairs: Vec<(i64, i64)> = pairs_on_planes(&window, region.q, region.r);
            let ca = grid("coassociator", v.dim(), &pairs, |&(q, r)| {
                let (l, rr) = coassociator_sides(v, q, r);
                map_witness(vec![q, r], &l, &rr)
            });
            vec![check_left_counit(v), check_cocreation(v), check_coskew_all(v), check_dstar_formula(v), ca]
        }
    };
    CheckReport::group(format!("bundle_{which}"), parts)
}

fn pairs_on_planes(window: &EffectiveWindow, xs: Interval, ys: Interval) -> Vec<(i64, i64)> {
    if xs.is_empty() || ys.is_empty() {
        return vec![];
    }
    xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))).filter(|(x, y)| window.planes.contains(x + y)).collect()
}

/// `check_cb` over every live point of a region.
pub fn check_cb_region(v: &VertexCoalgebra, region: &LatticeBox) -> CheckReport {
    let window = effective_window(v);
    CbEvaluator::new(v).check_points("co_borcherds", &window.live_points(region))
}

/// Convenience for a single triple.
pub fn holds_at(v: &VertexCoalgebra, x: LatticePoint) -> bool {
    CbEvaluator::new(v).holds_at(x)
}
