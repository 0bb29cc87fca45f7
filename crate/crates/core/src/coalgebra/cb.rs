use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{binom_or_zero, LinMap, Scalar};
use crate::lattice::{Interval, LatticePoint};
use crate::report::{CheckReport, Witness};

use super::model::VertexCoalgebra;

/// Which of the three Co-Borcherds terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CbTerm {
    One,
    Two,
    Three,
}

impl CbTerm {
    pub const ALL: [CbTerm; 3] = [CbTerm::One, CbTerm::Two, CbTerm::Three];

    pub fn from_index(j: u8) -> Option<CbTerm> {
        match j {
            1 => Some(CbTerm::One),
            2 => Some(CbTerm::Two),
            3 => Some(CbTerm::Three),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            CbTerm::One => 1,
            CbTerm::Two => 2,
            CbTerm::Three => 3,
        }
    }
}

/// Evaluates Co-Borcherds terms from precomputed double compositions:
/// `(Delta_u (x) Id) Delta_w`, `(Id (x) Delta_u) Delta_w` and
/// `(T (x) Id)(Id (x) Delta_u) Delta_w` for `u, w` in the support.
pub struct CbEvaluator<'a> {
    v: &'a VertexCoalgebra,
    support: Interval,
    left: BTreeMap<(i64, i64), LinMap<3>>,
    right: BTreeMap<(i64, i64), LinMap<3>>,
    twisted: BTreeMap<(i64, i64), LinMap<3>>,
}

impl<'a> CbEvaluator<'a> {
    pub fn new(v: &'a VertexCoalgebra) -> Self {
        let support = v.support();
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        let mut twisted = BTreeMap::new();
        for (w, dw) in v.delta().iter() {
            for (u, du) in v.delta().iter() {
                let l = dw.then_slot_apply(du, 1).expect("slot 1 of a rank-2 map");
                if !l.is_zero() {
                    left.insert((u, w), l);
                }
                let r = dw.then_slot_apply(du, 2).expect("slot 2 of a rank-2 map");
                if !r.is_zero() {
                    twisted.insert((u, w), r.transpose12());
                    right.insert((u, w), r);
                }
            }
        }
        CbEvaluator { v, support, left, right, twisted }
    }

    pub fn coalgebra(&self) -> &VertexCoalgebra {
        self.v
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    /// Nonzero double compositions keyed by `(u, w)`: `(Delta_u (x) Id) Delta_w`
    /// for term 1, `(Id (x) Delta_u) Delta_w` for term 2, and its transpose
    /// for term 3.
    pub fn compositions(&self, j: CbTerm) -> &BTreeMap<(i64, i64), LinMap<3>> {
        match j {
            CbTerm::One => &self.left,
            CbTerm::Two => &self.right,
            CbTerm::Three => &self.twisted,
        }
    }

    /// Range of `i >= 0` with `u0 + i` and `w0 - i` both in the support.
    fn range(&self, u0: i64, w0: i64) -> Interval {
        let Interval { lo: a, hi: b } = self.support;
        if self.support.is_empty() {
            return Interval::EMPTY;
        }
        Interval::new(0.max(a - u0).max(w0 - b), (b - u0).min(w0 - a))
    }

    /// `CB_j(p, q, r)` as an exact map `V -> V (x) V (x) V`.
    pub fn term(&self, j: CbTerm, x: LatticePoint) -> LinMap<3> {
        let LatticePoint { p, q, r } = x;
        let mut out = LinMap::zero(self.v.dim());
        let (table, u0, w0, sign): (_, _, _, fn(i64, i64) -> Scalar) = match j {
            CbTerm::One => (&self.left, r, p + q, |_, _| Scalar::one()),
            CbTerm::Two => (&self.right, q, p + r, |i, _| Scalar::sign_pow(i)),
            CbTerm::Three => (&self.twisted, p, q + r, |i, r| Scalar::sign_pow(i + r)),
        };
        let top = match j {
            CbTerm::One => p,
            CbTerm::Two | CbTerm::Three => r,
        };
        for i in self.range(u0, w0).iter() {
            let Some(m) = table.get(&(u0 + i, w0 - i)) else { continue };
            let c = &binom_or_zero(top, i) * &sign(i, r);
            out.add_scaled(&c, m);
        }
        out
    }

    /// `CB_2 - CB_3`, the right-hand side of the identity.
    pub fn rhs(&self, x: LatticePoint) -> LinMap<3> {
        let mut out = self.term(CbTerm::Two, x);
        out.add_scaled(&Scalar::from_int(-1), &self.term(CbTerm::Three, x));
        out
    }

    /// Compares `CB_1` with `CB_2 - CB_3` at one triple; returns the first
    /// failing basis vector.
    pub fn witness_at(&self, x: LatticePoint) -> Option<Witness> {
        let lhs = self.term(CbTerm::One, x);
        let rhs = self.rhs(x);
        first_column_difference(&lhs, &rhs).map(|(i, l, r)| Witness::new(x.as_array().to_vec(), Some(i), l, r))
    }

    pub fn holds_at(&self, x: LatticePoint) -> bool {
        self.witness_at(x).is_none()
    }

    /// Checks the identity at every listed triple, in parallel. Witnesses
    /// come out in the order of `points`.
    pub fn check_points(&self, name: &str, points: &[LatticePoint]) -> CheckReport {
        let witnesses: Vec<Witness> = points.par_iter().filter_map(|&x| self.witness_at(x)).collect();
        CheckReport::from_witnesses(name, points.len() as u64 * self.v.dim() as u64, witnesses)
    }
}

/// First basis vector on which two maps differ, with both images.
pub fn first_column_difference<const R: usize>(lhs: &LinMap<R>, rhs: &LinMap<R>) -> Option<(usize, String, String)> {
    if lhs == rhs {
        return None;
    }
    let dim = lhs.dim();
    (0..dim)
        .find(|&i| lhs.column(i) != rhs.column(i))
        .map(|i| (i, lhs.column_or_zero(i).to_string(), rhs.column_or_zero(i).to_string()))
}

/// `check_cb(p, q, r)`.
pub fn check_cb(v: &VertexCoalgebra, x: LatticePoint) -> CheckReport {
    CbEvaluator::new(v).check_points("co_borcherds", &[x])
}
