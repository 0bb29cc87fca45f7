use std::collections::BTreeMap;

use crate::algebra::{check_dim, factorial, LinMap, Matrix, Scalar, Vector};
use crate::error::{Error, Result};
use crate::lattice::Interval;

/// The coefficient coproducts `n -> Delta_n : V -> V (x) V`, finitely
/// supported. Zero maps are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoproductFamily {
    dim: usize,
    maps: BTreeMap<i64, LinMap<2>>,
}

impl CoproductFamily {
    pub fn new(dim: usize) -> Self {
        CoproductFamily { dim, maps: BTreeMap::new() }
    }

    pub fn from_maps<I>(dim: usize, maps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, LinMap<2>)>,
    {
        let mut family = CoproductFamily::new(dim);
        for (n, map) in maps {
            family.add(n, &map)?;
        }
        Ok(family)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `map` to `Delta_n`.
    pub fn add(&mut self, n: i64, map: &LinMap<2>) -> Result<()> {
        check_dim(self.dim, map.dim())?;
        let dim = self.dim;
        let slot = self.maps.entry(n).or_insert_with(|| LinMap::zero(dim));
        slot.add_scaled(&Scalar::one(), map);
        if slot.is_zero() {
            self.maps.remove(&n);
        }
        Ok(())
    }

    /// Adds `c * e_j (x) e_k` to `Delta_n(e_i)`.
    pub fn add_entry(&mut self, n: i64, i: usize, j: usize, k: usize, c: &Scalar) -> Result<()> {
        let dim = self.dim;
        let slot = self.maps.entry(n).or_insert_with(|| LinMap::zero(dim));
        let res = slot.add_entry(i, [j, k], c);
        if slot.is_zero() {
            self.maps.remove(&n);
        }
        res
    }

    /// `Delta_n`, or `None` when it is the zero map.
    pub fn get(&self, n: i64) -> Option<&LinMap<2>> {
        self.maps.get(&n)
    }

    pub fn get_or_zero(&self, n: i64) -> LinMap<2> {
        self.maps.get(&n).cloned().unwrap_or_else(|| LinMap::zero(self.dim))
    }

    /// Nonzero coproducts in increasing order of `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &LinMap<2>)> {
        self.maps.iter().map(|(n, m)| (*n, m))
    }

    /// `[nMin, nMax]`, empty when every coproduct vanishes.
    pub fn support(&self) -> Interval {
        match (self.maps.keys().next(), self.maps.keys().next_back()) {
            (Some(&lo), Some(&hi)) => Interval::new(lo, hi),
            _ => Interval::EMPTY,
        }
    }
}

/// The covacuum functional `c : V -> k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counit {
    covector: Vector,
}

impl Counit {
    pub fn new(values: &[Scalar]) -> Self {
        let entries = values.iter().enumerate().map(|(i, c)| ([i], c.clone()));
        Counit { covector: Vector::from_entries(values.len(), entries).expect("indices in range") }
    }

    pub fn dim(&self) -> usize {
        self.covector.dim()
    }

    pub fn value(&self, i: usize) -> Scalar {
        self.covector.get(&[i])
    }

    pub fn values(&self) -> Vec<Scalar> {
        (0..self.dim()).map(|i| self.value(i)).collect()
    }

    pub fn as_covector(&self) -> &Vector {
        &self.covector
    }
}

/// A finite-dimensional vertex coalgebra candidate `(V, Delta, c)`. Nothing
/// about the axioms is assumed; they are checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCoalgebra {
    name: String,
    delta: CoproductFamily,
    counit: Counit,
}

impl VertexCoalgebra {
    pub fn new(name: impl Into<String>, delta: CoproductFamily, counit: Counit) -> Result<Self> {
        check_dim(delta.dim(), counit.dim())?;
        Ok(VertexCoalgebra { name: name.into(), delta, counit })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.delta.dim()
    }

    pub fn delta(&self) -> &CoproductFamily {
        &self.delta
    }

    pub(crate) fn delta_mut(&mut self) -> &mut CoproductFamily {
        &mut self.delta
    }

    pub fn counit(&self) -> &Counit {
        &self.counit
    }

    pub fn support(&self) -> Interval {
        self.delta.support()
    }

    /// `(Id (x) c) Delta_n`.
    pub fn right_counit_image(&self, n: i64) -> Matrix {
        self.contracted(n, 2)
    }

    /// `(c (x) Id) Delta_n`.
    pub fn left_counit_image(&self, n: i64) -> Matrix {
        self.contracted(n, 1)
    }

    fn contracted(&self, n: i64, slot: usize) -> Matrix {
        match self.delta.get(n) {
            Some(m) => m.then_contract(self.counit.as_covector(), slot).expect("counit has the coalgebra dimension"),
            None => Matrix::zero(self.dim()),
        }
    }

    /// `D* = (Id (x) c) Delta_{-2}`.
    pub fn dstar(&self) -> Matrix {
        self.right_counit_image(-2)
    }

    pub fn dstar_data(&self) -> DStarData {
        DStarData::of(self)
    }
}

/// `D*` together with its divided powers read off the coproducts,
/// `(Id (x) c) Delta_{-1-i}`, and the nilpotency index of `D*` computed from
/// its matrix powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DStarData {
    pub matrix: Matrix,
    /// `divided_powers[i] = (Id (x) c) Delta_{-1-i}` for `i` in
    /// `0..=max(0, -1-nMin)`; every later one is zero by the support bound.
    pub divided_powers: Vec<Matrix>,
    /// Smallest `k` with `D*^k = 0`, if `D*` is nilpotent.
    pub nilpotency_index: Option<u32>,
}

impl DStarData {
    fn of(v: &VertexCoalgebra) -> Self {
        let matrix = v.dstar();
        let support = v.support();
        let top = if support.is_empty() { 0 } else { (-1 - support.lo).max(0) };
        let divided_powers = (0..=top).map(|i| v.right_counit_image(-1 - i)).collect();
        DStarData { nilpotency_index: nilpotency_index(&matrix), matrix, divided_powers }
    }

    /// `D*^i / i!` computed from the matrix.
    pub fn power_over_factorial(&self, i: u32) -> Matrix {
        let f = factorial(i).recip().expect("factorial is nonzero");
        self.matrix.pow(i).scale(&f)
    }

    /// `(Id (x) c) Delta_{-1-i}`, zero past the stored range.
    pub fn divided_power(&self, i: usize) -> Matrix {
        self.divided_powers.get(i).cloned().unwrap_or_else(|| Matrix::zero(self.matrix.dim()))
    }

    /// `(D*^i / i!)` for `i < nilpotency_index`. Errors if `D*` is not
    /// nilpotent, since the exponential would not be a polynomial.
    pub fn exponential_terms(&self) -> Result<Vec<Matrix>> {
        let k = self
            .nilpotency_index
            .ok_or_else(|| Error::Contract("D* is not nilpotent, so exp(z D*) is not a polynomial".into()))?;
        Ok((0..k).map(|i| self.power_over_factorial(i)).collect())
    }
}

/// Smallest `k` with `m^k = 0`; a nilpotent `dim x dim` matrix has `k <= dim`.
pub fn nilpotency_index(m: &Matrix) -> Option<u32> {
    let dim = m.dim();
    let mut power = Matrix::identity(dim);
    for k in 0..=dim as u32 {
        if power.is_zero() {
            return Some(k);
        }
        power = m.matmul(&power);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Tensor2;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn zero_maps_are_dropped_from_the_support() {
        let mut f = CoproductFamily::new(1);
        f.add_entry(-3, 0, 0, 0, &s(2)).unwrap();
        f.add_entry(-1, 0, 0, 0, &s(1)).unwrap();
        assert_eq!(f.support(), Interval::new(-3, -1));
        f.add_entry(-3, 0, 0, 0, &s(-2)).unwrap();
        assert_eq!(f.support(), Interval::point(-1));
        assert!(f.get(-3).is_none());
        assert!(f.add_entry(0, 1, 0, 0, &s(1)).is_err());
        assert_eq!(f.support(), Interval::point(-1));
    }

    #[test]
    fn dimension_checked() {
        let f = CoproductFamily::new(2);
        assert!(VertexCoalgebra::new("x", f, Counit::new(&[s(1)])).is_err());
        let mut g = CoproductFamily::new(2);
        assert!(g.add(-1, &LinMap::zero(3)).is_err());
    }

    #[test]
    fn nilpotency() {
        assert_eq!(nilpotency_index(&Matrix::zero(2)), Some(1));
        assert_eq!(nilpotency_index(&Matrix::zero(0)), Some(0));
        assert_eq!(nilpotency_index(&Matrix::identity(1)), None);
        let shift = Matrix::from_columns(3, [(0, Vector::basis(3, [1]).unwrap()), (1, Vector::basis(3, [2]).unwrap())])
            .unwrap();
        assert_eq!(nilpotency_index(&shift), Some(3));
    }

    #[test]
    fn counit_images() {
        // Delta_{-2} e0 = e1 (x) e0, c = e0*
        let mut f = CoproductFamily::new(2);
        f.add(-2, &LinMap::from_columns(2, [(0, Tensor2::basis(2, [1, 0]).unwrap())]).unwrap()).unwrap();
        let v = VertexCoalgebra::new("t", f, Counit::new(&[s(1), s(0)])).unwrap();
        let d = v.dstar();
        assert_eq!(d.column(0), Some(&Vector::basis(2, [1]).unwrap()));
        assert!(v.left_counit_image(-2).is_zero());
        let data = v.dstar_data();
        assert_eq!(data.nilpotency_index, Some(2));
        assert_eq!(data.divided_powers.len(), 2);
        assert_eq!(data.divided_power(1), d);
        assert!(data.divided_power(5).is_zero());
    }
}
