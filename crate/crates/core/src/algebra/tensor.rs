use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::Scalar;
use crate::error::{Error, Result};

/// A sparse element of `V^{(x) R}` for a fixed finite basis of `V`.
///
/// Entries are keyed by multi-indices in lexicographic order and zero
/// coefficients are never stored, so derived equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tensor<const R: usize> {
    dim: usize,
    entries: BTreeMap<[usize; R], Scalar>,
}

pub type Vector = Tensor<1>;
pub type Tensor2 = Tensor<2>;
pub type Tensor3 = Tensor<3>;

impl<const R: usize> Tensor<R> {
    pub fn zero(dim: usize) -> Self {
        Tensor { dim, entries: BTreeMap::new() }
    }

    /// The pure tensor `e_{i1} (x) ... (x) e_{iR}`.
    pub fn basis(dim: usize, index: [usize; R]) -> Result<Self> {
        Self::from_entries(dim, [(index, Scalar::one())])
    }

    /// Builds a tensor, summing repeated indices and dropping zeros.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ([usize; R], Scalar)>,
    {
        let mut t = Tensor::zero(dim);
        for (idx, c) in entries {
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::IndexOutOfRange { index: bad, dim });
            }
            t.add_term(idx, &c);
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: &[usize; R]) -> Scalar {
        self.entries.get(index).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize; R], &Scalar)> {
        self.entries.iter()
    }

    /// Adds `c * e_index`, keeping the no-stored-zero invariant. Indices are
    /// trusted; callers validate them.
    pub(crate) fn add_term(&mut self, index: [usize; R], c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(index) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &Self) {
        assert_eq!(self.dim, other.dim, "tensor dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (idx, v) in &other.entries {
            self.add_term(*idx, &(c * v));
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        self.add_scaled(&Scalar::one(), other);
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Tensor::zero(self.dim);
        }
        Tensor { dim: self.dim, entries: self.entries.iter().map(|(k, v)| (*k, c * v)).collect() }
    }

    /// Applies a linear map `V -> V` to every tensor factor in position
    /// `slot` (1-based).
    pub fn map_slot(&self, f: &LinMap<1>, slot: usize) -> Result<Self> {
        check_slot(slot, R)?;
        check_dim(self.dim, f.dim())?;
        let mut out = Tensor::zero(self.dim);
        for (idx, c) in &self.entries {
            let Some(image) = f.column(idx[slot - 1]) else { continue };
            for (j, d) in image.iter() {
                let mut k = *idx;
                k[slot - 1] = j[0];
                out.add_term(k, &(c * d));
            }
        }
        Ok(out)
    }

    /// Swaps the first two tensor factors.
    pub fn transpose12(&self) -> Self {
        if R < 2 {
            return self.clone();
        }
        let mut out = Tensor::zero(self.dim);
        for (idx, c) in &self.entries {
            let mut k = *idx;
            k.swap(0, 1);
            out.entries.insert(k, c.clone());
        }
        out
    }
}

impl<const R: usize> fmt::Display for Tensor<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.entries.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if !c.is_one() {
                write!(f, "{c}*")?;
            }
            let factors: Vec<String> = idx.iter().map(|i| format!("e{i}")).collect();
            write!(f, "{}", factors.join("(x)"))?;
        }
        Ok(())
    }
}

impl<const R: usize> fmt::Debug for Tensor<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor<{R}>[dim {}]({self})", self.dim)
    }
}

impl<const R: usize> Add for &Tensor<R> {
    type Output = Tensor<R>;
    fn add(self, rhs: &Tensor<R>) -> Tensor<R> {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<const R: usize> Sub for &Tensor<R> {
    type Output = Tensor<R>;
    fn sub(self, rhs: &Tensor<R>) -> Tensor<R> {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_int(-1), rhs);
        out
    }
}

impl<const R: usize> Neg for &Tensor<R> {
    type Output = Tensor<R>;
    fn neg(self) -> Tensor<R> {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Vector {
    /// Contracts with a covector given by its coordinates.
    pub fn pair(&self, covector: &Vector) -> Scalar {
        let mut acc = Scalar::zero();
        for (idx, c) in &self.entries {
            let w = covector.get(idx);
            if !w.is_zero() {
                acc += &(c * &w);
            }
        }
        acc
    }
}

impl Tensor2 {
    /// `(c (x) Id)` for slot 1, `(Id (x) c)` for slot 2.
    pub fn contract(&self, covector: &Vector, slot: usize) -> Result<Vector> {
        check_slot(slot, 2)?;
        check_dim(self.dim, covector.dim())?;
        let mut out = Vector::zero(self.dim);
        for (idx, c) in &self.entries {
            let (gone, kept) = if slot == 1 { (idx[0], idx[1]) } else { (idx[1], idx[0]) };
            let w = covector.get(&[gone]);
            if !w.is_zero() {
                out.add_term([kept], &(c * &w));
            }
        }
        Ok(out)
    }
}

impl Tensor3 {
    /// `(c (x) Id (x) Id)` and friends.
    pub fn contract(&self, covector: &Vector, slot: usize) -> Result<Tensor2> {
        check_slot(slot, 3)?;
        check_dim(self.dim, covector.dim())?;
        let mut out = Tensor2::zero(self.dim);
        for (idx, c) in &self.entries {
            let w = covector.get(&[idx[slot - 1]]);
            if w.is_zero() {
                continue;
            }
            let kept = match slot {
                1 => [idx[1], idx[2]],
                2 => [idx[0], idx[2]],
                _ => [idx[0], idx[1]],
            };
            out.add_term(kept, &(c * &w));
        }
        Ok(out)
    }
}

/// Applying a coproduct-like map `f: V -> V (x) V` to one tensor slot,
/// splicing the two new factors in place.
pub trait SlotApply {
    type Output;
    fn slot_apply(&self, f: &LinMap<2>, slot: usize) -> Result<Self::Output>;
}

impl SlotApply for Vector {
    type Output = Tensor2;

    fn slot_apply(&self, f: &LinMap<2>, slot: usize) -> Result<Tensor2> {
        check_slot(slot, 1)?;
        check_dim(self.dim, f.dim())?;
        let mut out = Tensor2::zero(self.dim);
        for (idx, c) in &self.entries {
            if let Some(col) = f.column(idx[0]) {
                out.add_scaled(c, col);
            }
        }
        Ok(out)
    }
}

impl SlotApply for Tensor2 {
    type Output = Tensor3;

    fn slot_apply(&self, f: &LinMap<2>, slot: usize) -> Result<Tensor3> {
        check_slot(slot, 2)?;
        check_dim(self.dim, f.dim())?;
        let mut out = Tensor3::zero(self.dim);
        for (idx, c) in &self.entries {
            let Some(image) = f.column(idx[slot - 1]) else { continue };
            for (pair, d) in image.iter() {
                let k = if slot == 1 { [pair[0], pair[1], idx[1]] } else { [idx[0], pair[0], pair[1]] };
                out.add_term(k, &(c * d));
            }
        }
        Ok(out)
    }
}

fn check_slot(slot: usize, rank: usize) -> Result<()> {
    if slot == 0 || slot > rank {
        Err(Error::InvalidSlot { slot, rank })
    } else {
        Ok(())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// A linear map `V -> V^{(x) R}` stored column by column: `column(i)` is the
/// image of the basis vector `e_i`. Absent columns are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinMap<const R: usize> {
    dim: usize,
    columns: BTreeMap<usize, Tensor<R>>,
}

/// An endomorphism of `V`.
pub type Matrix = LinMap<1>;

impl<const R: usize> LinMap<R> {
    pub fn zero(dim: usize) -> Self {
        LinMap { dim, columns: BTreeMap::new() }
    }

    pub fn from_columns<I>(dim: usize, columns: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Tensor<R>)>,
    {
        let mut m = LinMap::zero(dim);
        for (i, col) in columns {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            check_dim(dim, col.dim())?;
            m.add_to_column(i, &Scalar::one(), &col);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.columns.is_empty()
    }

    /// The image of `e_i`, `None` when it is zero.
    pub fn column(&self, i: usize) -> Option<&Tensor<R>> {
        self.columns.get(&i)
    }

    pub fn column_or_zero(&self, i: usize) -> Tensor<R> {
        self.columns.get(&i).cloned().unwrap_or_else(|| Tensor::zero(self.dim))
    }

    pub fn columns(&self) -> impl Iterator<Item = (usize, &Tensor<R>)> {
        self.columns.iter().map(|(i, c)| (*i, c))
    }

    pub(crate) fn add_to_column(&mut self, i: usize, c: &Scalar, t: &Tensor<R>) {
        if c.is_zero() || t.is_zero() {
            return;
        }
        let dim = self.dim;
        let col = self.columns.entry(i).or_insert_with(|| Tensor::zero(dim));
        col.add_scaled(c, t);
        if col.is_zero() {
            self.columns.remove(&i);
        }
    }

    /// Adds `c` to the coefficient of `index` in the column of `e_i`.
    pub fn add_entry(&mut self, i: usize, index: [usize; R], c: &Scalar) -> Result<()> {
        if let Some(&bad) = std::iter::once(&i).chain(index.iter()).find(|&&k| k >= self.dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim: self.dim });
        }
        let dim = self.dim;
        let col = self.columns.entry(i).or_insert_with(|| Tensor::zero(dim));
        col.add_term(index, c);
        if col.is_zero() {
            self.columns.remove(&i);
        }
        Ok(())
    }

    pub fn apply(&self, v: &Vector) -> Tensor<R> {
        assert_eq!(self.dim, v.dim(), "linear map dimension mismatch");
        let mut out = Tensor::zero(self.dim);
        for (idx, c) in v.iter() {
            if let Some(col) = self.columns.get(&idx[0]) {
                out.add_scaled(c, col);
            }
        }
        out
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &Self) {
        assert_eq!(self.dim, other.dim, "linear map dimension mismatch");
        for (i, col) in &other.columns {
            self.add_to_column(*i, c, col);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = LinMap::zero(self.dim);
        out.add_scaled(c, self);
        out
    }

    /// `self o m`: first `m`, then `self`.
    pub fn after(&self, m: &Matrix) -> Self {
        assert_eq!(self.dim, m.dim(), "linear map dimension mismatch");
        LinMap::from_columns(self.dim, m.columns().map(|(i, col)| (i, self.apply(col))))
            .expect("columns share the map dimension")
    }

    /// Post-composes every column with `t -> t.map_slot(f, slot)`.
    pub fn then_map_slot(&self, f: &Matrix, slot: usize) -> Result<Self> {
        let mut out = LinMap::zero(self.dim);
        for (i, col) in &self.columns {
            out.add_to_column(*i, &Scalar::one(), &col.map_slot(f, slot)?);
        }
        Ok(out)
    }

    pub fn transpose12(&self) -> Self {
        let mut out = LinMap::zero(self.dim);
        for (i, col) in &self.columns {
            out.add_to_column(*i, &Scalar::one(), &col.transpose12());
        }
        out
    }

    /// Enumerates `(column, index, coefficient)` in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &[usize; R], &Scalar)> {
        self.columns.iter().flat_map(|(i, col)| col.iter().map(move |(k, c)| (*i, k, c)))
    }
}

impl<const R: usize> fmt::Display for LinMap<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.columns.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, col)) in self.columns.iter().enumerate() {
            if n > 0 {
                write!(f, "; ")?;
            }
            write!(f, "e{i} -> {col}")?;
        }
        Ok(())
    }
}

impl<const R: usize> fmt::Debug for LinMap<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinMap<{R}>[dim {}]({self})", self.dim)
    }
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let cols = (0..dim).map(|i| (i, Vector::basis(dim, [i]).expect("in range")));
        LinMap::from_columns(dim, cols).expect("in range")
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        self.after(rhs)
    }

    pub fn pow(&self, e: u32) -> Matrix {
        let mut acc = Matrix::identity(self.dim);
        for _ in 0..e {
            acc = self.matmul(&acc);
        }
        acc
    }
}

impl LinMap<2> {
    /// `(f (x) Id) o self` for slot 1, `(Id (x) f) o self` for slot 2.
    pub fn then_slot_apply(&self, f: &LinMap<2>, slot: usize) -> Result<LinMap<3>> {
        let mut out = LinMap::zero(self.dim);
        for (i, col) in &self.columns {
            out.add_to_column(*i, &Scalar::one(), &col.slot_apply(f, slot)?);
        }
        Ok(out)
    }

    /// Contracts every column with a covector in the given slot.
    pub fn then_contract(&self, covector: &Vector, slot: usize) -> Result<Matrix> {
        let mut out = LinMap::zero(self.dim);
        for (i, col) in &self.columns {
            out.add_to_column(*i, &Scalar::one(), &col.contract(covector, slot)?);
        }
        Ok(out)
    }
}
