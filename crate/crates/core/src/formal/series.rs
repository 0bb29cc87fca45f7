use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{binom, LinMap, Scalar, Tensor};
use crate::error::{Error, Result};

/// A formal variable. Series keep their variables sorted by name, which is
/// also the order used when printing monomials.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(String);

impl VarName {
    pub fn new(name: impl Into<String>) -> Self {
        VarName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> Self {
        VarName(s.to_string())
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(+-1)^e`.
    pub fn pow(self, e: i64) -> Scalar {
        match self {
            Sign::Plus => Scalar::one(),
            Sign::Minus => Scalar::sign_pow(e),
        }
    }
}

/// `+v` or `-v`, one summand of a binomial `(+-a +- b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedVar {
    pub sign: Sign,
    pub var: VarName,
}

impl SignedVar {
    pub fn plus(var: impl Into<VarName>) -> Self {
        SignedVar { sign: Sign::Plus, var: var.into() }
    }

    pub fn minus(var: impl Into<VarName>) -> Self {
        SignedVar { sign: Sign::Minus, var: var.into() }
    }
}

/// Per-variable inclusive exponent bounds used to materialize series.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Window {
    bounds: BTreeMap<VarName, (i64, i64)>,
}

impl Window {
    pub fn new() -> Self {
        Window::default()
    }

    pub fn with(mut self, var: impl Into<VarName>, lo: i64, hi: i64) -> Self {
        self.bounds.insert(var.into(), (lo, hi));
        self
    }

    /// `[lo, hi]` in every listed variable.
    pub fn cube<V: Into<VarName> + Clone>(vars: &[V], lo: i64, hi: i64) -> Self {
        vars.iter().cloned().fold(Window::new(), |w, v| w.with(v, lo, hi))
    }

    pub fn get(&self, var: &VarName) -> Result<(i64, i64)> {
        let (lo, hi) = *self.bounds.get(var).ok_or_else(|| Error::Window(format!("no bounds given for `{var}`")))?;
        if lo > hi {
            return Err(Error::Window(format!("empty bounds [{lo}, {hi}] for `{var}`")));
        }
        Ok((lo, hi))
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarName> {
        self.bounds.keys()
    }
}

/// Coefficient types a series may carry.
pub trait Coeff: Clone + PartialEq + fmt::Display {
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scaled(&self, c: &Scalar) -> Self;
}

impl Coeff for Scalar {
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, c: &Scalar) -> Self {
        self * c
    }
}

impl<const R: usize> Coeff for Tensor<R> {
    fn is_zero(&self) -> bool {
        Tensor::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        self.add_assign_ref(other);
    }
    fn scaled(&self, c: &Scalar) -> Self {
        self.scale(c)
    }
}

impl<const R: usize> Coeff for LinMap<R> {
    fn is_zero(&self) -> bool {
        LinMap::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        self.add_scaled(&Scalar::one(), other);
    }
    fn scaled(&self, c: &Scalar) -> Self {
        self.scale(c)
    }
}

/// Inclusive range with optional (infinite) ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Span {
    pub const ALL: Span = Span { lo: None, hi: None };

    pub fn new(lo: Option<i64>, hi: Option<i64>) -> Self {
        Span { lo, hi }
    }

    pub fn exact(lo: i64, hi: i64) -> Self {
        Span { lo: Some(lo), hi: Some(hi) }
    }

    pub fn contains(&self, e: i64) -> bool {
        self.lo.is_none_or(|l| e >= l) && self.hi.is_none_or(|h| e <= h)
    }

    fn contains_span(&self, lo: i64, hi: i64) -> bool {
        lo > hi || (self.contains(lo) && self.contains(hi))
    }

    fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }
}

/// Materialization state along one variable: the window actually stored and
/// the region outside of which every coefficient is known to vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Axis {
    window: (i64, i64),
    support: Span,
}

impl Axis {
    const POINT: Axis = Axis { window: (0, 0), support: Span { lo: Some(0), hi: Some(0) } };

    /// Exponents whose coefficient is determined: the window, extended to
    /// infinity on each side where the window already reaches past the support.
    fn known(&self) -> Span {
        let lo = match self.support.lo {
            Some(s) if self.window.0 <= s => None,
            _ => Some(self.window.0),
        };
        let hi = match self.support.hi {
            Some(s) if self.window.1 >= s => None,
            _ => Some(self.window.1),
        };
        Span { lo, hi }
    }

    fn is_complete(&self) -> bool {
        self.known() == Span::ALL
    }
}

/// Sparse multivariate formal Laurent series, materialized on a window.
///
/// Every stored exponent lies in the window. Coefficients outside the window
/// are either known to vanish (outside the recorded support) or untrusted;
/// operations compute the window on which their output is exact.
#[derive(Clone, PartialEq)]
pub struct FormalSeries<C> {
    vars: Vec<VarName>,
    axes: Vec<Axis>,
    terms: BTreeMap<Vec<i64>, C>,
}

/// A disagreement between two series.
#[derive(Clone, Debug, PartialEq)]
pub struct Difference {
    pub monomial: Vec<(VarName, i64)>,
    pub lhs: String,
    pub rhs: String,
}

impl Difference {
    pub fn exponents(&self) -> Vec<i64> {
        self.monomial.iter().map(|(_, e)| *e).collect()
    }
}

impl<C: Coeff> FormalSeries<C> {
    /// A series with no variables.
    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![], c);
        }
        FormalSeries { vars: vec![], axes: vec![], terms }
    }

    /// A Laurent polynomial, exact everywhere. Exponent vectors follow the
    /// order of `vars`.
    pub fn polynomial<I>(vars: &[VarName], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, C)>,
    {
        let order = sorted_vars(vars)?;
        let mut map: BTreeMap<Vec<i64>, C> = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != vars.len() {
                return Err(Error::Window(format!(
                    "monomial has {} exponents for {} variables",
                    exps.len(),
                    vars.len()
                )));
            }
            let key: Vec<i64> = order.iter().map(|&i| exps[i]).collect();
            accumulate(&mut map, key, c);
        }
        let sorted: Vec<VarName> = order.iter().map(|&i| vars[i].clone()).collect();
        let axes = (0..sorted.len())
            .map(|k| {
                let lo = map.keys().map(|e| e[k]).min().unwrap_or(0);
                let hi = map.keys().map(|e| e[k]).max().unwrap_or(0);
                Axis { window: (lo, hi), support: Span::exact(lo, hi) }
            })
            .collect();
        Ok(FormalSeries { vars: sorted, axes, terms: map })
    }

    /// Materializes `f` over the box `window`, recording `support` (indexed
    /// like `vars`) as the region outside of which `f` vanishes identically.
    pub fn from_fn<F>(vars: &[VarName], window: &Window, support: &[Span], f: F) -> Result<Self>
    where
        F: Fn(&[i64]) -> Option<C>,
    {
        let order = sorted_vars(vars)?;
        let sorted: Vec<VarName> = order.iter().map(|&i| vars[i].clone()).collect();
        let mut axes = Vec::with_capacity(vars.len());
        for &i in &order {
            axes.push(Axis { window: window.get(&vars[i])?, support: support[i] });
        }
        let mut terms = BTreeMap::new();
        let mut caller_order = vec![0i64; vars.len()];
        for key in box_points(&axes.iter().map(|a| a.window).collect::<Vec<_>>()) {
            if !axes.iter().zip(&key).all(|(a, &e)| a.support.contains(e)) {
                continue;
            }
            for (k, &i) in order.iter().enumerate() {
                caller_order[i] = key[k];
            }
            if let Some(c) = f(&caller_order) {
                if !c.is_zero() {
                    terms.insert(key, c);
                }
            }
        }
        Ok(FormalSeries { vars: sorted, axes, terms })
    }

    pub fn vars(&self) -> &[VarName] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &C)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn index_of(&self, var: &VarName) -> Result<usize> {
        self.vars.binary_search(var).map_err(|_| Error::UnknownVariable(var.to_string()))
    }

    /// Stored window of `var`.
    pub fn window(&self, var: &VarName) -> Result<(i64, i64)> {
        Ok(self.axes[self.index_of(var)?].window)
    }

    /// Region of `var` exponents on which coefficients are exact.
    pub fn trusted(&self, var: &VarName) -> Result<Span> {
        Ok(self.axes[self.index_of(var)?].known())
    }

    pub fn support(&self, var: &VarName) -> Result<Span> {
        Ok(self.axes[self.index_of(var)?].support)
    }

    /// Known everywhere, i.e. a Laurent polynomial.
    pub fn is_complete(&self) -> bool {
        self.axes.iter().all(Axis::is_complete)
    }

    /// Coefficient at the monomial `prod var^exp`. Variables not listed
    /// have exponent zero. Fails if the coefficient is not trusted.
    pub fn coeff(&self, monomial: &[(&str, i64)]) -> Result<Option<&C>> {
        let mut key = vec![0i64; self.vars.len()];
        for (name, e) in monomial {
            let v = VarName::from(*name);
            key[self.index_of(&v)?] = *e;
        }
        for (a, (&e, v)) in self.axes.iter().zip(key.iter().zip(&self.vars)) {
            if !a.known().contains(e) {
                return Err(Error::Window(format!("{v}^{e} lies outside the trusted window")));
            }
        }
        Ok(self.terms.get(&key))
    }

    /// Re-expresses the series over a superset of its variables.
    fn widened(&self, vars: &[VarName]) -> Self {
        if vars == self.vars.as_slice() {
            return self.clone();
        }
        let pos: Vec<Option<usize>> = vars.iter().map(|v| self.vars.binary_search(v).ok()).collect();
        let axes = pos.iter().map(|p| p.map_or(Axis::POINT, |i| self.axes[i])).collect();
        let terms =
            self.terms.iter().map(|(k, c)| (pos.iter().map(|p| p.map_or(0, |i| k[i])).collect(), c.clone())).collect();
        FormalSeries { vars: vars.to_vec(), axes, terms }
    }

    fn aligned_with<D: Coeff>(&self, other: &FormalSeries<D>) -> (Self, FormalSeries<D>) {
        let mut vars: Vec<VarName> = self.vars.iter().chain(&other.vars).cloned().collect();
        vars.sort();
        vars.dedup();
        (self.widened(&vars), other.widened(&vars))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FormalSeries<D> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                terms.insert(k.clone(), d);
            }
        }
        FormalSeries { vars: self.vars.clone(), axes: self.axes.clone(), terms }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.map_coeffs(|x| x.scaled(c))
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    /// Sum, exact on the intersection of both trusted regions.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned_with(other);
        let mut axes = Vec::with_capacity(a.axes.len());
        for (k, (x, y)) in a.axes.iter().zip(&b.axes).enumerate() {
            let (kx, ky) = (x.known(), y.known());
            let lo = [kx.lo, ky.lo, Some(x.window.0.min(y.window.0))].into_iter().flatten().max().unwrap();
            let hi = [kx.hi, ky.hi, Some(x.window.1.max(y.window.1))].into_iter().flatten().min().unwrap();
            if lo > hi {
                return Err(Error::Window(format!("sum has no common trusted window in `{}`", a.vars[k])));
            }
            let support = Span {
                lo: x.support.lo.zip(y.support.lo).map(|(p, q)| p.min(q)),
                hi: x.support.hi.zip(y.support.hi).map(|(p, q)| p.max(q)),
            };
            axes.push(Axis { window: (lo, hi), support });
        }
        let mut terms = BTreeMap::new();
        for (key, c) in a.terms.iter().chain(&b.terms) {
            if in_window(&axes, key) {
                accumulate(&mut terms, key.clone(), c.clone());
            }
        }
        Ok(FormalSeries { vars: a.vars, axes, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Bilinear product `sum a_i (x) b_j x^{i+j}` with the coefficient
    /// pairing `f`. The sum defining each output coefficient must be finite,
    /// which requires, per variable, compatible one-sided supports.
    pub fn convolve<B: Coeff, D: Coeff>(
        &self,
        other: &FormalSeries<B>,
        f: impl Fn(&C, &B) -> D,
    ) -> Result<FormalSeries<D>> {
        let (a, b) = self.aligned_with(other);
        let mut axes = Vec::with_capacity(a.axes.len());
        for (k, (x, y)) in a.axes.iter().zip(&b.axes).enumerate() {
            axes.push(product_axis(x, y).map_err(|e| match e {
                Error::Window(m) | Error::IllDefinedProduct(m) => {
                    Error::IllDefinedProduct(format!("{m} in `{}`", a.vars[k]))
                }
                other => other,
            })?);
        }
        let mut terms: BTreeMap<Vec<i64>, D> = BTreeMap::new();
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let key: Vec<i64> = ka.iter().zip(kb).map(|(p, q)| p + q).collect();
                if in_window(&axes, &key) {
                    accumulate(&mut terms, key, f(ca, cb));
                }
            }
        }
        Ok(FormalSeries { vars: a.vars, axes, terms })
    }

    /// Coefficient series of `var^power`.
    pub fn coefficient_of(&self, var: &VarName, power: i64) -> Result<Self> {
        let k = self.index_of(var)?;
        if !self.axes[k].known().contains(power) {
            return Err(Error::Window(format!("{var}^{power} lies outside the trusted window")));
        }
        let mut vars = self.vars.clone();
        vars.remove(k);
        let mut axes = self.axes.clone();
        axes.remove(k);
        let terms = self
            .terms
            .iter()
            .filter(|(key, _)| key[k] == power)
            .map(|(key, c)| {
                let mut key = key.clone();
                key.remove(k);
                (key, c.clone())
            })
            .collect();
        Ok(FormalSeries { vars, axes, terms })
    }

    /// `Res_var`: the coefficient of `var^{-1}`.
    pub fn residue(&self, var: &VarName) -> Result<Self> {
        self.coefficient_of(var, -1)
    }

    /// Substitutes `var = 0`, defined when no negative powers of `var` occur.
    pub fn at_zero(&self, var: &VarName) -> Result<Self> {
        let k = self.index_of(var)?;
        if self.axes[k].support.lo.is_none_or(|l| l < 0) {
            return Err(Error::Contract(format!("`{var}` = 0 needs a series without negative powers of `{var}`")));
        }
        self.coefficient_of(var, 0)
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: &VarName) -> Result<Self> {
        let k = self.index_of(var)?;
        let mut axes = self.axes.clone();
        let a = &mut axes[k];
        a.window = (a.window.0 - 1, a.window.1 - 1);
        a.support = Span { lo: a.support.lo.map(|l| l - 1), hi: a.support.hi.map(|h| h - 1) };
        let mut terms = BTreeMap::new();
        for (key, c) in &self.terms {
            if key[k] != 0 {
                let mut key2 = key.clone();
                key2[k] -= 1;
                accumulate(&mut terms, key2, c.scaled(&Scalar::from_int(key[k])));
            }
        }
        Ok(FormalSeries { vars: self.vars.clone(), axes, terms })
    }

    /// `var -> -var`, i.e. multiply each coefficient by `(-1)^exponent`.
    pub fn negate_var(&self, var: &VarName) -> Result<Self> {
        let k = self.index_of(var)?;
        let mut out = self.clone();
        for (key, c) in out.terms.iter_mut() {
            if key[k].rem_euclid(2) == 1 {
                *c = c.scaled(&Scalar::from_int(-1));
            }
        }
        Ok(out)
    }

    /// `X(.., from, .., to, ..) -> X(.., to, .., to, ..)`. Requires the
    /// series to be a Laurent polynomial in `from`, so that every coefficient
    /// of the result is a finite sum.
    pub fn identify(&self, from: &VarName, to: &VarName) -> Result<Self> {
        if from == to {
            return Err(Error::VariableCollision(from.to_string()));
        }
        let kf = self.index_of(from)?;
        let kt = self.index_of(to)?;
        let af = self.axes[kf];
        let (Some(sl), Some(sh)) = (af.support.lo, af.support.hi) else {
            return Err(Error::Contract(format!("limit {from} -> {to} needs finitely many powers of `{from}`")));
        };
        if !af.is_complete() {
            return Err(Error::Contract(format!("limit {from} -> {to} needs every power of `{from}` materialized")));
        }
        let at = self.axes[kt];
        let known = at.known();
        let cand = (at.window.0 + sl, at.window.1 + sh);
        let lo = known.lo.map_or(cand.0, |l| cand.0.max(l + sh));
        let hi = known.hi.map_or(cand.1, |h| cand.1.min(h + sl));
        if lo > hi {
            return Err(Error::Window(format!("limit {from} -> {to} leaves no trusted window")));
        }
        let mut axes = self.axes.clone();
        axes[kt] = Axis {
            window: (lo, hi),
            support: Span { lo: at.support.lo.map(|l| l + sl), hi: at.support.hi.map(|h| h + sh) },
        };
        axes.remove(kf);
        let mut vars = self.vars.clone();
        vars.remove(kf);
        let mut terms = BTreeMap::new();
        for (key, c) in &self.terms {
            let mut k2 = key.clone();
            k2[kt] += key[kf];
            k2.remove(kf);
            if in_window(&axes, &k2) {
                accumulate(&mut terms, k2, c.clone());
            }
        }
        Ok(FormalSeries { vars, axes, terms })
    }

    /// Taylor shift `f(var) -> f(var + by)`, expanded in nonnegative powers of
    /// `by` up to `by^max_power`.
    pub fn taylor_shift(&self, var: &VarName, by: &VarName, max_power: u32) -> Result<Self> {
        if self.vars.binary_search(by).is_ok() {
            return Err(Error::VariableCollision(by.to_string()));
        }
        let k = self.index_of(var)?;
        let kk = i64::from(max_power);
        let av = self.axes[k];
        let known = av.known();
        let lo = known.lo.map_or(av.window.0 - kk, |l| (av.window.0 - kk).max(l));
        let hi = known.hi.map_or(av.window.1, |h| av.window.1.min(h - kk));
        if lo > hi {
            return Err(Error::Window(format!(
                "shift of `{var}` by `{by}` to order {max_power} leaves no trusted window"
            )));
        }
        let nonneg = av.support.lo.is_some_and(|l| l >= 0);
        let shifted_axis =
            Axis { window: (lo, hi), support: Span { lo: if nonneg { Some(0) } else { None }, hi: av.support.hi } };
        let by_axis =
            Axis { window: (0, kk), support: Span { lo: Some(0), hi: if nonneg { av.support.hi } else { None } } };

        let mut vars = self.vars.clone();
        vars.push(by.clone());
        let mut axes = self.axes.clone();
        axes[k] = shifted_axis;
        axes.push(by_axis);
        let mut terms = BTreeMap::new();
        for (key, c) in &self.terms {
            let a = key[k];
            for j in 0..=max_power {
                let b = binom(a, j);
                if b.is_zero() {
                    // binom(a, j) stays zero for larger j once a >= 0
                    break;
                }
                let mut k2 = key.clone();
                k2[k] = a - i64::from(j);
                k2.push(i64::from(j));
                if in_window(&axes, &k2) {
                    accumulate(&mut terms, k2, c.scaled(&b));
                }
            }
        }
        let unsorted = FormalSeries { vars, axes, terms };
        Ok(unsorted.sorted())
    }

    fn sorted(self) -> Self {
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by(|&i, &j| self.vars[i].cmp(&self.vars[j]));
        if order.iter().enumerate().all(|(k, &i)| k == i) {
            return self;
        }
        let vars = order.iter().map(|&i| self.vars[i].clone()).collect();
        let axes = order.iter().map(|&i| self.axes[i]).collect();
        let terms = self.terms.into_iter().map(|(k, c)| (order.iter().map(|&i| k[i]).collect(), c)).collect();
        FormalSeries { vars, axes, terms }
    }

    /// Region (per aligned variable) on which both series are exact, clipped
    /// to the hull of their windows.
    fn common_region<D: Coeff>(a: &Self, b: &FormalSeries<D>) -> Result<Vec<(i64, i64)>> {
        let mut region = Vec::with_capacity(a.axes.len());
        for (k, (x, y)) in a.axes.iter().zip(&b.axes).enumerate() {
            let (kx, ky) = (x.known(), y.known());
            let lo = [kx.lo, ky.lo, Some(x.window.0.min(y.window.0))].into_iter().flatten().max().unwrap();
            let hi = [kx.hi, ky.hi, Some(x.window.1.max(y.window.1))].into_iter().flatten().min().unwrap();
            if lo > hi {
                return Err(Error::Window(format!("no common trusted window in `{}`", a.vars[k])));
            }
            region.push((lo, hi));
        }
        Ok(region)
    }

    /// First monomial (in lexicographic order) at which the two series
    /// differ, over the region where both are exact. Errors if that region
    /// is empty, so a vacuous comparison never passes silently.
    pub fn first_difference(&self, other: &Self) -> Result<Option<Difference>> {
        let (a, b) = self.aligned_with(other);
        let region = Self::common_region(&a, &b)?;
        Ok(Self::diff_in(&a, &b, &region))
    }

    /// As [`first_difference`](Self::first_difference) but restricted to
    /// `window`, which must lie inside the region where both are exact.
    pub fn first_difference_within(&self, other: &Self, window: &Window) -> Result<Option<Difference>> {
        let (a, b) = self.aligned_with(other);
        let common = Self::common_region(&a, &b)?;
        let mut region = Vec::with_capacity(common.len());
        for (k, v) in a.vars.iter().enumerate() {
            let (lo, hi) = window.get(v)?;
            let (ka, kb) = (a.axes[k].known(), b.axes[k].known());
            if !ka.contains_span(lo, hi) || !kb.contains_span(lo, hi) {
                return Err(Error::Window(format!("requested `{v}` in [{lo}, {hi}] is not fully trusted")));
            }
            region.push((lo, hi));
        }
        Ok(Self::diff_in(&a, &b, &region))
    }

    fn diff_in(a: &Self, b: &Self, region: &[(i64, i64)]) -> Option<Difference> {
        let inside = |k: &Vec<i64>| k.iter().zip(region).all(|(&e, &(lo, hi))| lo <= e && e <= hi);
        let mut keys: Vec<&Vec<i64>> = a.terms.keys().chain(b.terms.keys()).filter(|k| inside(k)).collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            let (x, y) = (a.terms.get(key), b.terms.get(key));
            if x != y {
                let show = |c: Option<&C>| c.map_or_else(|| "0".to_string(), |c| c.to_string());
                return Some(Difference {
                    monomial: a.vars.iter().cloned().zip(key.iter().copied()).collect(),
                    lhs: show(x),
                    rhs: show(y),
                });
            }
        }
        None
    }

    /// Text dump: one `x^a y^b : coeff` line per stored monomial, variables
    /// in declared order, monomials in lexicographic exponent order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (key, c) in &self.terms {
            let mono: Vec<String> = self.vars.iter().zip(key).map(|(v, e)| format!("{v}^{e}")).collect();
            let mono = if mono.is_empty() { "1".to_string() } else { mono.join(" ") };
            out.push_str(&format!("{mono} : {c}\n"));
        }
        out
    }
}

impl FormalSeries<Scalar> {
    /// Ordinary product of scalar series.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.convolve(other, |a, b| a * b)
    }

    /// Multiplies a coefficient series by a scalar series.
    pub fn mul_coeffs<C: Coeff>(&self, other: &FormalSeries<C>) -> Result<FormalSeries<C>> {
        self.convolve(other, |a, c| c.scaled(a))
    }
}

impl<C: Coeff> fmt::Debug for FormalSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalSeries[")?;
        for (v, a) in self.vars.iter().zip(&self.axes) {
            write!(f, " {v} in [{}, {}]", a.window.0, a.window.1)?;
        }
        write!(f, " ]\n{}", self.dump())
    }
}

fn sorted_vars(vars: &[VarName]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..vars.len()).collect();
    order.sort_by(|&i, &j| vars[i].cmp(&vars[j]));
    for w in order.windows(2) {
        if vars[w[0]] == vars[w[1]] {
            return Err(Error::VariableCollision(vars[w[0]].to_string()));
        }
    }
    Ok(order)
}

fn accumulate<C: Coeff>(map: &mut BTreeMap<Vec<i64>, C>, key: Vec<i64>, c: C) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            o.get_mut().add_assign(&c);
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn in_window(axes: &[Axis], key: &[i64]) -> bool {
    axes.iter().zip(key).all(|(a, &e)| a.window.0 <= e && e <= a.window.1)
}

fn box_points(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &(lo, hi) in bounds {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |e| {
                    let mut q = p.clone();
                    q.push(e);
                    q
                })
            })
            .collect();
    }
    out
}

/// Window of a product along one variable: the longest run of output
/// exponents whose defining sum is finite and only involves known
/// coefficients of both factors.
fn product_axis(x: &Axis, y: &Axis) -> Result<Axis> {
    let (sx, sy) = (x.support, y.support);
    let finite = (sx.lo.is_some() && sy.lo.is_some())
        || (sx.hi.is_some() && sy.hi.is_some())
        || sx.is_bounded()
        || sy.is_bounded();
    if !finite {
        return Err(Error::IllDefinedProduct("factors are infinite in opposite directions".into()));
    }
    let (kx, ky) = (x.known(), y.known());
    let trusted = |e: i64| -> bool {
        // e = e1 + e2 with e1 in supp x, e2 in supp y
        let lo1 = match (sx.lo, sy.hi) {
            (Some(a), Some(b)) => Some(a.max(e - b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(e - b),
            (None, None) => None,
        };
        let hi1 = match (sx.hi, sy.lo) {
            (Some(a), Some(b)) => Some(a.min(e - b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(e - b),
            (None, None) => None,
        };
        match (lo1, hi1) {
            (Some(l), Some(h)) => l > h || (kx.contains_span(l, h) && ky.contains_span(e - h, e - l)),
            _ => false,
        }
    };
    let (clo, chi) = (x.window.0 + y.window.0, x.window.1 + y.window.1);
    let mut best: Option<(i64, i64)> = None;
    let mut run: Option<i64> = None;
    for e in clo..=chi + 1 {
        if e <= chi && trusted(e) {
            run.get_or_insert(e);
        } else if let Some(start) = run.take() {
            let len = e - 1 - start;
            if best.is_none_or(|(l, h)| len > h - l) {
                best = Some((start, e - 1));
            }
        }
    }
    let window = best.ok_or_else(|| Error::Window("product leaves no trusted window".into()))?;
    let support = Span { lo: sx.lo.zip(sy.lo).map(|(a, b)| a + b), hi: sx.hi.zip(sy.hi).map(|(a, b)| a + b) };
    Ok(Axis { window, support })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VarName {
        VarName::from(s)
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn poly(vars: &[&str], terms: &[(&[i64], i64)]) -> FormalSeries<Scalar> {
        let vars: Vec<VarName> = vars.iter().map(|x| v(x)).collect();
        FormalSeries::polynomial(&vars, terms.iter().map(|(e, c)| (e.to_vec(), s(*c)))).unwrap()
    }

    #[test]
    fn polynomials_are_complete_and_sorted() {
        let p = poly(&["y", "x"], &[(&[1, 2], 3), (&[0, 0], 1)]);
        assert!(p.is_complete());
        assert_eq!(p.vars(), &[v("x"), v("y")]);
        assert_eq!(p.coeff(&[("x", 2), ("y", 1)]).unwrap(), Some(&s(3)));
        assert_eq!(p.coeff(&[("x", 40)]).unwrap(), None);
    }

    #[test]
    fn duplicate_variables_rejected() {
        let err = FormalSeries::<Scalar>::polynomial(&[v("x"), v("x")], []).unwrap_err();
        assert_eq!(err, Error::VariableCollision("x".into()));
    }

    #[test]
    fn polynomial_product() {
        // (x - y)^2 = x^2 - 2xy + y^2
        let a = poly(&["x", "y"], &[(&[1, 0], 1), (&[0, 1], -1)]);
        let sq = a.mul(&a).unwrap();
        let expected = poly(&["x", "y"], &[(&[2, 0], 1), (&[1, 1], -2), (&[0, 2], 1)]);
        assert_eq!(sq.first_difference(&expected).unwrap(), None);
        assert!(sq.is_complete());
    }

    #[test]
    fn residue_and_derivative() {
        let p = poly(&["x"], &[(&[-1], 1), (&[-2], 3)]);
        let r = p.residue(&v("x")).unwrap();
        assert_eq!(r.first_difference(&FormalSeries::constant(s(1))).unwrap(), None);
        let d = p.derivative(&v("x")).unwrap();
        assert!(d.residue(&v("x")).unwrap().is_empty());
    }

    #[test]
    fn taylor_shift_of_square() {
        let f = poly(&["x"], &[(&[2], 1)]);
        let g = f.taylor_shift(&v("x"), &v("y"), 4).unwrap();
        let expected = poly(&["x", "y"], &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]);
        assert_eq!(g.first_difference(&expected).unwrap(), None);
        // constants are unchanged
        let c = poly(&["x"], &[(&[0], 7)]);
        let shifted = c.taylor_shift(&v("x"), &v("y"), 3).unwrap();
        assert_eq!(shifted.first_difference(&c).unwrap(), None);
    }

    #[test]
    fn taylor_shift_of_inverse_is_alternating() {
        let f = poly(&["x"], &[(&[-1], 1)]);
        let g = f.taylor_shift(&v("x"), &v("y"), 6).unwrap();
        for k in 0..=6i64 {
            let c = g.coeff(&[("x", -1 - k), ("y", k)]).unwrap().cloned().unwrap_or_default();
            assert_eq!(c, Scalar::sign_pow(k), "k = {k}");
        }
        assert!(g.coeff(&[("y", 7), ("x", -8)]).is_err());
    }

    #[test]
    fn taylor_then_zero_recovers_polynomial() {
        let f = poly(&["x", "z"], &[(&[3, 1], 2), (&[-2, 0], -5), (&[0, 4], 1)]);
        let g = f.taylor_shift(&v("x"), &v("y"), 8).unwrap();
        let back = g.at_zero(&v("y")).unwrap();
        assert_eq!(back.first_difference(&f).unwrap(), None);
    }

    #[test]
    fn identify_variables() {
        // X(x, y) = x^2 y - 3 x y^3  ->  X(y, y) = y^3 - 3 y^4
        let x = poly(&["x", "y"], &[(&[2, 1], 1), (&[1, 3], -3)]);
        let lim = x.identify(&v("x"), &v("y")).unwrap();
        let expected = poly(&["y"], &[(&[3], 1), (&[4], -3)]);
        assert_eq!(lim.first_difference(&expected).unwrap(), None);
    }

    #[test]
    fn negate_var_flips_odd_powers() {
        let p = poly(&["y"], &[(&[1], 2), (&[2], 5), (&[-3], 1)]);
        let q = p.negate_var(&v("y")).unwrap();
        let expected = poly(&["y"], &[(&[1], -2), (&[2], 5), (&[-3], -1)]);
        assert_eq!(q.first_difference(&expected).unwrap(), None);
    }

    #[test]
    fn opposite_infinite_factors_are_rejected() {
        let w = Window::new().with("x", -3, 3);
        let up = FormalSeries::from_fn(&[v("x")], &w, &[Span::new(Some(0), None)], |_| Some(s(1))).unwrap();
        let down = FormalSeries::from_fn(&[v("x")], &w, &[Span::new(None, Some(0))], |_| Some(s(1))).unwrap();
        assert!(matches!(up.mul(&down), Err(Error::IllDefinedProduct(_))));
        // same direction is fine: 1/(1-x)^2 coefficients are k+1
        let sq = up.mul(&up).unwrap();
        assert_eq!(sq.window(&v("x")).unwrap().1, 3);
        assert_eq!(sq.coeff(&[("x", -2)]).unwrap(), None);
        assert_eq!(sq.coeff(&[("x", 3)]).unwrap(), Some(&s(4)));
        assert!(sq.coeff(&[("x", 4)]).is_err());
    }

    #[test]
    fn comparison_on_empty_region_is_an_error() {
        let a = FormalSeries::from_fn(&[v("x")], &Window::new().with("x", 0, 2), &[Span::ALL], |_| Some(s(1))).unwrap();
        let b = FormalSeries::from_fn(&[v("x")], &Window::new().with("x", 5, 7), &[Span::ALL], |_| Some(s(1))).unwrap();
        assert!(a.first_difference(&b).is_err());
    }

    #[test]
    fn dump_format() {
        let p = poly(&["y", "x"], &[(&[1, -2], 3), (&[0, 0], -1)]);
        assert_eq!(p.dump(), "x^-2 y^1 : 3\nx^0 y^0 : -1\n");
    }
}
