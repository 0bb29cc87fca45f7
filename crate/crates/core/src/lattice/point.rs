use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

fn parse_int(s: &str, what: &str) -> Result<i64, Error> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad integer `{s}` in {what}")))
}

/// An index triple `(p, q, r)` of the Co-Borcherds identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub p: i64,
    pub q: i64,
    pub r: i64,
}

impl LatticePoint {
    pub const fn new(p: i64, q: i64, r: i64) -> Self {
        LatticePoint { p, q, r }
    }

    pub fn sum(&self) -> i64 {
        self.p + self.q + self.r
    }

    pub fn shift(&self, dp: i64, dq: i64, dr: i64) -> Self {
        LatticePoint::new(self.p + dp, self.q + dq, self.r + dr)
    }

    /// The three points tied together by the recurrence based at `self`:
    /// `(p+1,q,r)`, `(p,q+1,r)`, `(p,q,r+1)`.
    pub fn triangle(&self) -> [LatticePoint; 3] {
        [self.shift(1, 0, 0), self.shift(0, 1, 0), self.shift(0, 0, 1)]
    }

    pub fn as_array(&self) -> [i64; 3] {
        [self.p, self.q, self.r]
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}

impl FromStr for LatticePoint {
    type Err = Error;

    /// Parses the `(p,q,r)` form written by `Display`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected (p,q,r), got `{s}`")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        let [p, q, r] = parts[..] else {
            return Err(Error::Parse(format!("expected three indices, got `{s}`")));
        };
        Ok(LatticePoint::new(parse_int(p, s)?, parse_int(q, s)?, parse_int(r, s)?))
    }
}

/// Inclusive integer interval; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 0, hi: -1 };

    pub const fn new(lo: i64, hi: i64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: i64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo) as u64 + 1
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || (self.contains(other.lo) && self.contains(other.hi))
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        match (self.is_empty(), other.is_empty()) {
            (true, _) => *other,
            (_, true) => *self,
            _ => Interval::new(self.lo.min(other.lo), self.hi.max(other.hi)),
        }
    }

    pub fn with(&self, x: i64) -> Interval {
        self.hull(&Interval::point(x))
    }

    pub fn inflate(&self, by: i64) -> Interval {
        if self.is_empty() {
            *self
        } else {
            Interval::new(self.lo - by, self.hi + by)
        }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[]")
        } else {
            write!(f, "[{},{}]", self.lo, self.hi)
        }
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [lo,hi], got `{s}`")))?;
        if inner.is_empty() {
            return Ok(Interval::EMPTY);
        }
        let (lo, hi) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("expected [lo,hi], got `{s}`")))?;
        Ok(Interval::new(parse_int(lo, s)?, parse_int(hi, s)?))
    }
}

/// A box `P x Q x R` of lattice points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeBox {
    pub p: Interval,
    pub q: Interval,
    pub r: Interval,
}

impl LatticeBox {
    pub const EMPTY: LatticeBox = LatticeBox { p: Interval::EMPTY, q: Interval::EMPTY, r: Interval::EMPTY };

    pub fn new(p: Interval, q: Interval, r: Interval) -> Self {
        LatticeBox { p, q, r }
    }

    /// `[-radius, radius]^3`.
    pub fn cube(radius: i64) -> Self {
        let i = Interval::new(-radius, radius);
        LatticeBox::new(i, i, i)
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty() || self.q.is_empty() || self.r.is_empty()
    }

    pub fn len(&self) -> u64 {
        self.p.len() * self.q.len() * self.r.len()
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        self.p.contains(x.p) && self.q.contains(x.q) && self.r.contains(x.r)
    }

    pub fn contains_box(&self, other: &LatticeBox) -> bool {
        other.is_empty()
            || (self.p.contains_interval(&other.p)
                && self.q.contains_interval(&other.q)
                && self.r.contains_interval(&other.r))
    }

    pub fn hull(&self, other: &LatticeBox) -> LatticeBox {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        LatticeBox::new(self.p.hull(&other.p), self.q.hull(&other.q), self.r.hull(&other.r))
    }

    pub fn inflate(&self, by: i64) -> LatticeBox {
        LatticeBox::new(self.p.inflate(by), self.q.inflate(by), self.r.inflate(by))
    }

    pub fn intersect(&self, other: &LatticeBox) -> LatticeBox {
        let cut = |a: &Interval, b: &Interval| Interval::new(a.lo.max(b.lo), a.hi.min(b.hi));
        LatticeBox::new(cut(&self.p, &other.p), cut(&self.q, &other.q), cut(&self.r, &other.r))
    }

    /// All points in lexicographic `(p, q, r)` order.
    pub fn points(&self) -> Vec<LatticePoint> {
        if self.is_empty() {
            return vec![];
        }
        let mut out = Vec::with_capacity(self.len() as usize);
        for p in self.p.iter() {
            for q in self.q.iter() {
                for r in self.r.iter() {
                    out.push(LatticePoint::new(p, q, r));
                }
            }
        }
        out
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{} q{} r{}", self.p, self.q, self.r)
    }
}

impl FromStr for LatticeBox {
    type Err = Error;

    /// Parses the `p[..] q[..] r[..]` form written by `Display`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let [p, q, r] = parts[..] else {
            return Err(Error::Parse(format!("expected p[..] q[..] r[..], got `{s}`")));
        };
        let axis = |t: &str, name: char| -> Result<Interval, Error> {
            t.strip_prefix(name).ok_or_else(|| Error::Parse(format!("expected axis {name} in `{s}`")))?.parse()
        };
        Ok(LatticeBox::new(axis(p, 'p')?, axis(q, 'q')?, axis(r, 'r')?))
    }
}
