use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::point::{LatticeBox, LatticePoint};

/// Where the identity is assumed to hold before propagation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedKind {
    /// The plane `r = r0`.
    PlaneR(i64),
    /// The plane `p = p0`.
    PlaneP(i64),
    Explicit(Vec<LatticePoint>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub kind: SeedKind,
    /// Optional box the seed is cut down to.
    pub bounds: Option<LatticeBox>,
}

impl SeedSet {
    pub fn plane_r(r0: i64) -> Self {
        SeedSet { kind: SeedKind::PlaneR(r0), bounds: None }
    }

    pub fn plane_p(p0: i64) -> Self {
        SeedSet { kind: SeedKind::PlaneP(p0), bounds: None }
    }

    pub fn points(points: Vec<LatticePoint>) -> Self {
        SeedSet { kind: SeedKind::Explicit(points), bounds: None }
    }

    pub fn within(mut self, bounds: LatticeBox) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        if let Some(b) = &self.bounds {
            if !b.contains(x) {
                return false;
            }
        }
        match &self.kind {
            SeedKind::PlaneR(r0) => x.r == *r0,
            SeedKind::PlaneP(p0) => x.p == *p0,
            SeedKind::Explicit(pts) => pts.contains(x),
        }
    }

    /// Seed points inside `region`, in lexicographic order.
    pub fn materialize(&self, region: &LatticeBox) -> Vec<LatticePoint> {
        let region = match &self.bounds {
            Some(b) => region.intersect(b),
            None => *region,
        };
        if region.is_empty() {
            return vec![];
        }
        let mut out: Vec<LatticePoint> = match &self.kind {
            SeedKind::PlaneR(r0) => {
                if !region.r.contains(*r0) {
                    return vec![];
                }
                let mut plane = region;
                plane.r = super::Interval::point(*r0);
                plane.points()
            }
            SeedKind::PlaneP(p0) => {
                if !region.p.contains(*p0) {
                    return vec![];
                }
                let mut plane = region;
                plane.p = super::Interval::point(*p0);
                plane.points()
            }
            SeedKind::Explicit(pts) => pts.iter().copied().filter(|x| region.contains(x)).collect(),
        };
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for SeedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SeedKind::PlaneR(r0) => write!(f, "plane r={r0}")?,
            SeedKind::PlaneP(p0) => write!(f, "plane p={p0}")?,
            SeedKind::Explicit(pts) => {
                write!(f, "points")?;
                for x in pts {
                    write!(f, " {x}")?;
                }
            }
        }
        if let Some(b) = &self.bounds {
            write!(f, " within {b}")?;
        }
        Ok(())
    }
}

impl FromStr for SeedSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, bounds) = match s.split_once(" within ") {
            Some((body, b)) => (body, Some(b.parse()?)),
            None => (s, None),
        };
        let body = body.trim();
        let kind = if let Some(rest) = body.strip_prefix("plane ") {
            let (axis, value) =
                rest.split_once('=').ok_or_else(|| Error::Parse(format!("expected plane r=N or p=N, got `{s}`")))?;
            let value: i64 = value.trim().parse().map_err(|_| Error::Parse(format!("bad plane offset in `{s}`")))?;
            match axis.trim() {
                "r" => SeedKind::PlaneR(value),
                "p" => SeedKind::PlaneP(value),
                other => return Err(Error::Parse(format!("unknown seed plane axis `{other}`"))),
            }
        } else if let Some(rest) = body.strip_prefix("points") {
            let pts = rest.split_whitespace().map(str::parse).collect::<Result<Vec<LatticePoint>>>()?;
            SeedKind::Explicit(pts)
        } else {
            return Err(Error::Parse(format!("unknown seed `{s}`")));
        };
        Ok(SeedSet { kind, bounds })
    }
}
