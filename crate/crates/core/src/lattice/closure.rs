use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{CheckReport, Witness};

use super::point::{LatticeBox, LatticePoint};
use super::seeds::SeedSet;

/// Which vertex of a recurrence triangle a step derives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// `(p+1, q, r)` from the other two.
    P,
    /// `(p, q+1, r)` from the other two.
    Q,
    /// `(p, q, r+1)` from the other two.
    R,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [Orientation::P, Orientation::Q, Orientation::R];

    fn slot(self) -> usize {
        match self {
            Orientation::P => 0,
            Orientation::Q => 1,
            Orientation::R => 2,
        }
    }

    fn base_of(self, target: LatticePoint) -> LatticePoint {
        match self {
            Orientation::P => target.shift(-1, 0, 0),
            Orientation::Q => target.shift(0, -1, 0),
            Orientation::R => target.shift(0, 0, -1),
        }
    }
}

/// One application of the two-of-three rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub target: LatticePoint,
    pub premises: [LatticePoint; 2],
    pub orientation: Orientation,
}

impl Step {
    fn from_base(base: LatticePoint, orientation: Orientation) -> Step {
        let tri = base.triangle();
        let k = orientation.slot();
        let others: Vec<LatticePoint> = (0..3).filter(|&i| i != k).map(|i| tri[i]).collect();
        Step { target: tri[k], premises: [others[0], others[1]], orientation }
    }

    /// Recovers the orientation from the three points, if they form a
    /// recurrence triangle with `target` as one vertex.
    pub fn infer(target: LatticePoint, a: LatticePoint, b: LatticePoint) -> Option<Step> {
        Orientation::ALL
            .into_iter()
            .map(|o| Step::from_base(o.base_of(target), o))
            .find(|s| (s.premises[0] == a && s.premises[1] == b) || (s.premises[0] == b && s.premises[1] == a))
            .map(|s| Step { premises: [a, b], ..s })
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {} + {}", self.target, self.premises[0], self.premises[1])
    }
}

/// A replayable derivation of every point of `target` from the seeds,
/// working inside `target` inflated by `margin`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub seeds: Vec<SeedSet>,
    pub target: LatticeBox,
    pub margin: u32,
    pub steps: Vec<Step>,
}

/// Points of the target box the closure did not reach.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub seeds: Vec<SeedSet>,
    pub target: LatticeBox,
    pub margin: u32,
    pub covered: u64,
    pub uncovered: Vec<LatticePoint>,
}

impl fmt::Display for GapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of {} points of {} uncovered at margin {}",
            self.uncovered.len(),
            self.target.len(),
            self.target,
            self.margin
        )?;
        for x in self.uncovered.iter().take(8) {
            write!(f, " {x}")?;
        }
        if self.uncovered.len() > 8 {
            write!(f, " ...")?;
        }
        Ok(())
    }
}

/// Dense membership grid over a box.
struct Grid {
    region: LatticeBox,
    cells: Vec<bool>,
}

impl Grid {
    fn new(region: LatticeBox) -> Self {
        Grid { region, cells: vec![false; region.len() as usize] }
    }

    fn index(&self, x: &LatticePoint) -> Option<usize> {
        if !self.region.contains(x) {
            return None;
        }
        let b = &self.region;
        let i = ((x.p - b.p.lo) as u64 * b.q.len() + (x.q - b.q.lo) as u64) * b.r.len() + (x.r - b.r.lo) as u64;
        Some(i as usize)
    }

    fn get(&self, x: &LatticePoint) -> bool {
        self.index(x).is_some_and(|i| self.cells[i])
    }

    fn set(&mut self, x: &LatticePoint) {
        if let Some(i) = self.index(x) {
            self.cells[i] = true;
        }
    }

    /// Whether the whole triangle based at `base` lies in the region.
    fn holds_triangle(&self, base: &LatticePoint) -> bool {
        let b = &self.region;
        b.p.lo <= base.p
            && base.p < b.p.hi
            && b.q.lo <= base.q
            && base.q < b.q.hi
            && b.r.lo <= base.r
            && base.r < b.r.hi
    }
}

fn worklist_key(x: &LatticePoint) -> (i64, i64, i64) {
    (x.r, x.p, x.q)
}

struct Closure {
    seeds: Grid,
    known: Grid,
    steps: Vec<Step>,
}

fn close(seeds: &[SeedSet], region: LatticeBox) -> Closure {
    let mut seed_grid = Grid::new(region);
    let mut known = Grid::new(region);
    let mut queue: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
    let enqueue = |known: &Grid, queue: &mut BTreeSet<(i64, i64, i64)>, y: &LatticePoint| {
        for o in Orientation::ALL {
            let base = o.base_of(*y);
            if known.holds_triangle(&base) {
                queue.insert(worklist_key(&base));
            }
        }
    };
    for s in seeds {
        for y in s.materialize(&region) {
            seed_grid.set(&y);
            known.set(&y);
        }
    }
    for y in region.points() {
        if known.get(&y) {
            enqueue(&known, &mut queue, &y);
        }
    }
    let mut steps = Vec::new();
    while let Some((r, p, q)) = queue.pop_first() {
        let base = LatticePoint::new(p, q, r);
        let tri = base.triangle();
        let flags = tri.map(|x| known.get(&x));
        if flags.iter().filter(|&&f| f).count() != 2 {
            continue;
        }
        let k = flags.iter().position(|&f| !f).expect("one unknown vertex");
        let step = Step::from_base(base, Orientation::ALL[k]);
        known.set(&step.target);
        enqueue(&known, &mut queue, &step.target);
        steps.push(step);
    }
    Closure { seeds: seed_grid, known, steps }
}

/// Every point of `region` reachable from the seeds by the two-of-three
/// rule using only triangles inside `region`, in lexicographic order.
pub fn closure_of(seeds: &[SeedSet], region: &LatticeBox) -> Vec<LatticePoint> {
    let c = close(seeds, *region);
    region.points().into_iter().filter(|x| c.known.get(x)).collect()
}

/// Closes the seeds under the two-of-three rule inside `target` inflated by
/// `margin`. On success the certificate keeps only the steps the target box
/// depends on.
pub fn propagate(seeds: &[SeedSet], target: &LatticeBox, margin: u32) -> std::result::Result<Certificate, GapReport> {
    let region = target.inflate(i64::from(margin));
    let c = close(seeds, region);
    let target_points = target.points();
    let uncovered: Vec<LatticePoint> = target_points.iter().copied().filter(|x| !c.known.get(x)).collect();
    if !uncovered.is_empty() {
        return Err(GapReport {
            seeds: seeds.to_vec(),
            target: *target,
            margin,
            covered: target.len() - uncovered.len() as u64,
            uncovered,
        });
    }
    let mut needed = Grid::new(region);
    for x in &target_points {
        if !c.seeds.get(x) {
            needed.set(x);
        }
    }
    let mut kept = Vec::new();
    for step in c.steps.iter().rev() {
        if !needed.get(&step.target) {
            continue;
        }
        for x in &step.premises {
            if !c.seeds.get(x) {
                needed.set(x);
            }
        }
        kept.push(*step);
    }
    kept.reverse();
    Ok(Certificate { seeds: seeds.to_vec(), target: *target, margin, steps: kept })
}

/// Smallest margin in `0..=max_margin` at which the seeds cover `target`.
/// Coverage is monotone in the margin, so this bisects.
pub fn minimal_margin(seeds: &[SeedSet], target: &LatticeBox, max_margin: u32) -> Option<Certificate> {
    let mut best = propagate(seeds, target, max_margin).ok()?;
    let (mut lo, mut hi) = (0u32, max_margin);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match propagate(seeds, target, mid) {
            Ok(cert) => {
                best = cert;
                hi = mid;
            }
            Err(_) => lo = mid + 1,
        }
    }
    Some(best)
}

const HEADER: &str = "vertexco certificate 1";

impl Certificate {
    /// Working region: the target inflated by the margin.
    pub fn region(&self) -> LatticeBox {
        self.target.inflate(i64::from(self.margin))
    }

    pub fn targets(&self) -> Vec<LatticePoint> {
        self.steps.iter().map(|s| s.target).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{HEADER}").unwrap();
        for s in &self.seeds {
            writeln!(out, "seed: {s}").unwrap();
        }
        writeln!(out, "box: {}", self.target).unwrap();
        writeln!(out, "margin: {}", self.margin).unwrap();
        writeln!(out, "steps: {}", self.steps.len()).unwrap();
        for s in &self.steps {
            writeln!(out, "{s}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Certificate> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
        let bad = |line: usize, msg: String| Error::Parse(format!("line {line}: {msg}"));
        match lines.next() {
            Some((_, HEADER)) => {}
            Some((n, l)) => return Err(bad(n, format!("expected `{HEADER}`, got `{l}`"))),
            None => return Err(Error::Parse("empty certificate".into())),
        }
        let mut seeds = Vec::new();
        let mut target = None;
        let mut margin = None;
        let mut count = None;
        for (n, line) in lines.by_ref() {
            let (key, value) =
                line.split_once(": ").ok_or_else(|| bad(n, format!("expected `key: value`, got `{line}`")))?;
            match key {
                "seed" => seeds.push(value.parse().map_err(|e| bad(n, format!("{e}")))?),
                "box" => target = Some(value.parse().map_err(|e| bad(n, format!("{e}")))?),
                "margin" => margin = Some(value.parse::<u32>().map_err(|_| bad(n, format!("bad margin `{value}`")))?),
                "steps" => {
                    count = Some(value.parse::<usize>().map_err(|_| bad(n, format!("bad step count `{value}`")))?);
                    break;
                }
                other => return Err(bad(n, format!("unknown header field `{other}`"))),
            }
        }
        let target = target.ok_or_else(|| Error::Parse("missing `box`".into()))?;
        let margin = margin.ok_or_else(|| Error::Parse("missing `margin`".into()))?;
        let count = count.ok_or_else(|| Error::Parse("missing `steps`".into()))?;
        let mut steps = Vec::with_capacity(count);
        for (n, line) in lines {
            let (lhs, rhs) = line.split_once(" <= ").ok_or_else(|| bad(n, format!("expected a step, got `{line}`")))?;
            let (a, b) = rhs.split_once(" + ").ok_or_else(|| bad(n, format!("expected two premises, got `{line}`")))?;
            let parse = |s: &str| s.parse::<LatticePoint>().map_err(|e| bad(n, format!("{e}")));
            let (t, a, b) = (parse(lhs)?, parse(a)?, parse(b)?);
            let step = Step::infer(t, a, b).ok_or_else(|| bad(n, format!("`{line}` is not a recurrence triangle")))?;
            steps.push(step);
        }
        if steps.len() != count {
            return Err(Error::Parse(format!("declared {count} steps, found {}", steps.len())));
        }
        Ok(Certificate { seeds, target, margin, steps })
    }

    /// Replays the steps: every premise must be a seed or an earlier
    /// target, every step a recurrence triangle inside the working region,
    /// and the target box must end up covered.
    pub fn verify(&self) -> CheckReport {
        let region = self.region();
        let mut known = Grid::new(region);
        for s in &self.seeds {
            for y in s.materialize(&region) {
                known.set(&y);
            }
        }
        let fail = |indices: &LatticePoint, lhs: String, rhs: &str| {
            CheckReport::fail("certificate_structure", Witness::new(indices.as_array().to_vec(), None, lhs, rhs))
        };
        for (i, step) in self.steps.iter().enumerate() {
            if Step::infer(step.target, step.premises[0], step.premises[1]) != Some(*step) {
                return fail(&step.target, format!("step {i}: {step}"), "not a recurrence triangle");
            }
            if !region.contains(&step.target) {
                return fail(&step.target, format!("step {i}: {step}"), "outside the working region");
            }
            if let Some(x) = step.premises.iter().find(|x| !known.get(x)) {
                return fail(x, format!("step {i}: {step}"), "premise not yet available");
            }
            known.set(&step.target);
        }
        if let Some(x) = self.target.points().into_iter().find(|x| !known.get(x)) {
            return fail(&x, format!("{x}"), "target point not derived");
        }
        CheckReport::pass("certificate_structure", self.steps.len() as u64)
    }
}
