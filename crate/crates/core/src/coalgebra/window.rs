use crate::lattice::{Interval, LatticeBox, LatticePoint};

/// A finite set of index triples on which the Co-Borcherds identity holding
/// implies it holds on all of `Z^3`, for any coproduct family supported in
/// `support`.
///
/// The three terms are built from compositions `Delta_u Delta_w` with
/// `u + w = p + q + r`, so the difference of the two sides vanishes off the
/// planes `p + q + r = t` with `t` in `[2 nMin, 2 nMax]`. All three terms
/// obey the shift recurrence, so on each such plane the difference is
/// determined by its values on the lines `r = 0` and `p = 0`. Along
/// `r = 0` and away from `[nMin, nMax]` only the first term survives and it
/// is a polynomial in `p`; along `p = 0` the difference is eventually
/// `(-1)^r` times a polynomial in `r` in both directions. Enough
/// consecutive points on each tail pin those polynomials down to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveWindow {
    pub support: Interval,
    /// Planes `p + q + r = t` that can carry a nonzero term.
    pub planes: Interval,
    /// The `r = 0` line segments to check, as ranges of `p`.
    pub r0_lines: Vec<(i64, Interval)>,
    /// The `p = 0` line segments to check, as ranges of `r`.
    pub p0_lines: Vec<(i64, Interval)>,
    /// Bounding box of all of the above together with the origin.
    pub bounds: LatticeBox,
}

impl EffectiveWindow {
    pub fn for_support(support: Interval) -> Self {
        if support.is_empty() {
            return EffectiveWindow {
                support,
                planes: Interval::EMPTY,
                r0_lines: vec![],
                p0_lines: vec![],
                bounds: LatticeBox::EMPTY,
            };
        }
        let Interval { lo: a, hi: b } = support;
        let planes = Interval::new(2 * a, 2 * b);
        let mut r0_lines = Vec::new();
        let mut p0_lines = Vec::new();
        let mut pr = Interval::point(0);
        let mut qr = Interval::EMPTY;
        let mut rr = Interval::point(0);
        for t in planes.iter() {
            let along_p = if b < 0 { Interval::new(a, b) } else { Interval::new(a, 2 * b + 1) };
            let hi_start = (b + 1).max(t - a).max(0);
            let hi_degree = (t - a).max(b).max(0);
            let lo_start = (a - 1).min(t - b - 1);
            let lo_degree = b.max(0);
            let along_r = Interval::new(lo_start - lo_degree, hi_start + hi_degree);
            pr = pr.hull(&along_p);
            rr = rr.hull(&along_r);
            qr = qr.hull(&Interval::new(t - along_p.hi, t - along_p.lo));
            qr = qr.hull(&Interval::new(t - along_r.hi, t - along_r.lo));
            r0_lines.push((t, along_p));
            p0_lines.push((t, along_r));
        }
        EffectiveWindow { support, planes, r0_lines, p0_lines, bounds: LatticeBox::new(pr, qr.with(0), rr) }
    }

    /// Triples of the line segments, in lexicographic order. Checking the
    /// identity on these is complete.
    pub fn line_points(&self) -> Vec<LatticePoint> {
        let mut pts: Vec<LatticePoint> = self
            .r0_lines
            .iter()
            .flat_map(|&(t, ps)| ps.iter().map(move |p| LatticePoint::new(p, t - p, 0)))
            .chain(self.p0_lines.iter().flat_map(|&(t, rs)| rs.iter().map(move |r| LatticePoint::new(0, t - r, r))))
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }

    /// Points of `region` on a plane that can carry a nonzero term, in
    /// lexicographic order. Elsewhere both sides are zero.
    pub fn live_points(&self, region: &LatticeBox) -> Vec<LatticePoint> {
        region.points().into_iter().filter(|x| self.planes.contains(x.sum())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_support_gives_empty_window() {
        let w = EffectiveWindow::for_support(Interval::EMPTY);
        assert!(w.bounds.is_empty());
        assert!(w.line_points().is_empty());
    }

    #[test]
    fn trivial_support_single_plane() {
        let w = EffectiveWindow::for_support(Interval::point(-1));
        assert_eq!(w.planes, Interval::point(-2));
        assert!(w.line_points().iter().all(|x| x.sum() == -2));
        assert!(w.bounds.contains(&LatticePoint::new(0, -1, -1)));
        assert!(w.bounds.contains(&LatticePoint::new(-1, -1, 0)));
    }

    #[test]
    fn lines_lie_inside_bounds() {
        for (a, b) in [(-1, -1), (-2, -1), (-5, -1), (-3, 2), (0, 0), (1, 3)] {
            let w = EffectiveWindow::for_support(Interval::new(a, b));
            assert!(w.line_points().iter().all(|x| w.bounds.contains(x)), "[{a},{b}]");
            assert!(w.bounds.contains(&LatticePoint::new(0, 0, 0)));
        }
    }
}
