use rayon::prelude::*;

use crate::algebra::Scalar;
use crate::coalgebra::{
    check_coassociator, check_cocommutator, first_column_difference, CbEvaluator, CbTerm, VertexCoalgebra,
};
use crate::report::{CheckReport, Witness};

use super::closure::Certificate;
use super::point::{LatticeBox, LatticePoint};
use super::seeds::{SeedKind, SeedSet};

fn recurrence_witness(ev: &CbEvaluator<'_>, j: CbTerm, x: LatticePoint) -> Option<Witness> {
    let [a, b, c] = x.triangle();
    let lhs = ev.term(j, a);
    let mut rhs = ev.term(j, b);
    rhs.add_scaled(&Scalar::one(), &ev.term(j, c));
    first_column_difference(&lhs, &rhs).map(|(i, l, r)| Witness::new(x.as_array().to_vec(), Some(i), l, r))
}

/// `CB_j(p+1,q,r) = CB_j(p,q+1,r) + CB_j(p,q,r+1)` as an exact map equality.
pub fn check_shift_recurrence(j: CbTerm, x: LatticePoint, v: &VertexCoalgebra) -> CheckReport {
    let ev = CbEvaluator::new(v);
    let name = format!("shift_recurrence_{}", j.index());
    CheckReport::from_witnesses(name, v.dim() as u64, recurrence_witness(&ev, j, x).into_iter().collect())
}

/// The recurrence for all three terms at every base point of `region`.
pub fn check_shift_recurrence_region(v: &VertexCoalgebra, region: &LatticeBox) -> CheckReport {
    let ev = CbEvaluator::new(v);
    let points = region.points();
    let parts = CbTerm::ALL
        .into_iter()
        .map(|j| {
            let witnesses: Vec<Witness> = points.par_iter().filter_map(|&x| recurrence_witness(&ev, j, x)).collect();
            CheckReport::from_witnesses(
                format!("shift_recurrence_{}", j.index()),
                (points.len() * v.dim()) as u64,
                witnesses,
            )
        })
        .collect();
    CheckReport::group("shift_recurrence", parts)
}

/// Checks the identity on the seeds inside `region`: the r = 0 plane
/// through the co-commutator formula, the p = 0 plane through the
/// co-associator formula, anything else directly.
pub fn check_seeds(seeds: &[SeedSet], region: &LatticeBox, v: &VertexCoalgebra) -> CheckReport {
    let ev = CbEvaluator::new(v);
    CheckReport::group("seeds", seeds.iter().map(|s| check_seed(&ev, s, region)).collect())
}

fn check_seed(ev: &CbEvaluator<'_>, seed: &SeedSet, region: &LatticeBox) -> CheckReport {
    let v = ev.coalgebra();
    let points = seed.materialize(region);
    let (name, witnesses): (&str, Vec<Witness>) = match seed.kind {
        SeedKind::PlaneR(0) => {
            ("cocommutator", points.par_iter().flat_map_iter(|x| check_cocommutator(v, x.p, x.q).witnesses).collect())
        }
        SeedKind::PlaneP(0) => {
            ("coassociator", points.par_iter().flat_map_iter(|x| check_coassociator(v, x.q, x.r).witnesses).collect())
        }
        _ => ("co_borcherds", points.par_iter().filter_map(|&x| ev.witness_at(x)).collect()),
    };
    CheckReport::from_witnesses(format!("seed {seed} ({name})"), (points.len() * v.dim()) as u64, witnesses)
}

/// Confirms a certificate against `v`: the seeds must hold inside the
/// working region, and then every derived target is evaluated directly.
/// If the seeds fail the targets are not evaluated.
pub fn cross_validate(cert: &Certificate, v: &VertexCoalgebra) -> CheckReport {
    let ev = CbEvaluator::new(v);
    let region = cert.region();
    let seeds = CheckReport::group("seeds", cert.seeds.iter().map(|s| check_seed(&ev, s, &region)).collect());
    if !seeds.passed() {
        let mut invalid = seeds;
        invalid.check = "seeds_invalid".into();
        return CheckReport::group("cross_validate", vec![invalid]);
    }
    let targets = cert.targets();
    let derived = ev.check_points("derived_targets", &targets);
    CheckReport::group("cross_validate", vec![seeds, derived])
}
