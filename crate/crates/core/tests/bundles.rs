use std::time::Instant;

use vertexco::coalgebra::{check_bundle, check_cb, check_dstar_properties, Bundle, VertexCoalgebra};
use vertexco::examples::{dualize, dualize_algebra, trivial_coalgebra, Derivation, DifferentialAlgebraSpec};
use vertexco::lattice::LatticePoint;

fn positive_models() -> Vec<VertexCoalgebra> {
    let mut v = vec![trivial_coalgebra()];
    v.extend((1..=5).map(|m| dualize(m).unwrap()));
    v
}

#[test]
fn positive_models_pass_every_bundle() {
    for v in positive_models() {
        for b in Bundle::ALL {
            let t = Instant::now();
            let r = check_bundle(b, &v);
            eprintln!("{} {b}: {} in {:?}", v.name(), r.verdict, t.elapsed());
            assert!(r.passed(), "{} bundle {b}:\n{}", v.name(), r.summary());
        }
    }
}

#[test]
fn dstar_properties_hold_on_positive_models() {
    for v in positive_models() {
        let nil = v.dstar_data().nilpotency_index.unwrap();
        let r = check_dstar_properties(&v, nil.max(1)).unwrap();
        assert!(r.passed(), "{}:\n{}", v.name(), r.summary());
    }
}

#[test]
fn plain_derivative_duals_fail_co_borcherds() {
    let m1 = dualize_algebra(&DifferentialAlgebraSpec { m: 1, derivation: Derivation::Plain }).unwrap();
    assert!(check_bundle(Bundle::A, &m1).passed());
    for m in 2..=5 {
        let spec = DifferentialAlgebraSpec { m, derivation: Derivation::Plain };
        assert!(spec.leibniz_failure().is_some());
        let v = dualize_algebra(&spec).unwrap();
        for b in [Bundle::A, Bundle::B] {
            let r = check_bundle(b, &v);
            assert!(!r.passed(), "m = {m} bundle {b}");
            assert!(!r.find("co_borcherds").unwrap().passed());
        }
        if m == 2 {
            let x = LatticePoint::new(-1, -1, -2);
            let w = check_cb(&v, x);
            assert_eq!(w.witnesses[0].lhs, "e1(x)e1(x)e0");
            assert_eq!(w.witnesses[0].rhs, "0");
        }
    }
}
