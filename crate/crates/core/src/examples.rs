//! Example coalgebras and a mutation harness for negative testing.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{factorial, Scalar};
use crate::coalgebra::{CoproductFamily, Counit, VertexCoalgebra};
use crate::error::{Error, Result};

/// `Delta_{-1}(e0) = e0 (x) e0`, `c(e0) = 1`, on a line.
pub fn trivial_coalgebra() -> VertexCoalgebra {
    let mut delta = CoproductFamily::new(1);
    delta.add_entry(-1, 0, 0, 0, &Scalar::one()).expect("in range");
    VertexCoalgebra::new("trivial", delta, Counit::new(&[Scalar::one()])).expect("dimensions agree")
}

/// Derivations of `k[t]/(t^m)` available to [`dualize_algebra`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derivation {
    /// `d/dt`. Not a derivation of the quotient once `m >= 2`, since it does
    /// not preserve `t^m = 0`; the dual then violates Co-Borcherds.
    Plain,
    /// `t^2 d/dt`, a nilpotent derivation of the quotient for every `m`.
    Raising,
}

/// The commutative algebra `k[t]/(t^m)` with a derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialAlgebraSpec {
    pub m: usize,
    pub derivation: Derivation,
}

impl DifferentialAlgebraSpec {
    pub fn new(m: usize) -> Self {
        DifferentialAlgebraSpec { m, derivation: Derivation::Raising }
    }

    fn apply(&self, a: &Truncated) -> Truncated {
        match self.derivation {
            Derivation::Plain => a.derivative(),
            Derivation::Raising => a.derivative().mul(&Truncated::monomial_or_zero(self.m, 2)),
        }
    }

    /// First pair `(j, l)` of basis monomials on which the Leibniz rule
    /// fails, if any.
    pub fn leibniz_failure(&self) -> Option<(usize, usize)> {
        let basis: Vec<Truncated> = (0..self.m).map(|j| Truncated::monomial(self.m, j)).collect();
        for (j, a) in basis.iter().enumerate() {
            for (l, b) in basis.iter().enumerate() {
                let lhs = self.apply(&a.mul(b));
                let rhs = self.apply(a).mul(b).add(&a.mul(&self.apply(b)));
                if lhs != rhs {
                    return Some((j, l));
                }
            }
        }
        None
    }
}

/// An element of `k[t]/(t^m)` as its coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Truncated(Vec<Scalar>);

impl Truncated {
    fn monomial(m: usize, j: usize) -> Self {
        Self::monomial_or_zero(m, j)
    }

    fn monomial_or_zero(m: usize, j: usize) -> Self {
        let mut c = vec![Scalar::zero(); m];
        if j < m {
            c[j] = Scalar::one();
        }
        Truncated(c)
    }

    fn derivative(&self) -> Self {
        let m = self.0.len();
        let mut c = vec![Scalar::zero(); m];
        for j in 1..m {
            c[j - 1] = &self.0[j] * &Scalar::from_int(j as i64);
        }
        Truncated(c)
    }

    fn mul(&self, other: &Self) -> Self {
        let m = self.0.len();
        let mut c = vec![Scalar::zero(); m];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate().take(m - i) {
                c[i + j] += &(a * b);
            }
        }
        Truncated(c)
    }

    fn add(&self, other: &Self) -> Self {
        Truncated(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn scale(&self, s: &Scalar) -> Self {
        Truncated(self.0.iter().map(|c| c * s).collect())
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }
}

/// The mode `a_(n) b` of `Y(a, x) b = (exp(x D) a) b`: `D^k a / k! * b`
/// with `k = -1 - n`, zero for `n >= 0`.
fn mode(spec: &DifferentialAlgebraSpec, a: &Truncated, n: i64, b: &Truncated) -> Truncated {
    let m = a.0.len();
    if n >= 0 {
        return Truncated(vec![Scalar::zero(); m]);
    }
    let k = (-1 - n) as u32;
    let mut d = a.clone();
    for _ in 0..k {
        d = spec.apply(&d);
    }
    let f = factorial(k).recip().expect("nonzero");
    d.scale(&f).mul(b)
}

/// The dual of the vertex algebra `Y(a, x) b = (exp(x D) a) b` on
/// `k[t]/(t^m)`, in the dual basis `f_0..f_{m-1}` of `1, t, .., t^{m-1}`.
///
/// Every coefficient is computed from the pairing
/// `<Delta_n f_s, t^j (x) t^l> = <f_s, (t^j)_(n) t^l>` by evaluating the
/// mode on the truncated algebra. The counit is `<f_s, 1>`.
pub fn dualize_algebra(spec: &DifferentialAlgebraSpec) -> Result<VertexCoalgebra> {
    let m = spec.m;
    if m == 0 {
        return Err(Error::Contract("dualize needs m >= 1".into()));
    }
    let basis: Vec<Truncated> = (0..m).map(|j| Truncated::monomial(m, j)).collect();
    let mut delta = CoproductFamily::new(m);
    // D is nilpotent of order at most m on a space of dimension m
    for n in -(m as i64) - 1..=0 {
        for (j, a) in basis.iter().enumerate() {
            for (l, b) in basis.iter().enumerate() {
                let prod = mode(spec, a, n, b);
                if prod.is_zero() {
                    continue;
                }
                for (s, c) in prod.0.iter().enumerate() {
                    delta.add_entry(n, s, j, l, c)?;
                }
            }
        }
    }
    let counit: Vec<Scalar> = basis[0].0.clone();
    let name = match spec.derivation {
        Derivation::Raising => format!("dual-differential m={m}"),
        Derivation::Plain => format!("dual-plain-derivative m={m}"),
    };
    VertexCoalgebra::new(name, delta, Counit::new(&counit))
}

/// `dualize_algebra` for `k[t]/(t^m)` with the derivation `t^2 d/dt`.
pub fn dualize(m: usize) -> Result<VertexCoalgebra> {
    dualize_algebra(&DifferentialAlgebraSpec::new(m))
}

/// A single-coefficient perturbation: add `perturbation * e_j (x) e_k` to
/// `Delta_n(e_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationSpec {
    pub n: i64,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub perturbation: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl fmt::Display for MutationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Delta_{}(e{}) += {}*e{}(x)e{}", self.n, self.i, self.perturbation, self.j, self.k)
    }
}

pub fn mutate(v: &VertexCoalgebra, spec: &MutationSpec) -> Result<VertexCoalgebra> {
    if spec.perturbation.is_zero() {
        return Err(Error::Contract("mutation perturbation must be nonzero".into()));
    }
    let mut out = v.clone().with_name(format!("{} [{spec}]", v.name()));
    out.delta_mut().add_entry(spec.n, spec.i, spec.j, spec.k, &spec.perturbation)?;
    Ok(out)
}

const PERTURBATIONS: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];

/// A random single-coefficient mutation of `v`, deterministic in `seed`.
/// The index `n` ranges over the support widened by one on each side.
pub fn random_mutation(v: &VertexCoalgebra, seed: u64) -> Result<MutationSpec> {
    let dim = v.dim();
    if dim == 0 {
        return Err(Error::Contract("cannot mutate a zero-dimensional coalgebra".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = v.support();
    let (lo, hi) = if s.is_empty() { (-2, 0) } else { (s.lo - 1, s.hi + 1) };
    let &(num, den) = PERTURBATIONS.choose(&mut rng).expect("nonempty");
    Ok(MutationSpec {
        n: rng.gen_range(lo..=hi),
        i: rng.gen_range(0..dim),
        j: rng.gen_range(0..dim),
        k: rng.gen_range(0..dim),
        perturbation: Scalar::new(num, den)?,
        seed: Some(seed),
    })
}

/// `count` random mutations with seeds derived from `seed`.
pub fn random_mutations(v: &VertexCoalgebra, seed: u64, count: usize) -> Result<Vec<MutationSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_mutation(v, rng.gen())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::binom_or_zero;
    use crate::coalgebra::{parse_coalgebra, write_coalgebra};

    #[test]
    fn trivial_matches_dualize_one() {
        let t = trivial_coalgebra();
        let d = dualize(1).unwrap();
        assert_eq!(d.delta(), t.delta());
        assert_eq!(d.counit(), t.counit());
        assert!(dualize(0).is_err());
    }

    #[test]
    fn plain_derivative_m2_by_hand() {
        let spec = DifferentialAlgebraSpec { m: 2, derivation: Derivation::Plain };
        let v = dualize_algebra(&spec).unwrap();
        let text = write_coalgebra(&v);
        let expected = "{\n  \"name\": \"dual-plain-derivative m=2\",\n  \"dimension\": 2,\n  \"counit\": [\"1\", \"0\"],\n  \"coproducts\": [\n    {\"n\": -2, \"entries\": [[0, 1, 0, \"1\"], [1, 1, 1, \"1\"]]},\n    {\"n\": -1, \"entries\": [[0, 0, 0, \"1\"], [1, 0, 1, \"1\"], [1, 1, 0, \"1\"]]}\n  ]\n}\n";
        assert_eq!(text, expected);
        assert_eq!(parse_coalgebra(&text).unwrap(), v);
        assert_eq!(spec.leibniz_failure(), Some((1, 1)));
        assert_eq!(DifferentialAlgebraSpec { m: 1, derivation: Derivation::Plain }.leibniz_failure(), None);
    }

    #[test]
    fn raising_derivation_obeys_leibniz() {
        for m in 1..=8 {
            assert_eq!(DifferentialAlgebraSpec::new(m).leibniz_failure(), None, "m = {m}");
        }
    }

    #[test]
    fn m3_by_hand() {
        // D t = t^2, so Delta_{-2} f_2 = f_1 (x) f_0 and D* f_2 = f_1
        let v = dualize(3).unwrap();
        let d2 = v.delta().get(-2).unwrap();
        assert_eq!(d2.to_string(), "e2 -> e1(x)e0");
        assert!(v.delta().get(-3).is_none());
        assert_eq!(v.dstar().to_string(), "e2 -> e1");
        assert_eq!(v.support(), crate::lattice::Interval::new(-2, -1));
        let d4 = dualize(4).unwrap();
        assert_eq!(d4.support(), crate::lattice::Interval::new(-3, -1));
    }

    // Closed forms, with k = -1 - n: for d/dt, D^k t^j / k! = binom(j, k) t^(j-k);
    // for t^2 d/dt, D^k t^j / k! = binom(j+k-1, k) t^(j+k).
    #[test]
    fn pairing_matches_closed_formula() {
        for m in 1..=6usize {
            let v = dualize(m).unwrap();
            let mut expected = CoproductFamily::new(m);
            for n in -(m as i64) - 2..=2 {
                let k = -1 - n;
                for j in 0..m as i64 {
                    for l in 0..m as i64 {
                        let s = j + k + l;
                        if (0..m as i64).contains(&s) {
                            let c = binom_or_zero(j + k - 1, k);
                            expected.add_entry(n, s as usize, j as usize, l as usize, &c).unwrap();
                        }
                    }
                }
            }
            assert_eq!(v.delta(), &expected, "m = {m}");
            assert!(v.support().lo >= -(m as i64) && v.support().hi <= -1);
        }
    }

    #[test]
    fn plain_pairing_matches_closed_formula() {
        for m in 1..=6usize {
            let v = dualize_algebra(&DifferentialAlgebraSpec { m, derivation: Derivation::Plain }).unwrap();
            let mut expected = CoproductFamily::new(m);
            for n in -(m as i64) - 2..=2 {
                for j in 0..m {
                    for l in 0..m {
                        let s = j as i64 + l as i64 + n + 1;
                        if (0..m as i64).contains(&s) {
                            let c = binom_or_zero(j as i64, j as i64 + n + 1);
                            expected.add_entry(n, s as usize, j, l, &c).unwrap();
                        }
                    }
                }
            }
            assert_eq!(v.delta(), &expected, "m = {m}");
            assert!(v.support().lo >= -(m as i64) && v.support().hi <= -1);
        }
    }

    #[test]
    fn mutation_changes_one_coefficient() {
        let v = dualize(3).unwrap();
        for spec in random_mutations(&v, 7, 50).unwrap() {
            let w = mutate(&v, &spec).unwrap();
            let before = v.delta().get_or_zero(spec.n).column_or_zero(spec.i).get(&[spec.j, spec.k]);
            let after = w.delta().get_or_zero(spec.n).column_or_zero(spec.i).get(&[spec.j, spec.k]);
            assert_eq!(&after - &before, spec.perturbation);
            let mut diff = w.delta().get_or_zero(spec.n);
            diff.add_scaled(&Scalar::from_int(-1), &v.delta().get_or_zero(spec.n));
            assert_eq!(diff.entries().count(), 1);
            for n in v.support().hull(&w.support()).iter().filter(|&n| n != spec.n) {
                assert_eq!(v.delta().get(n), w.delta().get(n));
            }
        }
    }

    #[test]
    fn mutation_rejects_zero_and_out_of_range() {
        let v = dualize(2).unwrap();
        let mut spec = MutationSpec { n: -1, i: 0, j: 0, k: 0, perturbation: Scalar::zero(), seed: None };
        assert!(mutate(&v, &spec).is_err());
        spec.perturbation = Scalar::one();
        spec.k = 2;
        assert!(mutate(&v, &spec).is_err());
    }

    #[test]
    fn random_mutations_are_deterministic() {
        let v = dualize(3).unwrap();
        assert_eq!(random_mutations(&v, 1, 20).unwrap(), random_mutations(&v, 1, 20).unwrap());
        assert_ne!(random_mutations(&v, 1, 20).unwrap(), random_mutations(&v, 2, 20).unwrap());
    }
}
