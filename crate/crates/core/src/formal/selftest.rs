use crate::algebra::{binom, Scalar};
use crate::error::Result;
use crate::report::{CheckReport, Witness};

use super::delta::{DeltaKernel, StandardDelta};
use super::series::{Difference, FormalSeries, SignedVar, VarName, Window};

type Sample = (i64, i64, Scalar);

/// Polynomials `X(x, y)` used for the residue-limit checks, as
/// `(x exponent, y exponent, coefficient)` triples.
fn battery() -> Vec<(&'static str, Vec<Sample>)> {
    let s = Scalar::from_int;
    vec![
        ("1", vec![(0, 0, s(1))]),
        ("x", vec![(1, 0, s(1))]),
        ("x - y", vec![(1, 0, s(1)), (0, 1, s(-1))]),
        ("x^2 y - 3 x y^3 + 2", vec![(2, 1, s(1)), (1, 3, s(-3)), (0, 0, s(2))]),
        ("x^-2 y + 5 x y^-1 - 1/2", vec![(-2, 1, s(1)), (1, -1, s(5)), (0, 0, Scalar::new(-1, 2).unwrap())]),
        ("(x - y)^3", vec![(3, 0, s(1)), (2, 1, s(-3)), (1, 2, s(3)), (0, 3, s(-1))]),
    ]
}

fn var(s: &str) -> VarName {
    VarName::from(s)
}

/// Checks the delta identities coefficient by coefficient with all
/// exponents in `[-order, order]`.
pub fn delta_selftest(order: u32) -> Result<CheckReport> {
    delta_selftest_with(order, &StandardDelta)
}

pub fn delta_selftest_with(order: u32, kernel: &dyn DeltaKernel) -> Result<CheckReport> {
    let n = i64::from(order.max(1));
    let (x, y, z) = (var("x"), var("y"), var("z"));
    let cube2 = Window::cube(&["x", "y"], -n, n);
    let cube3 = Window::cube(&["x", "y", "z"], -n, n);
    let one = FormalSeries::constant(Scalar::one());

    let mut parts = Vec::new();

    let dxy = kernel.delta(&x, &y, &cube2)?;
    let res_xy = dxy.residue(&y)?;
    let res_yx = kernel.delta(&y, &x, &cube2)?.residue(&y)?;
    parts.push(CheckReport::group(
        "property_a",
        vec![
            compare("res_y delta(x,y) = 1", &res_xy, &one, None)?,
            compare("res_y delta(y,x) = 1", &res_yx, &one, None)?,
        ],
    ));

    let x_minus_y_z = kernel.delta_shift(&SignedVar::plus("x"), &SignedVar::minus("y"), &z, &cube3)?;
    let z_plus_y_x = kernel.delta_shift(&SignedVar::plus("z"), &SignedVar::plus("y"), &x, &cube3)?;
    parts.push(compare("property_b", &x_minus_y_z, &z_plus_y_x, None)?);

    let minus_y_x_z = kernel.delta_shift(&SignedVar::minus("y"), &SignedVar::plus("x"), &z, &cube3)?;
    let x_minus_z_y = kernel.delta_shift(&SignedVar::plus("x"), &SignedVar::minus("z"), &y, &cube3)?;
    parts.push(compare("property_c", &x_minus_y_z.sub(&minus_y_x_z)?, &x_minus_z_y, None)?);

    let mut limit_parts = Vec::new();
    for (label, terms) in battery() {
        let poly =
            FormalSeries::polynomial(&[x.clone(), y.clone()], terms.into_iter().map(|(i, j, c)| (vec![i, j], c)))?;
        let extent = poly.terms().flat_map(|(e, _)| e.iter().map(|k| k.abs())).max().unwrap_or(0);
        let wide = Window::cube(&["x", "y"], -n - 2 * extent, n + 2 * extent);
        let d = kernel.delta(&x, &y, &wide)?;
        let limit = poly.identify(&x, &y)?;
        let lhs = d.mul(&poly)?;
        let rhs = d.mul(&limit)?;
        limit_parts.push(compare(&format!("delta X(x,y) = delta X(y,y) for X = {label}"), &lhs, &rhs, Some(&cube2))?);
        let res = lhs.residue(&x)?;
        let inner = Window::cube(&["y"], -n, n);
        limit_parts.push(compare(&format!("res_x delta X(x,y) = X(y,y) for X = {label}"), &res, &limit, Some(&inner))?);
    }
    parts.push(CheckReport::group("residue_limit", limit_parts));

    Ok(CheckReport::group("delta_selftest", parts))
}

fn compare(
    name: &str,
    lhs: &FormalSeries<Scalar>,
    rhs: &FormalSeries<Scalar>,
    within: Option<&Window>,
) -> Result<CheckReport> {
    let diff = match within {
        Some(w) => lhs.first_difference_within(rhs, w)?,
        None => lhs.first_difference(rhs)?,
    };
    let evaluated = lhs.len().max(rhs.len()) as u64;
    Ok(match diff {
        None => CheckReport::pass(name, evaluated),
        Some(d) => CheckReport::from_witnesses(name, evaluated, vec![witness(&d)]),
    })
}

fn witness(d: &Difference) -> Witness {
    let mono: Vec<String> = d.monomial.iter().map(|(v, e)| format!("{v}^{e}")).collect();
    Witness::new(
        d.exponents(),
        None,
        format!("{} : {}", mono.join(" "), d.lhs),
        format!("{} : {}", mono.join(" "), d.rhs),
    )
}

/// The three Pascal-type identities behind the shift recurrence, for
/// `|n| <= n_max` and `0 <= k <= k_max`:
/// `binom(n,k+1) + binom(n,k) = binom(n+1,k+1)`,
/// `-binom(n,k-1) + binom(n+1,k) = binom(n,k)` and
/// `binom(n,k) - binom(n+1,k) = -binom(n,k-1)`, the last two for `k >= 1`.
pub fn binomial_selftest(n_max: i64, k_max: u32) -> CheckReport {
    let mut parts: [(&str, u64, Vec<Witness>); 3] =
        [("pascal_sum", 0, vec![]), ("pascal_lower", 0, vec![]), ("pascal_difference", 0, vec![])];
    let mut record = |slot: usize, n: i64, k: u32, lhs: Scalar, rhs: Scalar| {
        parts[slot].1 += 1;
        if lhs != rhs {
            parts[slot].2.push(Witness::new(vec![n, i64::from(k)], None, lhs, rhs));
        }
    };
    for n in -n_max..=n_max {
        for k in 0..=k_max {
            record(0, n, k, &binom(n, k + 1) + &binom(n, k), binom(n + 1, k + 1));
            if k >= 1 {
                record(1, n, k, &-binom(n, k - 1) + &binom(n + 1, k), binom(n, k));
                record(2, n, k, &binom(n, k) - &binom(n + 1, k), -binom(n, k - 1));
            }
        }
    }
    CheckReport::group(
        "binomial_selftest",
        parts.into_iter().map(|(name, count, w)| CheckReport::from_witnesses(name, count, w)).collect(),
    )
}
