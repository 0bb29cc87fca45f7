use crate::algebra::{binom, binom_or_zero, Scalar};
use crate::error::{Error, Result};

use super::series::{FormalSeries, SignedVar, Span, VarName, Window};

fn distinct(vars: &[&VarName]) -> Result<()> {
    for (i, a) in vars.iter().enumerate() {
        if vars[i + 1..].contains(a) {
            return Err(Error::VariableCollision(a.to_string()));
        }
    }
    Ok(())
}

/// `(+-lead +- tail)^n` expanded in nonnegative powers of `tail`: the
/// coefficient of `lead^{n-k} tail^k` is `binom(n,k) s_lead^{n-k} s_tail^k`.
pub fn expand_binomial(lead: &SignedVar, tail: &SignedVar, n: i64, window: &Window) -> Result<FormalSeries<Scalar>> {
    distinct(&[&lead.var, &tail.var])?;
    let support = if n >= 0 {
        [Span::exact(0, n), Span::exact(0, n)]
    } else {
        [Span::new(None, Some(n)), Span::new(Some(0), None)]
    };
    FormalSeries::from_fn(&[lead.var.clone(), tail.var.clone()], window, &support, |e| {
        let (a, k) = (e[0], e[1]);
        if k < 0 || a + k != n {
            return None;
        }
        Some(&binom_or_zero(n, k) * &(&lead.sign.pow(a) * &tail.sign.pow(k)))
    })
}

/// `delta(x, y) = sum_n x^n y^{-n-1}`.
pub fn delta(x: &VarName, y: &VarName, window: &Window) -> Result<FormalSeries<Scalar>> {
    distinct(&[x, y])?;
    FormalSeries::from_fn(&[x.clone(), y.clone()], window, &[Span::ALL, Span::ALL], |e| {
        (e[0] + e[1] == -1).then(Scalar::one)
    })
}

/// `delta(+-lead +- tail, target) = sum_n (+-lead +- tail)^n target^{-n-1}`,
/// each binomial expanded in nonnegative powers of `tail`. The coefficient
/// of `lead^a tail^b target^c` is `binom(-c-1, b) s_lead^a s_tail^b` when
/// `b >= 0` and `a + b + c = -1`, and zero otherwise.
pub fn delta_shift(
    lead: &SignedVar,
    tail: &SignedVar,
    target: &VarName,
    window: &Window,
) -> Result<FormalSeries<Scalar>> {
    distinct(&[&lead.var, &tail.var, target])?;
    let vars = [lead.var.clone(), tail.var.clone(), target.clone()];
    let support = [Span::ALL, Span::new(Some(0), None), Span::ALL];
    FormalSeries::from_fn(&vars, window, &support, |e| {
        let (a, b, c) = (e[0], e[1], e[2]);
        if b < 0 || a + b + c != -1 {
            return None;
        }
        let k = u32::try_from(b).ok()?;
        Some(&binom(-c - 1, k) * &(&lead.sign.pow(a) * &tail.sign.pow(b)))
    })
}

/// Source of delta series. The self-test is generic over this so that a
/// deliberately broken kernel can be shown to be caught.
pub trait DeltaKernel: Sync {
    fn delta(&self, x: &VarName, y: &VarName, window: &Window) -> Result<FormalSeries<Scalar>>;
    fn delta_shift(
        &self,
        lead: &SignedVar,
        tail: &SignedVar,
        target: &VarName,
        window: &Window,
    ) -> Result<FormalSeries<Scalar>>;
}

/// The kernel built from [`delta`] and [`delta_shift`].
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardDelta;

impl DeltaKernel for StandardDelta {
    fn delta(&self, x: &VarName, y: &VarName, window: &Window) -> Result<FormalSeries<Scalar>> {
        delta(x, y, window)
    }

    fn delta_shift(
        &self,
        lead: &SignedVar,
        tail: &SignedVar,
        target: &VarName,
        window: &Window,
    ) -> Result<FormalSeries<Scalar>> {
        delta_shift(lead, tail, target, window)
    }
}
