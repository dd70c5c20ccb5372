//! The semi-inner-product induced by a smooth norm.
//!
//! A semi-inner-product is linear in its first argument, strictly positive
//! ([x,x] = ‖x‖² > 0 for x ≠ 0), and satisfies the Schwartz inequality
//! |[x,y]| ≤ ‖x‖·‖y‖. A norm admits exactly one such form precisely when
//! its unit ball is smooth, and then
//!
//!   [x, y] = ‖y‖ · (∇‖·‖(y) · x),
//!
//! i.e. the supporting functional at y, rescaled to pair y with itself to
//! ‖y‖². The form is also homogeneous (not just conjugate-homogeneous) in
//! the second argument over the reals.
//!
//! Each builtin family registers a closed form, and [`sip_eval_gradient`]
//! recomputes the same value through the gradient definition; keeping both
//! routes alive gives every downstream test a built-in oracle.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{spow, NormSpec};
use crate::sampler::Sampler;
use crate::scalar::Real;

fn check_pair<T: Real>(spec: &NormSpec<T>, x: &DVector<T>, y: &DVector<T>) -> Result<()> {
    for v in [x, y] {
        if v.len() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: v.len(),
            });
        }
        if !v.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
    }
    Ok(())
}

/// Evaluates [x, y] by the closed form registered for the family.
///
/// [x, 0] = 0 by convention: the gradient is undefined at the origin and 0
/// is the value forced by homogeneity in the second variable.
pub fn sip_eval<T: Real>(spec: &NormSpec<T>, x: &DVector<T>, y: &DVector<T>) -> Result<T> {
    check_pair(spec, x, y)?;
    Ok(sip_unchecked(spec, x, y))
}

fn sip_unchecked<T: Real>(spec: &NormSpec<T>, x: &DVector<T>, y: &DVector<T>) -> T {
    match spec {
        // ‖y‖^{2-p} Σ x_i sign(y_i)|y_i|^{p-1}, evaluated at y/‖y‖ to keep
        // the powers well-scaled: [x,y] = ‖y‖ Σ x_i sign(ŷ_i)|ŷ_i|^{p-1}.
        NormSpec::Lp { p, .. } => {
            let n = spec.eval(y).expect("checked");
            if n == T::zero() {
                return T::zero();
            }
            let mut acc = T::zero();
            for i in 0..x.len() {
                acc += x[i] * spow(y[i] / n, *p - T::one());
            }
            n * acc
        }
        NormSpec::WeightedLp { p, weights } => {
            let n = spec.eval(y).expect("checked");
            if n == T::zero() {
                return T::zero();
            }
            let mut acc = T::zero();
            for i in 0..x.len() {
                acc += weights[i] * x[i] * spow(weights[i] * y[i] / n, *p - T::one());
            }
            n * acc
        }
        // The bilinear form xᵀQy; already 0 at y = 0.
        NormSpec::Ellipsoid { q } => (q * y).dot(x),
        // The direct sum splits: [x, y] = Σ_j [x_j, y_j]_j.
        NormSpec::DirectSum { parts } => {
            let mut acc = T::zero();
            let mut at = 0;
            for part in parts {
                let xj = DVector::from(x.rows(at, part.dim()).clone_owned());
                let yj = DVector::from(y.rows(at, part.dim()).clone_owned());
                acc += sip_unchecked(part, &xj, &yj);
                at += part.dim();
            }
            acc
        }
    }
}

/// Evaluates [x, y] through the defining gradient route ‖y‖·(∇‖·‖(y)·x).
///
/// Must agree with [`sip_eval`] to rounding; the pair of routes is the
/// crate's own correctness oracle.
pub fn sip_eval_gradient<T: Real>(
    spec: &NormSpec<T>,
    x: &DVector<T>,
    y: &DVector<T>,
) -> Result<T> {
    check_pair(spec, x, y)?;
    let n = spec.eval(y)?;
    if n == T::zero() {
        return Ok(T::zero());
    }
    let g = spec.gradient(y)?;
    Ok(n * g.dot(x))
}

/// Worst observed violation of each semi-inner-product axiom over seeded
/// samples. All violations are relative, so thresholds are scale-free.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport<T> {
    /// |[a·x₁ + b·x₂, y] − a[x₁,y] − b[x₂,y]| / (1 + (|a| + |b|))
    pub linearity: T,
    /// max(0, −[x,x])
    pub positivity: T,
    /// max(0, |[x,y]| − ‖x‖‖y‖) / (1 + ‖x‖‖y‖)
    pub schwartz: T,
    /// |[x, λy] − λ[x,y]| / (1 + |λ|)
    pub second_homogeneity: T,
    /// |[x,x] − ‖x‖²| / (1 + ‖x‖²)
    pub norm_identity: T,
    pub samples: usize,
}

impl<T: Real> AxiomReport<T> {
    /// Largest violation across all five axioms.
    pub fn max_violation(&self) -> T {
        self.linearity
            .max(self.positivity)
            .max(self.schwartz)
            .max(self.second_homogeneity)
            .max(self.norm_identity)
    }
}

/// Exercises the axioms on `sample_count` seeded samples.
pub fn sip_axiom_report<T: Real>(
    spec: &NormSpec<T>,
    sample_count: usize,
    seed: u64,
) -> Result<AxiomReport<T>> {
    if sample_count == 0 {
        return Err(Error::Invalid("sample_count must be at least 1".into()));
    }
    let sampler = Sampler::new(seed, sample_count);
    let mut rng = sampler.rng(2);
    let vectors = sampler.unit_vectors(spec)?;
    let pairs = sampler.unit_pairs(spec, &[])?;

    let mut report = AxiomReport {
        linearity: T::zero(),
        positivity: T::zero(),
        schwartz: T::zero(),
        second_homogeneity: T::zero(),
        norm_identity: T::zero(),
        samples: sample_count,
    };

    use rand::Rng;
    for k in 0..sample_count {
        let (x1, y) = &pairs[k % pairs.len()];
        let x2 = &vectors[(k * 7 + 3) % vectors.len()];
        let a = T::of(rng.random_range(-2.0..2.0));
        let b = T::of(rng.random_range(-2.0..2.0));
        let lambda = T::of(rng.random_range(-3.0..3.0));

        let combo = x1 * a + x2 * b;
        let lin = (sip_eval(spec, &combo, y)?
            - a * sip_eval(spec, x1, y)?
            - b * sip_eval(spec, x2, y)?)
        .abs()
            / (T::one() + a.abs() + b.abs());
        report.linearity = report.linearity.max(lin);

        let xx = sip_eval(spec, x1, x1)?;
        report.positivity = report.positivity.max(-xx);
        let nx = spec.eval(x1)?;
        report.norm_identity = report
            .norm_identity
            .max((xx - nx * nx).abs() / (T::one() + nx * nx));

        let xy = sip_eval(spec, x1, y)?;
        let bound = nx * spec.eval(y)?;
        report.schwartz = report
            .schwartz
            .max((xy.abs() - bound).max(T::zero()) / (T::one() + bound));

        let scaled = y * lambda;
        let hom = (sip_eval(spec, x1, &scaled)? - lambda * xy).abs() / (T::one() + lambda.abs());
        report.second_homogeneity = report.second_homogeneity.max(hom);
    }
    Ok(report)
}
