//! Smooth norm families and their gradients.
//!
//! Four families are built in: `lp` (p > 1), `weighted_lp`, `ellipsoid`
//! (x ↦ √(xᵀQx) for SPD Q), and `direct_sum`, which combines part norms
//! Euclidean-style as ‖(x₁,…,x_m)‖ = √(Σ ‖x_j‖_j²). The exponent-2
//! combination is the one whose induced semi-inner-product splits over the
//! parts, which is why no other exponent is offered.
//!
//! p ≤ 1 and the limit cases ℓ₁/ℓ∞ are rejected at construction: every
//! contract downstream assumes a smooth unit sphere, where the supporting
//! functional (realized by the gradient) is unique.

use nalgebra::{DMatrix, DVector};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Declarative description of a smooth norm.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec<T: Real> {
    Lp { p: T, dim: usize },
    WeightedLp { p: T, weights: DVector<T> },
    Ellipsoid { q: DMatrix<T> },
    DirectSum { parts: Vec<NormSpec<T>> },
}

/// sign(t)·|t|^e, the odd power that shows up in every ℓp formula.
pub(crate) fn spow<T: Real>(t: T, e: T) -> T {
    t.signum() * t.abs().powf(e)
}

fn all_finite<T: Real>(x: &DVector<T>) -> bool {
    x.iter().all(|t| t.is_finite())
}

impl<T: Real> NormSpec<T> {
    pub fn lp(p: T, dim: usize) -> Result<Self> {
        if !(p.is_finite() && p > T::one()) {
            return Err(Error::InvalidSpec(
                "lp requires finite p > 1 (smooth unit sphere)".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidSpec("dim must be positive".into()));
        }
        Ok(NormSpec::Lp { p, dim })
    }

    pub fn weighted_lp(p: T, weights: DVector<T>) -> Result<Self> {
        if !(p.is_finite() && p > T::one()) {
            return Err(Error::InvalidSpec(
                "weighted_lp requires finite p > 1 (smooth unit sphere)".into(),
            ));
        }
        if weights.is_empty() {
            return Err(Error::InvalidSpec("weights must be nonempty".into()));
        }
        if !weights.iter().all(|w| w.is_finite() && *w > T::zero()) {
            return Err(Error::InvalidSpec("weights must be positive".into()));
        }
        Ok(NormSpec::WeightedLp { p, weights })
    }

    /// Requires Q symmetric positive-definite; definiteness is checked by a
    /// Cholesky factorization, symmetry entrywise.
    pub fn ellipsoid(q: DMatrix<T>) -> Result<Self> {
        if !q.is_square() || q.is_empty() {
            return Err(Error::InvalidSpec("Q must be square and nonempty".into()));
        }
        if !q.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidSpec("Q must have finite entries".into()));
        }
        let scale = q.amax().max(T::one());
        let asym = (&q - q.transpose()).amax();
        if asym > T::of(1e-12) * scale {
            return Err(Error::InvalidSpec("Q must be symmetric".into()));
        }
        if nalgebra::Cholesky::new(q.clone()).is_none() {
            return Err(Error::InvalidSpec("Q must be positive definite".into()));
        }
        Ok(NormSpec::Ellipsoid { q })
    }

    /// Builds the Euclidean direct sum of the given part norms.
    pub fn direct_sum(parts: Vec<NormSpec<T>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidSpec("direct_sum needs at least one part".into()));
        }
        Ok(NormSpec::DirectSum { parts })
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::Lp { dim, .. } => *dim,
            NormSpec::WeightedLp { weights, .. } => weights.len(),
            NormSpec::Ellipsoid { q } => q.nrows(),
            NormSpec::DirectSum { parts } => parts.iter().map(|s| s.dim()).sum(),
        }
    }

    /// Offsets of each part inside the ambient coordinates (direct sums
    /// only; a single-range slice otherwise).
    pub fn part_ranges(&self) -> Vec<std::ops::Range<usize>> {
        match self {
            NormSpec::DirectSum { parts } => {
                let mut out = Vec::with_capacity(parts.len());
                let mut at = 0;
                for part in parts {
                    out.push(at..at + part.dim());
                    at += part.dim();
                }
                out
            }
            _ => vec![0..self.dim()],
        }
    }

    fn check_input(&self, x: &DVector<T>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !all_finite(x) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(())
    }

    /// Evaluates ‖x‖.
    pub fn eval(&self, x: &DVector<T>) -> Result<T> {
        self.check_input(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &DVector<T>) -> T {
        match self {
            NormSpec::Lp { p, .. } => lp_eval(x.iter().copied(), *p),
            NormSpec::WeightedLp { p, weights } => {
                lp_eval(x.iter().zip(weights.iter()).map(|(t, w)| *t * *w), *p)
            }
            NormSpec::Ellipsoid { q } => {
                let quad = (q * x).dot(x);
                quad.max(T::zero()).sqrt()
            }
            NormSpec::DirectSum { parts } => {
                let mut sum = T::zero();
                let mut at = 0;
                for part in parts {
                    let n = part.eval_unchecked(&DVector::from(x.rows(at, part.dim()).clone_owned()));
                    sum += n * n;
                    at += part.dim();
                }
                sum.sqrt()
            }
        }
    }

    /// Closed-form gradient of ‖·‖ at x ≠ 0.
    ///
    /// Satisfies the Euler identity g·x = ‖x‖ and is the unique supporting
    /// functional of the unit ball at x/‖x‖ (so its dual norm is 1).
    pub fn gradient(&self, x: &DVector<T>) -> Result<DVector<T>> {
        self.check_input(x)?;
        let n = self.eval_unchecked(x);
        if n == T::zero() {
            return Err(Error::ZeroVector);
        }
        // The gradient is homogeneous of degree 0; evaluating at x/‖x‖ keeps
        // intermediate powers well-scaled.
        let u = x / n;
        Ok(self.gradient_on_sphere(&u))
    }

    /// Gradient at a point with ‖u‖ = 1 (not rechecked).
    fn gradient_on_sphere(&self, u: &DVector<T>) -> DVector<T> {
        match self {
            NormSpec::Lp { p, .. } => {
                DVector::from_iterator(u.len(), u.iter().map(|t| spow(*t, *p - T::one())))
            }
            NormSpec::WeightedLp { p, weights } => DVector::from_iterator(
                u.len(),
                u.iter()
                    .zip(weights.iter())
                    .map(|(t, w)| *w * spow(*w * *t, *p - T::one())),
            ),
            NormSpec::Ellipsoid { q } => q * u,
            NormSpec::DirectSum { parts } => {
                let mut g = DVector::zeros(u.len());
                let mut at = 0;
                for part in parts {
                    let block = DVector::from(u.rows(at, part.dim()).clone_owned());
                    let nj = part.eval_unchecked(&block);
                    // ∂‖u‖/∂block = (‖block‖_j / ‖u‖)·∇_j, which extends
                    // continuously by 0 where the block vanishes.
                    if nj > T::zero() {
                        let gj = part.gradient_on_sphere(&(&block / nj));
                        g.rows_mut(at, part.dim()).copy_from(&(gj * nj));
                    }
                    at += part.dim();
                }
                g
            }
        }
    }

    /// Parses the strict JSON spec format:
    ///
    /// ```json
    /// {"type":"lp","p":4.0,"dim":2}
    /// {"type":"weighted_lp","p":3.0,"weights":[1.0,2.0]}
    /// {"type":"ellipsoid","Q":[[1.0,0.0],[0.0,4.0]]}
    /// {"type":"direct_sum","parts":[{...},{...}]}
    /// ```
    ///
    /// Unknown fields are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidSpec(format!("malformed JSON: {e}")))?;
        Self::from_value(&v)
    }

    fn from_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidSpec("spec must be a JSON object".into()))?;
        let family = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidSpec("missing \"type\" field".into()))?;
        let allowed: &[&str] = match family {
            "lp" => &["type", "p", "dim"],
            "weighted_lp" => &["type", "p", "weights"],
            "ellipsoid" => &["type", "Q"],
            "direct_sum" => &["type", "parts"],
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown norm family \"{other}\""
                )))
            }
        };
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::InvalidSpec(format!(
                    "unknown field \"{key}\" for {family} spec"
                )));
            }
        }
        match family {
            "lp" => {
                let p = number_field(obj, "p")?;
                let dim = obj
                    .get("dim")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::InvalidSpec("lp needs a positive integer \"dim\"".into()))?;
                Self::lp(T::of(p), dim as usize)
            }
            "weighted_lp" => {
                let p = number_field(obj, "p")?;
                let raw = obj
                    .get("weights")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidSpec("weighted_lp needs a \"weights\" array".into()))?;
                let weights = number_vector::<T>(raw, "weights")?;
                Self::weighted_lp(T::of(p), weights)
            }
            "ellipsoid" => {
                let rows = obj
                    .get("Q")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidSpec("ellipsoid needs a \"Q\" matrix".into()))?;
                let n = rows.len();
                let mut q = DMatrix::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    let row = row
                        .as_array()
                        .ok_or_else(|| Error::InvalidSpec("Q rows must be arrays".into()))?;
                    if row.len() != n {
                        return Err(Error::InvalidSpec("Q must be square".into()));
                    }
                    for (j, cell) in row.iter().enumerate() {
                        let t = cell
                            .as_f64()
                            .ok_or_else(|| Error::InvalidSpec("Q entries must be numbers".into()))?;
                        q[(i, j)] = T::of(t);
                    }
                }
                Self::ellipsoid(q)
            }
            "direct_sum" => {
                let raw = obj
                    .get("parts")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidSpec("direct_sum needs a \"parts\" array".into()))?;
                let parts = raw
                    .iter()
                    .map(Self::from_value)
                    .collect::<Result<Vec<_>>>()?;
                Self::direct_sum(parts)
            }
            _ => unreachable!(),
        }
    }
}

fn number_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<f64> {
    obj.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::InvalidSpec(format!("missing numeric \"{key}\" field")))
}

fn number_vector<T: Real>(raw: &[Value], what: &str) -> Result<DVector<T>> {
    let mut out = Vec::with_capacity(raw.len());
    for cell in raw {
        let t = cell
            .as_f64()
            .ok_or_else(|| Error::InvalidSpec(format!("{what} entries must be numbers")))?;
        out.push(T::of(t));
    }
    Ok(DVector::from_vec(out))
}

/// (Σ |t_i|^p)^{1/p}, scaled by the sup norm first so large inputs cannot
/// overflow intermediate powers.
fn lp_eval<T: Real>(terms: impl Iterator<Item = T> + Clone, p: T) -> T {
    let m = terms
        .clone()
        .fold(T::zero(), |acc, t| acc.max(t.abs()));
    if m == T::zero() {
        return T::zero();
    }
    let sum = terms.fold(T::zero(), |acc, t| acc + (t.abs() / m).powf(p));
    m * sum.powf(T::one() / p)
}

/// Central-difference gradient of an arbitrary scalar function, with a
/// smoothness probe: at each coordinate the forward and backward one-sided
/// slopes must agree, otherwise the point sits on a kink and the result
/// would be meaningless.
///
/// Step h = ε^{1/3}·max(1, ‖x‖_∞), the usual optimum for second-order
/// differences.
pub fn numeric_gradient<T, F>(f: F, x: &DVector<T>) -> Result<DVector<T>>
where
    T: Real,
    F: Fn(&DVector<T>) -> Result<T>,
{
    let eps = T::default_epsilon();
    let h = eps.powf(T::of(1.0 / 3.0)) * x.amax().max(T::one());
    let probe_tol = T::of(1e-3);
    let f0 = f(x)?;
    let mut g = DVector::zeros(x.len());
    let mut shifted = x.clone();
    for i in 0..x.len() {
        shifted[i] = x[i] + h;
        let fp = f(&shifted)?;
        shifted[i] = x[i] - h;
        let fm = f(&shifted)?;
        shifted[i] = x[i];
        let central = (fp - fm) / (h + h);
        let forward = (fp - f0) / h;
        let backward = (f0 - fm) / h;
        if (forward - backward).abs() > probe_tol * (T::one() + central.abs()) {
            return Err(Error::NotSmooth(format!(
                "coordinate {i}: one-sided slopes {:.6e} vs {:.6e}",
                forward.to_f64_lossy(),
                backward.to_f64_lossy()
            )));
        }
        g[i] = central;
    }
    Ok(g)
}
