//! Auerbach bases by determinant maximization.
//!
//! Over all bases with unit-norm vectors, any maximizer of |det| is an
//! Auerbach basis: the first-order condition forces the cofactor direction
//! of each column to align with the norm gradient there, which makes the
//! coordinate functionals x ↦ [x, v_j] a biorthogonal system of unit
//! functionals. We exploit the converse diagnostic too: the basis quality is
//! reported as max_{i≠j} |[v_i, v_j]|, which vanishes exactly at a critical
//! point.
//!
//! Column updates are solved on the unit sphere of the norm by projected
//! gradient ascent. Each update maximizes a linear functional, so the
//! determinant is nondecreasing throughout and sweeps terminate quickly.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::norms::NormSpec;
use crate::scalar::Real;
use crate::sip::sip_eval;

const MAX_SWEEPS: usize = 64;
const MAX_ASCENT_ITERS: usize = 200;
const CONVERGED_PAIR_RESIDUAL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct AuerbachBasis<T> {
    /// Unit-norm basis vectors, one per column of the maximizing matrix.
    pub vectors: Vec<DVector<T>>,
    /// max_{i≠j} |[v_i, v_j]|; zero at an exact Auerbach system.
    pub pair_residual: T,
    /// Determinant of the found basis (sign-normalized to be positive).
    pub det_value: T,
    pub converged: bool,
}

/// Search for an Auerbach basis of the given norm.
///
/// Restart 0 starts from the normalized standard basis, so coordinate-aligned
/// optima are found deterministically; later restarts start from random
/// orthonormal frames drawn from `seed`. The restart with the largest
/// determinant wins, with ties resolved toward earlier restarts.
pub fn auerbach_search<T: Real>(
    spec: &NormSpec<T>,
    seed: u64,
    restarts: usize,
) -> Result<AuerbachBasis<T>> {
    if restarts == 0 {
        return Err(Error::Invalid("restarts must be at least 1".into()));
    }
    let mut best: Option<AuerbachBasis<T>> = None;
    for r in 0..restarts {
        let init = if r == 0 {
            standard_init(spec)?
        } else {
            random_orthonormal_init(spec, seed, r as u64)?
        };
        let vectors = det_maximize(spec, init)?;
        let det_value = basis_matrix(&vectors).determinant();
        let pair_residual = pair_residual(spec, &vectors)?;
        let candidate = AuerbachBasis {
            vectors,
            pair_residual,
            det_value,
            converged: pair_residual <= T::of(CONVERGED_PAIR_RESIDUAL),
        };
        let better = match &best {
            None => true,
            Some(b) => candidate.det_value > b.det_value,
        };
        if better {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one restart ran"))
}

/// Gram–Schmidt in the inner product ⟨x, y⟩ = xᵀQy.
///
/// For an ellipsoidal norm the Auerbach bases are exactly the Q-orthonormal
/// ones, so running this on a search result must be a no-op; that gives an
/// independent correctness oracle for the optimizer.
pub fn q_gram_orthonormalize<T: Real>(
    q: &DMatrix<T>,
    vectors: &[DVector<T>],
) -> Result<Vec<DVector<T>>> {
    let mut out: Vec<DVector<T>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != q.nrows() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                got: v.len(),
            });
        }
        let mut w = v.clone();
        for u in &out {
            let proj = (q * u).dot(&w);
            w -= u * proj;
        }
        let norm_sq = (q * &w).dot(&w);
        if norm_sq <= T::of(1e-24) * (q * v).dot(v).max(T::one()) {
            return Err(Error::DegenerateBasis);
        }
        out.push(w / norm_sq.sqrt());
    }
    Ok(out)
}

fn standard_init<T: Real>(spec: &NormSpec<T>) -> Result<Vec<DVector<T>>> {
    let n = spec.dim();
    (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = T::one();
            let nn = spec.eval(&e)?;
            Ok(e / nn)
        })
        .collect()
}

fn random_orthonormal_init<T: Real>(
    spec: &NormSpec<T>,
    seed: u64,
    restart: u64,
) -> Result<Vec<DVector<T>>> {
    let n = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(100 + restart);
    let g = DMatrix::from_fn(n, n, |_, _| {
        T::of(<StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
    });
    let qr = g.qr();
    let q = qr.q();
    (0..n)
        .map(|j| {
            let col = DVector::from(q.column(j));
            let nn = spec.eval(&col)?;
            if nn <= T::zero() {
                return Err(Error::Numerical("degenerate random frame".into()));
            }
            Ok(col / nn)
        })
        .collect()
}

fn basis_matrix<T: Real>(vectors: &[DVector<T>]) -> DMatrix<T> {
    let n = vectors.len();
    let mut b = DMatrix::zeros(vectors[0].len(), n);
    for (j, v) in vectors.iter().enumerate() {
        b.set_column(j, v);
    }
    b
}

fn pair_residual<T: Real>(spec: &NormSpec<T>, vectors: &[DVector<T>]) -> Result<T> {
    let mut worst = T::zero();
    for (i, x) in vectors.iter().enumerate() {
        for (j, y) in vectors.iter().enumerate() {
            if i != j {
                worst = worst.max(sip_eval(spec, x, y)?.abs());
            }
        }
    }
    Ok(worst)
}

fn det_maximize<T: Real>(
    spec: &NormSpec<T>,
    mut basis: Vec<DVector<T>>,
) -> Result<Vec<DVector<T>>> {
    let n = basis.len();
    if basis_matrix(&basis).determinant() < T::zero() {
        basis[0] = -basis[0].clone();
    }
    let mut det = basis_matrix(&basis).determinant();
    for _ in 0..MAX_SWEEPS {
        let prev = det;
        for j in 0..n {
            let b = basis_matrix(&basis);
            let det_b = b.determinant();
            let inv = b
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular basis in determinant ascent".into()))?;
            // d det / d column_j is the cofactor column det · (B⁻¹)ᵀ e_j.
            let c = inv.row(j).transpose() * det_b;
            basis[j] = sphere_maximize(spec, &c, basis[j].clone())?;
        }
        det = basis_matrix(&basis).determinant();
        if (det - prev).abs() <= T::of(1e-12) * det.abs().max(T::one()) {
            break;
        }
    }
    Ok(basis)
}

/// Maximize c·v over the unit sphere {N(v) = 1} by projected gradient
/// ascent with a backtracking step. The ascent direction is the component
/// of c tangent to the sphere at v (the gradient of N spans the normal).
fn sphere_maximize<T: Real>(
    spec: &NormSpec<T>,
    c: &DVector<T>,
    mut v: DVector<T>,
) -> Result<DVector<T>> {
    let c_scale = c.norm();
    if c_scale == T::zero() {
        return Ok(v);
    }
    if c.dot(&v) < T::zero() {
        v = -v;
    }
    let mut step = T::one();
    for _ in 0..MAX_ASCENT_ITERS {
        let g = spec.gradient(&v)?;
        let t = c - &g * (c.dot(&g) / g.dot(&g));
        if t.norm() <= T::of(1e-12) * c_scale {
            break;
        }
        let f0 = c.dot(&v);
        let mut eta = step;
        let mut improved = false;
        for _ in 0..60 {
            let cand = &v + &t * eta;
            let nn = spec.eval(&cand)?;
            if nn > T::zero() {
                let cand = cand / nn;
                if c.dot(&cand) > f0 {
                    v = cand;
                    step = eta * T::of(1.5);
                    improved = true;
                    break;
                }
            }
            eta *= T::of(0.5);
        }
        if !improved {
            break;
        }
    }
    Ok(v)
}
