//! Eigen-analysis of real operators.
//!
//! Eigenvalues are clustered two ways: first by signed value (to extract
//! eigenspaces), then by absolute value into groups λ₁ > λ₂ > … > λ_k ≥ 0.
//! Group i carries the eigenspace E_i for +λ_i, E_{−i} for −λ_i (either may
//! be empty), and their span Ē_i. A diagonalizable operator decomposes
//! every vector uniquely as x = Σ x_i with x_i ∈ Ē_i; `component_of`
//! returns those pieces.
//!
//! The eigensolver is the dense Schur/SVD stack underneath nalgebra, but
//! its output is never trusted: every basis vector is validated against
//! ‖Av ∓ λv‖_∞ ≤ 1e−8·‖A‖_∞ and the assembled eigenbasis must be
//! well-conditioned, otherwise the operator is reported non-diagonalizable.

use nalgebra::{DMatrix, DVector};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_EIGEN_ITERS: usize = 20_000;
const BASIS_CONDITION_LIMIT: f64 = 1e8;
const RESIDUAL_FACTOR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectralData<T: Real> {
    /// Distinct absolute values, strictly decreasing, last may be 0.
    pub lambdas: Vec<T>,
    /// Per group, an orthonormal basis of the eigenspace for +λ_i.
    pub e_pos: Vec<Vec<DVector<T>>>,
    /// Per group, an orthonormal basis of the eigenspace for −λ_i.
    pub e_neg: Vec<Vec<DVector<T>>>,
    /// Per group, basis of Ē_i = span(E_i ∪ E_{−i}).
    pub ebar: Vec<Vec<DVector<T>>>,
    pub diagonalizable: bool,
    /// Set when `diagonalizable` is false: "complex spectrum" or "defective".
    pub reason: Option<&'static str>,
    basis: Option<EigenBasis<T>>,
}

#[derive(Debug, Clone)]
struct EigenBasis<T: Real> {
    p: DMatrix<T>,
    lu: nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>,
    /// Column range of each group inside `p`.
    ranges: Vec<std::ops::Range<usize>>,
}

impl<T: Real> SpectralData<T> {
    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    /// The component x_i ∈ Ē_i of the unique decomposition x = Σ x_i.
    pub fn component_of(&self, x: &DVector<T>, i: usize) -> Result<DVector<T>> {
        let basis = self.basis.as_ref().ok_or(Error::NotDiagonalizable {
            reason: self.reason.unwrap_or("defective"),
        })?;
        if i >= self.k() {
            return Err(Error::GroupIndex {
                index: i,
                k: self.k(),
            });
        }
        if x.len() != basis.p.nrows() {
            return Err(Error::DimensionMismatch {
                expected: basis.p.nrows(),
                got: x.len(),
            });
        }
        let mut coeffs = basis
            .lu
            .solve(x)
            .ok_or_else(|| Error::Numerical("eigenbasis solve failed".into()))?;
        for (g, range) in basis.ranges.iter().enumerate() {
            if g != i {
                for c in range.clone() {
                    coeffs[c] = T::zero();
                }
            }
        }
        Ok(&basis.p * coeffs)
    }

    /// Index of the group whose Ē_i contains z (within `tol` relative); the
    /// projected representative is returned alongside.
    pub fn group_of(&self, z: &DVector<T>, tol: T) -> Result<(usize, DVector<T>)> {
        let scale = z.amax().max(T::one());
        let mut best: Option<(usize, DVector<T>, T)> = None;
        for i in 0..self.k() {
            let zi = self.component_of(z, i)?;
            let resid = (z - &zi).amax();
            if best.as_ref().is_none_or(|(_, _, r)| resid < *r) {
                best = Some((i, zi, resid));
            }
        }
        let (i, zi, resid) = best.ok_or(Error::NotInGroup)?;
        if resid <= tol * scale {
            Ok((i, zi))
        } else {
            Err(Error::NotInGroup)
        }
    }
}

/// Parses the operator file format `{"matrix":[[...],[...]]}` (row-major,
/// square, strict about unknown fields).
pub fn matrix_from_json<T: Real>(text: &str) -> Result<DMatrix<T>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Invalid("operator file must be a JSON object".into()))?;
    for key in obj.keys() {
        if key != "matrix" {
            return Err(Error::Invalid(format!(
                "unknown field \"{key}\" in operator file"
            )));
        }
    }
    let rows = obj
        .get("matrix")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Invalid("missing \"matrix\" array".into()))?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Invalid("matrix must be nonempty".into()));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Invalid("matrix rows must be arrays".into()))?;
        if row.len() != n {
            return Err(Error::Invalid("matrix must be square".into()));
        }
        for (j, cell) in row.iter().enumerate() {
            let t = cell
                .as_f64()
                .ok_or_else(|| Error::Invalid("matrix entries must be numbers".into()))?;
            if !t.is_finite() {
                return Err(Error::NonFinite("matrix"));
            }
            m[(i, j)] = T::of(t);
        }
    }
    Ok(m)
}

/// Induced ∞-norm (max absolute row sum).
pub fn inf_norm<T: Real>(a: &DMatrix<T>) -> T {
    (0..a.nrows()).fold(T::zero(), |acc, i| {
        acc.max(a.row(i).iter().fold(T::zero(), |s, t| s + t.abs()))
    })
}

/// Largest singular value.
pub fn operator_two_norm<T: Real>(a: &DMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(T::zero(), |acc, s| acc.max(*s))
}

/// Decomposes `a` into eigenvalue groups by |λ|. `tol` controls when two
/// (absolute) eigenvalues are considered tied, relative to max(1, λ₁).
pub fn spectral_decompose<T: Real>(a: &DMatrix<T>, tol: T) -> Result<SpectralData<T>> {
    if !a.is_square() || a.is_empty() {
        return Err(Error::Invalid("operator must be square and nonempty".into()));
    }
    if !a.iter().all(|t| t.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    if !(tol.is_finite() && tol > T::zero()) {
        return Err(Error::Invalid("grouping tolerance must be positive".into()));
    }
    let n = a.nrows();

    let schur = nalgebra::Schur::try_new(a.clone(), T::default_epsilon(), MAX_EIGEN_ITERS)
        .ok_or_else(|| Error::Numerical("eigensolver did not converge".into()))?;
    let eigs = schur.complex_eigenvalues();
    let scale = eigs
        .iter()
        .fold(T::zero(), |acc, c| acc.max(modulus(c)))
        .max(T::one());

    if eigs.iter().any(|c| c.im.abs() > tol * scale) {
        return Ok(non_diagonalizable(a, &eigs, tol, "complex spectrum"));
    }
    let mut values: Vec<T> = eigs.iter().map(|c| c.re).collect();
    values.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));

    // Signed clusters.
    let mut clusters: Vec<(T, usize)> = Vec::new(); // (mean, multiplicity)
    for v in values {
        match clusters.last_mut() {
            Some((mean, m)) if (v - *mean).abs() <= tol * scale => {
                *mean = (*mean * T::of(*m as f64) + v) / T::of((*m + 1) as f64);
                *m += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }

    // Eigenvectors per signed cluster, via the nullspace of A − μI.
    let a_inf = inf_norm(a);
    let residual_limit = T::of(RESIDUAL_FACTOR) * a_inf.max(T::default_epsilon());
    let mut cluster_bases: Vec<Vec<DVector<T>>> = Vec::with_capacity(clusters.len());
    for &(mu, m) in &clusters {
        let shifted = a - DMatrix::identity(n, n) * mu;
        let svd = nalgebra::SVD::try_new(shifted, false, true, T::default_epsilon(), MAX_EIGEN_ITERS)
            .ok_or_else(|| Error::Numerical("svd did not converge".into()))?;
        let v_t = svd.v_t.expect("requested");
        let mut basis = Vec::with_capacity(m);
        // Singular values are sorted descending; the nullspace lives in the
        // last rows of Vᵀ.
        for r in (n - m)..n {
            let v = v_t.row(r).transpose();
            let resid = (a * &v - &v * mu).amax();
            if resid > residual_limit {
                return Ok(non_diagonalizable(a, &eigs, tol, "defective"));
            }
            basis.push(v);
        }
        cluster_bases.push(basis);
    }

    // Absolute-value groups over the signed clusters.
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by(|&i, &j| {
        clusters[j]
            .0
            .abs()
            .partial_cmp(&clusters[i].0.abs())
            .expect("finite")
    });
    let mut lambdas: Vec<T> = Vec::new();
    let mut e_pos: Vec<Vec<DVector<T>>> = Vec::new();
    let mut e_neg: Vec<Vec<DVector<T>>> = Vec::new();
    for c in order {
        let (mu, _) = clusters[c];
        let vectors = cluster_bases[c].clone();
        let is_zero = mu.abs() <= tol * scale;
        let matches_last = lambdas
            .last()
            .is_some_and(|last| (mu.abs() - *last).abs() <= tol * scale);
        if !matches_last {
            lambdas.push(if is_zero { T::zero() } else { mu.abs() });
            e_pos.push(Vec::new());
            e_neg.push(Vec::new());
        }
        let g = lambdas.len() - 1;
        if mu < T::zero() && !is_zero {
            e_neg[g].extend(vectors);
        } else {
            e_pos[g].extend(vectors);
        }
    }
    let ebar: Vec<Vec<DVector<T>>> = e_pos
        .iter()
        .zip(&e_neg)
        .map(|(p, q)| p.iter().chain(q.iter()).cloned().collect())
        .collect();

    // Assemble and condition-check the full eigenbasis.
    let mut p = DMatrix::zeros(n, n);
    let mut ranges = Vec::with_capacity(ebar.len());
    let mut col = 0;
    for group in &ebar {
        let start = col;
        for v in group {
            p.set_column(col, v);
            col += 1;
        }
        ranges.push(start..col);
    }
    debug_assert_eq!(col, n);
    let sv = p.clone().svd(false, false).singular_values;
    let (smax, smin) = sv
        .iter()
        .fold((T::zero(), T::max_value().unwrap()), |(hi, lo), s| {
            (hi.max(*s), lo.min(*s))
        });
    if smin <= T::zero() || smax / smin > T::of(BASIS_CONDITION_LIMIT) {
        return Ok(non_diagonalizable(a, &eigs, tol, "defective"));
    }
    let lu = nalgebra::LU::new(p.clone());

    Ok(SpectralData {
        lambdas,
        e_pos,
        e_neg,
        ebar,
        diagonalizable: true,
        reason: None,
        basis: Some(EigenBasis { p, lu, ranges }),
    })
}

fn modulus<T: Real>(c: &nalgebra::Complex<T>) -> T {
    (c.re * c.re + c.im * c.im).sqrt()
}

/// Non-diagonalizable outcome: |λ| groups are still reported (from the raw
/// eigenvalues) but no eigenspaces are attached.
fn non_diagonalizable<T: Real>(
    _a: &DMatrix<T>,
    eigs: &DVector<nalgebra::Complex<T>>,
    tol: T,
    reason: &'static str,
) -> SpectralData<T> {
    let scale = eigs
        .iter()
        .fold(T::zero(), |acc, c| acc.max(modulus(c)))
        .max(T::one());
    let mut mods: Vec<T> = eigs.iter().map(modulus).collect();
    mods.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
    let mut lambdas: Vec<T> = Vec::new();
    for m in mods {
        if lambdas
            .last()
            .is_none_or(|last| (*last - m).abs() > tol * scale)
        {
            lambdas.push(if m <= tol * scale { T::zero() } else { m });
        }
    }
    let k = lambdas.len();
    SpectralData {
        lambdas,
        e_pos: vec![Vec::new(); k],
        e_neg: vec![Vec::new(); k],
        ebar: vec![Vec::new(); k],
        diagonalizable: false,
        reason: Some(reason),
        basis: None,
    }
}

/// Largest principal angle between span(a) and span(b), in radians.
pub fn max_principal_angle<T: Real>(a: &[DVector<T>], b: &[DVector<T>]) -> Result<T> {
    if a.is_empty() || b.is_empty() || a.len() != b.len() {
        return Err(Error::DegenerateBasis);
    }
    let qa = orthonormal_columns(a)?;
    let qb = orthonormal_columns(b)?;
    let product = qa.transpose() * qb;
    let sv = product.svd(false, false).singular_values;
    let cos_min = sv
        .iter()
        .fold(T::one(), |acc, s| acc.min(*s))
        .clamp(-T::one(), T::one());
    Ok(cos_min.acos())
}

fn orthonormal_columns<T: Real>(family: &[DVector<T>]) -> Result<DMatrix<T>> {
    let n = family[0].len();
    let mut m = DMatrix::zeros(n, family.len());
    for (j, v) in family.iter().enumerate() {
        m.set_column(j, v);
    }
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    for j in 0..family.len() {
        if r[(j, j)].abs() <= T::of(1e-12) {
            return Err(Error::DegenerateBasis);
        }
    }
    Ok(q.columns(0, family.len()).clone_owned())
}
