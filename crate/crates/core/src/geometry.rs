//! Unit-sphere section geometry.
//!
//! A 2-plane section of the unit sphere is parametrized radially through a
//! `PlaneFrame`; on top of that sit a centered-ellipse detector, the residual
//! of the ODE f′(x) = −x·f(x)/(1 − x²) satisfied by Euclidean section
//! graphs, and two probes for the regularity of x ↦ [x, ·] on the sphere:
//! a Lipschitz-quotient scan and a uniform-continuity report.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::NormSpec;
use crate::scalar::Real;
use crate::sip::sip_eval;

/// Two unit vectors (ambient norm) spanning a plane through the origin.
#[derive(Debug, Clone)]
pub struct PlaneFrame<T> {
    pub u: DVector<T>,
    pub v: DVector<T>,
}

impl<T: Real> PlaneFrame<T> {
    /// Normalizes both spanning vectors and rejects (near-)parallel input.
    pub fn new(spec: &NormSpec<T>, u: DVector<T>, v: DVector<T>) -> Result<Self> {
        if u.len() != spec.dim() || v.len() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: u.len().max(v.len()),
            });
        }
        let u = &u / spec.eval(&u)?;
        let v = &v / spec.eval(&v)?;
        let mut m = DMatrix::zeros(spec.dim(), 2);
        m.set_column(0, &u);
        m.set_column(1, &v);
        let sv = m.svd(false, false).singular_values;
        if sv[1] <= T::of(1e-8) * sv[0] {
            return Err(Error::DegenerateBasis);
        }
        Ok(Self { u, v })
    }
}

/// Point of the section S ∩ span{u, v} in direction θ.
///
/// The ray r ↦ r·(cos θ·u + sin θ·v) crosses the sphere once, at
/// r = 1/‖d‖ by homogeneity, so the radial solve is closed-form and the
/// returned point has ambient norm 1 to roundoff.
pub fn section_point<T: Real>(
    spec: &NormSpec<T>,
    frame: &PlaneFrame<T>,
    theta: T,
) -> Result<DVector<T>> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let d = &frame.u * theta.cos() + &frame.v * theta.sin();
    let r = spec.eval(&d)?;
    Ok(d / r)
}

/// Least-squares residual of fitting a centered ellipse (sᵀMs = 1, M
/// symmetric) to `grid` section points, in plane coordinates.
///
/// Returns max_s |sᵀMs − 1| for the fitted M, or 1 when the fit is not
/// positive definite and so cannot describe an origin-centered ellipse.
pub fn ellipse_fit_residual<T: Real>(
    spec: &NormSpec<T>,
    frame: &PlaneFrame<T>,
    grid: usize,
) -> Result<T> {
    if grid < 8 {
        return Err(Error::Invalid("grid must be at least 8".into()));
    }
    let tau = T::of(std::f64::consts::TAU);
    let mut rows = DMatrix::zeros(grid, 3);
    for k in 0..grid {
        let theta = tau * T::of(k as f64) / T::of(grid as f64);
        let d = &frame.u * theta.cos() + &frame.v * theta.sin();
        let r = T::one() / spec.eval(&d)?;
        let (s1, s2) = (r * theta.cos(), r * theta.sin());
        rows[(k, 0)] = s1 * s1;
        rows[(k, 1)] = (s1 * s2) * T::of(2.0);
        rows[(k, 2)] = s2 * s2;
    }
    let rhs = DVector::from_element(grid, T::one());
    let m = rows
        .clone()
        .svd(true, true)
        .solve(&rhs, T::of(1e-14))
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let (m11, m12, m22) = (m[0], m[1], m[2]);
    if m11 <= T::zero() || m11 * m22 - m12 * m12 <= T::zero() {
        return Ok(T::one());
    }
    let fit = rows * &m;
    let mut worst = T::zero();
    for k in 0..grid {
        worst = worst.max((fit[k] - T::one()).abs());
    }
    Ok(worst)
}

/// Residual of the section-graph ODE at x₀, plus whether the frame met the
/// derivation's premise.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OdeCheck<T> {
    pub residual: T,
    /// True when the frame is an Auerbach pair of its plane
    /// (|[u,v]| and |[v,u]| both ≤ 1e−6); the residual is computed either
    /// way, but only means something when this holds.
    pub premise_ok: bool,
}

/// |f′(x₀) + x₀·f(x₀)/(1 − x₀²)| where f is the section graph over the
/// u-axis: N(x·u + f(x)·v) = 1, f > 0.
///
/// A zero residual on all of (−1, 1) pins f down as √(1 − x²); f′ is taken
/// by central difference with step 1e−5.
pub fn ode_residual<T: Real>(
    spec: &NormSpec<T>,
    frame: &PlaneFrame<T>,
    x0: T,
) -> Result<OdeCheck<T>> {
    if !x0.is_finite() {
        return Err(Error::NonFinite("x0"));
    }
    if x0.abs() >= T::one() - T::of(1e-6) {
        return Err(Error::Invalid(
            "x0 is too close to the supporting lines x = ±1".into(),
        ));
    }
    let premise_ok = sip_eval(spec, &frame.u, &frame.v)?.abs() <= T::of(1e-6)
        && sip_eval(spec, &frame.v, &frame.u)?.abs() <= T::of(1e-6);
    let h = T::of(1e-5);
    let f0 = graph_height(spec, frame, x0)?;
    let fp = (graph_height(spec, frame, x0 + h)? - graph_height(spec, frame, x0 - h)?)
        / (h * T::of(2.0));
    let residual = (fp + x0 * f0 / (T::one() - x0 * x0)).abs();
    Ok(OdeCheck {
        residual,
        premise_ok,
    })
}

/// Positive root t of N(x·u + t·v) = 1.
fn graph_height<T: Real>(spec: &NormSpec<T>, frame: &PlaneFrame<T>, x: T) -> Result<T> {
    let base = &frame.u * x;
    if spec.eval(&base)? >= T::one() {
        return Err(Error::Numerical(
            "graph point lies outside the section's shadow".into(),
        ));
    }
    let height = |t: T| -> Result<T> { spec.eval(&(&base + &frame.v * t)) };
    let mut hi = T::of(2.0);
    let mut grow = 0;
    while height(hi)? < T::one() {
        hi *= T::of(2.0);
        grow += 1;
        if grow > 60 {
            return Err(Error::Numerical("graph bracket did not close".into()));
        }
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        if height(mid)? < T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::of(1e-15) * hi.max(T::one()) {
            break;
        }
    }
    Ok((lo + hi) * T::of(0.5))
}

/// Largest observed difference quotient of y ↦ [x, y] on the sphere.
#[derive(Debug, Clone)]
pub struct LipschitzEstimate<T> {
    pub base_x: DVector<T>,
    /// max |[x,y] − [x,z]| / ‖y − z‖ over all probed pairs; a lower bound
    /// for any Lipschitz constant of [x, ·] on the sphere.
    pub kappa_hat: T,
    pub witness_pair: (DVector<T>, DVector<T>),
    pub mesh_size: usize,
    /// Per-refinement maxima; bounded ⇔ the quotients stabilize,
    /// divergence ⇒ the Lipschitz property fails at some sphere point.
    pub level_maxima: Vec<T>,
}

/// Scan difference quotients over `mesh` sphere pairs per level, with the
/// pair gap shrinking tenfold per refinement level.
///
/// Pairs mix axis-straddling constructions (which witness kinks of lp-type
/// gradients on coordinate hyperplanes) with seeded random neighbor pairs;
/// the internal seed is fixed so identical arguments reproduce identical
/// estimates.
pub fn lipschitz_scan<T: Real>(
    spec: &NormSpec<T>,
    x: &DVector<T>,
    mesh: usize,
    refine: usize,
) -> Result<LipschitzEstimate<T>> {
    if mesh < 8 {
        return Err(Error::Invalid("mesh must be at least 8".into()));
    }
    if refine == 0 {
        return Err(Error::Invalid("refine must be at least 1".into()));
    }
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: x.len(),
        });
    }
    if (spec.eval(x)? - T::one()).abs() > T::of(1e-10) {
        return Err(Error::Invalid("base point must have unit norm".into()));
    }
    let n = spec.dim();
    // One fixed mesh of (base point, chord direction) probes; refinement
    // only shrinks the gap, so successive level maxima are comparable.
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c69_7073);
    rng.set_stream(0);
    let mut probes: Vec<(DVector<T>, DVector<T>)> = Vec::with_capacity(mesh);
    'axes: for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let mut base = DVector::zeros(n);
            base[j] = T::one();
            let mut dir = DVector::zeros(n);
            dir[i] = T::one();
            probes.push((base, dir));
            if probes.len() == mesh {
                break 'axes;
            }
        }
    }
    while probes.len() < mesh {
        let b = gaussian(n, &mut rng);
        let w = gaussian(n, &mut rng);
        let nw: T = w.dot(&w);
        probes.push((
            &b / spec.eval(&b)?,
            &w / nw.sqrt().max(T::of(1e-300)),
        ));
    }
    let mut kappa_hat = T::zero();
    let mut witness: Option<(DVector<T>, DVector<T>)> = None;
    let mut level_maxima = Vec::with_capacity(refine);
    for level in 0..refine {
        let delta = T::of(0.1 * 10f64.powi(-(level as i32)));
        let t = delta * T::of(0.5);
        let mut level_max = T::zero();
        for (base, dir) in &probes {
            let y = unit(spec, base + dir * t)?;
            let z = unit(spec, base - dir * t)?;
            let dist = spec.eval(&(&y - &z))?;
            if dist <= T::of(1e-15) {
                continue;
            }
            let q = (sip_eval(spec, x, &y)? - sip_eval(spec, x, &z)?).abs() / dist;
            level_max = level_max.max(q);
            if q > kappa_hat {
                kappa_hat = q;
                witness = Some((y.clone(), z.clone()));
            }
        }
        level_maxima.push(level_max);
    }
    let witness_pair = witness.ok_or_else(|| Error::Numerical("no usable pair".into()))?;
    Ok(LipschitzEstimate {
        base_x: x.clone(),
        kappa_hat,
        witness_pair,
        mesh_size: mesh,
        level_maxima,
    })
}

fn unit<T: Real>(spec: &NormSpec<T>, v: DVector<T>) -> Result<DVector<T>> {
    let n = spec.eval(&v)?;
    Ok(v / n)
}

fn gaussian<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> DVector<T> {
    DVector::from_fn(n, |_, _| {
        T::of(<StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
    })
}

/// Per-pair distances and SIP gaps, with a shrink verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport<T> {
    pub distances: Vec<T>,
    pub gaps: Vec<T>,
    /// True when the final gap is negligible next to the largest one, i.e.
    /// the gap sequence actually decays along the probe.
    pub shrinks: bool,
}

/// Evaluate |[x,y] − [x,z]| along a caller-supplied sequence of sphere pairs
/// and judge whether the gaps decay with the distances.
pub fn uniform_continuity_probe<T: Real>(
    spec: &NormSpec<T>,
    x: &DVector<T>,
    pairs: &[(DVector<T>, DVector<T>)],
) -> Result<ProbeReport<T>> {
    if pairs.is_empty() {
        return Err(Error::Invalid("at least one pair is required".into()));
    }
    let mut distances = Vec::with_capacity(pairs.len());
    let mut gaps = Vec::with_capacity(pairs.len());
    for (y, z) in pairs {
        distances.push(spec.eval(&(y - z))?);
        gaps.push((sip_eval(spec, x, y)? - sip_eval(spec, x, z)?).abs());
    }
    let gap_max = gaps.iter().fold(T::zero(), |acc, g| acc.max(*g));
    let gap_last = *gaps.last().expect("nonempty");
    let shrinks = gap_last <= T::of(1e-6).max(gap_max * T::of(0.05));
    Ok(ProbeReport {
        distances,
        gaps,
        shrinks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn coord_frame(spec: &NormSpec<f64>) -> PlaneFrame<f64> {
        PlaneFrame::new(spec, e(spec.dim(), 0), e(spec.dim(), 1)).unwrap()
    }

    #[test]
    fn euclidean_diagonal_section_point() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        let p = section_point(&spec, &coord_frame(&spec), FRAC_PI_4).unwrap();
        assert_relative_eq!(p[0], SQRT_2 / 2.0, epsilon = 1e-15);
        assert_relative_eq!(p[1], SQRT_2 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn lp4_diagonal_section_point() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let p = section_point(&spec, &coord_frame(&spec), FRAC_PI_4).unwrap();
        // 2^{-1/4}
        assert_relative_eq!(p[0], 0.840_896_415_253_714_5, epsilon = 1e-12);
        assert_relative_eq!(p[1], 0.840_896_415_253_714_5, epsilon = 1e-12);
    }

    #[test]
    fn ellipsoid_axis_section_point() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let spec = NormSpec::ellipsoid(q).unwrap();
        let frame = PlaneFrame::new(&spec, e(2, 0), e(2, 1)).unwrap();
        let p = section_point(&spec, &frame, FRAC_PI_2).unwrap();
        assert_relative_eq!(p[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(p[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn section_points_stay_on_the_sphere() {
        let part = NormSpec::lp(4.0, 2).unwrap();
        let specs = vec![
            NormSpec::lp(3.0, 4).unwrap(),
            NormSpec::weighted_lp(2.5, DVector::from_row_slice(&[1.0, 2.0, 0.5])).unwrap(),
            NormSpec::direct_sum(vec![part.clone(), part]).unwrap(),
        ];
        for spec in specs {
            let u = DVector::from_fn(spec.dim(), |i, _| 1.0 + i as f64);
            let v = DVector::from_fn(spec.dim(), |i, _| if i % 2 == 0 { 1.0 } else { -0.5 });
            let frame = PlaneFrame::new(&spec, u, v).unwrap();
            for k in 0..48 {
                let theta = std::f64::consts::TAU * k as f64 / 48.0;
                let p = section_point(&spec, &frame, theta).unwrap();
                assert_relative_eq!(spec.eval(&p).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn parallel_frame_is_rejected() {
        let spec = NormSpec::lp(2.0, 3).unwrap();
        let err = PlaneFrame::new(&spec, e(3, 0), e(3, 0) * 2.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateBasis));
    }

    #[test]
    fn euclidean_sections_are_ellipses() {
        let spec = NormSpec::lp(2.0, 3).unwrap();
        let u = DVector::from_row_slice(&[1.0, 2.0, -0.5]);
        let v = DVector::from_row_slice(&[0.3, -1.0, 1.0]);
        let frame = PlaneFrame::new(&spec, u, v).unwrap();
        let r = ellipse_fit_residual(&spec, &frame, 64).unwrap();
        assert!(r <= 1e-10, "residual {r}");
    }

    #[test]
    fn ellipsoid_sections_are_ellipses() {
        let q = DMatrix::from_row_slice(
            3,
            3,
            &[2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0],
        );
        let spec = NormSpec::ellipsoid(q).unwrap();
        let u = DVector::from_row_slice(&[1.0, 0.5, 0.0]);
        let v = DVector::from_row_slice(&[-0.2, 1.0, 0.7]);
        let frame = PlaneFrame::new(&spec, u, v).unwrap();
        let r = ellipse_fit_residual(&spec, &frame, 64).unwrap();
        assert!(r <= 1e-9, "residual {r}");
    }

    #[test]
    fn lp4_circle_is_not_an_ellipse() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let r = ellipse_fit_residual(&spec, &coord_frame(&spec), 64).unwrap();
        assert_relative_eq!(r, 0.180_340_599_014_953_36, epsilon = 1e-9);
        assert!(r >= 0.01);
    }

    #[test]
    fn fit_residual_is_frame_invariant_within_factor_two() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let base = ellipse_fit_residual(&spec, &coord_frame(&spec), 64).unwrap();
        let u = DVector::from_row_slice(&[0.6, 0.8]);
        let v = DVector::from_row_slice(&[-0.8, 0.6]);
        let frame = PlaneFrame::new(&spec, u, v).unwrap();
        let other = ellipse_fit_residual(&spec, &frame, 64).unwrap();
        let ratio = other / base;
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn small_grid_is_rejected() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        assert!(ellipse_fit_residual(&spec, &coord_frame(&spec), 7).is_err());
    }

    #[test]
    fn euclidean_graph_satisfies_the_ode() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        let check = ode_residual(&spec, &coord_frame(&spec), 0.5).unwrap();
        assert!(check.premise_ok);
        assert!(check.residual <= 1e-6, "residual {}", check.residual);
    }

    #[test]
    fn even_sections_satisfy_the_ode_at_zero() {
        for spec in [NormSpec::lp(4.0, 2).unwrap(), NormSpec::lp(3.0, 2).unwrap()] {
            let check = ode_residual(&spec, &coord_frame(&spec), 0.0).unwrap();
            assert!(check.residual <= 1e-6, "residual {}", check.residual);
        }
    }

    #[test]
    fn lp4_graph_violates_the_ode() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let check = ode_residual(&spec, &coord_frame(&spec), 0.5).unwrap();
        assert!(check.premise_ok);
        // f = (1-x⁴)^{1/4}: |f′(½) + ½·f(½)/(1−¼)| = 2^{-3}·(15/16)^{-3/4}·|−1 + 5|·... ≈ 0.5248
        assert_relative_eq!(check.residual, 0.524_797_245_670_781, epsilon = 1e-6);
        assert!((check.residual - 0.52f64).abs() <= 0.02);
    }

    #[test]
    fn non_auerbach_frame_is_flagged() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let frame = PlaneFrame::new(
            &spec,
            e(2, 0),
            DVector::from_row_slice(&[1.0, 1.0]),
        )
        .unwrap();
        let check = ode_residual(&spec, &frame, 0.25).unwrap();
        assert!(!check.premise_ok);
    }

    #[test]
    fn ode_rejects_singular_abscissae() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        assert!(ode_residual(&spec, &coord_frame(&spec), 0.9999999).is_err());
        assert!(ode_residual(&spec, &coord_frame(&spec), -1.5).is_err());
    }

    #[test]
    fn euclidean_quotients_never_exceed_one() {
        let spec = NormSpec::lp(2.0, 3).unwrap();
        let x = unit(&spec, DVector::from_row_slice(&[1.0, -2.0, 0.5])).unwrap();
        let est = lipschitz_scan(&spec, &x, 24, 3).unwrap();
        assert!(est.kappa_hat <= 1.0 + 1e-6, "kappa {}", est.kappa_hat);
        assert_eq!(est.level_maxima.len(), 3);
    }

    #[test]
    fn lp4_quotients_stabilize_across_refinements() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let x = e(2, 0);
        let est = lipschitz_scan(&spec, &x, 16, 5).unwrap();
        let a = est.level_maxima[3];
        let b = est.level_maxima[4];
        let ratio = b / a;
        assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
        assert!(est.kappa_hat.is_finite());
    }

    #[test]
    fn lp_three_halves_quotients_diverge() {
        let spec = NormSpec::lp(1.5, 2).unwrap();
        let est = lipschitz_scan(&spec, &e(2, 0), 16, 4).unwrap();
        assert!(est.kappa_hat >= 50.0, "kappa {}", est.kappa_hat);
        // t^{-1/2} scaling: tenfold smaller gaps, √10 larger quotients
        let growth = est.level_maxima[3] / est.level_maxima[1];
        assert!(growth >= 8.0, "growth {growth}");
    }

    #[test]
    fn straddle_quotient_matches_the_closed_form() {
        // On lp(1.5), [e₁, y] = sign(y₁)|y₁|^{1/2} at unit y, so the pair
        // straddling the y₂-axis at height t has quotient ≈ t^{-1/2} = 100.
        let spec = NormSpec::lp(1.5, 2).unwrap();
        let t = 1e-4;
        let y = unit(&spec, DVector::from_row_slice(&[t, 1.0])).unwrap();
        let z = unit(&spec, DVector::from_row_slice(&[-t, 1.0])).unwrap();
        let gap = (sip_eval(&spec, &e(2, 0), &y).unwrap()
            - sip_eval(&spec, &e(2, 0), &z).unwrap())
        .abs();
        let q = gap / spec.eval(&(&y - &z)).unwrap();
        assert!(q >= 50.0, "quotient {q}");
        assert_relative_eq!(q, 100.0, epsilon = 0.1);
    }

    #[test]
    fn scan_validates_its_input() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        assert!(lipschitz_scan(&spec, &e(2, 0), 4, 2).is_err());
        assert!(lipschitz_scan(&spec, &(e(2, 0) * 2.0), 16, 2).is_err());
        assert!(lipschitz_scan(&spec, &e(2, 0), 16, 0).is_err());
    }

    #[test]
    fn scan_is_deterministic() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let a = lipschitz_scan(&spec, &e(2, 0), 16, 3).unwrap();
        let b = lipschitz_scan(&spec, &e(2, 0), 16, 3).unwrap();
        assert_eq!(a.kappa_hat, b.kappa_hat);
        assert_eq!(a.witness_pair.0, b.witness_pair.0);
    }

    #[test]
    fn euclidean_probe_gaps_obey_cauchy_schwarz() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        let x = e(2, 0);
        let pairs: Vec<_> = (1..=8)
            .map(|k| {
                let d = 2f64.powi(-k);
                let y = unit(&spec, DVector::from_row_slice(&[1.0, d])).unwrap();
                let z = unit(&spec, DVector::from_row_slice(&[1.0, 0.0])).unwrap();
                (y, z)
            })
            .collect();
        let rep = uniform_continuity_probe(&spec, &x, &pairs).unwrap();
        assert!(rep.shrinks);
        for (gap, dist) in rep.gaps.iter().zip(rep.distances.iter()) {
            assert!(gap <= &(dist * 1.0 + 1e-12), "gap {gap} dist {dist}");
        }
    }

    #[test]
    fn lp4_shrinking_pairs_have_shrinking_gaps() {
        let spec = NormSpec::lp(4.0, 2).unwrap();
        let pairs: Vec<_> = (1..=10)
            .map(|k| {
                let d = 2f64.powi(-k);
                let y = unit(&spec, DVector::from_row_slice(&[1.0, d])).unwrap();
                let z = unit(&spec, DVector::from_row_slice(&[1.0, -d])).unwrap();
                (y, z)
            })
            .collect();
        let rep = uniform_continuity_probe(&spec, &e(2, 0), &pairs).unwrap();
        assert!(rep.shrinks);
        for w in rep.gaps.windows(2).skip(5) {
            assert!(w[1] <= w[0], "gaps must decay beyond n=5: {:?}", rep.gaps);
        }
    }

    #[test]
    fn rescaled_adversarial_pairs_defeat_uniform_continuity() {
        // Lemma-style construction on lp(1.5): straddle pairs rescaled by
        // their own SIP gap keep gap ≈ 1 while the distances vanish.
        let spec = NormSpec::lp(1.5, 2).unwrap();
        let x = e(2, 0);
        let pairs: Vec<_> = (1..=10)
            .map(|k| {
                let t = 4f64.powi(-k);
                let y = unit(&spec, DVector::from_row_slice(&[t, 1.0])).unwrap();
                let z = unit(&spec, DVector::from_row_slice(&[-t, 1.0])).unwrap();
                let c = (sip_eval(&spec, &x, &y).unwrap() - sip_eval(&spec, &x, &z).unwrap())
                    .abs();
                (y / c, z / c)
            })
            .collect();
        let rep = uniform_continuity_probe(&spec, &x, &pairs).unwrap();
        assert!(!rep.shrinks);
        let n = rep.distances.len();
        assert!(rep.distances[n - 1] < 1e-2, "distance {}", rep.distances[n - 1]);
        assert!(rep.distances[n - 1] < rep.distances[0] / 100.0);
        for gap in &rep.gaps {
            assert!((gap - 1.0).abs() <= 0.05, "gap {gap}");
        }
    }

    #[test]
    fn probe_requires_pairs() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        assert!(uniform_continuity_probe(&spec, &e(2, 0), &[]).is_err());
    }
}
