//! Property tests for the structural invariants: norm axioms, SIP axioms,
//! gradient identities, spectral reconstruction, and the Lipschitz/uniform
//! continuity dichotomy.

use proptest::prelude::*;
use sip_core::{
    lipschitz_scan, numeric_gradient, section_point, sip_eval, spectral_decompose,
    uniform_continuity_probe, NormSpec, PlaneFrame, RealMatrix, RealVector,
};

fn lp_strategy() -> impl Strategy<Value = NormSpec<f64>> {
    ((1.2f64..4.5), (2usize..=5)).prop_map(|(p, d)| NormSpec::lp(p, d).unwrap())
}

fn weighted_strategy() -> impl Strategy<Value = NormSpec<f64>> {
    ((2.0f64..4.0), proptest::collection::vec(0.3f64..3.0, 2..=5))
        .prop_map(|(p, w)| NormSpec::weighted_lp(p, RealVector::from_vec(w)).unwrap())
}

fn ellipsoid_strategy() -> impl Strategy<Value = NormSpec<f64>> {
    ((2usize..=4), proptest::collection::vec(-1.0f64..1.0, 16)).prop_map(|(d, g)| {
        let gm = RealMatrix::from_fn(d, d, |i, j| g[i * d + j]);
        let q = gm.transpose() * &gm + RealMatrix::identity(d, d) * 0.5;
        NormSpec::ellipsoid(q).unwrap()
    })
}

fn direct_sum_strategy() -> impl Strategy<Value = NormSpec<f64>> {
    ((1.5f64..4.0), (1.5f64..4.0), (1usize..=2), (1usize..=3)).prop_map(|(p1, p2, d1, d2)| {
        NormSpec::direct_sum(vec![
            NormSpec::lp(p1, d1).unwrap(),
            NormSpec::lp(p2, d2).unwrap(),
        ])
        .unwrap()
    })
}

fn any_spec() -> impl Strategy<Value = NormSpec<f64>> {
    prop_oneof![
        lp_strategy(),
        weighted_strategy(),
        ellipsoid_strategy(),
        direct_sum_strategy(),
    ]
}

fn spec_and_vectors(k: usize) -> impl Strategy<Value = (NormSpec<f64>, Vec<RealVector>)> {
    any_spec().prop_flat_map(move |spec| {
        let d = spec.dim();
        (
            Just(spec),
            proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, d), k),
        )
            .prop_map(|(spec, vs)| (spec, vs.into_iter().map(RealVector::from_vec).collect()))
    })
}

fn nontrivial(x: &RealVector) -> bool {
    x.iter().any(|t| t.abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn norm_is_absolutely_homogeneous(
        (spec, vs) in spec_and_vectors(1),
        c in -4.0f64..4.0,
    ) {
        let x = &vs[0];
        let n = spec.eval(x).unwrap();
        let scaled = spec.eval(&(x * c)).unwrap();
        let err = (scaled - c.abs() * n).abs();
        prop_assert!(err <= 1e-10 * (1.0 + n), "err {err}");
    }

    #[test]
    fn norm_satisfies_the_triangle_inequality((spec, vs) in spec_and_vectors(2)) {
        let (x, y) = (&vs[0], &vs[1]);
        let lhs = spec.eval(&(x + y)).unwrap();
        let rhs = spec.eval(x).unwrap() + spec.eval(y).unwrap();
        prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs), "{lhs} > {rhs}");
    }

    #[test]
    fn sip_is_linear_in_the_first_argument(
        (spec, vs) in spec_and_vectors(3),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let (x1, x2, y) = (&vs[0], &vs[1], &vs[2]);
        prop_assume!(nontrivial(y));
        let combo = sip_eval(&spec, &(x1 * a + x2 * b), y).unwrap();
        let parts = a * sip_eval(&spec, x1, y).unwrap() + b * sip_eval(&spec, x2, y).unwrap();
        let scale = 1.0 + combo.abs().max(parts.abs());
        prop_assert!((combo - parts).abs() <= 1e-9 * scale, "{combo} vs {parts}");
    }

    #[test]
    fn sip_satisfies_schwartz((spec, vs) in spec_and_vectors(2)) {
        let (x, y) = (&vs[0], &vs[1]);
        let lhs = sip_eval(&spec, x, y).unwrap().abs();
        let rhs = spec.eval(x).unwrap() * spec.eval(y).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn sip_diagonal_recovers_the_squared_norm((spec, vs) in spec_and_vectors(1)) {
        let x = &vs[0];
        let diag = sip_eval(&spec, x, x).unwrap();
        let sq = spec.eval(x).unwrap().powi(2);
        prop_assert!((diag - sq).abs() <= 1e-10 * (1.0 + sq), "{diag} vs {sq}");
    }

    #[test]
    fn sip_is_homogeneous_in_the_second_argument(
        (spec, vs) in spec_and_vectors(2),
        c in prop_oneof![-4.0f64..-0.1, 0.1f64..4.0],
    ) {
        let (x, y) = (&vs[0], &vs[1]);
        prop_assume!(nontrivial(y));
        let lhs = sip_eval(&spec, x, &(y * c)).unwrap();
        let rhs = c * sip_eval(&spec, x, y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn gradient_satisfies_eulers_identity((spec, vs) in spec_and_vectors(1)) {
        let x = &vs[0];
        prop_assume!(nontrivial(x));
        let n = spec.eval(x).unwrap();
        let g = spec.gradient(x).unwrap();
        prop_assert!((g.dot(x) - n).abs() <= 1e-9 * (1.0 + n));
    }

    #[test]
    fn closed_form_gradient_matches_finite_differences((spec, vs) in spec_and_vectors(1)) {
        let x = &vs[0];
        prop_assume!(spec.eval(x).unwrap() > 0.1);
        let exact = spec.gradient(x).unwrap();
        let spec2 = spec.clone();
        let numeric = numeric_gradient(move |v| spec2.eval(v), x).unwrap();
        let scale = 1.0 + exact.amax();
        prop_assert!((exact - numeric).amax() <= 1e-5 * scale);
    }

    #[test]
    fn section_points_have_unit_norm(
        (spec, vs) in spec_and_vectors(2),
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let (u, v) = (&vs[0], &vs[1]);
        prop_assume!(spec.dim() >= 2);
        prop_assume!(nontrivial(u) && nontrivial(v));
        let frame = match PlaneFrame::new(&spec, u.clone(), v.clone()) {
            Ok(f) => f,
            Err(_) => return Ok(()), // (near-)parallel draw
        };
        let p = section_point(&spec, &frame, theta).unwrap();
        prop_assert!((spec.eval(&p).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn spectral_bases_reconstruct_eigenvector_action(
        diag in proptest::collection::vec(-3.0f64..3.0, 2..=5),
        raw in proptest::collection::vec(-1.0f64..1.0, 25),
    ) {
        let n = diag.len();
        let p = RealMatrix::from_fn(n, n, |i, j| {
            raw[i * n + j] + if i == j { 2.0 } else { 0.0 }
        });
        let sv = p.clone().svd(false, false).singular_values;
        prop_assume!(sv[n - 1] > 1e-2 * sv[0]);
        let a = &p * RealMatrix::from_diagonal(&RealVector::from_vec(diag)) *
            p.clone().try_inverse().unwrap();
        let sd = spectral_decompose(&a, 1e-8).unwrap();
        prop_assert!(sd.diagonalizable, "{:?}", sd.reason);
        let scale = a.amax().max(1.0);
        for g in 0..sd.k() {
            for v in &sd.e_pos[g] {
                prop_assert!((&a * v - v * sd.lambdas[g]).amax() <= 1e-6 * scale);
            }
            for v in &sd.e_neg[g] {
                prop_assert!((&a * v + v * sd.lambdas[g]).amax() <= 1e-6 * scale);
            }
        }
    }
}

#[test]
fn lipschitz_dichotomy_smooth_side() {
    // Stabilizing quotients come with vanishing gaps on shrinking pairs.
    let spec = NormSpec::lp(3.0, 2).unwrap();
    let x = RealVector::from_row_slice(&[1.0, 0.0]);
    let est = lipschitz_scan(&spec, &x, 16, 5).unwrap();
    let ratio = est.level_maxima[4] / est.level_maxima[3];
    assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
    let pairs: Vec<_> = (1..=24)
        .map(|k| {
            let d = 2f64.powi(-k);
            let y = RealVector::from_row_slice(&[1.0, d]);
            let z = RealVector::from_row_slice(&[1.0, -d]);
            (
                &y / spec.eval(&y).unwrap(),
                &z / spec.eval(&z).unwrap(),
            )
        })
        .collect();
    let rep = uniform_continuity_probe(&spec, &x, &pairs).unwrap();
    assert!(rep.shrinks);
    assert!(*rep.gaps.last().unwrap() <= 1e-6);
}

#[test]
fn lipschitz_dichotomy_kink_side() {
    // Diverging quotients come with a sequence whose gap refuses to shrink.
    let spec = NormSpec::lp(1.5, 2).unwrap();
    let x = RealVector::from_row_slice(&[1.0, 0.0]);
    let est = lipschitz_scan(&spec, &x, 16, 5).unwrap();
    let growth = est.level_maxima[4] / est.level_maxima[2];
    assert!(growth >= 8.0, "growth {growth}");
    let pairs: Vec<_> = (1..=10)
        .map(|k| {
            let t = 4f64.powi(-k);
            let y = RealVector::from_row_slice(&[t, 1.0]);
            let z = RealVector::from_row_slice(&[-t, 1.0]);
            let y = &y / spec.eval(&y).unwrap();
            let z = &z / spec.eval(&z).unwrap();
            let c = (sip_eval(&spec, &x, &y).unwrap() - sip_eval(&spec, &x, &z).unwrap()).abs();
            (y / c, z / c)
        })
        .collect();
    let rep = uniform_continuity_probe(&spec, &x, &pairs).unwrap();
    assert!(!rep.shrinks);
    assert!(*rep.distances.last().unwrap() <= 1e-2);
    for gap in &rep.gaps {
        assert!((gap - 1.0).abs() <= 0.05, "gap {gap}");
    }
}
