use flagricci_core::catalog::{default_sweep, FlagSpace};
use flagricci_core::compactify::{compactify, push_tangent, Chart, ChartPoint};
use flagricci_core::curvature::{
    ricci_components, ricci_components_exact, ricci_components_generic, trace, InvariantMetric,
};
use flagricci_core::dynamics::{
    classify, eigenvalues, find_boundary_fixed_points, integrate, ray_is_invariant_exact, IntegrationOptions,
    Matrix, SearchBox, SearchOptions, Termination,
};
use flagricci_core::flow::{nrf_velocity, scaled_polynomial_field, scaling_factor, NrfEvaluator};
use flagricci_core::poly::{int, ratio, Rational};
use proptest::prelude::*;

fn spaces() -> Vec<FlagSpace> {
    default_sweep()
}

fn metric(s: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, s).prop_map(|e| e.into_iter().map(|v| 10f64.powf(v)).collect())
}

fn space_and_metric() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (0..spaces().len()).prop_flat_map(|i| (Just(i), metric(spaces()[i].s())))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ricci_is_homogeneous_of_degree_minus_one((i, x) in space_and_metric(), e in -3.0f64..3.0) {
        let space = &spaces()[i];
        let c = 10f64.powf(e);
        let g = InvariantMetric::new(x).unwrap();
        let a = ricci_components(space, &g).unwrap();
        let b = ricci_components(space, &g.scaled(c).unwrap()).unwrap();
        let exact = ricci_components_exact(space.dims(), &space.triple_table(), &rationals(g.x())).unwrap();
        let scale = max_abs(&to_f64(&exact.0)).max(1e-300);
        let expect: Vec<f64> = a.r.iter().map(|r| r / c).collect();
        prop_assert!(max_gap(&b.r, &expect) <= 1e-12 * scale / c);
    }

    #[test]
    fn scalar_curvature_is_the_weighted_trace((i, x) in space_and_metric()) {
        let space = &spaces()[i];
        let g = InvariantMetric::new(x).unwrap();
        let (r, scalar) = ricci_components_exact(space.dims(), &space.triple_table(), &rationals(g.x())).unwrap();
        let weighted: Rational = r
            .iter()
            .zip(space.dims())
            .map(|(rk, &d)| rk * int(i64::from(d)))
            .sum();
        prop_assert_eq!(weighted, scalar);
        let a = ricci_components(space, &g).unwrap();
        let size: f64 = a.r.iter().zip(space.dims()).map(|(r, &d)| (r * f64::from(d)).abs()).sum();
        prop_assert!((trace(space.dims(), &a.r) - a.scalar).abs() <= 1e-12 * size.max(a.scalar.abs()));
    }

    #[test]
    fn closed_forms_match_exact_generic_sums((i, x) in space_and_metric()) {
        let space = &spaces()[i];
        let g = InvariantMetric::new(x).unwrap();
        let closed = ricci_components(space, &g).unwrap();
        let generic = ricci_components_generic(space.dims(), &space.triple_table(), &g).unwrap();
        let (exact, _) = ricci_components_exact(space.dims(), &space.triple_table(), &rationals(g.x())).unwrap();
        let exact = to_f64(&exact);
        let scale = max_abs(&exact);
        prop_assert!(max_gap(&closed.r, &exact) <= 1e-12 * scale);
        prop_assert!(max_gap(&generic.r, &exact) <= 1e-12 * scale);
    }

    #[test]
    fn polynomial_field_is_the_scaled_velocity((i, x) in space_and_metric()) {
        let space = &spaces()[i];
        let field = scaled_polynomial_field(space).unwrap();
        let mu = scaling_factor(space, &x).unwrap();
        prop_assert!(mu > 0.0);
        let v = nrf_velocity(space, &InvariantMetric::new(x.clone()).unwrap()).unwrap();
        let scaled: Vec<f64> = v.iter().map(|c| c * mu).collect();
        let f = field.evaluate(&x).unwrap();
        let terms = field.compile().eval_abs(&x);
        prop_assert!(max_gap(&f, &scaled) <= 1e-12 * max_abs(&terms));
    }

    #[test]
    fn kahler_ray_is_invariant_at_every_scale(i in 0..20usize, p in 1i64..1000, q in 1i64..1000) {
        let space = &spaces()[i];
        let field = scaled_polynomial_field(space).unwrap();
        let t = ratio(p, q);
        let ray: Vec<Rational> = (1..=space.s() as i64).map(|k| int(k) * &t).collect();
        prop_assert!(ray_is_invariant_exact(&field, &ray).unwrap());
    }

    #[test]
    fn jacobian_matches_central_differences((i, x) in space_and_metric()) {
        let space = &spaces()[i];
        let field = scaled_polynomial_field(space).unwrap().compile();
        let j = field.jacobian(&x);
        for col in 0..x.len() {
            let h = 1e-5 * x[col];
            let mut up = x.clone();
            let mut down = x.clone();
            up[col] += h;
            down[col] -= h;
            let (fu, fd) = (field.eval(&up), field.eval(&down));
            let scale = (0..x.len()).map(|row| j[(row, col)].abs()).fold(0.0, f64::max);
            let terms = max_abs(&field.eval_abs(&x)) / x[col];
            for row in 0..x.len() {
                let fd_val = (fu[row] - fd[row]) / (2.0 * h);
                prop_assert!((fd_val - j[(row, col)]).abs() <= 1e-6 * scale.max(terms));
            }
        }
    }

    #[test]
    fn chart_field_is_conjugate_to_the_pushed_field((i, x) in space_and_metric(), k in 0..3usize) {
        let space = &spaces()[i];
        let n = space.s();
        let chart = Chart::from_index(k % n + 1).unwrap();
        let field = scaled_polynomial_field(space).unwrap();
        let cf = compactify(&field, chart).unwrap();
        let z = ChartPoint::from_original(&x, chart).unwrap().z;
        let zn = *z.last().unwrap();
        let pushed = push_tangent(&x, &field.evaluate(&x).unwrap(), chart).unwrap();
        let expect: Vec<f64> = pushed.iter().map(|v| v * zn.powi(cf.d as i32 - 1)).collect();
        let got = cf.field.evaluate(&z).unwrap();
        let terms = cf.field.compile().eval_abs(&z);
        prop_assert!(max_gap(&got, &expect) <= 1e-10 * max_abs(&terms));
    }

    #[test]
    fn chart_coordinates_round_trip((i, x) in space_and_metric(), k in 0..4usize) {
        let n = spaces()[i].s();
        let chart = Chart::from_index(k % (n + 1) + 1).unwrap();
        let back = ChartPoint::from_original(&x, chart).unwrap().to_original().unwrap();
        prop_assert!(max_gap(&back, &x) <= 1e-14 * max_abs(&x));
    }

    #[test]
    fn classification_ignores_positive_scaling(
        rows in prop::collection::vec(-10.0f64..10.0, 9),
        dim in 1usize..4,
        e in -6.0f64..6.0,
    ) {
        let c = 10f64.powf(e);
        let pick = |scale: f64| {
            let r: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| rows[3 * i + j] * scale).collect()).collect();
            let refs: Vec<&[f64]> = r.iter().map(Vec::as_slice).collect();
            Matrix::from_rows(&refs)
        };
        let (a, b) = (pick(1.0), pick(c));
        if let (Ok(ea), Ok(eb)) = (eigenvalues(&a), eigenvalues(&b)) {
            // Stay away from the threshold, where rounding decides.
            let tau = 1e-6 * a.frobenius_norm();
            prop_assume!(ea.iter().all(|v| v.re.abs() > tau && (v.im.abs() > tau || v.im == 0.0)));
            prop_assert_eq!(classify(&ea, a.frobenius_norm()), classify(&eb, b.frobenius_norm()));
        }
    }

    #[test]
    fn eigenvalues_reproduce_trace_and_determinant(rows in prop::collection::vec(-10.0f64..10.0, 9), dim in 1usize..4) {
        let r: Vec<Vec<f64>> = (0..dim).map(|i| rows[3 * i..3 * i + dim].to_vec()).collect();
        let refs: Vec<&[f64]> = r.iter().map(Vec::as_slice).collect();
        let m = Matrix::from_rows(&refs);
        let eig = eigenvalues(&m).unwrap();
        let (mut pre, mut pim) = (1.0, 0.0);
        for v in &eig {
            (pre, pim) = (pre * v.re - pim * v.im, pre * v.im + pim * v.re);
        }
        let tr: f64 = eig.iter().map(|v| v.re).sum();
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!((tr - m.trace()).abs() <= 1e-9 * scale);
        prop_assert!((pre - m.determinant()).abs() <= 1e-8 * scale.powi(dim as i32));
        prop_assert!(pim.abs() <= 1e-8 * scale.powi(dim as i32));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flow_keeps_metrics_positive((i, x) in space_and_metric()) {
        let space = &spaces()[i];
        let nrf = NrfEvaluator::new(space);
        let traj = integrate(|y, out| nrf.velocity_into(y, out), &x, 5.0, &IntegrationOptions::default()).unwrap();
        prop_assert!(traj.states.iter().all(|s| s.iter().all(|v| *v > 0.0)));
        if traj.termination == Termination::Completed {
            prop_assert_eq!(traj.last_time(), 5.0);
        }
    }
}

#[test]
fn every_fixed_point_attracts_several_seeds() {
    for space in spaces() {
        let cf = compactify(&scaled_polynomial_field(&space).unwrap(), Chart::U1).unwrap();
        let bx = SearchBox::cube(space.s() - 1, 1e-2, 10.0).unwrap();
        let found = find_boundary_fixed_points(&cf, &bx, &SearchOptions::default()).unwrap();
        assert!(found.records.iter().all(|r| r.seeds >= 2), "{space}");
        assert!(found.records.iter().all(|r| r.residual <= 1e-12), "{space}");
    }
}

#[test]
fn coordinate_hyperplanes_are_invariant() {
    for space in spaces() {
        let field = scaled_polynomial_field(&space).unwrap();
        for (k, c) in field.components().iter().enumerate() {
            assert!(c.divisible_by_var(k), "{space} component {k}");
        }
        assert!(field.components().iter().all(|c| c.is_homogeneous()));
    }
}

fn rationals(x: &[f64]) -> Vec<Rational> {
    x.iter().map(|v| Rational::from_float(*v).unwrap()).collect()
}

fn to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(flagricci_core::poly::to_f64).collect()
}
