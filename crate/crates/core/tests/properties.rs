mod common;

use std::sync::{Arc, OnceLock};

use mosob::analysis::{luxemburg_norm, riesz_potential, Domain, Grid, GridFunction};
use mosob::sobolev::{check_concavity, SobolevConjugate};
use mosob::verify::builtin_families;
use mosob::{Gyf, YoungFn};
use proptest::prelude::*;

type Family = (String, Arc<dyn YoungFn>);

fn families() -> &'static Vec<Family> {
    static F: OnceLock<Vec<Family>> = OnceLock::new();
    F.get_or_init(|| builtin_families(2).unwrap())
}

fn square(m: usize) -> Arc<Grid> {
    static G: OnceLock<Arc<Grid>> = OnceLock::new();
    assert_eq!(m, 6);
    G.get_or_init(|| Arc::new(Grid::tensor(&Domain::cube(2, -1.0, 1.0).unwrap(), m).unwrap())).clone()
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 2)
}

fn log_t() -> impl Strategy<Value = f64> {
    (-4.0f64..4.0).prop_map(|e| 10f64.powf(e))
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

fn add(u: &GridFunction, v: &GridFunction) -> GridFunction {
    GridFunction::new(u.grid.clone(), u.values.iter().zip(&v.values).map(|(a, b)| a + b).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn young_functions_are_convex(f in 0usize..7, x in point(), s in log_t(), t in log_t(), l in 0.0f64..1.0) {
        let (name, phi) = &families()[f];
        let v = common::convexity(name, phi.as_ref(), &x, s, t, l);
        prop_assert!(v.is_none(), "{v:?}");
    }

    #[test]
    fn fenchel_young_holds(f in 0usize..7, x in point(), s in log_t(), t in log_t()) {
        let (name, phi) = &families()[f];
        let v = common::fenchel_young(name, phi.as_ref(), &x, s, t);
        prop_assert!(v.is_none(), "{v:?}");
    }

    #[test]
    fn inverse_sandwich_holds(f in 0usize..7, x in point(), t in log_t()) {
        let (name, phi) = &families()[f];
        let v = common::inverse_sandwich(name, phi.clone(), &x, t);
        prop_assert!(v.is_none(), "{v:?}");
    }

    #[test]
    fn luxemburg_norm_is_homogeneous(f in 0usize..7, u in values(36), c in -5.0f64..5.0) {
        let phi = &families()[f].1;
        let u = GridFunction::new(square(6), u).unwrap();
        let a = luxemburg_norm(phi.as_ref(), &u.scale(c)).unwrap();
        let b = c.abs() * luxemburg_norm(phi.as_ref(), &u).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn luxemburg_norm_is_subadditive(f in 0usize..7, u in values(36), v in values(36)) {
        let phi = &families()[f].1;
        let (u, v) = (GridFunction::new(square(6), u).unwrap(), GridFunction::new(square(6), v).unwrap());
        let lhs = luxemburg_norm(phi.as_ref(), &add(&u, &v)).unwrap();
        let rhs = luxemburg_norm(phi.as_ref(), &u).unwrap() + luxemburg_norm(phi.as_ref(), &v).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10), "{lhs} > {rhs}");
    }

    #[test]
    fn riesz_is_linear(u in values(36), v in values(36), a in -2.0f64..2.0, alpha in 0.2f64..1.8) {
        let g = square(6);
        let (u, v) = (GridFunction::new(g.clone(), u).unwrap(), GridFunction::new(g.clone(), v).unwrap());
        let lhs = riesz_potential(&add(&u.scale(a), &v), alpha, g.clone()).unwrap();
        let iu = riesz_potential(&u, alpha, g.clone()).unwrap();
        let iv = riesz_potential(&v, alpha, g).unwrap();
        let scale = iu.max_abs().max(iv.max_abs()).max(1e-300);
        for i in 0..lhs.values.len() {
            let rhs = a * iu.values[i] + iv.values[i];
            prop_assert!((lhs.values[i] - rhs).abs() <= 1e-11 * scale * (1.0 + a.abs()));
        }
    }

    #[test]
    fn riesz_is_monotone(u in prop::collection::vec(0.0f64..3.0, 36), d in prop::collection::vec(0.0f64..1.0, 36), alpha in 0.2f64..1.8) {
        let g = square(6);
        let v: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + b).collect();
        let iu = riesz_potential(&GridFunction::new(g.clone(), u).unwrap(), alpha, g.clone()).unwrap();
        let iv = riesz_potential(&GridFunction::new(g.clone(), v).unwrap(), alpha, g).unwrap();
        for (a, b) in iu.values.iter().zip(&iv.values) {
            prop_assert!(*a <= *b * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn h_transform_is_concave_for_powers(p in 1.0f64..1.95, lo in -4.0f64..0.0) {
        let sc = SobolevConjugate::new(Arc::new(Gyf::power(2, p)), 1.0).unwrap();
        let ts: Vec<f64> = (0..12).map(|k| 10f64.powf(lo + 0.5 * k as f64)).collect();
        let rep = check_concavity(&sc, &[vec![0.0, 0.0]], &ts, 1e-8).unwrap();
        prop_assert!(rep.pass, "{}", rep.to_json());
    }
}
