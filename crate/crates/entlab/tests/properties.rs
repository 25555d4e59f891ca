//! Generative invariants of the geometry and the scalar entropy functions,
//! plus the deterministic lemma suites.

use entlab::entropy::{eval_h, eval_h0, renyi_scalar, schatten_quasinorm};
use entlab::lattice::{
    boundary, cube_region, dist_inf, half_cut, set_distance, LatticeSpec, Region,
};
use entlab::verify;
use ndarray::Array2;
use proptest::prelude::*;

fn arb_spec() -> impl Strategy<Value = LatticeSpec> {
    (1usize..=3).prop_flat_map(|d| {
        let m_max = match d {
            1 => 10i64,
            2 => 3,
            _ => 1,
        };
        (Just(d), 1..=m_max).prop_map(|(d, m)| LatticeSpec::new(d, m).unwrap())
    })
}

proptest! {
    #[test]
    fn flat_index_bijection(spec in arb_spec()) {
        for i in 0..spec.site_count() {
            prop_assert_eq!(spec.flatten(spec.unflatten(i)), Some(i));
        }
    }

    #[test]
    fn boundary_sites_touch_outside(spec in arb_spec(), m_frac in 0.0f64..1.0) {
        let m = (m_frac * spec.half_width as f64) as i64;
        let region = cube_region(spec, m).unwrap();
        let b = boundary(&region);
        // boundary is a subset of the region and every boundary site has a
        // unit step leaving it (out-of-box counts as outside)
        for &idx in b.sites() {
            prop_assert!(region.contains(idx));
            let nbrs = spec.neighbors(idx);
            let leaves = nbrs.len() < 2 * spec.dimension
                || nbrs.iter().any(|&j| !region.contains(j));
            prop_assert!(leaves);
        }
    }

    #[test]
    fn max_norm_triangle_inequality(
        a in -8i64..=8, b in -8i64..=8, c in -8i64..=8,
        d in -8i64..=8, e in -8i64..=8, f in -8i64..=8,
    ) {
        let x = [a, b, 0];
        let y = [c, d, 0];
        let z = [e, f, 0];
        prop_assert!(dist_inf(x, z) <= dist_inf(x, y) + dist_inf(y, z));
        prop_assert_eq!(dist_inf(x, y), dist_inf(y, x));
    }

    #[test]
    fn half_cut_partitions_the_box(spec in arb_spec(), axis_pick in 0usize..3, k_frac in -1.0f64..1.0) {
        let axis = 1 + axis_pick % spec.dimension;
        let k = (k_frac * spec.half_width as f64) as i64;
        let plus = half_cut(spec, axis, k, 1).unwrap();
        let minus = half_cut(spec, axis, k - 1, -1).unwrap();
        prop_assert_eq!(plus.len() + minus.len(), spec.site_count());
        prop_assert_eq!(plus.intersection(&minus).unwrap().len(), 0);
        prop_assert_eq!(plus.union(&minus).unwrap().len(), spec.site_count());
    }

    #[test]
    fn complement_is_involutive(spec in arb_spec(), seed in 0u64..1000) {
        let sites: Vec<usize> = (0..spec.site_count())
            .filter(|&i| (i as u64).wrapping_mul(2654435761).wrapping_add(seed) % 3 == 0)
            .collect();
        let r = Region::from_sites(spec, sites).unwrap();
        prop_assert_eq!(r.complement().complement(), r.clone());
        prop_assert_eq!(r.len() + r.complement().len(), spec.site_count());
    }

    #[test]
    fn singleton_distance_is_the_metric(spec in arb_spec(), i in 0usize..100, j in 0usize..100) {
        let n = spec.site_count();
        let (i, j) = (i % n, j % n);
        let a = Region::from_sites(spec, vec![i]).unwrap();
        let b = Region::from_sites(spec, vec![j]).unwrap();
        let d = set_distance(&a, &b).unwrap();
        prop_assert_eq!(d, dist_inf(spec.unflatten(i), spec.unflatten(j)));
        prop_assert_eq!(d == 0, i == j);
    }

    #[test]
    fn h_is_h0_of_t_one_minus_t(t in 0.0f64..=1.0) {
        let lhs = eval_h(t).unwrap();
        let rhs = eval_h0(t * (1.0 - t)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn renyi_integrand_nonnegative(t in 0.0f64..=1.0, alpha in 0.05f64..4.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let v = renyi_scalar(t, alpha).unwrap();
        prop_assert!(v >= -1e-12);
        // symmetric under t -> 1-t
        let w = renyi_scalar(1.0 - t, alpha).unwrap();
        prop_assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn schatten_triangle_inequality(seed in 0u64..500, n in 2usize..8, alpha in 0.2f64..=1.0) {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g1 = Array2::from_shape_fn((n, n), |_| next());
        let g2 = Array2::from_shape_fn((n, n), |_| next());
        let a = g1.dot(&g1.t());
        let b = g2.dot(&g2.t());
        let lhs = schatten_quasinorm(&(&a + &b), alpha).unwrap().powf(alpha);
        let rhs = schatten_quasinorm(&a, alpha).unwrap().powf(alpha)
            + schatten_quasinorm(&b, alpha).unwrap().powf(alpha);
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn region_serialization_round_trips(spec in arb_spec(), seed in 0u64..1000) {
        let sites: Vec<usize> = (0..spec.site_count())
            .filter(|&i| (i as u64).wrapping_mul(0x9E3779B9).wrapping_add(seed) % 2 == 0)
            .collect();
        let r = Region::from_sites(spec, sites).unwrap();
        let js = serde_json::to_string(&r).unwrap();
        let back: Region = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, r);
    }
}

#[test]
fn deterministic_lemma_suites_pass() {
    let checks = verify::properties_suite(None).unwrap();
    for c in &checks {
        assert!(c.passed, "{} failed: {}", c.name, c.detail);
    }
}
