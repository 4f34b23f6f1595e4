mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use saruma::poly::{FilterPoly, UnitPoint, DEFAULT_TOL};

use common::{convolve, horner, matched_distance, max_abs_diff};

fn poly(max_degree: usize, bound: f64) -> impl Strategy<Value = FilterPoly> {
    poly_between(0, max_degree, bound)
}

fn poly_between(
    min_degree: usize,
    max_degree: usize,
    bound: f64,
) -> impl Strategy<Value = FilterPoly> {
    prop::collection::vec(-bound..bound, min_degree..=max_degree).prop_filter_map(
        "nonzero lead",
        |tail| {
            let mut c = vec![1.0];
            c.extend(tail);
            let p = FilterPoly::new(c.clone()).ok()?;
            (p.degree() + 1 == c.len() && c.last().unwrap().abs() > 1e-3).then_some(p)
        },
    )
}

fn stationary_poly(max_degree: usize) -> impl Strategy<Value = FilterPoly> {
    prop::collection::vec(-0.9f64..0.9, 0..=max_degree)
        .prop_map(|b| saruma::pacf::levinson_forward(&b))
}

proptest! {
    #[test]
    fn mul_matches_convolution(p in poly(12, 5.0), q in poly(12, 5.0)) {
        let prod = p.mul(&q);
        prop_assert_eq!(prod.degree(), p.degree() + q.degree());
        prop_assert!(max_abs_diff(prod.coeffs(), &convolve(p.coeffs(), q.coeffs())) == 0.0);
    }

    #[test]
    fn divide_recovers_cofactor(p in poly(15, 5.0), q in poly(15, 5.0)) {
        let prod = p.mul(&q);
        let back = prod.divide_exact(&p, DEFAULT_TOL).unwrap();
        let scale = 1.0 + q.max_abs_coeff();
        prop_assert!(max_abs_diff(back.coeffs(), q.coeffs()) <= 1e-10 * scale,
            "err {}", max_abs_diff(back.coeffs(), q.coeffs()));
    }

    #[test]
    fn roots_of_product_are_union(p in poly_between(1, 6, 2.0), q in poly_between(1, 6, 2.0)) {
        let rp = p.roots().unwrap();
        let rq = q.roots().unwrap();
        let mut union: Vec<Complex64> = rp.roots().to_vec();
        union.extend_from_slice(rq.roots());
        // Clustered roots are ill-conditioned by nature; only well-separated sets are compared.
        let separation = union.iter().enumerate()
            .flat_map(|(i, a)| union[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        prop_assume!(separation > 1e-3);
        let rpq = p.mul(&q).roots().unwrap();
        prop_assert!(matched_distance(rpq.roots(), &union) <= 1e-8 * (1.0 + rpq.max_modulus()),
            "distance {}", matched_distance(rpq.roots(), &union));
    }

    #[test]
    fn roots_are_conjugate_closed(p in poly_between(1, 12, 3.0)) {
        let r = p.roots().unwrap();
        prop_assert_eq!(r.len(), p.degree());
        prop_assert!(r.is_conjugate_closed(1e-6 * (1.0 + r.max_modulus())));
        for z in r.roots() {
            prop_assert!(horner(p.coeffs(), *z).norm() <= 1e-7 * (1.0 + p.max_abs_coeff()) * (1.0 + z.norm()).powi(p.degree() as i32));
        }
    }

    #[test]
    fn unit_multiplicity_matches_root_count(a in 0usize..=2, b in 0usize..=2, s in stationary_poly(5)) {
        let mut p = s.clone();
        for _ in 0..a { p = p.mul(&FilterPoly::new(vec![1.0, -1.0]).unwrap()); }
        for _ in 0..b { p = p.mul(&FilterPoly::new(vec![1.0, 1.0]).unwrap()); }
        prop_assume!(p.degree() >= 1);
        let roots = p.roots().unwrap();
        let near = |target: f64| roots.roots().iter().filter(|z| (**z - Complex64::new(target, 0.0)).norm() <= 1e-6).count();
        prop_assert_eq!(p.unit_multiplicity(UnitPoint::Plus, DEFAULT_TOL), a);
        prop_assert_eq!(p.unit_multiplicity(UnitPoint::Minus, DEFAULT_TOL), b);
        prop_assert_eq!(near(1.0), a);
        prop_assert_eq!(near(-1.0), b);
    }

    #[test]
    fn embedding_is_substitution(p in poly(8, 3.0), s in 1usize..6, re in -1.2f64..1.2, im in -1.2f64..1.2) {
        let z = Complex64::new(re, im);
        let lhs = p.embed_season(s).unwrap().eval(z);
        let rhs = p.eval(z.powu(s as u32));
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn json_round_trip(p in poly(10, 5.0)) {
        let text = serde_json::to_string(&p).unwrap();
        let back: FilterPoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}
