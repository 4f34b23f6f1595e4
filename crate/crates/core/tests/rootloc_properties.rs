use proptest::prelude::*;
use saruma::pacf::levinson_forward;
use saruma::poly::FilterPoly;
use saruma::rootloc::{count_inside, count_inside_poly, is_stable, stability, Stability};

fn off_circle_poly() -> impl Strategy<Value = (FilterPoly, usize)> {
    prop::collection::vec(-3.0f64..3.0, 1..=10).prop_filter_map("roots near circle", |tail| {
        let mut c = vec![1.0];
        c.extend(tail);
        let p = FilterPoly::new(c).ok()?;
        if p.degree() == 0 {
            return None;
        }
        let roots = p.roots().ok()?;
        if roots.moduli().any(|m| (m - 1.0).abs() < 1e-3) {
            return None;
        }
        Some((p, roots.count_inside()))
    })
}

proptest! {
    #[test]
    fn count_matches_companion_oracle((p, inside) in off_circle_poly()) {
        let report = count_inside_poly(&p).unwrap();
        prop_assert_eq!(report.nu_inside, inside);
        prop_assert_eq!(report.nu_inside + report.n_outside, p.degree());
        prop_assert_eq!(report.nu_inside == 0, is_stable(&p));
    }

    #[test]
    fn q_sequence_is_running_product(b in prop::collection::vec(-2.5f64..2.5, 1..12)) {
        prop_assume!(b.iter().all(|x| (x.abs() - 1.0).abs() > 1e-6));
        let r = count_inside(&b).unwrap();
        let mut q = 1.0;
        for (k, x) in b.iter().rev().enumerate() {
            q *= 1.0 - x * x;
            prop_assert_eq!(r.q_sequence[k], q);
        }
    }

    #[test]
    fn generated_from_unit_cube_is_stable(b in prop::collection::vec(-0.99f64..0.99, 1..15)) {
        let p = levinson_forward(&b);
        prop_assume!(p.degree() >= 1);
        prop_assert_eq!(stability(&p), Stability::Stable);
    }

    #[test]
    fn unit_terminated_is_on_circle(b in prop::collection::vec(-0.9f64..0.9, 0..10), s in prop_oneof![Just(1.0), Just(-1.0)]) {
        let mut v = b;
        v.push(s);
        let n = v.len();
        let verdict = stability(&levinson_forward(&v));
        prop_assert_eq!(verdict, Stability::OnCircle { index: n });
    }
}
