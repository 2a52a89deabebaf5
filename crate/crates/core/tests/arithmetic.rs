use cuboid_core::modint::{
    complete_row_to_sl2, crt_combine, crt_split, factorize, lift_coprime_pair, lift_sl2, ResidueRow,
};
use cuboid_core::psl2::{decompose_su, Psl2Elt};
use proptest::prelude::*;

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Random element of PSL_2(Z) as a product of S and T powers.
fn element() -> impl Strategy<Value = Psl2Elt> {
    proptest::collection::vec(-6i64..=6, 0..8).prop_map(|qs| {
        qs.iter().fold(Psl2Elt::identity(), |acc, &q| {
            acc.mul(&Psl2Elt::t().pow(q)).mul(&Psl2Elt::s())
        })
    })
}

proptest! {
    #[test]
    fn crt_round_trip(n in 1u64..400, a in 0i128..400, b in 0i128..400) {
        prop_assume!(gcd(gcd(a, b), n as i128) == 1);
        let row = ResidueRow::new(n, a, b).unwrap();
        let parts = crt_split(&row, &factorize(n).unwrap()).unwrap();
        prop_assert_eq!(crt_combine(&parts).unwrap(), row);
    }

    #[test]
    fn row_completion(n in 2u64..300, a in 0i128..300, b in 0i128..300) {
        prop_assume!(gcd(gcd(a, b), n as i128) == 1);
        let row = ResidueRow::new(n, a, b).unwrap();
        let [[x, y], [c, d]] = complete_row_to_sl2(&row).unwrap();
        prop_assert_eq!((c, d), (row.a, row.b));
        let det = (x as i128 * d as i128 - y as i128 * c as i128).rem_euclid(n as i128);
        prop_assert_eq!(det, 1);
    }

    #[test]
    fn coprime_lift(n in 1u64..500, c in 0u64..500, d in 0u64..500) {
        let (c, d) = (c % n, d % n);
        prop_assume!(gcd(gcd(c as i128, d as i128), n as i128) == 1);
        let (c2, d2) = lift_coprime_pair(c, d, n).unwrap();
        prop_assert_eq!(gcd(c2, d2), 1);
        prop_assert_eq!((c2.rem_euclid(n as i128), d2.rem_euclid(n as i128)), (c as i128, d as i128));
    }

    #[test]
    fn sl2_lift(g in element(), n in 2u64..60) {
        let m = g.mod_n(n);
        let l = lift_sl2(m, n).unwrap();
        prop_assert_eq!(l[0][0] * l[1][1] - l[0][1] * l[1][0], 1);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert_eq!(l[i][j].rem_euclid(n as i128) as u64, m[i][j]);
            }
        }
    }

    #[test]
    fn su_words_evaluate_back(g in element()) {
        let w = decompose_su(&g);
        prop_assert!(w.is_reduced());
        prop_assert_eq!(w.evaluate(), g);
    }

    #[test]
    fn group_laws(g in element(), h in element()) {
        prop_assert!(g.mul(&g.inv()).is_identity());
        prop_assert_eq!(g.mul(&h).inv(), h.inv().mul(&g.inv()));
        let parsed: Psl2Elt = g.to_string().parse().unwrap();
        prop_assert_eq!(parsed, g);
    }
}

#[test]
fn malformed_matrices_are_rejected() {
    assert!("1,2,3".parse::<Psl2Elt>().is_err());
    assert!("1,1,1,1".parse::<Psl2Elt>().is_err());
    assert!("a,b,c,d".parse::<Psl2Elt>().is_err());
}
