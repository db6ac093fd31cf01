use proptest::prelude::*;

use koehler_core::cyclotomic::CycNum;
use koehler_core::grouprep::{self, check_equivalences, closure, linear_characters, table_group, MatrixGroup, SubgroupChar};
use koehler_core::quadfield::QuadField;

fn cyc(order: u64) -> impl Strategy<Value = CycNum> {
    proptest::collection::vec(-5i64..5, order as usize).prop_map(move |c| CycNum::from_poly(order, c))
}

fn triple_of(order: u64) -> impl Strategy<Value = (CycNum, CycNum, CycNum)> {
    (cyc(order), cyc(order), cyc(order))
}

proptest! {
    #[test]
    fn cyclotomic_ring_axioms((n, (a, b, c)) in (1u64..25).prop_flat_map(|n| (Just(n), triple_of(n)))) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &CycNum::one(n), a.clone());
        prop_assert!((&a - &a).is_zero());
        let m = 2 * n;
        prop_assert_eq!(&a.lift(m) * &b.lift(m), (&a * &b).lift(m));
        prop_assert_eq!(a.conj().conj(), a.clone());
    }

    #[test]
    fn roots_of_unity_are_recognised(n in 1u64..40, k in 0i64..80) {
        let z = CycNum::root(n, k);
        let (m, e) = z.root_exponent().unwrap();
        prop_assert_eq!(CycNum::root(m, e as i64), z.clone());
        prop_assert!(z.pow(n).is_one());
    }

    #[test]
    fn ideal_norms_are_multiplicative(di in 0usize..8, n1 in 1u64..40, n2 in 1u64..40, s1 in any::<usize>(), s2 in any::<usize>()) {
        let d = [-4, -3, -20, -23, 5, 12, 13, -39][di];
        let k = QuadField::from_disc(d).unwrap();
        let l1 = k.ideals_of_norm(n1);
        let l2 = k.ideals_of_norm(n2);
        prop_assume!(!l1.is_empty() && !l2.is_empty());
        let (i, j) = (l1[s1 % l1.len()], l2[s2 % l2.len()]);
        let p = k.ideal_mul(&i, &j);
        prop_assert_eq!(p.norm(), i.norm() * j.norm());
        prop_assert_eq!(k.ideal_mul(&i, &k.conj_ideal(&i)), k.int_ideal(i.norm()));
        let rebuilt = k.factor_ideal(&p).into_iter().fold(k.int_ideal(1), |acc, (q, e)| k.ideal_mul(&acc, &k.ideal_pow(&q, e)));
        prop_assert_eq!(rebuilt, p);
        prop_assert!(k.divides(&i, &p) && k.divides(&j, &p));
    }
}

/// Small groups: table rows, their subgroups and dihedral groups.
fn random_group(kind: u8, a: usize, b: usize) -> MatrixGroup {
    let rows = [(1, 1, 1), (2, 2, 1), (3, 1, 1), (4, 2, 1), (5, 2, 1), (6, 3, 1), (1, 1, 3), (4, 3, 3)];
    match kind % 3 {
        0 => grouprep::dihedral(3 + (a % 10) as u64).unwrap(),
        1 => table_group(rows[a % rows.len()].0, rows[a % rows.len()].1, rows[a % rows.len()].2).unwrap().group,
        _ => {
            let (line, r, m) = rows[a % rows.len()];
            let g = table_group(line, r, m).unwrap().group;
            let x = g.element(b % g.len()).clone();
            let y = g.element((b / 7 + 1) % g.len()).clone();
            closure(&[x, y]).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn induction_statements_agree(kind in 0u8..3, a in 0usize..64, b in 0usize..4096, h in any::<usize>(), c in any::<usize>()) {
        let g = random_group(kind, a, b);
        let subs = g.index_two_subgroups();
        prop_assume!(!subs.is_empty());
        let sub = subs[h % subs.len()].clone();
        let chars = linear_characters(&g, &sub);
        let values = chars[c % chars.len()].clone();
        let chi = SubgroupChar::new(&g, sub, values).unwrap();
        let eq = check_equivalences(&g, &chi).unwrap();
        prop_assert!(eq.all_equal(), "{:?} on a group of order {}", eq, g.len());
        // ⟨tr ρ, tr ρ⟩ = 1 exactly for irreducible ρ
        let rho = grouprep::induce(&g, &chi).unwrap();
        let norm: f64 = rho.iter().map(|m| {
            let (x, y) = m.trace().to_complex();
            x * x + y * y
        }).sum::<f64>() / g.len() as f64;
        prop_assert_eq!((norm - 1.0).abs() < 1e-6, grouprep::is_irreducible(&g, &chi));
        prop_assert!((norm - 1.0).abs() < 1e-6 || (norm - 2.0).abs() < 1e-6);
    }
}
