use std::collections::BTreeSet;

use koehler_core::cyclotomic::CycNum;
use koehler_core::par::Parallelism;
use koehler_core::quadfield::{QuadField, QuadIdeal, QuadInt};
use koehler_core::rayclass::{ray_class_group, Modulus};
use koehler_core::theta::{theta_fast, theta_oracle};

/// I ~ J in the narrow ray class group mod 𝔪 iff I·σJ = (γ) with
/// γ ≡ N(J) mod 𝔪 and γ totally positive.
fn equivalent(k: &QuadField, m: &QuadIdeal, i: &QuadIdeal, j: &QuadIdeal) -> bool {
    let prod = k.ideal_mul(i, &k.conj_ideal(j));
    let target = QuadInt::int(j.norm());
    k.principal_generator(&prod, Some((m, target)), Some([1, 1])).unwrap().is_some()
}

/// Ideals of norm n with norm prime to N(𝔪).
fn admissible(k: &QuadField, m: &QuadIdeal, n: u64) -> Vec<QuadIdeal> {
    if num_integer::gcd(n, m.norm() as u64) != 1 {
        return Vec::new();
    }
    k.ideals_of_norm(n)
}

/// One representative per class met by admissible ideals of norm ≤ b.
fn classes_up_to(k: &QuadField, m: &QuadIdeal, b: u64) -> Vec<QuadIdeal> {
    let mut reps: Vec<QuadIdeal> = Vec::new();
    for n in 1..=b {
        for i in admissible(k, m, n) {
            if !reps.iter().any(|r| equivalent(k, m, &i, r)) {
                reps.push(i);
            }
        }
    }
    reps
}

fn cases() -> Vec<(i64, QuadIdeal)> {
    let k = |d| QuadField::from_disc(d).unwrap();
    vec![
        (-4, k(-4).int_ideal(5)),
        (-4, k(-4).int_ideal(3)),
        (-3, k(-3).int_ideal(7)),
        (-3, k(-3).primes_above(13)[0]),
        (-20, k(-20).ideal_mul(&k(-20).primes_above(3)[0], &k(-20).int_ideal(2))),
        (-23, QuadIdeal::UNIT),
        (-39, QuadIdeal::UNIT),
        (5, k(5).int_ideal(4)),
        (12, QuadIdeal::UNIT),
        (13, k(13).int_ideal(3)),
    ]
}

#[test]
fn ray_class_orders_match_brute_force() {
    for (d, m) in cases() {
        let k = QuadField::from_disc(d).unwrap();
        let g = ray_class_group(&Modulus::new(k, m).unwrap()).unwrap();
        let mut b: u64 = 16;
        let mut reps = classes_up_to(&k, &m, b);
        while reps.len() as u64 != g.order() && b < 512 {
            b *= 2;
            reps = classes_up_to(&k, &m, b);
        }
        assert_eq!(reps.len() as u64, g.order(), "disc {d} modulus {m}");
        let vectors: BTreeSet<Vec<u64>> = reps.iter().map(|r| g.class_of(r).unwrap()).collect();
        assert_eq!(vectors.len(), reps.len(), "disc {d} modulus {m}: discrete logs collide");
        // every ideal sits in the class of the representative it is equivalent to
        for n in 1..=40 {
            for i in admissible(&k, &m, n) {
                let r = reps.iter().find(|r| equivalent(&k, &m, &i, r)).unwrap();
                assert_eq!(g.class_of(&i).unwrap(), g.class_of(r).unwrap());
            }
        }
    }
}

#[test]
fn ideals_of_norm_match_hermite_enumeration() {
    for d in [-4, -3, -20, -23, 5, 12, 13, -39, 40] {
        let k = QuadField::from_disc(d).unwrap();
        for n in 1..=60i64 {
            let mut brute = BTreeSet::new();
            for c in 1..=n {
                if n % c != 0 {
                    continue;
                }
                let a = n / c;
                if a % c != 0 {
                    continue;
                }
                for b in (0..a).step_by(c as usize) {
                    if let Ok(i) = k.ideal(a, b, c) {
                        brute.insert(i);
                    }
                }
            }
            let fast: BTreeSet<QuadIdeal> = k.ideals_of_norm(n as u64).into_iter().collect();
            assert_eq!(fast, brute, "disc {d} norm {n}");
        }
    }
}

#[test]
fn engines_agree_on_every_character_of_small_groups() {
    for (d, m) in cases() {
        let k = QuadField::from_disc(d).unwrap();
        let g = ray_class_group(&Modulus::new(k, m).unwrap()).unwrap();
        for xi in g.characters().into_iter().take(12) {
            let a = theta_oracle(&xi, 150).unwrap();
            let b = theta_fast(&xi, 150, Parallelism::Sequential).unwrap();
            assert_eq!(a.coeffs, b.coeffs, "disc {d} modulus {m} index {}", xi.index());
            assert_eq!(a.a(1), &CycNum::one(1));
        }
    }
}
