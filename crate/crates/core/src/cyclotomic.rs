//! Exact arithmetic in the cyclotomic rings ℤ[ζ_N].
//!
//! A [`CycNum`] stores the residue of a polynomial in ζ modulo the N-th
//! cyclotomic polynomial, in the power basis `1, ζ, …, ζ^{φ(N)-1}`. Two values
//! of the same order are equal iff their coefficient vectors agree; values of
//! different orders are compared after lifting both to the lcm of the orders.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, lcm};

fn poly_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (constant term first) of the N-th cyclotomic polynomial,
/// obtained by dividing X^N - 1 by Φ_d for every proper divisor d of N.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic order must be positive");
    if let Some(p) = poly_cache().read().unwrap().get(&n) {
        return Arc::clone(p);
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_poly(d);
        num = div_monic(&num, &phi_d);
    }
    let p = Arc::new(num);
    poly_cache().write().unwrap().insert(n, Arc::clone(&p));
    p
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    q
}

/// Reduces a polynomial of arbitrary degree modulo Φ_N.
fn reduce_poly(mut p: Vec<i64>, n: u64) -> Vec<i64> {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    if p.len() <= deg {
        p.resize(deg, 0);
        return p;
    }
    for i in (deg..p.len()).rev() {
        let c = p[i];
        if c != 0 {
            let base = i - deg;
            for (j, &pj) in phi[..deg].iter().enumerate() {
                p[base + j] -= c * pj;
            }
            p[i] = 0;
        }
    }
    p.truncate(deg);
    p
}

/// A root of unity exp(2πi·p) recorded by its phase p ∈ ℚ/ℤ.
pub type Phase = Ratio<i64>;

/// Reduces a phase into [0, 1).
pub fn phase_mod1(p: Phase) -> Phase {
    Ratio::new(p.numer().rem_euclid(*p.denom()), *p.denom())
}

/// exp(2πi·p) in ℤ[ζ_order]; the denominator of p must divide `order`.
pub fn phase_to_cyc(p: Phase, order: u64) -> CycNum {
    let d = *p.denom() as u64;
    assert_eq!(order % d, 0, "phase denominator {d} does not divide {order}");
    CycNum::root(order, p.numer() * (order / d) as i64)
}

/// An element of ℤ[ζ_N] in canonical form.
#[derive(Clone, Serialize, Deserialize)]
pub struct CycNum {
    order: u64,
    coeffs: Vec<i64>,
}

/// Result of [`CycNum::root_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootOrder {
    Finite(u64),
    NotRootOfUnity,
}

impl CycNum {
    /// Builds a value from a canonical coefficient vector.
    pub fn from_coeffs(order: u64, coeffs: Vec<i64>) -> Self {
        let deg = cyclotomic_poly(order).len() - 1;
        assert_eq!(coeffs.len(), deg, "coefficient vector must have length φ(N)");
        CycNum { order, coeffs }
    }

    /// Reduces an arbitrary polynomial in ζ_N.
    pub fn from_poly(order: u64, poly: Vec<i64>) -> Self {
        CycNum { order, coeffs: reduce_poly(poly, order) }
    }

    pub fn from_int(order: u64, c: i64) -> Self {
        let mut v = vec![0; cyclotomic_poly(order).len() - 1];
        v[0] = c;
        CycNum { order, coeffs: v }
    }

    pub fn zero(order: u64) -> Self {
        Self::from_int(order, 0)
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    /// ζ_N^k.
    pub fn root(order: u64, k: i64) -> Self {
        assert!(order >= 1);
        let e = k.rem_euclid(order as i64) as usize;
        let mut p = vec![0i64; e + 1];
        p[e] = 1;
        Self::from_poly(order, p)
    }

    /// Σ ζ_N^{k} over the given exponents.
    pub fn root_sum(order: u64, exps: &[i64]) -> Self {
        let mut p = vec![0i64; order as usize];
        for &k in exps {
            p[k.rem_euclid(order as i64) as usize] += 1;
        }
        Self::from_poly(order, p)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// The rational integer this value equals, if any.
    pub fn as_int(&self) -> Option<i64> {
        let r = self.reduce_order();
        (r.order == 1 || r.order == 2).then(|| r.coeffs[0])
    }

    /// Re-embeds into ℤ[ζ_M] for a multiple M of the current order.
    pub fn lift(&self, target: u64) -> Self {
        assert!(target.is_multiple_of(self.order), "lift target {target} not a multiple of {}", self.order);
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut p = vec![0i64; target as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            p[i * step] += c;
        }
        Self::from_poly(target, p)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let m = lcm(a.order, b.order);
        (a.lift(m), b.lift(m))
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut p = vec![0i64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            p[(n - i) % n] += c;
        }
        Self::from_poly(self.order, p)
    }

    /// Galois automorphism ζ ↦ ζ^u for u coprime to the order.
    pub fn galois(&self, u: i64) -> Self {
        let n = self.order as i64;
        let mut p = vec![0i64; n as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            p[(i as i64 * u).rem_euclid(n) as usize] += c;
        }
        Self::from_poly(self.order, p)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: i64) -> Self {
        CycNum { order: self.order, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Least q ≥ 1 with self^q = 1. Roots of unity in ℚ(ζ_N) all have order
    /// dividing lcm(2, N), so a finite scan decides the question.
    pub fn root_order(&self) -> RootOrder {
        let m = lcm(2, self.order);
        let lifted = self.lift(m);
        for k in 0..m {
            if CycNum::root(m, k as i64).coeffs == lifted.coeffs {
                return RootOrder::Finite(m / num_integer::gcd(k, m));
            }
        }
        RootOrder::NotRootOfUnity
    }

    /// If self is a root of unity, the exponent k with self = ζ_M^k, M = lcm(2, N).
    pub fn root_exponent(&self) -> Option<(u64, u64)> {
        let m = lcm(2, self.order);
        let lifted = self.lift(m);
        (0..m).find(|&k| CycNum::root(m, k as i64).coeffs == lifted.coeffs).map(|k| (m, k))
    }

    /// The phase of a root of unity.
    pub fn phase(&self) -> Option<Phase> {
        self.root_exponent().map(|(m, k)| Ratio::new(k as i64, m as i64))
    }

    /// Smallest order N' | N such that this value lies in ℤ[ζ_{N'}], with
    /// the corresponding canonical coefficients.
    pub fn reduce_order(&self) -> Self {
        for d in divisors(self.order) {
            if d == self.order {
                break;
            }
            if let Some(v) = self.descend(d) {
                return v;
            }
        }
        self.clone()
    }

    /// Expresses self in ℤ[ζ_d] if possible (d | order).
    fn descend(&self, d: u64) -> Option<Self> {
        let phi_d = cyclotomic_poly(d).len() - 1;
        let rows = self.coeffs.len();
        // columns: images of ζ_d^j, j < φ(d); augmented with the target.
        let cols: Vec<Vec<i64>> = (0..phi_d)
            .map(|j| CycNum::root(d, j as i64).lift(self.order).coeffs)
            .collect();
        let mut m: Vec<Vec<Ratio<i128>>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Ratio<i128>> =
                    cols.iter().map(|c| Ratio::from_integer(c[r] as i128)).collect();
                row.push(Ratio::from_integer(self.coeffs[r] as i128));
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..phi_d {
            let Some(pr) = (prow..rows).find(|&r| m[r][col] != Ratio::from_integer(0)) else {
                continue;
            };
            m.swap(prow, pr);
            let inv = Ratio::from_integer(1) / m[prow][col];
            for x in m[prow].iter_mut() {
                *x *= inv;
            }
            for r in 0..rows {
                if r != prow && m[r][col] != Ratio::from_integer(0) {
                    let f = m[r][col];
                    for c in 0..=phi_d {
                        let sub = f * m[prow][c];
                        m[r][c] -= sub;
                    }
                }
            }
            pivots.push(col);
            prow += 1;
        }
        if m[prow..].iter().any(|row| row[phi_d] != Ratio::from_integer(0)) {
            return None;
        }
        let mut out = vec![0i64; phi_d];
        for (r, &col) in pivots.iter().enumerate() {
            let v = m[r][phi_d];
            if !v.is_integer() {
                return None;
            }
            out[col] = *v.numer() as i64;
        }
        Some(CycNum { order: d, coeffs: out })
    }

    /// Value under the embedding ζ ↦ exp(2πi/N); sanity checks only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.order as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, &c)| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n;
            (re + c as f64 * t.cos(), im + c as f64 * t.sin())
        })
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = CycNum::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNum {}

impl Hash for CycNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let r = self.reduce_order();
        r.order.hash(state);
        r.coeffs.hash(state);
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}*z{}", self.order),
                _ => format!("{c}*z{}^{i}", self.order),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        let (a, b) = CycNum::common(self, rhs);
        CycNum {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        &self + &rhs
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self + &(-rhs)
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        &self - &rhs
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        let (a, b) = CycNum::common(self, rhs);
        let mut p = vec![0i64; a.coeffs.len() + b.coeffs.len()];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        CycNum::from_poly(a.order, p)
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64, k: i64) -> CycNum {
        CycNum::root(n, k)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_poly(105).contains(&-2));
    }

    #[test]
    fn root_examples() {
        assert!(z(1, 0).is_one());
        assert_eq!(z(4, 2), CycNum::from_int(4, -1));
        assert_eq!(z(6, 1), -(&z(3, 1) * &z(3, 1)));
        assert_eq!(z(7, 9), z(7, 2));
        assert_eq!(z(5, -1), z(5, 4));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&z(3, 1) + &z(3, 2), CycNum::from_int(3, -1));
        assert_eq!(&z(4, 1) * &z(4, 1), CycNum::from_int(1, -1));
        let x = &z(12, 5) + &z(8, 3).scale(4);
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(z(4, 1).conj(), z(4, 3));
        assert_eq!(CycNum::from_int(7, -1).conj(), CycNum::from_int(7, -1));
        let real = &z(5, 1) + &z(5, 4);
        assert_eq!(real.conj(), real);
    }

    #[test]
    fn root_order_examples() {
        assert_eq!(CycNum::from_int(1, -1).root_order(), RootOrder::Finite(2));
        assert_eq!(z(8, 3).root_order(), RootOrder::Finite(8));
        assert_eq!(CycNum::from_int(1, 2).root_order(), RootOrder::NotRootOfUnity);
        assert_eq!((-z(3, 1)).root_order(), RootOrder::Finite(6));
        assert_eq!(CycNum::zero(4).root_order(), RootOrder::NotRootOfUnity);
    }

    #[test]
    fn reduce_order_finds_subfield() {
        // ζ_12^4 = ζ_3
        let r = z(12, 4).reduce_order();
        assert_eq!(r.order(), 3);
        assert_eq!(r, z(3, 1));
        // ζ_10 = -ζ_5^3 lives in order 5
        assert_eq!(z(10, 1).reduce_order().order(), 5);
        // √2 = ζ_8 + ζ_8^7 is not in any smaller cyclotomic field
        assert_eq!((&z(8, 1) + &z(8, 7)).reduce_order().order(), 8);
        // integers collapse to order 1
        assert_eq!(CycNum::from_int(9, 7).reduce_order().order(), 1);
    }

    #[test]
    fn lift_then_reduce_is_identity() {
        let x = &z(6, 1) + &z(6, 2).scale(3);
        let up = x.lift(24);
        assert_eq!(up.reduce_order(), x.reduce_order());
        assert_eq!(up, x);
    }
}
