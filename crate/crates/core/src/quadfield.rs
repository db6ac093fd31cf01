//! Quadratic fields ℚ(√D): integers x + yω with ω = (D + √D)/2, ideals in
//! Hermite normal form, prime splitting, units and generator search.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{
    exact_sqrt, factor, is_fundamental_discriminant, isqrt, kronecker_prime, mod_inv,
    primes_up_to, sqrt_mod_prime, squarefree_core,
};
use crate::error::{Error, Result};

/// Largest |D| accepted.
pub const MAX_ABS_DISC: i64 = 10_000;
/// Largest ideal norm accepted by searches.
pub const MAX_NORM: i64 = 1_000_000;

/// A quadratic field given by its fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadField {
    disc: i64,
}

/// The integer x + yω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadInt {
    pub x: i64,
    pub y: i64,
}

impl QuadInt {
    pub const fn new(x: i64, y: i64) -> Self {
        QuadInt { x, y }
    }

    pub const fn int(x: i64) -> Self {
        QuadInt { x, y: 0 }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x, self.y) {
            (x, 0) => write!(f, "{x}"),
            (0, 1) => write!(f, "w"),
            (0, y) => write!(f, "{y}*w"),
            (x, 1) => write!(f, "{x}+w"),
            (x, -1) => write!(f, "{x}-w"),
            (x, y) if y < 0 => write!(f, "{x}-{}*w", -y),
            (x, y) => write!(f, "{x}+{y}*w"),
        }
    }
}

/// The ℤ-module ℤ·a + ℤ·(b + cω) in Hermite normal form: a, c > 0,
/// 0 ≤ b < a, and c divides both a and b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i64; 3]", try_from = "[i64; 3]")]
pub struct QuadIdeal {
    a: i64,
    b: i64,
    c: i64,
}

impl From<QuadIdeal> for [i64; 3] {
    fn from(i: QuadIdeal) -> Self {
        [i.a, i.b, i.c]
    }
}

impl TryFrom<[i64; 3]> for QuadIdeal {
    type Error = String;
    fn try_from(v: [i64; 3]) -> std::result::Result<Self, String> {
        let [a, b, c] = v;
        if a <= 0 || c <= 0 || b < 0 || b >= a || a % c != 0 || b % c != 0 {
            return Err(format!("[{a}, {b}, {c}] is not in normal form"));
        }
        Ok(QuadIdeal { a, b, c })
    }
}

impl QuadIdeal {
    pub const UNIT: QuadIdeal = QuadIdeal { a: 1, b: 0, c: 1 };

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn norm(&self) -> i64 {
        self.a * self.c
    }

    pub fn is_unit(&self) -> bool {
        *self == Self::UNIT
    }

    /// Whether x + yω lies in the lattice.
    pub fn contains(&self, v: QuadInt) -> bool {
        if v.y % self.c != 0 {
            return false;
        }
        let k = v.y / self.c;
        (v.x as i128 - k as i128 * self.b as i128) % self.a as i128 == 0
    }

    /// Smallest positive rational integer in the ideal.
    pub fn min_int(&self) -> i64 {
        self.a
    }
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// Decomposition of a rational prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitType {
    Split(QuadIdeal, QuadIdeal),
    Inert(QuadIdeal),
    Ramified(QuadIdeal),
}

/// Hermite normal form of the lattice spanned by `vecs`; `None` if the span
/// is not of full rank.
pub fn lattice_hnf(vecs: &[(i128, i128)]) -> Option<(i128, i128, i128)> {
    let mut pivot: Option<(i128, i128)> = None;
    let mut a: i128 = 0;
    for &(x, y) in vecs {
        if y == 0 {
            a = a.gcd(&x);
            continue;
        }
        match pivot {
            None => pivot = Some((x, y)),
            Some((px, py)) => {
                let g = py.extended_gcd(&y);
                let (s, t) = (g.x, g.y);
                let new = (s * px + t * x, s * py + t * y);
                // combination with y = 0
                let zx = (y / g.gcd) * px - (py / g.gcd) * x;
                a = a.gcd(&zx);
                pivot = Some(new);
            }
        }
    }
    let (mut px, mut py) = pivot?;
    if a == 0 {
        return None;
    }
    if py < 0 {
        px = -px;
        py = -py;
    }
    let a = a.abs();
    Some((a, px.rem_euclid(a), py))
}

struct UnitData {
    /// fundamental unit (real) or generator of the torsion units (imaginary)
    generator: QuadInt,
    /// order of the torsion generator; 0 for the real fundamental unit
    torsion_order: u32,
    /// τ₁(ε) as a float, real fields only
    log_size: f64,
}

fn unit_cache() -> &'static RwLock<HashMap<i64, std::result::Result<(QuadInt, u32, f64), Error>>> {
    static CACHE: OnceLock<RwLock<HashMap<i64, std::result::Result<(QuadInt, u32, f64), Error>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

impl QuadField {
    /// The field ℚ(√d) for a nonsquare integer d.
    pub fn make(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(Error::input(format!("{d} does not define a quadratic field")));
        }
        let core = squarefree_core(d);
        if core == 1 {
            return Err(Error::input(format!("{d} is a square")));
        }
        let disc = if core.rem_euclid(4) == 1 { core } else { 4 * core };
        Self::from_disc(disc)
    }

    /// The field with fundamental discriminant `disc`.
    pub fn from_disc(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::input(format!("{disc} is not a fundamental discriminant")));
        }
        if disc.abs() > MAX_ABS_DISC {
            return Err(Error::bound(format!("|D| = {} exceeds {MAX_ABS_DISC}", disc.abs())));
        }
        Ok(QuadField { disc })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn is_real(&self) -> bool {
        self.disc > 0
    }

    /// N(ω) = D(D-1)/4.
    fn omega_norm(&self) -> i64 {
        self.disc * (self.disc - 1) / 4
    }

    pub fn omega(&self) -> QuadInt {
        QuadInt::new(0, 1)
    }

    pub fn mul(&self, u: QuadInt, v: QuadInt) -> QuadInt {
        let (x, y) = self.mul_wide((u.x as i128, u.y as i128), (v.x as i128, v.y as i128));
        QuadInt::new(
            i64::try_from(x).expect("quadratic integer overflow"),
            i64::try_from(y).expect("quadratic integer overflow"),
        )
    }

    fn mul_wide(&self, u: (i128, i128), v: (i128, i128)) -> (i128, i128) {
        // ω² = Dω - N(ω)
        let yy = u.1 * v.1;
        (
            u.0 * v.0 - yy * self.omega_norm() as i128,
            u.0 * v.1 + u.1 * v.0 + yy * self.disc as i128,
        )
    }

    pub fn add(&self, u: QuadInt, v: QuadInt) -> QuadInt {
        QuadInt::new(u.x + v.x, u.y + v.y)
    }

    pub fn conj(&self, u: QuadInt) -> QuadInt {
        QuadInt::new(u.x + u.y * self.disc, -u.y)
    }

    pub fn norm(&self, u: QuadInt) -> i64 {
        let (x, y) = (u.x as i128, u.y as i128);
        (x * x + self.disc as i128 * x * y + self.omega_norm() as i128 * y * y) as i64
    }

    pub fn trace(&self, u: QuadInt) -> i64 {
        2 * u.x + self.disc * u.y
    }

    /// Signs of the two real embeddings τ₁(ω) = (D+√D)/2, τ₂(ω) = (D-√D)/2.
    pub fn signs(&self, u: QuadInt) -> [i8; 2] {
        assert!(self.is_real(), "signs requested in an imaginary field");
        let s = 2 * u.x as i128 + self.disc as i128 * u.y as i128;
        let v = u.y as i128;
        [sign_surd(s, v, self.disc as i128), sign_surd(s, -v, self.disc as i128)]
    }

    /// Floating-point real embeddings, sanity checks only.
    pub fn embed(&self, u: QuadInt) -> [f64; 2] {
        let r = (self.disc as f64).sqrt();
        let base = u.x as f64 + u.y as f64 * self.disc as f64 / 2.0;
        [base + u.y as f64 * r / 2.0, base - u.y as f64 * r / 2.0]
    }

    // ---------------------------------------------------------------- ideals

    fn ideal_from_lattice(&self, vecs: &[(i128, i128)]) -> QuadIdeal {
        let (a, b, c) = lattice_hnf(vecs).expect("ideal lattice must have full rank");
        let id = QuadIdeal {
            a: i64::try_from(a).expect("ideal overflow"),
            b: i64::try_from(b).expect("ideal overflow"),
            c: i64::try_from(c).expect("ideal overflow"),
        };
        debug_assert!(self.is_ideal(&id), "lattice {id} is not an ideal");
        id
    }

    /// Validates a normal-form triple as an ideal of this field.
    pub fn ideal(&self, a: i64, b: i64, c: i64) -> Result<QuadIdeal> {
        let id = QuadIdeal::try_from([a, b, c]).map_err(Error::input)?;
        if !self.is_ideal(&id) {
            return Err(Error::input(format!("{id} is not an ideal of discriminant {}", self.disc)));
        }
        Ok(id)
    }

    /// Whether the lattice is closed under multiplication by ω.
    pub fn is_ideal(&self, i: &QuadIdeal) -> bool {
        let w = self.omega();
        i.contains(self.mul(QuadInt::int(i.a), w))
            && i.contains(self.mul(QuadInt::new(i.b, i.c), w))
    }

    /// The ideal generated by the given elements.
    pub fn ideal_from_elements(&self, gens: &[QuadInt]) -> QuadIdeal {
        let mut vecs = Vec::with_capacity(gens.len() * 2);
        for g in gens {
            let v = (g.x as i128, g.y as i128);
            vecs.push(v);
            vecs.push(self.mul_wide(v, (0, 1)));
        }
        self.ideal_from_lattice(&vecs)
    }

    pub fn principal(&self, g: QuadInt) -> QuadIdeal {
        assert!(g != QuadInt::int(0), "zero ideal");
        self.ideal_from_elements(&[g])
    }

    pub fn int_ideal(&self, n: i64) -> QuadIdeal {
        self.principal(QuadInt::int(n))
    }

    fn basis(i: &QuadIdeal) -> [(i128, i128); 2] {
        [(i.a as i128, 0), (i.b as i128, i.c as i128)]
    }

    pub fn ideal_mul(&self, i: &QuadIdeal, j: &QuadIdeal) -> QuadIdeal {
        if i.is_unit() {
            return *j;
        }
        if j.is_unit() {
            return *i;
        }
        let bi = Self::basis(i);
        let bj = Self::basis(j);
        let mut vecs = Vec::with_capacity(4);
        for u in bi {
            for v in bj {
                vecs.push(self.mul_wide(u, v));
            }
        }
        self.ideal_from_lattice(&vecs)
    }

    pub fn ideal_pow(&self, i: &QuadIdeal, e: u32) -> QuadIdeal {
        (0..e).fold(QuadIdeal::UNIT, |acc, _| self.ideal_mul(&acc, i))
    }

    pub fn conj_ideal(&self, i: &QuadIdeal) -> QuadIdeal {
        let (b, c) = (i.b as i128, i.c as i128);
        self.ideal_from_lattice(&[(i.a as i128, 0), (b + c * self.disc as i128, -c)])
    }

    /// I + J, the gcd of two ideals.
    pub fn ideal_sum(&self, i: &QuadIdeal, j: &QuadIdeal) -> QuadIdeal {
        let mut vecs = Self::basis(i).to_vec();
        vecs.extend(Self::basis(j));
        self.ideal_from_lattice(&vecs)
    }

    pub fn coprime(&self, i: &QuadIdeal, j: &QuadIdeal) -> bool {
        self.ideal_sum(i, j).is_unit()
    }

    /// Whether `d` divides `i` (i ⊆ d).
    pub fn divides(&self, d: &QuadIdeal, i: &QuadIdeal) -> bool {
        d.contains(QuadInt::int(i.a)) && d.contains(QuadInt::new(i.b, i.c))
    }

    /// Exact quotient i / d for d | i.
    pub fn ideal_div(&self, i: &QuadIdeal, d: &QuadIdeal) -> Result<QuadIdeal> {
        if !self.divides(d, i) {
            return Err(Error::internal(format!("{d} does not divide {i}")));
        }
        let prod = self.ideal_mul(i, &self.conj_ideal(d));
        let n = d.norm();
        let q = QuadIdeal::try_from([prod.a / n, prod.b / n, prod.c / n])
            .map_err(|e| Error::internal(format!("inexact ideal quotient: {e}")))?;
        Ok(q)
    }

    /// Whether x + yω is coprime to the ideal.
    pub fn element_coprime(&self, v: QuadInt, m: &QuadIdeal) -> bool {
        if v == QuadInt::int(0) {
            return m.is_unit();
        }
        self.coprime(&self.principal(v), m)
    }

    /// Canonical residue of v modulo m: 0 ≤ y < c, 0 ≤ x < a.
    pub fn reduce_mod(&self, v: QuadInt, m: &QuadIdeal) -> QuadInt {
        let q = v.y.div_euclid(m.c);
        let y = v.y - q * m.c;
        let x = (v.x as i128 - q as i128 * m.b as i128).rem_euclid(m.a as i128) as i64;
        QuadInt::new(x, y)
    }

    pub fn mul_mod(&self, u: QuadInt, v: QuadInt, m: &QuadIdeal) -> QuadInt {
        let (x, y) = self.mul_wide((u.x as i128, u.y as i128), (v.x as i128, v.y as i128));
        let q = y.div_euclid(m.c as i128);
        let yr = y - q * m.c as i128;
        let xr = (x - q * m.b as i128).rem_euclid(m.a as i128);
        QuadInt::new(xr as i64, yr as i64)
    }

    /// All residues modulo m in canonical form.
    pub fn residues(&self, m: &QuadIdeal) -> impl Iterator<Item = QuadInt> + '_ {
        let (a, c) = (m.a, m.c);
        (0..c).flat_map(move |y| (0..a).map(move |x| QuadInt::new(x, y)))
    }

    // ------------------------------------------------------------ primes

    pub fn kronecker(&self, p: u64) -> i32 {
        kronecker_prime(self.disc, p)
    }

    /// Roots of X² - DX + N(ω) modulo p.
    fn omega_roots_mod(&self, p: u64) -> Vec<i64> {
        let pi = p as i64;
        let d = self.disc.rem_euclid(pi) as i128;
        let n = self.omega_norm().rem_euclid(pi) as i128;
        if p == 2 {
            return (0..2)
                .filter(|&r| (r * r - d * r + n).rem_euclid(2) == 0)
                .map(|r| r as i64)
                .collect();
        }
        let Some(s) = sqrt_mod_prime(d, p) else {
            return Vec::new();
        };
        let inv2 = mod_inv(2, p as i128).unwrap();
        let mut roots: Vec<i64> = [(d + s) * inv2, (d - s) * inv2]
            .iter()
            .map(|r| r.rem_euclid(p as i128) as i64)
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    /// Decomposition of the rational prime p.
    pub fn split_prime(&self, p: u64) -> SplitType {
        let roots = self.omega_roots_mod(p);
        let pi = p as i64;
        let prime_above = |r: i64| QuadIdeal { a: pi, b: (-r).rem_euclid(pi), c: 1 };
        match roots.len() {
            0 => SplitType::Inert(QuadIdeal { a: pi, b: 0, c: pi }),
            1 => SplitType::Ramified(prime_above(roots[0])),
            _ => {
                let mut ps = [prime_above(roots[0]), prime_above(roots[1])];
                ps.sort();
                SplitType::Split(ps[0], ps[1])
            }
        }
    }

    /// Prime ideals above p.
    pub fn primes_above(&self, p: u64) -> Vec<QuadIdeal> {
        match self.split_prime(p) {
            SplitType::Split(a, b) => vec![a, b],
            SplitType::Inert(a) | SplitType::Ramified(a) => vec![a],
        }
    }

    /// All prime ideals of norm ≤ bound, ordered by (norm, normal form).
    pub fn prime_ideals_up_to(&self, bound: u64) -> Vec<QuadIdeal> {
        let mut out = Vec::new();
        for p in primes_up_to(bound) {
            for q in self.primes_above(p) {
                if q.norm() as u64 <= bound {
                    out.push(q);
                }
            }
        }
        out.sort_by_key(|q| (q.norm(), *q));
        out
    }

    /// Prime ideal factorization.
    pub fn factor_ideal(&self, i: &QuadIdeal) -> Vec<(QuadIdeal, u32)> {
        let mut out = Vec::new();
        let mut rest = *i;
        for (p, _) in factor(i.norm() as u64) {
            for q in self.primes_above(p) {
                let mut e = 0;
                while self.divides(&q, &rest) {
                    rest = self.ideal_div(&rest, &q).expect("divisibility checked");
                    e += 1;
                }
                if e > 0 {
                    out.push((q, e));
                }
            }
        }
        debug_assert!(rest.is_unit());
        out
    }

    /// Integral ideals of norm exactly n, each listed once.
    pub fn ideals_of_norm(&self, n: u64) -> Vec<QuadIdeal> {
        assert!(n >= 1);
        let mut acc = vec![QuadIdeal::UNIT];
        for (p, e) in factor(n) {
            let local: Vec<QuadIdeal> = match self.split_prime(p) {
                SplitType::Split(p1, p2) => (0..=e)
                    .map(|i| self.ideal_mul(&self.ideal_pow(&p1, i), &self.ideal_pow(&p2, e - i)))
                    .collect(),
                SplitType::Inert(q) => {
                    if e % 2 == 0 {
                        vec![self.ideal_pow(&q, e / 2)]
                    } else {
                        Vec::new()
                    }
                }
                SplitType::Ramified(q) => vec![self.ideal_pow(&q, e)],
            };
            acc = acc
                .iter()
                .flat_map(|x| local.iter().map(move |y| (x, y)))
                .map(|(x, y)| self.ideal_mul(x, y))
                .collect();
            if acc.is_empty() {
                break;
            }
        }
        acc.sort();
        acc
    }

    // ------------------------------------------------------------- units

    fn unit_data(&self) -> Result<UnitData> {
        if let Some(r) = unit_cache().read().unwrap().get(&self.disc) {
            let (generator, torsion_order, log_size) = r.clone()?;
            return Ok(UnitData { generator, torsion_order, log_size });
        }
        let computed = if self.is_real() {
            self.compute_fundamental_unit().map(|e| (e, 0, self.embed(e)[0]))
        } else {
            Ok(match self.disc {
                -4 => (QuadInt::new(2, 1), 4, 0.0),
                -3 => (QuadInt::new(2, 1), 6, 0.0),
                _ => (QuadInt::int(-1), 2, 0.0),
            })
        };
        unit_cache().write().unwrap().insert(self.disc, computed.clone());
        let (generator, torsion_order, log_size) = computed?;
        Ok(UnitData { generator, torsion_order, log_size })
    }

    /// Generators of the unit group modulo nothing: [-1, ε₀] for real fields,
    /// the torsion generator for imaginary ones.
    pub fn unit_generators(&self) -> Result<Vec<QuadInt>> {
        let u = self.unit_data()?;
        Ok(if self.is_real() { vec![QuadInt::int(-1), u.generator] } else { vec![u.generator] })
    }

    /// All roots of unity in the field.
    pub fn torsion_units(&self) -> Vec<QuadInt> {
        if self.is_real() {
            return vec![QuadInt::int(1), QuadInt::int(-1)];
        }
        let u = self.unit_data().expect("torsion units are always available");
        let mut out = vec![QuadInt::int(1)];
        for _ in 1..u.torsion_order {
            let last = *out.last().unwrap();
            out.push(self.mul(last, u.generator));
        }
        out
    }

    /// The fundamental unit ε₀ > 1 of a real field.
    pub fn fundamental_unit(&self) -> Result<QuadInt> {
        if !self.is_real() {
            return Err(Error::input("imaginary quadratic fields have no fundamental unit"));
        }
        Ok(self.unit_data()?.generator)
    }

    /// Continued-fraction search for the fundamental unit: the first
    /// convergent p/q of θ (θ = √(D/4) or (1+√D)/2) with N(p - qθ) = ±1.
    fn compute_fundamental_unit(&self) -> Result<QuadInt> {
        let d = self.disc as i128;
        let (delta, p0, q0) = if d % 4 == 0 { (d / 4, 0i128, 1i128) } else { (d, 1, 2) };
        let root = isqrt(delta);
        let (mut pp, mut qq) = (p0, q0);
        let (mut h_prev, mut h) = (0i128, 1i128);
        let (mut k_prev, mut k) = (1i128, 0i128);
        for _ in 0..100_000 {
            let a = (pp + root).div_euclid(qq);
            let h_next = a.checked_mul(h).and_then(|v| v.checked_add(h_prev));
            let k_next = a.checked_mul(k).and_then(|v| v.checked_add(k_prev));
            let (Some(hn), Some(kn)) = (h_next, k_next) else {
                return Err(Error::bound(format!("fundamental unit of D = {d} overflows")));
            };
            h_prev = h;
            h = hn;
            k_prev = k;
            k = kn;
            // norm of h - kθ
            let norm = if d % 4 == 0 {
                h.checked_mul(h).zip(k.checked_mul(k).and_then(|v| v.checked_mul(delta)))
                    .map(|(a, b)| a - b)
            } else {
                let n = (d - 1) / 4;
                h.checked_mul(h)
                    .zip(h.checked_mul(k))
                    .zip(k.checked_mul(k).and_then(|v| v.checked_mul(n)))
                    .map(|((a, b), c)| a - b - c)
            };
            let Some(norm) = norm else {
                return Err(Error::bound(format!("fundamental unit of D = {d} overflows")));
            };
            if norm == 1 || norm == -1 {
                // ε = h + kθ̄'s conjugate partner: the unit > 1 is h + kθ'
                let (x, y) = if d % 4 == 0 {
                    // h + k√(D/4), √(D/4) = ω - D/2
                    (h - k * (d / 2), k)
                } else {
                    // |h - kθ̄| with θ̄ = 1 - θ gives (h - k) + kθ, θ = ω - (D-1)/2
                    (h - k - k * ((d - 1) / 2), k)
                };
                let (x, y) = (
                    i64::try_from(x).map_err(|_| Error::bound("fundamental unit overflows i64"))?,
                    i64::try_from(y).map_err(|_| Error::bound("fundamental unit overflows i64"))?,
                );
                let e = QuadInt::new(x, y);
                debug_assert_eq!(self.norm(e).abs(), 1);
                return Ok(e);
            }
            pp = a * qq - pp;
            qq = (delta - pp * pp) / qq;
        }
        Err(Error::bound(format!("continued fraction of D = {d} did not close")))
    }

    /// Any generator of a principal ideal, or `None` if the ideal is not
    /// principal.
    pub fn find_generator(&self, i: &QuadIdeal) -> Result<Option<QuadInt>> {
        let n = i.norm() as i128;
        if n > MAX_NORM as i128 * MAX_NORM as i128 {
            return Err(Error::bound(format!("norm {n} too large for generator search")));
        }
        let d = self.disc as i128;
        let vmax: i128 = if self.is_real() {
            let eps = self.unit_data()?.log_size;
            let bound = 2.0 * ((n as f64) * eps / d as f64).sqrt() + 2.0;
            if bound > 5.0e7 {
                return Err(Error::bound(format!("generator search window {bound:.0} too large")));
            }
            bound as i128 / i.c as i128 + 1
        } else {
            isqrt(4 * n / -d) / i.c as i128 + 1
        };
        let targets: &[i128] = if self.is_real() { &[1, -1] } else { &[1] };
        for v in 0..=vmax {
            let y = v * i.c as i128;
            for &sgn in targets {
                let disc_val = d * y * y + 4 * sgn * n;
                let Some(s) = exact_sqrt(disc_val) else {
                    continue;
                };
                for s in [s, -s] {
                    let twice = s - d * y;
                    if twice % 2 != 0 {
                        continue;
                    }
                    let x = twice / 2;
                    let cand = QuadInt::new(x as i64, y as i64);
                    if i.contains(cand) {
                        return Ok(Some(cand));
                    }
                }
            }
        }
        Ok(None)
    }

    /// A generator of `i` satisfying an optional congruence α ≡ target (mod m)
    /// and an optional sign pattern at the real places.
    pub fn principal_generator(
        &self,
        i: &QuadIdeal,
        congruence: Option<(&QuadIdeal, QuadInt)>,
        signs: Option<[i8; 2]>,
    ) -> Result<Option<QuadInt>> {
        let Some(alpha) = self.find_generator(i)? else {
            return Ok(None);
        };
        if congruence.is_none() && signs.is_none() {
            return Ok(Some(alpha));
        }
        if let Some((m, _)) = congruence {
            if !self.coprime(i, m) {
                return Err(Error::input(format!("{i} is not coprime to the modulus {m}")));
            }
        }
        let signs = if self.is_real() { signs } else { None };
        let modulus = congruence.map(|(m, _)| *m).unwrap_or(QuadIdeal::UNIT);
        let target = congruence.map(|(m, t)| self.reduce_mod(t, m));
        let ok = |res: QuadInt, sg: [i8; 2]| {
            target.is_none_or(|t| t == res) && signs.is_none_or(|s| s == sg)
        };
        let res0 = self.reduce_mod(alpha, &modulus);
        let sg0 = if self.is_real() { self.signs(alpha) } else { [1, 1] };
        if self.is_real() {
            let eps = self.fundamental_unit()?;
            let eps_res = self.reduce_mod(eps, &modulus);
            let eps_sg = self.signs(eps);
            let one = self.reduce_mod(QuadInt::int(1), &modulus);
            // sweep ±ε^k over one period of (ε mod m, signs)
            let mut res = res0;
            let mut sg = sg0;
            let mut pow_res = one;
            let mut pow_sg = [1i8, 1];
            let mut k = 0u32;
            loop {
                for neg in [false, true] {
                    let (r, s) = if neg {
                        (self.reduce_mod(QuadInt::new(-res.x, -res.y), &modulus), [-sg[0], -sg[1]])
                    } else {
                        (res, sg)
                    };
                    if ok(r, s) {
                        return self.materialize(alpha, eps, k, neg).map(Some);
                    }
                }
                res = self.mul_mod(res, eps_res, &modulus);
                sg = [sg[0] * eps_sg[0], sg[1] * eps_sg[1]];
                pow_res = self.mul_mod(pow_res, eps_res, &modulus);
                pow_sg = [pow_sg[0] * eps_sg[0], pow_sg[1] * eps_sg[1]];
                k += 1;
                if pow_res == one && pow_sg == [1, 1] {
                    break;
                }
                if k > 4 * (modulus.norm() as u32 + 2) {
                    return Err(Error::internal("unit period exceeded its a priori bound"));
                }
            }
            Ok(None)
        } else {
            for u in self.torsion_units() {
                let cand = self.mul(alpha, u);
                if ok(self.reduce_mod(cand, &modulus), [1, 1]) {
                    return Ok(Some(cand));
                }
            }
            Ok(None)
        }
    }

    fn materialize(&self, alpha: QuadInt, eps: QuadInt, k: u32, neg: bool) -> Result<QuadInt> {
        let mut v = (alpha.x as i128, alpha.y as i128);
        let e = (eps.x as i128, eps.y as i128);
        for _ in 0..k {
            v = self.mul_wide(v, e);
            if v.0.abs() > i64::MAX as i128 || v.1.abs() > i64::MAX as i128 {
                return Err(Error::bound("constrained generator overflows i64"));
            }
        }
        let g = QuadInt::new(v.0 as i64, v.1 as i64);
        Ok(if neg { QuadInt::new(-g.x, -g.y) } else { g })
    }

    /// Parses "[a, b, c]" or "(x+y*w)".
    pub fn parse_ideal(&self, s: &str) -> Result<QuadIdeal> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let parts: Vec<i64> = inner
                .split(',')
                .map(|p| p.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::input(format!("malformed ideal literal {s:?}")))?;
            let [a, b, c] = parts[..] else {
                return Err(Error::input(format!("ideal literal {s:?} needs three entries")));
            };
            return self.ideal(a, b, c);
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let g = parse_quadint(inner)?;
            if g == QuadInt::int(0) {
                return Err(Error::input("zero ideal"));
            }
            return Ok(self.principal(g));
        }
        Err(Error::input(format!("malformed ideal literal {s:?}")))
    }
}

/// Sign of u + v√d for d > 0 not a square.
fn sign_surd(u: i128, v: i128, d: i128) -> i8 {
    let su = u.signum();
    let sv = v.signum();
    if sv == 0 {
        return su as i8;
    }
    if su == 0 || su == sv {
        return sv as i8;
    }
    // opposite signs: compare u² with v²d
    let lhs = u * u;
    let rhs = v * v * d;
    if lhs > rhs {
        su as i8
    } else {
        sv as i8
    }
}

/// Parses "x+y*w" style literals ("5", "w", "1+w", "-2-3*w").
pub fn parse_quadint(s: &str) -> Result<QuadInt> {
    let bad = || Error::input(format!("malformed field element {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let (mut x, mut y) = (0i64, 0i64);
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, t.strip_prefix('+').unwrap_or(&t)),
        };
        if let Some(coef) = body.strip_suffix('w') {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = if coef.is_empty() { 1 } else { coef.parse::<i64>().map_err(|_| bad())? };
            y += sign * c;
        } else {
            x += sign * body.parse::<i64>().map_err(|_| bad())?;
        }
    }
    Ok(QuadInt::new(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> QuadField {
        QuadField::make(-1).unwrap()
    }

    #[test]
    fn make_field_examples() {
        assert_eq!(QuadField::make(-1).unwrap().disc(), -4);
        assert_eq!(QuadField::make(5).unwrap().disc(), 5);
        assert_eq!(QuadField::make(8).unwrap().disc(), 8);
        assert_eq!(QuadField::make(-12).unwrap().disc(), -3);
        assert!(QuadField::make(9).is_err());
        assert!(QuadField::make(0).is_err());
        assert!(QuadField::make(1).is_err());
    }

    #[test]
    fn omega_satisfies_its_minimal_polynomial() {
        for d in [-4, -3, -23, 5, 8, 12, 13] {
            let k = QuadField::from_disc(d).unwrap();
            let w = k.omega();
            let w2 = k.mul(w, w);
            let n = d * (d - 1) / 4;
            assert_eq!(QuadInt::new(w2.x + n, w2.y - d), QuadInt::new(0, 0));
            assert_eq!(k.norm(w), n);
            assert_eq!(k.trace(w), d);
        }
    }

    #[test]
    fn split_examples() {
        let k = gauss();
        assert!(matches!(k.split_prime(5), SplitType::Split(..)));
        assert!(matches!(k.split_prime(3), SplitType::Inert(_)));
        assert!(matches!(k.split_prime(2), SplitType::Ramified(_)));
    }

    #[test]
    fn split_product_is_rational_prime() {
        let k = gauss();
        let SplitType::Split(p1, p2) = k.split_prime(5) else { panic!() };
        assert_eq!(k.ideal_mul(&p1, &p2), k.int_ideal(5));
        assert_eq!(k.conj_ideal(&p1), p2);
        let SplitType::Ramified(q) = k.split_prime(2) else { panic!() };
        assert_eq!(q, k.principal(QuadInt::new(3, 1))); // 1 + i = 3 + ω
        assert_eq!(k.conj_ideal(&q), q);
        assert_eq!(k.ideal_mul(&q, &QuadIdeal::UNIT), q);
    }

    #[test]
    fn ideals_of_norm_examples() {
        let k = gauss();
        assert_eq!(k.ideals_of_norm(25).len(), 3);
        assert!(k.ideals_of_norm(3).is_empty());
        assert_eq!(k.ideals_of_norm(1), vec![QuadIdeal::UNIT]);
    }

    #[test]
    fn generator_examples() {
        let k = gauss();
        let g = k.principal_generator(&k.int_ideal(5), None, None).unwrap().unwrap();
        assert_eq!(k.norm(g), 25);
        assert_eq!(k.principal(g), k.int_ideal(5));

        let k5 = QuadField::make(-5).unwrap();
        let SplitType::Split(p, _) = k5.split_prime(3) else { panic!() };
        assert_eq!(k5.principal_generator(&p, None, None).unwrap(), None);

        let r5 = QuadField::make(5).unwrap();
        let sqrt5 = QuadInt::new(-5, 2); // 2ω - 5
        let id = r5.principal(sqrt5);
        // ε₀ has norm -1, so ε₀√5 = ω is a totally positive generator
        let tp = r5.principal_generator(&id, None, Some([1, 1])).unwrap().unwrap();
        assert_eq!(r5.signs(tp), [1, 1]);
        assert_eq!(r5.principal(tp), id);
        let g = r5.principal_generator(&id, None, Some([1, -1])).unwrap().unwrap();
        assert_eq!(r5.signs(g), [1, -1]);
        assert_eq!(r5.principal(g), id);

        // in ℚ(√3) every unit has norm +1, so (√3) has no totally positive generator
        let r3 = QuadField::make(3).unwrap();
        let sqrt3 = QuadInt::new(-6, 1); // ω - 6
        assert_eq!(r3.norm(sqrt3), -3);
        let id3 = r3.principal(sqrt3);
        assert_eq!(r3.principal_generator(&id3, None, Some([1, 1])).unwrap(), None);
        assert!(r3.principal_generator(&id3, None, Some([-1, 1])).unwrap().is_some());
    }

    #[test]
    fn fundamental_unit_examples() {
        let cases = [(5, 1.0 + 5f64.sqrt()) , (8, 2.0 + 2.0 * 2f64.sqrt()), (12, 4.0 + 2.0 * 3f64.sqrt())];
        for (d, twice) in cases {
            let k = QuadField::from_disc(d).unwrap();
            let e = k.fundamental_unit().unwrap();
            assert!((k.embed(e)[0] * 2.0 - twice).abs() < 1e-9, "D = {d}: {e}");
        }
        assert!(gauss().fundamental_unit().is_err());
    }

    #[test]
    fn fundamental_unit_matches_pell_search() {
        for d in (5..400).filter(|&d| is_fundamental_discriminant(d)) {
            let k = QuadField::from_disc(d).unwrap();
            let e = k.fundamental_unit().unwrap();
            // smallest u > 0 with D u² ± 4 a square gives ε = (t + u√D)/2
            let u = (1i128..)
                .find(|&u| exact_sqrt(d as i128 * u * u - 4).or(exact_sqrt(d as i128 * u * u + 4)).is_some())
                .unwrap();
            assert_eq!(e.y as i128, u, "D = {d}");
            assert!(k.embed(e)[0] > 1.0);
        }
    }

    #[test]
    fn parse_literals() {
        let k = gauss();
        assert_eq!(k.parse_ideal("(1)").unwrap(), QuadIdeal::UNIT);
        assert_eq!(k.parse_ideal("[5, 0, 1]").unwrap().norm(), 5);
        assert_eq!(k.parse_ideal("(2+w)").unwrap().norm(), 1);
        assert!(k.parse_ideal("[5, 1, 1]").is_err());
        assert!(k.parse_ideal("x").is_err());
        assert_eq!(parse_quadint("-2-3*w").unwrap(), QuadInt::new(-2, -3));
        assert_eq!(parse_quadint("w").unwrap(), QuadInt::new(0, 1));
    }

    #[test]
    fn signs_are_exact() {
        let k = QuadField::from_disc(12).unwrap();
        for x in -20..20 {
            for y in -20..20 {
                let v = QuadInt::new(x, y);
                if v == QuadInt::int(0) {
                    continue;
                }
                let e = k.embed(v);
                let s = k.signs(v);
                assert_eq!(s[0] as f64, e[0].signum(), "{v}");
                assert_eq!(s[1] as f64, e[1].signum(), "{v}");
            }
        }
    }
}
