//! q-expansions of weight-one theta series a_n = Σ_{N(𝔞)=n} ξ(𝔞).

use serde::Serialize;

use crate::arith::{factor, primes_up_to, spf_table};
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::quadfield::{QuadIdeal, SplitType};
use crate::rayclass::{phase_to_cyc, HeckeChar, Phase};

pub const MAX_ORACLE_BOUND: u64 = 100_000;
pub const MAX_FAST_BOUND: u64 = 1_000_000;

/// Identifies a character inside JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharLabel {
    pub index: u64,
    pub invariants: Vec<u64>,
    pub exponents: Vec<u64>,
}

impl CharLabel {
    pub fn of(xi: &HeckeChar) -> Self {
        CharLabel {
            index: xi.index(),
            invariants: xi.group().invariants().to_vec(),
            exponents: xi.exponents().to_vec(),
        }
    }
}

/// Coefficients a₁ … a_B of Θ₁(K, ξ).
#[derive(Clone, Debug, Serialize)]
pub struct ThetaExpansion {
    pub schema: u32,
    pub disc: i64,
    pub modulus: QuadIdeal,
    #[serde(rename = "char")]
    pub character: CharLabel,
    pub level: u64,
    pub bound: u64,
    pub coeffs: Vec<CycNum>,
}

impl ThetaExpansion {
    /// a_n for 1 ≤ n ≤ B.
    pub fn a(&self, n: u64) -> &CycNum {
        &self.coeffs[(n - 1) as usize]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("expansion serializes")
    }
}

/// |D|·N(𝔪).
pub fn level(xi: &HeckeChar) -> u64 {
    xi.field().disc().unsigned_abs() * xi.modulus().norm() as u64
}

/// Imaginary field, or real field with exactly one p_τ = 1.
pub fn parity_ok(xi: &HeckeChar) -> Result<bool> {
    if !xi.field().is_real() {
        return Ok(true);
    }
    let t = xi.infinity_type()?;
    Ok(t[0] + t[1] == 1)
}

/// ξ ≠ ξ^σ.
pub fn is_cuspidal(xi: &HeckeChar) -> Result<bool> {
    Ok(xi.epsilon()?.1 != 1)
}

/// Index of Γ₁(N) in SL₂(ℤ).
pub fn gamma1_index(n: u64) -> u64 {
    factor(n).into_iter().fold(1, |acc, (p, e)| acc * p.pow(2 * e - 2) * (p * p - 1))
}

/// ⌈μ/12⌉ for weight one, μ the index of Γ₁(N).
pub fn sturm_bound(n: u64) -> u64 {
    gamma1_index(n).div_ceil(12)
}

fn new_expansion(xi: &HeckeChar, bound: u64, coeffs: Vec<CycNum>) -> ThetaExpansion {
    ThetaExpansion {
        schema: 1,
        disc: xi.field().disc(),
        modulus: xi.modulus().finite(),
        character: CharLabel::of(xi),
        level: level(xi),
        bound,
        coeffs,
    }
}

/// Direct summation over all ideals of each norm.
pub fn theta_oracle(xi: &HeckeChar, bound: u64) -> Result<ThetaExpansion> {
    if bound == 0 || bound > MAX_ORACLE_BOUND {
        return Err(Error::bound(format!("oracle bound {bound} outside 1..={MAX_ORACLE_BOUND}")));
    }
    let field = xi.field();
    let order = xi.group().exponent();
    let mut coeffs = Vec::with_capacity(bound as usize);
    for n in 1..=bound {
        let mut acc = CycNum::zero(order);
        for i in field.ideals_of_norm(n) {
            acc = acc + xi.evaluate(&i)?;
        }
        coeffs.push(acc);
    }
    Ok(new_expansion(xi, bound, coeffs))
}

/// Values of ξ at the primes above p.
#[derive(Clone, Debug)]
enum LocalValues {
    Split(Option<Phase>, Option<Phase>),
    Inert(Option<Phase>),
    Ramified(Option<Phase>),
}

fn local_values(xi: &HeckeChar, p: u64) -> Result<LocalValues> {
    Ok(match xi.field().split_prime(p) {
        SplitType::Split(a, b) => LocalValues::Split(xi.phase(&a)?, xi.phase(&b)?),
        SplitType::Inert(q) => LocalValues::Inert(xi.phase(&q)?),
        SplitType::Ramified(q) => LocalValues::Ramified(xi.phase(&q)?),
    })
}

/// Σ ξ over ideals of norm p^r from the local values.
fn local_coeff(v: &LocalValues, r: u32, order: u64) -> CycNum {
    let pow = |p: Option<Phase>, k: u32| -> Option<Phase> {
        if k == 0 {
            Some(Phase::from_integer(0))
        } else {
            p.map(|x| x * Phase::from_integer(k as i64))
        }
    };
    let terms: Vec<Phase> = match v {
        LocalValues::Split(a, b) => (0..=r).filter_map(|i| Some(pow(*a, i)? + pow(*b, r - i)?)).collect(),
        LocalValues::Inert(q) => {
            if r % 2 == 1 {
                Vec::new()
            } else {
                pow(*q, r / 2).into_iter().collect()
            }
        }
        LocalValues::Ramified(q) => pow(*q, r).into_iter().collect(),
    };
    terms.into_iter().fold(CycNum::zero(order), |acc, t| acc + phase_to_cyc(t, order))
}

/// a_{p^r} from the splitting of p and the values of ξ at primes above p.
pub fn prime_power_coeff(xi: &HeckeChar, p: u64, r: u32) -> Result<CycNum> {
    if !crate::arith::is_prime(p) {
        return Err(Error::input(format!("{p} is not prime")));
    }
    let order = xi.group().exponent();
    if r == 0 {
        return Ok(CycNum::one(order));
    }
    Ok(local_coeff(&local_values(xi, p)?, r, order))
}

/// Multiplicative assembly from prime powers.
pub fn theta_fast(xi: &HeckeChar, bound: u64, mode: Parallelism) -> Result<ThetaExpansion> {
    if bound == 0 || bound > MAX_FAST_BOUND {
        return Err(Error::bound(format!("bound {bound} outside 1..={MAX_FAST_BOUND}")));
    }
    let order = xi.group().exponent();
    let primes = primes_up_to(bound);
    let locals = par::try_map(mode, &primes, |&p| local_values(xi, p))?;
    let spf = spf_table(bound as usize);
    let mut local_of = vec![usize::MAX; bound as usize + 1];
    for (k, &p) in primes.iter().enumerate() {
        local_of[p as usize] = k;
    }
    let mut coeffs: Vec<CycNum> = Vec::with_capacity(bound as usize);
    coeffs.push(CycNum::one(order));
    for n in 2..=bound as usize {
        let p = spf[n] as usize;
        let mut rest = n;
        let mut r = 0;
        while rest % p == 0 {
            rest /= p;
            r += 1;
        }
        let local = local_coeff(&locals[local_of[p]], r, order);
        let value = if rest == 1 { local } else { &local * &coeffs[rest - 1] };
        coeffs.push(value);
    }
    Ok(new_expansion(xi, bound, coeffs))
}

/// First n ≤ bound with a_n(Θ(ξ₁)) ≠ a_n(Θ(ξ₂)), comparing prime powers
/// only (both sequences are multiplicative); `None` if they agree.
pub fn first_disagreement(x1: &HeckeChar, x2: &HeckeChar, bound: u64) -> Result<Option<u64>> {
    for p in primes_up_to(bound) {
        let (o1, o2) = (x1.group().exponent(), x2.group().exponent());
        let (l1, l2) = (local_values(x1, p)?, local_values(x2, p)?);
        let mut q = p;
        let mut r = 1;
        while q <= bound {
            if local_coeff(&l1, r, o1) != local_coeff(&l2, r, o2) {
                return Ok(Some(q));
            }
            r += 1;
            q = match q.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadField;
    use crate::rayclass::{ray_class_group, Modulus};

    fn trivial(d: i64) -> HeckeChar {
        let k = QuadField::from_disc(d).unwrap();
        ray_class_group(&Modulus::unit(k)).unwrap().trivial_character()
    }

    #[test]
    fn gaussian_coefficients() {
        let xi = trivial(-4);
        let t = theta_oracle(&xi, 30).unwrap();
        assert_eq!(t.a(1), &CycNum::one(1));
        assert_eq!(t.a(3), &CycNum::zero(1));
        assert_eq!(t.a(5), &CycNum::from_int(1, 2));
        assert_eq!(t.a(25), &CycNum::from_int(1, 3));
        assert_eq!(prime_power_coeff(&xi, 5, 2).unwrap(), CycNum::from_int(1, 3));
        assert_eq!(prime_power_coeff(&xi, 2, 5).unwrap(), CycNum::one(1));
        assert!(prime_power_coeff(&xi, 3, 1).unwrap().is_zero());
    }

    #[test]
    fn minus_twenty_product() {
        let xi = trivial(-20);
        let t = theta_fast(&xi, 30, Parallelism::Sequential).unwrap();
        assert_eq!(t.a(21), &CycNum::from_int(1, 4));
        assert_eq!(t.a(6), &(t.a(2) * t.a(3)));
    }

    #[test]
    fn levels_and_sturm() {
        assert_eq!(level(&trivial(-4)), 4);
        assert_eq!(level(&trivial(-23)), 23);
        assert_eq!(gamma1_index(1), 1);
        assert_eq!(gamma1_index(2), 3);
        assert_eq!(gamma1_index(4), 12);
        assert_eq!(sturm_bound(23), 44);
        assert!(!parity_ok(&trivial(5)).unwrap());
        assert!(parity_ok(&trivial(-7)).unwrap());
    }

    #[test]
    fn cuspidality() {
        assert!(!is_cuspidal(&trivial(-4)).unwrap());
        let k = QuadField::from_disc(-20).unwrap();
        let g = ray_class_group(&Modulus::unit(k)).unwrap();
        assert!(!is_cuspidal(&g.character(1).unwrap()).unwrap());
        let k = QuadField::from_disc(-23).unwrap();
        let g = ray_class_group(&Modulus::unit(k)).unwrap();
        assert!(is_cuspidal(&g.character(1).unwrap()).unwrap());
    }

    #[test]
    fn fast_matches_oracle_with_modulus() {
        let k = QuadField::from_disc(-3).unwrap();
        let m = Modulus::new(k, k.int_ideal(7)).unwrap();
        let g = ray_class_group(&m).unwrap();
        for xi in g.characters() {
            let a = theta_oracle(&xi, 120).unwrap();
            let b = theta_fast(&xi, 120, Parallelism::Parallel).unwrap();
            assert_eq!(a.coeffs, b.coeffs);
        }
    }
}
