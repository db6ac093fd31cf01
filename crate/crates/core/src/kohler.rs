//! Theta series arising from three quadratic fields: the condition on ξ,
//! the partner search, the imprimitive counterexample, the modulus
//! extension and the bridge to the image classification.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{divisors, is_fundamental_discriminant, is_prime, lcm, primes_up_to};
use crate::cyclotomic::{phase_mod1, phase_to_cyc, CycNum, Phase};
use crate::error::{Error, Result};
use crate::grouprep::{self, closure, ImageClass, Mat2, SubgroupType};
use crate::par::{self, Parallelism};
use crate::quadfield::{QuadField, QuadIdeal, SplitType, MAX_ABS_DISC};
use crate::rayclass::{ray_class_group, HeckeChar, Modulus};
use crate::theta::{self, first_disagreement, level, parity_ok, sturm_bound, theta_fast};

/// Split primes scanned by the witness checks.
pub const DEFAULT_PRIME_BOUND: u64 = 1000;
/// Largest level accepted by the partner search.
pub const MAX_SEARCH_LEVEL: u64 = 5000;

// ----------------------------------------------------------- condition B

#[derive(Clone, Debug, Serialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub xi_p: CycNum,
    pub xi_sigma_p: CycNum,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionBReport {
    pub cuspidal: bool,
    pub epsilon_order: u64,
    pub holds: bool,
    pub prime_check: Vec<PrimeCheck>,
}

/// ξ(𝔭) = ±ξ(σ𝔭) at split p ≤ bound with both primes prime to the modulus.
pub fn prime_check(xi: &HeckeChar, bound: u64) -> Result<Vec<PrimeCheck>> {
    let field = xi.field();
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        let SplitType::Split(a, b) = field.split_prime(p) else { continue };
        let (Some(x), Some(y)) = (xi.phase(&a)?, xi.phase(&b)?) else { continue };
        let d = phase_mod1(x - y);
        let pass = *d.numer() == 0 || d == Phase::new(1, 2);
        let n = lcm(*x.denom() as u64, *y.denom() as u64);
        out.push(PrimeCheck { p, xi_p: phase_to_cyc(x, n), xi_sigma_p: phase_to_cyc(y, n), pass });
    }
    Ok(out)
}

/// ξ on the smallest conjugation-stable multiple of its modulus.
pub fn stable_lift(xi: &HeckeChar) -> Result<HeckeChar> {
    if xi.modulus().is_sigma_stable() {
        return Ok(xi.clone());
    }
    let field = xi.field();
    let m = xi.modulus().finite();
    let mc = field.conj_ideal(&m);
    let l = field.ideal_div(&field.ideal_mul(&m, &mc), &field.ideal_sum(&m, &mc))?;
    xi.lift(&Modulus::new(field, l)?)
}

/// Order of ε = ξ^σ/ξ, computed on the stable lift.
pub fn epsilon_order(xi: &HeckeChar) -> Result<u64> {
    Ok(stable_lift(xi)?.epsilon()?.1)
}

/// The character 𝔞 ↦ ξ(σ𝔞) of modulus σ𝔪.
pub fn conjugate(xi: &HeckeChar) -> Result<HeckeChar> {
    let field = xi.field();
    let g = ray_class_group(&Modulus::new(field, field.conj_ideal(&xi.modulus().finite()))?)?;
    let values = g
        .generators()
        .iter()
        .map(|q| xi.evaluate(&field.conj_ideal(q)))
        .collect::<Result<Vec<_>>>()?;
    g.make_char_from_values(&values)
}

/// Cuspidality and ε of order 2; the prime list is a cross-check only.
pub fn condition_b(xi: &HeckeChar, bound: u64) -> Result<ConditionBReport> {
    let order = epsilon_order(xi)?;
    let cuspidal = order != 1;
    Ok(ConditionBReport {
        cuspidal,
        epsilon_order: order,
        holds: cuspidal && order == 2,
        prime_check: prime_check(xi, bound)?,
    })
}

fn condition_b_holds(xi: &HeckeChar) -> Result<bool> {
    Ok(epsilon_order(xi)? == 2)
}

// --------------------------------------------------------- enumeration

/// Fundamental discriminants D with |D| dividing n, ordered by (|D|, D).
pub fn discriminants_dividing(n: u64) -> Vec<i64> {
    let mut out = Vec::new();
    for d in divisors(n) {
        if d < 3 || d as i64 > MAX_ABS_DISC {
            continue;
        }
        for s in [-(d as i64), d as i64] {
            if is_fundamental_discriminant(s) {
                out.push(s);
            }
        }
    }
    out
}

/// Moduli of norm n, one per conjugate pair.
pub fn moduli_of_norm(field: QuadField, n: u64) -> Vec<Modulus> {
    let mut v: Vec<QuadIdeal> =
        field.ideals_of_norm(n).into_iter().filter(|i| *i <= field.conj_ideal(i)).collect();
    v.sort();
    v.into_iter().map(|i| Modulus::new(field, i).expect("ideal of the field")).collect()
}

/// Primitive, parity-admissible characters of modulus 𝔪 satisfying the
/// condition. On a stable modulus only the lower index of each conjugate
/// pair is kept; on other moduli the conjugates live on σ𝔪.
pub fn admissible_characters(m: &Modulus) -> Result<Vec<HeckeChar>> {
    let g = ray_class_group(m)?;
    let mut out = Vec::new();
    for xi in g.characters() {
        if !parity_ok(&xi)? || !condition_b_holds(&xi)? || !xi.is_primitive()? {
            continue;
        }
        if m.is_sigma_stable() && xi.conj_char()?.index() < xi.index() {
            continue;
        }
        out.push(xi);
    }
    Ok(out)
}

fn sort_key(xi: &HeckeChar) -> (u64, i64, QuadIdeal, u64) {
    let d = xi.field().disc();
    (d.unsigned_abs(), d, xi.modulus().finite(), xi.index())
}

// ------------------------------------------------------------ partners

/// Primitive (K′, ξ′) with K′ ≠ K and Θ(K′, ξ′) = Θ(K, ξ), compared to the
/// Sturm-type bound of the level unless overridden.
pub fn find_partners(xi: &HeckeChar, bound: Option<u64>, mode: Parallelism) -> Result<Vec<HeckeChar>> {
    if !xi.is_primitive()? {
        return Err(Error::input("the partner search needs a primitive character"));
    }
    if !condition_b_holds(xi)? || !parity_ok(xi)? {
        return Ok(Vec::new());
    }
    let n = level(xi);
    if n > MAX_SEARCH_LEVEL {
        return Err(Error::bound(format!("level {n} exceeds {MAX_SEARCH_LEVEL}")));
    }
    let bound = bound.unwrap_or_else(|| sturm_bound(n));
    let mut cells = Vec::new();
    for d in discriminants_dividing(n) {
        if d == xi.field().disc() {
            continue;
        }
        let field = QuadField::from_disc(d)?;
        cells.extend(moduli_of_norm(field, n / d.unsigned_abs()));
    }
    let found = par::try_map(mode, &cells, |m| -> Result<Vec<HeckeChar>> {
        let mut hits = Vec::new();
        for cand in admissible_characters(m)? {
            if first_disagreement(xi, &cand, bound)?.is_none() {
                hits.push(cand);
            }
        }
        Ok(hits)
    })?;
    let mut out: Vec<HeckeChar> = found.into_iter().flatten().collect();
    out.sort_by_key(sort_key);
    Ok(out)
}

// -------------------------------------------------------------- triples

/// Agreement of the three expansions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub sturm_bound: u64,
    pub spot_check_bound: u64,
    pub coeff_digest: String,
}

/// Three (field, primitive character) pairs with one theta series.
#[derive(Clone, Debug)]
pub struct Triple {
    pub members: [HeckeChar; 3],
    pub level: u64,
    pub certificate: Certificate,
}

fn digest(coeffs: &[CycNum]) -> String {
    use sha2::{Digest, Sha256};
    let json = serde_json::to_vec(coeffs).expect("coefficients serialize");
    Sha256::digest(json).iter().map(|b| format!("{b:02x}")).collect()
}

impl Triple {
    /// Validates the members and certifies agreement up to three times the
    /// Sturm-type bound.
    pub fn new(members: [HeckeChar; 3]) -> Result<Triple> {
        let discs: BTreeSet<i64> = members.iter().map(|x| x.field().disc()).collect();
        if discs.len() != 3 {
            return Err(Error::input("triple fields are not distinct"));
        }
        let n = level(&members[0]);
        for x in &members {
            if !x.is_primitive()? {
                return Err(Error::input("triple member is not primitive"));
            }
            if level(x) != n {
                return Err(Error::input("triple members have different levels"));
            }
        }
        let sturm = sturm_bound(n);
        let spot = 3 * sturm;
        for x in &members[1..] {
            if let Some(k) = first_disagreement(&members[0], x, spot)? {
                return Err(Error::input(format!("expansions differ at n = {k}")));
            }
        }
        let exp = theta_fast(&members[0], spot.min(theta::MAX_FAST_BOUND), Parallelism::Sequential)?;
        let certificate = Certificate { sturm_bound: sturm, spot_check_bound: spot, coeff_digest: digest(&exp.coeffs) };
        Ok(Triple { members, level: n, certificate })
    }

    pub fn fields(&self) -> [QuadField; 3] {
        [0, 1, 2].map(|i| self.members[i].field())
    }
}

/// Result of the ascending level scan.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub triple: Option<Triple>,
    pub levels_scanned: u64,
    pub candidates: usize,
    /// Candidates whose partner count was not 2: (disc, modulus, index, count).
    pub anomalies: Vec<(i64, QuadIdeal, u64, usize)>,
}

/// Scans levels 1..=max in order and stops at the first character with
/// exactly two partners.
pub fn scan(max_level: u64, mode: Parallelism) -> Result<ScanResult> {
    let mut candidates = 0;
    let mut anomalies = Vec::new();
    for n in 1..=max_level {
        let mut cells = Vec::new();
        for d in discriminants_dividing(n) {
            cells.extend(moduli_of_norm(QuadField::from_disc(d)?, n / d.unsigned_abs()));
        }
        let per_cell = par::try_map(mode, &cells, admissible_characters)?;
        for xi in per_cell.into_iter().flatten() {
            candidates += 1;
            let partners = find_partners(&xi, None, mode)?;
            if partners.len() == 2 {
                let [a, b]: [HeckeChar; 2] = partners.try_into().expect("two partners");
                return Ok(ScanResult {
                    triple: Some(Triple::new([xi, a, b])?),
                    levels_scanned: n,
                    candidates,
                    anomalies,
                });
            }
            anomalies.push((xi.field().disc(), xi.modulus().finite(), xi.index(), partners.len()));
        }
    }
    Ok(ScanResult { triple: None, levels_scanned: max_level, candidates, anomalies })
}

// -------------------------------------------------------- image classes

/// An inert prime p ≤ 10⁴ not dividing the level.
fn inert_prime(field: &QuadField, n: u64) -> Result<u64> {
    primes_up_to(10_000)
        .into_iter()
        .find(|&p| !n.is_multiple_of(p) && matches!(field.split_prime(p), SplitType::Inert(_)))
        .ok_or_else(|| Error::bound("no inert prime below 10000"))
}

fn phase_root(p: Phase) -> CycNum {
    phase_to_cyc(p, (*p.denom() as u64).max(1))
}

/// Image of Ind χ as matrices: diag(ξ(𝔤), ξ(σ𝔤)) on generators of the ray
/// class group and [[0, ξ(pO)], [1, 0]] for an inert prime p.
pub fn reconstruct_image(xi: &HeckeChar) -> Result<grouprep::MatrixGroup> {
    let xi = &stable_lift(xi)?;
    let field = xi.field();
    let mut gens = Vec::new();
    for g in xi.group().generators() {
        let a = xi.phase(g)?.ok_or_else(|| Error::internal("generator not coprime"))?;
        let b = xi.phase(&field.conj_ideal(g))?.ok_or_else(|| Error::internal("conjugate not coprime"))?;
        gens.push(Mat2::diag(phase_root(a), phase_root(b)));
    }
    let p = inert_prime(&field, level(xi))?;
    let v = xi.phase(&field.int_ideal(p as i64))?.ok_or_else(|| Error::internal("inert prime divides the modulus"))?;
    gens.push(Mat2::antidiag(phase_root(v), CycNum::one(1)));
    closure(&gens)
}

/// Order of ξ on ker ε.
pub fn kernel_order(xi: &HeckeChar) -> Result<u64> {
    let xi = &stable_lift(xi)?;
    let (eps, _) = xi.epsilon()?;
    let mut n = 1;
    for v in xi.group().elements() {
        if *eps.phase_of_vector(&v).numer() == 0 {
            n = lcm(n, *xi.phase_of_vector(&v).denom() as u64);
        }
    }
    Ok(n)
}

/// Cyclic iff the pairs (ξ(𝔤), ξ(σ𝔤)) generate a cyclic group of order 2n.
fn value_group_type(xi: &HeckeChar, n: u64) -> Result<SubgroupType> {
    let xi = &stable_lift(xi)?;
    let field = xi.field();
    let mut gens = Vec::new();
    for g in xi.group().generators() {
        let a = xi.phase(g)?.expect("coprime generator");
        let b = xi.phase(&field.conj_ideal(g))?.expect("coprime conjugate");
        gens.push(Mat2::diag(phase_root(a), phase_root(b)));
    }
    let h = closure(&gens)?;
    if h.len() as u64 != 2 * n {
        return Err(Error::internal(format!("value group of order {} instead of {}", h.len(), 2 * n)));
    }
    Ok(if (0..h.len()).any(|x| h.element_order(x) == 2 * n) {
        SubgroupType::Cyclic
    } else {
        SubgroupType::Involution
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleImage {
    pub n: u64,
    pub class: ImageClass,
    pub member_types: [SubgroupType; 3],
}

/// n, the three subgroup types and the matching row of the table.
pub fn image_class_of_triple(t: &Triple) -> Result<TripleImage> {
    let n = kernel_order(&t.members[0])?;
    for x in &t.members[1..] {
        if kernel_order(x)? != n {
            return Err(Error::internal("members disagree on the order on the kernel"));
        }
    }
    let types = [
        value_group_type(&t.members[0], n)?,
        value_group_type(&t.members[1], n)?,
        value_group_type(&t.members[2], n)?,
    ];
    let img = reconstruct_image(&t.members[0])?;
    let class = grouprep::classify_image(&img)?;
    if class.order as u64 != 4 * n {
        return Err(Error::internal("image order differs from 4n"));
    }
    let (mut a, mut b) = (types.to_vec(), class.types.to_vec());
    a.sort();
    b.sort();
    if a != b {
        return Err(Error::internal("value-group types disagree with the reconstructed image"));
    }
    for p in primes_up_to(1000) {
        if t.level.is_multiple_of(p) {
            continue;
        }
        let ap = theta::prime_power_coeff(&t.members[0], p, 1)?;
        if !ap.is_zero() && !is_twice_root(&ap, n) {
            return Err(Error::internal(format!("a_{p} is not 0 or twice an n-th root of unity")));
        }
    }
    Ok(TripleImage { n, class, member_types: types })
}

/// Nonzero a_p against primes split in all three fields.
#[derive(Clone, Debug, Serialize)]
pub struct TracePattern {
    pub bound: u64,
    pub nonzero: Vec<u64>,
    pub split_in_all: Vec<u64>,
    pub roots_ok: bool,
    /// ε(𝔭) = +1 iff a_p ≠ 0 in each field, at split p.
    pub epsilon_ok: bool,
}

impl TracePattern {
    pub fn holds(&self) -> bool {
        self.nonzero == self.split_in_all && self.roots_ok && self.epsilon_ok
    }
}

/// Twice an n-th root of unity.
fn is_twice_root(a: &CycNum, n: u64) -> bool {
    a.coeffs().iter().all(|c| c % 2 == 0)
        && CycNum::from_coeffs(a.order(), a.coeffs().iter().map(|c| c / 2).collect())
            .root_exponent()
            .is_some_and(|(m, k)| (n * k).is_multiple_of(m))
}

pub fn trace_pattern(t: &Triple, bound: u64) -> Result<TracePattern> {
    let n = kernel_order(&t.members[0])?;
    let eps: Vec<HeckeChar> =
        t.members.iter().map(|x| Ok(stable_lift(x)?.epsilon()?.0)).collect::<Result<_>>()?;
    let (mut nonzero, mut split_in_all) = (Vec::new(), Vec::new());
    let (mut roots_ok, mut epsilon_ok) = (true, true);
    for p in primes_up_to(bound).into_iter().filter(|p| !t.level.is_multiple_of(*p)) {
        let ap = theta::prime_power_coeff(&t.members[0], p, 1)?;
        if !ap.is_zero() {
            nonzero.push(p);
            roots_ok &= is_twice_root(&ap, n);
        }
        if t.members.iter().all(|x| matches!(x.field().split_prime(p), SplitType::Split(..))) {
            split_in_all.push(p);
        }
        for e in &eps {
            if let SplitType::Split(q, _) = e.field().split_prime(p) {
                let trivial = e.phase(&q)?.is_some_and(|v| *v.numer() == 0);
                epsilon_ok &= trivial == !ap.is_zero();
            }
        }
    }
    Ok(TracePattern { bound, nonzero, split_in_all, roots_ok, epsilon_ok })
}

// ----------------------------------------------- counterexample, extension

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub p: u64,
    pub modulus: QuadIdeal,
    pub a_p: CycNum,
    pub xi_sigma_p: CycNum,
    /// a_p of Θ(K′, ξ′) for ξ′ over ξ̃′ on moduli 𝔣′ and 𝔣′·(p).
    pub partner_a_p: Vec<CycNum>,
    pub prime_check_passes: bool,
}

/// ξ̃ extended to 𝔣·𝔭 for a prime p ∤ N split in K and inert in K′.
pub fn imprimitive_counterexample(t: &Triple, prime_bound: u64) -> Result<(HeckeChar, u64, CounterexampleReport)> {
    let [k, kp, _] = t.fields();
    let xi = &t.members[0];
    let p = primes_up_to(prime_bound)
        .into_iter()
        .find(|&p| {
            !t.level.is_multiple_of(p)
                && matches!(k.split_prime(p), SplitType::Split(..))
                && matches!(kp.split_prime(p), SplitType::Inert(_))
        })
        .ok_or_else(|| Error::bound(format!("no suitable prime below {prime_bound}")))?;
    let SplitType::Split(pp, pbar) = k.split_prime(p) else { unreachable!() };
    let m = Modulus::new(k, k.ideal_mul(&xi.modulus().finite(), &pp))?;
    let lifted = xi.lift(&m)?;
    let a_p = theta::prime_power_coeff(&lifted, p, 1)?;
    let xi_sigma_p = lifted.evaluate(&pbar)?;
    if a_p != xi_sigma_p || a_p.is_zero() {
        return Err(Error::internal("a_p is not the value at the conjugate prime"));
    }
    let partner = &t.members[1];
    let mut partner_a_p = vec![theta::prime_power_coeff(partner, p, 1)?];
    let bigger = Modulus::new(kp, kp.ideal_mul(&partner.modulus().finite(), &kp.int_ideal(p as i64)))?;
    partner_a_p.push(theta::prime_power_coeff(&partner.lift(&bigger)?, p, 1)?);
    let prime_check_passes = prime_check(&lifted, prime_bound)?.iter().all(|c| c.pass);
    let report = CounterexampleReport { p, modulus: m.finite(), a_p, xi_sigma_p, partner_a_p, prime_check_passes };
    Ok((lifted, p, report))
}

/// The local rule applied at one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseRule {
    /// a_p = ã_p: the new modulus stays prime to p.
    Unchanged,
    /// 0 = a_p ≠ ã_p: pO divides the new modulus.
    WholePrime,
    /// 0 ≠ a_p ≠ ã_p: one prime above p divides the new modulus.
    OnePrime,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeStep {
    pub p: u64,
    pub rule: CaseRule,
    /// Prime-power coefficients forced a different local choice than the
    /// rule read off a_p.
    pub refined: bool,
    pub added: Vec<QuadIdeal>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extension {
    pub modulus: QuadIdeal,
    pub steps: Vec<PrimeStep>,
    pub bound: u64,
}

/// Local coefficients a_{p^r} for p^r ≤ bound.
fn local_sequence(xi: &HeckeChar, p: u64, bound: u64) -> Result<Vec<CycNum>> {
    let mut out = Vec::new();
    let (mut q, mut r) = (p, 1);
    while q <= bound {
        out.push(theta::prime_power_coeff(xi, p, r)?);
        r += 1;
        q = match q.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(out)
}

/// Extends the primitive character of member `target` so that its theta
/// series equals Θ(K, ξ) for ξ over the first member with a larger modulus.
pub fn extend_modulus(t: &Triple, xi: &HeckeChar, target: usize, bound: u64) -> Result<(HeckeChar, Extension)> {
    if !(1..=2).contains(&target) {
        return Err(Error::input("target must be 1 or 2"));
    }
    let base = &t.members[0];
    if xi.field() != base.field() || xi.conductor()?.1.exponents() != base.exponents()
        || xi.conductor()?.0 != base.modulus().finite()
    {
        return Err(Error::input("character does not lie over the first member"));
    }
    let goal = &t.members[target];
    let kt = goal.field();
    let mut modulus = goal.modulus().finite();
    let mut steps = Vec::new();
    let norm = xi.modulus().norm() as u64;
    for p in (2..=norm).filter(|&p| norm.is_multiple_of(p) && is_prime(p)) {
        let want = local_sequence(xi, p, bound)?;
        let full = local_sequence(base, p, bound)?;
        let (a, at) = (&want[0], &full[0]);
        let rule = if a == at {
            CaseRule::Unchanged
        } else if a.is_zero() {
            CaseRule::WholePrime
        } else {
            CaseRule::OnePrime
        };
        let above = kt.primes_above(p);
        let mut options: Vec<Vec<QuadIdeal>> = Vec::new();
        let rule_choice: Vec<Vec<QuadIdeal>> = match rule {
            CaseRule::Unchanged => vec![vec![]],
            CaseRule::WholePrime => vec![vec![kt.int_ideal(p as i64)]],
            CaseRule::OnePrime => {
                if above.len() != 2 {
                    return Err(Error::internal(format!("{p} arises in the one-prime case but is not split in the target field")));
                }
                above.iter().map(|q| vec![*q]).collect()
            }
        };
        options.extend(rule_choice.iter().cloned());
        let n_rule = options.len();
        options.push(vec![]);
        options.push(vec![kt.int_ideal(p as i64)]);
        options.extend(above.iter().map(|q| vec![*q]));
        let mut chosen = None;
        for (i, opt) in options.iter().enumerate() {
            let m = opt.iter().fold(modulus, |acc, q| kt.ideal_mul(&acc, q));
            let cand = goal.lift(&Modulus::new(kt, m)?)?;
            if local_sequence(&cand, p, bound)? == want {
                chosen = Some((opt.clone(), m, i >= n_rule));
                break;
            }
        }
        let (added, m, refined) =
            chosen.ok_or_else(|| Error::internal(format!("no local modulus at {p} reproduces the coefficients")))?;
        modulus = m;
        steps.push(PrimeStep { p, rule, refined, added });
    }
    let ext = goal.lift(&Modulus::new(kt, modulus)?)?;
    let x1 = theta_fast(xi, bound, Parallelism::Sequential)?;
    let x2 = theta_fast(&ext, bound, Parallelism::Sequential)?;
    if x1.coeffs != x2.coeffs {
        return Err(Error::internal("extended character does not reproduce the expansion"));
    }
    Ok((ext, Extension { modulus, steps, bound }))
}

// ------------------------------------------------------ reality, oddness

#[derive(Clone, Debug, Serialize)]
pub struct RealityReport {
    pub real_members: Vec<usize>,
    pub infinity_type: [u8; 2],
    /// det ρ(c) for a complex conjugation c, from the real member.
    pub det_complex_conjugation: i8,
    pub ok: bool,
}

/// Exactly one real field, whose character has one nonzero p_τ.
pub fn reality_and_oddness(t: &Triple) -> Result<RealityReport> {
    let real: Vec<usize> = (0..3).filter(|&i| t.members[i].field().is_real()).collect();
    if real.len() != 1 {
        return Err(Error::input(format!("{} real fields in the triple", real.len())));
    }
    let ty = t.members[real[0]].infinity_type()?;
    let s = ty[0] + ty[1];
    if s != 1 {
        return Err(Error::input("the real member has even infinity type"));
    }
    Ok(RealityReport {
        real_members: real,
        infinity_type: ty,
        det_complex_conjugation: if s % 2 == 1 { -1 } else { 1 },
        ok: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> HeckeChar {
        let k = QuadField::from_disc(-23).unwrap();
        ray_class_group(&Modulus::unit(k)).unwrap().character(1).unwrap()
    }

    #[test]
    fn cubic_class_character_has_no_partners() {
        let r = condition_b(&cubic(), 200).unwrap();
        assert!(r.cuspidal);
        assert_eq!(r.epsilon_order, 3);
        assert!(!r.holds);
        assert!(find_partners(&cubic(), None, Parallelism::Sequential).unwrap().is_empty());
    }

    #[test]
    fn trivial_character_fails() {
        let k = QuadField::from_disc(-4).unwrap();
        let xi = ray_class_group(&Modulus::unit(k)).unwrap().trivial_character();
        let r = condition_b(&xi, 100).unwrap();
        assert!(!r.cuspidal && !r.holds);
        assert!(r.prime_check.iter().all(|c| c.pass));
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(discriminants_dividing(20), vec![-4, 5, -20]);
        let k = QuadField::from_disc(-4).unwrap();
        // norm 25: 𝔭², (5); 𝔭̄² is the conjugate of 𝔭²
        let m = moduli_of_norm(k, 25);
        assert_eq!(m.len(), 2);
        assert!(m.iter().any(|x| x.finite() == k.int_ideal(5)));
        assert_eq!(moduli_of_norm(k, 2).len(), 1);
        assert_eq!(moduli_of_norm(k, 5).len(), 1);
    }
}
