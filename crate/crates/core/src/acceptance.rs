//! The acceptance suite and the structural invariants, shared by the
//! `acceptance` test target and the `selftest` command.

use std::time::Instant;

use serde::Serialize;

use crate::arith::primes_up_to;
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::grouprep::{self, check_equivalences, classify_image, induce, inducing_pairs, table_group, SubgroupChar};
use crate::io::TripleFile;
use crate::kohler::{self, CaseRule, Triple};
use crate::par::Parallelism;
use crate::quadfield::{QuadField, QuadIdeal, SplitType};
use crate::rayclass::{ray_class_group, HeckeChar, Modulus};
use crate::theta::{self, prime_power_coeff, theta_fast, theta_oracle};

/// The triple found by the level scan, recorded with its certificate.
pub const PINNED_TRIPLE: &str = include_str!("../fixtures/triple.json");

/// Largest level covered by the scan.
pub const SCAN_LEVEL: u64 = 400;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

fn run(id: &str, f: impl FnOnce() -> Result<String> + std::panic::UnwindSafe) -> Outcome {
    let t0 = Instant::now();
    let (pass, detail) = match std::panic::catch_unwind(f) {
        Ok(Ok(d)) => (true, d),
        Ok(Err(e)) => (false, e.to_string()),
        Err(_) => (false, "panicked".to_string()),
    };
    Outcome { id: id.to_string(), pass, detail, seconds: t0.elapsed().as_secs_f64() }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::internal(msg.into()))
    }
}

fn field(d: i64) -> QuadField {
    QuadField::from_disc(d).expect("fundamental discriminant")
}

fn char_on(d: i64, m: QuadIdeal, index: u64) -> Result<HeckeChar> {
    ray_class_group(&Modulus::new(field(d), m)?)?.character(index)
}

fn first_char(d: i64, m: QuadIdeal, pred: impl Fn(&HeckeChar) -> Result<bool>) -> Result<HeckeChar> {
    for xi in ray_class_group(&Modulus::new(field(d), m)?)?.characters() {
        if pred(&xi)? {
            return Ok(xi);
        }
    }
    Err(Error::internal(format!("no character of disc {d} modulus {m} has the property")))
}

/// Characters spanning imaginary and real fields, trivial and nontrivial
/// moduli, primitive and imprimitive.
pub fn oracle_fixtures() -> Result<Vec<HeckeChar>> {
    let gauss = field(-4);
    let eis = field(-3);
    let p13 = eis.primes_above(13)[0];
    let p7 = eis.primes_above(7)[0];
    let q5 = field(5);
    let m5 = field(-20);
    let mut v = vec![
        char_on(-4, QuadIdeal::UNIT, 0)?,
        char_on(-23, QuadIdeal::UNIT, 1)?,
        char_on(-39, QuadIdeal::UNIT, 1)?,
        char_on(-3, eis.int_ideal(7), 1)?,
        first_char(-3, p13, |x| Ok(!x.is_trivial()))?,
        first_char(13, field(13).int_ideal(3), theta::parity_ok)?,
        first_char(5, q5.int_ideal(4), theta::parity_ok)?,
        first_char(12, field(12).int_ideal(3), |x| Ok(!x.is_trivial()))?,
        first_char(-20, m5.ideal_mul(&m5.primes_above(3)[0], &m5.int_ideal(2)), |x| Ok(x.order() == 4))?,
        first_char(-4, gauss.int_ideal(10), |x| Ok(!x.is_primitive()? && !x.is_trivial()))?,
    ];
    let xi = first_char(-3, p13, |x| Ok(!x.is_trivial()))?;
    v.push(xi.lift(&Modulus::new(eis, eis.ideal_mul(&p13, &p7))?)?);
    v.push(xi.lift(&Modulus::new(eis, eis.ideal_mul(&p13, &eis.int_ideal(2)))?)?);
    Ok(v)
}

pub fn criterion_1() -> Result<String> {
    let fixtures = oracle_fixtures()?;
    let mut primitive = 0;
    for xi in &fixtures {
        let a = theta_oracle(xi, 300)?;
        let b = theta_fast(xi, 300, Parallelism::Parallel)?;
        let c = theta_fast(xi, 300, Parallelism::Sequential)?;
        if let Some(n) = (0..300).find(|&i| a.coeffs[i] != b.coeffs[i] || b.coeffs[i] != c.coeffs[i]) {
            return Err(Error::internal(format!(
                "disc {} modulus {}: engines differ at n = {}",
                xi.field().disc(),
                xi.modulus().finite(),
                n + 1
            )));
        }
        primitive += usize::from(xi.is_primitive()?);
    }
    let real = fixtures.iter().filter(|x| x.field().is_real()).count();
    ensure(fixtures.len() >= 10 && real > 0 && primitive < fixtures.len(), "fixture suite lacks coverage")?;
    Ok(format!("{} characters ({} real, {} imprimitive) agree to 300", fixtures.len(), real, fixtures.len() - primitive))
}

pub fn criterion_2() -> Result<String> {
    let xi = char_on(-4, QuadIdeal::UNIT, 0)?;
    let t = theta_oracle(&xi, 64)?;
    let int = |n: i64| CycNum::from_int(1, n);
    ensure(t.a(3) == &int(0) && t.a(5) == &int(2) && t.a(25) == &int(3), "a_3, a_5, a_25")?;
    for r in 0..=6 {
        ensure(t.a(1 << r) == &int(1), format!("a_{}", 1 << r))?;
    }
    let mut checked = 0;
    for chi in std::iter::once(xi).chain(oracle_fixtures()?) {
        let k = chi.field();
        for p in primes_up_to(50) {
            let SplitType::Inert(q) = k.split_prime(p) else { continue };
            if !k.coprime(&q, &chi.modulus().finite()) {
                continue;
            }
            for r in [1, 3, 5] {
                ensure(prime_power_coeff(&chi, p, r)?.is_zero(), format!("a_{p}^{r} ≠ 0 for disc {}", k.disc()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("values match; {checked} odd inert prime powers vanish"))
}

/// Table instances used by criteria 3 to 5.
pub fn table_instances() -> Vec<(u8, u32, u64)> {
    let mut v = Vec::new();
    for line in 1..=6u8 {
        for r in 1..=3u32 {
            let ok = match line {
                1 | 3 => r == 1,
                2 | 4 => r >= 2,
                _ => true,
            };
            if ok {
                for m in [1, 3] {
                    v.push((line, r, m));
                }
            }
        }
    }
    v
}

pub fn criterion_3() -> Result<String> {
    for (line, r, m) in table_instances() {
        let t = table_group(line, r, m)?;
        let g = &t.group;
        let chi = t.chi1()?;
        ensure(check_equivalences(g, &chi)?.all_true(), format!("line {line} r {r} m {m}: equivalences"))?;
        let rho = induce(g, &chi)?;
        let pairs = inducing_pairs(g, &rho);
        ensure(pairs.len() == 3, format!("line {line} r {r} m {m}: {} inducing pairs", pairs.len()))?;
        for p in pairs {
            let sub = SubgroupChar::new(g, p.subgroup, p.values)?;
            let other = induce(g, &sub)?;
            ensure(
                (0..g.len()).all(|x| rho[x].trace() == other[x].trace()),
                format!("line {line} r {r} m {m}: trace functions differ"),
            )?;
        }
    }
    let s3 = grouprep::dihedral(3)?;
    let c3: Vec<usize> = (0..s3.len()).filter(|&x| s3.element(x).is_diagonal()).collect();
    let values = (0..s3.len())
        .map(|x| if c3.contains(&x) { s3.element(x).entry(0, 0).phase() } else { None })
        .collect();
    let chi = SubgroupChar::new(&s3, c3.clone(), values)?;
    ensure(check_equivalences(&s3, &chi)?.all_false(), "S3 control")?;
    let t = table_group(1, 1, 1)?;
    let trivial = t.h[0].iter().fold(vec![None; t.group.len()], |mut v, &x| {
        v[x] = Some(num_rational::Ratio::from_integer(0));
        v
    });
    let red = SubgroupChar::new(&t.group, t.h[0].clone(), trivial)?;
    ensure(!grouprep::is_irreducible(&t.group, &red), "trivial χ is reducible")?;
    ensure(check_equivalences(&t.group, &red)?.all_false(), "reducible control")?;
    Ok(format!("{} table instances induced three ways; controls false", table_instances().len()))
}

fn expected_name(line: u8, r: u32, m: u64) -> String {
    let base = match (line, r) {
        (1, _) => "D4".to_string(),
        (2, r) => format!("D4oC{}", 1u64 << r),
        (3, _) => "Q8".to_string(),
        (_, 1) => "D4".to_string(),
        (_, r) => format!("M{}(2)", r + 2),
    };
    if m > 1 {
        format!("{base}xC{m}")
    } else {
        base
    }
}

pub fn criterion_4() -> Result<String> {
    for (line, r, m) in table_instances() {
        let t = table_group(line, r, m)?;
        let c = classify_image(&t.group)?;
        let want = expected_name(line, r, m);
        ensure(c.name == want, format!("line {line} r {r} m {m}: {} instead of {want}", c.name))?;
        ensure(
            grouprep::presentation_holds(&t.group, &t.h, &t.kernel, line, r),
            format!("line {line} r {r} m {m}: relations"),
        )?;
        ensure(c.presentation_ok, format!("line {line} r {r} m {m}: relations of the classified row"))?;
        if line >= 5 && r == 1 {
            ensure(c.name.starts_with("D4") && c.line == 1, "M3(2) is not D4")?;
        }
    }
    Ok("names and relations match; M3(2) ≅ D4 on lines 5 and 6".to_string())
}

pub fn criterion_5() -> Result<String> {
    for (line, r, m) in table_instances() {
        let t = table_group(line, r, m)?;
        let has = grouprep::has_det_minus_one_involution(&t.group);
        ensure(has == (line != 3), format!("line {line} r {r} m {m}: involution {has}"))?;
        if line == 3 {
            let g = &t.group;
            ensure(g.two_part().iter().all(|&x| g.element(x).det().is_one()), "determinant on the 2-part of Q8")?;
        }
    }
    Ok("det -1 involutions exist exactly off line 3".to_string())
}

/// The scanned triple, checked against the pinned fixture.
pub fn discovered_triple() -> Result<Triple> {
    let found = kohler::scan(SCAN_LEVEL, Parallelism::Parallel)?;
    let t = found.triple.ok_or_else(|| Error::internal(format!("no triple up to level {SCAN_LEVEL}")))?;
    let pinned = TripleFile::parse(PINNED_TRIPLE)?;
    ensure(TripleFile::of(&t) == pinned, "scan result differs from the pinned fixture")?;
    Ok(t)
}

fn same_member(a: &HeckeChar, b: &HeckeChar) -> bool {
    a.field() == b.field() && a.modulus() == b.modulus() && a.exponents() == b.exponents()
}

pub fn criterion_6() -> Result<String> {
    let t = discovered_triple()?;
    for (i, x) in t.members.iter().enumerate() {
        let p = kohler::find_partners(x, None, Parallelism::Parallel)?;
        ensure(p.len() == 2, format!("member {i} has {} partners", p.len()))?;
        for y in &p {
            let direct = t.members.iter().any(|z| same_member(y, z));
            let conj = kohler::conjugate(y)?;
            let flipped = t.members.iter().any(|z| same_member(&conj, z));
            ensure(direct || flipped, format!("member {i} finds a partner outside the triple"))?;
        }
    }
    let real = t.fields().iter().filter(|k| k.is_real()).count();
    ensure(real == 1, format!("{real} real fields"))?;
    kohler::reality_and_oddness(&t)?;
    let f = t.fields();
    Ok(format!(
        "level {}: discs {}, {}, {}; agreement to {} (Sturm {})",
        t.level,
        f[0].disc(),
        f[1].disc(),
        f[2].disc(),
        t.certificate.spot_check_bound,
        t.certificate.sturm_bound
    ))
}

pub fn criterion_7() -> Result<String> {
    let xi = char_on(-23, QuadIdeal::UNIT, 1)?;
    let r = kohler::condition_b(&xi, kohler::DEFAULT_PRIME_BOUND)?;
    ensure(r.cuspidal && r.epsilon_order == 3 && !r.holds, "condition report")?;
    ensure(kohler::find_partners(&xi, None, Parallelism::Parallel)?.is_empty(), "partners found")?;
    Ok("cuspidal, ε of order 3, no partners".to_string())
}

pub fn criterion_8() -> Result<String> {
    let t = discovered_triple()?;
    let (xi, p, rep) = kohler::imprimitive_counterexample(&t, kohler::DEFAULT_PRIME_BOUND)?;
    ensure(!rep.a_p.is_zero() && rep.a_p == rep.xi_sigma_p, "a_p")?;
    ensure(rep.partner_a_p.iter().all(CycNum::is_zero), "partner a_p")?;
    ensure(t.fields()[1].ideals_of_norm(p).is_empty(), "an ideal of norm p exists in K′")?;
    ensure(rep.prime_check_passes, "condition (3) fails")?;
    ensure(!xi.is_primitive()?, "counterexample character is primitive")?;
    Ok(format!("p = {p}, modulus {}, a_p = {}", rep.modulus, rep.a_p))
}

/// Imprimitive characters over the first member of the triple, one per
/// local rule plus one needing prime-power refinement.
pub fn extension_fixtures(t: &Triple) -> Result<Vec<(HeckeChar, usize)>> {
    let base = &t.members[0];
    let k = base.field();
    let f = base.modulus().finite();
    let mut out = Vec::new();
    let lift = |extra: &QuadIdeal| -> Result<HeckeChar> { base.lift(&Modulus::new(k, k.ideal_mul(&f, extra))?) };
    // a prime already in the conductor
    if let Some((q, _)) = k.factor_ideal(&f).first() {
        out.push((lift(q)?, 2));
    }
    let split_all = primes_up_to(kohler::DEFAULT_PRIME_BOUND)
        .into_iter()
        .find(|&p| !t.level.is_multiple_of(p) && t.fields().iter().all(|x| matches!(x.split_prime(p), SplitType::Split(..))))
        .ok_or_else(|| Error::internal("no prime split in all three fields"))?;
    out.push((lift(&k.int_ideal(split_all as i64))?, 1));
    out.push((lift(&k.primes_above(split_all)[0])?, 2));
    out.push((lift(&k.primes_above(split_all)[1])?, 1));
    if let Some(p) = primes_up_to(50).into_iter().find(|&p| matches!(k.split_prime(p), SplitType::Inert(_)) && !t.level.is_multiple_of(p)) {
        out.push((lift(&k.int_ideal(p as i64))?, 2));
    }
    Ok(out)
}

pub fn criterion_9() -> Result<String> {
    let t = discovered_triple()?;
    let (_, triv) = kohler::extend_modulus(&t, &t.members[0], 1, 300)?;
    ensure(
        triv.steps.iter().all(|s| s.rule == CaseRule::Unchanged && s.added.is_empty())
            && triv.modulus == t.members[1].modulus().finite(),
        "primitive input",
    )?;
    let mut seen = Vec::new();
    for (xi, target) in extension_fixtures(&t)? {
        let (_, ext) = kohler::extend_modulus(&t, &xi, target, 300)?;
        for s in ext.steps {
            if !s.refined {
                seen.push(s.rule);
            }
        }
    }
    for rule in [CaseRule::Unchanged, CaseRule::WholePrime, CaseRule::OnePrime] {
        ensure(seen.contains(&rule), format!("rule {rule:?} not exercised"))?;
    }
    Ok(format!("{} local steps reproduce the expansions to 300", seen.len()))
}

pub fn criterion_10() -> Result<String> {
    let t = discovered_triple()?;
    let tp = kohler::trace_pattern(&t, 500)?;
    ensure(tp.nonzero == tp.split_in_all, "nonzero a_p differ from primes split in all three fields")?;
    ensure(tp.roots_ok, "a nonzero a_p is not twice an n-th root of unity")?;
    let img = kohler::image_class_of_triple(&t)?;
    Ok(format!("{} primes with a_p ≠ 0, n = {}, image {}", tp.nonzero.len(), img.n, img.class.name))
}

/// Criteria in order.
pub fn run_all() -> Vec<Outcome> {
    let crit: [(&str, fn() -> Result<String>); 10] = [
        ("1 oracle equivalence", criterion_1),
        ("2 local coefficients", criterion_2),
        ("3 triple induction", criterion_3),
        ("4 image classification", criterion_4),
        ("5 determinant dichotomy", criterion_5),
        ("6 discovery", criterion_6),
        ("7 negative control", criterion_7),
        ("8 imprimitive counterexample", criterion_8),
        ("9 modulus extension", criterion_9),
        ("10 trace pattern", criterion_10),
    ];
    crit.into_iter().map(|(id, f)| run(id, f)).collect()
}

/// Structural invariants of the discovered triple.
pub fn invariants() -> Vec<Outcome> {
    vec![
        run("symmetry of the partner search", || {
            let t = discovered_triple()?;
            for x in &t.members {
                let p = kohler::find_partners(x, None, Parallelism::Sequential)?;
                ensure(p.len() == 2, "partner count")?;
            }
            Ok("each member finds the other two".to_string())
        }),
        run("agreement beyond the Sturm bound", || {
            let t = discovered_triple()?;
            let b = t.certificate.spot_check_bound;
            for x in &t.members[1..] {
                ensure(theta::first_disagreement(&t.members[0], x, b)?.is_none(), "disagreement")?;
            }
            Ok(format!("to {b}"))
        }),
        run("Frobenius pattern and ε", || {
            let t = discovered_triple()?;
            let tp = kohler::trace_pattern(&t, 500)?;
            ensure(tp.holds(), "pattern")?;
            Ok(format!("{} split primes", tp.split_in_all.len()))
        }),
    ]
}

/// One line per outcome.
pub fn report_line(o: &Outcome) -> String {
    format!("{} {}: {} ({:.2}s)", if o.pass { "PASS" } else { "FAIL" }, o.id, o.detail, o.seconds)
}
