//! Narrow ray class groups J(𝔪)/P(𝔪) of quadratic fields and their
//! characters.
//!
//! A class is keyed by an ordinary class representative C_j (norm prime to
//! N(𝔪)) together with the orbit of (β mod 𝔪, signs of β) under the image of
//! the global units, where I = β·C_j. The group law is carried by a cocycle
//! on the representatives, so products never require ideal arithmetic.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, lcm_all, mod_inv};
pub use crate::cyclotomic::{phase_mod1, phase_to_cyc, Phase};
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::quadfield::{QuadField, QuadIdeal, QuadInt, MAX_NORM};
use crate::snf::smith;

/// Largest N(𝔪) accepted.
pub const MAX_MODULUS_NORM: i64 = 200_000;
/// Largest ray class group order accepted.
pub const MAX_GROUP_ORDER: usize = 2_000_000;

// ---------------------------------------------------------------- modulus

/// A finite modulus 𝔪; for real fields both real places are included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Modulus {
    field: QuadField,
    finite: QuadIdeal,
}

impl Modulus {
    pub fn new(field: QuadField, finite: QuadIdeal) -> Result<Self> {
        if !field.is_ideal(&finite) {
            return Err(Error::input(format!("{finite} is not an ideal of disc {}", field.disc())));
        }
        Ok(Modulus { field, finite })
    }

    pub fn unit(field: QuadField) -> Self {
        Modulus { field, finite: QuadIdeal::UNIT }
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn finite(&self) -> QuadIdeal {
        self.finite
    }

    pub fn norm(&self) -> i64 {
        self.finite.norm()
    }

    pub fn is_sigma_stable(&self) -> bool {
        self.field.conj_ideal(&self.finite) == self.finite
    }

    /// Number of real places in the modulus.
    pub fn real_places(&self) -> usize {
        if self.field.is_real() {
            2
        } else {
            0
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_real() {
            write!(f, "{}·∞₁∞₂", self.finite)
        } else {
            write!(f, "{}", self.finite)
        }
    }
}

// ------------------------------------------------------ ordinary classes

fn field_class_cache() -> &'static RwLock<HashMap<i64, Arc<Vec<QuadIdeal>>>> {
    static C: OnceLock<RwLock<HashMap<i64, Arc<Vec<QuadIdeal>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn same_class(field: &QuadField, i: &QuadIdeal, j: &QuadIdeal) -> Result<bool> {
    let prod = field.ideal_mul(i, &field.conj_ideal(j));
    Ok(field.find_generator(&prod)?.is_some())
}

/// One ideal per ordinary ideal class, taken among ideals of norm below the
/// Minkowski bound.
pub fn class_group_reps(field: &QuadField) -> Result<Arc<Vec<QuadIdeal>>> {
    if let Some(r) = field_class_cache().read().unwrap().get(&field.disc()) {
        return Ok(r.clone());
    }
    let d = field.disc().abs() as f64;
    let bound = if field.is_real() { d.sqrt() / 2.0 } else { 2.0 / std::f64::consts::PI * d.sqrt() };
    let mut reps: Vec<QuadIdeal> = Vec::new();
    for n in 1..=(bound.floor() as u64).max(1) {
        for i in field.ideals_of_norm(n) {
            let mut known = false;
            for r in &reps {
                if same_class(field, &i, r)? {
                    known = true;
                    break;
                }
            }
            if !known {
                reps.push(i);
            }
        }
    }
    let reps = Arc::new(reps);
    field_class_cache().write().unwrap().insert(field.disc(), reps.clone());
    Ok(reps)
}

/// The ordinary class number h.
pub fn class_number(field: &QuadField) -> Result<usize> {
    Ok(class_group_reps(field)?.len())
}

// -------------------------------------------------- residues mod units

/// ((O/𝔪)^× × {±1}^{r₁}) modulo the image of the global units.
#[derive(Debug)]
struct UnitQuotient {
    field: QuadField,
    m: QuadIdeal,
    /// (residue index · 4 + sign bits) → orbit id, `u32::MAX` if not coprime.
    orbit: Vec<u32>,
    /// A representative (residue index, sign bits) per orbit.
    reps: Vec<(u32, u8)>,
}

fn sign_bits(field: &QuadField, v: QuadInt) -> u8 {
    if !field.is_real() {
        return 0;
    }
    let s = field.signs(v);
    u8::from(s[0] < 0) | (u8::from(s[1] < 0) << 1)
}

impl UnitQuotient {
    fn new(field: QuadField, m: QuadIdeal) -> Result<Self> {
        let n = m.norm() as usize;
        let sign_classes: u8 = if field.is_real() { 4 } else { 1 };
        let mut coprime = vec![false; n];
        for v in field.residues(&m) {
            coprime[Self::index_in(&m, v)] = field.element_coprime(v, &m);
        }
        let gens: Vec<(u32, u8)> = field
            .unit_generators()?
            .into_iter()
            .map(|u| (Self::index_in(&m, field.reduce_mod(u, &m)) as u32, sign_bits(&field, u)))
            .collect();
        let mut q = UnitQuotient { field, m, orbit: vec![u32::MAX; n * 4], reps: Vec::new() };
        for r in 0..n {
            if !coprime[r] {
                continue;
            }
            for s in 0..sign_classes {
                if q.orbit[r * 4 + s as usize] != u32::MAX {
                    continue;
                }
                let id = q.reps.len() as u32;
                q.reps.push((r as u32, s));
                q.orbit[r * 4 + s as usize] = id;
                let mut queue = VecDeque::from([(r as u32, s)]);
                while let Some(x) = queue.pop_front() {
                    for &g in &gens {
                        let y = q.mul_raw(x, g);
                        let slot = &mut q.orbit[y.0 as usize * 4 + y.1 as usize];
                        if *slot == u32::MAX {
                            *slot = id;
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
        Ok(q)
    }

    fn index_in(m: &QuadIdeal, v: QuadInt) -> usize {
        (v.y * m.a() + v.x) as usize
    }

    fn index(&self, v: QuadInt) -> usize {
        Self::index_in(&self.m, self.field.reduce_mod(v, &self.m))
    }

    fn residue(&self, idx: u32) -> QuadInt {
        let a = self.m.a();
        QuadInt::new(idx as i64 % a, idx as i64 / a)
    }

    fn mul_raw(&self, x: (u32, u8), y: (u32, u8)) -> (u32, u8) {
        let p = self.field.mul_mod(self.residue(x.0), self.residue(y.0), &self.m);
        (Self::index_in(&self.m, p) as u32, x.1 ^ y.1)
    }

    fn size(&self) -> usize {
        self.reps.len()
    }

    fn orbit_of(&self, v: QuadInt, s: u8) -> Result<usize> {
        let id = self.orbit[self.index(v) * 4 + s as usize];
        if id == u32::MAX {
            return Err(Error::internal(format!("residue {v} is not a unit modulo {}", self.m)));
        }
        Ok(id as usize)
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let z = self.mul_raw(self.reps[x], self.reps[y]);
        self.orbit[z.0 as usize * 4 + z.1 as usize] as usize
    }
}

// ------------------------------------------------------------ group core

/// Class keys and the group law, without a chosen basis.
#[derive(Debug)]
struct Core {
    modulus: Modulus,
    reps: Vec<QuadIdeal>,
    rep_norm_inv: Vec<i64>,
    units: UnitQuotient,
    cocycle: Vec<(usize, usize)>,
}

impl Core {
    fn new(modulus: Modulus) -> Result<Self> {
        let field = modulus.field;
        let m = modulus.finite;
        let nm = m.norm();
        let classes = class_group_reps(&field)?;
        // smallest representative of norm prime to N(𝔪) in each class
        let mut chosen: Vec<Option<QuadIdeal>> = vec![None; classes.len()];
        let mut n = 1u64;
        while chosen.iter().any(Option::is_none) {
            if n > MAX_NORM as u64 {
                return Err(Error::bound("no class representative prime to the modulus"));
            }
            if gcd(n as i64, nm) == 1 {
                for i in field.ideals_of_norm(n) {
                    for (k, c) in classes.iter().enumerate() {
                        if chosen[k].is_none() && same_class(&field, &i, c)? {
                            chosen[k] = Some(i);
                            break;
                        }
                    }
                }
            }
            n += 1;
        }
        let mut reps: Vec<QuadIdeal> = chosen.into_iter().map(Option::unwrap).collect();
        reps.sort_by_key(|r| (r.norm(), *r));
        let a = m.a() as i128;
        let rep_norm_inv = reps
            .iter()
            .map(|r| mod_inv(r.norm() as i128, a).map(|v| v as i64))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::internal("class representative norm not invertible"))?;
        let units = UnitQuotient::new(field, m)?;
        let mut core = Core { modulus, reps, rep_norm_inv, units, cocycle: Vec::new() };
        let h = core.reps.len();
        let mut cocycle = Vec::with_capacity(h * h);
        for j1 in 0..h {
            for j2 in 0..h {
                let prod = field.ideal_mul(&core.reps[j1], &core.reps[j2]);
                let e = core.key(&prod)?;
                cocycle.push((e / core.units.size(), e % core.units.size()));
            }
        }
        core.cocycle = cocycle;
        Ok(core)
    }

    fn order(&self) -> usize {
        self.reps.len() * self.units.size()
    }

    fn identity(&self) -> usize {
        self.units.orbit_of(QuadInt::int(1), 0).expect("1 is a unit")
    }

    /// Element id of an ideal prime to 𝔪.
    fn key(&self, i: &QuadIdeal) -> Result<usize> {
        let field = &self.modulus.field;
        let m = &self.modulus.finite;
        if !field.coprime(i, m) {
            return Err(Error::input(format!("{i} is not coprime to the modulus {m}")));
        }
        for (j, c) in self.reps.iter().enumerate() {
            let prod = field.ideal_mul(i, &field.conj_ideal(c));
            if let Some(g) = field.find_generator(&prod)? {
                let beta = field.mul_mod(g, QuadInt::int(self.rep_norm_inv[j]), m);
                let q = self.units.orbit_of(beta, sign_bits(field, g))?;
                return Ok(j * self.units.size() + q);
            }
        }
        Err(Error::internal(format!("{i} lies in no ideal class")))
    }

    /// Element id of the principal class (β) for β prime to 𝔪 with given signs.
    fn principal_key(&self, beta: QuadInt, signs: u8) -> Result<usize> {
        self.units.orbit_of(beta, signs)
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let qn = self.units.size();
        let h = self.reps.len();
        let (j1, q1) = (x / qn, x % qn);
        let (j2, q2) = (y / qn, y % qn);
        let (j3, qc) = self.cocycle[j1 * h + j2];
        j3 * qn + self.units.mul(self.units.mul(q1, q2), qc)
    }

    fn pow(&self, x: usize, mut e: u64) -> usize {
        let mut acc = self.identity();
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }
}

// ------------------------------------------------------------ ray classes

/// A narrow ray class group with a Smith normal form basis.
pub struct RayClassGroup {
    core: Core,
    invariants: Vec<u64>,
    generators: Vec<QuadIdeal>,
    rank: usize,
    dlog: Vec<u64>,
    memo: RwLock<HashMap<QuadIdeal, usize>>,
}

impl fmt::Debug for RayClassGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RayClassGroup")
            .field("modulus", &self.core.modulus)
            .field("invariants", &self.invariants)
            .field("generators", &self.generators)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    schema: u32,
    disc: i64,
    modulus: QuadIdeal,
    invariants: Vec<u64>,
    generators: Vec<QuadIdeal>,
}

fn cache_dir_slot() -> &'static RwLock<Option<PathBuf>> {
    static S: OnceLock<RwLock<Option<PathBuf>>> = OnceLock::new();
    S.get_or_init(|| RwLock::new(std::env::var_os("KOEHLER_CACHE").map(PathBuf::from)))
}

/// Overrides the on-disk group cache directory (`None` disables it).
pub fn set_cache_dir(dir: Option<PathBuf>) {
    *cache_dir_slot().write().unwrap() = dir;
}

pub fn cache_dir() -> Option<PathBuf> {
    cache_dir_slot().read().unwrap().clone()
}

fn cache_path(dir: &Path, m: &Modulus) -> PathBuf {
    let f = m.finite;
    dir.join(format!("ray_{}_{}_{}_{}.json", m.field.disc(), f.a(), f.b(), f.c()))
}

/// Atomically writes `contents` to `path` (temporary file, then rename).
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

fn group_cache() -> &'static RwLock<HashMap<Modulus, Arc<RayClassGroup>>> {
    static C: OnceLock<RwLock<HashMap<Modulus, Arc<RayClassGroup>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// The narrow ray class group of modulus 𝔪 (memoized in memory and, when a
/// cache directory is configured, on disk).
pub fn ray_class_group(m: &Modulus) -> Result<Arc<RayClassGroup>> {
    if let Some(g) = group_cache().read().unwrap().get(m) {
        return Ok(g.clone());
    }
    if m.norm() > MAX_MODULUS_NORM {
        return Err(Error::bound(format!("modulus norm {} exceeds {MAX_MODULUS_NORM}", m.norm())));
    }
    let core = Core::new(*m)?;
    if core.order() > MAX_GROUP_ORDER {
        return Err(Error::bound(format!("ray class group of order {} too large", core.order())));
    }
    let dir = cache_dir();
    let cached = dir.as_ref().and_then(|d| {
        let rec: CacheRecord = serde_json::from_slice(&fs::read(cache_path(d, m)).ok()?).ok()?;
        (rec.schema == 1 && rec.disc == m.field.disc() && rec.modulus == m.finite)
            .then_some((rec.invariants, rec.generators))
    });
    let group = match cached.and_then(|(inv, gens)| RayClassGroup::assemble(&core, inv, gens).ok()) {
        Some((invariants, generators, rank, dlog)) => {
            RayClassGroup { core, invariants, generators, rank, dlog, memo: Default::default() }
        }
        None => {
            let (inv, gens) = RayClassGroup::find_basis(&core)?;
            let (invariants, generators, rank, dlog) = RayClassGroup::assemble(&core, inv, gens)?;
            if let Some(d) = &dir {
                let rec = CacheRecord {
                    schema: 1,
                    disc: m.field.disc(),
                    modulus: m.finite,
                    invariants: invariants.clone(),
                    generators: generators.clone(),
                };
                let body = serde_json::to_vec(&rec).expect("cache record serializes");
                // a failed cache write only costs a recomputation later
                let _ = write_atomic(&cache_path(d, m), &body);
            }
            RayClassGroup { core, invariants, generators, rank, dlog, memo: Default::default() }
        }
    };
    let group = Arc::new(group);
    group_cache().write().unwrap().entry(*m).or_insert_with(|| group.clone());
    Ok(group)
}

/// Coordinates of an element in a staircase of greedy generators.
type Coords = Vec<i64>;

impl RayClassGroup {
    /// Greedy prime generators, Smith normal form, and the smallest ideal
    /// in each basis class.
    fn find_basis(core: &Core) -> Result<(Vec<u64>, Vec<QuadIdeal>)> {
        let field = core.modulus.field;
        let m = core.modulus.finite;
        let n = core.order();
        let mut coords: Vec<Option<Coords>> = vec![None; n];
        let id = core.identity();
        coords[id] = Some(Vec::new());
        let mut members = vec![id];
        let mut gens: Vec<usize> = Vec::new();
        let mut relations: Vec<Coords> = Vec::new();
        let mut bound = (6 * field.disc().abs() * m.norm()).max(50) as u64;
        let mut scanned = 0u64;
        while members.len() < n {
            if bound > MAX_NORM as u64 {
                return Err(Error::bound("prime generators of the ray class group not found"));
            }
            for p in field.prime_ideals_up_to(bound) {
                if (p.norm() as u64) <= scanned || !field.coprime(&p, &m) {
                    continue;
                }
                let g = core.key(&p)?;
                if coords[g].is_some() {
                    continue;
                }
                let k = gens.len();
                let mut fresh = Vec::new();
                let mut power = g;
                let mut e = 1i64;
                loop {
                    if let Some(c) = &coords[power] {
                        let mut row = vec![0i64; k + 1];
                        row[k] = e;
                        for (j, x) in c.iter().enumerate() {
                            row[j] -= x;
                        }
                        relations.push(row);
                        break;
                    }
                    for &s in &members {
                        let x = core.mul(s, power);
                        let mut c = coords[s].clone().unwrap();
                        c.resize(k, 0);
                        c.push(e);
                        coords[x] = Some(c);
                        fresh.push(x);
                    }
                    power = core.mul(power, g);
                    e += 1;
                }
                members.extend(fresh);
                gens.push(g);
                if members.len() == n {
                    break;
                }
            }
            scanned = bound;
            bound *= 2;
        }
        let k = gens.len();
        let rows: Vec<Vec<i128>> = relations
            .into_iter()
            .map(|mut r| {
                r.resize(k, 0);
                r.into_iter().map(i128::from).collect()
            })
            .collect();
        let s = smith(&rows, k);
        let mut invariants = Vec::new();
        let mut targets = Vec::new();
        for i in 0..k {
            let d = s.diag[i];
            if d == 1 {
                continue;
            }
            if d <= 0 {
                return Err(Error::internal("ray class relations are not of full rank"));
            }
            let mut x = id;
            for (j, &g) in gens.iter().enumerate() {
                let exp = s.v_inv[i][j].rem_euclid(n as i128) as u64;
                x = core.mul(x, core.pow(g, exp));
            }
            invariants.push(d as u64);
            targets.push(x);
        }
        // smallest ideal in each basis class
        let mut found: Vec<Option<QuadIdeal>> = vec![None; targets.len()];
        let mut norm = 1u64;
        while found.iter().any(Option::is_none) {
            if norm > MAX_NORM as u64 {
                return Err(Error::bound("no small ideal found in a basis class"));
            }
            for i in field.ideals_of_norm(norm) {
                if !field.coprime(&i, &m) {
                    continue;
                }
                let x = core.key(&i)?;
                for (t, f) in targets.iter().zip(found.iter_mut()) {
                    if *t == x && f.is_none() {
                        *f = Some(i);
                    }
                }
            }
            norm += 1;
        }
        Ok((invariants, found.into_iter().map(Option::unwrap).collect()))
    }

    /// Builds the discrete-log table from a basis, checking that it is one.
    #[allow(clippy::type_complexity)]
    fn assemble(
        core: &Core,
        invariants: Vec<u64>,
        generators: Vec<QuadIdeal>,
    ) -> Result<(Vec<u64>, Vec<QuadIdeal>, usize, Vec<u64>)> {
        let n = core.order();
        let rank = invariants.len();
        if generators.len() != rank || invariants.iter().product::<u64>() != n as u64 {
            return Err(Error::internal("basis does not match the group order"));
        }
        if invariants.windows(2).any(|w| w[1] % w[0] != 0) || invariants.contains(&1) {
            return Err(Error::internal("invariants are not an elementary divisor chain"));
        }
        let gen_ids = generators.iter().map(|g| core.key(g)).collect::<Result<Vec<_>>>()?;
        let mut dlog = vec![u64::MAX; n * rank.max(1)];
        let mut seen = vec![false; n];
        let mut layer: Vec<(usize, Vec<u64>)> = vec![(core.identity(), vec![0; rank])];
        for i in 0..rank {
            let mut next = Vec::with_capacity(layer.len() * invariants[i] as usize);
            for (x, v) in layer {
                let mut cur = x;
                for t in 0..invariants[i] {
                    let mut w = v.clone();
                    w[i] = t;
                    next.push((cur, w));
                    cur = core.mul(cur, gen_ids[i]);
                }
                if cur != x {
                    return Err(Error::internal("generator order differs from its invariant"));
                }
            }
            layer = next;
        }
        for (x, v) in layer {
            if seen[x] {
                return Err(Error::internal("basis elements are dependent"));
            }
            seen[x] = true;
            dlog[x * rank..(x + 1) * rank].copy_from_slice(&v);
        }
        Ok((invariants, generators, rank, dlog))
    }

    pub fn modulus(&self) -> &Modulus {
        &self.core.modulus
    }

    pub fn field(&self) -> QuadField {
        self.core.modulus.field
    }

    /// Elementary divisors d₁ | d₂ | … (all > 1).
    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn generators(&self) -> &[QuadIdeal] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.core.order() as u64
    }

    /// The ordinary class number h.
    pub fn class_number(&self) -> usize {
        self.core.reps.len()
    }

    /// Exponent of the group, the common order lcm(dᵢ) of character values.
    pub fn exponent(&self) -> u64 {
        lcm_all(self.invariants.iter().copied())
    }

    fn vector_of(&self, x: usize) -> Vec<u64> {
        self.dlog[x * self.rank..(x + 1) * self.rank].to_vec()
    }

    /// Discrete logarithm of an ideal prime to 𝔪.
    pub fn class_of(&self, i: &QuadIdeal) -> Result<Vec<u64>> {
        if let Some(&x) = self.memo.read().unwrap().get(i) {
            return Ok(self.vector_of(x));
        }
        let x = self.core.key(i)?;
        self.memo.write().unwrap().insert(*i, x);
        Ok(self.vector_of(x))
    }

    /// Discrete logarithm of the principal class (β), β prime to 𝔪, with the
    /// sign pattern given by `negative` at the real places.
    pub fn class_of_principal(&self, beta: QuadInt, negative: [bool; 2]) -> Result<Vec<u64>> {
        let bits = if self.field().is_real() {
            u8::from(negative[0]) | (u8::from(negative[1]) << 1)
        } else {
            0
        };
        Ok(self.vector_of(self.core.principal_key(beta, bits)?))
    }

    /// All exponent vectors in mixed-radix order (first coordinate fastest).
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.rank]];
        for (i, &d) in self.invariants.iter().enumerate() {
            out = (0..d)
                .flat_map(|t| {
                    out.iter().map(move |v| {
                        let mut w = v.clone();
                        w[i] = t;
                        w
                    })
                })
                .collect();
        }
        // first coordinate fastest
        out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        out
    }

    /// Every character, in canonical order (index = mixed radix of the
    /// exponents, first generator least significant).
    pub fn characters(self: &Arc<Self>) -> Vec<HeckeChar> {
        (0..self.order()).map(|i| self.character(i).expect("index in range")).collect()
    }

    /// Character number `index` of the canonical enumeration.
    pub fn character(self: &Arc<Self>, index: u64) -> Result<HeckeChar> {
        if index >= self.order() {
            return Err(Error::input(format!("character index {index} ≥ group order {}", self.order())));
        }
        let mut rest = index;
        let exps = self
            .invariants
            .iter()
            .map(|&d| {
                let k = rest % d;
                rest /= d;
                k
            })
            .collect();
        Ok(HeckeChar::from_parts(self.clone(), exps))
    }

    pub fn trivial_character(self: &Arc<Self>) -> HeckeChar {
        HeckeChar::from_parts(self.clone(), vec![0; self.rank])
    }

    /// The character with value ζ_{dᵢ}^{kᵢ} on the i-th generator.
    pub fn make_char(self: &Arc<Self>, exps: &[u64]) -> Result<HeckeChar> {
        if exps.len() != self.rank {
            return Err(Error::input(format!(
                "{} exponents given for a group of rank {}",
                exps.len(),
                self.rank
            )));
        }
        if let Some((k, d)) = exps.iter().zip(&self.invariants).find(|(k, d)| *k >= *d) {
            return Err(Error::input(format!("exponent {k} out of range for invariant {d}")));
        }
        Ok(HeckeChar::from_parts(self.clone(), exps.to_vec()))
    }

    /// The character with the given root-of-unity values on the generators.
    pub fn make_char_from_values(self: &Arc<Self>, values: &[CycNum]) -> Result<HeckeChar> {
        if values.len() != self.rank {
            return Err(Error::input("one value per generator required"));
        }
        let mut exps = Vec::with_capacity(values.len());
        for (v, &d) in values.iter().zip(&self.invariants) {
            let (m, k) = v
                .root_exponent()
                .ok_or_else(|| Error::input(format!("value {v} is not a root of unity")))?;
            // v = ζ_m^k must satisfy v^d = 1
            let p = Ratio::new(k as i64, m as i64) * Ratio::from_integer(d as i64);
            if !p.is_integer() {
                return Err(Error::input(format!("value {v} has order not dividing {d}")));
            }
            exps.push((Ratio::new(k as i64, m as i64) * Ratio::from_integer(d as i64)).to_integer() as u64);
        }
        Ok(HeckeChar::from_parts(self.clone(), exps))
    }

    /// Whether ideal I is in the kernel of the projection to modulus 𝔣 | 𝔪:
    /// the classes (β) with β ≡ 1 mod 𝔣, totally positive, as vectors.
    fn kernel_to(&self, f: &QuadIdeal) -> Vec<Vec<u64>> {
        let field = self.field();
        let m = self.core.modulus.finite;
        let mut out = Vec::new();
        let mut seen = vec![false; self.core.order()];
        for v in field.residues(&m) {
            let shifted = QuadInt::new(v.x - 1, v.y);
            if !f.contains(shifted) {
                continue;
            }
            let Ok(x) = self.core.principal_key(v, 0) else { continue };
            if !seen[x] {
                seen[x] = true;
                out.push(self.vector_of(x));
            }
        }
        out
    }
}

// ------------------------------------------------------------- characters

/// A character of a narrow ray class group, stored as exponents kᵢ with
/// value ζ_{dᵢ}^{kᵢ} on the i-th generator.
#[derive(Clone)]
pub struct HeckeChar {
    group: Arc<RayClassGroup>,
    exps: Vec<u64>,
    conductor: Arc<OnceLock<(QuadIdeal, HeckeChar)>>,
}

impl PartialEq for HeckeChar {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus() == other.group.modulus() && self.exps == other.exps
    }
}

impl Eq for HeckeChar {}

impl fmt::Debug for HeckeChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HeckeChar(disc {}, modulus {}, exps {:?} of {:?})",
            self.field().disc(),
            self.group.modulus().finite(),
            self.exps,
            self.group.invariants()
        )
    }
}

impl HeckeChar {
    fn from_parts(group: Arc<RayClassGroup>, exps: Vec<u64>) -> Self {
        HeckeChar { group, exps, conductor: Arc::new(OnceLock::new()) }
    }

    pub fn group(&self) -> &Arc<RayClassGroup> {
        &self.group
    }

    pub fn field(&self) -> QuadField {
        self.group.field()
    }

    pub fn modulus(&self) -> &Modulus {
        self.group.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    /// Position in the canonical enumeration of the group's characters.
    pub fn index(&self) -> u64 {
        self.exps.iter().zip(&self.group.invariants).rev().fold(0, |acc, (k, d)| acc * d + k)
    }

    /// Order of the character.
    pub fn order(&self) -> u64 {
        lcm_all(self.exps.iter().zip(&self.group.invariants).map(|(&k, &d)| d / k.gcd(&d)))
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&k| k == 0)
    }

    /// Value on an exponent vector, as a phase.
    pub fn phase_of_vector(&self, v: &[u64]) -> Phase {
        let p = self
            .exps
            .iter()
            .zip(v)
            .zip(&self.group.invariants)
            .fold(Ratio::from_integer(0), |acc, ((&k, &x), &d)| {
                acc + Ratio::new(((k as u128 * x as u128) % d as u128) as i64, d as i64)
            });
        phase_mod1(p)
    }

    /// ξ(I) as a phase, or `None` when I is not prime to 𝔪.
    pub fn phase(&self, i: &QuadIdeal) -> Result<Option<Phase>> {
        if !self.field().coprime(i, &self.modulus().finite()) {
            return Ok(None);
        }
        Ok(Some(self.phase_of_vector(&self.group.class_of(i)?)))
    }

    /// ξ(I) in ℤ[ζ_M], M = lcm(dᵢ); zero when I is not prime to 𝔪.
    pub fn evaluate(&self, i: &QuadIdeal) -> Result<CycNum> {
        let order = self.group.exponent();
        Ok(match self.phase(i)? {
            Some(p) => phase_to_cyc(p, order),
            None => CycNum::zero(order),
        })
    }

    /// Infinity type (p_τ₁, p_τ₂): ξ((α)) = (-1)^{p_τ} for α ≡ 1 mod 𝔪
    /// negative at τ only. Zero for imaginary fields.
    pub fn infinity_type(&self) -> Result<[u8; 2]> {
        if !self.field().is_real() {
            return Ok([0, 0]);
        }
        let mut out = [0u8; 2];
        for (t, slot) in out.iter_mut().enumerate() {
            let neg = [t == 0, t == 1];
            let v = self.group.class_of_principal(QuadInt::int(1), neg)?;
            let p = self.phase_of_vector(&v);
            *slot = if p == Ratio::from_integer(0) {
                0
            } else if p == Ratio::new(1, 2) {
                1
            } else {
                return Err(Error::internal("sign class has a value other than ±1"));
            };
        }
        Ok(out)
    }

    /// Whether ξ is trivial on the kernel of the projection to modulus 𝔣.
    fn factors_through(&self, f: &QuadIdeal) -> bool {
        self.group.kernel_to(f).iter().all(|v| *self.phase_of_vector(v).numer() == 0)
    }

    /// Conductor 𝔣 and the primitive character ξ̃ of modulus 𝔣 inducing ξ.
    pub fn conductor(&self) -> Result<(QuadIdeal, HeckeChar)> {
        if let Some(c) = self.conductor.get() {
            return Ok(c.clone());
        }
        let field = self.field();
        let mut f = self.modulus().finite();
        'descend: loop {
            for (p, _) in field.factor_ideal(&f) {
                let smaller = field.ideal_div(&f, &p)?;
                if self.factors_through(&smaller) {
                    f = smaller;
                    continue 'descend;
                }
            }
            break;
        }
        let prim = if f == self.modulus().finite() { self.clone() } else { self.descend(&f)? };
        let _ = prim.conductor.set((f, prim.clone()));
        let _ = self.conductor.set((f, prim.clone()));
        Ok((f, prim))
    }

    pub fn is_primitive(&self) -> Result<bool> {
        Ok(self.conductor()?.0 == self.modulus().finite())
    }

    /// The character of modulus 𝔣 agreeing with ξ on ideals prime to 𝔪.
    fn descend(&self, f: &QuadIdeal) -> Result<HeckeChar> {
        let small = ray_class_group(&Modulus::new(self.field(), *f)?)?;
        let images = self
            .group
            .generators
            .iter()
            .map(|g| small.class_of(g))
            .collect::<Result<Vec<_>>>()?;
        let targets: Vec<Phase> =
            self.group.generators.iter().map(|g| self.phase(g).map(Option::unwrap)).collect::<Result<_>>()?;
        for cand in small.characters() {
            if images.iter().zip(&targets).all(|(v, t)| cand.phase_of_vector(v) == *t) {
                return Ok(cand);
            }
        }
        Err(Error::internal("no character of the conductor group restricts correctly"))
    }

    /// The character of modulus 𝔪′ (a multiple of 𝔪) induced by ξ.
    pub fn lift(&self, target: &Modulus) -> Result<HeckeChar> {
        if target.field() != self.field() {
            return Err(Error::input("lift target lies over a different field"));
        }
        let field = self.field();
        if !field.divides(&self.modulus().finite(), &target.finite()) {
            return Err(Error::input(format!(
                "{} does not divide {}",
                self.modulus().finite(),
                target.finite()
            )));
        }
        let big = ray_class_group(target)?;
        let mut exps = Vec::with_capacity(big.invariants.len());
        for (g, &d) in big.generators.iter().zip(&big.invariants) {
            let p = self.phase(g)?.ok_or_else(|| Error::internal("generator not coprime"))?;
            let k = p * Ratio::from_integer(d as i64);
            if !k.is_integer() {
                return Err(Error::internal("lifted value has the wrong order"));
            }
            exps.push(k.to_integer() as u64);
        }
        big.make_char(&exps)
    }

    fn require_stable(&self) -> Result<()> {
        if !self.modulus().is_sigma_stable() {
            return Err(Error::input(format!(
                "modulus {} is not stable under conjugation",
                self.modulus().finite()
            )));
        }
        Ok(())
    }

    /// ξ^σ(𝔞) = ξ(σ𝔞).
    pub fn conj_char(&self) -> Result<HeckeChar> {
        self.require_stable()?;
        let field = self.field();
        let mut exps = Vec::with_capacity(self.exps.len());
        for (g, &d) in self.group.generators.iter().zip(&self.group.invariants) {
            let v = self.group.class_of(&field.conj_ideal(g))?;
            let k = self.phase_of_vector(&v) * Ratio::from_integer(d as i64);
            if !k.is_integer() {
                return Err(Error::internal("conjugate value has the wrong order"));
            }
            exps.push(k.to_integer() as u64);
        }
        Ok(HeckeChar::from_parts(self.group.clone(), exps))
    }

    /// ε = ξ^σ/ξ and its order.
    pub fn epsilon(&self) -> Result<(HeckeChar, u64)> {
        let eps = self.conj_char()?.mul(&self.inverse())?;
        let order = eps.order();
        Ok((eps, order))
    }

    pub fn mul(&self, other: &HeckeChar) -> Result<HeckeChar> {
        if self.modulus() != other.modulus() {
            return Err(Error::input("characters of different ray class groups"));
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.group.invariants)
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        Ok(HeckeChar::from_parts(self.group.clone(), exps))
    }

    pub fn inverse(&self) -> HeckeChar {
        let exps = self.exps.iter().zip(&self.group.invariants).map(|(&k, &d)| (d - k) % d).collect();
        HeckeChar::from_parts(self.group.clone(), exps)
    }

    pub fn pow(&self, e: u64) -> HeckeChar {
        let exps = self
            .exps
            .iter()
            .zip(&self.group.invariants)
            .map(|(&k, &d)| ((k as u128 * e as u128) % d as u128) as u64)
            .collect();
        HeckeChar::from_parts(self.group.clone(), exps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(d: i64, m: [i64; 3]) -> Arc<RayClassGroup> {
        let k = QuadField::from_disc(d).unwrap();
        let m = Modulus::new(k, k.ideal(m[0], m[1], m[2]).unwrap()).unwrap();
        ray_class_group(&m).unwrap()
    }

    #[test]
    fn class_numbers() {
        for (d, h) in [(-4, 1), (-3, 1), (-20, 2), (-23, 3), (-47, 5), (-84, 4), (5, 1), (12, 1), (40, 2), (229, 3)] {
            let k = QuadField::from_disc(d).unwrap();
            assert_eq!(class_number(&k).unwrap(), h, "D = {d}");
        }
    }

    #[test]
    fn trivial_moduli() {
        assert_eq!(group(-4, [1, 0, 1]).order(), 1);
        assert_eq!(group(5, [1, 0, 1]).order(), 1);
        let g = group(-20, [1, 0, 1]);
        assert_eq!(g.invariants(), &[2]);
        // narrow class number of ℚ(√3) is 2
        assert_eq!(group(12, [1, 0, 1]).invariants(), &[2]);
    }

    #[test]
    fn non_principal_class_of_minus_five() {
        let g = group(-20, [1, 0, 1]);
        let k = g.field();
        let p3 = k.primes_above(3)[0];
        assert_eq!(g.class_of(&p3).unwrap(), vec![1]);
        let chi = g.character(1).unwrap();
        assert_eq!(chi.evaluate(&p3).unwrap(), CycNum::from_int(2, -1));
    }

    #[test]
    fn generators_are_unit_vectors() {
        let g = group(-4, [15, 0, 15]);
        for (i, gen) in g.generators().iter().enumerate() {
            let mut e = vec![0; g.invariants().len()];
            e[i] = 1;
            assert_eq!(g.class_of(gen).unwrap(), e);
        }
    }

    #[test]
    fn ray_class_orders() {
        // (ℤ[i]/(5))^× has order 16 and i has order 4 in it
        assert_eq!(group(-4, [5, 0, 5]).order(), 4);
        assert_eq!(group(-4, [3, 0, 3]).order(), 2);
        assert_eq!(group(-4, [15, 0, 15]).order(), 32);
        assert_eq!(group(-3, [7, 0, 7]).order(), 6);
    }

    #[test]
    fn cubic_character_of_minus_23() {
        let g = group(-23, [1, 0, 1]);
        assert_eq!(g.invariants(), &[3]);
        let chi = g.character(1).unwrap();
        let (eps, order) = chi.epsilon().unwrap();
        assert_eq!(order, 3);
        assert_eq!(eps, chi.inverse().pow(2));
        assert_eq!(chi.conj_char().unwrap(), chi.inverse());
    }

    #[test]
    fn sign_characters_of_sqrt5() {
        let k = QuadField::from_disc(5).unwrap();
        let mixed = |m: QuadIdeal| {
            let g = ray_class_group(&Modulus::new(k, m).unwrap()).unwrap();
            g.characters().iter().any(|c| {
                let t = c.infinity_type().unwrap();
                t[0] + t[1] == 1
            })
        };
        // modulo (2√5) the unit -ε⁶ is ≡ 1 and totally negative, forcing p_τ₁ = p_τ₂
        let root5 = k.principal(QuadInt::new(-5, 2));
        assert!(!mixed(k.ideal_mul(&root5, &k.int_ideal(2))));
        assert!(mixed(k.int_ideal(4)));
        assert!(mixed(k.primes_above(11)[0]));
    }

    #[test]
    fn conductor_of_trivial_and_lift() {
        let g = group(-4, [10, 0, 10]);
        let (f, prim) = g.trivial_character().conductor().unwrap();
        assert!(f.is_unit());
        assert_eq!(prim.group().order(), 1);
        for chi in g.characters() {
            let (f, prim) = chi.conductor().unwrap();
            assert_eq!(prim.conductor().unwrap().0, f);
            let back = prim.lift(chi.modulus()).unwrap();
            assert_eq!(back, chi);
        }
    }

    #[test]
    fn orthogonality() {
        let k = QuadField::from_disc(-20).unwrap();
        let p3 = k.primes_above(3)[0];
        let g = ray_class_group(&Modulus::new(k, k.ideal_mul(&p3, &k.int_ideal(2))).unwrap()).unwrap();
        let n = g.exponent();
        for chi in g.characters() {
            let sum = g
                .elements()
                .iter()
                .fold(CycNum::zero(n), |acc, v| acc + phase_to_cyc(chi.phase_of_vector(v), n));
            if chi.is_trivial() {
                assert_eq!(sum, CycNum::from_int(n, g.order() as i64));
            } else {
                assert!(sum.is_zero());
            }
        }
    }
}
