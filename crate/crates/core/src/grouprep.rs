//! Finite subgroups of GL₂ over cyclotomic fields, two-dimensional
//! representations induced from index-2 subgroups, and the classification
//! of their images when they are induced in three ways.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{lcm, lcm_all};
use crate::cyclotomic::{phase_mod1, phase_to_cyc, CycNum, Phase};
use crate::error::{Error, Result};

/// Largest group produced by [`closure`].
pub const MAX_GROUP_ORDER: usize = 10_000;
const TABLE_LIMIT: usize = 2048;

// ------------------------------------------------------------- matrices

/// A 2×2 matrix [[a, b], [c, d]] with entries in ℤ[ζ_N].
#[derive(Clone)]
pub struct Mat2 {
    e: [CycNum; 4],
}

impl Mat2 {
    pub fn new(a: CycNum, b: CycNum, c: CycNum, d: CycNum) -> Self {
        let n = lcm_all([a.order(), b.order(), c.order(), d.order()]);
        Mat2 { e: [a.lift(n), b.lift(n), c.lift(n), d.lift(n)] }
    }

    pub fn diag(a: CycNum, d: CycNum) -> Self {
        let n = lcm(a.order(), d.order());
        Self::new(a, CycNum::zero(n), CycNum::zero(n), d)
    }

    pub fn antidiag(b: CycNum, c: CycNum) -> Self {
        let n = lcm(b.order(), c.order());
        Self::new(CycNum::zero(n), b, c, CycNum::zero(n))
    }

    pub fn scalar(a: CycNum) -> Self {
        Self::diag(a.clone(), a)
    }

    pub fn identity(order: u64) -> Self {
        Self::scalar(CycNum::one(order))
    }

    pub fn order_of_entries(&self) -> u64 {
        self.e[0].order()
    }

    pub fn entry(&self, i: usize, j: usize) -> &CycNum {
        &self.e[2 * i + j]
    }

    pub fn lift(&self, n: u64) -> Self {
        Mat2 { e: self.e.clone().map(|x| x.lift(n)) }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &o.e;
        Mat2 { e: [&(a * p) + &(b * r), &(a * q) + &(b * s), &(c * p) + &(d * r), &(c * q) + &(d * s)] }
    }

    pub fn trace(&self) -> CycNum {
        &self.e[0] + &self.e[3]
    }

    pub fn det(&self) -> CycNum {
        &(&self.e[0] * &self.e[3]) - &(&self.e[1] * &self.e[2])
    }

    pub fn is_scalar(&self) -> bool {
        self.e[1].is_zero() && self.e[2].is_zero() && self.e[0] == self.e[3]
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.e[0].is_one()
    }

    pub fn is_diagonal(&self) -> bool {
        self.e[1].is_zero() && self.e[2].is_zero()
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.e[0].is_zero() && self.e[3].is_zero()
    }
}

impl PartialEq for Mat2 {
    fn eq(&self, o: &Self) -> bool {
        if self.order_of_entries() == o.order_of_entries() {
            self.e.iter().zip(&o.e).all(|(x, y)| x.coeffs() == y.coeffs())
        } else {
            self.e.iter().zip(&o.e).all(|(x, y)| x == y)
        }
    }
}

impl Eq for Mat2 {}

impl Hash for Mat2 {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.order_of_entries().hash(state);
        for x in &self.e {
            x.coeffs().hash(state);
        }
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

// --------------------------------------------------------------- groups

/// A finite matrix group with its multiplication table.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    order: u64,
    elements: Vec<Mat2>,
    index: HashMap<Mat2, usize>,
    table: Option<Vec<u32>>,
    identity: usize,
    inverse: Vec<usize>,
    elem_order: Vec<u64>,
}

/// The group generated by invertible matrices.
pub fn closure(generators: &[Mat2]) -> Result<MatrixGroup> {
    let n = lcm_all(generators.iter().map(Mat2::order_of_entries));
    let gens: Vec<Mat2> = generators.iter().map(|g| g.lift(n)).collect();
    for g in &gens {
        if g.det().is_zero() {
            return Err(Error::input(format!("generator {g:?} is singular")));
        }
    }
    let id = Mat2::identity(n);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut next = 0;
    while next < elements.len() {
        let x = elements[next].clone();
        next += 1;
        for g in &gens {
            let y = x.mul(g);
            if !index.contains_key(&y) {
                if elements.len() >= MAX_GROUP_ORDER {
                    return Err(Error::bound(format!("closure exceeds {MAX_GROUP_ORDER} elements")));
                }
                index.insert(y.clone(), elements.len());
                elements.push(y);
            }
        }
    }
    MatrixGroup::from_parts(n, elements, index)
}

impl MatrixGroup {
    /// A group from a list of matrices already closed under multiplication.
    pub fn from_elements(mats: &[Mat2]) -> Result<MatrixGroup> {
        let n = lcm_all(mats.iter().map(Mat2::order_of_entries));
        let mut elements = Vec::new();
        let mut index = HashMap::new();
        for m in mats {
            let m = m.lift(n);
            if !index.contains_key(&m) {
                index.insert(m.clone(), elements.len());
                elements.push(m);
            }
        }
        MatrixGroup::from_parts(n, elements, index)
    }

    fn from_parts(order: u64, elements: Vec<Mat2>, index: HashMap<Mat2, usize>) -> Result<MatrixGroup> {
        let size = elements.len();
        let identity = *index
            .get(&Mat2::identity(order))
            .ok_or_else(|| Error::input("matrix set lacks the identity"))?;
        let mut g = MatrixGroup {
            order,
            elements,
            index,
            table: None,
            identity,
            inverse: vec![usize::MAX; size],
            elem_order: vec![0; size],
        };
        if size <= TABLE_LIMIT {
            let mut t = Vec::with_capacity(size * size);
            for i in 0..size {
                for j in 0..size {
                    let p = g.elements[i].mul(&g.elements[j]);
                    let k = *g.index.get(&p).ok_or_else(|| Error::input("matrix set is not closed"))?;
                    t.push(k as u32);
                }
            }
            g.table = Some(t);
        }
        for i in 0..size {
            let mut x = i;
            let mut k = 1;
            while x != identity {
                x = g.mul(x, i);
                k += 1;
                if k > size as u64 + 1 {
                    return Err(Error::input("matrix set is not a group"));
                }
            }
            g.elem_order[i] = k;
            g.inverse[i] = g.pow(i, k - 1);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Cyclotomic order of the matrix entries.
    pub fn entry_order(&self) -> u64 {
        self.order
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Mat2 {
        &self.elements[i]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, m: &Mat2) -> Option<usize> {
        self.index.get(&m.lift(lcm(self.order, m.order_of_entries()))).copied().or_else(|| {
            self.elements.iter().position(|x| x == m)
        })
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.len() + j] as usize,
            None => self.index[&self.elements[i].mul(&self.elements[j])],
        }
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn pow(&self, i: usize, e: u64) -> usize {
        let mut acc = self.identity;
        for _ in 0..e {
            acc = self.mul(acc, i);
        }
        acc
    }

    pub fn element_order(&self, i: usize) -> u64 {
        self.elem_order[i]
    }

    /// Subgroup generated by the given elements, as sorted indices.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        seen[self.identity] = true;
        let mut out = vec![self.identity];
        let mut next = 0;
        while next < out.len() {
            let x = out[next];
            next += 1;
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Indices of scalar matrices.
    pub fn scalars(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.elements[i].is_scalar()).collect()
    }

    /// All subgroups of index 2, as sorted index lists.
    pub fn index_two_subgroups(&self) -> Vec<Vec<usize>> {
        let squares: Vec<usize> = (0..self.len()).map(|g| self.mul(g, g)).collect();
        let phi = self.generated(&squares);
        let mut in_phi = vec![false; self.len()];
        for &x in &phi {
            in_phi[x] = true;
        }
        // coordinates in G/Φ ≅ F₂^k
        let mut basis: Vec<usize> = Vec::new();
        let mut span = phi.clone();
        for g in 0..self.len() {
            if !span.contains(&g) {
                basis.push(g);
                let mut gens = squares.clone();
                gens.extend(&basis);
                span = self.generated(&gens);
            }
        }
        let k = basis.len();
        let mut coords = vec![0u32; self.len()];
        for mask in 0u32..(1 << k) {
            let mut x = self.identity;
            for (i, &b) in basis.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    x = self.mul(x, b);
                }
            }
            for &f in &phi {
                coords[self.mul(x, f)] = mask;
            }
        }
        (1u32..(1 << k))
            .map(|func| (0..self.len()).filter(|&g| (coords[g] & func).count_ones().is_multiple_of(2)).collect())
            .collect()
    }

    /// Elements of 2-power order.
    pub fn two_part(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.elem_order[i].is_power_of_two()).collect()
    }
}

// ---------------------------------------------------- subgroup characters

/// A linear character of an index-2 subgroup H of G, with a coset
/// representative σ ∉ H.
#[derive(Clone, Debug)]
pub struct SubgroupChar {
    /// Sorted indices of H in G.
    pub subgroup: Vec<usize>,
    /// χ(g) for g ∈ H, `None` outside H.
    pub values: Vec<Option<Phase>>,
    pub sigma: usize,
}

impl SubgroupChar {
    /// σ defaults to the first element outside H.
    pub fn new(g: &MatrixGroup, subgroup: Vec<usize>, values: Vec<Option<Phase>>) -> Result<Self> {
        let sigma = (0..g.len())
            .find(|x| subgroup.binary_search(x).is_err())
            .ok_or_else(|| Error::input("subgroup is the whole group"))?;
        Self::with_sigma(g, subgroup, values, sigma)
    }

    pub fn with_sigma(g: &MatrixGroup, mut subgroup: Vec<usize>, values: Vec<Option<Phase>>, sigma: usize) -> Result<Self> {
        subgroup.sort_unstable();
        if subgroup.len() * 2 != g.len() {
            return Err(Error::input("subgroup does not have index 2"));
        }
        if subgroup.binary_search(&sigma).is_ok() {
            return Err(Error::input("σ lies in the subgroup"));
        }
        let values: Vec<Option<Phase>> = values.into_iter().map(|v| v.map(phase_mod1)).collect();
        for &x in &subgroup {
            for &y in &subgroup {
                let (Some(a), Some(b), Some(c)) = (values[x], values[y], values[g.mul(x, y)]) else {
                    return Err(Error::input("character undefined on part of the subgroup"));
                };
                if phase_mod1(a + b) != c {
                    return Err(Error::input("χ is not a homomorphism"));
                }
            }
        }
        Ok(SubgroupChar { subgroup, values, sigma })
    }

    pub fn contains(&self, x: usize) -> bool {
        self.subgroup.binary_search(&x).is_ok()
    }

    pub fn chi(&self, h: usize) -> Phase {
        self.values[h].expect("element of the subgroup")
    }

    /// χ^σ(h) = χ(σ⁻¹hσ).
    pub fn chi_sigma(&self, g: &MatrixGroup, h: usize) -> Phase {
        self.chi(g.mul(g.mul(g.inv(self.sigma), h), self.sigma))
    }

    /// Common order of all values involved.
    fn value_order(&self) -> u64 {
        lcm_all(self.values.iter().flatten().map(|p| *p.denom() as u64))
    }
}

/// All linear characters of a subgroup, as phases indexed by group element.
pub fn linear_characters(g: &MatrixGroup, subgroup: &[usize]) -> Vec<Vec<Option<Phase>>> {
    // greedy generators
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![g.identity()];
    for &x in subgroup {
        if span.binary_search(&x).is_err() {
            gens.push(x);
            span = g.generated(&gens);
        }
    }
    let orders: Vec<u64> = gens.iter().map(|&x| g.element_order(x)).collect();
    let total: u64 = orders.iter().product();
    let mut out = Vec::new();
    'cand: for code in 0..total {
        let mut rest = code;
        let vals: Vec<Phase> = orders
            .iter()
            .map(|&o| {
                let k = rest % o;
                rest /= o;
                Ratio::new(k as i64, o as i64)
            })
            .collect();
        let mut chi: Vec<Option<Phase>> = vec![None; g.len()];
        chi[g.identity()] = Some(Ratio::from_integer(0));
        let mut queue = vec![g.identity()];
        let mut next = 0;
        while next < queue.len() {
            let x = queue[next];
            next += 1;
            for (gi, v) in gens.iter().zip(&vals) {
                let y = g.mul(x, *gi);
                let val = phase_mod1(chi[x].unwrap() + v);
                match chi[y] {
                    None => {
                        chi[y] = Some(val);
                        queue.push(y);
                    }
                    Some(w) if w != val => continue 'cand,
                    Some(_) => {}
                }
            }
        }
        out.push(chi);
    }
    out
}

/// Ind_H^G χ as matrices indexed by the elements of G.
pub fn induce(g: &MatrixGroup, h: &SubgroupChar) -> Result<Vec<Mat2>> {
    let n = h.value_order();
    let root = |p: Phase| phase_to_cyc(p, lcm(n, *p.denom() as u64));
    let s2 = h.chi(g.mul(h.sigma, h.sigma));
    let sigma_inv = g.inv(h.sigma);
    let rho: Vec<Mat2> = (0..g.len())
        .map(|x| {
            if h.contains(x) {
                Mat2::diag(root(h.chi(x)), root(h.chi_sigma(g, x)))
            } else {
                let y = g.mul(sigma_inv, x);
                Mat2::antidiag(root(phase_mod1(s2 + h.chi_sigma(g, y))), root(h.chi(y))).lift(n.max(1))
            }
        })
        .map(|m| m.lift(lcm(n, m.order_of_entries())))
        .collect();
    for x in 0..g.len() {
        for y in 0..g.len() {
            if rho[g.mul(x, y)] != rho[x].mul(&rho[y]) {
                return Err(Error::internal("induced matrices are not multiplicative"));
            }
        }
    }
    Ok(rho)
}

/// Mackey: Ind χ is irreducible iff χ ≠ χ^σ.
pub fn is_irreducible(g: &MatrixGroup, h: &SubgroupChar) -> bool {
    h.subgroup.iter().any(|&x| h.chi(x) != h.chi_sigma(g, x))
}

/// ε = χ^σ/χ on H.
#[derive(Clone, Debug)]
pub struct EpsilonInfo {
    pub values: Vec<(usize, Phase)>,
    pub kernel: Vec<usize>,
    pub order: u64,
    pub quadratic: bool,
}

pub fn epsilon_char(g: &MatrixGroup, h: &SubgroupChar) -> EpsilonInfo {
    let values: Vec<(usize, Phase)> =
        h.subgroup.iter().map(|&x| (x, phase_mod1(h.chi_sigma(g, x) - h.chi(x)))).collect();
    let kernel = values.iter().filter(|(_, p)| *p.numer() == 0).map(|(x, _)| *x).collect();
    let order = lcm_all(values.iter().map(|(_, p)| *p.denom() as u64));
    EpsilonInfo { values, kernel, order, quadratic: order == 2 }
}

/// The six statements (A′)–(F′).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalences(pub [bool; 6]);

impl Equivalences {
    pub fn all_equal(&self) -> bool {
        self.0.iter().all(|&b| b == self.0[0])
    }

    pub fn all_true(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    pub fn all_false(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }
}

/// An index-2 subgroup and a character inducing a given representation.
#[derive(Clone, Debug)]
pub struct InducingPair {
    pub subgroup: Vec<usize>,
    pub values: Vec<Option<Phase>>,
}

/// All (H′, χ′) with Ind χ′ ≅ ρ, one per subgroup H′, decided by equality
/// of trace functions.
pub fn inducing_pairs(g: &MatrixGroup, rho: &[Mat2]) -> Vec<InducingPair> {
    let traces: Vec<CycNum> = rho.iter().map(Mat2::trace).collect();
    let mut out = Vec::new();
    for sub in g.index_two_subgroups() {
        let inside = |x: usize| sub.binary_search(&x).is_ok();
        if (0..g.len()).any(|x| !inside(x) && !traces[x].is_zero()) {
            continue;
        }
        let sigma = (0..g.len()).find(|&x| !inside(x)).unwrap();
        let sigma_inv = g.inv(sigma);
        for chi in linear_characters(g, &sub) {
            let ok = sub.iter().all(|&x| {
                let a = chi[x].unwrap();
                let b = chi[g.mul(g.mul(sigma_inv, x), sigma)].unwrap();
                let n = lcm(*a.denom() as u64, *b.denom() as u64);
                traces[x] == &phase_to_cyc(a, n) + &phase_to_cyc(b, n)
            });
            if ok {
                out.push(InducingPair { subgroup: sub.clone(), values: chi });
                break;
            }
        }
    }
    out
}

/// Image of ρ as a matrix group together with the image of (H, χ, σ); χ is
/// read off the (1,1) entry of the diagonal matrices.
fn image_data(g: &MatrixGroup, h: &SubgroupChar) -> Result<(MatrixGroup, SubgroupChar)> {
    let rho = induce(g, h)?;
    let img = MatrixGroup::from_elements(&rho)?;
    let at = |x: usize| img.index_of(&rho[x]).expect("image element");
    let mut sub: Vec<usize> = h.subgroup.iter().map(|&x| at(x)).collect();
    sub.sort_unstable();
    sub.dedup();
    let mut values = vec![None; img.len()];
    for &y in &sub {
        values[y] = img.element(y).entry(0, 0).phase();
    }
    let ch = SubgroupChar::with_sigma(&img, sub, values, at(h.sigma))?;
    Ok((img, ch))
}

/// Evaluates (A′)–(F′) on the faithful image of Ind_H^G χ.
pub fn check_equivalences(g: &MatrixGroup, h: &SubgroupChar) -> Result<Equivalences> {
    let (img, ch) = image_data(g, h)?;
    let irreducible = is_irreducible(&img, &ch);
    let eps = epsilon_char(&img, &ch);
    let half = Ratio::new(1, 2);
    let zero = Ratio::from_integer(0);
    let b = irreducible && eps.values.iter().all(|(_, p)| *p == zero || *p == half);
    let c = eps.quadratic;
    let in_k = |x: usize| eps.kernel.binary_search(&x).is_ok();
    let d = irreducible
        && ch.subgroup.iter().filter(|&&x| !in_k(x)).all(|&x| img.element(x).trace().is_zero());
    let e = img.len() == 4 * eps.kernel.len()
        && (0..img.len()).all(|x| in_k(img.mul(x, x)))
        && (0..img.len()).all(|x| eps.kernel.iter().all(|&k| in_k(img.mul(img.mul(img.inv(x), k), x))));
    let others = inducing_pairs(&img, img.elements())
        .into_iter()
        .filter(|p| p.subgroup != ch.subgroup)
        .count();
    Ok(Equivalences([others >= 1, b, c, d, e, others >= 2]))
}

/// Verification of the trace and determinant pattern on every element.
#[derive(Clone, Debug, Serialize)]
pub struct TrDetReport {
    pub elements: usize,
    pub kernel_size: usize,
    pub ok: bool,
}

/// tr = 2χ_K(g), det = χ_K(g²) on K; tr = 0, det = -χ_K(g²) off K, where
/// χ_K(k) is the scalar of ρ(k).
pub fn trdet_profile(g: &MatrixGroup, kernel: &[usize]) -> Result<TrDetReport> {
    let chi_k = |k: usize| -> Result<CycNum> {
        let m = g.element(k);
        if !m.is_scalar() {
            return Err(Error::internal("kernel element is not scalar"));
        }
        Ok(m.entry(0, 0).clone())
    };
    for x in 0..g.len() {
        let m = g.element(x);
        let sq = g.mul(x, x);
        if kernel.binary_search(&sq).is_err() {
            return Err(Error::internal("square outside the kernel"));
        }
        let c2 = chi_k(sq)?;
        let ok = if kernel.binary_search(&x).is_ok() {
            m.trace() == chi_k(x)?.scale(2) && m.det() == c2
        } else {
            m.trace().is_zero() && m.det() == -&c2
        };
        if !ok {
            return Err(Error::internal(format!("trace/determinant pattern fails at {m:?}")));
        }
    }
    Ok(TrDetReport { elements: g.len(), kernel_size: kernel.len(), ok: true })
}

// ----------------------------------------------------- generator table

fn z(n: u64, k: i64) -> CycNum {
    CycNum::root(n, k)
}

/// One row of the explicit generator table.
#[derive(Clone, Debug)]
pub struct TableGroup {
    pub line: u8,
    pub r: u32,
    pub m: u64,
    pub group: MatrixGroup,
    /// H₁, H₂, H₃ (sorted indices).
    pub h: [Vec<usize>; 3],
    /// K = ⟨k, k′⟩.
    pub kernel: Vec<usize>,
    pub sigma1: usize,
    pub sigma2: usize,
    /// Whether the printed generator of H̃₃ lies in H₃.
    pub h3_generator_ok: bool,
}

fn table_generators(line: u8, r: u32, m: u64) -> Result<(Mat2, Mat2, Mat2, Mat2)> {
    let valid = match line {
        1 | 3 => r == 1,
        2 | 4 => r >= 2,
        5 | 6 => r >= 1,
        _ => false,
    };
    if !valid || m.is_multiple_of(2) || m == 0 || r > 8 {
        return Err(Error::input(format!("no table row for line {line}, r = {r}, m = {m}")));
    }
    let t = 1u64 << r;
    let n = lcm_all([2 * t, 4, m]);
    let k = Mat2::scalar(z(t, 1)).lift(n);
    let kp = Mat2::scalar(z(m, 1)).lift(n);
    let c1 = Mat2::diag(z(2 * t, 1), -&z(2 * t, 1)).lift(n);
    let i1 = Mat2::diag(CycNum::one(n), CycNum::from_int(n, -1));
    let c2 = Mat2::antidiag(z(t, 1), CycNum::one(t)).lift(n);
    let i2 = Mat2::antidiag(CycNum::one(n), CycNum::one(n));
    let (s1, s2) = match line {
        1 | 2 => (i1, i2),
        3 | 4 => (c1, c2),
        5 => (c1, i2),
        _ => (i1, c2),
    };
    Ok((s1, s2, k, kp))
}

/// The printed generator of H̃₃ for each row.
fn printed_h3(line: u8, r: u32, n: u64) -> Mat2 {
    let t = 1u64 << r;
    let one = CycNum::one(n);
    match line {
        1 => Mat2::antidiag(one.clone(), -&one),
        2 | 3 => Mat2::antidiag(z(4, 1), -&z(4, 1)),
        4 => Mat2::antidiag(&z(4, 1) * &z(2 * t, 1), -&(&z(4, 1) * &z(2 * t, -1))),
        5 => Mat2::antidiag(z(2 * t, 1), -&z(2 * t, 1)),
        _ => Mat2::antidiag(z(t, 1), -&one),
    }
    .lift(n)
}

/// The group of row `line` with parameters r and odd m.
pub fn table_group(line: u8, r: u32, m: u64) -> Result<TableGroup> {
    let (s1, s2, k, kp) = table_generators(line, r, m)?;
    let g = closure(&[s1.clone(), s2.clone(), k.clone(), kp.clone()])?;
    let at = |x: &Mat2| g.index_of(x).expect("generator in group");
    let (is1, is2, ik, ikp) = (at(&s1), at(&s2), at(&k), at(&kp));
    let kernel = g.generated(&[ik, ikp]);
    let h1 = g.generated(&[is1, ik, ikp]);
    let h2 = g.generated(&[is2, ik, ikp]);
    let h3 = g.generated(&[g.mul(is1, is2), ik, ikp]);
    let expected = (1usize << (r + 2)) * m as usize;
    if g.len() != expected {
        return Err(Error::internal(format!("table group has order {} instead of {expected}", g.len())));
    }
    let printed = printed_h3(line, r, g.entry_order());
    let h3_generator_ok = g.index_of(&printed).is_some_and(|x| h3.binary_search(&x).is_ok());
    Ok(TableGroup { line, r, m, group: g, h: [h1, h2, h3], kernel, sigma1: is1, sigma2: is2, h3_generator_ok })
}

impl TableGroup {
    /// The defining character χ₁ on H₁ = ⟨σ₁, K⟩: the (1,1) entry.
    pub fn chi1(&self) -> Result<SubgroupChar> {
        let g = &self.group;
        let mut values = vec![None; g.len()];
        for &x in &self.h[0] {
            values[x] = g.element(x).entry(0, 0).phase();
        }
        SubgroupChar::with_sigma(g, self.h[0].clone(), values, self.sigma2)
    }
}

// ------------------------------------------------------- classification

/// Type of an index-2 overgroup of K: cyclic C_{2n} or C₂ × C_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SubgroupType {
    Cyclic,
    Involution,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageClass {
    pub r: u32,
    pub m: u64,
    pub line: u8,
    pub name: String,
    pub order: usize,
    pub types: [SubgroupType; 3],
    pub det_minus_one_involution: bool,
    pub presentation_ok: bool,
}

fn two_group_name(line: u8, r: u32) -> String {
    match line {
        1 => "D4".to_string(),
        2 => format!("D4oC{}", 1u64 << r),
        3 => "Q8".to_string(),
        _ => format!("M{}(2)", r + 2),
    }
}

/// Whether a non-scalar involution of determinant -1 exists.
pub fn has_det_minus_one_involution(g: &MatrixGroup) -> bool {
    (0..g.len()).any(|x| {
        let m = g.element(x);
        g.element_order(x) == 2 && !m.is_scalar() && m.det() == CycNum::from_int(1, -1)
    })
}

/// Classifies the image of a representation induced from three index-2
/// subgroups.
pub fn classify_image(g: &MatrixGroup) -> Result<ImageClass> {
    let kernel = g.scalars();
    let n = kernel.len();
    if n == 0 || g.len() != 4 * n {
        return Err(Error::input("scalar subgroup does not have index 4"));
    }
    if (0..g.len()).any(|x| kernel.binary_search(&g.mul(x, x)).is_err()) {
        return Err(Error::input("quotient by scalars is not of exponent 2"));
    }
    let r = n.trailing_zeros();
    let m = (n >> r) as u64;
    if r == 0 || kernel.iter().all(|&k| g.element_order(k) != n as u64) {
        return Err(Error::input("scalar subgroup is not cyclic of even order"));
    }
    let mut overs: Vec<Vec<usize>> = g
        .index_two_subgroups()
        .into_iter()
        .filter(|h| kernel.iter().all(|k| h.binary_search(k).is_ok()))
        .collect();
    overs.sort();
    if overs.len() != 3 {
        return Err(Error::input("expected three index-2 subgroups containing the scalars"));
    }
    let type_of = |h: &[usize]| {
        if h.iter().any(|&x| g.element_order(x) == 2 * n as u64) {
            SubgroupType::Cyclic
        } else {
            SubgroupType::Involution
        }
    };
    let types = [type_of(&overs[0]), type_of(&overs[1]), type_of(&overs[2])];
    let cyclic = types.iter().filter(|t| **t == SubgroupType::Cyclic).count();
    let det_inv = has_det_minus_one_involution(g);
    let line = match (cyclic, r) {
        (1, 1) => 1,
        (0, r) if r >= 2 => 2,
        (3, 1) => 3,
        (2, r) if r >= 2 => 4,
        _ => return Err(Error::input(format!("subgroup types {types:?} with r = {r} match no row"))),
    };
    if (line == 3) == det_inv {
        return Err(Error::internal("determinant criterion disagrees with subgroup types"));
    }
    let presentation_ok = presentation_holds(g, &overs, &kernel, line, r);
    let mut name = two_group_name(line, r);
    if m > 1 {
        name.push_str(&format!("xC{m}"));
    }
    Ok(ImageClass { r, m, line, name, order: g.len(), types, det_minus_one_involution: det_inv, presentation_ok })
}

/// Searches for σ₁ ∈ H₁, σ₂ ∈ H₂ and k of the shapes of row `line` that
/// satisfy its printed relations and generate the 2-part of G.
pub fn presentation_holds(g: &MatrixGroup, overs: &[Vec<usize>], kernel: &[usize], line: u8, r: u32) -> bool {
    let two: Vec<usize> = g.two_part();
    let t = 1u64 << r;
    let is_two = |x: &usize| two.binary_search(x).is_ok();
    let ks: Vec<usize> = kernel.iter().copied().filter(|&x| g.element_order(x) == t).collect();
    let candidates = |h: &[usize], cyclic: bool| -> Vec<usize> {
        h.iter()
            .copied()
            .filter(|x| is_two(x) && kernel.binary_search(x).is_err())
            .filter(|&x| if cyclic { g.element_order(x) == 2 * t } else { g.element_order(x) == 2 })
            .collect()
    };
    let (cyc1, cyc2) = match line {
        1 | 2 => (false, false),
        3 | 4 => (true, true),
        5 => (true, false),
        _ => (false, true),
    };
    let id = g.identity();
    let p = |x: usize, e: u64| g.pow(x, e);
    let comm = |a: usize, b: usize| g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b));
    for (a, ha) in overs.iter().enumerate() {
        for (b, hb) in overs.iter().enumerate() {
            if a == b {
                continue;
            }
            for &s1 in &candidates(ha, cyc1) {
                for &s2 in &candidates(hb, cyc2) {
                    for &k in &ks {
                        let (rels, gens): (Vec<usize>, Vec<usize>) = match line {
                            1 => {
                                let c3 = g.mul(s1, s2);
                                (vec![p(s1, 2), p(c3, 4), p(g.mul(s1, c3), 2)], vec![s1, c3])
                            }
                            2 => {
                                let i3 = g.mul(g.mul(s1, s2), p(k, t / 4));
                                (
                                    vec![
                                        p(s1, 2),
                                        p(i3, 2),
                                        p(k, t),
                                        g.mul(comm(s1, i3), p(k, t / 2)),
                                        comm(s1, k),
                                        comm(i3, k),
                                    ],
                                    vec![s1, i3, k],
                                )
                            }
                            3 => (
                                vec![
                                    p(s1, 4),
                                    g.mul(p(s1, 2), g.inv(p(s2, 2))),
                                    g.mul(g.mul(s2, s1), g.mul(g.inv(s2), s1)),
                                ],
                                vec![s1, s2],
                            ),
                            4 => {
                                let i3 = g.mul(g.mul(s1, s2), p(k, t / 4 - 1));
                                (
                                    vec![p(s2, 2 * t), p(i3, 2), g.mul(g.mul(i3, s2), g.mul(i3, p(s2, t - 1)))],
                                    vec![s2, i3],
                                )
                            }
                            5 => (
                                vec![p(s1, 2 * t), p(s2, 2), g.mul(g.mul(s2, s1), g.mul(s2, p(s1, t - 1)))],
                                vec![s1, s2],
                            ),
                            _ => (
                                vec![p(s2, 2 * t), p(s1, 2), g.mul(g.mul(s1, s2), g.mul(s1, p(s2, t - 1)))],
                                vec![s1, s2],
                            ),
                        };
                        if rels.iter().all(|&x| x == id) && g.generated(&gens).len() == two.len() {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Dihedral group of order 2n as diag(ζ_n, ζ_n⁻¹) and the swap.
pub fn dihedral(n: u64) -> Result<MatrixGroup> {
    closure(&[
        Mat2::diag(z(n, 1), z(n, -1)),
        Mat2::antidiag(CycNum::one(n), CycNum::one(n)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q8() -> MatrixGroup {
        closure(&[
            Mat2::diag(z(4, 1), z(4, -1)),
            Mat2::antidiag(CycNum::from_int(1, -1), CycNum::one(1)),
        ])
        .unwrap()
    }

    #[test]
    fn closures() {
        assert_eq!(closure(&[Mat2::scalar(CycNum::from_int(1, -1))]).unwrap().len(), 2);
        let d4 = closure(&[
            Mat2::diag(CycNum::one(1), CycNum::from_int(1, -1)),
            Mat2::antidiag(CycNum::one(1), CycNum::from_int(1, -1)),
        ])
        .unwrap();
        assert_eq!(d4.len(), 8);
        assert_eq!(q8().len(), 8);
        assert_eq!(dihedral(3).unwrap().len(), 6);
    }

    fn s3_char() -> (MatrixGroup, SubgroupChar) {
        let g = dihedral(3).unwrap();
        let c3: Vec<usize> = (0..g.len()).filter(|&x| g.element(x).is_diagonal()).collect();
        let mut values = vec![None; g.len()];
        for &x in &c3 {
            values[x] = g.element(x).entry(0, 0).phase();
        }
        let h = SubgroupChar::new(&g, c3, values).unwrap();
        (g, h)
    }

    #[test]
    fn s3_controls() {
        let (g, h) = s3_char();
        assert!(is_irreducible(&g, &h));
        let eps = epsilon_char(&g, &h);
        assert_eq!(eps.order, 3);
        assert!(!eps.quadratic);
        assert!(check_equivalences(&g, &h).unwrap().all_false());
        let rho = induce(&g, &h).unwrap();
        assert_eq!(inducing_pairs(&g, &rho).len(), 1);
    }

    #[test]
    fn trivial_character_induces_identity_and_swap() {
        let (g, h) = s3_char();
        let triv = SubgroupChar::new(&g, h.subgroup.clone(), h.values.iter().map(|v| v.map(|_| Ratio::from_integer(0))).collect()).unwrap();
        assert!(!is_irreducible(&g, &triv));
        let rho = induce(&g, &triv).unwrap();
        for x in 0..g.len() {
            if triv.contains(x) {
                assert!(rho[x].is_identity());
            } else {
                assert_eq!(rho[x], Mat2::antidiag(CycNum::one(1), CycNum::one(1)));
            }
        }
        assert!(check_equivalences(&g, &triv).unwrap().all_false());
    }

    #[test]
    fn quaternion_pairs_and_determinant() {
        let g = q8();
        let rho: Vec<Mat2> = g.elements().to_vec();
        assert_eq!(inducing_pairs(&g, &rho).len(), 3);
        assert!(!has_det_minus_one_involution(&g));
        assert!(g.elements().iter().all(|m| m.det().is_one()));
        let c = classify_image(&g).unwrap();
        assert_eq!(c.name, "Q8");
    }

    #[test]
    fn table_rows() {
        let t = table_group(1, 1, 1).unwrap();
        assert_eq!(t.group.len(), 8);
        assert_eq!(classify_image(&t.group).unwrap().name, "D4");
        let t = table_group(3, 1, 1).unwrap();
        let c = classify_image(&t.group).unwrap();
        assert_eq!(c.name, "Q8");
        assert!(c.presentation_ok);
        assert!(presentation_holds(&t.group, &[t.h[0].clone(), t.h[1].clone(), t.h[2].clone()], &t.kernel, 3, 1));
        // the printed matrix for the third generator of line 3 is not in the group
        assert!(!t.h3_generator_ok);
        assert_eq!(classify_image(&table_group(2, 2, 1).unwrap().group).unwrap().name, "D4oC4");
        assert_eq!(classify_image(&table_group(5, 1, 1).unwrap().group).unwrap().name, "D4");
        let t = table_group(4, 2, 3).unwrap();
        assert_eq!(t.group.len(), 48);
        assert_eq!(classify_image(&t.group).unwrap().name, "M4(2)xC3");
        assert!(table_group(2, 1, 1).is_err());
    }

    #[test]
    fn table_equivalences() {
        let t = table_group(1, 1, 1).unwrap();
        let chi = t.chi1().unwrap();
        assert!(check_equivalences(&t.group, &chi).unwrap().all_true());
        let eps = epsilon_char(&t.group, &chi);
        let rep = MatrixGroup::from_elements(&induce(&t.group, &chi).unwrap()).unwrap();
        let kernel: Vec<usize> = {
            let mut k: Vec<usize> = eps.kernel.iter().map(|&x| rep.index_of(&induce(&t.group, &chi).unwrap()[x]).unwrap()).collect();
            k.sort_unstable();
            k.dedup();
            k
        };
        assert!(trdet_profile(&rep, &kernel).unwrap().ok);
    }
}

#[cfg(test)]
mod table_sweep {
    use super::*;

    #[test]
    fn every_row_is_induced_three_ways() {
        for line in 1..=6u8 {
            for r in 1..=3u32 {
                for m in [1u64, 3] {
                    let Ok(t) = table_group(line, r, m) else { continue };
                    let c = classify_image(&t.group).unwrap();
                    let chi = t.chi1().unwrap();
                    let eq = check_equivalences(&t.group, &chi).unwrap();
                    assert!(c.presentation_ok);
                    assert!(presentation_holds(&t.group, &t.h, &t.kernel, line, r));
                    assert_eq!(t.h3_generator_ok, line != 3);
                    assert!(eq.all_true());
                }
            }
        }
    }
}
