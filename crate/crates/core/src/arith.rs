//! Elementary integer arithmetic shared by the field and group code.

use num_integer::Integer;

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn lcm_all<I: IntoIterator<Item = u64>>(it: I) -> u64 {
    it.into_iter().fold(1, lcm)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: i128) -> i128 {
    assert!(n >= 0, "isqrt of negative number");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exact square root if `n` is a perfect square.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// Smallest-prime-factor table for `0..=n`.
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

pub fn mod_pow(base: i128, mut exp: u64, m: i128) -> i128 {
    let mut result = 1i128.rem_euclid(m);
    let mut b = base.rem_euclid(m);
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let g = a.rem_euclid(m).extended_gcd(&m);
    (g.gcd == 1).then(|| g.x.rem_euclid(m))
}

/// Kronecker symbol (d / p) for a prime p.
pub fn kronecker_prime(d: i64, p: u64) -> i32 {
    if p == 2 {
        if d % 2 == 0 {
            return 0;
        }
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = d.rem_euclid(p as i64) as i128;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p as i128) == 1 {
        1
    } else {
        -1
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: i128, p: u64) -> Option<i128> {
    let pm = p as i128;
    let a = a.rem_euclid(pm);
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if mod_pow(a, (p - 1) / 2, pm) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2i128;
    while mod_pow(z, (p - 1) / 2, pm) != pm - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, pm);
    let mut t = mod_pow(a, q, pm);
    let mut r = mod_pow(a, q.div_ceil(2), pm);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % pm;
            i += 1;
        }
        let b = mod_pow(c, 1u64 << (m - i - 1), pm);
        m = i;
        c = b * b % pm;
        t = t * c % pm;
        r = r * b % pm;
    }
    Some(r)
}

/// Squarefree part of a nonzero integer (sign preserved).
pub fn squarefree_core(d: i64) -> i64 {
    let sign = d.signum();
    let mut core = 1i64;
    for (p, e) in factor(d.unsigned_abs()) {
        if e % 2 == 1 {
            core *= p as i64;
        }
    }
    sign * core
}

/// Whether `d` is a fundamental discriminant.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree_core(d) == d,
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree_core(m) == m
        }
        _ => false,
    }
}

/// 2-adic valuation.
pub fn v2(n: u64) -> u32 {
    n.trailing_zeros()
}

/// Euler phi.
pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_mod_matches_brute_force() {
        for p in primes_up_to(200).into_iter().skip(1) {
            for a in 0..p as i128 {
                let brute = (0..p as i128).any(|x| x * x % p as i128 == a);
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(r * r % p as i128, a),
                    None => assert!(!brute, "missed root of {a} mod {p}"),
                }
            }
        }
    }

    #[test]
    fn fundamental_discriminants() {
        let fd: Vec<i64> = (-30..30).filter(|&d| is_fundamental_discriminant(d)).collect();
        assert_eq!(
            fd,
            vec![-24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 5, 8, 12, 13, 17, 21, 24, 28, 29]
        );
    }

    #[test]
    fn kronecker_symbols() {
        assert_eq!(kronecker_prime(-4, 5), 1);
        assert_eq!(kronecker_prime(-4, 3), -1);
        assert_eq!(kronecker_prime(-4, 2), 0);
        assert_eq!(kronecker_prime(5, 2), -1);
        assert_eq!(kronecker_prime(17, 2), 1);
    }

    #[test]
    fn small_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(isqrt(99), 9);
        assert_eq!(exact_sqrt(144), Some(12));
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(2, 4), None);
        let spf = spf_table(30);
        assert_eq!(spf[27], 3);
        assert_eq!(spf[29], 29);
    }
}
