//! Small integer toolkit: gcds, modular inverses, sieves, factorization.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Trial-division primes are sieved up to this bound, so inputs up to its
/// square can be factored.
pub const SIEVE_LIMIT: u64 = 10_000_000;

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a as i128
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd_u64(a, b) * b
}

/// Returns (g, x, y) with a*x + b*y = g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn mod_inv(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128 % m as u128;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    acc as u64
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

/// n with all factors of two removed; keeps the sign. odd_part(0) = 0.
pub fn odd_part(n: i128) -> i128 {
    if n == 0 {
        0
    } else {
        n >> n.trailing_zeros()
    }
}

pub fn v_p(mut n: u128, p: u128) -> u32 {
    debug_assert!(n != 0);
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(SIEVE_LIMIT))
}

/// Prime factorization by trial division; rejects n above SIEVE_LIMIT^2.
pub fn factor(n: u128) -> Result<Vec<(u64, u32)>> {
    if n == 0 || n > (SIEVE_LIMIT as u128) * (SIEVE_LIMIT as u128) {
        return Err(Error::FactorizationRange(n));
    }
    let mut n = n as u64;
    let mut out = Vec::new();
    if n < 1 << 20 {
        // cheap path, avoids building the big sieve for small inputs
        let mut p = 2u64;
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
        return Ok(out);
    }
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n as u128).map(|f| f.len() == 1 && f[0].1 == 1).unwrap_or(false)
}

pub fn mobius(n: u64) -> i32 {
    if n == 0 {
        return 0;
    }
    let f = factor(n as u128).expect("mobius argument in range");
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn is_squarefree(n: u64) -> bool {
    mobius(n) != 0
}

/// Smallest-prime-factor table for fast repeated factorization below a bound.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let limit = limit.max(2);
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Calls `f(p, e)` for each prime power exactly dividing n (n <= limit, n >= 1).
    #[inline]
    pub fn for_each_factor(&self, mut n: u64, mut f: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            f(p, e);
        }
    }

    pub fn factor(&self, n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        self.for_each_factor(n, |p, e| out.push((p, e)));
        out
    }
}

/// Odd squarefree integers in [1, n], ascending.
pub fn odd_squarefree_up_to(n: u64) -> Vec<u64> {
    let mut ok = vec![true; n as usize + 1];
    let mut q = 3u64;
    while q * q <= n {
        let mut j = q * q;
        while j <= n {
            ok[j as usize] = false;
            j += q * q;
        }
        q += 2;
    }
    (1..=n).step_by(2).filter(|&k| ok[k as usize]).collect()
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
