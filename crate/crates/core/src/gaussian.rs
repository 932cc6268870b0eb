//! Gaussian integers, sums of two squares and squarefree split ideals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::arith::{factor, gcd, mod_pow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GaussInt {
    pub re: i128,
    pub im: i128,
}

impl GaussInt {
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };

    pub const fn new(re: i128, im: i128) -> Self {
        GaussInt { re, im }
    }

    pub fn norm(self) -> i128 {
        self.re * self.re + self.im * self.im
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    pub fn pow(self, mut e: u32) -> Self {
        let mut acc = GaussInt::ONE;
        let mut b = self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im >= 0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

/// Element of Q(i) stored as num/den with den > 0 and content removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GaussRational {
    pub num: GaussInt,
    pub den: i128,
}

impl GaussRational {
    pub fn new(num: GaussInt, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let s = if den < 0 { -1 } else { 1 };
        let g = gcd(gcd(num.re, num.im), den).max(1);
        GaussRational {
            num: GaussInt::new(s * num.re / g, s * num.im / g),
            den: s * den / g,
        }
    }

    pub fn from_int(z: GaussInt) -> Self {
        GaussRational::new(z, 1)
    }

    pub fn conj(self) -> Self {
        GaussRational::new(self.num.conj(), self.den)
    }

    pub fn mul(self, o: GaussRational) -> Self {
        GaussRational::new(self.num * o.num, self.den * o.den)
    }

    pub fn div(self, o: GaussRational) -> Result<Self> {
        let n = o.num.norm();
        if n == 0 {
            return Err(Error::Domain("division by zero in Q(i)".into()));
        }
        // (a/b) / (c/d) = a d conj(c) / (b N(c))
        let top = self.num * o.num.conj() * GaussInt::new(o.den, 0);
        Ok(GaussRational::new(top, self.den * n))
    }

    /// Norm as a reduced fraction (numerator, denominator).
    pub fn norm(self) -> (i128, i128) {
        let n = self.num.norm();
        let d = self.den * self.den;
        let g = gcd(n, d).max(1);
        (n / g, d / g)
    }

    pub fn is_integral(self) -> bool {
        self.den == 1
    }
}

pub fn chi(n: i128) -> i32 {
    match n.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// r(n) from a factorization of n.
pub fn r_from_factors(f: &[(u64, u32)]) -> u64 {
    let mut r = 4u64;
    for &(p, e) in f {
        match p % 4 {
            1 => r *= e as u64 + 1,
            3 if e % 2 == 1 => return 0,
            _ => {}
        }
    }
    r
}

/// Number of (x, y) in Z^2 with x^2 + y^2 = n, n >= 1.
pub fn r_count(n: u64) -> u64 {
    assert!(n >= 1, "r(0) is not used");
    r_from_factors(&factor(n as u128).expect("r_count argument in range"))
}

/// Table of r(n) for 0 <= n <= limit (entry 0 left at 0).
pub fn r_table(limit: usize) -> Vec<u32> {
    let sieve = crate::arith::SpfSieve::new(limit.max(2));
    let mut out = vec![0u32; limit + 1];
    let mut buf = Vec::with_capacity(16);
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        buf.clear();
        sieve.for_each_factor(n as u64, |p, e| buf.push((p, e)));
        *slot = r_from_factors(&buf) as u32;
    }
    out
}

/// A root of -1 modulo p for p = 1 mod 4.
fn sqrt_minus_one(p: u64) -> u64 {
    let mut c = 2u64;
    loop {
        if mod_pow(c, (p - 1) / 2, p) == p - 1 {
            return mod_pow(c, (p - 1) / 4, p);
        }
        c += 1;
    }
}

/// Cornacchia: (a, b) with a^2 + b^2 = p.
fn two_squares_prime(p: u64) -> (u64, u64) {
    if p == 2 {
        return (1, 1);
    }
    let x = sqrt_minus_one(p);
    let (mut r0, mut r1) = (p, x.max(p - x));
    while r1 * r1 > p {
        (r0, r1) = (r1, r0 % r1);
    }
    let _ = r0;
    let a = r1;
    let b = crate::arith::isqrt((p - a * a) as u128) as u64;
    debug_assert_eq!(a * a + b * b, p);
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitPrime {
    pub p: u64,
    pub pi: GaussInt,
}

/// Fixed generator above p: a+bi with a, b > 0, a odd, b even; 1+i above 2.
pub fn canonical_split(p: u64) -> Result<SplitPrime> {
    if p == 2 {
        return Ok(SplitPrime { p, pi: GaussInt::new(1, 1) });
    }
    if p % 4 != 1 || !crate::arith::is_prime(p) {
        return Err(Error::NotSplit(p));
    }
    let (x, y) = two_squares_prime(p);
    let (a, b) = if x % 2 == 1 { (x, y) } else { (y, x) };
    Ok(SplitPrime { p, pi: GaussInt::new(a as i128, b as i128) })
}

/// A prime ideal above a split prime: (pi_p) or its conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub conj: bool,
}

impl PrimeIdeal {
    pub fn generator(self) -> GaussInt {
        let pi = canonical_split(self.p).expect("split prime").pi;
        if self.conj {
            pi.conj()
        } else {
            pi
        }
    }
}

/// Squarefree ideal of Z[i] supported on primes p = 1 mod 4.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IdealRep {
    pub factors: Vec<PrimeIdeal>,
    pub gen: GaussInt,
    pub norm: u64,
}

impl IdealRep {
    pub fn unit() -> Self {
        IdealRep { factors: Vec::new(), gen: GaussInt::ONE, norm: 1 }
    }

    pub fn from_factors(mut factors: Vec<PrimeIdeal>) -> Self {
        factors.sort();
        factors.dedup();
        let mut gen = GaussInt::ONE;
        let mut norm = 1u64;
        for f in &factors {
            gen = gen * f.generator();
            norm *= f.p;
        }
        IdealRep { factors, gen, norm }
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn mu(&self) -> i32 {
        if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn divides(&self, other: &IdealRep) -> bool {
        self.factors.iter().all(|f| other.factors.contains(f))
    }

    pub fn lcm(&self, other: &IdealRep) -> IdealRep {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        IdealRep::from_factors(f)
    }
}

impl fmt::Display for IdealRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.gen)
    }
}

/// All squarefree ideals with norm in the split-prime monoid and norm <= x, with mu.
pub fn squarefree_ideals_up_to(x: u64) -> Vec<(IdealRep, i32)> {
    let primes: Vec<u64> = crate::arith::primes_up_to(x)
        .into_iter()
        .filter(|p| p % 4 == 1)
        .collect();
    let mut out = Vec::new();
    fn rec(primes: &[u64], x: u64, norm: u64, acc: &mut Vec<PrimeIdeal>, out: &mut Vec<IdealRep>) {
        out.push(IdealRep::from_factors(acc.clone()));
        for (i, &p) in primes.iter().enumerate() {
            if norm * p > x {
                break;
            }
            for conj in [false, true] {
                acc.push(PrimeIdeal { p, conj });
                rec(&primes[i + 1..], x, norm * p, acc, out);
                // both primes above p
                if !conj && norm * p * p <= x {
                    acc.push(PrimeIdeal { p, conj: true });
                    rec(&primes[i + 1..], x, norm * p * p, acc, out);
                    acc.pop();
                }
                acc.pop();
            }
        }
    }
    let mut ideals = Vec::new();
    rec(&primes, x, 1, &mut Vec::new(), &mut ideals);
    ideals.sort_by(|a, b| (a.norm, &a.factors).cmp(&(b.norm, &b.factors)));
    for i in ideals {
        let mu = i.mu();
        out.push((i, mu));
    }
    out
}

/// Norm of the intersection (= lcm) of squarefree ideals.
pub fn ideal_intersection_norm(ideals: &[IdealRep]) -> u64 {
    let mut all: Vec<PrimeIdeal> = ideals.iter().flat_map(|i| i.factors.iter().copied()).collect();
    all.sort();
    all.dedup();
    all.iter().map(|f| f.p).product()
}

/// Gaussian integer of norm n built from canonical primes only (no conjugates).
/// n must be a sum of two squares.
pub fn canonical_of_norm(n: u64) -> Result<GaussInt> {
    let mut z = GaussInt::ONE;
    for (p, e) in factor(n as u128)? {
        match p % 4 {
            3 if e % 2 == 1 => return Err(Error::Domain(format!("{n} is not a sum of two squares"))),
            3 => z = z * GaussInt::new((p as i128).pow(e / 2), 0),
            _ => z = z * canonical_split(p)?.pi.pow(e),
        }
    }
    Ok(z)
}

/// All (x, y) with x^2 + y^2 = n, lexicographic; built by recombining Gaussian primes.
pub fn representations(n: u64) -> Vec<(i64, i64)> {
    assert!(n >= 1);
    representations_from_factors(&factor(n as u128).expect("argument in range"))
}

pub fn representations_from_factors(f: &[(u64, u32)]) -> Vec<(i64, i64)> {
    let mut partial = vec![GaussInt::ONE];
    for &(p, e) in f {
        match p % 4 {
            2 => {
                let g = GaussInt::new(1, 1).pow(e);
                partial.iter_mut().for_each(|z| *z = *z * g);
            }
            3 => {
                if e % 2 == 1 {
                    return Vec::new();
                }
                let g = GaussInt::new((p as i128).pow(e / 2), 0);
                partial.iter_mut().for_each(|z| *z = *z * g);
            }
            _ => {
                let pi = canonical_split(p).expect("split prime").pi;
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for k in 0..=e {
                    let g = pi.pow(k) * pi.conj().pow(e - k);
                    next.extend(partial.iter().map(|z| *z * g));
                }
                partial = next;
            }
        }
    }
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(partial.len() * 4);
    for z in partial {
        let mut w = z;
        for _ in 0..4 {
            out.push((w.re as i64, w.im as i64));
            w = w * GaussInt::I;
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_values() {
        assert_eq!(chi(5), 1);
        assert_eq!(chi(3), -1);
        assert_eq!(chi(-6), 0);
        assert_eq!(chi(-1), -1);
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_count(1), 4);
        assert_eq!(r_count(5), 8);
        assert_eq!(r_count(180), 8);
        assert_eq!(r_count(6), 0);
    }

    #[test]
    fn representation_examples() {
        assert_eq!(representations(2), vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
        let r25 = representations(25);
        assert_eq!(r25.len(), 12);
        for pair in [(3, 4), (-4, 3), (5, 0), (0, -5)] {
            assert!(r25.contains(&pair));
        }
        assert!(representations(3).is_empty());
    }

    #[test]
    fn representations_match_scan() {
        let tab = r_table(2000);
        for n in 1..=2000u64 {
            let mut scan = Vec::new();
            let s = crate::arith::isqrt(n as u128) as i64;
            for x in -s..=s {
                for y in -s..=s {
                    if (x * x + y * y) as u64 == n {
                        scan.push((x, y));
                    }
                }
            }
            assert_eq!(representations(n), scan, "n = {n}");
            assert_eq!(tab[n as usize] as u64, r_count(n));
        }
    }

    #[test]
    fn canonical_primes() {
        assert_eq!(canonical_split(5).unwrap().pi, GaussInt::new(1, 2));
        assert_eq!(canonical_split(13).unwrap().pi, GaussInt::new(3, 2));
        assert_eq!(canonical_split(2).unwrap().pi, GaussInt::new(1, 1));
        assert_eq!(canonical_split(7), Err(Error::NotSplit(7)));
        for p in crate::arith::primes_up_to(10_000).into_iter().filter(|p| p % 4 == 1) {
            let pi = canonical_split(p).unwrap().pi;
            assert_eq!(pi.norm(), p as i128);
            assert_eq!(pi * pi.conj(), GaussInt::new(p as i128, 0));
            assert!(pi.re > 0 && pi.im > 0 && pi.re % 2 == 1 && pi.im % 2 == 0);
        }
    }

    #[test]
    fn ideal_lists() {
        let four = squarefree_ideals_up_to(4);
        assert_eq!(four.len(), 1);
        assert!(four[0].0.is_unit() && four[0].1 == 1);

        let five = squarefree_ideals_up_to(5);
        assert_eq!(five.len(), 3);
        assert!(five[1..].iter().all(|(i, mu)| i.norm == 5 && *mu == -1));

        let tf = squarefree_ideals_up_to(25);
        let both = tf
            .iter()
            .find(|(i, _)| i.norm == 25)
            .expect("(5) is squarefree as an ideal");
        assert_eq!(both.1, 1);
        assert_eq!(both.0.factors.len(), 2);
        // no ideal repeats a prime
        for (i, _) in &tf {
            let mut f = i.factors.clone();
            f.dedup();
            assert_eq!(f.len(), i.factors.len());
        }
    }

    #[test]
    fn intersection_norms() {
        let u = IdealRep::unit();
        let p = IdealRep::from_factors(vec![PrimeIdeal { p: 5, conj: false }]);
        let q = IdealRep::from_factors(vec![PrimeIdeal { p: 5, conj: true }]);
        assert_eq!(ideal_intersection_norm(&[u.clone(), u.clone(), u.clone(), u.clone()]), 1);
        assert_eq!(ideal_intersection_norm(&[p.clone(), p.clone(), u.clone(), u.clone()]), 5);
        assert_eq!(ideal_intersection_norm(&[p, q, u.clone(), u]), 25);
    }

    #[test]
    fn ideal_moebius_sums_vanish() {
        for (b, _) in squarefree_ideals_up_to(1000) {
            if b.is_unit() {
                continue;
            }
            let k = b.factors.len();
            let mut s = 0i32;
            for mask in 0u32..(1 << k) {
                let sub: Vec<PrimeIdeal> =
                    (0..k).filter(|i| mask >> i & 1 == 1).map(|i| b.factors[i]).collect();
                s += IdealRep::from_factors(sub).mu();
            }
            assert_eq!(s, 0, "ideal {b}");
        }
    }

    #[test]
    fn rational_arithmetic() {
        let a = GaussRational::from_int(GaussInt::new(12, 6));
        let b = GaussRational::from_int(GaussInt::new(6, 12));
        let q = a.div(b).unwrap();
        assert_eq!(q, GaussRational::new(GaussInt::new(4, -3), 5));
        assert_eq!(q.norm(), (1, 1));
    }
}
