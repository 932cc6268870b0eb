//! Surface data: the four linear forms, resultants, bad primes, the class set
//! Sigma, the ideal corrections Sigma' and the real regions R_m.

use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{factor, gcd, is_square};
use crate::error::{Error, Result};
use crate::gaussian::{IdealRep, PrimeIdeal};

pub type Q = Ratio<i128>;

/// Default bound on |a_j|, |b_j|.
pub const COEFF_CAP: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceSpec {
    pub a3: i64,
    pub b3: i64,
    pub a4: i64,
    pub b4: i64,
    pub a: [i64; 4],
    pub b: [i64; 4],
    /// delta[j][k] = a_j b_k - a_k b_j (0-based indices).
    pub delta: [[i64; 4]; 4],
    pub big_delta: i128,
    pub csq: u64,
}

pub fn validate(a3: i64, b3: i64, a4: i64, b4: i64) -> Result<SurfaceSpec> {
    for c in [a3, b3, a4, b4] {
        if c.abs() > COEFF_CAP {
            return Err(Error::CoefficientTooLarge(c, COEFF_CAP));
        }
    }
    for (x, y) in [(a3, b3), (a4, b4)] {
        let g = gcd(x as i128, y as i128) as i64;
        if g != 1 {
            return Err(Error::Gcd(x, y, g));
        }
    }
    let a = [1, 0, a3, a4];
    let b = [0, 1, b3, b4];
    let mut delta = [[0i64; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            delta[j][k] = a[j] * b[k] - a[k] * b[j];
        }
    }
    for j in 0..4 {
        for k in j + 1..4 {
            if delta[j][k] == 0 {
                return Err(Error::Degenerate(j + 1, k + 1));
            }
        }
    }
    let big_delta = a3 as i128 * b3 as i128 * a4 as i128 * b4 as i128 * delta[2][3] as i128;
    let csq = (0..4).map(|j| a[j].unsigned_abs() + b[j].unsigned_abs()).product();
    Ok(SurfaceSpec { a3, b3, a4, b4, a, b, delta, big_delta, csq })
}

impl SurfaceSpec {
    pub fn c(&self) -> f64 {
        (self.csq as f64).sqrt()
    }

    /// L_j(u, v), j in 0..4.
    #[inline]
    pub fn form(&self, j: usize, u: i64, v: i64) -> i64 {
        self.a[j] * u + self.b[j] * v
    }

    #[inline]
    pub fn forms(&self, u: i64, v: i64) -> [i64; 4] {
        [u, v, self.a[2] * u + self.b[2] * v, self.a[3] * u + self.b[3] * v]
    }

    /// |a_j| + |b_j|, a bound for |L_j| on the unit box.
    pub fn coeff_sum(&self, j: usize) -> u64 {
        self.a[j].unsigned_abs() + self.b[j].unsigned_abs()
    }

    pub fn coefficients(&self) -> [i64; 4] {
        [self.a3, self.b3, self.a4, self.b4]
    }

    /// Primitive (u, v) with L_j(u, v) = 0, in the sign fixed by the lifting normalization.
    pub fn roots(&self) -> [(i64, i64); 4] {
        let mut out = [(0, 0); 4];
        for (j, slot) in out.iter_mut().enumerate() {
            let (u, v) = (-self.b[j], self.a[j]);
            let l = self.forms(u, v);
            let rest = l[1] as i128 * l[2] as i128 * l[3] as i128;
            let keep = l[0] > 0 || (l[0] == 0 && rest >= 0);
            *slot = if keep { (u, v) } else { (-u, -v) };
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadPrimeData {
    pub s: Vec<u64>,
    pub s_j: [Vec<u64>; 4],
    pub sprime: Vec<u64>,
}

pub fn bad_prime_data(spec: &SurfaceSpec) -> BadPrimeData {
    let mut s = vec![2u64];
    let prime_divisors = |n: i64| -> Vec<u64> {
        factor(n.unsigned_abs() as u128)
            .expect("resultants are below the factorization cap")
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    };
    for j in 0..4 {
        for k in j + 1..4 {
            s.extend(prime_divisors(spec.delta[j][k]));
        }
    }
    s.sort_unstable();
    s.dedup();
    let mut s_j: [Vec<u64>; 4] = Default::default();
    for (j, sj) in s_j.iter_mut().enumerate() {
        *sj = s
            .iter()
            .copied()
            .filter(|&p| {
                p % 4 == 3
                    && (0..4).any(|k| k != j && spec.delta[j][k] % p as i64 == 0)
            })
            .collect();
    }
    let sprime = s.iter().copied().filter(|p| p % 4 == 1).collect();
    BadPrimeData { s, s_j, sprime }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorsorClass {
    pub m: [i64; 4],
    pub alpha: i64,
}

impl TorsorClass {
    pub fn trivial() -> Self {
        TorsorClass { m: [1; 4], alpha: 1 }
    }
}

/// Signed squarefree products of subsets of `primes`, both signs.
fn signed_products(primes: &[u64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(2 << primes.len());
    for mask in 0u32..(1 << primes.len()) {
        let q: i64 = (0..primes.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| primes[i] as i64)
            .product();
        out.push(q);
        out.push(-q);
    }
    out.sort_unstable();
    out
}

pub fn sigma_j(spec: &SurfaceSpec, j: usize) -> Vec<i64> {
    signed_products(&bad_prime_data(spec).s_j[j])
}

/// The set Sigma, sorted.
pub fn build_sigma(spec: &SurfaceSpec) -> Vec<TorsorClass> {
    let bp = bad_prime_data(spec);
    let sets: Vec<Vec<i64>> = (0..4).map(|j| signed_products(&bp.s_j[j])).collect();
    let mut out = Vec::new();
    for &m1 in sets[0].iter().filter(|&&x| x > 0) {
        for &m2 in &sets[1] {
            for &m3 in &sets[2] {
                for &m4 in &sets[3] {
                    let prod = m1 as i128 * m2 as i128 * m3 as i128 * m4 as i128;
                    if !is_square(prod) {
                        continue;
                    }
                    let g = gcd(gcd(m1 as i128, m2 as i128), gcd(m3 as i128, m4 as i128));
                    if g != 1 {
                        continue;
                    }
                    let alpha = crate::arith::isqrt(prod as u128) as i64;
                    out.push(TorsorClass { m: [m1, m2, m3, m4], alpha });
                }
            }
        }
    }
    out.sort();
    out
}

/// Bit 2j is D_j^+, bit 2j+1 is D_j^-.
pub type DivisorSet = u8;

fn pair_set(j: usize, k: usize) -> DivisorSet {
    (1 << (2 * j + 1)) | (1 << (2 * k))
}

/// E_p with Moebius weights mu_p, ordered by (size, mask).
pub fn local_moebius(spec: &SurfaceSpec, p: u64) -> Vec<(DivisorSet, i32)> {
    let mut pairs = Vec::new();
    for j in 0..4 {
        for k in j + 1..4 {
            if spec.delta[j][k] % p as i64 == 0 {
                pairs.push(pair_set(j, k));
            }
        }
    }
    let mut sets: Vec<DivisorSet> = (0u32..(1 << pairs.len()))
        .map(|mask| {
            (0..pairs.len())
                .filter(|i| mask >> i & 1 == 1)
                .fold(0, |acc, i| acc | pairs[i])
        })
        .collect();
    sets.sort_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let mut out: Vec<(DivisorSet, i32)> = Vec::with_capacity(sets.len());
    for &i in &sets {
        let mu = if i == 0 {
            1
        } else {
            -out
                .iter()
                .filter(|(j, _)| j & i == *j && *j != i)
                .map(|(_, m)| m)
                .sum::<i32>()
        };
        out.push((i, mu));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaPrimeTerm {
    pub ideals: [IdealRep; 4],
    pub mu: i32,
    pub norms: [u64; 4],
}

impl SigmaPrimeTerm {
    pub fn trivial() -> Self {
        SigmaPrimeTerm {
            ideals: std::array::from_fn(|_| IdealRep::unit()),
            mu: 1,
            norms: [1; 4],
        }
    }

    pub fn total_norm(&self) -> u64 {
        self.norms.iter().product()
    }
}

pub fn build_sigma_prime(spec: &SurfaceSpec) -> Vec<SigmaPrimeTerm> {
    let bp = bad_prime_data(spec);
    // each entry: per-j factor lists and weight
    let mut acc: Vec<([Vec<PrimeIdeal>; 4], i32)> = vec![(Default::default(), 1)];
    for &p in &bp.sprime {
        let local = local_moebius(spec, p);
        let mut next = Vec::new();
        for (facs, mu) in &acc {
            for &(set, mu_p) in local.iter().filter(|(_, m)| *m != 0) {
                let mut f = facs.clone();
                for (j, fj) in f.iter_mut().enumerate() {
                    if set >> (2 * j) & 1 == 1 {
                        fj.push(PrimeIdeal { p, conj: false });
                    }
                    if set >> (2 * j + 1) & 1 == 1 {
                        fj.push(PrimeIdeal { p, conj: true });
                    }
                }
                next.push((f, mu * mu_p));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(f, mu)| {
            let ideals: [IdealRep; 4] = f.map(IdealRep::from_factors);
            let norms = std::array::from_fn(|j| ideals[j].norm);
            SigmaPrimeTerm { ideals, mu, norms }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub m: TorsorClass,
    pub polygon: Vec<(Q, Q)>,
    pub area: Q,
}

fn q(n: i128) -> Q {
    Q::from_integer(n)
}

/// Keep the part of `poly` where a*u + b*v >= 0.
fn clip(poly: &[(Q, Q)], a: i128, b: i128) -> Vec<(Q, Q)> {
    let side = |p: &(Q, Q)| q(a) * p.0 + q(b) * p.1;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let cur = &poly[i];
        let nxt = &poly[(i + 1) % poly.len()];
        let (sc, sn) = (side(cur), side(nxt));
        if !sc.is_negative() {
            out.push(*cur);
        }
        if (sc.is_negative() && sn.is_positive()) || (sc.is_positive() && sn.is_negative()) {
            let t = sc / (sc - sn);
            out.push((cur.0 + t * (nxt.0 - cur.0), cur.1 + t * (nxt.1 - cur.1)));
        }
    }
    out
}

fn cross(o: &(Q, Q), a: &(Q, Q), b: &(Q, Q)) -> Q {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Removes repeated and collinear vertices; rotates to start at the smallest vertex.
fn tidy(poly: Vec<(Q, Q)>) -> Vec<(Q, Q)> {
    let mut v: Vec<(Q, Q)> = Vec::with_capacity(poly.len());
    for p in poly {
        if v.last() != Some(&p) {
            v.push(p);
        }
    }
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    let mut changed = true;
    while changed && v.len() >= 3 {
        changed = false;
        for i in 0..v.len() {
            let n = v.len();
            let (a, b, c) = (&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]);
            if cross(a, b, c).is_zero() {
                v.remove(i);
                changed = true;
                break;
            }
        }
    }
    if v.len() < 3 {
        return Vec::new();
    }
    let start = (0..v.len()).min_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap()).unwrap();
    v.rotate_left(start);
    v
}

pub fn polygon_area(poly: &[(Q, Q)]) -> Q {
    let mut s = Q::zero();
    for i in 0..poly.len() {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        s += a.0 * b.1 - a.1 * b.0;
    }
    (s / q(2)).abs()
}

fn unit_square() -> Vec<(Q, Q)> {
    vec![(q(-1), q(-1)), (q(1), q(-1)), (q(1), q(1)), (q(-1), q(1))]
}

/// Closure of R_m = {|u|, |v| <= 1, m_j L_j(u, v) > 0}, by exact clipping.
pub fn region_polygon(spec: &SurfaceSpec, m: &TorsorClass) -> Region {
    let mut poly = unit_square();
    for j in 0..4 {
        let s = m.m[j].signum() as i128;
        poly = clip(&poly, s * spec.a[j] as i128, s * spec.b[j] as i128);
        if poly.is_empty() {
            break;
        }
    }
    let polygon = tidy(poly);
    let area = polygon_area(&polygon);
    Region { m: *m, polygon, area }
}

fn half_turn_cmp(a: (i128, i128), b: (i128, i128)) -> Ordering {
    // full-turn angle order of two nonzero vectors
    let upper = |p: (i128, i128)| p.1 > 0 || (p.1 == 0 && p.0 > 0);
    match (upper(a), upper(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => 0.cmp(&(a.0 * b.1 - a.1 * b.0)),
    }
}

/// Area of {(u, v) in [-1,1]^2 : prod L_j(u, v) > 0}, summed sector by sector
/// between consecutive rays of the lines L_j = 0.
pub fn positive_product_area(spec: &SurfaceSpec) -> Q {
    sector_area(spec, false)
}

/// Same as `positive_product_area` restricted to u > 0, the half plane that the
/// regions R_m cover (m_1 > 0 forces u > 0).
pub fn positive_product_area_right(spec: &SurfaceSpec) -> Q {
    sector_area(spec, true)
}

fn sector_area(spec: &SurfaceSpec, right_only: bool) -> Q {
    let mut rays: Vec<(i128, i128)> = Vec::with_capacity(8);
    for j in 0..4 {
        let d = (-spec.b[j] as i128, spec.a[j] as i128);
        rays.push(d);
        rays.push((-d.0, -d.1));
    }
    rays.sort_by(|&a, &b| half_turn_cmp(a, b));
    let to_square = |d: (i128, i128)| {
        let s = d.0.abs().max(d.1.abs());
        (Q::new(d.0, s), Q::new(d.1, s))
    };
    let corners = [(1i128, 1i128), (-1, 1), (-1, -1), (1, -1)];
    let mut total = Q::zero();
    for i in 0..rays.len() {
        let (r1, r2) = (rays[i], rays[(i + 1) % rays.len()]);
        let (p1, p2) = (to_square(r1), to_square(r2));
        let mid = ((p1.0 + p2.0) / q(2), (p1.1 + p2.1) / q(2));
        let sign: Q = (0..4)
            .map(|j| q(spec.a[j] as i128) * mid.0 + q(spec.b[j] as i128) * mid.1)
            .fold(q(1), |acc, x| acc * x);
        if !sign.is_positive() || (right_only && !mid.0.is_positive()) {
            continue;
        }
        let mut poly = vec![(q(0), q(0)), p1];
        let inside = |c: (i128, i128)| {
            r1.0 * c.1 - r1.1 * c.0 > 0 && c.0 * r2.1 - c.1 * r2.0 > 0
        };
        let mut cs: Vec<(i128, i128)> = corners.iter().copied().filter(|&c| inside(c)).collect();
        cs.sort_by(|&a, &b| 0.cmp(&(a.0 * b.1 - a.1 * b.0)));
        poly.extend(cs.into_iter().map(|c| (q(c.0), q(c.1))));
        poly.push(p2);
        total += polygon_area(&poly);
    }
    total
}

/// Cross-ratio (Delta_31/Delta_32) / (Delta_41/Delta_42).
pub fn cross_ratio(spec: &SurfaceSpec) -> Q {
    let d = |j: usize, k: usize| spec.delta[j - 1][k - 1] as i128;
    Q::new(d(3, 1), d(3, 2)) / Q::new(d(4, 1), d(4, 2))
}

/// Sign pattern of (L_j) on one of the two arcs of P^1(R) where prod L_j > 0,
/// normalized so that L_1 > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PositiveArc {
    pub start: (i64, i64),
    pub end: (i64, i64),
    pub pattern: [i8; 4],
}

/// The two arcs (u:v) with prod L_j > 0, label A first.
pub fn positive_arcs(spec: &SurfaceSpec) -> [PositiveArc; 2] {
    // root directions in the upper half plane, sorted by angle in [0, pi)
    let mut dirs: Vec<(i64, i64)> = (0..4)
        .map(|j| {
            let (u, v) = (-spec.b[j], spec.a[j]);
            if v < 0 || (v == 0 && u < 0) {
                (-u, -v)
            } else {
                (u, v)
            }
        })
        .collect();
    dirs.sort_by(|&a, &b| 0.cmp(&(a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128)));
    let mut arcs = Vec::new();
    for i in 0..4 {
        let s = dirs[i];
        let e = if i == 3 { (-dirs[0].0, -dirs[0].1) } else { dirs[i + 1] };
        // interior sample: sum of the two directions scaled to the unit box
        let (ms, me) = (s.0.abs().max(s.1.abs()), e.0.abs().max(e.1.abs()));
        let (mut u, mut v) = (s.0 * me + e.0 * ms, s.1 * me + e.1 * ms);
        let l = spec.forms(u, v);
        if l[0] < 0 {
            u = -u;
            v = -v;
        }
        let l = spec.forms(u, v);
        let prod: i128 = l.iter().map(|&x| x.signum() as i128).product();
        if prod > 0 {
            arcs.push(PositiveArc { start: s, end: e, pattern: l.map(|x| x.signum() as i8) });
        }
    }
    assert_eq!(arcs.len(), 2, "product of four separated linear forms is positive on two arcs");
    arcs.sort_by(|x, y| y.pattern.cmp(&x.pattern));
    [arcs[0], arcs[1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn showcase() -> SurfaceSpec {
        validate(1, 1, 1, -1).unwrap()
    }

    #[test]
    fn validate_examples() {
        let s = showcase();
        assert_eq!(s.delta[2][3], -2);
        assert_eq!(s.big_delta, 2);
        assert_eq!(s.csq, 4);
        assert_eq!(s.c(), 2.0);
        assert!(matches!(validate(2, 2, 1, 1), Err(Error::Gcd(..))));
        assert!(matches!(validate(1, 1, 2, 2), Err(Error::Gcd(..))));
        assert!(matches!(validate(1, 1, 1, 1), Err(Error::Degenerate(3, 4))));
        assert!(matches!(validate(0, 1, 1, 1), Err(Error::Degenerate(2, 3))));
        assert!(matches!(validate(2_000_000, 1, 1, 1), Err(Error::CoefficientTooLarge(..))));
    }

    #[test]
    fn resultant_antisymmetry() {
        let s = validate(3, -7, 5, 2).unwrap();
        assert_eq!(s.delta[0][1], 1);
        for j in 0..4 {
            for k in 0..4 {
                assert_eq!(s.delta[j][k], -s.delta[k][j]);
            }
        }
    }

    #[test]
    fn bad_primes() {
        let bp = bad_prime_data(&showcase());
        assert_eq!(bp.s, vec![2]);
        assert!(bp.s_j.iter().all(|s| s.is_empty()));
        assert!(bp.sprime.is_empty());

        let s = validate(1, 3, 3, 1).unwrap();
        assert_eq!(s.delta[2][3], -8);
        let bp = bad_prime_data(&s);
        assert_eq!(bp.s, vec![2, 3]);
        // Delta_13 = 3 and Delta_24 = -3
        for sj in &bp.s_j {
            assert_eq!(sj, &vec![3]);
        }
    }

    #[test]
    fn sigma_showcase() {
        let sig = build_sigma(&showcase());
        let ms: Vec<[i64; 4]> = sig.iter().map(|c| c.m).collect();
        assert_eq!(ms.len(), 4);
        for m in [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]] {
            assert!(ms.contains(&m));
        }
        assert!(sig.iter().all(|c| c.alpha == 1));
    }

    #[test]
    fn sigma_with_odd_bad_prime() {
        let s = validate(1, 3, 3, 1).unwrap();
        let sig = build_sigma(&s);
        assert!(sig.contains(&TorsorClass::trivial()));
        for c in &sig {
            assert!(c.m[0] > 0);
            let prod: i128 = c.m.iter().map(|&x| x as i128).product();
            assert_eq!(c.alpha as i128 * c.alpha as i128, prod);
        }
        assert!(sig.iter().any(|c| c.m == [1, 3, 3, 1] || c.m == [1, 3, -3, -1]));
    }

    #[test]
    fn sigma_prime_local_posets() {
        // 5 | Delta_34 only
        let s = validate(1, 1, 1, -4).unwrap();
        let bp = bad_prime_data(&s);
        assert_eq!(bp.sprime, vec![5]);
        let lm = local_moebius(&s, 5);
        assert_eq!(lm, vec![(0, 1), (pair_set(2, 3), -1)]);
        let terms = build_sigma_prime(&s);
        assert_eq!(terms.len(), 2);
        let t = terms.iter().find(|t| t.mu == -1).unwrap();
        assert_eq!(t.norms, [1, 1, 5, 5]);
        assert!(t.ideals[2].factors[0].conj);
        assert!(!t.ideals[3].factors[0].conj);

        // 5 | Delta_13 and 5 | Delta_24: two disjoint pairs give a Boolean poset
        let s = validate(1, 5, 5, 1).unwrap();
        let lm = local_moebius(&s, 5);
        let (i13, i24) = (pair_set(0, 2), pair_set(1, 3));
        let mut want = vec![(0, 1), (i13, -1), (i24, -1), (i13 | i24, 1)];
        want.sort_by_key(|(s, _)| (s.count_ones(), *s));
        assert_eq!(lm, want);
    }

    #[test]
    fn sigma_prime_trivial() {
        let t = build_sigma_prime(&showcase());
        assert_eq!(t, vec![SigmaPrimeTerm::trivial()]);
    }

    #[test]
    fn regions_showcase() {
        let s = showcase();
        let r = region_polygon(&s, &TorsorClass { m: [1, 1, 1, 1], alpha: 1 });
        assert_eq!(r.polygon, vec![(q(0), q(0)), (q(1), q(0)), (q(1), q(1))]);
        assert_eq!(r.area, Q::new(1, 2));
        let r = region_polygon(&s, &TorsorClass { m: [1, 1, -1, -1], alpha: 1 });
        assert!(r.polygon.is_empty());
        assert!(r.area.is_zero());
        let r = region_polygon(&s, &TorsorClass { m: [1, -1, -1, 1], alpha: 1 });
        let mut got = r.polygon.clone();
        got.sort();
        assert_eq!(got, vec![(q(0), q(-1)), (q(0), q(0)), (q(1), q(-1))]);
        assert_eq!(r.area, Q::new(1, 2));
    }

    #[test]
    fn partition_showcase() {
        let s = showcase();
        let total: Q = build_sigma(&s).iter().map(|m| region_polygon(&s, m).area).sum();
        assert_eq!(total, positive_product_area_right(&s));
        assert_eq!(total, q(1));
        assert_eq!(positive_product_area(&s), q(2));
    }

    #[test]
    fn cross_ratios() {
        assert_eq!(cross_ratio(&showcase()), q(-1));
        assert_eq!(cross_ratio(&validate(1, 2, 1, 3).unwrap()), Q::new(2, 3));
    }

    #[test]
    fn roots_showcase() {
        let r = showcase().roots();
        assert_eq!(r, [(0, -1), (1, 0), (1, -1), (1, 1)]);
    }

    #[test]
    fn arcs_showcase() {
        let arcs = positive_arcs(&showcase());
        assert_eq!(arcs[0].pattern, [1, 1, 1, 1]);
        assert_eq!(arcs[1].pattern, [1, -1, -1, 1]);
    }
}
