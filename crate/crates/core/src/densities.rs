//! Local densities sigma_p, the 2-adic density, the archimedean factor and
//! the assembled leading constant.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd_u64, is_prime, odd_squarefree_up_to, primes_up_to, v_p, KahanSum};
use crate::error::{Error, Result};
use crate::gaussian::{chi, squarefree_ideals_up_to, IdealRep};
use crate::lattice::{m_of, rho};
use crate::sums::{build_dvector, c_m_constant, prime_tail_bound, DVector, DEFAULT_CM_P0};
use crate::surface::{build_sigma, build_sigma_prime, region_polygon, SurfaceSpec, TorsorClass, Q};

/// Level cap for the brute-force oracle: p^n must not exceed this.
pub const ORACLE_CAP: u64 = 20_000_000;
pub const DEFAULT_P0: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Series,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalDensity {
    pub p: u64,
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Generic density (1 - chi(p)/p)^4 S_0^{chi(p)}(1/p) as an exact rational.
pub fn sigma_p_closed(spec: &SurfaceSpec, p: u64) -> Result<Q> {
    check_odd_prime(p)?;
    if spec.big_delta % p as i128 == 0 {
        return Err(Error::Domain(format!("{p} divides Delta")));
    }
    Ok(closed_exact(p))
}

fn closed_exact(p: u64) -> Q {
    let x = Q::new(1, p as i128);
    let one = Q::from_integer(1);
    if p % 4 == 1 {
        let num = one + x * 2 + x * x * 6 + x * x * x * 2 + x * x * x * x;
        num / ((one + x) * (one + x))
    } else {
        (one - x * x) * (one - x * x) / (one + x * x)
    }
}

fn closed_f64(p: u64) -> f64 {
    let x = 1.0 / p as f64;
    if p % 4 == 1 {
        (1.0 + 2.0 * x + 6.0 * x * x + 2.0 * x.powi(3) + x.powi(4)) / (1.0 + x).powi(2)
    } else {
        (1.0 - x * x).powi(2) / (1.0 + x * x)
    }
}

fn exponents(p: u64, v: [u64; 4]) -> [u32; 4] {
    v.map(|x| v_p(x as u128, p as u128))
}

/// Largest valuation of a resultant at p.
fn delta_valuation(spec: &SurfaceSpec, p: u64) -> u32 {
    let mut best = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            best = best.max(v_p(spec.delta[i][j].unsigned_abs() as u128, p as u128));
        }
    }
    best
}

type RhoKey = ([i64; 4], u64, [u32; 4]);

fn rho_cache() -> &'static Mutex<HashMap<RhoKey, u128>> {
    static CACHE: OnceLock<Mutex<HashMap<RhoKey, u128>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Truncation level for the nu-series. With exact lattices p^{M + max lambda}
/// must stay below 2^62; the closed form only needs a negligible tail.
fn series_cut(p: u64, lam_max: u32, generic: bool) -> u32 {
    if generic {
        let mut m = 1;
        while m < 40 && series_tail(p, 0, m) > 1e-17 {
            m += 1;
        }
        return m;
    }
    let bits = (62.0 * std::f64::consts::LN_2 / (p as f64).ln()).floor() as i64;
    (bits - lam_max as i64 - 1).clamp(1, 40) as u32
}

fn series_tail(p: u64, delta: u32, m: u32) -> f64 {
    let pf = p as f64;
    let mut s = 0.0;
    for k in m + 1..m + 400 {
        let t = ((k + 1) as f64).powi(4) * pf.powi(-(k as i32));
        s += t;
        if t < 1e-30 {
            break;
        }
    }
    (1.0 + 1.0 / pf).powi(4) * pf.powi(delta as i32) * s
}

/// sigma_p(d, D) by the rho-series, with a bound on the truncation error.
pub fn sigma_p_series(spec: &SurfaceSpec, p: u64, d: [u64; 4], dd: [u64; 4]) -> Result<LocalDensity> {
    check_odd_prime(p)?;
    static CACHE: OnceLock<Mutex<HashMap<([i64; 4], u64, [u32; 4], [u32; 4]), LocalDensity>>> = OnceLock::new();
    let lam = exponents(p, d);
    let mu = exponents(p, dd);
    let key = (spec.coefficients(), p, lam, mu);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&key) {
        return Ok(v);
    }
    let out = series_core(spec, p, lam, mu)?;
    cache.lock().unwrap().insert(key, out);
    Ok(out)
}

fn series_core(spec: &SurfaceSpec, p: u64, lam: [u32; 4], mu: [u32; 4]) -> Result<LocalDensity> {
    let generic = spec.big_delta % p as i128 != 0;
    let lam_max = *lam.iter().chain(mu.iter()).max().unwrap();
    let m = series_cut(p, lam_max, generic);
    let mut rho_guard = if generic { None } else { Some(rho_cache().lock().unwrap()) };
    let c = chi(p as i128) as f64;
    let pf = p as f64;
    let mut s = KahanSum::new();
    for a in 0..=m {
        for b in 0..=m - a.min(m) {
            let ab = a.max(b);
            if a + b > m {
                continue;
            }
            for cc in 0..=m - ab {
                let abc = ab.max(cc);
                for dd4 in 0..=m - abc {
                    let nu = [a, b, cc, dd4];
                    if m_of(nu) > m {
                        continue;
                    }
                    let e: [u32; 4] = std::array::from_fn(|j| mu[j].max(lam[j] + nu[j]));
                    let inv = if generic {
                        pf.powi(-(m_of(e) as i32))
                    } else {
                        let cache = rho_guard.as_mut().expect("lattice path holds the cache");
                        let key = (spec.coefficients(), p, e);
                        let r = match cache.get(&key) {
                            Some(&r) => r,
                            None => {
                                let r = rho(spec, e.map(|k| p.pow(k)))?;
                                cache.insert(key, r);
                                r
                            }
                        };
                        1.0 / r as f64
                    };
                    let sign = if c < 0.0 && (a + b + cc + dd4) % 2 == 1 { -1.0 } else { 1.0 };
                    s.add(sign * inv);
                }
            }
        }
    }
    let pre = (1.0 - c / pf).powi(4);
    Ok(LocalDensity {
        p,
        value: pre * s.value(),
        error: series_tail(p, delta_valuation(spec, p), m),
        method: Method::Series,
    })
}

/// R(k, n) = #{(s, t) mod p^n : s^2 + t^2 = A} for v_p(A) = k (k >= n means A = 0).
fn r_local(p: u64, k: u32, n: u32, memo: &mut HashMap<(u32, u32), u128>) -> u128 {
    if n == 0 {
        return 1;
    }
    let k = k.min(n);
    if let Some(&v) = memo.get(&(k, n)) {
        return v;
    }
    let pp = p as u128;
    let split = p % 4 == 1;
    let v = if k == 0 {
        pp.pow(n - 1) * if split { pp - 1 } else { pp + 1 }
    } else {
        // nonzero solutions mod p are nonsingular and lift
        let nonzero = if split { 2 * (pp - 1) * pp.pow(n - 1) } else { 0 };
        let zero = if n <= 2 {
            if k >= n {
                pp.pow(2 * (n - 1))
            } else {
                0
            }
        } else if k >= 2 {
            pp * pp * r_local(p, k - 2, n - 2, memo)
        } else {
            0
        };
        nonzero + zero
    };
    memo.insert((k, n), v);
    v
}

/// p^{-6n - |lambda|} N_{d,D}(p^n) by exhaustive counting modulo p^n.
pub fn sigma_p_oracle(spec: &SurfaceSpec, p: u64, d: [u64; 4], dd: [u64; 4], n: u32) -> Result<BigRational> {
    check_odd_prime(p)?;
    if n == 0 {
        return Ok(BigRational::one());
    }
    let modulus = p
        .checked_pow(n)
        .filter(|&q| q <= ORACLE_CAP)
        .ok_or_else(|| Error::Resource(format!("{p}^{n} exceeds the oracle cap {ORACLE_CAP}")))?;
    let lam = exponents(p, d);
    let mu = exponents(p, dd);
    if lam.iter().chain(mu.iter()).any(|&e| e > n) {
        return Err(Error::Domain(format!("level {n} below the p-adic valuation of d or D")));
    }
    let classes = valuation_classes(spec, p, n, modulus);
    let mut memo = HashMap::new();
    let per_j = |j: usize, e: u32, memo: &mut HashMap<(u32, u32), u128>| -> BigInt {
        if e < lam[j] || e < mu[j] {
            return BigInt::zero();
        }
        BigInt::from(p).pow(2 * lam[j]) * BigInt::from(r_local(p, e - lam[j], n - lam[j], memo))
    };
    let mut total = BigInt::zero();
    let mut keys: Vec<_> = classes.keys().copied().collect();
    keys.sort_unstable();
    for e in keys {
        let mut prod = BigInt::from(classes[&e]);
        for j in 0..4 {
            prod *= per_j(j, e[j], &mut memo);
        }
        total += prod;
    }
    let lsum: u32 = lam.iter().sum();
    Ok(BigRational::new(total, BigInt::from(p).pow(6 * n + lsum)))
}

/// Number of (u, v) mod p^n by capped valuation vector of (L_j(u, v)).
fn valuation_classes(spec: &SurfaceSpec, p: u64, n: u32, modulus: u64) -> HashMap<[u32; 4], u128> {
    let mut out: HashMap<[u32; 4], u128> = HashMap::new();
    out.insert([n; 4], 1);
    let val = |x: i128, cap: u32| -> u32 {
        if x == 0 {
            return cap;
        }
        v_p(x.unsigned_abs(), p as u128).min(cap)
    };
    let mut q = modulus;
    for k in 0..n {
        // primitive (u', v') mod p^{n-k}, grouped by projective point
        let np = n - k;
        let units = (q - q / p) as u128;
        let mut local: HashMap<[u32; 4], u128> = HashMap::new();
        let mut add = |u: i128, v: i128| {
            let e: [u32; 4] = std::array::from_fn(|j| k + val(spec.a[j] as i128 * u + spec.b[j] as i128 * v, np));
            *local.entry(e).or_insert(0) += units;
        };
        for w in 0..q {
            add(1, w as i128);
        }
        for w in 0..q / p {
            add((p * w) as i128, 1);
        }
        for (e, c) in local {
            *out.entry(e).or_insert(0) += c;
        }
        q /= p;
    }
    out
}

/// Stabilized 2-adic density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sigma2 {
    pub value: f64,
    pub exact_num: i128,
    pub exact_den: i128,
    pub level: u32,
}

fn r2_table(n: u32) -> Vec<u64> {
    let q = 1usize << n;
    let mut sq = vec![0u64; q];
    for s in 0..q {
        sq[(s * s) % q] += 1;
    }
    let nz: Vec<(usize, u64)> = sq.iter().copied().enumerate().filter(|&(_, c)| c > 0).collect();
    let mut out = vec![0u64; q];
    for &(a, ca) in &nz {
        for &(b, cb) in &nz {
            out[(a + b) % q] += ca * cb;
        }
    }
    out
}

fn n2_level(spec: &SurfaceSpec, d: [i64; 4], n: u32) -> u128 {
    let q = 1i64 << n;
    let table = r2_table(n);
    let inv: [i64; 4] = d.map(|x| {
        crate::arith::mod_inv(x.rem_euclid(q) as i128, q as i128).expect("odd d") as i64
    });
    (0..q)
        .into_par_iter()
        .map(|u| {
            let mut s = 0u128;
            for v in 0..q {
                if u % 2 == 0 && v % 2 == 0 {
                    continue;
                }
                let mut w = 1u128;
                for j in 0..4 {
                    let l = (spec.a[j] * u + spec.b[j] * v).rem_euclid(q);
                    let a = ((l as i128 * inv[j] as i128).rem_euclid(q as i128)) as usize;
                    w *= table[a] as u128;
                    if w == 0 {
                        break;
                    }
                }
                s += w;
            }
            s
        })
        .sum()
}

/// 2^{-6n} N_d(2^n) at a single level.
pub fn sigma_2_level(spec: &SurfaceSpec, d: [i64; 4], n: u32) -> f64 {
    n2_level(spec, d, n) as f64 / 2f64.powi(6 * n as i32)
}

/// 2^{-6n} N_d(2^n) over (u, v) not both even, for increasing n until two
/// consecutive levels agree exactly. Depends on d only through d mod 2^n.
pub fn sigma_2(spec: &SurfaceSpec, d: [i64; 4], n_max: u32) -> Result<Sigma2> {
    if let Some(j) = d.iter().position(|&x| x % 2 == 0) {
        return Err(Error::Parity(j + 1, d[j].unsigned_abs()));
    }
    if n_max > 12 {
        return Err(Error::Resource(format!("n_max = {n_max} exceeds 12")));
    }
    static CACHE: OnceLock<Mutex<HashMap<([i64; 4], [i64; 4], u32), Sigma2>>> = OnceLock::new();
    let key = (spec.coefficients(), d.map(|x| x.rem_euclid(1 << n_max)), n_max);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&key) {
        return Ok(v);
    }
    let mut prev = n2_level(spec, d, 1);
    for n in 2..=n_max {
        let cur = n2_level(spec, d, n);
        if cur == prev << 6 {
            let den = 1i128 << (6 * (n - 1));
            let out = Sigma2 { value: prev as f64 / den as f64, exact_num: prev as i128, exact_den: den, level: n - 1 };
            cache.lock().unwrap().insert(key, out);
            return Ok(out);
        }
        if n == n_max {
            return Err(Error::NoStabilization {
                n,
                prev: prev as f64 / 2f64.powi(6 * (n as i32 - 1)),
                last: cur as f64 / 2f64.powi(6 * n as i32),
            });
        }
        prev = cur;
    }
    unreachable!("n_max >= 2 handled by the loop")
}

/// pi^4 Vol(R_m).
pub fn omega_infty(spec: &SurfaceSpec, m: &TorsorClass) -> f64 {
    let area = region_polygon(spec, m).area;
    std::f64::consts::PI.powi(4) * (*area.numer() as f64 / *area.denom() as f64)
}

/// Product of generic closed forms over odd p <= p0 with p not dividing Delta,
/// and the estimated factor for p > p0 with its bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenericProduct {
    pub partial: f64,
    pub tail_estimate: f64,
    pub tail_error: f64,
}

pub fn generic_product(spec: &SurfaceSpec, p0: u64) -> GenericProduct {
    static CACHE: OnceLock<Mutex<HashMap<(i128, u64), GenericProduct>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&g) = cache.lock().unwrap().get(&(spec.big_delta, p0)) {
        return g;
    }
    let mut log = KahanSum::new();
    for p in primes_up_to(p0) {
        if p == 2 || spec.big_delta % p as i128 == 0 {
            continue;
        }
        log.add(closed_f64(p).ln());
    }
    let t = prime_tail_bound(p0 as f64);
    // log sigma_p averages to about 1/p^2 over both residue classes
    let est = (1.0 / (p0 as f64 * (p0 as f64).ln())).exp();
    let g = GenericProduct { partial: log.value().exp(), tail_estimate: est, tail_error: (8.0 * t).exp() - 1.0 };
    cache.lock().unwrap().insert((spec.big_delta, p0), g);
    g
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub omega_inf: f64,
    pub sigma2: f64,
    pub sigma2_level: u32,
    pub sigma_p: Vec<LocalDensity>,
    pub generic_product: f64,
    pub c_class: f64,
    pub truncation_error: f64,
    pub p0: u64,
}

/// Odd primes at which sigma_p(d, D) is not given by the generic closed form.
fn special_primes(spec: &SurfaceSpec, dv: &DVector) -> Vec<u64> {
    let mut ps: Vec<u64> = Vec::new();
    let mut push = |n: u128| {
        if n > 1 {
            for (p, _) in crate::arith::factor(n).expect("in range") {
                if p != 2 && !ps.contains(&p) {
                    ps.push(p);
                }
            }
        }
    };
    push(spec.big_delta.unsigned_abs());
    for j in 0..4 {
        push(dv.d[j] as u128);
        push(dv.dd[j] as u128);
    }
    ps.sort_unstable();
    ps
}

/// c_{d,D,R_m} = omega_inf * sigma_2 * prod_p sigma_p(d, D).
pub fn c_class(spec: &SurfaceSpec, m: &TorsorClass, dv: &DVector, p0: u64) -> Result<DensityReport> {
    let omega = omega_infty(spec, m);
    let gp = generic_product(spec, p0);
    if omega == 0.0 {
        return Ok(DensityReport {
            omega_inf: 0.0,
            sigma2: 0.0,
            sigma2_level: 0,
            sigma_p: Vec::new(),
            generic_product: gp.partial,
            c_class: 0.0,
            truncation_error: 0.0,
            p0,
        });
    }
    let s2 = sigma_2(spec, dv.signed_d(), 12)?;
    let mut value = omega * s2.value * gp.partial * gp.tail_estimate;
    let mut rel_err = gp.tail_error;
    let mut locals = Vec::new();
    for p in special_primes(spec, dv) {
        let ld = sigma_p_series(spec, p, dv.d, dv.dd)?;
        if spec.big_delta % p as i128 == 0 {
            value *= ld.value;
            if ld.value != 0.0 {
                rel_err += ld.error / ld.value.abs();
            }
        } else if p <= p0 {
            // replace the generic factor already in the partial product
            value *= ld.value / closed_f64(p);
            rel_err += ld.error / closed_f64(p);
        } else {
            value *= ld.value;
            rel_err += ld.error;
        }
        locals.push(ld);
    }
    Ok(DensityReport {
        omega_inf: omega,
        sigma2: s2.value,
        sigma2_level: s2.level,
        sigma_p: locals,
        generic_product: gp.partial,
        c_class: value,
        truncation_error: value.abs() * rel_err,
        p0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    pub c: f64,
    pub terms: u64,
    pub tail_bound: f64,
    pub tail_is_estimate: bool,
    pub alpha_s: u32,
    pub beta_s: u32,
    pub tors: u32,
    pub lmax: u64,
    pub bmax: u64,
    pub p0: u64,
    pub cm_p0: u64,
    pub precision: &'static str,
}

pub const DEFAULT_LMAX: u64 = 15;
pub const DEFAULT_BMAX: u64 = 50;

fn b_quadruples(ideals: &[(IdealRep, i32)], bmax: u64) -> Vec<[usize; 4]> {
    let idx: Vec<usize> = (0..ideals.len()).filter(|&i| ideals[i].0.norm <= bmax).collect();
    let mut out = Vec::with_capacity(idx.len().pow(4));
    for &a in &idx {
        for &b in &idx {
            for &c in &idx {
                for &d in &idx {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// The leading constant truncated to l <= lmax and N(b_j) <= bmax. The tail is
/// estimated as the change between the half-size truncation and the full one.
pub fn assemble_constant(spec: &SurfaceSpec, lmax: u64, bmax: u64, p0: u64) -> Result<ConstantReport> {
    assemble_constant_with(spec, lmax, bmax, p0, DEFAULT_CM_P0)
}

pub fn assemble_constant_with(spec: &SurfaceSpec, lmax: u64, bmax: u64, p0: u64, cm_p0: u64) -> Result<ConstantReport> {
    let sigma: Vec<TorsorClass> =
        build_sigma(spec).into_iter().filter(|m| omega_infty(spec, m) > 0.0).collect();
    let sprime = build_sigma_prime(spec);
    let ideals = squarefree_ideals_up_to(bmax);
    let quads = b_quadruples(&ideals, bmax);
    let ells: Vec<(u64, i32)> =
        odd_squarefree_up_to(lmax).into_iter().map(|l| (l, crate::arith::mobius(l))).collect();
    let mut full = KahanSum::new();
    let mut half = KahanSum::new();
    let mut terms = 0u64;
    for m in &sigma {
        for a in &sprime {
            let cm = c_m_constant(a.total_norm(), cm_p0).value;
            let parts: Vec<Result<Vec<(f64, bool)>>> = quads
                .par_iter()
                .map(|q| {
                    let bs: [IdealRep; 4] = q.map(|i| ideals[i].0.clone());
                    let mu_b: i32 = q.iter().map(|&i| ideals[i].1).product();
                    let c = bs[0].lcm(&bs[1]).lcm(&bs[2]).lcm(&bs[3]);
                    if gcd_u64(c.norm, a.total_norm()) != 1 {
                        return Ok(Vec::new());
                    }
                    let small_b = bs.iter().all(|b| 2 * b.norm <= bmax);
                    let mut out = Vec::with_capacity(ells.len());
                    for &(ell, mu_l) in &ells {
                        let dv = build_dvector(m, a, &bs, ell)?;
                        let cc = c_class(spec, m, &dv, p0)?.c_class;
                        let w = (a.mu * mu_b * mu_l) as f64 * cm * cc / c.norm as f64;
                        out.push((w, small_b && 2 * ell <= lmax));
                    }
                    Ok(out)
                })
                .collect();
            for part in parts {
                for (w, small) in part? {
                    full.add(w);
                    if small {
                        half.add(w);
                    }
                    terms += 1;
                }
            }
        }
    }
    let c = full.value() / 256.0;
    Ok(ConstantReport {
        c,
        terms,
        tail_bound: (c - half.value() / 256.0).abs(),
        tail_is_estimate: true,
        alpha_s: 1,
        beta_s: 4,
        tors: 256,
        lmax,
        bmax,
        p0,
        cm_p0,
        precision: "f64, compensated summation",
    })
}

/// Weights W(lambda) = sum of mu(b) / N(lcm b_j) over the p-parts of
/// (b_1, ..., b_4) at a split prime p, keyed by the exponents v_p(N(b_j)).
fn split_weights(p: u64) -> Vec<([u32; 4], f64)> {
    let mut acc: HashMap<[u32; 4], f64> = HashMap::new();
    // 0: trivial, 1: varpi, 2: conjugate, 3: both
    for code in 0..256u32 {
        let parts: [u32; 4] = std::array::from_fn(|j| code >> (2 * j) & 3);
        let lam = parts.map(|x| x.count_ones());
        let nprimes: u32 = lam.iter().sum();
        let any = parts.iter().fold(0, |a, &x| a | x);
        let norm = (p as f64).powi(any.count_ones() as i32);
        let mu = if nprimes.is_multiple_of(2) { 1.0 } else { -1.0 };
        *acc.entry(lam).or_insert(0.0) += mu / norm;
    }
    let mut out: Vec<_> = acc.into_iter().collect();
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Local factor at an odd prime p of the (b, l)-sum: sum over the p-parts of
/// b and l of mu(b) mu(l) sigma_p(d, D) / N(c)_p, with base exponents of
/// |m_j| N(a_j) at p. `a_coprime` is false when p divides N(a).
pub fn euler_local_factor(spec: &SurfaceSpec, p: u64, base: [u32; 4], a_coprime: bool) -> Result<LocalDensity> {
    check_odd_prime(p)?;
    type Key = ([i64; 4], u64, [u32; 4], bool);
    static CACHE: OnceLock<Mutex<HashMap<Key, LocalDensity>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    // generic primes are evaluated once each and need no memo
    let memo = spec.big_delta % p as i128 == 0 || base != [0; 4] || !a_coprime;
    let key = (spec.coefficients(), p, base, a_coprime);
    if memo {
        if let Some(&v) = cache.lock().unwrap().get(&key) {
            return Ok(v);
        }
    }
    let out = local_factor_core(spec, p, base, a_coprime)?;
    if memo {
        cache.lock().unwrap().insert(key, out);
    }
    Ok(out)
}

fn local_factor_core(spec: &SurfaceSpec, p: u64, base: [u32; 4], a_coprime: bool) -> Result<LocalDensity> {
    let weights = if p % 4 == 1 && a_coprime { split_weights(p) } else { vec![([0; 4], 1.0)] };
    let mut s = KahanSum::new();
    let mut err = 0.0;
    for (extra, w) in weights {
        let lam: [u32; 4] = std::array::from_fn(|j| base[j] + extra[j]);
        let mut mu_l = lam;
        mu_l[0] = mu_l[0].max(1);
        mu_l[1] = mu_l[1].max(1);
        let a = series_core(spec, p, lam, lam)?;
        let b = series_core(spec, p, lam, mu_l)?;
        s.add(w * (a.value - b.value));
        err += w.abs() * (a.error + b.error);
    }
    Ok(LocalDensity { p, value: s.value(), error: err, method: Method::Series })
}

/// The leading constant with the (b, l)-sums evaluated as Euler products over
/// p <= p0, i.e. without the l <= lmax, N(b_j) <= bmax truncation. The tail over
/// p > p0 is estimated from p^2 log F_p at the last primes of each residue class
/// and bracketed by |log F_p| <= 24/p^2.
pub fn assemble_constant_euler(spec: &SurfaceSpec, p0: u64) -> Result<ConstantReport> {
    assemble_constant_euler_with(spec, p0, DEFAULT_CM_P0)
}

pub fn assemble_constant_euler_with(spec: &SurfaceSpec, p0: u64, cm_p0: u64) -> Result<ConstantReport> {
    let sigma: Vec<TorsorClass> =
        build_sigma(spec).into_iter().filter(|m| omega_infty(spec, m) > 0.0).collect();
    let sprime = build_sigma_prime(spec);
    let primes: Vec<u64> = primes_up_to(p0).into_iter().filter(|&p| p != 2).collect();
    // generic factors depend on p alone
    let generic: Vec<Result<f64>> = primes
        .par_iter()
        .map(|&p| {
            if spec.big_delta % p as i128 == 0 {
                Ok(f64::NAN)
            } else {
                Ok(euler_local_factor(spec, p, [0; 4], true)?.value)
            }
        })
        .collect();
    let mut glog = KahanSum::new();
    let mut gvals = HashMap::new();
    let mut slope = [0.0f64; 2];
    for (&p, g) in primes.iter().zip(generic) {
        let g = g?;
        if !g.is_nan() {
            glog.add(g.ln());
            gvals.insert(p, g);
            slope[(p % 4 == 3) as usize] = (p * p) as f64 * g.ln();
        }
    }
    let t = prime_tail_bound(p0 as f64);
    let p0f = p0 as f64;
    glog.add((slope[0] + slope[1]) / 2.0 / (p0f * p0f.ln()));
    let tail_err = (24.0 * t).exp() - 1.0;
    let mut total = KahanSum::new();
    let mut rel_err = tail_err;
    let mut terms = 0;
    for m in &sigma {
        for a in &sprime {
            let d0: [u64; 4] = std::array::from_fn(|j| m.m[j].unsigned_abs() * a.norms[j]);
            let signed: [i64; 4] = std::array::from_fn(|j| m.m[j].signum() * d0[j] as i64);
            let s2 = sigma_2(spec, signed, 12)?;
            let mut log = KahanSum::new();
            log.add(glog.value());
            let mut special: Vec<u64> = Vec::new();
            for x in d0.iter().map(|&x| x as u128).chain([spec.big_delta.unsigned_abs()]) {
                if x > 1 {
                    for (p, _) in crate::arith::factor(x)? {
                        if p != 2 && !special.contains(&p) {
                            special.push(p);
                        }
                    }
                }
            }
            special.sort_unstable();
            for p in special {
                let base = exponents(p, d0);
                let f = euler_local_factor(spec, p, base, a.total_norm() % p != 0)?;
                if f.value <= 0.0 {
                    log.add(f64::NEG_INFINITY);
                    break;
                }
                log.add(f.value.ln());
                if let Some(g) = gvals.get(&p) {
                    if p <= p0 {
                        log.add(-g.ln());
                    }
                }
                rel_err += f.error / f.value;
            }
            let cm = c_m_constant(a.total_norm(), cm_p0).value;
            total.add(a.mu as f64 * cm * omega_infty(spec, m) * s2.value * log.value().exp());
            terms += 1;
        }
    }
    let c = total.value() / 256.0;
    Ok(ConstantReport {
        c,
        terms,
        tail_bound: c.abs() * rel_err,
        tail_is_estimate: false,
        alpha_s: 1,
        beta_s: 4,
        tors: 256,
        lmax: u64::MAX,
        bmax: u64::MAX,
        p0,
        cm_p0,
        precision: "f64, compensated summation",
    })
}

/// f(B) = B log B - B + 1.
pub fn f_main(b: f64) -> f64 {
    b * b.ln() - b + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitRow {
    pub bound: u64,
    pub count: u64,
    pub predicted: f64,
    pub ratio: f64,
}

pub fn fit_empirical(spec: &SurfaceSpec, bounds: &[u64], c: f64) -> Vec<FitRow> {
    let counts = crate::points::count_table(spec, bounds);
    bounds
        .iter()
        .zip(counts)
        .map(|(&b, (n, _))| {
            let predicted = c * f_main(b as f64);
            FitRow { bound: b, count: n, predicted, ratio: n as f64 / predicted }
        })
        .collect()
}

/// eta = 1 - (1 + log log 2) / log 2.
pub fn eta() -> f64 {
    let l2 = std::f64::consts::LN_2;
    1.0 - (1.0 + l2.ln()) / l2
}

pub fn big_rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
