//! Geometric series S_0, the lattice sums U(T), the constants C_m and the
//! exact Moebius-decomposed point count.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd_u64, isqrt, lcm_u64, odd_squarefree_up_to, primes_up_to, KahanSum, SpfSieve};
use crate::error::{Error, Result};
use crate::gaussian::{r_from_factors, r_table, IdealRep, PrimeIdeal};
use crate::lattice::{gamma_basis, reduce_basis, Lattice2};
use crate::surface::{build_sigma, build_sigma_prime, region_polygon, SigmaPrimeTerm, SurfaceSpec, TorsorClass, Q};

pub use crate::lattice::m_of;

/// S_0^eps(z) in closed form.
pub fn s0_closed(eps: i32, z: f64) -> Result<f64> {
    if z.abs() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} >= 1", z.abs())));
    }
    Ok(if eps < 0 {
        (1.0 - z).powi(2) / ((1.0 + z).powi(2) * (1.0 + z * z))
    } else {
        (1.0 + 2.0 * z + 6.0 * z * z + 2.0 * z.powi(3) + z.powi(4)) / ((1.0 - z).powi(4) * (1.0 + z).powi(2))
    })
}

pub fn s0_closed_exact(eps: i32, z: Q) -> Result<Q> {
    let one = Q::from_integer(1);
    if z >= one || z <= -one {
        return Err(Error::Domain(format!("|z| = {z} >= 1")));
    }
    let z2 = z * z;
    Ok(if eps < 0 {
        (one - z) * (one - z) / ((one + z) * (one + z) * (one + z2))
    } else {
        let num = one + Q::from_integer(2) * z + Q::from_integer(6) * z2 + Q::from_integer(2) * z2 * z + z2 * z2;
        let den = (one - z) * (one - z) * (one - z) * (one - z) * (one + z) * (one + z);
        num / den
    })
}

/// Sum over n in [0, N]^4 of eps^{|n|} z^{m(n)}.
pub fn s0_truncated(eps: i32, z: f64, n: u32) -> f64 {
    let zp: Vec<f64> = (0..=2 * n).map(|k| z.powi(k as i32)).collect();
    let mut s = KahanSum::new();
    for a in 0..=n {
        for b in 0..=n {
            for c in 0..=n {
                for d in 0..=n {
                    let sign = if eps < 0 && (a + b + c + d) % 2 == 1 { -1.0 } else { 1.0 };
                    s.add(sign * zp[m_of([a, b, c, d]) as usize]);
                }
            }
        }
    }
    s.value()
}

/// Moduli entering the lattice sum: d_j = |m_j| N(a_j) N(b_j), D_j = lcm(d_j, l)
/// for j = 1, 2 and D_j = d_j otherwise. `sign` keeps sign(m_j) for the 2-adic density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DVector {
    pub d: [u64; 4],
    pub dd: [u64; 4],
    pub ell: u64,
    pub sign: [i8; 4],
}

impl DVector {
    pub fn trivial() -> Self {
        DVector { d: [1; 4], dd: [1; 4], ell: 1, sign: [1; 4] }
    }

    /// d_j with the sign of m_j.
    pub fn signed_d(&self) -> [i64; 4] {
        std::array::from_fn(|j| self.sign[j] as i64 * self.d[j] as i64)
    }
}

pub fn build_dvector(m: &TorsorClass, a: &SigmaPrimeTerm, b: &[IdealRep; 4], ell: u64) -> Result<DVector> {
    let mut d = [0u64; 4];
    for j in 0..4 {
        d[j] = m.m[j].unsigned_abs() * a.norms[j] * b[j].norm;
        if d[j] % 2 == 0 {
            return Err(Error::Parity(j + 1, d[j]));
        }
    }
    if ell.is_multiple_of(2) {
        return Err(Error::Parity(0, ell));
    }
    let dd = [lcm_u64(d[0], ell), lcm_u64(d[1], ell), d[2], d[3]];
    Ok(DVector { d, dd, ell, sign: m.m.map(|x| x.signum() as i8) })
}

/// A positive rational bound T = num / den.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub num: u64,
    pub den: u64,
}

impl Bound {
    pub fn int(n: u64) -> Self {
        Bound { num: n, den: 1 }
    }

    /// Largest integer k with k^2 <= T.
    pub fn box_radius(self) -> i64 {
        isqrt((self.num / self.den) as u128) as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    Reduced,
}

struct ScanCtx<'a> {
    spec: &'a SurfaceSpec,
    m: [i64; 4],
    d: [u64; 4],
    dd: [u64; 4],
    r: &'a dyn Fn(u64) -> u64,
}

impl ScanCtx<'_> {
    /// Weight of (u, v) if it is admissible, else 0.
    #[inline]
    fn weight(&self, u: i64, v: i64) -> u64 {
        if u % 2 == 0 && v % 2 == 0 {
            return 0;
        }
        let l = self.spec.forms(u, v);
        let mut w = 1u64;
        for j in 0..4 {
            if self.m[j] * l[j] <= 0 {
                return 0;
            }
            let a = l[j].unsigned_abs();
            if !a.is_multiple_of(self.dd[j]) {
                return 0;
            }
            w *= (self.r)(a / self.d[j]);
            if w == 0 {
                return 0;
            }
        }
        w
    }

    fn naive(&self, radius: i64) -> u64 {
        let mut s = 0;
        for u in -radius..=radius {
            for v in -radius..=radius {
                s += self.weight(u, v);
            }
        }
        s
    }

    /// Walks x e1 + y e2 over a reduced basis; Cramer's rule bounds x and y
    /// for points of the box.
    fn reduced(&self, radius: i64, basis: &Lattice2) -> u64 {
        let (e1, e2, det) = (basis.e1, basis.e2, basis.det);
        let r = radius as i128;
        let xmax = r * (e2[0].abs() + e2[1].abs()) / det;
        let ymax = r * (e1[0].abs() + e1[1].abs()) / det;
        let mut s = 0;
        for x in -xmax..=xmax {
            let (bu, bv) = (x * e1[0], x * e1[1]);
            for y in -ymax..=ymax {
                let (u, v) = (bu + y * e2[0], bv + y * e2[1]);
                if u.abs() > r || v.abs() > r {
                    continue;
                }
                s += self.weight(u as i64, v as i64);
            }
        }
        s
    }
}

fn r_direct(n: u64) -> u64 {
    r_from_factors(&crate::arith::factor(n as u128).expect("in range"))
}

/// U(T) evaluated by both scans; they must agree.
pub fn u_sum(spec: &SurfaceSpec, t: Bound, m: &TorsorClass, dv: &DVector) -> Result<u64> {
    let naive = u_sum_with(spec, t, m, dv, Strategy::Naive)?;
    let reduced = u_sum_with(spec, t, m, dv, Strategy::Reduced)?;
    if naive != reduced {
        return Err(Error::Mismatch { naive, reduced });
    }
    Ok(naive)
}

pub fn u_sum_with(spec: &SurfaceSpec, t: Bound, m: &TorsorClass, dv: &DVector, strategy: Strategy) -> Result<u64> {
    let ctx = ScanCtx { spec, m: m.m, d: dv.d, dd: dv.dd, r: &r_direct };
    let radius = t.box_radius();
    Ok(match strategy {
        Strategy::Naive => ctx.naive(radius),
        Strategy::Reduced => {
            let (b, _) = reduce_basis(&gamma_basis(spec, dv.dd)?);
            ctx.reduced(radius, &b)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmValue {
    pub value: f64,
    pub error: f64,
    pub p0: u64,
}

/// Rigorous upper bound for the sum of 1/p^2 over primes p > x.
pub fn prime_tail_bound(x: f64) -> f64 {
    2.51012 / (x * x.ln())
}

/// (A(P0), P0) with A(P0) = prod over p = 3 mod 4, p <= P0 of (1 - p^-2).
fn a_partial(p0: u64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&p0) {
        return v;
    }
    let mut log = KahanSum::new();
    for p in primes_up_to(p0) {
        if p % 4 == 3 {
            let x = 1.0 / (p as f64 * p as f64);
            log.add((-x).ln_1p());
        }
    }
    let v = log.value().exp();
    cache.lock().unwrap().insert(p0, v);
    v
}

pub const DEFAULT_CM_P0: u64 = 20_000_000;

/// C_m = (pi/2) prod_{p = 3 mod 4} (1 - p^-2) prod_{p | m, p = 1 mod 4} (1 - 1/p)^2.
pub fn c_m_constant(m: u64, p0: u64) -> CmValue {
    let a = a_partial(p0);
    // the missing factor lies in [exp(-tail/(1 - 1/P0^2)), 1]
    let tail = prime_tail_bound(p0 as f64) / (1.0 - 1.0 / (p0 as f64 * p0 as f64));
    let lo = a * (-tail).exp();
    let mut f = std::f64::consts::FRAC_PI_2;
    if m > 1 {
        for (p, _) in crate::arith::factor(m as u128).expect("in range") {
            if p % 4 == 1 {
                f *= (1.0 - 1.0 / p as f64).powi(2);
            }
        }
    }
    CmValue { value: f * (a + lo) / 2.0, error: f * (a - lo) / 2.0, p0 }
}

/// Partial sums of r(t)/t over t <= T in the split monoid, coprime to m, at each T.
pub fn r_over_t_checkpoints(ts: &[u64], m: u64) -> Vec<f64> {
    let tmax = ts.iter().copied().max().unwrap_or(1);
    let sieve = SpfSieve::new(tmax as usize);
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by_key(|&i| ts[i]);
    let mut out = vec![0.0; ts.len()];
    let mut s = KahanSum::new();
    let mut next = 0;
    let mut buf = Vec::with_capacity(16);
    for t in 1..=tmax {
        if t % 4 == 1 && gcd_u64(t, m) == 1 {
            buf.clear();
            sieve.for_each_factor(t, |p, e| buf.push((p, e)));
            if buf.iter().all(|&(p, _)| p % 4 == 1) {
                s.add(r_from_factors(&buf) as f64 / t as f64);
            }
        }
        while next < order.len() && ts[order[next]] == t {
            out[order[next]] = s.value();
            next += 1;
        }
    }
    out
}

pub fn r_over_t_partial(t: u64, m: u64) -> f64 {
    r_over_t_checkpoints(&[t], m)[0]
}

/// Per-bound state shared by all terms of the Moebius count.
struct CountCtx<'a> {
    spec: &'a SurfaceSpec,
    rtab: Vec<u32>,
    tsieve: SpfSieve,
    ells: Vec<(u64, i32)>,
}

impl CountCtx<'_> {
    fn r(&self, n: u64) -> u64 {
        self.rtab[n as usize] as u64
    }
}

/// One admissible 4-tuple of ideals b_j with prescribed lcm, with mu(b).
fn b_tuples(
    c_factors: &[PrimeIdeal],
    caps: [u64; 4],
    base: [u64; 4],
) -> Vec<([IdealRep; 4], i32)> {
    let mut out = Vec::new();
    let mut assign: Vec<u8> = vec![0; c_factors.len()];
    fn rec(
        i: usize,
        f: &[PrimeIdeal],
        caps: [u64; 4],
        norms: [u64; 4],
        assign: &mut Vec<u8>,
        out: &mut Vec<([IdealRep; 4], i32)>,
    ) {
        if i == f.len() {
            let ideals: [IdealRep; 4] = std::array::from_fn(|j| {
                IdealRep::from_factors((0..f.len()).filter(|&k| assign[k] >> j & 1 == 1).map(|k| f[k]).collect())
            });
            let count: u32 = assign.iter().map(|a| a.count_ones()).sum();
            out.push((ideals, if count.is_multiple_of(2) { 1 } else { -1 }));
            return;
        }
        for mask in 1u8..16 {
            let mut nn = norms;
            let mut ok = true;
            for j in 0..4 {
                if mask >> j & 1 == 1 {
                    nn[j] *= f[i].p;
                    if nn[j] > caps[j] {
                        ok = false;
                    }
                }
            }
            if ok {
                assign[i] = mask;
                rec(i + 1, f, caps, nn, assign, out);
            }
        }
    }
    rec(0, c_factors, caps, base, &mut assign, &mut out);
    out
}

/// All squarefree c with N(c) | t, as factor lists (t has only primes 1 mod 4).
fn c_choices(tf: &[(u64, u32)]) -> Vec<(Vec<PrimeIdeal>, u64)> {
    let mut acc: Vec<(Vec<PrimeIdeal>, u64)> = vec![(Vec::new(), 1)];
    for &(p, e) in tf {
        let mut next = Vec::with_capacity(acc.len() * 4);
        for (f, n) in &acc {
            next.push((f.clone(), *n));
            for conj in [false, true] {
                let mut g = f.clone();
                g.push(PrimeIdeal { p, conj });
                next.push((g, n * p));
            }
            if e >= 2 {
                let mut g = f.clone();
                g.push(PrimeIdeal { p, conj: false });
                g.push(PrimeIdeal { p, conj: true });
                next.push((g, n * p * p));
            }
        }
        acc = next;
    }
    acc
}

/// How the t-sum weighs the Gaussian integer z_0 of norm t.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TWeight {
    /// r(t / N(c)): every z_0 in c, including those divisible by a rational prime.
    Literal,
    /// sum over squarefree d in the split monoid of mu(d) r(t / N(lcm(c, d))):
    /// additionally excludes p | z_0, which gcd(x, y, t) = 1 forbids.
    Primitive,
}

/// Local factor at p of the t-weight, with k = v_p(t) and c = v_p(N(c)).
fn t_weight_local(k: u32, c: u32, w: TWeight) -> i128 {
    match w {
        TWeight::Literal => (k - c + 1) as i128,
        TWeight::Primitive if k >= 2 => 2 - c as i128,
        TWeight::Primitive => (k - c + 1) as i128,
    }
}

fn t_weight(tf: &[(u64, u32)], cn: u64, w: TWeight) -> i128 {
    let mut r = 4;
    for &(p, k) in tf {
        let c = crate::arith::v_p(cn as u128, p as u128);
        r *= t_weight_local(k, c, w);
    }
    r
}

/// Contribution of one (m, t) pair, before division by 256.
fn mt_contribution(
    ctx: &CountCtx,
    b: u64,
    m: &TorsorClass,
    sprime: &[SigmaPrimeTerm],
    t: u64,
    w: TWeight,
) -> Result<i128> {
    let spec = ctx.spec;
    let radius = isqrt((b / t) as u128) as u64;
    if radius == 0 {
        return Ok(0);
    }
    let tf = ctx.tsieve.factor(t);
    let mut total = 0i128;
    let cap: [u64; 4] = std::array::from_fn(|j| spec.coeff_sum(j) * radius);
    for a in sprime {
        if gcd_u64(t, a.total_norm()) != 1 {
            continue;
        }
        let base: [u64; 4] = std::array::from_fn(|j| m.m[j].unsigned_abs() * a.norms[j]);
        if (0..4).any(|j| base[j] > cap[j]) || base[0] > radius || base[1] > radius {
            continue;
        }
        for (cf, cn) in c_choices(&tf) {
            let rt = t_weight(&tf, cn, w);
            if rt == 0 {
                continue;
            }
            let mut caps = cap;
            caps[0] = caps[0].min(radius);
            caps[1] = caps[1].min(radius);
            for (bs, mu_b) in b_tuples(&cf, caps, base) {
                let dvec0 = build_dvector(m, a, &bs, 1)?;
                for &(ell, mu_l) in &ctx.ells {
                    if ell > radius {
                        break;
                    }
                    let dv = DVector {
                        dd: [lcm_u64(dvec0.d[0], ell), lcm_u64(dvec0.d[1], ell), dvec0.d[2], dvec0.d[3]],
                        ell,
                        ..dvec0
                    };
                    if dv.dd[0] > radius || dv.dd[1] > radius {
                        continue;
                    }
                    let (basis, _) = reduce_basis(&gamma_basis(spec, dv.dd)?);
                    let sc = ScanCtx { spec, m: m.m, d: dv.d, dd: dv.dd, r: &|n| ctx.r(n) };
                    let u = sc.reduced(radius as i64, &basis) as i128;
                    if u != 0 {
                        total += (a.mu * mu_b * mu_l) as i128 * rt * u;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Nondegenerate point count of height <= b via the Moebius-decomposed sum.
pub fn moebius_count(spec: &SurfaceSpec, b: u64) -> Result<u64> {
    moebius_count_with(spec, b, TWeight::Primitive)
}

pub fn moebius_count_with(spec: &SurfaceSpec, b: u64, w: TWeight) -> Result<u64> {
    let sigma: Vec<TorsorClass> = build_sigma(spec)
        .into_iter()
        .filter(|m| region_polygon(spec, m).area > Q::from_integer(0))
        .collect();
    let sprime = build_sigma_prime(spec);
    let radius = isqrt(b as u128) as u64;
    let rmax = (0..4).map(|j| spec.coeff_sum(j)).max().unwrap() * radius.max(1);
    let ctx = CountCtx {
        spec,
        rtab: r_table(rmax as usize),
        tsieve: SpfSieve::new(b.max(2) as usize),
        ells: odd_squarefree_up_to(radius.max(1))
            .into_iter()
            .map(|l| (l, crate::arith::mobius(l)))
            .collect(),
    };
    let ts: Vec<u64> = (1..=b)
        .step_by(4)
        .filter(|&t| ctx.tsieve.factor(t).iter().all(|&(p, _)| p % 4 == 1))
        .collect();
    let tasks: Vec<(usize, u64)> = (0..sigma.len()).flat_map(|i| ts.iter().map(move |&t| (i, t))).collect();
    let parts: Vec<Result<i128>> = tasks
        .par_iter()
        .map(|&(i, t)| mt_contribution(&ctx, b, &sigma[i], &sprime, t, w))
        .collect();
    let mut total = 0i128;
    for p in parts {
        total += p?;
    }
    if total % 256 != 0 {
        return Err(Error::Divisibility(total));
    }
    Ok((total / 256) as u64)
}
