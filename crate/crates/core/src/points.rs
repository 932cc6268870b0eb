//! Ground truth: rational points of bounded height, their normalized integral
//! lifts, torsor classes, torsor coordinates and Brauer colouring.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, isqrt, odd_part, SpfSieve};
use crate::error::{Error, Result};
use crate::gaussian::{
    canonical_of_norm, representations_from_factors, GaussInt, GaussRational,
};
use crate::surface::{build_sigma, positive_arcs, sigma_j, PositiveArc, SurfaceSpec, TorsorClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RationalPoint {
    pub x: i64,
    pub y: i64,
    pub t: i64,
    pub u: i64,
    pub v: i64,
    pub height: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureColor {
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Component {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointRecord {
    pub point: RationalPoint,
    pub torsor_class: TorsorClass,
    pub degenerate: bool,
    pub figure_color: FigureColor,
    pub real_component: Component,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsorLift {
    pub z0p: GaussRational,
    pub z1p: GaussRational,
    pub z2p: GaussRational,
    pub z3p: GaussRational,
    pub z4p: GaussRational,
}

fn height_of(u: i64, v: i64, t: i64) -> u64 {
    let m = u.unsigned_abs().max(v.unsigned_abs());
    m * m * t as u64
}

fn forms_i128(spec: &SurfaceSpec, u: i128, v: i128) -> [i128; 4] {
    std::array::from_fn(|j| spec.a[j] as i128 * u + spec.b[j] as i128 * v)
}

/// Unique normalized representative of an integral solution of
/// x^2 + y^2 = t^2 prod L_j(u, v).
pub fn normalize_lift(spec: &SurfaceSpec, x: i64, y: i64, t: i64, u: i64, v: i64) -> Result<RationalPoint> {
    if (u, v) == (0, 0) || (x, y, t) == (0, 0, 0) {
        return Err(Error::InvalidPoint("zero block".into()));
    }
    let l = forms_i128(spec, u as i128, v as i128);
    let rhs = l
        .iter()
        .try_fold(t as i128 * t as i128, |acc, &z| acc.checked_mul(z))
        .ok_or(Error::Overflow("point equation"))?;
    if (x as i128).pow(2) + (y as i128).pow(2) != rhs {
        return Err(Error::InvalidPoint(format!("({x},{y},{t},{u},{v}) is not on the surface")));
    }
    let g = gcd(u as i128, v as i128) as i64;
    let (mut u, mut v) = (u / g, v / g);
    let mut t = t.checked_mul(g * g).ok_or(Error::Overflow("normalize"))?;
    let h = gcd(gcd(x as i128, y as i128), t as i128) as i64;
    let (mut x, mut y) = (x / h, y / h);
    t /= h;
    if t < 0 {
        x = -x;
        y = -y;
        t = -t;
    }
    if t == 0 {
        return Err(Error::InvalidPoint("t = 0".into()));
    }
    let l = spec.forms(u, v);
    let rest = l[1] as i128 * l[2] as i128 * l[3] as i128;
    if l[0] < 0 || (l[0] == 0 && rest < 0) {
        u = -u;
        v = -v;
    }
    Ok(RationalPoint { x, y, t, u, v, height: height_of(u, v, t) })
}

/// H of (v^2 t : uvt : u^2 t : x : y) with the last two coordinates divided by C,
/// compared exactly through squares.
pub fn height_via_psi(spec: &SurfaceSpec, p: &RationalPoint) -> Result<u64> {
    let (u, v, t) = (p.u as i128, p.v as i128, p.t as i128);
    let mut c = [v * v * t, u * v * t, u * u * t, p.x as i128, p.y as i128];
    let g = c.iter().fold(0, |acc, &z| gcd(acc, z));
    if g == 0 {
        return Err(Error::InvalidPoint("zero coordinates".into()));
    }
    c.iter_mut().for_each(|z| *z /= g);
    let m = c[..3].iter().map(|z| z.abs()).max().unwrap();
    let cap = m * m * spec.csq as i128;
    if c[3] * c[3] > cap || c[4] * c[4] > cap {
        return Err(Error::InvalidPoint("real coordinate dominates the height".into()));
    }
    Ok(m as u64)
}

/// m_j = sign(L_j) * product of primes p = 3 mod 4 with v_p(L_j) odd.
fn class_part(n: i64) -> i64 {
    let mut m = n.signum();
    for (p, e) in crate::arith::factor(n.unsigned_abs() as u128).expect("form value in range") {
        if p % 4 == 3 && e % 2 == 1 {
            m *= p as i64;
        }
    }
    m
}

pub fn assign_class(spec: &SurfaceSpec, p: &RationalPoint) -> Result<TorsorClass> {
    assign_class_uv(spec, p.u, p.v, &build_sigma(spec))
}

/// The class depends only on (u, v); `sigma` is the precomputed set Sigma.
pub fn assign_class_uv(spec: &SurfaceSpec, u: i64, v: i64, sigma: &[TorsorClass]) -> Result<TorsorClass> {
    let l = spec.forms(u, v);
    let mut m = [0i64; 4];
    for j in 0..4 {
        if l[j] != 0 {
            m[j] = class_part(l[j]);
        }
    }
    for j in 0..4 {
        if l[j] == 0 {
            let others: i128 = (0..4).filter(|&k| k != j).map(|k| m[k] as i128).product();
            m[j] = sigma_j(spec, j)
                .into_iter()
                .find(|&c| crate::arith::is_square(c as i128 * others))
                .ok_or(Error::ClassNotInSigma(m))?;
        }
    }
    sigma.iter().find(|c| c.m == m).copied().ok_or(Error::ClassNotInSigma(m))
}

/// Coordinates z_0^+, ..., z_4^+ on the torsor of class m above a nondegenerate point.
pub fn lift_to_torsor(spec: &SurfaceSpec, p: &RationalPoint, m: &TorsorClass) -> Result<TorsorLift> {
    let l = spec.forms(p.u, p.v);
    if l.contains(&0) {
        return Err(Error::DegeneratePoint);
    }
    let mut z = [GaussInt::ONE; 4];
    z[0] = canonical_of_norm(p.t as u64).map_err(|e| Error::LiftFailure(e.to_string()))?;
    for j in 0..3 {
        if l[j] % m.m[j] != 0 || l[j] / m.m[j] <= 0 {
            return Err(Error::LiftFailure(format!("L_{} / m_{} is not a positive integer", j + 1, j + 1)));
        }
        z[j + 1] = canonical_of_norm((l[j] / m.m[j]) as u64).map_err(|e| Error::LiftFailure(e.to_string()))?;
    }
    let [z0, z1, z2, z3] = z.map(GaussRational::from_int);
    lift_with(spec, p, m, z0, z1, z2, z3)
}

/// Completes a lift from chosen z_0^+, ..., z_3^+ and checks every torsor identity.
pub fn lift_with(
    spec: &SurfaceSpec,
    p: &RationalPoint,
    m: &TorsorClass,
    z0: GaussRational,
    z1: GaussRational,
    z2: GaussRational,
    z3: GaussRational,
) -> Result<TorsorLift> {
    let denom = GaussRational::from_int(GaussInt::new(m.alpha as i128, 0))
        .mul(z0)
        .mul(z0)
        .mul(z1)
        .mul(z2)
        .mul(z3);
    let z4 = GaussRational::from_int(GaussInt::new(p.x as i128, p.y as i128))
        .div(denom)
        .map_err(|e| Error::LiftFailure(e.to_string()))?;
    let lift = TorsorLift { z0p: z0, z1p: z1, z2p: z2, z3p: z3, z4p: z4 };
    verify_lift(spec, p, m, &lift)?;
    Ok(lift)
}

fn verify_lift(spec: &SurfaceSpec, p: &RationalPoint, m: &TorsorClass, lift: &TorsorLift) -> Result<()> {
    use num_rational::Ratio;
    let nrm = |z: GaussRational| {
        let (a, b) = z.norm();
        Ratio::new(a, b)
    };
    if nrm(lift.z0p) != Ratio::from_integer(p.t as i128) {
        return Err(Error::LiftFailure("N(z0) != t".into()));
    }
    let zs = [lift.z1p, lift.z2p, lift.z3p, lift.z4p];
    let l = spec.forms(p.u, p.v);
    let mut prod = Ratio::from_integer(1i128);
    for j in 0..4 {
        let n = nrm(zs[j]);
        if n != Ratio::new(l[j] as i128, m.m[j] as i128) {
            return Err(Error::LiftFailure(format!("N(z_{}) != L_{}/m_{}", j + 1, j + 1, j + 1)));
        }
        prod *= n;
    }
    // Plucker-type relations among the m_j N(z_j)
    let mn: Vec<Ratio<i128>> = (0..4).map(|j| nrm(zs[j]) * Ratio::from_integer(m.m[j] as i128)).collect();
    for (j, k, l3) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        let d = |a: usize, b: usize| Ratio::from_integer(spec.delta[a][b] as i128);
        let s = d(j, k) * mn[l3] + d(k, l3) * mn[j] + d(l3, j) * mn[k];
        if s != Ratio::from_integer(0) {
            return Err(Error::LiftFailure(format!("torsor relation ({},{},{}) fails", j + 1, k + 1, l3 + 1)));
        }
    }
    let lhs = GaussRational::from_int(GaussInt::new(m.alpha as i128, 0))
        .mul(lift.z0p)
        .mul(lift.z0p)
        .mul(lift.z1p)
        .mul(lift.z2p)
        .mul(lift.z3p)
        .mul(lift.z4p);
    if lhs != GaussRational::from_int(GaussInt::new(p.x as i128, p.y as i128)) {
        return Err(Error::LiftFailure("x + iy mismatch".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Place {
    Infinity,
    Prime(u64),
}

/// Hilbert symbol (-1, q) at a place, q = num/den nonzero.
pub fn hilbert_minus_one(num: i128, den: i128, place: Place) -> i32 {
    assert!(num != 0 && den != 0);
    match place {
        Place::Infinity => {
            if (num < 0) != (den < 0) {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let w = (odd_part(num) * odd_part(den)).rem_euclid(4);
            if w == 3 {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            let pp = p as u128;
            let e = |z: i128| crate::arith::v_p(z.unsigned_abs(), pp) as i64;
            let v = e(num) - e(den);
            if v.rem_euclid(2) == 1 && p % 4 == 3 {
                -1
            } else {
                1
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrauerReport {
    /// (place, invariant numerator over 2): 0 or 1.
    pub invariants: Vec<(Place, u8)>,
    pub figure_color: FigureColor,
}

impl BrauerReport {
    /// Sum of the local invariants is an integer.
    pub fn sums_to_integer(&self) -> bool {
        self.invariants.iter().map(|&(_, h)| h as u32).sum::<u32>() % 2 == 0
    }
}

/// Black iff the odd part of u*v is 1 mod 4; points with uv = 0 are white.
pub fn figure_color(u: i64, v: i64) -> FigureColor {
    let w = odd_part(u as i128 * v as i128);
    if w != 0 && w.rem_euclid(4) == 1 {
        FigureColor::Black
    } else {
        FigureColor::White
    }
}

/// Local invariants of (-1, L_j/L_k) at every relevant place, plus the figure colour.
pub fn brauer_color(spec: &SurfaceSpec, p: &RationalPoint, pair: (usize, usize)) -> Result<BrauerReport> {
    let l = spec.forms(p.u, p.v);
    if l.contains(&0) {
        return Err(Error::DegeneratePoint);
    }
    let (num, den) = (l[pair.0] as i128, l[pair.1] as i128);
    let mut places = vec![Place::Infinity, Place::Prime(2)];
    for n in [num, den] {
        for (q, _) in crate::arith::factor(n.unsigned_abs())? {
            if q != 2 {
                places.push(Place::Prime(q));
            }
        }
    }
    places.sort();
    places.dedup();
    let invariants = places
        .into_iter()
        .map(|w| (w, u8::from(hilbert_minus_one(num, den, w) == -1)))
        .collect();
    Ok(BrauerReport { invariants, figure_color: figure_color(p.u, p.v) })
}

/// Labels the two arcs of P^1(R) over which S(R) lives.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    arcs: [PositiveArc; 2],
}

impl ComponentMap {
    pub fn new(spec: &SurfaceSpec) -> Self {
        ComponentMap { arcs: positive_arcs(spec) }
    }

    pub fn label(&self, spec: &SurfaceSpec, u: i64, v: i64) -> Component {
        let l = spec.forms(u, v);
        if !l.contains(&0) {
            let s = if l[0] < 0 { -1 } else { 1 };
            let pat = l.map(|x| (s * x.signum()) as i8);
            return if pat == self.arcs[0].pattern { Component::A } else { Component::B };
        }
        // a root: the positive arc that ends there
        let par = |d: (i64, i64)| d.0 as i128 * v as i128 - d.1 as i128 * u as i128 == 0;
        if par(self.arcs[0].start) || par(self.arcs[0].end) {
            Component::A
        } else {
            Component::B
        }
    }
}

/// Shared per-surface state for enumeration.
struct Enumerator {
    sieve: Option<SpfSieve>,
    d_sieve: SpfSieve,
}

impl Enumerator {
    fn new(spec: &SurfaceSpec, b: u64) -> Self {
        let mmax = isqrt(b as u128) as u64;
        let lmax = (0..4).map(|j| spec.coeff_sum(j)).max().unwrap() * mmax.max(1);
        let sieve = (lmax <= 20_000_000).then(|| SpfSieve::new(lmax as usize));
        Enumerator { sieve, d_sieve: SpfSieve::new(b.max(2) as usize) }
    }

    /// Merged factorization of |prod L_j|, or None if it is not a sum of two squares.
    fn factor_product(&self, l: &[i64; 4]) -> Option<Vec<(u64, u32)>> {
        let mut f: Vec<(u64, u32)> = Vec::with_capacity(12);
        for &x in l {
            let n = x.unsigned_abs();
            match &self.sieve {
                Some(s) => s.for_each_factor(n, |p, e| f.push((p, e))),
                None => f.extend(crate::arith::factor(n as u128).expect("form value in range")),
            }
        }
        f.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(f.len());
        for (p, e) in f {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => merged.push((p, e)),
            }
        }
        merged.iter().all(|&(p, e)| p % 4 != 3 || e % 2 == 0).then_some(merged)
    }

    /// t in the split monoid (all prime factors 1 mod 4), with its prime list.
    fn split_factors(&self, t: u64) -> Option<Vec<(u64, u32)>> {
        let f = self.d_sieve.factor(t);
        f.iter().all(|&(p, _)| p % 4 == 1).then_some(f)
    }
}

/// Primitive (u, v) with max(|u|,|v|) = k in the normalized sign.
fn normalized_pairs(spec: &SurfaceSpec, k: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    if k == 1 {
        let l = spec.forms(0, 1);
        let rest = l[1] as i128 * l[2] as i128 * l[3] as i128;
        out.push(if rest >= 0 { (0, 1) } else { (0, -1) });
    }
    for u in 1..=k {
        let vs: Vec<i64> = if u == k { (-k..=k).collect() } else { vec![-k, k] };
        for v in vs {
            if gcd(u as i128, v as i128) == 1 {
                out.push((u, v));
            }
        }
    }
    out
}

/// Every rational point of height <= b, ordered by (height, u, v, x, y).
pub fn enumerate_points(spec: &SurfaceSpec, b: u64) -> Vec<PointRecord> {
    let en = Enumerator::new(spec, b);
    let sigma = build_sigma(spec);
    let comps = ComponentMap::new(spec);
    let kmax = isqrt(b as u128) as i64;
    let mut out: Vec<PointRecord> = (1..=kmax)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut recs = Vec::new();
            for (u, v) in normalized_pairs(spec, k) {
                let l = spec.forms(u, v);
                let degenerate = l.contains(&0);
                let nf = if degenerate {
                    None
                } else if l.iter().map(|&x| x.signum()).product::<i64>() < 0 {
                    continue;
                } else {
                    match en.factor_product(&l) {
                        Some(f) => Some(f),
                        None => continue,
                    }
                };
                let cls = assign_class_uv(spec, u, v, &sigma).expect("class assignment is total");
                let comp = comps.label(spec, u, v);
                if degenerate {
                    recs.push(PointRecord {
                        point: RationalPoint { x: 0, y: 0, t: 1, u, v, height: height_of(u, v, 1) },
                        torsor_class: cls,
                        degenerate: true,
                        figure_color: figure_color(u, v),
                        real_component: comp,
                    });
                    continue;
                }
                let nf = nf.expect("nondegenerate");
                let tmax = b / (k * k) as u64;
                for t in (1..=tmax).step_by(4) {
                    let Some(tf) = en.split_factors(t) else { continue };
                    // factorization of t^2 n
                    let mut f = nf.clone();
                    for &(p, e) in &tf {
                        match f.iter_mut().find(|(q, _)| *q == p) {
                            Some(slot) => slot.1 += 2 * e,
                            None => f.push((p, 2 * e)),
                        }
                    }
                    f.sort_unstable();
                    for (x, y) in representations_from_factors(&f) {
                        if gcd(gcd(x as i128, y as i128), t as i128) != 1 {
                            continue;
                        }
                        recs.push(PointRecord {
                            point: RationalPoint { x, y, t: t as i64, u, v, height: height_of(u, v, t as i64) },
                            torsor_class: cls,
                            degenerate: false,
                            figure_color: figure_color(u, v),
                            real_component: comp,
                        });
                    }
                }
            }
            recs
        })
        .collect();
    out.sort_by_key(|r| (r.point.height, r.point.u, r.point.v, r.point.x, r.point.y));
    out
}

/// Cumulative (nondegenerate, degenerate) counts at each requested bound,
/// without materializing representations.
pub fn count_table(spec: &SurfaceSpec, bounds: &[u64]) -> Vec<(u64, u64)> {
    let bmax = bounds.iter().copied().max().unwrap_or(0);
    if bmax == 0 {
        return vec![(0, 0); bounds.len()];
    }
    let en = Enumerator::new(spec, bmax);
    // split-monoid members up to bmax with their prime lists and 2^omega
    let dset: Vec<(u64, Vec<u64>)> = (1..=bmax)
        .step_by(4)
        .filter_map(|t| en.split_factors(t).map(|f| (t, f.into_iter().map(|(p, _)| p).collect())))
        .collect();
    let mut sorted_bounds: Vec<u64> = bounds.to_vec();
    sorted_bounds.sort_unstable();
    sorted_bounds.dedup();
    let kmax = isqrt(bmax as u128) as i64;
    let per_k: Vec<(Vec<u64>, Vec<u64>)> = (1..=kmax)
        .into_par_iter()
        .map(|k| {
            let mut nd = vec![0u64; sorted_bounds.len()];
            let mut dg = vec![0u64; sorted_bounds.len()];
            let k2 = (k * k) as u64;
            let first = sorted_bounds.partition_point(|&b| b < k2);
            for (u, v) in normalized_pairs(spec, k) {
                let l = spec.forms(u, v);
                if l.contains(&0) {
                    dg[first..].iter_mut().for_each(|c| *c += 1);
                    continue;
                }
                if l.iter().map(|&x| x.signum()).product::<i64>() < 0 {
                    continue;
                }
                let Some(nf) = en.factor_product(&l) else { continue };
                let split: Vec<(u64, u64)> =
                    nf.iter().filter(|(p, _)| p % 4 == 1).map(|&(p, e)| (p, e as u64 + 1)).collect();
                let r_n: u64 = 4 * split.iter().map(|&(_, c)| c).product::<u64>();
                let tmax = bmax / k2;
                let mut bi = first;
                for (t, primes) in dset.iter().take_while(|(t, _)| *t <= tmax) {
                    let h = k2 * t;
                    while sorted_bounds[bi] < h {
                        bi += 1;
                    }
                    let mut c = r_n << primes.len();
                    for &(p, e1) in &split {
                        if t % p == 0 {
                            c /= e1;
                        }
                    }
                    nd[bi] += c;
                }
            }
            (nd, dg)
        })
        .collect();
    let mut nd = vec![0u64; sorted_bounds.len()];
    let mut dg = vec![0u64; sorted_bounds.len()];
    for (a, b) in per_k {
        for i in 0..sorted_bounds.len() {
            nd[i] += a[i];
            dg[i] += b[i];
        }
    }
    // the degenerate vectors were already cumulative; make nondegenerate cumulative
    for i in 1..nd.len() {
        nd[i] += nd[i - 1];
    }
    bounds
        .iter()
        .map(|b| {
            let i = sorted_bounds.binary_search(b).unwrap();
            (nd[i], dg[i])
        })
        .collect()
}

/// (nondegenerate, degenerate) number of points of height <= b.
pub fn count_points(spec: &SurfaceSpec, b: u64) -> (u64, u64) {
    count_table(spec, &[b])[0]
}
