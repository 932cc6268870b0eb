//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are reported as they come out but do
//! not fail the run; every other FAIL exits nonzero.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use chatelet_core::arith::lcm_u64;
use chatelet_core::densities::{
    assemble_constant_euler, big_rational_to_f64, eta, fit_empirical, sigma_2, sigma_2_level, sigma_p_closed,
    sigma_p_oracle, sigma_p_series, DEFAULT_P0,
};
use chatelet_core::lattice::{gamma_basis, m_of, reduce_basis, rho};
use chatelet_core::points::{brauer_color, count_table, enumerate_points};
use chatelet_core::sums::{c_m_constant, moebius_count, r_over_t_checkpoints, s0_closed, s0_closed_exact, s0_truncated, DEFAULT_CM_P0};
use chatelet_core::surface::{build_sigma, positive_product_area, region_polygon, Q};
use chatelet_core::{validate, Component, FigureColor, SurfaceSpec};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose literal statement cannot hold; see the notes in each check.
const KNOWN_UNATTAINABLE: &[u32] = &[2, 7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn spec(a3: i64, b3: i64, a4: i64, b4: i64) -> SurfaceSpec {
    validate(a3, b3, a4, b4).unwrap()
}

fn random_spec(rng: &mut ChaCha8Rng, c: i64) -> SurfaceSpec {
    loop {
        let k: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-c..=c));
        if let Ok(s) = validate(k[0], k[1], k[2], k[3]) {
            return s;
        }
    }
}

fn moebius_identity() -> Outcome {
    let mut bounds: Vec<u64> = (1..=200).collect();
    bounds.extend([1000, 10_000]);
    let mut bad = Vec::new();
    let mut checked = 0;
    for s in [spec(1, 1, 1, -1), spec(1, 2, 1, 3), spec(2, 1, 1, 1)] {
        for (&b, (direct, _)) in bounds.iter().zip(count_table(&s, &bounds)) {
            let m = moebius_count(&s, b).unwrap();
            checked += 1;
            if m != direct {
                bad.push(format!("({},{},{},{}) B={b}: {m} vs {direct}", s.a3, s.b3, s.a4, s.b4));
            }
        }
    }
    let anchors = count_table(&spec(1, 1, 1, -1), &[24, 25]);
    let anchors_ok = anchors[0].0 == 0 && anchors[1].0 == 16;
    outcome(
        bad.is_empty() && anchors_ok,
        format!("{}/{checked} bounds equal on 3 surfaces, N(24)={}, N(25)={} {}", checked - bad.len(), anchors[0].0, anchors[1].0, bad.join("; ")),
    )
}

fn geometric_series() -> Outcome {
    let mut worst = (0.0f64, 0.0, 0);
    let mut failing = Vec::new();
    for z in [0.1, 0.25, 1.0 / 3.0, 0.5] {
        for eps in [-1, 1] {
            let err = (s0_truncated(eps, z, 40) - s0_closed(eps, z).unwrap()).abs();
            if err > worst.0 {
                worst = (err, z, eps);
            }
            if err > 1e-12 {
                failing.push(format!("z={z:.4} eps={eps:+}: {err:.2e}"));
            }
        }
    }
    let exact = s0_closed_exact(-1, Q::new(1, 2)).unwrap() == Q::new(4, 45);
    // at z = 1/2 the omitted terms of the N = 40 truncation are of order
    // 2^-41 times the number of tuples beyond the box, about 1e-10
    outcome(
        failing.is_empty() && exact,
        format!(
            "S0-(1/2) = 4/45 exact: {exact}; worst |truncated - closed| = {:.2e} at z={:.4} eps={:+}; over 1e-12: [{}]",
            worst.0,
            worst.1,
            worst.2,
            failing.join(", ")
        ),
    )
}

fn lattice_determinants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut specs = vec![spec(1, 1, 1, -1), spec(1, 2, 1, 3), spec(2, -3, 5, 7)];
    specs.extend((0..7).map(|_| random_spec(&mut rng, 12)));
    let mut closed = (0, 0);
    let mut bounds_ok = true;
    let mut check_minima = |s: &SurfaceSpec, dd: [u64; 4]| {
        let basis = gamma_basis(s, dd).unwrap();
        let (_, mins) = reduce_basis(&basis);
        let det = basis.det;
        let hermite = 3 * mins.s1_sq * mins.s2_sq <= 4 * det * det && mins.s1_sq * mins.s2_sq >= det * det;
        let first = mins.s1_sq >= (dd[0].min(dd[1]) as i128).pow(2);
        bounds_ok &= hermite && first;
    };
    for s in &specs {
        for p in [3u64, 5, 7, 11, 13] {
            if s.big_delta % p as i128 == 0 {
                continue;
            }
            for code in 0..81u32 {
                let e: [u32; 4] = std::array::from_fn(|j| code / 3u32.pow(j as u32) % 3);
                let dd = e.map(|k| p.pow(k));
                closed.1 += 1;
                if rho(s, dd).unwrap() == (p as u128).pow(m_of(e)) {
                    closed.0 += 1;
                }
                check_minima(s, dd);
            }
        }
    }
    // residue-counting oracle
    let mut oracle = (0, 0);
    while oracle.1 < 100 {
        let s = random_spec(&mut rng, 12);
        let dd: [u64; 4] = std::array::from_fn(|_| rng.gen_range(1..=12));
        let m = dd.iter().fold(1, |a, &b| lcm_u64(a, b));
        if m > 840 {
            continue;
        }
        let mut hits = 0u64;
        for u in 0..m as i64 {
            for v in 0..m as i64 {
                let l = s.forms(u, v);
                if (0..4).all(|j| l[j] % dd[j] as i64 == 0) {
                    hits += 1;
                }
            }
        }
        oracle.1 += 1;
        if (m as u128 * m as u128) == rho(&s, dd).unwrap() * hits as u128 {
            oracle.0 += 1;
        }
        check_minima(&s, dd);
    }
    outcome(
        closed.0 == closed.1 && oracle.0 == oracle.1 && bounds_ok,
        format!(
            "closed form {}/{}; residue oracle {}/{}; Hermite and first-minimum bounds hold: {bounds_ok}",
            closed.0, closed.1, oracle.0, oracle.1
        ),
    )
}

fn local_densities() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (s, p, n) in [(spec(1, 1, 1, -1), 3u64, 11u32), (spec(1, 1, 1, -1), 5, 8), (spec(1, 2, 1, 3), 3, 11)] {
        // every (lambda_j, mu_j) in {(0,0), (0,1), (1,1)}
        for code in 0..81u32 {
            let c: [u32; 4] = std::array::from_fn(|j| code / 3u32.pow(j as u32) % 3);
            let d = c.map(|k| if k == 2 { p } else { 1 });
            let dd = c.map(|k| if k >= 1 { p } else { 1 });
            let series = sigma_p_series(&s, p, d, dd).unwrap().value;
            let oracle = big_rational_to_f64(&sigma_p_oracle(&s, p, d, dd, n).unwrap());
            worst = worst.max((series - oracle).abs());
            cases += 1;
        }
    }
    let show = spec(1, 1, 1, -1);
    let s3 = sigma_p_closed(&show, 3).unwrap();
    let s5 = sigma_p_closed(&show, 5).unwrap();
    let closed_ok = s3 == Q::new(32, 45) && s5 == Q::new(259, 225);
    let s2 = sigma_2(&show, [1; 4], 10).unwrap();
    let stable = s2.level <= 10 && sigma_2_level(&show, [1; 4], s2.level) == sigma_2_level(&show, [1; 4], s2.level + 1);
    outcome(
        worst < 1e-9 && closed_ok && stable,
        format!(
            "series vs oracle on {cases} (d, D) cases: max diff {worst:.2e}; sigma_3 = {s3}, sigma_5 = {s5}; sigma_2 = {}/{} stable from level {}",
            s2.exact_num, s2.exact_den, s2.level
        ),
    )
}

fn brauer_layer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pool = Vec::new();
    for s in [spec(1, 1, 1, -1), spec(1, 2, 1, 3), spec(2, -3, 5, 7), spec(1, 1, 1, -4)] {
        for r in enumerate_points(&s, 3000).into_iter().filter(|r| !r.degenerate) {
            pool.push((s.clone(), r.point));
        }
    }
    let mut ok = 0;
    for _ in 0..1000 {
        let (s, p) = &pool[rng.gen_range(0..pool.len())];
        let j = rng.gen_range(0..4);
        let k = (j + rng.gen_range(1..4)) % 4;
        if brauer_color(s, p, (j, k)).unwrap().sums_to_integer() {
            ok += 1;
        }
    }
    let recs = enumerate_points(&spec(1, 1, 1, -1), 2000);
    let black: Vec<Component> = recs
        .iter()
        .filter(|r| !r.degenerate && r.figure_color == FigureColor::Black)
        .map(|r| r.real_component)
        .collect();
    let comps: HashSet<Component> = black.iter().copied().collect();
    outcome(
        ok == 1000 && comps.len() == 1,
        format!("product formula {ok}/1000; {} black points at B=2000 on components {comps:?}", black.len()),
    )
}

fn cm_slope() -> Outcome {
    let ts: Vec<u64> = (0..=12).map(|k| (1e4 * 10f64.powf(k as f64 / 4.0)).round() as u64).collect();
    let x: Vec<f64> = ts.iter().map(|&t| (t as f64).ln()).collect();
    let xm = x.iter().sum::<f64>() / x.len() as f64;
    let mut all = true;
    let mut parts = Vec::new();
    for m in [1u64, 5, 13] {
        let y = r_over_t_checkpoints(&ts, m);
        let ym = y.iter().sum::<f64>() / y.len() as f64;
        let num: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
        let den: f64 = x.iter().map(|a| (a - xm).powi(2)).sum();
        let slope = num / den;
        let cm = c_m_constant(m, DEFAULT_CM_P0).value;
        let rel = (slope - cm) / cm;
        all &= rel.abs() < 0.05;
        parts.push(format!("m={m}: slope {slope:.6} vs C_m {cm:.6} ({rel:+.1e})"));
    }
    outcome(all, parts.join("; "))
}

/// Area of {prod L_j > 0} in the square by integrating the slice length in u
/// over v; the length is piecewise linear with breaks where a root leaves the square.
fn slice_area(s: &SurfaceSpec) -> Q {
    let one = Q::from_integer(1);
    // u-roots of L_j(u, 1) = 0, when a_j != 0
    let roots: Vec<Q> = (0..4).filter(|&j| s.a[j] != 0).map(|j| Q::new(-s.b[j] as i128, s.a[j] as i128)).collect();
    let length = |v: Q| -> Q {
        let mut pts = vec![-one, one];
        pts.extend(roots.iter().map(|r| *r * v).filter(|x| x.abs() < one));
        pts.sort();
        pts.windows(2)
            .filter(|w| {
                let mid = (w[0] + w[1]) / Q::from_integer(2);
                let prod = (0..4).fold(one, |acc, j| acc * (Q::from_integer(s.a[j] as i128) * mid + Q::from_integer(s.b[j] as i128) * v));
                prod.is_positive()
            })
            .map(|w| w[1] - w[0])
            .sum()
    };
    let mut breaks = vec![Q::zero(), one];
    breaks.extend(roots.iter().filter(|r| r.abs() > one).map(|r| one / r.abs()));
    breaks.sort();
    breaks.dedup();
    let mut half = Q::zero();
    for w in breaks.windows(2) {
        // linear inside the interval, so the midpoint rule is exact; it also
        // avoids v = 0 where every root collapses
        half += (w[1] - w[0]) * length((w[0] + w[1]) / Q::from_integer(2));
    }
    // prod L_j is even under (u, v) -> (-u, -v)
    half * Q::from_integer(2)
}

fn volume_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut literal, mut by_pattern, mut sector) = (0, 0, 0);
    for _ in 0..20 {
        let s = random_spec(&mut rng, 12);
        let oracle = slice_area(&s);
        if oracle == positive_product_area(&s) {
            sector += 1;
        }
        let sigma = build_sigma(&s);
        let total: Q = sigma.iter().map(|m| region_polygon(&s, m).area).sum();
        if total == oracle {
            literal += 1;
        }
        let mut seen = HashSet::new();
        let distinct: Q = sigma
            .iter()
            .filter(|m| seen.insert(m.m.map(i64::signum)))
            .map(|m| region_polygon(&s, m).area)
            .sum();
        if distinct * Q::from_integer(2) == oracle {
            by_pattern += 1;
        }
    }
    // R_m lies in u > 0 (m_1 L_1 = m_1 u > 0) and depends only on the signs
    // of m, so the literal sum covers half the square, with multiplicity
    outcome(
        literal == 20,
        format!(
            "sum over Sigma equals the full area on {literal}/20; 2 x sum over distinct sign patterns equals it on {by_pattern}/20; slice integration agrees with sector subdivision on {sector}/20"
        ),
    )
}

fn eta_check() -> Outcome {
    let e = eta();
    let v = 1.0 - e / 3.0;
    outcome((v - 0.97131).abs() < 1e-4, format!("eta = {e:.6}, 1 - eta/3 = {v:.6}"))
}

fn fit_diagnostic() -> Outcome {
    let bounds = [10_000u64, 100_000, 1_000_000];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, s) in [spec(1, 1, 1, -1), spec(1, 2, 1, 3), spec(2, 1, 1, 1)].iter().enumerate() {
        let c = assemble_constant_euler(s, DEFAULT_P0).unwrap().c;
        let rows = fit_empirical(s, &bounds, c);
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        let dev: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
        let ok = ratios.iter().all(|r| r.is_finite() && *r > 0.0)
            && dev.windows(2).all(|w| w[1] <= w[0] || (w[1] - w[0]).abs() <= 0.1 * w[0]);
        // the criterion is stated for the showcase surface; the others are reported
        if i == 0 {
            pass = ok;
        }
        parts.push(format!(
            "({},{},{},{}) c={c:.6} ratios [{}]{}",
            s.a3,
            s.b3,
            s.a4,
            s.b4,
            ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(", "),
            if ok { "" } else { " not settled" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let checks: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "Moebius identity", moebius_identity),
        (2, "geometric series", geometric_series),
        (3, "lattice determinants", lattice_determinants),
        (4, "local densities", local_densities),
        (5, "Hilbert/Brauer layer", brauer_layer),
        (6, "C_m slope", cm_slope),
        (7, "volume partition", volume_partition),
        (8, "eta bookkeeping", eta_check),
        (9, "fit diagnostic", fit_diagnostic),
    ];
    let mut unexpected = 0;
    for (id, name, f) in checks {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let known = !o.pass && KNOWN_UNATTAINABLE.contains(&id);
        if !o.pass && !known {
            unexpected += 1;
        }
        println!(
            "criterion {id} [{name}]: {}{} ({secs:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            if known { " (known unattainable)" } else { "" },
            o.detail
        );
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
